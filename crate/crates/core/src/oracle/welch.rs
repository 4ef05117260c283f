//! Windowed periodogram averaging over non-overlapping segments.
//!
//! Normalization: P(Ω_k) = Δ·|Σ w_n y_n e^{iΩ_k t_n}|² / Σ w_n², so unit
//! white noise (sample variance 1/Δ) has density 1.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

use super::OracleError;

/// Fewest segments accepted for an estimate with a meaningful error bar.
pub const MIN_SEGMENTS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Window {
    #[default]
    Hann,
    Rectangular,
}

impl Window {
    pub fn coefficients(self, n: usize) -> Vec<f64> {
        match self {
            Window::Rectangular => vec![1.0; n],
            Window::Hann => (0..n).map(|k| 0.5 - 0.5 * (2.0 * PI * k as f64 / n as f64).cos()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleEstimate {
    /// Bin frequencies Ω_k = 2πk/(NΔ), k = 1..N/2, rad/s.
    pub grid: Vec<f64>,
    pub psd: Vec<f64>,
    /// Standard error of the mean over segments.
    pub stderr: Vec<f64>,
    pub segments: usize,
    pub dt: f64,
    pub seed: Option<u64>,
}

/// Plans and applies the windowed transform of equal-length segments.
pub struct SegmentTransform {
    len: usize,
    dt: f64,
    window: Vec<f64>,
    norm: f64,
    fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for SegmentTransform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SegmentTransform").field("len", &self.len).field("dt", &self.dt).finish()
    }
}

impl SegmentTransform {
    pub fn new(len: usize, dt: f64, window: Window) -> Result<Self, OracleError> {
        if len < 4 {
            return Err(OracleError::Settings(format!("segment length {len} too short")));
        }
        let w = window.coefficients(len);
        let norm = dt / w.iter().map(|v| v * v).sum::<f64>();
        // e^{+iΩt} kernel
        let fft = FftPlanner::new().plan_fft_inverse(len);
        Ok(Self { len, dt, window: w, norm, fft })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Number of positive-frequency bins, k = 1..N/2.
    pub fn bins(&self) -> usize {
        self.len / 2
    }

    pub fn bin_omega(&self, k: usize) -> f64 {
        2.0 * PI * k as f64 / (self.len as f64 * self.dt)
    }

    pub fn grid(&self) -> Vec<f64> {
        (1..=self.bins()).map(|k| self.bin_omega(k)).collect()
    }

    /// Nearest bin index (1-based) to Ω.
    pub fn nearest_bin(&self, omega: f64) -> usize {
        let k = (omega * self.len as f64 * self.dt / (2.0 * PI)).round() as usize;
        k.clamp(1, self.bins())
    }

    /// Windowed, mean-removed transform scaled so that |X_k|² is the periodogram.
    /// Index k of the result is bin k; index 0 is unused.
    pub fn transform(&self, segment: &[f64]) -> Vec<Complex64> {
        assert_eq!(segment.len(), self.len, "segment length mismatch");
        let mean = segment.iter().sum::<f64>() / self.len as f64;
        let mut buf: Vec<Complex64> =
            segment.iter().zip(&self.window).map(|(y, w)| Complex64::new((y - mean) * w, 0.0)).collect();
        self.fft.process(&mut buf);
        let s = self.norm.sqrt();
        buf.truncate(self.bins() + 1);
        buf.iter_mut().for_each(|v| *v *= s);
        buf
    }
}

/// Running mean and spread of per-segment periodograms.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodogramAccumulator {
    sum: Vec<f64>,
    sum_sq: Vec<f64>,
    count: usize,
}

impl PeriodogramAccumulator {
    pub fn new(bins: usize) -> Self {
        Self { sum: vec![0.0; bins], sum_sq: vec![0.0; bins], count: 0 }
    }

    pub fn push(&mut self, periodogram: &[f64]) {
        for ((s, q), p) in self.sum.iter_mut().zip(&mut self.sum_sq).zip(periodogram) {
            *s += p;
            *q += p * p;
        }
        self.count += 1;
    }

    pub fn merge(mut self, other: &Self) -> Self {
        for (a, b) in self.sum.iter_mut().zip(&other.sum) {
            *a += b;
        }
        for (a, b) in self.sum_sq.iter_mut().zip(&other.sum_sq) {
            *a += b;
        }
        self.count += other.count;
        self
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Mean and standard error of the mean per bin.
    pub fn finish(&self) -> (Vec<f64>, Vec<f64>) {
        let m = self.count as f64;
        let mean: Vec<f64> = self.sum.iter().map(|s| s / m).collect();
        let stderr = self
            .sum_sq
            .iter()
            .zip(&mean)
            .map(|(q, mu)| {
                let var = if self.count > 1 { ((q / m - mu * mu) * m / (m - 1.0)).max(0.0) } else { 0.0 };
                (var / m).sqrt()
            })
            .collect();
        (mean, stderr)
    }
}

/// Welch estimate of a sampled series. Trailing samples that do not fill a
/// segment are dropped.
pub fn estimate_psd(series: &[f64], dt: f64, segment_len: usize, window: Window) -> Result<OracleEstimate, OracleError> {
    let t = SegmentTransform::new(segment_len, dt, window)?;
    let segments = series.len() / segment_len;
    if segments < MIN_SEGMENTS {
        return Err(OracleError::TooFewSegments { segments, required: MIN_SEGMENTS });
    }
    let mut acc = PeriodogramAccumulator::new(t.bins());
    for seg in series.chunks_exact(segment_len) {
        let x = t.transform(seg);
        let p: Vec<f64> = x[1..].iter().map(|v| v.norm_sqr()).collect();
        acc.push(&p);
    }
    let (psd, stderr) = acc.finish();
    Ok(OracleEstimate { grid: t.grid(), psd, stderr, segments, dt, seed: None })
}
