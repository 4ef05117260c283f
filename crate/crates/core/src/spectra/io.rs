//! CSV and JSON renderings of spectra. Numbers are written in shortest
//! round-trip form so outputs are reproducible byte for byte.

use serde::Serialize;

use super::{NoiseBudget, SpectrumSeries};

pub const OMEGA_COLUMN: &str = "omega_rad_s";
pub const VALUE_COLUMN: &str = "value";

fn push_row(out: &mut String, cells: impl IntoIterator<Item = f64>) {
    let row: Vec<String> = cells.into_iter().map(|v| format!("{v:e}")).collect();
    out.push_str(&row.join(","));
    out.push('\n');
}

/// `omega_rad_s,value` with one row per grid point.
pub fn series_csv(series: &SpectrumSeries) -> String {
    let mut out = format!("{OMEGA_COLUMN},{VALUE_COLUMN}\n");
    for (&w, &v) in series.grid.iter().zip(&series.values) {
        push_row(&mut out, [w, v]);
    }
    out
}

/// Several curves sharing one grid: `omega_rad_s,<label>,...`.
pub fn multi_series_csv(columns: &[(&str, &[f64])], grid: &[f64]) -> String {
    let mut out = String::from(OMEGA_COLUMN);
    for (label, _) in columns {
        out.push(',');
        out.push_str(label);
    }
    out.push('\n');
    for (i, &w) in grid.iter().enumerate() {
        push_row(&mut out, std::iter::once(w).chain(columns.iter().map(|(_, v)| v[i])));
    }
    out
}

/// Total plus one column per noise channel.
pub fn budget_csv(budget: &NoiseBudget) -> String {
    let cols: Vec<(&str, &[f64])> = std::iter::once((VALUE_COLUMN, budget.total.values.as_slice()))
        .chain(budget.channels.iter().map(|(ch, v)| (ch.name(), v.as_slice())))
        .collect();
    multi_series_csv(&cols, &budget.total.grid)
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("spectra types always serialize")
}

/// Parses a two-column CSV written by [`series_csv`].
pub fn parse_series_csv(text: &str) -> Result<(Vec<f64>, Vec<f64>), String> {
    let mut lines = text.lines();
    let header = lines.next().ok_or("empty csv")?;
    if header != format!("{OMEGA_COLUMN},{VALUE_COLUMN}") {
        return Err(format!("unexpected header '{header}'"));
    }
    let mut grid = Vec::new();
    let mut values = Vec::new();
    for (n, line) in lines.enumerate() {
        let (a, b) = line.split_once(',').ok_or_else(|| format!("line {}: expected two columns", n + 2))?;
        grid.push(a.parse::<f64>().map_err(|e| format!("line {}: {e}", n + 2))?);
        values.push(b.parse::<f64>().map_err(|e| format!("line {}: {e}", n + 2))?);
    }
    Ok((grid, values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Execution;
    use crate::model::presets::{table1, TauPreset};
    use crate::spectra::{case_spectrum, noise_budget, FrequencyGrid, SpectrumCase};

    #[test]
    fn csv_roundtrip_is_exact() {
        let c = table1(TauPreset::Table1);
        let grid = FrequencyGrid::log(1.0, 1e6, 37).unwrap();
        let s = case_spectrum(SpectrumCase::Baseline, &c, &grid, Execution::Sequential).unwrap();
        let text = series_csv(&s);
        assert_eq!(text.lines().count(), 38);
        let (g, v) = parse_series_csv(&text).unwrap();
        assert_eq!(g, s.grid);
        assert_eq!(v, s.values);
    }

    #[test]
    fn budget_columns() {
        let c = table1(TauPreset::Table1);
        let grid = FrequencyGrid::log(1.0, 1e6, 5).unwrap();
        let case = SpectrumCase::NondegSub.measurement(&c).unwrap();
        let b = noise_budget(&case, &c, &grid, Execution::Sequential).unwrap();
        let text = budget_csv(&b);
        assert_eq!(
            text.lines().next().unwrap(),
            "omega_rad_s,value,alpha_plus,alpha_minus,eps_plus,eps_minus,thermal"
        );
    }
}
