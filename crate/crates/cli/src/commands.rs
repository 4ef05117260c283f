//! Subcommand implementations. Every command computes all of its outputs in
//! memory first; nothing is written unless the whole computation succeeded.

use anyhow::{bail, ensure, Context as _, Result};
use serde::Serialize;
use std::path::{Path, PathBuf};

use varsens::model::presets::table1;
use varsens::model::{ConfigFile, MechanicalOscillator, SignalPulse, SqueezeConfig, SystemConfig};
use varsens::oracle::validate::plan;
use varsens::oracle::{validate, ValidationSettings};
use varsens::spectra::figures::{figure, figure_config, FigureId};
use varsens::spectra::io::{budget_csv, series_csv, to_json};
use varsens::spectra::threshold::{spectral_threshold, spectral_threshold_force, time_domain_threshold};
use varsens::spectra::{
    case_psd, case_spectrum, closed_form_spectrum, noise_budget, ratio_to_sql, spectrum, FrequencyGrid,
    SpectrumCase,
};
use varsens::transfer::{MeasurementCase, QuadratureFamily};
use varsens::Execution;

use crate::cli::{
    Cli, Command, FigureArgs, FigureSelection, InitConfigArgs, ReplayArgs, SpectrumArgs, SqueezeArgs, ThresholdArgs,
    ValidateArgs,
};
use crate::manifest::{manifest_path_for, read_manifest, timestamp, Outputs, RunManifest};

/// How a command ended when it did not error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    /// Validation or replay mismatch.
    Failure,
}

/// Files belonging to one manifest.
#[derive(Debug)]
pub struct Group {
    pub manifest: PathBuf,
    pub argv: Vec<String>,
    pub config: ConfigFile,
    pub seeds: Vec<u64>,
    pub files: Outputs,
}

#[derive(Debug)]
pub struct Produced {
    pub groups: Vec<Group>,
    pub stdout: String,
    pub status: Status,
}

impl Produced {
    fn text(stdout: String) -> Self {
        Self { groups: Vec::new(), stdout, status: Status::Success }
    }

    /// Writes every file and manifest, then prints stdout.
    pub fn emit(&self, command: &str) -> Result<()> {
        for g in &self.groups {
            g.files.write()?;
            let manifest = RunManifest {
                command: command.to_string(),
                argv: g.argv.clone(),
                config: g.config.clone(),
                outputs: g.files.records(),
                seeds: g.seeds.clone(),
                tool_version: env!("CARGO_PKG_VERSION").to_string(),
                timestamp: timestamp(),
            };
            let text = serde_json::to_string_pretty(&manifest)? + "\n";
            std::fs::write(&g.manifest, text).with_context(|| format!("writing {}", g.manifest.display()))?;
        }
        print!("{}", self.stdout);
        Ok(())
    }
}

pub struct Context {
    pub base: SystemConfig,
    pub exec: Execution,
    /// Arguments after the program name, recorded in manifests.
    pub argv: Vec<String>,
}

impl Context {
    pub fn from_cli(cli: &Cli, argv: Vec<String>) -> Result<Self> {
        let base = match &cli.config {
            Some(path) => SystemConfig::from_path(path).with_context(|| format!("loading config {}", path.display()))?,
            None => table1(cli.tau_preset.unwrap_or_default()),
        };
        Self::with_base(cli, base, argv)
    }

    pub fn with_base(cli: &Cli, base: SystemConfig, argv: Vec<String>) -> Result<Self> {
        let base = match cli.tau_preset {
            Some(p) => with_tau(&base, p.seconds())?,
            None => base,
        };
        let exec = if cli.sequential { Execution::Sequential } else { Execution::Parallel };
        Ok(Self { base, exec, argv })
    }
}

pub fn run(cli: &Cli, ctx: &Context) -> Result<Produced> {
    match &cli.command {
        Command::Spectrum(a) => cmd_spectrum(a, ctx),
        Command::Figure(a) => cmd_figure(a, ctx),
        Command::Threshold(a) => cmd_threshold(a, ctx),
        Command::Validate(a) => cmd_validate(a, ctx),
        Command::Replay(a) => cmd_replay(a),
        Command::InitConfig(a) => cmd_init_config(a, ctx),
    }
}

fn with_tau(config: &SystemConfig, tau: f64) -> Result<SystemConfig> {
    let s = config.signal();
    Ok(config.with_signal(SignalPulse::new(s.force_amplitude(), tau, s.phase())?)?)
}

fn apply_squeeze(config: &SystemConfig, args: &SqueezeArgs) -> Result<SystemConfig> {
    let g0 = config.cavity().gamma0();
    let sq = match (args.kappa, args.upsilon) {
        (Some(k), _) => SqueezeConfig::TwoPhoton { kappa: k.resolve(g0) },
        (None, Some(u)) => SqueezeConfig::Degenerate { upsilon: u.resolve(g0) },
        (None, None) => return Ok(config.clone()),
    };
    Ok(config.with_squeeze(sq)?)
}

/// `dir/name.csv` → `dir/name.json`.
fn json_sibling(path: &Path) -> Result<PathBuf> {
    let json = path.with_extension("json");
    ensure!(json != path, "output path {} must not end in .json", path.display());
    Ok(json)
}

fn cmd_spectrum(a: &SpectrumArgs, ctx: &Context) -> Result<Produced> {
    let mut cfg = apply_squeeze(&ctx.base, &a.squeeze)?;
    if let Some(p) = a.pump_model {
        cfg = cfg.with_pump_model(p.into());
    }
    let g0 = cfg.cavity().gamma0();
    let grid = FrequencyGrid::log(a.omega_min.resolve(g0), a.omega_max.resolve(g0), a.points)?;
    let family = a.family.resolve();
    let measurement = MeasurementCase::new(a.case.squeeze(&cfg)?, family, a.case.combination());
    let (csv, json) = if a.budget {
        let b = noise_budget(&measurement, &cfg, &grid, ctx.exec)?;
        (budget_csv(&b), to_json(&b))
    } else {
        let mut s = if a.closed_form {
            ensure!(family == QuadratureFamily::Amplitude, "closed forms exist only for the amplitude family");
            closed_form_spectrum(a.case, &cfg, &grid, ctx.exec)?
        } else if family == QuadratureFamily::Amplitude {
            case_spectrum(a.case, &cfg, &grid, ctx.exec)?
        } else {
            let mut s = spectrum(&measurement, &cfg, &grid, ctx.exec)?;
            s.label = a.case.name().to_string();
            s
        };
        if a.ratio_to_sql {
            s = ratio_to_sql(&s, cfg.mechanical().gamma_m());
        }
        (series_csv(&s), to_json(&s))
    };
    let Some(out) = &a.out else {
        return Ok(Produced::text(csv));
    };
    let mut files = Outputs::default();
    files.add(out.clone(), csv);
    files.add(json_sibling(out)?, json + "\n");
    let group = Group {
        manifest: manifest_path_for(out),
        argv: ctx.argv.clone(),
        config: ctx.base.to_file(),
        seeds: Vec::new(),
        files,
    };
    Ok(Produced { groups: vec![group], stdout: String::new(), status: Status::Success })
}

#[derive(Serialize)]
struct SidecarCurve {
    label: String,
    squeeze_g0: Option<f64>,
    quantity: &'static str,
    file: String,
    points: usize,
    min_omega: f64,
    min_value: f64,
}

/// Preset values and file list of one figure.
#[derive(Serialize)]
struct FigureSidecar {
    id: FigureId,
    description: &'static str,
    tau: f64,
    pump: f64,
    gamma0: f64,
    gamma_e: f64,
    gamma_m: f64,
    config: ConfigFile,
    curves: Vec<SidecarCurve>,
}

fn selected_figures(ids: &[FigureSelection]) -> Vec<FigureId> {
    let mut out: Vec<FigureId> = Vec::new();
    for sel in ids {
        let add: Vec<FigureId> = match sel {
            FigureSelection::All => FigureId::ALL.to_vec(),
            FigureSelection::One(id) => vec![*id],
        };
        for id in add {
            if !out.contains(&id) {
                out.push(id);
            }
        }
    }
    out
}

fn cmd_figure(a: &FigureArgs, ctx: &Context) -> Result<Produced> {
    let mut groups = Vec::new();
    let mut stdout = String::new();
    for id in selected_figures(&a.ids) {
        let data = figure(id, None, ctx.exec)?;
        let cfg = figure_config(id)?;
        let mut files = Outputs::default();
        let mut curves = Vec::new();
        for c in &data.curves {
            let name = format!("{id}_{}.csv", c.label);
            let (min_omega, min_value) = c.series.min().unwrap_or((f64::NAN, f64::NAN));
            files.add(a.out_dir.join(&name), series_csv(&c.series));
            curves.push(SidecarCurve {
                label: c.label.clone(),
                squeeze_g0: c.squeeze_g0,
                quantity: c.quantity,
                file: name,
                points: c.series.grid.len(),
                min_omega,
                min_value,
            });
        }
        let sidecar = FigureSidecar {
            id,
            description: data.description,
            tau: data.tau,
            pump: data.pump,
            gamma0: data.gamma0,
            gamma_e: data.gamma_e,
            gamma_m: cfg.mechanical().gamma_m(),
            config: cfg.to_file(),
            curves,
        };
        files.add(a.out_dir.join(format!("{id}.json")), to_json(&sidecar) + "\n");
        stdout.push_str(&format!("{id}: {} curves in {}\n", data.curves.len(), a.out_dir.display()));
        groups.push(Group {
            manifest: a.out_dir.join(format!("{id}.manifest.json")),
            // one manifest per figure, so each replays on its own
            argv: vec!["figure".into(), id.to_string(), "--out-dir".into(), a.out_dir.display().to_string()],
            config: cfg.to_file(),
            seeds: Vec::new(),
            files,
        });
    }
    Ok(Produced { groups, stdout, status: Status::Success })
}

#[derive(Debug, Serialize)]
struct SpectralThreshold {
    case: SpectrumCase,
    omega: f64,
    psd: f64,
    /// f_s0 = √(S/τ), normalized units.
    normalized: f64,
    /// N
    force: f64,
}

#[derive(Debug, Serialize)]
struct ThresholdReport {
    tau: f64,
    quality: f64,
    n_thermal: f64,
    braginsky: f64,
    gamma_m_tau: f64,
    short_pulse_ok: bool,
    k_star: f64,
    f_s0_band_integrated: f64,
    f_s0_sql_form: f64,
    f_sql: f64,
    spectral: SpectralThreshold,
}

fn cmd_threshold(a: &ThresholdArgs, ctx: &Context) -> Result<Produced> {
    let mut cfg = ctx.base.clone();
    if let Some(q) = a.quality {
        let m = cfg.mechanical();
        cfg = cfg.with_mechanical(MechanicalOscillator::from_quality(m.mass(), m.omega_m(), q, m.temperature())?)?;
    }
    if let Some(tau) = a.tau {
        cfg = with_tau(&cfg, tau)?;
    }
    let cfg = apply_squeeze(&cfg, &a.squeeze)?;
    let tau = cfg.signal().tau();
    let t = time_domain_threshold(&cfg, tau);
    let (omega, psd) = match a.omega {
        Some(w) => {
            let w = w.resolve(cfg.cavity().gamma0());
            (w, case_psd(a.case, &cfg, w)?)
        }
        None => case_spectrum(a.case, &cfg, &FrequencyGrid::default_for(&cfg), ctx.exec)?
            .min()
            .context("empty spectrum")?,
    };
    let report = ThresholdReport {
        tau,
        quality: cfg.mechanical().quality(),
        n_thermal: cfg.n_thermal(),
        braginsky: cfg.derived().braginsky,
        gamma_m_tau: t.gamma_m_tau,
        short_pulse_ok: t.short_pulse_ok(),
        k_star: t.k_star,
        f_s0_band_integrated: t.band_integrated,
        f_s0_sql_form: t.sql_form,
        f_sql: t.f_sql,
        spectral: SpectralThreshold {
            case: a.case,
            omega,
            psd,
            normalized: spectral_threshold(psd, tau),
            force: spectral_threshold_force(&cfg, psd, tau),
        },
    };
    let text = if a.json {
        to_json(&report) + "\n"
    } else {
        let r = &report;
        let s = &r.spectral;
        let mut out = String::new();
        out.push_str(&format!("tau                     {:e} s\n", r.tau));
        out.push_str(&format!("quality                 {:e}\n", r.quality));
        out.push_str(&format!("n_T                     {:.6e}\n", r.n_thermal));
        out.push_str(&format!("B                       {:.6}\n", r.braginsky));
        out.push_str(&format!("K*                      {:.6e} rad/s\n", r.k_star));
        out.push_str(&format!("F_s0 band-integrated    {:.6e} N\n", r.f_s0_band_integrated));
        out.push_str(&format!("F_s0 SQL spectrum       {:.6e} N\n", r.f_s0_sql_form));
        out.push_str(&format!("F_SQL                   {:.6e} N\n", r.f_sql));
        out.push_str(&format!(
            "spectral ({} at {:.6e} rad/s)  {:.6e} N (f_s0 = {:.6e})\n",
            s.case, s.omega, s.force, s.normalized
        ));
        if !r.short_pulse_ok {
            out.push_str(&format!("warning: gamma_m tau = {:.3e}, short-pulse approximation is poor\n", r.gamma_m_tau));
        }
        out
    };
    Ok(Produced::text(text))
}

fn cmd_validate(a: &ValidateArgs, ctx: &Context) -> Result<Produced> {
    let cfg = apply_squeeze(&ctx.base, &a.squeeze)?;
    let mut settings = ValidationSettings {
        segments: a.segments,
        dt: a.dt,
        seed: a.seed,
        tolerance: a.tolerance,
        perturb_kappa: a.perturb_kappa,
        integrator: a.integrator,
        family: a.family.resolve(),
        ..ValidationSettings::default()
    };
    if let Some(duration) = a.duration {
        ensure!(duration > 0.0 && duration.is_finite(), "duration must be positive");
        let sim = cfg.with_squeeze(a.case.squeeze(&cfg)?)?;
        let dt = plan(&sim, &settings)?.dt;
        settings.segment_len = Some((duration / dt).ceil() as usize);
    }
    let report = validate(&cfg, a.case, &settings, ctx.exec)?;
    let json = to_json(&report) + "\n";
    eprintln!(
        "validate {}: {:.1}% of {} points within tolerance, {}",
        a.case,
        100.0 * report.fraction_within,
        report.points.len(),
        if report.passed { "PASS" } else { "FAIL" }
    );
    let status = if report.passed { Status::Success } else { Status::Failure };
    let Some(out) = &a.out else {
        return Ok(Produced { groups: Vec::new(), stdout: json, status });
    };
    let mut files = Outputs::default();
    files.add(out.clone(), json);
    let group = Group {
        manifest: manifest_path_for(out),
        argv: ctx.argv.clone(),
        config: ctx.base.to_file(),
        seeds: vec![a.seed],
        files,
    };
    Ok(Produced { groups: vec![group], stdout: String::new(), status })
}

fn cmd_init_config(a: &InitConfigArgs, ctx: &Context) -> Result<Produced> {
    let json = ctx.base.to_file().to_json_pretty() + "\n";
    let Some(out) = &a.out else {
        return Ok(Produced::text(json));
    };
    let mut files = Outputs::default();
    files.add(out.clone(), json);
    let group = Group {
        manifest: manifest_path_for(out),
        argv: ctx.argv.clone(),
        config: ctx.base.to_file(),
        seeds: Vec::new(),
        files,
    };
    Ok(Produced { groups: vec![group], stdout: String::new(), status: Status::Success })
}

/// Points every output of a parsed command into `dir`, keeping file names.
fn redirect(command: &mut Command, dir: &Path) -> Result<()> {
    let into = |p: &Path| -> Result<PathBuf> {
        Ok(dir.join(p.file_name().with_context(|| format!("output path {} has no file name", p.display()))?))
    };
    match command {
        Command::Spectrum(a) => a.out = a.out.as_deref().map(into).transpose()?,
        Command::Validate(a) => a.out = a.out.as_deref().map(into).transpose()?,
        Command::InitConfig(a) => a.out = a.out.as_deref().map(into).transpose()?,
        Command::Figure(a) => a.out_dir = dir.to_path_buf(),
        Command::Threshold(_) | Command::Replay(_) => {}
    }
    Ok(())
}

fn cmd_replay(a: &ReplayArgs) -> Result<Produced> {
    let manifest = read_manifest(&a.manifest)?;
    let args = std::iter::once("varsens".to_string()).chain(manifest.argv.iter().cloned());
    let mut cli = <Cli as clap::Parser>::try_parse_from(args).context("manifest arguments do not parse")?;
    if matches!(cli.command, Command::Replay(_)) {
        bail!("a manifest cannot replay another replay");
    }
    let dir = a.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    redirect(&mut cli.command, &dir)?;
    let base = manifest.config.build().context("manifest configuration is invalid")?;
    // the snapshot replaces whatever --config pointed to
    cli.config = None;
    let ctx = Context::with_base(&cli, base, manifest.argv.clone())?;
    let produced = run(&cli, &ctx)?;

    let records: Vec<_> = produced.groups.iter().flat_map(|g| g.files.records()).collect();
    let mut report = String::new();
    let mut ok = records.len() == manifest.outputs.len();
    if !ok {
        report.push_str(&format!("expected {} outputs, regenerated {}\n", manifest.outputs.len(), records.len()));
    }
    for (want, got) in manifest.outputs.iter().zip(&records) {
        let same = want.sha256 == got.sha256;
        ok &= same;
        report.push_str(&format!("{} {}\n", if same { "match   " } else { "MISMATCH" }, want.path));
    }
    if a.out_dir.is_some() {
        for g in &produced.groups {
            g.files.write()?;
        }
    }
    Ok(Produced { groups: Vec::new(), stdout: report, status: if ok { Status::Success } else { Status::Failure } })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::Cli;
    use clap::Parser;

    fn context(args: &[&str]) -> (Cli, Context) {
        let cli = Cli::try_parse_from(std::iter::once("varsens").chain(args.iter().copied())).unwrap();
        let ctx = Context::with_base(&cli, table1(Default::default()), Vec::new()).unwrap();
        (cli, ctx)
    }

    #[test]
    fn spectrum_to_stdout_has_header_and_rows() {
        let (cli, ctx) = context(&["spectrum", "--case", "baseline", "--points", "5"]);
        let p = run(&cli, &ctx).unwrap();
        assert!(p.groups.is_empty());
        assert_eq!(p.stdout.lines().count(), 6);
        assert!(p.stdout.starts_with("omega_rad_s,value\n"));
    }

    #[test]
    fn closed_form_rejects_phase_family() {
        let (cli, ctx) = context(&["spectrum", "--case", "baseline", "--closed-form", "--family", "phase"]);
        assert!(run(&cli, &ctx).is_err());
    }

    #[test]
    fn budget_has_channel_columns() {
        let (cli, ctx) = context(&["spectrum", "--case", "nondeg-raw", "--kappa", "0.5g0", "--budget", "--points", "3"]);
        let p = run(&cli, &ctx).unwrap();
        let header = p.stdout.lines().next().unwrap();
        assert_eq!(header.split(',').count(), 7, "{header}");
    }

    #[test]
    fn figure_selection_deduplicates() {
        let ids = [FigureSelection::One(FigureId::Fig4), FigureSelection::All];
        let got = selected_figures(&ids);
        assert_eq!(got.len(), 7);
        assert_eq!(got[0], FigureId::Fig4);
    }

    #[test]
    fn tau_preset_overrides_config() {
        let (_, ctx) = context(&["--tau-preset", "fig3", "threshold"]);
        assert_eq!(ctx.base.signal().tau(), 0.28e-3);
    }

    #[test]
    fn redirect_keeps_file_names() {
        let (mut cli, _) = context(&["spectrum", "--case", "baseline", "--out", "a/b/s.csv"]);
        redirect(&mut cli.command, Path::new("r")).unwrap();
        let Command::Spectrum(a) = cli.command else { panic!() };
        assert_eq!(a.out, Some(PathBuf::from("r/s.csv")));
    }
}
