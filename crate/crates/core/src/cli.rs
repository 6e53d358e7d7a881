//! The `per1lab` command line.
//!
//! Settings are resolved as flags over config file over defaults. The
//! config file holds `key=value` lines and is named by `--config` or by the
//! `PER1LAB_CONFIG` environment variable. Every command echoes its effective
//! settings in `#`-prefixed header lines.
//!
//! Exit codes: 0 success or PASS, 1 verification FAIL, 2 invalid input or
//! usage, 3 numerical failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use crate::dynamics::{
    residue_index, residue_index_contour, resit, Per1Param, CONTOUR_NODES, CONTOUR_RADIUS,
    DEFAULT_ESCAPE_RADIUS, DEFAULT_MAX_ITER,
};
use crate::error::{Error, Result};
use crate::fatou::{
    critical_ecalle_height, find_parameter_for_height, horn_multiplier, horn_offset_diagnostic,
};
use crate::perturbation::verify::{
    self, lemma41, lemma42, round_cylinder, verify_disk, verify_theorem_disk, CYLINDER_BUDGET,
    DEFAULT_EPSILON, LEMMA41_DELTAS, LEMMA41_HEIGHTS, LEMMA42_FAN, LEMMA42_HEIGHT,
    LEMMA42_MODULUS, LEMMA42_WIDE,
};
use crate::perturbation::{
    classify_perturbation, perturb, return_multiplier_modulus, split_fixed_points, Budget,
    PhaseEstimator,
};
use crate::scan::output::{delta_csv, delta_rgb, fmt_float, ppm, slice_csv, slice_rgb, write_all};
use crate::scan::{scan_delta_disk, scan_slice_a, PhasePolicy, ScanOptions};

pub const CONFIG_ENV: &str = "PER1LAB_CONFIG";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

pub const DEFAULT_TOL: f64 = 1e-6;
pub const TOL_RANGE: (f64, f64) = (1e-12, 1e-3);
/// Open interval for epsilon.
pub const EPSILON_RANGE: (f64, f64) = (0.0, 0.01);

#[derive(Parser, Debug)]
#[command(name = "per1lab", version, about = "Parabolic cubics f_a(z) = z + a z^2 + z^3 and their perturbations")]
struct Cli {
    #[command(flatten)]
    global: GlobalFlags,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default, Clone)]
struct GlobalFlags {
    /// Margin epsilon of the theorem interval, in (0, 0.01)
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    /// Numerical tolerance, in [1e-12, 1e-3]
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Escape radius for orbit classification
    #[arg(long, global = true)]
    escape_radius: Option<f64>,
    /// Iteration budget for orbit classification
    #[arg(long, global = true)]
    max_iter: Option<u64>,
    /// Directory for written files
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// Worker cap for scans
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// key=value config file (overrides PER1LAB_CONFIG)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Critical Ecalle height of f_a
    Height {
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
    },
    /// Parameter a(t) with critical Ecalle height t
    FindA {
        #[arg(long, allow_hyphen_values = true)]
        height: f64,
    },
    /// Residue index and resit of the parabolic point
    Residue {
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
    },
    /// Horn-map multiplier and the measured horn offset
    Horn {
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
    },
    /// Lifted-phase estimate for f_a + delta
    Phase(PerturbArgs),
    /// Classification of f_a + delta
    Classify(PerturbArgs),
    /// Classify a grid of perturbations and write CSV and PPM
    ScanDelta {
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long)]
        radius: f64,
        #[arg(long)]
        n: usize,
        /// Output path; `.csv` and `.ppm` are written next to each other
        #[arg(long)]
        out: PathBuf,
        /// Also estimate the lifted phase of non-escaping cells
        #[arg(long)]
        phase: bool,
    },
    /// Classify critical orbits over complex a and write CSV and PPM
    ScanSlice {
        #[arg(long, allow_hyphen_values = true)]
        re_min: f64,
        #[arg(long, allow_hyphen_values = true)]
        re_max: f64,
        #[arg(long, allow_hyphen_values = true)]
        im_min: f64,
        #[arg(long, allow_hyphen_values = true)]
        im_max: f64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Verification procedures
    #[command(subcommand)]
    Verify(VerifyCommand),
}

#[derive(Args, Debug)]
struct PerturbArgs {
    #[arg(long, allow_hyphen_values = true)]
    a: f64,
    #[arg(long, allow_hyphen_values = true)]
    delta_re: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    delta_im: f64,
}

#[derive(Subcommand, Debug)]
enum VerifyCommand {
    /// Real perturbations at a(t) lie in the shift locus with repelling split points
    Lemma41 {
        /// Heights t (repeatable)
        #[arg(long = "t", num_args = 1..)]
        t: Vec<f64>,
    },
    /// Phase estimates against split multipliers over a fan of arguments
    Lemma42 {
        #[arg(long = "t", default_value_t = LEMMA42_HEIGHT)]
        t: f64,
        #[arg(long, default_value_t = LEMMA42_MODULUS)]
        modulus: f64,
        #[arg(long, default_value_t = LEMMA42_FAN)]
        fan: usize,
        #[arg(long, default_value_t = LEMMA42_WIDE)]
        wide: usize,
    },
    /// Round-cylinder containment in the parabolic basin
    Cylinder {
        #[arg(long = "t", default_value_t = 2.0)]
        t: f64,
    },
    /// No Misiurewicz-like perturbations in a disk around a(t), or around a
    Theorem {
        #[arg(long = "t", conflicts_with = "a")]
        t: Option<f64>,
        /// Contrast run at a fixed parameter, without the interval check
        #[arg(long)]
        a: Option<f64>,
        #[arg(long, default_value_t = 1e-4)]
        radius: f64,
        #[arg(long, default_value_t = 64)]
        n: usize,
    },
}

/// Effective settings after merging flags, config file and defaults.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub epsilon: f64,
    pub tol: f64,
    pub escape_radius: f64,
    pub max_iter: u64,
    pub output_dir: PathBuf,
    pub jobs: Option<usize>,
    pub config_path: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            epsilon: DEFAULT_EPSILON,
            tol: DEFAULT_TOL,
            escape_radius: DEFAULT_ESCAPE_RADIUS,
            max_iter: DEFAULT_MAX_ITER,
            output_dir: PathBuf::from("."),
            jobs: None,
            config_path: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let (e_lo, e_hi) = EPSILON_RANGE;
        if !(self.epsilon > e_lo && self.epsilon < e_hi) {
            return Err(Error::InvalidParameter(format!(
                "epsilon = {} must lie in ({e_lo}, {e_hi})",
                self.epsilon
            )));
        }
        let (t_lo, t_hi) = TOL_RANGE;
        if !(self.tol >= t_lo && self.tol <= t_hi) {
            return Err(Error::InvalidParameter(format!(
                "tol = {} must lie in [{t_lo:e}, {t_hi:e}]",
                self.tol
            )));
        }
        if !(self.escape_radius > 0.0 && self.escape_radius.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "escape radius {} must be positive",
                self.escape_radius
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be positive".into()));
        }
        if self.jobs == Some(0) {
            return Err(Error::InvalidParameter("jobs must be positive".into()));
        }
        Ok(())
    }

    pub fn budget(&self) -> Budget {
        Budget {
            escape_radius: self.escape_radius,
            max_iter: self.max_iter,
        }
    }

    pub fn scan_options(&self) -> ScanOptions {
        ScanOptions {
            budget: self.budget(),
            jobs: self.jobs,
            phase: PhasePolicy::Never,
            tol: self.tol,
        }
    }

    /// `#`-prefixed header lines echoing every setting.
    pub fn header(&self, command: &str) -> String {
        format!(
            "# per1lab {command}\n# epsilon={} tol={} escape_radius={} max_iter={} output_dir={} jobs={} config={}\n",
            fmt_float(self.epsilon),
            fmt_float(self.tol),
            fmt_float(self.escape_radius),
            self.max_iter,
            self.output_dir.display(),
            self.jobs.map(|j| j.to_string()).unwrap_or_else(|| "auto".into()),
            self.config_path
                .as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_else(|| "none".into()),
        )
    }

    fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.output_dir.join(path)
        }
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("config: bad value {value:?} for {key}")))
}

/// Applies `key=value` lines to `cfg`. Blank lines and `#` comments are
/// skipped; `-` and `_` are interchangeable in keys.
pub fn apply_config_text(cfg: &mut RunConfig, text: &str) -> Result<()> {
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::InvalidParameter(format!(
                "config line {}: expected key=value",
                lineno + 1
            )));
        };
        let key = key.trim().replace('-', "_");
        let value = value.trim();
        match key.as_str() {
            "epsilon" => cfg.epsilon = parse_value(&key, value)?,
            "tol" => cfg.tol = parse_value(&key, value)?,
            "escape_radius" => cfg.escape_radius = parse_value(&key, value)?,
            "max_iter" => cfg.max_iter = parse_value(&key, value)?,
            "output_dir" => cfg.output_dir = PathBuf::from(value),
            "jobs" => cfg.jobs = Some(parse_value(&key, value)?),
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "config line {}: unknown key {key:?}",
                    lineno + 1
                )))
            }
        }
    }
    Ok(())
}

fn effective_config(flags: &GlobalFlags, env_path: Option<PathBuf>) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(path) = flags.config.clone().or(env_path) {
        let text = std::fs::read_to_string(&path).map_err(|e| {
            Error::InvalidParameter(format!("cannot read config {}: {e}", path.display()))
        })?;
        apply_config_text(&mut cfg, &text)?;
        cfg.config_path = Some(path);
    }
    if let Some(v) = flags.epsilon {
        cfg.epsilon = v;
    }
    if let Some(v) = flags.tol {
        cfg.tol = v;
    }
    if let Some(v) = flags.escape_radius {
        cfg.escape_radius = v;
    }
    if let Some(v) = flags.max_iter {
        cfg.max_iter = v;
    }
    if let Some(v) = flags.output_dir.clone() {
        cfg.output_dir = v;
    }
    if flags.jobs.is_some() {
        cfg.jobs = flags.jobs;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Exit code for an error.
pub fn exit_code(err: &Error) -> i32 {
    if err.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_INVALID
    }
}

/// Runs the command line with the process streams and environment.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let env_path = std::env::var_os(CONFIG_ENV).map(PathBuf::from);
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, env_path, &mut stdout.lock(), &mut stderr.lock())
}

/// [`run`] with explicit config-path environment value and output streams.
pub fn run_with<I, T>(
    argv: I,
    env_config: Option<PathBuf>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return if code == 0 { EXIT_OK } else { EXIT_INVALID };
        }
    };
    let cfg = match effective_config(&cli.global, env_config) {
        Ok(cfg) => cfg,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit_code(&e);
        }
    };
    match execute(&cli.command, &cfg) {
        Ok((text, passed)) => {
            let _ = out.write_all(text.as_bytes());
            if passed {
                EXIT_OK
            } else {
                EXIT_FAIL
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Height { .. } => "height",
        Command::FindA { .. } => "find-a",
        Command::Residue { .. } => "residue",
        Command::Horn { .. } => "horn",
        Command::Phase(_) => "phase",
        Command::Classify(_) => "classify",
        Command::ScanDelta { .. } => "scan-delta",
        Command::ScanSlice { .. } => "scan-slice",
        Command::Verify(v) => match v {
            VerifyCommand::Lemma41 { .. } => "verify lemma41",
            VerifyCommand::Lemma42 { .. } => "verify lemma42",
            VerifyCommand::Cylinder { .. } => "verify cylinder",
            VerifyCommand::Theorem { .. } => "verify theorem",
        },
    }
}

fn cplx(z: Complex64) -> String {
    format!("{} {}", fmt_float(z.re), fmt_float(z.im))
}

fn stem_paths(cfg: &RunConfig, out: &Path) -> (PathBuf, PathBuf) {
    let path = cfg.resolve(out);
    let has_known_ext = matches!(
        path.extension().and_then(|e| e.to_str()),
        Some("csv") | Some("ppm")
    );
    let stem = if has_known_ext {
        path.with_extension("")
    } else {
        path
    };
    let with = |ext: &str| {
        let mut s = stem.clone().into_os_string();
        s.push(ext);
        PathBuf::from(s)
    };
    (with(".csv"), with(".ppm"))
}

fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    Ok(())
}

fn write_report(cfg: &RunConfig, name: &str, text: &str) -> Result<PathBuf> {
    let path = cfg.resolve(Path::new(&format!("{name}_report.txt")));
    ensure_parent(&path)?;
    write_all(&path, text.as_bytes())?;
    Ok(path)
}

/// Runs one command; returns its output and whether it passed.
fn execute(cmd: &Command, cfg: &RunConfig) -> Result<(String, bool)> {
    let mut s = cfg.header(command_name(cmd));
    let mut passed = true;
    match cmd {
        Command::Height { a } => {
            let h = critical_ecalle_height(Per1Param::in_interval(*a)?, cfg.tol)?;
            let _ = writeln!(s, "a={}", fmt_float(*a));
            let _ = writeln!(s, "h={}", fmt_float(h.h));
            let _ = writeln!(s, "psi_att_plus={}", cplx(h.psi_plus));
            let _ = writeln!(s, "psi_att_minus={}", cplx(h.psi_minus));
            let _ = writeln!(s, "real_mismatch={}", fmt_float(h.real_mismatch()));
        }
        Command::FindA { height } => {
            let a = find_parameter_for_height(*height, cfg.tol)?;
            let h = critical_ecalle_height(a, cfg.tol)?;
            let _ = writeln!(s, "t={}", fmt_float(*height));
            let _ = writeln!(s, "a={}", fmt_float(a.value()));
            let _ = writeln!(s, "h={}", fmt_float(h.h));
        }
        Command::Residue { a } => {
            let p = Per1Param::new(*a)?;
            let iota = residue_index(p)?;
            let contour = residue_index_contour(p, CONTOUR_RADIUS, CONTOUR_NODES)?;
            let _ = writeln!(s, "a={}", fmt_float(*a));
            let _ = writeln!(s, "iota={}", fmt_float(iota));
            let _ = writeln!(s, "resit={}", fmt_float(resit(p)?));
            let _ = writeln!(s, "iota_contour={}", cplx(contour));
        }
        Command::Horn { a } => {
            let p = Per1Param::in_interval(*a)?;
            let _ = writeln!(s, "a={}", fmt_float(*a));
            let _ = writeln!(s, "resit={}", fmt_float(resit(p)?));
            let _ = writeln!(s, "horn_multiplier={}", fmt_float(horn_multiplier(p)?));
            for o in horn_offset_diagnostic(p, &[40.0, -40.0], cfg.tol)? {
                let _ = writeln!(
                    s,
                    "offset height={} measured={} expected={} drift={}",
                    fmt_float(o.height),
                    fmt_float(o.measured),
                    fmt_float(o.expected),
                    fmt_float(o.drift())
                );
            }
        }
        Command::Phase(args) => {
            let a = Per1Param::in_interval(args.a)?;
            let delta = Complex64::new(args.delta_re, args.delta_im);
            perturb(a, delta)?;
            let est = PhaseEstimator::new(a)?.estimate(delta, cfg.tol)?;
            let _ = writeln!(s, "a={}", fmt_float(args.a));
            let _ = writeln!(s, "delta={}", cplx(delta));
            let _ = writeln!(s, "im_sigma={}", fmt_float(est.im_sigma));
            let _ = writeln!(s, "stability={}", fmt_float(est.stability));
            let _ = writeln!(s, "reliable={}", est.is_reliable());
            let _ = writeln!(s, "transit_length={}", est.transit_length);
            let _ = writeln!(
                s,
                "return_multiplier_modulus={}",
                fmt_float(return_multiplier_modulus(a, est.im_sigma)?)
            );
            for p in &est.samples {
                let _ = writeln!(
                    s,
                    "sample index={} z={} psi_rep={}",
                    p.index,
                    cplx(p.point),
                    cplx(p.coordinate)
                );
            }
        }
        Command::Classify(args) => {
            let a = Per1Param::new(args.a)?;
            let map = perturb(a, Complex64::new(args.delta_re, args.delta_im))?;
            let out = classify_perturbation(&map, cfg.budget());
            let _ = writeln!(s, "a={}", fmt_float(args.a));
            let _ = writeln!(s, "delta={}", cplx(map.delta));
            let _ = writeln!(s, "verdict={}", out.verdict);
            let _ = writeln!(s, "misiurewicz_like={}", out.misiurewicz_like);
            let iter = |x: Option<u64>| x.map(|n| n.to_string()).unwrap_or_else(|| "-".into());
            let _ = writeln!(s, "escape_iter_plus={}", iter(out.critical_plus.escape_iterate));
            let _ = writeln!(s, "escape_iter_minus={}", iter(out.critical_minus.escape_iterate));
            for p in &out.fixed_points {
                let _ = writeln!(
                    s,
                    "fixed_point z={} lambda={} |lambda|={} multiplicity={}",
                    cplx(p.location),
                    cplx(p.multiplier),
                    fmt_float(p.modulus()),
                    p.multiplicity
                );
            }
            if map.delta.norm_sqr() > 0.0 {
                if let Ok((p, q)) = split_fixed_points(&map) {
                    let idx = |x: Option<Complex64>| x.map(cplx).unwrap_or_else(|| "-".into());
                    let _ = writeln!(s, "index_plus={}", idx(p.index));
                    let _ = writeln!(s, "index_minus={}", idx(q.index));
                }
            }
        }
        Command::ScanDelta {
            a,
            radius,
            n,
            out,
            phase,
        } => {
            let a = Per1Param::new(*a)?;
            let mut opts = cfg.scan_options();
            if *phase {
                a.require_interval()?;
                opts.phase = PhasePolicy::NonEscaping;
            }
            let grid = scan_delta_disk(a, *radius, *n, &opts)?;
            let (csv_path, ppm_path) = stem_paths(cfg, out);
            ensure_parent(&csv_path)?;
            write_all(&csv_path, delta_csv(&grid).as_bytes())?;
            write_all(&ppm_path, &ppm(&grid, delta_rgb))?;
            let mut counts = std::collections::BTreeMap::new();
            for c in &grid.cells {
                let key = crate::scan::output::delta_label(c);
                *counts.entry(key).or_insert(0usize) += 1;
            }
            let _ = writeln!(s, "a={} radius={} n={n}", fmt_float(a.value()), fmt_float(*radius));
            for (k, v) in counts {
                let _ = writeln!(s, "{k}={v}");
            }
            let _ = writeln!(s, "csv={}", csv_path.display());
            let _ = writeln!(s, "ppm={}", ppm_path.display());
        }
        Command::ScanSlice {
            re_min,
            re_max,
            im_min,
            im_max,
            n,
            out,
        } => {
            let grid = scan_slice_a((*re_min, *re_max), (*im_min, *im_max), *n, &cfg.scan_options())?;
            let (csv_path, ppm_path) = stem_paths(cfg, out);
            ensure_parent(&csv_path)?;
            write_all(&csv_path, slice_csv(&grid).as_bytes())?;
            write_all(&ppm_path, &ppm(&grid, slice_rgb))?;
            let mut counts = std::collections::BTreeMap::new();
            for c in &grid.cells {
                *counts.entry(c.verdict.as_str()).or_insert(0usize) += 1;
            }
            let _ = writeln!(s, "n={n}");
            for (k, v) in counts {
                let _ = writeln!(s, "{k}={v}");
            }
            let _ = writeln!(s, "csv={}", csv_path.display());
            let _ = writeln!(s, "ppm={}", ppm_path.display());
        }
        Command::Verify(v) => {
            let (name, report, ok) = run_verify(v, cfg)?;
            passed = ok;
            s.push_str(&report);
            let path = write_report(cfg, name, &report)?;
            let _ = writeln!(s, "report={}", path.display());
        }
    }
    Ok((s, passed))
}

fn run_verify(v: &VerifyCommand, cfg: &RunConfig) -> Result<(&'static str, String, bool)> {
    Ok(match v {
        VerifyCommand::Lemma41 { t } => {
            let heights = if t.is_empty() { LEMMA41_HEIGHTS.to_vec() } else { t.clone() };
            let r = lemma41(&heights, &LEMMA41_DELTAS, cfg.budget(), cfg.tol)?;
            ("lemma41", r.to_string(), r.passed())
        }
        VerifyCommand::Lemma42 {
            t,
            modulus,
            fan,
            wide,
        } => {
            let a = find_parameter_for_height(*t, cfg.tol)?;
            let r = lemma42(a, *modulus, *fan, *wide, &LEMMA41_DELTAS, cfg.budget(), cfg.tol)?;
            ("lemma42", r.to_string(), r.passed())
        }
        VerifyCommand::Cylinder { t } => {
            let a = find_parameter_for_height(*t, cfg.tol)?;
            let r = round_cylinder(a, CYLINDER_BUDGET)?;
            ("cylinder", r.to_string(), r.passed())
        }
        VerifyCommand::Theorem { t, a, radius, n } => {
            let opts = cfg.scan_options();
            let r = match (t, a) {
                (_, Some(a)) => verify_disk(Per1Param::new(*a)?, *radius, *n, None, &opts)?,
                (t, None) => {
                    verify_theorem_disk(t.unwrap_or(2.0), *radius, *n, cfg.epsilon, &opts)?
                }
            };
            let mut text = r.to_string();
            let (lo, hi) = verify::theorem_interval(cfg.epsilon);
            let _ = writeln!(
                text,
                "# m={} interval=({}, {})",
                fmt_float(verify::m_constant()),
                fmt_float(lo),
                fmt_float(hi)
            );
            ("theorem", text, r.passed())
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str], env: Option<PathBuf>) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut argv = vec!["per1lab"];
        argv.extend_from_slice(args);
        let code = run_with(argv, env, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn residue_at_one() {
        let (code, out, _) = run_capture(&["residue", "--a", "1.0"], None);
        assert_eq!(code, 0);
        assert!(out.contains("iota=1.0000000000000000e0"), "{out}");
        assert!(out.contains("resit=0.0000000000000000e0"), "{out}");
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run_capture(&["bogus"], None).0, 2);
        assert_eq!(run_capture(&["residue", "--a", "1", "--nope"], None).0, 2);
        assert_eq!(run_capture(&["residue", "--a", "1", "--epsilon", "0.02"], None).0, 2);
        assert_eq!(run_capture(&["residue", "--a", "1", "--tol", "1e-2"], None).0, 2);
        assert_eq!(run_capture(&["height", "--a", "2.0"], None).0, 2);
        assert_eq!(run_capture(&["--help"], None).0, 0);
    }

    #[test]
    fn config_precedence() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.txt");
        std::fs::write(&path, "# comment\nepsilon=0.004\ntol = 1e-7\nmax-iter=500\n").unwrap();
        let (code, out, _) = run_capture(&["residue", "--a", "1.2", "--tol", "1e-8"], Some(path.clone()));
        assert_eq!(code, 0);
        assert!(out.contains("epsilon=4.0000000000000001e-3"), "{out}");
        assert!(out.contains("tol=1.0000000000000000e-8"), "{out}");
        assert!(out.contains("max_iter=500"), "{out}");
        std::fs::write(&path, "colour=blue\n").unwrap();
        assert_eq!(run_capture(&["residue", "--a", "1.2"], Some(path)).0, 2);
    }

    #[test]
    fn numerical_failures_exit_3() {
        // the base orbit of a wide-angle perturbation is captured
        let (code, _, err) = run_capture(
            &["phase", "--a", "1.3", "--delta-re", "0", "--delta-im", "1e-5"],
            None,
        );
        assert_eq!(code, 3, "{err}");
    }

    #[test]
    fn theorem_below_interval_is_invalid() {
        let dir = tempfile::tempdir().unwrap();
        let od = dir.path().to_str().unwrap();
        let (code, _, _) = run_capture(&["verify", "theorem", "--t", "1.0", "--output-dir", od], None);
        assert_eq!(code, 2);
    }
}
