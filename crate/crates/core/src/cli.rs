//! The `qillum` command-line tool.
//!
//! Exit codes: 0 success, 1 usage error, 2 validation or oracle failure.
//! Parameters come from (highest priority first) flags, the `--config` JSON
//! file, the `--preset`, and built-in defaults.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::discrimination::{
    asymptotic_exponents, check_symmetric_optimum, chernoff_upper, exact_exponents,
};
use crate::error::Error;
use crate::exec::Exec;
use crate::fock::{run_oracle_grid, OracleGrid, Party};
use crate::montecarlo::{simulate_homodyne, simulate_opa, McConfig, Sampler};
use crate::protocol::{alice_conditional_cov, eve_conditional_cov, Bit, ProtocolParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAILURE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "qillum", version, about = "Error-probability bounds for quantum-illumination secure communication")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exponents and bounds at one parameter point (JSON).
    Point(PointArgs),
    /// Bounds versus M (CSV).
    Sweep(SweepArgs),
    /// Monte-Carlo run of the homodyne or OPA receiver (JSON).
    Mc(McArgs),
    /// Derive κ, M and rate from fiber and timing figures, then report bounds (JSON).
    LinkBudget(LinkArgs),
    /// Compare the Gaussian overlap formula with the Fock-space oracle.
    OracleCheck(OracleArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub ns: Option<f64>,
    #[arg(long)]
    pub nb: Option<f64>,
    #[arg(long)]
    pub m: Option<u64>,
    /// figure1, figure2 (both regimes), figure2-no-noise, figure2-high-brightness
    #[arg(long)]
    pub preset: Option<String>,
    /// JSON file with parameter values; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write output here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PointArgs {
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Log,
    Linear,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub m_min: Option<u64>,
    #[arg(long)]
    pub m_max: Option<u64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long, value_enum)]
    pub scale: Option<Scale>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum McReceiver {
    Homodyne,
    Opa,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SamplerArg {
    Exact,
    PerMode,
}

#[derive(Debug, Args)]
pub struct McArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum)]
    pub receiver: Option<McReceiver>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub sampler: Option<SamplerArg>,
    /// Run trials on the calling thread only.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Args)]
pub struct LinkArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Phase-matching bandwidth W in Hz.
    #[arg(long)]
    pub bandwidth: Option<f64>,
    /// Bit duration T in seconds.
    #[arg(long)]
    pub bit_duration: Option<f64>,
    #[arg(long)]
    pub fiber_km: Option<f64>,
    #[arg(long)]
    pub loss_db_per_km: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PartyArg {
    Alice,
    Eve,
    Both,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Fixed Fock cutoff for every point (chosen per point otherwise).
    #[arg(long)]
    pub cutoff: Option<usize>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long, value_enum)]
    pub party: Option<PartyArg>,
}

/// Contents of a `--config` file. Every field is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub kappa: Option<f64>,
    pub ns: Option<f64>,
    pub nb: Option<f64>,
    pub m: Option<u64>,
    pub preset: Option<String>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub receiver: Option<McReceiver>,
    pub sampler: Option<Sampler>,
    pub m_min: Option<u64>,
    pub m_max: Option<u64>,
    pub points: Option<usize>,
    pub scale: Option<Scale>,
    pub bandwidth: Option<f64>,
    pub bit_duration: Option<f64>,
    pub fiber_km: Option<f64>,
    pub loss_db_per_km: Option<f64>,
    pub cutoff: Option<usize>,
    pub tolerance: Option<f64>,
    pub grid: Option<GridConfig>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub ns: Option<Vec<f64>>,
    pub kappa: Option<Vec<f64>>,
    pub nb: Option<Vec<f64>>,
    pub s: Option<Vec<f64>>,
}

/// A named parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Preset {
    pub name: &'static str,
    pub kappa: f64,
    pub ns: f64,
    pub nb: f64,
    pub m: u64,
}

pub const FIGURE1: Preset = Preset {
    name: "figure1",
    kappa: 0.1,
    ns: 0.004,
    nb: 100.0,
    m: 2_000_000,
};
pub const FIGURE2_NO_NOISE: Preset = Preset {
    name: "figure2-no-noise",
    kappa: 0.1,
    ns: 0.004,
    nb: 0.0,
    m: 2_000_000,
};
pub const FIGURE2_HIGH_BRIGHTNESS: Preset = Preset {
    name: "figure2-high-brightness",
    kappa: 0.1,
    ns: 10.0,
    nb: 100.0,
    m: 2_000_000,
};

/// Resolves a preset name; `figure2` names both of its regimes.
pub fn lookup_preset(name: &str) -> Option<Vec<Preset>> {
    match name {
        "figure1" => Some(vec![FIGURE1]),
        "figure2" => Some(vec![FIGURE2_NO_NOISE, FIGURE2_HIGH_BRIGHTNESS]),
        "figure2-no-noise" => Some(vec![FIGURE2_NO_NOISE]),
        "figure2-high-brightness" => Some(vec![FIGURE2_HIGH_BRIGHTNESS]),
        _ => None,
    }
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Failure(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Failure(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

fn load_config(path: &Option<PathBuf>) -> CliResult<FileConfig> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
}

/// Flags, file and preset merged into parameter sets (one per preset regime).
struct Resolved {
    file: FileConfig,
    sets: Vec<(Option<&'static str>, ProtocolParams)>,
}

fn resolve(common: &CommonArgs, need_m: bool) -> CliResult<Resolved> {
    let file = load_config(&common.config)?;
    let preset_name = common.preset.clone().or_else(|| file.preset.clone());
    let presets = match &preset_name {
        None => vec![None],
        Some(name) => lookup_preset(name)
            .ok_or_else(|| CliError::Usage(format!("unknown preset '{name}'")))?
            .into_iter()
            .map(Some)
            .collect(),
    };
    let mut sets = Vec::new();
    for preset in presets {
        let pick = |flag: Option<f64>, from_file: Option<f64>, from_preset: Option<f64>, name: &str| {
            flag.or(from_file)
                .or(from_preset)
                .ok_or_else(|| CliError::Usage(format!("missing --{name} (or use --preset/--config)")))
        };
        let kappa = pick(common.kappa, file.kappa, preset.map(|p| p.kappa), "kappa")?;
        let ns = pick(common.ns, file.ns, preset.map(|p| p.ns), "ns")?;
        let nb = pick(common.nb, file.nb, preset.map(|p| p.nb), "nb")?;
        let m = match common.m.or(file.m).or(preset.map(|p| p.m)) {
            Some(m) => m,
            None if need_m => return usage("missing --m (or use --preset/--config)"),
            None => 1,
        };
        let params = ProtocolParams::new(kappa, ns, nb, m)?;
        sets.push((preset.map(|p| p.name), params));
    }
    Ok(Resolved { file, sets })
}

fn single(resolved: &Resolved, what: &str) -> CliResult<ProtocolParams> {
    match resolved.sets.as_slice() {
        [(_, p)] => Ok(*p),
        _ => usage(format!(
            "{what} needs a single parameter set; use figure2-no-noise or figure2-high-brightness"
        )),
    }
}

fn emit(out_path: &Option<PathBuf>, stdout: &mut dyn Write, text: &str) -> CliResult<()> {
    match out_path {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Failure(format!("cannot write {}: {e}", path.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Failure(format!("cannot write output: {e}"))),
    }
}

fn to_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// JSON report of all exponents and bounds at one point.
pub fn point_report(p: &ProtocolParams) -> crate::Result<Value> {
    let exps = exact_exponents(p)?;
    let bounds = exps.bounds(p.m);
    let asym = if p.nb > 0.0 {
        serde_json::to_value(asymptotic_exponents(p)?).ok()
    } else {
        None
    };
    let chernoff = |c0, c1| -> crate::Result<Value> {
        let check = check_symmetric_optimum(&c0, &c1)?;
        Ok(json!({
            "s_star": check.s_star,
            "max_exponent": check.max_exponent,
            "exponent_half": check.exponent_half,
        }))
    };
    Ok(json!({
        "params": p,
        "symbols": p.symbols(),
        "exponents": exps,
        "bounds": bounds,
        "asymptotic": asym,
        "chernoff_optimum": {
            "alice": chernoff(alice_conditional_cov(p, Bit::Zero)?, alice_conditional_cov(p, Bit::One)?)?,
            "eve": chernoff(eve_conditional_cov(p, Bit::Zero)?, eve_conditional_cov(p, Bit::One)?)?,
        },
    }))
}

fn cmd_point(args: &PointArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let resolved = resolve(&args.common, true)?;
    let mut reports = Vec::new();
    for (name, p) in &resolved.sets {
        let mut r = point_report(p)?;
        if let Some(name) = name {
            r["preset"] = json!(name);
        }
        reports.push(r);
    }
    let v = if reports.len() == 1 {
        reports.pop().unwrap()
    } else {
        Value::Array(reports)
    };
    emit(&args.common.out, stdout, &to_json(&v))
}

/// One CSV row of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub m: u64,
    pub alice_opt_upper: f64,
    pub alice_opt_lower: f64,
    pub eve_upper: f64,
    pub eve_lower: f64,
    pub homodyne_upper: f64,
    /// Absent when N_B = 0.
    pub opa_upper: Option<f64>,
}

pub const SWEEP_HEADER: &str =
    "M,alice_opt_upper,alice_opt_lower,eve_upper,eve_lower,homodyne_upper,opa_upper";

impl SweepRow {
    pub fn to_csv(&self) -> String {
        let f = |x: f64| format!("{x:.10e}");
        format!(
            "{},{},{},{},{},{},{}",
            self.m,
            f(self.alice_opt_upper),
            f(self.alice_opt_lower),
            f(self.eve_upper),
            f(self.eve_lower),
            f(self.homodyne_upper),
            self.opa_upper.map(f).unwrap_or_default()
        )
    }
}

/// M values from `lo` to `hi`, strictly increasing after rounding.
pub fn m_grid(lo: u64, hi: u64, points: usize, scale: Scale) -> crate::Result<Vec<u64>> {
    if lo == 0 || lo >= hi {
        return Err(Error::invalid(format!("need 1 <= m_min < m_max, got {lo} and {hi}")));
    }
    if points < 2 {
        return Err(Error::invalid("a sweep needs at least two points"));
    }
    let (a, b) = (lo as f64, hi as f64);
    let mut ms: Vec<u64> = (0..points)
        .map(|i| {
            let t = i as f64 / (points - 1) as f64;
            let v = match scale {
                Scale::Log => (a.ln() + t * (b.ln() - a.ln())).exp(),
                Scale::Linear => a + t * (b - a),
            };
            (v.round() as u64).clamp(lo, hi)
        })
        .collect();
    ms.dedup();
    Ok(ms)
}

pub fn sweep_rows(p: &ProtocolParams, ms: &[u64], exec: Exec) -> crate::Result<Vec<SweepRow>> {
    let exps = exact_exponents(p)?;
    Ok(exec.map_slice(ms, |&m| {
        let b = exps.bounds(m);
        SweepRow {
            m,
            alice_opt_upper: b.alice_opt.upper,
            alice_opt_lower: b.alice_opt.lower,
            eve_upper: b.eve_opt.upper,
            eve_lower: b.eve_opt.lower,
            homodyne_upper: b.homodyne.upper,
            opa_upper: b.opa.map(|o| o.upper),
        }
    }))
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from(SWEEP_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&r.to_csv());
        s.push('\n');
    }
    s
}

fn suffixed(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("sweep");
    let name = match path.extension().and_then(|e| e.to_str()) {
        Some(ext) => format!("{stem}-{suffix}.{ext}"),
        None => format!("{stem}-{suffix}"),
    };
    path.with_file_name(name)
}

fn cmd_sweep(args: &SweepArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let resolved = resolve(&args.common, false)?;
    let f = &resolved.file;
    let lo = args.m_min.or(f.m_min).unwrap_or(1_000);
    let hi = args.m_max.or(f.m_max).unwrap_or(10_000_000);
    let points = args.points.or(f.points).unwrap_or(41);
    let scale = args.scale.or(f.scale).unwrap_or(Scale::Log);
    let ms = m_grid(lo, hi, points, scale)?;
    let many = resolved.sets.len() > 1;
    let mut tables = Vec::new();
    for (name, p) in &resolved.sets {
        let csv = sweep_csv(&sweep_rows(p, &ms, Exec::default())?);
        match (&args.common.out, many) {
            (Some(path), true) => {
                let suffix = name.unwrap_or("set").trim_start_matches("figure2-");
                emit(&Some(suffixed(path, suffix)), stdout, &csv)?;
            }
            _ => tables.push(csv),
        }
    }
    if !tables.is_empty() {
        emit(&args.common.out, stdout, &tables.join("\n"))?;
    }
    Ok(())
}

fn cmd_mc(args: &McArgs, stdout: &mut dyn Write) -> CliResult<i32> {
    let resolved = resolve(&args.common, true)?;
    let p = single(&resolved, "mc")?;
    let f = &resolved.file;
    let receiver = args.receiver.or(f.receiver).unwrap_or(McReceiver::Homodyne);
    let trials = args.trials.or(f.trials).unwrap_or(10_000);
    let seed = args.seed.or(f.seed).unwrap_or(0);
    let sampler = match args.sampler {
        Some(SamplerArg::Exact) => Sampler::Exact,
        Some(SamplerArg::PerMode) => Sampler::PerMode,
        None => f.sampler.unwrap_or_default(),
    };
    let exec = if args.sequential { Exec::Sequential } else { Exec::default() };
    let cfg = McConfig::new(p, trials, seed)?.with_sampler(sampler);
    let exps = exact_exponents(&p)?;
    let (result, exponent, asym) = match receiver {
        McReceiver::Homodyne => (
            simulate_homodyne(&cfg, exec)?,
            exps.homodyne,
            (p.nb > 0.0).then(|| p.kappa * p.ns / p.nb),
        ),
        McReceiver::Opa => (
            simulate_opa(&cfg, exec)?,
            exps.opa.ok_or_else(|| Error::invalid("OPA receiver requires N_B > 0"))?,
            Some(2.0 * p.kappa * p.ns / p.nb),
        ),
    };
    let bound = chernoff_upper(exponent, p.m);
    let dominated = result.within_bound(bound);
    let v = json!({
        "params": p,
        "receiver": receiver,
        "sampler": sampler,
        "seed": seed,
        "result": result,
        "sigma": result.sigma(),
        "exponent": exponent,
        "upper_bound": bound,
        "asymptotic_exponent": asym,
        "asymptotic_upper_bound": asym.map(|e| chernoff_upper(e, p.m)),
        "bound_dominates": dominated,
    });
    emit(&args.common.out, stdout, &to_json(&v))?;
    Ok(if dominated { EXIT_OK } else { EXIT_FAILURE })
}

/// Fiber link and timing figures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinkBudget {
    /// Phase-matching bandwidth W (Hz).
    pub bandwidth: f64,
    /// Bit duration T (s).
    pub bit_duration: f64,
    pub fiber_km: f64,
    pub loss_db_per_km: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinkDerived {
    pub kappa: f64,
    pub m: u64,
    pub rate_bps: f64,
}

impl LinkBudget {
    pub fn derive(&self) -> crate::Result<LinkDerived> {
        for (name, v) in [("bandwidth", self.bandwidth), ("bit duration", self.bit_duration)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        for (name, v) in [("fiber length", self.fiber_km), ("fiber loss", self.loss_db_per_km)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} must be >= 0, got {v}")));
            }
        }
        let m = (self.bandwidth * self.bit_duration).round();
        if m < 1.0 || m > u64::MAX as f64 {
            return Err(Error::invalid(format!("W*T must round to at least 1 mode, got {m}")));
        }
        Ok(LinkDerived {
            kappa: 10f64.powf(-self.fiber_km * self.loss_db_per_km / 10.0),
            m: m as u64,
            rate_bps: 1.0 / self.bit_duration,
        })
    }
}

fn cmd_link_budget(args: &LinkArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let file = load_config(&args.common.config)?;
    let preset = match args.common.preset.as_deref().or(file.preset.as_deref()) {
        None => None,
        Some(name) => match lookup_preset(name).as_deref() {
            Some([p]) => Some(*p),
            Some(_) => return usage("link-budget needs a single preset"),
            None => return usage(format!("unknown preset '{name}'")),
        },
    };
    let need = |flag: Option<f64>, from_file: Option<f64>, name: &str| {
        flag.or(from_file)
            .ok_or_else(|| CliError::Usage(format!("missing --{name}")))
    };
    let lb = LinkBudget {
        bandwidth: need(args.bandwidth, file.bandwidth, "bandwidth")?,
        bit_duration: need(args.bit_duration, file.bit_duration, "bit-duration")?,
        fiber_km: need(args.fiber_km, file.fiber_km, "fiber-km")?,
        loss_db_per_km: args.loss_db_per_km.or(file.loss_db_per_km).unwrap_or(0.2),
    };
    let derived = lb.derive()?;
    let ns = args.common.ns.or(file.ns).or(preset.map(|p| p.ns));
    let nb = args.common.nb.or(file.nb).or(preset.map(|p| p.nb));
    let (Some(ns), Some(nb)) = (ns, nb) else {
        return usage("missing --ns/--nb (or use --preset/--config)");
    };
    let p = ProtocolParams::new(derived.kappa, ns, nb, derived.m)?;
    let v = json!({
        "link": lb,
        "derived": derived,
        "report": point_report(&p)?,
    });
    emit(&args.common.out, stdout, &to_json(&v))
}

fn cmd_oracle_check(args: &OracleArgs, stdout: &mut dyn Write) -> CliResult<i32> {
    let file = load_config(&args.common.config)?;
    let mut grid = OracleGrid::default();
    if let Some(g) = &file.grid {
        if let Some(v) = &g.ns {
            grid.ns = v.clone();
        }
        if let Some(v) = &g.kappa {
            grid.kappa = v.clone();
        }
        if let Some(v) = &g.nb {
            grid.nb = v.clone();
        }
        if let Some(v) = &g.s {
            grid.s = v.clone();
        }
    }
    if let Some(v) = args.common.ns.or(file.ns) {
        grid.ns = vec![v];
    }
    if let Some(v) = args.common.kappa.or(file.kappa) {
        grid.kappa = vec![v];
    }
    if let Some(v) = args.common.nb.or(file.nb) {
        grid.nb = vec![v];
    }
    grid.cutoff = args.cutoff.or(file.cutoff);
    if let Some(t) = args.tolerance.or(file.tolerance) {
        grid.tolerance = t;
    }
    grid.parties = match args.party.unwrap_or(PartyArg::Both) {
        PartyArg::Alice => vec![Party::Alice],
        PartyArg::Eve => vec![Party::Eve],
        PartyArg::Both => vec![Party::Alice, Party::Eve],
    };
    if grid.ns.is_empty() || grid.kappa.is_empty() || grid.nb.is_empty() || grid.s.is_empty() {
        return usage("oracle grid has an empty axis");
    }
    let rows = run_oracle_grid(&grid, Exec::default());
    let mut text = format!(
        "{:<6} {:>8} {:>8} {:>8} {:>6} {:>12} {:>12}  status\n",
        "party", "ns", "kappa", "nb", "cutoff", "deficit", "max_dev"
    );
    for r in &rows {
        let status = match (&r.error, r.pass) {
            (Some(e), _) => format!("ERROR {e}"),
            (None, true) => "PASS".to_string(),
            (None, false) => "FAIL".to_string(),
        };
        let party = match r.party {
            Party::Alice => "alice",
            Party::Eve => "eve",
        };
        text.push_str(&format!(
            "{:<6} {:>8} {:>8} {:>8} {:>6} {:>12.3e} {:>12.3e}  {}\n",
            party, r.ns, r.kappa, r.nb, r.cutoff, r.deficit, r.max_deviation, status
        ));
    }
    let failed = rows.iter().filter(|r| !r.pass).count();
    text.push_str(&format!("{} points, {} failed\n", rows.len(), failed));
    emit(&args.common.out, stdout, &text)?;
    Ok(if failed == 0 { EXIT_OK } else { EXIT_FAILURE })
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let outcome = match &cli.command {
        Command::Point(a) => cmd_point(a, stdout).map(|_| EXIT_OK),
        Command::Sweep(a) => cmd_sweep(a, stdout).map(|_| EXIT_OK),
        Command::Mc(a) => cmd_mc(a, stdout),
        Command::LinkBudget(a) => cmd_link_budget(a, stdout).map(|_| EXIT_OK),
        Command::OracleCheck(a) => cmd_oracle_check(a, stdout),
    };
    match outcome {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Failure(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_FAILURE
        }
    }
}
