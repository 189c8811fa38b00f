//! Command-line front end: flag and config-file parsing, CSV emission, and
//! the wiring from each subcommand to one library entry point.
//!
//! Configuration lives in a TOML file with one section per subcommand;
//! explicit flags always win over file values, which win over built-in
//! defaults. Unknown sections or keys are hard errors with a spelling
//! suggestion rather than silently ignored. All CSV artifacts are written
//! atomically (temp file + rename), carry a header row and a trailing
//! newline, and serialize numbers with 17 significant digits so reruns
//! are byte-comparable.
//!
//! Exit codes: 0 success, 1 a numeric check failed (drift or fitted slope
//! out of band, selftest failure), 2 usage or configuration error.

use crate::fit::log_log_slope;
use crate::invariance::derivation;
use crate::lattice::{fw_scaling_study, ScalingStudyConfig};
use crate::selftest::{run_selftest, DEFAULT_SEED};
use crate::si::{magnetar_sweep, PhysicalConstants};
use crate::spinor::GammaBasis;
use crate::wavepacket::{
    build_wavepacket, power_spectrum, proper_time, zitter_spectrum, MomentumGrid, WavepacketSpec,
};
use crate::{Error, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::ffi::OsStr;
use std::path::{Path, PathBuf};

/// Environment variable naming a directory that relative output paths are
/// resolved against.
pub const OUTDIR_ENV: &str = "PROPERTIME_OUTDIR";

const DRIFT_BOUND: f64 = 1e-11;
const SLOPE_BANDS: [(&str, f64, f64); 3] = [
    ("res_beta", 3.0, 0.4),
    ("res_rate", 4.0, 0.6),
    ("ratio_small", 3.0, 0.5),
];

#[derive(Parser)]
#[command(
    name = "propertime",
    version,
    about = "Proper-time rate of a Dirac particle: derivation, wavepacket evolution, lattice checks, SI estimates"
)]
pub struct Cli {
    /// TOML config file with one section per subcommand; flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Re-derive the rate operator from the invariance constraints.
    DeriveD(DeriveFlags),
    /// Evolve a free Gaussian wavepacket and write its rate and proper time.
    FreeEvolve(FreeEvolveFlags),
    /// Run the lattice scaling studies and check the fitted residual powers.
    FwCheck(FwCheckFlags),
    /// Sweep magnetic field strengths and report the SI rate shift.
    Magnetar(MagnetarFlags),
    /// Run the deterministic cross-module invariant suite.
    Selftest(SelftestFlags),
}

#[derive(Args, Default)]
pub struct DeriveFlags {
    /// Emit a machine-readable JSON report instead of text.
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Default)]
pub struct FreeEvolveFlags {
    /// Particle mass (natural units).
    #[arg(long)]
    pub mass: Option<f64>,
    /// Half-width of the momentum box.
    #[arg(long)]
    pub pmax: Option<f64>,
    /// Number of grid points along the first momentum axis.
    #[arg(long)]
    pub grid_n: Option<usize>,
    /// Packet center momentum as three comma-separated components.
    #[arg(long, value_delimiter = ',', num_args = 3, allow_negative_numbers = true)]
    pub p0: Option<Vec<f64>>,
    /// Momentum-space packet width.
    #[arg(long)]
    pub sigma_p: Option<f64>,
    /// Energy branch the packet is projected on.
    #[arg(long, value_enum)]
    pub branch: Option<BranchChoice>,
    /// Branch mixing angle (mixed branch only).
    #[arg(long)]
    pub theta: Option<f64>,
    /// Start of the time window.
    #[arg(long, allow_negative_numbers = true)]
    pub t0: Option<f64>,
    /// End of the time window.
    #[arg(long, allow_negative_numbers = true)]
    pub t1: Option<f64>,
    /// Number of time samples (odd, at least 3).
    #[arg(long)]
    pub samples: Option<usize>,
    /// Output CSV path (columns t,rate,tau).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the oscillation spectrum to this CSV (columns freq,power).
    #[arg(long)]
    pub spectrum: Option<PathBuf>,
}

#[derive(Args, Default)]
pub struct FwCheckFlags {
    /// Lattice points along x.
    #[arg(long)]
    pub nx: Option<usize>,
    /// Lattice points along y.
    #[arg(long)]
    pub ny: Option<usize>,
    /// Comma-separated velocity scales, strictly decreasing.
    #[arg(long, value_delimiter = ',')]
    pub vscales: Option<Vec<f64>>,
    /// Output CSV path (columns vscale,res_beta,res_rate,ratio_small).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Default)]
pub struct MagnetarFlags {
    /// Smallest field strength in tesla.
    #[arg(long)]
    pub bmin: Option<f64>,
    /// Largest field strength in tesla.
    #[arg(long)]
    pub bmax: Option<f64>,
    /// Number of sweep points.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Space the sweep logarithmically (default) or linearly with `--log false`.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub log: Option<bool>,
    /// Output CSV path (columns B_tesla,shift,flag).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Default)]
pub struct SelftestFlags {
    /// Seed for the deterministic draws.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Emit the report as JSON instead of text.
    #[arg(long)]
    pub json: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BranchChoice {
    Positive,
    Negative,
    Mixed,
}

/// Parse the process arguments and run; returns the exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn execute(cli: Cli) -> Result<i32> {
    let config = match &cli.config {
        Some(path) => Some(load_config(path)?),
        None => None,
    };
    match cli.command {
        Command::DeriveD(flags) => cmd_derive(&flags),
        Command::FreeEvolve(flags) => {
            cmd_free_evolve(resolve_free_evolve(&flags, section(&config, "free-evolve"))?)
        }
        Command::FwCheck(flags) => {
            cmd_fw_check(resolve_fw_check(&flags, section(&config, "fw-check"))?)
        }
        Command::Magnetar(flags) => {
            cmd_magnetar(resolve_magnetar(&flags, section(&config, "magnetar"))?)
        }
        Command::Selftest(flags) => {
            let seed = match flags.seed {
                Some(s) => s,
                None => match cfg_u64(section(&config, "selftest"), "seed")? {
                    Some(s) => s,
                    None => DEFAULT_SEED,
                },
            };
            cmd_selftest(seed, flags.json)
        }
    }
}

// ---------------------------------------------------------------------------
// config file handling

const SECTION_KEYS: [(&str, &[&str]); 5] = [
    ("derive-d", &[]),
    (
        "free-evolve",
        &[
            "mass", "pmax", "grid_n", "p0", "sigma_p", "branch", "theta", "t0", "t1", "samples",
            "out", "spectrum",
        ],
    ),
    ("fw-check", &["nx", "ny", "vscales", "out"]),
    ("magnetar", &["bmin", "bmax", "steps", "log", "out"]),
    ("selftest", &["seed"]),
];

/// Parse a config file and reject any section or key that is not known,
/// suggesting the closest valid spelling.
pub fn load_config(path: &Path) -> Result<toml::Table> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    let table: toml::Table = text
        .parse()
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let section_names: Vec<&str> = SECTION_KEYS.iter().map(|(n, _)| *n).collect();
    for (name, value) in &table {
        let Some((_, allowed)) = SECTION_KEYS.iter().find(|(n, _)| n == name) else {
            return Err(Error::Parse(format!(
                "unknown section `{name}`{}",
                suggestion(name, &section_names)
            )));
        };
        let Some(sub) = value.as_table() else {
            return Err(Error::Parse(format!(
                "`{name}` must be a section (a `[{name}]` table), not a bare value"
            )));
        };
        for key in sub.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(Error::Parse(format!(
                    "unknown key `{key}` in section `[{name}]`{}",
                    suggestion(key, allowed)
                )));
            }
        }
    }
    Ok(table)
}

fn suggestion(word: &str, candidates: &[&str]) -> String {
    candidates
        .iter()
        .map(|c| (strsim::levenshtein(word, c), *c))
        .filter(|(d, _)| *d <= 2.max(word.len() / 3))
        .min()
        .map(|(_, c)| format!(" (did you mean `{c}`?)"))
        .unwrap_or_default()
}

fn section<'a>(config: &'a Option<toml::Table>, name: &str) -> Option<&'a toml::Table> {
    config
        .as_ref()
        .and_then(|t| t.get(name))
        .and_then(|v| v.as_table())
}

fn cfg_f64(section: Option<&toml::Table>, key: &str) -> Result<Option<f64>> {
    match section.and_then(|s| s.get(key)) {
        None => Ok(None),
        Some(v) => v
            .as_float()
            .or_else(|| v.as_integer().map(|i| i as f64))
            .map(Some)
            .ok_or_else(|| Error::Parse(format!("key `{key}` must be a number, got {v}"))),
    }
}

fn cfg_usize(section: Option<&toml::Table>, key: &str) -> Result<Option<usize>> {
    match section.and_then(|s| s.get(key)) {
        None => Ok(None),
        Some(v) => v
            .as_integer()
            .and_then(|i| usize::try_from(i).ok())
            .map(Some)
            .ok_or_else(|| {
                Error::Parse(format!("key `{key}` must be a non-negative integer, got {v}"))
            }),
    }
}

fn cfg_u64(section: Option<&toml::Table>, key: &str) -> Result<Option<u64>> {
    match section.and_then(|s| s.get(key)) {
        None => Ok(None),
        Some(v) => v
            .as_integer()
            .and_then(|i| u64::try_from(i).ok())
            .map(Some)
            .ok_or_else(|| {
                Error::Parse(format!("key `{key}` must be a non-negative integer, got {v}"))
            }),
    }
}

fn cfg_bool(section: Option<&toml::Table>, key: &str) -> Result<Option<bool>> {
    match section.and_then(|s| s.get(key)) {
        None => Ok(None),
        Some(v) => v
            .as_bool()
            .map(Some)
            .ok_or_else(|| Error::Parse(format!("key `{key}` must be a boolean, got {v}"))),
    }
}

fn cfg_path(section: Option<&toml::Table>, key: &str) -> Result<Option<PathBuf>> {
    match section.and_then(|s| s.get(key)) {
        None => Ok(None),
        Some(v) => v
            .as_str()
            .map(|s| Some(PathBuf::from(s)))
            .ok_or_else(|| Error::Parse(format!("key `{key}` must be a string, got {v}"))),
    }
}

fn cfg_f64_list(section: Option<&toml::Table>, key: &str) -> Result<Option<Vec<f64>>> {
    match section.and_then(|s| s.get(key)) {
        None => Ok(None),
        Some(v) => {
            let arr = v.as_array().ok_or_else(|| {
                Error::Parse(format!("key `{key}` must be an array of numbers, got {v}"))
            })?;
            let mut out = Vec::with_capacity(arr.len());
            for item in arr {
                out.push(
                    item.as_float()
                        .or_else(|| item.as_integer().map(|i| i as f64))
                        .ok_or_else(|| {
                            Error::Parse(format!("key `{key}` must contain only numbers, got {item}"))
                        })?,
                );
            }
            Ok(Some(out))
        }
    }
}

fn cfg_branch(section: Option<&toml::Table>, key: &str) -> Result<Option<BranchChoice>> {
    match section.and_then(|s| s.get(key)) {
        None => Ok(None),
        Some(v) => {
            let s = v
                .as_str()
                .ok_or_else(|| Error::Parse(format!("key `{key}` must be a string, got {v}")))?;
            match s {
                "positive" => Ok(Some(BranchChoice::Positive)),
                "negative" => Ok(Some(BranchChoice::Negative)),
                "mixed" => Ok(Some(BranchChoice::Mixed)),
                other => Err(Error::Parse(format!(
                    "key `{key}` must be one of positive, negative, mixed; got `{other}`{}",
                    suggestion(other, &["positive", "negative", "mixed"])
                ))),
            }
        }
    }
}

// ---------------------------------------------------------------------------
// resolved per-subcommand parameter records (flags > config > defaults)

#[derive(Debug, PartialEq)]
pub struct FreeEvolveParams {
    pub mass: f64,
    pub pmax: f64,
    pub grid_n: usize,
    pub p0: [f64; 3],
    pub sigma_p: f64,
    pub branch: BranchChoice,
    pub theta: f64,
    pub t0: f64,
    pub t1: f64,
    pub samples: usize,
    pub out: PathBuf,
    pub spectrum: Option<PathBuf>,
}

pub fn resolve_free_evolve(
    flags: &FreeEvolveFlags,
    cfg: Option<&toml::Table>,
) -> Result<FreeEvolveParams> {
    let p0 = match flags.p0.clone().or(cfg_f64_list(cfg, "p0")?) {
        Some(v) => v.as_slice().try_into().map_err(|_| {
            Error::Parse(format!("p0 must have exactly 3 components, got {}", v.len()))
        })?,
        None => [1.0, 0.0, 0.0],
    };
    let params = FreeEvolveParams {
        mass: flags.mass.or(cfg_f64(cfg, "mass")?).unwrap_or(1.0),
        pmax: flags.pmax.or(cfg_f64(cfg, "pmax")?).unwrap_or(8.0),
        grid_n: flags.grid_n.or(cfg_usize(cfg, "grid_n")?).unwrap_or(256),
        p0,
        sigma_p: flags.sigma_p.or(cfg_f64(cfg, "sigma_p")?).unwrap_or(0.25),
        branch: flags
            .branch
            .or(cfg_branch(cfg, "branch")?)
            .unwrap_or(BranchChoice::Positive),
        theta: flags
            .theta
            .or(cfg_f64(cfg, "theta")?)
            .unwrap_or(std::f64::consts::FRAC_PI_4),
        t0: flags.t0.or(cfg_f64(cfg, "t0")?).unwrap_or(0.0),
        t1: flags.t1.or(cfg_f64(cfg, "t1")?).unwrap_or(20.0),
        samples: flags.samples.or(cfg_usize(cfg, "samples")?).unwrap_or(801),
        out: flags
            .out
            .clone()
            .or(cfg_path(cfg, "out")?)
            .unwrap_or_else(|| PathBuf::from("free_evolve.csv")),
        spectrum: flags.spectrum.clone().or(cfg_path(cfg, "spectrum")?),
    };
    if !(params.sigma_p > 0.0) {
        return Err(Error::Validation(format!(
            "sigma_p > 0 is required, got {}",
            params.sigma_p
        )));
    }
    Ok(params)
}

#[derive(Debug, PartialEq)]
pub struct FwCheckParams {
    pub nx: usize,
    pub ny: usize,
    pub vscales: Vec<f64>,
    pub out: PathBuf,
}

pub fn resolve_fw_check(flags: &FwCheckFlags, cfg: Option<&toml::Table>) -> Result<FwCheckParams> {
    Ok(FwCheckParams {
        nx: flags.nx.or(cfg_usize(cfg, "nx")?).unwrap_or(24),
        ny: flags.ny.or(cfg_usize(cfg, "ny")?).unwrap_or(24),
        vscales: flags
            .vscales
            .clone()
            .or(cfg_f64_list(cfg, "vscales")?)
            .unwrap_or_else(|| vec![0.4, 0.2, 0.1, 0.05]),
        out: flags
            .out
            .clone()
            .or(cfg_path(cfg, "out")?)
            .unwrap_or_else(|| PathBuf::from("fw_scaling.csv")),
    })
}

#[derive(Debug, PartialEq)]
pub struct MagnetarParams {
    pub bmin: f64,
    pub bmax: f64,
    pub steps: usize,
    pub log: bool,
    pub out: PathBuf,
}

pub fn resolve_magnetar(
    flags: &MagnetarFlags,
    cfg: Option<&toml::Table>,
) -> Result<MagnetarParams> {
    let params = MagnetarParams {
        bmin: flags.bmin.or(cfg_f64(cfg, "bmin")?).unwrap_or(1.0),
        bmax: flags.bmax.or(cfg_f64(cfg, "bmax")?).unwrap_or(1e10),
        steps: flags.steps.or(cfg_usize(cfg, "steps")?).unwrap_or(11),
        log: flags.log.or(cfg_bool(cfg, "log")?).unwrap_or(true),
        out: flags
            .out
            .clone()
            .or(cfg_path(cfg, "out")?)
            .unwrap_or_else(|| PathBuf::from("magnetar.csv")),
    };
    if params.steps < 2 {
        return Err(Error::Validation(format!(
            "steps >= 2 is required for a sweep, got {}",
            params.steps
        )));
    }
    if !(params.bmax > params.bmin) {
        return Err(Error::Validation(format!(
            "bmax > bmin is required, got bmin = {} and bmax = {}",
            params.bmin, params.bmax
        )));
    }
    if params.log && !(params.bmin > 0.0) {
        return Err(Error::Validation(format!(
            "bmin > 0 is required for logarithmic spacing, got {}",
            params.bmin
        )));
    }
    Ok(params)
}

// ---------------------------------------------------------------------------
// output plumbing

/// Resolve an output path against the `PROPERTIME_OUTDIR` directory override.
fn resolve_out(path: &Path) -> PathBuf {
    join_outdir(path, std::env::var_os(OUTDIR_ENV).as_deref())
}

fn join_outdir(path: &Path, outdir: Option<&OsStr>) -> PathBuf {
    match outdir {
        Some(dir) if path.is_relative() => Path::new(dir).join(path),
        _ => path.to_path_buf(),
    }
}

/// Write a file atomically: the content lands under a temporary name in the
/// final directory and is renamed into place, so readers never observe a
/// partial file.
fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| Error::Validation(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(
        ".{}.tmp-{}",
        name.to_string_lossy(),
        std::process::id()
    ));
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Render rows as CSV with 17 significant digits per number, a header row
/// and a trailing newline.
fn csv_table(header: &str, rows: &[Vec<f64>]) -> String {
    let mut out = String::with_capacity(32 * (rows.len() + 1));
    out.push_str(header);
    out.push('\n');
    for row in rows {
        let line = row
            .iter()
            .map(|x| format!("{x:.16e}"))
            .collect::<Vec<_>>()
            .join(",");
        out.push_str(&line);
        out.push('\n');
    }
    out
}

// ---------------------------------------------------------------------------
// subcommands

#[derive(Serialize)]
struct DeriveReport {
    stage_dims: [usize; 3],
    matrix: Vec<Vec<[f64; 2]>>,
}

fn cmd_derive(flags: &DeriveFlags) -> Result<i32> {
    let gb = GammaBasis::dirac();
    let der = derivation(&gb)?;
    let matrix: Vec<Vec<[f64; 2]>> = (0..4)
        .map(|i| (0..4).map(|j| [der.matrix.0[i][j].re, der.matrix.0[i][j].im]).collect())
        .collect();
    if flags.json {
        let report = DeriveReport {
            stage_dims: der.stage_dims,
            matrix,
        };
        println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("report serialization cannot fail")
        );
    } else {
        println!(
            "kernel dimensions per constraint stage: {}, {}, {}",
            der.stage_dims[0], der.stage_dims[1], der.stage_dims[2]
        );
        println!("surviving rate operator:");
        for row in &matrix {
            let line = row
                .iter()
                .map(|[re, im]| format!("{re:+.16e}{im:+.16e}i"))
                .collect::<Vec<_>>()
                .join("  ");
            println!("  {line}");
        }
    }
    Ok(0)
}

fn cmd_free_evolve(params: FreeEvolveParams) -> Result<i32> {
    let gb = GammaBasis::dirac();
    let grid = MomentumGrid::new([params.grid_n, 1, 1], params.pmax, params.mass)?;
    let spec = match params.branch {
        BranchChoice::Positive => WavepacketSpec::positive(params.p0, params.sigma_p),
        BranchChoice::Negative => WavepacketSpec::negative(params.p0, params.sigma_p),
        BranchChoice::Mixed => WavepacketSpec::mixed(params.p0, params.sigma_p, params.theta),
    };
    let field = build_wavepacket(&spec, &grid, &gb)?;
    let series = proper_time(&field, &gb, params.t0, params.t1, params.samples)?;

    let rows: Vec<Vec<f64>> = series
        .times
        .iter()
        .zip(series.rate.iter())
        .zip(series.tau.iter())
        .map(|((&t, &r), &tau)| vec![t, r, tau])
        .collect();
    let out = resolve_out(&params.out);
    write_atomic(&out, &csv_table("t,rate,tau", &rows))?;

    let mut spectrum_note = String::new();
    if let Some(spath) = &params.spectrum {
        let (freqs, amps) = power_spectrum(&series)?;
        let srows: Vec<Vec<f64>> = freqs
            .iter()
            .zip(amps.iter())
            .map(|(&f, &a)| vec![f, a])
            .collect();
        let sout = resolve_out(spath);
        write_atomic(&sout, &csv_table("freq,power", &srows))?;
        let (peak, amp) = zitter_spectrum(&series)?;
        spectrum_note = format!(
            ", spectrum {} (peak {:.6e} rad/time, amplitude {:.3e})",
            sout.display(),
            peak,
            amp
        );
    }

    let drift = series
        .rate
        .iter()
        .map(|r| (r - series.rate[0]).abs())
        .fold(0.0f64, f64::max);
    let pure = params.branch != BranchChoice::Mixed;
    if pure && drift > DRIFT_BOUND {
        eprintln!(
            "free-evolve: rate drift {drift:.3e} exceeds {DRIFT_BOUND:.0e} on a single-branch packet ({} rows written to {})",
            rows.len(),
            out.display()
        );
        return Ok(1);
    }
    println!(
        "free-evolve: wrote {} ({} rows), rate drift {drift:.3e}{spectrum_note}",
        out.display(),
        rows.len()
    );
    Ok(0)
}

fn cmd_fw_check(params: FwCheckParams) -> Result<i32> {
    let sc = ScalingStudyConfig::standard([params.nx, params.ny], params.vscales.clone());
    let study = fw_scaling_study(&sc)?;
    let rows: Vec<Vec<f64>> = study
        .iter()
        .map(|r| vec![r.vscale, r.res_beta, r.res_rate, r.ratio_small])
        .collect();
    let out = resolve_out(&params.out);
    write_atomic(&out, &csv_table("vscale,res_beta,res_rate,ratio_small", &rows))?;

    let scales: Vec<f64> = study.iter().map(|r| r.vscale).collect();
    let columns: [Vec<f64>; 3] = [
        study.iter().map(|r| r.res_beta).collect(),
        study.iter().map(|r| r.res_rate).collect(),
        study.iter().map(|r| r.ratio_small).collect(),
    ];
    let mut all_pass = true;
    for ((name, center, half_width), values) in SLOPE_BANDS.iter().zip(columns.iter()) {
        let (slope, r2) = log_log_slope(&scales, values);
        let pass = (slope - center).abs() <= *half_width;
        all_pass &= pass;
        println!(
            "fw-check: {name:<12} slope {slope:+.4} (r2 {r2:.6})  expected {center:.1} +/- {half_width:.1}  {}",
            if pass { "pass" } else { "FAIL" }
        );
    }
    println!("fw-check: wrote {} ({} rows)", out.display(), rows.len());
    if !all_pass {
        eprintln!("fw-check: fitted slope out of band");
        return Ok(1);
    }
    Ok(0)
}

fn cmd_magnetar(params: MagnetarParams) -> Result<i32> {
    let b_values: Vec<f64> = if params.log {
        let l0 = params.bmin.log10();
        let l1 = params.bmax.log10();
        (0..params.steps)
            .map(|i| {
                if i == 0 {
                    params.bmin
                } else if i == params.steps - 1 {
                    params.bmax
                } else {
                    10f64.powf(l0 + (l1 - l0) * i as f64 / (params.steps - 1) as f64)
                }
            })
            .collect()
    } else {
        (0..params.steps)
            .map(|i| {
                params.bmin + (params.bmax - params.bmin) * i as f64 / (params.steps - 1) as f64
            })
            .collect()
    };
    let consts = PhysicalConstants::codata2018();
    let table = magnetar_sweep(&consts, &b_values)?;

    let mut out_text = String::from("B_tesla,shift,flag\n");
    for row in &table.rows {
        out_text.push_str(&format!(
            "{:.16e},{:.16e},{}\n",
            row.b_tesla,
            row.shift,
            if row.expansion_invalid {
                "expansion-invalid"
            } else {
                "ok"
            }
        ));
    }
    let out = resolve_out(&params.out);
    write_atomic(&out, &out_text)?;
    let flagged = table.rows.iter().filter(|r| r.expansion_invalid).count();
    println!(
        "magnetar: wrote {} ({} rows, {} flagged expansion-invalid)",
        out.display(),
        table.rows.len(),
        flagged
    );
    Ok(0)
}

fn cmd_selftest(seed: u64, json: bool) -> Result<i32> {
    let report = run_selftest(seed)?;
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("report serialization cannot fail")
        );
    } else {
        print!("{}", report.render());
    }
    Ok(if report.passed { 0 } else { 1 })
}
