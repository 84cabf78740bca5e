//! Batch front end. Artifacts are staged in a hidden directory and renamed
//! into place only when the whole command succeeds.

use crate::ckm::{ckm_load, ckm_to_json};
use crate::dsp::export::{detections_csv, spectrum_csv, SpectrumSidecar};
use crate::dsp::Estimator;
use crate::scenario::{
    construction_log_csv, load_config, resolved_config_json, run_beam_alignment_eval, run_ckm_construction,
    run_environment_sensing, run_log_csv, ScenarioConfig,
};
use crate::selftest::run_selftest;
use crate::Error;
use clap::{Args, Parser, Subcommand};
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

pub const FAILURE_MARKER: &str = "FAILED";
pub const RESOLVED_CONFIG: &str = "config.resolved.json";

#[derive(Debug, Parser)]
#[command(name = "isac-ckm", version, about = "ISAC channel knowledge map simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One sensing frame: range-angle spectrum and detections.
    Sense(RunArgs),
    /// Build the channel knowledge map by a raster walk over the grid.
    BuildCkm(RunArgs),
    /// Compare location-based and map-assisted beam alignment along the trajectory.
    EvalAlign(EvalArgs),
    /// Run the built-in oracle checks.
    Selftest(SelftestArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Override a config field by dotted path, e.g. `noise.snr_db=30`.
    #[arg(long = "set", value_name = "KEY=VALUE", value_parser = parse_override)]
    pub overrides: Vec<(String, String)>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub estimator: Option<Estimator>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Use a saved map instead of building one.
    #[arg(long)]
    pub ckm: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_override(s: &str) -> Result<(String, String), String> {
    match s.split_once('=') {
        Some((k, v)) if !k.is_empty() => Ok((k.to_string(), v.to_string())),
        _ => Err(format!("expected KEY=VALUE, got `{s}`")),
    }
}

/// Exit status: domain failure.
pub const EXIT_DOMAIN: i32 = 1;
/// Exit status: bad invocation or bad config.
pub const EXIT_USAGE: i32 = 2;

struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Config { .. } => EXIT_USAGE,
            _ => EXIT_DOMAIN,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

/// Files a command produces, in write order.
type Artifacts = Vec<(&'static str, String)>;

fn resolve(args: &RunArgs) -> Result<ScenarioConfig, Failure> {
    let mut overrides = args.overrides.clone();
    if let Some(seed) = args.seed {
        overrides.push(("noise.rng_seed".into(), seed.to_string()));
    }
    if let Some(e) = args.estimator {
        overrides.push(("estimator".into(), e.name().into()));
    }
    let cfg = load_config(&args.config, &overrides).map_err(|e| match e {
        Error::Io { .. } => Failure {
            code: EXIT_USAGE,
            message: e.to_string(),
        },
        e => e.into(),
    })?;
    Ok(cfg)
}

fn sense(cfg: &ScenarioConfig) -> Result<Artifacts, Failure> {
    let out = run_environment_sensing(cfg)?;
    let mut sidecar = serde_json::to_string_pretty(&SpectrumSidecar::of(&out.spectrum)).expect("sidecar serializes");
    sidecar.push('\n');
    for d in &out.detections {
        println!(
            "detection: range {:.3} m, angle {:.2} deg, ({:.3}, {:.3}), {:.1} dB",
            d.range_m,
            d.angle_rad.to_degrees(),
            d.position_xy.x,
            d.position_xy.y,
            d.power_db
        );
    }
    Ok(vec![
        ("spectrum.csv", spectrum_csv(&out.spectrum)),
        ("spectrum.json", sidecar),
        ("detections.csv", detections_csv(&out.detections)),
    ])
}

fn build_ckm(cfg: &ScenarioConfig) -> Result<(Artifacts, crate::ckm::CkmGrid), Failure> {
    let out = run_ckm_construction(cfg)?;
    println!("map cells populated: {}", out.grid.len());
    let files = vec![
        ("ckm.json", ckm_to_json(&out.grid)),
        ("construction_log.csv", construction_log_csv(&out.records)),
    ];
    Ok((files, out.grid))
}

fn eval_align(cfg: &ScenarioConfig, ckm: Option<&Path>) -> Result<Artifacts, Failure> {
    let (mut files, grid) = match ckm {
        Some(p) => (Vec::new(), ckm_load(p)?),
        None => build_ckm(cfg)?,
    };
    let out = run_beam_alignment_eval(cfg, &grid)?;
    let mut summary = serde_json::to_string_pretty(&out.summary).expect("summary serializes");
    summary.push('\n');
    if let Some(g) = out.summary.nlos_gain_db {
        println!("NLoS gain of map-assisted alignment: {g:.2} dB");
    }
    files.push(("run_log.csv", run_log_csv(&out.records)));
    files.push(("summary.json", summary));
    Ok(files)
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Error::io(path, e).into()
}

/// Stages every file, then renames them into `dir`.
fn publish(dir: &Path, files: &Artifacts) -> Result<(), Failure> {
    let stage = dir.join(format!(".staging-{}", std::process::id()));
    let result = (|| {
        fs::create_dir_all(&stage).map_err(|e| io_failure(&stage, e))?;
        for (name, body) in files {
            let p = stage.join(name);
            fs::write(&p, body).map_err(|e| io_failure(&p, e))?;
        }
        for (name, _) in files {
            let (from, to) = (stage.join(name), dir.join(name));
            fs::rename(&from, &to).map_err(|e| io_failure(&to, e))?;
        }
        Ok(())
    })();
    let _ = fs::remove_dir_all(&stage);
    result
}

const ALL_ARTIFACTS: [&str; 9] = [
    RESOLVED_CONFIG,
    "spectrum.csv",
    "spectrum.json",
    "detections.csv",
    "ckm.json",
    "construction_log.csv",
    "run_log.csv",
    "summary.json",
    "selftest.txt",
];

/// Leaves only the failure marker among this tool's files in `dir`.
fn mark_failed(dir: &Path, message: &str) {
    if fs::create_dir_all(dir).is_err() {
        return;
    }
    for name in ALL_ARTIFACTS {
        let _ = fs::remove_file(dir.join(name));
    }
    let _ = fs::write(dir.join(FAILURE_MARKER), format!("{message}\n"));
}

fn run_scenario(
    args: &RunArgs,
    body: impl FnOnce(&ScenarioConfig) -> Result<Artifacts, Failure>,
) -> Result<(), Failure> {
    let dir = &args.out;
    let outcome = (|| {
        let cfg = resolve(args)?;
        fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
        let _ = fs::remove_file(dir.join(FAILURE_MARKER));
        let mut files = vec![(RESOLVED_CONFIG, resolved_config_json(&cfg))];
        files.extend(body(&cfg)?);
        publish(dir, &files)
    })();
    if let Err(f) = &outcome {
        mark_failed(dir, &f.message);
    }
    outcome
}

fn selftest(args: &SelftestArgs) -> Result<(), Failure> {
    let results = run_selftest();
    let mut report = String::new();
    for r in &results {
        report.push_str(&format!(
            "{} {}: {}\n",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.detail
        ));
    }
    print!("{report}");
    let failed = results.iter().filter(|r| !r.passed).count();
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
        publish(dir, &vec![("selftest.txt", report)])?;
    }
    if failed > 0 {
        return Err(Failure {
            code: EXIT_DOMAIN,
            message: format!("{failed} of {} checks failed", results.len()),
        });
    }
    Ok(())
}

/// Runs the tool on `argv` (program name first) and returns the exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    let result = match &cli.command {
        Command::Sense(a) => run_scenario(a, sense),
        Command::BuildCkm(a) => run_scenario(a, |c| build_ckm(c).map(|(f, _)| f)),
        Command::EvalAlign(a) => run_scenario(&a.run, |c| eval_align(c, a.ckm.as_deref())),
        Command::Selftest(a) => selftest(a),
    };
    match result {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}
