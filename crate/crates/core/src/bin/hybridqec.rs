use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use hybridqec::experiments::{
    alpha_sweep, alpha_sweep_pz_grid, default_pz_grid, estimate_logical_rate,
    percolation_threshold, resource_report, threshold_sweep, write_csv, write_run, OutputFormat,
    Point, RunManifest, TrialConfig, DEFAULT_ALPHA, DEFAULT_FIXED_ETA,
};
use hybridqec::generation::ErrorLocationConfig;
use hybridqec::lattice::Distance;
use hybridqec::oracle::run_cross_checks;
use hybridqec::Error;

const EXIT_INVALID: u8 = 2;
const EXIT_NO_CROSSING: u8 = 3;

#[derive(Parser)]
#[command(
    name = "hybridqec",
    version,
    about = "Hybrid-qubit topological QEC simulator"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Logical failure rate at given points.
    Simulate(SimArgs),
    /// Dephasing sweep over several distances and the crossing point.
    Threshold(SimArgs),
    /// Loss threshold as a function of the amplitude.
    SweepAlpha(SweepArgs),
    /// Critical missing-qubit fraction.
    Percolation(PercArgs),
    /// Resource comparison for target logical rates.
    Resources(ResArgs),
    /// Cross-check closed forms against the state-level oracle.
    OracleVerify(OutArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Rate {
    Single,
    Entangling,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct OutArgs {
    /// Output directory; tables go to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_delimiter = ',', default_value = "3,5,7")]
    distances: Vec<u32>,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Single-qubit error locations per qubit.
    #[arg(long)]
    events_single: Option<u32>,
    /// Creation-fusion error locations per qubit.
    #[arg(long)]
    events_creation: Option<u32>,
    /// Connection-fusion error locations per qubit.
    #[arg(long)]
    events_connection: Option<u32>,
    /// Rate applied at fusion locations.
    #[arg(long, value_enum)]
    events_entangling_rate: Option<Rate>,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    workers: usize,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct SimArgs {
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    /// Loss rate; fixes `p_f` when `--pz-list` is given, every rate otherwise.
    #[arg(long, default_value_t = DEFAULT_FIXED_ETA)]
    eta: f64,
    /// Dephasing rates to sweep directly.
    #[arg(long, value_delimiter = ',')]
    pz_list: Option<Vec<f64>>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_delimiter = ',', default_value = "0.9,1.1,1.25,1.5,1.8")]
    alphas: Vec<f64>,
    /// Loss rate behind `p_f`.
    #[arg(long, default_value_t = DEFAULT_FIXED_ETA)]
    eta: f64,
    #[arg(long, value_delimiter = ',')]
    pz_list: Option<Vec<f64>>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
struct PercArgs {
    #[arg(long, value_delimiter = ',', default_value = "7,9,11")]
    distances: Vec<u32>,
    #[arg(long, value_delimiter = ',')]
    fractions: Option<Vec<f64>>,
    #[arg(long, default_value_t = 5_000)]
    trials: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    workers: usize,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct ResArgs {
    #[arg(long, value_delimiter = ',', default_value = "1e-6,1e-15")]
    targets: Vec<f64>,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    #[arg(long, default_value_t = DEFAULT_FIXED_ETA)]
    eta: f64,
    #[command(flatten)]
    out: OutArgs,
}

enum Failure {
    Lib(Error),
    NoCrossing(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn trial_config(r: &RunArgs) -> Result<TrialConfig, Error> {
    let d = ErrorLocationConfig::default();
    let events = ErrorLocationConfig::new(
        r.events_single.unwrap_or(d.n_single_events),
        r.events_creation.unwrap_or(d.creation_events_per_qubit),
        r.events_connection.unwrap_or(d.connection_events_per_qubit),
        r.events_entangling_rate
            .map_or(d.use_entangling_rate, |x| matches!(x, Rate::Entangling)),
    );
    Ok(TrialConfig::new(&r.distances, r.trials, r.seed)?
        .with_events(events)
        .with_workers(r.workers))
}

fn config_json(cfg: &TrialConfig, extra: serde_json::Value) -> serde_json::Value {
    json!({
        "distances": cfg.distances,
        "trials": cfg.trials,
        "seed": cfg.seed,
        "events": cfg.events,
        "params": extra,
    })
}

fn emit(m: &RunManifest, out: &OutArgs) -> Result<(), Error> {
    let format = match out.format {
        Format::Csv => OutputFormat::Csv,
        Format::Json => OutputFormat::Json,
    };
    match &out.out {
        Some(dir) => {
            for p in write_run(dir, m, format)? {
                eprintln!("wrote {}", p.display());
            }
        }
        None => match format {
            OutputFormat::Csv => write_csv(std::io::stdout().lock(), &m.run_id, &m.rows)?,
            OutputFormat::Json => {
                println!(
                    "{}",
                    serde_json::to_string_pretty(m).map_err(|e| Error::Io(e.to_string()))?
                )
            }
        },
    }
    Ok(())
}

fn summarise(v: &impl serde::Serialize) -> serde_json::Value {
    serde_json::to_value(v).unwrap_or(serde_json::Value::Null)
}

fn simulate(a: &SimArgs) -> Result<(), Failure> {
    let cfg = trial_config(&a.run)?;
    let points: Vec<Point> = match &a.pz_list {
        Some(list) => list
            .iter()
            .map(|&pz| Point::knob(pz, a.alpha, a.eta))
            .collect::<Result<_, _>>()?,
        None => vec![Point::physical(a.alpha, a.eta)?],
    };
    let extra = json!({"alpha": a.alpha, "eta": a.eta, "pz_list": a.pz_list});
    let mut m = RunManifest::new("simulate", cfg.seed, config_json(&cfg, extra));
    for &d in &cfg.distances {
        for p in &points {
            m.rows.push(estimate_logical_rate(d, p, &cfg)?);
        }
    }
    emit(&m, &a.run.out)?;
    Ok(())
}

fn threshold(a: &SimArgs) -> Result<(), Failure> {
    let cfg = trial_config(&a.run)?;
    let grid = a.pz_list.clone().unwrap_or_else(default_pz_grid);
    let extra = json!({"alpha": a.alpha, "eta_for_pf": a.eta, "pz_list": grid});
    let mut m = RunManifest::new("threshold", cfg.seed, config_json(&cfg, extra));
    let r = threshold_sweep(&cfg, a.alpha, a.eta, &grid)?;
    m.rows = r.points.clone();
    m.summary = json!({"crossing": r.crossing, "no_crossing": r.no_crossing, "eta_th": r.eta_th});
    emit(&m, &a.run.out)?;
    match (&r.crossing, r.eta_th) {
        (Some(c), Some(eta)) => {
            eprintln!(
                "p_Z,th = {:.4e} [{:.4e}, {:.4e}], eta_th = {:.4e}",
                c.estimate, c.ci_low, c.ci_high, eta
            );
            Ok(())
        }
        _ => Err(Failure::NoCrossing(r.no_crossing.unwrap_or_default())),
    }
}

fn sweep_alpha(a: &SweepArgs) -> Result<(), Failure> {
    let cfg = trial_config(&a.run)?;
    let grid = a.pz_list.clone().unwrap_or_else(alpha_sweep_pz_grid);
    let extra = json!({"alphas": a.alphas, "eta_for_pf": a.eta, "pz_list": grid});
    let mut m = RunManifest::new("sweep-alpha", cfg.seed, config_json(&cfg, extra));
    let rows = alpha_sweep(&cfg, &a.alphas, a.eta, &grid)?;
    m.rows = rows.iter().flat_map(|r| r.points.clone()).collect();
    m.summary = json!(rows
        .iter()
        .map(|r| json!({"alpha": r.alpha, "eta_th": r.eta_th, "crossing": r.crossing, "no_crossing": r.no_crossing}))
        .collect::<Vec<_>>());
    emit(&m, &a.run.out)?;
    for r in &rows {
        match r.eta_th {
            Some(e) => eprintln!("alpha = {:<6} eta_th = {:.4e}", r.alpha, e),
            None => eprintln!("alpha = {:<6} no crossing", r.alpha),
        }
    }
    Ok(())
}

fn percolation(a: &PercArgs) -> Result<(), Failure> {
    let ds = a
        .distances
        .iter()
        .map(|&d| Distance::new(d))
        .collect::<Result<Vec<_>, _>>()?;
    let fractions = a
        .fractions
        .clone()
        .unwrap_or_else(|| (21..30).map(|i| f64::from(i) / 100.0).collect());
    let cfg = json!({"distances": a.distances, "fractions": fractions, "trials": a.trials, "seed": a.seed});
    let mut m = RunManifest::new("percolation", a.seed, cfg);
    let r = percolation_threshold(&ds, &fractions, a.trials, a.seed, a.workers)?;
    m.summary = summarise(&r);
    match &a.out.out {
        Some(dir) => {
            for p in write_run(dir, &m, OutputFormat::Json)? {
                eprintln!("wrote {}", p.display());
            }
        }
        None => {
            println!("d,fraction,trials,wraps");
            for p in &r.points {
                println!("{},{},{},{}", p.d, p.fraction, p.trials, p.wraps);
            }
        }
    }
    match r.crossing {
        Some(c) => {
            eprintln!(
                "critical fraction = {:.4} [{:.4}, {:.4}]",
                c.estimate, c.ci_low, c.ci_high
            );
            Ok(())
        }
        None => Err(Failure::NoCrossing(r.no_crossing.unwrap_or_default())),
    }
}

fn resources(a: &ResArgs) -> Result<(), Failure> {
    let rows = resource_report(&a.targets, a.alpha, a.eta)?;
    let mut m = RunManifest::new(
        "resources",
        0,
        json!({"targets": a.targets, "alpha": a.alpha, "eta": a.eta}),
    );
    m.summary = summarise(&rows);
    match &a.out.out {
        Some(dir) => {
            for p in write_run(dir, &m, OutputFormat::Json)? {
                eprintln!("wrote {}", p.display());
            }
        }
        None => {
            println!("target_pl,htqc_d,htqc_n,tpqc_comp_d,tpqc_comp_n,tpqc_loss_d,tpqc_loss_n,mqqc_bell_z,mqqc_bell_z_prime");
            for r in &rows {
                println!(
                    "{},{},{:.4e},{},{:.4e},{},{:.4e},{},{}",
                    r.target_pl,
                    r.htqc_d,
                    r.htqc_n,
                    r.tpqc_comp_d,
                    r.tpqc_comp_n,
                    r.tpqc_loss_d,
                    r.tpqc_loss_n,
                    r.mqqc_bell_z,
                    r.mqqc_bell_z_prime
                );
            }
        }
    }
    Ok(())
}

fn oracle_verify(a: &OutArgs) -> Result<bool, Failure> {
    let checks = run_cross_checks()?;
    let all = checks.iter().all(|c| c.pass);
    let mut m = RunManifest::new("oracle-verify", 0, json!({}));
    m.summary = summarise(&checks);
    match &a.out {
        Some(dir) => {
            for p in write_run(dir, &m, OutputFormat::Json)? {
                eprintln!("wrote {}", p.display());
            }
        }
        None => {
            for c in &checks {
                println!(
                    "{} {:<48} expected {:.12e} observed {:.12e}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.expected,
                    c.observed
                );
            }
        }
    }
    eprintln!(
        "{} of {} checks passed",
        checks.iter().filter(|c| c.pass).count(),
        checks.len()
    );
    Ok(all)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.cmd {
        Cmd::Simulate(a) => simulate(a),
        Cmd::Threshold(a) => threshold(a),
        Cmd::SweepAlpha(a) => sweep_alpha(a),
        Cmd::Percolation(a) => percolation(a),
        Cmd::Resources(a) => resources(a),
        Cmd::OracleVerify(a) => match oracle_verify(a) {
            Ok(true) => Ok(()),
            Ok(false) => return ExitCode::FAILURE,
            Err(e) => Err(e),
        },
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::NoCrossing(m)) => {
            eprintln!("no crossing in range: {m}");
            ExitCode::from(EXIT_NO_CROSSING)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            match e {
                Error::Io(_) => ExitCode::FAILURE,
                _ => ExitCode::from(EXIT_INVALID),
            }
        }
    }
}
