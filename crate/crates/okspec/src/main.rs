use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use okspec::config::{NormChoice, OrderChoice};
use okspec::error::{RunError, Stage};
use okspec::formats;
use okspec::runner;
use okspec::{ExperimentConfig, Overrides};
use okspec_core::okounkov::{filtered_cdf, BodyOptions};

#[derive(Parser)]
#[command(name = "okspec", version, about = "Slopes, polygons and limit laws of graded normed spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Shared {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Drop scheduled levels above this value.
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long, value_enum)]
    order: Option<OrderChoice>,
    #[arg(long, value_enum)]
    norm: Option<NormChoice>,
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline; writes the artifact bundle.
    Run(Shared),
    /// Slopes of a Gram pair (`--input`) or of every configured level.
    Spectrum {
        #[arg(long, conflicts_with = "config")]
        input: Option<PathBuf>,
        #[command(flatten)]
        shared: Shared,
    },
    /// Normalized polygons of a Gram pair (`--input`) or of every configured level.
    Polygon {
        #[arg(long, conflicts_with = "config")]
        input: Option<PathBuf>,
        #[command(flatten)]
        shared: Shared,
    },
    /// Limit law of a value table (`--input`, CSV `n,α..,value`) or the
    /// value tables of the configured levels.
    Okounkov {
        #[arg(long, conflicts_with = "config")]
        input: Option<PathBuf>,
        /// Levels below this are ignored when forming hulls.
        #[arg(long, default_value_t = 1)]
        n_min: usize,
        #[arg(long, default_value_t = 64)]
        t_points: usize,
        #[arg(long, allow_negative_numbers = true)]
        t_min: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        t_max: Option<f64>,
        #[command(flatten)]
        shared: Shared,
    },
    /// Exact report for an ultrametric pair of norm trees (JSON).
    Ultra {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convergence report of the configured experiment.
    Converge(Shared),
}

fn read(path: &PathBuf) -> Result<String, RunError> {
    std::fs::read_to_string(path).map_err(|e| RunError::config(Stage::Input, format!("{}: {e}", path.display())))
}

fn load(shared: &Shared) -> Result<ExperimentConfig, RunError> {
    let path = shared.config.as_ref().ok_or_else(|| RunError::config(Stage::Config, "--config is required"))?;
    let mut cfg = ExperimentConfig::load(path)?;
    cfg.apply(&Overrides {
        out: shared.out.clone(),
        seed: shared.seed,
        n_max: shared.n_max,
        order: shared.order,
        norm: shared.norm,
    });
    Ok(cfg)
}

/// Writes `bytes` to `dir/name` when a directory is given, else to stdout.
fn emit(out: Option<&PathBuf>, name: &str, bytes: &[u8]) -> Result<(), RunError> {
    match out {
        Some(dir) => {
            let err = |e: std::io::Error| RunError::config(Stage::Output, format!("{}: {e}", dir.display()));
            std::fs::create_dir_all(dir).map_err(err)?;
            std::fs::write(dir.join(name), bytes).map_err(err)
        }
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| RunError::config(Stage::Output, e.to_string())),
    }
}

fn csv_rows(header: &[&str], rows: Vec<Vec<String>>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

fn pair_from(input: &PathBuf) -> Result<okspec_core::HermitianPair, RunError> {
    formats::read_gram_pair(&read(input)?).map_err(|e| RunError::config(Stage::Input, e))
}

fn experiment(shared: &Shared) -> Result<okspec::Experiment, RunError> {
    // Subcommands other than `run` print to stdout unless --out is given, so
    // the config's own output directory is not used here.
    let mut cfg = load(shared)?;
    cfg.out = None;
    runner::compute(&cfg)
}

fn dispatch(cmd: Command) -> Result<(), RunError> {
    match cmd {
        Command::Run(shared) => {
            let cfg = load(&shared)?;
            if cfg.out.is_none() {
                return Err(RunError::config(Stage::Config, "an output directory is required (--out or config `out`)"));
            }
            let bundle = runner::run(&cfg)?;
            eprintln!("bundle {}", bundle.hash());
            Ok(())
        }
        Command::Spectrum { input: Some(input), shared } => {
            let pair = pair_from(&input)?;
            let s = pair.relative_spectrum().map_err(|e| RunError::numerical(Stage::Spectrum { n: 0, kind: "gram".into() }, e))?;
            let rows = s.slopes().iter().enumerate().map(|(i, m)| vec![i.to_string(), format!("{m:?}")]).collect();
            emit(shared.out.as_ref(), "spectra.csv", &csv_rows(&["index", "slope"], rows))
        }
        Command::Spectrum { input: None, shared } => {
            let exp = experiment(&shared)?;
            emit(shared.out.as_ref(), "spectra.csv", &runner::spectra_csv(&exp))
        }
        Command::Polygon { input: Some(input), shared } => {
            let pair = pair_from(&input)?;
            let p = pair.polygon().map_err(|e| RunError::numerical(Stage::Spectrum { n: 0, kind: "gram".into() }, e))?;
            let r = p.rank();
            let rows = p
                .breakpoints()
                .iter()
                .enumerate()
                .map(|(i, b)| vec![i.to_string(), format!("{:?}", i as f64 / r as f64), format!("{b:?}")])
                .collect();
            emit(shared.out.as_ref(), "polygons.csv", &csv_rows(&["rank", "t", "polygon"], rows))
        }
        Command::Polygon { input: None, shared } => {
            let exp = experiment(&shared)?;
            emit(shared.out.as_ref(), "polygons.csv", &runner::polygons_csv(&exp))
        }
        Command::Okounkov { input: Some(input), n_min, t_points, t_min, t_max, shared } => {
            let (sample, table) = formats::read_value_table(&read(&input)?).map_err(|e| RunError::config(Stage::Input, e))?;
            let ratios: Vec<f64> = (1..=sample.n_max())
                .flat_map(|n| table.level(n).iter().map(move |v| v / n as f64))
                .collect();
            let lo = t_min.unwrap_or_else(|| ratios.iter().copied().fold(f64::INFINITY, f64::min));
            let hi = t_max.unwrap_or_else(|| ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max));
            if !(lo.is_finite() && hi.is_finite() && hi >= lo) || t_points < 2 {
                return Err(RunError::config(Stage::Input, "needs a non-empty t-range and at least two t-points"));
            }
            let grid: Vec<f64> = (0..t_points).map(|i| lo + (hi - lo) * i as f64 / (t_points - 1) as f64).collect();
            let opts = BodyOptions { n_min, seed: shared.seed.unwrap_or(BodyOptions::default().seed), ..BodyOptions::default() };
            let f = filtered_cdf(&sample, &table, &grid, &opts).map_err(|e| RunError::numerical(Stage::Okounkov, e))?;
            let rows = f
                .t
                .iter()
                .zip(&f.f)
                .map(|(&t, &s)| vec![format!("{t:?}"), format!("{s:?}"), format!("{:?}", f.cdf(t))])
                .collect();
            emit(shared.out.as_ref(), "cdf.csv", &csv_rows(&["t", "survival", "cdf"], rows))
        }
        Command::Okounkov { input: None, shared, .. } => {
            let exp = experiment(&shared)?;
            emit(shared.out.as_ref(), "values.csv", &runner::values_csv(&exp))
        }
        Command::Ultra { input, out } => {
            let report = formats::ultra_report(&read(&input)?).map_err(|e| match e {
                formats::UltraError::Input(m) => RunError::config(Stage::Input, m),
                formats::UltraError::Numerical(m) => RunError::numerical(Stage::Input, m),
            })?;
            let mut bytes = serde_json::to_vec_pretty(&report).expect("JSON serializes");
            bytes.push(b'\n');
            emit(out.as_ref(), "ultra.json", &bytes)
        }
        Command::Converge(shared) => {
            let exp = experiment(&shared)?;
            let mut bytes = serde_json::to_vec_pretty(&runner::report_json(&exp)).expect("JSON serializes");
            bytes.push(b'\n');
            emit(shared.out.as_ref(), "report.json", &bytes)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("okspec: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
