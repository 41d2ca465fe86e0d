use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use drr::intrinsic::{recommend, CurveParams, GateDecision, DEFAULT_RADII, DEFAULT_SAMPLE_CAP};
use drr::metrics::{self, PRED_THRESHOLD};
use drr::optim::{Algo, Problem, QMode, RunConfig};
use drr::rig::{self, ExperimentPlan, ResultsFile, Treatment};
use drr::stats::{percentile, Direction};
use drr::table::Table;
use drr::{Error, Result};

#[derive(Parser)]
#[command(name = "drr", version, about = "Intrinsic dimensionality gate and budgeted table optimizers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate intrinsic dimension and report the gate verdicts.
    Id {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_RADII)]
        radii: usize,
        #[arg(long, default_value_t = DEFAULT_SAMPLE_CAP)]
        sample: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Run one optimizer on one table.
    Optimize {
        file: PathBuf,
        #[arg(long)]
        algo: Algo,
        #[arg(long)]
        budget: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "explore")]
        q: QMode,
    },
    /// Run every treatment on every table with paired seeds and write a report.
    Bench(BenchArgs),
    /// Rank the treatments in a results file.
    Stats {
        results: PathBuf,
        /// Rank larger values as better instead of smaller.
        #[arg(long)]
        larger_is_better: bool,
    },
    /// Score an `actual,predicted` file.
    Metrics {
        file: PathBuf,
        #[arg(long, default_value_t = PRED_THRESHOLD)]
        pred_threshold: f64,
    },
    /// Generate synthetic tables.
    #[command(subcommand)]
    Gen(Gen),
}

#[derive(Args)]
struct BenchArgs {
    #[arg(required = true)]
    files: Vec<PathBuf>,
    #[arg(long, default_value_t = rig::DEFAULT_REPEATS)]
    repeats: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Comma-separated treatments, e.g. `lite:30,random:30,dehb:3000,baseline`.
    #[arg(long, value_delimiter = ',')]
    treatments: Option<Vec<Treatment>>,
    /// Score against the rows any treatment labeled under the same seed.
    #[arg(long)]
    pooled: bool,
    /// Keep only the first goal column of each table.
    #[arg(long)]
    first_goal_only: bool,
}

#[derive(Subcommand)]
enum Gen {
    /// Sample the random-forest hyperparameter grid.
    RfPool {
        #[arg(long, default_value_t = 10_000)]
        rows: usize,
        #[arg(long, default_value_t = 2)]
        goals: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the synthetic benchmark suite into a directory.
    Suite {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Id { file, radii, sample, seed } => {
            let t = Table::from_path(&file)?;
            let params = CurveParams {
                radii,
                sample_cap: sample,
                seed,
                ..CurveParams::default()
            };
            let g = recommend(&t, &params)?;
            println!("R\t{}", g.raw_dims);
            println!("I\t{:.3}", g.intrinsic);
            println!("DRR\t{:.3}", g.drr);
            println!("drr_gate\t{}", GateDecision::verdict(g.simple_by_drr));
            println!("agrawal_gate\t{}", GateDecision::verdict(g.simple_by_agrawal));
        }
        Command::Optimize { file, algo, budget, seed, q } => {
            let t = Table::from_path(&file)?;
            let p = Problem::new(&t)?;
            let mut cfg = RunConfig::new(algo, budget);
            cfg.q = q;
            let r = p.run(&cfg, seed)?;
            println!("{}", t.header());
            let cells: Vec<String> = t.rows[r.best_row].cells.iter().map(|c| c.to_string()).collect();
            println!("{}", cells.join(","));
            println!("row\t{}", r.best_row);
            println!("d2h\t{:.5}", r.d2h);
            println!("labels\t{}", r.labels_spent);
            println!("ms\t{:.3}", r.wall_ms);
        }
        Command::Bench(b) => bench(b)?,
        Command::Stats { results, larger_is_better } => {
            let r = ResultsFile::read(&results)?;
            if r.records.is_empty() {
                return Err(Error::EmptyInput);
            }
            let direction = if larger_is_better {
                Direction::LargerIsBetter
            } else {
                Direction::SmallerIsBetter
            };
            print!("{}", rig::summary_markdown_by(&r, &[], direction)?);
        }
        Command::Metrics { file, pred_threshold } => {
            let text = std::fs::read_to_string(&file).map_err(|e| io_error(&file, e))?;
            let pairs = metrics::load_pairs(&text)?;
            let mres: Vec<f64> = pairs.iter().filter_map(|&p| metrics::mre(p).ok()).collect();
            println!("n\t{}", pairs.len());
            println!("mae\t{:.5}", metrics::mae(&pairs)?);
            match metrics::sa(&pairs) {
                Ok(v) => println!("sa\t{v:.3}"),
                Err(e) => println!("sa\tundefined ({e})"),
            }
            if mres.len() < pairs.len() {
                eprintln!("warning: {} pair(s) with actual 0 have no MRE", pairs.len() - mres.len());
            }
            match metrics::pred(&mres, pred_threshold) {
                Ok(v) => println!("pred({:.0})\t{v:.5}", pred_threshold * 100.0),
                Err(_) => println!("pred({:.0})\tundefined", pred_threshold * 100.0),
            }
            if !mres.is_empty() {
                println!(
                    "mre\tmin {:.5}\tmedian {:.5}\tmax {:.5}",
                    percentile(&mres, 0.0),
                    percentile(&mres, 0.5),
                    percentile(&mres, 1.0)
                );
            }
        }
        Command::Gen(Gen::RfPool { rows, goals, seed, out }) => {
            let p = rig::gen_rf_pool(rows, goals, seed)?;
            write(&out, p.table.emit())?;
        }
        Command::Gen(Gen::Suite { seed, out }) => {
            std::fs::create_dir_all(&out).map_err(|e| io_error(&out, e))?;
            for t in rig::synth::gen_suite(seed)? {
                write(&out.join(format!("{}.csv", t.name)), t.emit())?;
            }
            let pool = rig::gen_rf_pool(10_000, 2, seed)?;
            write(&out.join("rf_pool.csv"), pool.table.emit())?;
        }
    }
    Ok(())
}

fn bench(b: BenchArgs) -> Result<()> {
    let mut plan = ExperimentPlan::new(b.files);
    plan.repeats = b.repeats;
    plan.base_seed = b.seed;
    plan.pooled = b.pooled;
    plan.first_goal_only = b.first_goal_only;
    if let Some(t) = b.treatments {
        plan.treatments = t;
    }
    if plan.repeats == 0 {
        return Err(Error::InvalidArgument("repeats must be at least 1".into()));
    }
    let outcome = rig::run_experiment(&plan);
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    for (d, why) in &outcome.failures {
        eprintln!("failed: {d}: {why}");
    }
    rig::emit_report(&outcome, &b.out)?;
    println!(
        "{} records written to {}",
        outcome.results.records.len(),
        b.out.display()
    );
    Ok(())
}

fn write(path: &Path, body: String) -> Result<()> {
    std::fs::write(path, body).map_err(|e| io_error(path, e))
}

fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}
