//! Experiment orchestration: paired-seed runs of every treatment on every
//! dataset, result files, and the reports built from them.

mod report;
pub mod synth;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::intrinsic::{recommend, CurveParams, GateDecision};
use crate::optim::{Algo, Problem, QMode, RunConfig};
use crate::rank::{GoalView, Ranking};
use crate::table::Table;

pub use report::{emit_report, gate_check, rank_tables, summary_markdown, summary_markdown_by, GateCheck};
pub use synth::{gen_rf_pool, rf_grid_size};

pub const DEFAULT_REPEATS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TreatmentKind {
    Optimizer(Algo, QMode),
    Baseline,
}

/// One optimizer at one budget, or the untreated baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Treatment {
    pub kind: TreatmentKind,
    pub budget: usize,
}

impl Treatment {
    pub fn lite(budget: usize) -> Treatment {
        Treatment {
            kind: TreatmentKind::Optimizer(Algo::Lite, QMode::Explore),
            budget,
        }
    }

    pub fn random(budget: usize) -> Treatment {
        Treatment {
            kind: TreatmentKind::Optimizer(Algo::Random, QMode::Explore),
            budget,
        }
    }

    pub fn dehb(budget: usize) -> Treatment {
        Treatment {
            kind: TreatmentKind::Optimizer(Algo::Dehb, QMode::Explore),
            budget,
        }
    }

    pub fn baseline() -> Treatment {
        Treatment {
            kind: TreatmentKind::Baseline,
            budget: 0,
        }
    }

    /// The comparison run by default: two lightweight optimizers at 30 labels,
    /// the heavyweight at 3000, and the untreated baseline.
    pub fn defaults() -> Vec<Treatment> {
        vec![
            Treatment::lite(30),
            Treatment::random(30),
            Treatment::dehb(3000),
            Treatment::baseline(),
        ]
    }

    /// `lite:30`, `lite:30:adapt`, `random:30`, `dehb:3000` or `baseline`.
    pub fn label(&self) -> String {
        match self.kind {
            TreatmentKind::Baseline => "baseline".to_string(),
            TreatmentKind::Optimizer(Algo::Lite, q) if q != QMode::Explore => {
                format!("lite:{}:{}", self.budget, q.name())
            }
            TreatmentKind::Optimizer(algo, _) => format!("{}:{}", algo.name(), self.budget),
        }
    }
}

impl FromStr for Treatment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Treatment> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let bad = || Error::InvalidArgument(format!("bad treatment '{s}'"));
        match parts.as_slice() {
            ["baseline"] => Ok(Treatment::baseline()),
            [algo, budget] | [algo, budget, _] => {
                let algo: Algo = algo.parse()?;
                let budget: usize = budget.parse().map_err(|_| bad())?;
                let q = match parts.get(2) {
                    Some(q) if algo == Algo::Lite => q.parse()?,
                    Some(_) => return Err(bad()),
                    None => QMode::Explore,
                };
                Ok(Treatment {
                    kind: TreatmentKind::Optimizer(algo, q),
                    budget,
                })
            }
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentPlan {
    pub datasets: Vec<PathBuf>,
    pub treatments: Vec<Treatment>,
    pub repeats: usize,
    pub base_seed: u64,
    /// Score each seed against the pooled rows every treatment evaluated,
    /// instead of against the whole table.
    pub pooled: bool,
    pub first_goal_only: bool,
    pub curve: CurveParams,
}

impl ExperimentPlan {
    pub fn new(datasets: Vec<PathBuf>) -> ExperimentPlan {
        ExperimentPlan {
            datasets,
            treatments: Treatment::defaults(),
            repeats: DEFAULT_REPEATS,
            base_seed: 1,
            pooled: false,
            first_goal_only: false,
            curve: CurveParams::default(),
        }
    }

    pub fn seeds(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.repeats as u64).map(|k| self.base_seed + k)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub dataset: String,
    pub treatment: String,
    pub seed: u64,
    pub labels: usize,
    pub d2h: f64,
    pub ms: f64,
}

pub const RESULTS_HEADER: &str = "dataset,treatment,seed,labels,d2h,ms";

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultsFile {
    pub records: Vec<Record>,
}

impl ResultsFile {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(RESULTS_HEADER);
        out.push('\n');
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{:.5},{:.3}",
                r.dataset, r.treatment, r.seed, r.labels, r.d2h, r.ms
            );
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<ResultsFile> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
            .filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, h)) if h.trim() == RESULTS_HEADER => {}
            _ => {
                return Err(Error::Parse {
                    line: 1,
                    message: format!("expected header '{RESULTS_HEADER}'"),
                })
            }
        }
        let records = lines
            .map(|(line, l)| {
                let c: Vec<&str> = l.split(',').map(str::trim).collect();
                let err = |m: &str| Error::Parse {
                    line,
                    message: m.to_string(),
                };
                if c.len() != 6 {
                    return Err(err("expected 6 cells"));
                }
                Ok(Record {
                    dataset: c[0].to_string(),
                    treatment: c[1].to_string(),
                    seed: c[2].parse().map_err(|_| err("bad seed"))?,
                    labels: c[3].parse().map_err(|_| err("bad label count"))?,
                    d2h: c[4].parse().map_err(|_| err("bad d2h"))?,
                    ms: c[5].parse().map_err(|_| err("bad ms"))?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ResultsFile { records })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<ResultsFile> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        ResultsFile::from_csv(&text)
    }

    /// Dataset names in first-appearance order.
    pub fn datasets(&self) -> Vec<&str> {
        let mut seen: Vec<&str> = Vec::new();
        for r in &self.records {
            if !seen.contains(&r.dataset.as_str()) {
                seen.push(&r.dataset);
            }
        }
        seen
    }

    /// Treatment labels for one dataset, in first-appearance order.
    pub fn treatments(&self, dataset: &str) -> Vec<&str> {
        let mut seen: Vec<&str> = Vec::new();
        for r in self.records.iter().filter(|r| r.dataset == dataset) {
            if !seen.contains(&r.treatment.as_str()) {
                seen.push(&r.treatment);
            }
        }
        seen
    }

    pub fn values(&self, dataset: &str, treatment: &str) -> Vec<f64> {
        self.records
            .iter()
            .filter(|r| r.dataset == dataset && r.treatment == treatment)
            .map(|r| r.d2h)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdRecord {
    pub dataset: String,
    pub gate: GateDecision,
}

pub const ID_HEADER: &str = "dataset,R,I,DRR,drr_gate,agrawal_gate";

pub fn id_csv(gates: &[IdRecord]) -> String {
    let mut out = String::from(ID_HEADER);
    out.push('\n');
    for g in gates {
        let _ = writeln!(
            out,
            "{},{},{:.3},{:.3},{},{}",
            g.dataset,
            g.gate.raw_dims,
            g.gate.intrinsic,
            g.gate.drr,
            GateDecision::verdict(g.gate.simple_by_drr),
            GateDecision::verdict(g.gate.simple_by_agrawal)
        );
    }
    out
}

#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub results: ResultsFile,
    pub gates: Vec<IdRecord>,
    /// (dataset, reason) for datasets that could not be used.
    pub failures: Vec<(String, String)>,
    pub warnings: Vec<String>,
}

struct Loaded {
    name: String,
    problem: Problem,
    runnable: Vec<usize>,
}

pub fn dataset_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Runs every (dataset, treatment, seed) triple. Records come back in plan order
/// (dataset, treatment, seed) whatever order the runs finish in.
pub fn run_experiment(plan: &ExperimentPlan) -> Outcome {
    let mut outcome = Outcome::default();
    if plan.repeats == 0 {
        outcome.warnings.push("repeats is 0; nothing to run".into());
        return outcome;
    }
    let mut loaded = Vec::new();
    for path in &plan.datasets {
        let name = dataset_name(path);
        let prepared = Table::from_path(path).and_then(|mut t| {
            if plan.first_goal_only {
                t.keep_first_goal();
            }
            let gate = recommend(&t, &plan.curve)?;
            Ok((gate, Problem::new(&t)?))
        });
        match prepared {
            Ok((gate, problem)) => {
                outcome.gates.push(IdRecord {
                    dataset: name.clone(),
                    gate,
                });
                let mut runnable = Vec::new();
                for (k, tr) in plan.treatments.iter().enumerate() {
                    if tr.budget > problem.len() {
                        outcome.warnings.push(format!(
                            "{name}: skipping {} (budget exceeds {} rows)",
                            tr.label(),
                            problem.len()
                        ));
                    } else {
                        runnable.push(k);
                    }
                }
                loaded.push(Loaded {
                    name,
                    problem,
                    runnable,
                });
            }
            Err(e) => outcome.failures.push((name, e.to_string())),
        }
    }

    let jobs: Vec<(usize, u64)> = (0..loaded.len())
        .flat_map(|d| plan.seeds().map(move |s| (d, s)))
        .collect();
    let batches: Vec<Result<Vec<(usize, usize, Record)>>> = jobs
        .par_iter()
        .map(|&(d, seed)| run_seed(&loaded[d], d, plan, seed))
        .collect();

    let mut rows = Vec::new();
    for batch in batches {
        match batch {
            Ok(b) => rows.extend(b),
            Err(e) => outcome.warnings.push(e.to_string()),
        }
    }
    rows.sort_by_key(|&(d, k, ref r)| (d, k, r.seed));
    outcome.results.records = rows.into_iter().map(|(_, _, r)| r).collect();
    outcome
}

/// All treatments of one dataset under one seed.
fn run_seed(ds: &Loaded, d: usize, plan: &ExperimentPlan, seed: u64) -> Result<Vec<(usize, usize, Record)>> {
    let mut out = Vec::new();
    let mut picks = Vec::new();
    for &k in &ds.runnable {
        let tr = &plan.treatments[k];
        let (best, labels, ms, seen) = match tr.kind {
            TreatmentKind::Baseline => {
                let row = crate::seeded_rng(seed).gen_range(0..ds.problem.len());
                (row, 0, 0.0, vec![row])
            }
            TreatmentKind::Optimizer(algo, q) => {
                let mut cfg = RunConfig::new(algo, tr.budget);
                cfg.q = q;
                let r = ds
                    .problem
                    .run(&cfg, seed)
                    .map_err(|e| Error::InvalidArgument(format!("{} {} seed {seed}: {e}", ds.name, tr.label())))?;
                (r.best_row, r.labels_spent, r.wall_ms, r.history)
            }
        };
        picks.push((k, best, seen));
        out.push((
            d,
            k,
            Record {
                dataset: ds.name.clone(),
                treatment: tr.label(),
                seed,
                labels,
                d2h: ds.problem.ranking.d2h(best).expect("row is ranked"),
                ms,
            },
        ));
    }
    if plan.pooled {
        let mut pool: Vec<usize> = picks.iter().flat_map(|(_, _, seen)| seen.iter().copied()).collect();
        pool.sort_unstable();
        pool.dedup();
        let goals: Vec<&[f64]> = pool.iter().map(|&r| ds.problem.goals_of(r)).collect();
        let view = GoalView::from_vectors(&ds.problem.weights, goals.iter().copied());
        let ranking = Ranking::build(&pool, &goals, &view);
        for ((_, _, rec), (_, best, _)) in out.iter_mut().zip(&picks) {
            rec.d2h = ranking.d2h(*best).expect("pick is pooled");
        }
    }
    Ok(out)
}
