//! Budgeted optimizers over a pre-evaluated table.
//!
//! Every optimizer sees the table only through an [`Oracle`]: independent
//! columns are always visible, goal values only after a row has been labeled, and
//! each new label spends one unit of budget.

use std::time::Instant;

use rand::seq::index;
use rand::Rng;

use crate::bayes;
use crate::error::{Error, Result};
use crate::rank::{GoalView, Ranking};
use crate::table::{Kind, Table, XSpace};

/// Random labels taken before the first model is trained.
pub const LITE_WARMUP: usize = 4;
/// Unlabeled rows scored per acquisition step.
pub const LITE_CANDIDATES: usize = 64;

pub trait Oracle {
    fn space(&self) -> &XSpace;
    fn goal_weights(&self) -> &[f64];
    fn budget(&self) -> usize;
    fn spent(&self) -> usize;
    fn is_labeled(&self, row: usize) -> bool;
    /// Reveals a row's goals. Costs one unit unless the row is already labeled.
    fn label(&mut self, row: usize) -> Result<()>;
    /// Goal values of a labeled row.
    fn goals(&self, row: usize) -> Result<&[f64]>;
    /// Labeled rows in the order they were labeled.
    fn history(&self) -> &[usize];

    fn remaining(&self) -> usize {
        self.budget() - self.spent()
    }

    fn rows(&self) -> usize {
        self.space().len()
    }
}

/// A table prepared for optimization: independent-column space, goal vectors,
/// and the global ranking used to score results.
#[derive(Debug, Clone)]
pub struct Problem {
    pub name: String,
    pub space: XSpace,
    pub weights: Vec<f64>,
    goals: Vec<Vec<f64>>,
    pub ranking: Ranking,
}

impl Problem {
    pub fn new(t: &Table) -> Result<Problem> {
        t.check_optimizable()?;
        let goals = (0..t.len())
            .map(|r| t.goal_vector(r).ok_or(Error::UnlabeledRow(r)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Problem {
            name: t.name.clone(),
            space: XSpace::new(t),
            weights: t.goal_weights(),
            ranking: Ranking::of_table(t)?,
            goals,
        })
    }

    pub fn len(&self) -> usize {
        self.goals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.goals.is_empty()
    }

    /// Goal vector of any row. Not reachable from inside an optimizer.
    pub fn goals_of(&self, row: usize) -> &[f64] {
        &self.goals[row]
    }

    pub fn run(&self, cfg: &RunConfig, seed: u64) -> Result<RunResult> {
        let mut ledger = Ledger::new(self, cfg.budget)?;
        let start = Instant::now();
        let best = optimize(&mut ledger, cfg, seed)?;
        let wall_ms = start.elapsed().as_secs_f64() * 1e3;
        Ok(RunResult {
            best_row: best,
            d2h: self.ranking.d2h(best).expect("every row is ranked"),
            labels_spent: ledger.spent(),
            wall_ms,
            seed,
            algo: cfg.algo,
            history: ledger.history,
        })
    }
}

/// The standard oracle: a label ledger over a [`Problem`].
#[derive(Debug, Clone)]
pub struct Ledger<'a> {
    problem: &'a Problem,
    budget: usize,
    labeled: Vec<bool>,
    history: Vec<usize>,
}

impl<'a> Ledger<'a> {
    pub fn new(problem: &'a Problem, budget: usize) -> Result<Ledger<'a>> {
        if budget > problem.len() {
            return Err(Error::BudgetExceedsTable {
                budget,
                rows: problem.len(),
            });
        }
        Ok(Ledger {
            problem,
            budget,
            labeled: vec![false; problem.len()],
            history: Vec::new(),
        })
    }
}

impl Oracle for Ledger<'_> {
    fn space(&self) -> &XSpace {
        &self.problem.space
    }

    fn goal_weights(&self) -> &[f64] {
        &self.problem.weights
    }

    fn budget(&self) -> usize {
        self.budget
    }

    fn spent(&self) -> usize {
        self.history.len()
    }

    fn is_labeled(&self, row: usize) -> bool {
        self.labeled[row]
    }

    fn label(&mut self, row: usize) -> Result<()> {
        if self.labeled[row] {
            return Ok(());
        }
        if self.history.len() >= self.budget {
            return Err(Error::BudgetExhausted);
        }
        self.labeled[row] = true;
        self.history.push(row);
        Ok(())
    }

    fn goals(&self, row: usize) -> Result<&[f64]> {
        if !self.labeled[row] {
            return Err(Error::UnlabeledRow(row));
        }
        Ok(&self.problem.goals[row])
    }

    fn history(&self) -> &[usize] {
        &self.history
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algo {
    Lite,
    Random,
    Dehb,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Lite => "lite",
            Algo::Random => "random",
            Algo::Dehb => "dehb",
        }
    }
}

impl std::str::FromStr for Algo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Algo> {
        match s {
            "lite" => Ok(Algo::Lite),
            "random" => Ok(Algo::Random),
            "dehb" => Ok(Algo::Dehb),
            other => Err(Error::InvalidArgument(format!("unknown algorithm '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum QMode {
    #[default]
    Explore,
    Exploit,
    Adapt,
}

impl QMode {
    pub fn q(self, labeled: usize, budget: usize) -> f64 {
        match self {
            QMode::Exploit => 0.0,
            QMode::Explore => 1.0,
            QMode::Adapt => 1.0 - labeled as f64 / budget as f64,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            QMode::Explore => "explore",
            QMode::Exploit => "exploit",
            QMode::Adapt => "adapt",
        }
    }
}

impl std::str::FromStr for QMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<QMode> {
        match s {
            "explore" => Ok(QMode::Explore),
            "exploit" => Ok(QMode::Exploit),
            "adapt" => Ok(QMode::Adapt),
            other => Err(Error::InvalidArgument(format!("unknown q mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeParams {
    pub population: usize,
    pub mutation: f64,
    pub crossover: f64,
    pub eta: usize,
}

impl Default for DeParams {
    fn default() -> Self {
        DeParams {
            population: 20,
            mutation: 0.5,
            crossover: 0.9,
            eta: 2,
        }
    }
}

impl DeParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.mutation >= 0.0 && self.mutation <= 2.0) {
            return Err(Error::InvalidArgument(format!("mutation factor {} outside [0, 2]", self.mutation)));
        }
        if !(0.0..=1.0).contains(&self.crossover) {
            return Err(Error::InvalidArgument(format!("crossover rate {} outside [0, 1]", self.crossover)));
        }
        if self.eta < 2 {
            return Err(Error::InvalidArgument(format!("halving factor {} below 2", self.eta)));
        }
        if self.population < 4 {
            return Err(Error::InvalidArgument(format!("population {} below 4", self.population)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub algo: Algo,
    pub budget: usize,
    pub q: QMode,
    pub de: DeParams,
}

impl RunConfig {
    pub fn new(algo: Algo, budget: usize) -> RunConfig {
        RunConfig {
            algo,
            budget,
            q: QMode::default(),
            de: DeParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub best_row: usize,
    pub d2h: f64,
    pub labels_spent: usize,
    pub wall_ms: f64,
    pub seed: u64,
    pub algo: Algo,
    /// Rows in labeling order.
    pub history: Vec<usize>,
}

/// Runs the configured optimizer against any oracle; returns the chosen row.
pub fn optimize<O: Oracle>(o: &mut O, cfg: &RunConfig, seed: u64) -> Result<usize> {
    if cfg.budget > o.rows() {
        return Err(Error::BudgetExceedsTable {
            budget: cfg.budget,
            rows: o.rows(),
        });
    }
    let mut rng = crate::seeded_rng(seed);
    match cfg.algo {
        Algo::Lite => lite(o, cfg.q, &mut rng),
        Algo::Random => random_search(o, &mut rng),
        Algo::Dehb => dehb_lite(o, &cfg.de, &mut rng),
    }
}

/// Unlabeled row ids with O(1) removal.
struct Pool {
    ids: Vec<usize>,
    at: Vec<usize>,
}

impl Pool {
    fn unlabeled<O: Oracle>(o: &O) -> Pool {
        let ids: Vec<usize> = (0..o.rows()).filter(|&r| !o.is_labeled(r)).collect();
        let mut at = vec![usize::MAX; o.rows()];
        for (k, &r) in ids.iter().enumerate() {
            at[r] = k;
        }
        Pool { ids, at }
    }

    fn len(&self) -> usize {
        self.ids.len()
    }

    fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    fn remove(&mut self, row: usize) {
        let k = self.at[row];
        if k == usize::MAX {
            return;
        }
        let last = *self.ids.last().unwrap();
        self.ids.swap_remove(k);
        if last != row {
            self.at[last] = k;
        }
        self.at[row] = usize::MAX;
    }

    fn take_random<R: Rng>(&mut self, rng: &mut R) -> Option<usize> {
        if self.ids.is_empty() {
            return None;
        }
        let row = self.ids[rng.gen_range(0..self.ids.len())];
        self.remove(row);
        Some(row)
    }

    fn sample<R: Rng>(&self, rng: &mut R, n: usize) -> Vec<usize> {
        let n = n.min(self.ids.len());
        let mut picked: Vec<usize> = index::sample(rng, self.ids.len(), n)
            .into_iter()
            .map(|k| self.ids[k])
            .collect();
        picked.sort_unstable();
        picked
    }

    /// Nearest unlabeled row to a point; ties go to the lower row index.
    fn nearest(&self, space: &XSpace, point: &[f64]) -> Option<usize> {
        let mut best: Option<(f64, usize)> = None;
        for &r in &self.ids {
            let d = space.dist_to(point, r);
            match best {
                Some((bd, br)) if d > bd || (d == bd && r > br) => {}
                _ => best = Some((d, r)),
            }
        }
        best.map(|(_, r)| r)
    }
}

/// Labels a row and widens the run's goal ranges to include it.
fn reveal<O: Oracle>(o: &mut O, view: &mut GoalView, row: usize) -> Result<()> {
    o.label(row)?;
    view.observe(o.goals(row)?);
    Ok(())
}

/// Ranks labeled rows best-first using ranges seen so far in this run.
fn rank_labeled<O: Oracle>(o: &O, view: &GoalView, rows: &[usize]) -> Result<Vec<usize>> {
    let goals = rows.iter().map(|&r| o.goals(r)).collect::<Result<Vec<_>>>()?;
    Ok(view.rank(&goals).into_iter().map(|k| rows[k]).collect())
}

/// Ranked in row order, so an exhaustive run reproduces the global ranking.
fn best_labeled<O: Oracle>(o: &O, view: &GoalView) -> Result<usize> {
    let mut labeled = o.history().to_vec();
    labeled.sort_unstable();
    rank_labeled(o, view, &labeled)?
        .first()
        .copied()
        .ok_or(Error::InsufficientRows)
}

/// Active learner: split labeled rows into sqrt(M) best and the rest, model
/// both with naive Bayes, and label the candidate maximizing the acquisition score.
pub fn lite<O: Oracle, R: Rng>(o: &mut O, q: QMode, rng: &mut R) -> Result<usize> {
    let budget = o.budget();
    if budget < LITE_WARMUP + 1 {
        return Err(Error::InvalidArgument(format!(
            "lite needs a budget of at least {}, got {budget}",
            LITE_WARMUP + 1
        )));
    }
    if budget > o.rows() {
        return Err(Error::BudgetExceedsTable { budget, rows: o.rows() });
    }
    let mut view = GoalView::empty(o.goal_weights());
    let mut pool = Pool::unlabeled(o);
    while o.spent() < LITE_WARMUP {
        let Some(row) = pool.take_random(rng) else { break };
        reveal(o, &mut view, row)?;
    }
    while o.spent() < budget && !pool.is_empty() {
        let labeled = o.history().to_vec();
        let order = rank_labeled(o, &view, &labeled)?;
        let m = order.len();
        let n_best = ((m as f64).sqrt().ceil() as usize).clamp(1, m - 1);
        let stats = bayes::train(o.space(), &order[..n_best], &order[n_best..])?;
        let q = q.q(m, budget);
        let mut pick: Option<(f64, usize)> = None;
        for c in pool.sample(rng, LITE_CANDIDATES) {
            let (b, r) = stats.best_rest(o.space().row(c));
            let score = bayes::acquire(b, r, q);
            if pick.is_none_or(|(s, _)| score > s) {
                pick = Some((score, c));
            }
        }
        let (_, row) = pick.expect("pool is non-empty");
        pool.remove(row);
        reveal(o, &mut view, row)?;
    }
    best_labeled(o, &view)
}

/// Labels `budget` distinct rows uniformly at random and keeps the best.
pub fn random_search<O: Oracle, R: Rng>(o: &mut O, rng: &mut R) -> Result<usize> {
    let budget = o.budget();
    if budget == 0 {
        return Err(Error::InvalidArgument("random search needs a budget of at least 1".into()));
    }
    if budget > o.rows() {
        return Err(Error::BudgetExceedsTable { budget, rows: o.rows() });
    }
    let mut view = GoalView::empty(o.goal_weights());
    let pool = Pool::unlabeled(o);
    let want = o.remaining().min(pool.len());
    for row in pool.sample(rng, want) {
        reveal(o, &mut view, row)?;
    }
    best_labeled(o, &view)
}

/// A population slot: its row and how many trial comparisons it has come through.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Member {
    pub row: usize,
    pub survived: usize,
}

enum Flow {
    Continue,
    Stop,
}

/// Bracketed differential evolution with successive halving at a single fidelity.
///
/// The first bracket starts from `population` random rows. Each rung evolves every
/// member once (mutant `a + F(b - c)`, binomial crossover against the parent,
/// snapped to the nearest unlabeled row) and then keeps the best `1/eta` of the
/// rung. Later brackets restart from the best labeled rows found so far.
pub fn dehb_lite<O: Oracle, R: Rng>(o: &mut O, p: &DeParams, rng: &mut R) -> Result<usize> {
    p.validate()?;
    let budget = o.budget();
    if budget < 2 * p.population {
        return Err(Error::BudgetTooSmall {
            budget,
            needed: 2 * p.population,
        });
    }
    if budget > o.rows() {
        return Err(Error::BudgetExceedsTable { budget, rows: o.rows() });
    }
    let mut view = GoalView::empty(o.goal_weights());
    let mut pool = Pool::unlabeled(o);
    let mut population = Vec::with_capacity(p.population);
    while population.len() < p.population {
        let Some(row) = pool.take_random(rng) else { break };
        reveal(o, &mut view, row)?;
        population.push(Member { row, survived: 0 });
    }

    'brackets: loop {
        let mut rung = population.clone();
        while rung.len() >= 4 {
            if let Flow::Stop = evolve(o, &mut view, &mut pool, &mut rung, p, rng)? {
                break 'brackets;
            }
            let rows: Vec<usize> = rung.iter().map(|m| m.row).collect();
            let order = rank_labeled(o, &view, &rows)?;
            let keep = rung.len().div_ceil(p.eta);
            rung = order[..keep]
                .iter()
                .map(|&r| *rung.iter().find(|m| m.row == r).unwrap())
                .collect();
        }
        if o.remaining() == 0 || pool.is_empty() {
            break;
        }
        let labeled = o.history().to_vec();
        population = rank_labeled(o, &view, &labeled)?
            .into_iter()
            .take(p.population)
            .map(|row| Member { row, survived: 0 })
            .collect();
    }
    best_labeled(o, &view)
}

/// One DE generation over `rung`. Mutation draws from the population as it
/// stood at the start of the generation.
fn evolve<O: Oracle, R: Rng>(
    o: &mut O,
    view: &mut GoalView,
    pool: &mut Pool,
    rung: &mut [Member],
    p: &DeParams,
    rng: &mut R,
) -> Result<Flow> {
    let parents: Vec<Member> = rung.to_vec();
    for idx in 0..parents.len() {
        if o.remaining() == 0 || pool.is_empty() {
            return Ok(Flow::Stop);
        }
        let x = parents[idx];
        let picks = index::sample(rng, parents.len() - 1, 3).into_vec();
        let [a, b, c] = [0, 1, 2].map(|k| {
            let j = picks[k];
            parents[if j >= idx { j + 1 } else { j }].row
        });
        let space = o.space();
        let point = de_trial(space, [x.row, a, b, c], p, rng);
        let Some(trial) = pool.nearest(space, &point) else {
            return Ok(Flow::Stop);
        };
        pool.remove(trial);
        reveal(o, view, trial)?;
        let wins = view.better(o.goals(trial)?, o.goals(x.row)?);
        rung[idx] = if wins {
            Member {
                row: trial,
                survived: x.survived + 1,
            }
        } else {
            Member {
                survived: x.survived + 1,
                ..x
            }
        };
    }
    Ok(Flow::Continue)
}

/// Mutant `a + F(b - c)` crossed with parent `x`, in normalized column space.
pub(crate) fn de_trial<R: Rng>(space: &XSpace, [x, a, b, c]: [usize; 4], p: &DeParams, rng: &mut R) -> Vec<f64> {
    let (xr, ar, br, cr) = (space.row(x), space.row(a), space.row(b), space.row(c));
    let width = space.width();
    let forced = rng.gen_range(0..width.max(1));
    (0..width)
        .map(|k| match space.kind(k) {
            Kind::Numeric => {
                let take = rng.gen::<f64>() < p.crossover || k == forced;
                let (va, vb, vc) = (ar[k], br[k], cr[k]);
                if !take || va.is_nan() || vb.is_nan() || vc.is_nan() {
                    xr[k]
                } else {
                    (va + p.mutation * (vb - vc)).clamp(0.0, 1.0)
                }
            }
            Kind::Symbolic => {
                if rng.gen::<f64>() < p.crossover {
                    ar[k]
                } else {
                    xr[k]
                }
            }
        })
        .collect()
}
