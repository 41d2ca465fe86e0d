//! Synthetic tables: the random-forest hyperparameter pool and a small
//! benchmark suite with known latent structure.

use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};
use crate::table::{xdist, Cell, Row, Table};

pub const RF_CRITERIA: [&str; 4] = ["squared_error", "absolute_error", "friedman_mse", "poisson"];
const RF_ESTIMATORS: usize = 20;
const RF_LEAF: usize = 20;
const RF_IMPURITY: usize = 37;
const RF_DEPTH: usize = 20;

pub fn rf_grid_size() -> usize {
    RF_ESTIMATORS * RF_CRITERIA.len() * RF_LEAF * RF_IMPURITY * RF_DEPTH
}

/// The `i`-th grid configuration: estimators, criterion, leaf, impurity, depth.
pub fn rf_grid_point(i: usize) -> [Cell; 5] {
    let mut i = i;
    let mut next = |n: usize| {
        let v = i % n;
        i /= n;
        v
    };
    let est = next(RF_ESTIMATORS);
    let crit = next(RF_CRITERIA.len());
    let leaf = next(RF_LEAF);
    let imp = next(RF_IMPURITY);
    let depth = next(RF_DEPTH);
    [
        Cell::Num((1 + 10 * est) as f64),
        Cell::Sym(RF_CRITERIA[crit].to_string()),
        Cell::Num((1 + leaf) as f64),
        Cell::Num(1.0 + 0.25 * imp as f64),
        Cell::Num((1 + depth) as f64),
    ]
}

#[derive(Debug, Clone)]
pub struct RfPool {
    pub table: Table,
    /// Hidden optimum of each goal, as full rows of the table.
    pub targets: Vec<Row>,
}

/// Samples `rows` distinct grid configurations. Goal `j` is the distance to a
/// hidden grid point, minimized.
pub fn gen_rf_pool(rows: usize, goals: usize, seed: u64) -> Result<RfPool> {
    if rows == 0 || goals == 0 {
        return Err(Error::InvalidArgument("rf pool needs at least one row and one goal".into()));
    }
    if rows > rf_grid_size() {
        return Err(Error::TooManyRows {
            requested: rows,
            available: rf_grid_size(),
        });
    }
    let mut header: Vec<String> = [
        "N_estimators",
        "criterion",
        "Min_samples_leaf",
        "Min_impurity_decrease",
        "Max_depth",
    ]
    .map(String::from)
    .to_vec();
    header.extend((1..=goals).map(|j| format!("Dist{j}-")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();

    let mut rng = crate::seeded_rng(seed);
    let mut picks = index::sample(&mut rng, rf_grid_size(), rows).into_vec();
    picks.sort_unstable();
    let row_at = |i: usize| Row {
        cells: rf_grid_point(i)
            .into_iter()
            .chain(std::iter::repeat_n(Cell::Missing, goals))
            .collect(),
    };
    let targets: Vec<Row> = (0..goals).map(|_| row_at(rng.gen_range(0..rf_grid_size()))).collect();
    let mut table = Table::new("rf_pool", &header, picks.into_iter().map(row_at).collect())?;
    fill_goals(&mut table, &targets);
    Ok(RfPool { table, targets })
}

fn fill_goals(t: &mut Table, targets: &[Row]) {
    let values: Vec<Vec<f64>> = t
        .rows
        .iter()
        .map(|r| targets.iter().map(|g| xdist(r, g, t)).collect())
        .collect();
    let ys = t.y.clone();
    for (row, vals) in t.rows.iter_mut().zip(values) {
        for (&c, v) in ys.iter().zip(vals) {
            row.cells[c] = Cell::Num(round6(v));
        }
    }
    rerange(t);
}

fn round6(v: f64) -> f64 {
    (v * 1e6).round() / 1e6
}

fn rerange(t: &mut Table) {
    let header: Vec<String> = t.columns.iter().map(|c| c.name.clone()).collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    *t = Table::new(t.name.clone(), &header, std::mem::take(&mut t.rows)).expect("same shape");
}

/// One member of the synthetic suite.
///
/// Rows are uniform draws of a `latent`-dimensional point `u`. Each of the
/// `columns` independent columns is a fixed random map of `u` snapped to
/// `levels` integer settings. Goals are distances in latent space to hidden
/// optima; when `goal_levels` is set they are binned, which makes whole
/// regions tie at the optimum. Goals after the first get half as many bins.
#[derive(Debug, Clone)]
pub struct SynthRecipe {
    pub name: &'static str,
    pub rows: usize,
    pub latent: usize,
    pub columns: usize,
    pub levels: usize,
    pub goals: usize,
    pub goal_levels: Option<usize>,
    /// Latent dimensions passed straight through as columns before the mixed ones.
    pub identity: bool,
}

impl SynthRecipe {
    pub fn table(&self, seed: u64) -> Result<Table> {
        if self.latent == 0 || self.columns == 0 || self.goals == 0 || self.levels < 2 {
            return Err(Error::InvalidArgument(format!("bad synthetic recipe {}", self.name)));
        }
        let mut rng = crate::seeded_rng(seed);
        let maps: Vec<ColumnMap> = (0..self.columns)
            .map(|k| {
                if self.identity && k < self.latent {
                    ColumnMap::axis(self.latent, k)
                } else {
                    ColumnMap::random(self.latent, &mut rng)
                }
            })
            .collect();
        let optima: Vec<Vec<f64>> = (0..self.goals)
            .map(|j| {
                let first: Vec<f64> = (0..self.latent).map(|_| rng.gen_range(0.15..0.85)).collect();
                if j == 0 {
                    first
                } else {
                    // later goals sit near the first so they mostly agree
                    first.iter().map(|v| (v + rng.gen_range(-0.1..0.1)).clamp(0.0, 1.0)).collect()
                }
            })
            .collect();
        let reach = (self.latent as f64).sqrt();

        let mut header: Vec<String> = (0..self.columns).map(|k| format!("Opt{}", k + 1)).collect();
        header.extend(["Score-", "Cost-", "Risk-", "Wait-"].iter().take(self.goals).map(|s| s.to_string()));
        if self.goals > 4 {
            return Err(Error::InvalidArgument("at most 4 synthetic goals".into()));
        }
        let header: Vec<&str> = header.iter().map(String::as_str).collect();

        let rows = (0..self.rows)
            .map(|_| {
                let u: Vec<f64> = (0..self.latent).map(|_| rng.gen::<f64>()).collect();
                let x = maps.iter().map(|m| {
                    let level = (m.eval(&u) * (self.levels - 1) as f64).round();
                    Cell::Num(level + 1.0)
                });
                let y = optima.iter().enumerate().map(|(j, o)| {
                    let d = u.iter().zip(o).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt() / reach;
                    Cell::Num(match self.goal_levels {
                        Some(l) if j == 0 => (d * l as f64).floor(),
                        Some(l) => (d * (l / 2).max(2) as f64).floor(),
                        None => round6(d),
                    })
                });
                Row { cells: x.chain(y).collect() }
            })
            .collect();
        Table::new(self.name, &header, rows)
    }
}

/// A smooth map from the unit latent cube into [0, 1].
#[derive(Debug, Clone)]
struct ColumnMap {
    w: Vec<f64>,
    bend: f64,
}

impl ColumnMap {
    fn axis(latent: usize, k: usize) -> ColumnMap {
        let mut w = vec![0.0; latent];
        w[k] = 1.0;
        ColumnMap { w, bend: 0.0 }
    }

    fn random(latent: usize, rng: &mut impl Rng) -> ColumnMap {
        let mut w: Vec<f64> = (0..latent).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let s: f64 = w.iter().map(|v| v.abs()).sum();
        w.iter_mut().for_each(|v| *v /= s);
        ColumnMap {
            w,
            bend: rng.gen_range(-0.5..0.5),
        }
    }

    fn eval(&self, u: &[f64]) -> f64 {
        // weights sum to 1 in magnitude so the linear part spans at most [-1, 1]
        let lin: f64 = self.w.iter().zip(u).map(|(w, v)| w * v).sum();
        let t = (lin + 1.0) / 2.0;
        (t + self.bend * t * (1.0 - t)).clamp(0.0, 1.0)
    }
}

/// The fixed benchmark suite: seven tables whose columns are redundant views of
/// one or two latent factors, and three whose columns are all independent.
pub fn suite_recipes() -> Vec<SynthRecipe> {
    let redundant = |name, latent, columns, levels, goals, goal_levels| SynthRecipe {
        name,
        rows: 4000,
        latent,
        columns,
        levels,
        goals,
        goal_levels: Some(goal_levels),
        identity: false,
    };
    let independent = |name, rows, columns| SynthRecipe {
        name,
        rows,
        latent: columns,
        columns,
        levels: 100,
        goals: 2,
        goal_levels: None,
        identity: true,
    };
    vec![
        redundant("cfg_cache", 1, 6, 50, 1, 8),
        redundant("cfg_compiler", 2, 8, 40, 1, 6),
        redundant("cfg_database", 2, 10, 30, 2, 6),
        redundant("cfg_server", 2, 6, 60, 1, 5),
        redundant("cfg_stream", 1, 8, 40, 2, 8),
        redundant("cfg_video", 2, 12, 20, 1, 6),
        redundant("cfg_storage", 2, 9, 50, 2, 5),
        independent("flat_four", 5000, 4),
        independent("flat_five", 5000, 5),
        independent("flat_six", 5000, 6),
    ]
}

/// Tables of the suite, each generated from its own stream of `seed`.
pub fn gen_suite(seed: u64) -> Result<Vec<Table>> {
    suite_recipes()
        .iter()
        .enumerate()
        .map(|(k, s)| s.table(seed.wrapping_mul(1000).wrapping_add(k as u64)))
        .collect()
}
