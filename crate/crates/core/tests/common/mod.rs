#![allow(dead_code)]

use drr::optim::{Oracle, Problem};
use drr::table::{Cell, Row, Table, XSpace};
use drr::{Error, Result};
use rand::Rng;

/// Points drawn uniformly from the unit cube of the given dimension.
pub fn uniform_points(n: usize, dims: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = drr::seeded_rng(seed);
    (0..n).map(|_| (0..dims).map(|_| rng.gen::<f64>()).collect()).collect()
}

/// Numeric table with columns `X1..Xd` followed by the given goal columns.
pub fn numeric_table(points: &[Vec<f64>], goal_names: &[&str], goals: &[Vec<f64>]) -> Table {
    let dims = points[0].len();
    let mut header: Vec<String> = (1..=dims).map(|d| format!("X{d}")).collect();
    header.extend(goal_names.iter().map(|s| s.to_string()));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = points
        .iter()
        .zip(goals)
        .map(|(p, g)| Row {
            cells: p.iter().chain(g).map(|&v| Cell::Num(v)).collect(),
        })
        .collect();
    Table::new("t", &header, rows).unwrap()
}

/// Points with one constant minimized goal: enough for dimension estimates.
pub fn point_table(points: &[Vec<f64>]) -> Table {
    let goals = vec![vec![0.0]; points.len()];
    numeric_table(points, &["Y-"], &goals)
}

/// A table of `n` rows over `dims` columns with `goals` random goals, alternating
/// minimize and maximize.
pub fn random_problem_table(n: usize, dims: usize, goals: usize, seed: u64) -> Table {
    let x = uniform_points(n, dims, seed);
    let mut rng = drr::seeded_rng(seed ^ 0x5eed);
    let names: Vec<String> = (0..goals)
        .map(|j| format!("G{j}{}", if j % 2 == 0 { '-' } else { '+' }))
        .collect();
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    // goals depend on the inputs so the learners have something to find
    let y: Vec<Vec<f64>> = x
        .iter()
        .map(|p| {
            (0..goals)
                .map(|j| {
                    let s: f64 = p.iter().enumerate().map(|(k, v)| v * ((k + j) % 3) as f64).sum();
                    s + rng.gen::<f64>() * 0.1
                })
                .collect()
        })
        .collect();
    numeric_table(&x, &names, &y)
}

/// An oracle that panics on any read of a goal it has not labeled.
pub struct Tripwire<'a> {
    pub problem: &'a Problem,
    pub budget: usize,
    pub labeled: Vec<bool>,
    pub history: Vec<usize>,
}

impl<'a> Tripwire<'a> {
    pub fn new(problem: &'a Problem, budget: usize) -> Self {
        Tripwire {
            problem,
            budget,
            labeled: vec![false; problem.len()],
            history: Vec::new(),
        }
    }
}

impl Oracle for Tripwire<'_> {
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
        assert!(self.labeled[row], "optimizer read the goals of unlabeled row {row}");
        Ok(self.problem.goals_of(row))
    }

    fn history(&self) -> &[usize] {
        &self.history
    }
}
