//! Multi-objective ranking with the Zitzler continuous indicator, and the
//! distance-to-heaven score derived from a row's position in that ranking.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::table::{norm_value, Table};

/// Goal directions plus the ranges used to normalize goal values.
#[derive(Debug, Clone, PartialEq)]
pub struct GoalView {
    pub weights: Vec<f64>,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl GoalView {
    /// Ranges taken from the whole table.
    pub fn from_table(t: &Table) -> Result<GoalView> {
        if t.y.is_empty() {
            return Err(Error::NoGoals);
        }
        Ok(GoalView {
            weights: t.goal_weights(),
            lo: t.y.iter().map(|&c| t.columns[c].lo).collect(),
            hi: t.y.iter().map(|&c| t.columns[c].hi).collect(),
        })
    }

    /// Ranges taken from the given goal vectors only.
    pub fn from_vectors<'a>(weights: &[f64], vectors: impl IntoIterator<Item = &'a [f64]>) -> GoalView {
        let mut view = GoalView::empty(weights);
        for v in vectors {
            view.observe(v);
        }
        view
    }

    /// A view with no observed ranges yet; every objective normalizes to 0.5 until `observe`.
    pub fn empty(weights: &[f64]) -> GoalView {
        GoalView {
            weights: weights.to_vec(),
            lo: vec![f64::INFINITY; weights.len()],
            hi: vec![f64::NEG_INFINITY; weights.len()],
        }
    }

    pub fn observe(&mut self, goals: &[f64]) {
        for (j, &v) in goals.iter().enumerate() {
            self.lo[j] = self.lo[j].min(v);
            self.hi[j] = self.hi[j].max(v);
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    fn objective(&self, j: usize, v: f64) -> f64 {
        if self.lo[j] > self.hi[j] {
            return 0.5;
        }
        norm_value(self.lo[j], self.hi[j], v)
    }

    /// `sum_j -exp(w_j (o_ja - o_jb) / n) / n`.
    pub fn loss(&self, a: &[f64], b: &[f64]) -> f64 {
        let n = self.len() as f64;
        (0..self.len())
            .map(|j| {
                let delta = self.weights[j] * (self.objective(j, a[j]) - self.objective(j, b[j])) / n;
                -delta.exp() / n
            })
            .sum()
    }

    /// Moving from `a` to `b` loses more than the reverse.
    pub fn better(&self, a: &[f64], b: &[f64]) -> bool {
        self.loss(a, b) < self.loss(b, a)
    }

    /// Indices of `items` best-first. Stable: an item only moves ahead of an
    /// earlier one when it is strictly better.
    pub fn rank(&self, items: &[&[f64]]) -> Vec<usize> {
        let mut order: Vec<usize> = (0..items.len()).collect();
        let mut scratch = order.clone();
        merge_sort(&mut order, &mut scratch, &|a, b| self.better(items[a], items[b]));
        order
    }
}

// Zitzler's relation need not be transitive, so std's sorts (which may panic on
// inconsistent orders) are avoided in favour of a plain stable merge sort.
fn merge_sort(v: &mut [usize], scratch: &mut [usize], better: &dyn Fn(usize, usize) -> bool) {
    let n = v.len();
    if n < 2 {
        return;
    }
    let mid = n / 2;
    {
        let (l, r) = v.split_at_mut(mid);
        let (sl, sr) = scratch.split_at_mut(mid);
        merge_sort(l, sl, better);
        merge_sort(r, sr, better);
    }
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if better(v[j], v[i]) {
            scratch[k] = v[j];
            j += 1;
        } else {
            scratch[k] = v[i];
            i += 1;
        }
        k += 1;
    }
    scratch[k..k + mid - i].copy_from_slice(&v[i..mid]);
    k += mid - i;
    scratch[k..k + n - j].copy_from_slice(&v[j..n]);
    v.copy_from_slice(&scratch[..n]);
}

fn goals_of(t: &Table, row: usize) -> Result<Vec<f64>> {
    t.goal_vector(row).ok_or(Error::UnlabeledRow(row))
}

pub fn zitzler_loss(t: &Table, a: usize, b: usize, g: &GoalView) -> Result<f64> {
    Ok(g.loss(&goals_of(t, a)?, &goals_of(t, b)?))
}

pub fn better(t: &Table, a: usize, b: usize, g: &GoalView) -> Result<bool> {
    Ok(g.better(&goals_of(t, a)?, &goals_of(t, b)?))
}

/// Sorts table rows best-first; returns row indices.
pub fn rank_rows(t: &Table, rows: &[usize], g: &GoalView) -> Result<Vec<usize>> {
    let goals = rows
        .iter()
        .map(|&r| goals_of(t, r))
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<&[f64]> = goals.iter().map(Vec::as_slice).collect();
    Ok(g.rank(&refs).into_iter().map(|k| rows[k]).collect())
}

/// Zero-based position over ranking size; the best row scores 0.
pub fn d2h(i: usize, size: usize) -> f64 {
    debug_assert!(i < size);
    i as f64 / size as f64
}

/// A ranking of a set of rows, best-first, with each row's position.
///
/// Rows with identical goal vectors are indistinguishable to every comparison and
/// share the position of the first of them.
#[derive(Debug, Clone)]
pub struct Ranking {
    order: Vec<usize>,
    position: HashMap<usize, usize>,
}

impl Ranking {
    /// Ranks `rows`, given each row's goal vector.
    pub fn build(rows: &[usize], goals: &[&[f64]], g: &GoalView) -> Ranking {
        let order: Vec<usize> = g.rank(goals).into_iter().collect();
        let mut first_at: HashMap<Vec<u64>, usize> = HashMap::new();
        let mut position = HashMap::with_capacity(rows.len());
        for (pos, &k) in order.iter().enumerate() {
            let key: Vec<u64> = goals[k].iter().map(|v| v.to_bits()).collect();
            let p = *first_at.entry(key).or_insert(pos);
            position.insert(rows[k], p);
        }
        Ranking {
            order: order.into_iter().map(|k| rows[k]).collect(),
            position,
        }
    }

    /// Ranks every row of the table against table-wide goal ranges.
    pub fn of_table(t: &Table) -> Result<Ranking> {
        let g = GoalView::from_table(t)?;
        let rows: Vec<usize> = (0..t.len()).collect();
        let goals = rows
            .iter()
            .map(|&r| goals_of(t, r))
            .collect::<Result<Vec<_>>>()?;
        let refs: Vec<&[f64]> = goals.iter().map(Vec::as_slice).collect();
        Ok(Ranking::build(&rows, &refs, &g))
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn position(&self, row: usize) -> Option<usize> {
        self.position.get(&row).copied()
    }

    pub fn d2h(&self, row: usize) -> Option<f64> {
        self.position(row).map(|p| d2h(p, self.len()))
    }
}
