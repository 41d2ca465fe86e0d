//! Two-class ("best" vs "rest") naive Bayes over independent columns, and the
//! acquisition score that turns the two class likelihoods into a choice.
//!
//! Numeric columns use a Gaussian per class (values are the normalized ones held by
//! [`XSpace`]; the common rescaling cancels between classes). Symbolic columns use
//! m-estimated frequencies.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::table::{Kind, XSpace};

pub const TINY: f64 = 1e-32;
/// Acquisition scores are capped here so a vanishing denominator still orders.
pub const SCORE_CAP: f64 = 1e30;
pub const PRIOR_K: f64 = 1.0;
pub const PRIOR_M: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Class {
    Best,
    Rest,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Gauss {
    n: usize,
    mean: f64,
    sd: f64,
}

#[derive(Debug, Clone, PartialEq)]
enum ColumnStats {
    Numeric(Option<Gauss>),
    Symbolic { counts: HashMap<u64, usize> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassModel {
    pub rows: usize,
    columns: Vec<ColumnStats>,
}

impl ClassModel {
    fn fit(space: &XSpace, rows: &[usize]) -> ClassModel {
        let columns = (0..space.width())
            .map(|k| {
                let known = rows.iter().map(|&r| space.row(r)[k]).filter(|v| !v.is_nan());
                match space.kind(k) {
                    Kind::Numeric => ColumnStats::Numeric(gauss(known)),
                    Kind::Symbolic => {
                        let mut counts = HashMap::new();
                        for v in known {
                            *counts.entry(v.to_bits()).or_insert(0) += 1;
                        }
                        ColumnStats::Symbolic { counts }
                    }
                }
            })
            .collect();
        ClassModel {
            rows: rows.len(),
            columns,
        }
    }

    /// Mean and standard deviation of a numeric column, if any value was present.
    pub fn numeric(&self, k: usize) -> Option<(f64, f64)> {
        match &self.columns[k] {
            ColumnStats::Numeric(Some(g)) => Some((g.mean, g.sd)),
            _ => None,
        }
    }

    /// Count of rows in this class whose symbolic column `k` holds symbol id `sym`.
    pub fn symbol_count(&self, k: usize, sym: f64) -> usize {
        match &self.columns[k] {
            ColumnStats::Symbolic { counts } => counts.get(&sym.to_bits()).copied().unwrap_or(0),
            _ => 0,
        }
    }
}

fn gauss(values: impl Iterator<Item = f64>) -> Option<Gauss> {
    let v: Vec<f64> = values.collect();
    if v.is_empty() {
        return None;
    }
    let n = v.len();
    let mean = v.iter().sum::<f64>() / n as f64;
    let sd = if n > 1 {
        (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    Some(Gauss { n, mean, sd })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassStats {
    pub best: ClassModel,
    pub rest: ClassModel,
}

impl ClassStats {
    pub fn labeled(&self) -> usize {
        self.best.rows + self.rest.rows
    }

    pub fn model(&self, c: Class) -> &ClassModel {
        match c {
            Class::Best => &self.best,
            Class::Rest => &self.rest,
        }
    }

    /// Log prior plus summed log likelihoods of the row's known cells.
    pub fn loglike(&self, row: &[f64], c: Class, k: f64, m: f64) -> f64 {
        let model = self.model(c);
        let total = self.labeled() as f64;
        let prior = (model.rows as f64 + k) / (total + 2.0 * k);
        let mut sum = prior.ln();
        for (col, &v) in model.columns.iter().zip(row) {
            if v.is_nan() {
                continue;
            }
            let like = match col {
                ColumnStats::Numeric(None) => continue,
                ColumnStats::Numeric(Some(g)) => density(g, v),
                ColumnStats::Symbolic { counts } => {
                    let count = counts.get(&v.to_bits()).copied().unwrap_or(0) as f64;
                    (count + m * prior) / (model.rows as f64 + m)
                }
            };
            sum += like.max(TINY).ln();
        }
        sum
    }

    /// Normalized (b, r) for a row, with b + r = 1.
    pub fn best_rest(&self, row: &[f64]) -> (f64, f64) {
        normalize(
            self.loglike(row, Class::Best, PRIOR_K, PRIOR_M),
            self.loglike(row, Class::Rest, PRIOR_K, PRIOR_M),
        )
    }
}

fn density(g: &Gauss, v: f64) -> f64 {
    let sd = g.sd + TINY;
    let z = (v - g.mean) / sd;
    (-0.5 * z * z).exp() / (sd * (2.0 * std::f64::consts::PI).sqrt())
}

pub fn train(space: &XSpace, best: &[usize], rest: &[usize]) -> Result<ClassStats> {
    if best.is_empty() || rest.is_empty() {
        return Err(Error::EmptyClass);
    }
    Ok(ClassStats {
        best: ClassModel::fit(space, best),
        rest: ClassModel::fit(space, rest),
    })
}

/// Exponentiates two log-likelihoods into a pair summing to 1.
pub fn normalize(log_best: f64, log_rest: f64) -> (f64, f64) {
    let top = log_best.max(log_rest);
    let eb = (log_best - top).exp();
    let er = (log_rest - top).exp();
    let b = eb / (eb + er);
    (b, 1.0 - b)
}

/// `(b + r q) / |b q - r + eps|`, capped at [`SCORE_CAP`].
pub fn acquire(b: f64, r: f64, q: f64) -> f64 {
    ((b + r * q) / (b * q - r + TINY).abs()).min(SCORE_CAP)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::{load_table, Cell, Row, Table};
    use proptest::prelude::*;
    use rand::Rng;

    fn clusters() -> (Table, Vec<usize>, Vec<usize>) {
        let mut rng = crate::seeded_rng(7);
        let mut rows = Vec::new();
        for i in 0..40 {
            let center = if i < 20 { 0.0 } else { 10.0 };
            rows.push(Row {
                cells: vec![
                    Cell::Num(center + rng.gen_range(-1.0..1.0)),
                    Cell::Num(rng.gen_range(0.0..1.0)),
                    Cell::Num(0.0),
                ],
            });
        }
        let t = Table::new("c", &["A", "B", "Y-"], rows).unwrap();
        ((t), (0..20).collect(), (20..40).collect())
    }

    #[test]
    fn empty_class_rejected() {
        let t = load_table("t", "A,Y-\n1,1\n").unwrap();
        let s = XSpace::new(&t);
        assert_eq!(train(&s, &[], &[0]), Err(Error::EmptyClass));
        assert_eq!(train(&s, &[0], &[]), Err(Error::EmptyClass));
    }

    #[test]
    fn single_sample_has_zero_sd() {
        let t = load_table("t", "A,Y-\n1,1\n5,2\n9,3\n").unwrap();
        let s = XSpace::new(&t);
        let stats = train(&s, &[1], &[0, 2]).unwrap();
        assert_eq!(stats.best.numeric(0), Some((0.5, 0.0)));
        // floored, so the likelihood of the exact value is finite
        assert!(stats.loglike(s.row(1), Class::Best, 1.0, 2.0).is_finite());
        assert!(stats.loglike(s.row(0), Class::Best, 1.0, 2.0).is_finite());
    }

    #[test]
    fn symbol_counts() {
        let t = load_table("t", "color,Y-\nred,1\nred,2\nblue,3\ngreen,4\n").unwrap();
        let s = XSpace::new(&t);
        let stats = train(&s, &[0, 1, 2], &[3]).unwrap();
        assert_eq!(stats.best.symbol_count(0, s.row(0)[0]), 2);
        assert_eq!(stats.best.symbol_count(0, s.row(2)[0]), 1);
        assert_eq!(stats.best.rows, 3);
        // m-estimate: prior (3+1)/(4+2), like = (2 + 2*prior)/(3 + 2)
        let prior: f64 = 4.0 / 6.0;
        let expect = prior.ln() + ((2.0 + 2.0 * prior) / 5.0).ln();
        assert!((stats.loglike(s.row(0), Class::Best, 1.0, 2.0) - expect).abs() < 1e-12);
    }

    #[test]
    fn prior_formula() {
        // M = 10, k = 1, three best rows: prior = 4/12
        let t = load_table("t", "a,Y-\nx,1\nx,1\nx,1\nx,1\nx,1\nx,1\nx,1\nx,1\nx,1\nx,1\n").unwrap();
        let s = XSpace::new(&t);
        let stats = train(&s, &[0, 1, 2], &[3, 4, 5, 6, 7, 8, 9]).unwrap();
        let missing = [f64::NAN];
        assert!((stats.loglike(&missing, Class::Best, 1.0, 2.0) - (1.0f64 / 3.0).ln()).abs() < 1e-12);
    }

    #[test]
    fn symmetric_classes_tie() {
        let t = load_table("t", "A,b,Y-\n1,x,1\n3,y,1\n1,x,2\n3,y,2\n").unwrap();
        let s = XSpace::new(&t);
        let stats = train(&s, &[0, 1], &[2, 3]).unwrap();
        for r in 0..4 {
            let lb = stats.loglike(s.row(r), Class::Best, 1.0, 2.0);
            let lr = stats.loglike(s.row(r), Class::Rest, 1.0, 2.0);
            assert_eq!(lb, lr);
        }
    }

    #[test]
    fn separated_clusters_classify() {
        let (t, best, rest) = clusters();
        let s = XSpace::new(&t);
        let stats = train(&s, &best, &rest).unwrap();
        for &r in &best {
            let lb = stats.loglike(s.row(r), Class::Best, 1.0, 2.0);
            let lr = stats.loglike(s.row(r), Class::Rest, 1.0, 2.0);
            assert!(lb > lr, "row {r}");
        }
        // a point at the best-class mean
        let (mean_a, _) = stats.best.numeric(0).unwrap();
        let (mean_b, _) = stats.best.numeric(1).unwrap();
        let (b, r) = stats.best_rest(&[mean_a, mean_b]);
        assert!(b > r);
    }

    #[test]
    fn acquire_examples() {
        // exploit: b / (r + eps)
        assert!((acquire(0.8, 0.2, 0.0) - 4.0).abs() < 1e-12);
        // explore: 1 / |b - r|
        assert!((acquire(0.8, 0.2, 1.0) - 1.0 / 0.6).abs() < 1e-12);
        assert_eq!(acquire(0.5, 0.5, 1.0), SCORE_CAP);
    }

    proptest! {
        #[test]
        fn normalized_pair_sums_to_one(lb in -800.0f64..50.0, lr in -800.0f64..50.0) {
            let (b, r) = normalize(lb, lr);
            prop_assert!((b + r - 1.0).abs() <= f64::EPSILON);
            prop_assert!(b >= 0.0 && r >= 0.0);
        }

        #[test]
        fn shift_leaves_choice_unchanged(
            logs in prop::collection::vec((-30.0f64..0.0, -30.0f64..0.0), 1..20),
            shift in -100.0f64..100.0,
            q in 0.0f64..=1.0,
        ) {
            let pick = |s: f64| {
                let scores: Vec<f64> = logs.iter().map(|&(lb, lr)| {
                    let (b, r) = normalize(lb + s, lr + s);
                    acquire(b, r, q)
                }).collect();
                scores
            };
            let (a, b) = (pick(0.0), pick(shift));
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() <= 1e-6 * x.abs().max(1.0));
            }
        }

        #[test]
        fn exploit_orders_by_odds(pairs in prop::collection::vec(0.01f64..0.99, 2..20)) {
            for w in pairs.windows(2) {
                let (b1, b2) = (w[0], w[1]);
                let (s1, s2) = (acquire(b1, 1.0 - b1, 0.0), acquire(b2, 1.0 - b2, 0.0));
                let (o1, o2) = (b1 / (1.0 - b1), b2 / (1.0 - b2));
                prop_assert_eq!(s1 > s2, o1 > o2);
            }
        }
    }
}
