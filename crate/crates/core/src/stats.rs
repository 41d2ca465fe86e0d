//! Cliff's delta and Scott-Knott ranking of treatments.

use crate::error::{Error, Result};

/// Effects smaller than this are negligible.
pub const SMALL_EFFECT: f64 = 0.147;

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub label: String,
    pub values: Vec<f64>,
}

impl Sample {
    pub fn new(label: impl Into<String>, values: Vec<f64>) -> Sample {
        Sample {
            label: label.into(),
            values,
        }
    }

    pub fn median(&self) -> f64 {
        percentile(&self.values, 0.5)
    }

    pub fn iqr(&self) -> f64 {
        percentile(&self.values, 0.75) - percentile(&self.values, 0.25)
    }
}

/// Linear-interpolated percentile, `p` in [0, 1].
pub fn percentile(values: &[f64], p: f64) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = p * (v.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
}

/// `sum sign(x - y) / (|A| |B|)` over all pairs.
pub fn cliffs_delta(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut net: i64 = 0;
    for &x in a {
        for &y in b {
            if x > y {
                net += 1;
            } else if x < y {
                net -= 1;
            }
        }
    }
    Ok(net as f64 / (a.len() * b.len()) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Direction {
    #[default]
    SmallerIsBetter,
    LargerIsBetter,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankEntry {
    pub label: String,
    pub rank: usize,
    pub median: f64,
    pub iqr: f64,
}

/// Entries ordered best first.
#[derive(Debug, Clone, PartialEq)]
pub struct RankReport {
    pub entries: Vec<RankEntry>,
}

impl RankReport {
    pub fn rank_of(&self, label: &str) -> Option<usize> {
        self.entries.iter().find(|e| e.label == label).map(|e| e.rank)
    }

    /// Labels holding a given rank.
    pub fn members(&self, rank: usize) -> Vec<&str> {
        self.entries
            .iter()
            .filter(|e| e.rank == rank)
            .map(|e| e.label.as_str())
            .collect()
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Recursive median-ordered split into statistically distinct ranks.
pub fn scott_knott(samples: &[Sample], direction: Direction) -> Result<RankReport> {
    if samples.iter().any(|s| s.values.is_empty()) {
        return Err(Error::EmptyInput);
    }
    let mut order: Vec<(f64, &Sample)> = samples.iter().map(|s| (s.median(), s)).collect();
    order.sort_by(|(ma, a), (mb, b)| {
        let by_median = match direction {
            Direction::SmallerIsBetter => ma.total_cmp(mb),
            Direction::LargerIsBetter => mb.total_cmp(ma),
        };
        // identical samples must sit next to each other so no cut separates them
        by_median
            .then_with(|| lexicographic(&sorted_values(a), &sorted_values(b)))
            .then_with(|| a.label.cmp(&b.label))
    });
    let sorted: Vec<&Sample> = order.into_iter().map(|(_, s)| s).collect();

    let mut cuts = Vec::new();
    split(&sorted, 0, &mut cuts)?;
    cuts.sort_unstable();

    let mut rank = 1;
    let mut next_cut = cuts.iter().peekable();
    let entries = sorted
        .iter()
        .enumerate()
        .map(|(i, s)| {
            while next_cut.peek().is_some_and(|&&c| c <= i) {
                next_cut.next();
                rank += 1;
            }
            RankEntry {
                label: s.label.clone(),
                rank,
                median: s.median(),
                iqr: s.iqr(),
            }
        })
        .collect();
    Ok(RankReport { entries })
}

fn sorted_values(s: &Sample) -> Vec<f64> {
    let mut v = s.values.clone();
    v.sort_by(f64::total_cmp);
    v
}

fn lexicographic(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or_else(|| a.len().cmp(&b.len()))
}

fn same_values(a: &Sample, b: &Sample) -> bool {
    a.values.len() == b.values.len() && sorted_values(a) == sorted_values(b)
}

/// Records accepted split points (as absolute indices into the sorted list).
fn split(part: &[&Sample], offset: usize, cuts: &mut Vec<usize>) -> Result<()> {
    if part.len() < 2 {
        return Ok(());
    }
    let all: Vec<f64> = part.iter().flat_map(|s| s.values.iter().copied()).collect();
    let mu = mean(&all);
    let n = all.len() as f64;

    let mut best: Option<(f64, usize)> = None;
    let mut left_len = 0;
    for cut in 1..part.len() {
        left_len += part[cut - 1].values.len();
        if same_values(part[cut - 1], part[cut]) {
            continue;
        }
        let (l1, l2) = all.split_at(left_len);
        let e = l1.len() as f64 / n * (mean(l1) - mu).powi(2) + l2.len() as f64 / n * (mean(l2) - mu).powi(2);
        if best.is_none_or(|(b, _)| e > b) {
            best = Some((e, cut));
        }
    }
    let Some((_, cut)) = best else {
        return Ok(());
    };
    let (left, right) = part.split_at(cut);
    let lv: Vec<f64> = left.iter().flat_map(|s| s.values.iter().copied()).collect();
    let rv: Vec<f64> = right.iter().flat_map(|s| s.values.iter().copied()).collect();
    if cliffs_delta(&lv, &rv)?.abs() >= SMALL_EFFECT {
        cuts.push(offset + cut);
        split(left, offset, cuts)?;
        split(right, offset + cut, cuts)?;
    }
    Ok(())
}
