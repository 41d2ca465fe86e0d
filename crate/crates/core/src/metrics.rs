//! Regression and classification scores.

use crate::error::{Error, Result};

pub const PRED_THRESHOLD: f64 = 0.40;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictionPair {
    pub actual: f64,
    pub predicted: f64,
}

impl PredictionPair {
    pub fn new(actual: f64, predicted: f64) -> Self {
        PredictionPair { actual, predicted }
    }
}

/// Magnitude of relative error, `|actual - predicted| / |actual|`.
pub fn mre(p: PredictionPair) -> Result<f64> {
    if p.actual == 0.0 {
        return Err(Error::UndefinedMre);
    }
    Ok((p.actual - p.predicted).abs() / p.actual.abs())
}

/// Fraction of MREs at or below `threshold`.
pub fn pred(mres: &[f64], threshold: f64) -> Result<f64> {
    if mres.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(mres.iter().filter(|&&m| m <= threshold).count() as f64 / mres.len() as f64)
}

pub fn pred40(mres: &[f64]) -> Result<f64> {
    pred(mres, PRED_THRESHOLD)
}

pub fn mae(pairs: &[PredictionPair]) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(pairs.iter().map(|p| (p.predicted - p.actual).abs()).sum::<f64>() / pairs.len() as f64)
}

/// Standardized accuracy against always guessing the mean of the actuals.
pub fn sa(pairs: &[PredictionPair]) -> Result<f64> {
    if pairs.len() < 2 {
        return Err(Error::InvalidArgument("standardized accuracy needs at least 2 pairs".into()));
    }
    let mean = pairs.iter().map(|p| p.actual).sum::<f64>() / pairs.len() as f64;
    let dumb: Vec<PredictionPair> = pairs.iter().map(|p| PredictionPair::new(p.actual, mean)).collect();
    let base = mae(&dumb)?;
    if base == 0.0 {
        return Err(Error::DegenerateBaseline);
    }
    Ok((1.0 - mae(pairs)? / base) * 100.0)
}

/// A: true negatives, B: false negatives, C: false positives, D: true positives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionCounts {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
}

/// A score and whether its denominator was zero (score then reported as 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Score {
    pub value: f64,
    pub undefined: bool,
}

impl Score {
    fn ratio(num: f64, den: f64) -> Score {
        if den == 0.0 {
            Score { value: 0.0, undefined: true }
        } else {
            Score { value: num / den, undefined: false }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassificationScores {
    pub accuracy: Score,
    pub precision: Score,
    pub recall: Score,
    pub f1: Score,
}

pub fn classification_scores(c: ConfusionCounts) -> ClassificationScores {
    let (a, b, cc, d) = (c.a as f64, c.b as f64, c.c as f64, c.d as f64);
    let accuracy = Score::ratio(a + d, a + b + cc + d);
    let recall = Score::ratio(d, b + d);
    let precision = Score::ratio(d, cc + d);
    let (r, p) = (recall.value, precision.value);
    let f1 = Score::ratio(2.0 * r * p, r + p);
    ClassificationScores {
        accuracy,
        precision,
        recall,
        f1,
    }
}

/// Parses the two-column `actual,predicted` CSV.
pub fn load_pairs(text: &str) -> Result<Vec<PredictionPair>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r').trim()))
        .filter(|(_, l)| !l.is_empty());
    match lines.next() {
        Some((_, h)) if h.replace(' ', "") == "actual,predicted" => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                message: "expected header 'actual,predicted'".into(),
            })
        }
    }
    lines
        .map(|(line, l)| {
            let cells: Vec<&str> = l.split(',').map(str::trim).collect();
            let parse = |s: &str| s.parse::<f64>().ok().filter(|v| v.is_finite());
            match cells.as_slice() {
                [a, p] => match (parse(a), parse(p)) {
                    (Some(a), Some(p)) => Ok(PredictionPair::new(a, p)),
                    _ => Err(Error::Parse {
                        line,
                        message: "expected two numbers".into(),
                    }),
                },
                _ => Err(Error::Parse {
                    line,
                    message: format!("expected 2 cells, found {}", cells.len()),
                }),
            }
        })
        .collect()
}
