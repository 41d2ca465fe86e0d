//! Correlation-dimension estimate of intrinsic dimensionality and the
//! dimensionality-reduction-ratio gate built on it.
//!
//! Pairwise distances are taken over independent columns only, so the gate can
//! be computed before any goal is revealed. The correlation integral `C(r)` is the
//! fraction of row pairs closer than `r`; the intrinsic dimension is the largest
//! (smoothed) slope of `ln C(r)` against `ln r`.

use rand::seq::index;

use crate::error::{Error, Result};
use crate::table::{Table, XSpace};

pub const DEFAULT_RADII: usize = 40;
pub const DEFAULT_SAMPLE_CAP: usize = 512;
pub const DEFAULT_SMOOTH_WINDOW: usize = 3;
/// Problems whose reduction ratio exceeds this are expected to be easy.
pub const DRR_THRESHOLD: f64 = 1.0 / 3.0;
/// Older rule: intrinsic dimension at or below this is easy.
pub const AGRAWAL_THRESHOLD: f64 = 4.0;
const MIN_RADIUS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveParams {
    pub radii: usize,
    pub sample_cap: usize,
    pub seed: u64,
    pub smooth_window: usize,
}

impl Default for CurveParams {
    fn default() -> Self {
        CurveParams {
            radii: DEFAULT_RADII,
            sample_cap: DEFAULT_SAMPLE_CAP,
            seed: 1,
            smooth_window: DEFAULT_SMOOTH_WINDOW,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationCurve {
    /// Log-spaced radii, ascending.
    pub radii: Vec<f64>,
    /// Correlation integral at each radius.
    pub integrals: Vec<f64>,
    /// Number of pairs strictly closer than each radius.
    pub counts: Vec<u64>,
    /// Log-log slope between consecutive radii; `None` where the lower radius
    /// encloses too few pairs for a stable estimate.
    pub slopes: Vec<Option<f64>>,
    pub sample_size: usize,
}

impl CorrelationCurve {
    pub fn pairs(&self) -> u64 {
        let n = self.sample_size as u64;
        n * n.saturating_sub(1) / 2
    }
}

/// Fraction of sorted pair distances strictly below `r`.
pub fn correlation_integral(sorted: &[f64], r: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    sorted.partition_point(|&d| d < r) as f64 / sorted.len() as f64
}

/// Sorted pairwise distances between the given rows.
pub fn pair_distances(space: &XSpace, rows: &[usize]) -> Vec<f64> {
    let mut out = Vec::with_capacity(rows.len() * rows.len().saturating_sub(1) / 2);
    for (a, &i) in rows.iter().enumerate() {
        for &j in &rows[a + 1..] {
            out.push(space.dist(i, j));
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

pub fn correlation_curve(
    t: &Table,
    radii: usize,
    sample_cap: usize,
    seed: u64,
) -> Result<CorrelationCurve> {
    if t.x.is_empty() {
        return Err(Error::NoIndependent);
    }
    if radii < 4 {
        return Err(Error::InvalidArgument(format!(
            "need at least 4 radii, got {radii}"
        )));
    }
    let space = XSpace::new(t);
    let n = t.len().min(sample_cap);
    if n < 2 {
        return Err(Error::InsufficientRows);
    }
    let mut rng = crate::seeded_rng(seed);
    let mut sample = index::sample(&mut rng, t.len(), n).into_vec();
    sample.sort_unstable();
    curve_from_distances(&pair_distances(&space, &sample), n, radii)
}

/// Builds the curve from sorted pair distances of `n` sampled rows.
pub fn curve_from_distances(sorted: &[f64], n: usize, radii: usize) -> Result<CorrelationCurve> {
    if n < 2 || sorted.is_empty() {
        return Err(Error::InsufficientRows);
    }
    let dmax = *sorted.last().unwrap();
    if dmax <= 0.0 {
        return Err(Error::DegenerateTable);
    }
    let dmin = sorted[sorted.partition_point(|&d| d <= 0.0)].max(MIN_RADIUS);
    let (lo, hi) = (dmin.ln(), dmax.ln());
    let step = (hi - lo) / (radii - 1) as f64;
    let rs: Vec<f64> = (0..radii)
        .map(|k| {
            if k + 1 == radii {
                dmax
            } else {
                (lo + step * k as f64).exp()
            }
        })
        .collect();
    let total = sorted.len() as f64;
    let counts: Vec<u64> = rs
        .iter()
        .map(|&r| sorted.partition_point(|&d| d < r) as u64)
        .collect();
    let integrals: Vec<f64> = counts.iter().map(|&c| c as f64 / total).collect();

    // Below roughly one neighbour per sampled row the counts are dominated by
    // a handful of close pairs and the slopes are noise.
    let floor = n as u64;
    let slopes = (1..radii)
        .map(|k| {
            let (c0, c1) = (counts[k - 1], counts[k]);
            if c0 == 0 || c0 < floor || c1 == 0 || rs[k] <= rs[k - 1] {
                return None;
            }
            Some((integrals[k].ln() - integrals[k - 1].ln()) / (rs[k].ln() - rs[k - 1].ln()))
        })
        .collect();

    Ok(CorrelationCurve {
        radii: rs,
        integrals,
        counts,
        slopes,
        sample_size: n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionEstimate {
    pub dimension: f64,
    /// Set when the curve had no usable slope and the dimension defaulted to 0.
    pub flat: bool,
}

/// Centered moving average over the defined slopes, then the maximum.
pub fn intrinsic_dimension(c: &CorrelationCurve, smooth_window: usize) -> Result<DimensionEstimate> {
    if smooth_window == 0 || smooth_window.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "smoothing window must be odd and positive, got {smooth_window}"
        )));
    }
    let half = smooth_window / 2;
    let gr = &c.slopes;
    let mut best: Option<f64> = None;
    for k in 0..gr.len() {
        if gr[k].is_none() {
            continue;
        }
        let lo = k.saturating_sub(half);
        let hi = (k + half).min(gr.len() - 1);
        let window: Vec<f64> = gr[lo..=hi].iter().flatten().copied().collect();
        let mean = window.iter().sum::<f64>() / window.len() as f64;
        best = Some(best.map_or(mean, |b: f64| b.max(mean)));
    }
    Ok(match best {
        Some(d) => DimensionEstimate {
            dimension: d.max(0.0),
            flat: false,
        },
        None => DimensionEstimate {
            dimension: 0.0,
            flat: true,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateDecision {
    pub raw_dims: usize,
    pub intrinsic: f64,
    pub drr: f64,
    pub simple_by_drr: bool,
    pub simple_by_agrawal: bool,
}

impl GateDecision {
    pub fn new(raw_dims: usize, intrinsic: f64) -> GateDecision {
        let drr = 1.0 - intrinsic / raw_dims as f64;
        GateDecision {
            raw_dims,
            intrinsic,
            drr,
            // drr > 1/3 rearranged to avoid rounding at the boundary
            simple_by_drr: 3.0 * intrinsic < 2.0 * raw_dims as f64,
            simple_by_agrawal: intrinsic <= AGRAWAL_THRESHOLD,
        }
    }

    pub fn verdict(simple: bool) -> &'static str {
        if simple {
            "simple"
        } else {
            "complex"
        }
    }
}

pub fn recommend(t: &Table, params: &CurveParams) -> Result<GateDecision> {
    if t.x.is_empty() {
        return Err(Error::NoIndependent);
    }
    let intrinsic = match correlation_curve(t, params.radii, params.sample_cap, params.seed) {
        Ok(curve) => intrinsic_dimension(&curve, params.smooth_window)?.dimension,
        Err(Error::DegenerateTable) => 0.0,
        Err(e) => return Err(e),
    };
    Ok(GateDecision::new(t.x.len(), intrinsic))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::{load_table, Cell, Row};

    fn numeric_table(points: &[Vec<f64>]) -> Table {
        let dims = points[0].len();
        let header: Vec<String> = (0..dims).map(|d| format!("X{d}")).chain(["Y-".into()]).collect();
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        let rows = points
            .iter()
            .map(|p| Row {
                cells: p.iter().map(|&v| Cell::Num(v)).chain([Cell::Num(0.0)]).collect(),
            })
            .collect();
        Table::new("pts", &header, rows).unwrap()
    }

    #[test]
    fn identical_rows_are_degenerate() {
        let t = load_table("t", "A,B-\n1,1\n1,2\n").unwrap();
        assert_eq!(correlation_curve(&t, 40, 512, 1), Err(Error::DegenerateTable));
        let g = recommend(&t, &CurveParams::default()).unwrap();
        assert_eq!((g.intrinsic, g.drr), (0.0, 1.0));
        assert!(g.simple_by_drr && g.simple_by_agrawal);
    }

    #[test]
    fn one_row_is_insufficient() {
        let t = load_table("t", "A,B-\n1,1\n").unwrap();
        assert_eq!(correlation_curve(&t, 40, 512, 1), Err(Error::InsufficientRows));
    }

    #[test]
    fn too_few_radii_rejected() {
        let t = load_table("t", "A,B-\n1,1\n2,2\n").unwrap();
        assert!(matches!(correlation_curve(&t, 3, 512, 1), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn four_rows_full_count_above_dmax() {
        let t = numeric_table(&[vec![0.0], vec![1.0], vec![3.0], vec![7.0]]);
        let space = XSpace::new(&t);
        let d = pair_distances(&space, &[0, 1, 2, 3]);
        assert_eq!(d.len(), 6);
        assert_eq!(correlation_integral(&d, 1.0 + 1e-9), 1.0);
        assert_eq!(correlation_integral(&d, 0.0), 0.0);
    }

    #[test]
    fn curve_shape() {
        let pts: Vec<Vec<f64>> = (0..64).map(|i| vec![i as f64, (i * i % 17) as f64]).collect();
        let c = correlation_curve(&numeric_table(&pts), 20, 512, 3).unwrap();
        assert_eq!(c.radii.len(), 20);
        assert_eq!(c.integrals.len(), 20);
        assert_eq!(c.slopes.len(), 19);
        assert!(c.integrals.windows(2).all(|w| w[0] <= w[1]));
        assert!(c.radii.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn gate_boundaries() {
        let g = GateDecision::new(6, 4.0);
        assert!((g.drr - 1.0 / 3.0).abs() < 1e-15);
        assert!(!g.simple_by_drr);
        assert!(g.simple_by_agrawal);

        let g = GateDecision::new(10, 0.0);
        assert_eq!(g.drr, 1.0);
        assert!(g.simple_by_drr && g.simple_by_agrawal);

        let g = GateDecision::new(4, 1.0);
        assert_eq!(g.drr, 0.75);
    }

    #[test]
    fn flat_curve_reports_zero() {
        let c = CorrelationCurve {
            radii: vec![0.1, 0.2, 0.3, 0.4],
            integrals: vec![0.0, 0.0, 0.0, 1.0],
            counts: vec![0, 0, 0, 6],
            slopes: vec![None, None, None],
            sample_size: 4,
        };
        let e = intrinsic_dimension(&c, 3).unwrap();
        assert_eq!(e, DimensionEstimate { dimension: 0.0, flat: true });
        assert!(intrinsic_dimension(&c, 2).is_err());
    }

    #[test]
    fn smoothing_averages_neighbours() {
        let c = CorrelationCurve {
            radii: vec![1.0; 6],
            integrals: vec![0.5; 6],
            counts: vec![10; 6],
            slopes: vec![Some(1.0), Some(4.0), Some(1.0), None, Some(2.0)],
            sample_size: 4,
        };
        assert_eq!(intrinsic_dimension(&c, 1).unwrap().dimension, 4.0);
        // windows: [1,4]->2.5, [1,4,1]->2, [4,1]->2.5, [2]->2
        assert_eq!(intrinsic_dimension(&c, 3).unwrap().dimension, 2.5);
    }
}
