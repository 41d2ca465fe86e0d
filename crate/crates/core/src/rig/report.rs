use std::fmt::Write as _;
use std::path::Path;

use super::{id_csv, IdRecord, Outcome, ResultsFile};
use crate::error::{Error, Result};
use crate::stats::{scott_knott, Direction, RankReport, Sample};

/// Scott-Knott ranks of every treatment, per dataset, in results-file order.
pub fn rank_tables(r: &ResultsFile, direction: Direction) -> Result<Vec<(String, RankReport)>> {
    r.datasets()
        .into_iter()
        .map(|d| {
            let samples: Vec<Sample> = r
                .treatments(d)
                .into_iter()
                .map(|t| Sample::new(t, r.values(d, t)))
                .collect();
            Ok((d.to_string(), scott_knott(&samples, direction)?))
        })
        .collect()
}

/// How well the reduction-ratio gate separates datasets where the light
/// treatment ties the heavy one.
#[derive(Debug, Clone, PartialEq)]
pub struct GateCheck {
    pub light: String,
    pub heavy: String,
    /// Datasets where both hold rank 1.
    pub ties: Vec<String>,
    /// Datasets where the heavy treatment alone holds rank 1.
    pub heavy_wins: Vec<String>,
    pub ties_simple: usize,
    pub heavy_wins_complex: usize,
}

impl GateCheck {
    pub fn tie_fraction_simple(&self) -> Option<f64> {
        (!self.ties.is_empty()).then(|| self.ties_simple as f64 / self.ties.len() as f64)
    }
}

pub fn gate_check(ranks: &[(String, RankReport)], gates: &[IdRecord], light: &str, heavy: &str) -> GateCheck {
    let mut c = GateCheck {
        light: light.to_string(),
        heavy: heavy.to_string(),
        ties: Vec::new(),
        heavy_wins: Vec::new(),
        ties_simple: 0,
        heavy_wins_complex: 0,
    };
    for (d, rep) in ranks {
        let simple = gates.iter().find(|g| &g.dataset == d).map(|g| g.gate.simple_by_drr);
        match (rep.rank_of(light), rep.rank_of(heavy)) {
            (Some(1), Some(1)) => {
                c.ties.push(d.clone());
                c.ties_simple += usize::from(simple == Some(true));
            }
            (Some(_), Some(1)) if rep.members(1) == [heavy] => {
                c.heavy_wins.push(d.clone());
                c.heavy_wins_complex += usize::from(simple == Some(false));
            }
            _ => {}
        }
    }
    c
}

/// Per-dataset markdown tables: treatment, rank, median, IQR, mean wall time.
pub fn summary_markdown(r: &ResultsFile, gates: &[IdRecord]) -> Result<String> {
    summary_markdown_by(r, gates, Direction::SmallerIsBetter)
}

pub fn summary_markdown_by(r: &ResultsFile, gates: &[IdRecord], direction: Direction) -> Result<String> {
    let ranks = rank_tables(r, direction)?;
    let mut out = String::from("# Benchmark summary\n");
    for (d, rep) in &ranks {
        let _ = writeln!(out, "\n## {d}\n");
        if let Some(g) = gates.iter().find(|g| &g.dataset == d) {
            let _ = writeln!(out, "R = {}, I = {:.3}, DRR = {:.3}\n", g.gate.raw_dims, g.gate.intrinsic, g.gate.drr);
        }
        out.push_str("| treatment | rank | median | IQR | mean ms |\n");
        out.push_str("|---|---|---|---|---|\n");
        for e in &rep.entries {
            let ms: Vec<f64> = r
                .records
                .iter()
                .filter(|x| &x.dataset == d && x.treatment == e.label)
                .map(|x| x.ms)
                .collect();
            let mean_ms = ms.iter().sum::<f64>() / ms.len() as f64;
            let _ = writeln!(
                out,
                "| {} | {} | {:.5} | {:.5} | {:.1} |",
                e.label, e.rank, e.median, e.iqr, mean_ms
            );
        }
    }
    if !gates.is_empty() {
        let c = gate_check(&ranks, gates, "lite:30", "dehb:3000");
        out.push_str("\n## DRR gate\n\n");
        let _ = writeln!(
            out,
            "{} dataset(s) where {} shares rank 1 with {}; {} of them have DRR > 1/3.",
            c.ties.len(),
            c.light,
            c.heavy,
            c.ties_simple
        );
        let _ = writeln!(
            out,
            "{} dataset(s) where {} holds rank 1 alone; {} of them have DRR <= 1/3.",
            c.heavy_wins.len(),
            c.heavy,
            c.heavy_wins_complex
        );
    }
    Ok(out)
}

/// Writes results.csv, summary.md and id.csv into `dir`.
pub fn emit_report(outcome: &Outcome, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    if outcome.results.records.is_empty() {
        return Err(Error::EmptyInput);
    }
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let write = |name: &str, body: String| {
        let p = dir.join(name);
        std::fs::write(&p, body).map_err(|e| Error::io(&p, e))
    };
    write("results.csv", outcome.results.to_csv())?;
    write("summary.md", summary_markdown(&outcome.results, &outcome.gates)?)?;
    write("id.csv", id_csv(&outcome.gates))?;
    Ok(())
}
