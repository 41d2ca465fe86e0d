mod common;

use common::{random_problem_table, Tripwire};
use drr::optim::{optimize, Algo, Oracle, Problem, QMode, RunConfig, LITE_WARMUP};

fn configs(rows: usize) -> Vec<RunConfig> {
    let mut out = Vec::new();
    for budget in [1, 4, 5, 30, rows] {
        for q in [QMode::Explore, QMode::Exploit, QMode::Adapt] {
            let mut c = RunConfig::new(Algo::Lite, budget);
            c.q = q;
            out.push(c);
        }
        out.push(RunConfig::new(Algo::Random, budget));
    }
    for budget in [30, 150, rows] {
        out.push(RunConfig::new(Algo::Dehb, budget));
    }
    out
}

#[test]
fn no_optimizer_reads_unlabeled_goals() {
    for (dims, goals) in [(3, 1), (5, 2), (2, 3)] {
        let t = random_problem_table(150, dims, goals, dims as u64);
        let p = Problem::new(&t).unwrap();
        for cfg in configs(t.len()) {
            for seed in 0..3 {
                let mut o = Tripwire::new(&p, cfg.budget);
                let best = match optimize(&mut o, &cfg, seed) {
                    Ok(b) => b,
                    Err(e) => {
                        // lite needs its warm-up plus one, dehb room for a population
                        let small = match cfg.algo {
                            Algo::Lite => cfg.budget <= LITE_WARMUP,
                            Algo::Dehb => true,
                            Algo::Random => false,
                        };
                        assert!(small, "{cfg:?}: {e}");
                        continue;
                    }
                };
                assert!(o.is_labeled(best), "{cfg:?} returned an unlabeled row");
                assert!(o.spent() <= cfg.budget);
            }
        }
    }
}

#[test]
fn returned_row_is_best_labeled_for_single_goal() {
    let t = random_problem_table(200, 4, 1, 9);
    let p = Problem::new(&t).unwrap();
    for algo in [Algo::Lite, Algo::Random, Algo::Dehb] {
        let cfg = RunConfig::new(algo, 60);
        let mut o = Tripwire::new(&p, 60);
        let best = optimize(&mut o, &cfg, 3).unwrap();
        let lowest = o
            .history
            .iter()
            .map(|&r| p.goals_of(r)[0])
            .fold(f64::INFINITY, f64::min);
        assert_eq!(p.goals_of(best)[0], lowest, "{algo:?}");
    }
}
