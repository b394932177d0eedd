use rayon::prelude::*;
use serde::Serialize;

use rainbow_core::block::{build_block_tree, verify_block_density};
use rainbow_core::coloring::{full_domain, is_rainbow};
use rainbow_core::generate::{make_stable_triple_coloring, random_bounded_coloring, GenParams};
use rainbow_core::normal::normalize_pairs;
use rainbow_core::rainbow::{
    charging_floor_holds, greedy_rainbow, greedy_tail_rainbow, viability_partition, viable_set, ExtensionContext,
};
use rainbow_core::reductions::{galvin_dual, is_homogeneous, run_triples_pipeline, PipelineConfig};
use rainbow_core::tree::{binary_encode_tree, build_rainbow_tree, DEFAULT_NODE_BUDGET};
use rainbow_core::verify::{verify_bushiness, verify_counting_lemma};
use rainbow_core::{Coloring, Error, IncreasingTuple};

use crate::{CliError, Experiment, SweepArgs};

/// One CSV line. The column set is the same for every experiment.
#[derive(Debug, Serialize)]
struct Row {
    experiment: &'static str,
    seed: u64,
    n: usize,
    checked: u64,
    violations: u64,
    passed: bool,
    metric: f64,
    error: String,
}

struct Outcome {
    checked: u64,
    violations: u64,
    metric: f64,
}

fn name(e: Experiment) -> &'static str {
    match e {
        Experiment::Block => "block",
        Experiment::Lemma25 => "lemma25",
        Experiment::Bushy => "bushy",
        Experiment::Normalize => "normalize",
        Experiment::Galvin => "galvin",
        Experiment::Greedy => "greedy",
        Experiment::Reduce => "reduce",
        Experiment::Partition => "partition",
    }
}

fn default_n(e: Experiment) -> usize {
    match e {
        Experiment::Block => 166,
        Experiment::Lemma25 | Experiment::Bushy => 2000,
        Experiment::Normalize => 12,
        Experiment::Galvin => 10,
        Experiment::Greedy => 200,
        Experiment::Reduce => 60,
        Experiment::Partition => 30,
    }
}

fn normal_pairs(n: usize, seed: u64) -> Result<Coloring, Error> {
    normalize_pairs(&random_bounded_coloring(GenParams::new(2, 2, n, seed).same_last())?)
}

fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u64..1 << n).map(move |m| (0..n).filter(|i| m >> i & 1 == 1).collect())
}

fn run_one(a: &SweepArgs, n: usize, seed: u64) -> Result<Outcome, Error> {
    let depth = a.depth;
    match a.experiment {
        Experiment::Block => {
            let f = random_bounded_coloring(GenParams::new(2, a.bound.unwrap_or(2), n, seed))?;
            let bt = build_block_tree(&f, depth.unwrap_or(5))?;
            let r = verify_block_density(&bt);
            let ratio = (0..=bt.depth)
                .map(|k| bt.t_count(k) as f64 / bt.s_count(k) as f64)
                .fold(f64::INFINITY, f64::min);
            Ok(Outcome {
                checked: r.checked,
                violations: r.violations.len() as u64,
                metric: ratio,
            })
        }
        Experiment::Lemma25 | Experiment::Bushy => {
            let g = normal_pairs(n, seed)?;
            let ctx = ExtensionContext::new(IncreasingTuple::empty(), full_domain(&g))?;
            let t = build_rainbow_tree(&ctx, &g, depth.unwrap_or(2), DEFAULT_NODE_BUDGET)?;
            if a.experiment == Experiment::Bushy {
                let r = verify_bushiness(&t, &g, None)?;
                let image = binary_encode_tree(&t)?;
                let measure = image.measures.iter().map(|m| m.value).fold(f64::INFINITY, f64::min);
                return Ok(Outcome {
                    checked: r.checked,
                    violations: r.violations.len() as u64,
                    metric: measure,
                });
            }
            let mut out = Outcome {
                checked: 0,
                violations: 0,
                metric: 0.0,
            };
            for l in 0..=t.depth() {
                let r = verify_counting_lemma(&t, &g, l)?;
                out.checked += r.checked;
                out.violations += r.violations.len() as u64 + u64::from(!r.preconditions_ok);
                out.metric = r.details["max_bad"].as_f64().unwrap_or(0.0);
            }
            Ok(out)
        }
        Experiment::Normalize => {
            let g = random_bounded_coloring(GenParams::new(2, 2, n, seed).same_last())?;
            let gb = normalize_pairs(&g)?;
            let mut out = Outcome {
                checked: 0,
                violations: 0,
                metric: 0.0,
            };
            for x in subsets(n) {
                let (a, b) = (is_rainbow(&x, &g), is_rainbow(&x, &gb));
                out.checked += 1;
                out.violations += u64::from(a != b);
                out.metric += f64::from(u8::from(a));
            }
            Ok(out)
        }
        Experiment::Galvin => {
            let b = a.bound.unwrap_or(2);
            let f = random_bounded_coloring(GenParams::new(2, b, n, seed))?;
            let g = galvin_dual(&f, b)?;
            let mut out = Outcome {
                checked: 0,
                violations: 0,
                metric: 0.0,
            };
            for x in subsets(n).filter(|x| is_homogeneous(x, &g)) {
                out.checked += 1;
                out.violations += u64::from(!is_rainbow(&x, &f));
                out.metric = out.metric.max(x.len() as f64);
            }
            Ok(out)
        }
        Experiment::Greedy => {
            let f = random_bounded_coloring(GenParams::new(2, 2, n, seed))?;
            let m = greedy_tail_rainbow(&f)?.len();
            Ok(Outcome {
                checked: 1,
                violations: u64::from(!charging_floor_holds(m, n)),
                metric: m as f64,
            })
        }
        Experiment::Reduce => {
            let window = a.window.unwrap_or(8);
            let s = make_stable_triple_coloring(n, window, seed)?;
            let b = run_triples_pipeline(&s.base, PipelineConfig { window, s0: None })?;
            let fl = &b.flags;
            let failed = [
                fl.one_tail,
                fl.f_hat_two_bounded,
                fl.g_is_f_hat_rainbow,
                fl.prefixes_rainbow,
                fl.zero_skips_beyond_threshold,
                fl.final_rainbow,
            ]
            .iter()
            .filter(|&&ok| !ok)
            .count();
            Ok(Outcome {
                checked: b.trace.steps.len() as u64,
                violations: failed as u64,
                metric: b.trace.rainbow.len() as f64,
            })
        }
        Experiment::Partition => {
            let g = normal_pairs(n, seed)?;
            let sigma: Vec<usize> = greedy_rainbow(&g, false).into_vec().into_iter().take(a.sigma_len).collect();
            let sigma = IncreasingTuple::new(sigma)?;
            let v = viable_set(&sigma, &g, n)?;
            let l = sigma.len();
            if v.len() < l + 2 {
                return Err(Error::Infeasible(format!("only {} viable numbers", v.len())));
            }
            let extensions: Vec<IncreasingTuple> = v[..=l].iter().map(|&x| sigma.extended(x)).collect::<Result<_, _>>()?;
            let partition = viability_partition(&extensions, &g, &v[l + 1..]);
            Ok(Outcome {
                checked: partition.len() as u64,
                violations: partition.values().filter(|p| p.is_none()).count() as u64,
                metric: partition.values().flatten().max().copied().unwrap_or(0) as f64,
            })
        }
    }
}

pub fn run(a: &SweepArgs) -> Result<(), CliError> {
    let n = a.n.unwrap_or_else(|| default_n(a.experiment));
    let experiment = name(a.experiment);
    // Seeds run in parallel; collecting an indexed iterator keeps seed order.
    let rows: Vec<Row> = a
        .seeds
        .clone()
        .into_par_iter()
        .map(|seed| match run_one(a, n, seed) {
            Ok(o) => Row {
                experiment,
                seed,
                n,
                checked: o.checked,
                violations: o.violations,
                passed: o.violations == 0,
                metric: o.metric,
                error: String::new(),
            },
            Err(e) => Row {
                experiment,
                seed,
                n,
                checked: 0,
                violations: 0,
                passed: false,
                metric: 0.0,
                error: e.to_string(),
            },
        })
        .collect();

    let mut w = csv::Writer::from_writer(Vec::new());
    for row in &rows {
        w.serialize(row).map_err(|e| CliError::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    crate::commands::emit(a.out.as_deref(), &String::from_utf8(bytes).expect("csv is utf-8"))?;
    let failed = rows.iter().filter(|r| !r.passed).count();
    if failed > 0 {
        return Err(CliError::Violation(format!("{failed} of {} seeds failed", rows.len())));
    }
    Ok(())
}
