use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::time::Instant;

use rainbow_core::block::{build_block_tree, verify_block_density};
use rainbow_core::coloring::{full_domain, is_rainbow, is_tail_rainbow, tail_width_for};
use rainbow_core::format::{parse_coloring, write_coloring};
use rainbow_core::generate::{make_stable_triple_coloring, random_bounded_coloring, GenParams};
use rainbow_core::normal::{is_normal, is_semi_normal, normalize_pairs, semi_normalize_triples};
use rainbow_core::rainbow::{
    charging_floor_holds, greedy_with_width, tail_viable_set, viable_set, ExtensionContext,
};
use rainbow_core::reductions::{
    galvin_counterexample, galvin_counterexample_sampled, galvin_dual, run_triples_pipeline, PipelineConfig,
    GALVIN_EXHAUSTIVE_LIMIT,
};
use rainbow_core::tree::{binary_encode_tree, build_quadruple_tree, build_rainbow_tree, RainbowTree};
use rainbow_core::verify::{verify_bushiness, verify_counting_lemma};
use rainbow_core::{Coloring, Error, IncreasingTuple};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::{BlockArgs, CliError, GalvinArgs, GenArgs, IoArgs, RainbowArgs, ReduceArgs, TreeArgs};

type CmdResult = Result<(), CliError>;

pub(crate) fn read_coloring(path: &Path) -> Result<Coloring, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(parse_coloring(&text)?)
}

pub(crate) fn emit(out: Option<&Path>, text: &str) -> CmdResult {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            // A closed pipe (e.g. `| head`) is not an error worth reporting.
            match io::stdout().lock().write_all(text.as_bytes()) {
                Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(CliError::Io(format!("stdout: {e}"))),
                _ => Ok(()),
            }
        }
    }
}

/// Writes `value` as pretty JSON, adding `elapsed_ms` only when asked so
/// that repeated runs stay byte-identical by default.
fn emit_json(io: &IoArgs, mut value: Value, started: Instant) -> CmdResult {
    if io.timings {
        value["elapsed_ms"] = json!(started.elapsed().as_secs_f64() * 1e3);
    }
    let mut text = serde_json::to_string_pretty(&value).expect("reports serialize");
    text.push('\n');
    emit(io.out.as_deref(), &text)
}

fn parse_sigma(s: &str) -> Result<IncreasingTuple, CliError> {
    let items: Vec<usize> = s
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse().map_err(|e| {
                CliError::Core(Error::Parse {
                    line: 0,
                    message: format!("--sigma entry {t:?}: {e}"),
                })
            })
        })
        .collect::<Result<_, _>>()?;
    Ok(IncreasingTuple::new(items)?)
}

pub fn gen(a: &GenArgs) -> CmdResult {
    let f = if a.stable {
        make_stable_triple_coloring(a.n, a.window, a.seed)?.base
    } else {
        let mut p = GenParams::new(a.arity, a.bound, a.n, a.seed);
        if a.same_last {
            p = p.same_last();
        }
        random_bounded_coloring(p)?
    };
    emit(a.out.as_deref(), &write_coloring(&f, a.format.into()))
}

/// Normal form for pairs, semi-normal form for triples.
fn normal_form(f: &Coloring) -> Result<Coloring, Error> {
    match f.arity() {
        2 if is_normal(f) => Ok(f.clone()),
        2 => normalize_pairs(f),
        3 if is_semi_normal(f) => Ok(f.clone()),
        3 => semi_normalize_triples(f),
        _ => Err(Error::WrongNormalForm("normal forms exist for arity 2 and 3")),
    }
}

pub fn normalize(a: &IoArgs) -> CmdResult {
    let f = read_coloring(&a.input)?;
    let g = normal_form(&f)?;
    emit(a.out.as_deref(), &write_coloring(&g, a.format.into()))
}

pub fn rainbow(a: &RainbowArgs) -> CmdResult {
    let started = Instant::now();
    let f = read_coloring(&a.io.input)?;
    let k = f.arity();
    let width = match (a.tail, a.tail_width) {
        (true, _) => Some(tail_width_for(k)),
        (false, Some(w)) if w == 0 || w > k => return Err(Error::TailWidth { width: w, arity: k }.into()),
        (false, w) => w,
    };
    let x = greedy_with_width(&f, &full_domain(&f), width);
    let mut out = json!({
        "command": "rainbow",
        "n": f.n(),
        "arity": k,
        "width": width,
        "rainbow": x.as_slice(),
        "size": x.len(),
    });
    if k == 2 && width == Some(1) {
        out["charging_floor"] = json!(charging_floor_holds(x.len(), f.n()));
    }
    emit_json(&a.io, out, started)
}

/// Normalizes the input, validates the head and builds the tree over the
/// head's viable (pairs) or tail-viable (triples) numbers.
fn tree_for(a: &TreeArgs) -> Result<(Coloring, RainbowTree), CliError> {
    let f = read_coloring(&a.io.input)?;
    let g = normal_form(&f)?;
    let sigma = parse_sigma(&a.sigma)?;
    if sigma.max_entry().is_some_and(|m| m >= g.n()) {
        return Err(Error::OutOfDomain {
            tuple: sigma.into_vec(),
            n: g.n(),
        }
        .into());
    }
    let budget = a.budget as u128;
    let tree = match g.arity() {
        2 => {
            if !is_rainbow(sigma.as_slice(), &g) {
                return Err(Error::NotRainbow(sigma.into_vec()).into());
            }
            let reservoir = viable_set(&sigma, &g, g.n())?;
            build_rainbow_tree(&ExtensionContext::new(sigma, reservoir)?, &g, a.depth, budget)?
        }
        _ => {
            if !is_tail_rainbow(sigma.as_slice(), &g) {
                return Err(Error::NotRainbow(sigma.into_vec()).into());
            }
            let reservoir = tail_viable_set(&sigma, &g, g.n())?;
            build_quadruple_tree(&ExtensionContext::new(sigma, reservoir)?, &g, a.depth, budget)?
        }
    };
    Ok((g, tree))
}

pub fn tree(a: &TreeArgs) -> CmdResult {
    let started = Instant::now();
    let (g, t) = tree_for(a)?;
    let mut out = json!({
        "command": "tree",
        "tree": t.dump(),
        "invariant_violations": t.invariant_violations(&g),
    });
    if a.binary {
        out["binary"] = serde_json::to_value(binary_encode_tree(&t)?).expect("image serializes");
    }
    emit_json(&a.io, out, started)
}

fn finish_report(io: &IoArgs, out: Value, passed: bool, started: Instant, what: &str) -> CmdResult {
    emit_json(io, out, started)?;
    if passed {
        Ok(())
    } else {
        Err(CliError::Violation(format!("{what} check failed")))
    }
}

pub fn verify_block(a: &BlockArgs) -> CmdResult {
    let started = Instant::now();
    let f = read_coloring(&a.io.input)?;
    let report = verify_block_density(&build_block_tree(&f, a.depth)?);
    let passed = report.passed();
    finish_report(&a.io, json!({"command": "verify block", "report": report}), passed, started, "block density")
}

pub fn verify_counting(a: &TreeArgs) -> CmdResult {
    let started = Instant::now();
    let (g, t) = tree_for(a)?;
    let reports = (0..=t.depth())
        .map(|l| verify_counting_lemma(&t, &g, l))
        .collect::<Result<Vec<_>, _>>()?;
    let passed = reports.iter().all(|r| r.passed());
    let out = json!({"command": "verify lemma25", "passed": passed, "reports": reports});
    finish_report(&a.io, out, passed, started, "counting")
}

pub fn verify_bushy(a: &TreeArgs) -> CmdResult {
    let started = Instant::now();
    let (g, t) = tree_for(a)?;
    let report = verify_bushiness(&t, &g, a.threshold)?;
    let passed = report.passed();
    finish_report(&a.io, json!({"command": "verify bushy", "report": report}), passed, started, "bushiness")
}

pub fn verify_galvin(a: &GalvinArgs) -> CmdResult {
    let started = Instant::now();
    let f = read_coloring(&a.io.input)?;
    let bound = a.bound.unwrap_or_else(|| f.max_class_size().max(1));
    let g = galvin_dual(&f, bound)?;
    let (mode, counterexample) = if f.n() <= GALVIN_EXHAUSTIVE_LIMIT {
        ("exhaustive", galvin_counterexample(&f, &g)?)
    } else {
        ("sampled", galvin_counterexample_sampled(&f, &g, a.samples, a.seed))
    };
    let passed = counterexample.is_none();
    let out = json!({
        "command": "verify galvin",
        "n": f.n(),
        "arity": f.arity(),
        "bound": bound,
        "mode": mode,
        "samples": (mode == "sampled").then_some(a.samples),
        "counterexample": counterexample,
        "passed": passed,
    });
    finish_report(&a.io, out, passed, started, "dual coloring")
}

pub fn reduce(a: &ReduceArgs) -> CmdResult {
    let started = Instant::now();
    let f = read_coloring(&a.io.input)?;
    let bundle = run_triples_pipeline(
        &f,
        PipelineConfig {
            window: a.window,
            s0: a.s0,
        },
    )?;
    let bytes = serde_json::to_vec(&bundle).expect("bundle serializes");
    let digest = hex::encode(Sha256::digest(&bytes));
    let passed = bundle.flags.all();
    let out = json!({"command": "reduce", "sha256": digest, "bundle": bundle});
    finish_report(&a.io, out, passed, started, "reduction")
}
