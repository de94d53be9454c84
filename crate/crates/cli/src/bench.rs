//! Walk-solver timings on seeded random instances.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use metageo_core::lattice_tsp::{approx_walk, exact_walk_held_karp};
use metageo_core::sample::{random_walk_instance, seeded_rng};
use metageo_core::{ApproxVariant, Caps, WalkInstance, WalkSolution};

use crate::{BenchArgs, CliError, Format, Options};

const HELD_KARP: &str = "held-karp";
const HEURISTICS: [(&str, ApproxVariant); 2] = [
    ("nn-2opt", ApproxVariant::NearestNeighbor2Opt),
    ("mst-shortcut", ApproxVariant::MstShortcut),
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub size: usize,
    pub solver: String,
    pub instances: usize,
    pub median_ms: f64,
    /// Mean of heuristic length over Held–Karp length, when both ran.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_ratio: Option<f64>,
}

#[derive(Serialize)]
struct ListedInstance<'a> {
    size: usize,
    rep: usize,
    instance: &'a WalkInstance,
}

#[derive(Serialize)]
struct Crossover {
    /// Smallest size at which Held–Karp's median time exceeds each
    /// heuristic's.
    crossover: BTreeMap<String, Option<usize>>,
}

/// Instances for every size in order, `reps` per size, all from one seeded
/// stream.
pub fn instances(args: &BenchArgs, rank: usize, seed: u64) -> Vec<(usize, Vec<WalkInstance>)> {
    let mut rng = seeded_rng(seed);
    (args.min_size..=args.max_size)
        .map(|size| {
            let batch = (0..args.reps)
                .map(|_| random_walk_instance(&mut rng, rank, size, args.spread))
                .collect();
            (size, batch)
        })
        .collect()
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n == 0 {
        0.0
    } else if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64() * 1e3)
}

pub fn run(opts: &Options, args: &BenchArgs, caps: &Caps, out: &mut dyn Write) -> Result<(), CliError> {
    if args.min_size > args.max_size || args.reps == 0 || args.spread < 0 {
        return Err(CliError::Config(
            "bench needs min-size <= max-size, reps >= 1 and spread >= 0".into(),
        ));
    }
    let rank = opts.rank.unwrap_or(2);
    if rank == 0 {
        return Err(CliError::Config("--rank must be at least 1".into()));
    }
    let side = 2 * args.spread as u128 + 1;
    if (args.max_size as u128) > side.saturating_pow(rank as u32) {
        return Err(CliError::Config("spread too small for the requested sizes".into()));
    }
    let write_err = |source| CliError::Io {
        context: "cannot write output".into(),
        source,
    };
    let sets = instances(args, rank, opts.seed);

    if args.list_instances {
        for (size, batch) in &sets {
            for (rep, instance) in batch.iter().enumerate() {
                let line = serde_json::to_string(&ListedInstance {
                    size: *size,
                    rep,
                    instance,
                })
                .expect("plain data serializes");
                writeln!(out, "{line}").map_err(write_err)?;
            }
        }
        return Ok(());
    }

    let mut rows = Vec::new();
    for (size, batch) in &sets {
        let exact: Option<Vec<(WalkSolution, f64)>> = (*size <= caps.walk_targets).then(|| {
            batch
                .iter()
                .map(|inst| {
                    let (sol, ms) = timed(|| exact_walk_held_karp(inst, caps.walk_targets));
                    (sol.expect("size within cap"), ms)
                })
                .collect()
        });
        if let Some(results) = &exact {
            rows.push(BenchRow {
                size: *size,
                solver: HELD_KARP.into(),
                instances: batch.len(),
                median_ms: median(results.iter().map(|r| r.1).collect()),
                mean_ratio: None,
            });
        }
        for (name, variant) in HEURISTICS {
            let results: Vec<(WalkSolution, f64)> =
                batch.iter().map(|inst| timed(|| approx_walk(inst, variant))).collect();
            let mean_ratio = exact.as_ref().map(|ex| {
                let sum: f64 = results
                    .iter()
                    .zip(ex)
                    .map(|((h, _), (e, _))| crate::ratio(h.length, e.length))
                    .sum();
                sum / results.len() as f64
            });
            rows.push(BenchRow {
                size: *size,
                solver: name.into(),
                instances: batch.len(),
                median_ms: median(results.iter().map(|r| r.1).collect()),
                mean_ratio,
            });
        }
    }

    let crossover = Crossover {
        crossover: HEURISTICS
            .iter()
            .map(|(name, _)| (name.to_string(), crossover_size(&rows, name)))
            .collect(),
    };
    match opts.format {
        Format::Json => {
            for row in &rows {
                let line = serde_json::to_string(row).expect("plain data serializes");
                writeln!(out, "{line}").map_err(write_err)?;
            }
            let line = serde_json::to_string(&crossover).expect("plain data serializes");
            writeln!(out, "{line}").map_err(write_err)?;
        }
        Format::Text => {
            let mut text = format!(
                "{:>4}  {:<14}{:>12}{:>12}\n",
                "size", "solver", "median_ms", "mean_ratio"
            );
            for row in &rows {
                let ratio = row.mean_ratio.map_or("-".to_string(), |r| format!("{r:.4}"));
                text.push_str(&format!(
                    "{:>4}  {:<14}{:>12.4}{:>12}\n",
                    row.size, row.solver, row.median_ms, ratio
                ));
            }
            for (name, size) in &crossover.crossover {
                let at = size.map_or("none".to_string(), |s| s.to_string());
                text.push_str(&format!("crossover {name}: {at}\n"));
            }
            out.write_all(text.as_bytes()).map_err(write_err)?;
        }
    }
    Ok(())
}

fn crossover_size(rows: &[BenchRow], heuristic: &str) -> Option<usize> {
    let median = |size: usize, solver: &str| {
        rows.iter()
            .find(|r| r.size == size && r.solver == solver)
            .map(|r| r.median_ms)
    };
    rows.iter()
        .filter(|r| r.solver == HELD_KARP)
        .find(|r| median(r.size, heuristic).is_some_and(|h| r.median_ms > h))
        .map(|r| r.size)
}
