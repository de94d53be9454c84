use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use metageo_core::bfs::{Ball, OracleDistance};
use metageo_core::metabelian::{self, compute_flow, metabelian_ball};
use metageo_core::sample::{random_word_batch, reduced_words_up_to};
use metageo_core::words::format_word;
use metageo_core::wreath::{evaluate, wreath_ball};
use metageo_core::{Caps, Flow, Word, WreathElement};

use crate::solve::{self, Outcome};
use crate::{exact_reference, oracle_caps, CliError, Options, OracleArgs, SolverName, Target};

/// Default word-length bound for exhaustive checks.
const DEFAULT_RADIUS: usize = 6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleSummary {
    pub target: String,
    pub solver: String,
    /// `bfs` for exhaustive enumeration, `exact` for sampled words.
    pub reference: String,
    /// Longest word considered.
    pub bound: usize,
    pub words: usize,
    /// Words whose exact reference was out of reach.
    pub skipped: usize,
    /// Results claimed exact that differ from the reference.
    pub mismatches: usize,
    /// Estimates below the reference, or above the proven bound.
    pub bound_violations: usize,
    pub max_ratio: f64,
    pub mean_ratio: f64,
    /// Largest `(estimate - reference) / reference`.
    pub max_excess: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub worst_word: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub worst_estimate: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub worst_reference: Option<u64>,
    pub wall_ms: f64,
}

impl OracleSummary {
    pub fn passed(&self) -> bool {
        self.mismatches == 0 && self.bound_violations == 0
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "{} solver={} reference={} bound={} words={} skipped={} mismatches={} bound_violations={} max_ratio={:.4} mean_ratio={:.4} max_excess={:.4}",
            self.target,
            self.solver,
            self.reference,
            self.bound,
            self.words,
            self.skipped,
            self.mismatches,
            self.bound_violations,
            self.max_ratio,
            self.mean_ratio,
            self.max_excess
        );
        if let (Some(w), Some(e), Some(r)) = (&self.worst_word, self.worst_estimate, self.worst_reference) {
            s.push_str(&format!(" worst=\"{w}\" ({e} vs {r})"));
        }
        s
    }
}

/// One compared word.
struct Check {
    word: Word,
    outcome: Option<Outcome>,
    reference: Option<u64>,
}

pub fn run(opts: &Options, args: &OracleArgs, target: &Target, caps: &Caps) -> Result<OracleSummary, CliError> {
    let start = Instant::now();
    let alphabet = match target {
        Target::Wreath(spec) => spec.alphabet(),
        Target::Metabelian(rank) => metabelian::alphabet(*rank),
    };
    let (reference, bound, checks) = match args.samples {
        None => {
            let radius = opts.radius.unwrap_or(DEFAULT_RADIUS);
            let cap = oracle_caps().max_radius;
            if radius > cap {
                return Err(CliError::Config(format!(
                    "--radius {radius} exceeds the oracle cap {cap}"
                )));
            }
            let words = reduced_words_up_to(&alphabet, radius);
            ("bfs", radius, exhaustive(words, radius, opts.solver, target, caps)?)
        }
        Some(n) => {
            let words = random_word_batch(opts.seed, &alphabet, n, args.max_len);
            ("exact", args.max_len, sampled(words, opts.solver, target, caps))
        }
    };
    let mut summary = summarize(&checks, opts.solver, target);
    summary.target = match target {
        Target::Wreath(spec) => spec.to_string(),
        Target::Metabelian(rank) => format!("F/F'' rank {rank}"),
    };
    summary.reference = reference.into();
    summary.bound = bound;
    summary.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(summary)
}

fn estimate(w: &Word, solver: SolverName, target: &Target, caps: &Caps) -> Option<Outcome> {
    let out = match target {
        Target::Wreath(spec) => solve::wreath(w, spec, solver, caps),
        Target::Metabelian(rank) => solve::metabelian(w, *rank, solver, caps),
    };
    out.map_err(|e| log::warn!("`{w}`: {e}")).ok()
}

fn exhaustive(
    words: Vec<Word>,
    radius: usize,
    solver: SolverName,
    target: &Target,
    caps: &Caps,
) -> Result<Vec<Check>, CliError> {
    let config = |e: metageo_core::Error| CliError::Config(e.to_string());
    let lookup = |d: OracleDistance| d.value();
    Ok(match target {
        Target::Wreath(spec) => {
            let ball: Ball<WreathElement> = wreath_ball(spec, radius, oracle_caps()).map_err(config)?;
            words
                .into_par_iter()
                .map(|w| Check {
                    reference: evaluate(&w, spec).ok().and_then(|g| lookup(ball.distance(&g))),
                    outcome: estimate(&w, solver, target, caps),
                    word: w,
                })
                .collect()
        }
        Target::Metabelian(rank) => {
            let ball: Ball<Flow> = metabelian_ball(*rank, radius, oracle_caps()).map_err(config)?;
            words
                .into_par_iter()
                .map(|w| Check {
                    reference: compute_flow(&w, *rank).ok().and_then(|f| lookup(ball.distance(&f))),
                    outcome: estimate(&w, solver, target, caps),
                    word: w,
                })
                .collect()
        }
    })
}

fn sampled(words: Vec<Word>, solver: SolverName, target: &Target, caps: &Caps) -> Vec<Check> {
    words
        .into_par_iter()
        .map(|w| Check {
            reference: exact_reference(&w, target, caps),
            outcome: estimate(&w, solver, target, caps),
            word: w,
        })
        .collect()
}

fn summarize(checks: &[Check], solver: SolverName, target: &Target) -> OracleSummary {
    let mut s = OracleSummary {
        target: String::new(),
        solver: format!("{solver:?}").to_lowercase(),
        reference: String::new(),
        bound: 0,
        words: checks.len(),
        skipped: 0,
        mismatches: 0,
        bound_violations: 0,
        max_ratio: 1.0,
        mean_ratio: 1.0,
        max_excess: 0.0,
        worst_word: None,
        worst_estimate: None,
        worst_reference: None,
        wall_ms: 0.0,
    };
    let mut ratio_sum = 0.0;
    let mut compared = 0usize;
    for c in checks {
        let (Some(o), Some(reference)) = (&c.outcome, c.reference) else {
            s.skipped += 1;
            continue;
        };
        compared += 1;
        let r = crate::ratio(o.value, reference);
        ratio_sum += r;
        let excess = r - 1.0;
        if o.exact && o.value != reference {
            s.mismatches += 1;
        }
        // The representative estimate with exact inner trees satisfies
        // estimate - exact <= 2 exact.
        let proven_bound = matches!(target, Target::Metabelian(_)) && o.method == "representatives-exact";
        if o.value < reference || (proven_bound && excess > 2.0) {
            s.bound_violations += 1;
        }
        if s.worst_word.is_none() || r > s.max_ratio {
            s.max_ratio = r;
            s.max_excess = excess;
            s.worst_word = Some(format_word(&c.word));
            s.worst_estimate = Some(o.value);
            s.worst_reference = Some(reference);
        }
    }
    if compared > 0 {
        s.mean_ratio = ratio_sum / compared as f64;
    }
    s
}
