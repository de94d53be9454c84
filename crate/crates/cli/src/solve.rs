//! Per-item solver dispatch. Exact solvers that hit a size cap fall back to a
//! heuristic and say so in the method name.

use log::warn;
use metageo_core::lattice_tsp::{approx_walk, exact_walk_held_karp, exact_walk_line};
use metageo_core::metabelian::{compute_flow, realize_word, solve_approx, solve_exact};
use metageo_core::schema::{AnySteinerJson, TreeJson};
use metageo_core::steiner::{
    group_steiner_exact, group_steiner_via_representatives, mst_terminals_approx, rsmt_exact, InnerSolver,
};
use metageo_core::words::format_word;
use metageo_core::wreath::{assemble_wreath_word, evaluate, solve_wreath};
use metageo_core::{ApproxVariant, Caps, Error, GroupSpec, TreeResult, WalkInstance, WalkSolution, WalkSolver, Word};

use crate::record::ResultRecord;
use crate::SolverName;

/// The value a solver produced and whether it is known to be optimal.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub value: u64,
    pub exact: bool,
    pub method: String,
    pub word: Option<Word>,
}

fn fallback_method(variant: &str) -> String {
    format!("{variant} (exact cap exceeded)")
}

fn is_cap(e: &Error) -> bool {
    matches!(e, Error::CapExceeded { .. })
}

pub fn wreath(word: &Word, spec: &GroupSpec, solver: SolverName, caps: &Caps) -> metageo_core::Result<Outcome> {
    let g = evaluate(word, spec)?;
    let (walk_solver, exact, method) = match solver {
        SolverName::Exact => (WalkSolver::Exact, true, "exact"),
        SolverName::LineExact => (WalkSolver::LineExact, true, "line-exact"),
        SolverName::Heuristic => (
            WalkSolver::Heuristic(ApproxVariant::NearestNeighbor2Opt),
            false,
            "nn-2opt",
        ),
        SolverName::Mst => (WalkSolver::Heuristic(ApproxVariant::MstShortcut), false, "mst-shortcut"),
    };
    let (sol, exact, method) = match solve_wreath(&g, spec, walk_solver, caps.walk_targets) {
        Ok(sol) => (sol, exact, method.to_string()),
        Err(e) if is_cap(&e) => {
            warn!("{e}; using the nearest-neighbour heuristic for `{word}`");
            let h = WalkSolver::Heuristic(ApproxVariant::NearestNeighbor2Opt);
            (
                solve_wreath(&g, spec, h, caps.walk_targets)?,
                false,
                fallback_method("nn-2opt"),
            )
        }
        Err(e) => return Err(e),
    };
    Ok(Outcome {
        value: sol.length(),
        exact,
        method,
        word: Some(assemble_wreath_word(&g, spec, &sol)),
    })
}

pub fn metabelian(word: &Word, rank: usize, solver: SolverName, caps: &Caps) -> metageo_core::Result<Outcome> {
    let f = compute_flow(word, rank)?;
    let approx = |inner: InnerSolver, method: String| -> metageo_core::Result<Outcome> {
        let (est, tree) = solve_approx(&f, inner, caps)?;
        Ok(Outcome {
            value: est.estimate,
            exact: false,
            method,
            word: Some(realize_word(&f, &tree)?),
        })
    };
    let mst_fallback = |e: &Error| {
        warn!("{e}; using representative spanning trees for `{word}`");
        approx(InnerSolver::Mst, fallback_method("representatives-mst"))
    };
    match solver {
        SolverName::Exact => match solve_exact(&f, caps) {
            Ok(sol) => Ok(Outcome {
                value: sol.length(),
                exact: true,
                method: "exact".into(),
                word: Some(realize_word(&f, &sol.tree)?),
            }),
            Err(e) if is_cap(&e) => mst_fallback(&e),
            Err(e) => Err(e),
        },
        SolverName::Heuristic => match approx(InnerSolver::Exact, "representatives-exact".into()) {
            Err(e) if is_cap(&e) => mst_fallback(&e),
            other => other,
        },
        SolverName::Mst => approx(InnerSolver::Mst, "representatives-mst".into()),
        SolverName::LineExact => Err(Error::InvalidInstance(
            "line-exact applies to walks, not to metabelian words".into(),
        )),
    }
}

/// Fills the main value, method and word of a record.
pub fn fill(record: &mut ResultRecord, outcome: Outcome) {
    record.set_value(outcome.value, outcome.exact);
    record.method = outcome.method;
    record.word = outcome.word.as_ref().map(format_word);
}

pub fn tsp(inst: &WalkInstance, solver: SolverName, caps: &Caps) -> metageo_core::Result<(WalkSolution, bool, String)> {
    inst.validate()?;
    Ok(match solver {
        SolverName::Exact => match exact_walk_held_karp(inst, caps.walk_targets) {
            Ok(sol) => (sol, true, "held-karp".into()),
            Err(e) if is_cap(&e) => {
                warn!("{e}; using the nearest-neighbour heuristic");
                (
                    approx_walk(inst, ApproxVariant::NearestNeighbor2Opt),
                    false,
                    fallback_method("nn-2opt"),
                )
            }
            Err(e) => return Err(e),
        },
        SolverName::LineExact => (exact_walk_line(inst)?, true, "line-exact".into()),
        SolverName::Heuristic => (
            approx_walk(inst, ApproxVariant::NearestNeighbor2Opt),
            false,
            "nn-2opt".into(),
        ),
        SolverName::Mst => (
            approx_walk(inst, ApproxVariant::MstShortcut),
            false,
            "mst-shortcut".into(),
        ),
    })
}

pub fn steiner(
    inst: AnySteinerJson,
    solver: SolverName,
    caps: &Caps,
) -> metageo_core::Result<(TreeResult, bool, String)> {
    let fallback = |e: &Error| warn!("{e}; using a spanning-tree approximation");
    Ok(match inst {
        AnySteinerJson::Terminals(t) => {
            let inst = t.into_instance()?;
            match solver {
                SolverName::Exact => match rsmt_exact(&inst, caps) {
                    Ok(t) => (t, true, "dreyfus-wagner".into()),
                    Err(e) if is_cap(&e) => {
                        fallback(&e);
                        (mst_terminals_approx(&inst), false, fallback_method("mst"))
                    }
                    Err(e) => return Err(e),
                },
                SolverName::Heuristic | SolverName::Mst => (mst_terminals_approx(&inst), false, "mst".into()),
                SolverName::LineExact => return Err(line_exact_misuse()),
            }
        }
        AnySteinerJson::Groups(g) => {
            let inst = g.into_instance()?;
            let reps = |inner, name: &str| -> metageo_core::Result<(TreeResult, bool, String)> {
                Ok((
                    group_steiner_via_representatives(&inst, inner, caps)?,
                    false,
                    name.to_string(),
                ))
            };
            match solver {
                SolverName::Exact => match group_steiner_exact(&inst, caps.box_margin, caps) {
                    Ok(t) => (t, true, "group-dreyfus-wagner".into()),
                    Err(e) if is_cap(&e) => {
                        fallback(&e);
                        reps(InnerSolver::Mst, &fallback_method("representatives-mst"))?
                    }
                    Err(e) => return Err(e),
                },
                SolverName::Heuristic => match reps(InnerSolver::Exact, "representatives-exact") {
                    Err(e) if is_cap(&e) => {
                        fallback(&e);
                        reps(InnerSolver::Mst, &fallback_method("representatives-mst"))?
                    }
                    other => other?,
                },
                SolverName::Mst => reps(InnerSolver::Mst, "representatives-mst")?,
                SolverName::LineExact => return Err(line_exact_misuse()),
            }
        }
    })
}

fn line_exact_misuse() -> Error {
    Error::InvalidInstance("line-exact applies to walks, not to Steiner trees".into())
}

pub fn tree_record(record: &mut ResultRecord, tree: &TreeResult, exact: bool, method: String) {
    record.set_value(tree.total_length, exact);
    record.method = method;
    record.tree = Some(TreeJson::from_tree(tree));
}
