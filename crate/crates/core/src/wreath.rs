//! Restricted wreath products `G = A ≀ ℤʳ` with a finitely generated abelian
//! lamp group `A`.
//!
//! An element is a finite lamp configuration `ℤʳ → A` together with a cursor
//! position. Words act as a state machine: `b_i^{±1}` moves the cursor one step
//! along axis `i`, `a_j^{±1}` multiplies the lamp under the cursor by the `j`-th
//! generator of `A`. Under this convention the group law is
//! `(f, b)(f', b') = (f · (f' shifted by b), b + b')`.
//!
//! The geodesic length of `g` is the cheapest walk from the origin through
//! every lit position, ending at the cursor, plus the word length of each lamp
//! value in `A`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bfs::{self, Ball, OracleCaps, OracleDistance};
use crate::error::{Error, Result};
use crate::lattice::{staircase_moves, LatticePoint};
use crate::lattice_tsp::{
    approx_walk, exact_walk_held_karp, exact_walk_line, ApproxVariant, WalkInstance, WalkSolution,
    DEFAULT_HELD_KARP_CAP,
};
use crate::words::{Alphabet, Generator, GeneratorKind, Letter, Sign, Word};

/// One cyclic factor of the lamp group.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum LampFactor {
    /// ℤ/m with m ≥ 2.
    Torsion(u32),
    /// ℤ.
    Free,
}

/// `A ≀ ℤʳ` with `A` the direct product of `lamp_factors`, in order; lamp
/// generator `a_j` generates the `j`-th factor.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GroupSpec {
    base_rank: usize,
    lamp_factors: Vec<LampFactor>,
}

impl GroupSpec {
    pub fn from_factors(base_rank: usize, lamp_factors: Vec<LampFactor>) -> Result<Self> {
        let bad = |reason: &str| Error::GroupSpec {
            text: format!("{lamp_factors:?} wr Z^{base_rank}"),
            reason: reason.to_string(),
        };
        if base_rank == 0 {
            return Err(bad("base rank must be at least 1"));
        }
        if lamp_factors.is_empty() {
            return Err(bad("lamp group must be nontrivial"));
        }
        if lamp_factors
            .iter()
            .any(|f| matches!(f, LampFactor::Torsion(m) if *m < 2))
        {
            return Err(bad("torsion moduli must be at least 2"));
        }
        Ok(GroupSpec {
            base_rank,
            lamp_factors,
        })
    }

    /// Torsion factors first, then `lamp_free_rank` copies of ℤ.
    pub fn new(base_rank: usize, lamp_moduli: &[u32], lamp_free_rank: usize) -> Result<Self> {
        let mut factors: Vec<LampFactor> = lamp_moduli.iter().map(|&m| LampFactor::Torsion(m)).collect();
        factors.extend(std::iter::repeat_n(LampFactor::Free, lamp_free_rank));
        GroupSpec::from_factors(base_rank, factors)
    }

    /// The lamplighter group ℤ₂ ≀ ℤʳ.
    pub fn lamplighter(base_rank: usize) -> Self {
        GroupSpec::new(base_rank, &[2], 0).expect("valid")
    }

    pub fn base_rank(&self) -> usize {
        self.base_rank
    }

    pub fn lamp_factors(&self) -> &[LampFactor] {
        &self.lamp_factors
    }

    pub fn lamp_moduli(&self) -> Vec<u32> {
        self.lamp_factors
            .iter()
            .filter_map(|f| match f {
                LampFactor::Torsion(m) => Some(*m),
                LampFactor::Free => None,
            })
            .collect()
    }

    pub fn lamp_free_rank(&self) -> usize {
        self.lamp_factors
            .iter()
            .filter(|f| matches!(f, LampFactor::Free))
            .count()
    }

    pub fn lamp_generators(&self) -> usize {
        self.lamp_factors.len()
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet::wreath(self.lamp_generators() as u32, self.base_rank as u32)
    }

    pub fn origin(&self) -> LatticePoint {
        LatticePoint::origin(self.base_rank)
    }

    fn check_letter(&self, l: &Letter) -> Result<()> {
        let g = l.generator;
        let rank = match g.kind {
            GeneratorKind::Lamp => self.lamp_generators(),
            GeneratorKind::Translation => self.base_rank,
            GeneratorKind::Metabelian => {
                return Err(Error::GeneratorOutOfRange {
                    name: 'x',
                    index: g.index,
                    reason: "metabelian generators do not act on a wreath product".into(),
                })
            }
        };
        if g.index == 0 || g.index as usize > rank {
            return Err(Error::GeneratorOutOfRange {
                name: g.kind.name(),
                index: g.index,
                reason: format!("rank is {rank}"),
            });
        }
        Ok(())
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, factor) in self.lamp_factors.iter().enumerate() {
            if i > 0 {
                write!(f, "x")?;
            }
            match factor {
                LampFactor::Torsion(m) => write!(f, "Z{m}")?,
                LampFactor::Free => write!(f, "Z")?,
            }
        }
        write!(f, " wr Z^{}", self.base_rank)
    }
}

/// Parses `Z2 wr Z^2`, `Z3xZ wr Z^1`, `Z wr Z`.
impl FromStr for GroupSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let bad = |reason: &str| Error::GroupSpec {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let parts: Vec<&str> = text.split_whitespace().collect();
        let [lamp, "wr", base] = parts[..] else {
            return Err(bad("expected `<lamp group> wr Z^<rank>`"));
        };
        let factors = lamp
            .split('x')
            .map(|tok| match tok.strip_prefix('Z') {
                Some("") => Ok(LampFactor::Free),
                Some(m) => m
                    .parse::<u32>()
                    .map(LampFactor::Torsion)
                    .map_err(|_| bad(&format!("bad lamp factor `{tok}`"))),
                None => Err(bad(&format!("bad lamp factor `{tok}`"))),
            })
            .collect::<Result<Vec<_>>>()?;
        let base_rank = match base {
            "Z" => 1,
            _ => base
                .strip_prefix("Z^")
                .and_then(|r| r.parse::<usize>().ok())
                .ok_or_else(|| bad("base group must be `Z` or `Z^<rank>`"))?,
        };
        GroupSpec::from_factors(base_rank, factors).map_err(|e| match e {
            Error::GroupSpec { reason, .. } => bad(&reason),
            other => other,
        })
    }
}

/// Element of the lamp group, one exponent per factor; torsion exponents are
/// kept in `[0, m)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AElement(Vec<i64>);

impl AElement {
    pub fn new(exponents: Vec<i64>, spec: &GroupSpec) -> Result<Self> {
        if exponents.len() != spec.lamp_generators() {
            return Err(Error::DimensionMismatch {
                expected: spec.lamp_generators(),
                got: exponents.len(),
            });
        }
        let mut a = AElement(exponents);
        a.normalize(spec);
        Ok(a)
    }

    pub fn identity(spec: &GroupSpec) -> Self {
        AElement(vec![0; spec.lamp_generators()])
    }

    pub fn exponents(&self) -> &[i64] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn normalize(&mut self, spec: &GroupSpec) {
        for (e, f) in self.0.iter_mut().zip(&spec.lamp_factors) {
            if let LampFactor::Torsion(m) = f {
                *e = e.rem_euclid(*m as i64);
            }
        }
    }

    pub fn mul(&self, other: &AElement, spec: &GroupSpec) -> AElement {
        let mut out = AElement(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect());
        out.normalize(spec);
        out
    }

    pub fn inverse(&self, spec: &GroupSpec) -> AElement {
        let mut out = AElement(self.0.iter().map(|e| -e).collect());
        out.normalize(spec);
        out
    }

    /// Multiplies in place by `a_slot^{sign}`.
    fn apply(&mut self, slot: usize, sign: i64, spec: &GroupSpec) {
        self.0[slot] += sign;
        if let LampFactor::Torsion(m) = spec.lamp_factors[slot] {
            self.0[slot] = self.0[slot].rem_euclid(m as i64);
        }
    }
}

/// Word length of `a` over the lamp generators:
/// `Σ min(e, m − e)` over torsion factors plus `Σ |e|` over free factors.
pub fn lamp_geodesic_length(a: &AElement, spec: &GroupSpec) -> u64 {
    a.0.iter()
        .zip(&spec.lamp_factors)
        .map(|(&e, f)| match f {
            LampFactor::Torsion(m) => {
                let e = e.rem_euclid(*m as i64) as u64;
                e.min(*m as u64 - e)
            }
            LampFactor::Free => e.unsigned_abs(),
        })
        .sum()
}

/// A word of length [`lamp_geodesic_length`] spelling `a`.
pub fn lamp_word(a: &AElement, spec: &GroupSpec) -> Vec<Letter> {
    let mut out = Vec::new();
    for (slot, (&e, f)) in a.0.iter().zip(&spec.lamp_factors).enumerate() {
        let (count, sign) = match f {
            LampFactor::Torsion(m) => {
                let m = *m as i64;
                let e = e.rem_euclid(m);
                if e <= m - e {
                    (e, Sign::Plus)
                } else {
                    (m - e, Sign::Minus)
                }
            }
            LampFactor::Free => (e.abs(), Sign::of(e)),
        };
        let letter = Letter::new(Generator::lamp(slot as u32 + 1), sign);
        out.extend(std::iter::repeat_n(letter, count as usize));
    }
    out
}

/// Normal form of an element of `A ≀ ℤʳ`: the lit lamps and the cursor.
/// Identity lamp values are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct WreathElement {
    support: BTreeMap<LatticePoint, AElement>,
    cursor: LatticePoint,
}

impl WreathElement {
    pub fn identity(spec: &GroupSpec) -> Self {
        WreathElement {
            support: BTreeMap::new(),
            cursor: spec.origin(),
        }
    }

    /// Validates dimensions and drops identity lamp values.
    pub fn new(
        support: impl IntoIterator<Item = (LatticePoint, AElement)>,
        cursor: LatticePoint,
        spec: &GroupSpec,
    ) -> Result<Self> {
        cursor.check_dim(spec.base_rank)?;
        let mut map = BTreeMap::new();
        for (p, a) in support {
            p.check_dim(spec.base_rank)?;
            let a = AElement::new(a.0, spec)?;
            if !a.is_identity() {
                map.insert(p, a);
            }
        }
        Ok(WreathElement { support: map, cursor })
    }

    pub fn support(&self) -> &BTreeMap<LatticePoint, AElement> {
        &self.support
    }

    pub fn cursor(&self) -> &LatticePoint {
        &self.cursor
    }

    pub fn is_identity(&self) -> bool {
        self.support.is_empty() && self.cursor.is_origin()
    }

    fn multiply_lamp(&mut self, at: &LatticePoint, by: &AElement, spec: &GroupSpec) {
        let value = match self.support.get(at) {
            Some(v) => v.mul(by, spec),
            None => by.clone(),
        };
        if value.is_identity() {
            self.support.remove(at);
        } else {
            self.support.insert(at.clone(), value);
        }
    }

    /// Right multiplication by a single letter (the state-machine step).
    pub fn apply_letter(&mut self, l: &Letter, spec: &GroupSpec) {
        let sign = l.sign.value();
        match l.generator.kind {
            GeneratorKind::Translation => self.cursor.step_in_place(l.generator.slot(), sign),
            GeneratorKind::Lamp => {
                let mut v = self
                    .support
                    .remove(&self.cursor)
                    .unwrap_or_else(|| AElement::identity(spec));
                v.apply(l.generator.slot(), sign, spec);
                if !v.is_identity() {
                    self.support.insert(self.cursor.clone(), v);
                }
            }
            GeneratorKind::Metabelian => unreachable!("rejected by check_letter"),
        }
    }

    /// Group law `(f, b)(f', b') = (f · f'(· − b), b + b')`.
    pub fn compose(&self, other: &WreathElement, spec: &GroupSpec) -> WreathElement {
        let mut out = self.clone();
        for (p, a) in &other.support {
            out.multiply_lamp(&p.translate(&self.cursor), a, spec);
        }
        out.cursor = self.cursor.translate(&other.cursor);
        out
    }

    pub fn inverse(&self, spec: &GroupSpec) -> WreathElement {
        let back = self.cursor.negate();
        WreathElement {
            support: self
                .support
                .iter()
                .map(|(p, a)| (p.translate(&back), a.inverse(spec)))
                .collect(),
            cursor: back,
        }
    }
}

fn check_word(w: &Word, spec: &GroupSpec) -> Result<()> {
    w.letters().iter().try_for_each(|l| spec.check_letter(l))
}

/// Runs the cursor state machine from the identity.
pub fn evaluate(w: &Word, spec: &GroupSpec) -> Result<WreathElement> {
    check_word(w, spec)?;
    let mut g = WreathElement::identity(spec);
    for l in w.letters() {
        g.apply_letter(l, spec);
    }
    Ok(g)
}

/// Computes the element through the block decomposition
/// `w = h₁c₁ h₂c₂ ⋯ h_k c_k h′` (translations `hᵢ`, lamp runs `cᵢ`): every
/// `cᵢ` becomes a lamp at the prefix sum `h₁ + ⋯ + hᵢ`, lamps sharing a
/// position are merged by multiplying in `A`, and the cursor is the total
/// translation.
pub fn normal_form(w: &Word, spec: &GroupSpec) -> Result<WreathElement> {
    check_word(w, spec)?;

    // Split into (h_i, c_i) blocks plus the trailing translation h'.
    let mut blocks: Vec<(LatticePoint, AElement)> = Vec::new();
    let mut h = spec.origin();
    let mut c: Option<AElement> = None;
    for l in w.letters() {
        match l.generator.kind {
            GeneratorKind::Translation => {
                if let Some(run) = c.take() {
                    blocks.push((std::mem::replace(&mut h, spec.origin()), run));
                }
                h.step_in_place(l.generator.slot(), l.sign.value());
            }
            _ => {
                c.get_or_insert_with(|| AElement::identity(spec))
                    .apply(l.generator.slot(), l.sign.value(), spec);
            }
        }
    }
    if let Some(run) = c.take() {
        blocks.push((std::mem::replace(&mut h, spec.origin()), run));
    }
    let trailing = h;

    // Conjugates c_i^{w_i}: position of each lamp run.
    let mut lamps: Vec<(LatticePoint, AElement)> = Vec::with_capacity(blocks.len());
    let mut position = spec.origin();
    for (hi, ci) in blocks {
        position = position.translate(&hi);
        lamps.push((position.clone(), ci));
    }
    let cursor = position.translate(&trailing);

    // Merge colliding positions: the earliest duplicate pair (i, j) with the
    // smallest j commutes c_i forward onto c_j and multiplies.
    loop {
        let collision = (1..lamps.len()).find_map(|j| (0..j).find(|&i| lamps[i].0 == lamps[j].0).map(|i| (i, j)));
        let Some((i, j)) = collision else { break };
        let (_, ci) = lamps.remove(i);
        let merged = ci.mul(&lamps[j - 1].1, spec);
        lamps[j - 1].1 = merged;
    }
    lamps.retain(|(_, a)| !a.is_identity());

    Ok(WreathElement {
        support: lamps.into_iter().collect(),
        cursor,
    })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum WalkSolver {
    #[default]
    Exact,
    /// Closed form, only for base rank 1.
    LineExact,
    Heuristic(ApproxVariant),
}

/// A solved geodesic: the lamp cost, the walk through the lit positions, and
/// those positions in visiting order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WreathGeodesic {
    pub lamp_length: u64,
    pub walk: WalkSolution,
    pub stops: Vec<LatticePoint>,
}

impl WreathGeodesic {
    pub fn length(&self) -> u64 {
        self.lamp_length + self.walk.length
    }
}

pub fn walk_instance(g: &WreathElement, spec: &GroupSpec) -> WalkInstance {
    WalkInstance {
        start: spec.origin(),
        targets: g.support.keys().cloned().collect(),
        end: g.cursor.clone(),
    }
}

/// Lamp costs plus the chosen solver's walk. Lamps at the origin or under the
/// cursor are ordinary zero-distance stops.
pub fn solve_wreath(
    g: &WreathElement,
    spec: &GroupSpec,
    solver: WalkSolver,
    held_karp_cap: usize,
) -> Result<WreathGeodesic> {
    let inst = walk_instance(g, spec);
    let walk = match solver {
        WalkSolver::Exact => exact_walk_held_karp(&inst, held_karp_cap)?,
        WalkSolver::LineExact => exact_walk_line(&inst)?,
        WalkSolver::Heuristic(v) => approx_walk(&inst, v),
    };
    let lamp_length = g.support.values().map(|a| lamp_geodesic_length(a, spec)).sum();
    let stops = walk.order.iter().map(|&i| inst.targets[i].clone()).collect();
    Ok(WreathGeodesic {
        lamp_length,
        walk,
        stops,
    })
}

pub fn geodesic_length_wreath(g: &WreathElement, spec: &GroupSpec, solver: WalkSolver) -> Result<u64> {
    solve_wreath(g, spec, solver, DEFAULT_HELD_KARP_CAP).map(|s| s.length())
}

/// Spells out a solved geodesic: axis-ascending staircase moves between stops
/// and a minimal lamp word at each stop.
pub fn assemble_wreath_word(g: &WreathElement, spec: &GroupSpec, solution: &WreathGeodesic) -> Word {
    let mut letters = Vec::with_capacity(solution.length() as usize);
    let mut at = spec.origin();
    let travel = |from: &LatticePoint, to: &LatticePoint, letters: &mut Vec<Letter>| {
        for m in staircase_moves(from, to) {
            letters.push(Letter::new(Generator::translation(m.axis as u32 + 1), Sign::of(m.sign)));
        }
    };
    for stop in &solution.stops {
        travel(&at, stop, &mut letters);
        letters.extend(lamp_word(&g.support[stop], spec));
        at = stop.clone();
    }
    travel(&at, &g.cursor, &mut letters);
    Word::from_letters(letters)
}

pub fn geodesic_word_wreath(g: &WreathElement, spec: &GroupSpec, solver: WalkSolver) -> Result<Word> {
    let solution = solve_wreath(g, spec, solver, DEFAULT_HELD_KARP_CAP)?;
    Ok(assemble_wreath_word(g, spec, &solution))
}

fn wreath_neighbors(spec: &GroupSpec) -> impl Fn(&WreathElement, &mut Vec<WreathElement>) + '_ {
    let letters = spec.alphabet().letters();
    move |g, out| {
        for l in &letters {
            let mut h = g.clone();
            h.apply_letter(l, spec);
            out.push(h);
        }
    }
}

/// Word-metric distance from the identity by breadth-first search over
/// elements, if it is at most `radius`.
pub fn bfs_geodesic_oracle_wreath(
    g: &WreathElement,
    spec: &GroupSpec,
    radius: usize,
    caps: OracleCaps,
) -> Result<OracleDistance> {
    bfs::distance_to(WreathElement::identity(spec), g, radius, caps, wreath_neighbors(spec))
}

/// The whole ball of `radius` around the identity, for batch comparisons.
pub fn wreath_ball(spec: &GroupSpec, radius: usize, caps: OracleCaps) -> Result<Ball<WreathElement>> {
    Ball::explore(WreathElement::identity(spec), radius, caps, wreath_neighbors(spec))
}
