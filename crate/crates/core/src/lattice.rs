//! Points and unit edges of the integer lattice ℤʳ with the L1 metric.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of ℤʳ. Ordering is lexicographic on coordinates.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticePoint(Vec<i64>);

impl LatticePoint {
    pub fn new(coords: Vec<i64>) -> Self {
        LatticePoint(coords)
    }

    pub fn origin(rank: usize) -> Self {
        LatticePoint(vec![0; rank])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn is_origin(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// Moves one unit along `axis` (0-based) in direction `sign` (±1).
    pub fn step(&self, axis: usize, sign: i64) -> Self {
        let mut c = self.0.clone();
        c[axis] += sign;
        LatticePoint(c)
    }

    pub(crate) fn step_in_place(&mut self, axis: usize, sign: i64) {
        self.0[axis] += sign;
    }

    pub fn translate(&self, by: &LatticePoint) -> Self {
        LatticePoint(self.0.iter().zip(&by.0).map(|(a, b)| a + b).collect())
    }

    pub fn negate(&self) -> Self {
        LatticePoint(self.0.iter().map(|c| -c).collect())
    }

    pub fn check_dim(&self, rank: usize) -> Result<()> {
        if self.dim() == rank {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: rank,
                got: self.dim(),
            })
        }
    }
}

impl From<Vec<i64>> for LatticePoint {
    fn from(c: Vec<i64>) -> Self {
        LatticePoint(c)
    }
}

impl<const N: usize> From<[i64; N]> for LatticePoint {
    fn from(c: [i64; N]) -> Self {
        LatticePoint(c.to_vec())
    }
}

impl fmt::Debug for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// L1 distance `Σ |xᵢ − yᵢ|`.
pub fn manhattan(x: &LatticePoint, y: &LatticePoint) -> Result<u64> {
    x.check_dim(y.dim())?;
    Ok(manhattan_unchecked(x, y))
}

pub(crate) fn manhattan_unchecked(x: &LatticePoint, y: &LatticePoint) -> u64 {
    x.0.iter().zip(&y.0).map(|(a, b)| a.abs_diff(*b)).sum()
}

/// Unit edge from `base` to `base + e_axis`. Only the positive orientation is
/// ever stored; `axis` is 0-based.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct LatticeEdge {
    pub base: LatticePoint,
    pub axis: usize,
}

impl LatticeEdge {
    pub fn new(base: LatticePoint, axis: usize) -> Self {
        LatticeEdge { base, axis }
    }

    pub fn head(&self) -> LatticePoint {
        self.base.step(self.axis, 1)
    }

    /// Canonical edge joining two adjacent points, or `None` if they are not
    /// at L1 distance one.
    pub fn between(u: &LatticePoint, v: &LatticePoint) -> Option<Self> {
        if u.dim() != v.dim() || manhattan_unchecked(u, v) != 1 {
            return None;
        }
        let axis = (0..u.dim()).find(|&i| u.0[i] != v.0[i])?;
        let base = if u.0[axis] < v.0[axis] { u } else { v };
        Some(LatticeEdge::new(base.clone(), axis))
    }

    pub fn endpoints(&self) -> [LatticePoint; 2] {
        [self.base.clone(), self.head()]
    }
}

/// A single signed unit move along a 0-based axis.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Move {
    pub axis: usize,
    pub sign: i64,
}

/// Monotone staircase from `from` to `to`: all moves along axis 0 first, then
/// axis 1, and so on.
pub fn staircase_moves(from: &LatticePoint, to: &LatticePoint) -> Vec<Move> {
    let mut moves = Vec::with_capacity(manhattan_unchecked(from, to) as usize);
    for axis in 0..from.dim() {
        let delta = to.0[axis] - from.0[axis];
        let sign = delta.signum();
        for _ in 0..delta.unsigned_abs() {
            moves.push(Move { axis, sign });
        }
    }
    moves
}

/// The lattice edges traversed by [`staircase_moves`].
pub fn staircase_edges(from: &LatticePoint, to: &LatticePoint) -> Vec<LatticeEdge> {
    let mut at = from.clone();
    let mut edges = Vec::new();
    for m in staircase_moves(from, to) {
        let next = at.step(m.axis, m.sign);
        edges.push(LatticeEdge::between(&at, &next).expect("unit move"));
        at = next;
    }
    edges
}

/// Componentwise bounding box `[lo, hi]` of a nonempty point set.
pub fn bounding_box<'a, I>(points: I) -> Option<(LatticePoint, LatticePoint)>
where
    I: IntoIterator<Item = &'a LatticePoint>,
{
    let mut iter = points.into_iter();
    let first = iter.next()?;
    let mut lo = first.0.clone();
    let mut hi = first.0.clone();
    for p in iter {
        for i in 0..lo.len() {
            lo[i] = lo[i].min(p.0[i]);
            hi[i] = hi[i].max(p.0[i]);
        }
    }
    Some((LatticePoint(lo), LatticePoint(hi)))
}
