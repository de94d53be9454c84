//! Breadth-first exploration of word-metric balls. Used as ground truth for
//! the geodesic solvers.

use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct OracleCaps {
    pub max_radius: usize,
    pub max_states: usize,
}

impl Default for OracleCaps {
    fn default() -> Self {
        OracleCaps {
            max_radius: 10,
            max_states: 4_000_000,
        }
    }
}

impl OracleCaps {
    fn check_radius(&self, radius: usize) -> Result<()> {
        if radius > self.max_radius {
            return Err(Error::CapExceeded {
                what: "oracle radius",
                size: radius,
                cap: self.max_radius,
            });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum OracleDistance {
    Within(u64),
    ExceedsRadius,
}

impl OracleDistance {
    pub fn value(self) -> Option<u64> {
        match self {
            OracleDistance::Within(d) => Some(d),
            OracleDistance::ExceedsRadius => None,
        }
    }
}

/// All states within `radius` of `start`, with their distances.
pub struct Ball<S> {
    radius: usize,
    distances: HashMap<S, u32>,
}

impl<S: Hash + Eq + Clone> Ball<S> {
    pub fn explore<F>(start: S, radius: usize, caps: OracleCaps, mut neighbors: F) -> Result<Self>
    where
        F: FnMut(&S, &mut Vec<S>),
    {
        caps.check_radius(radius)?;
        let mut distances = HashMap::new();
        distances.insert(start.clone(), 0u32);
        let mut frontier = vec![start];
        let mut scratch = Vec::new();
        for d in 1..=radius as u32 {
            let mut next = Vec::new();
            for s in &frontier {
                scratch.clear();
                neighbors(s, &mut scratch);
                for n in scratch.drain(..) {
                    if let Entry::Vacant(v) = distances.entry(n) {
                        next.push(v.key().clone());
                        v.insert(d);
                    }
                }
                if distances.len() > caps.max_states {
                    return Err(Error::CapExceeded {
                        what: "oracle states",
                        size: distances.len(),
                        cap: caps.max_states,
                    });
                }
            }
            frontier = next;
        }
        Ok(Ball { radius, distances })
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.distances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distances.is_empty()
    }

    pub fn distance(&self, s: &S) -> OracleDistance {
        match self.distances.get(s) {
            Some(&d) => OracleDistance::Within(d as u64),
            None => OracleDistance::ExceedsRadius,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&S, u32)> {
        self.distances.iter().map(|(s, &d)| (s, d))
    }
}

/// Single-target search; stops as soon as `target` is reached.
pub fn distance_to<S, F>(
    start: S,
    target: &S,
    radius: usize,
    caps: OracleCaps,
    mut neighbors: F,
) -> Result<OracleDistance>
where
    S: Hash + Eq + Clone,
    F: FnMut(&S, &mut Vec<S>),
{
    caps.check_radius(radius)?;
    if &start == target {
        return Ok(OracleDistance::Within(0));
    }
    let mut seen = HashMap::new();
    seen.insert(start.clone(), ());
    let mut frontier = vec![start];
    let mut scratch = Vec::new();
    for d in 1..=radius as u64 {
        let mut next = Vec::new();
        for s in &frontier {
            scratch.clear();
            neighbors(s, &mut scratch);
            for n in scratch.drain(..) {
                if &n == target {
                    return Ok(OracleDistance::Within(d));
                }
                if let Entry::Vacant(v) = seen.entry(n) {
                    next.push(v.key().clone());
                    v.insert(());
                }
            }
            if seen.len() > caps.max_states {
                return Err(Error::CapExceeded {
                    what: "oracle states",
                    size: seen.len(),
                    cap: caps.max_states,
                });
            }
        }
        frontier = next;
    }
    Ok(OracleDistance::ExceedsRadius)
}
