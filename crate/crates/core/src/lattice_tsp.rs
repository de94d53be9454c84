//! Minimum walks (traveling-salesman paths) on finite subsets of ℤʳ under
//! the L1 metric: start at a point, visit every target, stop at an end point.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{manhattan_unchecked, LatticePoint};

pub const DEFAULT_HELD_KARP_CAP: usize = 18;
pub const BRUTEFORCE_CAP: usize = 9;

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct WalkInstance {
    pub start: LatticePoint,
    pub targets: Vec<LatticePoint>,
    pub end: LatticePoint,
}

impl WalkInstance {
    /// Checks that all points share one dimension and that targets are
    /// pairwise distinct.
    pub fn new(start: LatticePoint, targets: Vec<LatticePoint>, end: LatticePoint) -> Result<Self> {
        let inst = WalkInstance { start, targets, end };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        let r = self.start.dim();
        self.end.check_dim(r)?;
        for t in &self.targets {
            t.check_dim(r)?;
        }
        if !self.targets.iter().all_unique() {
            return Err(Error::InvalidInstance("walk targets must be pairwise distinct".into()));
        }
        Ok(())
    }

    pub fn rank(&self) -> usize {
        self.start.dim()
    }

    /// L1 length of visiting the targets in `order` (indices into `targets`).
    pub fn walk_length(&self, order: &[usize]) -> u64 {
        let mut at = &self.start;
        let mut total = 0;
        for &i in order {
            total += manhattan_unchecked(at, &self.targets[i]);
            at = &self.targets[i];
        }
        total + manhattan_unchecked(at, &self.end)
    }

    pub fn is_permutation(&self, order: &[usize]) -> bool {
        order.len() == self.targets.len() && order.iter().all(|&i| i < self.targets.len()) && order.iter().all_unique()
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct WalkSolution {
    pub length: u64,
    pub order: Vec<usize>,
}

impl WalkSolution {
    fn from_order(inst: &WalkInstance, order: Vec<usize>) -> Self {
        WalkSolution {
            length: inst.walk_length(&order),
            order,
        }
    }
}

/// Bitmask dynamic program. Among optimal walks the lexicographically
/// smallest visiting order is returned.
pub fn exact_walk_held_karp(inst: &WalkInstance, cap: usize) -> Result<WalkSolution> {
    inst.validate()?;
    let n = inst.targets.len();
    if n > cap {
        return Err(Error::CapExceeded {
            what: "Held-Karp targets",
            size: n,
            cap,
        });
    }
    if n == 0 {
        return Ok(WalkSolution::from_order(inst, Vec::new()));
    }
    let t = &inst.targets;
    let dist: Vec<Vec<u64>> = t
        .iter()
        .map(|p| t.iter().map(|q| manhattan_unchecked(p, q)).collect())
        .collect();
    let full = (1usize << n) - 1;

    // rest[mask * n + i]: cheapest way to finish when standing at target i
    // after visiting exactly `mask` (which contains i).
    let mut rest = vec![u64::MAX; (full + 1) * n];
    for i in 0..n {
        rest[full * n + i] = manhattan_unchecked(&t[i], &inst.end);
    }
    for mask in (1..full).rev() {
        for i in (0..n).filter(|&i| mask & (1 << i) != 0) {
            let mut best = u64::MAX;
            for j in (0..n).filter(|&j| mask & (1 << j) == 0) {
                let c = dist[i][j] + rest[(mask | 1 << j) * n + j];
                best = best.min(c);
            }
            rest[mask * n + i] = best;
        }
    }

    let first_cost = |i: usize| manhattan_unchecked(&inst.start, &t[i]) + rest[(1 << i) * n + i];
    let length = (0..n).map(first_cost).min().expect("n > 0");
    let mut cur = (0..n).find(|&i| first_cost(i) == length).expect("optimum attained");
    let mut mask = 1usize << cur;
    let mut order = vec![cur];
    while mask != full {
        let here = rest[mask * n + cur];
        let next = (0..n)
            .filter(|&j| mask & (1 << j) == 0)
            .find(|&j| dist[cur][j] + rest[(mask | 1 << j) * n + j] == here)
            .expect("optimum attained");
        mask |= 1 << next;
        order.push(next);
        cur = next;
    }
    debug_assert_eq!(inst.walk_length(&order), length);
    Ok(WalkSolution { length, order })
}

/// Closed-form optimum for ℤ¹: sweep to one extreme, then the other, then to
/// the end point.
pub fn exact_walk_line(inst: &WalkInstance) -> Result<WalkSolution> {
    inst.validate()?;
    if inst.rank() != 1 {
        return Err(Error::LineSolverDimension(inst.rank()));
    }
    let x = |p: &LatticePoint| p.coords()[0];
    let (s, e) = (x(&inst.start), x(&inst.end));
    let xs = inst.targets.iter().map(x);
    let lo = xs.clone().chain([s, e]).min().expect("nonempty");
    let hi = xs.chain([s, e]).max().expect("nonempty");
    let span = (hi - lo) as u64;
    let left_first = span + ((s - lo) + (hi - e)) as u64;
    let right_first = span + ((hi - s) + (e - lo)) as u64;
    let length = left_first.min(right_first);

    // Targets in the order a sweep meets them.
    let idx: Vec<usize> = (0..inst.targets.len()).collect();
    let by_x = |desc: bool| {
        move |a: &usize, b: &usize| {
            let (xa, xb) = (x(&inst.targets[*a]), x(&inst.targets[*b]));
            if desc {
                xb.cmp(&xa)
            } else {
                xa.cmp(&xb)
            }
        }
    };
    let sweep = |go_left: bool| -> Vec<usize> {
        let (mut near, mut far): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| {
            let xi = x(&inst.targets[i]);
            if go_left {
                xi <= s
            } else {
                xi >= s
            }
        });
        near.sort_by(by_x(go_left));
        far.sort_by(by_x(!go_left));
        near.extend(far);
        near
    };
    let candidates = [sweep(true), sweep(false)];
    let order = candidates
        .into_iter()
        .min_by_key(|o| inst.walk_length(o))
        .expect("two candidates");
    debug_assert_eq!(inst.walk_length(&order), length);
    Ok(WalkSolution { length, order })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ApproxVariant {
    /// Nearest-neighbour construction followed by path 2-opt.
    #[default]
    NearestNeighbor2Opt,
    /// Spanning-tree walk with shortcutting; at most twice the optimum.
    MstShortcut,
}

pub fn approx_walk(inst: &WalkInstance, variant: ApproxVariant) -> WalkSolution {
    let order = match variant {
        ApproxVariant::NearestNeighbor2Opt => {
            let mut order = nearest_neighbor_order(inst);
            two_opt(inst, &mut order);
            order
        }
        ApproxVariant::MstShortcut => mst_shortcut_order(inst),
    };
    WalkSolution::from_order(inst, order)
}

fn nearest_neighbor_order(inst: &WalkInstance) -> Vec<usize> {
    let n = inst.targets.len();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut at = &inst.start;
    for _ in 0..n {
        let next = (0..n)
            .filter(|&j| !visited[j])
            .min_by_key(|&j| manhattan_unchecked(at, &inst.targets[j]))
            .expect("unvisited target");
        visited[next] = true;
        order.push(next);
        at = &inst.targets[next];
    }
    order
}

/// Segment reversal with both path ends pinned, repeated to a local optimum.
fn two_opt(inst: &WalkInstance, order: &mut [usize]) {
    let n = order.len();
    if n < 2 {
        return;
    }
    let d = |a: &LatticePoint, b: &LatticePoint| manhattan_unchecked(a, b) as i64;
    loop {
        let mut improved = false;
        for i in 1..=n {
            for j in i + 1..=n {
                let (a, b) = (path_point(inst, order, i - 1), path_point(inst, order, i));
                let (c, e) = (path_point(inst, order, j), path_point(inst, order, j + 1));
                let delta = d(a, c) + d(b, e) - d(a, b) - d(c, e);
                if delta < 0 {
                    order[i - 1..j].reverse();
                    improved = true;
                }
            }
        }
        if !improved {
            break;
        }
    }
}

/// Position `k` of the full path `start, targets[order[..]], end`.
fn path_point<'a>(inst: &'a WalkInstance, order: &[usize], k: usize) -> &'a LatticePoint {
    match k {
        0 => &inst.start,
        k if k == order.len() + 1 => &inst.end,
        k => &inst.targets[order[k - 1]],
    }
}

/// Preorder walk of a minimum spanning tree over start, targets and end,
/// rooted at the start and descending into the branch holding the end last.
/// Every tree edge off the start–end tree path is paid twice and every path
/// edge once, so the walk is at most twice the spanning tree weight.
fn mst_shortcut_order(inst: &WalkInstance) -> Vec<usize> {
    let n = inst.targets.len();
    if n == 0 {
        return Vec::new();
    }
    let end_node = n + 1;
    let node = |k: usize| -> &LatticePoint {
        match k {
            0 => &inst.start,
            k if k == end_node => &inst.end,
            k => &inst.targets[k - 1],
        }
    };
    let m = n + 2;
    let mut parent = vec![usize::MAX; m];
    let mut best = vec![u64::MAX; m];
    let mut in_tree = vec![false; m];
    best[0] = 0;
    for _ in 0..m {
        let v = (0..m)
            .filter(|&v| !in_tree[v])
            .min_by_key(|&v| best[v])
            .expect("vertex left");
        in_tree[v] = true;
        for u in (0..m).filter(|&u| !in_tree[u]) {
            let w = manhattan_unchecked(node(v), node(u));
            if w < best[u] {
                best[u] = w;
                parent[u] = v;
            }
        }
    }
    let mut children = vec![Vec::new(); m];
    for v in 1..m {
        children[parent[v]].push(v);
    }
    let mut on_path = vec![false; m];
    let mut v = end_node;
    while v != 0 {
        on_path[v] = true;
        v = parent[v];
    }

    enum Frame {
        Enter(usize),
        EmitEnd,
    }
    let mut order = Vec::with_capacity(n);
    let mut stack = vec![Frame::Enter(0)];
    while let Some(frame) = stack.pop() {
        match frame {
            Frame::EmitEnd => {}
            Frame::Enter(v) => {
                if v == end_node {
                    stack.push(Frame::EmitEnd);
                } else if v != 0 {
                    order.push(v - 1);
                }
                // LIFO: the branch toward the end is pushed first, so it runs last.
                let kids = &children[v];
                if let Some(&p) = kids.iter().find(|&&c| on_path[c]) {
                    stack.push(Frame::Enter(p));
                }
                for &c in kids.iter().rev().filter(|&&c| !on_path[c]) {
                    stack.push(Frame::Enter(c));
                }
            }
        }
    }
    order
}

/// Exhaustive search over all visiting orders; the first minimum in
/// lexicographic order wins.
pub fn permutation_bruteforce(inst: &WalkInstance) -> Result<WalkSolution> {
    inst.validate()?;
    let n = inst.targets.len();
    if n > BRUTEFORCE_CAP {
        return Err(Error::CapExceeded {
            what: "brute-force targets",
            size: n,
            cap: BRUTEFORCE_CAP,
        });
    }
    let mut best: Option<WalkSolution> = None;
    for perm in (0..n).permutations(n) {
        let len = inst.walk_length(&perm);
        if best.as_ref().is_none_or(|b| len < b.length) {
            best = Some(WalkSolution {
                length: len,
                order: perm,
            });
        }
    }
    Ok(best.expect("at least one permutation"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::{random_walk_instance, seeded_rng};
    use proptest::prelude::*;

    fn pts(v: &[&[i64]]) -> Vec<LatticePoint> {
        v.iter().map(|c| LatticePoint::new(c.to_vec())).collect()
    }

    fn inst(start: &[i64], targets: &[&[i64]], end: &[i64]) -> WalkInstance {
        WalkInstance::new(
            LatticePoint::new(start.to_vec()),
            pts(targets),
            LatticePoint::new(end.to_vec()),
        )
        .unwrap()
    }

    #[test]
    fn held_karp_examples() {
        let i = inst(&[0, 0], &[&[1, 0], &[0, 1]], &[0, 0]);
        assert_eq!(exact_walk_held_karp(&i, 18).unwrap().length, 4);
        assert_eq!(permutation_bruteforce(&i).unwrap().length, 4);

        let i = inst(&[0, 0], &[], &[3, -4]);
        let s = exact_walk_held_karp(&i, 18).unwrap();
        assert_eq!((s.length, s.order.len()), (7, 0));

        let i = inst(&[0, 0], &[&[2, 5]], &[1, 1]);
        assert_eq!(exact_walk_held_karp(&i, 18).unwrap().length, 7 + 5);
    }

    #[test]
    fn three_point_loop_is_eight_by_enumeration() {
        let i = inst(&[0, 0], &[&[2, 0], &[0, 2], &[1, 1]], &[0, 0]);
        // Every order, written out: the loop has to reach x = 2 and y = 2.
        let lens: Vec<u64> = (0..3).permutations(3).map(|p| i.walk_length(&p)).collect();
        assert_eq!(lens, vec![10, 8, 10, 8, 10, 10]);
        assert_eq!(permutation_bruteforce(&i).unwrap().length, 8);
        let hk = exact_walk_held_karp(&i, 18).unwrap();
        assert_eq!(hk.length, 8);
        assert_eq!(hk.order, vec![0, 2, 1]);
    }

    #[test]
    fn held_karp_breaks_ties_lexicographically() {
        // Both orders cost 4.
        let i = inst(&[0, 0], &[&[0, 1], &[1, 0]], &[0, 0]);
        assert_eq!(exact_walk_held_karp(&i, 18).unwrap().order, vec![0, 1]);
        assert_eq!(permutation_bruteforce(&i).unwrap().order, vec![0, 1]);
    }

    #[test]
    fn caps_and_validation() {
        let many: Vec<LatticePoint> = (0..10).map(|k| LatticePoint::from([k, 0])).collect();
        let i = WalkInstance::new(LatticePoint::from([0, 0]), many, LatticePoint::from([0, 0])).unwrap();
        assert!(matches!(exact_walk_held_karp(&i, 5), Err(Error::CapExceeded { .. })));
        assert!(matches!(permutation_bruteforce(&i), Err(Error::CapExceeded { .. })));
        assert!(WalkInstance::new(LatticePoint::from([0]), pts(&[&[1], &[1]]), LatticePoint::from([0])).is_err());
        assert!(WalkInstance::new(LatticePoint::from([0]), pts(&[&[1, 2]]), LatticePoint::from([0])).is_err());
    }

    #[test]
    fn line_examples() {
        assert_eq!(exact_walk_line(&inst(&[0], &[&[5]], &[0])).unwrap().length, 10);
        let s = exact_walk_line(&inst(&[0], &[&[-2], &[3]], &[1])).unwrap();
        assert_eq!(s.length, 9);
        assert_eq!(s.order, vec![0, 1]);
        assert_eq!(exact_walk_line(&inst(&[0], &[], &[4])).unwrap().length, 4);
        assert_eq!(exact_walk_line(&inst(&[0], &[&[3]], &[-2])).unwrap().length, 8);
        assert!(matches!(
            exact_walk_line(&inst(&[0, 0], &[], &[1, 0])),
            Err(Error::LineSolverDimension(2))
        ));
    }

    #[test]
    fn approx_single_target_is_optimal() {
        let i = inst(&[0, 0], &[&[3, 1]], &[-1, 2]);
        for v in [ApproxVariant::NearestNeighbor2Opt, ApproxVariant::MstShortcut] {
            assert_eq!(approx_walk(&i, v).length, 4 + 5);
        }
    }

    #[test]
    fn approx_within_twice_optimum_on_random_instances() {
        let mut rng = seeded_rng(7);
        let mut worst: f64 = 1.0;
        for _ in 0..200 {
            let i = random_walk_instance(&mut rng, 2, 10, 8);
            let opt = exact_walk_held_karp(&i, 18).unwrap().length;
            for v in [ApproxVariant::NearestNeighbor2Opt, ApproxVariant::MstShortcut] {
                let s = approx_walk(&i, v);
                assert!(i.is_permutation(&s.order));
                assert_eq!(s.length, i.walk_length(&s.order));
                assert!(s.length >= opt);
                assert!(s.length <= 2 * opt, "{v:?} {i:?}");
                if opt > 0 {
                    worst = worst.max(s.length as f64 / opt as f64);
                }
            }
        }
        assert!(worst <= 2.0);
    }

    fn arb_instance(rank: usize, max_targets: usize) -> impl Strategy<Value = WalkInstance> {
        let pt = move || prop::collection::vec(-6i64..6, rank).prop_map(LatticePoint::new);
        (pt(), prop::collection::btree_set(pt(), 0..=max_targets), pt())
            .prop_map(|(s, t, e)| WalkInstance::new(s, t.into_iter().collect(), e).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn held_karp_matches_bruteforce(i in arb_instance(2, 7)) {
            let hk = exact_walk_held_karp(&i, 18).unwrap();
            let bf = permutation_bruteforce(&i).unwrap();
            prop_assert_eq!(hk, bf);
        }

        #[test]
        fn line_matches_held_karp(i in arb_instance(1, 8)) {
            let a = exact_walk_line(&i).unwrap();
            prop_assert!(i.is_permutation(&a.order));
            prop_assert_eq!(a.length, exact_walk_held_karp(&i, 18).unwrap().length);
        }

        #[test]
        fn translation_reversal_and_monotonicity(i in arb_instance(2, 6), shift in prop::collection::vec(-20i64..20, 2)) {
            let opt = exact_walk_held_karp(&i, 18).unwrap().length;
            let by = LatticePoint::new(shift);
            let moved = WalkInstance::new(
                i.start.translate(&by),
                i.targets.iter().map(|t| t.translate(&by)).collect(),
                i.end.translate(&by),
            ).unwrap();
            prop_assert_eq!(exact_walk_held_karp(&moved, 18).unwrap().length, opt);

            let rev = WalkInstance::new(i.end.clone(), i.targets.clone(), i.start.clone()).unwrap();
            prop_assert_eq!(exact_walk_held_karp(&rev, 18).unwrap().length, opt);

            if !i.targets.is_empty() {
                let mut fewer = i.clone();
                fewer.targets.pop();
                prop_assert!(exact_walk_held_karp(&fewer, 18).unwrap().length <= opt);
            }
        }
    }
}
