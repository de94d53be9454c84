//! Rectilinear Steiner trees and group Steiner trees on the lattice graph ℤʳ.
//!
//! Exact solvers run the Dreyfus–Wagner subset dynamic program, either on the
//! Hanan grid of the terminals or on a lattice box in which every group has
//! been contracted to a single node. Every returned tree is re-checked for
//! connectivity before it leaves this module.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap, HashSet, VecDeque};

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{bounding_box, manhattan_unchecked, staircase_edges, LatticeEdge, LatticePoint};
use crate::union_find::UnionFind;
use crate::Caps;

pub const DEFAULT_TERMINAL_CAP: usize = 10;
pub const DEFAULT_GRID_VERTEX_CAP: usize = 10_000;
pub const DEFAULT_BOX_MARGIN: i64 = 1;

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SteinerInstance {
    terminals: Vec<LatticePoint>,
}

impl SteinerInstance {
    /// Duplicate terminals are dropped; order of first appearance is kept.
    pub fn new(terminals: Vec<LatticePoint>) -> Result<Self> {
        let first = terminals
            .first()
            .ok_or_else(|| Error::InvalidInstance("a Steiner instance needs a terminal".into()))?;
        let r = first.dim();
        for t in &terminals {
            t.check_dim(r)?;
        }
        Ok(SteinerInstance {
            terminals: terminals.into_iter().unique().collect(),
        })
    }

    pub fn terminals(&self) -> &[LatticePoint] {
        &self.terminals
    }

    pub fn rank(&self) -> usize {
        self.terminals[0].dim()
    }
}

/// Pairwise-disjoint vertex sets, each connected in the lattice graph.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct GroupSteinerInstance {
    groups: Vec<Vec<LatticePoint>>,
}

impl GroupSteinerInstance {
    pub fn new(groups: Vec<Vec<LatticePoint>>) -> Result<Self> {
        let bad = |m: String| Error::InvalidInstance(m);
        let r = groups
            .iter()
            .flatten()
            .next()
            .map(LatticePoint::dim)
            .ok_or_else(|| bad("a group Steiner instance needs a vertex".into()))?;
        let mut seen = HashSet::new();
        let mut clean = Vec::with_capacity(groups.len());
        for (gi, g) in groups.into_iter().enumerate() {
            if g.is_empty() {
                return Err(bad(format!("group {gi} is empty")));
            }
            let g: Vec<LatticePoint> = g.into_iter().unique().collect();
            for p in &g {
                p.check_dim(r)?;
                if !seen.insert(p.clone()) {
                    return Err(bad(format!("vertex {p} belongs to two groups")));
                }
            }
            if !is_connected_vertex_set(&g) {
                return Err(bad(format!("group {gi} is not connected")));
            }
            clean.push(g);
        }
        Ok(GroupSteinerInstance { groups: clean })
    }

    pub fn groups(&self) -> &[Vec<LatticePoint>] {
        &self.groups
    }

    pub fn rank(&self) -> usize {
        self.groups[0][0].dim()
    }
}

fn is_connected_vertex_set(vertices: &[LatticePoint]) -> bool {
    let set: HashSet<&LatticePoint> = vertices.iter().collect();
    let mut seen = HashSet::new();
    let mut queue = VecDeque::from([&vertices[0]]);
    seen.insert(vertices[0].clone());
    while let Some(p) = queue.pop_front() {
        for axis in 0..p.dim() {
            for sign in [1, -1] {
                let q = p.step(axis, sign);
                if let Some(&q) = set.get(&q) {
                    if seen.insert(q.clone()) {
                        queue.push_back(q);
                    }
                }
            }
        }
    }
    seen.len() == set.len()
}

/// A set of unit lattice edges; `total_length` is always the edge count.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct TreeResult {
    pub edges: BTreeSet<LatticeEdge>,
    pub total_length: u64,
}

impl TreeResult {
    pub fn from_edges(edges: BTreeSet<LatticeEdge>) -> Self {
        TreeResult {
            total_length: edges.len() as u64,
            edges,
        }
    }
}

/// True iff `edges` together with the (internally connected) `groups` form a
/// single connected subgraph that touches every group.
pub fn verify_connects(edges: &BTreeSet<LatticeEdge>, groups: &[Vec<LatticePoint>]) -> bool {
    let mut ids: HashMap<LatticePoint, usize> = HashMap::new();
    let id = |p: &LatticePoint, ids: &mut HashMap<LatticePoint, usize>| {
        let n = ids.len();
        *ids.entry(p.clone()).or_insert(n)
    };
    let mut pairs = Vec::new();
    for g in groups {
        let a = id(&g[0], &mut ids);
        for p in &g[1..] {
            pairs.push((a, id(p, &mut ids)));
        }
    }
    for e in edges {
        let [u, v] = e.endpoints();
        pairs.push((id(&u, &mut ids), id(&v, &mut ids)));
    }
    let mut uf = UnionFind::new(ids.len());
    for (a, b) in pairs {
        uf.union(a, b);
    }
    let Some(root) = ids.values().next().map(|&i| uf.find(i)) else {
        return true;
    };
    ids.values().all(|&i| uf.find(i) == root)
}

fn checked(tree: TreeResult, groups: &[Vec<LatticePoint>], what: &str) -> Result<TreeResult> {
    if verify_connects(&tree.edges, groups) {
        Ok(tree)
    } else {
        Err(Error::InvalidInstance(format!("{what} produced a disconnected tree")))
    }
}

// ---------------------------------------------------------------------------
// Dreyfus–Wagner on an explicit weighted graph

struct Graph {
    adj: Vec<Vec<(usize, u32)>>,
}

impl Graph {
    fn new(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
        }
    }

    fn add_edge(&mut self, u: usize, v: usize, w: u32) {
        self.adj[u].push((v, w));
        self.adj[v].push((u, w));
    }

    fn len(&self) -> usize {
        self.adj.len()
    }
}

const INF: u32 = u32::MAX;
const LEAF: u32 = u32::MAX;
const SPLIT: u32 = 1 << 31;

/// Minimum Steiner tree connecting `terminals`; returns its weight and edges
/// as vertex pairs. The last terminal is the root, so tables are indexed by
/// subsets of the others.
fn dreyfus_wagner(graph: &Graph, terminals: &[usize]) -> (u64, Vec<(usize, usize)>) {
    let k = terminals.len();
    if k <= 1 {
        return (0, Vec::new());
    }
    let n = graph.len();
    let q = k - 1;
    let root = terminals[q];
    let subsets = 1usize << q;
    let mut cost = vec![INF; subsets * n];
    let mut back = vec![LEAF; subsets * n];

    let relax = |s: usize, cost: &mut [u32], back: &mut [u32]| {
        let row = s * n;
        let mut heap: BinaryHeap<Reverse<(u32, usize)>> = (0..n)
            .filter(|&v| cost[row + v] != INF)
            .map(|v| Reverse((cost[row + v], v)))
            .collect();
        while let Some(Reverse((d, u))) = heap.pop() {
            if d != cost[row + u] {
                continue;
            }
            for &(v, w) in &graph.adj[u] {
                let nd = d + w;
                if nd < cost[row + v] {
                    cost[row + v] = nd;
                    back[row + v] = v_from(u);
                    heap.push(Reverse((nd, v)));
                }
            }
        }
    };

    for (i, &t) in terminals[..q].iter().enumerate() {
        let s = 1 << i;
        cost[s * n + t] = 0;
        relax(s, &mut cost, &mut back);
    }
    for s in 1..subsets {
        if s.count_ones() < 2 {
            continue;
        }
        let low = s & s.wrapping_neg();
        let row = s * n;
        // Proper submasks containing the lowest bit, each split counted once.
        let mut t = (s - 1) & s;
        while t > 0 {
            if t & low != 0 {
                let (a, b) = (t * n, (s ^ t) * n);
                for v in 0..n {
                    let (ca, cb) = (cost[a + v], cost[b + v]);
                    if ca != INF && cb != INF && ca + cb < cost[row + v] {
                        cost[row + v] = ca + cb;
                        back[row + v] = SPLIT | t as u32;
                    }
                }
            }
            t = (t - 1) & s;
        }
        relax(s, &mut cost, &mut back);
    }

    let full = subsets - 1;
    let total = cost[full * n + root];
    assert!(total != INF, "terminals are not connected in the candidate graph");

    let mut edges = BTreeSet::new();
    let mut stack = vec![(full, root)];
    while let Some((s, v)) = stack.pop() {
        let b = back[s * n + v];
        if b == LEAF {
            continue;
        }
        if b & SPLIT != 0 {
            let t = (b & !SPLIT) as usize;
            stack.push((t, v));
            stack.push((s ^ t, v));
        } else {
            let u = b as usize;
            edges.insert((u.min(v), u.max(v)));
            stack.push((s, u));
        }
    }
    (total as u64, edges.into_iter().collect())
}

fn v_from(u: usize) -> u32 {
    debug_assert!((u as u32) < SPLIT);
    u as u32
}

fn check_terminal_cap(k: usize, caps: &Caps, what: &'static str) -> Result<()> {
    if k > caps.steiner_terminals {
        return Err(Error::CapExceeded {
            what,
            size: k,
            cap: caps.steiner_terminals,
        });
    }
    Ok(())
}

fn check_vertex_cap(n: u128, caps: &Caps) -> Result<usize> {
    if n > caps.grid_vertices as u128 {
        return Err(Error::CapExceeded {
            what: "candidate grid vertices",
            size: n.min(usize::MAX as u128) as usize,
            cap: caps.grid_vertices,
        });
    }
    Ok(n as usize)
}

/// Mixed-radix indexing of a product grid, first axis most significant, so
/// index order is lexicographic order of the points.
struct GridIndex {
    sizes: Vec<usize>,
}

impl GridIndex {
    fn len(&self) -> usize {
        self.sizes.iter().product()
    }

    fn index(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.sizes).fold(0, |acc, (d, s)| acc * s + d)
    }

    fn digits(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.sizes.len()];
        for a in (0..self.sizes.len()).rev() {
            out[a] = idx % self.sizes[a];
            idx /= self.sizes[a];
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Rectilinear Steiner tree

/// Exact rectilinear Steiner minimal tree, searched over the Hanan grid.
pub fn rsmt_exact(inst: &SteinerInstance, caps: &Caps) -> Result<TreeResult> {
    let terms = inst.terminals();
    check_terminal_cap(terms.len(), caps, "Steiner terminals")?;
    if terms.len() == 1 {
        return Ok(TreeResult::default());
    }
    let r = inst.rank();
    let axes: Vec<Vec<i64>> = (0..r)
        .map(|a| terms.iter().map(|t| t.coords()[a]).sorted().dedup().collect())
        .collect();
    let grid = GridIndex {
        sizes: axes.iter().map(Vec::len).collect(),
    };
    check_vertex_cap(grid.sizes.iter().map(|&s| s as u128).product(), caps)?;

    let mut graph = Graph::new(grid.len());
    for idx in 0..grid.len() {
        let d = grid.digits(idx);
        for a in 0..r {
            if d[a] + 1 < grid.sizes[a] {
                let mut e = d.clone();
                e[a] += 1;
                let w = (axes[a][d[a] + 1] - axes[a][d[a]]) as u32;
                graph.add_edge(idx, grid.index(&e), w);
            }
        }
    }
    let term_idx: Vec<usize> = terms
        .iter()
        .map(|t| {
            let digits: Vec<usize> = (0..r)
                .map(|a| axes[a].binary_search(&t.coords()[a]).expect("on grid"))
                .collect();
            grid.index(&digits)
        })
        .collect();

    let (total, pairs) = dreyfus_wagner(&graph, &term_idx);
    let point = |idx: usize| -> LatticePoint {
        let d = grid.digits(idx);
        LatticePoint::new((0..r).map(|a| axes[a][d[a]]).collect())
    };
    let mut edges = BTreeSet::new();
    for (u, v) in pairs {
        edges.extend(staircase_edges(&point(u), &point(v)));
    }
    let tree = TreeResult::from_edges(edges);
    debug_assert_eq!(tree.total_length, total);
    let singles: Vec<Vec<LatticePoint>> = terms.iter().map(|t| vec![t.clone()]).collect();
    checked(tree, &singles, "rsmt_exact")
}

/// Weight of a minimum spanning tree on the terminals under the L1 metric.
pub fn mst_weight(inst: &SteinerInstance) -> u64 {
    prim(inst.terminals())
        .iter()
        .map(|&(u, v)| manhattan_unchecked(&inst.terminals()[u], &inst.terminals()[v]))
        .sum()
}

/// Prim's algorithm from terminal 0; returns `(child, parent)` pairs in
/// insertion order. Ties go to the smallest index.
fn prim(points: &[LatticePoint]) -> Vec<(usize, usize)> {
    let n = points.len();
    let mut in_tree = vec![false; n];
    let mut best = vec![u64::MAX; n];
    let mut parent = vec![0usize; n];
    let mut out = Vec::with_capacity(n.saturating_sub(1));
    if n == 0 {
        return out;
    }
    best[0] = 0;
    for step in 0..n {
        let v = (0..n)
            .filter(|&v| !in_tree[v])
            .min_by_key(|&v| best[v])
            .expect("vertex left");
        in_tree[v] = true;
        if step > 0 {
            out.push((v, parent[v]));
        }
        for u in (0..n).filter(|&u| !in_tree[u]) {
            let w = manhattan_unchecked(&points[v], &points[u]);
            if w < best[u] {
                best[u] = w;
                parent[u] = v;
            }
        }
    }
    out
}

/// Spanning tree on the terminals with each tree edge laid out as an
/// axis-ascending staircase from the later-added endpoint toward its parent.
/// Overlapping staircases are merged, so the edge count never exceeds
/// [`mst_weight`].
pub fn mst_terminals_approx(inst: &SteinerInstance) -> TreeResult {
    let t = inst.terminals();
    let mut edges = BTreeSet::new();
    for (child, parent) in prim(t) {
        edges.extend(staircase_edges(&t[child], &t[parent]));
    }
    let tree = TreeResult::from_edges(edges);
    debug_assert!(verify_connects(
        &tree.edges,
        &t.iter().map(|p| vec![p.clone()]).collect::<Vec<_>>()
    ));
    tree
}

// ---------------------------------------------------------------------------
// Group Steiner tree

/// Minimum set of lattice edges outside the groups that joins all groups
/// into one connected subgraph. The search is confined to the groups'
/// bounding box widened by `box_margin`.
pub fn group_steiner_exact(inst: &GroupSteinerInstance, box_margin: i64, caps: &Caps) -> Result<TreeResult> {
    let groups = inst.groups();
    check_terminal_cap(groups.len(), caps, "Steiner groups")?;
    if groups.len() == 1 {
        return Ok(TreeResult::default());
    }
    if box_margin < 0 {
        return Err(Error::InvalidInstance("box margin must be nonnegative".into()));
    }
    let r = inst.rank();
    let (lo, hi) = bounding_box(groups.iter().flatten()).expect("nonempty");
    let lo: Vec<i64> = lo.coords().iter().map(|c| c - box_margin).collect();
    let hi: Vec<i64> = hi.coords().iter().map(|c| c + box_margin).collect();
    let grid = GridIndex {
        sizes: (0..r).map(|a| (hi[a] - lo[a] + 1) as usize).collect(),
    };
    check_vertex_cap(grid.sizes.iter().map(|&s| s as u128).product(), caps)?;
    let point = |idx: usize| -> LatticePoint {
        let d = grid.digits(idx);
        LatticePoint::new((0..r).map(|a| lo[a] + d[a] as i64).collect())
    };
    let index_of = |p: &LatticePoint| -> usize {
        let d: Vec<usize> = (0..r).map(|a| (p.coords()[a] - lo[a]) as usize).collect();
        grid.index(&d)
    };

    // Contracted node ids: groups first, then every free box vertex.
    let k = groups.len();
    let mut node = vec![usize::MAX; grid.len()];
    for (gi, g) in groups.iter().enumerate() {
        for p in g {
            node[index_of(p)] = gi;
        }
    }
    let mut next = k;
    for slot in node.iter_mut().filter(|s| **s == usize::MAX) {
        *slot = next;
        next += 1;
    }

    let mut graph = Graph::new(next);
    let mut original: HashMap<(usize, usize), LatticeEdge> = HashMap::new();
    for idx in 0..grid.len() {
        let d = grid.digits(idx);
        for a in 0..r {
            if d[a] + 1 >= grid.sizes[a] {
                continue;
            }
            let mut e = d.clone();
            e[a] += 1;
            let (cu, cv) = (node[idx], node[grid.index(&e)]);
            if cu == cv {
                continue;
            }
            let key = (cu.min(cv), cu.max(cv));
            if let std::collections::hash_map::Entry::Vacant(slot) = original.entry(key) {
                slot.insert(LatticeEdge::new(point(idx), a));
                graph.add_edge(cu, cv, 1);
            }
        }
    }

    let terminals: Vec<usize> = (0..k).collect();
    let (total, pairs) = dreyfus_wagner(&graph, &terminals);
    let edges: BTreeSet<LatticeEdge> = pairs.iter().map(|key| original[key].clone()).collect();
    let tree = TreeResult::from_edges(edges);
    debug_assert_eq!(tree.total_length, total);
    checked(tree, groups, "group_steiner_exact")
}

/// The lexicographically smallest vertex of every group, as terminals.
pub fn representative_reduction(inst: &GroupSteinerInstance) -> SteinerInstance {
    let reps = inst
        .groups()
        .iter()
        .map(|g| g.iter().min().expect("nonempty group").clone())
        .collect();
    SteinerInstance::new(reps).expect("nonempty, same rank")
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InnerSolver {
    #[default]
    Exact,
    Mst,
}

/// Steiner tree on one representative per group. Together with the groups
/// it always forms a connected subgraph, but it need not be minimal.
pub fn group_steiner_via_representatives(
    inst: &GroupSteinerInstance,
    inner: InnerSolver,
    caps: &Caps,
) -> Result<TreeResult> {
    let reps = representative_reduction(inst);
    let tree = match inner {
        InnerSolver::Exact => rsmt_exact(&reps, caps)?,
        InnerSolver::Mst => mst_terminals_approx(&reps),
    };
    checked(tree, inst.groups(), "group_steiner_via_representatives")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::{random_distinct_points, seeded_rng};
    use proptest::prelude::*;
    use rand::Rng;

    fn pt(c: &[i64]) -> LatticePoint {
        LatticePoint::new(c.to_vec())
    }

    fn terminals(v: &[&[i64]]) -> SteinerInstance {
        SteinerInstance::new(v.iter().map(|c| pt(c)).collect()).unwrap()
    }

    fn groups(v: &[&[&[i64]]]) -> GroupSteinerInstance {
        GroupSteinerInstance::new(v.iter().map(|g| g.iter().map(|c| pt(c)).collect()).collect()).unwrap()
    }

    /// Smallest edge subset of the box `[lo, hi]` that connects all groups,
    /// found by trying subsets in order of size.
    fn bruteforce_connect(groups: &[Vec<LatticePoint>], lo: &[i64], hi: &[i64]) -> u64 {
        let r = lo.len();
        let mut box_edges = Vec::new();
        for c in (0..r).map(|a| lo[a]..=hi[a]).multi_cartesian_product() {
            for a in 0..r {
                if c[a] < hi[a] {
                    box_edges.push(LatticeEdge::new(LatticePoint::new(c.clone()), a));
                }
            }
        }
        for size in 0..=box_edges.len() {
            for combo in box_edges.iter().cloned().combinations(size) {
                if verify_connects(&combo.into_iter().collect(), groups) {
                    return size as u64;
                }
            }
        }
        unreachable!("the whole box is connected")
    }

    #[test]
    fn bruteforce_oracle_sanity() {
        let g = vec![vec![pt(&[0, 0])], vec![pt(&[1, 1])]];
        assert_eq!(bruteforce_connect(&g, &[0, 0], &[1, 1]), 2);
    }

    #[test]
    fn rsmt_examples() {
        let caps = Caps::default();
        assert_eq!(
            rsmt_exact(&terminals(&[&[0, 0], &[1, 1]]), &caps).unwrap().total_length,
            2
        );

        let t = terminals(&[&[0, 0], &[2, 0], &[0, 2]]);
        let groups: Vec<_> = t.terminals().iter().map(|p| vec![p.clone()]).collect();
        assert_eq!(bruteforce_connect(&groups, &[0, 0], &[2, 2]), 4);
        assert_eq!(rsmt_exact(&t, &caps).unwrap().total_length, 4);

        let t = terminals(&[&[0, 0], &[2, 0], &[1, 2]]);
        let groups: Vec<_> = t.terminals().iter().map(|p| vec![p.clone()]).collect();
        assert_eq!(bruteforce_connect(&groups, &[0, 0], &[2, 2]), 4);
        let tree = rsmt_exact(&t, &caps).unwrap();
        assert_eq!(tree.total_length, 4);
        assert!(tree.edges.iter().any(|e| e.endpoints().contains(&pt(&[1, 0]))));
        assert_eq!(mst_weight(&t), 5);
        assert_eq!(mst_terminals_approx(&t).total_length, 5);
    }

    #[test]
    fn single_terminal_and_caps() {
        let caps = Caps::default();
        let t = terminals(&[&[3, 3]]);
        assert_eq!(rsmt_exact(&t, &caps).unwrap().total_length, 0);
        assert_eq!(mst_terminals_approx(&t).total_length, 0);
        let many = SteinerInstance::new((0..12).map(|i| pt(&[i, i * i])).collect()).unwrap();
        assert!(matches!(rsmt_exact(&many, &caps), Err(Error::CapExceeded { .. })));
        assert!(SteinerInstance::new(vec![]).is_err());
    }

    #[test]
    fn group_examples() {
        let caps = Caps::default();
        let single = groups(&[&[&[0, 0], &[0, 1]]]);
        assert_eq!(group_steiner_exact(&single, 1, &caps).unwrap().total_length, 0);
        assert_eq!(
            group_steiner_via_representatives(&single, InnerSolver::Exact, &caps)
                .unwrap()
                .total_length,
            0
        );

        let two = groups(&[&[&[0, 0]], &[&[1, 0]]]);
        assert_eq!(group_steiner_exact(&two, 1, &caps).unwrap().total_length, 1);

        let square = groups(&[&[&[0, 0]], &[&[5, 0], &[6, 0], &[5, 1], &[6, 1]]]);
        assert_eq!(bruteforce_connect(square.groups(), &[0, 0], &[6, 1]), 5);
        let q = group_steiner_exact(&square, 1, &caps).unwrap();
        assert_eq!(q.total_length, 5);
        let reps = representative_reduction(&square);
        assert_eq!(reps.terminals(), &[pt(&[0, 0]), pt(&[5, 0])]);
        assert_eq!(
            group_steiner_via_representatives(&square, InnerSolver::Exact, &caps)
                .unwrap()
                .total_length,
            5
        );
    }

    #[test]
    fn representatives_are_lexicographic_minima() {
        let g = groups(&[&[&[2, 1], &[1, 1]]]);
        assert_eq!(representative_reduction(&g).terminals(), &[pt(&[1, 1])]);
        let g = groups(&[&[&[4, 4]], &[&[-1, 2]]]);
        assert_eq!(representative_reduction(&g).terminals(), &[pt(&[4, 4]), pt(&[-1, 2])]);
        assert_eq!(representative_reduction(&g), representative_reduction(&g.clone()));
    }

    #[test]
    fn malformed_group_instances_are_rejected() {
        assert!(GroupSteinerInstance::new(vec![vec![pt(&[0, 0]), pt(&[2, 0])]]).is_err());
        assert!(GroupSteinerInstance::new(vec![vec![pt(&[0, 0])], vec![pt(&[0, 0])]]).is_err());
        assert!(GroupSteinerInstance::new(vec![vec![pt(&[0, 0])], vec![]]).is_err());
        assert!(GroupSteinerInstance::new(vec![]).is_err());
        let g = groups(&[&[&[0, 0]], &[&[9, 0]]]);
        assert!(group_steiner_exact(&g, -1, &Caps::default()).is_err());
        let tight = Caps {
            grid_vertices: 10,
            ..Caps::default()
        };
        assert!(matches!(
            group_steiner_exact(&g, 1, &tight),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn group_exact_matches_bruteforce_on_small_boxes() {
        let mut rng = seeded_rng(5);
        let caps = Caps::default();
        for _ in 0..40 {
            let k = rng.gen_range(2..=3);
            let pts = random_distinct_points(&mut rng, 2, k + 1, 2);
            // One domino group plus singletons, when the domino fits.
            let mut gs: Vec<Vec<LatticePoint>> = pts[..k].iter().map(|p| vec![p.clone()]).collect();
            let extra = pts[0].step(0, 1);
            if !pts[..k].contains(&extra) {
                gs[0].push(extra);
            }
            let inst = GroupSteinerInstance::new(gs).unwrap();
            let exact = group_steiner_exact(&inst, 0, &caps).unwrap();
            let (lo, hi) = bounding_box(inst.groups().iter().flatten()).unwrap();
            assert_eq!(
                exact.total_length,
                bruteforce_connect(inst.groups(), lo.coords(), hi.coords()),
                "{inst:?}"
            );
            assert_eq!(
                group_steiner_exact(&inst, 2, &caps).unwrap().total_length,
                exact.total_length
            );
        }
    }

    #[test]
    fn hanan_grid_agrees_with_full_box_search() {
        let mut rng = seeded_rng(9);
        let caps = Caps::default();
        for (rank, radius) in [(2usize, 4i64), (3, 2)] {
            for _ in 0..30 {
                let n = rng.gen_range(2..=6);
                let t = SteinerInstance::new(random_distinct_points(&mut rng, rank, n, radius)).unwrap();
                let as_groups =
                    GroupSteinerInstance::new(t.terminals().iter().map(|p| vec![p.clone()]).collect()).unwrap();
                let hanan = rsmt_exact(&t, &caps).unwrap();
                let boxed = group_steiner_exact(&as_groups, 0, &caps).unwrap();
                assert_eq!(hanan.total_length, boxed.total_length, "{t:?}");
            }
        }
    }

    fn arb_terminals(max: usize) -> impl Strategy<Value = SteinerInstance> {
        prop::collection::btree_set(prop::collection::vec(-5i64..5, 2).prop_map(LatticePoint::new), 1..=max)
            .prop_map(|s| SteinerInstance::new(s.into_iter().collect()).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn mst_within_twice_rsmt(t in arb_terminals(8)) {
            let caps = Caps::default();
            let exact = rsmt_exact(&t, &caps).unwrap().total_length;
            let approx = mst_terminals_approx(&t);
            prop_assert!(exact <= approx.total_length);
            prop_assert!(approx.total_length <= mst_weight(&t));
            prop_assert!(mst_weight(&t) <= 2 * exact);
        }

        #[test]
        fn two_terminals_cost_their_distance(a in prop::collection::vec(-9i64..9, 3), b in prop::collection::vec(-9i64..9, 3)) {
            let (a, b) = (LatticePoint::new(a), LatticePoint::new(b));
            let d = manhattan_unchecked(&a, &b);
            let t = SteinerInstance::new(vec![a, b]).unwrap();
            prop_assert_eq!(rsmt_exact(&t, &Caps::default()).unwrap().total_length, d);
        }
    }
}
