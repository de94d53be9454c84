//! Free metabelian groups `F/F″` of rank `r`, represented by edge flows on
//! the Cayley graph of `ℤʳ = F/F′`.
//!
//! A word traces a path from the origin; each unit edge records how often it
//! was crossed forward minus backward. Two words are equal in `F/F″` exactly
//! when their flows and endpoints agree. The geodesic length of a word is
//! `Σ |flow(e)| + 2·|Q|`, with `Q` a minimum edge set joining the connected
//! components of the flow support, the origin and the endpoint.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::bfs::{self, Ball, OracleCaps, OracleDistance};
use crate::error::{Error, Result};
use crate::lattice::{LatticeEdge, LatticePoint};
use crate::steiner::{
    group_steiner_exact, group_steiner_via_representatives, GroupSteinerInstance, InnerSolver, TreeResult,
};
use crate::union_find::UnionFind;
use crate::words::{Alphabet, Generator, GeneratorKind, Letter, Sign, Word};
use crate::Caps;

/// Integer flow on the positively oriented unit edges of ℤʳ plus the
/// endpoint of the path that induced it. Zero values are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Flow {
    rank: usize,
    values: BTreeMap<LatticeEdge, i64>,
    endpoint: LatticePoint,
}

impl Flow {
    pub fn identity(rank: usize) -> Self {
        Flow {
            rank,
            values: BTreeMap::new(),
            endpoint: LatticePoint::origin(rank),
        }
    }

    /// Builds a flow from raw edge values; zeros are dropped. No Kirchhoff
    /// check is made here, see [`check_kirchhoff`].
    pub fn new(
        rank: usize,
        values: impl IntoIterator<Item = (LatticeEdge, i64)>,
        endpoint: LatticePoint,
    ) -> Result<Self> {
        endpoint.check_dim(rank)?;
        let mut map = BTreeMap::new();
        for (e, v) in values {
            e.base.check_dim(rank)?;
            if e.axis >= rank {
                return Err(Error::InvalidInstance(format!("edge axis {} out of range", e.axis + 1)));
            }
            if v != 0 {
                *map.entry(e).or_insert(0) += v;
            }
        }
        map.retain(|_, v| *v != 0);
        Ok(Flow {
            rank,
            values: map,
            endpoint,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn values(&self) -> &BTreeMap<LatticeEdge, i64> {
        &self.values
    }

    pub fn endpoint(&self) -> &LatticePoint {
        &self.endpoint
    }

    pub fn is_identity(&self) -> bool {
        self.values.is_empty() && self.endpoint.is_origin()
    }

    fn add_to_edge(&mut self, e: LatticeEdge, delta: i64) {
        match self.values.entry(e) {
            Entry::Vacant(slot) => {
                slot.insert(delta);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += delta;
                if *slot.get() == 0 {
                    slot.remove();
                }
            }
        }
    }

    /// Extends the path by one unit step along a 0-based axis.
    pub fn step(&mut self, axis: usize, sign: i64) {
        if sign > 0 {
            let e = LatticeEdge::new(self.endpoint.clone(), axis);
            self.endpoint.step_in_place(axis, 1);
            self.add_to_edge(e, 1);
        } else {
            self.endpoint.step_in_place(axis, -1);
            let e = LatticeEdge::new(self.endpoint.clone(), axis);
            self.add_to_edge(e, -1);
        }
    }

    /// The flow of `uv` from the flows of `u` and `v`: `v`'s flow is shifted
    /// to start at `u`'s endpoint.
    pub fn compose(&self, other: &Flow) -> Flow {
        let mut out = self.clone();
        for (e, &v) in &other.values {
            out.add_to_edge(LatticeEdge::new(e.base.translate(&self.endpoint), e.axis), v);
        }
        out.endpoint = self.endpoint.translate(&other.endpoint);
        out
    }

    /// The flow of the inverse word: the path walked backwards from the
    /// endpoint, shifted to start at the origin.
    pub fn inverse(&self) -> Flow {
        let back = self.endpoint.negate();
        Flow {
            rank: self.rank,
            values: self
                .values
                .iter()
                .map(|(e, &v)| (LatticeEdge::new(e.base.translate(&back), e.axis), -v))
                .collect(),
            endpoint: back,
        }
    }

    /// `Σ |flow(e)|` over the support.
    pub fn total_variation(&self) -> u64 {
        self.values.values().map(|v| v.unsigned_abs()).sum()
    }

    /// Out-flow minus in-flow at every vertex touched by the support.
    pub fn net_flows(&self) -> HashMap<LatticePoint, i64> {
        let mut net = HashMap::new();
        for (e, &v) in &self.values {
            *net.entry(e.base.clone()).or_insert(0) += v;
            *net.entry(e.head()).or_insert(0) -= v;
        }
        net
    }
}

fn check_rank(rank: usize) -> Result<()> {
    if rank == 0 {
        return Err(Error::InvalidInstance("metabelian rank must be at least 1".into()));
    }
    Ok(())
}

fn check_letter(l: &Letter, rank: usize) -> Result<()> {
    let g = l.generator;
    if g.kind != GeneratorKind::Metabelian {
        return Err(Error::GeneratorOutOfRange {
            name: g.kind.name(),
            index: g.index,
            reason: "only x generators act on a free metabelian group".into(),
        });
    }
    if g.index == 0 || g.index as usize > rank {
        return Err(Error::GeneratorOutOfRange {
            name: 'x',
            index: g.index,
            reason: format!("rank is {rank}"),
        });
    }
    Ok(())
}

pub fn compute_flow(w: &Word, rank: usize) -> Result<Flow> {
    check_rank(rank)?;
    let mut f = Flow::identity(rank);
    for l in w.letters() {
        check_letter(l, rank)?;
        f.step(l.generator.slot(), l.sign.value());
    }
    Ok(f)
}

/// A flow induced by a path: conservation everywhere except at the origin
/// (net +1) and the endpoint (net −1); a circulation when the path is closed.
pub fn check_kirchhoff(f: &Flow) -> bool {
    let origin = LatticePoint::origin(f.rank);
    let closed = f.endpoint == origin;
    let net = f.net_flows();
    let at = |p: &LatticePoint| net.get(p).copied().unwrap_or(0);
    let expected = |p: &LatticePoint| -> i64 {
        if closed {
            0
        } else if *p == origin {
            1
        } else if *p == f.endpoint {
            -1
        } else {
            0
        }
    };
    net.iter().all(|(p, &v)| v == expected(p))
        && at(&origin) == expected(&origin)
        && at(&f.endpoint) == expected(&f.endpoint)
}

/// Equality in `F/F″`: same flow and same endpoint.
pub fn metabelian_equal(u: &Word, v: &Word, rank: usize) -> Result<bool> {
    Ok(compute_flow(u, rank)? == compute_flow(v, rank)?)
}

/// Connected components of the flow support, plus singleton components for
/// the origin and the endpoint when the support misses them.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SupportGraph {
    /// Sorted vertex lists, ordered by their smallest vertex.
    pub components: Vec<Vec<LatticePoint>>,
    /// Support edges inside each component.
    pub edge_counts: Vec<u64>,
}

impl SupportGraph {
    pub fn total_edges(&self) -> u64 {
        self.edge_counts.iter().sum()
    }

    pub fn group_instance(&self) -> GroupSteinerInstance {
        GroupSteinerInstance::new(self.components.clone()).expect("components are disjoint and connected")
    }
}

pub fn support_components(f: &Flow) -> SupportGraph {
    let mut ids: BTreeMap<LatticePoint, usize> = BTreeMap::new();
    for e in f.values.keys() {
        for p in e.endpoints() {
            let n = ids.len();
            ids.entry(p).or_insert(n);
        }
    }
    let mut uf = UnionFind::new(ids.len());
    for e in f.values.keys() {
        let [u, v] = e.endpoints();
        uf.union(ids[&u], ids[&v]);
    }
    let mut by_root: BTreeMap<usize, (Vec<LatticePoint>, u64)> = BTreeMap::new();
    for (p, &i) in &ids {
        by_root.entry(uf.find(i)).or_default().0.push(p.clone());
    }
    for e in f.values.keys() {
        by_root.get_mut(&uf.find(ids[&e.base])).expect("known root").1 += 1;
    }
    let mut comps: Vec<(Vec<LatticePoint>, u64)> = by_root.into_values().collect();
    let origin = LatticePoint::origin(f.rank);
    for p in [origin, f.endpoint.clone()] {
        if !ids.contains_key(&p) && !comps.iter().any(|(c, _)| c.contains(&p)) {
            comps.push((vec![p], 0));
        }
    }
    // Vertex lists come out of a BTreeMap already sorted.
    comps.sort_by(|a, b| a.0[0].cmp(&b.0[0]));
    let (components, edge_counts) = comps.into_iter().unzip();
    SupportGraph {
        components,
        edge_counts,
    }
}

/// An exact geodesic: the flow term and a minimum group Steiner tree.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MetabelianGeodesic {
    pub flow_term: u64,
    pub tree: TreeResult,
}

impl MetabelianGeodesic {
    pub fn length(&self) -> u64 {
        self.flow_term + 2 * self.tree.total_length
    }
}

pub fn solve_exact(f: &Flow, caps: &Caps) -> Result<MetabelianGeodesic> {
    let support = support_components(f);
    let tree = group_steiner_exact(&support.group_instance(), caps.box_margin, caps)?;
    Ok(MetabelianGeodesic {
        flow_term: f.total_variation(),
        tree,
    })
}

pub fn geodesic_length_exact(w: &Word, rank: usize, caps: &Caps) -> Result<u64> {
    Ok(solve_exact(&compute_flow(w, rank)?, caps)?.length())
}

/// Upper bound built from a Steiner tree on one representative per support
/// component.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ApproxEstimate {
    pub estimate: u64,
    pub exact_flow_term: u64,
    pub tree_length: u64,
}

pub fn solve_approx(f: &Flow, inner: InnerSolver, caps: &Caps) -> Result<(ApproxEstimate, TreeResult)> {
    let support = support_components(f);
    let tree = group_steiner_via_representatives(&support.group_instance(), inner, caps)?;
    let flow_term = f.total_variation();
    let est = ApproxEstimate {
        estimate: flow_term + 2 * tree.total_length,
        exact_flow_term: flow_term,
        tree_length: tree.total_length,
    };
    Ok((est, tree))
}

pub fn geodesic_length_2approx(w: &Word, rank: usize, inner: InnerSolver, caps: &Caps) -> Result<ApproxEstimate> {
    Ok(solve_approx(&compute_flow(w, rank)?, inner, caps)?.0)
}

/// Euler path from the origin to the endpoint through the support edges (each
/// repeated `|flow|` times in its net direction) and the tree edges (once each
/// way).
pub fn realize_word(f: &Flow, tree: &TreeResult) -> Result<Word> {
    let origin = LatticePoint::origin(f.rank);
    let mut ids: BTreeMap<LatticePoint, usize> = BTreeMap::new();
    let mut points = Vec::new();
    let mut id = |p: &LatticePoint| -> usize {
        *ids.entry(p.clone()).or_insert_with(|| {
            points.push(p.clone());
            points.len() - 1
        })
    };
    let start = id(&origin);
    // Arcs as (head, letter).
    let mut arcs: Vec<Vec<(usize, Letter)>> = Vec::new();
    let push_arc = |from: usize, to: usize, l: Letter, arcs: &mut Vec<Vec<(usize, Letter)>>| {
        if arcs.len() <= from.max(to) {
            arcs.resize(from.max(to) + 1, Vec::new());
        }
        arcs[from].push((to, l));
    };
    let letter = |axis: usize, sign: Sign| Letter::new(Generator::metabelian(axis as u32 + 1), sign);
    let mut total = 0usize;
    for (e, &v) in &f.values {
        let (b, h) = (id(&e.base), id(&e.head()));
        for _ in 0..v.unsigned_abs() {
            if v > 0 {
                push_arc(b, h, letter(e.axis, Sign::Plus), &mut arcs);
            } else {
                push_arc(h, b, letter(e.axis, Sign::Minus), &mut arcs);
            }
            total += 1;
        }
    }
    for e in &tree.edges {
        let (b, h) = (id(&e.base), id(&e.head()));
        push_arc(b, h, letter(e.axis, Sign::Plus), &mut arcs);
        push_arc(h, b, letter(e.axis, Sign::Minus), &mut arcs);
        total += 2;
    }
    if total == 0 {
        return if f.endpoint == origin {
            Ok(Word::empty())
        } else {
            Err(Error::InvalidInstance("open path with an empty flow".into()))
        };
    }
    arcs.resize(arcs.len().max(points.len()), Vec::new());

    // Hierholzer; arcs are consumed from the back of each list.
    for list in arcs.iter_mut() {
        list.reverse();
    }
    let mut stack: Vec<(usize, Option<Letter>)> = vec![(start, None)];
    let mut path: Vec<Letter> = Vec::with_capacity(total);
    while let Some(&(v, via)) = stack.last() {
        if let Some((next, l)) = arcs[v].pop() {
            stack.push((next, Some(l)));
        } else {
            stack.pop();
            if let Some(l) = via {
                path.push(l);
            }
        }
    }
    path.reverse();
    if path.len() != total {
        return Err(Error::InvalidInstance(
            "flow support and tree do not form a connected Euler graph".into(),
        ));
    }
    let word = Word::from_letters(path);
    debug_assert_eq!(compute_flow(&word, f.rank).ok().as_ref(), Some(f));
    Ok(word)
}

/// A word for `w`'s element whose length equals the representative-tree
/// estimate of [`geodesic_length_2approx`].
pub fn geodesic_word_metabelian(w: &Word, rank: usize, inner: InnerSolver, caps: &Caps) -> Result<Word> {
    let f = compute_flow(w, rank)?;
    let (_, tree) = solve_approx(&f, inner, caps)?;
    realize_word(&f, &tree)
}

/// A true geodesic word, from the minimum group Steiner tree.
pub fn geodesic_word_exact(w: &Word, rank: usize, caps: &Caps) -> Result<Word> {
    let f = compute_flow(w, rank)?;
    let sol = solve_exact(&f, caps)?;
    realize_word(&f, &sol.tree)
}

fn flow_neighbors(rank: usize) -> impl Fn(&Flow, &mut Vec<Flow>) {
    move |f, out| {
        for axis in 0..rank {
            for sign in [1, -1] {
                let mut g = f.clone();
                g.step(axis, sign);
                out.push(g);
            }
        }
    }
}

/// Word-metric distance of `w`'s element by breadth-first search over flows.
pub fn bfs_geodesic_oracle_metabelian(
    w: &Word,
    rank: usize,
    radius: usize,
    caps: OracleCaps,
) -> Result<OracleDistance> {
    let target = compute_flow(w, rank)?;
    bfs::distance_to(Flow::identity(rank), &target, radius, caps, flow_neighbors(rank))
}

pub fn metabelian_ball(rank: usize, radius: usize, caps: OracleCaps) -> Result<Ball<Flow>> {
    check_rank(rank)?;
    Ball::explore(Flow::identity(rank), radius, caps, flow_neighbors(rank))
}

/// Alphabet `x1 … x_rank`.
pub fn alphabet(rank: usize) -> Alphabet {
    Alphabet::metabelian(rank as u32)
}

/// Edges of the support, for callers that only need the set.
pub fn support_edges(f: &Flow) -> BTreeSet<LatticeEdge> {
    f.values.keys().cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::{random_reduced_word, reduced_words_up_to, seeded_rng};
    use crate::words::{concat, free_reduce, invert, parse_word};
    use proptest::prelude::*;
    use rand::Rng;

    fn w(text: &str, rank: usize) -> Word {
        parse_word(text, &alphabet(rank)).unwrap()
    }

    fn edge(base: &[i64], axis: usize) -> LatticeEdge {
        LatticeEdge::new(LatticePoint::new(base.to_vec()), axis)
    }

    fn power(letter: &str, n: usize) -> String {
        vec![letter; n].join(" ")
    }

    fn two_component_word() -> String {
        format!("{} x2 x1^-1 x2^-1 {}", power("x1", 6), power("x1^-1", 5))
    }

    #[test]
    fn flow_examples() {
        let f = compute_flow(&w("x1 x1", 1), 1).unwrap();
        assert_eq!(
            f.values().iter().map(|(e, v)| (e.clone(), *v)).collect::<Vec<_>>(),
            vec![(edge(&[0], 0), 1), (edge(&[1], 0), 1)]
        );
        assert_eq!(f.endpoint(), &LatticePoint::from([2]));

        let f = compute_flow(&w("x1 x1^-1", 1), 1).unwrap();
        assert!(f.is_identity());

        let f = compute_flow(&w("x1 x2 x1^-1 x2^-1", 2), 2).unwrap();
        let expected = Flow::new(
            2,
            [
                (edge(&[0, 0], 0), 1),
                (edge(&[1, 0], 1), 1),
                (edge(&[0, 1], 0), -1),
                (edge(&[0, 0], 1), -1),
            ],
            LatticePoint::from([0, 0]),
        )
        .unwrap();
        assert_eq!(f, expected);
        assert!(check_kirchhoff(&f));
    }

    #[test]
    fn foreign_letters_are_rejected() {
        let bad = parse_word("x3", &alphabet(3)).unwrap();
        assert!(matches!(compute_flow(&bad, 2), Err(Error::GeneratorOutOfRange { .. })));
        let lamp = parse_word("a1", &Alphabet::wreath(1, 1)).unwrap();
        assert!(compute_flow(&lamp, 2).is_err());
        assert!(compute_flow(&Word::empty(), 0).is_err());
    }

    #[test]
    fn kirchhoff_examples() {
        let bad = Flow::new(2, [(edge(&[0, 0], 0), 1)], LatticePoint::from([0, 0])).unwrap();
        assert!(!check_kirchhoff(&bad));
        let good = Flow::new(2, [(edge(&[0, 0], 0), 1)], LatticePoint::from([1, 0])).unwrap();
        assert!(check_kirchhoff(&good));
        // Value 2 along the only edge is not a path flow.
        let doubled = Flow::new(2, [(edge(&[0, 0], 0), 2)], LatticePoint::from([1, 0])).unwrap();
        assert!(!check_kirchhoff(&doubled));
        assert!(check_kirchhoff(&Flow::identity(3)));
    }

    #[test]
    fn equality_examples() {
        assert!(!metabelian_equal(&w("x1 x2", 2), &w("x2 x1", 2), 2).unwrap());
        let u = w("x1 x2 x2^-1 x1 x2^-1", 2);
        assert!(metabelian_equal(&u, &free_reduce(&u), 2).unwrap());
        let p = w("x1 x2 x1^-1 x2^-1", 2);
        let q = w("x2 x2 x1 x2^-1 x2^-1 x1^-1", 2);
        let comm = [p.clone(), q.clone(), invert(&p), invert(&q)]
            .iter()
            .try_fold(Word::empty(), |acc, x| concat(&acc, x))
            .unwrap();
        let base = w("x2 x1^-1 x1^-1", 2);
        assert!(metabelian_equal(&base, &concat(&base, &comm).unwrap(), 2).unwrap());
    }

    #[test]
    fn component_examples() {
        let sg = support_components(&compute_flow(&w("x1 x2 x1^-1 x2^-1", 2), 2).unwrap());
        assert_eq!(sg.components.len(), 1);
        assert_eq!(sg.edge_counts, vec![4]);
        assert!(sg.components[0].contains(&LatticePoint::from([0, 0])));

        let sg = support_components(&compute_flow(&w(&two_component_word(), 2), 2).unwrap());
        assert_eq!(
            sg.components,
            vec![
                vec![LatticePoint::from([0, 0])],
                vec![
                    LatticePoint::from([5, 0]),
                    LatticePoint::from([5, 1]),
                    LatticePoint::from([6, 0]),
                    LatticePoint::from([6, 1])
                ],
            ]
        );
        assert_eq!(sg.edge_counts, vec![0, 4]);

        let sg = support_components(&Flow::identity(2));
        assert_eq!(sg.components, vec![vec![LatticePoint::from([0, 0])]]);
    }

    #[test]
    fn origin_singleton_is_added() {
        // A unit square at x = 3..4 visited by a closed path: the origin is
        // off the support and becomes its own component.
        let text = format!("{} x2 x1 x2^-1 x1^-1 {}", power("x1", 3), power("x1^-1", 3));
        let f = compute_flow(&w(&text, 2), 2).unwrap();
        assert!(f.endpoint().is_origin());
        let sg = support_components(&f);
        assert_eq!(sg.components.len(), 2);
        assert_eq!(sg.components[0], vec![LatticePoint::from([0, 0])]);
        assert_eq!(
            geodesic_length_exact(&w(&text, 2), 2, &Caps::default()).unwrap(),
            4 + 2 * 3
        );
    }

    #[test]
    fn open_paths_touch_the_support_at_both_ends() {
        let f = compute_flow(&w("x1 x1 x2 x1^-1", 2), 2).unwrap();
        let sg = support_components(&f);
        assert!(sg.edge_counts.iter().all(|&c| c > 0));
        let all: Vec<_> = sg.components.concat();
        assert!(all.contains(&LatticePoint::from([0, 0])) && all.contains(f.endpoint()));
    }

    #[test]
    fn exact_length_examples() {
        let caps = Caps::default();
        let oracle = OracleCaps::default();
        assert_eq!(geodesic_length_exact(&w("x1", 2), 2, &caps).unwrap(), 1);
        let c = w("x1 x2 x1^-1 x2^-1", 2);
        assert_eq!(geodesic_length_exact(&c, 2, &caps).unwrap(), 4);
        assert_eq!(
            bfs_geodesic_oracle_metabelian(&c, 2, 6, oracle).unwrap(),
            OracleDistance::Within(4)
        );
        let far = w(&two_component_word(), 2);
        assert_eq!(geodesic_length_exact(&far, 2, &caps).unwrap(), 14);
        assert_eq!(
            bfs_geodesic_oracle_metabelian(&Word::empty(), 2, 3, oracle).unwrap(),
            OracleDistance::Within(0)
        );
    }

    /// Distance up to `2·half` by meeting in the middle: some geodesic passes
    /// through an element `h` with `|h| <= half` and `|h⁻¹g| <= half`.
    fn meet_in_the_middle(target: &Flow, half: usize) -> Option<u64> {
        let ball = metabelian_ball(target.rank(), half, OracleCaps::default()).unwrap();
        ball.iter()
            .filter_map(|(h, d)| {
                let rest = h.inverse().compose(target);
                ball.distance(&rest).value().map(|r| d as u64 + r)
            })
            .min()
    }

    #[test]
    fn two_component_example_against_search() {
        let far = compute_flow(&w(&two_component_word(), 2), 2).unwrap();
        assert_eq!(meet_in_the_middle(&far, 7), Some(14));
        assert_eq!(meet_in_the_middle(&far, 6), None);
        let c = compute_flow(&w("x1 x2 x1^-1 x2^-1", 2), 2).unwrap();
        assert_eq!(meet_in_the_middle(&c, 2), Some(4));
    }

    #[test]
    fn approx_examples() {
        let caps = Caps::default();
        let est = geodesic_length_2approx(&w("x1 x2 x1^-1 x2^-1", 2), 2, InnerSolver::Exact, &caps).unwrap();
        assert_eq!(
            est,
            ApproxEstimate {
                estimate: 4,
                exact_flow_term: 4,
                tree_length: 0
            }
        );
        let far = w(&two_component_word(), 2);
        let est = geodesic_length_2approx(&far, 2, InnerSolver::Exact, &caps).unwrap();
        assert_eq!((est.estimate, est.exact_flow_term, est.tree_length), (14, 4, 5));
    }

    #[test]
    fn word_examples() {
        let caps = Caps::default();
        assert_eq!(
            geodesic_word_metabelian(&w("x1", 1), 1, InnerSolver::Exact, &caps)
                .unwrap()
                .to_string(),
            "x1"
        );
        assert!(
            geodesic_word_metabelian(&w("x1 x1^-1", 1), 1, InnerSolver::Exact, &caps)
                .unwrap()
                .is_empty()
        );
        let far = w(&two_component_word(), 2);
        let g = geodesic_word_exact(&far, 2, &caps).unwrap();
        assert_eq!(g.len(), 14);
        assert!(metabelian_equal(&g, &far, 2).unwrap());
    }

    #[test]
    fn exact_matches_ball_up_to_radius_six() {
        let caps = Caps::default();
        for rank in [1usize, 2, 3] {
            let radius = if rank == 3 { 5 } else { 6 };
            let ball = metabelian_ball(rank, radius, OracleCaps::default()).unwrap();
            for word in reduced_words_up_to(&alphabet(rank), radius) {
                let d = ball.distance(&compute_flow(&word, rank).unwrap()).value().unwrap();
                assert_eq!(geodesic_length_exact(&word, rank, &caps).unwrap(), d, "{word}");
            }
        }
    }

    #[test]
    fn approx_bound_on_random_words() {
        let caps = Caps::default();
        let mut rng = seeded_rng(21);
        for _ in 0..150 {
            let len = rng.gen_range(0..=30);
            let word = random_reduced_word(&mut rng, &alphabet(2), len);
            let exact = geodesic_length_exact(&word, 2, &caps).unwrap();
            for inner in [InnerSolver::Exact, InnerSolver::Mst] {
                let est = geodesic_length_2approx(&word, 2, inner, &caps).unwrap();
                assert!(exact <= est.estimate);
                if inner == InnerSolver::Exact {
                    assert!(est.estimate <= 3 * exact, "{word}");
                }
                let out = geodesic_word_metabelian(&word, 2, inner, &caps).unwrap();
                assert!(metabelian_equal(&out, &word, 2).unwrap());
                assert_eq!(out.len() as u64, est.estimate);
            }
            assert!(exact <= word.len() as u64);
        }
    }

    fn arb_word(rank: u32, max_len: usize) -> impl Strategy<Value = Word> {
        let letters = Alphabet::metabelian(rank).letters();
        prop::collection::vec(prop::sample::select(letters), 0..max_len).prop_map(Word::from_letters)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn flows_are_kirchhoff_and_additive(u in arb_word(3, 30), v in arb_word(3, 30)) {
            let (fu, fv) = (compute_flow(&u, 3).unwrap(), compute_flow(&v, 3).unwrap());
            prop_assert!(check_kirchhoff(&fu));
            let uv = Word::from_letters(u.letters().iter().chain(v.letters()).copied().collect());
            prop_assert_eq!(compute_flow(&uv, 3).unwrap(), fu.compose(&fv));
            prop_assert_eq!(compute_flow(&invert(&u), 3).unwrap(), fu.inverse());
            prop_assert!(compute_flow(&concat(&u, &invert(&u)).unwrap(), 3).unwrap().is_identity());
            let raw = Word::from_letters(u.letters().iter().chain(invert(&u).letters()).copied().collect());
            prop_assert!(compute_flow(&raw, 3).unwrap().is_identity());
        }

        #[test]
        fn perturbations_break_kirchhoff_unless_circulations(
            u in arb_word(2, 20),
            base in prop::collection::vec(-3i64..3, 2),
            axis in 0usize..2,
            delta in prop_oneof![-3i64..=-1, 1i64..=3],
            square in any::<bool>(),
        ) {
            let f = compute_flow(&u, 2).unwrap();
            let p = LatticePoint::new(base);
            let mut extra = vec![(LatticeEdge::new(p.clone(), axis), delta)];
            if square {
                // Close the edge into a unit square: a circulation.
                let other = 1 - axis;
                extra.push((LatticeEdge::new(p.step(axis, 1), other), delta));
                extra.push((LatticeEdge::new(p.step(other, 1), axis), -delta));
                extra.push((LatticeEdge::new(p.clone(), other), -delta));
            }
            let values = f.values().iter().map(|(e, v)| (e.clone(), *v)).chain(extra);
            let g = Flow::new(2, values, f.endpoint().clone()).unwrap();
            prop_assert_eq!(check_kirchhoff(&g), square);
        }
    }
}
