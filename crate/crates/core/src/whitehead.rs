//! Star graphs, ideal edges and trees, blowups of a rose, reductive pairs and
//! norm descent.
//!
//! Subsets of the half-edge set `H = {0, .., 2n-1}` of a rose are bitmasks;
//! half-edge `h` is bit `h`, its partner is `h ^ 1`, and `h` is also the
//! letter code, so petal `i` is departed on `2(i-1)` and arrived at on
//! `2(i-1) + 1`.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Serialize, Serializer};

use crate::config::Limits;
use crate::error::{Error, Result};
use crate::free_words::{classes_of_length, ConjugacyClass, Letter};
use crate::graphs::{Forest, Graph, HalfEdge, VertexId};
use crate::marked_graphs::{compare_norm, reduce_path, LazyVector, MarkedGraph, Rose};

/// A subset of `H` as a bitmask.
pub type Subset = u32;

pub fn full_set(n: usize) -> Subset {
    if 2 * n >= 32 {
        u32::MAX
    } else {
        (1u32 << (2 * n)) - 1
    }
}

pub fn subset_of(half_edges: &[HalfEdge]) -> Subset {
    half_edges.iter().fold(0, |s, &h| s | 1 << h)
}

pub fn members(s: Subset) -> Vec<HalfEdge> {
    (0..32).filter(|&h| s >> h & 1 == 1).collect()
}

fn contains(s: Subset, h: HalfEdge) -> bool {
    s >> h & 1 == 1
}

/// The cyclic letter sequence of the tight loop of `w` in `rho`.
fn tight_letters(rho: &Rose, letters: &[Letter]) -> Vec<Letter> {
    let image = rho.phi().apply_letters(letters);
    let l = image.letters();
    let (mut i, mut j) = (0, l.len());
    while j >= i + 2 && l[i] == l[j - 1].inverse() {
        i += 1;
        j -= 1;
    }
    l[i..j].to_vec()
}

/// Turns of the tight loop: for consecutive letters `a b`, the edge joins the
/// half-edge where `a` arrives to the one where `b` departs.
fn turns(cyclic: &[Letter]) -> impl Iterator<Item = (HalfEdge, HalfEdge)> + '_ {
    let k = cyclic.len();
    (0..k).map(move |t| (cyclic[t].code() ^ 1, cyclic[(t + 1) % k].code()))
}

fn cut(rho: &Rose, letters: &[Letter], a: Subset, b: Subset) -> i64 {
    turns(&tight_letters(rho, letters))
        .filter(|&(x, y)| (contains(a, x) && contains(b, y)) || (contains(a, y) && contains(b, x)))
        .count() as i64
}

/// The multigraph on `H` recording the turns of a tight loop.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StarGraph {
    pub rank: usize,
    pub class: ConjugacyClass,
    pub edges: Vec<(HalfEdge, HalfEdge)>,
}

impl StarGraph {
    pub fn valence(&self, h: HalfEdge) -> usize {
        self.edges
            .iter()
            .map(|&(x, y)| usize::from(x == h) + usize::from(y == h))
            .sum()
    }

    pub fn valences(&self) -> Vec<usize> {
        (0..2 * self.rank).map(|h| self.valence(h)).collect()
    }

    /// Valence of `e_i` plus valence of `ē_i`, per petal.
    pub fn petal_valences(&self) -> Vec<usize> {
        (0..self.rank)
            .map(|i| self.valence(2 * i) + self.valence(2 * i + 1))
            .collect()
    }

    pub fn to_dot(&self) -> String {
        let mut s = format!("graph star_{} {{\n", self.class);
        for h in 0..2 * self.rank {
            let name = half_edge_name(h);
            let _ = writeln!(s, "  h{h} [label=\"{name}\"];");
        }
        for &(x, y) in &self.edges {
            let _ = writeln!(s, "  h{x} -- h{y};");
        }
        s.push_str("}\n");
        s
    }
}

/// `e1`, `E1` (for the reverse), `e2`, ...
pub fn half_edge_name(h: HalfEdge) -> String {
    format!("{}{}", if h & 1 == 0 { 'e' } else { 'E' }, h / 2 + 1)
}

pub fn star_graph(rho: &Rose, w: &ConjugacyClass) -> StarGraph {
    StarGraph {
        rank: rho.rank(),
        class: w.clone(),
        edges: turns(&tight_letters(rho, w.letters())).collect(),
    }
}

/// Number of star-graph edges with one end in `a` and the other in `b`.
pub fn dot(rho: &Rose, a: Subset, b: Subset) -> Result<LazyVector> {
    if a & b != 0 {
        return Err(Error::NotDisjoint);
    }
    let r = rho.clone();
    Ok(LazyVector::raw(rho.rank(), move |w| cut(&r, w, a, b)))
}

/// `|A| = A.Ā`.
pub fn size(rho: &Rose, a: Subset) -> Result<LazyVector> {
    let h = full_set(rho.rank());
    if a == 0 || a & h == h || a & !h != 0 {
        return Err(Error::DegenerateSubset);
    }
    dot(rho, a, h & !a)
}

/// `A.Ā` without the nondegeneracy check; zero on `∅` and `H`.
fn raw_size(rho: &Rose, letters: &[Letter], a: Subset) -> i64 {
    cut(rho, letters, a, full_set(rho.rank()) & !a)
}

/// Checks `|A| + |B| = |A∩B| + |A∪B| + 2 X.Y` with `X = A∩B̄`, `Y = B∩Ā`
/// on every class of length at most `max_len`.
pub fn count_identity_check(rho: &Rose, a: Subset, b: Subset, max_len: usize) -> bool {
    let h = full_set(rho.rank());
    let (x, y) = (a & !b & h, b & !a & h);
    (1..=max_len).all(|l| {
        classes_of_length(rho.rank(), l).iter().all(|w| {
            let w = w.letters();
            raw_size(rho, w, a) + raw_size(rho, w, b)
                == raw_size(rho, w, a & b) + raw_size(rho, w, (a | b) & h) + 2 * cut(rho, w, x, y)
        })
    })
}

/// A bipartition of `H`, stored by the side containing half-edge 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IdealEdge {
    rank: usize,
    side: Subset,
}

impl IdealEdge {
    /// Either side may be given.
    pub fn new(rank: usize, side: Subset) -> Result<IdealEdge> {
        let h = full_set(rank);
        if side == 0 || side & h == h || side & !h != 0 {
            return Err(Error::DegenerateSubset);
        }
        let side = if contains(side, 0) { side } else { h & !side };
        Ok(IdealEdge { rank, side })
    }

    /// A nontrivial ideal edge, or `NotIdeal`.
    pub fn checked(rank: usize, side: Subset) -> Result<IdealEdge> {
        let e = IdealEdge::new(rank, side)?;
        if !e.is_ideal() {
            return Err(Error::NotIdeal(format!("{e} separates no pair")));
        }
        if e.is_trivial() {
            return Err(Error::NotIdeal(format!("{e} has a singleton side")));
        }
        Ok(e)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// The side containing half-edge 0.
    pub fn side(&self) -> Subset {
        self.side
    }

    pub fn other_side(&self) -> Subset {
        full_set(self.rank) & !self.side
    }

    pub fn sides(&self) -> [Subset; 2] {
        [self.side, self.other_side()]
    }

    /// The side containing `h`.
    pub fn side_containing(&self, h: HalfEdge) -> Subset {
        if contains(self.side, h) {
            self.side
        } else {
            self.other_side()
        }
    }

    pub fn is_ideal(&self) -> bool {
        is_ideal(self.side)
    }

    pub fn is_trivial(&self) -> bool {
        self.sides().iter().any(|s| s.count_ones() == 1)
    }

    pub fn compatible(&self, other: &IdealEdge) -> bool {
        self.sides().iter().any(|a| other.sides().iter().any(|b| a & b == 0))
    }

    pub fn crosses(&self, other: &IdealEdge) -> bool {
        !self.compatible(other)
    }

    /// Half-edges `h` with `h` on one side and `h ^ 1` on the other.
    pub fn separated(&self) -> Vec<HalfEdge> {
        (0..2 * self.rank)
            .filter(|&h| contains(self.side, h) != contains(self.side, h ^ 1))
            .collect()
    }
}

impl std::fmt::Display for IdealEdge {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let names = |s: Subset| members(s).into_iter().map(half_edge_name).collect::<Vec<_>>().join(",");
        write!(f, "{{{}}}|{{{}}}", names(self.side), names(self.other_side()))
    }
}

impl Serialize for IdealEdge {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        members(self.side).serialize(s)
    }
}

/// Separates some pair `{e, ē}`.
pub fn is_ideal(a: Subset) -> bool {
    (0..16).any(|i| contains(a, 2 * i) != contains(a, 2 * i + 1))
}

/// One side is a singleton.
pub fn is_trivial(rank: usize, a: Subset) -> bool {
    a.count_ones() == 1 || (full_set(rank) & !a).count_ones() == 1
}

pub fn compatible(a: &IdealEdge, b: &IdealEdge) -> bool {
    a.compatible(b)
}

/// All nontrivial ideal edges, in increasing order of canonical side.
pub fn nontrivial_ideal_edges(rank: usize) -> Vec<IdealEdge> {
    let h = full_set(rank);
    (1..h)
        .filter(|s| s & 1 == 1)
        .filter_map(|s| IdealEdge::checked(rank, s).ok())
        .collect()
}

/// A set of pairwise compatible nontrivial ideal edges.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct IdealTree(BTreeSet<IdealEdge>);

impl IdealTree {
    pub fn new(edges: impl IntoIterator<Item = IdealEdge>) -> Result<IdealTree> {
        let edges: BTreeSet<IdealEdge> = edges.into_iter().collect();
        for e in &edges {
            if !e.is_ideal() || e.is_trivial() {
                return Err(Error::NotIdeal(e.to_string()));
            }
        }
        let v: Vec<&IdealEdge> = edges.iter().collect();
        for (i, a) in v.iter().enumerate() {
            if v[i + 1..].iter().any(|b| a.crosses(b)) {
                return Err(Error::IncompatibleEdges);
            }
        }
        Ok(IdealTree(edges))
    }

    pub fn empty() -> IdealTree {
        IdealTree::default()
    }

    pub fn edges(&self) -> &BTreeSet<IdealEdge> {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, e: &IdealEdge) -> bool {
        self.0.contains(e)
    }

    pub fn with(&self, e: IdealEdge) -> IdealTree {
        let mut s = self.0.clone();
        s.insert(e);
        IdealTree(s)
    }

    pub fn without(&self, e: &IdealEdge) -> IdealTree {
        let mut s = self.0.clone();
        s.remove(e);
        IdealTree(s)
    }

    pub fn is_subset(&self, other: &IdealTree) -> bool {
        self.0.is_subset(&other.0)
    }
}

/// Every ideal tree of the given rank (including the empty one).
pub fn all_ideal_trees(rank: usize) -> Vec<IdealTree> {
    let edges = nontrivial_ideal_edges(rank);
    let mut out = Vec::new();
    let mut chosen: Vec<IdealEdge> = Vec::new();
    fn go(edges: &[IdealEdge], from: usize, chosen: &mut Vec<IdealEdge>, out: &mut Vec<IdealTree>) {
        out.push(IdealTree(chosen.iter().copied().collect()));
        for i in from..edges.len() {
            if chosen.iter().all(|c| c.compatible(&edges[i])) {
                chosen.push(edges[i]);
                go(edges, i + 1, chosen, out);
                chosen.pop();
            }
        }
    }
    go(&edges, 0, &mut chosen, &mut out);
    out
}

/// A marked graph in the star of a rose together with the tree that
/// collapses back onto it.
#[derive(Clone, Debug)]
pub struct Blowup {
    pub marked: MarkedGraph,
    /// Tree edge of each ideal edge; petal `i` keeps edge id `i`.
    pub tree_edges: Vec<(IdealEdge, usize)>,
}

impl Blowup {
    pub fn tree(&self) -> Forest {
        Forest::new(self.tree_edges.iter().map(|&(_, e)| e))
    }

    pub fn edge_of(&self, alpha: &IdealEdge) -> Option<usize> {
        self.tree_edges.iter().find(|(a, _)| a == alpha).map(|&(_, e)| e)
    }
}

/// Reconstructs the graph of an ideal tree: one tree vertex per side not
/// containing half-edge 0 plus a root, and each petal reattached at the
/// innermost such side containing its half-edges.
pub fn blowup(rho: &Rose, t: &IdealTree) -> Result<Blowup> {
    let n = rho.rank();
    let full = full_set(n);
    let edges: Vec<IdealEdge> = t.edges().iter().copied().collect();
    for (i, a) in edges.iter().enumerate() {
        if a.rank() != n {
            return Err(Error::NotIdeal(format!("{a} has the wrong rank")));
        }
        if edges[i + 1..].iter().any(|b| a.crosses(b)) {
            return Err(Error::IncompatibleEdges);
        }
    }
    let clusters: Vec<Subset> = edges.iter().map(|e| full & !e.side()).collect();
    // Innermost cluster strictly containing `s`, as a vertex id (0 = root).
    let smallest_above = |s: Subset, strict: bool| -> VertexId {
        clusters
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c & s == s && (!strict || c != s))
            .min_by_key(|&(_, &c)| c.count_ones())
            .map_or(0, |(k, _)| k + 1)
    };
    let mut vertex_of: Vec<VertexId> = (0..2 * n).map(|h| smallest_above(1 << h, false)).collect();
    let mut tree_edges = Vec::with_capacity(edges.len());
    for (k, (&c, &e)) in clusters.iter().zip(&edges).enumerate() {
        vertex_of.push(smallest_above(c, true));
        vertex_of.push(k + 1);
        tree_edges.push((e, n + k));
    }
    let graph = Graph::new(edges.len() + 1, vertex_of)?;
    let tree: BTreeSet<usize> = (n..n + edges.len()).collect();
    let route = |from: VertexId, to: VertexId| graph.tree_path(&tree, from, to).expect("tree spans");
    let petals = rho
        .phi()
        .images()
        .iter()
        .map(|w| {
            let mut path = Vec::new();
            let mut at = 0;
            for l in w.letters() {
                let h = l.code();
                path.extend(route(at, graph.tail(h)));
                path.push(h);
                at = graph.head(h);
            }
            path.extend(route(at, 0));
            reduce_path(&path)
        })
        .collect();
    let marked = MarkedGraph::new(graph, 0, petals)?;
    Ok(Blowup { marked, tree_edges })
}

/// The rose reached from the two-vertex blowup of `alpha` by collapsing the
/// petal edge of `a` instead of the new edge. `a` must be separated.
pub fn collapse_petal(rho: &Rose, alpha: &IdealEdge, a: HalfEdge) -> Result<Rose> {
    if !alpha.separated().contains(&a) {
        return Err(Error::NotIdeal(format!(
            "{alpha} does not separate {}",
            half_edge_name(a)
        )));
    }
    let b = blowup(rho, &IdealTree::new([*alpha])?)?;
    b.marked.collapse(&Forest::new([a / 2]))?.to_rose()
}

/// `(A, a)` with `a ∈ A`, `ā ∉ A` for a side `A` of an ideal edge.
#[derive(Clone, Debug, Serialize)]
pub struct ReductivePair {
    pub edge: IdealEdge,
    #[serde(serialize_with = "serialize_subset")]
    pub side: Subset,
    pub half_edge: HalfEdge,
    /// The rose reached by collapsing the petal edge of `half_edge`.
    pub collapsed: Rose,
}

fn serialize_subset<S: Serializer>(s: &Subset, ser: S) -> std::result::Result<S::Ok, S::Error> {
    members(*s).serialize(ser)
}

impl ReductivePair {
    /// `|a| − |A|`, which equals the norm drop of the collapse.
    pub fn margin(&self, rho: &Rose) -> LazyVector {
        LazyVector::rose_norm_difference(rho, &self.collapsed)
    }

    fn key(&self) -> (Subset, HalfEdge) {
        (self.side, self.half_edge)
    }
}

/// Candidate pairs of `alpha` whose margin sign is decided, reductive or not.
fn candidate_pairs(rho: &Rose, alpha: &IdealEdge) -> Result<Vec<ReductivePair>> {
    let mut out = Vec::new();
    for side in alpha.sides() {
        for a in members(side) {
            if contains(side, a ^ 1) {
                continue;
            }
            out.push(ReductivePair {
                edge: *alpha,
                side,
                half_edge: a,
                collapsed: collapse_petal(rho, alpha, a)?,
            });
        }
    }
    Ok(out)
}

/// Whether `(side, a)` is a reductive pair for the ideal edge with that side.
pub fn is_reductive_pair(rho: &Rose, side: Subset, a: HalfEdge, limits: &Limits) -> Result<bool> {
    if !contains(side, a) || contains(side, a ^ 1) {
        return Ok(false);
    }
    let alpha = IdealEdge::new(rho.rank(), side)?;
    if !alpha.is_ideal() || alpha.is_trivial() {
        return Ok(false);
    }
    Ok(compare_norm(rho, &collapse_petal(rho, &alpha, a)?, limits)? == Ordering::Greater)
}

/// All reductive pairs of a nontrivial ideal edge.
pub fn reductive_pairs(rho: &Rose, alpha: &IdealEdge, limits: &Limits) -> Result<Vec<ReductivePair>> {
    if !alpha.is_ideal() || alpha.is_trivial() {
        return Err(Error::NotIdeal(alpha.to_string()));
    }
    let mut out = Vec::new();
    for p in candidate_pairs(rho, alpha)? {
        if compare_norm(rho, &p.collapsed, limits)? == Ordering::Greater {
            out.push(p);
        }
    }
    Ok(out)
}

pub fn is_reductive_edge(rho: &Rose, alpha: &IdealEdge, limits: &Limits) -> Result<bool> {
    // Both sides of a pair collapse the same petal, so one side suffices.
    for p in candidate_pairs(rho, alpha)?
        .into_iter()
        .filter(|p| p.side == alpha.side())
    {
        if compare_norm(rho, &p.collapsed, limits)? == Ordering::Greater {
            return Ok(true);
        }
    }
    Ok(false)
}

/// The blown-up graph has a maximal tree whose collapse is a smaller rose.
pub fn is_reductive_tree(rho: &Rose, t: &IdealTree, limits: &Limits) -> Result<bool> {
    let b = blowup(rho, t)?;
    for tree in b.marked.graph().maximal_trees()? {
        let r = b.marked.collapse(&tree)?.to_rose()?;
        if compare_norm(rho, &r, limits)? == Ordering::Greater {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Nonempty and every member edge is reductive.
pub fn is_strictly_reductive_tree(rho: &Rose, t: &IdealTree, limits: &Limits) -> Result<bool> {
    if t.is_empty() {
        return Ok(false);
    }
    for e in t.edges() {
        if !is_reductive_edge(rho, e, limits)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Every reductive ideal edge of `rho`.
pub fn reductive_edges(rho: &Rose, limits: &Limits) -> Result<Vec<IdealEdge>> {
    let mut out = Vec::new();
    for e in nontrivial_ideal_edges(rho.rank()) {
        if is_reductive_edge(rho, &e, limits)? {
            out.push(e);
        }
    }
    Ok(out)
}

/// A reductive pair of largest margin.
#[derive(Clone, Debug, Serialize)]
pub struct MaxReductive {
    pub chosen: ReductivePair,
    /// Every pair whose margin equals the largest one, including `chosen`.
    pub tied: Vec<ReductivePair>,
}

impl MaxReductive {
    pub fn mu(&self) -> IdealEdge {
        self.chosen.edge
    }

    pub fn m_side(&self) -> Subset {
        self.chosen.side
    }

    pub fn m(&self) -> HalfEdge {
        self.chosen.half_edge
    }
}

/// The reductive pair whose collapse reaches the smallest rose; ties go to
/// the smallest `(side, half-edge)` encoding.
pub fn max_reductive_edge(rho: &Rose, limits: &Limits) -> Result<Option<MaxReductive>> {
    let mut pairs = Vec::new();
    for e in nontrivial_ideal_edges(rho.rank()) {
        pairs.extend(reductive_pairs(rho, &e, limits)?);
    }
    let mut best: Vec<ReductivePair> = Vec::new();
    for p in pairs {
        match best.first() {
            None => best.push(p),
            Some(b) => match compare_norm(&p.collapsed, &b.collapsed, limits)? {
                Ordering::Less => best = vec![p],
                Ordering::Equal => best.push(p),
                Ordering::Greater => {}
            },
        }
    }
    if best.is_empty() {
        return Ok(None);
    }
    best.sort_by_key(ReductivePair::key);
    Ok(Some(MaxReductive {
        chosen: best[0].clone(),
        tied: best,
    }))
}

/// Which construction produced the edge from the Key Lemma.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GammaKind {
    Union,
    Intersection,
}

#[derive(Clone, Debug, Serialize)]
pub struct KeyLemmaOutcome {
    pub gamma: IdealEdge,
    pub kind: GammaKind,
    #[serde(serialize_with = "serialize_subset")]
    pub gamma_side: Subset,
}

/// Given a maximal reductive pair `(M, m)` for `mu` and a reductive `alpha`
/// crossing `mu`, with `A` the side of `alpha` containing `m`, returns the
/// reductive ideal edge with side `A ∪ M` or else `Ā ∩ M`.
pub fn key_lemma_gamma(
    rho: &Rose,
    max: &MaxReductive,
    m_pair: &ReductivePair,
    alpha: &IdealEdge,
    limits: &Limits,
) -> Result<KeyLemmaOutcome> {
    let n = rho.rank();
    let full = full_set(n);
    let (mu, big_m, m) = (m_pair.edge, m_pair.side, m_pair.half_edge);
    if !max.tied.iter().any(|p| p.key() == m_pair.key() && p.edge == mu) {
        return Err(Error::HypothesesViolated(
            "(M, m) is not a maximal reductive pair".into(),
        ));
    }
    if !alpha.crosses(&mu) {
        return Err(Error::HypothesesViolated(format!("{alpha} does not cross {mu}")));
    }
    if !is_reductive_edge(rho, alpha, limits)? {
        return Err(Error::HypothesesViolated(format!("{alpha} is not reductive")));
    }
    let a_side = alpha.side_containing(m);
    let candidates = [
        (GammaKind::Union, (a_side | big_m) & full),
        (GammaKind::Intersection, full & !a_side & big_m),
    ];
    for (kind, side) in candidates {
        let Ok(gamma) = IdealEdge::checked(n, side) else {
            continue;
        };
        if !is_reductive_edge(rho, &gamma, limits)? {
            continue;
        }
        if !gamma.compatible(alpha) || !gamma.compatible(&mu) {
            return Err(Error::ConclusionFailed(format!(
                "{gamma} is reductive but crosses {alpha} or {mu}"
            )));
        }
        return Ok(KeyLemmaOutcome {
            gamma,
            kind,
            gamma_side: side,
        });
    }
    Err(Error::ConclusionFailed(format!(
        "neither A∪M nor Ā∩M bounds a reductive ideal edge for α = {alpha}, μ = {mu}"
    )))
}

/// Sector census: when the four sectors cut by `alpha` and `mu` each hold
/// exactly one of `a, ā, m, m̄`, one of `(A∪M, m)` and `(Ā∩M, x)` is a
/// reductive pair, where `x ∈ {a, ā}` is the one lying in `Ā∩M`.
/// Returns `None` when the configuration does not occur.
pub fn sector_census(
    rho: &Rose,
    m_pair: &ReductivePair,
    alpha: &IdealEdge,
    a: HalfEdge,
    limits: &Limits,
) -> Result<Option<bool>> {
    let full = full_set(rho.rank());
    let (big_m, m) = (m_pair.side, m_pair.half_edge);
    let a_side = alpha.side_containing(m);
    let sectors = [
        a_side & big_m,
        a_side & !big_m & full,
        !a_side & big_m & full,
        !a_side & !big_m & full,
    ];
    let marks = [a, a ^ 1, m, m ^ 1];
    let one_each = sectors
        .iter()
        .all(|&s| marks.iter().filter(|&&x| contains(s, x)).count() == 1);
    if !one_each || a / 2 == m / 2 {
        return Ok(None);
    }
    let union = (a_side | big_m) & full;
    let meet = !a_side & big_m & full;
    let x = if contains(meet, a) { a } else { a ^ 1 };
    Ok(Some(
        is_reductive_pair(rho, union, m, limits)? || is_reductive_pair(rho, meet, x, limits)?,
    ))
}

#[derive(Clone, Debug, Serialize)]
pub struct DescentStep {
    pub mu: IdealEdge,
    #[serde(serialize_with = "serialize_subset")]
    pub side: Subset,
    pub half_edge: HalfEdge,
    pub rose: Rose,
}

/// Repeatedly collapses along a maximal reductive pair until none is left.
pub fn whitehead_reduce(rho: &Rose, limits: &Limits) -> Result<(Rose, Vec<DescentStep>)> {
    let mut current = rho.clone();
    let mut trace = Vec::new();
    while let Some(max) = max_reductive_edge(&current, limits)? {
        if trace.len() >= limits.descent_steps {
            return Err(Error::DescentCapExceeded(limits.descent_steps));
        }
        let next = max.chosen.collapsed.clone();
        if compare_norm(&current, &next, limits)? != Ordering::Greater {
            return Err(Error::PipelineDefect("descent step did not lower the norm".into()));
        }
        trace.push(DescentStep {
            mu: max.mu(),
            side: max.m_side(),
            half_edge: max.m(),
            rose: next.clone(),
        });
        current = next;
    }
    Ok((current, trace))
}

/// Translation lengths computed from star-graph edge counts; used to
/// cross-check the norm.
pub fn star_norm(rho: &Rose, w: &ConjugacyClass) -> usize {
    star_graph(rho, w).edges.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_words::enumerate_classes;
    use crate::marked_graphs::roses_equal;
    use crate::sampling::{random_nonstandard_rose, random_rose, rng_from_seed};

    fn rose(n: usize, imgs: &[&str]) -> Rose {
        Rose::from_images(n, imgs).unwrap()
    }

    fn class(s: &str, n: usize) -> ConjugacyClass {
        ConjugacyClass::parse(s, n).unwrap()
    }

    #[test]
    fn star_graph_of_figure_loop() {
        let g = star_graph(&Rose::standard(4), &class("bDcc", 4));
        assert_eq!(g.edges.len(), 4);
        assert_eq!(g.petal_valences(), vec![0, 2, 4, 2]);
        assert_eq!(g.valences().iter().sum::<usize>(), 8);
        let single = star_graph(&Rose::standard(2), &class("a", 2));
        assert_eq!(single.edges, vec![(1, 0)]);
    }

    #[test]
    fn valence_law_on_random_roses() {
        let mut rng = rng_from_seed(5);
        for _ in 0..50 {
            let r = random_rose(&mut rng, 3, 6);
            for w in enumerate_classes(3, Some(3)) {
                let g = star_graph(&r, &w);
                assert_eq!(g.edges.len(), r.translation_length(&w));
                assert_eq!(g.valences().iter().sum::<usize>(), 2 * r.translation_length(&w));
            }
        }
    }

    #[test]
    fn dot_products() {
        let r = rose(3, &["abC", "cb", "c"]);
        assert!(dot(&r, 0b11, 0).unwrap().agrees_up_to(&LazyVector::zero(3), 3));
        assert_eq!(dot(&r, 0b11, 0b10).unwrap_err(), Error::NotDisjoint);
        let (a, b, c) = (0b000011, 0b001100, 0b110000);
        let ab = dot(&r, a, b).unwrap();
        assert!(ab.agrees_up_to(&dot(&r, b, a).unwrap(), 4));
        let split = dot(&r, a, b).unwrap().add(&dot(&r, a, c).unwrap());
        assert!(dot(&r, a, b | c).unwrap().agrees_up_to(&split, 4));
        // |e| is the valence of e.
        for h in 0..6 {
            let s = size(&r, 1 << h).unwrap();
            for w in enumerate_classes(3, Some(3)) {
                assert_eq!(s.coordinate(&w), star_graph(&r, &w).valence(h) as i64);
            }
        }
        assert!(size(&r, a)
            .unwrap()
            .agrees_up_to(&size(&r, full_set(3) & !a).unwrap(), 4));
        assert_eq!(size(&r, 0).unwrap_err(), Error::DegenerateSubset);
    }

    #[test]
    fn counting_identity() {
        let r = rose(3, &["abC", "cb", "c"]);
        assert!(count_identity_check(&r, 0b000101, 0b011000, 4));
        assert!(count_identity_check(&r, 0b000011, 0b001111, 4));
        assert!(count_identity_check(&r, 0b010101, 0b100110, 4));
    }

    #[test]
    fn ideal_edge_predicates() {
        // e1 = 0, ē1 = 1, e2 = 2, ē2 = 3.
        assert!(!is_ideal(0b0011));
        let x = IdealEdge::checked(2, 0b0101).unwrap();
        let y = IdealEdge::checked(2, 0b1001).unwrap();
        assert!(x.crosses(&y));
        assert_eq!(nontrivial_ideal_edges(2), vec![x, y]);
        assert!(is_trivial(2, 0b0111));
        assert_eq!(all_ideal_trees(2).len(), 3);
    }

    #[test]
    fn blowups_collapse_back() {
        let r = rose(3, &["abC", "cb", "c"]);
        assert_eq!(blowup(&r, &IdealTree::empty()).unwrap().marked, r.as_marked_graph());
        let edges = nontrivial_ideal_edges(3);
        for t in all_ideal_trees(3) {
            let b = blowup(&r, &t).unwrap();
            assert!(b.marked.graph().is_core());
            assert!(b.marked.graph().separating_edges().is_empty());
            let back = b.marked.collapse(&b.tree()).unwrap().to_rose().unwrap();
            assert!(roses_equal(&back, &r));
        }
        assert!(edges.len() > 2);
        let theta = blowup(
            &Rose::standard(2),
            &IdealTree::new([IdealEdge::checked(2, 0b0101).unwrap()]).unwrap(),
        )
        .unwrap();
        assert!(theta.marked.graph().is_isomorphic(&Graph::theta()));
    }

    #[test]
    fn two_tree_figure_shape() {
        // Rank 3, two nested partitions: the tree has two edges and three
        // vertices, and every half-edge lands on a vertex of valence >= 3.
        let a = IdealEdge::checked(3, subset_of(&[0, 2, 4])).unwrap();
        let b = IdealEdge::checked(3, subset_of(&[0, 2, 4, 1])).unwrap();
        let t = IdealTree::new([a, b]).unwrap();
        let g = blowup(&Rose::standard(3), &t).unwrap();
        assert_eq!(g.marked.graph().vertex_count(), 3);
        assert_eq!(g.marked.graph().edge_count(), 5);
        assert!(g.marked.graph().valences().iter().all(|&v| v >= 3));
    }

    #[test]
    fn sizes_match_crossings() {
        let mut rng = rng_from_seed(9);
        for _ in 0..10 {
            let r = random_rose(&mut rng, 3, 6);
            for alpha in nontrivial_ideal_edges(3) {
                let b = blowup(&r, &IdealTree::new([alpha]).unwrap()).unwrap();
                let crossing = b.marked.edge_crossings(b.edge_of(&alpha).unwrap()).unwrap();
                assert!(crossing.agrees_up_to(&size(&r, alpha.side()).unwrap(), 3));
                for e in alpha.separated() {
                    let petal = b.marked.edge_crossings(e / 2).unwrap();
                    assert!(petal.agrees_up_to(&size(&r, 1 << e).unwrap(), 3));
                }
            }
        }
    }

    #[test]
    fn margins_are_norm_drops() {
        let r = rose(2, &["ab", "b"]);
        for alpha in nontrivial_ideal_edges(2) {
            for p in candidate_pairs(&r, &alpha).unwrap() {
                let formula = size(&r, 1 << p.half_edge).unwrap().sub(&size(&r, p.side).unwrap());
                assert!(p.margin(&r).agrees_up_to(&formula, 5));
            }
        }
    }

    #[test]
    fn standard_rose_is_not_reducible() {
        let limits = Limits::default();
        for n in 2..=3 {
            let r0 = Rose::standard(n);
            for alpha in nontrivial_ideal_edges(n) {
                assert!(reductive_pairs(&r0, &alpha, &limits).unwrap().is_empty());
            }
            assert!(max_reductive_edge(&r0, &limits).unwrap().is_none());
            let (end, trace) = whitehead_reduce(&r0, &limits).unwrap();
            assert!(trace.is_empty());
            assert_eq!(end, r0);
        }
    }

    #[test]
    fn transvection_reduces_in_one_step() {
        let limits = Limits::default();
        let r = rose(2, &["ab", "b"]);
        let max = max_reductive_edge(&r, &limits).unwrap().unwrap();
        let first = max.chosen.margin(&r).prefix(2).into_iter().find(|&x| x != 0).unwrap();
        assert!(first > 0);
        let (end, trace) = whitehead_reduce(&r, &limits).unwrap();
        assert_eq!(trace.len(), 1);
        assert!(roses_equal(&end, &Rose::standard(2)));
    }

    #[test]
    fn argmax_is_label_invariant() {
        let limits = Limits::default();
        let mut rng = rng_from_seed(21);
        for _ in 0..10 {
            let r = random_nonstandard_rose(&mut rng, 3, 6);
            let twin = crate::sampling::random_isometric_twin(&mut rng, &r);
            let a = max_reductive_edge(&r, &limits).unwrap().unwrap();
            let b = max_reductive_edge(&twin, &limits).unwrap().unwrap();
            assert!(roses_equal(&a.chosen.collapsed, &b.chosen.collapsed));
        }
    }

    #[test]
    fn key_lemma_rejects_bad_hypotheses() {
        let limits = Limits::default();
        let r = rose(2, &["ab", "b"]);
        let max = max_reductive_edge(&r, &limits).unwrap().unwrap();
        let mu = max.mu();
        assert!(matches!(
            key_lemma_gamma(&r, &max, &max.chosen, &mu, &limits),
            Err(Error::HypothesesViolated(_))
        ));
    }

    #[test]
    fn singleton_tree_reductive_iff_edge() {
        let limits = Limits::default();
        let mut rng = rng_from_seed(2);
        let r = random_nonstandard_rose(&mut rng, 3, 6);
        for e in nontrivial_ideal_edges(3) {
            let t = IdealTree::new([e]).unwrap();
            assert_eq!(
                is_reductive_tree(&r, &t, &limits).unwrap(),
                is_reductive_edge(&r, &e, &limits).unwrap()
            );
        }
    }
}
