//! Graph morphisms to the standard rose and Stallings folding.
//!
//! Folding starts from a homotopy inverse of a marked rose, drawn on the rose
//! with petals subdivided, and folds until the morphism is locally
//! injective. The source graph carries the marking throughout, so every
//! intermediate graph is a point of the spine once bivalent vertices are
//! erased, and each fold contributes a blowup followed by a collapse.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::free_words::{Automorphism, Letter, Word};
use crate::graphs::{edge_of, EdgeId, Forest, Graph, HalfEdge, VertexId};
use crate::marked_graphs::{reduce_path, roses_equal, MarkedGraph, Rose};

/// Classes up to this length are compared when checking spine steps.
pub const PATH_CHECK_LENGTH: usize = 4;

/// A morphism sending vertices to vertices and each edge to an edge or to a
/// vertex (`None`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphMorphism {
    source: Graph,
    target: Graph,
    half_edge_image: Vec<Option<HalfEdge>>,
    vertex_image: Vec<VertexId>,
}

impl GraphMorphism {
    pub fn new(
        source: Graph,
        target: Graph,
        half_edge_image: Vec<Option<HalfEdge>>,
        vertex_image: Vec<VertexId>,
    ) -> Result<GraphMorphism> {
        let bad = |msg: String| Err(Error::MalformedGraph(msg));
        if half_edge_image.len() != source.half_edge_count() || vertex_image.len() != source.vertex_count() {
            return bad("morphism tables have the wrong size".into());
        }
        if vertex_image.iter().any(|&v| v >= target.vertex_count()) {
            return bad("vertex image out of range".into());
        }
        for h in 0..source.half_edge_count() {
            let (t, hd) = (vertex_image[source.tail(h)], vertex_image[source.head(h)]);
            match (half_edge_image[h], half_edge_image[h ^ 1]) {
                (None, None) if t == hd => {}
                (Some(x), Some(y)) if x < target.half_edge_count() && y == x ^ 1 => {
                    if target.tail(x) != t || target.head(x) != hd {
                        return bad(format!("half-edge {h} breaks incidence"));
                    }
                }
                _ => return bad(format!("half-edge {h} breaks the involution")),
            }
        }
        Ok(GraphMorphism {
            source,
            target,
            half_edge_image,
            vertex_image,
        })
    }

    pub fn source(&self) -> &Graph {
        &self.source
    }

    pub fn target(&self) -> &Graph {
        &self.target
    }

    pub fn image(&self, h: HalfEdge) -> Option<HalfEdge> {
        self.half_edge_image[h]
    }

    pub fn vertex_image(&self, v: VertexId) -> VertexId {
        self.vertex_image[v]
    }

    /// Image of an edge path in the target, freely reduced.
    pub fn map_path(&self, path: &[HalfEdge]) -> Vec<HalfEdge> {
        reduce_path(&path.iter().filter_map(|&h| self.half_edge_image[h]).collect::<Vec<_>>())
    }
}

/// Why a morphism fails to be locally injective.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Witness {
    DegenerateEdge(EdgeId),
    /// Two half-edges at one vertex with the same image; `.0 < .1`.
    FoldablePair(HalfEdge, HalfEdge),
}

/// Every witness, degenerate edges first, then pairs in increasing order.
pub fn all_witnesses(m: &GraphMorphism) -> Vec<Witness> {
    let g = &m.source;
    let mut out: Vec<Witness> = (0..g.edge_count())
        .filter(|&e| m.half_edge_image[2 * e].is_none())
        .map(Witness::DegenerateEdge)
        .collect();
    for h1 in 0..g.half_edge_count() {
        for h2 in h1 + 1..g.half_edge_count() {
            if g.tail(h1) == g.tail(h2)
                && m.half_edge_image[h1].is_some()
                && m.half_edge_image[h1] == m.half_edge_image[h2]
            {
                out.push(Witness::FoldablePair(h1, h2));
            }
        }
    }
    out
}

/// `None` iff the morphism is locally injective; otherwise the smallest
/// witness.
pub fn local_injectivity_witness(m: &GraphMorphism) -> Option<Witness> {
    all_witnesses(m).into_iter().next()
}

/// A morphism to the standard rose whose source carries a marking.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoldState {
    marked: MarkedGraph,
    /// Image of each source half-edge as a letter code of the standard rose.
    image: Vec<Option<HalfEdge>>,
}

impl FoldState {
    pub fn marked(&self) -> &MarkedGraph {
        &self.marked
    }

    pub fn graph(&self) -> &Graph {
        self.marked.graph()
    }

    pub fn morphism(&self) -> GraphMorphism {
        let g = self.graph().clone();
        let n = self.marked.rank();
        GraphMorphism {
            vertex_image: vec![0; g.vertex_count()],
            source: g,
            target: Graph::rose(n),
            half_edge_image: self.image.clone(),
        }
    }

    /// The composite of the marking with the morphism, as an automorphism;
    /// it is inner for every state produced by folding.
    pub fn composite(&self) -> Automorphism {
        let m = self.morphism();
        let images = self
            .marked
            .petals()
            .iter()
            .map(|p| Word::new(m.map_path(p).into_iter().map(Letter::from_code)))
            .collect();
        Automorphism::from_images(self.marked.rank(), images).expect("images use rank letters")
    }
}

/// The homotopy inverse of a marked rose drawn as a morphism: petal `j` is
/// subdivided into `|psi(x_j)|` edges spelling `psi(x_j)`.
pub fn subdivided_inverse_morphism(rho: &Rose) -> Result<FoldState> {
    let n = rho.rank();
    let mut vertex_of = Vec::new();
    let mut image = Vec::new();
    // Forward half-edges of each subdivided petal, in order.
    let mut chains: Vec<Vec<HalfEdge>> = Vec::with_capacity(n);
    let mut next_vertex = 1;
    for j in 1..=n {
        let w = rho.psi().image(j);
        if w.is_empty() {
            return Err(Error::NotInvertible(format!("petal {j} has trivial inverse image")));
        }
        let mut chain = Vec::with_capacity(w.len());
        let mut at = 0;
        for (t, &l) in w.letters().iter().enumerate() {
            let to = if t + 1 == w.len() {
                0
            } else {
                next_vertex += 1;
                next_vertex - 1
            };
            chain.push(vertex_of.len());
            vertex_of.extend([at, to]);
            image.extend([Some(l.code()), Some(l.code() ^ 1)]);
            at = to;
        }
        chains.push(chain);
    }
    let graph = Graph::new(next_vertex, vertex_of)?;
    let petals = rho
        .phi()
        .images()
        .iter()
        .map(|w| {
            w.letters()
                .iter()
                .flat_map(|l| {
                    let c = &chains[l.index()];
                    if l.is_inverse() {
                        c.iter().rev().map(|h| h ^ 1).collect::<Vec<_>>()
                    } else {
                        c.clone()
                    }
                })
                .collect()
        })
        .collect();
    Ok(FoldState {
        marked: MarkedGraph::from_parts(graph, 0, petals)?,
        image,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FoldKind {
    /// Identify two edges at a vertex of valence at least three.
    Fold,
    /// Identify the two edges at a bivalent vertex; the resulting univalent
    /// vertex and its edge are collapsed at once.
    FoldCollapseUnivalent,
    CollapseDegenerate,
}

/// Effect of one move on the spine.
#[derive(Clone, Debug, Serialize)]
pub enum KnEffect {
    /// Collapse of the listed source edges.
    Collapse { edges: Vec<EdgeId> },
    /// Blow up `new_edge` to reach `blowup`, then collapse `folded` there.
    BlowupThenCollapse {
        blowup: MarkedGraph,
        new_edge: EdgeId,
        folded: [EdgeId; 2],
        loop_shaped: bool,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct FoldMove {
    pub kind: FoldKind,
    pub witness: Witness,
    pub edges_before: usize,
    pub edges_after: usize,
    pub kn_effect: KnEffect,
}

/// Performs the move described by `w`.
pub fn apply_fold(state: &FoldState, w: &Witness) -> Result<(FoldState, FoldMove)> {
    let g = state.graph();
    let before = g.edge_count();
    let (next, kind, effect) = match *w {
        Witness::DegenerateEdge(e) => {
            if e >= before || state.image[2 * e].is_some() {
                return Err(Error::InvalidWitness(format!("edge {e} is not degenerate")));
            }
            if g.is_loop(e) {
                return Err(Error::InvalidWitness(format!("degenerate loop {e}")));
            }
            let next = collapse_state(state, &Forest::new([e]))?;
            (
                next,
                FoldKind::CollapseDegenerate,
                KnEffect::Collapse { edges: vec![e] },
            )
        }
        Witness::FoldablePair(h1, h2) => {
            if h1 >= h2
                || h2 >= g.half_edge_count()
                || g.tail(h1) != g.tail(h2)
                || state.image[h1].is_none()
                || state.image[h1] != state.image[h2]
            {
                return Err(Error::InvalidWitness(format!("({h1}, {h2}) is not a foldable pair")));
            }
            let v = g.tail(h1);
            if g.head(h1) == g.head(h2) {
                return Err(Error::InvalidWitness("folded edges share their terminal vertex".into()));
            }
            if g.valence(v) == 2 {
                let edges = vec![edge_of(h1), edge_of(h2)];
                let next = collapse_state(state, &Forest::new(edges.iter().copied()))?;
                (next, FoldKind::FoldCollapseUnivalent, KnEffect::Collapse { edges })
            } else {
                let (blowup, new_edge) = blow_up_pair(state, h1, h2)?;
                let next = fold_pair(state, h1, h2)?;
                let effect = KnEffect::BlowupThenCollapse {
                    blowup,
                    new_edge,
                    folded: [edge_of(h1), edge_of(h2)],
                    loop_shaped: g.is_loop(edge_of(h1)) || g.is_loop(edge_of(h2)),
                };
                (next, FoldKind::Fold, effect)
            }
        }
    };
    let mv = FoldMove {
        kind,
        witness: *w,
        edges_before: before,
        edges_after: next.graph().edge_count(),
        kn_effect: effect,
    };
    Ok((next, mv))
}

fn collapse_state(state: &FoldState, forest: &Forest) -> Result<FoldState> {
    let c = state.graph().collapse_forest(forest)?;
    let marked = state.marked.collapse(forest)?;
    let mut image = vec![None; c.quotient.half_edge_count()];
    for h in 0..state.graph().half_edge_count() {
        if let Some(x) = c.map_half_edge(h) {
            image[x] = state.image[h];
        }
    }
    Ok(FoldState { marked, image })
}

/// Moves `h1`, `h2` to a new vertex joined to their old one by a new edge,
/// which the morphism crushes.
fn blow_up_pair(state: &FoldState, h1: HalfEdge, h2: HalfEdge) -> Result<(MarkedGraph, EdgeId)> {
    let g = state.graph();
    let v = g.tail(h1);
    let u = g.vertex_count();
    let eps = g.edge_count();
    let mut vertex_of: Vec<VertexId> = (0..g.half_edge_count()).map(|h| g.vertex_of(h)).collect();
    vertex_of[h1] = u;
    vertex_of[h2] = u;
    vertex_of.extend([v, u]);
    let graph = Graph::new(u + 1, vertex_of)?;
    let petals = state
        .marked
        .petals()
        .iter()
        .map(|p| {
            p.iter()
                .flat_map(|&h| {
                    if h == h1 || h == h2 {
                        vec![2 * eps, h]
                    } else if h == h1 ^ 1 || h == h2 ^ 1 {
                        vec![h, 2 * eps + 1]
                    } else {
                        vec![h]
                    }
                })
                .collect()
        })
        .collect();
    Ok((MarkedGraph::from_parts(graph, state.marked.basepoint(), petals)?, eps))
}

/// Identifies `h2` with `h1` and the head of `h2` with the head of `h1`.
fn fold_pair(state: &FoldState, h1: HalfEdge, h2: HalfEdge) -> Result<FoldState> {
    let g = state.graph();
    let (w1, w2) = (g.head(h1), g.head(h2));
    let gone = edge_of(h2);
    let merged = |x: VertexId| if x == w2 { w1 } else { x };
    let new_vertex = |x: VertexId| {
        let y = merged(x);
        if y > w2 {
            y - 1
        } else {
            y
        }
    };
    let new_half = |h: HalfEdge| {
        let h = if edge_of(h) == gone { h1 ^ (h & 1) ^ (h2 & 1) } else { h };
        if edge_of(h) > gone {
            h - 2
        } else {
            h
        }
    };
    let mut vertex_of = Vec::with_capacity(g.half_edge_count() - 2);
    let mut image = Vec::with_capacity(g.half_edge_count() - 2);
    for h in 0..g.half_edge_count() {
        if edge_of(h) != gone {
            vertex_of.push(new_vertex(g.vertex_of(h)));
            image.push(state.image[h]);
        }
    }
    let graph = Graph::new(g.vertex_count() - 1, vertex_of)?;
    let petals = state
        .marked
        .petals()
        .iter()
        .map(|p| p.iter().map(|&h| new_half(h)).collect())
        .collect();
    let marked = MarkedGraph::from_parts(graph, new_vertex(state.marked.basepoint()), petals)?;
    Ok(FoldState { marked, image })
}

/// A marked graph with bivalent vertices erased, and the erased edge that
/// contains each original edge.
pub fn erase_bivalent(m: &MarkedGraph) -> (MarkedGraph, Vec<EdgeId>) {
    let g = m.graph();
    let val = g.valences();
    let essential = |v: VertexId| val[v] != 2;
    let at: Vec<Vec<HalfEdge>> = (0..g.vertex_count()).map(|v| g.half_edges_at(v)).collect();
    // Continue through a bivalent vertex entered by `h`.
    let onward = |h: HalfEdge| -> HalfEdge {
        let v = g.head(h);
        *at[v]
            .iter()
            .find(|&&x| x != h ^ 1)
            .expect("bivalent vertices have two half-edges")
    };

    let mut basepoint = m.basepoint();
    let mut petals: Vec<Vec<HalfEdge>> = m.petals().to_vec();
    if !essential(basepoint) {
        let mut lead = vec![at[basepoint][0]];
        while !essential(g.head(*lead.last().unwrap())) {
            let next = onward(*lead.last().unwrap());
            lead.push(next);
        }
        basepoint = g.head(*lead.last().unwrap());
        let back: Vec<HalfEdge> = lead.iter().rev().map(|h| h ^ 1).collect();
        petals = petals
            .iter()
            .map(|p| reduce_path(&[back.clone(), p.clone(), lead.clone()].concat()))
            .collect();
    }

    let kept: Vec<VertexId> = (0..g.vertex_count()).filter(|&v| essential(v)).collect();
    let renumber = |v: VertexId| kept.binary_search(&v).expect("essential vertex");
    let mut chain_of_edge = vec![usize::MAX; g.edge_count()];
    let mut first_of: Vec<Option<HalfEdge>> = vec![None; g.half_edge_count()];
    let mut vertex_of = Vec::new();
    for &x in &kept {
        for &h in &at[x] {
            if chain_of_edge[edge_of(h)] != usize::MAX {
                continue;
            }
            let k = vertex_of.len() / 2;
            let mut last = h;
            chain_of_edge[edge_of(h)] = k;
            while !essential(g.head(last)) {
                last = onward(last);
                chain_of_edge[edge_of(last)] = k;
            }
            first_of[h] = Some(2 * k);
            first_of[last ^ 1] = Some(2 * k + 1);
            vertex_of.push(renumber(x));
            vertex_of.push(renumber(g.head(last)));
        }
    }
    let graph = Graph::new(kept.len(), vertex_of).expect("erasure keeps a valid graph");
    let petals = petals
        .iter()
        .map(|p| reduce_path(&p.iter().filter_map(|&h| first_of[h]).collect::<Vec<_>>()))
        .collect();
    let erased = MarkedGraph::from_parts(graph, renumber(basepoint), petals).expect("erasure keeps the marking");
    (erased, chain_of_edge)
}

/// Erased edges made entirely of edges from `edges`.
fn erased_forest(chain_of_edge: &[EdgeId], edges: &[EdgeId]) -> Forest {
    let chosen: BTreeSet<EdgeId> = edges.iter().copied().collect();
    let chains: BTreeSet<usize> = edges.iter().map(|&e| chain_of_edge[e]).collect();
    Forest::new(chains.into_iter().filter(|&k| {
        chain_of_edge
            .iter()
            .enumerate()
            .all(|(e, &c)| c != k || chosen.contains(&e))
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Direction {
    /// The next point is the current one with `forest` collapsed.
    Collapse,
    /// The current point is the next one with `forest` collapsed.
    Blowup,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KnStep {
    pub direction: Direction,
    /// Edges of the larger of the two graphs.
    pub forest: Forest,
}

/// A path in the spine; consecutive points differ by a forest collapse in
/// the recorded direction.
#[derive(Clone, Debug, Default, Serialize)]
pub struct KnPath {
    pub points: Vec<MarkedGraph>,
    pub steps: Vec<KnStep>,
}

impl KnPath {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn start(&self) -> &MarkedGraph {
        &self.points[0]
    }

    pub fn end(&self) -> &MarkedGraph {
        self.points.last().expect("paths have a point")
    }

    /// The same path traversed backwards.
    pub fn reversed(&self) -> KnPath {
        KnPath {
            points: self.points.iter().rev().cloned().collect(),
            steps: self
                .steps
                .iter()
                .rev()
                .map(|s| KnStep {
                    direction: match s.direction {
                        Direction::Collapse => Direction::Blowup,
                        Direction::Blowup => Direction::Collapse,
                    },
                    forest: s.forest.clone(),
                })
                .collect(),
        }
    }

    fn push(&mut self, direction: Direction, forest: Forest, point: MarkedGraph) {
        self.steps.push(KnStep { direction, forest });
        self.points.push(point);
    }

    /// Drops steps along empty forests where the point carrying the
    /// neighbouring forests can be kept.
    fn compact(&mut self) {
        let mut i = 0;
        while i < self.steps.len() {
            if !self.steps[i].forest.is_empty() {
                i += 1;
                continue;
            }
            let into_blowup = i > 0 && self.steps[i - 1].direction == Direction::Blowup;
            let out_collapse = self
                .steps
                .get(i + 1)
                .is_some_and(|s| s.direction == Direction::Collapse);
            if !into_blowup {
                self.points.remove(i);
                self.steps.remove(i);
            } else if !out_collapse {
                self.points.remove(i + 1);
                self.steps.remove(i);
            } else {
                i += 1;
            }
        }
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph KnPath {\n  compound=true;\n");
        for (i, p) in self.points.iter().enumerate() {
            let _ = writeln!(s, "  subgraph cluster_{i} {{\n  label=\"point {i}\";");
            p.graph().write_dot_body(&mut s, &format!("p{i}_"));
            s.push_str("  }\n");
        }
        for (i, step) in self.steps.iter().enumerate() {
            let label = match step.direction {
                Direction::Collapse => "collapse",
                Direction::Blowup => "blowup",
            };
            let _ = writeln!(
                s,
                "  p{i}_v0 -- p{}_v0 [style=dashed, label=\"{label} {:?}\", ltail=cluster_{i}, lhead=cluster_{}];",
                i + 1,
                step.forest.edges(),
                i + 1
            );
        }
        s.push_str("}\n");
        s
    }
}

/// Result of folding a rose to the standard rose.
#[derive(Clone, Debug, Serialize)]
pub struct FoldRun {
    pub path: KnPath,
    pub moves: Vec<FoldMove>,
    pub initial_edges: usize,
}

/// Folds with the smallest witness at every step.
pub fn fold_to_rose(rho: &Rose) -> Result<FoldRun> {
    fold_with(rho, |_| 0)
}

/// Folds choosing uniformly among all witnesses at every step.
pub fn fold_to_rose_randomized(rho: &Rose, rng: &mut impl Rng) -> Result<FoldRun> {
    fold_with(rho, |k| rng.gen_range(0..k))
}

fn fold_with(rho: &Rose, mut choose: impl FnMut(usize) -> usize) -> Result<FoldRun> {
    let mut state = subdivided_inverse_morphism(rho)?;
    let initial_edges = state.graph().edge_count();
    let mut path = KnPath {
        points: vec![erase_bivalent(state.marked()).0],
        steps: Vec::new(),
    };
    let mut moves = Vec::new();
    loop {
        let witnesses = all_witnesses(&state.morphism());
        if witnesses.is_empty() {
            break;
        }
        let w = witnesses[choose(witnesses.len())];
        let (next, mv) = apply_fold(&state, &w)?;
        match &mv.kn_effect {
            KnEffect::Collapse { edges } => {
                let (erased, chains) = erase_bivalent(state.marked());
                let forest = erased_forest(&chains, edges);
                // The step's forest lives in the current point.
                *path.points.last_mut().expect("nonempty") = erased;
                path.push(Direction::Collapse, forest, erase_bivalent(next.marked()).0);
            }
            KnEffect::BlowupThenCollapse {
                blowup,
                new_edge,
                folded,
                ..
            } => {
                let (erased, chains) = erase_bivalent(blowup);
                path.push(Direction::Blowup, erased_forest(&chains, &[*new_edge]), erased);
                path.push(
                    Direction::Collapse,
                    erased_forest(&chains, folded),
                    erase_bivalent(next.marked()).0,
                );
            }
        }
        if mv.edges_after >= mv.edges_before {
            return Err(Error::PipelineDefect("fold did not reduce the edge count".into()));
        }
        moves.push(mv);
        state = next;
    }
    if state.graph().vertex_count() != 1 {
        return Err(Error::PipelineDefect("folding stopped short of a rose".into()));
    }
    path.compact();
    Ok(FoldRun {
        path,
        moves,
        initial_edges,
    })
}

/// Checks every step: collapsing the forest in the larger graph must give a
/// graph isomorphic to the smaller one with the same translation lengths on
/// all short classes.
pub fn verify_kn_path(p: &KnPath) -> bool {
    if p.points.is_empty() || p.points.len() != p.steps.len() + 1 {
        return false;
    }
    p.steps.iter().enumerate().all(|(i, step)| {
        let (large, small) = match step.direction {
            Direction::Collapse => (&p.points[i], &p.points[i + 1]),
            Direction::Blowup => (&p.points[i + 1], &p.points[i]),
        };
        match large.collapse(&step.forest) {
            Ok(c) => c.equivalent_up_to(small, PATH_CHECK_LENGTH),
            Err(_) => false,
        }
    })
}

/// Whether the endpoint of a path is the standard rose.
pub fn ends_at_standard_rose(p: &KnPath) -> bool {
    p.end()
        .to_rose()
        .is_ok_and(|r| roses_equal(&r, &Rose::standard(r.rank())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn rose(n: usize, imgs: &[&str]) -> Rose {
        Rose::from_images(n, imgs).unwrap()
    }

    fn inner_or_identity(a: &Automorphism) -> bool {
        let r = Rose::new(a.clone()).unwrap();
        roses_equal(&r, &Rose::standard(a.rank()))
            && a.images()
                .iter()
                .enumerate()
                .all(|(i, w)| w.cyclic_reduce() == Word::generator(i + 1))
    }

    #[test]
    fn standard_rose_needs_no_folds() {
        let s = subdivided_inverse_morphism(&Rose::standard(3)).unwrap();
        assert_eq!(s.graph().edge_count(), 3);
        assert_eq!(local_injectivity_witness(&s.morphism()), None);
        let run = fold_to_rose(&Rose::standard(3)).unwrap();
        assert!(run.path.is_empty());
        assert!(run.moves.is_empty());
    }

    #[test]
    fn subdivision_follows_inverse() {
        let s = subdivided_inverse_morphism(&rose(2, &["ab", "b"])).unwrap();
        // psi(a) = aB: petal 1 is split in two.
        assert_eq!(s.graph().edge_count(), 3);
        assert_eq!(s.graph().vertex_count(), 2);
        assert!(s.composite().is_identity());
        assert!(GraphMorphism::new(
            s.graph().clone(),
            Graph::rose(2),
            (0..6).map(|h| s.morphism().image(h)).collect(),
            vec![0, 0]
        )
        .is_ok());
    }

    #[test]
    fn witnesses() {
        // Two petals both mapping onto petal 1.
        let g = Graph::rose(2);
        let m = GraphMorphism::new(g.clone(), g.clone(), vec![Some(0), Some(1), Some(0), Some(1)], vec![0]).unwrap();
        assert_eq!(local_injectivity_witness(&m), Some(Witness::FoldablePair(0, 2)));
        let id = GraphMorphism::new(g.clone(), g, (0..4).map(Some).collect(), vec![0]).unwrap();
        assert_eq!(local_injectivity_witness(&id), None);
    }

    #[test]
    fn fold_figure_configuration() {
        // e1, e2 leave the left vertex of a loop-decorated graph with equal
        // images, as in the fold figure.
        let g = Graph::from_edges(3, &[(0, 1), (0, 2), (0, 0), (1, 1), (2, 2), (1, 2)]).unwrap();
        let image = vec![
            Some(0),
            Some(1),
            Some(0),
            Some(1),
            Some(2),
            Some(3),
            Some(2),
            Some(3),
            Some(2),
            Some(3),
            Some(4),
            Some(5),
        ];
        let m = GraphMorphism::new(g, Graph::rose(3), image, vec![0, 0, 0]).unwrap();
        assert_eq!(local_injectivity_witness(&m), Some(Witness::FoldablePair(0, 2)));
    }

    #[test]
    fn transvection_folds_to_standard() {
        let run = fold_to_rose(&rose(2, &["ab", "b"])).unwrap();
        assert!(verify_kn_path(&run.path));
        assert!(verify_kn_path(&run.path.reversed()));
        assert!(ends_at_standard_rose(&run.path));
        // Frozen from the deterministic run.
        assert_eq!(run.moves.len(), 1);
        assert_eq!(run.moves[0].kind, FoldKind::Fold);
        assert_eq!(run.moves[0].witness, Witness::FoldablePair(3, 4));
        assert_eq!(run.path.len(), 2);
        assert_eq!(run.path.steps[0].direction, Direction::Blowup);
    }

    #[test]
    fn spliced_jump_is_rejected() {
        let run = fold_to_rose(&rose(3, &["abC", "cb", "c"])).unwrap();
        assert!(verify_kn_path(&run.path));
        let mut bad = run.path.clone();
        let far = rose(3, &["ab", "b", "ca"]);
        bad.points.insert(1, far.as_marked_graph());
        bad.steps.insert(
            0,
            KnStep {
                direction: Direction::Collapse,
                forest: Forest::empty(),
            },
        );
        assert!(!verify_kn_path(&bad));
    }

    #[test]
    fn random_products_fold_home() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let rho = crate::sampling::random_rose(&mut rng, 3, 8);
            let mut state = subdivided_inverse_morphism(&rho).unwrap();
            while let Some(w) = local_injectivity_witness(&state.morphism()) {
                let (next, mv) = apply_fold(&state, &w).unwrap();
                assert!(mv.edges_after < mv.edges_before);
                assert!(inner_or_identity(&next.composite()));
                state = next;
            }
            let run = fold_to_rose(&rho).unwrap();
            assert!(run.moves.len() <= run.initial_edges);
            assert!(verify_kn_path(&run.path), "{rho}");
            assert!(ends_at_standard_rose(&run.path));
            assert!(roses_equal(&run.path.start().to_rose().unwrap(), &rho));
            let random = fold_to_rose_randomized(&rho, &mut rng).unwrap();
            assert!(verify_kn_path(&random.path));
            assert!(ends_at_standard_rose(&random.path));
        }
    }

    #[test]
    fn invalid_witnesses() {
        let s = subdivided_inverse_morphism(&rose(2, &["ab", "b"])).unwrap();
        assert!(apply_fold(&s, &Witness::FoldablePair(0, 1)).is_err());
        assert!(apply_fold(&s, &Witness::DegenerateEdge(0)).is_err());
    }
}
