//! Finite posets, their order complexes, mod-2 homology, Quillen retractions
//! and the retraction of the reductive part of the star of a rose onto a
//! point.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::config::Limits;
use crate::error::{Error, Result};
use crate::marked_graphs::Rose;
use crate::whitehead::{
    all_ideal_trees, is_reductive_edge, is_reductive_tree, key_lemma_gamma, max_reductive_edge, nontrivial_ideal_edges,
    GammaKind, IdealEdge, IdealTree, KeyLemmaOutcome, MaxReductive, Subset,
};

/// Largest complex [`OrderComplex`] will build.
pub const MAX_SIMPLICES: usize = 200_000;

type Bits = Vec<u64>;

fn bits(n: usize) -> Bits {
    vec![0; n.div_ceil(64)]
}

fn get(b: &[u64], i: usize) -> bool {
    b[i / 64] >> (i % 64) & 1 == 1
}

fn set(b: &mut [u64], i: usize) {
    b[i / 64] |= 1 << (i % 64);
}

fn is_subset_bits(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

/// A finite partial order. Elements are kept sorted, so ids are canonical.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poset<T> {
    elements: Vec<T>,
    index: BTreeMap<T, usize>,
    /// `up[i]` holds every `j` with `i ≤ j`.
    up: Vec<Bits>,
}

impl<T: Clone + Ord> Poset<T> {
    /// Builds the poset and checks the order axioms.
    pub fn new(elements: impl IntoIterator<Item = T>, leq: impl Fn(&T, &T) -> bool) -> Result<Poset<T>> {
        let mut elements: Vec<T> = elements.into_iter().collect();
        elements.sort();
        let before = elements.len();
        elements.dedup();
        if elements.len() != before {
            return Err(Error::NotAPartialOrder("duplicate elements".into()));
        }
        let n = elements.len();
        let mut up = vec![bits(n); n];
        for i in 0..n {
            for j in 0..n {
                if leq(&elements[i], &elements[j]) {
                    set(&mut up[i], j);
                }
            }
        }
        for i in 0..n {
            if !get(&up[i], i) {
                return Err(Error::NotAPartialOrder(format!("element {i} is not reflexive")));
            }
            for j in i + 1..n {
                if get(&up[i], j) && get(&up[j], i) {
                    return Err(Error::NotAPartialOrder(format!(
                        "elements {i} and {j} violate antisymmetry"
                    )));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if get(&up[i], j) && !is_subset_bits(&up[j], &up[i]) {
                    return Err(Error::NotAPartialOrder(format!("transitivity fails through {i} ≤ {j}")));
                }
            }
        }
        let index = elements.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        Ok(Poset { elements, index, up })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[T] {
        &self.elements
    }

    pub fn index_of(&self, x: &T) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        get(&self.up[i], j)
    }

    pub fn lt(&self, i: usize, j: usize) -> bool {
        i != j && self.leq(i, j)
    }

    /// Pairs `(i, j)` with `i < j` and nothing strictly between.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if self.lt(i, j) && !(0..n).any(|k| self.lt(i, k) && self.lt(k, j)) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// The induced order on a subset of the elements.
    pub fn subposet(&self, keep: impl Fn(&T) -> bool) -> Poset<T> {
        let ids: Vec<usize> = (0..self.len()).filter(|&i| keep(&self.elements[i])).collect();
        let elements: Vec<T> = ids.iter().map(|&i| self.elements[i].clone()).collect();
        let mut up = vec![bits(ids.len()); ids.len()];
        for (a, &i) in ids.iter().enumerate() {
            for (b, &j) in ids.iter().enumerate() {
                if self.leq(i, j) {
                    set(&mut up[a], b);
                }
            }
        }
        let index = elements.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        Poset { elements, index, up }
    }
}

/// A self-map of a poset, by element ids.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PosetMap {
    pub images: Vec<usize>,
}

impl PosetMap {
    pub fn identity(len: usize) -> PosetMap {
        PosetMap {
            images: (0..len).collect(),
        }
    }

    /// `MapLeavesPoset` if some image is not an element.
    pub fn from_fn<T: Clone + Ord>(p: &Poset<T>, f: impl Fn(&T) -> T) -> Result<PosetMap> {
        let images = p
            .elements()
            .iter()
            .map(|x| p.index_of(&f(x)).ok_or(Error::MapLeavesPoset))
            .collect::<Result<_>>()?;
        Ok(PosetMap { images })
    }

    pub fn is_monotone<T: Clone + Ord>(&self, p: &Poset<T>) -> bool {
        (0..p.len()).all(|i| (0..p.len()).all(|j| !p.leq(i, j) || p.leq(self.images[i], self.images[j])))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Direction {
    /// `f(x) ≤ x` for every `x`.
    Decreasing,
    /// `f(x) ≥ x` for every `x`.
    Increasing,
}

/// Checks the hypotheses of Quillen's Poset Lemma and returns the image,
/// onto whose order complex the order complex of `p` deformation retracts.
pub fn quillen_retract<T: Clone + Ord>(p: &Poset<T>, f: &PosetMap, direction: Direction) -> Result<Poset<T>> {
    if f.images.len() != p.len() || f.images.iter().any(|&j| j >= p.len()) {
        return Err(Error::MapLeavesPoset);
    }
    if !f.is_monotone(p) {
        return Err(Error::NotMonotone);
    }
    let ok = (0..p.len()).all(|i| match direction {
        Direction::Decreasing => p.leq(f.images[i], i),
        Direction::Increasing => p.leq(i, f.images[i]),
    });
    if !ok {
        return Err(Error::DirectionViolated);
    }
    let image: BTreeSet<usize> = f.images.iter().copied().collect();
    let ids: BTreeSet<&T> = image.iter().map(|&i| &p.elements()[i]).collect();
    Ok(p.subposet(|x| ids.contains(x)))
}

/// A finite simplicial complex, simplices grouped by dimension and stored as
/// sorted vertex lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderComplex {
    vertex_count: usize,
    simplices: Vec<Vec<Vec<usize>>>,
}

impl OrderComplex {
    /// All chains of the poset.
    pub fn of_poset<T: Clone + Ord>(p: &Poset<T>) -> Result<OrderComplex> {
        let n = p.len();
        let above: Vec<Vec<usize>> = (0..n).map(|i| (0..n).filter(|&j| p.lt(i, j)).collect()).collect();
        let mut simplices: Vec<Vec<Vec<usize>>> = Vec::new();
        let mut total = 0;
        let mut stack: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        while let Some(chain) = stack.pop() {
            total += 1;
            if total > MAX_SIMPLICES {
                return Err(Error::TooLarge(total));
            }
            let top = *chain.last().expect("chains are nonempty");
            for &j in &above[top] {
                let mut next = chain.clone();
                next.push(j);
                stack.push(next);
            }
            let d = chain.len() - 1;
            if simplices.len() <= d {
                simplices.resize(d + 1, Vec::new());
            }
            let mut s = chain;
            s.sort_unstable();
            simplices[d].push(s);
        }
        for level in &mut simplices {
            level.sort();
        }
        Ok(OrderComplex {
            vertex_count: n,
            simplices,
        })
    }

    /// The downward closure of the given simplices.
    pub fn from_facets(facets: &[Vec<usize>]) -> Result<OrderComplex> {
        let mut faces: Vec<BTreeSet<Vec<usize>>> = Vec::new();
        let mut vertices = BTreeSet::new();
        for f in facets {
            let mut f = f.clone();
            f.sort_unstable();
            f.dedup();
            if f.is_empty() {
                continue;
            }
            vertices.extend(f.iter().copied());
            for mask in 1u64..1 << f.len() {
                let s: Vec<usize> = (0..f.len()).filter(|&k| mask >> k & 1 == 1).map(|k| f[k]).collect();
                let d = s.len() - 1;
                if faces.len() <= d {
                    faces.resize(d + 1, BTreeSet::new());
                }
                faces[d].insert(s);
                if faces.iter().map(BTreeSet::len).sum::<usize>() > MAX_SIMPLICES {
                    return Err(Error::TooLarge(MAX_SIMPLICES + 1));
                }
            }
        }
        Ok(OrderComplex {
            vertex_count: vertices.len(),
            simplices: faces.into_iter().map(|s| s.into_iter().collect()).collect(),
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// `-1` for the empty complex.
    pub fn dimension(&self) -> isize {
        self.simplices.len() as isize - 1
    }

    pub fn simplices(&self, dim: usize) -> &[Vec<usize>] {
        self.simplices.get(dim).map_or(&[], Vec::as_slice)
    }

    pub fn simplex_counts(&self) -> Vec<usize> {
        self.simplices.iter().map(Vec::len).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        alternating_sum(&self.simplex_counts())
    }
}

fn alternating_sum(v: &[usize]) -> i64 {
    v.iter()
        .enumerate()
        .map(|(d, &c)| if d % 2 == 0 { c as i64 } else { -(c as i64) })
        .sum()
}

/// Rank over the two-element field of the rows, each a bitset.
fn rank_f2(mut rows: Vec<Bits>) -> usize {
    let mut rank = 0;
    let width = rows.first().map_or(0, |r| r.len() * 64);
    for col in 0..width {
        let Some(p) = (rank..rows.len()).find(|&r| get(&rows[r], col)) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for row in rows.iter_mut().skip(rank + 1) {
            if get(row, col) {
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x ^= y;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Betti numbers over the two-element field, one per dimension.
pub fn homology_f2(c: &OrderComplex) -> Result<Vec<usize>> {
    let counts = c.simplex_counts();
    let total: usize = counts.iter().sum();
    if total > MAX_SIMPLICES {
        return Err(Error::TooLarge(total));
    }
    // ranks[d] = rank of the boundary map from dimension d to d - 1.
    let mut ranks = vec![0; counts.len() + 1];
    for d in 1..counts.len() {
        let lookup: HashMap<&[usize], usize> = c
            .simplices(d - 1)
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_slice(), i))
            .collect();
        let rows = c
            .simplices(d)
            .iter()
            .map(|s| {
                let mut row = bits(counts[d - 1]);
                for k in 0..s.len() {
                    let mut face = s.clone();
                    face.remove(k);
                    set(&mut row, lookup[face.as_slice()]);
                }
                row
            })
            .collect();
        ranks[d] = rank_f2(rows);
    }
    let betti: Vec<usize> = (0..counts.len()).map(|d| counts[d] - ranks[d] - ranks[d + 1]).collect();
    if alternating_sum(&betti) != c.euler_characteristic() {
        return Err(Error::PipelineDefect(
            "Betti numbers disagree with the simplex counts".into(),
        ));
    }
    Ok(betti)
}

/// Drops trailing zero Betti numbers.
pub fn trimmed(betti: &[usize]) -> Vec<usize> {
    let end = betti.iter().rposition(|&b| b != 0).map_or(0, |i| i + 1);
    betti[..end].to_vec()
}

/// Homology of a point: `(1, 0, 0, ..)`.
pub fn is_acyclic(betti: &[usize]) -> bool {
    betti.first() == Some(&1) && betti[1..].iter().all(|&b| b == 0)
}

/// The nonempty ideal trees of the rank of `rho`, ordered by inclusion.
pub fn star_poset(rho: &Rose) -> Poset<IdealTree> {
    let trees = all_ideal_trees(rho.rank()).into_iter().filter(|t| !t.is_empty());
    Poset::new(trees, IdealTree::is_subset).expect("inclusion is a partial order")
}

/// The reductive ideal trees of `rho`, ordered by inclusion.
pub fn reductive_subposet(rho: &Rose, limits: &Limits) -> Result<Poset<IdealTree>> {
    let mut keep = Vec::new();
    for t in all_ideal_trees(rho.rank()) {
        if !t.is_empty() && is_reductive_tree(rho, &t, limits)? {
            keep.push(t);
        }
    }
    Poset::new(keep, IdealTree::is_subset)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    EmptyComplex,
    Contractible,
}

/// Why a retraction step is a legitimate poset map.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "tag")]
pub enum Justification {
    DropNonReductive,
    AddGamma {
        alpha: IdealEdge,
        gamma: IdealEdge,
        kind: GammaKind,
        /// False when no crossing edge met the side condition and `alpha`
        /// was chosen because `gamma` is compatible with everything that
        /// `alpha` is compatible with.
        side_condition: bool,
    },
    DropAlpha {
        alpha: IdealEdge,
    },
    ConeToMu {
        mu: IdealEdge,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct RetractionStep {
    pub justification: Justification,
    pub direction: Direction,
    pub before: Vec<IdealTree>,
    /// Image of each element of `before`, as an index into `after`.
    pub map: Vec<usize>,
    pub after: Vec<IdealTree>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RetractionTrace {
    pub rose: Rose,
    pub verdict: Verdict,
    pub mu: Option<IdealEdge>,
    pub m_side: Option<Vec<usize>>,
    pub m: Option<usize>,
    pub steps: Vec<RetractionStep>,
}

impl RetractionTrace {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("trace serializes")
    }
}

/// Applies `f` as a Quillen retraction and records it.
fn retract_step(
    p: &Poset<IdealTree>,
    f: impl Fn(&IdealTree) -> IdealTree,
    direction: Direction,
    justification: Justification,
    steps: &mut Vec<RetractionStep>,
) -> Result<Poset<IdealTree>> {
    let defect = |e: Error| Error::PipelineDefect(format!("{justification:?}: {e}"));
    let map = PosetMap::from_fn(p, f).map_err(defect)?;
    let image = quillen_retract(p, &map, direction).map_err(defect)?;
    let map_into_image = map
        .images
        .iter()
        .map(|&j| image.index_of(&p.elements()[j]).expect("image contains every value"))
        .collect();
    steps.push(RetractionStep {
        justification: justification.clone(),
        direction,
        before: p.elements().to_vec(),
        map: map_into_image,
        after: image.elements().to_vec(),
    });
    Ok(image)
}

fn edges_present(p: &Poset<IdealTree>) -> BTreeSet<IdealEdge> {
    p.elements().iter().flat_map(|t| t.edges().iter().copied()).collect()
}

/// Whether every `β` in `present` compatible with `alpha`, whose side `B`
/// containing `m` also contains `A`, satisfies `B ⊇ M`.
fn alpha_condition(alpha: &IdealEdge, present: &BTreeSet<IdealEdge>, big_m: Subset, m: usize) -> bool {
    let a_side = alpha.side_containing(m);
    present.iter().filter(|b| *b != alpha && b.compatible(alpha)).all(|b| {
        let side = b.side_containing(m);
        side & a_side != a_side || side & big_m == big_m
    })
}

fn gamma_for(rho: &Rose, max: &MaxReductive, alpha: &IdealEdge, limits: &Limits) -> Result<KeyLemmaOutcome> {
    key_lemma_gamma(rho, max, &max.chosen, alpha, limits).map_err(|e| match e {
        Error::HypothesesViolated(s) => Error::PipelineDefect(s),
        e => e,
    })
}

/// The smallest crossing edge meeting the side condition; failing that, the
/// smallest one whose `γ` is compatible with every present edge compatible
/// with it.
fn select_alpha(
    rho: &Rose,
    max: &MaxReductive,
    crossing: &[IdealEdge],
    present: &BTreeSet<IdealEdge>,
    limits: &Limits,
) -> Result<(IdealEdge, KeyLemmaOutcome, bool)> {
    let (big_m, m) = (max.m_side(), max.m());
    if let Some(alpha) = crossing.iter().find(|a| alpha_condition(a, present, big_m, m)) {
        return Ok((*alpha, gamma_for(rho, max, alpha, limits)?, true));
    }
    for alpha in crossing {
        let outcome = gamma_for(rho, max, alpha, limits)?;
        if present
            .iter()
            .filter(|b| b.compatible(alpha))
            .all(|b| b.compatible(&outcome.gamma))
        {
            return Ok((*alpha, outcome, false));
        }
    }
    Err(Error::PipelineDefect(format!(
        "no edge crossing {} admits an elimination among {} candidates",
        max.mu(),
        crossing.len()
    )))
}

/// Retracts the poset of reductive ideal trees of `rho` onto a point, one
/// checked Quillen step at a time.
///
/// Steps: drop non-reductive edges; pick a maximal reductive pair `(M, m)`
/// for `μ`; while some edge crosses `μ`, pick the smallest crossing `α`
/// meeting the side condition (see [`Justification::AddGamma`] for the
/// fallback), add the Key Lemma edge `γ` to every tree
/// containing `α`, then drop `α`; finally cone onto `{μ}`. Any failed
/// hypothesis is a `PipelineDefect`.
pub fn contractibility_pipeline(rho: &Rose, limits: &Limits) -> Result<(Verdict, RetractionTrace)> {
    let p = reductive_subposet(rho, limits)?;
    let mut trace = RetractionTrace {
        rose: rho.clone(),
        verdict: Verdict::EmptyComplex,
        mu: None,
        m_side: None,
        m: None,
        steps: Vec::new(),
    };
    if p.is_empty() {
        return Ok((Verdict::EmptyComplex, trace));
    }
    let mut reductive = BTreeSet::new();
    for e in nontrivial_ideal_edges(rho.rank()) {
        if is_reductive_edge(rho, &e, limits)? {
            reductive.insert(e);
        }
    }
    for t in p.elements() {
        if !t.edges().iter().any(|e| reductive.contains(e)) {
            return Err(Error::PipelineDefect(format!(
                "reductive tree {:?} has no reductive edge",
                t.edges()
            )));
        }
    }
    let mut q = retract_step(
        &p,
        |t| IdealTree::new(t.edges().iter().filter(|e| reductive.contains(e)).copied()).expect("subtree"),
        Direction::Decreasing,
        Justification::DropNonReductive,
        &mut trace.steps,
    )?;
    let strictly: Vec<&IdealTree> = p
        .elements()
        .iter()
        .filter(|t| t.edges().iter().all(|e| reductive.contains(e)))
        .collect();
    if q.elements().iter().collect::<Vec<_>>() != strictly {
        return Err(Error::PipelineDefect(
            "image of P is not the strictly reductive subposet".into(),
        ));
    }

    let max = max_reductive_edge(rho, limits)?
        .ok_or_else(|| Error::PipelineDefect("reductive trees exist but no reductive pair".into()))?;
    let (mu, big_m, m) = (max.mu(), max.m_side(), max.m());
    trace.mu = Some(mu);
    trace.m_side = Some(crate::whitehead::members(big_m));
    trace.m = Some(m);

    for round in 0.. {
        let present = edges_present(&q);
        let crossing: Vec<IdealEdge> = present.iter().filter(|e| e.crosses(&mu)).copied().collect();
        if crossing.is_empty() {
            break;
        }
        if round >= limits.pipeline_iterations {
            return Err(Error::PipelineDefect(format!(
                "crossing elimination exceeded {} rounds",
                limits.pipeline_iterations
            )));
        }
        let (alpha, outcome, side_condition) = select_alpha(rho, &max, &crossing, &present, limits)?;
        let gamma = outcome.gamma;
        q = retract_step(
            &q,
            |t| if t.contains(&alpha) { t.with(gamma) } else { t.clone() },
            Direction::Increasing,
            Justification::AddGamma {
                alpha,
                gamma,
                kind: outcome.kind,
                side_condition,
            },
            &mut trace.steps,
        )?;
        q = retract_step(
            &q,
            |t| t.without(&alpha),
            Direction::Decreasing,
            Justification::DropAlpha { alpha },
            &mut trace.steps,
        )?;
        if q.elements().iter().any(|t| t.contains(&alpha)) {
            return Err(Error::PipelineDefect(format!("{alpha} survived its elimination")));
        }
    }
    if edges_present(&q).iter().any(|e| e.crosses(&mu)) {
        return Err(Error::PipelineDefect(format!("an edge still crosses {mu}")));
    }

    let cone = Justification::ConeToMu { mu };
    q = retract_step(
        &q,
        |t| t.with(mu),
        Direction::Increasing,
        cone.clone(),
        &mut trace.steps,
    )?;
    let point = IdealTree::new([mu])?;
    q = retract_step(&q, |_| point.clone(), Direction::Decreasing, cone, &mut trace.steps)?;
    if q.len() != 1 {
        return Err(Error::PipelineDefect("cone step did not reach a point".into()));
    }
    trace.verdict = Verdict::Contractible;
    Ok((Verdict::Contractible, trace))
}
