//! Marked graphs, marked roses, translation lengths and the lexicographic
//! norm on roses.
//!
//! A marking is stored as one closed edge path per generator of `F_n`, based
//! at a chosen vertex. Roses are kept as automorphisms: petal `i` of the
//! standard rose maps to the loop spelling `phi(x_i)`, so the translation
//! length of a class `w` is the cyclic length of `phi(w)`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::config::Limits;
use crate::error::{Error, Result};
use crate::free_words::{
    classes_of_length, cyclic_length, enumerate_classes, Automorphism, ConjugacyClass, Letter, Word,
};
use crate::graphs::{edge_of, EdgeId, Forest, Graph, GraphJson, HalfEdge, VertexId};

/// Free reduction of an edge path.
pub fn reduce_path(path: &[HalfEdge]) -> Vec<HalfEdge> {
    let mut out: Vec<HalfEdge> = Vec::with_capacity(path.len());
    for &h in path {
        if out.last() == Some(&(h ^ 1)) {
            out.pop();
        } else {
            out.push(h);
        }
    }
    out
}

/// Cyclic reduction of a freely reduced closed path.
pub fn cyclic_reduce_path(path: &[HalfEdge]) -> Vec<HalfEdge> {
    let (mut i, mut j) = (0, path.len());
    while j >= i + 2 && path[i] == path[j - 1] ^ 1 {
        i += 1;
        j -= 1;
    }
    path[i..j].to_vec()
}

fn reverse_path(path: &[HalfEdge]) -> Vec<HalfEdge> {
    path.iter().rev().map(|h| h ^ 1).collect()
}

/// A graph with a marking by the standard rose.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkedGraph {
    graph: Graph,
    basepoint: VertexId,
    petals: Vec<Vec<HalfEdge>>,
}

impl MarkedGraph {
    /// Checks that the graph is a connected core graph of rank `petals.len()`,
    /// that each petal is a closed path at the basepoint, and that the
    /// marking is a homotopy equivalence.
    pub fn new(graph: Graph, basepoint: VertexId, petals: Vec<Vec<HalfEdge>>) -> Result<MarkedGraph> {
        let m = MarkedGraph::from_parts(graph, basepoint, petals)?;
        if !m.graph.is_core() {
            return Err(Error::MalformedMarking("graph is not a core graph".into()));
        }
        m.to_rose()?;
        Ok(m)
    }

    /// Shape checks only; the homotopy-equivalence and core checks are
    /// skipped.
    pub(crate) fn from_parts(graph: Graph, basepoint: VertexId, petals: Vec<Vec<HalfEdge>>) -> Result<MarkedGraph> {
        let n = petals.len();
        if n < 2 {
            return Err(Error::RankTooSmall(n));
        }
        if basepoint >= graph.vertex_count() {
            return Err(Error::MalformedMarking(format!("basepoint {basepoint} out of range")));
        }
        if graph.rank()? != n {
            return Err(Error::MalformedMarking(format!(
                "graph has rank {}, marking has {n} petals",
                graph.rank()?
            )));
        }
        let petals: Vec<Vec<HalfEdge>> = petals.iter().map(|p| reduce_path(p)).collect();
        for (i, p) in petals.iter().enumerate() {
            let mut at = basepoint;
            for &h in p {
                if h >= graph.half_edge_count() || graph.tail(h) != at {
                    return Err(Error::MalformedMarking(format!("petal {} is not an edge path", i + 1)));
                }
                at = graph.head(h);
            }
            if at != basepoint {
                return Err(Error::MalformedMarking(format!("petal {} is not closed", i + 1)));
            }
        }
        Ok(MarkedGraph {
            graph,
            basepoint,
            petals,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn basepoint(&self) -> VertexId {
        self.basepoint
    }

    pub fn petals(&self) -> &[Vec<HalfEdge>] {
        &self.petals
    }

    pub fn rank(&self) -> usize {
        self.petals.len()
    }

    /// Image of a word under the marking, freely reduced.
    pub fn path_of(&self, letters: &[Letter]) -> Vec<HalfEdge> {
        let mut raw = Vec::new();
        for &l in letters {
            let p = &self.petals[l.index()];
            if l.is_inverse() {
                raw.extend(reverse_path(p));
            } else {
                raw.extend_from_slice(p);
            }
        }
        reduce_path(&raw)
    }

    /// The cyclically reduced loop freely homotopic to the image of `w`.
    pub fn tight_loop(&self, w: &ConjugacyClass) -> Vec<HalfEdge> {
        cyclic_reduce_path(&self.path_of(w.letters()))
    }

    pub fn translation_length(&self, w: &ConjugacyClass) -> usize {
        self.tight_loop(w).len()
    }

    /// Pushes the marking through a forest collapse.
    pub fn collapse(&self, forest: &Forest) -> Result<MarkedGraph> {
        let c = self.graph.collapse_forest(forest)?;
        let petals = self
            .petals
            .iter()
            .map(|p| reduce_path(&p.iter().filter_map(|&h| c.map_half_edge(h)).collect::<Vec<_>>()))
            .collect();
        Ok(MarkedGraph {
            graph: c.quotient,
            basepoint: c.vertex_image[self.basepoint],
            petals,
        })
    }

    /// The rose obtained by collapsing the first maximal tree.
    pub fn to_rose(&self) -> Result<Rose> {
        let tree = self
            .graph
            .maximal_trees()?
            .into_iter()
            .next()
            .expect("connected graphs have a maximal tree");
        let r = self.collapse(&tree)?;
        // In a rose the half-edge ids are the letter codes.
        let images = r
            .petals
            .iter()
            .map(|p| Word::new(p.iter().map(|&h| Letter::from_code(h))))
            .collect();
        Rose::new(Automorphism::from_images(self.rank(), images)?)
    }

    /// Number of traversals of `e`, in either direction, per class.
    pub fn edge_crossings(&self, e: EdgeId) -> Result<LazyVector> {
        if e >= self.graph.edge_count() {
            return Err(Error::NoSuchEdge(e));
        }
        let m = self.clone();
        Ok(LazyVector::raw(self.rank(), move |w| {
            let path = cyclic_reduce_path(&m.path_of(w));
            path.iter().filter(|&&h| edge_of(h) == e).count() as i64
        }))
    }

    /// Same graph up to isomorphism and same translation lengths on every
    /// class of length at most `max_len`.
    pub fn equivalent_up_to(&self, other: &MarkedGraph, max_len: usize) -> bool {
        self.rank() == other.rank()
            && self.graph.is_isomorphic(&other.graph)
            && enumerate_classes(self.rank(), Some(max_len))
                .all(|w| self.translation_length(&w) == other.translation_length(&w))
    }

    pub fn to_json(&self) -> MarkedGraphJson {
        MarkedGraphJson {
            graph: self.graph.to_json(),
            basepoint: self.basepoint,
            petals: self.petals.clone(),
        }
    }

    pub fn from_json(json: &MarkedGraphJson) -> Result<MarkedGraph> {
        let (graph, relabel) = Graph::from_json_relabel(&json.graph)?;
        let vertex = json
            .graph
            .vertex_of
            .values()
            .copied()
            .collect::<std::collections::BTreeSet<_>>()
            .iter()
            .position(|&v| v == json.basepoint)
            .ok_or_else(|| Error::MalformedMarking("basepoint is not a vertex".into()))?;
        let petals = json
            .petals
            .iter()
            .map(|p| {
                p.iter()
                    .map(|h| {
                        relabel
                            .get(h)
                            .copied()
                            .ok_or_else(|| Error::MalformedMarking(format!("unknown half-edge {h}")))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        MarkedGraph::new(graph, vertex, petals)
    }
}

impl Serialize for MarkedGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

/// JSON form: the graph schema plus `"basepoint"` and `"petals"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkedGraphJson {
    #[serde(flatten)]
    pub graph: GraphJson,
    pub basepoint: usize,
    pub petals: Vec<Vec<usize>>,
}

/// A marked rose, given by the automorphism `phi` sending each generator to
/// the loop its petal spells; the inverse is kept alongside.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rose {
    phi: Automorphism,
    psi: Automorphism,
}

impl Rose {
    pub fn new(phi: Automorphism) -> Result<Rose> {
        if phi.rank() < 2 {
            return Err(Error::RankTooSmall(phi.rank()));
        }
        let psi = phi.try_inverse()?;
        Ok(Rose { phi, psi })
    }

    /// The standard rose.
    pub fn standard(n: usize) -> Rose {
        Rose {
            phi: Automorphism::identity(n),
            psi: Automorphism::identity(n),
        }
    }

    pub fn from_images(n: usize, images: &[&str]) -> Result<Rose> {
        let words = images.iter().map(|s| Word::parse(s, n)).collect::<Result<Vec<_>>>()?;
        Rose::new(Automorphism::from_images(n, words)?)
    }

    pub fn rank(&self) -> usize {
        self.phi.rank()
    }

    pub fn phi(&self) -> &Automorphism {
        &self.phi
    }

    pub fn psi(&self) -> &Automorphism {
        &self.psi
    }

    /// `theta ∘ phi`, i.e. the same graph with petals relabelled or twisted
    /// by `theta`.
    pub fn post_compose(&self, theta: &Automorphism) -> Result<Rose> {
        Rose::new(theta.compose(&self.phi))
    }

    /// Rose whose marking is twisted by conjugation by `u`; the same point of
    /// the spine.
    pub fn inner_twist(&self, u: &Word) -> Rose {
        let c = Automorphism::inner(self.rank(), u);
        Rose {
            phi: c.compose(&self.phi),
            psi: self.psi.compose(&Automorphism::inner(self.rank(), &u.inverse())),
        }
    }

    pub fn is_standard(&self) -> bool {
        self.phi.is_identity()
    }

    pub fn translation_length(&self, w: &ConjugacyClass) -> usize {
        self.length_of(w.letters())
    }

    /// Cyclic length of the image of an arbitrary letter sequence.
    pub fn length_of(&self, letters: &[Letter]) -> usize {
        cyclic_length(self.phi.apply_letters(letters).letters())
    }

    pub fn as_marked_graph(&self) -> MarkedGraph {
        MarkedGraph {
            graph: Graph::rose(self.rank()),
            basepoint: 0,
            petals: self
                .phi
                .images()
                .iter()
                .map(|w| w.letters().iter().map(|l| l.code()).collect())
                .collect(),
        }
    }

    /// The norm, as a lazily evaluated vector over the ordered classes.
    pub fn norm(&self) -> LazyVector {
        let r = self.clone();
        LazyVector::with_provenance(
            self.rank(),
            move |w| r.length_of(w) as i64,
            Provenance::RoseNorm(self.clone()),
        )
    }

    /// Translation lengths on the first `n + n²` classes, up to length `max_len`.
    pub fn norm_prefix(&self, max_len: usize) -> Vec<usize> {
        enumerate_classes(self.rank(), Some(max_len))
            .map(|w| self.translation_length(&w))
            .collect()
    }

    pub fn to_json(&self) -> RoseJson {
        RoseJson {
            n: self.rank(),
            phi: self.phi.images().iter().map(|w| w.to_string()).collect(),
        }
    }

    pub fn from_json(json: &RoseJson) -> Result<Rose> {
        let images: Vec<&str> = json.phi.iter().map(String::as_str).collect();
        Rose::from_images(json.n, &images)
    }

    pub fn parse_json(text: &str) -> Result<Rose> {
        let json: RoseJson = serde_json::from_str(text).map_err(|e| Error::Parse {
            position: e.column(),
            message: e.to_string(),
        })?;
        Rose::from_json(&json)
    }
}

impl fmt::Display for Rose {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let images: Vec<String> = self.phi.images().iter().map(|w| w.to_string()).collect();
        write!(f, "[{}]", images.join(", "))
    }
}

impl Serialize for Rose {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

/// JSON form `{"n":2,"phi":["ab","b"]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoseJson {
    pub n: usize,
    pub phi: Vec<String>,
}

/// Translation lengths in `rho` of the classes of length at most two in the
/// basis carried by the petals of `basis`.
pub fn fingerprint(rho: &Rose, basis: &Rose) -> Vec<usize> {
    let n = rho.rank();
    let theta = rho.phi.compose(&basis.psi);
    enumerate_classes(n, Some(2))
        .map(|w| cyclic_length(theta.apply_letters(w.letters()).letters()))
        .collect()
}

/// Whether the two roses are the same vertex of the spine.
pub fn roses_equal(a: &Rose, b: &Rose) -> bool {
    a.rank() == b.rank()
        && fingerprint(b, a)
            .iter()
            .zip(enumerate_classes(a.rank(), Some(2)))
            .all(|(&l, w)| l == w.len())
}

/// Lexicographic comparison of norms. Equality is decided exactly; otherwise
/// classes are streamed in order until a coordinate differs.
pub fn compare_norm(a: &Rose, b: &Rose, limits: &Limits) -> Result<Ordering> {
    if roses_equal(a, b) {
        return Ok(Ordering::Equal);
    }
    for len in 1..=limits.lmax {
        for w in classes_of_length(a.rank(), len).iter() {
            match a.translation_length(w).cmp(&b.translation_length(w)) {
                Ordering::Equal => {}
                o => return Ok(o),
            }
        }
    }
    Err(Error::UndeterminedComparison(limits.lmax))
}

/// The marked rose obtained by collapsing a forest of a marked graph.
pub fn collapse_marked(m: &MarkedGraph, forest: &Forest) -> Result<MarkedGraph> {
    m.collapse(forest)
}

/// Which exact-equality shortcut applies to a [`LazyVector`].
#[derive(Clone, Debug)]
pub enum Provenance {
    Raw,
    RoseNorm(Rose),
    /// `‖minuend‖ − ‖subtrahend‖`.
    RoseNormDifference {
        minuend: Rose,
        subtrahend: Rose,
    },
}

type Coordinate = dyn Fn(&[Letter]) -> i64 + Send + Sync;

/// An integer vector indexed by the ordered classes, evaluated on demand.
/// Coordinates are memoized per class length; clones share the memo.
#[derive(Clone)]
pub struct LazyVector {
    rank: usize,
    coordinate: Arc<Coordinate>,
    provenance: Provenance,
    memo: Arc<Mutex<BTreeMap<usize, Arc<Vec<i64>>>>>,
}

impl fmt::Debug for LazyVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LazyVector")
            .field("rank", &self.rank)
            .field("provenance", &self.provenance)
            .field("prefix", &self.prefix(2))
            .finish()
    }
}

impl LazyVector {
    pub fn raw(rank: usize, f: impl Fn(&[Letter]) -> i64 + Send + Sync + 'static) -> LazyVector {
        LazyVector::with_provenance(rank, f, Provenance::Raw)
    }

    fn with_provenance(
        rank: usize,
        f: impl Fn(&[Letter]) -> i64 + Send + Sync + 'static,
        provenance: Provenance,
    ) -> LazyVector {
        LazyVector {
            rank,
            coordinate: Arc::new(f),
            provenance,
            memo: Arc::default(),
        }
    }

    pub fn zero(rank: usize) -> LazyVector {
        LazyVector::raw(rank, |_| 0)
    }

    /// `‖a‖ − ‖b‖`, with exact equality available.
    pub fn rose_norm_difference(a: &Rose, b: &Rose) -> LazyVector {
        let (x, y) = (a.clone(), b.clone());
        LazyVector::with_provenance(
            a.rank(),
            move |w| x.length_of(w) as i64 - y.length_of(w) as i64,
            Provenance::RoseNormDifference {
                minuend: a.clone(),
                subtrahend: b.clone(),
            },
        )
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn coordinate(&self, w: &ConjugacyClass) -> i64 {
        (self.coordinate)(w.letters())
    }

    /// Coordinates of the classes of length exactly `len`, in order.
    pub fn level(&self, len: usize) -> Arc<Vec<i64>> {
        if let Some(v) = self.memo.lock().unwrap().get(&len) {
            return Arc::clone(v);
        }
        let v: Arc<Vec<i64>> = Arc::new(
            classes_of_length(self.rank, len)
                .iter()
                .map(|w| (self.coordinate)(w.letters()))
                .collect(),
        );
        self.memo.lock().unwrap().entry(len).or_insert(v).clone()
    }

    /// Coordinates on every class of length at most `max_len`.
    pub fn prefix(&self, max_len: usize) -> Vec<i64> {
        (1..=max_len).flat_map(|l| self.level(l).to_vec()).collect()
    }

    pub fn add(&self, other: &LazyVector) -> LazyVector {
        let (f, g) = (Arc::clone(&self.coordinate), Arc::clone(&other.coordinate));
        LazyVector::raw(self.rank, move |w| f(w) + g(w))
    }

    pub fn sub(&self, other: &LazyVector) -> LazyVector {
        let (f, g) = (Arc::clone(&self.coordinate), Arc::clone(&other.coordinate));
        LazyVector::raw(self.rank, move |w| f(w) - g(w))
    }

    pub fn scale(&self, k: i64) -> LazyVector {
        let f = Arc::clone(&self.coordinate);
        LazyVector::raw(self.rank, move |w| k * f(w))
    }

    /// Coordinate-wise equality on classes of length at most `max_len`.
    pub fn agrees_up_to(&self, other: &LazyVector, max_len: usize) -> bool {
        (1..=max_len).all(|l| self.level(l) == other.level(l))
    }

    /// Sign in the lexicographic order.
    pub fn sign(&self, limits: &Limits) -> Result<Ordering> {
        match &self.provenance {
            Provenance::RoseNorm(_) => Ok(Ordering::Greater),
            Provenance::RoseNormDifference { minuend, subtrahend } => compare_norm(minuend, subtrahend, limits),
            Provenance::Raw => self.stream_sign(limits),
        }
    }

    fn stream_sign(&self, limits: &Limits) -> Result<Ordering> {
        for l in 1..=limits.lmax {
            if let Some(&x) = self.level(l).iter().find(|&&x| x != 0) {
                return Ok(x.cmp(&0));
            }
        }
        Err(Error::UndeterminedComparison(limits.lmax))
    }

    /// Lexicographic comparison. Equality is exact for two rose norms and for
    /// two rose-norm differences with equal minuends; otherwise an exhausted
    /// stream is reported as undetermined.
    pub fn compare(&self, other: &LazyVector, limits: &Limits) -> Result<Ordering> {
        match (&self.provenance, &other.provenance) {
            (Provenance::RoseNorm(a), Provenance::RoseNorm(b)) => compare_norm(a, b, limits),
            (
                Provenance::RoseNormDifference {
                    minuend: a,
                    subtrahend: x,
                },
                Provenance::RoseNormDifference {
                    minuend: b,
                    subtrahend: y,
                },
            ) if roses_equal(a, b) => compare_norm(y, x, limits),
            _ => self.sub(other).stream_sign(limits),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rose(n: usize, imgs: &[&str]) -> Rose {
        Rose::from_images(n, imgs).unwrap()
    }

    fn class(s: &str, n: usize) -> ConjugacyClass {
        ConjugacyClass::parse(s, n).unwrap()
    }

    #[test]
    fn tight_loops() {
        let r0 = Rose::standard(2).as_marked_graph();
        assert_eq!(r0.tight_loop(&class("a", 2)), vec![0]);
        let m = rose(2, &["ab", "b"]).as_marked_graph();
        assert_eq!(m.tight_loop(&class("a", 2)).len(), 2);
        let w = class("abAbb", 2);
        let inv = ConjugacyClass::parse(&w.rep().inverse().to_string(), 2).unwrap();
        assert_eq!(m.translation_length(&w), m.translation_length(&inv));
    }

    #[test]
    fn translation_lengths_by_hand() {
        let r = rose(2, &["ab", "b"]);
        assert_eq!(r.translation_length(&class("a", 2)), 2);
        assert_eq!(r.translation_length(&class("b", 2)), 1);
        // aB maps to a: length 1; ab maps to abb: length 3.
        assert_eq!(r.translation_length(&class("aB", 2)), 1);
        assert_eq!(r.translation_length(&class("ab", 2)), 3);
        for w in enumerate_classes(2, Some(5)) {
            assert_eq!(Rose::standard(2).translation_length(&w), w.len());
        }
    }

    #[test]
    fn norm_coordinates() {
        let n0 = Rose::standard(3).norm();
        assert!(n0
            .prefix(3)
            .iter()
            .zip(enumerate_classes(3, Some(3)))
            .all(|(&x, w)| x == w.len() as i64));
        let n = rose(2, &["ab", "b"]).norm();
        assert_eq!(&n.prefix(1), &[2, 1]);
        let twisted = rose(2, &["ab", "b"]).inner_twist(&Word::parse("aab", 2).unwrap());
        assert!(twisted.norm().agrees_up_to(&n, 6));
    }

    #[test]
    fn fingerprints() {
        let r0 = Rose::standard(2);
        let lens: Vec<usize> = enumerate_classes(2, Some(2)).map(|w| w.len()).collect();
        assert_eq!(fingerprint(&r0, &r0), lens);
        let r = rose(3, &["abC", "cb", "c"]);
        assert_eq!(
            fingerprint(&r, &r),
            enumerate_classes(3, Some(2)).map(|w| w.len()).collect::<Vec<_>>()
        );
        let order: Vec<String> = enumerate_classes(2, Some(2)).map(|w| w.to_string()).collect();
        assert_eq!(order, ["a", "b", "aa", "ab", "aB", "bb"]);
        // Images abab, abb, a, bb.
        assert_eq!(fingerprint(&rose(2, &["ab", "b"]), &r0), vec![2, 1, 4, 3, 1, 2]);
    }

    #[test]
    fn equality_of_roses() {
        let r = rose(3, &["abC", "cb", "c"]);
        assert!(roses_equal(&r, &r.inner_twist(&Word::parse("bcA", 3).unwrap())));
        let perm = Automorphism::signed_permutation(&[2, 0, 1], &[true, false, true]);
        assert!(roses_equal(&r, &r.post_compose(&perm).unwrap()));
        assert!(!roses_equal(&Rose::standard(2), &rose(2, &["ab", "b"])));
    }

    #[test]
    fn norm_comparison() {
        let limits = Limits::default();
        let r0 = Rose::standard(2);
        let r = rose(2, &["ab", "b"]);
        assert_eq!(compare_norm(&r0, &r, &limits), Ok(Ordering::Less));
        assert_eq!(compare_norm(&r, &r0, &limits), Ok(Ordering::Greater));
        assert_eq!(
            compare_norm(&r, &r.inner_twist(&Word::generator(1)), &limits),
            Ok(Ordering::Equal)
        );
        let d = LazyVector::rose_norm_difference(&r, &r0);
        assert_eq!(d.sign(&limits), Ok(Ordering::Greater));
        assert_eq!(d.prefix(1), vec![1, 0]);
    }

    #[test]
    fn raw_vectors_report_undetermined() {
        let z = LazyVector::zero(2);
        let limits = Limits::default().with_lmax(3);
        assert_eq!(z.sign(&limits), Err(Error::UndeterminedComparison(3)));
    }

    #[test]
    fn theta_blowup_collapses() {
        // Theta graph: edge 0 joins the two vertices, petals go through it.
        let theta = Graph::from_edges(2, &[(0, 1), (0, 1), (0, 1)]).unwrap();
        let m = MarkedGraph::new(theta, 0, vec![vec![2, 1], vec![4, 1]]).unwrap();
        assert_eq!(m.translation_length(&class("a", 2)), 2);
        let r = m.collapse(&Forest::new([0])).unwrap().to_rose().unwrap();
        assert!(roses_equal(&r, &Rose::standard(2)));
        let other = m.collapse(&Forest::new([1])).unwrap().to_rose().unwrap();
        // a = e1 e0^-1 loses e1.
        assert_eq!(other.translation_length(&class("a", 2)), 1);
        assert_eq!(other.translation_length(&class("b", 2)), 2);
        // Collapse formula: the new norm adds crossings of the expanded edge
        // and drops those of the collapsed one.
        let (alpha, e) = (m.edge_crossings(0).unwrap(), m.edge_crossings(1).unwrap());
        let predicted = Rose::standard(2).norm().add(&alpha).sub(&e);
        assert!(predicted.agrees_up_to(&other.norm(), 4));
    }

    #[test]
    fn rejects_bad_markings() {
        let theta = Graph::from_edges(2, &[(0, 1), (0, 1), (0, 1)]).unwrap();
        assert!(MarkedGraph::new(theta.clone(), 0, vec![vec![2, 1], vec![2, 1]]).is_err());
        assert!(MarkedGraph::new(theta, 0, vec![vec![2], vec![4, 1]]).is_err());
        assert!(Rose::from_images(2, &["aa", "b"]).is_err());
    }

    #[test]
    fn json_round_trips() {
        let r = Rose::parse_json(r#"{"n":2,"phi":["ab","b"]}"#).unwrap();
        assert_eq!(r, rose(2, &["ab", "b"]));
        let m = r.as_marked_graph();
        let back = MarkedGraph::from_json(&m.to_json()).unwrap();
        assert_eq!(back, m);
        assert!(Rose::parse_json("{").is_err());
    }
}
