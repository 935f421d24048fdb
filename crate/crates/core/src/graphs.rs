//! Finite graphs in half-edge form.
//!
//! Edge `k` owns half-edges `2k` and `2k + 1`; the involution is `h ^ 1`.
//! A half-edge `h` also names the oriented edge that departs
//! `vertex_of(h)` and arrives at `vertex_of(h ^ 1)`, so edge paths are plain
//! half-edge sequences.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type HalfEdge = usize;
pub type EdgeId = usize;
pub type VertexId = usize;

#[inline]
pub fn reverse(h: HalfEdge) -> HalfEdge {
    h ^ 1
}

#[inline]
pub fn edge_of(h: HalfEdge) -> EdgeId {
    h >> 1
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Graph {
    vertex_of: Vec<VertexId>,
    vertex_count: usize,
}

impl Graph {
    /// `vertex_of[h]` is the vertex at half-edge `h`; the length must be even
    /// and every vertex below `vertex_count` must carry a half-edge.
    pub fn new(vertex_count: usize, vertex_of: Vec<VertexId>) -> Result<Graph> {
        if !vertex_of.len().is_multiple_of(2) {
            return Err(Error::MalformedGraph("odd number of half-edges".into()));
        }
        let mut seen = vec![false; vertex_count];
        for &v in &vertex_of {
            if v >= vertex_count {
                return Err(Error::MalformedGraph(format!("vertex {v} out of range")));
            }
            seen[v] = true;
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(Error::MalformedGraph(format!("vertex {v} has no half-edges")));
        }
        Ok(Graph {
            vertex_of,
            vertex_count,
        })
    }

    /// Edge `k` runs from `edges[k].0` to `edges[k].1`.
    pub fn from_edges(vertex_count: usize, edges: &[(VertexId, VertexId)]) -> Result<Graph> {
        Graph::new(vertex_count, edges.iter().flat_map(|&(u, v)| [u, v]).collect())
    }

    /// One vertex, `n` loops.
    pub fn rose(n: usize) -> Graph {
        Graph {
            vertex_of: vec![0; 2 * n],
            vertex_count: 1,
        }
    }

    /// Two vertices joined by three edges.
    pub fn theta() -> Graph {
        Graph::from_edges(2, &[(0, 1), (0, 1), (0, 1)]).expect("valid")
    }

    pub fn edge_count(&self) -> usize {
        self.vertex_of.len() / 2
    }

    pub fn half_edge_count(&self) -> usize {
        self.vertex_of.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn vertex_of(&self, h: HalfEdge) -> VertexId {
        self.vertex_of[h]
    }

    /// Vertex the oriented edge `h` departs from.
    pub fn tail(&self, h: HalfEdge) -> VertexId {
        self.vertex_of[h]
    }

    /// Vertex the oriented edge `h` arrives at.
    pub fn head(&self, h: HalfEdge) -> VertexId {
        self.vertex_of[h ^ 1]
    }

    pub fn endpoints(&self, e: EdgeId) -> (VertexId, VertexId) {
        (self.vertex_of[2 * e], self.vertex_of[2 * e + 1])
    }

    pub fn is_loop(&self, e: EdgeId) -> bool {
        let (u, v) = self.endpoints(e);
        u == v
    }

    pub fn half_edges_at(&self, v: VertexId) -> Vec<HalfEdge> {
        (0..self.vertex_of.len()).filter(|&h| self.vertex_of[h] == v).collect()
    }

    pub fn valence(&self, v: VertexId) -> usize {
        self.vertex_of.iter().filter(|&&x| x == v).count()
    }

    pub fn valences(&self) -> Vec<usize> {
        let mut val = vec![0; self.vertex_count];
        for &v in &self.vertex_of {
            val[v] += 1;
        }
        val
    }

    fn adjacency(&self) -> Vec<Vec<HalfEdge>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for (h, &v) in self.vertex_of.iter().enumerate() {
            adj[v].push(h);
        }
        adj
    }

    /// Connected-component label of every vertex, ignoring `removed` edges.
    pub fn components_without(&self, removed: &BTreeSet<EdgeId>) -> Vec<usize> {
        let mut uf = UnionFind::new(self.vertex_count);
        for e in 0..self.edge_count() {
            if !removed.contains(&e) {
                let (u, v) = self.endpoints(e);
                uf.union(u, v);
            }
        }
        (0..self.vertex_count).map(|v| uf.find(v)).collect()
    }

    pub fn is_connected(&self) -> bool {
        let c = self.components_without(&BTreeSet::new());
        c.iter().all(|&x| x == c[0])
    }

    /// Rank of the fundamental group, `E - V + 1`.
    pub fn rank(&self) -> Result<usize> {
        if !self.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(self.edge_count() + 1 - self.vertex_count)
    }

    /// Connected with every vertex of valence at least three.
    pub fn is_core(&self) -> bool {
        self.is_connected() && self.valences().iter().all(|&d| d >= 3)
    }

    /// Bridges, by an iterative low-link search over half-edges.
    pub fn separating_edges(&self) -> BTreeSet<EdgeId> {
        let adj = self.adjacency();
        let n = self.vertex_count;
        let mut order = vec![usize::MAX; n];
        let mut low = vec![0; n];
        let mut bridges = BTreeSet::new();
        let mut counter = 0;
        for root in 0..n {
            if order[root] != usize::MAX {
                continue;
            }
            // (vertex, half-edge used to enter it, next adjacency index)
            let mut stack: Vec<(VertexId, Option<HalfEdge>, usize)> = vec![(root, None, 0)];
            order[root] = counter;
            low[root] = counter;
            counter += 1;
            while let Some(&mut (v, entered, ref mut idx)) = stack.last_mut() {
                if *idx < adj[v].len() {
                    let h = adj[v][*idx];
                    *idx += 1;
                    if Some(h ^ 1) == entered {
                        continue;
                    }
                    let w = self.head(h);
                    if order[w] == usize::MAX {
                        order[w] = counter;
                        low[w] = counter;
                        counter += 1;
                        stack.push((w, Some(h), 0));
                    } else {
                        low[v] = low[v].min(order[w]);
                    }
                } else {
                    stack.pop();
                    if let (Some(h), Some(&(parent, _, _))) = (entered, stack.last()) {
                        low[parent] = low[parent].min(low[v]);
                        if low[v] > order[parent] {
                            bridges.insert(edge_of(h));
                        }
                    }
                }
            }
        }
        bridges
    }

    pub fn is_forest(&self, edges: &BTreeSet<EdgeId>) -> bool {
        let mut uf = UnionFind::new(self.vertex_count);
        edges.iter().all(|&e| {
            let (u, v) = self.endpoints(e);
            e < self.edge_count() && uf.union(u, v)
        })
    }

    /// Crushes each tree of the forest to a point.
    pub fn collapse_forest(&self, forest: &Forest) -> Result<CollapseResult> {
        if let Some(&e) = forest.edges().iter().find(|&&e| e >= self.edge_count()) {
            return Err(Error::NoSuchEdge(e));
        }
        if !self.is_forest(forest.edges()) {
            return Err(Error::NotAForest);
        }
        let mut uf = UnionFind::new(self.vertex_count);
        for &e in forest.edges() {
            let (u, v) = self.endpoints(e);
            uf.union(u, v);
        }
        let mut class_id: BTreeMap<usize, VertexId> = BTreeMap::new();
        let mut vertex_image = Vec::with_capacity(self.vertex_count);
        for v in 0..self.vertex_count {
            let root = uf.find(v);
            let next = class_id.len();
            vertex_image.push(*class_id.entry(root).or_insert(next));
        }
        let mut edge_image = vec![None; self.edge_count()];
        let mut vertex_of = Vec::new();
        for (e, slot) in edge_image.iter_mut().enumerate() {
            if forest.contains(e) {
                continue;
            }
            *slot = Some(vertex_of.len() / 2);
            let (u, v) = self.endpoints(e);
            vertex_of.push(vertex_image[u]);
            vertex_of.push(vertex_image[v]);
        }
        Ok(CollapseResult {
            quotient: Graph {
                vertex_of,
                vertex_count: class_id.len(),
            },
            edge_image,
            vertex_image,
        })
    }

    /// Every spanning tree, by include/exclude search over edges in order.
    pub fn maximal_trees(&self) -> Result<Vec<Forest>> {
        if !self.is_connected() {
            return Err(Error::Disconnected);
        }
        let need = self.vertex_count - 1;
        let candidates: Vec<EdgeId> = (0..self.edge_count()).filter(|&e| !self.is_loop(e)).collect();
        let mut out = Vec::new();
        let mut chosen = Vec::new();
        self.spanning_search(&candidates, 0, need, &mut chosen, &mut out);
        Ok(out)
    }

    fn spanning_search(
        &self,
        candidates: &[EdgeId],
        at: usize,
        need: usize,
        chosen: &mut Vec<EdgeId>,
        out: &mut Vec<Forest>,
    ) {
        if chosen.len() == need {
            out.push(Forest::new(chosen.iter().copied()));
            return;
        }
        if candidates.len() - at < need - chosen.len() {
            return;
        }
        let e = candidates[at];
        chosen.push(e);
        if self.is_forest(&chosen.iter().copied().collect()) {
            self.spanning_search(candidates, at + 1, need, chosen, out);
        }
        chosen.pop();
        self.spanning_search(candidates, at + 1, need, chosen, out);
    }

    /// The unique reduced path from `from` to `to` inside a tree (or forest).
    pub fn tree_path(&self, tree: &BTreeSet<EdgeId>, from: VertexId, to: VertexId) -> Option<Vec<HalfEdge>> {
        let adj = self.adjacency();
        let mut parent: Vec<Option<HalfEdge>> = vec![None; self.vertex_count];
        let mut seen = vec![false; self.vertex_count];
        seen[from] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            if v == to {
                break;
            }
            for &h in &adj[v] {
                let w = self.head(h);
                if tree.contains(&edge_of(h)) && !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(h);
                    queue.push_back(w);
                }
            }
        }
        if !seen[to] {
            return None;
        }
        let mut path = Vec::new();
        let mut v = to;
        while v != from {
            let h = parent[v].expect("reached vertices have parents");
            path.push(h);
            v = self.tail(h);
        }
        path.reverse();
        Some(path)
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            half_edges: (0..self.half_edge_count()).collect(),
            pairs: (0..self.edge_count()).map(|e| [2 * e, 2 * e + 1]).collect(),
            vertex_of: self
                .vertex_of
                .iter()
                .enumerate()
                .map(|(h, &v)| (h.to_string(), v))
                .collect(),
        }
    }

    /// Relabels arbitrary ids: the k-th pair becomes edge k, vertices are
    /// numbered in increasing order of their given ids.
    pub fn from_json(json: &GraphJson) -> Result<Graph> {
        Graph::from_json_relabel(json).map(|(g, _)| g)
    }

    /// As [`Graph::from_json`], also returning the map from given half-edge
    /// ids to the new ones.
    pub fn from_json_relabel(json: &GraphJson) -> Result<(Graph, BTreeMap<usize, HalfEdge>)> {
        let mut vertex_ids: BTreeSet<usize> = BTreeSet::new();
        let lookup = |h: usize| -> Result<usize> {
            json.vertex_of
                .get(&h.to_string())
                .copied()
                .ok_or_else(|| Error::MalformedGraph(format!("half-edge {h} has no vertex")))
        };
        let mut ends = Vec::with_capacity(2 * json.pairs.len());
        let mut used = BTreeSet::new();
        for &[a, b] in &json.pairs {
            if a == b || !used.insert(a) || !used.insert(b) {
                return Err(Error::MalformedGraph(format!("bad pair [{a}, {b}]")));
            }
            ends.push(lookup(a)?);
            ends.push(lookup(b)?);
        }
        let listed: BTreeSet<usize> = json.half_edges.iter().copied().collect();
        if listed != used {
            return Err(Error::MalformedGraph("pairs do not cover halfEdges exactly".into()));
        }
        vertex_ids.extend(ends.iter().copied());
        let index: BTreeMap<usize, usize> = vertex_ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let relabel = json
            .pairs
            .iter()
            .enumerate()
            .flat_map(|(k, &[a, b])| [(a, 2 * k), (b, 2 * k + 1)])
            .collect();
        let g = Graph::new(index.len(), ends.iter().map(|v| index[v]).collect())?;
        Ok((g, relabel))
    }

    pub fn to_dot(&self, name: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "graph {name} {{");
        self.write_dot_body(&mut s, "");
        s.push_str("}\n");
        s
    }

    /// Vertex and edge statements, with ids prefixed so several graphs can
    /// share one DOT file.
    pub fn write_dot_body(&self, s: &mut String, prefix: &str) {
        for v in 0..self.vertex_count {
            let _ = writeln!(s, "  {prefix}v{v} [label=\"{v}\"];");
        }
        for e in 0..self.edge_count() {
            let (u, v) = self.endpoints(e);
            let _ = writeln!(s, "  {prefix}v{u} -- {prefix}v{v} [label=\"e{e}\"];");
        }
    }

    /// Brute-force isomorphism test for small graphs, ignoring edge labels.
    pub fn is_isomorphic(&self, other: &Graph) -> bool {
        if self.vertex_count != other.vertex_count || self.edge_count() != other.edge_count() {
            return false;
        }
        let (ma, mb) = (self.multiplicities(), other.multiplicities());
        let (va, vb) = (self.valences(), other.valences());
        let mut sa = va.clone();
        let mut sb = vb.clone();
        sa.sort_unstable();
        sb.sort_unstable();
        if sa != sb {
            return false;
        }
        let mut image = vec![usize::MAX; self.vertex_count];
        let mut used = vec![false; self.vertex_count];
        iso_search(0, &ma, &mb, &va, &vb, &mut image, &mut used)
    }

    fn multiplicities(&self) -> Vec<Vec<usize>> {
        let n = self.vertex_count;
        let mut m = vec![vec![0; n]; n];
        for e in 0..self.edge_count() {
            let (u, v) = self.endpoints(e);
            m[u][v] += 1;
            if u != v {
                m[v][u] += 1;
            }
        }
        m
    }
}

fn iso_search(
    i: usize,
    ma: &[Vec<usize>],
    mb: &[Vec<usize>],
    va: &[usize],
    vb: &[usize],
    image: &mut [usize],
    used: &mut [bool],
) -> bool {
    if i == va.len() {
        return true;
    }
    for t in 0..vb.len() {
        if used[t] || va[i] != vb[t] || ma[i][i] != mb[t][t] {
            continue;
        }
        if (0..i).any(|j| ma[i][j] != mb[t][image[j]]) {
            continue;
        }
        image[i] = t;
        used[t] = true;
        if iso_search(i + 1, ma, mb, va, vb, image, used) {
            return true;
        }
        used[t] = false;
    }
    false
}

/// JSON form: `{"halfEdges":[..], "pairs":[[e, ebar], ..], "vertexOf":{"id": v}}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    #[serde(rename = "halfEdges")]
    pub half_edges: Vec<usize>,
    pub pairs: Vec<[usize; 2]>,
    #[serde(rename = "vertexOf")]
    pub vertex_of: BTreeMap<String, usize>,
}

/// An acyclic set of edges.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Forest(BTreeSet<EdgeId>);

impl Forest {
    pub fn new(edges: impl IntoIterator<Item = EdgeId>) -> Forest {
        Forest(edges.into_iter().collect())
    }

    pub fn empty() -> Forest {
        Forest::default()
    }

    pub fn edges(&self) -> &BTreeSet<EdgeId> {
        &self.0
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.0.contains(&e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Outcome of collapsing a forest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollapseResult {
    pub quotient: Graph,
    /// `None` on collapsed edges; surviving edges keep their relative order.
    pub edge_image: Vec<Option<EdgeId>>,
    pub vertex_image: Vec<VertexId>,
}

impl CollapseResult {
    pub fn map_half_edge(&self, h: HalfEdge) -> Option<HalfEdge> {
        self.edge_image[edge_of(h)].map(|e| 2 * e + (h & 1))
    }
}

#[derive(Clone, Debug)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> UnionFind {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// False if already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

/// Whether `e` joins the two components of `tree − removed`.
pub fn connects_components(g: &Graph, tree: &Forest, removed: EdgeId, e: EdgeId) -> bool {
    let mut rest = tree.edges().clone();
    rest.remove(&removed);
    let comp = g.components_without(&complement(g, &rest));
    let (a, b) = g.endpoints(removed);
    let (u, v) = g.endpoints(e);
    comp[a] != comp[b] && comp[u] != comp[v] && (comp[u] == comp[a] || comp[u] == comp[b])
}

fn complement(g: &Graph, keep: &BTreeSet<EdgeId>) -> BTreeSet<EdgeId> {
    (0..g.edge_count()).filter(|e| !keep.contains(e)).collect()
}

fn check_spanning_tree(g: &Graph, t: &[EdgeId]) -> Result<()> {
    let set: BTreeSet<EdgeId> = t.iter().copied().collect();
    if set.len() != t.len() || t.len() + 1 != g.vertex_count() || !g.is_forest(&set) {
        return Err(Error::NotAForest);
    }
    Ok(())
}

/// For each edge of `f`, the indices of `phi` edges on the `phi`-path joining
/// its endpoints, with the sign of traversal.
fn fundamental_paths(g: &Graph, phi: &[EdgeId], f: &[EdgeId]) -> Vec<Vec<(usize, i64)>> {
    let tree: BTreeSet<EdgeId> = phi.iter().copied().collect();
    let index: BTreeMap<EdgeId, usize> = phi.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    f.iter()
        .map(|&e| {
            let (u, v) = g.endpoints(e);
            g.tree_path(&tree, u, v)
                .expect("spanning tree connects everything")
                .into_iter()
                .map(|h| (index[&edge_of(h)], if h & 1 == 0 { 1 } else { -1 }))
                .collect()
        })
        .collect()
}

/// Signed change-of-basis matrix between two spanning trees: entry `(i, j)`
/// is `±1` when `phi[i]` lies on the `phi`-path joining the endpoints of
/// `f[j]`.
pub fn replacement_matrix(g: &Graph, phi: &[EdgeId], f: &[EdgeId]) -> Result<Vec<Vec<i64>>> {
    check_spanning_tree(g, phi)?;
    check_spanning_tree(g, f)?;
    let k = phi.len();
    let mut b = vec![vec![0i64; k]; k];
    for (j, path) in fundamental_paths(g, phi, f).into_iter().enumerate() {
        for (i, s) in path {
            b[i][j] = s;
        }
    }
    Ok(b)
}

/// Exact integer determinant by fraction-free elimination.
pub fn determinant(m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&r| a[r][k] != 0) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    (sign * a[n - 1][n - 1]) as i64
}

/// A permutation `sigma` with `f[sigma[i]]` joining the two components of
/// `phi − phi[i]`, fixing shared edges. Shared edges are matched first; the
/// rest is a bipartite matching on the support of the replacement matrix.
pub fn tree_replacement_permutation(g: &Graph, phi: &[EdgeId], f: &[EdgeId]) -> Result<Vec<usize>> {
    check_spanning_tree(g, phi)?;
    check_spanning_tree(g, f)?;
    let k = phi.len();
    let f_index: BTreeMap<EdgeId, usize> = f.iter().enumerate().map(|(j, &e)| (e, j)).collect();
    let mut sigma: Vec<Option<usize>> = vec![None; k];
    let mut column_owner: Vec<Option<usize>> = vec![None; k];
    for (i, e) in phi.iter().enumerate() {
        if let Some(&j) = f_index.get(e) {
            sigma[i] = Some(j);
            column_owner[j] = Some(i);
        }
    }
    let shared: Vec<bool> = column_owner.iter().map(Option::is_some).collect();
    let mut support: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (j, path) in fundamental_paths(g, phi, f).into_iter().enumerate() {
        if shared[j] {
            continue;
        }
        for (i, _) in path {
            support[i].push(j);
        }
    }
    for i in 0..k {
        if sigma[i].is_some() {
            continue;
        }
        let mut visited = vec![false; k];
        if !augment(i, &support, &mut sigma, &mut column_owner, &mut visited) {
            return Err(Error::NoMatching);
        }
    }
    Ok(sigma.into_iter().map(|s| s.expect("perfect matching")).collect())
}

fn augment(
    i: usize,
    support: &[Vec<usize>],
    sigma: &mut [Option<usize>],
    owner: &mut [Option<usize>],
    visited: &mut [bool],
) -> bool {
    for &j in &support[i] {
        if visited[j] {
            continue;
        }
        visited[j] = true;
        let free = match owner[j] {
            None => true,
            Some(other) => augment(other, support, sigma, owner, visited),
        };
        if free {
            sigma[i] = Some(j);
            owner[j] = Some(i);
            return true;
        }
    }
    false
}

/// Core graphs with at most `max_edges` edges and rank `2..=max_rank`, one
/// per isomorphism class. Edges are listed in a canonical order.
pub fn core_graphs(max_edges: usize, max_rank: usize) -> Vec<Graph> {
    let mut out: Vec<Graph> = Vec::new();
    for rank in 2..=max_rank {
        // Valence >= 3 forces 2E >= 3V with E = V + rank - 1.
        for v in 1..=2 * (rank - 1) {
            let e = v + rank - 1;
            if e > max_edges {
                continue;
            }
            let slots: Vec<(usize, usize)> = (0..v).flat_map(|a| (a..v).map(move |b| (a, b))).collect();
            let mut chosen = Vec::with_capacity(e);
            let mut found = Vec::new();
            multisets(&slots, 0, e, &mut chosen, &mut |edges| {
                let g = Graph::from_edges(v, edges);
                if let Ok(g) = g {
                    if g.is_core() && !found.iter().any(|h: &Graph| h.is_isomorphic(&g)) {
                        found.push(g);
                    }
                }
            });
            out.extend(found);
        }
    }
    out
}

type EdgeList = [(usize, usize)];

fn multisets(
    slots: &EdgeList,
    from: usize,
    remaining: usize,
    chosen: &mut Vec<(usize, usize)>,
    visit: &mut dyn FnMut(&EdgeList),
) {
    if remaining == 0 {
        visit(chosen);
        return;
    }
    for i in from..slots.len() {
        chosen.push(slots[i]);
        multisets(slots, i, remaining - 1, chosen, visit);
        chosen.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn barbell() -> Graph {
        Graph::from_edges(2, &[(0, 0), (0, 1), (1, 1)]).unwrap()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(Graph::rose(3).rank(), Ok(3));
        assert_eq!(Graph::theta().rank(), Ok(2));
        // A loop on top of a theta graph, as drawn for a marked rank-3 graph.
        let g = Graph::from_edges(2, &[(0, 0), (0, 1), (0, 1), (0, 1)]).unwrap();
        assert_eq!(g.rank(), Ok(3));
        let disconnected = Graph::from_edges(2, &[(0, 0), (1, 1)]).unwrap();
        assert_eq!(disconnected.rank(), Err(Error::Disconnected));
    }

    #[test]
    fn core_examples() {
        assert!(Graph::rose(2).is_core());
        assert!(Graph::theta().is_core());
        let bivalent = Graph::from_edges(3, &[(0, 0), (0, 1), (1, 2), (2, 0)]).unwrap();
        assert!(!bivalent.is_core());
    }

    #[test]
    fn bridges() {
        assert!(Graph::theta().separating_edges().is_empty());
        assert_eq!(barbell().separating_edges(), BTreeSet::from([1]));
        assert!(Graph::rose(2).separating_edges().is_empty());
    }

    #[test]
    fn collapse_examples() {
        let t = Graph::theta();
        let same = t.collapse_forest(&Forest::empty()).unwrap();
        assert_eq!(same.quotient, t);
        let r = t.collapse_forest(&Forest::new([0])).unwrap();
        assert_eq!(r.quotient, Graph::rose(2));
        assert_eq!(r.edge_image, vec![None, Some(0), Some(1)]);
        assert_eq!(t.collapse_forest(&Forest::new([0, 1])), Err(Error::NotAForest));
    }

    #[test]
    fn fold_figure_collapse() {
        // Bottom of the fold figure: e from the left vertex to a new vertex,
        // then e1, e2 to the two right-hand vertices.
        let bottom = Graph::from_edges(4, &[(0, 1), (1, 2), (1, 3), (0, 0), (2, 2), (3, 3), (2, 3)]).unwrap();
        let top_left = Graph::from_edges(3, &[(0, 1), (0, 2), (0, 0), (1, 1), (2, 2), (1, 2)]).unwrap();
        let top_right = Graph::from_edges(2, &[(0, 1), (0, 0), (1, 1), (1, 1), (1, 1)]).unwrap();
        let down = bottom.collapse_forest(&Forest::new([0])).unwrap().quotient;
        assert!(down.is_isomorphic(&top_left));
        let fold = bottom.collapse_forest(&Forest::new([1, 2])).unwrap().quotient;
        assert!(fold.is_isomorphic(&top_right));
    }

    #[test]
    fn spanning_tree_counts() {
        assert_eq!(Graph::rose(3).maximal_trees().unwrap(), vec![Forest::empty()]);
        assert_eq!(Graph::theta().maximal_trees().unwrap().len(), 3);
        for k in 3..7 {
            let cycle: Vec<(usize, usize)> = (0..k).map(|i| (i, (i + 1) % k)).collect();
            let g = Graph::from_edges(k, &cycle).unwrap();
            let trees = g.maximal_trees().unwrap();
            assert_eq!(trees.len(), k);
            assert!(trees.iter().all(|t| t.len() == k - 1));
        }
    }

    #[test]
    fn replacement_trivial_cases() {
        let t = Graph::theta();
        let sigma = tree_replacement_permutation(&t, &[0], &[1]).unwrap();
        assert_eq!(sigma, vec![0]);
        assert!(connects_components(&t, &Forest::new([0]), 0, 1));
        let k4 = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (1, 3)]).unwrap();
        assert_eq!(
            tree_replacement_permutation(&k4, &[0, 1, 2], &[0, 1, 2]).unwrap(),
            vec![0, 1, 2]
        );
        let sigma = tree_replacement_permutation(&k4, &[0, 1, 2], &[3, 4, 5]).unwrap();
        for (i, &j) in sigma.iter().enumerate() {
            assert!(connects_components(
                &k4,
                &Forest::new([0, 1, 2]),
                [0, 1, 2][i],
                [3, 4, 5][j]
            ));
        }
    }

    #[test]
    fn determinant_small() {
        assert_eq!(determinant(&[vec![2, 1], vec![1, 1]]), 1);
        assert_eq!(determinant(&[vec![0, 1], vec![1, 0]]), -1);
        assert_eq!(determinant(&[vec![1, 2], vec![2, 4]]), 0);
        assert_eq!(determinant(&[vec![2, 0, 1], vec![1, 3, 2], vec![1, 1, 2]]), 6);
        assert_eq!(determinant(&[vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]), -1);
    }

    #[test]
    fn json_relabels_ids() {
        let json: GraphJson = serde_json::from_str(
            r#"{"halfEdges":[10,11,20,21,30,31],"pairs":[[10,11],[20,21],[30,31]],
                "vertexOf":{"10":5,"11":7,"20":5,"21":7,"30":5,"31":7}}"#,
        )
        .unwrap();
        let g = Graph::from_json(&json).unwrap();
        assert_eq!(g, Graph::theta());
        assert_eq!(Graph::from_json(&g.to_json()).unwrap(), g);
    }

    #[test]
    fn bridges_match_deletion_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let v = rng.gen_range(1..7);
            let e = rng.gen_range(v..v + 5);
            // Random spanning path keeps the graph connected.
            let mut edges: Vec<(usize, usize)> = (1..v).map(|i| (rng.gen_range(0..i), i)).collect();
            while edges.len() < e {
                edges.push((rng.gen_range(0..v), rng.gen_range(0..v)));
            }
            let g = Graph::from_edges(v, &edges).unwrap();
            let oracle: BTreeSet<EdgeId> = (0..g.edge_count())
                .filter(|&x| {
                    let c = g.components_without(&BTreeSet::from([x]));
                    c.iter().any(|&k| k != c[0])
                })
                .collect();
            assert_eq!(g.separating_edges(), oracle, "{edges:?}");
        }
    }

    #[test]
    fn small_core_graph_census() {
        // Rank 2: rose, barbell, theta; rank 3 has 15 (counted independently).
        let r2 = core_graphs(6, 2);
        assert_eq!(r2.len(), 3);
        assert_eq!(core_graphs(6, 3).len(), 3 + 15);
        for g in core_graphs(6, 3) {
            assert!(g.is_core());
            for t in g.maximal_trees().unwrap() {
                let c = g.collapse_forest(&t).unwrap();
                assert_eq!(c.quotient.vertex_count(), 1);
                assert_eq!(c.quotient.rank(), g.rank());
            }
        }
    }

    #[test]
    fn replacement_matrices_are_unimodular() {
        for g in core_graphs(6, 3) {
            let trees = g.maximal_trees().unwrap();
            for phi in &trees {
                for f in &trees {
                    let a: Vec<EdgeId> = phi.edges().iter().copied().collect();
                    let b: Vec<EdgeId> = f.edges().iter().copied().collect();
                    let m = replacement_matrix(&g, &a, &b).unwrap();
                    assert_eq!(determinant(&m).abs(), 1);
                }
            }
        }
    }
}
