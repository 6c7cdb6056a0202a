//! Finite loopless multigraphs with integer edge multiplicities.
//!
//! Vertices are dense indices `0..n`; labels only matter at the I/O boundary.
//! Multiplicities live in a dense symmetric matrix, which is what the firing
//! and burning loops iterate over.

use std::collections::{HashMap, VecDeque};
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::{BigInt, BigUint};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default vertex bound for [`Multigraph::canonical_code`].
pub const CANONICAL_CODE_BOUND: usize = 8;

static NEXT_GRAPH_ID: AtomicU64 = AtomicU64::new(1);

/// Identity of a constructed graph. Clones share it; every construction gets a fresh one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GraphId(u64);

impl GraphId {
    fn fresh() -> Self {
        GraphId(NEXT_GRAPH_ID.fetch_add(1, Ordering::Relaxed))
    }
}

/// A finite loopless multigraph. Immutable after construction.
#[derive(Debug, Clone)]
pub struct Multigraph {
    id: GraphId,
    labels: Vec<String>,
    index: HashMap<String, usize>,
    mult: Vec<u32>,
    valence: Vec<i64>,
    neighbors: Vec<Vec<(usize, u32)>>,
    edge_count: u64,
    connected: bool,
}

/// Interchange form of a graph: `{"vertices": [...], "edges": [[u, v, m], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String, i64)>,
}

impl Multigraph {
    /// Builds a graph from labels and `(u, v, multiplicity)` triples. Repeated pairs add up.
    pub fn build<S: AsRef<str>>(vertices: &[S], edges: &[(S, S, i64)]) -> Result<Self> {
        let labels: Vec<String> = vertices.iter().map(|s| s.as_ref().to_string()).collect();
        if labels.is_empty() {
            return Err(Error::InvalidArgument("graph needs at least one vertex".into()));
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::DuplicateVertex(l.clone()));
            }
        }
        let n = labels.len();
        let mut mult = vec![0u32; n * n];
        for (u, v, m) in edges {
            let (u, v) = (u.as_ref(), v.as_ref());
            let iu = *index.get(u).ok_or_else(|| Error::UnknownEndpoint(u.to_string()))?;
            let iv = *index.get(v).ok_or_else(|| Error::UnknownEndpoint(v.to_string()))?;
            if iu == iv {
                return Err(Error::LoopEdge(u.to_string()));
            }
            if *m < 1 {
                return Err(Error::NonPositiveMultiplicity(u.to_string(), v.to_string()));
            }
            let m = u32::try_from(*m).map_err(|_| Error::InvalidArgument(format!("multiplicity {m} too large")))?;
            mult[iu * n + iv] += m;
            mult[iv * n + iu] += m;
        }
        Ok(Self::assemble(labels, index, mult))
    }

    /// Builds a graph from a dense symmetric multiplicity matrix with zero diagonal.
    pub fn from_matrix(labels: Vec<String>, mult: Vec<u32>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::InvalidArgument("graph needs at least one vertex".into()));
        }
        if mult.len() != n * n {
            return Err(Error::InvalidArgument("matrix size does not match vertex count".into()));
        }
        let mut index = HashMap::with_capacity(n);
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::DuplicateVertex(l.clone()));
            }
        }
        for i in 0..n {
            if mult[i * n + i] != 0 {
                return Err(Error::LoopEdge(labels[i].clone()));
            }
            for j in 0..i {
                if mult[i * n + j] != mult[j * n + i] {
                    return Err(Error::InvalidArgument("multiplicity matrix is not symmetric".into()));
                }
            }
        }
        Ok(Self::assemble(labels, index, mult))
    }

    /// Graph on vertices `0..n` labelled `v0, v1, ...`.
    pub fn from_index_edges(n: usize, edges: &[(usize, usize, u32)]) -> Result<Self> {
        let labels = (0..n).map(|i| format!("v{i}")).collect();
        let mut mult = vec![0u32; n * n];
        for &(u, v, m) in edges {
            if u >= n || v >= n {
                return Err(Error::UnknownEndpoint(format!("v{}", u.max(v))));
            }
            if u == v {
                return Err(Error::LoopEdge(format!("v{u}")));
            }
            mult[u * n + v] += m;
            mult[v * n + u] += m;
        }
        Self::from_matrix(labels, mult)
    }

    fn assemble(labels: Vec<String>, index: HashMap<String, usize>, mult: Vec<u32>) -> Self {
        let n = labels.len();
        let mut valence = vec![0i64; n];
        let mut neighbors = vec![Vec::new(); n];
        let mut edge_count = 0u64;
        for i in 0..n {
            for j in 0..n {
                let m = mult[i * n + j];
                if m > 0 {
                    valence[i] += m as i64;
                    neighbors[i].push((j, m));
                    if i < j {
                        edge_count += m as u64;
                    }
                }
            }
        }
        let connected = bfs_reach(n, &neighbors, 0, None).iter().all(|&r| r);
        Multigraph { id: GraphId::fresh(), labels, index, mult, valence, neighbors, edge_count, connected }
    }

    pub fn id(&self) -> GraphId {
        self.id
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> u64 {
        self.edge_count
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    /// Like [`Self::index_of`] but erroring with `UnknownEndpoint`.
    pub fn vertex(&self, label: &str) -> Result<usize> {
        self.index_of(label).ok_or_else(|| Error::UnknownEndpoint(label.to_string()))
    }

    #[inline]
    pub fn mult(&self, u: usize, v: usize) -> u32 {
        self.mult[u * self.labels.len() + v]
    }

    #[inline]
    pub fn valence(&self, v: usize) -> i64 {
        self.valence[v]
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[(usize, u32)] {
        &self.neighbors[v]
    }

    /// Edges as `(u, v, multiplicity)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        let n = self.vertex_count();
        (0..n).flat_map(move |i| ((i + 1)..n).map(move |j| (i, j, self.mult(i, j)))).filter(|e| e.2 > 0)
    }

    /// Every divisor-theoretic operation needs this.
    pub fn is_connected(&self) -> bool {
        self.connected
    }

    pub fn require_connected(&self) -> Result<()> {
        if self.connected {
            Ok(())
        } else {
            Err(Error::Disconnected)
        }
    }

    /// First Betti number `|E| - |V| + 1`.
    pub fn genus(&self) -> Result<i64> {
        self.require_connected()?;
        Ok(self.edge_count as i64 - self.vertex_count() as i64 + 1)
    }

    /// Vertices reachable from `start` (graph minus `removed`, if given).
    pub fn reachable_from(&self, start: usize, removed: Option<usize>) -> Vec<bool> {
        bfs_reach(self.vertex_count(), &self.neighbors, start, removed)
    }

    /// Attaches a simple complete graph on `n` new vertices, joining each new vertex to `at`
    /// with `k + 1` parallel edges.
    pub fn attach_complete(&self, at: &str, n: usize, k: u32) -> Result<Multigraph> {
        let at = self.vertex(at)?;
        let old = self.vertex_count();
        let mut labels = self.labels.clone();
        for j in 1..=n {
            labels.push(self.fresh_label(&format!("{}.k{j}", self.labels[at])));
        }
        let total = old + n;
        let mut mult = vec![0u32; total * total];
        for i in 0..old {
            for j in 0..old {
                mult[i * total + j] = self.mult(i, j);
            }
        }
        for a in old..total {
            mult[a * total + at] = k + 1;
            mult[at * total + a] = k + 1;
            for b in old..total {
                if a != b {
                    mult[a * total + b] = 1;
                }
            }
        }
        Multigraph::from_matrix(labels, mult)
    }

    /// Replaces every edge (counted with multiplicity) by a path with `t` internal vertices.
    pub fn subdivide(&self, t: usize) -> Multigraph {
        if t == 0 {
            return self.clone();
        }
        let mut labels = self.labels.clone();
        let mut edges: Vec<(usize, usize, u32)> = Vec::new();
        for (u, v, m) in self.edges() {
            for copy in 1..=m {
                let mut prev = u;
                for step in 1..=t {
                    let name = format!("{}~{}#{copy}.{step}", self.labels[u], self.labels[v]);
                    labels.push(self.fresh_label(&name));
                    let cur = labels.len() - 1;
                    edges.push((prev, cur, 1));
                    prev = cur;
                }
                edges.push((prev, v, 1));
            }
        }
        let n = labels.len();
        let mut mult = vec![0u32; n * n];
        for (a, b, m) in edges {
            mult[a * n + b] += m;
            mult[b * n + a] += m;
        }
        Multigraph::from_matrix(labels, mult).expect("subdivision is loopless")
    }

    /// Induced subgraph on `keep` (in the given order), labels preserved.
    pub fn induced_subgraph(&self, keep: &[usize]) -> Multigraph {
        let labels: Vec<String> = keep.iter().map(|&v| self.labels[v].clone()).collect();
        let k = keep.len();
        let mut mult = vec![0u32; k * k];
        for (a, &u) in keep.iter().enumerate() {
            for (b, &v) in keep.iter().enumerate() {
                if a != b {
                    mult[a * k + b] = self.mult(u, v);
                }
            }
        }
        Multigraph::from_matrix(labels, mult).expect("induced subgraph of a valid graph")
    }

    /// Same graph with `m` extra parallel edges between `u` and `v`.
    pub fn with_extra_edges(&self, u: usize, v: usize, m: u32) -> Result<Multigraph> {
        let n = self.vertex_count();
        if u >= n || v >= n {
            return Err(Error::IndexOutOfRange(format!("vertex {}", u.max(v))));
        }
        if u == v {
            return Err(Error::LoopEdge(self.labels[u].clone()));
        }
        let mut mult = self.mult.clone();
        mult[u * n + v] += m;
        mult[v * n + u] += m;
        Multigraph::from_matrix(self.labels.clone(), mult)
    }

    /// Relabel-free permutation: new vertex `i` is old vertex `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Multigraph {
        let n = self.vertex_count();
        assert_eq!(perm.len(), n);
        let labels = perm.iter().map(|&p| self.labels[p].clone()).collect();
        let mut mult = vec![0u32; n * n];
        for i in 0..n {
            for j in 0..n {
                mult[i * n + j] = self.mult(perm[i], perm[j]);
            }
        }
        Multigraph::from_matrix(labels, mult).expect("permutation of a valid graph")
    }

    fn fresh_label(&self, want: &str) -> String {
        let mut s = want.to_string();
        while self.index.contains_key(&s) {
            s.push('\'');
        }
        s
    }

    /// Number of spanning trees, by an exact fraction-free determinant of the reduced Laplacian.
    pub fn spanning_tree_count(&self) -> Result<BigUint> {
        self.require_connected()?;
        let n = self.vertex_count();
        if n <= 1 {
            return Ok(BigUint::from(1u32));
        }
        let size = n - 1;
        let mut a: Vec<Vec<BigInt>> = (1..n)
            .map(|i| {
                (1..n)
                    .map(|j| if i == j { BigInt::from(self.valence(i)) } else { -BigInt::from(self.mult(i, j)) })
                    .collect()
            })
            .collect();
        let det = bareiss_determinant(&mut a, size);
        Ok(det.to_biguint().expect("reduced Laplacian of a connected graph is positive definite"))
    }

    /// Canonical isomorphism key: the lexicographically smallest upper-triangular multiplicity
    /// sequence over all vertex orderings. Equal codes iff isomorphic (labels ignored).
    pub fn canonical_code(&self) -> Result<Vec<u8>> {
        self.canonical_code_bounded(CANONICAL_CODE_BOUND)
    }

    pub fn canonical_code_bounded(&self, bound: usize) -> Result<Vec<u8>> {
        let n = self.vertex_count();
        if n > bound {
            return Err(Error::TooLarge { vertices: n, bound });
        }
        let mut search = CodeSearch { g: self, n, best: None, cur: Vec::with_capacity(n * n / 2), perm: Vec::with_capacity(n), used: vec![false; n] };
        search.run();
        let best = search.best.unwrap_or_default();
        let mut out = Vec::with_capacity(1 + 4 * best.len());
        out.push(n as u8);
        for m in best {
            out.extend_from_slice(&m.to_be_bytes());
        }
        Ok(out)
    }

    pub fn to_file(&self) -> GraphFile {
        GraphFile {
            vertices: self.labels.clone(),
            edges: self.edges().map(|(u, v, m)| (self.labels[u].clone(), self.labels[v].clone(), m as i64)).collect(),
        }
    }

    pub fn from_file(file: &GraphFile) -> Result<Self> {
        let edges: Vec<(&str, &str, i64)> = file.edges.iter().map(|(u, v, m)| (u.as_str(), v.as_str(), *m)).collect();
        let vertices: Vec<&str> = file.vertices.iter().map(String::as_str).collect();
        Multigraph::build(&vertices, &edges)
    }

    /// Structural equality including labels and vertex order (ignores identity).
    pub fn same_structure(&self, other: &Multigraph) -> bool {
        self.labels == other.labels && self.mult == other.mult
    }
}

fn bfs_reach(n: usize, neighbors: &[Vec<(usize, u32)>], start: usize, removed: Option<usize>) -> Vec<bool> {
    let mut seen = vec![false; n];
    if n == 0 || Some(start) == removed {
        return seen;
    }
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    while let Some(u) = queue.pop_front() {
        for &(w, _) in &neighbors[u] {
            if !seen[w] && Some(w) != removed {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    seen
}

fn bareiss_determinant(a: &mut [Vec<BigInt>], size: usize) -> BigInt {
    let zero = BigInt::from(0);
    let mut sign = 1i32;
    let mut prev = BigInt::from(1);
    for k in 0..size {
        if a[k][k] == zero {
            match (k + 1..size).find(|&r| a[r][k] != zero) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return zero,
            }
        }
        for i in (k + 1)..size {
            for j in (k + 1)..size {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    let det = a[size - 1][size - 1].clone();
    if sign < 0 {
        -det
    } else {
        det
    }
}

struct CodeSearch<'a> {
    g: &'a Multigraph,
    n: usize,
    best: Option<Vec<u32>>,
    cur: Vec<u32>,
    perm: Vec<usize>,
    used: Vec<bool>,
}

impl CodeSearch<'_> {
    // code order: column j = 1..n, rows i < j; a prefix of the permutation fixes a prefix of the code
    fn run(&mut self) {
        if self.perm.len() == self.n {
            if self.best.as_ref().is_none_or(|b| self.cur < *b) {
                self.best = Some(self.cur.clone());
            }
            return;
        }
        for v in 0..self.n {
            if self.used[v] {
                continue;
            }
            let mark = self.cur.len();
            for &p in &self.perm {
                self.cur.push(self.g.mult(p, v));
            }
            if let Some(best) = &self.best {
                if self.cur.as_slice() > &best[..self.cur.len()] {
                    self.cur.truncate(mark);
                    continue;
                }
            }
            self.used[v] = true;
            self.perm.push(v);
            self.run();
            self.perm.pop();
            self.used[v] = false;
            self.cur.truncate(mark);
        }
    }
}

/// Simple complete graph `K_n` with labels `v1..vn`.
pub fn complete_graph(n: usize) -> Multigraph {
    let labels = (1..=n).map(|i| format!("v{i}")).collect();
    let mut mult = vec![1u32; n * n];
    for i in 0..n {
        mult[i * n + i] = 0;
    }
    Multigraph::from_matrix(labels, mult).expect("complete graph")
}

/// Banana graph: two vertices `a`, `b` joined by `m` parallel edges.
pub fn banana(m: u32) -> Multigraph {
    Multigraph::build(&["a", "b"], &[("a", "b", m as i64)]).expect("banana graph")
}

/// Cycle on `n >= 3` vertices, or a banana `B_2` for `n = 2`.
pub fn cycle(n: usize) -> Multigraph {
    let edges: Vec<(usize, usize, u32)> = (0..n).map(|i| (i, (i + 1) % n, 1)).collect();
    Multigraph::from_index_edges(n, &edges).expect("cycle")
}

/// Path with `n` vertices.
pub fn path(n: usize) -> Multigraph {
    let edges: Vec<(usize, usize, u32)> = (1..n).map(|i| (i - 1, i, 1)).collect();
    Multigraph::from_index_edges(n, &edges).expect("path")
}
