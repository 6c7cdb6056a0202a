//! Quasi-banana graphs: construction, recognition, and the checks built on them.
//!
//! `QB_m(q_1, ..., q_m)` has a root layer `C_0 = {u_{0,1}}` and layers `C_i` of size `q_i`.
//! Each layer is a simple complete graph, and the hub `u_{i,1}` of layer `i` is joined to
//! every vertex of layer `i + 1` by `q_1 + ... + q_i + 2` parallel edges.

mod complete;
mod structure;
mod theorems;

use serde::Serialize;

pub use complete::{cp_witness, cp_witness_bounded, kn_reduced_characterization, staircase_holds, CPWitness};
pub use structure::{structure_lemma_check, Outcome, StructureReport};
pub use theorems::{
    verify_attach_lemma, verify_built, verify_theorem_b, AttachOptions, AttachRank, AttachReport, PowerCheck,
    RankEvidence, SequenceCheck, TheoremBOptions, TheoremBReport, UniquenessCheck,
};

use crate::chipfire::{equivalent, Divisor};
use crate::error::{Error, Result};
use crate::multigraph::Multigraph;

/// Layer sizes plus the vertex of each `u_{i,j}`; `labeling[i][j - 1]` is `u_{i,j}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct QBParams {
    pub layers: Vec<usize>,
    pub labeling: Vec<Vec<usize>>,
}

impl QBParams {
    pub fn m(&self) -> usize {
        self.layers.len()
    }

    /// Predicted first gonality `q_1 + ... + q_m + 1`.
    pub fn k(&self) -> i64 {
        self.layers.iter().sum::<usize>() as i64 + 1
    }

    pub fn root(&self) -> usize {
        self.labeling[0][0]
    }

    /// `q_1 + ... + q_i`.
    pub fn cumulative(&self, i: usize) -> i64 {
        self.layers[..i].iter().sum::<usize>() as i64
    }

    /// Vertex `u_{i,j}` (1-based `j`).
    pub fn vertex(&self, i: usize, j: usize) -> Result<usize> {
        self.labeling
            .get(i)
            .and_then(|layer| layer.get(j.wrapping_sub(1)))
            .copied()
            .ok_or_else(|| Error::IndexOutOfRange(format!("u_{{{i},{j}}}")))
    }

    /// Layers `from..=to`, flattened.
    fn layer_vertices(&self, from: usize, to: usize) -> impl Iterator<Item = usize> + '_ {
        self.labeling[from..=to].iter().flatten().copied()
    }

    /// Whether `g` is exactly the quasi-banana graph these parameters describe.
    pub fn matches(&self, g: &Multigraph) -> bool {
        let n = g.vertex_count();
        if self.labeling.len() != self.layers.len() + 1
            || self.labeling[0].len() != 1
            || self.labeling[1..].iter().zip(&self.layers).any(|(l, &q)| l.len() != q || q == 0)
        {
            return false;
        }
        let mut seen = vec![false; n];
        for &v in self.labeling.iter().flatten() {
            if v >= n || seen[v] {
                return false;
            }
            seen[v] = true;
        }
        if !seen.iter().all(|&s| s) {
            return false;
        }
        expected_matrix(self, n) == (0..n * n).map(|x| g.mult(x / n, x % n)).collect::<Vec<_>>()
    }

    pub fn labels(&self, g: &Multigraph) -> Vec<Vec<String>> {
        self.labeling.iter().map(|l| l.iter().map(|&v| g.label(v).to_string()).collect()).collect()
    }
}

fn expected_matrix(p: &QBParams, n: usize) -> Vec<u32> {
    let mut mult = vec![0u32; n * n];
    let mut set = |a: usize, b: usize, m: u32| {
        mult[a * n + b] = m;
        mult[b * n + a] = m;
    };
    for layer in &p.labeling[1..] {
        for (x, &a) in layer.iter().enumerate() {
            for &b in &layer[x + 1..] {
                set(a, b, 1);
            }
        }
    }
    for i in 0..p.m() {
        let hub = p.labeling[i][0];
        let m = (p.cumulative(i) + 2) as u32;
        for &w in &p.labeling[i + 1] {
            set(hub, w, m);
        }
    }
    mult
}

/// Builds `QB_m(N)` with vertices labelled `u{i}_{j}`, layer by layer.
pub fn build_qb(layers: &[usize]) -> Result<(Multigraph, QBParams)> {
    if layers.contains(&0) {
        return Err(Error::NonPositiveLayer);
    }
    let mut labels = vec!["u0_1".to_string()];
    let mut labeling = vec![vec![0usize]];
    for (i, &q) in layers.iter().enumerate() {
        let mut layer = Vec::with_capacity(q);
        for j in 1..=q {
            layer.push(labels.len());
            labels.push(format!("u{}_{j}", i + 1));
        }
        labeling.push(layer);
    }
    let params = QBParams { layers: layers.to_vec(), labeling };
    let n = labels.len();
    let g = Multigraph::from_matrix(labels, expected_matrix(&params, n))?;
    Ok((g, params))
}

/// Recovers quasi-banana parameters by peeling layers from every candidate root.
/// Returns the lexicographically smallest valid parametrization.
pub fn recognize_qb(g: &Multigraph) -> Option<QBParams> {
    if !g.is_connected() {
        return None;
    }
    (0..g.vertex_count()).filter_map(|root| peel(g, root)).min()
}

fn peel(g: &Multigraph, root: usize) -> Option<QBParams> {
    let n = g.vertex_count();
    let mut assigned = vec![false; n];
    assigned[root] = true;
    let mut labeling = vec![vec![root]];
    let mut layers = Vec::new();
    let mut hub = root;
    loop {
        let next: Vec<usize> = g.neighbors(hub).iter().map(|&(w, _)| w).filter(|&w| !assigned[w]).collect();
        if next.is_empty() {
            break;
        }
        for &w in &next {
            assigned[w] = true;
        }
        let outward: Vec<usize> =
            next.iter().copied().filter(|&w| g.neighbors(w).iter().any(|&(x, _)| !assigned[x])).collect();
        if outward.len() > 1 {
            return None;
        }
        let mut order: Vec<usize> = outward.clone();
        order.extend(next.iter().copied().filter(|w| !outward.contains(w)));
        layers.push(next.len());
        labeling.push(order);
        match outward.first() {
            Some(&h) => hub = h,
            None => break,
        }
    }
    let params = QBParams { layers, labeling };
    params.matches(g).then_some(params)
}

/// `u_{0,1} + sum of all vertices`, of degree `|V| + 1 = k + 1`.
pub fn qb_second_gonality_divisor(g: &Multigraph, params: &QBParams) -> Result<Divisor> {
    if !params.matches(g) {
        return Err(Error::LabelingMismatch);
    }
    Ok(Divisor::all_ones(g).plus(params.root(), 1))
}

/// `u_{0,1} + sum(C_0..C_K) ~ (q_1 + ... + q_L + 2) u_{L,j} + sum(C_{L+1}..C_K)`.
pub fn qb_equivalences_check(g: &Multigraph, params: &QBParams, big_l: usize, big_k: usize, j: usize) -> Result<bool> {
    if !params.matches(g) {
        return Err(Error::LabelingMismatch);
    }
    if big_l < 1 || big_l > big_k || big_k > params.m() {
        return Err(Error::IndexOutOfRange(format!("need 1 <= L <= K <= m, got L={big_l}, K={big_k}, m={}", params.m())));
    }
    let target = params.vertex(big_l, j)?;
    let mut lhs = Divisor::unit(g, params.root());
    for w in params.layer_vertices(0, big_k) {
        lhs = lhs.plus(w, 1);
    }
    let mut rhs = Divisor::zero(g).plus(target, params.cumulative(big_l) + 2);
    if big_l < big_k {
        for w in params.layer_vertices(big_l + 1, big_k) {
            rhs = rhs.plus(w, 1);
        }
    }
    equivalent(g, &lhs, &rhs)
}

/// `gon_r` of a quasi-banana graph with first gonality `k`: `l(k+1) - h` with
/// `r = l(l+3)/2 - h`, `1 <= l <= k-2`, `0 <= h <= l` when `r < g`, else `g + r`.
pub fn predicted_gonality(k: i64, r: i64) -> Option<i64> {
    let g = k * (k - 1) / 2;
    if r < 1 {
        return None;
    }
    if r >= g {
        return Some(g + r);
    }
    for l in 1..=(k - 2) {
        for h in 0..=l {
            if l * (l + 3) / 2 - h == r {
                return Some(l * (k + 1) - h);
            }
        }
    }
    None
}
