//! Exhaustive search over small multigraphs for gonality-tight examples.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::banana::{predicted_gonality, qb_second_gonality_divisor, recognize_qb};
use crate::chipfire::{canonical_divisor, equivalent, Divisor};
use crate::error::{Error, Result};
use crate::multigraph::Multigraph;
use crate::ranks::{all_of_degree, gonality_from, is_gonality_tight, RankEngine};

/// Largest vertex count the brute-force canonical code accepts.
pub const MAX_SEARCH_VERTICES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchSpec {
    pub max_vertices: usize,
    pub max_multiplicity: u32,
    pub max_edges: u64,
    /// Largest `r < g` whose gonality is searched, and the largest rank settled by recursion.
    pub rank_budget: i64,
}

impl Default for SearchSpec {
    fn default() -> Self {
        SearchSpec { max_vertices: 4, max_multiplicity: 4, max_edges: 8, rank_budget: 5 }
    }
}

impl SearchSpec {
    fn check(&self) -> Result<()> {
        if self.max_vertices > MAX_SEARCH_VERTICES {
            return Err(Error::TooLarge { vertices: self.max_vertices, bound: MAX_SEARCH_VERTICES });
        }
        Ok(())
    }
}

pub fn hex_code(g: &Multigraph) -> Result<String> {
    Ok(g.canonical_code()?.iter().map(|b| format!("{b:02x}")).collect())
}

/// Every connected multigraph within `spec`, once per isomorphism class, ordered by
/// vertex count and then canonical code.
pub fn enumerate_multigraphs(spec: &SearchSpec) -> Result<Vec<Multigraph>> {
    spec.check()?;
    let mut out = Vec::new();
    for n in 1..=spec.max_vertices {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let mut classes: BTreeMap<Vec<u8>, Multigraph> = BTreeMap::new();
        let mut mults = vec![0u32; pairs.len()];
        assign(spec, n, &pairs, &mut mults, 0, 0, &mut classes)?;
        out.extend(classes.into_values());
    }
    Ok(out)
}

fn assign(
    spec: &SearchSpec,
    n: usize,
    pairs: &[(usize, usize)],
    mults: &mut [u32],
    at: usize,
    used: u64,
    classes: &mut BTreeMap<Vec<u8>, Multigraph>,
) -> Result<()> {
    if at == pairs.len() {
        if used + 1 < n as u64 {
            return Ok(());
        }
        let edges: Vec<(usize, usize, u32)> =
            pairs.iter().zip(mults.iter()).filter(|(_, &m)| m > 0).map(|(&(a, b), &m)| (a, b, m)).collect();
        let g = Multigraph::from_index_edges(n, &edges)?;
        if g.is_connected() {
            let code = g.canonical_code()?;
            classes.entry(code).or_insert(g);
        }
        return Ok(());
    }
    for m in 0..=spec.max_multiplicity {
        if used + m as u64 > spec.max_edges {
            break;
        }
        mults[at] = m;
        assign(spec, n, pairs, mults, at + 1, used + m as u64, classes)?;
    }
    mults[at] = 0;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum TightOutcome {
    Tight { gon1: i64, gon2: i64 },
    NotTight { gon1: i64, gon2: i64 },
    BudgetExceeded { message: String },
}

#[derive(Debug, Clone)]
pub struct SurveyEntry {
    pub graph: Multigraph,
    pub outcome: TightOutcome,
}

fn tightness(g: &Multigraph) -> TightOutcome {
    let engine = match RankEngine::with_default_strategy(g) {
        Ok(e) => e,
        Err(e) => return TightOutcome::BudgetExceeded { message: e.to_string() },
    };
    match is_gonality_tight(&engine) {
        Ok(t) if t.tight => TightOutcome::Tight { gon1: t.first.degree, gon2: t.second.degree },
        Ok(t) => TightOutcome::NotTight { gon1: t.first.degree, gon2: t.second.degree },
        Err(e) => TightOutcome::BudgetExceeded { message: e.to_string() },
    }
}

/// Tightness of every enumerated graph, in enumeration order.
pub fn survey(spec: &SearchSpec) -> Result<Vec<SurveyEntry>> {
    let graphs = enumerate_multigraphs(spec)?;
    Ok(graphs
        .into_par_iter()
        .map(|graph| {
            let outcome = tightness(&graph);
            SurveyEntry { graph, outcome }
        })
        .collect())
}

/// The gonality-tight graphs within `spec` with `(gon_1, gon_2)`.
pub fn find_gonality_tight(spec: &SearchSpec) -> Result<Vec<(Multigraph, i64, i64)>> {
    Ok(survey(spec)?
        .into_iter()
        .filter_map(|e| match e.outcome {
            TightOutcome::Tight { gon1, gon2 } => Some((e.graph, gon1, gon2)),
            _ => None,
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Verified,
    Failed,
    BudgetExceeded,
}

impl CheckStatus {
    pub fn failed(self) -> bool {
        self == CheckStatus::Failed
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SequenceEntry {
    pub r: i64,
    pub predicted: Option<i64>,
    pub actual: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConjectureReport {
    pub code: String,
    pub vertices: usize,
    pub genus: i64,
    pub gon1: i64,
    pub gon2: i64,
    pub genus_matches: bool,
    pub sequence: Vec<SequenceEntry>,
    pub gonseq_matches: CheckStatus,
    /// `(k-2) D ~ K` for the witness `D`, and every realiser of `gon_{l(l+3)/2}` equivalent to `l D`.
    pub power_relation: CheckStatus,
    pub is_qb: bool,
}

impl ConjectureReport {
    pub fn counterexample(&self) -> bool {
        !self.genus_matches || self.gonseq_matches.failed() || self.power_relation.failed()
    }
}

/// Checks the three parts of the gonality-tight conjecture on one graph.
pub fn test_conjecture(g: &Multigraph, rank_budget: i64) -> Result<ConjectureReport> {
    let engine = RankEngine::with_default_strategy(g)?;
    let tight = is_gonality_tight(&engine)?;
    if !tight.tight {
        return Err(Error::InvalidArgument("graph is not gonality-tight".into()));
    }
    let k = tight.first.degree;
    let genus = engine.genus();
    let genus_matches = genus == k * (k - 1) / 2;

    let mut indices: Vec<i64> = (1..=rank_budget.min(genus - 1)).collect();
    let top = genus.max(1);
    indices.extend([top, top + 1]);
    indices.dedup();
    let mut sequence = Vec::new();
    let mut budget_hit = false;
    let mut floor = 1;
    let mut actual_at: BTreeMap<i64, i64> = BTreeMap::new();
    for r in indices {
        let actual = match gonality_from(&engine, r, floor, None) {
            Ok(w) => {
                floor = w.degree + 1;
                actual_at.insert(r, w.degree);
                Some(w.degree)
            }
            Err(Error::BudgetExceeded { .. }) => {
                budget_hit = true;
                None
            }
            Err(e) => return Err(e),
        };
        sequence.push(SequenceEntry { r, predicted: predicted_gonality(k, r), actual });
    }
    let matches = sequence.iter().all(|s| s.actual.is_none() || s.actual == s.predicted);
    let gonseq_matches = if !matches {
        CheckStatus::Failed
    } else if budget_hit {
        CheckStatus::BudgetExceeded
    } else {
        CheckStatus::Verified
    };

    let d = tight.second.divisor.clone();
    let mut power_ok = equivalent(g, &d.scaled(k - 2), &canonical_divisor(g))?;
    let mut skipped = false;
    for l in 1..=(k - 2) {
        let r = l * (l + 3) / 2;
        if r > rank_budget {
            skipped = true;
            continue;
        }
        let degree = match actual_at.get(&r) {
            Some(&deg) => deg,
            None => gonality_from(&engine, r, 1, None)?.degree,
        };
        let target = engine.reduced(&d.scaled(l))?;
        power_ok &= all_of_degree(&engine, degree, r).iter().all(|c| *c == target);
    }
    let power_relation = if !power_ok {
        CheckStatus::Failed
    } else if skipped {
        CheckStatus::BudgetExceeded
    } else {
        CheckStatus::Verified
    };

    Ok(ConjectureReport {
        code: hex_code(g)?,
        vertices: g.vertex_count(),
        genus,
        gon1: k,
        gon2: tight.second.degree,
        genus_matches,
        sequence,
        gonseq_matches,
        power_relation,
        is_qb: recognize_qb(g).is_some(),
    })
}

/// Tight, and some `v + sum(V)` has rank 2 and degree `gon_2`.
pub fn theorem_a_condition(g: &Multigraph) -> Result<bool> {
    let engine = RankEngine::with_default_strategy(g)?;
    let t = is_gonality_tight(&engine)?;
    if !t.tight || t.second.degree != g.vertex_count() as i64 + 1 {
        return Ok(false);
    }
    let ones = Divisor::all_ones(g);
    for v in 0..g.vertex_count() {
        if engine.rank_at_least(&ones.clone().plus(v, 1), 2)? {
            return Ok(true);
        }
    }
    Ok(false)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubdivisionReport {
    pub times: usize,
    pub vertices: usize,
    pub genus: i64,
    pub gon1: i64,
    pub gon2: i64,
    pub tight: bool,
    pub divisor: BTreeMap<String, i64>,
    pub divisor_degree: i64,
    pub divisor_rank_at_least_2: bool,
    /// The transferred divisor has rank 2 and degree `gon_2`.
    pub still_realises_gon2: bool,
}

/// Subdivides a quasi-banana graph `t` times and reports what happens to its second gonality.
pub fn subdivision_study(g: &Multigraph, t: usize) -> Result<SubdivisionReport> {
    if t == 0 {
        return Err(Error::InvalidArgument("subdivision count must be >= 1".into()));
    }
    let params = recognize_qb(g).ok_or(Error::NotQuasiBanana)?;
    let d = qb_second_gonality_divisor(g, &params)?;
    let h = g.subdivide(t);
    let moved = d.transfer(g, &h)?;
    let engine = RankEngine::with_default_strategy(&h)?;
    let tight = is_gonality_tight(&engine)?;
    let rank2 = engine.rank_at_least(&moved, 2)?;
    Ok(SubdivisionReport {
        times: t,
        vertices: h.vertex_count(),
        genus: engine.genus(),
        gon1: tight.first.degree,
        gon2: tight.second.degree,
        tight: tight.tight,
        divisor: moved.to_label_map(&h),
        divisor_degree: moved.degree(),
        divisor_rank_at_least_2: rank2,
        still_realises_gon2: rank2 && moved.degree() == tight.second.degree,
    })
}

/// Canonical codes of the graphs, for duplicate checks.
pub fn distinct_codes(graphs: &[Multigraph]) -> Result<BTreeSet<Vec<u8>>> {
    graphs.iter().map(|g| g.canonical_code()).collect()
}
