//! Budgeted checks of the quasi-banana gonality formulas.

use rayon::prelude::*;
use serde::Serialize;

use super::{build_qb, predicted_gonality, qb_second_gonality_divisor, recognize_qb, QBParams};
use crate::chipfire::{canonical_divisor, equivalent, Divisor};
use crate::error::{Error, Result};
use crate::multigraph::Multigraph;
use crate::ranks::{all_of_degree, gonality_from, RankEngine};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TheoremBOptions {
    /// Largest `r < g` whose gonality is searched.
    pub depth: i64,
    /// Ranks computed by recursion for the powers of `D`; degrees at or above `2g - 2` are always closed form.
    pub rank_budget: i64,
}

impl Default for TheoremBOptions {
    fn default() -> Self {
        TheoremBOptions { depth: 5, rank_budget: 12 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SequenceCheck {
    pub r: i64,
    pub expected: i64,
    pub actual: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UniquenessCheck {
    pub skipped: bool,
    /// Reduced effective rank-2 divisors of degree `k + 1`.
    pub candidates: usize,
    pub all_equivalent: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PowerCheck {
    pub l: i64,
    pub expected: i64,
    /// `None` when the rank exceeds the recursion budget.
    pub actual: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TheoremBReport {
    pub params: QBParams,
    pub k: i64,
    pub genus: i64,
    pub genus_ok: bool,
    pub sequence: Vec<SequenceCheck>,
    pub sequence_ok: bool,
    pub uniqueness: UniquenessCheck,
    pub uniqueness_ok: bool,
    pub powers: Vec<PowerCheck>,
    pub canonical_ok: bool,
    pub powers_ok: bool,
}

impl TheoremBReport {
    pub fn passes(&self) -> bool {
        self.genus_ok && self.sequence_ok && self.uniqueness_ok && self.canonical_ok && self.powers_ok
    }
}

fn choose2(k: i64) -> i64 {
    k * (k - 1) / 2
}

/// Whether `engine` can settle a rank of `expected` on a divisor of `degree` within `budget`.
fn affordable(engine: &RankEngine<'_>, degree: i64, expected: i64, budget: i64) -> bool {
    degree < 0 || degree >= 2 * engine.genus() - 2 || expected <= budget
}

pub fn verify_theorem_b(g: &Multigraph, opts: TheoremBOptions) -> Result<TheoremBReport> {
    let params = recognize_qb(g).ok_or(Error::NotQuasiBanana)?;
    let k = params.k();
    let genus = g.genus()?;
    let expected_genus = choose2(k);
    let engine = RankEngine::with_default_strategy(g)?;

    let mut indices: Vec<i64> = (1..=opts.depth.min(expected_genus - 1)).collect();
    let top = expected_genus.max(1);
    indices.extend([top, top + 1]);
    let mut sequence = Vec::with_capacity(indices.len());
    let mut floor = 1;
    for r in indices {
        let expected = predicted_gonality(k, r).unwrap_or(-1);
        let w = gonality_from(&engine, r, floor, None)?;
        floor = w.degree + 1;
        sequence.push(SequenceCheck { r, expected, actual: w.degree });
    }
    let sequence_ok = sequence.iter().all(|s| s.expected == s.actual);

    let d = qb_second_gonality_divisor(g, &params)?;
    let uniqueness = if k == 2 {
        UniquenessCheck { skipped: true, candidates: 0, all_equivalent: true }
    } else {
        let target = engine.reduced(&d)?;
        let found = all_of_degree(&engine, k + 1, 2);
        UniquenessCheck { skipped: false, candidates: found.len(), all_equivalent: found.iter().all(|c| *c == target) }
    };
    let uniqueness_ok = uniqueness.skipped || (uniqueness.candidates == 1 && uniqueness.all_equivalent);

    let powers: Vec<PowerCheck> = (-1..=k)
        .into_par_iter()
        .map(|l| {
            let expected = l * (l + 3) / 2;
            let ld = d.scaled(l);
            let actual = if affordable(&engine, ld.degree(), expected, opts.rank_budget) {
                engine.rank(&ld).ok()
            } else {
                None
            };
            PowerCheck { l, expected, actual }
        })
        .collect();
    let powers_ok = powers.iter().all(|p| p.actual.is_none_or(|a| a == p.expected));
    let canonical_ok = equivalent(g, &d.scaled(k - 2), &canonical_divisor(g))?;

    Ok(TheoremBReport {
        params,
        k,
        genus,
        genus_ok: genus == expected_genus,
        sequence,
        sequence_ok,
        uniqueness,
        uniqueness_ok,
        powers,
        canonical_ok,
        powers_ok,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AttachOptions {
    /// Largest rank settled by recursion; larger ones come from the mirrored multiple.
    pub rank_budget: i64,
}

impl Default for AttachOptions {
    fn default() -> Self {
        AttachOptions { rank_budget: 12 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RankEvidence {
    Direct,
    /// `r(lE) = deg(lE) - g + 1 + r((k+n-2-l)E)`, using `K ~ (k+n-2)E`.
    Mirror,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AttachRank {
    pub vertex: String,
    pub l: i64,
    pub bound: i64,
    pub rank: Option<i64>,
    pub evidence: RankEvidence,
}

#[derive(Debug, Clone, Serialize)]
pub struct AttachReport {
    pub genus: i64,
    pub genus_ok: bool,
    /// Attached vertices `u` with `(k+n-2)(k+n+1)u ~ K`.
    pub canonical: Vec<(String, bool)>,
    pub canonical_ok: bool,
    pub ranks: Vec<AttachRank>,
    pub ranks_ok: bool,
    #[serde(skip)]
    pub graph: Multigraph,
}

impl AttachReport {
    pub fn passes(&self) -> bool {
        self.genus_ok && self.canonical_ok && self.ranks_ok
    }
}

/// Verifies the hypotheses on `gp`, attaches `K_n` at `v` with `k + 1` edges per new vertex,
/// and checks genus, the canonical class, and the rank bounds on multiples of `(k+n+1)u`.
pub fn verify_attach_lemma(gp: &Multigraph, v: &str, n: usize, k: i64, opts: AttachOptions) -> Result<AttachReport> {
    let vi = gp.vertex(v)?;
    if k < 0 || n == 0 {
        return Err(Error::HypothesisFailed("k >= 0 and n >= 1".into()));
    }
    if gp.genus()? != choose2(k) {
        return Err(Error::HypothesisFailed(format!("genus(G') = C({k}, 2)")));
    }
    let base = RankEngine::with_default_strategy(gp)?;
    for l in 1..=(k - 2) {
        let d = Divisor::unit(gp, vi).scaled(l * (k + 1));
        if !base.rank_at_least(&d, l * (l + 3) / 2)? {
            return Err(Error::HypothesisFailed(format!("rank({}(k+1)v) >= {} on G'", l, l * (l + 3) / 2)));
        }
    }

    let g = gp.attach_complete(v, n, k as u32)?;
    let big = k + n as i64;
    let genus = g.genus()?;
    let engine = RankEngine::with_default_strategy(&g)?;
    let attached: Vec<usize> = (gp.vertex_count()..g.vertex_count()).collect();
    let kg = canonical_divisor(&g);
    let mut canonical = Vec::new();
    for &u in &attached {
        let holds = equivalent(&g, &Divisor::unit(&g, u).scaled((big - 2) * (big + 1)), &kg)?;
        canonical.push((g.label(u).to_string(), holds));
    }
    let canonical_ok = canonical.iter().all(|(_, h)| *h);

    let jobs: Vec<(usize, i64)> = attached.iter().flat_map(|&u| (-2..=big).map(move |l| (u, l))).collect();
    let ranks: Vec<AttachRank> = jobs
        .into_par_iter()
        .map(|(u, l)| {
            let e = Divisor::unit(&g, u).scaled(big + 1);
            let bound = l * (l + 3) / 2;
            let ld = e.scaled(l);
            let (rank, evidence) = if affordable(&engine, ld.degree(), bound, opts.rank_budget) {
                (engine.rank(&ld).ok(), RankEvidence::Direct)
            } else {
                let mirror = big - 2 - l;
                let md = e.scaled(mirror);
                let mbound = (mirror * (mirror + 3) / 2).max(-1);
                if canonical_ok && affordable(&engine, md.degree(), mbound, opts.rank_budget) {
                    let r = engine.rank(&md).ok().map(|m| ld.degree() - genus + 1 + m);
                    (r, RankEvidence::Mirror)
                } else {
                    (None, RankEvidence::Skipped)
                }
            };
            AttachRank { vertex: g.label(u).to_string(), l, bound, rank, evidence }
        })
        .collect();
    let ranks_ok = ranks.iter().all(|r| r.rank.is_none_or(|x| x >= r.bound));

    Ok(AttachReport { genus, genus_ok: genus == choose2(big), canonical, canonical_ok, ranks, ranks_ok, graph: g })
}

/// Builds `QB_m(N)` and verifies it.
pub fn verify_built(layers: &[usize], opts: TheoremBOptions) -> Result<TheoremBReport> {
    let (g, _) = build_qb(layers)?;
    verify_theorem_b(&g, opts)
}
