//! Baker–Norine rank, gonality and gonality sequences.

mod candidates;
mod engine;
mod gonality;
pub mod strategy;

use std::sync::Arc;

pub use candidates::{reduced_effective, CandidateIter};
pub use engine::{RankEngine, BASE};
pub use gonality::{
    all_of_degree, first_of_degree, gonality, gonality_from, gonality_sequence, is_gonality_tight, GonalitySequence,
    GonalityWitness, Tightness, WitnessJson,
};
pub use strategy::{RankStrategy, StrategyRegistry};

use crate::chipfire::{canonical_divisor, Divisor};
use crate::error::Result;
use crate::multigraph::Multigraph;

/// Rank with the default strategy.
pub fn rank(g: &Multigraph, d: &Divisor) -> Result<i64> {
    RankEngine::with_default_strategy(g)?.rank(d)
}

/// `r(D) - r(K - D) = deg(D) - g + 1`, both ranks by plain recursion.
pub fn riemann_roch_check(g: &Multigraph, d: &Divisor) -> Result<bool> {
    let engine = RankEngine::new(g, Arc::new(strategy::Definitional))?;
    riemann_roch_check_with(&engine, d)
}

pub fn riemann_roch_check_with(engine: &RankEngine<'_>, d: &Divisor) -> Result<bool> {
    let g = engine.graph();
    let k_minus_d = canonical_divisor(g).checked_sub(d)?;
    let lhs = engine.rank(d)? - engine.rank(&k_minus_d)?;
    Ok(lhs == d.degree() - engine.genus() + 1)
}
