use rayon::prelude::*;
use serde::Serialize;

use super::candidates::CandidateIter;
use super::engine::{RankEngine, BASE};
use crate::chipfire::{is_reduced_chips, Divisor};
use crate::error::{Error, Result};

/// Candidates handed to the worker pool at once. Chunks are scanned in order,
/// so the first hit is the lexicographically smallest one.
const CHUNK: usize = 2048;

/// A divisor certifying one entry of a gonality sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GonalityWitness {
    pub r: i64,
    pub degree: i64,
    pub divisor: Divisor,
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GonalitySequence {
    pub entries: Vec<GonalityWitness>,
}

impl GonalitySequence {
    pub fn values(&self) -> Vec<i64> {
        self.entries.iter().map(|w| w.degree).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tightness {
    pub tight: bool,
    pub first: GonalityWitness,
    pub second: GonalityWitness,
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessJson {
    pub r: i64,
    pub degree: i64,
    pub divisor: std::collections::BTreeMap<String, i64>,
    pub verified: bool,
}

impl GonalityWitness {
    pub fn to_json(&self, g: &crate::multigraph::Multigraph) -> WitnessJson {
        WitnessJson { r: self.r, degree: self.degree, divisor: self.divisor.to_label_map(g), verified: self.verified }
    }
}

/// First rank-`>= r` effective reduced divisor of exactly `degree`, lexicographically.
pub fn first_of_degree(engine: &RankEngine<'_>, degree: i64, r: i64) -> Option<Vec<i64>> {
    let g = engine.graph();
    let mut candidates = CandidateIter::new(g, degree);
    loop {
        let chunk: Vec<Vec<i64>> = candidates.by_ref().take(CHUNK).collect();
        if chunk.is_empty() {
            return None;
        }
        let hit = chunk.par_iter().find_first(|c| is_reduced_chips(g, c, BASE) && engine.reduced_at_least(c, r));
        if let Some(c) = hit {
            return Some(c.clone());
        }
    }
}

/// Every effective reduced divisor of `degree` with rank `>= r`, lexicographically.
pub fn all_of_degree(engine: &RankEngine<'_>, degree: i64, r: i64) -> Vec<Vec<i64>> {
    let g = engine.graph();
    let mut out = Vec::new();
    let mut candidates = CandidateIter::new(g, degree);
    loop {
        let chunk: Vec<Vec<i64>> = candidates.by_ref().take(CHUNK).collect();
        if chunk.is_empty() {
            return out;
        }
        let hits: Vec<Vec<i64>> = chunk
            .into_par_iter()
            .filter(|c| is_reduced_chips(g, c, BASE) && engine.reduced_at_least(c, r))
            .collect();
        out.extend(hits);
    }
}

/// `gon_r`, searching degrees from `floor` up to `max_degree` (default `g + r`).
pub fn gonality_from(engine: &RankEngine<'_>, r: i64, floor: i64, max_degree: Option<i64>) -> Result<GonalityWitness> {
    if r < 1 {
        return Err(Error::InvalidArgument(format!("gonality index must be >= 1, got {r}")));
    }
    let g = engine.graph();
    let genus = engine.genus();
    let max_degree = max_degree.unwrap_or(genus + r);
    for degree in floor.max(r)..=max_degree {
        if engine.strategy().degree_ceiling(genus, degree) < r {
            continue;
        }
        if let Some(chips) = first_of_degree(engine, degree, r) {
            let exact = engine.rank_of_reduced(&chips);
            let divisor = Divisor::from_chips(g, chips)?;
            return Ok(GonalityWitness { r, degree, verified: exact == r, divisor });
        }
    }
    Err(Error::BudgetExceeded { rank: r, max_degree })
}

pub fn gonality(engine: &RankEngine<'_>, r: i64, max_degree: Option<i64>) -> Result<GonalityWitness> {
    gonality_from(engine, r, 1, max_degree)
}

/// `gon_1, ..., gon_up_to`, each search starting one above the previous value.
pub fn gonality_sequence(engine: &RankEngine<'_>, up_to: i64) -> Result<GonalitySequence> {
    if up_to < 1 {
        return Err(Error::InvalidArgument(format!("up_to must be >= 1, got {up_to}")));
    }
    let mut entries: Vec<GonalityWitness> = Vec::with_capacity(up_to as usize);
    for r in 1..=up_to {
        let floor = entries.last().map_or(1, |w| w.degree + 1);
        entries.push(gonality_from(engine, r, floor, None)?);
    }
    Ok(GonalitySequence { entries })
}

/// `gon_2 == gon_1 + 1`, with both witnesses.
pub fn is_gonality_tight(engine: &RankEngine<'_>) -> Result<Tightness> {
    let first = gonality_from(engine, 1, 1, None)?;
    let second = gonality_from(engine, 2, first.degree + 1, None)?;
    Ok(Tightness { tight: second.degree == first.degree + 1, first, second })
}
