use std::sync::Arc;

use dashmap::DashMap;

use super::strategy::{default_strategy, RankContext, RankStrategy};
use crate::chipfire::{canonical_divisor, reduce_in_place, Divisor};
use crate::error::Result;
use crate::multigraph::Multigraph;

/// Base vertex for every reduced representative the engine handles.
pub const BASE: usize = 0;

/// Baker–Norine rank with a shared memo keyed by reduced representatives at [`BASE`].
///
/// The memo stores an interval `[lo, hi]` known to contain the rank of each class,
/// and is safe to share across rayon workers.
pub struct RankEngine<'g> {
    graph: &'g Multigraph,
    strategy: Arc<dyn RankStrategy>,
    genus: i64,
    canonical: Vec<i64>,
    memo: DashMap<Box<[i64]>, (i64, i64)>,
}

impl<'g> RankEngine<'g> {
    pub fn new(graph: &'g Multigraph, strategy: Arc<dyn RankStrategy>) -> Result<Self> {
        let genus = graph.genus()?;
        let mut canonical = canonical_divisor(graph).into_chips();
        reduce_in_place(graph, &mut canonical, BASE);
        Ok(RankEngine { graph, strategy, genus, canonical, memo: DashMap::new() })
    }

    pub fn with_default_strategy(graph: &'g Multigraph) -> Result<Self> {
        Self::new(graph, default_strategy())
    }

    pub fn graph(&self) -> &'g Multigraph {
        self.graph
    }

    pub fn genus(&self) -> i64 {
        self.genus
    }

    pub fn strategy(&self) -> &dyn RankStrategy {
        self.strategy.as_ref()
    }

    pub fn memo_size(&self) -> usize {
        self.memo.len()
    }

    /// Reduced representative at [`BASE`].
    pub fn reduced(&self, d: &Divisor) -> Result<Vec<i64>> {
        d.ensure_on(self.graph)?;
        let mut chips = d.chips().to_vec();
        reduce_in_place(self.graph, &mut chips, BASE);
        Ok(chips)
    }

    pub fn rank(&self, d: &Divisor) -> Result<i64> {
        let chips = self.reduced(d)?;
        Ok(self.rank_of_reduced(&chips))
    }

    pub fn rank_at_least(&self, d: &Divisor, r: i64) -> Result<bool> {
        let chips = self.reduced(d)?;
        Ok(self.reduced_at_least(&chips, r))
    }

    pub fn is_winnable(&self, d: &Divisor) -> Result<bool> {
        Ok(self.reduced(d)?[BASE] >= 0)
    }

    /// Rank of a divisor already reduced at [`BASE`].
    pub fn rank_of_reduced(&self, chips: &[i64]) -> i64 {
        if chips[BASE] < 0 {
            return -1;
        }
        let degree: i64 = chips.iter().sum();
        if let Some(r) = self.strategy.shortcut(&self.ctx(), chips, degree) {
            return r;
        }
        let mut r = 0;
        while r < degree && self.reduced_at_least(chips, r + 1) {
            r += 1;
        }
        r
    }

    fn ctx(&self) -> RankContext<'_> {
        RankContext { genus: self.genus, canonical: &self.canonical }
    }

    /// `rank >= r` for a divisor already reduced at [`BASE`].
    pub fn reduced_at_least(&self, chips: &[i64], r: i64) -> bool {
        if r < 0 {
            return true;
        }
        if chips[BASE] < 0 {
            return false;
        }
        if r == 0 {
            return true;
        }
        let degree: i64 = chips.iter().sum();
        if degree < r {
            return false;
        }
        if let Some(exact) = self.strategy.shortcut(&self.ctx(), chips, degree) {
            return exact >= r;
        }
        if let Some(entry) = self.memo.get(chips) {
            let (lo, hi) = *entry;
            if lo >= r {
                return true;
            }
            if hi < r {
                return false;
            }
        }
        let answer = self.recurse(chips, r);
        let mut entry = self.memo.entry(chips.into()).or_insert((0, degree));
        if answer {
            entry.0 = entry.0.max(r);
        } else {
            entry.1 = entry.1.min(r - 1);
        }
        answer
    }

    fn recurse(&self, chips: &[i64], r: i64) -> bool {
        let n = chips.len();
        // chipless vertices first: removing their chip forces a re-reduction and is the likeliest failure
        let order = (0..n).filter(|&v| v != BASE && chips[v] == 0).chain((0..n).filter(|&v| v == BASE || chips[v] > 0));
        let mut child = chips.to_vec();
        for v in order {
            child.copy_from_slice(chips);
            child[v] -= 1;
            // a reduced divisor stays reduced when a chip is removed at the base or at a chip-holding vertex
            if v != BASE && chips[v] == 0 {
                reduce_in_place(self.graph, &mut child, BASE);
            }
            if !self.reduced_at_least(&child, r - 1) {
                return false;
            }
        }
        true
    }
}
