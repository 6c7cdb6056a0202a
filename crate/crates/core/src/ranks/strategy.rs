//! Interchangeable rank evaluation strategies, looked up by name.
//!
//! Every strategy answers the same question (the Baker–Norine rank); they
//! differ in which closed-form shortcuts they allow before falling back to
//! the memoised recursion in [`super::RankEngine`].

use std::fmt;
use std::sync::Arc;

/// What a strategy may inspect when deciding a shortcut.
pub struct RankContext<'a> {
    pub genus: i64,
    /// Reduced canonical divisor at the engine's base vertex.
    pub canonical: &'a [i64],
}

pub trait RankStrategy: Send + Sync {
    fn name(&self) -> &'static str;

    fn description(&self) -> &'static str;

    /// Exact rank of a winnable reduced divisor if it follows without search.
    fn shortcut(&self, ctx: &RankContext<'_>, reduced: &[i64], degree: i64) -> Option<i64>;

    /// Upper bound on the rank of any divisor of `degree` on a genus-`genus` graph.
    fn degree_ceiling(&self, genus: i64, degree: i64) -> i64;
}

impl fmt::Debug for dyn RankStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Pure recursion: `rank(D) >= r` iff `rank(D - v) >= r - 1` for all `v`.
#[derive(Debug, Default)]
pub struct Definitional;

impl RankStrategy for Definitional {
    fn name(&self) -> &'static str {
        "definitional"
    }

    fn description(&self) -> &'static str {
        "memoised recursion over reduced representatives, no closed forms"
    }

    fn shortcut(&self, _ctx: &RankContext<'_>, _reduced: &[i64], _degree: i64) -> Option<i64> {
        None
    }

    fn degree_ceiling(&self, _genus: i64, degree: i64) -> i64 {
        if degree < 0 {
            -1
        } else {
            degree
        }
    }
}

/// Recursion plus the Riemann–Roch closed forms for degrees `>= 2g - 2`.
#[derive(Debug, Default)]
pub struct RiemannRoch;

impl RankStrategy for RiemannRoch {
    fn name(&self) -> &'static str {
        "riemann-roch"
    }

    fn description(&self) -> &'static str {
        "closed forms for deg >= 2g-2 (non-special range and canonical degree), recursion below"
    }

    fn shortcut(&self, ctx: &RankContext<'_>, reduced: &[i64], degree: i64) -> Option<i64> {
        let g = ctx.genus;
        if degree >= 2 * g - 1 {
            Some(degree - g)
        } else if degree == 2 * g - 2 {
            Some(if reduced == ctx.canonical { g - 1 } else { g - 2 })
        } else {
            None
        }
    }

    fn degree_ceiling(&self, genus: i64, degree: i64) -> i64 {
        if degree < 0 {
            -1
        } else if degree >= 2 * genus - 1 {
            degree - genus
        } else {
            // r(D) = d - g + 1 + r(K - D) and r(K - D) <= 2g - 2 - d
            degree.min(genus - 1)
        }
    }
}

pub const DEFAULT_STRATEGY: &str = "riemann-roch";

/// Name-indexed set of rank strategies.
pub struct StrategyRegistry {
    entries: Vec<Arc<dyn RankStrategy>>,
}

impl StrategyRegistry {
    pub fn empty() -> Self {
        StrategyRegistry { entries: Vec::new() }
    }

    /// Registry holding the built-in strategies.
    pub fn builtin() -> Self {
        let mut reg = StrategyRegistry::empty();
        reg.register(Arc::new(RiemannRoch));
        reg.register(Arc::new(Definitional));
        reg
    }

    /// Adds a strategy, replacing any existing one with the same name.
    pub fn register(&mut self, strategy: Arc<dyn RankStrategy>) {
        self.entries.retain(|s| s.name() != strategy.name());
        self.entries.push(strategy);
    }

    pub fn get(&self, name: &str) -> Option<Arc<dyn RankStrategy>> {
        self.entries.iter().find(|s| s.name() == name).cloned()
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|s| s.name()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Arc<dyn RankStrategy>> {
        self.entries.iter()
    }
}

/// Looks a strategy up in the built-in registry.
pub fn strategy(name: &str) -> Option<Arc<dyn RankStrategy>> {
    StrategyRegistry::builtin().get(name)
}

pub fn default_strategy() -> Arc<dyn RankStrategy> {
    Arc::new(RiemannRoch)
}
