//! Reduced divisors on simple complete graphs and rank obstructions from firing `v_1`.

use serde::Serialize;

use crate::chipfire::{is_reduced, is_reduced_chips, Divisor};
use crate::error::{Error, Result};
use crate::multigraph::Multigraph;
use crate::ranks::strategy::Definitional;
use crate::ranks::RankEngine;

fn require_complete(g: &Multigraph) -> Result<()> {
    let n = g.vertex_count();
    let simple = (0..n).all(|u| (0..n).all(|v| g.mult(u, v) == u32::from(u != v)));
    if simple {
        Ok(())
    } else {
        Err(Error::NotComplete)
    }
}

/// Sorted ascending, the non-base values satisfy `0 <= value_i <= i - 2` for `i = 2..n`.
pub fn staircase_holds(values: &[i64]) -> bool {
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    sorted.iter().enumerate().all(|(pos, &x)| 0 <= x && x <= pos as i64)
}

/// Staircase test of `base`-reducedness on `K_n`.
pub fn kn_reduced_characterization(g: &Multigraph, d: &Divisor, base: usize) -> Result<bool> {
    require_complete(g)?;
    d.ensure_on(g)?;
    if base >= g.vertex_count() {
        return Err(Error::IndexOutOfRange(format!("base {base}")));
    }
    let rest: Vec<i64> = (0..g.vertex_count()).filter(|&v| v != base).map(|v| d.get(v)).collect();
    Ok(staircase_holds(&rest))
}

/// `D' = D` with `v_1` fired `d` times, and an effective `E` with `D' - E` unwinnable.
///
/// Since `D' ~ D`, this gives `rank(D) < deg(E) = deficiency <= l(l+1)/2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CPWitness {
    pub d: i64,
    #[serde(skip)]
    pub d_prime: Divisor,
    #[serde(skip)]
    pub e: Divisor,
    pub deficiency: i64,
    /// `v_2, ..., v_n` in the order used for the staircase.
    pub order: Vec<usize>,
}

impl CPWitness {
    /// Re-checks the witness from scratch, the rank bound by plain recursion.
    pub fn validate(&self, g: &Multigraph, original: &Divisor, l: i64) -> Result<bool> {
        let n = g.vertex_count() as i64;
        let mut expected = original.chips().to_vec();
        expected[0] -= self.d * (n - 1);
        for x in &mut expected[1..] {
            *x += self.d;
        }
        let bound = l * (l + 1) / 2;
        let shape = self.d_prime.chips() == expected.as_slice()
            && self.e.is_effective()
            && self.e.degree() == self.deficiency
            && self.deficiency <= bound;
        if !shape {
            return Ok(false);
        }
        let engine = RankEngine::new(g, std::sync::Arc::new(Definitional))?;
        let obstruction = self.d_prime.checked_sub(&self.e)?;
        Ok(!engine.is_winnable(&obstruction)? && engine.rank(original)? < self.deficiency)
    }
}

/// Searches `d = 0, 1, ...` up to the point where `deg(E)` can only grow.
pub fn cp_witness(g: &Multigraph, d: &Divisor, l: i64) -> Result<CPWitness> {
    cp_witness_bounded(g, d, l, None)
}

pub fn cp_witness_bounded(g: &Multigraph, d: &Divisor, l: i64, bound: Option<i64>) -> Result<CPWitness> {
    require_complete(g)?;
    d.ensure_on(g)?;
    let n = g.vertex_count() as i64;
    if l < 1 || l > n - 3 {
        return Err(Error::InvalidArgument(format!("need 1 <= l <= n - 3, got l={l}, n={n}")));
    }
    if d.degree() != l * (n - 1) - 1 {
        return Err(Error::InvalidArgument(format!("degree must be l(n-1) - 1 = {}, got {}", l * (n - 1) - 1, d.degree())));
    }
    if !is_reduced(g, d, 0)? {
        return Err(Error::InvalidArgument("divisor must be v_1-reduced".into()));
    }
    let mut order: Vec<usize> = (1..n as usize).collect();
    order.sort_by_key(|&v| (d.get(v), v));
    let natural = if d.get(0) >= 0 { (d.get(0) + 1 + n - 2) / (n - 1) } else { 0 };
    let limit = bound.unwrap_or(natural);
    let target = l * (l + 1) / 2;
    for fired in 0..=limit {
        let mut dp = d.chips().to_vec();
        dp[0] -= fired * (n - 1);
        for x in &mut dp[1..] {
            *x += fired;
        }
        let mut e = vec![0i64; n as usize];
        e[0] = (dp[0] + 1).max(0);
        for (pos, &v) in order.iter().enumerate() {
            // v sits at staircase position i = pos + 2 with cap i - 2
            e[v] = (dp[v] - pos as i64).max(0);
        }
        let deficiency: i64 = e.iter().sum();
        let rest: Vec<i64> = dp.iter().zip(&e).map(|(a, b)| a - b).collect();
        if deficiency <= target && rest[0] <= -1 && is_reduced_chips(g, &rest, 0) {
            return Ok(CPWitness {
                d: fired,
                d_prime: Divisor::from_chips(g, dp)?,
                e: Divisor::from_chips(g, e)?,
                deficiency,
                order,
            });
        }
    }
    Err(Error::NoWitness(limit))
}
