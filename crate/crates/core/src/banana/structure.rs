//! Local structure forced by a rank-2 divisor of the form `(k+1)v + sum(G')`.

use serde::Serialize;

use crate::chipfire::{is_reduced, reduce, Divisor};
use crate::error::{Error, Result};
use crate::multigraph::Multigraph;
use crate::ranks::{gonality, RankEngine};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    Vacuous,
}

impl Outcome {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }

    pub fn holds(self) -> bool {
        self != Outcome::Fail
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    pub gon2: i64,
    /// Neighbours of `v` inside `G'`.
    pub neighbors: Vec<String>,
    pub separating_vertex: Option<String>,
    pub edges_to_v: Outcome,
    pub neighbors_pairwise: Outcome,
    pub unique_separator: Outcome,
    pub reduced_form: Outcome,
}

impl StructureReport {
    pub fn all_hold(&self) -> bool {
        [self.edges_to_v, self.neighbors_pairwise, self.unique_separator, self.reduced_form].iter().all(|o| o.holds())
    }
}

fn hypothesis(ok: bool, name: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::HypothesisFailed(name.to_string()))
    }
}

/// Checks the hypotheses first, then the four conclusions about `N`, the neighbours of `v` in `G'`.
pub fn structure_lemma_check(g: &Multigraph, v: usize, gp: &[usize], k: i64) -> Result<StructureReport> {
    let n_all = g.vertex_count();
    hypothesis(g.is_connected(), "G is connected")?;
    hypothesis(v < n_all && k >= 1, "v is a vertex and k >= 1")?;
    let mut in_gp = vec![false; n_all];
    for &w in gp {
        hypothesis(w < n_all && w != v && !in_gp[w], "G' is a set of vertices other than v")?;
        in_gp[w] = true;
    }
    hypothesis(!gp.is_empty(), "G' is nonempty")?;
    let separated = g.edges().all(|(a, b, _)| a == v || b == v || in_gp[a] == in_gp[b]);
    hypothesis(separated, "removing v separates G' from the rest")?;

    let mut d2 = Divisor::unit(g, v).scaled(k + 1);
    for &w in gp {
        d2 = d2.plus(w, 1);
    }
    hypothesis(is_reduced(g, &d2, v)?, "D_2 is v-reduced")?;
    let engine = RankEngine::with_default_strategy(g)?;
    let gon2 = gonality(&engine, 2, Some(d2.degree()))
        .map_err(|_| Error::HypothesisFailed("D_2 realises gon_2".into()))?
        .degree;
    hypothesis(gon2 == d2.degree() && engine.rank_at_least(&d2, 2)?, "D_2 realises gon_2")?;

    let nbrs: Vec<usize> = (0..n_all).filter(|&w| in_gp[w] && g.mult(v, w) > 0).collect();
    let n = nbrs.len() as i64;
    let edges_to_v = Outcome::from_bool(nbrs.iter().all(|&w| g.mult(v, w) as i64 == k + 1));
    let neighbors_pairwise = if nbrs.len() < 2 {
        Outcome::Vacuous
    } else {
        Outcome::from_bool(nbrs.iter().enumerate().all(|(i, &a)| nbrs[i + 1..].iter().all(|&b| g.mult(a, b) == 1)))
    };

    let far: Vec<usize> = (0..n_all).filter(|&w| in_gp[w] && !nbrs.contains(&w)).collect();
    let (unique_separator, separator, reduced_form) = if far.is_empty() {
        (Outcome::Vacuous, None, Outcome::Vacuous)
    } else {
        let cuts: Vec<usize> = nbrs
            .iter()
            .copied()
            .filter(|&u| {
                let reach = g.reachable_from(v, Some(u));
                far.iter().all(|&w| !reach[w])
            })
            .collect();
        if cuts.len() == 1 {
            let u = cuts[0];
            let mut target = Divisor::unit(g, u).scaled(k + n + 1);
            for &w in &far {
                target = target.plus(w, 1);
            }
            let (reduced, _) = reduce(g, &d2, u)?;
            (Outcome::Pass, Some(u), Outcome::from_bool(reduced == target))
        } else {
            (Outcome::Fail, None, Outcome::Fail)
        }
    };

    Ok(StructureReport {
        gon2,
        neighbors: nbrs.iter().map(|&w| g.label(w).to_string()).collect(),
        separating_vertex: separator.map(|u| g.label(u).to_string()),
        edges_to_v,
        neighbors_pairwise,
        unique_separator,
        reduced_form,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::banana::build_qb;

    #[test]
    fn qb_2_1_2_from_root() {
        let (g, p) = build_qb(&[1, 2]).unwrap();
        let gp: Vec<usize> = (0..g.vertex_count()).filter(|&w| w != p.root()).collect();
        let r = structure_lemma_check(&g, p.root(), &gp, 1).unwrap();
        assert_eq!(r.edges_to_v, Outcome::Pass);
        assert_eq!(r.neighbors_pairwise, Outcome::Vacuous);
        assert_eq!(r.unique_separator, Outcome::Pass);
        assert_eq!(r.reduced_form, Outcome::Pass);
        assert_eq!(r.separating_vertex.as_deref(), Some("u1_1"));
        assert_eq!(r.gon2, 5);
    }

    #[test]
    fn qb_1_3_has_nothing_beyond_neighbours() {
        let (g, p) = build_qb(&[3]).unwrap();
        let gp: Vec<usize> = (1..4).collect();
        let r = structure_lemma_check(&g, p.root(), &gp, 1).unwrap();
        assert_eq!(r.edges_to_v, Outcome::Pass);
        assert_eq!(r.neighbors_pairwise, Outcome::Pass);
        assert_eq!(r.unique_separator, Outcome::Vacuous);
        assert!(r.all_hold());
    }

    #[test]
    fn hypothesis_guard() {
        // with k = 2 the divisor has degree 6 > gon_2 = 5
        let (g, p) = build_qb(&[3]).unwrap();
        let gp: Vec<usize> = (1..4).collect();
        assert!(matches!(structure_lemma_check(&g, p.root(), &gp, 2), Err(Error::HypothesisFailed(_))));
        assert!(matches!(structure_lemma_check(&g, p.root(), &[p.root()], 1), Err(Error::HypothesisFailed(_))));
    }
}
