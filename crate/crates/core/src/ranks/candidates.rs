//! Lexicographic enumeration of effective reduced divisors of a fixed degree.

use crate::chipfire::is_reduced_chips;
use crate::multigraph::Multigraph;

use super::engine::BASE;

/// Effective vectors of total `degree` with `0 <= x[v] <= valence(v) - 1` off the base vertex,
/// in ascending lexicographic order of the full chip vector (base entry first).
///
/// The valence cap is necessary for reducedness; callers still filter with Dhar.
pub struct CandidateIter {
    degree: i64,
    caps: Vec<i64>,
    suffix_cap: Vec<i64>,
    current: Option<Vec<i64>>,
    started: bool,
}

impl CandidateIter {
    pub fn new(g: &Multigraph, degree: i64) -> Self {
        assert_eq!(BASE, 0, "candidate order assumes base vertex 0");
        let n = g.vertex_count();
        let caps: Vec<i64> = (0..n).map(|v| if v == BASE { degree.max(0) } else { (g.valence(v) - 1).max(0) }).collect();
        let mut suffix_cap = vec![0i64; n + 1];
        for v in (0..n).rev() {
            suffix_cap[v] = suffix_cap[v + 1] + caps[v];
        }
        CandidateIter { degree, caps, suffix_cap, current: None, started: false }
    }

    /// Lexicographically smallest fill of positions `from..` summing to `total`.
    fn fill_smallest(&self, x: &mut [i64], from: usize, mut total: i64) -> bool {
        if total < 0 || total > self.suffix_cap[from] {
            return false;
        }
        for (j, slot) in x.iter_mut().enumerate().skip(from) {
            let v = (total - self.suffix_cap[j + 1]).max(0);
            *slot = v;
            total -= v;
        }
        true
    }

    fn advance(&mut self) -> Option<Vec<i64>> {
        let n = self.caps.len();
        if !self.started {
            self.started = true;
            if self.degree < 0 {
                return None;
            }
            let mut x = vec![0i64; n];
            if !self.fill_smallest(&mut x, 0, self.degree) {
                return None;
            }
            self.current = Some(x.clone());
            return Some(x);
        }
        let mut x = self.current.take()?;
        // rightmost position that can grow while the remainder still fits to its right
        let mut prefix: i64 = x[..n - 1].iter().sum();
        for i in (0..n.saturating_sub(1)).rev() {
            prefix -= x[i];
            let remaining = self.degree - prefix - (x[i] + 1);
            if x[i] < self.caps[i] && remaining >= 0 && remaining <= self.suffix_cap[i + 1] {
                x[i] += 1;
                self.fill_smallest(&mut x, i + 1, remaining);
                self.current = Some(x.clone());
                return Some(x);
            }
        }
        None
    }
}

impl Iterator for CandidateIter {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        self.advance()
    }
}

/// Effective divisors of `degree` reduced at the base vertex, lexicographically ascending.
pub fn reduced_effective(g: &Multigraph, degree: i64) -> impl Iterator<Item = Vec<i64>> + '_ {
    CandidateIter::new(g, degree).filter(move |c| is_reduced_chips(g, c, BASE))
}
