//! Divisors, chip-firing, Dhar's burning algorithm and q-reduced divisors.

use std::collections::{BTreeMap, VecDeque};

use crate::error::{Error, Result};
use crate::multigraph::{GraphId, Multigraph};

/// Integer chip assignment on the vertices of one specific graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Divisor {
    graph: GraphId,
    chips: Vec<i64>,
}

impl Divisor {
    pub fn zero(g: &Multigraph) -> Self {
        Divisor { graph: g.id(), chips: vec![0; g.vertex_count()] }
    }

    pub fn from_chips(g: &Multigraph, chips: Vec<i64>) -> Result<Self> {
        if chips.len() != g.vertex_count() {
            return Err(Error::InvalidArgument(format!(
                "divisor has {} entries, graph has {} vertices",
                chips.len(),
                g.vertex_count()
            )));
        }
        Ok(Divisor { graph: g.id(), chips })
    }

    /// Absent labels mean zero; repeated labels add up.
    pub fn from_labels<S: AsRef<str>>(g: &Multigraph, entries: &[(S, i64)]) -> Result<Self> {
        let mut d = Divisor::zero(g);
        for (l, c) in entries {
            let v = g.vertex(l.as_ref())?;
            d.chips[v] += c;
        }
        Ok(d)
    }

    pub fn from_map(g: &Multigraph, map: &BTreeMap<String, i64>) -> Result<Self> {
        let entries: Vec<(&str, i64)> = map.iter().map(|(k, v)| (k.as_str(), *v)).collect();
        Divisor::from_labels(g, &entries)
    }

    /// Parses the inline form `a=2,b=-1`. An empty string is the zero divisor.
    pub fn parse_inline(g: &Multigraph, text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (label, value) = part
                .rsplit_once('=')
                .ok_or_else(|| Error::InvalidArgument(format!("expected label=integer, got `{part}`")))?;
            let value: i64 = value
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad chip count in `{part}`")))?;
            entries.push((label.trim().to_string(), value));
        }
        Divisor::from_labels(g, &entries)
    }

    /// Sum of `w` over all vertices.
    pub fn all_ones(g: &Multigraph) -> Self {
        Divisor { graph: g.id(), chips: vec![1; g.vertex_count()] }
    }

    pub fn unit(g: &Multigraph, v: usize) -> Self {
        let mut d = Divisor::zero(g);
        d.chips[v] = 1;
        d
    }

    pub fn graph_id(&self) -> GraphId {
        self.graph
    }

    pub fn chips(&self) -> &[i64] {
        &self.chips
    }

    pub fn into_chips(self) -> Vec<i64> {
        self.chips
    }

    pub fn get(&self, v: usize) -> i64 {
        self.chips[v]
    }

    pub fn degree(&self) -> i64 {
        self.chips.iter().sum()
    }

    pub fn is_effective(&self) -> bool {
        self.chips.iter().all(|&c| c >= 0)
    }

    pub fn ensure_on(&self, g: &Multigraph) -> Result<()> {
        if self.graph == g.id() {
            Ok(())
        } else {
            Err(Error::CrossGraph)
        }
    }

    pub fn checked_add(&self, other: &Divisor) -> Result<Divisor> {
        if self.graph != other.graph {
            return Err(Error::CrossGraph);
        }
        let chips = self.chips.iter().zip(&other.chips).map(|(a, b)| a + b).collect();
        Ok(Divisor { graph: self.graph, chips })
    }

    pub fn checked_sub(&self, other: &Divisor) -> Result<Divisor> {
        self.checked_add(&other.scaled(-1))
    }

    pub fn scaled(&self, k: i64) -> Divisor {
        Divisor { graph: self.graph, chips: self.chips.iter().map(|c| c * k).collect() }
    }

    /// Adds `amount` chips at `v`.
    pub fn plus(mut self, v: usize, amount: i64) -> Divisor {
        self.chips[v] += amount;
        self
    }

    /// Nonzero entries keyed by vertex label.
    pub fn to_label_map(&self, g: &Multigraph) -> BTreeMap<String, i64> {
        self.chips
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(v, &c)| (g.label(v).to_string(), c))
            .collect()
    }

    /// Same chips by label on another graph; every nonzero label must exist there.
    pub fn transfer(&self, from: &Multigraph, to: &Multigraph) -> Result<Divisor> {
        self.ensure_on(from)?;
        let mut d = Divisor::zero(to);
        for (v, &c) in self.chips.iter().enumerate() {
            if c != 0 {
                d.chips[to.vertex(from.label(v))?] += c;
            }
        }
        Ok(d)
    }

    /// Human-readable sum, e.g. `2*a + b`.
    pub fn display(&self, g: &Multigraph) -> String {
        let terms: Vec<String> = self
            .chips
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(v, &c)| if c == 1 { g.label(v).to_string() } else { format!("{c}*{}", g.label(v)) })
            .collect();
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join(" + ")
        }
    }
}

/// How many times each vertex fired.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiringScript {
    graph: GraphId,
    times_fired: Vec<i64>,
}

impl FiringScript {
    pub fn zero(g: &Multigraph) -> Self {
        FiringScript { graph: g.id(), times_fired: vec![0; g.vertex_count()] }
    }

    pub fn from_times(g: &Multigraph, times_fired: Vec<i64>) -> Result<Self> {
        if times_fired.len() != g.vertex_count() {
            return Err(Error::InvalidArgument("script length does not match vertex count".into()));
        }
        Ok(FiringScript { graph: g.id(), times_fired })
    }

    pub fn times_fired(&self) -> &[i64] {
        &self.times_fired
    }

    pub fn is_zero(&self) -> bool {
        self.times_fired.iter().all(|&t| t == 0)
    }

    /// `D - L x`.
    pub fn apply(&self, g: &Multigraph, d: &Divisor) -> Result<Divisor> {
        d.ensure_on(g)?;
        if self.graph != g.id() {
            return Err(Error::CrossGraph);
        }
        let mut chips = d.chips.clone();
        apply_script(g, &mut chips, &self.times_fired);
        Ok(Divisor { graph: d.graph, chips })
    }
}

/// Outcome of one Dhar burn.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BurnReport {
    pub burnt: Vec<usize>,
    pub unburnt: Vec<usize>,
    pub burn_order: Vec<usize>,
}

impl BurnReport {
    pub fn burns_everything(&self) -> bool {
        self.unburnt.is_empty()
    }
}

/// `chips -= L * script`.
pub(crate) fn apply_script(g: &Multigraph, chips: &mut [i64], script: &[i64]) {
    let n = g.vertex_count();
    let mut delta = vec![0i64; n];
    for v in 0..n {
        let x = script[v];
        if x == 0 {
            continue;
        }
        for &(w, m) in g.neighbors(v) {
            delta[v] -= x * m as i64;
            delta[w] += x * m as i64;
        }
    }
    for v in 0..n {
        chips[v] += delta[v];
    }
}

/// Fires the set `members` (indicator) `times` times.
pub(crate) fn fire_indicator(g: &Multigraph, chips: &mut [i64], members: &[bool], times: i64) {
    for v in 0..g.vertex_count() {
        if !members[v] {
            continue;
        }
        for &(w, m) in g.neighbors(v) {
            if !members[w] {
                chips[v] -= times * m as i64;
                chips[w] += times * m as i64;
            }
        }
    }
}

/// Burns from `q`; a vertex ignites once its edges into the fire exceed its chips.
/// Lowest index first among ignitable vertices. Returns the burnt indicator and order.
pub(crate) fn burn(g: &Multigraph, chips: &[i64], q: usize) -> (Vec<bool>, Vec<usize>) {
    let n = g.vertex_count();
    let mut burnt = vec![false; n];
    let mut heat = vec![0i64; n];
    let mut order = Vec::with_capacity(n);
    let mut ignite = |v: usize, burnt: &mut Vec<bool>, heat: &mut Vec<i64>| {
        burnt[v] = true;
        order.push(v);
        for &(w, m) in g.neighbors(v) {
            heat[w] += m as i64;
        }
    };
    ignite(q, &mut burnt, &mut heat);
    loop {
        let next = (0..n).find(|&v| !burnt[v] && heat[v] > chips[v]);
        match next {
            Some(v) => ignite(v, &mut burnt, &mut heat),
            None => break,
        }
    }
    (burnt, order)
}

fn burns_all(g: &Multigraph, chips: &[i64], q: usize) -> bool {
    // same fixpoint as `burn`, order irrelevant; stack-based for speed
    let n = g.vertex_count();
    let mut burnt = vec![false; n];
    let mut heat = vec![0i64; n];
    let mut stack = vec![q];
    burnt[q] = true;
    let mut count = 1;
    while let Some(v) = stack.pop() {
        for &(w, m) in g.neighbors(v) {
            if !burnt[w] {
                heat[w] += m as i64;
                if heat[w] > chips[w] {
                    burnt[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
    }
    count == n
}

pub(crate) fn is_reduced_chips(g: &Multigraph, chips: &[i64], q: usize) -> bool {
    chips.iter().enumerate().all(|(v, &c)| v == q || c >= 0) && burns_all(g, chips, q)
}

/// Makes every vertex other than `q` nonnegative by sweeping BFS layers outward-in:
/// firing the ball of radius `k` only moves chips between that ball and layer `k + 1`.
fn clear_debt(g: &Multigraph, chips: &mut [i64], q: usize, script: &mut [i64]) {
    if chips.iter().enumerate().all(|(v, &c)| v == q || c >= 0) {
        return;
    }
    let n = g.vertex_count();
    let mut dist = vec![usize::MAX; n];
    dist[q] = 0;
    let mut queue = VecDeque::from([q]);
    while let Some(u) = queue.pop_front() {
        for &(w, _) in g.neighbors(u) {
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
        }
    }
    let depth = dist.iter().copied().max().unwrap_or(0);
    for k in (0..depth).rev() {
        let ball: Vec<bool> = dist.iter().map(|&d| d <= k).collect();
        let mut times = 0i64;
        for w in (0..n).filter(|&w| dist[w] == k + 1 && chips[w] < 0) {
            let into: i64 = g.neighbors(w).iter().filter(|(u, _)| ball[*u]).map(|&(_, m)| m as i64).sum();
            times = times.max((-chips[w] + into - 1) / into);
        }
        if times > 0 {
            fire_indicator(g, chips, &ball, times);
            for v in 0..n {
                if ball[v] {
                    script[v] += times;
                }
            }
        }
    }
}

/// Reduces `chips` in place to the q-reduced representative, accumulating the firing script.
pub(crate) fn reduce_chips(g: &Multigraph, chips: &mut [i64], q: usize, script: &mut [i64]) {
    let n = g.vertex_count();
    clear_debt(g, chips, q, script);
    loop {
        let (burnt, _) = burn(g, chips, q);
        if burnt.iter().all(|&b| b) {
            return;
        }
        // each unburnt vertex holds at least as many chips as edges leaving the unburnt set,
        // so the set can fire at least once; fire it as often as stays legal
        let mut times = i64::MAX;
        for v in (0..n).filter(|&v| !burnt[v]) {
            let out: i64 = g.neighbors(v).iter().filter(|(w, _)| burnt[*w]).map(|&(_, m)| m as i64).sum();
            if out > 0 {
                times = times.min(chips[v] / out);
            }
        }
        debug_assert!((1..i64::MAX).contains(&times));
        let unburnt: Vec<bool> = burnt.iter().map(|b| !b).collect();
        fire_indicator(g, chips, &unburnt, times);
        for v in 0..n {
            if unburnt[v] {
                script[v] += times;
            }
        }
    }
}

/// Reduction without script bookkeeping; the hot path of the rank engine.
pub(crate) fn reduce_in_place(g: &Multigraph, chips: &mut [i64], q: usize) {
    let mut scratch = vec![0i64; chips.len()];
    reduce_chips(g, chips, q, &mut scratch);
}

/// Set-fires `set`: every member sends a chip along each edge leaving the set.
pub fn fire_set(g: &Multigraph, d: &Divisor, set: &[usize]) -> Result<Divisor> {
    d.ensure_on(g)?;
    let mut members = vec![false; g.vertex_count()];
    for &v in set {
        if v >= g.vertex_count() {
            return Err(Error::IndexOutOfRange(format!("vertex {v}")));
        }
        members[v] = true;
    }
    let mut chips = d.chips.clone();
    fire_indicator(g, &mut chips, &members, 1);
    Ok(Divisor { graph: d.graph, chips })
}

/// Dhar's burning algorithm from `q`. Requires `d` nonnegative away from `q`.
pub fn dhar_burn(g: &Multigraph, d: &Divisor, q: usize) -> Result<BurnReport> {
    d.ensure_on(g)?;
    if let Some(v) = (0..g.vertex_count()).find(|&v| v != q && d.chips[v] < 0) {
        return Err(Error::NegativeOutsideBase(g.label(v).to_string()));
    }
    let (burnt, burn_order) = burn(g, &d.chips, q);
    let (b, u): (Vec<usize>, Vec<usize>) = (0..g.vertex_count()).partition(|&v| burnt[v]);
    Ok(BurnReport { burnt: b, unburnt: u, burn_order })
}

/// The unique q-reduced divisor equivalent to `d`, with a script `x` such that
/// `d - L x` is that divisor.
pub fn reduce(g: &Multigraph, d: &Divisor, q: usize) -> Result<(Divisor, FiringScript)> {
    d.ensure_on(g)?;
    g.require_connected()?;
    if q >= g.vertex_count() {
        return Err(Error::IndexOutOfRange(format!("base vertex {q}")));
    }
    let mut chips = d.chips.clone();
    let mut script = vec![0i64; chips.len()];
    reduce_chips(g, &mut chips, q, &mut script);
    Ok((Divisor { graph: d.graph, chips }, FiringScript { graph: d.graph, times_fired: script }))
}

pub fn is_reduced(g: &Multigraph, d: &Divisor, q: usize) -> Result<bool> {
    d.ensure_on(g)?;
    Ok(is_reduced_chips(g, &d.chips, q))
}

/// Linear equivalence, decided by comparing reduced forms at vertex 0.
pub fn equivalent(g: &Multigraph, d1: &Divisor, d2: &Divisor) -> Result<bool> {
    equivalent_at(g, d1, d2, 0)
}

pub fn equivalent_at(g: &Multigraph, d1: &Divisor, d2: &Divisor, q: usize) -> Result<bool> {
    d1.ensure_on(g)?;
    d2.ensure_on(g)?;
    if d1.degree() != d2.degree() {
        return Ok(false);
    }
    Ok(reduce(g, d1, q)?.0 == reduce(g, d2, q)?.0)
}

/// `K_G(v) = valence(v) - 2`.
pub fn canonical_divisor(g: &Multigraph) -> Divisor {
    Divisor { graph: g.id(), chips: (0..g.vertex_count()).map(|v| g.valence(v) - 2).collect() }
}

pub fn is_winnable(g: &Multigraph, d: &Divisor) -> Result<bool> {
    if d.degree() < 0 {
        d.ensure_on(g)?;
        return Ok(false);
    }
    let (r, _) = reduce(g, d, 0)?;
    Ok(r.get(0) >= 0)
}
