//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails. Pass criterion numbers as arguments to run a subset.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::Instant;

use gonality::banana::{
    build_qb, cp_witness, kn_reduced_characterization, predicted_gonality, qb_second_gonality_divisor, recognize_qb,
    verify_attach_lemma, verify_theorem_b, AttachOptions, TheoremBOptions,
};
use gonality::chipfire::{equivalent, equivalent_at, is_reduced, reduce, Divisor, FiringScript};
use gonality::explore::{survey, test_conjecture, SearchSpec, TightOutcome};
use gonality::multigraph::{banana, complete_graph, cycle, path};
use gonality::ranks::strategy::Definitional;
use gonality::ranks::{gonality_from, gonality_sequence, riemann_roch_check_with, RankEngine};
use gonality::{Error, Multigraph};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: Error) -> String {
    e.to_string()
}

fn random_connected(rng: &mut ChaCha8Rng, max_n: usize, max_genus: i64) -> Multigraph {
    loop {
        let n = rng.random_range(1..=max_n);
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let m = match rng.random_range(0..20) {
                    0..=9 => 0,
                    10..=16 => 1,
                    _ => 2,
                };
                if m > 0 {
                    edges.push((i, j, m));
                }
            }
        }
        let g = Multigraph::from_index_edges(n, &edges).unwrap();
        if g.is_connected() && g.genus().unwrap() <= max_genus {
            return g;
        }
    }
}

fn qb_3_4_2_3() -> Outcome {
    let (g, p) = build_qb(&[4, 2, 3]).map_err(err)?;
    let genus = g.genus().map_err(err)?;
    ensure(genus == 45, || format!("genus {genus}"))?;
    let engine = RankEngine::with_default_strategy(&g).map_err(err)?;
    let first = gonality_from(&engine, 1, 1, None).map_err(err)?;
    ensure(first.degree == 10, || format!("gon_1 = {}", first.degree))?;
    let second = gonality_from(&engine, 2, first.degree + 1, None).map_err(err)?;
    ensure(second.degree == 11, || format!("gon_2 = {}", second.degree))?;
    let d = qb_second_gonality_divisor(&g, &p).map_err(err)?;
    let r = engine.rank(&d).map_err(err)?;
    ensure(r == 2 && d.degree() == 11, || format!("rank(D) = {r}, deg {}", d.degree()))?;
    Ok(format!("genus 45, gon_1 10, gon_2 11, rank(D) 2, {} memoised classes", engine.memo_size()))
}

fn qb_sequences() -> Outcome {
    let mut parts = Vec::new();
    for layers in [vec![1, 1], vec![2, 1]] {
        let (g, p) = build_qb(&layers).map_err(err)?;
        let k = p.k();
        let expected: Vec<i64> = (1..=5).map(|r| predicted_gonality(k, r).unwrap()).collect();
        let engine = RankEngine::new(&g, Arc::new(Definitional)).map_err(err)?;
        let got = gonality_sequence(&engine, 5).map_err(err)?.values();
        ensure(got == expected, || format!("QB{layers:?}: got {got:?}, expected {expected:?}"))?;
        parts.push(format!("QB{layers:?} {got:?}"));
    }
    ensure(parts[0].ends_with("[3, 4, 6, 7, 8]") && parts[1].ends_with("[4, 5, 8, 9, 10]"), || parts.join("; "))?;
    Ok(parts.join("; "))
}

fn qb_1_2_verification() -> Outcome {
    let (g, _) = build_qb(&[2]).map_err(err)?;
    let r = verify_theorem_b(&g, TheoremBOptions::default()).map_err(err)?;
    let ranks: Vec<Option<i64>> = r.powers.iter().map(|p| p.actual).collect();
    ensure(ranks == vec![Some(-1), Some(0), Some(2), Some(5), Some(9)], || format!("powers {ranks:?}"))?;
    ensure(r.canonical_ok, || "(k-2)D not equivalent to K".into())?;
    ensure(!r.uniqueness.skipped && r.uniqueness.candidates == 1, || format!("{:?}", r.uniqueness))?;
    ensure(r.passes(), || format!("{r:?}"))?;
    let seq: Vec<i64> = r.sequence.iter().map(|s| s.actual).collect();
    Ok(format!("genus {}, sequence {seq:?}, powers {ranks:?}", r.genus))
}

fn riemann_roch() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
    let mut failures = Vec::new();
    for i in 0..200 {
        let g = random_connected(&mut rng, 6, 5);
        let chips: Vec<i64> = (0..g.vertex_count()).map(|_| rng.random_range(-2..=3)).collect();
        let d = Divisor::from_chips(&g, chips.clone()).unwrap();
        let engine = RankEngine::new(&g, Arc::new(Definitional)).map_err(err)?;
        if !riemann_roch_check_with(&engine, &d).map_err(err)? {
            failures.push(format!("pair {i}: {:?} {chips:?}", g.to_file()));
        }
    }
    ensure(failures.is_empty(), || format!("{} failures: {}", failures.len(), failures.join("; ")))?;
    Ok("200 pairs, 0 failures".into())
}

fn reduction_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    let mut graphs = vec![banana(2), banana(3), complete_graph(4), complete_graph(5), cycle(5), path(4)];
    graphs.push(build_qb(&[2]).unwrap().0);
    graphs.push(build_qb(&[1, 1]).unwrap().0);
    while graphs.len() < 10 {
        let g = random_connected(&mut rng, 5, 6);
        if g.vertex_count() >= 3 {
            graphs.push(g);
        }
    }
    let mut total_classes = 0u64;
    for g in &graphs {
        let n = g.vertex_count();
        for _ in 0..5 {
            let chips: Vec<i64> = (0..n).map(|_| rng.random_range(-3..=4)).collect();
            let d = Divisor::from_chips(g, chips).unwrap();
            for q in 0..n {
                let (r, _) = reduce(g, &d, q).map_err(err)?;
                let (rr, _) = reduce(g, &r, q).map_err(err)?;
                ensure(r == rr && is_reduced(g, &r, q).map_err(err)?, || format!("idempotence on {:?}", g.to_file()))?;
            }
            let (target, _) = reduce(g, &d, 0).map_err(err)?;
            for _ in 0..100 {
                let script: Vec<i64> = (0..n).map(|_| rng.random_range(-3..=3)).collect();
                let moved = FiringScript::from_times(g, script).map_err(err)?.apply(g, &d).map_err(err)?;
                let (r, _) = reduce(g, &moved, 0).map_err(err)?;
                ensure(r == target, || format!("class invariance on {:?}", g.to_file()))?;
                let other = Divisor::from_chips(g, (0..n).map(|_| rng.random_range(-3..=4)).collect()).unwrap();
                for pair in [&moved, &other] {
                    let answers: BTreeSet<bool> =
                        (0..n).map(|q| equivalent_at(g, &d, pair, q).unwrap()).collect();
                    ensure(answers.len() == 1, || "equivalence depends on base".into())?;
                }
                ensure(equivalent(g, &d, &moved).map_err(err)?, || "script moved class".into())?;
            }
        }
        // degree-0 classes: reduced representatives with -sum(off-base) chips at the base
        let mut classes = 0u64;
        let caps: Vec<i64> = (1..n).map(|v| g.valence(v) - 1).collect();
        let mut x = vec![0i64; n - 1];
        loop {
            let mut chips = vec![-x.iter().sum::<i64>()];
            chips.extend(&x);
            if is_reduced(g, &Divisor::from_chips(g, chips).unwrap(), 0).map_err(err)? {
                classes += 1;
            }
            let mut i = 0;
            while i < x.len() && x[i] == caps[i] {
                x[i] = 0;
                i += 1;
            }
            if i == x.len() {
                break;
            }
            x[i] += 1;
        }
        let trees = g.spanning_tree_count().map_err(err)?;
        ensure(trees == classes.into(), || format!("{classes} classes vs {trees} trees on {:?}", g.to_file()))?;
        total_classes += classes;
    }
    Ok(format!("10 graphs, {total_classes} degree-0 classes matching spanning tree counts"))
}

fn complete_staircase() -> Outcome {
    let mut checked = 0u64;
    for n in 1..=5usize {
        let g = complete_graph(n);
        let mut x = vec![0i64; n];
        loop {
            let d = Divisor::from_chips(&g, x.clone()).unwrap();
            for base in 0..n {
                let dhar = is_reduced(&g, &d, base).map_err(err)?;
                let stair = kn_reduced_characterization(&g, &d, base).map_err(err)?;
                ensure(dhar == stair, || format!("K_{n} {x:?} base {base}: Dhar {dhar}, staircase {stair}"))?;
                checked += 1;
            }
            let mut i = 0;
            while i < n && x[i] == n as i64 {
                x[i] = 0;
                i += 1;
            }
            if i == n {
                break;
            }
            x[i] += 1;
        }
    }
    Ok(format!("{checked} (divisor, base) pairs on K_1..K_5"))
}

fn all_layers(max_m: usize, max_sum: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    let mut frontier = vec![vec![]];
    for _ in 0..max_m {
        let mut next = Vec::new();
        for n in &frontier {
            let used: usize = n.iter().sum();
            for q in 1..=(max_sum - used) {
                let mut m: Vec<usize> = n.clone();
                m.push(q);
                next.push(m);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn recognizer() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0007);
    let shapes = all_layers(3, 6);
    let mut qb_codes: BTreeSet<Vec<u8>> = BTreeSet::new();
    for layers in &shapes {
        let (g, _) = build_qb(layers).map_err(err)?;
        qb_codes.insert(g.canonical_code().map_err(err)?);
        let mut perm: Vec<usize> = (0..g.vertex_count()).collect();
        perm.shuffle(&mut rng);
        for h in [g.clone(), g.permuted(&perm)] {
            let p = recognize_qb(&h).ok_or_else(|| format!("QB{layers:?} not recognised"))?;
            ensure(&p.layers == layers && p.matches(&h), || format!("QB{layers:?} recognised as {:?}", p.layers))?;
        }
    }
    let mut rejected = 0;
    for _ in 0..50 {
        let layers = loop {
            let l = shapes.choose(&mut rng).unwrap();
            if !l.is_empty() {
                break l.clone();
            }
        };
        let (g, _) = build_qb(&layers).map_err(err)?;
        let n = g.vertex_count();
        let u = rng.random_range(0..n);
        let v = (u + rng.random_range(1..n)) % n;
        let mut edges: Vec<(usize, usize, u32)> = g.edges().collect();
        let existing = edges.iter().position(|&(a, b, _)| (a, b) == (u.min(v), u.max(v)));
        match existing {
            Some(i) if rng.random_bool(0.5) => {
                edges[i].2 -= 1;
                edges.retain(|e| e.2 > 0);
            }
            _ => edges.push((u.min(v), u.max(v), 1)),
        }
        let h = Multigraph::from_index_edges(n, &edges).map_err(err)?;
        let expect_qb = h.is_connected() && qb_codes.contains(&h.canonical_code().map_err(err)?);
        let got = recognize_qb(&h).is_some();
        ensure(got == expect_qb, || format!("perturbed QB{layers:?}: recognised {got}, expected {expect_qb}"))?;
        if !got {
            rejected += 1;
        }
    }
    ensure(rejected == 50, || format!("only {rejected} of 50 perturbations rejected"))?;
    Ok(format!("{} shapes round-trip, 50 of 50 perturbations rejected", shapes.len()))
}

fn random_staircase_divisor(rng: &mut ChaCha8Rng, g: &Multigraph, l: i64) -> Divisor {
    let n = g.vertex_count();
    let mut rest: Vec<i64> = (0..n - 1).map(|pos| rng.random_range(0..=pos as i64)).collect();
    rest.shuffle(rng);
    let degree = l * (n as i64 - 1) - 1;
    let mut chips = vec![degree - rest.iter().sum::<i64>()];
    chips.extend(rest);
    Divisor::from_chips(g, chips).unwrap()
}

fn cp_witnesses() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0008);
    let (mut valid, mut none, mut invalid) = (0, 0, Vec::new());
    for n in 4..=6usize {
        let g = complete_graph(n);
        for l in 1..=(n as i64 - 3) {
            for _ in 0..20 {
                let d = random_staircase_divisor(&mut rng, &g, l);
                match cp_witness(&g, &d, l) {
                    Ok(w) => {
                        if w.validate(&g, &d, l).map_err(err)? {
                            valid += 1;
                        } else {
                            invalid.push(format!("K_{n} l={l} {:?} d={}", d.chips(), w.d));
                        }
                    }
                    Err(Error::NoWitness(_)) => none += 1,
                    Err(e) => return Err(format!("K_{n} l={l} {:?}: {e}", d.chips())),
                }
            }
        }
    }
    ensure(invalid.is_empty(), || format!("invalid witnesses: {}", invalid.join("; ")))?;
    Ok(format!("{valid} witnesses re-validated, {none} NoWitness, 0 invalid"))
}

fn explorer_corpus() -> Outcome {
    let spec = SearchSpec { max_vertices: 4, max_multiplicity: 4, max_edges: 8, rank_budget: 5 };
    let entries = survey(&spec).map_err(err)?;
    let mut tight = 0;
    let mut problems = Vec::new();
    let mut tight_codes = BTreeSet::new();
    for e in &entries {
        match &e.outcome {
            TightOutcome::Tight { gon1, .. } => {
                tight += 1;
                tight_codes.insert(e.graph.canonical_code().unwrap());
                let r = test_conjecture(&e.graph, spec.rank_budget).map_err(err)?;
                if !r.genus_matches || r.gonseq_matches.failed() {
                    problems.push(format!("conjecture (1)/(2) fails on {:?}: {r:?}", e.graph.to_file()));
                }
                if *gon1 == e.graph.vertex_count() as i64 && !r.is_qb {
                    problems.push(format!("gon_1 = |V| but not quasi-banana: {:?}", e.graph.to_file()));
                }
            }
            TightOutcome::NotTight { .. } => {}
            TightOutcome::BudgetExceeded { message } => problems.push(format!("budget: {message}")),
        }
    }
    for layers in all_layers(3, 3) {
        let (g, _) = build_qb(&layers).unwrap();
        let fits = g.vertex_count() <= 4
            && g.edge_count() <= 8
            && g.edges().all(|(_, _, m)| m <= 4);
        if fits && !tight_codes.contains(&g.canonical_code().unwrap()) {
            problems.push(format!("QB{layers:?} missing from tight list"));
        }
    }
    ensure(problems.is_empty(), || problems.join("\n"))?;
    Ok(format!("{} graphs, {tight} gonality-tight, no counterexample", entries.len()))
}

fn attachment_ranks() -> Outcome {
    let (qb0, _) = build_qb(&[]).unwrap();
    let (qb11, p11) = build_qb(&[1]).unwrap();
    let hub = qb11.label(p11.vertex(1, 1).unwrap()).to_string();
    let cases = [(qb0, "u0_1".to_string(), 2, 1, vec![2]), (qb11, hub, 2, 2, vec![1, 2])];
    let mut notes = Vec::new();
    for (gp, v, n, k, target) in cases {
        let r = verify_attach_lemma(&gp, &v, n, k, AttachOptions::default()).map_err(err)?;
        ensure(r.passes(), || format!("{r:?}"))?;
        let (expected, _) = build_qb(&target).unwrap();
        ensure(r.graph.canonical_code().unwrap() == expected.canonical_code().unwrap(), || {
            format!("attached graph is not QB{target:?}")
        })?;
        let direct = r.ranks.iter().filter(|x| x.rank.is_some()).count();
        notes.push(format!("QB{target:?} genus {} with {direct}/{} rank bounds checked", r.genus, r.ranks.len()));
    }
    Ok(notes.join("; "))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("QB_3(4,2,3) genus and first two gonalities", qb_3_4_2_3),
        ("QB_2(1,1) and QB_2(2,1) gonality sequences", qb_sequences),
        ("QB_1(2) verification report", qb_1_2_verification),
        ("Riemann-Roch on random pairs", riemann_roch),
        ("reduction suite", reduction_suite),
        ("complete-graph staircase", complete_staircase),
        ("quasi-banana recognizer", recognizer),
        ("cp_witness oracle agreement", cp_witnesses),
        ("explorer corpus", explorer_corpus),
        ("attachment ranks", attachment_ranks),
    ];
    let selected: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let number = i + 1;
        if !selected.is_empty() && !selected.contains(&number) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {number:>2} PASS [{secs:.1}s] {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {number:>2} FAIL [{secs:.1}s] {name}: {why}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
