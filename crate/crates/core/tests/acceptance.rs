//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

use std::time::{Duration, Instant};

use braidqp::cohomology::oracle::brute_force_equivalence_oracle;
use braidqp::cohomology::{build_complex, class_of, right_equivalent_primitive, two_cycle_basis};
use braidqp::fuzz::{check_word, random_word, sweep, Check, SweepOptions, SweepReport};
use braidqp::mutation::{mutate, ArrowQuiver, QP};
use braidqp::potential::{apply_right_equivalence, scalar, seeded_potential, signed_pow2, Potential, RightEquivalence, Seeding};
use braidqp::{build_qxtilde, Arrow, GammaGraph, Vertex, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    id: usize,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn v(d: &str) -> Vertex {
    Vertex::new(d, 0)
}

fn arr(a: &str, b: &str) -> Arrow {
    Arrow::new(v(a), v(b))
}

fn worked_example() -> Outcome {
    let q = ArrowQuiver::new(
        ["k", "x", "y", "z"].map(|n| (v(n), false)),
        [arr("x", "k"), arr("k", "y"), arr("y", "x"), arr("k", "z")],
    )
    .unwrap();
    let mut w = Potential::new();
    w.add_path(vec![arr("x", "k"), arr("k", "y"), arr("y", "x")], scalar(1)).unwrap();
    let qp = QP::new(q, w).unwrap();

    let expected_q = ArrowQuiver::new(
        ["k", "x", "y", "z"].map(|n| (v(n), false)),
        [arr("k", "x"), arr("x", "z"), arr("y", "k"), arr("z", "k")],
    )
    .unwrap();
    let mut expected_w = Potential::new();
    expected_w.add_path(vec![arr("x", "z"), arr("z", "k"), arr("k", "x")], scalar(1)).unwrap();
    let expected = QP::new(expected_q, expected_w).unwrap();

    let m = mutate(&qp, &v("k")).unwrap();
    let exact = m == expected && m.to_json().unwrap() == expected.to_json().unwrap();
    let mut times: Vec<Duration> = (0..21)
        .map(|_| {
            let t = Instant::now();
            let r = mutate(&qp, &v("k")).unwrap();
            let e = t.elapsed();
            assert_eq!(r, m);
            e
        })
        .collect();
    times.sort();
    let median = times[times.len() / 2];
    Outcome {
        id: 1,
        name: "worked example mutation",
        pass: exact && median < Duration::from_millis(1),
        detail: format!("exact={exact}, median {median:?}"),
    }
}

fn sweep_all(seed: u64) -> (SweepReport, Duration) {
    let t = Instant::now();
    let graphs = [GammaGraph::a_n(2), GammaGraph::a_n(3), GammaGraph::cycle(3)];
    let mut total = SweepReport::default();
    for (i, g) in graphs.iter().enumerate() {
        let r = sweep(g, 200, 14, seed + i as u64, &SweepOptions::default()).unwrap();
        total = total.merge(r);
    }
    (total, t.elapsed())
}

fn from_sweep(id: usize, name: &'static str, report: &SweepReport, check: Check, extra: Option<(bool, String)>) -> Outcome {
    let passed = report.passes_of(check);
    let failed = report.failures_of(check);
    let (ok, more) = extra.unwrap_or((true, String::new()));
    for f in report.failures.iter().filter(|f| f.check == check).take(3) {
        eprintln!("  criterion {id}: {f}");
    }
    Outcome {
        id,
        name,
        pass: ok && failed == 0 && passed > 0,
        detail: format!("{passed} passed, {failed} failed{more}"),
    }
}

/// Random usable word over one of the three test graphs.
fn instance(rng: &mut ChaCha8Rng, i: usize) -> (GammaGraph, Word) {
    let g = match i % 3 {
        0 => GammaGraph::a_n(2),
        1 => GammaGraph::a_n(3),
        _ => GammaGraph::cycle(3),
    };
    let w = random_word(&g, rng, 14).unwrap();
    (g, w)
}

fn oracle_agreement() -> (Outcome, Outcome) {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut agree, mut total, mut equivalent, mut inequivalent) = (0, 0, 0, 0);
    let (mut tree_ok, mut tree_total, mut cycle_split) = (true, 0, 0);
    for i in 0..240 {
        let (g, x) = instance(&mut rng, i);
        let bq = build_qxtilde(&x, &g).unwrap();
        let cw = build_complex(&bq).unwrap();
        let basis = two_cycle_basis(&cw);
        let s1: u64 = rng.gen();
        let w1 = seeded_potential(&cw.cells, &Seeding::PowersOfTwo { seed: s1, max_exp: 3 }).unwrap();
        let w2 = if rng.gen_bool(0.5) {
            let mut phi = RightEquivalence::identity(w1.max_degree());
            for a in &cw.arrows {
                if rng.gen_bool(0.5) {
                    phi.set_linear(a.clone(), signed_pow2(rng.gen(), rng.gen_range(-2..=2))).unwrap();
                }
            }
            apply_right_equivalence(&phi, &w1).unwrap()
        } else {
            seeded_potential(&cw.cells, &Seeding::PowersOfTwo { seed: rng.gen(), max_exp: 3 }).unwrap()
        };
        let fast = right_equivalent_primitive(&w1, &w2, &cw, &basis).unwrap();
        let slow = brute_force_equivalence_oracle(&w1, &w2, &cw, 64).unwrap();
        total += 1;
        if fast == slow {
            agree += 1;
        } else {
            eprintln!("  criterion 7: disagreement on `{x}` ({fast} vs {slow})");
        }
        if slow {
            equivalent += 1;
        } else {
            inequivalent += 1;
        }
        if g.first_betti_number() == 0 {
            tree_total += 1;
            tree_ok &= basis.is_empty() && fast;
        } else if class_of(&w1, &cw, &basis).unwrap() != class_of(&w2, &cw, &basis).unwrap() {
            cycle_split += 1;
            tree_ok &= !fast && !slow;
        }
    }
    let elapsed = t.elapsed();
    let seven = Outcome {
        id: 7,
        name: "oracle agreement",
        pass: total >= 200 && agree == total && elapsed < Duration::from_secs(60) && equivalent > 0 && inequivalent > 0,
        detail: format!("{agree}/{total} agree ({equivalent} equivalent, {inequivalent} not), {elapsed:?}"),
    };
    let six = Outcome {
        id: 6,
        name: "rank law consequences",
        pass: tree_ok && tree_total > 0 && cycle_split > 0,
        detail: format!("{tree_total} tree-graph pairs all equivalent, {cycle_split} cycle-graph pairs with distinct invariants all inequivalent"),
    };
    (six, seven)
}

fn non_chordless_word() -> (bool, String) {
    let g = GammaGraph::a_n(2);
    let x = Word::parse("1 2~ 1 2 1~ 1", &g).unwrap();
    let mut report = SweepReport::default();
    for seed in 0..40 {
        report = report.merge(check_word(&x, &g, seed, &SweepOptions::default()));
    }
    let ok = report.failures_of(Check::CutIdentity) == 0 && report.passes_of(Check::CutIdentity) == 40;
    (ok, format!("; word `{x}`: {} pairs", report.passes_of(Check::CutIdentity)))
}

fn main() {
    let mut outcomes = vec![worked_example()];

    let (report, elapsed) = sweep_all(1);
    let unsupported = report.unsupported.len();
    for u in report.unsupported.iter().take(5) {
        eprintln!("  criterion 2: unsupported {u}");
    }
    outcomes.push(from_sweep(
        2,
        "braid move and quiver mutation agree",
        &report,
        Check::QuiverConsistency,
        Some((
            report.words >= 200 && unsupported == 0 && elapsed < Duration::from_secs(30),
            format!(
                "; {} words, {} moves, {} skipped, {unsupported} unsupported, {elapsed:?}",
                report.words, report.moves, report.skipped_moves
            ),
        )),
    ));
    outcomes.push(from_sweep(3, "primitivity preserved", &report, Check::Primitivity, None));
    outcomes.push(from_sweep(4, "double mutation is the identity", &report, Check::Involution, None));
    outcomes.push(from_sweep(5, "twisted class invariant under moves", &report, Check::TwistedClass, None));
    let (six, seven) = oracle_agreement();
    let rank = from_sweep(6, "cohomology rank law", &report, Check::RankLaw, None);
    outcomes.push(Outcome {
        pass: rank.pass && six.pass,
        detail: format!("{}; {}", rank.detail, six.detail),
        ..rank
    });
    outcomes.push(seven);
    let extra = non_chordless_word();
    let eight = from_sweep(8, "cut formula matches expansion", &report, Check::CutIdentity, Some(extra));
    outcomes.push(eight);
    outcomes.push(from_sweep(9, "structural checks", &report, Check::Structure, None));

    for o in &outcomes {
        println!("{} criterion {}: {} ({})", if o.pass { "PASS" } else { "FAIL" }, o.id, o.name, o.detail);
    }
    let failed: Vec<usize> = outcomes.iter().filter(|o| !o.pass).map(|o| o.id).collect();
    if !failed.is_empty() {
        eprintln!("failing criteria: {failed:?}");
        std::process::exit(1);
    }
}
