//! Random valid words and the invariant suite run over them.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::braid::{BraidMove, Letter, MoveKind, Word};
use crate::cartan::GammaGraph;
use crate::cohomology::{build_complex, transport_basis, transported_class, twisted_class_of, two_cycle_basis};
use crate::error::{Error, Result};
use crate::mutation::{mutate, mutate_along_move, QP};
use crate::potential::{
    apply_right_equivalence, coefficient_via_cuts, default_truncation, enumerate_abbar_cycles, is_primitive,
    random_right_equivalence, seeded_potential, Seeding,
};
use crate::qbuild::{build_qxtilde, mutation_vertex, relabel_after_move, BraidQuiver};

/// The word meets the conditions and every αβ̄-cycle of `Q(x̃)` is defined.
pub fn is_usable(word: &Word, graph: &GammaGraph) -> bool {
    word.check_conditions(graph).is_ok()
        && build_qxtilde(word, graph).is_ok_and(|bq| enumerate_abbar_cycles(&bq).is_ok())
}

/// Draws a word of length at most `max_len` that satisfies the conditions
/// and whose quiver `Q(x̃)` builds. Letters come in chunks biased towards
/// fragments where braid moves apply.
pub fn random_word(graph: &GammaGraph, rng: &mut impl Rng, max_len: usize) -> Result<Word> {
    let labels = graph.vertices();
    let edges: Vec<(usize, usize)> = graph.edges().collect();
    let min_len = 3 * labels.len();
    if max_len < min_len {
        return Err(Error::Precondition(format!(
            "words over this graph need at least {min_len} letters"
        )));
    }
    for _ in 0..10_000 {
        let target = rng.gen_range(min_len..=max_len);
        let mut letters: Vec<Letter> = Vec::new();
        while letters.len() < target {
            let roll: f64 = rng.gen();
            if roll < 0.5 || edges.is_empty() {
                let a = labels.choose(rng).expect("nonempty graph");
                letters.push(Letter::new(a.clone(), rng.gen_bool(0.5)));
            } else if roll < 0.75 {
                let &(i, j) = edges.choose(rng).expect("nonempty");
                let (a, b) = if rng.gen_bool(0.5) { (i, j) } else { (j, i) };
                let bar = rng.gen_bool(0.5);
                for t in [a, b, a] {
                    letters.push(Letter::new(labels[t].clone(), bar));
                }
            } else {
                let a = labels.choose(rng).expect("nonempty graph");
                let first = rng.gen_bool(0.5);
                letters.push(Letter::new(a.clone(), first));
                letters.push(Letter::new(a.clone(), !first));
            }
        }
        letters.truncate(max_len);
        let word = Word::new(letters)?;
        if is_usable(&word, graph) {
            return Ok(word);
        }
    }
    Err(Error::Unsupported("no valid word found after 10000 draws".into()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Check {
    QuiverConsistency,
    Primitivity,
    Involution,
    TwistedClass,
    RankLaw,
    Structure,
    CutIdentity,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Check::QuiverConsistency => "quiver-consistency",
            Check::Primitivity => "primitivity",
            Check::Involution => "involution",
            Check::TwistedClass => "twisted-class",
            Check::RankLaw => "rank-law",
            Check::Structure => "structure",
            Check::CutIdentity => "cut-identity",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug)]
pub struct Failure {
    pub check: Check,
    pub word: Word,
    pub mv: Option<BraidMove>,
    pub message: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} on `{}`", self.check, self.word)?;
        if let Some(mv) = &self.mv {
            write!(f, " move {mv}")?;
        }
        write!(f, ": {}", self.message)
    }
}

#[derive(Clone, Debug, Default)]
pub struct SweepReport {
    pub words: usize,
    pub moves: usize,
    /// Moves whose target word breaks the conditions, so `Q(ỹ)` is undefined.
    pub skipped_moves: usize,
    /// Moves the QP-level checks cannot handle, with the reason.
    pub unsupported: Vec<String>,
    pub passed: BTreeMap<Check, usize>,
    pub failures: Vec<Failure>,
}

impl SweepReport {
    pub fn merge(mut self, other: SweepReport) -> SweepReport {
        self.words += other.words;
        self.moves += other.moves;
        self.skipped_moves += other.skipped_moves;
        self.unsupported.extend(other.unsupported);
        for (k, v) in other.passed {
            *self.passed.entry(k).or_default() += v;
        }
        self.failures.extend(other.failures);
        self
    }

    pub fn failures_of(&self, check: Check) -> usize {
        self.failures.iter().filter(|f| f.check == check).count()
    }

    pub fn passes_of(&self, check: Check) -> usize {
        self.passed.get(&check).copied().unwrap_or(0)
    }

    fn record(&mut self, check: Check, word: &Word, mv: Option<&BraidMove>, outcome: Result<()>) {
        match outcome {
            Ok(()) => *self.passed.entry(check).or_default() += 1,
            Err(e) => self.failures.push(Failure {
                check,
                word: word.clone(),
                mv: mv.copied(),
                message: e.to_string(),
            }),
        }
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Invariant(msg()))
    }
}

fn check_structure(bq: &BraidQuiver, mv: &BraidMove) -> Result<()> {
    ensure(!bq.quiver.has_half_arrows(), || "Q(x~) has half-arrows".into())?;
    ensure(bq.quiver.frozen_count() == 0, || "Q(x~) has frozen vertices".into())?;
    let Some(k) = mutation_vertex(&bq.word, mv, true) else {
        return Ok(());
    };
    let expected = match mv.kind {
        MoveKind::ExchangeAba => 4,
        MoveKind::CommuteMixed => {
            let i = bq.graph.index_of(&k.dec).expect("vertex label in graph");
            bq.graph.neighbors(i).len() + 2
        }
        MoveKind::Commute => unreachable!("commuting moves do not mutate"),
    };
    let got = bq.quiver.degree(&k);
    ensure(got == expected, || format!("{k} has {got} adjacent arrows, expected {expected}"))
}

fn check_quiver(bq: &BraidQuiver, target: &BraidQuiver, mv: &BraidMove) -> Result<()> {
    let map = relabel_after_move(&bq.word, mv, &bq.graph)?;
    let mutated = match mutation_vertex(&bq.word, mv, true) {
        Some(k) => bq.quiver.mutate(&k)?,
        None => bq.quiver.clone(),
    };
    ensure(mutated.relabel(&map)? == target.quiver, || {
        "mutated quiver differs from Q(y~) under the relabeling".into()
    })
}

/// Knobs shared by every case of a sweep.
#[derive(Clone, Debug)]
pub struct SweepOptions {
    /// Seeded coefficients are `±2^e` with `|e| <= max_exp`.
    pub max_exp: u32,
    /// Truncation degree for random right-equivalences; `None` uses the
    /// default for the word.
    pub truncation: Option<usize>,
    /// Longest path in the higher part of random right-equivalences.
    pub phi_path_len: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            max_exp: 4,
            truncation: None,
            phi_path_len: 3,
        }
    }
}

fn check_cuts(bq: &BraidQuiver, w: &crate::potential::Potential, seed: u64, opts: &SweepOptions) -> Result<()> {
    let cycles = enumerate_abbar_cycles(bq)?;
    let longest = cycles.iter().map(|c| c.path.degree()).max().unwrap_or(0);
    let n = opts.truncation.unwrap_or_else(|| default_truncation(longest));
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xC0FF_EE00);
    let phi = random_right_equivalence(&bq.quiver, &mut rng, n, opts.phi_path_len);
    let image = apply_right_equivalence(&phi, w)?;
    for c in &cycles {
        let via = coefficient_via_cuts(w, &phi, &c.path, &bq.quiver)?;
        let direct = image.coeff(&c.path);
        ensure(via == direct, || format!("cut formula gives {via}, expansion gives {direct} on {}", c.path))?;
    }
    Ok(())
}

/// Runs every check on one word with a primitive potential seeded by `seed`.
pub fn check_word(word: &Word, graph: &GammaGraph, seed: u64, opts: &SweepOptions) -> SweepReport {
    let seeding = &Seeding::PowersOfTwo { seed, max_exp: opts.max_exp };
    let mut report = SweepReport {
        words: 1,
        ..SweepReport::default()
    };
    let bq = match build_qxtilde(word, graph) {
        Ok(bq) => bq,
        Err(e) => {
            report.record(Check::Structure, word, None, Err(e));
            return report;
        }
    };
    let setup = (|| -> Result<_> {
        let cw = build_complex(&bq)?;
        let basis = two_cycle_basis(&cw);
        let w = seeded_potential(&cw.cells, seeding)?;
        Ok((cw, basis, w))
    })();
    let (cw, basis, w) = match setup {
        Ok(s) => s,
        Err(e) => {
            report.record(Check::Structure, word, None, Err(e));
            return report;
        }
    };
    let betti = graph.first_betti_number();
    report.record(
        Check::RankLaw,
        word,
        None,
        ensure(basis.len() == betti, || format!("basis has {} vectors, Betti number is {betti}", basis.len())),
    );
    report.record(Check::CutIdentity, word, None, check_cuts(&bq, &w, seed, opts));
    let before = twisted_class_of(&w, &cw, &basis);

    for mv in word.enumerate_moves(&graph.cartan(), true) {
        let y = match word.apply_move(&mv, &graph.cartan()) {
            Ok(y) => y,
            Err(e) => {
                report.record(Check::QuiverConsistency, word, Some(&mv), Err(e));
                continue;
            }
        };
        let target = match build_qxtilde(&y, graph) {
            Ok(t) if is_usable(&y, graph) => t,
            _ => {
                report.skipped_moves += 1;
                continue;
            }
        };
        report.moves += 1;
        report.record(Check::Structure, word, Some(&mv), check_structure(&bq, &mv));
        report.record(Check::QuiverConsistency, word, Some(&mv), check_quiver(&bq, &target, &mv));

        let outcome = match mutate_along_move(&bq, &w, &mv) {
            Ok(o) => o,
            Err(Error::Unsupported(msg)) => {
                report.unsupported.push(format!("`{word}` {mv}: {msg}"));
                continue;
            }
            Err(e) => {
                report.record(Check::Primitivity, word, Some(&mv), Err(e));
                continue;
            }
        };
        report.record(Check::Primitivity, word, Some(&mv), Ok(()));

        let twisted = (|| -> Result<()> {
            let cw_y = build_complex(&outcome.target)?;
            let t = transport_basis(&mv, &bq, &cw, &cw_y, &basis)?;
            let after = transported_class(&outcome.qp.potential, &cw_y, &t)?;
            let before = before.as_ref().map_err(|e| Error::Invariant(e.to_string()))?;
            ensure(*before == after, || format!("twisted class {before} became {after}"))
        })();
        report.record(Check::TwistedClass, word, Some(&mv), twisted);

        if let Some(k) = &outcome.vertex {
            let involution = (|| -> Result<()> {
                let qp = QP::from_quiver(&bq.quiver, w.clone())?;
                let back = mutate(&mutate(&qp, k)?, k)?;
                ensure(back.quiver.to_quiver()? == bq.quiver, || "double mutation changed the quiver".into())?;
                let cycles = enumerate_abbar_cycles(&bq)?;
                ensure(is_primitive(&back.potential, &cycles), || {
                    "double mutation left a non-primitive potential".into()
                })?;
                let again = twisted_class_of(&back.potential, &cw, &basis)?;
                let before = before.as_ref().map_err(|e| Error::Invariant(e.to_string()))?;
                ensure(*before == again, || format!("twisted class {before} became {again}"))
            })();
            report.record(Check::Involution, word, Some(&mv), involution);
        }
    }
    report
}

/// Deterministic seed of case `i` in a sweep seeded by `seed`.
pub fn case_seed(seed: u64, i: usize) -> u64 {
    seed ^ (i as u64).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Draws `count` words and checks them in parallel. Case `i` uses its own
/// generator seeded by [`case_seed`], so results do not depend on scheduling.
pub fn sweep(graph: &GammaGraph, count: usize, max_len: usize, seed: u64, opts: &SweepOptions) -> Result<SweepReport> {
    let cases: Vec<Result<SweepReport>> = (0..count)
        .into_par_iter()
        .map(|i| {
            let s = case_seed(seed, i);
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let word = random_word(graph, &mut rng, max_len)?;
            Ok(check_word(&word, graph, s, opts))
        })
        .collect();
    let mut total = SweepReport::default();
    for c in cases {
        total = total.merge(c?);
    }
    Ok(total)
}

/// Greedily deletes letters while `fails` keeps holding and the word stays
/// valid, returning a locally minimal word.
pub fn minimize(word: &Word, graph: &GammaGraph, mut fails: impl FnMut(&Word) -> bool) -> Word {
    let mut current = word.clone();
    loop {
        let mut shrunk = false;
        for i in 0..current.len() {
            let mut letters = current.letters().to_vec();
            letters.remove(i);
            let Ok(candidate) = Word::new(letters) else { continue };
            if is_usable(&candidate, graph) && fails(&candidate)
            {
                current = candidate;
                shrunk = true;
                break;
            }
        }
        if !shrunk {
            return current;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_words_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for g in [GammaGraph::a_n(2), GammaGraph::a_n(3), GammaGraph::cycle(3)] {
            for _ in 0..20 {
                let w = random_word(&g, &mut rng, 14).unwrap();
                assert!(w.len() <= 14);
                assert!(w.check_conditions(&g).is_ok());
            }
        }
    }

    #[test]
    fn too_short_bound_is_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(random_word(&GammaGraph::a_n(3), &mut rng, 5).is_err());
    }

    #[test]
    fn small_sweeps_are_clean() {
        for g in [GammaGraph::a_n(2), GammaGraph::cycle(3)] {
            let r = sweep(&g, 12, 14, 99, &SweepOptions::default()).unwrap();
            assert!(r.failures.is_empty(), "{}", r.failures[0]);
            assert!(r.moves > 0);
        }
    }

    #[test]
    fn sweeps_are_deterministic() {
        let g = GammaGraph::a_n(3);
        let a = sweep(&g, 6, 14, 5, &SweepOptions::default()).unwrap();
        let b = sweep(&g, 6, 14, 5, &SweepOptions::default()).unwrap();
        assert_eq!(a.moves, b.moves);
        assert_eq!(a.passed, b.passed);
    }

    #[test]
    fn minimize_keeps_the_predicate() {
        let g = GammaGraph::a_n(2);
        let w = Word::parse("1 2 1 2 1 2 1 2 1 2", &g).unwrap();
        let m = minimize(&w, &g, |x| x.len() >= 7);
        assert!(m.len() >= 7 && m.len() < w.len());
    }
}
