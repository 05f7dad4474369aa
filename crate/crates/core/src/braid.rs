//! Words in the free semigroup on letters `s_α`, `s_ᾱ`, local braid moves,
//! and the validity conditions required for the cyclic quiver.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::cartan::{CartanMatrix, GammaGraph, Label};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub root: Label,
    pub barred: bool,
}

impl Letter {
    pub fn new(root: impl Into<Label>, barred: bool) -> Self {
        Letter {
            root: root.into(),
            barred,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.barred {
            write!(f, "{}~", self.root)
        } else {
            write!(f, "{}", self.root)
        }
    }
}

/// A nonempty word. Occurrence indices are always recomputed from the
/// letter sequence.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn new(letters: Vec<Letter>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::parse("word", 1, "a word needs at least one letter"));
        }
        Ok(Word { letters })
    }

    /// Parses whitespace-separated tokens: `a` is `s_a`, `a~` is `s_ā`.
    /// Every root must be a vertex of `graph`.
    pub fn parse(text: &str, graph: &GammaGraph) -> Result<Self> {
        let mut letters = Vec::new();
        for (n, token) in text.split_whitespace().enumerate() {
            let (root, barred) = match token.strip_suffix('~') {
                Some(r) => (r, true),
                None => (token, false),
            };
            let root = Label::from(root);
            if root.as_str().is_empty() || graph.index_of(&root).is_none() {
                return Err(Error::parse(
                    "word",
                    1,
                    format!("token {} `{token}` is not a vertex of the graph", n + 1),
                ));
            }
            letters.push(Letter { root, barred });
        }
        Word::new(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letter(&self, p: usize) -> &Letter {
        &self.letters[p % self.letters.len()]
    }

    /// `n_α` for every root that occurs.
    pub fn occurrence_counts(&self) -> BTreeMap<Label, usize> {
        let mut counts = BTreeMap::new();
        for l in &self.letters {
            *counts.entry(l.root.clone()).or_insert(0) += 1;
        }
        counts
    }

    pub fn count(&self, root: &Label) -> usize {
        self.letters.iter().filter(|l| &l.root == root).count()
    }

    /// Number of letters with the given root strictly before position `p`.
    pub fn count_before(&self, p: usize, root: &Label) -> usize {
        self.letters[..p].iter().filter(|l| &l.root == root).count()
    }

    /// 1-based occurrence index of the letter at `p` among letters of its root.
    pub fn occurrence(&self, p: usize) -> usize {
        self.count_before(p, &self.letters[p].root) + 1
    }

    /// Cyclic shift: `rotate(s_a s_b s_c, 1) = s_b s_c s_a`.
    pub fn rotate(&self, k: isize) -> Word {
        let n = self.letters.len() as isize;
        let k = k.rem_euclid(n) as usize;
        let mut letters = self.letters.clone();
        letters.rotate_left(k);
        Word { letters }
    }

    pub fn enumerate_moves(&self, cartan: &CartanMatrix, cyclic: bool) -> Vec<BraidMove> {
        let n = self.len();
        let mut moves = Vec::new();
        for p in 0..n {
            for kind in [MoveKind::Commute, MoveKind::ExchangeAba, MoveKind::CommuteMixed] {
                let span = kind.span();
                if span > n || (!cyclic && p + span > n) {
                    continue;
                }
                let mv = BraidMove { kind, position: p };
                if self.matches(&mv, cartan).is_ok() {
                    moves.push(mv);
                }
            }
        }
        moves
    }

    fn matches(&self, mv: &BraidMove, cartan: &CartanMatrix) -> Result<()> {
        let n = self.len();
        let fail = |reason: &str| {
            Err(Error::InvalidMove {
                mv: mv.to_string(),
                reason: reason.to_string(),
            })
        };
        if mv.position >= n || mv.kind.span() > n {
            return fail("position out of range");
        }
        let a = self.letter(mv.position);
        let b = self.letter(mv.position + 1);
        let c_ab = || -> Result<i64> {
            cartan
                .entry(&a.root, &b.root)
                .ok_or_else(|| Error::UnknownLabel(format!("{}/{}", a.root, b.root)))
        };
        match mv.kind {
            MoveKind::Commute => {
                if a.root == b.root {
                    return fail("commuting letters must have different roots");
                }
                if a.barred != b.barred || c_ab()? == 0 {
                    Ok(())
                } else {
                    fail("same-sign letters commute only when C = 0")
                }
            }
            MoveKind::CommuteMixed => {
                if a.root == b.root && a.barred != b.barred {
                    Ok(())
                } else {
                    fail("expected s_a s_ā or s_ā s_a")
                }
            }
            MoveKind::ExchangeAba => {
                let c = self.letter(mv.position + 2);
                if a.root != b.root && a == c && a.barred == b.barred && c_ab()? == -1 {
                    Ok(())
                } else {
                    fail("expected s_a s_b s_a with C_ab = -1 and equal bars")
                }
            }
        }
    }

    /// Rewrites the fragment addressed by `mv`. Positions are taken modulo
    /// the word length, so wrapped fragments rewrite both ends of the word.
    pub fn apply_move(&self, mv: &BraidMove, cartan: &CartanMatrix) -> Result<Word> {
        self.matches(mv, cartan)?;
        let n = self.len();
        let p = mv.position;
        let mut letters = self.letters.clone();
        match mv.kind {
            MoveKind::Commute | MoveKind::CommuteMixed => {
                letters.swap(p, (p + 1) % n);
            }
            MoveKind::ExchangeAba => {
                let a = self.letter(p).clone();
                let b = self.letter(p + 1).clone();
                letters[p] = b.clone();
                letters[(p + 1) % n] = a;
                letters[(p + 2) % n] = b;
            }
        }
        Ok(Word { letters })
    }

    /// Checks (exclusions) `n_α >= 3` for every vertex of Γ and (connect)
    /// existence of an αβ̄-cycle for every edge.
    pub fn check_conditions(&self, graph: &GammaGraph) -> ConditionReport {
        let mut violations = Vec::new();
        for root in graph.vertices() {
            let count = self.count(root);
            if count < 3 {
                violations.push(Violation::TooFewLetters {
                    root: root.clone(),
                    count,
                });
            }
        }
        for (i, j) in graph.edges() {
            let (a, b) = (&graph.vertices()[i], &graph.vertices()[j]);
            // Letters of class {s_a, s_b̄} and of class {s_ā, s_b} must both occur.
            let mut class_a = false;
            let mut class_b = false;
            for l in &self.letters {
                if &l.root == a {
                    if l.barred {
                        class_b = true
                    } else {
                        class_a = true
                    }
                } else if &l.root == b {
                    if l.barred {
                        class_a = true
                    } else {
                        class_b = true
                    }
                }
            }
            if !(class_a && class_b) {
                violations.push(Violation::MissingCycle {
                    alpha: a.clone(),
                    beta: b.clone(),
                });
            }
        }
        ConditionReport { violations }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MoveKind {
    /// `s_a s_b = s_b s_a` for `C_ab = 0`, and `s_a s_b̄ = s_b̄ s_a` for `a != b`.
    Commute,
    /// `s_a s_b s_a = s_b s_a s_b` for `C_ab = -1` (and the barred version).
    ExchangeAba,
    /// `s_a s_ā = s_ā s_a`.
    CommuteMixed,
}

impl MoveKind {
    pub fn span(self) -> usize {
        match self {
            MoveKind::ExchangeAba => 3,
            _ => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MoveKind::Commute => "commute",
            MoveKind::ExchangeAba => "aba",
            MoveKind::CommuteMixed => "mixed",
        }
    }

    /// Whether the move changes the quiver by a mutation.
    pub fn mutates(self) -> bool {
        !matches!(self, MoveKind::Commute)
    }
}

/// A move addressed by kind and 0-based position of its first letter.
/// Displayed as `kind@p` with a 1-based position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BraidMove {
    pub kind: MoveKind,
    pub position: usize,
}

impl BraidMove {
    pub fn wraps(&self, len: usize) -> bool {
        self.position + self.kind.span() > len
    }
}

impl fmt::Display for BraidMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.kind.name(), self.position + 1)
    }
}

impl FromStr for BraidMove {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::parse("move", 1, format!("expected `kind@position`, got `{s}`"));
        let (kind, pos) = s.trim().split_once('@').ok_or_else(bad)?;
        let kind = match kind {
            "commute" => MoveKind::Commute,
            "aba" => MoveKind::ExchangeAba,
            "mixed" => MoveKind::CommuteMixed,
            _ => return Err(bad()),
        };
        let pos: usize = pos.parse().map_err(|_| bad())?;
        if pos == 0 {
            return Err(bad());
        }
        Ok(BraidMove {
            kind,
            position: pos - 1,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    TooFewLetters { root: Label, count: usize },
    MissingCycle { alpha: Label, beta: Label },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::TooFewLetters { root, count } => {
                write!(f, "n_{root} = {count} < 3")
            }
            Violation::MissingCycle { alpha, beta } => {
                write!(f, "no {alpha}{beta}~-cycle between perches {alpha} and {beta}")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConditionReport {
    pub violations: Vec<Violation>,
}

impl ConditionReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn exclusions_ok(&self) -> bool {
        !self
            .violations
            .iter()
            .any(|v| matches!(v, Violation::TooFewLetters { .. }))
    }
}

impl fmt::Display for ConditionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return f.write_str("ok");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join("; "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn a2() -> GammaGraph {
        GammaGraph::new(["a", "b"], [("a", "b")]).unwrap()
    }

    fn w(g: &GammaGraph, s: &str) -> Word {
        Word::parse(s, g).unwrap()
    }

    #[test]
    fn counts_follow_the_indexing_rule() {
        let g = a2();
        let x = w(&g, "a a a~ b~ a b");
        let counts = x.occurrence_counts();
        assert_eq!(counts[&Label::from("a")], 4);
        assert_eq!(counts[&Label::from("b")], 2);
        assert_eq!(x.occurrence(4), 4);
        assert_eq!(x.occurrence(5), 2);
        assert_eq!(w(&g, "a").occurrence_counts()[&Label::from("a")], 1);
        let cube = w(&g, "a b a b a b").occurrence_counts();
        assert_eq!((cube[&Label::from("a")], cube[&Label::from("b")]), (3, 3));
    }

    #[test]
    fn moves_of_small_words() {
        let g = a2();
        let c = g.cartan();
        assert_eq!(
            w(&g, "a b a").enumerate_moves(&c, false),
            vec![BraidMove {
                kind: MoveKind::ExchangeAba,
                position: 0
            }]
        );
        assert_eq!(
            w(&g, "a a~").enumerate_moves(&c, false),
            vec![BraidMove {
                kind: MoveKind::CommuteMixed,
                position: 0
            }]
        );
        assert!(w(&g, "a b").enumerate_moves(&c, false).is_empty());
        // s_a s_b̄ commutes even though a and b are adjacent
        assert_eq!(w(&g, "a b~").enumerate_moves(&c, false)[0].kind, MoveKind::Commute);
    }

    #[test]
    fn apply_moves() {
        let g = a2();
        let c = g.cartan();
        let x = w(&g, "a b a");
        let mv: BraidMove = "aba@1".parse().unwrap();
        let y = x.apply_move(&mv, &c).unwrap();
        assert_eq!(y.to_string(), "b a b");
        assert_eq!(y.apply_move(&mv, &c).unwrap(), x);
        let m: BraidMove = "mixed@1".parse().unwrap();
        assert_eq!(w(&g, "a a~").apply_move(&m, &c).unwrap().to_string(), "a~ a");
        assert!(w(&g, "a b").apply_move(&m, &c).is_err());
    }

    #[test]
    fn conditions() {
        let g = a2();
        assert!(w(&g, "a b a b a b").check_conditions(&g).is_ok());
        let report = w(&g, "a b a").check_conditions(&g);
        assert_eq!(
            report.violations[..2],
            [
                Violation::TooFewLetters {
                    root: "a".into(),
                    count: 2
                },
                Violation::TooFewLetters {
                    root: "b".into(),
                    count: 1
                }
            ]
        );
        // only letters of the class {s_a, s_b̄}: no cycle between the perches
        let r = w(&g, "a b~ a b~ a b~").check_conditions(&g);
        assert_eq!(
            r.violations,
            vec![Violation::MissingCycle {
                alpha: "a".into(),
                beta: "b".into()
            }]
        );
    }

    #[test]
    fn rotation() {
        let g = GammaGraph::a_n(3);
        let x = w(&g, "1 2 3");
        assert_eq!(x.rotate(1).to_string(), "2 3 1");
        assert_eq!(x.rotate(3), x);
        assert_eq!(x.rotate(-1).to_string(), "3 1 2");
    }

    #[test]
    fn move_text_round_trip() {
        for s in ["aba@3", "mixed@1", "commute@12"] {
            assert_eq!(s.parse::<BraidMove>().unwrap().to_string(), s);
        }
        assert!("aba@0".parse::<BraidMove>().is_err());
        assert!("swap@2".parse::<BraidMove>().is_err());
    }

    fn arb_word() -> impl Strategy<Value = Vec<(u8, bool)>> {
        prop::collection::vec((0u8..3, any::<bool>()), 1..12)
    }

    fn build(raw: &[(u8, bool)]) -> Word {
        Word::new(
            raw.iter()
                .map(|&(r, b)| Letter::new((r + 1).to_string(), b))
                .collect(),
        )
        .unwrap()
    }

    proptest! {
        #[test]
        fn moves_are_involutions(raw in arb_word(), cyclic in any::<bool>()) {
            let g = GammaGraph::cycle(3);
            let c = g.cartan();
            let x = build(&raw);
            for mv in x.enumerate_moves(&c, cyclic) {
                let y = x.apply_move(&mv, &c).unwrap();
                let mut expected = x.occurrence_counts();
                if mv.kind == MoveKind::ExchangeAba {
                    *expected.get_mut(&x.letter(mv.position).root).unwrap() -= 1;
                    *expected.entry(x.letter(mv.position + 1).root.clone()).or_insert(0) += 1;
                }
                prop_assert_eq!(y.occurrence_counts(), expected);
                prop_assert_eq!(y.len(), x.len());
                prop_assert_eq!(y.apply_move(&mv, &c).unwrap(), x.clone());
            }
        }

        #[test]
        fn linear_moves_are_a_sublist_of_cyclic(raw in arb_word()) {
            let g = GammaGraph::a_n(3);
            let c = g.cartan();
            let x = build(&raw);
            let cyc = x.enumerate_moves(&c, true);
            for mv in x.enumerate_moves(&c, false) {
                prop_assert!(cyc.contains(&mv));
            }
        }

        #[test]
        fn rotation_preserves_counts(raw in arb_word(), k in -20isize..20) {
            let x = build(&raw);
            prop_assert_eq!(x.rotate(k).occurrence_counts(), x.occurrence_counts());
            prop_assert_eq!(x.rotate(k).rotate(-k), x);
        }
    }
}
