//! Potentials on quivers and the right-equivalences acting on them.
//! The αβ̄-cycles of `Q(x̃)` live here too, with their chords and cuts.
//!
//! Paths are stored in traversal order: `t(a_i) = s(a_{i+1})`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::cartan::Label;
use crate::error::{Error, Result};
use crate::qbuild::BraidQuiver;
use crate::quiver::{Arrow, Quiver, Vertex};

/// Exact scalars of the base field.
pub type Scalar = BigRational;

pub fn scalar(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

/// `±2^e` as an exact scalar.
pub fn signed_pow2(negative: bool, e: i32) -> Scalar {
    let p = BigRational::from_integer(BigInt::one() << e.unsigned_abs());
    let v = if e < 0 { p.recip() } else { p };
    if negative {
        -v
    } else {
        v
    }
}

pub fn parse_scalar(s: &str) -> Result<Scalar> {
    let s = s.trim();
    let parse_int = |t: &str| {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::parse("scalar", 1, format!("`{s}` is not a rational number")))
    };
    let value = match s.split_once('/') {
        Some((n, d)) => {
            let d = parse_int(d)?;
            if d.is_zero() {
                return Err(Error::parse("scalar", 1, "zero denominator"));
            }
            BigRational::new(parse_int(n)?, d)
        }
        None => BigRational::from_integer(parse_int(s)?),
    };
    Ok(value)
}

/// A path as an arrow sequence in traversal order.
pub type Path = Vec<Arrow>;

fn composable(path: &[Arrow]) -> bool {
    path.windows(2).all(|w| w[0].tgt == w[1].src)
}

/// A cycle stored in its lexicographically minimal rotation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CyclicPath {
    arrows: Vec<Arrow>,
}

impl CyclicPath {
    pub fn new(arrows: Vec<Arrow>) -> Result<Self> {
        let (Some(first), Some(last)) = (arrows.first(), arrows.last()) else {
            return Err(Error::Potential("empty cycle".into()));
        };
        if !composable(&arrows) || last.tgt != first.src {
            let text: Vec<String> = arrows.iter().map(|a| a.to_string()).collect();
            return Err(Error::Potential(format!("not a cycle: {}", text.join(" "))));
        }
        let n = arrows.len();
        let best = (0..n)
            .min_by(|&a, &b| {
                (0..n)
                    .map(|t| &arrows[(a + t) % n])
                    .cmp((0..n).map(|t| &arrows[(b + t) % n]))
            })
            .expect("nonempty");
        let mut arrows = arrows;
        arrows.rotate_left(best);
        Ok(CyclicPath { arrows })
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn degree(&self) -> usize {
        self.arrows.len()
    }

    pub fn count(&self, a: &Arrow) -> usize {
        self.arrows.iter().filter(|b| *b == a).count()
    }

    pub fn vertices(&self) -> Vec<Vertex> {
        self.arrows.iter().map(|a| a.src.clone()).collect()
    }

    /// The stored sequence rotated to begin at position `i`.
    pub fn rotated(&self, i: usize) -> Path {
        let mut v = self.arrows.clone();
        let n = v.len();
        v.rotate_left(i % n);
        v
    }
}

impl fmt::Display for CyclicPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.arrows.iter().map(|a| a.to_string()).collect();
        write!(f, "[{}]", parts.join(" "))
    }
}

/// A finite linear combination of cycles with nonzero coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Potential {
    terms: BTreeMap<CyclicPath, Scalar>,
}

impl Potential {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, path: CyclicPath, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(path);
        match entry {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_path(&mut self, arrows: Path, coeff: Scalar) -> Result<()> {
        self.add(CyclicPath::new(arrows)?, coeff);
        Ok(())
    }

    pub fn coeff(&self, path: &CyclicPath) -> Scalar {
        self.terms.get(path).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&CyclicPath, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn support(&self) -> BTreeSet<&CyclicPath> {
        self.terms.keys().collect()
    }

    pub fn max_degree(&self) -> usize {
        self.terms.keys().map(CyclicPath::degree).max().unwrap_or(0)
    }

    /// Terms of degree two; a potential without them is reduced.
    pub fn degree_two_terms(&self) -> Vec<(&CyclicPath, &Scalar)> {
        self.terms.iter().filter(|(p, _)| p.degree() == 2).collect()
    }

    pub fn is_reduced(&self) -> bool {
        self.degree_two_terms().is_empty()
    }

    pub fn arrows_used(&self) -> BTreeSet<&Arrow> {
        self.terms.keys().flat_map(|p| p.arrows.iter()).collect()
    }

    /// Every arrow of every term exists in `q`.
    pub fn check_against(&self, q: &Quiver) -> Result<()> {
        for a in self.arrows_used() {
            if !q.has_arrow(a) {
                return Err(Error::Potential(format!("arrow {a} is not in the quiver")));
            }
        }
        Ok(())
    }

    /// Renames arrows along `map`; arrows missing from the map are kept.
    pub fn rename_arrows(&self, map: &BTreeMap<Arrow, Arrow>) -> Result<Potential> {
        let mut out = Potential::new();
        for (p, c) in &self.terms {
            let arrows = p
                .arrows
                .iter()
                .map(|a| map.get(a).cloned().unwrap_or_else(|| a.clone()))
                .collect();
            out.add_path(arrows, c.clone())?;
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Scalar) -> Potential {
        let mut out = Potential::new();
        for (p, v) in &self.terms {
            out.add(p.clone(), v * c);
        }
        out
    }

    pub fn to_json_value(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(p, c)| {
                let cycle: Vec<Value> = p.arrows.iter().map(arrow_to_json).collect();
                json!({ "coeff": c.to_string(), "cycle": cycle })
            })
            .collect();
        json!({ "terms": terms })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json_value()).expect("serializes");
        s.push('\n');
        s
    }

    pub fn from_json_value(value: &Value) -> Result<Potential> {
        let bad = |m: &str| Error::parse("potential", 1, m.to_string());
        let terms = value
            .get("terms")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing `terms` array"))?;
        let mut out = Potential::new();
        for (n, t) in terms.iter().enumerate() {
            let coeff = t
                .get("coeff")
                .and_then(Value::as_str)
                .ok_or_else(|| bad(&format!("term {n}: missing `coeff` string")))?;
            let coeff = parse_scalar(coeff)?;
            if coeff.is_zero() {
                return Err(bad(&format!("term {n}: zero coefficient")));
            }
            let cycle = t
                .get("cycle")
                .and_then(Value::as_array)
                .ok_or_else(|| bad(&format!("term {n}: missing `cycle` array")))?;
            let arrows = cycle.iter().map(arrow_from_json).collect::<Result<Vec<_>>>()?;
            out.add_path(arrows, coeff)?;
        }
        Ok(out)
    }

    pub fn from_json(text: &str) -> Result<Potential> {
        Potential::from_json_value(&serde_json::from_str(text)?)
    }
}

impl fmt::Display for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(p, c)| format!("{c}*{p}")).collect();
        f.write_str(&parts.join(" + "))
    }
}

/// `[srcDec, srcIdx, tgtDec, tgtIdx]`, with a fifth entry for parallel arrows.
pub fn arrow_to_json(a: &Arrow) -> Value {
    let mut v = vec![
        json!(a.src.dec.as_str()),
        json!(a.src.idx),
        json!(a.tgt.dec.as_str()),
        json!(a.tgt.idx),
    ];
    if a.ord > 0 {
        v.push(json!(a.ord));
    }
    Value::Array(v)
}

pub fn arrow_from_json(v: &Value) -> Result<Arrow> {
    let bad = || Error::parse("potential", 1, format!("bad arrow {v}"));
    let items = v.as_array().ok_or_else(bad)?;
    if items.len() != 4 && items.len() != 5 {
        return Err(bad());
    }
    let dec = |i: usize| items[i].as_str().map(Label::from).ok_or_else(bad);
    let idx = |i: usize| items[i].as_u64().map(|x| x as usize).ok_or_else(bad);
    let ord = if items.len() == 5 { idx(4)? } else { 0 };
    Ok(Arrow::with_ord(
        Vertex::new(dec(0)?, idx(1)?),
        Vertex::new(dec(2)?, idx(3)?),
        ord,
    ))
}

/// Default truncation degree: twice the longest cycle, unless the
/// `BRAIDQP_TRUNCATION` environment variable holds a positive integer.
pub fn default_truncation(longest_cycle: usize) -> usize {
    std::env::var("BRAIDQP_TRUNCATION")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or(2 * longest_cycle.max(1))
}

/// All paths of length `2..=max_len` parallel to `a`, sorted.
pub fn parallel_paths(q: &Quiver, a: &Arrow, max_len: usize) -> Vec<Path> {
    let arrows = q.arrows();
    let mut out = Vec::new();
    let mut stack: Vec<Path> = arrows.iter().filter(|b| b.src == a.src).map(|b| vec![b.clone()]).collect();
    while let Some(p) = stack.pop() {
        let last = p.last().expect("paths are nonempty");
        if p.len() >= 2 && last.tgt == a.tgt {
            out.push(p.clone());
        }
        if p.len() < max_len {
            for b in arrows.iter().filter(|b| b.src == last.tgt) {
                let mut np = p.clone();
                np.push(b.clone());
                stack.push(np);
            }
        }
    }
    out.sort();
    out
}

/// A right-equivalence with linear part `±1, ±2, ±3` and each parallel path
/// of length at most `max_len` included with probability one half.
pub fn random_right_equivalence(q: &Quiver, rng: &mut impl Rng, truncation: usize, max_len: usize) -> RightEquivalence {
    let mut phi = RightEquivalence::identity(truncation);
    for a in q.arrows() {
        let sign = if rng.gen_bool(0.5) { -1 } else { 1 };
        phi.set_linear(a.clone(), scalar(sign * rng.gen_range(1..4)))
            .expect("nonzero linear part");
        for path in parallel_paths(q, &a, max_len) {
            if rng.gen_bool(0.5) {
                phi.add_higher(a.clone(), path, scalar(rng.gen_range(-3..4)))
                    .expect("parallel path of length at least 2");
            }
        }
    }
    phi
}

/// An automorphism of the completed path algebra fixing vertices: a diagonal
/// linear part and, per arrow, a sum of parallel paths of length at least 2.
#[derive(Clone, Debug)]
pub struct RightEquivalence {
    linear: BTreeMap<Arrow, Scalar>,
    higher: BTreeMap<Arrow, Vec<(Path, Scalar)>>,
    pub truncation: usize,
}

impl RightEquivalence {
    pub fn identity(truncation: usize) -> Self {
        RightEquivalence {
            linear: BTreeMap::new(),
            higher: BTreeMap::new(),
            truncation,
        }
    }

    pub fn set_linear(&mut self, a: Arrow, c: Scalar) -> Result<()> {
        if c.is_zero() {
            return Err(Error::Potential(format!("zero linear coefficient for {a}")));
        }
        self.linear.insert(a, c);
        Ok(())
    }

    pub fn add_higher(&mut self, a: Arrow, path: Path, c: Scalar) -> Result<()> {
        if path.len() < 2 || !composable(&path) {
            return Err(Error::Potential("higher part must be a path of length >= 2".into()));
        }
        if path[0].src != a.src || path[path.len() - 1].tgt != a.tgt {
            return Err(Error::Potential(format!("path is not parallel to {a}")));
        }
        if c.is_zero() {
            return Ok(());
        }
        let entry = self.higher.entry(a).or_default();
        match entry.iter_mut().find(|(p, _)| *p == path) {
            Some((_, v)) => *v += c,
            None => entry.push((path, c)),
        }
        entry.retain(|(_, v)| !v.is_zero());
        Ok(())
    }

    pub fn linear(&self, a: &Arrow) -> Scalar {
        self.linear.get(a).cloned().unwrap_or_else(Scalar::one)
    }

    /// Coefficient of `path` in the higher part of the image of `a`.
    pub fn higher_coeff(&self, a: &Arrow, path: &[Arrow]) -> Scalar {
        self.higher
            .get(a)
            .and_then(|v| v.iter().find(|(p, _)| p == path))
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Scalar::zero)
    }

    pub fn is_diagonal(&self) -> bool {
        self.higher.is_empty()
    }

    fn image(&self, a: &Arrow) -> Vec<(Path, Scalar)> {
        let mut out = vec![(vec![a.clone()], self.linear(a))];
        if let Some(h) = self.higher.get(a) {
            out.extend(h.iter().cloned());
        }
        out
    }
}

/// Substitutes `a ↦ φ(a)` in every term and expands, keeping terms up to the
/// truncation degree.
pub fn apply_right_equivalence(phi: &RightEquivalence, w: &Potential) -> Result<Potential> {
    if w.max_degree() > phi.truncation {
        return Err(Error::Potential(format!(
            "truncation degree {} is below the potential's degree {}",
            phi.truncation,
            w.max_degree()
        )));
    }
    let mut out = Potential::new();
    for (cycle, c) in w.terms() {
        let images: Vec<Vec<(Path, Scalar)>> = cycle.arrows().iter().map(|a| phi.image(a)).collect();
        let mut acc = Vec::new();
        expand(&images, 0, &mut acc, c.clone(), phi.truncation, &mut out)?;
    }
    Ok(out)
}

fn expand(
    images: &[Vec<(Path, Scalar)>],
    i: usize,
    acc: &mut Path,
    coeff: Scalar,
    limit: usize,
    out: &mut Potential,
) -> Result<()> {
    if i == images.len() {
        out.add_path(acc.clone(), coeff)?;
        return Ok(());
    }
    for (path, c) in &images[i] {
        if acc.len() + path.len() + (images.len() - i - 1) > limit {
            continue;
        }
        let keep = acc.len();
        acc.extend(path.iter().cloned());
        expand(images, i + 1, acc, &coeff * c, limit, out)?;
        acc.truncate(keep);
    }
    Ok(())
}

/// A cycle attached to a maximal run of letters `s_α`, `s_β̄` in the cyclic
/// subsequence of `α`- and `β`-letters. The run holds `k` letters `s_α` and
/// `l` letters `s_β̄`, preceded by `i` letters with root `α` and `j` with root
/// `β`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbCycle {
    pub alpha: Label,
    pub beta: Label,
    pub path: CyclicPath,
    pub k: usize,
    pub l: usize,
    pub i: usize,
    pub j: usize,
}

impl AbCycle {
    /// Unordered pair `{α, β}` in label order.
    pub fn pair(&self) -> (Label, Label) {
        if self.alpha < self.beta {
            (self.alpha.clone(), self.beta.clone())
        } else {
            (self.beta.clone(), self.alpha.clone())
        }
    }

    /// `true` for αβ̄-cycles with `α < β`, `false` for the opposite orientation.
    pub fn is_forward(&self) -> bool {
        self.alpha < self.beta
    }
}

/// All αβ̄- and βᾱ-cycles of `Q(x̃)` for every edge of the graph, sorted by
/// canonical path.
pub fn enumerate_abbar_cycles(bq: &BraidQuiver) -> Result<Vec<AbCycle>> {
    let g = &bq.graph;
    let mut out = Vec::new();
    for (a, b) in g.edges() {
        let (a, b) = (&g.vertices()[a], &g.vertices()[b]);
        out.extend(cycles_for(bq, a, b)?);
        out.extend(cycles_for(bq, b, a)?);
    }
    out.sort_by(|x, y| x.path.cmp(&y.path));
    Ok(out)
}

fn cycles_for(bq: &BraidQuiver, alpha: &Label, beta: &Label) -> Result<Vec<AbCycle>> {
    let word = &bq.word;
    let positions: Vec<usize> = (0..word.len())
        .filter(|&p| &word.letter(p).root == alpha || &word.letter(p).root == beta)
        .collect();
    let in_run = |p: usize| {
        let l = word.letter(p);
        (&l.root == alpha) != l.barred
    };
    let Some(anchor) = positions.iter().position(|&p| !in_run(p)) else {
        return Ok(Vec::new());
    };
    let m = positions.len();
    let mut runs: Vec<Vec<usize>> = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    for t in 1..=m {
        let p = positions[(anchor + t) % m];
        if in_run(p) {
            current.push(p);
        } else if !current.is_empty() {
            runs.push(std::mem::take(&mut current));
        }
    }
    let (na, nb) = (bq.n(alpha), bq.n(beta));
    let mut out = Vec::new();
    for run in runs {
        let p0 = run[0];
        let i = word.count_before(p0, alpha);
        let j = word.count_before(p0, beta);
        let alphas: Vec<usize> = run.iter().copied().filter(|&p| &word.letter(p).root == alpha).collect();
        let betas: Vec<usize> = run.iter().copied().filter(|&p| &word.letter(p).root == beta).collect();
        let (k, l) = (alphas.len(), betas.len());
        let top_b = Vertex::new(beta.clone(), (j + l) % nb);
        let top_a = Vertex::new(alpha.clone(), (i + k) % na);
        let low_a = Vertex::new(alpha.clone(), i % na);
        let low_b = Vertex::new(beta.clone(), j % nb);
        let missing = |u: &Vertex, v: &Vertex| {
            Error::Conditions(format!("diagonal arrow {u}->{v} cancels, so the {alpha}{beta}-cycle is undefined"))
        };
        let mut arrows: Path = betas.iter().map(|&p| bq.horizontal[p].clone()).collect();
        arrows.push(bq.diagonal(&top_b, &top_a).ok_or_else(|| missing(&top_b, &top_a))?);
        arrows.extend(alphas.iter().rev().map(|&p| bq.horizontal[p].clone()));
        arrows.push(bq.diagonal(&low_a, &low_b).ok_or_else(|| missing(&low_a, &low_b))?);
        out.push(AbCycle {
            alpha: alpha.clone(),
            beta: beta.clone(),
            path: CyclicPath::new(arrows)?,
            k,
            l,
            i,
            j,
        });
    }
    Ok(out)
}

/// Number of αβ̄-cycles between the perches of `{α, β}`.
pub fn k_alpha_beta(cycles: &[AbCycle], a: &Label, b: &Label) -> usize {
    cycles
        .iter()
        .filter(|c| &c.alpha == a && &c.beta == b)
        .count()
}

/// How primitive coefficients are chosen.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Seeding {
    Ones,
    /// Independent `±2^e` with `|e| <= max_exp`, drawn from a seeded generator.
    PowersOfTwo { seed: u64, max_exp: u32 },
}

pub fn seeded_coefficients(cycles: &[AbCycle], seeding: &Seeding) -> Vec<Scalar> {
    match seeding {
        Seeding::Ones => vec![Scalar::one(); cycles.len()],
        Seeding::PowersOfTwo { seed, max_exp } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let m = *max_exp as i32;
            cycles
                .iter()
                .map(|_| signed_pow2(rng.gen_bool(0.5), rng.gen_range(-m..=m)))
                .collect()
        }
    }
}

/// The primitive potential `Σ coeff_C · C` over all listed cycles.
pub fn primitive_potential(cycles: &[AbCycle], coeffs: &[Scalar]) -> Result<Potential> {
    if coeffs.len() != cycles.len() {
        return Err(Error::Potential(format!(
            "{} coefficients for {} cycles",
            coeffs.len(),
            cycles.len()
        )));
    }
    let mut w = Potential::new();
    for (c, x) in cycles.iter().zip(coeffs) {
        if x.is_zero() {
            return Err(Error::Potential(format!("zero coefficient for {}", c.path)));
        }
        if w.terms.contains_key(&c.path) {
            return Err(Error::Potential(format!("cycle {} listed twice", c.path)));
        }
        w.add(c.path.clone(), x.clone());
    }
    Ok(w)
}

pub fn seeded_potential(cycles: &[AbCycle], seeding: &Seeding) -> Result<Potential> {
    primitive_potential(cycles, &seeded_coefficients(cycles, seeding))
}

/// Coefficients read off `w` in the order of `cycles`.
pub fn coefficients_of(w: &Potential, cycles: &[AbCycle]) -> Vec<Scalar> {
    cycles.iter().map(|c| w.coeff(&c.path)).collect()
}

/// `true` iff the support of `w` is exactly the set of αβ̄-cycles.
pub fn is_primitive(w: &Potential, cycles: &[AbCycle]) -> bool {
    let expected: BTreeSet<&CyclicPath> = cycles.iter().map(|c| &c.path).collect();
    w.support() == expected
}

/// An arrow `b` shortcutting the segment `start..=end` (cyclically) of a
/// cycle: `s(b) = s(a_start)` and `t(b) = t(a_end)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Chord {
    pub arrow: Arrow,
    pub start: usize,
    pub end: usize,
}

impl Chord {
    pub fn span(&self, n: usize) -> usize {
        (self.end + n - self.start) % n + 1
    }

    fn covers(&self, n: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.span(n)).map(move |t| (self.start + t) % n)
    }
}

/// Every chord of `cycle` in `q`, without any uniqueness requirement.
pub fn all_chords(cycle: &CyclicPath, q: &Quiver) -> Vec<Chord> {
    let arrows = cycle.arrows();
    let n = arrows.len();
    let mut out = Vec::new();
    for b in q.arrows() {
        for start in 0..n {
            if arrows[start].src != b.src {
                continue;
            }
            for span in 2..n {
                let end = (start + span - 1) % n;
                if arrows[end].tgt == b.tgt {
                    out.push(Chord {
                        arrow: b.clone(),
                        start,
                        end,
                    });
                }
            }
        }
    }
    out
}

/// All chords of an αβ̄-cycle; fails if some arrow shortcuts the cycle in
/// more than one way.
pub fn find_chords(cycle: &CyclicPath, q: &Quiver) -> Result<Vec<Chord>> {
    let chords = all_chords(cycle, q);
    let mut seen: BTreeMap<&Arrow, usize> = BTreeMap::new();
    for c in &chords {
        *seen.entry(&c.arrow).or_insert(0) += 1;
    }
    if let Some((a, _)) = seen.iter().find(|(_, &m)| m > 1) {
        return Err(Error::Invariant(format!("arrow {a} is a chord of {cycle} in several positions")));
    }
    Ok(chords)
}

/// Cross-checks chords of an αβ̄-cycle against the known configurations:
/// endpoints are corners of the cycle and the numbers of horizontal and
/// diagonal chords form an admissible pair.
pub fn check_chord_configuration(c: &AbCycle, chords: &[Chord], bq: &BraidQuiver) -> Result<(usize, usize)> {
    let na = bq.n(&c.alpha);
    let nb = bq.n(&c.beta);
    let corners = [
        Vertex::new(c.alpha.clone(), c.i % na),
        Vertex::new(c.alpha.clone(), (c.i + c.k) % na),
        Vertex::new(c.beta.clone(), c.j % nb),
        Vertex::new(c.beta.clone(), (c.j + c.l) % nb),
    ];
    let mut horizontal = 0;
    let mut diagonal = 0;
    for ch in chords {
        if !corners.contains(&ch.arrow.src) || !corners.contains(&ch.arrow.tgt) {
            return Err(Error::Invariant(format!("chord {} of {} leaves the corners", ch.arrow, c.path)));
        }
        if ch.arrow.src.dec == ch.arrow.tgt.dec {
            horizontal += 1;
        } else {
            diagonal += 1;
        }
    }
    const ADMISSIBLE: [(usize, usize); 7] = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (1, 2)];
    if !ADMISSIBLE.contains(&(horizontal, diagonal)) {
        return Err(Error::Invariant(format!(
            "{horizontal} horizontal and {diagonal} diagonal chords on {}",
            c.path
        )));
    }
    Ok((horizontal, diagonal))
}

fn check_disjoint(n: usize, chords: &[Chord]) -> Result<Vec<Option<usize>>> {
    let mut owner = vec![None; n];
    for (ci, ch) in chords.iter().enumerate() {
        if ch.start >= n || ch.end >= n || ch.span(n) < 2 || ch.span(n) > n {
            return Err(Error::Potential("chord indices out of range".into()));
        }
        for t in ch.covers(n) {
            if owner[t].replace(ci).is_some() {
                return Err(Error::Potential("chords intersect".into()));
            }
        }
    }
    Ok(owner)
}

/// Replaces each chord's segment by the chord arrow.
pub fn cut(cycle: &CyclicPath, chords: &[Chord]) -> Result<CyclicPath> {
    let arrows = cycle.arrows();
    let n = arrows.len();
    let owner = check_disjoint(n, chords)?;
    let begin = chords.first().map(|c| c.start).unwrap_or(0);
    let mut out = Vec::new();
    let mut t = 0;
    while t < n {
        let i = (begin + t) % n;
        match owner[i] {
            Some(ci) => {
                let ch = &chords[ci];
                if ch.start != i {
                    return Err(Error::Potential("chord segment split by the starting point".into()));
                }
                out.push(ch.arrow.clone());
                t += ch.span(n);
            }
            None => {
                out.push(arrows[i].clone());
                t += 1;
            }
        }
    }
    CyclicPath::new(out)
}

/// The segment `a_start … a_end` shortcut by the chord.
pub fn co_cut(cycle: &CyclicPath, chord: &Chord) -> Path {
    let n = cycle.degree();
    chord.covers(n).map(|i| cycle.arrows()[i].clone()).collect()
}

/// The coefficient of `cycle` in `φ(W)` computed by summing, over all
/// collections of nonintersecting chords, the coefficient of the cut cycle
/// times the chords' higher coefficients and the linear factors of the
/// remaining arrows.
pub fn coefficient_via_cuts(w: &Potential, phi: &RightEquivalence, cycle: &CyclicPath, q: &Quiver) -> Result<Scalar> {
    let n = cycle.degree();
    let weighted: Vec<(Chord, Scalar)> = all_chords(cycle, q)
        .into_iter()
        .filter_map(|ch| {
            let c = phi.higher_coeff(&ch.arrow, &co_cut(cycle, &ch));
            (!c.is_zero()).then_some((ch, c))
        })
        .collect();
    let mut total = Scalar::zero();
    let mut chosen: Vec<usize> = Vec::new();
    collections(&weighted, n, 0, &mut chosen, &mut |sel: &[usize]| -> Result<()> {
        let chords: Vec<Chord> = sel.iter().map(|&i| weighted[i].0.clone()).collect();
        let cut_cycle = cut(cycle, &chords)?;
        let base = w.coeff(&cut_cycle);
        if base.is_zero() {
            return Ok(());
        }
        let owner = check_disjoint(n, &chords)?;
        let mut value = base;
        for &i in sel {
            value *= &weighted[i].1;
        }
        for (t, o) in owner.iter().enumerate() {
            if o.is_none() {
                value *= phi.linear(&cycle.arrows()[t]);
            }
        }
        total += value;
        Ok(())
    })?;
    Ok(total)
}

fn collections(
    chords: &[(Chord, Scalar)],
    n: usize,
    from: usize,
    chosen: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]) -> Result<()>,
) -> Result<()> {
    visit(chosen)?;
    for i in from..chords.len() {
        chosen.push(i);
        let members: Vec<Chord> = chosen.iter().map(|&c| chords[c].0.clone()).collect();
        if check_disjoint(n, &members).is_ok() {
            collections(chords, n, i + 1, chosen, visit)?;
        }
        chosen.pop();
    }
    Ok(())
}

/// `true` iff `x` is a positive or negative power of two.
pub fn is_signed_pow2(x: &Scalar) -> Option<(bool, i64)> {
    if x.is_zero() {
        return None;
    }
    let n = x.numer().abs();
    let d = x.denom().abs();
    let one = BigInt::one();
    let pow = |v: &BigInt| -> Option<u64> {
        if v.is_positive() && (v & (v - &one)).is_zero() {
            Some(v.bits() - 1)
        } else {
            None
        }
    };
    let e = pow(&n)? as i64 - pow(&d)? as i64;
    Some((x.is_negative(), e))
}
