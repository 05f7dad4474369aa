//! The CW-complex `𝒞(x̃)` with one 2-cell per αβ̄-cycle, integer 2-cycles of
//! that complex, and the invariants they cut out of primitive potentials.
//!
//! A primitive potential is a 2-cochain with values in `k^×`. Pairing it with
//! an integer 2-cycle `u` gives `ι_u(W) = Π_c w_c^{u_c}`, which is unchanged
//! by diagonal rescalings of arrows, so the vector of pairings over a basis of
//! 2-cycles is a complete invariant of the right-equivalence class.

pub mod oracle;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::braid::{BraidMove, MoveKind};
use crate::cartan::Label;
use crate::error::{Error, Result};
use crate::potential::{coefficients_of, enumerate_abbar_cycles, AbCycle, Potential, Scalar};
use crate::qbuild::{mutation_vertex, relabel_after_move, BraidQuiver};
use crate::quiver::{Arrow, Vertex};

/// Unordered pair of neighboring perches, stored in label order.
pub type PerchPair = (Label, Label);

#[derive(Clone, Debug)]
pub struct CWComplex {
    pub vertices: Vec<Vertex>,
    pub arrows: Vec<Arrow>,
    pub cells: Vec<AbCycle>,
    /// `boundary[c][a]` is the multiplicity of arrow `a` in cell `c`.
    pub boundary: Vec<Vec<i64>>,
    /// `k_αβ` for every pair of neighboring perches.
    pub k: BTreeMap<PerchPair, usize>,
}

pub fn build_complex(bq: &BraidQuiver) -> Result<CWComplex> {
    let cells = enumerate_abbar_cycles(bq)?;
    let arrows = bq.quiver.arrows();
    let index: BTreeMap<&Arrow, usize> = arrows.iter().enumerate().map(|(i, a)| (a, i)).collect();
    let mut boundary = vec![vec![0i64; arrows.len()]; cells.len()];
    for (row, c) in boundary.iter_mut().zip(&cells) {
        for a in c.path.arrows() {
            let i = index
                .get(a)
                .ok_or_else(|| Error::Invariant(format!("cycle arrow {a} missing from the quiver")))?;
            row[*i] += 1;
        }
    }
    let mut k = BTreeMap::new();
    for (i, j) in bq.graph.edges() {
        let (a, b) = (&bq.graph.vertices()[i], &bq.graph.vertices()[j]);
        let pair = ordered(a, b);
        let count = cells.iter().filter(|c| &c.alpha == a && &c.beta == b).count();
        k.insert(pair, count);
    }
    Ok(CWComplex {
        vertices: bq.quiver.vertices().to_vec(),
        arrows,
        cells,
        boundary,
        k,
    })
}

fn ordered(a: &Label, b: &Label) -> PerchPair {
    if a < b {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    }
}

impl CWComplex {
    pub fn cells_on(&self, pair: &PerchPair) -> impl Iterator<Item = usize> + '_ {
        let pair = pair.clone();
        self.cells.iter().enumerate().filter(move |(_, c)| c.pair() == pair).map(|(i, _)| i)
    }

    /// Lexicographically smallest cell between the two perches.
    pub fn chosen_cell(&self, pair: &PerchPair) -> Option<usize> {
        self.cells_on(pair).min_by(|&a, &b| self.cells[a].path.cmp(&self.cells[b].path))
    }

    /// `u · D`, the boundary of an integer 2-chain.
    pub fn boundary_of(&self, u: &[BigInt]) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.arrows.len()];
        for (uc, row) in u.iter().zip(&self.boundary) {
            if uc.is_zero() {
                continue;
            }
            for (o, d) in out.iter_mut().zip(row) {
                if *d != 0 {
                    *o += uc * d;
                }
            }
        }
        out
    }

    pub fn is_cycle(&self, u: &[BigInt]) -> bool {
        u.len() == self.cells.len() && self.boundary_of(u).iter().all(Zero::is_zero)
    }
}

/// Integer basis of the left kernel of the boundary matrix, in Hermite form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoCycleBasis {
    pub vectors: Vec<Vec<BigInt>>,
}

impl TwoCycleBasis {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

fn row_combine(rows: &mut [Vec<BigInt>], i: usize, j: usize, m: [&BigInt; 4]) {
    // rows[i], rows[j] <- m0*rows[i] + m1*rows[j], m2*rows[i] + m3*rows[j]
    let (ri, rj) = (rows[i].clone(), rows[j].clone());
    for t in 0..ri.len() {
        rows[i][t] = m[0] * &ri[t] + m[1] * &rj[t];
        rows[j][t] = m[2] * &ri[t] + m[3] * &rj[t];
    }
}

/// Row Hermite normal form in place, returning the number of nonzero rows.
/// Only the first `cols` columns select pivots; later columns ride along.
fn hermite_rows(rows: &mut [Vec<BigInt>], cols: usize) -> usize {
    let mut r = 0;
    for col in 0..cols {
        if r == rows.len() {
            break;
        }
        for i in r + 1..rows.len() {
            if rows[i][col].is_zero() {
                continue;
            }
            let (a, b) = (rows[r][col].clone(), rows[i][col].clone());
            let e = num_integer::Integer::extended_gcd(&a, &b);
            let (g, x, y) = (e.gcd, e.x, e.y);
            let (p, q) = (&a / &g, &b / &g);
            let neg_q = -q;
            row_combine(rows, r, i, [&x, &y, &neg_q, &p]);
        }
        if rows[r][col].is_zero() {
            continue;
        }
        if rows[r][col].is_negative() {
            for v in rows[r].iter_mut() {
                *v = -v.clone();
            }
        }
        for i in 0..r {
            let f = num_integer::Integer::div_floor(&rows[i][col], &rows[r][col]);
            if !f.is_zero() {
                let pivot = rows[r].clone();
                for (v, p) in rows[i].iter_mut().zip(&pivot) {
                    *v -= &f * p;
                }
            }
        }
        r += 1;
    }
    r
}

pub fn two_cycle_basis(cw: &CWComplex) -> TwoCycleBasis {
    let m = cw.cells.len();
    let n = cw.arrows.len();
    let mut rows: Vec<Vec<BigInt>> = (0..m)
        .map(|i| {
            let mut row: Vec<BigInt> = cw.boundary[i].iter().map(|&d| BigInt::from(d)).collect();
            row.extend((0..m).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
            row
        })
        .collect();
    let rank = hermite_rows(&mut rows, n);
    let mut kernel: Vec<Vec<BigInt>> = rows[rank..].iter().map(|r| r[n..].to_vec()).collect();
    let k = hermite_rows(&mut kernel, m);
    kernel.truncate(k);
    TwoCycleBasis { vectors: kernel }
}

/// Pairings `ι_u(W)` with the basis 2-cycles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassInvariant {
    pub values: Vec<Scalar>,
}

/// A [`ClassInvariant`] computed after the sign twist.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistedClass {
    pub values: Vec<Scalar>,
}

fn fmt_values(values: &[Scalar], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let parts: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    write!(f, "[{}]", parts.join(", "))
}

impl fmt::Display for ClassInvariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_values(&self.values, f)
    }
}

impl fmt::Display for TwistedClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_values(&self.values, f)
    }
}

fn pair_with(coeffs: &[Scalar], u: &[BigInt]) -> Result<Scalar> {
    let mut out = Scalar::one();
    for (c, e) in coeffs.iter().zip(u) {
        if e.is_zero() {
            continue;
        }
        let e = e
            .to_i32()
            .ok_or_else(|| Error::Unsupported(format!("2-cycle multiplicity {e} is too large")))?;
        out *= c.pow(e);
    }
    Ok(out)
}

fn primitive_coefficients(w: &Potential, cw: &CWComplex) -> Result<Vec<Scalar>> {
    let coeffs = coefficients_of(w, &cw.cells);
    if let Some(i) = coeffs.iter().position(Zero::is_zero) {
        return Err(Error::Potential(format!("no coefficient for cell {}", cw.cells[i].path)));
    }
    if w.len() != cw.cells.len() {
        return Err(Error::Potential("potential has terms outside the 2-cells".into()));
    }
    Ok(coeffs)
}

pub fn class_of(w: &Potential, cw: &CWComplex, basis: &TwoCycleBasis) -> Result<ClassInvariant> {
    let coeffs = primitive_coefficients(w, cw)?;
    let values = basis.vectors.iter().map(|u| pair_with(&coeffs, u)).collect::<Result<_>>()?;
    Ok(ClassInvariant { values })
}

/// Twisted class with an explicit choice of one cell per perch pair.
pub fn twisted_class_with(
    w: &Potential,
    cw: &CWComplex,
    vectors: &[Vec<BigInt>],
    chosen: &BTreeMap<PerchPair, usize>,
) -> Result<TwistedClass> {
    let mut coeffs = primitive_coefficients(w, cw)?;
    for (pair, k) in &cw.k {
        let Some(&c) = chosen.get(pair) else {
            if *k == 0 {
                continue;
            }
            return Err(Error::Precondition(format!("no chosen cell for {}-{}", pair.0, pair.1)));
        };
        if cw.cells[c].pair() != *pair {
            return Err(Error::Precondition(format!("cell {c} does not lie between {} and {}", pair.0, pair.1)));
        }
        if k % 2 == 1 {
            coeffs[c] = -coeffs[c].clone();
        }
    }
    let values = vectors.iter().map(|u| pair_with(&coeffs, u)).collect::<Result<_>>()?;
    Ok(TwistedClass { values })
}

pub fn default_choice(cw: &CWComplex) -> BTreeMap<PerchPair, usize> {
    cw.k.keys()
        .filter_map(|p| cw.chosen_cell(p).map(|c| (p.clone(), c)))
        .collect()
}

pub fn twisted_class_of(w: &Potential, cw: &CWComplex, basis: &TwoCycleBasis) -> Result<TwistedClass> {
    twisted_class_with(w, cw, &basis.vectors, &default_choice(cw))
}

pub fn right_equivalent_primitive(w1: &Potential, w2: &Potential, cw: &CWComplex, basis: &TwoCycleBasis) -> Result<bool> {
    Ok(class_of(w1, cw, basis)? == class_of(w2, cw, basis)?)
}

/// Local configuration of one perch pair at the mutated vertex, named by the
/// side arrows present next to it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocalCase {
    /// The pair does not meet the mutated vertex.
    Untouched,
    /// Exactly one side arrow: `k_αβ` is unchanged.
    OneSideArrow,
    /// No side arrows: `k_αβ` grows by one.
    NoSideArrows,
    /// Both side arrows: the mirror image of [`LocalCase::NoSideArrows`].
    BothSideArrows,
}

impl LocalCase {
    pub fn delta_k(self) -> i64 {
        match self {
            LocalCase::Untouched | LocalCase::OneSideArrow => 0,
            LocalCase::NoSideArrows => 1,
            LocalCase::BothSideArrows => -1,
        }
    }

    fn from_side_arrows(first: bool, second: bool) -> Self {
        match (first, second) {
            (true, true) => LocalCase::BothSideArrows,
            (false, false) => LocalCase::NoSideArrows,
            _ => LocalCase::OneSideArrow,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairChange {
    pub pair: PerchPair,
    pub case: LocalCase,
    pub k_before: usize,
    pub k_after: usize,
}

impl PairChange {
    /// Sign the twist contributes on this pair relative to the untwisted
    /// correspondence.
    pub fn twist_flips(&self) -> bool {
        (self.k_before + self.k_after) % 2 == 1
    }
}

/// Correspondence between `𝒞(x̃)` and `𝒞(ỹ)` for one braid move.
#[derive(Clone, Debug)]
pub struct Transport {
    pub mv: BraidMove,
    pub vertex: Option<Vertex>,
    /// Image in `𝒞(ỹ)` of each cell of `𝒞(x̃)` that avoids the mutated vertex
    /// and survives unchanged; `None` for cells rebuilt by the mutation.
    pub cell_map: Vec<Option<usize>>,
    pub pairs: Vec<PairChange>,
    /// Images of the basis 2-cycles of `𝒞(x̃)`, in cell coordinates of `𝒞(ỹ)`.
    pub vectors: Vec<Vec<BigInt>>,
}

/// Per-pair flow of a 2-cycle: the common coefficient of its αβ̄-cells with
/// `α < β`, the βᾱ-cells carrying its negative.
fn flows(cw: &CWComplex, u: &[BigInt]) -> Result<BTreeMap<PerchPair, BigInt>> {
    let mut out = BTreeMap::new();
    for pair in cw.k.keys() {
        let mut flow: Option<BigInt> = None;
        for c in cw.cells_on(pair) {
            let v = if cw.cells[c].is_forward() { u[c].clone() } else { -u[c].clone() };
            match &flow {
                None => flow = Some(v),
                Some(f) if *f == v => {}
                Some(_) => {
                    return Err(Error::Invariant(format!(
                        "2-cycle is not constant along {}-{}",
                        pair.0, pair.1
                    )))
                }
            }
        }
        match flow {
            Some(f) => {
                out.insert(pair.clone(), f);
            }
            None => {
                return Err(Error::Conditions(format!("no cells between perches {} and {}", pair.0, pair.1)));
            }
        }
    }
    Ok(out)
}

fn from_flows(cw: &CWComplex, flows: &BTreeMap<PerchPair, BigInt>) -> Result<Vec<BigInt>> {
    cw.cells
        .iter()
        .map(|c| {
            let f = flows
                .get(&c.pair())
                .ok_or_else(|| Error::Invariant(format!("no flow for cell {}", c.path)))?;
            Ok(if c.is_forward() { f.clone() } else { -f.clone() })
        })
        .collect()
}

fn adjacent(bq: &BraidQuiver, u: &Vertex, v: &Vertex) -> bool {
    bq.quiver.arrow_count_between(u, v) > 0 || bq.quiver.arrow_count_between(v, u) > 0
}

fn perch_vertex(bq: &BraidQuiver, root: &Label, idx: isize) -> Vertex {
    let n = bq.n(root) as isize;
    Vertex::new(root.clone(), idx.rem_euclid(n) as usize)
}

/// Case of every perch pair at the mutated vertex, read off the side arrows of
/// `Q(x̃)`.
fn local_cases(bq: &BraidQuiver, mv: &BraidMove) -> Result<BTreeMap<PerchPair, LocalCase>> {
    let mut out = BTreeMap::new();
    let word = &bq.word;
    let p = mv.position % word.len();
    let alpha = word.letter(p).root.clone();
    let r = word.occurrence(p) as isize;
    match mv.kind {
        MoveKind::Commute => {}
        MoveKind::ExchangeAba => {
            let beta = word.letter(p + 1).root.clone();
            let q = word.occurrence((p + 1) % word.len()) as isize;
            let first = adjacent(bq, &perch_vertex(bq, &alpha, r - 1), &perch_vertex(bq, &beta, q - 1));
            let second = adjacent(bq, &perch_vertex(bq, &beta, q), &perch_vertex(bq, &alpha, r + 1));
            out.insert(ordered(&alpha, &beta), LocalCase::from_side_arrows(first, second));
        }
        MoveKind::CommuteMixed => {
            let k = perch_vertex(bq, &alpha, r);
            let ia = bq.graph.index_of(&alpha).expect("letter roots are graph vertices");
            for j in bq.graph.neighbors(ia) {
                let beta = bq.graph.vertices()[j].clone();
                let targets: Vec<Vertex> = (0..bq.n(&beta))
                    .map(|i| Vertex::new(beta.clone(), i))
                    .filter(|v| adjacent(bq, &k, v))
                    .collect();
                let [b] = targets.as_slice() else {
                    return Err(Error::Unsupported(format!(
                        "{k} meets perch {beta} in {} vertices; expected exactly one",
                        targets.len()
                    )));
                };
                let first = adjacent(bq, &perch_vertex(bq, &alpha, r - 1), b);
                let second = adjacent(bq, &perch_vertex(bq, &alpha, r + 1), b);
                out.insert(ordered(&alpha, &beta), LocalCase::from_side_arrows(first, second));
            }
        }
    }
    Ok(out)
}

/// Builds the correspondence for `mv` from `Q(x̃)` to `Q(ỹ)`. Each pair's
/// change in `k_αβ` must match the side-arrow case, otherwise the
/// configuration is reported as unsupported.
pub fn transport_basis(
    mv: &BraidMove,
    bq_x: &BraidQuiver,
    cw_x: &CWComplex,
    cw_y: &CWComplex,
    basis_x: &TwoCycleBasis,
) -> Result<Transport> {
    let relabel = relabel_after_move(&bq_x.word, mv, &bq_x.graph)?;
    let vertex = mutation_vertex(&bq_x.word, mv, true);
    let by_vertices: BTreeMap<Vec<Vertex>, usize> = cw_y
        .cells
        .iter()
        .enumerate()
        .map(|(i, c)| (c.path.vertices(), i))
        .collect();
    let mut used = BTreeSet::new();
    let mut cell_map = Vec::with_capacity(cw_x.cells.len());
    for c in &cw_x.cells {
        let vs = c.path.vertices();
        if vertex.as_ref().is_some_and(|k| vs.contains(k)) {
            cell_map.push(None);
            continue;
        }
        let image: Vec<Vertex> = vs.iter().map(|v| relabel[v].clone()).collect();
        let n = image.len();
        let start = (0..n).min_by(|&a, &b| image[a..].iter().chain(&image[..a]).cmp(image[b..].iter().chain(&image[..b])));
        let found = start.and_then(|s| {
            let rotated: Vec<Vertex> = image[s..].iter().chain(&image[..s]).cloned().collect();
            by_vertices.get(&rotated).copied()
        });
        let found = found.filter(|&i| cw_y.cells[i].pair() == c.pair() && used.insert(i));
        if mv.kind == MoveKind::Commute && found.is_none() {
            return Err(Error::Invariant(format!("cell {} has no image under a commuting move", c.path)));
        }
        cell_map.push(found);
    }

    let cases = local_cases(bq_x, mv)?;
    let mut pairs = Vec::new();
    for (pair, &k_before) in &cw_x.k {
        let k_after = cw_y.k.get(pair).copied().unwrap_or(0);
        let case = cases.get(pair).copied().unwrap_or(LocalCase::Untouched);
        if k_after as i64 - k_before as i64 != case.delta_k() {
            return Err(Error::Unsupported(format!(
                "pair {}-{} goes from {k_before} to {k_after} cycles, outside the {case:?} case",
                pair.0, pair.1
            )));
        }
        pairs.push(PairChange {
            pair: pair.clone(),
            case,
            k_before,
            k_after,
        });
    }

    let mut vectors = Vec::with_capacity(basis_x.len());
    for u in &basis_x.vectors {
        let f = flows(cw_x, u)?;
        let v = from_flows(cw_y, &f)?;
        if !cw_y.is_cycle(&v) {
            return Err(Error::Invariant("transported chain is not a 2-cycle".into()));
        }
        vectors.push(v);
    }
    Ok(Transport {
        mv: *mv,
        vertex,
        cell_map,
        pairs,
        vectors,
    })
}

/// Twisted class of a primitive potential on `𝒞(ỹ)` paired with the
/// transported basis, comparable entry by entry with the class on `𝒞(x̃)`.
pub fn transported_class(w_y: &Potential, cw_y: &CWComplex, transport: &Transport) -> Result<TwistedClass> {
    twisted_class_with(w_y, cw_y, &transport.vectors, &default_choice(cw_y))
}
