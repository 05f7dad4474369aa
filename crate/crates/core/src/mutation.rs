//! Mutation of quivers with potentials: premutation, cancellation of
//! 2-cycles, and mutation driven by braid moves.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::braid::{BraidMove, Word};
use crate::error::{Error, Result};
use crate::potential::{enumerate_abbar_cycles, is_primitive, AbCycle, Path, Potential, Scalar};
use crate::qbuild::{build_qxtilde, mutation_vertex, relabel_after_move, BraidQuiver};
use crate::quiver::{Arrow, Quiver, Vertex, VertexMap};

/// A quiver given by an explicit arrow set. Unlike [`Quiver`] it can hold
/// 2-cycles, which appear between premutation and reduction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArrowQuiver {
    vertices: BTreeMap<Vertex, bool>,
    arrows: BTreeSet<Arrow>,
}

impl ArrowQuiver {
    pub fn new(vertices: impl IntoIterator<Item = (Vertex, bool)>, arrows: impl IntoIterator<Item = Arrow>) -> Result<Self> {
        let vertices: BTreeMap<Vertex, bool> = vertices.into_iter().collect();
        let mut out = ArrowQuiver {
            vertices,
            arrows: BTreeSet::new(),
        };
        for a in arrows {
            out.insert(a)?;
        }
        Ok(out)
    }

    /// Full arrows of `q`; half-arrows are not allowed here.
    pub fn from_quiver(q: &Quiver) -> Result<Self> {
        if q.has_half_arrows() {
            return Err(Error::Precondition("quiver with potential cannot have half-arrows".into()));
        }
        let vertices = q
            .vertices()
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), q.is_frozen(i)));
        ArrowQuiver::new(vertices, q.arrows())
    }

    pub fn to_quiver(&self) -> Result<Quiver> {
        for a in &self.arrows {
            if self.arrows.contains(&Arrow::new(a.tgt.clone(), a.src.clone())) {
                return Err(Error::Unsupported(format!(
                    "2-cycle between {} and {} has no exchange matrix",
                    a.src, a.tgt
                )));
            }
        }
        let mut q = Quiver::empty(self.vertices.iter().map(|(v, &f)| (v.clone(), f)))?;
        for a in &self.arrows {
            q.add_arrow(&a.src, &a.tgt, 2)?;
        }
        Ok(q)
    }

    pub fn insert(&mut self, a: Arrow) -> Result<()> {
        if !self.vertices.contains_key(&a.src) || !self.vertices.contains_key(&a.tgt) {
            return Err(Error::Invariant(format!("arrow {a} has an unknown endpoint")));
        }
        if a.src == a.tgt {
            return Err(Error::Precondition(format!("loop at {}", a.src)));
        }
        if !self.arrows.insert(a.clone()) {
            return Err(Error::Invariant(format!("duplicate arrow {a}")));
        }
        Ok(())
    }

    pub fn remove(&mut self, a: &Arrow) -> bool {
        self.arrows.remove(a)
    }

    pub fn arrows(&self) -> impl Iterator<Item = &Arrow> {
        self.arrows.iter()
    }

    pub fn contains(&self, a: &Arrow) -> bool {
        self.arrows.contains(a)
    }

    pub fn vertices(&self) -> impl Iterator<Item = (&Vertex, bool)> {
        self.vertices.iter().map(|(v, &f)| (v, f))
    }

    pub fn is_frozen(&self, v: &Vertex) -> Option<bool> {
        self.vertices.get(v).copied()
    }

    pub fn incoming(&self, k: &Vertex) -> Vec<Arrow> {
        self.arrows.iter().filter(|a| &a.tgt == k).cloned().collect()
    }

    pub fn outgoing(&self, k: &Vertex) -> Vec<Arrow> {
        self.arrows.iter().filter(|a| &a.src == k).cloned().collect()
    }

    /// A new arrow `src -> tgt` with an unused ordinal.
    pub fn fresh(&self, src: &Vertex, tgt: &Vertex) -> Arrow {
        let ord = self
            .arrows
            .iter()
            .filter(|a| &a.src == src && &a.tgt == tgt)
            .map(|a| a.ord + 1)
            .max()
            .unwrap_or(0);
        Arrow::with_ord(src.clone(), tgt.clone(), ord)
    }

    /// Renumbers parallel arrows `0..m`, returning the renaming.
    pub fn normalize(&mut self) -> BTreeMap<Arrow, Arrow> {
        let mut map = BTreeMap::new();
        let mut next: BTreeMap<(Vertex, Vertex), usize> = BTreeMap::new();
        for a in &self.arrows {
            let n = next.entry((a.src.clone(), a.tgt.clone())).or_insert(0);
            map.insert(a.clone(), Arrow::with_ord(a.src.clone(), a.tgt.clone(), *n));
            *n += 1;
        }
        self.arrows = map.values().cloned().collect();
        map
    }
}

/// A quiver with potential.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QP {
    pub quiver: ArrowQuiver,
    pub potential: Potential,
}

impl QP {
    pub fn new(quiver: ArrowQuiver, potential: Potential) -> Result<Self> {
        for a in potential.arrows_used() {
            if !quiver.contains(a) {
                return Err(Error::Potential(format!("arrow {a} is not in the quiver")));
            }
        }
        Ok(QP { quiver, potential })
    }

    pub fn from_quiver(q: &Quiver, potential: Potential) -> Result<Self> {
        QP::new(ArrowQuiver::from_quiver(q)?, potential)
    }

    /// Renames vertices along a bijection and renumbers parallel arrows.
    pub fn relabel(&self, map: &VertexMap) -> Result<QP> {
        let mut vertices = Vec::new();
        for (v, f) in self.quiver.vertices() {
            let w = map
                .get(v)
                .ok_or_else(|| Error::Invariant(format!("relabel map misses {v}")))?;
            vertices.push((w.clone(), f));
        }
        if vertices.iter().map(|v| &v.0).collect::<BTreeSet<_>>().len() != vertices.len() {
            return Err(Error::Invariant("relabel map is not injective".into()));
        }
        let rename: BTreeMap<Arrow, Arrow> = self
            .quiver
            .arrows()
            .map(|a| (a.clone(), Arrow::with_ord(map[&a.src].clone(), map[&a.tgt].clone(), a.ord)))
            .collect();
        let mut quiver = ArrowQuiver::new(vertices, rename.values().cloned())?;
        let renumber = quiver.normalize();
        let composed: BTreeMap<Arrow, Arrow> = rename
            .into_iter()
            .map(|(a, b)| {
                let c = renumber[&b].clone();
                (a, c)
            })
            .collect();
        QP::new(quiver, self.potential.rename_arrows(&composed)?)
    }

    pub fn to_json_value(&self) -> Result<Value> {
        Ok(json!({
            "potential": self.potential.to_json_value(),
            "quiver": self.quiver.to_quiver()?.to_json_value(),
        }))
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(&self.to_json_value()?)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<QP> {
        let v: Value = serde_json::from_str(text)?;
        let q = v
            .get("quiver")
            .ok_or_else(|| Error::parse("qp", 1, "missing `quiver`"))?;
        let q = Quiver::from_json_value(q.clone())?;
        let w = match v.get("potential") {
            Some(p) => Potential::from_json_value(p)?,
            None => Potential::new(),
        };
        QP::from_quiver(&q, w)
    }
}

/// Premutation at `k`: a shortcut `[ab]` for every path `b a` through `k`,
/// reversal of the arrows at `k`, and the potential `[W] + Σ [ab] ā b̄`.
pub fn premutate(qp: &QP, k: &Vertex) -> Result<QP> {
    match qp.quiver.is_frozen(k) {
        None => return Err(Error::UnknownLabel(k.to_string())),
        Some(true) => return Err(Error::Precondition(format!("{k} is frozen"))),
        Some(false) => {}
    }
    let incoming = qp.quiver.incoming(k);
    let outgoing = qp.quiver.outgoing(k);
    for b in &incoming {
        if outgoing.iter().any(|a| a.tgt == b.src) {
            return Err(Error::Precondition(format!("{k} lies on a 2-cycle through {}", b.src)));
        }
    }
    let mut quiver = qp.quiver.clone();
    for a in incoming.iter().chain(&outgoing) {
        quiver.remove(a);
    }
    let mut reversed: BTreeMap<Arrow, Arrow> = BTreeMap::new();
    for a in incoming.iter().chain(&outgoing) {
        let r = quiver.fresh(&a.tgt, &a.src);
        quiver.insert(r.clone())?;
        reversed.insert(a.clone(), r);
    }
    let mut shortcut: BTreeMap<(Arrow, Arrow), Arrow> = BTreeMap::new();
    for b in &incoming {
        for a in &outgoing {
            let s = quiver.fresh(&b.src, &a.tgt);
            quiver.insert(s.clone())?;
            shortcut.insert((b.clone(), a.clone()), s);
        }
    }
    let mut potential = Potential::new();
    for (cycle, c) in qp.potential.terms() {
        let arrows = cycle.arrows();
        let n = arrows.len();
        let start = arrows.iter().position(|a| &a.tgt == k).unwrap_or(0);
        let mut out = Vec::with_capacity(n);
        let mut t = 0;
        while t < n {
            let a = &arrows[(start + t) % n];
            if &a.tgt == k {
                let next = &arrows[(start + t + 1) % n];
                out.push(shortcut[&(a.clone(), next.clone())].clone());
                t += 2;
            } else {
                out.push(a.clone());
                t += 1;
            }
        }
        potential.add_path(out, c.clone())?;
    }
    for ((b, a), s) in &shortcut {
        potential.add_path(
            vec![s.clone(), reversed[a].clone(), reversed[b].clone()],
            Scalar::one(),
        )?;
    }
    QP::new(quiver, potential)
}

/// Cancels degree-2 terms one at a time, smallest canonical term first.
///
/// For a term `c·ab`, the arrow `a` is rescaled so the coefficient is 1; the
/// potential then reads `ab + Σ U a + Σ b V + W₀` and becomes `-Σ U V + W₀`
/// with `a`, `b` deleted. A term meeting `a` or `b` in any other way is
/// reported as unsupported.
pub fn reduce(qp: &QP) -> Result<QP> {
    let mut quiver = qp.quiver.clone();
    let mut w = qp.potential.clone();
    while let Some((pair, c)) = w
        .degree_two_terms()
        .first()
        .map(|(p, c)| (p.arrows().to_vec(), (*c).clone()))
    {
        let (a, b) = (pair[0].clone(), pair[1].clone());
        if a == b {
            return Err(Error::Unsupported(format!("degree-2 term {a}{a}")));
        }
        let inv = c.recip();
        let mut us: Vec<(Path, Scalar)> = Vec::new();
        let mut vs: Vec<(Path, Scalar)> = Vec::new();
        let mut rest = Potential::new();
        for (cycle, coeff) in w.terms() {
            if cycle.arrows() == pair.as_slice() {
                continue;
            }
            let na = cycle.count(&a);
            let nb = cycle.count(&b);
            let coeff = if na > 0 { coeff * num_traits::pow(inv.clone(), na) } else { coeff.clone() };
            match (na, nb) {
                (0, 0) => rest.add(cycle.clone(), coeff),
                (1, 0) => {
                    let i = cycle.arrows().iter().position(|x| x == &a).expect("present");
                    let mut r = cycle.rotated(i + 1);
                    r.pop();
                    us.push((r, coeff));
                }
                (0, 1) => {
                    let i = cycle.arrows().iter().position(|x| x == &b).expect("present");
                    let mut r = cycle.rotated(i);
                    r.remove(0);
                    vs.push((r, coeff));
                }
                _ => {
                    return Err(Error::Unsupported(format!(
                        "term {cycle} meets the 2-cycle {a}, {b} outside the cancellable shape"
                    )))
                }
            }
        }
        for (u, cu) in &us {
            for (v, cv) in &vs {
                let mut path = u.clone();
                path.extend(v.iter().cloned());
                rest.add_path(path, -(cu * cv))?;
            }
        }
        quiver.remove(&a);
        quiver.remove(&b);
        w = rest;
    }
    let rename = quiver.normalize();
    let w = w.rename_arrows(&rename)?;
    QP::new(quiver, w)
}

/// `reduce ∘ premutate`.
pub fn mutate(qp: &QP, k: &Vertex) -> Result<QP> {
    reduce(&premutate(qp, k)?)
}

/// Result of pushing a QP on `Q(x̃)` through a braid move.
#[derive(Clone, Debug)]
pub struct MoveOutcome {
    pub word: Word,
    pub target: BraidQuiver,
    pub cycles: Vec<AbCycle>,
    /// The mutated QP with vertices already renamed into `Q(ỹ)`.
    pub qp: QP,
    pub relabel: VertexMap,
    pub vertex: Option<Vertex>,
}

/// Mutates `(Q(x̃), w)` at the vertex of `mv` and moves the result onto
/// `Q(ỹ)`, checking that the quivers agree and that primitivity survives.
pub fn mutate_along_move(bq: &BraidQuiver, w: &Potential, mv: &BraidMove) -> Result<MoveOutcome> {
    let y = bq.word.apply_move(mv, &bq.graph.cartan())?;
    let target = build_qxtilde(&y, &bq.graph)?;
    if target.has_parallel_arrows() || bq.has_parallel_arrows() {
        return Err(Error::Unsupported("parallel arrows make arrow identification ambiguous".into()));
    }
    let relabel = relabel_after_move(&bq.word, mv, &bq.graph)?;
    let vertex = mutation_vertex(&bq.word, mv, true);
    let qp = QP::from_quiver(&bq.quiver, w.clone())?;
    let mutated = match &vertex {
        Some(k) => mutate(&qp, k)?,
        None => qp,
    };
    let moved = mutated.relabel(&relabel)?;
    if moved.quiver.to_quiver()? != target.quiver {
        return Err(Error::Invariant(format!(
            "mutated quiver differs from Q(y~) for move {mv} on `{}`",
            bq.word
        )));
    }
    let cycles = enumerate_abbar_cycles(&target)?;
    if !is_primitive(&moved.potential, &cycles) {
        return Err(Error::Invariant(format!(
            "potential is no longer primitive after {mv} on `{}`",
            bq.word
        )));
    }
    Ok(MoveOutcome {
        word: y,
        target,
        cycles,
        qp: moved,
        relabel,
        vertex,
    })
}

/// Checks that every coefficient of a primitive potential is nonzero, for
/// callers holding coefficients outside a [`Potential`].
pub fn all_nonzero(coeffs: &[Scalar]) -> bool {
    coeffs.iter().all(|c| !c.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::GammaGraph;
    use crate::potential::{scalar, seeded_potential, Seeding};

    fn v(d: &str) -> Vertex {
        Vertex::new(d, 0)
    }

    fn arr(a: &str, b: &str) -> Arrow {
        Arrow::new(v(a), v(b))
    }

    /// c: x->k, b: k->y, a: y->x, e: k->z with W = a b c (composed right to left).
    fn fig_one() -> QP {
        let q = ArrowQuiver::new(
            ["k", "x", "y", "z"].map(|n| (v(n), false)),
            [arr("x", "k"), arr("k", "y"), arr("y", "x"), arr("k", "z")],
        )
        .unwrap();
        let mut w = Potential::new();
        w.add_path(vec![arr("x", "k"), arr("k", "y"), arr("y", "x")], scalar(1)).unwrap();
        QP::new(q, w).unwrap()
    }

    #[test]
    fn premutation_of_the_worked_example() {
        let pre = premutate(&fig_one(), &v("k")).unwrap();
        let arrows: Vec<&Arrow> = pre.quiver.arrows().collect();
        assert_eq!(arrows.len(), 6);
        let mut expected = Potential::new();
        expected.add_path(vec![arr("x", "y"), arr("y", "x")], scalar(1)).unwrap();
        expected.add_path(vec![arr("x", "y"), arr("y", "k"), arr("k", "x")], scalar(1)).unwrap();
        expected.add_path(vec![arr("x", "z"), arr("z", "k"), arr("k", "x")], scalar(1)).unwrap();
        assert_eq!(pre.potential, expected);
    }

    #[test]
    fn mutation_of_the_worked_example() {
        let m = mutate(&fig_one(), &v("k")).unwrap();
        let arrows: Vec<Arrow> = m.quiver.arrows().cloned().collect();
        assert_eq!(
            arrows,
            vec![arr("k", "x"), arr("x", "z"), arr("y", "k"), arr("z", "k")]
        );
        let mut expected = Potential::new();
        expected.add_path(vec![arr("x", "z"), arr("z", "k"), arr("k", "x")], scalar(1)).unwrap();
        assert_eq!(m.potential, expected);
    }

    #[test]
    fn premutation_without_incoming_arrows_only_reverses() {
        let q = ArrowQuiver::new([(v("k"), false), (v("x"), false)], [arr("k", "x")]).unwrap();
        let qp = QP::new(q, Potential::new()).unwrap();
        let pre = premutate(&qp, &v("k")).unwrap();
        assert_eq!(pre.quiver.arrows().cloned().collect::<Vec<_>>(), vec![arr("x", "k")]);
        assert!(pre.potential.is_empty());
    }

    #[test]
    fn vertex_on_a_two_cycle_is_rejected() {
        let q = ArrowQuiver::new([(v("k"), false), (v("x"), false)], [arr("k", "x"), arr("x", "k")]).unwrap();
        let qp = QP::new(q, Potential::new()).unwrap();
        assert!(matches!(premutate(&qp, &v("k")), Err(Error::Precondition(_))));
    }

    #[test]
    fn reduce_splits_off_a_trivial_pair() {
        let q = ArrowQuiver::new([(v("x"), false), (v("y"), false)], [arr("x", "y"), arr("y", "x")]).unwrap();
        let mut w = Potential::new();
        w.add_path(vec![arr("x", "y"), arr("y", "x")], scalar(3)).unwrap();
        let r = reduce(&QP::new(q, w).unwrap()).unwrap();
        assert_eq!(r.quiver.arrows().count(), 0);
        assert!(r.potential.is_empty());
    }

    #[test]
    fn reduce_leaves_reduced_input_alone() {
        let qp = fig_one();
        assert_eq!(reduce(&qp).unwrap(), qp);
    }

    #[test]
    fn triangle_terms_count_and_shortcuts() {
        let g = GammaGraph::a_n(2);
        let x = Word::parse("1 2 1 2 1 2 1 2", &g).unwrap();
        let bq = build_qxtilde(&x, &g).unwrap();
        let cycles = enumerate_abbar_cycles(&bq).unwrap();
        let w = seeded_potential(&cycles, &Seeding::Ones).unwrap();
        let qp = QP::from_quiver(&bq.quiver, w).unwrap();
        for k in bq.quiver.vertices() {
            let pre = premutate(&qp, k).unwrap();
            let ins = qp.quiver.incoming(k).len();
            let outs = qp.quiver.outgoing(k).len();
            let old: BTreeSet<&Arrow> = qp.quiver.arrows().collect();
            let touching_k = |a: &Arrow| &a.src == k || &a.tgt == k;
            let shortcuts: Vec<&Arrow> = pre.quiver.arrows().filter(|a| !old.contains(a) && !touching_k(a)).collect();
            assert_eq!(shortcuts.len(), ins * outs);
            for s in shortcuts {
                let holders: Vec<_> = pre
                    .potential
                    .terms()
                    .filter(|(p, _)| p.degree() == 3 && p.count(s) == 1 && p.arrows().iter().any(touching_k))
                    .collect();
                assert_eq!(holders.len(), 1);
                assert!(holders[0].1.is_one());
            }
        }
        for mv in x.enumerate_moves(&g.cartan(), true) {
            let k = mutation_vertex(&x, &mv, true).unwrap();
            let m = mutate(&qp, &k).unwrap();
            assert_eq!(m.quiver.to_quiver().unwrap(), bq.quiver.mutate(&k).unwrap());
        }
    }

    #[test]
    fn moves_on_the_cube_keep_primitive_potentials() {
        let g = GammaGraph::a_n(2);
        let x = Word::parse("1 2 1 2 1 2 1 2", &g).unwrap();
        let bq = build_qxtilde(&x, &g).unwrap();
        let cycles = enumerate_abbar_cycles(&bq).unwrap();
        let w = seeded_potential(&cycles, &Seeding::PowersOfTwo { seed: 7, max_exp: 3 }).unwrap();
        for mv in x.enumerate_moves(&g.cartan(), true) {
            let out = mutate_along_move(&bq, &w, &mv).unwrap();
            assert!(out.vertex.is_some());
            assert_eq!(out.qp.quiver.to_quiver().unwrap(), out.target.quiver);
        }
    }

    #[test]
    fn qp_json_round_trip() {
        let m = mutate(&fig_one(), &v("k")).unwrap();
        let text = m.to_json().unwrap();
        let back = QP::from_json(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_json().unwrap(), text);
    }
}
