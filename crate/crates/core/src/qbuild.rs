//! Elementary quivers `Q(s_α)`, their amalgamation `Q(x)` along a word, the
//! cyclic closure `Q(x̃)`, and vertex relabelling across braid moves.

use std::collections::BTreeMap;

use crate::braid::{BraidMove, MoveKind, Word};
use crate::cartan::{GammaGraph, Label};
use crate::error::{Error, Result};
use crate::quiver::{amalgamate, Arrow, GluingData, Quiver, Vertex, VertexMap};

/// `Q(s_α)` (or `Q(s_ᾱ)` when `barred`). Vertex `α′` is `(α,0)`, `α″` is
/// `(α,1)` and every other root `β` contributes a frozen `(β,0)`.
pub fn elementary(alpha: &Label, barred: bool, graph: &GammaGraph) -> Result<Quiver> {
    let a = graph
        .index_of(alpha)
        .ok_or_else(|| Error::UnknownLabel(alpha.to_string()))?;
    let a1 = Vertex::new(alpha.clone(), 0);
    let a2 = Vertex::new(alpha.clone(), 1);
    let mut vertices = vec![(a1.clone(), true), (a2.clone(), true)];
    for (b, label) in graph.vertices().iter().enumerate() {
        if b != a {
            vertices.push((Vertex::new(label.clone(), 0), true));
        }
    }
    let mut q = Quiver::empty(vertices)?;
    let mut arrow = |s: &Vertex, t: &Vertex, halves: i64| {
        if barred {
            q.add_arrow(t, s, halves)
        } else {
            q.add_arrow(s, t, halves)
        }
    };
    arrow(&a2, &a1, 2)?;
    for b in graph.neighbors(a) {
        let beta = Vertex::new(graph.vertices()[b].clone(), 0);
        arrow(&a1, &beta, 1)?;
        arrow(&beta, &a2, 1)?;
    }
    Ok(q)
}

fn gluing_map(
    word: &Word,
    p: usize,
    graph: &GammaGraph,
    counts: &BTreeMap<Label, usize>,
    cyclic: bool,
) -> VertexMap {
    let letter = word.letter(p);
    let r = word.occurrence(p);
    let wrap = |label: &Label, i: usize| {
        if cyclic {
            i % counts[label]
        } else {
            i
        }
    };
    let mut map = VertexMap::new();
    let alpha = &letter.root;
    map.insert(Vertex::new(alpha.clone(), 0), Vertex::new(alpha.clone(), wrap(alpha, r - 1)));
    map.insert(Vertex::new(alpha.clone(), 1), Vertex::new(alpha.clone(), wrap(alpha, r)));
    for beta in graph.vertices() {
        if beta != alpha {
            let j = word.count_before(p, beta);
            map.insert(Vertex::new(beta.clone(), 0), Vertex::new(beta.clone(), wrap(beta, j)));
        }
    }
    map
}

fn amalgamate_word(word: &Word, graph: &GammaGraph, cyclic: bool) -> Result<Quiver> {
    let mut counts = word.occurrence_counts();
    let mut target = Vec::new();
    for label in graph.vertices() {
        let n = *counts.entry(label.clone()).or_insert(0);
        let top = if cyclic { n } else { n + 1 };
        target.extend((0..top).map(|r| Vertex::new(label.clone(), r)));
    }
    let mut pieces = Vec::with_capacity(word.len());
    let mut maps = Vec::with_capacity(word.len());
    for (p, letter) in word.letters().iter().enumerate() {
        pieces.push(elementary(&letter.root, letter.barred, graph)?);
        maps.push(gluing_map(word, p, graph, &counts, cyclic));
    }
    amalgamate(&pieces, &GluingData { target, maps })
}

/// The amalgamated quiver `Q(x)` on vertices `(α,r)`, `0 <= r <= n_α`.
pub fn build_qx(word: &Word, graph: &GammaGraph) -> Result<Quiver> {
    amalgamate_word(word, graph, false)
}

/// `Q(x̃)` together with the word it came from. Each letter owns exactly one
/// horizontal arrow, so parallel horizontal arrows stay distinguishable.
#[derive(Clone, Debug)]
pub struct BraidQuiver {
    pub graph: GammaGraph,
    pub word: Word,
    pub quiver: Quiver,
    /// Horizontal arrow of every letter, indexed by word position.
    pub horizontal: Vec<Arrow>,
    pub warnings: Vec<String>,
}

impl BraidQuiver {
    pub fn n(&self, root: &Label) -> usize {
        self.word.count(root)
    }

    /// The diagonal arrow `u -> v`; diagonal arrow spaces are at most
    /// one-dimensional.
    pub fn diagonal(&self, u: &Vertex, v: &Vertex) -> Option<Arrow> {
        (self.quiver.arrow_count_between(u, v) == 1).then(|| Arrow::new(u.clone(), v.clone()))
    }

    pub fn has_parallel_arrows(&self) -> bool {
        self.quiver.arrows().iter().any(|a| a.ord > 0)
    }
}

/// Horizontal arrow of the letter at `p` in the cyclic setting:
/// `(α,r) -> (α,r-1)` for `s_α^{(r)}`, reversed for `s_ᾱ^{(r)}`.
fn cyclic_horizontal(word: &Word, p: usize, n: usize) -> (Vertex, Vertex) {
    let l = word.letter(p);
    let r = word.occurrence(p);
    let right = Vertex::new(l.root.clone(), r % n);
    let left = Vertex::new(l.root.clone(), r - 1);
    if l.barred {
        (left, right)
    } else {
        (right, left)
    }
}

/// The cyclic quiver `Q(x̃)` on vertices `(α,r)`, `0 <= r < n_α`.
///
/// Violations of the word conditions are reported as warnings; only loops,
/// 2-cycles, leftover half-arrows and multiple diagonal arrows are errors.
pub fn build_qxtilde(word: &Word, graph: &GammaGraph) -> Result<BraidQuiver> {
    let counts = word.occurrence_counts();
    for label in graph.vertices() {
        match counts.get(label).copied().unwrap_or(0) {
            0 => {
                return Err(Error::Conditions(format!(
                    "no letter with root {label}: its neighbours' half-arrows are never glued"
                )))
            }
            1 => return Err(Error::Conditions(format!("n_{label} = 1 produces a loop"))),
            _ => {}
        }
    }
    let mut horizontal = Vec::with_capacity(word.len());
    let mut used: BTreeMap<(Vertex, Vertex), usize> = BTreeMap::new();
    for p in 0..word.len() {
        let (s, t) = cyclic_horizontal(word, p, counts[&word.letter(p).root]);
        let ord = used.entry((s.clone(), t.clone())).or_insert(0);
        horizontal.push(Arrow::with_ord(s, t, *ord));
        *ord += 1;
    }
    for (s, t) in used.keys() {
        if used.contains_key(&(t.clone(), s.clone())) {
            return Err(Error::Conditions(format!("2-cycle between {s} and {t}")));
        }
    }
    let quiver = amalgamate_word(word, graph, true)?;
    if quiver.has_half_arrows() || quiver.frozen_count() > 0 {
        return Err(Error::Conditions("half-arrows remain after cyclic gluing".into()));
    }
    for (i, u) in quiver.vertices().iter().enumerate() {
        for (j, v) in quiver.vertices().iter().enumerate() {
            let m = quiver.arrow_count(i, j);
            if u.dec == v.dec {
                let expected = used.get(&(u.clone(), v.clone())).copied().unwrap_or(0);
                if m != expected {
                    return Err(Error::Invariant(format!(
                        "perch arrows {u}->{v}: quiver has {m}, letters give {expected}"
                    )));
                }
            } else if m > 1 {
                return Err(Error::Conditions(format!("{m} parallel diagonal arrows {u}->{v}")));
            }
        }
    }
    let mut warnings: Vec<String> = word
        .check_conditions(graph)
        .violations
        .iter()
        .map(|v| v.to_string())
        .collect();
    if used.values().any(|&m| m > 1) {
        warnings.push("parallel horizontal arrows".into());
    }
    Ok(BraidQuiver {
        graph: graph.clone(),
        word: word.clone(),
        quiver,
        horizontal,
        warnings,
    })
}

/// The vertex mutated by `mv`, or `None` for moves that leave the quiver
/// unchanged. Indices are reduced modulo `n_α` when `cyclic`.
pub fn mutation_vertex(word: &Word, mv: &BraidMove, cyclic: bool) -> Option<Vertex> {
    if !mv.kind.mutates() {
        return None;
    }
    let p = mv.position % word.len();
    let root = &word.letter(p).root;
    let r = word.occurrence(p);
    let idx = if cyclic { r % word.count(root) } else { r };
    Some(Vertex::new(root.clone(), idx))
}

fn cyclic_vertices(word: &Word) -> Vec<Vertex> {
    word.occurrence_counts()
        .into_iter()
        .flat_map(|(label, n)| (0..n).map(move |r| Vertex::new(label.clone(), r)))
        .collect()
}

/// Identifies `Q(x̃)` with `Q(ỹ)` for `y = rotate(x, p)`:
/// `(γ,r) ↦ (γ, r - c_γ mod n_γ)` with `c_γ` the number of `γ`-letters among
/// the first `p` letters.
pub fn rotation_relabel(word: &Word, p: usize) -> VertexMap {
    let p = p % word.len();
    let counts = word.occurrence_counts();
    cyclic_vertices(word)
        .into_iter()
        .map(|v| {
            let n = counts[&v.dec];
            let c = word.count_before(p, &v.dec) % n;
            let idx = (v.idx + n - c) % n;
            let dec = v.dec.clone();
            (v, Vertex::new(dec, idx))
        })
        .collect()
}

fn invert(map: &VertexMap) -> VertexMap {
    map.iter().map(|(a, b)| (b.clone(), a.clone())).collect()
}

/// Local renaming for a move whose fragment starts the word:
/// `(α,r) ↦ (β,q)`, `(α,r′) ↦ (α,r′-1)` for `r′ > r`, `(β,q′) ↦ (β,q′+1)` for
/// `q′ >= q`. Other moves keep every vertex.
fn fragment_relabel(vertices: &[Vertex], word: &Word, mv: &BraidMove) -> VertexMap {
    let p = mv.position;
    let mut map = VertexMap::new();
    for v in vertices {
        let image = if mv.kind == MoveKind::ExchangeAba {
            let alpha = &word.letter(p).root;
            let beta = &word.letter(p + 1).root;
            let r = word.occurrence(p);
            let q = word.occurrence(p + 1);
            if &v.dec == alpha && v.idx == r {
                Vertex::new(beta.clone(), q)
            } else if &v.dec == alpha && v.idx > r {
                Vertex::new(alpha.clone(), v.idx - 1)
            } else if &v.dec == beta && v.idx >= q {
                Vertex::new(beta.clone(), v.idx + 1)
            } else {
                v.clone()
            }
        } else {
            v.clone()
        };
        map.insert(v.clone(), image);
    }
    map
}

/// Bijection from the vertices of `μ Q(x̃)` to those of `Q(ỹ)` for
/// `y = apply_move(x, mv)`. Wrapped fragments are handled by rotating the
/// fragment to the front, so even a commuting move may shift indices.
pub fn relabel_after_move(word: &Word, mv: &BraidMove, graph: &GammaGraph) -> Result<VertexMap> {
    let cartan = graph.cartan();
    let y = word.apply_move(mv, &cartan)?;
    let p = mv.position;
    let xr = word.rotate(p as isize);
    let front = BraidMove {
        kind: mv.kind,
        position: 0,
    };
    let yr = y.rotate(p as isize);
    if xr.apply_move(&front, &cartan)? != yr {
        return Err(Error::Invariant("rotation does not commute with the move".into()));
    }
    let to_front = rotation_relabel(word, p);
    let local = fragment_relabel(&cyclic_vertices(&xr), &xr, &front);
    let back = invert(&rotation_relabel(&y, p));
    let counts_y = yr.occurrence_counts();
    let mut out = VertexMap::new();
    for (v, w) in to_front {
        let l = &local[&w];
        let n = counts_y.get(&l.dec).copied().unwrap_or(0);
        if n == 0 {
            return Err(Error::Conditions(format!("perch {} disappears", l.dec)));
        }
        let reduced = Vertex::new(l.dec.clone(), l.idx % n);
        let image = back
            .get(&reduced)
            .ok_or_else(|| Error::Invariant(format!("{reduced} has no preimage")))?;
        out.insert(v, image.clone());
    }
    Ok(out)
}

/// Bijection between `μ Q(x)` and `Q(y)` in the non-cyclic setting.
pub fn relabel_after_move_linear(word: &Word, mv: &BraidMove, graph: &GammaGraph) -> Result<VertexMap> {
    if mv.wraps(word.len()) {
        return Err(Error::InvalidMove {
            mv: mv.to_string(),
            reason: "fragment wraps around the end of the word".into(),
        });
    }
    word.apply_move(mv, &graph.cartan())?;
    let counts = word.occurrence_counts();
    let vertices: Vec<Vertex> = graph
        .vertices()
        .iter()
        .flat_map(|l| {
            let n = counts.get(l).copied().unwrap_or(0);
            (0..=n).map(move |r| Vertex::new(l.clone(), r))
        })
        .collect();
    Ok(fragment_relabel(&vertices, word, mv))
}
