//! Quivers with frozen vertices and half-arrows. Also amalgamation along
//! gluing data, matrix mutation and the on-disk formats.
//!
//! The exchange matrix is stored doubled so that half-arrows stay integral:
//! `eps2[i][j] = 2 * (#arrows j -> i  -  #arrows i -> j)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cartan::Label;
use crate::error::{Error, Result};

/// A vertex `(dec, idx)`: decoration (perch) and position along the perch.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Vertex {
    pub dec: Label,
    pub idx: usize,
}

impl Vertex {
    pub fn new(dec: impl Into<Label>, idx: usize) -> Self {
        Vertex {
            dec: dec.into(),
            idx,
        }
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.dec, self.idx)
    }
}

impl FromStr for Vertex {
    type Err = Error;

    /// Accepts `dec,idx` with optional surrounding parentheses.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().trim_start_matches('(').trim_end_matches(')');
        let (dec, idx) = t
            .rsplit_once(',')
            .ok_or_else(|| Error::parse("vertex", 1, format!("expected `dec,idx`, got `{s}`")))?;
        let idx = idx
            .trim()
            .parse()
            .map_err(|_| Error::parse("vertex", 1, format!("bad index in `{s}`")))?;
        Ok(Vertex::new(dec.trim(), idx))
    }
}

/// A single full arrow. Parallel arrows between the same pair of vertices are
/// distinguished by `ord`, numbered `0..m` in a normalized quiver.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Arrow {
    pub src: Vertex,
    pub tgt: Vertex,
    pub ord: usize,
}

impl Arrow {
    pub fn new(src: Vertex, tgt: Vertex) -> Self {
        Arrow { src, tgt, ord: 0 }
    }

    pub fn with_ord(src: Vertex, tgt: Vertex, ord: usize) -> Self {
        Arrow { src, tgt, ord }
    }
}

impl fmt::Display for Arrow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.src, self.tgt)?;
        if self.ord > 0 {
            write!(f, "#{}", self.ord)?;
        }
        Ok(())
    }
}

pub type VertexMap = BTreeMap<Vertex, Vertex>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Quiver {
    vertices: Vec<Vertex>,
    frozen: Vec<bool>,
    eps2: Vec<Vec<i64>>,
}

impl Quiver {
    /// A quiver with the given vertices and no arrows.
    pub fn empty(vertices: impl IntoIterator<Item = (Vertex, bool)>) -> Result<Self> {
        let mut vs: Vec<(Vertex, bool)> = vertices.into_iter().collect();
        vs.sort();
        for w in vs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::Invariant(format!("duplicate vertex {}", w[0].0)));
            }
        }
        let n = vs.len();
        Ok(Quiver {
            vertices: vs.iter().map(|v| v.0.clone()).collect(),
            frozen: vs.iter().map(|v| v.1).collect(),
            eps2: vec![vec![0; n]; n],
        })
    }

    /// Builds a quiver from a doubled exchange matrix given in the listed
    /// vertex order, which need not be sorted.
    pub fn from_eps2(vertices: Vec<(Vertex, bool)>, eps2: Vec<Vec<i64>>) -> Result<Self> {
        let n = vertices.len();
        if eps2.len() != n || eps2.iter().any(|row| row.len() != n) {
            return Err(Error::Invariant("eps2 must be a square matrix".into()));
        }
        let mut q = Quiver::empty(vertices.clone())?;
        for (a, (va, _)) in vertices.iter().enumerate() {
            let i = q.index_of(va).expect("vertex present");
            for (b, (vb, _)) in vertices.iter().enumerate() {
                let j = q.index_of(vb).expect("vertex present");
                q.eps2[i][j] = eps2[a][b];
            }
        }
        q.validate()?;
        Ok(q)
    }

    /// Adds `halves` half-arrows from `src` to `tgt` (2 = one full arrow).
    pub fn add_arrow(&mut self, src: &Vertex, tgt: &Vertex, halves: i64) -> Result<()> {
        let i = self.require(src)?;
        let j = self.require(tgt)?;
        if i == j {
            return Err(Error::Invariant(format!("loop at {src}")));
        }
        self.eps2[i][j] -= halves;
        self.eps2[j][i] += halves;
        Ok(())
    }

    fn require(&self, v: &Vertex) -> Result<usize> {
        self.index_of(v)
            .ok_or_else(|| Error::UnknownLabel(v.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.len();
        for i in 0..n {
            if self.eps2[i][i] != 0 {
                return Err(Error::Invariant(format!("loop at {}", self.vertices[i])));
            }
            for j in 0..n {
                if self.eps2[i][j] != -self.eps2[j][i] {
                    return Err(Error::Invariant("exchange matrix is not skew-symmetric".into()));
                }
                if self.eps2[i][j] % 2 != 0 && !(self.frozen[i] && self.frozen[j]) {
                    return Err(Error::Invariant(format!(
                        "half-arrow between {} and {} touches a mutable vertex",
                        self.vertices[i], self.vertices[j]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn index_of(&self, v: &Vertex) -> Option<usize> {
        self.vertices.binary_search(v).ok()
    }

    pub fn contains(&self, v: &Vertex) -> bool {
        self.index_of(v).is_some()
    }

    pub fn is_frozen(&self, i: usize) -> bool {
        self.frozen[i]
    }

    pub fn is_frozen_vertex(&self, v: &Vertex) -> bool {
        self.index_of(v).map(|i| self.frozen[i]).unwrap_or(false)
    }

    pub fn frozen_count(&self) -> usize {
        self.frozen.iter().filter(|&&f| f).count()
    }

    pub fn eps2(&self, i: usize, j: usize) -> i64 {
        self.eps2[i][j]
    }

    pub fn eps2_between(&self, a: &Vertex, b: &Vertex) -> i64 {
        match (self.index_of(a), self.index_of(b)) {
            (Some(i), Some(j)) => self.eps2[i][j],
            _ => 0,
        }
    }

    pub fn eps2_matrix(&self) -> &[Vec<i64>] {
        &self.eps2
    }

    /// Number of full arrows `i -> j`.
    pub fn arrow_count(&self, i: usize, j: usize) -> usize {
        let e = self.eps2[i][j];
        if e < 0 {
            (-e / 2) as usize
        } else {
            0
        }
    }

    pub fn arrow_count_between(&self, a: &Vertex, b: &Vertex) -> usize {
        match (self.index_of(a), self.index_of(b)) {
            (Some(i), Some(j)) => self.arrow_count(i, j),
            _ => 0,
        }
    }

    pub fn has_half_arrows(&self) -> bool {
        self.eps2.iter().flatten().any(|e| e % 2 != 0)
    }

    /// All full arrows in normalized form, sorted by `(src, tgt, ord)`.
    pub fn arrows(&self) -> Vec<Arrow> {
        let mut out = Vec::new();
        for i in 0..self.len() {
            for j in 0..self.len() {
                for ord in 0..self.arrow_count(i, j) {
                    out.push(Arrow::with_ord(
                        self.vertices[i].clone(),
                        self.vertices[j].clone(),
                        ord,
                    ));
                }
            }
        }
        out
    }

    pub fn arrow_total(&self) -> usize {
        (0..self.len())
            .map(|i| (0..self.len()).map(|j| self.arrow_count(i, j)).sum::<usize>())
            .sum()
    }

    pub fn has_arrow(&self, a: &Arrow) -> bool {
        a.ord < self.arrow_count_between(&a.src, &a.tgt)
    }

    /// Number of full arrows incident to `v` (in either direction).
    pub fn degree(&self, v: &Vertex) -> usize {
        match self.index_of(v) {
            Some(i) => (0..self.len())
                .map(|j| self.arrow_count(i, j) + self.arrow_count(j, i))
                .sum(),
            None => 0,
        }
    }

    /// Fomin–Zelevinsky matrix mutation at a mutable vertex.
    pub fn mutate(&self, k: &Vertex) -> Result<Quiver> {
        let k = self.require(k)?;
        if self.frozen[k] {
            return Err(Error::Precondition(format!(
                "cannot mutate at frozen vertex {}",
                self.vertices[k]
            )));
        }
        let n = self.len();
        let e = &self.eps2;
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                out.eps2[i][j] = if i == k || j == k {
                    -e[i][j]
                } else {
                    let delta = e[i][k].abs() * e[k][j] + e[i][k] * e[k][j].abs();
                    if delta % 4 != 0 {
                        return Err(Error::Invariant("non-integral mutation".into()));
                    }
                    e[i][j] + delta / 4
                };
            }
        }
        Ok(out)
    }

    /// Renames vertices along a bijection onto a new vertex set.
    pub fn relabel(&self, map: &VertexMap) -> Result<Quiver> {
        check_bijection(self.vertices(), map)?;
        let vertices = self
            .vertices
            .iter()
            .zip(&self.frozen)
            .map(|(v, &f)| (map[v].clone(), f))
            .collect();
        Quiver::from_eps2(vertices, self.eps2.clone())
    }

    pub fn canonical_form(&self) -> CanonicalForm {
        CanonicalForm(serde_json::to_string(&self.to_doc()).expect("quiver serializes"))
    }

    fn to_doc(&self) -> QuiverDoc {
        QuiverDoc {
            vertices: self
                .vertices
                .iter()
                .zip(&self.frozen)
                .map(|(v, &frozen)| VertexDoc {
                    dec: v.dec.clone(),
                    idx: v.idx,
                    frozen,
                })
                .collect(),
            eps2: self.eps2.clone(),
        }
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self.to_doc()).expect("quiver serializes")
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_doc()).expect("quiver serializes");
        s.push('\n');
        s
    }

    pub fn from_json_value(value: serde_json::Value) -> Result<Self> {
        let doc: QuiverDoc = serde_json::from_value(value)?;
        doc.into_quiver()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: QuiverDoc = serde_json::from_str(text)?;
        doc.into_quiver()
    }

    /// Graphviz rendering with one horizontal row per decoration.
    pub fn to_dot(&self) -> String {
        let decs: BTreeSet<&Label> = self.vertices.iter().map(|v| &v.dec).collect();
        let row: BTreeMap<&Label, usize> = decs.into_iter().enumerate().map(|(i, d)| (d, i)).collect();
        let name = |v: &Vertex| format!("\"{}_{}\"", v.dec, v.idx);
        let mut out = String::from("digraph Q {\n  node [shape=circle];\n");
        for (v, &frozen) in self.vertices.iter().zip(&self.frozen) {
            out.push_str(&format!(
                "  {} [label=\"{}{}\", pos=\"{},{}!\"{}];\n",
                name(v),
                v.dec,
                v.idx,
                2 * v.idx,
                -2 * row[&v.dec] as i64,
                if frozen { ", shape=box" } else { "" }
            ));
        }
        for i in 0..self.len() {
            for j in 0..self.len() {
                let e = -self.eps2[i][j];
                if e <= 0 {
                    continue;
                }
                for _ in 0..e / 2 {
                    out.push_str(&format!("  {} -> {};\n", name(&self.vertices[i]), name(&self.vertices[j])));
                }
                if e % 2 == 1 {
                    out.push_str(&format!(
                        "  {} -> {} [style=dashed];\n",
                        name(&self.vertices[i]),
                        name(&self.vertices[j])
                    ));
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

fn check_bijection(domain: &[Vertex], map: &VertexMap) -> Result<()> {
    if map.len() != domain.len() || domain.iter().any(|v| !map.contains_key(v)) {
        return Err(Error::Invariant("relabel map does not cover the vertex set".into()));
    }
    let images: BTreeSet<&Vertex> = map.values().collect();
    if images.len() != map.len() {
        return Err(Error::Invariant("relabel map is not injective".into()));
    }
    Ok(())
}

/// `true` iff `a` relabelled along `map` has exactly the exchange matrix and
/// frozen set of `b`.
pub fn quiver_isomorphic_by_relabel(a: &Quiver, b: &Quiver, map: &VertexMap) -> Result<bool> {
    check_bijection(a.vertices(), map)?;
    if a.len() != b.len() {
        return Ok(false);
    }
    for (i, vi) in a.vertices().iter().enumerate() {
        let Some(bi) = b.index_of(&map[vi]) else {
            return Ok(false);
        };
        if a.frozen[i] != b.frozen[bi] {
            return Ok(false);
        }
        for (j, vj) in a.vertices().iter().enumerate() {
            let bj = b.index_of(&map[vj]).expect("checked above");
            if a.eps2[i][j] != b.eps2[bi][bj] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Deterministic encoding; two quivers are equal iff their forms are equal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalForm(String);

impl CanonicalForm {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

#[derive(Serialize, Deserialize)]
struct VertexDoc {
    dec: Label,
    idx: usize,
    frozen: bool,
}

#[derive(Serialize, Deserialize)]
struct QuiverDoc {
    vertices: Vec<VertexDoc>,
    eps2: Vec<Vec<i64>>,
}

impl QuiverDoc {
    fn into_quiver(self) -> Result<Quiver> {
        let vertices = self
            .vertices
            .into_iter()
            .map(|v| (Vertex::new(v.dec, v.idx), v.frozen))
            .collect();
        Quiver::from_eps2(vertices, self.eps2)
    }
}

/// Target vertex set plus one injection per piece.
#[derive(Clone, Debug)]
pub struct GluingData {
    pub target: Vec<Vertex>,
    pub maps: Vec<VertexMap>,
}

/// Sums the pieces' exchange matrices along the gluing maps. A glued vertex
/// that ends up with no half-arrows is defrosted.
pub fn amalgamate(pieces: &[Quiver], gluing: &GluingData) -> Result<Quiver> {
    if pieces.len() != gluing.maps.len() {
        return Err(Error::Gluing(format!(
            "{} pieces but {} maps",
            pieces.len(),
            gluing.maps.len()
        )));
    }
    let target: BTreeSet<&Vertex> = gluing.target.iter().collect();
    if target.len() != gluing.target.len() {
        return Err(Error::Gluing("duplicate target vertex".into()));
    }
    let mut preimages: BTreeMap<&Vertex, Vec<bool>> = BTreeMap::new();
    for (p, (piece, map)) in pieces.iter().zip(&gluing.maps).enumerate() {
        if map.len() != piece.len() || piece.vertices().iter().any(|v| !map.contains_key(v)) {
            return Err(Error::Gluing(format!("map {p} does not match its piece")));
        }
        let images: BTreeSet<&Vertex> = map.values().collect();
        if images.len() != map.len() {
            return Err(Error::Gluing(format!("map {p} is not injective")));
        }
        for (i, v) in piece.vertices().iter().enumerate() {
            let img = &map[v];
            let Some(t) = target.get(img) else {
                return Err(Error::Gluing(format!("{img} is not a target vertex")));
            };
            preimages.entry(*t).or_default().push(piece.is_frozen(i));
        }
    }
    if preimages.len() != target.len() {
        return Err(Error::Gluing("maps do not cover the target".into()));
    }
    for (v, pre) in &preimages {
        if pre.len() > 1 && pre.iter().any(|f| !f) {
            return Err(Error::Gluing(format!("{v} is glued but has a mutable preimage")));
        }
    }
    let mut out = Quiver::empty(
        gluing
            .target
            .iter()
            .map(|v| (v.clone(), preimages[v].iter().any(|&f| f))),
    )?;
    for (piece, map) in pieces.iter().zip(&gluing.maps) {
        let idx: Vec<usize> = piece
            .vertices()
            .iter()
            .map(|v| out.index_of(&map[v]).expect("covered"))
            .collect();
        for i in 0..piece.len() {
            for j in 0..piece.len() {
                out.eps2[idx[i]][idx[j]] += piece.eps2[i][j];
            }
        }
    }
    for (i, v) in out.vertices.iter().enumerate() {
        let glued = preimages[v].len() > 1;
        if out.frozen[i] && glued && out.eps2[i].iter().all(|e| e % 2 == 0) {
            out.frozen[i] = false;
        }
    }
    out.validate()?;
    Ok(out)
}
