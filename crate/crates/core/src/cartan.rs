//! Simply-laced graphs and their generalized Cartan matrices.
//!
//! Node labels are opaque strings ordered lexicographically; every
//! canonical form downstream inherits this order.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A node label of the graph.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Label(String);

impl Label {
    pub fn new(s: impl Into<String>) -> Self {
        Label(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label(s.to_string())
    }
}

impl From<String> for Label {
    fn from(s: String) -> Self {
        Label(s)
    }
}

/// A connected simple graph without loops.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaGraph {
    vertices: Vec<Label>,
    /// Index pairs `(i, j)` with `i < j`.
    edges: BTreeSet<(usize, usize)>,
}

impl GammaGraph {
    pub fn new<V, E, L>(vertices: V, edges: E) -> Result<Self>
    where
        V: IntoIterator,
        V::Item: Into<Label>,
        E: IntoIterator<Item = (L, L)>,
        L: Into<Label>,
    {
        let listed: Vec<Label> = vertices.into_iter().map(Into::into).collect();
        if listed.is_empty() {
            return Err(Error::InvalidGraph("graph has no vertices".into()));
        }
        let mut sorted = listed.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != listed.len() {
            return Err(Error::InvalidGraph("duplicate vertex label".into()));
        }
        let mut graph = GammaGraph {
            vertices: sorted,
            edges: BTreeSet::new(),
        };
        for (a, b) in edges {
            let (a, b) = (a.into(), b.into());
            let i = graph.index_of(&a).ok_or_else(|| Error::UnknownLabel(a.to_string()))?;
            let j = graph.index_of(&b).ok_or_else(|| Error::UnknownLabel(b.to_string()))?;
            if i == j {
                return Err(Error::InvalidGraph(format!("loop at `{a}`")));
            }
            if !graph.edges.insert((i.min(j), i.max(j))) {
                return Err(Error::InvalidGraph(format!(
                    "more than one edge between `{a}` and `{b}`"
                )));
            }
        }
        if !graph.is_connected() {
            return Err(Error::InvalidGraph("graph is not connected".into()));
        }
        Ok(graph)
    }

    /// Dynkin diagram of type A_n with labels `1..=n`.
    pub fn a_n(n: usize) -> Self {
        let labels: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
        let edges: Vec<(String, String)> =
            (1..n).map(|i| (i.to_string(), (i + 1).to_string())).collect();
        GammaGraph::new(labels, edges).expect("path graph is valid")
    }

    /// Cycle graph on `n >= 3` vertices labelled `1..=n` (extended type A).
    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a simple cycle needs at least three vertices");
        let labels: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
        let edges: Vec<(String, String)> = (1..=n)
            .map(|i| (i.to_string(), (i % n + 1).to_string()))
            .collect();
        GammaGraph::new(labels, edges).expect("cycle graph is valid")
    }

    /// Parses the line format `vertices: a b c` followed by `edge: a b` lines.
    /// Blank lines and `#` comments are ignored.
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut vertices: Option<Vec<String>> = None;
        let mut edges = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, rest) = line
                .split_once(':')
                .ok_or_else(|| Error::parse(origin, line_no, "expected `key: values`"))?;
            let items: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
            match key.trim() {
                "vertices" => {
                    if vertices.is_some() {
                        return Err(Error::parse(origin, line_no, "duplicate `vertices` line"));
                    }
                    vertices = Some(items);
                }
                "edge" => {
                    if items.len() != 2 {
                        return Err(Error::parse(origin, line_no, "an edge needs two labels"));
                    }
                    edges.push((line_no, items[0].clone(), items[1].clone()));
                }
                other => {
                    return Err(Error::parse(origin, line_no, format!("unknown key `{other}`")))
                }
            }
        }
        let vertices = vertices.ok_or_else(|| Error::parse(origin, 1, "missing `vertices` line"))?;
        let last = edges.last().map(|e| e.0).unwrap_or(1);
        GammaGraph::new(vertices, edges.into_iter().map(|(_, a, b)| (a, b)))
            .map_err(|e| Error::parse(origin, last, e.to_string()))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("vertices:");
        for v in &self.vertices {
            out.push(' ');
            out.push_str(v.as_str());
        }
        out.push('\n');
        for &(i, j) in &self.edges {
            out.push_str(&format!("edge: {} {}\n", self.vertices[i], self.vertices[j]));
        }
        out
    }

    pub fn vertices(&self) -> &[Label] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn index_of(&self, label: &Label) -> Option<usize> {
        self.vertices.binary_search(label).ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i.min(j), i.max(j)))
    }

    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        (0..self.len()).filter(|&j| self.adjacent(i, j)).collect()
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.len()];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(i) = queue.pop_front() {
            for j in self.neighbors(i) {
                if !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn cartan(&self) -> CartanMatrix {
        cartan_of(self)
    }

    /// Rank of `H_1(Γ, Z)`: `|E| - |V| + 1` for a connected graph.
    pub fn first_betti_number(&self) -> usize {
        self.edges.len() + 1 - self.vertices.len()
    }
}

/// Symmetric generalized Cartan matrix indexed by the sorted labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartanMatrix {
    labels: Vec<Label>,
    entries: Vec<Vec<i64>>,
}

impl CartanMatrix {
    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i][j]
    }

    pub fn entry(&self, a: &Label, b: &Label) -> Option<i64> {
        Some(self.get(self.index_of(a)?, self.index_of(b)?))
    }

    pub fn index_of(&self, label: &Label) -> Option<usize> {
        self.labels.binary_search(label).ok()
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.entries
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.labels.len();
        (0..n).all(|i| (0..n).all(|j| self.entries[i][j] == self.entries[j][i]))
    }
}

pub fn cartan_of(graph: &GammaGraph) -> CartanMatrix {
    let n = graph.len();
    let entries = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match () {
                    _ if i == j => 2,
                    _ if graph.adjacent(i, j) => -1,
                    _ => 0,
                })
                .collect()
        })
        .collect();
    CartanMatrix {
        labels: graph.vertices.clone(),
        entries,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a2_cartan() {
        let c = GammaGraph::a_n(2).cartan();
        assert_eq!(c.rows(), &[vec![2, -1], vec![-1, 2]]);
    }

    #[test]
    fn single_vertex() {
        let g = GammaGraph::new(["a"], Vec::<(&str, &str)>::new()).unwrap();
        assert_eq!(g.cartan().rows(), &[vec![2]]);
        assert_eq!(g.first_betti_number(), 0);
    }

    #[test]
    fn triangle_is_all_minus_one_off_diagonal() {
        let c = GammaGraph::cycle(3).cartan();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(c.get(i, j), if i == j { 2 } else { -1 });
            }
        }
        assert!(c.is_symmetric());
    }

    #[test]
    fn betti_numbers() {
        assert_eq!(GammaGraph::a_n(3).first_betti_number(), 0);
        assert_eq!(GammaGraph::cycle(3).first_betti_number(), 1);
        assert_eq!(GammaGraph::cycle(5).first_betti_number(), 1);
    }

    #[test]
    fn rejects_loops_multi_edges_and_disconnected() {
        assert!(GammaGraph::new(["a"], [("a", "a")]).is_err());
        assert!(GammaGraph::new(["a", "b"], [("a", "b"), ("b", "a")]).is_err());
        assert!(GammaGraph::new(["a", "b"], Vec::<(&str, &str)>::new()).is_err());
        assert!(GammaGraph::new(["a", "b"], [("a", "c")]).is_err());
    }

    #[test]
    fn parse_round_trip() {
        let text = "# A3\nvertices: 1 2 3\nedge: 1 2\n\nedge: 2 3\n";
        let g = GammaGraph::parse(text, "a3.txt").unwrap();
        assert_eq!(g, GammaGraph::a_n(3));
        assert_eq!(GammaGraph::parse(&g.to_text(), "again").unwrap(), g);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = GammaGraph::parse("vertices: a b\nedge: a\n", "g.txt").unwrap_err();
        assert!(err.to_string().starts_with("g.txt:2:"), "{err}");
        let err = GammaGraph::parse("vertices: a b\nedge: a b\nedge: b a\n", "g.txt").unwrap_err();
        assert!(err.to_string().contains("more than one edge"), "{err}");
    }

    #[test]
    fn adding_an_edge_increments_betti() {
        let tree = GammaGraph::new(["a", "b", "c", "d"], [("a", "b"), ("b", "c"), ("c", "d")]).unwrap();
        let more =
            GammaGraph::new(["a", "b", "c", "d"], [("a", "b"), ("b", "c"), ("c", "d"), ("a", "d")])
                .unwrap();
        assert_eq!(tree.first_betti_number() + 1, more.first_betti_number());
    }
}
