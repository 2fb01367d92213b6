//! Graph model shared by every other module.
//!
//! Vertices are dense indices `0..n`. A graph may carry side labels
//! ([`Side::A`] for vertical segments, [`Side::B`] for horizontal ones), in
//! which case every edge must join an A-vertex to a B-vertex. Optional
//! per-vertex names live in a side table and never influence ids.
//!
//! Adjacency is kept twice: as a sorted edge list (for serialization) and as
//! one neighbor bitset per vertex, which the search kernels read directly.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::fmt::Write as _;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Dense vertex index.
pub type VertexId = usize;

/// Bipartition side. A-vertices are drawn as vertical segments, B-vertices
/// as horizontal segments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::A => "A",
            Side::B => "B",
        })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {0} out of range")]
    VertexOutOfRange(VertexId),
    #[error("self-loop on vertex {0}")]
    SelfLoop(VertexId),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(VertexId, VertexId),
    #[error("same-side edge {0}-{1}")]
    SameSideEdge(VertexId, VertexId),
    #[error("vertex {0} has no side label")]
    MissingSide(VertexId),
    #[error("duplicate vertex name {0:?}")]
    DuplicateName(String),
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            message: message.into(),
        }
    }
}

/// A simple undirected graph, optionally carrying an A/B side label per
/// vertex. With side labels it plays the role of a bipartite graph `(A ∪ B, E)`.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    sides: Option<Vec<Side>>,
    names: Vec<Option<String>>,
    edges: Vec<(VertexId, VertexId)>,
    adj: Vec<FixedBitSet>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("bipartite", &self.sides.is_some())
            .field("edges", &self.edges)
            .finish()
    }
}

impl Graph {
    /// Plain graph with `n` isolated vertices.
    pub fn new(n: usize) -> Self {
        Graph {
            n,
            sides: None,
            names: vec![None; n],
            edges: Vec::new(),
            adj: vec![FixedBitSet::with_capacity(n); n],
        }
    }

    /// Side-labelled graph with no edges.
    pub fn bipartite(sides: Vec<Side>) -> Self {
        let mut g = Graph::new(sides.len());
        g.sides = Some(sides);
        g
    }

    /// Builds a graph from an edge list, validating every edge.
    pub fn from_edges(
        n: usize,
        sides: Option<Vec<Side>>,
        edges: impl IntoIterator<Item = (VertexId, VertexId)>,
    ) -> Result<Self, GraphError> {
        let mut g = match sides {
            Some(s) => {
                if s.len() != n {
                    return Err(GraphError::MissingSide(s.len().min(n)));
                }
                Graph::bipartite(s)
            }
            None => Graph::new(n),
        };
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Sorted list of edges `(u, v)` with `u < v`.
    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn sides(&self) -> Option<&[Side]> {
        self.sides.as_deref()
    }

    pub fn side(&self, v: VertexId) -> Option<Side> {
        self.sides.as_ref().map(|s| s[v])
    }

    pub fn is_bipartite_labeled(&self) -> bool {
        self.sides.is_some()
    }

    pub fn names(&self) -> &[Option<String>] {
        &self.names
    }

    pub fn name(&self, v: VertexId) -> Option<&str> {
        self.names[v].as_deref()
    }

    /// Display label: the vertex name if present, else its id.
    pub fn label(&self, v: VertexId) -> String {
        match &self.names[v] {
            Some(s) => s.clone(),
            None => v.to_string(),
        }
    }

    pub fn set_name(&mut self, v: VertexId, name: impl Into<String>) {
        self.names[v] = Some(name.into());
    }

    /// Map from names to ids for all named vertices.
    pub fn name_index(&self) -> BTreeMap<String, VertexId> {
        self.names
            .iter()
            .enumerate()
            .filter_map(|(i, n)| n.as_ref().map(|s| (s.clone(), i)))
            .collect()
    }

    /// Attaches (or replaces) side labels; fails if an existing edge would
    /// become a same-side edge.
    pub fn with_sides(mut self, sides: Vec<Side>) -> Result<Self, GraphError> {
        if sides.len() != self.n {
            return Err(GraphError::MissingSide(sides.len().min(self.n)));
        }
        for &(u, v) in &self.edges {
            if sides[u] == sides[v] {
                return Err(GraphError::SameSideEdge(u, v));
            }
        }
        self.sides = Some(sides);
        Ok(self)
    }

    /// Drops side labels.
    pub fn without_sides(mut self) -> Self {
        self.sides = None;
        self
    }

    /// Appends a vertex and returns its id.
    pub fn add_vertex(&mut self, side: Option<Side>, name: Option<String>) -> Result<VertexId, GraphError> {
        let id = self.n;
        match (&mut self.sides, side) {
            (Some(s), Some(sd)) => s.push(sd),
            (Some(_), None) => return Err(GraphError::MissingSide(id)),
            (None, _) => {}
        }
        self.n += 1;
        self.names.push(name);
        for row in &mut self.adj {
            row.grow(self.n);
        }
        self.adj.push(FixedBitSet::with_capacity(self.n));
        Ok(id)
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> Result<(), GraphError> {
        if u >= self.n {
            return Err(GraphError::VertexOutOfRange(u));
        }
        if v >= self.n {
            return Err(GraphError::VertexOutOfRange(v));
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if let Some(s) = &self.sides {
            if s[u] == s[v] {
                return Err(GraphError::SameSideEdge(u, v));
            }
        }
        if self.adj[u].contains(v) {
            return Err(GraphError::DuplicateEdge(u.min(v), u.max(v)));
        }
        self.adj[u].insert(v);
        self.adj[v].insert(u);
        let e = (u.min(v), u.max(v));
        let at = self.edges.partition_point(|x| *x < e);
        self.edges.insert(at, e);
        Ok(())
    }

    /// Adds the edge unless it already exists.
    pub fn ensure_edge(&mut self, u: VertexId, v: VertexId) -> Result<bool, GraphError> {
        if u < self.n && v < self.n && self.adj[u].contains(v) {
            return Ok(false);
        }
        self.add_edge(u, v).map(|_| true)
    }

    pub fn remove_edge(&mut self, u: VertexId, v: VertexId) -> bool {
        if u >= self.n || v >= self.n || !self.adj[u].contains(v) {
            return false;
        }
        self.adj[u].set(v, false);
        self.adj[v].set(u, false);
        let e = (u.min(v), u.max(v));
        self.edges.retain(|x| *x != e);
        true
    }

    #[inline]
    pub fn adjacent(&self, u: VertexId, v: VertexId) -> bool {
        self.adj[u].contains(v)
    }

    /// Neighbor bitset of `v`.
    #[inline]
    pub fn neighbor_set(&self, v: VertexId) -> &FixedBitSet {
        &self.adj[v]
    }

    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.adj[v].ones()
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v].count_ones(..)
    }

    /// Subgraph induced by `keep`, with vertices renumbered in the given order.
    pub fn induced(&self, keep: &[VertexId]) -> Graph {
        let mut idx = vec![usize::MAX; self.n];
        for (i, &v) in keep.iter().enumerate() {
            idx[v] = i;
        }
        let mut g = match &self.sides {
            Some(s) => Graph::bipartite(keep.iter().map(|&v| s[v]).collect()),
            None => Graph::new(keep.len()),
        };
        for (i, &v) in keep.iter().enumerate() {
            g.names[i] = self.names[v].clone();
        }
        for &(u, v) in &self.edges {
            if idx[u] != usize::MAX && idx[v] != usize::MAX {
                g.add_edge(idx[u], idx[v]).expect("induced edge is valid");
            }
        }
        g
    }

    /// The same graph with A and B swapped.
    pub fn side_swapped(&self) -> Graph {
        let mut g = self.clone();
        if let Some(s) = &mut g.sides {
            for x in s.iter_mut() {
                *x = x.opposite();
            }
        }
        g
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = FixedBitSet::with_capacity(self.n);
        let mut queue = VecDeque::from([0]);
        seen.insert(0);
        while let Some(u) = queue.pop_front() {
            for w in self.adj[u].ones() {
                if !seen.put(w) {
                    queue.push_back(w);
                }
            }
        }
        seen.count_ones(..) == self.n
    }

    /// Serializes into the line-based graph file format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let kind = if self.sides.is_some() { "bipartite" } else { "plain" };
        writeln!(out, "graph {} {}", self.n, kind).unwrap();
        for (i, name) in self.names.iter().enumerate() {
            if let Some(s) = name {
                writeln!(out, "name {i} {s}").unwrap();
            }
        }
        if let Some(sides) = &self.sides {
            for (i, s) in sides.iter().enumerate() {
                writeln!(out, "side {i} {s}").unwrap();
            }
        }
        for &(u, v) in &self.edges {
            writeln!(out, "edge {u} {v}").unwrap();
        }
        out
    }

    /// Parses the line-based graph file format.
    ///
    /// ```text
    /// # comment
    /// graph <n> bipartite|plain
    /// name <id> <string>
    /// side <id> A|B
    /// edge <id> <id>
    /// ```
    pub fn parse(text: &str) -> Result<Graph, ParseError> {
        let mut header: Option<(usize, bool)> = None;
        let mut names: Vec<Option<String>> = Vec::new();
        let mut sides: Vec<Option<Side>> = Vec::new();
        let mut edges: Vec<(usize, usize, usize)> = Vec::new();
        let mut header_line = 0;

        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.splitn(2, char::is_whitespace);
            let keyword = parts.next().unwrap_or("");
            let rest = parts.next().unwrap_or("").trim();
            if header.is_none() && keyword != "graph" {
                return Err(ParseError::new(lineno, "malformed header: expected `graph <n> bipartite|plain`"));
            }
            match keyword {
                "graph" => {
                    if header.is_some() {
                        return Err(ParseError::new(lineno, "malformed header: repeated `graph` line"));
                    }
                    let toks: Vec<&str> = rest.split_whitespace().collect();
                    let (n, bip) = match toks.as_slice() {
                        [n, kind] => {
                            let n: usize = n
                                .parse()
                                .map_err(|_| ParseError::new(lineno, "malformed header: bad vertex count"))?;
                            let bip = match *kind {
                                "bipartite" => true,
                                "plain" => false,
                                _ => {
                                    return Err(ParseError::new(
                                        lineno,
                                        "malformed header: kind must be `bipartite` or `plain`",
                                    ))
                                }
                            };
                            (n, bip)
                        }
                        _ => return Err(ParseError::new(lineno, "malformed header: expected `graph <n> bipartite|plain`")),
                    };
                    header = Some((n, bip));
                    header_line = lineno;
                    names = vec![None; n];
                    sides = vec![None; n];
                }
                "name" => {
                    let n = header.unwrap().0;
                    let mut p = rest.splitn(2, char::is_whitespace);
                    let id = parse_id(p.next(), n, lineno)?;
                    let name = p.next().map(str::trim).unwrap_or("");
                    if name.is_empty() {
                        return Err(ParseError::new(lineno, "empty vertex name"));
                    }
                    names[id] = Some(name.to_string());
                }
                "side" => {
                    let (n, bip) = header.unwrap();
                    if !bip {
                        return Err(ParseError::new(lineno, "side label in a plain graph"));
                    }
                    let toks: Vec<&str> = rest.split_whitespace().collect();
                    if toks.len() != 2 {
                        return Err(ParseError::new(lineno, "expected `side <id> A|B`"));
                    }
                    let id = parse_id(Some(toks[0]), n, lineno)?;
                    sides[id] = Some(match toks[1] {
                        "A" => Side::A,
                        "B" => Side::B,
                        other => return Err(ParseError::new(lineno, format!("unknown side {other:?}"))),
                    });
                }
                "edge" => {
                    let n = header.unwrap().0;
                    let toks: Vec<&str> = rest.split_whitespace().collect();
                    if toks.len() != 2 {
                        return Err(ParseError::new(lineno, "expected `edge <id> <id>`"));
                    }
                    let u = parse_id(Some(toks[0]), n, lineno)?;
                    let v = parse_id(Some(toks[1]), n, lineno)?;
                    edges.push((u, v, lineno));
                }
                other => return Err(ParseError::new(lineno, format!("unknown keyword {other:?}"))),
            }
        }

        let (n, bip) = header.ok_or_else(|| ParseError::new(1, "malformed header: missing `graph` line"))?;
        let mut g = if bip {
            let mut s = Vec::with_capacity(n);
            for (i, side) in sides.iter().enumerate() {
                match side {
                    Some(x) => s.push(*x),
                    None => return Err(ParseError::new(header_line, format!("vertex {i} has no side label"))),
                }
            }
            Graph::bipartite(s)
        } else {
            Graph::new(n)
        };
        g.names = names;
        for (u, v, lineno) in edges {
            g.add_edge(u, v).map_err(|e| match e {
                GraphError::SameSideEdge(..) => ParseError::new(lineno, format!("same-side edge {u}-{v}")),
                GraphError::DuplicateEdge(..) => ParseError::new(lineno, format!("duplicate edge {u}-{v}")),
                GraphError::SelfLoop(_) => ParseError::new(lineno, format!("self-loop on vertex {u}")),
                other => ParseError::new(lineno, other.to_string()),
            })?;
        }
        Ok(g)
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            n: self.n,
            sides: self.sides.clone(),
            names: self.names.clone(),
            edges: self.edges.iter().map(|&(u, v)| [u, v]).collect(),
        }
    }

    pub fn from_json(j: &GraphJson) -> Result<Graph, GraphError> {
        let mut g = Graph::from_edges(j.n, j.sides.clone(), j.edges.iter().map(|e| (e[0], e[1])))?;
        if !j.names.is_empty() {
            if j.names.len() != j.n {
                return Err(GraphError::VertexOutOfRange(j.names.len()));
            }
            g.names = j.names.clone();
        }
        Ok(g)
    }

    /// Two-colours the graph, or returns an odd cycle.
    ///
    /// Components are coloured by BFS from their lowest vertex id, which
    /// receives side A.
    pub fn validate_bipartition(&self) -> Bipartition {
        let mut color: Vec<Option<Side>> = vec![None; self.n];
        let mut parent = vec![usize::MAX; self.n];
        let mut depth = vec![0usize; self.n];
        for root in 0..self.n {
            if color[root].is_some() {
                continue;
            }
            color[root] = Some(Side::A);
            let mut queue = VecDeque::from([root]);
            while let Some(u) = queue.pop_front() {
                let cu = color[u].unwrap();
                for w in self.adj[u].ones() {
                    match color[w] {
                        None => {
                            color[w] = Some(cu.opposite());
                            parent[w] = u;
                            depth[w] = depth[u] + 1;
                            queue.push_back(w);
                        }
                        Some(cw) if cw == cu => {
                            return Bipartition::OddCycle(tree_cycle(u, w, &parent, &depth));
                        }
                        Some(_) => {}
                    }
                }
            }
        }
        Bipartition::Bipartite(color.into_iter().map(Option::unwrap).collect())
    }
}

fn parse_id(tok: Option<&str>, n: usize, line: usize) -> Result<usize, ParseError> {
    let tok = tok.ok_or_else(|| ParseError::new(line, "missing vertex id"))?;
    let id: usize = tok
        .parse()
        .map_err(|_| ParseError::new(line, format!("bad vertex id {tok:?}")))?;
    if id >= n {
        return Err(ParseError::new(line, format!("unknown vertex {id}")));
    }
    Ok(id)
}

/// Cycle closed by the non-tree edge `u`-`w` in a BFS forest.
fn tree_cycle(u: usize, w: usize, parent: &[usize], depth: &[usize]) -> Vec<VertexId> {
    let (mut a, mut b) = (u, w);
    let mut left = vec![a];
    let mut right = vec![b];
    while depth[a] > depth[b] {
        a = parent[a];
        left.push(a);
    }
    while depth[b] > depth[a] {
        b = parent[b];
        right.push(b);
    }
    while a != b {
        a = parent[a];
        b = parent[b];
        left.push(a);
        right.push(b);
    }
    right.pop();
    right.reverse();
    left.extend(right);
    left
}

/// Result of [`Graph::validate_bipartition`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bipartition {
    Bipartite(Vec<Side>),
    OddCycle(Vec<VertexId>),
}

impl Bipartition {
    pub fn coloring(&self) -> Option<&[Side]> {
        match self {
            Bipartition::Bipartite(c) => Some(c),
            Bipartition::OddCycle(_) => None,
        }
    }
}

/// JSON mirror of the text format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sides: Option<Vec<Side>>,
    #[serde(default)]
    pub names: Vec<Option<String>>,
    pub edges: Vec<[usize; 2]>,
}

/// Small constructors used throughout tests and the gadget lab.
pub mod families {
    use super::*;

    /// Even cycle `a_1, b_1, a_2, b_2, ..., a_k, b_k`; vertex `2i` is `a_{i+1}`
    /// (side A) and `2i+1` is `b_{i+1}` (side B).
    pub fn even_cycle(k: usize) -> Graph {
        let n = 2 * k;
        let sides = (0..n).map(|i| if i % 2 == 0 { Side::A } else { Side::B }).collect();
        let mut g = Graph::bipartite(sides);
        for i in 0..n {
            g.add_edge(i, (i + 1) % n).unwrap();
        }
        for i in 0..k {
            g.set_name(2 * i, format!("a{}", i + 1));
            g.set_name(2 * i + 1, format!("b{}", i + 1));
        }
        g
    }

    /// Plain cycle on `n` vertices.
    pub fn cycle(n: usize) -> Graph {
        let mut g = Graph::new(n);
        for i in 0..n {
            g.add_edge(i, (i + 1) % n).unwrap();
        }
        g
    }

    /// `K_2` with vertex 0 = `b` (side B) and vertex 1 = `a` (side A).
    pub fn k2() -> Graph {
        let mut g = Graph::from_edges(2, Some(vec![Side::B, Side::A]), [(0, 1)]).unwrap();
        g.set_name(0, "b");
        g.set_name(1, "a");
        g
    }

    /// Every side-labeled connected bipartite graph on `n` vertices whose
    /// A-side is a prefix `0..k` (all `k`), with no isomorphism reduction.
    pub fn labeled_connected_bipartite(n: usize) -> Vec<Graph> {
        let mut out = Vec::new();
        let ks: Vec<usize> = if n == 1 { vec![0, 1] } else { (1..n).collect() };
        for k in ks {
            let sides: Vec<Side> = (0..n).map(|v| if v < k { Side::A } else { Side::B }).collect();
            let pairs: Vec<(usize, usize)> = (0..k).flat_map(|a| (k..n).map(move |b| (a, b))).collect();
            for mask in 0u64..(1u64 << pairs.len()) {
                let edges = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e);
                let g = Graph::from_edges(n, Some(sides.clone()), edges).unwrap();
                if g.is_connected() {
                    out.push(g);
                }
            }
        }
        out
    }

    /// Every simple graph on the vertex set `0..n` (labeled, unreduced).
    pub fn all_graphs(n: usize) -> Vec<Graph> {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        (0u64..(1u64 << pairs.len()))
            .map(|mask| {
                let edges = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e);
                Graph::from_edges(n, None, edges).unwrap()
            })
            .collect()
    }

    /// Complete bipartite graph; B-vertices first.
    pub fn complete_bipartite(nb: usize, na: usize) -> Graph {
        let mut sides = vec![Side::B; nb];
        sides.extend(std::iter::repeat_n(Side::A, na));
        let mut g = Graph::bipartite(sides);
        for b in 0..nb {
            for a in 0..na {
                g.add_edge(b, nb + a).unwrap();
            }
        }
        g
    }
}
