//! Gadget tables: vertex lists, adjacency by A-vertex, and order templates
//! for the handy gadget, the forced cycle, the clause gadget and the
//! transmission gadgets. Every table is validated by the gadget lab and by
//! witness feasibility on built reductions.
//!
//! Names are ASCII: `b1_0` is `b₁⁰`, `Mx_1` is `M_x¹`, and so on.

use std::collections::BTreeMap;

use crate::graph::{Graph, Side, VertexId};

/// Incremental named-vertex builder used by every construction in this
/// crate. Names are unique; edges are given by name.
#[derive(Clone, Debug)]
pub struct GadgetBuilder {
    graph: Graph,
    ids: BTreeMap<String, VertexId>,
}

impl Default for GadgetBuilder {
    fn default() -> Self {
        Self::new()
    }
}

impl GadgetBuilder {
    pub fn new() -> Self {
        GadgetBuilder {
            graph: Graph::bipartite(Vec::new()),
            ids: BTreeMap::new(),
        }
    }

    /// Adds `name` on `side`, or returns the existing vertex.
    ///
    /// # Panics
    /// If `name` already exists on the other side.
    pub fn vertex(&mut self, name: &str, side: Side) -> VertexId {
        if let Some(&v) = self.ids.get(name) {
            assert_eq!(self.graph.side(v), Some(side), "vertex {name} redeclared on the other side");
            return v;
        }
        let v = self.graph.add_vertex(Some(side), Some(name.to_string())).expect("fresh bipartite vertex");
        self.ids.insert(name.to_string(), v);
        v
    }

    /// # Panics
    /// If either name is unknown or both lie on the same side.
    pub fn edge(&mut self, a: &str, b: &str) {
        let (u, v) = (self.id(a), self.id(b));
        self.graph.ensure_edge(u, v).unwrap_or_else(|e| panic!("edge {a}-{b}: {e}"));
    }

    pub fn edge_ids(&mut self, u: VertexId, v: VertexId) {
        self.graph.ensure_edge(u, v).unwrap_or_else(|e| panic!("edge {u}-{v}: {e}"));
    }

    /// # Panics
    /// If `name` is unknown.
    pub fn id(&self, name: &str) -> VertexId {
        *self.ids.get(name).unwrap_or_else(|| panic!("unknown vertex {name}"))
    }

    pub fn get(&self, name: &str) -> Option<VertexId> {
        self.ids.get(name).copied()
    }

    /// Ids of a whitespace-separated list of names.
    pub fn seq(&self, names: &str) -> Vec<VertexId> {
        names.split_whitespace().map(|n| self.id(n)).collect()
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn registry(&self) -> &BTreeMap<String, VertexId> {
        &self.ids
    }

    pub fn finish(self) -> (Graph, BTreeMap<String, VertexId>) {
        (self.graph, self.ids)
    }

    /// Adds a table: vertices on both sides, then each A-vertex's neighbors.
    /// `name` maps table names to graph names.
    pub fn add_table(&mut self, table: &Table, name: &dyn Fn(&str) -> String) {
        for a in table.a {
            self.vertex(&name(a), Side::A);
        }
        for b in table.b {
            self.vertex(&name(b), Side::B);
        }
        for (a, bs) in table.edges {
            for b in *bs {
                self.edge(&name(a), &name(b));
            }
        }
    }
}

/// Static gadget description. Edges are listed per A-vertex and may mention
/// vertices declared by another table that is added first.
#[derive(Clone, Copy, Debug)]
pub struct Table {
    pub a: &'static [&'static str],
    pub b: &'static [&'static str],
    pub edges: &'static [(&'static str, &'static [&'static str])],
}

impl Table {
    pub fn edge_count(&self) -> usize {
        self.edges.iter().map(|(_, bs)| bs.len()).sum()
    }
}

/// The handy gadget: an 8-cycle `T f1 e1 g1 Q g2 e2 f2`, the vertex `R` on
/// `e1, Q, e2`, and the three vertices `N, P, Y` attached to the second half.
pub const HANDY: Table = Table {
    a: &["T", "N", "Q", "P", "Y", "e1", "e2"],
    b: &["f1", "f2", "g1", "g2", "R"],
    edges: &[
        ("T", &["f1", "f2"]),
        ("e1", &["f1", "g1", "R"]),
        ("Q", &["g1", "g2", "R"]),
        ("e2", &["g2", "f2", "R"]),
        ("N", &["f1", "g1", "g2", "f2"]),
        ("P", &["g1", "g2", "f2"]),
        ("Y", &["g1", "g2", "f2"]),
    ],
};

/// One representation of the handy gadget. All others only move `P` next
/// to `N` and `Y` among `N, P, T`.
pub const HANDY_ORDER: &str = "f1 g1 R e1 g2 Q f2 e2 N P Y T";

/// Forced cycle on `k` underlying B-vertices `p_1..p_k` and A-vertices
/// `h_1..h_k` with `p_1 = f1`, `p_{k-1} = g2`, `p_k = f2`, `h_1 = T`,
/// `h_k = Y`, plus `p'_2`. Other vertices are named `p{i}`, `h{i}`, `p'2`.
///
/// # Panics
/// If `k < 3`.
pub fn forced_cycle(k: usize) -> GadgetBuilder {
    assert!(k >= 3, "forced cycle needs k >= 3");
    let mut b = GadgetBuilder::new();
    b.add_table(&HANDY, &|s| s.to_string());
    for i in 1..=k {
        b.vertex(&forced_p(i, k), Side::B);
        b.vertex(&forced_h(i, k), Side::A);
    }
    for i in 1..=k {
        let prev = if i == 1 { k } else { i - 1 };
        b.edge(&forced_h(i, k), &forced_p(i, k));
        b.edge(&forced_h(i, k), &forced_p(prev, k));
    }
    b.vertex("p'2", Side::B);
    let (h2, h3) = (forced_h(2, k), forced_h(3, k));
    for a in [h2.as_str(), h3.as_str(), "Q"] {
        b.edge("p'2", a);
    }
    b.edge(&h2, "R");
    b.edge(&h2, "g1");
    b
}

/// Name of `p_i` in [`forced_cycle`].
pub fn forced_p(i: usize, k: usize) -> String {
    match i {
        1 => "f1".into(),
        _ if i == k => "f2".into(),
        _ if i == k - 1 => "g2".into(),
        _ => format!("p{i}"),
    }
}

/// Name of `h_i` in [`forced_cycle`].
pub fn forced_h(i: usize, k: usize) -> String {
    match i {
        1 => "T".into(),
        _ if i == k => "Y".into(),
        _ => format!("h{i}"),
    }
}

/// The standard representation of [`forced_cycle`].
pub fn forced_cycle_order(k: usize) -> String {
    let mut s = String::from("f1 g1 R e1");
    for i in 2..k - 1 {
        s.push(' ');
        s.push_str(&forced_p(i, k));
        if i == 2 {
            s.push_str(" p'2");
        }
        s.push(' ');
        s.push_str(&forced_h(i, k));
    }
    s.push_str(" g2 ");
    s.push_str(&forced_h(k - 1, k));
    s.push_str(" Q f2 e2 N P Y T");
    s
}

/// Renaming of the handy gadget inside a clause gadget.
pub fn clause_handy_name(s: &str) -> &str {
    match s {
        "e1" => "H",
        "N" => "S",
        _ => s,
    }
}

/// Proper part of the clause gadget; its handy gadget is [`HANDY`] renamed
/// by [`clause_handy_name`].
pub const CLAUSE: Table = Table {
    a: &["a1", "a2", "C", "D", "W", "L", "V"],
    b: &["b1", "b2", "b1_0", "b1_1", "d1", "d2", "U", "Z"],
    edges: &[
        ("S", &["b1", "b2", "b1_0", "b1_1", "Z"]),
        ("H", &["b2"]),
        ("a1", &["b1", "b1_0", "b1_1", "d1", "Z"]),
        ("a2", &["b2", "d2"]),
        ("C", &["b1_0", "b1_1", "d1", "U"]),
        ("D", &["b1", "b1_0"]),
        ("W", &["b1", "b1_0", "b1_1", "d1", "d2", "U", "Z"]),
        ("L", &["b1_0", "b1_1", "Z"]),
        ("V", &["b1", "b1_0", "b1_1", "d2", "Z"]),
    ],
};

/// The three transmission gadgets of a clause. `s_h` copies the clause
/// neighborhood of `b1_h`; `M_z^1` is the clause vertex `V`.
pub const TRANSMISSION: Table = Table {
    a: &["Mx_0", "Mx_1", "t_0", "t_1", "My_0", "My_1", "Mz_0"],
    b: &["s_0", "s_1", "r_0", "r_1", "v_0", "v_1"],
    edges: &[
        ("a1", &["s_0", "s_1", "v_1"]),
        ("C", &["s_0", "s_1", "v_0"]),
        ("D", &["s_0"]),
        ("W", &["s_0", "s_1"]),
        ("L", &["s_0", "s_1"]),
        ("V", &["s_0", "s_1"]),
        ("S", &["s_0", "s_1"]),
        ("Mx_0", &["b1_0", "b1_1", "s_0", "s_1", "r_0"]),
        ("Mx_1", &["b1_0", "b1_1", "s_0", "s_1", "r_1"]),
        ("t_0", &["b1_0", "b1_1", "s_1", "r_0"]),
        ("t_1", &["b1_0", "b1_1", "s_0", "r_1"]),
        ("My_0", &["b1_0", "b1_1", "s_0", "s_1", "d1", "U", "Z", "b1", "v_0"]),
        ("My_1", &["b1_0", "b1_1", "s_0", "s_1", "d1", "U", "Z", "b1", "v_1"]),
        ("Mz_0", &["b1_0", "b1_1", "s_0", "s_1", "d1", "U", "Z", "b1", "v_1"]),
    ],
};

/// Literal roles inside a clause `(x ∨ y ∨ z)`, `x` having the smallest
/// variable index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    X,
    Y,
    Z,
}

impl Role {
    pub const ALL: [Role; 3] = [Role::X, Role::Y, Role::Z];

    /// The two supports `(M^0, M^1)` carrying this literal's state.
    pub fn supports(self) -> [&'static str; 2] {
        match self {
            Role::X => ["Mx_0", "Mx_1"],
            Role::Y => ["My_0", "My_1"],
            Role::Z => ["Mz_0", "V"],
        }
    }
}

/// Every A-vertex of a clause block whose segment reaches back to a variable
/// gadget.
pub const SUPPORTS: [&str; 7] = ["Mx_0", "Mx_1", "L", "My_0", "My_1", "Mz_0", "V"];

/// State triplet of a clause representation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triplet(pub [bool; 3]);

impl Triplet {
    pub const TFF: Triplet = Triplet([true, false, false]);
    pub const FTF: Triplet = Triplet([false, true, false]);
    pub const FFT: Triplet = Triplet([false, false, true]);

    pub fn is_one_in_three(self) -> bool {
        self.0.iter().filter(|&&t| t).count() == 1
    }
}

impl std::fmt::Display for Triplet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for t in self.0 {
            f.write_str(if t { "T" } else { "F" })?;
        }
        Ok(())
    }
}

/// Ordered probe pairs `(first, second)`: literal `i` is true iff `first`
/// precedes `second`.
pub const PROBES: [(&str, &str); 3] = [("b1_1", "b1_0"), ("a1", "C"), ("V", "a1")];

/// State triplet read from positions of the probe vertices.
pub fn read_triplet(pos: &dyn Fn(&str) -> usize) -> Triplet {
    Triplet(PROBES.map(|(p, q)| pos(p) < pos(q)))
}

/// Supports of literal `i` in their recorded order: `M^1 ≺ M^0` iff true.
pub const SUPPORT_PROBES: [(&str, &str); 3] = [("Mx_1", "Mx_0"), ("My_1", "My_0"), ("V", "Mz_0")];

/// Clause-transmission block templates, numbered as the four clause cases.
/// Cases 1 and 3 realize TFF, case 2 FTF, case 4 FFT.
pub const CLAUSE_CASES: [(u8, Triplet, &str); 4] = [
    (
        1,
        Triplet::TFF,
        "U d1 s_1 b1_1 v_0 b1_0 s_0 C b1 D Z My_0 v_1 a1 My_1 Mz_0 d2 W V b2 a2 \
         f1 g1 R H g2 Q f2 e2 S P Y T L r_1 Mx_1 t_1 r_0 Mx_0 t_0",
    ),
    (
        2,
        Triplet::FTF,
        "Z b1 s_0 b1_0 D d1 b1_1 s_1 v_1 a1 U My_1 Mz_0 v_0 C My_0 d2 W V b2 a2 \
         f1 g1 R H g2 Q f2 e2 S P Y T L r_0 Mx_0 t_0 r_1 Mx_1 t_1",
    ),
    (
        3,
        Triplet::TFF,
        "U d1 s_1 b1_1 v_0 b1_0 s_0 C b1 D Z My_0 v_1 a1 My_1 Mz_0 b2 \
         f1 g1 R H g2 Q f2 e2 S P Y T d2 a2 W V L r_1 Mx_1 t_1 r_0 Mx_0 t_0",
    ),
    (
        4,
        Triplet::FFT,
        "Z b1 s_0 b1_0 D b1_1 s_1 b2 f1 g1 R H g2 Q f2 e2 S P Y T \
         d2 a2 V U d1 W v_0 C My_0 v_1 My_1 Mz_0 a1 L r_0 Mx_0 t_0 r_1 Mx_1 t_1",
    ),
];

/// Names of the transmission vertices, which [`CLAUSE_CASES`] interleave
/// with the clause gadget.
pub fn is_transmission(name: &str) -> bool {
    TRANSMISSION.a.contains(&name) || TRANSMISSION.b.contains(&name)
}

/// Sentinel standing for the variable gadgets placed before a clause block.
pub const SENTINEL: &str = "b0";

/// Options for [`clause_gadget`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClauseContext {
    pub transmission: bool,
    /// Connect the sentinel to every support, not only `L` and `V`.
    pub sentinel_on_supports: bool,
}

/// A single clause gadget (optionally with its transmission gadgets) plus
/// the sentinel, which is meant to be pinned to position 0.
pub fn clause_gadget(ctx: ClauseContext) -> GadgetBuilder {
    let mut b = GadgetBuilder::new();
    b.vertex(SENTINEL, Side::B);
    add_clause_block(&mut b, &|s| s.to_string(), ctx.transmission);
    b.edge(SENTINEL, "L");
    b.edge(SENTINEL, "V");
    if ctx.transmission && ctx.sentinel_on_supports {
        for s in SUPPORTS {
            b.edge(SENTINEL, s);
        }
    }
    b
}

/// Adds the handy gadget, the clause gadget and (optionally) the
/// transmission gadgets under the naming `name`.
pub fn add_clause_block(b: &mut GadgetBuilder, name: &dyn Fn(&str) -> String, transmission: bool) {
    b.add_table(&HANDY, &|s| name(clause_handy_name(s)));
    b.add_table(&CLAUSE, name);
    if transmission {
        b.add_table(&TRANSMISSION, name);
    }
}

/// Template of `case` restricted to the clause gadget when `transmission`
/// is false.
pub fn clause_template(case: u8, transmission: bool) -> Vec<&'static str> {
    let (_, _, t) = CLAUSE_CASES.iter().find(|c| c.0 == case).expect("case 1..=4");
    t.split_whitespace().filter(|s| transmission || !is_transmission(s)).collect()
}

/// Adjacency facts stated in prose for the clause and transmission gadgets,
/// as `(a, b, adjacent)`.
pub const CLAUSE_CHECKLIST: &[(&str, &str, bool)] = &[
    ("d2", "a2", true),
    ("d2", "a1", false),
    ("W", "d2", true),
    ("W", "b1", true),
    ("W", "b2", false),
    ("b1_1", "S", true),
    ("b1_1", "D", false),
    ("L", "U", false),
    ("L", "d2", false),
    ("L", "b2", false),
    ("b2", "H", true),
    ("b1", "H", false),
    ("C", "b1", false),
    ("C", "Z", false),
    ("C", "U", true),
    ("U", "a1", false),
    ("D", "Z", false),
    ("V", "d1", false),
    ("V", "d2", true),
    ("d2", "S", false),
    ("b1_1", "a2", false),
    ("a1", "b2", false),
    ("W", "U", true),
    ("a2", "b2", true),
    ("t_1", "s_1", false),
    ("t_1", "s_0", true),
    ("My_0", "Z", true),
    ("My_0", "b1", true),
    ("My_1", "U", true),
    ("Mz_0", "v_1", true),
    ("Mx_0", "r_0", true),
    ("Mx_0", "r_1", false),
];
