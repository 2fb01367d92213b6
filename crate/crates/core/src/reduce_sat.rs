//! Reduction from Monotone 1-in-3SAT to Stick graph recognition.
//!
//! The built graph places, from left to right: the first half of the order
//! gadget, the variable gadgets `x1..xn` separated by order segments, the
//! clause-transmission blocks `K1..Km` separated by order segments, and the
//! rest of the order gadget. Gadget-internal and wiring edges come from the
//! tables in [`crate::gadgets`]; the remaining cross-gadget edges are read off
//! one reference layout of that left-to-right order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::feasibility::{check_order, extremal_reaches, FeasibilityError, Model, VertexOrder};
use crate::gadgets::{
    add_clause_block, clause_template, read_triplet, GadgetBuilder, Role, Triplet, HANDY, SUPPORTS,
};
use crate::graph::{Graph, Side, VertexId};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OneInThreeInstance {
    pub n: usize,
    /// 1-based variable indices.
    pub clauses: Vec<[usize; 3]>,
    /// Display name per variable; fresh variables from normalization are
    /// named after the clause they replace.
    pub names: Vec<String>,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct InstanceParseError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReduceError {
    #[error("clause {0} is not normalized")]
    Unnormalized(usize),
    #[error("assignment has {got} values, instance has {want} variables")]
    AssignmentLength { got: usize, want: usize },
    #[error("clause {clause} has {trues} true literals")]
    NotOneInThree { clause: usize, trues: usize },
    #[error(transparent)]
    Feasibility(#[from] FeasibilityError),
    #[error("order is not a Stick representation of the artifact graph")]
    Infeasible,
    #[error("copies of variable {0} are not grouped by state")]
    CopyInconsistency(usize),
    #[error("clause {clause} realizes triplet {triplet}")]
    BadTriplet { clause: usize, triplet: String },
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("bad assignment token {0:?}")]
    BadToken(String),
    #[error("graph and registry do not describe a reduction: {0}")]
    NotAnArtifact(String),
}

impl OneInThreeInstance {
    pub fn new(n: usize, clauses: Vec<[usize; 3]>) -> Self {
        OneInThreeInstance {
            n,
            clauses,
            names: (1..=n).map(|i| format!("x{i}")).collect(),
        }
    }

    pub fn m(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_normalized(&self) -> bool {
        self.first_unnormalized().is_none()
    }

    fn first_unnormalized(&self) -> Option<usize> {
        self.clauses
            .iter()
            .position(|c| !(1 <= c[0] && c[0] < c[1] && c[1] < c[2] && c[2] <= self.n))
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("p m1in3 {} {}\n", self.n, self.m());
        for c in &self.clauses {
            s.push_str(&format!("{} {} {} 0\n", c[0], c[1], c[2]));
        }
        s
    }

    /// Checks that every clause has exactly one true literal.
    pub fn check_assignment(&self, asg: &Assignment) -> Result<(), ReduceError> {
        if asg.0.len() != self.n {
            return Err(ReduceError::AssignmentLength {
                got: asg.0.len(),
                want: self.n,
            });
        }
        for (i, c) in self.clauses.iter().enumerate() {
            let trues = c.iter().filter(|&&v| asg.0[v - 1]).count();
            if trues != 1 {
                return Err(ReduceError::NotOneInThree { clause: i + 1, trues });
            }
        }
        Ok(())
    }

    /// Every satisfying assignment, by exhaustive search.
    ///
    /// # Panics
    /// If `n > 20`.
    pub fn solutions(&self) -> Vec<Assignment> {
        assert!(self.n <= 20, "exhaustive search is limited to 20 variables");
        (0u32..1 << self.n)
            .map(|mask| Assignment((0..self.n).map(|i| mask >> i & 1 == 1).collect()))
            .filter(|a| self.check_assignment(a).is_ok())
            .collect()
    }
}

/// Truth value per variable, `true` for T.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Assignment(pub Vec<bool>);

impl Assignment {
    /// Whitespace-separated `T`/`F` tokens (also `1`/`0`).
    pub fn parse(text: &str) -> Result<Assignment, ReduceError> {
        text.split_whitespace()
            .map(|t| match t {
                "T" | "t" | "1" => Ok(true),
                "F" | "f" | "0" => Ok(false),
                _ => Err(ReduceError::BadToken(t.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Assignment)
    }

    /// Extends an assignment of the original variables to the fresh ones
    /// added by [`normalize_instance`]. Fresh values are forced where a
    /// satisfying extension exists, so the first solution found is returned.
    pub fn extend_to(&self, inst: &OneInThreeInstance) -> Option<Assignment> {
        let k = self.0.len();
        let extra = inst.n.checked_sub(k)?;
        if extra > 20 {
            return None;
        }
        (0u32..1 << extra)
            .map(|mask| {
                let mut v = self.0.clone();
                v.extend((0..extra).map(|i| mask >> i & 1 == 1));
                Assignment(v)
            })
            .find(|a| inst.check_assignment(a).is_ok())
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<&str> = self.0.iter().map(|&t| if t { "T" } else { "F" }).collect();
        f.write_str(&s.join(" "))
    }
}

/// Reads `c` comments, a `p m1in3 <n> <m>` header and `m` clause lines of
/// three positive indices terminated by `0`.
pub fn parse_1in3(text: &str) -> Result<OneInThreeInstance, InstanceParseError> {
    let err = |line: usize, message: String| InstanceParseError { line, message };
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('c') {
            continue;
        }
        let toks: Vec<&str> = t.split_whitespace().collect();
        if toks[0] == "p" {
            if header.is_some() {
                return Err(err(line, "second header".into()));
            }
            if toks.len() != 4 || toks[1] != "m1in3" {
                return Err(err(line, "expected `p m1in3 <n> <m>`".into()));
            }
            let n = toks[2].parse().map_err(|_| err(line, format!("bad variable count {:?}", toks[2])))?;
            let m = toks[3].parse().map_err(|_| err(line, format!("bad clause count {:?}", toks[3])))?;
            header = Some((n, m));
            continue;
        }
        let (n, _) = header.ok_or_else(|| err(line, "clause before header".into()))?;
        let nums = toks
            .iter()
            .map(|s| s.parse::<i64>().map_err(|_| err(line, format!("bad literal {s:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        if nums.last() != Some(&0) {
            return Err(err(line, "clause must end with 0".into()));
        }
        let lits = &nums[..nums.len() - 1];
        if lits.len() != 3 {
            return Err(err(line, format!("clause has {} literals, expected 3", lits.len())));
        }
        let mut c = [0usize; 3];
        for (j, &l) in lits.iter().enumerate() {
            if l <= 0 || l as usize > n {
                return Err(err(line, format!("variable index {l} out of range 1..={n}")));
            }
            c[j] = l as usize;
        }
        clauses.push(c);
    }
    let (n, m) = header.ok_or_else(|| err(0, "missing header".into()))?;
    if clauses.len() != m {
        return Err(err(0, format!("header announces {m} clauses, found {}", clauses.len())));
    }
    Ok(OneInThreeInstance::new(n, clauses))
}

/// Replaces clauses with repeated literals by equisatisfiable duplicate-free
/// ones and sorts every clause. `(x,x,y)` becomes `(x,y,u),(x,y,w),(y,u,w)`;
/// `(x,x,x)` becomes `(x,x,a),(x,x,b),(x,a,b)` and the two doubled clauses
/// are expanded in turn. Fresh variables are appended and shared by all
/// clauses generated from one input clause `c`: `a@c, b@c, u@c, w@c`.
pub fn normalize_instance(inst: &OneInThreeInstance) -> OneInThreeInstance {
    let mut out = OneInThreeInstance {
        n: inst.n,
        clauses: Vec::new(),
        names: inst.names.clone(),
    };
    let fresh = |out: &mut OneInThreeInstance, name: String| {
        out.n += 1;
        out.names.push(name);
        out.n
    };
    for (ci, c) in inst.clauses.iter().enumerate() {
        let tag = ci + 1;
        let mut s = *c;
        s.sort_unstable();
        let (p, q, r) = (s[0], s[1], s[2]);
        if p != q && q != r {
            out.clauses.push(s);
            continue;
        }
        let mut doubled: Vec<(usize, usize)> = Vec::new();
        if p == q && q == r {
            let a = fresh(&mut out, format!("a@{tag}"));
            let b = fresh(&mut out, format!("b@{tag}"));
            doubled.push((p, a));
            doubled.push((p, b));
            // (x, x, a), (x, x, b) are expanded below; (x, a, b) stays
            let mut last = [p, a, b];
            last.sort_unstable();
            let u = fresh(&mut out, format!("u@{tag}"));
            let w = fresh(&mut out, format!("w@{tag}"));
            for &(x, y) in &doubled {
                push_expansion(&mut out.clauses, x, y, u, w);
            }
            out.clauses.push(last);
            continue;
        }
        let (x, y) = if p == q { (p, r) } else { (q, p) };
        let u = fresh(&mut out, format!("u@{tag}"));
        let w = fresh(&mut out, format!("w@{tag}"));
        push_expansion(&mut out.clauses, x, y, u, w);
    }
    out
}

fn push_expansion(clauses: &mut Vec<[usize; 3]>, x: usize, y: usize, u: usize, w: usize) {
    for mut c in [[x, y, u], [x, y, w], [y, u, w]] {
        c.sort_unstable();
        clauses.push(c);
    }
}

/// Which gadget a vertex belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Owner {
    /// Order gadget and order segments.
    Order,
    /// Variable gadget, 1-based.
    Variable(usize),
    /// Clause-transmission block, 1-based.
    Clause(usize),
}

/// Sizes of a built reduction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionCounts {
    pub n: usize,
    pub m: usize,
    /// Forced-cycle parameter `n + m + 3`.
    pub k: usize,
    pub vertices: usize,
    /// Closed form `13 + 7n + 47m`.
    pub vertices_formula: usize,
    pub edges: usize,
    pub explicit_edges: usize,
    pub incidental_edges: usize,
    /// `|A|·|B|`, an upper bound on `edges`.
    pub edge_bound: usize,
}

#[derive(Clone, Debug)]
pub struct ReductionArtifact {
    pub instance: OneInThreeInstance,
    pub graph: Graph,
    pub registry: BTreeMap<String, VertexId>,
    /// Extra names for registered vertices (`K{p}.Mz_1` is `K{p}.V`).
    pub aliases: BTreeMap<String, String>,
    pub owner: Vec<Owner>,
    pub counts: ReductionCounts,
}

/// Number of vertices of the reduction graph.
pub fn vertex_count_formula(n: usize, m: usize) -> usize {
    13 + 7 * n + 47 * m
}

fn var_name(t: usize, s: &str) -> String {
    format!("x{t}.{s}")
}

fn copy_name(t: usize, state: u8, p: usize) -> String {
    format!("x{t}.u_{state}@K{p}")
}

fn clause_name(p: usize, s: &str) -> String {
    format!("K{p}.{s}")
}

fn order_name(s: &str) -> String {
    format!("O.{s}")
}

fn h_name(d: usize) -> String {
    format!("h{d}")
}

impl ReductionArtifact {
    pub fn id(&self, name: &str) -> Result<VertexId, ReduceError> {
        let key = self.aliases.get(name).map(String::as_str).unwrap_or(name);
        self.registry.get(key).copied().ok_or_else(|| ReduceError::UnknownVertex(name.to_string()))
    }

    pub fn k(&self) -> usize {
        self.counts.k
    }

    /// Clauses containing each variable (1-based indices), in clause order.
    pub fn occurrences(&self) -> Vec<Vec<usize>> {
        occurrences(&self.instance)
    }

    /// Registry as JSON (name → id), the sidecar format.
    pub fn registry_json(&self) -> String {
        serde_json::to_string_pretty(&self.registry).expect("string map serializes")
    }

    /// Standard order with the given per-variable values and per-clause
    /// case templates (1..=4). It is feasible exactly when every clause's
    /// case triplet matches the values of its literals.
    pub fn standard_order(&self, values: &[bool], cases: &[u8]) -> VertexOrder {
        let names = standard_names(&self.instance, values, cases);
        let seq = names.iter().map(|s| self.registry[s]).collect();
        VertexOrder::from_sequence(seq).expect("standard order is a permutation")
    }
}

fn occurrences(inst: &OneInThreeInstance) -> Vec<Vec<usize>> {
    let mut occ = vec![Vec::new(); inst.n + 1];
    for (j, c) in inst.clauses.iter().enumerate() {
        for &v in c {
            occ[v].push(j + 1);
        }
    }
    occ
}

fn standard_names(inst: &OneInThreeInstance, values: &[bool], cases: &[u8]) -> Vec<String> {
    let (n, m) = (inst.n, inst.m());
    let occ = occurrences(inst);
    let mut out: Vec<String> = ["f1", "g1", "R", "e1"].iter().map(|s| order_name(s)).collect();
    for t in 1..=n {
        out.push(var_name(t, "v"));
        out.push(var_name(t, "w"));
        let first = if values[t - 1] { 1 } else { 0 };
        for s in [first, 1 - first] {
            out.push(var_name(t, &format!("u_{s}")));
            for &p in &occ[t] {
                out.push(copy_name(t, s, p));
            }
            out.push(var_name(t, &format!("n_{s}")));
        }
        out.push(h_name(t + 1));
    }
    for p in 1..=m {
        for s in clause_template(cases[p - 1], true) {
            out.push(clause_name(p, s));
        }
        out.push(h_name(n + 1 + p));
    }
    out.push(order_name("g2"));
    out.push(h_name(n + m + 2));
    out.extend(["Q", "f2", "e2", "N", "P", "Y", "T"].iter().map(|s| order_name(s)));
    out
}

/// Builds the reduction graph of a normalized instance.
pub fn build_reduction(inst: &OneInThreeInstance) -> Result<ReductionArtifact, ReduceError> {
    if let Some(c) = inst.first_unnormalized() {
        return Err(ReduceError::Unnormalized(c + 1));
    }
    let (n, m) = (inst.n, inst.m());
    let k = n + m + 3;
    let occ = occurrences(inst);
    let mut b = GadgetBuilder::new();
    let mut owner: Vec<Owner> = Vec::new();
    let mut tag = |b: &GadgetBuilder, o: Owner| owner.resize(b.graph().len(), o);

    b.add_table(&HANDY, &|s| order_name(s));
    for d in 2..k {
        b.vertex(&h_name(d), Side::A);
    }
    tag(&b, Owner::Order);
    for t in 1..=n {
        for s in ["v", "w", "u_0", "u_1"] {
            b.vertex(&var_name(t, s), Side::B);
        }
        for &p in &occ[t] {
            b.vertex(&copy_name(t, 0, p), Side::B);
            b.vertex(&copy_name(t, 1, p), Side::B);
        }
        b.vertex(&var_name(t, "n_0"), Side::A);
        b.vertex(&var_name(t, "n_1"), Side::A);
        tag(&b, Owner::Variable(t));
    }
    for p in 1..=m {
        add_clause_block(&mut b, &|s| clause_name(p, s), true);
        tag(&b, Owner::Clause(p));
    }

    // forced cycle: p_1 = f1, p_{t+1} = v of x_t, p_{n+1+j} = b1_0 of K_j,
    // p_{k-1} = g2, p_k = f2; h_d meets p_{d-1} and p_d
    let p_name = |i: usize| -> String {
        match i {
            1 => order_name("f1"),
            _ if i <= n + 1 => var_name(i - 1, "v"),
            _ if i <= n + m + 1 => clause_name(i - n - 1, "b1_0"),
            _ if i == k - 1 => order_name("g2"),
            _ => order_name("f2"),
        }
    };
    for d in 2..k {
        b.edge(&h_name(d), &p_name(d - 1));
        b.edge(&h_name(d), &p_name(d));
    }
    b.edge(&h_name(2), &order_name("R"));
    b.edge(&h_name(2), &order_name("g1"));

    for t in 1..=n {
        let (h1, h2) = (h_name(t + 1), h_name(t + 2));
        for a in [h1.as_str(), h2.as_str(), "O.Q"] {
            b.edge(&var_name(t, "w"), a);
        }
        b.edge(&var_name(t, "v"), &h1);
        for s in 0..2u8 {
            let ns = var_name(t, &format!("n_{s}"));
            let orig = var_name(t, &format!("u_{s}"));
            b.edge(&orig, &ns);
            b.edge(&orig, &h1);
            if t < n {
                b.edge(&orig, &h2);
            }
            for &p in &occ[t] {
                let c = copy_name(t, s, p);
                b.edge(&c, &ns);
                b.edge(&c, &h1);
                if t < n || p > 1 {
                    b.edge(&c, &h2);
                }
            }
        }
    }

    for p in 1..=m {
        let clause = inst.clauses[p - 1];
        b.edge(&clause_name(p, "b1_1"), &h_name(n + 1 + p));
        b.edge(&clause_name(p, "b1_1"), &h_name(n + 2 + p));
        if p > 1 {
            for bo in ["b1_0", "b1_1"] {
                for s in SUPPORTS {
                    b.edge(&clause_name(p - 1, bo), &clause_name(p, s));
                }
            }
        }
        for (role, &u) in Role::ALL.iter().zip(clause.iter()) {
            let [m0, m1] = role.supports().map(|s| clause_name(p, s));
            for &q in occ[u].iter().filter(|&&q| q >= p) {
                b.edge(&m0, &copy_name(u, 1, q));
                b.edge(&m1, &copy_name(u, 0, q));
                if q > p {
                    b.edge(&m0, &copy_name(u, 0, q));
                    b.edge(&m1, &copy_name(u, 1, q));
                }
                if *role == Role::X {
                    b.edge(&clause_name(p, "L"), &copy_name(u, 0, q));
                    b.edge(&clause_name(p, "L"), &copy_name(u, 1, q));
                }
            }
        }
        let z = clause[2];
        for s in 0..2u8 {
            for my in ["My_0", "My_1"] {
                b.edge(&copy_name(z, s, p), &clause_name(p, my));
            }
        }
    }

    let explicit_edges = b.graph().edge_count();
    let (mut graph, registry) = b.finish();

    // variable whose copies a support of clause p reads; None for non-supports
    let support_var = |name: &str, p: usize| -> Option<usize> {
        let local = name.split_once('.')?.1;
        let c = inst.clauses[p - 1];
        match local {
            "Mx_0" | "Mx_1" | "L" => Some(c[0]),
            "My_0" | "My_1" => Some(c[1]),
            "Mz_0" | "V" => Some(c[2]),
            _ => None,
        }
    };
    let governed = |a: VertexId, bv: VertexId| -> bool {
        match (owner[a], owner[bv]) {
            (Owner::Clause(p), Owner::Variable(t)) => support_var(graph.name(a).unwrap_or(""), p) == Some(t),
            _ => false,
        }
    };

    let reference = standard_names(inst, &vec![false; n], &vec![1; m]);
    let seq: Vec<VertexId> = reference.iter().map(|s| registry[s]).collect();
    let order = VertexOrder::from_sequence(seq).expect("reference layout is a permutation");
    let reach = extremal_reaches(&graph, &order, Model::Stick)?;
    let mut incidental = Vec::new();
    for (i, &bv) in order.sequence().iter().enumerate() {
        if graph.side(bv) != Some(Side::B) {
            continue;
        }
        let Some(rho) = reach.forward[bv] else { continue };
        for &a in &order.sequence()[i + 1..=rho] {
            if graph.side(a) != Some(Side::A) || owner[a] == owner[bv] || graph.adjacent(a, bv) || governed(a, bv) {
                continue;
            }
            if reach.back[a].is_some_and(|l| l <= i) {
                incidental.push((bv, a));
            }
        }
    }
    for &(u, v) in &incidental {
        graph.add_edge(u, v).expect("incidental pair joins opposite sides");
    }

    let aliases = (1..=m).map(|p| (clause_name(p, "Mz_1"), clause_name(p, "V"))).collect();
    let a_count = graph.sides().unwrap().iter().filter(|&&s| s == Side::A).count();
    let counts = ReductionCounts {
        n,
        m,
        k,
        vertices: graph.len(),
        vertices_formula: vertex_count_formula(n, m),
        edges: graph.edge_count(),
        explicit_edges,
        incidental_edges: incidental.len(),
        edge_bound: a_count * (graph.len() - a_count),
    };
    Ok(ReductionArtifact {
        instance: inst.clone(),
        graph,
        registry,
        aliases,
        owner,
        counts,
    })
}

/// Recovers the artifact from its graph and registry sidecar. The instance
/// is read off the registry names and the support edges, then rebuilt and
/// compared with the given graph.
pub fn artifact_from_parts(graph: &Graph, registry: &BTreeMap<String, VertexId>) -> Result<ReductionArtifact, ReduceError> {
    let bad = |m: &str| ReduceError::NotAnArtifact(m.to_string());
    let n = (1..).take_while(|&t| registry.contains_key(&var_name(t, "v"))).count();
    let m = (1..).take_while(|&p| registry.contains_key(&clause_name(p, "b1"))).count();
    let id = |name: &str| registry.get(name).copied();
    let adjacent = |x: &str, y: &str| matches!((id(x), id(y)), (Some(u), Some(v)) if graph.adjacent(u, v));
    let mut clauses = Vec::with_capacity(m);
    for p in 1..=m {
        let vars: Vec<usize> = (1..=n).filter(|&t| registry.contains_key(&copy_name(t, 0, p))).collect();
        if vars.len() != 3 {
            return Err(bad(&format!("clause {p} does not have three variables")));
        }
        let sig = |x: usize, y: usize, z: usize| {
            let k = |s: &str| clause_name(p, s);
            let c = |t: usize, st: u8| copy_name(t, st, p);
            adjacent(&k("L"), &c(x, 0))
                && adjacent(&k("L"), &c(x, 1))
                && adjacent(&k("Mx_0"), &c(x, 1))
                && adjacent(&k("Mx_1"), &c(x, 0))
                && adjacent(&k("My_0"), &c(y, 1))
                && adjacent(&k("My_1"), &c(y, 0))
                && adjacent(&k("Mz_0"), &c(z, 1))
                && adjacent(&k("V"), &c(z, 0))
                && [0, 1].iter().all(|&st| adjacent(&k("My_0"), &c(z, st)) && adjacent(&k("My_1"), &c(z, st)))
        };
        let fits: Vec<[usize; 3]> = vars
            .iter()
            .copied()
            .permutations(3)
            .map(|v| [v[0], v[1], v[2]])
            .filter(|c| sig(c[0], c[1], c[2]))
            .collect();
        match fits.as_slice() {
            [c] => clauses.push(*c),
            [] => return Err(bad(&format!("clause {p} has no consistent literal order"))),
            _ => return Err(bad(&format!("clause {p} has an ambiguous literal order"))),
        }
    }
    let art = build_reduction(&OneInThreeInstance::new(n, clauses))?;
    let same_edges = {
        let norm = |g: &Graph| g.edges().iter().map(|&(u, v)| (u.min(v), u.max(v))).collect::<BTreeSet<_>>();
        norm(&art.graph) == norm(graph)
    };
    if art.registry != *registry || art.graph.len() != graph.len() || !same_edges {
        return Err(bad("rebuilt reduction differs from the input"));
    }
    Ok(art)
}

/// Case template used for a clause with triplet `t`; `alt_tff` picks the
/// second TFF case.
pub fn case_for(t: Triplet, alt_tff: bool) -> Option<u8> {
    match t {
        Triplet::TFF => Some(if alt_tff { 3 } else { 1 }),
        Triplet::FTF => Some(2),
        Triplet::FFT => Some(4),
        _ => None,
    }
}

/// Standard representation realizing a satisfying assignment. Clauses with
/// triplet TFF use case 1.
pub fn witness_order(art: &ReductionArtifact, asg: &Assignment) -> Result<VertexOrder, ReduceError> {
    witness_order_with(art, asg, false)
}

/// As [`witness_order`], with TFF clauses drawn as case 3 when `alt_tff`.
pub fn witness_order_with(art: &ReductionArtifact, asg: &Assignment, alt_tff: bool) -> Result<VertexOrder, ReduceError> {
    art.instance.check_assignment(asg)?;
    let cases: Vec<u8> = art
        .instance
        .clauses
        .iter()
        .map(|c| case_for(Triplet(c.map(|v| asg.0[v - 1])), alt_tff).expect("checked one-in-three"))
        .collect();
    Ok(art.standard_order(&asg.0, &cases))
}

/// Reads the assignment recorded by a Stick representation: `x_t` is true
/// iff `u_1` precedes `u_0`. Also checks that each variable's copies are
/// grouped by state and that each clause realizes a one-in-three triplet
/// matching the decoded values.
pub fn decode_assignment(art: &ReductionArtifact, order: &VertexOrder) -> Result<Assignment, ReduceError> {
    if !check_order(&art.graph, order, Model::Stick)?.feasible {
        return Err(ReduceError::Infeasible);
    }
    let pos = |name: &str| -> Result<usize, ReduceError> { Ok(order.pos(art.id(name)?)) };
    let occ = art.occurrences();
    let mut values = Vec::with_capacity(art.instance.n);
    for t in 1..=art.instance.n {
        let mut groups = [Vec::new(), Vec::new()];
        for s in 0..2u8 {
            groups[s as usize].push(pos(&var_name(t, &format!("u_{s}")))?);
            for &p in &occ[t] {
                groups[s as usize].push(pos(&copy_name(t, s, p))?);
            }
        }
        let (lo0, hi0) = (*groups[0].iter().min().unwrap(), *groups[0].iter().max().unwrap());
        let (lo1, hi1) = (*groups[1].iter().min().unwrap(), *groups[1].iter().max().unwrap());
        if !(hi0 < lo1 || hi1 < lo0) {
            return Err(ReduceError::CopyInconsistency(t));
        }
        values.push(hi1 < lo0);
    }
    for (j, c) in art.instance.clauses.iter().enumerate() {
        let p = j + 1;
        let pos_in = |s: &str| order.pos(art.registry[&clause_name(p, s)]);
        let t = read_triplet(&pos_in);
        if !t.is_one_in_three() || t.0 != c.map(|v| values[v - 1]) {
            return Err(ReduceError::BadTriplet {
                clause: p,
                triplet: t.to_string(),
            });
        }
    }
    Ok(Assignment(values))
}

/// Names every vertex of the artifact must carry, per the gadget inventory.
pub fn expected_names(inst: &OneInThreeInstance) -> BTreeSet<String> {
    let (n, m) = (inst.n, inst.m());
    let k = n + m + 3;
    let mut out = BTreeSet::new();
    for s in HANDY.a.iter().chain(HANDY.b) {
        out.insert(order_name(s));
    }
    for d in 2..k {
        out.insert(h_name(d));
    }
    let occ = occurrences(inst);
    for t in 1..=n {
        for s in ["v", "w", "u_0", "u_1", "n_0", "n_1"] {
            out.insert(var_name(t, s));
        }
        for &p in &occ[t] {
            out.insert(copy_name(t, 0, p));
            out.insert(copy_name(t, 1, p));
        }
    }
    let clause_local = [
        "b1", "b2", "b1_0", "b1_1", "a1", "a2", "C", "D", "U", "W", "Z", "d1", "d2", "L", "V", "H", "S", "T", "Q", "P",
        "Y", "e2", "f1", "f2", "g1", "g2", "R", "Mx_0", "Mx_1", "My_0", "My_1", "Mz_0", "s_0", "s_1", "t_0", "t_1",
        "r_0", "r_1", "v_0", "v_1",
    ];
    for p in 1..=m {
        for s in clause_local {
            out.insert(clause_name(p, s));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadgets::CLAUSE_CHECKLIST;

    fn one_clause() -> OneInThreeInstance {
        parse_1in3("p m1in3 3 1\n1 2 3 0\n").unwrap()
    }

    #[test]
    fn parse_examples() {
        let i = one_clause();
        assert_eq!(i.n, 3);
        assert_eq!(i.clauses, vec![[1, 2, 3]]);
        let d = parse_1in3("c dup\np m1in3 5 1\n2 2 5 0\n").unwrap();
        assert_eq!(d.clauses, vec![[2, 2, 5]]);
        assert!(parse_1in3("p m1in3 3 1\n1 2 0\n").unwrap_err().message.contains("literals"));
        assert!(parse_1in3("p m1in3 3 1\n1 2 4 0\n").is_err());
        assert!(parse_1in3("p m1in3 3 1\n0 1 2 0\n").is_err());
        assert!(parse_1in3("p m1in3 3 1\n-1 1 2 0\n").is_err());
    }

    #[test]
    fn normalize_doubled() {
        let i = OneInThreeInstance::new(2, vec![[1, 1, 2]]);
        let nrm = normalize_instance(&i);
        assert_eq!(nrm.n, 4);
        assert_eq!(nrm.clauses, vec![[1, 2, 3], [1, 2, 4], [2, 3, 4]]);
        assert!(nrm.is_normalized());
        assert_eq!(nrm.names[2], "u@1");
        let sols = nrm.solutions();
        assert_eq!(sols, vec![Assignment(vec![false, true, false, false])]);
    }

    #[test]
    fn normalize_tripled() {
        let i = OneInThreeInstance::new(1, vec![[1, 1, 1]]);
        let nrm = normalize_instance(&i);
        assert_eq!(nrm.m(), 7);
        assert_eq!(nrm.n, 5);
        assert!(nrm.is_normalized());
        assert!(nrm.solutions().is_empty());
    }

    #[test]
    fn normalize_fixed_point() {
        let i = OneInThreeInstance::new(4, vec![[3, 1, 2], [2, 3, 4]]);
        let nrm = normalize_instance(&i);
        assert_eq!(nrm.clauses, vec![[1, 2, 3], [2, 3, 4]]);
        assert_eq!(normalize_instance(&nrm), nrm);
    }

    #[test]
    fn one_clause_inventory() {
        let art = build_reduction(&one_clause()).unwrap();
        assert_eq!(art.k(), 7);
        let names: BTreeSet<String> = art.registry.keys().cloned().collect();
        assert_eq!(names, expected_names(&art.instance));
        for d in 2..=6 {
            assert!(art.registry.contains_key(&h_name(d)));
        }
        assert!(!art.registry.contains_key("h7"));
        assert_eq!(art.counts.vertices, art.counts.vertices_formula);
        assert_eq!(art.id("K1.Mz_1").unwrap(), art.id("K1.V").unwrap());
        let ids: BTreeSet<VertexId> = art.registry.values().copied().collect();
        assert_eq!(ids.len(), art.graph.len());
    }

    #[test]
    fn checklist_on_artifact() {
        let art = build_reduction(&one_clause()).unwrap();
        for &(x, y, adj) in CLAUSE_CHECKLIST {
            let (u, v) = (art.id(&format!("K1.{x}")).unwrap(), art.id(&format!("K1.{y}")).unwrap());
            assert_eq!(art.graph.adjacent(u, v), adj, "{x}-{y}");
        }
    }

    #[test]
    fn rejects_unnormalized() {
        let i = OneInThreeInstance::new(3, vec![[1, 1, 2]]);
        assert_eq!(build_reduction(&i).unwrap_err(), ReduceError::Unnormalized(1));
    }

    #[test]
    fn deterministic() {
        let a = build_reduction(&one_clause()).unwrap();
        let b = build_reduction(&one_clause()).unwrap();
        assert_eq!(a.graph.to_text(), b.graph.to_text());
    }

    #[test]
    fn witness_round_trip_one_clause() {
        let inst = one_clause();
        let art = build_reduction(&inst).unwrap();
        let sols = inst.solutions();
        assert_eq!(sols.len(), 3);
        for asg in sols {
            for alt in [false, true] {
                let o = witness_order_with(&art, &asg, alt).unwrap();
                let rep = check_order(&art.graph, &o, Model::Stick).unwrap();
                assert!(rep.feasible, "{asg}: {:?}", &rep.violations[..rep.violations.len().min(5)]);
                assert_eq!(decode_assignment(&art, &o).unwrap(), asg);
            }
        }
    }

    #[test]
    fn layout_feasible_iff_cases_match_values() {
        use crate::gadgets::CLAUSE_CASES;
        let art = build_reduction(&one_clause()).unwrap();
        for mask in 0..8u8 {
            let values: Vec<bool> = (0..3).map(|i| mask >> i & 1 == 1).collect();
            for (case, triplet, _) in CLAUSE_CASES {
                let o = art.standard_order(&values, &[case]);
                let feasible = check_order(&art.graph, &o, Model::Stick).unwrap().feasible;
                assert_eq!(feasible, triplet.0[..] == values[..], "case {case} values {values:?}");
            }
        }
    }

    #[test]
    fn all_false_rejected() {
        let art = build_reduction(&one_clause()).unwrap();
        let err = witness_order(&art, &Assignment(vec![false; 3])).unwrap_err();
        assert_eq!(err, ReduceError::NotOneInThree { clause: 1, trues: 0 });
    }

    #[test]
    fn all_true_order_decodes_all_true() {
        let inst = OneInThreeInstance::new(3, vec![]);
        let art = build_reduction(&inst).unwrap();
        let o = art.standard_order(&[true; 3], &[]);
        assert_eq!(decode_assignment(&art, &o).unwrap(), Assignment(vec![true; 3]));
    }

    #[test]
    fn handy_sub_template_b_order() {
        let inst = one_clause();
        let art = build_reduction(&inst).unwrap();
        let o = witness_order(&art, &Assignment(vec![true, false, false])).unwrap();
        for prefix in ["O.", "K1."] {
            let want: Vec<VertexId> = ["f1", "g1", "g2", "f2"].iter().map(|s| art.registry[&format!("{prefix}{s}")]).collect();
            let got: Vec<VertexId> = o.sequence().iter().copied().filter(|v| want.contains(v)).collect();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn infeasible_order_rejected_by_decode() {
        let art = build_reduction(&one_clause()).unwrap();
        let o = witness_order(&art, &Assignment(vec![true, false, false])).unwrap();
        assert_eq!(decode_assignment(&art, &o.reversed()).unwrap_err(), ReduceError::Infeasible);
    }

    #[test]
    fn artifact_survives_text_round_trip() {
        let inst = OneInThreeInstance::new(5, vec![[1, 2, 3], [3, 4, 5]]);
        let art = build_reduction(&inst).unwrap();
        let graph = Graph::parse(&art.graph.to_text()).unwrap();
        let registry: BTreeMap<String, VertexId> = serde_json::from_str(&art.registry_json()).unwrap();
        let back = artifact_from_parts(&graph, &registry).unwrap();
        assert_eq!(back.instance.clauses, inst.clauses);
        let asg = Assignment(vec![false, false, true, false, false]);
        let order = witness_order(&art, &asg).unwrap();
        assert_eq!(decode_assignment(&back, &order).unwrap(), asg);
    }

    #[test]
    fn foreign_graph_is_not_an_artifact() {
        let art = build_reduction(&one_clause()).unwrap();
        let mut graph = art.graph.clone();
        let (u, v) = graph.edges()[0];
        graph.remove_edge(u, v);
        assert!(matches!(artifact_from_parts(&graph, &art.registry), Err(ReduceError::NotAnArtifact(_))));
    }
}
