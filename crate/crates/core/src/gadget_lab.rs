//! Exhaustive checks of gadget-level claims: every feasible order of a small
//! gadget is enumerated and tested against the claimed property.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::feasibility::{check_order, Model, VertexOrder};
use crate::gadgets::{
    clause_gadget, clause_template, forced_cycle, forced_p, read_triplet, ClauseContext, GadgetBuilder, Triplet,
    CLAUSE, CLAUSE_CASES, HANDY, PROBES, SENTINEL, SUPPORT_PROBES,
};
use crate::graph::{families, Graph, VertexId};
use crate::recognizer::{recognize, search_fold, GraphClass, RecognizeError, SearchOptions, Verdict};
use crate::reduce_biphook::{classify_positions, BlockType, FourCycleType};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Verified,
    Refuted,
    Exhausted,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Verified => "verified",
            Status::Refuted => "refuted",
            Status::Exhausted => "exhausted",
        })
    }
}

/// Outcome of one check. `offending` holds at most [`MAX_OFFENDING`] orders
/// (as name lists) out of `offending_count`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropositionReport {
    pub id: String,
    pub status: Status,
    pub complete: bool,
    pub full_count: u64,
    pub nodes: u64,
    pub elapsed_ms: u64,
    pub evidence: BTreeMap<String, String>,
    pub offending_count: u64,
    pub offending: Vec<String>,
    pub notes: Vec<String>,
}

pub const MAX_OFFENDING: usize = 8;

impl PropositionReport {
    pub fn verified(&self) -> bool {
        self.status == Status::Verified
    }
}

impl fmt::Display for PropositionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{}: {} ({} orders, {}complete, {} nodes, {} ms)",
            self.id,
            self.status,
            self.full_count,
            if self.complete { "" } else { "in" },
            self.nodes,
            self.elapsed_ms
        )?;
        for (k, v) in &self.evidence {
            writeln!(f, "  {k}: {v}")?;
        }
        if self.offending_count > 0 {
            writeln!(f, "  offending orders: {}", self.offending_count)?;
            for o in &self.offending {
                writeln!(f, "    {o}")?;
            }
        }
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        Ok(())
    }
}

/// Budget and parallelism shared by all checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabOptions {
    pub budget: Option<u64>,
    pub workers: usize,
}

/// Far above the largest check (the transmission enumeration visits about
/// 4.5 million nodes).
pub const DEFAULT_BUDGET: u64 = 200_000_000;

impl Default for LabOptions {
    fn default() -> Self {
        LabOptions {
            budget: Some(DEFAULT_BUDGET),
            workers: 1,
        }
    }
}

impl LabOptions {
    fn search(&self, prefix: Vec<VertexId>) -> SearchOptions {
        SearchOptions {
            budget: self.budget,
            workers: self.workers.max(1),
            prefix,
            ..Default::default()
        }
    }
}

fn names(g: &Graph, seq: &[VertexId]) -> String {
    seq.iter().map(|&v| g.label(v)).collect::<Vec<_>>().join(" ")
}

fn positions(seq: &[VertexId]) -> Vec<usize> {
    let mut pos = vec![0; seq.len()];
    for (i, &v) in seq.iter().enumerate() {
        pos[v] = i;
    }
    pos
}

/// Per-task accumulator of the generic walk.
struct Tally<T> {
    count: u64,
    data: T,
    bad: u64,
    examples: Vec<Vec<VertexId>>,
}

/// Visits every feasible order of `g`; `inspect` folds an order into the
/// data and tells whether it violates the claim. With `stop_on_bad` the
/// walk ends at the first violation.
#[allow(clippy::too_many_arguments)]
fn walk<T, F>(
    id: &str,
    g: &Graph,
    class: GraphClass,
    opts: &SearchOptions,
    stop_on_bad: bool,
    data: impl Fn() -> T + Sync,
    inspect: F,
    merge: impl Fn(&mut T, T),
) -> Result<(PropositionReport, T), RecognizeError>
where
    T: Send,
    F: Fn(&mut T, &[VertexId], &[usize]) -> bool + Sync,
{
    let (tally, complete, stats) = search_fold(
        g,
        class,
        opts,
        || Tally {
            count: 0,
            data: data(),
            bad: 0,
            examples: Vec::new(),
        },
        |t, seq| {
            t.count += 1;
            let pos = positions(seq);
            if inspect(&mut t.data, seq, &pos) {
                t.bad += 1;
                if t.examples.len() < MAX_OFFENDING {
                    t.examples.push(seq.to_vec());
                }
                return !stop_on_bad;
            }
            true
        },
        |mut a, b| {
            a.count += b.count;
            a.bad += b.bad;
            a.examples.extend(b.examples);
            merge(&mut a.data, b.data);
            a
        },
    )?;
    let mut examples = tally.examples;
    examples.sort();
    examples.truncate(MAX_OFFENDING);
    let status = if tally.bad > 0 {
        Status::Refuted
    } else if complete {
        Status::Verified
    } else {
        Status::Exhausted
    };
    let report = PropositionReport {
        id: id.to_string(),
        status,
        complete,
        full_count: tally.count,
        nodes: stats.nodes,
        elapsed_ms: stats.elapsed.as_millis() as u64,
        evidence: BTreeMap::new(),
        offending_count: tally.bad,
        offending: examples.iter().map(|s| names(g, s)).collect(),
        notes: Vec::new(),
    };
    Ok((report, tally.data))
}

/// Downgrades a verified report to refuted with a reason.
fn refute(report: &mut PropositionReport, reason: String) {
    if report.status == Status::Verified {
        report.status = Status::Refuted;
    }
    report.notes.push(reason);
}

/// The handy gadget alone.
pub fn handy_gadget() -> GadgetBuilder {
    let mut b = GadgetBuilder::new();
    b.add_table(&HANDY, &|s| s.to_string());
    b
}

/// Every order of the handy gadget has `f1 ≺ f2`, and dropping `P` and `Y`
/// leaves a single order. `P` and `Y` may only float: `P` over 2 slots and
/// `Y` over at most 3.
pub fn check_handy(opts: &LabOptions) -> Result<PropositionReport, RecognizeError> {
    let b = handy_gadget();
    let g = b.graph();
    let (f1, f2, p, y) = (b.id("f1"), b.id("f2"), b.id("P"), b.id("Y"));
    type Data = (BTreeSet<Vec<VertexId>>, BTreeSet<usize>, BTreeSet<usize>);
    let (mut report, (classes, p_slots, y_slots)) = walk(
        "handy",
        g,
        GraphClass::Stick,
        &opts.search(Vec::new()),
        false,
        Data::default,
        |(classes, ps, ys), seq, pos| {
            classes.insert(seq.iter().copied().filter(|&v| v != p && v != y).collect());
            ps.insert(seq.iter().filter(|&&v| v != y).position(|&v| v == p).unwrap());
            ys.insert(seq.iter().filter(|&&v| v != p).position(|&v| v == y).unwrap());
            pos[f2] < pos[f1]
        },
        |a, b| {
            a.0.extend(b.0);
            a.1.extend(b.1);
            a.2.extend(b.2);
        },
    )?;
    report.evidence.insert("projected classes".into(), classes.len().to_string());
    report.evidence.insert("P slots".into(), format!("{p_slots:?}"));
    report.evidence.insert("Y slots".into(), format!("{y_slots:?}"));
    if let Some(c) = classes.iter().next() {
        report.evidence.insert("projected order".into(), names(g, c));
    }
    if report.complete {
        if classes.len() != 1 {
            refute(&mut report, format!("{} orders remain without P and Y", classes.len()));
        }
        if p_slots.len() > 2 || y_slots.len() > 3 {
            refute(&mut report, "P or Y moves over too many slots".into());
        }
    }
    Ok(report)
}

fn forced_report(id: &str, b: &GadgetBuilder, k: usize, opts: &LabOptions) -> Result<PropositionReport, RecognizeError> {
    let g = b.graph();
    let ps: Vec<VertexId> = (1..=k).map(|i| b.id(&forced_p(i, k))).collect();
    let (mut report, _) = walk(
        id,
        g,
        GraphClass::Stick,
        &opts.search(Vec::new()),
        false,
        || (),
        |_, _, pos| ps.windows(2).any(|w| pos[w[0]] > pos[w[1]]),
        |_, _| {},
    )?;
    report.evidence.insert("vertices".into(), g.len().to_string());
    report.evidence.insert("edges".into(), g.edge_count().to_string());
    Ok(report)
}

/// Every order of the forced cycle on `k` underlying B-vertices places
/// `p_1, ..., p_k` left to right.
pub fn check_forced_cycle(k: usize, opts: &LabOptions) -> Result<PropositionReport, RecognizeError> {
    let b = forced_cycle(k);
    let mut report = forced_report(&format!("forced-cycle-{k}"), &b, k, opts)?;
    if k == 3 {
        report
            .notes
            .push("for k = 3 the vertex h3 is Y, so p'2 must meet Y and the order gadget cannot be realized".into());
    }
    if report.complete && report.full_count == 0 {
        refute(&mut report, "the forced cycle has no representation".into());
    }
    Ok(report)
}

/// [`check_forced_cycle`] on the forced cycle minus the edge `x`–`y`.
pub fn check_forced_cycle_without(k: usize, x: &str, y: &str, opts: &LabOptions) -> Result<PropositionReport, RecognizeError> {
    let mut b = forced_cycle(k);
    let (u, v) = (b.id(x), b.id(y));
    let mut g = b.graph().clone();
    assert!(g.remove_edge(u, v), "{x}-{y} is not an edge");
    let mut nb = GadgetBuilder::new();
    for w in 0..g.len() {
        nb.vertex(&g.label(w), g.side(w).unwrap());
    }
    for &(p, q) in g.edges() {
        nb.edge_ids(p, q);
    }
    b = nb;
    forced_report(&format!("forced-cycle-{k}-without-{x}-{y}"), &b, k, opts)
}

/// Names of the clause-gadget vertices that are not part of its handy gadget.
pub fn proper_clause_vertices() -> Vec<&'static str> {
    CLAUSE.a.iter().chain(CLAUSE.b).copied().collect()
}

fn template_order(b: &GadgetBuilder, case: u8, transmission: bool) -> VertexOrder {
    let mut seq = vec![b.id(SENTINEL)];
    seq.extend(clause_template(case, transmission).iter().map(|n| b.id(n)));
    VertexOrder::from_sequence(seq).expect("templates list every vertex once")
}

/// Checks the four case templates of a clause context: each is feasible and
/// shows its triplet.
fn check_templates(b: &GadgetBuilder, transmission: bool, report: &mut PropositionReport) {
    let g = b.graph();
    for (case, triplet, _) in CLAUSE_CASES {
        let order = template_order(b, case, transmission);
        let feasible = check_order(g, &order, Model::Stick).map(|r| r.feasible).unwrap_or(false);
        let shown = read_triplet(&|n| order.pos(b.id(n)));
        report
            .evidence
            .insert(format!("template {case}"), format!("{} {shown}", if feasible { "feasible" } else { "infeasible" }));
        if !feasible || shown != triplet {
            refute(report, format!("template {case} fails (expected {triplet}, got {shown})"));
        }
    }
}

fn expected_triplets() -> BTreeSet<Triplet> {
    [Triplet::TFF, Triplet::FTF, Triplet::FFT].into_iter().collect()
}

fn triplet_at(b: &GadgetBuilder, pos: &[usize]) -> Triplet {
    Triplet(PROBES.map(|(x, y)| pos[b.id(x)] < pos[b.id(y)]))
}

/// Clause gadget with the sentinel pinned first: the realized state
/// triplets are exactly `TFF, FTF, FFT`; `b1 ≺ b2`, and no proper origin
/// lies between `f1` and `T`, in every order.
pub fn check_clause_states(opts: &LabOptions) -> Result<PropositionReport, RecognizeError> {
    let b = clause_gadget(ClauseContext {
        transmission: false,
        sentinel_on_supports: false,
    });
    let g = b.graph();
    let (b1, b2, f1, t) = (b.id("b1"), b.id("b2"), b.id("f1"), b.id("T"));
    let proper: Vec<VertexId> = proper_clause_vertices().iter().map(|n| b.id(n)).collect();
    let (mut report, triplets) = walk(
        "clause-states",
        g,
        GraphClass::Stick,
        &opts.search(vec![b.id(SENTINEL)]),
        false,
        BTreeSet::<Triplet>::new,
        |set, _, pos| {
            set.insert(triplet_at(&b, pos));
            let inside = proper.iter().any(|&v| pos[f1] < pos[v] && pos[v] < pos[t]);
            pos[b2] < pos[b1] || inside
        },
        |a, b| a.extend(b),
    )?;
    report.evidence.insert(
        "triplets".into(),
        triplets.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(" "),
    );
    check_templates(&b, false, &mut report);
    if report.complete && triplets != expected_triplets() {
        refute(&mut report, "realized triplets differ from TFF FTF FFT".into());
    }
    Ok(report)
}

fn transmission_context() -> GadgetBuilder {
    clause_gadget(ClauseContext {
        transmission: true,
        sentinel_on_supports: true,
    })
}

fn transmission_walk(
    id: &str,
    b: &GadgetBuilder,
    opts: &LabOptions,
    stop_on_bad: bool,
) -> Result<(PropositionReport, BTreeSet<Triplet>), RecognizeError> {
    let g = b.graph();
    let probes = PROBES.map(|(x, y)| (b.get(x), b.get(y)));
    let supports = SUPPORT_PROBES.map(|(x, y)| (b.get(x), b.get(y)));
    let before = |pos: &[usize], p: (Option<VertexId>, Option<VertexId>)| match p {
        (Some(x), Some(y)) => Some(pos[x] < pos[y]),
        _ => None,
    };
    walk(
        id,
        g,
        GraphClass::Stick,
        &opts.search(vec![b.id(SENTINEL)]),
        stop_on_bad,
        BTreeSet::<Triplet>::new,
        |set, _, pos| {
            let state = probes.map(|p| before(pos, p));
            let carried = supports.map(|p| before(pos, p));
            if let [Some(x), Some(y), Some(z)] = state {
                set.insert(Triplet([x, y, z]));
            }
            state.iter().zip(&carried).any(|(s, c)| s.is_some() && c.is_some() && s != c)
        },
        |a, b| a.extend(b),
    )
}

/// Clause and transmission gadgets with the sentinel pinned first and
/// attached to every support: each support pair records the state of its
/// probe pair, in every order.
pub fn check_transmission(opts: &LabOptions) -> Result<PropositionReport, RecognizeError> {
    let b = transmission_context();
    let (mut report, triplets) = transmission_walk("transmission", &b, opts, false)?;
    report.evidence.insert(
        "triplets".into(),
        triplets.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(" "),
    );
    report.evidence.insert(
        "biconditionals".into(),
        "Mx_1<Mx_0 iff b1_1<b1_0, My_1<My_0 iff a1<C, V<Mz_0 iff V<a1".into(),
    );
    check_templates(&b, true, &mut report);
    if report.complete && triplets != expected_triplets() {
        refute(&mut report, "realized triplets differ from TFF FTF FFT".into());
    }
    Ok(report)
}

/// [`check_transmission`] with vertex `name` deleted, stopping at the first
/// order that breaks a biconditional.
pub fn check_transmission_without(name: &str, opts: &LabOptions) -> Result<PropositionReport, RecognizeError> {
    let full = transmission_context();
    let drop = full.id(name);
    let keep: Vec<VertexId> = (0..full.graph().len()).filter(|&v| v != drop).collect();
    let g = full.graph().induced(&keep);
    let mut b = GadgetBuilder::new();
    for v in 0..g.len() {
        b.vertex(&g.label(v), g.side(v).unwrap());
    }
    for &(p, q) in g.edges() {
        b.edge_ids(p, q);
    }
    Ok(transmission_walk(&format!("transmission-without-{name}"), &b, opts, true)?.0)
}

/// Hook orders of the 4-cycle `x t y z` fall into exactly four cases modulo
/// the swaps `x↔y` and `t↔z`, two of each type.
pub fn check_four_cycle_types(opts: &LabOptions) -> Result<PropositionReport, RecognizeError> {
    let g = families::cycle(4);
    let (mut report, classes) = walk(
        "four-cycle-types",
        &g,
        GraphClass::Mpt,
        &opts.search(Vec::new()),
        false,
        BTreeSet::<Option<FourCycleType>>::new,
        |set, _, pos| {
            let c = classify_positions([pos[0], pos[1], pos[2], pos[3]]);
            set.insert(c);
            c.is_none()
        },
        |a, b| a.extend(b),
    )?;
    let mut found: Vec<FourCycleType> = classes.iter().flatten().copied().collect();
    found.sort_by_key(|c| c.case);
    let count = |k: BlockType| found.iter().filter(|c| c.kind == k).count();
    report.evidence.insert(
        "cases".into(),
        found.iter().map(|c| format!("{}{}", c.case, c.kind)).collect::<Vec<_>>().join(" "),
    );
    report
        .evidence
        .insert("types".into(), format!("{} A, {} B", count(BlockType::A), count(BlockType::B)));
    if report.complete && (found.len() != 4 || count(BlockType::A) != 2) {
        refute(&mut report, "expected four cases, two of each type".into());
    }
    Ok(report)
}

/// Whether `seq` lists `0..k` in increasing or decreasing circular order.
pub fn is_circular_run(seq: &[usize], k: usize) -> bool {
    let step = |d: usize| seq.windows(2).all(|w| (w[1] + k - w[0]) % k == d);
    seq.len() == k && (step(1) || step(k - 1))
}

/// In every representation of the cycle `a_1 b_1 ... a_k b_k`, the
/// B-origins follow the cycle around in one direction.
pub fn check_cycle_orders(k: usize, opts: &LabOptions) -> Result<PropositionReport, RecognizeError> {
    let g = families::even_cycle(k);
    let verdict = recognize(&g, GraphClass::Stick, &opts.search(Vec::new()))?.verdict;
    let (mut report, families_seen) = walk(
        &format!("cycle-{}", 2 * k),
        &g,
        GraphClass::Stick,
        &opts.search(Vec::new()),
        false,
        BTreeSet::<(usize, bool)>::new,
        |set, seq, _| {
            // vertex 2i+1 is b_{i+1}
            let bs: Vec<usize> = seq.iter().filter(|&&v| v % 2 == 1).map(|&v| v / 2).collect();
            let ok = is_circular_run(&bs, k);
            if ok {
                let up = k <= 2 || (bs[1] + k - bs[0]) % k == 1;
                set.insert((bs[0], up));
            }
            !ok
        },
        |a, b| a.extend(b),
    )?;
    report.evidence.insert("recognized".into(), format!("{verdict:?}").to_lowercase());
    report.evidence.insert("B-suborders".into(), families_seen.len().to_string());
    if verdict != Verdict::Yes {
        refute(&mut report, "cycle not recognized as a stick graph".into());
    }
    Ok(report)
}

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("unknown gadget-check target {0:?}")]
    UnknownTarget(String),
    #[error(transparent)]
    Search(#[from] RecognizeError),
}

/// Gadget-check targets.
pub const TARGETS: [&str; 7] = ["handy", "forced-cycle", "clause", "transmission", "four-cycle", "cycles", "controls"];

/// Runs one target (`all` runs every proposition check, but not the
/// controls).
pub fn run_target(name: &str, opts: &LabOptions) -> Result<Vec<PropositionReport>, LabError> {
    Ok(match name {
        "handy" => vec![check_handy(opts)?],
        "forced-cycle" => vec![check_forced_cycle(4, opts)?, check_forced_cycle(5, opts)?],
        "clause" => vec![check_clause_states(opts)?],
        "transmission" => vec![check_transmission(opts)?],
        "four-cycle" => vec![check_four_cycle_types(opts)?],
        "cycles" => (2..=5).map(|k| check_cycle_orders(k, opts)).collect::<Result<_, _>>()?,
        "controls" => negative_controls(opts)?,
        "all" => {
            let mut out = Vec::new();
            for t in &TARGETS[..6] {
                out.extend(run_target(t, opts)?);
            }
            out
        }
        _ => return Err(LabError::UnknownTarget(name.to_string())),
    })
}

/// Mutations expected to break a check. A control passes when its report is
/// refuted.
pub const FORCED_CONTROLS: [(&str, &str); 2] = [("p'2", "Q"), ("p2", "h2")];
pub const TRANSMISSION_CONTROLS: [&str; 1] = ["r_1"];

pub fn negative_controls(opts: &LabOptions) -> Result<Vec<PropositionReport>, RecognizeError> {
    let mut out = Vec::new();
    for (x, y) in FORCED_CONTROLS {
        out.push(check_forced_cycle_without(4, x, y, opts)?);
    }
    for v in TRANSMISSION_CONTROLS {
        out.push(check_transmission_without(v, opts)?);
    }
    Ok(out)
}
