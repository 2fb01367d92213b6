//! Exact recognition by depth-first search over origin orders.
//!
//! Vertices are placed left to right. [`PlacementState`] rejects a vertex as
//! soon as placing it forces a crossing on a non-edge, which makes every
//! surviving leaf a feasible order; an optional precedence lookahead cuts
//! prefixes whose pending constraints are cyclic.

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::feasibility::{check_order, FeasibilityError, Model, PlacementState, ReachAssignment, VertexOrder};
use crate::geometry::{realize, vertices_meet, verify_geometry, Geometry, VertexGeom, SCALE};
use crate::graph::{Bipartition, Graph, VertexId};

/// Graph class to recognize.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphClass {
    Stick,
    BipHook,
    Mpt,
}

impl GraphClass {
    pub fn model(self) -> Model {
        match self {
            GraphClass::Stick => Model::Stick,
            GraphClass::BipHook | GraphClass::Mpt => Model::Hook,
        }
    }
}

impl std::str::FromStr for GraphClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "stick" => Ok(GraphClass::Stick),
            "biphook" => Ok(GraphClass::BipHook),
            "mpt" => Ok(GraphClass::Mpt),
            _ => Err(format!("unknown class {s:?} (expected stick, biphook or mpt)")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RecognizeError {
    #[error("input is not bipartite (odd cycle {0:?})")]
    NotBipartite(Vec<VertexId>),
    #[error(transparent)]
    Feasibility(#[from] FeasibilityError),
    #[error("brute-force oracle limited to {limit} vertices, got {n}")]
    OracleLimit { limit: usize, n: usize },
    #[error("mirror map is not an involution on the vertex set")]
    BadMirror,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Yes,
    No,
    Exhausted,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub prunes: u64,
    #[serde(with = "millis")]
    pub elapsed: Duration,
}

mod millis {
    use serde::{Deserialize, Deserializer, Serializer};
    use std::time::Duration;

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(d.as_millis() as u64)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        Ok(Duration::from_millis(u64::deserialize(d)?))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub order: VertexOrder,
    pub reaches: ReachAssignment,
    pub geometry: Geometry,
}

#[derive(Clone, Debug)]
pub struct RecognitionOutcome {
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub stats: SearchStats,
}

/// Search knobs. The default is unlimited, single worker, with lookahead.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    /// Maximum number of search-tree nodes; `None` for no limit.
    pub budget: Option<u64>,
    pub workers: usize,
    /// Precedence-cycle lookahead at every node.
    pub lookahead: bool,
    /// Vertices forced to occupy the first positions, in this order.
    pub prefix: Vec<VertexId>,
    /// Caller-asserted automorphism `σ` such that reversing an order and
    /// applying `σ` maps representations to representations. Only orders
    /// with `pos(x) + pos(σx) ≤ n - 1` for the first moved vertex `x` are
    /// explored.
    pub mirror: Option<Vec<VertexId>>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            budget: None,
            workers: 1,
            lookahead: true,
            prefix: Vec::new(),
            mirror: None,
        }
    }
}

impl SearchOptions {
    pub fn with_budget(budget: u64) -> Self {
        SearchOptions {
            budget: Some(budget),
            ..Default::default()
        }
    }
}

/// Feasible orders found by [`enumerate_representations`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationReport {
    /// Distinct feasible orders, or distinct projections when a projection
    /// was requested; sorted.
    pub orders: Vec<Vec<VertexId>>,
    /// Number of full feasible orders visited.
    pub full_count: u64,
    pub complete: bool,
    pub stats: SearchStats,
}

fn prepare(g: &Graph, class: GraphClass) -> Result<(), RecognizeError> {
    match class {
        GraphClass::Stick => {
            if !g.is_bipartite_labeled() {
                return Err(FeasibilityError::MissingSides.into());
            }
        }
        GraphClass::BipHook => {
            if let Bipartition::OddCycle(c) = g.validate_bipartition() {
                return Err(RecognizeError::NotBipartite(c));
            }
        }
        GraphClass::Mpt => {}
    }
    Ok(())
}

struct Shared<'a> {
    budget: Option<u64>,
    nodes: AtomicU64,
    prunes: AtomicU64,
    exhausted: AtomicBool,
    stop: AtomicBool,
    lookahead: bool,
    mirror: Option<(VertexId, VertexId)>,
    _g: &'a Graph,
}

impl Shared<'_> {
    /// Counts a node; false once the budget is spent.
    fn tick(&self) -> bool {
        let used = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if self.budget.is_some_and(|b| used > b) {
            self.exhausted.store(true, Ordering::Relaxed);
            return false;
        }
        true
    }

    fn mirror_ok(&self, st: &PlacementState, v: VertexId) -> bool {
        let Some((x, sx)) = self.mirror else { return true };
        let n = st.graph().len();
        let p = st.depth();
        let other = if v == x {
            sx
        } else if v == sx {
            x
        } else {
            return true;
        };
        // the partner lands at or after p + 1 when still unplaced
        let q = st.position(other).unwrap_or(p + 1);
        p + q < n
    }
}

/// Candidates for the next position, most constrained first: vertices with
/// placed neighbors (closest back reach first), then the rest by id.
fn candidates(st: &PlacementState) -> Vec<VertexId> {
    let g = st.graph();
    let mut c: Vec<(usize, usize, VertexId)> = (0..g.len())
        .filter(|&v| !st.is_placed(v))
        .map(|v| match st.pinned_back_reach(v) {
            Some(l) => (0, usize::MAX - l, v),
            None => (1, 0, v),
        })
        .collect();
    c.sort_unstable();
    c.into_iter().map(|(_, _, v)| v).collect()
}

/// Depth-first walk below `st`, calling `leaf` on every feasible full
/// order. `leaf` returns false to stop the walk.
fn walk(st: &mut PlacementState, shared: &Shared, leaf: &mut dyn FnMut(&[VertexId]) -> bool) -> bool {
    if shared.stop.load(Ordering::Relaxed) {
        return false;
    }
    if st.is_complete() {
        return leaf(st.sequence());
    }
    if !shared.tick() {
        shared.stop.store(true, Ordering::Relaxed);
        return false;
    }
    if shared.lookahead && !st.precedence_acyclic() {
        shared.prunes.fetch_add(1, Ordering::Relaxed);
        return true;
    }
    for v in candidates(st) {
        if !st.can_push(v) || !shared.mirror_ok(st, v) {
            shared.prunes.fetch_add(1, Ordering::Relaxed);
            continue;
        }
        st.push(v);
        let go = walk(st, shared, leaf);
        st.pop();
        if !go {
            return false;
        }
    }
    true
}

/// Prefixes at which the parallel search splits, in DFS order.
fn frontier(st: &mut PlacementState, shared: &Shared, want: usize) -> Vec<Vec<VertexId>> {
    let mut level = vec![st.sequence().to_vec()];
    let n = st.graph().len();
    while level.len() < want && level.iter().all(|p| p.len() < n) {
        let mut next = Vec::new();
        for p in &level {
            let mut s = st.clone();
            for &v in &p[st.depth()..] {
                s.push(v);
            }
            for v in candidates(&s) {
                if s.can_push(v) && shared.mirror_ok(&s, v) {
                    let mut q = p.clone();
                    q.push(v);
                    next.push(q);
                }
            }
        }
        if next.is_empty() {
            return next;
        }
        level = next;
    }
    level
}

fn mirror_pair(g: &Graph, mirror: &Option<Vec<VertexId>>) -> Result<Option<(VertexId, VertexId)>, RecognizeError> {
    let Some(sigma) = mirror else { return Ok(None) };
    if sigma.len() != g.len() || (0..g.len()).any(|v| sigma[v] >= g.len() || sigma[sigma[v]] != v) {
        return Err(RecognizeError::BadMirror);
    }
    Ok((0..g.len()).find(|&v| sigma[v] != v).map(|v| (v, sigma[v])))
}

/// Generic search driver: folds `visit` over every feasible order with one
/// accumulator per task, merged in task order. `visit` returns false to stop
/// the whole search early.
pub fn search_fold<S, I, V, M>(
    g: &Graph,
    class: GraphClass,
    opts: &SearchOptions,
    init: I,
    visit: V,
    merge: M,
) -> Result<(S, bool, SearchStats), RecognizeError>
where
    S: Send,
    I: Fn() -> S + Sync,
    V: Fn(&mut S, &[VertexId]) -> bool + Sync,
    M: Fn(S, S) -> S,
{
    prepare(g, class)?;
    let start = Instant::now();
    let model = class.model();
    let shared = Shared {
        budget: opts.budget,
        nodes: AtomicU64::new(0),
        prunes: AtomicU64::new(0),
        exhausted: AtomicBool::new(false),
        stop: AtomicBool::new(false),
        lookahead: opts.lookahead,
        mirror: mirror_pair(g, &opts.mirror)?,
        _g: g,
    };
    let mut root = PlacementState::new(g, model)?;
    let mut dead = false;
    for &v in &opts.prefix {
        if v >= g.len() || root.is_placed(v) {
            return Err(FeasibilityError::NotAPermutation(v).into());
        }
        if !root.can_push(v) {
            dead = true;
            break;
        }
        root.push(v);
    }
    let early_stop = AtomicBool::new(false);
    let run = |st: &mut PlacementState, acc: &mut S| {
        walk(st, &shared, &mut |seq| {
            if visit(acc, seq) {
                true
            } else {
                early_stop.store(true, Ordering::Relaxed);
                shared.stop.store(true, Ordering::Relaxed);
                false
            }
        });
    };
    let result = if dead {
        init()
    } else if opts.workers <= 1 {
        let mut acc = init();
        run(&mut root, &mut acc);
        acc
    } else {
        let tasks = frontier(&mut root, &shared, opts.workers * 8);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.workers)
            .build()
            .expect("thread pool");
        let parts: Vec<S> = pool.install(|| {
            tasks
                .par_iter()
                .map(|prefix| {
                    let mut st = root.clone();
                    for &v in &prefix[root.depth()..] {
                        st.push(v);
                    }
                    let mut acc = init();
                    run(&mut st, &mut acc);
                    acc
                })
                .collect()
        });
        parts.into_iter().fold(init(), &merge)
    };
    let complete = !shared.exhausted.load(Ordering::Relaxed) && !early_stop.load(Ordering::Relaxed);
    let stats = SearchStats {
        nodes: shared.nodes.load(Ordering::Relaxed),
        prunes: shared.prunes.load(Ordering::Relaxed),
        elapsed: start.elapsed(),
    };
    Ok((result, complete, stats))
}

fn witness_for(g: &Graph, seq: &[VertexId], model: Model) -> Witness {
    let order = VertexOrder::from_sequence(seq.to_vec()).expect("search yields permutations");
    let report = check_order(g, &order, model).expect("validated input");
    let reaches = report.reaches.expect("search leaves are feasible");
    let geometry = realize(g, &order, &reaches, model).expect("extremal reaches fit the order");
    debug_assert!(verify_geometry(&geometry, g).unwrap().matches);
    Witness {
        order,
        reaches,
        geometry,
    }
}

/// Decides membership of `g` in `class`.
pub fn recognize(g: &Graph, class: GraphClass, opts: &SearchOptions) -> Result<RecognitionOutcome, RecognizeError> {
    let model = class.model();
    let (found, complete, stats) = search_fold(
        g,
        class,
        opts,
        || None::<Vec<VertexId>>,
        |acc, seq| {
            // accept only orders the kernel confirms
            if check_order(g, &VertexOrder::from_sequence(seq.to_vec()).unwrap(), model)
                .map(|r| r.feasible)
                .unwrap_or(false)
            {
                *acc = Some(seq.to_vec());
                false
            } else {
                true
            }
        },
        |a, b| a.or(b),
    )?;
    let verdict = match (&found, complete) {
        (Some(_), _) => Verdict::Yes,
        (None, true) => Verdict::No,
        (None, false) => Verdict::Exhausted,
    };
    Ok(RecognitionOutcome {
        verdict,
        witness: found.map(|seq| witness_for(g, &seq, model)),
        stats,
    })
}

/// Lists every feasible order, or every distinct projection onto `project`
/// (vertices outside the list are dropped from each order).
pub fn enumerate_representations(
    g: &Graph,
    class: GraphClass,
    opts: &SearchOptions,
    project: Option<&[VertexId]>,
) -> Result<EnumerationReport, RecognizeError> {
    let keep: Option<Vec<bool>> = project.map(|p| {
        let mut k = vec![false; g.len()];
        for &v in p {
            k[v] = true;
        }
        k
    });
    let ((orders, count), complete, stats) = search_fold(
        g,
        class,
        opts,
        || (BTreeSet::new(), 0u64),
        |(set, count), seq| {
            *count += 1;
            let item = match &keep {
                Some(k) => seq.iter().copied().filter(|&v| k[v]).collect(),
                None => seq.to_vec(),
            };
            set.insert(item);
            true
        },
        |(mut a, ca), (b, cb)| {
            a.extend(b);
            (a, ca + cb)
        },
    )?;
    Ok(EnumerationReport {
        orders: orders.into_iter().collect(),
        full_count: count,
        complete,
        stats,
    })
}

/// Default size limits of the brute-force oracle.
pub const ORACLE_LIMIT_STICK: usize = 7;
pub const ORACLE_LIMIT_HOOK: usize = 6;

/// Independent decision procedure: every permutation and every discrete
/// reach assignment, checked with the geometric segment predicate.
pub fn brute_force_oracle(g: &Graph, class: GraphClass) -> Result<RecognitionOutcome, RecognizeError> {
    let limit = match class {
        GraphClass::Stick => ORACLE_LIMIT_STICK,
        _ => ORACLE_LIMIT_HOOK,
    };
    brute_force_oracle_with_limit(g, class, limit)
}

pub fn brute_force_oracle_with_limit(g: &Graph, class: GraphClass, limit: usize) -> Result<RecognitionOutcome, RecognizeError> {
    prepare(g, class)?;
    let n = g.len();
    if n > limit {
        return Err(RecognizeError::OracleLimit { limit, n });
    }
    let start = Instant::now();
    let mut nodes = 0u64;
    let model = class.model();
    for perm in (0..n).permutations(n) {
        let order = VertexOrder::from_sequence(perm).unwrap();
        if let Some(reaches) = oracle_reaches(g, &order, model, &mut nodes) {
            let geometry = realize(g, &order, &reaches, model).expect("reaches are in range");
            if verify_geometry(&geometry, g).map(|c| c.matches).unwrap_or(false) {
                return Ok(RecognitionOutcome {
                    verdict: Verdict::Yes,
                    witness: Some(Witness {
                        order,
                        reaches,
                        geometry,
                    }),
                    stats: SearchStats {
                        nodes,
                        prunes: 0,
                        elapsed: start.elapsed(),
                    },
                });
            }
        }
    }
    Ok(RecognitionOutcome {
        verdict: Verdict::No,
        witness: None,
        stats: SearchStats {
            nodes,
            prunes: 0,
            elapsed: start.elapsed(),
        },
    })
}

/// First reach assignment (in lexicographic search order) whose drawing
/// realizes exactly the edges of `g` along `order`, found by trying every
/// discrete reach.
pub fn oracle_reaches(g: &Graph, order: &VertexOrder, model: Model, nodes: &mut u64) -> Option<ReachAssignment> {
    let n = g.len();
    let has = |v: VertexId| -> (bool, bool) {
        match model {
            Model::Hook => (true, true),
            Model::Stick => match g.side(v) {
                Some(crate::graph::Side::B) => (true, false),
                _ => (false, true),
            },
        }
    };
    let mut drawn: Vec<Option<VertexGeom>> = vec![None; n];
    let mut fwd = vec![None; n];
    let mut bck = vec![None; n];
    place(g, order.sequence(), 0, &has, &mut drawn, &mut fwd, &mut bck, nodes).then_some(ReachAssignment {
        forward: fwd,
        back: bck,
    })
}

#[allow(clippy::too_many_arguments)]
fn place(
    g: &Graph,
    perm: &[VertexId],
    i: usize,
    has: &dyn Fn(VertexId) -> (bool, bool),
    drawn: &mut [Option<VertexGeom>],
    fwd: &mut [Option<usize>],
    bck: &mut [Option<usize>],
    nodes: &mut u64,
) -> bool {
    let n = perm.len();
    if i == n {
        return true;
    }
    let v = perm[i];
    let (h, vert) = has(v);
    let rhos: Vec<Option<usize>> = if h { (i..n).map(Some).collect() } else { vec![None] };
    let lams: Vec<Option<usize>> = if vert { (0..=i).map(Some).collect() } else { vec![None] };
    for &r in &rhos {
        for &l in &lams {
            *nodes += 1;
            let q = SCALE * i as i64;
            let vg = VertexGeom {
                origin: (q, -q),
                horizontal_tip: r.map(|r| SCALE * r as i64 + 1),
                vertical_tip: l.map(|l| -SCALE * l as i64 + 1),
                name: None,
            };
            // a later origin's arms never reach back, so each earlier pair is final
            let ok = perm[..i]
                .iter()
                .all(|&u| vertices_meet(drawn[u].as_ref().unwrap(), &vg) == g.adjacent(u, v));
            if !ok {
                continue;
            }
            drawn[v] = Some(vg);
            fwd[v] = r;
            bck[v] = l;
            if place(g, perm, i + 1, has, drawn, fwd, bck, nodes) {
                return true;
            }
            drawn[v] = None;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{families, Side};

    fn two_k2() -> Graph {
        Graph::from_edges(4, Some(vec![Side::B, Side::A, Side::B, Side::A]), [(0, 1), (2, 3)]).unwrap()
    }

    #[test]
    fn k2_has_one_order() {
        let g = families::k2();
        let out = recognize(&g, GraphClass::Stick, &SearchOptions::default()).unwrap();
        assert_eq!(out.verdict, Verdict::Yes);
        let rep = enumerate_representations(&g, GraphClass::Stick, &SearchOptions::default(), None).unwrap();
        assert!(rep.complete);
        assert_eq!(rep.orders, vec![vec![0, 1]]);
    }

    #[test]
    fn even_cycles_are_stick() {
        for k in 2..=5 {
            let g = families::even_cycle(k);
            let out = recognize(&g, GraphClass::Stick, &SearchOptions::default()).unwrap();
            assert_eq!(out.verdict, Verdict::Yes, "C{}", 2 * k);
            let w = out.witness.unwrap();
            assert!(verify_geometry(&w.geometry, &g).unwrap().matches);
        }
    }

    #[test]
    fn oracle_two_k2_witness() {
        let out = brute_force_oracle(&two_k2(), GraphClass::Stick).unwrap();
        assert_eq!(out.verdict, Verdict::Yes);
        assert_eq!(out.witness.unwrap().order.sequence(), &[0, 1, 2, 3]);
    }

    #[test]
    fn oracle_c4_mpt() {
        let out = brute_force_oracle(&families::cycle(4), GraphClass::Mpt).unwrap();
        assert_eq!(out.verdict, Verdict::Yes);
    }

    #[test]
    fn oracle_refuses_big_inputs() {
        assert!(matches!(
            brute_force_oracle(&families::cycle(8), GraphClass::Mpt),
            Err(RecognizeError::OracleLimit { .. })
        ));
    }

    #[test]
    fn budget_exhaustion() {
        let g = families::even_cycle(4);
        let out = recognize(&g, GraphClass::Stick, &SearchOptions::with_budget(2)).unwrap();
        assert_eq!(out.verdict, Verdict::Exhausted);
        let rep = enumerate_representations(&g, GraphClass::Stick, &SearchOptions::with_budget(2), None).unwrap();
        assert!(!rep.complete);
    }

    #[test]
    fn biphook_rejects_odd_cycle() {
        assert!(matches!(
            recognize(&families::cycle(5), GraphClass::BipHook, &SearchOptions::default()),
            Err(RecognizeError::NotBipartite(_))
        ));
        let out = recognize(&families::cycle(5), GraphClass::Mpt, &SearchOptions::default()).unwrap();
        assert_eq!(out.verdict, Verdict::Yes);
    }

    #[test]
    fn workers_agree() {
        let g = families::even_cycle(4);
        let one = enumerate_representations(&g, GraphClass::Stick, &SearchOptions::default(), None).unwrap();
        let four = enumerate_representations(
            &g,
            GraphClass::Stick,
            &SearchOptions {
                workers: 4,
                ..Default::default()
            },
            None,
        )
        .unwrap();
        assert_eq!(one.orders, four.orders);
        assert_eq!(one.full_count, four.full_count);
    }

    #[test]
    fn lookahead_does_not_change_results() {
        let g = families::even_cycle(3);
        let with = enumerate_representations(&g, GraphClass::Mpt, &SearchOptions::default(), None).unwrap();
        let without = enumerate_representations(
            &g,
            GraphClass::Mpt,
            &SearchOptions {
                lookahead: false,
                ..Default::default()
            },
            None,
        )
        .unwrap();
        assert_eq!(with.orders, without.orders);
    }

    #[test]
    fn fixed_prefix_restricts() {
        let g = two_k2();
        let opts = SearchOptions {
            prefix: vec![2],
            ..Default::default()
        };
        let rep = enumerate_representations(&g, GraphClass::Stick, &opts, None).unwrap();
        assert!(rep.orders.iter().all(|o| o[0] == 2));
        assert!(!rep.orders.is_empty());
    }

    #[test]
    fn projection_merges_orders() {
        let g = two_k2();
        let rep = enumerate_representations(&g, GraphClass::Stick, &SearchOptions::default(), Some(&[0, 2])).unwrap();
        assert_eq!(rep.orders, vec![vec![0, 2], vec![2, 0]]);
        assert!(rep.full_count >= 2);
    }

    #[test]
    fn mirror_keeps_a_representative() {
        // C4 with sides swapped by a1<->b1, a2<->b2
        let g = families::even_cycle(2);
        let sigma = vec![1, 0, 3, 2];
        let opts = SearchOptions {
            mirror: Some(sigma),
            ..Default::default()
        };
        let out = recognize(&g, GraphClass::Stick, &opts).unwrap();
        assert_eq!(out.verdict, Verdict::Yes);
        assert!(recognize(
            &g,
            GraphClass::Stick,
            &SearchOptions {
                mirror: Some(vec![1, 1, 3, 2]),
                ..Default::default()
            }
        )
        .is_err());
    }
}
