//! Fixed-order feasibility kernels.
//!
//! Origins sit on the ground line in a total order. A reach assignment
//! records, per vertex, the rightmost position its horizontal arm passes
//! (`forward`, ρ) and the leftmost position whose level its vertical arm
//! reaches (`back`, λ). For `pos(u) < pos(v)` the horizontal arm of `u` meets
//! the vertical arm of `v` iff `ρ(u) ≥ pos(v)` and `λ(v) ≤ pos(u)`; no other
//! pair of arms can meet.
//!
//! Under the extremal assignment (smallest ρ, largest λ compatible with the
//! edges) every required crossing is present and the set of crossings is
//! minimal, so an order is feasible iff the extremal assignment creates no
//! crossing on a non-edge.

use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, Side, VertexId};

/// Which geometric objects represent the vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// A-vertices are vertical segments, B-vertices horizontal segments.
    Stick,
    /// Every vertex is a hook (vertical plus horizontal arm from its center).
    Hook,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Stick => "stick",
            Model::Hook => "hook",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FeasibilityError {
    #[error("the stick model needs side labels")]
    MissingSides,
    #[error("order has {got} entries, graph has {expected} vertices")]
    WrongLength { expected: usize, got: usize },
    #[error("order is not a permutation (vertex {0} repeated or out of range)")]
    NotAPermutation(VertexId),
}

/// A total order of origins along the ground line.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VertexOrder {
    sequence: Vec<VertexId>,
    #[serde(skip)]
    position: Vec<usize>,
}

impl VertexOrder {
    /// Order from the left-to-right list of vertices.
    pub fn from_sequence(sequence: Vec<VertexId>) -> Result<Self, FeasibilityError> {
        let n = sequence.len();
        let mut position = vec![usize::MAX; n];
        for (i, &v) in sequence.iter().enumerate() {
            if v >= n || position[v] != usize::MAX {
                return Err(FeasibilityError::NotAPermutation(v));
            }
            position[v] = i;
        }
        Ok(VertexOrder { sequence, position })
    }

    pub fn identity(n: usize) -> Self {
        VertexOrder::from_sequence((0..n).collect()).unwrap()
    }

    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }

    /// Vertices from left to right.
    pub fn sequence(&self) -> &[VertexId] {
        &self.sequence
    }

    /// Position of `v` (0 = leftmost).
    #[inline]
    pub fn pos(&self, v: VertexId) -> usize {
        self.position[v]
    }

    pub fn positions(&self) -> &[usize] {
        &self.position
    }

    /// `u ≺ v`.
    pub fn before(&self, u: VertexId, v: VertexId) -> bool {
        self.position[u] < self.position[v]
    }

    /// Reversed order (mirror along the ground line).
    pub fn reversed(&self) -> VertexOrder {
        let mut s = self.sequence.clone();
        s.reverse();
        VertexOrder::from_sequence(s).unwrap()
    }

    fn check_len(&self, g: &Graph) -> Result<(), FeasibilityError> {
        if self.len() != g.len() {
            return Err(FeasibilityError::WrongLength {
                expected: g.len(),
                got: self.len(),
            });
        }
        Ok(())
    }
}

/// Per-vertex reach indices. `forward[v]` is present for vertices with a
/// horizontal arm, `back[v]` for vertices with a vertical arm.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReachAssignment {
    pub forward: Vec<Option<usize>>,
    pub back: Vec<Option<usize>>,
}

impl ReachAssignment {
    /// Checks `λ(v) ≤ pos(v) ≤ ρ(v)` and `ρ(v) < n`.
    pub fn is_consistent_with(&self, order: &VertexOrder) -> bool {
        let n = order.len();
        (0..n).all(|v| {
            let p = order.pos(v);
            self.forward[v].is_none_or(|r| r >= p && r < n) && self.back[v].is_none_or(|l| l <= p)
        })
    }
}

/// Whether a vertex carries a horizontal / vertical arm in `model`.
pub(crate) fn arms(g: &Graph, v: VertexId, model: Model) -> (bool, bool) {
    match model {
        Model::Hook => (true, true),
        Model::Stick => match g.side(v) {
            Some(Side::B) => (true, false),
            Some(Side::A) => (false, true),
            None => (false, false),
        },
    }
}

fn require_sides(g: &Graph, model: Model) -> Result<(), FeasibilityError> {
    if model == Model::Stick && !g.is_bipartite_labeled() {
        return Err(FeasibilityError::MissingSides);
    }
    Ok(())
}

/// Minimal forward reaches and maximal back reaches realizing every edge
/// whose endpoints are correctly ordered.
pub fn extremal_reaches(g: &Graph, order: &VertexOrder, model: Model) -> Result<ReachAssignment, FeasibilityError> {
    require_sides(g, model)?;
    order.check_len(g)?;
    let n = g.len();
    let mut forward = vec![None; n];
    let mut back = vec![None; n];
    for v in 0..n {
        let p = order.pos(v);
        let (h, vert) = arms(g, v, model);
        if h {
            let r = g.neighbors(v).map(|w| order.pos(w)).filter(|&q| q > p).max().unwrap_or(p);
            forward[v] = Some(r);
        }
        if vert {
            let l = g.neighbors(v).map(|w| order.pos(w)).filter(|&q| q < p).min().unwrap_or(p);
            back[v] = Some(l);
        }
    }
    Ok(ReachAssignment { forward, back })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    /// Stick edge whose A-origin precedes its B-origin.
    MisorderedEdge,
    /// Non-adjacent pair forced to cross by the extremal reaches.
    SpuriousNonedge,
}

/// A violated pair; `first` precedes `second` on the ground line, except for
/// misordered edges where `first` is the B-vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Violation {
    pub first: VertexId,
    pub second: VertexId,
    pub kind: ViolationKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub feasible: bool,
    pub reaches: Option<ReachAssignment>,
    pub violations: Vec<Violation>,
}

/// Decides whether `order` admits a representation of `g` in `model`,
/// listing every violation.
pub fn check_order(g: &Graph, order: &VertexOrder, model: Model) -> Result<FeasibilityReport, FeasibilityError> {
    let reaches = extremal_reaches(g, order, model)?;
    let n = g.len();
    let mut violations = Vec::new();
    if model == Model::Stick {
        for &(u, v) in g.edges() {
            let (b, a) = if g.side(u) == Some(Side::B) { (u, v) } else { (v, u) };
            if order.pos(a) < order.pos(b) {
                violations.push(Violation {
                    first: b,
                    second: a,
                    kind: ViolationKind::MisorderedEdge,
                });
            }
        }
    }
    let seq = order.sequence();
    for i in 0..n {
        let u = seq[i];
        let Some(rho) = reaches.forward[u] else { continue };
        for (j, &v) in seq.iter().enumerate().take(rho + 1).skip(i + 1) {
            if g.adjacent(u, v) {
                continue;
            }
            if let Some(lam) = reaches.back[v] {
                if lam <= i {
                    debug_assert!(j <= rho);
                    violations.push(Violation {
                        first: u,
                        second: v,
                        kind: ViolationKind::SpuriousNonedge,
                    });
                }
            }
        }
    }
    let feasible = violations.is_empty();
    Ok(FeasibilityReport {
        feasible,
        reaches: feasible.then_some(reaches),
        violations,
    })
}

/// Shorthand for `check_order(..).feasible`.
pub fn is_feasible(g: &Graph, order: &VertexOrder, model: Model) -> Result<bool, FeasibilityError> {
    Ok(check_order(g, order, model)?.feasible)
}

/// True when the placed prefix already rules out every completion.
///
/// Reports a prefix as dead when a misordered stick edge is placed, or when
/// a non-adjacent pair `u ≺ v` inside the prefix has a placed neighbor of `u`
/// after `v` and a placed neighbor of `v` at or before `u`; both witnesses
/// stay put in every completion, so the crossing is forced.
pub fn prefix_prunable(g: &Graph, prefix: &[VertexId], model: Model) -> Result<bool, FeasibilityError> {
    require_sides(g, model)?;
    let n = g.len();
    let mut pos = vec![usize::MAX; n];
    for (i, &v) in prefix.iter().enumerate() {
        if v >= n || pos[v] != usize::MAX {
            return Err(FeasibilityError::NotAPermutation(v));
        }
        pos[v] = i;
    }
    if model == Model::Stick {
        for &(u, v) in g.edges() {
            let (b, a) = if g.side(u) == Some(Side::B) { (u, v) } else { (v, u) };
            if pos[a] != usize::MAX && pos[b] != usize::MAX && pos[a] < pos[b] {
                return Ok(true);
            }
        }
    }
    for (i, &u) in prefix.iter().enumerate() {
        if !arms(g, u, model).0 {
            continue;
        }
        let far = g.neighbors(u).filter(|&w| pos[w] != usize::MAX).map(|w| pos[w]).max();
        let Some(far) = far else { continue };
        for &v in &prefix[i + 1..prefix.len().min(far)] {
            if g.adjacent(u, v) || !arms(g, v, model).1 {
                continue;
            }
            if g.neighbors(v).any(|w| pos[w] <= i) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Incremental feasibility state for left-to-right placement, shared by the
/// recognizer's search.
///
/// Stronger than [`prefix_prunable`]: a placed vertex with an unplaced
/// neighbor already has its horizontal arm reaching past every placed origin,
/// and a placed vertex's back reach is final. `push` therefore detects a
/// dead prefix as soon as it is placed.
#[derive(Clone, Debug)]
pub struct PlacementState<'g> {
    g: &'g Graph,
    model: Model,
    seq: Vec<VertexId>,
    pos: Vec<usize>,
    /// Unplaced-neighbor counts.
    pending: Vec<usize>,
    /// Placed vertices with a horizontal arm and at least one unplaced neighbor.
    open: FixedBitSet,
    placed: FixedBitSet,
    /// `prefix_sets[d]` = vertices at positions `< d`.
    prefix_sets: Vec<FixedBitSet>,
    horizontal: FixedBitSet,
    vertical: FixedBitSet,
}

impl<'g> PlacementState<'g> {
    pub fn new(g: &'g Graph, model: Model) -> Result<Self, FeasibilityError> {
        require_sides(g, model)?;
        let n = g.len();
        let mut horizontal = FixedBitSet::with_capacity(n);
        let mut vertical = FixedBitSet::with_capacity(n);
        for v in 0..n {
            let (h, vv) = arms(g, v, model);
            horizontal.set(v, h);
            vertical.set(v, vv);
        }
        Ok(PlacementState {
            g,
            model,
            seq: Vec::with_capacity(n),
            pos: vec![usize::MAX; n],
            pending: (0..n).map(|v| g.degree(v)).collect(),
            open: FixedBitSet::with_capacity(n),
            placed: FixedBitSet::with_capacity(n),
            prefix_sets: vec![FixedBitSet::with_capacity(n)],
            horizontal,
            vertical,
        })
    }

    pub fn graph(&self) -> &'g Graph {
        self.g
    }

    pub fn depth(&self) -> usize {
        self.seq.len()
    }

    pub fn sequence(&self) -> &[VertexId] {
        &self.seq
    }

    pub fn is_placed(&self, v: VertexId) -> bool {
        self.placed.contains(v)
    }

    pub fn placed(&self) -> &FixedBitSet {
        &self.placed
    }

    pub fn is_complete(&self) -> bool {
        self.seq.len() == self.g.len()
    }

    pub fn position(&self, v: VertexId) -> Option<usize> {
        (self.pos[v] != usize::MAX).then_some(self.pos[v])
    }

    /// Back reach `v` would get if placed next (final once it has a placed
    /// neighbor).
    pub fn pinned_back_reach(&self, v: VertexId) -> Option<usize> {
        self.g.neighbors(v).filter(|&w| self.pos[w] != usize::MAX).map(|w| self.pos[w]).min()
    }

    /// Whether placing `v` next keeps the prefix alive.
    pub fn can_push(&self, v: VertexId) -> bool {
        debug_assert!(!self.placed.contains(v));
        let p = self.seq.len();
        if self.model == Model::Stick && self.g.side(v) == Some(Side::A) {
            // every B-neighbor of an A-vertex must precede it
            if self.pending[v] > 0 {
                return false;
            }
        }
        if !self.vertical.contains(v) {
            return true;
        }
        let Some(lam) = self.pinned_back_reach(v) else {
            return true;
        };
        let nb = self.g.neighbor_set(v);
        let lo = self.prefix_sets[lam].as_slice();
        let hi = self.prefix_sets[p].as_slice();
        let open = self.open.as_slice();
        let nbs = nb.as_slice();
        for i in 0..hi.len() {
            if open[i] & hi[i] & !lo[i] & !nbs[i] != 0 {
                return false;
            }
        }
        true
    }

    /// Places `v` at the next position. Callers check [`Self::can_push`] first.
    pub fn push(&mut self, v: VertexId) {
        let p = self.seq.len();
        self.seq.push(v);
        self.pos[v] = p;
        self.placed.insert(v);
        for w in self.g.neighbor_set(v).ones() {
            self.pending[w] -= 1;
            if self.pending[w] == 0 && self.placed.contains(w) {
                self.open.set(w, false);
            }
        }
        if self.pending[v] > 0 && self.horizontal.contains(v) {
            self.open.insert(v);
        }
        let mut next = self.prefix_sets[p].clone();
        next.insert(v);
        self.prefix_sets.push(next);
    }

    /// Undoes the last [`Self::push`].
    pub fn pop(&mut self) -> Option<VertexId> {
        let v = self.seq.pop()?;
        self.prefix_sets.pop();
        self.pos[v] = usize::MAX;
        self.placed.set(v, false);
        self.open.set(v, false);
        for w in self.g.neighbor_set(v).ones() {
            self.pending[w] += 1;
            if self.placed.contains(w) && self.horizontal.contains(w) {
                self.open.insert(w);
            }
        }
        Some(v)
    }

    /// Deadlock test on the precedence constraints implied by the prefix.
    ///
    /// An unplaced vertex `x` with a placed neighbor has a final back reach
    /// `λ`; every open placed non-neighbor at or after `λ` must close (all its
    /// neighbors placed) before `x`. In the stick model an A-vertex also
    /// follows all its neighbors. Returns false when these "must precede"
    /// relations contain a cycle.
    pub fn precedence_acyclic(&self) -> bool {
        let n = self.g.len();
        let p = self.seq.len();
        let words = self.placed.as_slice().len();
        // preds[x] = unplaced vertices that must come before x
        let mut preds: Vec<Option<FixedBitSet>> = vec![None; n];
        let mut any = false;
        for x in 0..n {
            if self.placed.contains(x) {
                continue;
            }
            let mut req = FixedBitSet::with_capacity(n);
            if self.model == Model::Stick && self.g.side(x) == Some(Side::A) {
                for w in self.g.neighbor_set(x).ones() {
                    if !self.placed.contains(w) {
                        req.insert(w);
                    }
                }
            }
            if self.vertical.contains(x) {
                if let Some(lam) = self.pinned_back_reach(x) {
                    let nb = self.g.neighbor_set(x).as_slice();
                    let lo = self.prefix_sets[lam].as_slice();
                    let hi = self.prefix_sets[p].as_slice();
                    let open = self.open.as_slice();
                    for i in 0..words {
                        let mut blockers = open[i] & hi[i] & !lo[i] & !nb[i];
                        while blockers != 0 {
                            let bit = blockers.trailing_zeros() as usize;
                            blockers &= blockers - 1;
                            let u = i * usize::BITS as usize + bit;
                            for w in self.g.neighbor_set(u).ones() {
                                if !self.placed.contains(w) {
                                    req.insert(w);
                                }
                            }
                        }
                    }
                }
            }
            if req.contains(x) {
                return false;
            }
            if !req.is_clear() {
                any = true;
                preds[x] = Some(req);
            }
        }
        if !any {
            return true;
        }
        // Kahn's algorithm on the unplaced vertices
        let mut indeg = vec![0usize; n];
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
        for x in 0..n {
            if let Some(req) = &preds[x] {
                for w in req.ones() {
                    succ[w].push(x);
                    indeg[x] += 1;
                }
            }
        }
        let mut stack: Vec<usize> = (0..n).filter(|&x| !self.placed.contains(x) && indeg[x] == 0).collect();
        let mut seen = 0;
        while let Some(x) = stack.pop() {
            seen += 1;
            for &y in &succ[x] {
                indeg[y] -= 1;
                if indeg[y] == 0 {
                    stack.push(y);
                }
            }
        }
        seen == n - p
    }
}
