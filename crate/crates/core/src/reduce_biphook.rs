//! Stick graphs to BipHook graphs: every vertex `u` becomes a chordless
//! 4-cycle `x_u t_u y_u z_u`, every edge `uv` joins `{x_u, y_u}` to
//! `{x_v, y_v}`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::feasibility::{check_order, Model, VertexOrder};
use crate::geometry::{verify_geometry, Geometry, GeometryError};
use crate::graph::{Graph, Side, VertexId};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BipHookError {
    #[error("input graph is disconnected")]
    Disconnected,
    #[error("stick geometry does not represent the input graph")]
    BadStickGeometry,
    #[error("hook geometry does not represent the 4-cycle graph")]
    BadHookGeometry,
    #[error("block of vertex {0} is not a 4-cycle representation")]
    NotAFourCycle(VertexId),
    #[error("adjacent vertices {0} and {1} have blocks of the same type")]
    Alternation(VertexId, VertexId),
    #[error("recovered order is not a stick representation")]
    Unrecovered,
    #[error("the stick model needs side labels")]
    MissingSides,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Ids of the four cycle vertices of one block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub x: VertexId,
    pub t: VertexId,
    pub y: VertexId,
    pub z: VertexId,
}

impl Block {
    fn of(u: VertexId) -> Block {
        Block {
            x: 4 * u,
            t: 4 * u + 1,
            y: 4 * u + 2,
            z: 4 * u + 3,
        }
    }

    pub fn members(&self) -> [VertexId; 4] {
        [self.x, self.t, self.y, self.z]
    }
}

#[derive(Clone, Debug)]
pub struct BipHookArtifact {
    pub gamma: Graph,
    pub blocks: Vec<Block>,
}

impl BipHookArtifact {
    pub fn registry_json(&self) -> String {
        serde_json::to_string_pretty(&self.blocks).expect("plain data")
    }
}

/// Builds the 4-cycle blow-up. Side labels follow the input: `x, y` of an
/// A-vertex and `t, z` of a B-vertex go to side A.
pub fn build_biphook(g: &Graph, require_connected: bool) -> Result<BipHookArtifact, BipHookError> {
    if require_connected && !g.is_connected() {
        return Err(BipHookError::Disconnected);
    }
    let n = g.len();
    let mut gamma = match g.sides() {
        Some(sides) => {
            let mut s = Vec::with_capacity(4 * n);
            for &side in sides {
                let o = side.opposite();
                s.extend([side, o, side, o]);
            }
            Graph::bipartite(s)
        }
        None => Graph::new(4 * n),
    };
    let blocks: Vec<Block> = (0..n).map(Block::of).collect();
    for (u, b) in blocks.iter().enumerate() {
        let base = g.label(u);
        for (v, tag) in b.members().into_iter().zip(["x", "t", "y", "z"]) {
            gamma.set_name(v, format!("{tag}_{base}"));
        }
        for (p, q) in [(b.x, b.t), (b.t, b.y), (b.y, b.z), (b.z, b.x)] {
            gamma.add_edge(p, q).expect("fresh cycle edge");
        }
    }
    for &(u, v) in g.edges() {
        let (bu, bv) = (blocks[u], blocks[v]);
        for p in [bu.x, bu.y] {
            for q in [bv.x, bv.y] {
                gamma.add_edge(p, q).expect("fresh cross edge");
            }
        }
    }
    Ok(BipHookArtifact { gamma, blocks })
}

/// Block type: which stick side the 4-cycle imitates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BlockType {
    A,
    B,
}

impl From<Side> for BlockType {
    fn from(s: Side) -> Self {
        match s {
            Side::A => BlockType::A,
            Side::B => BlockType::B,
        }
    }
}

impl fmt::Display for BlockType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BlockType::A => "A",
            BlockType::B => "B",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FourCycleType {
    pub kind: BlockType,
    pub case: u8,
}

/// Center order inside a block, as offsets into `[x, t, y, z]`.
/// Type B keeps the arms of `x, y` horizontal and long, type A vertical.
pub const TYPE_B_TEMPLATE: [usize; 4] = [0, 3, 2, 1];
pub const TYPE_A_TEMPLATE: [usize; 4] = [1, 2, 3, 0];

fn template(side: Side) -> [usize; 4] {
    match side {
        Side::A => TYPE_A_TEMPLATE,
        Side::B => TYPE_B_TEMPLATE,
    }
}

/// Classifies a 4-cycle from the positions of `x, t, y, z`.
///
/// Cases 1 and 2 have one of `t, z` between `x` and `y`, the other one after
/// (case 1) or before (case 2). Cases 3 and 4 have both after (3) or both
/// before (4). Cases 1 and 3 are type B.
pub fn classify_positions(pos: [usize; 4]) -> Option<FourCycleType> {
    let [x, t, y, z] = pos;
    let (lo, hi) = (x.min(y), x.max(y));
    let inside = |p: usize| lo < p && p < hi;
    let case = match (inside(t), inside(z)) {
        (true, true) => return None,
        (true, false) | (false, true) => {
            let other = if inside(t) { z } else { t };
            if other > hi {
                1
            } else {
                2
            }
        }
        (false, false) => {
            if t > hi && z > hi {
                3
            } else if t < lo && z < lo {
                4
            } else {
                return None;
            }
        }
    };
    let kind = if case % 2 == 1 { BlockType::B } else { BlockType::A };
    Some(FourCycleType { kind, case })
}

/// Classifies the hooks of one block; `hooks` lists `x, t, y, z` in that
/// order and must realize exactly the 4-cycle among themselves.
pub fn classify_four_cycle(hooks: &[crate::geometry::VertexGeom; 4]) -> Result<FourCycleType, BipHookError> {
    let sub = Geometry {
        model: Model::Hook,
        vertices: hooks.to_vec(),
    };
    let c4 = crate::graph::families::cycle(4);
    if !verify_geometry(&sub, &c4)?.matches {
        return Err(BipHookError::BadHookGeometry);
    }
    let ord = sub.order();
    classify_positions([ord.pos(0), ord.pos(1), ord.pos(2), ord.pos(3)]).ok_or(BipHookError::BadHookGeometry)
}

/// Expands a stick representation of `g` into a hook representation of
/// `art.gamma`. The vertex at position `i` becomes four centers at slots
/// `5i..5i+3`, arranged by the template of its side.
pub fn stick_to_hooks(g: &Graph, art: &BipHookArtifact, stick: &Geometry) -> Result<Geometry, BipHookError> {
    let sides = g.sides().ok_or(BipHookError::MissingSides)?;
    if stick.model != Model::Stick || !verify_geometry(stick, g)?.matches {
        return Err(BipHookError::BadStickGeometry);
    }
    let order = stick.order();
    let mut seq = Vec::with_capacity(4 * g.len());
    let mut slots = vec![0usize; 4 * g.len()];
    for (i, &u) in order.sequence().iter().enumerate() {
        let members = art.blocks[u].members();
        for (k, &off) in template(sides[u]).iter().enumerate() {
            seq.push(members[off]);
            slots[members[off]] = 5 * i + k;
        }
    }
    let hook_order = VertexOrder::from_sequence(seq).expect("blocks partition the vertices");
    let report = check_order(&art.gamma, &hook_order, Model::Hook).expect("unlabeled hooks");
    let reaches = report.reaches.ok_or(BipHookError::BadStickGeometry)?;
    // reaches are order positions; translate them to slots
    let slot_of_pos = |p: usize| slots[hook_order.sequence()[p]];
    let forward: Vec<Option<usize>> = reaches.forward.iter().map(|r| r.map(slot_of_pos)).collect();
    let back: Vec<Option<usize>> = reaches.back.iter().map(|r| r.map(slot_of_pos)).collect();
    Ok(Geometry::from_slots(Model::Hook, &slots, &forward, &back, art.gamma.names()))
}

/// Per-vertex block classification read off a hook order.
pub fn classify_blocks(art: &BipHookArtifact, order: &VertexOrder) -> Result<Vec<FourCycleType>, BipHookError> {
    art.blocks
        .iter()
        .enumerate()
        .map(|(u, b)| {
            classify_positions([order.pos(b.x), order.pos(b.t), order.pos(b.y), order.pos(b.z)])
                .ok_or(BipHookError::NotAFourCycle(u))
        })
        .collect()
}

/// Recovers a stick order of `g` from a hook representation of `art.gamma`.
pub fn hooks_to_stick(g: &Graph, art: &BipHookArtifact, hooks: &Geometry) -> Result<VertexOrder, BipHookError> {
    let sides = g.sides().ok_or(BipHookError::MissingSides)?;
    if !g.is_connected() {
        return Err(BipHookError::Disconnected);
    }
    if !verify_geometry(hooks, &art.gamma)?.matches {
        return Err(BipHookError::BadHookGeometry);
    }
    hook_order_to_stick(g, art, &hooks.order(), sides)
}

/// Order-level core of [`hooks_to_stick`], for orders that are already known
/// to be hook representations of `art.gamma`.
pub fn hook_order_to_stick(
    g: &Graph,
    art: &BipHookArtifact,
    order: &VertexOrder,
    sides: &[Side],
) -> Result<VertexOrder, BipHookError> {
    let types = classify_blocks(art, order)?;
    for &(u, v) in g.edges() {
        if types[u].kind == types[v].kind {
            return Err(BipHookError::Alternation(u, v));
        }
    }
    let direct = g.is_empty() || BlockType::from(sides[0]) == types[0].kind;
    // type-B blocks are read at their first x/y center, type-A at their last
    let key = |u: VertexId| {
        let b = art.blocks[u];
        let (p, q) = (order.pos(b.x), order.pos(b.y));
        match types[u].kind {
            BlockType::B => p.min(q),
            BlockType::A => p.max(q),
        }
    };
    let mut seq: Vec<VertexId> = (0..g.len()).collect();
    seq.sort_by_key(|&u| key(u));
    if !direct {
        seq.reverse();
    }
    let out = VertexOrder::from_sequence(seq).expect("permutation");
    if check_order(g, &out, Model::Stick).map(|r| r.feasible).unwrap_or(false) {
        Ok(out)
    } else {
        Err(BipHookError::Unrecovered)
    }
}

/// `|V(Γ)|` and `|E(Γ)|` predicted from `g`.
pub fn predicted_counts(g: &Graph) -> (usize, usize) {
    (4 * g.len(), 4 * g.len() + 4 * g.edge_count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::realize;
    use crate::graph::families;
    use crate::recognizer::{recognize, GraphClass, SearchOptions};
    use itertools::Itertools;

    fn witness(g: &Graph) -> Geometry {
        recognize(g, GraphClass::Stick, &SearchOptions::default()).unwrap().witness.unwrap().geometry
    }

    #[test]
    fn counts_on_small_inputs() {
        let k2 = build_biphook(&families::k2(), true).unwrap();
        assert_eq!((k2.gamma.len(), k2.gamma.edge_count()), (8, 12));
        let single = Graph::bipartite(vec![Side::A]);
        let one = build_biphook(&single, true).unwrap();
        assert_eq!((one.gamma.len(), one.gamma.edge_count()), (4, 4));
        let c4 = families::even_cycle(2);
        let art = build_biphook(&c4, true).unwrap();
        assert_eq!((art.gamma.len(), art.gamma.edge_count()), (16, 32));
        assert_eq!(predicted_counts(&c4), (16, 32));
    }

    #[test]
    fn blocks_are_chordless_and_sides_proper() {
        let g = families::even_cycle(3);
        let art = build_biphook(&g, true).unwrap();
        assert!(art.gamma.is_bipartite_labeled());
        for &(u, v) in art.gamma.edges() {
            assert_ne!(art.gamma.side(u), art.gamma.side(v));
        }
        for b in &art.blocks {
            assert!(!art.gamma.adjacent(b.x, b.y));
            assert!(!art.gamma.adjacent(b.t, b.z));
        }
    }

    #[test]
    fn disconnected_rejected_when_required() {
        let g = Graph::bipartite(vec![Side::A, Side::B]);
        assert_eq!(build_biphook(&g, true).unwrap_err(), BipHookError::Disconnected);
        assert!(build_biphook(&g, false).is_ok());
    }

    #[test]
    fn templates_classify_to_their_side() {
        let place = |tpl: [usize; 4]| {
            let mut pos = [0; 4];
            for (k, &off) in tpl.iter().enumerate() {
                pos[off] = k;
            }
            pos
        };
        assert_eq!(classify_positions(place(TYPE_B_TEMPLATE)).unwrap().kind, BlockType::B);
        assert_eq!(classify_positions(place(TYPE_A_TEMPLATE)).unwrap().kind, BlockType::A);
    }

    #[test]
    fn classification_is_symmetric() {
        for p in (0..4).permutations(4) {
            let pos = [p[0], p[1], p[2], p[3]];
            let c = classify_positions(pos);
            assert_eq!(c, classify_positions([pos[2], pos[1], pos[0], pos[3]]));
            assert_eq!(c, classify_positions([pos[0], pos[3], pos[2], pos[1]]));
        }
    }

    #[test]
    fn forward_direction_matches_gamma() {
        for g in [families::k2(), families::even_cycle(3), Graph::bipartite(vec![Side::B])] {
            let art = build_biphook(&g, true).unwrap();
            let hooks = stick_to_hooks(&g, &art, &witness(&g)).unwrap();
            let check = verify_geometry(&hooks, &art.gamma).unwrap();
            assert!(check.matches && check.touchings.is_empty(), "{check:?}");
            let order = hooks_to_stick(&g, &art, &hooks).unwrap();
            assert!(check_order(&g, &order, Model::Stick).unwrap().feasible);
        }
    }

    #[test]
    fn emitted_blocks_carry_their_side_type() {
        let g = families::even_cycle(2);
        let art = build_biphook(&g, true).unwrap();
        let hooks = stick_to_hooks(&g, &art, &witness(&g)).unwrap();
        for (u, b) in art.blocks.iter().enumerate() {
            let quad = [b.x, b.t, b.y, b.z].map(|v| hooks.vertices[v].clone());
            let ty = classify_four_cycle(&quad).unwrap();
            assert_eq!(ty.kind, BlockType::from(g.side(u).unwrap()));
        }
    }

    #[test]
    fn mirrored_hooks_still_recover() {
        let g = families::even_cycle(3);
        let art = build_biphook(&g, true).unwrap();
        let hooks = stick_to_hooks(&g, &art, &witness(&g)).unwrap().mirrored();
        assert!(verify_geometry(&hooks, &art.gamma).unwrap().matches);
        let order = hooks_to_stick(&g, &art, &hooks).unwrap();
        assert!(check_order(&g, &order, Model::Stick).unwrap().feasible);
    }

    #[test]
    fn same_type_neighbors_rejected() {
        let g = families::k2();
        let art = build_biphook(&g, true).unwrap();
        // both blocks laid out as type B, one after the other
        let b0 = art.blocks[0];
        let b1 = art.blocks[1];
        let seq = vec![b0.x, b0.z, b0.y, b0.t, b1.x, b1.z, b1.y, b1.t];
        let order = VertexOrder::from_sequence(seq).unwrap();
        let sides = g.sides().unwrap().to_vec();
        assert_eq!(hook_order_to_stick(&g, &art, &order, &sides).unwrap_err(), BipHookError::Alternation(0, 1));
    }

    #[test]
    fn bad_stick_geometry_rejected() {
        let g = families::k2();
        let art = build_biphook(&g, true).unwrap();
        let order = VertexOrder::from_sequence(vec![0, 1]).unwrap();
        let reaches = crate::feasibility::extremal_reaches(&g, &order, Model::Stick).unwrap();
        let mut geom = realize(&g, &order, &reaches, Model::Stick).unwrap();
        geom.vertices[1].vertical_tip = Some(-3);
        assert_eq!(stick_to_hooks(&g, &art, &geom).unwrap_err(), BipHookError::BadStickGeometry);
    }
}
