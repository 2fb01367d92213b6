//! Explicit coordinates for stick and hook representations.
//!
//! All coordinates live on a quarter-integer grid and are stored scaled by 4
//! as `i64`, so every predicate is exact integer arithmetic. The origin of
//! the vertex at slot `i` is `(i, -i)`. A horizontal arm reaching slot `ρ`
//! ends at `x = ρ + 1/4`, a vertical arm reaching slot `λ` ends at
//! `y = -λ + 1/4`.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::feasibility::{arms, FeasibilityError, Model, ReachAssignment, VertexOrder};
use crate::graph::{Graph, VertexId};

/// Grid units per unit length.
pub const SCALE: i64 = 4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("vertices {0} and {1} share an origin")]
    CoincidentOrigins(VertexId, VertexId),
    #[error("origin of vertex {0} is off the ground line")]
    OffGroundLine(VertexId),
    #[error("arm of vertex {0} points the wrong way")]
    ReversedArm(VertexId),
    #[error("geometry has {got} vertices, graph has {expected}")]
    WrongLength { expected: usize, got: usize },
    #[error("coordinate {0} is not a multiple of 0.25")]
    OffGrid(f64),
    #[error("vertex ids must be 0..n in order (found {0})")]
    BadId(usize),
    #[error("reaches do not fit the order")]
    InconsistentReaches,
    #[error(transparent)]
    Feasibility(#[from] FeasibilityError),
    #[error("geometry json: {0}")]
    Json(String),
}

/// One vertex: origin on the ground line plus optional arm tips, all in
/// quarter units.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VertexGeom {
    pub origin: (i64, i64),
    /// x-coordinate of the horizontal tip.
    pub horizontal_tip: Option<i64>,
    /// y-coordinate of the vertical tip.
    pub vertical_tip: Option<i64>,
    pub name: Option<String>,
}

impl VertexGeom {
    fn horizontal(&self) -> Option<Seg> {
        self.horizontal_tip.map(|x| Seg {
            x0: self.origin.0,
            y0: self.origin.1,
            x1: x,
            y1: self.origin.1,
        })
    }

    fn vertical(&self) -> Option<Seg> {
        self.vertical_tip.map(|y| Seg {
            x0: self.origin.0,
            y0: self.origin.1,
            x1: self.origin.0,
            y1: y,
        })
    }

    fn segments(&self) -> impl Iterator<Item = Seg> {
        self.horizontal().into_iter().chain(self.vertical())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Geometry {
    pub model: Model,
    pub vertices: Vec<VertexGeom>,
}

/// Axis-aligned segment with `x0 ≤ x1`, `y0 ≤ y1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Seg {
    x0: i64,
    y0: i64,
    x1: i64,
    y1: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Contact {
    None,
    Cross,
    Touch,
}

impl Seg {
    fn contact(&self, o: &Seg) -> Contact {
        let (lx, hx) = (self.x0.max(o.x0), self.x1.min(o.x1));
        let (ly, hy) = (self.y0.max(o.y0), self.y1.min(o.y1));
        if lx > hx || ly > hy {
            return Contact::None;
        }
        // overlapping collinear pieces, or a meeting point that is an endpoint
        if lx != hx || ly != hy {
            return Contact::Touch;
        }
        let p = (lx, ly);
        if self.is_endpoint(p) || o.is_endpoint(p) {
            Contact::Touch
        } else {
            Contact::Cross
        }
    }

    fn is_endpoint(&self, p: (i64, i64)) -> bool {
        p == (self.x0, self.y0) || p == (self.x1, self.y1)
    }

    /// L∞ distance between two axis-aligned segments.
    fn linf_distance(&self, o: &Seg) -> i64 {
        let dx = (o.x0 - self.x1).max(self.x0 - o.x1).max(0);
        let dy = (o.y0 - self.y1).max(self.y0 - o.y1).max(0);
        dx.max(dy)
    }
}

/// Whether the drawings of two vertices share a point (closed segments).
pub fn vertices_meet(a: &VertexGeom, b: &VertexGeom) -> bool {
    a.segments()
        .any(|x| b.segments().any(|y| x.contact(&y) != Contact::None))
}

/// Result of comparing a geometry with a graph.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeometryCheck {
    pub matches: bool,
    /// Edges of the graph whose vertices do not meet.
    pub missing: Vec<(VertexId, VertexId)>,
    /// Meeting pairs that are not edges.
    pub spurious: Vec<(VertexId, VertexId)>,
    /// Meeting pairs where some contact is only a touching (counted as
    /// meeting).
    pub touchings: Vec<(VertexId, VertexId)>,
}

impl Geometry {
    /// Builds a geometry from per-vertex slots and reach slots. Slots need
    /// not be contiguous.
    pub fn from_slots(
        model: Model,
        slots: &[usize],
        forward: &[Option<usize>],
        back: &[Option<usize>],
        names: &[Option<String>],
    ) -> Geometry {
        let vertices = slots
            .iter()
            .enumerate()
            .map(|(v, &s)| {
                let s = s as i64;
                VertexGeom {
                    origin: (SCALE * s, -SCALE * s),
                    horizontal_tip: forward[v].map(|r| SCALE * r as i64 + 1),
                    vertical_tip: back[v].map(|l| -SCALE * l as i64 + 1),
                    name: names.get(v).cloned().flatten(),
                }
            })
            .collect();
        Geometry { model, vertices }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Vertices sorted by origin along the ground line.
    pub fn order(&self) -> VertexOrder {
        let mut seq: Vec<VertexId> = (0..self.len()).collect();
        seq.sort_by_key(|&v| (self.vertices[v].origin.0, v));
        VertexOrder::from_sequence(seq).unwrap()
    }

    /// Mirror along the ground line: reverse the origin order and swap the
    /// arm directions. Stick A and B roles swap; hook arms swap.
    pub fn mirrored(&self) -> Geometry {
        let max_x = self.vertices.iter().map(|v| v.origin.0).max().unwrap_or(0);
        // reflection across the line x - y = max_x sends (x, y) to (y + max_x, x - max_x)
        let vertices = self
            .vertices
            .iter()
            .map(|v| {
                let (x, y) = v.origin;
                let origin = (y + max_x, x - max_x);
                VertexGeom {
                    origin,
                    horizontal_tip: v.vertical_tip.map(|ty| ty + max_x),
                    vertical_tip: v.horizontal_tip.map(|tx| tx - max_x),
                    name: v.name.clone(),
                }
            })
            .collect();
        Geometry {
            model: self.model,
            vertices,
        }
    }

    fn validate(&self) -> Result<(), GeometryError> {
        let mut seen = std::collections::BTreeMap::new();
        for (v, vg) in self.vertices.iter().enumerate() {
            let (x, y) = vg.origin;
            if x != -y {
                return Err(GeometryError::OffGroundLine(v));
            }
            if let Some(u) = seen.insert(x, v) {
                return Err(GeometryError::CoincidentOrigins(u, v));
            }
            if vg.horizontal_tip.is_some_and(|t| t < x) || vg.vertical_tip.is_some_and(|t| t < y) {
                return Err(GeometryError::ReversedArm(v));
            }
        }
        Ok(())
    }

    /// Pairs of distinct vertices whose drawings meet, with a flag telling
    /// whether all contacts are transversal crossings.
    pub fn meetings(&self) -> Result<Vec<(VertexId, VertexId, bool)>, GeometryError> {
        self.validate()?;
        let segs: Vec<Vec<Seg>> = self.vertices.iter().map(|v| v.segments().collect()).collect();
        let mut out = Vec::new();
        for u in 0..segs.len() {
            for v in u + 1..segs.len() {
                let mut met = false;
                let mut clean = true;
                for a in &segs[u] {
                    for b in &segs[v] {
                        match a.contact(b) {
                            Contact::None => {}
                            Contact::Cross => met = true,
                            Contact::Touch => {
                                met = true;
                                clean = false;
                            }
                        }
                    }
                }
                if met {
                    out.push((u, v, clean));
                }
            }
        }
        Ok(out)
    }

    /// Smallest L∞ distance, in quarter units, between drawings of
    /// non-adjacent vertices; `None` when every pair is adjacent.
    pub fn clearance(&self, g: &Graph) -> Option<i64> {
        let segs: Vec<Vec<Seg>> = self.vertices.iter().map(|v| v.segments().collect()).collect();
        let mut best: Option<i64> = None;
        for u in 0..segs.len() {
            for v in u + 1..segs.len() {
                if g.adjacent(u, v) {
                    continue;
                }
                for a in &segs[u] {
                    for b in &segs[v] {
                        let d = a.linf_distance(b);
                        best = Some(best.map_or(d, |x| x.min(d)));
                    }
                }
            }
        }
        best
    }

    pub fn to_json(&self) -> GeometryJson {
        GeometryJson {
            model: self.model,
            vertices: self
                .vertices
                .iter()
                .enumerate()
                .map(|(id, v)| VertexJson {
                    id,
                    name: v.name.clone(),
                    origin: [units(v.origin.0), units(v.origin.1)],
                    horizontal_tip: v.horizontal_tip.map(units),
                    vertical_tip: v.vertical_tip.map(units),
                })
                .collect(),
        }
    }

    pub fn from_json(j: &GeometryJson) -> Result<Geometry, GeometryError> {
        let mut vertices = Vec::with_capacity(j.vertices.len());
        for (i, v) in j.vertices.iter().enumerate() {
            if v.id != i {
                return Err(GeometryError::BadId(v.id));
            }
            vertices.push(VertexGeom {
                origin: (quarters(v.origin[0])?, quarters(v.origin[1])?),
                horizontal_tip: v.horizontal_tip.map(quarters).transpose()?,
                vertical_tip: v.vertical_tip.map(quarters).transpose()?,
                name: v.name.clone(),
            });
        }
        Ok(Geometry {
            model: j.model,
            vertices,
        })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("geometry serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Geometry, GeometryError> {
        let j: GeometryJson = serde_json::from_str(s).map_err(|e| GeometryError::Json(e.to_string()))?;
        Geometry::from_json(&j)
    }
}

fn units(q: i64) -> f64 {
    q as f64 / SCALE as f64
}

fn quarters(x: f64) -> Result<i64, GeometryError> {
    let q = x * SCALE as f64;
    if !q.is_finite() || q.fract() != 0.0 || q.abs() > 1e15 {
        return Err(GeometryError::OffGrid(x));
    }
    Ok(q as i64)
}

/// Serialized form; coordinates in plain units (multiples of 0.25).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometryJson {
    pub model: Model,
    pub vertices: Vec<VertexJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexJson {
    pub id: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub origin: [f64; 2],
    #[serde(default)]
    pub horizontal_tip: Option<f64>,
    #[serde(default)]
    pub vertical_tip: Option<f64>,
}

/// Coordinates for `order` with `reaches`; arms follow the model.
pub fn realize(g: &Graph, order: &VertexOrder, reaches: &ReachAssignment, model: Model) -> Result<Geometry, GeometryError> {
    if order.len() != g.len() {
        return Err(GeometryError::WrongLength {
            expected: g.len(),
            got: order.len(),
        });
    }
    if !reaches.is_consistent_with(order) {
        return Err(GeometryError::InconsistentReaches);
    }
    let n = g.len();
    let mut forward = vec![None; n];
    let mut back = vec![None; n];
    for v in 0..n {
        let (h, vert) = arms(g, v, model);
        if h {
            forward[v] = Some(reaches.forward[v].unwrap_or(order.pos(v)));
        }
        if vert {
            back[v] = Some(reaches.back[v].unwrap_or(order.pos(v)));
        }
    }
    Ok(Geometry::from_slots(model, order.positions(), &forward, &back, g.names()))
}

/// Compares the intersection graph of `geom` with `g`.
pub fn verify_geometry(geom: &Geometry, g: &Graph) -> Result<GeometryCheck, GeometryError> {
    if geom.len() != g.len() {
        return Err(GeometryError::WrongLength {
            expected: g.len(),
            got: geom.len(),
        });
    }
    let meetings = geom.meetings()?;
    let mut met = BTreeSet::new();
    let mut check = GeometryCheck::default();
    for &(u, v, clean) in &meetings {
        met.insert((u, v));
        if !clean {
            check.touchings.push((u, v));
        }
        if !g.adjacent(u, v) {
            check.spurious.push((u, v));
        }
    }
    for &(u, v) in g.edges() {
        if !met.contains(&(u, v)) {
            check.missing.push((u, v));
        }
    }
    check.matches = check.missing.is_empty() && check.spurious.is_empty();
    Ok(check)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SvgOptions {
    /// Pixels per unit length.
    pub scale: u32,
    pub labels: bool,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions { scale: 40, labels: true }
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// SVG drawing: one `line` for the ground line and one per arm.
pub fn render_svg(geom: &Geometry, opts: &SvgOptions) -> String {
    let s = opts.scale as i64;
    // quarter units to pixels; SVG y grows downward
    let px = |q: i64| q * s / SCALE;
    let mut lo_x = 0i64;
    let mut hi_x = 0i64;
    let mut lo_y = 0i64;
    let mut hi_y = 0i64;
    for v in &geom.vertices {
        let (x, y) = v.origin;
        lo_x = lo_x.min(x);
        hi_x = hi_x.max(v.horizontal_tip.unwrap_or(x)).max(x);
        lo_y = lo_y.min(y);
        hi_y = hi_y.max(v.vertical_tip.unwrap_or(y)).max(y);
    }
    let pad = SCALE;
    let (lo_x, hi_x, lo_y, hi_y) = (lo_x - pad, hi_x + pad, lo_y - pad, hi_y + pad);
    let width = px(hi_x - lo_x);
    let height = px(hi_y - lo_y);
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="{} {} {width} {height}">"#,
        px(lo_x),
        px(-hi_y)
    );
    // ground line y = -x across the box
    let g0 = lo_x.max(-hi_y);
    let g1 = hi_x.min(-lo_y);
    let _ = writeln!(
        out,
        r##"  <line class="ground" x1="{}" y1="{}" x2="{}" y2="{}" stroke="#888" stroke-dasharray="4 3"/>"##,
        px(g0),
        px(g0),
        px(g1),
        px(g1)
    );
    for (id, v) in geom.vertices.iter().enumerate() {
        let (x, y) = v.origin;
        if let Some(t) = v.horizontal_tip {
            let _ = writeln!(
                out,
                r##"  <line class="arm horizontal" data-vertex="{id}" x1="{}" y1="{}" x2="{}" y2="{}" stroke="#c0392b" stroke-width="2"/>"##,
                px(x),
                px(-y),
                px(t),
                px(-y)
            );
        }
        if let Some(t) = v.vertical_tip {
            let _ = writeln!(
                out,
                r##"  <line class="arm vertical" data-vertex="{id}" x1="{}" y1="{}" x2="{}" y2="{}" stroke="#2471a3" stroke-width="2"/>"##,
                px(x),
                px(-y),
                px(x),
                px(-t)
            );
        }
        if opts.labels {
            let label = v.name.clone().unwrap_or_else(|| id.to_string());
            let _ = writeln!(
                out,
                r#"  <text x="{}" y="{}" font-size="{}" font-family="sans-serif">{}</text>"#,
                px(x) + s / 8,
                px(-y) + s / 3,
                (s / 3).max(6),
                escape(&label)
            );
        }
    }
    out.push_str("</svg>\n");
    out
}
