//! Floor plans and the nearest-wall angular decomposition.
//!
//! Seen from a probe point, each direction is blocked by the first wall a ray
//! hits. The azimuth circle is cut at every wall endpoint and every
//! wall-wall crossing; between two consecutive cuts the first-hit wall cannot
//! change, so one ray through the middle of each interval decides its owner.
//! Each maximal run owned by one wall becomes a [`ToyModel`].

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::closedform::ToyModel;

/// Relative tolerance under which two hit distances count as equal.
const TIE_REL: f64 = 1e-12;
/// Events closer than this (rad) are merged.
const EVENT_MERGE: f64 = 1e-13;
/// TM angles are kept this far inside ±π/2.
const EDGE_CLAMP: f64 = 2e-9;
/// Tolerance for [`enclosure_check`] [rad].
pub const ENCLOSURE_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("wall {id} has zero length")]
    DegenerateWall { id: u32 },
    #[error("wall id {0} appears more than once")]
    DuplicateWallId(u32),
    #[error("room {id}: {reason}")]
    InvalidRoom { id: String, reason: String },
    #[error("probe ({x}, {y}) is {distance:.4} m from wall {wall_id}, closer than the {margin} m margin")]
    ProbeTooClose { x: f64, y: f64, wall_id: u32, distance: f64, margin: f64 },
    #[error("non-finite coordinate in {0}")]
    NonFinite(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y)
    }
    fn cross(self, o: Self) -> f64 {
        self.x * o.y - self.y * o.x
    }
    fn dot(self, o: Self) -> f64 {
        self.x * o.x + self.y * o.y
    }
    fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }
    fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WallSegment {
    pub id: u32,
    pub a: Point,
    pub b: Point,
}

impl WallSegment {
    pub fn new(id: u32, a: Point, b: Point) -> Self {
        Self { id, a, b }
    }

    pub fn length(&self) -> f64 {
        self.b.sub(self.a).norm()
    }

    /// Euclidean distance from `p` to the closed segment.
    pub fn distance_to(&self, p: Point) -> f64 {
        let d = self.b.sub(self.a);
        let t = (p.sub(self.a).dot(d) / d.dot(d)).clamp(0.0, 1.0);
        let q = Point::new(self.a.x + t * d.x, self.a.y + t * d.y);
        p.sub(q).norm()
    }

    /// Distance along the ray `origin + t·(cos φ, sin φ)` to this wall, if hit.
    pub fn ray_hit(&self, origin: Point, azimuth: f64) -> Option<f64> {
        let u = Point::new(azimuth.cos(), azimuth.sin());
        let d = self.b.sub(self.a);
        let denom = u.cross(d);
        if denom == 0.0 {
            return None;
        }
        let w = self.a.sub(origin);
        let t = w.cross(d) / denom;
        let s = w.cross(u) / denom;
        (t > 0.0 && (0.0..=1.0).contains(&s)).then_some(t)
    }

    /// Whether the open segment `p → q` crosses this wall.
    pub fn blocks(&self, p: Point, q: Point) -> bool {
        let r = q.sub(p);
        let d = self.b.sub(self.a);
        let denom = r.cross(d);
        if denom == 0.0 {
            return false;
        }
        let w = self.a.sub(p);
        let t = w.cross(d) / denom;
        let s = w.cross(r) / denom;
        t > 0.0 && t < 1.0 && (0.0..=1.0).contains(&s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Room {
    pub id: String,
    pub vertices: Vec<Point>,
}

impl Room {
    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        let twice: f64 = (0..n)
            .map(|i| self.vertices[i].cross(self.vertices[(i + 1) % n]))
            .sum();
        0.5 * twice.abs()
    }

    fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    fn on_boundary(&self, p: Point, tol: f64) -> bool {
        self.edges().any(|(a, b)| WallSegment::new(0, a, b).distance_to(p) <= tol)
    }

    /// Even-odd crossing test; boundary handling is the caller's job.
    fn contains(&self, p: Point) -> bool {
        let mut inside = false;
        for (a, b) in self.edges() {
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                if p.x < x {
                    inside = !inside;
                }
            }
        }
        inside
    }
}

fn segments_cross(a: Point, b: Point, c: Point, d: Point) -> Option<Point> {
    let r = b.sub(a);
    let s = d.sub(c);
    let denom = r.cross(s);
    if denom == 0.0 {
        return None;
    }
    let w = c.sub(a);
    let t = w.cross(s) / denom;
    let u = w.cross(r) / denom;
    ((0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u))
        .then(|| Point::new(a.x + t * r.x, a.y + t * r.y))
}

fn validate_room(room: &Room) -> Result<(), GeometryError> {
    let bad = |reason: &str| GeometryError::InvalidRoom { id: room.id.clone(), reason: reason.into() };
    let n = room.vertices.len();
    if n < 3 {
        return Err(bad("needs at least 3 vertices"));
    }
    if room.vertices.iter().any(|v| !v.is_finite()) {
        return Err(GeometryError::NonFinite(format!("room {}", room.id)));
    }
    if room.area() <= 0.0 {
        return Err(bad("has zero area"));
    }
    let edges: Vec<_> = room.edges().collect();
    for i in 0..n {
        if edges[i].0 == edges[i].1 {
            return Err(bad("has a repeated vertex"));
        }
        for j in i + 1..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                continue;
            }
            if segments_cross(edges[i].0, edges[i].1, edges[j].0, edges[j].1).is_some() {
                return Err(bad("polygon is self-intersecting"));
            }
        }
    }
    Ok(())
}

/// Axis-aligned extent [m].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub min: Point,
    pub max: Point,
}

impl Bounds {
    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }
    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }
    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }
}

/// A validated floor plan.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    walls: Vec<WallSegment>,
    rooms: Vec<Room>,
    bounds: Bounds,
    crossings: Vec<Point>,
}

impl Layout {
    pub fn new(walls: Vec<WallSegment>, rooms: Vec<Room>) -> Result<Self, GeometryError> {
        let mut ids = std::collections::HashSet::new();
        for w in &walls {
            if !(w.a.is_finite() && w.b.is_finite()) {
                return Err(GeometryError::NonFinite(format!("wall {}", w.id)));
            }
            if w.length() == 0.0 {
                return Err(GeometryError::DegenerateWall { id: w.id });
            }
            if !ids.insert(w.id) {
                return Err(GeometryError::DuplicateWallId(w.id));
            }
        }
        for r in &rooms {
            validate_room(r)?;
        }
        let pts = walls
            .iter()
            .flat_map(|w| [w.a, w.b])
            .chain(rooms.iter().flat_map(|r| r.vertices.iter().copied()));
        let mut min = Point::new(f64::INFINITY, f64::INFINITY);
        let mut max = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in pts {
            min = Point::new(min.x.min(p.x), min.y.min(p.y));
            max = Point::new(max.x.max(p.x), max.y.max(p.y));
        }
        if !min.x.is_finite() {
            min = Point::new(0.0, 0.0);
            max = min;
        }
        let mut crossings = Vec::new();
        for (i, w) in walls.iter().enumerate() {
            for v in &walls[i + 1..] {
                if let Some(p) = segments_cross(w.a, w.b, v.a, v.b) {
                    crossings.push(p);
                }
            }
        }
        Ok(Self { walls, rooms, bounds: Bounds { min, max }, crossings })
    }

    /// Closed polygon: one wall per edge (ids from 0) and one room `id`.
    pub fn from_polygon(id: &str, vertices: &[Point]) -> Result<Self, GeometryError> {
        let n = vertices.len();
        let walls = (0..n)
            .map(|i| WallSegment::new(i as u32, vertices[i], vertices[(i + 1) % n]))
            .collect();
        Self::new(walls, vec![Room { id: id.to_string(), vertices: vertices.to_vec() }])
    }

    /// `width × height` rectangle with its lower-left corner at the origin.
    pub fn rectangle(width: f64, height: f64) -> Result<Self, GeometryError> {
        Self::from_polygon(
            "room",
            &[
                Point::new(0.0, 0.0),
                Point::new(width, 0.0),
                Point::new(width, height),
                Point::new(0.0, height),
            ],
        )
    }

    pub fn walls(&self) -> &[WallSegment] {
        &self.walls
    }
    pub fn rooms(&self) -> &[Room] {
        &self.rooms
    }
    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    /// Wall-wall intersection points (including shared endpoints).
    pub fn crossings(&self) -> &[Point] {
        &self.crossings
    }

    /// First wall hit along a ray: `(wall id, distance)`. Equal distances
    /// resolve to the smaller id.
    pub fn first_hit(&self, origin: Point, azimuth: f64) -> Option<(u32, f64)> {
        let mut best: Option<(u32, f64)> = None;
        for w in &self.walls {
            let Some(t) = w.ray_hit(origin, azimuth) else { continue };
            best = match best {
                None => Some((w.id, t)),
                Some((id, bt)) => {
                    if t < bt * (1.0 - TIE_REL) || ((t - bt).abs() <= TIE_REL * bt && w.id < id) {
                        Some((w.id, t))
                    } else {
                        Some((id, bt))
                    }
                }
            };
        }
        best
    }

    pub fn wall(&self, id: u32) -> Option<&WallSegment> {
        self.walls.iter().find(|w| w.id == id)
    }

    /// Nearest wall to `p` and its distance.
    pub fn nearest_wall(&self, p: Point) -> Option<(u32, f64)> {
        self.walls
            .iter()
            .map(|w| (w.id, w.distance_to(p)))
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
    }
}

/// Interval of global azimuth `[start, end)` in radians; `end` may exceed 2π
/// for intervals wrapping through 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngularSpan {
    pub start: f64,
    pub end: f64,
}

impl AngularSpan {
    pub fn width(&self) -> f64 {
        self.end - self.start
    }
    pub fn contains(&self, azimuth: f64) -> bool {
        let a = (azimuth - self.start).rem_euclid(TAU);
        a < self.width()
    }
}

/// Toy models seen from one probe point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TmDecomposition {
    pub tms: Vec<ToyModel>,
    /// Owning wall id of each toy model.
    pub owners: Vec<u32>,
    /// Global azimuth span of each toy model.
    pub spans: Vec<AngularSpan>,
    /// Total azimuth owned by some wall [rad].
    pub covered: f64,
    /// Directions in which no wall is hit.
    pub gaps: Vec<AngularSpan>,
}

impl TmDecomposition {
    /// Owning wall of a global azimuth, if any.
    pub fn owner_of(&self, azimuth: f64) -> Option<u32> {
        self.spans
            .iter()
            .zip(&self.owners)
            .find(|(s, _)| s.contains(azimuth))
            .map(|(_, &id)| id)
    }
}

fn azimuth_of(from: Point, to: Point) -> f64 {
    let d = to.sub(from);
    d.y.atan2(d.x).rem_euclid(TAU)
}

/// Decomposes the view from `probe` into toy models.
pub fn decompose(layout: &Layout, probe: Point, margin: f64) -> Result<TmDecomposition, GeometryError> {
    if !probe.is_finite() {
        return Err(GeometryError::NonFinite("probe".into()));
    }
    if let Some((wall_id, distance)) = layout.nearest_wall(probe) {
        if distance < margin {
            return Err(GeometryError::ProbeTooClose { x: probe.x, y: probe.y, wall_id, distance, margin });
        }
    }
    let mut events: Vec<f64> = layout
        .walls
        .iter()
        .flat_map(|w| [azimuth_of(probe, w.a), azimuth_of(probe, w.b)])
        .chain(layout.crossings.iter().map(|&c| azimuth_of(probe, c)))
        .collect();
    if events.is_empty() {
        return Ok(TmDecomposition {
            tms: vec![],
            owners: vec![],
            spans: vec![],
            covered: 0.0,
            gaps: vec![AngularSpan { start: 0.0, end: TAU }],
        });
    }
    events.sort_by(f64::total_cmp);
    events.dedup_by(|b, a| *b - *a < EVENT_MERGE);
    if events.len() > 1 && events[0] + TAU - events[events.len() - 1] < EVENT_MERGE {
        events.pop();
    }

    // Owner of each elementary interval, then merged into maximal runs.
    let n = events.len();
    let mut runs: Vec<(Option<u32>, AngularSpan)> = Vec::with_capacity(n);
    for i in 0..n {
        let start = events[i];
        let end = if i + 1 < n { events[i + 1] } else { events[0] + TAU };
        let owner = layout.first_hit(probe, 0.5 * (start + end)).map(|(id, _)| id);
        match runs.last_mut() {
            Some((o, span)) if *o == owner => span.end = end,
            _ => runs.push((owner, AngularSpan { start, end })),
        }
    }
    if runs.len() > 1 && runs[0].0 == runs[runs.len() - 1].0 {
        let (_, last) = runs.pop().expect("len > 1");
        runs[0].1.start = last.start - TAU;
    }
    if runs.len() == 1 {
        // Single owner all the way round.
        let start = runs[0].1.start.rem_euclid(TAU);
        runs[0].1 = AngularSpan { start, end: start + TAU };
    }

    let mut out = TmDecomposition { tms: vec![], owners: vec![], spans: vec![], covered: 0.0, gaps: vec![] };
    for (owner, mut span) in runs {
        if span.start < 0.0 {
            span.start += TAU;
            span.end += TAU;
        }
        let Some(id) = owner else {
            out.gaps.push(span);
            continue;
        };
        out.covered += span.width();
        let wall = layout.wall(id).expect("owner is a layout wall");
        if let Some(tm) = toy_model_for(wall, probe, span) {
            out.tms.push(tm);
            out.owners.push(id);
            out.spans.push(span);
        }
    }
    Ok(out)
}

fn toy_model_for(wall: &WallSegment, probe: Point, span: AngularSpan) -> Option<ToyModel> {
    let d = wall.b.sub(wall.a);
    let t = probe.sub(wall.a).dot(d) / d.dot(d);
    let foot = Point::new(wall.a.x + t * d.x, wall.a.y + t * d.y);
    let d0 = foot.sub(probe).norm();
    if d0 == 0.0 {
        return None;
    }
    let phi_perp = azimuth_of(probe, foot);
    let theta_l = (span.start - phi_perp + PI).rem_euclid(TAU) - PI;
    let theta_r = theta_l + span.width();
    let lim = FRAC_PI_2 - EDGE_CLAMP;
    let (theta_l, theta_r) = (theta_l.max(-lim), theta_r.min(lim));
    if theta_l >= theta_r {
        return None;
    }
    Some(ToyModel { d0, theta_l, theta_r, phi_perp })
}

/// Every direction from the probe meets a wall.
pub fn enclosure_check(d: &TmDecomposition) -> bool {
    (d.covered - TAU).abs() <= ENCLOSURE_TOL
}

/// Room containing `probe`; points on any room boundary belong to none.
pub fn point_in_room(layout: &Layout, probe: Point) -> Option<&str> {
    const BOUNDARY_TOL: f64 = 1e-9;
    if layout.rooms.iter().any(|r| r.on_boundary(probe, BOUNDARY_TOL)) {
        return None;
    }
    layout.rooms.iter().find(|r| r.contains(probe)).map(|r| r.id.as_str())
}
