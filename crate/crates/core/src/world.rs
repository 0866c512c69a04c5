//! The plant model: rectangular zones and their topological graph, the Bezier
//! segment roadmap, and the queries both composite planners are built from.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    point_in_polygon_even_odd, wrap_angle, BezierCurve, Direction, Point, Polygon, Pose,
    VehicleParams,
};
use crate::grid_map::{default_margin, CollisionChecker, GridMap};
use crate::path::{Path, Provenance};

pub type ZoneId = String;
pub type EndpointId = u32;
pub type NodeId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZoneKind {
    MachineArea,
    Corridor,
}

/// Axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct Rect {
    pub min: Point,
    pub max: Point,
}

impl From<[f64; 4]> for Rect {
    fn from([x0, y0, x1, y1]: [f64; 4]) -> Self {
        Rect {
            min: Point::new(x0, y0),
            max: Point::new(x1, y1),
        }
    }
}

impl From<Rect> for [f64; 4] {
    fn from(r: Rect) -> Self {
        [r.min.x, r.min.y, r.max.x, r.max.y]
    }
}

impl Rect {
    pub fn center(&self) -> Point {
        self.min.lerp(self.max, 0.5)
    }

    pub fn area(&self) -> f64 {
        (self.max.x - self.min.x) * (self.max.y - self.min.y)
    }

    pub fn polygon(&self) -> Result<Polygon> {
        Polygon::rectangle(self.min, self.max)
    }

    /// Closed containment with tolerance.
    pub fn contains(&self, p: Point, tol: f64) -> bool {
        p.x >= self.min.x - tol
            && p.x <= self.max.x + tol
            && p.y >= self.min.y - tol
            && p.y <= self.max.y + tol
    }

    pub fn on_boundary(&self, p: Point, tol: f64) -> bool {
        self.contains(p, tol)
            && ((p.x - self.min.x).abs() <= tol
                || (p.x - self.max.x).abs() <= tol
                || (p.y - self.min.y).abs() <= tol
                || (p.y - self.max.y).abs() <= tol)
    }

    /// Euclidean distance from `p` to the closed rectangle.
    pub fn distance(&self, p: Point) -> f64 {
        let dx = (self.min.x - p.x).max(0.0).max(p.x - self.max.x);
        let dy = (self.min.y - p.y).max(0.0).max(p.y - self.max.y);
        dx.hypot(dy)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RectZone {
    pub id: ZoneId,
    pub kind: ZoneKind,
    pub rect: Rect,
    polygon: Polygon,
}

impl RectZone {
    pub fn new(id: impl Into<ZoneId>, kind: ZoneKind, rect: Rect) -> Result<Self> {
        let id = id.into();
        if !(rect.area() > 0.0) || rect.max.x <= rect.min.x || rect.max.y <= rect.min.y {
            return Err(Error::InvalidInput(format!("zone {id} has non-positive area")));
        }
        Ok(Self {
            polygon: rect.polygon()?,
            id,
            kind,
            rect,
        })
    }

    pub fn polygon(&self) -> &Polygon {
        &self.polygon
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopoEdge {
    pub a: ZoneId,
    pub b: ZoneId,
    pub weight: f64,
    /// Free-space opening on the shared border.
    pub connection: [Point; 2],
}

impl TopoEdge {
    pub fn midpoint(&self) -> Point {
        self.connection[0].lerp(self.connection[1], 0.5)
    }

    fn joins(&self, x: &str, y: &str) -> bool {
        (self.a == x && self.b == y) || (self.a == y && self.b == x)
    }
}

/// Zones as nodes, traversable adjacencies as weighted undirected edges.
#[derive(Debug, Clone, PartialEq)]
pub struct TopologicalGraph {
    zones: Vec<RectZone>,
    edges: Vec<TopoEdge>,
}

const BORDER_TOL: f64 = 1e-6;

impl TopologicalGraph {
    /// `weight: None` defaults to the centroid-to-centroid distance.
    pub fn new(zones: Vec<RectZone>, edges: Vec<(ZoneId, ZoneId, Option<f64>, [Point; 2])>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for z in &zones {
            if !seen.insert(z.id.clone()) {
                return Err(Error::InvalidInput(format!("duplicate zone id {}", z.id)));
            }
        }
        let mut graph = Self {
            zones,
            edges: Vec::new(),
        };
        for (a, b, weight, connection) in edges {
            let (za, zb) = match (graph.zone(&a), graph.zone(&b)) {
                (Some(za), Some(zb)) => (za, zb),
                (None, _) => return Err(Error::InvalidInput(format!("edge references unknown zone {a}"))),
                (_, None) => return Err(Error::InvalidInput(format!("edge references unknown zone {b}"))),
            };
            if a == b {
                return Err(Error::InvalidInput(format!("edge {a}-{b} is a self loop")));
            }
            for p in connection {
                if !za.rect.on_boundary(p, BORDER_TOL) || !zb.rect.on_boundary(p, BORDER_TOL) {
                    return Err(Error::InvalidInput(format!(
                        "connection point ({:.3}, {:.3}) of edge {a}-{b} is not on the shared border",
                        p.x, p.y
                    )));
                }
            }
            if connection[0].distance(connection[1]) <= BORDER_TOL {
                return Err(Error::InvalidInput(format!("connection of edge {a}-{b} has zero width")));
            }
            let weight = weight.unwrap_or_else(|| za.rect.center().distance(zb.rect.center()));
            if !(weight > 0.0) || !weight.is_finite() {
                return Err(Error::InvalidInput(format!("edge {a}-{b} weight must be > 0")));
            }
            if graph.edge(&a, &b).is_some() {
                return Err(Error::InvalidInput(format!("duplicate edge {a}-{b}")));
            }
            graph.edges.push(TopoEdge {
                a,
                b,
                weight,
                connection,
            });
        }
        Ok(graph)
    }

    pub fn zones(&self) -> &[RectZone] {
        &self.zones
    }

    pub fn edges(&self) -> &[TopoEdge] {
        &self.edges
    }

    pub fn zone(&self, id: &str) -> Option<&RectZone> {
        self.zones.iter().find(|z| z.id == id)
    }

    pub fn edge(&self, a: &str, b: &str) -> Option<&TopoEdge> {
        self.edges.iter().find(|e| e.joins(a, b))
    }

    /// Neighbors of a zone with the connecting edge weight, in edge order.
    pub fn neighbors<'a>(&'a self, id: &'a str) -> impl Iterator<Item = (&'a str, f64)> + 'a {
        self.edges.iter().filter_map(move |e| {
            if e.a == id {
                Some((e.b.as_str(), e.weight))
            } else if e.b == id {
                Some((e.a.as_str(), e.weight))
            } else {
                None
            }
        })
    }

    /// First zone, in declaration order, whose rectangle contains `p` by the
    /// Even-Odd rule.
    pub fn locate_area(&self, p: Point) -> Result<&ZoneId> {
        self.zones
            .iter()
            .find(|z| point_in_polygon_even_odd(p, z.polygon()))
            .map(|z| &z.id)
            .ok_or(Error::OutsideAllZones(p.x, p.y))
    }

    /// Minimum-weight zone sequence, endpoints included. Equal-cost routes
    /// resolve to the lexicographically smallest id sequence.
    pub fn area_sequence(&self, start: &str, goal: &str) -> Result<Vec<ZoneId>> {
        for id in [start, goal] {
            if self.zone(id).is_none() {
                return Err(Error::InvalidInput(format!("unknown zone {id}")));
            }
        }

        #[derive(PartialEq)]
        struct Label {
            cost: f64,
            seq: Vec<ZoneId>,
        }
        impl Eq for Label {}
        impl Ord for Label {
            fn cmp(&self, o: &Self) -> Ordering {
                o.cost.total_cmp(&self.cost).then_with(|| o.seq.cmp(&self.seq))
            }
        }
        impl PartialOrd for Label {
            fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
                Some(self.cmp(o))
            }
        }

        let better = |cost: f64, seq: &Vec<ZoneId>, best: Option<&Label>| match best {
            None => true,
            Some(b) => {
                let tol = 1e-9 * b.cost.abs().max(1.0);
                cost < b.cost - tol || (cost <= b.cost + tol && *seq < b.seq)
            }
        };

        let mut best: BTreeMap<ZoneId, Label> = BTreeMap::new();
        let mut done: BTreeSet<ZoneId> = BTreeSet::new();
        let mut heap = BinaryHeap::new();
        let init = Label {
            cost: 0.0,
            seq: vec![start.to_string()],
        };
        heap.push(Label {
            cost: 0.0,
            seq: init.seq.clone(),
        });
        best.insert(start.to_string(), init);

        while let Some(Label { cost, seq }) = heap.pop() {
            let here = seq.last().unwrap().clone();
            if done.contains(&here) || best.get(&here).map_or(false, |b| b.seq != seq) {
                continue;
            }
            if here == goal {
                return Ok(seq);
            }
            done.insert(here.clone());
            for (nb, w) in self.neighbors(&here) {
                if done.contains(nb) {
                    continue;
                }
                let c = cost + w;
                let mut s = seq.clone();
                s.push(nb.to_string());
                if better(c, &s, best.get(nb)) {
                    best.insert(
                        nb.to_string(),
                        Label {
                            cost: c,
                            seq: s.clone(),
                        },
                    );
                    heap.push(Label { cost: c, seq: s });
                }
            }
        }
        Err(Error::NoRoute {
            from: start.to_string(),
            to: goal.to_string(),
        })
    }

    /// Total weight of consecutive zones in a sequence.
    pub fn sequence_cost(&self, seq: &[ZoneId]) -> Option<f64> {
        seq.windows(2)
            .map(|w| self.edge(&w[0], &w[1]).map(|e| e.weight))
            .sum()
    }

    /// The corridor zones of an area sequence, order preserved.
    pub fn corridors_sequence(&self, areas: &[ZoneId]) -> Vec<ZoneId> {
        areas
            .iter()
            .filter(|id| {
                self.zone(id)
                    .map_or(false, |z| z.kind == ZoneKind::Corridor)
            })
            .cloned()
            .collect()
    }

    /// One waypoint per consecutive zone pair, at the middle of the pair's
    /// connection interval, facing across the border toward the later zone.
    pub fn waypoints_sequence(&self, areas: &[ZoneId]) -> Result<Vec<Pose>> {
        areas
            .windows(2)
            .map(|w| {
                let (a, b) = (&w[0], &w[1]);
                let edge = self.edge(a, b).ok_or_else(|| Error::NoRoute {
                    from: a.clone(),
                    to: b.clone(),
                })?;
                let mid = edge.midpoint();
                let along = edge.connection[1] - edge.connection[0];
                let mut normal = Point::new(-along.y, along.x);
                let toward = self.zone(b).unwrap().rect.center() - self.zone(a).unwrap().rect.center();
                if normal.dot(toward) < 0.0 {
                    normal = -normal;
                }
                Ok(Pose::new(mid.x, mid.y, normal.angle()))
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentRole {
    Corridor,
    MachineEntry,
    MachineExit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentEndpoint {
    pub id: EndpointId,
    pub pose: Pose,
}

/// A fixed roadmap curve travelled in one direction.
#[derive(Debug, Clone, PartialEq)]
pub struct BezierSegment {
    pub curve: BezierCurve,
    pub direction: Direction,
    pub start_ep: EndpointId,
    pub end_ep: EndpointId,
    pub role: SegmentRole,
    pub zone: ZoneId,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MachineNode {
    pub id: NodeId,
    pub pose: Pose,
    /// Segment indices, in travel order, from the node to the detachment endpoint.
    pub exit_chain: Vec<usize>,
    /// Segment indices, in travel order, from the attach endpoint to the node.
    pub entry_chain: Vec<usize>,
}

const ENDPOINT_TOL: f64 = 1e-6;

/// Endpoints, segments, and per-machine exit/entry chains. Two segments are
/// adjacent exactly when they share an endpoint id.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentGraph {
    endpoints: BTreeMap<EndpointId, SegmentEndpoint>,
    segments: Vec<BezierSegment>,
    nodes: BTreeMap<NodeId, MachineNode>,
}

impl SegmentGraph {
    pub fn new(
        endpoints: Vec<SegmentEndpoint>,
        segments: Vec<BezierSegment>,
        nodes: Vec<MachineNode>,
    ) -> Result<Self> {
        let mut eps = BTreeMap::new();
        for ep in endpoints {
            if eps.insert(ep.id, ep).is_some() {
                return Err(Error::InvalidInput(format!("duplicate endpoint id {}", ep.id)));
            }
        }
        for (i, s) in segments.iter().enumerate() {
            for (which, id, at) in [("start", s.start_ep, s.curve.start()), ("end", s.end_ep, s.curve.end())] {
                let ep = eps.get(&id).ok_or_else(|| {
                    Error::InvalidInput(format!("segment {i} references unknown endpoint {id}"))
                })?;
                if ep.pose.position().distance(at) > ENDPOINT_TOL {
                    return Err(Error::InvalidInput(format!(
                        "segment {i} {which} does not coincide with endpoint {id}"
                    )));
                }
            }
            if s.start_ep == s.end_ep {
                return Err(Error::InvalidInput(format!("segment {i} starts and ends at endpoint {}", s.start_ep)));
            }
            if s.direction == Direction::Reverse && s.role != SegmentRole::MachineEntry {
                return Err(Error::InvalidInput(format!(
                    "segment {i} is reverse but not a machine entry"
                )));
            }
        }
        let mut node_map = BTreeMap::new();
        for n in nodes {
            let check_chain = |chain: &[usize], role: SegmentRole, label: &str| -> Result<()> {
                for &i in chain {
                    let s = segments.get(i).ok_or_else(|| {
                        Error::InvalidInput(format!("node {} {label} chain references unknown segment {i}", n.id))
                    })?;
                    if s.role != role {
                        return Err(Error::InvalidInput(format!(
                            "node {} {label} chain segment {i} has role {:?}",
                            n.id, s.role
                        )));
                    }
                }
                for w in chain.windows(2) {
                    if segments[w[0]].end_ep != segments[w[1]].start_ep {
                        return Err(Error::InvalidInput(format!(
                            "node {} {label} chain breaks between segments {} and {}",
                            n.id, w[0], w[1]
                        )));
                    }
                }
                Ok(())
            };
            check_chain(&n.exit_chain, SegmentRole::MachineExit, "exit")?;
            check_chain(&n.entry_chain, SegmentRole::MachineEntry, "entry")?;
            if let Some(&first) = n.exit_chain.first() {
                if segments[first].curve.start().distance(n.pose.position()) > ENDPOINT_TOL {
                    return Err(Error::InvalidInput(format!(
                        "node {} exit chain does not start at the node pose",
                        n.id
                    )));
                }
            }
            if let Some(&last) = n.entry_chain.last() {
                if segments[last].curve.end().distance(n.pose.position()) > ENDPOINT_TOL {
                    return Err(Error::InvalidInput(format!(
                        "node {} entry chain does not end at the node pose",
                        n.id
                    )));
                }
            }
            let id = n.id;
            if node_map.insert(id, n).is_some() {
                return Err(Error::InvalidInput(format!("duplicate machine node {id}")));
            }
        }
        Ok(Self {
            endpoints: eps,
            segments,
            nodes: node_map,
        })
    }

    pub fn endpoints(&self) -> impl Iterator<Item = &SegmentEndpoint> + '_ {
        self.endpoints.values()
    }

    pub fn endpoint(&self, id: EndpointId) -> Option<&SegmentEndpoint> {
        self.endpoints.get(&id)
    }

    pub fn segments(&self) -> &[BezierSegment] {
        &self.segments
    }

    pub fn nodes(&self) -> impl Iterator<Item = &MachineNode> + '_ {
        self.nodes.values()
    }

    pub fn node(&self, id: NodeId) -> Result<&MachineNode> {
        self.nodes.get(&id).ok_or(Error::UnknownNode(id))
    }

    /// Segments touching an endpoint.
    pub fn segments_at(&self, ep: EndpointId) -> Vec<usize> {
        self.segments
            .iter()
            .enumerate()
            .filter(|(_, s)| s.start_ep == ep || s.end_ep == ep)
            .map(|(i, _)| i)
            .collect()
    }

    /// Segments sharing at least one endpoint with `seg`.
    pub fn adjacent(&self, seg: usize) -> Vec<usize> {
        let s = &self.segments[seg];
        self.segments
            .iter()
            .enumerate()
            .filter(|&(j, t)| {
                j != seg
                    && (t.start_ep == s.start_ep
                        || t.start_ep == s.end_ep
                        || t.end_ep == s.start_ep
                        || t.end_ep == s.end_ep)
            })
            .map(|(j, _)| j)
            .collect()
    }

    /// The `(detachment, attach)` endpoint ids of a machine node.
    pub fn node_markers(&self, id: NodeId) -> Result<(EndpointId, EndpointId)> {
        let n = self.node(id)?;
        let detach = n
            .exit_chain
            .last()
            .map(|&i| self.segments[i].end_ep)
            .ok_or_else(|| Error::RoadmapIncomplete(format!("node {id} has no exit chain")))?;
        let attach = n
            .entry_chain
            .first()
            .map(|&i| self.segments[i].start_ep)
            .ok_or_else(|| Error::RoadmapIncomplete(format!("node {id} has no entry chain")))?;
        Ok((detach, attach))
    }

    /// Corridor-role segments of a zone ordered into a chain by following
    /// shared endpoints from the end that no other segment leads into.
    pub fn corridor_chain(&self, zone: &str) -> Result<Vec<usize>> {
        let members: Vec<usize> = self
            .segments
            .iter()
            .enumerate()
            .filter(|(_, s)| s.role == SegmentRole::Corridor && s.zone == zone)
            .map(|(i, _)| i)
            .collect();
        if members.is_empty() {
            return Err(Error::RoadmapIncomplete(format!(
                "corridor {zone} has no corridor segments"
            )));
        }
        let head = members
            .iter()
            .copied()
            .find(|&i| {
                !members
                    .iter()
                    .any(|&j| self.segments[j].end_ep == self.segments[i].start_ep)
            })
            .unwrap_or(members[0]);
        let mut chain = vec![head];
        loop {
            let tail = self.segments[*chain.last().unwrap()].end_ep;
            match members
                .iter()
                .copied()
                .find(|&j| self.segments[j].start_ep == tail && !chain.contains(&j))
            {
                Some(next) => chain.push(next),
                None => break,
            }
        }
        Ok(chain)
    }

    /// Samples a chain of segments in the given order. With `flip`, each
    /// segment is traversed from its end to its start, keeping its direction
    /// flag.
    pub fn sample_chain(&self, chain: &[usize], ds: f64, flip: bool) -> Result<Path> {
        let mut points = Vec::new();
        for &i in chain {
            let s = &self.segments[i];
            let curve = if flip { s.curve.reversed() } else { s.curve.clone() };
            let samples = curve.sample(ds, s.direction)?;
            let skip = usize::from(!points.is_empty());
            points.extend(
                Path::from_samples(&samples[skip..], Provenance::FixedSegment).points,
            );
        }
        Ok(Path::new(points))
    }
}

/// Raster metadata for the occupancy grid a world is drawn on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridMeta {
    pub pgm: String,
    pub resolution: f64,
    pub origin: Point,
    pub occupied_threshold: u8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct World {
    pub topo: TopologicalGraph,
    pub seg_graph: SegmentGraph,
    pub vehicle: VehicleParams,
    pub grid_meta: GridMeta,
}

impl World {
    pub fn new(
        topo: TopologicalGraph,
        seg_graph: SegmentGraph,
        vehicle: VehicleParams,
        grid_meta: GridMeta,
    ) -> Result<Self> {
        vehicle.validate()?;
        for (i, s) in seg_graph.segments().iter().enumerate() {
            if topo.zone(&s.zone).is_none() {
                return Err(Error::InvalidInput(format!(
                    "segment {i} references unknown zone {}",
                    s.zone
                )));
            }
        }
        Ok(Self {
            topo,
            seg_graph,
            vehicle,
            grid_meta,
        })
    }

    pub fn zones(&self) -> &[RectZone] {
        self.topo.zones()
    }

    /// Spacing used when sampling fixed segments: half a grid cell.
    pub fn sample_step(&self) -> f64 {
        self.grid_meta.resolution / 2.0
    }

    pub fn locate_area(&self, p: Point) -> Result<&ZoneId> {
        self.topo.locate_area(p)
    }

    pub fn area_sequence(&self, start: &str, goal: &str) -> Result<Vec<ZoneId>> {
        self.topo.area_sequence(start, goal)
    }

    /// The fixed path out of a machine and the pose where it ends.
    pub fn find_exit_path(&self, node: NodeId) -> Result<(Path, Pose)> {
        let n = self.seg_graph.node(node)?;
        if n.exit_chain.is_empty() {
            return Err(Error::RoadmapIncomplete(format!("node {node} has no exit chain")));
        }
        let path = self.seg_graph.sample_chain(&n.exit_chain, self.sample_step(), false)?;
        let detach = path.last().unwrap().pose;
        Ok((path, detach))
    }

    /// The fixed path into a machine and the pose where it begins.
    pub fn find_entry_path(&self, node: NodeId) -> Result<(Path, Pose)> {
        let n = self.seg_graph.node(node)?;
        if n.entry_chain.is_empty() {
            return Err(Error::RoadmapIncomplete(format!("node {node} has no entry chain")));
        }
        let path = self.seg_graph.sample_chain(&n.entry_chain, self.sample_step(), false)?;
        let attach = path.first().unwrap().pose;
        Ok((path, attach))
    }

    /// Corridor centerline chains for every corridor in an area sequence, in
    /// travel order, plus the ordered list of their entry and exit poses.
    /// A chain authored against the direction of travel is traversed from
    /// its end; whichever chain end lies closer to the preceding zone (or
    /// farther from the following one) becomes the entry.
    pub fn corridors_path(&self, areas: &[ZoneId]) -> Result<(Vec<Path>, Vec<Pose>)> {
        let mut parts = Vec::new();
        let mut endpoints = Vec::new();
        for (k, id) in areas.iter().enumerate() {
            let zone = self
                .topo
                .zone(id)
                .ok_or_else(|| Error::InvalidInput(format!("unknown zone {id}")))?;
            if zone.kind != ZoneKind::Corridor {
                continue;
            }
            let chain = self.seg_graph.corridor_chain(id)?;
            let segs = self.seg_graph.segments();
            let head = segs[chain[0]].curve.start();
            let tail = segs[*chain.last().unwrap()].curve.end();
            let flip = if k > 0 {
                let prev = &self.topo.zone(&areas[k - 1]).unwrap().rect;
                prev.distance(tail) < prev.distance(head)
            } else if k + 1 < areas.len() {
                let next = &self.topo.zone(&areas[k + 1]).unwrap().rect;
                next.distance(head) < next.distance(tail)
            } else {
                false
            };
            let ordered: Vec<usize> = if flip {
                chain.iter().rev().copied().collect()
            } else {
                chain
            };
            let path = self
                .seg_graph
                .sample_chain(&ordered, self.sample_step(), flip)?;
            endpoints.push(path.first().unwrap().pose);
            endpoints.push(path.last().unwrap().pose);
            parts.push(path);
        }
        Ok((parts, endpoints))
    }

    pub fn waypoints_sequence(&self, areas: &[ZoneId]) -> Result<Vec<Pose>> {
        self.topo.waypoints_sequence(areas)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Collision,
    Curvature,
    Tangent,
    ConnectionBlocked,
}

impl CheckKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckKind::Collision => "collision",
            CheckKind::Curvature => "curvature",
            CheckKind::Tangent => "tangent",
            CheckKind::ConnectionBlocked => "connection_blocked",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subject {
    Segment(usize),
    Joint {
        endpoint: EndpointId,
        segments: (usize, usize),
    },
    Connection {
        a: ZoneId,
        b: ZoneId,
    },
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subject::Segment(i) => write!(f, "segment={i}"),
            Subject::Joint {
                endpoint,
                segments: (a, b),
            } => write!(f, "segment={a}/{b} endpoint={endpoint}"),
            Subject::Connection { a, b } => write!(f, "connection={a}-{b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub subject: Subject,
    pub check: CheckKind,
    pub value: f64,
    pub threshold: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} check={} value={:.6} threshold={:.6}",
            self.subject,
            self.check.as_str(),
            self.value,
            self.threshold
        )
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub segments_checked: usize,
    pub joints_checked: usize,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} segments={} joints={} violations={}",
            if self.passed() { "PASSED" } else { "FAILED" },
            self.segments_checked,
            self.joints_checked,
            self.violations.len()
        )?;
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

pub const TANGENT_TOLERANCE: f64 = 1e-2;

/// Mismatch between two tangent lines, ignoring orientation: a cusp where
/// the vehicle reverses along the same line counts as continuous.
pub fn tangent_mismatch(a: f64, b: f64) -> f64 {
    let d = wrap_angle(a - b).abs();
    d.min(PI - d)
}

/// Checks every roadmap segment for collisions, curvature above the vehicle
/// limit, tangent breaks at shared endpoints, and blocked zone connections.
pub fn validate_roadmap(world: &World, grid: &GridMap) -> ValidationReport {
    let checker = CollisionChecker::new(grid, world.vehicle, default_margin(grid));
    let ds = world.sample_step();
    let kmax = world.vehicle.max_curvature();
    let segs = world.seg_graph.segments();
    let mut report = ValidationReport {
        segments_checked: segs.len(),
        ..Default::default()
    };

    for (i, s) in segs.iter().enumerate() {
        if let Ok(samples) = s.curve.sample(ds, s.direction) {
            let hits = samples.iter().filter(|(p, _)| checker.collides(p)).count();
            if hits > 0 {
                report.violations.push(Violation {
                    subject: Subject::Segment(i),
                    check: CheckKind::Collision,
                    value: hits as f64,
                    threshold: 0.0,
                });
            }
        }
        let n = 400;
        let worst = (0..=n)
            .filter_map(|k| s.curve.curvature(k as f64 / n as f64).ok())
            .fold(0.0f64, |m, k| m.max(k.abs()));
        if worst > kmax * (1.0 + 1e-9) {
            report.violations.push(Violation {
                subject: Subject::Segment(i),
                check: CheckKind::Curvature,
                value: worst,
                threshold: kmax,
            });
        }
    }

    for ep in world.seg_graph.endpoints() {
        let touching = world.seg_graph.segments_at(ep.id);
        let tangents: Vec<(usize, f64)> = touching
            .iter()
            .filter_map(|&i| {
                let s = &segs[i];
                let t = if s.start_ep == ep.id { 0.0 } else { 1.0 };
                s.curve.tangent_angle(t).ok().map(|a| (i, a))
            })
            .collect();
        for x in 0..tangents.len() {
            for y in x + 1..tangents.len() {
                report.joints_checked += 1;
                let m = tangent_mismatch(tangents[x].1, tangents[y].1);
                if m > TANGENT_TOLERANCE {
                    report.violations.push(Violation {
                        subject: Subject::Joint {
                            endpoint: ep.id,
                            segments: (tangents[x].0, tangents[y].0),
                        },
                        check: CheckKind::Tangent,
                        value: m,
                        threshold: TANGENT_TOLERANCE,
                    });
                }
            }
        }
    }

    for e in world.topo.edges() {
        let free = grid
            .world_to_cell(e.midpoint())
            .map_or(false, |(ix, iy)| !grid.is_occupied(ix, iy));
        if !free {
            report.violations.push(Violation {
                subject: Subject::Connection {
                    a: e.a.clone(),
                    b: e.b.clone(),
                },
                check: CheckKind::ConnectionBlocked,
                value: 1.0,
                threshold: 0.0,
            });
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Rect {
        Rect::from([x0, y0, x1, y1])
    }

    fn zone(id: &str, kind: ZoneKind, r: Rect) -> RectZone {
        RectZone::new(id, kind, r).unwrap()
    }

    fn pt(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    fn chain_graph() -> TopologicalGraph {
        TopologicalGraph::new(
            vec![
                zone("A", ZoneKind::MachineArea, rect(0.0, 0.0, 5.0, 6.0)),
                zone("B", ZoneKind::Corridor, rect(5.0, 2.0, 8.0, 4.0)),
                zone("C", ZoneKind::MachineArea, rect(8.0, 0.0, 13.0, 6.0)),
            ],
            vec![
                ("A".into(), "B".into(), None, [pt(5.0, 2.0), pt(5.0, 4.0)]),
                ("B".into(), "C".into(), None, [pt(8.0, 2.0), pt(8.0, 4.0)]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn locate_area_cases() {
        let g = chain_graph();
        assert_eq!(g.locate_area(pt(2.5, 3.0)).unwrap(), "A");
        assert_eq!(g.locate_area(pt(6.5, 3.0)).unwrap(), "B");
        assert!(matches!(g.locate_area(pt(6.5, 5.0)), Err(Error::OutsideAllZones(..))));
        // On the A|B border: both rectangles contain it (closed), A is declared first.
        let p = pt(5.0, 3.0);
        assert!(g.zone("A").unwrap().rect.contains(p, 0.0));
        assert!(g.zone("B").unwrap().rect.contains(p, 0.0));
        assert_eq!(g.locate_area(p).unwrap(), "A");
    }

    #[test]
    fn area_sequence_chain_and_trivial() {
        let g = chain_graph();
        assert_eq!(g.area_sequence("A", "C").unwrap(), vec!["A", "B", "C"]);
        assert_eq!(g.area_sequence("C", "A").unwrap(), vec!["C", "B", "A"]);
        assert_eq!(g.area_sequence("B", "B").unwrap(), vec!["B"]);
        assert!(g.area_sequence("A", "Z").is_err());
    }

    #[test]
    fn area_sequence_disconnected() {
        let g = TopologicalGraph::new(
            vec![
                zone("A", ZoneKind::MachineArea, rect(0.0, 0.0, 1.0, 1.0)),
                zone("B", ZoneKind::MachineArea, rect(5.0, 0.0, 6.0, 1.0)),
            ],
            vec![],
        )
        .unwrap();
        assert!(matches!(g.area_sequence("A", "B"), Err(Error::NoRoute { .. })));
    }

    #[test]
    fn area_sequence_prefers_lighter_route_and_breaks_ties() {
        // Square of zones: A-B-D and A-C-D with explicit weights.
        let zones = vec![
            zone("A", ZoneKind::MachineArea, rect(0.0, 0.0, 2.0, 2.0)),
            zone("B", ZoneKind::Corridor, rect(2.0, 0.0, 4.0, 2.0)),
            zone("C", ZoneKind::Corridor, rect(0.0, 2.0, 2.0, 4.0)),
            zone("D", ZoneKind::MachineArea, rect(2.0, 2.0, 4.0, 4.0)),
        ];
        let edges = |wb: f64, wc: f64| {
            vec![
                ("A".into(), "B".into(), Some(wb), [pt(2.0, 0.5), pt(2.0, 1.5)]),
                ("B".into(), "D".into(), Some(1.0), [pt(2.5, 2.0), pt(3.5, 2.0)]),
                ("A".into(), "C".into(), Some(wc), [pt(0.5, 2.0), pt(1.5, 2.0)]),
                ("C".into(), "D".into(), Some(1.0), [pt(2.0, 2.5), pt(2.0, 3.5)]),
            ]
        };
        let g = TopologicalGraph::new(zones.clone(), edges(3.0, 1.0)).unwrap();
        assert_eq!(g.area_sequence("A", "D").unwrap(), vec!["A", "C", "D"]);
        let g = TopologicalGraph::new(zones, edges(2.0, 2.0)).unwrap();
        assert_eq!(g.area_sequence("A", "D").unwrap(), vec!["A", "B", "D"]);
    }

    #[test]
    fn default_weight_is_centroid_distance() {
        let g = chain_graph();
        let e = g.edge("A", "B").unwrap();
        assert!((e.weight - pt(2.5, 3.0).distance(pt(6.5, 3.0))).abs() < 1e-12);
    }

    #[test]
    fn edge_validation() {
        let zones = vec![
            zone("A", ZoneKind::MachineArea, rect(0.0, 0.0, 5.0, 6.0)),
            zone("B", ZoneKind::Corridor, rect(5.0, 2.0, 8.0, 4.0)),
        ];
        assert!(TopologicalGraph::new(
            zones.clone(),
            vec![("A".into(), "B".into(), None, [pt(4.0, 2.0), pt(4.0, 4.0)])]
        )
        .is_err());
        assert!(TopologicalGraph::new(
            zones.clone(),
            vec![("A".into(), "Q".into(), None, [pt(5.0, 2.0), pt(5.0, 4.0)])]
        )
        .is_err());
        assert!(TopologicalGraph::new(
            zones,
            vec![("A".into(), "B".into(), Some(-1.0), [pt(5.0, 2.0), pt(5.0, 4.0)])]
        )
        .is_err());
        assert!(RectZone::new("Z", ZoneKind::Corridor, rect(1.0, 1.0, 1.0, 3.0)).is_err());
    }

    #[test]
    fn corridors_sequence_filters() {
        let g = chain_graph();
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        assert_eq!(g.corridors_sequence(&s(&["A", "B", "C"])), s(&["B"]));
        assert_eq!(g.corridors_sequence(&s(&["A"])), Vec::<String>::new());
    }

    #[test]
    fn waypoints_at_connection_midpoints() {
        let g = TopologicalGraph::new(
            vec![
                zone("L", ZoneKind::MachineArea, rect(0.0, 0.0, 5.0, 6.0)),
                zone("R", ZoneKind::Corridor, rect(5.0, 0.0, 9.0, 6.0)),
            ],
            vec![("L".into(), "R".into(), None, [pt(5.0, 2.0), pt(5.0, 4.0)])],
        )
        .unwrap();
        let fwd = g.waypoints_sequence(&["L".into(), "R".into()]).unwrap();
        assert_eq!(fwd.len(), 1);
        assert!((fwd[0].x - 5.0).abs() < 1e-12 && (fwd[0].y - 3.0).abs() < 1e-12);
        assert!(fwd[0].theta.abs() < 1e-12);
        let back = g.waypoints_sequence(&["R".into(), "L".into()]).unwrap();
        assert_eq!(back[0].position(), fwd[0].position());
        assert!((back[0].theta - PI).abs() < 1e-12);
        assert!(g.waypoints_sequence(&["L".into()]).unwrap().is_empty());
        let g2 = chain_graph();
        assert!(matches!(
            g2.waypoints_sequence(&["A".into(), "C".into()]),
            Err(Error::NoRoute { .. })
        ));
    }

    #[test]
    fn tangent_mismatch_is_mod_pi() {
        assert!(tangent_mismatch(0.0, PI).abs() < 1e-12);
        assert!((tangent_mismatch(0.0, 0.5) - 0.5).abs() < 1e-12);
        assert!((tangent_mismatch(0.1, PI - 0.1) - 0.2).abs() < 1e-12);
    }
}
