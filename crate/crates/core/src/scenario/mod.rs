//! World and scenario files, path CSV, and SVG rendering.

mod path_csv;
mod svg;

pub use path_csv::{read_path_csv, write_path_csv};
pub use svg::{parts_from_provenance, render_svg};

use std::fs;
use std::path::{Path as FsPath, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BezierCurve, Direction, Point, Pose, VehicleParams};
use crate::grid_map::{load_grid, GridMap};
use crate::hybrid_astar::SearchOverrides;
use crate::planners::{PlanRequest, PlannerKind};
use crate::world::{
    validate_roadmap, BezierSegment, EndpointId, GridMeta, MachineNode, NodeId, Rect, RectZone,
    SegmentEndpoint, SegmentGraph, SegmentRole, TopologicalGraph, World, ZoneId, ZoneKind,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZoneEntry {
    pub id: ZoneId,
    pub kind: ZoneKind,
    pub rect: Rect,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeEntry {
    pub a: ZoneId,
    pub b: ZoneId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<f64>,
    pub connection: [Point; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentEntry {
    pub control_points: Vec<Point>,
    pub direction: Direction,
    pub start_ep: EndpointId,
    pub end_ep: EndpointId,
    pub role: SegmentRole,
    pub zone: ZoneId,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeEntry {
    pub id: NodeId,
    pub pose: Pose,
    pub exit_chain: Vec<usize>,
    pub entry_chain: Vec<usize>,
}

/// On-disk world model. Field order here is the canonical emit order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorldFile {
    pub grid: GridMeta,
    pub vehicle: VehicleParams,
    pub zones: Vec<ZoneEntry>,
    pub topo_edges: Vec<EdgeEntry>,
    pub endpoints: Vec<SegmentEndpoint>,
    pub segments: Vec<SegmentEntry>,
    pub machine_nodes: Vec<NodeEntry>,
}

impl WorldFile {
    pub fn into_world(self) -> Result<World> {
        let parse = |e: Error| match e {
            Error::InvalidInput(m) | Error::DegenerateTangent(m) => Error::Parse(m),
            other => other,
        };
        let zones = self
            .zones
            .into_iter()
            .map(|z| RectZone::new(z.id, z.kind, z.rect))
            .collect::<Result<Vec<_>>>()
            .map_err(parse)?;
        let edges = self
            .topo_edges
            .into_iter()
            .map(|e| (e.a, e.b, e.weight, e.connection))
            .collect();
        let topo = TopologicalGraph::new(zones, edges).map_err(parse)?;
        let segments = self
            .segments
            .into_iter()
            .enumerate()
            .map(|(i, s)| {
                let curve = BezierCurve::new(s.control_points)
                    .map_err(|e| Error::Parse(format!("segment {i}: {e}")))?;
                Ok(BezierSegment {
                    curve,
                    direction: s.direction,
                    start_ep: s.start_ep,
                    end_ep: s.end_ep,
                    role: s.role,
                    zone: s.zone,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let nodes = self
            .machine_nodes
            .into_iter()
            .map(|n| MachineNode {
                id: n.id,
                pose: n.pose,
                exit_chain: n.exit_chain,
                entry_chain: n.entry_chain,
            })
            .collect();
        let seg_graph = SegmentGraph::new(self.endpoints, segments, nodes).map_err(parse)?;
        World::new(topo, seg_graph, self.vehicle, self.grid).map_err(parse)
    }

    pub fn from_world(w: &World) -> Self {
        Self {
            grid: w.grid_meta.clone(),
            vehicle: w.vehicle,
            zones: w
                .zones()
                .iter()
                .map(|z| ZoneEntry {
                    id: z.id.clone(),
                    kind: z.kind,
                    rect: z.rect,
                })
                .collect(),
            topo_edges: w
                .topo
                .edges()
                .iter()
                .map(|e| EdgeEntry {
                    a: e.a.clone(),
                    b: e.b.clone(),
                    weight: Some(e.weight),
                    connection: e.connection,
                })
                .collect(),
            endpoints: w.seg_graph.endpoints().copied().collect(),
            segments: w
                .seg_graph
                .segments()
                .iter()
                .map(|s| SegmentEntry {
                    control_points: s.curve.control_points().to_vec(),
                    direction: s.direction,
                    start_ep: s.start_ep,
                    end_ep: s.end_ep,
                    role: s.role,
                    zone: s.zone.clone(),
                })
                .collect(),
            machine_nodes: w
                .seg_graph
                .nodes()
                .map(|n| NodeEntry {
                    id: n.id,
                    pose: n.pose,
                    exit_chain: n.exit_chain.clone(),
                    entry_chain: n.entry_chain.clone(),
                })
                .collect(),
        }
    }
}

fn json_error(source: &str, e: serde_json::Error) -> Error {
    Error::Parse(format!("{source}: line {} column {}: {e}", e.line(), e.column()))
}

/// Parses a world document without touching the raster.
pub fn parse_world(text: &str, source: &str) -> Result<World> {
    let file: WorldFile = serde_json::from_str(text).map_err(|e| json_error(source, e))?;
    file.into_world().map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{source}: {m}")),
        other => other,
    })
}

/// Canonical JSON text for a world.
pub fn emit_world(w: &World) -> String {
    let mut s = serde_json::to_string_pretty(&WorldFile::from_world(w)).expect("world serializes");
    s.push('\n');
    s
}

/// Resolves the raster path of a world relative to the directory of the
/// world file.
pub fn raster_path(world_file: &FsPath, w: &World) -> PathBuf {
    let p = FsPath::new(&w.grid_meta.pgm);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        world_file.parent().unwrap_or(FsPath::new(".")).join(p)
    }
}

pub fn load_world_grid(world_file: &FsPath, w: &World) -> Result<GridMap> {
    let raster = raster_path(world_file, w);
    let bytes = fs::read(&raster)?;
    load_grid(
        &bytes,
        w.grid_meta.resolution,
        w.grid_meta.origin,
        w.grid_meta.occupied_threshold,
    )
    .map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", raster.display())),
        other => other,
    })
}

/// Reads a world file and its raster. With `validate`, a roadmap that fails
/// [`validate_roadmap`] is rejected.
pub fn load_world(path: &FsPath, validate: bool) -> Result<(World, GridMap)> {
    let text = fs::read_to_string(path)?;
    let world = parse_world(&text, &path.display().to_string())?;
    let grid = load_world_grid(path, &world)?;
    if validate {
        let report = validate_roadmap(&world, &grid);
        if !report.passed() {
            return Err(Error::ValidationFailed(Box::new(report)));
        }
    }
    Ok((world, grid))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RequestEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub start_node: NodeId,
    pub goal_node: NodeId,
    pub planner: PlannerKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overrides: Option<SearchOverrides>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default)]
    pub seed: u64,
    /// Search parameter overrides applied to every request.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchOverrides>,
    pub requests: Vec<RequestEntry>,
}

/// A scenario request with its effective id and merged overrides.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedRequest {
    pub id: String,
    pub request: PlanRequest,
}

impl ScenarioFile {
    pub fn named_requests(&self) -> Vec<NamedRequest> {
        let base = self.search.clone().unwrap_or_default();
        self.requests
            .iter()
            .enumerate()
            .map(|(i, r)| NamedRequest {
                id: r
                    .id
                    .clone()
                    .unwrap_or_else(|| format!("req{:03}_{}_{}", i, r.start_node, r.goal_node)),
                request: PlanRequest {
                    start_node: r.start_node,
                    goal_node: r.goal_node,
                    planner: r.planner,
                    overrides: base.merged(&r.overrides.clone().unwrap_or_default()),
                },
            })
            .collect()
    }

    /// Checks that every node id resolves in `world`.
    pub fn check_nodes(&self, world: &World) -> Result<()> {
        for (i, r) in self.requests.iter().enumerate() {
            for id in [r.start_node, r.goal_node] {
                if world.seg_graph.node(id).is_err() {
                    return Err(Error::Parse(format!("request {i}: unknown machine node {id}")));
                }
            }
        }
        Ok(())
    }
}

pub fn parse_scenario(text: &str, source: &str) -> Result<ScenarioFile> {
    serde_json::from_str(text).map_err(|e| json_error(source, e))
}

pub fn load_scenario(path: &FsPath) -> Result<ScenarioFile> {
    parse_scenario(&fs::read_to_string(path)?, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    const WORLD: &str = r#"{
      "grid": {"pgm": "map.pgm", "resolution": 0.2, "origin": [0.0, 0.0], "occupied_threshold": 128},
      "vehicle": {"length": 1.2, "width": 0.7, "ref_offset": 0.3, "min_turn_radius": 1.5},
      "zones": [
        {"id": "A", "kind": "machine_area", "rect": [0, 0, 6, 6]},
        {"id": "B", "kind": "corridor", "rect": [6, 2, 10, 4]}
      ],
      "topo_edges": [{"a": "A", "b": "B", "connection": [[6, 2], [6, 4]]}],
      "endpoints": [{"id": 1, "pose": [6, 3, 0]}, {"id": 2, "pose": [10, 3, 0]}],
      "segments": [
        {"control_points": [[6, 3], [10, 3]], "direction": "forward", "start_ep": 1, "end_ep": 2,
         "role": "corridor", "zone": "B"}
      ],
      "machine_nodes": []
    }"#;

    #[test]
    fn parse_and_round_trip() {
        let w = parse_world(WORLD, "inline").unwrap();
        let once = emit_world(&w);
        let w2 = parse_world(&once, "emitted").unwrap();
        assert_eq!(w, w2);
        assert_eq!(emit_world(&w2), once);
    }

    #[test]
    fn unknown_endpoint_is_named() {
        let text = WORLD.replace("\"end_ep\": 2", "\"end_ep\": 9");
        match parse_world(&text, "inline") {
            Err(Error::Parse(m)) => assert!(m.contains("unknown endpoint 9"), "{m}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse_world("{\n  \"grid\": ,\n}", "bad.json") {
            Err(Error::Parse(m)) => assert!(m.contains("bad.json: line 2"), "{m}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn scenario_ids_and_overrides() {
        let s = parse_scenario(
            r#"{"seed": 7, "search": {"theta_bins": 36},
                "requests": [
                  {"start_node": 1, "goal_node": 2, "planner": "roadmap"},
                  {"id": "x", "start_node": 2, "goal_node": 1, "planner": "waypoint",
                   "overrides": {"theta_bins": 18, "max_expansions": 10}}
                ]}"#,
            "inline",
        )
        .unwrap();
        let named = s.named_requests();
        assert_eq!(named[0].id, "req000_1_2");
        assert_eq!(named[0].request.overrides.theta_bins, Some(36));
        assert_eq!(named[1].id, "x");
        assert_eq!(named[1].request.overrides.theta_bins, Some(18));
        assert_eq!(named[1].request.overrides.max_expansions, Some(10));
        assert!(parse_scenario(r#"{"requests": [], "bogus": 1}"#, "inline").is_err());
    }
}
