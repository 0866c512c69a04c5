//! Composite planners: fixed exit and entry paths, corridor centerlines or
//! waypoints in between, and Hybrid A* joins that stitch the pieces.

use std::time::Instant;

use log::{debug, info};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, Pose};
use crate::grid_map::{distance_field, DistanceField, GridMap};
use crate::hybrid_astar::{search, GoalMode, SearchContext, SearchOverrides, SearchParams};
use crate::path::Path;
use crate::world::{NodeId, World};

/// Largest position gap tolerated between consecutive parts.
pub const JOIN_GAP_TOLERANCE: f64 = 1e-3;

/// Goal tolerance multiplier for waypoint joins.
pub const WAYPOINT_TOLERANCE_SCALE: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlannerKind {
    HybridAstar,
    Roadmap,
    Waypoint,
}

impl PlannerKind {
    pub const ALL: [PlannerKind; 3] = [PlannerKind::HybridAstar, PlannerKind::Roadmap, PlannerKind::Waypoint];

    pub fn as_str(self) -> &'static str {
        match self {
            PlannerKind::HybridAstar => "hybrid_astar",
            PlannerKind::Roadmap => "roadmap",
            PlannerKind::Waypoint => "waypoint",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanRequest {
    pub start_node: NodeId,
    pub goal_node: NodeId,
    pub planner: PlannerKind,
    #[serde(default, skip_serializing_if = "is_default_overrides")]
    pub overrides: SearchOverrides,
}

fn is_default_overrides(o: &SearchOverrides) -> bool {
    *o == SearchOverrides::default()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartKind {
    Exit,
    Corridor,
    Hybrid,
    Entry,
}

impl PartKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PartKind::Exit => "exit",
            PartKind::Corridor => "corridor",
            PartKind::Hybrid => "hybrid",
            PartKind::Entry => "entry",
        }
    }
}

/// Inclusive index range of one part within the final path. Adjacent parts
/// share their join point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathPart {
    pub kind: PartKind,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JoinRecord {
    pub label: String,
    pub exact: bool,
    pub from: Pose,
    pub to: Pose,
    pub expansions: usize,
    pub cost: f64,
    pub h_start: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub length: f64,
    pub direction_switches: usize,
    pub max_abs_curvature: f64,
    pub min_clearance: f64,
    pub planning_time: f64,
    pub expansions: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanResult {
    pub path: Path,
    pub metrics: Metrics,
    pub parts: Vec<PathPart>,
    pub joins: Vec<JoinRecord>,
}

impl PlanResult {
    pub fn count_parts(&self, kind: PartKind) -> usize {
        self.parts.iter().filter(|p| p.kind == kind).count()
    }

    pub fn part_path(&self, part: &PathPart) -> Path {
        Path::new(self.path.points[part.start..=part.end].to_vec())
    }
}

/// Concatenates parts, collapsing each shared join point. Empty parts are
/// skipped.
pub fn concat_paths(parts: &[Path]) -> Result<Path> {
    concat_with_spans(parts).map(|(p, _)| p)
}

fn concat_with_spans(parts: &[Path]) -> Result<(Path, Vec<(usize, usize)>)> {
    let mut out = Path::default();
    let mut spans = Vec::with_capacity(parts.len());
    for (i, part) in parts.iter().enumerate() {
        let Some(first) = part.first() else {
            spans.push((out.len().saturating_sub(1), out.len().saturating_sub(1)));
            continue;
        };
        let start = match out.last() {
            None => {
                out.points.extend_from_slice(&part.points);
                0
            }
            Some(last) => {
                let gap = last.pose.position().distance(first.pose.position());
                if gap > JOIN_GAP_TOLERANCE {
                    return Err(Error::DiscontinuousJoin { index: i, gap });
                }
                let s = out.len() - 1;
                out.points.extend_from_slice(&part.points[1..]);
                s
            }
        };
        spans.push((start, out.len() - 1));
    }
    Ok((out, spans))
}

/// Three-point circumscribed-circle curvature estimate; triples spanning a
/// change of travel direction or containing repeated points are skipped.
pub fn max_abs_curvature(path: &Path) -> f64 {
    let mut worst = 0.0f64;
    for w in path.points.windows(3) {
        if w[1].dir != w[2].dir {
            continue;
        }
        let (a, b, c) = (w[0].pose.position(), w[1].pose.position(), w[2].pose.position());
        let (ab, bc, ca) = (a.distance(b), b.distance(c), c.distance(a));
        let denom = ab * bc * ca;
        if ab < 1e-9 || bc < 1e-9 || denom < 1e-18 {
            continue;
        }
        let k = 2.0 * (b - a).cross(c - a).abs() / denom;
        worst = worst.max(k);
    }
    worst
}

pub fn path_metrics_with(path: &Path, field: &DistanceField) -> Metrics {
    Metrics {
        length: path.length(),
        direction_switches: path.direction_switches(),
        max_abs_curvature: max_abs_curvature(path),
        min_clearance: path
            .poses()
            .map(|p| field.at(p.position()))
            .fold(f64::INFINITY, f64::min),
        planning_time: 0.0,
        expansions: 0,
    }
}

pub fn path_metrics(path: &Path, grid: &GridMap) -> Metrics {
    path_metrics_with(path, &distance_field(grid))
}

/// Shared per-world planning state: the grid, its distance field, and the
/// collision checker all joins reuse.
pub struct Planner<'a> {
    world: &'a World,
    ctx: SearchContext<'a>,
}

struct Join {
    label: String,
    from: Pose,
    to: Pose,
    mode: GoalMode,
}

impl<'a> Planner<'a> {
    pub fn new(world: &'a World, grid: &'a GridMap) -> Self {
        Self {
            world,
            ctx: SearchContext::new(grid, world.vehicle),
        }
    }

    pub fn world(&self) -> &World {
        self.world
    }

    pub fn grid(&self) -> &GridMap {
        self.ctx.grid()
    }

    pub fn field(&self) -> &DistanceField {
        self.ctx.field()
    }

    pub fn params(&self, overrides: &SearchOverrides) -> Result<SearchParams> {
        SearchParams::resolve(self.grid().resolution(), &self.world.vehicle, overrides)
    }

    pub fn plan(&self, req: &PlanRequest) -> Result<PlanResult> {
        let t0 = Instant::now();
        if req.start_node == req.goal_node {
            return Err(Error::InvalidInput(format!(
                "start and goal node are both {}",
                req.start_node
            )));
        }
        let params = self.params(&req.overrides)?;
        let world = self.world;
        let (exit, detach) = world.find_exit_path(req.start_node)?;
        let (entry, attach) = world.find_entry_path(req.goal_node)?;

        let start_pos = world.seg_graph.node(req.start_node)?.pose.position();
        let goal_pos = world.seg_graph.node(req.goal_node)?.pose.position();
        let start_area = world.locate_area(start_pos)?.clone();
        let goal_area = world.locate_area(goal_pos)?.clone();
        let areas = if req.planner == PlannerKind::HybridAstar || start_area == goal_area {
            None
        } else {
            Some(world.area_sequence(&start_area, &goal_area)?)
        };
        debug!(
            "request {}->{} ({}): areas {:?}",
            req.start_node,
            req.goal_node,
            req.planner.as_str(),
            areas
        );

        let mut pieces: Vec<(PartKind, Path)> = vec![(PartKind::Exit, exit)];
        let mut joins = Vec::new();
        match (req.planner, areas) {
            (PlannerKind::Roadmap, Some(areas)) => {
                let (corridors, eps) = world.corridors_path(&areas)?;
                if corridors.is_empty() {
                    let h = self.run_join(direct_join(detach, attach), &params, &mut joins)?;
                    pieces.push((PartKind::Hybrid, h));
                } else {
                    let n = eps.len();
                    let h = self.run_join(
                        Join {
                            label: "detachment->EP1".into(),
                            from: detach,
                            to: eps[0],
                            mode: GoalMode::Exact,
                        },
                        &params,
                        &mut joins,
                    )?;
                    pieces.push((PartKind::Hybrid, h));
                    for (c, corridor) in corridors.into_iter().enumerate() {
                        pieces.push((PartKind::Corridor, corridor));
                        let (i, j) = (2 * c + 1, 2 * c + 2);
                        let join = if j < n {
                            Join {
                                label: format!("EP{}->EP{}", i + 1, j + 1),
                                from: eps[i],
                                to: eps[j],
                                mode: GoalMode::Exact,
                            }
                        } else {
                            Join {
                                label: format!("EP{}->attach", n),
                                from: eps[n - 1],
                                to: attach,
                                mode: GoalMode::Exact,
                            }
                        };
                        let h = self.run_join(join, &params, &mut joins)?;
                        pieces.push((PartKind::Hybrid, h));
                    }
                }
            }
            (PlannerKind::Waypoint, Some(areas)) => {
                let waypoints = world.waypoints_sequence(&areas)?;
                let loose = params.with_tolerance_scale(WAYPOINT_TOLERANCE_SCALE);
                let mut from = detach;
                for (i, w) in waypoints.iter().enumerate() {
                    let label = if i == 0 {
                        "detachment->W1".to_string()
                    } else {
                        format!("W{}->W{}", i, i + 1)
                    };
                    let h = self.run_join(
                        Join {
                            label,
                            from,
                            to: *w,
                            mode: GoalMode::Tolerant,
                        },
                        &loose,
                        &mut joins,
                    )?;
                    from = h.last().unwrap().pose;
                    pieces.push((PartKind::Hybrid, h));
                }
                let label = if waypoints.is_empty() {
                    "detachment->attach".to_string()
                } else {
                    format!("W{}->attach", waypoints.len())
                };
                let h = self.run_join(
                    Join {
                        label,
                        from,
                        to: attach,
                        mode: GoalMode::Exact,
                    },
                    &params,
                    &mut joins,
                )?;
                pieces.push((PartKind::Hybrid, h));
            }
            _ => {
                let h = self.run_join(direct_join(detach, attach), &params, &mut joins)?;
                pieces.push((PartKind::Hybrid, h));
            }
        }
        pieces.push((PartKind::Entry, entry));

        let (kinds, paths): (Vec<PartKind>, Vec<Path>) = pieces.into_iter().unzip();
        let (path, spans) = concat_with_spans(&paths)?;
        let parts = kinds
            .into_iter()
            .zip(spans)
            .map(|(kind, (start, end))| PathPart { kind, start, end })
            .collect();
        let mut metrics = path_metrics_with(&path, self.field());
        metrics.expansions = joins.iter().map(|j: &JoinRecord| j.expansions).sum();
        metrics.planning_time = t0.elapsed().as_secs_f64();
        info!(
            "planned {}->{} with {}: {:.2} m, {} joins, {} expansions",
            req.start_node,
            req.goal_node,
            req.planner.as_str(),
            metrics.length,
            joins.len(),
            metrics.expansions
        );
        Ok(PlanResult {
            path,
            metrics,
            parts,
            joins,
        })
    }

    fn run_join(&self, join: Join, params: &SearchParams, log: &mut Vec<JoinRecord>) -> Result<Path> {
        let out = search(&self.ctx, &join.from, &join.to, params, join.mode).map_err(|e| match e {
            Error::NoPathFound { expansions, .. } => Error::NoPathFound {
                expansions,
                join: Some(join.label.clone()),
            },
            other => other,
        })?;
        debug!("join {}: {} expansions", join.label, out.expansions);
        log.push(JoinRecord {
            label: join.label,
            exact: join.mode == GoalMode::Exact,
            from: join.from,
            to: join.to,
            expansions: out.expansions,
            cost: out.cost,
            h_start: out.h_start,
        });
        Ok(out.path)
    }
}

fn direct_join(detach: Pose, attach: Pose) -> Join {
    Join {
        label: "detachment->attach".into(),
        from: detach,
        to: attach,
        mode: GoalMode::Exact,
    }
}

pub fn roadmap_hybrid_astar(req: &PlanRequest, world: &World, grid: &GridMap) -> Result<PlanResult> {
    let req = PlanRequest {
        planner: PlannerKind::Roadmap,
        ..req.clone()
    };
    Planner::new(world, grid).plan(&req)
}

pub fn waypoint_hybrid_astar(req: &PlanRequest, world: &World, grid: &GridMap) -> Result<PlanResult> {
    let req = PlanRequest {
        planner: PlannerKind::Waypoint,
        ..req.clone()
    };
    Planner::new(world, grid).plan(&req)
}

/// Straight-line distance between two machine nodes.
pub fn node_distance(world: &World, a: NodeId, b: NodeId) -> Result<f64> {
    let pa: Point = world.seg_graph.node(a)?.pose.position();
    let pb: Point = world.seg_graph.node(b)?.pose.position();
    Ok(pa.distance(pb))
}
