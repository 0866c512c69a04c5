//! Hybrid A* over `(x, y, θ)` with constant-curvature motion primitives, a
//! holonomic-with-obstacles / Reeds-Shepp heuristic, and analytic
//! Reeds-Shepp expansions to the goal.

pub mod reeds_shepp;

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, HashSet};
use std::f64::consts::PI;

use log::debug;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{angle_diff, wrap_angle, Direction, Pose, VehicleParams};
use crate::grid_map::{
    default_margin, distance_field, holonomic_cost_field_with, CollisionChecker, CostField,
    DistanceField, GridMap,
};
use crate::path::{Path, PathPoint, Provenance};

pub use reeds_shepp::{reeds_shepp_length, reeds_shepp_path, reeds_shepp_paths, sample_rs, RsPath};

/// Upper bound on the ratio between an 8-connected grid distance and the
/// Euclidean distance it spans: `sqrt(4 - 2·sqrt(2))`.
pub const OCTILE_RATIO: f64 = 1.082_392_200_292_393_9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchParams {
    pub xy_cell: f64,
    pub theta_bins: usize,
    pub primitive_arc: f64,
    pub steering_set: Vec<f64>,
    pub allow_reverse: bool,
    pub reverse_penalty: f64,
    pub switch_penalty: f64,
    pub goal_xy_tol: f64,
    pub goal_theta_tol: f64,
    pub analytic_period: usize,
    pub max_expansions: usize,
}

/// Partial [`SearchParams`], as read from scenario files. Unset fields take
/// the defaults; `primitive_arc` defaults from the effective `xy_cell` and
/// `switch_penalty` from the effective `primitive_arc`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xy_cell: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_bins: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub primitive_arc: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steering_set: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub allow_reverse: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reverse_penalty: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub switch_penalty: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub goal_xy_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub goal_theta_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analytic_period: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_expansions: Option<usize>,
}

impl SearchOverrides {
    /// Fields set in `other` win over fields set in `self`.
    pub fn merged(&self, other: &SearchOverrides) -> SearchOverrides {
        macro_rules! pick {
            ($($f:ident),*) => {
                SearchOverrides { $($f: other.$f.clone().or_else(|| self.$f.clone()),)* }
            };
        }
        pick!(
            xy_cell,
            theta_bins,
            primitive_arc,
            steering_set,
            allow_reverse,
            reverse_penalty,
            switch_penalty,
            goal_xy_tol,
            goal_theta_tol,
            analytic_period,
            max_expansions
        )
    }
}

impl SearchParams {
    pub fn defaults(resolution: f64, vehicle: &VehicleParams) -> Self {
        Self::resolve(resolution, vehicle, &SearchOverrides::default())
            .expect("defaults are valid")
    }

    pub fn resolve(resolution: f64, vehicle: &VehicleParams, o: &SearchOverrides) -> Result<Self> {
        let k = vehicle.max_curvature();
        let xy_cell = o.xy_cell.unwrap_or(resolution);
        let primitive_arc = o.primitive_arc.unwrap_or(3.0 * xy_cell);
        let p = Self {
            xy_cell,
            theta_bins: o.theta_bins.unwrap_or(72),
            primitive_arc,
            steering_set: o
                .steering_set
                .clone()
                .unwrap_or_else(|| vec![-k, -k / 2.0, 0.0, k / 2.0, k]),
            allow_reverse: o.allow_reverse.unwrap_or(true),
            reverse_penalty: o.reverse_penalty.unwrap_or(2.0),
            switch_penalty: o.switch_penalty.unwrap_or(2.0 * primitive_arc),
            goal_xy_tol: o.goal_xy_tol.unwrap_or(0.25),
            goal_theta_tol: o.goal_theta_tol.unwrap_or(10f64.to_radians()),
            analytic_period: o.analytic_period.unwrap_or(4),
            max_expansions: o.max_expansions.unwrap_or(200_000),
        };
        p.validate(vehicle)?;
        Ok(p)
    }

    pub fn validate(&self, vehicle: &VehicleParams) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidInput(format!("search params: {m}")));
        if !(self.xy_cell > 0.0) || !self.xy_cell.is_finite() {
            return bad("xy_cell must be > 0");
        }
        if self.theta_bins == 0 {
            return bad("theta_bins must be ≥ 1");
        }
        if !(self.primitive_arc > 0.0) || !self.primitive_arc.is_finite() {
            return bad("primitive_arc must be > 0");
        }
        if !(self.reverse_penalty >= 1.0) || !(self.switch_penalty >= 0.0) {
            return bad("reverse_penalty must be ≥ 1 and switch_penalty ≥ 0");
        }
        if !(self.goal_xy_tol > 0.0) || !(self.goal_theta_tol > 0.0) {
            return bad("tolerances must be > 0");
        }
        if self.analytic_period == 0 || self.max_expansions == 0 {
            return bad("analytic_period and max_expansions must be ≥ 1");
        }
        let kmax = vehicle.max_curvature() * (1.0 + 1e-9);
        if !self.steering_set.contains(&0.0) {
            return bad("steering_set must contain 0");
        }
        for &k in &self.steering_set {
            if !k.is_finite() || k.abs() > kmax {
                return bad("steering_set curvatures must lie within ±1/min_turn_radius");
            }
            if !self
                .steering_set
                .iter()
                .any(|&m| (m + k).abs() <= 1e-12 * kmax.max(1.0))
            {
                return bad("steering_set must be symmetric");
            }
        }
        Ok(())
    }

    /// The same parameters with both goal tolerances scaled.
    pub fn with_tolerance_scale(&self, s: f64) -> Self {
        Self {
            goal_xy_tol: self.goal_xy_tol * s,
            goal_theta_tol: self.goal_theta_tol * s,
            ..self.clone()
        }
    }
}

/// Grid cell of a search state: `(ix, iy, itheta)`.
pub type Cell = (i64, i64, usize);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchNode {
    pub pose: Pose,
    pub cell: Cell,
    /// Penalized cost from the start.
    pub g: f64,
    pub parent: Option<usize>,
    /// `None` only for the start node.
    pub arrived_dir: Option<Direction>,
    /// Curvature of the primitive that produced this node.
    pub kappa: f64,
}

/// How the search decides it has arrived.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GoalMode {
    /// Success only through an analytic expansion ending exactly on the goal.
    Exact,
    /// Any expanded node within the goal tolerances is accepted; an exact
    /// analytic shot is still preferred when one is collision-free.
    Tolerant,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub path: Path,
    /// Penalized cost of the returned path.
    pub cost: f64,
    pub expansions: usize,
    /// Heuristic value at the start pose.
    pub h_start: f64,
}

impl SearchOutcome {
    pub fn reached(&self) -> Pose {
        self.path.last().expect("nonempty path").pose
    }
}

/// Collision checker and distance field shared by every search over one map.
pub struct SearchContext<'a> {
    checker: CollisionChecker<'a>,
}

impl<'a> SearchContext<'a> {
    pub fn new(grid: &'a GridMap, vehicle: VehicleParams) -> Self {
        let field = distance_field(grid);
        Self::with_field(grid, vehicle, field)
    }

    pub fn with_field(grid: &'a GridMap, vehicle: VehicleParams, field: DistanceField) -> Self {
        Self {
            checker: CollisionChecker::with_field(grid, vehicle, default_margin(grid), field),
        }
    }

    pub fn grid(&self) -> &GridMap {
        self.checker.grid()
    }

    pub fn vehicle(&self) -> &VehicleParams {
        self.checker.vehicle()
    }

    pub fn checker(&self) -> &CollisionChecker<'a> {
        &self.checker
    }

    pub fn field(&self) -> &DistanceField {
        self.checker.field()
    }
}

fn discretize(p: &Pose, grid: &GridMap, params: &SearchParams) -> Cell {
    let o = grid.origin();
    let ix = ((p.x - o.x) / params.xy_cell).floor() as i64;
    let iy = ((p.y - o.y) / params.xy_cell).floor() as i64;
    let frac = (wrap_angle(p.theta) + PI) / (2.0 * PI);
    let it = ((frac * params.theta_bins as f64).floor() as usize) % params.theta_bins;
    (ix, iy, it)
}

/// Pose after driving signed arc length `s` at constant curvature `kappa`.
pub fn integrate(p: &Pose, kappa: f64, s: f64) -> Pose {
    if kappa == 0.0 {
        Pose::new(p.x + s * p.theta.cos(), p.y + s * p.theta.sin(), p.theta)
    } else {
        let th = p.theta + kappa * s;
        Pose::new(
            p.x + (th.sin() - p.theta.sin()) / kappa,
            p.y + (p.theta.cos() - th.cos()) / kappa,
            th,
        )
    }
}

fn primitive_steps(grid: &GridMap, params: &SearchParams) -> usize {
    ((params.primitive_arc / (grid.resolution() / 2.0)).ceil() as usize).max(1)
}

/// Intermediate poses of one primitive, excluding `from` and ending at the
/// successor pose.
fn primitive_poses(from: &Pose, kappa: f64, dir: Direction, arc: f64, steps: usize) -> Vec<Pose> {
    let s = dir.sign() * arc;
    (1..=steps)
        .map(|k| integrate(from, kappa, s * k as f64 / steps as f64))
        .collect()
}

fn step_cost(params: &SearchParams, prev: Option<Direction>, dir: Direction, len: f64) -> f64 {
    let mut c = match dir {
        Direction::Forward => len,
        Direction::Reverse => len * params.reverse_penalty,
    };
    if prev.is_some_and(|d| d != dir) {
        c += params.switch_penalty;
    }
    c
}

/// One successor per (curvature, direction) pair whose swept poses are all
/// collision-free.
pub fn expand(node: &SearchNode, ctx: &SearchContext, params: &SearchParams) -> Vec<SearchNode> {
    let steps = primitive_steps(ctx.grid(), params);
    let dirs: &[Direction] = if params.allow_reverse {
        &[Direction::Forward, Direction::Reverse]
    } else {
        &[Direction::Forward]
    };
    let mut out = Vec::with_capacity(params.steering_set.len() * dirs.len());
    for &kappa in &params.steering_set {
        for &dir in dirs {
            let poses = primitive_poses(&node.pose, kappa, dir, params.primitive_arc, steps);
            if poses.iter().any(|p| ctx.checker().collides(p)) {
                continue;
            }
            let pose = *poses.last().unwrap();
            out.push(SearchNode {
                pose,
                cell: discretize(&pose, ctx.grid(), params),
                g: node.g + step_cost(params, node.arrived_dir, dir, params.primitive_arc),
                parent: None,
                arrived_dir: Some(dir),
                kappa,
            });
        }
    }
    out
}

/// Collision-free Reeds-Shepp shot from `node` to `goal`, sampled at half a
/// grid cell, with its penalized cost. The last sample is exactly `goal`.
pub fn analytic_expansion(
    node: &SearchNode,
    goal: &Pose,
    ctx: &SearchContext,
    params: &SearchParams,
) -> Option<(Path, f64)> {
    let r = ctx.vehicle().min_turn_radius;
    if ctx.checker().collides(goal) {
        return None;
    }
    // Cheapest collision-free word under the search's own cost model.
    let mut words: Vec<(f64, RsPath)> = reeds_shepp_paths(&node.pose, goal, r)
        .into_iter()
        .map(|w| (word_cost(&w, r, node.arrived_dir, params), w))
        .collect();
    words.sort_by(|a, b| a.0.total_cmp(&b.0));
    for (cost, rs) in words {
        let mut samples = sample_rs(&node.pose, &rs, r, ctx.grid().resolution() / 2.0);
        if samples.iter().skip(1).any(|(p, _)| ctx.checker().collides(p)) {
            continue;
        }
        samples.last_mut().unwrap().0 = *goal;
        return Some((Path::from_samples(&samples, Provenance::Analytic), cost));
    }
    None
}

fn word_cost(rs: &RsPath, r: f64, arrived: Option<Direction>, params: &SearchParams) -> f64 {
    let mut cost = 0.0;
    let mut prev = arrived;
    for &(_, l) in &rs.segments {
        if l.abs() <= 1e-12 {
            continue;
        }
        let dir = if l < 0.0 { Direction::Reverse } else { Direction::Forward };
        cost += step_cost(params, prev, dir, l.abs() * r);
        prev = Some(dir);
    }
    cost
}

#[derive(PartialEq)]
struct Open {
    f: f64,
    theta_bin: usize,
    seq: u64,
    node: usize,
}

impl Eq for Open {}

impl Ord for Open {
    fn cmp(&self, o: &Self) -> Ordering {
        o.f.total_cmp(&self.f)
            .then_with(|| o.theta_bin.cmp(&self.theta_bin))
            .then_with(|| o.seq.cmp(&self.seq))
    }
}

impl PartialOrd for Open {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

struct Heuristic {
    field: CostField,
    goal: Pose,
    radius: f64,
    slack: f64,
    exact: bool,
}

impl Heuristic {
    fn eval(&self, p: &Pose) -> f64 {
        let hol = self.field.at(p.position());
        if !hol.is_finite() {
            return f64::INFINITY;
        }
        let h = (hol / OCTILE_RATIO - self.slack).max(0.0);
        if self.exact {
            h.max(reeds_shepp_length(p, &self.goal, self.radius))
        } else {
            h
        }
    }
}

fn within(p: &Pose, goal: &Pose, xy: f64, th: f64) -> bool {
    p.position().distance(goal.position()) <= xy && angle_diff(p.theta, goal.theta).abs() <= th
}

fn reconstruct(nodes: &[SearchNode], last: usize, ctx: &SearchContext, params: &SearchParams) -> Path {
    let mut chain = vec![last];
    while let Some(p) = nodes[*chain.last().unwrap()].parent {
        chain.push(p);
    }
    chain.reverse();
    let steps = primitive_steps(ctx.grid(), params);
    let first_dir = chain
        .get(1)
        .and_then(|&i| nodes[i].arrived_dir)
        .unwrap_or(Direction::Forward);
    let mut points = vec![PathPoint {
        pose: nodes[chain[0]].pose,
        dir: first_dir,
        provenance: Provenance::HybridAstar,
    }];
    for w in chain.windows(2) {
        let (from, to) = (&nodes[w[0]], &nodes[w[1]]);
        let dir = to.arrived_dir.unwrap();
        for pose in primitive_poses(&from.pose, to.kappa, dir, params.primitive_arc, steps) {
            points.push(PathPoint {
                pose,
                dir,
                provenance: Provenance::HybridAstar,
            });
        }
    }
    Path::new(points)
}

fn join(mut head: Path, tail: Path) -> Path {
    head.points.extend(tail.points.into_iter().skip(1));
    head
}

/// Hybrid A* from `start` to `goal` with tolerance-based termination.
pub fn plan(
    start: &Pose,
    goal: &Pose,
    grid: &GridMap,
    vehicle: &VehicleParams,
    params: &SearchParams,
) -> Result<SearchOutcome> {
    let ctx = SearchContext::new(grid, *vehicle);
    search(&ctx, start, goal, params, GoalMode::Tolerant)
}

pub fn search(
    ctx: &SearchContext,
    start: &Pose,
    goal: &Pose,
    params: &SearchParams,
    mode: GoalMode,
) -> Result<SearchOutcome> {
    let grid = ctx.grid();
    if ctx.checker().collides(start) {
        return Err(Error::StartBlocked);
    }
    let (gx, gy) = grid.world_to_cell(goal.position()).ok_or_else(|| {
        Error::InvalidInput(format!("goal ({:.3}, {:.3}) is outside the map", goal.x, goal.y))
    })?;
    if ctx.checker().collides(goal) {
        return Err(Error::GoalBlocked(gx, gy));
    }

    let single = |pose: Pose| SearchOutcome {
        path: Path::new(vec![PathPoint {
            pose,
            dir: Direction::Forward,
            provenance: Provenance::HybridAstar,
        }]),
        cost: 0.0,
        expansions: 0,
        h_start: 0.0,
    };
    match mode {
        GoalMode::Tolerant if within(start, goal, params.goal_xy_tol, params.goal_theta_tol) => {
            return Ok(single(*start));
        }
        GoalMode::Exact if within(start, goal, 1e-9, 1e-9) => return Ok(single(*goal)),
        _ => {}
    }

    let exact = mode == GoalMode::Exact;
    let heuristic = Heuristic {
        field: holonomic_cost_field_with(grid, ctx.field(), goal, ctx.vehicle())?,
        goal: *goal,
        radius: ctx.vehicle().min_turn_radius,
        slack: 2.0 * grid.resolution() + if exact { 0.0 } else { params.goal_xy_tol },
        exact,
    };
    let shot_radius = 3.0 * ctx.vehicle().min_turn_radius;

    let mut nodes = vec![SearchNode {
        pose: *start,
        cell: discretize(start, grid, params),
        g: 0.0,
        parent: None,
        arrived_dir: None,
        kappa: 0.0,
    }];
    let h_start = heuristic.eval(start);
    let mut open = BinaryHeap::new();
    let mut seq = 0u64;
    open.push(Open {
        f: h_start,
        theta_bin: nodes[0].cell.2,
        seq,
        node: 0,
    });
    let mut best_g: HashMap<Cell, f64> = HashMap::new();
    best_g.insert(nodes[0].cell, 0.0);
    let mut closed: HashSet<Cell> = HashSet::new();
    let mut expansions = 0usize;

    let finish = |nodes: &[SearchNode], idx: usize, tail: Option<(Path, f64)>, expansions: usize| {
        let head = reconstruct(nodes, idx, ctx, params);
        let (path, cost) = match tail {
            Some((t, c)) => (join(head, t), nodes[idx].g + c),
            None => (head, nodes[idx].g),
        };
        debug!(
            "hybrid A* reached goal after {expansions} expansions, cost {cost:.3}, {} poses",
            path.len()
        );
        SearchOutcome {
            path,
            cost,
            expansions,
            h_start,
        }
    };

    while let Some(Open { node: idx, .. }) = open.pop() {
        let node = nodes[idx];
        if closed.contains(&node.cell) || best_g.get(&node.cell).is_some_and(|&g| g < node.g) {
            continue;
        }
        if expansions >= params.max_expansions {
            break;
        }
        closed.insert(node.cell);
        expansions += 1;

        let near = node.pose.position().distance(goal.position()) <= shot_radius;
        let tolerant_hit =
            !exact && within(&node.pose, goal, params.goal_xy_tol, params.goal_theta_tol);
        if near || tolerant_hit || expansions % params.analytic_period == 0 {
            if let Some(tail) = analytic_expansion(&node, goal, ctx, params) {
                return Ok(finish(&nodes, idx, Some(tail), expansions));
            }
        }
        if tolerant_hit {
            return Ok(finish(&nodes, idx, None, expansions));
        }

        for mut succ in expand(&node, ctx, params) {
            if closed.contains(&succ.cell) {
                continue;
            }
            if best_g.get(&succ.cell).is_some_and(|&g| g <= succ.g) {
                continue;
            }
            let h = heuristic.eval(&succ.pose);
            if !h.is_finite() {
                continue;
            }
            succ.parent = Some(idx);
            best_g.insert(succ.cell, succ.g);
            nodes.push(succ);
            seq += 1;
            open.push(Open {
                f: succ.g + h,
                theta_bin: succ.cell.2,
                seq,
                node: nodes.len() - 1,
            });
        }
    }
    debug!("hybrid A* gave up after {expansions} expansions");
    Err(Error::NoPathFound {
        expansions,
        join: None,
    })
}
