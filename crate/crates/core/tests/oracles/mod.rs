//! Independent reference implementations shared by the integration tests and
//! the acceptance suite.
#![allow(dead_code)]

use corridor_planner::geometry::{bezier_curvature, bezier_point, inflated_corners};
use corridor_planner::grid_map::{default_margin, footprint_collides};
use corridor_planner::world::{Rect, RectZone, TopologicalGraph, ZoneKind};
use corridor_planner::{BezierCurve, CollisionChecker, GridMap, Point, Pose, VehicleParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn demo_vehicle() -> VehicleParams {
    VehicleParams::new(1.2, 0.7, 0.3, 1.5).unwrap()
}

/// Collision by brute force: every occupied cell center tested against the
/// four edges of the grown footprint, plus the map-boundary rule.
pub fn half_plane_collides(p: &Pose, v: &VehicleParams, g: &GridMap, margin: f64) -> bool {
    let c = inflated_corners(p, v, margin);
    let (lo, hi) = (g.origin(), g.max_corner());
    if c.iter().any(|q| q.x < lo.x || q.y < lo.y || q.x > hi.x || q.y > hi.y) {
        return true;
    }
    (0..g.height()).any(|iy| {
        (0..g.width()).any(|ix| {
            g.is_occupied(ix, iy) && {
                let q = g.cell_center(ix, iy);
                (0..4).all(|k| (c[(k + 1) % 4] - c[k]).cross(q - c[k]) >= -1e-12)
            }
        })
    })
}

#[derive(Default)]
pub struct OracleTally {
    pub checked: usize,
    pub disagreements: usize,
    /// Cases where the oracle answered true (collision, route found).
    pub positives: usize,
}

/// 50 random poses on each of 10 random 64×64 maps; both the direct test and
/// the distance-field-accelerated checker are compared.
pub fn footprint_oracle(seed: u64) -> OracleTally {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = demo_vehicle();
    let mut t = OracleTally::default();
    for _ in 0..10 {
        let density = rng.gen_range(0.005..0.08);
        let occ = (0..64 * 64).map(|_| rng.gen_bool(density)).collect();
        let g = GridMap::new(64, 64, 0.25, Point::new(rng.gen_range(-5.0..5.0), 0.0), occ).unwrap();
        let m = default_margin(&g);
        let checker = CollisionChecker::new(&g, v, m);
        for _ in 0..50 {
            let lo = g.origin();
            let p = Pose::new(
                lo.x + rng.gen_range(-0.5..16.5),
                lo.y + rng.gen_range(-0.5..16.5),
                rng.gen_range(-3.2..3.2),
            );
            let want = half_plane_collides(&p, &v, &g, m);
            t.checked += 1;
            t.positives += usize::from(want);
            if footprint_collides(&p, &v, &g, m) != want || checker.collides(&p) != want {
                t.disagreements += 1;
            }
        }
    }
    t
}

/// A graph over the first `n` cells (row-major) of a 4×2 lattice of touching
/// 4 m × 2 m rectangles, keeping a random subset of lattice adjacencies.
pub fn lattice_graph(rng: &mut ChaCha8Rng, n: usize) -> TopologicalGraph {
    let cell = |i: usize| (i % 4, i / 4);
    let zones: Vec<RectZone> = (0..n)
        .map(|i| {
            let (c, r) = cell(i);
            let (x, y) = (c as f64 * 4.0, r as f64 * 2.0);
            let kind = if i % 2 == 0 { ZoneKind::MachineArea } else { ZoneKind::Corridor };
            RectZone::new(format!("Z{i}"), kind, Rect::from([x, y, x + 4.0, y + 2.0])).unwrap()
        })
        .collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let ((ci, ri), (cj, rj)) = (cell(i), cell(j));
            let conn = if ri == rj && cj == ci + 1 {
                let x = cj as f64 * 4.0;
                let y = ri as f64 * 2.0;
                [Point::new(x, y + 0.5), Point::new(x, y + 1.5)]
            } else if ci == cj && rj == ri + 1 {
                let y = rj as f64 * 2.0;
                let x = ci as f64 * 4.0;
                [Point::new(x + 1.0, y), Point::new(x + 3.0, y)]
            } else {
                continue;
            };
            if rng.gen_bool(0.75) {
                let weight = rng.gen_bool(0.8).then(|| rng.gen_range(1..6) as f64);
                edges.push((format!("Z{i}"), format!("Z{j}"), weight, conn));
            }
        }
    }
    TopologicalGraph::new(zones, edges).unwrap()
}

/// Minimum route cost by enumerating every simple path.
pub fn exhaustive_min_cost(g: &TopologicalGraph, start: &str, goal: &str) -> Option<f64> {
    fn dfs(g: &TopologicalGraph, here: &str, goal: &str, seen: &mut Vec<String>, cost: f64, best: &mut Option<f64>) {
        if here == goal {
            *best = Some(best.map_or(cost, |b: f64| b.min(cost)));
            return;
        }
        let next: Vec<(String, f64)> = g.neighbors(here).map(|(n, w)| (n.to_string(), w)).collect();
        for (n, w) in next {
            if seen.contains(&n) {
                continue;
            }
            seen.push(n.clone());
            dfs(g, &n, goal, seen, cost + w, best);
            seen.pop();
        }
    }
    let mut best = None;
    dfs(g, start, goal, &mut vec![start.to_string()], 0.0, &mut best);
    best
}

/// Compares `area_sequence` with exhaustive enumeration on every ordered zone
/// pair of `graphs` random lattice graphs with 2 to 8 zones, and of `extra`.
pub fn area_sequence_oracle(seed: u64, graphs: usize, extra: &[&TopologicalGraph]) -> OracleTally {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut owned = Vec::new();
    for k in 0..graphs {
        owned.push(lattice_graph(&mut rng, 2 + k % 7));
    }
    let mut t = OracleTally::default();
    for g in owned.iter().chain(extra.iter().copied()) {
        for a in g.zones() {
            for b in g.zones() {
                t.checked += 1;
                let want = exhaustive_min_cost(g, &a.id, &b.id);
                t.positives += usize::from(want.is_some());
                let ok = match (g.area_sequence(&a.id, &b.id), want) {
                    (Ok(seq), Some(w)) => {
                        seq.first() == Some(&a.id)
                            && seq.last() == Some(&b.id)
                            && g.sequence_cost(&seq).is_some_and(|c| (c - w).abs() <= 1e-9)
                    }
                    (Err(corridor_planner::Error::NoRoute { .. }), None) => true,
                    _ => false,
                };
                if !ok {
                    t.disagreements += 1;
                }
            }
        }
    }
    t
}

/// Twenty seeded curves of degree 2 to 5 with control points in a 10 m box.
pub fn fixture_curves() -> Vec<BezierCurve> {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut out = Vec::new();
    while out.len() < 20 {
        let degree = 2 + out.len() % 4;
        let pts: Vec<Point> = (0..=degree)
            .map(|_| Point::new(rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0)))
            .collect();
        let c = BezierCurve::new(pts).unwrap();
        // Near-cusps make finite differences meaningless; keep regular curves.
        if (0..=100).all(|i| c.derivative(i as f64 / 100.0).norm() > 0.5) {
            out.push(c);
        }
    }
    out
}

/// Curvature from second-order finite differences of point evaluations only.
pub fn fd_curvature(c: &BezierCurve, t: f64) -> f64 {
    let h = 1e-4;
    let p = |t: f64| bezier_point(c, t).unwrap();
    let (d1, d2) = if t - h < 0.0 {
        let (f0, f1, f2, f3) = (p(t), p(t + h), p(t + 2.0 * h), p(t + 3.0 * h));
        (
            (f0 * -3.0 + f1 * 4.0 - f2) * (1.0 / (2.0 * h)),
            (f0 * 2.0 - f1 * 5.0 + f2 * 4.0 - f3) * (1.0 / (h * h)),
        )
    } else if t + h > 1.0 {
        let (f0, f1, f2, f3) = (p(t), p(t - h), p(t - 2.0 * h), p(t - 3.0 * h));
        (
            (f0 * 3.0 - f1 * 4.0 + f2) * (1.0 / (2.0 * h)),
            (f0 * 2.0 - f1 * 5.0 + f2 * 4.0 - f3) * (1.0 / (h * h)),
        )
    } else {
        let (a, b, m) = (p(t - h), p(t + h), p(t));
        ((b - a) * (1.0 / (2.0 * h)), (a + b - m * 2.0) * (1.0 / (h * h)))
    };
    d1.cross(d2) / d1.norm().powi(3)
}

/// Largest |κ − κ_fd| / max(1, |κ|) over a 101-point grid on each fixture curve.
pub fn curvature_worst_error() -> f64 {
    let mut worst: f64 = 0.0;
    for c in fixture_curves() {
        for i in 0..=100 {
            let t = i as f64 / 100.0;
            let k = bezier_curvature(&c, t).unwrap();
            worst = worst.max((k - fd_curvature(&c, t)).abs() / k.abs().max(1.0));
        }
    }
    worst
}
