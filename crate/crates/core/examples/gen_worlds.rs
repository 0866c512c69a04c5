//! Regenerates the bundled worlds, rasters and scenarios under `data/`.
//!
//! ```text
//! cargo run -p corridor-planner --example gen_worlds -- data
//! ```

use std::f64::consts::{FRAC_PI_2, PI};
use std::fs;
use std::path::Path;

use corridor_planner::geometry::{Direction, Point, Pose, VehicleParams};
use corridor_planner::grid_map::GridMap;
use corridor_planner::hybrid_astar::SearchOverrides;
use corridor_planner::planners::PlannerKind;
use corridor_planner::scenario::{
    emit_world, EdgeEntry, NodeEntry, RequestEntry, ScenarioFile, SegmentEntry, WorldFile, ZoneEntry,
};
use corridor_planner::world::{GridMeta, Rect, SegmentEndpoint, SegmentRole, ZoneKind};

const RES: f64 = 0.2;
/// Cubic Bezier arm length for a quarter circle of unit radius.
const KAPPA: f64 = 0.552_284_749_831;
const ROOMS: [f64; 4] = [0.4, 14.4, 28.4, 42.4];

fn p(x: f64, y: f64) -> Point {
    Point::new(x, y)
}

struct Builder {
    file: WorldFile,
}

impl Builder {
    fn new(pgm: &str) -> Self {
        Self {
            file: WorldFile {
                grid: GridMeta {
                    pgm: pgm.into(),
                    resolution: RES,
                    origin: p(0.0, 0.0),
                    occupied_threshold: 128,
                },
                vehicle: VehicleParams::new(1.2, 0.7, 0.3, 1.5).unwrap(),
                zones: vec![],
                topo_edges: vec![],
                endpoints: vec![],
                segments: vec![],
                machine_nodes: vec![],
            },
        }
    }

    fn zone(&mut self, id: &str, kind: ZoneKind, r: [f64; 4]) {
        self.file.zones.push(ZoneEntry {
            id: id.into(),
            kind,
            rect: Rect::from(r),
        });
    }

    fn edge(&mut self, a: &str, b: &str, c0: Point, c1: Point) {
        self.file.topo_edges.push(EdgeEntry {
            a: a.into(),
            b: b.into(),
            weight: None,
            connection: [c0, c1],
        });
    }

    fn endpoint(&mut self, id: u32, x: f64, y: f64, theta: f64) {
        self.file.endpoints.push(SegmentEndpoint {
            id,
            pose: Pose::new(x, y, theta),
        });
    }

    fn segment(
        &mut self,
        cps: Vec<Point>,
        direction: Direction,
        eps: (u32, u32),
        role: SegmentRole,
        zone: &str,
    ) -> usize {
        self.file.segments.push(SegmentEntry {
            control_points: cps,
            direction,
            start_ep: eps.0,
            end_ep: eps.1,
            role,
            zone: zone.into(),
        });
        self.file.segments.len() - 1
    }

    fn node(&mut self, id: u32, pose: Pose, exit_chain: Vec<usize>, entry_chain: Vec<usize>) {
        self.file.machine_nodes.push(NodeEntry {
            id,
            pose,
            exit_chain,
            entry_chain,
        });
    }
}

/// Quarter-circle cubic from `a` (unit tangent `ta`) to `b` (unit tangent `tb`), radius `r`.
fn quarter(a: Point, ta: Point, b: Point, tb: Point, r: f64) -> Vec<Point> {
    vec![a, a + ta * (KAPPA * r), b - tb * (KAPPA * r), b]
}

fn line(a: Point, b: Point) -> Vec<Point> {
    vec![a, a.lerp(b, 1.0 / 3.0), a.lerp(b, 2.0 / 3.0), b]
}

/// Exit and entry of a machine docking against the top wall. The vehicle
/// backs in, facing away from the machine.
fn top_machine(b: &mut Builder, zone: &str, xd: f64, first_id: u32) {
    let (attach, dock, detach) = (first_id, first_id + 1, first_id + 2);
    let down = p(0.0, -1.0);
    let up = p(0.0, 1.0);
    let east = p(1.0, 0.0);
    b.endpoint(attach, xd - 2.0, 9.4, PI);
    b.endpoint(dock, xd, 11.4, -FRAC_PI_2);
    b.endpoint(detach, xd + 2.0, 9.4, 0.0);
    let exit = b.segment(
        quarter(p(xd, 11.4), down, p(xd + 2.0, 9.4), east, 2.0),
        Direction::Forward,
        (dock, detach),
        SegmentRole::MachineExit,
        zone,
    );
    let entry = b.segment(
        quarter(p(xd - 2.0, 9.4), east, p(xd, 11.4), up, 2.0),
        Direction::Reverse,
        (attach, dock),
        SegmentRole::MachineEntry,
        zone,
    );
    b.node(dock, Pose::new(xd, 11.4, -FRAC_PI_2), vec![exit], vec![entry]);
}

/// Mirror image of [`top_machine`] against the bottom wall.
fn bottom_machine(b: &mut Builder, zone: &str, xd: f64, first_id: u32) {
    let (attach, dock, detach) = (first_id, first_id + 1, first_id + 2);
    let up = p(0.0, 1.0);
    let down = p(0.0, -1.0);
    let east = p(1.0, 0.0);
    b.endpoint(attach, xd - 2.0, 4.6, PI);
    b.endpoint(dock, xd, 2.6, FRAC_PI_2);
    b.endpoint(detach, xd + 2.0, 4.6, 0.0);
    let exit = b.segment(
        quarter(p(xd, 2.6), up, p(xd + 2.0, 4.6), east, 2.0),
        Direction::Forward,
        (dock, detach),
        SegmentRole::MachineExit,
        zone,
    );
    let entry = b.segment(
        quarter(p(xd - 2.0, 4.6), east, p(xd, 2.6), down, 2.0),
        Direction::Reverse,
        (attach, dock),
        SegmentRole::MachineEntry,
        zone,
    );
    b.node(dock, Pose::new(xd, 2.6, FRAC_PI_2), vec![exit], vec![entry]);
}

fn demo_map() -> GridMap {
    let (w, h) = (264, 70);
    let mut g = GridMap::free(w, h, RES, p(0.0, 0.0)).unwrap();
    let (wm, hm) = (w as f64 * RES, h as f64 * RES);
    g.fill_rect(p(0.0, 0.0), p(wm, 0.4), true);
    g.fill_rect(p(0.0, hm - 0.4), p(wm, hm), true);
    g.fill_rect(p(0.0, 0.0), p(0.4, hm), true);
    g.fill_rect(p(wm - 0.4, 0.0), p(wm, hm), true);
    for &x0 in &ROOMS[1..] {
        // Wall block between rooms, pierced by a 2 m corridor.
        g.fill_rect(p(x0 - 4.0, 0.0), p(x0, 6.0), true);
        g.fill_rect(p(x0 - 4.0, 8.0), p(x0, hm), true);
    }
    for &r0 in &ROOMS {
        // Pillar on the straight line between the doors.
        g.fill_rect(p(r0 + 4.6, 6.6), p(r0 + 5.4, 7.4), true);
        // Top machine body, bottom machine body.
        g.fill_rect(p(r0 + 3.2, 12.4), p(r0 + 4.8, 13.6), true);
        g.fill_rect(p(r0 + 5.7, 0.4), p(r0 + 7.3, 1.6), true);
    }
    g
}

fn demo_world(pgm: &str) -> Builder {
    let mut b = Builder::new(pgm);
    let rooms = ["M1", "M2", "M3", "M4"];
    let corridors = ["C1", "C2", "C3"];
    for (i, &r0) in ROOMS.iter().enumerate() {
        b.zone(rooms[i], ZoneKind::MachineArea, [r0, 0.4, r0 + 10.0, 13.6]);
        if i < 3 {
            b.zone(corridors[i], ZoneKind::Corridor, [r0 + 10.0, 6.0, r0 + 14.0, 8.0]);
        }
    }
    for i in 0..3 {
        let x0 = ROOMS[i] + 10.0;
        b.edge(rooms[i], corridors[i], p(x0, 6.0), p(x0, 8.0));
        b.edge(corridors[i], rooms[i + 1], p(x0 + 4.0, 6.0), p(x0 + 4.0, 8.0));
    }

    // Machines of M1..M3.
    let ids = [(1, 4), (9, 12), (18, 21)];
    for i in 0..3 {
        top_machine(&mut b, rooms[i], ROOMS[i] + 4.0, ids[i].0);
        bottom_machine(&mut b, rooms[i], ROOMS[i] + 6.5, ids[i].1);
    }

    // Corridors: C1 7->8, C2 15->16->17, C3 24->25.
    let corridor = |b: &mut Builder, zone: &str, ids: &[u32], x0: f64| {
        let n = ids.len() - 1;
        for (k, &id) in ids.iter().enumerate() {
            b.endpoint(id, x0 + 4.0 * k as f64 / n as f64, 7.0, 0.0);
        }
        for k in 0..n {
            let a = p(x0 + 4.0 * k as f64 / n as f64, 7.0);
            let c = p(x0 + 4.0 * (k + 1) as f64 / n as f64, 7.0);
            b.segment(line(a, c), Direction::Forward, (ids[k], ids[k + 1]), SegmentRole::Corridor, zone);
        }
    };
    corridor(&mut b, "C1", &[7, 8], ROOMS[0] + 10.0);
    corridor(&mut b, "C2", &[15, 16, 17], ROOMS[1] + 10.0);
    corridor(&mut b, "C3", &[24, 25], ROOMS[2] + 10.0);

    // M4: the top machine leaves through a straight then an arc (via 33);
    // the bottom machine is entered forward, then backed in from a cusp at 32.
    let r0 = ROOMS[3];
    let xd = r0 + 4.0;
    b.endpoint(26, xd - 2.0, 9.4, PI);
    b.endpoint(27, xd, 11.4, -FRAC_PI_2);
    b.endpoint(33, xd, 10.9, -FRAC_PI_2);
    b.endpoint(28, xd + 2.0, 8.9, 0.0);
    let s1 = b.segment(
        line(p(xd, 11.4), p(xd, 10.9)),
        Direction::Forward,
        (27, 33),
        SegmentRole::MachineExit,
        "M4",
    );
    let s2 = b.segment(
        quarter(p(xd, 10.9), p(0.0, -1.0), p(xd + 2.0, 8.9), p(1.0, 0.0), 2.0),
        Direction::Forward,
        (33, 28),
        SegmentRole::MachineExit,
        "M4",
    );
    let e1 = b.segment(
        quarter(p(xd - 2.0, 9.4), p(1.0, 0.0), p(xd, 11.4), p(0.0, 1.0), 2.0),
        Direction::Reverse,
        (26, 27),
        SegmentRole::MachineEntry,
        "M4",
    );
    b.node(27, Pose::new(xd, 11.4, -FRAC_PI_2), vec![s1, s2], vec![e1]);

    let xd = r0 + 6.5;
    b.endpoint(29, xd + 1.0, 4.6, PI);
    b.endpoint(32, xd - 2.0, 4.6, PI);
    b.endpoint(30, xd, 2.6, FRAC_PI_2);
    b.endpoint(31, xd + 2.0, 4.6, 0.0);
    let x = b.segment(
        quarter(p(xd, 2.6), p(0.0, 1.0), p(xd + 2.0, 4.6), p(1.0, 0.0), 2.0),
        Direction::Forward,
        (30, 31),
        SegmentRole::MachineExit,
        "M4",
    );
    let f = b.segment(
        line(p(xd + 1.0, 4.6), p(xd - 2.0, 4.6)),
        Direction::Forward,
        (29, 32),
        SegmentRole::MachineEntry,
        "M4",
    );
    let r = b.segment(
        quarter(p(xd - 2.0, 4.6), p(1.0, 0.0), p(xd, 2.6), p(0.0, -1.0), 2.0),
        Direction::Reverse,
        (32, 30),
        SegmentRole::MachineEntry,
        "M4",
    );
    b.node(30, Pose::new(xd, 2.6, FRAC_PI_2), vec![x], vec![f, r]);
    b
}

const NODES: [u32; 8] = [2, 5, 10, 13, 19, 22, 27, 30];

fn request(s: u32, g: u32, planner: PlannerKind) -> RequestEntry {
    RequestEntry {
        id: None,
        start_node: s,
        goal_node: g,
        planner,
        overrides: None,
    }
}

fn write(dir: &Path, name: &str, bytes: &[u8]) {
    let path = dir.join(name);
    fs::create_dir_all(path.parent().unwrap()).unwrap();
    fs::write(&path, bytes).unwrap();
    println!("wrote {}", path.display());
}

fn emit(b: Builder) -> String {
    emit_world(&b.file.into_world().expect("generated world is consistent"))
}

fn scenario_json(s: &ScenarioFile) -> Vec<u8> {
    let mut t = serde_json::to_string_pretty(s).unwrap();
    t.push('\n');
    t.into_bytes()
}

fn main() {
    let out = std::env::args().nth(1).unwrap_or_else(|| "data".into());
    let out = Path::new(&out);

    let map = demo_map();
    write(out, "demo_map.pgm", &map.to_pgm());
    write(out, "demo_world.json", emit(demo_world("demo_map.pgm")).as_bytes());

    let demo = ScenarioFile {
        seed: 7,
        search: None,
        requests: vec![
            RequestEntry {
                id: Some("roadmap_13_19".into()),
                ..request(13, 19, PlannerKind::Roadmap)
            },
            RequestEntry {
                id: Some("waypoint_13_19".into()),
                ..request(13, 19, PlannerKind::Waypoint)
            },
            RequestEntry {
                id: Some("plain_13_19".into()),
                ..request(13, 19, PlannerKind::HybridAstar)
            },
            RequestEntry {
                id: Some("same_area_2_5".into()),
                ..request(2, 5, PlannerKind::Roadmap)
            },
        ],
    };
    write(out, "demo_scenario.json", &scenario_json(&demo));

    let mut all = Vec::new();
    for &s in &NODES {
        for &g in &NODES {
            if s != g {
                all.push(request(s, g, PlannerKind::Roadmap));
            }
        }
    }
    write(
        out,
        "all_pairs.json",
        &scenario_json(&ScenarioFile {
            seed: 7,
            search: None,
            requests: all,
        }),
    );

    let heavy: Vec<RequestEntry> = [(2, 27), (27, 2), (5, 30), (30, 5), (2, 30), (30, 2), (5, 27), (10, 30), (19, 2), (13, 27)]
        .iter()
        .map(|&(s, g)| request(s, g, PlannerKind::Roadmap))
        .collect();
    write(
        out,
        "corridor_heavy.json",
        &scenario_json(&ScenarioFile {
            seed: 7,
            search: None,
            requests: heavy,
        }),
    );

    // Broken copies of the demo world, one planted defect each.
    let mut blocked = demo_map();
    blocked.fill_rect(p(40.2, 6.8), p(40.6, 7.2), true);
    write(out, "broken/collision.pgm", &blocked.to_pgm());
    write(out, "broken/collision.json", emit(demo_world("collision.pgm")).as_bytes());

    let mut sharp = demo_world("../demo_map.pgm");
    // Exit arc of node 5 with its arms shortened: same end tangents, tight bends.
    {
        let seg = sharp
            .file
            .segments
            .iter_mut()
            .find(|s| s.start_ep == 5 && s.end_ep == 6)
            .unwrap();
        let (a, d) = (seg.control_points[0], seg.control_points[3]);
        seg.control_points = vec![a, a + p(0.0, 0.2), d - p(0.2, 0.0), d];
    }
    write(out, "broken/curvature.json", emit(sharp).as_bytes());

    let mut kinked = demo_world("../demo_map.pgm");
    // First half of C2 arrives at endpoint 16 about 10 degrees off its successor.
    {
        let seg = kinked
            .file
            .segments
            .iter_mut()
            .find(|s| s.start_ep == 15 && s.end_ep == 16)
            .unwrap();
        seg.control_points[2] = p(25.73, 7.12);
    }
    write(out, "broken/tangent.json", emit(kinked).as_bytes());

    // One machine area split by a full-height wall.
    let mut g = GridMap::free(100, 50, RES, p(0.0, 0.0)).unwrap();
    g.fill_rect(p(0.0, 0.0), p(20.0, 0.4), true);
    g.fill_rect(p(0.0, 9.6), p(20.0, 10.0), true);
    g.fill_rect(p(0.0, 0.0), p(0.4, 10.0), true);
    g.fill_rect(p(19.6, 0.0), p(20.0, 10.0), true);
    g.fill_rect(p(9.8, 0.0), p(10.2, 10.0), true);
    g.fill_rect(p(3.2, 8.4), p(4.8, 9.6), true);
    g.fill_rect(p(14.2, 8.4), p(15.8, 9.6), true);
    write(out, "unreachable/map.pgm", &g.to_pgm());
    let mut u = Builder::new("map.pgm");
    u.zone("Z", ZoneKind::MachineArea, [0.4, 0.4, 19.6, 9.6]);
    let yd = 7.4;
    for (xd, first) in [(4.0, 1), (15.0, 4)] {
        let (attach, dock, detach) = (first, first + 1, first + 2);
        u.endpoint(attach, xd - 2.0, yd - 2.0, PI);
        u.endpoint(dock, xd, yd, -FRAC_PI_2);
        u.endpoint(detach, xd + 2.0, yd - 2.0, 0.0);
        let exit = u.segment(
            quarter(p(xd, yd), p(0.0, -1.0), p(xd + 2.0, yd - 2.0), p(1.0, 0.0), 2.0),
            Direction::Forward,
            (dock, detach),
            SegmentRole::MachineExit,
            "Z",
        );
        let entry = u.segment(
            quarter(p(xd - 2.0, yd - 2.0), p(1.0, 0.0), p(xd, yd), p(0.0, 1.0), 2.0),
            Direction::Reverse,
            (attach, dock),
            SegmentRole::MachineEntry,
            "Z",
        );
        u.node(dock, Pose::new(xd, yd, -FRAC_PI_2), vec![exit], vec![entry]);
    }
    write(out, "unreachable/world.json", emit(u).as_bytes());
    write(
        out,
        "unreachable/scenario.json",
        &scenario_json(&ScenarioFile {
            seed: 7,
            search: Some(SearchOverrides {
                max_expansions: Some(20_000),
                ..Default::default()
            }),
            requests: vec![request(2, 5, PlannerKind::Roadmap)],
        }),
    );
}
