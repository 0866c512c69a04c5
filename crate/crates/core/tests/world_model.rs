mod common;
mod oracles;

use std::collections::BTreeSet;

use corridor_planner::grid_map::{default_margin, path_collides};
use corridor_planner::world::ZoneKind;
use corridor_planner::Error;

#[test]
fn area_sequence_matches_exhaustive_enumeration() {
    let (world, _) = common::demo();
    let t = oracles::area_sequence_oracle(8, 70, &[&world.topo]);
    assert!(t.checked > 1000);
    assert!(t.positives > 0 && t.positives < t.checked, "some pairs must be disconnected");
    assert_eq!(t.disagreements, 0, "{} of {} pairs disagree", t.disagreements, t.checked);
}

#[test]
fn footprint_matches_half_plane_oracle() {
    let t = oracles::footprint_oracle(64);
    assert_eq!(t.checked, 500);
    assert!(t.positives > 50 && t.positives < 450, "{} collisions", t.positives);
    assert_eq!(t.disagreements, 0);
}

#[test]
fn machine_nodes_locate_in_their_rooms() {
    let (world, _) = common::demo();
    let room = |id: u32| {
        let n = world.seg_graph.node(id).unwrap();
        world.locate_area(n.pose.position()).unwrap().clone()
    };
    assert_eq!(room(2), "M1");
    assert_eq!(room(5), "M1");
    assert_eq!(room(13), "M2");
    assert_eq!(room(19), "M3");
    assert_eq!(room(30), "M4");
    assert!(matches!(
        world.locate_area(corridor_planner::Point::new(12.0, 2.0)),
        Err(Error::OutsideAllZones(..))
    ));
}

#[test]
fn demo_routes_run_room_corridor_room() {
    let (world, _) = common::demo();
    assert_eq!(world.area_sequence("M1", "M1").unwrap(), ["M1"]);
    assert_eq!(world.area_sequence("M4", "M2").unwrap(), ["M4", "C3", "M3", "C2", "M2"]);
    let seq = world.area_sequence("M1", "M4").unwrap();
    assert_eq!(world.topo.corridors_sequence(&seq), ["C1", "C2", "C3"]);
}

#[test]
fn waypoints_sit_on_shared_borders() {
    let (world, _) = common::demo();
    let ids: Vec<String> = world.zones().iter().map(|z| z.id.clone()).collect();
    for a in &ids {
        for b in &ids {
            let seq = world.area_sequence(a, b).unwrap();
            let wps = world.waypoints_sequence(&seq).unwrap();
            assert_eq!(wps.len(), seq.len() - 1);
            for (w, pair) in wps.iter().zip(seq.windows(2)) {
                let (za, zb) = (world.topo.zone(&pair[0]).unwrap(), world.topo.zone(&pair[1]).unwrap());
                let p = w.position();
                assert!(za.rect.on_boundary(p, 1e-9) && zb.rect.on_boundary(p, 1e-9));
                assert!(za.rect.contains(p, 1e-9) && zb.rect.contains(p, 1e-9));
                // Heading points from the earlier zone into the later one.
                let ahead = p + w.heading() * 0.1;
                assert!(zb.rect.contains(ahead, 0.0) && !za.rect.contains(ahead, 0.0));
            }
        }
    }
}

#[test]
fn corridor_endpoints_come_in_pairs() {
    let (world, _) = common::demo();
    let ids: Vec<String> = world.zones().iter().map(|z| z.id.clone()).collect();
    for a in &ids {
        for b in &ids {
            let seq = world.area_sequence(a, b).unwrap();
            let (parts, eps) = world.corridors_path(&seq).unwrap();
            let corridors = world.topo.corridors_sequence(&seq).len();
            assert_eq!(parts.len(), corridors);
            assert_eq!(eps.len(), 2 * corridors);
            for (k, part) in parts.iter().enumerate() {
                assert_eq!(part.first().unwrap().pose, eps[2 * k]);
                assert_eq!(part.last().unwrap().pose, eps[2 * k + 1]);
            }
            // Consecutive corridors are travelled in the direction of the route.
            for w in eps.chunks(2).collect::<Vec<_>>().windows(2) {
                let (from_exit, to_entry) = (w[0][1].position(), w[1][0].position());
                let (from_entry, to_exit) = (w[0][0].position(), w[1][1].position());
                assert!(from_exit.distance(to_entry) < from_entry.distance(to_exit));
            }
        }
    }
}

#[test]
fn fixed_paths_are_collision_free() {
    let (world, grid) = common::demo();
    let m = default_margin(&grid);
    let v = &world.vehicle;
    for n in world.seg_graph.nodes() {
        let (exit, detach) = world.find_exit_path(n.id).unwrap();
        let (entry, attach) = world.find_entry_path(n.id).unwrap();
        assert_eq!(exit.first().unwrap().pose.position(), n.pose.position());
        assert_eq!(entry.last().unwrap().pose.position(), n.pose.position());
        assert_eq!(exit.last().unwrap().pose, detach);
        assert_eq!(entry.first().unwrap().pose, attach);
        assert_eq!(path_collides(&exit.samples(), v, &grid, m), None, "exit of {}", n.id);
        assert_eq!(path_collides(&entry.samples(), v, &grid, m), None, "entry of {}", n.id);
    }
    for z in world.zones().iter().filter(|z| z.kind == ZoneKind::Corridor) {
        let chain = world.seg_graph.corridor_chain(&z.id).unwrap();
        for flip in [false, true] {
            let ordered: Vec<usize> = if flip { chain.iter().rev().copied().collect() } else { chain.clone() };
            let p = world.seg_graph.sample_chain(&ordered, world.sample_step(), flip).unwrap();
            assert_eq!(path_collides(&p.samples(), v, &grid, m), None, "corridor {}", z.id);
        }
    }
}

#[test]
fn segment_adjacency_is_endpoint_sharing() {
    let (world, _) = common::demo();
    let segs = world.seg_graph.segments();
    let ends = |i: usize| BTreeSet::from([segs[i].start_ep, segs[i].end_ep]);
    for i in 0..segs.len() {
        let adj: BTreeSet<usize> = world.seg_graph.adjacent(i).into_iter().collect();
        for j in 0..segs.len() {
            let shares = i != j && !ends(i).is_disjoint(&ends(j));
            assert_eq!(adj.contains(&j), shares, "segments {i} and {j}");
            assert_eq!(adj.contains(&j), world.seg_graph.adjacent(j).contains(&i));
        }
    }
}

#[test]
fn missing_node_is_reported() {
    let (world, _) = common::demo();
    assert!(matches!(world.find_exit_path(99), Err(Error::UnknownNode(99))));
}
