#![allow(dead_code)]

use std::path::PathBuf;

use corridor_planner::scenario::load_world;
use corridor_planner::world::{CheckKind, Subject};
use corridor_planner::{GridMap, World};

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn demo() -> (World, GridMap) {
    load_world(&data_dir().join("demo_world.json"), true).expect("demo world loads")
}

/// Same-area node pairs of the demo world (top and bottom machine of a room).
pub const SAME_AREA: [(u32, u32); 6] = [(2, 5), (5, 2), (10, 13), (19, 22), (22, 19), (27, 30)];

/// Requests crossing one, two and three corridors.
pub const CROSSINGS: [(u32, u32, usize); 3] = [(13, 19, 1), (2, 19, 2), (2, 27, 3)];

/// Each broken fixture and the single violation planted in it.
pub fn broken_fixtures() -> Vec<(&'static str, Subject, CheckKind)> {
    vec![
        ("broken/collision.json", Subject::Segment(15), CheckKind::Collision),
        ("broken/curvature.json", Subject::Segment(2), CheckKind::Curvature),
        (
            "broken/tangent.json",
            Subject::Joint {
                endpoint: 16,
                segments: (13, 14),
            },
            CheckKind::Tangent,
        ),
    ]
}
