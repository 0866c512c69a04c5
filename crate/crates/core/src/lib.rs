//! Path planning for car-like vehicles moving between machines in a plant,
//! combining fixed Bezier roadmap segments with Hybrid A* searches.

pub mod bench;
pub mod error;
pub mod geometry;
pub mod grid_map;
pub mod hybrid_astar;
pub mod path;
pub mod planners;
pub mod scenario;
pub mod world;

pub use error::{Error, Result};
pub use geometry::{BezierCurve, Direction, Point, Polygon, Pose, VehicleParams};
pub use grid_map::{CollisionChecker, GridMap};
pub use hybrid_astar::{SearchOverrides, SearchParams};
pub use path::{Path, PathPoint, Provenance};
pub use planners::{PartKind, PlanRequest, PlanResult, Planner, PlannerKind};
pub use world::{validate_roadmap, ValidationReport, World};
