use serde::{Deserialize, Serialize};

use crate::geometry::{Direction, Pose};

/// Which stage produced a path point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    HybridAstar,
    FixedSegment,
    Analytic,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::HybridAstar => "hybrid_astar",
            Provenance::FixedSegment => "fixed_segment",
            Provenance::Analytic => "analytic",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "hybrid_astar" => Some(Provenance::HybridAstar),
            "fixed_segment" => Some(Provenance::FixedSegment),
            "analytic" => Some(Provenance::Analytic),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathPoint {
    pub pose: Pose,
    /// Direction of travel on the step that arrives at this point.
    pub dir: Direction,
    pub provenance: Provenance,
}

/// Ordered poses with per-point travel direction.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Path {
    pub points: Vec<PathPoint>,
}

impl Path {
    pub fn new(points: Vec<PathPoint>) -> Self {
        Self { points }
    }

    pub fn from_samples(samples: &[(Pose, Direction)], provenance: Provenance) -> Self {
        Self {
            points: samples
                .iter()
                .map(|&(pose, dir)| PathPoint {
                    pose,
                    dir,
                    provenance,
                })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn first(&self) -> Option<&PathPoint> {
        self.points.first()
    }

    pub fn last(&self) -> Option<&PathPoint> {
        self.points.last()
    }

    pub fn poses(&self) -> impl Iterator<Item = &Pose> + '_ {
        self.points.iter().map(|p| &p.pose)
    }

    pub fn samples(&self) -> Vec<(Pose, Direction)> {
        self.points.iter().map(|p| (p.pose, p.dir)).collect()
    }

    /// Sum of Euclidean distances between consecutive positions.
    pub fn length(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| w[0].pose.position().distance(w[1].pose.position()))
            .sum()
    }

    pub fn direction_switches(&self) -> usize {
        self.points.windows(2).filter(|w| w[0].dir != w[1].dir).count()
    }
}
