//! Runs every scenario request with all three planners and tabulates the
//! resulting path and search metrics.

use std::collections::BTreeMap;
use std::io::Write;

use log::warn;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid_map::GridMap;
use crate::planners::{PlanRequest, Planner, PlannerKind};
use crate::scenario::ScenarioFile;
use crate::world::World;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub request_id: String,
    pub planner: PlannerKind,
    pub solved: bool,
    pub length: Option<f64>,
    pub planning_time: Option<f64>,
    pub expansions: Option<usize>,
    pub direction_switches: Option<usize>,
    pub max_abs_curvature: Option<f64>,
    pub min_clearance: Option<f64>,
    /// Failure message for unsolved rows; not part of the CSV.
    #[serde(skip)]
    pub error: Option<String>,
}

pub const BENCH_HEADER: [&str; 9] = [
    "request_id",
    "planner",
    "solved",
    "length_m",
    "planning_time_s",
    "expansions",
    "direction_switches",
    "max_abs_curvature",
    "min_clearance_m",
];

pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    Some(if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    })
}

/// Each request × each planner, in scenario order then planner order. Rows
/// run serially; the planning time is the median over `repetitions` runs.
pub fn run_suite(
    world: &World,
    grid: &GridMap,
    scenario: &ScenarioFile,
    repetitions: usize,
) -> Result<Vec<BenchRow>> {
    if repetitions == 0 {
        return Err(Error::InvalidInput("repetitions must be ≥ 1".into()));
    }
    let planner = Planner::new(world, grid);
    let mut rows = Vec::new();
    for named in scenario.named_requests() {
        for kind in PlannerKind::ALL {
            let req = PlanRequest {
                planner: kind,
                ..named.request.clone()
            };
            let mut times = Vec::with_capacity(repetitions);
            let mut first = None;
            for _ in 0..repetitions {
                let r = planner.plan(&req);
                if let Ok(res) = &r {
                    times.push(res.metrics.planning_time);
                }
                if first.is_none() {
                    first = Some(r);
                }
            }
            let row = match first.unwrap() {
                Ok(res) => BenchRow {
                    request_id: named.id.clone(),
                    planner: kind,
                    solved: true,
                    length: Some(res.metrics.length),
                    planning_time: median(&mut times),
                    expansions: Some(res.metrics.expansions),
                    direction_switches: Some(res.metrics.direction_switches),
                    max_abs_curvature: Some(res.metrics.max_abs_curvature),
                    min_clearance: Some(res.metrics.min_clearance),
                    error: None,
                },
                Err(e) => {
                    warn!("{} with {}: {e}", named.id, kind.as_str());
                    BenchRow {
                        request_id: named.id.clone(),
                        planner: kind,
                        solved: false,
                        length: None,
                        planning_time: None,
                        expansions: None,
                        direction_switches: None,
                        max_abs_curvature: None,
                        min_clearance: None,
                        error: Some(e.to_string()),
                    }
                }
            };
            rows.push(row);
        }
    }
    Ok(rows)
}

fn f6(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

fn int(v: Option<usize>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Per-planner medians over solved rows.
#[derive(Debug, Clone, PartialEq)]
pub struct PlannerSummary {
    pub planner: PlannerKind,
    pub rows: usize,
    pub solved: usize,
    pub length: Option<f64>,
    pub planning_time: Option<f64>,
    pub expansions: Option<f64>,
    pub direction_switches: Option<f64>,
    pub max_abs_curvature: Option<f64>,
    pub min_clearance: Option<f64>,
}

pub fn summarize(rows: &[BenchRow]) -> Vec<PlannerSummary> {
    let mut by: BTreeMap<PlannerKind, Vec<&BenchRow>> = BTreeMap::new();
    for r in rows {
        by.entry(r.planner).or_default().push(r);
    }
    by.into_iter()
        .map(|(planner, rs)| {
            let solved: Vec<&&BenchRow> = rs.iter().filter(|r| r.solved).collect();
            let med = |f: &dyn Fn(&BenchRow) -> Option<f64>| {
                let mut v: Vec<f64> = solved.iter().filter_map(|r| f(r)).collect();
                median(&mut v)
            };
            PlannerSummary {
                planner,
                rows: rs.len(),
                solved: solved.len(),
                length: med(&|r| r.length),
                planning_time: med(&|r| r.planning_time),
                expansions: med(&|r| r.expansions.map(|x| x as f64)),
                direction_switches: med(&|r| r.direction_switches.map(|x| x as f64)),
                max_abs_curvature: med(&|r| r.max_abs_curvature),
                min_clearance: med(&|r| r.min_clearance),
            }
        })
        .collect()
}

/// Rows in stable column order, then one `summary` line per planner present
/// holding medians over its solved rows. Returns bytes written.
pub fn write_bench_csv(rows: &[BenchRow], sink: impl Write) -> Result<usize> {
    let mut text = String::new();
    text.push_str(&BENCH_HEADER.join(","));
    text.push('\n');
    for r in rows {
        let fields = [
            r.request_id.clone(),
            r.planner.as_str().to_string(),
            r.solved.to_string(),
            f6(r.length),
            f6(r.planning_time),
            int(r.expansions),
            int(r.direction_switches),
            f6(r.max_abs_curvature),
            f6(r.min_clearance),
        ];
        text.push_str(&fields.join(","));
        text.push('\n');
    }
    for s in summarize(rows) {
        let fields = [
            "summary".to_string(),
            s.planner.as_str().to_string(),
            format!("{}/{}", s.solved, s.rows),
            f6(s.length),
            f6(s.planning_time),
            f6(s.expansions),
            f6(s.direction_switches),
            f6(s.max_abs_curvature),
            f6(s.min_clearance),
        ];
        text.push_str(&fields.join(","));
        text.push('\n');
    }
    let mut sink = sink;
    sink.write_all(text.as_bytes())?;
    Ok(text.len())
}
