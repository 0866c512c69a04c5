use std::fmt::Write as _;
use std::io::Write;

use crate::error::Result;
use crate::geometry::{Direction, Point};
use crate::grid_map::GridMap;
use crate::path::{Path, Provenance};
use crate::planners::PartKind;
use crate::world::{World, ZoneKind};

const PX_PER_M: f64 = 20.0;

struct Frame {
    origin: Point,
    height_m: f64,
}

impl Frame {
    fn x(&self, p: Point) -> f64 {
        (p.x - self.origin.x) * PX_PER_M
    }

    fn y(&self, p: Point) -> f64 {
        (self.height_m - (p.y - self.origin.y)) * PX_PER_M
    }

    fn xy(&self, p: Point) -> String {
        format!("{:.2},{:.2}", self.x(p), self.y(p))
    }
}

fn part_color(kind: PartKind) -> &'static str {
    match kind {
        PartKind::Exit => "#e67e22",
        PartKind::Corridor => "#8e44ad",
        PartKind::Hybrid => "#16a085",
        PartKind::Entry => "#2c3e50",
    }
}

/// Splits a path into display parts by provenance: fixed-segment runs are
/// the exit (first), entry (last) and corridor (in between) parts; searched
/// and analytic runs are merged into hybrid parts.
pub fn parts_from_provenance(path: &Path) -> Vec<(PartKind, Path)> {
    let fixed = |p: Provenance| p == Provenance::FixedSegment;
    let mut runs: Vec<(bool, Path)> = Vec::new();
    for (i, pt) in path.points.iter().enumerate() {
        let f = fixed(pt.provenance);
        match runs.last_mut() {
            Some((rf, run)) if *rf == f => run.points.push(*pt),
            _ => {
                let mut run = Path::default();
                if i > 0 {
                    run.points.push(path.points[i - 1]);
                }
                run.points.push(*pt);
                runs.push((f, run));
            }
        }
    }
    let n = runs.len();
    runs.into_iter()
        .enumerate()
        .map(|(i, (f, run))| {
            let kind = match (f, i) {
                (false, _) => PartKind::Hybrid,
                (true, 0) => PartKind::Exit,
                (true, i) if i + 1 == n => PartKind::Entry,
                (true, _) => PartKind::Corridor,
            };
            (kind, run)
        })
        .collect()
}

/// Draws the occupancy, zones, roadmap segments with endpoint labels, and an
/// optional planned path (one polyline per part). Returns bytes written.
pub fn render_svg(
    world: &World,
    grid: &GridMap,
    parts: &[(PartKind, Path)],
    mut out: impl Write,
) -> Result<usize> {
    let res = grid.resolution();
    let (w_m, h_m) = (grid.width() as f64 * res, grid.height() as f64 * res);
    let f = Frame {
        origin: grid.origin(),
        height_m: h_m,
    };
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{:.0}" viewBox="0 0 {:.2} {:.2}">"#,
        w_m * PX_PER_M,
        h_m * PX_PER_M,
        w_m * PX_PER_M,
        h_m * PX_PER_M
    );
    let _ = writeln!(
        s,
        "<style>.segment{{fill:none;stroke-width:2}}.reverse{{stroke-dasharray:6 3}}.part{{fill:none;stroke-width:3}}text{{font:10px sans-serif}}</style>"
    );

    // Occupied cells, merged into horizontal runs.
    let mut d = String::new();
    for iy in 0..grid.height() {
        let mut ix = 0;
        while ix < grid.width() {
            if !grid.is_occupied(ix, iy) {
                ix += 1;
                continue;
            }
            let start = ix;
            while ix < grid.width() && grid.is_occupied(ix, iy) {
                ix += 1;
            }
            let lo = grid.origin() + Point::new(start as f64 * res, (iy + 1) as f64 * res);
            let _ = write!(
                d,
                "M{} h{:.2} v{:.2} h{:.2} z ",
                f.xy(lo),
                (ix - start) as f64 * res * PX_PER_M,
                res * PX_PER_M,
                -((ix - start) as f64) * res * PX_PER_M
            );
        }
    }
    let _ = writeln!(s, r##"<path class="occupied" fill="#333333" d="{}"/>"##, d.trim_end());

    for z in world.zones() {
        let (class, stroke) = match z.kind {
            ZoneKind::MachineArea => ("zone machine_area", "#2ecc40"),
            ZoneKind::Corridor => ("zone corridor", "#ff69b4"),
        };
        let top_left = Point::new(z.rect.min.x, z.rect.max.y);
        let _ = writeln!(
            s,
            r#"<rect class="{class}" data-id="{}" x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="{stroke}" stroke-width="2"/>"#,
            z.id,
            f.x(top_left),
            f.y(top_left),
            (z.rect.max.x - z.rect.min.x) * PX_PER_M,
            (z.rect.max.y - z.rect.min.y) * PX_PER_M
        );
    }

    for (i, seg) in world.seg_graph.segments().iter().enumerate() {
        let pts: Vec<String> = (0..=40)
            .map(|k| f.xy(seg.curve.point(k as f64 / 40.0).expect("t in range")))
            .collect();
        let (class, style) = match seg.direction {
            Direction::Forward => ("segment forward", "stroke:red"),
            Direction::Reverse => ("segment reverse", "stroke:blue;stroke-dasharray:6 3"),
        };
        let _ = writeln!(
            s,
            r#"<path class="{class}" data-index="{i}" style="{style}" d="M{}"/>"#,
            pts.join(" L")
        );
    }

    for ep in world.seg_graph.endpoints() {
        let p = ep.pose.position();
        let _ = writeln!(
            s,
            r#"<circle class="endpoint" cx="{:.2}" cy="{:.2}" r="3" fill="black"/>"#,
            f.x(p),
            f.y(p)
        );
        let _ = writeln!(
            s,
            r#"<text class="endpoint-label" x="{:.2}" y="{:.2}">{}</text>"#,
            f.x(p) + 4.0,
            f.y(p) - 4.0,
            ep.id
        );
    }

    for (kind, part) in parts {
        let pts: Vec<String> = part.poses().map(|p| f.xy(p.position())).collect();
        let _ = writeln!(
            s,
            r#"<polyline class="part {}" style="stroke:{}" points="{}"/>"#,
            kind.as_str(),
            part_color(*kind),
            pts.join(" ")
        );
    }
    s.push_str("</svg>\n");
    out.write_all(s.as_bytes())?;
    Ok(s.len())
}
