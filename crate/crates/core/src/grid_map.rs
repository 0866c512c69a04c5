//! Occupancy grid, PGM I/O, footprint collision checks and the derived
//! distance and cost fields.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};
use crate::geometry::{inflated_corners, Direction, Point, Pose, VehicleParams};

/// Boolean occupancy raster. Cell `(0, 0)` is the bottom-left cell; its
/// lower-left corner sits at `origin`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMap {
    width: usize,
    height: usize,
    resolution: f64,
    origin: Point,
    occupied: Vec<bool>,
}

impl GridMap {
    pub fn new(
        width: usize,
        height: usize,
        resolution: f64,
        origin: Point,
        occupied: Vec<bool>,
    ) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidInput(format!(
                "grid dimensions must be >= 1, got {width}x{height}"
            )));
        }
        if !(resolution > 0.0) || !resolution.is_finite() {
            return Err(Error::InvalidInput(format!(
                "grid resolution must be > 0, got {resolution}"
            )));
        }
        if occupied.len() != width * height {
            return Err(Error::InvalidInput(format!(
                "occupancy has {} cells, expected {}",
                occupied.len(),
                width * height
            )));
        }
        Ok(Self {
            width,
            height,
            resolution,
            origin,
            occupied,
        })
    }

    pub fn free(width: usize, height: usize, resolution: f64, origin: Point) -> Result<Self> {
        Self::new(width, height, resolution, origin, vec![false; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn origin(&self) -> Point {
        self.origin
    }

    /// World coordinates of the upper-right map corner.
    pub fn max_corner(&self) -> Point {
        self.origin
            + Point::new(
                self.width as f64 * self.resolution,
                self.height as f64 * self.resolution,
            )
    }

    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.width + ix
    }

    pub fn is_occupied(&self, ix: usize, iy: usize) -> bool {
        self.occupied[self.index(ix, iy)]
    }

    pub fn set_occupied(&mut self, ix: usize, iy: usize, value: bool) {
        let i = self.index(ix, iy);
        self.occupied[i] = value;
    }

    pub fn occupancy(&self) -> &[bool] {
        &self.occupied
    }

    pub fn occupied_count(&self) -> usize {
        self.occupied.iter().filter(|&&o| o).count()
    }

    pub fn cell_center(&self, ix: usize, iy: usize) -> Point {
        self.origin
            + Point::new(
                (ix as f64 + 0.5) * self.resolution,
                (iy as f64 + 0.5) * self.resolution,
            )
    }

    /// Cell containing a world point, or `None` outside the map.
    pub fn world_to_cell(&self, p: Point) -> Option<(usize, usize)> {
        let fx = ((p.x - self.origin.x) / self.resolution).floor();
        let fy = ((p.y - self.origin.y) / self.resolution).floor();
        if fx < 0.0 || fy < 0.0 || fx >= self.width as f64 || fy >= self.height as f64 {
            return None;
        }
        Some((fx as usize, fy as usize))
    }

    /// Marks every cell whose center lies in the axis-aligned box.
    pub fn fill_rect(&mut self, min: Point, max: Point, value: bool) {
        for iy in 0..self.height {
            for ix in 0..self.width {
                let c = self.cell_center(ix, iy);
                if c.x >= min.x && c.x <= max.x && c.y >= min.y && c.y <= max.y {
                    self.set_occupied(ix, iy, value);
                }
            }
        }
    }

    /// Binary PGM (P5) with occupied cells black and free cells white. Row 0
    /// of the image is the top of the map.
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        for row in 0..self.height {
            let iy = self.height - 1 - row;
            for ix in 0..self.width {
                out.push(if self.is_occupied(ix, iy) { 0 } else { 255 });
            }
        }
        out
    }
}

struct PgmTokens<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> PgmTokens<'a> {
    fn skip_space_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            if b == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn next_token(&mut self) -> Option<&'a [u8]> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.bytes[start..self.pos])
    }

    fn next_number(&mut self, what: &str) -> Result<usize> {
        let tok = self
            .next_token()
            .ok_or_else(|| Error::Parse(format!("PGM: missing {what}")))?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| {
                Error::Parse(format!(
                    "PGM: bad {what} '{}'",
                    String::from_utf8_lossy(tok)
                ))
            })
    }
}

/// Parses a P2 or P5 PGM image into an occupancy grid. A cell is occupied
/// when its gray value (rescaled to 0..=255) is below `occupied_threshold`.
pub fn load_grid(
    pgm_bytes: &[u8],
    resolution: f64,
    origin: Point,
    occupied_threshold: u8,
) -> Result<GridMap> {
    let mut tok = PgmTokens {
        bytes: pgm_bytes,
        pos: 0,
    };
    let magic = tok
        .next_token()
        .ok_or_else(|| Error::Parse("PGM: empty input".into()))?;
    let binary = match magic {
        b"P5" => true,
        b"P2" => false,
        other => {
            return Err(Error::Parse(format!(
                "PGM: unsupported magic '{}'",
                String::from_utf8_lossy(other)
            )))
        }
    };
    let width = tok.next_number("width")?;
    let height = tok.next_number("height")?;
    let maxval = tok.next_number("maxval")?;
    if maxval == 0 || maxval > 255 {
        return Err(Error::Parse(format!("PGM: maxval {maxval} not in 1..=255")));
    }
    if width == 0 || height == 0 {
        return Err(Error::InvalidInput(format!(
            "PGM has zero dimension {width}x{height}"
        )));
    }
    let n = width * height;
    let raw: Vec<usize> = if binary {
        // Exactly one whitespace byte separates the header from the raster.
        let start = tok.pos + 1;
        let data = pgm_bytes
            .get(start..start + n)
            .ok_or_else(|| Error::Parse(format!("PGM: raster truncated, expected {n} bytes")))?;
        data.iter().map(|&b| b as usize).collect()
    } else {
        (0..n)
            .map(|_| tok.next_number("pixel"))
            .collect::<Result<_>>()?
    };
    let mut occupied = vec![false; n];
    for row in 0..height {
        let iy = height - 1 - row;
        for ix in 0..width {
            let v = raw[row * width + ix];
            if v > maxval {
                return Err(Error::Parse(format!("PGM: pixel {v} exceeds maxval {maxval}")));
            }
            let gray = v * 255 / maxval;
            occupied[iy * width + ix] = gray < occupied_threshold as usize;
        }
    }
    GridMap::new(width, height, resolution, origin, occupied)
}

/// Default collision margin for a grid: half a cell diagonal.
pub fn default_margin(g: &GridMap) -> f64 {
    g.resolution() / SQRT_2
}

/// True iff an occupied cell center lies inside the footprint rectangle grown
/// by `margin`, or the grown rectangle leaves the map.
pub fn footprint_collides(p: &Pose, v: &VehicleParams, g: &GridMap, margin: f64) -> bool {
    let corners = inflated_corners(p, v, margin);
    let lo = g.origin();
    let hi = g.max_corner();
    if corners
        .iter()
        .any(|c| c.x < lo.x || c.y < lo.y || c.x > hi.x || c.y > hi.y)
    {
        return true;
    }
    let min_x = corners.iter().map(|c| c.x).fold(f64::INFINITY, f64::min);
    let max_x = corners.iter().map(|c| c.x).fold(f64::NEG_INFINITY, f64::max);
    let min_y = corners.iter().map(|c| c.y).fold(f64::INFINITY, f64::min);
    let max_y = corners.iter().map(|c| c.y).fold(f64::NEG_INFINITY, f64::max);
    // Index ranges of cells whose centers fall inside the bounding box.
    let res = g.resolution();
    let lo_idx = |v: f64, o: f64| ((v - o) / res - 0.5).ceil().max(0.0) as i64;
    let hi_idx = |v: f64, o: f64, n: usize| (((v - o) / res - 0.5).floor() as i64).min(n as i64 - 1);
    let (ix0, ix1) = (lo_idx(min_x, lo.x), hi_idx(max_x, lo.x, g.width()));
    let (iy0, iy1) = (lo_idx(min_y, lo.y), hi_idx(max_y, lo.y, g.height()));

    let center = v.center(p);
    let fwd = p.heading();
    let hl = v.length / 2.0 + margin;
    let hw = v.width / 2.0 + margin;
    for iy in iy0..=iy1 {
        for ix in ix0..=ix1 {
            let (ix, iy) = (ix as usize, iy as usize);
            if !g.is_occupied(ix, iy) {
                continue;
            }
            let d = g.cell_center(ix, iy) - center;
            if d.dot(fwd).abs() <= hl && d.cross(fwd).abs() <= hw {
                return true;
            }
        }
    }
    false
}

/// Index of the first pose in collision, if any.
pub fn path_collides(
    path: &[(Pose, Direction)],
    v: &VehicleParams,
    g: &GridMap,
    margin: f64,
) -> Option<usize> {
    path.iter()
        .position(|(p, _)| footprint_collides(p, v, g, margin))
}

/// Per-cell Euclidean distance (meters) from the cell center to the nearest
/// occupied cell center. Occupied cells hold 0; a map without obstacles is
/// all `+∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceField {
    width: usize,
    height: usize,
    resolution: f64,
    origin: Point,
    values: Vec<f64>,
}

impl DistanceField {
    pub fn get(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.width + ix]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Distance at the cell containing `p`; 0 outside the map.
    pub fn at(&self, p: Point) -> f64 {
        let fx = ((p.x - self.origin.x) / self.resolution).floor();
        let fy = ((p.y - self.origin.y) / self.resolution).floor();
        if fx < 0.0 || fy < 0.0 || fx >= self.width as f64 || fy >= self.height as f64 {
            return 0.0;
        }
        self.get(fx as usize, fy as usize)
    }
}

const EDT_FAR: f64 = 1e20;

/// Exact 1D squared distance transform of a sampled function
/// (lower envelope of parabolas).
fn edt_1d(f: &[f64], out: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let n = f.len();
    let parabola_cut = |q: usize, p: usize| {
        ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64))
    };
    let mut k = 0usize;
    v[0] = 0;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in 1..n {
        let mut s = parabola_cut(q, v[k]);
        while s <= z[k] {
            k -= 1;
            s = parabola_cut(q, v[k]);
        }
        k += 1;
        v[k] = q;
        z[k] = s;
        z[k + 1] = f64::INFINITY;
    }
    k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let d = q as f64 - v[k] as f64;
        *o = d * d + f[v[k]];
    }
}

/// Exact Euclidean distance transform over the grid (separable, two passes).
pub fn distance_field(g: &GridMap) -> DistanceField {
    let (w, h) = (g.width(), g.height());
    let mut grid: Vec<f64> = g
        .occupancy()
        .iter()
        .map(|&o| if o { 0.0 } else { EDT_FAR })
        .collect();
    let n = w.max(h);
    let mut f = vec![0.0; n];
    let mut out = vec![0.0; n];
    let mut v = vec![0usize; n];
    let mut z = vec![0.0; n + 1];

    for ix in 0..w {
        for iy in 0..h {
            f[iy] = grid[iy * w + ix];
        }
        edt_1d(&f[..h], &mut out[..h], &mut v, &mut z);
        for iy in 0..h {
            grid[iy * w + ix] = out[iy];
        }
    }
    for iy in 0..h {
        f[..w].copy_from_slice(&grid[iy * w..(iy + 1) * w]);
        edt_1d(&f[..w], &mut out[..w], &mut v, &mut z);
        grid[iy * w..(iy + 1) * w].copy_from_slice(&out[..w]);
    }
    let res = g.resolution();
    let values = grid
        .into_iter()
        .map(|d2| if d2 >= EDT_FAR / 2.0 { f64::INFINITY } else { d2.sqrt() * res })
        .collect();
    DistanceField {
        width: w,
        height: h,
        resolution: res,
        origin: g.origin(),
        values,
    }
}

/// Shortest 8-connected distance (meters) from each cell to a goal cell,
/// through cells that can host the vehicle's reference-point disc.
#[derive(Debug, Clone, PartialEq)]
pub struct CostField {
    width: usize,
    height: usize,
    resolution: f64,
    origin: Point,
    goal_cell: (usize, usize),
    values: Vec<f64>,
}

impl CostField {
    pub fn get(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.width + ix]
    }

    pub fn goal_cell(&self) -> (usize, usize) {
        self.goal_cell
    }

    /// Cost at the cell containing `p`; `+∞` outside the map.
    pub fn at(&self, p: Point) -> f64 {
        let fx = ((p.x - self.origin.x) / self.resolution).floor();
        let fy = ((p.y - self.origin.y) / self.resolution).floor();
        if fx < 0.0 || fy < 0.0 || fx >= self.width as f64 || fy >= self.height as f64 {
            return f64::INFINITY;
        }
        self.get(fx as usize, fy as usize)
    }
}

#[derive(Copy, Clone, PartialEq)]
struct Frontier {
    cost: f64,
    idx: usize,
}

impl Eq for Frontier {}

impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.idx.cmp(&self.idx))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Cells whose center could be within half a cell diagonal of a collision-free
/// reference point, judged by the inscribed disc of the footprint.
pub fn passable_cells(df: &DistanceField, v: &VehicleParams) -> Vec<bool> {
    let slack = df.resolution / SQRT_2;
    let need = v.inscribed_radius() - slack;
    df.values.iter().map(|&d| d > 0.0 && d >= need).collect()
}

/// 8-connected Dijkstra from the goal cell over passable cells. Straight
/// steps cost one resolution, diagonal steps `√2` resolutions.
pub fn holonomic_cost_field(g: &GridMap, goal: &Pose, v: &VehicleParams) -> Result<CostField> {
    let df = distance_field(g);
    holonomic_cost_field_with(g, &df, goal, v)
}

pub(crate) fn holonomic_cost_field_with(
    g: &GridMap,
    df: &DistanceField,
    goal: &Pose,
    v: &VehicleParams,
) -> Result<CostField> {
    let (gx, gy) = g.world_to_cell(goal.position()).ok_or_else(|| {
        Error::InvalidInput(format!(
            "goal ({:.3}, {:.3}) is outside the map",
            goal.x, goal.y
        ))
    })?;
    let passable = passable_cells(df, v);
    let (w, h) = (g.width(), g.height());
    if !passable[gy * w + gx] {
        return Err(Error::GoalBlocked(gx, gy));
    }
    let res = g.resolution();
    let mut cost = vec![f64::INFINITY; w * h];
    let mut heap = BinaryHeap::new();
    let start = gy * w + gx;
    cost[start] = 0.0;
    heap.push(Frontier { cost: 0.0, idx: start });
    const STEPS: [(i64, i64, f64); 8] = [
        (1, 0, 1.0),
        (-1, 0, 1.0),
        (0, 1, 1.0),
        (0, -1, 1.0),
        (1, 1, SQRT_2),
        (1, -1, SQRT_2),
        (-1, 1, SQRT_2),
        (-1, -1, SQRT_2),
    ];
    while let Some(Frontier { cost: c, idx }) = heap.pop() {
        if c > cost[idx] {
            continue;
        }
        let (ix, iy) = ((idx % w) as i64, (idx / w) as i64);
        for (dx, dy, k) in STEPS {
            let (nx, ny) = (ix + dx, iy + dy);
            if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                continue;
            }
            let ni = ny as usize * w + nx as usize;
            if !passable[ni] {
                continue;
            }
            let nc = c + k * res;
            if nc < cost[ni] {
                cost[ni] = nc;
                heap.push(Frontier { cost: nc, idx: ni });
            }
        }
    }
    Ok(CostField {
        width: w,
        height: h,
        resolution: res,
        origin: g.origin(),
        goal_cell: (gx, gy),
        values: cost,
    })
}

/// Footprint collision checker with a distance-field shortcut for poses far
/// from any obstacle. Answers are identical to [`footprint_collides`].
#[derive(Debug, Clone)]
pub struct CollisionChecker<'a> {
    grid: &'a GridMap,
    vehicle: VehicleParams,
    margin: f64,
    field: DistanceField,
    clear_radius: f64,
}

impl<'a> CollisionChecker<'a> {
    pub fn new(grid: &'a GridMap, vehicle: VehicleParams, margin: f64) -> Self {
        let field = distance_field(grid);
        Self::with_field(grid, vehicle, margin, field)
    }

    pub fn with_field(
        grid: &'a GridMap,
        vehicle: VehicleParams,
        margin: f64,
        field: DistanceField,
    ) -> Self {
        let hl = vehicle.length / 2.0 + margin;
        let hw = vehicle.width / 2.0 + margin;
        let clear_radius = hl.hypot(hw) + grid.resolution() / SQRT_2;
        Self {
            grid,
            vehicle,
            margin,
            field,
            clear_radius,
        }
    }

    pub fn grid(&self) -> &GridMap {
        self.grid
    }

    pub fn vehicle(&self) -> &VehicleParams {
        &self.vehicle
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    pub fn field(&self) -> &DistanceField {
        &self.field
    }

    pub fn collides(&self, p: &Pose) -> bool {
        let c = self.vehicle.center(p);
        if let Some((ix, iy)) = self.grid.world_to_cell(c) {
            if self.field.get(ix, iy) > self.clear_radius {
                // No occupied center within reach; only the map edge can hit.
                let corners = inflated_corners(p, &self.vehicle, self.margin);
                let lo = self.grid.origin();
                let hi = self.grid.max_corner();
                return corners
                    .iter()
                    .any(|q| q.x < lo.x || q.y < lo.y || q.x > hi.x || q.y > hi.y);
            }
        }
        footprint_collides(p, &self.vehicle, self.grid, self.margin)
    }

    pub fn first_collision(&self, path: &[(Pose, Direction)]) -> Option<usize> {
        path.iter().position(|(p, _)| self.collides(p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn vehicle() -> VehicleParams {
        VehicleParams::new(1.2, 0.7, 0.3, 1.5).unwrap()
    }

    fn random_grid(rng: &mut ChaCha8Rng, w: usize, h: usize, p: f64) -> GridMap {
        let occ = (0..w * h).map(|_| rng.gen_bool(p)).collect();
        GridMap::new(w, h, 0.25, Point::new(-1.0, 2.0), occ).unwrap()
    }

    #[test]
    fn load_p2_thresholds_top_row_first() {
        let g = load_grid(b"P2\n2 2\n255\n255 0\n255 255\n", 0.5, Point::default(), 128).unwrap();
        assert_eq!(g.occupied_count(), 1);
        // Image row 0 is the top of the map.
        assert!(g.is_occupied(1, 1));
    }

    #[test]
    fn load_free_image() {
        let g = load_grid(b"P2\n# comment\n3 2\n255\n255 255 255\n255 255 255\n", 1.0, Point::default(), 128).unwrap();
        assert_eq!(g.occupied_count(), 0);
    }

    #[test]
    fn p2_and_p5_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (w, h) = (7, 5);
        let pixels: Vec<u8> = (0..w * h).map(|_| rng.gen()).collect();
        let mut p2 = format!("P2\n{w} {h}\n255\n");
        for row in pixels.chunks(w) {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            p2.push_str(&line.join(" "));
            p2.push('\n');
        }
        let mut p5 = format!("P5\n{w} {h}\n255\n").into_bytes();
        p5.extend_from_slice(&pixels);
        let a = load_grid(p2.as_bytes(), 0.1, Point::default(), 128).unwrap();
        let b = load_grid(&p5, 0.1, Point::default(), 128).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn malformed_pgm_rejected() {
        assert!(matches!(load_grid(b"P6\n1 1\n255\n\0", 1.0, Point::default(), 128), Err(Error::Parse(_))));
        assert!(matches!(load_grid(b"P2\n2 2\n255\n1 2 3\n", 1.0, Point::default(), 128), Err(Error::Parse(_))));
        assert!(matches!(load_grid(b"P5\n4 4\n255\nab", 1.0, Point::default(), 128), Err(Error::Parse(_))));
        assert!(matches!(load_grid(b"P2\n2 2\n1000\n", 1.0, Point::default(), 128), Err(Error::Parse(_))));
        assert!(matches!(load_grid(b"P2\n0 2\n255\n", 1.0, Point::default(), 128), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn reemit_is_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = random_grid(&mut rng, 13, 9, 0.3);
        let g2 = load_grid(&g.to_pgm(), g.resolution(), g.origin(), 128).unwrap();
        let g3 = load_grid(&g2.to_pgm(), g.resolution(), g.origin(), 128).unwrap();
        assert_eq!(g.occupancy(), g2.occupancy());
        assert_eq!(g2, g3);
    }

    #[test]
    fn empty_map_never_collides_in_bounds() {
        let g = GridMap::free(40, 40, 0.25, Point::default()).unwrap();
        assert!(!footprint_collides(&Pose::new(5.0, 5.0, 0.7), &vehicle(), &g, 0.1));
        // Leaving the map is a collision.
        assert!(footprint_collides(&Pose::new(0.2, 5.0, 0.0), &vehicle(), &g, 0.1));
    }

    #[test]
    fn covered_cell_collides() {
        let mut g = GridMap::free(40, 40, 0.25, Point::default()).unwrap();
        let (ix, iy) = g.world_to_cell(Point::new(5.3, 5.0)).unwrap();
        g.set_occupied(ix, iy, true);
        assert!(footprint_collides(&Pose::new(5.0, 5.0, 0.0), &vehicle(), &g, 0.0));
        assert!(!footprint_collides(&Pose::new(5.0, 8.0, 0.0), &vehicle(), &g, 0.0));
    }

    #[test]
    fn path_collides_reports_first_index() {
        let mut g = GridMap::free(40, 40, 0.25, Point::default()).unwrap();
        let path: Vec<(Pose, Direction)> = (0..10)
            .map(|i| (Pose::new(2.0 + i as f64 * 0.5, 5.0, 0.0), Direction::Forward))
            .collect();
        assert_eq!(path_collides(&path, &vehicle(), &g, 0.1), None);
        let (ix, iy) = g.world_to_cell(Point::new(6.3 + 0.3, 5.0)).unwrap();
        g.set_occupied(ix, iy, true);
        let hit = path_collides(&path, &vehicle(), &g, 0.0).unwrap();
        assert!(footprint_collides(&path[hit].0, &vehicle(), &g, 0.0));
        assert!(path[..hit].iter().all(|(p, _)| !footprint_collides(p, &vehicle(), &g, 0.0)));
    }

    #[test]
    fn distance_field_basics() {
        let g = GridMap::free(6, 4, 0.5, Point::default()).unwrap();
        assert!(distance_field(&g).values().iter().all(|d| d.is_infinite()));
        let mut g = g;
        g.set_occupied(2, 1, true);
        let df = distance_field(&g);
        assert_eq!(df.get(2, 1), 0.0);
        assert!((df.get(5, 3) - 0.5 * (9.0f64 + 4.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn distance_field_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let g = random_grid(&mut rng, 16, 16, 0.08);
            let df = distance_field(&g);
            for iy in 0..16 {
                for ix in 0..16 {
                    let mut best = f64::INFINITY;
                    for jy in 0..16 {
                        for jx in 0..16 {
                            if g.is_occupied(jx, jy) {
                                best = best.min(g.cell_center(ix, iy).distance(g.cell_center(jx, jy)));
                            }
                        }
                    }
                    let d = df.get(ix, iy);
                    if best.is_infinite() {
                        assert!(d.is_infinite());
                    } else {
                        assert!((d - best).abs() <= 0.42 * g.resolution(), "{d} vs {best}");
                        assert!((d - best).abs() < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn cost_field_free_map_is_octile() {
        let g = GridMap::free(20, 15, 0.2, Point::default()).unwrap();
        let goal = Pose::new(g.cell_center(4, 9).x, g.cell_center(4, 9).y, 0.0);
        let cf = holonomic_cost_field(&g, &goal, &vehicle()).unwrap();
        assert_eq!(cf.get(4, 9), 0.0);
        for iy in 0..15 {
            for ix in 0..20 {
                let dx = (ix as f64 - 4.0).abs();
                let dy = (iy as f64 - 9.0).abs();
                let octile = dx.max(dy) + (SQRT_2 - 1.0) * dx.min(dy);
                assert!((cf.get(ix, iy) - octile * 0.2).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn cost_field_walled_region_unreachable() {
        let mut g = GridMap::free(30, 30, 0.2, Point::default()).unwrap();
        // Closed box around the lower-left corner.
        g.fill_rect(Point::new(0.0, 2.0), Point::new(2.0, 2.4), true);
        g.fill_rect(Point::new(2.0, 0.0), Point::new(2.4, 2.4), true);
        let cf = holonomic_cost_field(&g, &Pose::new(4.5, 4.5, 0.0), &vehicle()).unwrap();
        assert!(cf.at(Point::new(0.5, 0.5)).is_infinite());
        assert!(cf.at(Point::new(5.0, 5.0)).is_finite());
    }

    #[test]
    fn cost_field_blocked_goal() {
        let mut g = GridMap::free(30, 30, 0.2, Point::default()).unwrap();
        g.fill_rect(Point::new(2.0, 2.0), Point::new(3.0, 3.0), true);
        assert!(matches!(
            holonomic_cost_field(&g, &Pose::new(2.5, 2.5, 0.0), &vehicle()),
            Err(Error::GoalBlocked(..))
        ));
    }

    /// Brute-force shortest 8-connected path over cells where the disc fits,
    /// relaxed until nothing changes (Bellman-Ford).
    fn bellman_ford(g: &GridMap, goal: (usize, usize), v: &VehicleParams) -> Vec<f64> {
        let (w, h) = (g.width(), g.height());
        let slack = g.resolution() / SQRT_2;
        let ok = |ix: usize, iy: usize| {
            let c = g.cell_center(ix, iy);
            let mut best = f64::INFINITY;
            for jy in 0..h {
                for jx in 0..w {
                    if g.is_occupied(jx, jy) {
                        best = best.min(c.distance(g.cell_center(jx, jy)));
                    }
                }
            }
            best > 0.0 && best >= v.inscribed_radius() - slack
        };
        let pass: Vec<bool> = (0..w * h).map(|i| ok(i % w, i / w)).collect();
        let mut d = vec![f64::INFINITY; w * h];
        d[goal.1 * w + goal.0] = 0.0;
        loop {
            let mut changed = false;
            for i in 0..w * h {
                if !pass[i] {
                    continue;
                }
                let (x, y) = ((i % w) as i64, (i / w) as i64);
                for dx in -1..=1i64 {
                    for dy in -1..=1i64 {
                        let (nx, ny) = (x + dx, y + dy);
                        if (dx, dy) == (0, 0) || nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                            continue;
                        }
                        let j = ny as usize * w + nx as usize;
                        let step = ((dx * dx + dy * dy) as f64).sqrt() * g.resolution();
                        if d[j] + step < d[i] - 1e-12 {
                            d[i] = d[j] + step;
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                return d;
            }
        }
    }

    #[test]
    fn cost_field_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let v = VehicleParams::new(0.6, 0.4, 0.0, 1.0).unwrap();
        for _ in 0..4 {
            let g = random_grid(&mut rng, 24, 24, 0.04);
            let Some(goal) = (0..24 * 24).find(|&i| {
                let c = g.cell_center(i % 24, i / 24);
                holonomic_cost_field(&g, &Pose::new(c.x, c.y, 0.0), &v).is_ok()
            }) else {
                continue;
            };
            let (gx, gy) = (goal % 24, goal / 24);
            let c = g.cell_center(gx, gy);
            let cf = holonomic_cost_field(&g, &Pose::new(c.x, c.y, 0.0), &v).unwrap();
            let bf = bellman_ford(&g, (gx, gy), &v);
            for iy in 0..24 {
                for ix in 0..24 {
                    let (a, b) = (cf.get(ix, iy), bf[iy * 24 + ix]);
                    assert!(a == b || (a - b).abs() < 1e-9, "{a} vs {b}");
                }
            }
        }
    }

    /// Oracle: every occupied cell center against the four half-planes of the
    /// inflated rectangle, plus the map-boundary rule.
    fn half_plane_oracle(p: &Pose, v: &VehicleParams, g: &GridMap, margin: f64) -> bool {
        let c = inflated_corners(p, v, margin);
        let (lo, hi) = (g.origin(), g.max_corner());
        if c.iter().any(|q| q.x < lo.x || q.y < lo.y || q.x > hi.x || q.y > hi.y) {
            return true;
        }
        for iy in 0..g.height() {
            for ix in 0..g.width() {
                if !g.is_occupied(ix, iy) {
                    continue;
                }
                let q = g.cell_center(ix, iy);
                // Counterclockwise corners: inside iff left of (or on) every edge.
                let inside = (0..4).all(|k| (c[(k + 1) % 4] - c[k]).cross(q - c[k]) >= -1e-12);
                if inside {
                    return true;
                }
            }
        }
        false
    }

    #[test]
    fn footprint_matches_half_plane_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let v = vehicle();
        for _ in 0..3 {
            let g = random_grid(&mut rng, 64, 64, 0.02);
            let checker = CollisionChecker::new(&g, v, default_margin(&g));
            for _ in 0..50 {
                let lo = g.origin();
                let p = Pose::new(
                    lo.x + rng.gen_range(0.0..16.0),
                    lo.y + rng.gen_range(0.0..16.0),
                    rng.gen_range(-3.2..3.2),
                );
                let m = default_margin(&g);
                let want = half_plane_oracle(&p, &v, &g, m);
                assert_eq!(footprint_collides(&p, &v, &g, m), want);
                assert_eq!(checker.collides(&p), want);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn collision_monotone_in_margin(
            seed in 0u64..1000, x in 1.0f64..9.0, y in 1.0f64..9.0, th in -3.2f64..3.2,
            m1 in 0.0f64..0.5, dm in 0.0f64..0.5,
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let occ = (0..40 * 40).map(|_| rng.gen_bool(0.03)).collect();
            let g = GridMap::new(40, 40, 0.25, Point::default(), occ).unwrap();
            let p = Pose::new(x, y, th);
            if footprint_collides(&p, &vehicle(), &g, m1) {
                prop_assert!(footprint_collides(&p, &vehicle(), &g, m1 + dm));
            }
        }
    }
}
