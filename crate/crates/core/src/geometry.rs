//! Planar primitives: points, poses, Bezier curves, polygons and the vehicle
//! footprint.

use std::f64::consts::{PI, TAU};
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Point) -> f64 {
        (self - other).norm()
    }

    pub fn lerp(self, other: Point, t: f64) -> Point {
        self + (other - self) * t
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn from_angle(theta: f64) -> Point {
        Point::new(theta.cos(), theta.sin())
    }
}

impl From<[f64; 2]> for Point {
    fn from([x, y]: [f64; 2]) -> Self {
        Point::new(x, y)
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

/// Maps any finite angle into `(-π, π]`.
pub fn normalize_angle(a: f64) -> Result<f64> {
    if !a.is_finite() {
        return Err(Error::InvalidInput(format!("angle {a} is not finite")));
    }
    Ok(wrap_angle(a))
}

/// Infallible variant of [`normalize_angle`] for values already known to be finite.
pub(crate) fn wrap_angle(a: f64) -> f64 {
    let mut r = a.rem_euclid(TAU);
    if r > PI {
        r -= TAU;
    }
    // rem_euclid may round up to exactly TAU, and -π must map to π.
    if r <= -PI {
        r += TAU;
    }
    r
}

/// Smallest absolute difference between two headings, in `[0, π]`.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    wrap_angle(a - b).abs()
}

/// Planar vehicle configuration of the reference point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    /// Heading in `(-π, π]`.
    pub theta: f64,
}

impl Pose {
    /// Builds a pose, normalizing the heading. Non-finite headings are mapped
    /// to zero; use [`Pose::try_new`] to reject them.
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        let theta = if theta.is_finite() { wrap_angle(theta) } else { 0.0 };
        Self { x, y, theta }
    }

    pub fn try_new(x: f64, y: f64, theta: f64) -> Result<Self> {
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::InvalidInput(format!("pose ({x}, {y}) is not finite")));
        }
        Ok(Self {
            x,
            y,
            theta: normalize_angle(theta)?,
        })
    }

    pub fn position(&self) -> Point {
        Point::new(self.x, self.y)
    }

    pub fn heading(&self) -> Point {
        Point::from_angle(self.theta)
    }
}

impl TryFrom<[f64; 3]> for Pose {
    type Error = Error;
    fn try_from([x, y, theta]: [f64; 3]) -> Result<Self> {
        Pose::try_new(x, y, theta)
    }
}

impl From<Pose> for [f64; 3] {
    fn from(p: Pose) -> Self {
        [p.x, p.y, p.theta]
    }
}

/// Travel direction of the vehicle along a path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Reverse,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Reverse => -1.0,
        }
    }

    pub fn flipped(self) -> Direction {
        match self {
            Direction::Forward => Direction::Reverse,
            Direction::Reverse => Direction::Forward,
        }
    }
}

/// Polynomial Bezier curve of arbitrary degree.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct BezierCurve {
    control_points: Vec<Point>,
}

impl<'de> Deserialize<'de> for BezierCurve {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pts = Vec::<Point>::deserialize(d)?;
        BezierCurve::new(pts).map_err(serde::de::Error::custom)
    }
}

impl BezierCurve {
    pub fn new(control_points: Vec<Point>) -> Result<Self> {
        if control_points.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "a Bezier curve needs at least 2 control points, got {}",
                control_points.len()
            )));
        }
        if control_points
            .iter()
            .any(|p| !p.x.is_finite() || !p.y.is_finite())
        {
            return Err(Error::InvalidInput("non-finite control point".into()));
        }
        let first = control_points[0];
        if control_points.iter().all(|p| p.distance(first) < 1e-12) {
            return Err(Error::DegenerateTangent(
                "all control points coincide".into(),
            ));
        }
        Ok(Self { control_points })
    }

    pub fn control_points(&self) -> &[Point] {
        &self.control_points
    }

    pub fn degree(&self) -> usize {
        self.control_points.len() - 1
    }

    pub fn start(&self) -> Point {
        self.control_points[0]
    }

    pub fn end(&self) -> Point {
        *self.control_points.last().unwrap()
    }

    /// The same geometric curve traversed from end to start.
    pub fn reversed(&self) -> BezierCurve {
        let mut pts = self.control_points.clone();
        pts.reverse();
        BezierCurve {
            control_points: pts,
        }
    }

    /// De Casteljau evaluation.
    pub fn point(&self, t: f64) -> Result<Point> {
        check_param(t)?;
        Ok(self.eval(t))
    }

    pub(crate) fn eval(&self, t: f64) -> Point {
        if t == 0.0 {
            return self.start();
        }
        if t == 1.0 {
            return self.end();
        }
        de_casteljau(&self.control_points, t)
    }

    /// Control points of the `order`-th hodograph, already scaled by the
    /// falling factorial of the degree.
    fn hodograph(&self, order: usize) -> Vec<Point> {
        let mut pts = self.control_points.clone();
        for _ in 0..order {
            let n = (pts.len() - 1) as f64;
            if pts.len() < 2 {
                return vec![Point::default()];
            }
            pts = pts.windows(2).map(|w| (w[1] - w[0]) * n).collect();
        }
        pts
    }

    pub fn derivative(&self, t: f64) -> Point {
        de_casteljau(&self.hodograph(1), t)
    }

    pub fn second_derivative(&self, t: f64) -> Point {
        if self.degree() < 2 {
            return Point::default();
        }
        de_casteljau(&self.hodograph(2), t)
    }

    /// Signed curvature, positive for a left turn when traversing increasing `t`.
    pub fn curvature(&self, t: f64) -> Result<f64> {
        check_param(t)?;
        let d1 = self.derivative(t);
        let speed2 = d1.dot(d1);
        if speed2.sqrt() <= 1e-9 * self.scale() {
            return Err(Error::DegenerateTangent(format!(
                "first derivative vanishes at t = {t}"
            )));
        }
        let d2 = self.second_derivative(t);
        Ok(d1.cross(d2) / speed2.powf(1.5))
    }

    /// Direction of travel for increasing `t`. Where the first derivative
    /// vanishes (coincident end control points) the limiting direction is used.
    pub fn tangent_angle(&self, t: f64) -> Result<f64> {
        check_param(t)?;
        let d1 = self.derivative(t);
        if d1.norm() > 1e-9 * self.scale() {
            return Ok(d1.angle());
        }
        let h = 1e-6;
        let chord = if t + h <= 1.0 {
            self.eval(t + h) - self.eval(t)
        } else {
            self.eval(t) - self.eval(t - h)
        };
        if chord.norm() <= 1e-15 * self.scale() {
            return Err(Error::DegenerateTangent(format!(
                "no tangent direction at t = {t}"
            )));
        }
        Ok(chord.angle())
    }

    fn scale(&self) -> f64 {
        let first = self.start();
        self.control_points
            .iter()
            .map(|p| p.distance(first))
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE)
    }

    /// Parameter/arc-length table from dense evaluation.
    fn arc_table(&self, n: usize) -> (Vec<f64>, Vec<f64>) {
        let mut ts = Vec::with_capacity(n + 1);
        let mut ss = Vec::with_capacity(n + 1);
        let mut prev = self.start();
        let mut s = 0.0;
        for i in 0..=n {
            let t = i as f64 / n as f64;
            let p = self.eval(t);
            s += p.distance(prev);
            prev = p;
            ts.push(t);
            ss.push(s);
        }
        (ts, ss)
    }

    /// Arc length from dense polyline summation.
    pub fn length(&self) -> f64 {
        let (_, ss) = self.arc_table(2048);
        *ss.last().unwrap()
    }

    /// Samples spaced at most `ds` apart along the curve. Parameters are chosen
    /// by inverting an arc-length table, so sample density follows arc length
    /// rather than `t`. Headings follow the tangent, flipped by π for reverse
    /// travel.
    pub fn sample(&self, ds: f64, dir: Direction) -> Result<Vec<(Pose, Direction)>> {
        if !(ds > 0.0) || !ds.is_finite() {
            return Err(Error::InvalidInput(format!("sampling step {ds} must be > 0")));
        }
        let rough = self.length();
        let n_table = ((rough / ds) as usize * 16).clamp(256, 1 << 20);
        let (ts, ss) = self.arc_table(n_table);
        let total = *ss.last().unwrap();
        let count = ((total / ds - 1e-9).ceil() as usize).max(1);
        let step = total / count as f64;

        let mut out = Vec::with_capacity(count + 1);
        let mut j = 0;
        for i in 0..=count {
            let t = if i == 0 {
                0.0
            } else if i == count {
                1.0
            } else {
                let target = step * i as f64;
                while j + 1 < ss.len() && ss[j + 1] < target {
                    j += 1;
                }
                let (s0, s1) = (ss[j], ss[j + 1]);
                let f = if s1 > s0 { (target - s0) / (s1 - s0) } else { 0.0 };
                ts[j] + f * (ts[j + 1] - ts[j])
            };
            let p = self.eval(t);
            let mut heading = self.tangent_angle(t)?;
            if dir == Direction::Reverse {
                heading += PI;
            }
            out.push((Pose::new(p.x, p.y, heading), dir));
        }
        Ok(out)
    }
}

fn check_param(t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("curve parameter {t} outside [0, 1]")))
    }
}

fn de_casteljau(points: &[Point], t: f64) -> Point {
    let mut buf = points.to_vec();
    let n = buf.len();
    for level in 1..n {
        for i in 0..n - level {
            buf[i] = buf[i].lerp(buf[i + 1], t);
        }
    }
    buf[0]
}

/// Free-function form of [`BezierCurve::point`].
pub fn bezier_point(c: &BezierCurve, t: f64) -> Result<Point> {
    c.point(t)
}

/// Free-function form of [`BezierCurve::curvature`].
pub fn bezier_curvature(c: &BezierCurve, t: f64) -> Result<f64> {
    c.curvature(t)
}

/// Free-function form of [`BezierCurve::sample`].
pub fn sample_bezier(c: &BezierCurve, ds: f64, dir: Direction) -> Result<Vec<(Pose, Direction)>> {
    c.sample(ds, dir)
}

/// Simple or self-intersecting polygon, implicitly closed.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    vertices: Vec<Point>,
}

impl Polygon {
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidInput(format!(
                "a polygon needs at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        let n = vertices.len();
        for i in 0..n {
            if vertices[i] == vertices[(i + 1) % n] {
                return Err(Error::InvalidInput(format!(
                    "polygon vertices {i} and {} coincide",
                    (i + 1) % n
                )));
            }
        }
        Ok(Self { vertices })
    }

    pub fn rectangle(min: Point, max: Point) -> Result<Self> {
        Polygon::new(vec![
            min,
            Point::new(max.x, min.y),
            max,
            Point::new(min.x, max.y),
        ])
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }
}

fn on_segment(p: Point, a: Point, b: Point) -> bool {
    let ab = b - a;
    let ap = p - a;
    let len = ab.norm();
    let tol = 1e-9 * len.max(1.0);
    if ab.cross(ap).abs() > tol * len.max(1.0) {
        return false;
    }
    let proj = ap.dot(ab);
    proj >= -tol * len && proj <= len * len + tol * len
}

/// Even-Odd containment: a horizontal ray from `p` toward +x crosses the
/// boundary an odd number of times iff `p` is inside. Points on the boundary
/// are reported inside.
pub fn point_in_polygon_even_odd(p: Point, poly: &Polygon) -> bool {
    if poly.edges().any(|(a, b)| on_segment(p, a, b)) {
        return true;
    }
    let mut inside = false;
    for (a, b) in poly.edges() {
        // Half-open in y so a ray through a vertex is counted once.
        if (a.y > p.y) != (b.y > p.y) {
            let x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x_cross {
                inside = !inside;
            }
        }
    }
    inside
}

/// Rigid-body parameters of the vehicle. The reference point (the one the
/// planner tracks) sits `ref_offset` behind the geometric center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleParams {
    pub length: f64,
    pub width: f64,
    pub ref_offset: f64,
    pub min_turn_radius: f64,
}

impl VehicleParams {
    pub fn new(length: f64, width: f64, ref_offset: f64, min_turn_radius: f64) -> Result<Self> {
        let v = Self {
            length,
            width,
            ref_offset,
            min_turn_radius,
        };
        v.validate()?;
        Ok(v)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.length) || !positive(self.width) || !positive(self.min_turn_radius) {
            return Err(Error::InvalidInput(
                "vehicle length, width and min_turn_radius must be > 0".into(),
            ));
        }
        if !self.ref_offset.is_finite() {
            return Err(Error::InvalidInput("vehicle ref_offset must be finite".into()));
        }
        Ok(())
    }

    pub fn max_curvature(&self) -> f64 {
        1.0 / self.min_turn_radius
    }

    /// Geometric center of the footprint for a reference-point pose.
    pub fn center(&self, p: &Pose) -> Point {
        p.position() + p.heading() * self.ref_offset
    }

    /// Radius of the largest disc centered on the reference point that stays
    /// inside the footprint.
    pub fn inscribed_radius(&self) -> f64 {
        (self.width / 2.0)
            .min(self.length / 2.0 - self.ref_offset.abs())
            .max(0.0)
    }
}

/// Corners of the footprint grown by `margin` on every side, counterclockwise
/// starting at front-left.
pub fn inflated_corners(p: &Pose, v: &VehicleParams, margin: f64) -> [Point; 4] {
    let c = v.center(p);
    let fwd = p.heading();
    let left = Point::new(-fwd.y, fwd.x);
    let hl = v.length / 2.0 + margin;
    let hw = v.width / 2.0 + margin;
    [
        c + fwd * hl + left * hw,
        c - fwd * hl + left * hw,
        c - fwd * hl - left * hw,
        c + fwd * hl - left * hw,
    ]
}

/// Corners of the oriented length×width rectangle, counterclockwise from
/// front-left.
pub fn footprint_corners(p: &Pose, v: &VehicleParams) -> [Point; 4] {
    inflated_corners(p, v, 0.0)
}
