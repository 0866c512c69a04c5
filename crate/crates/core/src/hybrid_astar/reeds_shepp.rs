//! Shortest curvature-bounded paths with reversals (Reeds-Shepp), computed
//! in unit-radius coordinates over the 48 standard word families.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::geometry::{Direction, Pose};

const ZERO: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Steer {
    Left,
    Straight,
    Right,
}

use Steer::{Left as L, Right as R, Straight as S};

const WORDS: [&[Steer]; 18] = [
    &[L, R, L],
    &[R, L, R],
    &[L, R, L, R],
    &[R, L, R, L],
    &[L, R, S, L],
    &[R, L, S, R],
    &[L, S, R, L],
    &[R, S, L, R],
    &[L, R, S, R],
    &[R, L, S, L],
    &[R, S, R, L],
    &[L, S, L, R],
    &[L, S, R],
    &[R, S, L],
    &[L, S, L],
    &[R, S, R],
    &[L, R, S, L, R],
    &[R, L, S, R, L],
];

/// A Reeds-Shepp word with signed segment lengths in unit-radius units;
/// negative lengths are driven in reverse.
#[derive(Debug, Clone, PartialEq)]
pub struct RsPath {
    pub segments: Vec<(Steer, f64)>,
}

impl RsPath {
    fn new(word: usize, lengths: &[f64]) -> Self {
        Self {
            segments: WORDS[word].iter().copied().zip(lengths.iter().copied()).collect(),
        }
    }

    /// Length in unit-radius units.
    pub fn unit_length(&self) -> f64 {
        self.segments.iter().map(|(_, l)| l.abs()).sum()
    }

    /// Length in meters, summed segment by segment in travel order exactly as
    /// the search accumulates cost, skipping null segments.
    pub fn length(&self, r: f64) -> f64 {
        self.segments
            .iter()
            .filter(|(_, l)| l.abs() > 1e-12)
            .fold(0.0, |acc, (_, l)| acc + l.abs() * r)
    }
}

fn mod2pi(x: f64) -> f64 {
    let v = x % (2.0 * PI);
    if v < -PI {
        v + 2.0 * PI
    } else if v > PI {
        v - 2.0 * PI
    } else {
        v
    }
}

fn polar(x: f64, y: f64) -> (f64, f64) {
    (x.hypot(y), y.atan2(x))
}

fn tau_omega(u: f64, v: f64, xi: f64, eta: f64, phi: f64) -> (f64, f64) {
    let delta = mod2pi(u - v);
    let a = u.sin() - delta.sin();
    let b = u.cos() - delta.cos() - 1.0;
    let t1 = (eta * a - xi * b).atan2(xi * a + eta * b);
    let t2 = 2.0 * (delta.cos() - v.cos() - u.cos()) + 3.0;
    let tau = if t2 < 0.0 { mod2pi(t1 + PI) } else { mod2pi(t1) };
    let omega = mod2pi(tau - u + v - phi);
    (tau, omega)
}

fn lp_sp_lp(x: f64, y: f64, phi: f64) -> Option<(f64, f64, f64)> {
    let (u, t) = polar(x - phi.sin(), y - 1.0 + phi.cos());
    if t >= -ZERO {
        let v = mod2pi(phi - t);
        if v >= -ZERO {
            return Some((t, u, v));
        }
    }
    None
}

fn lp_sp_rp(x: f64, y: f64, phi: f64) -> Option<(f64, f64, f64)> {
    let (u1, t1) = polar(x + phi.sin(), y - 1.0 - phi.cos());
    let u1 = u1 * u1;
    if u1 >= 4.0 {
        let u = (u1 - 4.0).sqrt();
        let theta = 2.0f64.atan2(u);
        let t = mod2pi(t1 + theta);
        let v = mod2pi(t - phi);
        if t >= -ZERO && v >= -ZERO {
            return Some((t, u, v));
        }
    }
    None
}

fn lp_rm_l(x: f64, y: f64, phi: f64) -> Option<(f64, f64, f64)> {
    let (u1, theta) = polar(x - phi.sin(), y - 1.0 + phi.cos());
    if u1 <= 4.0 {
        let u = -2.0 * (0.25 * u1).asin();
        let t = mod2pi(theta + 0.5 * u + PI);
        let v = mod2pi(phi - t + u);
        if t >= -ZERO && u <= ZERO {
            return Some((t, u, v));
        }
    }
    None
}

fn lp_rup_lum_rm(x: f64, y: f64, phi: f64) -> Option<(f64, f64, f64)> {
    let xi = x + phi.sin();
    let eta = y - 1.0 - phi.cos();
    let rho = 0.25 * (2.0 + xi.hypot(eta));
    if rho <= 1.0 {
        let u = rho.acos();
        let (t, v) = tau_omega(u, -u, xi, eta, phi);
        if t >= -ZERO && v <= ZERO {
            return Some((t, u, v));
        }
    }
    None
}

fn lp_rum_lum_rp(x: f64, y: f64, phi: f64) -> Option<(f64, f64, f64)> {
    let xi = x + phi.sin();
    let eta = y - 1.0 - phi.cos();
    let rho = (20.0 - xi * xi - eta * eta) / 16.0;
    if (0.0..=1.0).contains(&rho) {
        let u = -rho.acos();
        if u >= -0.5 * PI {
            let (t, v) = tau_omega(u, u, xi, eta, phi);
            if t >= -ZERO && v >= -ZERO {
                return Some((t, u, v));
            }
        }
    }
    None
}

fn lp_rm_sm_lm(x: f64, y: f64, phi: f64) -> Option<(f64, f64, f64)> {
    let (rho, theta) = polar(x - phi.sin(), y - 1.0 + phi.cos());
    if rho >= 2.0 {
        let r = (rho * rho - 4.0).sqrt();
        let u = 2.0 - r;
        let t = mod2pi(theta + r.atan2(-2.0));
        let v = mod2pi(phi - 0.5 * PI - t);
        if t >= -ZERO && u <= ZERO && v <= ZERO {
            return Some((t, u, v));
        }
    }
    None
}

fn lp_rm_sm_rm(x: f64, y: f64, phi: f64) -> Option<(f64, f64, f64)> {
    let xi = x + phi.sin();
    let eta = y - 1.0 - phi.cos();
    let (rho, theta) = polar(-eta, xi);
    if rho >= 2.0 {
        let t = theta;
        let u = 2.0 - rho;
        let v = mod2pi(t + 0.5 * PI - phi);
        if t >= -ZERO && u <= ZERO && v <= ZERO {
            return Some((t, u, v));
        }
    }
    None
}

fn lp_rm_s_lm_rp(x: f64, y: f64, phi: f64) -> Option<(f64, f64, f64)> {
    let xi = x + phi.sin();
    let eta = y - 1.0 - phi.cos();
    let (rho, _) = polar(xi, eta);
    if rho >= 2.0 {
        let u = 4.0 - (rho * rho - 4.0).sqrt();
        if u <= ZERO {
            let t = mod2pi(((4.0 - u) * xi - 2.0 * eta).atan2(-2.0 * xi + (u - 4.0) * eta));
            let v = mod2pi(t - phi);
            if t >= -ZERO && v >= -ZERO {
                return Some((t, u, v));
            }
        }
    }
    None
}

type Formula = fn(f64, f64, f64) -> Option<(f64, f64, f64)>;

/// Applies a base formula under the four symmetries (identity, time flip,
/// reflection, both), pushing each solution with `build`.
fn symmetric(
    out: &mut Vec<RsPath>,
    f: Formula,
    x: f64,
    y: f64,
    phi: f64,
    words: (usize, usize),
    build: impl Fn(f64, f64, f64) -> Vec<f64>,
) {
    let neg = |v: Vec<f64>| v.into_iter().map(|l| -l).collect::<Vec<_>>();
    if let Some((t, u, v)) = f(x, y, phi) {
        out.push(RsPath::new(words.0, &build(t, u, v)));
    }
    if let Some((t, u, v)) = f(-x, y, -phi) {
        out.push(RsPath::new(words.0, &neg(build(t, u, v))));
    }
    if let Some((t, u, v)) = f(x, -y, -phi) {
        out.push(RsPath::new(words.1, &build(t, u, v)));
    }
    if let Some((t, u, v)) = f(-x, -y, phi) {
        out.push(RsPath::new(words.1, &neg(build(t, u, v))));
    }
}

/// Every valid word for reaching `(x, y, phi)` from the origin with unit
/// turning radius.
pub(crate) fn candidates(x: f64, y: f64, phi: f64) -> Vec<RsPath> {
    let mut out = Vec::new();
    let h = FRAC_PI_2;
    let xb = x * phi.cos() + y * phi.sin();
    let yb = x * phi.sin() - y * phi.cos();

    // CSC
    symmetric(&mut out, lp_sp_lp, x, y, phi, (14, 15), |t, u, v| vec![t, u, v]);
    symmetric(&mut out, lp_sp_rp, x, y, phi, (12, 13), |t, u, v| vec![t, u, v]);
    // CCC
    symmetric(&mut out, lp_rm_l, x, y, phi, (0, 1), |t, u, v| vec![t, u, v]);
    symmetric(&mut out, lp_rm_l, xb, yb, phi, (0, 1), |t, u, v| vec![v, u, t]);
    // CCCC
    symmetric(&mut out, lp_rup_lum_rm, x, y, phi, (2, 3), |t, u, v| vec![t, u, -u, v]);
    symmetric(&mut out, lp_rum_lum_rp, x, y, phi, (2, 3), |t, u, v| vec![t, u, u, v]);
    // CCSC
    symmetric(&mut out, lp_rm_sm_lm, x, y, phi, (4, 5), |t, u, v| vec![t, -h, u, v]);
    symmetric(&mut out, lp_rm_sm_rm, x, y, phi, (8, 9), |t, u, v| vec![t, -h, u, v]);
    symmetric(&mut out, lp_rm_sm_lm, xb, yb, phi, (6, 7), |t, u, v| vec![v, u, -h, t]);
    symmetric(&mut out, lp_rm_sm_rm, xb, yb, phi, (10, 11), |t, u, v| vec![v, u, -h, t]);
    // CCSCC
    symmetric(&mut out, lp_rm_s_lm_rp, x, y, phi, (16, 17), |t, u, v| vec![t, -h, u, -h, v]);

    // The symmetric() sign flip also negates the fixed ±π/2 arcs, as required.
    out
}

/// Goal `b` expressed in the frame of `a`, scaled to unit radius.
fn local(a: &Pose, b: &Pose, r: f64) -> (f64, f64, f64) {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let (s, c) = a.theta.sin_cos();
    ((c * dx + s * dy) / r, (-s * dx + c * dy) / r, b.theta - a.theta)
}

/// Shortest word from `a` to `b` with turning radius `r`.
pub fn reeds_shepp_path(a: &Pose, b: &Pose, r: f64) -> RsPath {
    let (x, y, phi) = local(a, b, r);
    let mut best: Option<RsPath> = None;
    for c in candidates(x, y, phi) {
        if best.as_ref().map_or(true, |b| c.unit_length() < b.unit_length()) {
            best = Some(c);
        }
    }
    best.unwrap_or(RsPath { segments: Vec::new() })
}

/// Every candidate word from `a` to `b`, unordered.
pub fn reeds_shepp_paths(a: &Pose, b: &Pose, r: f64) -> Vec<RsPath> {
    let (x, y, phi) = local(a, b, r);
    candidates(x, y, phi)
}

pub fn reeds_shepp_length(a: &Pose, b: &Pose, r: f64) -> f64 {
    let (x, y, phi) = local(a, b, r);
    candidates(x, y, phi)
        .iter()
        .map(|c| c.length(r))
        .reduce(f64::min)
        .unwrap_or(0.0)
}

/// Pose after driving signed unit length `l` of `steer` from unit-frame pose.
fn advance(p: (f64, f64, f64), steer: Steer, l: f64) -> (f64, f64, f64) {
    let (x, y, phi) = p;
    match steer {
        Steer::Left => (
            x + (phi + l).sin() - phi.sin(),
            y - (phi + l).cos() + phi.cos(),
            phi + l,
        ),
        Steer::Right => (
            x - (phi - l).sin() + phi.sin(),
            y + (phi - l).cos() - phi.cos(),
            phi - l,
        ),
        Steer::Straight => (x + l * phi.cos(), y + l * phi.sin(), phi),
    }
}

fn to_world(a: &Pose, p: (f64, f64, f64), r: f64) -> Pose {
    let (s, c) = a.theta.sin_cos();
    let (x, y) = (p.0 * r, p.1 * r);
    Pose::new(a.x + c * x - s * y, a.y + s * x + c * y, a.theta + p.2)
}

/// End pose of a word driven from `a`.
pub fn rs_end(a: &Pose, path: &RsPath, r: f64) -> Pose {
    let p = path
        .segments
        .iter()
        .fold((0.0, 0.0, 0.0), |p, &(s, l)| advance(p, s, l));
    to_world(a, p, r)
}

/// Samples a word at spacing at most `ds`. Every segment boundary, and so
/// every cusp, is included. The first sample is `a` itself.
pub fn sample_rs(a: &Pose, path: &RsPath, r: f64, ds: f64) -> Vec<(Pose, Direction)> {
    let dir_of = |l: f64| {
        if l < 0.0 {
            Direction::Reverse
        } else {
            Direction::Forward
        }
    };
    let first_dir = path
        .segments
        .iter()
        .find(|(_, l)| l.abs() > ZERO)
        .map_or(Direction::Forward, |&(_, l)| dir_of(l));
    let mut out = vec![(*a, first_dir)];
    let mut p = (0.0, 0.0, 0.0);
    for &(steer, l) in &path.segments {
        if l.abs() <= ZERO {
            continue;
        }
        let n = ((l.abs() * r / ds).ceil() as usize).max(1);
        let d = dir_of(l);
        for k in 1..=n {
            let q = advance(p, steer, l * k as f64 / n as f64);
            out.push((to_world(a, q, r), d));
        }
        p = advance(p, steer, l);
    }
    out
}
