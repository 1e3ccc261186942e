//! Explicit period-2 and period-6 orbits, their stability data, and a Newton
//! search for fixed points of the reflection-map compositions.

use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::billiard::{billiard_step, tangent_map};
use crate::error::{Error, Result};
use crate::genmap::{self, GenMapKind};
use crate::geometry::{state_toward, AngularState, Arc, LineState, Point, Table};
use crate::mat2::Mat2;
use crate::solve::{bisect, newton_polish};

/// Largest table parameter for which the period-6 structures are studied.
pub const B_MAX: f64 = 1.0 + FRAC_1_SQRT_2;

/// Half-traces within this distance of +-1 count as parabolic.
pub const PARABOLIC_BAND: f64 = 1e-8;

pub const NEWTON_MAX_ITER: usize = 50;
pub const NEWTON_TOL: f64 = 1e-12;
pub const DEDUP_RADIUS: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Stability {
    Elliptic,
    Hyperbolic,
    Parabolic,
}

pub fn classify(half_trace: f64) -> Stability {
    let a = half_trace.abs();
    if (a - 1.0).abs() <= PARABOLIC_BAND {
        Stability::Parabolic
    } else if a < 1.0 {
        Stability::Elliptic
    } else {
        Stability::Hyperbolic
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicOrbit {
    pub period: usize,
    /// Orbit of the alternating reflections, starting with `L`.
    pub points_line: Vec<LineState>,
    pub points_angular: Option<Vec<AngularState>>,
    pub multiplier_half_trace: f64,
    pub classification: Stability,
}

impl PeriodicOrbit {
    fn new(
        period: usize,
        points_line: Vec<LineState>,
        points_angular: Option<Vec<AngularState>>,
        half_trace: f64,
    ) -> Self {
        PeriodicOrbit {
            period,
            points_line,
            points_angular,
            multiplier_half_trace: half_trace,
            classification: classify(half_trace),
        }
    }

    /// Largest jump when the line points are pushed through L, R, L, ...
    /// cyclically; zero up to rounding for a genuine orbit.
    pub fn line_closing_error(&self, t: &Table) -> Result<f64> {
        let n = self.points_line.len();
        let mut worst = 0.0f64;
        for (i, p) in self.points_line.iter().enumerate() {
            let kind = if i % 2 == 0 {
                GenMapKind::L
            } else {
                GenMapKind::R
            };
            let q = genmap::apply(t, kind, p)?;
            worst = worst.max(q.dist(&self.points_line[(i + 1) % n]));
        }
        Ok(worst)
    }

    /// Largest mismatch between `billiard_step` of each angular point and the
    /// next one.
    pub fn angular_closing_error(&self, t: &Table) -> Option<Result<f64>> {
        let pts = self.points_angular.as_ref()?;
        let run = || {
            let mut worst = 0.0f64;
            for (i, x) in pts.iter().enumerate() {
                let y = billiard_step(t, x)?.to;
                let z = &pts[(i + 1) % pts.len()];
                if y.arc != z.arc {
                    return Ok(f64::INFINITY);
                }
                worst = worst.max((y.phi - z.phi).abs()).max((y.theta - z.theta).abs());
            }
            Ok(worst)
        };
        Some(run())
    }

    /// Product of tangent maps along the first `steps` angular points.
    pub fn tangent_product(&self, t: &Table, steps: usize) -> Option<Result<Mat2>> {
        let pts = self.points_angular.as_ref()?;
        let run = || {
            let mut m = Mat2::IDENTITY;
            for x in pts.iter().take(steps) {
                m = tangent_map(&billiard_step(t, x)?) * m;
            }
            Ok(m)
        };
        Some(run())
    }
}

fn require(b: f64, lo: f64, hi: f64, range: &'static str, hi_closed: bool) -> Result<()> {
    let ok = b > lo && (b < hi || (hi_closed && b == hi));
    if ok {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "b",
            value: b,
            range,
        })
    }
}

/// Orbit bouncing along the axis between the two vertices.
pub fn orbit_o2(t: &Table) -> PeriodicOrbit {
    let b = t.b();
    let pts = vec![
        AngularState::new(Arc::Right, 0.0, 0.5 * PI),
        AngularState::new(Arc::Left, 0.0, 0.5 * PI),
    ];
    let origin = LineState::new(0.0, 0.0);
    PeriodicOrbit::new(
        2,
        vec![origin, origin],
        Some(pts),
        2.0 * (b - 1.0) * (b - 1.0) - 1.0,
    )
}

/// Tangent matrix of one bounce of the axis orbit.
pub fn o2_tangent(b: f64) -> Mat2 {
    Mat2::new(1.0 - b, 2.0 - b, -b, 1.0 - b)
}

/// Half-trace of the tangent map over half of the elliptic period-6 orbit.
pub fn elliptic_half_trace(b: f64) -> f64 {
    let poly = (((16.0 * b - 48.0) * b + 40.0) * b - 4.0) * b * b - b + 1.0;
    poly + b / (2.0 * b * b - 4.0 * b + 1.0)
}

/// The same quantity written as one rational function, as it comes out of the
/// line-coordinate Jacobian.
pub fn elliptic_half_trace_rational(b: f64) -> f64 {
    let c = [1.0, -4.0, 2.0, 54.0, -216.0, 288.0, -160.0, 32.0];
    let num = c.iter().rev().fold(0.0, |acc, &ci| acc * b + ci);
    num / (2.0 * b * b - 4.0 * b + 1.0)
}

/// `1/2 tr(DF^3) - 1` at the hyperbolic period-6 orbit, from its factored form.
pub fn hyperbolic_half_trace_excess(b: f64) -> f64 {
    let r = (b * b - 2.0).sqrt();
    (2.0 * b - 3.0) * (2.0 * b + 3.0) * r * (4.0 * b * b - 7.0 - 4.0 * r)
}

/// Diagonal fixed point of Theta continuing the elliptic orbit.
pub fn e0(b: f64) -> LineState {
    let c = 1.0 / (2.0 * (b - 1.0));
    let v = (1.0 - c * c).max(0.0).sqrt();
    LineState::new(v, v)
}

pub fn p0(b: f64) -> LineState {
    let v = (1.0 - 1.0 / (4.0 * b * b - 8.0)).max(0.0).sqrt();
    LineState::new(0.0, v)
}

pub fn q0(b: f64) -> LineState {
    p0(b).swap()
}

/// Physical elliptic orbit exists for b below the golden ratio.
pub fn elliptic_physical_limit() -> f64 {
    0.5 * (1.0 + 5f64.sqrt())
}

pub fn orbit_elliptic6(t: &Table) -> Result<PeriodicOrbit> {
    let b = t.b();
    require(b, 1.5, B_MAX, "(1.5, 1 + 2^-1/2]", true)?;
    let e = e0(b);
    let e1 = genmap::apply_l(t, &e)?;
    let e4 = genmap::apply_r(t, &e)?;
    let line = vec![e, e1, e1, e, e4, e4];
    let angular = (b < elliptic_physical_limit()).then(|| elliptic_points(t));
    Ok(PeriodicOrbit::new(6, line, angular, elliptic_half_trace(b)))
}

/// Reflection points of the elliptic orbit, starting at the right vertex.
fn elliptic_points(t: &Table) -> Vec<AngularState> {
    let b = t.b();
    let phi = (1.0 / (2.0 * (b - 1.0))).acos();
    let right = |a: f64| Point::from_angle(a);
    let left = |a: f64| t.o_right() + Point::from_angle(PI - a);
    let pts = [
        (Arc::Right, right(0.0)),
        (Arc::Left, left(phi)),
        (Arc::Right, right(phi)),
        (Arc::Left, left(0.0)),
        (Arc::Right, right(-phi)),
        (Arc::Left, left(-phi)),
    ];
    aim_cycle(t, &pts)
}

fn aim_cycle(t: &Table, pts: &[(Arc, Point)]) -> Vec<AngularState> {
    (0..pts.len())
        .map(|i| {
            let (arc, p) = pts[i];
            state_toward(t, arc, p, pts[(i + 1) % pts.len()].1)
        })
        .collect()
}

pub fn orbit_hyperbolic6(t: &Table) -> Result<PeriodicOrbit> {
    let b = t.b();
    require(b, 1.5, 3f64.sqrt(), "(1.5, sqrt 3)", false)?;
    let p = p0(b);
    let q1 = genmap::apply_l(t, &p)?;
    let p1 = genmap::apply_r(t, &q1)?;
    let q = genmap::apply_l(t, &p1)?;
    let p2 = genmap::apply_r(t, &q)?;
    let q2 = genmap::apply_l(t, &p2)?;
    let line = vec![p, q1, p1, q, p2, q2];
    Ok(PeriodicOrbit::new(
        6,
        line,
        Some(hyperbolic_points(t)),
        1.0 + hyperbolic_half_trace_excess(b),
    ))
}

/// Reflection points of the hyperbolic orbit. It hits the right arc and later
/// the left arc head-on, so it retraces itself.
fn hyperbolic_points(t: &Table) -> Vec<AngularState> {
    let b = t.b();
    let r = (b * b - 2.0).sqrt();
    let phi = ((2.0 * b * b - 3.0) / (2.0 * b * r)).acos();
    let phi1 = (1.5 / b).acos();
    let p0 = Point::from_angle(phi);
    let p1 = r * p0;
    let p2 = Point::from_angle(-phi1);
    let p3 = t.o_right() + Point::from_angle(PI + phi);
    let pts = [
        (Arc::Right, p0),
        (Arc::Left, p1),
        (Arc::Right, p2),
        (Arc::Left, p3),
        (Arc::Right, p2),
        (Arc::Left, p1),
    ];
    aim_cycle(t, &pts)
}

/// Parameter where the elliptic orbit turns parabolic, `f(b) = -1`.
pub fn find_b_crit() -> f64 {
    let g = |b: f64| elliptic_half_trace(b) + 1.0;
    let root = bisect(g, 1.55, 1.7, 1e-15).expect("f + 1 changes sign on [1.55, 1.7]");
    newton_polish(g, root, 4)
}

/// Jacobian of Psi at E0, closed form.
pub fn psi_jacobian_at_e0(b: f64) -> Mat2 {
    let q = 2.0 * b * b - 4.0 * b + 1.0;
    let c = ((8.0 * b - 24.0) * b + 20.0) * b * b;
    Mat2::new(
        b * (-(8.0 * b - 24.0) * b * b - 20.0 * b + 3.0) / (b - 1.0),
        -q / (b - 1.0),
        (c - 4.0 * b + 1.0) * (c - 2.0 * b - 1.0) / ((b - 1.0) * q),
        b * (((8.0 * b - 24.0) * b + 20.0) * b - 3.0) / (b - 1.0),
    )
}

/// Jacobian of Psi at Q0, closed form in b.
pub fn psi_jacobian_at_q0(b: f64) -> Mat2 {
    let b2 = b * b;
    let r = (b2 - 2.0).sqrt();
    let d = 2.0 * b2 - 3.0;
    let k = 16.0 * b2 * b2 - 64.0 * b2 + 63.0;
    let m = 8.0 * b2 * b2 - 36.0 * b2 + 39.0;
    Mat2::new(
        -2.0 * (b2 - 2.0) * k / d,
        -m / d,
        2.0 * k * r - (8.0 * b2 - 15.0) * (8.0 * b2 * b2 - 32.0 * b2 + 31.0) / d,
        m / r - 2.0 * (8.0 * b2 * b2 - 35.0 * b2 + 36.0) / d,
    )
}

/// `cos` of the vertex angle of the hyperbolic orbit, `1 / (2 sqrt(b^2 - 2))`.
pub fn eta_of(b: f64) -> f64 {
    1.0 / (2.0 * (b * b - 2.0).sqrt())
}

pub fn b_of_eta(eta: f64) -> f64 {
    (2.0 + 1.0 / (4.0 * eta * eta)).sqrt()
}

/// Jacobian of Psi at Q0 rewritten in eta.
pub fn psi_jacobian_at_q0_eta(eta: f64) -> Mat2 {
    let e = eta;
    let p = |c: &[f64]| c.iter().rev().fold(0.0, |acc, &ci| acc * e + ci);
    let scale = 1.0 / (e.powi(5) * (1.0 + 2.0 * e * e));
    Mat2::new(
        e * (e.powi(4) - 1.0),
        e.powi(3) * (2.0 * e.powi(4) + 2.0 * e * e - 1.0),
        p(&[1.0, -2.0, 2.0, -1.0, -1.0, 4.0, -2.0, 2.0]),
        p(&[0.0, 0.0, 1.0, -2.0, 0.0, 3.0, -6.0, 8.0, -4.0]),
    )
    .scale(scale)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EigenData {
    pub lambda_s: f64,
    pub lambda_u: f64,
    /// `d d_r / d d_l` along the eigendirections at P0.
    pub slope_s: f64,
    pub slope_u: f64,
}

/// Eigenvalues and eigen-slopes at P0 of the square root `A J` of the
/// Theta Jacobian, from their closed forms in eta.
pub fn hyperbolic_eigendata(t: &Table) -> Result<EigenData> {
    let b = t.b();
    require(b, 1.5, B_MAX, "(1.5, 1 + 2^-1/2]", true)?;
    Ok(eigendata_eta(eta_of(b)))
}

pub fn eigendata_eta(eta: f64) -> EigenData {
    let e = eta;
    let p = |c: &[f64]| c.iter().rev().fold(0.0, |acc, &ci| acc * e + ci);
    let lin = p(&[1.0, -2.0, 2.0, -2.0, -1.0, 6.0, -2.0, 4.0]);
    let disc = lin * lin - 4.0 * e.powi(10) * (4.0 * e.powi(4) + 4.0 * e * e + 1.0);
    let den = 2.0 * (2.0 * e.powi(7) + e.powi(5));
    let gamma = (1.0 - e) * p(&[1.0, -1.0, -2.0, 2.0, 1.0, 3.0, 4.0]);
    let num = -2.0 * e * e * p(&[1.0, -1.0, -1.0, 2.0, -4.0, 4.0]);
    let base = (1.0 + e) * (1.0 + e * e) * (1.0 - 2.0 * e + 2.0 * e * e);
    let g = (2.0 * e * e + 1.0) * gamma.max(0.0).sqrt();
    EigenData {
        lambda_s: (lin - disc.max(0.0).sqrt()) / den,
        lambda_u: (lin + disc.max(0.0).sqrt()) / den,
        slope_s: num / (base + g),
        slope_u: num / (base - g),
    }
}

/// Solve `k(x) = x` by damped Newton from `guess`.
pub fn newton_fixed_point(t: &Table, k: GenMapKind, guess: LineState) -> Result<LineState> {
    let residual = |x: &LineState| -> Result<(f64, [f64; 2], Mat2)> {
        let (y, j) = genmap::apply_with_jacobian(t, k, x)?;
        let g = [y.d_left - x.d_left, y.d_right - x.d_right];
        Ok((g[0].hypot(g[1]), g, j))
    };
    let mut x = guess;
    let (mut res, mut g, mut j) = residual(&x)?;
    for _ in 0..NEWTON_MAX_ITER {
        if res < NEWTON_TOL {
            return Ok(x);
        }
        let dg = Mat2::new(j.m[0][0] - 1.0, j.m[0][1], j.m[1][0], j.m[1][1] - 1.0);
        let scale = dg.m.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
        if dg.det().abs() <= 1e-14 * scale * scale {
            return Err(Error::SingularJacobian);
        }
        let inv = dg.inverse().ok_or(Error::SingularJacobian)?;
        let step = inv.apply(g);
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let trial = LineState::new(x.d_left - lambda * step[0], x.d_right - lambda * step[1]);
            if let Ok((r, gt, jt)) = residual(&trial) {
                if r < res || r < NEWTON_TOL {
                    x = trial;
                    res = r;
                    g = gt;
                    j = jt;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if res < NEWTON_TOL {
        Ok(x)
    } else {
        Err(Error::NoConvergence(res))
    }
}

/// Axis-aligned rectangle in the `(d_l, d_r)` plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Rect {
    pub lo: [f64; 2],
    pub hi: [f64; 2],
}

impl Rect {
    pub fn new(lo: [f64; 2], hi: [f64; 2]) -> Self {
        Rect { lo, hi }
    }

    pub fn square(lo: f64, hi: f64) -> Self {
        Rect::new([lo, lo], [hi, hi])
    }

    pub fn is_empty(&self) -> bool {
        !(self.hi[0] > self.lo[0] && self.hi[1] > self.lo[1])
    }

    pub fn contains(&self, p: &LineState, slack: f64) -> bool {
        p.d_left >= self.lo[0] - slack
            && p.d_left <= self.hi[0] + slack
            && p.d_right >= self.lo[1] - slack
            && p.d_right <= self.hi[1] + slack
    }
}

/// Newton from every node of a `grid x grid` lattice on `region`; distinct
/// Theta-fixed points inside the region, sorted lexicographically.
pub fn exhaustive_theta_fixed_points(t: &Table, region: Rect, grid: usize) -> Vec<LineState> {
    if region.is_empty() || grid == 0 {
        return Vec::new();
    }
    let node = |i: usize, lo: f64, hi: f64| {
        if grid == 1 {
            0.5 * (lo + hi)
        } else {
            lo + (hi - lo) * i as f64 / (grid - 1) as f64
        }
    };
    let mut roots: Vec<LineState> = (0..grid * grid)
        .into_par_iter()
        .filter_map(|n| {
            let seed = LineState::new(
                node(n / grid, region.lo[0], region.hi[0]),
                node(n % grid, region.lo[1], region.hi[1]),
            );
            genmap::apply(t, GenMapKind::Theta, &seed).ok()?;
            newton_fixed_point(t, GenMapKind::Theta, seed).ok()
        })
        .filter(|p| region.contains(p, 1e-9))
        .collect();
    roots.sort_by(|a, b| a.d_left.total_cmp(&b.d_left).then(a.d_right.total_cmp(&b.d_right)));
    let mut out: Vec<LineState> = Vec::new();
    for r in roots {
        if !out.iter().any(|q| q.dist(&r) < DEDUP_RADIUS) {
            out.push(r);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(b: f64) -> Table {
        Table::new(b).unwrap()
    }

    #[test]
    fn o2_half_traces() {
        let o = orbit_o2(&table(1.5));
        assert!((o.multiplier_half_trace + 0.5).abs() < 1e-15);
        let o = orbit_o2(&table(1.9));
        assert!((o.multiplier_half_trace - 0.62).abs() < 1e-14);
        assert_eq!(o.classification, Stability::Elliptic);
        assert_eq!(o.points_line[0], LineState::new(0.0, 0.0));
        // The second iterate's tangent matrix has the same half-trace.
        let t = table(1.7);
        let m = o.tangent_product(&t, 2).unwrap().unwrap();
        let o = orbit_o2(&t);
        assert!((m.half_trace() - o.multiplier_half_trace).abs() < 1e-12);
        assert!((o2_tangent(1.7) * o2_tangent(1.7)).max_abs_diff(&m) < 1e-12);
    }

    #[test]
    fn classification_band() {
        assert_eq!(classify(0.5), Stability::Elliptic);
        assert_eq!(classify(-1.0 - 5e-9), Stability::Parabolic);
        assert_eq!(classify(1.0 + 2e-8), Stability::Hyperbolic);
    }

    #[test]
    fn elliptic_values() {
        assert!((elliptic_half_trace(1.5) - 1.0).abs() < 1e-14);
        assert_eq!(e0(1.5), LineState::new(0.0, 0.0));
        assert!((e0(1.6).d_left - 0.5527707983925667).abs() < 1e-15);
        for i in 0..=200 {
            let b = 1.5 + 0.2 * i as f64 / 200.0;
            assert!((elliptic_half_trace(b) - elliptic_half_trace_rational(b)).abs() < 1e-10);
        }
    }

    #[test]
    fn elliptic_orbit_closes_and_matches_trace() {
        for b in [1.51, 1.53, 1.57, 1.6, 1.615] {
            let t = table(b);
            let o = orbit_elliptic6(&t).unwrap();
            assert!(o.line_closing_error(&t).unwrap() < 1e-10);
            assert!(o.angular_closing_error(&t).unwrap().unwrap() < 1e-10);
            let m = o.tangent_product(&t, 3).unwrap().unwrap();
            assert!((m.half_trace() - elliptic_half_trace(b)).abs() < 1e-9, "b = {b}");
        }
        let t = table(1.65);
        let o = orbit_elliptic6(&t).unwrap();
        assert!(o.points_angular.is_none());
        assert_eq!(o.classification, Stability::Hyperbolic);
        assert!(orbit_elliptic6(&table(1.5)).is_err());
    }

    #[test]
    fn elliptic_first_chords() {
        let t = table(1.53);
        let o = orbit_elliptic6(&t).unwrap();
        let pts = o.points_angular.unwrap();
        let s0 = billiard_step(&t, &pts[0]).unwrap();
        let s1 = billiard_step(&t, &pts[1]).unwrap();
        assert!((s0.chord_length - (t.b() - 1.0)).abs() < 1e-12);
        assert!((s1.chord_length - (1.0 / (t.b() - 1.0) - t.b())).abs() < 1e-12);
    }

    #[test]
    fn hyperbolic_orbit_closes_and_matches_trace() {
        for b in [1.505, 1.55, 1.6, 1.7, 1.73] {
            let t = table(b);
            let o = orbit_hyperbolic6(&t).unwrap();
            assert!(o.line_closing_error(&t).unwrap() < 1e-10);
            assert!(o.angular_closing_error(&t).unwrap().unwrap() < 1e-10);
            let m = o.tangent_product(&t, 3).unwrap().unwrap();
            assert!((m.half_trace() - o.multiplier_half_trace).abs() < 1e-9, "b = {b}");
        }
        let t = table(1.51);
        let pts = orbit_hyperbolic6(&t).unwrap().points_angular.unwrap();
        let s = billiard_step(&t, &pts[0]).unwrap();
        assert!((s.chord_length - (1.0 - (1.51f64 * 1.51 - 2.0).sqrt())).abs() < 1e-12);
        assert!((p0(1.6).d_right - 0.7440238091428453).abs() < 1e-15);
        assert!(hyperbolic_half_trace_excess(1.5).abs() < 1e-15);
        assert!(orbit_hyperbolic6(&table(1.8)).is_err());
    }

    #[test]
    fn b_crit_value() {
        let b = find_b_crit();
        assert!((b - 1.63477).abs() < 5e-5);
        assert!((elliptic_half_trace(b) + 1.0).abs() < 1e-12);
        assert!((b - 1.6347654210405709).abs() < 1e-12);
        let t = table(b);
        let a = genmap::jacobian(&t, GenMapKind::Psi, &e0(b)).unwrap();
        assert!(((a * Mat2::SWAP).half_trace() + 1.0).abs() < 1e-7);
        assert_eq!(classify(elliptic_half_trace(b)), Stability::Parabolic);
    }

    fn fd_jacobian(t: &Table, k: GenMapKind, x: LineState, h: f64) -> Mat2 {
        let mut m = [[0.0; 2]; 2];
        for col in 0..2 {
            let mut a = x.to_array();
            let mut c = x.to_array();
            a[col] += h;
            c[col] -= h;
            let fa = genmap::apply(t, k, &LineState::from_array(a)).unwrap().to_array();
            let fc = genmap::apply(t, k, &LineState::from_array(c)).unwrap().to_array();
            for row in 0..2 {
                m[row][col] = (fa[row] - fc[row]) / (2.0 * h);
            }
        }
        Mat2 { m }
    }

    fn rel_close(a: &Mat2, b: &Mat2, tol: f64) -> bool {
        let scale = b.m.iter().flatten().fold(0.0f64, |s, v| s.max(v.abs()));
        a.max_abs_diff(b) <= tol * scale
    }

    #[test]
    fn psi_jacobians_match_finite_differences() {
        for i in 0..20 {
            let b = 1.51 + 0.19 * i as f64 / 19.0;
            let t = table(b);
            let fd = fd_jacobian(&t, GenMapKind::Psi, e0(b), 1e-6);
            assert!(rel_close(&psi_jacobian_at_e0(b), &fd, 1e-5), "E0 b = {b}");
            let fd = fd_jacobian(&t, GenMapKind::Psi, q0(b), 1e-6);
            assert!(rel_close(&psi_jacobian_at_q0(b), &fd, 1e-5), "Q0 b = {b}");
            let eta_form = psi_jacobian_at_q0_eta(eta_of(b));
            assert!(rel_close(&eta_form, &psi_jacobian_at_q0(b), 1e-12));
        }
    }

    #[test]
    fn eigendata_matches_numeric_jacobian() {
        for b in [1.51, 1.55, 1.6, 1.65, 1.7] {
            let t = table(b);
            let ed = hyperbolic_eigendata(&t).unwrap();
            assert!((ed.lambda_s * ed.lambda_u - 1.0).abs() < 1e-10);
            let j = genmap::jacobian(&t, GenMapKind::Theta, &p0(b)).unwrap();
            let (s, u) = j.real_eigenvalues().unwrap();
            assert!((s - ed.lambda_s * ed.lambda_s).abs() < 1e-9);
            assert!((u - ed.lambda_u * ed.lambda_u).abs() < 1e-9);
            let vs = j.eigenvector(s);
            let vu = j.eigenvector(u);
            assert!((vs[1] / vs[0] - ed.slope_s).abs() < 1e-6, "b = {b}");
            assert!((vu[1] / vu[0] - ed.slope_u).abs() < 1e-6, "b = {b}");
        }
        assert!(hyperbolic_eigendata(&table(1.4)).is_err());
        // Both slopes meet as eta -> 1.
        let ed = eigendata_eta(1.0 - 1e-12);
        assert!((ed.slope_s - ed.slope_u).abs() < 1e-4);
    }

    #[test]
    fn newton_finds_closed_forms() {
        let t = table(1.6);
        let e = newton_fixed_point(&t, GenMapKind::Theta, LineState::new(0.54, 0.56)).unwrap();
        assert!(e.dist(&e0(1.6)) < 1e-12);
        let p = newton_fixed_point(&t, GenMapKind::Theta, LineState::new(0.01, 0.73)).unwrap();
        assert!(p.dist(&p0(1.6)) < 1e-12);
        let o = newton_fixed_point(&t, GenMapKind::Theta, LineState::new(0.01, -0.01)).unwrap();
        assert!(o.dist(&LineState::new(0.0, 0.0)) < 1e-12);
    }

    #[test]
    fn search_at_low_b_finds_exactly_the_known_points() {
        let b = 1.52;
        let t = table(b);
        let found = exhaustive_theta_fixed_points(&t, Rect::square(0.0, 0.6), 60);
        let expected = [LineState::new(0.0, 0.0), e0(b), p0(b), q0(b)];
        assert_eq!(found.len(), 4, "{found:?}");
        for e in &expected {
            assert!(found.iter().any(|f| f.dist(e) < 1e-9), "missing {e:?}");
        }
        assert!(exhaustive_theta_fixed_points(&t, Rect::square(0.3, 0.3), 60).is_empty());
    }
}
