//! Three-bounce trajectories whose incoming and outgoing segments are parallel.
//!
//! The trajectory arrives horizontally, reflects on the right arc at polar
//! angle `alpha`, once on the left arc, and again on the right arc at polar
//! angle `-beta`. For each `(alpha, beta)` exactly one centre distance admits
//! it; that distance and its level curves organise the curves of lines whose
//! first and last segments are parallel under `Phi` and `Psi`.

use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use crate::billiard::Focus;
use crate::curve::CurveTrace;
use crate::error::{Error, Result};
use crate::genmap::{self, GenMapKind};
use crate::geometry::{LineState, Point, Table};
use crate::periodic::{eta_of, B_MAX};
use crate::solve::{bisect, newton2, newton_polish};

/// Continuation step for level curves, in `(alpha, beta)` units.
pub const LEVEL_STEP: f64 = 1e-3;
/// Tracing stops this close to `(pi/4, pi/4)`, where limits depend on the path.
pub const SINGULAR_STOP: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AngleParams {
    pub alpha: f64,
    pub beta: f64,
}

impl AngleParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let p = AngleParams { alpha, beta };
        if !p.is_valid() {
            return Err(if alpha == 0.0 && beta == 0.0 {
                Error::Degenerate
            } else {
                Error::Domain {
                    what: "alpha + beta",
                    value: alpha + beta,
                    range: "alpha, beta >= 0 with alpha + beta < pi/2, not both zero",
                }
            });
        }
        Ok(p)
    }

    pub fn is_valid(&self) -> bool {
        let (a, b) = (self.alpha, self.beta);
        a >= 0.0 && b >= 0.0 && a + b < FRAC_PI_2 && (a > 0.0 || b > 0.0)
    }

    pub fn swapped(&self) -> Self {
        AngleParams {
            alpha: self.beta,
            beta: self.alpha,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ParallelOrbit {
    pub params: AngleParams,
    /// Travel from the first to the middle reflection.
    pub t: f64,
    /// Travel from the middle to the last reflection.
    pub s: f64,
    pub p2: [f64; 2],
    pub o_right: [f64; 2],
    pub b: f64,
    pub d_l1: f64,
    pub d_l3: f64,
    pub d_r1: f64,
    pub d_r3: f64,
}

/// Middle reflection point, in the frame with `O_l` at the origin and the
/// incoming segment horizontal.
fn middle_point(a: f64, b: f64) -> Point {
    let den = (2.0 * a + 2.0 * b).sin();
    Point::new(
        (b.sin() * (2.0 * a).cos() + a.sin() * (2.0 * b).cos()) / den,
        ((2.0 * a).sin() * b.sin() - a.sin() * (2.0 * b).sin()) / den,
    )
}

/// Vertical coordinate of the right-arc centre `O_r` in the construction frame.
pub fn centre_height(p: AngleParams) -> f64 {
    middle_point(p.alpha, p.beta).y + (p.alpha - p.beta).sin()
}

pub fn build_parallel_orbit(p: AngleParams) -> Result<ParallelOrbit> {
    if !p.is_valid() {
        return AngleParams::new(p.alpha, p.beta).map(|_| unreachable!());
    }
    let (a, b) = (p.alpha, p.beta);
    let den = (2.0 * a + 2.0 * b).sin();
    let t = ((a + 2.0 * b).sin() - b.sin()) / den;
    let s = ((2.0 * a + b).sin() - a.sin()) / den;
    let p2 = middle_point(a, b);
    let o = p2 + Point::from_angle(a - b);
    let d_r3 = b.sin() + o.y;
    Ok(ParallelOrbit {
        params: p,
        t,
        s,
        p2: [p2.x, p2.y],
        o_right: [o.x, o.y],
        b: table_distance(p),
        d_l1: a.sin(),
        d_l3: b.sin(),
        d_r1: a.sin() - o.y,
        d_r3,
    })
}

/// Square of the centre distance of the table carrying the `(alpha, beta)` orbit.
pub fn table_distance_sq(p: AngleParams) -> f64 {
    let (sa, sb) = (p.alpha.sin(), p.beta.sin());
    let s1 = (p.alpha + p.beta).sin();
    let s2 = (2.0 * (p.alpha + p.beta)).sin();
    1.0 + (sa + sb) / s1 + sa * sb / (s1 * s1) + (sa - sb) * (sa - sb) / (s2 * s2)
}

pub fn table_distance(p: AngleParams) -> f64 {
    table_distance_sq(p).sqrt()
}

/// Vanishes where `O_r` lies on the horizontal axis of the construction, away
/// from the diagonal.
pub fn f_j(p: AngleParams) -> f64 {
    let (a, b) = (p.alpha, p.beta);
    (a.cos() + b.cos()) * (a + b).cos() - a.sin() * b.sin()
}

/// Vanishes where a parallel beam along the incoming segment leaves parallel again.
pub fn f_t(p: AngleParams) -> f64 {
    let (a, b) = (p.alpha, p.beta);
    let c = (a + b).cos();
    let d = a.sin() - b.sin();
    c * c * f_j(p) + (1.0 + c) * d * d
}

/// Diagonal point of the curve where `f_j` vanishes: `2 cos a cos 2a = sin^2 a`.
pub fn solve_alpha0() -> f64 {
    let g = |a: f64| 2.0 * a.cos() * (2.0 * a).cos() - a.sin().powi(2);
    let r = bisect(g, 0.3, FRAC_PI_4, 1e-16).expect("sign change on [0.3, pi/4]");
    newton_polish(g, r, 3)
}

/// Curvature of a beam parallel to the incoming segment after the three
/// reflections. The ray is traced on the two full circles, since near the
/// zero set of `f_t` the reflections can fall beyond the lemon's corners.
pub fn focusing_after_three(p: AngleParams) -> Result<Focus> {
    let orbit = build_parallel_orbit(p)?;
    let centres = [
        Point::new(0.0, 0.0),
        Point::new(orbit.o_right[0], orbit.o_right[1]),
    ];
    let mut pos = Point::from_angle(p.alpha);
    let mut dir = Point::new(1.0, 0.0);
    let mut focus = Focus::infinite();
    for k in 0..3 {
        let n = pos - centres[k % 2];
        let along = dir.dot(n);
        focus = focus.reflect(along.abs());
        dir = dir - 2.0 * along * n;
        if k == 2 {
            break;
        }
        // Leave through the far side of the other circle.
        let w = pos - centres[(k + 1) % 2];
        let bq = w.dot(dir);
        let len = -bq + (bq * bq - (w.dot(w) - 1.0)).max(0.0).sqrt();
        focus = focus.travel(len);
        pos = pos + len * dir;
    }
    if (dir.y / dir.x).abs() > 1e-9 {
        return Err(Error::NoIntersection(dir.y / dir.x));
    }
    Ok(focus)
}

/// Line coordinates of the orbit arriving from the right, as a map of
/// `(alpha, beta)`; its image of a level curve is the curve of `Phi`.
pub fn h_up(p: AngleParams) -> LineState {
    let (a, b) = (p.alpha, p.beta);
    let extra = ((2.0 * a).sin() * b.sin() - a.sin() * (2.0 * b).sin()) / (2.0 * a + 2.0 * b).sin();
    LineState::new(b.sin() - (b - a).sin() + extra, b.sin())
}

/// The swap of `h_up` at swapped angles; its image of a level curve is the
/// curve of `Psi`.
pub fn h_down(p: AngleParams) -> LineState {
    h_up(p.swapped()).swap()
}

fn b2_at(x: [f64; 2]) -> f64 {
    table_distance_sq(AngleParams {
        alpha: x[0],
        beta: x[1],
    })
}

fn grad_b2(x: [f64; 2]) -> [f64; 2] {
    let h = 1e-7;
    [
        (b2_at([x[0] + h, x[1]]) - b2_at([x[0] - h, x[1]])) / (2.0 * h),
        (b2_at([x[0], x[1] + h]) - b2_at([x[0], x[1] - h])) / (2.0 * h),
    ]
}

fn require_level(b: f64) -> Result<()> {
    if b > 1.5 && b <= B_MAX {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "b",
            value: b,
            range: "(1.5, 1 + 2^-1/2]",
        })
    }
}

/// The level set `table_distance = b` in the angle domain. Stored as its half
/// with `alpha <= beta`, from the axis point `(0, beta_e)` to the diagonal; the
/// other half is the mirror image.
#[derive(Clone, Debug)]
pub struct LevelCurve {
    pub b: f64,
    upper: Vec<[f64; 2]>,
    cum: Vec<f64>,
    /// False when tracing stopped at the singular corner instead of the diagonal.
    pub reaches_diagonal: bool,
}

impl LevelCurve {
    pub fn trace(b: f64) -> Result<Self> {
        Self::trace_with_step(b, LEVEL_STEP)
    }

    pub fn trace_with_step(b: f64, step: f64) -> Result<Self> {
        require_level(b)?;
        let target = b * b;
        let beta_e = eta_of(b).acos();
        let diag = (1.0 / (2.0 * (b - 1.0))).acos();
        let corner = [FRAC_PI_4, FRAC_PI_4];
        let mut pts = vec![[0.0, beta_e]];
        let mut x = pts[0];
        let mut dir = {
            let g = grad_b2(x);
            let tau = [g[1], -g[0]];
            if tau[0] >= 0.0 {
                tau
            } else {
                [-tau[0], -tau[1]]
            }
        };
        let mut reaches_diagonal = true;
        for _ in 0..(20.0 / step) as usize {
            let n = dir[0].hypot(dir[1]);
            let pred = [x[0] + step * dir[0] / n, x[1] + step * dir[1] / n];
            let next = project(target, pred).ok_or(Error::NoConvergence(step))?;
            if next[0] >= next[1] {
                break;
            }
            if crate::curve::dist(next, corner) < SINGULAR_STOP {
                reaches_diagonal = false;
                pts.push(next);
                break;
            }
            let g = grad_b2(next);
            let tau = [g[1], -g[0]];
            dir = if tau[0] * dir[0] + tau[1] * dir[1] >= 0.0 {
                tau
            } else {
                [-tau[0], -tau[1]]
            };
            x = next;
            pts.push(x);
        }
        if reaches_diagonal {
            // Drop a last point that would crowd the exact diagonal crossing.
            if pts.len() > 1 && crate::curve::dist(*pts.last().unwrap(), [diag, diag]) < 0.25 * step {
                pts.pop();
            }
            pts.push([diag, diag]);
        }
        let mut cum = vec![0.0];
        for w in pts.windows(2) {
            cum.push(cum.last().unwrap() + crate::curve::dist(w[0], w[1]));
        }
        Ok(LevelCurve {
            b,
            upper: pts,
            cum,
            reaches_diagonal,
        })
    }

    pub fn upper_length(&self) -> f64 {
        *self.cum.last().unwrap()
    }

    pub fn upper_vertices(&self) -> &[[f64; 2]] {
        &self.upper
    }

    /// Point of the upper half at arclength `s` from the axis end, projected
    /// back onto the level set.
    pub fn upper_point(&self, s: f64) -> [f64; 2] {
        let total = self.upper_length();
        if s <= 0.0 {
            return self.upper[0];
        }
        if s >= total {
            return *self.upper.last().unwrap();
        }
        let i = self.cum.partition_point(|&c| c <= s).clamp(1, self.upper.len() - 1);
        let (a, b) = (self.upper[i - 1], self.upper[i]);
        let w = (s - self.cum[i - 1]) / (self.cum[i] - self.cum[i - 1]);
        let guess = [a[0] + w * (b[0] - a[0]), a[1] + w * (b[1] - a[1])];
        project(self.b * self.b, guess).unwrap_or(guess)
    }

    /// Arclength position of the vertex nearest to `p` refined on its segment.
    pub fn upper_arclength_of(&self, p: [f64; 2]) -> f64 {
        let mut best = (f64::INFINITY, 0.0);
        for (i, w) in self.upper.windows(2).enumerate() {
            let (a, b) = (w[0], w[1]);
            let d = [b[0] - a[0], b[1] - a[1]];
            let len2 = d[0] * d[0] + d[1] * d[1];
            let u = (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0);
            let q = [a[0] + u * d[0], a[1] + u * d[1]];
            let dist = crate::curve::dist(p, q);
            if dist < best.0 {
                best = (dist, self.cum[i] + u * (self.cum[i + 1] - self.cum[i]));
            }
        }
        best.1
    }

    /// `n` points of the whole level set, evenly spaced in arclength, from
    /// `(0, beta_e)` through the diagonal to `(beta_e, 0)`.
    pub fn sample(&self, n: usize) -> Vec<[f64; 2]> {
        let n = n.max(2);
        let half = self.upper_length();
        (0..n)
            .map(|k| {
                let s = 2.0 * half * k as f64 / (n - 1) as f64;
                if s <= half {
                    self.upper_point(s)
                } else {
                    let q = self.upper_point(2.0 * half - s);
                    [q[1], q[0]]
                }
            })
            .collect()
    }

    /// `n` points of the upper half between two arclength positions.
    pub fn sample_upper(&self, s0: f64, s1: f64, n: usize) -> Vec<[f64; 2]> {
        let n = n.max(2);
        (0..n)
            .map(|k| self.upper_point(s0 + (s1 - s0) * k as f64 / (n - 1) as f64))
            .collect()
    }

    /// Where the upper half meets the zero set of `f_j`, if it does.
    pub fn j_crossing(&self) -> Option<AngleParams> {
        let fj = |x: [f64; 2]| f_j(AngleParams {
            alpha: x[0],
            beta: x[1],
        });
        let i = self.upper.windows(2).position(|w| fj(w[0]) > 0.0 && fj(w[1]) <= 0.0)?;
        let target = self.b * self.b;
        let (s0, s1) = (self.cum[i], self.cum[i + 1]);
        let s = bisect(|s| fj(self.upper_point(s)), s0, s1, 1e-14)?;
        let x0 = self.upper_point(s);
        let x = newton2(|x| [fj(x), b2_at(x) - target], x0, 1e-15, 20).unwrap_or(x0);
        Some(AngleParams {
            alpha: x[0],
            beta: x[1],
        })
    }
}

/// Newton projection onto `table_distance_sq = target` along the gradient.
fn project(target: f64, mut x: [f64; 2]) -> Option<[f64; 2]> {
    for _ in 0..60 {
        let r = b2_at(x) - target;
        if r.abs() < 1e-15 * target {
            return Some(x);
        }
        let g = grad_b2(x);
        let n2 = g[0] * g[0] + g[1] * g[1];
        if !(n2 > 0.0) || !r.is_finite() {
            return None;
        }
        x = [x[0] - r * g[0] / n2, x[1] - r * g[1] / n2];
    }
    let r = b2_at(x) - target;
    (r.abs() < 1e-12 * target).then_some(x)
}

/// `n` evenly spaced points of the level curve `table_distance = b`.
pub fn trace_level_curve_b(b: f64, n: usize) -> Result<CurveTrace> {
    let lc = LevelCurve::trace(b)?;
    let pts = lc.sample(n);
    let mut c = CurveTrace::new(format!("level b={b}"));
    for p in pts {
        c.push(p, p[0] - p[1]);
    }
    Ok(c)
}

/// Angles of the parallel orbit whose line coordinates are the diagonal
/// Theta-fixed points born at the parabolic parameter; `alpha < beta`.
pub fn bifurcation_params(b: f64) -> Result<Option<AngleParams>> {
    Ok(LevelCurve::trace(b)?.j_crossing())
}

/// The pair of diagonal Theta-fixed points `(E1, E2)` that exist beyond the
/// parabolic parameter.
pub fn bifurcated_pair(b: f64) -> Result<Option<(LineState, LineState)>> {
    Ok(bifurcation_params(b)?.map(|p| {
        let (sa, sb) = (p.alpha.sin(), p.beta.sin());
        (LineState::new(sb, sb), LineState::new(sa, sa))
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CurveKind {
    Phi,
    Psi,
    Prl,
    PhiSym,
    PsiSym,
}

impl CurveKind {
    pub const ALL: [CurveKind; 5] = [
        CurveKind::Phi,
        CurveKind::Psi,
        CurveKind::Prl,
        CurveKind::PhiSym,
        CurveKind::PsiSym,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CurveKind::Phi => "C_Phi",
            CurveKind::Psi => "C_Psi",
            CurveKind::Prl => "C_prl",
            CurveKind::PhiSym => "C_Phi_sym",
            CurveKind::PsiSym => "C_Psi_sym",
        }
    }
}

fn image(label: &str, pts: &[[f64; 2]], h: impl Fn(AngleParams) -> LineState) -> CurveTrace {
    let mut c = CurveTrace::new(label);
    for p in pts {
        let l = h(AngleParams {
            alpha: p[0],
            beta: p[1],
        });
        c.push(l.to_array(), p[0] - p[1]);
    }
    c
}

/// Curves of lines with parallel first and last segments. `Prl` comes back
/// as its four arcs; the others as a single polyline.
pub fn curve_c(t: &Table, which: CurveKind, n: usize) -> Result<Vec<CurveTrace>> {
    let b = t.b();
    require_level(b)?;
    let n = n.max(2);
    match which {
        CurveKind::Phi | CurveKind::Psi => {
            let lc = LevelCurve::trace(b)?;
            let pts = lc.sample(n);
            Ok(vec![if which == CurveKind::Phi {
                image(which.name(), &pts, h_up)
            } else {
                image(which.name(), &pts, h_down)
            }])
        }
        CurveKind::Prl => {
            let lc = LevelCurve::trace(b)?;
            let end = match lc.j_crossing() {
                Some(p) => lc.upper_arclength_of([p.alpha, p.beta]),
                None => lc.upper_length(),
            };
            let mut up = lc.sample_upper(0.0, end, n);
            if let Some(p) = lc.j_crossing() {
                *up.last_mut().unwrap() = [p.alpha, p.beta];
            }
            let mirrored: Vec<[f64; 2]> = up.iter().map(|p| [p[1], p[0]]).collect();
            let g1 = image("gamma1", &up, h_up);
            let g2 = image("gamma2", &mirrored, h_up);
            let g3 = g1.map("gamma3", |p| [p[1], p[0]]);
            let g4 = g2.map("gamma4", |p| [p[1], p[0]]);
            Ok(vec![g1, g2, g3, g4])
        }
        CurveKind::PhiSym | CurveKind::PsiSym => {
            let mut c = CurveTrace::new(which.name());
            for k in 0..n {
                let x = k as f64 / (n - 1) as f64;
                let l = LineState::new(-x, (b - 1.0) * x);
                if let Ok(y) = genmap::apply_l(t, &l) {
                    if y.d_left >= 0.0 && y.d_right >= 0.0 && y.in_square() {
                        let y = if which == CurveKind::PsiSym { y.swap() } else { y };
                        c.push(y.to_array(), x);
                    }
                }
            }
            Ok(vec![c])
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EndpointSlopes {
    /// Slope of the curve of `Phi` at P0.
    pub m_up: f64,
    /// Slope of the curve of `Psi` at P0.
    pub m_down: f64,
}

pub fn endpoint_slopes(t: &Table) -> Result<EndpointSlopes> {
    require_level(t.b())?;
    Ok(endpoint_slopes_eta(eta_of(t.b())))
}

pub fn endpoint_slopes_eta(eta: f64) -> EndpointSlopes {
    let e = eta;
    EndpointSlopes {
        m_up: -e * e * (2.0 * e.powi(3) - 2.0 * e * e + 1.0) / (e.powi(3) + 1.0),
        m_down: (-2.0 * e.powi(5) + 2.0 * e.powi(4) - e.powi(3) + e - 1.0) / (e * (e + 1.0)),
    }
}

/// Diagonal point of the locus where the two right-arc distances agree,
/// after dividing out the trivial diagonal factor.
pub fn equal_right_distance_diagonal() -> f64 {
    let g = |a: f64| a.sin().powi(2) - (2.0 * a).cos() * a.cos() * (2.0 - a.cos());
    let r = bisect(g, 0.3, FRAC_PI_4, 1e-16).expect("sign change on [0.3, pi/4]");
    newton_polish(g, r, 3)
}

/// Points of the zero set of `f_t`, two per sampled offset `beta - alpha`.
pub fn sample_focal_curve(count: usize) -> Vec<AngleParams> {
    let ft_line = |v: f64, a: f64| f_t(AngleParams {
        alpha: a,
        beta: a + v,
    });
    let roots_at = |v: f64| -> Vec<f64> {
        let hi = 0.5 * (FRAC_PI_2 - v) - 1e-9;
        let m = 2000;
        let mut out = Vec::new();
        let mut prev = (0.0, ft_line(v, 0.0));
        for k in 1..=m {
            let a = hi * k as f64 / m as f64;
            let f = ft_line(v, a);
            if prev.1.signum() != f.signum() {
                if let Some(r) = bisect(|a| ft_line(v, a), prev.0, a, 1e-16) {
                    out.push(r);
                }
            }
            prev = (a, f);
        }
        out
    };
    // Widest offset that still cuts the curve twice.
    let mut lo = 0.0;
    let mut hi = 0.3;
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        if roots_at(mid).len() >= 2 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let pairs = count.div_ceil(2).max(1);
    let mut out = Vec::new();
    for k in 1..=pairs {
        let v = lo * k as f64 / (pairs + 1) as f64;
        for a in roots_at(v).into_iter().take(2) {
            out.push(AngleParams {
                alpha: a,
                beta: a + v,
            });
        }
    }
    out.truncate(count);
    out
}

/// Residual of the fixed-point property of the curve of `Phi` under `Phi`
/// (or `Psi` under `Psi`): largest distance of an image point to the curve.
pub fn curve_invariance_defect(t: &Table, curve: &CurveTrace, k: GenMapKind) -> Result<f64> {
    let mut worst = 0.0f64;
    for p in &curve.points {
        let y = genmap::apply(t, k, &LineState::from_array(*p))?;
        worst = worst.max(curve.distance_to(y.to_array()));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genmap::{monotonicity_witness, WitnessMap};
    use crate::periodic::{e0, find_b_crit, p0, q0};

    fn ap(a: f64, b: f64) -> AngleParams {
        AngleParams::new(a, b).unwrap()
    }

    #[test]
    fn construction_invariants() {
        for (a, b) in [(0.1, 0.3), (0.4, 0.2), (0.5, 0.5), (0.0, 0.7), (0.6, 0.0)] {
            let o = build_parallel_orbit(ap(a, b)).unwrap();
            let sum = ((a - b) / 2.0).cos() / ((a + b) / 2.0).cos();
            assert!((o.t + o.s - sum).abs() < 1e-12 && sum >= 1.0);
            assert!((o.d_l1 + o.d_l3 - o.d_r1 - o.d_r3).abs() < 1e-12);
            assert!((o.o_right[0].hypot(o.o_right[1]) - o.b).abs() < 1e-12);
            // Both reflection points are at unit distance from O_r.
            let o_r = Point::new(o.o_right[0], o.o_right[1]);
            assert!(((Point::new(o.p2[0], o.p2[1]) - o_r).norm() - 1.0).abs() < 1e-12);
        }
        assert_eq!(AngleParams::new(0.0, 0.0), Err(Error::Degenerate));
        assert!(AngleParams::new(0.8, 0.8).is_err());
    }

    #[test]
    fn special_lines() {
        for beta in [0.1, 0.4, 0.7] {
            let d = table_distance(ap(beta, beta));
            assert!((d - (1.0 + 0.5 / beta.cos())).abs() < 1e-12);
            let d0 = table_distance_sq(ap(0.0, beta));
            assert!((d0 - (2.0 + 0.25 / beta.cos().powi(2))).abs() < 1e-12);
            assert_eq!(h_up(ap(0.0, beta)), LineState::new(0.0, beta.sin()));
            assert!(h_up(ap(beta, 0.0)).dist(&LineState::new(beta.sin(), 0.0)) < 1e-15);
            assert!(h_up(ap(beta, beta)).dist(&LineState::new(beta.sin(), beta.sin())) < 1e-15);
        }
        assert!((table_distance(ap(1e-6, 1e-6)) - 1.5).abs() < 1e-6);
        // The axis and diagonal images are the closed-form fixed points.
        let b = table_distance(ap(0.0, 0.7));
        assert!(h_up(ap(0.0, 0.7)).dist(&p0(b)) < 1e-12);
        let b = table_distance(ap(0.5, 0.5));
        assert!(h_up(ap(0.5, 0.5)).dist(&e0(b)) < 1e-12);
        assert!(h_down(ap(0.0, 0.7)).dist(&p0(table_distance(ap(0.0, 0.7)))) < 1e-12);
        let _ = q0;
    }

    #[test]
    fn alpha0_and_b_crit() {
        let a0 = solve_alpha0();
        assert!((a0 - 0.663742).abs() < 1e-5);
        assert!(f_j(ap(a0, a0)).abs() < 1e-14);
        assert!((table_distance(ap(a0, a0)) - find_b_crit()).abs() < 1e-6);
    }

    #[test]
    fn zero_set_of_f_j_has_o_r_on_axis() {
        for beta in [0.75, 0.8, 0.9, 1.0] {
            let a = bisect(|a| f_j(ap(a, beta)), 0.0, FRAC_PI_2 - beta - 1e-9, 1e-15).unwrap();
            assert!(centre_height(ap(a, beta)).abs() < 1e-12);
        }
    }

    #[test]
    fn level_curve_geometry() {
        let lc = LevelCurve::trace(1.6).unwrap();
        let diag = (1.0 / 1.2f64).acos();
        assert!(crate::curve::dist(*lc.upper_vertices().last().unwrap(), [diag, diag]) < 1e-15);
        let c = trace_level_curve_b(1.6, 401).unwrap();
        for p in &c.points {
            assert!((b2_at(*p) - 2.56).abs() < 1e-12);
        }
        assert!(crate::curve::dist(c.points[200], [diag, diag]) < 1e-12);
        assert!(c.points.iter().all(|p| f_j(ap(p[0], p[1])) > 0.0));
        let c = trace_level_curve_b(1.66, 401).unwrap();
        let signs: Vec<bool> = c.points.iter().map(|p| f_j(ap(p[0], p[1])) > 0.0).collect();
        assert_eq!(signs.windows(2).filter(|w| w[0] != w[1]).count(), 2);
        assert!(trace_level_curve_b(1.4, 10).is_err());
    }

    #[test]
    fn bifurcated_points_map_to_each_other() {
        assert!(bifurcated_pair(1.6).unwrap().is_none());
        let b = 1.66;
        let t = Table::new(b).unwrap();
        let (e1, e2) = bifurcated_pair(b).unwrap().unwrap();
        assert!((e1.d_left - 0.685792).abs() < 1e-6 && (e2.d_left - 0.543714).abs() < 1e-6);
        for k in [GenMapKind::Phi, GenMapKind::Psi] {
            assert!(genmap::apply(&t, k, &e1).unwrap().dist(&e2) < 1e-9);
            assert!(genmap::apply(&t, k, &e2).unwrap().dist(&e1) < 1e-9);
        }
    }

    #[test]
    fn curves_are_invariant_and_symmetric() {
        let t = Table::new(1.6).unwrap();
        let phi = curve_c(&t, CurveKind::Phi, 3001).unwrap().remove(0);
        let psi = curve_c(&t, CurveKind::Psi, 3001).unwrap().remove(0);
        assert!(curve_invariance_defect(&t, &phi, GenMapKind::Phi).unwrap() < 1e-7);
        assert!(psi.map("", |p| [p[1], p[0]]).one_sided_hausdorff(&phi) < 1e-12);
        assert!(LineState::from_array(phi.points[0]).dist(&p0(1.6)) < 1e-9);
        assert!(LineState::from_array(*phi.points.last().unwrap()).dist(&q0(1.6)) < 1e-9);
        assert!(LineState::from_array(phi.points[1500]).dist(&e0(1.6)) < 1e-9);
        for p in phi.points.iter().step_by(97) {
            let w = monotonicity_witness(&t, &LineState::from_array(*p), WitnessMap::Phi).unwrap();
            assert!(w.abs() < 1e-8, "{w}");
        }
        let sym = curve_c(&t, CurveKind::PhiSym, 2001).unwrap().remove(0);
        let hits = phi.intersections(&sym);
        assert_eq!(hits.len(), 1, "{hits:?}");
        assert!(LineState::from_array(hits[0]).dist(&e0(1.6)) < 1e-6);
    }

    #[test]
    fn parallel_curve_pieces() {
        let t = Table::new(1.66).unwrap();
        let pieces = curve_c(&t, CurveKind::Prl, 200).unwrap();
        assert_eq!(pieces.len(), 4);
        let (e1, e2) = bifurcated_pair(1.66).unwrap().unwrap();
        let end = |c: &CurveTrace| LineState::from_array(*c.points.last().unwrap());
        assert!(end(&pieces[0]).dist(&e1) < 1e-12);
        assert!(end(&pieces[1]).dist(&e2) < 1e-12);
        assert!(LineState::from_array(pieces[1].points[0]).dist(&q0(1.66)) < 1e-12);
        let t = Table::new(1.6).unwrap();
        let pieces = curve_c(&t, CurveKind::Prl, 200).unwrap();
        assert!(end(&pieces[0]).dist(&e0(1.6)) < 1e-12);
        assert!(end(&pieces[1]).dist(&e0(1.6)) < 1e-12);
    }

    #[test]
    fn slopes_at_p0() {
        let s = endpoint_slopes_eta(1.0 - 1e-12);
        assert!((s.m_up + 0.5).abs() < 1e-9 && (s.m_down + 0.5).abs() < 1e-9);
        for b in [1.52, 1.6, 1.68] {
            let lc = LevelCurve::trace(b).unwrap();
            let s = endpoint_slopes(&Table::new(b).unwrap()).unwrap();
            let h = 1e-6;
            let x = lc.upper_point(h);
            let (p, q) = (h_up(ap(0.0, lc.upper_vertices()[0][1])), h_up(ap(x[0], x[1])));
            let fd = (q.d_right - p.d_right) / (q.d_left - p.d_left);
            assert!((fd - s.m_up).abs() < 1e-4, "{fd} vs {}", s.m_up);
            let (p, q) = (h_down(ap(0.0, lc.upper_vertices()[0][1])), h_down(ap(x[0], x[1])));
            let fd = (q.d_right - p.d_right) / (q.d_left - p.d_left);
            assert!((fd - s.m_down).abs() < 1e-4, "{fd} vs {}", s.m_down);
        }
    }

    #[test]
    fn focal_curve_refocuses_parallel_beam() {
        let pts = sample_focal_curve(20);
        assert_eq!(pts.len(), 20);
        for p in pts {
            assert!(f_j(p) <= 1e-10);
            let f = focusing_after_three(p).unwrap();
            assert!(f.curvature().abs() < 1e-8, "{p:?}");
        }
        let off = focusing_after_three(ap(0.3, 0.35)).unwrap();
        assert!(off.curvature().abs() > 1e-3);
    }

    #[test]
    fn equal_right_distances_on_diagonal() {
        let a = equal_right_distance_diagonal();
        assert!((a - 0.611517).abs() < 1e-4);
        // Independent route: the raw difference divided by the offset.
        let g = |a: f64| {
            let o = build_parallel_orbit(ap(a, a + 1e-6)).unwrap();
            (o.d_r1 - o.d_r3) / 1e-6
        };
        let r = bisect(g, 0.5, 0.7, 1e-12).unwrap();
        assert!((r - a).abs() < 1e-4);
    }

    fn grid(n: usize) -> impl Iterator<Item = AngleParams> {
        (0..=n).flat_map(move |i| {
            (0..=n).filter_map(move |j| {
                let h = FRAC_PI_2 / n as f64;
                AngleParams::new(i as f64 * h, j as f64 * h).ok()
            })
        })
    }

    fn fd_sum_diff(p: AngleParams) -> (f64, f64) {
        let h = 1e-6;
        let f = |da: f64, db: f64| b2_at([p.alpha + da, p.beta + db]);
        let da = (f(h, 0.0) - f(-h, 0.0)) / (2.0 * h);
        let db = (f(0.0, h) - f(0.0, -h)) / (2.0 * h);
        (da + db, da - db)
    }

    #[test]
    fn table_distance_at_least_one_and_a_half() {
        assert!(grid(500).all(|p| table_distance(p) >= 1.5));
    }

    #[test]
    fn left_entry_distance_below_right_exit_distance() {
        for p in grid(300).filter(|p| p.alpha <= p.beta) {
            let o = build_parallel_orbit(p).unwrap();
            let gap = o.d_r3 - o.d_l1;
            assert!(gap >= -1e-10, "{p:?}");
            if p.alpha > 1e-9 && p.beta - p.alpha > 1e-9 {
                assert!(gap > 0.0, "{p:?} {gap}");
            }
        }
    }

    #[test]
    fn transverse_derivative_sign_pattern() {
        for p in grid(200) {
            if (p.alpha - p.beta).abs() < 1e-3 || p.alpha + p.beta > FRAC_PI_2 - 1e-3 {
                continue;
            }
            let (_, diff) = fd_sum_diff(p);
            assert_eq!(diff > 0.0, p.alpha > p.beta, "{p:?} {diff}");
        }
    }

    #[test]
    fn radial_derivative_nonnegative_past_the_axis_curve() {
        let mut checked = 0;
        for p in grid(200).filter(|p| f_j(*p) <= 0.0 && p.alpha + p.beta < FRAC_PI_2 - 1e-3) {
            let (sum, _) = fd_sum_diff(p);
            assert!(sum >= -1e-10, "{p:?} {sum}");
            checked += 1;
        }
        assert!(checked > 100);
    }
}
