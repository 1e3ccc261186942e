//! The acceptance suite: fifteen numerical checks, each with its tolerance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};
use std::time::Instant;

use crate::constants::{self, THRESHOLD_FGF};
use crate::error::Result;
use crate::genmap::{self, GenMapKind};
use crate::geometry::{LineState, Table};
use crate::manifolds::{self, BasePoint, BranchKind, GrowthParams, Side};
use crate::output::phase_table;
use crate::parallel::{self, curve_c, CurveKind, LevelCurve};
use crate::periodic::*;
use crate::phase;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub id: usize,
    pub name: &'static str,
    pub group: &'static str,
    pub passed: bool,
    /// Worst measured quantity, in the units of the tolerance.
    pub worst: f64,
    pub tolerance: f64,
    pub detail: String,
    pub seconds: f64,
}

struct Outcome {
    passed: bool,
    worst: f64,
    detail: String,
}

fn within(worst: f64, tol: f64, detail: String) -> Outcome {
    Outcome {
        passed: worst < tol,
        worst,
        detail,
    }
}

type CheckFn = fn() -> Result<Outcome>;

pub struct Check {
    pub id: usize,
    pub name: &'static str,
    pub group: &'static str,
    pub tolerance: f64,
    run: CheckFn,
}

pub fn checks() -> Vec<Check> {
    macro_rules! check {
        ($id:expr, $name:expr, $group:expr, $tol:expr, $f:expr) => {
            Check {
                id: $id,
                name: $name,
                group: $group,
                tolerance: $tol,
                run: $f,
            }
        };
    }
    vec![
        check!(1, "elliptic-trace", "traces", 1e-9, elliptic_trace),
        check!(2, "hyperbolic-trace", "traces", 1e-9, hyperbolic_trace),
        check!(3, "b-crit", "traces", 5e-5, b_crit),
        check!(4, "alpha0", "parallel", 1e-5, alpha0),
        check!(5, "map-algebra", "genmap", 1e-12, map_algebra),
        check!(6, "point-values", "genmap", 1e-5, point_values),
        check!(7, "jacobians", "genmap", 1e-5, jacobians),
        check!(8, "slopes", "parallel", 1e-4, slopes),
        check!(9, "focusing", "parallel", 1e-8, focusing),
        check!(10, "curve-invariance", "parallel", 1e-7, curve_invariance),
        check!(11, "fixed-point-search", "periodic", 1e-9, fixed_point_search),
        check!(12, "manifolds", "manifolds", 1e-6, manifold_suite),
        check!(13, "fgf-residual", "genmap", THRESHOLD_FGF, fgf),
        check!(14, "constants", "constants", 5e-5, constants_check),
        check!(15, "phase-portrait", "phase", 1.0, phase_smoke),
    ]
}

/// A check is selected when `filter` equals its group or is contained in its
/// name.
pub fn selected(c: &Check, filter: Option<&str>) -> bool {
    match filter {
        None => true,
        Some(f) => c.group == f || c.name.contains(f) || c.id.to_string() == f,
    }
}

pub fn run_check(c: &Check) -> CheckResult {
    let start = Instant::now();
    let out = (c.run)().unwrap_or_else(|e| Outcome {
        passed: false,
        worst: f64::NAN,
        detail: format!("error: {e}"),
    });
    CheckResult {
        id: c.id,
        name: c.name,
        group: c.group,
        passed: out.passed,
        worst: out.worst,
        tolerance: c.tolerance,
        detail: out.detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

pub fn run_checks(filter: Option<&str>) -> Vec<CheckResult> {
    checks().iter().filter(|c| selected(c, filter)).map(run_check).collect()
}

pub fn report_line(r: &CheckResult) -> String {
    format!(
        "[{}] {:>2} {:<20} worst={:.3e} tol={:.1e} ({:.2}s) {}",
        if r.passed { "PASS" } else { "FAIL" },
        r.id,
        r.name,
        r.worst,
        r.tolerance,
        r.seconds,
        r.detail
    )
}

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x1e40)
}

fn elliptic_trace() -> Result<Outcome> {
    let mut r = rng();
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let b = r.random_range(1.5 + 1e-6..1.618);
        let t = Table::new(b)?;
        let o = orbit_elliptic6(&t)?;
        let m = o.tangent_product(&t, 3).expect("angular points below the golden ratio")?;
        worst = worst.max((m.half_trace() - elliptic_half_trace(b)).abs());
    }
    Ok(within(worst, 1e-9, "50 random b in (1.5, 1.618)".into()))
}

fn hyperbolic_trace() -> Result<Outcome> {
    let mut r = rng();
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let b = r.random_range(1.5 + 1e-6..3f64.sqrt() - 1e-6);
        let t = Table::new(b)?;
        let o = orbit_hyperbolic6(&t)?;
        let m = o.tangent_product(&t, 3).expect("retracing orbit has angular points")?;
        worst = worst.max((m.half_trace() - 1.0 - hyperbolic_half_trace_excess(b)).abs());
    }
    Ok(within(worst, 1e-9, "50 random b in (1.5, sqrt 3)".into()))
}

fn b_crit() -> Result<Outcome> {
    let b = find_b_crit();
    let mut agree = 0.0f64;
    for i in 0..200 {
        let x = 1.5 + 1e-3 + (1.7 - 1.5 - 1e-3) * i as f64 / 199.0;
        agree = agree.max((elliptic_half_trace(x) - elliptic_half_trace_rational(x)).abs());
    }
    let err = (b - 1.63477).abs();
    Ok(Outcome {
        passed: err < 5e-5 && agree < 1e-10,
        worst: err,
        detail: format!("b_crit = {b:.12}, trace forms differ by {agree:.1e}"),
    })
}

fn alpha0() -> Result<Outcome> {
    let a = parallel::solve_alpha0();
    let gap = (parallel::table_distance(parallel::AngleParams { alpha: a, beta: a }) - find_b_crit()).abs();
    let err = (a - 0.663742).abs();
    Ok(Outcome {
        passed: err < 1e-5 && gap < 1e-6,
        worst: err,
        detail: format!("alpha0 = {a:.12}, |b(alpha0, alpha0) - b_crit| = {gap:.1e}"),
    })
}

fn map_algebra() -> Result<Outcome> {
    let mut r = rng();
    let mut worst = 0.0f64;
    let mut used = 0;
    for b in [1.51, 1.55, 1.6, 1.65, 1.7] {
        let t = Table::new(b)?;
        let mut n = 0;
        while n < 10_000 {
            let x = LineState::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0));
            if !genmap::in_domain(&t, &x) {
                continue;
            }
            n += 1;
            let (Ok(l), Ok(rr)) = (genmap::apply_l(&t, &x), genmap::apply_r(&t, &x)) else {
                continue;
            };
            let (Ok(ll), Ok(rrr)) = (genmap::apply_l(&t, &l), genmap::apply_r(&t, &rr)) else {
                continue;
            };
            used += 1;
            let irl = genmap::apply_r(&t, &x.swap())?.swap();
            let lneg = genmap::apply_l(&t, &x.neg())?.neg();
            let rneg = genmap::apply_r(&t, &x.neg())?.neg();
            for d in [ll.dist(&x), rrr.dist(&x), irl.dist(&l), lneg.dist(&l), rneg.dist(&rr)] {
                worst = worst.max(d);
            }
        }
    }
    Ok(within(worst, 1e-12, format!("{used} points in the domain, 5 values of b")))
}

fn point_values() -> Result<Outcome> {
    let t = Table::new(B_MAX)?;
    let y = genmap::apply_l(&t, &LineState::new(0.6, 0.6))?;
    let e1 = (y.d_left + 1.03882).abs().max((y.d_right - 0.6).abs());
    let t = Table::new(1.6)?;
    let j = genmap::jacobian(&t, GenMapKind::Phi, &e0(1.6))?;
    let v = j.apply([1.0, 1.0]);
    let e2 = (v[0] - 1.37815).abs().max((v[1] + 0.408).abs());
    Ok(within(
        e1.max(e2),
        1e-5,
        format!("L(0.6, 0.6) = ({:.6}, {:.6}); DPhi(E0)(1,1) = ({:.6}, {:.6})", y.d_left, y.d_right, v[0], v[1]),
    ))
}

fn fd_jacobian(t: &Table, k: GenMapKind, x: LineState) -> Result<[[f64; 2]; 2]> {
    let h = 1e-6;
    let mut m = [[0.0; 2]; 2];
    for col in 0..2 {
        let mut a = x.to_array();
        let mut c = x.to_array();
        a[col] += h;
        c[col] -= h;
        let fa = genmap::apply(t, k, &LineState::from_array(a))?;
        let fc = genmap::apply(t, k, &LineState::from_array(c))?;
        m[0][col] = (fa.d_left - fc.d_left) / (2.0 * h);
        m[1][col] = (fa.d_right - fc.d_right) / (2.0 * h);
    }
    Ok(m)
}

fn jacobians() -> Result<Outcome> {
    let mut worst = 0.0f64;
    for i in 0..20 {
        let b = 1.505 + (1.7 - 1.505) * i as f64 / 19.0;
        let t = Table::new(b)?;
        for (closed, x) in [(psi_jacobian_at_e0(b), e0(b)), (psi_jacobian_at_q0(b), q0(b))] {
            let fd = fd_jacobian(&t, GenMapKind::Psi, x)?;
            let scale = closed.m.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
            for r in 0..2 {
                for c in 0..2 {
                    worst = worst.max((closed.m[r][c] - fd[r][c]).abs() / scale);
                }
            }
        }
    }
    Ok(within(worst, 1e-5, "Psi at E0 and Q0, 20 values of b, relative".into()))
}

fn slopes() -> Result<Outcome> {
    let mut ordered = true;
    for i in 0..100 {
        let eta = 0.53 + 0.46 * i as f64 / 99.0;
        let e = eigendata_eta(eta);
        let m = parallel::endpoint_slopes_eta(eta);
        ordered &= e.slope_u < m.m_down && m.m_down < m.m_up && m.m_up < e.slope_s && e.slope_s < 0.0;
    }
    let mut worst = 0.0f64;
    for b in [1.52, 1.56, 1.6, 1.64, 1.68] {
        let lc = LevelCurve::trace(b)?;
        let s = parallel::endpoint_slopes(&Table::new(b)?)?;
        let h = 1e-6;
        let a = lc.upper_vertices()[0];
        let x = lc.upper_point(h);
        let ends = |a: [f64; 2]| parallel::AngleParams { alpha: a[0], beta: a[1] };
        for (map, m) in [(parallel::h_up as fn(_) -> _, s.m_up), (parallel::h_down, s.m_down)] {
            let (p, q) = (map(ends(a)), map(ends(x)));
            let fd = (q.d_right - p.d_right) / (q.d_left - p.d_left);
            worst = worst.max((fd - m).abs());
        }
    }
    Ok(Outcome {
        passed: ordered && worst < 1e-4,
        worst,
        detail: format!("ordering on 100 eta values: {ordered}"),
    })
}

fn focusing() -> Result<Outcome> {
    let pts = parallel::sample_focal_curve(20);
    let mut worst = 0.0f64;
    for p in &pts {
        worst = worst.max(parallel::focusing_after_three(*p)?.curvature().abs());
    }
    Ok(Outcome {
        passed: pts.len() == 20 && worst < 1e-8,
        worst,
        detail: format!("{} points on the focal curve", pts.len()),
    })
}

fn curve_invariance() -> Result<Outcome> {
    let mut inv = 0.0f64;
    let mut ends = 0.0f64;
    for b in [1.55, 1.6, 1.66] {
        let t = Table::new(b)?;
        for (kind, map) in [(CurveKind::Phi, GenMapKind::Phi), (CurveKind::Psi, GenMapKind::Psi)] {
            let c = curve_c(&t, kind, 3001)?.remove(0);
            inv = inv.max(parallel::curve_invariance_defect(&t, &c, map)?);
            let (first, last) = (p0(b), q0(b));
            ends = ends
                .max(LineState::from_array(c.points[0]).dist(&first))
                .max(LineState::from_array(c.points[3000]).dist(&last))
                .max(LineState::from_array(c.points[1500]).dist(&e0(b)));
        }
    }
    Ok(Outcome {
        passed: inv < 1e-7 && ends < 1e-9,
        worst: inv,
        detail: format!("endpoints and diagonal point within {ends:.1e}"),
    })
}

fn matches_set(found: &[LineState], expected: &[LineState], tol: f64) -> bool {
    found.len() == expected.len() && expected.iter().all(|e| found.iter().any(|f| f.dist(e) < tol))
}

/// Images of `seeds` under words in L and R of length up to `depth`.
pub fn reflection_closure(t: &Table, seeds: &[LineState], depth: usize) -> Vec<LineState> {
    let mut all: Vec<LineState> = seeds.to_vec();
    let mut frontier = all.clone();
    for _ in 0..depth {
        let mut next = Vec::new();
        for x in &frontier {
            for y in [genmap::apply_l(t, x), genmap::apply_r(t, x)].into_iter().flatten() {
                if !all.iter().any(|q| q.dist(&y) < 1e-9) {
                    all.push(y);
                    next.push(y);
                }
            }
        }
        frontier = next;
    }
    all
}

fn fixed_point_search() -> Result<Outcome> {
    let b = 1.52;
    let t = Table::new(b)?;
    let found = exhaustive_theta_fixed_points(&t, Rect::square(0.0, 0.6), 200);
    let expected = [LineState::new(0.0, 0.0), e0(b), p0(b), q0(b)];
    let low_ok = matches_set(&found, &expected, 1e-8);

    let b = 1.66;
    let t = Table::new(b)?;
    let region = Rect::square(0.0, 0.9);
    let found_hi = exhaustive_theta_fixed_points(&t, region, 200);
    let (e1, e2) = parallel::bifurcated_pair(b)?.ok_or(crate::Error::MissingCrossing)?;
    let base = [LineState::new(0.0, 0.0), e0(b), p0(b), q0(b), e1, e2];
    let has_base = base.iter().all(|e| found_hi.iter().any(|f| f.dist(e) < 1e-8));
    let closure = reflection_closure(&t, &base, 6);
    let extras: Vec<&LineState> = found_hi
        .iter()
        .filter(|f| !closure.iter().any(|q| q.dist(f) < 1e-7))
        .collect();
    let extras_explained = extras.iter().all(|f| leaves_domain(&t, f));
    let swap_err = genmap::apply(&t, GenMapKind::Phi, &e1)?.dist(&e2);
    Ok(Outcome {
        passed: low_ok && has_base && extras_explained && swap_err < 1e-9,
        worst: swap_err,
        detail: format!(
            "b=1.52: {} points (expected 4); b=1.66 on [0,0.9]^2: {} points, base found {has_base}, {} outside the reflection closure, all on orbits leaving the domain {extras_explained}",
            found.len(),
            found_hi.len(),
            extras.len()
        ),
    })
}

/// True when the six-step `L`, `R` orbit of `x` visits a point outside the
/// component of the origin bounded by the singular curves.
fn leaves_domain(t: &Table, x: &LineState) -> bool {
    let mut y = *x;
    for k in 0..6 {
        let next = if k % 2 == 0 { genmap::apply_l(t, &y) } else { genmap::apply_r(t, &y) };
        match next {
            Ok(z) if genmap::in_domain(t, &z) => y = z,
            _ => return true,
        }
    }
    false
}

fn manifold_suite() -> Result<Outcome> {
    let mut sym = 0.0f64;
    let mut seed_shift = 0.0f64;
    let mut angle_ok = true;
    let mut detail = Vec::new();
    for b in [1.51, 1.54] {
        let t = Table::new(b)?;
        let p = GrowthParams::default();
        let s = manifolds::grow_branch_with(&t, BasePoint::P0, BranchKind::Stable, Side::PlusQuadrant, p)?;
        let u = manifolds::grow_branch_with(&t, BasePoint::Q0, BranchKind::Unstable, Side::PlusQuadrant, p)?;
        let mirrored = s.polyline.map("mirror", |q| [q[1], q[0]]);
        sym = sym
            .max(mirrored.one_sided_hausdorff(&u.polyline))
            .max(u.polyline.one_sided_hausdorff(&mirrored));
        let full = manifolds::splitting_with(&t, p)?;
        let half = manifolds::splitting_with(
            &t,
            GrowthParams {
                seed_offset: p.seed_offset / 2.0,
                ..p
            },
        )?;
        seed_shift = seed_shift.max((full.delta - half.delta).abs());
        if full.delta.abs() < 1e-8 {
            angle_ok &= (full.angle_s - FRAC_PI_2).abs() < 1e-3;
        }
        detail.push(format!("b={b}: delta={:.2e} angle defect={:.2e}", full.delta, full.angle_defect));
    }
    Ok(Outcome {
        passed: sym < 1e-6 && seed_shift < 1e-7 && angle_ok,
        worst: sym,
        detail: format!("{}; seed halving moves delta by {seed_shift:.1e}", detail.join(", ")),
    })
}

fn fgf() -> Result<Outcome> {
    let m = constants::fgf_residual_min(50, 200);
    Ok(Outcome {
        passed: m > THRESHOLD_FGF,
        worst: m,
        detail: format!("min residual {m:.6} over 50 b x 201 points, must exceed {THRESHOLD_FGF}"),
    })
}

fn constants_check() -> Result<Outcome> {
    let pairs = [
        (constants::b2().value, 1.58885),
        (constants::b3().value, 1.62326),
        (constants::b_sing().value, 1.67892),
    ];
    let worst = pairs.iter().map(|(v, r)| (v - r).abs()).fold(0.0, f64::max);
    let exact = constants::b_max().value == 1.0 + FRAC_1_SQRT_2;
    Ok(Outcome {
        passed: worst < 5e-5 && exact,
        worst,
        detail: format!("b2={:.8} b3={:.8} b_sing={:.8}", pairs[0].0, pairs[1].0, pairs[2].0),
    })
}

/// Period-6 elliptic points on the right arc, as `(phi, theta)`.
pub fn island_centers(t: &Table) -> Vec<(f64, f64)> {
    orbit_elliptic6(t)
        .ok()
        .and_then(|o| o.points_angular)
        .map(|v| {
            v.iter()
                .filter(|x| x.arc == crate::geometry::Arc::Right)
                .map(|x| (x.phi, x.theta))
                .collect()
        })
        .unwrap_or_default()
}

pub const ISLAND_RADIUS: f64 = 0.1;

fn phase_smoke() -> Result<Outcome> {
    let mut same = true;
    let mut confined = 0;
    for b in [1.51, 1.54] {
        let t = Table::new(b)?;
        let a = phase_table(&phase::phase_portrait(&t, 0, 200, 2000)).to_csv();
        let c = phase_table(&phase::phase_portrait(&t, 0, 200, 2000)).to_csv();
        same &= a == c;
        if b == 1.54 {
            let centers = island_centers(&t);
            confined = phase::phase_portrait(&t, 0, 200, 2000)
                .iter()
                .filter(|tr| phase::confined_near(tr, &centers, ISLAND_RADIUS))
                .count();
        }
    }
    Ok(Outcome {
        passed: same && confined >= 1,
        worst: if same { 0.0 } else { 1.0 },
        detail: format!("byte-identical reruns: {same}; trajectories in the six-island chain at b=1.54: {confined}"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filter_selects_by_group_and_name() {
        let all = checks();
        assert_eq!(all.len(), 15);
        assert_eq!(all.iter().filter(|c| selected(c, Some("traces"))).count(), 3);
        assert_eq!(all.iter().filter(|c| selected(c, Some("focusing"))).count(), 1);
        assert_eq!(all.iter().filter(|c| selected(c, None)).count(), 15);
    }

    #[test]
    fn closure_contains_seeds_and_images() {
        let t = Table::new(1.6).unwrap();
        let c = reflection_closure(&t, &[p0(1.6)], 2);
        assert!(c.len() >= 3);
        let l = genmap::apply_l(&t, &p0(1.6)).unwrap();
        assert!(c.iter().any(|q| q.dist(&l) < 1e-12));
    }
}
