//! Reflection maps in line coordinates and their compositions.
//!
//! `apply_l` reflects an oriented line on the left arc (circle around `O_r`), so it
//! keeps `d_right`; `apply_r` reflects on the right arc and keeps `d_left`.
//! Both are involutions, conjugate under the swap `I`, and odd.

use crate::curve::CurveTrace;
use crate::error::{Error, Result};
use crate::geometry::{LineState, Table};
use crate::mat2::Mat2;

/// Radicands in [-RADICAND_TOL, 0) are treated as zero.
pub const RADICAND_TOL: f64 = 1e-14;
/// Points this close to the branched locus (in `b^2 - s^2`) are taken to lie on it.
pub const BRANCH_SNAP: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GenMapKind {
    L,
    R,
    /// L then R then L.
    Phi,
    /// R then L then R.
    Psi,
    /// (R L)^3, i.e. Psi after Phi.
    Theta,
    /// Swap of the two coordinates.
    I,
}

impl GenMapKind {
    /// Elementary factors in the order they are applied.
    fn factors(self) -> &'static [GenMapKind] {
        use GenMapKind::*;
        match self {
            L => &[L],
            R => &[R],
            I => &[I],
            Phi => &[L, R, L],
            Psi => &[R, L, R],
            Theta => &[L, R, L, R, L, R],
        }
    }

    /// Elementary factors of the inverse map, in application order.
    fn inverse_factors(self) -> &'static [GenMapKind] {
        use GenMapKind::*;
        match self {
            Theta => &[R, L, R, L, R, L],
            // The others are involutions or palindromes of involutions.
            k => k.factors(),
        }
    }
}

/// Reflection of the coordinate `moving` across the arc whose centre sits at
/// signed distance `kept` from the line. Returns the new `moving` coordinate
/// and the partial derivatives with respect to (moving, kept).
///
/// With `clamp_branch` the branched locus is evaluated at zero radicand
/// instead of being rejected.
fn reflect(b: f64, moving: f64, kept: f64, clamp_branch: bool) -> Result<(f64, f64, f64)> {
    let s = kept - moving;
    let strip = b * b - s * s;
    let chord = 1.0 - kept * kept;
    let mut radicand = strip * chord;
    if strip.abs() <= BRANCH_SNAP {
        if !clamp_branch {
            return Err(Error::Branched { stage: 0 });
        }
        // Rounding in `strip` would otherwise show up as its square root.
        radicand = 0.0;
    }
    if radicand < 0.0 {
        if radicand < -RADICAND_TOL {
            return Err(Error::OutOfDomain { stage: 0, radicand });
        }
        radicand = 0.0;
    }
    let root = radicand.sqrt();
    let k2 = 1.0 - 2.0 * kept * kept;
    let value = s * k2 - 2.0 * kept * root + kept;
    let (d_moving, d_kept) = if root > 0.0 {
        let dm = -k2 - 2.0 * kept * chord * s / root;
        // d/dkept of s*k2 - 2 kept root + kept.
        let droot_dkept = (-2.0 * s * chord - 2.0 * kept * strip) / (2.0 * root);
        let dk = k2 - 4.0 * kept * s - 2.0 * root - 2.0 * kept * droot_dkept + 1.0;
        (dm, dk)
    } else {
        (f64::NAN, f64::NAN)
    };
    Ok((value, d_moving, d_kept))
}

pub fn apply_l(t: &Table, l: &LineState) -> Result<LineState> {
    let (v, _, _) = reflect(t.b(), l.d_left, l.d_right, false)?;
    Ok(LineState::new(v, l.d_right))
}

pub fn apply_r(t: &Table, l: &LineState) -> Result<LineState> {
    let (v, _, _) = reflect(t.b(), l.d_right, l.d_left, false)?;
    Ok(LineState::new(l.d_left, v))
}

/// `apply_l` that evaluates points on the branched locus and clamps small
/// negative radicands; used on singular curves where both branches coincide.
pub fn apply_l_clamped(t: &Table, l: &LineState) -> Result<LineState> {
    let (v, _, _) = reflect(t.b(), l.d_left, l.d_right, true)?;
    Ok(LineState::new(v, l.d_right))
}

pub fn apply_r_clamped(t: &Table, l: &LineState) -> Result<LineState> {
    let (v, _, _) = reflect(t.b(), l.d_right, l.d_left, true)?;
    Ok(LineState::new(l.d_left, v))
}

fn apply_factor(t: &Table, k: GenMapKind, l: &LineState) -> Result<LineState> {
    match k {
        GenMapKind::L => apply_l(t, l),
        GenMapKind::R => apply_r(t, l),
        GenMapKind::I => Ok(l.swap()),
        _ => unreachable!("composite kinds are expanded into factors"),
    }
}

fn run(t: &Table, factors: &[GenMapKind], l: &LineState) -> Result<LineState> {
    let mut x = *l;
    for (stage, &k) in factors.iter().enumerate() {
        x = apply_factor(t, k, &x).map_err(|e| e.at_stage(stage))?;
    }
    Ok(x)
}

pub fn apply(t: &Table, k: GenMapKind, l: &LineState) -> Result<LineState> {
    run(t, k.factors(), l)
}

/// Exact inverse, composed from the involutions.
pub fn apply_inverse(t: &Table, k: GenMapKind, l: &LineState) -> Result<LineState> {
    run(t, k.inverse_factors(), l)
}

fn factor_jacobian(t: &Table, k: GenMapKind, l: &LineState) -> Result<(LineState, Mat2)> {
    match k {
        GenMapKind::L => {
            let (v, dm, dk) = reflect(t.b(), l.d_left, l.d_right, false)?;
            check_finite(dm, dk)?;
            Ok((LineState::new(v, l.d_right), Mat2::new(dm, dk, 0.0, 1.0)))
        }
        GenMapKind::R => {
            let (v, dm, dk) = reflect(t.b(), l.d_right, l.d_left, false)?;
            check_finite(dm, dk)?;
            Ok((LineState::new(l.d_left, v), Mat2::new(1.0, 0.0, dk, dm)))
        }
        GenMapKind::I => Ok((l.swap(), Mat2::SWAP)),
        _ => unreachable!("composite kinds are expanded into factors"),
    }
}

fn check_finite(a: f64, b: f64) -> Result<()> {
    if a.is_finite() && b.is_finite() {
        Ok(())
    } else {
        Err(Error::OutOfDomain {
            stage: 0,
            radicand: 0.0,
        })
    }
}

fn run_jacobian(t: &Table, factors: &[GenMapKind], l: &LineState) -> Result<(LineState, Mat2)> {
    let mut x = *l;
    let mut jac = Mat2::IDENTITY;
    for (stage, &k) in factors.iter().enumerate() {
        let (y, j) = factor_jacobian(t, k, &x).map_err(|e| e.at_stage(stage))?;
        jac = j * jac;
        x = y;
    }
    Ok((x, jac))
}

/// Analytic derivative, chained through the factors.
pub fn jacobian(t: &Table, k: GenMapKind, l: &LineState) -> Result<Mat2> {
    run_jacobian(t, k.factors(), l).map(|(_, j)| j)
}

/// Image and derivative in one pass.
pub fn apply_with_jacobian(t: &Table, k: GenMapKind, l: &LineState) -> Result<(LineState, Mat2)> {
    run_jacobian(t, k.factors(), l)
}

pub fn inverse_with_jacobian(
    t: &Table,
    k: GenMapKind,
    l: &LineState,
) -> Result<(LineState, Mat2)> {
    run_jacobian(t, k.inverse_factors(), l)
}

/// Density of the invariant measure of the reflections, `1/sqrt(b^2 - (d_r - d_l)^2)`.
pub fn invariant_density(t: &Table, l: &LineState) -> f64 {
    let s = l.d_right - l.d_left;
    1.0 / (t.b() * t.b() - s * s).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SingularCurveId {
    S1Plus,
    S1Minus,
    S2Plus,
    S2Minus,
    LPlus,
    LMinus,
}

impl SingularCurveId {
    pub const ALL: [SingularCurveId; 6] = [
        SingularCurveId::S1Plus,
        SingularCurveId::S1Minus,
        SingularCurveId::S2Plus,
        SingularCurveId::S2Minus,
        SingularCurveId::LPlus,
        SingularCurveId::LMinus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SingularCurveId::S1Plus => "S1+",
            SingularCurveId::S1Minus => "S1-",
            SingularCurveId::S2Plus => "S2+",
            SingularCurveId::S2Minus => "S2-",
            SingularCurveId::LPlus => "L+b",
            SingularCurveId::LMinus => "L-b",
        }
    }
}

/// Point of a singular curve at free coordinate `u`, if it lies in the square.
pub fn singular_point(t: &Table, id: SingularCurveId, u: f64) -> Option<LineState> {
    let b = t.b();
    let p = match id {
        // Free coordinate d_r in (0, 1], d_l = d_r + b (1 - 2 d_r^2).
        SingularCurveId::S1Plus => LineState::new(u + b * (1.0 - 2.0 * u * u), u),
        SingularCurveId::S1Minus => LineState::new(-u - b * (1.0 - 2.0 * u * u), -u),
        SingularCurveId::S2Plus => LineState::new(u, u + b * (1.0 - 2.0 * u * u)),
        SingularCurveId::S2Minus => LineState::new(-u, -u - b * (1.0 - 2.0 * u * u)),
        // Free coordinate d_l in [-1, 1].
        SingularCurveId::LPlus => LineState::new(u, u + b),
        SingularCurveId::LMinus => LineState::new(u, u - b),
    };
    if p.in_square() {
        Some(p)
    } else {
        None
    }
}

/// `n` samples of a singular curve inside the square, by the free coordinate.
pub fn singular_curve(t: &Table, id: SingularCurveId, n: usize) -> CurveTrace {
    let n = n.max(2);
    let (lo, hi) = match id {
        SingularCurveId::LPlus | SingularCurveId::LMinus => (-1.0, 1.0),
        _ => (0.0, 1.0),
    };
    // Find the sub-interval where the curve is inside the square; it is an
    // interval because |d_l| is monotone there for b > 1.
    let fine = 20 * n;
    let inside: Vec<f64> = (0..=fine)
        .map(|i| lo + (hi - lo) * i as f64 / fine as f64)
        .filter(|&u| u > 0.0 || matches!(id, SingularCurveId::LPlus | SingularCurveId::LMinus))
        .filter(|&u| singular_point(t, id, u).is_some())
        .collect();
    let mut c = CurveTrace::new(id.name());
    if inside.is_empty() {
        return c;
    }
    let refine = |a: f64, b: f64| {
        // a inside, b outside
        let (mut a, mut b) = (a, b);
        for _ in 0..60 {
            let m = 0.5 * (a + b);
            if singular_point(t, id, m).is_some() {
                a = m;
            } else {
                b = m;
            }
        }
        a
    };
    let step = (hi - lo) / fine as f64;
    let first = inside[0];
    let last = *inside.last().unwrap();
    let u0 = if first - step >= lo && singular_point(t, id, first - step).is_none() {
        refine(first, first - step)
    } else {
        first
    };
    let u1 = if last + step <= hi && singular_point(t, id, last + step).is_none() {
        refine(last, last + step)
    } else {
        last
    };
    for i in 0..n {
        let u = u0 + (u1 - u0) * i as f64 / (n - 1) as f64;
        if let Some(p) = singular_point(t, id, u) {
            c.push(p.to_array(), u);
        }
    }
    c
}

/// Membership in the component of the origin cut out by the singular curves.
pub fn in_domain(t: &Table, l: &LineState) -> bool {
    let b = t.b();
    let (dl, dr) = (l.d_left, l.d_right);
    if !l.in_square() || (dr - dl).abs() >= b {
        return false;
    }
    let side1 = if dr > 0.0 {
        dl - dr < b * (1.0 - 2.0 * dr * dr)
    } else if dr < 0.0 {
        dl - dr > -b * (1.0 - 2.0 * dr * dr)
    } else {
        true
    };
    let side2 = if dl > 0.0 {
        dr - dl < b * (1.0 - 2.0 * dl * dl)
    } else if dl < 0.0 {
        dr - dl > -b * (1.0 - 2.0 * dl * dl)
    } else {
        true
    };
    side1 && side2
}

/// Closed-form graph of Fix(Phi) over `d_r` in [1-b, b-1].
pub fn fix_phi_graph(t: &Table, dr: f64) -> f64 {
    let b = t.b();
    let a = (1.0 - b) * (1.0 - b) - dr * dr;
    let inner = (a.max(0.0) * (1.0 - dr * dr)).sqrt();
    dr / (b - 1.0) * (-1.0 + 2.0 * b * (1.0 - dr * dr) - 2.0 * b * inner)
}

/// `n` samples of the fixed-point set of `k` in {L, R, Phi, Psi}, less those
/// outside the square.
pub fn fixed_locus(t: &Table, k: GenMapKind, n: usize) -> Result<CurveTrace> {
    let b = t.b();
    let n = n.max(2);
    let mut c = CurveTrace::new(format!("Fix({k:?})"));
    let lin = |i: usize, lo: f64, hi: f64| lo + (hi - lo) * i as f64 / (n - 1) as f64;
    match k {
        GenMapKind::L | GenMapKind::R => {
            // d_moving = (1 - b) d_kept for |d_kept| <= 1.
            for i in 0..n {
                let u = lin(i, -1.0, 1.0);
                let p = if k == GenMapKind::L {
                    [(1.0 - b) * u, u]
                } else {
                    [u, (1.0 - b) * u]
                };
                c.push(p, u);
            }
        }
        GenMapKind::Phi | GenMapKind::Psi => {
            if b <= 1.0 {
                return Err(Error::Domain {
                    what: "b",
                    value: b,
                    range: "(1, 2)",
                });
            }
            for i in 0..n {
                let dr = lin(i, 1.0 - b, b - 1.0);
                let dl = fix_phi_graph(t, dr);
                if dl.abs() > 1.0 {
                    continue;
                }
                let p = if k == GenMapKind::Phi { [dl, dr] } else { [dr, dl] };
                c.push(p, dr);
            }
        }
        _ => {
            return Err(Error::Domain {
                what: "map kind",
                value: f64::NAN,
                range: "{L, R, Phi, Psi}",
            })
        }
    }
    Ok(c)
}

/// Which composition the monotonicity witness refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessMap {
    Phi,
    Psi,
}

/// Signed gap that vanishes exactly on the parallel-segment curve of the map:
/// for Phi `(d_l' - d_r') - (d_r - d_l)`, for Psi `(d_r' - d_l') - (d_l - d_r)`.
/// Positive on the side away from the origin.
pub fn monotonicity_witness(t: &Table, l: &LineState, which: WitnessMap) -> Result<f64> {
    match which {
        WitnessMap::Phi => {
            let y = apply(t, GenMapKind::Phi, l)?;
            Ok((y.d_left - y.d_right) - (l.d_right - l.d_left))
        }
        WitnessMap::Psi => {
            let y = apply(t, GenMapKind::Psi, l)?;
            Ok((y.d_right - y.d_left) - (l.d_left - l.d_right))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const B_MAX: f64 = 1.0 + std::f64::consts::FRAC_1_SQRT_2;

    fn table(b: f64) -> Table {
        Table::new(b).unwrap()
    }

    #[test]
    fn origin_is_fixed() {
        let t = table(1.6);
        for k in [GenMapKind::L, GenMapKind::R, GenMapKind::Theta] {
            let y = apply(&t, k, &LineState::new(0.0, 0.0)).unwrap();
            assert!(y.d_left.abs() < 1e-15 && y.d_right.abs() < 1e-15);
        }
    }

    #[test]
    fn value_at_b_max() {
        let t = table(B_MAX);
        let y = apply_l(&t, &LineState::new(0.6, 0.6)).unwrap();
        assert!((y.d_left + 1.03882).abs() < 1e-5, "{y:?}");
        assert_eq!(y.d_right, 0.6);
    }

    #[test]
    fn right_reflection_fixes_lines_through_right_vertex() {
        let t = table(1.6);
        for u in [-0.9, -0.3, 0.2, 0.8] {
            let l = LineState::new(u, (1.0 - t.b()) * u);
            let y = apply_r(&t, &l).unwrap();
            assert!(y.dist(&l) < 1e-14);
        }
    }

    #[test]
    fn errors_are_staged() {
        let t = table(1.6);
        // Outside the strip |d_r - d_l| < b.
        let l = LineState::new(-0.9, 0.95);
        assert!(matches!(apply_l(&t, &l), Err(Error::OutOfDomain { stage: 0, .. })));
        let on = LineState::new(-0.5, -0.5 + t.b());
        assert_eq!(apply_l(&t, &on), Err(Error::Branched { stage: 0 }));
        assert!(apply_l_clamped(&t, &on).is_ok());
        // Compositions that get past the first factor report the failing stage.
        let mut later = 0;
        for i in 0..40 {
            for j in 0..40 {
                let x = LineState::new(-0.975 + 0.05 * i as f64, -0.975 + 0.05 * j as f64);
                if apply_l(&t, &x).is_err() {
                    continue;
                }
                match apply(&t, GenMapKind::Theta, &x) {
                    Err(Error::OutOfDomain { stage, .. }) | Err(Error::Branched { stage }) => {
                        assert!(stage > 0);
                        later += 1;
                    }
                    Err(e) => panic!("unexpected {e:?}"),
                    Ok(_) => {}
                }
            }
        }
        assert!(later > 0);
    }

    #[test]
    fn jacobian_of_involution_square_is_identity() {
        let t = table(1.55);
        let l = LineState::new(0.2, -0.1);
        let j1 = jacobian(&t, GenMapKind::L, &l).unwrap();
        let j2 = jacobian(&t, GenMapKind::L, &apply_l(&t, &l).unwrap()).unwrap();
        assert!((j2 * j1).max_abs_diff(&Mat2::IDENTITY) < 1e-10);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let t = table(1.6);
        let h = 1e-6;
        for k in [GenMapKind::L, GenMapKind::R, GenMapKind::Phi, GenMapKind::Theta] {
            for l in [LineState::new(0.1, 0.3), LineState::new(-0.2, 0.05)] {
                let j = jacobian(&t, k, &l).unwrap();
                for col in 0..2 {
                    let mut a = l.to_array();
                    let mut c = l.to_array();
                    a[col] += h;
                    c[col] -= h;
                    let fa = apply(&t, k, &LineState::from_array(a)).unwrap();
                    let fc = apply(&t, k, &LineState::from_array(c)).unwrap();
                    let fd = [
                        (fa.d_left - fc.d_left) / (2.0 * h),
                        (fa.d_right - fc.d_right) / (2.0 * h),
                    ];
                    for row in 0..2 {
                        assert!((j.m[row][col] - fd[row]).abs() < 1e-7, "{k:?} {l:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn determinant_follows_invariant_density() {
        let t = table(1.58);
        for l in [LineState::new(0.1, 0.3), LineState::new(-0.4, 0.2), LineState::new(0.5, 0.5)] {
            let y = apply_l(&t, &l).unwrap();
            let det = jacobian(&t, GenMapKind::L, &l).unwrap().det();
            let expected = -invariant_density(&t, &l) / invariant_density(&t, &y);
            assert!((det - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn s0_lies_on_both_upper_singular_curves() {
        let s0 = std::f64::consts::FRAC_1_SQRT_2;
        for b in [1.51, 1.6, 1.7] {
            let t = table(b);
            let p = singular_point(&t, SingularCurveId::S1Plus, s0).unwrap();
            let q = singular_point(&t, SingularCurveId::S2Plus, s0).unwrap();
            assert!((p.d_left - s0).abs() < 1e-15 && (p.d_right - s0).abs() < 1e-15);
            assert!(p.dist(&q) < 1e-15);
        }
    }

    #[test]
    fn left_reflection_sends_s1_to_branched_locus() {
        let t = table(1.6);
        for (id, sign) in [(SingularCurveId::S1Plus, 1.0), (SingularCurveId::S1Minus, -1.0)] {
            let c = singular_curve(&t, id, 50);
            assert!(c.len() >= 45);
            for p in &c.points {
                let y = apply_l_clamped(&t, &LineState::from_array(*p)).unwrap();
                assert!((y.d_right - y.d_left - sign * t.b()).abs() < 1e-10);
                // The derivative in d_l vanishes there. At |d_r| = 1 the line
                // is tangent to the arc's circle and the map is degenerate.
                if p[1].abs() > 0.999 {
                    continue;
                }
                let h = 1e-6;
                let f = |dl: f64| apply_l_clamped(&t, &LineState::new(dl, p[1])).unwrap().d_left;
                let slope = (f(p[0] + h) - f(p[0] - h)) / (2.0 * h);
                assert!(slope.abs() < 1e-5, "slope {slope} at {p:?}");
            }
        }
    }

    #[test]
    fn fixed_loci_are_fixed() {
        let t = table(1.6);
        for k in [GenMapKind::L, GenMapKind::R, GenMapKind::Phi, GenMapKind::Psi] {
            let c = fixed_locus(&t, k, 41).unwrap();
            assert!(c.points.iter().any(|p| p[0].abs() < 1e-15 && p[1].abs() < 1e-15));
            // Both endpoints sit on the branched locus.
            for p in &c.points[1..c.len() - 1] {
                let x = LineState::from_array(*p);
                let y = apply(&t, k, &x).unwrap();
                assert!(y.dist(&x) < 1e-9, "{k:?} {x:?} -> {y:?}");
            }
        }
    }

    #[test]
    fn fix_phi_graph_equals_reflection_of_fix_r() {
        // Fix(Phi) = L(Fix(R)) since L is an involution.
        let t = table(1.57);
        for i in 1..20 {
            let u = -1.0 + 0.1 * i as f64;
            let x = apply_l(&t, &LineState::new(u, (1.0 - t.b()) * u)).unwrap();
            assert!((fix_phi_graph(&t, x.d_right) - x.d_left).abs() < 1e-12);
        }
    }

    #[test]
    fn domain_predicate() {
        let t = table(1.6);
        assert!(in_domain(&t, &LineState::new(0.0, 0.0)));
        assert!(in_domain(&t, &LineState::new(0.5, 0.5)));
        assert!(!in_domain(&t, &LineState::new(0.75, 0.75)));
        assert!(!in_domain(&t, &LineState::new(-0.9, 0.9)));
        assert!(in_domain(&t, &LineState::new(0.0, 0.74)));
    }

    #[test]
    fn witness_sign() {
        let t = table(1.6);
        let e = (1.0 - 1.0 / (4.0 * 0.36f64)).sqrt();
        let out = LineState::new(e + 1e-3, e + 1e-3);
        let inn = LineState::new(0.5 * e, 0.5 * e);
        assert!(monotonicity_witness(&t, &out, WitnessMap::Phi).unwrap() > 0.0);
        assert!(monotonicity_witness(&t, &inn, WitnessMap::Phi).unwrap() < 0.0);
        assert!(monotonicity_witness(&t, &out, WitnessMap::Psi).unwrap() > 0.0);
        let e0 = LineState::new(e, e);
        assert!(monotonicity_witness(&t, &e0, WitnessMap::Phi).unwrap().abs() < 1e-12);
    }
}
