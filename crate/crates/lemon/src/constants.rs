//! Critical table parameters, each solved from its defining equation.

use serde::Serialize;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use crate::error::Result;
use crate::genmap::{self, GenMapKind};
use crate::geometry::{LineState, Table};
use crate::parallel::{f_j, solve_alpha0, table_distance, AngleParams};
use crate::periodic::{elliptic_half_trace, find_b_crit, B_MAX};
use crate::solve::{bisect, newton_polish};

/// Lower bound for the residual of the `L I = R L` equation on the upper
/// singular curve, sampled on [`fgf_residual_min`]'s default grid. Half the
/// minimum of a fine scan (0.019539 near `d_r = 1`, `b = 1.70305`).
pub const THRESHOLD_FGF: f64 = 9.7e-3;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Constant {
    pub name: &'static str,
    pub value: f64,
    /// Defining equation evaluated at `value`.
    pub residual: f64,
}

pub fn b_crit() -> Constant {
    let value = find_b_crit();
    Constant {
        name: "b_crit",
        value,
        residual: elliptic_half_trace(value) + 1.0,
    }
}

pub fn alpha0() -> Constant {
    let value = solve_alpha0();
    Constant {
        name: "alpha0",
        value,
        residual: f_j(AngleParams {
            alpha: value,
            beta: value,
        }),
    }
}

fn b2_equation(b: f64) -> f64 {
    b - (1.0 + (8.0 * b * b + 1.0).sqrt()) / (4.0 * b) - FRAC_1_SQRT_2
}

/// Parameter where the left reflection of the corner of the singular curves
/// reaches the square's edge.
pub fn b2() -> Constant {
    let r = bisect(b2_equation, 1.5, 1.7, 1e-16).expect("sign change on [1.5, 1.7]");
    let value = newton_polish(b2_equation, r, 3);
    Constant {
        name: "b2",
        value,
        residual: b2_equation(value),
    }
}

/// First coordinate of `Phi(R(L(S0)))`, where `S0` is the common point of
/// the two upper singular curves. The first two reflections sit on singular
/// curves and use the clamped maps.
pub fn b3_equation(b: f64) -> Result<f64> {
    let t = Table::new(b)?;
    let s0 = LineState::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2);
    let x = genmap::apply_r_clamped(&t, &genmap::apply_l_clamped(&t, &s0)?)?;
    Ok(genmap::apply(&t, GenMapKind::Phi, &x)?.d_left)
}

pub fn b3() -> Constant {
    let g = |b: f64| b3_equation(b).unwrap_or(f64::NAN);
    let value = bisect(g, 1.6, 1.63, 1e-16).expect("sign change on [1.6, 1.63]");
    Constant {
        name: "b3",
        value,
        residual: g(value),
    }
}

/// Parameter at which the bifurcated diagonal point reaches the corner `S0`
/// of the singular curves: the level curve meets the axis curve at `beta = pi/4`.
pub fn b_sing() -> Constant {
    let g = |a: f64| {
        f_j(AngleParams {
            alpha: a,
            beta: FRAC_PI_4,
        })
    };
    let r = bisect(g, 0.0, FRAC_PI_4 - 1e-9, 1e-16).expect("sign change on [0, pi/4)");
    let alpha = newton_polish(g, r, 3);
    let p = AngleParams {
        alpha,
        beta: FRAC_PI_4,
    };
    Constant {
        name: "b_sing",
        value: table_distance(p),
        residual: f_j(p),
    }
}

pub fn b_max() -> Constant {
    Constant {
        name: "b_max",
        value: B_MAX,
        residual: 0.0,
    }
}

pub fn all_constants() -> Vec<Constant> {
    vec![b_crit(), alpha0(), b2(), b3(), b_sing(), b_max()]
}

/// Distance between `L(I x)` and `R(L x)` at a point of the upper singular
/// curve; `None` where either side leaves the domain of the maps.
pub fn fgf_residual(t: &Table, d_r: f64) -> Option<f64> {
    let x = genmap::singular_point(t, genmap::SingularCurveId::S1Plus, d_r)?;
    let lhs = genmap::apply_l(t, &x.swap()).ok()?;
    let rhs = genmap::apply_r_clamped(t, &genmap::apply_l_clamped(t, &x).ok()?).ok()?;
    Some(lhs.dist(&rhs))
}

/// Smallest residual over `nb` interior values of `b` in (1.5, b_max) and
/// `nu + 1` evenly spaced `d_r` in [0, 1].
pub fn fgf_residual_min(nb: usize, nu: usize) -> f64 {
    let mut m = f64::INFINITY;
    for i in 0..nb {
        let b = 1.5 + (B_MAX - 1.5) * (i + 1) as f64 / (nb + 1) as f64;
        let t = Table::new(b).expect("b in (1.5, b_max)");
        for j in 0..=nu {
            if let Some(r) = fgf_residual(&t, j as f64 / nu as f64) {
                m = m.min(r);
            }
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parallel::bifurcated_pair;

    #[test]
    fn frozen_values() {
        assert!((b_crit().value - 1.6347654210405709).abs() < 1e-12);
        assert!((alpha0().value - 0.663741775756354).abs() < 1e-12);
        assert!((b2().value - 1.5888545149764821).abs() < 1e-12);
        assert!((b3().value - 1.6232575830835365).abs() < 1e-10);
        assert!((b_sing().value - 1.678917358545118).abs() < 1e-10);
        assert_eq!(b_max().value, 1.0 + 0.5f64.sqrt());
        for c in all_constants() {
            assert!(c.residual.abs() < 1e-10, "{c:?}");
        }
    }

    #[test]
    fn b3_closed_form_of_the_first_two_reflections() {
        // R L (S0) = (r - b, r - b - 2 sqrt2 b^2 + 2 b^3) with r = 2^-1/2.
        for b in [1.6, 1.62, 1.65] {
            let t = Table::new(b).unwrap();
            let s0 = LineState::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2);
            let x = genmap::apply_r_clamped(&t, &genmap::apply_l_clamped(&t, &s0).unwrap()).unwrap();
            let r = FRAC_1_SQRT_2;
            let y = LineState::new(r - b, r - b - 2.0 * 2f64.sqrt() * b * b + 2.0 * b.powi(3));
            assert!(x.dist(&y) < 1e-12, "{x:?} {y:?}");
        }
    }

    #[test]
    fn b_sing_from_the_bifurcated_point() {
        // Independent route: follow the bifurcated diagonal point until it
        // reaches S0.
        let g = |b: f64| bifurcated_pair(b).unwrap().unwrap().0.d_left - FRAC_1_SQRT_2;
        let b = bisect(g, 1.65, 1.7, 1e-13).unwrap();
        assert!((b - b_sing().value).abs() < 1e-8, "{b}");
    }

    #[test]
    fn fgf_residual_stays_above_threshold() {
        let m = fgf_residual_min(50, 200);
        assert!(m > THRESHOLD_FGF, "{m}");
        assert!((m - 0.02562651933759155).abs() < 1e-7, "{m}");
    }
}
