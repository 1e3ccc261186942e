//! The billiard map in boundary coordinates, its tangent map and focusing.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{wrap_angle, AngularState, Arc, Point, Table, TOL_CORNER};
use crate::mat2::Mat2;

/// Travel parameters closer than this mean the ray runs into a corner.
const TIE_TOL: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReflectionStep {
    pub from: AngularState,
    pub to: AngularState,
    pub chord_length: f64,
    pub d_from: f64,
    pub d_to: f64,
}

/// Larger root of |w + t u|^2 = 1, i.e. where the ray leaves the unit disk around
/// the centre at offset -w. Uses the cancellation-free form of the quadratic.
fn exit_parameter(w: Point, u: Point) -> f64 {
    let bq = w.dot(u);
    let c = w.dot(w) - 1.0;
    let root = (bq * bq - c).max(0.0).sqrt();
    if bq <= 0.0 {
        -bq + root
    } else {
        -c / (bq + root)
    }
}

pub fn billiard_step(t: &Table, x: &AngularState) -> Result<ReflectionStep> {
    if !t.is_valid(x) {
        return Err(Error::Domain {
            what: "boundary state phi",
            value: x.phi,
            range: "the open arc with theta in (0, pi)",
        });
    }
    let p = t.base_point(x);
    let u = t.outgoing_direction(x);
    // The lemon is the intersection of the two disks, so the ray leaves it at the
    // first exit from either disk. On the base point's own circle the exit root is
    // exactly -2 w.u.
    let own = -2.0 * (p - t.center(x.arc)).dot(u);
    let other = exit_parameter(p - t.center(x.arc.other()), u);
    if (own - other).abs() < TIE_TOL {
        return Err(Error::CornerHit);
    }
    let (len, arc) = if own < other {
        (own, x.arc)
    } else {
        (other, x.arc.other())
    };
    if len <= 0.0 {
        return Err(Error::CornerHit);
    }
    let q = p + len * u;
    let polar = (q - t.center(arc)).angle();
    let phi = match arc {
        Arc::Right => wrap_angle(polar),
        Arc::Left => wrap_angle(PI - polar),
    };
    if phi.abs() > t.corner_angle() - TOL_CORNER {
        return Err(Error::CornerHit);
    }
    let theta = -wrap_angle(u.angle() - (polar + 0.5 * PI));
    let to = AngularState::new(arc, phi, theta);
    Ok(ReflectionStep {
        from: *x,
        to,
        chord_length: len,
        d_from: x.theta.sin(),
        d_to: theta.sin(),
    })
}

/// Derivative of the map in (arclength, angle) coordinates.
pub fn tangent_map(step: &ReflectionStep) -> Mat2 {
    let l = step.chord_length;
    let d0 = step.d_from;
    let d1 = step.d_to;
    Mat2::new(l - d0, l, l - d0 - d1, l - d1).scale(1.0 / d1)
}

/// Iterate the billiard map; stops early on the first failure and returns it.
pub fn orbit(t: &Table, start: &AngularState, n: usize) -> (Vec<AngularState>, Option<Error>) {
    let mut out = Vec::with_capacity(n + 1);
    out.push(*start);
    let mut x = *start;
    for _ in 0..n {
        match billiard_step(t, &x) {
            Ok(s) => {
                x = s.to;
                out.push(x);
            }
            Err(e) => return (out, Some(e)),
        }
    }
    (out, None)
}

/// Focusing distance of a wave front, kept as a projective pair `f = num / den`
/// so that a front focused at infinity is the ordinary value `den = 0` and a
/// front focused on the mirror is `num = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Focus {
    num: f64,
    den: f64,
}

impl Focus {
    pub fn infinite() -> Focus {
        Focus { num: 1.0, den: 0.0 }
    }

    pub fn at_distance(f: f64) -> Focus {
        Focus { num: f, den: 1.0 }.normalized()
    }

    fn normalized(self) -> Focus {
        let n = self.num.hypot(self.den);
        Focus {
            num: self.num / n,
            den: self.den / n,
        }
    }

    /// 1/f; zero for a parallel front.
    pub fn curvature(&self) -> f64 {
        self.den / self.num
    }

    pub fn distance(&self) -> f64 {
        self.num / self.den
    }

    pub fn is_infinite(&self, tol: f64) -> bool {
        self.den.abs() <= tol * self.num.abs()
    }

    /// Mirror equation 1/f+ + 1/f- = 2/d.
    pub fn reflect(self, d: f64) -> Focus {
        Focus {
            num: self.num * d,
            den: 2.0 * self.num - self.den * d,
        }
        .normalized()
    }

    /// Free flight over `len`: f-_next = len - f+.
    pub fn travel(self, len: f64) -> Focus {
        Focus {
            num: len * self.den - self.num,
            den: self.den,
        }
        .normalized()
    }
}

/// Forward focusing distance after reflecting at `step.from`.
pub fn propagate_focus(step: &ReflectionStep, f_minus: Focus) -> Focus {
    f_minus.reflect(step.d_from)
}

/// Rotation angle of the linearised second iterate at the axis orbit.
pub fn rotation_angle_o2(t: &Table) -> Result<f64> {
    let b = t.b();
    if !(b > 1.0 && b < 2.0) {
        return Err(Error::Domain {
            what: "b",
            value: b,
            range: "(1, 2)",
        });
    }
    let c = 1.0 - b;
    Ok((2.0 * c * c - 1.0).acos())
}

fn arclength_coord(x: &AngularState) -> f64 {
    match x.arc {
        Arc::Right => x.phi,
        Arc::Left => -x.phi,
    }
}

/// Mean angular advance of the second iterate around `center`, in full turns.
pub fn estimate_rotation_number(
    t: &Table,
    center: &AngularState,
    start: &AngularState,
    n_iter: usize,
    max_radius: f64,
) -> Result<f64> {
    let offset = |x: &AngularState| {
        Point::new(
            arclength_coord(x) - arclength_coord(center),
            x.theta - center.theta,
        )
    };
    let mut x = *start;
    let mut prev = offset(&x).angle();
    let mut total = 0.0;
    for k in 0..n_iter {
        let s1 = billiard_step(t, &x).map_err(|_| Error::OrbitEscaped(k))?;
        let s2 = billiard_step(t, &s1.to).map_err(|_| Error::OrbitEscaped(k))?;
        x = s2.to;
        let v = offset(&x);
        if x.arc != center.arc || v.norm() > max_radius {
            return Err(Error::OrbitEscaped(k + 1));
        }
        let a = v.angle();
        total += wrap_angle(a - prev);
        prev = a;
    }
    Ok(total.abs() / (2.0 * PI * n_iter as f64))
}
