//! The lemon table, boundary states, oriented lines and the charts between them.
//!
//! The table is the intersection of two unit disks centred at `O_l = (0,0)` and
//! `O_r = (b,0)`. The right arc lies on the circle centred at `O_l` and the left
//! arc on the circle centred at `O_r`.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};
use serde::Serialize;

use crate::error::{Error, Result};

/// Position-angle tolerance for corner detection.
pub const TOL_CORNER: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }
    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }
    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }
    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }
    pub fn from_angle(a: f64) -> Point {
        Point::new(a.cos(), a.sin())
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

impl Mul<Point> for f64 {
    type Output = Point;
    fn mul(self, p: Point) -> Point {
        Point::new(self * p.x, self * p.y)
    }
}

/// Wrap an angle into (-pi, pi].
pub fn wrap_angle(a: f64) -> f64 {
    let mut r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r -= 2.0 * PI;
    }
    r
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Arc {
    Left,
    Right,
}

impl Arc {
    pub fn other(self) -> Arc {
        match self {
            Arc::Left => Arc::Right,
            Arc::Right => Arc::Left,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Table {
    b: f64,
    corner_angle: f64,
}

impl Table {
    pub fn new(b: f64) -> Result<Table> {
        if !(b > 0.0 && b < 2.0) {
            return Err(Error::Domain {
                what: "b",
                value: b,
                range: "(0, 2)",
            });
        }
        Ok(Table {
            b,
            corner_angle: (0.5 * b).acos(),
        })
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Half-opening angle of each arc, `cos(corner_angle) = b/2`.
    pub fn corner_angle(&self) -> f64 {
        self.corner_angle
    }

    pub fn o_left(&self) -> Point {
        Point::new(0.0, 0.0)
    }

    pub fn o_right(&self) -> Point {
        Point::new(self.b, 0.0)
    }

    /// Upper corner A and lower corner B.
    pub fn corners(&self) -> [Point; 2] {
        let h = (1.0 - 0.25 * self.b * self.b).sqrt();
        [Point::new(0.5 * self.b, h), Point::new(0.5 * self.b, -h)]
    }

    /// Centre of the circle carrying `arc`.
    pub fn center(&self, arc: Arc) -> Point {
        match arc {
            Arc::Right => self.o_left(),
            Arc::Left => self.o_right(),
        }
    }

    /// Polar angle of the boundary point around its own centre.
    pub fn polar_angle(&self, arc: Arc, phi: f64) -> f64 {
        match arc {
            Arc::Right => phi,
            Arc::Left => PI - phi,
        }
    }

    fn phi_from_polar(&self, arc: Arc, polar: f64) -> f64 {
        match arc {
            Arc::Right => wrap_angle(polar),
            Arc::Left => wrap_angle(PI - polar),
        }
    }

    pub fn base_point(&self, x: &AngularState) -> Point {
        self.center(x.arc) + Point::from_angle(self.polar_angle(x.arc, x.phi))
    }

    /// Counter-clockwise unit tangent; the table lies to its left.
    pub fn unit_tangent(&self, arc: Arc, phi: f64) -> Point {
        Point::from_angle(self.polar_angle(arc, phi) + 0.5 * PI)
    }

    pub fn outgoing_direction(&self, x: &AngularState) -> Point {
        Point::from_angle(self.polar_angle(x.arc, x.phi) + 0.5 * PI + x.theta)
    }

    /// Direction of the trajectory that arrived at `x` before reflecting.
    pub fn incoming_direction(&self, x: &AngularState) -> Point {
        Point::from_angle(self.polar_angle(x.arc, x.phi) + 0.5 * PI - x.theta)
    }

    pub fn is_valid(&self, x: &AngularState) -> bool {
        x.phi.abs() < self.corner_angle && x.theta > 0.0 && x.theta < PI
    }
}

/// Boundary phase point. On the left arc `phi` is stored as `pi - polar angle`,
/// so on both arcs `phi = 0` is the axis point and `phi > 0` the upper half.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AngularState {
    pub arc: Arc,
    pub phi: f64,
    /// Angle from the counter-clockwise tangent to the outgoing direction, in (0, pi).
    pub theta: f64,
}

impl AngularState {
    pub const fn new(arc: Arc, phi: f64, theta: f64) -> Self {
        AngularState { arc, phi, theta }
    }

    /// The time-reversed state at the same base point.
    pub fn reversed(&self) -> AngularState {
        AngularState::new(self.arc, self.phi, PI - self.theta)
    }
}

/// Signed distances from the two centres to an oriented line.
///
/// For a line through `p` with unit direction `u`, `d = u x (p - O)`.
/// Reversing the orientation negates both coordinates, and
/// `sin(heading) = (d_right - d_left) / b`.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize)]
pub struct LineState {
    pub d_left: f64,
    pub d_right: f64,
}

impl LineState {
    pub const fn new(d_left: f64, d_right: f64) -> Self {
        LineState { d_left, d_right }
    }

    pub fn swap(&self) -> LineState {
        LineState::new(self.d_right, self.d_left)
    }

    pub fn neg(&self) -> LineState {
        LineState::new(-self.d_left, -self.d_right)
    }

    pub fn to_array(&self) -> [f64; 2] {
        [self.d_left, self.d_right]
    }

    pub fn from_array(a: [f64; 2]) -> Self {
        LineState::new(a[0], a[1])
    }

    pub fn dist(&self, o: &LineState) -> f64 {
        (self.d_left - o.d_left).hypot(self.d_right - o.d_right)
    }

    pub fn sin_heading(&self, b: f64) -> f64 {
        (self.d_right - self.d_left) / b
    }

    pub fn in_square(&self) -> bool {
        self.d_left.abs() <= 1.0 && self.d_right.abs() <= 1.0
    }
}

/// Horizontal sense of an oriented line; the line chart does not record it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Heading {
    Leftward,
    Rightward,
}

impl Heading {
    pub fn of_direction(u: Point) -> Heading {
        if u.x < 0.0 {
            Heading::Leftward
        } else {
            Heading::Rightward
        }
    }
}

fn line_through(t: &Table, p: Point, u: Point) -> LineState {
    LineState::new(u.cross(p - t.o_left()), u.cross(p - t.o_right()))
}

fn direction_of(x: &AngularState, t: &Table, outgoing: bool) -> Point {
    if outgoing {
        t.outgoing_direction(x)
    } else {
        t.incoming_direction(x)
    }
}

/// Line coordinates of the outgoing (or incoming) trajectory line of `x`.
pub fn angular_to_line(t: &Table, x: &AngularState, outgoing: bool) -> LineState {
    line_through(t, t.base_point(x), direction_of(x, t, outgoing))
}

pub fn heading_of(t: &Table, x: &AngularState, outgoing: bool) -> Heading {
    Heading::of_direction(direction_of(x, t, outgoing))
}

/// State at boundary point `p` of `arc` whose outgoing ray points at `target`.
pub fn state_toward(t: &Table, arc: Arc, p: Point, target: Point) -> AngularState {
    let polar = (p - t.center(arc)).angle();
    let theta = wrap_angle((target - p).angle() - (polar + 0.5 * PI));
    AngularState::new(arc, t.phi_from_polar(arc, polar), theta)
}

/// One intersection of a line with an arc's circle, read as a billiard state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChartHit {
    pub state: AngularState,
    /// The point lies on the lemon arc itself.
    pub on_arc: bool,
    /// True when the line leaves the boundary here (the line is the outgoing
    /// line of `state`); false when it arrives and reflects into `state`.
    pub departure: bool,
}

/// Invert the line chart on the circle of `arc`.
///
/// Returns the departure and the arrival intersection, in that order. Both
/// carry a post-reflection angle in (0, pi). Near-tangent lines with
/// `1 - d^2 <= 0` in floating point give `NoIntersection`.
pub fn line_to_angular(
    t: &Table,
    l: &LineState,
    arc: Arc,
    heading: Heading,
) -> Result<[ChartHit; 2]> {
    let s = l.sin_heading(t.b);
    if s.abs() > 1.0 {
        return Err(Error::Domain {
            what: "sin(heading)",
            value: s,
            range: "[-1, 1]",
        });
    }
    let c = (1.0 - s * s).sqrt();
    let u = match heading {
        Heading::Leftward => Point::new(-c, s),
        Heading::Rightward => Point::new(c, s),
    };
    let d = match arc {
        Arc::Right => l.d_left,
        Arc::Left => l.d_right,
    };
    let half_chord_sq = 1.0 - d * d;
    if half_chord_sq <= 0.0 {
        return Err(Error::NoIntersection(d.abs()));
    }
    let h = half_chord_sq.sqrt();
    let o = t.center(arc);
    // Foot of the perpendicular: u x (foot - o) = d.
    let foot = o + d * Point::new(-u.y, u.x);
    let mut hits = [ChartHit {
        state: AngularState::new(arc, 0.0, 0.0),
        on_arc: false,
        departure: true,
    }; 2];
    for (k, (tp, departure)) in [(-h, true), (h, false)].into_iter().enumerate() {
        let p = foot + tp * u;
        let polar = (p - o).angle();
        let phi = t.phi_from_polar(arc, polar);
        let rel = wrap_angle(u.angle() - (polar + 0.5 * PI));
        let theta = if departure { rel } else { -rel };
        if (phi.abs() - t.corner_angle).abs() < TOL_CORNER {
            return Err(Error::CornerHit);
        }
        hits[k] = ChartHit {
            state: AngularState::new(arc, phi, theta),
            on_arc: phi.abs() < t.corner_angle,
            departure,
        };
    }
    Ok(hits)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corner_angle_matches_half_b() {
        for b in [0.3, 1.0, 1.5, 1.7, 1.99] {
            let t = Table::new(b).unwrap();
            assert!((t.corner_angle().cos() - b / 2.0).abs() < 1e-14);
            for c in t.corners() {
                assert!(((c - t.o_left()).norm() - 1.0).abs() < 1e-12);
                assert!(((c - t.o_right()).norm() - 1.0).abs() < 1e-12);
            }
        }
        assert!(Table::new(2.0).is_err());
        assert!(Table::new(0.0).is_err());
    }

    #[test]
    fn axis_trajectory_has_zero_line_coordinates() {
        let t = Table::new(1.5).unwrap();
        let x = AngularState::new(Arc::Left, 0.0, 0.5 * PI);
        let l = angular_to_line(&t, &x, true);
        assert!(l.d_left.abs() < 1e-15 && l.d_right.abs() < 1e-15);
        assert!((t.base_point(&x).x - 0.5).abs() < 1e-15);
    }

    #[test]
    fn lines_through_right_vertex_lie_on_reflection_fixed_locus() {
        let t = Table::new(1.6).unwrap();
        for theta in [0.2, 0.9, 1.6, 2.5] {
            let x = AngularState::new(Arc::Right, 0.0, theta);
            let l = angular_to_line(&t, &x, true);
            assert!((l.d_right - (1.0 - t.b()) * l.d_left).abs() < 1e-14);
        }
    }

    #[test]
    fn left_arc_distance_to_its_centre_is_minus_cos_theta() {
        // theta is measured from the tangent, so the distance from the arc's own
        // centre is -cos(theta), i.e. -sin of the angle taken from the normal.
        let t = Table::new(1.55).unwrap();
        let x = AngularState::new(Arc::Left, 0.3, 1.1);
        let l = angular_to_line(&t, &x, true);
        assert!((l.d_right + x.theta.cos()).abs() < 1e-14);
    }

    #[test]
    fn axis_line_inverts_to_axis_points() {
        let t = Table::new(1.6).unwrap();
        for (arc, heading) in [(Arc::Right, Heading::Leftward), (Arc::Left, Heading::Rightward)] {
            let hits = line_to_angular(&t, &LineState::new(0.0, 0.0), arc, heading).unwrap();
            let dep = hits[0];
            assert!(dep.departure && dep.on_arc);
            assert!(dep.state.phi.abs() < 1e-15);
            assert!((dep.state.theta - 0.5 * PI).abs() < 1e-15);
            assert!(!hits[1].on_arc);
            assert!((hits[1].state.theta - 0.5 * PI).abs() < 1e-15);
        }
    }

    #[test]
    fn near_tangent_lines() {
        let t = Table::new(1.6).unwrap();
        let l = LineState::new(1.0 - 1e-16, 1.0 - 1e-16 - 0.1);
        match line_to_angular(&t, &l, Arc::Right, Heading::Leftward) {
            Ok(h) => {
                let a = t.base_point(&h[0].state);
                let b = t.base_point(&h[1].state);
                assert!((a - b).norm() < 1e-7);
            }
            Err(e) => assert!(matches!(e, Error::NoIntersection(_))),
        }
        let l = LineState::new(1.0, 0.9);
        assert!(matches!(
            line_to_angular(&t, &l, Arc::Right, Heading::Leftward),
            Err(Error::NoIntersection(_))
        ));
    }

    #[test]
    fn corner_hits_are_reported() {
        let t = Table::new(1.6).unwrap();
        let a = t.corners()[0];
        // Horizontal leftward line through the upper corner.
        let u = Point::new(-1.0, 0.0);
        let l = line_through(&t, a, u);
        assert_eq!(
            line_to_angular(&t, &l, Arc::Right, Heading::Leftward),
            Err(Error::CornerHit)
        );
    }
}
