//! Stable and unstable branches of the hyperbolic Theta-fixed points P0 and
//! Q0, their crossings with the diagonal and the splitting measured there.
//!
//! A branch is parametrised by `sigma = k + s`: the point is the seed
//! `base + offset * mu^s * v` pushed `k` times along the branch (by Theta for
//! unstable branches, by its inverse for stable ones), where `mu > 1` is the
//! expansion factor of that map along `v`. Every vertex is therefore an exact
//! iterate, never an interpolation.

use serde::Serialize;
use std::f64::consts::FRAC_PI_2;

use crate::curve::{dist, CurveTrace};
use crate::error::{Error, Result};
use crate::genmap::{self, GenMapKind, SingularCurveId};
use crate::geometry::{LineState, Table};
use crate::parallel::{curve_c, CurveKind};
use crate::periodic::{hyperbolic_eigendata, p0, q0, B_MAX};
use crate::solve::bisect;

pub const SEED_OFFSET: f64 = 1e-7;
pub const MAX_GAP: f64 = 1e-3;
pub const INTERP_TOL: f64 = 1e-6;
/// Arclength grown by default, enough to reach the diagonal for b < 1.6.
pub const DEFAULT_BUDGET: f64 = 1.5;
const LEVEL_SAMPLES: usize = 8;
const MAX_LEVELS: usize = 5000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BasePoint {
    P0,
    Q0,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BranchKind {
    Stable,
    Unstable,
}

/// `PlusQuadrant` leaves the base point into the open first quadrant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Side {
    PlusQuadrant,
    Other,
}

#[derive(Clone, Debug)]
pub struct ManifoldBranch {
    pub b: f64,
    pub base_id: BasePoint,
    pub base: LineState,
    pub kind: BranchKind,
    pub side: Side,
    /// Vertices with their `sigma` parameter.
    pub polyline: CurveTrace,
    pub seed_offset: f64,
    /// Number of fundamental domains grown.
    pub growth_steps: usize,
    pub direction: [f64; 2],
    /// Expansion factor per step along the branch.
    pub factor: f64,
    /// Set when growth stopped because the branch left the domain of the maps.
    pub left_domain: Option<LineState>,
}

impl ManifoldBranch {
    fn step_kind(&self) -> StepKind {
        match self.kind {
            BranchKind::Unstable => StepKind::Forward,
            BranchKind::Stable => StepKind::Backward,
        }
    }

    /// Exact branch point at parameter `sigma`.
    pub fn point_at(&self, t: &Table, sigma: f64) -> Result<LineState> {
        let k = sigma.floor().max(0.0) as usize;
        let s = sigma - k as f64;
        let mut x = seed(self.base, self.direction, self.seed_offset, self.factor, s);
        for _ in 0..k {
            x = self.step_kind().apply(t, &x)?;
        }
        Ok(x)
    }

    pub fn last_sigma(&self) -> f64 {
        self.polyline.params.last().copied().unwrap_or(0.0)
    }
}

#[derive(Clone, Copy)]
enum StepKind {
    Forward,
    Backward,
}

impl StepKind {
    fn apply(self, t: &Table, x: &LineState) -> Result<LineState> {
        match self {
            StepKind::Forward => genmap::apply(t, GenMapKind::Theta, x),
            StepKind::Backward => genmap::apply_inverse(t, GenMapKind::Theta, x),
        }
    }
}

fn seed(base: LineState, v: [f64; 2], offset: f64, factor: f64, s: f64) -> LineState {
    let r = offset * factor.powf(s);
    LineState::new(base.d_left + r * v[0], base.d_right + r * v[1])
}

fn unit(slope: f64) -> [f64; 2] {
    let n = 1.0f64.hypot(slope);
    [1.0 / n, slope / n]
}

/// Eigen-direction and per-step expansion factor of a branch.
pub fn branch_direction(t: &Table, base: BasePoint, kind: BranchKind, side: Side) -> Result<([f64; 2], f64)> {
    let e = hyperbolic_eigendata(t)?;
    // Theta's eigenvalues are the squares of those in the eigendata; at Q0 the
    // swap exchanges stable and unstable since it conjugates Theta to its inverse.
    let (slope, factor) = match (base, kind) {
        (BasePoint::P0, BranchKind::Stable) => (e.slope_s, 1.0 / (e.lambda_s * e.lambda_s)),
        (BasePoint::P0, BranchKind::Unstable) => (e.slope_u, e.lambda_u * e.lambda_u),
        (BasePoint::Q0, BranchKind::Stable) => (e.slope_u, 1.0 / (e.lambda_s * e.lambda_s)),
        (BasePoint::Q0, BranchKind::Unstable) => (e.slope_s, e.lambda_u * e.lambda_u),
    };
    let mut v = unit(slope);
    if base == BasePoint::Q0 {
        v = [v[1], v[0]];
    }
    // The coordinate that vanishes at the base grows on the plus side.
    let free = if base == BasePoint::P0 { v[0] } else { v[1] };
    let plus = free > 0.0;
    if plus != (side == Side::PlusQuadrant) {
        v = [-v[0], -v[1]];
    }
    Ok((v, factor))
}

pub fn base_point(t: &Table, base: BasePoint) -> LineState {
    match base {
        BasePoint::P0 => p0(t.b()),
        BasePoint::Q0 => q0(t.b()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GrowthParams {
    pub seed_offset: f64,
    pub max_gap: f64,
    pub arc_length_budget: f64,
}

impl Default for GrowthParams {
    fn default() -> Self {
        GrowthParams {
            seed_offset: SEED_OFFSET,
            max_gap: MAX_GAP,
            arc_length_budget: DEFAULT_BUDGET,
        }
    }
}

pub fn grow_branch(
    t: &Table,
    base: BasePoint,
    kind: BranchKind,
    side: Side,
    arc_length_budget: f64,
) -> Result<ManifoldBranch> {
    grow_branch_with(
        t,
        base,
        kind,
        side,
        GrowthParams {
            arc_length_budget,
            ..GrowthParams::default()
        },
    )
}

pub fn grow_branch_with(
    t: &Table,
    base: BasePoint,
    kind: BranchKind,
    side: Side,
    params: GrowthParams,
) -> Result<ManifoldBranch> {
    let b = t.b();
    if !(b > 1.5 && b <= B_MAX) {
        return Err(Error::Domain {
            what: "b",
            value: b,
            range: "(1.5, 1 + 2^-1/2]",
        });
    }
    let (direction, factor) = branch_direction(t, base, kind, side)?;
    let mut branch = ManifoldBranch {
        b,
        base_id: base,
        base: base_point(t, base),
        kind,
        side,
        polyline: CurveTrace::new(format!("{base:?} {kind:?} {side:?}")),
        seed_offset: params.seed_offset,
        growth_steps: 0,
        direction,
        factor,
        left_domain: None,
    };
    let step = branch.step_kind();
    let ok = |x: &LineState| genmap::in_domain(t, x);

    // Level 0: the fundamental segment itself.
    let mut level: Vec<(f64, LineState)> = (0..=LEVEL_SAMPLES)
        .map(|i| {
            let s = i as f64 / LEVEL_SAMPLES as f64;
            (s, seed(branch.base, direction, params.seed_offset, factor, s))
        })
        .collect();
    let mut length = 0.0;
    let mut last: Option<[f64; 2]> = None;
    'grow: for k in 0..MAX_LEVELS {
        if k > 0 {
            let mut next = Vec::with_capacity(level.len());
            for (s, x) in &level {
                match step.apply(t, x) {
                    Ok(y) => next.push((*s, y)),
                    Err(_) => {
                        branch.left_domain = Some(*x);
                        break;
                    }
                }
            }
            level = next;
            refine_level(t, &branch, k, &mut level, params.max_gap);
        }
        let skip = usize::from(k > 0);
        for (s, x) in level.iter().skip(skip) {
            if !ok(x) {
                branch.left_domain = Some(*x);
                break 'grow;
            }
            let p = x.to_array();
            if let Some(q) = last {
                length += dist(p, q);
            }
            branch.polyline.push(p, k as f64 + s);
            last = Some(p);
            if length >= params.arc_length_budget {
                break 'grow;
            }
        }
        if branch.left_domain.is_some() {
            break;
        }
        branch.growth_steps = k + 1;
    }
    Ok(branch)
}

/// Insert exact midpoints wherever neighbouring samples are too far apart.
fn refine_level(t: &Table, branch: &ManifoldBranch, k: usize, level: &mut Vec<(f64, LineState)>, max_gap: f64) {
    let mut i = 0;
    while i + 1 < level.len() {
        let (s0, a) = level[i];
        let (s1, c) = level[i + 1];
        if a.dist(&c) > max_gap && s1 - s0 > 1e-12 {
            let sm = 0.5 * (s0 + s1);
            if let Ok(m) = branch.point_at(t, k as f64 + sm) {
                level.insert(i + 1, (sm, m));
                continue;
            }
        }
        i += 1;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DiagonalCrossing {
    pub point: LineState,
    /// Angle between the branch and the diagonal, in [0, pi/2].
    pub angle: f64,
    pub sigma: f64,
}

/// First crossing of the branch with `d_l = d_r`, refined by bisection on the
/// exact parametrisation.
pub fn diagonal_crossing(t: &Table, branch: &ManifoldBranch) -> Option<DiagonalCrossing> {
    let pts = &branch.polyline.points;
    let g = |p: [f64; 2]| p[0] - p[1];
    let i = (0..pts.len().saturating_sub(1)).find(|&i| {
        let (a, c) = (g(pts[i]), g(pts[i + 1]));
        a != 0.0 && a.signum() != c.signum()
    })?;
    let (s0, s1) = (branch.polyline.params[i], branch.polyline.params[i + 1]);
    let h = |s: f64| branch.point_at(t, s).map(|x| x.d_left - x.d_right).unwrap_or(f64::NAN);
    let sigma = bisect(h, s0, s1, 1e-15)?;
    let point = branch.point_at(t, sigma).ok()?;
    let eps = 1e-6 * (s1 - s0).max(1e-3);
    let a = branch.point_at(t, sigma - eps).ok()?;
    let c = branch.point_at(t, sigma + eps).ok()?;
    let tan = [c.d_left - a.d_left, c.d_right - a.d_right];
    let n = tan[0].hypot(tan[1]);
    let along = ((tan[0] + tan[1]).abs() / (n * std::f64::consts::SQRT_2)).min(1.0);
    Some(DiagonalCrossing {
        point,
        angle: along.acos(),
        sigma,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Splitting {
    /// Signed distance along the diagonal between the crossing of the stable
    /// branch of P0 and that of the unstable branch of Q0; positive when the
    /// former has the larger `d_l`.
    pub delta: f64,
    pub crossing_s: LineState,
    pub crossing_u: LineState,
    pub angle_s: f64,
    pub angle_u: f64,
    /// Deviation of the crossing angle from a right angle. The two branches
    /// are mirror images, so their crossings coincide and `delta` only
    /// measures round-off; the branches are the same curve exactly when they
    /// meet the diagonal at a right angle.
    pub angle_defect: f64,
    /// Largest distance of either crossing from the diagonal; differences in
    /// `delta` below this are not resolved.
    pub resolution: f64,
}

fn off_diagonal(p: &LineState) -> f64 {
    (p.d_left - p.d_right).abs() / std::f64::consts::SQRT_2
}

pub fn splitting(t: &Table) -> Result<Splitting> {
    splitting_with(t, GrowthParams::default())
}

pub fn splitting_with(t: &Table, params: GrowthParams) -> Result<Splitting> {
    let s = grow_branch_with(t, BasePoint::P0, BranchKind::Stable, Side::PlusQuadrant, params)?;
    let u = grow_branch_with(t, BasePoint::Q0, BranchKind::Unstable, Side::PlusQuadrant, params)?;
    let cs = diagonal_crossing(t, &s).ok_or(Error::MissingCrossing)?;
    let cu = diagonal_crossing(t, &u).ok_or(Error::MissingCrossing)?;
    let along = |p: &LineState| (p.d_left + p.d_right) / std::f64::consts::SQRT_2;
    Ok(Splitting {
        delta: along(&cs.point) - along(&cu.point),
        crossing_s: cs.point,
        crossing_u: cu.point,
        angle_s: cs.angle,
        angle_u: cu.angle,
        angle_defect: cs.angle - FRAC_PI_2,
        resolution: off_diagonal(&cs.point).max(off_diagonal(&cu.point)),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AvoidanceReport {
    /// Smallest distance to each piece of the parallel-segment curve.
    pub to_parallel_curve: f64,
    /// Smallest distance to each singular curve, by name.
    pub to_singular: Vec<(String, f64)>,
}

pub fn branch_avoids_curves(t: &Table, branch: &ManifoldBranch) -> Result<AvoidanceReport> {
    let mut poly = branch.polyline.clone();
    if poly.is_empty() {
        poly.push(branch.base.to_array(), 0.0);
    }
    let prl = curve_c(t, CurveKind::Prl, 2000)?;
    let to_parallel_curve = prl
        .iter()
        .map(|c| poly.distance_to_curve(c))
        .fold(f64::INFINITY, f64::min);
    let to_singular = SingularCurveId::ALL
        .iter()
        .map(|&id| {
            let c = genmap::singular_curve(t, id, 2000);
            let d = if c.is_empty() {
                f64::INFINITY
            } else {
                poly.distance_to_curve(&c)
            };
            (id.name().to_string(), d)
        })
        .collect();
    Ok(AvoidanceReport {
        to_parallel_curve,
        to_singular,
    })
}

/// Largest distance from the image of a vertex under Theta to the branch
/// together with its base point. Vertices whose image would leave the grown
/// part are skipped.
pub fn invariance_defect(t: &Table, branch: &ManifoldBranch) -> Result<f64> {
    let mut ext = CurveTrace::new("extended");
    ext.push(branch.base.to_array(), -1.0);
    for (p, s) in branch.polyline.points.iter().zip(&branch.polyline.params) {
        ext.push(*p, *s);
    }
    let top = branch.last_sigma() - 1.0;
    let mut worst = 0.0f64;
    for (p, &s) in branch.polyline.points.iter().zip(&branch.polyline.params) {
        if branch.kind == BranchKind::Unstable && s > top {
            continue;
        }
        let y = genmap::apply(t, GenMapKind::Theta, &LineState::from_array(*p))?;
        worst = worst.max(ext.distance_to(y.to_array()));
    }
    Ok(worst)
}

/// Ratio of the arclengths of consecutive fundamental domains `k + 1` and `k`.
pub fn growth_factor(branch: &ManifoldBranch, k: usize) -> Option<f64> {
    let domain = |k: usize| {
        let c = &branch.polyline;
        let pts: Vec<[f64; 2]> = c
            .points
            .iter()
            .zip(&c.params)
            .filter(|(_, &s)| s >= k as f64 && s <= (k + 1) as f64)
            .map(|(p, _)| *p)
            .collect();
        (pts.len() >= 2).then(|| pts.windows(2).map(|w| dist(w[0], w[1])).sum::<f64>())
    };
    Some(domain(k + 1)? / domain(k)?)
}

/// Image of a branch under the left reflection. Since `L Theta L` is the
/// inverse of Theta, the image of a stable branch of P0 is an unstable branch
/// of `L(P0)` and vice versa.
pub fn left_image(t: &Table, branch: &ManifoldBranch) -> Result<(LineState, CurveTrace)> {
    let base = genmap::apply_l(t, &branch.base)?;
    let mut c = CurveTrace::new(format!("L({})", branch.polyline.label));
    for (p, s) in branch.polyline.points.iter().zip(&branch.polyline.params) {
        c.push(genmap::apply_l(t, &LineState::from_array(*p))?.to_array(), *s);
    }
    Ok((base, c))
}
