//! Grow the stable branch of P0 and the unstable branch of Q0 and measure
//! where they cross the diagonal.

use lemon_billiards::geometry::Table;
use lemon_billiards::manifolds::{self, BasePoint, BranchKind, Side, DEFAULT_BUDGET};

fn main() -> lemon_billiards::Result<()> {
    let b: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1.51);
    let t = Table::new(b)?;
    for (base, kind) in [(BasePoint::P0, BranchKind::Stable), (BasePoint::Q0, BranchKind::Unstable)] {
        let br = manifolds::grow_branch(&t, base, kind, Side::PlusQuadrant, DEFAULT_BUDGET)?;
        let c = manifolds::diagonal_crossing(&t, &br).ok_or(lemon_billiards::Error::MissingCrossing)?;
        println!(
            "{base:?} {kind:?}: {} vertices over {} steps, factor {:.6}, crosses at {:.12} with angle {:.9}",
            br.polyline.len(),
            br.growth_steps,
            br.factor,
            c.point.d_left,
            c.angle
        );
    }
    let s = manifolds::splitting(&t)?;
    println!(
        "delta = {:.3e} (resolution {:.1e}), angle - pi/2 = {:.3e}",
        s.delta, s.resolution, s.angle_defect
    );
    Ok(())
}
