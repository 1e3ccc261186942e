//! Iterate the billiard map and inspect the period-2 orbit along the axis.

use lemon_billiards::billiard::{orbit, rotation_angle_o2};
use lemon_billiards::geometry::{AngularState, Arc, Table};
use lemon_billiards::periodic::orbit_o2;

fn main() -> lemon_billiards::Result<()> {
    let t = Table::new(1.55)?;
    let o2 = orbit_o2(&t);
    println!("O2 at b = {}: half trace {:.6} ({:?})", t.b(), o2.multiplier_half_trace, o2.classification);
    println!("rotation angle of its tangent map: {:.6} rad", rotation_angle_o2(&t)?);

    let start = AngularState::new(Arc::Right, 0.1, 1.3);
    let (states, stop) = orbit(&t, &start, 8);
    for (n, x) in states.iter().enumerate() {
        println!("{n:2} {:?} phi = {:+.6} theta = {:.6}", x.arc, x.phi, x.theta);
    }
    if let Some(e) = stop {
        println!("stopped: {e}");
    }
    Ok(())
}
