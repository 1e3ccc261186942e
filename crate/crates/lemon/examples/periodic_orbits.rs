//! The elliptic and hyperbolic period-6 orbits and the parameter where the
//! elliptic one loses stability.

use lemon_billiards::geometry::Table;
use lemon_billiards::periodic::{elliptic_half_trace, find_b_crit, orbit_elliptic6, orbit_hyperbolic6};

fn main() -> lemon_billiards::Result<()> {
    for b in [1.52, 1.58, 1.64] {
        let t = Table::new(b)?;
        let e = orbit_elliptic6(&t)?;
        let h = orbit_hyperbolic6(&t)?;
        println!(
            "b = {b}: elliptic half trace {:+.6} ({:?}), hyperbolic {:+.6}, closing errors {:.1e} {:.1e}",
            e.multiplier_half_trace,
            e.classification,
            h.multiplier_half_trace,
            e.line_closing_error(&t)?,
            h.line_closing_error(&t)?,
        );
        for p in &h.points_line {
            println!("    ({:+.9}, {:+.9})", p.d_left, p.d_right);
        }
    }
    let bc = find_b_crit();
    println!("half trace reaches -1 at b = {bc:.13} (check: {:+.1e})", elliptic_half_trace(bc) + 1.0);
    Ok(())
}
