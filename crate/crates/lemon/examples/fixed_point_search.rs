//! Newton from a lattice of seeds for every fixed point of the six-step map,
//! before and after the elliptic orbit bifurcates.

use lemon_billiards::genmap::{self, GenMapKind};
use lemon_billiards::geometry::Table;
use lemon_billiards::parallel::bifurcated_pair;
use lemon_billiards::periodic::{classify, exhaustive_theta_fixed_points, Rect};

fn main() -> lemon_billiards::Result<()> {
    for b in [1.52, 1.66] {
        let t = Table::new(b)?;
        println!("b = {b}");
        for p in exhaustive_theta_fixed_points(&t, Rect::square(0.0, 0.9), 200) {
            let ht = genmap::jacobian(&t, GenMapKind::Theta, &p)?.half_trace();
            println!(
                "    ({:.10}, {:.10}) {:?}, in domain {}",
                p.d_left,
                p.d_right,
                classify(ht),
                genmap::in_domain(&t, &p)
            );
        }
        if let Some((e1, e2)) = bifurcated_pair(b)? {
            println!("    bifurcated pair: {:.10} and {:.10} on the diagonal", e1.d_left, e2.d_left);
        }
    }
    Ok(())
}
