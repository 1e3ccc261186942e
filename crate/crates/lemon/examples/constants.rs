//! Critical table parameters with the residuals of their defining equations.

use lemon_billiards::constants::{all_constants, fgf_residual_min, THRESHOLD_FGF};

fn main() {
    for c in all_constants() {
        println!("{:<7} {:.16} (residual {:+.1e})", c.name, c.value, c.residual);
    }
    let m = fgf_residual_min(50, 200);
    println!("smallest commutation residual on the upper singular curve: {m:.6} (bound {THRESHOLD_FGF})");
}
