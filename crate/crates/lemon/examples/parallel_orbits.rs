//! Orbits with two parallel segments: the table they live in, the level
//! curves of that table distance and the focusing after three reflections.

use lemon_billiards::parallel::{
    build_parallel_orbit, focusing_after_three, sample_focal_curve, solve_alpha0, table_distance, AngleParams,
    LevelCurve,
};

fn main() -> lemon_billiards::Result<()> {
    let p = AngleParams::new(0.3, 0.5)?;
    let o = build_parallel_orbit(p)?;
    println!("alpha = 0.3, beta = 0.5 lives in the table b = {:.12}", o.b);

    let a0 = solve_alpha0();
    println!("symmetric critical angle {a0:.12}, table {:.12}", table_distance(AngleParams { alpha: a0, beta: a0 }));

    let lc = LevelCurve::trace(1.6)?;
    println!("level curve b = 1.6: length {:.6}", lc.upper_length());
    if let Some(j) = lc.j_crossing() {
        println!("    meets the critical curve at ({:.9}, {:.9})", j.alpha, j.beta);
    }

    for q in sample_focal_curve(4) {
        let f = focusing_after_three(q)?;
        println!("focal point ({:.6}, {:.6}): outgoing curvature {:.1e}", q.alpha, q.beta, f.curvature());
    }
    Ok(())
}
