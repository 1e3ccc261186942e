//! The invariant curves of the two three-step maps, written as CSV.
//!
//! cargo run --release --example invariant_curves -- 1.6 curves.csv

use lemon_billiards::genmap::{self, GenMapKind};
use lemon_billiards::geometry::{LineState, Table};
use lemon_billiards::output;
use lemon_billiards::parallel::{curve_c, endpoint_slopes, CurveKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let b: f64 = args.next().map_or(Ok(1.6), |s| s.parse())?;
    let out = args.next().unwrap_or_else(|| "curves.csv".into());
    let t = Table::new(b)?;
    let mut table = output::Table::new(&["curve", "d_left", "d_right"]);
    for (kind, map) in [(CurveKind::Phi, GenMapKind::Phi), (CurveKind::Psi, GenMapKind::Psi)] {
        let c = &curve_c(&t, kind, 500)?[0];
        let mut worst = 0.0f64;
        for p in &c.points {
            table.push(vec![kind.name().into(), p[0].into(), p[1].into()]);
            let q = genmap::apply(&t, map, &LineState::from_array(*p))?;
            worst = worst.max(c.distance_to(q.to_array()));
        }
        println!("{}: {} points, invariance defect {worst:.1e}", kind.name(), c.len());
    }
    let s = endpoint_slopes(&t)?;
    println!("slopes at P0: {:.9} and {:.9}", s.m_up, s.m_down);
    std::fs::write(&out, table.to_csv())?;
    println!("-> {out}");
    Ok(())
}
