//! Seeded phase portrait on the right arc, written as CSV.
//!
//! cargo run --release --example phase_portrait -- 1.54 out.csv

use lemon_billiards::geometry::Table;
use lemon_billiards::output::phase_table;
use lemon_billiards::phase::phase_portrait;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let b: f64 = args.next().map_or(Ok(1.54), |s| s.parse())?;
    let out = args.next().unwrap_or_else(|| "phase.csv".into());
    let t = Table::new(b)?;
    let trajs = phase_portrait(&t, 0, 200, 2000);
    let stopped = trajs.iter().filter(|tr| tr.stopped.is_some()).count();
    std::fs::write(&out, phase_table(&trajs).to_csv())?;
    println!("{} trajectories ({stopped} stopped early) -> {out}", trajs.len());
    Ok(())
}
