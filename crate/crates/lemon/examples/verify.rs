//! Run the acceptance checks, optionally filtered by group, name or id.
//!
//! cargo run --release --example verify -- genmap

use lemon_billiards::verify::{report_line, run_checks};

fn main() {
    let filter = std::env::args().nth(1);
    let results = run_checks(filter.as_deref());
    for r in &results {
        println!("{}", report_line(r));
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    std::process::exit(if failed == 0 { 0 } else { 3 });
}
