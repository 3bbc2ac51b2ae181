//! Map of the AR(2) plane: where the lag-1 autocovariance has a `t^{−α/2}`
//! tail and where it drops to `t^{−α}·log t`.
//!
//! Prints a coarse character map (`+` covered by some `R_k`, `.` not covered,
//! uppercase inside the stability triangle) and writes the full CSV to
//! `ar2_regions.csv` when given a path argument.

use std::fs::File;
use std::io::BufWriter;

use heavytail::ar2::{diag_seq, region_scan, stable_tail_class, write_regions_csv, DEFAULT_KMAX};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let steps = 41;
    let reports = region_scan((-3.0, 3.0), (-3.0, 1.5), steps, DEFAULT_KMAX)?;
    println!("a from -3 (left) to 3, b from 1.5 (top) to -3");
    for row in (0..steps).rev() {
        let line: String = (0..steps)
            .map(|col| {
                let r = &reports[col * steps + row];
                match (r.first_covering_k.is_some(), r.stable) {
                    (true, true) => 'P',
                    (true, false) => '+',
                    (false, true) => 'L',
                    (false, false) => '.',
                }
            })
            .collect();
        println!("{line}");
    }

    println!("\nd_k for (a, b) = (-1, -3): {:?}", diag_seq(-1.0, -3.0, 6));
    for (a, b) in [(0.5, 0.2), (-0.5, 0.2)] {
        let t = stable_tail_class(a, b, 10, 1.0)?;
        println!(
            "stable ({a}, {b}): {} coef {:.6}",
            t.regime,
            t.coef.unwrap()
        );
    }

    if let Some(path) = std::env::args().nth(1) {
        write_regions_csv(&mut BufWriter::new(File::create(&path)?), &reports)?;
        println!("wrote {path}");
    }
    Ok(())
}
