//! Actual type-I risk of the one-sided test `H₀: a ≤ a₀` when the critical
//! value comes from the first-order tail approximation.
//!
//! ```text
//! cargo run --release --example risk_calibration -- 1.0 20000
//! ```
//! Arguments: tail index and replica count.

use heavytail::monte_carlo::{calibrate_risk, RISK_A_GRID};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let alpha: f64 = args.next().map_or(Ok(1.0), |s| s.parse())?;
    let replicas: usize = args.next().map_or(Ok(20_000), |s| s.parse())?;
    let (a0, n) = (0.5, 20);

    for eta in [0.05, 0.10] {
        let table = calibrate_risk(&RISK_A_GRID, a0, n, alpha, eta, replicas, 7)?;
        println!("alpha = {alpha}, eta = {eta}, n = {n}, a0 = {a0}, {replicas} replicas");
        for row in table.rows.iter().step_by(4) {
            let bar = "#".repeat((row.risk_hat / eta * 20.0).round() as usize);
            println!(
                "  a = {:.3}  risk {:.4} ± {:.4}  {bar}",
                row.a, row.risk_hat, row.se
            );
        }
        if !table.skipped.is_empty() {
            println!("  skipped a <= a0: {:?}", table.skipped);
        }
    }
    Ok(())
}
