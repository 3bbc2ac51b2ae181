//! Empirical tail of `n·γ_n(1)` under Cauchy innovations against the
//! asymptotic law, on a log-log grid.
//!
//! ```text
//! cargo run --release --example tail_curve -- 1.0 100000
//! ```
//! Arguments: AR coefficient `a` (default 1) and replica count.

use heavytail::monte_carlo::{run_tail_experiment, McConfig, Statistic, TGrid};
use heavytail::{ArModel, StudentLaw};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let a: f64 = args.next().map_or(Ok(1.0), |s| s.parse())?;
    let replicas: usize = args.next().map_or(Ok(100_000), |s| s.parse())?;

    let cfg = McConfig::new(
        ArModel::ar1(a, 10)?,
        Statistic::Autocov { k: 1 },
        StudentLaw::new(1.0)?,
        replicas,
        42,
        TGrid::log_spaced(10.0, 1e6, 16)?,
    )?;
    let est = run_tail_experiment(&cfg)?;
    println!(
        "a = {a}, n = 10, k = 1, Cauchy, {replicas} replicas: {} coef {:.6}",
        est.theory.regime,
        est.theory.coef.unwrap_or(f64::NAN)
    );
    println!(
        "{:>12} {:>12} {:>12} {:>10}",
        "t", "empirical", "theory", "log10 ratio"
    );
    for i in 0..est.t.len() {
        let (pe, pt) = (est.p_emp[i], est.p_theory[i]);
        println!(
            "{:>12.1} {:>12.3e} {:>12.3e} {:>10.3}",
            est.t[i],
            pe,
            pt,
            (pe / pt).log10()
        );
    }
    Ok(())
}
