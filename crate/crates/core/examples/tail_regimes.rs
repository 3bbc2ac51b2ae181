//! Tail regimes of `n·γ_n(k)` for AR(1) models and of the one-sided test
//! statistic, with the matching approximate critical values.

use heavytail::quadform::{autocov_matrix, ArModel};
use heavytail::tail::{ar1_lower_tail, ar1_upper_tail, classify, critical_value, test_stat_tail};

fn main() -> heavytail::Result<()> {
    let (n, alpha) = (10, 1.0);
    println!("upper tail of n*gamma_n(k), n = {n}, alpha = {alpha}");
    for k in 0..3 {
        for a in [-0.5, 0.0, 0.5, 1.0] {
            let tail = ar1_upper_tail(a, n, k, alpha)?;
            let (class, general) = classify(&autocov_matrix(&ArModel::ar1(a, n)?, k), alpha)?;
            println!(
                "  k={k} a={a:>4}: {:<9} coef {:>12.6}  (from C: {} N(C)={})",
                tail.regime.to_string(),
                tail.coef.unwrap_or(f64::NAN),
                general.regime,
                class.n_of_c
            );
        }
    }

    let lower = ar1_lower_tail(-0.5, n, alpha)?;
    println!(
        "\nP(n*gamma_n(1) <= -t) for a = -0.5: {} coef {:.6}",
        lower.regime,
        lower.coef.unwrap()
    );

    println!("\ntest statistic n(gamma_n(1) - a0*gamma_hat_n(0)), a0 = 0.5, n = 20");
    for a in [0.3, 0.5, 0.9] {
        let tail = test_stat_tail(a, 0.5, 20, alpha)?;
        match tail.coef {
            Some(c) => println!("  a = {a}: {} coef {c:.6}", tail.regime),
            None => println!("  a = {a}: {} ({})", tail.regime, tail.diagnostic.unwrap()),
        }
    }
    for eta in [0.1, 0.05, 0.01] {
        println!(
            "  t_eta at a = 1, eta = {eta}: {:.1}",
            critical_value(1.0, 0.5, 20, alpha, eta)?
        );
    }
    Ok(())
}
