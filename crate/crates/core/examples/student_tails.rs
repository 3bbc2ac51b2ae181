//! Student law basics: normalizing constant, tail constant, and how fast the
//! first-order quantile formula becomes accurate.
//!
//! ```text
//! cargo run --example student_tails
//! ```

use heavytail::dist::{make_law, normal_quantile_upper, phi_inv_compose_s, s_inv_compose_phi_log};

fn main() -> heavytail::Result<()> {
    for alpha in [1.0, 2.0, 5.0] {
        let law = make_law(alpha)?;
        println!(
            "alpha = {alpha}: K = {:.10}, tail constant = {:.10}",
            law.k_s(),
            law.tail_constant()
        );
        for x in [1e2f64, 1e4, 1e6] {
            let scaled = x.powf(alpha) * law.sf(x);
            println!("  x^alpha * P(X > x) at x = {x:e}: {scaled:.10}");
        }
    }

    let cauchy = make_law(1.0)?;
    println!("\nupper quantiles of the Cauchy law");
    println!("{:>8} {:>16} {:>16}", "u", "exact", "asymptotic");
    for u in [0.25, 1e-2, 1e-4, 1e-6] {
        println!(
            "{u:>8e} {:>16.6} {:>16.6}",
            cauchy.upper_quantile(u)?,
            cauchy.quantile_tail(u)?
        );
    }

    println!("\nGaussian scale of a Student tail: Phi^-1(S(x)) against its expansion");
    for x in [1e3, 1e5, 1e7] {
        let e = phi_inv_compose_s(&cauchy, x);
        println!(
            "  x = {x:e}: exact {:.6}, expansion {:.6}",
            e.exact,
            e.expansion.unwrap_or(f64::NAN)
        );
    }

    let law = make_law(5.0)?;
    let e = s_inv_compose_phi_log(&law, 8.0)?;
    println!(
        "\nlog S_5^-1(Phi(8)) = {:.6}, expansion {:.6}",
        e.exact,
        e.expansion.unwrap_or(f64::NAN)
    );
    println!("Phi^-1(1 - 1e-9) = {:.6}", normal_quantile_upper(1e-9)?);
    Ok(())
}
