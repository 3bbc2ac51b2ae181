//! `n·γ_n(k)` as a quadratic form `εᵀCε`: build `C`, simulate a path, and
//! check that both routes give the same number.

use heavytail::monte_carlo::substream;
use heavytail::quadform::{
    ar1_diag_closed, autocov_matrix, build_a, empirical_autocov, simulate_path, test_matrix,
    test_statistic, ArModel,
};
use heavytail::StudentLaw;

fn main() -> heavytail::Result<()> {
    let model = ArModel::ar1(0.5, 3)?;
    println!("A for a = 0.5, n = 3:\n{}", build_a(&model));
    let c = autocov_matrix(&model, 1);
    println!("C = AᵀBA:\n{}", c.matrix());
    println!("closed-form C_11 = {}", ar1_diag_closed(0.5, 3, 1, 0));

    // AR(2) with Student(3) innovations
    let model = ArModel::ar2(0.6, -0.3, 25)?;
    let law = StudentLaw::new(3.0)?;
    let mut rng = substream(11, 0);
    let eps: Vec<f64> = (0..model.n()).map(|_| law.sample(&mut rng)).collect();
    let x = simulate_path(&model, &eps)?;
    for k in 0..4 {
        let q = autocov_matrix(&model, k).eval(&eps);
        let direct = model.n() as f64 * empirical_autocov(&x, k);
        println!("k = {k}: eps'C eps = {q:>14.8}, n*gamma_n(k) = {direct:>14.8}");
    }

    let (a, a0) = (0.8, 0.5);
    let model = ArModel::ar1(a, 25)?;
    let x = simulate_path(&model, &eps)?;
    let c = test_matrix(a, a0, 25)?;
    println!(
        "test statistic: matrix {:.8}, path {:.8}",
        c.eval(&eps),
        test_statistic(&x, a0)
    );
    Ok(())
}
