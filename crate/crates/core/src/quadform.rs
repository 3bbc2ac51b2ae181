//! AR(p) trajectory matrices and the quadratic forms behind the empirical
//! autocovariances.
//!
//! With `X = Aε` the trajectory and `B` the backward shift on `ℝⁿ`,
//! `n·γ_n(k) = ⟨X, BᵏX⟩ = εᵀ(AᵀBᵏA)ε`. Indices in this module are 0-based.

use ndarray::{s, Array1, Array2};

use crate::{power_sum, Error, Result};

/// AR(p) specification `X_r = Σ_{i ≤ min(p, r−1)} θ_i X_{r−i} + ε_r`,
/// observed over `n` time steps.
#[derive(Debug, Clone, PartialEq)]
pub struct ArModel {
    theta: Vec<f64>,
    n: usize,
}

impl ArModel {
    pub fn new(theta: Vec<f64>, n: usize) -> Result<Self> {
        if theta.is_empty() {
            return Err(Error::domain("AR order p must be at least 1"));
        }
        if n == 0 {
            return Err(Error::domain("sample length n must be at least 1"));
        }
        if let Some(bad) = theta.iter().find(|t| !t.is_finite()) {
            return Err(Error::domain(format!(
                "AR coefficient is not finite: {bad}"
            )));
        }
        Ok(ArModel { theta, n })
    }

    pub fn ar1(a: f64, n: usize) -> Result<Self> {
        Self::new(vec![a], n)
    }

    pub fn ar2(a: f64, b: f64, n: usize) -> Result<Self> {
        Self::new(vec![a, b], n)
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn order(&self) -> usize {
        self.theta.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Fails when the last coefficient vanishes, i.e. the order is not exactly `p`.
    pub fn require_exact_order(&self) -> Result<()> {
        if self.theta[self.theta.len() - 1] == 0.0 {
            Err(Error::precondition(format!(
                "model is not of exact order {}: last coefficient is 0",
                self.order()
            )))
        } else {
            Ok(())
        }
    }
}

/// Dense `n×n` matrix `C` of the quadratic form `ε ↦ εᵀCε`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadForm {
    matrix: Array2<f64>,
}

impl QuadForm {
    pub fn new(matrix: Array2<f64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::domain(format!(
                "quadratic form needs a square matrix, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("quadratic form has non-finite entries"));
        }
        Ok(QuadForm { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Array2<f64> {
        self.matrix
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.matrix[[i, j]]
    }

    pub fn diagonal(&self) -> Array1<f64> {
        self.matrix.diag().to_owned()
    }

    /// `(C + Cᵀ)/2`, which defines the same quadratic form.
    pub fn symmetrized(&self) -> QuadForm {
        let sym = (&self.matrix + &self.matrix.t()) * 0.5;
        QuadForm { matrix: sym }
    }

    pub fn scaled(&self, factor: f64) -> QuadForm {
        QuadForm {
            matrix: &self.matrix * factor,
        }
    }

    /// `εᵀCε`.
    ///
    /// # Panics
    /// If `eps.len()` differs from the dimension.
    pub fn eval(&self, eps: &[f64]) -> f64 {
        assert_eq!(eps.len(), self.dim(), "vector length must match the form");
        self.matrix
            .outer_iter()
            .zip(eps)
            .map(|(row, &ei)| ei * row.iter().zip(eps).map(|(c, e)| c * e).sum::<f64>())
            .sum()
    }
}

/// Lower-triangular, unit-diagonal `A` with `X = Aε`.
///
/// Row `r` is `e_r + Σ_{i=1..min(p, r)} θ_i·row_{r−i}`.
pub fn build_a(model: &ArModel) -> Array2<f64> {
    let n = model.n();
    let mut a = Array2::<f64>::zeros((n, n));
    for r in 0..n {
        a[[r, r]] = 1.0;
        for (lag, &theta) in model.theta().iter().enumerate().map(|(i, t)| (i + 1, t)) {
            if lag > r || theta == 0.0 {
                continue;
            }
            for c in 0..r - lag + 1 {
                let v = a[[r - lag, c]];
                a[[r, c]] += theta * v;
            }
        }
    }
    a
}

/// `Bᵏ` on `ℝⁿ`: ones at `(i, i−k)`; the zero matrix once `k ≥ n`.
pub fn shift_pow(n: usize, k: usize) -> Array2<f64> {
    let mut b = Array2::<f64>::zeros((n, n));
    for i in k..n {
        b[[i, i - k]] = 1.0;
    }
    b
}

/// `Bᵏ·M`: rows of `M` pushed down by `k`.
fn shift_rows(m: &Array2<f64>, k: usize) -> Array2<f64> {
    let n = m.nrows();
    let mut out = Array2::<f64>::zeros(m.raw_dim());
    if k < n {
        out.slice_mut(s![k.., ..]).assign(&m.slice(s![..n - k, ..]));
    }
    out
}

/// `C = AᵀBᵏA`, so that `εᵀCε = n·γ_n(k)`.
pub fn autocov_matrix(model: &ArModel, k: usize) -> QuadForm {
    let a = build_a(model);
    let shifted = shift_rows(&a, k);
    QuadForm {
        matrix: a.t().dot(&shifted),
    }
}

/// Closed form of `C_{i,i}` for AR(1): `a^k·Σ_{j=0}^{n−i−k−1} a^{2j}` (0-based `i`).
pub fn ar1_diag_closed(a: f64, n: usize, k: usize, i: usize) -> f64 {
    ar1_offdiag_closed(a, n, k, i, i)
}

/// Closed form of `C_{i,j}` for AR(1) (0-based indices):
/// `a^{|i−j−k|}·Σ_{m=0}^{n−max(i, j+k)−1} a^{2m}`.
pub fn ar1_offdiag_closed(a: f64, n: usize, k: usize, i: usize, j: usize) -> f64 {
    let top = i.max(j + k);
    if top >= n {
        return 0.0;
    }
    let exponent = (i as i64 - j as i64 - k as i64).unsigned_abs() as i32;
    a.powi(exponent) * power_sum(a * a, n - top)
}

/// Matrix of the one-sided test statistic `n(γ_n(1) − a₀·γ̂_n(0))` for an
/// AR(1) model with coefficient `a`: `C = AᵀBA − a₀·AᵀBᵀBA`.
pub fn test_matrix(a: f64, a0: f64, n: usize) -> Result<QuadForm> {
    if !a0.is_finite() {
        return Err(Error::domain(format!("a0 must be finite, got {a0}")));
    }
    let model = ArModel::ar1(a, n)?;
    let amat = build_a(&model);
    let ba = shift_rows(&amat, 1);
    let matrix = amat.t().dot(&ba) - ba.t().dot(&ba) * a0;
    Ok(QuadForm { matrix })
}

/// Runs the AR recursion on `eps`; equals `A·eps`.
pub fn simulate_path(model: &ArModel, eps: &[f64]) -> Result<Vec<f64>> {
    if eps.len() != model.n() {
        return Err(Error::domain(format!(
            "innovation vector has length {}, model expects n = {}",
            eps.len(),
            model.n()
        )));
    }
    let mut x = Vec::with_capacity(eps.len());
    for (r, &e) in eps.iter().enumerate() {
        let feedback: f64 = model
            .theta()
            .iter()
            .enumerate()
            .filter(|(i, _)| *i < r)
            .map(|(i, theta)| theta * x[r - i - 1])
            .sum();
        x.push(feedback + e);
    }
    Ok(x)
}

/// `γ_n(k) = n^{−1}·Σ_{r=k+1}^{n} X_r X_{r−k}`; zero when `k ≥ n`.
pub fn empirical_autocov(x: &[f64], k: usize) -> f64 {
    let n = x.len();
    if k >= n {
        return 0.0;
    }
    let sum: f64 = x[k..].iter().zip(x).map(|(a, b)| a * b).sum();
    sum / n as f64
}

/// `γ̂_n(0) = n^{−1}·Σ_{i ≤ n−1} X_i²`, which omits the last observation.
pub fn hat_gamma0(x: &[f64]) -> f64 {
    let n = x.len();
    if n == 0 {
        return 0.0;
    }
    x[..n - 1].iter().map(|v| v * v).sum::<f64>() / n as f64
}

/// `n(γ_n(1) − a₀·γ̂_n(0))` computed from a trajectory.
pub fn test_statistic(x: &[f64], a0: f64) -> f64 {
    let n = x.len() as f64;
    n * (empirical_autocov(x, 1) - a0 * hat_gamma0(x))
}
