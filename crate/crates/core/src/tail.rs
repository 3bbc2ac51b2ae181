//! Tail regime classification for quadratic forms `εᵀCε` in i.i.d.
//! Student-like innovations, with the general coefficients and their AR(1)
//! specializations.
//!
//! Two regimes carry a closed-form coefficient:
//! - [`Regime::PowerHalf`]: `P{εᵀCε ≥ t} ~ coef·t^{−α/2}`, whenever some
//!   diagonal entry of `C` is positive;
//! - [`Regime::PowerLog`]: `P{εᵀCε ≥ t} ~ coef·t^{−α}·log t`, when the largest
//!   diagonal entry is zero and a zero-diagonal row couples to the rest.

use std::f64::consts::E;
use std::fmt;

use crate::dist::StudentLaw;
use crate::quadform::{ar1_offdiag_closed, QuadForm};
use crate::{power_sum, Error, Result};

/// Relative tolerance under which a diagonal entry counts as zero.
pub const ZERO_DIAG_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `coef·t^{−α/2}`.
    PowerHalf,
    /// `coef·t^{−α}·log t`.
    PowerLog,
    /// Of order `t^{−α}`; the constant is not computed.
    OrderOnly,
    /// `o(t^{−α})`.
    SubPower,
    /// The statistic is never positive.
    Zero,
}

impl Regime {
    pub fn has_coef(self) -> bool {
        matches!(self, Regime::PowerHalf | Regime::PowerLog | Regime::Zero)
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Regime::PowerHalf => "PowerHalf",
            Regime::PowerLog => "PowerLog",
            Regime::OrderOnly => "OrderOnly",
            Regime::SubPower => "SubPower",
            Regime::Zero => "Zero",
        };
        f.write_str(name)
    }
}

/// Why a regime without coefficient was chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum Diagnostic {
    /// Largest diagonal is zero but every zero-diagonal row is decoupled.
    NoCoupling,
    /// All diagonals negative; `⟨Cu,u⟩ > 0` is feasible on the plane `(i, j)`.
    PairFeasible { i: usize, j: usize },
    /// All diagonals negative and no coordinate plane admits `⟨Cu,u⟩ > 0`.
    NoFeasiblePair,
    /// Test statistic with `a < a₀`: the coefficient is out of reach.
    BelowNull,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::NoCoupling => {
                f.write_str("max diagonal is 0 and zero-diagonal rows are decoupled")
            }
            Diagnostic::PairFeasible { i, j } => {
                write!(
                    f,
                    "diagonal negative; <Cu,u> > 0 feasible on plane ({i},{j})"
                )
            }
            Diagnostic::NoFeasiblePair => {
                f.write_str("diagonal negative; no coordinate plane admits <Cu,u> > 0")
            }
            Diagnostic::BelowNull => {
                f.write_str("a < a0: tail is of order t^-alpha, constant unknown")
            }
        }
    }
}

/// Classified asymptotic tail of a statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct TailLaw {
    pub regime: Regime,
    /// Present for `PowerHalf`, `PowerLog` (positive) and `Zero` (0).
    pub coef: Option<f64>,
    pub alpha: f64,
    pub diagnostic: Option<Diagnostic>,
}

impl TailLaw {
    fn with_coef(regime: Regime, coef: f64, alpha: f64) -> Self {
        TailLaw {
            regime,
            coef: Some(coef),
            alpha,
            diagnostic: None,
        }
    }

    fn zero(alpha: f64) -> Self {
        Self::with_coef(Regime::Zero, 0.0, alpha)
    }

    fn without_coef(regime: Regime, alpha: f64, diagnostic: Diagnostic) -> Self {
        TailLaw {
            regime,
            coef: None,
            alpha,
            diagnostic: Some(diagnostic),
        }
    }

    /// Raw asymptotic value at `t`; see [`evaluate`].
    pub fn evaluate(&self, t: f64) -> Result<f64> {
        evaluate(self, t)
    }
}

/// Smallest size of a coordinate subset on which `⟨Cu,u⟩ > 0` is feasible.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NOfC {
    One,
    Two,
    MoreThanTwo,
}

impl fmt::Display for NOfC {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NOfC::One => "1",
            NOfC::Two => "2",
            NOfC::MoreThanTwo => "gt2",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegeneracyClass {
    pub n_of_c: NOfC,
    /// `J_1` (one set) when `n_of_c` is `One`; the feasible pairs when `Two`.
    pub j_sets: Vec<Vec<usize>>,
}

fn law(alpha: f64) -> Result<StudentLaw> {
    StudentLaw::new(alpha)
}

/// `K²α^α`, the constant in front of the degenerate-case sums.
fn log_constant(law: &StudentLaw) -> f64 {
    let a = law.alpha();
    law.k_s() * law.k_s() * a.powf(a)
}

fn zero_tol(c: &QuadForm) -> f64 {
    let max_abs = c.matrix().diag().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    ZERO_DIAG_RTOL * max_abs.max(1.0)
}

fn max_diag(c: &QuadForm) -> f64 {
    c.matrix()
        .diag()
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
}

fn coupling_sum(c: &QuadForm, alpha: f64, tol: f64) -> f64 {
    let m = c.matrix();
    let n = c.dim();
    (0..n)
        .filter(|&i| m[[i, i]].abs() <= tol)
        .map(|i| {
            (0..n)
                .map(|j| (m[[i, j]] + m[[j, i]]).abs().powf(alpha))
                .sum::<f64>()
        })
        .sum()
}

/// `⟨Cu,u⟩ > 0` feasible on the coordinate plane `(i, j)`.
fn pair_feasible(c: &QuadForm, i: usize, j: usize, scale: f64) -> bool {
    let m = c.matrix();
    let (cii, cjj) = (m[[i, i]], m[[j, j]]);
    if cii > 0.0 || cjj > 0.0 {
        return true;
    }
    let s = m[[i, j]] + m[[j, i]];
    let disc = s * s - 4.0 * cii * cjj;
    disc > (ZERO_DIAG_RTOL * scale).powi(2)
}

fn feasible_pairs(c: &QuadForm) -> Vec<Vec<usize>> {
    let n = c.dim();
    let scale = c.matrix().iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if pair_feasible(c, i, j, scale) {
                pairs.push(vec![i, j]);
            }
        }
    }
    pairs
}

/// Classifies the tail of `εᵀCε` and computes its coefficient when one exists.
pub fn classify(c: &QuadForm, alpha: f64) -> Result<(DegeneracyClass, TailLaw)> {
    let law = law(alpha)?;
    let n = c.dim();
    if n == 0 {
        let class = DegeneracyClass {
            n_of_c: NOfC::MoreThanTwo,
            j_sets: Vec::new(),
        };
        return Ok((class, TailLaw::zero(alpha)));
    }
    let tol = zero_tol(c);
    let top = max_diag(c);

    if top > tol {
        let j1: Vec<usize> = (0..n).filter(|&j| c.entry(j, j) > tol).collect();
        let coef = coef_positive_case(c, alpha)?;
        let class = DegeneracyClass {
            n_of_c: NOfC::One,
            j_sets: vec![j1],
        };
        return Ok((class, TailLaw::with_coef(Regime::PowerHalf, coef, alpha)));
    }

    let pairs = feasible_pairs(c);
    let class = if pairs.is_empty() {
        DegeneracyClass {
            n_of_c: NOfC::MoreThanTwo,
            j_sets: Vec::new(),
        }
    } else {
        DegeneracyClass {
            n_of_c: NOfC::Two,
            j_sets: pairs,
        }
    };

    if top.abs() <= tol {
        let sum = coupling_sum(c, alpha, tol);
        let tail = if sum > 0.0 {
            TailLaw::with_coef(Regime::PowerLog, log_constant(&law) * sum, alpha)
        } else if c.symmetrized().matrix().iter().all(|v| v.abs() <= tol) {
            TailLaw::zero(alpha)
        } else {
            TailLaw::without_coef(Regime::SubPower, alpha, Diagnostic::NoCoupling)
        };
        return Ok((class, tail));
    }

    let tail = match class.n_of_c {
        NOfC::Two => {
            let (i, j) = (class.j_sets[0][0], class.j_sets[0][1]);
            TailLaw::without_coef(Regime::OrderOnly, alpha, Diagnostic::PairFeasible { i, j })
        }
        _ => TailLaw::without_coef(Regime::SubPower, alpha, Diagnostic::NoFeasiblePair),
    };
    Ok((class, tail))
}

/// `K·α^{(α−1)/2}·2·Σ_{j∈J_1} C_jj^{α/2}`, the `t^{−α/2}` coefficient.
pub fn coef_positive_case(c: &QuadForm, alpha: f64) -> Result<f64> {
    let law = law(alpha)?;
    let tol = zero_tol(c);
    let positive: Vec<f64> = c
        .matrix()
        .diag()
        .iter()
        .copied()
        .filter(|&v| v > tol)
        .collect();
    if positive.is_empty() {
        return Err(Error::precondition(
            "no strictly positive diagonal entry (J_1 is empty)",
        ));
    }
    let sum: f64 = positive.iter().map(|v| v.powf(alpha / 2.0)).sum();
    Ok(law.tail_constant() * 2.0 * sum)
}

/// `K²·α^α·Σ_{i: C_ii=0} Σ_j |C_ij + C_ji|^α`, the `t^{−α}·log t` coefficient.
pub fn coef_degenerate_case(c: &QuadForm, alpha: f64) -> Result<f64> {
    let law = law(alpha)?;
    let tol = zero_tol(c);
    if c.dim() > 0 && max_diag(c) > tol {
        return Err(Error::precondition(
            "largest diagonal entry is positive, not zero",
        ));
    }
    Ok(log_constant(&law) * coupling_sum(c, alpha, tol))
}

/// Upper tail of `n·γ_n(k)` for an AR(1) model with coefficient `a`.
pub fn ar1_upper_tail(a: f64, n: usize, k: usize, alpha: f64) -> Result<TailLaw> {
    let law = law(alpha)?;
    if !a.is_finite() {
        return Err(Error::domain(format!("a must be finite, got {a}")));
    }
    if n == 0 {
        return Err(Error::domain("sample length n must be at least 1"));
    }
    if k >= n {
        return Ok(TailLaw::zero(alpha));
    }
    let half = alpha / 2.0;
    if a == 0.0 && k == 0 {
        let coef = law.tail_constant() * 2.0 * n as f64;
        return Ok(TailLaw::with_coef(Regime::PowerHalf, coef, alpha));
    }
    if a == 0.0 {
        let coef = log_constant(&law) * 2.0 * (n - k) as f64;
        return Ok(TailLaw::with_coef(Regime::PowerLog, coef, alpha));
    }
    if k.is_multiple_of(2) || a > 0.0 {
        // C_ii = a^k·Σ_{j=0}^{n−i−k} a^{2j} for 1-based i ≤ n−k
        let sum: f64 = (1..=n - k)
            .map(|i| power_sum(a * a, n - i - k + 1).powf(half))
            .sum();
        let coef = law.tail_constant() * 2.0 * a.abs().powf(k as f64 * half) * sum;
        return Ok(TailLaw::with_coef(Regime::PowerHalf, coef, alpha));
    }
    // k odd, a < 0: rows n−k+1..n (1-based) have zero diagonal
    let mut sum = 0.0;
    for i in n - k..n {
        for j in 0..n {
            let s = ar1_offdiag_closed(a, n, k, i, j) + ar1_offdiag_closed(a, n, k, j, i);
            sum += s.abs().powf(alpha);
        }
    }
    Ok(TailLaw::with_coef(
        Regime::PowerLog,
        log_constant(&law) * sum,
        alpha,
    ))
}

/// `K·α^{(α−1)/2}·2·|a|^{α/2}·Σ_{i=1}^{n−1}(Σ_{m=0}^{n−i−1} a^{2m})^{α/2}`.
fn ar1_lag1_sum(a: f64, n: usize, alpha: f64) -> f64 {
    (1..n)
        .map(|i| power_sum(a * a, n - i).powf(alpha / 2.0))
        .sum()
}

/// Lower tail `P{n·γ_n(1) ≤ −t}` for an AR(1) model with `a < 0`.
pub fn ar1_lower_tail(a: f64, n: usize, alpha: f64) -> Result<TailLaw> {
    let law = law(alpha)?;
    if a.is_nan() || a >= 0.0 {
        return Err(Error::precondition(format!(
            "lower-tail formula needs a < 0, got a = {a}"
        )));
    }
    if n < 2 {
        return Ok(TailLaw::zero(alpha));
    }
    let coef = law.tail_constant() * 2.0 * a.abs().powf(alpha / 2.0) * ar1_lag1_sum(a, n, alpha);
    Ok(TailLaw::with_coef(Regime::PowerHalf, coef, alpha))
}

/// `c(a)` of the test statistic for `a > a₀`.
fn test_coef(law: &StudentLaw, a: f64, a0: f64, n: usize) -> f64 {
    let alpha = law.alpha();
    law.tail_constant() * 2.0 * (a - a0).powf(alpha / 2.0) * ar1_lag1_sum(a, n, alpha)
}

/// Upper tail of `n(γ_n(1) − a₀·γ̂_n(0))` for an AR(1) model with coefficient `a`.
///
/// `a > a₀` gives `PowerHalf`; `a = a₀ ≥ 0` gives `PowerLog` with
/// `2K²α^α·Σ_{k=1}^{n−1}(n−k)a^{(k−1)α}` (`0⁰ = 1`); `a < a₀` with `a₀ > 0`
/// is `OrderOnly`. The remaining corner (`a ≤ a₀ ≤ 0`, not both zero) is
/// classified from the matrix.
pub fn test_stat_tail(a: f64, a0: f64, n: usize, alpha: f64) -> Result<TailLaw> {
    let law = law(alpha)?;
    if !a.is_finite() || !a0.is_finite() {
        return Err(Error::domain("a and a0 must be finite"));
    }
    if n < 2 {
        return Ok(TailLaw::zero(alpha));
    }
    if a > a0 {
        return Ok(TailLaw::with_coef(
            Regime::PowerHalf,
            test_coef(&law, a, a0, n),
            alpha,
        ));
    }
    if a == a0 && a >= 0.0 {
        let sum: f64 = (1..n)
            .map(|k| {
                let weight = if k == 1 {
                    1.0
                } else {
                    a.powf((k - 1) as f64 * alpha)
                };
                (n - k) as f64 * weight
            })
            .sum();
        let coef = log_constant(&law) * 2.0 * sum;
        return Ok(TailLaw::with_coef(Regime::PowerLog, coef, alpha));
    }
    if a0 > 0.0 {
        return Ok(TailLaw::without_coef(
            Regime::OrderOnly,
            alpha,
            Diagnostic::BelowNull,
        ));
    }
    let c = crate::quadform::test_matrix(a, a0, n)?;
    classify(&c, alpha).map(|(_, tail)| tail)
}

/// Approximate critical value `t_η = (c(a)/η)^{2/α}` of the one-sided test.
pub fn critical_value(a: f64, a0: f64, n: usize, alpha: f64, eta: f64) -> Result<f64> {
    let law = law(alpha)?;
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::domain(format!("eta must lie in (0, 1), got {eta}")));
    }
    if a0.is_nan() || a0 < 0.0 {
        return Err(Error::precondition(format!(
            "critical value needs a0 >= 0, got {a0}"
        )));
    }
    if a.is_nan() || a <= a0 {
        return Err(Error::precondition(format!(
            "critical value needs a > a0, got a = {a}, a0 = {a0}"
        )));
    }
    if n < 2 {
        return Err(Error::domain("sample length n must be at least 2"));
    }
    Ok((test_coef(&law, a, a0, n) / eta).powf(2.0 / alpha))
}

/// Raw asymptotic approximation at `t`, not clamped to `[0, 1]`.
pub fn evaluate(law: &TailLaw, t: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain(format!(
            "t must be positive and finite, got {t}"
        )));
    }
    match (law.regime, law.coef) {
        (Regime::PowerHalf, Some(c)) => Ok(c * t.powf(-law.alpha / 2.0)),
        (Regime::PowerLog, Some(c)) => {
            if t <= E {
                return Err(Error::domain(format!(
                    "PowerLog approximation needs t > e, got {t}"
                )));
            }
            Ok(c * t.powf(-law.alpha) * t.ln())
        }
        (Regime::Zero, _) => Ok(0.0),
        (regime, _) => Err(Error::UnsupportedRegime(regime)),
    }
}
