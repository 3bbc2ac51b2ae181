//! Independent oracles shared by the integration tests. Nothing here calls
//! into the library's numerical routines.
#![allow(
    dead_code,
    clippy::excessive_precision,
    clippy::needless_range_loop,
    clippy::too_many_arguments
)]

use std::f64::consts::PI;

/// High-precision reference values (40-digit arithmetic, rounded to f64).
pub mod frozen {
    pub const K_S_5: f64 = 0.379_606_689_822_494_43;
    pub const K_S_1_5: f64 = 0.340_734_981_288_693_64;
    pub const DENSITY_5_AT_2: f64 = 0.065_090_310_326_216_466;
    pub const CDF_5_AT_3: f64 = 0.984_950_376_051_268_71;
    pub const TAIL_CONSTANT_5: f64 = 9.490_167_245_562_360_8;
    pub const PHI_INV_0975: f64 = 1.959_963_984_540_054_2;
    pub const STUDENT2_UPPER_Q_1E6: f64 = 707.105_720_525_933_80;
    pub const CAUCHY_UPPER_Q_1E4: f64 = 3_183.098_757_118_150_9;
    /// Exact `Φ^←(S_1(10⁶))`.
    pub const PHI_INV_S1_AT_1E6: f64 = 4.979_763_633;
    /// Exact `log S_1^←(Φ(6))` and `log S_5^←(Φ(8))`.
    pub const LOG_S1_INV_PHI_AT_6: f64 = 19.592_039_06;
    pub const LOG_S5_INV_PHI_AT_8: f64 = 7.452_737_959;
}

/// Adaptive Simpson quadrature on `[a, b]`.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// Root of an increasing function on `[lo, hi]` by plain bisection.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Student density with `ν = α`, written out from scratch (Lanczos Γ).
pub fn student_density(alpha: f64, x: f64) -> f64 {
    let k = (ln_gamma((alpha + 1.0) / 2.0) - ln_gamma(alpha / 2.0)).exp() / (PI * alpha).sqrt();
    k * (1.0 + x * x / alpha).powf(-(alpha + 1.0) / 2.0)
}

/// Lanczos approximation (g = 7, n = 9), accurate to ~1e-15 for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = C[0];
    let t = x + G + 0.5;
    for (i, c) in C.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Cauchy distribution function.
pub fn cauchy_cdf(x: f64) -> f64 {
    0.5 + x.atan() / PI
}

/// `Φ(x)` by Simpson quadrature of the Gaussian density from 0.
pub fn normal_cdf_quad(x: f64) -> f64 {
    let phi = |t: f64| (-0.5 * t * t).exp() / (2.0 * PI).sqrt();
    0.5 + simpson(&phi, 0.0, x, 1e-14)
}

/// Naive dense product `Aᵀ·Bᵏ·A`, with `A`'s columns obtained by running the
/// AR recursion on unit impulses.
pub fn naive_autocov_matrix(theta: &[f64], n: usize, k: usize) -> Vec<Vec<f64>> {
    let a = impulse_matrix(theta, n);
    let mut c = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            // (AᵀBᵏA)_{ij} = Σ_r A_{r,i}·A_{r−k,j}
            let mut s = 0.0;
            for r in k..n {
                s += a[r][i] * a[r - k][j];
            }
            c[i][j] = s;
        }
    }
    c
}

/// `A` with `A[r][j]` the response at time `r` to a unit innovation at `j`.
pub fn impulse_matrix(theta: &[f64], n: usize) -> Vec<Vec<f64>> {
    let mut a = vec![vec![0.0; n]; n];
    for j in 0..n {
        let mut x = vec![0.0; n];
        for r in 0..n {
            let mut v = if r == j { 1.0 } else { 0.0 };
            for (lag, t) in theta.iter().enumerate() {
                if r > lag {
                    v += t * x[r - lag - 1];
                }
            }
            x[r] = v;
        }
        for r in 0..n {
            a[r][j] = x[r];
        }
    }
    a
}

/// `Σ_{m=0}^{terms−1} x^m` by the ratio formula (direct count at `x = 1`).
pub fn geometric(x: f64, terms: usize) -> f64 {
    if x == 1.0 {
        terms as f64
    } else {
        (1.0 - x.powi(terms as i32)) / (1.0 - x)
    }
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(f64::MIN_POSITIVE)
}
