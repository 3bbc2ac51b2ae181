//! The AR(2) parameter plane `X_r = a·X_{r−1} + b·X_{r−2} + ε_r`.
//!
//! For lag 1 the diagonal entries of `C = AᵀBA` near the end of the sample do
//! not depend on `n`: `C_{n−k,n−k} = d_k = Σ_{j=1}^{k} A_{j+1,1}A_{j,1}`. The
//! region `R_k` is where `d_{k−1} > 0`; on `∪R_k` the tail of `n·γ_n(1)` is
//! `t^{−α/2}`, elsewhere it is `t^{−α}·log t`.

use std::io::{self, Write};

use rayon::prelude::*;

use crate::quadform::{autocov_matrix, ArModel};
use crate::tail::{classify, coef_degenerate_case, coef_positive_case, Regime, TailLaw};
use crate::{Error, Result, StudentLaw};

/// Default cap on `k` when searching for a covering region.
pub const DEFAULT_KMAX: usize = 200;

const RESCALE_ABOVE: f64 = 1e150;
const MEMBERSHIP_RTOL: f64 = 1e-12;
const STABILITY_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ar2Point {
    pub a: f64,
    pub b: f64,
}

impl Ar2Point {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::domain(format!(
                "AR(2) point must be finite, got ({a}, {b})"
            )));
        }
        Ok(Ar2Point { a, b })
    }

    /// `a = −2r·cos φ`, `b = −r²`.
    pub fn from_polar(r: f64, phi: f64) -> Self {
        Ar2Point {
            a: -2.0 * r * phi.cos(),
            b: -r * r,
        }
    }

    pub fn model(&self, n: usize) -> Result<ArModel> {
        ArModel::ar2(self.a, self.b, n)
    }
}

/// `A_{1,1}, …, A_{jmax,1}`: `1, a, a·A_{j−1}+b·A_{j−2}, …`.
pub fn a_col(a: f64, b: f64, jmax: usize) -> Vec<f64> {
    let mut col = Vec::with_capacity(jmax);
    for j in 0..jmax {
        let v = match j {
            0 => 1.0,
            1 => a,
            _ => a * col[j - 1] + b * col[j - 2],
        };
        col.push(v);
    }
    col
}

/// `A_{j,1}` from the characteristic roots `u, v` of `x² − ax − b`:
/// `(u^j − v^j)/(u − v)`, or `j(a/2)^{j−1}` for a double root.
pub fn a_col_closed(a: f64, b: f64, j: usize) -> f64 {
    let disc = a * a + 4.0 * b;
    let jm1 = j as i32 - 1;
    if disc == 0.0 {
        j as f64 * (a / 2.0).powi(jm1)
    } else if disc > 0.0 {
        let s = disc.sqrt();
        let (u, v) = ((a + s) / 2.0, (a - s) / 2.0);
        (u.powi(j as i32) - v.powi(j as i32)) / (u - v)
    } else {
        // u = ρe^{iθ}: (u^j − ū^j)/(u − ū) = ρ^{j−1}·sin(jθ)/sin θ
        let rho = (-b).sqrt();
        let theta = (a / (2.0 * rho)).clamp(-1.0, 1.0).acos();
        rho.powi(jm1) * (j as f64 * theta).sin() / theta.sin()
    }
}

/// `d_1, …, d_kmax` with `d_k = Σ_{j=1}^{k} A_{j+1,1}A_{j,1}`.
pub fn diag_seq(a: f64, b: f64, kmax: usize) -> Vec<f64> {
    let col = a_col(a, b, kmax + 1);
    col.windows(2)
        .scan(0.0, |acc, w| {
            *acc += w[0] * w[1];
            Some(*acc)
        })
        .collect()
}

/// Smallest `k ∈ [2, kmax]` with `d_{k−1} > 0`, i.e. the first `R_k`
/// containing `(a, b)`.
///
/// Positivity is strict, up to a relative tolerance on `Σ|A_{j+1,1}A_{j,1}|`.
/// The column recursion is rescaled whenever it exceeds `1e150`, so explosive
/// points do not overflow.
pub fn region_membership(a: f64, b: f64, kmax: usize) -> Result<Option<usize>> {
    Ar2Point::new(a, b)?;
    if kmax < 2 {
        return Err(Error::domain(format!(
            "kmax must be at least 2, got {kmax}"
        )));
    }
    // A values are stored divided by a common scale S; d and its absolute
    // companion are stored divided by S².
    let (mut prev, mut cur) = (1.0f64, a);
    let (mut d, mut abs_d) = (0.0f64, 0.0f64);
    for k in 2..=kmax {
        let term = cur * prev;
        d += term;
        abs_d += term.abs();
        if d > MEMBERSHIP_RTOL * abs_d {
            return Ok(Some(k));
        }
        let next = a * cur + b * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE_ABOVE || prev.abs() > RESCALE_ABOVE {
            let f = 1.0 / RESCALE_ABOVE;
            prev *= f;
            cur *= f;
            d *= f * f;
            abs_d *= f * f;
        }
    }
    Ok(None)
}

/// Closed form of `d_{k−1} = C_{n−k+1,n−k+1}` in polar coordinates
/// `a = −2r·cos φ`, `b = −r²`.
pub fn closed_form_diag(r: f64, phi: f64, k: usize) -> Result<f64> {
    if r.is_nan() || r < 0.0 || r.is_infinite() {
        return Err(Error::domain(format!(
            "r must be finite and nonnegative, got {r}"
        )));
    }
    if r == 1.0 {
        return Err(Error::domain("closed form is singular at r = 1"));
    }
    let (s, c) = phi.sin_cos();
    if s == 0.0 || !phi.is_finite() {
        return Err(Error::domain(format!(
            "closed form is singular at sin(phi) = 0, phi = {phi}"
        )));
    }
    let kf = k as f64;
    let r2 = r * r;
    let one_m = 1.0 - r2;
    let num = r
        * (-2.0 * (1.0 - r2.powi(k as i32)) * c * s * s
            + r2.powi(k as i32 - 1)
                * one_m
                * (kf * phi).sin()
                * (((kf + 1.0) * phi).sin() - r2 * ((kf - 1.0) * phi).sin()));
    let den = one_m * (one_m * one_m + 4.0 * r2 * s * s) * s * s;
    Ok(num / den)
}

/// Closed sufficient conditions for the closure of `∪R_k`:
/// `a > 0`, or `a ≤ 0` with `b < −a² − 1`, or `a ≤ 0` with `b < min(−a²/4, −a − 1)`.
pub fn theorem_region_test(a: f64, b: f64) -> bool {
    a > 0.0 || b < -a * a - 1.0 || b < (-a * a / 4.0).min(-a - 1.0)
}

/// Both roots of `x² − ax − b` strictly inside the unit disk.
pub fn stability_check(a: f64, b: f64) -> bool {
    if !a.is_finite() || !b.is_finite() {
        return false;
    }
    let (m1, m2) = root_moduli(a, b);
    m1.max(m2) < 1.0 - STABILITY_MARGIN
}

/// Tail of `n·γ_n(1)` on the stability region: `PowerHalf` for `a > 0`,
/// `PowerLog` for `a < 0`, general classification at `a = 0`.
pub fn stable_tail_class(a: f64, b: f64, n: usize, alpha: f64) -> Result<TailLaw> {
    Ar2Point::new(a, b)?;
    if !stability_check(a, b) {
        return Err(Error::precondition(format!(
            "({a}, {b}) is outside the AR(2) stability region"
        )));
    }
    if n < 3 {
        return Err(Error::domain(format!("n must be at least 3, got {n}")));
    }
    let c = autocov_matrix(&ArModel::ar2(a, b, n)?, 1);
    if a > 0.0 {
        let coef = coef_positive_case(&c, alpha)?;
        Ok(TailLaw {
            regime: Regime::PowerHalf,
            coef: Some(coef),
            alpha,
            diagnostic: None,
        })
    } else if a < 0.0 {
        let coef = coef_degenerate_case(&c, alpha)?;
        Ok(TailLaw {
            regime: Regime::PowerLog,
            coef: Some(coef),
            alpha,
            diagnostic: None,
        })
    } else {
        classify(&c, alpha).map(|(_, tail)| tail)
    }
}

/// `K²α^α·Σ_{j=1}^{n−1}|A_{n−j,1}|^α`, the `PowerLog` coefficient when only
/// the last diagonal entry vanishes (`a < 0`, `b > −a²/4`).
pub fn ar2_log_coef_closed(a: f64, b: f64, n: usize, alpha: f64) -> Result<f64> {
    let law = StudentLaw::new(alpha)?;
    if n < 2 {
        return Err(Error::domain(format!("n must be at least 2, got {n}")));
    }
    let col = a_col(a, b, n - 1);
    let sum: f64 = col.iter().map(|v| v.abs().powf(alpha)).sum();
    Ok(law.k_s() * law.k_s() * alpha.powf(alpha) * sum)
}

/// One grid point of a region scan.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionReport {
    pub point: Ar2Point,
    pub stable: bool,
    pub first_covering_k: Option<usize>,
    pub in_theorem_region: bool,
    /// `PowerHalf` when some `R_k` covers the point, `PowerLog` otherwise.
    pub regime: Regime,
}

pub fn region_report(a: f64, b: f64, kmax: usize) -> Result<RegionReport> {
    let first_covering_k = region_membership(a, b, kmax)?;
    Ok(RegionReport {
        point: Ar2Point { a, b },
        stable: stability_check(a, b),
        first_covering_k,
        in_theorem_region: theorem_region_test(a, b),
        regime: if first_covering_k.is_some() {
            Regime::PowerHalf
        } else {
            Regime::PowerLog
        },
    })
}

/// Grid of `steps × steps` points on `[a_min, a_max] × [b_min, b_max]`, `a`
/// varying slowest. Evaluated in parallel; the order is deterministic.
pub fn region_scan(
    (a_min, a_max): (f64, f64),
    (b_min, b_max): (f64, f64),
    steps: usize,
    kmax: usize,
) -> Result<Vec<RegionReport>> {
    if steps < 2 {
        return Err(Error::domain(format!(
            "steps must be at least 2, got {steps}"
        )));
    }
    for (lo, hi, name) in [(a_min, a_max, "a"), (b_min, b_max, "b")] {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::domain(format!(
                "{name} range needs finite min < max, got [{lo}, {hi}]"
            )));
        }
    }
    let at = |lo: f64, hi: f64, i: usize| lo + (hi - lo) * i as f64 / (steps - 1) as f64;
    (0..steps * steps)
        .into_par_iter()
        .map(|idx| {
            region_report(
                at(a_min, a_max, idx / steps),
                at(b_min, b_max, idx % steps),
                kmax,
            )
        })
        .collect()
}

pub const REGIONS_CSV_HEADER: &str = "a,b,stable,first_covering_k,in_theorem_region,regime";

/// Writes the scan as CSV; an uncovered point has an empty `first_covering_k`.
pub fn write_regions_csv<W: Write + ?Sized>(
    out: &mut W,
    reports: &[RegionReport],
) -> io::Result<()> {
    writeln!(out, "{REGIONS_CSV_HEADER}")?;
    for r in reports {
        let k = r
            .first_covering_k
            .map(|k| k.to_string())
            .unwrap_or_default();
        writeln!(
            out,
            "{:.16e},{:.16e},{},{},{},{}",
            r.point.a, r.point.b, r.stable, k, r.in_theorem_region, r.regime
        )?;
    }
    Ok(())
}

/// Moduli of the two roots of `x² − ax − b`.
fn root_moduli(a: f64, b: f64) -> (f64, f64) {
    let disc = a * a + 4.0 * b;
    if disc < 0.0 {
        let m = (-b).sqrt();
        return (m, m);
    }
    let s = disc.sqrt();
    // larger root without cancellation, the other from the product uv = −b
    let big = if a >= 0.0 {
        (a + s) / 2.0
    } else {
        (a - s) / 2.0
    };
    let small = if big == 0.0 { 0.0 } else { -b / big };
    (big.abs(), small.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn column_examples() {
        assert_eq!(a_col(1.0, 0.0, 6), vec![1.0; 6]);
        assert_eq!(a_col(0.0, -1.0, 6), vec![1.0, 0.0, -1.0, 0.0, 1.0, 0.0]);
        assert_eq!(a_col(1.0, -0.25, 4)[3], 0.5);
        assert_eq!(a_col_closed(1.0, -0.25, 4), 0.5);
    }

    #[test]
    fn closed_column_matches_recursion() {
        for &(a, b) in &[
            (0.5, 0.3),
            (-0.7, 0.2),
            (1.2, -0.9),
            (-0.4, -0.5),
            (2.0, -1.0),
        ] {
            let col = a_col(a, b, 20);
            for (j, v) in col.iter().enumerate() {
                let closed = a_col_closed(a, b, j + 1);
                assert!(
                    (closed - v).abs() <= 1e-10 * (1.0 + v.abs()),
                    "({a},{b}) j={}",
                    j + 1
                );
            }
        }
    }

    #[test]
    fn first_diagonals() {
        let (a, b) = (0.7, -0.3);
        let d = diag_seq(a, b, 3);
        assert!((d[0] - a).abs() < 1e-15);
        assert!((d[1] - a * (a * a + b + 1.0)).abs() < 1e-14);
        let d3 = a * (2.0 * b * b + b * (3.0 * a * a + 1.0) + a.powi(4) + a * a + 1.0);
        assert!((d[2] - d3).abs() < 1e-14);
    }

    #[test]
    fn membership_examples() {
        assert_eq!(region_membership(0.5, 123.0, 10).unwrap(), Some(2));
        assert!(region_membership(-1.0, -3.0, 200).unwrap().is_some());
        assert_eq!(region_membership(-0.5, 0.0, 500).unwrap(), None);
        assert!(region_membership(0.5, 0.0, 1).is_err());
    }

    #[test]
    fn membership_survives_explosive_points() {
        // |A_{j,1}| grows like 5^j, far past f64 range
        let k = region_membership(-1.0, -30.0, 2000).unwrap();
        assert!(k.is_some());
        let plain = diag_seq(-1.0, -30.0, k.unwrap());
        assert!(plain[k.unwrap() - 2] > 0.0);
    }

    #[test]
    fn closed_form_domain() {
        assert!(closed_form_diag(1.0, 0.5, 3).is_err());
        assert!(closed_form_diag(0.5, 0.0, 3).is_err());
        assert!(closed_form_diag(-0.5, 0.5, 3).is_err());
        let v = closed_form_diag(0.9, PI / 4.0, 5).unwrap();
        let p = Ar2Point::from_polar(0.9, PI / 4.0);
        let d = diag_seq(p.a, p.b, 4)[3];
        assert!((v - d).abs() <= 1e-9 * d.abs().max(1e-12));
    }

    #[test]
    fn theorem_region_examples() {
        assert!(theorem_region_test(1.0, 5.0));
        assert!(theorem_region_test(-1.0, -2.5));
        assert!(!theorem_region_test(-0.5, 0.5));
    }

    #[test]
    fn stability_examples() {
        assert!(stability_check(0.5, 0.3));
        assert!(!stability_check(1.0, 0.1));
        assert!(stability_check(0.0, -0.999));
        assert!(!stability_check(0.0, -1.0));
        assert!(!stability_check(-2.1, 0.0));
    }

    #[test]
    fn stable_tail_examples() {
        let t = stable_tail_class(0.5, 0.2, 10, 1.0).unwrap();
        assert_eq!(t.regime, Regime::PowerHalf);
        let t = stable_tail_class(-0.5, 0.2, 10, 1.0).unwrap();
        assert_eq!(t.regime, Regime::PowerLog);
        let closed = ar2_log_coef_closed(-0.5, 0.2, 10, 1.0).unwrap();
        assert!((t.coef.unwrap() - closed).abs() <= 1e-9 * closed);
        assert!(matches!(
            stable_tail_class(1.0, 0.1, 10, 1.0),
            Err(Error::Precondition(_))
        ));
        assert!(stable_tail_class(0.5, 0.2, 2, 1.0).is_err());
    }

    #[test]
    fn scan_order_and_csv() {
        let reports = region_scan((-1.0, 1.0), (-0.5, 0.5), 3, 50).unwrap();
        assert_eq!(reports.len(), 9);
        assert_eq!(reports[1].point, Ar2Point { a: -1.0, b: 0.0 });
        assert_eq!(reports[8].regime, Regime::PowerHalf);
        let mut buf = Vec::new();
        write_regions_csv(&mut buf, &reports).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 10);
        assert!(text.starts_with(REGIONS_CSV_HEADER));
        assert!(region_scan((1.0, -1.0), (0.0, 1.0), 3, 10).is_err());
    }
}
