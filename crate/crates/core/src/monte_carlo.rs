//! Reproducible Monte Carlo estimates of `P{S ≥ t}` for the quadratic-form
//! statistics, compared against their asymptotic tail laws.
//!
//! Replica `r` draws its innovations from a ChaCha8 stream keyed by
//! `(seed, r)`, so results do not depend on scheduling or worker count.

use std::io::{self, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::ar2::{stability_check, stable_tail_class};
use crate::dist::StudentLaw;
use crate::quadform::{
    autocov_matrix, simulate_path, test_matrix, test_statistic, ArModel, QuadForm,
};
use crate::tail::{ar1_upper_tail, classify, critical_value, test_stat_tail, TailLaw};
use crate::{Error, Result};

/// Replica count used by the reference experiments.
pub const DEFAULT_REPLICAS: usize = 100_000;

/// The a-grid of the reference risk-calibration experiment (`n = 20`).
pub const RISK_A_GRID: [f64; 38] = [
    0.500, 0.552, 0.605, 0.657, 0.710, 0.762, 0.815, 0.868, 0.920, 0.930, 0.939, 0.948, 0.957,
    0.966, 0.975, 0.984, 0.993, 1.000, 1.002, 1.011, 1.019, 1.028, 1.037, 1.046, 1.055, 1.064,
    1.073, 1.082, 1.091, 1.100, 1.150, 1.200, 1.250, 1.300, 1.350, 1.400, 1.450, 1.500,
];

pub const TAIL_CSV_HEADER: &str = "t,log10_t,p_emp,log10_p_emp,p_theory,log10_p_theory,se";
pub const RISK_CSV_HEADER: &str = "a,t_eta,risk_hat,se";

/// Which quadratic form of the trajectory is simulated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Statistic {
    /// `n·γ_n(k)`.
    Autocov { k: usize },
    /// `n(γ_n(1) − a₀·γ̂_n(0))`; AR(1) models only.
    TestStat { a0: f64 },
}

/// Thresholds at which the survival curve is reported.
#[derive(Debug, Clone, PartialEq)]
pub enum TGrid {
    /// `points` log-spaced values from `t_min` to `t_max`.
    LogSpaced {
        t_min: f64,
        t_max: f64,
        points: usize,
    },
    Explicit(Vec<f64>),
}

impl TGrid {
    pub fn log_spaced(t_min: f64, t_max: f64, points: usize) -> Result<Self> {
        if !(t_min > 0.0 && t_min < t_max && t_max.is_finite()) {
            return Err(Error::domain(format!(
                "t grid needs 0 < t_min < t_max < inf, got [{t_min}, {t_max}]"
            )));
        }
        if points < 2 {
            return Err(Error::domain(format!(
                "t grid needs at least 2 points, got {points}"
            )));
        }
        Ok(TGrid::LogSpaced {
            t_min,
            t_max,
            points,
        })
    }

    pub fn values(&self) -> Vec<f64> {
        match self {
            TGrid::Explicit(v) => v.clone(),
            TGrid::LogSpaced {
                t_min,
                t_max,
                points,
            } => {
                let (lo, hi) = (t_min.log10(), t_max.log10());
                (0..*points)
                    .map(|i| 10f64.powf(lo + (hi - lo) * i as f64 / (*points - 1) as f64))
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McConfig {
    pub model: ArModel,
    pub statistic: Statistic,
    pub law: StudentLaw,
    pub replicas: usize,
    pub seed: u64,
    pub t_grid: TGrid,
}

impl McConfig {
    pub fn new(
        model: ArModel,
        statistic: Statistic,
        law: StudentLaw,
        replicas: usize,
        seed: u64,
        t_grid: TGrid,
    ) -> Result<Self> {
        if replicas == 0 {
            return Err(Error::domain("replicas must be at least 1"));
        }
        if let Statistic::TestStat { a0 } = statistic {
            if model.order() != 1 {
                return Err(Error::domain(
                    "the test statistic is defined for AR(1) models only",
                ));
            }
            if !a0.is_finite() {
                return Err(Error::domain(format!("a0 must be finite, got {a0}")));
            }
        }
        if let TGrid::Explicit(ts) = &t_grid {
            if ts.is_empty() || ts.iter().any(|t| !t.is_finite()) {
                return Err(Error::domain("explicit t grid must be nonempty and finite"));
            }
        }
        Ok(McConfig {
            model,
            statistic,
            law,
            replicas,
            seed,
            t_grid,
        })
    }

    /// The matrix `C` with `S = εᵀCε`.
    pub fn matrix(&self) -> Result<QuadForm> {
        match self.statistic {
            Statistic::Autocov { k } => Ok(autocov_matrix(&self.model, k)),
            Statistic::TestStat { a0 } => test_matrix(self.model.theta()[0], a0, self.model.n()),
        }
    }

    /// Asymptotic law matching the statistic: the AR(1) and stable AR(2)
    /// specializations where they apply, general classification otherwise.
    pub fn theory(&self) -> Result<TailLaw> {
        let alpha = self.law.alpha();
        let n = self.model.n();
        let theta = self.model.theta();
        match (self.statistic, theta.len()) {
            (Statistic::TestStat { a0 }, _) => test_stat_tail(theta[0], a0, n, alpha),
            (Statistic::Autocov { k }, 1) => ar1_upper_tail(theta[0], n, k, alpha),
            (Statistic::Autocov { k: 1 }, 2) if n >= 3 && stability_check(theta[0], theta[1]) => {
                stable_tail_class(theta[0], theta[1], n, alpha)
            }
            _ => classify(&self.matrix()?, alpha).map(|(_, tail)| tail),
        }
    }
}

/// Empirical and asymptotic survival curves.
#[derive(Debug, Clone, PartialEq)]
pub struct McEstimate {
    pub t: Vec<f64>,
    pub p_emp: Vec<f64>,
    /// Clamped to `[0, 1]`; NaN where the law gives no value.
    pub p_theory: Vec<f64>,
    pub se: Vec<f64>,
    pub replicas: usize,
    pub seed: u64,
    pub theory: TailLaw,
    /// Set when the regime carries no coefficient.
    pub theory_unavailable: bool,
}

impl McEstimate {
    pub fn write_csv<W: Write + ?Sized>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "{TAIL_CSV_HEADER}")?;
        for i in 0..self.t.len() {
            let (t, pe, pt) = (self.t[i], self.p_emp[i], self.p_theory[i]);
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                real(t),
                real(t.log10()),
                real(pe),
                real(pe.log10()),
                real(pt),
                real(pt.log10()),
                real(self.se[i])
            )?;
        }
        Ok(())
    }
}

/// 17 significant digits; empty for NaN or infinite values.
pub fn real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        String::new()
    }
}

/// Innovation stream of replica `replica`.
pub fn substream(seed: u64, replica: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replica);
    rng
}

fn draw_innovations(law: &StudentLaw, n: usize, seed: u64, replica: usize) -> Vec<f64> {
    let sampler = law.sampler();
    let mut rng = substream(seed, replica as u64);
    (0..n).map(|_| sampler.sample(&mut rng)).collect()
}

/// Innovation vector of one replica, as used by [`simulate_statistics`].
pub fn replica_innovations(cfg: &McConfig, replica: usize) -> Vec<f64> {
    draw_innovations(&cfg.law, cfg.model.n(), cfg.seed, replica)
}

/// `S_r = ε_rᵀCε_r` for every replica, sorted ascending.
pub fn simulate_statistics(cfg: &McConfig) -> Result<Vec<f64>> {
    let c = cfg.matrix()?;
    let mut stats: Vec<f64> = (0..cfg.replicas)
        .into_par_iter()
        .map(|r| c.eval(&replica_innovations(cfg, r)))
        .collect();
    stats.sort_by(f64::total_cmp);
    Ok(stats)
}

/// `#{S ≥ t}/R` from sorted statistics.
pub fn survival(sorted: &[f64], t: f64) -> f64 {
    let below = sorted.partition_point(|&s| s < t);
    (sorted.len() - below) as f64 / sorted.len() as f64
}

pub fn binomial_se(p: f64, replicas: usize) -> f64 {
    (p * (1.0 - p) / replicas as f64).sqrt()
}

/// Runs the experiment described by `cfg`. Deterministic in `cfg`.
pub fn run_tail_experiment(cfg: &McConfig) -> Result<McEstimate> {
    let theory = cfg.theory()?;
    let sorted = simulate_statistics(cfg)?;
    let t = cfg.t_grid.values();
    let p_emp: Vec<f64> = t.iter().map(|&t| survival(&sorted, t)).collect();
    let se = p_emp
        .iter()
        .map(|&p| binomial_se(p, cfg.replicas))
        .collect();
    let p_theory = t
        .iter()
        .map(|&t| theory.evaluate(t).map_or(f64::NAN, |p| p.clamp(0.0, 1.0)))
        .collect();
    Ok(McEstimate {
        t,
        p_emp,
        p_theory,
        se,
        replicas: cfg.replicas,
        seed: cfg.seed,
        theory_unavailable: !theory.regime.has_coef(),
        theory,
    })
}

/// Largest relative gap `|ε_rᵀCε_r − n·statistic(path_r)|/(1 + |ε_rᵀCε_r|)`
/// over every `stride`-th replica.
pub fn coupling_check(cfg: &McConfig, stride: usize) -> Result<f64> {
    let c = cfg.matrix()?;
    let n = cfg.model.n() as f64;
    let mut worst = 0.0f64;
    for r in (0..cfg.replicas).step_by(stride.max(1)) {
        let eps = replica_innovations(cfg, r);
        let x = simulate_path(&cfg.model, &eps)?;
        let from_path = match cfg.statistic {
            Statistic::Autocov { k } => n * crate::quadform::empirical_autocov(&x, k),
            Statistic::TestStat { a0 } => test_statistic(&x, a0),
        };
        let q = c.eval(&eps);
        worst = worst.max((q - from_path).abs() / (1.0 + q.abs()));
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskRow {
    pub a: f64,
    pub t_eta: f64,
    pub risk_hat: f64,
    pub se: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RiskTable {
    pub rows: Vec<RiskRow>,
    /// Grid values with `a ≤ a₀`, for which no critical value exists.
    pub skipped: Vec<f64>,
}

impl RiskTable {
    pub fn write_csv<W: Write + ?Sized>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "{RISK_CSV_HEADER}")?;
        for row in &self.rows {
            writeln!(
                out,
                "{},{},{},{}",
                real(row.a),
                real(row.t_eta),
                real(row.risk_hat),
                real(row.se)
            )?;
        }
        Ok(())
    }
}

/// Actual type-I risk `P̂{n(γ_n(1) − a₀γ̂_n(0)) ≥ t_η}` when the AR(1)
/// coefficient is `a`, for each `a` of the grid. All grid points share the
/// same innovations.
pub fn calibrate_risk(
    a_grid: &[f64],
    a0: f64,
    n: usize,
    alpha: f64,
    eta: f64,
    replicas: usize,
    seed: u64,
) -> Result<RiskTable> {
    let law = StudentLaw::new(alpha)?;
    if replicas == 0 {
        return Err(Error::domain("replicas must be at least 1"));
    }
    let mut kept = Vec::new();
    let mut skipped = Vec::new();
    for &a in a_grid {
        if a > a0 {
            let model = ArModel::ar1(a, n)?;
            kept.push((model, critical_value(a, a0, n, alpha, eta)?));
        } else {
            skipped.push(a);
        }
    }
    let counts = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let eps = draw_innovations(&law, n, seed, r);
            kept.iter()
                .map(|(model, t_eta)| {
                    let x = simulate_path(model, &eps).expect("length matches n");
                    u64::from(test_statistic(&x, a0) >= *t_eta)
                })
                .collect::<Vec<u64>>()
        })
        .reduce(
            || vec![0; kept.len()],
            |mut acc, hits| {
                acc.iter_mut().zip(hits).for_each(|(a, h)| *a += h);
                acc
            },
        );
    let rows = kept
        .iter()
        .zip(counts)
        .map(|((model, t_eta), hits)| {
            let p = hits as f64 / replicas as f64;
            RiskRow {
                a: model.theta()[0],
                t_eta: *t_eta,
                risk_hat: p,
                se: binomial_se(p, replicas),
            }
        })
        .collect();
    Ok(RiskTable { rows, skipped })
}

/// Runs `f` on a dedicated pool of `threads` workers.
pub fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::domain(format!("cannot build thread pool: {e}")))?;
    Ok(pool.install(f))
}
