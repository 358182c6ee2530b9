//! Seeded simulation of the drawing process and goodness-of-fit reports.
//!
//! Trials are grouped into fixed blocks of `block_size`; block `b` draws from
//! [`CounterRng::for_block`]`(seed, b)`. The block layout is part of
//! [`SimConfig`], so the merged counts are identical whether blocks run
//! sequentially or on any number of workers.

use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::distribution::{DistTable, FloatDistTable};
use crate::error::{Error, Result};
use crate::numeric::to_f64;
use crate::rng::CounterRng;

pub const DEFAULT_BLOCK_SIZE: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SimConfig {
    pub m: u64,
    /// Draws per trial.
    pub n: u64,
    pub trials: u64,
    pub seed: u64,
    /// Trials per independently seeded block.
    pub block_size: u64,
}

impl SimConfig {
    pub fn new(m: u64, n: u64, trials: u64, seed: u64) -> Self {
        SimConfig {
            m,
            n,
            trials,
            seed,
            block_size: DEFAULT_BLOCK_SIZE,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::Domain("m must be >= 1".into()));
        }
        if self.trials == 0 {
            return Err(Error::Domain("trials must be >= 1".into()));
        }
        if self.block_size == 0 {
            return Err(Error::Domain("block_size must be >= 1".into()));
        }
        Ok(())
    }

    fn blocks(&self) -> u64 {
        self.trials.div_ceil(self.block_size)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalPmf {
    pub config: SimConfig,
    /// `counts[k]` trials ended with exactly `k` distinct coupons.
    pub counts: Vec<u64>,
    pub freqs: Vec<f64>,
}

impl EmpiricalPmf {
    fn from_counts(config: SimConfig, counts: Vec<u64>) -> Self {
        let t = config.trials as f64;
        let freqs = counts.iter().map(|&c| c as f64 / t).collect();
        EmpiricalPmf {
            config,
            counts,
            freqs,
        }
    }
}

fn run_block(config: &SimConfig, block: u64) -> Vec<u64> {
    let m = config.m as usize;
    let mut counts = vec![0u64; m + 1];
    let mut seen = vec![0u64; m.div_ceil(64)];
    let mut rng = CounterRng::for_block(config.seed, block);
    let first = block * config.block_size;
    let last = (first + config.block_size).min(config.trials);
    for _ in first..last {
        seen.iter_mut().for_each(|w| *w = 0);
        let mut distinct = 0usize;
        for _ in 0..config.n {
            let c = rng.below(config.m) as usize;
            let (word, bit) = (c / 64, 1u64 << (c % 64));
            if seen[word] & bit == 0 {
                seen[word] |= bit;
                distinct += 1;
            }
        }
        counts[distinct] += 1;
    }
    counts
}

fn merge(mut a: Vec<u64>, b: Vec<u64>) -> Vec<u64> {
    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
    a
}

/// Sequential simulation.
pub fn simulate(config: &SimConfig) -> Result<EmpiricalPmf> {
    config.validate()?;
    let counts = (0..config.blocks())
        .map(|b| run_block(config, b))
        .fold(vec![0u64; config.m as usize + 1], merge);
    Ok(EmpiricalPmf::from_counts(*config, counts))
}

/// Simulation with blocks spread over `workers` threads; same result as
/// [`simulate`].
pub fn simulate_parallel(config: &SimConfig, workers: usize) -> Result<EmpiricalPmf> {
    config.validate()?;
    if workers <= 1 {
        return simulate(config);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Domain(format!("cannot start worker pool: {e}")))?;
    let blocks = config.blocks();
    let counts = pool.install(|| {
        (0..blocks)
            .into_par_iter()
            .map(|b| run_block(config, b))
            .reduce(|| vec![0u64; config.m as usize + 1], merge)
    });
    Ok(EmpiricalPmf::from_counts(*config, counts))
}

/// Reference law of `X_n` for one `(m, n)`, in `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferencePmf {
    pub m: u64,
    pub n: u64,
    pub probs: Vec<f64>,
}

impl ReferencePmf {
    pub fn from_exact(table: &DistTable, n: u64) -> Self {
        ReferencePmf {
            m: table.m(),
            n,
            probs: table.row(n).iter().map(to_f64).collect(),
        }
    }

    pub fn from_float(table: &FloatDistTable, n: u64) -> Self {
        ReferencePmf {
            m: table.m(),
            n,
            probs: table.row(n).to_vec(),
        }
    }

    pub fn from_empirical(emp: &EmpiricalPmf) -> Self {
        ReferencePmf {
            m: emp.config.m,
            n: emp.config.n,
            probs: emp.freqs.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub max_abs_deviation: f64,
    pub total_variation: f64,
    /// Pearson statistic over pooled bins.
    pub chi_square: f64,
    pub bins: usize,
    pub degrees_of_freedom: usize,
    /// Upper 0.1% point of chi-square with `degrees_of_freedom`; zero when
    /// there is a single bin.
    pub chi_square_critical_999: f64,
}

impl FitReport {
    pub fn chi_square_ok(&self) -> bool {
        self.chi_square <= self.chi_square_critical_999
    }

    pub fn passes(&self, max_abs_tol: f64) -> bool {
        self.max_abs_deviation < max_abs_tol && self.chi_square_ok()
    }
}

/// Empirical-vs-reference comparison.
///
/// Bins with expected count below 5 are pooled into their neighbour toward
/// `k = m`; a short remainder at the top is folded into the last full bin.
pub fn compare(emp: &EmpiricalPmf, reference: &ReferencePmf) -> Result<FitReport> {
    let (m, n) = (emp.config.m, emp.config.n);
    if reference.m != m || reference.n != n || reference.probs.len() != emp.counts.len() {
        return Err(Error::Mismatch {
            expected_m: reference.m,
            expected_n: reference.n,
            m,
            n,
        });
    }
    let trials = emp.config.trials as f64;
    let mut max_abs = 0.0f64;
    let mut tv = 0.0;
    for (f, p) in emp.freqs.iter().zip(&reference.probs) {
        let d = (f - p).abs();
        max_abs = max_abs.max(d);
        tv += d;
    }
    tv *= 0.5;

    let mut pooled: Vec<(f64, f64)> = Vec::new();
    let (mut obs, mut exp) = (0.0, 0.0);
    for (&c, &p) in emp.counts.iter().zip(&reference.probs) {
        obs += c as f64;
        exp += p * trials;
        if exp >= 5.0 {
            pooled.push((obs, exp));
            obs = 0.0;
            exp = 0.0;
        }
    }
    if obs > 0.0 || exp > 0.0 {
        match pooled.last_mut() {
            Some(last) => {
                last.0 += obs;
                last.1 += exp;
            }
            None => pooled.push((obs, exp)),
        }
    }
    let chi_square = pooled
        .iter()
        .map(|&(o, e)| {
            if e > 0.0 {
                (o - e) * (o - e) / e
            } else if o > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        })
        .sum();
    let bins = pooled.len();
    let dof = bins.saturating_sub(1);
    Ok(FitReport {
        max_abs_deviation: max_abs,
        total_variation: tv,
        chi_square,
        bins,
        degrees_of_freedom: dof,
        chi_square_critical_999: chi_square_quantile(0.999, dof),
    })
}

/// Quantile of the chi-square law; zero for zero degrees of freedom.
pub fn chi_square_quantile(p: f64, dof: usize) -> f64 {
    if dof == 0 {
        return 0.0;
    }
    ChiSquared::new(dof as f64)
        .expect("positive degrees of freedom")
        .inverse_cdf(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::dp_pmf;

    #[test]
    fn single_type_always_one() {
        let e = simulate(&SimConfig::new(1, 5, 1000, 11)).unwrap();
        assert_eq!(e.counts, vec![0, 1000]);
    }

    #[test]
    fn zero_draws_stay_at_zero() {
        let e = simulate(&SimConfig::new(3, 0, 100, 11)).unwrap();
        assert_eq!(e.counts, vec![100, 0, 0, 0]);
    }

    #[test]
    fn two_types_two_draws() {
        let e = simulate(&SimConfig::new(2, 2, 100_000, 2024)).unwrap();
        assert!((e.freqs[1] - 0.5).abs() < 0.01, "{}", e.freqs[1]);
    }

    #[test]
    fn parallel_matches_sequential() {
        let mut cfg = SimConfig::new(7, 9, 20_000, 99);
        cfg.block_size = 333;
        let a = simulate(&cfg).unwrap();
        for w in [2, 3, 8] {
            assert_eq!(simulate_parallel(&cfg, w).unwrap(), a);
        }
    }

    #[test]
    fn invalid_config_rejected() {
        assert!(simulate(&SimConfig::new(0, 1, 1, 0)).is_err());
        assert!(simulate(&SimConfig::new(1, 1, 0, 0)).is_err());
        let mut cfg = SimConfig::new(1, 1, 1, 0);
        cfg.block_size = 0;
        assert!(simulate(&cfg).is_err());
    }

    #[test]
    fn compare_against_self_is_zero() {
        let e = simulate(&SimConfig::new(5, 6, 10_000, 1)).unwrap();
        let r = compare(&e, &ReferencePmf::from_empirical(&e)).unwrap();
        assert_eq!(r.max_abs_deviation, 0.0);
        assert_eq!(r.chi_square, 0.0);
        assert_eq!(r.total_variation, 0.0);
    }

    #[test]
    fn point_mass_has_zero_total_variation() {
        let e = simulate(&SimConfig::new(1, 4, 500, 3)).unwrap();
        let r = compare(&e, &ReferencePmf::from_exact(&dp_pmf(1, 4), 4)).unwrap();
        assert_eq!(r.total_variation, 0.0);
        assert_eq!(r.bins, 1);
        assert!(r.chi_square_ok());
    }

    #[test]
    fn mismatch_is_reported() {
        let e = simulate(&SimConfig::new(3, 4, 100, 3)).unwrap();
        let err = compare(&e, &ReferencePmf::from_exact(&dp_pmf(3, 5), 5)).unwrap_err();
        assert!(matches!(err, Error::Mismatch { .. }));
    }

    #[test]
    fn pooling_moves_small_bins_upward() {
        // exact law for m = 3, n = 2: k=1 w.p. 1/3, k=2 w.p. 2/3
        let table = dp_pmf(3, 2);
        let cfg = SimConfig::new(3, 2, 12, 0);
        let e = EmpiricalPmf::from_counts(cfg, vec![0, 4, 8, 0]);
        let r = compare(&e, &ReferencePmf::from_exact(&table, 2)).unwrap();
        // expected counts 0, 4, 8, 0 -> bins {0,1,2} and the empty k = 3 tail folded in
        assert_eq!(r.bins, 1);
        assert_eq!(r.chi_square, 0.0);
    }

    #[test]
    fn quantile_reference_values() {
        // upper 0.1% points: 10.828 (1 dof), 13.816 (2 dof)
        assert!((chi_square_quantile(0.999, 1) - 10.828).abs() < 1e-3);
        assert!((chi_square_quantile(0.999, 2) - 13.816).abs() < 1e-3);
    }
}
