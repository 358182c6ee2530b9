//! Cross-route equivalence suite behind the `verify` command.

use num_bigint::BigInt;
use num_traits::{One, Pow, Zero};
use serde::{Serialize, Serializer};

use crate::distribution::{
    closed_form_row, completion_stats, dp_pmf, float_pmf, mean_coupons, mean_coupons_closed,
    ClosedForm, CountRows,
};
use crate::genfun::{apply_recurrence, egf_closed_eval, egf_expand, gn_direct, gn_iterated, PolyY};
use crate::montecarlo::{compare, simulate_parallel, ReferencePmf, SimConfig};
use crate::numeric::{int, pow_rational, ratio, Rational};
use crate::oracle::{enumerated_pmf, expected_completion};
use crate::output::fmt_f64;
use crate::stirling::{stirling_explicit, stirling_table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyConfig {
    pub m_max: u64,
    pub n_max: u64,
    pub trials: u64,
    pub seed: u64,
    pub workers: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            m_max: 6,
            n_max: 12,
            trials: 100_000,
            seed: 20_240_917,
            workers: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Deviation {
    Exact,
    /// Number of exact comparisons that disagreed.
    Mismatches(u64),
    /// Worst-case numeric deviation.
    Value(f64),
}

impl Deviation {
    fn render(&self) -> String {
        match self {
            Deviation::Exact => "exact".into(),
            Deviation::Mismatches(c) => format!("{c} mismatches"),
            Deviation::Value(v) => fmt_f64(*v),
        }
    }
}

impl Serialize for Deviation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Deviation::Value(v) if v.is_finite() => s.serialize_f64(*v),
            _ => s.serialize_str(&self.render()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub scope: String,
    pub status: Status,
    pub deviation: Deviation,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
    pub overall: Status,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.overall == Status::Pass
    }

    pub fn to_table(&self) -> String {
        let rows: Vec<[String; 4]> = self
            .checks
            .iter()
            .map(|c| {
                let status = match c.status {
                    Status::Pass => "PASS",
                    Status::Fail => "FAIL",
                };
                [
                    c.name.clone(),
                    c.scope.clone(),
                    status.into(),
                    c.deviation.render(),
                ]
            })
            .collect();
        let header = ["check", "scope", "status", "deviation"];
        let mut widths = header.map(str::len);
        for r in &rows {
            for (w, cell) in widths.iter_mut().zip(r) {
                *w = (*w).max(cell.len());
            }
        }
        let line = |cells: [&str; 4]| {
            let mut s = String::new();
            for (i, (cell, w)) in cells.iter().zip(widths).enumerate() {
                if i + 1 == cells.len() {
                    s.push_str(cell);
                } else {
                    s.push_str(&format!("{cell:<w$}  "));
                }
            }
            s.push('\n');
            s
        };
        let mut out = line(header);
        for r in &rows {
            out.push_str(&line([&r[0], &r[1], &r[2], &r[3]]));
        }
        let overall = if self.passed() { "PASS" } else { "FAIL" };
        out.push_str(&format!("overall: {overall}\n"));
        out
    }
}

fn exact_check(name: &str, scope: String, mismatches: u64) -> Check {
    Check {
        name: name.into(),
        scope,
        status: if mismatches == 0 {
            Status::Pass
        } else {
            Status::Fail
        },
        deviation: if mismatches == 0 {
            Deviation::Exact
        } else {
            Deviation::Mismatches(mismatches)
        },
    }
}

fn numeric_check(name: &str, scope: String, worst: f64, ok: bool) -> Check {
    Check {
        name: name.into(),
        scope,
        status: if ok { Status::Pass } else { Status::Fail },
        deviation: Deviation::Value(worst),
    }
}

pub fn run_verify(cfg: &VerifyConfig) -> VerifyReport {
    assert!(cfg.m_max >= 1 && cfg.n_max >= 1 && cfg.trials >= 1);
    let (m_max, n_max) = (cfg.m_max, cfg.n_max);
    let envelope = format!("m<={m_max},n<={n_max}");
    let mut checks = Vec::new();

    // Stirling numbers
    let table = stirling_table(n_max);
    let mut bad = 0;
    for n in 1..=n_max {
        for k in 1..=n {
            bad += u64::from(stirling_explicit(n, k) != table.get(n, k));
        }
    }
    checks.push(exact_check(
        "stirling.recurrence_vs_explicit",
        format!("1<=k<=n<={n_max}"),
        bad,
    ));
    let bad = (2..=n_max)
        .filter(|&n| table.get(n, 2) != BigInt::from(2).pow((n - 1) as u32) - 1)
        .count() as u64;
    checks.push(exact_check(
        "stirling.second_column",
        format!("2<=n<={n_max}"),
        bad,
    ));

    // Exact distribution routes
    let tables: Vec<_> = (1..=m_max).map(|m| dp_pmf(m, n_max)).collect();
    let mut bad = 0;
    for t in &tables {
        for n in 0..=n_max {
            let dp = t.row(n);
            bad += u64::from(closed_form_row(t.m(), n, ClosedForm::Simplified) != dp);
            bad += u64::from(closed_form_row(t.m(), n, ClosedForm::Rude) != dp);
        }
    }
    checks.push(exact_check(
        "distribution.dp_vs_closed_forms",
        envelope.clone(),
        bad,
    ));

    let (em, en) = (m_max.min(4), n_max.min(8));
    let mut bad = 0;
    for t in tables.iter().take(em as usize) {
        for n in 0..=en {
            bad += u64::from(enumerated_pmf(t.m(), n) != t.row(n));
        }
    }
    checks.push(exact_check(
        "distribution.enumeration_oracle",
        format!("m<={em},n<={en}"),
        bad,
    ));

    let mut bad = 0;
    for t in &tables {
        let m = t.m();
        for n in 0..=n_max {
            let row = t.row(n);
            let sum = row.iter().fold(Rational::zero(), |a, p| a + p);
            bad += u64::from(!sum.is_one());
            for (k, p) in row.iter().enumerate() {
                let k = k as u64;
                let support = if n == 0 {
                    k == 0
                } else {
                    k >= 1 && k <= n.min(m)
                };
                bad += u64::from(p.is_zero() == support);
            }
            if n >= 1 {
                bad += u64::from(t.get(n, m) < t.get(n - 1, m));
                let bound = int(m) * pow_rational(&(Rational::one() - ratio(1, m)), n as u32);
                bad += u64::from(Rational::one() - t.get(n, m) > bound);
            }
        }
    }
    checks.push(exact_check(
        "distribution.conservation_support",
        envelope.clone(),
        bad,
    ));

    // Generating functions
    let mut bad = 0;
    for m in 1..=m_max {
        let series = egf_expand(m, n_max);
        let mut g = PolyY::one();
        for n in 0..=n_max {
            if n > 0 {
                g = apply_recurrence(&g, m);
            }
            let direct = gn_direct(m, n);
            bad += u64::from(g != direct);
            bad += u64::from(series.term(n) != Some(&direct));
            let dp = tables[(m - 1) as usize].row(n);
            bad += (0..=m as usize)
                .filter(|&k| direct.coeff(k) != dp[k])
                .count() as u64;
            bad += u64::from(!direct.eval(&Rational::one()).is_one());
        }
    }
    checks.push(exact_check(
        "genfun.three_routes_and_dp",
        envelope.clone(),
        bad,
    ));

    let mut bad = 0;
    for m in 1..=m_max {
        for n in 0..=n_max {
            let closed = mean_coupons_closed(m, n);
            bad += u64::from(mean_coupons(m, n) != closed);
            bad += u64::from(gn_iterated(m, n).derivative().eval(&Rational::one()) != closed);
        }
    }
    checks.push(exact_check("mean.identity", envelope.clone(), bad));

    let mut worst = 0.0f64;
    for m in 1..=m_max {
        worst = worst.max((completion_stats(m, 1e-9).mean - expected_completion(m)).abs());
    }
    checks.push(numeric_check(
        "completion.mean_vs_harmonic",
        format!("m<={m_max},tol=1e-6"),
        worst,
        worst <= 1e-6,
    ));

    let mut worst = 0.0f64;
    for m in 1..=m_max {
        let ft = float_pmf(m, n_max);
        let mut exact = CountRows::new(m);
        for n in 0..=n_max {
            for (a, b) in exact.to_f64_row().iter().zip(ft.row(n)) {
                worst = worst.max((a - b).abs());
            }
            exact.step();
        }
    }
    checks.push(numeric_check(
        "float.dp_accuracy",
        format!("{envelope},tol=1e-10"),
        worst,
        worst <= 1e-10,
    ));

    let (sm, order) = (m_max.min(5), 25u64);
    let mut ok = true;
    let mut worst = 0.0f64;
    for m in 1..=sm {
        let series = egf_expand(m, order);
        for &x in &[-2.0, -1.0, 0.5, 2.0] {
            for &y in &[-1.0, -0.5, 0.0, 0.5, 1.0] {
                let diff = (egf_closed_eval(m, x, y) - series.eval_f64(x, y)).abs();
                let fact: f64 = (1..=order + 1).map(|i| i as f64).product();
                let bound = f64::abs(x).powi(order as i32 + 1) / fact
                    * f64::exp(f64::abs(x))
                    * (1.0 + f64::abs(y)).powi(m as i32);
                worst = worst.max(diff);
                ok &= diff <= bound + 1e-13;
            }
        }
    }
    checks.push(numeric_check(
        "genfun.series_vs_closed_eval",
        format!("m<={sm},|x|<=2,|y|<=1,N={order}"),
        worst,
        ok,
    ));

    let mut cases = vec![
        (2u64.min(m_max), 3u64.min(n_max)),
        (m_max.min(5), n_max.min(10)),
        (m_max, n_max),
    ];
    cases.dedup();
    let tol = mc_tolerance(cfg.trials);
    for (m, n) in cases {
        let sim = SimConfig::new(m, n, cfg.trials, cfg.seed);
        let emp = simulate_parallel(&sim, cfg.workers).expect("validated config");
        let reference = ReferencePmf::from_exact(&tables[(m - 1) as usize], n);
        let fit = compare(&emp, &reference).expect("same shape");
        checks.push(numeric_check(
            "montecarlo.fit",
            format!(
                "m={m},n={n},trials={},tol={},chi2<={}",
                cfg.trials,
                fmt_f64(tol),
                fmt_f64(fit.chi_square_critical_999)
            ),
            fit.max_abs_deviation,
            fit.passes(tol),
        ));
    }

    let overall = if checks.iter().all(|c| c.status == Status::Pass) {
        Status::Pass
    } else {
        Status::Fail
    };
    VerifyReport { checks, overall }
}

/// Max-abs-deviation envelope for `trials` samples: at least 5e-3 and at
/// least six binomial standard errors at `p = 1/2`.
pub fn mc_tolerance(trials: u64) -> f64 {
    (3.0 / (trials as f64).sqrt()).max(5e-3)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_envelope_passes() {
        let cfg = VerifyConfig {
            m_max: 3,
            n_max: 5,
            trials: 20_000,
            ..VerifyConfig::default()
        };
        let report = run_verify(&cfg);
        assert!(report.passed(), "{}", report.to_table());
        let table = report.to_table();
        assert!(table.starts_with("check"));
        assert!(table.ends_with("overall: PASS\n"));
    }

    #[test]
    fn deviation_serialization() {
        assert_eq!(
            serde_json::to_string(&Deviation::Exact).unwrap(),
            "\"exact\""
        );
        assert_eq!(
            serde_json::to_string(&Deviation::Value(0.25)).unwrap(),
            "0.25"
        );
        assert_eq!(
            serde_json::to_string(&Deviation::Mismatches(3)).unwrap(),
            "\"3 mismatches\""
        );
    }

    #[test]
    fn tolerance_envelope() {
        assert_eq!(mc_tolerance(1_000_000), 5e-3);
        assert!((mc_tolerance(100_000) - 0.009486832980505138).abs() < 1e-15);
    }
}
