//! Closed-form quantities from the lower-bound arguments, evaluated
//! numerically so they can be overlaid on empirical risk grids.

use statrs::function::gamma::ln_gamma;

use crate::error::{invalid, Result};

/// Risk below 1/4 needs the second moment of the likelihood ratio to exceed this.
pub const CHI2_CRITICAL: f64 = 3.08;

fn check_counts(n: usize, a: f64, b: f64) -> Result<()> {
    let nf = n as f64;
    if n < 2 {
        return Err(invalid("n", "must be at least 2"));
    }
    for (name, v) in [("a", a), ("b", b)] {
        if !(v >= 0.0 && v <= nf) {
            return Err(invalid(name, format!("{v} is outside [0, {n}]")));
        }
    }
    Ok(())
}

/// `(a-b)^2 (1/(a(1-a/n)) + 1/(b(1-b/n)))`.
pub fn nu(n: usize, a: f64, b: f64) -> Result<f64> {
    check_counts(n, a, b)?;
    let nf = n as f64;
    for (name, v) in [("a", a), ("b", b)] {
        if v <= 0.0 || v >= nf {
            return Err(invalid(name, format!("{v} must lie strictly inside (0, {n})")));
        }
    }
    let d = a - b;
    Ok(d * d * (1.0 / (a * (1.0 - a / nf)) + 1.0 / (b * (1.0 - b / nf))))
}

/// Bhattacharyya coefficient between the null and an alternative with `s`
/// relabelled nodes, evaluated in log space.
pub fn gof_bc_bound(n: usize, s: usize, a: f64, b: f64) -> Result<f64> {
    check_counts(n, a, b)?;
    if s > n {
        return Err(invalid("s", format!("{s} exceeds n = {n}")));
    }
    let pairs = (s * (n - s)) as f64;
    if pairs == 0.0 {
        return Ok(1.0);
    }
    let nf = n as f64;
    let base = (a * b).sqrt() / nf + ((1.0 - a / nf) * (1.0 - b / nf)).sqrt();
    Ok((pairs * base.ln()).exp().min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chi2Bound {
    /// Upper bound on the second moment of the likelihood ratio; may be infinite.
    pub value: f64,
    /// Set when `value < 3.08`, so no test reaches risk below 1/4.
    pub risk_floor: bool,
}

/// `exp((s^2/n) (e^{2 nu} - 1))`.
pub fn gof_chi2_bound(n: usize, s: usize, a: f64, b: f64) -> Result<Chi2Bound> {
    let nu = if a == b { 0.0 } else { nu(n, a, b)? };
    if s > n {
        return Err(invalid("s", format!("{s} exceeds n = {n}")));
    }
    let sf = s as f64;
    let exponent = sf * sf / n as f64 * (2.0 * nu).exp_m1();
    let value = if exponent.is_nan() { f64::INFINITY } else { exponent.exp() };
    Ok(Chi2Bound { value, risk_floor: value < CHI2_CRITICAL })
}

fn ln_choose(n: f64, k: f64) -> f64 {
    ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0)
}

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -(p * p.log2() + (1.0 - p) * (1.0 - p).log2())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TstConverse {
    pub tau: f64,
    /// Probability that a uniform balanced partition lies within distortion `s`
    /// of a fixed one, summed exactly.
    pub gamma: f64,
    /// Entropy bound `sqrt(2n/pi^2) 2^{-n(1-h(s/n))}` on the same probability.
    pub gamma_upper: f64,
    /// `2^{4 tau} / (1 - 4 tau)`, present only when `tau < 1/4`.
    pub beta_upper: Option<f64>,
    /// `1 - sqrt(ln(beta / (1 - gamma)))`, present with `beta_upper`.
    pub risk_lower: Option<f64>,
}

pub fn tst_converse(n: usize, s: usize, a: f64, b: f64) -> Result<TstConverse> {
    check_counts(n, a, b)?;
    if 2 * s >= n && s > 0 {
        return Err(invalid("s", format!("{s} must be below n/2")));
    }
    let nf = n as f64;
    let tau = if a + b == 0.0 { 0.0 } else { (a - b) * (a - b) * nf / ((a + b) * (2.0 * nf - a - b)) };
    let half = nf / 2.0;
    let ln_total = ln_choose(nf, half);
    let gamma: f64 = (0..s).step_by(2).map(|k| (2.0 * ln_choose(half, (k / 2) as f64) - ln_total).exp()).sum();
    let exponent = -nf * (1.0 - binary_entropy(s as f64 / nf));
    let gamma_upper = (2.0 * nf).sqrt() / std::f64::consts::PI * exponent.exp2();
    let beta_upper = (tau < 0.25).then(|| (4.0 * tau).exp2() / (1.0 - 4.0 * tau));
    let risk_lower = beta_upper.map(|beta| 1.0 - (beta.ln() - (-gamma).ln_1p()).sqrt());
    Ok(TstConverse { tau, gamma, gamma_upper, beta_upper, risk_lower })
}

/// Every bound for one `(n, s, a, b)` point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub n: usize,
    pub s: usize,
    pub a: f64,
    pub b: f64,
    pub nu: f64,
    pub bc: f64,
    pub chi2: Chi2Bound,
    pub tst: TstConverse,
}

impl BoundReport {
    pub fn evaluate(n: usize, s: usize, a: f64, b: f64) -> Result<Self> {
        Ok(Self {
            n,
            s,
            a,
            b,
            nu: if a == b { 0.0 } else { nu(n, a, b)? },
            bc: gof_bc_bound(n, s, a, b)?,
            chi2: gof_chi2_bound(n, s, a, b)?,
            tst: tst_converse(n, s, a, b)?,
        })
    }

    pub const CSV_HEADER: &'static str =
        "n,s,a,b,nu,bc,chi2_upper,chi2_risk_floor,tau,gamma,gamma_upper,beta_upper,tst_risk_lower";

    /// One CSV row; absent values are empty cells.
    pub fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| format!("{x}")).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.n,
            self.s,
            self.a,
            self.b,
            self.nu,
            self.bc,
            self.chi2.value,
            u8::from(self.chi2.risk_floor),
            self.tst.tau,
            self.tst.gamma,
            self.tst.gamma_upper,
            opt(self.tst.beta_upper),
            opt(self.tst.risk_lower),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn nu_examples() {
        let v = nu(1000, 15.0, 5.0).unwrap();
        assert!((v - 100.0 * (1.0 / (15.0 * 0.985) + 1.0 / (5.0 * 0.995))).abs() < 1e-12);
        assert!((v - 26.87).abs() < 0.01);
        assert_eq!(nu(100, 7.0, 7.0).unwrap(), 0.0);
        assert!(nu(100, 0.0, 7.0).is_err());
        assert!(nu(100, 100.0, 7.0).is_err());
    }

    #[test]
    fn bc_degenerate_cases() {
        assert_eq!(gof_bc_bound(100, 0, 15.0, 5.0).unwrap(), 1.0);
        assert!((gof_bc_bound(100, 10, 6.0, 6.0).unwrap() - 1.0).abs() < 1e-12);
        let tiny = gof_bc_bound(1_000_000, 500_000, 50.0, 1.0).unwrap();
        assert!((0.0..1e-300).contains(&tiny));
    }

    #[test]
    fn chi2_cases() {
        let zero = gof_chi2_bound(1000, 0, 15.0, 5.0).unwrap();
        assert_eq!(zero.value, 1.0);
        assert!(zero.risk_floor);
        let flat = gof_chi2_bound(1000, 20, 5.0, 5.0).unwrap();
        assert_eq!(flat.value, 1.0);
        let huge = gof_chi2_bound(1000, 400, 50.0, 1.0).unwrap();
        assert!(huge.value.is_infinite());
        assert!(!huge.risk_floor);
    }

    #[test]
    fn chi2_at_sufficient_condition() {
        // Pick b so that nu equals 1/2 ln(1 + ln3 n / s^2); the bound is then 3.
        let (n, s) = (1000usize, 20usize);
        let target = 0.5 * (1.0 + 3f64.ln() * n as f64 / (s * s) as f64).ln();
        let (mut lo, mut hi) = (5.0, 15.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if nu(n, mid, 5.0).unwrap() < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let bound = gof_chi2_bound(n, s, lo, 5.0).unwrap();
        assert!(bound.value <= 3.0 + 1e-9, "{}", bound.value);
        assert!(bound.risk_floor);
    }

    #[test]
    fn tau_and_beta() {
        let c = tst_converse(1000, 100, 15.0, 5.0).unwrap();
        assert_eq!(c.tau, 2500.0 / 990.0);
        assert!(c.beta_upper.is_none() && c.risk_lower.is_none());
        let eq = tst_converse(1000, 1, 5.0, 5.0).unwrap();
        assert_eq!(eq.tau, 0.0);
        assert_eq!(eq.beta_upper, Some(1.0));
        assert!((eq.risk_lower.unwrap() - 1.0).abs() < 1e-100f64.sqrt());
    }

    #[test]
    fn gamma_single_term() {
        let c = tst_converse(20, 1, 3.0, 1.0).unwrap();
        assert!((c.gamma - 1.0 / 184756.0).abs() < 1e-15);
        assert!(c.gamma_upper >= c.gamma);
    }

    #[test]
    fn gamma_counts_balanced_partitions() {
        // n = 8: C(4, j)^2 balanced partitions at Hamming distance 2j.
        let c = tst_converse(8, 3, 1.0, 1.0).unwrap();
        assert!((c.gamma - (1.0 + 16.0) / 70.0).abs() < 1e-12);
    }

    #[test]
    fn report_row_has_empty_cells() {
        let r = BoundReport::evaluate(1000, 100, 15.0, 5.0).unwrap();
        let row = r.csv_row();
        assert_eq!(row.split(',').count(), BoundReport::CSV_HEADER.split(',').count());
        assert!(row.ends_with(",,"));
    }

    proptest! {
        #[test]
        fn snr_bracketed_by_nu(a in 0.01f64..400.0, b in 0.01f64..400.0) {
            let n = 1000;
            let lambda = (a - b).powi(2) / (a + b);
            prop_assert!(lambda <= nu(n, a, b).unwrap() * (1.0 + 1e-12));
        }

        #[test]
        fn beta_present_iff_tau_small(a in 0.0f64..50.0, b in 0.0f64..50.0, s in 0usize..100) {
            let c = tst_converse(1000, s, a, b).unwrap();
            prop_assert_eq!(c.beta_upper.is_some(), c.tau < 0.25);
            prop_assert_eq!(c.risk_lower.is_some(), c.tau < 0.25);
            prop_assert!(c.gamma >= 0.0 && c.gamma_upper >= 0.0);
        }
    }
}
