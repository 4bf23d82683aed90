use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Parameters `(n, a, b)` of the two-community SBM: same-community pairs
/// connect with probability `a/n`, cross-community pairs with `b/n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SbmParams {
    pub n: usize,
    pub a: f64,
    pub b: f64,
}

impl SbmParams {
    pub fn new(n: usize, a: f64, b: f64) -> Result<Self> {
        let params = Self { n, a, b };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(invalid("n", "must be positive"));
        }
        let nf = self.n as f64;
        for (name, v) in [("a", self.a), ("b", self.b)] {
            if !v.is_finite() || v < 0.0 {
                return Err(invalid(name, format!("{v} is not a nonnegative number")));
            }
            if v / nf > 1.0 {
                return Err(Error::OutOfRange(format!("{name}/n = {} exceeds 1", v / nf)));
            }
        }
        Ok(())
    }

    pub fn snr(&self) -> Result<f64> {
        snr(self.a, self.b)
    }

    pub fn p_within(&self) -> f64 {
        self.a / self.n as f64
    }

    pub fn p_across(&self) -> f64 {
        self.b / self.n as f64
    }

    /// Whether `a + b < n/4`, the sparsity condition the risk bounds assume.
    pub fn is_sparse_regime(&self) -> bool {
        self.a + self.b < self.n as f64 / 4.0
    }
}

/// `(a - b)^2 / (a + b)`.
pub fn snr(a: f64, b: f64) -> Result<f64> {
    let total = a + b;
    if total <= 0.0 {
        return Err(Error::UndefinedSnr);
    }
    Ok((a - b) * (a - b) / total)
}

/// Solves for `(a, b)` with `b = ratio * a` and the requested SNR.
pub fn params_from_snr(n: usize, snr_target: f64, ratio_b_over_a: f64) -> Result<SbmParams> {
    if !(snr_target > 0.0 && snr_target.is_finite()) {
        return Err(invalid("snr_target", format!("{snr_target} must be positive")));
    }
    let r = ratio_b_over_a;
    if !(r > 0.0 && r < 1.0) {
        return Err(invalid("ratio_b_over_a", format!("{r} must lie in (0, 1)")));
    }
    let a = (1.0 + r) * snr_target / ((1.0 - r) * (1.0 - r));
    SbmParams::new(n, a, r * a)
}
