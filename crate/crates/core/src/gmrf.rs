//! Gaussian Markov random fields with precision `I + gamma A(G)`, and the
//! data-fitted two-sample pipeline on sample correlation matrices.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};
use rand::seq::SliceRandom;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{check_len, invalid, Error, Result};
use crate::graph::{distortion, Graph, Partition};
use crate::recovery::{spectral_partition_operator, two_means_split, Recovery, RecoverySettings, RegularizedDense};
use crate::rng;

/// Largest node count accepted by the dense factorization.
pub const MAX_DENSE_NODES: usize = 4000;

pub struct GmrfModel {
    pub n: usize,
    pub gamma: f64,
    pub precision: DMatrix<f64>,
    chol: Cholesky<f64, Dyn>,
}

impl GmrfModel {
    /// Lower-triangular factor `L` with `precision = L L^T`.
    pub fn factor(&self) -> DMatrix<f64> {
        self.chol.l()
    }

    pub fn covariance(&self) -> DMatrix<f64> {
        self.chol.inverse()
    }
}

impl std::fmt::Debug for GmrfModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GmrfModel").field("n", &self.n).field("gamma", &self.gamma).finish()
    }
}

/// Fails with [`Error::NotPositiveDefinite`] when the factorization breaks
/// down; callers may resample the graph.
pub fn build_precision(g: &Graph, gamma: f64) -> Result<GmrfModel> {
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(invalid("gamma", format!("{gamma} must be nonnegative")));
    }
    let n = g.n();
    if n > MAX_DENSE_NODES {
        return Err(invalid("n", format!("{n} exceeds the dense limit {MAX_DENSE_NODES}")));
    }
    let mut precision = DMatrix::identity(n, n);
    for (u, v) in g.edge_iter() {
        precision[(u, v)] = gamma;
        precision[(v, u)] = gamma;
    }
    let chol = Cholesky::new(precision.clone()).ok_or(Error::NotPositiveDefinite)?;
    Ok(GmrfModel { n, gamma, precision, chol })
}

/// `t` observations in rows, one column per node.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix {
    pub values: DMatrix<f64>,
}

impl SampleMatrix {
    pub fn t(&self) -> usize {
        self.values.nrows()
    }

    pub fn n(&self) -> usize {
        self.values.ncols()
    }
}

/// Draws `t` i.i.d. vectors with covariance `precision^{-1}` by solving
/// `L^T z = xi` for standard normal `xi`.
pub fn sample_gmrf(model: &GmrfModel, t: usize, seed: u64) -> Result<SampleMatrix> {
    if t == 0 {
        return Err(invalid("t", "must be at least 1"));
    }
    let mut rng = rng::stream(rng::derive(seed, "gmrf-sample", 0));
    let xi = DMatrix::from_fn(model.n, t, |_, _| StandardNormal.sample(&mut rng));
    let l = model.chol.l_dirty();
    let z = l.tr_solve_lower_triangular(&xi).expect("Cholesky factor has a positive diagonal");
    Ok(SampleMatrix { values: z.transpose() })
}

/// Centered samples scaled to unit-norm columns, so that `Z^T Z` is the
/// sample correlation matrix. With fewer observations than nodes this is the
/// cheaper representation.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationFactor {
    z: DMatrix<f64>,
}

impl CorrelationFactor {
    pub fn new(samples: &SampleMatrix) -> Result<Self> {
        let t = samples.t();
        if t < 2 {
            return Err(Error::TooFewSamples { needed: 2, got: t });
        }
        let mut z = samples.values.clone();
        for (j, mut col) in z.column_iter_mut().enumerate() {
            let mean = col.mean();
            col.add_scalar_mut(-mean);
            let ss = col.norm_squared();
            if ss.is_nan() || ss <= 0.0 {
                return Err(Error::ZeroVariance(j));
            }
            col.scale_mut(1.0 / ss.sqrt());
        }
        Ok(Self { z })
    }

    pub fn n(&self) -> usize {
        self.z.ncols()
    }

    pub fn factor(&self) -> &DMatrix<f64> {
        &self.z
    }

    /// The correlation matrix, with the diagonal set to exactly 1 and
    /// entries clamped to `[-1, 1]`.
    pub fn to_matrix(&self) -> DMatrix<f64> {
        let n = self.n();
        let mut c = self.z.tr_mul(&self.z);
        for i in 0..n {
            c[(i, i)] = 1.0;
            for j in 0..i {
                let v = (0.5 * (c[(i, j)] + c[(j, i)])).clamp(-1.0, 1.0);
                c[(i, j)] = v;
                c[(j, i)] = v;
            }
        }
        c
    }

    /// [`weighted_t_statistic`] of the correlation matrix, as
    /// `(|Z x|^2 - n) / 2`.
    pub fn t_statistic(&self, x: &Partition) -> Result<f64> {
        check_len(self.n(), x.len())?;
        let signs = DVector::from_iterator(x.len(), x.labels().iter().map(|&l| f64::from(l)));
        Ok(((&self.z * signs).norm_squared() - self.n() as f64) / 2.0)
    }

    /// Spectral clustering on `C + tau 11^T` (`tau: None` means 0).
    ///
    /// The matrix equals `W^T W` with `W` the factor plus a row `sqrt(tau) 1`,
    /// so when `W` has fewer rows than columns the top eigenvectors come
    /// exactly from the small Gram matrix `W W^T`.
    pub fn recover(&self, settings: &RecoverySettings) -> Result<Recovery> {
        settings.validate()?;
        let tau = settings.tau.unwrap_or(0.0);
        let n = self.n();
        let w = if tau > 0.0 {
            let mut w = self.z.clone().insert_row(self.z.nrows(), 0.0);
            w.row_mut(self.z.nrows()).fill(tau.sqrt());
            w
        } else {
            self.z.clone()
        };
        if w.nrows() + 1 >= n || n < 2 {
            return recover_from_correlation(&self.to_matrix(), settings);
        }
        let eig = SymmetricEigen::new(&w * w.transpose());
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
        let mut values = [0.0; 2];
        let mut residuals = [0.0; 2];
        let mut second = DVector::zeros(n);
        for (slot, &k) in order.iter().take(2).enumerate() {
            let mut v = w.tr_mul(&eig.eigenvectors.column(k));
            let norm = v.norm();
            if norm.is_nan() || norm <= 0.0 {
                return recover_from_correlation(&self.to_matrix(), settings);
            }
            v /= norm;
            let lambda = eig.eigenvalues[k];
            let mv = w.tr_mul(&(&w * &v));
            residuals[slot] = (mv - &v * lambda).norm();
            values[slot] = lambda;
            if slot == 1 {
                second = v;
            }
        }
        Ok(Recovery {
            partition: two_means_split(second.as_slice()),
            eigenvalues: values,
            residuals,
            iterations: 1,
            converged: residuals.iter().all(|&r| r <= settings.tol),
        })
    }
}

/// Pearson correlation matrix with divisor `t - 1`. The diagonal is exactly 1.
pub fn correlation_matrix(samples: &SampleMatrix) -> Result<DMatrix<f64>> {
    Ok(CorrelationFactor::new(samples)?.to_matrix())
}

/// `sum_{u<v} x_u x_v C_uv`.
pub fn weighted_t_statistic(c: &DMatrix<f64>, x: &Partition) -> Result<f64> {
    if c.nrows() != c.ncols() {
        return Err(invalid("c", "must be square"));
    }
    check_len(c.nrows(), x.len())?;
    let labels = x.labels();
    let mut total = 0.0;
    for v in 0..c.ncols() {
        let col = c.column(v);
        let partial: f64 = (0..v).map(|u| f64::from(labels[u]) * col[u]).sum();
        total += f64::from(labels[v]) * partial;
    }
    Ok(total)
}

/// Spectral clustering on a correlation matrix. `tau: None` means no
/// regularization here.
pub fn recover_from_correlation(c: &DMatrix<f64>, settings: &RecoverySettings) -> Result<Recovery> {
    let op = RegularizedDense::psd(c, settings.tau.unwrap_or(0.0));
    spectral_partition_operator(&op, settings)
}

#[derive(Debug, Clone)]
pub struct GmrfStatistic {
    /// `T(C_a, xhat) - T(C_b, xhat)` with `xhat` recovered from `C_a`.
    pub value: f64,
    pub t_a: f64,
    pub t_b: f64,
    pub estimate: Partition,
    pub converged: bool,
}

pub fn gmrf_two_sample(
    samples_a: &SampleMatrix,
    samples_b: &SampleMatrix,
    settings: &RecoverySettings,
) -> Result<GmrfStatistic> {
    check_len(samples_a.n(), samples_b.n())?;
    let fa = CorrelationFactor::new(samples_a)?;
    let fb = CorrelationFactor::new(samples_b)?;
    let recovery = fa.recover(settings)?;
    paired_statistic(&fa, &fb, recovery)
}

pub(crate) fn paired_statistic(
    fa: &CorrelationFactor,
    fb: &CorrelationFactor,
    recovery: Recovery,
) -> Result<GmrfStatistic> {
    let t_a = fa.t_statistic(&recovery.partition)?;
    let t_b = fb.t_statistic(&recovery.partition)?;
    Ok(GmrfStatistic { value: t_a - t_b, t_a, t_b, estimate: recovery.partition, converged: recovery.converged })
}

/// Distortion between partitions recovered from two correlation matrices.
pub fn naive_gmrf_distortion(ca: &DMatrix<f64>, cb: &DMatrix<f64>, settings: &RecoverySettings) -> Result<usize> {
    let xa = recover_from_correlation(ca, settings)?;
    let xb = recover_from_correlation(cb, settings)?;
    distortion(&xa.partition, &xb.partition)
}

/// One-dimensional linear discriminant with equal priors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LdaThreshold {
    pub threshold: f64,
    /// `true` when values above the threshold are classified as alternate.
    pub alt_above: bool,
    pub null_mean: f64,
    pub alt_mean: f64,
    pub pooled_variance: f64,
}

impl LdaThreshold {
    pub fn rejects(&self, value: f64) -> bool {
        if self.alt_above {
            value > self.threshold
        } else {
            value < self.threshold
        }
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// With equal priors and a shared variance the decision boundary is the
/// midpoint of the class means.
pub fn fit_lda_threshold(null_values: &[f64], alt_values: &[f64]) -> Result<LdaThreshold> {
    if null_values.is_empty() || alt_values.is_empty() {
        return Err(Error::TooFewSamples { needed: 1, got: null_values.len().min(alt_values.len()) });
    }
    let (m0, m1) = (mean(null_values), mean(alt_values));
    let ss = |v: &[f64], m: f64| v.iter().map(|x| (x - m) * (x - m)).sum::<f64>();
    let dof = (null_values.len() + alt_values.len()).saturating_sub(2).max(1);
    let pooled = (ss(null_values, m0) + ss(alt_values, m1)) / dof as f64;
    if m0 == m1 && pooled == 0.0 {
        return Err(Error::DegenerateClasses);
    }
    Ok(LdaThreshold {
        threshold: 0.5 * (m0 + m1),
        alt_above: m1 >= m0,
        null_mean: m0,
        alt_mean: m1,
        pooled_variance: pooled,
    })
}

/// Repeated stratified k-fold estimate of false alarm plus missed detection.
/// A fold whose training split is degenerate counts as chance (0.5 + 0.5).
pub fn cross_validated_risk(
    null_values: &[f64],
    alt_values: &[f64],
    folds: usize,
    repeats: usize,
    seed: u64,
) -> Result<f64> {
    if folds < 2 {
        return Err(invalid("folds", "must be at least 2"));
    }
    if repeats == 0 {
        return Err(invalid("repeats", "must be at least 1"));
    }
    let fewest = null_values.len().min(alt_values.len());
    if fewest < folds {
        return Err(Error::TooFewSamples { needed: folds, got: fewest });
    }
    let mut total = 0.0;
    for rep in 0..repeats {
        let mut rng = rng::stream(rng::derive(seed, "cv-shuffle", rep as u64));
        let mut null_idx: Vec<usize> = (0..null_values.len()).collect();
        let mut alt_idx: Vec<usize> = (0..alt_values.len()).collect();
        null_idx.shuffle(&mut rng);
        alt_idx.shuffle(&mut rng);
        for fold in 0..folds {
            let split = |idx: &[usize], values: &[f64]| {
                let (mut train, mut test) = (Vec::new(), Vec::new());
                for (pos, &i) in idx.iter().enumerate() {
                    if pos % folds == fold {
                        test.push(values[i]);
                    } else {
                        train.push(values[i]);
                    }
                }
                (train, test)
            };
            let (null_train, null_test) = split(&null_idx, null_values);
            let (alt_train, alt_test) = split(&alt_idx, alt_values);
            total += match fit_lda_threshold(&null_train, &alt_train) {
                Ok(lda) => {
                    let fa = null_test.iter().filter(|&&v| lda.rejects(v)).count() as f64 / null_test.len() as f64;
                    let md = alt_test.iter().filter(|&&v| !lda.rejects(v)).count() as f64 / alt_test.len() as f64;
                    fa + md
                }
                Err(Error::DegenerateClasses) => 1.0,
                Err(e) => return Err(e),
            };
        }
    }
    Ok(total / (folds * repeats) as f64)
}
