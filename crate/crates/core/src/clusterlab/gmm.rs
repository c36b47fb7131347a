use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

pub const DEFAULT_RIDGE: f64 = 1e-6;
const LN_2PI: f64 = 1.837_877_066_409_345_5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CovType {
    Diagonal,
    Full,
}

impl FromStr for CovType {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "diagonal" | "diag" => Ok(CovType::Diagonal),
            "full" => Ok(CovType::Full),
            other => Err(format!("unknown covariance type {other:?}")),
        }
    }
}

impl fmt::Display for CovType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CovType::Diagonal => "diagonal",
            CovType::Full => "full",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GmmOptions {
    pub cov: CovType,
    pub tol: f64,
    pub max_iter: usize,
    pub n_init: usize,
    pub ridge: f64,
}

impl Default for GmmOptions {
    fn default() -> Self {
        GmmOptions {
            cov: CovType::Diagonal,
            tol: 1e-6,
            max_iter: 500,
            n_init: 5,
            ridge: DEFAULT_RIDGE,
        }
    }
}

/// Covariance with its cached log-determinant and precision factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Covariance {
    Diagonal(Vec<f64>),
    /// Row-major d×d matrix and the lower Cholesky factor of it.
    Full { sigma: Vec<f64>, chol: Vec<f64> },
}

impl Covariance {
    fn full(sigma: DMatrix<f64>) -> Result<Covariance> {
        let d = sigma.nrows();
        let chol = sigma
            .clone()
            .cholesky()
            .ok_or_else(|| Error::Numerical("covariance is not positive definite".into()))?;
        let l = chol.l();
        let row_major = |m: &DMatrix<f64>| (0..d).flat_map(|i| (0..d).map(move |j| (i, j))).map(|(i, j)| m[(i, j)]).collect();
        Ok(Covariance::Full {
            sigma: row_major(&sigma),
            chol: row_major(&l),
        })
    }

    /// ln N(x | μ, Σ).
    fn log_density(&self, x: &[f64], mu: &[f64]) -> f64 {
        let d = x.len();
        match self {
            Covariance::Diagonal(var) => {
                let mut s = 0.0;
                for ((&xi, &mi), &vi) in x.iter().zip(mu).zip(var) {
                    s += vi.ln() + (xi - mi) * (xi - mi) / vi;
                }
                -0.5 * (d as f64 * LN_2PI + s)
            }
            Covariance::Full { chol, .. } => {
                // solve L z = x - μ by forward substitution
                let mut z = vec![0.0; d];
                let mut logdet = 0.0;
                for i in 0..d {
                    let mut v = x[i] - mu[i];
                    for j in 0..i {
                        v -= chol[i * d + j] * z[j];
                    }
                    let lii = chol[i * d + i];
                    z[i] = v / lii;
                    logdet += 2.0 * lii.ln();
                }
                let q: f64 = z.iter().map(|v| v * v).sum();
                -0.5 * (d as f64 * LN_2PI + logdet + q)
            }
        }
    }

    /// Diagonal of Σ.
    pub fn variances(&self) -> Vec<f64> {
        match self {
            Covariance::Diagonal(v) => v.clone(),
            Covariance::Full { sigma, .. } => {
                let d = (sigma.len() as f64).sqrt() as usize;
                (0..d).map(|i| sigma[i * d + i]).collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GmmModel {
    pub k: usize,
    pub dim: usize,
    pub cov_type: CovType,
    pub weights: Vec<f64>,
    pub means: Vec<Vec<f64>>,
    pub covariances: Vec<Covariance>,
    /// ln L̂ of the data under the returned parameters.
    pub log_likelihood: f64,
    /// Log-likelihood before each M-step and, last, of the final parameters.
    pub trace: Vec<f64>,
    pub n_iter: usize,
    pub converged: bool,
    pub seed: u64,
    pub n: usize,
}

fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

struct Params {
    weights: Vec<f64>,
    means: Vec<Vec<f64>>,
    covs: Vec<Covariance>,
}

impl Params {
    fn weighted_log_densities(&self, x: &[f64]) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.means)
            .zip(&self.covs)
            .map(|((&w, mu), c)| w.ln() + c.log_density(x, mu))
            .collect()
    }

    /// Responsibilities (row-major n×k) and total log-likelihood.
    fn e_step(&self, x: &[Vec<f64>]) -> (Vec<Vec<f64>>, f64) {
        let rows: Vec<(Vec<f64>, f64)> = x
            .par_iter()
            .map(|xi| {
                let mut l = self.weighted_log_densities(xi);
                let z = log_sum_exp(&l);
                l.iter_mut().for_each(|v| *v = (*v - z).exp());
                (l, z)
            })
            .collect();
        let ll = rows.iter().map(|r| r.1).sum();
        (rows.into_iter().map(|r| r.0).collect(), ll)
    }
}

fn column_variances(x: &[Vec<f64>]) -> Vec<f64> {
    let n = x.len() as f64;
    let d = x[0].len();
    (0..d)
        .map(|j| {
            let m = x.iter().map(|r| r[j]).sum::<f64>() / n;
            x.iter().map(|r| (r[j] - m) * (r[j] - m)).sum::<f64>() / n
        })
        .collect()
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// k-means++ seeding: the first mean is a uniform row, later ones are drawn
/// with probability proportional to squared distance from the chosen set.
fn kmeanspp<R: Rng>(x: &[Vec<f64>], k: usize, r: &mut R) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut means = vec![x[r.gen_range(0..n)].clone()];
    let mut d2: Vec<f64> = x.iter().map(|xi| sq_dist(xi, &means[0])).collect();
    while means.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut u = r.gen::<f64>() * total;
            let mut at = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                if u < w {
                    at = i;
                    break;
                }
                u -= w;
            }
            at
        } else {
            r.gen_range(0..n)
        };
        means.push(x[pick].clone());
        let m = means.last().unwrap();
        for (di, xi) in d2.iter_mut().zip(x) {
            *di = di.min(sq_dist(xi, m));
        }
    }
    means
}

fn m_step(x: &[Vec<f64>], resp: &[Vec<f64>], k: usize, opts: &GmmOptions) -> Result<Params> {
    let n = x.len();
    let d = x[0].len();
    let mut weights = Vec::with_capacity(k);
    let mut means = Vec::with_capacity(k);
    let mut covs = Vec::with_capacity(k);
    for c in 0..k {
        let nk: f64 = resp.iter().map(|r| r[c]).sum::<f64>() + 10.0 * f64::EPSILON;
        let mut mu = vec![0.0; d];
        for (xi, ri) in x.iter().zip(resp) {
            for (m, &v) in mu.iter_mut().zip(xi) {
                *m += ri[c] * v;
            }
        }
        mu.iter_mut().for_each(|m| *m /= nk);
        let cov = match opts.cov {
            CovType::Diagonal => {
                let mut var = vec![0.0; d];
                for (xi, ri) in x.iter().zip(resp) {
                    for ((s, &v), &m) in var.iter_mut().zip(xi).zip(&mu) {
                        *s += ri[c] * (v - m) * (v - m);
                    }
                }
                Covariance::Diagonal(var.iter().map(|s| s / nk + opts.ridge).collect())
            }
            CovType::Full => {
                let mut s = DMatrix::<f64>::zeros(d, d);
                for (xi, ri) in x.iter().zip(resp) {
                    let dv = DVector::from_iterator(d, xi.iter().zip(&mu).map(|(a, b)| a - b));
                    s.ger(ri[c], &dv, &dv, 1.0);
                }
                s /= nk;
                for i in 0..d {
                    s[(i, i)] += opts.ridge;
                }
                Covariance::full(s)?
            }
        };
        weights.push(nk / n as f64);
        means.push(mu);
        covs.push(cov);
    }
    let z: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= z);
    Ok(Params { weights, means, covs })
}

fn check_input(x: &[Vec<f64>], k: usize) -> Result<usize> {
    if k == 0 {
        return Err(Error::invalid("K must be at least 1"));
    }
    if x.len() <= k {
        return Err(Error::invalid(format!("need more rows ({}) than components ({k})", x.len())));
    }
    let d = x[0].len();
    if d == 0 || x.iter().any(|r| r.len() != d) {
        return Err(Error::invalid("rows must share a positive dimension"));
    }
    if x.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("non-finite input to the mixture fit".into()));
    }
    Ok(d)
}

fn fit_once(x: &[Vec<f64>], k: usize, opts: &GmmOptions, seed: u64) -> Result<GmmModel> {
    let d = x[0].len();
    let mut r = rng::stream(seed, "gmm-init", 0);
    let var: Vec<f64> = column_variances(x).iter().map(|v| v + opts.ridge).collect();
    let init_cov = match opts.cov {
        CovType::Diagonal => Covariance::Diagonal(var.clone()),
        CovType::Full => Covariance::full(DMatrix::from_diagonal(&DVector::from_vec(var.clone())))?,
    };
    let mut params = Params {
        weights: vec![1.0 / k as f64; k],
        means: kmeanspp(x, k, &mut r),
        covs: vec![init_cov; k],
    };
    let mut trace = Vec::new();
    let mut converged = false;
    let mut n_iter = 0;
    let (mut resp, mut ll) = params.e_step(x);
    trace.push(ll);
    while n_iter < opts.max_iter {
        params = m_step(x, &resp, k, opts)?;
        n_iter += 1;
        let prev = ll;
        (resp, ll) = params.e_step(x);
        if !ll.is_finite() {
            return Err(Error::Numerical(format!("log-likelihood became {ll} at iteration {n_iter}")));
        }
        trace.push(ll);
        if (ll - prev).abs() <= opts.tol * prev.abs().max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }
    }
    Ok(GmmModel {
        k,
        dim: d,
        cov_type: opts.cov,
        weights: params.weights,
        means: params.means,
        covariances: params.covs,
        log_likelihood: ll,
        trace,
        n_iter,
        converged,
        seed,
        n: x.len(),
    })
}

/// EM fit keeping the best of `n_init` seeded restarts (ties: lowest
/// restart). Stops when the relative log-likelihood change drops below
/// `tol` or after `max_iter` M-steps.
pub fn fit_gmm(x: &[Vec<f64>], k: usize, opts: &GmmOptions, seed: u64) -> Result<GmmModel> {
    check_input(x, k)?;
    let n_init = opts.n_init.max(1);
    let fits: Vec<Result<GmmModel>> = (0..n_init)
        .into_par_iter()
        .map(|i| fit_once(x, k, opts, rng::derive_seed(seed, "gmm-restart", i as u64)))
        .collect();
    let mut best: Option<GmmModel> = None;
    let mut first_err = None;
    for f in fits {
        match f {
            Ok(m) => {
                if best.as_ref().is_none_or(|b| m.log_likelihood > b.log_likelihood) {
                    best = Some(m);
                }
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    let mut m = best.ok_or_else(|| first_err.expect("at least one restart ran"))?;
    m.seed = seed;
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum BicPenalty {
    /// K · ln N
    #[default]
    ComponentCount,
    /// (free parameters) · ln N
    ParameterCount,
}

impl GmmModel {
    pub fn n_parameters(&self) -> usize {
        let (k, d) = (self.k, self.dim);
        let cov = match self.cov_type {
            CovType::Diagonal => d,
            CovType::Full => d * (d + 1) / 2,
        };
        (k - 1) + k * d + k * cov
    }

    pub fn responsibilities(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim {
            return Err(Error::invalid(format!(
                "row has dimension {}, model expects {}",
                x.len(),
                self.dim
            )));
        }
        let mut l: Vec<f64> = (0..self.k)
            .map(|c| self.weights[c].ln() + self.covariances[c].log_density(x, &self.means[c]))
            .collect();
        let z = log_sum_exp(&l);
        l.iter_mut().for_each(|v| *v = (*v - z).exp());
        Ok(l)
    }
}

/// −2 ln L̂ + K ln N.
pub fn bic_value(log_likelihood: f64, k: usize, n: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::invalid("K must be at least 1"));
    }
    Ok(-2.0 * log_likelihood + k as f64 * (n as f64).ln())
}

pub fn bic(m: &GmmModel, n: usize, penalty: BicPenalty) -> Result<f64> {
    match penalty {
        BicPenalty::ComponentCount => bic_value(m.log_likelihood, m.k, n),
        BicPenalty::ParameterCount => Ok(-2.0 * m.log_likelihood + m.n_parameters() as f64 * (n as f64).ln()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BicPoint {
    pub k: usize,
    pub log_likelihood: f64,
    pub bic: f64,
    pub n_iter: usize,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct Selection {
    pub best_k: usize,
    pub curve: Vec<BicPoint>,
    pub best: GmmModel,
}

/// Fits every K in `k_min..=k_max` and keeps the minimum-BIC one (lowest K
/// on ties).
pub fn select_k(
    x: &[Vec<f64>],
    k_min: usize,
    k_max: usize,
    opts: &GmmOptions,
    penalty: BicPenalty,
    seed: u64,
) -> Result<Selection> {
    if k_min == 0 || k_max < k_min {
        return Err(Error::invalid(format!("bad K range {k_min}..{k_max}")));
    }
    if k_max >= x.len() {
        return Err(Error::invalid(format!("K range reaches {k_max} with only {} rows", x.len())));
    }
    let models: Vec<GmmModel> = (k_min..=k_max)
        .into_par_iter()
        .map(|k| fit_gmm(x, k, opts, rng::derive_seed(seed, "gmm-k", k as u64)))
        .collect::<Result<_>>()?;
    let mut curve = Vec::with_capacity(models.len());
    let mut best_at = 0;
    for (i, m) in models.iter().enumerate() {
        let b = bic(m, x.len(), penalty)?;
        curve.push(BicPoint {
            k: m.k,
            log_likelihood: m.log_likelihood,
            bic: b,
            n_iter: m.n_iter,
            converged: m.converged,
        });
        if b < curve[best_at].bic {
            best_at = i;
        }
    }
    Ok(Selection {
        best_k: curve[best_at].k,
        curve,
        best: models.into_iter().nth(best_at).expect("index in range"),
    })
}

/// Hard labels: argmax responsibility, lowest component on ties.
pub fn assign(m: &GmmModel, x: &[Vec<f64>]) -> Result<Vec<usize>> {
    x.par_iter()
        .map(|xi| {
            let g = m.responsibilities(xi)?;
            let mut best = 0;
            for (c, &v) in g.iter().enumerate() {
                if v > g[best] {
                    best = c;
                }
            }
            Ok(best)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_distr::{Distribution, Normal};

    fn sample_1d(n: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut r = rng::stream(seed, "test", 0);
        let a = Normal::new(0.0, 1.0).unwrap();
        let b = Normal::new(10.0, 1.0).unwrap();
        (0..n)
            .map(|i| vec![if i % 2 == 0 { a.sample(&mut r) } else { b.sample(&mut r) }])
            .collect()
    }

    #[test]
    fn single_component_is_closed_form() {
        let x: Vec<Vec<f64>> = vec![vec![1.0, 2.0], vec![3.0, 0.0], vec![2.0, 1.0], vec![6.0, 5.0]];
        let m = fit_gmm(&x, 1, &GmmOptions::default(), 1).unwrap();
        assert_eq!(m.weights, vec![1.0]);
        assert!((m.means[0][0] - 3.0).abs() < 1e-12);
        assert!((m.means[0][1] - 2.0).abs() < 1e-12);
        let v = m.covariances[0].variances();
        let expect0 = (4.0 + 0.0 + 1.0 + 9.0) / 4.0 + DEFAULT_RIDGE;
        assert!((v[0] - expect0).abs() < 1e-9);
        let full = fit_gmm(&x, 1, &GmmOptions { cov: CovType::Full, ..Default::default() }, 1).unwrap();
        if let Covariance::Full { sigma, .. } = &full.covariances[0] {
            // cov(x0, x1) = mean of products of deviations
            let c01 = (-0.0 + 0.0 * -2.0 + -1.0 * -1.0 + 3.0 * 3.0) / 4.0;
            assert!((sigma[1] - c01).abs() < 1e-9);
            assert!((sigma[2] - c01).abs() < 1e-9);
        } else {
            panic!("expected full covariance");
        }
    }

    #[test]
    fn two_component_recovery_and_monotone_trace() {
        let x = sample_1d(500, 4);
        let m = fit_gmm(&x, 2, &GmmOptions::default(), 9).unwrap();
        let mut mu: Vec<f64> = m.means.iter().map(|v| v[0]).collect();
        mu.sort_by(f64::total_cmp);
        assert!(mu[0].abs() < 0.3 && (mu[1] - 10.0).abs() < 0.3, "{mu:?}");
        for w in m.trace.windows(2) {
            assert!(w[1] >= w[0] - 1e-9);
        }
        assert!((m.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let labels = assign(&m, &x).unwrap();
        let hi = usize::from(m.means[1][0] > m.means[0][0]);
        let correct = (0..500).filter(|&i| (labels[i] == hi) == (i % 2 == 1)).count();
        assert!(correct >= 490);
    }

    #[test]
    fn deterministic_regardless_of_threads() {
        let x = sample_1d(200, 5);
        let run = |t| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .unwrap()
                .install(|| fit_gmm(&x, 3, &GmmOptions::default(), 2).unwrap())
        };
        assert_eq!(run(1), run(3));
    }

    #[test]
    fn bic_formula() {
        assert!((bic_value(-100.0, 1, 50).unwrap() - (200.0 + 50f64.ln())).abs() < 1e-12);
        assert!((bic_value(-100.0, 1, 50).unwrap() - 203.912).abs() < 1e-3);
        assert!(bic_value(-100.0, 0, 50).is_err());
        assert!(bic_value(-90.0, 2, 50).unwrap() < bic_value(-95.0, 2, 50).unwrap());
    }

    #[test]
    fn input_checks() {
        let x = vec![vec![0.0], vec![1.0]];
        assert!(fit_gmm(&x, 2, &GmmOptions::default(), 0).is_err());
        assert!(fit_gmm(&x, 0, &GmmOptions::default(), 0).is_err());
        assert!(fit_gmm(&[vec![f64::NAN], vec![0.0], vec![1.0]], 1, &GmmOptions::default(), 0).is_err());
        let m = fit_gmm(&[vec![0.0], vec![1.0], vec![2.0]], 1, &GmmOptions::default(), 0).unwrap();
        assert!(m.responsibilities(&[0.0, 1.0]).is_err());
    }

    #[test]
    fn responsibilities_are_row_stochastic() {
        let x = sample_1d(100, 6);
        let m = fit_gmm(&x, 3, &GmmOptions::default(), 1).unwrap();
        for xi in &x {
            let g = m.responsibilities(xi).unwrap();
            assert!((g.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}
