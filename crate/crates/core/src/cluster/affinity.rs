use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::metaspace::{Metric, SignatureVector};

/// How the Gaussian kernel bandwidth is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum SigmaPolicy {
    /// Median of the off-diagonal pairwise distances.
    #[default]
    Median,
    Fixed(f64),
}

/// Symmetric weighted graph over the points.
#[derive(Debug, Clone, PartialEq)]
pub struct AffinityGraph {
    weights: DMatrix<f64>,
    sigma: f64,
    sigma_fallback: bool,
    metric: Option<Metric>,
}

impl AffinityGraph {
    /// Wraps a caller-supplied weight matrix: square, symmetric within 1e-12,
    /// entries in [0, 1].
    pub fn from_weights(weights: DMatrix<f64>) -> Result<Self> {
        let n = weights.nrows();
        if weights.ncols() != n {
            return Err(Error::DimensionMismatch {
                left: n,
                right: weights.ncols(),
            });
        }
        for i in 0..n {
            for j in 0..n {
                let w = weights[(i, j)];
                if !(0.0..=1.0).contains(&w) {
                    return Err(Error::InvalidEntry {
                        index: i * n + j,
                        value: w,
                    });
                }
                if libm::fabs(w - weights[(j, i)]) > 1e-12 {
                    return Err(Error::InvalidConfig("affinity matrix is not symmetric".into()));
                }
            }
        }
        Ok(Self {
            weights,
            sigma: f64::NAN,
            sigma_fallback: false,
            metric: None,
        })
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    pub fn n(&self) -> usize {
        self.weights.nrows()
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// True when the median bandwidth was zero and σ = 1 was used instead.
    pub fn sigma_fallback(&self) -> bool {
        self.sigma_fallback
    }

    pub fn metric(&self) -> Option<Metric> {
        self.metric
    }
}

/// Gaussian-kernel affinities `w_ij = exp(−d_ij² / (2σ²))` with unit diagonal.
pub fn build_affinity(points: &[SignatureVector], metric: Metric, policy: SigmaPolicy) -> Result<AffinityGraph> {
    let n = points.len();
    if n < 2 {
        return Err(Error::InvalidClusterCount { clusters: 2, points: n });
    }
    let k = points[0].len();
    if let Some(bad) = points.iter().find(|h| h.len() != k) {
        return Err(Error::DimensionMismatch {
            left: k,
            right: bad.len(),
        });
    }
    let mut dist = DMatrix::zeros(n, n);
    let mut off_diagonal = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let d = metric.eval(&points[i], &points[j]);
            dist[(i, j)] = d;
            dist[(j, i)] = d;
            off_diagonal.push(d);
        }
    }
    let (sigma, sigma_fallback) = match policy {
        SigmaPolicy::Fixed(s) if s > 0.0 && s.is_finite() => (s, false),
        SigmaPolicy::Fixed(s) => {
            return Err(Error::InvalidConfig(alloc::format!("sigma must be positive, got {s}")))
        }
        SigmaPolicy::Median => {
            let m = median(&mut off_diagonal);
            if m > 0.0 && m.is_finite() {
                (m, false)
            } else {
                log::warn!("median pairwise distance is {m}; falling back to sigma = 1");
                (1.0, true)
            }
        }
    };
    let scale = 2.0 * sigma * sigma;
    let weights = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            1.0
        } else {
            let d = dist[(i, j)];
            libm::exp(-d * d / scale)
        }
    });
    Ok(AffinityGraph {
        weights,
        sigma,
        sigma_fallback,
        metric: Some(metric),
    })
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}
