//! Structure-constrained nonnegative matrix factorization.
//!
//! Factorizes a forest matrix `F` (pq×n) as `F ≈ τ(W)·H`, where every
//! column of `τ(W)` is a meta-tree: reshaped to p×q, each row is either
//! entirely positive or entirely zero. Updates are Lee–Seung style
//! multiplicative rules; `τ` is applied to `W` after every `W` update so the
//! stored basis is always the constrained one.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{Error, Result};
use crate::forest::ForestMatrix;
use crate::metaspace::SignatureVector;
use crate::seed;

/// Consecutive sweeps below `rel_tol` needed to declare convergence.
pub const STALL_SWEEPS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct FactorizationConfig {
    /// Number of meta-trees `k`.
    pub rank: usize,
    pub max_iters: usize,
    /// Relative objective change treated as stalled.
    pub rel_tol: f64,
    /// Value assigned to zero-like entries of mixed rows by `τ`.
    pub lambda: f64,
    /// Denominator guard in the multiplicative updates.
    pub epsilon: f64,
    /// Entries at or below this are zero-like inside `τ`.
    pub pos_threshold: f64,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for FactorizationConfig {
    fn default() -> Self {
        Self {
            rank: 8,
            max_iters: 500,
            rel_tol: 1e-6,
            lambda: 1e-3,
            epsilon: 1e-12,
            pos_threshold: 1e-9,
            restarts: 5,
            seed: 0,
        }
    }
}

impl FactorizationConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::InvalidConfig(msg.into()));
        if self.rank == 0 {
            return fail("rank must be at least 1");
        }
        if self.max_iters == 0 {
            return fail("max_iters must be at least 1");
        }
        if self.restarts == 0 {
            return fail("restarts must be at least 1");
        }
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return fail("rel_tol must be positive");
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return fail("epsilon must be positive");
        }
        if !(self.pos_threshold >= 0.0 && self.pos_threshold.is_finite()) {
            return fail("pos_threshold must be nonnegative");
        }
        if !(self.lambda.is_finite() && self.lambda > self.pos_threshold) {
            // a correction at or below the threshold would still read as zero-like
            return fail("lambda must be finite and exceed pos_threshold");
        }
        Ok(())
    }
}

/// Result of a factorization: the constrained basis `τ(W)` and coordinates `H`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetaBasis {
    w: DMatrix<f64>,
    h: DMatrix<f64>,
    objective_trace: Vec<f64>,
    converged: bool,
    restart: usize,
}

impl MetaBasis {
    /// pq×k matrix whose columns are meta-trees.
    pub fn meta_trees(&self) -> &DMatrix<f64> {
        &self.w
    }

    /// k×n matrix whose columns are signature vectors.
    pub fn coefficients(&self) -> &DMatrix<f64> {
        &self.h
    }

    pub fn signature_vectors(&self) -> Vec<SignatureVector> {
        self.h
            .column_iter()
            .map(|c| SignatureVector::from_raw(c.iter().copied().collect()))
            .collect()
    }

    /// Objective after every sweep of the winning restart.
    pub fn objective_trace(&self) -> &[f64] {
        &self.objective_trace
    }

    pub fn objective(&self) -> f64 {
        self.objective_trace.last().copied().unwrap_or(f64::NAN)
    }

    pub fn converged(&self) -> bool {
        self.converged
    }

    /// Index of the restart that produced this result.
    pub fn restart(&self) -> usize {
        self.restart
    }

    pub fn reconstruction(&self) -> DMatrix<f64> {
        &self.w * &self.h
    }
}

fn check_entries(values: &[f64]) -> Result<()> {
    match values
        .iter()
        .enumerate()
        .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
    {
        Some((index, &value)) => Err(Error::InvalidEntry { index, value }),
        None => Ok(()),
    }
}

/// Enforces positive uniformity on one meta-tree column.
///
/// Rows of the p×q view with both positive (`> pos_threshold`) and
/// zero-like entries get their zero-like entries raised to `lambda`;
/// rows that are entirely zero-like become exactly zero.
pub fn tau(column: &[f64], p: usize, q: usize, lambda: f64, pos_threshold: f64) -> Result<Vec<f64>> {
    if p.checked_mul(q) != Some(column.len()) {
        return Err(Error::LengthMismatch {
            len: column.len(),
            p,
            q,
        });
    }
    check_entries(column)?;
    let mut out = column.to_vec();
    tau_in_place(&mut out, p, q, lambda, pos_threshold);
    Ok(out)
}

fn tau_in_place(column: &mut [f64], p: usize, q: usize, lambda: f64, pos_threshold: f64) {
    for row in 0..p {
        let positive = (0..q).filter(|&j| column[row + j * p] > pos_threshold).count();
        if positive == q {
            continue;
        }
        for j in 0..q {
            let v = &mut column[row + j * p];
            if *v <= pos_threshold {
                *v = if positive == 0 { 0.0 } else { lambda };
            }
        }
    }
}

/// Applies [`tau`] to every column of `w` in place.
pub fn apply_tau(w: &mut DMatrix<f64>, p: usize, q: usize, lambda: f64, pos_threshold: f64) {
    debug_assert_eq!(w.nrows(), p * q);
    for mut col in w.column_iter_mut() {
        tau_in_place(col.as_mut_slice(), p, q, lambda, pos_threshold);
    }
}

/// True when `tau(column) == column`.
pub fn is_tau_fixed_point(column: &[f64], p: usize, q: usize, lambda: f64, pos_threshold: f64) -> bool {
    tau(column, p, q, lambda, pos_threshold).is_ok_and(|t| t == column)
}

/// Squared Frobenius norm of `F − W·H`.
pub fn objective(f: &DMatrix<f64>, w: &DMatrix<f64>, h: &DMatrix<f64>) -> Result<f64> {
    if w.ncols() != h.nrows() {
        return Err(Error::DimensionMismatch {
            left: w.ncols(),
            right: h.nrows(),
        });
    }
    if f.nrows() != w.nrows() || f.ncols() != h.ncols() {
        return Err(Error::DimensionMismatch {
            left: f.nrows() * f.ncols(),
            right: w.nrows() * h.ncols(),
        });
    }
    Ok(residual_norm_sq(f, w, h))
}

fn residual_norm_sq(f: &DMatrix<f64>, w: &DMatrix<f64>, h: &DMatrix<f64>) -> f64 {
    (f - w * h).norm_squared()
}

/// One multiplicative `W` step (before `τ`).
pub fn update_w(f: &DMatrix<f64>, w: &DMatrix<f64>, h: &DMatrix<f64>, epsilon: f64) -> DMatrix<f64> {
    let ht = h.transpose();
    let numer = f * &ht;
    let denom = w * (h * &ht);
    multiplicative(w, &numer, &denom, epsilon)
}

/// One multiplicative `H` step with the constrained basis held fixed.
pub fn update_h(f: &DMatrix<f64>, w: &DMatrix<f64>, h: &DMatrix<f64>, epsilon: f64) -> DMatrix<f64> {
    let wt = w.transpose();
    let numer = &wt * f;
    let denom = (&wt * w) * h;
    multiplicative(h, &numer, &denom, epsilon)
}

fn multiplicative(base: &DMatrix<f64>, numer: &DMatrix<f64>, denom: &DMatrix<f64>, epsilon: f64) -> DMatrix<f64> {
    base.zip_zip_map(numer, denom, |b, n, d| b * n / (d + epsilon))
}

/// Factorizes a raw pq×n matrix with the given T-A shape.
pub fn factorize(f: &DMatrix<f64>, p: usize, q: usize, cfg: &FactorizationConfig) -> Result<MetaBasis> {
    cfg.validate()?;
    if f.nrows() != p * q {
        return Err(Error::LengthMismatch {
            len: f.nrows(),
            p,
            q,
        });
    }
    if f.ncols() == 0 {
        return Err(Error::EmptyInput("forest matrix"));
    }
    check_entries(f.as_slice())?;
    let mean = f.mean();
    if mean <= 0.0 {
        return Err(Error::ZeroForest);
    }
    if cfg.rank > f.nrows().min(f.ncols()) {
        log::warn!(
            "rank {} exceeds min(pq, n) = {}; factors are not identifiable",
            cfg.rank,
            f.nrows().min(f.ncols())
        );
    }

    let mut best: Option<MetaBasis> = None;
    for restart in 0..cfg.restarts {
        let run = run_once(f, p, q, cfg, seed::derive(cfg.seed, restart as u64), restart)?;
        if best.as_ref().is_none_or(|b| run.objective() < b.objective()) {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}

fn run_once(
    f: &DMatrix<f64>,
    p: usize,
    q: usize,
    cfg: &FactorizationConfig,
    seed: u64,
    restart: usize,
) -> Result<MetaBasis> {
    let k = cfg.rank;
    let scale = libm::sqrt(f.mean() / k as f64);
    let mut rng = seed::rng(seed);
    // uniform on (0, 1]
    let mut draw = |_, _| (1.0 - rng.random::<f64>()) * scale;
    let mut w = DMatrix::from_fn(f.nrows(), k, &mut draw);
    let mut h = DMatrix::from_fn(k, f.ncols(), &mut draw);
    apply_tau(&mut w, p, q, cfg.lambda, cfg.pos_threshold);

    let mut trace = Vec::with_capacity(cfg.max_iters);
    let mut previous = residual_norm_sq(f, &w, &h);
    let mut stalled = 0;
    let mut converged = false;
    for sweep in 0..cfg.max_iters {
        w = update_w(f, &w, &h, cfg.epsilon);
        apply_tau(&mut w, p, q, cfg.lambda, cfg.pos_threshold);
        h = update_h(f, &w, &h, cfg.epsilon);

        let current = residual_norm_sq(f, &w, &h);
        if !current.is_finite() {
            return Err(Error::NonFinite { sweep });
        }
        trace.push(current);
        let change = libm::fabs(previous - current) / previous.max(f64::MIN_POSITIVE);
        previous = current;
        stalled = if change < cfg.rel_tol { stalled + 1 } else { 0 };
        if stalled >= STALL_SWEEPS {
            converged = true;
            break;
        }
    }
    Ok(MetaBasis {
        w,
        h,
        objective_trace: trace,
        converged,
        restart,
    })
}

/// Factorizes an assembled forest.
pub fn scnmf_factorize(forest: &ForestMatrix, cfg: &FactorizationConfig) -> Result<MetaBasis> {
    factorize(forest.data(), forest.p(), forest.q(), cfg)
}
