//! Distances and means on signature vectors in the meta-tree cone.
//!
//! The working metric is the L1 distance. [`cone_path`] builds the
//! two-leg path through a consensus point on a line through the origin;
//! its Euclidean length [`dist_l2_path`] bounds the chord from above and
//! the L1 length of its legs bounds it in turn.

use alloc::vec::Vec;
use core::ops::Deref;

use crate::error::{Error, Result};

/// A tree's coordinates in the meta-tree cone: a nonnegative k-vector.
#[derive(Debug, Clone, PartialEq)]
pub struct SignatureVector(Vec<f64>);

impl SignatureVector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if let Some((index, &value)) = coords
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
        {
            return Err(Error::InvalidEntry { index, value });
        }
        Ok(Self(coords))
    }

    /// Wraps factorization output, which is nonnegative by construction.
    pub(crate) fn from_raw(coords: Vec<f64>) -> Self {
        debug_assert!(coords.iter().all(|v| *v >= 0.0));
        Self(coords)
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// `a·self + b·other` for nonnegative `a`, `b`; stays in the cone.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        same_dim(self, other)?;
        if !(a >= 0.0 && b >= 0.0) {
            return Err(Error::InvalidConfig("cone combinations need nonnegative weights".into()));
        }
        Self::new(self.0.iter().zip(&other.0).map(|(x, y)| a * x + b * y).collect())
    }
}

impl Deref for SignatureVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Distance used for affinities and K-means assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Metric {
    #[default]
    L1,
    L2Path,
    Euclid,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::L1 => "l1",
            Metric::L2Path => "l2path",
            Metric::Euclid => "euclid",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "l1" => Some(Metric::L1),
            "l2path" => Some(Metric::L2Path),
            "euclid" => Some(Metric::Euclid),
            _ => None,
        }
    }

    pub fn distance(self, h1: &SignatureVector, h2: &SignatureVector) -> Result<f64> {
        same_dim(h1, h2)?;
        Ok(self.eval(h1, h2))
    }

    /// Distance between equal-length nonnegative slices. Identical points
    /// are at distance zero under every metric, including the all-zero pair.
    pub(crate) fn eval(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Metric::L1 => l1(a, b),
            Metric::Euclid => l2(a, b),
            Metric::L2Path if a == b => 0.0,
            Metric::L2Path => path_between(a, b).map_or(0.0, |p| p.l2_length()),
        }
    }
}

fn same_dim(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() == b.len() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        })
    }
}

fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| libm::fabs(x - y)).sum()
}

fn l2(a: &[f64], b: &[f64]) -> f64 {
    libm::sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dist_l1(h1: &SignatureVector, h2: &SignatureVector) -> Result<f64> {
    same_dim(h1, h2)?;
    Ok(l1(h1, h2))
}

/// Plain Euclidean distance in coefficient space (the baseline metric).
pub fn dist_euclid(h1: &SignatureVector, h2: &SignatureVector) -> Result<f64> {
    same_dim(h1, h2)?;
    Ok(l2(h1, h2))
}

/// Path `h1 → c1 → c → c2 → h2` through a consensus point on a line through the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct ConePath {
    /// `[h1, c1, c, c2, h2]`
    pub waypoints: [Vec<f64>; 5],
    pub leg_lengths_l2: [f64; 4],
    pub leg_lengths_l1: [f64; 4],
}

impl ConePath {
    /// Two-segment length `sqrt(a1²+b1²) + sqrt(a2²+b2²)` over the Euclidean legs.
    pub fn l2_length(&self) -> f64 {
        let [a1, b1, a2, b2] = self.leg_lengths_l2;
        libm::hypot(a1, b1) + libm::hypot(a2, b2)
    }

    pub fn l1_length(&self) -> f64 {
        self.leg_lengths_l1.iter().sum()
    }
}

/// Builds the consensus path between two signature vectors.
///
/// The line `l_o` points along the componentwise minimum of `h1` and `h2`,
/// or along `h1 + h2` when they share no support. `c1`, `c2` are the
/// orthogonal projections onto the nonnegative ray and `c` their midpoint.
pub fn cone_path(h1: &SignatureVector, h2: &SignatureVector) -> Result<ConePath> {
    same_dim(h1, h2)?;
    path_between(h1, h2)
}

fn path_between(h1: &[f64], h2: &[f64]) -> Result<ConePath> {
    if h1.is_empty() {
        return Err(Error::EmptyInput("signature vector"));
    }
    let mut u: Vec<f64> = h1.iter().zip(h2.iter()).map(|(a, b)| a.min(*b)).collect();
    if u.iter().all(|&x| x == 0.0) {
        u = h1.iter().zip(h2.iter()).map(|(a, b)| a + b).collect();
    }
    // both endpoints at the apex: the path collapses to a point
    let uu = dot(&u, &u);
    let project = |h: &[f64]| -> Vec<f64> {
        let t = if uu == 0.0 { 0.0 } else { (dot(h, &u) / uu).max(0.0) };
        u.iter().map(|x| t * x).collect()
    };
    let c1 = project(h1);
    let c2 = project(h2);
    let c: Vec<f64> = c1.iter().zip(&c2).map(|(a, b)| 0.5 * (a + b)).collect();
    let waypoints = [h1.to_vec(), c1, c, c2, h2.to_vec()];
    let mut leg_lengths_l2 = [0.0; 4];
    let mut leg_lengths_l1 = [0.0; 4];
    for leg in 0..4 {
        leg_lengths_l2[leg] = l2(&waypoints[leg], &waypoints[leg + 1]);
        leg_lengths_l1[leg] = l1(&waypoints[leg], &waypoints[leg + 1]);
    }
    Ok(ConePath {
        waypoints,
        leg_lengths_l2,
        leg_lengths_l1,
    })
}

/// Length of the consensus path measured with Euclidean leg distances.
pub fn dist_l2_path(h1: &SignatureVector, h2: &SignatureVector) -> Result<f64> {
    Ok(cone_path(h1, h2)?.l2_length())
}

/// Ratio of the four-leg sum to the two-segment length of an unfolded path.
/// Bounded above by √2, attained at `a1 = b1`, `a2 = b2`.
pub fn cone_ratio(a1: f64, b1: f64, a2: f64, b2: f64) -> Result<f64> {
    let legs = [a1, b1, a2, b2];
    if let Some((index, &value)) = legs
        .iter()
        .enumerate()
        .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
    {
        return Err(Error::InvalidEntry { index, value });
    }
    let denom = libm::hypot(a1, b1) + libm::hypot(a2, b2);
    if denom == 0.0 {
        return Err(Error::EmptyInput("path legs"));
    }
    Ok((a1 + b1 + a2 + b2) / denom)
}

/// Fréchet mean by weighted midpoints: the `i`-th point is folded in as
/// `m ← ((i − 1)·m + h_i) / i`.
pub fn frechet_mean(points: &[SignatureVector]) -> Result<SignatureVector> {
    let (first, rest) = points.split_first().ok_or(Error::EmptyInput("point set"))?;
    let mut mean = first.0.clone();
    for (i, h) in rest.iter().enumerate() {
        same_dim(first, h)?;
        let n = (i + 2) as f64;
        for (m, x) in mean.iter_mut().zip(h.iter()) {
            *m = ((n - 1.0) * *m + x) / n;
        }
    }
    Ok(SignatureVector(mean))
}
