use serde::Serialize;

use crate::error::{Error, Result};

/// Sum tolerance for a probability vector.
pub const DIST_SUM_TOL: f64 = 1e-12;

/// A probability vector over chain states.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Dist(Vec<f64>);

impl Dist {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if let Some((i, &p)) = probs.iter().enumerate().find(|(_, &p)| !(p >= 0.0)) {
            return Err(Error::InvalidParam(format!("entry {i} = {p} is not a probability")));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > DIST_SUM_TOL {
            return Err(Error::InvalidParam(format!("entries sum to {sum}, not 1")));
        }
        Ok(Self(probs))
    }

    /// Wraps a vector that is a distribution up to rounding.
    pub(crate) fn from_raw(probs: Vec<f64>) -> Self {
        debug_assert!(probs.iter().all(|&p| p >= 0.0));
        Self(probs)
    }

    pub fn point(n: usize, i: usize) -> Self {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        Self(v)
    }

    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn l1_distance(&self, other: &Dist) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a - b).abs()).sum()
    }

    /// Variation distance, half the L1 distance.
    pub fn tv_distance(&self, other: &Dist) -> f64 {
        0.5 * self.l1_distance(other)
    }

    pub fn max_abs_diff(&self, other: &Dist) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Index<usize> for Dist {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}
