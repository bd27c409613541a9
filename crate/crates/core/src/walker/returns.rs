use num_complex::Complex64;
use serde::Serialize;

use crate::chain::{Chain, Dist};
use crate::error::{Error, Result};

/// `R_T(z) = Σ_{j<T} r_j z^j` with `r_j` the `j`-step return probability.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReturnPoly {
    pub coeffs: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CircleScan {
    pub radius: f64,
    /// Smallest `|R_T(z)|` seen on the circle.
    pub min_modulus: f64,
    /// Angle of the minimising sample.
    pub argmin_angle: f64,
    pub samples: usize,
}

/// `λ = 1/(K·T)`.
pub fn lambda(k: f64, horizon: usize) -> f64 {
    1.0 / (k * horizon as f64)
}

/// Exact return probabilities `r_0..r_{T−1}` of state `v`.
pub fn return_poly(c: &Chain, v: usize, horizon: usize) -> Result<ReturnPoly> {
    c.check_state(v)?;
    if horizon == 0 {
        return Err(Error::InvalidParam("horizon T must be at least 1".into()));
    }
    let n = c.n_states();
    let mut x = Dist::point(n, v).into_vec();
    let mut y = vec![0.0; n];
    let mut coeffs = Vec::with_capacity(horizon);
    coeffs.push(1.0);
    for _ in 1..horizon {
        c.push_forward(&x, &mut y);
        std::mem::swap(&mut x, &mut y);
        coeffs.push(x[v].min(1.0));
    }
    Ok(ReturnPoly { coeffs })
}

impl ReturnPoly {
    pub fn horizon(&self) -> usize {
        self.coeffs.len()
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// `R_T(1)`, the expected number of visits to the start before step `T`.
    pub fn at_one(&self) -> f64 {
        self.coeffs.iter().sum()
    }

    /// Minimum of `|R_T(z)|` over `samples` equally spaced points of `|z| = radius`.
    pub fn min_modulus_on_circle(&self, radius: f64, samples: usize) -> CircleScan {
        let samples = samples.max(1);
        let (mut best, mut arg) = (f64::INFINITY, 0.0);
        for k in 0..samples {
            let angle = std::f64::consts::TAU * k as f64 / samples as f64;
            let m = self.eval(Complex64::from_polar(radius, angle)).norm();
            if m < best {
                best = m;
                arg = angle;
            }
        }
        CircleScan {
            radius,
            min_modulus: best,
            argmin_angle: arg,
            samples,
        }
    }
}
