use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{Chain, Dist};
use crate::error::{Error, Result};

/// Largest chain handled by [`stationary_dense`].
pub const DENSE_LIMIT: usize = 2000;

/// Iterations between stagnation checks.
const WINDOW: usize = 32;

#[derive(Clone, Debug, Serialize)]
pub struct Stationary {
    pub pi: Dist,
    /// `‖πP − π‖₁` of the returned vector.
    pub residual: f64,
    pub iterations: usize,
    /// Whether consecutive iterates were averaged to break periodicity.
    pub averaged: bool,
}

/// Stationary distribution by power iteration from the uniform start.
///
/// If the residual stops shrinking (a periodic chain), the iteration switches
/// to averaging each iterate with its image. The chain itself is unchanged.
pub fn stationary(c: &Chain, tol: f64, max_iters: usize) -> Result<Stationary> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParam(format!("tol = {tol} must be positive")));
    }
    if !c.is_irreducible() {
        return Err(Error::NotStronglyConnected);
    }
    let n = c.n_states();
    let mut x = vec![1.0 / n as f64; n];
    let mut y = vec![0.0; n];
    let mut averaged = false;
    let mut history: Vec<f64> = Vec::new();
    let mut residual = f64::INFINITY;

    for it in 0..max_iters {
        c.push_forward(&x, &mut y);
        residual = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).sum();
        if residual <= tol {
            return Ok(Stationary {
                pi: Dist::from_raw(x),
                residual,
                iterations: it,
                averaged,
            });
        }
        history.push(residual);
        if !averaged && it >= WINDOW && residual > 0.9 * history[it - WINDOW] {
            averaged = true;
        }
        if averaged {
            for (a, b) in x.iter_mut().zip(&y) {
                *a = 0.5 * (*a + b);
            }
        } else {
            std::mem::swap(&mut x, &mut y);
        }
        let s: f64 = x.iter().sum();
        x.iter_mut().for_each(|a| *a /= s);
    }
    Err(Error::NoConvergence {
        iters: max_iters,
        residual,
    })
}

/// Stationary distribution by a dense linear solve, for cross-checking.
///
/// Solves `π(P − I) = 0` with one balance equation replaced by `Σπ = 1`.
pub fn stationary_dense(c: &Chain) -> Result<Dist> {
    let n = c.n_states();
    if n > DENSE_LIMIT {
        return Err(Error::InvalidParam(format!(
            "dense solve limited to {DENSE_LIMIT} states, got {n}"
        )));
    }
    if !c.is_irreducible() {
        return Err(Error::NotStronglyConnected);
    }
    // Row y of A is the balance equation for π_y: Σ_x π_x P(x,y) − π_y = 0.
    let mut a = DMatrix::<f64>::zeros(n, n);
    for x in 0..n {
        let (t, p) = c.row(x);
        for (&y, &q) in t.iter().zip(p) {
            a[(y, x)] += q;
        }
        a[(x, x)] -= 1.0;
    }
    for x in 0..n {
        a[(n - 1, x)] = 1.0;
    }
    let mut b = DVector::<f64>::zeros(n);
    b[n - 1] = 1.0;
    let sol = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::InvalidParam("singular balance system".into()))?;
    let v: Vec<f64> = sol.iter().map(|&p| p.max(0.0)).collect();
    let s: f64 = v.iter().sum();
    Ok(Dist::from_raw(v.into_iter().map(|p| p / s).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{chain_from, step};
    use crate::digraph::{generate, Digraph, GenParams};

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn cycles_are_uniform() {
        for n in [2, 4, 7] {
            let c = chain_from(&Digraph::cycle(n)).unwrap();
            let s = stationary(&c, 1e-12, 10_000).unwrap();
            assert_close(s.pi.probs(), &vec![1.0 / n as f64; n], 1e-12);
        }
    }

    #[test]
    fn hand_solved_three_vertex() {
        let g = Digraph::from_edges(3, [(0, 1), (1, 2), (2, 0), (1, 0)]).unwrap();
        let c = chain_from(&g).unwrap();
        let s = stationary(&c, 1e-13, 10_000).unwrap();
        assert!(s.residual <= 1e-13);
        assert_close(s.pi.probs(), &[0.4, 0.4, 0.2], 1e-12);
        assert_close(stationary_dense(&c).unwrap().probs(), &[0.4, 0.4, 0.2], 1e-14);
    }

    #[test]
    fn periodic_chain_converges_by_averaging() {
        // Period 2 with sides {0} and {1, 2}: the uniform start puts a third
        // of the mass on the side that should hold half.
        let g = Digraph::from_edges(3, [(0, 1), (0, 2), (1, 0), (2, 0)]).unwrap();
        let c = chain_from(&g).unwrap();
        let s = stationary(&c, 1e-12, 100_000).unwrap();
        assert!(s.averaged);
        let exact = stationary_dense(&c).unwrap();
        assert_close(s.pi.probs(), exact.probs(), 1e-11);
        let next = step(&c, &s.pi).unwrap();
        assert!(next.l1_distance(&s.pi) <= 1e-12);
    }

    #[test]
    fn not_strongly_connected() {
        let g = Digraph::from_edges(3, [(0, 1), (1, 0), (2, 0)]).unwrap();
        let c = chain_from(&g).unwrap();
        assert_eq!(stationary(&c, 1e-12, 100).unwrap_err(), Error::NotStronglyConnected);
    }

    #[test]
    fn iteration_cap_reports_residual() {
        let g = generate(&GenParams::with_d(200, 3.0, 1).unwrap());
        let c = chain_from(&g).unwrap();
        match stationary(&c, 1e-15, 2) {
            Err(Error::NoConvergence { iters: 2, residual }) => assert!(residual > 0.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn power_iteration_matches_dense_on_random_graph() {
        let g = generate(&GenParams::with_d(300, 3.0, 9).unwrap());
        let c = chain_from(&g).unwrap();
        let s = stationary(&c, 1e-13, 100_000).unwrap();
        let d = stationary_dense(&c).unwrap();
        assert!(s.pi.max_abs_diff(&d) < 1e-12);
    }
}
