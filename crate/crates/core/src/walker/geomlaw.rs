use serde::Serialize;

use super::returns::return_poly;
use crate::chain::{avoid_curve, Chain, Dist};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GeomLawRow {
    pub t: usize,
    pub exact_avoid: f64,
    pub geometric_pred: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeomLawTable {
    pub v: usize,
    pub start: usize,
    pub horizon: usize,
    pub pi_v: f64,
    /// `R_T(1)`.
    pub r_v: f64,
    /// `π_v / R_v`.
    pub p_v: f64,
    pub rows: Vec<GeomLawRow>,
    /// Every exact value is 0 or 1, so the walk is deterministic near `v` and
    /// the ratios carry no information.
    pub degenerate: bool,
}

/// Compares the exact probability of avoiding `v` over steps `T..=t` (walk
/// from `start`) with the geometric law `(1 + p_v)^{−(t−T)}`.
pub fn geometric_law_check(
    c: &Chain,
    pi: &Dist,
    v: usize,
    start: usize,
    horizon: usize,
    t_grid: &[usize],
) -> Result<GeomLawTable> {
    if pi.len() != c.n_states() {
        return Err(Error::DimensionMismatch {
            expected: c.n_states(),
            got: pi.len(),
        });
    }
    c.check_state(start)?;
    let mut grid = t_grid.to_vec();
    grid.sort_unstable();
    grid.dedup();
    let r_v = return_poly(c, v, horizon)?.at_one();
    let pi_v = pi[v];
    let p_v = pi_v / r_v;
    let exact = avoid_curve(c, &Dist::point(c.n_states(), start), &[v], horizon, &grid)?;
    let rows: Vec<GeomLawRow> = grid
        .iter()
        .zip(exact)
        .map(|(&t, exact_avoid)| {
            let geometric_pred = (-((t - horizon) as f64) * p_v.ln_1p()).exp();
            GeomLawRow {
                t,
                exact_avoid,
                geometric_pred,
                ratio: exact_avoid / geometric_pred,
            }
        })
        .collect();
    let degenerate = rows
        .iter()
        .all(|r| r.exact_avoid == 0.0 || r.exact_avoid == 1.0);
    Ok(GeomLawTable {
        v,
        start,
        horizon,
        pi_v,
        r_v,
        p_v,
        rows,
        degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{chain_from, stationary};
    use crate::digraph::Digraph;

    #[test]
    fn cycle_is_degenerate() {
        let c = chain_from(&Digraph::cycle(6)).unwrap();
        let pi = Dist::uniform(6);
        let t = geometric_law_check(&c, &pi, 3, 0, 2, &[2, 3, 4, 8]).unwrap();
        assert!(t.degenerate);
        assert_eq!(t.rows[0].exact_avoid, 1.0);
        assert_eq!(t.rows[1].exact_avoid, 0.0);
    }

    #[test]
    fn at_horizon_exact_is_one_minus_occupancy() {
        let c = chain_from(&Digraph::complete(5)).unwrap();
        let pi = stationary(&c, 1e-14, 1000).unwrap().pi;
        let t = geometric_law_check(&c, &pi, 4, 0, 3, &[3, 10]).unwrap();
        assert!(!t.degenerate);
        // P_0^{(3)}(4) on K_5 is (1 − (−1/4)^3) / 5.
        let occ = (1.0 + 1.0 / 64.0) / 5.0;
        assert!((t.rows[0].exact_avoid - (1.0 - occ)).abs() < 1e-15);
        assert_eq!(t.rows[0].geometric_pred, 1.0);
    }
}
