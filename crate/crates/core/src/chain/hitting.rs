use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{Chain, DENSE_LIMIT};
use crate::error::{Error, Result};

/// Required residual of the hitting-time equations.
const RESIDUAL_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HitTime {
    Finite(f64),
    /// The target is not reached with probability one.
    Infinite,
}

impl HitTime {
    pub fn finite(self) -> Option<f64> {
        match self {
            HitTime::Finite(h) => Some(h),
            HitTime::Infinite => None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HittingTimes {
    pub target: usize,
    pub times: Vec<HitTime>,
    /// Max absolute residual of `h(x) = 1 + Σ_y P(x,y) h(y)` over finite states.
    pub residual: f64,
}

/// Expected steps to reach `target` from every state.
///
/// A state has a finite hitting time iff the target is reachable from every
/// state it can reach while avoiding the target. Other states are flagged.
pub fn hitting_time(c: &Chain, target: usize) -> Result<HittingTimes> {
    c.check_state(target)?;
    let n = c.n_states();

    // States that can reach the target.
    let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
    for u in 0..n {
        for &v in c.row(u).0 {
            rev[v].push(u);
        }
    }
    let mut reaches = vec![false; n];
    reaches[target] = true;
    let mut stack = vec![target];
    while let Some(v) = stack.pop() {
        for &u in &rev[v] {
            if !reaches[u] {
                reaches[u] = true;
                stack.push(u);
            }
        }
    }
    // Non-target states from which the walk can reach a "bad" state while
    // avoiding the target are infinite. Propagate badness backwards.
    let mut finite = reaches.clone();
    let mut stack: Vec<usize> = (0..n).filter(|&u| !reaches[u]).collect();
    while let Some(v) = stack.pop() {
        for &u in &rev[v] {
            if u != target && finite[u] {
                finite[u] = false;
                stack.push(u);
            }
        }
    }

    // Unknowns: finite states other than the target.
    let unknowns: Vec<usize> = (0..n).filter(|&u| finite[u] && u != target).collect();
    let mut pos = vec![usize::MAX; n];
    for (i, &u) in unknowns.iter().enumerate() {
        pos[u] = i;
    }
    let k = unknowns.len();
    let mut h = vec![0.0; n];
    if k > 0 {
        let sol = if k <= DENSE_LIMIT {
            solve_dense(c, &unknowns, &pos)?
        } else {
            solve_gauss_seidel(c, &unknowns, &pos)?
        };
        for (i, &u) in unknowns.iter().enumerate() {
            h[u] = sol[i];
        }
    }

    let residual = unknowns
        .iter()
        .map(|&u| {
            let (t, p) = c.row(u);
            let rhs: f64 = 1.0 + t.iter().zip(p).map(|(&v, &q)| q * h[v]).sum::<f64>();
            (h[u] - rhs).abs() / h[u].max(1.0)
        })
        .fold(0.0, f64::max);

    let times = (0..n)
        .map(|u| if finite[u] { HitTime::Finite(h[u]) } else { HitTime::Infinite })
        .collect();
    Ok(HittingTimes {
        target,
        times,
        residual,
    })
}

fn solve_dense(c: &Chain, unknowns: &[usize], pos: &[usize]) -> Result<Vec<f64>> {
    let k = unknowns.len();
    let mut a = DMatrix::<f64>::identity(k, k);
    for (i, &u) in unknowns.iter().enumerate() {
        let (t, p) = c.row(u);
        for (&v, &q) in t.iter().zip(p) {
            if pos[v] != usize::MAX {
                a[(i, pos[v])] -= q;
            }
        }
    }
    let b = DVector::<f64>::from_element(k, 1.0);
    let lu = a.clone().lu();
    let mut x = lu
        .solve(&b)
        .ok_or_else(|| Error::InvalidParam("singular hitting-time system".into()))?;
    // One step of iterative refinement.
    let r = &b - &a * &x;
    if let Some(dx) = lu.solve(&r) {
        x += dx;
    }
    Ok(x.iter().copied().collect())
}

fn solve_gauss_seidel(c: &Chain, unknowns: &[usize], pos: &[usize]) -> Result<Vec<f64>> {
    let k = unknowns.len();
    let mut x = vec![0.0; k];
    let max_sweeps = 1_000_000 / k.max(1) + 10_000;
    let mut change = f64::INFINITY;
    for _ in 0..max_sweeps {
        change = 0.0;
        for (i, &u) in unknowns.iter().enumerate() {
            let (t, p) = c.row(u);
            let mut self_p = 0.0;
            let mut acc = 1.0;
            for (&v, &q) in t.iter().zip(p) {
                match pos[v] {
                    usize::MAX => {}
                    j if j == i => self_p += q,
                    j => acc += q * x[j],
                }
            }
            let new = acc / (1.0 - self_p);
            change = f64::max(change, (new - x[i]).abs() / new.max(1.0));
            x[i] = new;
        }
        if change <= RESIDUAL_TOL * 1e-3 {
            return Ok(x);
        }
    }
    Err(Error::NoConvergence {
        iters: max_sweeps,
        residual: change,
    })
}

/// Oracle: `Σ_t t·Pr(first hit at t)` from substochastic powers, stopped once
/// the surviving mass is below `mass_tol`. Returns `None` for states whose
/// mass does not drain within `max_steps`.
pub fn hitting_time_series(
    c: &Chain,
    target: usize,
    mass_tol: f64,
    max_steps: usize,
) -> Result<Vec<Option<f64>>> {
    c.check_state(target)?;
    let n = c.n_states();
    let mut out = Vec::with_capacity(n);
    let mut y = vec![0.0; n];
    for s in 0..n {
        if s == target {
            out.push(Some(0.0));
            continue;
        }
        let mut x = vec![0.0; n];
        x[s] = 1.0;
        let mut acc = 0.0;
        let mut alive = 1.0;
        let mut t = 0;
        while alive > mass_tol && t < max_steps {
            c.push_forward(&x, &mut y);
            std::mem::swap(&mut x, &mut y);
            t += 1;
            acc += t as f64 * x[target];
            x[target] = 0.0;
            alive = x.iter().sum();
        }
        out.push(if alive <= mass_tol { Some(acc) } else { None });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::chain_from;
    use crate::digraph::Digraph;

    fn finite(h: &HittingTimes) -> Vec<f64> {
        h.times.iter().map(|t| t.finite().unwrap()).collect()
    }

    #[test]
    fn cycle_and_chords() {
        let c = chain_from(&Digraph::cycle(3)).unwrap();
        let h = hitting_time(&c, 2).unwrap();
        assert_eq!(finite(&h), vec![2.0, 1.0, 0.0]);
        let g = Digraph::from_edges(3, [(0, 1), (1, 2), (2, 0), (1, 0)]).unwrap();
        let h = hitting_time(&chain_from(&g).unwrap(), 2).unwrap();
        let v = finite(&h);
        assert!((v[0] - 4.0).abs() < 1e-12 && (v[1] - 3.0).abs() < 1e-12);
        assert!(h.residual <= RESIDUAL_TOL);
    }

    #[test]
    fn unreachable_is_flagged() {
        // 0 <-> 1, 1 -> 2 -> 3 <-> 4: from 3 and 4 the target 0 is unreachable,
        // and from 0, 1, 2 the walk can escape into {3, 4}.
        let g = Digraph::from_edges(5, [(0, 1), (1, 0), (1, 2), (2, 3), (3, 4), (4, 3)]).unwrap();
        let h = hitting_time(&chain_from(&g).unwrap(), 0).unwrap();
        assert_eq!(h.times[0], HitTime::Finite(0.0));
        assert!(h.times[1..].iter().all(|&t| t == HitTime::Infinite));
        let h = hitting_time(&chain_from(&g).unwrap(), 3).unwrap();
        assert!(h.times.iter().all(|t| t.finite().is_some()));
    }

    #[test]
    fn reset_cycle_doubles() {
        let mut prev = 0.0;
        for n in 8..=12 {
            let c = chain_from(&Digraph::reset_cycle(n)).unwrap();
            let h = hitting_time(&c, n - 1).unwrap();
            let h0 = h.times[0].finite().unwrap();
            assert!(h0 >= 2f64.powi(n as i32 - 2), "n={n}: {h0}");
            if prev > 0.0 {
                assert!(h0 / prev >= 1.9, "n={n}: ratio {}", h0 / prev);
            }
            prev = h0;
        }
    }

    #[test]
    fn matches_series_oracle_on_small_chains() {
        let g = Digraph::from_edges(4, [(0, 1), (0, 2), (1, 2), (2, 0), (2, 3), (3, 1)]).unwrap();
        let c = chain_from(&g).unwrap();
        for target in 0..4 {
            let exact = hitting_time(&c, target).unwrap();
            let series = hitting_time_series(&c, target, 1e-12, 1_000_000).unwrap();
            for (e, s) in exact.times.iter().zip(&series) {
                assert!((e.finite().unwrap() - s.unwrap()).abs() < 1e-6);
            }
        }
    }
}
