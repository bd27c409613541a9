use super::{Chain, Dist};
use crate::error::{Error, Result};

fn check(c: &Chain, start: &Dist, taboo: &[usize]) -> Result<()> {
    if start.len() != c.n_states() {
        return Err(Error::DimensionMismatch {
            expected: c.n_states(),
            got: start.len(),
        });
    }
    taboo.iter().try_for_each(|&v| c.check_state(v))
}

/// Probability that the walk from `start` is outside `taboo` at every step
/// of `from..=to`. An empty interval (`to < from`) gives 1.
pub fn avoid_prob(c: &Chain, start: &Dist, taboo: usize, from: usize, to: usize) -> Result<f64> {
    avoid_set_prob(c, start, &[taboo], from, to)
}

/// [`avoid_prob`] for a set of taboo states.
pub fn avoid_set_prob(
    c: &Chain,
    start: &Dist,
    taboo: &[usize],
    from: usize,
    to: usize,
) -> Result<f64> {
    if to < from {
        check(c, start, taboo)?;
        return Ok(1.0);
    }
    Ok(avoid_curve(c, start, taboo, from, &[to])?[0])
}

/// Avoidance probabilities over `from..=t` for each checkpoint `t`, sharing
/// one propagation. Checkpoints must be nondecreasing and at least `from`.
pub fn avoid_curve(
    c: &Chain,
    start: &Dist,
    taboo: &[usize],
    from: usize,
    checkpoints: &[usize],
) -> Result<Vec<f64>> {
    check(c, start, taboo)?;
    if checkpoints.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidParam("checkpoints must be nondecreasing".into()));
    }
    if checkpoints.first().is_some_and(|&t| t < from) {
        return Err(Error::InvalidParam(format!(
            "checkpoint {} precedes the interval start {from}",
            checkpoints[0]
        )));
    }
    let n = c.n_states();
    let mut is_taboo = vec![false; n];
    for &v in taboo {
        is_taboo[v] = true;
    }
    let mut x = start.probs().to_vec();
    let mut y = vec![0.0; n];
    for _ in 0..from {
        c.push_forward(&x, &mut y);
        std::mem::swap(&mut x, &mut y);
    }
    let kill = |x: &mut [f64]| {
        for &v in taboo {
            x[v] = 0.0;
        }
    };
    kill(&mut x);
    let mut t = from;
    let mut out = Vec::with_capacity(checkpoints.len());
    for &cp in checkpoints {
        while t < cp {
            c.push_forward(&x, &mut y);
            std::mem::swap(&mut x, &mut y);
            kill(&mut x);
            t += 1;
        }
        out.push(x.iter().sum::<f64>().clamp(0.0, 1.0));
    }
    Ok(out)
}

/// Tail sum `Σ_{s ≥ t} Pr(no visit to taboo during from..=s)`, truncated once
/// a term drops below `tol`. Fails with `NoConvergence` if that does not
/// happen within `max_steps` steps past `t`.
pub fn avoid_tail_sum(
    c: &Chain,
    start: &Dist,
    taboo: &[usize],
    from: usize,
    t: usize,
    tol: f64,
    max_steps: usize,
) -> Result<f64> {
    check(c, start, taboo)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidParam(format!("tail tolerance {tol} must be positive")));
    }
    let n = c.n_states();
    let mut x = start.probs().to_vec();
    let mut y = vec![0.0; n];
    let mut s = 0;
    let mut total = 0.0;
    loop {
        if s >= from {
            for &v in taboo {
                x[v] = 0.0;
            }
        }
        if s >= t {
            let term: f64 = x.iter().sum();
            total += term;
            if term < tol {
                return Ok(total);
            }
            if s - t >= max_steps {
                return Err(Error::NoConvergence {
                    iters: max_steps,
                    residual: term,
                });
            }
        }
        c.push_forward(&x, &mut y);
        std::mem::swap(&mut x, &mut y);
        s += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::chain_from;
    use crate::digraph::Digraph;

    #[test]
    fn deterministic_cycle() {
        let c = chain_from(&Digraph::cycle(3)).unwrap();
        let s = Dist::point(3, 0);
        assert_eq!(avoid_prob(&c, &s, 2, 0, 1).unwrap(), 1.0);
        assert_eq!(avoid_prob(&c, &s, 2, 0, 2).unwrap(), 0.0);
        assert_eq!(avoid_prob(&c, &s, 0, 0, 0).unwrap(), 0.0);
        assert_eq!(avoid_prob(&c, &s, 0, 3, 2).unwrap(), 1.0);
    }

    #[test]
    fn complete_three() {
        let c = chain_from(&Digraph::complete(3)).unwrap();
        let p = avoid_prob(&c, &Dist::point(3, 0), 2, 1, 2).unwrap();
        assert!((p - 0.25).abs() < 1e-15);
    }

    #[test]
    fn tail_sum_of_complete_three() {
        // From 0 avoiding 2 after step 0: each step stays off 2 w.p. 1/2.
        let c = chain_from(&Digraph::complete(3)).unwrap();
        let s = avoid_tail_sum(&c, &Dist::point(3, 0), &[2], 0, 0, 1e-18, 1000).unwrap();
        assert!((s - 2.0).abs() < 1e-15, "{s}");
        let s = avoid_tail_sum(&c, &Dist::point(3, 0), &[2], 0, 3, 1e-18, 1000).unwrap();
        assert!((s - 0.25).abs() < 1e-15, "{s}");
        let cyc = chain_from(&Digraph::cycle(3)).unwrap();
        assert!(avoid_tail_sum(&cyc, &Dist::point(3, 0), &[2], 5, 5, 1e-9, 10).is_ok());
    }

    #[test]
    fn curve_is_nonincreasing() {
        let g = Digraph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0), (1, 0), (2, 0)]).unwrap();
        let c = chain_from(&g).unwrap();
        let cps: Vec<usize> = (2..30).collect();
        let curve = avoid_curve(&c, &Dist::uniform(4), &[3], 2, &cps).unwrap();
        assert!(curve.windows(2).all(|w| w[1] <= w[0]));
        for (i, &t) in cps.iter().enumerate() {
            let single = avoid_prob(&c, &Dist::uniform(4), 3, 2, t).unwrap();
            assert_eq!(single, curve[i]);
        }
    }

    #[test]
    fn bad_checkpoints() {
        let c = chain_from(&Digraph::cycle(3)).unwrap();
        let s = Dist::point(3, 0);
        assert!(avoid_curve(&c, &s, &[1], 2, &[1]).is_err());
        assert!(avoid_curve(&c, &s, &[1], 0, &[3, 2]).is_err());
        assert!(avoid_curve(&c, &s, &[7], 0, &[3]).is_err());
    }
}
