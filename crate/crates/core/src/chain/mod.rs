//! Exact Markov-chain computations for the simple random walk on a digraph.
//!
//! A [`Chain`] is a sparse row-stochastic operator. Plain chains come from
//! [`chain_from`] and move uniformly to an out-neighbour; [`contract`] merges
//! two states of a plain chain into a supernode.

mod avoid;
mod contract;
mod dist;
mod hitting;
mod mixing;
mod stationary;

pub use avoid::{avoid_curve, avoid_prob, avoid_set_prob, avoid_tail_sum};
pub use contract::{contract, contracted_index};
pub use dist::{Dist, DIST_SUM_TOL};
pub use hitting::{hitting_time, hitting_time_series, HitTime, HittingTimes};
pub use mixing::{default_threshold, mixing, MixOptions, MixReport, Sources};
pub use stationary::{stationary, stationary_dense, Stationary, DENSE_LIMIT};

use serde::Serialize;

use crate::digraph::Digraph;
use crate::error::{Error, Result};

/// Row sums must be 1 within this tolerance.
pub const ROW_SUM_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Origin {
    Plain,
    /// States `v` and `w` of the parent chain were merged into `sigma`.
    Contracted { v: usize, w: usize, sigma: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Chain {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    probs: Vec<f64>,
    origin: Origin,
}

/// Transition chain of the simple random walk on `g`.
pub fn chain_from(g: &Digraph) -> Result<Chain> {
    let n = g.n();
    let mut offsets = Vec::with_capacity(n + 1);
    offsets.push(0);
    let mut targets = Vec::with_capacity(g.edge_count());
    let mut probs = Vec::with_capacity(g.edge_count());
    for u in 0..n {
        let outs = g.out_neighbors(u);
        if outs.is_empty() {
            return Err(Error::Sink(u));
        }
        let p = 1.0 / outs.len() as f64;
        targets.extend_from_slice(outs);
        probs.extend(std::iter::repeat(p).take(outs.len()));
        offsets.push(targets.len());
    }
    Ok(Chain {
        offsets,
        targets,
        probs,
        origin: Origin::Plain,
    })
}

/// One application of the transition operator.
pub fn step(c: &Chain, d: &Dist) -> Result<Dist> {
    if d.len() != c.n_states() {
        return Err(Error::DimensionMismatch {
            expected: c.n_states(),
            got: d.len(),
        });
    }
    let mut out = vec![0.0; c.n_states()];
    c.push_forward(d.probs(), &mut out);
    Ok(Dist::from_raw(out))
}

/// The law after `t` steps, `d·Pᵗ`.
pub fn step_n(c: &Chain, d: &Dist, t: usize) -> Result<Dist> {
    if t == 0 {
        step(c, d)?;
        return Ok(d.clone());
    }
    let mut x = step(c, d)?.into_vec();
    let mut y = vec![0.0; x.len()];
    for _ in 1..t {
        c.push_forward(&x, &mut y);
        std::mem::swap(&mut x, &mut y);
    }
    Ok(Dist::from_raw(x))
}

impl Chain {
    /// Builds a chain from explicit rows, merging repeated targets.
    pub fn from_rows(rows: Vec<Vec<(usize, f64)>>, origin: Origin) -> Result<Self> {
        let n = rows.len();
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let mut targets = Vec::new();
        let mut probs = Vec::new();
        for (u, mut row) in rows.into_iter().enumerate() {
            row.sort_by_key(|&(t, _)| t);
            let start = targets.len();
            for (t, p) in row {
                if t >= n {
                    return Err(Error::VertexOutOfRange { vertex: t, n });
                }
                if !(p > 0.0 && p <= 1.0) {
                    return Err(Error::InvalidParam(format!(
                        "row {u}: probability {p} for target {t} is not in (0, 1]"
                    )));
                }
                if targets.len() > start && *targets.last().unwrap() == t {
                    *probs.last_mut().unwrap() += p;
                } else {
                    targets.push(t);
                    probs.push(p);
                }
            }
            let sum: f64 = probs[start..].iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::InvalidParam(format!("row {u} sums to {sum}")));
            }
            offsets.push(targets.len());
        }
        Ok(Self {
            offsets,
            targets,
            probs,
            origin,
        })
    }

    pub fn n_states(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn origin(&self) -> Origin {
        self.origin
    }

    /// Number of stored transitions.
    pub fn nnz(&self) -> usize {
        self.targets.len()
    }

    /// Targets of state `u` (ascending) and their probabilities.
    #[inline]
    pub fn row(&self, u: usize) -> (&[usize], &[f64]) {
        let r = self.offsets[u]..self.offsets[u + 1];
        (&self.targets[r.clone()], &self.probs[r])
    }

    pub fn prob(&self, u: usize, v: usize) -> f64 {
        let (t, p) = self.row(u);
        t.binary_search(&v).map(|i| p[i]).unwrap_or(0.0)
    }

    pub fn check_state(&self, u: usize) -> Result<()> {
        if u < self.n_states() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange {
                vertex: u,
                n: self.n_states(),
            })
        }
    }

    /// `dst = src P` for any nonnegative (possibly substochastic) vector.
    #[inline]
    pub(crate) fn push_forward(&self, src: &[f64], dst: &mut [f64]) {
        dst.iter_mut().for_each(|x| *x = 0.0);
        for (u, &mass) in src.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            let (t, p) = self.row(u);
            for (&v, &q) in t.iter().zip(p) {
                dst[v] += mass * q;
            }
        }
    }

    /// True iff every state reaches every other through positive transitions.
    pub fn is_irreducible(&self) -> bool {
        let n = self.n_states();
        if n == 0 {
            return false;
        }
        let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
        for u in 0..n {
            for &v in self.row(u).0 {
                rev[v].push(u);
            }
        }
        let reach = |next: &dyn Fn(usize) -> Vec<usize>| {
            let mut seen = vec![false; n];
            let mut stack = vec![0];
            seen[0] = true;
            let mut count = 1;
            while let Some(u) = stack.pop() {
                for v in next(u) {
                    if !seen[v] {
                        seen[v] = true;
                        count += 1;
                        stack.push(v);
                    }
                }
            }
            count == n
        };
        reach(&|u| self.row(u).0.to_vec()) && reach(&|u| rev[u].clone())
    }

    /// Writes `n nnz` then one `u v prob` line per transition.
    pub fn write_text<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{} {}", self.n_states(), self.nnz())?;
        for u in 0..self.n_states() {
            let (t, p) = self.row(u);
            for (&v, &q) in t.iter().zip(p) {
                writeln!(out, "{u} {v} {q:e}")?;
            }
        }
        out.flush()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_rows() {
        let c = chain_from(&Digraph::cycle(3)).unwrap();
        for u in 0..3 {
            assert_eq!(c.row(u), (&[(u + 1) % 3][..], &[1.0][..]));
        }
        let g = Digraph::from_edges(3, [(0, 1), (1, 2), (2, 0), (1, 0)]).unwrap();
        let c = chain_from(&g).unwrap();
        assert_eq!(c.row(1), (&[0, 2][..], &[0.5, 0.5][..]));
        assert_eq!(c.prob(1, 1), 0.0);
    }

    #[test]
    fn sink_is_an_error() {
        let g = Digraph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(chain_from(&g).unwrap_err(), Error::Sink(2));
    }

    #[test]
    fn step_n_matches_repeated_steps() {
        let c = chain_from(&Digraph::complete(4)).unwrap();
        let d = Dist::point(4, 0);
        assert_eq!(step_n(&c, &d, 0).unwrap(), d);
        let mut e = d.clone();
        for _ in 0..5 {
            e = step(&c, &e).unwrap();
        }
        assert_eq!(step_n(&c, &d, 5).unwrap(), e);
    }

    #[test]
    fn step_examples() {
        let c = chain_from(&Digraph::cycle(3)).unwrap();
        assert_eq!(step(&c, &Dist::point(3, 0)).unwrap(), Dist::point(3, 1));
        let c2 = chain_from(&Digraph::cycle(2)).unwrap();
        assert_eq!(step(&c2, &Dist::uniform(2)).unwrap(), Dist::uniform(2));
        assert!(step(&c2, &Dist::uniform(3)).is_err());
    }

    #[test]
    fn from_rows_validates() {
        assert!(Chain::from_rows(vec![vec![(0, 0.5)]], Origin::Plain).is_err());
        assert!(Chain::from_rows(vec![vec![(1, 1.0)]], Origin::Plain).is_err());
        let c = Chain::from_rows(vec![vec![(1, 0.5), (0, 0.25), (1, 0.25)], vec![(0, 1.0)]], Origin::Plain)
            .unwrap();
        assert_eq!(c.row(0), (&[0, 1][..], &[0.25, 0.75][..]));
        assert!(c.is_irreducible());
    }

    #[test]
    fn irreducibility() {
        let g = Digraph::from_edges(4, [(0, 1), (1, 0), (2, 3), (3, 2)]).unwrap();
        assert!(!chain_from(&g).unwrap().is_irreducible());
        assert!(chain_from(&Digraph::cycle(5)).unwrap().is_irreducible());
    }
}
