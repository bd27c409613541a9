use rand::seq::index::sample;
use rayon::prelude::*;
use serde::Serialize;

use super::{Chain, Dist};
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// `min(n⁻³, 1e-9)`: `n⁻³` is below float noise only for large `n`.
pub fn default_threshold(n: usize) -> f64 {
    (n as f64).powi(-3).min(1e-9)
}

/// Which point masses are propagated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sources {
    All,
    /// `count` distinct vertices chosen with `seed`.
    Sampled { count: usize, seed: u64 },
}

#[derive(Clone, Debug)]
pub struct MixOptions {
    pub threshold: f64,
    pub sources: Sources,
    /// Cap on the sources entering the pairwise `d̄` computation. When the
    /// source set is larger, a seeded subset of this size is used.
    pub dbar_sources: Option<usize>,
    pub step_cap: usize,
    pub seed: u64,
}

impl MixOptions {
    pub fn new(n: usize) -> Self {
        Self {
            threshold: default_threshold(n),
            sources: if n > 5000 {
                Sources::Sampled { count: 64, seed: 0 }
            } else {
                Sources::All
            },
            dbar_sources: if n > 500 { Some(64) } else { None },
            step_cap: 10_000,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MixReport {
    /// Smallest `t` with `max_u max_x |P_u^t(x) − π_x| ≤ threshold`.
    pub t: usize,
    pub threshold: f64,
    /// `d(t)` for `t = 0..=T`: the max entrywise deviation over the sources.
    pub d_trace: Vec<f64>,
    /// `d̄(t)` for `t = 0..=T`: max pairwise variation distance.
    pub dbar_trace: Vec<f64>,
    pub sources: Vec<usize>,
    pub sampled: bool,
    pub dbar_sources: Vec<usize>,
    /// True when `d̄` was taken over all pairs of all states.
    pub dbar_exhaustive: bool,
}

impl MixReport {
    /// Pairs `(s, t)` with `d̄(s+t) > d̄(s)·d̄(t)·(1 + rel) + abs`.
    ///
    /// `abs` absorbs rounding once `d̄` nears the float noise floor.
    pub fn submultiplicativity_violations(&self, rel: f64, abs: f64) -> Vec<(usize, usize)> {
        let d = &self.dbar_trace;
        let mut bad = Vec::new();
        for s in 1..d.len() {
            for t in s..d.len() - s {
                if d[s + t] > d[s] * d[t] * (1.0 + rel) + abs {
                    bad.push((s, t));
                }
            }
        }
        bad
    }

    /// Steps where `d(t) > d̄(t)`. Meaningful only when `dbar_exhaustive`.
    pub fn deviation_bound_violations(&self, slack: f64) -> Vec<usize> {
        (0..self.d_trace.len())
            .filter(|&t| self.d_trace[t] > self.dbar_trace[t] * (1.0 + slack) + f64::EPSILON)
            .collect()
    }
}

fn max_dev(x: &[f64], pi: &[f64]) -> f64 {
    x.iter().zip(pi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

fn max_pairwise_tv(rows: &[Vec<f64>], idx: &[usize]) -> f64 {
    (0..idx.len())
        .into_par_iter()
        .map(|i| {
            let a = &rows[idx[i]];
            idx[i + 1..]
                .iter()
                .map(|&j| {
                    0.5 * a.iter().zip(&rows[j]).map(|(x, y)| (x - y).abs()).sum::<f64>()
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

/// Mixing time by propagating point masses until every source is within
/// `threshold` of `π` in every coordinate.
pub fn mixing(c: &Chain, pi: &Dist, opts: &MixOptions) -> Result<MixReport> {
    let n = c.n_states();
    if pi.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: pi.len(),
        });
    }
    if !(opts.threshold > 0.0) {
        return Err(Error::InvalidParam(format!(
            "threshold = {} must be positive",
            opts.threshold
        )));
    }
    let (sources, sampled) = match opts.sources {
        Sources::All => ((0..n).collect::<Vec<_>>(), false),
        Sources::Sampled { count, seed } if count < n => {
            let mut s = sample(&mut rng_from_seed(seed), n, count).into_vec();
            s.sort_unstable();
            (s, true)
        }
        Sources::Sampled { .. } => ((0..n).collect(), false),
    };
    // Positions within `sources` used for d̄.
    let dbar_idx: Vec<usize> = match opts.dbar_sources {
        Some(k) if k < sources.len() => {
            let mut s = sample(&mut rng_from_seed(opts.seed ^ 0xD8A5), sources.len(), k).into_vec();
            s.sort_unstable();
            s
        }
        _ => (0..sources.len()).collect(),
    };
    let dbar_exhaustive = !sampled && dbar_idx.len() == n;
    let dbar_sources = dbar_idx.iter().map(|&i| sources[i]).collect();

    let pi = pi.probs();
    let mut rows: Vec<Vec<f64>> = sources
        .iter()
        .map(|&u| Dist::point(n, u).into_vec())
        .collect();
    let mut scratch: Vec<Vec<f64>> = vec![vec![0.0; n]; rows.len()];

    let dev = |rows: &[Vec<f64>]| {
        rows.par_iter()
            .map(|r| max_dev(r, pi))
            .reduce(|| 0.0, f64::max)
    };
    let mut d_trace = vec![dev(&rows)];
    let mut dbar_trace = vec![max_pairwise_tv(&rows, &dbar_idx)];

    let mut t = 0;
    while d_trace[t] > opts.threshold {
        if t == opts.step_cap {
            return Err(Error::MixingCap {
                cap: opts.step_cap,
                threshold: opts.threshold,
                last: d_trace[t],
                d_trace,
            });
        }
        rows.par_iter()
            .zip(scratch.par_iter_mut())
            .for_each(|(src, dst)| c.push_forward(src, dst));
        std::mem::swap(&mut rows, &mut scratch);
        t += 1;
        d_trace.push(dev(&rows));
        dbar_trace.push(max_pairwise_tv(&rows, &dbar_idx));
    }

    Ok(MixReport {
        t,
        threshold: opts.threshold,
        d_trace,
        dbar_trace,
        sources,
        sampled,
        dbar_sources,
        dbar_exhaustive,
    })
}
