//! Seeded walk simulation and the return polynomial.

mod geomlaw;
mod returns;

pub use geomlaw::{geometric_law_check, GeomLawRow, GeomLawTable};
pub use returns::{lambda, return_poly, CircleScan, ReturnPoly};

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::rng::{child_seed, rng_from_seed, splitmix64};

/// `⌈10⁴ · n · ln n⌉`, at least `10⁴`.
pub fn default_step_cap(n: usize) -> u64 {
    let n = n as f64;
    (1e4 * n * n.ln()).ceil().max(1e4) as u64
}

/// One trajectory run until every vertex has been visited.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WalkRun {
    pub start: usize,
    pub seed: u64,
    pub cover_time: u64,
    /// The vertex visited last.
    pub last_vertex: usize,
    /// Step at which each vertex was first visited.
    pub first_visit: Vec<u64>,
}

/// Simulates one walk from `start` until it has visited every vertex.
pub fn simulate_cover(g: &Digraph, start: usize, seed: u64) -> Result<WalkRun> {
    simulate_cover_capped(g, start, seed, default_step_cap(g.n()))
}

pub fn simulate_cover_capped(g: &Digraph, start: usize, seed: u64, cap: u64) -> Result<WalkRun> {
    g.check_vertex(start)?;
    let n = g.n();
    let mut first_visit = vec![u64::MAX; n];
    first_visit[start] = 0;
    let mut visited = 1;
    let mut last_vertex = start;
    let mut cur = start;
    let mut t = 0u64;
    let mut rng = rng_from_seed(seed);
    while visited < n {
        if t == cap {
            return Err(Error::StepCap { cap, visited, n });
        }
        let outs = g.out_neighbors(cur);
        if outs.is_empty() {
            return Err(Error::Sink(cur));
        }
        cur = outs[rng.gen_range(0..outs.len())];
        t += 1;
        if first_visit[cur] == u64::MAX {
            first_visit[cur] = t;
            visited += 1;
            last_vertex = cur;
        }
    }
    Ok(WalkRun {
        start,
        seed,
        cover_time: t,
        last_vertex,
        first_visit,
    })
}

/// How start vertices are chosen across runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StartPolicy {
    Fixed(usize),
    /// A fresh uniform start per run.
    UniformRandom,
    /// `k` distinct starts, assigned to runs round-robin.
    AllSampled(usize),
}

impl std::str::FromStr for StartPolicy {
    type Err = Error;

    /// `fixed:V`, `uniform` or `sampled:K`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParam(format!("unknown start policy {s:?}"));
        match s.split_once(':') {
            None if s == "uniform" => Ok(StartPolicy::UniformRandom),
            Some(("fixed", v)) => v.parse().map(StartPolicy::Fixed).map_err(|_| bad()),
            Some(("sampled", k)) => match k.parse() {
                Ok(k) if k > 0 => Ok(StartPolicy::AllSampled(k)),
                _ => Err(bad()),
            },
            _ => Err(bad()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunRecord {
    pub run_id: usize,
    pub seed: u64,
    pub start: usize,
    pub cover_time: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverSummary {
    pub runs: Vec<RunRecord>,
    pub mean: f64,
    pub stddev: f64,
    pub stderr: f64,
    pub ci95: (f64, f64),
    /// Largest per-start mean and its start vertex.
    pub max_over_starts: (usize, f64),
    pub step_cap: u64,
}

/// Seed of run `run_id` under master `seed`.
pub fn run_seed(seed: u64, run_id: usize) -> u64 {
    child_seed(seed, run_id as u64)
}

fn summarize(runs: Vec<RunRecord>, step_cap: u64) -> CoverSummary {
    let k = runs.len() as f64;
    let mean = runs.iter().map(|r| r.cover_time as f64).sum::<f64>() / k;
    let var = if runs.len() > 1 {
        runs.iter()
            .map(|r| (r.cover_time as f64 - mean).powi(2))
            .sum::<f64>()
            / (k - 1.0)
    } else {
        0.0
    };
    let stddev = var.sqrt();
    let stderr = stddev / k.sqrt();

    let mut per_start: std::collections::BTreeMap<usize, (f64, usize)> = Default::default();
    for r in &runs {
        let e = per_start.entry(r.start).or_default();
        e.0 += r.cover_time as f64;
        e.1 += 1;
    }
    let max_over_starts = per_start
        .into_iter()
        .map(|(s, (sum, c))| (s, sum / c as f64))
        .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });

    CoverSummary {
        runs,
        mean,
        stddev,
        stderr,
        ci95: (mean - 1.96 * stderr, mean + 1.96 * stderr),
        max_over_starts,
        step_cap,
    }
}

/// Monte Carlo cover time over `runs` independent walks. Run `i` uses seed
/// [`run_seed`]`(seed, i)`, so results do not depend on thread scheduling.
pub fn cover_time_mc(g: &Digraph, policy: StartPolicy, runs: usize, seed: u64) -> Result<CoverSummary> {
    let n = g.n();
    if runs == 0 {
        return Err(Error::InvalidParam("runs must be at least 1".into()));
    }
    let starts: Vec<usize> = match policy {
        StartPolicy::Fixed(v) => {
            g.check_vertex(v)?;
            vec![v]
        }
        StartPolicy::UniformRandom => Vec::new(),
        StartPolicy::AllSampled(k) => {
            let k = k.min(n);
            let mut s = sample(&mut rng_from_seed(splitmix64(seed)), n, k).into_vec();
            s.sort_unstable();
            s
        }
    };
    let cap = default_step_cap(n);
    let records: Vec<RunRecord> = (0..runs)
        .into_par_iter()
        .map(|i| {
            let s = run_seed(seed, i);
            let start = if starts.is_empty() {
                rng_from_seed(splitmix64(s)).gen_range(0..n)
            } else {
                starts[i % starts.len()]
            };
            simulate_cover_capped(g, start, s, cap).map(|w| RunRecord {
                run_id: i,
                seed: s,
                start,
                cover_time: w.cover_time,
            })
        })
        .collect::<Result<_>>()?;
    Ok(summarize(records, cap))
}
