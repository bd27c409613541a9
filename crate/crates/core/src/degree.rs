//! Degree-count evaluators for `D(n, p)`, the stationary predictor and the
//! cover-time formula. All logarithms are natural.

use serde::Serialize;

use crate::digraph::{is_strongly_connected, Digraph};
use crate::error::{Error, Result};

/// `ln n! − (n + ½) ln n + n − ½ ln 2π` for `n ≥ 1`.
fn stirlerr(n: f64) -> f64 {
    const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;
    if n <= 15.0 {
        let ln_fact: f64 = (2..=n as u64).map(|i| (i as f64).ln()).sum();
        return ln_fact - (n + 0.5) * n.ln() + n - HALF_LN_2PI;
    }
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    let nn = n * n;
    (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / n
}

/// Deviance term `x ln(x/np) + np − x`, summed as a series near `x = np`.
fn bd0(x: f64, np: f64) -> f64 {
    if (x - np).abs() < 0.1 * (x + np) {
        let v = (x - np) / (x + np);
        let mut s = (x - np) * v;
        let mut ej = 2.0 * x * v;
        let v2 = v * v;
        for j in 1.. {
            ej *= v2;
            let s1 = s + ej / (2 * j + 1) as f64;
            if s1 == s {
                break;
            }
            s = s1;
        }
        s
    } else {
        x * (x / np).ln() + np - x
    }
}

/// `Pr(Bin(trials, p) = k)` by the saddle-point expansion, accurate in
/// relative terms even far in the tails.
pub fn binom_pmf(trials: u64, k: u64, p: f64) -> f64 {
    if k > trials {
        return 0.0;
    }
    if p <= 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if p >= 1.0 {
        return if k == trials { 1.0 } else { 0.0 };
    }
    let n = trials as f64;
    let x = k as f64;
    if k == 0 {
        return (n * (-p).ln_1p()).exp();
    }
    if k == trials {
        return (n * p.ln()).exp();
    }
    let q = 1.0 - p;
    let lc = stirlerr(n) - stirlerr(x) - stirlerr(n - x) - bd0(x, n * p) - bd0(n - x, n * q);
    let lf = std::f64::consts::TAU.ln() + x.ln() + (-x / n).ln_1p();
    (lc - 0.5 * lf).exp()
}

/// Expected number of vertices of in-degree `k`: `n · Pr(Bin(n−1, p) = k)`.
pub fn dbar(n: usize, p: f64, k: usize) -> f64 {
    n as f64 * binom_pmf(n as u64 - 1, k as u64, p)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Bucket {
    K0,
    K1,
    K2,
    K3,
}

/// The (a)-claims of the degree lemma evaluated at concrete `n, d`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BucketClaims {
    /// `d − 1 ≥ (ln n)^{−1/3}`, the premise of the claims below.
    pub premise: bool,
    pub k1_empty: bool,
    /// `min K₂ ≥ (ln n)^{1/2}` (vacuously true if `K₂` is empty).
    pub k2_min_ok: bool,
    pub k2_size: usize,
    pub ln_ln_n: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegreeProfile {
    pub n: usize,
    pub p: f64,
    pub np: f64,
    /// `np / ln n`.
    pub d: f64,
    /// `⌊30 np⌋`.
    pub delta0: usize,
    /// `⌈(d − 1) ln n⌉`.
    pub k_star: usize,
    /// `⌈d ln n⌉`.
    pub k_dagger: usize,
    /// `(d − 1) ln(d/(d − 1))`.
    pub gamma_d: f64,
    /// `D̄(k)` for `k = 0..=delta0`.
    pub dbar: Vec<f64>,
    /// Bucket of `k = 1..=delta0`, at index `k − 1`.
    pub buckets: Vec<Bucket>,
    /// Degrees satisfying more than one of the raw set conditions; each was
    /// assigned to the lowest-indexed bucket.
    pub ties: Vec<usize>,
    pub claims: BucketClaims,
}

impl DegreeProfile {
    pub fn new(n: usize, p: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParam("n must be at least 2".into()));
        }
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::InvalidParam(format!("p = {p} is not in (0, 1]")));
        }
        let ln_n = (n as f64).ln();
        let np = n as f64 * p;
        let d = np / ln_n;
        if !(d > 1.0) {
            return Err(Error::InvalidParam(format!("d = np / ln n = {d} must exceed 1")));
        }
        let delta0 = (30.0 * np).floor() as usize;
        let dbar_v: Vec<f64> = (0..=delta0).map(|k| dbar(n, p, k)).collect();
        let (buckets, ties) = classify(ln_n, &dbar_v);

        let bk = &buckets;
        let k_in = |b: Bucket| (1..=delta0).filter(move |&k| bk[k - 1] == b);
        let ln_ln_n = ln_n.ln();
        let claims = BucketClaims {
            premise: d - 1.0 >= ln_n.powf(-1.0 / 3.0),
            k1_empty: k_in(Bucket::K1).next().is_none(),
            k2_min_ok: k_in(Bucket::K2).next().map_or(true, |k| k as f64 >= ln_n.sqrt()),
            k2_size: k_in(Bucket::K2).count(),
            ln_ln_n,
        };
        Ok(Self {
            n,
            p,
            np,
            d,
            delta0,
            k_star: ((d - 1.0) * ln_n).ceil() as usize,
            k_dagger: (d * ln_n).ceil() as usize,
            gamma_d: gamma_d(d),
            dbar: dbar_v,
            buckets,
            ties,
            claims,
        })
    }

    pub fn bucket(&self, k: usize) -> Option<Bucket> {
        (k >= 1).then(|| self.buckets.get(k - 1).copied()).flatten()
    }

    /// `n^{γ_d} / (10 d ln n)`.
    pub fn v_star_bound(&self) -> f64 {
        let ln_n = (self.n as f64).ln();
        (self.gamma_d * ln_n).exp() / (10.0 * self.d * ln_n)
    }
}

/// `(d − 1) ln(d/(d − 1))`.
pub fn gamma_d(d: f64) -> f64 {
    -(d - 1.0) * (-1.0 / d).ln_1p()
}

/// Buckets for `k = 1..=Δ₀` given `D̄(0..=Δ₀)`. Ties go to the lower bucket.
fn classify(ln_n: f64, dbar: &[f64]) -> (Vec<Bucket>, Vec<usize>) {
    let lo = 1.0 / (ln_n * ln_n);
    let k1_hi = ln_n.ln();
    let k2_hi = ln_n * ln_n;
    let mut buckets = Vec::with_capacity(dbar.len().saturating_sub(1));
    let mut ties = Vec::new();
    for (k, &x) in dbar.iter().enumerate().skip(1) {
        let raw = [
            x <= lo,
            k <= 15 && lo <= x && x <= k1_hi,
            k >= 16 && lo <= x && x <= k2_hi,
        ];
        if raw.iter().filter(|&&b| b).count() > 1 {
            ties.push(k);
        }
        buckets.push(match raw.iter().position(|&b| b) {
            Some(0) => Bucket::K0,
            Some(1) => Bucket::K1,
            Some(2) => Bucket::K2,
            _ => Bucket::K3,
        });
    }
    (buckets, ties)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnvelopeReport {
    /// Actual in-degree counts `D(k)` for `k = 0..=Δ₀`.
    pub counts: Vec<usize>,
    /// Degrees violating their bucket's bound.
    pub k0_fail: Vec<usize>,
    pub k1_fail: Vec<usize>,
    pub k2_fail: Vec<usize>,
    pub k3_fail: Vec<usize>,
    /// Vertices with in- or out-degree at least `Δ₀`.
    pub large_degree: usize,
}

impl EnvelopeReport {
    pub fn all_pass(&self) -> bool {
        self.k0_fail.is_empty()
            && self.k1_fail.is_empty()
            && self.k2_fail.is_empty()
            && self.k3_fail.is_empty()
    }
}

/// Checks the actual in-degree counts against each bucket's bound:
/// `D = 0` on `K₀`, `D ≤ (ln ln n)²` on `K₁`, `D ≤ (ln n)⁴` on `K₂` and
/// `D̄/2 ≤ D ≤ 2D̄` on `K₃`.
pub fn check_envelope(g: &Digraph, profile: &DegreeProfile) -> Result<EnvelopeReport> {
    if g.n() != profile.n {
        return Err(Error::DimensionMismatch {
            expected: profile.n,
            got: g.n(),
        });
    }
    let ln_n = (profile.n as f64).ln();
    let mut counts = vec![0usize; profile.delta0 + 1];
    let mut large_degree = 0;
    for v in 0..g.n() {
        let k = g.in_degree(v);
        if k <= profile.delta0 {
            counts[k] += 1;
        }
        if k >= profile.delta0 || g.out_degree(v) >= profile.delta0 {
            large_degree += 1;
        }
    }
    let mut rep = EnvelopeReport {
        counts,
        k0_fail: Vec::new(),
        k1_fail: Vec::new(),
        k2_fail: Vec::new(),
        k3_fail: Vec::new(),
        large_degree,
    };
    for k in 1..=profile.delta0 {
        let dk = rep.counts[k] as f64;
        let db = profile.dbar[k];
        match profile.buckets[k - 1] {
            Bucket::K0 if dk > 0.0 => rep.k0_fail.push(k),
            Bucket::K1 if dk > ln_n.ln().powi(2) => rep.k1_fail.push(k),
            Bucket::K2 if dk > ln_n.powi(4) => rep.k2_fail.push(k),
            Bucket::K3 if dk < db / 2.0 || dk > 2.0 * db => rep.k3_fail.push(k),
            _ => {}
        }
    }
    Ok(rep)
}

/// Vertices with in-degree `k*` and out-degree `k†`.
pub fn v_star(g: &Digraph, profile: &DegreeProfile) -> Vec<usize> {
    (0..g.n())
        .filter(|&v| g.in_degree(v) == profile.k_star && g.out_degree(v) == profile.k_dagger)
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Varsigma {
    Finite(f64),
    /// Some in-neighbour has out-degree 0.
    Unbounded,
}

/// `ς*(v) = max_{w ∈ N⁻(v)} deg⁻(w)/deg⁺(w)`.
pub fn varsigma_star(g: &Digraph, v: usize) -> Result<Varsigma> {
    g.check_vertex(v)?;
    let ins = g.in_neighbors(v);
    if ins.is_empty() {
        return Err(Error::NoInNeighbours(v));
    }
    let mut best = 0.0f64;
    for &w in ins {
        let out = g.out_degree(w);
        if out == 0 {
            return Ok(Varsigma::Unbounded);
        }
        best = best.max(g.in_degree(w) as f64 / out as f64);
    }
    Ok(Varsigma::Finite(best))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Denominator {
    /// `n(n − 1)p` with `p` supplied.
    Expected,
    /// The actual edge count.
    EdgeCount,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PiPrediction {
    pub m: f64,
    pub denominator: Denominator,
    pub deg_term: Vec<f64>,
    pub varsigma_term: Vec<f64>,
    /// `(deg⁻(v) + ς*(v)) / m`.
    pub raw: Vec<f64>,
    /// `raw` divided by its sum.
    pub normalized: Vec<f64>,
    /// `deg⁻(v) / m`.
    pub simple: Vec<f64>,
    /// `1/n`.
    pub uniform: f64,
}

/// Predicted stationary distribution `(deg⁻(v) + ς*(v)) / m`, with
/// `m = n(n − 1)p` when `p` is given and the edge count otherwise.
pub fn predict_pi(g: &Digraph, p: Option<f64>) -> Result<PiPrediction> {
    if !is_strongly_connected(g) {
        return Err(Error::NotStronglyConnected);
    }
    let n = g.n();
    let (m, denominator) = match p {
        Some(p) if p > 0.0 && p <= 1.0 => (n as f64 * (n as f64 - 1.0) * p, Denominator::Expected),
        Some(p) => return Err(Error::InvalidParam(format!("p = {p} is not in (0, 1]"))),
        None => (g.edge_count() as f64, Denominator::EdgeCount),
    };
    let deg_term: Vec<f64> = (0..n).map(|v| g.in_degree(v) as f64).collect();
    let varsigma_term = (0..n)
        .map(|v| match varsigma_star(g, v)? {
            Varsigma::Finite(s) => Ok(s),
            // Strong connectivity rules out sinks.
            Varsigma::Unbounded => Err(Error::Sink(v)),
        })
        .collect::<Result<Vec<f64>>>()?;
    let raw: Vec<f64> = deg_term
        .iter()
        .zip(&varsigma_term)
        .map(|(a, b)| (a + b) / m)
        .collect();
    let total: f64 = raw.iter().sum();
    Ok(PiPrediction {
        m,
        denominator,
        normalized: raw.iter().map(|r| r / total).collect(),
        simple: deg_term.iter().map(|a| a / m).collect(),
        raw,
        deg_term,
        varsigma_term,
        uniform: 1.0 / n as f64,
    })
}

/// `d ln(d/(d − 1)) n ln n`; `d = ∞` gives `n ln n`.
pub fn cover_formula(n: f64, d: f64) -> Result<f64> {
    if !(d > 1.0) {
        return Err(Error::InvalidParam(format!("d = {d} must exceed 1")));
    }
    let coef = if d.is_infinite() { 1.0 } else { -d * (-1.0 / d).ln_1p() };
    Ok(coef * n * n.ln())
}
