use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Digraph;
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenMethod {
    /// One Bernoulli draw per ordered pair.
    Naive,
    /// Geometric jumps over the ordered-pair positions, `O(n + m)` expected.
    GeometricJump,
}

impl std::str::FromStr for GenMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(GenMethod::Naive),
            "geometric-jump" | "geometric" => Ok(GenMethod::GeometricJump),
            other => Err(Error::InvalidParam(format!("unknown generation method {other:?}"))),
        }
    }
}

/// Parameters of `D(n, p)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenParams {
    pub n: usize,
    pub p: f64,
    pub seed: u64,
    pub method: GenMethod,
}

impl GenParams {
    pub fn new(n: usize, p: f64, seed: u64, method: GenMethod) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParam("n must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParam(format!("p = {p} is not in [0, 1]")));
        }
        Ok(Self { n, p, seed, method })
    }

    /// `p` chosen so that `np = d ln n`, geometric-jump sampling.
    pub fn with_d(n: usize, d: f64, seed: u64) -> Result<Self> {
        let p = (d * (n as f64).ln() / n as f64).min(1.0);
        Self::new(n, p, seed, GenMethod::GeometricJump)
    }

    /// `d = np / ln n`.
    pub fn d(&self) -> f64 {
        self.n as f64 * self.p / (self.n as f64).ln()
    }
}

/// Samples `D(n, p)`: every ordered pair `(i, j)`, `i != j`, is an edge
/// independently with probability `p`. Identical parameters give identical
/// graphs. The two methods consume the stream differently, so they agree in
/// distribution only.
pub fn generate(params: &GenParams) -> Digraph {
    let n = params.n;
    let p = params.p;
    let slots = n as u64 * (n as u64).saturating_sub(1);
    if p <= 0.0 || slots == 0 {
        return Digraph::from_sorted_unique(n, &[]);
    }
    if p >= 1.0 {
        return Digraph::complete(n);
    }

    let mut rng = rng_from_seed(params.seed);
    let mut edges = Vec::with_capacity((slots as f64 * p * 1.05) as usize + 16);
    match params.method {
        GenMethod::Naive => {
            for u in 0..n {
                for v in 0..n {
                    if v != u && rng.gen::<f64>() < p {
                        edges.push((u, v));
                    }
                }
            }
        }
        GenMethod::GeometricJump => {
            let log_q = (-p).ln_1p();
            let row = (n - 1) as u64;
            let mut next: u64 = 0;
            loop {
                // 1 - U lies in (0, 1], so the log is finite.
                let u: f64 = 1.0 - rng.gen::<f64>();
                let skip = (u.ln() / log_q).floor();
                if skip >= (slots - next) as f64 {
                    break;
                }
                next += skip as u64;
                let src = (next / row) as usize;
                let col = (next % row) as usize;
                let dst = if col < src { col } else { col + 1 };
                edges.push((src, dst));
                next += 1;
                if next >= slots {
                    break;
                }
            }
        }
    }
    Digraph::from_sorted_unique(n, &edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_probabilities() {
        for method in [GenMethod::Naive, GenMethod::GeometricJump] {
            let g = generate(&GenParams::new(3, 1.0, 5, method).unwrap());
            assert_eq!(g.edge_count(), 6);
            assert_eq!(g.degrees(), (vec![2; 3], vec![2; 3]));
            let e = generate(&GenParams::new(5, 0.0, 5, method).unwrap());
            assert_eq!(e.edge_count(), 0);
        }
        assert_eq!(generate(&GenParams::new(1, 0.5, 1, GenMethod::Naive).unwrap()).n(), 1);
    }

    #[test]
    fn same_seed_same_graph() {
        for method in [GenMethod::Naive, GenMethod::GeometricJump] {
            let a = generate(&GenParams::new(60, 0.1, 42, method).unwrap());
            let b = generate(&GenParams::new(60, 0.1, 42, method).unwrap());
            assert_eq!(a, b);
            assert!(a.validate());
            let c = generate(&GenParams::new(60, 0.1, 43, method).unwrap());
            assert_ne!(a, c);
        }
    }

    #[test]
    fn rejects_bad_params() {
        assert!(GenParams::new(0, 0.5, 0, GenMethod::Naive).is_err());
        assert!(GenParams::new(5, 1.5, 0, GenMethod::Naive).is_err());
        assert!(GenParams::new(5, -0.1, 0, GenMethod::Naive).is_err());
        assert!("bogus".parse::<GenMethod>().is_err());
        assert_eq!("naive".parse::<GenMethod>().unwrap(), GenMethod::Naive);
    }

    #[test]
    fn with_d_matches_definition() {
        let gp = GenParams::with_d(1000, 3.0, 0).unwrap();
        assert!((gp.d() - 3.0).abs() < 1e-12);
    }
}
