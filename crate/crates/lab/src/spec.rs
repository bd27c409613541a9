//! Experiment specifications in a flat `key = value` format.
//!
//! ```text
//! # comment
//! kind = cover-convergence
//! grid = 500:3, 1000:3, 2000:3
//! runs = 20
//! master_seed = 7
//! ```
//!
//! Grid entries are `n:density`, where the density is one of
//!
//! - a number `d > 1`: `np = d ln n`;
//! - `logsq`: `np = (ln n)²`;
//! - `conn+C` / `conn-C`: `np = ln n ± C ln ln n` (connectivity sweeps only).

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    PiConvergence,
    CoverConvergence,
    MixingScan,
    ZRatio,
    Contraction,
    ConnectivityThreshold,
}

impl Kind {
    pub const ALL: [Kind; 6] = [
        Kind::PiConvergence,
        Kind::CoverConvergence,
        Kind::MixingScan,
        Kind::ZRatio,
        Kind::Contraction,
        Kind::ConnectivityThreshold,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::PiConvergence => "pi-convergence",
            Kind::CoverConvergence => "cover-convergence",
            Kind::MixingScan => "mixing-scan",
            Kind::ZRatio => "z-ratio",
            Kind::Contraction => "contraction",
            Kind::ConnectivityThreshold => "connectivity-threshold",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Kind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Kind::ALL.iter().map(|k| k.name()).collect();
                format!("unknown kind {s:?}, expected one of {}", names.join(", "))
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Density {
    /// `np = d ln n`.
    D(f64),
    /// `np = (ln n)²`.
    LogSquared,
    /// `np = ln n + c ln ln n`.
    Threshold(f64),
}

impl fmt::Display for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Density::D(d) => write!(f, "{d}"),
            Density::LogSquared => f.write_str("logsq"),
            Density::Threshold(c) if *c >= 0.0 => write!(f, "conn+{c}"),
            Density::Threshold(c) => write!(f, "conn-{}", -c),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct GridPoint {
    pub n: usize,
    pub density: Density,
}

impl GridPoint {
    pub fn np(&self) -> f64 {
        let ln_n = (self.n as f64).ln();
        match self.density {
            Density::D(d) => d * ln_n,
            Density::LogSquared => ln_n * ln_n,
            Density::Threshold(c) => ln_n + c * ln_n.ln(),
        }
    }

    pub fn p(&self) -> f64 {
        (self.np() / self.n as f64).min(1.0)
    }

    /// `np / ln n`.
    pub fn d(&self) -> f64 {
        self.np() / (self.n as f64).ln()
    }
}

impl fmt::Display for GridPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.n, self.density)
    }
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct ExperimentSpec {
    pub kind: Kind,
    pub grid: Vec<GridPoint>,
    pub runs: usize,
    pub master_seed: u64,
    /// Slack in `t₀ = (1+ε)·formula` and `t₁ = (1−ε)·formula`.
    pub epsilon: f64,
    /// Stationary residual tolerance.
    pub tol: f64,
    /// Mixing threshold; `None` means `min(n⁻³, 1e-9)`.
    pub threshold: Option<f64>,
    /// Vertex pairs per graph for `z-ratio` and `contraction`.
    pub pairs: usize,
    pub eta: f64,
    /// Sampled vertices for the cover-bound sum; 0 disables it.
    pub bound_vertices: usize,
    pub output: PathBuf,
}

/// A diagnostic naming the offending line and key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecError {
    pub line: usize,
    pub key: String,
    pub msg: String,
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "spec: key `{}`: {}", self.key, self.msg)
        } else {
            write!(f, "spec line {}: key `{}`: {}", self.line, self.key, self.msg)
        }
    }
}

impl std::error::Error for SpecError {}

const KEYS: [&str; 11] = [
    "kind",
    "grid",
    "runs",
    "master_seed",
    "epsilon",
    "tol",
    "threshold",
    "pairs",
    "eta",
    "bound_vertices",
    "output",
];

fn parse_density(tok: &str, kind: Kind) -> Result<Density, String> {
    if tok == "logsq" {
        return Ok(Density::LogSquared);
    }
    if let Some(rest) = tok.strip_prefix("conn") {
        if kind != Kind::ConnectivityThreshold {
            return Err(format!(
                "density {tok:?} is only meaningful for connectivity-threshold sweeps"
            ));
        }
        return rest
            .parse::<f64>()
            .ok()
            .filter(|c| c.is_finite() && (rest.starts_with('+') || rest.starts_with('-')))
            .map(Density::Threshold)
            .ok_or_else(|| format!("bad threshold offset in {tok:?}, expected conn+C or conn-C"));
    }
    let d: f64 = tok
        .parse()
        .map_err(|_| format!("bad density {tok:?}, expected a number, logsq or conn±C"))?;
    if !(d > 1.0) || !d.is_finite() {
        return Err(format!(
            "d = {tok} must exceed 1: the cover-time asymptotics assume np = d ln n with d > 1"
        ));
    }
    Ok(Density::D(d))
}

fn parse_grid(value: &str, kind: Kind) -> Result<Vec<GridPoint>, String> {
    let mut grid = Vec::new();
    for entry in value.split(',').map(str::trim).filter(|e| !e.is_empty()) {
        let (n, dens) = entry
            .split_once(':')
            .ok_or_else(|| format!("grid entry {entry:?} is not of the form n:density"))?;
        let n: usize = n
            .trim()
            .parse()
            .map_err(|_| format!("grid entry {entry:?}: n is not a positive integer"))?;
        if n < 3 {
            return Err(format!("grid entry {entry:?}: n must be at least 3"));
        }
        let density = parse_density(dens.trim(), kind)?;
        let point = GridPoint { n, density };
        if !(point.np() > 0.0) {
            return Err(format!("grid entry {entry:?} gives np = {} <= 0", point.np()));
        }
        grid.push(point);
    }
    if grid.is_empty() {
        return Err("grid is empty".into());
    }
    Ok(grid)
}

fn num<T: FromStr>(value: &str, what: &str) -> Result<T, String> {
    value.parse().map_err(|_| format!("{value:?} is not {what}"))
}

/// Parses and validates a spec. Every error names its line and key.
pub fn parse_spec(text: &str) -> Result<ExperimentSpec, SpecError> {
    let mut seen: Vec<(&str, usize, &str)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let lineno = i + 1;
        let (key, value) = line.split_once('=').ok_or_else(|| SpecError {
            line: lineno,
            key: line.to_string(),
            msg: "expected `key = value`".into(),
        })?;
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(SpecError {
                line: lineno,
                key: key.into(),
                msg: format!("unknown key, expected one of {}", KEYS.join(", ")),
            });
        }
        if let Some(&(_, first, _)) = seen.iter().find(|(k, _, _)| *k == key) {
            return Err(SpecError {
                line: lineno,
                key: key.into(),
                msg: format!("duplicate key, first set on line {first} and again on line {lineno}"),
            });
        }
        seen.push((key, lineno, value));
    }

    let get = |key: &str| seen.iter().find(|(k, _, _)| *k == key).map(|&(_, l, v)| (l, v));
    let err = |key: &str, line: usize, msg: String| SpecError {
        line,
        key: key.into(),
        msg,
    };
    let field = |key: &str| -> Option<(usize, &str)> { get(key) };

    let (kl, kv) = field("kind").ok_or_else(|| err("kind", 0, "missing required key".into()))?;
    let kind: Kind = kv.parse().map_err(|m| err("kind", kl, m))?;
    let (gl, gv) = field("grid").ok_or_else(|| err("grid", 0, "missing required key".into()))?;
    let grid = parse_grid(gv, kind).map_err(|m| err("grid", gl, m))?;

    macro_rules! opt {
        ($key:literal, $default:expr, $what:literal, $check:expr) => {
            match field($key) {
                None => $default,
                Some((l, v)) => {
                    let x = num(v, $what).map_err(|m| err($key, l, m))?;
                    let check: &dyn Fn(&_) -> bool = &$check;
                    if !check(&x) {
                        return Err(err($key, l, format!("{v} is out of range")));
                    }
                    x
                }
            }
        };
    }

    let runs: usize = opt!("runs", 10, "a positive integer", |&r: &usize| r >= 1);
    let master_seed: u64 = opt!("master_seed", 0, "a 64-bit unsigned integer", |_: &u64| true);
    let epsilon: f64 = opt!("epsilon", 0.1, "a number", |&e: &f64| e > 0.0 && e < 1.0);
    let tol: f64 = opt!("tol", 1e-12, "a number", |&t: &f64| t > 0.0);
    let threshold: Option<f64> = match field("threshold") {
        None => None,
        Some((_, "auto")) => None,
        Some((l, v)) => {
            let t: f64 = num(v, "a number or auto").map_err(|m| err("threshold", l, m))?;
            if !(t > 0.0) {
                return Err(err("threshold", l, format!("{v} must be positive")));
            }
            Some(t)
        }
    };
    let pairs: usize = opt!("pairs", 20, "a positive integer", |&k: &usize| k >= 1);
    let eta: f64 = opt!("eta", 1.0 / 250.0, "a number", |&e: &f64| e > 0.0 && e <= 1.0 / 250.0);
    let bound_vertices: usize = opt!("bound_vertices", 0, "a nonnegative integer", |_: &usize| true);
    let output = match field("output") {
        Some((l, "")) => return Err(err("output", l, "empty path".into())),
        Some((_, v)) => PathBuf::from(v),
        None => PathBuf::from(format!("{kind}.csv")),
    };

    Ok(ExperimentSpec {
        kind,
        grid,
        runs,
        master_seed,
        epsilon,
        tol,
        threshold,
        pairs,
        eta,
        bound_vertices,
        output,
    })
}

impl ExperimentSpec {
    /// The spec with every default written out, one key per line.
    pub fn canonical(&self) -> String {
        let grid: Vec<String> = self.grid.iter().map(|g| g.to_string()).collect();
        let threshold = self
            .threshold
            .map_or_else(|| "auto".to_string(), |t| format!("{t:e}"));
        format!(
            "kind = {}\ngrid = {}\nruns = {}\nmaster_seed = {}\nepsilon = {}\ntol = {:e}\n\
             threshold = {}\npairs = {}\neta = {}\nbound_vertices = {}\noutput = {}\n",
            self.kind,
            grid.join(", "),
            self.runs,
            self.master_seed,
            self.epsilon,
            self.tol,
            threshold,
            self.pairs,
            self.eta,
            self.bound_vertices,
            self.output.display()
        )
    }

    /// SHA-256 of [`canonical`](Self::canonical), hex encoded.
    pub fn hash(&self) -> String {
        Sha256::digest(self.canonical().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_spec_fills_defaults() {
        let s = parse_spec("kind = pi-convergence\ngrid = 500:3\n").unwrap();
        assert_eq!(s.runs, 10);
        assert_eq!(s.master_seed, 0);
        assert_eq!(s.epsilon, 0.1);
        assert_eq!(s.threshold, None);
        assert_eq!(s.output, PathBuf::from("pi-convergence.csv"));
        let again = parse_spec(&s.canonical()).unwrap();
        assert_eq!(again, s);
        assert_eq!(again.hash(), s.hash());
    }

    #[test]
    fn duplicate_key_names_both_lines() {
        let e = parse_spec("kind = z-ratio\n\nruns = 2\ngrid = 100:3\nruns = 3\n").unwrap_err();
        assert_eq!(e.line, 5);
        assert_eq!(e.key, "runs");
        assert!(e.msg.contains("line 3") && e.msg.contains("line 5"), "{}", e.msg);
    }

    #[test]
    fn unknown_key_and_bad_values() {
        let e = parse_spec("kind = z-ratio\ngrid = 100:3\nseeds = 4\n").unwrap_err();
        assert_eq!((e.line, e.key.as_str()), (3, "seeds"));
        let e = parse_spec("kind = z-ratio\ngrid = 100:3\nruns = 0\n").unwrap_err();
        assert_eq!((e.line, e.key.as_str()), (3, "runs"));
        let e = parse_spec("kind = nope\ngrid = 100:3\n").unwrap_err();
        assert_eq!((e.line, e.key.as_str()), (1, "kind"));
        let e = parse_spec("grid = 100:3\n").unwrap_err();
        assert_eq!(e.key, "kind");
        let e = parse_spec("kind = z-ratio\njunk\n").unwrap_err();
        assert_eq!(e.line, 2);
    }

    #[test]
    fn grid_validation() {
        let e = parse_spec("kind = cover-convergence\ngrid = 500:3, 1000:1\n").unwrap_err();
        assert_eq!((e.line, e.key.as_str()), (2, "grid"));
        assert!(e.msg.contains("must exceed 1"));
        let e = parse_spec("kind = cover-convergence\ngrid =\n").unwrap_err();
        assert!(e.msg.contains("empty"));
        let e = parse_spec("kind = cover-convergence\ngrid = 500:conn+2\n").unwrap_err();
        assert_eq!(e.key, "grid");
        let s = parse_spec("kind = connectivity-threshold\ngrid = 5000:conn+2, 5000:conn-2\n").unwrap();
        assert_eq!(s.grid[1].density, Density::Threshold(-2.0));
        assert_eq!(s.grid[1].to_string(), "5000:conn-2");
        let s = parse_spec("kind = pi-convergence\ngrid = 2000:logsq # dense\n").unwrap();
        let ln = 2000f64.ln();
        assert!((s.grid[0].np() - ln * ln).abs() < 1e-12);
    }
}
