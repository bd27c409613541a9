//! Seeded sweeps over a grid of `(n, density)` points.
//!
//! Task `(point, run)` builds its graph from
//! `derive_seed(master_seed, point, run)`. Sub-streams inside a task (start
//! vertices, sampled pairs, sampled sources) come from `child_seed(seed, k)`
//! for a fixed `k` per purpose, so one CSV row can be recomputed from its
//! `seed` column and the spec alone.

use std::collections::BTreeMap;
use std::io::Write;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use dwalk_core::chain::{
    avoid_prob, avoid_set_prob, avoid_tail_sum, contract, contracted_index, default_threshold, mixing,
    stationary, step_n, MixOptions,
};
use dwalk_core::degree::{cover_formula, predict_pi};
use dwalk_core::digraph::{generate, is_strongly_connected, GenMethod, GenParams};
use dwalk_core::rng::{child_seed, derive_seed, rng_from_seed};
use dwalk_core::trees::{z_lower, z_upper_report};
use dwalk_core::walker::simulate_cover;
use dwalk_core::{chain_from, Digraph, Dist};

use crate::fmt::num;
use crate::spec::{Density, ExperimentSpec, GridPoint, Kind};
use crate::LabError;

/// Iteration cap for stationary solves inside sweeps.
pub const STATIONARY_MAX_ITERS: usize = 1_000_000;
/// Truncation level of the cover-bound tail sums.
pub const TAIL_TOL: f64 = 1e-12;

const SUB_START: u64 = 1;
const SUB_WALK: u64 = 2;
const SUB_PAIRS: u64 = 3;
const SUB_SOURCES: u64 = 4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Value {
    Int(u64),
    Num(f64),
    Bool(bool),
}

impl Value {
    pub fn render(&self) -> String {
        match *self {
            Value::Int(i) => i.to_string(),
            Value::Num(x) => num(x),
            Value::Bool(b) => b.to_string(),
        }
    }

    pub fn as_f64(&self) -> f64 {
        match *self {
            Value::Int(i) => i as f64,
            Value::Num(x) => x,
            Value::Bool(b) => f64::from(u8::from(b)),
        }
    }
}

impl From<usize> for Value {
    fn from(i: usize) -> Self {
        Value::Int(i as u64)
    }
}

impl From<u64> for Value {
    fn from(i: u64) -> Self {
        Value::Int(i)
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Num(x)
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

/// One output row: a single item (pair, walk, graph) of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub point: usize,
    pub run: usize,
    pub item: usize,
    pub seed: u64,
    pub values: Vec<Value>,
}

/// Leading columns shared by every kind.
pub const KEY_COLUMNS: [&str; 7] = ["point", "n", "density", "np", "run", "item", "seed"];

/// Kind-specific columns, in output order.
pub fn columns(kind: Kind) -> &'static [&'static str] {
    match kind {
        Kind::PiConvergence => &[
            "residual",
            "max_rel_raw",
            "mean_rel_raw",
            "max_rel_normalized",
            "mean_rel_normalized",
            "max_rel_simple",
            "max_rel_uniform",
            "min_n_pi",
            "max_n_pi",
        ],
        Kind::CoverConvergence => &[
            "start",
            "cover_time",
            "formula",
            "ratio",
            "mix_t",
            "t0",
            "bound",
            "bound_ratio",
        ],
        Kind::MixingScan => &[
            "mix_t",
            "threshold",
            "ln2_n",
            "ratio",
            "d_at_t",
            "submult_violations",
            "dbar_exhaustive",
            "residual",
        ],
        Kind::ZRatio => &[
            "x",
            "y",
            "depth",
            "z_lower",
            "exact_lower",
            "ratio_lower",
            "z_scaled",
            "in_succeeded",
            "out_succeeded",
            "l0",
            "z_upper",
            "exact_upper",
            "remainder_rel",
        ],
        Kind::Contraction => &[
            "u",
            "v",
            "w",
            "pi_v",
            "pi_w",
            "pi_sigma",
            "closeness_rel",
            "mix_t",
            "t1",
            "avoid_v",
            "avoid_w",
            "avoid_joint",
            "avoid_sigma",
            "gap",
            "joint_gap",
        ],
        Kind::ConnectivityThreshold => &["strongly_connected", "zero_in", "zero_out", "edges"],
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointError {
    pub run: usize,
    pub seed: u64,
    pub message: String,
}

/// Per-point aggregate. `value` is the mean of the kind's headline column
/// over all rows of the point, `stderr` its standard error.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointSummary {
    pub point: usize,
    pub n: usize,
    pub density: String,
    pub np: f64,
    pub p: f64,
    pub rows: usize,
    pub error: Option<PointError>,
    pub statistic: &'static str,
    pub value: f64,
    pub stderr: f64,
    pub theory: Option<f64>,
    pub ratio_to_theory: Option<f64>,
    pub extra: BTreeMap<String, f64>,
}

#[derive(Clone, Debug)]
pub struct ExperimentResult {
    pub spec: ExperimentSpec,
    pub spec_hash: String,
    pub rows: Vec<Row>,
    pub points: Vec<PointSummary>,
}

/// Executes the spec. Every `(point, run)` task runs in the rayon pool;
/// results are assembled in `(point, run, item)` order. A failing task drops
/// its point's rows and records the first error (by run index); the other
/// points are unaffected.
pub fn run_experiment(spec: &ExperimentSpec) -> ExperimentResult {
    let tasks: Vec<(usize, usize)> = (0..spec.grid.len())
        .flat_map(|p| (0..spec.runs).map(move |r| (p, r)))
        .collect();
    let outcomes: Vec<(usize, usize, u64, Result<Vec<Vec<Value>>, String>)> = tasks
        .par_iter()
        .map(|&(p, r)| {
            let seed = derive_seed(spec.master_seed, p as u64, r as u64);
            let out = run_task(spec, &spec.grid[p], seed).map_err(|e| e.to_string());
            (p, r, seed, out)
        })
        .collect();

    let mut rows = Vec::new();
    let mut points = Vec::new();
    for (p, point) in spec.grid.iter().enumerate() {
        let mine: Vec<_> = outcomes.iter().filter(|o| o.0 == p).collect();
        let error = mine.iter().find_map(|(_, r, seed, out)| {
            out.as_ref().err().map(|m| PointError {
                run: *r,
                seed: *seed,
                message: m.clone(),
            })
        });
        let mut point_rows = Vec::new();
        if error.is_none() {
            for (_, r, seed, out) in mine {
                for (item, values) in out.as_ref().unwrap().iter().enumerate() {
                    point_rows.push(Row {
                        point: p,
                        run: *r,
                        item,
                        seed: *seed,
                        values: values.clone(),
                    });
                }
            }
        }
        points.push(summarize(spec, p, point, &point_rows, error));
        rows.extend(point_rows);
    }
    ExperimentResult {
        spec: spec.clone(),
        spec_hash: spec.hash(),
        rows,
        points,
    }
}

fn graph(point: &GridPoint, seed: u64) -> Result<Digraph, LabError> {
    Ok(generate(&GenParams::new(point.n, point.p(), seed, GenMethod::GeometricJump)?))
}

/// The `d` that enters the cover-time formula: `np / ln n`, or `∞` for the
/// `(ln n)²` density.
pub fn formula_d(point: &GridPoint) -> f64 {
    match point.density {
        Density::LogSquared => f64::INFINITY,
        _ => point.d(),
    }
}

/// Recomputes all items of one `(point, run)` task from its seed.
pub fn run_task(spec: &ExperimentSpec, point: &GridPoint, seed: u64) -> Result<Vec<Vec<Value>>, LabError> {
    let g = graph(point, seed)?;
    let n = point.n;
    match spec.kind {
        Kind::ConnectivityThreshold => {
            let (din, dout) = g.degrees();
            Ok(vec![vec![
                is_strongly_connected(&g).into(),
                din.iter().filter(|&&k| k == 0).count().into(),
                dout.iter().filter(|&&k| k == 0).count().into(),
                g.edge_count().into(),
            ]])
        }
        Kind::PiConvergence => {
            let c = chain_from(&g)?;
            let st = stationary(&c, spec.tol, STATIONARY_MAX_ITERS)?;
            let pred = predict_pi(&g, Some(point.p()))?;
            let pi = st.pi.probs();
            let rel = |q: &[f64]| {
                let errs: Vec<f64> = pi.iter().zip(q).map(|(a, b)| (a / b - 1.0).abs()).collect();
                let max = errs.iter().cloned().fold(0.0, f64::max);
                (max, errs.iter().sum::<f64>() / n as f64)
            };
            let (max_raw, mean_raw) = rel(&pred.raw);
            let (max_norm, mean_norm) = rel(&pred.normalized);
            let (max_simple, _) = rel(&pred.simple);
            let (max_unif, _) = rel(&vec![pred.uniform; n]);
            let min_pi = pi.iter().cloned().fold(f64::INFINITY, f64::min);
            let max_pi = pi.iter().cloned().fold(0.0, f64::max);
            Ok(vec![vec![
                st.residual.into(),
                max_raw.into(),
                mean_raw.into(),
                max_norm.into(),
                mean_norm.into(),
                max_simple.into(),
                max_unif.into(),
                (min_pi * n as f64).into(),
                (max_pi * n as f64).into(),
            ]])
        }
        Kind::CoverConvergence => {
            if !is_strongly_connected(&g) {
                return Err(dwalk_core::Error::NotStronglyConnected.into());
            }
            let start = rng_from_seed(child_seed(seed, SUB_START)).gen_range(0..n);
            let walk = simulate_cover(&g, start, child_seed(seed, SUB_WALK))?;
            let formula = cover_formula(n as f64, formula_d(point))?;
            let (mix_t, t0, bound) = if spec.bound_vertices > 0 {
                cover_bound(spec, &g, start, formula, seed)?
            } else {
                (f64::NAN, f64::NAN, f64::NAN)
            };
            Ok(vec![vec![
                start.into(),
                walk.cover_time.into(),
                formula.into(),
                (walk.cover_time as f64 / formula).into(),
                mix_t.into(),
                t0.into(),
                bound.into(),
                (bound / formula).into(),
            ]])
        }
        Kind::MixingScan => {
            let c = chain_from(&g)?;
            let st = stationary(&c, spec.tol, STATIONARY_MAX_ITERS)?;
            let rep = mixing(&c, &st.pi, &mix_options(spec, n, seed))?;
            let ln2 = (n as f64).ln().powi(2);
            Ok(vec![vec![
                rep.t.into(),
                rep.threshold.into(),
                ln2.into(),
                (rep.t as f64 / ln2).into(),
                rep.d_trace[rep.t].into(),
                rep.submultiplicativity_violations(1e-9, 1e-13).len().into(),
                rep.dbar_exhaustive.into(),
                st.residual.into(),
            ]])
        }
        Kind::ZRatio => {
            let c = chain_from(&g)?;
            let mut rng = rng_from_seed(child_seed(seed, SUB_PAIRS));
            let pairs: Vec<(usize, usize)> = (0..spec.pairs)
                .map(|_| {
                    let x = rng.gen_range(0..n);
                    let y = (x + rng.gen_range(1..n)) % n;
                    (x, y)
                })
                .collect();
            let m = n as f64 * (n as f64 - 1.0) * point.p();
            pairs
                .par_iter()
                .map(|&(x, y)| {
                    let lo = z_lower(&g, x, y)?;
                    let exact_lo = step_n(&c, &Dist::point(n, x), 2 * lo.depth + 1)?[y];
                    let up = z_upper_report(&g, x, y, spec.eta)?;
                    Ok(vec![
                        x.into(),
                        y.into(),
                        lo.depth.into(),
                        lo.z.into(),
                        exact_lo.into(),
                        (lo.z / exact_lo).into(),
                        (lo.z * m / g.in_degree(y) as f64).into(),
                        lo.in_succeeded.into(),
                        lo.out_succeeded.into(),
                        up.depths.l0.into(),
                        up.z_up.into(),
                        up.exact.into(),
                        (up.remainder / up.exact).into(),
                    ])
                })
                .collect()
        }
        Kind::Contraction => contraction_rows(spec, point, &g, seed),
    }
}

fn mix_options(spec: &ExperimentSpec, n: usize, seed: u64) -> MixOptions {
    let mut opts = MixOptions::new(n);
    opts.threshold = spec.threshold.unwrap_or_else(|| default_threshold(n));
    opts.seed = child_seed(seed, SUB_SOURCES);
    opts
}

/// `t₀ + 1 + (n/k) Σ_{v ∈ S} Σ_{s ≥ t₀} Pr(A_v(s))` over `k` sampled
/// vertices `S`, with `t₀ = (1 + ε)·formula` and `A_v(s)` the event that the
/// walk misses `v` during steps `T..=s`.
fn cover_bound(
    spec: &ExperimentSpec,
    g: &Digraph,
    start: usize,
    formula: f64,
    seed: u64,
) -> Result<(f64, f64, f64), LabError> {
    let n = g.n();
    let c = chain_from(g)?;
    let st = stationary(&c, spec.tol, STATIONARY_MAX_ITERS)?;
    let t = mixing(&c, &st.pi, &mix_options(spec, n, seed))?.t;
    let t0 = ((1.0 + spec.epsilon) * formula).ceil() as usize;
    let k = spec.bound_vertices.min(n);
    let mut verts: Vec<usize> = (0..n).collect();
    let (sample, _) = verts.partial_shuffle(&mut rng_from_seed(child_seed(seed, SUB_PAIRS)), k);
    let mut sample = sample.to_vec();
    sample.sort_unstable();
    let max_steps = 1000 * n.max(t0);
    let tails = sample
        .par_iter()
        .map(|&v| avoid_tail_sum(&c, &Dist::point(n, start), &[v], t, t0, TAIL_TOL, max_steps))
        .collect::<Result<Vec<f64>, _>>()?;
    let sum: f64 = tails.iter().sum();
    Ok((t as f64, t0 as f64, t0 as f64 + 1.0 + sum * n as f64 / k as f64))
}

/// Vertices whose in-degree equals the median in-degree, topped up with the
/// next-closest degrees when fewer than `want` exist.
pub fn median_degree_vertices(g: &Digraph, want: usize) -> Vec<usize> {
    let (din, _) = g.degrees();
    let mut sorted = din.clone();
    sorted.sort_unstable();
    let med = sorted[sorted.len() / 2];
    let mut by_gap: Vec<usize> = (0..g.n()).collect();
    by_gap.sort_by_key(|&v| (din[v].abs_diff(med), v));
    let exact = by_gap.iter().take_while(|&&v| din[v] == med).count();
    by_gap.truncate(exact.max(want.min(g.n())));
    by_gap.sort_unstable();
    by_gap
}

fn contraction_rows(
    spec: &ExperimentSpec,
    point: &GridPoint,
    g: &Digraph,
    seed: u64,
) -> Result<Vec<Vec<Value>>, LabError> {
    let n = g.n();
    let c = chain_from(g)?;
    let st = stationary(&c, spec.tol, STATIONARY_MAX_ITERS)?;
    let t = mixing(&c, &st.pi, &mix_options(spec, n, seed))?.t;
    let t1 = ((1.0 - spec.epsilon) * cover_formula(n as f64, formula_d(point))?).floor() as usize;
    let cands = median_degree_vertices(g, 2);
    let mut rng = rng_from_seed(child_seed(seed, SUB_PAIRS));
    let triples: Vec<(usize, usize, usize)> = (0..spec.pairs)
        .map(|_| {
            let pick: Vec<usize> = cands.choose_multiple(&mut rng, 2).cloned().collect();
            let (v, w) = (pick[0], pick[1]);
            let u = loop {
                let u = rng.gen_range(0..n);
                if u != v && u != w {
                    break u;
                }
            };
            (u, v, w)
        })
        .collect();
    let pi = st.pi.probs();
    triples
        .par_iter()
        .map(|&(u, v, w)| {
            let cc = contract(&c, v, w)?;
            let sigma = v.min(w);
            let pis = stationary(&cc, spec.tol, STATIONARY_MAX_ITERS)?.pi[sigma];
            let merged = pi[v] + pi[w];
            let from = Dist::point(n, u);
            let av = avoid_prob(&c, &from, v, t, t1)?;
            let aw = avoid_prob(&c, &from, w, t, t1)?;
            let joint = avoid_set_prob(&c, &from, &[v, w], t, t1)?;
            let asig = avoid_prob(&cc, &Dist::point(n - 1, contracted_index(v, w, u)), sigma, t, t1)?;
            let prod = av * aw;
            Ok(vec![
                u.into(),
                v.into(),
                w.into(),
                pi[v].into(),
                pi[w].into(),
                pis.into(),
                ((pis - merged).abs() / merged).into(),
                t.into(),
                t1.into(),
                av.into(),
                aw.into(),
                joint.into(),
                asig.into(),
                ((asig - prod).abs() / prod).into(),
                ((joint - prod).abs() / prod).into(),
            ])
        })
        .collect()
}

fn column(spec: &ExperimentSpec, rows: &[Row], name: &str) -> Vec<f64> {
    let i = columns(spec.kind).iter().position(|c| *c == name).unwrap();
    rows.iter().map(|r| r.values[i].as_f64()).collect()
}

fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let k = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / k;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

fn max(xs: &[f64]) -> f64 {
    xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
}

fn summarize(
    spec: &ExperimentSpec,
    index: usize,
    point: &GridPoint,
    rows: &[Row],
    error: Option<PointError>,
) -> PointSummary {
    let col = |name| column(spec, rows, name);
    let mut extra = BTreeMap::new();
    let ln_n = (point.n as f64).ln();
    let (statistic, values, theory) = match spec.kind {
        Kind::PiConvergence => {
            for name in ["mean_rel_raw", "max_rel_normalized", "max_rel_simple", "max_rel_uniform"] {
                extra.insert(format!("mean_{name}"), mean_stderr(&col(name)).0);
            }
            ("max_rel_raw", col("max_rel_raw"), None)
        }
        Kind::CoverConvergence => {
            let f = cover_formula(point.n as f64, formula_d(point)).ok();
            let (m, _) = mean_stderr(&col("cover_time"));
            extra.insert("ratio_of_mean".into(), f.map_or(f64::NAN, |f| m / f));
            extra.insert("mean_bound_ratio".into(), mean_stderr(&col("bound_ratio")).0);
            ("cover_time", col("cover_time"), f)
        }
        Kind::MixingScan => {
            let ts = col("mix_t");
            let within = ts.iter().filter(|&&t| t <= ln_n * ln_n).count();
            extra.insert("runs_within_ln2_n".into(), within as f64);
            extra.insert("max_mix_t".into(), max(&ts));
            extra.insert(
                "submult_violations".into(),
                col("submult_violations").iter().sum(),
            );
            ("mix_t", ts, Some(ln_n * ln_n))
        }
        Kind::ZRatio => {
            let z = col("z_lower");
            let ex = col("exact_lower");
            let viol = z.iter().zip(&ex).filter(|(z, e)| **z > **e + 1e-12).count();
            extra.insert("lower_violations".into(), viol as f64);
            let zu = col("z_upper");
            let eu = col("exact_upper");
            let viol_up = zu.iter().zip(&eu).filter(|(z, e)| **z > **e + 1e-12).count();
            extra.insert("upper_violations".into(), viol_up as f64);
            let rem = col("remainder_rel");
            extra.insert("mean_remainder_rel".into(), mean_stderr(&rem).0);
            extra.insert("max_remainder_rel".into(), max(&rem));
            let scaled = col("z_scaled");
            extra.insert("min_z_scaled".into(), scaled.iter().cloned().fold(f64::INFINITY, f64::min));
            extra.insert("max_z_scaled".into(), max(&scaled));
            let ratios: Vec<f64> = col("ratio_lower").into_iter().filter(|r| r.is_finite()).collect();
            ("ratio_lower", ratios, Some(1.0))
        }
        Kind::Contraction => {
            for name in ["closeness_rel", "gap", "joint_gap"] {
                extra.insert(format!("max_{name}"), max(&col(name)));
            }
            extra.insert("mean_gap".into(), mean_stderr(&col("gap")).0);
            extra.insert("mean_joint_gap".into(), mean_stderr(&col("joint_gap")).0);
            ("closeness_rel", col("closeness_rel"), None)
        }
        Kind::ConnectivityThreshold => ("strongly_connected", col("strongly_connected"), None),
    };
    let (value, stderr) = mean_stderr(&values);
    PointSummary {
        point: index,
        n: point.n,
        density: point.density.to_string(),
        np: point.np(),
        p: point.p(),
        rows: rows.len(),
        error,
        statistic,
        value,
        stderr,
        theory,
        ratio_to_theory: theory.map(|t| value / t),
        extra,
    }
}

impl ExperimentResult {
    pub fn header(&self) -> Vec<&'static str> {
        KEY_COLUMNS.iter().chain(columns(self.spec.kind)).copied().collect()
    }

    /// Rendered cells of one row.
    pub fn cells(&self, row: &Row) -> Vec<String> {
        render_row(&self.spec, row)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), LabError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.header())?;
        for row in &self.rows {
            w.write_record(self.cells(row))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn sidecar(&self) -> serde_json::Value {
        serde_json::json!({
            "tool": "dwalk",
            "version": env!("CARGO_PKG_VERSION"),
            "kind": self.spec.kind,
            "master_seed": self.spec.master_seed,
            "seed_derivation": "derive_seed(master_seed, point, run) = child_seed(child_seed(master_seed, point), run)",
            "spec_hash": self.spec_hash,
            "spec": self.spec.canonical(),
            "columns": self.header(),
            "rows": self.rows.len(),
            "points": self.points,
        })
    }

    /// Writes the CSV to `spec.output` and the sidecar next to it with a
    /// `.json` extension.
    pub fn save(&self) -> Result<(), LabError> {
        let path = &self.spec.output;
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        self.write_csv(std::io::BufWriter::new(std::fs::File::create(path)?))?;
        let json = serde_json::to_string_pretty(&self.sidecar())?;
        std::fs::write(path.with_extension("json"), json + "\n")?;
        Ok(())
    }
}

pub fn render_row(spec: &ExperimentSpec, row: &Row) -> Vec<String> {
    let point = &spec.grid[row.point];
    let mut cells = vec![
        row.point.to_string(),
        point.n.to_string(),
        point.density.to_string(),
        num(point.np()),
        row.run.to_string(),
        row.item.to_string(),
        row.seed.to_string(),
    ];
    cells.extend(row.values.iter().map(Value::render));
    cells
}

/// Outcome of re-running one CSV row.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RerunReport {
    pub row: usize,
    pub point: usize,
    pub run: usize,
    pub item: usize,
    pub seed: u64,
    pub recorded: Vec<String>,
    pub recomputed: Vec<String>,
    pub matched: bool,
}

/// Recomputes data row `row` (1-based, header excluded) of a CSV written by
/// [`ExperimentResult::save`], reading the spec from the sidecar.
pub fn rerun_row(csv_path: &std::path::Path, row: usize) -> Result<RerunReport, LabError> {
    let sidecar: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(csv_path.with_extension("json"))?)?;
    let text = sidecar["spec"]
        .as_str()
        .ok_or_else(|| LabError::Input("sidecar has no spec text".into()))?;
    let spec = crate::spec::parse_spec(text)?;
    let mut reader = csv::Reader::from_path(csv_path)?;
    let record = reader
        .records()
        .nth(row.checked_sub(1).ok_or_else(|| LabError::Input("rows are numbered from 1".into()))?)
        .ok_or_else(|| LabError::Input(format!("{} has no data row {row}", csv_path.display())))??;
    let recorded: Vec<String> = record.iter().map(str::to_string).collect();
    let field = |i: usize| -> Result<u64, LabError> {
        recorded
            .get(i)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| LabError::Input(format!("row {row}: bad {} column", KEY_COLUMNS[i])))
    };
    let (point, run, item, seed) = (field(0)? as usize, field(4)? as usize, field(5)? as usize, field(6)?);
    if point >= spec.grid.len() {
        return Err(LabError::Input(format!("row {row}: point {point} is not in the grid")));
    }
    if seed != derive_seed(spec.master_seed, point as u64, run as u64) {
        return Err(LabError::Breach(format!(
            "row {row}: seed {seed} is not derive_seed({}, {point}, {run})",
            spec.master_seed
        )));
    }
    let items = run_task(&spec, &spec.grid[point], seed)?;
    let values = items
        .get(item)
        .ok_or_else(|| LabError::Breach(format!("row {row}: recomputation has no item {item}")))?
        .clone();
    let recomputed = render_row(
        &spec,
        &Row {
            point,
            run,
            item,
            seed,
            values,
        },
    );
    Ok(RerunReport {
        row,
        point,
        run,
        item,
        seed,
        matched: recomputed == recorded,
        recorded,
        recomputed,
    })
}
