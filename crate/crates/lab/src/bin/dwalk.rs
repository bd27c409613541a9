use std::fs;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use dwalk_core::chain::{
    contract, hitting_time, mixing, stationary, stationary_dense, MixOptions, Sources, DENSE_LIMIT,
};
use dwalk_core::degree::{check_envelope, cover_formula, predict_pi, v_star, DegreeProfile};
use dwalk_core::digraph::{generate, read_edge_list, write_edge_list, GenMethod, GenParams};
use dwalk_core::trees::{z_lower, z_upper_report};
use dwalk_core::walker::{cover_time_mc, geometric_law_check, lambda, return_poly, StartPolicy};
use dwalk_core::{chain_from, Digraph, Dist};
use dwalk_lab::{parse_spec, rerun_row, run_experiment, LabError};

#[derive(Parser)]
#[command(name = "dwalk", version, about = "Random walks on random digraphs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct GraphArgs {
    /// Edge-list file (`n m` header, then `u v` lines).
    #[arg(long, short = 'g', conflicts_with_all = ["n", "p", "d"])]
    graph: Option<PathBuf>,
    /// Generate D(n, p) instead of reading a file.
    #[arg(long, short = 'n')]
    n: Option<usize>,
    #[arg(long, conflicts_with = "d")]
    p: Option<f64>,
    /// Set p so that np = d ln n.
    #[arg(long)]
    d: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "geometric-jump")]
    method: String,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample D(n, p) and write its edge list.
    Gen {
        #[command(flatten)]
        graph: GraphArgs,
        /// Output file; stdout when omitted.
        #[arg(long, short = 'o')]
        out: Option<PathBuf>,
    },
    /// Stationary distribution by power iteration (or dense LU).
    Stationary {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long, default_value_t = 1_000_000)]
        max_iters: usize,
        /// Solve the balance equations directly (n <= 2000).
        #[arg(long)]
        dense: bool,
    },
    /// Mixing time T and the d(t), d̄(t) traces.
    Mix {
        #[command(flatten)]
        graph: GraphArgs,
        /// Defaults to min(n^-3, 1e-9).
        #[arg(long)]
        threshold: Option<f64>,
        /// Use every vertex as a source for d(t), whatever n is.
        #[arg(long)]
        all_sources: bool,
        /// Number of d̄ sources; 0 means all pairs.
        #[arg(long)]
        dbar_sources: Option<usize>,
        #[arg(long, default_value_t = 10_000)]
        cap: usize,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Monte Carlo cover time.
    Cover {
        #[command(flatten)]
        graph: GraphArgs,
        /// fixed:V, uniform or sampled:K.
        #[arg(long, default_value = "uniform")]
        start: String,
        #[arg(long, default_value_t = 10)]
        runs: usize,
        /// Seed of the walks (the graph uses --seed).
        #[arg(long, default_value_t = 0)]
        walk_seed: u64,
    },
    /// First-return polynomial of a vertex and its modulus on a circle.
    Returns {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        vertex: usize,
        #[arg(long)]
        horizon: usize,
        /// Circle radius 1 + λ with λ = 1/(kT).
        #[arg(long, default_value_t = 1.0)]
        k: f64,
        #[arg(long, default_value_t = 4096)]
        samples: usize,
    },
    /// Exact avoidance probabilities against the geometric law.
    Geomlaw {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        vertex: usize,
        #[arg(long)]
        start: usize,
        /// Defaults to the mixing time.
        #[arg(long)]
        horizon: Option<usize>,
        /// Offsets t − T, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        offsets: Vec<usize>,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Tree-based lower and upper estimates of an exact transition probability.
    Ztest {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        x: usize,
        #[arg(long)]
        y: usize,
        #[arg(long, default_value_t = 1.0 / 250.0)]
        eta: f64,
    },
    /// Expected degree counts, buckets, and optionally a graph's envelope.
    Degrees {
        #[command(flatten)]
        graph: GraphArgs,
    },
    /// Predicted stationary distribution compared with the exact one.
    Predict {
        #[command(flatten)]
        graph: GraphArgs,
        /// Use m = n(n−1)p; by default the edge count.
        #[arg(long = "expected-p")]
        expected_p: Option<f64>,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Cover-time formula d ln(d/(d−1)) n ln n.
    Formula {
        #[arg(long, short = 'n')]
        n: f64,
        /// `inf` gives n ln n.
        #[arg(long)]
        d: f64,
    },
    /// Expected hitting times of a target.
    Hit {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        target: usize,
    },
    /// Merge two vertices and write the contracted chain.
    Contract {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        v: usize,
        #[arg(long)]
        w: usize,
        #[arg(long, short = 'o')]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Run a sweep spec; writes CSV plus a JSON sidecar.
    Experiment {
        spec: PathBuf,
        /// Overrides the spec's output path.
        #[arg(long, short = 'o')]
        output: Option<PathBuf>,
        /// Parse and echo the spec without running it.
        #[arg(long)]
        check: bool,
    },
    /// Recompute one row of an experiment CSV and compare.
    Rerun {
        csv: PathBuf,
        /// Data row, counted from 1 below the header.
        #[arg(long)]
        row: usize,
    },
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// The graph and a provenance record for JSON output.
fn load(a: &GraphArgs) -> Result<(Digraph, Value, Option<f64>), LabError> {
    if let Some(path) = &a.graph {
        let bytes = fs::read(path)?;
        let g = read_edge_list(BufReader::new(&bytes[..]))?;
        let prov = json!({ "file": path.display().to_string(), "sha256": sha256_hex(&bytes) });
        return Ok((g, prov, None));
    }
    let n = a
        .n
        .ok_or_else(|| LabError::Input("give --graph FILE or -n N with --p or --d".into()))?;
    let method: GenMethod = a.method.parse()?;
    let params = match (a.p, a.d) {
        (Some(p), None) => GenParams::new(n, p, a.seed, method)?,
        (None, Some(d)) => GenParams { method, ..GenParams::with_d(n, d, a.seed)? },
        _ => return Err(LabError::Input("exactly one of --p and --d is needed".into())),
    };
    let g = generate(&params);
    let prov = json!({ "generated": params, "d": params.d() });
    Ok((g, prov, Some(params.p)))
}

fn emit(v: &Value) -> Result<(), LabError> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v)?;
    writeln!(out)?;
    Ok(())
}

fn open_out(path: &Option<PathBuf>) -> Result<Box<dyn Write>, LabError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(fs::File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(cmd: Cmd) -> Result<(), LabError> {
    match cmd {
        Cmd::Gen { graph, out } => {
            let (g, prov, _) = load(&graph)?;
            let mut w = open_out(&out)?;
            write_edge_list(&g, &mut w)?;
            w.flush()?;
            if out.is_some() {
                emit(&json!({ "n": g.n(), "edges": g.edge_count(), "input": prov }))?;
            }
        }
        Cmd::Stationary { graph, tol, max_iters, dense } => {
            let (g, prov, _) = load(&graph)?;
            let c = chain_from(&g)?;
            let report = if dense {
                if g.n() > DENSE_LIMIT {
                    return Err(LabError::Input(format!("--dense is limited to n <= {DENSE_LIMIT}")));
                }
                json!({ "method": "dense-lu", "pi": stationary_dense(&c)? })
            } else {
                let st = stationary(&c, tol, max_iters)?;
                json!({ "method": "power", "tol": tol, "result": st })
            };
            emit(&json!({ "n": g.n(), "input": prov, "stationary": report }))?;
        }
        Cmd::Mix { graph, threshold, all_sources, dbar_sources, cap, tol } => {
            let (g, prov, _) = load(&graph)?;
            let c = chain_from(&g)?;
            let st = stationary(&c, tol, 1_000_000)?;
            let mut opts = MixOptions::new(g.n());
            if let Some(t) = threshold {
                opts.threshold = t;
            }
            if all_sources {
                opts.sources = Sources::All;
            }
            if let Some(k) = dbar_sources {
                opts.dbar_sources = (k > 0).then_some(k);
            }
            opts.step_cap = cap;
            opts.seed = graph.seed;
            let rep = mixing(&c, &st.pi, &opts)?;
            let violations = rep.submultiplicativity_violations(1e-9, 1e-13);
            emit(&json!({
                "n": g.n(),
                "input": prov,
                "stationary_residual": st.residual,
                "mixing": rep,
                "submultiplicativity_violations": violations,
            }))?;
        }
        Cmd::Cover { graph, start, runs, walk_seed } => {
            let (g, prov, _) = load(&graph)?;
            let policy: StartPolicy = start.parse()?;
            let s = cover_time_mc(&g, policy, runs, walk_seed)?;
            let formula = predicted_cover(&g);
            emit(&json!({
                "n": g.n(),
                "input": prov,
                "walk_seed": walk_seed,
                "summary": s,
                "formula": formula,
                "ratio": formula.map(|f| s.mean / f),
            }))?;
        }
        Cmd::Returns { graph, vertex, horizon, k, samples } => {
            let (g, prov, _) = load(&graph)?;
            let c = chain_from(&g)?;
            let poly = return_poly(&c, vertex, horizon)?;
            let lam = lambda(k, horizon);
            let scan = poly.min_modulus_on_circle(1.0 + lam, samples);
            emit(&json!({
                "n": g.n(),
                "input": prov,
                "vertex": vertex,
                "horizon": horizon,
                "r_v": poly.at_one(),
                "lambda": lam,
                "scan": scan,
                "coeffs": poly.coeffs,
            }))?;
        }
        Cmd::Geomlaw { graph, vertex, start, horizon, offsets, tol } => {
            let (g, prov, _) = load(&graph)?;
            let c = chain_from(&g)?;
            let st = stationary(&c, tol, 1_000_000)?;
            let t = match horizon {
                Some(t) => t,
                None => mixing(&c, &st.pi, &MixOptions::new(g.n()))?.t,
            };
            let grid: Vec<usize> = offsets.iter().map(|o| t + o).collect();
            let table = geometric_law_check(&c, &st.pi, vertex, start, t, &grid)?;
            emit(&json!({ "n": g.n(), "input": prov, "table": table }))?;
        }
        Cmd::Ztest { graph, x, y, eta } => {
            let (g, prov, _) = load(&graph)?;
            let lo = z_lower(&g, x, y)?;
            let c = chain_from(&g)?;
            let exact = dwalk_core::chain::step_n(&c, &Dist::point(g.n(), x), 2 * lo.depth + 1)?[y];
            let up = z_upper_report(&g, x, y, eta)?;
            if lo.z > exact + 1e-12 || up.z_up > up.exact + 1e-12 {
                return Err(LabError::Breach(format!(
                    "tree estimate exceeds the exact probability (lower {} vs {exact}, upper {} vs {})",
                    lo.z, up.z_up, up.exact
                )));
            }
            emit(&json!({
                "n": g.n(),
                "input": prov,
                "lower": lo,
                "lower_exact": exact,
                "upper": up,
            }))?;
        }
        Cmd::Degrees { graph } => {
            let (g, prov, p) = load(&graph)?;
            let p = p.unwrap_or_else(|| dwalk_core::trees::np_estimate(&g) / g.n() as f64);
            let profile = DegreeProfile::new(g.n(), p)?;
            let env = check_envelope(&g, &profile)?;
            let vs = v_star(&g, &profile);
            emit(&json!({
                "n": g.n(),
                "input": prov,
                "profile": profile,
                "envelope": env,
                "envelope_pass": env.all_pass(),
                "v_star_size": vs.len(),
                "v_star_bound": profile.v_star_bound(),
            }))?;
        }
        Cmd::Predict { graph, expected_p, tol } => {
            let (g, prov, _) = load(&graph)?;
            let pred = predict_pi(&g, expected_p)?;
            let st = stationary(&chain_from(&g)?, tol, 1_000_000)?;
            let max_rel = |q: &[f64]| {
                st.pi.probs().iter().zip(q).map(|(a, b)| (a / b - 1.0).abs()).fold(0.0, f64::max)
            };
            emit(&json!({
                "n": g.n(),
                "input": prov,
                "stationary_residual": st.residual,
                "max_rel_error": {
                    "raw": max_rel(&pred.raw),
                    "normalized": max_rel(&pred.normalized),
                    "simple": max_rel(&pred.simple),
                    "uniform": max_rel(&vec![pred.uniform; g.n()]),
                },
                "prediction": pred,
                "pi": st.pi,
            }))?;
        }
        Cmd::Formula { n, d } => {
            emit(&json!({ "n": n, "d": d.to_string(), "cover_formula": cover_formula(n, d)? }))?;
        }
        Cmd::Hit { graph, target } => {
            let (g, prov, _) = load(&graph)?;
            let h = hitting_time(&chain_from(&g)?, target)?;
            let times: Vec<Value> = h
                .times
                .iter()
                .map(|t| t.finite().map_or(json!("inf"), |x| json!(x)))
                .collect();
            emit(&json!({
                "n": g.n(),
                "input": prov,
                "target": target,
                "residual": h.residual,
                "times": times,
            }))?;
        }
        Cmd::Contract { graph, v, w, out, tol } => {
            let (g, prov, _) = load(&graph)?;
            let c = chain_from(&g)?;
            let cc = contract(&c, v, w)?;
            if let Some(path) = &out {
                let mut f = BufWriter::new(fs::File::create(path)?);
                cc.write_text(&mut f)?;
                f.flush()?;
            } else {
                cc.write_text(io::stdout().lock())?;
                return Ok(());
            }
            let pi = stationary(&c, tol, 1_000_000)?.pi;
            let sigma = v.min(w);
            let pis = stationary(&cc, tol, 1_000_000)?.pi[sigma];
            emit(&json!({
                "n": g.n(),
                "input": prov,
                "v": v,
                "w": w,
                "sigma": sigma,
                "pi_v": pi[v],
                "pi_w": pi[w],
                "pi_sigma": pis,
                "closeness_rel": (pis - pi[v] - pi[w]).abs() / (pi[v] + pi[w]),
            }))?;
        }
        Cmd::Experiment { spec, output, check } => {
            let text = fs::read_to_string(&spec)?;
            let mut s = parse_spec(&text)?;
            if let Some(o) = output {
                s.output = o;
            }
            if check {
                print!("{}", s.canonical());
                return Ok(());
            }
            let res = run_experiment(&s);
            res.save()?;
            for p in &res.points {
                match &p.error {
                    Some(e) => eprintln!("point {} ({}:{}) failed at run {}: {}", p.point, p.n, p.density, e.run, e.message),
                    None => eprintln!(
                        "point {} ({}:{}) {} = {} ± {}",
                        p.point,
                        p.n,
                        p.density,
                        p.statistic,
                        dwalk_lab::fmt::num(p.value),
                        dwalk_lab::fmt::num(p.stderr)
                    ),
                }
            }
            emit(&json!({
                "csv": s.output.display().to_string(),
                "sidecar": s.output.with_extension("json").display().to_string(),
                "spec_hash": res.spec_hash,
                "rows": res.rows.len(),
                "failed_points": res.points.iter().filter(|p| p.error.is_some()).count(),
            }))?;
        }
        Cmd::Rerun { csv, row } => {
            let rep = rerun_row(Path::new(&csv), row)?;
            emit(&serde_json::to_value(&rep)?)?;
            if !rep.matched {
                return Err(LabError::Breach(format!("row {row} did not reproduce")));
            }
        }
    }
    Ok(())
}

/// Cover formula at the graph's own density `m / ((n−1) ln n)`.
fn predicted_cover(g: &Digraph) -> Option<f64> {
    let n = g.n() as f64;
    let d = dwalk_core::trees::np_estimate(g) / n.ln();
    cover_formula(n, d).ok()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(k) = std::env::var("DWALK_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        rayon::ThreadPoolBuilder::new().num_threads(k).build_global().ok();
    }
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dwalk: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
