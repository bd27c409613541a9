//! Cross-checks between independent computations of the same quantity.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, ToPrimitive};
use proptest::prelude::*;

use dwalk_core::chain::{
    avoid_curve, avoid_prob, hitting_time, hitting_time_series, mixing, stationary, stationary_dense, step,
    step_n, MixOptions, Sources,
};
use dwalk_core::degree::{binom_pmf, dbar};
use dwalk_core::digraph::{generate, is_strongly_connected, read_edge_list, write_edge_list, GenMethod, GenParams};
use dwalk_core::trees::{z_upper_at, UpDepths};
use dwalk_core::walker::{cover_time_mc, simulate_cover, StartPolicy};
use dwalk_core::{chain_from, Digraph, Dist};

fn strongly_connected(n: usize, p: f64, seed: u64) -> Digraph {
    (0u64..)
        .map(|i| generate(&GenParams::new(n, p, seed.wrapping_add(i), GenMethod::Naive).unwrap()))
        .find(is_strongly_connected)
        .unwrap()
}

/// `n · C(n−1, k) · p^k (1−p)^{n−1−k}` for `k = 0..kmax` in exact rational
/// arithmetic, with `p = num/den`, via the ratio of consecutive terms.
fn dbar_exact(n: usize, num: i64, den: i64, kmax: usize) -> Vec<f64> {
    let int = |x: usize| BigRational::from_integer(BigInt::from(x));
    let p = BigRational::new(BigInt::from(num), BigInt::from(den));
    let q = BigRational::one() - &p;
    let mut term = (0..n - 1).fold(int(n), |acc, _| acc * &q);
    let mut out = Vec::with_capacity(kmax);
    for k in 0..kmax {
        out.push(term.to_f64().unwrap());
        term = term * int(n - 1 - k) * &p / (int(k + 1) * &q);
    }
    out
}

#[test]
fn dbar_matches_exact_rational_arithmetic() {
    for &(n, num, den) in &[(100usize, 1i64, 20i64), (60, 3, 10), (400, 1, 50), (1000, 7, 1000)] {
        let p = num as f64 / den as f64;
        for (k, exact) in dbar_exact(n, num, den, n.min(80)).into_iter().enumerate() {
            if exact < 1e-250 {
                continue;
            }
            let got = dbar(n, p, k);
            let rel = (got - exact).abs() / exact;
            assert!(rel < 1e-11, "n={n} p={p} k={k}: {got} vs {exact} (rel {rel:e})");
        }
    }
}

#[test]
fn pmf_sums_to_one_on_wide_grid() {
    for &(n, p) in &[(2u64, 0.5), (37, 0.9), (5000, 0.0017), (100_000, 1e-4)] {
        let s: f64 = (0..=n).map(|k| binom_pmf(n, k, p)).sum();
        assert!((s - 1.0).abs() < 1e-12, "n={n} p={p}: {s}");
    }
}

#[test]
fn generators_agree_in_distribution() {
    let (n, p) = (60, 0.1);
    let expect = (n * (n - 1)) as f64 * p;
    let sd = (expect * (1.0 - p)).sqrt();
    for method in [GenMethod::Naive, GenMethod::GeometricJump] {
        let runs = 400;
        let mean: f64 = (0..runs)
            .map(|s| generate(&GenParams::new(n, p, s, method).unwrap()).edge_count() as f64)
            .sum::<f64>()
            / runs as f64;
        let se = sd / (runs as f64).sqrt();
        assert!((mean - expect).abs() < 4.0 * se, "{method:?}: mean {mean} vs {expect}");
    }
}

#[test]
fn edge_list_round_trip() {
    let g = generate(&GenParams::with_d(300, 2.0, 4).unwrap());
    let mut buf = Vec::new();
    write_edge_list(&g, &mut buf).unwrap();
    let h = read_edge_list(&buf[..]).unwrap();
    assert_eq!(g, h);
}

#[test]
fn cover_times_respect_the_trivial_floor() {
    let g = strongly_connected(40, 0.15, 3);
    for seed in 0..50 {
        let w = simulate_cover(&g, (seed as usize) % 40, seed).unwrap();
        assert!(w.cover_time >= 39);
        assert_eq!(w.first_visit.iter().copied().max(), Some(w.cover_time));
    }
    let a = cover_time_mc(&g, StartPolicy::UniformRandom, 16, 8).unwrap();
    let b = cover_time_mc(&g, StartPolicy::UniformRandom, 16, 8).unwrap();
    assert_eq!(a, b);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn power_iteration_matches_dense(n in 3usize..=30, p in 0.15f64..0.8, seed in any::<u64>()) {
        let g = strongly_connected(n, p, seed);
        let c = chain_from(&g).unwrap();
        let pw = stationary(&c, 1e-13, 1_000_000).unwrap().pi;
        let de = stationary_dense(&c).unwrap();
        prop_assert!(pw.max_abs_diff(&de) < 1e-10);
        let next = step(&c, &de).unwrap();
        prop_assert!(next.max_abs_diff(&de) < 1e-12);
    }

    #[test]
    fn hitting_solver_matches_series(n in 3usize..=10, p in 0.25f64..0.9, seed in any::<u64>(), t in 0usize..10) {
        let g = strongly_connected(n, p, seed);
        let c = chain_from(&g).unwrap();
        let target = t % n;
        let lu = hitting_time(&c, target).unwrap();
        let series = hitting_time_series(&c, target, 1e-15, 1_000_000).unwrap();
        for (a, b) in lu.times.iter().zip(&series) {
            let a = a.finite().unwrap();
            let b = b.unwrap();
            prop_assert!((a - b).abs() <= 1e-8 * a.max(1.0), "{} vs {}", a, b);
        }
    }

    #[test]
    fn mixing_traces_are_submultiplicative(n in 3usize..=12, p in 0.3f64..0.9, seed in any::<u64>()) {
        let g = strongly_connected(n, p, seed);
        let c = chain_from(&g).unwrap();
        if let Ok(pi) = stationary(&c, 1e-14, 1_000_000) {
            let mut o = MixOptions::new(n);
            o.sources = Sources::All;
            o.dbar_sources = None;
            o.threshold = 1e-6;
            o.step_cap = 5000;
            if let Ok(rep) = mixing(&c, &pi.pi, &o) {
                prop_assert!(rep.submultiplicativity_violations(1e-9, 1e-13).is_empty());
                prop_assert!(rep.deviation_bound_violations(1e-12).is_empty());
                for w in rep.d_trace.windows(2) {
                    prop_assert!(w[1] <= w[0] + 1e-12);
                }
            }
        }
    }

    #[test]
    fn avoidance_is_monotone_and_curves_agree(n in 3usize..=15, p in 0.2f64..0.8, seed in any::<u64>(), from in 0usize..6) {
        let g = strongly_connected(n, p, seed);
        let c = chain_from(&g).unwrap();
        let start = Dist::point(n, 0);
        let taboo = n - 1;
        let cps: Vec<usize> = (from..from + 12).collect();
        let curve = avoid_curve(&c, &start, &[taboo], from, &cps).unwrap();
        for (i, &t) in cps.iter().enumerate() {
            let single = avoid_prob(&c, &start, taboo, from, t).unwrap();
            prop_assert!((single - curve[i]).abs() < 1e-15);
            if i > 0 {
                prop_assert!(curve[i] <= curve[i - 1] + 1e-15);
            }
        }
    }

    #[test]
    fn upper_tree_estimate_never_exceeds_exact(n in 4usize..=12, p in 0.2f64..0.7, seed in any::<u64>(), l1 in 1usize..3, l2 in 1usize..3) {
        let g = strongly_connected(n, p, seed);
        let c = chain_from(&g).unwrap();
        let depths = UpDepths { lambda: f64::NAN, l0: l1 + l2, l1, l2 };
        for x in 0..n {
            let px = step_n(&c, &Dist::point(n, x), l1 + l2 + 1).unwrap();
            for y in 0..n {
                let up = z_upper_at(&g, x, y, depths).unwrap();
                prop_assert!((up.exact - px[y]).abs() < 1e-15);
                prop_assert!(up.z_up <= up.exact + 1e-12);
            }
        }
    }
}
