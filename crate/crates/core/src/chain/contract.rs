use super::{Chain, Origin};
use crate::error::{Error, Result};

/// Index of parent state `x` after merging `v` and `w`.
///
/// The supernode takes `min(v, w)`; states above `max(v, w)` shift down by one.
pub fn contracted_index(v: usize, w: usize, x: usize) -> usize {
    let (lo, hi) = (v.min(w), v.max(w));
    if x == hi {
        lo
    } else if x > hi {
        x - 1
    } else {
        x
    }
}

/// Merges states `v` and `w` of a plain chain into one supernode `σ`.
///
/// `σ` leaves by averaging the rows of `v` and `w`, and every transition into
/// `v` or `w` is redirected to `σ`.
pub fn contract(c: &Chain, v: usize, w: usize) -> Result<Chain> {
    c.check_state(v)?;
    c.check_state(w)?;
    if v == w {
        return Err(Error::InvalidParam(format!("cannot contract state {v} with itself")));
    }
    if c.origin() != Origin::Plain {
        return Err(Error::InvalidParam("contraction needs a plain chain".into()));
    }
    let n = c.n_states();
    let sigma = v.min(w);
    let map = |x| contracted_index(v, w, x);
    let mapped_row = |u: usize, scale: f64| {
        let (t, p) = c.row(u);
        t.iter().zip(p).map(move |(&y, &q)| (map(y), q * scale))
    };

    let mut rows: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n - 1);
    for x in 0..n {
        if x == v.max(w) {
            continue;
        }
        if x == sigma {
            rows.push(mapped_row(v, 0.5).chain(mapped_row(w, 0.5)).collect());
        } else {
            rows.push(mapped_row(x, 1.0).collect());
        }
    }
    Chain::from_rows(rows, Origin::Contracted { v, w, sigma })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{avoid_prob, avoid_set_prob, chain_from, stationary, Dist};
    use crate::digraph::{generate, is_strongly_connected, Digraph, GenMethod, GenParams};
    use proptest::prelude::*;

    #[test]
    fn four_cycle() {
        let c = chain_from(&Digraph::cycle(4)).unwrap();
        let cc = contract(&c, 1, 3).unwrap();
        assert_eq!(cc.n_states(), 3);
        assert_eq!(cc.origin(), Origin::Contracted { v: 1, w: 3, sigma: 1 });
        assert_eq!(cc.row(1), (&[0, 2][..], &[0.5, 0.5][..]));
        let pi = stationary(&cc, 1e-14, 100_000).unwrap().pi;
        for (a, b) in pi.probs().iter().zip([0.25, 0.5, 0.25]) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn twins_keep_shared_row() {
        // 1 and 2 both go to {0, 3} and have no edge between them.
        let g = Digraph::from_edges(4, [(0, 1), (0, 2), (1, 0), (1, 3), (2, 0), (2, 3), (3, 0)])
            .unwrap();
        let c = chain_from(&g).unwrap();
        let cc = contract(&c, 1, 2).unwrap();
        assert_eq!(cc.row(1), (&[0, 2][..], &[0.5, 0.5][..]));
        assert_eq!(cc.row(0), (&[1][..], &[1.0][..]));
    }

    #[test]
    fn two_cycle_collapses() {
        let c = chain_from(&Digraph::cycle(2)).unwrap();
        let cc = contract(&c, 0, 1).unwrap();
        assert_eq!(cc.row(0), (&[0][..], &[1.0][..]));
    }

    #[test]
    fn contracted_chain_cannot_be_contracted() {
        let c = chain_from(&Digraph::complete(4)).unwrap();
        let cc = contract(&c, 0, 1).unwrap();
        assert!(contract(&cc, 0, 1).is_err());
        assert!(contract(&c, 2, 2).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn avoiding_the_supernode_matches(
            n in 3usize..=7,
            p in 0.3f64..0.9,
            seed in any::<u64>(),
            vw in (0usize..7, 0usize..7),
            steps in 0usize..8,
        ) {
            // Redraw with successive seeds until strongly connected.
            let g = (0u64..)
                .map(|i| generate(&GenParams::new(n, p, seed.wrapping_add(i), GenMethod::Naive).unwrap()))
                .find(is_strongly_connected)
                .unwrap();
            let v = vw.0 % n;
            let w = if vw.1 % n == v { (v + 1) % n } else { vw.1 % n };
            let c = chain_from(&g).unwrap();
            let cc = contract(&c, v, w).unwrap();
            let sigma = v.min(w);
            for x in (0..n).filter(|&x| x != v && x != w) {
                let a = avoid_set_prob(&c, &Dist::point(n, x), &[v, w], 0, steps).unwrap();
                let xs = contracted_index(v, w, x);
                let b = avoid_prob(&cc, &Dist::point(n - 1, xs), sigma, 0, steps).unwrap();
                prop_assert!((a - b).abs() <= 1e-15, "x={} a={} b={}", x, a, b);
            }
        }
    }

    #[test]
    fn rows_sum_to_one() {
        let g = generate(&GenParams::with_d(80, 3.0, 2).unwrap());
        let c = chain_from(&g).unwrap();
        let cc = contract(&c, 5, 40).unwrap();
        for u in 0..cc.n_states() {
            let s: f64 = cc.row(u).1.iter().sum();
            assert!((s - 1.0).abs() <= 1e-12);
        }
    }
}
