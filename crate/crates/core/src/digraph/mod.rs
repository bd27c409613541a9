//! Immutable directed graphs on dense vertex ids `0..n`.
//!
//! A [`Digraph`] stores both the forward (out-neighbour) and reverse
//! (in-neighbour) adjacency in compressed sparse row form. Both lists are
//! sorted ascending, there are no self-loops and no parallel edges.

mod analysis;
mod generate;
mod io;

pub use analysis::{
    is_strongly_connected, l10, small_vertices, structural_report, weak_distance, Check,
    StructOptions, StructReport, Witness,
};
pub use generate::{generate, GenMethod, GenParams};
pub use io::{read_edge_list, write_edge_list};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    out_offsets: Vec<usize>,
    out_targets: Vec<usize>,
    in_offsets: Vec<usize>,
    in_sources: Vec<usize>,
}

impl Digraph {
    /// Builds a digraph from an arbitrary edge list.
    ///
    /// Rejects out-of-range ids, self-loops and repeated edges.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut edges: Vec<(usize, usize)> = edges.into_iter().collect();
        for &(u, v) in &edges {
            if u >= n {
                return Err(Error::VertexOutOfRange { vertex: u, n });
            }
            if v >= n {
                return Err(Error::VertexOutOfRange { vertex: v, n });
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
        }
        edges.sort_unstable();
        if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateEdge(w[0].0, w[0].1));
        }
        Ok(Self::from_sorted_unique(n, &edges))
    }

    /// Builds from edges already sorted lexicographically and free of
    /// duplicates and self-loops. Only checked in debug builds.
    pub(crate) fn from_sorted_unique(n: usize, edges: &[(usize, usize)]) -> Self {
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(edges.iter().all(|&(u, v)| u != v && u < n && v < n));

        let mut out_offsets = vec![0usize; n + 1];
        let mut in_offsets = vec![0usize; n + 1];
        for &(u, v) in edges {
            out_offsets[u + 1] += 1;
            in_offsets[v + 1] += 1;
        }
        for i in 0..n {
            out_offsets[i + 1] += out_offsets[i];
            in_offsets[i + 1] += in_offsets[i];
        }
        let out_targets: Vec<usize> = edges.iter().map(|&(_, v)| v).collect();

        // Scanning edges in (u, v) order fills every in-list in ascending u.
        let mut cursor = in_offsets.clone();
        let mut in_sources = vec![0usize; edges.len()];
        for &(u, v) in edges {
            in_sources[cursor[v]] = u;
            cursor[v] += 1;
        }

        Self {
            n,
            out_offsets,
            out_targets,
            in_offsets,
            in_sources,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.out_targets.len()
    }

    #[inline]
    pub fn out_neighbors(&self, u: usize) -> &[usize] {
        &self.out_targets[self.out_offsets[u]..self.out_offsets[u + 1]]
    }

    #[inline]
    pub fn in_neighbors(&self, v: usize) -> &[usize] {
        &self.in_sources[self.in_offsets[v]..self.in_offsets[v + 1]]
    }

    #[inline]
    pub fn out_degree(&self, u: usize) -> usize {
        self.out_offsets[u + 1] - self.out_offsets[u]
    }

    #[inline]
    pub fn in_degree(&self, v: usize) -> usize {
        self.in_offsets[v + 1] - self.in_offsets[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.out_neighbors(u).binary_search(&v).is_ok()
    }

    /// All edges in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| self.out_neighbors(u).iter().map(move |&v| (u, v)))
    }

    /// `(in_degrees, out_degrees)`.
    pub fn degrees(&self) -> (Vec<usize>, Vec<usize>) {
        let ins = (0..self.n).map(|v| self.in_degree(v)).collect();
        let outs = (0..self.n).map(|u| self.out_degree(u)).collect();
        (ins, outs)
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange { vertex: v, n: self.n })
        }
    }

    /// Full scan of the forward/reverse agreement and ordering invariants.
    pub fn validate(&self) -> bool {
        let mut sum_out = 0;
        let mut sum_in = 0;
        for u in 0..self.n {
            let outs = self.out_neighbors(u);
            let ins = self.in_neighbors(u);
            sum_out += outs.len();
            sum_in += ins.len();
            if !outs.windows(2).all(|w| w[0] < w[1]) || !ins.windows(2).all(|w| w[0] < w[1]) {
                return false;
            }
            if outs.contains(&u) {
                return false;
            }
            if outs.iter().any(|&v| self.in_neighbors(v).binary_search(&u).is_err()) {
                return false;
            }
            if ins.iter().any(|&w| self.out_neighbors(w).binary_search(&u).is_err()) {
                return false;
            }
        }
        sum_out == self.edge_count() && sum_in == self.edge_count()
    }

    /// Directed cycle `0 -> 1 -> ... -> n-1 -> 0`.
    pub fn cycle(n: usize) -> Self {
        assert!(n >= 2, "a directed cycle needs at least two vertices");
        let mut edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        edges.sort_unstable();
        Self::from_sorted_unique(n, &edges)
    }

    /// Complete digraph on `n` vertices.
    pub fn complete(n: usize) -> Self {
        let edges: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v)))
            .collect();
        Self::from_sorted_unique(n, &edges)
    }

    /// Cycle `0 -> 1 -> ... -> n-1 -> 0` plus edges `j -> 0` for `j = 1..n-2`.
    ///
    /// From vertex 0 the walk needs exponentially many steps in expectation to
    /// reach `n-1`, since every intermediate vertex resets to 0 with
    /// probability one half.
    pub fn reset_cycle(n: usize) -> Self {
        assert!(n >= 3);
        let mut edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        edges.extend((1..n - 1).map(|j| (j, 0)));
        edges.sort_unstable();
        edges.dedup();
        Self::from_sorted_unique(n, &edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degrees_by_hand() {
        let g = Digraph::from_edges(3, [(0, 1), (1, 2), (2, 0), (1, 0)]).unwrap();
        let (ins, outs) = g.degrees();
        assert_eq!(outs, vec![1, 2, 1]);
        assert_eq!(ins, vec![2, 1, 1]);
        assert_eq!(g.in_neighbors(0), &[1, 2]);
        assert!(g.validate());
    }

    #[test]
    fn cycle_and_complete_degrees() {
        let c = Digraph::cycle(3);
        assert_eq!(c.degrees(), (vec![1, 1, 1], vec![1, 1, 1]));
        let k = Digraph::complete(4);
        assert_eq!(k.edge_count(), 12);
        assert_eq!(k.degrees(), (vec![3; 4], vec![3; 4]));
        assert!(k.validate());
    }

    #[test]
    fn rejects_bad_edges() {
        assert_eq!(
            Digraph::from_edges(2, [(0, 0)]).unwrap_err(),
            Error::SelfLoop(0)
        );
        assert_eq!(
            Digraph::from_edges(2, [(0, 1), (0, 1)]).unwrap_err(),
            Error::DuplicateEdge(0, 1)
        );
        assert!(matches!(
            Digraph::from_edges(2, [(0, 2)]),
            Err(Error::VertexOutOfRange { vertex: 2, .. })
        ));
    }

    #[test]
    fn reset_cycle_shape() {
        let g = Digraph::reset_cycle(5);
        assert_eq!(g.out_neighbors(0), &[1]);
        assert_eq!(g.out_neighbors(2), &[0, 3]);
        assert_eq!(g.out_neighbors(4), &[0]);
        assert_eq!(g.edge_count(), 5 + 3);
    }
}
