//! Breadth-first in- and out-trees and the path-weight estimator `Z(x, y)`.
//!
//! `Z` sums the weights of walks that climb an out-tree from `x`, cross one
//! edge, then descend an in-tree into `y`. Every such walk is a distinct walk
//! of the target length, so `Z` never exceeds the exact transition
//! probability.

use std::collections::HashMap;

use serde::Serialize;

use crate::chain::{chain_from, Dist};
use crate::digraph::Digraph;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// Grown along in-neighbours, toward the root.
    In,
    /// Grown along out-neighbours, away from the root.
    Out,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LayeredTree {
    pub root: usize,
    pub direction: Direction,
    /// `levels[i]` holds the level-`i` vertices in ascending order.
    pub levels: Vec<Vec<usize>>,
    parent: HashMap<usize, usize>,
    weight: HashMap<usize, f64>,
    /// Every vertex above the last level acquired at least one child.
    pub succeeded: bool,
}

impl LayeredTree {
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn contains(&self, v: usize) -> bool {
        self.weight.contains_key(&v)
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent.get(&v).copied()
    }

    /// `α` for out-trees, `β` for in-trees.
    pub fn weight(&self, v: usize) -> Option<f64> {
        self.weight.get(&v).copied()
    }

    pub fn size(&self) -> usize {
        self.weight.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.levels.iter().flatten().copied()
    }

    pub fn level_weight_sum(&self, i: usize) -> f64 {
        self.levels
            .get(i)
            .map_or(0.0, |l| l.iter().map(|v| self.weight[v]).sum())
    }
}

fn build(g: &Digraph, root: usize, depth: usize, avoid: &[usize], direction: Direction) -> Result<LayeredTree> {
    g.check_vertex(root)?;
    for &a in avoid {
        g.check_vertex(a)?;
    }
    let n = g.n();
    let mut blocked = vec![false; n];
    for &a in avoid {
        blocked[a] = true;
    }
    blocked[root] = true;

    let mut parent = HashMap::new();
    let mut weight = HashMap::new();
    weight.insert(root, 1.0);
    let mut levels = vec![vec![root]];
    let mut succeeded = true;

    for _ in 0..depth {
        let cur = levels.last().unwrap();
        let mut next = Vec::new();
        for &v in cur {
            let wv = weight[&v];
            let mut children = 0;
            let nbrs = match direction {
                Direction::In => g.in_neighbors(v),
                Direction::Out => g.out_neighbors(v),
            };
            for &w in nbrs {
                if blocked[w] {
                    continue;
                }
                blocked[w] = true;
                children += 1;
                parent.insert(w, v);
                let ww = match direction {
                    Direction::In => wv / g.out_degree(w) as f64,
                    Direction::Out => wv / g.out_degree(v) as f64,
                };
                weight.insert(w, ww);
                next.push(w);
            }
            if children == 0 {
                succeeded = false;
            }
        }
        next.sort_unstable();
        levels.push(next);
    }

    Ok(LayeredTree {
        root,
        direction,
        levels,
        parent,
        weight,
        succeeded,
    })
}

/// Breadth-first in-tree into `y`. `β` of a vertex is the product of
/// `1/deg⁺` over its tree path to `y`, excluding `y`.
pub fn build_in_tree(g: &Digraph, y: usize, depth: usize, avoid: &[usize]) -> Result<LayeredTree> {
    build(g, y, depth, avoid, Direction::In)
}

/// Breadth-first out-tree from `x`. `α` of a vertex is the product of
/// `1/deg⁺` over its tree path from `x`, excluding the vertex itself.
pub fn build_out_tree(g: &Digraph, x: usize, depth: usize, avoid: &[usize]) -> Result<LayeredTree> {
    build(g, x, depth, avoid, Direction::Out)
}

/// `ln n / ln(np)`.
pub fn log_np(n: usize, np: f64) -> Result<f64> {
    if !(np > 1.0) {
        return Err(Error::InvalidParam(format!("np = {np} must exceed 1")));
    }
    Ok((n as f64).ln() / np.ln())
}

/// `⌊(2/3) ln n / ln(np)⌋`.
pub fn low_depth(n: usize, np: f64) -> Result<usize> {
    Ok((2.0 / 3.0 * log_np(n, np)?).floor() as usize)
}

/// `np` estimated from the edge count as `m / (n − 1)`.
pub fn np_estimate(g: &Digraph) -> f64 {
    g.edge_count() as f64 / (g.n() as f64 - 1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZLower {
    pub x: usize,
    pub y: usize,
    pub z: f64,
    pub depth: usize,
    pub in_succeeded: bool,
    pub out_succeeded: bool,
    pub in_size: usize,
    pub out_size: usize,
    /// `Σ β` over the last in-tree level.
    pub beta_sum: f64,
    /// `Σ α` over the last out-tree level.
    pub alpha_sum: f64,
}

/// Lower-bound estimator at depth `ℓ`: in-tree into `y` first, then the
/// out-tree from `x` avoiding it. Zero if either tree fails.
pub fn z_lower_at(g: &Digraph, x: usize, y: usize, depth: usize) -> Result<ZLower> {
    let ty = build_in_tree(g, y, depth, &[])?;
    let y_set: Vec<usize> = ty.vertices().collect();
    let tx = build_out_tree(g, x, depth, &y_set)?;

    let mut z = 0.0;
    if ty.succeeded && tx.succeeded {
        for &u in &tx.levels[depth] {
            let a = tx.weight[&u];
            let du = g.out_degree(u) as f64;
            for &v in g.out_neighbors(u) {
                if ty.levels[depth].binary_search(&v).is_ok() {
                    z += a * ty.weight[&v] / du;
                }
            }
        }
    }
    Ok(ZLower {
        x,
        y,
        z,
        depth,
        in_succeeded: ty.succeeded,
        out_succeeded: tx.succeeded,
        in_size: ty.size(),
        out_size: tx.size(),
        beta_sum: ty.level_weight_sum(depth),
        alpha_sum: tx.level_weight_sum(depth),
    })
}

/// [`z_lower_at`] with the default depth from [`low_depth`], using `np` as
/// estimated by [`np_estimate`].
pub fn z_lower(g: &Digraph, x: usize, y: usize) -> Result<ZLower> {
    z_lower_at(g, x, y, low_depth(g.n(), np_estimate(g))?)
}

/// Depths of the upper-bound construction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct UpDepths {
    pub lambda: f64,
    pub l0: usize,
    pub l1: usize,
    pub l2: usize,
}

/// `ℓ₁ = round((1 − 10η)Λ)`, `ℓ₂ = ⌈11ηΛ⌉`, `ℓ₀ = ℓ₁ + ℓ₂`.
pub fn up_depths(n: usize, np: f64, eta: f64) -> Result<UpDepths> {
    if !(eta > 0.0 && eta <= 1.0 / 250.0) {
        return Err(Error::InvalidParam(format!("eta = {eta} is not in (0, 1/250]")));
    }
    let lambda = log_np(n, np)?;
    let l1 = ((1.0 - 10.0 * eta) * lambda).round() as usize;
    let l2 = (11.0 * eta * lambda).ceil() as usize;
    if l1 == 0 || l2 == 0 {
        return Err(Error::DepthCollapse(format!(
            "n = {n}, np = {np}, eta = {eta} give depths l1 = {l1}, l2 = {l2}"
        )));
    }
    Ok(UpDepths {
        lambda,
        l0: l1 + l2,
        l1,
        l2,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZUpper {
    pub x: usize,
    pub y: usize,
    pub depths: UpDepths,
    pub z_up: f64,
    /// `P_x^{(ℓ₀+1)}(y)`.
    pub exact: f64,
    /// `exact − z_up`: the mass of all walks not counted by `Z`.
    pub remainder: f64,
    /// `Σ_{u ∈ X} α_{ℓ₁,u}`.
    pub alpha_sum: f64,
    pub in_succeeded: bool,
    pub out_size: usize,
    pub in_size: usize,
    /// Vertices of the last in-tree level that also lie in the out-tree.
    pub y_last_in_x: usize,
}

/// Upper-bound configuration: out-tree from `x` to depth `ℓ₁` (grown first,
/// nothing avoided), in-tree into `y` to depth `ℓ₂`, with
/// `α_{ℓ₁,u} = P_x^{(ℓ₁)}(u)` computed exactly. `Z` is zero when the in-tree
/// fails.
pub fn z_upper_report(g: &Digraph, x: usize, y: usize, eta: f64) -> Result<ZUpper> {
    let depths = up_depths(g.n(), np_estimate(g), eta)?;
    z_upper_at(g, x, y, depths)
}

pub fn z_upper_at(g: &Digraph, x: usize, y: usize, depths: UpDepths) -> Result<ZUpper> {
    let UpDepths { l0, l1, l2, .. } = depths;
    g.check_vertex(y)?;
    let tx = build_out_tree(g, x, l1, &[])?;
    let ty = build_in_tree(g, y, l2, &[])?;
    let c = chain_from(g)?;
    let n = g.n();

    let mut cur = Dist::point(n, x).into_vec();
    let mut next = vec![0.0; n];
    for _ in 0..l1 {
        c.push_forward(&cur, &mut next);
        std::mem::swap(&mut cur, &mut next);
    }
    let alpha = cur.clone();
    for _ in l1..=l0 {
        c.push_forward(&cur, &mut next);
        std::mem::swap(&mut cur, &mut next);
    }
    let exact = cur[y];

    let alpha_sum: f64 = tx.vertices().map(|u| alpha[u]).sum();
    let last = &ty.levels[l2];
    let y_last_in_x = last.iter().filter(|&&v| tx.contains(v)).count();
    let mut z_up = 0.0;
    if ty.succeeded {
        for u in tx.vertices() {
            if alpha[u] == 0.0 {
                continue;
            }
            let du = g.out_degree(u) as f64;
            for &v in g.out_neighbors(u) {
                if !tx.contains(v) && last.binary_search(&v).is_ok() {
                    z_up += alpha[u] * ty.weight[&v] / du;
                }
            }
        }
    }
    Ok(ZUpper {
        x,
        y,
        depths,
        z_up,
        exact,
        remainder: exact - z_up,
        alpha_sum,
        in_succeeded: ty.succeeded,
        out_size: tx.size(),
        in_size: ty.size(),
        y_last_in_x,
    })
}
