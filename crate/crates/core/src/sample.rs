//! Seeded random trees and points for property checks.

use num_bigint::BigInt;
use rand::seq::{IteratorRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cube_maps::{CubePoint, Label};
use crate::points::LabeledPoint;
use crate::trees::Tree;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A binary tree with `k >= 1` leaves, splitting sizes uniformly.
pub fn binary_tree<R: Rng>(rng: &mut R, k: usize) -> Tree {
    assert!(k >= 1);
    if k == 1 {
        return Tree::Leaf;
    }
    let left = rng.gen_range(1..k);
    Tree::Node(vec![binary_tree(rng, left), binary_tree(rng, k - left)])
}

/// A random `m`-element subset of `[n]`, sorted.
pub fn subset<R: Rng>(rng: &mut R, n: usize, m: usize) -> Vec<usize> {
    let mut s = (1..=n).choose_multiple(rng, m);
    s.sort_unstable();
    s
}

/// A binary tree with `n` leaves and `m` black corks (`n + m >= 2` unless
/// the tree is `|` or `b`).
pub fn corked_tree<R: Rng>(rng: &mut R, n: usize, m: usize) -> Tree {
    let base = binary_tree(rng, n + m);
    let set = subset(rng, n + m, m);
    base.add_corks(&set).expect("subset is valid")
}

/// A label from a small grid of rationals; `zero_bias` is the chance of 0.
pub fn label<R: Rng>(rng: &mut R, zero_bias: f64) -> Label {
    if rng.gen_bool(zero_bias) {
        return Label::from_integer(0.into());
    }
    let den: i64 = rng.gen_range(1..=8);
    let num: i64 = rng.gen_range(0..=den);
    Label::new(BigInt::from(num), BigInt::from(den))
}

pub fn cube_point<R: Rng>(rng: &mut R, dim: usize, zero_bias: f64) -> CubePoint {
    CubePoint::new((0..dim).map(|_| label(rng, zero_bias)).collect()).expect("labels in [0,1]")
}

pub fn labeled_point<R: Rng>(rng: &mut R, tree: Tree, zero_bias: f64) -> LabeledPoint {
    let dim = tree.n_inner_edges();
    LabeledPoint::new(tree, cube_point(rng, dim, zero_bias)).expect("binary black-cork tree")
}

/// A random tree for a cell of `K^u_n` (white corks allowed when `white`),
/// with at most `max_corks` corks and at least one vertex of degree >= 3.
pub fn cell_tree<R: Rng>(rng: &mut R, n: usize, max_corks: usize, white: bool) -> Tree {
    loop {
        let m = rng.gen_range(0..=max_corks);
        if n + m < 2 {
            if n == 0 && m == 1 && white {
                return Tree::WhiteCork;
            }
            if n == 1 && m == 0 {
                return Tree::Leaf;
            }
            continue;
        }
        let t = planar_tree(rng, n + m);
        let mut kinds: Vec<Tree> = (0..n + m)
            .map(|k| {
                if k >= n {
                    if white && rng.gen_bool(0.5) {
                        Tree::WhiteCork
                    } else {
                        Tree::BlackCork
                    }
                } else {
                    Tree::Leaf
                }
            })
            .collect();
        kinds.shuffle(rng);
        return replace_leaves(&t, &mut 0, &|k| kinds[k - 1].clone());
    }
}

/// A planar tree with `k >= 2` leaves and every internal vertex of arity >= 2.
pub fn planar_tree<R: Rng>(rng: &mut R, k: usize) -> Tree {
    if k == 1 {
        return Tree::Leaf;
    }
    let arity = rng.gen_range(2..=k.min(4));
    let mut cuts = (1..k).choose_multiple(rng, arity - 1);
    cuts.sort_unstable();
    let mut prev = 0;
    let mut children = Vec::with_capacity(arity);
    for c in cuts.into_iter().chain(std::iter::once(k)) {
        children.push(planar_tree(rng, c - prev));
        prev = c;
    }
    Tree::Node(children)
}

fn replace_leaves(t: &Tree, count: &mut usize, f: &dyn Fn(usize) -> Tree) -> Tree {
    match t {
        Tree::Node(ch) => Tree::Node(ch.iter().map(|c| replace_leaves(c, count, f)).collect()),
        _ => {
            *count += 1;
            f(*count)
        }
    }
}
