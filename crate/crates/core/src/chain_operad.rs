//! The free graded operad `O` on the generators `μ_{n+m}^S` over the
//! integers, with its differential.
//!
//! A basis monomial `μ_T` is indexed by a [`CellTree`]: every internal vertex
//! with `k` children, `B` of them black corks, is the generator
//! `μ_{(k-|B|)+|B|}^B`, a white cork is `μ_{0+1}^{{1}}` and the bare leaf is
//! the unit `u`. `μ_T` is the root generator composed with the monomials of
//! its non-leaf input subtrees in decreasing slot order.
//!
//! Internally signs are computed against the basis obtained by listing the
//! generators of `T` in path order, in which `a ∘_i b` carries the sign
//! `(-1)^{|b|·(degrees of a after leaf i)}`; `ε(T)` converts between the two.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::trees::{Tree, TreeError};

/// Weight bound `n + 2m` of the generators on which conventions are checked.
pub const VALIDATION_WEIGHT: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChainError {
    #[error("invalid cell tree {tree}: {reason}")]
    InvalidCell { tree: String, reason: &'static str },
    #[error("invalid generator: {0}")]
    Generator(String),
    #[error("slot {slot} out of range 1..={arity}")]
    Slot { slot: usize, arity: usize },
    #[error("invalid sign convention {0:?}")]
    Convention(String),
    #[error("no sign convention satisfies d∘d = 0; {generator} leaves {residue}")]
    NoConvention { generator: String, residue: String },
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// A tree indexing a basis monomial of `O`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellTree(Tree);

impl CellTree {
    pub fn new(tree: Tree) -> Result<Self, ChainError> {
        fn check(t: &Tree) -> Result<(), &'static str> {
            match t {
                Tree::Node(ch) if ch.len() < 2 => Err("vertex of degree two"),
                Tree::Node(ch) => ch.iter().try_for_each(check),
                _ => Ok(()),
            }
        }
        let bad = |reason| ChainError::InvalidCell {
            tree: tree.to_string(),
            reason,
        };
        if tree == Tree::BlackCork {
            return Err(bad("the lone black cork is not a cell"));
        }
        check(&tree).map_err(bad)?;
        Ok(CellTree(tree))
    }

    pub fn parse(text: &str) -> Result<Self, ChainError> {
        CellTree::new(Tree::parse(text)?)
    }

    pub fn unit() -> Self {
        CellTree(Tree::Leaf)
    }

    pub fn tree(&self) -> &Tree {
        &self.0
    }

    pub fn into_tree(self) -> Tree {
        self.0
    }

    pub fn arity(&self) -> usize {
        self.0.n_leaves()
    }

    pub fn degree(&self) -> usize {
        cell_degree(&self.0)
    }
}

impl fmt::Display for CellTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl FromStr for CellTree {
    type Err = ChainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CellTree::parse(s)
    }
}

/// `2m + n - 2 - |I(T)| + m_b`, i.e. the sum of the generator degrees.
pub fn degree(t: &CellTree) -> usize {
    t.degree()
}

fn black(ch: &[Tree]) -> usize {
    ch.iter().filter(|c| **c == Tree::BlackCork).count()
}

fn local_degree(ch: &[Tree]) -> usize {
    ch.len() + black(ch) - 2
}

fn cell_degree(t: &Tree) -> usize {
    match t {
        Tree::Node(ch) => local_degree(ch) + ch.iter().map(cell_degree).sum::<usize>(),
        _ => 0,
    }
}

// Parity of ε(T) together with |T|.
fn epsilon(t: &Tree) -> (bool, usize) {
    match t {
        Tree::Node(ch) => {
            let mut odd = false;
            let mut deg = local_degree(ch);
            let mut right = 0;
            for c in ch.iter().rev() {
                let (p, d) = epsilon(c);
                odd ^= p ^ (d * right % 2 == 1);
                right += d;
                deg += d;
            }
            (odd, deg)
        }
        _ => (false, 0),
    }
}

// Total degree of the generators met after the `i`-th leaf in path order.
fn degree_after_leaf(t: &Tree, i: usize) -> usize {
    fn go(t: &Tree, i: usize, seen: &mut usize, acc: &mut usize) {
        match t {
            Tree::Leaf => *seen += 1,
            Tree::Node(ch) => {
                if *seen >= i {
                    *acc += local_degree(ch);
                }
                for c in ch {
                    go(c, i, seen, acc);
                }
            }
            _ => {}
        }
    }
    let (mut seen, mut acc) = (0, 0);
    go(t, i, &mut seen, &mut acc);
    acc
}

// `μ_T ∘_i μ_U = ±μ_{T∘_iU}`; returns the tree and whether the sign is -1.
fn compose_monomials(t: &Tree, i: usize, u: &Tree) -> (Tree, bool) {
    if *t == Tree::Leaf {
        return (u.clone(), false);
    }
    if *u == Tree::Leaf {
        return (t.clone(), false);
    }
    let grafted = t.graft(i, u).expect("slot checked by caller");
    let (et, _) = epsilon(t);
    let (eu, du) = epsilon(u);
    let (eg, _) = epsilon(&grafted);
    let koszul = du * degree_after_leaf(t, i) % 2 == 1;
    (grafted, et ^ eu ^ eg ^ koszul)
}

/// `μ_{n+m}^S` with `S ⊆ [n+m]`, `|S| = m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Generator {
    n: usize,
    m: usize,
    set: Vec<usize>,
}

impl Generator {
    pub fn new(n: usize, m: usize, set: Vec<usize>) -> Result<Self, ChainError> {
        if matches!((n, m), (0, 0) | (1, 0)) {
            return Err(ChainError::Generator(format!("μ_{{{n}+{m}}} is excluded")));
        }
        let ok = set.len() == m
            && set.iter().all(|&j| (1..=n + m).contains(&j))
            && set.windows(2).all(|w| w[0] < w[1]);
        if !ok {
            return Err(ChainError::Generator(format!(
                "{set:?} is not an {m}-subset of [{}]",
                n + m
            )));
        }
        Ok(Generator { n, m, set })
    }

    /// The generator sitting at a vertex with the given children.
    fn of_children(ch: &[Tree]) -> Generator {
        let set: Vec<usize> = ch
            .iter()
            .enumerate()
            .filter(|(_, c)| **c == Tree::BlackCork)
            .map(|(k, _)| k + 1)
            .collect();
        Generator {
            n: ch.len() - set.len(),
            m: set.len(),
            set,
        }
    }

    /// The generator whose tree is `t`, if `t` is a corolla or `w`.
    pub fn from_tree(t: &Tree) -> Option<Generator> {
        match t {
            Tree::WhiteCork => Some(Generator {
                n: 0,
                m: 1,
                set: vec![1],
            }),
            Tree::Node(ch)
                if ch.len() >= 2
                    && ch.iter().all(|c| matches!(c, Tree::Leaf | Tree::BlackCork)) =>
            {
                Some(Generator::of_children(ch))
            }
            _ => None,
        }
    }

    /// All generators with `n + 2m <= max_weight`.
    pub fn all(max_weight: usize) -> Vec<Generator> {
        let mut out = Vec::new();
        for m in 0..=max_weight / 2 {
            for n in 0..=max_weight - 2 * m {
                for set in subsets(n + m, m) {
                    if let Ok(g) = Generator::new(n, m, set) {
                        out.push(g);
                    }
                }
            }
        }
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn set(&self) -> &[usize] {
        &self.set
    }

    pub fn degree(&self) -> usize {
        2 * self.m + self.n - 2
    }

    pub fn tree(&self) -> Tree {
        if (self.n, self.m) == (0, 1) {
            return Tree::WhiteCork;
        }
        Tree::Node(
            (1..=self.n + self.m)
                .map(|j| {
                    if self.set.contains(&j) {
                        Tree::BlackCork
                    } else {
                        Tree::Leaf
                    }
                })
                .collect(),
        )
    }

    pub fn cell(&self) -> CellTree {
        CellTree(self.tree())
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let set: Vec<String> = self.set.iter().map(ToString::to_string).collect();
        write!(f, "μ_{{{}+{}}}^{{{}}}", self.n, self.m, set.join(","))
    }
}

/// All `k`-subsets of `[n]` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for j in start..=n {
            if n - j + 1 < k - cur.len() {
                break;
            }
            cur.push(j);
            go(j + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        go(1, n, k, &mut Vec::new(), &mut out);
    }
    out
}

/// The position `r` of the `i`-th element `c` of `[total] ∖ S₁` relative to
/// `S₁ = {j_1 < … < j_s}`: `j_{r-1} < c < j_r`.
pub fn find_r(s1: &[usize], total: usize, i: usize) -> Result<usize, ChainError> {
    let c = (1..=total)
        .filter(|j| !s1.contains(j))
        .nth(i.wrapping_sub(1))
        .ok_or(ChainError::Slot {
            slot: i,
            arity: total - s1.len(),
        })?;
    Ok(1 + s1.iter().filter(|&&j| j < c).count())
}

/// `(S₁, p+s) ∘_i (S₂, q+t) = (S₁ ∘_i S₂, p+s+q+t-1)`.
pub fn p_compose(
    s1: &[usize],
    total1: usize,
    i: usize,
    s2: &[usize],
    total2: usize,
) -> Result<(Vec<usize>, usize), ChainError> {
    crate::trees::check_index_set(s1, total1)?;
    crate::trees::check_index_set(s2, total2)?;
    let r = find_r(s1, total1, i)?;
    let shift = total2 - 1;
    let mut out: Vec<usize> = s1[..r - 1].to_vec();
    out.extend(s2.iter().map(|k| k + i + r - 2));
    out.extend(s1[r - 1..].iter().map(|j| j + shift));
    Ok((out, total1 + total2 - 1))
}

/// A finite integer combination of basis monomials of one arity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainElement {
    arity: usize,
    terms: BTreeMap<CellTree, BigInt>,
}

impl ChainElement {
    pub fn zero(arity: usize) -> Self {
        ChainElement {
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(t: CellTree) -> Self {
        Self::term(t, BigInt::one())
    }

    pub fn term(t: CellTree, coef: BigInt) -> Self {
        let mut x = ChainElement::zero(t.arity());
        x.add_term(t, coef);
        x
    }

    pub fn generator(g: &Generator) -> Self {
        Self::monomial(g.cell())
    }

    pub fn unit() -> Self {
        Self::monomial(CellTree::unit())
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coef(&self, t: &CellTree) -> BigInt {
        self.terms.get(t).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&CellTree, &BigInt)> {
        self.terms.iter()
    }

    /// Terms ordered by degree, then by notation.
    pub fn sorted_terms(&self) -> Vec<(&CellTree, &BigInt)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by_cached_key(|(t, _)| (t.degree(), t.to_string()));
        v
    }

    /// The common degree of the terms, when there is one.
    pub fn degree(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(CellTree::degree);
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    pub fn add_term(&mut self, t: CellTree, coef: BigInt) {
        debug_assert_eq!(t.arity(), self.arity);
        if coef.is_zero() {
            return;
        }
        let entry = self.terms.entry(t);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coef);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coef;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scaled(&self, c: &BigInt) -> Self {
        let mut out = ChainElement::zero(self.arity);
        if !c.is_zero() {
            for (t, a) in &self.terms {
                out.terms.insert(t.clone(), a * c);
            }
        }
        out
    }

    /// Coefficients reduced into `0..p`, zero terms dropped.
    pub fn reduce_mod(&self, p: &BigInt) -> Self {
        let mut out = ChainElement::zero(self.arity);
        for (t, a) in &self.terms {
            let r = a.mod_floor(p);
            if !r.is_zero() {
                out.terms.insert(t.clone(), r);
            }
        }
        out
    }

    /// Largest absolute coefficient.
    pub fn max_coef(&self) -> BigInt {
        self.terms.values().map(Signed::abs).max().unwrap_or_default()
    }
}

impl fmt::Display for ChainElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (t, c)) in self.sorted_terms().into_iter().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if k == 0 {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let a = c.abs();
            if !a.is_one() {
                write!(f, "{a}·")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

impl Serialize for ChainElement {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term {
            coef: String,
            tree: String,
        }
        let terms = self.sorted_terms();
        let mut seq = s.serialize_seq(Some(terms.len()))?;
        for (t, c) in terms {
            seq.serialize_element(&Term {
                coef: c.to_string(),
                tree: t.to_string(),
            })?;
        }
        seq.end()
    }
}

impl AddAssign<&ChainElement> for ChainElement {
    fn add_assign(&mut self, rhs: &ChainElement) {
        for (t, c) in &rhs.terms {
            self.add_term(t.clone(), c.clone());
        }
    }
}

impl SubAssign<&ChainElement> for ChainElement {
    fn sub_assign(&mut self, rhs: &ChainElement) {
        for (t, c) in &rhs.terms {
            self.add_term(t.clone(), -c);
        }
    }
}

impl Add for ChainElement {
    type Output = ChainElement;

    fn add(mut self, rhs: ChainElement) -> ChainElement {
        self += &rhs;
        self
    }
}

impl Sub for ChainElement {
    type Output = ChainElement;

    fn sub(mut self, rhs: ChainElement) -> ChainElement {
        self -= &rhs;
        self
    }
}

impl Neg for ChainElement {
    type Output = ChainElement;

    fn neg(self) -> ChainElement {
        self.scaled(&-BigInt::one())
    }
}

/// `a ∘_i b`, extended bilinearly from monomials.
pub fn compose_chain(
    a: &ChainElement,
    i: usize,
    b: &ChainElement,
) -> Result<ChainElement, ChainError> {
    if i == 0 || i > a.arity {
        return Err(ChainError::Slot {
            slot: i,
            arity: a.arity,
        });
    }
    let mut out = ChainElement::zero(a.arity + b.arity - 1);
    for (t, x) in &a.terms {
        for (u, y) in &b.terms {
            let (tree, negative) = compose_monomials(&t.0, i, &u.0);
            let c = x * y;
            out.add_term(CellTree(tree), if negative { -c } else { c });
        }
    }
    Ok(out)
}

/// The canonical factorisation of a monomial: its root generator, then the
/// subtrees grafted onto its input slots in decreasing slot order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub root: Generator,
    pub grafts: Vec<(usize, CellTree)>,
}

impl Decomposition {
    /// Composes the factors back together.
    pub fn recompose(&self) -> ChainElement {
        self.grafts.iter().fold(ChainElement::generator(&self.root), |acc, (j, t)| {
            compose_chain(&acc, *j, &ChainElement::monomial(t.clone())).expect("slot in range")
        })
    }
}

/// `None` for the unit.
pub fn decompose(t: &CellTree) -> Option<Decomposition> {
    match &t.0 {
        Tree::Leaf => None,
        Tree::WhiteCork | Tree::BlackCork => Some(Decomposition {
            root: Generator::new(0, 1, vec![1]).expect("valid"),
            grafts: Vec::new(),
        }),
        Tree::Node(ch) => {
            let inputs: Vec<&Tree> = ch.iter().filter(|c| **c != Tree::BlackCork).collect();
            let grafts = inputs
                .iter()
                .enumerate()
                .rev()
                .filter(|(_, c)| ***c != Tree::Leaf)
                .map(|(k, c)| (k + 1, CellTree((*c).clone())))
                .collect();
            Some(Decomposition {
                root: Generator::of_children(ch),
                grafts,
            })
        }
    }
}

/// Coefficients `c_k` of the affine family of exponents
/// `(q+t)p + (q+t-1)(i+r-1) + t(r-1) + Σ c_k·term_k` for the summands
/// `μ_{p+s}^{S₁} ∘_i μ_{q+t}^{S₂}` of `d μ_{n+m}^S`, with
/// `term = (1, q+t-1, p-1, i, r, s, t)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct SignConvention(pub [bool; 7]);

impl SignConvention {
    pub const TERMS: [&'static str; 7] = ["1", "q+t-1", "p-1", "i", "r", "s", "t"];

    /// `(q+t)p + (q+t-1)(i+r-1) + t(r-1)` with no correction.
    pub fn standard() -> Self {
        SignConvention([false; 7])
    }

    /// `qp + (q-1)(i-1)` on cork-free generators, extended to all
    /// generators by the `q+t-1` term.
    pub fn printed_cork_free() -> Self {
        let mut c = [false; 7];
        c[1] = true;
        SignConvention(c)
    }

    /// The lexicographically first convention with `d∘d = 0` on all
    /// generators of weight at most [`VALIDATION_WEIGHT`].
    pub fn validated() -> Result<Self, ChainError> {
        static CACHE: OnceLock<Result<SignConvention, ChainError>> = OnceLock::new();
        CACHE
            .get_or_init(|| validate_sign_convention(VALIDATION_WEIGHT).map(|r| r.default))
            .clone()
    }

    /// All `2^7` conventions in lexicographic order.
    pub fn all() -> Vec<Self> {
        (0u8..128)
            .map(|b| SignConvention(std::array::from_fn(|k| b >> (6 - k) & 1 == 1)))
            .collect()
    }

    /// Whether the summand with these parameters enters with a minus sign.
    pub fn negative(&self, p: usize, q: usize, s: usize, t: usize, i: usize, r: usize) -> bool {
        let qt = q + t;
        let base = qt * p + (qt - 1) * (i + r - 1) + t * (r - 1);
        let terms = [1, qt - 1, p - 1, i, r, s, t];
        let extra: usize = terms
            .iter()
            .zip(self.0)
            .filter(|(_, on)| *on)
            .map(|(v, _)| v)
            .sum();
        (base + extra) % 2 == 1
    }
}

impl fmt::Display for SignConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for SignConvention {
    type Err = ChainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bits: Vec<char> = s.chars().filter(|c| !matches!(c, ',' | ' ')).collect();
        if bits.len() != 7 || bits.iter().any(|c| !matches!(c, '0' | '1')) {
            return Err(ChainError::Convention(s.to_string()));
        }
        Ok(SignConvention(std::array::from_fn(|k| bits[k] == '1')))
    }
}

impl Serialize for SignConvention {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<u8> = self.0.iter().map(|&b| b as u8).collect();
        v.serialize(s)
    }
}

/// `d μ_{n+m}^S` under the convention `conv`.
pub fn diff_generator(g: &Generator, conv: &SignConvention) -> ChainElement {
    let (n, m) = (g.n, g.m);
    let mut out = ChainElement::zero(n);
    if (n, m) == (1, 1) {
        let i = g.set[0];
        let w = Tree::Node(
            (1..=2)
                .map(|j| if j == i { Tree::WhiteCork } else { Tree::Leaf })
                .collect(),
        );
        let c = if conv.negative(2, 0, 0, 1, i, 1) {
            -BigInt::one()
        } else {
            BigInt::one()
        };
        out.add_term(CellTree(w), c.clone());
        out.add_term(CellTree::unit(), -c);
        return out;
    }
    for p in 1..=n + 1 {
        let q = n + 1 - p;
        for s in 0..=m {
            let t = m - s;
            if (p, s) == (1, 0) || matches!((q, t), (0, 0) | (1, 0)) {
                continue;
            }
            for s1 in subsets(p + s, s) {
                for s2 in subsets(q + t, t) {
                    for i in 1..=p {
                        let (set, _) =
                            p_compose(&s1, p + s, i, &s2, q + t).expect("valid parameters");
                        if set != g.set {
                            continue;
                        }
                        let r = find_r(&s1, p + s, i).expect("valid slot");
                        let outer = Generator { n: p, m: s, set: s1.clone() };
                        let inner = Generator { n: q, m: t, set: s2.clone() };
                        let (tree, _) = compose_monomials(&outer.tree(), i, &inner.tree());
                        let c = if conv.negative(p, q, s, t, i, r) {
                            -BigInt::one()
                        } else {
                            BigInt::one()
                        };
                        out.add_term(CellTree(tree), c);
                    }
                }
            }
        }
    }
    out
}

/// The differential of `O`, memoised on monomials.
#[derive(Clone, Debug)]
pub struct Differential {
    conv: SignConvention,
    cache: HashMap<CellTree, ChainElement>,
}

impl Differential {
    pub fn new(conv: SignConvention) -> Self {
        Differential {
            conv,
            cache: HashMap::new(),
        }
    }

    pub fn convention(&self) -> SignConvention {
        self.conv
    }

    /// `d μ_T` by the Leibniz rule over the canonical factorisation.
    pub fn monomial(&mut self, t: &CellTree) -> ChainElement {
        if let Some(hit) = self.cache.get(t) {
            return hit.clone();
        }
        let out = match &t.0 {
            Tree::Leaf | Tree::WhiteCork | Tree::BlackCork => ChainElement::zero(t.arity()),
            Tree::Node(ch) => {
                let root = Generator::of_children(ch);
                let mut cur = ChainElement::generator(&root);
                let mut acc = diff_generator(&root, &self.conv);
                let inputs: Vec<&Tree> = ch.iter().filter(|c| **c != Tree::BlackCork).collect();
                for (k, x) in inputs.iter().enumerate().rev() {
                    if **x == Tree::Leaf {
                        continue;
                    }
                    let j = k + 1;
                    let x = CellTree((*x).clone());
                    let dx = self.monomial(&x);
                    let mx = ChainElement::monomial(x);
                    let mut next = compose_chain(&acc, j, &mx).expect("slot in range");
                    let tail = compose_chain(&cur, j, &dx).expect("slot in range");
                    let deg = cur.degree().unwrap_or(0);
                    if deg % 2 == 1 {
                        next -= &tail;
                    } else {
                        next += &tail;
                    }
                    acc = next;
                    cur = compose_chain(&cur, j, &mx).expect("slot in range");
                }
                debug_assert_eq!(cur, ChainElement::monomial(t.clone()));
                acc
            }
        };
        self.cache.insert(t.clone(), out.clone());
        out
    }

    pub fn apply(&mut self, x: &ChainElement) -> ChainElement {
        let mut out = ChainElement::zero(x.arity);
        for (t, c) in &x.terms {
            out += &self.monomial(t).scaled(c);
        }
        out
    }
}

pub fn diff(x: &ChainElement, conv: &SignConvention) -> ChainElement {
    Differential::new(*conv).apply(x)
}

/// `d(d μ)` for a generator.
pub fn d_squared(g: &Generator, conv: &SignConvention) -> ChainElement {
    let mut d = Differential::new(*conv);
    d.apply(&diff_generator(g, conv))
}

/// Outcome of checking one convention.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConventionCheck {
    pub convention: SignConvention,
    pub passes: bool,
    pub generators_checked: usize,
    /// First generator with `d∘d ≠ 0`, and the residue.
    pub failure: Option<(String, ChainElement)>,
}

/// Result of the sign-convention search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub max_weight: usize,
    pub generators: usize,
    pub standard: ConventionCheck,
    /// [`SignConvention::printed_cork_free`] on cork-free generators.
    pub printed_cork_free: ConventionCheck,
    /// `d∘d μ_4` under [`SignConvention::printed_cork_free`].
    pub mu4_residue: ChainElement,
    pub passing: Vec<SignConvention>,
    pub default: SignConvention,
}

pub fn check_convention(conv: &SignConvention, gens: &[Generator]) -> ConventionCheck {
    let mut d = Differential::new(*conv);
    let failure = gens.iter().find_map(|g| {
        let r = d.apply(&diff_generator(g, conv));
        (!r.is_zero()).then(|| (g.to_string(), r))
    });
    ConventionCheck {
        convention: *conv,
        passes: failure.is_none(),
        generators_checked: gens.len(),
        failure,
    }
}

/// Checks `d∘d = 0` on every generator with `n + 2m <= max_weight` for the
/// standard exponent and for every member of the affine family.
pub fn validate_sign_convention(max_weight: usize) -> Result<ValidationReport, ChainError> {
    let gens = Generator::all(max_weight);
    let cork_free: Vec<Generator> = gens.iter().filter(|g| g.m == 0).cloned().collect();
    let checks: Vec<ConventionCheck> = SignConvention::all()
        .par_iter()
        .map(|c| check_convention(c, &gens))
        .collect();
    let passing: Vec<SignConvention> = checks
        .iter()
        .filter(|c| c.passes)
        .map(|c| c.convention)
        .collect();
    let standard = checks[0].clone();
    let default = *passing.first().ok_or_else(|| {
        let (generator, residue) = standard.failure.clone().expect("standard convention fails");
        ChainError::NoConvention {
            generator,
            residue: residue.to_string(),
        }
    })?;
    let printed = SignConvention::printed_cork_free();
    let mu4 = Generator::new(4, 0, vec![]).expect("valid");
    Ok(ValidationReport {
        max_weight,
        generators: gens.len(),
        standard,
        printed_cork_free: check_convention(&printed, &cork_free),
        mu4_residue: d_squared(&mu4, &printed),
        passing,
        default,
    })
}

/// Outcome of the randomized operad-axiom checks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub samples: usize,
    pub parallel: usize,
    pub sequential: usize,
    pub unit: usize,
    pub leibniz: usize,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        [self.parallel, self.sequential, self.unit, self.leibniz]
            .iter()
            .all(|&k| k == self.samples)
    }
}

fn random_element<R: Rng>(rng: &mut R) -> ChainElement {
    let n = rng.gen_range(0..=3);
    let t = crate::sample::cell_tree(rng, n, 2, true);
    let c: i64 = rng.gen_range(1..=3) * if rng.gen_bool(0.5) { -1 } else { 1 };
    ChainElement::term(CellTree(t), c.into())
}

fn random_with_inputs<R: Rng>(rng: &mut R, min: usize) -> ChainElement {
    loop {
        let x = random_element(rng);
        if x.arity >= min {
            return x;
        }
    }
}

/// Checks the graded parallel and sequential composition axioms, the unit
/// axioms and the Leibniz rule on seeded random monomials.
pub fn check_axioms(conv: &SignConvention, seed: u64, samples: usize) -> AxiomReport {
    let mut rng = crate::sample::rng(seed);
    let mut d = Differential::new(*conv);
    let mut report = AxiomReport {
        samples,
        parallel: 0,
        sequential: 0,
        unit: 0,
        leibniz: 0,
    };
    let sign = |x: &ChainElement| x.degree().unwrap_or(0) % 2 == 1;
    for _ in 0..samples {
        let a = random_with_inputs(&mut rng, 2);
        let b = random_element(&mut rng);
        let c = random_element(&mut rng);
        // (a∘_i b)∘_j c = (-1)^{|b||c|} (a∘_j c)∘_{i+|c|-1} b for j < i
        let i = rng.gen_range(2..=a.arity);
        let j = rng.gen_range(1..i);
        let lhs = compose_chain(&compose_chain(&a, i, &b).unwrap(), j, &c).unwrap();
        let mut rhs = compose_chain(&compose_chain(&a, j, &c).unwrap(), i + c.arity - 1, &b).unwrap();
        if sign(&b) && sign(&c) {
            rhs = -rhs;
        }
        report.parallel += usize::from(lhs == rhs);

        // (a∘_i b)∘_{i+k-1} c = a∘_i (b∘_k c)
        let b = random_with_inputs(&mut rng, 1);
        let i = rng.gen_range(1..=a.arity);
        let k = rng.gen_range(1..=b.arity);
        let lhs = compose_chain(&compose_chain(&a, i, &b).unwrap(), i + k - 1, &c).unwrap();
        let rhs = compose_chain(&a, i, &compose_chain(&b, k, &c).unwrap()).unwrap();
        report.sequential += usize::from(lhs == rhs);

        let u = ChainElement::unit();
        let unit_ok = compose_chain(&u, 1, &c).unwrap() == c
            && compose_chain(&a, i, &u).unwrap() == a;
        report.unit += usize::from(unit_ok);

        // d(a∘_i b) = da∘_i b + (-1)^{|a|} a∘_i db
        let lhs = d.apply(&compose_chain(&a, i, &b).unwrap());
        let mut rhs = compose_chain(&d.apply(&a), i, &b).unwrap();
        let tail = compose_chain(&a, i, &d.apply(&b)).unwrap();
        if sign(&a) {
            rhs -= &tail;
        } else {
            rhs += &tail;
        }
        report.leibniz += usize::from(lhs == rhs);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ct(s: &str) -> CellTree {
        CellTree::parse(s).unwrap()
    }

    fn el(terms: &[(i64, &str)]) -> ChainElement {
        let mut x = ChainElement::zero(ct(terms[0].1).arity());
        for (c, t) in terms {
            x.add_term(ct(t), (*c).into());
        }
        x
    }

    fn g(n: usize, m: usize, set: &[usize]) -> Generator {
        Generator::new(n, m, set.to_vec()).unwrap()
    }

    #[test]
    fn cell_trees_and_degrees() {
        assert_eq!(ct("(b l)").degree(), 1);
        assert_eq!(ct("w").degree(), 0);
        assert_eq!(ct("(b b)").degree(), 2);
        assert_eq!(ct("l").degree(), 0);
        assert_eq!(ct("(l l l l)").degree(), 2);
        assert_eq!(ct("((b b) l)").degree(), 2);
        assert!(CellTree::parse("b").is_err());
        assert!(CellTree::parse("((l l))").is_err());
        for t in crate::trees::enumerate_cell_trees(2, 2, true) {
            let (n, m, mb) = (t.n_leaves(), t.n_corks(), t.n_black_corks());
            let c = CellTree::new(t.clone()).unwrap();
            assert_eq!(c.degree() + t.n_inner_edges(), 2 * m + n + mb - 2, "{t}");
        }
    }

    #[test]
    fn r_and_p_composition() {
        assert_eq!(find_r(&[2], 3, 1).unwrap(), 1);
        assert_eq!(find_r(&[2], 3, 2).unwrap(), 2);
        assert_eq!(find_r(&[], 4, 3).unwrap(), 1);
        assert!(find_r(&[2], 3, 3).is_err());
        assert_eq!(p_compose(&[2], 3, 1, &[1], 2).unwrap(), (vec![1, 3], 4));
        assert_eq!(p_compose(&[], 3, 2, &[], 2).unwrap(), (vec![], 4));
        assert_eq!(p_compose(&[1, 4], 4, 2, &[], 1).unwrap(), (vec![1, 4], 4));
    }

    #[test]
    fn generators() {
        assert!(Generator::new(1, 0, vec![]).is_err());
        assert!(Generator::new(0, 0, vec![]).is_err());
        assert!(Generator::new(2, 1, vec![4]).is_err());
        assert_eq!(g(0, 1, &[1]).tree(), Tree::WhiteCork);
        assert_eq!(g(2, 1, &[2]).tree().to_string(), "(l b l)");
        assert_eq!(g(2, 1, &[2]).degree(), 2);
        assert_eq!(Generator::from_tree(&Tree::parse("(l b l)").unwrap()), Some(g(2, 1, &[2])));
        let all = Generator::all(4);
        assert!(all.contains(&g(0, 2, &[1, 2])));
        assert!(!all.iter().any(|x| x.n + 2 * x.m > 4));
    }

    #[test]
    fn composition_examples() {
        let mu2 = ChainElement::generator(&g(2, 0, &[]));
        let mu3 = ChainElement::generator(&g(3, 0, &[]));
        assert_eq!(compose_chain(&mu2, 1, &mu2).unwrap(), el(&[(1, "((l l) l)")]));
        // (a∘₁b)∘₅c against (a∘₅c)∘₁b with |b| = |c| = 1
        let x = compose_chain(&compose_chain(&mu3, 1, &mu3).unwrap(), 5, &mu3).unwrap();
        let y = compose_chain(&compose_chain(&mu3, 3, &mu3).unwrap(), 1, &mu3).unwrap();
        assert_eq!(x, -y);
        let u = ChainElement::unit();
        assert_eq!(compose_chain(&u, 1, &mu3).unwrap(), mu3);
        assert_eq!(compose_chain(&mu3, 2, &u).unwrap(), mu3);
        assert!(compose_chain(&mu2, 3, &mu2).is_err());
    }

    #[test]
    fn decompositions() {
        let d = decompose(&ct("(w l)")).unwrap();
        assert_eq!(d.root, g(2, 0, &[]));
        assert_eq!(d.grafts, vec![(1, ct("w"))]);
        let d = decompose(&ct("(b l)")).unwrap();
        assert_eq!(d.root, g(1, 1, &[1]));
        assert!(d.grafts.is_empty());
        let d = decompose(&ct("((l l) l)")).unwrap();
        assert_eq!(d.grafts, vec![(1, ct("(l l)"))]);
        assert!(decompose(&CellTree::unit()).is_none());
        for t in ["((l l l) (l l l))", "((b l l) w (l b l))", "(((l l l) l) (b b) l)"] {
            assert_eq!(decompose(&ct(t)).unwrap().recompose(), el(&[(1, t)]), "{t}");
        }
    }

    #[test]
    fn split_off_any_subtree() {
        // moving the graft of X_j last crosses the grafts of X_a, a < j
        let xs = ["(l l l)", "(b l l)", "(l l l)"];
        for j in 1..=3 {
            let mut children: Vec<Tree> = xs.iter().map(|x| Tree::parse(x).unwrap()).collect();
            children[j - 1] = Tree::Leaf;
            let rest = CellTree::new(Tree::Node(children)).unwrap();
            let before: usize = xs[..j - 1].iter().map(|x| ct(x).degree()).sum();
            let slot = xs[..j - 1].iter().map(|x| ct(x).arity()).sum::<usize>() + 1;
            let x = ct(xs[j - 1]);
            let sign = if x.degree() * before % 2 == 1 { -1 } else { 1 };
            let got = compose_chain(
                &ChainElement::monomial(rest),
                slot,
                &ChainElement::monomial(x),
            )
            .unwrap();
            assert_eq!(got, el(&[(sign, "((l l l) (b l l) (l l l))")]), "j = {j}");
        }
    }

    #[test]
    fn differential_of_generators() {
        let standard = SignConvention::standard();
        assert_eq!(
            diff_generator(&g(3, 0, &[]), &standard).len(),
            2
        );
        assert_eq!(diff_generator(&g(4, 0, &[]), &standard).len(), 5);
        assert_eq!(diff_generator(&g(5, 0, &[]), &standard).len(), 2 + 3 + 4);
        assert!(diff_generator(&g(0, 1, &[1]), &standard).is_zero());
        assert_eq!(
            diff_generator(&g(1, 1, &[1]), &standard),
            el(&[(1, "(w l)"), (-1, "l")])
        );
        let db = diff_generator(&g(0, 2, &[1, 2]), &standard);
        assert_eq!(db.len(), 2);
        assert!(db.coef(&ct("(b w)")).abs().is_one());
        assert!(db.coef(&ct("(w b)")).abs().is_one());
        for gen in Generator::all(6) {
            let d = diff_generator(&gen, &standard);
            for (t, _) in d.terms() {
                assert_eq!(t.degree() + 1, gen.degree(), "{gen} -> {t}");
                assert!(t.tree().n_corks() <= gen.m);
                assert_eq!(t.arity(), gen.n);
            }
        }
    }

    #[test]
    fn printed_cork_free_exponent_fails_at_mu4() {
        let conv = SignConvention::printed_cork_free();
        let r = d_squared(&g(4, 0, &[]), &conv);
        assert_eq!(r.len(), 4);
        assert!(r.terms().all(|(_, c)| c.abs() == BigInt::from(2)));
        assert!(d_squared(&g(4, 0, &[]), &SignConvention::standard()).is_zero());
    }

    #[test]
    fn convention_strings() {
        let c: SignConvention = "0100000".parse().unwrap();
        assert_eq!(c, SignConvention::printed_cork_free());
        assert_eq!(c.to_string(), "0100000");
        assert!("01".parse::<SignConvention>().is_err());
        let all = SignConvention::all();
        assert_eq!(all.len(), 128);
        assert_eq!(all[0], SignConvention::standard());
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn json_and_mod() {
        let x = el(&[(-1, "l"), (1, "(w l)"), (7, "(b l)")]);
        assert_eq!(
            serde_json::to_string(&x).unwrap(),
            r#"[{"coef":"1","tree":"(w l)"},{"coef":"-1","tree":"l"},{"coef":"7","tree":"(b l)"}]"#
        );
        let r = x.reduce_mod(&BigInt::from(7));
        assert_eq!(r, el(&[(6, "l"), (1, "(w l)")]));
        assert_eq!(x.to_string(), "(w l) - l + 7·(b l)");
    }
}
