//! Planted planar trees with leaves, black corks and white corks.
//!
//! A [`Tree`] is stored as the node sitting on top of the root edge; the root
//! vertex itself is implicit. Children are kept in planar order, so the path
//! order on vertices is the depth-first preorder starting at the root.
//!
//! Leaves, corks and inner edges are indexed from 1 in path order.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("empty tree notation")]
    Empty,
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("leaf index {index} out of range (tree has {leaves} leaves)")]
    LeafIndex { index: usize, leaves: usize },
    #[error("inner edge index {index} out of range (tree has {edges} inner edges)")]
    EdgeIndex { index: usize, edges: usize },
    #[error("inner edge {0} ends in a cork and cannot be contracted")]
    CorkEdge(usize),
    #[error("cork set must be strictly increasing and within 1..={leaves}")]
    CorkSet { leaves: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
}

/// A planted planar tree. `Node` children are non-empty and ordered.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tree {
    Leaf,
    BlackCork,
    WhiteCork,
    Node(Vec<Tree>),
}

/// The kind of a non-root vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VertexKind {
    Leaf,
    BlackCork,
    WhiteCork,
    Internal,
}

/// Counts and edge data of a tree.
///
/// Vertices are numbered by path order with the root as vertex 0. An edge
/// is identified with its upper vertex, so `inner_edges` holds the path-order
/// numbers of the upper endpoints of the inner edges, in increasing order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeStats {
    pub n_leaves: usize,
    pub n_black_corks: usize,
    pub n_white_corks: usize,
    pub height: usize,
    pub inner_edges: Vec<usize>,
    /// Degree of every vertex in path order, root first.
    pub degrees: Vec<usize>,
}

/// One vertex of a tree as seen in path order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexInfo {
    pub kind: VertexKind,
    pub level: usize,
    /// Path-order number of the parent; `0` is the root vertex.
    pub parent: usize,
    pub degree: usize,
}

impl Tree {
    /// The unit tree `|`.
    pub fn unit() -> Tree {
        Tree::Leaf
    }

    /// Corolla `C_n`; `C_0` is the single black cork.
    pub fn corolla(n: usize) -> Tree {
        if n == 0 {
            Tree::BlackCork
        } else {
            Tree::Node(vec![Tree::Leaf; n])
        }
    }

    pub fn is_unit(&self) -> bool {
        matches!(self, Tree::Leaf)
    }

    pub fn is_cork(&self) -> bool {
        matches!(self, Tree::BlackCork | Tree::WhiteCork)
    }

    pub fn parse(text: &str) -> Result<Tree, TreeError> {
        Parser::new(text).parse()
    }

    pub fn n_leaves(&self) -> usize {
        match self {
            Tree::Leaf => 1,
            Tree::BlackCork | Tree::WhiteCork => 0,
            Tree::Node(ch) => ch.iter().map(Tree::n_leaves).sum(),
        }
    }

    pub fn n_black_corks(&self) -> usize {
        match self {
            Tree::BlackCork => 1,
            Tree::Leaf | Tree::WhiteCork => 0,
            Tree::Node(ch) => ch.iter().map(Tree::n_black_corks).sum(),
        }
    }

    pub fn n_white_corks(&self) -> usize {
        match self {
            Tree::WhiteCork => 1,
            Tree::Leaf | Tree::BlackCork => 0,
            Tree::Node(ch) => ch.iter().map(Tree::n_white_corks).sum(),
        }
    }

    pub fn n_corks(&self) -> usize {
        self.n_black_corks() + self.n_white_corks()
    }

    /// Number of internal (non degree-1) vertices other than the root.
    pub fn n_internal(&self) -> usize {
        match self {
            Tree::Node(ch) => 1 + ch.iter().map(Tree::n_internal).sum::<usize>(),
            _ => 0,
        }
    }

    /// Height: the maximal level, where the root vertex has level 0.
    pub fn height(&self) -> usize {
        match self {
            Tree::Node(ch) => 1 + ch.iter().map(Tree::height).max().unwrap_or(0),
            _ => 1,
        }
    }

    /// True when every internal vertex has exactly two children, i.e. every
    /// vertex has degree 1 or 3.
    pub fn is_binary(&self) -> bool {
        match self {
            Tree::Node(ch) => ch.len() == 2 && ch.iter().all(Tree::is_binary),
            _ => true,
        }
    }

    /// True when some internal vertex has a single child.
    pub fn has_degree_two(&self) -> bool {
        match self {
            Tree::Node(ch) => ch.len() == 1 || ch.iter().any(Tree::has_degree_two),
            _ => false,
        }
    }

    /// Non-root vertices in path order.
    pub fn vertices(&self) -> Vec<VertexInfo> {
        fn walk(t: &Tree, level: usize, parent: usize, out: &mut Vec<VertexInfo>) {
            let me = out.len() + 1;
            let (kind, degree) = match t {
                Tree::Leaf => (VertexKind::Leaf, 1),
                Tree::BlackCork => (VertexKind::BlackCork, 1),
                Tree::WhiteCork => (VertexKind::WhiteCork, 1),
                Tree::Node(ch) => (VertexKind::Internal, ch.len() + 1),
            };
            out.push(VertexInfo {
                kind,
                level,
                parent,
                degree,
            });
            if let Tree::Node(ch) = t {
                for c in ch {
                    walk(c, level + 1, me, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, 1, 0, &mut out);
        out
    }

    /// Path-order numbers of the upper endpoints of the inner edges.
    ///
    /// An edge is inner when its lower endpoint is not the root and its upper
    /// endpoint is not a leaf.
    pub fn inner_edges(&self) -> Vec<usize> {
        self.vertices()
            .iter()
            .enumerate()
            .filter(|(_, v)| v.parent != 0 && v.kind != VertexKind::Leaf)
            .map(|(k, _)| k + 1)
            .collect()
    }

    pub fn n_inner_edges(&self) -> usize {
        match self {
            Tree::Node(ch) => ch.iter().map(Tree::inner_below).sum(),
            _ => 0,
        }
    }

    // Inner edges at or below the edge entering `self`, counting that edge.
    fn inner_below(&self) -> usize {
        match self {
            Tree::Leaf => 0,
            Tree::BlackCork | Tree::WhiteCork => 1,
            Tree::Node(ch) => 1 + ch.iter().map(Tree::inner_below).sum::<usize>(),
        }
    }

    pub fn stats(&self) -> TreeStats {
        let verts = self.vertices();
        let mut degrees = Vec::with_capacity(verts.len() + 1);
        degrees.push(1);
        degrees.extend(verts.iter().map(|v| v.degree));
        TreeStats {
            n_leaves: self.n_leaves(),
            n_black_corks: self.n_black_corks(),
            n_white_corks: self.n_white_corks(),
            height: verts.iter().map(|v| v.level).max().unwrap_or(0),
            inner_edges: self.inner_edges(),
            degrees,
        }
    }

    /// Grafts `other` onto the `i`-th leaf (1-based).
    pub fn graft(&self, i: usize, other: &Tree) -> Result<Tree, TreeError> {
        let leaves = self.n_leaves();
        if i == 0 || i > leaves {
            return Err(TreeError::LeafIndex { index: i, leaves });
        }
        let mut out = self.clone();
        let mut counter = i;
        replace_leaf(&mut out, &mut counter, other);
        Ok(out)
    }

    /// Contracts the `e`-th inner edge (1-based), splicing the children of its
    /// upper vertex into the lower vertex.
    pub fn contract_edge(&self, e: usize) -> Result<Tree, TreeError> {
        let edges = self.n_inner_edges();
        if e == 0 || e > edges {
            return Err(TreeError::EdgeIndex { index: e, edges });
        }
        let (path, _) = self.inner_edge_path(e);
        if self.at(&path).is_cork() {
            return Err(TreeError::CorkEdge(e));
        }
        let mut out = self.clone();
        let (parent_path, last) = path.split_at(path.len() - 1);
        let Tree::Node(ch) = out.at_mut(parent_path) else {
            unreachable!()
        };
        let Tree::Node(grand) = std::mem::replace(&mut ch[last[0]], Tree::Leaf) else {
            unreachable!()
        };
        ch.splice(last[0]..=last[0], grand);
        Ok(out)
    }

    /// `T^{•S}`: turns the leaves at the (1-based, increasing) positions `S`
    /// into black corks.
    pub fn add_corks(&self, set: &[usize]) -> Result<Tree, TreeError> {
        let leaves = self.n_leaves();
        check_index_set(set, leaves).map_err(|_| TreeError::CorkSet { leaves })?;
        let mut out = self.clone();
        for &j in set.iter().rev() {
            out = out.graft(j, &Tree::BlackCork)?;
        }
        Ok(out)
    }

    /// `T∖e` for a binary tree: deletes the cork at the top of inner edge `e`
    /// and merges the two remaining edges at its parent.
    pub fn remove_cork_edge(&self, e: usize) -> Result<Tree, TreeError> {
        if !self.is_binary() {
            return Err(TreeError::Precondition("tree is not binary".into()));
        }
        let edges = self.n_inner_edges();
        if e == 0 || e > edges {
            return Err(TreeError::EdgeIndex { index: e, edges });
        }
        let (path, _) = self.inner_edge_path(e);
        if !self.at(&path).is_cork() {
            return Err(TreeError::Precondition(format!(
                "inner edge {e} does not end in a cork"
            )));
        }
        let mut out = self.clone();
        let (parent_path, last) = path.split_at(path.len() - 1);
        let parent = out.at_mut(parent_path);
        let Tree::Node(ch) = parent else {
            unreachable!()
        };
        ch.remove(last[0]);
        let survivor = ch.pop().expect("binary vertex has two children");
        *parent = survivor;
        Ok(out)
    }

    /// Replaces every cork by a leaf.
    pub fn strip_corks(&self) -> Tree {
        match self {
            Tree::Leaf | Tree::BlackCork | Tree::WhiteCork => Tree::Leaf,
            Tree::Node(ch) => Tree::Node(ch.iter().map(Tree::strip_corks).collect()),
        }
    }

    /// Position (child indices from the top vertex) of the upper vertex of
    /// inner edge `e`, together with its path-order number.
    pub fn inner_edge_path(&self, e: usize) -> (Vec<usize>, usize) {
        fn walk(t: &Tree, path: &mut Vec<usize>, seen: &mut usize, e: usize) -> bool {
            if let Tree::Node(ch) = t {
                for (k, c) in ch.iter().enumerate() {
                    path.push(k);
                    if !matches!(c, Tree::Leaf) {
                        *seen += 1;
                        if *seen == e {
                            return true;
                        }
                    }
                    if walk(c, path, seen, e) {
                        return true;
                    }
                    path.pop();
                }
            }
            false
        }
        let mut path = Vec::new();
        let mut seen = 0;
        assert!(walk(self, &mut path, &mut seen, e), "inner edge {e} missing");
        let number = self.inner_edges()[e - 1];
        (path, number)
    }

    /// Subtree reached by following child indices from the top vertex.
    pub fn at(&self, path: &[usize]) -> &Tree {
        path.iter().fold(self, |t, &k| match t {
            Tree::Node(ch) => &ch[k],
            _ => panic!("path leaves the tree"),
        })
    }

    pub fn at_mut(&mut self, path: &[usize]) -> &mut Tree {
        path.iter().fold(self, |t, &k| match t {
            Tree::Node(ch) => &mut ch[k],
            _ => panic!("path leaves the tree"),
        })
    }
}

fn replace_leaf(t: &mut Tree, counter: &mut usize, other: &Tree) -> bool {
    match t {
        Tree::Leaf => {
            *counter -= 1;
            if *counter == 0 {
                *t = other.clone();
                return true;
            }
            false
        }
        Tree::BlackCork | Tree::WhiteCork => false,
        Tree::Node(ch) => ch.iter_mut().any(|c| replace_leaf(c, counter, other)),
    }
}

/// Checks that `set` is strictly increasing inside `1..=n`.
pub fn check_index_set(set: &[usize], n: usize) -> Result<(), TreeError> {
    let ok = set.iter().all(|&j| j >= 1 && j <= n) && set.windows(2).all(|w| w[0] < w[1]);
    if ok {
        Ok(())
    } else {
        Err(TreeError::CorkSet { leaves: n })
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tree::Leaf => f.write_str("l"),
            Tree::BlackCork => f.write_str("b"),
            Tree::WhiteCork => f.write_str("w"),
            Tree::Node(ch) => {
                f.write_str("(")?;
                for (k, c) in ch.iter().enumerate() {
                    if k > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl FromStr for Tree {
    type Err = TreeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Tree::parse(s)
    }
}

impl serde::Serialize for Tree {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for Tree {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = <String as serde::Deserialize>::deserialize(d)?;
        Tree::parse(&s).map_err(serde::de::Error::custom)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            src: text.as_bytes(),
            pos: 0,
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, TreeError> {
        Err(TreeError::Syntax {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn parse(mut self) -> Result<Tree, TreeError> {
        self.skip_ws();
        if self.pos == self.src.len() {
            return Err(TreeError::Empty);
        }
        let t = self.tree()?;
        self.skip_ws();
        if self.pos != self.src.len() {
            return self.err("trailing input");
        }
        Ok(t)
    }

    fn tree(&mut self) -> Result<Tree, TreeError> {
        match self.src.get(self.pos) {
            Some(b'l') => {
                self.pos += 1;
                Ok(Tree::Leaf)
            }
            Some(b'b') => {
                self.pos += 1;
                Ok(Tree::BlackCork)
            }
            Some(b'w') => {
                self.pos += 1;
                Ok(Tree::WhiteCork)
            }
            Some(b'(') => {
                self.pos += 1;
                let mut children = Vec::new();
                loop {
                    self.skip_ws();
                    match self.src.get(self.pos) {
                        Some(b')') => {
                            if children.is_empty() {
                                return self.err("empty node");
                            }
                            self.pos += 1;
                            return Ok(Tree::Node(children));
                        }
                        None => return self.err("unclosed '('"),
                        _ => {
                            if !children.is_empty()
                                && !self.src[self.pos - 1].is_ascii_whitespace()
                            {
                                return self.err("expected whitespace between subtrees");
                            }
                            children.push(self.tree()?);
                        }
                    }
                }
            }
            Some(&c) => self.err(format!("unexpected character {:?}", c as char)),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Binomial coefficient as an arbitrary-precision integer.
pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::default();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for j in 0..k {
        acc = acc * BigUint::from(n - j) / BigUint::from(j + 1);
    }
    acc
}

pub fn catalan(k: usize) -> BigUint {
    binomial(2 * k, k) / BigUint::from(k + 1)
}

/// Number of binary trees with `n` leaves and `m` corks:
/// `binom(n+m, m) · Catalan(n+m-1)`.
pub fn count_binary(n: usize, m: usize) -> BigUint {
    if n + m == 0 {
        return BigUint::default();
    }
    binomial(n + m, m) * catalan(n + m - 1)
}

/// All binary trees with `n` leaves and `m` black corks, sorted by their
/// notation.
pub fn enumerate_binary(n: usize, m: usize) -> Vec<Tree> {
    let mut memo = HashMap::new();
    let mut out = binary_rec(n, m, &mut memo);
    sort_by_notation(&mut out);
    out
}

fn binary_rec(n: usize, m: usize, memo: &mut HashMap<(usize, usize), Vec<Tree>>) -> Vec<Tree> {
    if let Some(v) = memo.get(&(n, m)) {
        return v.clone();
    }
    let out = match (n, m) {
        (0, 0) => Vec::new(),
        (1, 0) => vec![Tree::Leaf],
        (0, 1) => vec![Tree::BlackCork],
        _ => {
            let mut out = Vec::new();
            for n1 in 0..=n {
                for m1 in 0..=m {
                    let (n2, m2) = (n - n1, m - m1);
                    if n1 + m1 == 0 || n2 + m2 == 0 {
                        continue;
                    }
                    let left = binary_rec(n1, m1, memo);
                    let right = binary_rec(n2, m2, memo);
                    for l in &left {
                        for r in &right {
                            out.push(Tree::Node(vec![l.clone(), r.clone()]));
                        }
                    }
                }
            }
            out
        }
    };
    memo.insert((n, m), out.clone());
    out
}

/// Trees indexing cells of `K^u_{n, max_corks}`: `n` leaves, at most
/// `max_corks` corks, no single-child vertices, and not the lone black cork.
/// Sorted by notation.
pub fn enumerate_cell_trees(n: usize, max_corks: usize, allow_white: bool) -> Vec<Tree> {
    let mut gen = CellGen {
        allow_white,
        trees: HashMap::new(),
        seqs: HashMap::new(),
    };
    let mut out = Vec::new();
    for c in 0..=max_corks {
        out.extend(
            gen.trees(n, c)
                .into_iter()
                .filter(|t| *t != Tree::BlackCork),
        );
    }
    sort_by_notation(&mut out);
    out
}

struct CellGen {
    allow_white: bool,
    trees: HashMap<(usize, usize), Vec<Tree>>,
    // non-empty ordered forests with the given totals
    seqs: HashMap<(usize, usize), Vec<Vec<Tree>>>,
}

impl CellGen {
    fn trees(&mut self, l: usize, c: usize) -> Vec<Tree> {
        if let Some(v) = self.trees.get(&(l, c)) {
            return v.clone();
        }
        let mut out = Vec::new();
        match (l, c) {
            (1, 0) => out.push(Tree::Leaf),
            (0, 1) => {
                out.push(Tree::BlackCork);
                if self.allow_white {
                    out.push(Tree::WhiteCork);
                }
            }
            _ => {}
        }
        if l + c >= 2 {
            // first child, then a forest of at least one more child
            for l1 in 0..=l {
                for c1 in 0..=c {
                    let (l2, c2) = (l - l1, c - c1);
                    if l1 + c1 == 0 || l2 + c2 == 0 {
                        continue;
                    }
                    let heads = self.trees(l1, c1);
                    let tails = self.seqs(l2, c2);
                    for h in &heads {
                        for tail in &tails {
                            let mut ch = Vec::with_capacity(tail.len() + 1);
                            ch.push(h.clone());
                            ch.extend(tail.iter().cloned());
                            out.push(Tree::Node(ch));
                        }
                    }
                }
            }
        }
        self.trees.insert((l, c), out.clone());
        out
    }

    fn seqs(&mut self, l: usize, c: usize) -> Vec<Vec<Tree>> {
        if let Some(v) = self.seqs.get(&(l, c)) {
            return v.clone();
        }
        let mut out: Vec<Vec<Tree>> = self.trees(l, c).into_iter().map(|t| vec![t]).collect();
        for l1 in 0..=l {
            for c1 in 0..=c {
                let (l2, c2) = (l - l1, c - c1);
                if l1 + c1 == 0 || l2 + c2 == 0 {
                    continue;
                }
                let heads = self.trees(l1, c1);
                let tails = self.seqs(l2, c2);
                for h in &heads {
                    for tail in &tails {
                        let mut v = Vec::with_capacity(tail.len() + 1);
                        v.push(h.clone());
                        v.extend(tail.iter().cloned());
                        out.push(v);
                    }
                }
            }
        }
        self.seqs.insert((l, c), out.clone());
        out
    }
}

pub fn sort_by_notation(trees: &mut Vec<Tree>) {
    let mut keyed: Vec<(String, Tree)> = trees.drain(..).map(|t| (t.to_string(), t)).collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    trees.extend(keyed.into_iter().map(|(_, t)| t));
}
