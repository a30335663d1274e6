//! The cubical point-set model of the unital associahedra.
//!
//! A point of `K^u_n` is represented by a binary tree with `n` leaves and
//! black corks, together with a label in `[0,1]` on every inner edge (a
//! [`LabeledPoint`]). Two labelings are identified by the relations that
//! collapse zero-length edges: an inner edge between internal vertices is
//! contracted, and a zero-length cork edge is deleted together with its cork,
//! the two remaining edges at its parent being merged.
//!
//! Every zero label can be removed this way and each move deletes an edge, so
//! rewriting terminates in a [`NormalPoint`]: a tree without single-child
//! vertices whose labels all lie in `(0,1]`. Two labeled points are
//! equivalent exactly when their normal forms agree.

use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cube_maps::{self, CubeError, CubePoint, Label, Sign};
use crate::trees::{check_index_set, Tree, TreeError, VertexInfo, VertexKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PointError {
    #[error("tree {0} is not binary")]
    NotBinary(String),
    #[error("points carry black corks only")]
    WhiteCork,
    #[error("{got} labels given for {expected} inner edges")]
    LabelCount { got: usize, expected: usize },
    #[error("normal form contains a zero label or a single-child vertex")]
    NotNormal,
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Cube(#[from] CubeError),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

#[derive(Deserialize)]
struct RawPoint {
    tree: Tree,
    labels: CubePoint,
}

/// A point of the cube `H_T` of a binary tree `T` with black corks.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawPoint")]
pub struct LabeledPoint {
    tree: Tree,
    labels: CubePoint,
}

impl TryFrom<RawPoint> for LabeledPoint {
    type Error = PointError;

    fn try_from(raw: RawPoint) -> Result<Self, Self::Error> {
        LabeledPoint::new(raw.tree, raw.labels)
    }
}

impl LabeledPoint {
    pub fn new(tree: Tree, labels: CubePoint) -> Result<Self, PointError> {
        if !tree.is_binary() {
            return Err(PointError::NotBinary(tree.to_string()));
        }
        if tree.n_white_corks() > 0 {
            return Err(PointError::WhiteCork);
        }
        let expected = tree.n_inner_edges();
        if labels.dim() != expected {
            return Err(PointError::LabelCount {
                got: labels.dim(),
                expected,
            });
        }
        Ok(LabeledPoint { tree, labels })
    }

    /// The unit `• ∈ H_|`.
    pub fn unit() -> Self {
        LabeledPoint {
            tree: Tree::Leaf,
            labels: CubePoint::empty(),
        }
    }

    /// The 0-ary point `• ∈ H_b`.
    pub fn cork() -> Self {
        LabeledPoint {
            tree: Tree::BlackCork,
            labels: CubePoint::empty(),
        }
    }

    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn labels(&self) -> &CubePoint {
        &self.labels
    }

    pub fn normal_form(&self) -> NormalPoint {
        normal_form(self)
    }
}

impl fmt::Display for LabeledPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.tree, self.labels)
    }
}

/// Canonical representative of an equivalence class of labeled points.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawPoint")]
pub struct NormalPoint {
    tree: Tree,
    labels: CubePoint,
}

impl TryFrom<RawPoint> for NormalPoint {
    type Error = PointError;

    fn try_from(raw: RawPoint) -> Result<Self, Self::Error> {
        NormalPoint::new(raw.tree, raw.labels)
    }
}

impl NormalPoint {
    pub fn new(tree: Tree, labels: CubePoint) -> Result<Self, PointError> {
        if tree.n_white_corks() > 0 {
            return Err(PointError::WhiteCork);
        }
        let expected = tree.n_inner_edges();
        if labels.dim() != expected {
            return Err(PointError::LabelCount {
                got: labels.dim(),
                expected,
            });
        }
        if tree.has_degree_two() || labels.coords().iter().any(Zero::is_zero) {
            return Err(PointError::NotNormal);
        }
        Ok(NormalPoint { tree, labels })
    }

    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn labels(&self) -> &CubePoint {
        &self.labels
    }
}

impl fmt::Display for NormalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.tree, self.labels)
    }
}

// Labeled tree with the label of each edge stored on the edge itself.
#[derive(Clone, Debug, PartialEq, Eq)]
enum LNode {
    Leaf,
    Cork,
    Node(Vec<Edge>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Edge {
    label: Option<Label>,
    to: LNode,
}

impl LNode {
    fn build(tree: &Tree, labels: &[Label]) -> LNode {
        fn go(t: &Tree, it: &mut std::slice::Iter<'_, Label>) -> LNode {
            match t {
                Tree::Leaf => LNode::Leaf,
                Tree::BlackCork | Tree::WhiteCork => LNode::Cork,
                Tree::Node(ch) => LNode::Node(
                    ch.iter()
                        .map(|c| {
                            let label = match c {
                                Tree::Leaf => None,
                                _ => Some(it.next().expect("label count checked").clone()),
                            };
                            Edge {
                                label,
                                to: go(c, it),
                            }
                        })
                        .collect(),
                ),
            }
        }
        let mut it = labels.iter();
        go(tree, &mut it)
    }

    fn parts(&self) -> (Tree, Vec<Label>) {
        fn go(n: &LNode, out: &mut Vec<Label>) -> Tree {
            match n {
                LNode::Leaf => Tree::Leaf,
                LNode::Cork => Tree::BlackCork,
                LNode::Node(ch) => Tree::Node(
                    ch.iter()
                        .map(|e| {
                            if let Some(l) = &e.label {
                                out.push(l.clone());
                            }
                            go(&e.to, out)
                        })
                        .collect(),
                ),
            }
        }
        let mut labels = Vec::new();
        let t = go(self, &mut labels);
        (t, labels)
    }

    // Child-index paths of the inner edges, in path order.
    fn edge_paths(&self) -> Vec<Vec<usize>> {
        fn go(n: &LNode, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if let LNode::Node(ch) = n {
                for (k, e) in ch.iter().enumerate() {
                    path.push(k);
                    if e.label.is_some() {
                        out.push(path.clone());
                    }
                    go(&e.to, path, out);
                    path.pop();
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    fn node_mut(&mut self, path: &[usize]) -> &mut LNode {
        path.iter().fold(self, |n, &k| match n {
            LNode::Node(ch) => &mut ch[k].to,
            _ => panic!("path leaves the tree"),
        })
    }

    fn edge(&self, path: &[usize]) -> &Edge {
        let (last, init) = path.split_last().expect("non-empty edge path");
        let mut n = self;
        for &k in init {
            let LNode::Node(ch) = n else { unreachable!() };
            n = &ch[k].to;
        }
        let LNode::Node(ch) = n else { unreachable!() };
        &ch[*last]
    }

    fn edge_mut(&mut self, path: &[usize]) -> &mut Edge {
        let (last, init) = path.split_last().expect("non-empty edge path");
        let LNode::Node(ch) = self.node_mut(init) else {
            unreachable!()
        };
        &mut ch[*last]
    }

    // Collapses the zero-length edge at `path`.
    fn collapse(&mut self, path: &[usize]) {
        let (&k, parent_path) = path.split_last().expect("non-empty edge path");
        let LNode::Node(ch) = self.node_mut(parent_path) else {
            unreachable!()
        };
        let removed = ch.remove(k);
        match removed.to {
            LNode::Node(grand) => {
                ch.splice(k..k, grand);
            }
            LNode::Cork => {
                if ch.len() == 1 {
                    let survivor = ch.pop().expect("one child left");
                    if parent_path.is_empty() {
                        *self = survivor.to;
                    } else {
                        let below = self.edge_mut(parent_path);
                        below.label = match survivor.to {
                            LNode::Leaf => None,
                            _ => {
                                let a = below.label.take().expect("inner edge");
                                let b = survivor.label.expect("inner edge");
                                Some(if b > a { b } else { a })
                            }
                        };
                        below.to = survivor.to;
                    }
                }
            }
            LNode::Leaf => unreachable!("leaf edges carry no label"),
        }
    }

    fn zero_edges(&self) -> Vec<Vec<usize>> {
        self.edge_paths()
            .into_iter()
            .filter(|p| self.edge(p).label.as_ref().is_some_and(Zero::is_zero))
            .collect()
    }
}

/// Rewrites `p` to its normal form, always collapsing the zero-labeled edge
/// of lowest index first.
pub fn normal_form(p: &LabeledPoint) -> NormalPoint {
    normal_form_with(p, |_| 0)
}

/// Rewrites `p` to normal form; `choose(k)` picks which of the `k` current
/// zero-labeled edges (in path order) is collapsed next.
pub fn normal_form_with(p: &LabeledPoint, mut choose: impl FnMut(usize) -> usize) -> NormalPoint {
    let mut node = LNode::build(&p.tree, p.labels.coords());
    loop {
        let zeros = node.zero_edges();
        if zeros.is_empty() {
            break;
        }
        let pick = choose(zeros.len()).min(zeros.len() - 1);
        node.collapse(&zeros[pick]);
    }
    let (tree, labels) = node.parts();
    NormalPoint {
        tree,
        labels: CubePoint::new(labels).expect("labels stay in [0,1]"),
    }
}

pub fn equivalent(p: &LabeledPoint, q: &LabeledPoint) -> bool {
    normal_form(p) == normal_form(q)
}

/// The local shapes around a cork edge `e` of a binary tree.
///
/// The first letter half (`A`..`D`) has an inner edge below the cork's parent,
/// `E`..`H` the root edge. Within each row the cork is the left child first,
/// then the right child; the sibling edge is inner for `A, B, E, F` and a
/// leaf for `C, D, G, H`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum R2Case {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
    H,
}

impl R2Case {
    pub const ALL: [R2Case; 8] = [
        R2Case::A,
        R2Case::B,
        R2Case::C,
        R2Case::D,
        R2Case::E,
        R2Case::F,
        R2Case::G,
        R2Case::H,
    ];
}

impl fmt::Display for R2Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R2{}", format!("{self:?}").to_lowercase())
    }
}

// Local data around a degree-1 vertex `v` (path-order number) with a
// binary parent.
struct Local {
    left: bool,
    lower_inner: Option<usize>,
    sibling_inner: Option<usize>,
}

fn local_structure(verts: &[VertexInfo], inner: &[usize], v: usize) -> Local {
    let u = verts[v - 1].parent;
    let left = v == u + 1;
    let sibling = if left { v + 1 } else { u + 1 };
    let edge_index = |x: usize| inner.iter().position(|&w| w == x).map(|k| k + 1);
    Local {
        left,
        lower_inner: if verts[u - 1].parent == 0 {
            None
        } else {
            edge_index(u)
        },
        sibling_inner: if verts[sibling - 1].kind == VertexKind::Leaf {
            None
        } else {
            edge_index(sibling)
        },
    }
}

/// `ε`: the identification of the `e`-th negative face of `H_T` with
/// `H_{T∖e}`, where `e` is a cork edge of the binary tree `T` and `x` are
/// the coordinates of the face.
pub fn r2_epsilon(
    tree: &Tree,
    e: usize,
    x: &CubePoint,
) -> Result<(LabeledPoint, R2Case), PointError> {
    if !tree.is_binary() {
        return Err(PointError::NotBinary(tree.to_string()));
    }
    let inner = tree.inner_edges();
    if e == 0 || e > inner.len() {
        return Err(TreeError::EdgeIndex {
            index: e,
            edges: inner.len(),
        }
        .into());
    }
    if x.dim() + 1 != inner.len() {
        return Err(PointError::LabelCount {
            got: x.dim() + 1,
            expected: inner.len(),
        });
    }
    let verts = tree.vertices();
    let cork = inner[e - 1];
    if verts[cork - 1].kind != VertexKind::BlackCork {
        return Err(PointError::Precondition(format!(
            "inner edge {e} does not end in a black cork"
        )));
    }
    let local = local_structure(&verts, &inner, cork);
    let (case, labels) = match (local.lower_inner, local.sibling_inner, local.left) {
        (Some(_), Some(_), true) => (R2Case::A, cube_maps::connection(e - 1, x)?),
        (Some(j), Some(_), false) => (R2Case::B, cube_maps::connection(j, x)?),
        (Some(_), None, true) => (R2Case::C, cube_maps::degeneracy(e - 1, x)?),
        (Some(_), None, false) => (R2Case::D, cube_maps::degeneracy(e - 1, x)?),
        (None, Some(_), true) => (R2Case::E, cube_maps::degeneracy(1, x)?),
        (None, Some(_), false) => (R2Case::F, cube_maps::degeneracy(1, x)?),
        (None, None, true) => (R2Case::G, CubePoint::empty()),
        (None, None, false) => (R2Case::H, CubePoint::empty()),
    };
    let reduced = tree.remove_cork_edge(e)?;
    Ok((LabeledPoint::new(reduced, labels)?, case))
}

/// The partner of `p` under a single cork-deletion move at edge `e`, whose
/// label must be zero.
pub fn r2_partner(p: &LabeledPoint, e: usize) -> Result<(LabeledPoint, R2Case), PointError> {
    let x = p.labels.coords();
    if e == 0 || e > x.len() || !x[e - 1].is_zero() {
        return Err(PointError::Precondition(format!(
            "edge {e} is not a zero-labeled inner edge"
        )));
    }
    let face = cube_maps::degeneracy(e, &p.labels)?;
    r2_epsilon(&p.tree, e, &face)
}

/// The partner of `p` under a single contraction move: `e` must be a
/// zero-labeled inner edge between internal vertices, and the result is the
/// other binary tree with the same contraction, its corresponding edge set
/// to zero and all other labels carried along.
pub fn r1_partner(p: &LabeledPoint, e: usize) -> Result<LabeledPoint, PointError> {
    let mut node = LNode::build(&p.tree, p.labels.coords());
    let paths = node.edge_paths();
    if e == 0 || e > paths.len() {
        return Err(TreeError::EdgeIndex {
            index: e,
            edges: paths.len(),
        }
        .into());
    }
    let path = &paths[e - 1];
    let edge = node.edge(path);
    if !edge.label.as_ref().is_some_and(Zero::is_zero) || !matches!(edge.to, LNode::Node(_)) {
        return Err(PointError::Precondition(format!(
            "edge {e} is not a zero-labeled edge between internal vertices"
        )));
    }
    let (&k, parent_path) = path.split_last().expect("non-empty");
    let LNode::Node(ch) = node.node_mut(parent_path) else {
        unreachable!()
    };
    let moved = ch.remove(k);
    let other = ch.remove(0);
    let LNode::Node(mut pair) = moved.to else {
        unreachable!()
    };
    let second = pair.pop().expect("binary");
    let first = pair.pop().expect("binary");
    let zero = Some(Label::zero());
    *ch = if k == 0 {
        // ((A B) C) -> (A (B C))
        vec![
            first,
            Edge {
                label: zero,
                to: LNode::Node(vec![second, other]),
            },
        ]
    } else {
        // (C (A B)) -> ((C A) B)
        vec![
            Edge {
                label: zero,
                to: LNode::Node(vec![other, first]),
            },
            second,
        ]
    };
    let (tree, labels) = node.parts();
    LabeledPoint::new(tree, CubePoint::new(labels)?)
}

/// Operad composition `p ∘_i q` on points: grafting with the new inner edge
/// labeled 1, i.e. `∂_k^+ ∘ σ_k` on coordinates.
pub fn compose_point(
    p: &LabeledPoint,
    i: usize,
    q: &LabeledPoint,
) -> Result<LabeledPoint, PointError> {
    let leaves = p.tree.n_leaves();
    if i == 0 || i > leaves {
        return Err(TreeError::LeafIndex { index: i, leaves }.into());
    }
    if p.tree.is_unit() {
        return Ok(q.clone());
    }
    if q.tree.is_unit() {
        return Ok(p.clone());
    }
    let tree = p.tree.graft(i, &q.tree)?;
    let k = new_edge_index(&p.tree, i);
    let labels = cube_maps::face(Sign::Plus, k, &cube_maps::shuffle(k, &p.labels, &q.labels)?)?;
    LabeledPoint::new(tree, labels)
}

// Index of the inner edge created by grafting onto leaf `i`.
fn new_edge_index(tree: &Tree, i: usize) -> usize {
    let verts = tree.vertices();
    let mut seen_leaves = 0;
    let mut before = 0;
    for v in &verts {
        if v.kind == VertexKind::Leaf {
            seen_leaves += 1;
            if seen_leaves == i {
                break;
            }
        } else if v.parent != 0 {
            before += 1;
        }
    }
    before + 1
}

/// Associahedral degeneracy `∘_i: K_p → K_{p-1}` on the cell of a cork-free
/// binary tree with at least three leaves: removes the `i`-th leaf, applying
/// a connection when both neighbouring edges are inner and a degeneracy
/// otherwise.
pub fn degeneracy_map(i: usize, p: &LabeledPoint) -> Result<LabeledPoint, PointError> {
    let leaves = p.tree.n_leaves();
    if p.tree.n_corks() > 0 || leaves < 3 {
        return Err(PointError::Precondition(
            "degeneracies act on cork-free trees with at least three leaves".into(),
        ));
    }
    if i == 0 || i > leaves {
        return Err(TreeError::LeafIndex { index: i, leaves }.into());
    }
    let verts = p.tree.vertices();
    let inner = p.tree.inner_edges();
    let leaf = verts
        .iter()
        .enumerate()
        .filter(|(_, v)| v.kind == VertexKind::Leaf)
        .nth(i - 1)
        .map(|(k, _)| k + 1)
        .expect("leaf index checked");
    let local = local_structure(&verts, &inner, leaf);
    let labels = match (local.lower_inner, local.sibling_inner) {
        (Some(j), Some(_)) => cube_maps::connection(j, &p.labels)?,
        (None, Some(j)) => cube_maps::degeneracy(j, &p.labels)?,
        (Some(j), None) => cube_maps::degeneracy(j, &p.labels)?,
        (None, None) => unreachable!("only the two-leaf corolla has this shape"),
    };
    let corked = p.tree.graft(i, &Tree::BlackCork)?;
    let tree = corked.remove_cork_edge(new_edge_index(&p.tree, i))?;
    LabeledPoint::new(tree, labels)
}

/// Top characteristic map: the point `(x, t)` of `K_{n+m} × [0,1]^m` sent to
/// `H_{T^{•S}}`, with the entries of `t` on the new cork edges.
pub fn char_map_top(
    set: &[usize],
    x: &LabeledPoint,
    t: &CubePoint,
) -> Result<LabeledPoint, PointError> {
    if x.tree.n_corks() > 0 {
        return Err(PointError::Precondition("x must be cork-free".into()));
    }
    if set.len() != t.dim() {
        return Err(PointError::LabelCount {
            got: t.dim(),
            expected: set.len(),
        });
    }
    check_index_set(set, x.tree.n_leaves())?;
    let tree = x.tree.add_corks(set)?;
    if tree.n_inner_edges() != x.labels.dim() + t.dim() {
        return Err(PointError::Precondition(
            "the lone cork carries no cube coordinate".into(),
        ));
    }
    let mut xs = x.labels.coords().iter();
    let mut ts = t.coords().iter();
    let labels = tree
        .vertices()
        .iter()
        .filter(|v| v.parent != 0 && v.kind != VertexKind::Leaf)
        .map(|v| match v.kind {
            VertexKind::BlackCork => ts.next(),
            _ => xs.next(),
        })
        .map(|l| l.expect("counts checked").clone())
        .collect();
    LabeledPoint::new(tree, CubePoint::new(labels)?)
}

/// Characteristic map on the `i`-th negative face of `[0,1]^m`: coordinates
/// are shuffled into `H_{T^{•(S∖{j_i})}}`, projected by `ε` onto
/// `H_{T^{•S}∖e}` and the result normalised.
pub fn char_map_boundary(
    set: &[usize],
    i: usize,
    x: &LabeledPoint,
    t: &CubePoint,
) -> Result<NormalPoint, PointError> {
    if set.len() != t.dim() + 1 {
        return Err(PointError::LabelCount {
            got: t.dim() + 1,
            expected: set.len(),
        });
    }
    if i == 0 || i > set.len() {
        return Err(PointError::Precondition(format!(
            "face index {i} out of range 1..={}",
            set.len()
        )));
    }
    let mut rest = set.to_vec();
    let j = rest.remove(i - 1);
    let face_coords = char_map_top(&rest, x, t)?;
    let full = x.tree.add_corks(set)?;
    // the cork edge created at leaf j of x
    let cork_vertex = full
        .vertices()
        .iter()
        .enumerate()
        .filter(|(_, v)| matches!(v.kind, VertexKind::Leaf | VertexKind::BlackCork))
        .nth(j - 1)
        .map(|(k, _)| k + 1)
        .expect("set checked");
    let e = full
        .inner_edges()
        .iter()
        .position(|&v| v == cork_vertex)
        .map(|k| k + 1)
        .ok_or_else(|| PointError::Precondition("cork is not on an inner edge".into()))?;
    let (projected, _) = r2_epsilon(&full, e, &face_coords.labels)?;
    Ok(normal_form(&projected))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Tree {
        Tree::parse(s).unwrap()
    }

    fn lp(tree: &str, labels: &[&str]) -> LabeledPoint {
        LabeledPoint::new(t(tree), CubePoint::parse(labels).unwrap()).unwrap()
    }

    fn np(tree: &str, labels: &[&str]) -> NormalPoint {
        NormalPoint::new(t(tree), CubePoint::parse(labels).unwrap()).unwrap()
    }

    #[test]
    fn validation() {
        assert!(matches!(
            LabeledPoint::new(t("(l l l)"), CubePoint::empty()),
            Err(PointError::NotBinary(_))
        ));
        assert!(matches!(
            LabeledPoint::new(t("(w l)"), CubePoint::parse(&["1"]).unwrap()),
            Err(PointError::WhiteCork)
        ));
        assert_eq!(
            LabeledPoint::new(t("((l l) l)"), CubePoint::empty()),
            Err(PointError::LabelCount {
                got: 0,
                expected: 1
            })
        );
        assert_eq!(
            NormalPoint::new(t("(l l l)"), CubePoint::empty()).unwrap().tree(),
            &t("(l l l)")
        );
        assert_eq!(
            NormalPoint::new(t("((l l) l)"), CubePoint::parse(&["0"]).unwrap()),
            Err(PointError::NotNormal)
        );
    }

    #[test]
    fn normal_forms() {
        assert_eq!(normal_form(&lp("((l l) l)", &["0"])), np("(l l l)", &[]));
        assert_eq!(
            normal_form(&lp("((b (l l)) l)", &["1/2", "0", "1/3"])),
            np("((l l) l)", &["1/2"])
        );
        assert_eq!(normal_form(&lp("(b l)", &["0"])), np("l", &[]));
        assert_eq!(normal_form(&lp("(b b)", &["0", "1/2"])), np("b", &[]));
        assert_eq!(
            normal_form(&lp("((b l) l)", &["1/3", "1"])),
            np("((b l) l)", &["1/3", "1"])
        );
    }

    #[test]
    fn equivalence() {
        // both binary resolutions of the corolla, with the free edge length 0
        let a = lp("(((l l) l) l)", &["1/2", "0"]);
        let b = lp("((l (l l)) l)", &["1/2", "0"]);
        assert!(equivalent(&a, &b));
        let c = lp("(((l l) l) l)", &["1/2", "1/5"]);
        assert!(!equivalent(&a, &c));
        // the max rule: parent and sibling lengths merge
        let x = lp("((b (l l)) l)", &["1/2", "0", "1/3"]);
        let y = lp("((l l) l)", &["1/2"]);
        assert!(equivalent(&x, &y));
        let x = lp("((b (l l)) l)", &["1/4", "0", "1/3"]);
        let y = lp("((l l) l)", &["1/3"]);
        assert!(equivalent(&x, &y));
    }

    #[test]
    fn r2_cases() {
        let x = |v: &[&str]| CubePoint::parse(v).unwrap();
        let cases = [
            ("((b (l l)) l)", 2, x(&["1/2", "1/3"]), "((l l) l)", x(&["1/2"]), R2Case::A),
            ("(((l l) b) l)", 3, x(&["1/4", "1/3"]), "((l l) l)", x(&["1/3"]), R2Case::B),
            ("((b l) l)", 2, x(&["1/2"]), "(l l)", x(&[]), R2Case::C),
            ("((l b) l)", 2, x(&["1/2"]), "(l l)", x(&[]), R2Case::D),
            ("(b (l l))", 1, x(&["1/2"]), "(l l)", x(&[]), R2Case::E),
            ("((l l) b)", 2, x(&["1/2"]), "(l l)", x(&[]), R2Case::F),
            ("(b l)", 1, x(&[]), "l", x(&[]), R2Case::G),
            ("(l b)", 1, x(&[]), "l", x(&[]), R2Case::H),
        ];
        for (tree, e, coords, out_tree, out_labels, case) in cases {
            let (p, c) = r2_epsilon(&t(tree), e, &coords).unwrap();
            assert_eq!(c, case, "{tree}");
            assert_eq!(p.tree(), &t(out_tree));
            assert_eq!(p.labels(), &out_labels);
        }
        assert!(r2_epsilon(&t("((l l) l)"), 1, &CubePoint::empty()).is_err());
    }

    #[test]
    fn r1_partners() {
        let p = lp("(((l l) b) l)", &["1/3", "0", "1/2"]);
        let q = r1_partner(&p, 2).unwrap();
        assert_eq!(q.tree(), &t("((l (l b)) l)"));
        assert_eq!(q.labels(), &CubePoint::parse(&["1/3", "0", "1/2"]).unwrap());
        assert!(equivalent(&p, &q));
        assert_eq!(r1_partner(&q, 2).unwrap(), p);
        assert!(r1_partner(&p, 1).is_err());
        assert!(r1_partner(&p, 3).is_err());
    }

    #[test]
    fn composition() {
        let p = lp("((l b) (b l))", &["1/2", "1/3", "1/4", "1/5"]);
        let q = lp("(l ((l b) l))", &["1/6", "1/7", "1/8"]);
        let r = compose_point(&p, 1, &q).unwrap();
        assert_eq!(r.tree(), &t("(((l ((l b) l)) b) (b l))"));
        assert_eq!(
            r.labels(),
            &CubePoint::parse(&["1/2", "1", "1/6", "1/7", "1/8", "1/3", "1/4", "1/5"]).unwrap()
        );
        assert_eq!(compose_point(&p, 2, &LabeledPoint::unit()).unwrap(), p);
        assert_eq!(compose_point(&LabeledPoint::unit(), 1, &p).unwrap(), p);
        let two = lp("(l l)", &[]);
        assert_eq!(compose_point(&two, 2, &two).unwrap(), lp("(l (l l))", &["1"]));
        assert!(compose_point(&two, 3, &two).is_err());
    }

    #[test]
    fn degeneracies() {
        let p = lp("((l l) l)", &["1/3"]);
        assert_eq!(degeneracy_map(1, &p).unwrap(), lp("(l l)", &[]));
        assert_eq!(degeneracy_map(3, &p).unwrap(), lp("(l l)", &[]));
        let q = lp("(((l l) l) l)", &["1/3", "1/2"]);
        assert_eq!(degeneracy_map(3, &q).unwrap(), lp("((l l) l)", &["1/2"]));
        assert_eq!(degeneracy_map(2, &q).unwrap(), lp("((l l) l)", &["1/3"]));
        assert!(degeneracy_map(1, &lp("(l l)", &[])).is_err());
        assert!(degeneracy_map(1, &lp("((b l) l)", &["1", "1"])).is_err());
    }

    #[test]
    fn characteristic_maps() {
        let two = lp("(l l)", &[]);
        let half = CubePoint::parse(&["1/2"]).unwrap();
        assert_eq!(char_map_top(&[1], &two, &half).unwrap(), lp("(b l)", &["1/2"]));
        assert_eq!(char_map_top(&[], &two, &CubePoint::empty()).unwrap(), two);
        let ab = CubePoint::parse(&["1/3", "2/3"]).unwrap();
        assert_eq!(char_map_top(&[1, 2], &two, &ab).unwrap(), lp("(b b)", &["1/3", "2/3"]));
        assert!(char_map_top(&[1], &LabeledPoint::unit(), &half).is_err());
        assert!(char_map_top(&[1, 2], &two, &half).is_err());

        assert_eq!(
            char_map_boundary(&[1], 1, &two, &CubePoint::empty()).unwrap(),
            np("l", &[])
        );
        let x = lp("((l l) l)", &["1/2"]);
        assert_eq!(
            char_map_boundary(&[1], 1, &x, &CubePoint::empty()).unwrap(),
            normal_form(&lp("((b l) l)", &["1/2", "0"]))
        );
    }

    #[test]
    fn serde_roundtrip() {
        let p = lp("((l l) l)", &["0"]);
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, r#"{"tree":"((l l) l)","labels":["0"]}"#);
        let back: LabeledPoint = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
        let bad: Result<LabeledPoint, _> =
            serde_json::from_str(r#"{"tree":"((l l) l)","labels":[]}"#);
        assert!(bad.is_err());
    }
}
