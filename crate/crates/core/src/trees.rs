//! Planar level-trees, the objects of the iterated wreath product.
//!
//! A level-tree is stored as its ordered list of root branches, each itself a
//! level-tree. Vertices are addressed by [`VertexPath`]s, the sequence of
//! (zero-based) child indices leading from the root, so that height and
//! planar order are intrinsic to the address.
//!
//! Besides the data structure this module provides the canonical bracket
//! encoding, exhaustive enumeration (all trees and pruned trees), rooted
//! subtrees (the shape of retractions), the star construction `T_*` and the
//! root shuffles of height-one trees.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Result, ThetaError};

/// A finite planar rooted tree; the height of a vertex is its distance from
/// the root.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LevelTree {
    children: Vec<LevelTree>,
}

/// Address of a vertex: zero-based child indices from the root.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexPath(pub Vec<usize>);

impl VertexPath {
    pub fn root() -> Self {
        VertexPath(Vec::new())
    }

    pub fn height(&self) -> usize {
        self.0.len()
    }

    pub fn child(&self, index: usize) -> Self {
        let mut path = self.0.clone();
        path.push(index);
        VertexPath(path)
    }

    /// Parent path and the index of this vertex among its siblings.
    pub fn split_last(&self) -> Option<(VertexPath, usize)> {
        let (&last, init) = self.0.split_last()?;
        Some((VertexPath(init.to_vec()), last))
    }
}

impl fmt::Display for VertexPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(".")?;
            }
            write!(f, "{i}")?;
        }
        Ok(())
    }
}

impl LevelTree {
    /// The height-0 tree `[]`.
    pub fn point() -> Self {
        LevelTree::default()
    }

    /// Grafts the given trees onto a fresh root, in order.
    pub fn from_children(children: Vec<LevelTree>) -> Self {
        LevelTree { children }
    }

    /// The corolla with `m` leaves.
    pub fn corolla(m: usize) -> Self {
        LevelTree::from_children(vec![LevelTree::point(); m])
    }

    /// The linear tree of height `k`.
    pub fn linear(k: usize) -> Self {
        (0..k).fold(LevelTree::point(), |t, _| t.suspend())
    }

    /// The homogeneous tree whose vertices at height `h` all have `ks[h]`
    /// children.
    pub fn homogeneous(ks: &[usize]) -> Self {
        match ks.split_first() {
            None => LevelTree::point(),
            Some((&k, rest)) => LevelTree::from_children(vec![LevelTree::homogeneous(rest); k]),
        }
    }

    /// The tree shifted one level up by a new root edge.
    pub fn suspend(&self) -> Self {
        LevelTree::from_children(vec![self.clone()])
    }

    pub fn children(&self) -> &[LevelTree] {
        &self.children
    }

    pub fn into_children(self) -> Vec<LevelTree> {
        self.children
    }

    /// Number of root branches.
    pub fn valence(&self) -> usize {
        self.children.len()
    }

    pub fn is_point(&self) -> bool {
        self.children.is_empty()
    }

    pub fn height(&self) -> usize {
        self.children.iter().map(|c| 1 + c.height()).max().unwrap_or(0)
    }

    /// Number of non-root vertices (equivalently, of edges).
    pub fn edges(&self) -> usize {
        let mut count = 0;
        let mut stack: Vec<&LevelTree> = vec![self];
        while let Some(t) = stack.pop() {
            count += t.children.len();
            stack.extend(t.children.iter());
        }
        count
    }

    pub fn subtree_at(&self, path: &VertexPath) -> Option<&LevelTree> {
        path.0
            .iter()
            .try_fold(self, |t, &i| t.children.get(i))
    }

    /// Vertices of exact height `h`, in planar (left-to-right) order.
    pub fn vertices_at_height(&self, h: usize) -> Vec<VertexPath> {
        let mut out = Vec::new();
        self.collect_at_height(h, &mut Vec::new(), &mut out);
        out
    }

    fn collect_at_height(&self, h: usize, prefix: &mut Vec<usize>, out: &mut Vec<VertexPath>) {
        if h == 0 {
            out.push(VertexPath(prefix.clone()));
            return;
        }
        for (i, c) in self.children.iter().enumerate() {
            prefix.push(i);
            c.collect_at_height(h - 1, prefix, out);
            prefix.pop();
        }
    }

    /// Number of vertices of exact height `h`.
    pub fn count_at_height(&self, h: usize) -> usize {
        if h == 0 {
            1
        } else {
            self.children.iter().map(|c| c.count_at_height(h - 1)).sum()
        }
    }

    /// Non-root vertices without children, in planar order.
    pub fn leaves(&self) -> Vec<VertexPath> {
        let mut out = Vec::new();
        self.collect_leaves(&mut Vec::new(), &mut out);
        out
    }

    fn collect_leaves(&self, prefix: &mut Vec<usize>, out: &mut Vec<VertexPath>) {
        for (i, c) in self.children.iter().enumerate() {
            prefix.push(i);
            if c.is_point() {
                out.push(VertexPath(prefix.clone()));
            } else {
                c.collect_leaves(prefix, out);
            }
            prefix.pop();
        }
    }

    /// True iff every leaf sits at height exactly `n` (and the tree is not
    /// the point when `n > 0`).
    pub fn is_pruned(&self, n: usize) -> bool {
        if n == 0 {
            return self.is_point();
        }
        !self.children.is_empty() && self.children.iter().all(|c| c.is_pruned(n - 1))
    }

    /// The `k`-level truncation: all vertices of height `<= k`.
    pub fn truncate(&self, k: usize) -> LevelTree {
        if k == 0 {
            return LevelTree::point();
        }
        LevelTree::from_children(self.children.iter().map(|c| c.truncate(k - 1)).collect())
    }

    /// Removes the childless vertex at `path`.
    pub fn remove_leaf(&self, path: &VertexPath) -> Result<LevelTree> {
        let target = self
            .subtree_at(path)
            .ok_or_else(|| ThetaError::Argument(format!("no vertex at path {path}")))?;
        if path.0.is_empty() || !target.is_point() {
            return Err(ThetaError::Argument(format!("vertex {path} is not a leaf")));
        }
        Ok(Subtree::without_leaf(self, path).apply(self))
    }

    /// Canonical bracket encoding, e.g. `[[],[[]]]`.
    pub fn render(&self) -> String {
        let mut s = String::with_capacity(2 * self.edges() + 2);
        self.render_into(&mut s);
        s
    }

    fn render_into(&self, s: &mut String) {
        s.push('[');
        for (i, c) in self.children.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            c.render_into(s);
        }
        s.push(']');
    }
}

impl fmt::Display for LevelTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl FromStr for LevelTree {
    type Err = ThetaError;

    fn from_str(s: &str) -> Result<Self> {
        parse_tree(s)
    }
}

impl Serialize for LevelTree {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.render())
    }
}

impl<'de> Deserialize<'de> for LevelTree {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        parse_tree(&s).map_err(serde::de::Error::custom)
    }
}

struct Parser<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].1.is_whitespace() {
            self.pos += 1;
        }
    }

    fn offset(&self) -> usize {
        self.chars.get(self.pos).map(|&(o, _)| o).unwrap_or(self.src.len())
    }

    fn error(&self, message: impl Into<String>) -> ThetaError {
        ThetaError::Parse { position: self.offset(), message: message.into() }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn expect(&mut self, want: char) -> Result<()> {
        match self.peek() {
            Some(c) if c == want => {
                self.pos += 1;
                Ok(())
            }
            Some(c) => Err(self.error(format!("expected '{want}', found '{c}'"))),
            None => Err(self.error(format!("expected '{want}', found end of input"))),
        }
    }

    fn tree(&mut self) -> Result<LevelTree> {
        self.expect('[')?;
        let mut children = Vec::new();
        if self.peek() == Some(']') {
            self.pos += 1;
            return Ok(LevelTree::from_children(children));
        }
        loop {
            children.push(self.tree()?);
            match self.peek() {
                Some(',') => self.pos += 1,
                Some(']') => {
                    self.pos += 1;
                    return Ok(LevelTree::from_children(children));
                }
                Some(c) => return Err(self.error(format!("expected ',' or ']', found '{c}'"))),
                None => return Err(self.error("unbalanced brackets")),
            }
        }
    }
}

/// Parses the bracket encoding of a level-tree; whitespace is ignored.
pub fn parse_tree(text: &str) -> Result<LevelTree> {
    let mut p = Parser { chars: text.char_indices().collect(), pos: 0, src: text };
    let tree = p.tree()?;
    if let Some(c) = p.peek() {
        return Err(p.error(format!("trailing input starting with '{c}'")));
    }
    Ok(tree)
}

/// All ordered forests of trees drawn from `pool(size)` whose total weight
/// (one per root edge plus the branch's own edges) is `e`.
fn forests<F>(e: usize, branch: &mut F) -> Vec<Vec<LevelTree>>
where
    F: FnMut(usize) -> Vec<LevelTree>,
{
    let mut table: Vec<Vec<Vec<LevelTree>>> = vec![vec![Vec::new()]];
    for total in 1..=e {
        let mut here = Vec::new();
        for first in 1..=total {
            let heads = branch(first - 1);
            if heads.is_empty() {
                continue;
            }
            for head in &heads {
                for tail in &table[total - first] {
                    let mut f = Vec::with_capacity(tail.len() + 1);
                    f.push(head.clone());
                    f.extend(tail.iter().cloned());
                    here.push(f);
                }
            }
        }
        table.push(here);
    }
    table.pop().unwrap_or_default()
}

fn sort_canonical(trees: &mut [LevelTree]) {
    trees.sort_by_cached_key(|t| t.render());
}

/// All level-trees of height `<= n` with exactly `e` edges, sorted
/// lexicographically by their bracket encoding.
pub fn enumerate_trees(n: usize, e: usize) -> Vec<LevelTree> {
    let mut memo: HashMap<(usize, usize), Vec<LevelTree>> = HashMap::new();
    let mut out = trees_rec(n, e, &mut memo);
    sort_canonical(&mut out);
    out
}

fn trees_rec(n: usize, e: usize, memo: &mut HashMap<(usize, usize), Vec<LevelTree>>) -> Vec<LevelTree> {
    if e == 0 {
        return vec![LevelTree::point()];
    }
    if n == 0 {
        return Vec::new();
    }
    if let Some(v) = memo.get(&(n, e)) {
        return v.clone();
    }
    let out: Vec<LevelTree> = forests(e, &mut |size| trees_rec(n - 1, size, memo))
        .into_iter()
        .map(LevelTree::from_children)
        .collect();
    memo.insert((n, e), out.clone());
    out
}

/// All pruned `n`-trees (every leaf at height exactly `n`) with `e` edges,
/// sorted by bracket encoding.
pub fn enumerate_pruned(n: usize, e: usize) -> Vec<LevelTree> {
    let mut memo: HashMap<(usize, usize), Vec<LevelTree>> = HashMap::new();
    let mut out = pruned_rec(n, e, &mut memo);
    sort_canonical(&mut out);
    out
}

fn pruned_rec(n: usize, e: usize, memo: &mut HashMap<(usize, usize), Vec<LevelTree>>) -> Vec<LevelTree> {
    if n == 0 {
        return if e == 0 { vec![LevelTree::point()] } else { Vec::new() };
    }
    if e < n {
        return Vec::new();
    }
    if let Some(v) = memo.get(&(n, e)) {
        return v.clone();
    }
    let out: Vec<LevelTree> = forests(e, &mut |size| pruned_rec(n - 1, size, memo))
        .into_iter()
        .filter(|f| !f.is_empty())
        .map(LevelTree::from_children)
        .collect();
    memo.insert((n, e), out.clone());
    out
}

/// A rooted subtree of a level-tree: at every kept vertex, an arbitrary
/// subset of its children is kept. These are exactly the shapes of the
/// retractions out of the tree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subtree {
    children: Vec<Option<Subtree>>,
}

impl Subtree {
    pub fn full(tree: &LevelTree) -> Self {
        Subtree { children: tree.children.iter().map(|c| Some(Subtree::full(c))).collect() }
    }

    /// Only the root kept.
    pub fn root(tree: &LevelTree) -> Self {
        Subtree { children: vec![None; tree.valence()] }
    }

    pub fn from_children(children: Vec<Option<Subtree>>) -> Self {
        Subtree { children }
    }

    pub fn children(&self) -> &[Option<Subtree>] {
        &self.children
    }

    pub fn is_full(&self) -> bool {
        self.children.iter().all(|c| c.as_ref().is_some_and(Subtree::is_full))
    }

    /// The tree spanned by the kept vertices.
    pub fn apply(&self, tree: &LevelTree) -> LevelTree {
        LevelTree::from_children(
            self.children
                .iter()
                .zip(&tree.children)
                .filter_map(|(m, c)| m.as_ref().map(|m| m.apply(c)))
                .collect(),
        )
    }

    pub fn union(&self, other: &Subtree) -> Subtree {
        debug_assert_eq!(self.children.len(), other.children.len());
        Subtree {
            children: self
                .children
                .iter()
                .zip(&other.children)
                .map(|(a, b)| match (a, b) {
                    (Some(a), Some(b)) => Some(a.union(b)),
                    (Some(a), None) | (None, Some(a)) => Some(a.clone()),
                    (None, None) => None,
                })
                .collect(),
        }
    }

    /// Containment of kept vertex sets.
    pub fn is_contained_in(&self, other: &Subtree) -> bool {
        self.children.iter().zip(&other.children).all(|(a, b)| match (a, b) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(a), Some(b)) => a.is_contained_in(b),
        })
    }

    /// The full subtree minus the leaf at `path`.
    pub fn without_leaf(tree: &LevelTree, path: &VertexPath) -> Subtree {
        match path.0.split_first() {
            None => Subtree::full(tree),
            Some((&i, rest)) => Subtree {
                children: tree
                    .children
                    .iter()
                    .enumerate()
                    .map(|(k, c)| {
                        if k != i {
                            Some(Subtree::full(c))
                        } else if rest.is_empty() {
                            None
                        } else {
                            Some(Subtree::without_leaf(c, &VertexPath(rest.to_vec())))
                        }
                    })
                    .collect(),
            },
        }
    }

    /// Every rooted subtree of `tree`.
    pub fn all(tree: &LevelTree) -> Vec<Subtree> {
        let mut acc: Vec<Vec<Option<Subtree>>> = vec![Vec::new()];
        for c in &tree.children {
            let mut options: Vec<Option<Subtree>> = vec![None];
            options.extend(Subtree::all(c).into_iter().map(Some));
            acc = acc
                .into_iter()
                .flat_map(|prefix| {
                    options.iter().map(move |o| {
                        let mut p = prefix.clone();
                        p.push(o.clone());
                        p
                    })
                })
                .collect();
        }
        acc.into_iter().map(|children| Subtree { children }).collect()
    }
}

/// Identifier of a cell of a star-construction graph: the cell sits over a
/// vertex of height `k` (its dimension) and carries an index in
/// `0..=valence` of that vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellId {
    pub vertex: VertexPath,
    pub index: usize,
}

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.vertex, self.index)
    }
}

/// A finite `n`-graph: graded cells with source and target maps into the
/// previous degree. `source[k][c]` is an index into `cells[k - 1]`;
/// `source[0]` and `target[0]` are empty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NGraph {
    cells: Vec<Vec<CellId>>,
    source: Vec<Vec<usize>>,
    target: Vec<Vec<usize>>,
}

#[derive(Serialize)]
struct NGraphJson {
    cells: Vec<Vec<String>>,
    source: Vec<Vec<String>>,
    target: Vec<Vec<String>>,
}

impl NGraph {
    pub fn dimension(&self) -> usize {
        self.cells.len().saturating_sub(1)
    }

    pub fn cells(&self, k: usize) -> &[CellId] {
        self.cells.get(k).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn source_of(&self, k: usize, c: usize) -> usize {
        self.source[k][c]
    }

    pub fn target_of(&self, k: usize, c: usize) -> usize {
        self.target[k][c]
    }

    pub fn cell_count(&self) -> usize {
        self.cells.iter().map(Vec::len).sum()
    }

    /// `ss = st` and `ts = tt` in every degree `>= 2`.
    pub fn is_globular(&self) -> bool {
        (2..self.cells.len()).all(|k| {
            (0..self.cells[k].len()).all(|c| {
                let (s, t) = (self.source[k][c], self.target[k][c]);
                self.source[k - 1][s] == self.source[k - 1][t]
                    && self.target[k - 1][s] == self.target[k - 1][t]
            })
        })
    }

    /// Whether the preorder generated by `s(x) <= x <= t(x)` on all cells is
    /// a total order.
    pub fn generated_order_is_total(&self) -> bool {
        let mut offset = vec![0usize; self.cells.len() + 1];
        for k in 0..self.cells.len() {
            offset[k + 1] = offset[k] + self.cells[k].len();
        }
        let total = offset[self.cells.len()];
        let mut reach = vec![vec![false; total]; total];
        for (x, row) in reach.iter_mut().enumerate() {
            row[x] = true;
        }
        for k in 1..self.cells.len() {
            for c in 0..self.cells[k].len() {
                let x = offset[k] + c;
                let s = offset[k - 1] + self.source[k][c];
                let t = offset[k - 1] + self.target[k][c];
                reach[s][x] = true;
                reach[x][t] = true;
            }
        }
        for m in 0..total {
            for a in 0..total {
                if reach[a][m] {
                    for b in 0..total {
                        if reach[m][b] {
                            reach[a][b] = true;
                        }
                    }
                }
            }
        }
        (0..total).all(|a| {
            (0..total).all(|b| a == b || (reach[a][b] ^ reach[b][a]))
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        let name = |k: usize, i: usize| self.cells[k][i].to_string();
        let json = NGraphJson {
            cells: self.cells.iter().map(|d| d.iter().map(CellId::to_string).collect()).collect(),
            source: (0..self.cells.len())
                .map(|k| self.source[k].iter().map(|&s| name(k - 1, s)).collect())
                .collect(),
            target: (0..self.cells.len())
                .map(|k| self.target[k].iter().map(|&t| name(k - 1, t)).collect())
                .collect(),
        };
        serde_json::to_value(json).expect("n-graph serializes")
    }
}

/// The star construction `T_*`: the `n`-graph whose `k`-cells are the pairs
/// (vertex `v` of height `k`, index `0..=valence(v)`), with the cell over
/// the `i`-th child of `v` running from index `i` to index `i + 1` of `v`.
pub fn star(tree: &LevelTree, n: usize) -> Result<NGraph> {
    if tree.height() > n {
        return Err(ThetaError::Argument(format!(
            "tree {tree} has height {} > {n}",
            tree.height()
        )));
    }
    let mut cells = Vec::with_capacity(n + 1);
    let mut index: Vec<BTreeMap<CellId, usize>> = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mut here = Vec::new();
        for v in tree.vertices_at_height(k) {
            let valence = tree.subtree_at(&v).map(LevelTree::valence).unwrap_or(0);
            for j in 0..=valence {
                here.push(CellId { vertex: v.clone(), index: j });
            }
        }
        index.push(here.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect());
        cells.push(here);
    }
    let mut source = vec![Vec::new()];
    let mut target = vec![Vec::new()];
    for k in 1..=n {
        let (mut s, mut t) = (Vec::new(), Vec::new());
        for cell in &cells[k] {
            let (parent, i) = cell.vertex.split_last().expect("positive height");
            s.push(index[k - 1][&CellId { vertex: parent.clone(), index: i }]);
            t.push(index[k - 1][&CellId { vertex: parent, index: i + 1 }]);
        }
        source.push(s);
        target.push(t);
    }
    Ok(NGraph { cells, source, target })
}

/// One interleaving of the root branches of two trees.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Shuffle {
    pub tree: LevelTree,
    /// For each root branch of `tree`, whether it came from the first tree.
    pub from_first: Vec<bool>,
}

/// All order-preserving interleavings of the root branches of `s` and `t`.
/// Only trees of height at most one are supported.
pub fn shuffle_trees(s: &LevelTree, t: &LevelTree) -> Result<Vec<Shuffle>> {
    for x in [s, t] {
        if x.height() > 1 {
            return Err(ThetaError::Unsupported(format!(
                "shuffles of trees of height > 1 ({x})"
            )));
        }
    }
    let (a, b) = (s.valence(), t.valence());
    let mut out = Vec::new();
    let mut pattern = Vec::with_capacity(a + b);
    shuffle_rec(a, b, &mut pattern, &mut out);
    Ok(out
        .into_iter()
        .map(|from_first| {
            let (mut i, mut j) = (0, 0);
            let children = from_first
                .iter()
                .map(|&left| {
                    if left {
                        i += 1;
                        s.children[i - 1].clone()
                    } else {
                        j += 1;
                        t.children[j - 1].clone()
                    }
                })
                .collect();
            Shuffle { tree: LevelTree::from_children(children), from_first }
        })
        .collect())
}

fn shuffle_rec(a: usize, b: usize, pattern: &mut Vec<bool>, out: &mut Vec<Vec<bool>>) {
    if a == 0 && b == 0 {
        out.push(pattern.clone());
        return;
    }
    if a > 0 {
        pattern.push(true);
        shuffle_rec(a - 1, b, pattern, out);
        pattern.pop();
    }
    if b > 0 {
        pattern.push(false);
        shuffle_rec(a, b - 1, pattern, out);
        pattern.pop();
    }
}
