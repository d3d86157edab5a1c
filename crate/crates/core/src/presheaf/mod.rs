//! Finite, dimension-truncated `Θ_n`-sets: the Eilenberg-MacLane objects
//! `K(π, n) = γ_n^*(Hπ)`, representables and binary products, together with
//! non-degenerate reduction and cell censuses.

mod chain;
mod oracle;

use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigUint;

pub use chain::{chain_complex, homology_f2, BitMatrix, F2ChainComplex};
pub use oracle::{oracle_action, oracle_multisimplicial};

use crate::error::{Result, ThetaError};
use crate::gamma::{h_pi_act, FiniteAbelianGroup, GroupElement};
use crate::theta::{
    compose_theta, elementary_retractions, gamma_n, hom_theta, identity_theta, is_mono, kept_subtree,
    retraction_onto, section_of, ThetaOperator,
};
use crate::trees::{enumerate_pruned, enumerate_trees, LevelTree, Subtree};

/// A presheaf of finite sets on `Θ_n`, evaluated on demand.
pub trait ThetaSet {
    type Element: Clone + Debug + Eq + Hash;

    fn level(&self) -> usize;

    /// The set `X(T)`, in a deterministic order.
    fn elements(&self, tree: &LevelTree) -> Vec<Self::Element>;

    /// `X(f) : X(T) -> X(S)` for `f: S -> T`.
    fn act(&self, f: &ThetaOperator, x: &Self::Element) -> Self::Element;

    /// Whether `x ∈ X(T)` lies in the image of a non-identity retraction.
    /// Every such retraction factors through an elementary one, and each
    /// elementary retraction `r` has a section `s`, so it suffices to test
    /// `r^* s^* x = x`.
    fn is_degenerate(&self, tree: &LevelTree, x: &Self::Element) -> bool {
        elementary_retractions(tree, self.level())
            .iter()
            .any(|(r, s)| &self.act(r, &self.act(s, x)) == x)
    }

    /// Trees that may carry non-degenerate cells of dimension `d`.
    fn cell_trees(&self, d: usize) -> Vec<LevelTree> {
        enumerate_trees(self.level(), d)
    }

    fn nondegenerate(&self, tree: &LevelTree) -> Vec<Self::Element> {
        self.elements(tree).into_iter().filter(|x| !self.is_degenerate(tree, x)).collect()
    }

    fn count_nondegenerate(&self, tree: &LevelTree) -> BigUint {
        BigUint::from(self.nondegenerate(tree).len())
    }
}

/// `K(π, n)`: a cell over `T` labels the height-`n` vertices of `T` by
/// elements of `π`, and operators act through `γ_n` and `Hπ`.
#[derive(Clone, Debug)]
pub struct EilenbergMacLane {
    pi: FiniteAbelianGroup,
    n: usize,
}

impl EilenbergMacLane {
    pub fn new(pi: FiniteAbelianGroup, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(ThetaError::Argument("K(π, n) needs n >= 1".into()));
        }
        Ok(EilenbergMacLane { pi, n })
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.pi
    }

    fn labelings(&self, len: usize, nonzero: bool) -> Vec<Vec<GroupElement>> {
        let letters: Vec<GroupElement> = self.pi.elements().filter(|&g| !nonzero || g != self.pi.zero()).collect();
        (0..len).fold(vec![Vec::with_capacity(len)], |acc, _| {
            acc.into_iter()
                .flat_map(|prefix| {
                    letters.iter().map(move |&g| {
                        let mut p = prefix.clone();
                        p.push(g);
                        p
                    })
                })
                .collect()
        })
    }

    /// The generic degeneracy test, bypassing the labelling shortcut.
    pub fn is_degenerate_generic(&self, tree: &LevelTree, x: &[GroupElement]) -> bool {
        let x = x.to_vec();
        elementary_retractions(tree, self.n)
            .iter()
            .any(|(r, s)| self.act(r, &self.act(s, &x)) == x)
    }
}

impl ThetaSet for EilenbergMacLane {
    type Element = Vec<GroupElement>;

    fn level(&self) -> usize {
        self.n
    }

    fn elements(&self, tree: &LevelTree) -> Vec<Vec<GroupElement>> {
        self.labelings(tree.count_at_height(self.n), false)
    }

    fn act(&self, f: &ThetaOperator, x: &Vec<GroupElement>) -> Vec<GroupElement> {
        h_pi_act(&self.pi, &gamma_n(f), x).expect("labels match the target's height-n vertices")
    }

    /// Non-degenerate iff the tree is pruned (or the basepoint tree) and no
    /// label is neutral.
    fn is_degenerate(&self, tree: &LevelTree, x: &Vec<GroupElement>) -> bool {
        !((tree.is_point() || tree.is_pruned(self.n)) && x.iter().all(|&g| g != self.pi.zero()))
    }

    fn cell_trees(&self, d: usize) -> Vec<LevelTree> {
        if d == 0 {
            vec![LevelTree::point()]
        } else {
            enumerate_pruned(self.n, d)
        }
    }

    fn nondegenerate(&self, tree: &LevelTree) -> Vec<Vec<GroupElement>> {
        if !(tree.is_point() || tree.is_pruned(self.n)) {
            return Vec::new();
        }
        self.labelings(tree.count_at_height(self.n), true)
    }

    fn count_nondegenerate(&self, tree: &LevelTree) -> BigUint {
        if !(tree.is_point() || tree.is_pruned(self.n)) {
            return BigUint::default();
        }
        BigUint::from(self.pi.order() - 1).pow(tree.count_at_height(self.n) as u32)
    }
}

/// The representable `Θ_n[S]`: elements over `U` are operators `U -> S`.
#[derive(Clone, Debug)]
pub struct Representable {
    tree: LevelTree,
    n: usize,
}

impl Representable {
    pub fn new(tree: LevelTree, n: usize) -> Result<Self> {
        identity_theta(&tree, n)?;
        Ok(Representable { tree, n })
    }

    pub fn tree(&self) -> &LevelTree {
        &self.tree
    }
}

impl ThetaSet for Representable {
    type Element = ThetaOperator;

    fn level(&self) -> usize {
        self.n
    }

    fn elements(&self, tree: &LevelTree) -> Vec<ThetaOperator> {
        hom_theta(tree, &self.tree, self.n).expect("heights checked")
    }

    fn act(&self, f: &ThetaOperator, x: &ThetaOperator) -> ThetaOperator {
        compose_theta(x, f).expect("f lands in the source of x")
    }

    fn cell_trees(&self, d: usize) -> Vec<LevelTree> {
        if d > self.tree.edges() {
            return Vec::new();
        }
        enumerate_trees(self.n, d)
    }
}

/// The product `X × Y` of two presheaves on the same `Θ_n`.
#[derive(Clone, Debug)]
pub struct Product<A, B> {
    left: A,
    right: B,
}

impl<A: ThetaSet, B: ThetaSet> Product<A, B> {
    pub fn new(left: A, right: B) -> Result<Self> {
        if left.level() != right.level() {
            return Err(ThetaError::Argument(format!(
                "factors live on levels {} and {}",
                left.level(),
                right.level()
            )));
        }
        Ok(Product { left, right })
    }
}

impl<A: ThetaSet, B: ThetaSet> ThetaSet for Product<A, B> {
    type Element = (A::Element, B::Element);

    fn level(&self) -> usize {
        self.left.level()
    }

    fn elements(&self, tree: &LevelTree) -> Vec<Self::Element> {
        let ys = self.right.elements(tree);
        self.left
            .elements(tree)
            .into_iter()
            .flat_map(|x| ys.iter().map(move |y| (x.clone(), y.clone())))
            .collect()
    }

    fn act(&self, f: &ThetaOperator, x: &Self::Element) -> Self::Element {
        (self.left.act(f, &x.0), self.right.act(f, &x.1))
    }
}

/// The unique factorization `x = degeneracy^* y` with `y` non-degenerate,
/// found by peeling off elementary retractions one at a time.
pub fn reduce_element<X: ThetaSet>(
    x_set: &X,
    tree: &LevelTree,
    x: &X::Element,
) -> (LevelTree, ThetaOperator, X::Element) {
    let n = x_set.level();
    let mut current_tree = tree.clone();
    let mut current = x.clone();
    let mut degeneracy = identity_theta(tree, n).expect("object of the right level");
    'peel: loop {
        for (r, s) in elementary_retractions(&current_tree, n) {
            let y = x_set.act(&s, &current);
            if x_set.act(&r, &y) == current {
                degeneracy = compose_theta(&r, &degeneracy).expect("composable");
                current_tree = r.target().clone();
                current = y;
                continue 'peel;
            }
        }
        return (current_tree, degeneracy, current);
    }
}

/// Brute-force reduction over every retraction out of `tree`; returns all
/// (retraction, preimage) pairs with a non-degenerate preimage.
pub fn reduce_element_brute<X: ThetaSet>(
    x_set: &X,
    tree: &LevelTree,
    x: &X::Element,
) -> Vec<(ThetaOperator, X::Element)> {
    let n = x_set.level();
    Subtree::all(tree)
        .iter()
        .filter_map(|kept| {
            let r = retraction_onto(tree, kept, n);
            let y = x_set.act(&section_of(tree, kept, n), x);
            (&x_set.act(&r, &y) == x && !x_set.is_degenerate(r.target(), &y)).then_some((r, y))
        })
        .collect()
}

/// Numbers of non-degenerate cells in dimensions `0..=max_dim`.
pub fn cell_census<X: ThetaSet>(x_set: &X, max_dim: usize) -> Vec<BigUint> {
    (0..=max_dim)
        .map(|d| x_set.cell_trees(d).iter().map(|t| x_set.count_nondegenerate(t)).sum())
        .collect()
}

/// Census of `Θ_n[S] × Θ_n[T]` up to dimension `dim S + dim T`. A pair
/// `(a, b)` is non-degenerate iff the kept subtrees of `a` and `b` together
/// cover the source, i.e. no proper retraction factors both.
pub fn product_census(s: &LevelTree, t: &LevelTree, n: usize) -> Result<Vec<usize>> {
    identity_theta(s, n)?;
    identity_theta(t, n)?;
    let top = s.edges() + t.edges();
    Ok((0..=top)
        .map(|d| {
            enumerate_trees(n, d)
                .iter()
                .map(|u| {
                    let left: Vec<Subtree> = hom_theta(u, s, n).expect("checked").iter().map(kept_subtree).collect();
                    let right: Vec<Subtree> = hom_theta(u, t, n).expect("checked").iter().map(kept_subtree).collect();
                    left.iter()
                        .map(|a| right.iter().filter(|b| a.union(b).is_full()).count())
                        .sum::<usize>()
                })
                .sum()
        })
        .collect())
}

/// Whether `x` is an operator that is not monic, for representables.
pub fn representable_cell_is_degenerate(x: &ThetaOperator) -> bool {
    !is_mono(x)
}
