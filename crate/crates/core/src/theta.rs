//! The iterated wreath product `Θ_n = Δ≀Θ_{n-1}`.
//!
//! An operator `S -> T` at level `n` is a simplicial operator `φ` between the
//! root valences together with, for each source branch `S_i` and each `k` in
//! the block `φ(i-1) < k <= φ(i)`, a level-`(n-1)` operator `S_i -> T_k`.
//! Level 0 is the terminal category: the point with its identity. This makes
//! the recursion uniform, and level 1 is exactly `Δ`.

use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use crate::error::{Result, ThetaError};
use crate::gamma::{assemble, GammaOperator};
use crate::simplex::{compose_delta, hom_delta, segal_gamma, SimplicialOperator};
use crate::trees::{LevelTree, Subtree};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ThetaOperator {
    level: usize,
    source: LevelTree,
    target: LevelTree,
    phi: SimplicialOperator,
    components: Vec<Vec<ThetaOperator>>,
}

/// Coarse taxonomy of an operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ThetaClass {
    Identity,
    Degeneracy,
    InnerFace,
    OuterFace,
    /// Everything else: a face that is neither inner nor outer, or an
    /// operator with both a non-trivial degeneracy and face part.
    Mixed,
}

impl fmt::Display for ThetaClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ThetaClass::Identity => "identity",
            ThetaClass::Degeneracy => "degeneracy",
            ThetaClass::InnerFace => "inner-face",
            ThetaClass::OuterFace => "outer-face",
            ThetaClass::Mixed => "mixed",
        })
    }
}

fn check_height(tree: &LevelTree, level: usize) -> Result<()> {
    if tree.height() > level {
        return Err(ThetaError::Argument(format!(
            "tree {tree} of height {} is not an object of level {level}",
            tree.height()
        )));
    }
    Ok(())
}

impl ThetaOperator {
    /// Validates the block structure and the endpoints of every component.
    pub fn new(
        level: usize,
        source: LevelTree,
        target: LevelTree,
        phi: SimplicialOperator,
        components: Vec<Vec<ThetaOperator>>,
    ) -> Result<Self> {
        check_height(&source, level)?;
        check_height(&target, level)?;
        if phi.source() != source.valence() || phi.target() != target.valence() {
            return Err(ThetaError::Shape(format!(
                "{phi} does not map [{}] -> [{}]",
                source.valence(),
                target.valence()
            )));
        }
        if components.len() != source.valence() {
            return Err(ThetaError::Shape(format!(
                "expected {} component blocks, got {}",
                source.valence(),
                components.len()
            )));
        }
        for (i, block) in components.iter().enumerate() {
            let range = phi.block(i + 1);
            if block.len() != range.clone().count() {
                return Err(ThetaError::Shape(format!(
                    "block {} has {} components, phi requires {}",
                    i + 1,
                    block.len(),
                    range.count()
                )));
            }
            for (c, k) in block.iter().zip(range) {
                if c.level + 1 != level
                    || c.source != source.children()[i]
                    || c.target != target.children()[k - 1]
                {
                    return Err(ThetaError::Shape(format!(
                        "component {c} at ({}, {k}) has wrong level or endpoints",
                        i + 1
                    )));
                }
            }
        }
        Ok(ThetaOperator { level, source, target, phi, components })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn source(&self) -> &LevelTree {
        &self.source
    }

    pub fn target(&self) -> &LevelTree {
        &self.target
    }

    pub fn phi(&self) -> &SimplicialOperator {
        &self.phi
    }

    /// `components()[i]` lists the components of branch `i+1`, in block order.
    pub fn components(&self) -> &[Vec<ThetaOperator>] {
        &self.components
    }

    /// The component `S_i -> T_k` (1-based indices, `k` in the block of `i`).
    pub fn component(&self, i: usize, k: usize) -> &ThetaOperator {
        &self.components[i - 1][k - self.phi.apply(i - 1) - 1]
    }

    pub fn is_identity(&self) -> bool {
        self.phi.is_identity() && self.components.iter().all(|b| b[0].is_identity())
    }

    /// `self ∘ other`.
    pub fn after(&self, other: &ThetaOperator) -> Result<ThetaOperator> {
        compose_theta(self, other)
    }

    fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "level": self.level,
            "src": self.source.render(),
            "tgt": self.target.render(),
            "phi": self.phi.values(),
            "components": self
                .components
                .iter()
                .map(|b| b.iter().map(ThetaOperator::to_json_value).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }
}

impl fmt::Display for ThetaOperator {
    /// Compact form `(φ; ..)`, e.g. `(0,1,1,2)` at level 1 and
    /// `(0,1;[(0,0)])` one level up.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vals: Vec<String> = self.phi.values().iter().map(ToString::to_string).collect();
        write!(f, "({}", vals.join(","))?;
        if self.level > 1 {
            f.write_str(";")?;
            for (i, block) in self.components.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                f.write_str("[")?;
                for (j, c) in block.iter().enumerate() {
                    if j > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str("]")?;
            }
        }
        f.write_str(")")
    }
}

#[derive(Serialize, Deserialize)]
struct ThetaJson {
    level: usize,
    src: LevelTree,
    tgt: LevelTree,
    phi: Vec<usize>,
    components: Vec<Vec<ThetaJson>>,
}

impl TryFrom<ThetaJson> for ThetaOperator {
    type Error = ThetaError;

    fn try_from(j: ThetaJson) -> Result<Self> {
        let phi = SimplicialOperator::new(j.tgt.valence(), j.phi)?;
        let components = j
            .components
            .into_iter()
            .map(|b| b.into_iter().map(ThetaOperator::try_from).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        ThetaOperator::new(j.level, j.src, j.tgt, phi, components)
    }
}

impl Serialize for ThetaOperator {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json_value().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ThetaOperator {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let j = ThetaJson::deserialize(deserializer)?;
        ThetaOperator::try_from(j).map_err(serde::de::Error::custom)
    }
}

/// The identity on `tree` at level `n`.
pub fn identity_theta(tree: &LevelTree, n: usize) -> Result<ThetaOperator> {
    check_height(tree, n)?;
    Ok(identity_unchecked(tree, n))
}

fn identity_unchecked(tree: &LevelTree, n: usize) -> ThetaOperator {
    ThetaOperator {
        level: n,
        source: tree.clone(),
        target: tree.clone(),
        phi: SimplicialOperator::identity(tree.valence()),
        components: tree.children().iter().map(|c| vec![identity_unchecked(c, n - 1)]).collect(),
    }
}

/// The operator `S -> T` with `φ ≡ 0` and all blocks empty; at level 0 the
/// identity of the point.
pub fn constant_theta(source: &LevelTree, target: &LevelTree, n: usize) -> Result<ThetaOperator> {
    check_height(source, n)?;
    check_height(target, n)?;
    Ok(constant_unchecked(source, target, n))
}

fn constant_unchecked(source: &LevelTree, target: &LevelTree, n: usize) -> ThetaOperator {
    ThetaOperator {
        level: n,
        source: source.clone(),
        target: target.clone(),
        phi: SimplicialOperator::constant(source.valence(), target.valence(), 0),
        components: vec![Vec::new(); source.valence()],
    }
}

/// `g ∘ f`.
pub fn compose_theta(g: &ThetaOperator, f: &ThetaOperator) -> Result<ThetaOperator> {
    if g.level != f.level {
        return Err(ThetaError::Composition(format!("levels {} and {} differ", g.level, f.level)));
    }
    if f.target != g.source {
        return Err(ThetaError::Composition(format!(
            "target {} of {f} differs from source {} of {g}",
            f.target, g.source
        )));
    }
    Ok(compose_unchecked(g, f))
}

fn compose_unchecked(g: &ThetaOperator, f: &ThetaOperator) -> ThetaOperator {
    let phi = compose_delta(&g.phi, &f.phi).expect("matching valences");
    let components = (1..=f.phi.source())
        .map(|i| {
            let mut block = Vec::with_capacity(phi.block_len(i));
            for k in f.phi.block(i) {
                for l in g.phi.block(k) {
                    block.push(compose_unchecked(g.component(k, l), f.component(i, k)));
                }
            }
            block
        })
        .collect();
    ThetaOperator { level: f.level, source: f.source.clone(), target: g.target.clone(), phi, components }
}

type HomMemo = HashMap<(usize, LevelTree, LevelTree), Rc<Vec<ThetaOperator>>>;

/// The complete hom-set `Θ_n(S, T)`, ordered lexicographically by `φ`, then
/// by the components in block order.
pub fn hom_theta(source: &LevelTree, target: &LevelTree, n: usize) -> Result<Vec<ThetaOperator>> {
    check_height(source, n)?;
    check_height(target, n)?;
    let mut memo = HomMemo::new();
    Ok(hom_rec(source, target, n, false, &mut memo).as_ref().clone())
}

/// The operators `S -> T` with injective `φ`: a superset of the monos.
fn hom_rec(s: &LevelTree, t: &LevelTree, n: usize, injective: bool, memo: &mut HomMemo) -> Rc<Vec<ThetaOperator>> {
    if n == 0 {
        return Rc::new(vec![identity_unchecked(s, 0)]);
    }
    if !injective {
        if let Some(v) = memo.get(&(n, s.clone(), t.clone())) {
            return v.clone();
        }
    }
    let mut out = Vec::new();
    for phi in hom_delta(s.valence(), t.valence()) {
        if injective && !phi.is_injective() {
            continue;
        }
        // choices[i] = all component tuples for branch i
        let mut choices: Vec<Vec<Vec<ThetaOperator>>> = Vec::with_capacity(s.valence());
        for (i, si) in s.children().iter().enumerate() {
            let per_k: Vec<Rc<Vec<ThetaOperator>>> = phi
                .block(i + 1)
                .map(|k| hom_rec(si, &t.children()[k - 1], n - 1, false, memo))
                .collect();
            choices.push(cartesian(&per_k));
        }
        for components in cartesian_owned(&choices) {
            out.push(ThetaOperator { level: n, source: s.clone(), target: t.clone(), phi: phi.clone(), components });
        }
    }
    let out = Rc::new(out);
    if !injective {
        memo.insert((n, s.clone(), t.clone()), out.clone());
    }
    out
}

fn cartesian<T: Clone>(lists: &[Rc<Vec<T>>]) -> Vec<Vec<T>> {
    lists.iter().fold(vec![Vec::new()], |acc, list| {
        acc.into_iter()
            .flat_map(|prefix| {
                list.iter().map(move |x| {
                    let mut p = prefix.clone();
                    p.push(x.clone());
                    p
                })
            })
            .collect()
    })
}

fn cartesian_owned<T: Clone>(lists: &[Vec<T>]) -> Vec<Vec<T>> {
    lists.iter().fold(vec![Vec::new()], |acc, list| {
        acc.into_iter()
            .flat_map(|prefix| {
                list.iter().map(move |x| {
                    let mut p = prefix.clone();
                    p.push(x.clone());
                    p
                })
            })
            .collect()
    })
}

/// All monomorphisms `S ↣ T`, in the order of [`hom_theta`].
///
/// A mono has injective `φ` (no branch may be collapsed), so only those `φ`
/// are expanded before filtering by [`is_mono`].
pub fn monos_theta(source: &LevelTree, target: &LevelTree, n: usize) -> Result<Vec<ThetaOperator>> {
    check_height(source, n)?;
    check_height(target, n)?;
    let mut memo = HomMemo::new();
    Ok(hom_rec(source, target, n, true, &mut memo).iter().filter(|f| is_mono(f)).cloned().collect())
}

/// Monotone surjective `φ`, every block empty or a singleton whose
/// component is again a retraction.
pub fn is_retraction(f: &ThetaOperator) -> bool {
    f.phi.is_surjective() && f.components.iter().all(|b| b.len() <= 1 && b.iter().all(is_retraction))
}

/// The rooted subtree of the source that survives `f`: branch `i` is kept
/// iff its block is non-empty, with the union of what its components keep.
/// `f` is a mono iff this is everything.
pub fn kept_subtree(f: &ThetaOperator) -> Subtree {
    Subtree::from_children(
        f.components
            .iter()
            .map(|block| {
                let mut kept = block.iter().map(kept_subtree);
                let first = kept.next()?;
                Some(kept.fold(first, |acc, k| acc.union(&k)))
            })
            .collect(),
    )
}

pub fn is_mono(f: &ThetaOperator) -> bool {
    kept_subtree(f).is_full()
}

/// The retraction of `tree` onto the rooted subtree `kept`.
pub fn retraction_onto(tree: &LevelTree, kept: &Subtree, n: usize) -> ThetaOperator {
    let target = kept.apply(tree);
    let mut values = Vec::with_capacity(tree.valence() + 1);
    values.push(0);
    let mut components = Vec::with_capacity(tree.valence());
    let mut count = 0;
    for (c, k) in tree.children().iter().zip(kept.children()) {
        match k {
            Some(k) => {
                count += 1;
                components.push(vec![retraction_onto(c, k, n - 1)]);
            }
            None => components.push(Vec::new()),
        }
        values.push(count);
    }
    ThetaOperator {
        level: n,
        phi: SimplicialOperator::from_values_unchecked(target.valence(), values),
        source: tree.clone(),
        target,
        components,
    }
}

/// A section of [`retraction_onto`]: `retraction ∘ section = id`. The `j`-th
/// kept branch `i_j` is sent to the block `i_{j-1} < l <= i_j`, identically
/// (recursively) onto `l = i_j` and constantly onto the rest.
pub fn section_of(tree: &LevelTree, kept: &Subtree, n: usize) -> ThetaOperator {
    let source = kept.apply(tree);
    let kept_idx: Vec<usize> = kept
        .children()
        .iter()
        .enumerate()
        .filter_map(|(i, k)| k.as_ref().map(|_| i + 1))
        .collect();
    let mut values = vec![0];
    values.extend(kept_idx.iter().copied());
    let mut components = Vec::with_capacity(kept_idx.len());
    let mut prev = 0;
    for (j, &ij) in kept_idx.iter().enumerate() {
        let branch = &source.children()[j];
        let block = (prev + 1..=ij)
            .map(|l| {
                let tl = &tree.children()[l - 1];
                if l == ij {
                    section_of(tl, kept.children()[l - 1].as_ref().expect("kept"), n - 1)
                } else {
                    constant_unchecked(branch, tl, n - 1)
                }
            })
            .collect();
        components.push(block);
        prev = ij;
    }
    ThetaOperator {
        level: n,
        phi: SimplicialOperator::from_values_unchecked(tree.valence(), values),
        source,
        target: tree.clone(),
        components,
    }
}

/// The unique factorization `f = face ∘ degeneracy` into a retraction
/// followed by a mono.
pub fn reedy_factor(f: &ThetaOperator) -> (ThetaOperator, ThetaOperator) {
    let kept = kept_subtree(f);
    let degeneracy = retraction_onto(&f.source, &kept, f.level);
    let face = compose_unchecked(f, &section_of(&f.source, &kept, f.level));
    (degeneracy, face)
}

/// Endpoint-preserving at every level: `φ(0) = 0`, `φ(m) = k`, and every
/// component is again a cover.
pub fn is_cover(f: &ThetaOperator) -> bool {
    let v = f.phi.values();
    v[0] == 0 && v[v.len() - 1] == f.phi.target() && f.components.iter().flatten().all(is_cover)
}

/// `φ` steps by exactly one and every component is again outer.
pub fn is_outer(f: &ThetaOperator) -> bool {
    f.phi.values().windows(2).all(|w| w[1] == w[0] + 1) && f.components.iter().flatten().all(is_outer)
}

/// Inner face: a mono that is a cover.
pub fn is_inner_face(f: &ThetaOperator) -> bool {
    is_mono(f) && is_cover(f)
}

/// Splits `f = outer ∘ cover` with `outer` as in [`is_outer`] and `cover` as
/// in [`is_cover`]. For a face this is the inner-outer factorization.
pub fn factor_cover_outer(f: &ThetaOperator) -> (ThetaOperator, ThetaOperator) {
    let n = f.level;
    if n == 0 {
        return (f.clone(), f.clone());
    }
    let v = f.phi.values();
    let (a, b) = (v[0], v[v.len() - 1]);
    // each k in (a, b] lies in exactly one block
    let mut parts: Vec<(ThetaOperator, ThetaOperator)> = Vec::with_capacity(b - a);
    let mut cover_components = Vec::with_capacity(f.components.len());
    for block in &f.components {
        let mut row = Vec::with_capacity(block.len());
        for c in block {
            let (cov, out) = factor_cover_outer(c);
            row.push(cov.clone());
            parts.push((cov, out));
        }
        cover_components.push(row);
    }
    let middle = LevelTree::from_children(parts.iter().map(|(c, _)| c.target.clone()).collect());
    let cover = ThetaOperator {
        level: n,
        source: f.source.clone(),
        target: middle.clone(),
        phi: SimplicialOperator::from_values_unchecked(b - a, v.iter().map(|&x| x - a).collect()),
        components: cover_components,
    };
    let outer = ThetaOperator {
        level: n,
        source: middle,
        target: f.target.clone(),
        phi: SimplicialOperator::from_values_unchecked(f.phi.target(), (a..=b).collect()),
        components: parts.into_iter().map(|(_, o)| vec![o]).collect(),
    };
    (cover, outer)
}

pub fn classify_theta(f: &ThetaOperator) -> ThetaClass {
    if f.is_identity() {
        return ThetaClass::Identity;
    }
    let (degeneracy, face) = reedy_factor(f);
    if face.is_identity() {
        ThetaClass::Degeneracy
    } else if !degeneracy.is_identity() {
        ThetaClass::Mixed
    } else if is_cover(f) {
        ThetaClass::InnerFace
    } else if is_outer(f) {
        ThetaClass::OuterFace
    } else {
        ThetaClass::Mixed
    }
}

/// Dimension in the wreath product: `m + dim(T_1) + .. + dim(T_m)`.
pub fn dim_theta(tree: &LevelTree) -> usize {
    tree.valence() + tree.children().iter().map(dim_theta).sum::<usize>()
}

/// The assembly functor `γ_n : Θ_n -> Γ`, on the height-`n` vertices in
/// planar order.
pub fn gamma_n(f: &ThetaOperator) -> GammaOperator {
    let n = f.level;
    if n == 0 {
        return GammaOperator::identity(1);
    }
    let outer = segal_gamma(&f.phi);
    let blocks = |t: &LevelTree| -> Vec<usize> { t.children().iter().map(|c| c.count_at_height(n - 1)).collect() };
    let components = f.components.iter().map(|b| b.iter().map(gamma_n).collect()).collect();
    assemble(&outer, &blocks(&f.source), &blocks(&f.target), components).expect("disjoint by construction")
}

/// The suspension `σ_n : Θ_n -> Θ_{n+1}`, `ρ ↦ (id_[1]; ρ)`.
pub fn suspend(f: &ThetaOperator) -> ThetaOperator {
    ThetaOperator {
        level: f.level + 1,
        source: f.source.suspend(),
        target: f.target.suspend(),
        phi: SimplicialOperator::identity(1),
        components: vec![vec![f.clone()]],
    }
}

/// The full embedding `Θ_n -> Θ_{n+1}` on trees of height `<= n`.
pub fn embed(f: &ThetaOperator) -> ThetaOperator {
    ThetaOperator {
        level: f.level + 1,
        source: f.source.clone(),
        target: f.target.clone(),
        phi: f.phi.clone(),
        components: f.components.iter().map(|b| b.iter().map(embed).collect()).collect(),
    }
}

/// The diagonal `δ_n : Δ^{×n} -> Θ_n`, applying `fs[h]` at height `h`.
pub fn diagonal(fs: &[SimplicialOperator]) -> Result<ThetaOperator> {
    if fs.is_empty() {
        return Err(ThetaError::Argument("the diagonal needs at least one operator".into()));
    }
    Ok(diagonal_rec(fs))
}

fn diagonal_rec(fs: &[SimplicialOperator]) -> ThetaOperator {
    let Some((f, rest)) = fs.split_first() else {
        return identity_unchecked(&LevelTree::point(), 0);
    };
    let sources: Vec<usize> = fs.iter().map(SimplicialOperator::source).collect();
    let targets: Vec<usize> = fs.iter().map(SimplicialOperator::target).collect();
    let inner = diagonal_rec(rest);
    ThetaOperator {
        level: fs.len(),
        source: LevelTree::homogeneous(&sources),
        target: LevelTree::homogeneous(&targets),
        phi: f.clone(),
        components: (1..=f.source()).map(|i| vec![inner.clone(); f.block_len(i)]).collect(),
    }
}

/// The codimension-one retractions out of `tree`, one per leaf, each paired
/// with a section. In the same order as [`LevelTree::leaves`].
pub fn elementary_retractions(tree: &LevelTree, n: usize) -> Vec<(ThetaOperator, ThetaOperator)> {
    tree.leaves()
        .iter()
        .map(|leaf| {
            let kept = Subtree::without_leaf(tree, leaf);
            (retraction_onto(tree, &kept, n), section_of(tree, &kept, n))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::enumerate_trees;

    fn t(s: &str) -> LevelTree {
        s.parse().unwrap()
    }

    fn d(n: usize, v: &[usize]) -> SimplicialOperator {
        SimplicialOperator::new(n, v.to_vec()).unwrap()
    }

    fn trees_upto(n: usize, e: usize) -> Vec<LevelTree> {
        (0..=e).flat_map(|k| enumerate_trees(n, k)).collect()
    }

    /// All operators between trees of the sample, grouped by (source, target).
    fn sample(n: usize, e: usize) -> Vec<ThetaOperator> {
        let trees = trees_upto(n, e);
        let mut out = Vec::new();
        for s in &trees {
            for u in &trees {
                out.extend(hom_theta(s, u, n).unwrap());
            }
        }
        out
    }

    /// Composition computed straight from the wreath formula on explicit
    /// (i, l) pairs, without the block iterators used by the library.
    fn compose_oracle(g: &ThetaOperator, f: &ThetaOperator) -> ThetaOperator {
        if f.level == 0 {
            return f.clone();
        }
        let fv = f.phi.values();
        let gv = g.phi.values();
        let phi: Vec<usize> = fv.iter().map(|&x| gv[x]).collect();
        let mut components = Vec::new();
        for i in 1..fv.len() {
            let mut block = Vec::new();
            for l in phi[i - 1] + 1..=phi[i] {
                let k = (1..gv.len()).find(|&k| gv[k - 1] < l && l <= gv[k]).unwrap();
                assert!(fv[i - 1] < k && k <= fv[i]);
                let gc = &g.components[k - 1][l - gv[k - 1] - 1];
                let fc = &f.components[i - 1][k - fv[i - 1] - 1];
                block.push(compose_oracle(gc, fc));
            }
            components.push(block);
        }
        ThetaOperator::new(f.level, f.source.clone(), g.target.clone(), SimplicialOperator::new(g.phi.target(), phi).unwrap(), components)
            .unwrap()
    }

    #[test]
    fn identity_examples() {
        let id = identity_theta(&t("[]"), 1).unwrap();
        assert_eq!(id.phi(), &SimplicialOperator::identity(0));
        let id = identity_theta(&LevelTree::corolla(2), 1).unwrap();
        assert_eq!(id.phi(), &SimplicialOperator::identity(2));
        let id = identity_theta(&t("[[[]]]"), 2).unwrap();
        assert_eq!(id.phi(), &SimplicialOperator::identity(1));
        assert_eq!(id.components()[0][0], identity_theta(&t("[[]]"), 1).unwrap());
        assert!(identity_theta(&t("[[[]]]"), 1).is_err());
        let id2 = identity_theta(&t("[[],[]]"), 2).unwrap();
        assert_eq!(compose_theta(&id2, &id2).unwrap(), id2);
    }

    #[test]
    fn validation() {
        let s = t("[[]]");
        let u = t("[[],[]]");
        let bad_phi = ThetaOperator::new(2, s.clone(), u.clone(), d(1, &[0, 1]), vec![vec![]]);
        assert!(matches!(bad_phi, Err(ThetaError::Shape(_))));
        let bad_block = ThetaOperator::new(2, s.clone(), u.clone(), d(2, &[0, 2]), vec![vec![]]);
        assert!(matches!(bad_block, Err(ThetaError::Shape(_))));
        let ok = constant_theta(&t("[]"), &t("[]"), 1).unwrap();
        assert!(ThetaOperator::new(2, s.clone(), u.clone(), d(2, &[0, 1]), vec![vec![ok]]).is_ok());
        let wrong_level = constant_theta(&t("[]"), &t("[]"), 2).unwrap();
        assert!(ThetaOperator::new(2, s.clone(), u.clone(), d(2, &[0, 1]), vec![vec![wrong_level]]).is_err());
        let wrong_target = constant_theta(&t("[]"), &t("[[]]"), 1).unwrap();
        assert!(ThetaOperator::new(2, s, u, d(2, &[0, 1]), vec![vec![wrong_target]]).is_err());
    }

    #[test]
    fn level_one_is_delta() {
        for m in 0..4 {
            for k in 0..4 {
                let homs = hom_theta(&LevelTree::corolla(m), &LevelTree::corolla(k), 1).unwrap();
                let phis: Vec<SimplicialOperator> = homs.iter().map(|f| f.phi().clone()).collect();
                assert_eq!(phis, hom_delta(m, k));
            }
        }
        assert_eq!(hom_theta(&LevelTree::corolla(1), &LevelTree::corolla(1), 1).unwrap().len(), 3);
    }

    #[test]
    fn hom_into_point_is_unique() {
        for s in trees_upto(3, 4) {
            assert_eq!(hom_theta(&s, &LevelTree::point(), 3).unwrap().len(), 1);
        }
    }

    /// Counts `Θ_n(S, T)` from the wreath formula without building operators.
    fn hom_count(s: &LevelTree, u: &LevelTree, n: usize) -> usize {
        if n == 0 {
            return 1;
        }
        hom_delta(s.valence(), u.valence())
            .iter()
            .map(|phi| {
                (1..=s.valence())
                    .map(|i| {
                        phi.block(i)
                            .map(|k| hom_count(&s.children()[i - 1], &u.children()[k - 1], n - 1))
                            .product::<usize>()
                    })
                    .product::<usize>()
            })
            .sum()
    }

    #[test]
    fn hom_counts_match_cross_enumeration() {
        let two = LevelTree::linear(2);
        assert_eq!(hom_theta(&two, &two, 2).unwrap().len(), hom_count(&two, &two, 2));
        // Θ_2(2̄, 2̄): φ ∈ {(0,0),(0,1),(1,1)} giving 1 + 3 + 1
        assert_eq!(hom_count(&two, &two, 2), 5);
        for s in trees_upto(2, 3) {
            for u in trees_upto(2, 3) {
                let homs = hom_theta(&s, &u, 2).unwrap();
                assert_eq!(homs.len(), hom_count(&s, &u, 2));
                let mut dedup = homs.clone();
                dedup.sort_by_key(|f| f.to_string());
                dedup.dedup();
                assert_eq!(dedup.len(), homs.len());
            }
        }
    }

    #[test]
    fn composition_laws_exhaustive_level_two() {
        let ops = sample(2, 3);
        for f in &ops {
            let ids = identity_theta(f.source(), 2).unwrap();
            let idt = identity_theta(f.target(), 2).unwrap();
            assert_eq!(&compose_theta(f, &ids).unwrap(), f);
            assert_eq!(&compose_theta(&idt, f).unwrap(), f);
        }
        let mut by_source: HashMap<&LevelTree, Vec<&ThetaOperator>> = HashMap::new();
        for g in &ops {
            by_source.entry(g.source()).or_default().push(g);
        }
        for f in &ops {
            for g in &by_source[f.target()] {
                let gf = compose_theta(g, f).unwrap();
                assert_eq!(gf, compose_oracle(g, f));
                for h in &by_source[g.target()] {
                    assert_eq!(compose_theta(h, &gf).unwrap(), compose_theta(&compose_theta(h, g).unwrap(), f).unwrap());
                }
            }
        }
    }

    #[test]
    fn composition_errors() {
        let a = identity_theta(&t("[[]]"), 2).unwrap();
        let b = identity_theta(&t("[[],[]]"), 2).unwrap();
        assert!(matches!(compose_theta(&a, &b), Err(ThetaError::Composition(_))));
        let c = identity_theta(&t("[[]]"), 1).unwrap();
        assert!(matches!(compose_theta(&a, &c), Err(ThetaError::Composition(_))));
    }

    #[test]
    fn composing_with_the_point_source() {
        let point = LevelTree::point();
        for target in trees_upto(2, 3) {
            let homs = hom_theta(&point, &target, 2).unwrap();
            for f in &homs {
                for g in hom_theta(&target, &t("[[],[]]"), 2).unwrap() {
                    let gf = compose_theta(&g, f).unwrap();
                    assert_eq!(gf.source(), &point);
                    assert!(gf.components().is_empty());
                }
            }
        }
    }

    #[test]
    fn retraction_examples() {
        let id = identity_theta(&t("[[],[]]"), 2).unwrap();
        assert!(is_retraction(&id));
        // ((0,0,1): [2]->[1]; ∅, {id})
        let s = t("[[],[]]");
        let u = t("[[]]");
        let f = ThetaOperator::new(2, s, u, d(1, &[0, 0, 1]), vec![vec![], vec![identity_theta(&t("[]"), 1).unwrap()]]).unwrap();
        assert!(is_retraction(&f));
        let face = ThetaOperator::new(1, t("[[]]"), t("[[],[]]"), d(2, &[0, 1]), vec![vec![identity_theta(&t("[]"), 0).unwrap()]]).unwrap();
        assert!(!is_retraction(&face));
    }

    #[test]
    fn retractions_are_rooted_subtrees() {
        // 2^m retractions out of the m-corolla
        for m in 0..5 {
            let c = LevelTree::corolla(m);
            let count = trees_upto(1, m).iter().flat_map(|u| hom_theta(&c, u, 1).unwrap()).filter(is_retraction).count();
            assert_eq!(count, 1 << m);
        }
        for s in trees_upto(2, 4) {
            let from_homs = trees_upto(2, 4)
                .iter()
                .flat_map(|u| hom_theta(&s, u, 2).unwrap())
                .filter(is_retraction)
                .count();
            assert_eq!(from_homs, Subtree::all(&s).len());
            for kept in Subtree::all(&s) {
                let r = retraction_onto(&s, &kept, 2);
                assert!(is_retraction(&r));
                assert_eq!(kept_subtree(&r), kept);
                let sec = section_of(&s, &kept, 2);
                assert!(compose_theta(&r, &sec).unwrap().is_identity());
            }
        }
    }

    #[test]
    fn reedy_factor_examples() {
        let f = ThetaOperator::new(
            1,
            LevelTree::corolla(3),
            LevelTree::corolla(2),
            d(2, &[0, 1, 1, 2]),
            vec![vec![identity_theta(&t("[]"), 0).unwrap()], vec![], vec![identity_theta(&t("[]"), 0).unwrap()]],
        )
        .unwrap();
        let (deg, face) = reedy_factor(&f);
        assert_eq!(deg, f);
        assert!(face.is_identity());
        let g = hom_theta(&t("[[]]"), &t("[[],[]]"), 1).unwrap().into_iter().find(|g| g.phi().values() == [0, 2]).unwrap();
        let (deg, face) = reedy_factor(&g);
        assert!(deg.is_identity());
        assert_eq!(face, g);
    }

    #[test]
    fn reedy_factorization_exists_and_is_unique() {
        let trees = trees_upto(2, 3);
        let ops = sample(2, 3);
        // monic by left cancellation over the sample
        let cancels = |m: &ThetaOperator| {
            let mut seen: HashMap<(LevelTree, ThetaOperator), ThetaOperator> = HashMap::new();
            for a in ops.iter().filter(|a| a.target() == m.source()) {
                let ma = compose_theta(m, a).unwrap();
                if let Some(prev) = seen.insert((a.source().clone(), ma), a.clone()) {
                    if &prev != a {
                        return false;
                    }
                }
            }
            true
        };
        for f in &ops {
            let (deg, face) = reedy_factor(f);
            assert!(is_retraction(&deg));
            assert!(is_mono(&face));
            assert!(reedy_factor(&face).0.is_identity());
            assert_eq!(&compose_theta(&face, &deg).unwrap(), f);
            assert_eq!(is_mono(f), cancels(f), "{f}");
            let mut found = Vec::new();
            for u in &trees {
                for r in hom_theta(f.source(), u, 2).unwrap().iter().filter(|r| is_retraction(r)) {
                    for m in hom_theta(u, f.target(), 2).unwrap() {
                        if is_mono(&m) && &compose_theta(&m, r).unwrap() == f {
                            found.push((r.clone(), m));
                        }
                    }
                }
            }
            assert_eq!(found, vec![(deg, face)], "{f}");
        }
    }

    #[test]
    fn monos_match_filtered_homs() {
        for s in trees_upto(2, 4) {
            for u in trees_upto(2, 4) {
                let brute: Vec<ThetaOperator> = hom_theta(&s, &u, 2).unwrap().into_iter().filter(is_mono).collect();
                assert_eq!(monos_theta(&s, &u, 2).unwrap(), brute);
            }
        }
    }

    #[test]
    fn faces_and_retractions_are_closed_under_composition() {
        let ops = sample(2, 3);
        for f in &ops {
            for g in ops.iter().filter(|g| g.source() == f.target()) {
                let gf = compose_theta(g, f).unwrap();
                if is_mono(f) && is_mono(g) {
                    assert!(is_mono(&gf));
                }
                if is_retraction(f) && is_retraction(g) {
                    assert!(is_retraction(&gf));
                }
                if is_cover(f) && is_cover(g) {
                    assert!(is_cover(&gf));
                }
                if is_outer(f) && is_outer(g) {
                    assert!(is_outer(&gf));
                }
            }
        }
    }

    #[test]
    fn classify_examples() {
        let id = identity_theta(&t("[[],[]]"), 1).unwrap();
        assert_eq!(classify_theta(&id), ThetaClass::Identity);
        let point = identity_theta(&t("[]"), 0).unwrap();
        let outer = ThetaOperator::new(1, t("[[]]"), t("[[],[]]"), d(2, &[1, 2]), vec![vec![point.clone()]]).unwrap();
        assert_eq!(classify_theta(&outer), ThetaClass::OuterFace);
        let inner =
            ThetaOperator::new(1, t("[[]]"), t("[[],[]]"), d(2, &[0, 2]), vec![vec![point.clone(), point.clone()]]).unwrap();
        assert_eq!(classify_theta(&inner), ThetaClass::InnerFace);
        // (0,2) with endpoint-preserving components one level up
        let c = |s: &str| t(s);
        let comps = vec![
            hom_theta(&c("[]"), &c("[]"), 1).unwrap()[0].clone(),
            hom_theta(&c("[]"), &c("[[]]"), 1).unwrap().into_iter().find(|f| !is_cover(f)).unwrap(),
        ];
        let mixed = ThetaOperator::new(2, c("[[]]"), c("[[],[[]]]"), d(2, &[0, 2]), vec![comps]).unwrap();
        assert!(is_mono(&mixed));
        assert_eq!(classify_theta(&mixed), ThetaClass::Mixed);
        let deg = ThetaOperator::new(1, t("[[]]"), t("[]"), d(0, &[0, 0]), vec![vec![]]).unwrap();
        assert_eq!(classify_theta(&deg), ThetaClass::Degeneracy);
    }

    /// Inner faces may have components that are not themselves monos, e.g.
    /// `((0,2); (0,1,1), (0,0,1))`.
    #[test]
    fn inner_face_with_degenerate_components() {
        let s = t("[[[],[]]]");
        let u = t("[[[]],[[]]]");
        let inner: Vec<ThetaOperator> =
            hom_theta(&s, &u, 2).unwrap().into_iter().filter(|f| is_mono(f) && is_cover(f)).collect();
        assert!(!inner.is_empty());
        assert!(inner.iter().any(|f| f.components().iter().flatten().any(|c| !is_mono(c))));
    }

    #[test]
    fn faces_factor_uniquely_as_outer_after_inner() {
        let trees = trees_upto(2, 3);
        for f in sample(2, 3).iter().filter(|f| is_mono(f)) {
            let (cover, outer) = factor_cover_outer(f);
            assert!(is_inner_face(&cover) && is_mono(&outer) && is_outer(&outer));
            assert_eq!(&compose_theta(&outer, &cover).unwrap(), f);
            let mut count = 0;
            for u in &trees {
                for i in hom_theta(f.source(), u, 2).unwrap().iter().filter(|i| is_inner_face(i)) {
                    for o in hom_theta(u, f.target(), 2).unwrap().iter().filter(|o| is_mono(o) && is_outer(o)) {
                        if &compose_theta(o, i).unwrap() == f {
                            count += 1;
                        }
                    }
                }
            }
            assert_eq!(count, 1, "{f}");
        }
    }

    #[test]
    fn dimension_law() {
        assert_eq!(dim_theta(&LevelTree::linear(3)), 3);
        assert_eq!(dim_theta(&t("[]")), 0);
        assert_eq!(dim_theta(&t("[[],[],[]]")), 3);
        for n in 1..=4 {
            for e in 0..=8 {
                for tree in enumerate_trees(n, e) {
                    assert_eq!(dim_theta(&tree), e);
                }
            }
        }
    }

    #[test]
    fn dimension_is_the_length_of_a_maximal_retraction_chain() {
        fn depth(tree: &LevelTree, n: usize) -> usize {
            elementary_retractions(tree, n)
                .iter()
                .map(|(r, _)| 1 + depth(r.target(), n))
                .max()
                .unwrap_or(0)
        }
        for tree in trees_upto(3, 5) {
            assert_eq!(depth(&tree, 3), tree.edges());
        }
    }

    #[test]
    fn gamma_examples() {
        let id = identity_theta(&t("[[[],[]],[[]]]"), 2).unwrap();
        assert_eq!(gamma_n(&id), GammaOperator::identity(3));
        let f = hom_theta(&t("[[],[]]"), &t("[[]]"), 2).unwrap();
        for g in &f {
            assert_eq!(gamma_n(g), GammaOperator::null(0, 0));
        }
        let deg = ThetaOperator::new(
            1,
            LevelTree::corolla(3),
            LevelTree::corolla(2),
            d(2, &[0, 1, 1, 2]),
            vec![vec![identity_theta(&t("[]"), 0).unwrap()], vec![], vec![identity_theta(&t("[]"), 0).unwrap()]],
        )
        .unwrap();
        assert_eq!(gamma_n(&deg), GammaOperator::new(3, 2, vec![vec![1], vec![], vec![2]]).unwrap());
    }

    #[test]
    fn gamma_is_functorial_and_commutes_with_suspension() {
        for n in 1..=2 {
            let ops = sample(n, 3);
            for f in &ops {
                let gf = gamma_n(f);
                assert_eq!(gf.source(), f.source().count_at_height(n));
                assert_eq!(gf.target(), f.target().count_at_height(n));
                assert_eq!(gamma_n(&suspend(f)), gf);
                for g in ops.iter().filter(|g| g.source() == f.target()) {
                    let lhs = gamma_n(&compose_theta(g, f).unwrap());
                    assert_eq!(lhs, crate::gamma::compose_gamma(&gamma_n(g), &gf).unwrap());
                }
            }
        }
    }

    #[test]
    fn suspension_examples() {
        let id0 = identity_theta(&t("[]"), 1).unwrap();
        assert_eq!(suspend(&id0), identity_theta(&t("[[]]"), 2).unwrap());
        let deg = hom_theta(&LevelTree::corolla(3), &LevelTree::corolla(2), 1)
            .unwrap()
            .into_iter()
            .find(|f| f.phi().values() == [0, 1, 1, 2])
            .unwrap();
        let s = suspend(&deg);
        assert_eq!((s.source().render(), s.target().render()), ("[[[],[],[]]]".into(), "[[[],[]]]".into()));
        assert_eq!(s.phi(), &SimplicialOperator::identity(1));
        let one = identity_theta(&LevelTree::corolla(1), 1).unwrap();
        assert_eq!(suspend(&suspend(&one)), identity_theta(&LevelTree::linear(3), 3).unwrap());
        let id_point0 = identity_theta(&t("[]"), 0).unwrap();
        assert_eq!(suspend(&id_point0), identity_theta(&LevelTree::linear(1), 1).unwrap());
    }

    #[test]
    fn suspension_is_a_functor() {
        let ops = sample(2, 2);
        for f in &ops {
            for g in ops.iter().filter(|g| g.source() == f.target()) {
                assert_eq!(suspend(&compose_theta(g, f).unwrap()), compose_theta(&suspend(g), &suspend(f)).unwrap());
            }
        }
    }

    #[test]
    fn embedding_is_fully_faithful_and_preserves_classes() {
        for n in 1..=2 {
            let trees = trees_upto(n, 4);
            for s in &trees {
                for u in &trees {
                    let lower = hom_theta(s, u, n).unwrap();
                    let upper = hom_theta(s, u, n + 1).unwrap();
                    let embedded: Vec<ThetaOperator> = lower.iter().map(embed).collect();
                    assert_eq!(embedded, upper);
                    for f in &lower {
                        assert_eq!(classify_theta(f), classify_theta(&embed(f)));
                    }
                }
            }
        }
        assert!(embed(&identity_theta(&t("[]"), 0).unwrap()).is_identity());
    }

    #[test]
    fn diagonal_examples_and_functoriality() {
        let f = d(2, &[0, 2]);
        assert_eq!(diagonal(&[f.clone()]).unwrap().phi(), &f);
        assert!(diagonal(&[]).is_err());
        let ids = diagonal(&[SimplicialOperator::identity(2), SimplicialOperator::identity(1)]).unwrap();
        assert!(ids.is_identity());
        assert_eq!(ids.source(), &t("[[[]],[[]]]"));
        let a = d(1, &[0, 0]);
        let b = d(1, &[1, 1]);
        let ab = diagonal(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(ab.source(), &t("[[[]]]"));
        assert_eq!(ab.phi(), &a);
        assert!(ab.components()[0].is_empty());
        let ca = diagonal(&[SimplicialOperator::identity(1), a.clone()]).unwrap();
        assert_eq!(ca.components()[0], vec![diagonal(&[a.clone()]).unwrap()]);
        assert!(diagonal(&[b.clone(), a.clone()]).unwrap().components()[0].is_empty());
        for m in 0..=2 {
            for k in 0..=2 {
                for l in 0..=2 {
                    for f1 in hom_delta(m, k) {
                        for g1 in hom_delta(k, l) {
                            for f2 in hom_delta(k, m) {
                                for g2 in hom_delta(m, l) {
                                    let lhs = diagonal(&[compose_delta(&g1, &f1).unwrap(), compose_delta(&g2, &f2).unwrap()]).unwrap();
                                    let rhs = compose_theta(&diagonal(&[g1.clone(), g2.clone()]).unwrap(), &diagonal(&[f1.clone(), f2.clone()]).unwrap())
                                        .unwrap();
                                    assert_eq!(lhs, rhs);
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn json_round_trip() {
        for f in sample(2, 2) {
            let s = serde_json::to_string(&f).unwrap();
            assert_eq!(serde_json::from_str::<ThetaOperator>(&s).unwrap(), f);
        }
        let id = identity_theta(&t("[[]]"), 1).unwrap();
        let v: serde_json::Value = serde_json::to_value(&id).unwrap();
        assert_eq!(v["level"], 1);
        assert_eq!(v["src"], "[[]]");
        assert_eq!(v["phi"], serde_json::json!([0, 1]));
        let bad = r#"{"level":1,"src":"[[]]","tgt":"[]","phi":[0,1],"components":[[]]}"#;
        assert!(serde_json::from_str::<ThetaOperator>(bad).is_err());
    }
}
