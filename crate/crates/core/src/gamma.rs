//! Segal's category Γ, the wreath assembly `Γ≀Γ -> Γ`, finite abelian groups
//! and the Γ-set `Hπ : k ↦ π^k`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, ThetaError};

/// An operator `m̄ -> n̄` of Γ: an ordered `m`-tuple of pairwise disjoint
/// subsets of `{1..n}`, each stored sorted ascending.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GammaJson", into = "GammaJson")]
pub struct GammaOperator {
    target: usize,
    subsets: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct GammaJson {
    src: usize,
    tgt: usize,
    subsets: Vec<Vec<usize>>,
}

impl TryFrom<GammaJson> for GammaOperator {
    type Error = ThetaError;

    fn try_from(j: GammaJson) -> Result<Self> {
        GammaOperator::new(j.src, j.tgt, j.subsets)
    }
}

impl From<GammaOperator> for GammaJson {
    fn from(g: GammaOperator) -> Self {
        GammaJson { src: g.source(), tgt: g.target, subsets: g.subsets }
    }
}

impl GammaOperator {
    pub fn new(source: usize, target: usize, mut subsets: Vec<Vec<usize>>) -> Result<Self> {
        if subsets.len() != source {
            return Err(ThetaError::Shape(format!(
                "operator from {source} needs {source} subsets, got {}",
                subsets.len()
            )));
        }
        let mut seen = vec![false; target + 1];
        for s in subsets.iter_mut() {
            s.sort_unstable();
            for &x in s.iter() {
                if x == 0 || x > target {
                    return Err(ThetaError::Argument(format!("element {x} not in 1..={target}")));
                }
                if std::mem::replace(&mut seen[x], true) {
                    return Err(ThetaError::Invariant(format!("element {x} occurs in two subsets")));
                }
            }
        }
        Ok(GammaOperator { target, subsets })
    }

    pub(crate) fn from_sorted_unchecked(source: usize, target: usize, subsets: Vec<Vec<usize>>) -> Self {
        debug_assert!(GammaOperator::new(source, target, subsets.clone()).is_ok());
        GammaOperator { target, subsets }
    }

    pub fn identity(m: usize) -> Self {
        GammaOperator { target: m, subsets: (1..=m).map(|i| vec![i]).collect() }
    }

    /// The operator `m̄ -> n̄` with all subsets empty (through the null object).
    pub fn null(m: usize, n: usize) -> Self {
        GammaOperator { target: n, subsets: vec![Vec::new(); m] }
    }

    pub fn source(&self) -> usize {
        self.subsets.len()
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn subsets(&self) -> &[Vec<usize>] {
        &self.subsets
    }

    pub fn subset(&self, i: usize) -> &[usize] {
        &self.subsets[i - 1]
    }

    pub fn is_identity(&self) -> bool {
        self.target == self.source() && self.subsets.iter().enumerate().all(|(i, s)| s == &[i + 1])
    }

    /// `self ∘ other`.
    pub fn after(&self, other: &GammaOperator) -> Result<GammaOperator> {
        compose_gamma(self, other)
    }

    /// All operators `m̄ -> n̄`: each element of `n̄` goes to at most one of
    /// the `m` subsets.
    pub fn all(m: usize, n: usize) -> Vec<GammaOperator> {
        let choices = m + 1;
        let total = choices.pow(n as u32);
        (0..total)
            .map(|mut code| {
                let mut subsets = vec![Vec::new(); m];
                for x in 1..=n {
                    let c = code % choices;
                    code /= choices;
                    if c > 0 {
                        subsets[c - 1].push(x);
                    }
                }
                GammaOperator { target: n, subsets }
            })
            .collect()
    }
}

impl fmt::Display for GammaOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .subsets
            .iter()
            .map(|s| format!("{{{}}}", s.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")))
            .collect();
        write!(f, "({}):{}->{}", parts.join(","), self.source(), self.target)
    }
}

/// `g ∘ f` for `f: k̄ -> m̄`, `g: m̄ -> n̄`: the `i`-th subset is the union of
/// the subsets of `g` indexed by the `i`-th subset of `f`.
pub fn compose_gamma(g: &GammaOperator, f: &GammaOperator) -> Result<GammaOperator> {
    if f.target != g.source() {
        return Err(ThetaError::Composition(format!(
            "target {} of {f} differs from source {} of {g}",
            f.target,
            g.source()
        )));
    }
    let subsets = f
        .subsets
        .iter()
        .map(|fi| {
            let mut s: Vec<usize> = fi.iter().flat_map(|&j| g.subsets[j - 1].iter().copied()).collect();
            s.sort_unstable();
            s
        })
        .collect();
    Ok(GammaOperator { target: g.target, subsets })
}

/// An operator of the wreath product `Γ≀Γ` between tuples of finite sets
/// `(n̄_1, .., n̄_k) -> (m̄_1, .., m̄_l)`: an outer Γ-operator `k̄ -> l̄` and,
/// for each `i` and each `j` in the `i`-th outer subset, a component
/// `n̄_i -> m̄_j` (listed in the order of the subset).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WreathGammaOperator {
    source_blocks: Vec<usize>,
    target_blocks: Vec<usize>,
    outer: GammaOperator,
    components: Vec<Vec<GammaOperator>>,
}

impl WreathGammaOperator {
    pub fn new(
        source_blocks: Vec<usize>,
        target_blocks: Vec<usize>,
        outer: GammaOperator,
        components: Vec<Vec<GammaOperator>>,
    ) -> Result<Self> {
        if outer.source() != source_blocks.len() || outer.target() != target_blocks.len() {
            return Err(ThetaError::Shape(format!(
                "outer operator {outer} does not match {} source and {} target blocks",
                source_blocks.len(),
                target_blocks.len()
            )));
        }
        if components.len() != source_blocks.len() {
            return Err(ThetaError::Shape(format!(
                "expected {} component rows, got {}",
                source_blocks.len(),
                components.len()
            )));
        }
        for (i, row) in components.iter().enumerate() {
            let outer_i = &outer.subsets[i];
            if row.len() != outer_i.len() {
                return Err(ThetaError::Shape(format!(
                    "row {} has {} components, outer subset has {} elements",
                    i + 1,
                    row.len(),
                    outer_i.len()
                )));
            }
            for (c, &j) in row.iter().zip(outer_i) {
                if c.source() != source_blocks[i] || c.target() != target_blocks[j - 1] {
                    return Err(ThetaError::Shape(format!(
                        "component {c} should map {} -> {}",
                        source_blocks[i],
                        target_blocks[j - 1]
                    )));
                }
            }
        }
        Ok(WreathGammaOperator { source_blocks, target_blocks, outer, components })
    }

    pub fn outer(&self) -> &GammaOperator {
        &self.outer
    }

    pub fn source_blocks(&self) -> &[usize] {
        &self.source_blocks
    }

    pub fn target_blocks(&self) -> &[usize] {
        &self.target_blocks
    }

    pub fn components(&self) -> &[Vec<GammaOperator>] {
        &self.components
    }

    pub fn identity(blocks: Vec<usize>) -> Self {
        let components = blocks.iter().map(|&b| vec![GammaOperator::identity(b)]).collect();
        WreathGammaOperator {
            outer: GammaOperator::identity(blocks.len()),
            source_blocks: blocks.clone(),
            target_blocks: blocks,
            components,
        }
    }

    /// `self ∘ other`.
    pub fn after(&self, other: &WreathGammaOperator) -> Result<WreathGammaOperator> {
        if other.target_blocks != self.source_blocks {
            return Err(ThetaError::Composition(format!(
                "blocks {:?} and {:?} do not match",
                other.target_blocks, self.source_blocks
            )));
        }
        let outer = compose_gamma(&self.outer, &other.outer)?;
        let mut components = Vec::with_capacity(other.source_blocks.len());
        for (i, row) in other.components.iter().enumerate() {
            // (l, component) pairs, one for every l in the composite subset
            let mut pairs: Vec<(usize, GammaOperator)> = Vec::new();
            for (f_ij, &j) in row.iter().zip(&other.outer.subsets[i]) {
                for (g_jl, &l) in self.components[j - 1].iter().zip(&self.outer.subsets[j - 1]) {
                    pairs.push((l, compose_gamma(g_jl, f_ij)?));
                }
            }
            pairs.sort_by_key(|(l, _)| *l);
            debug_assert!(pairs.iter().map(|p| p.0).eq(outer.subsets[i].iter().copied()));
            components.push(pairs.into_iter().map(|(_, c)| c).collect());
        }
        Ok(WreathGammaOperator {
            source_blocks: other.source_blocks.clone(),
            target_blocks: self.target_blocks.clone(),
            outer,
            components,
        })
    }

    /// The assembly functor `α : Γ≀Γ -> Γ`: element `v` of source block `i`
    /// goes to the union over `j` in the `i`-th outer subset of the `j`-th
    /// target block's copy of its component image.
    pub fn assemble(&self) -> Result<GammaOperator> {
        let offsets = |blocks: &[usize]| -> Vec<usize> {
            blocks
                .iter()
                .scan(0, |acc, &b| {
                    let o = *acc;
                    *acc += b;
                    Some(o)
                })
                .collect()
        };
        let target_offsets = offsets(&self.target_blocks);
        let total_source: usize = self.source_blocks.iter().sum();
        let total_target: usize = self.target_blocks.iter().sum();
        let mut subsets = Vec::with_capacity(total_source);
        for (i, &size) in self.source_blocks.iter().enumerate() {
            for v in 1..=size {
                let mut s = Vec::new();
                for (c, &j) in self.components[i].iter().zip(&self.outer.subsets[i]) {
                    s.extend(c.subset(v).iter().map(|&w| target_offsets[j - 1] + w));
                }
                subsets.push(s);
            }
        }
        GammaOperator::new(total_source, total_target, subsets)
    }
}

/// Functional form of [`WreathGammaOperator::assemble`].
pub fn assemble(
    outer: &GammaOperator,
    source_blocks: &[usize],
    target_blocks: &[usize],
    components: Vec<Vec<GammaOperator>>,
) -> Result<GammaOperator> {
    WreathGammaOperator::new(source_blocks.to_vec(), target_blocks.to_vec(), outer.clone(), components)?
        .assemble()
}

/// A product of cyclic groups `Z/m_1 × .. × Z/m_r`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteAbelianGroup {
    cyclic_orders: Vec<u32>,
}

/// An element of a [`FiniteAbelianGroup`], encoded in mixed radix (first
/// cyclic factor least significant). Zero is the neutral element.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement(pub u32);

impl FiniteAbelianGroup {
    pub fn new(cyclic_orders: Vec<u32>) -> Result<Self> {
        if cyclic_orders.iter().any(|&m| m == 0) {
            return Err(ThetaError::Argument("cyclic orders must be at least 1".into()));
        }
        let order = cyclic_orders.iter().try_fold(1u32, |acc, &m| acc.checked_mul(m));
        if order.is_none() {
            return Err(ThetaError::Argument("group order overflows".into()));
        }
        Ok(FiniteAbelianGroup { cyclic_orders })
    }

    pub fn cyclic(m: u32) -> Self {
        FiniteAbelianGroup::new(vec![m]).expect("valid cyclic order")
    }

    pub fn cyclic_orders(&self) -> &[u32] {
        &self.cyclic_orders
    }

    pub fn order(&self) -> u32 {
        self.cyclic_orders.iter().product()
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement(0)
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElement> {
        (0..self.order()).map(GroupElement)
    }

    pub fn components(&self, x: GroupElement) -> Vec<u32> {
        let mut code = x.0;
        self.cyclic_orders
            .iter()
            .map(|&m| {
                let c = code % m;
                code /= m;
                c
            })
            .collect()
    }

    pub fn from_components(&self, parts: &[u32]) -> Result<GroupElement> {
        if parts.len() != self.cyclic_orders.len() {
            return Err(ThetaError::Shape(format!(
                "expected {} components, got {}",
                self.cyclic_orders.len(),
                parts.len()
            )));
        }
        let mut code = 0;
        for (&a, &m) in parts.iter().zip(&self.cyclic_orders).rev() {
            if a >= m {
                return Err(ThetaError::Argument(format!("component {a} not below {m}")));
            }
            code = code * m + a;
        }
        Ok(GroupElement(code))
    }

    pub fn add(&self, x: GroupElement, y: GroupElement) -> GroupElement {
        let (mut a, mut b) = (x.0, y.0);
        let (mut code, mut scale) = (0, 1);
        for &m in &self.cyclic_orders {
            code += ((a % m + b % m) % m) * scale;
            scale *= m;
            a /= m;
            b /= m;
        }
        GroupElement(code)
    }

    pub fn neg(&self, x: GroupElement) -> GroupElement {
        let mut a = x.0;
        let (mut code, mut scale) = (0, 1);
        for &m in &self.cyclic_orders {
            code += ((m - a % m) % m) * scale;
            scale *= m;
            a /= m;
        }
        GroupElement(code)
    }

    /// Dimension over F₂ of `π / 2π`: the number of even cyclic factors.
    pub fn mod_two_rank(&self) -> usize {
        self.cyclic_orders.iter().filter(|&&m| m % 2 == 0).count()
    }
}

impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.cyclic_orders.iter().map(|m| format!("z{m}")).collect();
        f.write_str(&parts.join("x"))
    }
}

impl FromStr for FiniteAbelianGroup {
    type Err = ThetaError;

    /// Parses specs like `z2`, `z3`, `z2xz4`.
    fn from_str(s: &str) -> Result<Self> {
        let mut orders = Vec::new();
        let mut position = 0;
        for part in s.split('x') {
            let digits = part.strip_prefix('z').ok_or_else(|| ThetaError::Parse {
                position,
                message: format!("expected 'z<order>', found {part:?}"),
            })?;
            let m: u32 = digits.parse().map_err(|_| ThetaError::Parse {
                position: position + 1,
                message: format!("invalid cyclic order {digits:?}"),
            })?;
            orders.push(m);
            position += part.len() + 1;
        }
        FiniteAbelianGroup::new(orders)
    }
}

/// The action of a Γ-operator `u: m̄ -> n̄` on `Hπ`: sends `x ∈ π^n` to the
/// tuple in `π^m` whose `i`-th entry is the sum of `x_j` over `j ∈ u_i`.
pub fn h_pi_act(pi: &FiniteAbelianGroup, u: &GammaOperator, x: &[GroupElement]) -> Result<Vec<GroupElement>> {
    if x.len() != u.target() {
        return Err(ThetaError::Shape(format!(
            "operator {u} acts on tuples of length {}, got {}",
            u.target(),
            x.len()
        )));
    }
    Ok(u.subsets
        .iter()
        .map(|s| s.iter().fold(pi.zero(), |acc, &j| pi.add(acc, x[j - 1])))
        .collect())
}
