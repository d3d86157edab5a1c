//! The simplex category: monotone maps between finite ordinals `[m]`.

use std::fmt;
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::error::{Result, ThetaError};
use crate::gamma::GammaOperator;

/// A monotone map `[m] -> [n]`, stored as its list of values.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "SimplicialJson", into = "SimplicialJson")]
pub struct SimplicialOperator {
    target: usize,
    values: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct SimplicialJson {
    src: usize,
    tgt: usize,
    values: Vec<usize>,
}

impl TryFrom<SimplicialJson> for SimplicialOperator {
    type Error = ThetaError;

    fn try_from(j: SimplicialJson) -> Result<Self> {
        if j.values.len() != j.src + 1 {
            return Err(ThetaError::Shape(format!(
                "operator from [{}] needs {} values, got {}",
                j.src,
                j.src + 1,
                j.values.len()
            )));
        }
        SimplicialOperator::new(j.tgt, j.values)
    }
}

impl From<SimplicialOperator> for SimplicialJson {
    fn from(op: SimplicialOperator) -> Self {
        SimplicialJson { src: op.source(), tgt: op.target, values: op.values }
    }
}

/// Face/degeneracy kind of a simplicial operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DeltaKind {
    Iso,
    Face,
    Degeneracy,
    Mixed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DeltaClass {
    pub kind: DeltaKind,
    /// Preserves the minimal and maximal element.
    pub inner: bool,
    /// Consecutive values step by exactly one.
    pub outer: bool,
}

impl SimplicialOperator {
    /// Validates monotonicity and range; the source is `values.len() - 1`.
    pub fn new(target: usize, values: Vec<usize>) -> Result<Self> {
        if values.is_empty() {
            return Err(ThetaError::Shape("an operator needs at least one value".into()));
        }
        if values.windows(2).any(|w| w[0] > w[1]) {
            return Err(ThetaError::Argument(format!("values {values:?} are not monotone")));
        }
        if values.iter().any(|&v| v > target) {
            return Err(ThetaError::Argument(format!("values {values:?} exceed [{target}]")));
        }
        Ok(SimplicialOperator { target, values })
    }

    pub(crate) fn from_values_unchecked(target: usize, values: Vec<usize>) -> Self {
        debug_assert!(SimplicialOperator::new(target, values.clone()).is_ok());
        SimplicialOperator { target, values }
    }

    pub fn identity(m: usize) -> Self {
        SimplicialOperator { target: m, values: (0..=m).collect() }
    }

    /// The constant map `[m] -> [n]` with value `j`.
    pub fn constant(m: usize, n: usize, j: usize) -> Self {
        assert!(j <= n);
        SimplicialOperator { target: n, values: vec![j; m + 1] }
    }

    pub fn source(&self) -> usize {
        self.values.len() - 1
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn apply(&self, i: usize) -> usize {
        self.values[i]
    }

    /// The half-open block `{k | f(i-1) < k <= f(i)}` for `1 <= i <= m`.
    pub fn block(&self, i: usize) -> RangeInclusive<usize> {
        self.values[i - 1] + 1..=self.values[i]
    }

    pub fn block_len(&self, i: usize) -> usize {
        self.values[i] - self.values[i - 1]
    }

    pub fn is_identity(&self) -> bool {
        self.target == self.source() && self.values.iter().enumerate().all(|(i, &v)| i == v)
    }

    pub fn is_injective(&self) -> bool {
        self.values.windows(2).all(|w| w[0] < w[1])
    }

    pub fn is_surjective(&self) -> bool {
        self.values[0] == 0
            && *self.values.last().expect("nonempty") == self.target
            && self.values.windows(2).all(|w| w[1] - w[0] <= 1)
    }

    /// `self ∘ other`.
    pub fn after(&self, other: &SimplicialOperator) -> Result<SimplicialOperator> {
        compose_delta(self, other)
    }

    pub fn classify(&self) -> DeltaClass {
        classify_delta(self)
    }
}

impl fmt::Display for SimplicialOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vals: Vec<String> = self.values.iter().map(ToString::to_string).collect();
        write!(f, "({}):[{}]->[{}]", vals.join(","), self.source(), self.target)
    }
}

/// `g ∘ f`, defined when `target(f) = source(g)`.
pub fn compose_delta(g: &SimplicialOperator, f: &SimplicialOperator) -> Result<SimplicialOperator> {
    if f.target != g.source() {
        return Err(ThetaError::Composition(format!(
            "target [{}] of {f} differs from source [{}] of {g}",
            f.target,
            g.source()
        )));
    }
    Ok(SimplicialOperator { target: g.target, values: f.values.iter().map(|&v| g.values[v]).collect() })
}

/// The unique factorization `f = mono ∘ epi` with `epi` surjective and
/// `mono` injective.
pub fn factor_epi_mono(f: &SimplicialOperator) -> (SimplicialOperator, SimplicialOperator) {
    let mut image: Vec<usize> = f.values.clone();
    image.dedup();
    let mut epi = Vec::with_capacity(f.values.len());
    let mut k = 0;
    for (i, &v) in f.values.iter().enumerate() {
        if i > 0 && v != f.values[i - 1] {
            k += 1;
        }
        epi.push(k);
    }
    let r = image.len() - 1;
    (
        SimplicialOperator { target: r, values: epi },
        SimplicialOperator { target: f.target, values: image },
    )
}

pub fn classify_delta(f: &SimplicialOperator) -> DeltaClass {
    let kind = match (f.is_injective(), f.is_surjective()) {
        (true, true) => DeltaKind::Iso,
        (true, false) => DeltaKind::Face,
        (false, true) => DeltaKind::Degeneracy,
        (false, false) => DeltaKind::Mixed,
    };
    DeltaClass {
        kind,
        inner: f.values[0] == 0 && f.values[f.source()] == f.target,
        outer: f.values.windows(2).all(|w| w[1] == w[0] + 1),
    }
}

/// All monotone maps `[m] -> [n]` in lexicographic order of their values.
pub fn hom_delta(m: usize, n: usize) -> Vec<SimplicialOperator> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(m + 1);
    hom_rec(m + 1, n, 0, &mut current, &mut out);
    out
}

fn hom_rec(len: usize, n: usize, lo: usize, current: &mut Vec<usize>, out: &mut Vec<SimplicialOperator>) {
    if current.len() == len {
        out.push(SimplicialOperator { target: n, values: current.clone() });
        return;
    }
    for v in lo..=n {
        current.push(v);
        hom_rec(len, n, v, current, out);
        current.pop();
    }
}

/// Segal's functor to Γ: the `i`-th subset is the block `{j | f(i-1) < j <= f(i)}`.
pub fn segal_gamma(f: &SimplicialOperator) -> GammaOperator {
    let subsets = (1..=f.source()).map(|i| f.block(i).collect()).collect();
    GammaOperator::from_sorted_unchecked(f.source(), f.target, subsets)
}

/// Splits an injective operator as `outer ∘ inner`, with `inner`
/// endpoint-preserving and `outer` an interval inclusion.
pub fn factor_inner_outer(f: &SimplicialOperator) -> (SimplicialOperator, SimplicialOperator) {
    let (lo, hi) = (f.values[0], f.values[f.source()]);
    let inner = SimplicialOperator { target: hi - lo, values: f.values.iter().map(|&v| v - lo).collect() };
    let outer = SimplicialOperator { target: f.target, values: (lo..=hi).collect() };
    (inner, outer)
}
