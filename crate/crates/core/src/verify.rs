//! Invariant suites over exhaustive and seeded random samples, shared by the
//! command-line `verify` command and the acceptance harness.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::counting::{euler_char, expected_euler_char, fib_numbers, gf_coefficients, gf_em, weighted_pruned_count};
use crate::error::{Result, ThetaError};
use crate::gamma::{compose_gamma, h_pi_act, FiniteAbelianGroup, GammaOperator};
use crate::presheaf::{cell_census, chain_complex, homology_f2, oracle_multisimplicial, product_census, EilenbergMacLane};
use crate::theta::{
    compose_theta, dim_theta, embed, factor_cover_outer, gamma_n, hom_theta, identity_theta, is_inner_face, is_mono,
    is_outer, is_retraction, reedy_factor, suspend, ThetaOperator,
};
use crate::trees::{enumerate_trees, LevelTree};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    WreathLaws,
    Factorization,
    GammaFunctor,
    Chain,
    Counts,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 6] = ["wreath-laws", "factorization", "gamma-functor", "chain", "counts", "all"];
}

impl FromStr for Suite {
    type Err = ThetaError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "wreath-laws" => Suite::WreathLaws,
            "factorization" => Suite::Factorization,
            "gamma-functor" => Suite::GammaFunctor,
            "chain" => Suite::Chain,
            "counts" => Suite::Counts,
            "all" => Suite::All,
            _ => return Err(ThetaError::Argument(format!("unknown suite {s:?}, expected one of {:?}", Suite::NAMES))),
        })
    }
}

/// Result of a single named check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn from_result(name: &str, r: std::result::Result<String, String>) -> Self {
        match r {
            Ok(detail) => CheckOutcome { name: name.into(), passed: true, detail },
            Err(detail) => CheckOutcome { name: name.into(), passed: false, detail },
        }
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {}: {}", self.name, self.detail)
    }
}

type Check = std::result::Result<String, String>;

fn trees_upto(n: usize, e: usize) -> Vec<LevelTree> {
    (0..=e).flat_map(|k| enumerate_trees(n, k)).collect()
}

/// Every operator between trees of height `<= n` with `<= max_edges` edges.
pub fn operator_sample(n: usize, max_edges: usize) -> Vec<ThetaOperator> {
    let trees = trees_upto(n, max_edges);
    let mut out = Vec::new();
    for s in &trees {
        for t in &trees {
            out.extend(hom_theta(s, t, n).expect("heights bounded"));
        }
    }
    out
}

fn by_source(ops: &[ThetaOperator]) -> HashMap<&LevelTree, Vec<&ThetaOperator>> {
    let mut map: HashMap<&LevelTree, Vec<&ThetaOperator>> = HashMap::new();
    for f in ops {
        map.entry(f.source()).or_default().push(f);
    }
    map
}

/// Identity and associativity laws over the exhaustive sample.
pub fn check_composition_laws(n: usize, max_edges: usize) -> Check {
    let ops = operator_sample(n, max_edges);
    let next = by_source(&ops);
    let mut triples = 0usize;
    for f in &ops {
        let ids = identity_theta(f.source(), n).map_err(|e| e.to_string())?;
        let idt = identity_theta(f.target(), n).map_err(|e| e.to_string())?;
        if compose_theta(f, &ids).ok().as_ref() != Some(f) || compose_theta(&idt, f).ok().as_ref() != Some(f) {
            return Err(format!("identity law fails for {f}"));
        }
        for g in &next[f.target()] {
            let gf = compose_theta(g, f).map_err(|e| e.to_string())?;
            for h in &next[g.target()] {
                let lhs = compose_theta(h, &gf).map_err(|e| e.to_string())?;
                let rhs = compose_theta(&compose_theta(h, g).map_err(|e| e.to_string())?, f).map_err(|e| e.to_string())?;
                if lhs != rhs {
                    return Err(format!("associativity fails for {h} ∘ {g} ∘ {f}"));
                }
                triples += 1;
            }
        }
    }
    Ok(format!("{} operators, {triples} composable triples at n={n}", ops.len()))
}

/// Associativity on random composable triples.
pub fn check_composition_random(n: usize, max_edges: usize, samples: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let trees = trees_upto(n, max_edges);
    let mut homs: HashMap<(usize, usize), Vec<ThetaOperator>> = HashMap::new();
    let mut hom = |a: usize, b: usize| -> Vec<ThetaOperator> {
        homs.entry((a, b)).or_insert_with(|| hom_theta(&trees[a], &trees[b], n).expect("bounded")).clone()
    };
    let idx: Vec<usize> = (0..trees.len()).collect();
    for _ in 0..samples {
        let path: Vec<usize> = (0..4).map(|_| *idx.choose(&mut rng).expect("nonempty")).collect();
        let pick = |list: Vec<ThetaOperator>, rng: &mut ChaCha8Rng| list.choose(rng).cloned();
        let (Some(f), Some(g), Some(h)) = (
            pick(hom(path[0], path[1]), &mut rng),
            pick(hom(path[1], path[2]), &mut rng),
            pick(hom(path[2], path[3]), &mut rng),
        ) else {
            continue;
        };
        let lhs = compose_theta(&h, &compose_theta(&g, &f).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let rhs = compose_theta(&compose_theta(&h, &g).map_err(|e| e.to_string())?, &f).map_err(|e| e.to_string())?;
        if lhs != rhs {
            return Err(format!("associativity fails for {h} ∘ {g} ∘ {f}"));
        }
        let id = identity_theta(f.target(), n).map_err(|e| e.to_string())?;
        if compose_theta(&id, &f).map_err(|e| e.to_string())? != f {
            return Err(format!("identity law fails for {f}"));
        }
    }
    Ok(format!("{samples} random triples at n={n}, seed {seed}"))
}

/// Existence and uniqueness of the retraction-mono factorization, by brute
/// force over all retractions out of the source and monos into the target.
pub fn check_reedy_factorization(n: usize, max_edges: usize) -> Check {
    let trees = trees_upto(n, max_edges);
    let ops = operator_sample(n, max_edges);
    let mut retractions: HashMap<&LevelTree, Vec<ThetaOperator>> = HashMap::new();
    let mut monos: HashMap<&LevelTree, Vec<ThetaOperator>> = HashMap::new();
    for f in &ops {
        if is_retraction(f) {
            retractions.entry(f.source()).or_default().push(f.clone());
        }
        if is_mono(f) {
            monos.entry(f.target()).or_default().push(f.clone());
        }
    }
    // monic by left cancellation, within the sample
    let into = {
        let mut m: HashMap<&LevelTree, Vec<&ThetaOperator>> = HashMap::new();
        for a in &ops {
            m.entry(a.target()).or_default().push(a);
        }
        m
    };
    for f in &ops {
        let (deg, face) = reedy_factor(f);
        if compose_theta(&face, &deg).ok().as_ref() != Some(f) || !is_retraction(&deg) || !is_mono(&face) {
            return Err(format!("factorization of {f} is invalid"));
        }
        let mut found = 0;
        for r in &retractions[f.source()] {
            for m in monos.get(f.target()).into_iter().flatten() {
                if m.source() == r.target() && compose_theta(m, r).ok().as_ref() == Some(f) {
                    found += 1;
                    if (r, m) != (&deg, &face) {
                        return Err(format!("{f} has a second factorization {m} ∘ {r}"));
                    }
                }
            }
        }
        if found != 1 {
            return Err(format!("{f} has {found} factorizations"));
        }
        let mut images: HashMap<(&LevelTree, ThetaOperator), &ThetaOperator> = HashMap::new();
        let mut cancels = true;
        for a in into.get(f.source()).into_iter().flatten() {
            let fa = compose_theta(f, a).map_err(|e| e.to_string())?;
            if let Some(prev) = images.insert((a.source(), fa), a) {
                cancels &= prev == *a;
            }
        }
        if cancels != is_mono(f) {
            return Err(format!("mono test disagrees with left cancellation for {f}"));
        }
    }
    Ok(format!("{} operators over {} trees at n={n}", ops.len(), trees.len()))
}

/// Every face factors uniquely as an outer face after an inner face.
pub fn check_inner_outer(n: usize, max_edges: usize) -> Check {
    let ops = operator_sample(n, max_edges);
    let faces: Vec<&ThetaOperator> = ops.iter().filter(|f| is_mono(f)).collect();
    for f in &faces {
        let (inner, outer) = factor_cover_outer(f);
        if !is_inner_face(&inner) || !is_outer(&outer) || !is_mono(&outer) {
            return Err(format!("bad factors for {f}"));
        }
        if compose_theta(&outer, &inner).ok().as_ref() != Some(*f) {
            return Err(format!("factors of {f} do not compose back"));
        }
        let count = faces
            .iter()
            .filter(|i| i.source() == f.source() && is_inner_face(i))
            .flat_map(|i| {
                faces
                    .iter()
                    .filter(move |o| o.source() == i.target() && o.target() == f.target() && is_outer(o))
                    .filter(move |o| compose_theta(o, i).ok().as_ref() == Some(*f))
            })
            .count();
        if count != 1 {
            return Err(format!("{f} has {count} inner-outer factorizations"));
        }
    }
    Ok(format!("{} faces at n={n}", faces.len()))
}

/// `dim(T) = edges(T) = m + Σ dim(T_i)` for all trees up to the bound.
pub fn check_dimension_law(max_n: usize, max_edges: usize) -> Check {
    let mut count = 0;
    for n in 1..=max_n {
        for e in 0..=max_edges {
            for t in enumerate_trees(n, e) {
                let wreath = t.valence() + t.children().iter().map(dim_theta).sum::<usize>();
                if dim_theta(&t) != e || t.edges() != e || wreath != e {
                    return Err(format!("dimension law fails for {t}"));
                }
                count += 1;
            }
        }
    }
    Ok(format!("{count} trees"))
}

/// Hom-set sizes are unchanged by the embedding `Θ_n -> Θ_{n+1}`.
pub fn check_embedding(max_n: usize, max_edges: usize) -> Check {
    let mut pairs = 0;
    for n in 1..=max_n {
        let trees = trees_upto(n, max_edges);
        for s in &trees {
            for t in &trees {
                let lower = hom_theta(s, t, n).map_err(|e| e.to_string())?;
                let upper = hom_theta(s, t, n + 1).map_err(|e| e.to_string())?;
                if lower.iter().map(embed).collect::<Vec<_>>() != upper {
                    return Err(format!("embedding is not bijective on ({s}, {t}) at n={n}"));
                }
                pairs += 1;
            }
        }
    }
    Ok(format!("{pairs} hom-sets"))
}

/// `γ_n(g∘f) = γ_n(g)∘γ_n(f)`, disjointness, and `γ_{n+1}∘σ_n = γ_n`.
pub fn check_gamma_functor(n: usize, max_edges: usize) -> Check {
    let ops = operator_sample(n, max_edges);
    let next = by_source(&ops);
    let mut pairs = 0;
    for f in &ops {
        let gf = gamma_n(f);
        if gamma_n(&suspend(f)) != gf {
            return Err(format!("suspension triangle fails for {f}"));
        }
        if gf.source() != f.source().count_at_height(n) || gf.target() != f.target().count_at_height(n) {
            return Err(format!("γ_{n}({f}) has the wrong endpoints"));
        }
        GammaOperator::new(gf.source(), gf.target(), gf.subsets().to_vec()).map_err(|e| e.to_string())?;
        for g in &next[f.target()] {
            let lhs = gamma_n(&compose_theta(g, f).map_err(|e| e.to_string())?);
            let rhs = compose_gamma(&gamma_n(g), &gf).map_err(|e| e.to_string())?;
            if lhs != rhs {
                return Err(format!("γ_{n} is not functorial on {g} ∘ {f}"));
            }
            pairs += 1;
        }
    }
    Ok(format!("{} operators, {pairs} composable pairs at n={n}", ops.len()))
}

/// `Hπ` is a contravariant functor on all Γ-operators between `0̄..3̄`.
pub fn check_h_pi(pi: &FiniteAbelianGroup) -> Check {
    let ops: Vec<GammaOperator> = (0..=3).flat_map(|m| (0..=3).flat_map(move |k| GammaOperator::all(m, k))).collect();
    let tuples = |len: usize| -> Vec<Vec<_>> {
        (0..len).fold(vec![Vec::new()], |acc, _| {
            acc.into_iter()
                .flat_map(|p: Vec<_>| {
                    pi.elements().map(move |g| {
                        let mut p = p.clone();
                        p.push(g);
                        p
                    })
                })
                .collect()
        })
    };
    let mut checked = 0;
    for f in &ops {
        for g in ops.iter().filter(|g| g.source() == f.target()) {
            let gf = compose_gamma(g, f).map_err(|e| e.to_string())?;
            for x in tuples(g.target()) {
                let two = h_pi_act(pi, f, &h_pi_act(pi, g, &x).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
                if two != h_pi_act(pi, &gf, &x).map_err(|e| e.to_string())? {
                    return Err(format!("Hπ not functorial on {g} ∘ {f}"));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} evaluations over {pi}"))
}

/// F₂ Betti numbers of `K(π, n)` agree with the multisimplicial oracle in
/// degrees `0..max_dim`.
pub fn check_homology_vs_oracle(pi: &FiniteAbelianGroup, n: usize, max_dim: usize) -> Check {
    let k = EilenbergMacLane::new(pi.clone(), n).map_err(|e| e.to_string())?;
    let c = chain_complex(&k, max_dim).map_err(|e| e.to_string())?;
    let theta: Vec<usize> = (0..max_dim).map(|d| homology_f2(&c, d)).collect::<Result<_>>().map_err(|e| e.to_string())?;
    let oracle = oracle_multisimplicial(pi, n, max_dim).map_err(|e| e.to_string())?;
    if let Some(d) = (0..max_dim).find(|&d| theta[d] != oracle[d]) {
        return Err(format!("degree {d}: theta {} vs oracle {}", theta[d], oracle[d]));
    }
    Ok(format!("K({pi},{n}) betti {theta:?}"))
}

/// `H_k = 0` for `0 < k < n` and `b_n = dim π/2π`.
pub fn check_em_property(pi: &FiniteAbelianGroup, n: usize) -> Check {
    let k = EilenbergMacLane::new(pi.clone(), n).map_err(|e| e.to_string())?;
    let c = chain_complex(&k, n + 1).map_err(|e| e.to_string())?;
    let b: Vec<usize> = (0..=n).map(|d| homology_f2(&c, d)).collect::<Result<_>>().map_err(|e| e.to_string())?;
    if b[0] != 1 || b[1..n].iter().any(|&x| x != 0) || b[n] != pi.mod_two_rank() {
        return Err(format!("K({pi},{n}) has betti {b:?}"));
    }
    Ok(format!("K({pi},{n}) betti {b:?}"))
}

/// The recursion `(p-1)(f^k + .. + f^{k+n-1}) = f^{k+n}` on the cell census.
pub fn check_recursion_on_census(n: usize, p: u32, max_k: usize) -> Check {
    let k = EilenbergMacLane::new(FiniteAbelianGroup::cyclic(p), n).map_err(|e| e.to_string())?;
    let census = cell_census(&k, 2 * n + max_k);
    let f = |k: usize| BigInt::from(census[n + k].clone());
    for kk in 0..=max_k {
        let window: BigInt = (kk..kk + n).map(f).sum();
        if BigInt::from(p - 1) * window != f(kk + n) {
            return Err(format!("n={n} p={p} k={kk}"));
        }
    }
    if f(0) != BigInt::from(p - 1) {
        return Err(format!("n={n} p={p}: f^0 = {}", f(0)));
    }
    Ok(format!("n={n} p={p} k<={max_k}"))
}

/// Direct enumeration = recursion = generating-function coefficients.
pub fn check_three_way(n: usize, p: u64, max_k: usize) -> Check {
    let rec = fib_numbers(n, p, max_k).map_err(|e| e.to_string())?;
    let gf = gf_coefficients(&gf_em(n, p).map_err(|e| e.to_string())?, n + max_k).map_err(|e| e.to_string())?;
    for k in 0..=max_k {
        let direct = weighted_pruned_count(n, p, k).map_err(|e| e.to_string())?;
        if rec[k] != gf[n + k] || rec[k] != direct {
            return Err(format!("n={n} p={p} k={k}: recursion {} gf {} direct {direct}", rec[k], gf[n + k]));
        }
    }
    Ok(format!("n={n} p={p} k<={max_k}"))
}

pub fn check_euler(max_n: usize, max_p: u64) -> Check {
    for n in 1..=max_n {
        for p in 2..=max_p {
            let chi = euler_char(n, p).map_err(|e| e.to_string())?;
            if chi != expected_euler_char(n, p) {
                return Err(format!("χ(K(Z/{p},{n})) = {chi}"));
            }
        }
    }
    Ok(format!("n<={max_n}, p<={max_p}"))
}

/// Top-dimensional cells of `Δ[m] × Δ[k]` number `(m+k)!/(m!k!)`.
pub fn check_shuffles(max_total: usize) -> Check {
    for m in 0..=max_total {
        for k in 0..=max_total - m {
            let census = product_census(&LevelTree::corolla(m), &LevelTree::corolla(k), 1).map_err(|e| e.to_string())?;
            let binom = (1..=k).fold(1usize, |acc, i| acc * (m + i) / i);
            if census[m + k] != binom {
                return Err(format!("Δ[{m}]×Δ[{k}] has {} top cells", census[m + k]));
            }
        }
    }
    Ok(format!("m+n<={max_total}"))
}

/// Runs a suite and returns one outcome per check.
pub fn run_suite(suite: Suite, seed: u64) -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    let mut run = |name: &str, f: &dyn Fn() -> Check| out.push(CheckOutcome::from_result(name, f()));
    let all = suite == Suite::All;
    if all || suite == Suite::WreathLaws {
        run("composition laws, n=2, <=3 edges", &|| check_composition_laws(2, 3));
        run("composition laws, random n=3, <=4 edges", &|| check_composition_random(3, 4, 300, seed));
        run("dimension law, n<=4, <=8 edges", &|| check_dimension_law(4, 8));
        run("embedding fully faithful, n<=2, <=3 edges", &|| check_embedding(2, 3));
    }
    if all || suite == Suite::Factorization {
        run("reedy factorization, n=2, <=3 edges", &|| check_reedy_factorization(2, 3));
        run("inner-outer factorization, n=2, <=3 edges", &|| check_inner_outer(2, 3));
    }
    if all || suite == Suite::GammaFunctor {
        run("gamma functor, n=1, <=3 edges", &|| check_gamma_functor(1, 3));
        run("gamma functor, n=2, <=3 edges", &|| check_gamma_functor(2, 3));
        for pi in ["z2", "z3", "z2xz2"] {
            let g: FiniteAbelianGroup = pi.parse().expect("valid");
            run(&format!("H{pi} functoriality"), &|| check_h_pi(&g));
        }
    }
    if all || suite == Suite::Chain {
        for (pi, n, d) in [("z2", 1, 7), ("z3", 1, 6), ("z2", 2, 6)] {
            let g: FiniteAbelianGroup = pi.parse().expect("valid");
            run(&format!("homology vs oracle K({pi},{n})"), &|| check_homology_vs_oracle(&g, n, d));
        }
        for pi in ["z2", "z3", "z4", "z2xz2"] {
            let g: FiniteAbelianGroup = pi.parse().expect("valid");
            for n in 1..=3 {
                run(&format!("EM property K({pi},{n})"), &|| check_em_property(&g, n));
            }
        }
    }
    if all || suite == Suite::Counts {
        run("recursion law on census", &|| {
            for n in 1..=4 {
                for p in [2, 3, 5] {
                    check_recursion_on_census(n, p, 12)?;
                }
            }
            Ok("n<=4, p in {2,3,5}, k<=12".into())
        });
        run("three-way count agreement", &|| {
            for n in 1..=3 {
                for p in 2..=4 {
                    check_three_way(n, p, 10)?;
                }
            }
            Ok("n<=3, p<=4, k<=10".into())
        });
        run("euler characteristic", &|| check_euler(6, 7));
        run("shuffle counts", &|| check_shuffles(6));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_parse() {
        for name in Suite::NAMES {
            assert!(name.parse::<Suite>().is_ok());
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn counts_suite_passes() {
        let outcomes = run_suite(Suite::Counts, 0);
        assert_eq!(outcomes.len(), 4);
        assert!(outcomes.iter().all(|o| o.passed), "{outcomes:?}");
    }

    #[test]
    fn random_composition_is_seed_deterministic() {
        assert_eq!(check_composition_random(3, 3, 50, 9), check_composition_random(3, 3, 50, 9));
        assert!(check_composition_random(3, 4, 100, 42).is_ok());
    }
}
