//! Generalized Fibonacci numbers `f_{n,π}^k`, exact rational generating
//! functions and the virtual Euler characteristic of `K(π, n)`.

use std::fmt;
use std::ops::{Add, Mul};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Result, ThetaError};
use crate::trees::enumerate_pruned;

/// A polynomial in `t` with big-integer coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    coefficients: Vec<BigInt>,
}

impl Polynomial {
    pub fn new(mut coefficients: Vec<BigInt>) -> Self {
        while coefficients.last().is_some_and(Zero::is_zero) {
            coefficients.pop();
        }
        Polynomial { coefficients }
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Polynomial::new(vec![c.into()])
    }

    pub fn coefficients(&self) -> &[BigInt] {
        &self.coefficients
    }

    /// Coefficient of `t^k` (zero beyond the degree).
    pub fn coefficient(&self, k: usize) -> BigInt {
        self.coefficients.get(k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn evaluate(&self, t: &BigRational) -> BigRational {
        self.coefficients
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * t + BigRational::from_integer(c.clone()))
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, other: &Polynomial) -> Polynomial {
        let len = self.coefficients.len().max(other.coefficients.len());
        Polynomial::new((0..len).map(|k| self.coefficient(k) + other.coefficient(k)).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::new(Vec::new());
        }
        let mut out = vec![BigInt::zero(); self.coefficients.len() + other.coefficients.len() - 1];
        for (i, a) in self.coefficients.iter().enumerate() {
            for (j, b) in other.coefficients.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coefficients.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c < &BigInt::zero() { "-" } else { "+" };
            let abs = if c < &BigInt::zero() { -c } else { c.clone() };
            if first {
                if sign == "-" {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mono = match k {
                0 => String::new(),
                1 => "t".into(),
                _ => format!("t^{k}"),
            };
            if k == 0 || !abs.is_one() {
                write!(f, "{abs}")?;
            }
            f.write_str(&mono)?;
        }
        Ok(())
    }
}

/// A rational function `numerator / denominator`, kept exactly as built
/// (no cancellation).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalGF {
    numerator: Polynomial,
    denominator: Polynomial,
}

impl RationalGF {
    pub fn new(numerator: Polynomial, denominator: Polynomial) -> Result<Self> {
        if denominator.is_zero() {
            return Err(ThetaError::Argument("zero denominator".into()));
        }
        Ok(RationalGF { numerator, denominator })
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.numerator
    }

    pub fn denominator(&self) -> &Polynomial {
        &self.denominator
    }

    pub fn add(&self, other: &RationalGF) -> RationalGF {
        RationalGF {
            numerator: &(&self.numerator * &other.denominator) + &(&other.numerator * &self.denominator),
            denominator: &self.denominator * &other.denominator,
        }
    }

    pub fn mul(&self, other: &RationalGF) -> RationalGF {
        RationalGF {
            numerator: &self.numerator * &other.numerator,
            denominator: &self.denominator * &other.denominator,
        }
    }

    pub fn evaluate(&self, t: &BigRational) -> Result<BigRational> {
        let den = self.denominator.evaluate(t);
        if den.is_zero() {
            return Err(ThetaError::Evaluation(format!("denominator {} vanishes at t = {t}", self.denominator)));
        }
        Ok(self.numerator.evaluate(t) / den)
    }
}

impl fmt::Display for RationalGF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.numerator, self.denominator)
    }
}

fn check_args(n: usize, p: u64) -> Result<()> {
    if n == 0 {
        return Err(ThetaError::Argument("n must be at least 1".into()));
    }
    if p < 2 {
        return Err(ThetaError::Argument(format!("group order {p} is below 2")));
    }
    Ok(())
}

/// `f^0 .. f^K` from `(p-1)(f^k + .. + f^{k+n-1}) = f^{k+n}` with
/// `f^0 = p - 1` and `f^k = 0` for `k < 0`.
pub fn fib_numbers(n: usize, p: u64, count: usize) -> Result<Vec<BigInt>> {
    check_args(n, p)?;
    let w = BigInt::from(p - 1);
    let mut f: Vec<BigInt> = Vec::with_capacity(count + 1);
    f.push(w.clone());
    for k in 1..=count {
        let window: BigInt = f[k.saturating_sub(n)..k].iter().sum();
        f.push(&w * window);
    }
    Ok(f)
}

/// `(p-1)(t + .. + t^m)` as a polynomial.
fn weighted_run(p: u64, m: usize) -> Polynomial {
    let mut c = vec![BigInt::zero(); m + 1];
    for x in c.iter_mut().skip(1) {
        *x = BigInt::from(p - 1);
    }
    Polynomial::new(c)
}

fn one_minus(poly: &Polynomial) -> Polynomial {
    &Polynomial::constant(1) + &(&Polynomial::constant(-1) * poly)
}

/// `K(π, n)(t) = (1 - (p-1)(t + .. + t^{n-1})) / (1 - (p-1)(t + .. + t^n))`.
pub fn gf_em(n: usize, p: u64) -> Result<RationalGF> {
    check_args(n, p)?;
    RationalGF::new(one_minus(&weighted_run(p, n - 1)), one_minus(&weighted_run(p, n)))
}

/// `f_{n,π}(t) = (p-1) / (1 - (p-1)(t + .. + t^n))`.
pub fn fib_gf(n: usize, p: u64) -> Result<RationalGF> {
    check_args(n, p)?;
    RationalGF::new(Polynomial::constant(p - 1), one_minus(&weighted_run(p, n)))
}

/// The power-series coefficients of `g` in degrees `0..=max_dim`.
pub fn gf_coefficients(g: &RationalGF, max_dim: usize) -> Result<Vec<BigInt>> {
    let d0 = g.denominator.coefficient(0);
    if d0.is_zero() {
        return Err(ThetaError::Expansion(format!("denominator {} has zero constant term", g.denominator)));
    }
    let mut out: Vec<BigInt> = Vec::with_capacity(max_dim + 1);
    for k in 0..=max_dim {
        // d0 c_k = a_k - Σ_{j>=1} d_j c_{k-j}
        let mut acc = g.numerator.coefficient(k);
        for j in 1..=k.min(g.denominator.coefficients.len().saturating_sub(1)) {
            acc -= g.denominator.coefficient(j) * &out[k - j];
        }
        if !(&acc % &d0).is_zero() {
            return Err(ThetaError::Expansion(format!("coefficient {k} is not integral")));
        }
        out.push(acc / &d0);
    }
    Ok(out)
}

/// `χ(K(π, n))`: the generating function of cell counts at `t = -1`.
pub fn euler_char(n: usize, p: u64) -> Result<BigRational> {
    gf_em(n, p)?.evaluate(&BigRational::from_integer(BigInt::from(-1)))
}

/// The expected value `p^{(-1)^n}`.
pub fn expected_euler_char(n: usize, p: u64) -> BigRational {
    let p = BigRational::from_integer(BigInt::from(p));
    if n % 2 == 0 {
        p
    } else {
        p.recip()
    }
}

/// Renders an exact rational as `a/b`, or `a` when integral.
pub fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// `Σ (p-1)^{#leaves}` over pruned `n`-trees with `n + k` edges, i.e. the
/// number of non-degenerate `(n+k)`-cells of `K(π, n)` counted directly.
pub fn weighted_pruned_count(n: usize, p: u64, k: usize) -> Result<BigInt> {
    check_args(n, p)?;
    let w = BigInt::from(p - 1);
    Ok(enumerate_pruned(n, n + k)
        .iter()
        .map(|t| num_traits::pow(w.clone(), t.leaves().len()))
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn fib_examples() {
        assert_eq!(fib_numbers(2, 2, 5).unwrap(), ints(&[1, 1, 2, 3, 5, 8]));
        assert_eq!(fib_numbers(1, 2, 5).unwrap(), ints(&[1; 6]));
        assert_eq!(fib_numbers(2, 3, 4).unwrap(), ints(&[2, 4, 12, 32, 88]));
        assert!(matches!(fib_numbers(2, 1, 3), Err(ThetaError::Argument(_))));
    }

    #[test]
    fn recursion_holds() {
        for n in 1..=4 {
            for p in [2, 3, 5] {
                let f = fib_numbers(n, p, 12 + n).unwrap();
                for k in 0..=12 {
                    let window: BigInt = f[k..k + n].iter().sum();
                    assert_eq!(BigInt::from(p - 1) * window, f[k + n]);
                }
            }
        }
    }

    #[test]
    fn large_values_are_exact() {
        let f = fib_numbers(2, 5, 30).unwrap();
        assert_eq!(f[12], BigInt::from(548_225_024u64));
        assert!(f[30] > BigInt::from(u64::MAX));
        for k in 2..=30 {
            assert_eq!(f[k], BigInt::from(4) * (&f[k - 1] + &f[k - 2]));
        }
    }

    #[test]
    fn gf_examples() {
        assert_eq!(gf_em(1, 2).unwrap().to_string(), "(1) / (1 - t)");
        assert_eq!(gf_em(2, 2).unwrap().to_string(), "(1 - t) / (1 - t - t^2)");
        assert_eq!(gf_em(2, 3).unwrap().to_string(), "(1 - 2t) / (1 - 2t - 2t^2)");
    }

    #[test]
    fn coefficient_examples() {
        assert_eq!(gf_coefficients(&gf_em(2, 2).unwrap(), 7).unwrap(), ints(&[1, 0, 1, 1, 2, 3, 5, 8]));
        let one = RationalGF::new(Polynomial::constant(1), Polynomial::constant(1)).unwrap();
        assert_eq!(gf_coefficients(&one, 3).unwrap(), ints(&[1, 0, 0, 0]));
        assert_eq!(gf_coefficients(&gf_em(3, 2).unwrap(), 6).unwrap(), ints(&[1, 0, 0, 1, 1, 2, 4]));
        let bad = RationalGF::new(Polynomial::constant(1), Polynomial::new(ints(&[0, 1]))).unwrap();
        assert!(matches!(gf_coefficients(&bad, 2), Err(ThetaError::Expansion(_))));
    }

    #[test]
    fn em_series_is_one_plus_shifted_fib_series() {
        for n in 1..=4 {
            for p in 2..=5 {
                let shifted = RationalGF::new(
                    &Polynomial::new({
                        let mut c = vec![BigInt::zero(); n];
                        c.push(BigInt::one());
                        c
                    }) * &Polynomial::constant(1),
                    Polynomial::constant(1),
                )
                .unwrap()
                .mul(&fib_gf(n, p).unwrap())
                .add(&RationalGF::new(Polynomial::constant(1), Polynomial::constant(1)).unwrap());
                assert_eq!(
                    gf_coefficients(&shifted, 15).unwrap(),
                    gf_coefficients(&gf_em(n, p).unwrap(), 15).unwrap()
                );
            }
        }
    }

    #[test]
    fn three_way_agreement() {
        for n in 1..=4 {
            for p in [2u64, 3, 4, 5] {
                let rec = fib_numbers(n, p, 12).unwrap();
                let gf = gf_coefficients(&gf_em(n, p).unwrap(), n + 12).unwrap();
                for k in 0..=12 {
                    assert_eq!(rec[k], gf[n + k]);
                    if n + k <= 12 {
                        assert_eq!(rec[k], weighted_pruned_count(n, p, k).unwrap(), "n={n} p={p} k={k}");
                    }
                }
                assert!(gf.iter().all(|c| c >= &BigInt::zero()));
            }
        }
    }

    #[test]
    fn euler_examples() {
        assert_eq!(euler_char(1, 2).unwrap(), q(1, 2));
        assert_eq!(euler_char(2, 3).unwrap(), q(3, 1));
        assert_eq!(euler_char(3, 5).unwrap(), q(1, 5));
        assert_eq!(format_rational(&q(1, 2)), "1/2");
        assert_eq!(format_rational(&q(3, 1)), "3");
    }

    #[test]
    fn euler_characteristic_law() {
        for n in 1..=6 {
            for p in 2..=7 {
                assert_eq!(euler_char(n, p).unwrap(), expected_euler_char(n, p));
            }
        }
    }

    #[test]
    fn vanishing_denominator_is_reported() {
        let g = RationalGF::new(Polynomial::constant(1), Polynomial::new(ints(&[1, 1]))).unwrap();
        assert!(matches!(g.evaluate(&q(-1, 1)), Err(ThetaError::Evaluation(_))));
    }
}
