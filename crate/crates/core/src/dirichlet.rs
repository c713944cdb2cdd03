//! Ordinary Dirichlet polynomials `D(s) = sum a(n) n^{-s}` and their Bohr lift.
//!
//! Writing `n = p_1^{alpha_1} p_2^{alpha_2} ...` identifies the index `n`
//! with the finitely supported exponent sequence `alpha` in `Z_+^inf`
//! (sequence index `j` is the `j`-th prime). Under this identification
//! coefficient functions become spectra on `Z^inf` supported in the orthant.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::automorphism::Automorphism;
use crate::dual_group::{Character, DualGroup};
use crate::error::{Error, Result};
use crate::hausdorff::HausdorffOperator;
use crate::spectrum::Spectrum;

/// Largest index the prime sieve covers; also the largest allowed `n_max`.
pub const LIMIT: u64 = 1_000_000;

struct Sieve {
    /// Smallest prime factor of every `n <= LIMIT`.
    spf: Vec<u32>,
    /// Sequence index (1-based) of each prime, 0 for composites.
    index: Vec<u32>,
    primes: Vec<u64>,
}

fn sieve() -> &'static Sieve {
    static SIEVE: OnceLock<Sieve> = OnceLock::new();
    SIEVE.get_or_init(|| {
        let n = LIMIT as usize;
        let mut spf = vec![0u32; n + 1];
        let mut index = vec![0u32; n + 1];
        let mut primes = Vec::new();
        for i in 2..=n {
            if spf[i] == 0 {
                primes.push(i as u64);
                index[i] = primes.len() as u32;
                let mut j = i;
                while j <= n {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        Sieve { spf, index, primes }
    })
}

fn out_of_range(value: impl ToString, limit: u64) -> Error {
    Error::OutOfRange { value: value.to_string(), limit }
}

pub fn is_prime(n: u64) -> bool {
    n <= LIMIT && sieve().index[n as usize] != 0
}

/// The `j`-th prime, `j >= 1`.
pub fn nth_prime(j: usize) -> Option<u64> {
    j.checked_sub(1).and_then(|i| sieve().primes.get(i).copied())
}

/// Exponent sequence of `n`, `1 <= n <= LIMIT`.
pub fn factorize(n: u64) -> Result<Character> {
    if n == 0 || n > LIMIT {
        return Err(out_of_range(n, LIMIT));
    }
    let s = sieve();
    let mut rest = n as usize;
    let mut pairs = Vec::new();
    while rest > 1 {
        let p = s.spf[rest] as usize;
        let mut e = 0;
        while rest.is_multiple_of(p) {
            rest /= p;
            e += 1;
        }
        pairs.push((s.index[p] as usize, e));
    }
    Character::sparse(pairs)
}

/// `prod p_j^{alpha_j}` for a nonnegative exponent sequence.
pub fn from_multi_index(alpha: &Character) -> Result<u64> {
    let Character::Sparse(pairs) = alpha else {
        return Err(Error::UnsupportedGroup(alpha.group()));
    };
    let mut n: u64 = 1;
    for &(j, e) in pairs {
        if e < 0 {
            return Err(Error::InvalidCharacter(format!("{alpha} has a negative exponent")));
        }
        let p = nth_prime(j).ok_or_else(|| out_of_range(format!("prime index {j}"), sieve().primes.len() as u64))?;
        let power = u32::try_from(e).ok().and_then(|e| p.checked_pow(e));
        n = power.and_then(|pe| n.checked_mul(pe)).ok_or_else(|| out_of_range(format!("p^alpha for {alpha}"), u64::MAX))?;
    }
    Ok(n)
}

/// Exact integer `q`-th root of `n`, if `n` is a perfect `q`-th power.
pub fn exact_root(n: u64, q: u32) -> Option<u64> {
    if q == 0 {
        return None;
    }
    if n <= 1 || q == 1 {
        return Some(n);
    }
    let guess = (n as f64).powf(1.0 / q as f64).round() as u64;
    (guess.saturating_sub(1)..=guess + 1).find(|&r| r.checked_pow(q) == Some(n))
}

#[derive(Clone, Debug, PartialEq)]
pub struct DirichletPolynomial {
    coeffs: BTreeMap<u64, Complex64>,
    n_max: u64,
}

impl DirichletPolynomial {
    pub fn new(n_max: u64) -> Result<Self> {
        if n_max == 0 || n_max > LIMIT {
            return Err(out_of_range(n_max, LIMIT));
        }
        Ok(DirichletPolynomial { coeffs: BTreeMap::new(), n_max })
    }

    pub fn from_coeffs(n_max: u64, coeffs: impl IntoIterator<Item = (u64, Complex64)>) -> Result<Self> {
        let mut d = Self::new(n_max)?;
        for (n, a) in coeffs {
            d.add(n, a)?;
        }
        Ok(d)
    }

    /// Adds `a` to the coefficient of `n`, dropping exact zeros.
    pub fn add(&mut self, n: u64, a: Complex64) -> Result<()> {
        if n == 0 || n > self.n_max {
            return Err(out_of_range(n, self.n_max));
        }
        let entry = self.coeffs.entry(n).or_insert(Complex64::new(0.0, 0.0));
        *entry += a;
        if *entry == Complex64::new(0.0, 0.0) {
            self.coeffs.remove(&n);
        }
        Ok(())
    }

    pub fn n_max(&self) -> u64 {
        self.n_max
    }

    pub fn get(&self, n: u64) -> Complex64 {
        self.coeffs.get(&n).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, Complex64)> + '_ {
        self.coeffs.iter().map(|(&n, &a)| (n, a))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn l1_coeff(&self) -> f64 {
        self.coeffs.values().map(|a| a.norm()).sum()
    }

    /// Inverse of [`bohr_lift`] for spectra supported in the orthant.
    pub fn from_spectrum(s: &Spectrum, n_max: u64) -> Result<Self> {
        DualGroup::ZInfLex.ensure_same(s.group())?;
        let mut d = Self::new(n_max)?;
        for (alpha, &a) in s.iter() {
            d.add(from_multi_index(alpha)?, a)?;
        }
        Ok(d)
    }
}

/// The coefficient function `alpha -> a(p^alpha)` as a spectrum on `Z^inf`.
pub fn bohr_lift(d: &DirichletPolynomial) -> Result<Spectrum> {
    let mut s = Spectrum::empty(DualGroup::ZInfLex);
    for (n, a) in d.iter() {
        s.add_term(factorize(n)?, a)?;
    }
    Ok(s)
}

/// Trims trailing zeros and merges repeated `u`; rejects negative entries.
fn normalize_sigma_weights(weights: &[(Vec<i64>, Complex64)]) -> Result<BTreeMap<Vec<i64>, Complex64>> {
    let mut out = BTreeMap::new();
    for (u, w) in weights {
        let Automorphism::SigmaU { u, .. } = Automorphism::sigma_u(u.clone())? else {
            unreachable!("sigma_u constructor")
        };
        *out.entry(u).or_insert(Complex64::new(0.0, 0.0)) += w;
    }
    Ok(out)
}

/// The operator with dual-side terms `(Phi(u), sigma_u)`, in the term order
/// [`sigma_operator`] uses.
pub fn sigma_hausdorff(weights: &[(Vec<i64>, Complex64)]) -> Result<HausdorffOperator> {
    let terms = normalize_sigma_weights(weights)?
        .into_iter()
        .map(|(u, w)| Ok((w, Automorphism::sigma_u(u)?)))
        .collect::<Result<Vec<_>>>()?;
    HausdorffOperator::from_dual(DualGroup::ZInfLex, terms)
}

/// `b(p^alpha) = sum over u with sigma_u(alpha) >= 0 of Phi(u) a(p^{sigma_u(alpha)})`.
///
/// Output indices are the preimages `sigma_u^{-1}(beta)` of `beta` in the
/// support, obtained from `alpha_k = beta_k + u_{k-1} alpha_{k-1}`; with
/// `u >= 0` they stay in the orthant, so the membership filter always passes.
pub fn sigma_operator(weights: &[(Vec<i64>, Complex64)], d: &DirichletPolynomial) -> Result<DirichletPolynomial> {
    let weights = normalize_sigma_weights(weights)?;
    let mut out = DirichletPolynomial::new(d.n_max())?;
    let supports = d
        .iter()
        .map(|(m, a)| Ok((dense_exponents(&factorize(m)?), a)))
        .collect::<Result<Vec<_>>>()?;
    for (u, w) in &weights {
        for (beta, a) in &supports {
            let len = beta.len().max(u.len() + 1);
            let mut alpha = vec![0i64; len];
            for k in 0..len {
                let b = beta.get(k).copied().unwrap_or(0);
                let carry = if k == 0 { Some(0) } else { u.get(k - 1).copied().unwrap_or(0).checked_mul(alpha[k - 1]) };
                alpha[k] = carry.and_then(|c| b.checked_add(c)).ok_or_else(|| out_of_range("exponent", i64::MAX as u64))?;
            }
            let n = from_multi_index(&Character::sparse_from_dense(&alpha))?;
            if n > d.n_max() {
                return Err(out_of_range(n, d.n_max()));
            }
            out.add(n, w * a)?;
        }
    }
    Ok(out)
}

fn dense_exponents(alpha: &Character) -> Vec<i64> {
    (1..=alpha.sparse_len()).map(|k| alpha.sparse_get(k).unwrap_or(0)).collect()
}

/// `b(n) = sum over q with n = m^q of Phi(1/q) a(m)`.
pub fn root_rescale_operator(weights: &[(u64, Complex64)], d: &DirichletPolynomial) -> Result<DirichletPolynomial> {
    let mut merged: BTreeMap<u32, Complex64> = BTreeMap::new();
    for &(q, w) in weights {
        let q = u32::try_from(q).ok().filter(|&q| q >= 1).ok_or_else(|| {
            Error::InvalidAutomorphism(format!("root-rescale exponent q = {q} must be a positive integer"))
        })?;
        *merged.entry(q).or_insert(Complex64::new(0.0, 0.0)) += w;
    }
    let mut out = DirichletPolynomial::new(d.n_max())?;
    for (&q, &w) in &merged {
        for (m, a) in d.iter() {
            let n = m.checked_pow(q).filter(|&n| n <= d.n_max()).ok_or_else(|| out_of_range(format!("{m}^{q}"), d.n_max()))?;
            out.add(n, w * a)?;
        }
    }
    Ok(out)
}

/// `sum a(n) n^{-s}`.
pub fn evaluate(d: &DirichletPolynomial, s: Complex64) -> Complex64 {
    d.iter().map(|(n, a)| a * (-s * (n as f64).ln()).exp()).sum()
}

pub const DEFAULT_T_SAMPLES: usize = 100_000;
pub const DEFAULT_T_RANGE: f64 = 1_000.0;

/// Grid maximum of `|D(it)|` over `t` in `[-t_range, t_range]`; a lower
/// bound for the sup norm on the right half-plane.
pub fn sup_estimate(d: &DirichletPolynomial, t_samples: usize, t_range: f64) -> f64 {
    let logs: Vec<(f64, Complex64)> = d.iter().map(|(n, a)| ((n as f64).ln(), a)).collect();
    let samples = t_samples.max(1);
    (0..samples)
        .map(|k| {
            let t = if samples == 1 { 0.0 } else { -t_range + 2.0 * t_range * k as f64 / (samples - 1) as f64 };
            logs.iter().map(|&(l, a)| a * Complex64::from_polar(1.0, -t * l)).sum::<Complex64>().norm()
        })
        .fold(0.0, f64::max)
}

/// `sum |a(p)|` over prime indices `p`.
pub fn bohr_prime_sum(d: &DirichletPolynomial) -> f64 {
    d.iter().filter(|&(n, _)| is_prime(n)).map(|(_, a)| a.norm()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use proptest::prelude::*;
    use rand::Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn poly(coeffs: &[(u64, Complex64)]) -> DirichletPolynomial {
        DirichletPolynomial::from_coeffs(LIMIT, coeffs.iter().copied()).unwrap()
    }

    fn trial_division(mut n: u64) -> BTreeMap<u64, i64> {
        let mut out = BTreeMap::new();
        let mut p = 2;
        while p * p <= n {
            while n.is_multiple_of(p) {
                *out.entry(p).or_insert(0) += 1;
                n /= p;
            }
            p += 1;
        }
        if n > 1 {
            *out.entry(n).or_insert(0) += 1;
        }
        out
    }

    #[test]
    fn factorize_examples() {
        assert_eq!(factorize(6).unwrap(), Character::sparse([(1, 1), (2, 1)]).unwrap());
        assert!(factorize(1).unwrap().is_identity());
        assert_eq!(factorize(12).unwrap(), Character::sparse([(1, 2), (2, 1)]).unwrap());
        assert!(matches!(factorize(0), Err(Error::OutOfRange { .. })));
        assert!(matches!(factorize(LIMIT + 1), Err(Error::OutOfRange { .. })));
        assert_eq!(nth_prime(1), Some(2));
        assert_eq!(nth_prime(78_498), Some(999_983));
        assert_eq!(nth_prime(0), None);
    }

    #[test]
    fn factorize_matches_trial_division() {
        for n in (1..=3000).chain([999_983, 1_000_000, 720_720, 65_536]) {
            let alpha = factorize(n).unwrap();
            let want: BTreeMap<u64, i64> = trial_division(n);
            let got: BTreeMap<u64, i64> = match &alpha {
                Character::Sparse(p) => p.iter().map(|&(j, e)| (nth_prime(j).unwrap(), e)).collect(),
                _ => unreachable!(),
            };
            assert_eq!(got, want, "n = {n}");
            assert_eq!(from_multi_index(&alpha).unwrap(), n);
        }
    }

    #[test]
    fn lift_examples() {
        let s = bohr_lift(&poly(&[(6, c(1.0, 0.0))])).unwrap();
        assert_eq!(s.get(&Character::sparse([(1, 1), (2, 1)]).unwrap()), c(1.0, 0.0));
        assert_eq!(s.len(), 1);
        let k = bohr_lift(&poly(&[(1, c(2.0, -1.0))])).unwrap();
        assert_eq!(k.constant_term(), c(2.0, -1.0));
        assert!(bohr_lift(&poly(&[])).unwrap().is_empty());
    }

    #[test]
    fn polynomial_bounds() {
        let mut d = DirichletPolynomial::new(100).unwrap();
        assert!(matches!(d.add(101, c(1.0, 0.0)), Err(Error::OutOfRange { .. })));
        assert!(matches!(d.add(0, c(1.0, 0.0)), Err(Error::OutOfRange { .. })));
        d.add(5, c(1.0, 0.0)).unwrap();
        d.add(5, c(-1.0, 0.0)).unwrap();
        assert!(d.is_empty());
        assert!(DirichletPolynomial::new(LIMIT + 1).is_err());
    }

    #[test]
    fn sigma_examples() {
        let w = [(vec![1], c(1.0, 0.0))];
        let b = sigma_operator(&w, &poly(&[(2, c(1.0, 0.0))])).unwrap();
        assert_eq!(b.get(6), c(1.0, 0.0));
        assert_eq!(b.get(4), c(0.0, 0.0));
        assert_eq!(b.len(), 1);
        let d = poly(&[(1, c(1.0, 0.0)), (12, c(0.0, 2.0)), (35, c(-1.0, 0.5))]);
        let scaled = sigma_operator(&[(vec![0, 0], c(0.5, 0.0))], &d).unwrap();
        assert_eq!(scaled, poly(&[(1, c(0.5, 0.0)), (12, c(0.0, 1.0)), (35, c(-0.5, 0.25))]));
        assert!(sigma_operator(&[(vec![-1], c(1.0, 0.0))], &d).is_err());
        let small = DirichletPolynomial::from_coeffs(5, [(2, c(1.0, 0.0))]).unwrap();
        assert!(matches!(sigma_operator(&w, &small), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn root_rescale_examples() {
        let w = [(1, c(0.5, 0.0)), (2, c(0.5, 0.0))];
        let b = root_rescale_operator(&w, &poly(&[(2, c(1.0, 0.0)), (4, c(1.0, 0.0))])).unwrap();
        assert_eq!(b.get(4), c(1.0, 0.0));
        assert_eq!(b.get(2), c(0.5, 0.0));
        assert_eq!(b.get(16), c(0.5, 0.0));
        let one = root_rescale_operator(&w, &poly(&[(1, c(1.0, 0.0))])).unwrap();
        assert_eq!(one, poly(&[(1, c(1.0, 0.0))]));
        assert!(root_rescale_operator(&[(0, c(1.0, 0.0))], &one).is_err());
        let tight = DirichletPolynomial::from_coeffs(10, [(4, c(1.0, 0.0))]).unwrap();
        assert!(matches!(root_rescale_operator(&w, &tight), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn exact_roots() {
        assert_eq!(exact_root(1_000_000, 2), Some(1000));
        assert_eq!(exact_root(1_000_000, 3), Some(100));
        assert_eq!(exact_root(999_999, 2), None);
        assert_eq!(exact_root(1, 17), Some(1));
        assert_eq!(exact_root(2, 2), None);
        assert_eq!(exact_root(u64::MAX, 1), Some(u64::MAX));
        for r in 2u64..200 {
            for q in 2u32..6 {
                if let Some(n) = r.checked_pow(q) {
                    assert_eq!(exact_root(n, q), Some(r));
                    assert_eq!(exact_root(n + 1, q), None);
                }
            }
        }
    }

    #[test]
    fn evaluation_examples() {
        let d = poly(&[(1, c(1.0, 0.0)), (2, c(1.0, 0.0))]);
        assert!((evaluate(&d, c(1.0, 0.0)) - c(1.5, 0.0)).norm() < 1e-15);
        assert_eq!(evaluate(&poly(&[]), c(1.0, 0.0)), c(0.0, 0.0));
        let two = poly(&[(2, c(1.0, 0.0))]);
        for t in [-7.0, 0.3, 1e3] {
            assert!((evaluate(&two, c(0.0, t)).norm() - 1.0).abs() < 1e-14);
        }
        assert!((sup_estimate(&two, 101, 10.0) - 1.0).abs() < 1e-14);
        assert!((sup_estimate(&poly(&[(1, c(3.0, 0.0))]), 5, 10.0) - 3.0).abs() < 1e-15);
        let pair = poly(&[(2, c(1.0, 0.0)), (3, c(1.0, 0.0))]);
        let est = sup_estimate(&pair, DEFAULT_T_SAMPLES, DEFAULT_T_RANGE);
        assert!(est <= 2.0 + 1e-12 && est > 1.9);
    }

    #[test]
    fn prime_sum_examples() {
        let d = poly(&[(2, c(0.3, 0.0)), (3, c(0.0, -0.4)), (4, c(9.0, 0.0))]);
        assert!((bohr_prime_sum(&d) - 0.7).abs() < 1e-15);
        assert_eq!(bohr_prime_sum(&poly(&[])), 0.0);
        let ones = poly(&[(2, c(1.0, 0.0)), (3, c(1.0, 0.0)), (5, c(1.0, 0.0))]);
        assert_eq!(bohr_prime_sum(&ones), 3.0);
    }

    fn random_poly(r: &mut impl Rng, max_index: u64, terms: usize) -> DirichletPolynomial {
        let mut d = DirichletPolynomial::new(LIMIT).unwrap();
        for _ in 0..terms {
            d.add(r.random_range(1..=max_index), random::complex_gaussian(r)).unwrap();
        }
        d
    }

    fn random_sigma_weights(r: &mut impl Rng) -> Vec<(Vec<i64>, Complex64)> {
        (0..r.random_range(1..=3))
            .map(|_| {
                let len = r.random_range(0..=3);
                (random::sigma_weights(r, len, 2), random::complex_gaussian(r))
            })
            .collect()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn lift_is_natural(seed in any::<u64>()) {
            let mut r = random::rng(seed);
            let d = random_poly(&mut r, 60, 6);
            let w = random_sigma_weights(&mut r);
            let Ok(b) = sigma_operator(&w, &d) else { return Ok(()) };
            let via_spectrum = sigma_hausdorff(&w).unwrap().apply(&bohr_lift(&d).unwrap()).unwrap();
            prop_assert_eq!(bohr_lift(&b).unwrap(), via_spectrum);
            prop_assert!(bohr_prime_sum(&b) <= w.iter().map(|(_, x)| x.norm()).sum::<f64>() * d.l1_coeff() * (1.0 + 1e-12));
        }

        #[test]
        fn root_rescale_matches_brute_force(seed in any::<u64>()) {
            let mut r = random::rng(seed);
            let d = random_poly(&mut r, 12, 5);
            let weights: Vec<(u64, Complex64)> =
                (0..3).map(|_| (r.random_range(1..=4), random::complex_gaussian(&mut r))).collect();
            let b = root_rescale_operator(&weights, &d).unwrap();
            for n in 1..=12u64.pow(4) {
                let mut want = c(0.0, 0.0);
                for &(q, w) in &weights {
                    if let Some(m) = exact_root(n, q as u32) {
                        want += w * d.get(m);
                    }
                }
                prop_assert!((b.get(n) - want).norm() <= 1e-12 * (1.0 + want.norm()), "n = {}", n);
            }
        }

        #[test]
        fn lift_roundtrip(seed in any::<u64>()) {
            let d = random_poly(&mut random::rng(seed), 10_000, 8);
            let s = bohr_lift(&d).unwrap();
            prop_assert!(s.is_supported_in(|a| !a.has_negative_entry()).is_inside());
            prop_assert_eq!(DirichletPolynomial::from_spectrum(&s, LIMIT).unwrap(), d);
        }
    }
}
