//! Seeded generators for test instances.
//!
//! Every generator draws from a caller-owned `ChaCha8Rng`, so a seed fixes
//! the whole instance stream.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::automorphism::IntMatrix;
use crate::dirichlet::{DirichletPolynomial, LIMIT};
use crate::dual_group::{Character, DualGroup};
use crate::spectrum::Spectrum;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for `seed` on a stream selected by `label`, so independent
/// consumers of one seed never share draws.
pub fn stream(seed: u64, label: &str) -> ChaCha8Rng {
    // FNV-1a; stable across platforms and releases
    let h = label.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3));
    let mut r = rng(seed);
    r.set_stream(h);
    r
}

/// Standard complex Gaussian (independent N(0,1) parts).
pub fn complex_gaussian(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn lattice_point(rng: &mut impl Rng, dim: usize, radius: i64) -> Vec<i64> {
    (0..dim).map(|_| rng.random_range(-radius..=radius)).collect()
}

/// Up to `terms` characters drawn uniformly from `[-radius, radius]^dim`
/// with complex Gaussian coefficients. Repeated draws are summed.
pub fn spectrum(rng: &mut impl Rng, dim: usize, radius: i64, terms: usize) -> Spectrum {
    let mut s = Spectrum::empty(DualGroup::ZLex(dim));
    for _ in 0..terms {
        let chi = Character::lex(lattice_point(rng, dim, radius));
        s.accumulate(chi, complex_gaussian(rng));
    }
    s
}

/// Like [`spectrum`] with every key folded into the positive cone.
pub fn analytic_spectrum(rng: &mut impl Rng, dim: usize, radius: i64, terms: usize) -> Spectrum {
    let mut s = Spectrum::empty(DualGroup::ZLex(dim));
    for _ in 0..terms {
        let chi = Character::lex(lattice_point(rng, dim, radius));
        let chi = if chi.sgn_plus() < 0 { chi.negate() } else { chi };
        s.accumulate(chi, complex_gaussian(rng));
    }
    s
}

/// Spectrum on `Z^inf` with keys among the first `len` coordinates,
/// entries in `[lo, hi]`.
pub fn sparse_spectrum(rng: &mut impl Rng, len: usize, lo: i64, hi: i64, terms: usize) -> Spectrum {
    let mut s = Spectrum::empty(DualGroup::ZInfLex);
    for _ in 0..terms {
        let dense: Vec<i64> = (0..len).map(|_| rng.random_range(lo..=hi)).collect();
        s.accumulate(Character::sparse_from_dense(&dense), complex_gaussian(rng));
    }
    s
}

/// Spectrum on the rationals with numerators in `[-bound, bound]` and
/// denominators in `1..=bound`.
pub fn rational_spectrum(rng: &mut impl Rng, bound: i64, terms: usize) -> Spectrum {
    let mut s = Spectrum::empty(DualGroup::Rationals);
    for _ in 0..terms {
        let chi = Character::rational(rng.random_range(-bound..=bound), rng.random_range(1..=bound)).expect("denominator >= 1");
        s.accumulate(chi, complex_gaussian(rng));
    }
    s
}

/// Dirichlet polynomial with up to `terms` indices drawn from `1..=max_index`.
pub fn dirichlet(rng: &mut impl Rng, max_index: u64, terms: usize) -> DirichletPolynomial {
    let mut d = DirichletPolynomial::new(LIMIT).expect("default bound");
    for _ in 0..terms {
        d.add(rng.random_range(1..=max_index.min(LIMIT)), complex_gaussian(rng)).expect("index within bound");
    }
    d
}

/// Conjugate-symmetric spectrum, i.e. the coefficients of a real polynomial.
pub fn real_polynomial(rng: &mut impl Rng, dim: usize, radius: i64, terms: usize) -> Spectrum {
    let mut s = Spectrum::empty(DualGroup::ZLex(dim));
    for _ in 0..terms {
        let chi = Character::lex(lattice_point(rng, dim, radius));
        let c = complex_gaussian(rng);
        if chi.is_identity() {
            s.accumulate(chi, Complex64::new(c.re, 0.0));
        } else {
            let neg = chi.negate();
            s.accumulate(chi, c);
            s.accumulate(neg, c.conj());
        }
    }
    s
}

/// Real weights, optionally nonnegative.
pub fn real_weights(rng: &mut impl Rng, count: usize, nonnegative: bool) -> Vec<Complex64> {
    (0..count)
        .map(|_| {
            let w: f64 = rng.sample(StandardNormal);
            Complex64::new(if nonnegative { w.abs() } else { w }, 0.0)
        })
        .collect()
}

pub fn complex_weights(rng: &mut impl Rng, count: usize) -> Vec<Complex64> {
    (0..count).map(|_| complex_gaussian(rng)).collect()
}

/// Lower unitriangular matrix with strictly-lower entries in `[-bound, bound]`.
pub fn lower_unitriangular(rng: &mut impl Rng, dim: usize, bound: i64) -> IntMatrix {
    let rows = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| match j.cmp(&i) {
                    std::cmp::Ordering::Less => rng.random_range(-bound..=bound),
                    std::cmp::Ordering::Equal => 1,
                    std::cmp::Ordering::Greater => 0,
                })
                .collect()
        })
        .collect();
    IntMatrix::new(rows).expect("square by construction")
}

/// Product of a random signed permutation, a lower and an upper
/// unitriangular factor; always unimodular, generally not cone-preserving.
pub fn unimodular(rng: &mut impl Rng, dim: usize, bound: i64) -> IntMatrix {
    let lower = lower_unitriangular(rng, dim, bound);
    let upper = lower_unitriangular(rng, dim, bound).transpose();
    let mut perm: Vec<usize> = (0..dim).collect();
    for i in (1..dim).rev() {
        perm.swap(i, rng.random_range(0..=i));
    }
    let signed = (0..dim)
        .map(|i| {
            let sign = if rng.random_bool(0.5) { 1 } else { -1 };
            (0..dim).map(|j| if perm[i] == j { sign } else { 0 }).collect()
        })
        .collect();
    let p = IntMatrix::new(signed).expect("square");
    p.mul(&lower).and_then(|m| m.mul(&upper)).expect("small entries cannot overflow")
}

/// Nonnegative `u` sequence of the given length with entries in `0..=bound`.
pub fn sigma_weights(rng: &mut impl Rng, len: usize, bound: i64) -> Vec<i64> {
    (0..len).map(|_| rng.random_range(0..=bound)).collect()
}
