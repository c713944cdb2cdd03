//! Finitely supported Fourier coefficient functions.
//!
//! Characters are exact; coefficients are `Complex64`. Coefficients that
//! become exactly zero are dropped, nothing else is pruned. Terms are kept in
//! group order, which fixes the summation order of every reduction.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::dual_group::{Character, DualGroup};
use crate::error::Result;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    group: DualGroup,
    terms: BTreeMap<Character, Complex64>,
}

/// Which Riesz projection to take.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Part {
    /// Characters in the positive cone, identity included.
    Plus,
    /// Characters in the negative cone.
    Minus,
}

/// Outcome of a support check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Support {
    Inside,
    Leak(Character),
}

impl Support {
    pub fn is_inside(&self) -> bool {
        matches!(self, Support::Inside)
    }
}

impl Spectrum {
    pub fn empty(group: DualGroup) -> Self {
        Spectrum { group, terms: BTreeMap::new() }
    }

    /// Sums duplicate characters and drops exact zeros.
    pub fn from_terms(group: DualGroup, terms: impl IntoIterator<Item = (Character, Complex64)>) -> Result<Self> {
        let mut s = Spectrum::empty(group);
        for (chi, c) in terms {
            s.add_term(chi, c)?;
        }
        Ok(s)
    }

    pub fn delta(chi: Character, coeff: Complex64) -> Self {
        let group = chi.group();
        let mut s = Spectrum::empty(group);
        s.add_term(chi, coeff).expect("group taken from the character");
        s
    }

    pub fn add_term(&mut self, chi: Character, coeff: Complex64) -> Result<()> {
        self.group.ensure_same(chi.group())?;
        self.accumulate(chi, coeff);
        Ok(())
    }

    pub(crate) fn accumulate(&mut self, chi: Character, coeff: Complex64) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(chi) {
            Entry::Vacant(v) => {
                if coeff != ZERO {
                    v.insert(coeff);
                }
            }
            Entry::Occupied(mut o) => {
                let sum = *o.get() + coeff;
                if sum == ZERO {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn group(&self) -> DualGroup {
        self.group
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, chi: &Character) -> Complex64 {
        self.terms.get(chi).copied().unwrap_or(ZERO)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Character, &Complex64)> {
        self.terms.iter()
    }

    pub fn characters(&self) -> impl Iterator<Item = &Character> {
        self.terms.keys()
    }

    pub fn add(&self, other: &Spectrum) -> Result<Spectrum> {
        self.group.ensure_same(other.group)?;
        let mut out = self.clone();
        for (chi, &c) in &other.terms {
            out.accumulate(chi.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Spectrum) -> Result<Spectrum> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, factor: Complex64) -> Spectrum {
        let terms = self
            .terms
            .iter()
            .map(|(chi, &c)| (chi.clone(), c * factor))
            .filter(|(_, c)| *c != ZERO)
            .collect();
        Spectrum { group: self.group, terms }
    }

    /// Coefficientwise map, dropping exact zeros.
    pub fn map_coefficients(&self, f: impl Fn(&Character, Complex64) -> Complex64) -> Spectrum {
        let terms = self
            .terms
            .iter()
            .map(|(chi, &c)| (chi.clone(), f(chi, c)))
            .filter(|(_, c)| *c != ZERO)
            .collect();
        Spectrum { group: self.group, terms }
    }

    pub fn project(&self, part: Part) -> Spectrum {
        let keep = |chi: &Character| match part {
            Part::Plus => chi.sgn_plus() >= 0,
            Part::Minus => chi.sgn_plus() < 0,
        };
        let terms = self
            .terms
            .iter()
            .filter(|(chi, _)| keep(chi))
            .map(|(chi, &c)| (chi.clone(), c))
            .collect();
        Spectrum { group: self.group, terms }
    }

    /// Conjugate function: multiplies each coefficient by `-i sgn_plus`.
    pub fn hilbert(&self) -> Spectrum {
        self.map_coefficients(|chi, c| match chi.sgn_plus() {
            1 => Complex64::new(c.im, -c.re),
            -1 => Complex64::new(-c.im, c.re),
            _ => ZERO,
        })
    }

    /// `sum a(chi) conj(b(chi))`, the `L^2` inner product by Parseval.
    pub fn pairing(&self, other: &Spectrum) -> Result<Complex64> {
        self.group.ensure_same(other.group)?;
        Ok(self
            .terms
            .iter()
            .filter_map(|(chi, &a)| other.terms.get(chi).map(|&b| a * b.conj()))
            .fold(ZERO, |acc, x| acc + x))
    }

    pub fn l2_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `sum |coefficients|`, an upper bound for the sup norm.
    pub fn l1_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_supported_in(&self, set: impl Fn(&Character) -> bool) -> Support {
        match self.terms.keys().find(|chi| !set(chi)) {
            Some(chi) => Support::Leak(chi.clone()),
            None => Support::Inside,
        }
    }

    /// Largest coefficient difference over the union of supports.
    pub fn max_abs_diff(&self, other: &Spectrum) -> Result<f64> {
        self.group.ensure_same(other.group)?;
        let mut worst: f64 = 0.0;
        for (chi, &a) in &self.terms {
            worst = worst.max((a - other.get(chi)).norm());
        }
        for (chi, &b) in &other.terms {
            if !self.terms.contains_key(chi) {
                worst = worst.max(b.norm());
            }
        }
        Ok(worst)
    }

    /// The identity-character part of the spectrum.
    pub fn constant_term(&self) -> Complex64 {
        self.get(&self.group.identity())
    }
}
