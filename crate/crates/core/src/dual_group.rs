//! Discrete, torsion-free, totally ordered abelian groups written additively.
//!
//! Three groups are supported: `Z^d` with the lexicographic order, the
//! finitely supported integer sequences `Z^inf` with the lexicographic order
//! (smallest differing index decides), and the rationals with the usual order.
//! The positive cone always contains the identity.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

/// Which dual group a character lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DualGroup {
    /// `Z^dim` with the lexicographic order; `dim >= 1`.
    ZLex(usize),
    /// Finitely supported integer sequences indexed from 1.
    ZInfLex,
    /// The additive rationals.
    Rationals,
}

impl DualGroup {
    pub fn z_lex(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DimMismatch { expected: 1, actual: 0 });
        }
        Ok(DualGroup::ZLex(dim))
    }

    pub fn identity(self) -> Character {
        match self {
            DualGroup::ZLex(d) => Character::Lex(vec![0; d]),
            DualGroup::ZInfLex => Character::Sparse(Vec::new()),
            DualGroup::Rationals => Character::Rational(BigRational::zero()),
        }
    }

    pub(crate) fn ensure_same(self, other: DualGroup) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GroupMismatch { left: self, right: other })
        }
    }
}

impl fmt::Display for DualGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DualGroup::ZLex(d) => write!(f, "Z^{d} (lex)"),
            DualGroup::ZInfLex => write!(f, "Z^inf (lex)"),
            DualGroup::Rationals => write!(f, "Q"),
        }
    }
}

/// An element of a dual group, always kept in canonical form.
///
/// `Sparse` stores `(index, value)` pairs with strictly increasing indices
/// starting at 1 and no zero values, so equality is structural.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Character {
    Lex(Vec<i64>),
    Sparse(Vec<(usize, i64)>),
    Rational(BigRational),
}

impl Character {
    pub fn lex(coords: impl Into<Vec<i64>>) -> Self {
        Character::Lex(coords.into())
    }

    /// Builds a sparse sequence character. Duplicate indices are summed and
    /// zero values dropped.
    pub fn sparse(pairs: impl IntoIterator<Item = (usize, i64)>) -> Result<Self> {
        let mut entries: Vec<(usize, i64)> = pairs.into_iter().collect();
        if let Some(&(idx, _)) = entries.iter().find(|(i, _)| *i == 0) {
            return Err(Error::InvalidCharacter(format!(
                "sequence index {idx} must be >= 1"
            )));
        }
        entries.sort_by_key(|&(i, _)| i);
        let mut out: Vec<(usize, i64)> = Vec::with_capacity(entries.len());
        for (i, v) in entries {
            match out.last_mut() {
                Some((j, acc)) if *j == i => *acc += v,
                _ => out.push((i, v)),
            }
        }
        out.retain(|&(_, v)| v != 0);
        Ok(Character::Sparse(out))
    }

    /// Sparse character from a dense prefix `values[0] -> index 1`, ...
    pub fn sparse_from_dense(values: &[i64]) -> Self {
        Character::Sparse(
            values
                .iter()
                .enumerate()
                .filter(|(_, &v)| v != 0)
                .map(|(i, &v)| (i + 1, v))
                .collect(),
        )
    }

    pub fn rational(numer: i64, denom: i64) -> Result<Self> {
        if denom == 0 {
            return Err(Error::InvalidCharacter("zero denominator".into()));
        }
        Ok(Character::Rational(BigRational::new(
            BigInt::from(numer),
            BigInt::from(denom),
        )))
    }

    pub fn group(&self) -> DualGroup {
        match self {
            Character::Lex(v) => DualGroup::ZLex(v.len()),
            Character::Sparse(_) => DualGroup::ZInfLex,
            Character::Rational(_) => DualGroup::Rationals,
        }
    }

    pub fn is_identity(&self) -> bool {
        match self {
            Character::Lex(v) => v.iter().all(|&x| x == 0),
            Character::Sparse(v) => v.is_empty(),
            Character::Rational(q) => q.is_zero(),
        }
    }

    /// Value at a 1-based sequence index, zero when absent.
    pub fn sparse_get(&self, index: usize) -> Option<i64> {
        match self {
            Character::Sparse(v) => Some(
                v.binary_search_by_key(&index, |&(i, _)| i)
                    .map(|p| v[p].1)
                    .unwrap_or(0),
            ),
            _ => None,
        }
    }

    /// Largest stored index of a sparse character (0 when empty).
    pub fn sparse_len(&self) -> usize {
        match self {
            Character::Sparse(v) => v.last().map_or(0, |&(i, _)| i),
            _ => 0,
        }
    }

    /// Group operation `a + b`.
    pub fn combine(&self, other: &Character) -> Result<Character> {
        self.group().ensure_same(other.group())?;
        Ok(match (self, other) {
            (Character::Lex(a), Character::Lex(b)) => {
                Character::Lex(a.iter().zip(b).map(|(x, y)| x + y).collect())
            }
            (Character::Sparse(a), Character::Sparse(b)) => {
                Character::Sparse(merge_sparse(a, b, |x, y| x + y))
            }
            (Character::Rational(a), Character::Rational(b)) => Character::Rational(a + b),
            _ => unreachable!("groups already checked"),
        })
    }

    pub fn negate(&self) -> Character {
        match self {
            Character::Lex(a) => Character::Lex(a.iter().map(|x| -x).collect()),
            Character::Sparse(a) => Character::Sparse(a.iter().map(|&(i, v)| (i, -v)).collect()),
            Character::Rational(q) => Character::Rational(-q),
        }
    }

    /// The order of the group. Fails when the characters live in different
    /// groups.
    pub fn compare(&self, other: &Character) -> Result<Ordering> {
        self.group().ensure_same(other.group())?;
        Ok(self.cmp(other))
    }

    /// Sign relative to the positive cone: 0 for the identity, +1 on the rest
    /// of the cone, -1 on the negative part.
    pub fn sgn_plus(&self) -> i8 {
        let ord = match self {
            Character::Lex(v) => v.iter().find(|&&x| x != 0).map_or(Ordering::Equal, |x| x.cmp(&0)),
            Character::Sparse(v) => v.first().map_or(Ordering::Equal, |&(_, x)| x.cmp(&0)),
            Character::Rational(q) => q.numer().sign_cmp(),
        };
        match ord {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        }
    }

    pub fn in_positive_cone(&self) -> bool {
        self.sgn_plus() >= 0
    }

    /// True when some coordinate is negative (the complement of the
    /// nonnegative orthant). Rationals have no coordinates and report `false`.
    pub fn has_negative_entry(&self) -> bool {
        match self {
            Character::Lex(v) => v.iter().any(|&x| x < 0),
            Character::Sparse(v) => v.iter().any(|&(_, x)| x < 0),
            Character::Rational(_) => false,
        }
    }

    /// Sup norm of the integer coordinates.
    pub fn max_abs_coord(&self) -> i64 {
        match self {
            Character::Lex(v) => v.iter().map(|x| x.abs()).max().unwrap_or(0),
            Character::Sparse(v) => v.iter().map(|(_, x)| x.abs()).max().unwrap_or(0),
            Character::Rational(_) => 0,
        }
    }
}

trait SignCmp {
    fn sign_cmp(&self) -> Ordering;
}

impl SignCmp for BigInt {
    fn sign_cmp(&self) -> Ordering {
        if self.is_zero() {
            Ordering::Equal
        } else if self.is_negative() {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }
}

fn merge_sparse(a: &[(usize, i64)], b: &[(usize, i64)], op: impl Fn(i64, i64) -> i64) -> Vec<(usize, i64)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let (idx, v) = match (a.get(i), b.get(j)) {
            (Some(&(ia, va)), Some(&(ib, vb))) if ia == ib => {
                i += 1;
                j += 1;
                (ia, op(va, vb))
            }
            (Some(&(ia, va)), Some(&(ib, _))) if ia < ib => {
                i += 1;
                (ia, op(va, 0))
            }
            (Some(_), Some(&(ib, vb))) => {
                j += 1;
                (ib, op(0, vb))
            }
            (Some(&(ia, va)), None) => {
                i += 1;
                (ia, op(va, 0))
            }
            (None, Some(&(ib, vb))) => {
                j += 1;
                (ib, op(0, vb))
            }
            (None, None) => unreachable!(),
        };
        if v != 0 {
            out.push((idx, v));
        }
    }
    out
}

fn cmp_sparse(a: &[(usize, i64)], b: &[(usize, i64)]) -> Ordering {
    let (mut i, mut j) = (0, 0);
    loop {
        match (a.get(i), b.get(j)) {
            (None, None) => return Ordering::Equal,
            (Some(&(_, va)), None) => return va.cmp(&0),
            (None, Some(&(_, vb))) => return 0.cmp(&vb),
            (Some(&(ia, va)), Some(&(ib, vb))) => {
                if ia == ib {
                    if va != vb {
                        return va.cmp(&vb);
                    }
                    i += 1;
                    j += 1;
                } else if ia < ib {
                    return va.cmp(&0);
                } else {
                    return 0.cmp(&vb);
                }
            }
        }
    }
}

/// Within one group this is the group order; characters from different
/// groups are ordered by group so they can share an ordered container.
impl Ord for Character {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Character::Lex(a), Character::Lex(b)) => a.len().cmp(&b.len()).then_with(|| a.cmp(b)),
            (Character::Sparse(a), Character::Sparse(b)) => cmp_sparse(a, b),
            (Character::Rational(a), Character::Rational(b)) => a.cmp(b),
            _ => self.group().cmp(&other.group()),
        }
    }
}

impl PartialOrd for Character {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Character::Lex(v) => {
                write!(f, "(")?;
                for (k, x) in v.iter().enumerate() {
                    if k > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
            Character::Sparse(v) => {
                write!(f, "{{")?;
                for (k, (i, x)) in v.iter().enumerate() {
                    if k > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{i}:{x}")?;
                }
                write!(f, "}}")
            }
            Character::Rational(q) => write!(f, "{}/{}", q.numer(), q.denom()),
        }
    }
}

/// Rudin lacunarity constant `K_E` of a finite `E` inside the cone of `Z`:
/// the largest number of elements of `E` in an interval `[c, 2c]`, `c >= 0`.
///
/// Only `Z` is accepted. The maximum is attained with `c` in `E`: shifting
/// `c` up to the next element of `E` keeps every counted element.
pub fn lacunarity_constant(set: &[Character]) -> Result<usize> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut values = Vec::with_capacity(set.len());
    for c in set {
        match c {
            Character::Lex(v) if v.len() == 1 => {
                if v[0] < 0 {
                    return Err(Error::NotInCone(c.to_string()));
                }
                values.push(v[0]);
            }
            other => return Err(Error::UnsupportedGroup(other.group())),
        }
    }
    values.sort_unstable();
    values.dedup();
    let best = values
        .iter()
        .map(|&c| {
            let hi = values.partition_point(|&x| x <= 2 * c);
            let lo = values.partition_point(|&x| x < c);
            hi - lo
        })
        .max()
        .unwrap_or(0);
    Ok(best)
}
