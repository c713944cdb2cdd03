//! Closed-form automorphism families of the dual groups.
//!
//! Every family acts exactly on canonical characters and has an exact
//! inverse. Order preservation is answered analytically for the pairs where
//! the first-nonzero-entry argument applies and by box sampling otherwise.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dual_group::{Character, DualGroup};
use crate::error::{Error, Result};

/// Square integer matrix acting on column vectors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: Vec<Vec<i64>>,
}

impl IntMatrix {
    pub fn new(rows: Vec<Vec<i64>>) -> Result<Self> {
        let d = rows.len();
        if d == 0 {
            return Err(Error::InvalidAutomorphism("matrix is empty".into()));
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != d) {
            return Err(Error::InvalidAutomorphism(format!(
                "matrix is not square: row of length {} in a {d}-row matrix",
                bad.len()
            )));
        }
        Ok(IntMatrix { rows })
    }

    pub fn identity(dim: usize) -> Self {
        let rows = (0..dim)
            .map(|i| (0..dim).map(|j| i64::from(i == j)).collect())
            .collect();
        IntMatrix { rows }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.rows[i][j]
    }

    pub fn transpose(&self) -> IntMatrix {
        let d = self.dim();
        IntMatrix {
            rows: (0..d).map(|i| (0..d).map(|j| self.rows[j][i]).collect()).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[i64]) -> Result<Vec<i64>> {
        if v.len() != self.dim() {
            return Err(Error::DimMismatch { expected: self.dim(), actual: v.len() });
        }
        self.rows
            .iter()
            .map(|row| {
                row.iter().zip(v).try_fold(0i64, |acc, (&a, &x)| {
                    a.checked_mul(x)
                        .and_then(|p| acc.checked_add(p))
                        .ok_or_else(|| Error::Overflow("applying an integer matrix".into()))
                })
            })
            .collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        let d = self.dim();
        if other.dim() != d {
            return Err(Error::DimMismatch { expected: d, actual: other.dim() });
        }
        let cols = other.transpose();
        let rows = (0..d)
            .map(|i| (0..d).map(|j| dot(&self.rows[i], &cols.rows[j])).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(IntMatrix { rows })
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> i128 {
        let d = self.dim();
        let mut m: Vec<Vec<i128>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(|&x| i128::from(x)).collect())
            .collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..d {
            if m[k][k] == 0 {
                match (k + 1..d).find(|&r| m[r][k] != 0) {
                    Some(r) => {
                        m.swap(k, r);
                        sign = -sign;
                    }
                    None => return 0,
                }
            }
            for i in k + 1..d {
                for j in k + 1..d {
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
                }
                m[i][k] = 0;
            }
            prev = m[k][k];
        }
        sign * m[d - 1][d - 1]
    }

    fn minor(&self, skip_row: usize, skip_col: usize) -> IntMatrix {
        IntMatrix {
            rows: self
                .rows
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != skip_row)
                .map(|(_, r)| {
                    r.iter()
                        .enumerate()
                        .filter(|(j, _)| *j != skip_col)
                        .map(|(_, &x)| x)
                        .collect()
                })
                .collect(),
        }
    }

    /// Integer inverse of a unimodular matrix via the adjugate.
    pub fn inverse_unimodular(&self) -> Result<IntMatrix> {
        let det = self.determinant();
        if det.abs() != 1 {
            return Err(Error::InvalidAutomorphism(format!(
                "matrix determinant is {det}, expected +1 or -1"
            )));
        }
        let d = self.dim();
        if d == 1 {
            return Ok(IntMatrix { rows: vec![vec![self.rows[0][0]]] });
        }
        let mut rows = vec![vec![0i64; d]; d];
        for (i, row) in rows.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                // inverse[i][j] = cofactor(j, i) / det
                let cof = self.minor(j, i).determinant();
                let signed = if (i + j) % 2 == 0 { cof } else { -cof };
                *cell = i64::try_from(signed * det)
                    .map_err(|_| Error::Overflow("inverting a unimodular matrix".into()))?;
            }
        }
        Ok(IntMatrix { rows })
    }

    pub fn is_lower_unitriangular(&self) -> bool {
        let d = self.dim();
        (0..d).all(|i| self.rows[i][i] == 1 && (i + 1..d).all(|j| self.rows[i][j] == 0))
    }
}

fn dot(a: &[i64], b: &[i64]) -> Result<i64> {
    a.iter().zip(b).try_fold(0i64, |acc, (&x, &y)| {
        x.checked_mul(y)
            .and_then(|p| acc.checked_add(p))
            .ok_or_else(|| Error::Overflow("multiplying integer matrices".into()))
    })
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.rows)
    }
}

/// An automorphism of a dual group, tagged by family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Automorphism {
    /// `n -> M n` on `Z^d` with `|det M| = 1`.
    UnimodMatrix(IntMatrix),
    /// `n -> M n` with `M` unit lower triangular.
    LowerUnitriangular(IntMatrix),
    /// `beta_k = alpha_k + c_k alpha_{k-1}` on `Z^inf`, `c_k` stored for `k >= 2`.
    /// `inverted` selects the inverse map, which is not two-diagonal itself.
    TwoDiagonal { entries: BTreeMap<usize, i64>, inverted: bool },
    /// `sigma_u(alpha)_k = alpha_k - u_{k-1} alpha_{k-1}` with `u >= 0`.
    /// `u[0]` is `u_1`; trailing zeros are trimmed.
    SigmaU { u: Vec<i64>, inverted: bool },
    /// `x -> q x` on the rationals, `q > 0`.
    RationalScale(BigRational),
    /// `n_i -> s_i n_i` with `s_i` in {-1, +1}.
    CoordinateFlip(Vec<i8>),
}

impl Automorphism {
    pub fn unimod_matrix(rows: Vec<Vec<i64>>) -> Result<Self> {
        let m = IntMatrix::new(rows)?;
        let det = m.determinant();
        if det.abs() != 1 {
            return Err(Error::InvalidAutomorphism(format!(
                "matrix {m} has determinant {det}, expected +1 or -1"
            )));
        }
        Ok(Automorphism::UnimodMatrix(m))
    }

    /// Unit lower triangular matrix from 1-based subdiagonal entries
    /// `(i, j, u_ij)` with `i > j`.
    pub fn lower_unitriangular(dim: usize, entries: &[(usize, usize, i64)]) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidAutomorphism("dimension must be >= 1".into()));
        }
        let mut m = IntMatrix::identity(dim);
        for &(i, j, v) in entries {
            if !(1..=dim).contains(&i) || j == 0 || j >= i {
                return Err(Error::InvalidAutomorphism(format!(
                    "entry ({i},{j}) is not strictly below the diagonal of a {dim}x{dim} matrix"
                )));
            }
            m.rows[i - 1][j - 1] = v;
        }
        Ok(Automorphism::LowerUnitriangular(m))
    }

    pub fn lower_unitriangular_from_matrix(rows: Vec<Vec<i64>>) -> Result<Self> {
        let m = IntMatrix::new(rows)?;
        if !m.is_lower_unitriangular() {
            return Err(Error::InvalidAutomorphism(format!("matrix {m} is not unit lower triangular")));
        }
        Ok(Automorphism::LowerUnitriangular(m))
    }

    /// Two-diagonal map from `(k, u_{k,k-1})` pairs, `k >= 2`.
    pub fn two_diagonal(entries: impl IntoIterator<Item = (usize, i64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (k, v) in entries {
            if k < 2 {
                return Err(Error::InvalidAutomorphism(format!(
                    "two-diagonal entry index {k} must be >= 2"
                )));
            }
            if v != 0 {
                map.insert(k, v);
            }
        }
        Ok(Automorphism::TwoDiagonal { entries: map, inverted: false })
    }

    pub fn sigma_u(u: Vec<i64>) -> Result<Self> {
        if let Some(bad) = u.iter().find(|&&x| x < 0) {
            return Err(Error::InvalidAutomorphism(format!("sigma_u entry {bad} is negative")));
        }
        let mut u = u;
        while u.last() == Some(&0) {
            u.pop();
        }
        Ok(Automorphism::SigmaU { u, inverted: false })
    }

    pub fn rational_scale(numer: i64, denom: i64) -> Result<Self> {
        if denom == 0 {
            return Err(Error::InvalidAutomorphism("zero denominator".into()));
        }
        Self::rational_scale_big(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn rational_scale_big(q: BigRational) -> Result<Self> {
        if !q.is_positive() {
            return Err(Error::InvalidAutomorphism(format!(
                "scale factor {}/{} must be positive",
                q.numer(),
                q.denom()
            )));
        }
        Ok(Automorphism::RationalScale(q))
    }

    pub fn coordinate_flip(signs: Vec<i8>) -> Result<Self> {
        if signs.is_empty() {
            return Err(Error::InvalidAutomorphism("flip needs at least one coordinate".into()));
        }
        if let Some(bad) = signs.iter().find(|&&s| s != 1 && s != -1) {
            return Err(Error::InvalidAutomorphism(format!("flip sign {bad} is not +1 or -1")));
        }
        Ok(Automorphism::CoordinateFlip(signs))
    }

    pub fn identity(group: DualGroup) -> Self {
        match group {
            DualGroup::ZLex(d) => Automorphism::LowerUnitriangular(IntMatrix::identity(d)),
            DualGroup::ZInfLex => Automorphism::TwoDiagonal { entries: BTreeMap::new(), inverted: false },
            DualGroup::Rationals => Automorphism::RationalScale(BigRational::one()),
        }
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            Automorphism::UnimodMatrix(_) => "unimod_matrix",
            Automorphism::LowerUnitriangular(_) => "lower_unitriangular",
            Automorphism::TwoDiagonal { .. } => "two_diagonal",
            Automorphism::SigmaU { .. } => "sigma_u",
            Automorphism::RationalScale(_) => "rational_scale",
            Automorphism::CoordinateFlip(_) => "coordinate_flip",
        }
    }

    /// Checks that this automorphism acts on `group`.
    pub fn check_group(&self, group: DualGroup) -> Result<()> {
        let ok = match (self, group) {
            (Automorphism::UnimodMatrix(m) | Automorphism::LowerUnitriangular(m), DualGroup::ZLex(d)) => {
                m.dim() == d
            }
            (Automorphism::CoordinateFlip(s), DualGroup::ZLex(d)) => s.len() == d,
            (Automorphism::TwoDiagonal { .. } | Automorphism::SigmaU { .. }, DualGroup::ZInfLex) => true,
            (Automorphism::RationalScale(_), DualGroup::Rationals) => true,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::FamilyMismatch { family: self.family_name(), group })
        }
    }

    /// Matrix form of the `Z^d` families.
    pub fn as_matrix(&self) -> Option<IntMatrix> {
        match self {
            Automorphism::UnimodMatrix(m) | Automorphism::LowerUnitriangular(m) => Some(m.clone()),
            Automorphism::CoordinateFlip(s) => {
                let mut m = IntMatrix::identity(s.len());
                for (i, &si) in s.iter().enumerate() {
                    m.rows[i][i] = i64::from(si);
                }
                Some(m)
            }
            _ => None,
        }
    }

    pub fn apply(&self, chi: &Character) -> Result<Character> {
        self.check_group(chi.group())?;
        match (self, chi) {
            (Automorphism::UnimodMatrix(m) | Automorphism::LowerUnitriangular(m), Character::Lex(v)) => {
                Ok(Character::Lex(m.mul_vec(v)?))
            }
            (Automorphism::CoordinateFlip(s), Character::Lex(v)) => Ok(Character::Lex(
                v.iter().zip(s).map(|(&x, &si)| x * i64::from(si)).collect(),
            )),
            (Automorphism::TwoDiagonal { entries, inverted }, Character::Sparse(_)) => {
                let coeff = |k: usize| entries.get(&k).copied().unwrap_or(0);
                let reach = entries.keys().next_back().copied().unwrap_or(0);
                bidiagonal(chi, reach, coeff, *inverted)
            }
            (Automorphism::SigmaU { u, inverted }, Character::Sparse(_)) => {
                // c_k = -u_{k-1}, nonzero only for k <= u.len() + 1
                let coeff = |k: usize| if k >= 2 { u.get(k - 2).map_or(0, |&x| -x) } else { 0 };
                bidiagonal(chi, u.len() + 1, coeff, *inverted)
            }
            (Automorphism::RationalScale(q), Character::Rational(x)) => Ok(Character::Rational(q * x)),
            _ => unreachable!("group compatibility already checked"),
        }
    }

    pub fn invert(&self) -> Automorphism {
        match self {
            Automorphism::UnimodMatrix(m) => Automorphism::UnimodMatrix(
                m.inverse_unimodular().expect("unimodular by construction"),
            ),
            Automorphism::LowerUnitriangular(m) => Automorphism::LowerUnitriangular(
                m.inverse_unimodular().expect("unit triangular by construction"),
            ),
            Automorphism::TwoDiagonal { entries, inverted } => {
                Automorphism::TwoDiagonal { entries: entries.clone(), inverted: !inverted }
            }
            Automorphism::SigmaU { u, inverted } => Automorphism::SigmaU { u: u.clone(), inverted: !inverted },
            Automorphism::RationalScale(q) => Automorphism::RationalScale(q.recip()),
            Automorphism::CoordinateFlip(s) => Automorphism::CoordinateFlip(s.clone()),
        }
    }

    /// `self ∘ other` for the matrix families (`other` acts first).
    pub fn compose(&self, other: &Automorphism) -> Result<Automorphism> {
        match (self.as_matrix(), other.as_matrix()) {
            (Some(a), Some(b)) => Ok(Automorphism::UnimodMatrix(a.mul(&b)?)),
            _ => Err(Error::InvalidAutomorphism(format!(
                "composition is only defined for matrix families, got {} and {}",
                self.family_name(),
                other.family_name()
            ))),
        }
    }

    /// Whether the automorphism maps `set` into itself.
    pub fn preserves(&self, set: TargetSet, sampling: &Sampling) -> Result<Verdict> {
        let group = self.natural_group();
        if set == TargetSet::OrthantComplement && group == DualGroup::Rationals {
            return Err(Error::UnsupportedGroup(group));
        }
        let analytic = matches!(
            (self, set),
            (
                Automorphism::LowerUnitriangular(_)
                    | Automorphism::TwoDiagonal { .. }
                    | Automorphism::SigmaU { .. }
                    | Automorphism::RationalScale(_),
                TargetSet::LexCone
            ) | (Automorphism::SigmaU { inverted: false, .. }, TargetSet::OrthantComplement)
        );
        if analytic {
            return Ok(Verdict::AnalyticTrue);
        }
        let mut checked = 0usize;
        for chi in sample_domain(group, self.sequence_reach(), sampling) {
            if !set.contains(&chi) {
                continue;
            }
            checked += 1;
            if !set.contains(&self.apply(&chi)?) {
                return Ok(Verdict::FalseWitness(chi));
            }
        }
        Ok(Verdict::SampledTrue { checked })
    }

    /// The group this automorphism acts on.
    pub fn natural_group(&self) -> DualGroup {
        match self {
            Automorphism::UnimodMatrix(m) | Automorphism::LowerUnitriangular(m) => DualGroup::ZLex(m.dim()),
            Automorphism::CoordinateFlip(s) => DualGroup::ZLex(s.len()),
            Automorphism::TwoDiagonal { .. } | Automorphism::SigmaU { .. } => DualGroup::ZInfLex,
            Automorphism::RationalScale(_) => DualGroup::Rationals,
        }
    }

    /// Number of leading sequence coordinates that the map couples.
    fn sequence_reach(&self) -> usize {
        match self {
            Automorphism::TwoDiagonal { entries, .. } => entries.keys().next_back().copied().unwrap_or(1).max(2),
            Automorphism::SigmaU { u, .. } => (u.len() + 1).max(2),
            _ => 0,
        }
    }
}

fn bidiagonal(chi: &Character, reach: usize, coeff: impl Fn(usize) -> i64, inverted: bool) -> Result<Character> {
    let len = chi.sparse_len().max(reach) + 1;
    let alpha: Vec<i64> = (1..=len).map(|k| chi.sparse_get(k).unwrap_or(0)).collect();
    let overflow = || Error::Overflow("applying a two-diagonal map".into());
    let mut out = vec![0i64; len];
    for k in 0..len {
        let c = if k == 0 { 0 } else { coeff(k + 1) };
        let prev = if k == 0 {
            0
        } else if inverted {
            out[k - 1]
        } else {
            alpha[k - 1]
        };
        // forward: beta_k = alpha_k + c_k alpha_{k-1}; inverse: alpha_k = beta_k - c_k alpha_{k-1}
        let term = c.checked_mul(prev).ok_or_else(overflow)?;
        out[k] = if inverted {
            alpha[k].checked_sub(term)
        } else {
            alpha[k].checked_add(term)
        }
        .ok_or_else(overflow)?;
    }
    Ok(Character::sparse_from_dense(&out))
}

impl fmt::Display for Automorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Automorphism::UnimodMatrix(m) => write!(f, "unimod_matrix{m}"),
            Automorphism::LowerUnitriangular(m) => write!(f, "lower_unitriangular{m}"),
            Automorphism::TwoDiagonal { entries, inverted } => {
                write!(f, "two_diagonal{entries:?}{}", if *inverted { "^-1" } else { "" })
            }
            Automorphism::SigmaU { u, inverted } => {
                write!(f, "sigma_u{u:?}{}", if *inverted { "^-1" } else { "" })
            }
            Automorphism::RationalScale(q) => write!(f, "scale({}/{})", q.numer(), q.denom()),
            Automorphism::CoordinateFlip(s) => write!(f, "flip{s:?}"),
        }
    }
}

/// Sets whose invariance under an automorphism can be queried.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TargetSet {
    /// The positive cone `X_+` (identity included).
    LexCone,
    /// Integer vectors or sequences with at least one negative entry.
    OrthantComplement,
}

impl TargetSet {
    pub fn contains(self, chi: &Character) -> bool {
        match self {
            TargetSet::LexCone => chi.in_positive_cone(),
            TargetSet::OrthantComplement => chi.has_negative_entry(),
        }
    }
}

/// Box-sampling budget used when no analytic verdict is available.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sampling {
    pub radius: i64,
    pub budget: usize,
    pub seed: u64,
}

impl Sampling {
    pub fn new(radius: i64, budget: usize) -> Result<Self> {
        if radius < 1 || budget < 1 {
            return Err(Error::InvalidAutomorphism(format!(
                "sampling needs radius >= 1 and budget >= 1, got radius {radius}, budget {budget}"
            )));
        }
        Ok(Sampling { radius, budget, seed: 0 })
    }
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling { radius: 3, budget: 20_000, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// Proven by the first-nonzero-entry argument or positivity of the scale.
    AnalyticTrue,
    /// No counterexample among `checked` members of the set.
    SampledTrue { checked: usize },
    /// A member of the set whose image escapes it.
    FalseWitness(Character),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        !matches!(self, Verdict::FalseWitness(_))
    }
}

/// Candidate characters of the sampling box, smallest sup-norm shells first.
/// The whole box is enumerated when it fits the budget; otherwise `budget`
/// seeded random points are drawn.
fn sample_domain(group: DualGroup, reach: usize, sampling: &Sampling) -> Vec<Character> {
    let r = sampling.radius.max(1);
    let dims = match group {
        DualGroup::ZLex(d) => d,
        DualGroup::ZInfLex => reach,
        DualGroup::Rationals => {
            let mut seen = std::collections::BTreeSet::new();
            let mut out = Vec::new();
            for shell in 1..=r {
                for num in -shell..=shell {
                    for den in 1..=shell {
                        if num.abs().max(den) != shell {
                            continue;
                        }
                        let q = BigRational::new(num.into(), den.into());
                        if seen.insert(q.clone()) {
                            out.push(Character::Rational(q));
                        }
                    }
                }
            }
            out.truncate(sampling.budget);
            return out;
        }
    };
    let wrap = |v: &[i64]| match group {
        DualGroup::ZLex(_) => Character::Lex(v.to_vec()),
        _ => Character::sparse_from_dense(v),
    };
    let side = (2 * r + 1) as f64;
    if side.powi(dims as i32) <= sampling.budget as f64 {
        let mut out = Vec::new();
        for shell in 0..=r {
            enumerate_shell(dims, shell, &mut |v| out.push(wrap(v)));
        }
        out
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(sampling.seed);
        (0..sampling.budget)
            .map(|_| {
                let v: Vec<i64> = (0..dims).map(|_| rng.random_range(-r..=r)).collect();
                wrap(&v)
            })
            .collect()
    }
}

/// Calls `f` on every vector of `[-shell, shell]^dims` with sup norm exactly
/// `shell`, in lexicographic order.
fn enumerate_shell(dims: usize, shell: i64, f: &mut impl FnMut(&[i64])) {
    let mut v = vec![-shell; dims];
    loop {
        if v.iter().map(|x| x.abs()).max().unwrap_or(0) == shell {
            f(&v);
        }
        let mut k = dims;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            if v[k] < shell {
                v[k] += 1;
                for x in &mut v[k + 1..] {
                    *x = -shell;
                }
                break;
            }
        }
    }
}
