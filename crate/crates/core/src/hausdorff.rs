//! Discrete Hausdorff operators acting on spectra.
//!
//! An operator is a finite list of `(weight, B)` where `B` is the dual-side
//! automorphism evaluated inside the coefficient function:
//!
//! ```text
//! (H s)(chi) = sum_u weight_u * s(B_u chi)
//! ```
//!
//! For a spatial action `A(z) = z^M` on the torus the dual side map is
//! `B = (M^T)^{-1}`, because `chi_n ∘ A = chi_{M^T n}`. The modular function
//! of an automorphism of a compact group is identically 1, so it never
//! appears in the weights.

use num_complex::Complex64;

use crate::automorphism::{Automorphism, IntMatrix, Sampling, TargetSet, Verdict};
use crate::dual_group::{Character, DualGroup};
use crate::error::{Error, Result};
use crate::spectrum::{Spectrum, Support};
use crate::torus::TorusPoint;

/// How the dual-side map of a term was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Dual,
    FromSpatial,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub weight: Complex64,
    pub map: Automorphism,
    pub provenance: Provenance,
}

impl Term {
    pub fn dual(weight: Complex64, map: Automorphism) -> Self {
        Term { weight, map, provenance: Provenance::Dual }
    }

    /// Term for the spatial torus action `z -> z^M`.
    pub fn from_spatial_matrix(weight: Complex64, spatial: &IntMatrix) -> Result<Self> {
        let dual = spatial.transpose().inverse_unimodular()?;
        let map = if dual.is_lower_unitriangular() {
            Automorphism::LowerUnitriangular(dual)
        } else {
            Automorphism::UnimodMatrix(dual)
        };
        Ok(Term { weight, map, provenance: Provenance::FromSpatial })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HausdorffOperator {
    group: DualGroup,
    terms: Vec<Term>,
}

impl HausdorffOperator {
    pub fn new(group: DualGroup, terms: Vec<Term>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::EmptyOperator);
        }
        for t in &terms {
            t.map.check_group(group)?;
        }
        Ok(HausdorffOperator { group, terms })
    }

    /// Operator from dual-side maps.
    pub fn from_dual(group: DualGroup, terms: impl IntoIterator<Item = (Complex64, Automorphism)>) -> Result<Self> {
        Self::new(group, terms.into_iter().map(|(w, b)| Term::dual(w, b)).collect())
    }

    /// Operator from spatial torus matrices `z -> z^M`.
    pub fn from_spatial_matrices(dim: usize, terms: &[(Complex64, IntMatrix)]) -> Result<Self> {
        let group = DualGroup::z_lex(dim)?;
        let terms = terms
            .iter()
            .map(|(w, m)| Term::from_spatial_matrix(*w, m))
            .collect::<Result<Vec<_>>>()?;
        Self::new(group, terms)
    }

    /// The zero operator.
    pub fn zero(group: DualGroup) -> Self {
        HausdorffOperator { group, terms: Vec::new() }
    }

    pub fn group(&self) -> DualGroup {
        self.group
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn apply(&self, s: &Spectrum) -> Result<Spectrum> {
        self.group.ensure_same(s.group())?;
        let mut out = Spectrum::empty(self.group);
        // (H s)(chi) = sum_u w_u s(B_u chi): each input term xi lands on B_u^{-1} xi.
        for term in &self.terms {
            let pull = term.map.invert();
            for (xi, &c) in s.iter() {
                out.accumulate(pull.apply(xi)?, term.weight * c);
            }
        }
        Ok(out)
    }

    /// `sum |weight|`, the norm bound shared by every space considered here.
    pub fn phi_l1(&self) -> f64 {
        self.terms.iter().map(|t| t.weight.norm()).sum()
    }

    /// `(w, B) -> (conj w, B^{-1})`, the adjoint for the `L^2` pairing.
    pub fn adjoint(&self) -> HausdorffOperator {
        HausdorffOperator {
            group: self.group,
            terms: self
                .terms
                .iter()
                .map(|t| Term { weight: t.weight.conj(), map: t.map.invert(), provenance: t.provenance })
                .collect(),
        }
    }

    /// Verdict for every dual map; the first failing map's witness wins.
    pub fn preserves(&self, set: TargetSet, sampling: &Sampling) -> Result<Verdict> {
        let mut checked = 0;
        let mut all_analytic = true;
        for t in &self.terms {
            match t.map.preserves(set, sampling)? {
                Verdict::AnalyticTrue => {}
                Verdict::SampledTrue { checked: n } => {
                    all_analytic = false;
                    checked += n;
                }
                witness @ Verdict::FalseWitness(_) => return Ok(witness),
            }
        }
        Ok(if all_analytic { Verdict::AnalyticTrue } else { Verdict::SampledTrue { checked } })
    }

    /// A character `chi` in the positive cone whose image `H delta_chi`
    /// leaves the cone, searched through the inverse maps term by term.
    pub fn cone_leak(&self, sampling: &Sampling) -> Result<Option<(Character, Character)>> {
        for t in &self.terms {
            if let Verdict::FalseWitness(chi) = t.map.invert().preserves(TargetSet::LexCone, sampling)? {
                let image = self.apply(&Spectrum::delta(chi.clone(), Complex64::new(1.0, 0.0)))?;
                if let Support::Leak(out) = image.is_supported_in(Character::in_positive_cone) {
                    return Ok(Some((chi, out)));
                }
            }
        }
        Ok(None)
    }
}

/// Delsarte generalized shift: modulation by `h` followed by the uniform
/// average over a finite automorphism group.
///
/// `family` holds the dual actions `A_u^*` of the group members; the average
/// uses `B_u = (A_u^*)^{-1}`. The family must be closed under inversion.
pub fn delsarte_shift(family: &[Automorphism], h: &TorusPoint, s: &Spectrum) -> Result<Spectrum> {
    let dim = match s.group() {
        DualGroup::ZLex(d) => d,
        other => return Err(Error::UnsupportedGroup(other)),
    };
    if h.dim() != dim {
        return Err(Error::DimMismatch { expected: dim, actual: h.dim() });
    }
    if family.is_empty() {
        return Err(Error::EmptyOperator);
    }
    let mats = family
        .iter()
        .map(|a| {
            a.check_group(s.group())?;
            Ok(a.as_matrix().expect("Z^d families have matrix forms"))
        })
        .collect::<Result<Vec<_>>>()?;
    for (k, m) in mats.iter().enumerate() {
        let inv = m.inverse_unimodular()?;
        if !mats.contains(&inv) {
            return Err(Error::NotClosed(k));
        }
    }
    let modulated = s.map_coefficients(|chi, c| match chi {
        Character::Lex(n) => {
            let phase: f64 = n.iter().zip(h.angles()).map(|(&ni, &hi)| ni as f64 * hi).sum();
            c * Complex64::from_polar(1.0, std::f64::consts::TAU * phase)
        }
        _ => unreachable!("group checked above"),
    });
    let weight = Complex64::new(1.0 / family.len() as f64, 0.0);
    let op = HausdorffOperator::from_dual(s.group(), family.iter().map(|a| (weight, a.invert())))?;
    op.apply(&modulated)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn z(v: &[i64]) -> Character {
        Character::lex(v.to_vec())
    }

    #[test]
    fn apply_pulls_support_back() {
        let b2 = Automorphism::lower_unitriangular(2, &[(2, 1, 1)]).unwrap();
        let h = HausdorffOperator::from_dual(
            DualGroup::ZLex(2),
            [(c(0.5, 0.0), Automorphism::identity(DualGroup::ZLex(2))), (c(0.5, 0.0), b2)],
        )
        .unwrap();
        let out = h.apply(&Spectrum::delta(z(&[1, 0]), c(1.0, 0.0))).unwrap();
        let want =
            Spectrum::from_terms(DualGroup::ZLex(2), [(z(&[1, 0]), c(0.5, 0.0)), (z(&[1, -1]), c(0.5, 0.0))]).unwrap();
        assert_eq!(out, want);
        assert!(h.apply(&Spectrum::empty(DualGroup::ZLex(2))).unwrap().is_empty());
    }

    #[test]
    fn constants_are_eigenvectors() {
        let b = Automorphism::lower_unitriangular(2, &[(2, 1, 5)]).unwrap();
        let h = HausdorffOperator::from_dual(
            DualGroup::ZLex(2),
            [(c(0.3, 0.0), b.clone()), (c(0.7, 0.0), b.invert())],
        )
        .unwrap();
        let one = Spectrum::delta(z(&[0, 0]), c(1.0, 0.0));
        assert_eq!(h.apply(&one).unwrap(), one.scale(c(h.phi_l1(), 0.0)));
        assert_eq!(h.phi_l1(), 1.0);
    }

    #[test]
    fn phi_l1_examples() {
        let id = Automorphism::identity(DualGroup::ZLex(1));
        let h = |w: Vec<Complex64>| {
            HausdorffOperator::from_dual(DualGroup::ZLex(1), w.into_iter().map(|x| (x, id.clone()))).unwrap()
        };
        assert_eq!(h(vec![c(0.5, 0.0), c(0.5, 0.0)]).phi_l1(), 1.0);
        assert_eq!(h(vec![c(-1.0, 0.0), c(0.0, 2.0)]).phi_l1(), 3.0);
    }

    #[test]
    fn construction_errors() {
        assert_eq!(HausdorffOperator::new(DualGroup::ZLex(2), vec![]), Err(Error::EmptyOperator));
        let seq = Automorphism::sigma_u(vec![1]).unwrap();
        assert!(matches!(
            HausdorffOperator::from_dual(DualGroup::ZLex(2), [(c(1.0, 0.0), seq)]),
            Err(Error::FamilyMismatch { .. })
        ));
        let h = HausdorffOperator::from_dual(DualGroup::ZLex(1), [(c(1.0, 0.0), Automorphism::identity(DualGroup::ZLex(1)))])
            .unwrap();
        assert!(matches!(
            h.apply(&Spectrum::delta(z(&[1, 1]), c(1.0, 0.0))),
            Err(Error::GroupMismatch { .. })
        ));
        assert!(HausdorffOperator::zero(DualGroup::ZInfLex).apply(&Spectrum::empty(DualGroup::ZInfLex)).unwrap().is_empty());
    }

    #[test]
    fn spatial_constructor_uses_inverse_transpose() {
        let m = IntMatrix::new(vec![vec![1, 0], vec![1, 1]]).unwrap();
        let t = Term::from_spatial_matrix(c(1.0, 0.0), &m).unwrap();
        assert_eq!(t.provenance, Provenance::FromSpatial);
        // (M^T)^{-1} = [[1,-1],[0,1]] is upper triangular, so stays a generic matrix
        assert_eq!(t.map, Automorphism::UnimodMatrix(IntMatrix::new(vec![vec![1, -1], vec![0, 1]]).unwrap()));
        // delta at n is carried to M^T n
        let h = HausdorffOperator::from_spatial_matrices(2, &[(c(1.0, 0.0), m)]).unwrap();
        let out = h.apply(&Spectrum::delta(z(&[0, 1]), c(1.0, 0.0))).unwrap();
        assert_eq!(out, Spectrum::delta(z(&[1, 1]), c(1.0, 0.0)));
        let upper = IntMatrix::new(vec![vec![1, 2], vec![0, 1]]).unwrap();
        let tu = Term::from_spatial_matrix(c(1.0, 0.0), &upper).unwrap();
        assert!(matches!(tu.map, Automorphism::LowerUnitriangular(_)));
        assert!(Term::from_spatial_matrix(c(1.0, 0.0), &IntMatrix::new(vec![vec![2]]).unwrap()).is_err());
    }

    #[test]
    fn adjoint_examples() {
        let b = Automorphism::lower_unitriangular(2, &[(2, 1, 3)]).unwrap();
        let h = HausdorffOperator::from_dual(DualGroup::ZLex(2), [(c(1.0, 0.0), b.clone())]).unwrap();
        let adj = h.adjoint();
        assert_eq!(adj.terms()[0].map, b.invert());
        let chi = z(&[2, -1]);
        // H delta_chi sits at B^{-1} chi, so that is where the pairing is tested.
        let b_chi = b.invert().apply(&chi).unwrap();
        let lhs = adj.apply(&Spectrum::delta(b_chi.clone(), c(1.0, 0.0))).unwrap().pairing(&Spectrum::delta(chi.clone(), c(1.0, 0.0))).unwrap();
        let rhs = Spectrum::delta(b_chi, c(1.0, 0.0)).pairing(&h.apply(&Spectrum::delta(chi, c(1.0, 0.0))).unwrap()).unwrap();
        assert_eq!(lhs, c(1.0, 0.0));
        assert_eq!(rhs, c(1.0, 0.0));
        let id = HausdorffOperator::from_dual(DualGroup::ZLex(2), [(c(1.0, 0.0), Automorphism::identity(DualGroup::ZLex(2)))]).unwrap();
        assert_eq!(id.adjoint(), id);
    }

    #[test]
    fn delsarte_examples() {
        let flip = Automorphism::coordinate_flip(vec![-1]).unwrap();
        let id = Automorphism::identity(DualGroup::ZLex(1));
        let family = [id.clone(), flip];
        let theta = 0.137;
        let h = TorusPoint::new(vec![theta]).unwrap();
        let out = delsarte_shift(&family, &h, &Spectrum::delta(z(&[1]), c(1.0, 0.0))).unwrap();
        let e = Complex64::from_polar(1.0, std::f64::consts::TAU * theta) * 0.5;
        assert!((out.get(&z(&[1])) - e).norm() < 1e-15);
        assert!((out.get(&z(&[-1])) - e).norm() < 1e-15);
        assert_eq!(out.len(), 2);

        let one = Spectrum::delta(z(&[0]), c(1.0, 0.0));
        assert_eq!(delsarte_shift(&family, &h, &one).unwrap(), one);

        let s = Spectrum::from_terms(DualGroup::ZLex(1), [(z(&[3]), c(1.0, 2.0)), (z(&[-2]), c(0.5, 0.0))]).unwrap();
        let zero = TorusPoint::new(vec![0.0]).unwrap();
        assert_eq!(delsarte_shift(&[id], &zero, &s).unwrap(), s);
    }

    #[test]
    fn delsarte_rejects_open_families() {
        let shear = Automorphism::lower_unitriangular(2, &[(2, 1, 1)]).unwrap();
        let id = Automorphism::identity(DualGroup::ZLex(2));
        let h = TorusPoint::new(vec![0.0, 0.5]).unwrap();
        let s = Spectrum::delta(z(&[1, 0]), c(1.0, 0.0));
        assert_eq!(delsarte_shift(&[id.clone(), shear], &h, &s), Err(Error::NotClosed(1)));
        let bad_h = TorusPoint::new(vec![0.0]).unwrap();
        assert!(matches!(delsarte_shift(&[id], &bad_h, &s), Err(Error::DimMismatch { .. })));
        let q = Spectrum::delta(Character::rational(1, 2).unwrap(), c(1.0, 0.0));
        assert!(delsarte_shift(&[], &h, &q).is_err());
    }

    fn random_operator(r: &mut rand_chacha::ChaCha8Rng, dim: usize, terms: usize, real: bool) -> HausdorffOperator {
        let weights = if real { random::real_weights(r, terms, false) } else { random::complex_weights(r, terms) };
        let maps: Vec<_> = weights
            .into_iter()
            .map(|w| (w, Automorphism::LowerUnitriangular(random::lower_unitriangular(r, dim, 2))))
            .collect();
        HausdorffOperator::from_dual(DualGroup::ZLex(dim), maps).unwrap()
    }

    #[test]
    fn swap_leaks_out_of_the_cone() {
        let swap = Automorphism::unimod_matrix(vec![vec![0, 1], vec![1, 0]]).unwrap();
        let h = HausdorffOperator::from_dual(
            DualGroup::ZLex(2),
            [(c(0.5, 0.0), Automorphism::identity(DualGroup::ZLex(2))), (c(0.5, 0.0), swap)],
        )
        .unwrap();
        let (chi, out) = h.cone_leak(&Sampling::default()).unwrap().expect("swap must leak");
        assert!(chi.in_positive_cone());
        assert!(!out.in_positive_cone());
        let image = h.apply(&Spectrum::delta(chi, c(1.0, 0.0))).unwrap();
        assert_ne!(image.get(&out), c(0.0, 0.0));
        let mut r = random::rng(5);
        assert_eq!(random_operator(&mut r, 3, 3, true).cone_leak(&Sampling::default()).unwrap(), None);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn linear(seed in any::<u64>()) {
            let mut r = random::rng(seed);
            let h = random_operator(&mut r, 2, 3, false);
            let s = random::spectrum(&mut r, 2, 4, 8);
            let t = random::spectrum(&mut r, 2, 4, 8);
            let (a, b) = (random::complex_gaussian(&mut r), random::complex_gaussian(&mut r));
            let lhs = h.apply(&s.scale(a).add(&t.scale(b)).unwrap()).unwrap();
            let rhs = h.apply(&s).unwrap().scale(a).add(&h.apply(&t).unwrap().scale(b)).unwrap();
            let scale = 1.0 + lhs.max_abs().max(rhs.max_abs());
            prop_assert!(lhs.max_abs_diff(&rhs).unwrap() <= 1e-12 * scale);
        }

        #[test]
        fn l2_bound(seed in any::<u64>(), dim in 1usize..=3, terms in 1usize..=4) {
            let mut r = random::rng(seed);
            let h = random_operator(&mut r, dim, terms, false);
            let s = random::spectrum(&mut r, dim, 5, 10);
            prop_assert!(h.apply(&s).unwrap().l2_norm() <= h.phi_l1() * s.l2_norm() + 1e-12);
        }

        #[test]
        fn cone_support_is_invariant(seed in any::<u64>(), dim in 1usize..=3) {
            let mut r = random::rng(seed);
            let h = random_operator(&mut r, dim, 3, false);
            prop_assert!(h.preserves(TargetSet::LexCone, &Sampling::default()).unwrap().holds());
            let s = random::analytic_spectrum(&mut r, dim, 5, 10);
            prop_assert!(h.apply(&s).unwrap().is_supported_in(Character::in_positive_cone).is_inside());
        }

        #[test]
        fn orthant_support_is_invariant(seed in any::<u64>()) {
            let mut r = random::rng(seed);
            let terms: Vec<_> = (0..3)
                .map(|_| {
                    let len = rand::Rng::random_range(&mut r, 0..5usize);
                    (random::complex_gaussian(&mut r), Automorphism::sigma_u(random::sigma_weights(&mut r, len, 3)).unwrap())
                })
                .collect();
            let h = HausdorffOperator::from_dual(DualGroup::ZInfLex, terms).unwrap();
            prop_assert!(h.preserves(TargetSet::OrthantComplement, &Sampling::default()).unwrap().holds());
            let mut s = Spectrum::empty(DualGroup::ZInfLex);
            for _ in 0..6 {
                let dense = random::sigma_weights(&mut r, 5, 4);
                s.add_term(Character::sparse_from_dense(&dense), random::complex_gaussian(&mut r)).unwrap();
            }
            let out = h.apply(&s).unwrap();
            prop_assert!(out.is_supported_in(|chi| !chi.has_negative_entry()).is_inside());
        }

        #[test]
        fn commutes_with_hilbert(seed in any::<u64>(), dim in 1usize..=3) {
            let mut r = random::rng(seed);
            let h = random_operator(&mut r, dim, 3, false);
            let s = random::spectrum(&mut r, dim, 4, 10);
            let lhs = h.apply(&s.hilbert()).unwrap();
            let rhs = h.apply(&s).unwrap().hilbert();
            prop_assert!(lhs.max_abs_diff(&rhs).unwrap() <= 1e-12 * (1.0 + s.l1_coeff() * h.phi_l1()));
        }

        #[test]
        fn adjoint_pairing(seed in any::<u64>(), dim in 1usize..=3) {
            let mut r = random::rng(seed);
            let h = random_operator(&mut r, dim, 3, true);
            let f = random::spectrum(&mut r, dim, 4, 8);
            let phi = random::spectrum(&mut r, dim, 4, 8);
            let lhs = h.adjoint().apply(&f).unwrap().pairing(&phi).unwrap();
            let rhs = f.pairing(&h.apply(&phi).unwrap()).unwrap();
            prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + f.l2_norm() * phi.l2_norm() * h.phi_l1()));
            let back = h.adjoint().adjoint();
            prop_assert!(back.apply(&f).unwrap().max_abs_diff(&h.apply(&f).unwrap()).unwrap() == 0.0);
        }

        #[test]
        fn constants_scale_by_phi_l1(seed in any::<u64>(), dim in 1usize..=3) {
            let mut r = random::rng(seed);
            let ws = random::real_weights(&mut r, 4, true);
            let maps = ws.into_iter().map(|w| (w, Automorphism::LowerUnitriangular(random::lower_unitriangular(&mut r, dim, 3))));
            let h = HausdorffOperator::from_dual(DualGroup::ZLex(dim), maps).unwrap();
            let one = Spectrum::delta(DualGroup::ZLex(dim).identity(), c(1.0, 0.0));
            let out = h.apply(&one).unwrap();
            prop_assert_eq!(out.len(), 1);
            prop_assert!((out.constant_term() - c(h.phi_l1(), 0.0)).norm() <= 1e-15 * h.phi_l1());
        }
    }
}
