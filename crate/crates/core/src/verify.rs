//! Seeded verification suites for the operator identities and inequalities.
//!
//! Each check owns a random stream derived from `(seed, check id)`, so a
//! check produces the same record whichever suite runs it. Deviations are
//! signed: for an inequality `lhs <= rhs` the recorded value is the largest
//! `lhs - rhs` (relative where stated), so negative values mean slack.

use std::time::Instant;

use clap::ValueEnum;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::automorphism::{Automorphism, IntMatrix, Sampling, TargetSet};
use crate::dirichlet::{self, DirichletPolynomial};
use crate::dual_group::{lacunarity_constant, Character, DualGroup};
use crate::error::{Error, Result};
use crate::hausdorff::{delsarte_shift, HausdorffOperator};
use crate::io::{character_to_json, spectrum_to_json};
use crate::random;
use crate::spectrum::{Spectrum, Support};
use crate::torus::{self, TorusPoint};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    Theorem1,
    Theorem2,
    Theorem5,
    Remark1,
    Corollary3,
    Proposition1,
    Dirichlet,
    Delsarte,
    Eq1,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Theorem1 => "theorem1",
            Suite::Theorem2 => "theorem2",
            Suite::Theorem5 => "theorem5",
            Suite::Remark1 => "remark1",
            Suite::Corollary3 => "corollary3",
            Suite::Proposition1 => "proposition1",
            Suite::Dirichlet => "dirichlet",
            Suite::Delsarte => "delsarte",
            Suite::Eq1 => "eq1",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub id: String,
    pub anchor: String,
    pub instances: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub witness: Option<Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub seed: u64,
    pub wall_time_ms: u64,
    pub checks: Vec<CheckRecord>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("serializable")
    }

    /// The report with timing zeroed, for determinism comparisons.
    pub fn untimed(&self) -> VerificationReport {
        VerificationReport { wall_time_ms: 0, ..self.clone() }
    }
}

/// Running maximum of deviations plus the first failing instance.
struct Tally {
    tolerance: f64,
    instances: usize,
    max_deviation: Option<f64>,
    witness: Option<Value>,
}

impl Tally {
    fn new(tolerance: f64) -> Self {
        Tally { tolerance, instances: 0, max_deviation: None, witness: None }
    }

    fn observe(&mut self, deviation: f64, witness: impl FnOnce() -> Value) {
        self.instances += 1;
        let worse = match self.max_deviation {
            None => true,
            Some(m) => deviation.is_nan() || deviation > m,
        };
        if worse && !self.max_deviation.is_some_and(f64::is_nan) {
            self.max_deviation = Some(deviation);
        }
        if (deviation.is_nan() || deviation > self.tolerance) && self.witness.is_none() {
            self.witness = Some(json!({"instance": self.instances - 1, "deviation": deviation, "detail": witness()}));
        }
    }

    fn finish(self, id: &str, anchor: &str) -> CheckRecord {
        let max_deviation = self.max_deviation.unwrap_or(f64::NAN);
        CheckRecord {
            id: id.into(),
            anchor: anchor.into(),
            instances: self.instances,
            max_deviation,
            tolerance: self.tolerance,
            pass: max_deviation <= self.tolerance && self.witness.is_none(),
            witness: self.witness,
        }
    }
}

fn relative(excess: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        excess / scale
    } else {
        excess
    }
}

type CheckFn = fn(&mut ChaCha8Rng) -> Result<CheckRecord>;

const CHECKS: &[(Suite, &str, CheckFn)] = &[
    (Suite::Theorem1, "fourier_commuting", fourier_commuting),
    (Suite::Theorem1, "hilbert_commuting", hilbert_commuting),
    (Suite::Theorem1, "riesz_l2", riesz_l2),
    (Suite::Theorem2, "hardy_support_cone", hardy_support_cone),
    (Suite::Theorem2, "hardy_support_orthant", hardy_support_orthant),
    (Suite::Theorem2, "l2_bound", l2_bound),
    (Suite::Remark1, "constant_eigenvector", constant_eigenvector),
    (Suite::Theorem5, "real_hardy_bound", real_hardy_bound),
    (Suite::Theorem5, "real_hardy_bound_2d", real_hardy_bound_2d),
    (Suite::Proposition1, "swap_leak_witness", swap_leak_witness),
    (Suite::Corollary3, "lacunarity_constant", lacunarity_check),
    (Suite::Corollary3, "bmoa_lacunary_bound", bmoa_lacunary_bound),
    (Suite::Dirichlet, "sigma_lift_naturality", sigma_lift_naturality),
    (Suite::Dirichlet, "root_rescale_golden", root_rescale_golden),
    (Suite::Dirichlet, "bohr_prime_sum_bound", bohr_prime_sum_bound),
    (Suite::Eq1, "lp_bound_flips_p1", lp_bound_flips_p1),
    (Suite::Eq1, "lp_bound_flips_p2", lp_bound_flips_p2),
    (Suite::Eq1, "lp_bound_flips_pinf", lp_bound_flips_pinf),
    (Suite::Delsarte, "delsarte_constant", delsarte_constant),
    (Suite::Delsarte, "delsarte_l2_contraction", delsarte_l2_contraction),
];

/// Check ids run by `suite`, sorted.
pub fn check_ids(suite: Suite) -> Vec<&'static str> {
    let mut ids: Vec<_> =
        CHECKS.iter().filter(|(s, _, _)| suite == Suite::All || *s == suite).map(|(_, id, _)| *id).collect();
    ids.sort_unstable();
    ids
}

pub fn run_suite(suite: Suite, seed: u64) -> Result<VerificationReport> {
    let start = Instant::now();
    let mut checks = Vec::new();
    for (s, id, f) in CHECKS {
        if suite == Suite::All || *s == suite {
            let mut rng = random::stream(seed, id);
            let mut record = f(&mut rng)?;
            record.id = (*id).into();
            checks.push(record);
        }
    }
    checks.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(VerificationReport {
        suite: suite.name().into(),
        seed,
        wall_time_ms: start.elapsed().as_millis() as u64,
        checks,
    })
}

// ---- operator generators ----

fn cone_operator(rng: &mut ChaCha8Rng, dim: usize, terms: usize, real: bool) -> HausdorffOperator {
    let weights = if real { random::real_weights(rng, terms, false) } else { random::complex_weights(rng, terms) };
    let maps: Vec<_> = weights
        .into_iter()
        .map(|w| (w, Automorphism::LowerUnitriangular(random::lower_unitriangular(rng, dim, 2))))
        .collect();
    HausdorffOperator::from_dual(DualGroup::ZLex(dim), maps).expect("nonempty, compatible")
}

fn sigma_operator(rng: &mut ChaCha8Rng, terms: usize) -> HausdorffOperator {
    let maps: Vec<_> = (0..terms)
        .map(|_| {
            let len = rng.random_range(0..=4);
            let u = random::sigma_weights(rng, len, 3);
            (random::complex_gaussian(rng), Automorphism::sigma_u(u).expect("nonnegative"))
        })
        .collect();
    HausdorffOperator::from_dual(DualGroup::ZInfLex, maps).expect("nonempty, compatible")
}

fn two_diagonal_operator(rng: &mut ChaCha8Rng, terms: usize) -> HausdorffOperator {
    let maps: Vec<_> = (0..terms)
        .map(|_| {
            let entries: Vec<(usize, i64)> = (2..=5).map(|k| (k, rng.random_range(-3..=3))).collect();
            let a = Automorphism::two_diagonal(entries).expect("k >= 2");
            (random::complex_gaussian(rng), if rng.random_bool(0.5) { a.invert() } else { a })
        })
        .collect();
    HausdorffOperator::from_dual(DualGroup::ZInfLex, maps).expect("nonempty, compatible")
}

fn rational_operator(rng: &mut ChaCha8Rng, terms: usize) -> HausdorffOperator {
    let maps: Vec<_> = (0..terms)
        .map(|_| {
            let q = Automorphism::rational_scale(rng.random_range(1..=9), rng.random_range(1..=9)).expect("q > 0");
            (random::complex_gaussian(rng), q)
        })
        .collect();
    HausdorffOperator::from_dual(DualGroup::Rationals, maps).expect("nonempty, compatible")
}

/// A random cone-preserving operator and a matching random spectrum,
/// cycling through the group families.
fn cone_case(rng: &mut ChaCha8Rng, i: usize) -> (HausdorffOperator, Spectrum) {
    let terms = rng.random_range(1..=5);
    match i % 5 {
        0..=2 => {
            let dim = 1 + i % 3;
            (cone_operator(rng, dim, terms, false), random::spectrum(rng, dim, 6, 12))
        }
        3 => {
            let h = if rng.random_bool(0.5) { sigma_operator(rng, terms) } else { two_diagonal_operator(rng, terms) };
            (h, random::sparse_spectrum(rng, 5, -3, 3, 12))
        }
        _ => (rational_operator(rng, terms), random::rational_spectrum(rng, 12, 12)),
    }
}

/// Any-automorphism operator for the norm checks.
fn general_operator(rng: &mut ChaCha8Rng, dim: usize, terms: usize) -> HausdorffOperator {
    let maps: Vec<_> = (0..terms)
        .map(|_| {
            let m = if rng.random_bool(0.5) { random::unimodular(rng, dim, 2) } else { random::lower_unitriangular(rng, dim, 3) };
            (random::complex_gaussian(rng), Automorphism::UnimodMatrix(m))
        })
        .collect();
    HausdorffOperator::from_dual(DualGroup::ZLex(dim), maps).expect("nonempty, compatible")
}

fn fits(s: &Spectrum, half: i64) -> bool {
    s.characters().all(|c| c.max_abs_coord() < half)
}

/// Spatial terms whose dual images of `s` stay alias-free on grid `n`.
fn spatial_terms(rng: &mut ChaCha8Rng, s: &Spectrum, dim: usize, count: usize, n: usize, cone: bool) -> Result<Vec<(Complex64, IntMatrix)>> {
    let mut terms = Vec::with_capacity(count);
    while terms.len() < count {
        let m = if cone {
            // spatial lower unitriangular M gives dual (M^T)^{-1}, upper; use M^T instead
            random::lower_unitriangular(rng, dim, 1).transpose()
        } else if rng.random_bool(0.5) {
            random::unimodular(rng, dim, 1)
        } else {
            random::lower_unitriangular(rng, dim, 2)
        };
        let image = HausdorffOperator::from_spatial_matrices(dim, &[(Complex64::new(1.0, 0.0), m.clone())])?.apply(s)?;
        if fits(&image, (n / 2) as i64) {
            let w = random::real_weights(rng, 1, false)[0];
            terms.push((if cone { w } else { random::complex_gaussian(rng) }, m));
        }
    }
    Ok(terms)
}

// ---- checks ----

fn fourier_commuting(rng: &mut ChaCha8Rng) -> Result<CheckRecord> {
    const N: usize = 64;
    let mut t = Tally::new(1e-9);
    for i in 0..200 {
        let dim = 1 + i % 3;
        let terms = rng.random_range(1..=20);
        let s = random::spectrum(rng, dim, 8, terms);
        let count = rng.random_range(1..=5);
        let terms = spatial_terms(rng, &s, dim, count, N, false)?;
        let h = HausdorffOperator::from_spatial_matrices(dim, &terms)?;
        let fourier = h.apply(&s)?;
        let cutoff = 1e-13 * s.l1_coeff() * h.phi_l1();
        let grid = torus::analyze_above(&torus::spatial_hausdorff(&terms, &torus::synthesize(&s, N)?)?, cutoff);
        let scale = fourier.max_abs().max(s.max_abs());
        t.observe(relative(grid.max_abs_diff(&fourier)?, scale), || spectrum_to_json(&s));
    }
    Ok(t.finish("", "spatial action z -> z^M equals the dual push-forward through (M^T)^-1"))
}

fn hilbert_commuting(rng: &mut ChaCha8Rng) -> Result<CheckRecord> {
    let mut t = Tally::new(1e-12);
    for i in 0..200 {
        let (h, s) = cone_case(rng, i);
        let lhs = h.apply(&s.hilbert())?;
        let rhs = h.apply(&s)?.hilbert();
        t.observe(lhs.max_abs_diff(&rhs)?, || spectrum_to_json(&s));
    }
    Ok(t.finish("", "cone-preserving Hausdorff operators commute with the Hilbert transform"))
}

fn riesz_l2(rng: &mut ChaCha8Rng) -> Result<CheckRecord> {
    let mut t = Tally::new(1e-12);
    for i in 0..500 {
        let mut s = random::spectrum(rng, 1 + i % 3, 5, 10);
        let with_constant = i % 2 == 0;
        let zero = s.group().identity();
        if with_constant {
            s.add_term(zero, random::complex_gaussian(rng))?;
        } else {
            s = s.map_coefficients(|chi, c| if chi.is_identity() { Complex64::new(0.0, 0.0) } else { c });
        }
        let (lhs, rhs) = (s.hilbert().l2_norm(), s.l2_norm());
        let dev = if with_constant { lhs - rhs } else { (lhs - rhs).abs() };
        t.observe(dev, || spectrum_to_json(&s));
    }
    Ok(t.finish("", "||H phi||_2 <= ||phi||_2 with equality without a constant term"))
}

fn hardy_support_cone(rng: &mut ChaCha8Rng) -> Result<CheckRecord> {
    let mut t = Tally::new(0.0);
    for i in 0..250 {
        let dim = 1 + i % 3;
        let terms = rng.random_range(1..=5);
        let h = cone_operator(rng, dim, terms, false);
        let s = random::analytic_spectrum(rng, dim, 6, 12);
        let leak = h.apply(&s)?.is_supported_in(Character::in_positive_cone);
        let w = leak.clone();
        t.observe(if leak.is_inside() { 0.0 } else { 1.0 }, || leak_json(&w));
    }
    Ok(t.finish("", "H maps H^p into H^p when every map preserves the lex cone"))
}

fn hardy_support_orthant(rng: &mut ChaCha8Rng) -> Result<CheckRecord> {
    let mut t = Tally::new(0.0);
    for _ in 0..250 {
        let terms = rng.random_range(1..=5);
        let h = sigma_operator(rng, terms);
        if !h.preserves(TargetSet::OrthantComplement, &Sampling::default())?.holds() {
            return Err(Error::InvalidAutomorphism("sigma_u family failed the orthant verdict".into()));
        }
        let s = random::sparse_spectrum(rng, 5, 0, 3, 12);
        let leak = h.apply(&s)?.is_supported_in(|c| !c.has_negative_entry());
        let w = leak.clone();
        t.observe(if leak.is_inside() { 0.0 } else { 1.0 }, || leak_json(&w));
    }
    Ok(t.finish("", "sigma_u operators keep spectra inside the orthant Z_+^inf"))
}

fn leak_json(s: &Support) -> Value {
    match s {
        Support::Inside => Value::Null,
        Support::Leak(c) => character_to_json(c),
    }
}

fn l2_bound(rng: &mut ChaCha8Rng) -> Result<CheckRecord> {
    let mut t = Tally::new(1e-12);
    for i in 0..1000 {
        let (h, s) = if i % 4 == 3 {
            cone_case(rng, i)
        } else {
            let dim = 1 + i % 3;
            let terms = rng.random_range(1..=5);
            (general_operator(rng, dim, terms), random::spectrum(rng, dim, 6, 12))
        };
        t.observe(h.apply(&s)?.l2_norm() - h.phi_l1() * s.l2_norm(), || spectrum_to_json(&s));
    }
    Ok(t.finish("", "||H f||_2 <= ||Phi||_1 ||f||_2"))
}

fn constant_eigenvector(rng: &mut ChaCha8Rng) -> Result<CheckRecord> {
    let mut t = Tally::new(1e-12);
    for i in 0..100 {
        let dim = 1 + i % 3;
        let count = rng.random_range(1..=5);
        let weights = random::real_weights(rng, count, true);
        let maps: Vec<_> = weights
            .into_iter()
            .map(|w| (w, Automorphism::UnimodMatrix(random::unimodular(rng, dim, 2))))
            .collect();
        let h = HausdorffOperator::from_dual(DualGroup::ZLex(dim), maps)?;
        let one = Spectrum::delta(DualGroup::ZLex(dim).identity(), Complex64::new(1.0, 0.0));
        let out = h.apply(&one)?;
        let phi = h.phi_l1();
        let dev = out.max_abs_diff(&one.scale(Complex64::new(phi, 0.0)))?.max((out.l2_norm() - phi).abs());
        t.observe(dev, || json!({"phi_l1": phi}));
    }
    Ok(t.finish("", "H 1 = ||Phi||_1 1 for nonnegative weights"))
}

fn real_hardy_bound(rng: &mut ChaCha8Rng) -> Result<CheckRecord> {
    const N: usize = 4096;
    let mut t = Tally::new(1e-3);
    for _ in 0..100 {
        // on Z with the usual order only the identity preserves the cone
        let count = rng.random_range(1..=4);
        let maps: Vec<_> = random::real_weights(rng, count, false)
            .into_iter()
            .map(|w| (w, Automorphism::identity(DualGroup::ZLex(1))))
            .collect();
        let h = HausdorffOperator::from_dual(DualGroup::ZLex(1), maps)?;
        let terms = rng.random_range(1..=16);
        let q = random::real_polynomial(rng, 1, 32, terms);
        let lhs = torus::h1r_norm(&h.apply(&q)?, N)?;
        let rhs = h.phi_l1() * torus::h1r_norm(&q, N)?;
        t.observe(relative(lhs - rhs, rhs), || spectrum_to_json(&q));
    }
    Ok(t.finish("", "||H q||_{H^1_R} <= ||Phi||_1 ||q||_{H^1_R} on real polynomials"))
}

fn real_hardy_bound_2d(rng: &mut ChaCha8Rng) -> Result<CheckRecord> {
    const N: usize = 64;
    let mut t = Tally::new(1e-3);
    for _ in 0..30 {
        let terms = rng.random_range(1..=10);
        let q = random::real_polynomial(rng, 2, 6, terms);
        let count = rng.random_range(1..=4);
        let terms = spatial_terms(rng, &q, 2, count, N, true)?;
        let h = HausdorffOperator::from_spatial_matrices(2, &terms)?;
        let lhs = torus::h1r_norm(&h.apply(&q)?, N)?;
        let rhs = h.phi_l1() * torus::h1r_norm(&q, N)?;
        t.observe(relative(lhs - rhs, rhs), || spectrum_to_json(&q));
    }
    Ok(t.finish("", "real Hardy space bound on Z^2 with cone-preserving spatial shears"))
}

fn swap_leak_witness(_rng: &mut ChaCha8Rng) -> Result<CheckRecord> {
    let swap = Automorphism::unimod_matrix(vec![vec![0, 1], vec![1, 0]])?;
    let h = HausdorffOperator::from_dual(
        DualGroup::ZLex(2),
        [(Complex64::new(0.5, 0.0), Automorphism::identity(DualGroup::ZLex(2))), (Complex64::new(0.5, 0.0), swap)],
    )?;
    let found = h.cone_leak(&Sampling::default())?;
    let witness = found.as_ref().map(|(input, leak)| {
        json!({"input": character_to_json(input), "leak": character_to_json(leak)})
    });
    Ok(CheckRecord {
        id: String::new(),
        anchor: "a map outside Aut_+ pushes some cone character out of the cone".into(),
        instances: 1,
        max_deviation: if found.is_some() { 0.0 } else { 1.0 },
        tolerance: 0.0,
        pass: found.is_some(),
        witness,
    })
}

fn powers_of_two() -> Vec<Character> {
    (0..=10).map(|k| Character::lex(vec![1i64 << k])).collect()
}

fn lacunarity_check(_rng: &mut ChaCha8Rng) -> Result<CheckRecord> {
    let e: Vec<i64> = (0..=10).map(|k| 1i64 << k).collect();
    let brute = (0..=e[10]).map(|c| e.iter().filter(|&&x| c <= x && x <= 2 * c).count()).max().unwrap_or(0);
    let k = lacunarity_constant(&powers_of_two())?;
    let mut t = Tally::new(0.0);
    t.observe((k as f64 - 2.0).abs().max((brute as f64 - 2.0).abs()), || json!({"computed": k, "brute_force": brute}));
    Ok(t.finish("", "K_E = 2 for E = {2^k : 0 <= k <= 10}"))
}

fn bmoa_lacunary_bound(rng: &mut ChaCha8Rng) -> Result<CheckRecord> {
    const N: usize = 4096;
    let e = powers_of_two();
    let mut t = Tally::new(0.0);
    for i in 0..50 {
        let mut phi = Spectrum::empty(DualGroup::ZLex(1));
        for chi in &e {
            if rng.random_bool(0.5) {
                phi.add_term(chi.clone(), random::complex_gaussian(rng))?;
            }
        }
        let count = rng.random_range(1..=3);
        let maps: Vec<_> = random::complex_weights(rng, count)
            .into_iter()
            .map(|w| (w, Automorphism::identity(DualGroup::ZLex(1))))
            .collect();
        let h = HausdorffOperator::from_dual(DualGroup::ZLex(1), maps)?;
        let lower = torus::bmoa_lower(&h.apply(&phi)?, N, 8, i as u64)?;
        let bound = 3.0 * std::f64::consts::SQRT_2 * h.phi_l1() * phi.l2_norm();
        t.observe(relative(lower - bound, bound), || spectrum_to_json(&phi));
    }
    Ok(t.finish("", "H is bounded from H^2_E to BMOA for lacunary E"))
}

/// `(u, weight)` pairs of a sigma operator.
type SigmaWeights = Vec<(Vec<i64>, Complex64)>;

fn random_sigma_weights(rng: &mut ChaCha8Rng) -> SigmaWeights {
    (0..rng.random_range(1..=3))
        .map(|_| {
            let len = rng.random_range(0..=3);
            (random::sigma_weights(rng, len, 2), random::complex_gaussian(rng))
        })
        .collect()
}

/// Draws `(weights, D, sigma(D))` until the output stays within the index bound.
fn sigma_instance(rng: &mut ChaCha8Rng) -> Result<(SigmaWeights, DirichletPolynomial, DirichletPolynomial)> {
    loop {
        let terms = rng.random_range(1..=8);
        let d = random::dirichlet(rng, 10_000, terms);
        let w = random_sigma_weights(rng);
        match dirichlet::sigma_operator(&w, &d) {
            Ok(b) => return Ok((w, d, b)),
            Err(Error::OutOfRange { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
}

fn sigma_lift_naturality(rng: &mut ChaCha8Rng) -> Result<CheckRecord> {
    let mut t = Tally::new(1e-12);
    for _ in 0..100 {
        let (w, d, b) = sigma_instance(rng)?;
        let via_spectrum = dirichlet::sigma_hausdorff(&w)?.apply(&dirichlet::bohr_lift(&d)?)?;
        t.observe(dirichlet::bohr_lift(&b)?.max_abs_diff(&via_spectrum)?, || crate::io::dirichlet_to_json(&d));
    }
    Ok(t.finish("", "Bohr lift intertwines the sigma_u operator with its Hausdorff operator"))
}

fn root_rescale_golden(_rng: &mut ChaCha8Rng) -> Result<CheckRecord> {
    let half = Complex64::new(0.5, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let w = [(1, half), (2, half)];
    let d = DirichletPolynomial::from_coeffs(dirichlet::LIMIT, [(2, one), (4, one)])?;
    let b = dirichlet::root_rescale_operator(&w, &d)?;
    let unit = dirichlet::root_rescale_operator(&w, &DirichletPolynomial::from_coeffs(dirichlet::LIMIT, [(1, one)])?)?;
    let mut t = Tally::new(0.0);
    for (got, want) in [(b.get(2), half), (b.get(4), one), (b.get(16), half), (unit.get(1), one)] {
        t.observe((got - want).norm(), || json!({"got": [got.re, got.im], "want": [want.re, want.im]}));
    }
    Ok(t.finish("", "b(n) = sum over exact q-th powers n = m^q of Phi(1/q) a(m)"))
}

fn bohr_prime_sum_bound(rng: &mut ChaCha8Rng) -> Result<CheckRecord> {
    let mut t = Tally::new(1e-12);
    for i in 0..200 {
        let (phi_l1, d, b) = if i % 2 == 0 {
            let (w, d, b) = sigma_instance(rng)?;
            (w.iter().map(|(_, x)| x.norm()).sum::<f64>(), d, b)
        } else {
            let terms = rng.random_range(1..=8);
            let d = random::dirichlet(rng, 1000, terms);
            let w: Vec<(u64, Complex64)> =
                (0..rng.random_range(1..=2)).map(|_| (rng.random_range(1..=2), random::complex_gaussian(rng))).collect();
            let b = dirichlet::root_rescale_operator(&w, &d)?;
            (w.iter().map(|(_, x)| x.norm()).sum::<f64>(), d, b)
        };
        let bound = phi_l1 * dirichlet::bohr_lift(&d)?.l1_coeff();
        t.observe(dirichlet::bohr_prime_sum(&b) - bound, || crate::io::dirichlet_to_json(&d));
    }
    Ok(t.finish("", "sum over primes |b(p)| <= ||Phi||_1 times the l1 majorant of D"))
}

fn lp_bound_flips(rng: &mut ChaCha8Rng, p: f64, tolerance: f64) -> Result<CheckRecord> {
    const N: usize = 64;
    let mut t = Tally::new(tolerance);
    for _ in 0..12 {
        let terms = rng.random_range(1..=20);
        let s = random::spectrum(rng, 3, 8, terms);
        let terms: Vec<(Complex64, IntMatrix)> = (0..rng.random_range(1..=4))
            .map(|_| {
                let signs: Vec<i64> = (0..3).map(|_| if rng.random_bool(0.5) { 1 } else { -1 }).collect();
                let rows = (0..3).map(|i| (0..3).map(|j| if i == j { signs[i] } else { 0 }).collect()).collect();
                (random::complex_gaussian(rng), IntMatrix::new(rows).expect("square"))
            })
            .collect();
        let g = torus::synthesize(&s, N)?;
        let phi: f64 = terms.iter().map(|(w, _)| w.norm()).sum();
        let lhs = torus::lp_norm(&torus::spatial_hausdorff(&terms, &g)?, p)?;
        let rhs = phi * torus::lp_norm(&g, p)?;
        t.observe(relative(lhs - rhs, rhs), || spectrum_to_json(&s));
    }
    Ok(t.finish("", "||H f||_p <= ||Phi||_1 ||f||_p for coordinate flips on T^3"))
}

fn lp_bound_flips_p1(rng: &mut ChaCha8Rng) -> Result<CheckRecord> {
    lp_bound_flips(rng, 1.0, 1e-3)
}

fn lp_bound_flips_p2(rng: &mut ChaCha8Rng) -> Result<CheckRecord> {
    lp_bound_flips(rng, 2.0, 1e-6)
}

fn lp_bound_flips_pinf(rng: &mut ChaCha8Rng) -> Result<CheckRecord> {
    lp_bound_flips(rng, f64::INFINITY, 1e-3)
}

fn flip_family() -> [Automorphism; 2] {
    [Automorphism::identity(DualGroup::ZLex(1)), Automorphism::coordinate_flip(vec![-1]).expect("sign")]
}

fn random_point(rng: &mut ChaCha8Rng) -> TorusPoint {
    TorusPoint::new(vec![rng.random_range(0.0..1.0)]).expect("angle in [0, 1)")
}

fn delsarte_constant(rng: &mut ChaCha8Rng) -> Result<CheckRecord> {
    let one = Spectrum::delta(Character::lex(vec![0]), Complex64::new(1.0, 0.0));
    let mut t = Tally::new(0.0);
    for _ in 0..50 {
        let h = random_point(rng);
        t.observe(delsarte_shift(&flip_family(), &h, &one)?.max_abs_diff(&one)?, || json!(h.angles()));
    }
    Ok(t.finish("", "the Delsarte shift fixes constants"))
}

fn delsarte_l2_contraction(rng: &mut ChaCha8Rng) -> Result<CheckRecord> {
    let mut t = Tally::new(1e-12);
    for _ in 0..50 {
        let h = random_point(rng);
        let terms = rng.random_range(1..=12);
        let s = random::spectrum(rng, 1, 10, terms);
        t.observe(delsarte_shift(&flip_family(), &h, &s)?.l2_norm() - s.l2_norm(), || spectrum_to_json(&s));
    }
    Ok(t.finish("", "the Delsarte shift is an L^2 contraction"))
}
