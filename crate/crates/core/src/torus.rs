//! Spatial-side engine on the torus `T^d`.
//!
//! Functions are sampled on the uniform grid `(Z/N)^d`; node `k` sits at
//! angle `k/N` (fractions of a turn) and carries quadrature mass `N^-d`, so
//! grid sums approximate integrals against normalized Haar measure. This
//! module never calls into [`crate::hausdorff`]: it is the independent
//! reference the Fourier-side engine is checked against.

use num_complex::Complex64;
use rand::Rng;
use rustfft::{FftDirection, FftPlanner};

use crate::automorphism::IntMatrix;
use crate::dual_group::{Character, DualGroup};
use crate::error::{Error, Result};
use crate::random;
use crate::spectrum::{Part, Spectrum};

/// A point of `T^d` given by angles in `[0, 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusPoint {
    angles: Vec<f64>,
}

impl TorusPoint {
    pub fn new(angles: Vec<f64>) -> Result<Self> {
        if let Some(&bad) = angles.iter().find(|a| !(0.0..1.0).contains(*a)) {
            return Err(Error::InvalidPoint(bad));
        }
        Ok(TorusPoint { angles })
    }

    pub fn dim(&self) -> usize {
        self.angles.len()
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }
}

/// Direct evaluation `sum_n s(n) e^{2 pi i n.x}`.
pub fn evaluate(s: &Spectrum, x: &TorusPoint) -> Result<Complex64> {
    let dim = lex_dim(s.group())?;
    if dim != x.dim() {
        return Err(Error::DimMismatch { expected: dim, actual: x.dim() });
    }
    Ok(s.iter()
        .map(|(chi, &c)| {
            let phase: f64 = lex_coords(chi).iter().zip(x.angles()).map(|(&n, &a)| n as f64 * a).sum();
            c * Complex64::from_polar(1.0, std::f64::consts::TAU * phase)
        })
        .sum())
}

/// Samples on `(Z/N)^dim`, row-major with the last axis fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    dim: usize,
    n: usize,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(dim: usize, n: usize, values: Vec<Complex64>) -> Result<Self> {
        check_grid(n)?;
        if dim == 0 {
            return Err(Error::DimMismatch { expected: 1, actual: 0 });
        }
        let len = node_count(dim, n)?;
        if values.len() != len {
            return Err(Error::DimMismatch { expected: len, actual: values.len() });
        }
        Ok(GridFunction { dim, n, values })
    }

    pub fn constant(dim: usize, n: usize, value: Complex64) -> Result<Self> {
        Self::new(dim, n, vec![value; node_count(dim, n)?])
    }

    /// Samples `f(k / N)` at every node.
    pub fn from_fn(dim: usize, n: usize, f: impl Fn(&[f64]) -> Complex64) -> Result<Self> {
        check_grid(n)?;
        let len = node_count(dim, n)?;
        let mut point = vec![0.0; dim];
        let values = (0..len)
            .map(|flat| {
                for (axis, k) in unflatten(flat, dim, n).into_iter().enumerate() {
                    point[axis] = k as f64 / n as f64;
                }
                f(&point)
            })
            .collect();
        Self::new(dim, n, values)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Value at the multi-index `k` reduced mod `N`.
    pub fn at(&self, k: &[i64]) -> Complex64 {
        self.values[flatten_mod(k, self.n)]
    }

    pub fn max_abs_diff(&self, other: &GridFunction) -> Result<f64> {
        if (self.dim, self.n) != (other.dim, other.n) {
            return Err(Error::DimMismatch { expected: self.values.len(), actual: other.values.len() });
        }
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }
}

fn check_grid(n: usize) -> Result<()> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::InvalidGrid(n));
    }
    Ok(())
}

fn node_count(dim: usize, n: usize) -> Result<usize> {
    u32::try_from(dim)
        .ok()
        .and_then(|d| n.checked_pow(d))
        .ok_or_else(|| Error::Overflow(format!("sizing a {dim}-dimensional grid of side {n}")))
}

fn unflatten(mut flat: usize, dim: usize, n: usize) -> Vec<usize> {
    let mut k = vec![0; dim];
    for axis in (0..dim).rev() {
        k[axis] = flat % n;
        flat /= n;
    }
    k
}

fn flatten_mod(k: &[i64], n: usize) -> usize {
    k.iter().fold(0usize, |acc, &ki| acc * n + ki.rem_euclid(n as i64) as usize)
}

fn lex_dim(group: DualGroup) -> Result<usize> {
    match group {
        DualGroup::ZLex(d) => Ok(d),
        other => Err(Error::UnsupportedGroup(other)),
    }
}

fn lex_coords(chi: &Character) -> &[i64] {
    match chi {
        Character::Lex(v) => v,
        _ => unreachable!("grid spectra live on Z^d"),
    }
}

/// One-dimensional transform along every axis in turn.
fn transform(values: &mut [Complex64], dim: usize, n: usize, direction: FftDirection) {
    let fft = FftPlanner::new().plan_fft(n, direction);
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    for axis in 0..dim {
        let stride = n.pow((dim - 1 - axis) as u32);
        let block = stride * n;
        for base in (0..values.len()).step_by(block) {
            for offset in 0..stride {
                let start = base + offset;
                for (j, slot) in line.iter_mut().enumerate() {
                    *slot = values[start + j * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (j, v) in line.iter().enumerate() {
                    values[start + j * stride] = *v;
                }
            }
        }
    }
}

/// Grid samples `values(k) = sum_n s(n) e^{2 pi i n.k/N}`.
pub fn synthesize(s: &Spectrum, n: usize) -> Result<GridFunction> {
    let dim = lex_dim(s.group())?;
    check_grid(n)?;
    let half = (n / 2) as i64;
    let mut values = vec![Complex64::new(0.0, 0.0); node_count(dim, n)?];
    for (chi, &c) in s.iter() {
        let coords = lex_coords(chi);
        if let Some(&bad) = coords.iter().find(|x| x.unsigned_abs() >= half as u64) {
            return Err(Error::Aliasing { frequency: bad, grid: n });
        }
        values[flatten_mod(coords, n)] += c;
    }
    transform(&mut values, dim, n, FftDirection::Inverse);
    GridFunction::new(dim, n, values)
}

/// Discrete Fourier coefficients on the centered box `(-N/2, N/2)^d`.
///
/// Index `N/2` along any axis has no centered representative and is dropped.
/// Every other node is kept unless its coefficient is exactly zero.
pub fn analyze(g: &GridFunction) -> Spectrum {
    analyze_above(g, 0.0)
}

/// [`analyze`] keeping only coefficients with modulus above `cutoff`.
pub fn analyze_above(g: &GridFunction, cutoff: f64) -> Spectrum {
    let (dim, n) = (g.dim, g.n);
    let mut values = g.values.clone();
    transform(&mut values, dim, n, FftDirection::Forward);
    let scale = 1.0 / g.values.len() as f64;
    let half = n / 2;
    let mut s = Spectrum::empty(DualGroup::ZLex(dim));
    'nodes: for (flat, v) in values.into_iter().enumerate() {
        let c = v * scale;
        if c.norm() <= cutoff {
            continue;
        }
        let k = unflatten(flat, dim, n);
        let mut coords = Vec::with_capacity(dim);
        for ki in k {
            match ki.cmp(&half) {
                std::cmp::Ordering::Less => coords.push(ki as i64),
                std::cmp::Ordering::Equal => continue 'nodes,
                std::cmp::Ordering::Greater => coords.push(ki as i64 - n as i64),
            }
        }
        s.accumulate(Character::lex(coords), c);
    }
    s
}

/// Quadrature `L^p` norm against normalized Haar measure; `p = inf` is the grid sup.
pub fn lp_norm(g: &GridFunction, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidP(p));
    }
    let mass = 1.0 / g.values.len() as f64;
    Ok(if p == f64::INFINITY {
        g.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    } else if p == 1.0 {
        g.values.iter().map(|v| v.norm()).sum::<f64>() * mass
    } else if p == 2.0 {
        (g.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * mass).sqrt()
    } else {
        (g.values.iter().map(|v| v.norm().powf(p)).sum::<f64>() * mass).powf(1.0 / p)
    })
}

/// `result(k) = sum_u w_u g(M_u k mod N)`: the action `z -> z^M` on grid nodes.
pub fn spatial_hausdorff(terms: &[(Complex64, IntMatrix)], g: &GridFunction) -> Result<GridFunction> {
    let (dim, n) = (g.dim, g.n);
    for (_, m) in terms {
        if m.dim() != dim {
            return Err(Error::DimMismatch { expected: dim, actual: m.dim() });
        }
    }
    // columns[u][a][i] = M_u[i][a] mod N; stepping k_a by one (wrap included)
    // adds column a to the image mod N.
    let columns: Vec<Vec<Vec<usize>>> = terms
        .iter()
        .map(|(_, m)| {
            (0..dim).map(|a| (0..dim).map(|i| m.get(i, a).rem_euclid(n as i64) as usize).collect()).collect()
        })
        .collect();
    let mut images = vec![vec![0usize; dim]; terms.len()];
    let mut k = vec![0usize; dim];
    let mut values = Vec::with_capacity(g.values.len());
    for _ in 0..g.values.len() {
        let mut acc = Complex64::new(0.0, 0.0);
        for ((w, _), image) in terms.iter().zip(&images) {
            let flat = image.iter().fold(0usize, |f, &x| f * n + x);
            acc += w * g.values[flat];
        }
        values.push(acc);
        let mut axis = dim;
        while axis > 0 {
            axis -= 1;
            for (image, cols) in images.iter_mut().zip(&columns) {
                for (x, &c) in image.iter_mut().zip(&cols[axis]) {
                    *x = (*x + c) % n;
                }
            }
            k[axis] += 1;
            if k[axis] < n {
                break;
            }
            k[axis] = 0;
        }
    }
    GridFunction::new(dim, n, values)
}

/// Conjugate-symmetry check for the coefficients of a real polynomial.
pub fn check_real(s: &Spectrum) -> Result<()> {
    let scale = s.max_abs().max(1.0);
    for (chi, &c) in s.iter() {
        let deviation = (s.get(&chi.negate()) - c.conj()).norm();
        if deviation > 1e-12 * scale {
            return Err(Error::NotReal { character: chi.to_string(), deviation });
        }
    }
    Ok(())
}

/// `||P_- f||_1 + ||P_+ f||_1` on grid `N`, without the realness check.
pub fn split_l1(s: &Spectrum, n: usize) -> Result<f64> {
    let minus = lp_norm(&synthesize(&s.project(Part::Minus), n)?, 1.0)?;
    let plus = lp_norm(&synthesize(&s.project(Part::Plus), n)?, 1.0)?;
    Ok(minus + plus)
}

/// Real Hardy space norm `||P_- q||_1 + ||P_+ q||_1` of a real polynomial.
pub fn h1r_norm(s: &Spectrum, n: usize) -> Result<f64> {
    check_real(s)?;
    split_l1(s, n)
}

/// Certificate value `||f||_inf + ||g||_inf` (grid sups) for `phi = f + g~`.
pub fn bmo_upper(f: &Spectrum, g: &Spectrum, n: usize) -> Result<f64> {
    Ok(lp_norm(&synthesize(f, n)?, f64::INFINITY)? + lp_norm(&synthesize(g, n)?, f64::INFINITY)?)
}

/// Duality lower bound for the analytic BMO norm of `phi`.
///
/// Candidates are `delta_chi` for each `chi` in the support, `phi` itself,
/// then `trials` seeded random analytic polynomials. Each scores
/// `|<f, phi>| / (||P_- f||_1 + ||P_+ f||_1)`; the maximum is returned, so the
/// value is nondecreasing in `trials` for a fixed seed.
pub fn bmoa_lower(phi: &Spectrum, n: usize, trials: usize, seed: u64) -> Result<f64> {
    let dim = lex_dim(phi.group())?;
    if let Some(bad) = phi.characters().find(|c| !c.in_positive_cone()) {
        return Err(Error::NotAnalytic(bad.to_string()));
    }
    check_grid(n)?;
    if phi.is_empty() {
        return Ok(0.0);
    }
    let score = |f: &Spectrum| -> Result<f64> {
        let norm = split_l1(f, n)?;
        Ok(if norm > 0.0 { f.pairing(phi)?.norm() / norm } else { 0.0 })
    };
    let mut best = 0.0f64;
    for chi in phi.characters() {
        best = best.max(score(&Spectrum::delta(chi.clone(), Complex64::new(1.0, 0.0)))?);
    }
    best = best.max(score(phi)?);
    let radius = phi.characters().map(Character::max_abs_coord).max().unwrap_or(0).max(1).min(n as i64 / 2 - 1);
    let mut rng = random::rng(seed);
    for _ in 0..trials {
        let terms = rng.random_range(1..=8);
        let f = random::analytic_spectrum(&mut rng, dim, radius, terms);
        best = best.max(score(&f)?);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;
    use std::f64::consts::{PI, TAU};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn z(v: &[i64]) -> Character {
        Character::lex(v.to_vec())
    }

    fn cos1() -> Spectrum {
        Spectrum::from_terms(DualGroup::ZLex(1), [(z(&[1]), c(1.0, 0.0)), (z(&[-1]), c(1.0, 0.0))]).unwrap()
    }

    #[test]
    fn synthesize_examples() {
        let g = synthesize(&Spectrum::delta(z(&[1, 0]), c(1.0, 0.0)), 4).unwrap();
        for k1 in 0..4 {
            for k2 in 0..4 {
                let want = Complex64::from_polar(1.0, TAU * k1 as f64 / 4.0);
                assert!((g.at(&[k1, k2]) - want).norm() < 1e-15);
            }
        }
        let one = synthesize(&Spectrum::delta(z(&[0, 0, 0]), c(1.0, 0.0)), 8).unwrap();
        assert!(one.values().iter().all(|&v| v == c(1.0, 0.0)));
        let cos = synthesize(&cos1().scale(c(0.5, 0.0)), 8).unwrap();
        for k in 0..8 {
            assert!((cos.at(&[k]) - c((TAU * k as f64 / 8.0).cos(), 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn synthesize_errors() {
        assert_eq!(
            synthesize(&Spectrum::delta(z(&[2]), c(1.0, 0.0)), 4),
            Err(Error::Aliasing { frequency: 2, grid: 4 })
        );
        assert!(synthesize(&Spectrum::delta(z(&[-1]), c(1.0, 0.0)), 4).is_ok());
        assert_eq!(synthesize(&Spectrum::empty(DualGroup::ZLex(1)), 6), Err(Error::InvalidGrid(6)));
        assert!(matches!(synthesize(&Spectrum::empty(DualGroup::ZInfLex), 4), Err(Error::UnsupportedGroup(_))));
    }

    #[test]
    fn analyze_examples() {
        let one = GridFunction::constant(2, 8, c(1.0, 0.0)).unwrap();
        let s = analyze_above(&one, 1e-14);
        assert_eq!(s.len(), 1);
        assert!((s.get(&z(&[0, 0])) - c(1.0, 0.0)).norm() < 1e-15);
        let back = analyze(&synthesize(&Spectrum::delta(z(&[1, 0]), c(1.0, 0.0)), 4).unwrap());
        assert!(back.max_abs_diff(&Spectrum::delta(z(&[1, 0]), c(1.0, 0.0))).unwrap() < 1e-15);
        let s = random::spectrum(&mut random::rng(9), 2, 31, 20);
        let back = analyze(&synthesize(&s, 64).unwrap());
        assert!(back.max_abs_diff(&s).unwrap() < 1e-10 * s.max_abs());
    }

    #[test]
    fn lp_examples() {
        let one = GridFunction::constant(1, 16, c(1.0, 0.0)).unwrap();
        let chi = synthesize(&Spectrum::delta(z(&[3]), c(1.0, 0.0)), 16).unwrap();
        for p in [1.0, 1.5, 2.0, 7.0, f64::INFINITY] {
            assert!((lp_norm(&one, p).unwrap() - 1.0).abs() < 1e-14);
            assert!((lp_norm(&chi, p).unwrap() - 1.0).abs() < 1e-14);
        }
        let two_cos = synthesize(&cos1(), 4096).unwrap();
        assert!((lp_norm(&two_cos, 1.0).unwrap() - 4.0 / PI).abs() < 1e-3);
        assert_eq!(lp_norm(&one, 0.5), Err(Error::InvalidP(0.5)));
        assert!(matches!(lp_norm(&one, f64::NAN), Err(Error::InvalidP(_))));
    }

    #[test]
    fn spatial_examples() {
        let m = IntMatrix::new(vec![vec![1, 0], vec![1, 1]]).unwrap();
        let g = synthesize(&Spectrum::delta(z(&[0, 1]), c(1.0, 0.0)), 8).unwrap();
        let out = spatial_hausdorff(&[(c(1.0, 0.0), m)], &g).unwrap();
        let want = synthesize(&Spectrum::delta(z(&[1, 1]), c(1.0, 0.0)), 8).unwrap();
        assert!(out.max_abs_diff(&want).unwrap() < 1e-14);
        let id = IntMatrix::identity(2);
        assert_eq!(spatial_hausdorff(&[(c(1.0, 0.0), id.clone())], &g).unwrap(), g);
        let halves = spatial_hausdorff(&[(c(0.5, 0.0), id.clone()), (c(0.5, 0.0), id)], &g).unwrap();
        assert!(halves.max_abs_diff(&g).unwrap() < 1e-15);
        assert!(matches!(
            spatial_hausdorff(&[(c(1.0, 0.0), IntMatrix::identity(3))], &g),
            Err(Error::DimMismatch { .. })
        ));
    }

    #[test]
    fn h1r_examples() {
        assert!((h1r_norm(&cos1(), 256).unwrap() - 2.0).abs() < 1e-12);
        let sin2 = Spectrum::from_terms(DualGroup::ZLex(1), [(z(&[1]), c(0.0, -1.0)), (z(&[-1]), c(0.0, 1.0))]).unwrap();
        assert!((h1r_norm(&sin2, 256).unwrap() - 2.0).abs() < 1e-12);
        let konst = Spectrum::delta(z(&[0]), c(-3.0, 0.0));
        assert!((h1r_norm(&konst, 16).unwrap() - 3.0).abs() < 1e-14);
        let complex = Spectrum::delta(z(&[1]), c(1.0, 0.0));
        assert!(matches!(h1r_norm(&complex, 16), Err(Error::NotReal { .. })));
    }

    #[test]
    fn bmo_examples() {
        let d1 = Spectrum::delta(z(&[1]), c(1.0, 0.0));
        let e = Spectrum::empty(DualGroup::ZLex(1));
        assert!((bmo_upper(&d1, &e, 16).unwrap() - 1.0).abs() < 1e-14);
        assert!((bmo_upper(&e, &d1, 16).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(bmo_upper(&e, &e, 16).unwrap(), 0.0);

        assert!(bmoa_lower(&d1, 64, 0, 0).unwrap() >= 1.0 - 1e-12);
        assert_eq!(bmoa_lower(&e, 64, 5, 0).unwrap(), 0.0);
        let scaled = Spectrum::delta(z(&[2]), c(0.0, 2.5));
        assert!(bmoa_lower(&scaled, 64, 3, 1).unwrap() >= 2.5 - 1e-12);
        assert!(matches!(bmoa_lower(&cos1(), 64, 1, 0), Err(Error::NotAnalytic(_))));
    }

    #[test]
    fn torus_point_checks() {
        assert!(TorusPoint::new(vec![0.0, 0.999]).is_ok());
        assert_eq!(TorusPoint::new(vec![1.0]), Err(Error::InvalidPoint(1.0)));
        assert!(TorusPoint::new(vec![f64::NAN]).is_err());
        let x = TorusPoint::new(vec![0.25]).unwrap();
        assert!((evaluate(&cos1(), &x).unwrap()).norm() < 1e-15);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn roundtrip_and_parseval(seed in any::<u64>(), dim in 1usize..=2) {
            let mut r = random::rng(seed);
            let s = random::spectrum(&mut r, dim, 7, 12);
            let g = synthesize(&s, 16).unwrap();
            let back = analyze(&g);
            prop_assert!(back.max_abs_diff(&s).unwrap() <= 1e-10 * s.max_abs().max(1.0));
            let l2 = lp_norm(&g, 2.0).unwrap();
            prop_assert!((l2 - back.l2_norm()).abs() <= 1e-10 * l2.max(1.0));
            let l1 = lp_norm(&g, 1.0).unwrap();
            let linf = lp_norm(&g, f64::INFINITY).unwrap();
            prop_assert!(l1 <= l2 * (1.0 + 1e-12) && l2 <= linf * (1.0 + 1e-12));
            prop_assert!(linf <= s.l1_coeff() * (1.0 + 1e-12));
        }

        #[test]
        fn grid_matches_direct_evaluation(seed in any::<u64>()) {
            let mut r = random::rng(seed);
            let s = random::spectrum(&mut r, 2, 3, 6);
            let g = synthesize(&s, 8).unwrap();
            let k = [r.random_range(0..8i64), r.random_range(0..8i64)];
            let x = TorusPoint::new(vec![k[0] as f64 / 8.0, k[1] as f64 / 8.0]).unwrap();
            prop_assert!((g.at(&k) - evaluate(&s, &x).unwrap()).norm() < 1e-12 * s.l1_coeff().max(1.0));
        }

        #[test]
        fn bmoa_lower_is_monotone(seed in any::<u64>(), trials in 0usize..6) {
            let phi = random::analytic_spectrum(&mut random::rng(seed), 1, 5, 4);
            let a = bmoa_lower(&phi, 32, trials, seed).unwrap();
            let b = bmoa_lower(&phi, 32, trials + 3, seed).unwrap();
            prop_assert!(a <= b);
            prop_assert!(a <= bmo_upper(&phi, &Spectrum::empty(DualGroup::ZLex(1)), 32).unwrap() * (1.0 + 1e-9));
        }
    }
}
