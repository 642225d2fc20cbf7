//! Weyl-algebra layer of the quantum spacetime.
//!
//! Coordinates `q^μ` never appear explicitly: everything is expressed through
//! Weyl exponentials `e^{ik·q}`, whose product picks up a twist phase
//! `exp(i λ²/2 · k¹_μ σ^{μν} k²_ν)` for a point `σ` of the base `Σ₁`.

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `‖e‖ = 1` for sigma points.
pub const UNIT_TOL: f64 = 1e-12;

/// A covector `k_μ`, components `(k_0, k_1, k_2, k_3)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Momentum4(pub [f64; 4]);

impl Momentum4 {
    pub const ZERO: Momentum4 = Momentum4([0.0; 4]);

    pub fn new(k0: f64, k1: f64, k2: f64, k3: f64) -> Self {
        Momentum4([k0, k1, k2, k3])
    }

    pub fn energy(&self) -> f64 {
        self.0[0]
    }

    pub fn spatial(&self) -> [f64; 3] {
        [self.0[1], self.0[2], self.0[3]]
    }

    pub fn from_parts(k0: f64, spatial: [f64; 3]) -> Self {
        Momentum4([k0, spatial[0], spatial[1], spatial[2]])
    }

    /// Euclidean square `Σ_ν k_ν²`.
    pub fn euclid_sq(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum()
    }

    pub fn euclid_norm(&self) -> f64 {
        self.euclid_sq().sqrt()
    }

    pub fn scale(&self, t: f64) -> Self {
        Momentum4(self.0.map(|c| c * t))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0.0)
    }

    /// Pairing `k_ν x^ν` with a position vector.
    pub fn pair(&self, x: &[f64; 4]) -> f64 {
        self.0.iter().zip(x).map(|(k, x)| k * x).sum()
    }
}

impl Add for Momentum4 {
    type Output = Momentum4;
    fn add(self, rhs: Self) -> Self {
        Momentum4(std::array::from_fn(|i| self.0[i] + rhs.0[i]))
    }
}

impl Sub for Momentum4 {
    type Output = Momentum4;
    fn sub(self, rhs: Self) -> Self {
        Momentum4(std::array::from_fn(|i| self.0[i] - rhs.0[i]))
    }
}

impl Neg for Momentum4 {
    type Output = Momentum4;
    fn neg(self) -> Self {
        Momentum4(self.0.map(|c| -c))
    }
}

impl Mul<Momentum4> for f64 {
    type Output = Momentum4;
    fn mul(self, rhs: Momentum4) -> Momentum4 {
        rhs.scale(self)
    }
}

impl Index<usize> for Momentum4 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// The two sheets of `Σ₁`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sheet {
    Plus,
    Minus,
}

impl Sheet {
    pub const BOTH: [Sheet; 2] = [Sheet::Plus, Sheet::Minus];

    pub fn sign(self) -> f64 {
        match self {
            Sheet::Plus => 1.0,
            Sheet::Minus => -1.0,
        }
    }
}

impl fmt::Display for Sheet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sheet::Plus => "+",
            Sheet::Minus => "-",
        })
    }
}

/// A point of `Σ₁`: the antisymmetric matrix with electric part `e` and
/// magnetic part `sign · e`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaPoint {
    e: [f64; 3],
    sheet: Sheet,
}

impl SigmaPoint {
    pub fn new(e: [f64; 3], sheet: Sheet) -> Result<Self> {
        let norm = e.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::NonUnitDirection { norm });
        }
        Ok(SigmaPoint { e, sheet })
    }

    pub fn direction(&self) -> [f64; 3] {
        self.e
    }

    pub fn sheet(&self) -> Sheet {
        self.sheet
    }

    /// `σ^{μν}` with `σ^{0i} = e_i` and `σ^{ij} = ±ε_{ijk} e_k`.
    pub fn matrix(&self) -> [[f64; 4]; 4] {
        let [e1, e2, e3] = self.e;
        let s = self.sheet.sign();
        [[0.0, e1, e2, e3], [-e1, 0.0, s * e3, -s * e2], [-e2, -s * e3, 0.0, s * e1], [-e3, s * e2, -s * e1, 0.0]]
    }

    /// `k¹_μ σ^{μν} k²_ν`.
    pub fn bilinear(&self, k1: &Momentum4, k2: &Momentum4) -> f64 {
        let m = self.matrix();
        let mut acc = 0.0;
        for (mu, row) in m.iter().enumerate() {
            for (nu, s) in row.iter().enumerate() {
                acc += k1[mu] * s * k2[nu];
            }
        }
        acc
    }
}

fn check_length(lambda_p: f64) -> Result<()> {
    if lambda_p.is_finite() && lambda_p > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidLength(lambda_p))
    }
}

/// Twist phase `exp(i λ_P²/2 · k¹σk²)` of the Moyal product.
pub fn twist_phase(k1: &Momentum4, k2: &Momentum4, sigma: &SigmaPoint, lambda_p: f64) -> Result<Complex64> {
    check_length(lambda_p)?;
    let exponent = 0.5 * lambda_p * lambda_p * sigma.bilinear(k1, k2);
    Ok(Complex64::from_polar(1.0, exponent))
}

/// A Weyl exponential `phase · e^{ik·q}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeylElement {
    pub momentum: Momentum4,
    pub phase: Complex64,
}

impl WeylElement {
    pub fn new(momentum: Momentum4, phase: Complex64) -> Result<Self> {
        if !momentum.is_finite() {
            return Err(Error::NonFiniteMomentum { index: 0 });
        }
        if (phase.norm() - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidArgument(format!("phase modulus {} is not 1", phase.norm())));
        }
        Ok(WeylElement { momentum, phase })
    }

    pub fn identity() -> Self {
        WeylElement { momentum: Momentum4::ZERO, phase: Complex64::new(1.0, 0.0) }
    }
}

/// Product of Weyl exponentials in the representation labelled by `sigma`.
pub fn weyl_product(a: &WeylElement, b: &WeylElement, sigma: &SigmaPoint, lambda_p: f64) -> Result<WeylElement> {
    let twist = twist_phase(&a.momentum, &b.momentum, sigma, lambda_p)?;
    Ok(WeylElement { momentum: a.momentum + b.momentum, phase: a.phase * b.phase * twist })
}

/// Generating functional of the optimally localized state around `x`.
pub fn optimal_state_eval(k: &Momentum4, x: &[f64; 4], lambda_p: f64) -> Complex64 {
    let modulus = (-0.5 * lambda_p * lambda_p * k.euclid_sq()).exp();
    Complex64::from_polar(modulus, k.pair(x))
}

type MomentumMap = Arc<dyn Fn(&Momentum4) -> Complex64 + Send + Sync>;

/// A state known through its values on Weyl exponentials.
#[derive(Clone)]
pub struct StateFunctional {
    eval: MomentumMap,
    pub center: [f64; 4],
    pub lambda_p: f64,
}

impl fmt::Debug for StateFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StateFunctional")
            .field("center", &self.center)
            .field("lambda_p", &self.lambda_p)
            .finish_non_exhaustive()
    }
}

impl StateFunctional {
    pub fn new<F>(eval: F, center: [f64; 4], lambda_p: f64) -> Result<Self>
    where
        F: Fn(&Momentum4) -> Complex64 + Send + Sync + 'static,
    {
        check_length(lambda_p)?;
        Ok(StateFunctional { eval: Arc::new(eval), center, lambda_p })
    }

    pub fn optimal(center: [f64; 4], lambda_p: f64) -> Result<Self> {
        Self::new(move |k| optimal_state_eval(k, &center, lambda_p), center, lambda_p)
    }

    pub fn eval(&self, k: &Momentum4) -> Complex64 {
        (self.eval)(k)
    }

    /// Largest violation of `ω(1) = 1` and `ω(e^{-ikq}) = conj ω(e^{ikq})`
    /// over the given probes.
    pub fn invariant_defect(&self, probes: &[Momentum4]) -> f64 {
        let norm = (self.eval(&Momentum4::ZERO) - 1.0).norm();
        probes.iter().map(|k| (self.eval(&-*k) - self.eval(k).conj()).norm()).fold(norm, f64::max)
    }
}

/// First moment and variance of one coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
}

impl Moments {
    pub fn std_dev(&self) -> f64 {
        self.variance.max(0.0).sqrt()
    }
}

fn five_point(f: &dyn Fn(f64) -> Complex64, h: f64) -> (Complex64, Complex64) {
    let (fp1, fm1, fp2, fm2, f0) = (f(h), f(-h), f(2.0 * h), f(-2.0 * h), f(0.0));
    let first = (-fp2 + 8.0 * fp1 - 8.0 * fm1 + fm2) / (12.0 * h);
    let second = (-fp2 + 16.0 * fp1 - 30.0 * f0 + 16.0 * fm1 - fm2) / (12.0 * h * h);
    (first, second)
}

/// Default finite-difference step for `state_moments`.
pub fn default_step(lambda_p: f64) -> f64 {
    1e-3 / lambda_p
}

/// Mean and variance of `q^μ` from derivatives of `t ↦ ω(e^{it q^μ})` at 0.
///
/// Uses a five-point central stencil at `step` and `step/2`, combined by one
/// Richardson step.
pub fn state_moments(s: &StateFunctional, mu_index: usize, step: f64) -> Result<Moments> {
    if mu_index > 3 {
        return Err(Error::InvalidArgument(format!("coordinate index {mu_index} out of range")));
    }
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {step}")));
    }
    let along = |t: f64| {
        let mut k = [0.0; 4];
        k[mu_index] = t;
        s.eval(&Momentum4(k))
    };
    let (d1_h, d2_h) = five_point(&along, step);
    let (d1_half, d2_half) = five_point(&along, 0.5 * step);
    let d1 = (16.0 * d1_half - d1_h) / 15.0;
    let d2 = (16.0 * d2_half - d2_h) / 15.0;

    // φ'(0) = i⟨q⟩, φ''(0) = −⟨q²⟩
    let mean = d1.im;
    let second = -d2.re;
    let variance = second - mean * mean;
    if !variance.is_finite() || variance < -1e-6 * second.abs().max(1.0) {
        return Err(Error::Differentiation(format!("variance {variance:e} along axis {mu_index} (step {step:e})")));
    }
    Ok(Moments { mean, variance })
}

/// Evaluates both uncertainty relations for `(Δq⁰, Δq¹, Δq², Δq³)`.
pub fn check_stur(deltas: &[f64; 4], lambda_p: f64) -> (bool, bool) {
    let bound = 0.5 * lambda_p * lambda_p;
    let time_space = deltas[0] * (deltas[1] + deltas[2] + deltas[3]);
    let space_space = deltas[1] * deltas[2] + deltas[1] * deltas[3] + deltas[2] * deltas[3];
    (time_space >= bound, space_space >= bound)
}

/// A test function carried by its Fourier transform.
#[derive(Clone)]
pub struct TestFunction {
    name: String,
    fhat: MomentumMap,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction").field("name", &self.name).finish_non_exhaustive()
    }
}

impl TestFunction {
    pub fn new<F>(name: impl Into<String>, fhat: F) -> Self
    where
        F: Fn(&Momentum4) -> Complex64 + Send + Sync + 'static,
    {
        TestFunction { name: name.into(), fhat: Arc::new(fhat) }
    }

    /// `f̂ ≡ c`; `c = 1` is the formal delta at the origin.
    pub fn constant(c: Complex64) -> Self {
        Self::new(format!("const({c})"), move |_| c)
    }

    /// `f̂(k) = exp(−width² Σ_ν k_ν² / 2)`.
    pub fn gaussian(width: f64) -> Self {
        Self::new(format!("gauss({width})"), move |k| Complex64::new((-0.5 * width * width * k.euclid_sq()).exp(), 0.0))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn fhat(&self, k: &Momentum4) -> Complex64 {
        (self.fhat)(k)
    }
}

impl Add for &TestFunction {
    type Output = TestFunction;
    fn add(self, rhs: &TestFunction) -> TestFunction {
        let (a, b) = (self.fhat.clone(), rhs.fhat.clone());
        TestFunction::new(format!("{}+{}", self.name, rhs.name), move |k| a(k) + b(k))
    }
}

/// The functional `I(f)` on a Weyl exponential: `f̂(−k)`.
pub fn integral_functional(f: &TestFunction, k: &Momentum4) -> Result<Complex64> {
    let value = f.fhat(&-*k);
    if value.re.is_finite() && value.im.is_finite() {
        Ok(value)
    } else {
        Err(Error::InvalidArgument(format!("test function {} is not finite at -k", f.name)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ez(sheet: Sheet) -> SigmaPoint {
        SigmaPoint::new([0.0, 0.0, 1.0], sheet).unwrap()
    }

    #[test]
    fn sigma_rejects_non_unit() {
        assert!(matches!(SigmaPoint::new([1.0, 1.0, 0.0], Sheet::Plus), Err(Error::NonUnitDirection { .. })));
    }

    #[test]
    fn sigma_matrix_is_antisymmetric_and_satisfies_quantum_conditions() {
        let s = 1.0 / 3f64.sqrt();
        for sheet in Sheet::BOTH {
            let m = SigmaPoint::new([s, -s, s], sheet).unwrap().matrix();
            for (mu, row) in m.iter().enumerate() {
                for (nu, &entry) in row.iter().enumerate() {
                    assert_abs_diff_eq!(entry, -m[nu][mu]);
                }
            }
            // σ_{μν}σ^{μν} with η = diag(+,−,−,−): electric terms flip sign
            let eta = [1.0, -1.0, -1.0, -1.0];
            let mut contraction = 0.0;
            for mu in 0..4 {
                for nu in 0..4 {
                    contraction += eta[mu] * eta[nu] * m[mu][nu] * m[mu][nu];
                }
            }
            assert_abs_diff_eq!(contraction, 0.0, epsilon = 1e-14);
            // Pfaffian σ01σ23 − σ02σ13 + σ03σ12 = ±1
            let pf = m[0][1] * m[2][3] - m[0][2] * m[1][3] + m[0][3] * m[1][2];
            assert_abs_diff_eq!(pf * pf, 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn twist_phase_hand_value() {
        let k1 = Momentum4::new(1.0, 0.0, 0.0, 0.0);
        let k2 = Momentum4::new(0.0, 0.0, 0.0, 1.0);
        let p = twist_phase(&k1, &k2, &ez(Sheet::Plus), 1.0).unwrap();
        let expected = Complex64::from_polar(1.0, 0.5);
        assert_abs_diff_eq!(p.re, expected.re, epsilon = 1e-15);
        assert_abs_diff_eq!(p.im, expected.im, epsilon = 1e-15);
    }

    #[test]
    fn twist_phase_of_equal_momenta_is_one() {
        let k = Momentum4::new(0.3, -1.2, 2.5, 0.7);
        let p = twist_phase(&k, &k, &ez(Sheet::Minus), 1.7).unwrap();
        assert_abs_diff_eq!(p.re, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(p.im, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn twist_phase_rejects_bad_length() {
        let k = Momentum4::ZERO;
        assert!(twist_phase(&k, &k, &ez(Sheet::Plus), 0.0).is_err());
        assert!(twist_phase(&k, &k, &ez(Sheet::Plus), f64::NAN).is_err());
    }

    #[test]
    fn weyl_identity_and_inverse() {
        let a = WeylElement::new(Momentum4::new(1.0, 2.0, -1.0, 0.5), Complex64::from_polar(1.0, 0.4)).unwrap();
        let sigma = ez(Sheet::Plus);
        let same = weyl_product(&a, &WeylElement::identity(), &sigma, 1.0).unwrap();
        assert_eq!(same, a);

        let plain = WeylElement::new(a.momentum, Complex64::new(1.0, 0.0)).unwrap();
        let inv = WeylElement::new(-a.momentum, Complex64::new(1.0, 0.0)).unwrap();
        let prod = weyl_product(&plain, &inv, &sigma, 1.3).unwrap();
        assert!(prod.momentum.is_zero());
        assert_abs_diff_eq!(prod.phase.re, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn optimal_state_values() {
        let x = [0.0; 4];
        assert_eq!(optimal_state_eval(&Momentum4::ZERO, &[1.0, 2.0, 3.0, 4.0], 1.0), Complex64::new(1.0, 0.0));
        let v = optimal_state_eval(&Momentum4::new(1.0, 0.0, 0.0, 0.0), &x, 1.0);
        assert_abs_diff_eq!(v.re, 0.606_530_659_712_633_4, epsilon = 1e-15);
        assert_abs_diff_eq!(v.im, 0.0);
    }

    #[test]
    fn optimal_state_modulus_is_center_independent() {
        let k = Momentum4::new(0.4, -0.2, 1.1, 0.3);
        let a = optimal_state_eval(&k, &[0.0; 4], 0.8).norm();
        let b = optimal_state_eval(&k, &[5.0, -3.0, 2.0, 9.0], 0.8).norm();
        assert_abs_diff_eq!(a, b, epsilon = 1e-15);
    }

    #[test]
    fn moments_of_optimal_state() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let s = StateFunctional::optimal(x, 1.0).unwrap();
        for (mu, &xm) in x.iter().enumerate() {
            let m = state_moments(&s, mu, default_step(1.0)).unwrap();
            assert_abs_diff_eq!(m.mean, xm, epsilon = 1e-6);
            assert_abs_diff_eq!(m.variance, 1.0, epsilon = 1e-6);
        }
        let s2 = StateFunctional::optimal([0.0; 4], 2.0).unwrap();
        let m = state_moments(&s2, 2, default_step(2.0)).unwrap();
        assert_abs_diff_eq!(m.variance, 4.0, epsilon = 1e-5);
    }

    #[test]
    fn moments_report_negative_variance() {
        // exp(+t²/2): not positive definite, second moment negative
        let bad = StateFunctional::new(|k: &Momentum4| Complex64::new((0.5 * k.euclid_sq()).exp(), 0.0), [0.0; 4], 1.0)
            .unwrap();
        assert!(matches!(state_moments(&bad, 0, 1e-3), Err(Error::Differentiation(_))));
        assert!(state_moments(&bad, 4, 1e-3).is_err());
    }

    #[test]
    fn stur_cases() {
        assert_eq!(check_stur(&[1.0; 4], 1.0), (true, true));
        assert_eq!(check_stur(&[0.5; 4], 0.5), (true, true));
        assert_eq!(check_stur(&[0.0, 1.0, 1.0, 1.0], 1.0), (false, true));
        assert_eq!(check_stur(&[1.0, 0.1, 0.1, 0.1], 1.0), (false, false));
    }

    #[test]
    fn integral_functional_values() {
        let k = Momentum4::new(1.0, 0.0, 0.0, 0.0);
        let delta = TestFunction::constant(Complex64::new(1.0, 0.0));
        assert_eq!(integral_functional(&delta, &k).unwrap(), Complex64::new(1.0, 0.0));
        let g = TestFunction::gaussian(1.0);
        assert_abs_diff_eq!(integral_functional(&g, &k).unwrap().re, (-0.5f64).exp(), epsilon = 1e-15);

        let sum = &g + &delta;
        let probe = Momentum4::new(0.2, -0.7, 0.1, 1.5);
        let lhs = integral_functional(&sum, &probe).unwrap();
        let rhs = integral_functional(&g, &probe).unwrap() + integral_functional(&delta, &probe).unwrap();
        assert_abs_diff_eq!((lhs - rhs).norm(), 0.0, epsilon = 1e-15);

        let shifted = TestFunction::new("odd", |k: &Momentum4| Complex64::new(k[0], 0.0));
        assert_eq!(integral_functional(&shifted, &k).unwrap().re, -1.0);
        let broken = TestFunction::new("inf", |_: &Momentum4| Complex64::new(f64::INFINITY, 0.0));
        assert!(integral_functional(&broken, &k).is_err());
    }

    #[test]
    fn state_invariants_hold_for_optimal_state() {
        let s = StateFunctional::optimal([0.5, -1.0, 2.0, 0.0], 1.3).unwrap();
        let probes = [Momentum4::new(0.1, 0.2, -0.3, 0.4), Momentum4::new(-2.0, 0.0, 1.0, 0.5)];
        assert!(s.invariant_defect(&probes) < 1e-14);
    }
}
