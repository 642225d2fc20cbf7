//! Rotation-invariant probability measure on the sphere, discretized as a
//! Gauss–Legendre rule in `cos θ` times a trapezoid rule in `φ`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::MomentumConfig;
use crate::algebra::{Sheet, SigmaPoint};
use crate::error::{Error, Result};

/// Nodes and weights of Gauss–Legendre quadrature on `[-1, 1]`.
///
/// Newton iteration on `P_n` from the Tricomi initial guesses.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    let nf = n as f64;
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((x, w));
    }
    out.reverse();
    out
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Product rule on the unit sphere with weights summing to one.
#[derive(Debug, Clone)]
pub struct SphereQuadrature {
    nodes: Vec<([f64; 3], f64)>,
    order: usize,
}

impl SphereQuadrature {
    /// `order` Gauss–Legendre nodes in `cos θ`, `2·order` uniform nodes in `φ`.
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidArgument("quadrature order must be positive".into()));
        }
        Self::with_grid(order, 2 * order)
    }

    pub fn with_grid(n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta == 0 || n_phi == 0 {
            return Err(Error::InvalidArgument("empty quadrature grid".into()));
        }
        let gl = gauss_legendre(n_theta);
        let mut nodes = Vec::with_capacity(n_theta * n_phi);
        for &(c, w) in &gl {
            let s = (1.0 - c * c).max(0.0).sqrt();
            for m in 0..n_phi {
                let phi = 2.0 * PI * m as f64 / n_phi as f64;
                let e = [s * phi.cos(), s * phi.sin(), c];
                nodes.push((e, 0.5 * w / n_phi as f64));
            }
        }
        let total: f64 = nodes.iter().map(|n| n.1).sum();
        for n in &mut nodes {
            n.1 /= total;
        }
        Ok(SphereQuadrature { nodes, order: n_theta })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn nodes(&self) -> &[([f64; 3], f64)] {
        &self.nodes
    }

    pub fn total_weight(&self) -> f64 {
        self.nodes.iter().map(|n| n.1).sum()
    }
}

/// `∫_{Σ₁} dμ(σ) exp(i λ_P²/2 Σ_{j<m} kʲσkᵐ)` by direct quadrature.
///
/// Each node builds the full `σ` matrix and accumulates the pairwise
/// bilinear forms, so nothing is shared with the closed form.
pub fn lambda_quadrature(cfg: &MomentumConfig, lambda_p: f64, quad: &SphereQuadrature) -> Complex64 {
    let ks = cfg.momenta();
    let half_l2 = 0.5 * lambda_p * lambda_p;
    let mut acc = Complex64::new(0.0, 0.0);
    for sheet in Sheet::BOTH {
        for &(e, w) in quad.nodes() {
            let sigma = match SigmaPoint::new(e, sheet) {
                Ok(s) => s,
                Err(_) => continue,
            };
            let mut exponent = 0.0;
            for j in 0..ks.len() {
                for m in j + 1..ks.len() {
                    exponent += sigma.bilinear(&ks[j], &ks[m]);
                }
            }
            acc += w * Complex64::from_polar(1.0, half_l2 * exponent);
        }
    }
    0.5 * acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let rule = gauss_legendre(8);
        let w: f64 = rule.iter().map(|r| r.1).sum();
        assert_abs_diff_eq!(w, 2.0, epsilon = 1e-14);
        // ∫ x^14 = 2/15, exact for 8 nodes (degree ≤ 15)
        let i: f64 = rule.iter().map(|(x, w)| w * x.powi(14)).sum();
        assert_abs_diff_eq!(i, 2.0 / 15.0, epsilon = 1e-14);
        assert!(rule.windows(2).all(|p| p[0].0 < p[1].0));
    }

    #[test]
    fn sphere_rule_is_normalized_and_on_sphere() {
        let q = SphereQuadrature::new(16).unwrap();
        assert_abs_diff_eq!(q.total_weight(), 1.0, epsilon = 1e-12);
        for (e, _) in q.nodes() {
            let r = (e[0] * e[0] + e[1] * e[1] + e[2] * e[2]).sqrt();
            assert_abs_diff_eq!(r, 1.0, epsilon = 1e-12);
        }
        assert!(SphereQuadrature::new(0).is_err());
    }

    #[test]
    fn sphere_average_of_plane_wave_is_sinc() {
        let q = SphereQuadrature::new(32).unwrap();
        let a: [f64; 3] = [1.2, -0.4, 2.0];
        let r = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
        let avg: Complex64 = q
            .nodes()
            .iter()
            .map(|(e, w)| w * Complex64::from_polar(1.0, a[0] * e[0] + a[1] * e[1] + a[2] * e[2]))
            .sum();
        assert_abs_diff_eq!(avg.re, r.sin() / r, epsilon = 1e-13);
        assert_abs_diff_eq!(avg.im, 0.0, epsilon = 1e-13);
    }

    #[test]
    fn zero_config_gives_exactly_one() {
        let q = SphereQuadrature::new(8).unwrap();
        let v = lambda_quadrature(&MomentumConfig::zeros(3).unwrap(), 1.0, &q);
        assert_abs_diff_eq!(v.re, 1.0, epsilon = 1e-14);
        assert_eq!(v.im, 0.0);
    }
}
