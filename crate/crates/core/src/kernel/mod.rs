//! The non-commutativity kernel `Λₙ(k̲)`.
//!
//! `Λₙ` is the average over `Σ₁` of the product of all pairwise twist phases
//! of an ordered momentum tuple. It has the closed form
//! `½(sinc β₊ + sinc β₋)` where `β± = λ_P²/2 · ‖v±‖` and
//!
//! ```text
//! v± = Σ_{j<l} (k₀ʲ k⃗ˡ − k₀ˡ k⃗ʲ ± k⃗ʲ × k⃗ˡ)
//! ```
//!
//! The sphere quadrature in [`quadrature`] evaluates the same average directly
//! from the `σ` matrices and serves as the independent check of the closed form.

pub mod quadrature;
pub mod registry;

use serde::{Deserialize, Serialize};

use crate::algebra::{Momentum4, Sheet};
use crate::error::{Error, Result};

pub use quadrature::{lambda_quadrature, SphereQuadrature};
pub use registry::{KernelEvaluator, KernelRegistry};

/// Ordered tuple `(k¹, …, kⁿ)`, `n ≥ 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentumConfig {
    momenta: Vec<Momentum4>,
}

impl MomentumConfig {
    pub fn new(momenta: Vec<Momentum4>) -> Result<Self> {
        if momenta.is_empty() {
            return Err(Error::EmptyConfig);
        }
        if let Some(index) = momenta.iter().position(|k| !k.is_finite()) {
            return Err(Error::NonFiniteMomentum { index });
        }
        Ok(MomentumConfig { momenta })
    }

    /// Builds a configuration from `4n` flat components.
    pub fn from_flat(values: &[f64]) -> Result<Self> {
        if !values.len().is_multiple_of(4) {
            return Err(Error::InvalidArgument(format!("{} components is not a multiple of 4", values.len())));
        }
        Self::new(values.chunks_exact(4).map(|c| Momentum4([c[0], c[1], c[2], c[3]])).collect())
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![Momentum4::ZERO; n])
    }

    pub fn n(&self) -> usize {
        self.momenta.len()
    }

    pub fn momenta(&self) -> &[Momentum4] {
        &self.momenta
    }

    pub fn flat(&self) -> Vec<f64> {
        self.momenta.iter().flat_map(|k| k.0).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.momenta.iter().all(Momentum4::is_zero)
    }

    pub fn scale(&self, t: f64) -> Self {
        MomentumConfig { momenta: self.momenta.iter().map(|k| k.scale(t)).collect() }
    }

    /// `self − t · other`, component-wise.
    pub fn sub_scaled(&self, other: &MomentumConfig, t: f64) -> Result<Self> {
        if self.n() != other.n() {
            return Err(Error::SizeMismatch { left: self.n(), right: other.n() });
        }
        Ok(MomentumConfig { momenta: self.momenta.iter().zip(&other.momenta).map(|(a, b)| *a - b.scale(t)).collect() })
    }

    pub fn neg(&self) -> Self {
        self.scale(-1.0)
    }

    /// Applies a 3×3 matrix to every spatial part.
    pub fn map_spatial(&self, m: &[[f64; 3]; 3]) -> Self {
        let momenta = self
            .momenta
            .iter()
            .map(|k| {
                let s = k.spatial();
                let r = std::array::from_fn(|i| m[i][0] * s[0] + m[i][1] * s[1] + m[i][2] * s[2]);
                Momentum4::from_parts(k.energy(), r)
            })
            .collect();
        MomentumConfig { momenta }
    }

    /// Replaces one component `(j, μ)` (both zero-based).
    pub fn with_component(&self, j: usize, mu: usize, value: f64) -> Self {
        let mut out = self.clone();
        out.momenta[j].0[mu] = value;
        out
    }

    /// `max_{j<l} ‖kʲ‖·‖kˡ‖` (Euclidean four-norms); zero for `n = 1`.
    pub fn pair_scale(&self) -> f64 {
        let norms: Vec<f64> = self.momenta.iter().map(Momentum4::euclid_norm).collect();
        let mut best = 0.0f64;
        for j in 0..norms.len() {
            for l in j + 1..norms.len() {
                best = best.max(norms[j] * norms[l]);
            }
        }
        best
    }
}

pub(crate) fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub(crate) fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// The length-free pair sum `v±`.
pub fn pair_vector(cfg: &MomentumConfig, sheet: Sheet) -> [f64; 3] {
    let s = sheet.sign();
    let ks = cfg.momenta();
    let mut v = [0.0; 3];
    for j in 0..ks.len() {
        for l in j + 1..ks.len() {
            let (a, b) = (ks[j], ks[l]);
            let (sa, sb) = (a.spatial(), b.spatial());
            let c = cross(sa, sb);
            for i in 0..3 {
                v[i] += a.energy() * sb[i] - b.energy() * sa[i] + s * c[i];
            }
        }
    }
    v
}

/// `v±` and `β± = λ_P²/2 · ‖v±‖`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaPair {
    pub v_plus: [f64; 3],
    pub v_minus: [f64; 3],
    pub beta_plus: f64,
    pub beta_minus: f64,
    pub lambda_p: f64,
}

impl BetaPair {
    /// `(β₊² + β₋²)/12`, which bounds `|Λₙ − 1|`.
    pub fn limit_bound(&self) -> f64 {
        (self.beta_plus * self.beta_plus + self.beta_minus * self.beta_minus) / 12.0
    }
}

pub fn beta_pair(cfg: &MomentumConfig, lambda_p: f64) -> BetaPair {
    let v_plus = pair_vector(cfg, Sheet::Plus);
    let v_minus = pair_vector(cfg, Sheet::Minus);
    let half_l2 = 0.5 * lambda_p * lambda_p;
    BetaPair { v_plus, v_minus, beta_plus: half_l2 * norm3(v_plus), beta_minus: half_l2 * norm3(v_minus), lambda_p }
}

const SINC_SERIES_CUTOFF: f64 = 1e-4;

/// `sin x / x` with `sinc(0) = 1`; Taylor polynomial near zero.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < SINC_SERIES_CUTOFF {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// Closed form `½(sinc β₊ + sinc β₋)`.
pub fn lambda_closed(cfg: &MomentumConfig, lambda_p: f64) -> f64 {
    let b = beta_pair(cfg, lambda_p);
    lambda_from_betas(b.beta_plus, b.beta_minus)
}

pub fn lambda_from_betas(beta_plus: f64, beta_minus: f64) -> f64 {
    0.5 * (sinc(beta_plus) + sinc(beta_minus))
}

/// `Λ = Λ⁽ᵟ⁾ + Λ⁽ᶜ⁾` with `Λ⁽ᵟ⁾ = exp(−β₊² − β₋²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelSplit {
    pub total: f64,
    pub delta_part: f64,
    pub continuous_part: f64,
}

pub fn lambda_split(cfg: &MomentumConfig, lambda_p: f64) -> KernelSplit {
    let b = beta_pair(cfg, lambda_p);
    split_from_betas(b.beta_plus, b.beta_minus)
}

pub fn split_from_betas(beta_plus: f64, beta_minus: f64) -> KernelSplit {
    let total = lambda_from_betas(beta_plus, beta_minus);
    let delta_part = (-beta_plus * beta_plus - beta_minus * beta_minus).exp();
    KernelSplit { total, delta_part, continuous_part: total - delta_part }
}
