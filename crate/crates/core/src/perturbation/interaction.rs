use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::algebra::{integral_functional, Momentum4, TestFunction};
use crate::error::{Error, Result};
use crate::kernel::{KernelEvaluator, MomentumConfig};

/// A local field `∫ dx f(x) ∂^{a₁}φ(x)⋯∂^{aₙ}φ(x)`.
#[derive(Debug, Clone)]
pub struct LocalFieldSpec {
    n: usize,
    derivatives: Vec<[u32; 4]>,
    coefficient: TestFunction,
}

impl LocalFieldSpec {
    /// `derivatives` holds one multi-index per factor, or is empty for `a = 0`.
    pub fn new(n: usize, derivatives: Vec<[u32; 4]>, coefficient: TestFunction) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("field power must be at least 1".into()));
        }
        if !derivatives.is_empty() && derivatives.len() != n {
            return Err(Error::SizeMismatch { left: derivatives.len(), right: n });
        }
        let derivatives = if derivatives.is_empty() { vec![[0; 4]; n] } else { derivatives };
        Ok(LocalFieldSpec { n, derivatives, coefficient })
    }

    pub fn power(n: usize, coefficient: TestFunction) -> Result<Self> {
        Self::new(n, Vec::new(), coefficient)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn derivatives(&self) -> &[[u32; 4]] {
        &self.derivatives
    }

    pub fn coefficient(&self) -> &TestFunction {
        &self.coefficient
    }
}

/// The non-local counterpart of a [`LocalFieldSpec`]: in momentum space
/// `ĝ(−Σkʲ) · ∏ⱼ (ikʲ)^{aⱼ} · Λₙ(k̲)`.
#[derive(Clone)]
pub struct EffectiveInteraction {
    spec: LocalFieldSpec,
    kernel: Arc<dyn KernelEvaluator>,
    lambda_p: f64,
}

impl fmt::Debug for EffectiveInteraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EffectiveInteraction")
            .field("spec", &self.spec)
            .field("kernel", &self.kernel.name())
            .field("lambda_p", &self.lambda_p)
            .finish()
    }
}

pub fn effective_interaction(
    spec: LocalFieldSpec,
    kernel: Arc<dyn KernelEvaluator>,
    lambda_p: f64,
) -> Result<EffectiveInteraction> {
    if !(lambda_p.is_finite() && lambda_p >= 0.0) {
        return Err(Error::InvalidLength(lambda_p));
    }
    Ok(EffectiveInteraction { spec, kernel, lambda_p })
}

impl EffectiveInteraction {
    pub fn spec(&self) -> &LocalFieldSpec {
        &self.spec
    }

    /// `Λ₁ ≡ 1`, so a single field carries no kernel.
    pub fn has_kernel_factor(&self) -> bool {
        self.spec.n >= 2
    }

    pub fn integrand(&self, cfg: &MomentumConfig) -> Result<Complex64> {
        if cfg.n() != self.spec.n {
            return Err(Error::SizeMismatch { left: cfg.n(), right: self.spec.n });
        }
        let total = cfg.momenta().iter().fold(Momentum4::ZERO, |acc, k| acc + *k);
        let mut value = integral_functional(&self.spec.coefficient, &total)?;
        for (k, a) in cfg.momenta().iter().zip(&self.spec.derivatives) {
            for mu in 0..4 {
                value *= Complex64::new(0.0, k[mu]).powu(a[mu]);
            }
        }
        if self.has_kernel_factor() {
            value *= self.kernel.evaluate(cfg, self.lambda_p);
        }
        Ok(value)
    }

    /// Position-space form of the interaction as a display string.
    pub fn position_form(&self) -> String {
        let n = self.spec.n;
        let fields: Vec<String> = self
            .spec
            .derivatives
            .iter()
            .enumerate()
            .map(|(j, a)| {
                if a.iter().all(|&x| x == 0) {
                    format!("φ(x{})", j + 1)
                } else {
                    format!("∂^({},{},{},{})φ(x{})", a[0], a[1], a[2], a[3], j + 1)
                }
            })
            .collect();
        let g = self.spec.coefficient.name();
        if self.has_kernel_factor() {
            format!("∫ dx dx̲^{n} {g}(x) Γ{n}(x̲; x) {}", fields.join(" "))
        } else {
            format!("∫ dx {g}(x) {}", fields.join(" ").replace("x1", "x"))
        }
    }
}
