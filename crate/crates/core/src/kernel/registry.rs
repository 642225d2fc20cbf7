//! Named kernel evaluators, selectable at runtime.
//!
//! Every evaluator maps a momentum configuration to a real kernel value.
//! The default registry holds the closed form, the sphere-quadrature oracle,
//! both parts of the `Λ⁽ᵟ⁾ + Λ⁽ᶜ⁾` split, and the local (commutative) kernel.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::{lambda_closed, lambda_quadrature, lambda_split, MomentumConfig, SphereQuadrature};
use crate::error::{Error, Result};

pub trait KernelEvaluator: Send + Sync {
    fn name(&self) -> &'static str;

    fn description(&self) -> &'static str;

    fn evaluate(&self, cfg: &MomentumConfig, lambda_p: f64) -> f64;
}

pub struct ClosedForm;

impl KernelEvaluator for ClosedForm {
    fn name(&self) -> &'static str {
        "closed"
    }
    fn description(&self) -> &'static str {
        "½(sinc β₊ + sinc β₋)"
    }
    fn evaluate(&self, cfg: &MomentumConfig, lambda_p: f64) -> f64 {
        lambda_closed(cfg, lambda_p)
    }
}

/// Real part of the sphere average.
pub struct Quadrature {
    rule: SphereQuadrature,
}

impl Quadrature {
    pub fn new(order: usize) -> Result<Self> {
        Ok(Quadrature { rule: SphereQuadrature::new(order)? })
    }
}

impl KernelEvaluator for Quadrature {
    fn name(&self) -> &'static str {
        "quadrature"
    }
    fn description(&self) -> &'static str {
        "Gauss-Legendre x trapezoid average over both sheets of the sphere"
    }
    fn evaluate(&self, cfg: &MomentumConfig, lambda_p: f64) -> f64 {
        lambda_quadrature(cfg, lambda_p, &self.rule).re
    }
}

pub struct DeltaPart;

impl KernelEvaluator for DeltaPart {
    fn name(&self) -> &'static str {
        "delta"
    }
    fn description(&self) -> &'static str {
        "exp(−β₊² − β₋²)"
    }
    fn evaluate(&self, cfg: &MomentumConfig, lambda_p: f64) -> f64 {
        lambda_split(cfg, lambda_p).delta_part
    }
}

pub struct ContinuousPart;

impl KernelEvaluator for ContinuousPart {
    fn name(&self) -> &'static str {
        "continuous"
    }
    fn description(&self) -> &'static str {
        "closed form minus the delta part"
    }
    fn evaluate(&self, cfg: &MomentumConfig, lambda_p: f64) -> f64 {
        lambda_split(cfg, lambda_p).continuous_part
    }
}

/// `Λ ≡ 1`: the local theory.
pub struct Unity;

impl KernelEvaluator for Unity {
    fn name(&self) -> &'static str {
        "unity"
    }
    fn description(&self) -> &'static str {
        "constant 1 (commutative limit)"
    }
    fn evaluate(&self, _cfg: &MomentumConfig, _lambda_p: f64) -> f64 {
        1.0
    }
}

#[derive(Clone, Default)]
pub struct KernelRegistry {
    evaluators: BTreeMap<&'static str, Arc<dyn KernelEvaluator>>,
}

impl KernelRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_defaults(quad_order: usize) -> Result<Self> {
        let mut reg = Self::new();
        reg.register(ClosedForm);
        reg.register(Quadrature::new(quad_order)?);
        reg.register(DeltaPart);
        reg.register(ContinuousPart);
        reg.register(Unity);
        Ok(reg)
    }

    /// Registers an evaluator, replacing any previous one with the same name.
    pub fn register<K: KernelEvaluator + 'static>(&mut self, evaluator: K) {
        self.evaluators.insert(evaluator.name(), Arc::new(evaluator));
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn KernelEvaluator>> {
        self.evaluators.get(name).cloned().ok_or_else(|| Error::UnknownStrategy(name.to_string()))
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.evaluators.keys().copied().collect()
    }
}
