//! Position-space views of the non-local kernel.
//!
//! The full `4n`-dimensional inverse transform is never formed. Instead `Λₙ`
//! is sampled along one or two momentum components (all others held fixed)
//! and transformed with the `e^{+ik·x}/(2π)` convention per active axis.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::algebra::Momentum4;
use crate::error::{Error, Result};
use crate::kernel::{beta_pair, lambda_closed, KernelEvaluator, MomentumConfig};
use crate::microlocal::{classify_direction, Membership, DEFAULT_VARIETY_TOL};

/// One active momentum component: `(momentum index j, component μ)`, zero-based.
pub type Axis = (usize, usize);

#[derive(Debug, Clone, PartialEq)]
pub struct SliceSpec {
    axes: Vec<Axis>,
    fixed: MomentumConfig,
    k_max: f64,
    points: usize,
}

impl SliceSpec {
    pub fn new(axes: Vec<Axis>, fixed: MomentumConfig, k_max: f64, points: usize) -> Result<Self> {
        if axes.is_empty() || axes.len() > 2 {
            return Err(Error::InvalidArgument(format!("slices take 1 or 2 axes, got {}", axes.len())));
        }
        if axes.len() == 2 && axes[0] == axes[1] {
            return Err(Error::InvalidArgument("active axes must be distinct".into()));
        }
        for &(j, mu) in &axes {
            if j >= fixed.n() || mu > 3 {
                return Err(Error::InvalidArgument(format!(
                    "axis ({j}, {mu}) outside a config with n = {}",
                    fixed.n()
                )));
            }
        }
        if !(k_max.is_finite() && k_max > 0.0) {
            return Err(Error::InvalidArgument(format!("k_max must be positive, got {k_max}")));
        }
        if points < 16 || !points.is_power_of_two() {
            return Err(Error::InvalidArgument(format!("grid size must be a power of two ≥ 16, got {points}")));
        }
        Ok(SliceSpec { axes, fixed, k_max, points })
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn fixed(&self) -> &MomentumConfig {
        &self.fixed
    }

    pub fn k_max(&self) -> f64 {
        self.k_max
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn dk(&self) -> f64 {
        2.0 * self.k_max / self.points as f64
    }

    pub fn dx(&self) -> f64 {
        PI / self.k_max
    }

    /// Momentum grid `(m − N/2)·Δk`.
    pub fn momentum_axis(&self) -> Vec<f64> {
        let half = (self.points / 2) as f64;
        (0..self.points).map(|m| (m as f64 - half) * self.dk()).collect()
    }

    /// Position grid `(p − N/2)·Δx`.
    pub fn position_axis(&self) -> Vec<f64> {
        let half = (self.points / 2) as f64;
        (0..self.points).map(|p| (p as f64 - half) * self.dx()).collect()
    }

    fn config_at(&self, ks: &[f64]) -> MomentumConfig {
        self.axes.iter().zip(ks).fold(self.fixed.clone(), |c, (&(j, mu), &k)| c.with_component(j, mu, k))
    }

    fn shape(&self) -> Vec<usize> {
        vec![self.points; self.axes.len()]
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SliceResult {
    /// One position grid per active axis.
    pub positions: Vec<Vec<f64>>,
    /// One momentum grid per active axis.
    pub momenta: Vec<Vec<f64>>,
    /// Row-major kernel samples on the momentum grid.
    pub samples: Vec<f64>,
    /// Row-major transform on the position grid.
    pub values: Vec<Complex64>,
    pub shape: Vec<usize>,
    pub lambda_p: f64,
    pub kernel: String,
    pub mass_concentration: f64,
    pub nyquist_warning: bool,
}

impl SliceResult {
    pub fn l2_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn sample_l2_norm(&self) -> f64 {
        self.samples.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Factor `(Δk/2π)·N^{d/2}` relating the two ℓ² norms.
    pub fn parseval_factor(&self, spec: &SliceSpec) -> f64 {
        let d = self.shape.len() as i32;
        (spec.dk() / (2.0 * PI)).powi(d) * (spec.points() as f64).powf(d as f64 / 2.0)
    }
}

fn checkerboard(index: usize) -> f64 {
    if index.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Centered inverse transform `(Δk/2π)^d Σ_m a_m e^{i k_m·x_p}` on a
/// row-major grid of `d ∈ {1, 2}` axes, each of length `n`.
pub fn centered_inverse_dft(samples: &[Complex64], n: usize, dims: usize, dk: f64) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = samples.to_vec();
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_inverse(n);
    let half = n / 2;
    let norm = dk / (2.0 * PI);

    match dims {
        1 => {
            for (m, v) in buf.iter_mut().enumerate() {
                *v *= checkerboard(m);
            }
            fft.process(&mut buf);
            for (p, v) in buf.iter_mut().enumerate() {
                *v *= norm * checkerboard(p + half);
            }
        }
        2 => {
            for (idx, v) in buf.iter_mut().enumerate() {
                *v *= checkerboard(idx / n + idx % n);
            }
            for row in buf.chunks_exact_mut(n) {
                fft.process(row);
            }
            let mut column = vec![Complex64::new(0.0, 0.0); n];
            for c in 0..n {
                for r in 0..n {
                    column[r] = buf[r * n + c];
                }
                fft.process(&mut column);
                for r in 0..n {
                    buf[r * n + c] = column[r];
                }
            }
            for (idx, v) in buf.iter_mut().enumerate() {
                *v *= norm * norm * checkerboard(idx / n + idx % n);
            }
        }
        _ => unreachable!("slices have one or two axes"),
    }
    buf
}

fn mass_concentration(values: &[Complex64], n: usize, dims: usize) -> f64 {
    let half = (n / 2) as isize;
    let radius = (n / 20) as isize;
    let central = |p: usize| (p as isize - half).abs() <= radius;
    let total: f64 = values.iter().map(|v| v.norm()).sum();
    if total == 0.0 {
        return 0.0;
    }
    let inner: f64 = values
        .iter()
        .enumerate()
        .filter(|(idx, _)| match dims {
            1 => central(*idx),
            _ => central(idx / n) && central(idx % n),
        })
        .map(|(_, v)| v.norm())
        .sum();
    inner / total
}

/// Samples `kernel` on the slice grid and returns its inverse transform.
pub fn gamma_slice(spec: &SliceSpec, lambda_p: f64, kernel: &dyn KernelEvaluator) -> Result<SliceResult> {
    let axis = spec.momentum_axis();
    let n = spec.points();
    let dims = spec.axes().len();

    let grid_points: Vec<Vec<f64>> = match dims {
        1 => axis.iter().map(|&k| vec![k]).collect(),
        _ => axis.iter().flat_map(|&a| axis.iter().map(move |&b| vec![a, b])).collect(),
    };
    let samples: Vec<f64> = grid_points.iter().map(|ks| kernel.evaluate(&spec.config_at(ks), lambda_p)).collect();

    let on_edge = |idx: usize| match dims {
        1 => idx == 0,
        _ => idx / n == 0 || idx.is_multiple_of(n),
    };
    let nyquist_warning = grid_points.iter().zip(&samples).enumerate().any(|(idx, (ks, v))| {
        on_edge(idx)
            && v.abs() > 1e-3
            && matches!(
                classify_direction(&spec.config_at(ks), DEFAULT_VARIETY_TOL),
                Ok(c) if c.membership == Membership::Off
            )
    });

    let complex: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let values = centered_inverse_dft(&complex, n, dims, spec.dk());
    let mass_concentration = mass_concentration(&values, n, dims);

    Ok(SliceResult {
        positions: vec![spec.position_axis(); dims],
        momenta: vec![axis; dims],
        samples,
        values,
        shape: spec.shape(),
        lambda_p,
        kernel: kernel.name().to_string(),
        mass_concentration,
        nyquist_warning,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitRow {
    pub lambda_p: f64,
    /// `max |Λₙ − 1|` over the probes.
    pub sup: f64,
    /// `max (β₊² + β₋²)/12` over the same probes.
    pub bound: f64,
}

/// Seeded probe configurations with every `‖kʲ‖ ≤ radius` (Euclidean).
pub fn ball_probes(n: usize, radius: f64, probes: usize, seed: u64) -> Result<Vec<MomentumConfig>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..probes)
        .map(|_| {
            let momenta = (0..n)
                .map(|_| loop {
                    let k = Momentum4(std::array::from_fn(|_| rng.gen_range(-radius..=radius)));
                    if k.euclid_norm() <= radius {
                        break k;
                    }
                })
                .collect();
            MomentumConfig::new(momenta)
        })
        .collect()
}

/// `sup |Λₙ − 1|` and its analytic bound over a probe set in the ball of
/// radius `radius`, for each `λ_P`.
pub fn commutative_limit_table(
    radius: f64,
    probes: usize,
    n: usize,
    lambda_values: &[f64],
    seed: u64,
) -> Result<Vec<LimitRow>> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")));
    }
    if probes < 10 {
        return Err(Error::InvalidArgument(format!("need at least 10 probes, got {probes}")));
    }
    if let Some(bad) = lambda_values.iter().find(|l| !(l.is_finite() && **l >= 0.0)) {
        return Err(Error::InvalidLength(*bad));
    }
    let configs = ball_probes(n, radius, probes, seed)?;
    Ok(lambda_values
        .iter()
        .map(|&lambda_p| {
            let (sup, bound) = configs.iter().fold((0.0f64, 0.0f64), |(s, b), cfg| {
                let dev = (lambda_closed(cfg, lambda_p) - 1.0).abs();
                (s.max(dev), b.max(beta_pair(cfg, lambda_p).limit_bound()))
            });
            LimitRow { lambda_p, sup, bound }
        })
        .collect())
}
