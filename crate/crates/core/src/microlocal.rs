//! Singular directions of `Λₙ`.
//!
//! `K±` are the homogeneous quadratic varieties where `v±` vanishes. On
//! `K₊ ∩ K₋` the kernel is identically one, on exactly one of them it tends to
//! one half, and along any other ray it decays like `t⁻²` (the `β±` grow as
//! `t²` and sinc decays as `1/β`).

use serde::Serialize;

use crate::algebra::Sheet;
use crate::error::{Error, Result};
use crate::kernel::{lambda_closed, lambda_split, norm3, pair_vector, MomentumConfig};

/// Default scale-free tolerance for variety membership.
pub const DEFAULT_VARIETY_TOL: f64 = 1e-9;

/// `v±` for `n ≥ 2`; zero iff the configuration lies on `K±`.
pub fn variety_residual(cfg: &MomentumConfig, sheet: Sheet) -> Result<[f64; 3]> {
    if cfg.n() < 2 {
        return Err(Error::TooFewMomenta(cfg.n()));
    }
    Ok(pair_vector(cfg, sheet))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Membership {
    InBoth,
    InPlusOnly,
    InMinusOnly,
    Off,
}

impl Membership {
    /// Limit of `Λₙ(t·k̲)` as `t → ∞`.
    pub fn limit(self) -> f64 {
        match self {
            Membership::InBoth => 1.0,
            Membership::InPlusOnly | Membership::InMinusOnly => 0.5,
            Membership::Off => 0.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Membership::InBoth => "InBoth",
            Membership::InPlusOnly => "InPlusOnly",
            Membership::InMinusOnly => "InMinusOnly",
            Membership::Off => "Off",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DirectionClass {
    pub membership: Membership,
    pub residual_plus: f64,
    pub residual_minus: f64,
}

/// Residuals `‖v±‖` divided by `max_{j<l} ‖kʲ‖‖kˡ‖`.
fn normalized_residuals(cfg: &MomentumConfig) -> Result<(f64, f64)> {
    let plus = norm3(variety_residual(cfg, Sheet::Plus)?);
    let minus = norm3(variety_residual(cfg, Sheet::Minus)?);
    let scale = cfg.pair_scale();
    if scale == 0.0 {
        // at most one non-zero momentum: every pair product vanishes
        return Ok((0.0, 0.0));
    }
    Ok((plus / scale, minus / scale))
}

pub fn classify_direction(cfg: &MomentumConfig, tol: f64) -> Result<DirectionClass> {
    if cfg.is_zero() {
        return Err(Error::ZeroDirection);
    }
    let (residual_plus, residual_minus) = normalized_residuals(cfg)?;
    let membership = match (residual_plus <= tol, residual_minus <= tol) {
        (true, true) => Membership::InBoth,
        (true, false) => Membership::InPlusOnly,
        (false, true) => Membership::InMinusOnly,
        (false, false) => Membership::Off,
    };
    Ok(DirectionClass { membership, residual_plus, residual_minus })
}

/// Membership in `K₀ = K₊ ∪ K₋`; the zero configuration belongs to both.
pub fn in_k0(cfg: &MomentumConfig, tol: f64) -> Result<bool> {
    let (p, m) = normalized_residuals(cfg)?;
    Ok(p <= tol || m <= tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FitMethod {
    /// Least squares on every tail sample.
    Direct,
    /// Least squares on the per-block maxima of the tail.
    Envelope,
    /// No fit: the kernel is constant along the ray.
    Constant,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayReport {
    pub direction: MomentumConfig,
    pub class: DirectionClass,
    /// Mean of the last decile of samples.
    pub asymptote: f64,
    /// `None` on `K₊ ∩ K₋`, where the kernel never departs from one.
    pub fitted_exponent: Option<f64>,
    pub fit_residual: f64,
    pub fit_method: FitMethod,
    pub t_range: (f64, f64),
    pub samples: usize,
}

/// Switch to the envelope fit above this RMS log-residual.
const ENVELOPE_SWITCH: f64 = 0.05;
const ENVELOPE_BLOCK: usize = 8;

fn log_spaced(t_min: f64, t_max: f64, samples: usize) -> Vec<f64> {
    let ratio = (t_max / t_min).ln();
    (0..samples).map(|i| t_min * (ratio * i as f64 / (samples - 1) as f64).exp()).collect()
}

/// Ordinary least squares `y = a + b x`; returns `(b, rms residual)`.
pub(crate) fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let ss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - intercept - slope * x;
            r * r
        })
        .sum();
    (slope, (ss / n).sqrt())
}

/// `(t, Λₙ(t·k̲))` on `samples` log-spaced points of `[t_min, t_max]`.
pub fn ray_samples(cfg: &MomentumConfig, lambda_p: f64, t_min: f64, t_max: f64, samples: usize) -> Vec<(f64, f64)> {
    log_spaced(t_min, t_max, samples).into_iter().map(|t| (t, lambda_closed(&cfg.scale(t), lambda_p))).collect()
}

/// Samples `Λₙ(t·k̲)` on a log grid and fits the decay of `|Λₙ − limit|`.
///
/// The subtracted limit is the one implied by the variety class; the
/// measured asymptote is reported alongside it.
pub fn ray_decay(cfg: &MomentumConfig, lambda_p: f64, t_min: f64, t_max: f64, samples: usize) -> Result<DecayReport> {
    if !(t_min > 0.0 && t_max > t_min && t_max.is_finite()) {
        return Err(Error::InvalidArgument(format!("bad t range [{t_min}, {t_max}]")));
    }
    if samples < 8 {
        return Err(Error::InvalidArgument(format!("need at least 8 samples, got {samples}")));
    }
    let class = classify_direction(cfg, DEFAULT_VARIETY_TOL)?;
    let (ts, values): (Vec<f64>, Vec<f64>) = ray_samples(cfg, lambda_p, t_min, t_max, samples).into_iter().unzip();

    let decile = samples.div_ceil(10);
    let asymptote = values[samples - decile..].iter().sum::<f64>() / decile as f64;

    let mut report = DecayReport {
        direction: cfg.clone(),
        class,
        asymptote,
        fitted_exponent: None,
        fit_residual: 0.0,
        fit_method: FitMethod::Constant,
        t_range: (t_min, t_max),
        samples,
    };
    if class.membership == Membership::InBoth {
        return Ok(report);
    }

    let limit = class.membership.limit();
    let tail_start = samples / 2;
    let tail: Vec<(f64, f64)> =
        ts[tail_start..].iter().zip(&values[tail_start..]).map(|(&t, &v)| (t, (v - limit).abs())).collect();
    let usable: Vec<(f64, f64)> = tail.iter().copied().filter(|&(_, d)| d > 1e-300).collect();
    if usable.len() < 2 {
        return Err(Error::DecayUnderflow);
    }

    let (xs, ys): (Vec<f64>, Vec<f64>) = usable.iter().map(|&(t, d)| (t.ln(), d.ln())).unzip();
    let (slope, residual) = linear_fit(&xs, &ys);
    report.fitted_exponent = Some(slope);
    report.fit_residual = residual;
    report.fit_method = FitMethod::Direct;

    if residual > ENVELOPE_SWITCH {
        let blocks = (tail.len() / ENVELOPE_BLOCK).max(4).min(tail.len());
        let per_block = tail.len().div_ceil(blocks);
        let peaks: Vec<(f64, f64)> = tail
            .chunks(per_block)
            .filter_map(|block| block.iter().copied().max_by(|a, b| a.1.total_cmp(&b.1)))
            .filter(|&(_, d)| d > 1e-300)
            .collect();
        if peaks.len() >= 2 {
            let (px, py): (Vec<f64>, Vec<f64>) = peaks.iter().map(|&(t, d)| (t.ln(), d.ln())).unzip();
            let (slope, residual) = linear_fit(&px, &py);
            report.fitted_exponent = Some(slope);
            report.fit_residual = residual;
            report.fit_method = FitMethod::Envelope;
        }
    }
    Ok(report)
}

/// Slope of `ln Λ⁽ᵟ⁾(t·k̲)` against `t⁴` by least squares over `ts`.
///
/// Analytically `−λ_P⁴(‖v₊‖² + ‖v₋‖²)/4`.
pub fn delta_decay_rate(cfg: &MomentumConfig, lambda_p: f64, ts: &[f64]) -> Result<f64> {
    let mut xs = Vec::with_capacity(ts.len());
    let mut ys = Vec::with_capacity(ts.len());
    for &t in ts {
        let d = lambda_split(&cfg.scale(t), lambda_p).delta_part;
        if d > 0.0 {
            xs.push(t.powi(4));
            ys.push(d.ln());
        }
    }
    if xs.len() < 2 {
        return Err(Error::DecayUnderflow);
    }
    Ok(linear_fit(&xs, &ys).0)
}

/// Tests whether `(x̲; k̲)` can lie in the wavefront set of the delta part:
/// `x̲ ∈ K₀` and `x̲ − λk̲ ∈ K₀` for every sampled `λ`.
///
/// The position tuple is fed to the same quadratic equations as momenta.
pub fn wf_candidate(x_cfg: &MomentumConfig, k_cfg: &MomentumConfig, lambda_samples: &[f64], tol: f64) -> Result<bool> {
    if x_cfg.n() != k_cfg.n() {
        return Err(Error::SizeMismatch { left: x_cfg.n(), right: k_cfg.n() });
    }
    if lambda_samples.is_empty() {
        return Err(Error::InvalidArgument("no lambda samples".into()));
    }
    if !in_k0(x_cfg, tol)? {
        return Ok(false);
    }
    for &l in lambda_samples {
        if !in_k0(&x_cfg.sub_scaled(k_cfg, l)?, tol)? {
            return Ok(false);
        }
    }
    Ok(true)
}
