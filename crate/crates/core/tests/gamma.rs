mod common;

use num_complex::Complex64;
use qst_core::gamma::{centered_inverse_dft, commutative_limit_table, gamma_slice, SliceSpec};
use qst_core::kernel::registry::{ClosedForm, ContinuousPart, DeltaPart, Unity};
use qst_core::kernel::MomentumConfig;

use common::*;

#[test]
fn transform_is_linear_in_the_kernel() {
    let base = cfg(&[0.2, 0.0, 0.4, 0.0, 1.0, -0.3, 0.0, 0.5]);
    let spec = SliceSpec::new(vec![(0, 1), (1, 2)], base, 5.0, 32).unwrap();
    let total = gamma_slice(&spec, 1.2, &ClosedForm).unwrap();
    let d = gamma_slice(&spec, 1.2, &DeltaPart).unwrap();
    let c = gamma_slice(&spec, 1.2, &ContinuousPart).unwrap();
    for ((t, a), b) in total.values.iter().zip(&d.values).zip(&c.values) {
        assert!((t - a - b).norm() < 1e-12);
    }
}

#[test]
fn inverse_transform_of_a_plane_wave_is_a_shifted_delta() {
    let n = 64;
    let dk = 2.0 * 10.0 / n as f64;
    let dx = std::f64::consts::PI / 10.0;
    let shift = 5;
    let samples: Vec<Complex64> = (0..n)
        .map(|m| {
            let k = (m as f64 - (n / 2) as f64) * dk;
            Complex64::from_polar(1.0, -k * shift as f64 * dx)
        })
        .collect();
    let out = centered_inverse_dft(&samples, n, 1, dk);
    let peak = out.iter().enumerate().max_by(|a, b| a.1.norm().total_cmp(&b.1.norm())).unwrap().0;
    assert_eq!(peak, n / 2 + shift);
    assert!((out[peak].re - dk * n as f64 / (2.0 * std::f64::consts::PI)).abs() < 1e-12);
}

#[test]
fn sinc_slice_is_a_box() {
    // Λ = sinc(λ²k/2) along k¹₁ with k² = (1, 0, 0, 0): a box of half-width λ²/2
    let spec = SliceSpec::new(
        vec![(0, 1)],
        cfg(&[0.0; 4].iter().chain(&[1.0, 0.0, 0.0, 0.0]).copied().collect::<Vec<_>>()),
        64.0,
        256,
    )
    .unwrap();
    let r = gamma_slice(&spec, 1.0, &ClosedForm).unwrap();
    let xs = spec.position_axis();
    for (x, v) in xs.iter().zip(&r.values) {
        if x.abs() < 0.35 {
            assert!((v.re - 1.0).abs() < 0.1, "x = {x}: {v}");
        } else if x.abs() > 0.65 && x.abs() < 3.0 {
            assert!(v.re.abs() < 0.1, "x = {x}: {v}");
        }
        assert!(v.im.abs() < 1e-12);
    }
}

#[test]
fn nyquist_flag_tracks_edge_values() {
    let off = cfg(&[0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
    let narrow = SliceSpec::new(vec![(0, 1)], off.clone(), 4.0, 64).unwrap();
    assert!(gamma_slice(&narrow, 0.5, &ClosedForm).unwrap().nyquist_warning);
    // the Gaussian delta part is negligible at the edge of a wide window
    let wide = SliceSpec::new(vec![(0, 1)], off.clone(), 16.0, 64).unwrap();
    assert!(!gamma_slice(&wide, 1.0, &DeltaPart).unwrap().nyquist_warning);
    // a kernel that never decays on an Off slice is flagged
    assert!(gamma_slice(&wide, 1.0, &Unity).unwrap().nyquist_warning);
    // on K₊ ∩ K₋ the kernel never decays, but that is not an aliasing failure
    let both = SliceSpec::new(vec![(0, 0)], MomentumConfig::zeros(2).unwrap(), 4.0, 64).unwrap();
    let r = gamma_slice(&both, 1.0, &ClosedForm).unwrap();
    assert!(!r.nyquist_warning);
    assert!(r.mass_concentration > 0.99);
}

#[test]
fn limit_table_scales_as_fourth_power() {
    let rows = commutative_limit_table(1.0, 64, 2, &[1.0, 0.5, 0.25, 0.125], 5).unwrap();
    for w in rows.windows(2) {
        assert!((w[0].bound / w[1].bound - 16.0).abs() < 1e-9);
        assert!(w[1].sup <= w[1].bound);
    }
    let zero = commutative_limit_table(1.0, 64, 2, &[0.0], 5).unwrap();
    assert_eq!(zero[0].sup, 0.0);
}
