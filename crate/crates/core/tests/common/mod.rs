#![allow(dead_code)]

use qst_core::algebra::Momentum4;
use qst_core::kernel::{beta_pair, MomentumConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cfg(v: &[f64]) -> MomentumConfig {
    MomentumConfig::from_flat(v).unwrap()
}

pub fn random_momentum(rng: &mut ChaCha8Rng, scale: f64) -> Momentum4 {
    Momentum4(std::array::from_fn(|_| rng.gen_range(-scale..scale)))
}

pub fn random_config(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> MomentumConfig {
    MomentumConfig::new((0..n).map(|_| random_momentum(rng, scale)).collect()).unwrap()
}

/// Random configuration with `‖v±‖ ≤ bound`, by rejection.
pub fn bounded_config(rng: &mut ChaCha8Rng, n: usize, bound: f64) -> MomentumConfig {
    loop {
        let c = random_config(rng, n, 2.0);
        let b = beta_pair(&c, 1.0);
        if 2.0 * b.beta_plus <= bound && 2.0 * b.beta_minus <= bound {
            return c;
        }
    }
}

pub fn random_unit(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if r > 0.1 && r <= 1.0 {
            return [v[0] / r, v[1] / r, v[2] / r];
        }
    }
}

/// Rotation matrix of a random unit quaternion.
pub fn random_rotation(rng: &mut ChaCha8Rng) -> [[f64; 3]; 3] {
    let q: [f64; 4] = loop {
        let q: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let r = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        if r > 0.1 && r <= 1.0 {
            break q.map(|x| x / r);
        }
    };
    let [w, x, y, z] = q;
    [
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
        [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
        [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
    ]
}

pub const PARITY: [[f64; 3]; 3] = [[-1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]];

/// Ray off both varieties: `Λ = sinc(λ²t²/2)`.
pub fn off_ray() -> MomentumConfig {
    cfg(&[1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0])
}

/// Ray in `K₊ ∩ K₋`: parallel spatial momenta at zero energy.
pub fn both_ray() -> MomentumConfig {
    cfg(&[0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0])
}

/// Four momenta with `v₊ = 0` and `v₋ = (−2, 2, −2)`.
///
/// With two or three momenta the pair 2-form is decomposable, so `v₊ = 0`
/// forces `v₋ = 0`; a single-sign ray needs `n ≥ 4`.
pub fn plus_only_ray() -> MomentumConfig {
    cfg(&[2.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, -2.0, 0.0, 0.0, 1.0, 3.0, 0.0, 0.0, 0.0])
}

/// Counts matchings of the complete bipartite graph `K_{p,q}` by size,
/// enumerating every edge subset.
pub fn brute_force_matchings(p: usize, q: usize) -> Vec<u64> {
    let edges: Vec<(usize, usize)> = (0..p).flat_map(|a| (0..q).map(move |b| (a, b))).collect();
    let mut counts = vec![0u64; p.min(q) + 1];
    for mask in 0u32..(1 << edges.len()) {
        let mut left = 0u32;
        let mut right = 0u32;
        let mut ok = true;
        for (i, &(a, b)) in edges.iter().enumerate() {
            if mask & (1 << i) != 0 {
                if left & (1 << a) != 0 || right & (1 << b) != 0 {
                    ok = false;
                    break;
                }
                left |= 1 << a;
                right |= 1 << b;
            }
        }
        if ok {
            counts[mask.count_ones() as usize] += 1;
        }
    }
    counts
}
