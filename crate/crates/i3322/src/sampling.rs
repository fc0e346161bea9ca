//! Seeded random generators for strategies, projectors and normal-form
//! specs. All sampling goes through ChaCha8 so runs are reproducible from
//! a single u64 seed.

use crate::bell::Strategy;
use crate::structure::{Branch, NormalFormSpec};
use crate::symmat::{Projector, SymMatrix};
use crate::Result;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives a per-task stream from a base seed; used to hand independent
/// generators to parallel restarts without sharing state.
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    rng(seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

pub fn random_symmetric(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> SymMatrix {
    SymMatrix::from_fn(dim, |_, _| {
        let x: f64 = rng.sample(StandardNormal);
        x * scale
    })
}

/// Orthonormalizes `cols` in place with two rounds of modified
/// Gram-Schmidt; resamples a column from `rng` if it degenerates.
fn orthonormalize(rng: &mut ChaCha8Rng, cols: &mut [Vec<f64>], dim: usize) {
    let mut j = 0;
    while j < cols.len() {
        for _round in 0..2 {
            for k in 0..j {
                let dot: f64 = cols[j].iter().zip(&cols[k]).map(|(a, b)| a * b).sum();
                for i in 0..dim {
                    cols[j][i] -= dot * cols[k][i];
                }
            }
        }
        let norm: f64 = cols[j].iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-8 {
            for x in cols[j].iter_mut() {
                *x = rng.sample(StandardNormal);
            }
            continue; // retry this column
        }
        for x in cols[j].iter_mut() {
            *x /= norm;
        }
        j += 1;
    }
}

/// Random rank-`rank` projector from an orthonormalized Gaussian frame.
pub fn random_projector(rng: &mut ChaCha8Rng, dim: usize, rank: usize) -> Projector {
    assert!(rank <= dim);
    let mut cols: Vec<Vec<f64>> = (0..rank)
        .map(|_| (0..dim).map(|_| rng.sample(StandardNormal)).collect())
        .collect();
    orthonormalize(rng, &mut cols, dim);
    let mut m = SymMatrix::zeros(dim);
    for col in &cols {
        for i in 0..dim {
            for j in i..dim {
                let cur = m.get(i, j);
                m.set_sym(i, j, cur + col[i] * col[j]);
            }
        }
    }
    Projector::new(m).expect("orthonormal frame gives a projector")
}

/// Rank drawn uniformly from {1, ..., d-1} (from {0, 1} when d = 1).
pub fn random_projector_any_rank(rng: &mut ChaCha8Rng, dim: usize) -> Projector {
    let rank = if dim == 1 {
        rng.gen_range(0..=1)
    } else {
        rng.gen_range(1..dim)
    };
    random_projector(rng, dim, rank)
}

/// Random strategy with uniform Schmidt weights.
pub fn random_strategy(rng: &mut ChaCha8Rng, dim: usize) -> Strategy {
    let a = [
        random_projector_any_rank(rng, dim),
        random_projector_any_rank(rng, dim),
        random_projector_any_rank(rng, dim),
    ];
    let b = [
        random_projector_any_rank(rng, dim),
        random_projector_any_rank(rng, dim),
        random_projector_any_rank(rng, dim),
    ];
    Strategy::with_uniform(dim, a, b).expect("random projectors form a strategy")
}

fn random_sign(rng: &mut ChaCha8Rng) -> f64 {
    if rng.gen::<bool>() {
        1.0
    } else {
        -1.0
    }
}

/// Random chain spec for the given parity of `dim`.
pub fn random_chain_spec(rng: &mut ChaCha8Rng, dim: usize) -> Result<NormalFormSpec> {
    let branch = if dim % 2 == 0 {
        Branch::ChainEven
    } else {
        Branch::ChainOdd
    };
    let len = match branch {
        Branch::ChainEven => dim / 2 + 1,
        Branch::ChainOdd => (dim + 3) / 2,
        _ => unreachable!(),
    };
    let mut coeffs = vec![0.0; len];
    coeffs[0] = random_sign(rng);
    coeffs[len - 1] = random_sign(rng);
    for c in coeffs.iter_mut().take(len - 1).skip(1) {
        *c = rng.gen_range(-1.0..=1.0);
    }
    NormalFormSpec::new(branch, dim, coeffs)
}

pub fn random_cyclic_spec(rng: &mut ChaCha8Rng, dim: usize) -> Result<NormalFormSpec> {
    let coeffs = (0..dim / 2).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    NormalFormSpec::new(Branch::Cyclic, dim, coeffs)
}
