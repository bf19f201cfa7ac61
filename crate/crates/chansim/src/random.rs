//! Seeded random instance generators.
//!
//! Every randomized suite in this crate draws through these helpers with an
//! explicit `ChaCha8` stream, so runs are reproducible from `(seed, trials)`
//! alone and independent of thread count: per-trial generators are derived
//! from the root seed and the trial index, never shared across trials.
//!
//! States are sampled as a Dirichlet spectrum rotated by a Haar-like frame
//! (QR of a complex Gaussian matrix); channels row-wise Dirichlet. The
//! Dirichlet concentration is exposed so suites can push instances toward
//! degenerate spectra or near-deterministic rows.

use nalgebra::DMatrix;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Gamma, StandardNormal};

use crate::chan::{ClassicalChannel, CqChannel, DensityMatrix, ProbDist};
use crate::linalg::{CMat, C64};

/// Root generator for a seed.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent generator for trial `index` under root `seed`.
///
/// Uses ChaCha's 64-bit stream so distinct trials are decorrelated without
/// any sequential draw dependency (safe to evaluate in any order).
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index.wrapping_add(1));
    rng
}

/// Dirichlet(concentration) sample on the simplex of dimension `n`.
pub fn random_prob_dirichlet(n: usize, concentration: f64, rng: &mut ChaCha8Rng) -> ProbDist {
    if n == 1 {
        return ProbDist::uniform(1);
    }
    // Dirichlet(a, ..., a) as normalized iid Gamma(a, 1) draws.
    let gamma = Gamma::new(concentration, 1.0).expect("valid Gamma parameters");
    loop {
        let mut w: Vec<f64> = (0..n).map(|_| rng.sample(gamma)).collect();
        let total: f64 = w.iter().sum();
        if total <= 0.0 || !total.is_finite() {
            continue;
        }
        for v in w.iter_mut() {
            *v /= total;
        }
        // Extremely small concentrations can round a coordinate to exactly 0;
        // resample degenerate draws so supports stay full unless asked.
        if let Ok(p) = ProbDist::new(w) {
            return p;
        }
    }
}

/// Uniform (Dirichlet(1)) sample on the simplex.
pub fn random_prob(n: usize, rng: &mut ChaCha8Rng) -> ProbDist {
    random_prob_dirichlet(n, 1.0, rng)
}

/// Row-wise Dirichlet random channel.
pub fn random_channel(
    nx: usize,
    ny: usize,
    concentration: f64,
    rng: &mut ChaCha8Rng,
) -> ClassicalChannel {
    let rows: Vec<Vec<f64>> = (0..nx)
        .map(|_| {
            random_prob_dirichlet(ny, concentration, rng)
                .as_slice()
                .to_vec()
        })
        .collect();
    ClassicalChannel::new(rows).expect("rows are distributions")
}

/// Complex Gaussian matrix.
fn gaussian_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> CMat {
    DMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-like random unitary from the QR decomposition of a complex Gaussian
/// matrix (columns re-phased so the R diagonal is positive).
pub fn random_unitary(d: usize, rng: &mut ChaCha8Rng) -> CMat {
    let g = gaussian_matrix(d, d, rng);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let rjj = r[(j, j)];
        if rjj.norm() > 0.0 {
            let phase = rjj / C64::new(rjj.norm(), 0.0);
            let mut col = q.column_mut(j);
            col *= phase.conj();
        }
    }
    q
}

/// Random state: Dirichlet(concentration) spectrum conjugated by a random
/// unitary. Concentration 1 is the flat simplex; larger values concentrate
/// near the maximally mixed state, smaller values near pure states.
pub fn random_state_dirichlet(d: usize, concentration: f64, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let spectrum = random_prob_dirichlet(d, concentration, rng);
    let u = random_unitary(d, rng);
    let mut m = CMat::zeros(d, d);
    for i in 0..d {
        m[(i, i)] = C64::new(spectrum[i], 0.0);
    }
    let rho = &u * m * u.adjoint();
    DensityMatrix::new(rho).expect("rotated spectrum is a state")
}

/// Random full-support state with flat spectrum law.
pub fn random_state(d: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
    random_state_dirichlet(d, 1.0, rng)
}

/// Random pure state.
pub fn random_pure_state(d: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let v = gaussian_matrix(d, 1, rng);
    DensityMatrix::pure_state(v.as_slice()).expect("Gaussian vector is nonzero")
}

/// Random CQ channel with `nx` inputs and output dimension `d`.
pub fn random_cq_channel(nx: usize, d: usize, rng: &mut ChaCha8Rng) -> CqChannel {
    let states = (0..nx).map(|_| random_state(d, rng)).collect();
    CqChannel::new(states).expect("states share the dimension")
}

/// Random isometry from dimension `d` to `d * env`, as a `(d*env) x d`
/// matrix with orthonormal columns (used to build random CPTP maps).
pub fn random_isometry(d: usize, env: usize, rng: &mut ChaCha8Rng) -> CMat {
    let g = gaussian_matrix(d * env, d, rng);
    let qr = g.qr();
    qr.q()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::trace_re;

    #[test]
    fn unitary_is_unitary() {
        let mut rng = rng_from_seed(11);
        let u = random_unitary(4, &mut rng);
        let id = CMat::identity(4, 4);
        assert!((u.adjoint() * &u - id).norm() < 1e-12);
    }

    #[test]
    fn states_are_states() {
        let mut rng = rng_from_seed(5);
        for d in [2usize, 3, 5] {
            let s = random_state(d, &mut rng);
            assert!((trace_re(s.mat()) - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn trial_streams_are_reproducible_and_decorrelated() {
        let a: f64 = trial_rng(42, 3).random();
        let b: f64 = trial_rng(42, 3).random();
        let c: f64 = trial_rng(42, 4).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn isometry_columns_orthonormal() {
        let mut rng = rng_from_seed(7);
        let v = random_isometry(3, 2, &mut rng);
        let id = CMat::identity(3, 3);
        assert!((v.adjoint() * &v - id).norm() < 1e-12);
    }
}
