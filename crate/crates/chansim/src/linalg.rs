//! Hermitian matrix toolbox.
//!
//! Thin layer over `nalgebra` used by every quantum-side module: sorted
//! Hermitian eigendecompositions, spectral functions restricted to the
//! support (pseudo-powers), Daleckii-Krein derivative maps for gradients of
//! spectral functions, Kronecker products, partial traces, and the
//! real-symmetric embedding of complex Hermitian matrices used by the
//! semidefinite solver.
//!
//! Eigenvalues below [`SUPPORT_EIG_THRESHOLD`] are treated as exact zeros
//! when forming supports and pseudo-powers; this single threshold is shared
//! crate-wide so support decisions are consistent between divergences,
//! solvers, and constructions.

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type RMat = DMatrix<f64>;

/// Eigenvalues with absolute value below this threshold count as zero for
/// support projectors and pseudo-powers.
pub const SUPPORT_EIG_THRESHOLD: f64 = 1e-12;

/// Complex matrix with all-real entries from a real one.
pub fn to_complex(a: &RMat) -> CMat {
    CMat::from_fn(a.nrows(), a.ncols(), |i, j| C64::new(a[(i, j)], 0.0))
}

/// Maximum absolute entry of `a - a^dagger`.
pub fn hermiticity_defect(a: &CMat) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            let d = a[(i, j)] - a[(j, i)].conj();
            worst = worst.max(d.norm());
        }
    }
    worst
}

/// Exact Hermitian average `(a + a^dagger)/2`.
pub fn hermitize(a: &CMat) -> CMat {
    (a + a.adjoint()) * C64::new(0.5, 0.0)
}

/// Sorted (ascending) eigendecomposition of a Hermitian matrix.
///
/// Returns `(eigenvalues, eigenvectors)` with eigenvector `k` in column `k`.
pub fn eigh(a: &CMat) -> (Vec<f64>, CMat) {
    debug_assert!(a.is_square());
    let n = a.nrows();
    if n == 1 {
        return (vec![a[(0, 0)].re], CMat::identity(1, 1));
    }
    let eig = hermitize(a).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vecs.set_column(dst, &eig.eigenvectors.column(src));
    }
    (vals, vecs)
}

/// Rebuild `U diag(d) U^dagger`.
pub fn from_spectrum(vals: &[f64], vecs: &CMat) -> CMat {
    let mut scaled = vecs.clone();
    for (k, &v) in vals.iter().enumerate() {
        let mut col = scaled.column_mut(k);
        col *= C64::new(v, 0.0);
    }
    scaled * vecs.adjoint()
}

/// Apply a scalar function to a Hermitian matrix through its spectrum.
pub fn herm_fn(a: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (vals, vecs) = eigh(a);
    let mapped: Vec<f64> = vals.iter().map(|&v| f(v)).collect();
    from_spectrum(&mapped, &vecs)
}

/// `a^p` on the support of `a`: eigenvalues below the support threshold map
/// to zero instead of being raised to a (possibly negative) power.
pub fn psd_pseudo_power(a: &CMat, p: f64) -> CMat {
    herm_fn(a, |v| if v > SUPPORT_EIG_THRESHOLD { v.powf(p) } else { 0.0 })
}

/// Orthogonal projector onto the support of a PSD matrix.
pub fn support_projector(a: &CMat) -> CMat {
    herm_fn(a, |v| if v > SUPPORT_EIG_THRESHOLD { 1.0 } else { 0.0 })
}

/// Real part of the trace.
pub fn trace_re(a: &CMat) -> f64 {
    (0..a.nrows()).map(|i| a[(i, i)].re).sum()
}

/// Real Hilbert-Schmidt inner product `Re Tr(a^dagger b)`.
pub fn hs_inner(a: &CMat, b: &CMat) -> f64 {
    let mut s = 0.0;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            s += (a[(i, j)].conj() * b[(i, j)]).re;
        }
    }
    s
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eig(a: &CMat) -> f64 {
    let (vals, _) = eigh(a);
    vals[0]
}

/// Largest eigenvalue of a Hermitian matrix.
pub fn max_eig(a: &CMat) -> f64 {
    let (vals, _) = eigh(a);
    *vals.last().unwrap()
}

/// Kronecker product.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Kronecker power `a^{\otimes n}` (n >= 1).
pub fn kron_power(a: &CMat, n: usize) -> CMat {
    assert!(n >= 1);
    let mut out = a.clone();
    for _ in 1..n {
        out = out.kronecker(a);
    }
    out
}

/// Partial trace over the second factor of `H_a (x) H_b`.
pub fn partial_trace_b(a: &CMat, da: usize, db: usize) -> Result<CMat> {
    if a.nrows() != da * db || a.ncols() != da * db {
        return Err(Error::Dimension(format!(
            "partial trace expects a {0}x{0} matrix, got {1}x{2}",
            da * db,
            a.nrows(),
            a.ncols()
        )));
    }
    let mut out = CMat::zeros(da, da);
    for i in 0..da {
        for j in 0..da {
            let mut s = C64::new(0.0, 0.0);
            for k in 0..db {
                s += a[(i * db + k, j * db + k)];
            }
            out[(i, j)] = s;
        }
    }
    Ok(out)
}

/// Partial trace over the first factor of `H_a (x) H_b`.
pub fn partial_trace_a(a: &CMat, da: usize, db: usize) -> Result<CMat> {
    if a.nrows() != da * db || a.ncols() != da * db {
        return Err(Error::Dimension(format!(
            "partial trace expects a {0}x{0} matrix, got {1}x{2}",
            da * db,
            a.nrows(),
            a.ncols()
        )));
    }
    let mut out = CMat::zeros(db, db);
    for i in 0..db {
        for j in 0..db {
            let mut s = C64::new(0.0, 0.0);
            for k in 0..da {
                s += a[(k * db + i, k * db + j)];
            }
            out[(i, j)] = s;
        }
    }
    Ok(out)
}

/// Adjoint Daleckii-Krein map for a spectral function.
///
/// Let `a = U diag(s) U^dagger` and let `f` extend to eigenvalues with
/// derivative `fp`. The Fréchet derivative of `x -> f(x)` at `a` is, in the
/// eigenbasis, entrywise multiplication by the divided-difference kernel
/// `K_ij = (f(s_i)-f(s_j))/(s_i-s_j)` (with `K_ii = fp(s_i)`). The kernel is
/// real symmetric, so the map is self-adjoint; this routine returns
/// `U (K .* (U^dagger m U)) U^dagger`, which converts the gradient of a
/// scalar objective with respect to `f(a)` into the gradient with respect
/// to `a`.
pub fn dk_adjoint(
    vals: &[f64],
    vecs: &CMat,
    m: &CMat,
    f: impl Fn(f64) -> f64,
    fp: impl Fn(f64) -> f64,
) -> CMat {
    let n = vals.len();
    let mhat = vecs.adjoint() * m * vecs;
    let mut out = CMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let (si, sj) = (vals[i], vals[j]);
            let k = if (si - sj).abs() > 1e-11 * (1.0 + si.abs().max(sj.abs())) {
                (f(si) - f(sj)) / (si - sj)
            } else {
                fp(0.5 * (si + sj))
            };
            out[(i, j)] = mhat[(i, j)] * C64::new(k, 0.0);
        }
    }
    vecs * out * vecs.adjoint()
}

/// Real-symmetric embedding of a complex Hermitian matrix:
/// `[[Re a, -Im a], [Im a, Re a]]`. Positive semidefiniteness is preserved
/// in both directions and traces double.
pub fn real_embed(a: &CMat) -> RMat {
    let n = a.nrows();
    let mut out = RMat::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = a[(i, j)];
            out[(i, j)] = z.re;
            out[(i + n, j + n)] = z.re;
            out[(i, j + n)] = -z.im;
            out[(i + n, j)] = z.im;
        }
    }
    out
}

/// Inverse of [`real_embed`] (averaging the two copies, so it is also the
/// orthogonal projection onto embedded matrices).
pub fn real_unembed(a: &RMat) -> CMat {
    let n = a.nrows() / 2;
    CMat::from_fn(n, n, |i, j| {
        C64::new(
            0.5 * (a[(i, j)] + a[(i + n, j + n)]),
            0.5 * (a[(i + n, j)] - a[(i, j + n)]),
        )
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn test_herm3() -> CMat {
        CMat::from_row_slice(
            3,
            3,
            &[
                C64::new(2.0, 0.0),
                C64::new(0.3, 0.4),
                C64::new(-0.1, 0.2),
                C64::new(0.3, -0.4),
                C64::new(1.5, 0.0),
                C64::new(0.0, -0.6),
                C64::new(-0.1, -0.2),
                C64::new(0.0, 0.6),
                C64::new(0.7, 0.0),
            ],
        )
    }

    #[test]
    fn eigh_reconstructs_and_sorts() {
        let a = test_herm3();
        let (vals, vecs) = eigh(&a);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        let rec = from_spectrum(&vals, &vecs);
        assert!((&rec - &a).norm() < 1e-12);
    }

    #[test]
    fn pseudo_power_inverts_on_support() {
        // rank-2 PSD matrix on C^3
        let v = CMat::from_row_slice(
            3,
            2,
            &[
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.5),
                C64::new(0.0, -1.0),
                C64::new(0.7, 0.0),
                C64::new(0.3, 0.3),
                C64::new(0.2, 0.0),
            ],
        );
        let a = &v * v.adjoint();
        let inv = psd_pseudo_power(&a, -1.0);
        let proj = support_projector(&a);
        assert!((&a * &inv - &proj).norm() < 1e-10);
        // support projector is idempotent and has trace = rank
        assert!((&proj * &proj - &proj).norm() < 1e-10);
        assert_relative_eq!(trace_re(&proj), 2.0, epsilon = 1e-10);
    }

    #[test]
    fn partial_traces_complement() {
        let a = test_herm3();
        let b = CMat::from_row_slice(
            2,
            2,
            &[
                C64::new(0.6, 0.0),
                C64::new(0.1, 0.2),
                C64::new(0.1, -0.2),
                C64::new(0.4, 0.0),
            ],
        );
        let ab = kron(&a, &b);
        let ta = partial_trace_b(&ab, 3, 2).unwrap();
        let tb = partial_trace_a(&ab, 3, 2).unwrap();
        assert!((ta - &a * C64::new(trace_re(&b), 0.0)).norm() < 1e-12);
        assert!((tb - &b * C64::new(trace_re(&a), 0.0)).norm() < 1e-12);
    }

    #[test]
    fn dk_adjoint_matches_finite_difference() {
        // d/dt Tr[ M f(a + t h) ] at t=0 equals <dk_adjoint(M), h>.
        let a = test_herm3();
        let h = CMat::from_row_slice(
            3,
            3,
            &[
                C64::new(0.1, 0.0),
                C64::new(0.0, 0.2),
                C64::new(0.05, 0.0),
                C64::new(0.0, -0.2),
                C64::new(-0.3, 0.0),
                C64::new(0.1, 0.1),
                C64::new(0.05, 0.0),
                C64::new(0.1, -0.1),
                C64::new(0.2, 0.0),
            ],
        );
        let m = test_herm3() * C64::new(0.37, 0.0);
        let f = |v: f64| v.powf(0.3);
        let fp = |v: f64| 0.3 * v.powf(-0.7);
        let (vals, vecs) = eigh(&a);
        let g = dk_adjoint(&vals, &vecs, &m, f, fp);
        let t = 1e-6;
        let plus = herm_fn(&(&a + &h * C64::new(t, 0.0)), f);
        let minus = herm_fn(&(&a - &h * C64::new(t, 0.0)), f);
        let fd = (hs_inner(&m, &plus) - hs_inner(&m, &minus)) / (2.0 * t);
        assert_relative_eq!(hs_inner(&g, &h), fd, epsilon = 1e-6);
    }

    #[test]
    fn real_embedding_round_trips_and_preserves_psd() {
        let a = test_herm3();
        let e = real_embed(&a);
        assert!((real_unembed(&e) - &a).norm() < 1e-14);
        // spectra agree (doubled): compare smallest eigenvalues
        let (vals, _) = eigh(&a);
        let es = e.symmetric_eigen();
        let mut revals: Vec<f64> = es.eigenvalues.iter().cloned().collect();
        revals.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert_relative_eq!(revals[0], vals[0], epsilon = 1e-10);
        assert_relative_eq!(revals[1], vals[0], epsilon = 1e-10);
    }
}
