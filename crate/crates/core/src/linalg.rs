//! Dense complex matrix and tensor kernels used by every other module.
//!
//! Matrices are `ndarray` arrays of `Complex64` in row-major storage; the
//! LAPACK-backed decompositions below canonicalize to column-major copies
//! internally so eigenvector/singular-vector conventions do not depend on
//! the caller's memory layout.

use ndarray::prelude::*;
use ndarray_linalg::{Eigh, JobSvd, SVDDC, UPLO};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = Array2<C64>;
pub type CVector = Array1<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Relative tolerance for Hermiticity checks.
pub const HERMITICITY_TOL: f64 = 1e-12;

pub fn identity(n: usize) -> CMatrix {
    Array2::eye(n)
}

pub fn dagger(m: &CMatrix) -> CMatrix {
    m.t().mapv(|z| z.conj())
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn frobenius_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vec_norm(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diag().sum()
}

/// max |M - M^H|, the absolute Hermiticity deviation.
pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    let mut dev = 0.0f64;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            dev = dev.max((m[[i, j]] - m[[j, i]].conj()).norm());
        }
    }
    dev
}

/// Rejects matrices whose Hermiticity deviation exceeds `HERMITICITY_TOL`
/// relative to the largest entry.
pub fn ensure_hermitian(m: &CMatrix) -> Result<()> {
    let scale = max_abs(m).max(1e-300);
    let dev = hermiticity_deviation(m);
    if dev > HERMITICITY_TOL * scale.max(1.0) {
        return Err(Error::NotHermitian {
            deviation: dev,
            tolerance: HERMITICITY_TOL * scale.max(1.0),
        });
    }
    Ok(())
}

/// Symmetrize away the sub-tolerance anti-Hermitian part.
pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + &dagger(m)).mapv(|z| z * 0.5)
}

/// Column-major copy. LAPACK wrappers in `lax` hand the raw buffer to
/// Fortran routines, so a row-major input silently decomposes M^T; feeding
/// a column-major copy keeps the standard convention (columns are vectors).
fn fortran_order(m: &CMatrix) -> CMatrix {
    let mut f = Array2::zeros(m.raw_dim().f());
    f.assign(m);
    f
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Returns eigenvalues in ascending order and the unitary matrix whose
/// k-th column is the eigenvector for the k-th eigenvalue.
pub fn hermitian_eigen(m: &CMatrix) -> Result<(Array1<f64>, CMatrix)> {
    ensure_hermitian(m)?;
    let (vals, vecs) = fortran_order(m)
        .eigh(UPLO::Lower)
        .map_err(|e| Error::Backend(format!("eigh: {e}")))?;
    Ok((vals, vecs))
}

/// Eigenvalues only (ascending) of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Result<Array1<f64>> {
    Ok(hermitian_eigen(m)?.0)
}

/// Extreme eigenvalues (min, max) of a Hermitian matrix.
pub fn eig_range(m: &CMatrix) -> Result<(f64, f64)> {
    let vals = hermitian_eigenvalues(m)?;
    Ok((vals[0], vals[vals.len() - 1]))
}

/// Economy SVD: M = U diag(s) V^H with singular values descending,
/// U of shape (rows, k) and V^H of shape (k, cols), k = min(rows, cols).
pub fn svd(m: &CMatrix) -> Result<(CMatrix, Array1<f64>, CMatrix)> {
    let (u, s, vt) = fortran_order(m)
        .svddc(JobSvd::Some)
        .map_err(|e| Error::Backend(format!("svd: {e}")))?;
    Ok((u.unwrap(), s, vt.unwrap()))
}

/// Singular values only, descending.
pub fn singular_values(m: &CMatrix) -> Result<Array1<f64>> {
    let s = fortran_order(m)
        .svddc(JobSvd::None)
        .map_err(|e| Error::Backend(format!("svd: {e}")))?
        .1;
    Ok(s)
}

/// Spectral norm estimate; exact (largest singular value) via SVD.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    singular_values(m).map(|s| if s.is_empty() { 0.0 } else { s[0] }).unwrap_or_else(|_| frobenius_norm(m))
}

/// Kronecker product a ⊗ b.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[[i, j]];
            if aij == ZERO {
                continue;
            }
            out.slice_mut(s![i * br..(i + 1) * br, j * bc..(j + 1) * bc])
                .assign(&b.mapv(|x| x * aij));
        }
    }
    out
}

/// Embed an operator acting on contiguous sites `[pos, pos + op_sites)` of a
/// composite space with the given per-site dimensions, identity elsewhere.
pub fn embed_window_op(op: &CMatrix, dims: &[usize], pos: usize, op_sites: usize) -> CMatrix {
    let left: usize = dims[..pos].iter().product();
    let mid: usize = dims[pos..pos + op_sites].iter().product();
    let right: usize = dims[pos + op_sites..].iter().product();
    assert_eq!(op.nrows(), mid, "operator does not match site dims");
    kron(&kron(&identity(left), op), &identity(right))
}

/// Apply `op` to the middle factor of a state shaped (left, mid, right).
pub fn apply_mid_op(state: &CVector, left: usize, mid: usize, right: usize, op: &CMatrix) -> CVector {
    assert_eq!(state.len(), left * mid * right);
    assert_eq!(op.nrows(), mid);
    assert_eq!(op.ncols(), mid);
    let s3 = state.view().into_shape_with_order((left, mid, right)).unwrap();
    let mut out = Array3::<C64>::zeros((left, mid, right));
    for i in 0..left {
        let block = s3.index_axis(Axis(0), i);
        out.index_axis_mut(Axis(0), i).assign(&op.dot(&block));
    }
    out.into_shape_with_order(left * mid * right).unwrap().to_owned()
}

/// Apply a rectangular map to the middle factor: (left, m_in, right) -> (left, m_out, right).
pub fn apply_mid_map(
    state: &CVector,
    left: usize,
    mid_in: usize,
    right: usize,
    map: &CMatrix,
) -> CVector {
    assert_eq!(state.len(), left * mid_in * right);
    assert_eq!(map.ncols(), mid_in);
    let mid_out = map.nrows();
    let s3 = state.view().into_shape_with_order((left, mid_in, right)).unwrap();
    let mut out = Array3::<C64>::zeros((left, mid_out, right));
    for i in 0..left {
        let block = s3.index_axis(Axis(0), i);
        out.index_axis_mut(Axis(0), i).assign(&map.dot(&block));
    }
    out.into_shape_with_order(left * mid_out * right).unwrap().to_owned()
}

/// Reduced density matrix of the middle factor of a pure state shaped
/// (left, mid, right): rho = sum over outer indices of |v><v|.
pub fn reduced_density_mid(state: &CVector, left: usize, mid: usize, right: usize) -> CMatrix {
    assert_eq!(state.len(), left * mid * right);
    let s3 = state.view().into_shape_with_order((left, mid, right)).unwrap();
    // stack as (mid, left*right)
    let mut v = Array2::<C64>::zeros((mid, left * right));
    for i in 0..left {
        let block = s3.index_axis(Axis(0), i); // (mid, right)
        v.slice_mut(s![.., i * right..(i + 1) * right]).assign(&block);
    }
    let vh = v.t().mapv(|z| z.conj());
    v.dot(&vh)
}

/// Partial trace of an operator over a subset of sites.
///
/// `dims` are the per-site dimensions of the full space the operator acts
/// on; `keep[k]` marks sites that survive.
pub fn partial_trace(op: &CMatrix, dims: &[usize], keep: &[bool]) -> CMatrix {
    assert_eq!(dims.len(), keep.len());
    let total: usize = dims.iter().product();
    assert_eq!(op.nrows(), total);
    // trace out one site at a time, rightmost first so strides stay simple
    let mut cur = op.clone();
    let mut cur_dims: Vec<usize> = dims.to_vec();
    let mut cur_keep: Vec<bool> = keep.to_vec();
    while let Some(pos) = cur_keep.iter().rposition(|k| !k) {
        cur = trace_one_site(&cur, &cur_dims, pos);
        cur_dims.remove(pos);
        cur_keep.remove(pos);
    }
    cur
}

fn trace_one_site(op: &CMatrix, dims: &[usize], pos: usize) -> CMatrix {
    let left: usize = dims[..pos].iter().product();
    let d = dims[pos];
    let right: usize = dims[pos + 1..].iter().product();
    let out_dim = left * right;
    let mut out = Array2::<C64>::zeros((out_dim, out_dim));
    for al in 0..left {
        for ar in 0..right {
            for bl in 0..left {
                for br in 0..right {
                    let mut acc = ZERO;
                    for s in 0..d {
                        let row = (al * d + s) * right + ar;
                        let col = (bl * d + s) * right + br;
                        acc += op[[row, col]];
                    }
                    out[[al * right + ar, bl * right + br]] = acc;
                }
            }
        }
    }
    out
}

/// Standard-normal complex matrix (real and imaginary parts independent).
pub fn random_gaussian_matrix<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    Array2::from_shape_fn((rows, cols), |_| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

pub fn random_gaussian_vector<R: Rng>(n: usize, rng: &mut R) -> CVector {
    Array1::from_shape_fn(n, |_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

/// Random Hermitian matrix (GUE-style, not normalized).
pub fn random_hermitian<R: Rng>(n: usize, rng: &mut R) -> CMatrix {
    let a = random_gaussian_matrix(n, n, rng);
    hermitize(&a)
}

/// Least-squares fit of log(y) = log(a) - rate * x on points with
/// y above `floor`; returns the decay rate (positive = decaying).
pub fn fit_log_decay(points: &[(f64, f64)], floor: f64) -> Result<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, y)| *y > floor)
        .map(|&(x, y)| (x, y.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientData { got: pts.len(), need: 3 });
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return Err(Error::InsufficientData { got: pts.len(), need: 3 });
    }
    let slope = (n * sxy - sx * sy) / denom;
    Ok(-slope)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn reconstruct_eigen(vals: &Array1<f64>, vecs: &CMatrix) -> CMatrix {
        let lam = Array2::from_diag(&vals.mapv(|v| C64::new(v, 0.0)));
        vecs.dot(&lam).dot(&dagger(vecs))
    }

    #[test]
    fn eigen_diagonal_case() {
        let m = Array2::from_diag(&arr1(&[C64::new(3.0, 0.0), C64::new(1.0, 0.0), C64::new(2.0, 0.0)]));
        let (vals, _) = hermitian_eigen(&m).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-14);
        assert!((vals[1] - 2.0).abs() < 1e-14);
        assert!((vals[2] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn eigen_identity() {
        let (vals, _) = hermitian_eigen(&identity(4)).unwrap();
        for v in vals.iter() {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn eigen_reconstruction_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m = random_hermitian(20, &mut rng);
        let (vals, vecs) = hermitian_eigen(&m).unwrap();
        let recon = reconstruct_eigen(&vals, &vecs);
        let rel = max_abs(&(&recon - &m)) / spectral_norm(&m);
        assert!(rel < 1e-10, "rel residual {rel:.2e}");
        // orthonormal eigenvectors
        let g = dagger(&vecs).dot(&vecs);
        assert!(max_abs(&(&g - &identity(20))) < 1e-12);
    }

    #[test]
    fn eigen_rejects_non_hermitian() {
        let mut m = identity(3);
        m[[0, 1]] = C64::new(0.5, 0.0);
        assert!(matches!(hermitian_eigen(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn svd_diagonal() {
        let m = Array2::from_diag(&arr1(&[C64::new(2.0, 0.0), C64::new(1.0, 0.0)]));
        let (_, s, _) = svd(&m).unwrap();
        assert!((s[0] - 2.0).abs() < 1e-14);
        assert!((s[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn svd_rank_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = random_gaussian_vector(9, &mut rng);
        let v = random_gaussian_vector(5, &mut rng);
        let m = Array2::from_shape_fn((9, 5), |(i, j)| u[i] * v[j].conj());
        let (_, s, _) = svd(&m).unwrap();
        let above: usize = s.iter().filter(|&&x| x > 1e-12 * s[0]).count();
        assert_eq!(above, 1);
    }

    #[test]
    fn svd_reconstruction_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = random_gaussian_matrix(30, 12, &mut rng);
        let (u, s, vt) = svd(&m).unwrap();
        let sm = Array2::from_diag(&s.mapv(|x| C64::new(x, 0.0)));
        let recon = u.dot(&sm).dot(&vt);
        let rel = max_abs(&(&recon - &m)) / s[0];
        assert!(rel < 1e-10, "rel residual {rel:.2e}");
        // isometries
        assert!(max_abs(&(&dagger(&u).dot(&u) - &identity(12))) < 1e-12);
        assert!(max_abs(&(&vt.dot(&dagger(&vt)) - &identity(12))) < 1e-12);
    }

    /// 1000 random instances up to size 64: reconstruction residuals within
    /// 1e-10 relative, eigenvalues real (zheev returns reals by contract,
    /// so the check is on the reconstruction path).
    #[test]
    fn decomposition_residual_sweep() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for k in 0..1000 {
            let n = 1 + (k % 64);
            if k % 2 == 0 {
                let m = random_hermitian(n, &mut rng);
                let (vals, vecs) = hermitian_eigen(&m).unwrap();
                let rel = max_abs(&(&reconstruct_eigen(&vals, &vecs) - &m)) / spectral_norm(&m).max(1e-300);
                assert!(rel < 1e-10, "eigen residual {rel:.2e} at n={n}");
            } else {
                let cols = 1 + (k % 31);
                let m = random_gaussian_matrix(n, cols, &mut rng);
                let (u, s, vt) = svd(&m).unwrap();
                let sm = Array2::from_diag(&s.mapv(|x| C64::new(x, 0.0)));
                let rel = max_abs(&(&u.dot(&sm).dot(&vt) - &m)) / s[0].max(1e-300);
                assert!(rel < 1e-10, "svd residual {rel:.2e} at {n}x{cols}");
            }
        }
    }

    #[test]
    fn kron_and_embed() {
        let sx = arr2(&[[ZERO, ONE], [ONE, ZERO]]);
        let id = identity(2);
        let k = kron(&sx, &id);
        assert_eq!(k.dim(), (4, 4));
        assert_eq!(k[[0, 2]], ONE);
        assert_eq!(k[[1, 3]], ONE);
        let e = embed_window_op(&sx, &[2, 2, 2], 1, 1);
        assert_eq!(e.dim(), (8, 8));
        // acts as 1 x sx x 1
        assert_eq!(e, kron(&kron(&id, &sx), &id));
    }

    #[test]
    fn apply_mid_matches_embed() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let op = random_hermitian(4, &mut rng);
        let state = random_gaussian_vector(2 * 4 * 3, &mut rng);
        let fast = apply_mid_op(&state, 2, 4, 3, &op);
        let dense = embed_window_op(&op, &[2, 4, 3], 1, 1).dot(&state);
        let diff: f64 = (&fast - &dense).iter().map(|z| z.norm()).sum();
        assert!(diff < 1e-12);
    }

    #[test]
    fn partial_trace_pure_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut v = random_gaussian_vector(2 * 3 * 2, &mut rng);
        let n = vec_norm(&v);
        v.mapv_inplace(|z| z / n);
        let rho = reduced_density_mid(&v, 2, 3, 2);
        assert!((trace(&rho).re - 1.0).abs() < 1e-12);
        assert!(hermiticity_deviation(&rho) < 1e-13);
        // same via full projector partial trace
        let full = Array2::from_shape_fn((12, 12), |(i, j)| v[i] * v[j].conj());
        let rho2 = partial_trace(&full, &[2, 3, 2], &[false, true, false]);
        assert!(max_abs(&(&rho - &rho2)) < 1e-12);
    }

    #[test]
    fn partial_trace_preserves_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let m = random_hermitian(8, &mut rng);
        let t = trace(&m);
        let reduced = partial_trace(&m, &[2, 2, 2], &[true, false, true]);
        assert!((trace(&reduced) - t).norm() < 1e-12);
    }

    #[test]
    fn log_decay_fit() {
        let pts: Vec<(f64, f64)> = (1..8).map(|k| (k as f64, 3.0 * (-0.7 * k as f64).exp())).collect();
        let rate = fit_log_decay(&pts, 1e-12).unwrap();
        assert!((rate - 0.7).abs() < 1e-10);
    }
}
