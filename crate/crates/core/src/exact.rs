//! Desk-scale exact oracle: matrix-free Hamiltonian application and a
//! restarted Lanczos eigensolver for the lowest part of the spectrum.
//!
//! Dense diagonalization is used up to dimension 1024; beyond that the
//! solver works from seeded Krylov spaces with full reorthogonalization,
//! so results are deterministic for a given model and seed.

use ndarray::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{
    apply_mid_op, hermitian_eigen, random_gaussian_vector, vec_norm, CMatrix, CVector, C64,
};
use crate::models::{SpinChainModel, Window, DENSE_DIM_GUARD};

const DENSE_EIG_CUTOFF: usize = 1024;

/// H|v> via per-bond application; never materializes H.
pub fn apply_hamiltonian(model: &SpinChainModel, v: &CVector) -> CVector {
    let d = model.d;
    let n = model.n;
    let mut out = Array1::<C64>::zeros(v.len());
    for (idx, term) in model.terms.iter().enumerate() {
        let i = idx + 1; // bond (i, i+1)
        let left = d.pow((i - 1) as u32);
        let right = d.pow((n - i - 1) as u32);
        out += &apply_mid_op(v, left, d * d, right, term);
    }
    out
}

/// <v|O|v> for a two-site operator at sites (site, site+1) of a chain state.
pub fn dense_two_site_expectation(
    state: &CVector,
    d: usize,
    n: usize,
    site: usize,
    op: &CMatrix,
) -> C64 {
    let left = d.pow((site - 1) as u32);
    let right = d.pow((n - site - 1) as u32);
    let ov = apply_mid_op(state, left, d * d, right, op);
    state.iter().zip(ov.iter()).map(|(a, b)| a.conj() * b).sum()
}

/// Apply an operator supported on a window of the chain to a dense state.
pub fn apply_window_operator(
    state: &CVector,
    d: usize,
    n: usize,
    window: Window,
    op: &CMatrix,
) -> CVector {
    let left = d.pow((window.lo - 1) as u32);
    let mid = d.pow(window.len() as u32);
    let right = d.pow((n - window.hi) as u32);
    apply_mid_op(state, left, mid, right, op)
}

/// k lowest eigenpairs of the chain Hamiltonian.
///
/// Post-condition: every returned pair satisfies ||Hv - Ev|| <= 1e-9.
pub fn exact_low_spectrum(model: &SpinChainModel, k: usize) -> Result<Vec<(f64, CVector)>> {
    exact_low_spectrum_seeded(model, k, 0x5eed)
}

pub fn exact_low_spectrum_seeded(
    model: &SpinChainModel,
    k: usize,
    seed: u64,
) -> Result<Vec<(f64, CVector)>> {
    let dim = model
        .dense_dim()
        .ok_or(Error::DenseGuard { dim: usize::MAX, max: DENSE_DIM_GUARD })?;
    if k == 0 || k > dim {
        return Err(Error::InvalidParam(format!("requested {k} eigenpairs of dim {dim}")));
    }
    let pairs = if dim <= DENSE_EIG_CUTOFF {
        let h = model.dense_hamiltonian()?;
        let (vals, vecs) = hermitian_eigen(&h)?;
        (0..k).map(|j| (vals[j], vecs.column(j).to_owned())).collect::<Vec<_>>()
    } else {
        lanczos_lowest(dim, |v| apply_hamiltonian(model, v), k, seed)?
    };
    for (e, v) in &pairs {
        let r = residual_norm(model, *e, v);
        if r > 1e-9 {
            return Err(Error::NotConverged(format!("eigenpair residual {r:.2e} at E = {e:.6}")));
        }
    }
    Ok(pairs)
}

/// Ground energy and state.
pub fn exact_ground(model: &SpinChainModel) -> Result<(f64, CVector)> {
    let mut v = exact_low_spectrum(model, 1)?;
    Ok(v.remove(0))
}

/// E1 - E0 at small N.
pub fn spectral_gap(model: &SpinChainModel) -> Result<f64> {
    let pairs = exact_low_spectrum(model, 2)?;
    Ok(pairs[1].0 - pairs[0].0)
}

pub fn residual_norm(model: &SpinChainModel, e: f64, v: &CVector) -> f64 {
    let hv = apply_hamiltonian(model, v);
    let r = &hv - &v.mapv(|z| z * C64::new(e, 0.0));
    vec_norm(&r)
}

/// Restarted Lanczos with full reorthogonalization (Rayleigh-Ritz on an
/// explicitly stored Krylov basis). Deterministic for a fixed seed.
fn lanczos_lowest<F>(dim: usize, matvec: F, k: usize, seed: u64) -> Result<Vec<(f64, CVector)>>
where
    F: Fn(&CVector) -> CVector,
{
    let max_basis = (k + 4).max(48).min(dim).min(140);
    let keep = (k + 6).min(max_basis - 2);
    let max_restarts = 60;
    let tol = 1e-11;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut basis: Vec<CVector> = Vec::with_capacity(max_basis);
    let mut h_basis: Vec<CVector> = Vec::with_capacity(max_basis);
    let start = {
        let mut v = random_gaussian_vector(dim, &mut rng);
        let n = vec_norm(&v);
        v.mapv_inplace(|z| z / n);
        v
    };
    basis.push(start);

    for _restart in 0..max_restarts {
        // expand the basis
        while basis.len() < max_basis {
            if h_basis.len() < basis.len() {
                let w = matvec(&basis[h_basis.len()]);
                h_basis.push(w);
            }
            let mut w = h_basis[basis.len() - 1].clone();
            orthogonalize(&mut w, &basis);
            orthogonalize(&mut w, &basis);
            let nb = vec_norm(&w);
            if nb < 1e-12 {
                // invariant subspace hit; continue from a fresh direction
                let mut r = random_gaussian_vector(dim, &mut rng);
                orthogonalize(&mut r, &basis);
                let nr = vec_norm(&r);
                if nr < 1e-12 {
                    break;
                }
                r.mapv_inplace(|z| z / C64::new(nr, 0.0));
                basis.push(r);
            } else {
                w.mapv_inplace(|z| z / C64::new(nb, 0.0));
                basis.push(w);
            }
        }
        while h_basis.len() < basis.len() {
            let w = matvec(&basis[h_basis.len()]);
            h_basis.push(w);
        }

        // Rayleigh-Ritz
        let m = basis.len();
        let mut proj = Array2::<C64>::zeros((m, m));
        for i in 0..m {
            for j in 0..m {
                proj[[i, j]] = basis[i].iter().zip(h_basis[j].iter()).map(|(a, b)| a.conj() * b).sum();
            }
        }
        let proj = crate::linalg::hermitize(&proj);
        let (theta, y) = hermitian_eigen(&proj)?;

        let ritz_vec = |col: usize| -> CVector {
            let mut v = Array1::<C64>::zeros(dim);
            for (b, &c) in basis.iter().zip(y.column(col).iter()) {
                v.scaled_add(c, b);
            }
            v
        };
        let ritz_hvec = |col: usize| -> CVector {
            let mut v = Array1::<C64>::zeros(dim);
            for (b, &c) in h_basis.iter().zip(y.column(col).iter()) {
                v.scaled_add(c, b);
            }
            v
        };

        // converged?
        let mut done = true;
        for j in 0..k {
            let v = ritz_vec(j);
            let hv = ritz_hvec(j);
            let r = &hv - &v.mapv(|z| z * C64::new(theta[j], 0.0));
            if vec_norm(&r) > tol * theta[m - 1].abs().max(1.0) {
                done = false;
                break;
            }
        }
        if done {
            let mut out = Vec::with_capacity(k);
            for j in 0..k {
                let mut v = ritz_vec(j);
                let n = vec_norm(&v);
                v.mapv_inplace(|z| z / C64::new(n, 0.0));
                out.push((theta[j], v));
            }
            return Ok(out);
        }

        // thick restart: keep the lowest ritz vectors, re-expand from them
        let kept: Vec<CVector> = (0..keep.min(m)).map(ritz_vec).collect();
        let kept_h: Vec<CVector> = (0..keep.min(m)).map(ritz_hvec).collect();
        basis.clear();
        h_basis.clear();
        for (mut v, hv) in kept.into_iter().zip(kept_h) {
            // re-orthonormalize to control drift
            orthogonalize(&mut v, &basis);
            let n = vec_norm(&v);
            if n < 1e-12 {
                continue;
            }
            let inv = C64::new(1.0 / n, 0.0);
            v.mapv_inplace(|z| z * inv);
            h_basis.push(hv.mapv(|z| z * inv));
            basis.push(v);
        }
        // the stored H products drifted by the in-basis orthogonalization;
        // recompute them exactly for the kept vectors
        for (i, b) in basis.iter().enumerate() {
            h_basis[i] = matvec(b);
        }
    }
    Err(Error::NotConverged(format!("Lanczos did not reach tolerance for {k} pairs")))
}

fn orthogonalize(w: &mut CVector, basis: &[CVector]) {
    for b in basis {
        let c: C64 = b.iter().zip(w.iter()).map(|(a, x)| a.conj() * x).sum();
        w.scaled_add(-c, b);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{build_model, ModelKind, ModelParams};

    #[test]
    fn aklt_ground_energy_is_zero() {
        let m = build_model(ModelKind::Aklt, 6, ModelParams::default(), 0).unwrap();
        let (e0, v) = exact_ground(&m).unwrap();
        assert!(e0.abs() < 1e-10, "AKLT ground energy {e0:.2e}");
        assert!(residual_norm(&m, e0, &v) < 1e-9);
    }

    #[test]
    fn aklt_open_chain_ground_space_is_fourfold() {
        let m = build_model(ModelKind::Aklt, 6, ModelParams::default(), 0).unwrap();
        let h = m.dense_hamiltonian().unwrap();
        let (vals, _) = hermitian_eigen(&h).unwrap();
        assert!(vals[3] < 1e-10, "fourth level {:.2e}", vals[3]);
        assert!(vals[4] > 0.05, "fifth level {:.2e}", vals[4]);
    }

    #[test]
    fn ising_gap_positive() {
        let m = build_model(ModelKind::TransverseIsing, 10, ModelParams::default(), 0).unwrap();
        let gap = spectral_gap(&m).unwrap();
        assert!(gap > 0.0);
    }

    #[test]
    fn lanczos_matches_dense() {
        let m = build_model(ModelKind::TransverseIsing, 10, ModelParams::default(), 0).unwrap();
        let dim = m.dense_dim().unwrap();
        let dense = {
            let h = m.dense_hamiltonian().unwrap();
            let (vals, _) = hermitian_eigen(&h).unwrap();
            vals
        };
        let pairs = lanczos_lowest(dim, |v| apply_hamiltonian(&m, v), 3, 7).unwrap();
        for j in 0..3 {
            assert!(
                (pairs[j].0 - dense[j]).abs() < 1e-9,
                "level {j}: lanczos {} vs dense {}",
                pairs[j].0,
                dense[j]
            );
        }
    }

    #[test]
    fn hamiltonian_application_matches_dense() {
        let m = build_model(ModelKind::TransverseXy, 6, ModelParams::default(), 0).unwrap();
        let h = m.dense_hamiltonian().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let v = random_gaussian_vector(64, &mut rng);
        let fast = apply_hamiltonian(&m, &v);
        let dense = h.dot(&v);
        let diff: f64 = (&fast - &dense).iter().map(|z| z.norm()).sum();
        assert!(diff < 1e-12);
    }
}
