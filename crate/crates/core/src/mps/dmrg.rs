//! Two-site DMRG ground-state search.
//!
//! The Hamiltonian MPO is assembled generically from the model's bond
//! terms via an operator Schmidt decomposition of each term, so per-site
//! varying terms (random fields, end-site absorption) need no special
//! casing. Local problems are solved by warm-started Lanczos on the
//! effective two-site Hamiltonian.

use ndarray::prelude::*;
use rand::SeedableRng;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, hermitize, svd, vec_norm, CMatrix, CVector, C64, ZERO};
use crate::models::SpinChainModel;

use super::MpsState;

/// Matrix product operator; tensor axes are (left, bra, ket, right).
#[derive(Debug, Clone)]
pub struct Mpo {
    pub d: usize,
    pub tensors: Vec<Array4<C64>>,
}

impl Mpo {
    /// MPO of the chain Hamiltonian. Bond k carries 2 + rank(h_k) states:
    /// "nothing yet", one per Schmidt component of the bond term, "done".
    pub fn hamiltonian(model: &SpinChainModel) -> Result<Self> {
        let d = model.d;
        let n = model.n;
        let mut factors: Vec<(Vec<CMatrix>, Vec<CMatrix>)> = Vec::with_capacity(n - 1);
        for term in &model.terms {
            factors.push(operator_schmidt(term, d)?);
        }
        let mut tensors = Vec::with_capacity(n);
        for i in 0..n {
            let rank_l = if i == 0 { 0 } else { factors[i - 1].0.len() };
            let rank_r = if i + 1 == n { 0 } else { factors[i].0.len() };
            let wl = if i == 0 { 1 } else { 2 + rank_l };
            let wr = if i + 1 == n { 1 } else { 2 + rank_r };
            let mut w = Array4::<C64>::zeros((wl, d, d, wr));
            // bond-state layout: 0 = start, 1..=rank = in progress, last = done
            let start_l = 0usize;
            let done_l = wl - 1;
            let start_r = 0usize;
            let done_r = wr - 1;
            if i + 1 < n {
                for s in 0..d {
                    w[[start_l, s, s, start_r]] = C64::new(1.0, 0.0);
                }
                for (k, lk) in factors[i].0.iter().enumerate() {
                    for s1 in 0..d {
                        for s2 in 0..d {
                            w[[start_l, s1, s2, 1 + k]] = lk[[s1, s2]];
                        }
                    }
                }
            }
            if i > 0 {
                for (k, rk) in factors[i - 1].1.iter().enumerate() {
                    for s1 in 0..d {
                        for s2 in 0..d {
                            w[[1 + k, s1, s2, done_r]] = rk[[s1, s2]];
                        }
                    }
                }
                if i + 1 < n {
                    for s in 0..d {
                        w[[done_l, s, s, done_r]] = C64::new(1.0, 0.0);
                    }
                }
            }
            tensors.push(w);
        }
        Ok(Mpo { d, tensors })
    }

    /// Dense matrix of the MPO (test scale only).
    pub fn to_dense(&self) -> CMatrix {
        let d = self.d;
        let n = self.tensors.len();
        let dim = d.pow(n as u32);
        // cur[(s1 t1 s2 t2 ...), w]
        let mut cur: CMatrix = Array2::ones((1, 1));
        for t in &self.tensors {
            let (wl, _, _, wr) = t.dim();
            let rows = cur.nrows();
            let mut next = Array2::<C64>::zeros((rows * d * d, wr));
            for row in 0..rows {
                for s1 in 0..d {
                    for s2 in 0..d {
                        for b in 0..wr {
                            let mut acc = ZERO;
                            for a in 0..wl {
                                acc += cur[[row, a]] * t[[a, s1, s2, b]];
                            }
                            next[[(row * d + s1) * d + s2, b]] = acc;
                        }
                    }
                }
            }
            cur = next;
        }
        let mut out = Array2::<C64>::zeros((dim, dim));
        for row in 0..cur.nrows() {
            let mut r = row;
            let mut digits = vec![0usize; 2 * n];
            for k in (0..2 * n).rev() {
                digits[k] = r % d;
                r /= d;
            }
            let mut bra = 0usize;
            let mut ket = 0usize;
            for site in 0..n {
                bra = bra * d + digits[2 * site];
                ket = ket * d + digits[2 * site + 1];
            }
            out[[bra, ket]] = cur[[row, 0]];
        }
        out
    }
}

/// Split a two-site operator into sum_k L_k (x) R_k by SVD.
fn operator_schmidt(term: &CMatrix, d: usize) -> Result<(Vec<CMatrix>, Vec<CMatrix>)> {
    // term[(s1 s2),(t1 t2)] -> m[(s1 t1),(s2 t2)]
    let mut m = Array2::<C64>::zeros((d * d, d * d));
    for s1 in 0..d {
        for s2 in 0..d {
            for t1 in 0..d {
                for t2 in 0..d {
                    m[[s1 * d + t1, s2 * d + t2]] = term[[s1 * d + s2, t1 * d + t2]];
                }
            }
        }
    }
    let (u, s, vt) = svd(&m)?;
    let smax = s.iter().cloned().fold(0.0, f64::max).max(1e-300);
    let rank = s.iter().filter(|&&x| x > 1e-12 * smax).count().max(1);
    let mut left = Vec::with_capacity(rank);
    let mut right = Vec::with_capacity(rank);
    for k in 0..rank {
        let sq = s[k].sqrt();
        let mut lk = Array2::<C64>::zeros((d, d));
        let mut rk = Array2::<C64>::zeros((d, d));
        for s1 in 0..d {
            for t1 in 0..d {
                lk[[s1, t1]] = u[[s1 * d + t1, k]] * sq;
                rk[[s1, t1]] = vt[[k, s1 * d + t1]] * sq;
            }
        }
        left.push(lk);
        right.push(rk);
    }
    Ok((left, right))
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub max_sweeps: usize,
    pub min_sweeps: usize,
    /// Converged when the energy change per sweep drops below this.
    pub energy_tol: f64,
    /// Relative singular-value cutoff during truncation.
    pub trunc_cutoff: f64,
    pub lanczos_iters: usize,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            max_sweeps: 50,
            min_sweeps: 2,
            energy_tol: 1e-10,
            trunc_cutoff: 1e-14,
            lanczos_iters: 60,
            seed: 0x0d_5eed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DmrgResult {
    pub mps: MpsState,
    pub energy: f64,
    pub sweep_energies: Vec<f64>,
    pub converged: bool,
    pub max_truncation_error: f64,
}

/// env axes: (bra bond, mpo bond, ket bond).
fn transfer_left(env: &Array3<C64>, t: &Array3<C64>, w: &Array4<C64>) -> Array3<C64> {
    let (bb, wb, kb) = env.dim();
    let (_, p, kr) = t.dim();
    let (_, _, _, wr) = w.dim();
    // tmp1[b, wm, s2, r2] = sum_k env[b, wm, k] t[k, s2, r2]
    let env_m = env.to_shape((bb * wb, kb)).unwrap();
    let t_m = t.to_shape((kb, p * kr)).unwrap();
    let tmp1 = env_m.dot(&t_m).into_shape_with_order((bb, wb, p, kr)).unwrap();
    // tmp2[b, wn, s1, r2] = sum_{wm, s2} w[wm, s1, s2, wn] tmp1[b, wm, s2, r2]
    let mut tmp2 = Array4::<C64>::zeros((bb, wr, p, kr));
    for wm in 0..wb {
        for s1 in 0..p {
            for s2 in 0..p {
                for wn in 0..wr {
                    let c = w[[wm, s1, s2, wn]];
                    if c == ZERO {
                        continue;
                    }
                    for b in 0..bb {
                        for r2 in 0..kr {
                            tmp2[[b, wn, s1, r2]] += c * tmp1[[b, wm, s2, r2]];
                        }
                    }
                }
            }
        }
    }
    // out[r1, wn, r2] = sum_{b, s1} conj(t[b, s1, r1]) tmp2[b, wn, s1, r2]
    let (_, _, r1dim) = t.dim();
    let tc = t.mapv(|z| z.conj());
    let tcm = tc.to_shape((bb * p, r1dim)).unwrap();
    let tmp2p = tmp2.permuted_axes([0, 2, 1, 3]); // (b, s1, wn, r2)
    let tmp2m = tmp2p
        .as_standard_layout()
        .into_shape_with_order((bb * p, wr * kr))
        .unwrap()
        .to_owned();
    tcm.t()
        .dot(&tmp2m)
        .into_shape_with_order((r1dim, wr, kr))
        .unwrap()
        .to_owned()
}

fn transfer_right(env: &Array3<C64>, t: &Array3<C64>, w: &Array4<C64>) -> Array3<C64> {
    let (bb, wb, kb) = env.dim();
    let (kl, p, _) = t.dim();
    let (wl, _, _, _) = w.dim();
    // tmp1[k_l, s2, wz, b_r] = sum_{k_r} t[k_l, s2, k_r] env[b_r, wz, k_r]
    let t_m = t.to_shape((kl * p, kb)).unwrap();
    let env_p = env.permuted_axes([2, 1, 0]); // (ket, w, bra)
    let env_m = env_p
        .as_standard_layout()
        .into_shape_with_order((kb, wb * bb))
        .unwrap()
        .to_owned();
    let tmp1 = t_m.dot(&env_m).into_shape_with_order((kl, p, wb, bb)).unwrap();
    // tmp2[k_l, s1, wy, b_r] = sum_{s2, wz} w[wy, s1, s2, wz] tmp1[k_l, s2, wz, b_r]
    let mut tmp2 = Array4::<C64>::zeros((kl, p, wl, bb));
    for wy in 0..wl {
        for s1 in 0..p {
            for s2 in 0..p {
                for wz in 0..wb {
                    let c = w[[wy, s1, s2, wz]];
                    if c == ZERO {
                        continue;
                    }
                    for k in 0..kl {
                        for b in 0..bb {
                            tmp2[[k, s1, wy, b]] += c * tmp1[[k, s2, wz, b]];
                        }
                    }
                }
            }
        }
    }
    // out[b_l, wy, k_l] = sum_{s1, b_r} conj(t[b_l, s1, b_r]) tmp2[k_l, s1, wy, b_r]
    let (bl, _, br) = t.dim();
    let tc = t.mapv(|z| z.conj());
    let tcm = tc.to_shape((bl, p * br)).unwrap();
    let tmp2p = tmp2.permuted_axes([1, 3, 2, 0]); // (s1, b_r, wy, k_l)
    let tmp2m = tmp2p
        .as_standard_layout()
        .into_shape_with_order((p * bb, wl * kl))
        .unwrap()
        .to_owned();
    tcm.dot(&tmp2m)
        .into_shape_with_order((bl, wl, kl))
        .unwrap()
        .to_owned()
}

/// Effective two-site Hamiltonian acting on theta (dl, p, p, dr).
fn apply_heff(
    theta: &CVector,
    lenv: &Array3<C64>,
    renv: &Array3<C64>,
    w1: &Array4<C64>,
    w2: &Array4<C64>,
    dims: (usize, usize, usize),
) -> CVector {
    let (dl, p, dr) = dims;
    let (bb, wlb, _) = lenv.dim();
    let (rb, wrb, _) = renv.dim();
    let (_, _, _, w1r) = w1.dim();
    let (_, _, _, w2r) = w2.dim();
    // t1[b_l, wa, s1, s2, k_r] = sum_{k_l} lenv[b_l, wa, k_l] x[k_l, s1, s2, k_r]
    let le = lenv.to_shape((bb * wlb, dl)).unwrap();
    let xm = theta
        .view()
        .into_shape_with_order((dl, p * p * dr))
        .unwrap();
    let t1 = le.dot(&xm).into_shape_with_order((bb, wlb, p, p, dr)).unwrap();
    // t2[b_l, wb, s1', s2, k_r] = sum_{wa, s1} w1[wa, s1', s1, wb] t1
    let mut t2 = Array5::<C64>::zeros((bb, w1r, p, p, dr));
    for wa in 0..wlb {
        for s1p in 0..p {
            for s1 in 0..p {
                for wbi in 0..w1r {
                    let c = w1[[wa, s1p, s1, wbi]];
                    if c == ZERO {
                        continue;
                    }
                    for b in 0..bb {
                        for s2 in 0..p {
                            for kr in 0..dr {
                                t2[[b, wbi, s1p, s2, kr]] += c * t1[[b, wa, s1, s2, kr]];
                            }
                        }
                    }
                }
            }
        }
    }
    // t3[b_l, wc, s1', s2', k_r] = sum_{wb, s2} w2[wb, s2', s2, wc] t2
    let mut t3 = Array5::<C64>::zeros((bb, w2r, p, p, dr));
    for wbi in 0..w1r {
        for s2p in 0..p {
            for s2 in 0..p {
                for wc in 0..w2r {
                    let c = w2[[wbi, s2p, s2, wc]];
                    if c == ZERO {
                        continue;
                    }
                    for b in 0..bb {
                        for s1p in 0..p {
                            for kr in 0..dr {
                                t3[[b, wc, s1p, s2p, kr]] += c * t2[[b, wbi, s1p, s2, kr]];
                            }
                        }
                    }
                }
            }
        }
    }
    // out[b_l, s1', s2', b_r] = sum_{wc, k_r} t3[b_l, wc, s1', s2', k_r] renv[b_r, wc, k_r]
    // (the environment already carries the conjugated bra side)
    let t3p = t3.permuted_axes([0, 2, 3, 1, 4]); // (b, s1', s2', wc, kr)
    let t3m = t3p
        .as_standard_layout()
        .into_shape_with_order((bb * p * p, w2r * dr))
        .unwrap()
        .to_owned();
    let rep = renv.view().permuted_axes([1, 2, 0]); // (w, ket, bra)
    let rem = rep
        .as_standard_layout()
        .into_shape_with_order((wrb * rb, rb))
        .unwrap()
        .to_owned();
    t3m.dot(&rem).into_shape_with_order(bb * p * p * rb).unwrap().to_owned()
}

/// Lowest eigenpair of a Hermitian operator given by `matvec`, via
/// Rayleigh-Ritz on a fully reorthogonalized Krylov basis seeded at
/// `start`. The Ritz value can only improve on the starting Rayleigh
/// quotient, which keeps DMRG sweeps monotone.
fn lanczos_ground<F>(start: &CVector, matvec: F, max_iter: usize) -> (f64, CVector)
where
    F: Fn(&CVector) -> CVector,
{
    let dim = start.len();
    let max_iter = max_iter.min(dim).max(1);
    let mut basis: Vec<CVector> = Vec::with_capacity(max_iter);
    let mut h_basis: Vec<CVector> = Vec::with_capacity(max_iter);
    let mut v = start.clone();
    let n0 = vec_norm(&v);
    v.mapv_inplace(|z| z / C64::new(n0, 0.0));
    basis.push(v);

    let mut prev_theta = f64::INFINITY;
    let mut proj = Array2::<C64>::zeros((max_iter, max_iter));
    loop {
        let it = basis.len() - 1;
        let hv = matvec(&basis[it]);
        for j in 0..=it {
            let c: C64 = basis[j].iter().zip(hv.iter()).map(|(a, x)| a.conj() * x).sum();
            proj[[j, it]] = c;
            proj[[it, j]] = c.conj();
        }
        h_basis.push(hv);

        let m = it + 1;
        let small = hermitize(&proj.slice(s![..m, ..m]).to_owned());
        let (vals, vecs) = hermitian_eigen(&small).expect("projected eigenproblem");
        let theta = vals[0];
        let converged = (prev_theta - theta).abs() <= 1e-14 * theta.abs().max(1.0);
        prev_theta = theta;

        let expand = m < max_iter && !converged;
        if expand {
            let mut w = h_basis[it].clone();
            for _ in 0..2 {
                for b in &basis {
                    let c: C64 = b.iter().zip(w.iter()).map(|(a, x)| a.conj() * x).sum();
                    w.scaled_add(-c, b);
                }
            }
            let beta = vec_norm(&w);
            if beta > 1e-13 {
                w.mapv_inplace(|z| z / C64::new(beta, 0.0));
                basis.push(w);
                continue;
            }
        }

        // assemble the Ritz vector and return
        let mut ground = Array1::<C64>::zeros(dim);
        for (b, &c) in basis.iter().zip(vecs.column(0).iter()) {
            ground.scaled_add(c, b);
        }
        let gn = vec_norm(&ground);
        ground.mapv_inplace(|z| z / C64::new(gn, 0.0));
        return (theta, ground);
    }
}

struct Environments {
    left: Vec<Array3<C64>>,
    right: Vec<Array3<C64>>,
}

/// Two-site DMRG with bond cap `bond_dim`.
///
/// Converged when the energy change per sweep drops below
/// `config.energy_tol` (after `min_sweeps`); flagged non-converged if
/// `max_sweeps` is exhausted first. Deterministic for a fixed seed.
pub fn dmrg_ground_state(
    model: &SpinChainModel,
    bond_dim: usize,
    config: &SweepConfig,
) -> Result<DmrgResult> {
    if bond_dim < 1 {
        return Err(Error::InvalidParam("bond dimension must be >= 1".into()));
    }
    let n = model.n;
    let d = model.d;
    let mpo = Mpo::hamiltonian(model)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(config.seed);
    let mut mps = MpsState::random(n, d, bond_dim.min(8), &mut rng);
    mps.model_hash = model.hash_string();
    mps.move_center_to(0);

    let mut envs = Environments {
        left: vec![Array3::ones((1, 1, 1)); n + 1],
        right: vec![Array3::ones((1, 1, 1)); n + 1],
    };
    for i in (1..n).rev() {
        let env = envs.right[i + 1].clone();
        envs.right[i] = transfer_right(&env, &mps.tensors[i], &mpo.tensors[i]);
    }

    let mut sweep_energies: Vec<f64> = Vec::new();
    let mut energy = f64::INFINITY;
    let mut converged = false;
    let mut max_trunc = 0.0f64;

    for sweep in 0..config.max_sweeps {
        let mut e_local = energy;
        for i in 0..n - 1 {
            let (e, trunc) = optimize_bond(&mut mps, &mpo, &mut envs, i, bond_dim, config, true)?;
            e_local = e;
            max_trunc = max_trunc.max(trunc);
        }
        for i in (0..n - 1).rev() {
            let (e, trunc) = optimize_bond(&mut mps, &mpo, &mut envs, i, bond_dim, config, false)?;
            e_local = e;
            max_trunc = max_trunc.max(trunc);
        }
        let prev = energy;
        energy = e_local;
        sweep_energies.push(energy);
        if sweep + 1 >= config.min_sweeps && (prev - energy).abs() < config.energy_tol {
            converged = true;
            break;
        }
    }
    mps.move_center_to(0);
    mps.normalize();
    Ok(DmrgResult { mps, energy, sweep_energies, converged, max_truncation_error: max_trunc })
}

fn optimize_bond(
    mps: &mut MpsState,
    mpo: &Mpo,
    envs: &mut Environments,
    i: usize,
    bond_dim: usize,
    config: &SweepConfig,
    moving_right: bool,
) -> Result<(f64, f64)> {
    let d = mps.d;
    mps.move_center_to(i);
    let lenv = envs.left[i].clone();
    let renv = envs.right[i + 2].clone();

    let a = &mps.tensors[i];
    let b = &mps.tensors[i + 1];
    let (dl, _, ka) = a.dim();
    let (_, _, dr) = b.dim();
    let am = a.to_shape((dl * d, ka)).unwrap();
    let bm = b.to_shape((ka, d * dr)).unwrap();
    let theta0 = am
        .dot(&bm)
        .into_shape_with_order(dl * d * d * dr)
        .unwrap()
        .to_owned();

    let w1 = &mpo.tensors[i];
    let w2 = &mpo.tensors[i + 1];
    let matvec = |x: &CVector| apply_heff(x, &lenv, &renv, w1, w2, (dl, d, dr));
    let (e, ground) = lanczos_ground(&theta0, matvec, config.lanczos_iters);

    let gm = ground
        .view()
        .into_shape_with_order((dl * d, d * dr))
        .unwrap()
        .to_owned();
    let (u, s, vt) = svd(&gm)?;
    let smax = s.iter().cloned().fold(0.0, f64::max).max(1e-300);
    let keep = s
        .iter()
        .filter(|&&x| x > config.trunc_cutoff * smax)
        .count()
        .clamp(1, bond_dim);
    let total: f64 = s.iter().map(|x| x * x).sum();
    let discarded: f64 = s.iter().skip(keep).map(|x| x * x).sum::<f64>() / total.max(1e-300);
    let kept_norm: f64 = s.iter().take(keep).map(|x| x * x).sum::<f64>().sqrt();

    let uk = u.slice(s![.., ..keep]).to_owned();
    let vk = vt.slice(s![..keep, ..]).to_owned();
    let sk = Array1::from_iter(s.iter().take(keep).map(|&x| C64::new(x / kept_norm, 0.0)));

    if moving_right {
        mps.tensors[i] = uk.to_shape((dl, d, keep)).unwrap().to_owned();
        let sv = Array2::from_diag(&sk).dot(&vk);
        mps.tensors[i + 1] = sv.to_shape((keep, d, dr)).unwrap().to_owned();
        mps.center = i + 1;
        envs.left[i + 1] = transfer_left(&envs.left[i], &mps.tensors[i], &mpo.tensors[i]);
    } else {
        let us = uk.dot(&Array2::from_diag(&sk));
        mps.tensors[i] = us.to_shape((dl, d, keep)).unwrap().to_owned();
        mps.tensors[i + 1] = vk.to_shape((keep, d, dr)).unwrap().to_owned();
        mps.center = i;
        envs.right[i + 1] =
            transfer_right(&envs.right[i + 2], &mps.tensors[i + 1], &mpo.tensors[i + 1]);
    }
    Ok((e, discarded))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact;
    use crate::linalg::max_abs;
    use crate::models::{build_model, ModelKind, ModelParams};

    #[test]
    fn mpo_matches_dense_hamiltonian() {
        for kind in [ModelKind::TransverseIsing, ModelKind::RandomFieldXy] {
            let m = build_model(kind, 6, ModelParams::default(), 3).unwrap();
            let mpo = Mpo::hamiltonian(&m).unwrap();
            let dense = mpo.to_dense();
            let href = m.dense_hamiltonian().unwrap();
            assert!(
                max_abs(&(&dense - &href)) < 1e-12,
                "{kind:?}: MPO vs dense mismatch {:.2e}",
                max_abs(&(&dense - &href))
            );
        }
    }

    #[test]
    fn mpo_matches_dense_aklt() {
        let m = build_model(ModelKind::Aklt, 5, ModelParams::default(), 0).unwrap();
        let mpo = Mpo::hamiltonian(&m).unwrap();
        let dense = mpo.to_dense();
        let href = m.dense_hamiltonian().unwrap();
        assert!(max_abs(&(&dense - &href)) < 1e-12);
    }

    #[test]
    fn heff_matches_dense() {
        use rand::SeedableRng;
        let m = build_model(ModelKind::TransverseXy, 6, ModelParams::default(), 1).unwrap();
        let mpo = Mpo::hamiltonian(&m).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let mut mps = MpsState::random(6, 2, 4, &mut rng);
        mps.move_center_to(2);
        // environments for bond (2, 3)
        let mut left = Array3::ones((1, 1, 1));
        for i in 0..2 {
            left = transfer_left(&left, &mps.tensors[i], &mpo.tensors[i]);
        }
        let mut right = Array3::ones((1, 1, 1));
        for i in (4..6).rev() {
            right = transfer_right(&right, &mps.tensors[i], &mpo.tensors[i]);
        }
        let a = &mps.tensors[2];
        let b = &mps.tensors[3];
        let (dl, _, ka) = a.dim();
        let (_, _, dr) = b.dim();
        let theta = a
            .to_shape((dl * 2, ka))
            .unwrap()
            .dot(&b.to_shape((ka, 2 * dr)).unwrap())
            .into_shape_with_order(dl * 2 * 2 * dr)
            .unwrap()
            .to_owned();
        let h_theta = apply_heff(&theta, &left, &right, &mpo.tensors[2], &mpo.tensors[3], (dl, 2, dr));
        // energy via effective H equals full-state energy
        let e_eff: C64 = theta.iter().zip(h_theta.iter()).map(|(a, x)| a.conj() * x).sum();
        let v = mps.to_dense().unwrap();
        let hv = exact::apply_hamiltonian(&m, &v);
        let e_full: C64 = v.iter().zip(hv.iter()).map(|(a, x)| a.conj() * x).sum();
        assert!(
            (e_eff - e_full).norm() < 1e-10,
            "effective {} vs full {}",
            e_eff.re,
            e_full.re
        );
    }

    #[test]
    fn dmrg_matches_exact_small_ising() {
        let m = build_model(ModelKind::TransverseIsing, 10, ModelParams::default(), 0).unwrap();
        let exact_e = exact::exact_ground(&m).unwrap().0;
        let res = dmrg_ground_state(&m, 20, &SweepConfig::default()).unwrap();
        assert!(res.converged, "DMRG did not converge");
        assert!(
            (res.energy - exact_e).abs() < 1e-8,
            "DMRG {} vs exact {}",
            res.energy,
            exact_e
        );
        assert!(res.mps.isometry_residual() < 1e-10);
        let norm = res.mps.clone().norm();
        assert!((norm - 1.0).abs() < 1e-10);
    }

    #[test]
    fn dmrg_aklt_zero_energy() {
        let m = build_model(ModelKind::Aklt, 20, ModelParams::default(), 0).unwrap();
        let res = dmrg_ground_state(&m, 4, &SweepConfig::default()).unwrap();
        assert!(res.energy.abs() < 1e-9, "AKLT DMRG energy {:.2e}", res.energy);
    }

    #[test]
    fn dmrg_energy_monotone_across_sweeps() {
        let m = build_model(ModelKind::TransverseXy, 12, ModelParams::default(), 0).unwrap();
        let res = dmrg_ground_state(&m, 12, &SweepConfig::default()).unwrap();
        for w in res.sweep_energies.windows(2) {
            assert!(w[1] <= w[0] + 1e-9, "energy rose between sweeps: {w:?}");
        }
    }

    #[test]
    fn dmrg_deterministic() {
        let m = build_model(ModelKind::TransverseIsing, 8, ModelParams::default(), 0).unwrap();
        let r1 = dmrg_ground_state(&m, 8, &SweepConfig::default()).unwrap();
        let r2 = dmrg_ground_state(&m, 8, &SweepConfig::default()).unwrap();
        assert_eq!(r1.energy.to_bits(), r2.energy.to_bits());
        for (a, b) in r1.mps.tensors.iter().zip(r2.mps.tensors.iter()) {
            assert_eq!(a.dim(), b.dim());
            for (x, y) in a.iter().zip(b.iter()) {
                assert_eq!(x.re.to_bits(), y.re.to_bits());
                assert_eq!(x.im.to_bits(), y.im.to_bits());
            }
        }
    }
}
