//! Matrix product states: canonical forms, expectation values, Schmidt
//! spectra, correlation lengths, dense conversion, and the two-cut window
//! gauge that patch extraction builds on.
//!
//! Site tensors are `(left bond, physical, right bond)` arrays; sites are
//! numbered 1..=N to match the chain models. The state keeps a canonical
//! center: tensors left of it are left-isometries, right of it
//! right-isometries.

mod dmrg;
mod io;
mod random_op;

pub use dmrg::{dmrg_ground_state, DmrgResult, Mpo, SweepConfig};
pub use random_op::random_antihermitian_operator;

use ndarray::prelude::*;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{svd, CMatrix, CVector, C64, ZERO};
use crate::models::{ObservableSpec, SpinChainModel, Window, DENSE_DIM_GUARD};

#[derive(Debug, Clone)]
pub struct MpsState {
    pub d: usize,
    pub tensors: Vec<Array3<C64>>,
    /// 0-based index of the canonical center site.
    pub center: usize,
    /// Fingerprint of the model this state was computed for ("" if ad hoc).
    pub model_hash: String,
}

/// Schmidt weights at one bond, descending, with sum of squares 1.
#[derive(Debug, Clone)]
pub struct SchmidtSpectrum {
    /// Cut between sites `bond` and `bond + 1` (1-indexed).
    pub bond: usize,
    pub weights: Vec<f64>,
}

/// Window tensors with both outer bonds rotated to the Schmidt bases of
/// their cuts, plus the full weight lists at those cuts.
#[derive(Debug, Clone)]
pub struct WindowGauge {
    pub window: Window,
    pub tensors: Vec<Array3<C64>>,
    pub left_weights: Vec<f64>,
    pub right_weights: Vec<f64>,
}

fn as_matrix_lp_r(t: &Array3<C64>) -> CMatrix {
    let (l, p, r) = t.dim();
    t.to_shape((l * p, r)).unwrap().to_owned()
}

fn as_matrix_l_pr(t: &Array3<C64>) -> CMatrix {
    let (l, p, r) = t.dim();
    t.to_shape((l, p * r)).unwrap().to_owned()
}

impl MpsState {
    pub fn n(&self) -> usize {
        self.tensors.len()
    }

    pub fn bond_dims(&self) -> Vec<usize> {
        let mut dims = Vec::with_capacity(self.n() + 1);
        dims.push(self.tensors[0].dim().0);
        for t in &self.tensors {
            dims.push(t.dim().2);
        }
        dims
    }

    /// Random MPS with the given uniform bond dimension, normalized,
    /// center at site 1.
    pub fn random<R: Rng>(n: usize, d: usize, bond: usize, rng: &mut R) -> Self {
        let mut tensors = Vec::with_capacity(n);
        let mut left = 1usize;
        for i in 0..n {
            let max_left = d.pow(i as u32).min(d.pow((n - i) as u32) * bond);
            let l = left.min(max_left).max(1);
            let right = if i + 1 == n {
                1
            } else {
                bond.min(d.pow((i + 1) as u32)).min(d.pow((n - i - 1) as u32))
            };
            let t = Array3::from_shape_fn((l, d, right), |_| {
                C64::new(
                    rng.sample(rand_distr::StandardNormal),
                    rng.sample(rand_distr::StandardNormal),
                )
            });
            tensors.push(t);
            left = right;
        }
        let mut mps = MpsState { d, tensors, center: n - 1, model_hash: String::new() };
        mps.move_center_to(0);
        mps.normalize();
        mps
    }

    /// Product state |s s s ...> (computational basis), bond dimension 1.
    pub fn product_state(n: usize, d: usize, level: usize) -> Self {
        let mut t = Array3::zeros((1, d, 1));
        t[[0, level, 0]] = C64::new(1.0, 0.0);
        MpsState { d, tensors: vec![t; n], center: 0, model_hash: String::new() }
    }

    pub fn norm(&self) -> f64 {
        self.tensors[self.center].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            let inv = C64::new(1.0 / n, 0.0);
            self.tensors[self.center].mapv_inplace(|z| z * inv);
        }
    }

    /// Move the canonical center one site right via SVD (no truncation).
    fn shift_center_right(&mut self) {
        let i = self.center;
        let (l, p, r) = self.tensors[i].dim();
        let m = as_matrix_lp_r(&self.tensors[i]);
        let (u, s, vt) = svd(&m).expect("svd in center move");
        let k = s.len();
        self.tensors[i] = u.to_shape((l, p, k)).unwrap().to_owned();
        let sv = Array2::from_diag(&s.mapv(|x| C64::new(x, 0.0))).dot(&vt);
        let next = as_matrix_l_pr(&self.tensors[i + 1]);
        let (_, p2, r2) = self.tensors[i + 1].dim();
        let merged = sv.dot(&next);
        self.tensors[i + 1] = merged.to_shape((k, p2, r2)).unwrap().to_owned();
        let _ = r;
        self.center = i + 1;
    }

    fn shift_center_left(&mut self) {
        let i = self.center;
        let (l, p, _r) = self.tensors[i].dim();
        let m = as_matrix_l_pr(&self.tensors[i]);
        let (u, s, vt) = svd(&m).expect("svd in center move");
        let k = s.len();
        self.tensors[i] = vt.to_shape((k, p, _r)).unwrap().to_owned();
        let us = u.dot(&Array2::from_diag(&s.mapv(|x| C64::new(x, 0.0))));
        let prev = as_matrix_lp_r(&self.tensors[i - 1]);
        let (l0, p0, _) = self.tensors[i - 1].dim();
        let merged = prev.dot(&us);
        self.tensors[i - 1] = merged.to_shape((l0, p0, k)).unwrap().to_owned();
        let _ = l;
        self.center = i - 1;
    }

    /// Move the canonical center to 0-based site index `site`.
    pub fn move_center_to(&mut self, site: usize) {
        assert!(site < self.n());
        while self.center < site {
            self.shift_center_right();
        }
        while self.center > site {
            self.shift_center_left();
        }
    }

    /// Largest deviation from the isometry conditions on either side of
    /// the center.
    pub fn isometry_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, t) in self.tensors.iter().enumerate() {
            if i < self.center {
                let q = as_matrix_lp_r(t);
                let g = crate::linalg::dagger(&q).dot(&q);
                let eye = crate::linalg::identity(g.nrows());
                worst = worst.max(crate::linalg::max_abs(&(&g - &eye)));
            } else if i > self.center {
                let q = as_matrix_l_pr(t);
                let g = q.dot(&crate::linalg::dagger(&q));
                let eye = crate::linalg::identity(g.nrows());
                worst = worst.max(crate::linalg::max_abs(&(&g - &eye)));
            }
        }
        worst
    }

    /// Contract to a dense state vector (guarded).
    pub fn to_dense(&self) -> Result<CVector> {
        let dim = self
            .d
            .checked_pow(self.n() as u32)
            .filter(|&x| x <= DENSE_DIM_GUARD)
            .ok_or(Error::DenseGuard { dim: usize::MAX, max: DENSE_DIM_GUARD })?;
        let mut cur: CMatrix = Array2::ones((1, 1));
        for t in &self.tensors {
            let (l, p, r) = t.dim();
            let rows = cur.nrows();
            let m = t.to_shape((l, p * r)).unwrap();
            let next = cur.dot(&m); // (rows, p*r)
            cur = next.to_shape((rows * p, r)).unwrap().to_owned();
        }
        debug_assert_eq!(cur.nrows(), dim);
        Ok(cur.column(0).to_owned())
    }

    /// Exact MPS factorization of a dense state via successive SVDs.
    /// Singular values below `cutoff` relative to the largest at each cut
    /// are dropped (exact zeros only, for the default 1e-14).
    pub fn from_dense(v: &CVector, d: usize, n: usize, cutoff: f64) -> Result<Self> {
        if v.len() != d.pow(n as u32) {
            return Err(Error::DimensionMismatch(format!(
                "state length {} is not {d}^{n}",
                v.len()
            )));
        }
        let mut tensors = Vec::with_capacity(n);
        let mut cur: CMatrix = v.view().to_shape((1, v.len())).unwrap().to_owned();
        let mut chi = 1usize;
        for i in 0..n {
            let rest = cur.ncols() / d;
            if i + 1 == n {
                // the remaining (chi, d) block is the last tensor
                let t = cur.to_shape((chi, d, 1)).unwrap().to_owned();
                tensors.push(t);
                break;
            }
            let m = cur.to_shape((chi * d, rest)).unwrap().to_owned();
            let (u, s, vt) = svd(&m)?;
            let smax = s.iter().cloned().fold(0.0, f64::max).max(1e-300);
            let k = s.iter().filter(|&&x| x > cutoff * smax).count().max(1);
            let t = u.slice(s![.., ..k]).to_shape((chi, d, k)).unwrap().to_owned();
            tensors.push(t);
            let sk = Array2::from_diag(&s.slice(s![..k]).mapv(|x| C64::new(x, 0.0)));
            cur = sk.dot(&vt.slice(s![..k, ..]));
            chi = k;
        }
        let mut mps = MpsState { d, tensors, center: n - 1, model_hash: String::new() };
        mps.normalize();
        Ok(mps)
    }

    /// <psi| O_site |psi> for a single-site operator (center is moved).
    pub fn expectation_single(&mut self, site: usize, op: &CMatrix) -> C64 {
        assert!((1..=self.n()).contains(&site));
        self.move_center_to(site - 1);
        let t = &self.tensors[site - 1];
        let (l, p, r) = t.dim();
        let tm = t.to_shape((l, p, r)).unwrap();
        let mut acc = ZERO;
        for a in 0..l {
            for b in 0..r {
                for s1 in 0..p {
                    for s2 in 0..p {
                        acc += tm[[a, s1, b]].conj() * op[[s1, s2]] * tm[[a, s2, b]];
                    }
                }
            }
        }
        acc
    }

    /// <psi| O_{site, site+1} |psi> for a two-site operator.
    pub fn expectation_two_site(&mut self, site: usize, op: &CMatrix) -> C64 {
        assert!((1..self.n()).contains(&site));
        self.move_center_to(site - 1);
        let a = &self.tensors[site - 1];
        let b = &self.tensors[site];
        let (l, p1, k) = a.dim();
        let (_, p2, r) = b.dim();
        // theta (l, p1, p2, r)
        let am = a.to_shape((l * p1, k)).unwrap();
        let bm = b.to_shape((k, p2 * r)).unwrap();
        let theta = am.dot(&bm); // (l*p1, p2*r)
        let th = theta.to_shape((l, p1, p2, r)).unwrap();
        let mut acc = ZERO;
        for al in 0..l {
            for ar in 0..r {
                for s1 in 0..p1 {
                    for s2 in 0..p2 {
                        let bra = th[[al, s1, s2, ar]].conj();
                        if bra == ZERO {
                            continue;
                        }
                        for t1 in 0..p1 {
                            for t2 in 0..p2 {
                                acc += bra * op[[s1 * p2 + s2, t1 * p2 + t2]] * th[[al, t1, t2, ar]];
                            }
                        }
                    }
                }
            }
        }
        acc
    }

    /// Expectation of a two-site observable, checked real.
    pub fn expectation(&mut self, obs: &ObservableSpec) -> Result<f64> {
        if obs.sites.1 > self.n() {
            return Err(Error::DimensionMismatch(format!(
                "observable at sites {:?} on a chain of {}",
                obs.sites,
                self.n()
            )));
        }
        let v = self.expectation_two_site(obs.sites.0, &obs.matrix);
        if v.im.abs() > 1e-10 {
            return Err(Error::Unreliable(format!(
                "imaginary leakage {:.2e} in Hermitian expectation",
                v.im
            )));
        }
        Ok(v.re)
    }

    /// Connected two-point correlator <A_i B_j> - <A_i><B_j> for j = i+1..=jmax.
    pub fn connected_correlator(
        &mut self,
        i: usize,
        jmax: usize,
        op_a: &CMatrix,
        op_b: &CMatrix,
    ) -> Vec<f64> {
        assert!(i >= 1 && jmax <= self.n() && i < jmax);
        let mean_a = self.expectation_single(i, op_a);
        let means_b: Vec<C64> = (i + 1..=jmax).map(|j| self.expectation_single(j, op_b)).collect();
        self.move_center_to(i - 1);
        // left environment with op_a inserted at site i
        let t = &self.tensors[i - 1];
        let (l, p, r) = t.dim();
        let mut env: CMatrix = Array2::zeros((r, r));
        for a in 0..l {
            for s1 in 0..p {
                for s2 in 0..p {
                    let c = op_a[[s1, s2]];
                    if c == ZERO {
                        continue;
                    }
                    for b1 in 0..r {
                        for b2 in 0..r {
                            env[[b1, b2]] += t[[a, s1, b1]].conj() * c * t[[a, s2, b2]];
                        }
                    }
                }
            }
        }
        let mut out = Vec::with_capacity(jmax - i);
        for j in i + 1..=jmax {
            let t = &self.tensors[j - 1];
            let (l2, p2, r2) = t.dim();
            // close with op_b at site j (right part is right-isometric)
            let mut val = ZERO;
            for b1 in 0..l2 {
                for b2 in 0..l2 {
                    let e = env[[b1, b2]];
                    if e == ZERO {
                        continue;
                    }
                    for s1 in 0..p2 {
                        for s2 in 0..p2 {
                            let c = op_b[[s1, s2]];
                            if c == ZERO {
                                continue;
                            }
                            for b in 0..r2 {
                                val += e * t[[b1, s1, b]].conj() * c * t[[b2, s2, b]];
                            }
                        }
                    }
                }
            }
            out.push((val - mean_a * means_b[j - i - 1]).norm());
            // extend env through site j with identity
            let mut next: CMatrix = Array2::zeros((r2, r2));
            for b1 in 0..l2 {
                for b2 in 0..l2 {
                    let e = env[[b1, b2]];
                    if e == ZERO {
                        continue;
                    }
                    for s in 0..p2 {
                        for c1 in 0..r2 {
                            for c2 in 0..r2 {
                                next[[c1, c2]] += e * t[[b1, s, c1]].conj() * t[[b2, s, c2]];
                            }
                        }
                    }
                }
            }
            env = next;
        }
        out
    }

    /// Schmidt spectrum at the cut between sites `bond` and `bond + 1`.
    pub fn schmidt_spectrum(&mut self, bond: usize) -> Result<SchmidtSpectrum> {
        if bond < 1 || bond >= self.n() {
            return Err(Error::InvalidParam(format!("bond {bond} outside 1..{}", self.n())));
        }
        self.move_center_to(bond - 1);
        self.normalize();
        let m = as_matrix_lp_r(&self.tensors[bond - 1]);
        let s = crate::linalg::singular_values(&m)?;
        Ok(SchmidtSpectrum { bond, weights: s.to_vec() })
    }

    /// Correlation length from a least-squares fit of the log of the
    /// connected correlator over the window where it lies in
    /// [1e-10, 1e-2]. Falls back to the secondary probe when the primary
    /// correlator is lost in the floating-point floor.
    pub fn correlation_length(&mut self, kind: crate::models::ModelKind) -> Result<f64> {
        let probes = [
            crate::models::probe_operator(kind),
            crate::models::fallback_probe_operator(kind),
        ];
        let n = self.n();
        let i0 = (n / 4).max(1);
        let jmax = (3 * n / 4).min(n);
        let mut last_err = None;
        for op in &probes {
            let corr = self.connected_correlator(i0, jmax, op, op);
            let pts: Vec<(f64, f64)> = corr
                .iter()
                .enumerate()
                .map(|(k, &c)| ((k + 1) as f64, c))
                .filter(|&(_, c)| (1e-10..=1e-2).contains(&c))
                .collect();
            if pts.len() < 3 {
                last_err = Some(Error::Unreliable(
                    "correlator below floor over the whole fit window".into(),
                ));
                continue;
            }
            match crate::linalg::fit_log_decay(&pts, 0.0) {
                Ok(rate) if rate > 0.0 => return Ok(1.0 / rate),
                _ => {
                    last_err = Some(Error::Unreliable("correlator does not decay".into()));
                }
            }
        }
        Err(last_err.unwrap_or_else(|| Error::Unreliable("no usable probe".into())))
    }

    /// Rotate the two cut bonds of `window` into their Schmidt bases and
    /// return the window strip plus the cut weights.
    ///
    /// The strip is normalized so the left cut weights are divided out
    /// while the right cut weights stay inside the last tensor's columns;
    /// the span of boundary-conditioned window vectors (which is all any
    /// caller consumes) is unaffected by that per-column scaling.
    pub fn window_gauge(&self, window: Window) -> Result<WindowGauge> {
        let n = self.n();
        if window.lo < 1 || window.hi > n {
            return Err(Error::WindowOutOfRange { lo: window.lo, hi: window.hi, n });
        }
        if window.lo == 1 || window.hi == n {
            return Err(Error::PatchTouchesEnd { lo: window.lo, hi: window.hi, n });
        }
        let mut m = self.clone();
        m.move_center_to(window.lo - 1);
        m.normalize();

        // left cut (lo-1 | lo): Schmidt basis rotation, weights out front
        let t = &m.tensors[window.lo - 1];
        let (l, p, r) = t.dim();
        let (_, sl, vt) = svd(&t.to_shape((l, p * r)).unwrap().to_owned())?;
        let kl = sl.len();
        let left_weights = sl.to_vec();
        let mut strip: Vec<Array3<C64>> = Vec::with_capacity(window.len());
        strip.push(vt.to_shape((kl, p, r)).unwrap().to_owned());
        for i in window.lo..window.hi {
            strip.push(m.tensors[i].clone());
        }

        // right cut (hi | hi+1): weighted sweep determines the Schmidt
        // basis; only the basis rotation is applied to the strip
        let mut cur: CMatrix = Array2::from_diag(&sl.mapv(|x| C64::new(x, 0.0)));
        for t in &strip {
            let (lt, pt, rt) = t.dim();
            let rows = cur.nrows();
            let merged = cur.dot(&t.to_shape((lt, pt * rt)).unwrap()); // (rows, pt*rt)
            let m2 = merged.to_shape((rows * pt, rt)).unwrap().to_owned();
            // compress rows to keep the sweep cheap
            let (_, s2, vt2) = svd(&m2)?;
            let smax = s2.iter().cloned().fold(0.0, f64::max).max(1e-300);
            let k2 = s2.iter().filter(|&&x| x > 1e-15 * smax).count().max(1);
            cur = Array2::from_diag(&s2.slice(s![..k2]).mapv(|x| C64::new(x, 0.0)))
                .dot(&vt2.slice(s![..k2, ..]));
        }
        // cur is (rank, r_hi): its SVD right factor rotates the right bond
        let (_, sr, vtr) = svd(&cur)?;
        let right_weights = sr.to_vec();
        let rot = crate::linalg::dagger(&vtr); // (r_hi, kr)
        let last = strip.last().unwrap();
        let (ll, pl, rl) = last.dim();
        let rotated = last.to_shape((ll * pl, rl)).unwrap().dot(&rot);
        let kr = right_weights.len();
        *strip.last_mut().unwrap() = rotated.to_shape((ll, pl, kr)).unwrap().to_owned();

        Ok(WindowGauge { window, tensors: strip, left_weights, right_weights })
    }
}

impl WindowGauge {
    /// Dense window vector for one boundary-index assignment.
    pub fn boundary_vector(&self, alpha_left: usize, alpha_right: usize) -> CVector {
        let first = &self.tensors[0];
        let (_, p, r) = first.dim();
        let mut cur: CMatrix = first
            .index_axis(Axis(0), alpha_left)
            .to_shape((p, r))
            .unwrap()
            .to_owned();
        for t in &self.tensors[1..] {
            let (lt, pt, rt) = t.dim();
            let rows = cur.nrows();
            let merged = cur.dot(&t.to_shape((lt, pt * rt)).unwrap());
            cur = merged.to_shape((rows * pt, rt)).unwrap().to_owned();
        }
        cur.column(alpha_right).to_owned()
    }

    /// Overlap matrix entries <I_{a'g'} | M | I_{ag}> for a two-site
    /// operator at window offset `pos` (0-based site offset within the
    /// window), computed by transfer contraction without densifying.
    pub fn strip_sandwich(
        &self,
        keep_l: usize,
        keep_r: usize,
        op: Option<(&CMatrix, usize)>,
    ) -> CMatrix {
        let q = keep_l * keep_r;
        let mut out: CMatrix = Array2::zeros((q, q));
        for al in 0..keep_l {
            for bl in 0..keep_l {
                // env[b1, b2] over (bra bond, ket bond)
                let mut env: Option<CMatrix> = None;
                for (site, t) in self.tensors.iter().enumerate() {
                    let (lt, pt, rt) = t.dim();
                    let two_site_here = matches!(op, Some((_, pos)) if pos == site);
                    if two_site_here {
                        // handled jointly with the next site below
                        continue;
                    }
                    let skip_merge = matches!(op, Some((_, pos)) if pos + 1 == site);
                    if skip_merge {
                        // contract sites (pos, pos+1) with the operator
                        let (m, _) = op.unwrap();
                        let prev = &self.tensors[site - 1];
                        let (lp, pp, rp) = prev.dim();
                        let mut next = Array2::<C64>::zeros((rt, rt));
                        // theta[(l, s1, s2, r)] = prev . t
                        let pm = prev.to_shape((lp * pp, rp)).unwrap();
                        let tm = t.to_shape((lt, pt * rt)).unwrap();
                        let theta = pm.dot(&tm); // (lp*pp, pt*rt)
                        let th = theta.to_shape((lp, pp, pt, rt)).unwrap();
                        let e = env.take().unwrap_or_else(|| {
                            let mut e0 = Array2::<C64>::zeros((lp, lp));
                            e0[[bl, al]] = C64::new(1.0, 0.0);
                            e0
                        });
                        for b1 in 0..lp {
                            for b2 in 0..lp {
                                let ev = e[[b1, b2]];
                                if ev == ZERO {
                                    continue;
                                }
                                for s1 in 0..pp {
                                    for s2 in 0..pt {
                                        for t1 in 0..pp {
                                            for t2 in 0..pt {
                                                let c = m[[s1 * pt + s2, t1 * pt + t2]];
                                                if c == ZERO {
                                                    continue;
                                                }
                                                for r1 in 0..rt {
                                                    for r2 in 0..rt {
                                                        next[[r1, r2]] += ev
                                                            * th[[b1, s1, s2, r1]].conj()
                                                            * c
                                                            * th[[b2, t1, t2, r2]];
                                                    }
                                                }
                                            }
                                        }
                                    }
                                }
                            }
                        }
                        env = Some(next);
                        continue;
                    }
                    // plain transfer through this site
                    let e = env.take().unwrap_or_else(|| {
                        let mut e0 = Array2::<C64>::zeros((lt, lt));
                        e0[[bl, al]] = C64::new(1.0, 0.0);
                        e0
                    });
                    let mut next = Array2::<C64>::zeros((rt, rt));
                    for b1 in 0..lt {
                        for b2 in 0..lt {
                            let ev = e[[b1, b2]];
                            if ev == ZERO {
                                continue;
                            }
                            for s1 in 0..pt {
                                for r1 in 0..rt {
                                    for r2 in 0..rt {
                                        next[[r1, r2]] +=
                                            ev * t[[b1, s1, r1]].conj() * t[[b2, s1, r2]];
                                    }
                                }
                            }
                        }
                    }
                    env = Some(next);
                }
                let env = env.unwrap();
                for ar in 0..keep_r {
                    for br in 0..keep_r {
                        out[[bl * keep_r + br, al * keep_r + ar]] = env[[br, ar]];
                    }
                }
            }
        }
        out
    }
}
