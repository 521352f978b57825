//! The four benchmark spin chains, their observables, and dense patch
//! Hamiltonians.
//!
//! Sites are numbered 1..=N as in the experiment descriptions. Every model
//! is strictly nearest-neighbor: single-site field terms are absorbed into
//! the adjacent bond terms, half to each side (full weight at the chain
//! ends). Spin operators are Pauli matrices for the two-level systems and
//! spin-1 matrices for the AKLT chain.

use ndarray::prelude::*;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    self, dagger, embed_window_op, hermiticity_deviation, identity, kron, max_abs, CMatrix, C64,
    ONE, ZERO,
};

/// Guard for dense window representations (vector length).
pub const DENSE_DIM_GUARD: usize = 1 << 20;
/// Guard for materializing dense matrices (dim x dim).
pub const DENSE_MATRIX_GUARD: usize = 1 << 13;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn pauli_x() -> CMatrix {
    array![[ZERO, ONE], [ONE, ZERO]]
}

pub fn pauli_y() -> CMatrix {
    array![[ZERO, C64::new(0.0, -1.0)], [C64::new(0.0, 1.0), ZERO]]
}

pub fn pauli_z() -> CMatrix {
    array![[ONE, ZERO], [ZERO, C64::new(-1.0, 0.0)]]
}

/// Spin-1 operators (Sx, Sy, Sz) in the |m = +1, 0, -1> basis.
pub fn spin1_ops() -> (CMatrix, CMatrix, CMatrix) {
    let s = 1.0 / 2.0_f64.sqrt();
    let sx = array![[ZERO, c(s), ZERO], [c(s), ZERO, c(s)], [ZERO, c(s), ZERO]];
    let sy = array![
        [ZERO, C64::new(0.0, -s), ZERO],
        [C64::new(0.0, s), ZERO, C64::new(0.0, -s)],
        [ZERO, C64::new(0.0, s), ZERO]
    ];
    let sz = Array2::from_diag(&arr1(&[ONE, ZERO, C64::new(-1.0, 0.0)]));
    (sx, sy, sz)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelKind {
    Aklt,
    TransverseIsing,
    TransverseXy,
    RandomFieldXy,
}

impl ModelKind {
    pub fn local_dim(self) -> usize {
        match self {
            ModelKind::Aklt => 3,
            _ => 2,
        }
    }

    pub fn is_frustration_free(self) -> bool {
        matches!(self, ModelKind::Aklt)
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "aklt" | "a" => Ok(ModelKind::Aklt),
            "ising" | "transverse-ising" | "b" => Ok(ModelKind::TransverseIsing),
            "xy" | "transverse-xy" | "c" => Ok(ModelKind::TransverseXy),
            "random-xy" | "random-field-xy" | "d" => Ok(ModelKind::RandomFieldXy),
            other => Err(Error::InvalidParam(format!("unknown model '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ModelParams {
    pub h: f64,
    pub alpha: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self { h: 1.1, alpha: 0.5 }
    }
}

/// An open chain of N spins with one Hermitian term per bond.
#[derive(Debug, Clone)]
pub struct SpinChainModel {
    pub kind: ModelKind,
    pub n: usize,
    pub d: usize,
    pub params: ModelParams,
    pub field_seed: u64,
    /// Per-site transverse fields; for RandomFieldXy these are the h_i
    /// draws, for the uniform models the constant h (AKLT: unused zeros).
    pub fields: Vec<f64>,
    /// terms[i] acts on sites (i+1, i+2), a d^2 x d^2 Hermitian matrix.
    pub terms: Vec<CMatrix>,
}

/// Inclusive 1-indexed site interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub lo: usize,
    pub hi: usize,
}

impl Window {
    pub fn new(lo: usize, hi: usize) -> Self {
        assert!(lo <= hi, "empty window");
        Self { lo, hi }
    }

    pub fn len(&self) -> usize {
        self.hi - self.lo + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, site: usize) -> bool {
        site >= self.lo && site <= self.hi
    }
}

impl SpinChainModel {
    /// Sum of the bond terms with both sites inside `window`, as a dense
    /// Hermitian matrix on the window's full Hilbert space.
    pub fn patch_hamiltonian(&self, window: Window) -> Result<CMatrix> {
        if window.lo < 1 || window.hi > self.n {
            return Err(Error::WindowOutOfRange { lo: window.lo, hi: window.hi, n: self.n });
        }
        let dim = self.d.checked_pow(window.len() as u32).filter(|&x| x <= DENSE_DIM_GUARD);
        let dim = dim.ok_or(Error::DenseGuard { dim: usize::MAX, max: DENSE_DIM_GUARD })?;
        if dim > DENSE_MATRIX_GUARD {
            return Err(Error::DenseGuard { dim, max: DENSE_MATRIX_GUARD });
        }
        let dims = vec![self.d; window.len()];
        let mut h = Array2::<C64>::zeros((dim, dim));
        for i in window.lo..window.hi {
            // bond (i, i+1), both inside
            let term = &self.terms[i - 1];
            h += &embed_window_op(term, &dims, i - window.lo, 2);
        }
        Ok(h)
    }

    /// Dense Hamiltonian of the whole chain (small N only).
    pub fn dense_hamiltonian(&self) -> Result<CMatrix> {
        self.patch_hamiltonian(Window::new(1, self.n))
    }

    pub fn dense_dim(&self) -> Option<usize> {
        self.d.checked_pow(self.n as u32).filter(|&x| x <= DENSE_DIM_GUARD)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "name": format!("{:?}", self.kind),
            "n": self.n,
            "d": self.d,
            "params": { "h": self.params.h, "alpha": self.params.alpha },
            "field_seed": self.field_seed,
            "fields": self.fields,
        })
    }

    /// Deterministic fingerprint of the model used in output provenance.
    pub fn hash_string(&self) -> String {
        format!(
            "{:?}-n{}-h{:.6}-a{:.6}-s{}",
            self.kind, self.n, self.params.h, self.params.alpha, self.field_seed
        )
    }
}

/// Build one of the four benchmark models.
pub fn build_model(kind: ModelKind, n: usize, params: ModelParams, seed: u64) -> Result<SpinChainModel> {
    if n < 4 {
        return Err(Error::InvalidParam(format!("chain length {n} < 4")));
    }
    if !(params.h.is_finite() && params.h > 0.0) {
        return Err(Error::InvalidParam(format!("invalid transverse field h = {}", params.h)));
    }
    if !(params.alpha.is_finite() && params.alpha.abs() <= 1.0) {
        return Err(Error::InvalidParam(format!("invalid anisotropy alpha = {}", params.alpha)));
    }
    let d = kind.local_dim();
    let mut fields = vec![params.h; n];
    if kind == ModelKind::RandomFieldXy {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for f in fields.iter_mut() {
            *f = rng.gen_range(1.05..1.15);
        }
    }
    if kind == ModelKind::Aklt {
        fields = vec![0.0; n];
    }

    let terms = match kind {
        ModelKind::Aklt => {
            let term = aklt_projector();
            vec![term; n - 1]
        }
        _ => {
            let (sx, sy, sz) = (pauli_x(), pauli_y(), pauli_z());
            let id = identity(2);
            let sxsx = kron(&sx, &sx);
            let sysy = kron(&sy, &sy);
            let zl = kron(&sz, &id);
            let zr = kron(&id, &sz);
            // fixed global prefactor; System-D keeps h = params.h here
            // while the per-site fields enter through `fields`
            let pref = -1.0 / (2.0 * (1.0 + params.h * params.h).sqrt());
            let (cx, cy) = match kind {
                ModelKind::TransverseIsing => (1.0, 0.0),
                _ => ((1.0 - params.alpha) / 2.0, (1.0 + params.alpha) / 2.0),
            };
            (1..n)
                .map(|i| {
                    // half of each interior site's field per adjacent bond,
                    // full weight at the two chain ends
                    let wl = if i == 1 { 1.0 } else { 0.5 };
                    let wr = if i + 1 == n { 1.0 } else { 0.5 };
                    let mut t = sxsx.mapv(|z| z * c(cx));
                    if cy != 0.0 {
                        t += &sysy.mapv(|z| z * c(cy));
                    }
                    t += &zl.mapv(|z| z * c(wl * fields[i - 1]));
                    t += &zr.mapv(|z| z * c(wr * fields[i]));
                    t.mapv(|z| z * c(pref))
                })
                .collect()
        }
    };

    Ok(SpinChainModel { kind, n, d, params, field_seed: seed, fields, terms })
}

/// AKLT bond term: the projector onto the total-spin-2 channel,
/// S.S/2 + (S.S)^2/6 + 1/3.
fn aklt_projector() -> CMatrix {
    let (sx, sy, sz) = spin1_ops();
    let mut ss = kron(&sx, &sx);
    ss += &kron(&sy, &sy);
    ss += &kron(&sz, &sz);
    let ss2 = ss.dot(&ss);
    let mut t = ss.mapv(|z| z * c(0.5));
    t += &ss2.mapv(|z| z * c(1.0 / 6.0));
    t += &identity(9).mapv(|z| z * c(1.0 / 3.0));
    t
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ObservableKind {
    PxPx,
    PzPz,
    RandomProjector,
}

impl std::str::FromStr for ObservableKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pxpx" => Ok(ObservableKind::PxPx),
            "pzpz" => Ok(ObservableKind::PzPz),
            "random" | "random-projector" => Ok(ObservableKind::RandomProjector),
            other => Err(Error::InvalidParam(format!("unknown observable '{other}'"))),
        }
    }
}

/// A normalized two-site projector observable.
#[derive(Debug, Clone)]
pub struct ObservableSpec {
    pub kind: ObservableKind,
    /// Adjacent 1-indexed sites (i, i+1) the observable acts on.
    pub sites: (usize, usize),
    pub rank: usize,
    pub seed: u64,
    /// d^2 x d^2 Hermitian projector.
    pub matrix: CMatrix,
}

pub fn build_observable(
    kind: ObservableKind,
    sites: (usize, usize),
    d: usize,
    rank: usize,
    seed: u64,
) -> Result<ObservableSpec> {
    if sites.1 != sites.0 + 1 || sites.0 < 1 {
        return Err(Error::InvalidParam(format!("observable sites {sites:?} not adjacent")));
    }
    let dim = d * d;
    let matrix = match kind {
        ObservableKind::PxPx => {
            if d != 2 {
                return Err(Error::InvalidParam("PxPx requires d = 2".into()));
            }
            // |+><+| x |+><+| has every entry 1/4
            Array2::from_elem((4, 4), c(0.25))
        }
        ObservableKind::PzPz => {
            if d != 2 {
                return Err(Error::InvalidParam("PzPz requires d = 2".into()));
            }
            let mut m = Array2::<C64>::zeros((4, 4));
            m[[0, 0]] = ONE;
            m
        }
        ObservableKind::RandomProjector => {
            if rank < 1 || rank > dim {
                return Err(Error::InvalidParam(format!("projector rank {rank} outside [1, {dim}]")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            random_projector(dim, rank, &mut rng)
        }
    };
    let rank = match kind {
        ObservableKind::RandomProjector => rank,
        _ => 1,
    };
    Ok(ObservableSpec { kind, sites, rank, seed, matrix })
}

/// Projector onto the span of `rank` random complex Gaussian vectors.
pub fn random_projector<R: Rng>(dim: usize, rank: usize, rng: &mut R) -> CMatrix {
    let g = linalg::random_gaussian_matrix(dim, rank, rng);
    // orthonormalize the columns
    let (u, _, _) = linalg::svd(&g).expect("svd of random matrix");
    let q = u.slice(s![.., ..rank]).to_owned();
    q.dot(&dagger(&q))
}

impl ObservableSpec {
    pub fn to_json(&self) -> serde_json::Value {
        let re: Vec<f64> = self.matrix.iter().map(|z| z.re).collect();
        let im: Vec<f64> = self.matrix.iter().map(|z| z.im).collect();
        serde_json::json!({
            "kind": format!("{:?}", self.kind),
            "sites": [self.sites.0, self.sites.1],
            "rank": self.rank,
            "seed": self.seed,
            "matrix": { "rows": self.matrix.nrows(), "cols": self.matrix.ncols(), "re": re, "im": im },
        })
    }

    pub fn projector_deviation(&self) -> f64 {
        let m2 = self.matrix.dot(&self.matrix);
        max_abs(&(&m2 - &self.matrix))
    }
}

/// Model-appropriate single-site operator for correlation probes:
/// sigma^x for the two-level chains, spin-1 S^z for AKLT.
pub fn probe_operator(kind: ModelKind) -> CMatrix {
    match kind {
        ModelKind::Aklt => spin1_ops().2,
        _ => pauli_x(),
    }
}

/// Fallback probe when the primary correlator is below the noise floor.
pub fn fallback_probe_operator(kind: ModelKind) -> CMatrix {
    match kind {
        ModelKind::Aklt => spin1_ops().2,
        _ => pauli_z(),
    }
}

pub fn hermitian_term_check(model: &SpinChainModel) -> f64 {
    model.terms.iter().map(hermiticity_deviation).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frobenius_norm, spectral_norm};

    #[test]
    fn aklt_term_is_projector() {
        let m = build_model(ModelKind::Aklt, 6, ModelParams::default(), 0).unwrap();
        for t in &m.terms {
            let t2 = t.dot(t);
            assert!(max_abs(&(&t2 - t)) < 1e-12, "AKLT term not idempotent");
        }
        assert!(hermitian_term_check(&m) < 1e-14);
    }

    #[test]
    fn terms_are_hermitian_and_bounded() {
        for kind in [
            ModelKind::Aklt,
            ModelKind::TransverseIsing,
            ModelKind::TransverseXy,
            ModelKind::RandomFieldXy,
        ] {
            let m = build_model(kind, 8, ModelParams::default(), 11).unwrap();
            assert!(hermitian_term_check(&m) < 1e-13);
            for t in &m.terms {
                let norm = spectral_norm(t);
                assert!(norm < 3.0, "{kind:?} term norm {norm}");
            }
        }
    }

    #[test]
    fn random_fields_in_range() {
        let m = build_model(ModelKind::RandomFieldXy, 40, ModelParams::default(), 42).unwrap();
        for &f in &m.fields {
            assert!((1.05..1.15).contains(&f), "field {f} outside [1.05, 1.15)");
        }
        // deterministic given the seed
        let m2 = build_model(ModelKind::RandomFieldXy, 40, ModelParams::default(), 42).unwrap();
        assert_eq!(m.fields, m2.fields);
        let m3 = build_model(ModelKind::RandomFieldXy, 40, ModelParams::default(), 43).unwrap();
        assert_ne!(m.fields, m3.fields);
    }

    #[test]
    fn field_split_reassembles() {
        // sum of bond terms equals sxsx couplings plus full per-site fields
        let m = build_model(ModelKind::TransverseIsing, 6, ModelParams::default(), 0).unwrap();
        let h = m.dense_hamiltonian().unwrap();
        // direct construction without splitting
        let dims = vec![2usize; 6];
        let pref = -1.0 / (2.0 * (1.0 + 1.1f64 * 1.1).sqrt());
        let mut direct = Array2::<C64>::zeros(h.raw_dim());
        for i in 0..5 {
            let xx = kron(&pauli_x(), &pauli_x());
            direct += &embed_window_op(&xx, &dims, i, 2).mapv(|z| z * c(pref));
        }
        for i in 0..6 {
            direct += &embed_window_op(&pauli_z(), &dims, i, 1).mapv(|z| z * c(pref * 1.1));
        }
        assert!(max_abs(&(&h - &direct)) < 1e-13);
    }

    #[test]
    fn patch_hamiltonian_window_of_two() {
        let m = build_model(ModelKind::TransverseXy, 8, ModelParams::default(), 0).unwrap();
        let h = m.patch_hamiltonian(Window::new(3, 4)).unwrap();
        assert!(max_abs(&(&h - &m.terms[2])) < 1e-15);
        assert!(hermiticity_deviation(&h) < 1e-13);
    }

    #[test]
    fn patch_hamiltonian_rejects_bad_window() {
        let m = build_model(ModelKind::TransverseIsing, 8, ModelParams::default(), 0).unwrap();
        assert!(m.patch_hamiltonian(Window::new(5, 9)).is_err());
    }

    #[test]
    fn pzpz_and_pxpx_matrices() {
        let pz = build_observable(ObservableKind::PzPz, (3, 4), 2, 1, 0).unwrap();
        let mut expect = Array2::<C64>::zeros((4, 4));
        expect[[0, 0]] = ONE;
        assert!(max_abs(&(&pz.matrix - &expect)) < 1e-15);

        let px = build_observable(ObservableKind::PxPx, (3, 4), 2, 1, 0).unwrap();
        for v in px.matrix.iter() {
            assert!((v.re - 0.25).abs() < 1e-15 && v.im.abs() < 1e-15);
        }
        assert!(px.projector_deviation() < 1e-14);
    }

    #[test]
    fn random_projector_properties() {
        let obs = build_observable(ObservableKind::RandomProjector, (2, 3), 3, 2, 99).unwrap();
        assert!(obs.projector_deviation() < 1e-12);
        let tr = linalg::trace(&obs.matrix);
        assert!((tr.re - 2.0).abs() < 1e-12 && tr.im.abs() < 1e-13);
        assert!((spectral_norm(&obs.matrix) - 1.0).abs() < 1e-12);
        // deterministic
        let obs2 = build_observable(ObservableKind::RandomProjector, (2, 3), 3, 2, 99).unwrap();
        assert!(max_abs(&(&obs.matrix - &obs2.matrix)) < 1e-15);
    }

    #[test]
    fn rank_guard() {
        assert!(build_observable(ObservableKind::RandomProjector, (2, 3), 2, 5, 0).is_err());
        assert!(build_observable(ObservableKind::RandomProjector, (2, 3), 2, 0, 0).is_err());
    }

    #[test]
    fn json_round_trips_fields() {
        let m = build_model(ModelKind::RandomFieldXy, 10, ModelParams::default(), 5).unwrap();
        let v = m.to_json();
        assert_eq!(v["n"], 10);
        let fields: Vec<f64> = serde_json::from_value(v["fields"].clone()).unwrap();
        assert_eq!(fields, m.fields);
    }

    #[test]
    fn spin1_commutators() {
        let (sx, sy, sz) = spin1_ops();
        let comm = sx.dot(&sy) - sy.dot(&sx);
        let expect = sz.mapv(|z| z * Complex64::new(0.0, 1.0));
        assert!(max_abs(&(&comm - &expect)) < 1e-14);
        assert!((frobenius_norm(&sz) - 2.0_f64.sqrt()).abs() < 1e-14);
    }
}
