use ndarray::prelude::*;
use num_complex::Complex64 as C64;
use patchbound::{hermitian_eigen, svd};
use std::time::Instant;

#[test]
fn blas_lapack_smoke() {
    let n = 400;
    let a: Array2<C64> = Array2::from_shape_fn((n, n), |(i, j)| {
        C64::new((i * 7 + j * 3) as f64 % 13.0, (i + 2 * j) as f64 % 5.0)
    });
    let t = Instant::now();
    let mut c = a.dot(&a);
    for _ in 0..9 {
        c = a.dot(&a);
    }
    let dt = t.elapsed().as_secs_f64();
    let gflops = 10.0 * 8.0 * (n as f64).powi(3) / dt / 1e9;
    println!("zgemm {n}x{n}: {:.3}s for 10 reps -> {gflops:.1} GFLOP/s", dt);
    assert!(c[[0, 0]].norm() > 0.0);
    assert!(gflops > 3.0, "complex gemm too slow: {gflops} GFLOP/s");

    let h = {
        let m: Array2<C64> =
            Array2::from_shape_fn((64, 64), |(i, j)| C64::new((i + j) as f64, i as f64 - j as f64));
        &m + &m.t().mapv(|z| z.conj())
    };
    let t = Instant::now();
    let (vals, vecs) = hermitian_eigen(&h);
    println!("eigh 64: {:?}", t.elapsed());
    let recon = vecs
        .dot(&Array2::from_diag(&vals.mapv(|v| C64::new(v, 0.0))))
        .dot(&vecs.t().mapv(|z| z.conj()));
    let err = (&recon - &h).iter().map(|z| z.norm()).fold(0.0, f64::max);
    println!("eigh reconstruction err: {err:.2e}");
    assert!(err < 1e-9);

    let m: Array2<C64> = Array2::from_shape_fn((30, 12), |(i, j)| {
        C64::new((3 * i + j) as f64 % 7.0, (i * j) as f64 % 3.0)
    });
    let (u, s, vt) = svd(&m);
    let recon = u
        .dot(&Array2::from_shape_fn((12, 12), |(i, j)| {
            if i == j {
                C64::new(s[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        }))
        .dot(&vt);
    let err = (&recon - &m).iter().map(|z| z.norm()).fold(0.0, f64::max);
    println!("svd reconstruction err: {err:.2e}");
    assert!(err < 1e-9);
}
