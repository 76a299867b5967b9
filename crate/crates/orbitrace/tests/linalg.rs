//! Dense complex linear algebra: QR eigenvalues, LU solves, polynomial
//! roots, and the scaled-squaring exponential.

use num_complex::Complex64;
use orbitrace::linalg::{self, CMatrix};
use orbitrace::{c64, C64};

fn assert_close(a: C64, b: C64, tol: f64) {
    assert!(
        (a - b).norm() < tol,
        "expected {b}, got {a} (|diff| = {:.3e}, tol {tol:.1e})",
        (a - b).norm()
    );
}

/// Deterministic congruential stream, good enough for test matrices.
fn rng_stream(seed: u64) -> impl FnMut() -> f64 {
    let mut state = seed;
    move || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    }
}

fn random_matrix(n: usize, seed: u64) -> CMatrix {
    let mut next = rng_stream(seed);
    let mut a = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = c64(next(), next());
        }
    }
    a
}

#[test]
fn eigenvalues_of_diagonal_matrix() {
    let d = [c64(1.0, 0.0), c64(-2.5, 0.3), c64(0.0, 4.0), c64(7.0, -1.0)];
    let mut a = CMatrix::zeros(4, 4);
    for (i, &v) in d.iter().enumerate() {
        a[(i, i)] = v;
    }
    let mut expected = d.to_vec();
    expected.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    let eigs = linalg::eigenvalues(&a).unwrap();
    for (got, want) in eigs.iter().zip(&expected) {
        assert_close(*got, *want, 1e-13);
    }
}

#[test]
fn eigenvalues_of_two_by_two_closed_form() {
    // [[1, 2], [3, 4]]: lambda = (5 +- sqrt(33)) / 2.
    let a = CMatrix::from_rows(&[
        vec![c64(1.0, 0.0), c64(2.0, 0.0)],
        vec![c64(3.0, 0.0), c64(4.0, 0.0)],
    ]);
    let eigs = linalg::eigenvalues(&a).unwrap();
    let s = 33f64.sqrt();
    assert_close(eigs[0], c64((5.0 - s) / 2.0, 0.0), 1e-13);
    assert_close(eigs[1], c64((5.0 + s) / 2.0, 0.0), 1e-13);
}

#[test]
fn eigenvalues_similarity_invariance() {
    // Eigenvalues of P A P^{-1} equal those of A. P is a random matrix
    // solved through its LU factorization.
    let n = 12;
    let a = random_matrix(n, 11);
    let p = random_matrix(n, 22);
    // B = P A P^{-1} satisfies B P = P A; solve P^T B^T = (P A)^T by columns.
    let pat = p.matmul(&a).transpose();
    let lut = linalg::lu_factor(&p.transpose()).unwrap();
    let mut b = CMatrix::zeros(n, n);
    for j in 0..n {
        let col: Vec<C64> = (0..n).map(|i| pat[(i, j)]).collect();
        let x = lut.solve(&col);
        for i in 0..n {
            b[(j, i)] = x[i];
        }
    }
    let ea = linalg::eigenvalues(&a).unwrap();
    let eb = linalg::eigenvalues(&b).unwrap();
    for (x, y) in ea.iter().zip(&eb) {
        assert_close(*x, *y, 1e-9);
    }
}

#[test]
fn eigenvalue_sum_matches_trace() {
    let n = 30;
    let a = random_matrix(n, 77);
    let eigs = linalg::eigenvalues(&a).unwrap();
    let sum: C64 = eigs.iter().sum();
    let trace: C64 = (0..n).map(|i| a[(i, i)]).sum();
    assert_close(sum, trace, 1e-10 * n as f64);
}

#[test]
fn hermitian_matrix_has_real_eigenvalues() {
    let n = 20;
    let b = random_matrix(n, 5);
    let a = b.add(&b.adjoint()).scale(c64(0.5, 0.0));
    let eigs = linalg::eigenvalues(&a).unwrap();
    for e in eigs {
        assert!(e.im.abs() < 1e-11, "Hermitian eigenvalue with Im = {:.3e}", e.im);
    }
}

#[test]
fn lu_solve_roundtrip() {
    let n = 25;
    let a = random_matrix(n, 3);
    let mut next = rng_stream(99);
    let x_true: Vec<C64> = (0..n).map(|_| c64(next(), next())).collect();
    let b = a.matvec(&x_true);
    let lu = linalg::lu_factor(&a).unwrap();
    let x = lu.solve(&b);
    for (got, want) in x.iter().zip(&x_true) {
        assert_close(*got, *want, 1e-10);
    }
}

#[test]
fn lu_adjoint_solve_roundtrip() {
    let n = 15;
    let a = random_matrix(n, 4);
    let mut next = rng_stream(100);
    let x_true: Vec<C64> = (0..n).map(|_| c64(next(), next())).collect();
    let b = a.adjoint().matvec(&x_true);
    let lu = linalg::lu_factor(&a).unwrap();
    let x = lu.solve_adjoint(&b);
    for (got, want) in x.iter().zip(&x_true) {
        assert_close(*got, *want, 1e-10);
    }
}

#[test]
fn lu_rejects_singular_matrix() {
    let a = CMatrix::from_rows(&[
        vec![c64(1.0, 0.0), c64(2.0, 0.0)],
        vec![c64(2.0, 0.0), c64(4.0, 0.0)],
    ]);
    assert!(linalg::lu_factor(&a).is_err());
}

#[test]
fn poly_roots_cubic() {
    // (z - 1)(z - 2i)(z + 3) = z^3 + (2 - 2i) z^2 + (-3 - 4i) z + 6i
    let coeffs = [
        c64(0.0, 6.0),
        c64(-3.0, -4.0),
        c64(2.0, -2.0),
        c64(1.0, 0.0),
    ];
    let mut roots = linalg::poly_roots(&coeffs).unwrap();
    roots.sort_by(|a, b| a.re.total_cmp(&b.re));
    assert_close(roots[0], c64(-3.0, 0.0), 1e-10);
    assert_close(roots[1], c64(0.0, 2.0), 1e-10);
    assert_close(roots[2], c64(1.0, 0.0), 1e-10);
}

#[test]
fn poly_roots_reconstruct_polynomial() {
    let coeffs: Vec<C64> = vec![
        c64(1.2, -0.7),
        c64(-0.3, 0.4),
        c64(2.0, 1.0),
        c64(0.5, 0.0),
        c64(1.0, -2.0),
    ];
    let roots = linalg::poly_roots(&coeffs).unwrap();
    assert_eq!(roots.len(), 4);
    for r in roots {
        let mut v = Complex64::new(0.0, 0.0);
        for c in coeffs.iter().rev() {
            v = v * r + c;
        }
        assert!(v.norm() < 1e-9, "residual {:.3e} at root {r}", v.norm());
    }
}

#[test]
fn expm_matches_scalar_exponential_on_diagonal() {
    let d = [c64(0.3, 1.7), c64(-1.0, 0.0), c64(0.0, -2.5)];
    let mut a = CMatrix::zeros(3, 3);
    for (i, &v) in d.iter().enumerate() {
        a[(i, i)] = v;
    }
    let e = linalg::expm(&a).unwrap();
    for (i, &v) in d.iter().enumerate() {
        assert_close(e[(i, i)], v.exp(), 1e-13);
    }
}

#[test]
fn expm_group_property() {
    // e^A e^{-A} = 1 for a random A.
    let a = random_matrix(10, 42);
    let ea = linalg::expm(&a).unwrap();
    let eminus = linalg::expm(&a.scale(c64(-1.0, 0.0))).unwrap();
    let prod = ea.matmul(&eminus);
    let id = CMatrix::identity(10);
    assert!(prod.sub(&id).frobenius() < 1e-10);
}

#[test]
fn expm_rotation_generator() {
    // exp(t J) with J = [[0, -1], [1, 0]] is the rotation by t.
    let j = CMatrix::from_rows(&[
        vec![c64(0.0, 0.0), c64(-1.0, 0.0)],
        vec![c64(1.0, 0.0), c64(0.0, 0.0)],
    ]);
    let t = 0.7;
    let e = linalg::expm(&j.scale(c64(t, 0.0))).unwrap();
    assert_close(e[(0, 0)], c64(t.cos(), 0.0), 1e-13);
    assert_close(e[(0, 1)], c64(-t.sin(), 0.0), 1e-13);
    assert_close(e[(1, 0)], c64(t.sin(), 0.0), 1e-13);
    assert_close(e[(1, 1)], c64(t.cos(), 0.0), 1e-13);
}

#[test]
fn smallest_singular_value_of_scaled_identity() {
    let a = CMatrix::identity(6).scale(c64(0.0, 0.25));
    let s = linalg::smallest_singular(&a).unwrap();
    assert!((s - 0.25).abs() < 1e-10, "sigma_min = {s}");
}
