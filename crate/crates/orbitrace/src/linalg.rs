//! Dense complex linear algebra: balancing, Householder Hessenberg
//! reduction, implicitly shifted QR eigenvalue iteration, LU with partial
//! pivoting, a smallest-singular-value witness via inverse iteration, and
//! a scaling-and-squaring Pade matrix exponential.
//!
//! Everything is written for the non-Hermitian operators this crate
//! diagonalizes (dims up to ~1024); no attempt at blocking or SIMD.

use crate::error::{Error, Result};
use crate::{c64, C64};

/// Dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    pub n: usize,
    pub m: usize,
    pub data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(n: usize, m: usize) -> Self {
        CMatrix { n, m, data: vec![C64::new(0.0, 0.0); n * m] }
    }

    pub fn identity(n: usize) -> Self {
        let mut a = Self::zeros(n, n);
        for i in 0..n {
            a[(i, i)] = c64(1.0, 0.0);
        }
        a
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let n = rows.len();
        let m = if n > 0 { rows[0].len() } else { 0 };
        let mut data = Vec::with_capacity(n * m);
        for r in rows {
            assert_eq!(r.len(), m, "ragged rows");
            data.extend_from_slice(r);
        }
        CMatrix { n, m, data }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.m + j]
    }

    pub fn matmul(&self, b: &CMatrix) -> CMatrix {
        assert_eq!(self.m, b.n);
        let mut out = CMatrix::zeros(self.n, b.m);
        for i in 0..self.n {
            for k in 0..self.m {
                let aik = self.get(i, k);
                if aik.norm_sqr() == 0.0 {
                    continue;
                }
                let row_b = &b.data[k * b.m..(k + 1) * b.m];
                let row_o = &mut out.data[i * b.m..(i + 1) * b.m];
                for j in 0..b.m {
                    row_o[j] += aik * row_b[j];
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(self.m, x.len());
        (0..self.n)
            .map(|i| {
                let row = &self.data[i * self.m..(i + 1) * self.m];
                row.iter().zip(x).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    pub fn adjoint(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.m, self.n);
        for i in 0..self.n {
            for j in 0..self.m {
                out[(j, i)] = self.get(i, j).conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.m, self.n);
        for i in 0..self.n {
            for j in 0..self.m {
                out[(j, i)] = self.get(i, j);
            }
        }
        out
    }

    pub fn conj(&self) -> CMatrix {
        CMatrix { n: self.n, m: self.m, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn scale(&self, a: C64) -> CMatrix {
        CMatrix { n: self.n, m: self.m, data: self.data.iter().map(|z| z * a).collect() }
    }

    pub fn add(&self, b: &CMatrix) -> CMatrix {
        assert_eq!((self.n, self.m), (b.n, b.m));
        CMatrix {
            n: self.n,
            m: self.m,
            data: self.data.iter().zip(&b.data).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn sub(&self, b: &CMatrix) -> CMatrix {
        assert_eq!((self.n, self.m), (b.n, b.m));
        CMatrix {
            n: self.n,
            m: self.m,
            data: self.data.iter().zip(&b.data).map(|(x, y)| x - y).collect(),
        }
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Max absolute row sum (operator infinity norm), used by expm scaling.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.data[i * self.m..(i + 1) * self.m].iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.m + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.m + j]
    }
}

// ---------------------------------------------------------------------------
// Eigenvalues: balance -> Hessenberg -> implicitly shifted QR
// ---------------------------------------------------------------------------

/// Parlett-Reinsch balancing by diagonal similarity with radix-2 powers.
/// Eigenvalues are unchanged; row/column norms are equilibrated.
fn balance(a: &mut CMatrix) {
    let n = a.n;
    let radix: f64 = 2.0;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].norm();
                    r += a[(i, j)].norm();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let mut f = 1.0;
            let mut cc = c;
            let s = c + r;
            while cc < r / radix {
                f *= radix;
                cc *= radix * radix;
            }
            while cc > r * radix {
                f /= radix;
                cc /= radix * radix;
            }
            if (c * f + r / f) < 0.95 * s && f != 1.0 {
                done = false;
                for j in 0..n {
                    let v = a[(i, j)] / f;
                    a[(i, j)] = v;
                }
                for j in 0..n {
                    let v = a[(j, i)] * f;
                    a[(j, i)] = v;
                }
            }
        }
    }
}

/// Householder reduction to upper Hessenberg form (in place).
fn hessenberg(a: &mut CMatrix) {
    let n = a.n;
    for k in 0..n.saturating_sub(2) {
        // Reflector annihilating column k below the subdiagonal.
        let mut norm2 = 0.0;
        for i in k + 1..n {
            norm2 += a[(i, k)].norm_sqr();
        }
        if norm2 == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let norm = norm2.sqrt();
        let phase = if x0.norm() == 0.0 { c64(1.0, 0.0) } else { x0 / x0.norm() };
        let alpha = -phase * norm;
        // v = x - alpha e1, stored in a scratch vector over rows k+1..n
        let mut v = vec![C64::new(0.0, 0.0); n - (k + 1)];
        for i in k + 1..n {
            v[i - (k + 1)] = a[(i, k)];
        }
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let tau = 2.0 / vnorm2;
        // A <- (I - tau v v^H) A : rows k+1..n, all columns
        for j in 0..n {
            let mut s = C64::new(0.0, 0.0);
            for i in k + 1..n {
                s += v[i - (k + 1)].conj() * a[(i, j)];
            }
            s *= tau;
            for i in k + 1..n {
                let d = v[i - (k + 1)] * s;
                a[(i, j)] -= d;
            }
        }
        // A <- A (I - tau v v^H) : all rows, columns k+1..n
        for i in 0..n {
            let mut s = C64::new(0.0, 0.0);
            for j in k + 1..n {
                s += a[(i, j)] * v[j - (k + 1)];
            }
            s *= tau;
            for j in k + 1..n {
                let d = s * v[j - (k + 1)].conj();
                a[(i, j)] -= d;
            }
        }
        a[(k + 1, k)] = alpha;
        for i in k + 2..n {
            a[(i, k)] = C64::new(0.0, 0.0);
        }
    }
}

/// Complex Givens rotation G = [[c, s], [-conj(s), c]] with real c >= 0
/// such that G (a, b)^T = (r, 0)^T.
#[inline]
fn givens(a: C64, b: C64) -> (f64, C64) {
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, C64::new(0.0, 0.0));
    }
    let an = a.norm();
    let h = (an * an + bn * bn).sqrt();
    if an == 0.0 {
        return (0.0, b.conj() / bn);
    }
    let c = an / h;
    let s = a * b.conj() / (h * an);
    (c, s)
}

/// Eigenvalue of the trailing 2x2 of the active block closest to the corner
/// entry (Wilkinson shift).
fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let tr2 = (a + d) * 0.5;
    let det = a * d - b * c;
    let disc = (tr2 * tr2 - det).sqrt();
    let l1 = tr2 + disc;
    let l2 = tr2 - disc;
    if (l1 - d).norm() < (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// All eigenvalues of a general complex matrix, sorted by (Re, Im).
///
/// Pipeline: balancing, Householder Hessenberg reduction, implicit
/// single-shift QR with Wilkinson shifts and deflation threshold
/// 1e-14 (|h_ii| + |h_i+1,i+1|).
pub fn eigenvalues(a: &CMatrix) -> Result<Vec<C64>> {
    assert_eq!(a.n, a.m, "eigenvalues of a square matrix");
    let n = a.n;
    if n == 0 {
        return Ok(vec![]);
    }
    let mut h = a.clone();
    balance(&mut h);
    hessenberg(&mut h);

    let mut eigs = Vec::with_capacity(n);
    let mut hi = n - 1; // active block is rows/cols lo..=hi
    let max_sweeps = 40 * n;
    let mut sweeps = 0usize;
    let mut stalls = 0usize;

    loop {
        // Deflate converged subdiagonals from the bottom.
        loop {
            if hi == 0 {
                eigs.push(h[(0, 0)]);
                break;
            }
            let sub = h[(hi, hi - 1)].norm();
            let tol = 1e-14 * (h[(hi - 1, hi - 1)].norm() + h[(hi, hi)].norm());
            if sub <= tol.max(f64::MIN_POSITIVE) {
                eigs.push(h[(hi, hi)]);
                h[(hi, hi - 1)] = C64::new(0.0, 0.0);
                hi -= 1;
                stalls = 0;
                continue;
            }
            break;
        }
        if eigs.len() == n {
            break;
        }
        // Find the top of the active block.
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let tol = 1e-14 * (h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm());
            if sub <= tol.max(f64::MIN_POSITIVE) {
                h[(lo, lo - 1)] = C64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            // 1x1 block isolated by an interior deflation.
            eigs.push(h[(hi, hi)]);
            hi = hi.saturating_sub(1);
            continue;
        }

        sweeps += 1;
        if sweeps > max_sweeps {
            return Err(Error::NoConvergenceQR { cap: max_sweeps, block: hi - lo + 1 });
        }
        stalls += 1;
        let sigma = if stalls % 12 == 0 {
            // Exceptional shift to break symmetry-induced stalling.
            h[(hi, hi)] + h[(hi, hi - 1)].norm() * c64(1.5, 0.5)
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };

        // Implicit single-shift sweep over the active block.
        let mut x = h[(lo, lo)] - sigma;
        let mut y = h[(lo + 1, lo)];
        for k in lo..hi {
            let (c, s) = givens(x, y);
            let sc = s.conj();
            // Apply G to rows k, k+1 (columns k-ish..hi).
            let jstart = if k > lo { k - 1 } else { lo };
            for j in jstart..=hi {
                let t1 = h[(k, j)];
                let t2 = h[(k + 1, j)];
                h[(k, j)] = c * t1 + s * t2;
                h[(k + 1, j)] = -sc * t1 + c * t2;
            }
            // Apply G^H to columns k, k+1 (rows lo..min(k+2, hi)).
            let iend = hi.min(k + 2);
            for i in lo..=iend {
                let t1 = h[(i, k)];
                let t2 = h[(i, k + 1)];
                h[(i, k)] = c * t1 + t2 * sc;
                h[(i, k + 1)] = -(t1 * s) + c * t2;
            }
            if k + 1 < hi {
                x = h[(k + 1, k)];
                y = h[(k + 2, k)];
            }
        }
    }

    eigs.sort_by(|a, b| {
        a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap())
    });
    Ok(eigs)
}

/// Roots of a polynomial c[0] + c[1] x + ... + c[d] x^d via the companion
/// matrix, polished by one or two Newton steps on the polynomial.
pub fn poly_roots(coeffs: &[C64]) -> Result<Vec<C64>> {
    let mut c = coeffs.to_vec();
    while let Some(last) = c.last() {
        if last.norm() == 0.0 && c.len() > 1 {
            c.pop();
        } else {
            break;
        }
    }
    let d = c.len() - 1;
    if d == 0 {
        return Ok(vec![]);
    }
    let lead = c[d];
    let mut comp = CMatrix::zeros(d, d);
    for i in 1..d {
        comp[(i, i - 1)] = c64(1.0, 0.0);
    }
    for i in 0..d {
        comp[(i, d - 1)] = -c[i] / lead;
    }
    let mut roots = eigenvalues(&comp)?;
    let eval = |z: C64| -> (C64, C64) {
        let mut p = C64::new(0.0, 0.0);
        let mut dp = C64::new(0.0, 0.0);
        for k in (0..=d).rev() {
            dp = dp * z + p;
            p = p * z + c[k];
        }
        (p, dp)
    };
    for r in roots.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = eval(*r);
            if dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            *r -= step;
            if step.norm() < 1e-15 * (1.0 + r.norm()) {
                break;
            }
        }
    }
    roots.sort_by(|a, b| {
        a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap())
    });
    Ok(roots)
}

// ---------------------------------------------------------------------------
// LU factorization, solves, smallest-singular-value witness
// ---------------------------------------------------------------------------

/// LU factorization with partial pivoting: P A = L U.
pub struct Lu {
    lu: CMatrix,
    piv: Vec<usize>,
}

pub fn lu_factor(a: &CMatrix) -> Result<Lu> {
    assert_eq!(a.n, a.m);
    let n = a.n;
    let mut lu = a.clone();
    let mut piv: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let (mut imax, mut vmax) = (k, lu[(k, k)].norm());
        for i in k + 1..n {
            let v = lu[(i, k)].norm();
            if v > vmax {
                imax = i;
                vmax = v;
            }
        }
        if vmax == 0.0 {
            return Err(Error::SingularMatrix { pivot: k });
        }
        if imax != k {
            for j in 0..n {
                let t = lu[(k, j)];
                lu[(k, j)] = lu[(imax, j)];
                lu[(imax, j)] = t;
            }
            piv.swap(k, imax);
        }
        let pivot = lu[(k, k)];
        for i in k + 1..n {
            let f = lu[(i, k)] / pivot;
            lu[(i, k)] = f;
            for j in k + 1..n {
                let d = f * lu[(k, j)];
                lu[(i, j)] -= d;
            }
        }
    }
    Ok(Lu { lu, piv })
}

impl Lu {
    pub fn n(&self) -> usize {
        self.lu.n
    }

    /// Solve A x = b.
    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.n();
        let mut x: Vec<C64> = self.piv.iter().map(|&p| b[p]).collect();
        // L y = P b (unit lower triangular).
        for i in 1..n {
            for j in 0..i {
                let d = self.lu.get(i, j) * x[j];
                x[i] -= d;
            }
        }
        // U x = y.
        for i in (0..n).rev() {
            for j in i + 1..n {
                let d = self.lu.get(i, j) * x[j];
                x[i] -= d;
            }
            x[i] /= self.lu.get(i, i);
        }
        x
    }

    /// Solve A^H x = b using the factorization of A: A^H = U^H L^H P.
    pub fn solve_adjoint(&self, b: &[C64]) -> Vec<C64> {
        let n = self.n();
        let mut y = b.to_vec();
        // U^H is lower triangular: forward substitution with conj transposes.
        for i in 0..n {
            for j in 0..i {
                let d = self.lu.get(j, i).conj() * y[j];
                y[i] -= d;
            }
            y[i] /= self.lu.get(i, i).conj();
        }
        // L^H is unit upper triangular: back substitution.
        for i in (0..n).rev() {
            for j in i + 1..n {
                let d = self.lu.get(j, i).conj() * y[j];
                y[i] -= d;
            }
        }
        // Undo the row permutation: x = P^T y.
        let mut x = vec![C64::new(0.0, 0.0); n];
        for (i, &p) in self.piv.iter().enumerate() {
            x[p] = y[i];
        }
        x
    }
}

/// Estimate of the smallest singular value of A via inverse power iteration
/// on (A^H A)^{-1}. Deterministic start vector.
pub fn smallest_singular(a: &CMatrix) -> Result<f64> {
    let n = a.n;
    let lu = lu_factor(a)?;
    let mut x: Vec<C64> = (0..n)
        .map(|i| c64(1.0 + (i as f64 * 0.7391).sin(), (i as f64 * 1.1731).cos()))
        .collect();
    let norm = |v: &[C64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let nx = norm(&x);
    for z in x.iter_mut() {
        *z /= nx;
    }
    let mut sigma = f64::INFINITY;
    for _ in 0..5 {
        let v = lu.solve(&x); // v = A^{-1} x
        let w = lu.solve_adjoint(&v); // w = A^{-H} A^{-1} x = (A^H A)^{-1} x
        let nw = norm(&w);
        if !nw.is_finite() || nw == 0.0 {
            break;
        }
        // Rayleigh quotient for (A^H A)^{-1} eigenvalue 1/sigma_min^2.
        let rayleigh: C64 = w.iter().zip(&x).map(|(wi, xi)| wi * xi.conj()).sum();
        sigma = 1.0 / rayleigh.norm().sqrt();
        for (xi, wi) in x.iter_mut().zip(&w) {
            *xi = wi / nw;
        }
    }
    Ok(sigma)
}

// ---------------------------------------------------------------------------
// Matrix exponential
// ---------------------------------------------------------------------------

/// Matrix exponential by scaling-and-squaring with the (13, 13) Pade
/// approximant (Higham's constants).
pub fn expm(a: &CMatrix) -> Result<CMatrix> {
    assert_eq!(a.n, a.m);
    let n = a.n;
    let theta13 = 5.371920351148152;
    let nrm = a.norm_inf();
    let s = if nrm > theta13 { (nrm / theta13).log2().ceil() as i32 } else { 0 };
    let a1 = a.scale(c64(0.5_f64.powi(s), 0.0));

    const B: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];

    let a2 = a1.matmul(&a1);
    let a4 = a2.matmul(&a2);
    let a6 = a4.matmul(&a2);
    let id = CMatrix::identity(n);

    // U = A (A6 (b13 A6 + b11 A4 + b9 A2) + b7 A6 + b5 A4 + b3 A2 + b1 I)
    let w1 = a6.scale(c64(B[13], 0.0)).add(&a4.scale(c64(B[11], 0.0))).add(&a2.scale(c64(B[9], 0.0)));
    let w2 = a6
        .scale(c64(B[7], 0.0))
        .add(&a4.scale(c64(B[5], 0.0)))
        .add(&a2.scale(c64(B[3], 0.0)))
        .add(&id.scale(c64(B[1], 0.0)));
    let u = a1.matmul(&a6.matmul(&w1).add(&w2));
    // V = A6 (b12 A6 + b10 A4 + b8 A2) + b6 A6 + b4 A4 + b2 A2 + b0 I
    let z1 = a6.scale(c64(B[12], 0.0)).add(&a4.scale(c64(B[10], 0.0))).add(&a2.scale(c64(B[8], 0.0)));
    let z2 = a6
        .scale(c64(B[6], 0.0))
        .add(&a4.scale(c64(B[4], 0.0)))
        .add(&a2.scale(c64(B[2], 0.0)))
        .add(&id.scale(c64(B[0], 0.0)));
    let v = a6.matmul(&z1).add(&z2);

    // Solve (V - U) F = (V + U).
    let lhs = v.sub(&u);
    let rhs = v.add(&u);
    let lu = lu_factor(&lhs)?;
    let mut f = CMatrix::zeros(n, n);
    // Column-wise solves.
    for j in 0..n {
        let col: Vec<C64> = (0..n).map(|i| rhs.get(i, j)).collect();
        let x = lu.solve(&col);
        for i in 0..n {
            f[(i, j)] = x[i];
        }
    }
    for _ in 0..s {
        f = f.matmul(&f);
    }
    Ok(f)
}
