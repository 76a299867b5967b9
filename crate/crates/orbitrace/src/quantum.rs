//! The independent quantum oracle: dense matrix discretizations of the
//! shipped models, diagonalized by the in-house non-Hermitian eigensolver,
//! with matrix-level pseudo-Hermiticity and propagator-symmetry residuals
//! and greedy spectrum matching against the semiclassical run.

use crate::error::Result;
use crate::linalg::{self, CMatrix};
use crate::models::ModelId;
use crate::quantizer::SpectrumRecord;
use crate::{c64, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Discretization {
    pub n: usize,
    pub extent: f64,
    pub scheme: String,
}

/// Dense discretized Hamiltonian with its eta metric (a Hermitian
/// involutory permutation for every shipped model).
pub struct QuantumOperator {
    pub dim: usize,
    pub entries: CMatrix,
    pub eta: CMatrix,
    pub model_id: ModelId,
    pub discretization: Discretization,
}

/// H1 = (p + i gamma)^2 + V0 |x| on a ring of circumference l, in the
/// plane-wave basis k_m = 2 pi m / l. The index range is symmetric,
/// m = -N/2..N/2 (dimension N+1), so the eta = index-reversal permutation
/// is exact; the triangle-wave matrix elements are closed form.
pub fn build_h1(gamma: f64, v0: f64, l: f64, n: usize) -> QuantumOperator {
    assert!(n >= 128 && n % 2 == 0, "N >= 128, even");
    let half = (n / 2) as i64;
    let ms: Vec<i64> = (-half..=half).collect();
    let dim = ms.len();
    let mut h = CMatrix::zeros(dim, dim);
    for (i, &mi) in ms.iter().enumerate() {
        let k = 2.0 * PI * mi as f64 / l;
        let kg = c64(k, gamma);
        h[(i, i)] = kg * kg + c64(v0 * l / 4.0, 0.0);
        for (j, &mj) in ms.iter().enumerate() {
            if i == j {
                continue;
            }
            let d = (mi - mj) as f64;
            let sign = if (mi - mj) % 2 == 0 { 1.0 } else { -1.0 };
            h[(i, j)] += c64(v0 * l * (sign - 1.0) / (2.0 * PI * PI * d * d), 0.0);
        }
    }
    let mut eta = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        eta[(i, dim - 1 - i)] = c64(1.0, 0.0); // m -> -m
    }
    QuantumOperator {
        dim,
        entries: h,
        eta,
        model_id: ModelId::H1,
        discretization: Discretization { n: dim, extent: l, scheme: "plane-wave".into() },
    }
}

/// H2 on an l-site ring: forward hop -(t0 + delta), backward -(t0 - delta),
/// onsite -2 t0 cos(B j - p_y) with B = 2 pi q / l. eta is the lattice
/// mirror about j = 0 (exact for p_y = 0).
pub fn build_h2(t0: f64, delta: f64, q: i64, l: usize, p_y: f64) -> QuantumOperator {
    assert!(l >= 8);
    let b = 2.0 * PI * q as f64 / l as f64;
    let mut h = CMatrix::zeros(l, l);
    for j in 0..l {
        h[(j, j)] = c64(-2.0 * t0 * (b * j as f64 - p_y).cos(), 0.0);
        h[((j + 1) % l, j)] += c64(-(t0 + delta), 0.0);
        h[(j, (j + 1) % l)] += c64(-(t0 - delta), 0.0);
    }
    let mut eta = CMatrix::zeros(l, l);
    for j in 0..l {
        eta[(j, (l - j) % l)] = c64(1.0, 0.0);
    }
    QuantumOperator {
        dim: l,
        entries: h,
        eta,
        model_id: ModelId::H2,
        discretization: Discretization { n: l, extent: l as f64, scheme: "lattice".into() },
    }
}

/// Shared sine-DVR box builder: kinetic p^2 in the sine basis on [-X, X]
/// with Dirichlet ends (spectrally convergent), diagonal complex potential.
fn build_dvr(
    x_half: f64,
    n: usize,
    potential: impl Fn(f64) -> C64,
    model_id: ModelId,
    scheme: &str,
) -> QuantumOperator {
    let lbox = 2.0 * x_half;
    let xs: Vec<f64> = (1..=n).map(|j| -x_half + j as f64 * lbox / (n as f64 + 1.0)).collect();
    // T = S^T diag(k_m^2) S with S_mj = sqrt(2/(N+1)) sin(pi m j / (N+1)).
    let mut h = CMatrix::zeros(n, n);
    let norm = 2.0 / (n as f64 + 1.0);
    for i in 0..n {
        for j in i..n {
            let mut t = 0.0;
            for m in 1..=n {
                let km = PI * m as f64 / lbox;
                let si = (PI * m as f64 * (i + 1) as f64 / (n as f64 + 1.0)).sin();
                let sj = (PI * m as f64 * (j + 1) as f64 / (n as f64 + 1.0)).sin();
                t += km * km * si * sj;
            }
            h[(i, j)] = c64(norm * t, 0.0);
            h[(j, i)] = c64(norm * t, 0.0);
        }
    }
    for (j, &x) in xs.iter().enumerate() {
        let v = potential(x);
        h[(j, j)] += v;
    }
    let mut eta = CMatrix::zeros(n, n);
    for j in 0..n {
        eta[(j, n - 1 - j)] = c64(1.0, 0.0); // parity about the box center
    }
    QuantumOperator {
        dim: n,
        entries: h,
        eta,
        model_id,
        discretization: Discretization { n, extent: x_half, scheme: scheme.into() },
    }
}

/// H3 = p^2 + g (x^2 - a^2)^2 + i gam x on a Dirichlet box [-X, X].
pub fn build_h3(g: f64, a: f64, gam: f64, x_half: f64, n: usize) -> QuantumOperator {
    assert!(x_half > 2.0 * a, "box must extend beyond the wells");
    assert!(n >= 64);
    build_dvr(
        x_half,
        n,
        |x| c64(g * (x * x - a * a).powi(2), gam * x),
        ModelId::H3,
        "sine-dvr",
    )
}

/// Harmonic oscillator p^2 + omega^2 x^2 on the same box machinery.
pub fn build_ho(omega: f64, x_half: f64, n: usize) -> QuantumOperator {
    build_dvr(x_half, n, |x| c64(omega * omega * x * x, 0.0), ModelId::HarmonicOscillator, "sine-dvr")
}

impl QuantumOperator {
    /// All eigenvalues, sorted by (Re, Im).
    pub fn eigenvalues(&self) -> Result<Vec<C64>> {
        linalg::eigenvalues(&self.entries)
    }

    /// ||eta H eta^{-1} - H^dagger||_F / ||H||_F. The shipped etas are
    /// involutory permutations, so eta^{-1} = eta.
    pub fn phs_residual(&self) -> f64 {
        let lhs = self.eta.matmul(&self.entries).matmul(&self.eta);
        lhs.sub(&self.entries.adjoint()).frobenius() / self.entries.frobenius()
    }

    /// Matrix-level residual of the propagator symmetry
    /// eta U(t) eta^{-1} = U(-t*)^dagger with U(t) = exp(-i H t).
    pub fn propagator_residual(&self, t: C64) -> Result<f64> {
        let u = linalg::expm(&self.entries.scale(c64(0.0, -1.0) * t))?;
        let v = linalg::expm(&self.entries.scale(c64(0.0, -1.0) * (-t.conj())))?;
        let lhs = self.eta.matmul(&u).matmul(&self.eta);
        Ok(lhs.sub(&v.adjoint()).frobenius() / u.frobenius())
    }

    /// Rough condition number of eta (trivially 1 for permutations;
    /// reported to honor the invertibility invariant).
    pub fn eta_condition(&self) -> f64 {
        let smin = linalg::smallest_singular(&self.eta).unwrap_or(f64::NAN);
        let smax = self.eta.norm_inf();
        smax / smin
    }
}

/// Greedy nearest-neighbor matching in the complex plane: candidate pairs
/// sorted by |dE| (ties broken by smaller |E|), each side used once.
/// Fills the match fields of the semiclassical records and returns the
/// unmatched quantum levels.
pub fn match_spectra(quantum: &[C64], semiclassical: &mut [SpectrumRecord]) -> Vec<C64> {
    let sc_idx: Vec<usize> =
        (0..semiclassical.len()).filter(|&i| semiclassical[i].converged()).collect();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(sc_idx.len() * quantum.len());
    for &i in &sc_idx {
        let e = semiclassical[i].e_semiclassical;
        for (j, &q) in quantum.iter().enumerate() {
            pairs.push(((e - q).norm(), i, j));
        }
    }
    pairs.sort_by(|a, b| {
        a.0.partial_cmp(&b.0).unwrap().then_with(|| {
            let ea = quantum[a.2].norm();
            let eb = quantum[b.2].norm();
            ea.partial_cmp(&eb).unwrap()
        })
    });
    let mut sc_used = vec![false; semiclassical.len()];
    let mut q_used = vec![false; quantum.len()];
    for (_, i, j) in pairs {
        if sc_used[i] || q_used[j] {
            continue;
        }
        sc_used[i] = true;
        q_used[j] = true;
        let e = semiclassical[i].e_semiclassical;
        semiclassical[i].e_quantum_match = Some(quantum[j]);
        semiclassical[i].match_error = Some((e - quantum[j]).norm() / (1.0 + e.norm()));
    }
    quantum
        .iter()
        .zip(&q_used)
        .filter_map(|(&q, &used)| (!used).then_some(q))
        .collect()
}

/// Conjugation-closure defect of a spectrum: max over levels of the
/// distance to the nearest conjugated level (the spectral signature of
/// pseudo-Hermiticity).
pub fn conjugation_closure(eigs: &[C64]) -> f64 {
    eigs.iter()
        .map(|&e| {
            eigs.iter()
                .map(|&f| (e - f.conj()).norm())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}
