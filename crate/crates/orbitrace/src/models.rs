//! Complexified classical Hamiltonians: the skin-effect ring H1, the
//! nonreciprocal lattice in a magnetic field H2, the PT double well H3,
//! and the harmonic oscillator reference. Each model carries closed-form
//! partials, momentum branches p(x; E), turning points, and its
//! symmetry map (the classical counterpart of eta-pseudo-Hermiticity).
//!
//! The two-level model lives on the Bloch sphere rather than (x, p) phase
//! space; see the spin module.

use crate::error::{Error, Result};
use crate::linalg;
use crate::{c64, C64};
use serde::{Deserialize, Serialize};

/// A point in complexified phase space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub x: C64,
    pub p: C64,
}

impl PhasePoint {
    pub fn new(x: C64, p: C64) -> Self {
        PhasePoint { x, p }
    }

    pub fn is_finite(&self) -> bool {
        self.x.re.is_finite() && self.x.im.is_finite() && self.p.re.is_finite() && self.p.im.is_finite()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelId {
    HarmonicOscillator,
    H1,
    H2,
    H3,
    H4,
}

/// Affine symmetry map applied to the conjugated phase point:
/// image(z) = (x_coeff * x' + x_shift, p_coeff * p' + p_shift) with
/// (x', p') = (conj x, conj p). Composed with time reversal on orbits.
#[derive(Clone, Copy, Debug)]
pub struct SymmetryMap {
    pub x_coeff: C64,
    pub x_shift: C64,
    pub p_coeff: C64,
    pub p_shift: C64,
    /// Sign of the time argument in the image orbit. All shipped models use
    /// the transpose branch (-1); the +1 branch exists but is unexercised.
    pub time_sign: i32,
    /// The image is always built from the conjugated orbit.
    pub conjugates: bool,
}

impl SymmetryMap {
    pub fn apply(&self, z: PhasePoint) -> PhasePoint {
        let (x, p) = if self.conjugates { (z.x.conj(), z.p.conj()) } else { (z.x, z.p) };
        PhasePoint::new(self.x_coeff * x + self.x_shift, self.p_coeff * p + self.p_shift)
    }
}

/// Analytic classical Hamiltonian with named real parameters.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "snake_case")]
pub enum ModelSpec {
    HarmonicOscillator { omega: f64 },
    /// (p + i gamma)^2 + V0 |x| on a ring of circumference l.
    H1 { gamma: f64, v0: f64, l: f64 },
    /// -2 [t0 cos p + i delta sin p + t0 cos(p_y - B x)], B = 2 pi q / l.
    H2 { t0: f64, delta: f64, b: f64, p_y: f64, l: f64 },
    /// p^2 + g (x^2 - a^2)^2 + i gam x.
    H3 { g: f64, a: f64, gam: f64 },
}

/// Piecewise analytic continuation of |x|: x on Re x >= 0, -x on Re x < 0.
#[inline]
fn abs_cont(x: C64) -> C64 {
    if x.re >= 0.0 {
        x
    } else {
        -x
    }
}

#[inline]
fn abs_cont_sign(x: C64) -> f64 {
    if x.re >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Reduce x into the ring cell centered on 0 (shift of Re x by multiples
/// of the circumference); V0|x| then continues to the periodic triangle
/// wave seen by traversing orbits.
#[inline]
fn ring_wrap(x: C64, l: f64) -> C64 {
    x - l * (x.re / l).round()
}

impl ModelSpec {
    pub fn id(&self) -> ModelId {
        match self {
            ModelSpec::HarmonicOscillator { .. } => ModelId::HarmonicOscillator,
            ModelSpec::H1 { .. } => ModelId::H1,
            ModelSpec::H2 { .. } => ModelId::H2,
            ModelSpec::H3 { .. } => ModelId::H3,
        }
    }

    /// Spatial period of the potential, where traversing orbits close
    /// modulo a lattice translation.
    pub fn spatial_period(&self) -> Option<f64> {
        match self {
            ModelSpec::H1 { l, .. } => Some(*l),
            ModelSpec::H2 { b, .. } => Some(2.0 * std::f64::consts::PI / b),
            _ => None,
        }
    }

    /// Period of the momentum coordinate (quasi-momentum models only).
    pub fn momentum_period(&self) -> Option<f64> {
        match self {
            ModelSpec::H2 { .. } => Some(2.0 * std::f64::consts::PI),
            _ => None,
        }
    }

    pub fn hamiltonian(&self, z: PhasePoint) -> C64 {
        match *self {
            ModelSpec::HarmonicOscillator { omega } => z.p * z.p + omega * omega * z.x * z.x,
            ModelSpec::H1 { gamma, v0, l } => {
                let pg = z.p + c64(0.0, gamma);
                pg * pg + v0 * abs_cont(ring_wrap(z.x, l))
            }
            ModelSpec::H2 { t0, delta, b, p_y, .. } => {
                let u = c64(p_y, 0.0) - b * z.x;
                -2.0 * (t0 * z.p.cos() + c64(0.0, delta) * z.p.sin() + t0 * u.cos())
            }
            ModelSpec::H3 { g, a, gam } => {
                let w = z.x * z.x - a * a;
                z.p * z.p + g * w * w + c64(0.0, gam) * z.x
            }
        }
    }

    /// Closed-form partials (dH/dx, dH/dp). For H1 the branch line Re x = 0
    /// uses the + branch.
    pub fn gradient(&self, z: PhasePoint) -> (C64, C64) {
        match *self {
            ModelSpec::HarmonicOscillator { omega } => (2.0 * omega * omega * z.x, 2.0 * z.p),
            ModelSpec::H1 { gamma, v0, l } => {
                let sign = abs_cont_sign(ring_wrap(z.x, l));
                (c64(sign * v0, 0.0), 2.0 * (z.p + c64(0.0, gamma)))
            }
            ModelSpec::H2 { t0, delta, b, p_y, .. } => {
                let u = c64(p_y, 0.0) - b * z.x;
                // d/dx cos(p_y - Bx) = B sin(p_y - Bx)
                let dx = -2.0 * t0 * b * u.sin();
                let dp = 2.0 * t0 * z.p.sin() - 2.0 * c64(0.0, delta) * z.p.cos();
                (dx, dp)
            }
            ModelSpec::H3 { g, a, gam } => {
                let w = z.x * z.x - a * a;
                (4.0 * g * z.x * w + c64(0.0, gam), 2.0 * z.p)
            }
        }
    }

    /// All momentum branches p with H(x, p) = E.
    ///
    /// H1/H3/HO have two square-root branches; H2 has two branches from the
    /// quadratic in u = e^{ip} (principal log; continuity across the 2 pi k
    /// sheets is the caller's concern).
    pub fn momentum_branches(&self, x: C64, e: C64) -> Result<Vec<C64>> {
        let out = match *self {
            ModelSpec::HarmonicOscillator { omega } => {
                let r = (e - omega * omega * x * x).sqrt();
                vec![r, -r]
            }
            ModelSpec::H1 { gamma, v0, l } => {
                let r = (e - v0 * abs_cont(ring_wrap(x, l))).sqrt();
                let ig = c64(0.0, gamma);
                vec![r - ig, -r - ig]
            }
            ModelSpec::H2 { t0, delta, b, p_y, .. } => {
                // (t0 + delta) u^2 + (E + 2 t0 cos(Bx - p_y)) u + (t0 - delta) = 0
                let qa = c64(t0 + delta, 0.0);
                let qb = e + 2.0 * t0 * (b * x - p_y).cos();
                let qc = c64(t0 - delta, 0.0);
                let disc = (qb * qb - 4.0 * qa * qc).sqrt();
                // Citardauq form for the small root to avoid cancellation.
                let (u1, u2) = if (qb + disc).norm() > (qb - disc).norm() {
                    ((-qb - disc) / (2.0 * qa), 2.0 * qc / (-qb - disc))
                } else {
                    ((-qb + disc) / (2.0 * qa), 2.0 * qc / (-qb + disc))
                };
                let to_p = |u: C64| -> C64 { c64(0.0, -1.0) * u.ln() };
                vec![to_p(u1), to_p(u2)]
            }
            ModelSpec::H3 { g, a, gam } => {
                let w = x * x - a * a;
                let r = (e - g * w * w - c64(0.0, gam) * x).sqrt();
                vec![r, -r]
            }
        };
        let sep = (out[0] - out[1]).norm();
        if sep < 1e-10 {
            return Err(Error::DegenerateBranch { x, sep });
        }
        Ok(out)
    }

    /// All complex x with H(x, p) = E and dH/dp = 0 simultaneously, sorted
    /// lexicographically by (Re, Im). H2 roots are reduced into the
    /// fundamental spatial cell [0, 2 pi / B).
    pub fn turning_points(&self, e: C64) -> Result<Vec<C64>> {
        let mut pts = match *self {
            ModelSpec::HarmonicOscillator { omega } => {
                let r = e.sqrt() / omega;
                vec![r, -r]
            }
            ModelSpec::H1 { v0, .. } => {
                // dH/dp = 0 at p = -i gamma; V0 |x| = E on each half-plane.
                vec![e / v0, -e / v0]
            }
            ModelSpec::H2 { t0, delta, b, p_y, .. } => {
                // dH/dp = 0: tan p* = i delta / t0, two branches p0, p0 + pi.
                let p0 = (c64(0.0, delta) / t0).atan();
                let lsp = 2.0 * std::f64::consts::PI / b;
                let mut v = Vec::with_capacity(4);
                for pk in [p0, p0 + std::f64::consts::PI] {
                    // H(x, p*) = E: cos(p_y - Bx) = (A - E) / (2 t0)
                    let a_val = -2.0 * (t0 * pk.cos() + c64(0.0, delta) * pk.sin());
                    let c = (a_val - e) / (2.0 * t0);
                    let th = c.acos();
                    for xr in [(c64(p_y, 0.0) - th) / b, (c64(p_y, 0.0) + th) / b] {
                        let wrapped = xr - lsp * (xr.re / lsp).floor();
                        v.push(wrapped);
                    }
                }
                v
            }
            ModelSpec::H3 { g, a, gam } => {
                // p = 0: g x^4 - 2 g a^2 x^2 + i gam x + (g a^4 - E) = 0
                let coeffs = [
                    c64(g * a.powi(4), 0.0) - e,
                    c64(0.0, gam),
                    c64(-2.0 * g * a * a, 0.0),
                    c64(0.0, 0.0),
                    c64(g, 0.0),
                ];
                linalg::poly_roots(&coeffs)?
            }
        };
        // Refinement / residual check against both defining equations.
        for x in pts.iter_mut() {
            let res = self.turning_residual(*x, e);
            if res > 1e-12 * (1.0 + e.norm()) {
                // One Newton step on H(x, p*(x)) - E along x for safety.
                if let Some(refined) = self.refine_turning(*x, e) {
                    *x = refined;
                }
                let res2 = self.turning_residual(*x, e);
                if res2 > 1e-10 * (1.0 + e.norm()) {
                    return Err(Error::RootFindingFailed {
                        context: format!("turning point near {x} at E={e}"),
                        residual: res2,
                    });
                }
            }
        }
        pts.sort_by(|a, b| {
            a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap())
        });
        Ok(pts)
    }

    /// |H(x, p*(x)) - E| at the best stationary momentum for this x.
    fn turning_residual(&self, x: C64, e: C64) -> f64 {
        (self.hamiltonian(PhasePoint::new(x, self.best_stationary_momentum(x, e))) - e).norm()
    }

    fn refine_turning(&self, x0: C64, e: C64) -> Option<C64> {
        let mut x = x0;
        for _ in 0..8 {
            let p = self.best_stationary_momentum(x, e);
            let h = self.hamiltonian(PhasePoint::new(x, p)) - e;
            if h.norm() < 1e-13 * (1.0 + e.norm()) {
                return Some(x);
            }
            let (dhdx, _) = self.gradient(PhasePoint::new(x, p));
            if dhdx.norm() == 0.0 {
                return None;
            }
            x -= h / dhdx;
        }
        Some(x)
    }

    /// Momentum with dH/dp = 0 minimizing |H - E| over the stationary
    /// branches (H2 has two; the others have one).
    fn best_stationary_momentum(&self, x: C64, e: C64) -> C64 {
        match *self {
            ModelSpec::HarmonicOscillator { .. } | ModelSpec::H3 { .. } => c64(0.0, 0.0),
            ModelSpec::H1 { gamma, .. } => c64(0.0, -gamma),
            ModelSpec::H2 { t0, delta, .. } => {
                let p0 = (c64(0.0, delta) / t0).atan();
                let p1 = p0 + std::f64::consts::PI;
                let r0 = (self.hamiltonian(PhasePoint::new(x, p0)) - e).norm();
                let r1 = (self.hamiltonian(PhasePoint::new(x, p1)) - e).norm();
                if r0 <= r1 {
                    p0
                } else {
                    p1
                }
            }
        }
    }

    /// The model's symmetry map (map + conjugation; time reversal on orbits).
    pub fn symmetry(&self) -> SymmetryMap {
        let one = c64(1.0, 0.0);
        let zero = c64(0.0, 0.0);
        match self {
            // (x, p) -> (x*, -p*): momentum flip composed with conjugation.
            ModelSpec::HarmonicOscillator { .. } | ModelSpec::H1 { .. } | ModelSpec::H2 { .. } => {
                SymmetryMap {
                    x_coeff: one,
                    x_shift: zero,
                    p_coeff: -one,
                    p_shift: zero,
                    time_sign: -1,
                    conjugates: true,
                }
            }
            // (x, p) -> (-x*, p*): parity composed with conjugation.
            ModelSpec::H3 { .. } => SymmetryMap {
                x_coeff: -one,
                x_shift: zero,
                p_coeff: one,
                p_shift: zero,
                time_sign: -1,
                conjugates: true,
            },
        }
    }

    pub fn symmetry_image(&self, z: PhasePoint) -> PhasePoint {
        self.symmetry().apply(z)
    }

    /// |H(image(z)) - conj(H(z))|: vanishes to rounding for every shipped
    /// model (the classical pseudo-Hermiticity identity).
    pub fn symmetry_residual(&self, z: PhasePoint) -> f64 {
        (self.hamiltonian(self.symmetry_image(z)) - self.hamiltonian(z).conj()).norm()
    }
}

/// Wrap the real part of a complex difference into (-period/2, period/2].
/// Used for distances on models with periodic coordinates.
pub fn wrap_re(d: C64, period: f64) -> C64 {
    c64(d.re - period * (d.re / period).round(), d.im)
}
