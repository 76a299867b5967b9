//! Complex action W(E) = loop integral of p dx and period T(E) = dW/dE for
//! each orbit family, by contour quadrature in the complex x-plane.
//!
//! Librational families integrate around their turning pair on an ellipse
//! with the momentum branch tracked by continuity (trapezoid, exponentially
//! convergent). H1's piecewise |x| breaks contour analyticity across
//! Re x = 0, so its confined family uses a cusp-split Gauss-Legendre form
//! with a u^2 endpoint substitution instead. Traversing families integrate
//! a tracked branch over one spatial period.

use crate::error::{Error, Result};
use crate::models::{ModelSpec, PhasePoint};
use crate::{c64, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// How a librational family picks its two turning points out of the sorted
/// root list. Index-based selection is fragile when root ordering changes
/// with E, so structural selectors are preferred.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TurningSelector {
    /// Positions in the lexicographically sorted root list.
    Indices { i: usize, j: usize },
    /// The two roots with sign * Re x > 0 (double-well halves).
    HalfPlaneRe { sign: i8 },
    /// The two roots of smallest |Im x| after re-wrapping into the spatial
    /// cell centered on `center` (periodic models).
    NearRealPair { center: f64 },
    /// Extreme real parts: first and last of the sorted list.
    Outermost,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyKind {
    Librational { selector: TurningSelector },
    /// direction: +1 traverses with positive group velocity, -1 negative.
    Traversing { direction: i8 },
}

/// Rectangular validity window in the complex E plane.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct Window {
    pub re: [f64; 2],
    pub im: [f64; 2],
}

impl Window {
    pub fn contains(&self, e: C64) -> bool {
        // 10% slack on the real extent, matching the validity-window policy.
        let slack = 0.1 * (self.re[1] - self.re[0]).abs();
        e.re >= self.re[0] - slack
            && e.re <= self.re[1] + slack
            && e.im >= self.im[0] - slack.max(0.1)
            && e.im <= self.im[1] + slack.max(0.1)
    }
}

fn default_accuracy() -> f64 {
    0.02
}

/// One orbit family: the unit of quantization. mu is the Maslov parameter
/// of the quantization condition, a per-family config input.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct OrbitFamily {
    pub label: String,
    pub kind: FamilyKind,
    pub mu: f64,
    pub n_min: i64,
    pub n_max: i64,
    pub window: Window,
    /// Expected relative match error against the quantum oracle; verify
    /// reports (and fails) families exceeding it.
    #[serde(default = "default_accuracy")]
    pub expected_accuracy: f64,
}

// ---------------------------------------------------------------------------
// Gauss-Legendre nodes (cached)
// ---------------------------------------------------------------------------

/// Nodes and weights of n-point Gauss-Legendre quadrature on [-1, 1],
/// cached per n (the quantizer calls this inside Newton loops).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    use std::collections::HashMap;
    use std::sync::{Mutex, OnceLock};
    static CACHE: OnceLock<Mutex<HashMap<usize, (Vec<f64>, Vec<f64>)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&n) {
        return hit.clone();
    }
    let computed = gauss_legendre_uncached(n);
    cache.lock().unwrap().insert(n, computed.clone());
    computed
}

fn gauss_legendre_uncached(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Initial guess (Abramowitz-Stegun asymptotic).
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j as f64 + 1.0) * z * p1 - j as f64 * p2) / (j as f64 + 1.0);
            }
            pp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / pp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * pp * pp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

// ---------------------------------------------------------------------------
// Turning-pair selection
// ---------------------------------------------------------------------------

/// The selected turning pair (ordered by Re) and the excluded roots.
pub fn select_turning_pair(
    model: &ModelSpec,
    selector: TurningSelector,
    e: C64,
) -> Result<(C64, C64, Vec<C64>)> {
    let mut pts = model.turning_points(e)?;
    let (a, b) = match selector {
        TurningSelector::Indices { i, j } => {
            if i >= pts.len() || j >= pts.len() || i == j {
                return Err(Error::RootFindingFailed {
                    context: format!("turning selector indices ({i}, {j}) out of range ({} roots)", pts.len()),
                    residual: f64::NAN,
                });
            }
            (pts[i], pts[j])
        }
        TurningSelector::HalfPlaneRe { sign } => {
            let side: Vec<C64> = pts.iter().copied().filter(|x| sign as f64 * x.re > 0.0).collect();
            if side.len() != 2 {
                return Err(Error::RootFindingFailed {
                    context: format!("expected 2 roots with sign({sign}) real part, found {}", side.len()),
                    residual: f64::NAN,
                });
            }
            (side[0], side[1])
        }
        TurningSelector::NearRealPair { center } => {
            let lsp = model.spatial_period().ok_or_else(|| {
                Error::RootFindingFailed {
                    context: "near-real-pair selector needs a spatial period".into(),
                    residual: f64::NAN,
                }
            })?;
            // Re-wrap into the cell centered on the family.
            for x in pts.iter_mut() {
                let shift = ((x.re - center) / lsp).round();
                *x -= lsp * shift;
            }
            let mut by_im = pts.clone();
            by_im.sort_by(|a, b| a.im.abs().partial_cmp(&b.im.abs()).unwrap());
            (by_im[0], by_im[1])
        }
        TurningSelector::Outermost => {
            if pts.len() < 2 {
                return Err(Error::RootFindingFailed {
                    context: format!("need at least 2 turning points, found {}", pts.len()),
                    residual: f64::NAN,
                });
            }
            (pts[0], pts[pts.len() - 1])
        }
    };
    let (a, b) = if a.re <= b.re { (a, b) } else { (b, a) };
    let near = |x: &C64, y: C64| (x - y).norm() < 1e-9 * (1.0 + y.norm());
    let excluded: Vec<C64> = pts.iter().copied().filter(|x| !near(x, a) && !near(x, b)).collect();
    if (a - b).norm() < 1e-6 {
        return Err(Error::DegenerateBranch { x: a, sep: (a - b).norm() });
    }
    Ok((a, b, excluded))
}

// ---------------------------------------------------------------------------
// Librational quadrature: tracked ellipse
// ---------------------------------------------------------------------------

/// Track the momentum branch closest to `prev` at position x, allowing
/// 2 pi k sheet shifts for log-branch models (H2). Returns the chosen p and
/// the separation from the nearest rejected candidate.
fn tracked_branch(model: &ModelSpec, x: C64, e: C64, prev: C64) -> Result<(C64, f64)> {
    let branches = model.momentum_branches(x, e)?;
    let sheeted = matches!(model, ModelSpec::H2 { .. });
    let mut best = branches[0];
    let mut best_d = f64::INFINITY;
    let mut second = f64::INFINITY;
    for &b in &branches {
        let ks: &[i32] = if sheeted { &[-2, -1, 0, 1, 2] } else { &[0] };
        for &k in ks {
            let cand = b + c64(2.0 * PI * k as f64, 0.0);
            let d = (cand - prev).norm();
            if d < best_d {
                second = best_d;
                best_d = d;
                best = cand;
            } else if d < second {
                second = d;
            }
        }
    }
    Ok((best, second))
}

struct EllipseGeometry {
    center: C64,
    half: C64,
    scale: f64,
    aspect: f64,
}

/// Ellipse through the (margin-scaled) turning pair, with the aspect chosen
/// adaptively from the clearance of the nearest excluded turning point in
/// the normalized frame w = (z - center) / half.
fn ellipse_geometry(xt1: C64, xt2: C64, excluded: &[C64], margin: f64) -> Result<EllipseGeometry> {
    let center = (xt1 + xt2) * 0.5;
    let half = (xt2 - xt1) * 0.5;
    let scale = 1.0 + margin;
    let mut aspect: f64 = 0.5;
    for &t in excluded {
        let w = (t - center) / half;
        let clear = w.im.abs();
        aspect = aspect.min(0.6 * clear / scale);
        // A root sitting on (or hugging) the major axis inside the contour
        // cannot be dodged by flattening.
        if w.re.abs() < scale && clear < 1e-3 {
            return Err(Error::ContourCollision { point: t });
        }
    }
    if aspect < 0.02 {
        // Find the offender for the diagnostic.
        let worst = excluded
            .iter()
            .copied()
            .min_by(|a, b| {
                let wa = ((a - center) / half).im.abs();
                let wb = ((b - center) / half).im.abs();
                wa.partial_cmp(&wb).unwrap()
            })
            .unwrap();
        return Err(Error::ContourCollision { point: worst });
    }
    Ok(EllipseGeometry { center, half, scale, aspect })
}

/// W and T on the tracked ellipse: trapezoid over nodes theta_k = 2 pi k/N
/// of p dz and dz/(dH/dp). Branch sign fixed by Re W > 0.
fn ellipse_action_period(
    model: &ModelSpec,
    e: C64,
    xt1: C64,
    xt2: C64,
    excluded: &[C64],
    nodes: usize,
    margin: f64,
    p_hint: Option<C64>,
) -> Result<(C64, C64)> {
    let geo = ellipse_geometry(xt1, xt2, excluded, margin)?;
    let z_at = |th: f64| geo.center + geo.half * geo.scale * c64(th.cos(), geo.aspect * th.sin());
    let dz_at = |th: f64| geo.half * geo.scale * c64(-th.sin(), geo.aspect * th.cos()) * (2.0 * PI / nodes as f64);

    // Starting branch: nearest to the hint (the stationary momentum of the
    // pair for H2), otherwise the first branch.
    let z0 = z_at(0.0);
    let b0 = model.momentum_branches(z0, e)?;
    let mut p = match p_hint {
        Some(h) => {
            let (p, _) = tracked_branch(model, z0, e, h)?;
            p
        }
        None => b0[0],
    };
    let p_start = p;
    let mut w = C64::new(0.0, 0.0);
    let mut t = C64::new(0.0, 0.0);
    for k in 0..nodes {
        let th = 2.0 * PI * k as f64 / nodes as f64;
        let z = z_at(th);
        if k > 0 {
            let (pk, sep) = tracked_branch(model, z, e, p)?;
            let jump = (pk - p).norm();
            if jump > 0.5 * sep {
                return Err(Error::BranchTrackingFailed { node: k, jump, separation: sep });
            }
            p = pk;
        }
        let (_, hp) = model.gradient(PhasePoint::new(z, p));
        let dz = dz_at(th);
        w += p * dz;
        t += dz / hp;
    }
    // Loop closure on the momentum sheet.
    let (p_end, sep) = tracked_branch(model, z0, e, p)?;
    if (p_end - p_start).norm() > 0.5 * sep {
        return Err(Error::BranchTrackingFailed {
            node: nodes,
            jump: (p_end - p_start).norm(),
            separation: sep,
        });
    }
    if w.re < 0.0 {
        w = -w;
        t = -t;
    }
    Ok((w, t))
}

// ---------------------------------------------------------------------------
// H1 confined: cusp-split Gauss-Legendre
// ---------------------------------------------------------------------------

/// W = 4 int_0^{E/V0} sqrt(E - V0 x) dx and T = 2 int_0^{E/V0} dx/sqrt(...)
/// with x = xt (1 - u^2), which removes the endpoint singularity exactly
/// (the integrands become polynomials in u for the triangle well).
fn h1_confined_action_period(v0: f64, e: C64, nodes: usize) -> (C64, C64) {
    let xt = e / v0;
    let (xs, ws) = gauss_legendre(nodes.min(64).max(16));
    let mut iw = C64::new(0.0, 0.0);
    let mut it = C64::new(0.0, 0.0);
    for (&u01, &wq) in xs.iter().zip(&ws) {
        let u = 0.5 * (u01 + 1.0); // map [-1,1] -> [0,1]
        let jac = 0.5 * wq;
        // sqrt(E - V0 xt (1 - u^2)) = sqrt(V0 xt) u, continuous in u.
        let root = (C64::from(v0) * xt).sqrt() * u;
        let dx = 2.0 * xt * u;
        iw += root * dx * jac;
        it += dx / root * jac;
    }
    (4.0 * iw, 2.0 * it)
}

// ---------------------------------------------------------------------------
// Traversing quadrature
// ---------------------------------------------------------------------------

/// Distance from point t to the segment [a, b] in the complex plane.
fn dist_to_segment(t: C64, a: C64, b: C64) -> f64 {
    let ab = b - a;
    let denom = ab.norm_sqr();
    if denom == 0.0 {
        return (t - a).norm();
    }
    let lam = ((t - a) * ab.conj()).re / denom;
    let lam = lam.clamp(0.0, 1.0);
    (t - (a + lam * ab)).norm()
}

/// H1 traversing: W_d = 2 int_0^{L/2} sqrt(E - V0 x) dx - d * i gamma L on
/// a branch-tracked Gauss-Legendre path (deformed off the real axis when
/// the turning point approaches). T = int_0^{L/2} dx / sqrt(E - V0 x).
fn h1_traversing_action_period(
    gamma: f64,
    v0: f64,
    l: f64,
    direction: i8,
    e: C64,
    nodes: usize,
) -> Result<(C64, C64)> {
    let half = l / 2.0;
    let xt = e / v0; // branch point of the integrand
    // Deform with a fixed imaginary offset when the branch point hugs the
    // real path; side chosen away from the branch point.
    let mut offset = 0.0;
    if xt.re > -0.5 && xt.re < half + 0.5 && xt.im.abs() < 0.05 {
        offset = if xt.im > 0.0 { -0.1 } else { 0.1 };
    }
    let a0 = c64(0.0, offset);
    let b0 = c64(half, offset);
    let d = dist_to_segment(xt, a0, b0);
    if d < 1e-3 {
        return Err(Error::TurningPointOnPath { point: xt, dist: d });
    }
    let (xs, ws) = gauss_legendre(nodes.clamp(64, 512));
    let mut iw = C64::new(0.0, 0.0);
    let mut it = C64::new(0.0, 0.0);
    let mut prev: Option<C64> = None;
    for (&u, &wq) in xs.iter().zip(&ws) {
        let x = a0 + (b0 - a0) * (0.5 * (u + 1.0));
        let jac = (b0 - a0) * (0.5 * wq);
        let principal = (e - v0 * x).sqrt();
        // Track the sqrt branch continuously along the path.
        let root = match prev {
            Some(p) if (principal - p).norm() > (-principal - p).norm() => -principal,
            _ => principal,
        };
        prev = Some(root);
        iw += root * jac;
        it += jac / root;
    }
    let w = 2.0 * iw - c64(0.0, direction as f64 * gamma * l);
    Ok((w, it))
}

/// H2 traversing: periodic trapezoid over one spatial cell on the tracked
/// branch with sign(Re v_g) = direction. W = -d int p dx (the band's
/// natural integral is negative on the v_g > 0 branch; the flip realizes
/// the Re W > 0 convention as an n relabeling), T = -d int dx / v_g.
fn h2_traversing_action_period(
    model: &ModelSpec,
    direction: i8,
    e: C64,
    nodes: usize,
) -> Result<(C64, C64)> {
    let lsp = model.spatial_period().unwrap();
    let h = lsp / nodes as f64;
    // Starting branch at x = 0 by group-velocity sign.
    let branches = model.momentum_branches(c64(0.0, 0.0), e)?;
    let mut p = *branches
        .iter()
        .find(|&&b| {
            let (_, hp) = model.gradient(PhasePoint::new(c64(0.0, 0.0), b));
            (direction as f64) * hp.re > 0.0
        })
        .ok_or(Error::TurningPointOnPath { point: c64(0.0, 0.0), dist: 0.0 })?;
    let p_start = p;
    let mut iw = C64::new(0.0, 0.0);
    let mut it = C64::new(0.0, 0.0);
    for k in 0..nodes {
        let x = c64(k as f64 * h, 0.0);
        if k > 0 {
            let (pk, sep) = tracked_branch(model, x, e, p)?;
            let jump = (pk - p).norm();
            if jump > 0.5 * sep {
                return Err(Error::BranchTrackingFailed { node: k, jump, separation: sep });
            }
            p = pk;
        }
        let (_, hp) = model.gradient(PhasePoint::new(x, p));
        iw += p * h;
        it += h / hp;
    }
    // Bloch closure: the branch must return to its start after one cell.
    let (p_end, sep) = tracked_branch(model, c64(0.0, 0.0), e, p)?;
    if (p_end - p_start).norm() > 0.5 * sep {
        return Err(Error::BranchTrackingFailed {
            node: nodes,
            jump: (p_end - p_start).norm(),
            separation: sep,
        });
    }
    let s = -(direction as f64);
    Ok((s * iw, s * it))
}

// ---------------------------------------------------------------------------
// Public entry points
// ---------------------------------------------------------------------------

/// Both W(E) and T(E) for a family (they share the quadrature).
pub fn action_period(
    model: &ModelSpec,
    family: &OrbitFamily,
    e: C64,
    nodes: usize,
) -> Result<(C64, C64)> {
    match family.kind {
        FamilyKind::Librational { selector } => {
            if let ModelSpec::H1 { v0, .. } = *model {
                return Ok(h1_confined_action_period(v0, e, nodes));
            }
            let (x1, x2, excluded) = select_turning_pair(model, selector, e)?;
            // Branch hint: the stationary momentum at the pair (H2 needs the
            // correct log sheet; harmless elsewhere).
            let mid = (x1 + x2) * 0.5;
            let hint = match model {
                ModelSpec::H2 { .. } => {
                    // Nearest stationary branch at the pair midpoint.
                    Some(nearest_stationary(model, mid, e))
                }
                _ => None,
            };
            ellipse_action_period(model, e, x1, x2, &excluded, nodes, 0.2, hint)
        }
        FamilyKind::Traversing { direction } => match *model {
            ModelSpec::H1 { gamma, v0, l } => {
                h1_traversing_action_period(gamma, v0, l, direction, e, nodes)
            }
            ModelSpec::H2 { .. } => h2_traversing_action_period(model, direction, e, nodes),
            _ => Err(Error::RootFindingFailed {
                context: "traversing families need a spatially periodic model".into(),
                residual: f64::NAN,
            }),
        },
    }
}

fn nearest_stationary(model: &ModelSpec, x: C64, e: C64) -> C64 {
    if let ModelSpec::H2 { t0, delta, .. } = *model {
        let p0 = (c64(0.0, delta) / t0).atan();
        let p1 = p0 + PI;
        let r0 = (model.hamiltonian(PhasePoint::new(x, p0)) - e).norm();
        let r1 = (model.hamiltonian(PhasePoint::new(x, p1)) - e).norm();
        if r0 <= r1 {
            p0
        } else {
            p1
        }
    } else {
        c64(0.0, 0.0)
    }
}

/// The loop action W(E) alone.
pub fn action(model: &ModelSpec, family: &OrbitFamily, e: C64, nodes: usize) -> Result<C64> {
    action_period(model, family, e, nodes).map(|(w, _)| w)
}

/// The period T(E) alone (same quadrature as the action; equals dW/dE).
pub fn period(model: &ModelSpec, family: &OrbitFamily, e: C64, nodes: usize) -> Result<C64> {
    action_period(model, family, e, nodes).map(|(_, t)| t)
}
