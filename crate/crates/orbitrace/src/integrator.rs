//! Fixed-step RK4 integration of the complex Hamilton equations along a
//! contour in complex time, the symmetry image of an orbit, and the
//! min-over-shift distance used to classify orbits.

use crate::error::{Error, Result};
use crate::models::{wrap_re, ModelId, ModelSpec, PhasePoint};
use crate::{c64, C64};
use serde::{Deserialize, Serialize};

/// Contour in complex time from 0 to `total`. The default is the straight
/// line t(s) = s * total; `waypoints` allows a polyline (used to verify that
/// orbit endpoints do not depend on the contour shape).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeContour {
    pub total: C64,
    /// Interior corner points of the polyline, in order (empty = straight).
    pub waypoints: Vec<C64>,
}

impl TimeContour {
    pub fn line(total: C64) -> Self {
        TimeContour { total, waypoints: vec![] }
    }

    pub fn polyline(waypoints: Vec<C64>, total: C64) -> Self {
        TimeContour { total, waypoints }
    }

    /// Corner sequence including both endpoints.
    fn corners(&self) -> Vec<C64> {
        let mut c = vec![c64(0.0, 0.0)];
        c.extend_from_slice(&self.waypoints);
        c.push(self.total);
        c
    }

    pub fn conj(&self) -> Self {
        TimeContour {
            total: self.total.conj(),
            waypoints: self.waypoints.iter().map(|t| t.conj()).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Classification {
    SelfSymmetric,
    /// Partner identified by its record label ("family:n").
    PairMember(String),
    Unclassified,
}

/// A sampled trajectory over a time contour. For closed orbits the first
/// and last samples coincide (traversing orbits close modulo the spatial
/// period, recorded in `x_period`).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Orbit {
    /// (s, z) pairs, s uniform in [0, 1], length steps + 1.
    pub samples: Vec<(f64, PhasePoint)>,
    pub contour: TimeContour,
    pub energy: C64,
    pub action: Option<C64>,
    pub model_id: ModelId,
    pub family_label: String,
    pub classification: Classification,
    /// Periods for wrap-aware distances (set from the model at build time).
    pub x_period: Option<f64>,
    pub p_period: Option<f64>,
}

const BLOWUP_BOUND: f64 = 1e6;

/// RK4 right-hand side dz/ds = dt/ds * (dH/dp, -dH/dx).
#[inline]
fn rhs(model: &ModelSpec, z: PhasePoint, dt_ds: C64) -> (C64, C64) {
    let (hx, hp) = model.gradient(z);
    (dt_ds * hp, -(dt_ds * hx))
}

/// One RK4 step of complex-time size dt. For the piecewise-linear ring
/// potential the slope sign is frozen to `cell` so stage evaluations near a
/// kink cannot straddle it (within a cell the flow is affine, making RK4
/// exact there).
#[inline]
fn rk4_step(model: &ModelSpec, z: PhasePoint, dt: C64, cell: Option<i64>) -> PhasePoint {
    let stage = |z: PhasePoint| -> (C64, C64) {
        match (model, cell) {
            (&ModelSpec::H1 { gamma, v0, .. }, Some(c)) => {
                let sign = if c.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                (dt * (2.0 * (z.p + c64(0.0, gamma))), -(dt * c64(sign * v0, 0.0)))
            }
            _ => rhs(model, z, dt),
        }
    };
    let (k1x, k1p) = stage(z);
    let (k2x, k2p) = stage(PhasePoint::new(z.x + 0.5 * k1x, z.p + 0.5 * k1p));
    let (k3x, k3p) = stage(PhasePoint::new(z.x + 0.5 * k2x, z.p + 0.5 * k2p));
    let (k4x, k4p) = stage(PhasePoint::new(z.x + k3x, z.p + k3p));
    PhasePoint::new(
        z.x + (k1x + 2.0 * k2x + 2.0 * k3x + k4x) / 6.0,
        z.p + (k1p + 2.0 * k2p + 2.0 * k3p + k4p) / 6.0,
    )
}

/// Cell index between potential kinks, for models whose Hamiltonian is
/// only piecewise smooth in Re x (the triangle-wave ring kinks at every
/// half period). None for globally smooth models.
#[inline]
fn kink_cell(model: &ModelSpec, z: PhasePoint) -> Option<i64> {
    match model {
        ModelSpec::H1 { l, .. } => Some((z.x.re / (0.5 * l)).floor() as i64),
        _ => None,
    }
}

/// One uniform step, split at kink crossings so no RK4 stage straddles a
/// derivative discontinuity (this keeps the scheme 4th order on the
/// piecewise-linear potential). The crossing time inside the step is
/// located by bisection on the trial step fraction.
fn advance(model: &ModelSpec, z0: PhasePoint, dt: C64) -> PhasePoint {
    let cell0 = kink_cell(model, z0);
    let trial = rk4_step(model, z0, dt, cell0);
    let Some(mut cell) = cell0 else { return trial };
    let mut z = z0;
    let mut dt = dt;
    let mut trial = trial;
    for _ in 0..6 {
        if kink_cell(model, trial) == Some(cell) {
            return trial;
        }
        let (mut lo, mut hi) = (0.0f64, 1.0);
        for _ in 0..50 {
            let mid = 0.5 * (lo + hi);
            if kink_cell(model, rk4_step(model, z, dt * mid, Some(cell))) == Some(cell) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        z = rk4_step(model, z, dt * hi, Some(cell));
        cell = kink_cell(model, z).unwrap();
        dt *= 1.0 - hi;
        trial = rk4_step(model, z, dt, Some(cell));
    }
    trial
}

/// Integrate the canonical equations from z0 over the contour with `steps`
/// fixed RK4 steps (distributed over polyline segments by arc length).
pub fn integrate(
    model: &ModelSpec,
    z0: PhasePoint,
    contour: &TimeContour,
    steps: usize,
) -> Result<Orbit> {
    assert!(steps >= 16, "at least 16 steps");
    assert!(z0.is_finite());
    let corners = contour.corners();
    let seg_lens: Vec<f64> = corners.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
    let total_len: f64 = seg_lens.iter().sum();

    // Steps per segment, proportional to arc length, at least 1 each.
    let nseg = seg_lens.len();
    let mut seg_steps = vec![0usize; nseg];
    let mut assigned = 0usize;
    for i in 0..nseg {
        let want = if i + 1 == nseg {
            steps - assigned
        } else {
            ((seg_lens[i] / total_len) * steps as f64).round().max(1.0) as usize
        };
        seg_steps[i] = want.max(1);
        assigned += seg_steps[i];
    }

    let total_steps: usize = seg_steps.iter().sum();
    let mut samples = Vec::with_capacity(total_steps + 1);
    let mut z = z0;
    let mut done = 0usize;
    samples.push((0.0, z));
    for (i, &ns) in seg_steps.iter().enumerate() {
        let dt = (corners[i + 1] - corners[i]) / ns as f64;
        for k in 0..ns {
            z = advance(model, z, dt);
            let s = (done + k + 1) as f64 / total_steps as f64;
            if !z.is_finite() || z.x.norm() > BLOWUP_BOUND || z.p.norm() > BLOWUP_BOUND {
                return Err(Error::BlowUp { s, bound: BLOWUP_BOUND });
            }
            samples.push((s, z));
        }
        done += ns;
    }

    Ok(Orbit {
        samples,
        contour: contour.clone(),
        energy: model.hamiltonian(z0),
        action: None,
        model_id: model.id(),
        family_label: String::new(),
        classification: Classification::Unclassified,
        x_period: model.spatial_period(),
        p_period: model.momentum_period(),
    })
}

/// Endpoint mismatch |z(1) - z(0)| (wrap-aware in x for traversing orbits).
pub fn closure_error(orbit: &Orbit) -> f64 {
    let a = orbit.samples.first().unwrap().1;
    let b = orbit.samples.last().unwrap().1;
    point_distance(b, a, orbit.x_period, orbit.p_period)
}

/// Max energy drift along the orbit, |H(z(s)) - H(z(0))|.
pub fn max_energy_drift(model: &ModelSpec, orbit: &Orbit) -> f64 {
    let e0 = model.hamiltonian(orbit.samples[0].1);
    orbit
        .samples
        .iter()
        .map(|&(_, z)| (model.hamiltonian(z) - e0).norm())
        .fold(0.0, f64::max)
}

/// Loop integral of p dx along the sampled orbit: int p (dH/dp) dt/ds ds by
/// the composite trapezoid over the uniform s grid.
pub fn orbit_action(model: &ModelSpec, orbit: &Orbit) -> C64 {
    // dt/ds is piecewise constant on polylines; recompute per sample from
    // the contour. For the straight default it is just T.
    let corners = orbit.contour.corners();
    let seg_lens: Vec<f64> = corners.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
    let total_len: f64 = seg_lens.iter().sum();
    // Cumulative s at each corner.
    let mut s_corner = vec![0.0];
    let mut acc = 0.0;
    for l in &seg_lens {
        acc += l / total_len;
        s_corner.push(acc);
    }
    let dt_ds_at = |s: f64| -> C64 {
        let mut i = 0;
        while i + 2 < s_corner.len() && s >= s_corner[i + 1] {
            i += 1;
        }
        (corners[i + 1] - corners[i]) / (s_corner[i + 1] - s_corner[i])
    };
    let f: Vec<C64> = orbit
        .samples
        .iter()
        .map(|&(s, z)| {
            let (_, hp) = model.gradient(z);
            z.p * hp * dt_ds_at(s.min(1.0 - 1e-12))
        })
        .collect();
    let n = f.len() - 1;
    let h = 1.0 / n as f64;
    let mut w = (f[0] + f[n]) * 0.5;
    for fi in &f[1..n] {
        w += fi;
    }
    w * h
}

/// The symmetry partner orbit: samples reversed in s, conjugated, and
/// mapped through the model's symmetry; period and energy conjugated.
pub fn orbit_image(model: &ModelSpec, orbit: &Orbit) -> Orbit {
    let map = model.symmetry();
    let n = orbit.samples.len();
    let samples: Vec<(f64, PhasePoint)> = (0..n)
        .map(|i| {
            let (s, z) = orbit.samples[n - 1 - i];
            (1.0 - s, map.apply(z))
        })
        .collect();
    Orbit {
        samples,
        contour: orbit.contour.conj(),
        energy: orbit.energy.conj(),
        action: orbit.action.map(|w| w.conj()),
        model_id: orbit.model_id,
        family_label: if orbit.family_label.is_empty() {
            String::new()
        } else {
            format!("{}-image", orbit.family_label)
        },
        classification: Classification::Unclassified,
        x_period: orbit.x_period,
        p_period: orbit.p_period,
    }
}

/// Phase-space distance with periodic wrapping of the real parts where the
/// model's coordinates are periodic.
#[inline]
pub fn point_distance(a: PhasePoint, b: PhasePoint, x_period: Option<f64>, p_period: Option<f64>) -> f64 {
    let mut dx = a.x - b.x;
    if let Some(l) = x_period {
        dx = wrap_re(dx, l);
    }
    let mut dp = a.p - b.p;
    if let Some(l) = p_period {
        dp = wrap_re(dp, l);
    }
    (dx.norm_sqr() + dp.norm_sqr()).sqrt()
}

/// Min over cyclic s-shifts (continuous: integer scan plus fractional
/// refinement with linear sample interpolation) of the max pointwise
/// phase-space distance. Symmetric in its arguments for closed orbits.
pub fn orbit_distance(a: &Orbit, b: &Orbit) -> Result<f64> {
    if a.samples.len() != b.samples.len() {
        return Err(Error::SampleMismatch { a: a.samples.len(), b: b.samples.len() });
    }
    let xp = a.x_period;
    let pp = a.p_period;
    let n = a.samples.len() - 1; // closing sample duplicates the first
    let ap: Vec<PhasePoint> = a.samples[..n].iter().map(|&(_, z)| z).collect();
    let bp: Vec<PhasePoint> = b.samples[..n].iter().map(|&(_, z)| z).collect();

    let full = |shift: usize| -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..n {
            m = m.max(point_distance(ap[i], bp[(i + shift) % n], xp, pp));
        }
        m
    };

    // Coarse scan over all integer shifts with a subsampled max.
    let istride = (n / 96).max(1);
    let mut coarse: Vec<(f64, usize)> = (0..n)
        .map(|k| {
            let mut m: f64 = 0.0;
            let mut i = 0;
            while i < n {
                m = m.max(point_distance(ap[i], bp[(i + k) % n], xp, pp));
                i += istride;
            }
            (m, k)
        })
        .collect();
    coarse.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());

    // Exact evaluation at the best candidates and their neighbors.
    let mut best = f64::INFINITY;
    let mut best_k = 0usize;
    for &(_, k) in coarse.iter().take(4) {
        for dk in [n - 1, 0, 1] {
            let kk = (k + dk) % n;
            let d = full(kk);
            if d < best {
                best = d;
                best_k = kk;
            }
        }
    }

    // Fractional refinement around best_k: golden-section on the shift
    // offset with linearly interpolated samples of b.
    let frac = |delta: f64| -> f64 {
        let base = delta.floor();
        let t = delta - base;
        let off = base as i64;
        let mut m: f64 = 0.0;
        for i in 0..n {
            let j0 = ((i as i64 + best_k as i64 + off).rem_euclid(n as i64)) as usize;
            let j1 = (j0 + 1) % n;
            let z0 = bp[j0];
            let z1 = bp[j1];
            // Interpolate along b, unwrapping the step between j0 and j1.
            let mut sx = z1.x - z0.x;
            if let Some(l) = xp {
                sx = wrap_re(sx, l);
            }
            let mut sp = z1.p - z0.p;
            if let Some(l) = pp {
                sp = wrap_re(sp, l);
            }
            let zi = PhasePoint::new(z0.x + t * sx, z0.p + t * sp);
            m = m.max(point_distance(ap[i], zi, xp, pp));
        }
        m
    };
    let (mut lo, mut hi) = (-1.0f64, 1.0f64);
    let phi = 0.618_033_988_749_894_8;
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let mut f1 = frac(x1);
    let mut f2 = frac(x2);
    for _ in 0..40 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = frac(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = frac(x2);
        }
    }
    Ok(best.min(f1).min(f2))
}
