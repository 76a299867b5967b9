//! Two-level transition sector: exact eigenvalues of the half M.sigma
//! Hamiltonian, complex Bloch precession ndot = M x n, orbit classification
//! under the combined parity-conjugation symmetry, and the delta1 sweep
//! across the symmetry-breaking point.

use crate::integrator::TimeContour;
use crate::{c64, C64};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub type SpinVector = [C64; 3];

const BLOWUP_BOUND: f64 = 1e6;
const CLASS_TOL: f64 = 1e-4;
const ANGLE_TOL: f64 = 1e-6;

fn cross(a: &SpinVector, b: &SpinVector) -> SpinVector {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Bilinear scalar product (no conjugation), the invariant of the flow.
pub fn bilinear(a: &SpinVector, b: &SpinVector) -> C64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn vnorm(a: &SpinVector) -> f64 {
    (a[0].norm_sqr() + a[1].norm_sqr() + a[2].norm_sqr()).sqrt()
}

fn vsub(a: &SpinVector, b: &SpinVector) -> SpinVector {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SpinModel {
    pub t1: f64,
    pub delta1: f64,
}

impl SpinModel {
    pub fn new(t1: f64, delta1: f64) -> Self {
        SpinModel { t1, delta1 }
    }

    /// M = (t1, 0, i delta1).
    pub fn m(&self) -> SpinVector {
        [c64(self.t1, 0.0), c64(0.0, 0.0), c64(0.0, self.delta1)]
    }

    /// Precession frequency sqrt(t1^2 - delta1^2), real branch below the
    /// transition, +i branch above.
    pub fn omega(&self) -> C64 {
        let disc = self.t1 * self.t1 - self.delta1 * self.delta1;
        if disc >= 0.0 {
            c64(disc.sqrt(), 0.0)
        } else {
            c64(0.0, (-disc).sqrt())
        }
    }

    /// One closed period of the Bloch flow: real 2 pi / omega below the
    /// transition, purely imaginary above (the closed contour runs along
    /// imaginary time there).
    pub fn period(&self) -> C64 {
        let w = self.omega();
        c64(2.0 * PI, 0.0) / w
    }

    /// True within the guard window around the exceptional point, where
    /// the period diverges and trajectories escape to infinity.
    pub fn at_transition(&self) -> bool {
        (self.delta1 - self.t1).abs() < 1e-3 * self.t1.abs()
    }
}

/// Exact eigenvalues (E_plus, E_minus) = +-(1/2) sqrt(t1^2 - delta1^2).
pub fn analytic_eigenvalues(model: &SpinModel) -> (C64, C64) {
    let half = model.omega() * 0.5;
    (half, -half)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpinTrajectory {
    /// (s, n) pairs, s uniform in [0, 1], length steps + 1.
    pub samples: Vec<(f64, SpinVector)>,
    pub contour: TimeContour,
    /// Components exceeded the blow-up bound; samples stop there.
    pub blew_up: bool,
}

impl SpinTrajectory {
    pub fn closure_error(&self) -> f64 {
        if self.blew_up {
            return f64::INFINITY;
        }
        let first = &self.samples.first().unwrap().1;
        let last = &self.samples.last().unwrap().1;
        vnorm(&vsub(last, first))
    }

    /// Max drift of the bilinear Casimir n.n along the trajectory.
    pub fn casimir_drift(&self) -> f64 {
        let c0 = bilinear(&self.samples[0].1, &self.samples[0].1);
        self.samples
            .iter()
            .map(|(_, n)| (bilinear(n, n) - c0).norm())
            .fold(0.0, f64::max)
    }
}

/// RK4 integration of ndot = M x n along the contour (fixed steps,
/// distributed over polyline segments by arc length). Divergence sets the
/// blow-up flag instead of erroring: it is the expected signature of the
/// transition point.
pub fn bloch_integrate(
    model: &SpinModel,
    n0: SpinVector,
    contour: &TimeContour,
    steps: usize,
) -> SpinTrajectory {
    assert!(steps >= 16, "at least 16 steps");
    let m = model.m();
    let mut corners = vec![c64(0.0, 0.0)];
    corners.extend_from_slice(&contour.waypoints);
    corners.push(contour.total);
    let seg_lens: Vec<f64> = corners.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
    let total_len: f64 = seg_lens.iter().sum::<f64>().max(1e-300);
    let nseg = seg_lens.len();
    let mut seg_steps = vec![0usize; nseg];
    let mut assigned = 0usize;
    for i in 0..nseg {
        let want = if i + 1 == nseg {
            steps.saturating_sub(assigned)
        } else {
            ((seg_lens[i] / total_len) * steps as f64).round().max(1.0) as usize
        };
        seg_steps[i] = want.max(1);
        assigned += seg_steps[i];
    }
    let total_steps: usize = seg_steps.iter().sum();

    let deriv = |n: &SpinVector| cross(&m, n);
    let mut samples = Vec::with_capacity(total_steps + 1);
    let mut n = n0;
    samples.push((0.0, n));
    let mut done = 0usize;
    let mut blew_up = false;
    'outer: for (i, &ns) in seg_steps.iter().enumerate() {
        let dt = (corners[i + 1] - corners[i]) / ns as f64;
        for _ in 0..ns {
            let k1 = deriv(&n);
            let n2 = [n[0] + 0.5 * dt * k1[0], n[1] + 0.5 * dt * k1[1], n[2] + 0.5 * dt * k1[2]];
            let k2 = deriv(&n2);
            let n3 = [n[0] + 0.5 * dt * k2[0], n[1] + 0.5 * dt * k2[1], n[2] + 0.5 * dt * k2[2]];
            let k3 = deriv(&n3);
            let n4 = [n[0] + dt * k3[0], n[1] + dt * k3[1], n[2] + dt * k3[2]];
            let k4 = deriv(&n4);
            for c in 0..3 {
                n[c] += dt / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
            }
            done += 1;
            samples.push((done as f64 / total_steps as f64, n));
            if vnorm(&n) > BLOWUP_BOUND {
                blew_up = true;
                break 'outer;
            }
        }
    }
    SpinTrajectory { samples, contour: clone_contour(contour), blew_up }
}

fn clone_contour(c: &TimeContour) -> TimeContour {
    TimeContour { total: c.total, waypoints: c.waypoints.clone() }
}

/// The combined symmetry image of a spin component vector:
/// (n_x, n_y, n_z) -> (n_x^*, n_y^*, -n_z^*).
pub fn spin_image_point(n: &SpinVector) -> SpinVector {
    [n[0].conj(), n[1].conj(), -n[2].conj()]
}

/// Image trajectory n_2(t^*) = (n_x^*(-t), n_y^*(-t), -n_z^*(-t)):
/// reversed samples, component map applied, conjugated contour.
pub fn spin_image(traj: &SpinTrajectory) -> SpinTrajectory {
    let nn = traj.samples.len();
    let samples = traj
        .samples
        .iter()
        .rev()
        .enumerate()
        .map(|(k, (_, n))| (k as f64 / (nn - 1) as f64, spin_image_point(n)))
        .collect();
    SpinTrajectory { samples, contour: traj.contour.conj(), blew_up: traj.blew_up }
}

/// Min over continuous cyclic shifts of the max pointwise distance between
/// two closed trajectories on the same uniform grid. Integer scan first,
/// then golden-section refinement of the fractional shift with linear
/// interpolation.
pub fn spin_orbit_distance(a: &SpinTrajectory, b: &SpinTrajectory) -> f64 {
    let n = a.samples.len() - 1;
    assert_eq!(n, b.samples.len() - 1, "matching sample grids required");
    let dist_at = |shift: f64| -> f64 {
        let mut worst = 0.0f64;
        for k in 0..n {
            let pos = (k as f64 + shift).rem_euclid(n as f64);
            let k0 = pos.floor() as usize % n;
            let k1 = (k0 + 1) % n;
            let w = pos - pos.floor();
            let bs = &b.samples;
            let interp = [
                bs[k0].1[0] * (1.0 - w) + bs[k1].1[0] * w,
                bs[k0].1[1] * (1.0 - w) + bs[k1].1[1] * w,
                bs[k0].1[2] * (1.0 - w) + bs[k1].1[2] * w,
            ];
            worst = worst.max(vnorm(&vsub(&a.samples[k].1, &interp)));
        }
        worst
    };
    let mut best = (f64::INFINITY, 0.0f64);
    for s in 0..n {
        let d = dist_at(s as f64);
        if d < best.0 {
            best = (d, s as f64);
        }
    }
    // Golden-section around the best integer shift.
    let (mut lo, mut hi) = (best.1 - 1.0, best.1 + 1.0);
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let (mut f1, mut f2) = (dist_at(x1), dist_at(x2));
    for _ in 0..60 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = dist_at(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = dist_at(x2);
        }
    }
    best.0.min(f1).min(f2)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SpinClass {
    SelfSymmetric,
    PairMember,
    Divergent,
}

/// A closed trajectory either coincides with its own symmetry image
/// (distance below 1e-4 over continuous shifts) or forms a pair with it.
pub fn classify_spin_orbit(traj: &SpinTrajectory) -> SpinClass {
    if traj.blew_up {
        return SpinClass::Divergent;
    }
    let img = spin_image(traj);
    if spin_orbit_distance(traj, &img) < CLASS_TOL {
        SpinClass::SelfSymmetric
    } else {
        SpinClass::PairMember
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SpinAlignment {
    AlignedWithM,
    AlignedWithIM,
    Unaligned,
    Divergent,
}

/// Direction of the period-averaged spin. The average is taken with the
/// physical measure dt / |T| so the imaginary-time contour above the
/// transition contributes its phase: nbar = (T/|T|) * mean over samples.
/// Parallelism to M is the cross-product angle test; the phase of the
/// proportionality factor distinguishes M from iM.
pub fn average_spin_alignment(model: &SpinModel, traj: &SpinTrajectory) -> SpinAlignment {
    if traj.blew_up {
        return SpinAlignment::Divergent;
    }
    let n = traj.samples.len() - 1;
    let mut mean = [c64(0.0, 0.0); 3];
    for (_, v) in &traj.samples[..n] {
        for c in 0..3 {
            mean[c] += v[c];
        }
    }
    let t = traj.contour.total;
    let phase = t / t.norm();
    for c in 0..3 {
        mean[c] *= phase / n as f64;
    }
    let m = model.m();
    let (nm, nn) = (vnorm(&m), vnorm(&mean));
    if nn < 1e-10 * nm {
        return SpinAlignment::Unaligned;
    }
    if vnorm(&cross(&mean, &m)) / (nm * nn) > ANGLE_TOL {
        return SpinAlignment::Unaligned;
    }
    // nbar = lambda M; sesquilinear projection extracts lambda.
    let lambda = (mean[0] * m[0].conj() + mean[1] * m[1].conj() + mean[2] * m[2].conj())
        / c64(nm * nm, 0.0);
    let scale = lambda.norm();
    if lambda.im.abs() <= ANGLE_TOL * scale {
        SpinAlignment::AlignedWithM
    } else if lambda.re.abs() <= ANGLE_TOL * scale {
        SpinAlignment::AlignedWithIM
    } else {
        SpinAlignment::Unaligned
    }
}

/// Generic seed chosen so that the conserved projection n.M / M.M is real
/// on both sides of the transition (n_z purely imaginary does it for
/// M = (t1, 0, i delta1)); the short real-time warm-up moves the start
/// off any special phase of the precession.
pub const SEED: SpinVector = [
    C64 { re: 0.3, im: 0.0 },
    C64 { re: 0.5, im: 0.0 },
    C64 { re: 0.0, im: 0.8 },
];
pub const WARMUP_TIME: f64 = 0.37;

/// One representative closed trajectory at the model's own period.
pub fn representative_trajectory(model: &SpinModel, steps: usize) -> SpinTrajectory {
    let warm = bloch_integrate(model, SEED, &TimeContour::line(c64(WARMUP_TIME, 0.0)), 256);
    let n0 = warm.samples.last().unwrap().1;
    bloch_integrate(model, n0, &TimeContour::line(model.period()), steps)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepRow {
    pub delta1: f64,
    pub e_plus: C64,
    pub e_minus: C64,
    pub alignment: SpinAlignment,
    pub orbit_class: SpinClass,
    pub closure_error: f64,
}

/// Sweep delta1 at fixed t1: eigenvalues plus one representative Bloch
/// trajectory per point. Points inside the exceptional-point guard window
/// are reported Divergent without integration (the period diverges there).
pub fn pt_sweep(t1: f64, delta1_values: &[f64], steps: usize) -> Vec<SweepRow> {
    delta1_values
        .par_iter()
        .map(|&d1| {
            let model = SpinModel::new(t1, d1);
            let (e_plus, e_minus) = analytic_eigenvalues(&model);
            if model.at_transition() {
                return SweepRow {
                    delta1: d1,
                    e_plus,
                    e_minus,
                    alignment: SpinAlignment::Divergent,
                    orbit_class: SpinClass::Divergent,
                    closure_error: f64::INFINITY,
                };
            }
            let traj = representative_trajectory(&model, steps);
            SweepRow {
                delta1: d1,
                e_plus,
                e_minus,
                alignment: average_spin_alignment(&model, &traj),
                orbit_class: classify_spin_orbit(&traj),
                closure_error: traj.closure_error(),
            }
        })
        .collect()
}

/// Closure period measured by scaling the analytic period and minimizing
/// the closure defect (golden section on the scale factor).
pub fn measured_period(model: &SpinModel, steps: usize) -> C64 {
    let t_ref = model.period();
    let warm = bloch_integrate(model, SEED, &TimeContour::line(c64(WARMUP_TIME, 0.0)), 256);
    let n0 = warm.samples.last().unwrap().1;
    let closure = |r: f64| -> f64 {
        bloch_integrate(model, n0, &TimeContour::line(t_ref * r), steps).closure_error()
    };
    let (mut lo, mut hi) = (0.9, 1.1);
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let (mut f1, mut f2) = (closure(x1), closure(x2));
    for _ in 0..80 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = closure(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = closure(x2);
        }
    }
    t_ref * (0.5 * (lo + hi))
}
