//! Quantization: Newton iteration on the condition W(E) = 2 pi (n + mu),
//! family sweeps with deduplication and crossover flagging, the
//! semiclassical Green's trace, and orbit classification (real level from
//! a self-symmetric orbit, conjugate pair from a symmetric orbit pair).

use crate::action::{self, FamilyKind, OrbitFamily};
use crate::error::{Error, Result};
use crate::integrator::{self, Classification, Orbit, TimeContour};
use crate::models::{ModelSpec, PhasePoint};
use crate::{c64, C64};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Knobs shared by the spectrum pipeline.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuantizerSettings {
    /// Contour quadrature nodes for W(E), T(E).
    pub nodes: usize,
    /// RK4 steps for orbit reconstruction.
    pub steps: usize,
    /// Records closer than this are reported as one degenerate level.
    pub dedup_tol: f64,
    /// Orbit-distance threshold separating SelfSymmetric from PairMember.
    pub classification_tol: f64,
    /// Real/complex transition energies; records within 2% are flagged.
    pub transition_energies: Vec<f64>,
}

impl Default for QuantizerSettings {
    fn default() -> Self {
        QuantizerSettings {
            nodes: 512,
            steps: 2048,
            dedup_tol: 1e-6,
            classification_tol: 1e-4,
            transition_energies: vec![],
        }
    }
}

/// One matched level of the semiclassical spectrum.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectrumRecord {
    pub family_label: String,
    pub n: i64,
    pub e_semiclassical: C64,
    /// |W - 2 pi (n + mu)| at convergence.
    pub w_residual: f64,
    pub orbit_class: Classification,
    pub e_quantum_match: Option<C64>,
    /// |dE| / (1 + |E|) against the matched quantum level.
    pub match_error: Option<f64>,
    /// Within 2% of a real-to-complex transition energy; excluded from the
    /// dichotomy check (the single-family trace form degrades there).
    pub crossover: bool,
    /// Other families that found the same level (degenerate; unclassified).
    pub degenerate_with: Vec<String>,
    /// "converged" or the failure rendered as text (sweeps never abort).
    pub status: String,
}

impl SpectrumRecord {
    pub fn converged(&self) -> bool {
        self.status == "converged"
    }

    pub fn id(&self) -> String {
        format!("{}:{}", self.family_label, self.n)
    }
}

/// Newton solve of W(E) = 2 pi (n + mu) from a seed, returning the level
/// and the residual history (used to verify quadratic convergence).
pub fn quantize_level_with_history(
    model: &ModelSpec,
    family: &OrbitFamily,
    n: i64,
    e_seed: C64,
    settings: &QuantizerSettings,
) -> Result<(C64, Vec<f64>)> {
    let target = 2.0 * PI * (n as f64 + family.mu);
    let mut e = e_seed;
    let mut history = Vec::new();
    for _ in 0..50 {
        let (w, t) = action::action_period(model, family, e, settings.nodes)?;
        let res = (w - target).norm();
        history.push(res);
        if res < 1e-10 {
            return Ok((e, history));
        }
        if t.norm() == 0.0 {
            break;
        }
        e += (target - w) / t;
        if !e.re.is_finite() || !e.im.is_finite() {
            break;
        }
        if !family.window.contains(e) {
            return Err(Error::LeftValidityWindow {
                n,
                e,
                re_lo: family.window.re[0],
                re_hi: family.window.re[1],
                im_lo: family.window.im[0],
                im_hi: family.window.im[1],
            });
        }
    }
    let last = history.last().copied().unwrap_or(f64::NAN);
    Err(Error::NoConvergence { n, last_e: e, residual: last })
}

/// Coarse grid scan of |W(E) - 2 pi (n + mu)| over the family window,
/// used to seed the first levels of a family.
fn scan_seed(model: &ModelSpec, family: &OrbitFamily, n: i64, settings: &QuantizerSettings) -> C64 {
    let target = 2.0 * PI * (n as f64 + family.mu);
    let (re_lo, re_hi) = (family.window.re[0], family.window.re[1]);
    let (im_lo, im_hi) = (family.window.im[0], family.window.im[1]);
    let nre = 48;
    let nim = if (im_hi - im_lo).abs() < 1e-12 { 1 } else { 16 };
    let mut best = c64(0.5 * (re_lo + re_hi), 0.5 * (im_lo + im_hi));
    let mut best_res = f64::INFINITY;
    for i in 0..nre {
        let re = re_lo + (i as f64 + 0.5) * (re_hi - re_lo) / nre as f64;
        for j in 0..nim {
            let im = if nim == 1 {
                im_lo
            } else {
                im_lo + (j as f64 + 0.5) * (im_hi - im_lo) / nim as f64
            };
            let e = c64(re, im);
            if let Ok(w) = action::action(model, family, e, settings.nodes) {
                let r = (w - target).norm();
                if r < best_res {
                    best_res = r;
                    best = e;
                }
            }
        }
    }
    best
}

/// Seeds for level n: linear extrapolation from the previous two levels of
/// the family, falling back to the window scan for the first two.
fn seed_for(
    model: &ModelSpec,
    family: &OrbitFamily,
    n: i64,
    found: &[(i64, C64)],
    settings: &QuantizerSettings,
) -> C64 {
    match found.len() {
        0 => scan_seed(model, family, n, settings),
        1 => {
            let (n0, e0) = found[0];
            if n == n0 + 1 {
                // Nudge upward along the local level spacing estimate.
                e0 + c64(0.1 * (1.0 + e0.norm()), 0.0)
            } else {
                scan_seed(model, family, n, settings)
            }
        }
        _ => {
            let (n1, e1) = found[found.len() - 2];
            let (n2, e2) = found[found.len() - 1];
            if n2 != n1 && n == n2 + 1 {
                e2 + (e2 - e1) / ((n2 - n1) as f64)
            } else {
                scan_seed(model, family, n, settings)
            }
        }
    }
}

/// Build the periodic orbit of a converged record by integrating the
/// canonical equations at (E, T = period(E)) from a point on the family's
/// contour.
pub fn build_orbit(
    model: &ModelSpec,
    family: &OrbitFamily,
    e: C64,
    settings: &QuantizerSettings,
) -> Result<Orbit> {
    let (_, t) = action::action_period(model, family, e, settings.nodes)?;
    let z0 = match family.kind {
        FamilyKind::Librational { selector } => {
            let (x1, x2) = match *model {
                ModelSpec::H1 { v0, .. } => (-e / v0, e / v0),
                _ => {
                    let (a, b, _) = action::select_turning_pair(model, selector, e)?;
                    (a, b)
                }
            };
            let x0 = 0.5 * (x1 + x2);
            let p0 = model.momentum_branches(x0, e)?[0];
            PhasePoint::new(x0, p0)
        }
        FamilyKind::Traversing { direction } => {
            let x0 = c64(0.0, 0.0);
            let p0 = *model
                .momentum_branches(x0, e)?
                .iter()
                .find(|&&b| {
                    let (_, hp) = model.gradient(PhasePoint::new(x0, b));
                    (direction as f64) * hp.re > 0.0
                })
                .ok_or(Error::TurningPointOnPath { point: x0, dist: 0.0 })?;
            PhasePoint::new(x0, p0)
        }
    };
    let mut orbit = integrator::integrate(model, z0, &TimeContour::line(t), settings.steps)?;
    orbit.energy = e;
    orbit.family_label = family.label.clone();
    orbit.action = Some(integrator::orbit_action(model, &orbit));
    Ok(orbit)
}

/// Classify a record's orbit: self-symmetric (distance of orbit to its own
/// symmetry image below tolerance) or a member of a conjugate pair
/// (image matches a sibling record's orbit).
pub fn classify_orbit(
    model: &ModelSpec,
    families: &[OrbitFamily],
    records: &[SpectrumRecord],
    idx: usize,
    settings: &QuantizerSettings,
) -> Result<Classification> {
    let rec = &records[idx];
    let family = families
        .iter()
        .find(|f| f.label == rec.family_label)
        .ok_or_else(|| Error::Config(format!("unknown family {}", rec.family_label)))?;
    let orbit = build_orbit(model, family, rec.e_semiclassical, settings)?;
    let image = integrator::orbit_image(model, &orbit);
    let d_self = integrator::orbit_distance(&orbit, &image)?;
    if d_self < settings.classification_tol {
        return Ok(Classification::SelfSymmetric);
    }
    // Search siblings at the conjugate energy.
    let mut closest = d_self;
    for (j, sib) in records.iter().enumerate() {
        if j == idx || !sib.converged() {
            continue;
        }
        if (sib.e_semiclassical - rec.e_semiclassical.conj()).norm()
            > 1e-8 * (1.0 + rec.e_semiclassical.norm())
        {
            continue;
        }
        let sib_family = families.iter().find(|f| f.label == sib.family_label);
        let Some(sib_family) = sib_family else { continue };
        let sib_orbit = build_orbit(model, sib_family, sib.e_semiclassical, settings)?;
        let d = integrator::orbit_distance(&image, &sib_orbit)?;
        closest = closest.min(d);
        if d < settings.classification_tol {
            return Ok(Classification::PairMember(sib.id()));
        }
        // Orientation of the sibling's parameterization may be reversed
        // relative to the image; compare against the reversed samples too.
        let mut rev = sib_orbit.clone();
        rev.samples.reverse();
        for (k, s) in rev.samples.iter_mut().enumerate() {
            s.0 = k as f64 / (settings.steps as f64);
        }
        let d_rev = integrator::orbit_distance(&image, &rev)?;
        closest = closest.min(d_rev);
        if d_rev < settings.classification_tol {
            return Ok(Classification::PairMember(sib.id()));
        }
    }
    Err(Error::UnpairedAsymmetricOrbit { e: rec.e_semiclassical, closest })
}

/// Run the full family grid: quantize, deduplicate, flag crossovers,
/// classify. Per-level failures become record statuses; the sweep never
/// aborts. Records are sorted by (Re E, Im E).
pub fn semiclassical_spectrum(
    model: &ModelSpec,
    families: &[OrbitFamily],
    settings: &QuantizerSettings,
) -> Vec<SpectrumRecord> {
    // Quantize family-by-family (seeding is sequential within a family,
    // families are independent tasks).
    let mut records: Vec<SpectrumRecord> = families
        .par_iter()
        .flat_map(|family| {
            let mut found: Vec<(i64, C64)> = Vec::new();
            let mut recs = Vec::new();
            for n in family.n_min..=family.n_max {
                let seed = seed_for(model, family, n, &found, settings);
                let rec = match quantize_level_with_history(model, family, n, seed, settings) {
                    Ok((e, history)) => {
                        found.push((n, e));
                        SpectrumRecord {
                            family_label: family.label.clone(),
                            n,
                            e_semiclassical: e,
                            w_residual: *history.last().unwrap(),
                            orbit_class: Classification::Unclassified,
                            e_quantum_match: None,
                            match_error: None,
                            crossover: false,
                            degenerate_with: vec![],
                            status: "converged".into(),
                        }
                    }
                    Err(err) => SpectrumRecord {
                        family_label: family.label.clone(),
                        n,
                        e_semiclassical: c64(f64::NAN, f64::NAN),
                        w_residual: f64::NAN,
                        orbit_class: Classification::Unclassified,
                        e_quantum_match: None,
                        match_error: None,
                        crossover: false,
                        degenerate_with: vec![],
                        status: err.to_string(),
                    },
                };
                recs.push(rec);
            }
            recs
        })
        .collect();

    // Deduplicate: keep the first record of each cluster, tag the others'
    // families on it. The dichotomy statement covers nondegenerate levels,
    // so degenerate clusters stay unclassified.
    let mut keep = vec![true; records.len()];
    for i in 0..records.len() {
        if !keep[i] || !records[i].converged() {
            continue;
        }
        for j in i + 1..records.len() {
            if !keep[j] || !records[j].converged() {
                continue;
            }
            if (records[i].e_semiclassical - records[j].e_semiclassical).norm() < settings.dedup_tol {
                keep[j] = false;
                let label = records[j].family_label.clone();
                records[i].degenerate_with.push(label);
            }
        }
    }
    let mut records: Vec<SpectrumRecord> =
        records.into_iter().zip(keep).filter_map(|(r, k)| k.then_some(r)).collect();

    // Crossover flags.
    for rec in records.iter_mut() {
        if !rec.converged() {
            continue;
        }
        rec.crossover = settings.transition_energies.iter().any(|&ec| {
            (rec.e_semiclassical - c64(ec, 0.0)).norm() / (1.0 + ec.abs()) < 0.02
        });
    }

    // Classification pass (single-threaded reduction over immutable data).
    let classes: Vec<Option<Classification>> = (0..records.len())
        .map(|i| {
            if !records[i].converged() || !records[i].degenerate_with.is_empty() {
                return None;
            }
            // A failed classification leaves the record Unclassified, which
            // the dichotomy check counts as an exception (data-quality
            // failure rather than a crash).
            classify_orbit(model, families, &records, i, settings).ok()
        })
        .collect();
    for (rec, class) in records.iter_mut().zip(classes) {
        if let Some(c) = class {
            rec.orbit_class = c;
        }
    }

    records.sort_by(|a, b| {
        a.e_semiclassical
            .re
            .total_cmp(&b.e_semiclassical.re)
            .then(a.e_semiclassical.im.total_cmp(&b.e_semiclassical.im))
    });
    records
}

/// The semiclassical Green's trace
/// G(E) = i T e^{i(W - 2 pi mu)} / (1 - e^{i(W - 2 pi mu)}).
pub fn greens_trace(
    model: &ModelSpec,
    family: &OrbitFamily,
    e: C64,
    settings: &QuantizerSettings,
) -> Result<C64> {
    let (w, t) = action::action_period(model, family, e, settings.nodes)?;
    let phase = (c64(0.0, 1.0) * (w - 2.0 * PI * family.mu)).exp();
    let denom = c64(1.0, 0.0) - phase;
    if denom.norm() < 1e-12 {
        return Err(Error::PoleProximity { e, dist: denom.norm() });
    }
    Ok(c64(0.0, 1.0) * t * phase / denom)
}
