//! Plot-ready data emission: CSV for trajectories and tables (column names
//! on a leading comment line), JSON for structured reports. Formatting is
//! fixed-precision so reruns are byte-identical.

use crate::error::Result;
use crate::integrator::{Classification, Orbit, TimeContour};
use crate::quantizer::SpectrumRecord;
use crate::spin::{SpinTrajectory, SweepRow};
use crate::C64;
use serde::Serialize;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

fn fmt(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.12e}")
    } else {
        format!("{x}")
    }
}

/// Complex time at arc-length fraction s along the contour polyline.
pub fn contour_time(contour: &TimeContour, s: f64) -> C64 {
    let mut corners = vec![C64::new(0.0, 0.0)];
    corners.extend_from_slice(&contour.waypoints);
    corners.push(contour.total);
    let lens: Vec<f64> = corners.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
    let total: f64 = lens.iter().sum();
    if total == 0.0 {
        return corners[0];
    }
    let mut remain = s.clamp(0.0, 1.0) * total;
    for (i, &len) in lens.iter().enumerate() {
        if remain <= len || i + 1 == lens.len() {
            let frac = if len > 0.0 { remain / len } else { 0.0 };
            return corners[i] + (corners[i + 1] - corners[i]) * frac.min(1.0);
        }
        remain -= len;
    }
    contour.total
}

pub fn classification_label(c: &Classification) -> String {
    match c {
        Classification::SelfSymmetric => "self_symmetric".into(),
        Classification::PairMember(partner) => format!("pair_member:{partner}"),
        Classification::Unclassified => "unclassified".into(),
    }
}

pub fn write_orbit_csv(path: &Path, orbit: &Orbit) -> Result<()> {
    let mut out = String::new();
    writeln!(out, "# s,t_re,t_im,x_re,x_im,p_re,p_im").unwrap();
    for &(s, z) in &orbit.samples {
        let t = contour_time(&orbit.contour, s);
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            fmt(s),
            fmt(t.re),
            fmt(t.im),
            fmt(z.x.re),
            fmt(z.x.im),
            fmt(z.p.re),
            fmt(z.p.im)
        )
        .unwrap();
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn write_spin_trajectory_csv(path: &Path, traj: &SpinTrajectory) -> Result<()> {
    let mut out = String::new();
    writeln!(out, "# s,t_re,t_im,n_x_re,n_x_im,n_y_re,n_y_im,n_z_re,n_z_im").unwrap();
    for (s, n) in &traj.samples {
        let t = contour_time(&traj.contour, *s);
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            fmt(*s),
            fmt(t.re),
            fmt(t.im),
            fmt(n[0].re),
            fmt(n[0].im),
            fmt(n[1].re),
            fmt(n[1].im),
            fmt(n[2].re),
            fmt(n[2].im)
        )
        .unwrap();
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn write_sweep_csv(path: &Path, rows: &[SweepRow]) -> Result<()> {
    let mut out = String::new();
    writeln!(
        out,
        "# delta1,e_plus_re,e_plus_im,e_minus_re,e_minus_im,alignment,orbit_class,closure_error"
    )
    .unwrap();
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{:?},{:?},{}",
            fmt(r.delta1),
            fmt(r.e_plus.re),
            fmt(r.e_plus.im),
            fmt(r.e_minus.re),
            fmt(r.e_minus.im),
            r.alignment,
            r.orbit_class,
            fmt(r.closure_error)
        )
        .unwrap();
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn write_spectrum_csv(path: &Path, records: &[SpectrumRecord]) -> Result<()> {
    let mut out = String::new();
    writeln!(
        out,
        "# family,n,e_re,e_im,w_residual,class,quantum_re,quantum_im,match_error,crossover,status"
    )
    .unwrap();
    for r in records {
        let (qr, qi) = match r.e_quantum_match {
            Some(q) => (fmt(q.re), fmt(q.im)),
            None => ("".into(), "".into()),
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.family_label,
            r.n,
            fmt(r.e_semiclassical.re),
            fmt(r.e_semiclassical.im),
            fmt(r.w_residual),
            classification_label(&r.orbit_class),
            qr,
            qi,
            r.match_error.map(fmt).unwrap_or_default(),
            r.crossover,
            r.status
        )
        .unwrap();
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn write_quantum_csv(path: &Path, eigs: &[C64]) -> Result<()> {
    let mut out = String::new();
    writeln!(out, "# e_re,e_im").unwrap();
    for e in eigs {
        writeln!(out, "{},{}", fmt(e.re), fmt(e.im)).unwrap();
    }
    fs::write(path, out)?;
    Ok(())
}

/// Pretty JSON with a trailing newline; struct field order fixes the
/// serialization order.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Summary block of a spectrum comparison run.
#[derive(Clone, Debug, Serialize)]
pub struct SpectrumSummary {
    pub model: String,
    pub levels: usize,
    pub matched: usize,
    pub max_match_error: Option<f64>,
    pub median_match_error: Option<f64>,
    pub dichotomy_pass: bool,
    pub dichotomy_exceptions: Vec<String>,
}
