//! Full invariant suite: classical symmetry identities, quadrature and
//! derivative cross-checks, conjugation pairing between families, quantum
//! matrix residuals, the spectral dichotomy, and the quantum-semiclassical
//! match with a Maslov-parameter diagnosis for out-of-tolerance families.

use crate::action::{self, OrbitFamily};
use crate::config::{ExperimentConfig, ModelConfig};
use crate::error::Result;
use crate::integrator::Classification;
use crate::models::{ModelSpec, PhasePoint};
use crate::quantizer::{self, QuantizerSettings, SpectrumRecord};
use crate::quantum::{self, QuantumOperator};
use crate::spin::{self, SpinAlignment, SpinClass, SpinModel};
use crate::{c64, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;

const RNG_SEED: u64 = 0x6f72_6269_7472_6163;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Worst observed value.
    pub value: f64,
    pub bound: f64,
    pub detail: String,
}

impl Check {
    fn new(name: &str, value: f64, bound: f64, detail: String) -> Self {
        Check { name: name.into(), passed: value.is_finite() && value <= bound, value, bound, detail }
    }

    fn fail(name: &str, detail: String) -> Self {
        Check { name: name.into(), passed: false, value: f64::INFINITY, bound: 0.0, detail }
    }

    fn pass(name: &str, detail: String) -> Self {
        Check { name: name.into(), passed: true, value: 0.0, bound: 0.0, detail }
    }
}

/// Localization of a quantum-semiclassical mismatch: refitting the Maslov
/// parameter against the matched quantum levels separates "wrong mu"
/// (tight refit away from the configured value) from an intrinsic
/// semiclassical error (scattered refit).
#[derive(Clone, Debug, Serialize)]
pub struct MuDiagnostic {
    pub family: String,
    pub mu_configured: f64,
    pub mu_refit_mean: f64,
    pub mu_refit_spread: f64,
    pub worst_match_error: f64,
    pub expected_accuracy: f64,
    pub verdict: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub model: String,
    pub checks: Vec<Check>,
    pub mu_diagnostics: Vec<MuDiagnostic>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("verify: model {}\n", self.model));
        for c in &self.checks {
            let status = if c.passed { "pass" } else { "FAIL" };
            out.push_str(&format!(
                "  [{status}] {:<42} value {:.3e}  bound {:.3e}  {}\n",
                c.name, c.value, c.bound, c.detail
            ));
        }
        for d in &self.mu_diagnostics {
            out.push_str(&format!(
                "  [mu] family {:<18} configured {:.3}  refit {:.4} +- {:.4}  worst error {:.2e} (expected {:.2e}): {}\n",
                d.family,
                d.mu_configured,
                d.mu_refit_mean,
                d.mu_refit_spread,
                d.worst_match_error,
                d.expected_accuracy,
                d.verdict
            ));
        }
        let overall = if self.passed() { "pass" } else { "FAIL" };
        out.push_str(&format!("verify: overall {overall}\n"));
        out
    }
}

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(RNG_SEED)
}

/// Random phase point with |x|, |p| <= 5, keeping Re x away from the
/// potential cusp for the piecewise model.
fn random_point(rng: &mut ChaCha8Rng, model: &ModelSpec) -> PhasePoint {
    loop {
        let z = PhasePoint::new(
            c64(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)),
            c64(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)),
        );
        if matches!(model, ModelSpec::H1 { .. }) && z.x.re.abs() < 0.05 {
            continue;
        }
        return z;
    }
}

// ---------------------------------------------------------------------------
// Classical identity checks
// ---------------------------------------------------------------------------

/// H(image(z)) = conj(H(z)) at random points.
pub fn check_symmetry_identity(model: &ModelSpec, points: usize) -> Check {
    let mut rng = rng();
    let mut worst = 0.0f64;
    for _ in 0..points {
        let z = random_point(&mut rng, model);
        worst = worst.max(model.symmetry_residual(z));
    }
    Check::new(
        "classical symmetry identity",
        worst,
        1e-12,
        format!("{points} random points"),
    )
}

/// Analytic gradient vs central finite differences.
pub fn check_gradient(model: &ModelSpec) -> Check {
    let mut rng = rng();
    let mut worst = 0.0f64;
    let h = 1e-5;
    for _ in 0..200 {
        let z = random_point(&mut rng, model);
        if matches!(model, ModelSpec::H1 { .. }) && z.x.re.abs() < 10.0 * h {
            continue;
        }
        let (hx, hp) = model.gradient(z);
        let fx = (model.hamiltonian(PhasePoint::new(z.x + h, z.p))
            - model.hamiltonian(PhasePoint::new(z.x - h, z.p)))
            / (2.0 * h);
        let fp = (model.hamiltonian(PhasePoint::new(z.x, z.p + h))
            - model.hamiltonian(PhasePoint::new(z.x, z.p - h)))
            / (2.0 * h);
        let scale = 1.0 + hx.norm().max(hp.norm());
        worst = worst.max(((hx - fx).norm().max((hp - fp).norm())) / scale);
    }
    Check::new("gradient vs finite differences", worst, 1e-7, "200 random points".into())
}

/// H(x, p_branch(x; E)) = E for every returned branch.
pub fn check_momentum_branches(model: &ModelSpec, e: C64) -> Check {
    let mut rng = rng();
    let mut worst = 0.0f64;
    let mut tested = 0;
    for _ in 0..100 {
        let z = random_point(&mut rng, model);
        let Ok(branches) = model.momentum_branches(z.x, e) else { continue };
        for p in branches {
            let res = (model.hamiltonian(PhasePoint::new(z.x, p)) - e).norm();
            worst = worst.max(res / (1.0 + e.norm()));
            tested += 1;
        }
    }
    Check::new(
        "momentum branch residual",
        worst,
        1e-9,
        format!("{tested} branch evaluations at E={e}"),
    )
}

fn stationary_momenta(model: &ModelSpec) -> Vec<C64> {
    match *model {
        ModelSpec::HarmonicOscillator { .. } | ModelSpec::H3 { .. } => vec![c64(0.0, 0.0)],
        ModelSpec::H1 { gamma, .. } => vec![c64(0.0, -gamma)],
        ModelSpec::H2 { t0, delta, .. } => {
            // dH/dp = 0 at tan p = i delta / t0, two stationary sheets.
            let p0 = (c64(0.0, delta) / t0).atan();
            vec![p0, p0 + PI]
        }
    }
}

/// Turning points satisfy H(x_t, p_s) = E at a stationary momentum.
pub fn check_turning_points(model: &ModelSpec, e: C64) -> Check {
    let stat = stationary_momenta(model);
    match model.turning_points(e) {
        Err(err) => Check::fail("turning point residual", format!("{err}")),
        Ok(roots) => {
            let mut worst = 0.0f64;
            for x in &roots {
                let res = stat
                    .iter()
                    .map(|&p| (model.hamiltonian(PhasePoint::new(*x, p)) - e).norm())
                    .fold(f64::INFINITY, f64::min);
                worst = worst.max(res / (1.0 + e.norm()));
            }
            Check::new(
                "turning point residual",
                worst,
                1e-8,
                format!("{} roots at E={e}", roots.len()),
            )
        }
    }
}

// ---------------------------------------------------------------------------
// Action module checks
// ---------------------------------------------------------------------------

/// Representative energies inside a family's validity window, inset from
/// the edges, with the imaginary part at the window center.
fn sample_energies(family: &OrbitFamily, count: usize) -> Vec<C64> {
    let [lo, hi] = family.window.re;
    let im = 0.5 * (family.window.im[0] + family.window.im[1]);
    (0..count)
        .map(|k| {
            let f = (k as f64 + 0.5) / count as f64;
            c64(lo + (0.15 + 0.7 * f) * (hi - lo), im)
        })
        .collect()
}

/// Probe energies where the family's quadrature actually evaluates. A
/// synthetic probe can land in the narrow band where an excluded turning
/// point crosses the contour (a reported, recoverable condition), so those
/// are dropped; at least `min_ok` usable energies are required.
fn usable_energies(
    model: &ModelSpec,
    family: &OrbitFamily,
    count: usize,
    min_ok: usize,
    nodes: usize,
) -> std::result::Result<Vec<C64>, String> {
    let usable: Vec<C64> = sample_energies(family, count)
        .into_iter()
        .filter(|&e| action::action(model, family, e, nodes).is_ok())
        .collect();
    if usable.len() < min_ok {
        Err(format!(
            "family {}: only {} of {count} probe energies evaluate",
            family.label,
            usable.len()
        ))
    } else {
        Ok(usable)
    }
}

/// Doubling the contour nodes changes W by < 1e-10 (relative).
pub fn check_quadrature_doubling(
    model: &ModelSpec,
    families: &[OrbitFamily],
    nodes: usize,
) -> Check {
    let mut worst = 0.0f64;
    for family in families {
        let energies = match usable_energies(model, family, 4, 3, nodes) {
            Ok(es) => es,
            Err(msg) => return Check::fail("quadrature node doubling", msg),
        };
        for e in energies {
            match (
                action::action(model, family, e, nodes),
                action::action(model, family, e, 2 * nodes),
            ) {
                (Ok(w1), Ok(w2)) => {
                    worst = worst.max((w1 - w2).norm() / (1.0 + w1.norm()));
                }
                (Err(err), _) | (_, Err(err)) => {
                    return Check::fail(
                        "quadrature node doubling",
                        format!("family {} at E={e}: {err}", family.label),
                    )
                }
            }
        }
    }
    Check::new(
        "quadrature node doubling",
        worst,
        1e-10,
        format!("{} families", families.len()),
    )
}

/// T(E) = dW/dE, finite-difference cross-check.
pub fn check_dw_de(model: &ModelSpec, families: &[OrbitFamily], nodes: usize) -> Check {
    let mut worst = 0.0f64;
    for family in families {
        let energies = match usable_energies(model, family, 7, 3, nodes) {
            Ok(es) => es,
            Err(msg) => return Check::fail("dW/dE vs period", msg),
        };
        for e in energies {
            let h = 1e-5 * (1.0 + e.norm());
            let vals = (
                action::action(model, family, e + h, nodes),
                action::action(model, family, e - h, nodes),
                action::period(model, family, e, nodes),
            );
            let (Ok(wp), Ok(wm), Ok(t)) = vals else {
                // The FD stencil straddles the same reported band.
                continue;
            };
            let fd = (wp - wm) / (2.0 * h);
            worst = worst.max((fd - t).norm() / t.norm());
        }
    }
    Check::new("dW/dE vs period", worst, 1e-6, "up to 7 energies per family".into())
}

/// Partner family under the symmetry: left/right wells swap, traversing
/// directions swap, everything else is its own image.
pub fn partner_label(label: &str) -> String {
    if label.contains("left") {
        label.replace("left", "right")
    } else if label.contains("right") {
        label.replace("right", "left")
    } else if let Some(stem) = label.strip_suffix('+') {
        format!("{stem}-")
    } else if let Some(stem) = label.strip_suffix('-') {
        format!("{stem}+")
    } else {
        label.to_string()
    }
}

/// Action and period conjugation between image families:
/// W_partner(E*) = conj(W(E)) and T_partner(E*) = conj(T(E)).
pub fn check_pair_conjugation(
    model: &ModelSpec,
    families: &[OrbitFamily],
    nodes: usize,
    energies: usize,
) -> Vec<Check> {
    let mut checks = Vec::new();
    for family in families {
        let partner_name = partner_label(&family.label);
        let Some(partner) = families.iter().find(|f| f.label == partner_name) else {
            checks.push(Check::fail(
                &format!("conjugation pairing [{}]", family.label),
                format!("partner family {partner_name} not configured"),
            ));
            continue;
        };
        let mut worst_w = 0.0f64;
        let mut worst_t = 0.0f64;
        let mut used = 0;
        for e in sample_energies(family, energies) {
            let vals = (
                action::action(model, family, e, nodes),
                action::period(model, family, e, nodes),
                action::action(model, partner, e.conj(), nodes),
                action::period(model, partner, e.conj(), nodes),
            );
            let (Ok(w1), Ok(t1), Ok(w2), Ok(t2)) = vals else { continue };
            worst_w = worst_w.max((w2 - w1.conj()).norm() / (1.0 + w1.norm()));
            worst_t = worst_t.max((t2 - t1.conj()).norm() / (1.0 + t1.norm()));
            used += 1;
        }
        let name = format!("conjugation pairing [{} <-> {}]", family.label, partner_name);
        checks.push(if used * 2 >= energies {
            Check::new(&name, worst_w.max(worst_t), 1e-8, format!("{used} of {energies} energies"))
        } else {
            Check::fail(&name, format!("only {used} of {energies} probe energies evaluate"))
        });
    }
    checks
}

// ---------------------------------------------------------------------------
// Quantum matrix checks
// ---------------------------------------------------------------------------

pub fn check_quantum_residuals(op: &QuantumOperator, eigs: &[C64]) -> Vec<Check> {
    let mut checks = Vec::new();
    checks.push(Check::new(
        "matrix pseudo-Hermiticity residual",
        op.phs_residual(),
        1e-12,
        format!("dim {}", op.dim),
    ));
    checks.push(Check::new(
        "spectrum conjugation closure",
        quantum::conjugation_closure(eigs),
        1e-8,
        format!("{} eigenvalues", eigs.len()),
    ));
    checks.push(Check::new(
        "eta condition number",
        op.eta_condition(),
        1.0 + 1e-10,
        "permutation metric".into(),
    ));
    checks
}

pub fn check_propagator(op: &QuantumOperator, times: &[C64]) -> Check {
    let mut worst = 0.0f64;
    for &t in times {
        match op.propagator_residual(t) {
            Ok(r) => worst = worst.max(r),
            Err(err) => return Check::fail("propagator symmetry residual", format!("{err}")),
        }
    }
    Check::new(
        "propagator symmetry residual",
        worst,
        1e-10,
        format!("{} complex times, dim {}", times.len(), op.dim),
    )
}

// ---------------------------------------------------------------------------
// Spectrum-level checks
// ---------------------------------------------------------------------------

/// Dichotomy: every converged, non-crossover, non-degenerate level is
/// real-and-self-symmetric or a conjugate pair member. Returns the check
/// and the offending record ids.
pub fn check_dichotomy(records: &[SpectrumRecord]) -> (Check, Vec<String>) {
    let mut exceptions = Vec::new();
    let mut considered = 0;
    for rec in records {
        if !rec.converged() || rec.crossover || !rec.degenerate_with.is_empty() {
            continue;
        }
        considered += 1;
        let e = rec.e_semiclassical;
        match &rec.orbit_class {
            Classification::SelfSymmetric => {
                if e.im.abs() >= 1e-8 {
                    exceptions.push(format!("{}: self-symmetric with Im E = {:.3e}", rec.id(), e.im));
                }
            }
            Classification::PairMember(partner_id) => {
                let partner = records.iter().find(|r| &r.id() == partner_id);
                match partner {
                    Some(p)
                        if (p.e_semiclassical - e.conj()).norm() < 1e-8 * (1.0 + e.norm()) => {}
                    Some(p) => exceptions.push(format!(
                        "{}: partner {} at {} is not the conjugate of {}",
                        rec.id(),
                        partner_id,
                        p.e_semiclassical,
                        e
                    )),
                    None => exceptions
                        .push(format!("{}: partner {} missing from spectrum", rec.id(), partner_id)),
                }
            }
            Classification::Unclassified => {
                exceptions.push(format!("{}: unclassified (status: {})", rec.id(), rec.status))
            }
        }
    }
    let check = Check::new(
        "spectral dichotomy",
        exceptions.len() as f64,
        0.0,
        format!("{considered} levels considered, {} exceptions", exceptions.len()),
    );
    (check, exceptions)
}

/// Per-family match accuracy against the quantum oracle, with the Maslov
/// refit mu_hat(n) = W(E_quantum)/(2 pi) - n for every matched level.
pub fn check_family_accuracy(
    model: &ModelSpec,
    families: &[OrbitFamily],
    records: &[SpectrumRecord],
    settings: &QuantizerSettings,
) -> (Vec<Check>, Vec<MuDiagnostic>) {
    let mut checks = Vec::new();
    let mut diagnostics = Vec::new();
    for family in families {
        let matched: Vec<&SpectrumRecord> = records
            .iter()
            .filter(|r| r.family_label == family.label && r.converged() && r.match_error.is_some())
            .collect();
        if matched.is_empty() {
            checks.push(Check::fail(
                &format!("oracle match [{}]", family.label),
                "no matched levels".into(),
            ));
            continue;
        }
        let worst = matched.iter().filter_map(|r| r.match_error).fold(0.0f64, f64::max);
        checks.push(Check::new(
            &format!("oracle match [{}]", family.label),
            worst,
            family.expected_accuracy,
            format!("{} matched levels", matched.len()),
        ));

        // Maslov refit against the quantum energies.
        let mut hats = Vec::new();
        for rec in &matched {
            let Some(eq) = rec.e_quantum_match else { continue };
            if let Ok(w) = action::action(model, family, eq, settings.nodes) {
                hats.push(w.re / (2.0 * PI) - rec.n as f64);
            }
        }
        if hats.len() >= 2 {
            let mean = hats.iter().sum::<f64>() / hats.len() as f64;
            let spread = hats
                .iter()
                .map(|h| (h - mean).abs())
                .fold(0.0f64, f64::max);
            let verdict = if worst <= family.expected_accuracy {
                "within expected accuracy".to_string()
            } else if spread < 0.02 {
                format!("tight refit at mu = {mean:.4}; configured mu = {} is off", family.mu)
            } else {
                "refit scatters: intrinsic semiclassical error, not a mu offset".to_string()
            };
            diagnostics.push(MuDiagnostic {
                family: family.label.clone(),
                mu_configured: family.mu,
                mu_refit_mean: mean,
                mu_refit_spread: spread,
                worst_match_error: worst,
                expected_accuracy: family.expected_accuracy,
                verdict,
            });
        }
    }
    (checks, diagnostics)
}

// ---------------------------------------------------------------------------
// Spin checks
// ---------------------------------------------------------------------------

pub fn spin_checks(t1: f64, sweep: &crate::config::SpinSweepConfig) -> Vec<Check> {
    let mut checks = Vec::new();
    let values = sweep.values();

    // Analytic eigenvalues vs the in-house eigensolver on the 2x2 matrix
    // H = (1/2) (t1 sigma_x + i delta1 sigma_z).
    let mut worst = 0.0f64;
    for &d1 in &values {
        let (ep, em) = spin::analytic_eigenvalues(&SpinModel::new(t1, d1));
        let h = crate::linalg::CMatrix::from_rows(&[
            vec![c64(0.0, 0.5 * d1), c64(0.5 * t1, 0.0)],
            vec![c64(0.5 * t1, 0.0), c64(0.0, -0.5 * d1)],
        ]);
        match crate::linalg::eigenvalues(&h) {
            Ok(eigs) => {
                for e in [ep, em] {
                    let d = eigs.iter().map(|&q| (q - e).norm()).fold(f64::INFINITY, f64::min);
                    worst = worst.max(d);
                }
            }
            Err(err) => {
                checks.push(Check::fail("two-level eigenvalue formula", format!("{err}")));
                return checks;
            }
        }
    }
    checks.push(Check::new(
        "two-level eigenvalue formula",
        worst,
        1e-12,
        format!("{} sweep points", values.len()),
    ));

    // Casimir conservation and period closure away from the transition.
    let mut worst_casimir = 0.0f64;
    let mut worst_period = 0.0f64;
    for &d1 in &[0.5, 1.0, 1.5, 2.5, 3.0, 4.0] {
        let model = SpinModel::new(t1, d1);
        let traj = spin::representative_trajectory(&model, sweep.steps);
        worst_casimir = worst_casimir.max(traj.casimir_drift());
        let measured = spin::measured_period(&model, sweep.steps);
        worst_period =
            worst_period.max((measured - model.period()).norm() / model.period().norm());
    }
    checks.push(Check::new("spin Casimir conservation", worst_casimir, 1e-8, "6 models".into()));
    checks.push(Check::new("spin precession period", worst_period, 1e-6, "6 models".into()));

    // Sweep dichotomy: spectrum reality matches orbit class on both sides.
    let rows = spin::pt_sweep(t1, &values, sweep.steps);
    let mut bad = Vec::new();
    for row in &rows {
        if row.orbit_class == SpinClass::Divergent {
            continue;
        }
        let real_spectrum = row.e_plus.im.abs() < 1e-12;
        let self_symmetric = row.orbit_class == SpinClass::SelfSymmetric;
        if real_spectrum != self_symmetric {
            bad.push(format!("delta1={}: {:?} vs Im E={:.2e}", row.delta1, row.orbit_class, row.e_plus.im));
        }
        let expect_aligned = if real_spectrum {
            SpinAlignment::AlignedWithM
        } else {
            SpinAlignment::AlignedWithIM
        };
        if row.alignment != expect_aligned {
            bad.push(format!("delta1={}: alignment {:?}", row.delta1, row.alignment));
        }
    }
    if bad.is_empty() {
        checks.push(Check::pass(
            "spin sweep dichotomy and alignment",
            format!("{} rows", rows.len()),
        ));
    } else {
        checks.push(Check::fail("spin sweep dichotomy and alignment", bad.join("; ")));
    }
    checks
}

// ---------------------------------------------------------------------------
// Orchestration
// ---------------------------------------------------------------------------

/// Build the quantum operator for a configured model.
pub fn build_operator(cfg: &ExperimentConfig) -> Option<QuantumOperator> {
    let d = &cfg.discretization;
    match cfg.model {
        ModelConfig::HarmonicOscillator { omega } => {
            Some(quantum::build_ho(omega, d.x_half, d.n))
        }
        ModelConfig::H1 { gamma, v0, l } => Some(quantum::build_h1(gamma, v0, l, d.n)),
        ModelConfig::H2 { t0, delta, q, l, p_y } => Some(quantum::build_h2(t0, delta, q, l, p_y)),
        ModelConfig::H3 { g, a, gam } => Some(quantum::build_h3(g, a, gam, d.x_half, d.n)),
        ModelConfig::Spin { .. } => None,
    }
}

/// Semiclassical spectrum, quantum eigenvalues, and the match, as one call
/// (the shared pipeline behind spectrum and verify).
pub fn matched_spectrum(
    cfg: &ExperimentConfig,
) -> Result<(Vec<SpectrumRecord>, Vec<C64>, Vec<C64>)> {
    let model = cfg
        .model
        .to_spec()
        .ok_or_else(|| crate::Error::Config("spectrum requires a phase-space model".into()))?;
    let settings = cfg.quantizer_settings();
    let mut records = quantizer::semiclassical_spectrum(&model, &cfg.families, &settings);
    let op = build_operator(cfg).expect("phase-space model has an operator");
    let eigs = op.eigenvalues()?;
    let unmatched = quantum::match_spectra(&eigs, &mut records);
    Ok((records, eigs, unmatched))
}

/// The full suite for one config. Every failure is a named check in the
/// report; the caller maps `passed()` to the exit code.
pub fn run_verify(cfg: &ExperimentConfig) -> Result<VerifyReport> {
    cfg.validate()?;
    if let ModelConfig::Spin { t1 } = cfg.model {
        return Ok(VerifyReport {
            model: "spin".into(),
            checks: spin_checks(t1, &cfg.spin),
            mu_diagnostics: vec![],
        });
    }

    let model = cfg.model.to_spec().expect("phase-space model");
    let settings = cfg.quantizer_settings();
    let mut checks = Vec::new();

    checks.push(check_symmetry_identity(&model, 1000));
    checks.push(check_gradient(&model));
    let e_probe = match cfg.families.first() {
        Some(f) => sample_energies(f, 1)[0],
        None => c64(1.0, 0.0),
    };
    checks.push(check_momentum_branches(&model, e_probe));
    checks.push(check_turning_points(&model, e_probe));

    if !cfg.families.is_empty() {
        checks.push(check_quadrature_doubling(&model, &cfg.families, settings.nodes));
        checks.push(check_dw_de(&model, &cfg.families, settings.nodes));
        checks.extend(check_pair_conjugation(&model, &cfg.families, settings.nodes, 20));
    }

    let op = build_operator(cfg).expect("phase-space model");
    let (records, eigs, _unmatched) = matched_spectrum(cfg)?;
    checks.extend(check_quantum_residuals(&op, &eigs));

    if !cfg.families.is_empty() {
        let (dich, _) = check_dichotomy(&records);
        checks.push(dich);
        let (acc, diags) = check_family_accuracy(&model, &cfg.families, &records, &settings);
        checks.extend(acc);
        return Ok(VerifyReport {
            model: format!("{:?}", model.id()),
            checks,
            mu_diagnostics: diags,
        });
    }
    Ok(VerifyReport { model: format!("{:?}", model.id()), checks, mu_diagnostics: vec![] })
}
