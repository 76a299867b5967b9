//! End-to-end spectra: dense eigenvalues of the discretized operators,
//! semiclassical quantization of the shipped orbit families, the matching
//! between the two, and the real-vs-paired dichotomy.
//!
//! Reference numbers are frozen from an independent prototype run of the
//! same discretizations and quantization conditions.

use orbitrace::config::ExperimentConfig;
use orbitrace::integrator::Classification;
use orbitrace::quantizer::{self, SpectrumRecord};
use orbitrace::{c64, quantum, verify, C64};
use std::path::PathBuf;

fn config(name: &str) -> ExperimentConfig {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    ExperimentConfig::load(&path).unwrap()
}

/// Every expected value must appear in the spectrum within tol.
fn assert_contains(eigs: &[C64], expected: &[C64], tol: f64, what: &str) {
    for &e in expected {
        let best = eigs.iter().map(|&q| (q - e).norm()).fold(f64::INFINITY, f64::min);
        assert!(best < tol, "{what}: no eigenvalue near {e} (closest at distance {best:.3e})");
    }
}

fn level(records: &[SpectrumRecord], family: &str, n: i64) -> C64 {
    let rec = records
        .iter()
        .find(|r| r.family_label == family && r.n == n)
        .unwrap_or_else(|| panic!("missing level {family}:{n}"));
    assert!(rec.converged(), "{family}:{n} status {}", rec.status);
    rec.e_semiclassical
}

// ---------------------------------------------------------------------------
// Quantum spectra
// ---------------------------------------------------------------------------

#[test]
fn ho_quantum_levels_are_odd_integers() {
    let op = quantum::build_ho(1.0, 9.0, 120);
    let mut eigs = op.eigenvalues().unwrap();
    eigs.sort_by(|a, b| a.re.total_cmp(&b.re));
    for (k, e) in eigs.iter().take(10).enumerate() {
        let exact = (2 * k + 1) as f64;
        assert!((e - c64(exact, 0.0)).norm() < 1e-8, "level {k}: {e} vs {exact}");
    }
}

#[test]
fn h1_quantum_low_spectrum() {
    let op = quantum::build_h1(0.5, 1.0, 15.0, 256);
    let eigs = op.eigenvalues().unwrap();
    let real = [1.018793, 2.338155, 3.246090, 4.152584, 4.516481];
    let expected: Vec<C64> = real.iter().map(|&e| c64(e, 0.0)).collect();
    assert_contains(&eigs, &expected, 5e-6, "H1 real branch");
    let pairs = [
        (5.390104, 0.781800),
        (6.598544, 1.421019),
        (8.111663, 1.962038),
        (9.983732, 2.438535),
        (12.224094, 2.885783),
    ];
    for (re, im) in pairs {
        assert_contains(&eigs, &[c64(re, im), c64(re, -im)], 5e-6, "H1 conjugate pair");
    }
}

#[test]
fn h2_quantum_spectrum_is_complete() {
    // The 32-site lattice spectrum: 3 conjugate quartets, one imaginary
    // pair, and 9 real +- doublets.
    let op = quantum::build_h2(-1.0, 0.35, 1, 32, 0.0);
    let eigs = op.eigenvalues().unwrap();
    assert_eq!(eigs.len(), 32);
    assert_contains(&eigs, &[c64(0.0, 0.436874), c64(0.0, -0.436874)], 1e-6, "H2 imaginary pair");
    for (re, im) in [(0.341769, 0.402676), (0.684137, 0.303140), (1.026430, 0.147386)] {
        let quartet = [c64(re, im), c64(re, -im), c64(-re, im), c64(-re, -im)];
        assert_contains(&eigs, &quartet, 1e-6, "H2 quartet");
    }
    for re in [1.308614, 1.516592, 1.781212, 2.055888, 2.347845, 2.656654, 2.982713, 3.326391, 3.688092] {
        assert_contains(&eigs, &[c64(re, 0.0), c64(-re, 0.0)], 1e-6, "H2 real doublet");
    }
}

#[test]
fn h3_quantum_low_spectrum() {
    let op = quantum::build_h3(0.5, 2.0, 4.0, 6.0, 256);
    let eigs = op.eigenvalues().unwrap();
    for (re, im) in [(3.319386, 7.504445), (8.603522, 6.088385), (13.446386, 4.041702), (18.174452, 1.288060)] {
        assert_contains(&eigs, &[c64(re, im), c64(re, -im)], 1e-5, "H3 conjugate pair");
    }
    let real = [22.509146, 26.107995, 30.060718, 34.188593, 38.496780];
    let expected: Vec<C64> = real.iter().map(|&e| c64(e, 0.0)).collect();
    assert_contains(&eigs, &expected, 1e-5, "H3 real branch");
}

#[test]
fn quantum_operators_are_pseudo_hermitian() {
    let ops = [
        quantum::build_h1(0.5, 1.0, 15.0, 256),
        quantum::build_h2(-1.0, 0.35, 1, 32, 0.0),
        quantum::build_h3(0.5, 2.0, 4.0, 6.0, 128),
    ];
    for op in &ops {
        assert!(op.phs_residual() < 1e-12, "metric relation violated");
        // eta is a permutation in every shipped basis, hence unit condition.
        assert!((op.eta_condition() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn quantum_spectra_close_under_conjugation() {
    for op in [
        quantum::build_h1(0.5, 1.0, 15.0, 256),
        quantum::build_h2(-1.0, 0.35, 1, 32, 0.0),
        quantum::build_h3(0.5, 2.0, 4.0, 6.0, 128),
    ] {
        let eigs = op.eigenvalues().unwrap();
        assert!(quantum::conjugation_closure(&eigs) < 1e-8);
    }
}

#[test]
fn propagator_symmetry_at_complex_times() {
    // eta U(t) eta^{-1} = U(-conj t)^dagger, checked as a matrix identity
    // for the exponential of the discretized operator.
    let op = quantum::build_h3(0.5, 2.0, 4.0, 6.0, 64);
    for t in [c64(0.01, 0.0), c64(0.0, 0.01), c64(0.008, -0.006), c64(-0.005, 0.004)] {
        let r = op.propagator_residual(t).unwrap();
        assert!(r < 1e-10, "propagator residual {r:.3e} at t = {t}");
    }
}

// ---------------------------------------------------------------------------
// Semiclassical spectra
// ---------------------------------------------------------------------------

#[test]
fn ho_semiclassical_levels_are_exactly_odd_integers() {
    // W = pi E and mu = 1/2 give E_n = 2n + 1 in closed form; the solver
    // must hit that to near machine precision.
    let cfg = config("ho.toml");
    let model = cfg.model.to_spec().unwrap();
    let records =
        quantizer::semiclassical_spectrum(&model, &cfg.families, &cfg.quantizer_settings());
    for n in 0..10 {
        let e = level(&records, "oscillation", n);
        assert!((e - c64((2 * n + 1) as f64, 0.0)).norm() < 1e-10, "n={n}: {e}");
    }
}

#[test]
fn h1_semiclassical_confined_levels_match_the_triangle_well_closed_form() {
    // (8/3) E^{3/2} = 2 pi (n + 1/2).
    let cfg = config("h1.toml");
    let model = cfg.model.to_spec().unwrap();
    let records =
        quantizer::semiclassical_spectrum(&model, &cfg.families, &cfg.quantizer_settings());
    for n in 0..4 {
        let exact = (0.75 * std::f64::consts::PI * (n as f64 + 0.5)).powf(2.0 / 3.0);
        let e = level(&records, "confined", n);
        assert!((e - c64(exact, 0.0)).norm() < 1e-9, "n={n}: {e} vs {exact}");
    }
}

#[test]
fn h1_semiclassical_traversing_levels() {
    let cfg = config("h1.toml");
    let model = cfg.model.to_spec().unwrap();
    let records =
        quantizer::semiclassical_spectrum(&model, &cfg.families, &cfg.quantizer_settings());
    let expected = [
        (3, 5.393348, 0.781201),
        (4, 6.602392, 1.423603),
        (5, 8.112112, 1.965265),
        (6, 9.983074, 2.440109),
        (7, 12.223523, 2.886482),
    ];
    for (n, re, im) in expected {
        let ep = level(&records, "traversing+", n);
        assert!((ep - c64(re, im)).norm() < 1e-5, "traversing+ n={n}: {ep}");
        let em = level(&records, "traversing-", n);
        assert!((em - c64(re, -im)).norm() < 1e-5, "traversing- n={n}: {em}");
    }
}

#[test]
fn h2_semiclassical_levels() {
    let cfg = config("h2.toml");
    let model = cfg.model.to_spec().unwrap();
    let records =
        quantizer::semiclassical_spectrum(&model, &cfg.families, &cfg.quantizer_settings());
    // Landau-like levels at the band bottom are real.
    let bottom = [-3.685785, -3.324132, -2.980491, -2.654457, -2.345653, -2.053742];
    for (n, &e) in bottom.iter().enumerate() {
        let got = level(&records, "landau-bottom", n as i64);
        assert!((got - c64(e, 0.0)).norm() < 1e-5, "landau-bottom n={n}: {got}");
    }
    // Traversing levels through the band center come in conjugate pairs.
    let trav = [
        (5, 1.023640, 0.148011),
        (6, 0.682104, 0.304806),
        (7, 0.340290, 0.405426),
        (8, 0.000000, 0.440189),
        (9, -0.340290, 0.405426),
        (10, -0.682104, 0.304806),
        (11, -1.023640, 0.148011),
    ];
    for (n, re, im) in trav {
        let got = level(&records, "traversing+", n);
        assert!((got - c64(re, im)).norm() < 1e-5, "traversing+ n={n}: {got}");
    }
}

#[test]
fn h3_semiclassical_levels() {
    let cfg = config("h3.toml");
    let model = cfg.model.to_spec().unwrap();
    let records =
        quantizer::semiclassical_spectrum(&model, &cfg.families, &cfg.quantizer_settings());
    let left = [
        (0, 3.342250, -7.522740),
        (1, 8.617579, -6.116816),
        (2, 13.448420, -4.066771),
        (3, 18.099680, -1.333479),
    ];
    for (n, re, im) in left {
        let got = level(&records, "left-well", n);
        assert!((got - c64(re, im)).norm() < 1e-5, "left-well n={n}: {got}");
        let mirror = level(&records, "right-well", n);
        assert!((mirror - c64(re, -im)).norm() < 1e-5, "right-well n={n}: {mirror}");
    }
    let above = [
        (8, 22.377652),
        (9, 26.110142),
        (10, 30.048722),
        (11, 34.178537),
        (12, 38.487033),
    ];
    for (n, e) in above {
        let got = level(&records, "above-barrier", n);
        assert!((got - c64(e, 0.0)).norm() < 1e-5, "above-barrier n={n}: {got}");
    }
}

#[test]
fn newton_convergence_is_quadratic() {
    // The residual history of a quantization solve should collapse fast:
    // few iterations, final residual at the 1e-10 stop.
    let cfg = config("h3.toml");
    let model = cfg.model.to_spec().unwrap();
    let family = cfg.families.iter().find(|f| f.label == "left-well").unwrap();
    let (e, history) = quantizer::quantize_level_with_history(
        &model,
        family,
        1,
        c64(8.0, -6.0),
        &cfg.quantizer_settings(),
    )
    .unwrap();
    assert!((e - c64(8.617579, -6.116816)).norm() < 1e-5);
    assert!(history.len() <= 8, "took {} Newton iterations", history.len());
    assert!(*history.last().unwrap() < 1e-10);
}

// ---------------------------------------------------------------------------
// Matching and dichotomy
// ---------------------------------------------------------------------------

fn matched(name: &str) -> Vec<SpectrumRecord> {
    let cfg = config(name);
    let (records, _eigs, _unmatched) = verify::matched_spectrum(&cfg).unwrap();
    records
}

#[test]
fn h1_dichotomy_holds_with_zero_exceptions() {
    let records = matched("h1.toml");
    let (check, exceptions) = verify::check_dichotomy(&records);
    assert!(check.passed, "exceptions: {exceptions:?}");
}

#[test]
fn h2_dichotomy_holds_with_zero_exceptions() {
    let records = matched("h2.toml");
    let (check, exceptions) = verify::check_dichotomy(&records);
    assert!(check.passed, "exceptions: {exceptions:?}");
}

#[test]
fn h3_dichotomy_holds_with_zero_exceptions() {
    let records = matched("h3.toml");
    let (check, exceptions) = verify::check_dichotomy(&records);
    assert!(check.passed, "exceptions: {exceptions:?}");
}

#[test]
fn paired_levels_reference_each_other() {
    // Classification must be mutual: if a:n points at b:m then b:m points
    // back at a:n, and their energies are conjugate.
    let records = matched("h3.toml");
    for rec in &records {
        if let Classification::PairMember(partner_id) = &rec.orbit_class {
            let partner = records.iter().find(|r| &r.id() == partner_id).expect("partner exists");
            assert_eq!(partner.orbit_class, Classification::PairMember(rec.id()));
            let d = (partner.e_semiclassical - rec.e_semiclassical.conj()).norm();
            assert!(d < 1e-8 * (1.0 + rec.e_semiclassical.norm()));
        }
    }
}

#[test]
fn real_levels_come_from_self_symmetric_orbits() {
    let records = matched("h2.toml");
    let mut selfsym = 0;
    for rec in &records {
        if rec.orbit_class == Classification::SelfSymmetric {
            assert!(rec.e_semiclassical.im.abs() < 1e-8, "{}: {}", rec.id(), rec.e_semiclassical);
            selfsym += 1;
        }
    }
    assert!(selfsym >= 6, "expected the Landau branches to be self-symmetric");
}

#[test]
fn matching_is_within_the_per_family_accuracy() {
    for name in ["h1.toml", "h2.toml", "h3.toml"] {
        let cfg = config(name);
        let (records, _, _) = verify::matched_spectrum(&cfg).unwrap();
        for family in &cfg.families {
            let worst = records
                .iter()
                .filter(|r| r.family_label == family.label)
                .filter_map(|r| r.match_error)
                .fold(0.0f64, f64::max);
            assert!(
                worst <= family.expected_accuracy,
                "{name} family {}: worst match error {worst:.3e}",
                family.label
            );
        }
    }
}

#[test]
fn match_errors_are_relative_distances() {
    let cfg = config("h2.toml");
    let (records, eigs, _) = verify::matched_spectrum(&cfg).unwrap();
    for rec in records.iter().filter(|r| r.match_error.is_some()) {
        let eq = rec.e_quantum_match.unwrap();
        assert!(eigs.iter().any(|&q| (q - eq).norm() < 1e-12), "matched level not in spectrum");
        let expect = (rec.e_semiclassical - eq).norm() / (1.0 + rec.e_semiclassical.norm());
        assert!((rec.match_error.unwrap() - expect).abs() < 1e-12);
    }
}
