//! Two-level model (1/2) M . sigma with M = (t1, 0, i delta1): analytic
//! eigenvalues, Bloch dynamics, the conserved bilinear, and the sweep
//! across the exceptional point at delta1 = t1.

use orbitrace::integrator::TimeContour;
use orbitrace::spin::{
    self, SpinAlignment, SpinClass, SpinModel, SEED,
};
use orbitrace::c64;

#[test]
fn eigenvalues_below_transition_are_real() {
    // E = +-(1/2) sqrt(t1^2 - delta1^2).
    let m = SpinModel::new(2.0, 1.2);
    let (ep, em) = spin::analytic_eigenvalues(&m);
    let expect = 0.5 * (4.0f64 - 1.44).sqrt();
    assert!((ep - c64(expect, 0.0)).norm() < 1e-14);
    assert!((em - c64(-expect, 0.0)).norm() < 1e-14);
}

#[test]
fn eigenvalues_above_transition_are_an_imaginary_pair() {
    let m = SpinModel::new(2.0, 3.0);
    let (ep, em) = spin::analytic_eigenvalues(&m);
    assert!(ep.re.abs() < 1e-14 && em.re.abs() < 1e-14);
    assert!((ep + em).norm() < 1e-14, "pair must be conjugate (+-iE)");
    assert!((ep.im.abs() - 0.5 * 5.0f64.sqrt()).abs() < 1e-14);
}

#[test]
fn exceptional_point_is_flagged() {
    assert!(SpinModel::new(2.0, 2.0).at_transition());
    assert!(!SpinModel::new(2.0, 1.9).at_transition());
    assert!(!SpinModel::new(2.0, 2.1).at_transition());
}

#[test]
fn precession_period_is_2pi_over_omega() {
    // omega = sqrt(t1^2 - delta1^2), continued through the transition with
    // the +i branch above it.
    let below = SpinModel::new(2.0, 1.0);
    let expect = 2.0 * std::f64::consts::PI / 3.0f64.sqrt();
    assert!((below.period() - c64(expect, 0.0)).norm() < 1e-14);
    let above = SpinModel::new(2.0, 3.0);
    let p = above.period();
    assert!(p.re.abs() < 1e-14, "above the transition the period is imaginary, got {p}");
    assert!(p.im.abs() > 0.0);
}

#[test]
fn bloch_flow_conserves_the_bilinear_invariants() {
    // n . n and n . M are constants of ndot = M x n (bilinear, without
    // conjugation, so they hold for complex n too).
    for d1 in [0.5, 1.5, 2.5, 3.5] {
        let m = SpinModel::new(2.0, d1);
        let traj = spin::bloch_integrate(&m, SEED, &TimeContour::line(c64(2.0, 0.0)), 2048);
        assert!(!traj.blew_up);
        let n0 = traj.samples.first().unwrap().1;
        let mv = m.m();
        let c0 = spin::bilinear(&n0, &n0);
        let h0 = spin::bilinear(&n0, &mv);
        for &(_, n) in traj.samples.iter().step_by(256) {
            assert!((spin::bilinear(&n, &n) - c0).norm() < 1e-10);
            assert!((spin::bilinear(&n, &mv) - h0).norm() < 1e-10);
        }
    }
}

#[test]
fn representative_trajectories_close_on_the_analytic_period() {
    for d1 in [0.6, 1.4, 2.6, 3.8] {
        let m = SpinModel::new(2.0, d1);
        let traj = spin::representative_trajectory(&m, 2048);
        assert!(
            traj.closure_error() < 1e-6,
            "delta1 = {d1}: closure {:.3e}",
            traj.closure_error()
        );
        assert!(traj.casimir_drift() < 1e-8);
    }
}

#[test]
fn measured_period_agrees_with_the_formula() {
    for d1 in [0.8, 3.2] {
        let m = SpinModel::new(2.0, d1);
        let measured = spin::measured_period(&m, 4096);
        assert!(
            (measured - m.period()).norm() < 1e-6,
            "delta1 = {d1}: measured {measured} vs {}",
            m.period()
        );
    }
}

#[test]
fn spin_image_is_an_involution() {
    let n = [c64(0.3, 0.1), c64(-0.5, 0.2), c64(0.7, -0.4)];
    let twice = spin::spin_image_point(&spin::spin_image_point(&n));
    for k in 0..3 {
        assert!((twice[k] - n[k]).norm() < 1e-15);
    }
}

#[test]
fn image_preserves_the_spin_hamiltonian_up_to_conjugation() {
    // (1/2) M . image(n) = conj((1/2) M . n): the classical counterpart of
    // the operator symmetry, with M = (t1, 0, i delta1).
    let m = SpinModel::new(2.0, 1.3);
    let mv = m.m();
    let n = [c64(0.3, 0.5), c64(-0.2, 0.8), c64(0.1, 0.9)];
    let h = spin::bilinear(&mv, &n);
    let h_img = spin::bilinear(&mv, &spin::spin_image_point(&n));
    assert!((h_img - h.conj()).norm() < 1e-14);
}

#[test]
fn below_transition_orbits_are_self_symmetric_and_aligned_with_m() {
    let m = SpinModel::new(2.0, 0.9);
    let traj = spin::representative_trajectory(&m, 2048);
    assert_eq!(spin::classify_spin_orbit(&traj), SpinClass::SelfSymmetric);
    assert_eq!(spin::average_spin_alignment(&m, &traj), SpinAlignment::AlignedWithM);
}

#[test]
fn above_transition_orbits_pair_up_and_align_with_im() {
    let m = SpinModel::new(2.0, 3.1);
    let traj = spin::representative_trajectory(&m, 2048);
    assert_eq!(spin::classify_spin_orbit(&traj), SpinClass::PairMember);
    assert_eq!(spin::average_spin_alignment(&m, &traj), SpinAlignment::AlignedWithIM);
}

#[test]
fn image_of_a_paired_orbit_is_the_partner_not_itself() {
    let m = SpinModel::new(2.0, 3.1);
    let traj = spin::representative_trajectory(&m, 2048);
    let image = spin::spin_image(&traj);
    let d = spin::spin_orbit_distance(&traj, &image);
    assert!(d > 1e-2, "paired orbit should be far from its own image, distance {d:.3e}");
}

#[test]
fn sweep_has_one_row_per_delta1_and_flips_at_the_transition() {
    let values: Vec<f64> = (0..=40).map(|k| k as f64 * 0.1).collect();
    let rows = spin::pt_sweep(2.0, &values, 1024);
    assert_eq!(rows.len(), 41);
    for row in &rows {
        if (row.delta1 - 2.0).abs() < 1e-9 {
            assert_eq!(row.orbit_class, SpinClass::Divergent);
            assert_eq!(row.alignment, SpinAlignment::Divergent);
        } else if row.delta1 < 2.0 {
            assert!(row.e_plus.im.abs() < 1e-12 && row.e_minus.im.abs() < 1e-12);
            assert_eq!(row.orbit_class, SpinClass::SelfSymmetric);
            assert_eq!(row.alignment, SpinAlignment::AlignedWithM);
        } else {
            assert!(row.e_plus.re.abs() < 1e-12 && row.e_minus.re.abs() < 1e-12);
            assert!((row.e_plus + row.e_minus).norm() < 1e-12);
            assert_eq!(row.orbit_class, SpinClass::PairMember);
            assert_eq!(row.alignment, SpinAlignment::AlignedWithIM);
        }
    }
}

#[test]
fn eigenvalue_formula_agrees_with_the_dense_solver() {
    // Cross-check the closed form against the in-house QR on the actual
    // 2x2 matrix (1/2)(t1 sigma_x + i delta1 sigma_z).
    use orbitrace::linalg::{self, CMatrix};
    for d1 in [0.7, 2.0, 3.3] {
        let m = SpinModel::new(2.0, d1);
        let h = CMatrix::from_rows(&[
            vec![c64(0.0, 0.5 * d1), c64(1.0, 0.0)],
            vec![c64(1.0, 0.0), c64(0.0, -0.5 * d1)],
        ]);
        let eigs = linalg::eigenvalues(&h).unwrap();
        let (ep, em) = spin::analytic_eigenvalues(&m);
        let mut expect = [ep, em];
        expect.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        for (got, want) in eigs.iter().zip(&expect) {
            assert!((got - want).norm() < 1e-12);
        }
    }
}
