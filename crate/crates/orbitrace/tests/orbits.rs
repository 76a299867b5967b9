//! Complex-time RK4 integration of the canonical equations: closure,
//! energy conservation, convergence order, and symmetry images of orbits.

use orbitrace::integrator::{self, TimeContour};
use orbitrace::models::{ModelSpec, PhasePoint};
use orbitrace::c64;
use std::f64::consts::PI;

fn ho() -> ModelSpec {
    ModelSpec::HarmonicOscillator { omega: 1.0 }
}

fn h1() -> ModelSpec {
    ModelSpec::H1 { gamma: 0.5, v0: 1.0, l: 15.0 }
}

/// H = p^2 + x^2 gives xdot = 2p, so the angular frequency is 2 and the
/// primitive period is pi.
const HO_PERIOD: f64 = PI;

#[test]
fn ho_orbit_closes_and_conserves_energy() {
    let m = ho();
    let z0 = PhasePoint::new(c64(1.0, 0.0), c64(0.0, 0.0));
    let orbit = integrator::integrate(&m, z0, &TimeContour::line(c64(HO_PERIOD, 0.0)), 1024).unwrap();
    assert!(integrator::closure_error(&orbit) < 1e-10);
    assert!(integrator::max_energy_drift(&m, &orbit) < 1e-10);
}

#[test]
fn ho_solution_matches_cosine() {
    let m = ho();
    let z0 = PhasePoint::new(c64(1.0, 0.0), c64(0.0, 0.0));
    let orbit = integrator::integrate(&m, z0, &TimeContour::line(c64(1.0, 0.0)), 2048).unwrap();
    for &(s, z) in orbit.samples.iter().step_by(128) {
        let t = s; // contour length 1, real time
        let x = (2.0 * t).cos();
        let p = -(2.0 * t).sin();
        assert!((z.x - c64(x, 0.0)).norm() < 1e-10);
        assert!((z.p - c64(p, 0.0)).norm() < 1e-10);
    }
}

#[test]
fn rk4_is_fourth_order() {
    // Error ratio on step halving should approach 2^4; accept >= 3.9
    // effective order.
    let m = ho();
    let z0 = PhasePoint::new(c64(1.0, 0.0), c64(0.0, 0.0));
    let err = |steps: usize| -> f64 {
        let orbit =
            integrator::integrate(&m, z0, &TimeContour::line(c64(HO_PERIOD, 0.0)), steps).unwrap();
        integrator::closure_error(&orbit)
    };
    let e1 = err(24);
    let e2 = err(48);
    let order = (e1 / e2).log2();
    assert!(order >= 3.9, "measured RK4 order {order:.3}");
}

#[test]
fn complex_time_contour_reaches_the_analytic_continuation() {
    // x(t) = cos(2t) continues to complex t; integrate along a tilted
    // contour and compare against the closed form at the endpoint.
    let m = ho();
    let z0 = PhasePoint::new(c64(1.0, 0.0), c64(0.0, 0.0));
    let t_end = c64(0.8, 0.4);
    let orbit = integrator::integrate(&m, z0, &TimeContour::line(t_end), 2048).unwrap();
    let z = orbit.samples.last().unwrap().1;
    let expect_x = (2.0 * t_end).cos();
    let expect_p = -(2.0 * t_end).sin();
    assert!((z.x - expect_x).norm() < 1e-10);
    assert!((z.p - expect_p).norm() < 1e-10);
}

#[test]
fn path_independence_of_holomorphic_flow() {
    // The flow is holomorphic in t (away from kinks), so a polyline contour
    // to the same endpoint lands on the same phase point.
    let m = ModelSpec::H3 { g: 0.5, a: 2.0, gam: 4.0 };
    let z0 = PhasePoint::new(c64(0.5, 0.1), c64(1.0, -0.2));
    let t_end = c64(0.3, 0.15);
    let direct = integrator::integrate(&m, z0, &TimeContour::line(t_end), 2048).unwrap();
    let detour = TimeContour::polyline(vec![c64(0.1, 0.2)], t_end);
    let via = integrator::integrate(&m, z0, &detour, 2048).unwrap();
    let a = direct.samples.last().unwrap().1;
    let b = via.samples.last().unwrap().1;
    assert!((a.x - b.x).norm() + (a.p - b.p).norm() < 1e-8);
}

#[test]
fn h1_confined_orbit_is_exact_across_the_kinks() {
    // Triangle-well bounce at energy E: the flow is piecewise affine, so
    // the kink-splitting integrator reproduces the period T = 4 sqrt(E)
    // to rounding even at modest step counts.
    let m = h1();
    let e: f64 = 3.0;
    // Start at the well bottom moving right: (p + i gamma)^2 = E.
    let z0 = PhasePoint::new(c64(0.0, 0.0), c64(e.sqrt(), -0.5));
    let period = 4.0 * e.sqrt();
    let orbit = integrator::integrate(&m, z0, &TimeContour::line(c64(period, 0.0)), 512).unwrap();
    assert!(integrator::closure_error(&orbit) < 1e-10);
    assert!(integrator::max_energy_drift(&m, &orbit) < 1e-10);
}

#[test]
fn h1_energy_is_conserved_through_many_cells() {
    // A traversing trajectory crosses several ring cells; the wrapped
    // potential must not introduce energy jumps at cell boundaries.
    let m = h1();
    let z0 = PhasePoint::new(c64(0.0, 0.0), c64(3.0, -0.5));
    let orbit = integrator::integrate(&m, z0, &TimeContour::line(c64(6.0, 0.0)), 2048).unwrap();
    let span = orbit.samples.last().unwrap().1.x.re - z0.x.re;
    assert!(span.abs() > 15.0, "trajectory should cross at least one full ring cell");
    assert!(integrator::max_energy_drift(&m, &orbit) < 1e-9);
}

#[test]
fn ho_orbit_is_its_own_symmetry_image() {
    let m = ho();
    let z0 = PhasePoint::new(c64(1.0, 0.0), c64(0.0, 0.0));
    let orbit = integrator::integrate(&m, z0, &TimeContour::line(c64(HO_PERIOD, 0.0)), 1024).unwrap();
    let image = integrator::orbit_image(&m, &orbit);
    let d = integrator::orbit_distance(&orbit, &image).unwrap();
    assert!(d < 1e-9, "real oscillator orbit should be self-symmetric, distance {d:.3e}");
}

#[test]
fn orbit_action_of_the_oscillator_is_pi_e() {
    // W = loop integral of p dx = pi E for H = p^2 + x^2.
    let m = ho();
    let e: f64 = 2.25;
    let z0 = PhasePoint::new(c64(e.sqrt(), 0.0), c64(0.0, 0.0));
    let orbit = integrator::integrate(&m, z0, &TimeContour::line(c64(HO_PERIOD, 0.0)), 4096).unwrap();
    let w = integrator::orbit_action(&m, &orbit);
    assert!((w - c64(PI * e, 0.0)).norm() < 1e-5, "W = {w}");
}

#[test]
fn point_distance_wraps_periodic_coordinates() {
    let a = PhasePoint::new(c64(14.9, 0.0), c64(1.0, 0.0));
    let b = PhasePoint::new(c64(-0.1, 0.0), c64(1.0, 0.0));
    let plain = integrator::point_distance(a, b, None, None);
    let wrapped = integrator::point_distance(a, b, Some(15.0), None);
    assert!(plain > 10.0);
    assert!(wrapped < 1e-12);
}

#[test]
fn contour_conjugation_mirrors_waypoints() {
    let c = TimeContour::polyline(vec![c64(0.2, 0.5)], c64(1.0, 1.0));
    let cc = c.conj();
    let z0 = PhasePoint::new(c64(1.0, 0.0), c64(0.0, 0.0));
    let m = ho();
    // Conjugated contour endpoint is the conjugate time; for real initial
    // data the trajectory is the pointwise conjugate.
    let fwd = integrator::integrate(&m, z0, &c, 1024).unwrap();
    let bwd = integrator::integrate(&m, z0, &cc, 1024).unwrap();
    let za = fwd.samples.last().unwrap().1;
    let zb = bwd.samples.last().unwrap().1;
    assert!((za.x.conj() - zb.x).norm() < 1e-10);
    assert!((za.p.conj() - zb.p).norm() < 1e-10);
}

#[test]
fn blow_up_is_reported_not_panicked() {
    // Off the real axis the quartic potential has escape directions; the
    // integrator must return the blow-up error rather than NaN samples.
    let m = ModelSpec::H3 { g: 0.5, a: 2.0, gam: 4.0 };
    let z0 = PhasePoint::new(c64(3.0, 3.0), c64(0.0, 0.0));
    let r = integrator::integrate(&m, z0, &TimeContour::line(c64(10.0, 0.0)), 1024);
    assert!(matches!(r, Err(orbitrace::Error::BlowUp { .. })));
}
