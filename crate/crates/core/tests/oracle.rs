use rigidity::dynamics::{derivative_cascade, derive_field, MassParams};
use rigidity::oracle::*;
use rigidity::poly::{rat, SparsePoly, VarId};

fn p(s: &str) -> SparsePoly {
    SparsePoly::parse_lenient(s).unwrap()
}

#[test]
fn generic_orbit_conserves_energy_and_angular_momentum() {
    let traj = integrate(&generic_state(), 10.0, 100, &IntegrationConfig::default()).unwrap();
    assert_eq!(traj.times.len(), 101);
    assert!(traj.drift(|s| s.energy()) < 1e-9);
    assert!(traj.drift(|s| s.angular_momentum()) < 1e-9);
    // The orbit genuinely moves: r12 is not constant.
    assert!(traj.drift(|s| s.distances()[0]) > 1e-2);
}

#[test]
fn relative_equilibria_keep_their_shape() {
    for w in relative_equilibrium_witnesses() {
        let traj = integrate(&w.state, 5.0, 50, &IntegrationConfig::default()).unwrap();
        for i in 0..3 {
            assert!(traj.drift(|s| s.distances()[i]) < 1e-8, "{:?} distance {i}", w.label);
        }
    }
}

#[test]
fn close_approach_is_reported() {
    // Bodies 1 and 2 fall straight into each other.
    let start = PhaseState::from_array([0.05, 0.0, 3.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    let cfg = IntegrationConfig { collision_floor: 0.05, ..IntegrationConfig::default() };
    match integrate(&start, 5.0, 50, &cfg) {
        Err(OracleError::CollisionApproach { pair, distance, .. }) => {
            assert_eq!(pair, "12");
            assert!(distance <= 0.05);
        }
        other => panic!("expected a collision, got {other:?}"),
    }
}

#[test]
fn invalid_integration_parameters() {
    let s = generic_state();
    assert!(matches!(integrate(&s, 0.0, 10, &IntegrationConfig::default()), Err(OracleError::BadParameters)));
    assert!(matches!(integrate(&s, 1.0, 0, &IntegrationConfig::default()), Err(OracleError::BadParameters)));
    let cfg = IntegrationConfig { tol: 0.0, ..IntegrationConfig::default() };
    assert!(matches!(integrate(&s, 1.0, 10, &cfg), Err(OracleError::BadParameters)));
}

#[test]
fn trajectory_csv_has_header_and_rows() {
    let traj = integrate(&generic_state(), 1.0, 4, &IntegrationConfig::default()).unwrap();
    let csv = traj.to_csv();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 6);
    assert!(lines[0].starts_with('t'));
}

/// The first two symbolic derivatives of r12^2/2 match central differences
/// of the integrated orbit, with second-order convergence in the step.
#[test]
fn low_order_derivatives_match_finite_differences() {
    let cascade = derivative_cascade(&derive_field(&MassParams::equal()), 2);
    let cfg = IntegrationConfig { tol: 1e-14, ..IntegrationConfig::default() };
    for (k, tol) in [(1, 1e-8), (2, 1e-7)] {
        let report = finite_diff_check(&cascade[k - 1], &generic_state(), k, &FiniteDiffConfig::for_order(k), &cfg).unwrap();
        assert!(report.max_relative_deviation < tol, "k = {k}: {}", report.max_relative_deviation);
        for o in &report.observed_orders {
            assert!((1.5..=2.5).contains(o), "k = {k}: observed order {o}");
        }
    }
}

/// A wrong "derivative" is caught.
#[test]
fn finite_differences_reject_a_wrong_formula() {
    let cascade = derivative_cascade(&derive_field(&MassParams::equal()), 1);
    let wrong = cascade[0].scale(&rat(11, 10));
    let cfg = IntegrationConfig { tol: 1e-14, ..IntegrationConfig::default() };
    let report = finite_diff_check(&wrong, &generic_state(), 1, &FiniteDiffConfig::for_order(1), &cfg).unwrap();
    assert!(report.max_relative_deviation > 1e-3);
}

#[test]
fn witness_parameters() {
    let ws = relative_equilibrium_witnesses();
    let labels: Vec<&str> = ws.iter().map(|w| w.label.name()).collect();
    assert_eq!(labels, WitnessLabel::ALL.iter().map(|l| l.name()).collect::<Vec<_>>());
    let expect = [(rat(-3, 2), rat(3, 1)), (rat(-5, 4), rat(5, 1)), (rat(-5, 4), rat(5, 1)), (rat(-5, 2), rat(5, 2))];
    for (w, (h, om2)) in ws.iter().zip(expect) {
        assert_eq!(w.h, h, "{:?}", w.label);
        assert_eq!(w.omega_sq, om2, "{:?}", w.label);
    }
}

#[test]
fn quadratic_field_evaluation() {
    let mut a = Assignment::default();
    a.set(VarId::OM, ExactValue::sqrt(rat(5, 1)));
    a.set(VarId::H, ExactValue::rational(rat(-5, 4)));
    // 4 h + om^2 = 0, om^3 = 5 om.
    assert!(eval_exact(&p("+4 h +1 om^2"), &a).unwrap().is_zero());
    assert_eq!(eval_exact(&p("+1 om^3"), &a).unwrap(), QuadElem { a: rat(0, 1), b: rat(5, 1) });
    a.set(VarId::Y2, ExactValue::sqrt(rat(3, 1)));
    assert!(matches!(eval_exact(&p("+1 y2 om"), &a), Err(OracleError::MixedRadicands(..))));
}

#[test]
fn vanishing_records_flag_nonzero_values() {
    let ws = relative_equilibrium_witnesses();
    // 2 h + 3 vanishes only at the equilateral witness (h = -3/2).
    let polys = vec![("equilateral-energy".to_string(), p("+2 h +3"))];
    let recs = vanishing_records(&polys, &ws, 256, 1e-6).unwrap();
    assert_eq!(recs.len(), 4);
    let passing: Vec<WitnessLabel> = recs.iter().filter(|r| r.passes).map(|r| r.witness).collect();
    assert_eq!(passing, vec![WitnessLabel::Lagrange]);
    assert!(recs.iter().filter(|r| !r.passes).all(|r| !r.exact_zero && r.relative > 1e-6));
}

#[test]
fn wide_evaluation_resolves_tiny_values() {
    let mut a = Assignment::default();
    a.set(VarId::R13, ExactValue::rational(rat(1, 1) + rat(1, 1i64 << 40) * rat(1, 1i64 << 40)));
    let w = eval_wide(&p("+1 r13 -1"), &a, 256).unwrap();
    assert!(w.value.to_f64() > 0.0);
    assert!((w.value.to_f64() - 2f64.powi(-80)).abs() < 1e-30);
}
