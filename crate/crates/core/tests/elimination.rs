use std::sync::OnceLock;

use rigidity::dynamics::*;
use rigidity::elimination::*;
use rigidity::oracle::{eval_exact, relative_equilibrium_witnesses, WitnessLabel};
use rigidity::poly::{rat, RatExpr, SparsePoly, VarId, NVARS};

fn system() -> &'static GSystem {
    static SYS: OnceLock<GSystem> = OnceLock::new();
    SYS.get_or_init(|| {
        let m = MassParams::equal();
        let cascade = derivative_cascade(&derive_field(&m), 4);
        build_g_system(&cascade, &conserved_quantities(&m).h).expect("elimination succeeds")
    })
}

fn p(s: &str) -> SparsePoly {
    SparsePoly::parse_lenient(s).unwrap()
}

#[test]
fn g_equations_use_only_invariant_variables() {
    let allowed = [VarId::R13, VarId::R23, VarId::W13, VarId::W23, VarId::H, VarId::OM];
    for g in &system().g {
        assert!(g.variables().iter().all(|v| allowed.contains(v)), "{:?}", g.variables());
        // Integer coefficients after stripping.
        assert!(g.terms().iter().all(|(_, c)| c.is_integer()));
    }
}

#[test]
fn no_g_contains_odd_velocity_terms() {
    for g in &system().g {
        let odd = g.terms().iter().filter(|(m, _)| (m.deg(VarId::W13) + m.deg(VarId::W23)) % 2 == 1).count();
        assert_eq!(odd, 0);
    }
}

#[test]
fn quadratic_forms_reassemble_exactly() {
    for g in &system().g {
        let form = decompose_quadratic(g).unwrap();
        assert!(form.reassemble().sub(g).is_zero());
        for a in &form.a {
            assert!(!a.uses(VarId::W13) && !a.uses(VarId::W23));
        }
    }
}

#[test]
fn decompose_quadratic_examples() {
    let f = decompose_quadratic(&p("+1 r13 w13^2 +5")).unwrap();
    assert_eq!(f.a, [p("+5"), p("+1 r13"), p("0"), p("0")]);
    let f = decompose_quadratic(&p("+1 r23 w13 w23 +1 w23^2")).unwrap();
    assert_eq!(f.a, [p("0"), p("0"), p("+1 r23"), p("+1")]);
    assert!(matches!(decompose_quadratic(&p("+1 r13 w13")), Err(ElimError::LinearVelocityTerm(_))));
}

#[test]
fn solve_y2_substitutes_back_to_zero() {
    let s = system();
    let f3 = s.c0.add(&s.c1.mul(&SparsePoly::var(VarId::Y2)));
    let y2 = solve_y2(&f3).unwrap();
    let back = RatExpr::from_poly(f3).subst(VarId::Y2, &y2);
    assert!(back.is_zero());
    assert!(matches!(solve_y2(&p("+1 y2^2 +1")), Err(ElimError::NotLinearInY2(2))));
}

/// The velocity solve reproduces `u2, v2` of numeric states under the
/// normalization `x1 = 1, y1 = 0, u1 = 0`.
#[test]
fn solved_velocities_match_numeric_states() {
    let geo = Geometry::new();
    let states = [[1.0, 0.0, 0.3, 0.8, 0.0, 0.7, -0.4, 0.25], [1.0, 0.0, -0.6, -1.1, 0.0, -0.2, 0.9, 0.5]];
    for s in states {
        let point = numeric_point(&s);
        let (r13, r23) = (point[VarId::R13.index()], point[VarId::R23.index()]);
        let [_, _, x2, y2, _, v1, u2, v2] = s;
        let w13 = ((x2 + 0.5) * u2 + y2 * (v2 + 0.5 * v1)) / r13;
        let w23 = ((x2 - 0.5) * u2 + y2 * (v2 - 0.5 * v1)) / r23;
        let om = 0.5 * v1 + 2.0 / 3.0 * (x2 * v2 - y2 * u2);
        let mut at = [0.0; NVARS];
        at[VarId::R13.index()] = r13;
        at[VarId::R23.index()] = r23;
        at[VarId::W13.index()] = w13;
        at[VarId::W23.index()] = w23;
        at[VarId::Y2.index()] = y2;
        at[VarId::OM.index()] = om;
        assert!((geo.u2.eval_f64(&at) - u2).abs() < 1e-12);
        assert!((geo.v2.eval_f64(&at) - v2).abs() < 1e-12);
        assert!((RatExpr::from_poly(geo.x2.clone()).eval_f64(&at) - x2).abs() < 1e-12);
        assert!((RatExpr::from_poly(geo.y2_squared.clone()).eval_f64(&at) - y2 * y2).abs() < 1e-12);
    }
}

#[test]
fn heron_product_matches_y2_squared() {
    let geo = Geometry::new();
    let prod = geo.heron.iter().fold(SparsePoly::one(), |acc, f| acc.mul(f)).scale(&rat(-1, 4));
    assert!(prod.sub(&geo.y2_squared).is_zero());
}

/// Relative equilibria solve every g exactly: the velocity-free parts
/// `a_i0` vanish at each witness with its (h, omega).
#[test]
fn constant_terms_vanish_at_relative_equilibria() {
    for w in relative_equilibrium_witnesses() {
        let a = w.assignment();
        for g in &system().g {
            let a0 = decompose_quadratic(g).unwrap().a[0].clone();
            assert!(eval_exact(&a0, &a).unwrap().is_zero(), "{:?}", w.label);
        }
    }
}

/// At the equilateral witness the geometric y2 = sqrt(3)/2 satisfies
/// f3 = c0 + c1 y2 = 0, and g4 vanishes with w13 = w23 = 0.
#[test]
fn lagrange_witness_satisfies_f3_and_g4() {
    let s = system();
    let w = relative_equilibrium_witnesses().into_iter().find(|w| w.label == WitnessLabel::Lagrange).unwrap();
    let a = w.assignment();
    let f3 = s.c0.add(&s.c1.mul(&SparsePoly::var(VarId::Y2)));
    assert!(eval_exact(&f3, &a).unwrap().is_zero());
    assert!(eval_exact(&s.g[3], &a).unwrap().is_zero());
}

/// Collinear witnesses have c1 != 0, so the solved y2 is defined there and
/// equals the geometric value 0.
#[test]
fn solved_y2_is_zero_at_collinear_witnesses() {
    let s = system();
    for w in relative_equilibrium_witnesses() {
        if !matches!(w.label, WitnessLabel::Euler1 | WitnessLabel::Euler2) {
            continue;
        }
        let a = w.assignment();
        assert!(!eval_exact(&s.c1, &a).unwrap().is_zero());
        assert!(eval_exact(&s.c0, &a).unwrap().is_zero());
    }
}

#[test]
fn ledger_records_every_cleared_denominator() {
    let s = system();
    let cleared = s.ledger.entries.iter().filter(|e| e.action == "clear denominator").count();
    assert!(cleared >= 4);
    let names: Vec<&str> = s.ledger_factors.iter().map(|(n, _)| n.as_str()).collect();
    for n in ["heron1", "heron2", "heron3", "heron4", "system"] {
        assert!(names.contains(&n), "{names:?}");
    }
}

#[test]
fn strip_ledger_removes_full_powers() {
    let factors = vec![("lin".to_string(), p("+1 r13 -1 r23"))];
    let x = p("+1 r13 -1 r23").pow(3).mul(&p("+6 r13 +4")).mul(&p("+1 r23^2"));
    let (s, rec) = strip_ledger(&x, &factors).unwrap();
    assert_eq!(s, p("+3 r13 +2"));
    assert_eq!(rec.factors, vec![("lin".to_string(), 3)]);
    assert_eq!(rec.monomial, "r23^2");
}
