use proptest::prelude::*;
use rigidity::dynamics::*;
use rigidity::poly::{rat, RatExpr, Rational, SparsePoly, VarId};

fn field() -> VectorField {
    derive_field(&MassParams::equal())
}

#[test]
fn energy_and_angular_momentum_are_conserved_symbolically() {
    let f = field();
    let c = conserved_quantities(&MassParams::equal());
    let dh = lie_derivative(&c.h, &f);
    let dom = lie_derivative(&RatExpr::from_poly(c.omega.clone()), &f);
    assert!(reduce_distances(dh.num(), &f.squares).is_zero());
    assert!(reduce_distances(dom.num(), &f.squares).is_zero());
}

#[test]
fn equilateral_acceleration_matches_newton() {
    let s3 = 3f64.sqrt() / 2.0;
    let state = [1.0, 0.0, 0.0, s3, 0.1, -0.2, 0.3, 0.05];
    let sym = field().eval_f64(&state);
    let newton = newtonian_accelerations(&state);
    for k in 0..4 {
        assert!((sym[4 + k] - newton[k]).abs() < 1e-12 * newton[k].abs().max(1.0));
    }
}

#[test]
fn cascade_depth_one() {
    let fs = derivative_cascade(&field(), 1);
    assert_eq!(fs.len(), 1);
    assert_eq!(fs[0], RatExpr::from_poly(SparsePoly::parse_lenient("+1 x1 u1 +1 y1 v1").unwrap()));
}

/// Rotation by a rational point of the unit circle commutes with the field.
#[test]
fn rotation_equivariance_is_exact() {
    let f = field();
    let (c, s) = (rat(3, 5), rat(4, 5));
    let state: [Rational; 8] =
        [rat(1, 1), rat(1, 3), rat(-2, 7), rat(5, 4), rat(1, 2), rat(-3, 2), rat(2, 9), rat(1, 6)];
    let rotate = |st: &[Rational; 8]| -> [Rational; 8] {
        let mut out = st.clone();
        for pair in [(0, 1), (2, 3), (4, 5), (6, 7)] {
            out[pair.0] = &c * &st[pair.0] - &s * &st[pair.1];
            out[pair.1] = &s * &st[pair.0] + &c * &st[pair.1];
        }
        out
    };
    let eval_at = |st: &[Rational; 8]| -> Vec<RatExpr> {
        f.components
            .iter()
            .map(|comp| {
                let mut e = comp.clone();
                for (k, q) in VarId::PHASE.iter().enumerate() {
                    e = e.subst_const(*q, &st[k]);
                }
                e
            })
            .collect()
    };
    let rotated_state = rotate(&state);
    let at_rotated = eval_at(&rotated_state);
    let at_original = eval_at(&state);
    // Rotate the acceleration pairs of the original field value.
    for (i, j) in [(4, 5), (6, 7)] {
        let rx = at_original[i].scale(&c).sub(&at_original[j].scale(&s));
        let ry = at_original[i].scale(&s).add(&at_original[j].scale(&c));
        assert!(rx.sub(&at_rotated[i]).is_zero());
        assert!(ry.sub(&at_rotated[j]).is_zero());
    }
}

fn noncollision_state() -> impl Strategy<Value = [f64; 8]> {
    (
        0.5f64..2.0,
        -1.0f64..1.0,
        -1.5f64..1.5,
        0.3f64..1.5,
        prop::array::uniform4(-1.0f64..1.0),
    )
        .prop_map(|(x1, y1, x2, y2, vel)| [x1, y1, x2, y2, vel[0], vel[1], vel[2], vel[3]])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn symbolic_accelerations_match_newtonian_forces(state in noncollision_state()) {
        let p = numeric_point(&state);
        prop_assume!(p[VarId::R13.index()] > 0.1 && p[VarId::R23.index()] > 0.1);
        let sym = field().eval_f64(&state);
        let newton = newtonian_accelerations(&state);
        for k in 0..4 {
            let scale = newton[k].abs().max(1e-3);
            prop_assert!((sym[4 + k] - newton[k]).abs() / scale < 1e-12,
                "component {k}: {} vs {}", sym[4 + k], newton[k]);
        }
    }
}
