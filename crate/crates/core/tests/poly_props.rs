use proptest::prelude::*;

use rigidity::poly::{det, det_bareiss, digest, rat, Monomial, RatExpr, Rational, SparsePoly, VarId, NVARS};

const VARS: [VarId; 3] = [VarId::R13, VarId::R23, VarId::H];

fn term() -> impl Strategy<Value = (Monomial, Rational)> {
    (0u16..4, 0u16..4, 0u16..3, -9i64..10, 1i64..4).prop_map(|(a, b, c, n, d)| {
        (Monomial::from_pairs(&[(VARS[0], a), (VARS[1], b), (VARS[2], c)]), rat(n, d))
    })
}

fn poly() -> impl Strategy<Value = SparsePoly> {
    prop::collection::vec(term(), 0..6).prop_map(SparsePoly::from_terms)
}

fn point() -> impl Strategy<Value = [f64; NVARS]> {
    (-2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0).prop_map(|(x, y, z)| {
        let mut at = [0.0; NVARS];
        at[VarId::R13.index()] = x;
        at[VarId::R23.index()] = y;
        at[VarId::H.index()] = z;
        at
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_laws(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert!(a.sub(&a).is_zero());
        prop_assert_eq!(a.mul(&SparsePoly::one()), a.clone());
    }

    #[test]
    fn text_round_trip(a in poly()) {
        let text = a.to_string();
        let back: SparsePoly = text.parse().unwrap();
        prop_assert_eq!(&back, &a);
        prop_assert_eq!(digest(&back), digest(&a));
    }

    #[test]
    fn evaluation_is_a_homomorphism(a in poly(), b in poly(), at in point()) {
        let (x, y) = (a.eval_f64(&at), b.eval_f64(&at));
        let scale = 1.0 + x.abs() * y.abs() + x.abs() + y.abs();
        prop_assert!((a.mul(&b).eval_f64(&at) - x * y).abs() <= 1e-9 * scale);
        prop_assert!((a.add(&b).eval_f64(&at) - (x + y)).abs() <= 1e-9 * scale);
    }

    #[test]
    fn substitutions_commute(a in poly(), p in poly(), q in -3i64..4) {
        // Substituting r13 := p (free of r13) then r23 := q equals the other order
        // once p is evaluated at r23 = q as well.
        let p = p.subst_const(VarId::R13, &rat(1, 1));
        let qv = rat(q, 1);
        let left = a.subst_poly(VarId::R13, &p).subst_const(VarId::R23, &qv);
        let right = a.subst_const(VarId::R23, &qv).subst_poly(VarId::R13, &p.subst_const(VarId::R23, &qv));
        prop_assert_eq!(left, right);
    }

    #[test]
    fn strip_recovers_the_polynomial(a in poly()) {
        prop_assume!(!a.is_zero());
        let (s, content, mono) = a.strip().unwrap();
        prop_assert_eq!(s.mul_term(&mono, &content), a.clone());
        prop_assert!(s.monomial_content().is_one());
        prop_assert!(s.is_integral());
    }

    #[test]
    fn exact_division_inverts_multiplication(a in poly(), b in poly()) {
        prop_assume!(!b.is_zero());
        prop_assert_eq!(a.mul(&b).div_exact(&b), Some(a.clone()));
    }

    #[test]
    fn derivative_obeys_leibniz(a in poly(), b in poly()) {
        let v = VarId::R13;
        prop_assert_eq!(a.mul(&b).diff(v), a.diff(v).mul(&b).add(&a.mul(&b.diff(v))));
    }

    #[test]
    fn determinant_algorithms_agree(entries in prop::collection::vec(poly(), 9)) {
        let m: Vec<Vec<SparsePoly>> = entries.chunks(3).map(|r| r.to_vec()).collect();
        prop_assert_eq!(det(&m), det_bareiss(&m));
    }

    #[test]
    fn rational_expressions_add_exactly(a in poly(), b in poly(), c in poly()) {
        prop_assume!(!b.is_zero() && !c.is_zero());
        let x = RatExpr::new(a.clone(), b.clone()).unwrap();
        let y = RatExpr::new(SparsePoly::one(), c.clone()).unwrap();
        let sum = x.add(&y);
        // a/b + 1/c == (a c + b) / (b c), compared by cross-multiplication.
        prop_assert_eq!(sum.num().mul(&b.mul(&c)), a.mul(&c).add(&b).mul(sum.den()));
    }
}

#[test]
fn determinant_of_symbolic_two_by_two() {
    let p = |s: &str| SparsePoly::parse_lenient(s).unwrap();
    let m = vec![vec![p("+1 r13"), p("+1 r23")], vec![p("+1 h"), p("+2")]];
    assert_eq!(det(&m), p("+2 r13 -1 r23 h"));
    assert_eq!(det_bareiss(&m), det(&m));
}
