use proptest::prelude::*;

use rigidity::poly::{rat, Monomial, SparsePoly, VarId};
use rigidity::solve::*;

fn p(s: &str) -> SparsePoly {
    SparsePoly::parse_lenient(s).unwrap()
}

fn grevlex() -> MonomialOrder {
    MonomialOrder::grevlex(&[VarId::R13, VarId::R23])
}

fn small_poly() -> impl Strategy<Value = SparsePoly> {
    prop::collection::vec((0u16..3, 0u16..3, -4i64..5), 1..4).prop_map(|ts| {
        SparsePoly::from_terms(
            ts.into_iter()
                .map(|(a, b, c)| (Monomial::from_pairs(&[(VarId::R13, a), (VarId::R23, b)]), rat(c, 1)))
                .collect(),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Every generator reduces to zero modulo the basis, and the basis is
    /// reduced: monic, and no term of one element is divisible by another's
    /// leading monomial.
    #[test]
    fn groebner_basis_is_reduced_and_generates(gens in prop::collection::vec(small_poly(), 1..4)) {
        let ord = grevlex();
        let basis = buchberger(&gens, &ord, GbLimits::default()).unwrap();
        for g in &gens {
            prop_assert!(normal_form(g, &basis, &ord).is_zero());
        }
        for (i, b) in basis.iter().enumerate() {
            let lm = leading_monomial(b, &ord).unwrap();
            prop_assert!(b.coeff(&lm) == rat(1, 1));
            for (j, other) in basis.iter().enumerate() {
                if i == j {
                    continue;
                }
                let olm = leading_monomial(other, &ord).unwrap();
                prop_assert!(b.terms().iter().all(|(m, _)| !olm.divides(m)));
            }
        }
    }

    /// A product of known linear factors is recovered root by root.
    #[test]
    fn rational_roots_are_recovered(roots in prop::collection::vec((-6i64..7, 1i64..4), 1..4), extra in 0u32..2) {
        let k = SparsePoly::var(VarId::K);
        let mut f = SparsePoly::one();
        for (n, d) in &roots {
            f = f.mul(&k.scale(&rat(*d, 1)).sub(&SparsePoly::constant(rat(*n, 1))));
        }
        // Irreducible quadratic tail.
        if extra == 1 {
            f = f.mul(&p("+1 k^2 +1"));
        }
        let fac = factor_univariate_rational(&f, VarId::K).unwrap();
        let total: u32 = fac.root_values.iter().map(|(_, m)| m).sum();
        prop_assert_eq!(total as usize, roots.len());
        for (n, d) in &roots {
            prop_assert!(fac.root_values.iter().any(|(r, _)| *r == rat(*n, *d)));
        }
        prop_assert_eq!(fac.flagged, extra == 1);
    }
}

#[test]
fn unit_ideal_is_detected() {
    let basis = buchberger(&[p("+1 r13 -1"), p("+1 r13 -2")], &grevlex(), GbLimits::default()).unwrap();
    assert!(is_unit_basis(&basis));
    let basis = buchberger(&[p("+1 r13 -1"), p("+1 r13 r23 -2")], &grevlex(), GbLimits::default()).unwrap();
    assert!(!is_unit_basis(&basis));
    assert_eq!(basis, vec![p("+1 r23 -2"), p("+1 r13 -1")]);
}

#[test]
fn basis_limit_aborts() {
    let gens = [p("+1 r13^3 -1 r23^2"), p("+1 r13 r23 -1"), p("+1 r23^4 +1 r13")];
    let tiny = GbLimits { max_basis: 1, max_pairs: 1 };
    assert!(buchberger(&gens, &grevlex(), tiny).is_err());
}

/// Two faces on the (3,1) edge: `r23^3 + 3 r13` and a sextic.  Solving
/// the linear one gives `r13 = -r23^3/3`; substituting into the sextic
/// leaves `35 r23^6`, so no common root has both coordinates nonzero.
#[test]
fn three_one_face_system_has_no_nonzero_root() {
    let linear = p("+1 r23^3 +3 r13");
    let sextic = p("+1907 r23^6 +9828 r13 r23^3 +12636 r13^2");
    let sub = sextic.subst_poly(VarId::R13, &p("-1/3 r23^3"));
    assert_eq!(sub, p("+35 r23^6"));
    let gens = vec![linear.clone(), sextic.clone(), normalization_for((3, 1))];
    let basis = buchberger(&gens, &grevlex(), GbLimits::default()).unwrap();
    assert!(is_unit_basis(&basis));
    assert!(resultant_excludes(&linear, &sextic, (3, 1)).unwrap());

    let v = face_verdict((3, 1), &[linear, sextic], GbLimits::default()).unwrap();
    assert_eq!(v.verdict, Verdict::NoNonzeroSolution);
    assert!(v.cross_check);
}

#[test]
fn face_verdict_finds_common_nonzero_root() {
    // Both minors have the face (r13 - r23)(...) on the diagonal normal.
    let g1 = p("+1 r13^2 -1 r23^2 +1 r13^3");
    let g2 = p("+1 r13^2 +1 r13 r23 -2 r23^2 +5 r23^4");
    let v = face_verdict((1, 1), &[g1, g2], GbLimits::default()).unwrap();
    assert!(v.cross_check);
    match v.verdict {
        Verdict::CandidateRoots { roots, flagged_remainder } => {
            assert_eq!(roots, vec![("1".to_string(), 1)]);
            assert_eq!(flagged_remainder, None);
        }
        other => panic!("unexpected verdict {other:?}"),
    }
    assert_eq!(v.k_is, "r13");
}

#[test]
fn face_verdict_reports_vertex_faces() {
    let g1 = p("+1 r13 r23 +1 r13^3");
    let g2 = p("+1 r13^2 -1 r23^2");
    let v = face_verdict((0, 1), &[g2.clone(), g1], GbLimits::default()).unwrap();
    assert_eq!(v.verdict, Verdict::VertexFace { index: 0 });
}

#[test]
fn univariate_arithmetic() {
    let f = UniPoly::from_sparse(&p("+1 k^3 -1 k"), VarId::K).unwrap();
    let g = UniPoly::from_sparse(&p("+1 k^2 +2 k +1"), VarId::K).unwrap();
    assert_eq!(f.gcd(&g).to_sparse(VarId::K), p("+1 k +1"));
    let (d, s, t) = f.ext_gcd(&g);
    assert_eq!(s.mul(&f).add(&t.mul(&g)), d);
    let sq = UniPoly::from_sparse(&p("+1 k^2 -1"), VarId::K).unwrap().mul(&g);
    let parts = sq.squarefree();
    assert_eq!(parts.iter().map(|(_, m)| *m).collect::<Vec<_>>(), vec![1, 3]);
    // Res(k - 2, k^2 + 1) = 5.
    let a = UniPoly::from_sparse(&p("+1 k -2"), VarId::K).unwrap();
    let b = UniPoly::from_sparse(&p("+1 k^2 +1"), VarId::K).unwrap();
    assert_eq!(a.resultant(&b), rat(5, 1));
}

#[test]
fn dehomogenize_picks_the_free_coordinate() {
    assert_eq!(dehomogenize(&p("+1 r13^2 -1 r23^2"), (1, 1)), p("+1 k^2 -1"));
    assert_eq!(dehomogenize(&p("+1 r23^2 -1 r13 r23"), (1, 0)), p("+1 k^2 -1 k"));
}
