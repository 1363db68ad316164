//! Planar three-body problem in Jacobi coordinates: Euler–Lagrange field,
//! conserved quantities and the derivative cascade of `f = r12^2 / 2`.
//!
//! Distances `r12, r13, r23` are kept as symbols tied to their squares
//!
//! ```text
//! r12^2 = x1^2 + y1^2
//! r13^2 = (x2 + nu2 x1)^2 + (y2 + nu2 y1)^2
//! r23^2 = (x2 - nu1 x1)^2 + (y2 - nu1 y1)^2
//! ```
//!
//! and differentiated through `d r/dt = (d r^2/dt) / (2 r)`.

use crate::poly::{int, rat, Monomial, RatExpr, Rational, SparsePoly, VarId};

/// Mass parameters of the translation-reduced problem.
#[derive(Clone, Debug, PartialEq)]
pub struct MassParams {
    pub mu1: Rational,
    pub mu2: Rational,
    pub nu1: Rational,
    pub nu2: Rational,
}

impl MassParams {
    /// Three unit masses.
    pub fn equal() -> MassParams {
        MassParams { mu1: rat(1, 2), mu2: rat(2, 3), nu1: rat(1, 2), nu2: rat(1, 2) }
    }
}

/// The three mutual distances with their defining squares.
pub const DISTANCES: [VarId; 3] = [VarId::R12, VarId::R13, VarId::R23];

/// Time derivatives of the eight phase variables, plus the induced
/// distance rates.
#[derive(Clone, Debug)]
pub struct VectorField {
    /// Indexed like [`VarId::PHASE`].
    pub components: [RatExpr; 8],
    /// `d r12/dt, d r13/dt, d r23/dt`, each `N / r`.
    pub distance_rates: [RatExpr; 3],
    /// `r12^2, r13^2, r23^2` as polynomials in the coordinates.
    pub squares: [SparsePoly; 3],
}

/// Energy and angular momentum.
#[derive(Clone, Debug)]
pub struct ConservedPair {
    pub h: RatExpr,
    pub omega: SparsePoly,
}

fn v(x: VarId) -> SparsePoly {
    SparsePoly::var(x)
}

/// Squared distances as polynomials in the Jacobi coordinates.
pub fn distance_squares(m: &MassParams) -> [SparsePoly; 3] {
    let (x1, y1, x2, y2) = (v(VarId::X1), v(VarId::Y1), v(VarId::X2), v(VarId::Y2));
    let r12 = x1.square().add(&y1.square());
    let dx13 = x2.add(&x1.scale(&m.nu2));
    let dy13 = y2.add(&y1.scale(&m.nu2));
    let dx23 = x2.sub(&x1.scale(&m.nu1));
    let dy23 = y2.sub(&y1.scale(&m.nu1));
    [
        r12,
        dx13.square().add(&dy13.square()),
        dx23.square().add(&dy23.square()),
    ]
}

/// `U = 1/r12 + 1/r13 + 1/r23` (unit masses, `G = 1`).
pub fn potential() -> RatExpr {
    DISTANCES
        .iter()
        .map(|&r| RatExpr::over_monomial(SparsePoly::one(), Monomial::var(r, 1)))
        .fold(RatExpr::from_poly(SparsePoly::zero()), |a, b| a.add(&b))
}

/// `dU/dq` for a position coordinate `q`, using `d(1/r)/dq = -(d r^2/dq) / (2 r^3)`.
fn potential_gradient(squares: &[SparsePoly; 3], q: VarId) -> RatExpr {
    let mut acc = RatExpr::from_poly(SparsePoly::zero());
    for (sq, &r) in squares.iter().zip(DISTANCES.iter()) {
        let d = sq.diff(q);
        if d.is_zero() {
            continue;
        }
        acc = acc.add(&RatExpr::over_monomial(d.scale(&rat(-1, 2)), Monomial::var(r, 3)));
    }
    acc
}

/// Euler–Lagrange field of `L = (mu1 |z1'|^2 + mu2 |z2'|^2)/2 + U`.
///
/// Velocities are `(u1, v1, u2, v2)`; accelerations are `mu_i^-1 dU/dz_i`.
pub fn derive_field(m: &MassParams) -> VectorField {
    let squares = distance_squares(m);
    let inv1 = m.mu1.recip();
    let inv2 = m.mu2.recip();
    let acc = |q: VarId, inv: &Rational| potential_gradient(&squares, q).scale(inv);
    let components = [
        RatExpr::from_poly(v(VarId::U1)),
        RatExpr::from_poly(v(VarId::V1)),
        RatExpr::from_poly(v(VarId::U2)),
        RatExpr::from_poly(v(VarId::V2)),
        acc(VarId::X1, &inv1),
        acc(VarId::Y1, &inv1),
        acc(VarId::X2, &inv2),
        acc(VarId::Y2, &inv2),
    ];
    // d(r^2)/dt only involves positions, whose derivatives are polynomial.
    let distance_rates = std::array::from_fn(|i| {
        let mut num = SparsePoly::zero();
        for (k, &q) in VarId::PHASE[..4].iter().enumerate() {
            num = num.add(&squares[i].diff(q).mul(components[k].num()));
        }
        RatExpr::over_monomial(num.scale(&rat(1, 2)), Monomial::var(DISTANCES[i], 1))
    });
    VectorField { components, distance_rates, squares }
}

impl VectorField {
    /// Time derivative of a polynomial in the phase variables and distances.
    pub fn derive_poly(&self, p: &SparsePoly) -> RatExpr {
        let mut acc = RatExpr::from_poly(SparsePoly::zero());
        for (k, &q) in VarId::PHASE.iter().enumerate() {
            let d = p.diff(q);
            if !d.is_zero() {
                acc = acc.add(&self.components[k].mul_poly(&d));
            }
        }
        for (k, &r) in DISTANCES.iter().enumerate() {
            let d = p.diff(r);
            if !d.is_zero() {
                acc = acc.add(&self.distance_rates[k].mul_poly(&d));
            }
        }
        acc
    }

    /// Evaluate every component at a numeric state (distances computed from it).
    pub fn eval_f64(&self, state: &[f64; 8]) -> [f64; 8] {
        let point = numeric_point(state);
        std::array::from_fn(|k| self.components[k].eval_f64(&point))
    }
}

/// Full-alphabet evaluation point for a phase state (equal masses).
pub fn numeric_point(state: &[f64; 8]) -> [f64; crate::poly::NVARS] {
    let mut point = [0.0; crate::poly::NVARS];
    for (k, q) in VarId::PHASE.iter().enumerate() {
        point[q.index()] = state[k];
    }
    let [x1, y1, x2, y2, ..] = *state;
    point[VarId::R12.index()] = x1.hypot(y1);
    point[VarId::R13.index()] = (x2 + 0.5 * x1).hypot(y2 + 0.5 * y1);
    point[VarId::R23.index()] = (x2 - 0.5 * x1).hypot(y2 - 0.5 * y1);
    point
}

/// Total time derivative along the field (chain rule, quotient rule).
pub fn lie_derivative(e: &RatExpr, field: &VectorField) -> RatExpr {
    let dn = field.derive_poly(e.num());
    if e.is_polynomial() {
        return dn;
    }
    let dd = field.derive_poly(e.den());
    let den = RatExpr::from_poly(e.den().clone());
    let first = dn.div(&den).unwrap();
    let second = dd.mul_poly(e.num()).div(&den.mul(&den)).unwrap();
    first.sub(&second)
}

/// `f1 ... f_depth`, the successive time derivatives of `f = r12^2 / 2`.
pub fn derivative_cascade(field: &VectorField, depth: usize) -> Vec<RatExpr> {
    assert!(depth >= 1, "cascade depth must be at least 1");
    let f = RatExpr::from_poly(field.squares[0].scale(&rat(1, 2)));
    let mut out = Vec::with_capacity(depth);
    let mut cur = f;
    for k in 1..=depth {
        cur = lie_derivative(&cur, field);
        log::debug!("f{k}: numerator {} terms, denominator {}", cur.num().len(), cur.den());
        out.push(cur.clone());
    }
    out
}

/// Energy `H = (mu1 |z1'|^2 + mu2 |z2'|^2)/2 - U` and angular momentum
/// `Omega = mu1 (x1 v1 - y1 u1) + mu2 (x2 v2 - y2 u2)`.
pub fn conserved_quantities(m: &MassParams) -> ConservedPair {
    let kinetic = v(VarId::U1)
        .square()
        .add(&v(VarId::V1).square())
        .scale(&m.mu1)
        .add(&v(VarId::U2).square().add(&v(VarId::V2).square()).scale(&m.mu2))
        .scale(&rat(1, 2));
    let h = RatExpr::from_poly(kinetic).sub(&potential());
    let l1 = v(VarId::X1).mul(&v(VarId::V1)).sub(&v(VarId::Y1).mul(&v(VarId::U1)));
    let l2 = v(VarId::X2).mul(&v(VarId::V2)).sub(&v(VarId::Y2).mul(&v(VarId::U2)));
    let omega = l1.scale(&m.mu1).add(&l2.scale(&m.mu2));
    ConservedPair { h, omega }
}

/// Normal form modulo `r_ij^2 = squares[ij]`: every distance exponent is
/// reduced to 0 or 1.  The relations have pairwise coprime leading terms, so
/// the normal form is unique and zero exactly on the ideal.
pub fn reduce_distances(p: &SparsePoly, squares: &[SparsePoly; 3]) -> SparsePoly {
    let mut cur = p.clone();
    for (k, &r) in DISTANCES.iter().enumerate() {
        if cur.degree_in(r) < 2 {
            continue;
        }
        let coeffs = cur.coefficients_in(r);
        let mut parts = Vec::new();
        let mut sq_pow = SparsePoly::one();
        for (pair, chunk) in coeffs.chunks(2).enumerate() {
            if pair > 0 {
                sq_pow = sq_pow.mul(&squares[k]);
            }
            for (parity, c) in chunk.iter().enumerate() {
                if !c.is_zero() {
                    parts.push(c.mul(&sq_pow).mul_monomial(&Monomial::var(r, parity as u16)));
                }
            }
        }
        cur = SparsePoly::sum(parts.iter());
    }
    cur
}

/// Acceleration values by direct Newtonian forces in inertial coordinates,
/// mapped to Jacobi coordinates (independent of the symbolic derivation).
pub fn newtonian_accelerations(state: &[f64; 8]) -> [f64; 4] {
    let [x1, y1, x2, y2, ..] = *state;
    // Positions with q1 + q2 + q3 = 0 reconstructed from z1 = q2 - q1,
    // z2 = q3 - (q1 + q2)/2.
    let q3 = [2.0 * x2 / 3.0, 2.0 * y2 / 3.0];
    let q1 = [-x1 / 2.0 - q3[0] / 2.0, -y1 / 2.0 - q3[1] / 2.0];
    let q2 = [x1 / 2.0 - q3[0] / 2.0, y1 / 2.0 - q3[1] / 2.0];
    let qs = [q1, q2, q3];
    let mut acc = [[0.0f64; 2]; 3];
    for i in 0..3 {
        for j in 0..3 {
            if i == j {
                continue;
            }
            let d = [qs[j][0] - qs[i][0], qs[j][1] - qs[i][1]];
            let r3 = d[0].hypot(d[1]).powi(3);
            acc[i][0] += d[0] / r3;
            acc[i][1] += d[1] / r3;
        }
    }
    [
        acc[1][0] - acc[0][0],
        acc[1][1] - acc[0][1],
        acc[2][0] - 0.5 * (acc[0][0] + acc[1][0]),
        acc[2][1] - 0.5 * (acc[0][1] + acc[1][1]),
    ]
}

/// The first two cascade entries in closed form, for cross-checks:
/// `f1 = x1 u1 + y1 v1`, `f2 = u1^2 + v1^2 + x1 u1' + y1 v1'`.
pub fn closed_form_f1_f2(field: &VectorField) -> (SparsePoly, RatExpr) {
    let f1 = v(VarId::X1).mul(&v(VarId::U1)).add(&v(VarId::Y1).mul(&v(VarId::V1)));
    let f2 = RatExpr::from_poly(v(VarId::U1).square().add(&v(VarId::V1).square()))
        .add(&field.components[4].mul_poly(&v(VarId::X1)))
        .add(&field.components[5].mul_poly(&v(VarId::Y1)));
    (f1, f2)
}

/// Convenience: an integer constant as a rational expression.
pub fn constant(n: i64) -> RatExpr {
    RatExpr::from_poly(SparsePoly::constant(int(n)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn position_derivatives_are_velocities() {
        let field = derive_field(&MassParams::equal());
        for k in 0..4 {
            assert_eq!(field.components[k], RatExpr::from_poly(v(VarId::PHASE[k + 4])));
        }
    }

    #[test]
    fn first_cascade_entries_match_closed_forms() {
        let field = derive_field(&MassParams::equal());
        let fs = derivative_cascade(&field, 2);
        let (f1, f2) = closed_form_f1_f2(&field);
        assert_eq!(fs[0], RatExpr::from_poly(f1));
        assert_eq!(fs[1], f2);
    }

    #[test]
    fn constants_have_zero_derivative() {
        let field = derive_field(&MassParams::equal());
        assert!(lie_derivative(&constant(5), &field).is_zero());
    }

    #[test]
    fn angular_momentum_formula() {
        let c = conserved_quantities(&MassParams::equal());
        let expected = SparsePoly::parse_lenient("+1/2 x1 v1 -1/2 y1 u1 +2/3 x2 v2 -2/3 y2 u2").unwrap();
        assert_eq!(c.omega, expected);
    }

    #[test]
    fn collinear_states_have_no_transverse_acceleration() {
        let field = derive_field(&MassParams::equal());
        let a = field.eval_f64(&[1.0, 0.0, 0.3, 0.0, 0.2, 0.0, -0.1, 0.0]);
        assert_eq!(a[5], 0.0);
        assert_eq!(a[7], 0.0);
    }
}
