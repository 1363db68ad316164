//! Quotients of polynomials with light-weight normalization.

use std::fmt;

use num_traits::{One, Signed};

use super::monomial::Monomial;
use super::sparse::{Rational, SparsePoly};
use super::var::VarId;
use super::PolyError;

/// `num / den` with `den != 0`.
///
/// Normalization cancels the common monomial factor and moves the content of
/// the denominator into the numerator, leaving a denominator with coprime
/// integer coefficients and positive graded-lex leading coefficient.  No
/// multivariate gcd is attempted.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatExpr {
    num: SparsePoly,
    den: SparsePoly,
}

impl RatExpr {
    pub fn new(num: SparsePoly, den: SparsePoly) -> Result<RatExpr, PolyError> {
        if den.is_zero() {
            return Err(PolyError::ZeroDenominator);
        }
        Ok(Self::normalize(num, den))
    }

    fn normalize(num: SparsePoly, den: SparsePoly) -> RatExpr {
        if num.is_zero() {
            return RatExpr::from_poly(SparsePoly::zero());
        }
        let g = num.monomial_content().gcd(&den.monomial_content());
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            let one = Rational::one();
            (
                num.div_exact(&SparsePoly::term(g, one.clone())).unwrap(),
                den.div_exact(&SparsePoly::term(g, one)).unwrap(),
            )
        };
        let mut c = den.content();
        if den.leading().unwrap().1.is_negative() {
            c = -c;
        }
        if c.is_one() {
            return RatExpr { num, den };
        }
        let inv = c.recip();
        RatExpr { num: num.scale(&inv), den: den.scale(&inv) }
    }

    pub fn from_poly(p: SparsePoly) -> RatExpr {
        RatExpr { num: p, den: SparsePoly::one() }
    }

    /// `num / m` for a monomial denominator.
    pub fn over_monomial(num: SparsePoly, m: Monomial) -> RatExpr {
        Self::normalize(num, SparsePoly::term(m, Rational::one()))
    }

    pub fn num(&self) -> &SparsePoly {
        &self.num
    }

    pub fn den(&self) -> &SparsePoly {
        &self.den
    }

    pub fn into_parts(self) -> (SparsePoly, SparsePoly) {
        (self.num, self.den)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one_poly()
    }

    pub fn neg(&self) -> RatExpr {
        RatExpr { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn scale(&self, c: &Rational) -> RatExpr {
        Self::normalize(self.num.scale(c), self.den.clone())
    }

    pub fn add(&self, other: &RatExpr) -> RatExpr {
        if self.den == other.den {
            return Self::normalize(self.num.add(&other.num), self.den.clone());
        }
        if let (Some((m1, c1)), Some((m2, c2))) = (self.den.as_term(), other.den.as_term()) {
            // Monomial denominators: bring both over the lcm.
            let l = m1.lcm(m2);
            let a = self.num.mul_term(&l.checked_div(m1).unwrap(), &c1.recip());
            let b = other.num.mul_term(&l.checked_div(m2).unwrap(), &c2.recip());
            return Self::normalize(a.add(&b), SparsePoly::term(l, Rational::one()));
        }
        Self::normalize(
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn sub(&self, other: &RatExpr) -> RatExpr {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RatExpr) -> RatExpr {
        Self::normalize(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn mul_poly(&self, p: &SparsePoly) -> RatExpr {
        Self::normalize(self.num.mul(p), self.den.clone())
    }

    pub fn div(&self, other: &RatExpr) -> Result<RatExpr, PolyError> {
        if other.num.is_zero() {
            return Err(PolyError::ZeroDenominator);
        }
        Ok(Self::normalize(self.num.mul(&other.den), self.den.mul(&other.num)))
    }

    pub fn pow(&self, n: u32) -> RatExpr {
        Self::normalize(self.num.pow(n), self.den.pow(n))
    }

    /// Substitute a rational expression for `v` in both numerator and denominator.
    pub fn subst(&self, v: VarId, value: &RatExpr) -> RatExpr {
        let n = subst_rat(&self.num, v, value);
        if self.den.uses(v) {
            let d = subst_rat(&self.den, v, value);
            n.div(&d).expect("substitution annihilated the denominator")
        } else {
            Self::normalize(n.num, n.den.mul(&self.den))
        }
    }

    pub fn subst_poly(&self, v: VarId, value: &SparsePoly) -> RatExpr {
        Self::normalize(self.num.subst_poly(v, value), self.den.subst_poly(v, value))
    }

    pub fn subst_const(&self, v: VarId, value: &Rational) -> RatExpr {
        Self::normalize(self.num.subst_const(v, value), self.den.subst_const(v, value))
    }

    pub fn eval_f64(&self, point: &[f64; super::var::NVARS]) -> f64 {
        self.num.eval_f64(point) / self.den.eval_f64(point)
    }
}

/// `p(v <- n/d)` as `(sum c_e n^e d^(D-e)) / d^D`, with `D = deg_v p`.
pub fn subst_rat(p: &SparsePoly, v: VarId, value: &RatExpr) -> RatExpr {
    if !p.uses(v) {
        return RatExpr::from_poly(p.clone());
    }
    if value.den.is_one_poly() {
        return RatExpr::from_poly(p.subst_poly(v, &value.num));
    }
    let coeffs = p.coefficients_in(v);
    let top = coeffs.len() - 1;
    let mut num_pows = vec![SparsePoly::one()];
    let mut den_pows = vec![SparsePoly::one()];
    for i in 1..=top {
        num_pows.push(num_pows[i - 1].mul(&value.num));
        den_pows.push(den_pows[i - 1].mul(&value.den));
    }
    let parts: Vec<SparsePoly> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(e, c)| c.mul(&num_pows[e]).mul(&den_pows[top - e]))
        .collect();
    RatExpr::normalize(SparsePoly::sum(parts.iter()), den_pows.pop().unwrap())
}

impl SparsePoly {
    pub fn is_one_poly(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }
}

impl From<SparsePoly> for RatExpr {
    fn from(p: SparsePoly) -> RatExpr {
        RatExpr::from_poly(p)
    }
}

impl fmt::Display for RatExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RatExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::sparse::{int, rat};

    fn p(s: &str) -> SparsePoly {
        SparsePoly::parse_lenient(s).unwrap()
    }

    #[test]
    fn substitution_examples() {
        let x2sq = p("+1 x2^2");
        let val = RatExpr::from_poly(p("+1/2 r13^2 -1/2 r23^2"));
        let got = subst_rat(&x2sq, VarId::X2, &val);
        assert_eq!(got, RatExpr::from_poly(p("+1/4 r13^4 -1/2 r13^2 r23^2 +1/4 r23^4")));

        let untouched = p("+1 r13 +1 h");
        assert_eq!(subst_rat(&untouched, VarId::X2, &val), RatExpr::from_poly(untouched.clone()));

        let r12cubed = p("+1 r12^3");
        let one = RatExpr::from_poly(SparsePoly::one());
        assert_eq!(subst_rat(&r12cubed, VarId::R12, &one), one);
    }

    #[test]
    fn denominator_is_power_of_value_den() {
        let q = p("+1 y2^3 +1 r13");
        let val = RatExpr::new(p("+1 r13"), p("+1 r23 +1")).unwrap();
        let got = subst_rat(&q, VarId::Y2, &val);
        assert_eq!(got.den(), &p("+1 r23 +1").pow(3));
    }

    #[test]
    fn normalization() {
        let e = RatExpr::new(p("+2 r13^2 r23"), p("-4 r13 r23^2")).unwrap();
        assert_eq!(e.num(), &p("-1/2 r13"));
        assert_eq!(e.den(), &p("+1 r23"));
        assert!(RatExpr::new(SparsePoly::one(), SparsePoly::zero()).is_err());
    }

    #[test]
    fn arithmetic() {
        let a = RatExpr::new(SparsePoly::one(), p("+1 r13")).unwrap();
        let b = RatExpr::new(SparsePoly::one(), p("+1 r23")).unwrap();
        let s = a.add(&b);
        assert_eq!(s.num(), &p("+1 r13 +1 r23"));
        assert_eq!(s.den(), &p("+1 r13 r23"));
        assert!(s.sub(&s).is_zero());
        let half = s.scale(&rat(1, 2));
        assert_eq!(half.add(&half), s);
        assert_eq!(a.mul(&b).den(), &p("+1 r13 r23"));
        assert_eq!(a.scale(&int(0)), RatExpr::from_poly(SparsePoly::zero()));
    }
}
