//! Dense exponent vectors over the fixed alphabet, ordered graded-lex.

use std::cmp::Ordering;
use std::fmt;

use super::var::{VarId, NVARS};

/// Exponent vector `x1^e0 y1^e1 ...` over the full alphabet.
///
/// `Ord` is graded-lex: higher total degree is larger; ties are broken
/// lexicographically with `x1` most significant.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: [u16; NVARS],
}

impl Monomial {
    pub const fn one() -> Monomial {
        Monomial { exps: [0; NVARS] }
    }

    pub fn var(v: VarId, e: u16) -> Monomial {
        let mut m = Monomial::one();
        m.exps[v.index()] = e;
        m
    }

    /// Build from `(variable, exponent)` pairs; repeated variables add up.
    pub fn from_pairs(pairs: &[(VarId, u16)]) -> Monomial {
        let mut m = Monomial::one();
        for &(v, e) in pairs {
            m.exps[v.index()] = m.exps[v.index()]
                .checked_add(e)
                .expect("exponent overflow");
        }
        m
    }

    pub fn exponents(&self) -> &[u16; NVARS] {
        &self.exps
    }

    pub fn deg(&self, v: VarId) -> u16 {
        self.exps[v.index()]
    }

    pub fn with_deg(mut self, v: VarId, e: u16) -> Monomial {
        self.exps[v.index()] = e;
        self
    }

    pub fn total_degree(&self) -> u32 {
        self.exps.iter().map(|&e| e as u32).sum()
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    /// Variables with a nonzero exponent, in alphabet order.
    pub fn support(&self) -> impl Iterator<Item = (VarId, u16)> + '_ {
        self.exps
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| (VarId::from_index(i), e))
    }

    pub fn checked_mul(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Monomial::one();
        for i in 0..NVARS {
            out.exps[i] = self.exps[i].checked_add(other.exps[i])?;
        }
        Some(out)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        self.checked_mul(other).expect("exponent overflow in monomial product")
    }

    pub fn pow(&self, n: u16) -> Monomial {
        let mut out = Monomial::one();
        for i in 0..NVARS {
            out.exps[i] = self.exps[i].checked_mul(n).expect("exponent overflow in monomial power");
        }
        out
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(other.exps.iter()).all(|(a, b)| a <= b)
    }

    /// `self / other`, or `None` when `other` does not divide `self`.
    pub fn checked_div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Monomial::one();
        for i in 0..NVARS {
            out.exps[i] = self.exps[i].checked_sub(other.exps[i])?;
        }
        Some(out)
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let mut out = Monomial::one();
        for i in 0..NVARS {
            out.exps[i] = self.exps[i].min(other.exps[i]);
        }
        out
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        let mut out = Monomial::one();
        for i in 0..NVARS {
            out.exps[i] = self.exps[i].max(other.exps[i]);
        }
        out
    }
}

impl Default for Monomial {
    fn default() -> Self {
        Monomial::one()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.exps.cmp(&other.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    /// Renders as `r13^2 r23`; the unit monomial renders as `1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        let mut first = true;
        for (v, e) in self.support() {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_lex_order() {
        let r13 = Monomial::var(VarId::R13, 1);
        let r23 = Monomial::var(VarId::R23, 1);
        let r23sq = Monomial::var(VarId::R23, 2);
        assert!(r13 > r23);
        assert!(r23sq > r13);
        assert!(r13 > Monomial::one());
    }

    #[test]
    fn divisibility() {
        let a = Monomial::from_pairs(&[(VarId::R13, 2), (VarId::R23, 1)]);
        let b = Monomial::var(VarId::R13, 1);
        assert!(b.divides(&a));
        assert_eq!(a.checked_div(&b), Some(Monomial::from_pairs(&[(VarId::R13, 1), (VarId::R23, 1)])));
        assert_eq!(b.checked_div(&a), None);
        assert_eq!(a.gcd(&b), b);
        assert_eq!(a.to_string(), "r13^2 r23");
    }
}
