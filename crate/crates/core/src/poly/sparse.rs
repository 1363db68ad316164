//! Sparse multivariate polynomials with exact rational coefficients.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rustc_hash::FxHashMap;

use super::monomial::Monomial;
use super::var::{VarId, NVARS};
use super::PolyError;

pub type Rational = BigRational;

/// Exact polynomial over the fixed alphabet.
///
/// Terms are kept strictly descending in graded-lex order with nonzero
/// coefficients, so structural equality is polynomial equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct SparsePoly {
    terms: Vec<(Monomial, Rational)>,
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

impl SparsePoly {
    pub fn zero() -> SparsePoly {
        SparsePoly { terms: Vec::new() }
    }

    pub fn one() -> SparsePoly {
        SparsePoly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> SparsePoly {
        SparsePoly::term(Monomial::one(), c)
    }

    pub fn from_int(n: i64) -> SparsePoly {
        SparsePoly::constant(int(n))
    }

    pub fn var(v: VarId) -> SparsePoly {
        SparsePoly::term(Monomial::var(v, 1), Rational::one())
    }

    pub fn term(m: Monomial, c: Rational) -> SparsePoly {
        if c.is_zero() {
            SparsePoly::zero()
        } else {
            SparsePoly { terms: vec![(m, c)] }
        }
    }

    /// Canonicalize an arbitrary term list: sort, merge duplicates, drop zeros.
    pub fn from_terms(mut terms: Vec<(Monomial, Rational)>) -> SparsePoly {
        terms.sort_by(|a, b| b.0.cmp(&a.0));
        let mut out: Vec<(Monomial, Rational)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match out.last_mut() {
                Some(last) if last.0 == m => last.1 += c,
                _ => {
                    if let Some(last) = out.last() {
                        if last.1.is_zero() {
                            out.pop();
                        }
                    }
                    out.push((m, c));
                }
            }
        }
        if out.last().is_some_and(|t| t.1.is_zero()) {
            out.pop();
        }
        SparsePoly { terms: out }
    }

    /// Wrap terms already strictly descending with nonzero coefficients.
    pub(crate) fn from_sorted(terms: Vec<(Monomial, Rational)>) -> SparsePoly {
        debug_assert!(terms.windows(2).all(|w| w[0].0 > w[1].0));
        debug_assert!(terms.iter().all(|t| !t.1.is_zero()));
        SparsePoly { terms }
    }

    pub fn terms(&self) -> &[(Monomial, Rational)] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<(Monomial, Rational)> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.is_one())
    }

    /// The constant value, if the polynomial is constant.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.as_slice() {
            [] => Some(Rational::zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    /// Single-term polynomial, if it is one.
    pub fn as_term(&self) -> Option<(&Monomial, &Rational)> {
        match self.terms.as_slice() {
            [(m, c)] => Some((m, c)),
            _ => None,
        }
    }

    /// Leading term in graded-lex order.
    pub fn leading(&self) -> Option<&(Monomial, Rational)> {
        self.terms.first()
    }

    /// Coefficient of an exact monomial (zero when absent).
    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms
            .binary_search_by(|t| m.cmp(&t.0))
            .map(|i| self.terms[i].1.clone())
            .unwrap_or_else(|_| Rational::zero())
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|(m, _)| m.total_degree()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: VarId) -> u16 {
        self.terms.iter().map(|(m, _)| m.deg(v)).max().unwrap_or(0)
    }

    pub fn min_degree_in(&self, v: VarId) -> u16 {
        self.terms.iter().map(|(m, _)| m.deg(v)).min().unwrap_or(0)
    }

    pub fn uses(&self, v: VarId) -> bool {
        self.terms.iter().any(|(m, _)| m.deg(v) > 0)
    }

    /// Variables that occur, in alphabet order.
    pub fn variables(&self) -> Vec<VarId> {
        VarId::all().filter(|&v| self.uses(v)).collect()
    }

    pub fn neg(&self) -> SparsePoly {
        SparsePoly {
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> SparsePoly {
        if c.is_zero() {
            return SparsePoly::zero();
        }
        SparsePoly {
            terms: self.terms.iter().map(|(m, x)| (*m, x * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> SparsePoly {
        // Multiplication by a monomial preserves any monomial order.
        SparsePoly {
            terms: self.terms.iter().map(|(t, c)| (t.mul(m), c.clone())).collect(),
        }
    }

    pub fn mul_term(&self, m: &Monomial, c: &Rational) -> SparsePoly {
        if c.is_zero() {
            return SparsePoly::zero();
        }
        SparsePoly {
            terms: self.terms.iter().map(|(t, x)| (t.mul(m), x * c)).collect(),
        }
    }

    fn merge(&self, other: &SparsePoly, negate: bool) -> SparsePoly {
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Less => {
                    let c = if negate { -&b[j].1 } else { b[j].1.clone() };
                    out.push((b[j].0, c));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = if negate { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                    if !c.is_zero() {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        for t in &b[j..] {
            let c = if negate { -&t.1 } else { t.1.clone() };
            out.push((t.0, c));
        }
        SparsePoly { terms: out }
    }

    pub fn add(&self, other: &SparsePoly) -> SparsePoly {
        self.merge(other, false)
    }

    pub fn sub(&self, other: &SparsePoly) -> SparsePoly {
        self.merge(other, true)
    }

    pub fn mul(&self, other: &SparsePoly) -> SparsePoly {
        if self.is_zero() || other.is_zero() {
            return SparsePoly::zero();
        }
        if let Some((m, c)) = other.as_term() {
            return self.mul_term(m, c);
        }
        if let Some((m, c)) = self.as_term() {
            return other.mul_term(m, c);
        }
        mul_kernel(self, other)
    }

    pub fn square(&self) -> SparsePoly {
        self.mul(self)
    }

    pub fn pow(&self, n: u32) -> SparsePoly {
        let mut result = SparsePoly::one();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.square();
            }
        }
        result
    }

    /// Sum of many polynomials by pairwise merging.
    pub fn sum<'a, I: IntoIterator<Item = &'a SparsePoly>>(items: I) -> SparsePoly {
        let mut level: Vec<SparsePoly> = items.into_iter().cloned().collect();
        if level.is_empty() {
            return SparsePoly::zero();
        }
        while level.len() > 1 {
            let mut next = Vec::with_capacity(level.len().div_ceil(2));
            let mut it = level.into_iter();
            while let Some(a) = it.next() {
                match it.next() {
                    Some(b) => next.push(a.add(&b)),
                    None => next.push(a),
                }
            }
            level = next;
        }
        level.pop().unwrap()
    }

    /// Exact partial derivative.
    pub fn diff(&self, v: VarId) -> SparsePoly {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.deg(v) > 0)
            .map(|(m, c)| {
                let e = m.deg(v);
                (m.with_deg(v, e - 1), c * int(e as i64))
            })
            .collect();
        SparsePoly::from_terms(terms)
    }

    /// Coefficients with respect to `v`: entry `e` is the (v-free) coefficient of `v^e`.
    pub fn coefficients_in(&self, v: VarId) -> Vec<SparsePoly> {
        let d = self.degree_in(v) as usize;
        let mut buckets: Vec<Vec<(Monomial, Rational)>> = vec![Vec::new(); d + 1];
        for (m, c) in &self.terms {
            buckets[m.deg(v) as usize].push((m.with_deg(v, 0), c.clone()));
        }
        // Stripping one variable may reorder terms within a bucket.
        buckets.into_iter().map(SparsePoly::from_terms).collect()
    }

    /// Inverse of [`coefficients_in`](Self::coefficients_in).
    pub fn from_coefficients_in(v: VarId, coeffs: &[SparsePoly]) -> SparsePoly {
        let mut terms = Vec::new();
        for (e, c) in coeffs.iter().enumerate() {
            let ve = Monomial::var(v, e as u16);
            for (m, x) in c.terms() {
                assert_eq!(m.deg(v), 0, "coefficient must not involve {v}");
                terms.push((m.mul(&ve), x.clone()));
            }
        }
        SparsePoly::from_terms(terms)
    }

    /// Substitute a polynomial for `v`.
    pub fn subst_poly(&self, v: VarId, value: &SparsePoly) -> SparsePoly {
        if !self.uses(v) {
            return self.clone();
        }
        let coeffs = self.coefficients_in(v);
        let mut parts = Vec::with_capacity(coeffs.len());
        let mut power = SparsePoly::one();
        for (e, c) in coeffs.iter().enumerate() {
            if e > 0 {
                power = power.mul(value);
            }
            if !c.is_zero() {
                parts.push(c.mul(&power));
            }
        }
        SparsePoly::sum(parts.iter())
    }

    /// Substitute a rational constant for `v`.
    pub fn subst_const(&self, v: VarId, value: &Rational) -> SparsePoly {
        if !self.uses(v) {
            return self.clone();
        }
        let d = self.degree_in(v) as usize;
        let mut powers = Vec::with_capacity(d + 1);
        powers.push(Rational::one());
        for i in 1..=d {
            let next = &powers[i - 1] * value;
            powers.push(next);
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.with_deg(v, 0), c * &powers[m.deg(v) as usize]))
            .collect();
        SparsePoly::from_terms(terms)
    }

    /// Substitute several constants at once.
    pub fn subst_consts(&self, values: &[(VarId, Rational)]) -> SparsePoly {
        values.iter().fold(self.clone(), |p, (v, x)| p.subst_const(*v, x))
    }

    /// Rename variables (a permutation or injective relabeling).
    pub fn rename(&self, map: &[(VarId, VarId)]) -> SparsePoly {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut out = *m;
                for &(from, _) in map {
                    out = out.with_deg(from, 0);
                }
                let mut pairs = Vec::new();
                for &(from, to) in map {
                    pairs.push((to, m.deg(from)));
                }
                (out.mul(&Monomial::from_pairs(&pairs)), c.clone())
            })
            .collect();
        SparsePoly::from_terms(terms)
    }

    /// Common monomial factor of all terms (one for the zero polynomial).
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.iter();
        match it.next() {
            None => Monomial::one(),
            Some((first, _)) => it.fold(*first, |g, (m, _)| g.gcd(m)),
        }
    }

    /// Positive rational `g` such that `self / g` has coprime integer coefficients.
    pub fn content(&self) -> Rational {
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for (_, c) in &self.terms {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        if num.is_zero() {
            return Rational::zero();
        }
        Rational::new(num, den)
    }

    /// Remove integer content and common monomial factor.
    ///
    /// The returned content carries the sign of the leading coefficient, so
    /// the stripped polynomial has a positive leading coefficient and
    /// `p == content * monomial * stripped`.
    pub fn strip(&self) -> Result<(SparsePoly, Rational, Monomial), PolyError> {
        let Some((_, lc)) = self.leading() else {
            return Err(PolyError::ZeroPolynomial);
        };
        let mut content = self.content();
        if lc.is_negative() {
            content = -content;
        }
        let mono = self.monomial_content();
        let inv = content.recip();
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.checked_div(&mono).unwrap(), c * &inv))
            .collect::<Vec<_>>();
        // Dividing every term by the same monomial preserves the order.
        Ok((SparsePoly::from_sorted(terms), content, mono))
    }

    /// Stripped form only (zero maps to zero).
    pub fn stripped(&self) -> SparsePoly {
        self.strip().map(|t| t.0).unwrap_or_default()
    }

    /// Divide by the content so the result has coprime integer coefficients
    /// and a positive leading coefficient (monomial factors kept).
    pub fn primitive(&self) -> SparsePoly {
        let Some((_, lc)) = self.leading() else {
            return SparsePoly::zero();
        };
        let mut g = self.content();
        if lc.is_negative() {
            g = -g;
        }
        self.scale(&g.recip())
    }

    /// Make the leading coefficient one.
    pub fn monic(&self) -> SparsePoly {
        match self.leading() {
            None => SparsePoly::zero(),
            Some((_, lc)) => self.scale(&lc.recip()),
        }
    }

    /// Integer numerators over a common denominator: `self = (1/den) * sum n_i m_i`.
    pub fn integer_form(&self) -> (BigInt, Vec<BigInt>) {
        let mut den = BigInt::one();
        for (_, c) in &self.terms {
            if !c.denom().is_one() {
                den = den.lcm(c.denom());
            }
        }
        let nums = self
            .terms
            .iter()
            .map(|(_, c)| {
                if c.denom().is_one() {
                    c.numer() * &den
                } else {
                    c.numer() * (&den / c.denom())
                }
            })
            .collect();
        (den, nums)
    }

    pub fn is_integral(&self) -> bool {
        self.terms.iter().all(|(_, c)| c.denom().is_one())
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &SparsePoly) -> Option<SparsePoly> {
        assert!(!d.is_zero(), "division by the zero polynomial");
        if self.is_zero() {
            return Some(SparsePoly::zero());
        }
        if let Some((m, c)) = d.as_term() {
            let inv = c.recip();
            let mut terms = Vec::with_capacity(self.len());
            for (t, x) in &self.terms {
                terms.push((t.checked_div(m)?, x * &inv));
            }
            return Some(SparsePoly::from_sorted(terms));
        }
        let dp = d.primitive();
        let dscale = d.leading().unwrap().1.clone() / &dp.leading().unwrap().1;
        let q = if dp.leading().unwrap().1.is_one() {
            div_exact_integer(self, &dp)?
        } else {
            div_exact_rational(self, &dp)?
        };
        Some(q.scale(&dscale.recip()))
    }

    /// Largest `e` with `d^e | self`, together with the cofactor.
    pub fn divide_out(&self, d: &SparsePoly) -> (u32, SparsePoly) {
        let mut e = 0;
        let mut cur = self.clone();
        if d.is_constant() || self.is_zero() {
            return (0, cur);
        }
        while let Some(q) = cur.div_exact(d) {
            cur = q;
            e += 1;
        }
        (e, cur)
    }

    pub fn map_coeffs(&self, f: impl Fn(&Rational) -> Rational) -> SparsePoly {
        SparsePoly::from_terms(self.terms.iter().map(|(m, c)| (*m, f(c))).collect())
    }

    /// Evaluate in `f64` (for numeric oracles only).
    pub fn eval_f64(&self, point: &[f64; NVARS]) -> f64 {
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            let mut t = c.to_f64().unwrap_or(f64::NAN);
            for (v, e) in m.support() {
                t *= point[v.index()].powi(e as i32);
            }
            acc += t;
        }
        acc
    }

    /// Exact evaluation when every occurring variable gets a rational value.
    pub fn eval_rational(&self, values: &[(VarId, Rational)]) -> Option<Rational> {
        self.subst_consts(values).as_constant()
    }

    /// Largest absolute coefficient, as `f64` (magnitude scale for tolerances).
    pub fn max_abs_coeff_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(_, c)| c.abs().to_f64().unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max)
    }
}

/// Bits needed to store values up to `x`.
fn bit_width(x: u32) -> u32 {
    32 - x.leading_zeros()
}

/// Product of two polynomials with at least two terms each.
///
/// Coefficients are cleared to integers and exponent vectors packed into a
/// `u128` when they fit, so the inner loop is one integer add for the key
/// plus one big-integer multiply-accumulate.
fn mul_kernel(a: &SparsePoly, b: &SparsePoly) -> SparsePoly {
    let (a, b) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let mut max_exp = [0u32; NVARS];
    for p in [a, b] {
        let mut local = [0u32; NVARS];
        for (m, _) in p.terms() {
            for (i, &e) in m.exponents().iter().enumerate() {
                local[i] = local[i].max(e as u32);
            }
        }
        for i in 0..NVARS {
            max_exp[i] += local[i];
        }
    }
    for (i, &e) in max_exp.iter().enumerate() {
        assert!(e <= u16::MAX as u32, "exponent overflow in product ({})", VarId::from_index(i));
    }
    let widths: Vec<u32> = max_exp.iter().map(|&e| bit_width(e)).collect();
    let total_bits: u32 = widths.iter().sum();
    let (da, na) = a.integer_form();
    let (db, nb) = b.integer_form();
    let den = da * db;

    let mut raw: Vec<(Monomial, BigInt)> = if total_bits <= 128 {
        let mut shifts = [0u32; NVARS];
        let mut acc = 0;
        for i in (0..NVARS).rev() {
            shifts[i] = acc;
            acc += widths[i];
        }
        let pack = |m: &Monomial| -> u128 {
            let mut k = 0u128;
            for (i, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    k |= (e as u128) << shifts[i];
                }
            }
            k
        };
        let ka: Vec<u128> = a.terms().iter().map(|(m, _)| pack(m)).collect();
        let kb: Vec<u128> = b.terms().iter().map(|(m, _)| pack(m)).collect();
        let mut map: FxHashMap<u128, BigInt> = FxHashMap::default();
        map.reserve(b.len() * 2);
        for (x, cx) in ka.iter().zip(na.iter()) {
            for (y, cy) in kb.iter().zip(nb.iter()) {
                let prod = cx * cy;
                match map.entry(x + y) {
                    std::collections::hash_map::Entry::Occupied(mut o) => {
                        *o.get_mut() += prod;
                    }
                    std::collections::hash_map::Entry::Vacant(v) => {
                        v.insert(prod);
                    }
                }
            }
        }
        map.into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| {
                let mut exps = [0u16; NVARS];
                for i in 0..NVARS {
                    if widths[i] > 0 {
                        let mask = (1u128 << widths[i]) - 1;
                        exps[i] = ((k >> shifts[i]) & mask) as u16;
                    }
                }
                let pairs: Vec<(VarId, u16)> = exps
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| (VarId::from_index(i), e))
                    .collect();
                (Monomial::from_pairs(&pairs), c)
            })
            .collect()
    } else {
        let mut map: FxHashMap<Monomial, BigInt> = FxHashMap::default();
        for ((x, _), cx) in a.terms().iter().zip(na.iter()) {
            for ((y, _), cy) in b.terms().iter().zip(nb.iter()) {
                *map.entry(x.mul(y)).or_insert_with(BigInt::zero) += cx * cy;
            }
        }
        map.into_iter().filter(|(_, c)| !c.is_zero()).collect()
    };
    raw.sort_unstable_by(|x, y| y.0.cmp(&x.0));
    let terms = raw
        .into_iter()
        .map(|(m, c)| (m, Rational::new(c, den.clone())))
        .collect();
    SparsePoly::from_sorted(terms)
}

/// Exact division by a primitive integer divisor with leading coefficient 1.
fn div_exact_integer(p: &SparsePoly, d: &SparsePoly) -> Option<SparsePoly> {
    let (pden, pnum) = p.integer_form();
    let (_, dnum) = d.integer_form();
    let (lm, _) = d.leading().unwrap();
    let mut rem: BTreeMap<Monomial, BigInt> =
        p.terms().iter().map(|t| t.0).zip(pnum).collect();
    let dterms: Vec<(Monomial, BigInt)> = d.terms().iter().map(|t| t.0).zip(dnum).collect();
    let mut quotient = Vec::new();
    while let Some((m, c)) = rem.pop_last() {
        let qm = m.checked_div(lm)?;
        for (dm, dc) in &dterms[1..] {
            let key = qm.mul(dm);
            let delta = &c * dc;
            match rem.entry(key) {
                std::collections::btree_map::Entry::Occupied(mut o) => {
                    *o.get_mut() -= delta;
                    if o.get().is_zero() {
                        o.remove();
                    }
                }
                std::collections::btree_map::Entry::Vacant(v) => {
                    v.insert(-delta);
                }
            }
        }
        quotient.push((qm, Rational::new(c, pden.clone())));
    }
    Some(SparsePoly::from_sorted(quotient))
}

fn div_exact_rational(p: &SparsePoly, d: &SparsePoly) -> Option<SparsePoly> {
    let (lm, lc) = d.leading().unwrap();
    let inv = lc.recip();
    let mut rem: BTreeMap<Monomial, Rational> = p.terms().iter().cloned().collect();
    let mut quotient = Vec::new();
    while let Some((m, c)) = rem.pop_last() {
        let qm = m.checked_div(lm)?;
        let qc = c * &inv;
        for (dm, dc) in &d.terms()[1..] {
            let key = qm.mul(dm);
            let delta = &qc * dc;
            match rem.entry(key) {
                std::collections::btree_map::Entry::Occupied(mut o) => {
                    *o.get_mut() -= delta;
                    if o.get().is_zero() {
                        o.remove();
                    }
                }
                std::collections::btree_map::Entry::Vacant(v) => {
                    v.insert(-delta);
                }
            }
        }
        quotient.push((qm, qc));
    }
    Some(SparsePoly::from_sorted(quotient))
}

impl Add for &SparsePoly {
    type Output = SparsePoly;
    fn add(self, rhs: &SparsePoly) -> SparsePoly {
        SparsePoly::add(self, rhs)
    }
}

impl Sub for &SparsePoly {
    type Output = SparsePoly;
    fn sub(self, rhs: &SparsePoly) -> SparsePoly {
        SparsePoly::sub(self, rhs)
    }
}

impl Mul for &SparsePoly {
    type Output = SparsePoly;
    fn mul(self, rhs: &SparsePoly) -> SparsePoly {
        SparsePoly::mul(self, rhs)
    }
}

impl Neg for &SparsePoly {
    type Output = SparsePoly;
    fn neg(self) -> SparsePoly {
        SparsePoly::neg(self)
    }
}

impl From<VarId> for SparsePoly {
    fn from(v: VarId) -> SparsePoly {
        SparsePoly::var(v)
    }
}

impl From<i64> for SparsePoly {
    fn from(n: i64) -> SparsePoly {
        SparsePoly::from_int(n)
    }
}

impl From<Rational> for SparsePoly {
    fn from(c: Rational) -> SparsePoly {
        SparsePoly::constant(c)
    }
}
