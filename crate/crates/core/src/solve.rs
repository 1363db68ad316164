//! Gröbner bases over ℚ, univariate tools, and face-system verdicts.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::polygon::{self, Point};
use crate::poly::{int, Monomial, Rational, SparsePoly, VarId};

#[derive(Debug, Error, PartialEq)]
pub enum SolveError {
    #[error("Gröbner computation exceeded {0}")]
    ResourceLimit(String),
    #[error("variable {0} is not covered by the monomial order")]
    UnorderedVariable(VarId),
    #[error("expected a univariate polynomial in {0}")]
    NotUnivariate(VarId),
    #[error("zero polynomial")]
    ZeroPolynomial,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrderKind {
    Grevlex,
    Lex,
}

/// Monomial order over an explicit variable list (first = largest).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialOrder {
    pub vars: Vec<VarId>,
    pub kind: OrderKind,
}

impl MonomialOrder {
    pub fn grevlex(vars: &[VarId]) -> MonomialOrder {
        MonomialOrder { vars: vars.to_vec(), kind: OrderKind::Grevlex }
    }

    pub fn lex(vars: &[VarId]) -> MonomialOrder {
        MonomialOrder { vars: vars.to_vec(), kind: OrderKind::Lex }
    }

    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match self.kind {
            OrderKind::Lex => {
                for v in &self.vars {
                    match a.deg(*v).cmp(&b.deg(*v)) {
                        Ordering::Equal => continue,
                        o => return o,
                    }
                }
                Ordering::Equal
            }
            OrderKind::Grevlex => {
                let da: u32 = self.vars.iter().map(|v| a.deg(*v) as u32).sum();
                let db: u32 = self.vars.iter().map(|v| b.deg(*v) as u32).sum();
                if da != db {
                    return da.cmp(&db);
                }
                for v in self.vars.iter().rev() {
                    match a.deg(*v).cmp(&b.deg(*v)) {
                        Ordering::Equal => continue,
                        o => return o.reverse(),
                    }
                }
                Ordering::Equal
            }
        }
    }

    fn check(&self, p: &SparsePoly) -> Result<(), SolveError> {
        for v in p.variables() {
            if !self.vars.contains(&v) {
                return Err(SolveError::UnorderedVariable(v));
            }
        }
        Ok(())
    }
}

/// Resource limits for Buchberger's algorithm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GbLimits {
    pub max_basis: usize,
    pub max_pairs: usize,
}

impl Default for GbLimits {
    fn default() -> Self {
        GbLimits { max_basis: 2_000, max_pairs: 200_000 }
    }
}

/// Polynomial with terms in ascending order for a fixed monomial order.
#[derive(Clone, Debug)]
struct OPoly {
    terms: Vec<(Monomial, Rational)>,
}

impl OPoly {
    fn new(p: &SparsePoly, ord: &MonomialOrder) -> OPoly {
        let mut terms = p.terms().to_vec();
        terms.sort_by(|a, b| ord.cmp(&a.0, &b.0));
        OPoly { terms }
    }

    fn lead(&self) -> &(Monomial, Rational) {
        self.terms.last().unwrap()
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn monic(mut self) -> OPoly {
        if let Some((_, lc)) = self.terms.last() {
            let inv = lc.recip();
            for t in &mut self.terms {
                t.1 = &t.1 * &inv;
            }
        }
        self
    }

    /// `self - c * m * g`.
    fn sub_mul(&self, c: &Rational, m: &Monomial, g: &OPoly, ord: &MonomialOrder) -> OPoly {
        let mut out = Vec::with_capacity(self.terms.len() + g.terms.len());
        let mut i = 0;
        let mut j = 0;
        let shifted = |k: usize| (g.terms[k].0.mul(m), &g.terms[k].1 * c);
        let mut gj = if g.terms.is_empty() { None } else { Some(shifted(0)) };
        while i < self.terms.len() || gj.is_some() {
            match (self.terms.get(i), &gj) {
                (Some(a), Some(b)) => match ord.cmp(&a.0, &b.0) {
                    Ordering::Less => {
                        out.push((*a).clone());
                        i += 1;
                    }
                    Ordering::Greater => {
                        out.push((b.0, -b.1.clone()));
                        j += 1;
                        gj = (j < g.terms.len()).then(|| shifted(j));
                    }
                    Ordering::Equal => {
                        let s = &a.1 - &b.1;
                        if !s.is_zero() {
                            out.push((a.0, s));
                        }
                        i += 1;
                        j += 1;
                        gj = (j < g.terms.len()).then(|| shifted(j));
                    }
                },
                (Some(a), None) => {
                    out.push((*a).clone());
                    i += 1;
                }
                (None, Some(b)) => {
                    out.push((b.0, -b.1.clone()));
                    j += 1;
                    gj = (j < g.terms.len()).then(|| shifted(j));
                }
                (None, None) => unreachable!(),
            }
        }
        OPoly { terms: out }
    }

    fn to_sparse(&self) -> SparsePoly {
        SparsePoly::from_terms(self.terms.clone())
    }
}

/// Full reduction of `f` by `basis`.
fn reduce_full(f: &OPoly, basis: &[OPoly], ord: &MonomialOrder) -> OPoly {
    let mut p = f.clone();
    let mut rem: Vec<(Monomial, Rational)> = Vec::new();
    while let Some((m, c)) = p.terms.last().cloned() {
        let div = basis.iter().find(|g| g.lead().0.divides(&m));
        match div {
            Some(g) => {
                let (gm, gc) = g.lead();
                let q = m.checked_div(gm).unwrap();
                p = p.sub_mul(&(&c / gc), &q, g, ord);
            }
            None => {
                rem.push(p.terms.pop().unwrap());
            }
        }
    }
    rem.reverse();
    OPoly { terms: rem }
}

fn s_poly(f: &OPoly, g: &OPoly, ord: &MonomialOrder) -> OPoly {
    let (fm, fc) = f.lead();
    let (gm, gc) = g.lead();
    let l = fm.lcm(gm);
    let a = OPoly { terms: Vec::new() }.sub_mul(&-fc.recip(), &l.checked_div(fm).unwrap(), f, ord);
    a.sub_mul(&gc.recip(), &l.checked_div(gm).unwrap(), g, ord)
}

fn lcm_degree(m: &Monomial, ord: &MonomialOrder) -> u32 {
    ord.vars.iter().map(|v| m.deg(*v) as u32).sum()
}

/// Normal form of `f` modulo `basis` (any generating set).
pub fn normal_form(f: &SparsePoly, basis: &[SparsePoly], ord: &MonomialOrder) -> SparsePoly {
    let b: Vec<OPoly> = basis.iter().filter(|g| !g.is_zero()).map(|g| OPoly::new(g, ord)).collect();
    reduce_full(&OPoly::new(f, ord), &b, ord).to_sparse()
}

/// Leading monomial of `p` under `ord`.
pub fn leading_monomial(p: &SparsePoly, ord: &MonomialOrder) -> Option<Monomial> {
    p.terms().iter().map(|(m, _)| *m).max_by(|a, b| ord.cmp(a, b))
}

/// Reduced Gröbner basis (monic, sorted by increasing leading monomial).
///
/// Pairs are selected by smallest lcm degree, ties broken by generator
/// index; the product and chain criteria discard useless pairs.
pub fn buchberger(gens: &[SparsePoly], ord: &MonomialOrder, limits: GbLimits) -> Result<Vec<SparsePoly>, SolveError> {
    for g in gens {
        ord.check(g)?;
    }
    let mut basis: Vec<OPoly> = Vec::new();
    for g in gens.iter().filter(|g| !g.is_zero()) {
        let r = reduce_full(&OPoly::new(g, ord), &basis, ord);
        if !r.is_zero() {
            basis.push(r.monic());
        }
    }
    if basis.iter().any(|g| g.lead().0.is_one()) {
        return Ok(vec![SparsePoly::one()]);
    }
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for j in 0..basis.len() {
        for i in 0..j {
            pairs.push((i, j));
        }
    }
    let mut processed = std::collections::HashSet::new();
    let mut count = 0usize;
    while !pairs.is_empty() {
        count += 1;
        if count > limits.max_pairs {
            return Err(SolveError::ResourceLimit(format!("{} pairs", limits.max_pairs)));
        }
        // Normal strategy.
        let (pos, _) = pairs
            .iter()
            .enumerate()
            .min_by_key(|(_, &(i, j))| (lcm_degree(&basis[i].lead().0.lcm(&basis[j].lead().0), ord), j, i))
            .unwrap();
        let (i, j) = pairs.swap_remove(pos);
        processed.insert((i, j));
        let (mi, mj) = (basis[i].lead().0, basis[j].lead().0);
        let l = mi.lcm(&mj);
        // Product criterion.
        if mi.gcd(&mj).is_one() {
            continue;
        }
        // Chain criterion.
        let key = |a: usize, b: usize| (a.min(b), a.max(b));
        if (0..basis.len()).any(|k| {
            k != i && k != j && basis[k].lead().0.divides(&l) && processed.contains(&key(i, k)) && processed.contains(&key(j, k))
        }) {
            continue;
        }
        let s = s_poly(&basis[i], &basis[j], ord);
        let r = reduce_full(&s, &basis, ord);
        if r.is_zero() {
            continue;
        }
        let r = r.monic();
        if r.lead().0.is_one() {
            return Ok(vec![SparsePoly::one()]);
        }
        basis.push(r);
        if basis.len() > limits.max_basis {
            return Err(SolveError::ResourceLimit(format!("{} basis elements", limits.max_basis)));
        }
        let n = basis.len() - 1;
        for k in 0..n {
            pairs.push((k, n));
        }
    }
    // Minimalize and inter-reduce.
    let mut minimal: Vec<OPoly> = Vec::new();
    for (idx, g) in basis.iter().enumerate() {
        let m = g.lead().0;
        let redundant = basis.iter().enumerate().any(|(k, h)| {
            k != idx && h.lead().0.divides(&m) && (h.lead().0 != m || k < idx)
        });
        if !redundant {
            minimal.push(g.clone());
        }
    }
    let mut reduced = Vec::new();
    for idx in 0..minimal.len() {
        let others: Vec<OPoly> = minimal.iter().enumerate().filter(|(k, _)| *k != idx).map(|(_, g)| g.clone()).collect();
        let lead = minimal[idx].terms.last().cloned().unwrap();
        let tail = OPoly { terms: minimal[idx].terms[..minimal[idx].terms.len() - 1].to_vec() };
        let mut r = reduce_full(&tail, &others, ord);
        r.terms.push(lead);
        reduced.push(r.monic());
    }
    reduced.sort_by(|a, b| ord.cmp(&a.lead().0, &b.lead().0));
    Ok(reduced.iter().map(|g| g.to_sparse()).collect())
}

/// Whether a basis is the unit ideal.
pub fn is_unit_basis(basis: &[SparsePoly]) -> bool {
    basis.len() == 1 && basis[0].is_constant() && !basis[0].is_zero()
}

// ---------------------------------------------------------------------------
// Univariate polynomials over ℚ

/// Dense univariate polynomial, coefficients from degree 0 upward.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniPoly {
    pub coeffs: Vec<Rational>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> UniPoly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> UniPoly {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn one() -> UniPoly {
        UniPoly { coeffs: vec![int(1)] }
    }

    pub fn from_sparse(p: &SparsePoly, v: VarId) -> Result<UniPoly, SolveError> {
        if p.variables().iter().any(|w| *w != v) {
            return Err(SolveError::NotUnivariate(v));
        }
        let mut c = vec![Rational::zero(); p.degree_in(v) as usize + 1];
        for (m, x) in p.terms() {
            c[m.deg(v) as usize] = x.clone();
        }
        Ok(UniPoly::new(c))
    }

    pub fn to_sparse(&self, v: VarId) -> SparsePoly {
        SparsePoly::from_terms(
            self.coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(e, c)| (Monomial::var(v, e as u16), c.clone()))
                .collect(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lc(&self) -> &Rational {
        self.coeffs.last().unwrap()
    }

    pub fn monic(&self) -> UniPoly {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.lc().recip();
        UniPoly::new(self.coeffs.iter().map(|c| c * &inv).collect())
    }

    pub fn add(&self, o: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let z = Rational::zero();
        UniPoly::new((0..n).map(|i| self.coeffs.get(i).unwrap_or(&z) + o.coeffs.get(i).unwrap_or(&z)).collect())
    }

    pub fn neg(&self) -> UniPoly {
        UniPoly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn sub(&self, o: &UniPoly) -> UniPoly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &UniPoly) -> UniPoly {
        if self.is_zero() || o.is_zero() {
            return UniPoly::zero();
        }
        let mut c = vec![Rational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        UniPoly::new(c)
    }

    pub fn divrem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let mut r = self.coeffs.clone();
        let dd = d.coeffs.len() - 1;
        if r.len() <= dd {
            return (UniPoly::zero(), self.clone());
        }
        let inv = d.lc().recip();
        let mut q = vec![Rational::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] * &inv;
            if !c.is_zero() {
                for (j, x) in d.coeffs.iter().enumerate() {
                    r[k + j] -= &c * x;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (UniPoly::new(q), UniPoly::new(r))
    }

    pub fn derivative(&self) -> UniPoly {
        UniPoly::new(self.coeffs.iter().enumerate().skip(1).map(|(e, c)| c * Rational::from_integer(e.into())).collect())
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    /// Monic gcd.
    pub fn gcd(&self, o: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.divrem(&b).1;
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// `(g, s, t)` with `s*self + t*o = g`, `g` monic.
    pub fn ext_gcd(&self, o: &UniPoly) -> (UniPoly, UniPoly, UniPoly) {
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (UniPoly::one(), UniPoly::zero());
        let (mut t0, mut t1) = (UniPoly::zero(), UniPoly::one());
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            let s = s0.sub(&q.mul(&s1));
            let t = t0.sub(&q.mul(&t1));
            (r0, r1) = (r1, r);
            (s0, s1) = (s1, s);
            (t0, t1) = (t1, t);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = UniPoly { coeffs: vec![r0.lc().recip()] };
        (r0.mul(&inv), s0.mul(&inv), t0.mul(&inv))
    }

    /// Squarefree decomposition (Yun): `self = lc * prod f_i^i`.
    pub fn squarefree(&self) -> Vec<(UniPoly, u32)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let fp = f.derivative();
        let a0 = f.gcd(&fp);
        let mut b = f.divrem(&a0).0;
        let mut c = fp.divrem(&a0).0;
        let mut d = c.sub(&b.derivative());
        let mut i = 1;
        loop {
            let a = b.gcd(&d);
            if a.degree().unwrap_or(0) > 0 {
                out.push((a.clone(), i));
            }
            b = b.divrem(&a).0;
            if b.degree().unwrap_or(0) == 0 {
                break;
            }
            c = d.divrem(&a).0;
            d = c.sub(&b.derivative());
            i += 1;
        }
        out
    }

    /// Resultant by the Euclidean remainder sequence.
    pub fn resultant(&self, o: &UniPoly) -> Rational {
        if self.is_zero() || o.is_zero() {
            return Rational::zero();
        }
        let (da, db) = (self.degree().unwrap(), o.degree().unwrap());
        if db == 0 {
            return pow_rat(o.lc(), da as u32);
        }
        if da == 0 {
            return pow_rat(self.lc(), db as u32);
        }
        let r = self.divrem(o).1;
        if r.is_zero() {
            return Rational::zero();
        }
        let dr = r.degree().unwrap();
        let sign = if da % 2 == 1 && db % 2 == 1 { -Rational::one() } else { Rational::one() };
        sign * pow_rat(o.lc(), (da - dr) as u32) * o.resultant(&r)
    }
}

fn pow_rat(x: &Rational, e: u32) -> Rational {
    num_traits::pow(x.clone(), e as usize)
}

/// Positive divisors of `n` when `n` has no prime factor above the trial bound.
fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let mut n = n.abs();
    if n.is_zero() {
        return None;
    }
    let mut primes: Vec<(BigInt, u32)> = Vec::new();
    let mut p = BigInt::from(2);
    let bound = BigInt::from(1_000_000u32);
    while &p * &p <= n {
        if p > bound {
            return None;
        }
        let mut e = 0;
        while (&n % &p).is_zero() {
            n /= &p;
            e += 1;
        }
        if e > 0 {
            primes.push((p.clone(), e));
        }
        p += if p == BigInt::from(2) { 1 } else { 2 };
    }
    if n > BigInt::one() {
        primes.push((n, 1));
    }
    let mut divs = vec![BigInt::one()];
    for (p, e) in primes {
        let mut next = Vec::new();
        for d in &divs {
            let mut x = d.clone();
            for _ in 0..=e {
                next.push(x.clone());
                x *= &p;
            }
        }
        divs = next;
    }
    divs.sort();
    Some(divs)
}

/// Rational roots with multiplicity plus the part without rational roots.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RationalFactorization {
    pub roots: Vec<(String, u32)>,
    /// Remaining factor (canonical text); `"1"` when fully split.
    pub remainder: String,
    /// True when the remainder is nonconstant, or root search was incomplete.
    pub flagged: bool,
    #[serde(skip)]
    pub root_values: Vec<(Rational, u32)>,
}

/// Squarefree decomposition plus rational-root extraction.
pub fn factor_univariate_rational(p: &SparsePoly, v: VarId) -> Result<RationalFactorization, SolveError> {
    if p.is_zero() {
        return Err(SolveError::ZeroPolynomial);
    }
    let u = UniPoly::from_sparse(p, v)?;
    let mut roots: Vec<(Rational, u32)> = Vec::new();
    let mut remainder = UniPoly::one();
    let mut incomplete = false;
    for (f, mult) in u.squarefree() {
        let mut f = f;
        // Root 0 first.
        if f.coeffs[0].is_zero() {
            roots.push((Rational::zero(), mult));
            f = f.divrem(&UniPoly::new(vec![int(0), int(1)])).0;
        }
        if f.degree().unwrap_or(0) > 0 {
            // Integer form.
            let den = f.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
            let ints: Vec<BigInt> = f.coeffs.iter().map(|c| (c * Rational::from_integer(den.clone())).to_integer()).collect();
            match (divisors(&ints[0]), divisors(ints.last().unwrap())) {
                (Some(ps), Some(qs)) => {
                    let mut found = Vec::new();
                    for pn in &ps {
                        for qd in &qs {
                            if pn.gcd(qd) != BigInt::one() {
                                continue;
                            }
                            for sign in [1i32, -1] {
                                let r = Rational::new(pn * sign, qd.clone());
                                if f.eval(&r).is_zero() && !found.contains(&r) {
                                    found.push(r);
                                }
                            }
                        }
                    }
                    for r in found {
                        f = f.divrem(&UniPoly::new(vec![-r.clone(), int(1)])).0;
                        roots.push((r, mult));
                    }
                }
                _ => incomplete = true,
            }
        }
        for _ in 0..mult {
            remainder = remainder.mul(&f);
        }
    }
    roots.sort_by(|a, b| a.0.cmp(&b.0));
    let rem = remainder.monic();
    let flagged = incomplete || rem.degree().unwrap_or(0) > 0;
    Ok(RationalFactorization {
        roots: roots.iter().map(|(r, m)| (r.to_string(), *m)).collect(),
        remainder: rem.to_sparse(v).to_string(),
        flagged,
        root_values: roots,
    })
}

// ---------------------------------------------------------------------------
// Face verdicts

/// Outcome for one inner normal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Verdict {
    /// Face `index` (0-based minor index) is a single monomial.
    VertexFace { index: usize },
    NoNonzeroSolution,
    /// Nonzero rational roots `(root, multiplicity)` of the dehomogenized basis.
    CandidateRoots { roots: Vec<(String, u32)>, flagged_remainder: Option<String> },
}

/// Verdict plus evidence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FaceVerdict {
    pub normal: Point,
    pub verdict: Verdict,
    /// Stripped faces in canonical text.
    pub faces: Vec<String>,
    /// The normalization generator adjoined.
    pub normalization: String,
    /// Reduced Gröbner basis of the normalized face system.
    pub basis: Vec<String>,
    /// Basis of the dehomogenized system in `k` (the free coordinate).
    pub dehomogenized_basis: Vec<String>,
    /// Which distance the free coordinate `k` stands for.
    pub k_is: String,
    /// Independent check: univariate elimination agrees with the verdict.
    pub cross_check: bool,
}

/// `r13^p r23^q - 1` with `a p + b q != 0`: meets every orbit of the scaling.
pub fn normalization_for(normal: Point) -> SparsePoly {
    let (p, q) = if normal.0 + normal.1 != 0 { (1, 1) } else { (1, 0) };
    SparsePoly::term(Monomial::from_pairs(&[(VarId::R13, p), (VarId::R23, q)]), int(1)).sub(&SparsePoly::one())
}

/// Dehomogenize a quasi-homogeneous face: `r23 → 1, r13 → k` when `b ≠ 0`,
/// else `r13 → 1, r23 → k`.
pub fn dehomogenize(face: &SparsePoly, normal: Point) -> SparsePoly {
    let one = int(1);
    if normal.1 != 0 {
        face.subst_const(VarId::R23, &one).rename(&[(VarId::R13, VarId::K)])
    } else {
        face.subst_const(VarId::R13, &one).rename(&[(VarId::R23, VarId::K)])
    }
}

/// Decide whether the face system for `normal` has a common root with both
/// coordinates nonzero.
pub fn face_verdict(normal: Point, minors: &[SparsePoly], limits: GbLimits) -> Result<FaceVerdict, SolveError> {
    let mut faces = Vec::new();
    let mut raw_faces = Vec::new();
    for (i, g) in minors.iter().enumerate() {
        let f = polygon::face_restrict(g, normal).map_err(|_| SolveError::ZeroPolynomial)?;
        if f.is_vertex {
            return Ok(FaceVerdict {
                normal,
                verdict: Verdict::VertexFace { index: i },
                faces: vec![f.poly.to_string()],
                normalization: String::new(),
                basis: Vec::new(),
                dehomogenized_basis: Vec::new(),
                k_is: String::new(),
                cross_check: true,
            });
        }
        faces.push(f.poly.stripped());
        raw_faces.push(f.poly.primitive());
    }
    let norm = normalization_for(normal);
    let mut gens = faces.clone();
    gens.push(norm.clone());
    let ord = MonomialOrder::grevlex(&[VarId::R13, VarId::R23]);
    let basis = buchberger(&gens, &ord, limits)?;
    let unit = is_unit_basis(&basis);
    // Dehomogenize the faces before monomial stripping so that the basis
    // keeps the root k = 0 with its multiplicity.
    let deh: Vec<SparsePoly> = raw_faces.iter().map(|f| dehomogenize(f, normal)).collect();
    let kbasis = buchberger(&deh, &MonomialOrder::grevlex(&[VarId::K]), limits)?;
    let k_is = if normal.1 != 0 { "r13" } else { "r23" };
    // Independent path: Euclidean gcd of the dehomogenized faces.
    let mut g = UniPoly::zero();
    for d in &deh {
        g = g.gcd(&UniPoly::from_sparse(d, VarId::K)?);
    }
    let x = UniPoly::new(vec![int(0), int(1)]);
    let mut g_nz = g.clone();
    while g_nz.degree().unwrap_or(0) > 0 && g_nz.coeffs[0].is_zero() {
        g_nz = g_nz.divrem(&x).0;
    }
    let has_nonzero_root = g_nz.degree().unwrap_or(0) > 0;
    let cross_check = has_nonzero_root != unit && kbasis.len() == 1 && UniPoly::from_sparse(&kbasis[0], VarId::K)? == g;
    let verdict = if unit {
        Verdict::NoNonzeroSolution
    } else {
        let fac = factor_univariate_rational(&kbasis[0], VarId::K)?;
        let roots: Vec<(String, u32)> =
            fac.root_values.iter().filter(|(r, _)| !r.is_zero()).map(|(r, m)| (r.to_string(), *m)).collect();
        Verdict::CandidateRoots { roots, flagged_remainder: fac.flagged.then(|| fac.remainder.clone()) }
    };
    Ok(FaceVerdict {
        normal,
        verdict,
        faces: faces.iter().map(|f| f.to_string()).collect(),
        normalization: norm.to_string(),
        basis: basis.iter().map(|b| b.to_string()).collect(),
        dehomogenized_basis: kbasis.iter().map(|b| b.primitive().to_string()).collect(),
        k_is: k_is.to_string(),
        cross_check,
    })
}

/// Resultant-based check that two bivariate quasi-homogeneous faces have
/// no common root with nonzero coordinates.
pub fn resultant_excludes(f: &SparsePoly, g: &SparsePoly, normal: Point) -> Result<bool, SolveError> {
    let strip0 = |u: UniPoly| {
        let x = UniPoly::new(vec![int(0), int(1)]);
        let mut u = u;
        while u.degree().unwrap_or(0) > 0 && u.coeffs[0].is_zero() {
            u = u.divrem(&x).0;
        }
        u
    };
    let a = strip0(UniPoly::from_sparse(&dehomogenize(f, normal), VarId::K)?);
    let b = strip0(UniPoly::from_sparse(&dehomogenize(g, normal), VarId::K)?);
    Ok(!a.resultant(&b).is_zero())
}

/// Integer-valued helper for reports.
pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    fn p(s: &str) -> SparsePoly {
        SparsePoly::parse_lenient(s).unwrap()
    }

    #[test]
    fn single_generator_basis() {
        let ord = MonomialOrder::grevlex(&[VarId::K]);
        assert_eq!(buchberger(&[p("+1 k^2 +1 k")], &ord, GbLimits::default()).unwrap(), vec![p("+1 k^2 +1 k")]);
        let b = buchberger(&[p("+1 k"), p("+1 k +1")], &ord, GbLimits::default()).unwrap();
        assert!(is_unit_basis(&b));
    }

    #[test]
    fn reference_face_system_is_inconsistent() {
        let ord = MonomialOrder::grevlex(&[VarId::R13, VarId::R23]);
        let gens = [
            p("+3 r13 +1 r23^3"),
            p("+12636 r13^3 +9828 r13 r23^3 +1915 r23^6"),
            p("+1 r13 r23 -1"),
        ];
        assert!(is_unit_basis(&buchberger(&gens, &ord, GbLimits::default()).unwrap()));
    }

    #[test]
    fn classic_basis() {
        // x^2 + y^2 - 1, x - y under lex x > y  ->  {y^2 - 1/2, x - y}
        let ord = MonomialOrder::lex(&[VarId::R13, VarId::R23]);
        let b = buchberger(&[p("+1 r13^2 +1 r23^2 -1"), p("+1 r13 -1 r23")], &ord, GbLimits::default()).unwrap();
        assert_eq!(b, vec![p("+1 r23^2 -1/2"), p("+1 r13 -1 r23")]);
    }

    #[test]
    fn univariate_factoring() {
        let f = factor_univariate_rational(&p("+1 k^2 +1 k"), VarId::K).unwrap();
        assert_eq!(f.root_values, vec![(rat(-1, 1), 1), (rat(0, 1), 1)]);
        let big = p("+1 k^21").mul(&p("+1 k -1").pow(7)).mul(&p("+1 k +1").pow(7));
        let f = factor_univariate_rational(&big, VarId::K).unwrap();
        assert_eq!(f.root_values, vec![(rat(-1, 1), 7), (rat(0, 1), 21), (rat(1, 1), 7)]);
        assert!(!f.flagged);
        let f = factor_univariate_rational(&p("+1 k^2 +1"), VarId::K).unwrap();
        assert!(f.roots.is_empty() && f.flagged);
        let f = factor_univariate_rational(&p("+6 k^2 -1 k -1"), VarId::K).unwrap();
        assert_eq!(f.root_values, vec![(rat(-1, 3), 1), (rat(1, 2), 1)]);
    }

    #[test]
    fn ext_gcd_and_resultant() {
        let a = UniPoly::from_sparse(&p("+1 k^2 -1"), VarId::K).unwrap();
        let b = UniPoly::from_sparse(&p("+1 k^2 +1 k"), VarId::K).unwrap();
        let (g, s, t) = a.ext_gcd(&b);
        assert_eq!(g, UniPoly::from_sparse(&p("+1 k +1"), VarId::K).unwrap());
        assert_eq!(s.mul(&a).add(&t.mul(&b)), g);
        assert!(a.resultant(&b).is_zero());
        let c = UniPoly::from_sparse(&p("+1 k -2"), VarId::K).unwrap();
        assert_eq!(a.resultant(&c), int(3));
    }
}
