//! Branch exclusion for candidate leading exponents: series substitution,
//! Newton diagrams, order-by-order solving and the implicit-function
//! certificate.
//!
//! Two routes:
//! * both exponents positive (e.g. `(1,1)`): the IFT certificate shows the
//!   branch is an integer power series `r23 = s`, `r13 = k s + a2 s^2 + …`,
//!   and the coefficients are solved order by order;
//! * one exponent zero (e.g. `(0,1)`): `r23 = s`, `r13 = k + u`, and each
//!   `F_i(s, u) = G_i(k + u, s) / s^(m_i)` is analysed with its Newton diagram.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::polygon::Point;
use crate::poly::{int, Monomial, Rational, SparsePoly, VarId, MAX_TAIL};
use crate::solve::{self, GbLimits, MonomialOrder, SolveError, UniPoly};

#[derive(Debug, Error, PartialEq)]
pub enum PuiseuxError {
    #[error("Newton diagram has no segment of negative slope")]
    NoBranch,
    #[error("F(0,0) != 0")]
    NotThroughOrigin,
    #[error("root {0} of multiplicity above one: the implicit function theorem does not apply")]
    DegenerateRoot(String),
    #[error("{0} is not a root of the combined polynomial")]
    NotARoot(String),
    #[error("truncation {0} is outside 1..=16")]
    BadTruncation(u32),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

fn rat_str(r: &Rational) -> String {
    r.to_string()
}

/// Parameter variables carried through the branch analysis.
const PARAMS: [VarId; 2] = [VarId::H, VarId::OM];

/// Group a polynomial in `r13, r23` (coefficients in other variables) by
/// its `(r13, r23)` exponent.
fn by_exponent(p: &SparsePoly) -> BTreeMap<Point, SparsePoly> {
    let mut groups: BTreeMap<Point, Vec<(Monomial, Rational)>> = BTreeMap::new();
    for (m, c) in p.terms() {
        let key = (m.deg(VarId::R13) as i64, m.deg(VarId::R23) as i64);
        groups.entry(key).or_default().push((m.with_deg(VarId::R13, 0).with_deg(VarId::R23, 0), c.clone()));
    }
    groups.into_iter().map(|(k, v)| (k, SparsePoly::from_terms(v))).collect()
}

// ---------------------------------------------------------------------------
// Power-series route

/// `r23 = s^b`, `r13 = s^a (k + a2 s + … + aN s^(N-1))`.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesAnsatz {
    pub normal: Point,
    pub root: Rational,
    /// Highest tail coefficient `a_N` (`2 ≤ N ≤ 16`); the coefficient of
    /// relative order `j` involves `a_2 … a_(j+1)`, so orders `0 … N-1` are exact.
    pub truncation: u32,
}

impl SeriesAnsatz {
    pub fn tail_vars(&self) -> Vec<VarId> {
        (2..=self.truncation as usize).map(VarId::tail).collect()
    }
}

/// Exact low-order coefficients of a composed series.
#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    /// Order of `coeffs[0]` (the face weight).
    pub start: i64,
    pub coeffs: Vec<SparsePoly>,
    /// Orders beyond the last coefficient were dropped.
    pub truncated: bool,
}

/// Truncated powers `K^m`, `m = 0..=max`, of `K = k + a2 s + …`.
fn truncated_powers(ansatz: &SeriesAnsatz, max: usize, len: usize) -> Vec<Vec<SparsePoly>> {
    let mut k = vec![SparsePoly::constant(ansatz.root.clone())];
    for v in ansatz.tail_vars() {
        k.push(SparsePoly::var(v));
    }
    k.truncate(len);
    let mul = |a: &[SparsePoly], b: &[SparsePoly]| -> Vec<SparsePoly> {
        (0..len)
            .map(|l| {
                let parts: Vec<SparsePoly> = (0..=l)
                    .filter(|&i| i < a.len() && l - i < b.len())
                    .map(|i| a[i].mul(&b[l - i]))
                    .collect();
                SparsePoly::sum(parts.iter())
            })
            .collect()
    };
    let mut out = vec![{
        let mut one = vec![SparsePoly::zero(); len];
        one[0] = SparsePoly::one();
        one
    }];
    for m in 1..=max {
        out.push(mul(&out[m - 1], &k));
    }
    out
}

/// Coefficients of `s^d … s^(d+N-1)` of `G(r13(s), r23(s))`, `d` the face weight.
pub fn series_substitute(g: &SparsePoly, ansatz: &SeriesAnsatz) -> Result<Series, PuiseuxError> {
    let n = ansatz.truncation as usize;
    if !(1..=MAX_TAIL).contains(&n) {
        return Err(PuiseuxError::BadTruncation(ansatz.truncation));
    }
    let (a, b) = ansatz.normal;
    let groups = by_exponent(g);
    let start = groups.keys().map(|&(m, nn)| a * m + b * nn).min().unwrap_or(0);
    let needed: Vec<(&Point, &SparsePoly)> =
        groups.iter().filter(|(&(m, nn), _)| a * m + b * nn - start < n as i64).collect();
    let max_m = needed.iter().map(|(p, _)| p.0 as usize).max().unwrap_or(0);
    let pows = truncated_powers(ansatz, max_m, n);
    let mut coeffs: Vec<Vec<SparsePoly>> = vec![Vec::new(); n];
    for (&(m, nn), c) in needed {
        let base = (a * m + b * nn - start) as usize;
        for l in 0..n - base {
            let t = &pows[m as usize][l];
            if !t.is_zero() {
                coeffs[base + l].push(c.mul(t));
            }
        }
    }
    let coeffs = coeffs.iter().map(|parts| SparsePoly::sum(parts.iter())).collect();
    Ok(Series { start, coeffs, truncated: true })
}

// ---------------------------------------------------------------------------
// IFT certificate

/// `Σ φ_i F_i(k, 0) = P(k)` with `P(root) = 0`, `P'(root) ≠ 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IftCertificate {
    pub cofactors: Vec<String>,
    pub combined: String,
    pub root: String,
    pub derivative_at_root: String,
}

/// Bezout cofactors for the gcd of the `F_i(k, 0)` and the nondegeneracy check.
pub fn ift_certify(root: &Rational, faces_at_s0: &[SparsePoly]) -> Result<IftCertificate, PuiseuxError> {
    let polys: Vec<UniPoly> =
        faces_at_s0.iter().map(|f| UniPoly::from_sparse(f, VarId::K)).collect::<Result<_, _>>()?;
    // Plain gcd first: cofactor growth is only paid for genuine roots.
    let g = polys.iter().fold(UniPoly::zero(), |acc, p| acc.gcd(p));
    if !g.eval(root).is_zero() {
        return Err(PuiseuxError::NotARoot(rat_str(root)));
    }
    let mut g = UniPoly::zero();
    let mut phis: Vec<UniPoly> = Vec::new();
    for p in &polys {
        let (ng, s, t) = g.ext_gcd(p);
        for phi in &mut phis {
            *phi = phi.mul(&s);
        }
        phis.push(t);
        g = ng;
    }
    // Identity check.
    let combo = phis.iter().zip(&polys).fold(UniPoly::zero(), |acc, (phi, p)| acc.add(&phi.mul(p)));
    assert_eq!(combo, g, "Bezout identity failed");
    if !g.eval(root).is_zero() {
        return Err(PuiseuxError::NotARoot(rat_str(root)));
    }
    let dp = g.derivative().eval(root);
    if dp.is_zero() {
        return Err(PuiseuxError::DegenerateRoot(rat_str(root)));
    }
    Ok(IftCertificate {
        cofactors: phis.iter().map(|p| p.to_sparse(VarId::K).to_string()).collect(),
        combined: g.to_sparse(VarId::K).to_string(),
        root: rat_str(root),
        derivative_at_root: rat_str(&dp),
    })
}

/// `F_i(k, 0)`: the faces dehomogenized at `r23 = 1` (or `r13 = 1`).
pub fn faces_at_s0(minors: &[SparsePoly], normal: Point) -> Vec<SparsePoly> {
    minors
        .iter()
        .map(|g| {
            let f = crate::polygon::face_restrict(g, normal).expect("nonzero minor");
            solve::dehomogenize(&f.poly.primitive(), normal)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Newton diagrams

/// Lower-left boundary of a support in the `(s-exponent, u-exponent)` plane.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NewtonDiagram {
    pub support: Vec<Point>,
    /// Vertices of the negative-slope chain from the u-axis toward the s-axis.
    pub chain: Vec<Point>,
    /// `(from, to, slope, d = -1/slope)` with slope and `d` as rational strings.
    pub segments: Vec<(Point, Point, String, String)>,
    /// `F(s, 0) ≢ 0`.
    pub meets_s_axis: bool,
}

impl NewtonDiagram {
    pub fn candidates(&self) -> Vec<Rational> {
        self.segments
            .iter()
            .map(|(a, b, _, _)| Rational::new((b.0 - a.0).into(), (a.1 - b.1).into()))
            .collect()
    }
}

/// Support of `F` in the `(s, u)` plane (coefficients may involve `h, om`).
fn su_support(f: &SparsePoly) -> Vec<Point> {
    let mut pts: Vec<Point> =
        f.terms().iter().map(|(m, _)| (m.deg(VarId::S) as i64, m.deg(VarId::U) as i64)).collect();
    pts.sort_unstable();
    pts.dedup();
    pts
}

/// Negative-slope part of the lower hull; candidate leading exponents `d = -1/slope`.
pub fn newton_diagram(f: &SparsePoly) -> Result<NewtonDiagram, PuiseuxError> {
    let support = su_support(f);
    if support.contains(&(0, 0)) {
        return Err(PuiseuxError::NotThroughOrigin);
    }
    let meets_s_axis = support.iter().any(|p| p.1 == 0);
    let Some(&start) = support.iter().filter(|p| p.0 == 0).min_by_key(|p| p.1) else {
        return Err(PuiseuxError::NoBranch);
    };
    let mut chain = vec![start];
    let mut cur = start;
    loop {
        // Most negative slope to a point further right; ties go farthest.
        let mut best: Option<(Point, Rational)> = None;
        for &p in support.iter().filter(|p| p.0 > cur.0) {
            let slope = Rational::new((p.1 - cur.1).into(), (p.0 - cur.0).into());
            let better = match &best {
                None => true,
                Some((bp, bs)) => slope < *bs || (slope == *bs && p.0 > bp.0),
            };
            if better {
                best = Some((p, slope));
            }
        }
        match best {
            Some((p, slope)) if slope.is_negative() => {
                chain.push(p);
                cur = p;
            }
            _ => break,
        }
    }
    if chain.len() < 2 {
        return Err(PuiseuxError::NoBranch);
    }
    let segments = chain
        .windows(2)
        .map(|w| {
            let slope = Rational::new((w[1].1 - w[0].1).into(), (w[1].0 - w[0].0).into());
            let d = -slope.recip();
            (w[0], w[1], rat_str(&slope), rat_str(&d))
        })
        .collect();
    Ok(NewtonDiagram { support, chain, segments, meets_s_axis })
}

/// `F(s, u) = G(k + u, s) / s^m` for normal `(0, 1)`, or with the roles of
/// `r13, r23` exchanged for `(1, 0)`.  Returns `F` and `m`.
pub fn shifted_equation(g: &SparsePoly, normal: Point, root: &Rational) -> (SparsePoly, u16) {
    let (fixed, series) = if normal.0 == 0 { (VarId::R13, VarId::R23) } else { (VarId::R23, VarId::R13) };
    let shift = SparsePoly::var(VarId::U).add(&SparsePoly::constant(root.clone()));
    let f = g.subst_poly(fixed, &shift).rename(&[(series, VarId::S)]);
    let m = f.min_degree_in(VarId::S);
    let f = f.div_exact(&SparsePoly::term(Monomial::var(VarId::S, m), int(1))).unwrap();
    (f, m)
}

/// Leading form of `F` along `u = a s^d`: terms minimizing `q e_s + p e_u`
/// (`d = p/q`), with `u^e` replaced by `a^e`.
pub fn leading_form(f: &SparsePoly, d: &Rational) -> SparsePoly {
    let (p, q) = (d.numer().clone(), d.denom().clone());
    let w = |m: &Monomial| &q * m.deg(VarId::S) as i64 + &p * m.deg(VarId::U) as i64;
    let min = f.terms().iter().map(|(m, _)| w(m)).min().unwrap();
    SparsePoly::from_terms(
        f.terms()
            .iter()
            .filter(|(m, _)| w(m) == min)
            .map(|(m, c)| (m.with_deg(VarId::S, 0).with_deg(VarId::A, m.deg(VarId::U)).with_deg(VarId::U, 0), c.clone()))
            .collect(),
    )
}

// ---------------------------------------------------------------------------
// Branch verdicts

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Outcome {
    Inconsistent { order: i64, witnesses: Vec<String> },
    ParameterConstraintThenInconsistent { constraints: Vec<String>, order: i64, witnesses: Vec<String> },
    Unresolved { reason: String },
}

impl Outcome {
    pub fn is_excluded(&self) -> bool {
        !matches!(self, Outcome::Unresolved { .. })
    }
}

/// Equations and basis at one relative order (power-series route) or one
/// candidate exponent (Newton-diagram route).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TranscriptStep {
    pub label: String,
    pub equations: Vec<String>,
    pub basis: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchVerdict {
    pub normal: Point,
    pub root: String,
    pub method: String,
    pub truncation: u32,
    pub outcome: Outcome,
    pub transcript: Vec<TranscriptStep>,
    /// Lowest orders `d_i` (power series) or stripped powers `m_i` (Newton diagram).
    pub degrees: Vec<i64>,
    pub ift: Option<IftCertificate>,
    pub diagrams: Vec<NewtonDiagram>,
}

fn series_order(ansatz: &SeriesAnsatz) -> MonomialOrder {
    let mut vars: Vec<VarId> = ansatz.tail_vars().into_iter().rev().collect();
    vars.extend(PARAMS);
    MonomialOrder::lex(&vars)
}

/// Solve order by order.  Parameter constraints found on the way are kept
/// as generators of the running ideal.
pub fn power_series_branch(
    minors: &[SparsePoly],
    ansatz: &SeriesAnsatz,
    limits: GbLimits,
) -> Result<(Outcome, Vec<TranscriptStep>, Vec<i64>), PuiseuxError> {
    let series: Vec<Series> = minors.iter().map(|g| series_substitute(g, ansatz)).collect::<Result<_, _>>()?;
    let degrees = series.iter().map(|s| s.start).collect();
    let ord = series_order(ansatz);
    let mut ideal: Vec<SparsePoly> = Vec::new();
    let mut transcript = Vec::new();
    let mut constraints: Vec<String> = Vec::new();
    for j in 0..ansatz.truncation as usize {
        let eqs: Vec<SparsePoly> = series.iter().map(|s| s.coeffs[j].clone()).filter(|c| !c.is_zero()).collect();
        let eqs: Vec<SparsePoly> = eqs.iter().map(|e| e.primitive()).collect();
        ideal.extend(eqs.iter().cloned());
        let basis = solve::buchberger(&ideal, &ord, limits)?;
        transcript.push(TranscriptStep {
            label: format!("order {j}"),
            equations: eqs.iter().map(|e| e.to_string()).collect(),
            basis: basis.iter().map(|b| b.to_string()).collect(),
        });
        if solve::is_unit_basis(&basis) {
            let witnesses = eqs.iter().map(|e| e.to_string()).collect();
            let outcome = if constraints.is_empty() {
                Outcome::Inconsistent { order: j as i64, witnesses }
            } else {
                Outcome::ParameterConstraintThenInconsistent { constraints, order: j as i64, witnesses }
            };
            return Ok((outcome, transcript, degrees));
        }
        for b in &basis {
            if b.variables().iter().all(|v| PARAMS.contains(v)) && !constraints.contains(&b.to_string()) {
                constraints.push(b.to_string());
            }
        }
        ideal = basis;
    }
    Ok((Outcome::Unresolved { reason: format!("TruncationInsufficient: consistent through a{}", ansatz.truncation) }, transcript, degrees))
}

/// Newton-diagram route for a normal with one zero exponent.
pub fn newton_branch(
    minors: &[SparsePoly],
    normal: Point,
    root: &Rational,
    limits: GbLimits,
) -> Result<(Outcome, Vec<TranscriptStep>, Vec<i64>, Vec<NewtonDiagram>), PuiseuxError> {
    let shifted: Vec<(SparsePoly, u16)> = minors.iter().map(|g| shifted_equation(g, normal, root)).collect();
    let degrees = shifted.iter().map(|(_, m)| *m as i64).collect();
    let diagrams: Vec<NewtonDiagram> = shifted.iter().map(|(f, _)| newton_diagram(f)).collect::<Result<_, _>>()?;
    let mut transcript = Vec::new();
    if diagrams.iter().all(|d| !d.meets_s_axis) {
        return Ok((
            Outcome::Unresolved { reason: "every F_i vanishes on u = 0".to_string() },
            transcript,
            degrees,
            diagrams,
        ));
    }
    transcript.push(TranscriptStep {
        label: "u = 0".to_string(),
        equations: shifted.iter().map(|(f, _)| f.subst_const(VarId::U, &Rational::zero()).to_string()).collect(),
        basis: vec![SparsePoly::one().to_string()],
    });
    // A branch u = a s^d + … must balance every F_i.
    let mut cands: Vec<Rational> = diagrams[0].candidates();
    for d in &diagrams[1..] {
        let c = d.candidates();
        cands.retain(|x| c.contains(x));
    }
    cands.sort();
    cands.dedup();
    let t_rel = SparsePoly::var(VarId::A).mul(&SparsePoly::var(VarId::T)).sub(&SparsePoly::one());
    let ord = MonomialOrder::lex(&[VarId::T, VarId::A, VarId::H, VarId::OM]);
    let mut witnesses = Vec::new();
    for d in &cands {
        let mut eqs: Vec<SparsePoly> = shifted.iter().map(|(f, _)| leading_form(f, d).primitive()).collect();
        eqs.push(t_rel.clone());
        let basis = solve::buchberger(&eqs, &ord, limits)?;
        let unit = solve::is_unit_basis(&basis);
        transcript.push(TranscriptStep {
            label: format!("u = a s^{d}"),
            equations: eqs.iter().map(|e| e.to_string()).collect(),
            basis: basis.iter().map(|b| b.to_string()).collect(),
        });
        if !unit {
            return Ok((
                Outcome::Unresolved { reason: format!("leading coefficient for d = {d} is consistent") },
                transcript,
                degrees,
                diagrams,
            ));
        }
        witnesses.extend(eqs.iter().map(|e| e.to_string()));
    }
    Ok((Outcome::Inconsistent { order: 0, witnesses }, transcript, degrees, diagrams))
}

/// Dispatch: IFT + power series when both exponents are positive, Newton
/// diagram when one exponent vanishes.  Escalates the truncation by 2 up to
/// `ceiling` while the verdict is `TruncationInsufficient`.
pub fn analyze_branch(
    minors: &[SparsePoly],
    normal: Point,
    root: &Rational,
    truncation: u32,
    ceiling: u32,
    limits: GbLimits,
) -> Result<BranchVerdict, PuiseuxError> {
    if normal.0 == 0 || normal.1 == 0 {
        let (outcome, transcript, degrees, diagrams) = newton_branch(minors, normal, root, limits)?;
        return Ok(BranchVerdict {
            normal,
            root: rat_str(root),
            method: "newton-diagram".to_string(),
            truncation: 0,
            outcome,
            transcript,
            degrees,
            ift: None,
            diagrams,
        });
    }
    let ift = ift_certify(root, &faces_at_s0(minors, normal));
    let ift = match ift {
        Ok(c) => Some(c),
        Err(PuiseuxError::NotARoot(r)) => {
            return Ok(BranchVerdict {
                normal,
                root: rat_str(root),
                method: "face".to_string(),
                truncation: 0,
                outcome: Outcome::Inconsistent { order: 0, witnesses: vec![format!("P({r}) != 0")] },
                transcript: Vec::new(),
                degrees: Vec::new(),
                ift: None,
                diagrams: Vec::new(),
            })
        }
        Err(e) => return Err(e),
    };
    let mut n = truncation;
    loop {
        let ansatz = SeriesAnsatz { normal, root: root.clone(), truncation: n };
        let (outcome, transcript, degrees) = power_series_branch(minors, &ansatz, limits)?;
        let insufficient = matches!(&outcome, Outcome::Unresolved { reason } if reason.starts_with("TruncationInsufficient"));
        if !insufficient || n + 2 > ceiling {
            return Ok(BranchVerdict {
                normal,
                root: rat_str(root),
                method: "power-series".to_string(),
                truncation: n,
                outcome,
                transcript,
                degrees,
                ift,
                diagrams: Vec::new(),
            });
        }
        log::info!("branch {normal:?} root {root}: escalating truncation to {}", n + 2);
        n += 2;
    }
}

/// Order-by-order transcript for a single polynomial (diagnostics).
pub fn single_equation_transcript(
    g: &SparsePoly,
    ansatz: &SeriesAnsatz,
    limits: GbLimits,
) -> Result<Vec<TranscriptStep>, PuiseuxError> {
    Ok(power_series_branch(std::slice::from_ref(g), ansatz, limits)?.1)
}

/// Convenience: the rational `n`.
pub fn rint(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> SparsePoly {
        SparsePoly::parse_lenient(s).unwrap()
    }

    #[test]
    fn series_examples() {
        let ans = SeriesAnsatz { normal: (1, 1), root: rint(-1), truncation: 4 };
        let s = series_substitute(&p("+1 r13 +1 r23"), &ans).unwrap();
        assert_eq!(s.start, 1);
        assert!(s.coeffs[0].is_zero());
        let s = series_substitute(&p("+1 r13^2 -1 r23^2"), &ans).unwrap();
        assert_eq!(s.start, 2);
        assert!(s.coeffs[0].is_zero());
        assert_eq!(s.coeffs[1], p("-2 a2"));
    }

    #[test]
    fn diagrams() {
        let d = newton_diagram(&p("+1 u^2 -1 s")).unwrap();
        assert_eq!(d.candidates(), vec![Rational::new(1.into(), 2.into())]);
        assert_eq!(d.segments[0].2, "-2");
        assert_eq!(newton_diagram(&p("+1 s u")), Err(PuiseuxError::NoBranch));
        let d = newton_diagram(&p("+1 u^7 +1 s^6 u +1 s^8")).unwrap();
        let slopes: Vec<&str> = d.segments.iter().map(|s| s.2.as_str()).collect();
        assert_eq!(slopes, vec!["-1", "-1/2"]);
        assert_eq!(d.candidates(), vec![rint(1), rint(2)]);
    }

    #[test]
    fn ift() {
        let faces = [p("+1 k^2 +1 k"), p("+1 k^3 +1 k^2")];
        let c = ift_certify(&rint(-1), &faces).unwrap();
        assert_eq!(c.combined, "+1 k^2 +1 k");
        assert_eq!(c.derivative_at_root, "-1");
        let deg = [p("+1 k^21").mul(&p("+1 k -1").pow(7)).mul(&p("+1 k +1").pow(7))];
        assert_eq!(ift_certify(&rint(1), &deg), Err(PuiseuxError::DegenerateRoot("1".into())));
    }

    #[test]
    fn leading_forms() {
        let f = p("+1 u^7 +3 s^6 u +1 s^8");
        assert_eq!(leading_form(&f, &rint(1)), p("+1 a^7 +3 a"));
        assert_eq!(leading_form(&f, &rint(2)), p("+3 a +1"));
    }
}
