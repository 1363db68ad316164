//! Reduction of the cascade to equations in the distances alone.
//!
//! Order of operations: normalization (`r12 = 1`, `z1` on the positive
//! x-axis, `u1 = 0`, `v1` from the angular momentum) → `x2` → `u2, v2` →
//! `y2` parity reduction → solve `f3` for `y2` → the four equations `g_i`
//! → quadratic velocity forms → determinant `G` → the five minors.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{self, MassParams};
use crate::poly::{det, int, rat, Monomial, PolyError, RatExpr, Rational, SparsePoly, VarId};

#[derive(Debug, Error)]
pub enum ElimError {
    #[error("expression needs an odd power of y2 in its denominator beyond bookkeeping: {0}")]
    DegenerateGeometry(String),
    #[error("f3 is not linear in y2 (degree {0})")]
    NotLinearInY2(u16),
    #[error("velocity monomial of odd degree: {0}")]
    LinearVelocityTerm(String),
    #[error("velocity monomial of degree above two: {0}")]
    NonQuadraticVelocityTerm(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// One cleared multiplier or removed factor.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct LedgerEntry {
    pub stage: String,
    pub action: String,
    pub factor: String,
    pub power: u32,
    pub justification: String,
}

/// Record of every denominator cleared and factor removed.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct Ledger {
    pub entries: Vec<LedgerEntry>,
}

impl Ledger {
    pub fn record(&mut self, stage: &str, action: &str, factor: impl ToString, power: u32, why: &str) {
        self.entries.push(LedgerEntry {
            stage: stage.to_string(),
            action: action.to_string(),
            factor: factor.to_string(),
            power,
            justification: why.to_string(),
        });
    }
}

fn var(v: VarId) -> SparsePoly {
    SparsePoly::var(v)
}

fn poly(s: &str) -> SparsePoly {
    SparsePoly::parse_lenient(s).expect("built-in polynomial literal")
}

/// The rotational normalization `{r12→1, x1→1, y1→0, u1→0, v1→2ω−(4/3)(x2v2−y2u2)}`.
#[derive(Clone, Debug)]
pub struct NormalizedState {
    pub constants: Vec<(VarId, Rational)>,
    pub v1: SparsePoly,
}

impl Default for NormalizedState {
    fn default() -> Self {
        Self::new()
    }
}

impl NormalizedState {
    pub fn new() -> NormalizedState {
        let m = MassParams::equal();
        // mu1 v1 + mu2 (x2 v2 - y2 u2) = om  with x1 = 1, y1 = 0.
        let l2 = var(VarId::X2).mul(&var(VarId::V2)).sub(&var(VarId::Y2).mul(&var(VarId::U2)));
        let v1 = var(VarId::OM).sub(&l2.scale(&m.mu2)).scale(&m.mu1.recip());
        NormalizedState {
            constants: vec![
                (VarId::R12, int(1)),
                (VarId::X1, int(1)),
                (VarId::Y1, int(0)),
                (VarId::U1, int(0)),
            ],
            v1,
        }
    }

    pub fn apply(&self, e: &RatExpr) -> RatExpr {
        let mut out = e.clone();
        for (v, c) in &self.constants {
            out = out.subst_const(*v, c);
        }
        out.subst_poly(VarId::V1, &self.v1)
    }
}

/// `apply_normalization` with the standard table.
pub fn apply_normalization(e: &RatExpr) -> RatExpr {
    NormalizedState::new().apply(e)
}

/// Geometric substitutions in terms of the invariant variables.
#[derive(Clone, Debug)]
pub struct Geometry {
    /// `x2 = (r13^2 - r23^2)/2`.
    pub x2: SparsePoly,
    /// `Y = r13^2 - (x2 + 1/2)^2`, the value of `y2^2`.
    pub y2_squared: SparsePoly,
    /// Linear factors with `Y = -1/4 * product`.
    pub heron: [SparsePoly; 4],
    /// `u2` solved from the distance-rate equations (may contain `y2`).
    pub u2: RatExpr,
    /// `v2` solved from the distance-rate equations.
    pub v2: RatExpr,
    /// Determinant of the velocity system divided by `y2/3`, before and
    /// after eliminating `x2, y2^2`: `4 x2^2 + 4 y2^2 + 3 = 2 (r13^2 + r23^2 + 1)`.
    pub system_factor: SparsePoly,
}

impl Default for Geometry {
    fn default() -> Self {
        Self::new()
    }
}

impl Geometry {
    pub fn new() -> Geometry {
        let x2 = poly("+1/2 r13^2 -1/2 r23^2");
        let y2_squared = var(VarId::R13).square().sub(&x2.add(&SparsePoly::constant(rat(1, 2))).square());
        let heron = [
            poly("+1 r13 +1 r23 +1"),
            poly("+1 r13 +1 r23 -1"),
            poly("+1 r13 -1 r23 +1"),
            poly("+1 r13 -1 r23 -1"),
        ];
        let (u2, v2) = solve_velocity_system(&x2);
        Geometry {
            x2,
            y2_squared,
            heron,
            u2,
            v2,
            system_factor: poly("+1 r13^2 +1 r23^2 +1"),
        }
    }

    /// Parity-reduce `p` in `y2`: returns `(even, odd)` with
    /// `p ≡ even + odd * y2` modulo `y2^2 = Y`.
    pub fn split_parity(&self, p: &SparsePoly) -> (SparsePoly, SparsePoly) {
        let coeffs = p.coefficients_in(VarId::Y2);
        let mut even = Vec::new();
        let mut odd = Vec::new();
        let mut ypow = SparsePoly::one();
        for (pair, chunk) in coeffs.chunks(2).enumerate() {
            if pair > 0 {
                ypow = ypow.mul(&self.y2_squared);
            }
            if !chunk[0].is_zero() {
                even.push(chunk[0].mul(&ypow));
            }
            if chunk.len() > 1 && !chunk[1].is_zero() {
                odd.push(chunk[1].mul(&ypow));
            }
        }
        (SparsePoly::sum(even.iter()), SparsePoly::sum(odd.iter()))
    }
}

/// Solve `r13 w13 = N13`, `r23 w23 = N23` for `u2, v2` under the
/// normalization, where `N13 = (x2+1/2) u2 + y2 (v2 + v1/2)` and
/// `N23 = (x2-1/2) u2 + y2 (v2 - v1/2)` are the numerators of the distance
/// rates and `v1` is eliminated through the angular momentum.
fn solve_velocity_system(x2_value: &SparsePoly) -> (RatExpr, RatExpr) {
    let field = dynamics::derive_field(&MassParams::equal());
    let norm = NormalizedState::new();
    let rows: Vec<(SparsePoly, SparsePoly, SparsePoly)> = [(1usize, VarId::R13, VarId::W13), (2, VarId::R23, VarId::W23)]
        .iter()
        .map(|&(k, r, w)| {
            // r * dr/dt = N, with the rate stored as N / r.
            let rate = &field.distance_rates[k];
            let n = norm.apply(&RatExpr::from_poly(rate.num().clone()));
            assert!(n.is_polynomial());
            let n = n.num().clone();
            let cu = n.coefficients_in(VarId::U2);
            let a_u = cu.get(1).cloned().unwrap_or_default();
            let rest = cu[0].clone();
            let cv = rest.coefficients_in(VarId::V2);
            let a_v = cv.get(1).cloned().unwrap_or_default();
            let constant = cv[0].sub(&var(r).mul(&var(w)));
            assert!(n.degree_in(VarId::U2) <= 1 && rest.degree_in(VarId::V2) <= 1);
            // a_u u2 + a_v v2 + constant = 0
            (a_u, a_v, constant)
        })
        .collect();
    let (a11, a12, b1) = &rows[0];
    let (a21, a22, b2) = &rows[1];
    let det = a11.mul(a22).sub(&a12.mul(a21));
    let u2_num = a12.mul(b2).sub(&a22.mul(b1));
    let v2_num = a21.mul(b1).sub(&a11.mul(b2));
    let sub_x2 = |p: &SparsePoly| p.subst_poly(VarId::X2, x2_value);
    let det = sub_x2(&det);
    (
        RatExpr::new(sub_x2(&u2_num), det.clone()).unwrap(),
        RatExpr::new(sub_x2(&v2_num), det).unwrap(),
    )
}

/// An expression `(even + odd * y2) / den` with `even, odd, den` free of `y2`.
#[derive(Clone, Debug, PartialEq)]
pub struct Reduced {
    pub even: SparsePoly,
    pub odd: SparsePoly,
    pub den: SparsePoly,
}

/// Eliminate `x2`, `u2`, `v2` and even powers of `y2` from a normalized expression.
pub fn eliminate_geometry(e: &RatExpr, geo: &Geometry) -> Result<Reduced, ElimError> {
    let e = e.subst_poly(VarId::X2, &geo.x2);
    let e = e.subst(VarId::U2, &geo.u2);
    let e = e.subst(VarId::V2, &geo.v2);
    let (num, den) = e.into_parts();
    // den = y2^k * rest, with rest even in y2.
    let k = den.min_degree_in(VarId::Y2);
    let rest = den.div_exact(&SparsePoly::term(Monomial::var(VarId::Y2, k), int(1))).unwrap();
    let (rest_even, rest_odd) = geo.split_parity(&rest);
    if !rest_odd.is_zero() {
        return Err(ElimError::DegenerateGeometry(format!("denominator {den}")));
    }
    let (mut even, mut odd) = geo.split_parity(&num);
    let mut half = k / 2;
    if k % 2 == 1 {
        // Multiply through by y2 to make the power even.
        (even, odd) = (odd.mul(&geo.y2_squared), even);
        half += 1;
    }
    let den = rest_even.mul(&geo.y2_squared.pow(half as u32));
    Ok(Reduced { even, odd, den })
}

/// `y2 = -c0 / c1` from `f3 = c0 + c1 y2`.
pub fn solve_y2(f3: &SparsePoly) -> Result<RatExpr, ElimError> {
    let d = f3.degree_in(VarId::Y2);
    if d != 1 {
        return Err(ElimError::NotLinearInY2(d));
    }
    let c = f3.coefficients_in(VarId::Y2);
    if c[1].is_zero() {
        return Err(ElimError::NotLinearInY2(0));
    }
    Ok(RatExpr::new(c[0].neg(), c[1].clone())?)
}

/// The four rotation-invariant equations and the data used to build them.
#[derive(Clone, Debug)]
pub struct GSystem {
    /// Stripped numerators of `f2`, `f4`, `H - h` after `y2 = -c0/c1`, and of `y2^2 - Y`.
    pub g: [SparsePoly; 4],
    /// `f3` numerator `c0 + c1 y2`.
    pub c0: SparsePoly,
    pub c1: SparsePoly,
    /// Reduced `f2, f3, f4, H - h`.
    pub reduced: [Reduced; 4],
    /// Factors treated as nonvanishing multipliers when stripping later stages.
    pub ledger_factors: Vec<(String, SparsePoly)>,
    pub ledger: Ledger,
}

/// Run the elimination from the cascade to `g1 .. g4`.
pub fn build_g_system(cascade: &[RatExpr], energy: &RatExpr) -> Result<GSystem, ElimError> {
    assert!(cascade.len() >= 4, "need f1..f4");
    let geo = Geometry::new();
    let norm = NormalizedState::new();
    let mut ledger = Ledger::default();
    let h_minus = energy.sub(&RatExpr::from_poly(var(VarId::H)));
    let sources = [("f2", &cascade[1]), ("f3", &cascade[2]), ("f4", &cascade[3]), ("H-h", &h_minus)];
    let mut reduced = Vec::new();
    for (name, e) in sources {
        let r = eliminate_geometry(&norm.apply(e), &geo)?;
        log::info!("reduced {name}: {} + {} terms over {}", r.even.len(), r.odd.len(), r.den);
        ledger.record(
            "eliminate",
            "clear denominator",
            &r.den,
            1,
            &format!("denominator of reduced {name}: powers of r13, r23, y2^2 = Y > 0 (noncollinear) and r13^2+r23^2+1 > 0"),
        );
        reduced.push(r);
    }
    let reduced: [Reduced; 4] = reduced.try_into().unwrap();
    let c0 = reduced[1].even.clone();
    let c1 = reduced[1].odd.clone();
    let f3 = c0.add(&c1.mul(&var(VarId::Y2)));
    let y2 = solve_y2(&f3)?;
    ledger.record(
        "solve_y2",
        "clear denominator",
        &c1,
        1,
        "y2-coefficient c1 of f3; its zero locus (isosceles or zero angular momentum) is outside this argument",
    );
    let mut g = Vec::new();
    for (i, idx) in [0usize, 2, 3].iter().enumerate() {
        let r = &reduced[*idx];
        let num = r.even.mul(y2.den()).add(&r.odd.mul(y2.num()));
        g.push((format!("g{}", i + 1), num));
    }
    let g4 = y2.num().square().sub(&geo.y2_squared.mul(&y2.den().square()));
    g.push(("g4".to_string(), g4));
    let mut stripped = Vec::new();
    for (name, p) in g {
        let (s, content, mono) = p.strip()?;
        ledger.record("g-system", "strip content", content, 1, &format!("{name}: rational content"));
        if !mono.is_one() {
            ledger.record("g-system", "strip monomial", mono, 1, &format!("{name}: r13, r23 > 0; om != 0 on the c1 != 0 locus"));
        }
        stripped.push(s);
    }
    let ledger_factors = ledger_factors(&geo, &c1);
    Ok(GSystem {
        g: stripped.try_into().unwrap(),
        c0,
        c1,
        reduced,
        ledger_factors,
        ledger,
    })
}

/// Factors cleared during elimination: the Heron factors of `Y`, the
/// velocity-system factor, and the pieces of `c1` found by trial division
/// by `r13 - r23`, `r13 + r23` and the factors above.
fn ledger_factors(geo: &Geometry, c1: &SparsePoly) -> Vec<(String, SparsePoly)> {
    let mut out: Vec<(String, SparsePoly)> = Vec::new();
    for (i, f) in geo.heron.iter().enumerate() {
        out.push((format!("heron{}", i + 1), f.clone()));
    }
    out.push(("system".to_string(), geo.system_factor.clone()));
    let candidates = [poly("+1 r13 -1 r23"), poly("+1 r13 +1 r23")];
    let mut rest = c1.stripped();
    let known: Vec<SparsePoly> = out.iter().map(|(_, f)| f.clone()).collect();
    for f in candidates.iter().chain(known.iter()) {
        let (e, q) = rest.divide_out(f);
        if e > 0 && !out.iter().any(|(_, g)| g == f) {
            out.push((format!("c1:{f}"), f.clone()));
        }
        rest = q;
    }
    if !rest.is_constant() {
        out.push(("c1:cofactor".to_string(), rest.primitive()));
    }
    out
}

/// `g = a0 + a1 w13^2 + a2 w13 w23 + a3 w23^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticVelocityForm {
    pub a: [SparsePoly; 4],
}

impl QuadraticVelocityForm {
    pub fn reassemble(&self) -> SparsePoly {
        let w13 = var(VarId::W13);
        let w23 = var(VarId::W23);
        let monos = [SparsePoly::one(), w13.square(), w13.mul(&w23), w23.square()];
        SparsePoly::sum(self.a.iter().zip(monos.iter()).map(|(a, m)| a.mul(m)).collect::<Vec<_>>().iter())
    }
}

/// Split a polynomial into coefficients of `1, w13^2, w13 w23, w23^2`.
pub fn decompose_quadratic(g: &SparsePoly) -> Result<QuadraticVelocityForm, ElimError> {
    let mut parts: [Vec<(Monomial, Rational)>; 4] = Default::default();
    for (m, c) in g.terms() {
        let (i, j) = (m.deg(VarId::W13), m.deg(VarId::W23));
        let slot = match (i, j) {
            (0, 0) => 0,
            (2, 0) => 1,
            (1, 1) => 2,
            (0, 2) => 3,
            _ if (i + j) % 2 == 1 => return Err(ElimError::LinearVelocityTerm(m.to_string())),
            _ => return Err(ElimError::NonQuadraticVelocityTerm(m.to_string())),
        };
        parts[slot].push((m.with_deg(VarId::W13, 0).with_deg(VarId::W23, 0), c.clone()));
    }
    Ok(QuadraticVelocityForm { a: parts.map(SparsePoly::from_terms) })
}

/// Removed factors of one stripped polynomial.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct StripRecord {
    pub content: String,
    pub monomial: String,
    pub factors: Vec<(String, u32)>,
}

/// Remove content, monomial factor and every ledger factor (to its full power).
pub fn strip_ledger(p: &SparsePoly, factors: &[(String, SparsePoly)]) -> Result<(SparsePoly, StripRecord), ElimError> {
    let (mut cur, content, mono) = p.strip()?;
    let mut removed = Vec::new();
    for (name, f) in factors {
        let (e, q) = cur.divide_out(f);
        if e > 0 {
            removed.push((name.clone(), e));
            cur = q;
        }
    }
    let (cur, c2, _) = cur.strip()?;
    Ok((
        cur,
        StripRecord {
            content: (content * c2).to_string(),
            monomial: mono.to_string(),
            factors: removed,
        },
    ))
}

/// Determinant, its partials, and the five minors of the 5×4 matrix.
#[derive(Clone, Debug)]
pub struct MinorSystem {
    /// `det(a_ij)` as computed.
    pub det_raw: SparsePoly,
    /// `G`: the determinant with ledger factors removed.
    pub g: SparsePoly,
    pub g_strip: StripRecord,
    /// `P = dG/dr13`, `Q = dG/dr23`.
    pub p: SparsePoly,
    pub q: SparsePoly,
    /// Minors before stripping (row `i` deleted).
    pub raw_minors: [SparsePoly; 5],
    /// Minors with content, monomials and ledger factors removed.
    pub minors: [SparsePoly; 5],
    pub minor_strips: [StripRecord; 5],
}

/// Append the row `(0, P^2, 0, -Q^2)` and take the five 4×4 minors.
pub fn build_minor_system(
    forms: &[QuadraticVelocityForm; 4],
    factors: &[(String, SparsePoly)],
) -> Result<MinorSystem, ElimError> {
    let rows: Vec<Vec<SparsePoly>> = forms.iter().map(|f| f.a.to_vec()).collect();
    let det_raw = det(&rows);
    log::info!("det: {} terms", det_raw.len());
    let (g, g_strip) = strip_ledger(&det_raw, factors)?;
    log::info!("G: {} terms, degree {}", g.len(), g.degree_in(VarId::R13));
    let p = g.diff(VarId::R13);
    let q = g.diff(VarId::R23);
    let fifth = vec![SparsePoly::zero(), p.square(), SparsePoly::zero(), q.square().neg()];
    let mut full = rows.clone();
    full.push(fifth);
    let mut raw = Vec::new();
    let mut minors = Vec::new();
    let mut strips = Vec::new();
    for i in 0..5 {
        let sub: Vec<Vec<SparsePoly>> =
            full.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, r)| r.clone()).collect();
        // The P/Q row goes first so the memoized expansion reuses the
        // minors of the (small) quadratic-form rows.
        let mut ordered = sub.clone();
        if i < 4 {
            ordered.rotate_right(1);
        }
        let mut d = det(&ordered);
        if i < 4 && ordered.len().is_multiple_of(2) {
            // rotate_right(1) on 4 rows is an odd permutation (a 4-cycle).
            d = d.neg();
        }
        log::info!("G{}: raw {} terms", i + 1, d.len());
        let (s, rec) = strip_ledger(&d, factors)?;
        log::info!("G{}: stripped {} terms, degree {}", i + 1, s.len(), s.degree_in(VarId::R13));
        raw.push(d);
        minors.push(s);
        strips.push(rec);
    }
    Ok(MinorSystem {
        det_raw,
        g,
        g_strip,
        p,
        q,
        raw_minors: raw.try_into().unwrap(),
        minors: minors.try_into().unwrap(),
        minor_strips: strips.try_into().unwrap(),
    })
}
