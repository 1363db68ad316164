//! Independent floating-point and exact verification.
//!
//! * numerical integration of the three-body problem from direct Newtonian
//!   forces (not from the symbolic field),
//! * finite-difference validation of the derivative cascade,
//! * relative-equilibrium witnesses built from central-configuration
//!   relations, with exact energy and angular momentum,
//! * polynomial evaluation exactly in `Q(sqrt d)` and in wide fixed point.

use std::collections::BTreeMap;

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};
use ode_solvers::{Dop853, SVector, System};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{newtonian_accelerations, numeric_point};
use crate::poly::{rat, RatExpr, Rational, SparsePoly, VarId};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("collision approach at t = {time}: r{pair} = {distance:e}")]
    CollisionApproach { time: f64, pair: &'static str, distance: f64 },
    #[error("integration failed: {0}")]
    Integration(String),
    #[error("non-positive tolerance or duration")]
    BadParameters,
    #[error("no value assigned to {0}")]
    MissingAssignment(String),
    #[error("assignment mixes square roots of {0} and {1}")]
    MixedRadicands(String, String),
}

// ---------------------------------------------------------------------------
// Phase states and integration

/// A point of phase space in Jacobi coordinates (unit masses, G = 1).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseState {
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
    pub u1: f64,
    pub v1: f64,
    pub u2: f64,
    pub v2: f64,
}

impl PhaseState {
    pub fn from_array(a: [f64; 8]) -> PhaseState {
        let [x1, y1, x2, y2, u1, v1, u2, v2] = a;
        PhaseState { x1, y1, x2, y2, u1, v1, u2, v2 }
    }

    pub fn to_array(&self) -> [f64; 8] {
        [self.x1, self.y1, self.x2, self.y2, self.u1, self.v1, self.u2, self.v2]
    }

    /// `(r12, r13, r23)`.
    pub fn distances(&self) -> [f64; 3] {
        let p = numeric_point(&self.to_array());
        [p[VarId::R12.index()], p[VarId::R13.index()], p[VarId::R23.index()]]
    }

    /// `H = (|z1'|^2 / 2 + 2 |z2'|^2 / 3) / 2 - U`.
    pub fn energy(&self) -> f64 {
        let [r12, r13, r23] = self.distances();
        let kinetic = 0.5 * (0.5 * (self.u1 * self.u1 + self.v1 * self.v1)
            + 2.0 / 3.0 * (self.u2 * self.u2 + self.v2 * self.v2));
        kinetic - (1.0 / r12 + 1.0 / r13 + 1.0 / r23)
    }

    pub fn angular_momentum(&self) -> f64 {
        0.5 * (self.x1 * self.v1 - self.y1 * self.u1) + 2.0 / 3.0 * (self.x2 * self.v2 - self.y2 * self.u2)
    }
}

/// Uniformly sampled orbit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<PhaseState>,
}

impl Trajectory {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,x1,y1,x2,y2,u1,v1,u2,v2\n");
        for (t, s) in self.times.iter().zip(&self.states) {
            let row: Vec<String> = s.to_array().iter().map(|v| format!("{v:.17e}")).collect();
            out.push_str(&format!("{t:.17e},{}\n", row.join(",")));
        }
        out
    }

    /// Largest `|q(t) - q(0)|` over the samples for a scalar observable.
    pub fn drift(&self, observable: impl Fn(&PhaseState) -> f64) -> f64 {
        let q0 = observable(&self.states[0]);
        self.states.iter().map(|s| (observable(s) - q0).abs()).fold(0.0, f64::max)
    }
}

/// Integration settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegrationConfig {
    /// Relative and absolute local error tolerance.
    pub tol: f64,
    /// Smallest admissible mutual distance.
    pub collision_floor: f64,
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        IntegrationConfig { tol: 1e-12, collision_floor: 1e-3 }
    }
}

type State8 = SVector<f64, 8>;

struct ThreeBody;

impl System<f64, State8> for ThreeBody {
    fn system(&self, _t: f64, y: &State8, dy: &mut State8) {
        let s: [f64; 8] = std::array::from_fn(|i| y[i]);
        let acc = newtonian_accelerations(&s);
        dy[0] = s[4];
        dy[1] = s[5];
        dy[2] = s[6];
        dy[3] = s[7];
        for k in 0..4 {
            dy[4 + k] = acc[k];
        }
    }
}

fn check_collision(time: f64, s: &PhaseState, floor: f64) -> Result<(), OracleError> {
    for (pair, d) in ["12", "13", "23"].into_iter().zip(s.distances()) {
        if !(d > floor) {
            return Err(OracleError::CollisionApproach { time, pair, distance: d });
        }
    }
    Ok(())
}

/// One adaptive DOP853 run from `t0` to `t1` returning the end state.
fn advance(state: &PhaseState, t0: f64, t1: f64, cfg: &IntegrationConfig) -> Result<PhaseState, OracleError> {
    if t1 == t0 {
        return Ok(*state);
    }
    let y0 = State8::from_column_slice(&state.to_array());
    let mut stepper = Dop853::new(ThreeBody, t0, t1, t1 - t0, y0, cfg.tol, cfg.tol);
    stepper.integrate().map_err(|e| OracleError::Integration(format!("{e:?}")))?;
    let y = stepper.y_out().last().ok_or_else(|| OracleError::Integration("no output".into()))?;
    Ok(PhaseState::from_array(std::array::from_fn(|i| y[i])))
}

/// Samples at `t_start + j * dt`, `j = 0..count`, starting from `state` at
/// time 0.  Each sample is an integration endpoint (no interpolation), so
/// every value carries the full local tolerance.
pub fn sample_uniform(
    state: &PhaseState,
    t_start: f64,
    dt: f64,
    count: usize,
    cfg: &IntegrationConfig,
) -> Result<Trajectory, OracleError> {
    if !(cfg.tol > 0.0) || !(dt > 0.0) || t_start < 0.0 {
        return Err(OracleError::BadParameters);
    }
    check_collision(0.0, state, cfg.collision_floor)?;
    let mut cur = advance(state, 0.0, t_start, cfg)?;
    check_collision(t_start, &cur, cfg.collision_floor)?;
    let mut times = vec![t_start];
    let mut states = vec![cur];
    for j in 1..count {
        let (a, b) = (t_start + (j - 1) as f64 * dt, t_start + j as f64 * dt);
        cur = advance(&cur, a, b, cfg)?;
        check_collision(b, &cur, cfg.collision_floor)?;
        times.push(b);
        states.push(cur);
    }
    Ok(Trajectory { times, states })
}

/// Integrate over `[0, t_end]` with `samples` uniform output intervals.
pub fn integrate(state: &PhaseState, t_end: f64, samples: usize, cfg: &IntegrationConfig) -> Result<Trajectory, OracleError> {
    if !(t_end > 0.0) || samples == 0 {
        return Err(OracleError::BadParameters);
    }
    sample_uniform(state, 0.0, t_end / samples as f64, samples + 1, cfg)
}

/// A non-symmetric, well-separated initial state used as the generic orbit.
pub fn generic_state() -> PhaseState {
    PhaseState::from_array([1.0, 0.0, 4.0, 0.3, 0.05, 1.3, 0.1, 0.8])
}

// ---------------------------------------------------------------------------
// Finite differences

/// Central difference of order `k` with spacing `delta` around the middle
/// of `values`; `values[c + j]` holds the sample at `t_c + j * delta`.
fn central_difference(values: &dyn Fn(i64) -> f64, k: usize, delta: f64) -> f64 {
    match k {
        1 => (values(1) - values(-1)) / (2.0 * delta),
        2 => (values(1) - 2.0 * values(0) + values(-1)) / (delta * delta),
        3 => (values(2) - 2.0 * values(1) + 2.0 * values(-1) - values(-2)) / (2.0 * delta.powi(3)),
        4 => (values(2) - 4.0 * values(1) + 6.0 * values(0) - 4.0 * values(-1) + values(-2)) / delta.powi(4),
        _ => panic!("finite differences implemented for k = 1..4"),
    }
}

/// Finite-difference step and Richardson levels per derivative order.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteDiffConfig {
    pub base_delta: f64,
    pub levels: usize,
    pub centers: usize,
    pub spacing: f64,
}

impl FiniteDiffConfig {
    /// Defaults balancing truncation error against integrator noise.
    pub fn for_order(k: usize) -> FiniteDiffConfig {
        let base_delta = match k {
            1 => 0.04,
            2 => 0.05,
            3 => 0.08,
            _ => 0.1,
        };
        FiniteDiffConfig { base_delta, levels: 3, centers: 4, spacing: 0.3 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteDiffRow {
    pub delta: f64,
    /// Max over centers of the plain central-difference deviation.
    pub raw_deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteDiffReport {
    pub k: usize,
    /// One row per halving of the step (step-size sweep).
    pub sweep: Vec<FiniteDiffRow>,
    /// Observed convergence orders `log2(dev(delta) / dev(delta / 2))`.
    pub observed_orders: Vec<f64>,
    /// Max over centers of the Richardson-extrapolated deviation.
    pub max_relative_deviation: f64,
}

/// Compare symbolic `f_k` along the orbit starting at `start` with k-th
/// central differences of `r12^2 / 2`.  Deviations are relative with a unit
/// floor: `|fd - f_k| / max(|f_k|, 1)`.
pub fn finite_diff_check(
    f_k: &RatExpr,
    start: &PhaseState,
    k: usize,
    fd: &FiniteDiffConfig,
    cfg: &IntegrationConfig,
) -> Result<FiniteDiffReport, OracleError> {
    assert!((1..=4).contains(&k), "finite differences implemented for k = 1..4");
    let finest = fd.base_delta / f64::powi(2.0, fd.levels as i32 - 1);
    let reach = 2 * (1i64 << (fd.levels - 1));
    let mut raw = vec![0.0f64; fd.levels];
    let mut extrapolated = 0.0f64;
    for c in 0..fd.centers {
        let t_c = 2.0 * fd.base_delta + 0.05 + c as f64 * fd.spacing;
        let traj = sample_uniform(start, t_c - reach as f64 * finest, finest, (2 * reach + 1) as usize, cfg)?;
        let f: Vec<f64> = traj.states.iter().map(|s| 0.5 * (s.x1 * s.x1 + s.y1 * s.y1)).collect();
        let centre = traj.states[reach as usize];
        let exact = f_k.eval_f64(&numeric_point(&centre.to_array()));
        let norm = exact.abs().max(1.0);
        // Level l uses spacing base_delta / 2^l = finest * 2^(levels-1-l).
        let mut table: Vec<f64> = Vec::with_capacity(fd.levels);
        for (l, slot) in raw.iter_mut().enumerate() {
            let stride = 1i64 << (fd.levels - 1 - l);
            let delta = finest * stride as f64;
            let value = central_difference(&|j| f[(reach + j * stride) as usize], k, delta);
            *slot = slot.max((value - exact).abs() / norm);
            table.push(value);
        }
        // Richardson: errors expand in even powers of the step.
        let mut factor = 4.0;
        while table.len() > 1 {
            table = table.windows(2).map(|w| (factor * w[1] - w[0]) / (factor - 1.0)).collect();
            factor *= 4.0;
        }
        extrapolated = extrapolated.max((table[0] - exact).abs() / norm);
    }
    let sweep: Vec<FiniteDiffRow> = raw
        .iter()
        .enumerate()
        .map(|(l, &d)| FiniteDiffRow { delta: fd.base_delta / f64::powi(2.0, l as i32), raw_deviation: d })
        .collect();
    let observed_orders = sweep.windows(2).map(|w| (w[0].raw_deviation / w[1].raw_deviation).log2()).collect();
    Ok(FiniteDiffReport { k, sweep, observed_orders, max_relative_deviation: extrapolated })
}

// ---------------------------------------------------------------------------
// Relative-equilibrium witnesses

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum WitnessLabel {
    Lagrange,
    #[serde(rename = "Euler-1")]
    Euler1,
    #[serde(rename = "Euler-2")]
    Euler2,
    #[serde(rename = "Euler-3")]
    Euler3,
}

impl WitnessLabel {
    pub const ALL: [WitnessLabel; 4] =
        [WitnessLabel::Lagrange, WitnessLabel::Euler1, WitnessLabel::Euler2, WitnessLabel::Euler3];

    pub fn name(self) -> &'static str {
        match self {
            WitnessLabel::Lagrange => "Lagrange",
            WitnessLabel::Euler1 => "Euler-1",
            WitnessLabel::Euler2 => "Euler-2",
            WitnessLabel::Euler3 => "Euler-3",
        }
    }
}

/// A relative equilibrium with `r12 = 1` rotating counter-clockwise.
///
/// `omega = sqrt(omega_sq)` and `y2 = y2_coef * sqrt(omega_sq)`, so every
/// exact quantity lives in `Q(sqrt(omega_sq))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub label: WitnessLabel,
    #[serde(with = "rat_string")]
    pub r13: Rational,
    #[serde(with = "rat_string")]
    pub r23: Rational,
    #[serde(with = "rat_string")]
    pub h: Rational,
    #[serde(with = "rat_string")]
    pub omega_sq: Rational,
    /// Squared angular speed of the rigid rotation.
    #[serde(with = "rat_string")]
    pub angular_speed_sq: Rational,
    #[serde(with = "rat_string")]
    pub x2: Rational,
    #[serde(with = "rat_string")]
    pub y2_coef: Rational,
    pub state: PhaseState,
    /// Max residual of the central-configuration equations.
    pub cc_residual: f64,
}

impl Witness {
    /// `r13, r23, h, om, w13 = w23 = 0` as exact values.
    pub fn assignment(&self) -> Assignment {
        let root = ExactValue::sqrt(self.omega_sq.clone());
        let mut a = Assignment::default();
        a.set(VarId::R12, ExactValue::rational(Rational::one()));
        a.set(VarId::R13, ExactValue::rational(self.r13.clone()));
        a.set(VarId::R23, ExactValue::rational(self.r23.clone()));
        a.set(VarId::H, ExactValue::rational(self.h.clone()));
        a.set(VarId::OM, root.clone());
        a.set(VarId::W13, ExactValue::rational(Rational::zero()));
        a.set(VarId::W23, ExactValue::rational(Rational::zero()));
        a.set(VarId::X2, ExactValue::rational(self.x2.clone()));
        a.set(VarId::Y2, ExactValue { coef: self.y2_coef.clone(), radicand: self.omega_sq.clone() });
        a
    }
}

/// Rational helpers that serialize as `"p/q"` strings.
pub mod rat_string {
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Inertial positions (unit masses) of each shape with `|q2 - q1| = 1`,
/// before centering.  The Lagrange apex is `(1/2, sqrt(3)/2)`.
fn shape(label: WitnessLabel) -> [[f64; 2]; 3] {
    match label {
        WitnessLabel::Lagrange => [[0.0, 0.0], [1.0, 0.0], [0.5, 3f64.sqrt() / 2.0]],
        // Body 1 between bodies 3 and 2.
        WitnessLabel::Euler1 => [[0.0, 0.0], [1.0, 0.0], [-1.0, 0.0]],
        // Body 2 between bodies 1 and 3.
        WitnessLabel::Euler2 => [[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]],
        // Body 3 between bodies 1 and 2.
        WitnessLabel::Euler3 => [[0.0, 0.0], [1.0, 0.0], [0.5, 0.0]],
    }
}

/// Exact squared distances `(r13^2, r23^2)` of each shape.
fn shape_distances(label: WitnessLabel) -> (Rational, Rational) {
    match label {
        WitnessLabel::Lagrange => (rat(1, 1), rat(1, 1)),
        WitnessLabel::Euler1 => (rat(1, 1), rat(4, 1)),
        WitnessLabel::Euler2 => (rat(4, 1), rat(1, 1)),
        WitnessLabel::Euler3 => (rat(1, 4), rat(1, 4)),
    }
}

fn exact_sqrt(q: &Rational) -> Rational {
    let (n, d) = (q.numer().sqrt(), q.denom().sqrt());
    let r = Rational::new(n, d);
    assert_eq!(&(&r * &r), q, "distance squares of the shapes are perfect squares");
    r
}

/// Central-configuration residual `max_i |a_i + lambda (q_i - c)|` with
/// Newtonian accelerations `a_i`.
fn cc_residual(q: &[[f64; 2]; 3], lambda: f64) -> f64 {
    let c = [(q[0][0] + q[1][0] + q[2][0]) / 3.0, (q[0][1] + q[1][1] + q[2][1]) / 3.0];
    let mut worst = 0.0f64;
    for i in 0..3 {
        let mut a = [0.0; 2];
        for j in 0..3 {
            if i != j {
                let d = [q[j][0] - q[i][0], q[j][1] - q[i][1]];
                let r3 = d[0].hypot(d[1]).powi(3);
                a[0] += d[0] / r3;
                a[1] += d[1] / r3;
            }
        }
        for k in 0..2 {
            worst = worst.max((a[k] + lambda * (q[i][k] - c[k])).abs());
        }
    }
    worst
}

/// The four relative equilibria with `r12 = 1`.
///
/// For a central configuration the Lagrange–Jacobi identity gives the
/// squared angular speed `lambda = U / I` with `I = sum_{i<j} r_ij^2 / 3`
/// (unit masses), hence `h = lambda I / 2 - U = -U / 2` and
/// `omega^2 = lambda I^2`.  These depend only on the distances.
pub fn relative_equilibrium_witnesses() -> Vec<Witness> {
    WitnessLabel::ALL
        .iter()
        .map(|&label| {
            let (r13_sq, r23_sq) = shape_distances(label);
            let (r13, r23) = (exact_sqrt(&r13_sq), exact_sqrt(&r23_sq));
            let one = Rational::one();
            let u = &one + one.clone() / &r13 + one.clone() / &r23;
            let inertia = (&one + &r13_sq + &r23_sq) / rat(3, 1);
            let lambda = &u / &inertia;
            let h = -&u / rat(2, 1);
            let omega_sq = &lambda * &inertia * &inertia;
            // Jacobi coordinates from the inertial shape.
            let q = shape(label);
            let z2 = [q[2][0] - 0.5 * (q[0][0] + q[1][0]), q[2][1] - 0.5 * (q[0][1] + q[1][1])];
            let x2 = (&r13_sq - &r23_sq) / rat(2, 1);
            assert!((z2[0] - crate::solve::rational_to_f64(&x2)).abs() < 1e-15);
            // y2 = c sqrt(omega^2): zero for collinear shapes, sqrt(3)/2 for
            // Lagrange where omega^2 = 3.
            let y2_coef = if z2[1] == 0.0 { Rational::zero() } else { rat(1, 2) };
            let theta = crate::solve::rational_to_f64(&lambda).sqrt();
            let state = PhaseState::from_array([1.0, 0.0, z2[0], z2[1], 0.0, theta, -theta * z2[1], theta * z2[0]]);
            let cc_residual = cc_residual(&q, crate::solve::rational_to_f64(&lambda));
            Witness { label, r13, r23, h, omega_sq, angular_speed_sq: lambda, x2, y2_coef, state, cc_residual }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Exact and wide fixed-point evaluation

/// `coef * sqrt(radicand)`; `radicand = 1` for rational values.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactValue {
    pub coef: Rational,
    pub radicand: Rational,
}

impl ExactValue {
    pub fn rational(q: Rational) -> ExactValue {
        ExactValue { coef: q, radicand: Rational::one() }
    }

    pub fn sqrt(d: Rational) -> ExactValue {
        ExactValue { coef: Rational::one(), radicand: d }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Assignment {
    values: BTreeMap<VarId, ExactValue>,
}

impl Assignment {
    pub fn set(&mut self, v: VarId, value: ExactValue) {
        self.values.insert(v, value);
    }

    pub fn get(&self, v: VarId) -> Option<&ExactValue> {
        self.values.get(&v)
    }

    fn radicand(&self, p: &SparsePoly) -> Result<Rational, OracleError> {
        let mut d = Rational::one();
        for v in p.variables() {
            let value = self.get(v).ok_or_else(|| OracleError::MissingAssignment(v.to_string()))?;
            if value.radicand.is_one() || value.coef.is_zero() {
                continue;
            }
            if d.is_one() {
                d = value.radicand.clone();
            } else if d != value.radicand {
                return Err(OracleError::MixedRadicands(d.to_string(), value.radicand.to_string()));
            }
        }
        Ok(d)
    }
}

/// `a + b sqrt(d)` in `Q(sqrt d)`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadElem {
    pub a: Rational,
    pub b: Rational,
}

impl QuadElem {
    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    fn mul(&self, o: &QuadElem, d: &Rational) -> QuadElem {
        QuadElem { a: &self.a * &o.a + &self.b * &o.b * d, b: &self.a * &o.b + &self.b * &o.a }
    }
}

/// Exact value of `p` at the assignment.
pub fn eval_exact(p: &SparsePoly, assignment: &Assignment) -> Result<QuadElem, OracleError> {
    let d = assignment.radicand(p)?;
    let mut powers: BTreeMap<(VarId, u16), QuadElem> = BTreeMap::new();
    let mut acc = QuadElem { a: Rational::zero(), b: Rational::zero() };
    for (m, c) in p.terms() {
        let mut term = QuadElem { a: c.clone(), b: Rational::zero() };
        for (v, e) in m.support() {
            let pw = match powers.get(&(v, e)) {
                Some(x) => x.clone(),
                None => {
                    let value = assignment.get(v).expect("checked by radicand");
                    let base = if value.radicand.is_one() {
                        QuadElem { a: value.coef.clone(), b: Rational::zero() }
                    } else {
                        QuadElem { a: Rational::zero(), b: value.coef.clone() }
                    };
                    let mut x = QuadElem { a: Rational::one(), b: Rational::zero() };
                    for _ in 0..e {
                        x = x.mul(&base, &d);
                    }
                    powers.insert((v, e), x.clone());
                    x
                }
            };
            term = term.mul(&pw, &d);
        }
        acc.a += term.a;
        acc.b += term.b;
    }
    Ok(acc)
}

/// Fixed-point number `m / 2^bits`.
#[derive(Clone, Debug, PartialEq)]
pub struct Fixed {
    pub mantissa: BigInt,
    pub bits: u32,
}

impl Fixed {
    pub fn from_rational(q: &Rational, bits: u32) -> Fixed {
        Fixed { mantissa: (q.numer() << bits) / q.denom(), bits }
    }

    /// `coef * sqrt(radicand)` to `bits` fractional bits.
    pub fn from_exact(v: &ExactValue, bits: u32) -> Fixed {
        if v.radicand.is_one() {
            return Fixed::from_rational(&v.coef, bits);
        }
        // sqrt(n/d) = sqrt(n d) / d.
        let nd: BigInt = v.radicand.numer() * v.radicand.denom();
        let root = (nd << (2 * bits)).sqrt();
        let sqrt = Fixed { mantissa: root / v.radicand.denom(), bits };
        sqrt.mul(&Fixed::from_rational(&v.coef, bits))
    }

    pub fn mul(&self, o: &Fixed) -> Fixed {
        Fixed { mantissa: (&self.mantissa * &o.mantissa) >> self.bits, bits: self.bits }
    }

    pub fn abs(&self) -> Fixed {
        Fixed { mantissa: self.mantissa.abs(), bits: self.bits }
    }

    /// `self / other` as a double, robust for huge magnitudes.
    pub fn ratio(&self, other: &Fixed) -> f64 {
        if other.mantissa.is_zero() {
            return if self.mantissa.is_zero() { 0.0 } else { f64::INFINITY };
        }
        let q: BigInt = (&self.mantissa << 128u32) / &other.mantissa;
        q.to_f64().unwrap_or(f64::INFINITY) / 2f64.powi(128)
    }

    pub fn to_f64(&self) -> f64 {
        let lead = self.mantissa.bits().saturating_sub(60);
        let top: BigInt = &self.mantissa >> lead;
        top.to_f64().unwrap_or(0.0) * 2f64.powi(lead as i32 - self.bits as i32)
    }

    /// Decimal rendering with `digits` significant digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        if self.mantissa.is_zero() {
            return "0".to_string();
        }
        let sign = if self.mantissa.sign() == Sign::Minus { "-" } else { "" };
        let scaled: BigInt = (self.mantissa.abs() * BigInt::from(10u8).pow(digits as u32)) >> self.bits;
        let s = scaled.to_string();
        // value = scaled * 10^-digits.
        let exp = s.len() as i64 - digits as i64 - 1;
        let mantissa: String = s.chars().take(digits.min(s.len())).collect();
        format!("{sign}{}.{}e{exp}", &mantissa[..1], &mantissa[1..])
    }
}

/// Value and magnitude scale `sum |c| prod |v|^e` of a polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct WideEval {
    pub value: Fixed,
    pub scale: Fixed,
}

impl WideEval {
    pub fn relative(&self) -> f64 {
        self.value.abs().ratio(&self.scale)
    }
}

/// Term-by-term evaluation in fixed point with `bits` fractional bits
/// (256 bits ≈ 77 decimal digits).
pub fn eval_wide(p: &SparsePoly, assignment: &Assignment, bits: u32) -> Result<WideEval, OracleError> {
    let mut base: BTreeMap<VarId, Fixed> = BTreeMap::new();
    for v in p.variables() {
        let value = assignment.get(v).ok_or_else(|| OracleError::MissingAssignment(v.to_string()))?;
        // Two guard words absorb the truncation of repeated products.
        base.insert(v, Fixed::from_exact(value, bits + 128));
    }
    let mut powers: BTreeMap<(VarId, u16), Fixed> = BTreeMap::new();
    let work = bits + 128;
    let mut value = BigInt::zero();
    let mut scale = BigInt::zero();
    for (m, c) in p.terms() {
        let mut prod = Fixed { mantissa: BigInt::one() << work, bits: work };
        for (v, e) in m.support() {
            let pw = powers
                .entry((v, e))
                .or_insert_with(|| {
                    let b = &base[&v];
                    let mut x = Fixed { mantissa: BigInt::one() << work, bits: work };
                    for _ in 0..e {
                        x = x.mul(b);
                    }
                    x
                })
                .clone();
            prod = prod.mul(&pw);
        }
        let term: BigInt = (&prod.mantissa * c.numer()) / c.denom();
        scale += term.abs();
        value += term;
    }
    let shrink = |m: BigInt| Fixed { mantissa: m >> 128u32, bits };
    Ok(WideEval { value: shrink(value), scale: shrink(scale) })
}

// ---------------------------------------------------------------------------
// Witness vanishing records

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VanishingRecord {
    pub witness: WitnessLabel,
    pub name: String,
    pub exact_zero: bool,
    /// `|value| / scale` from the wide evaluation.
    pub relative: f64,
    pub digits: u32,
    pub passes: bool,
}

/// Evaluate each named polynomial at each witness both exactly and in wide
/// fixed point.  `passes` requires the exact value to vanish and the wide
/// relative value to be below `tol`.
pub fn vanishing_records(
    polys: &[(String, SparsePoly)],
    witnesses: &[Witness],
    bits: u32,
    tol: f64,
) -> Result<Vec<VanishingRecord>, OracleError> {
    let mut out = Vec::new();
    for w in witnesses {
        let a = w.assignment();
        for (name, p) in polys {
            let exact = eval_exact(p, &a)?;
            let wide = eval_wide(p, &a, bits)?;
            let relative = wide.relative();
            out.push(VanishingRecord {
                witness: w.label,
                name: name.clone(),
                exact_zero: exact.is_zero(),
                relative,
                digits: (bits as f64 * std::f64::consts::LOG10_2) as u32,
                passes: exact.is_zero() && relative < tol,
            });
        }
    }
    Ok(out)
}
