//! Stage orchestration: derive → eliminate → minors → polygon → verdicts →
//! branches → oracle → certificate, with resumable checkpoints and a
//! standalone verifier.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::checkpoint::{CheckpointError, Store};
use crate::dynamics::{self, MassParams};
use crate::elimination::{self, Ledger, QuadraticVelocityForm, StripRecord};
use crate::oracle::{self, FiniteDiffConfig, FiniteDiffReport, IntegrationConfig, VanishingRecord, Witness, WitnessLabel};
use crate::poly::{digest, RatExpr, Rational, SparsePoly, VarId};
use crate::polygon::{self, EdgeNormal, Point, RelevanceFilter};
use crate::puiseux::{self, BranchVerdict};
use crate::solve::{self, FaceVerdict, GbLimits, Verdict};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Checkpoint(#[from] CheckpointError),
    #[error("checkpoint {name} does not match its recorded digest")]
    DigestMismatch { name: String },
    #[error("missing checkpoint for stage {0}; run it first")]
    MissingCheckpoint(String),
    #[error("stage {stage} failed: {message}")]
    Stage { stage: String, message: String },
    #[error("stage {stage} failed: {message} (partial certificate attached)")]
    Aborted { stage: String, message: String, partial: Box<Certificate> },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

fn stage_err(stage: &str) -> impl Fn(String) -> PipelineError + '_ {
    move |message| PipelineError::Stage { stage: stage.to_string(), message }
}

// ---------------------------------------------------------------------------
// Configuration

/// Numeric tolerances of the oracle stage.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleTolerances {
    /// Scaled tolerance for witness vanishing.
    pub vanishing: f64,
    /// Fractional bits of the wide evaluation (256 ≈ 77 digits).
    pub precision_bits: u32,
    /// Local error tolerance of the integrator.
    pub integration: f64,
    /// Bound on energy, angular-momentum and distance drift over `T = 10`.
    pub drift: f64,
    /// Finite-difference bounds for `k = 1..4`.
    pub finite_difference: [f64; 4],
}

impl Default for OracleTolerances {
    fn default() -> Self {
        OracleTolerances {
            vanishing: 1e-6,
            precision_bits: 256,
            integration: 1e-12,
            drift: 1e-9,
            finite_difference: [1e-8, 1e-7, 1e-5, 1e-4],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub checkpoint_dir: Option<PathBuf>,
    /// Highest series tail coefficient kept on the power-series route.
    pub truncation: u32,
    /// Escalation ceiling for the truncation.
    pub ceiling: u32,
    pub filter: RelevanceFilter,
    pub limits: GbLimits,
    pub oracle: OracleTolerances,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            checkpoint_dir: None,
            truncation: 8,
            ceiling: 16,
            filter: RelevanceFilter::LowerLeft,
            limits: GbLimits::default(),
            oracle: OracleTolerances::default(),
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |what: &str| Err(PipelineError::Config(what.to_string()));
        if self.truncation < 2 || self.truncation as usize > crate::poly::MAX_TAIL {
            return bad("truncation must lie in 2..=16");
        }
        if self.ceiling < self.truncation || self.ceiling as usize > crate::poly::MAX_TAIL {
            return bad("ceiling must lie in truncation..=16");
        }
        if self.limits.max_basis == 0 || self.limits.max_pairs == 0 {
            return bad("resource limits must be positive");
        }
        let o = &self.oracle;
        if !(o.vanishing > 0.0 && o.integration > 0.0 && o.drift > 0.0) || o.precision_bits < 170 {
            return bad("oracle tolerances must be positive with at least 170 bits (50 digits)");
        }
        if o.finite_difference.iter().any(|t| !(*t > 0.0)) {
            return bad("finite-difference tolerances must be positive");
        }
        Ok(())
    }

    fn filter_tag(&self) -> &'static str {
        match self.filter {
            RelevanceFilter::LowerLeft => "seven",
            RelevanceFilter::AllEdges => "all",
        }
    }
}

// ---------------------------------------------------------------------------
// Stage records

/// Size and content hash of one polynomial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyInfo {
    pub name: String,
    pub digest: String,
    pub terms: usize,
    pub total_degree: u32,
    /// Largest exponent of any single variable.
    pub max_exponent: u16,
}

impl PolyInfo {
    pub fn of(name: &str, p: &SparsePoly) -> PolyInfo {
        let max_exponent = p.variables().iter().map(|&v| p.degree_in(v)).max().unwrap_or(0);
        PolyInfo { name: name.to_string(), digest: digest(p), terms: p.len(), total_degree: p.total_degree(), max_exponent }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeriveSummary {
    /// Numerator and denominator of `f1 .. f4`.
    pub cascade: Vec<[PolyInfo; 2]>,
    pub energy: [PolyInfo; 2],
    pub angular_momentum: PolyInfo,
    /// Lie derivatives reduce to zero modulo the distance relations.
    pub energy_conserved_exactly: bool,
    pub angular_momentum_conserved_exactly: bool,
}

#[derive(Clone, Debug)]
pub struct DeriveStage {
    pub cascade: Vec<RatExpr>,
    pub energy: RatExpr,
    pub angular_momentum: SparsePoly,
    pub summary: DeriveSummary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElimSummary {
    pub g: Vec<PolyInfo>,
    pub c0: PolyInfo,
    pub c1: PolyInfo,
    pub ledger: Ledger,
    /// Nonvanishing factors removed later: `(name, canonical text)`.
    pub ledger_factors: Vec<(String, String)>,
    /// `a_ij`: coefficients of `1, w13^2, w13 w23, w23^2` in `g_i`.
    pub forms: Vec<Vec<PolyInfo>>,
    /// Velocity monomials of odd degree found in the `g_i` (structure claim: 0).
    pub odd_velocity_terms: usize,
}

#[derive(Clone, Debug)]
pub struct ElimStage {
    pub g: [SparsePoly; 4],
    pub c0: SparsePoly,
    pub c1: SparsePoly,
    pub ledger_factors: Vec<(String, SparsePoly)>,
    pub forms: [QuadraticVelocityForm; 4],
    pub summary: ElimSummary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinorSummary {
    pub det_raw: PolyInfo,
    pub g: PolyInfo,
    pub g_strip: StripRecord,
    pub p: PolyInfo,
    pub q: PolyInfo,
    pub raw_minors: Vec<PolyInfo>,
    pub minors: Vec<PolyInfo>,
    pub minor_strips: Vec<StripRecord>,
}

#[derive(Clone, Debug)]
pub struct MinorStage {
    pub det_raw: SparsePoly,
    pub g: SparsePoly,
    pub p: SparsePoly,
    pub q: SparsePoly,
    pub raw_minors: [SparsePoly; 5],
    pub minors: [SparsePoly; 5],
    pub summary: MinorSummary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolygonSummary {
    /// Support sizes of the five minors.
    pub supports: Vec<usize>,
    pub sumset_cardinality: usize,
    pub hull_vertices: Vec<Point>,
    pub edge_normals: Vec<EdgeNormal>,
}

/// A normal outside the relevance filter whose face system has roots.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterExclusion {
    pub normal: Point,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Y2Check {
    pub witness: WitnessLabel,
    /// `c0 + c1 y2` vanishes exactly at the geometric `y2`.
    pub f3_vanishes: bool,
    pub c1_vanishes: bool,
    /// `-c0/c1` when `c1 != 0`, as `a + b sqrt(d)`.
    pub solved_y2: Option<String>,
    pub geometric_y2: String,
    pub passes: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteDiffRecord {
    pub report: FiniteDiffReport,
    pub tolerance: f64,
    pub converges: bool,
    pub passes: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConservationRecord {
    pub horizon: f64,
    pub tolerance: f64,
    pub energy_drift: f64,
    pub angular_momentum_drift: f64,
    /// Max distance drift along the Lagrange witness orbit.
    pub lagrange_distance_drift: f64,
    pub passes: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub witnesses: Vec<Witness>,
    /// `a_i0` and raw minors `G_i` at every witness.
    pub vanishing: Vec<VanishingRecord>,
    /// Ledger-stripped minors at every witness (informational: removed
    /// factors such as `r13 - r23` vanish on symmetric witnesses).
    pub stripped_minors: Vec<VanishingRecord>,
    pub y2: Vec<Y2Check>,
    pub finite_differences: Vec<FiniteDiffRecord>,
    pub conservation: ConservationRecord,
    pub passes: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub topic: String,
    pub reference: String,
    pub computed: String,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum FinalVerdict {
    Finite,
    Unresolved(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateConfig {
    pub truncation: u32,
    pub ceiling: u32,
    pub filter: RelevanceFilter,
    pub limits: GbLimits,
    pub oracle: OracleTolerances,
}

/// Self-contained record of a run.  Field order is the serialization order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub version: String,
    pub config: CertificateConfig,
    /// SHA-256 of each stage summary's JSON.
    pub stage_hashes: BTreeMap<String, String>,
    pub derive: Option<DeriveSummary>,
    pub eliminate: Option<ElimSummary>,
    pub minors: Option<MinorSummary>,
    pub polygon: Option<PolygonSummary>,
    pub relevant_normals: Vec<Point>,
    pub face_verdicts: Vec<FaceVerdict>,
    pub branch_verdicts: Vec<BranchVerdict>,
    pub filter_exclusions: Vec<FilterExclusion>,
    pub oracle: Option<OracleReport>,
    pub discrepancies: Vec<Discrepancy>,
    pub failed_stage: Option<String>,
    pub verdict: FinalVerdict,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable certificate") + "\n"
    }
}

fn hash_json<T: Serialize>(value: &T) -> String {
    hex::encode(Sha256::digest(serde_json::to_string(value).expect("serializable").as_bytes()))
}

// ---------------------------------------------------------------------------
// The pipeline

/// Stage cache over an optional checkpoint directory.
pub struct Pipeline {
    pub cfg: PipelineConfig,
    store: Store,
    derive: Option<DeriveStage>,
    elim: Option<ElimStage>,
    minors: Option<MinorStage>,
    polygon: Option<PolygonSummary>,
    verdicts: Option<Vec<FaceVerdict>>,
    branches: Option<Vec<BranchVerdict>>,
    oracle: Option<OracleReport>,
}

fn check_digest(name: &str, p: &SparsePoly, info: &PolyInfo) -> Result<(), PipelineError> {
    if digest(p) == info.digest {
        Ok(())
    } else {
        Err(PipelineError::DigestMismatch { name: name.to_string() })
    }
}

impl Pipeline {
    pub fn new(cfg: PipelineConfig) -> Result<Pipeline, PipelineError> {
        cfg.validate()?;
        let store = Store::new(cfg.checkpoint_dir.clone());
        Ok(Pipeline {
            cfg,
            store,
            derive: None,
            elim: None,
            minors: None,
            polygon: None,
            verdicts: None,
            branches: None,
            oracle: None,
        })
    }

    pub fn store(&self) -> &Store {
        &self.store
    }

    fn read_checked(&self, name: &str, info: &PolyInfo) -> Result<SparsePoly, PipelineError> {
        let p = self.store.read_poly(name)?;
        check_digest(name, &p, info)?;
        Ok(p)
    }

    fn read_ratexpr_checked(&self, name: &str, info: &[PolyInfo; 2]) -> Result<RatExpr, PipelineError> {
        let e = self.store.read_ratexpr(name)?;
        check_digest(name, e.num(), &info[0])?;
        check_digest(name, e.den(), &info[1])?;
        Ok(e)
    }

    // -- derive --------------------------------------------------------------

    pub fn derive(&mut self) -> Result<&DeriveStage, PipelineError> {
        if self.derive.is_none() {
            let stage = if self.store.has("derive.json") { self.load_derive()? } else { self.run_derive()? };
            self.derive = Some(stage);
        }
        Ok(self.derive.as_ref().unwrap())
    }

    fn run_derive(&self) -> Result<DeriveStage, PipelineError> {
        log::info!("stage derive");
        let m = MassParams::equal();
        let field = dynamics::derive_field(&m);
        let cascade = dynamics::derivative_cascade(&field, 4);
        let conserved = dynamics::conserved_quantities(&m);
        let dh = dynamics::lie_derivative(&conserved.h, &field);
        let dom = dynamics::lie_derivative(&RatExpr::from_poly(conserved.omega.clone()), &field);
        let ratinfo = |name: &str, e: &RatExpr| [PolyInfo::of(&format!("{name}.num"), e.num()), PolyInfo::of(&format!("{name}.den"), e.den())];
        let summary = DeriveSummary {
            cascade: cascade.iter().enumerate().map(|(k, f)| ratinfo(&format!("f{}", k + 1), f)).collect(),
            energy: ratinfo("H", &conserved.h),
            angular_momentum: PolyInfo::of("Omega", &conserved.omega),
            energy_conserved_exactly: dynamics::reduce_distances(dh.num(), &field.squares).is_zero(),
            angular_momentum_conserved_exactly: dynamics::reduce_distances(dom.num(), &field.squares).is_zero(),
        };
        for (k, f) in cascade.iter().enumerate() {
            self.store.write_ratexpr(&format!("f{}", k + 1), f)?;
        }
        self.store.write_ratexpr("H", &conserved.h)?;
        self.store.write_poly("Omega", &conserved.omega)?;
        self.store.write_json("derive.json", &summary)?;
        Ok(DeriveStage { cascade, energy: conserved.h, angular_momentum: conserved.omega, summary })
    }

    fn load_derive(&self) -> Result<DeriveStage, PipelineError> {
        log::info!("stage derive: loading checkpoint");
        let summary: DeriveSummary = self.store.read_json("derive.json")?;
        let cascade = (0..4)
            .map(|k| self.read_ratexpr_checked(&format!("f{}", k + 1), &summary.cascade[k]))
            .collect::<Result<Vec<_>, _>>()?;
        let energy = self.read_ratexpr_checked("H", &summary.energy)?;
        let angular_momentum = self.read_checked("Omega", &summary.angular_momentum)?;
        Ok(DeriveStage { cascade, energy, angular_momentum, summary })
    }

    // -- eliminate -----------------------------------------------------------

    pub fn eliminate(&mut self) -> Result<&ElimStage, PipelineError> {
        if self.elim.is_none() {
            let stage = if self.store.has("eliminate.json") {
                self.load_eliminate()?
            } else {
                self.derive()?;
                self.run_eliminate()?
            };
            self.elim = Some(stage);
        }
        Ok(self.elim.as_ref().unwrap())
    }

    fn run_eliminate(&self) -> Result<ElimStage, PipelineError> {
        log::info!("stage eliminate");
        let d = self.derive.as_ref().expect("derive stage loaded");
        let err = stage_err("eliminate");
        let gs = elimination::build_g_system(&d.cascade, &d.energy).map_err(|e| err(e.to_string()))?;
        let mut odd = 0usize;
        let mut forms = Vec::new();
        for g in &gs.g {
            odd += g
                .terms()
                .iter()
                .filter(|(m, _)| (m.deg(VarId::W13) + m.deg(VarId::W23)) % 2 == 1)
                .count();
            forms.push(elimination::decompose_quadratic(g).map_err(|e| err(e.to_string()))?);
        }
        let forms: [QuadraticVelocityForm; 4] = forms.try_into().unwrap();
        let summary = ElimSummary {
            g: gs.g.iter().enumerate().map(|(i, g)| PolyInfo::of(&format!("g{}", i + 1), g)).collect(),
            c0: PolyInfo::of("c0", &gs.c0),
            c1: PolyInfo::of("c1", &gs.c1),
            ledger: gs.ledger.clone(),
            ledger_factors: gs.ledger_factors.iter().map(|(n, f)| (n.clone(), f.to_string())).collect(),
            forms: forms
                .iter()
                .enumerate()
                .map(|(i, f)| f.a.iter().enumerate().map(|(j, a)| PolyInfo::of(&format!("a{}{}", i + 1, j), a)).collect())
                .collect(),
            odd_velocity_terms: odd,
        };
        for (i, g) in gs.g.iter().enumerate() {
            self.store.write_poly(&format!("g{}", i + 1), g)?;
            for (j, a) in forms[i].a.iter().enumerate() {
                self.store.write_poly(&format!("a{}{}", i + 1, j), a)?;
            }
        }
        self.store.write_poly("c0", &gs.c0)?;
        self.store.write_poly("c1", &gs.c1)?;
        self.store.write_json("eliminate.json", &summary)?;
        Ok(ElimStage { g: gs.g, c0: gs.c0, c1: gs.c1, ledger_factors: gs.ledger_factors, forms, summary })
    }

    fn load_eliminate(&self) -> Result<ElimStage, PipelineError> {
        log::info!("stage eliminate: loading checkpoint");
        let summary: ElimSummary = self.store.read_json("eliminate.json")?;
        let mut g = Vec::new();
        let mut forms = Vec::new();
        for i in 0..4 {
            g.push(self.read_checked(&format!("g{}", i + 1), &summary.g[i])?);
            let mut a = Vec::new();
            for j in 0..4 {
                a.push(self.read_checked(&format!("a{}{}", i + 1, j), &summary.forms[i][j])?);
            }
            forms.push(QuadraticVelocityForm { a: a.try_into().unwrap() });
        }
        let c0 = self.read_checked("c0", &summary.c0)?;
        let c1 = self.read_checked("c1", &summary.c1)?;
        let ledger_factors = summary
            .ledger_factors
            .iter()
            .map(|(n, t)| Ok((n.clone(), t.parse::<SparsePoly>().map_err(|e| stage_err("eliminate")(e.to_string()))?)))
            .collect::<Result<Vec<_>, PipelineError>>()?;
        Ok(ElimStage {
            g: g.try_into().unwrap(),
            c0,
            c1,
            ledger_factors,
            forms: forms.try_into().unwrap(),
            summary,
        })
    }

    // -- minors --------------------------------------------------------------

    pub fn minors(&mut self) -> Result<&MinorStage, PipelineError> {
        if self.minors.is_none() {
            let stage = if self.store.has("minors.json") {
                self.load_minors()?
            } else {
                self.eliminate()?;
                self.run_minors()?
            };
            self.minors = Some(stage);
        }
        Ok(self.minors.as_ref().unwrap())
    }

    fn run_minors(&self) -> Result<MinorStage, PipelineError> {
        log::info!("stage minors");
        let e = self.elim.as_ref().expect("eliminate stage loaded");
        let ms = elimination::build_minor_system(&e.forms, &e.ledger_factors)
            .map_err(|err| stage_err("minors")(err.to_string()))?;
        let summary = MinorSummary {
            det_raw: PolyInfo::of("det", &ms.det_raw),
            g: PolyInfo::of("G", &ms.g),
            g_strip: ms.g_strip.clone(),
            p: PolyInfo::of("P", &ms.p),
            q: PolyInfo::of("Q", &ms.q),
            raw_minors: ms.raw_minors.iter().enumerate().map(|(i, m)| PolyInfo::of(&format!("raw{}", i + 1), m)).collect(),
            minors: ms.minors.iter().enumerate().map(|(i, m)| PolyInfo::of(&format!("G{}", i + 1), m)).collect(),
            minor_strips: ms.minor_strips.to_vec(),
        };
        self.store.write_poly("det", &ms.det_raw)?;
        self.store.write_poly("G", &ms.g)?;
        self.store.write_poly("P", &ms.p)?;
        self.store.write_poly("Q", &ms.q)?;
        for i in 0..5 {
            self.store.write_poly(&format!("raw{}", i + 1), &ms.raw_minors[i])?;
            self.store.write_poly(&format!("G{}", i + 1), &ms.minors[i])?;
        }
        self.store.write_json("minors.json", &summary)?;
        Ok(MinorStage { det_raw: ms.det_raw, g: ms.g, p: ms.p, q: ms.q, raw_minors: ms.raw_minors, minors: ms.minors, summary })
    }

    fn load_minors(&self) -> Result<MinorStage, PipelineError> {
        log::info!("stage minors: loading checkpoint");
        let summary: MinorSummary = self.store.read_json("minors.json")?;
        let mut raw = Vec::new();
        let mut minors = Vec::new();
        for i in 0..5 {
            raw.push(self.read_checked(&format!("raw{}", i + 1), &summary.raw_minors[i])?);
            minors.push(self.read_checked(&format!("G{}", i + 1), &summary.minors[i])?);
        }
        Ok(MinorStage {
            det_raw: self.read_checked("det", &summary.det_raw)?,
            g: self.read_checked("G", &summary.g)?,
            p: self.read_checked("P", &summary.p)?,
            q: self.read_checked("Q", &summary.q)?,
            raw_minors: raw.try_into().unwrap(),
            minors: minors.try_into().unwrap(),
            summary,
        })
    }

    // -- polygon -------------------------------------------------------------

    pub fn polygon(&mut self) -> Result<&PolygonSummary, PipelineError> {
        if self.polygon.is_none() {
            let summary = if self.store.has("polygon.json") {
                self.store.read_json("polygon.json")?
            } else {
                self.minors()?;
                log::info!("stage polygon");
                let m = self.minors.as_ref().unwrap();
                let (supports, sum, hull) = minkowski_of(&m.minors)?;
                let summary = PolygonSummary {
                    supports,
                    sumset_cardinality: sum.len(),
                    edge_normals: polygon::edge_normals(&hull).map_err(|e| stage_err("polygon")(e.to_string()))?,
                    hull_vertices: hull.vertices,
                };
                self.store.write_json("polygon.json", &summary)?;
                summary
            };
            self.polygon = Some(summary);
        }
        Ok(self.polygon.as_ref().unwrap())
    }

    /// Normals examined under the configured filter, in hull order.
    pub fn relevant_normals(&mut self) -> Result<Vec<Point>, PipelineError> {
        let filter = self.cfg.filter;
        Ok(self.polygon()?.edge_normals.iter().map(|e| e.normal).filter(|n| filter.accepts(*n)).collect())
    }

    // -- verdicts ------------------------------------------------------------

    pub fn verdicts(&mut self) -> Result<&[FaceVerdict], PipelineError> {
        if self.verdicts.is_none() {
            let name = format!("verdicts-{}.json", self.cfg.filter_tag());
            let v = if self.store.has(&name) {
                self.store.read_json(&name)?
            } else {
                let normals = self.relevant_normals()?;
                self.minors()?;
                let m = self.minors.as_ref().unwrap();
                let mut out = Vec::new();
                for n in normals {
                    log::info!("stage verdicts: normal {n:?}");
                    out.push(solve::face_verdict(n, &m.minors, self.cfg.limits).map_err(|e| stage_err("verdicts")(e.to_string()))?);
                }
                self.store.write_json(&name, &out)?;
                out
            };
            self.verdicts = Some(v);
        }
        Ok(self.verdicts.as_deref().unwrap())
    }

    // -- branches ------------------------------------------------------------

    /// Branch analysis for every candidate root of a normal with `a + b >= 0`.
    pub fn branches(&mut self) -> Result<&[BranchVerdict], PipelineError> {
        if self.branches.is_none() {
            let name = format!("branches-{}-t{}-c{}.json", self.cfg.filter_tag(), self.cfg.truncation, self.cfg.ceiling);
            let v = if self.store.has(&name) {
                self.store.read_json(&name)?
            } else {
                let targets = branch_targets(self.verdicts()?);
                self.minors()?;
                let m = self.minors.as_ref().unwrap();
                let mut out = Vec::new();
                for (normal, root) in targets {
                    log::info!("stage branches: normal {normal:?} root {root}");
                    let v = puiseux::analyze_branch(&m.minors, normal, &root, self.cfg.truncation, self.cfg.ceiling, self.cfg.limits)
                        .map_err(|e| stage_err("branches")(e.to_string()))?;
                    out.push(v);
                }
                self.store.write_json(&name, &out)?;
                out
            };
            self.branches = Some(v);
        }
        Ok(self.branches.as_deref().unwrap())
    }

    // -- oracle --------------------------------------------------------------

    pub fn oracle(&mut self) -> Result<&OracleReport, PipelineError> {
        if self.oracle.is_none() {
            let r = if self.store.has("oracle.json") {
                self.store.read_json("oracle.json")?
            } else {
                self.derive()?;
                self.eliminate()?;
                self.minors()?;
                let r = run_oracle(
                    self.derive.as_ref().unwrap(),
                    self.elim.as_ref().unwrap(),
                    self.minors.as_ref().unwrap(),
                    &self.cfg.oracle,
                )
                .map_err(|e| stage_err("oracle")(e.to_string()))?;
                self.store.write_json("oracle.json", &r)?;
                r
            };
            self.oracle = Some(r);
        }
        Ok(self.oracle.as_ref().unwrap())
    }

    // -- certificate ---------------------------------------------------------

    fn assemble(&self, failed_stage: Option<String>, failure: Option<String>) -> Certificate {
        let mut stage_hashes = BTreeMap::new();
        let mut put = |name: &str, h: Option<String>| {
            if let Some(h) = h {
                stage_hashes.insert(name.to_string(), h);
            }
        };
        put("derive", self.derive.as_ref().map(|d| hash_json(&d.summary)));
        put("eliminate", self.elim.as_ref().map(|e| hash_json(&e.summary)));
        put("minors", self.minors.as_ref().map(|m| hash_json(&m.summary)));
        put("polygon", self.polygon.as_ref().map(hash_json));
        put("verdicts", self.verdicts.as_ref().map(hash_json));
        put("branches", self.branches.as_ref().map(hash_json));
        put("oracle", self.oracle.as_ref().map(hash_json));
        let relevant_normals: Vec<Point> = self
            .polygon
            .as_ref()
            .map(|p| p.edge_normals.iter().map(|e| e.normal).filter(|n| self.cfg.filter.accepts(*n)).collect())
            .unwrap_or_default();
        let face_verdicts = self.verdicts.clone().unwrap_or_default();
        let branch_verdicts = self.branches.clone().unwrap_or_default();
        let filter_exclusions = filter_exclusions(&face_verdicts);
        let verdict = match failure {
            Some(msg) => FinalVerdict::Unresolved(vec![msg]),
            None => derive_verdict(&relevant_normals, &face_verdicts, &branch_verdicts, &filter_exclusions),
        };
        let mut cert = Certificate {
            version: VERSION.to_string(),
            config: CertificateConfig {
                truncation: self.cfg.truncation,
                ceiling: self.cfg.ceiling,
                filter: self.cfg.filter,
                limits: self.cfg.limits,
                oracle: self.cfg.oracle.clone(),
            },
            stage_hashes,
            derive: self.derive.as_ref().map(|d| d.summary.clone()),
            eliminate: self.elim.as_ref().map(|e| e.summary.clone()),
            minors: self.minors.as_ref().map(|m| m.summary.clone()),
            polygon: self.polygon.clone(),
            relevant_normals,
            face_verdicts,
            branch_verdicts,
            filter_exclusions,
            oracle: self.oracle.clone(),
            discrepancies: Vec::new(),
            failed_stage,
            verdict,
        };
        cert.discrepancies = discrepancies(&cert);
        cert
    }

    /// Run every stage and assemble the certificate; on failure the error
    /// carries the partial certificate naming the failed stage.
    pub fn certify(&mut self) -> Result<Certificate, PipelineError> {
        type Step = fn(&mut Pipeline) -> Result<(), PipelineError>;
        let steps: [(&str, Step); 7] = [
            ("derive", |p| p.derive().map(|_| ())),
            ("eliminate", |p| p.eliminate().map(|_| ())),
            ("minors", |p| p.minors().map(|_| ())),
            ("polygon", |p| p.polygon().map(|_| ())),
            ("verdicts", |p| p.verdicts().map(|_| ())),
            ("branches", |p| p.branches().map(|_| ())),
            ("oracle", |p| p.oracle().map(|_| ())),
        ];
        for (name, step) in steps {
            if let Err(e) = step(self) {
                let message = e.to_string();
                let partial = self.assemble(Some(name.to_string()), Some(format!("stage {name} failed: {message}")));
                self.store.write_text("certificate.partial.json", &partial.to_json())?;
                return Err(PipelineError::Aborted { stage: name.to_string(), message, partial: Box::new(partial) });
            }
        }
        let cert = self.assemble(None, None);
        self.store.write_text("certificate.json", &cert.to_json())?;
        Ok(cert)
    }
}

/// Run the full pipeline.
pub fn run_pipeline(cfg: PipelineConfig) -> Result<Certificate, PipelineError> {
    Pipeline::new(cfg)?.certify()
}

fn minkowski_of(minors: &[SparsePoly]) -> Result<(Vec<usize>, polygon::Support, polygon::LatticePolygon), PipelineError> {
    let supports = minors
        .iter()
        .map(polygon::support_of)
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| stage_err("polygon")(e.to_string()))?;
    let (sum, hull) = polygon::minkowski_support(&supports);
    Ok((supports.iter().map(|s| s.len()).collect(), sum, hull))
}

/// `(normal, root)` pairs needing branch analysis.
fn branch_targets(verdicts: &[FaceVerdict]) -> Vec<(Point, Rational)> {
    let mut out = Vec::new();
    for v in verdicts {
        if let Verdict::CandidateRoots { roots, .. } = &v.verdict {
            if v.normal.0 + v.normal.1 >= 0 {
                for (r, _) in roots {
                    out.push((v.normal, r.parse().expect("recorded root is rational")));
                }
            }
        }
    }
    out
}

const FILTER_RATIONALE: &str = "a + b < 0: a one-dimensional solution component has a balanced tropical \
    fan, its ray directions summing to zero with positive weights, so at least one ray satisfies a + b >= 0; \
    every such ray is excluded by the relevant-normal verdicts, hence no component exists";

fn filter_exclusions(verdicts: &[FaceVerdict]) -> Vec<FilterExclusion> {
    verdicts
        .iter()
        .filter(|v| v.normal.0 + v.normal.1 < 0 && matches!(v.verdict, Verdict::CandidateRoots { .. }))
        .map(|v| FilterExclusion { normal: v.normal, reason: FILTER_RATIONALE.to_string() })
        .collect()
}

/// The finiteness implication: every relevant normal is a vertex face,
/// has no nonzero face solution, or has all candidate roots excluded by
/// branch analysis (or is a documented filter exclusion).
pub fn derive_verdict(
    relevant: &[Point],
    faces: &[FaceVerdict],
    branches: &[BranchVerdict],
    exclusions: &[FilterExclusion],
) -> FinalVerdict {
    let mut unresolved = Vec::new();
    for n in relevant {
        let Some(fv) = faces.iter().find(|f| f.normal == *n) else {
            unresolved.push(format!("normal {n:?}: no face verdict"));
            continue;
        };
        match &fv.verdict {
            Verdict::VertexFace { .. } | Verdict::NoNonzeroSolution => {}
            Verdict::CandidateRoots { roots, flagged_remainder } => {
                if exclusions.iter().any(|e| e.normal == *n) {
                    continue;
                }
                if let Some(rem) = flagged_remainder {
                    unresolved.push(format!("normal {n:?}: irrational face roots {rem}"));
                }
                for (r, _) in roots {
                    match branches.iter().find(|b| b.normal == *n && &b.root == r) {
                        Some(b) if b.outcome.is_excluded() => {}
                        Some(b) => unresolved.push(format!("normal {n:?} root {r}: {:?}", b.outcome)),
                        None => unresolved.push(format!("normal {n:?} root {r}: no branch verdict")),
                    }
                }
            }
        }
    }
    if unresolved.is_empty() {
        FinalVerdict::Finite
    } else {
        FinalVerdict::Unresolved(unresolved)
    }
}

// ---------------------------------------------------------------------------
// Oracle stage

fn quad_to_string(q: &oracle::QuadElem, d: &Rational) -> String {
    if q.b.is_zero() {
        q.a.to_string()
    } else {
        format!("{} + {} sqrt({})", q.a, q.b, d)
    }
}

fn run_oracle(d: &DeriveStage, e: &ElimStage, m: &MinorStage, tol: &OracleTolerances) -> Result<OracleReport, oracle::OracleError> {
    log::info!("stage oracle");
    let witnesses = oracle::relative_equilibrium_witnesses();
    let mut named: Vec<(String, SparsePoly)> =
        e.forms.iter().enumerate().map(|(i, f)| (format!("a{}0", i + 1), f.a[0].clone())).collect();
    named.extend(m.raw_minors.iter().enumerate().map(|(i, g)| (format!("G{}", i + 1), g.clone())));
    let vanishing = oracle::vanishing_records(&named, &witnesses, tol.precision_bits, tol.vanishing)?;
    let stripped: Vec<(String, SparsePoly)> =
        m.minors.iter().enumerate().map(|(i, g)| (format!("G{} (stripped)", i + 1), g.clone())).collect();
    let stripped_minors = oracle::vanishing_records(&stripped, &witnesses, tol.precision_bits, tol.vanishing)?;

    // y2 from f3 = c0 + c1 y2.
    let f3 = e.c0.add(&e.c1.mul(&SparsePoly::var(VarId::Y2)));
    let mut y2 = Vec::new();
    for w in &witnesses {
        let a = w.assignment();
        let f3v = oracle::eval_exact(&f3, &a)?;
        let c0 = oracle::eval_exact(&e.c0, &a)?;
        let c1 = oracle::eval_exact(&e.c1, &a)?;
        let geometric = oracle::QuadElem { a: Rational::from_integer(0.into()), b: w.y2_coef.clone() };
        let solved = if c1.is_zero() {
            None
        } else {
            // -c0/c1 in Q(sqrt d): multiply by the conjugate.
            let dd = &w.omega_sq;
            let norm = &c1.a * &c1.a - &c1.b * &c1.b * dd;
            let num_a = -(&c0.a * &c1.a - &c0.b * &c1.b * dd);
            let num_b = -(&c0.b * &c1.a - &c0.a * &c1.b);
            Some(oracle::QuadElem { a: num_a / &norm, b: num_b / &norm })
        };
        let passes = f3v.is_zero() && solved.as_ref().is_none_or(|s| *s == geometric);
        y2.push(Y2Check {
            witness: w.label,
            f3_vanishes: f3v.is_zero(),
            c1_vanishes: c1.is_zero(),
            solved_y2: solved.as_ref().map(|s| quad_to_string(s, &w.omega_sq)),
            geometric_y2: quad_to_string(&geometric, &w.omega_sq),
            passes,
        });
    }

    let icfg = IntegrationConfig { tol: tol.integration, ..IntegrationConfig::default() };
    let fd_cfg = IntegrationConfig { tol: 1e-14, ..icfg };
    let start = oracle::generic_state();
    let mut finite_differences = Vec::new();
    for k in 1..=4 {
        let report = oracle::finite_diff_check(&d.cascade[k - 1], &start, k, &FiniteDiffConfig::for_order(k), &fd_cfg)?;
        let converges = report.observed_orders.iter().all(|o| (1.5..=2.5).contains(o));
        let tolerance = tol.finite_difference[k - 1];
        let passes = converges && report.max_relative_deviation < tolerance;
        finite_differences.push(FiniteDiffRecord { report, tolerance, converges, passes });
    }

    let horizon = 10.0;
    let orbit = oracle::integrate(&start, horizon, 200, &icfg)?;
    let lagrange = oracle::integrate(&witnesses[0].state, horizon, 200, &icfg)?;
    let lagrange_distance_drift = (0..3).map(|i| lagrange.drift(|s| s.distances()[i])).fold(0.0, f64::max);
    let energy_drift = orbit.drift(|s| s.energy());
    let angular_momentum_drift = orbit.drift(|s| s.angular_momentum());
    let conservation = ConservationRecord {
        horizon,
        tolerance: tol.drift,
        energy_drift,
        angular_momentum_drift,
        lagrange_distance_drift,
        passes: energy_drift < tol.drift && angular_momentum_drift < tol.drift && lagrange_distance_drift < tol.drift,
    };
    let passes = vanishing.iter().all(|r| r.passes)
        && y2.iter().all(|c| c.passes)
        && finite_differences.iter().all(|f| f.passes)
        && conservation.passes;
    Ok(OracleReport { witnesses, vanishing, stripped_minors, y2, finite_differences, conservation, passes })
}

// ---------------------------------------------------------------------------
// Discrepancy notes

const REFERENCE_SUMSET: usize = 16854;

fn discrepancies(cert: &Certificate) -> Vec<Discrepancy> {
    let mut out = vec![Discrepancy {
        topic: "velocity linear system".into(),
        reference: "r13 w13 = (x2+1/2) u2 + y2 v2, r23 w23 = (x2-1/2) u2 + y2 v2".into(),
        computed: "the rate equations carry an extra +-(1/2) y2 v1 term with v1 = 2 om - (4/3)(x2 v2 - y2 u2)".into(),
        note: "the reference system drops y1-independent terms of (y2 +- y1/2)(v2 +- v1/2); the derived system is used".into(),
    }];
    if let Some(p) = &cert.polygon {
        if p.sumset_cardinality != REFERENCE_SUMSET {
            out.push(Discrepancy {
                topic: "Minkowski sumset cardinality".into(),
                reference: format!("{REFERENCE_SUMSET} points, 14 hull vertices"),
                computed: format!("{} points, {} hull vertices", p.sumset_cardinality, p.hull_vertices.len()),
                note: "hull and relevant normals agree; the interior point count depends on the exact minor supports".into(),
            });
        }
    }
    if let Some(m) = &cert.minors {
        let largest = m.minors.iter().max_by_key(|i| i.terms).unwrap();
        out.push(Discrepancy {
            topic: "largest minor size".into(),
            reference: "4450 monomials, powers up to 105".into(),
            computed: format!("{} ({} terms, exponents up to {})", largest.name, largest.terms, largest.max_exponent),
            note: "soft target; sizes depend on the removed nonvanishing factors".into(),
        });
    }
    for fv in &cert.face_verdicts {
        if fv.normal == (3, 1) {
            out.push(Discrepancy {
                topic: "face system for (3,1)".into(),
                reference: "3 r13 + r23^3 and 12636 r13^3 + 9828 r13 r23^3 + 1915 r23^6".into(),
                computed: fv.faces.join("; "),
                note: "the reference sextic is not quasi-homogeneous for (3,1) (weights 9, 6, 6); the computed faces are".into(),
            });
        }
        if fv.normal == (1, 1) {
            out.push(Discrepancy {
                topic: "face system for (1,1)".into(),
                reference: "Groebner basis generated by k (1 + k), root k = -1 leads to a series transcript".into(),
                computed: format!("{:?}, basis {}", fv.verdict, fv.dehomogenized_basis.join(", ")),
                note: "with k = -1 not a common face root, the normal is excluded at face level and no branch is needed".into(),
            });
        }
    }
    let slopes: Vec<String> = cert
        .branch_verdicts
        .iter()
        .filter(|b| b.normal == (0, 1))
        .filter_map(|b| b.diagrams.get(4))
        .flat_map(|d| d.segments.iter().map(|s| s.2.clone()))
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    if !slopes.is_empty() {
        out.push(Discrepancy {
            topic: "Newton diagram slopes of F5".into(),
            reference: "prose: slopes -1, -2; diagram: slopes -1, -1/2; leading terms a s or a s^2".into(),
            computed: format!("slopes {}", slopes.join(", ")),
            note: "the diagram values and d = -1/m agree with the computed diagram; the prose value -2 is inconsistent with a s^2".into(),
        });
    }
    out
}

// ---------------------------------------------------------------------------
// Verification

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyCheck {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<VerifyCheck>,
    pub verdict: FinalVerdict,
    pub recorded_verdict: FinalVerdict,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.ok) && self.verdict == self.recorded_verdict
    }
}

/// A recorded basis equal to `{1}`.
fn is_unit_text(basis: &[String]) -> bool {
    matches!(basis, [b] if b.parse::<SparsePoly>().is_ok_and(|p| p == SparsePoly::one()))
}

/// Re-derive the verdict from the certificate's own records.
pub fn verify_certificate(cert: &Certificate) -> VerifyReport {
    let mut checks = Vec::new();
    let mut check = |name: &str, ok: bool, detail: String| checks.push(VerifyCheck { name: name.into(), ok, detail });

    // Stage hashes match the recorded summaries.
    let recomputed: Vec<(&str, Option<String>)> = vec![
        ("derive", cert.derive.as_ref().map(hash_json)),
        ("eliminate", cert.eliminate.as_ref().map(hash_json)),
        ("minors", cert.minors.as_ref().map(hash_json)),
        ("polygon", cert.polygon.as_ref().map(hash_json)),
        ("verdicts", Some(hash_json(&cert.face_verdicts))),
        ("branches", Some(hash_json(&cert.branch_verdicts))),
        ("oracle", cert.oracle.as_ref().map(hash_json)),
    ];
    let mut mismatched = Vec::new();
    for (name, h) in recomputed {
        if cert.stage_hashes.get(name) != h.as_ref() {
            mismatched.push(name);
        }
    }
    check("stage hashes", mismatched.is_empty(), format!("mismatched: {mismatched:?}"));

    // Relevant normals follow from the recorded hull.
    match &cert.polygon {
        Some(p) => {
            let hull = polygon::LatticePolygon { vertices: p.hull_vertices.clone() };
            let normals: Vec<Point> = polygon::edge_normals(&hull)
                .map(|es| es.into_iter().map(|e| e.normal).filter(|n| cert.config.filter.accepts(*n)).collect())
                .unwrap_or_default();
            check("relevant normals", normals == cert.relevant_normals, format!("{normals:?}"));
        }
        None => check("relevant normals", false, "no polygon record".into()),
    }

    // Face verdicts cover the relevant normals exactly once.
    let covered: Vec<Point> = cert.face_verdicts.iter().map(|f| f.normal).collect();
    check("face verdict coverage", covered == cert.relevant_normals, format!("{covered:?}"));

    // Candidate roots are consistent with the recorded k-basis.
    let mut root_issues = Vec::new();
    for fv in &cert.face_verdicts {
        if let Verdict::CandidateRoots { roots, .. } = &fv.verdict {
            match fv.dehomogenized_basis.first().map(|b| b.parse::<SparsePoly>()) {
                Some(Ok(b)) => {
                    for (r, _) in roots {
                        let ok = r.parse::<Rational>().map(|x| b.subst_const(VarId::K, &x).is_zero()).unwrap_or(false);
                        if !ok {
                            root_issues.push(format!("{:?} root {r}", fv.normal));
                        }
                    }
                }
                _ => root_issues.push(format!("{:?}: unreadable basis", fv.normal)),
            }
        }
        if matches!(fv.verdict, Verdict::NoNonzeroSolution) && !is_unit_text(&fv.basis) {
            root_issues.push(format!("{:?}: NoNonzeroSolution without unit basis", fv.normal));
        }
    }
    check("candidate roots", root_issues.is_empty(), format!("{root_issues:?}"));

    // Branch exclusions carry a unit basis or a nonroot witness.
    let mut branch_issues = Vec::new();
    for b in &cert.branch_verdicts {
        if b.outcome.is_excluded() {
            let unit_steps = b.transcript.iter().filter(|s| is_unit_text(&s.basis)).count();
            let face_level = matches!(&b.outcome, puiseux::Outcome::Inconsistent { witnesses, .. } if witnesses.iter().any(|w| w.starts_with("P(")));
            if unit_steps == 0 && !face_level {
                branch_issues.push(format!("{:?} root {}", b.normal, b.root));
            }
        }
    }
    check("branch evidence", branch_issues.is_empty(), format!("{branch_issues:?}"));

    let exclusions = filter_exclusions(&cert.face_verdicts);
    check("filter exclusions", exclusions == cert.filter_exclusions, format!("{} exclusions", exclusions.len()));

    let verdict = derive_verdict(&cert.relevant_normals, &cert.face_verdicts, &cert.branch_verdicts, &cert.filter_exclusions);
    let verdict = if cert.failed_stage.is_some() { cert.verdict.clone() } else { verdict };
    VerifyReport { checks, verdict, recorded_verdict: cert.verdict.clone() }
}

pub fn read_certificate(path: &Path) -> Result<Certificate, PipelineError> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| PipelineError::Config(format!("unreadable certificate: {e}")))
}

// ---------------------------------------------------------------------------
// Figure data

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Figure {
    Minkowski,
    NewtonDiagram,
}

/// Write CSV figure data into `out`; requires the matching checkpoint.
pub fn emit_figures(pipeline: &mut Pipeline, figure: Figure, out: &Path) -> Result<Vec<PathBuf>, PipelineError> {
    fs::create_dir_all(out)?;
    let mut written = Vec::new();
    match figure {
        Figure::Minkowski => {
            if !pipeline.store().has("minors.json") {
                return Err(PipelineError::MissingCheckpoint("minors".into()));
            }
            let m = pipeline.minors()?;
            let (_, sum, hull) = minkowski_of(&m.minors)?;
            let mut pts = String::from("m,n\n");
            for (a, b) in &sum {
                pts.push_str(&format!("{a},{b}\n"));
            }
            let mut hv = String::from("m,n\n");
            for (a, b) in &hull.vertices {
                hv.push_str(&format!("{a},{b}\n"));
            }
            for (name, text) in [("minkowski_points.csv", pts), ("minkowski_hull.csv", hv)] {
                fs::write(out.join(name), text)?;
                written.push(out.join(name));
            }
        }
        Figure::NewtonDiagram => {
            let name = format!("branches-{}-t{}-c{}.json", pipeline.cfg.filter_tag(), pipeline.cfg.truncation, pipeline.cfg.ceiling);
            if !pipeline.store().has(&name) {
                return Err(PipelineError::MissingCheckpoint("branches".into()));
            }
            let branches = pipeline.branches()?;
            for b in branches.iter().filter(|b| b.method == "newton-diagram") {
                let Some(d) = b.diagrams.get(4) else { continue };
                let tag = format!("{}_{}_root_{}", b.normal.0, b.normal.1, b.root.replace('/', "_").replace('-', "m"));
                let mut pts = String::from("s,u\n");
                for (a, c) in &d.support {
                    pts.push_str(&format!("{a},{c}\n"));
                }
                let mut seg = String::from("s0,u0,s1,u1,slope,d\n");
                for (p, q, slope, dd) in &d.segments {
                    seg.push_str(&format!("{},{},{},{},{slope},{dd}\n", p.0, p.1, q.0, q.1));
                }
                for (file, text) in [(format!("newton_F5_{tag}_support.csv"), pts), (format!("newton_F5_{tag}_segments.csv"), seg)] {
                    fs::write(out.join(&file), text)?;
                    written.push(out.join(file));
                }
            }
        }
    }
    Ok(written)
}
