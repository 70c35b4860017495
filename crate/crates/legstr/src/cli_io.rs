//! Persistent documents, text renderings, and the operations behind the
//! command-line subcommands.
//!
//! Everything emitted here is byte-deterministic: JSON fields keep their
//! declaration order, floats print in the shortest form that round-trips,
//! fractions cross the boundary as exact "a/b" strings, and the SVG plots
//! are fixed-canvas polylines without timestamps. Reading a document this
//! module wrote and writing it again reproduces the bytes, so golden files
//! stay stable across runs and machines.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64 as C;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::diffinv;
use crate::dynamics::{lambda_matrix, Characters, CurvatureProfile};
use crate::error::{Error, Result};
use crate::knot_num::{self, Polyline3};
use crate::moduli::{characteristic_numbers, enumerate_closed_strings, knot_annotation, CharacteristicNumbers};
use crate::period_map::{self, MonodromicPoint};
use crate::space::{self, CMat, CVec};
use crate::string_builder::{
    dual_configuration, ConstantCurvatureCurve, LegendrianCurveSample, SampleMeta, StringCurve,
};
use crate::tol;

/// Schema version stamped into every document this build writes.
pub const FORMAT_VERSION: &str = "1";

/// Gate for the stored-sample versus rebuilt-lift comparison in
/// [`verify_report`]: float round-trip noise passes, anything edited fails.
pub const SAMPLE_MATCH: f64 = 1e-9;

/// Gate for the momentum-spectrum check: the symmetric functions of the
/// conserved matrix must match the closed-form spectrum this tightly.
pub const MOMENTUM_SPECTRUM: f64 = 1e-9;

// ---------------------------------------------------------------------------
// Documents
// ---------------------------------------------------------------------------

/// Which construction a curve document records.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    /// Symmetric configuration from characters (m, ell).
    String,
    /// Constant-curvature solenoid from a ratio q = a/b.
    ConstantCurvature,
    /// Image of one of the above under the order-four axis exchange; the
    /// underlying recipe is told apart by which metadata block is present.
    Dual,
    /// Externally supplied samples; can be plotted but carries no recipe to
    /// verify against.
    Custom,
}

/// Tool version and the tolerance record in force at write time.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Provenance {
    pub tool_version: String,
    pub tolerances: tol::Tolerances,
}

impl Provenance {
    pub fn current() -> Provenance {
        Provenance {
            tool_version: env!("CARGO_PKG_VERSION").into(),
            tolerances: *tol::shared(),
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CharactersBlock {
    pub m: f64,
    pub ell: f64,
}

/// Exact rotation numbers as fraction strings, e.g. "10/27".
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModulusBlock {
    pub q2: String,
    pub q3: String,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CharacteristicBlock {
    pub h1: i64,
    pub k1: i64,
    pub h2: i64,
    pub k2: i64,
    pub n: i64,
    pub l1: i64,
    pub l2: i64,
    pub maslov: i64,
}

impl CharacteristicBlock {
    fn from_numbers(numbers: &CharacteristicNumbers) -> CharacteristicBlock {
        CharacteristicBlock {
            h1: numbers.h1,
            k1: numbers.k1,
            h2: numbers.h2,
            k2: numbers.k2,
            n: numbers.n,
            l1: numbers.l1,
            l2: numbers.l2,
            maslov: numbers.maslov,
        }
    }

    fn to_numbers(self) -> CharacteristicNumbers {
        CharacteristicNumbers {
            h1: self.h1,
            k1: self.k1,
            h2: self.h2,
            k2: self.k2,
            n: self.n,
            l1: self.l1,
            l2: self.l2,
            maslov: self.maslov,
        }
    }
}

/// One sampled point: parameter, homogeneous lift as re/im pairs, and the
/// Heisenberg-chart image.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SampleRecord {
    pub s: f64,
    pub hom: [[f64; 2]; 3],
    pub heis: [f64; 3],
}

/// A sampled curve with enough metadata to rebuild the construction it came
/// from. The sample grid is half open: the closing vertex of a closed curve
/// is not stored.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurveDocument {
    pub format_version: String,
    pub kind: CurveKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub characters: Option<CharactersBlock>,
    /// Constant-curvature ratio "a/b".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<ModulusBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub characteristic: Option<CharacteristicBlock>,
    pub samples: Vec<SampleRecord>,
    pub provenance: Provenance,
}

impl CurveDocument {
    /// Snapshot a sampled curve, carrying over whichever metadata its
    /// construction produced.
    pub fn from_sample(sample: &LegendrianCurveSample) -> CurveDocument {
        let samples = sample
            .params
            .iter()
            .zip(&sample.lifts)
            .zip(&sample.heisenberg)
            .map(|((&s, z), &heis)| SampleRecord {
                s,
                hom: [[z[0].re, z[0].im], [z[1].re, z[1].im], [z[2].re, z[2].im]],
                heis,
            })
            .collect();
        let (kind, characters, q, modulus, characteristic) = match &sample.meta {
            SampleMeta::Symmetric { m, ell, numbers, dual, .. } => (
                if *dual { CurveKind::Dual } else { CurveKind::String },
                Some(CharactersBlock { m: *m, ell: *ell }),
                None,
                numbers.as_ref().map(|n| {
                    let (q2, q3) = n.modulus();
                    ModulusBlock { q2: q2.to_string(), q3: q3.to_string() }
                }),
                numbers.as_ref().map(CharacteristicBlock::from_numbers),
            ),
            SampleMeta::ConstantCurvature { a, b, dual, .. } => (
                if *dual { CurveKind::Dual } else { CurveKind::ConstantCurvature },
                None,
                Some(format!("{a}/{b}")),
                None,
                None,
            ),
        };
        CurveDocument {
            format_version: FORMAT_VERSION.into(),
            kind,
            characters,
            q,
            modulus,
            characteristic,
            samples,
            provenance: Provenance::current(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("curve document serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<CurveDocument> {
        let doc: CurveDocument = serde_json::from_str(text)
            .map_err(|e| Error::Format(format!("curve document: {e}")))?;
        doc.validate()?;
        Ok(doc)
    }

    pub fn validate(&self) -> Result<()> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported format_version {:?}; this build reads {FORMAT_VERSION:?}",
                self.format_version
            )));
        }
        if self.samples.len() < 2 {
            return Err(Error::Format("a curve document needs at least two samples".into()));
        }
        for pair in self.samples.windows(2) {
            if !(pair[1].s > pair[0].s) {
                return Err(Error::Format(format!(
                    "sample parameters must be strictly increasing, got {} after {}",
                    pair[1].s, pair[0].s
                )));
            }
        }
        match self.kind {
            CurveKind::String if self.characters.is_none() => {
                return Err(Error::Format("a string document needs its characters block".into()))
            }
            CurveKind::ConstantCurvature if self.q.is_none() => {
                return Err(Error::Format("a constant-curvature document needs its ratio q".into()))
            }
            CurveKind::Dual if self.characters.is_none() && self.q.is_none() => {
                return Err(Error::Format(
                    "a dual document needs the characters block or the ratio q".into(),
                ))
            }
            _ => {}
        }
        if let Some(block) = &self.modulus {
            for (name, text) in [("q2", &block.q2), ("q3", &block.q3)] {
                parse_fraction(text)
                    .map_err(|_| Error::Format(format!("modulus {name} {text:?} is not a fraction")))?;
            }
        }
        if let Some(q) = &self.q {
            parse_fraction(q).map_err(|_| Error::Format(format!("ratio q {text:?} is not a fraction", text = q)))?;
        }
        Ok(())
    }

    /// Rebuild the in-memory sample, including the construction metadata the
    /// measurement routines need. Custom documents carry no recipe and are
    /// rejected.
    pub fn to_sample(&self) -> Result<LegendrianCurveSample> {
        self.validate()?;
        let meta = self.rebuild_meta()?;
        let params: Vec<f64> = self.samples.iter().map(|r| r.s).collect();
        let lifts: Vec<CVec> = self
            .samples
            .iter()
            .map(|r| {
                CVec::new(
                    C::new(r.hom[0][0], r.hom[0][1]),
                    C::new(r.hom[1][0], r.hom[1][1]),
                    C::new(r.hom[2][0], r.hom[2][1]),
                )
            })
            .collect();
        let heisenberg: Vec<[f64; 3]> = self.samples.iter().map(|r| r.heis).collect();
        Ok(LegendrianCurveSample { params, lifts, heisenberg, meta })
    }

    fn rebuild_meta(&self) -> Result<SampleMeta> {
        let dual = self.kind == CurveKind::Dual;
        if self.kind == CurveKind::Custom {
            return Err(Error::Domain(
                "custom documents carry no construction recipe; invariants and verification \
                 need a string or constant-curvature build"
                    .into(),
            ));
        }
        if let Some(q) = &self.q {
            let (a, b) = parse_ratio(q)?;
            let curve = ConstantCurvatureCurve::new(a, b)?;
            return Ok(SampleMeta::ConstantCurvature { a, b, r: curve.r, c: curve.c, dual });
        }
        let Some(block) = self.characters else {
            return Err(Error::Format("document carries neither characters nor a ratio".into()));
        };
        let ch = Characters::new(block.m, block.ell)?;
        let omega = CurvatureProfile::new(ch)?.omega();
        let (theta2, theta3) = match &self.modulus {
            Some(modulus) => (
                fraction_to_f64(&parse_fraction(&modulus.q2)?)?,
                fraction_to_f64(&parse_fraction(&modulus.q3)?)?,
            ),
            None => {
                let theta = period_map::theta(ch)?;
                (theta.theta2, theta.theta3)
            }
        };
        let count = self.samples.len();
        let step = (self.samples[count - 1].s - self.samples[0].s) / (count - 1) as f64;
        let span = count as f64 * step;
        let periods = (span / omega).round();
        if !(periods >= 1.0) || (span - periods * omega).abs() > 1e-6 * omega {
            return Err(Error::Format(format!(
                "samples span {span:.6} which is not a whole number of waves (omega = {omega:.6})"
            )));
        }
        Ok(SampleMeta::Symmetric {
            m: block.m,
            ell: block.ell,
            omega,
            theta2,
            theta3,
            numbers: self.characteristic.map(CharacteristicBlock::to_numbers),
            periods: periods as usize,
            dual,
        })
    }
}

/// Human-readable one-line description of what a document samples.
pub fn document_subject(doc: &CurveDocument) -> String {
    let suffix = if doc.kind == CurveKind::Dual { " dual" } else { "" };
    if let Some(c) = &doc.characteristic {
        format!("|{},{},{}>{suffix}", c.n, c.l1, c.l2)
    } else if let Some(q) = &doc.q {
        format!("solenoid q = {q}{suffix}")
    } else if let Some(c) = &doc.characters {
        format!("string m = {}, ell = {}{suffix}", c.m, c.ell)
    } else {
        "custom curve".into()
    }
}

pub fn read_curve_document(path: &Path) -> Result<CurveDocument> {
    CurveDocument::from_json(&std::fs::read_to_string(path)?)
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

/// One measured quantity against its gate. `value` carries the snapped
/// integer when the check produces one.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<serde_json::Value>,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckRecord {
    fn bounded(name: &str, residual: f64, tolerance: f64) -> CheckRecord {
        CheckRecord {
            name: name.into(),
            value: None,
            residual,
            tolerance,
            pass: residual.is_finite() && residual <= tolerance,
        }
    }
}

/// Rounds a raw count to the nearest integer and records how far it was.
fn snap_record(name: &str, raw: f64, gate: f64) -> (i64, CheckRecord) {
    let value = raw.round() as i64;
    let residual = (raw - value as f64).abs();
    let record = CheckRecord {
        name: name.into(),
        value: Some(serde_json::Value::from(value)),
        residual,
        tolerance: gate,
        pass: residual.is_finite() && residual <= gate,
    };
    (value, record)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportDocument {
    pub format_version: String,
    /// Which command produced the report: "invariants" or "verify".
    pub report: String,
    pub subject: String,
    pub checks: Vec<CheckRecord>,
    /// True exactly when every check passed.
    pub verdict: bool,
    pub provenance: Provenance,
}

impl ReportDocument {
    pub fn new(report: &str, subject: String, checks: Vec<CheckRecord>) -> ReportDocument {
        let verdict = !checks.is_empty() && checks.iter().all(|c| c.pass);
        ReportDocument {
            format_version: FORMAT_VERSION.into(),
            report: report.into(),
            subject,
            checks,
            verdict,
            provenance: Provenance::current(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }

    pub fn failing(&self) -> usize {
        self.checks.iter().filter(|c| !c.pass).count()
    }

    /// Aligned text rendering for diagnostics on stderr.
    pub fn summary(&self) -> String {
        let mut out = format!("{} report for {}\n", self.report, self.subject);
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.checks {
            let state = if c.pass { "PASS" } else { "FAIL" };
            let _ = write!(out, "  {state} {:width$}  residual {:9.3e} (tol {:7.1e})", c.name, c.residual, c.tolerance);
            if let Some(v) = &c.value {
                let _ = write!(out, "  value {v}");
            }
            out.push('\n');
        }
        let _ = write!(out, "verdict: {}", if self.verdict { "PASS" } else { "FAIL" });
        out
    }
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

/// What `solve` prints: the recovered characters with the derived quantities
/// and the exact modulus they came from.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveRecord {
    pub m: f64,
    pub ell: f64,
    pub omega: f64,
    pub strain: f64,
    pub n: i64,
    pub l1: i64,
    pub l2: i64,
    pub maslov: i64,
    pub q2: String,
    pub q3: String,
}

impl SolveRecord {
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("solve record serializes");
        text.push('\n');
        text
    }

    pub fn summary(&self) -> String {
        format!(
            "|{},{},{}>: m = {:.6}, ell = {:.6}, omega = {:.6}, strain = {:.5}",
            self.n, self.l1, self.l2, self.m, self.ell, self.omega, self.strain
        )
    }
}

/// Exact characteristic numbers of the triple (n, l1, l2), rejecting triples
/// that are not primitive (their lcm condition reduces them to a smaller
/// wave number).
pub fn numbers_from_triple(n: i64, l1: i64, l2: i64) -> Result<CharacteristicNumbers> {
    if n < 1 {
        return Err(Error::Domain(format!("wave number must be positive, got {n}")));
    }
    if l1 < 1 || l2 > -1 {
        return Err(Error::Domain(format!(
            "closed strings have l1 > 0 > l2, got l1 = {l1}, l2 = {l2}"
        )));
    }
    // q2 = (u + 2w)/3 and q3 = (u - w)/3 for u = -l2/n, w = l1/n.
    let q2 = BigRational::new(BigInt::from(2 * l1 - l2), BigInt::from(3 * n));
    let q3 = BigRational::new(BigInt::from(-l1 - l2), BigInt::from(3 * n));
    let numbers = characteristic_numbers(&q2, &q3)?;
    if numbers.n != n || numbers.l1 != l1 || numbers.l2 != l2 {
        return Err(Error::Domain(format!(
            "|{n},{l1},{l2}> is not primitive; the modulus belongs to {}",
            numbers.label()
        )));
    }
    Ok(numbers)
}

pub fn solve_from_triple(n: i64, l1: i64, l2: i64, tol_override: Option<f64>) -> Result<SolveRecord> {
    solve_record(numbers_from_triple(n, l1, l2)?, tol_override)
}

pub fn solve_from_modulus(q2: &str, q3: &str, tol_override: Option<f64>) -> Result<SolveRecord> {
    let q2 = parse_fraction(q2)?;
    let q3 = parse_fraction(q3)?;
    solve_record(characteristic_numbers(&q2, &q3)?, tol_override)
}

fn solve_record(numbers: CharacteristicNumbers, tol_override: Option<f64>) -> Result<SolveRecord> {
    let tolerance = tol_override.unwrap_or(tol::shared().solve);
    if !(tolerance > 0.0 && tolerance.is_finite()) {
        return Err(Error::Domain(format!(
            "solver tolerance must be a positive number, got {tolerance}"
        )));
    }
    let (q2, q3) = numbers.modulus();
    let target = MonodromicPoint { q2: fraction_to_f64(&q2)?, q3: fraction_to_f64(&q3)? };
    let ch = period_map::invert_theta(&target, tolerance)?;
    let omega = CurvatureProfile::new(ch)?.omega();
    Ok(SolveRecord {
        m: ch.m(),
        ell: ch.ell(),
        omega,
        strain: numbers.n as f64 * omega,
        n: numbers.n,
        l1: numbers.l1,
        l2: numbers.l2,
        maslov: numbers.maslov,
        q2: q2.to_string(),
        q3: q3.to_string(),
    })
}

// ---------------------------------------------------------------------------
// build / constcurv
// ---------------------------------------------------------------------------

/// Closed symmetric configuration for the class |n, l1, l2>, sampled over
/// all its waves.
pub fn build_closed_document(
    n: i64,
    l1: i64,
    l2: i64,
    samples_per_period: usize,
    dual: bool,
) -> Result<CurveDocument> {
    let numbers = numbers_from_triple(n, l1, l2)?;
    let (_, sample) = crate::string_builder::build_closed_string(&numbers, samples_per_period)?;
    finish_document(sample, dual)
}

/// One curvature wave of the symmetric configuration with the given
/// characters; generally an open arc.
pub fn build_arc_document(
    m: f64,
    ell: f64,
    samples_per_period: usize,
    dual: bool,
) -> Result<CurveDocument> {
    let ch = Characters::new(m, ell)?;
    let sample = StringCurve::new(ch)?.sample(samples_per_period, 1, None)?;
    finish_document(sample, dual)
}

/// Closed constant-curvature solenoid with ratio "a/b".
pub fn build_solenoid_document(
    ratio: &str,
    samples_per_turn: usize,
    dual: bool,
) -> Result<CurveDocument> {
    let (a, b) = parse_ratio(ratio)?;
    let sample = ConstantCurvatureCurve::new(a, b)?.sample(samples_per_turn)?;
    finish_document(sample, dual)
}

fn finish_document(sample: LegendrianCurveSample, dual: bool) -> Result<CurveDocument> {
    let sample = if dual { dual_configuration(&sample)? } else { sample };
    Ok(CurveDocument::from_sample(&sample))
}

// ---------------------------------------------------------------------------
// invariants
// ---------------------------------------------------------------------------

/// Measure the four discrete invariants of a closed documented curve: both
/// axis linking numbers (the first one twice, by independent algorithms),
/// the Maslov index, and the Thurston-Bennequin invariant.
pub fn invariants_report(doc: &CurveDocument) -> Result<ReportDocument> {
    let sample = doc.to_sample()?;
    if matches!(&sample.meta, SampleMeta::Symmetric { numbers: None, .. }) {
        return Err(Error::Domain(
            "invariants need a closed curve; this document samples one open wave".into(),
        ));
    }
    let tols = tol::shared();
    let poly = Polyline3::from_sample(&sample)?;
    let mut checks = Vec::new();

    let (lk1, record) =
        snap_record("lk1_axis_winding", knot_num::winding_number_raw(&poly)?, tols.winding_residual);
    checks.push(record);

    // Same integer through the Gauss double sum; the residual is measured
    // against the winding result, so disagreement fails loudly.
    let gauss = knot_num::axis_gauss_raw(&poly)?;
    checks.push(CheckRecord {
        name: "lk1_axis_gauss".into(),
        value: Some(serde_json::Value::from(lk1)),
        residual: (gauss - lk1 as f64).abs(),
        tolerance: tols.gauss_residual,
        pass: (gauss - lk1 as f64).abs() <= tols.gauss_residual,
    });

    let dual = dual_configuration(&sample)?;
    let dual_poly = Polyline3::from_sample(&dual)?;
    let (lk2, record) = snap_record(
        "lk2_dual_winding",
        knot_num::winding_number_raw(&dual_poly)?,
        tols.winding_residual,
    );
    checks.push(record);

    let (maslov, record) =
        snap_record("maslov_turning", knot_num::turning_number_raw(&poly)?, tols.winding_residual);
    checks.push(record);

    let eps = knot_num::vertical_pushoff_eps(&poly)?;
    let (tb, record) =
        snap_record("tb_pushoff", knot_num::pushoff_linking_raw(&poly, eps)?, tols.gauss_residual);
    checks.push(record);

    // Exact predictions exist for the base constructions; the dual image
    // permutes the axes, so its counts are reported without one.
    if doc.kind == CurveKind::String {
        if let Some(block) = &doc.characteristic {
            let gap = (lk1 - block.l1).abs().max((lk2 - block.l2).abs()).max((maslov - block.maslov).abs());
            checks.push(CheckRecord::bounded("matches_prediction", gap as f64, 0.0));
        }
    }
    if doc.kind == CurveKind::ConstantCurvature {
        if let Some(q) = &doc.q {
            let (a, b) = parse_ratio(q)?;
            let gap = (maslov - (a - b)).abs().max((tb - (-a * b)).abs());
            checks.push(CheckRecord::bounded("matches_prediction", gap as f64, 0.0));
        }
    }
    let _ = tb;
    Ok(ReportDocument::new("invariants", document_subject(doc), checks))
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

/// Rebuild the documented construction and re-check every residual gate:
/// membership, tangency, stored samples, closure and monodromy, Fubini
/// densities, stress, and momentum conservation.
pub fn verify_report(doc: &CurveDocument) -> Result<ReportDocument> {
    let sample = doc.to_sample()?;
    let checks = match &sample.meta {
        SampleMeta::Symmetric { .. } => verify_string_checks(&sample)?,
        SampleMeta::ConstantCurvature { .. } => verify_solenoid_checks(&sample)?,
    };
    Ok(ReportDocument::new("verify", document_subject(doc), checks))
}

/// Largest relative null-cone residual over the stored lifts.
fn null_cone_residual(sample: &LegendrianCurveSample) -> f64 {
    sample
        .lifts
        .iter()
        .map(|z| space::form(z, z).norm() / z.norm_squared())
        .fold(0.0, f64::max)
}

fn subset(count: usize, want: usize) -> impl Iterator<Item = usize> {
    let stride = (count / want.max(1)).max(1);
    (0..count).step_by(stride)
}

fn verify_string_checks(sample: &LegendrianCurveSample) -> Result<Vec<CheckRecord>> {
    let SampleMeta::Symmetric { m, ell, omega, numbers, dual, .. } = &sample.meta else {
        unreachable!("caller dispatched on the meta variant");
    };
    let ch = Characters::new(*m, *ell)?;
    let curve = StringCurve::new(ch)?;
    let profile = CurvatureProfile::new(ch)?;
    let tols = tol::shared();
    let count = sample.params.len();
    let axis_swap = space::matrix_l();
    let mut checks = Vec::new();

    checks.push(CheckRecord::bounded("null_cone", null_cone_residual(sample), tols.null_cone));

    // Tangency from the analytic jets. The form is invariant under the axis
    // exchange, so the base jets also answer for a dual document.
    let mut tangency = 0.0f64;
    for &s in &sample.params {
        let jet = curve.lift_jet(s, 1);
        let r = space::form(&jet[0], &jet[1]).norm() / (jet[0].norm() * jet[1].norm());
        tangency = tangency.max(r);
    }
    checks.push(CheckRecord::bounded("legendrian", tangency, tols.legendrian));

    // Stored lifts against the reconstruction.
    let mut mismatch = 0.0f64;
    for (k, &s) in sample.params.iter().enumerate() {
        let mut z = curve.lift(s);
        if *dual {
            z = axis_swap * z;
        }
        mismatch = mismatch.max(space::projective_distance(&z, &sample.lifts[k]));
    }
    checks.push(CheckRecord::bounded("sample_match", mismatch, SAMPLE_MATCH));

    if let Some(numbers) = numbers {
        let span = numbers.n as f64 * omega;
        let closure = space::projective_distance(&curve.lift(0.0), &curve.lift(span));
        checks.push(CheckRecord::bounded("closure", closure, tols.closure));

        let monodromy = curve.monodromy();
        let mut defect = 0.0f64;
        for k in subset(count, 32) {
            let s = sample.params[k];
            let translated = curve.lift(s + omega);
            let mapped = monodromy * curve.lift(s);
            defect = defect.max(space::projective_distance(&mapped, &translated));
        }
        checks.push(CheckRecord::bounded("monodromy", defect, tols.monodromy));
    }

    // Fubini densities and the stress of the curvature profile. These are
    // reparametrization-scale identities, untouched by the axis exchange.
    let mut fubini_a = 0.0f64;
    let mut fubini_b = 0.0f64;
    let mut stress = 0.0f64;
    for k in subset(count, 24) {
        let s = sample.params[k];
        let normalized = diffinv::normalize_lift(&curve.lift_jet(s, 5))?;
        let densities = diffinv::fubini_densities(&normalized)?;
        fubini_a = fubini_a.max((densities.a - 1.0).abs());
        fubini_b = fubini_b.max((densities.b - profile.kappa(s)).abs());
        let b_jet = profile.kappa_jet(s, 3);
        stress = stress.max(diffinv::stress_density(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0], &b_jet).abs());
    }
    checks.push(CheckRecord::bounded("fubini_a", fubini_a, tols.fubini_a));
    checks.push(CheckRecord::bounded("fubini_b", fubini_b, tols.fubini_b * ell * ell));
    checks.push(CheckRecord::bounded("stress", stress, tols.stress * ell.powi(9)));

    // Momentum: conjugate the generator built from the local curvature 2-jet
    // by the Wilczynski frame at the same point; along a critical curve the
    // result must neither drift nor change spectrum.
    let m2 = profile.m2();
    let m3 = profile.m3();
    let scale = 1.0 + m2.abs() + m3.abs();
    let mut reference: Option<CMat> = None;
    let mut drift = 0.0f64;
    let mut spectrum = 0.0f64;
    for k in subset(count, 12) {
        let s = sample.params[k];
        let generator = *lambda_matrix(&profile.kappa_jet(s, 2))?.value();
        let normalized = diffinv::normalize_lift(&curve.lift_jet(s, 4))?;
        let third = (normalized[2] + normalized[0] * C::new(profile.kappa(s), 0.0)) * (-C::i());
        let frame = CMat::from_columns(&[normalized[0], normalized[1], third]);
        let inverse = frame
            .try_inverse()
            .ok_or_else(|| Error::PrecisionLoss(format!("Wilczynski frame is singular at s = {s}")))?;
        let momentum = frame * generator * inverse;
        match &reference {
            None => reference = Some(momentum),
            Some(first) => drift = drift.max((momentum - first).norm() / first.norm()),
        }
        let trace = momentum.trace();
        let square_trace = (momentum * momentum).trace();
        let det = momentum.determinant();
        spectrum = spectrum
            .max(trace.norm() / scale)
            .max((square_trace.re - m2).abs() / scale)
            .max(square_trace.im.abs() / scale)
            .max((det.re - m3).abs() / scale)
            .max(det.im.abs() / scale);
    }
    checks.push(CheckRecord::bounded("momentum_drift", drift, tols.momentum_drift));
    checks.push(CheckRecord::bounded("momentum_spectrum", spectrum, MOMENTUM_SPECTRUM));

    Ok(checks)
}

fn verify_solenoid_checks(sample: &LegendrianCurveSample) -> Result<Vec<CheckRecord>> {
    let SampleMeta::ConstantCurvature { a, b, c, dual, .. } = &sample.meta else {
        unreachable!("caller dispatched on the meta variant");
    };
    let curve = ConstantCurvatureCurve::new(*a, *b)?;
    let tols = tol::shared();
    let count = sample.params.len();
    let axis_swap = space::matrix_l();
    let mut checks = Vec::new();

    checks.push(CheckRecord::bounded("null_cone", null_cone_residual(sample), tols.null_cone));

    let mut tangency = 0.0f64;
    for &t in &sample.params {
        let jet = curve.lift_jet(t, 1);
        let r = space::form(&jet[0], &jet[1]).norm() / (jet[0].norm() * jet[1].norm());
        tangency = tangency.max(r);
    }
    checks.push(CheckRecord::bounded("legendrian", tangency, tols.legendrian));

    let mut mismatch = 0.0f64;
    for (k, &t) in sample.params.iter().enumerate() {
        let mut z = curve.lift(t);
        if *dual {
            z = axis_swap * z;
        }
        mismatch = mismatch.max(space::projective_distance(&z, &sample.lifts[k]));
    }
    checks.push(CheckRecord::bounded("sample_match", mismatch, SAMPLE_MATCH));

    let span = std::f64::consts::TAU * *b as f64;
    let closure = space::projective_distance(&curve.lift(0.0), &curve.lift(span));
    checks.push(CheckRecord::bounded("closure", closure, tols.closure));

    // The measured curvature level b / |a|^(2/3) must sit at the constant
    // this ratio forces.
    let mut level = 0.0f64;
    for k in subset(count, 24) {
        let t = sample.params[k];
        let normalized = diffinv::normalize_lift(&curve.lift_jet(t, 5))?;
        let densities = diffinv::fubini_densities(&normalized)?;
        level = level.max((densities.b / (densities.a * densities.a).cbrt() - c).abs());
    }
    checks.push(CheckRecord::bounded("fubini_level", level, tols.fubini_b));

    // Stress from fully measured density jets. The densities are constant,
    // so a wide step costs nothing in truncation and keeps roundoff small.
    let jet = diffinv::CurveJet::from_solenoid(ConstantCurvatureCurve::new(*a, *b)?);
    let mut stress = 0.0f64;
    for k in subset(count, 5) {
        let t = sample.params[k];
        let (a_jet, b_jet) = diffinv::measured_density_jets(&jet, t, 0.1)?;
        stress = stress.max(diffinv::stress_density(&a_jet, &b_jet).abs());
    }
    checks.push(CheckRecord::bounded("stress", stress, tols.stress));

    Ok(checks)
}

// ---------------------------------------------------------------------------
// enumerate
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ListFormat {
    Json,
    Csv,
    Table,
}

impl FromStr for ListFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<ListFormat> {
        match s {
            "json" => Ok(ListFormat::Json),
            "csv" => Ok(ListFormat::Csv),
            "table" => Ok(ListFormat::Table),
            other => Err(Error::Domain(format!("unknown format {other:?}; use json, csv or table"))),
        }
    }
}

#[derive(Serialize)]
struct EnumerationRow {
    label: String,
    n: i64,
    l1: i64,
    l2: i64,
    maslov: i64,
    h1: i64,
    k1: i64,
    h2: i64,
    k2: i64,
    q2: String,
    q3: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    knot: Option<&'static str>,
}

impl EnumerationRow {
    fn new(numbers: &CharacteristicNumbers) -> EnumerationRow {
        let (q2, q3) = numbers.modulus();
        EnumerationRow {
            label: numbers.label(),
            n: numbers.n,
            l1: numbers.l1,
            l2: numbers.l2,
            maslov: numbers.maslov,
            h1: numbers.h1,
            k1: numbers.k1,
            h2: numbers.h2,
            k2: numbers.k2,
            q2: q2.to_string(),
            q3: q3.to_string(),
            knot: knot_annotation(numbers.n, numbers.l1, numbers.l2),
        }
    }
}

/// The closed-string classification up to a wave number, in the requested
/// format. CSV keeps the fixed header `n,l1,l2,h1,k1,h2,k2,q2,q3`; JSON and
/// the table add the label, the Maslov index, and known knot types.
pub fn render_enumeration(max_wave: i64, format: ListFormat) -> Result<String> {
    if max_wave < 1 {
        return Err(Error::Domain(format!("max wave number must be positive, got {max_wave}")));
    }
    let rows: Vec<EnumerationRow> =
        enumerate_closed_strings(max_wave).iter().map(EnumerationRow::new).collect();
    Ok(match format {
        ListFormat::Csv => {
            let mut out = String::from("n,l1,l2,h1,k1,h2,k2,q2,q3\n");
            for r in &rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{}",
                    r.n, r.l1, r.l2, r.h1, r.k1, r.h2, r.k2, r.q2, r.q3
                );
            }
            out
        }
        ListFormat::Json => {
            let mut out = serde_json::to_string_pretty(&rows).expect("rows serialize");
            out.push('\n');
            out
        }
        ListFormat::Table => {
            let header = ["label", "n", "l1", "l2", "maslov", "q2", "q3", "knot"];
            let cells: Vec<[String; 8]> = rows
                .iter()
                .map(|r| {
                    [
                        r.label.clone(),
                        r.n.to_string(),
                        r.l1.to_string(),
                        r.l2.to_string(),
                        r.maslov.to_string(),
                        r.q2.clone(),
                        r.q3.clone(),
                        r.knot.unwrap_or("").to_string(),
                    ]
                })
                .collect();
            let mut width = header.map(str::len);
            for row in &cells {
                for (w, cell) in width.iter_mut().zip(row) {
                    *w = (*w).max(cell.len());
                }
            }
            let mut out = String::new();
            let mut line = |row: &[String]| {
                let mut text = String::new();
                for (k, cell) in row.iter().enumerate() {
                    if k > 0 {
                        text.push_str("  ");
                    }
                    // Numeric columns right-aligned, names left-aligned.
                    if (1..=4).contains(&k) {
                        let _ = write!(text, "{:>w$}", cell, w = width[k]);
                    } else {
                        let _ = write!(text, "{:<w$}", cell, w = width[k]);
                    }
                }
                out.push_str(text.trim_end());
                out.push('\n');
            };
            line(&header.map(String::from));
            for row in &cells {
                line(row);
            }
            out
        }
    })
}

// ---------------------------------------------------------------------------
// plot
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlotView {
    /// Chart (x, y) plane; the projection whose turning number is the
    /// Maslov index.
    Lagrangian,
    Xy,
    Xz,
    Yz,
}

impl FromStr for PlotView {
    type Err = Error;

    fn from_str(s: &str) -> Result<PlotView> {
        match s {
            "lagrangian" => Ok(PlotView::Lagrangian),
            "xy" => Ok(PlotView::Xy),
            "xz" => Ok(PlotView::Xz),
            "yz" => Ok(PlotView::Yz),
            other => Err(Error::Domain(format!(
                "unknown view {other:?}; use lagrangian, xy, xz or yz"
            ))),
        }
    }
}

/// Deterministic SVG of one chart projection: fixed 1000 x 1000 canvas, 5%
/// margin, uniform scale, one polyline path, and no timestamps or other
/// varying content.
pub fn render_plot(doc: &CurveDocument, view: PlotView) -> Result<String> {
    doc.validate()?;
    let points: Vec<[f64; 2]> = doc
        .samples
        .iter()
        .map(|r| match view {
            PlotView::Lagrangian | PlotView::Xy => [r.heis[0], r.heis[1]],
            PlotView::Xz => [r.heis[0], r.heis[2]],
            PlotView::Yz => [r.heis[1], r.heis[2]],
        })
        .collect();
    let mut min = [f64::INFINITY; 2];
    let mut max = [f64::NEG_INFINITY; 2];
    for p in &points {
        for k in 0..2 {
            min[k] = min[k].min(p[k]);
            max[k] = max[k].max(p[k]);
        }
    }
    let extent = (max[0] - min[0]).max(max[1] - min[1]);
    if !(extent > 0.0) {
        return Err(Error::Domain("the projected curve is a single point".into()));
    }
    let scale = 900.0 / extent;
    let offset = [
        50.0 + (900.0 - (max[0] - min[0]) * scale) / 2.0,
        50.0 + (900.0 - (max[1] - min[1]) * scale) / 2.0,
    ];
    let mut path = String::new();
    for (k, p) in points.iter().enumerate() {
        let x = offset[0] + (p[0] - min[0]) * scale;
        let y = offset[1] + (max[1] - p[1]) * scale;
        let _ = write!(path, "{}{x} {y}", if k == 0 { "M" } else { " L" });
    }
    Ok(format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"0 0 1000 1000\">\n\
         <rect width=\"1000\" height=\"1000\" fill=\"white\"/>\n\
         <path d=\"{path}\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n\
         </svg>\n"
    ))
}

// ---------------------------------------------------------------------------
// Fractions
// ---------------------------------------------------------------------------

/// Exact rational from "a/b" or a bare integer. Guards the zero denominator
/// before the rational constructor can panic on it.
pub fn parse_fraction(text: &str) -> Result<BigRational> {
    let bad = || Error::Domain(format!("not a fraction: {text:?} (use the form a/b)"));
    let trimmed = text.trim();
    let (numer, denom) = match trimmed.split_once('/') {
        Some((n, d)) => (n, d),
        None => (trimmed, "1"),
    };
    let numer = BigInt::from_str(numer).map_err(|_| bad())?;
    let denom = BigInt::from_str(denom).map_err(|_| bad())?;
    if denom.is_zero() {
        return Err(Error::Domain(format!("zero denominator in {text:?}")));
    }
    Ok(BigRational::new(numer, denom))
}

fn fraction_to_f64(q: &BigRational) -> Result<f64> {
    q.to_f64()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Domain(format!("fraction {q} does not fit a double")))
}

fn parse_ratio(text: &str) -> Result<(i64, i64)> {
    let q = parse_fraction(text)?;
    let a = q
        .numer()
        .to_i64()
        .ok_or_else(|| Error::Domain(format!("ratio {text:?} overflows 64 bits")))?;
    let b = q
        .denom()
        .to_i64()
        .ok_or_else(|| Error::Domain(format!("ratio {text:?} overflows 64 bits")))?;
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arc_document() -> CurveDocument {
        build_arc_document(0.894052, 2.78109, 8, false).unwrap()
    }

    #[test]
    fn documents_round_trip_byte_identically() {
        let doc = arc_document();
        let text = doc.to_json();
        let reread = CurveDocument::from_json(&text).unwrap();
        assert_eq!(text, reread.to_json());
    }

    #[test]
    fn documents_rebuild_their_sample_exactly() {
        let ch = Characters::new(0.894052, 2.78109).unwrap();
        let sample = StringCurve::new(ch).unwrap().sample(8, 1, None).unwrap();
        let text = CurveDocument::from_sample(&sample).to_json();
        let rebuilt = CurveDocument::from_json(&text).unwrap().to_sample().unwrap();
        // Shortest round-trip floats reproduce every bit.
        assert_eq!(sample.params, rebuilt.params);
        assert_eq!(sample.lifts, rebuilt.lifts);
        assert_eq!(sample.heisenberg, rebuilt.heisenberg);
        let SampleMeta::Symmetric { omega, periods, dual, numbers, .. } = rebuilt.meta else {
            panic!("wrong meta variant");
        };
        let SampleMeta::Symmetric { omega: original, .. } = sample.meta else { unreachable!() };
        assert_eq!(omega, original);
        assert_eq!(periods, 1);
        assert!(!dual);
        assert!(numbers.is_none());
    }

    #[test]
    fn enumeration_csv_matches_the_frozen_rows() {
        let csv = render_enumeration(9, ListFormat::Csv).unwrap();
        assert_eq!(
            csv,
            "n,l1,l2,h1,k1,h2,k2,q2,q3\n\
             7,1,-5,5,7,1,7,1/3,4/21\n\
             8,1,-6,3,4,1,8,1/3,5/24\n\
             9,1,-7,7,9,1,9,1/3,2/9\n\
             9,2,-6,2,3,2,9,10/27,4/27\n"
        );
    }

    #[test]
    fn enumeration_is_empty_below_seven_in_every_format() {
        assert_eq!(render_enumeration(6, ListFormat::Csv).unwrap(), "n,l1,l2,h1,k1,h2,k2,q2,q3\n");
        assert_eq!(render_enumeration(6, ListFormat::Json).unwrap(), "[]\n");
        let table = render_enumeration(6, ListFormat::Table).unwrap();
        assert_eq!(table.lines().count(), 1);
        assert!(render_enumeration(0, ListFormat::Csv).is_err());
    }

    #[test]
    fn enumeration_table_annotates_known_knots() {
        let table = render_enumeration(9, ListFormat::Table).unwrap();
        assert_eq!(table.lines().count(), 5);
        let trefoil = table.lines().last().unwrap();
        assert!(trefoil.starts_with("|9,2,-6>"), "{trefoil}");
        assert!(trefoil.contains("10/27"));
    }

    #[test]
    fn solve_rejects_boundary_points_and_non_primitive_triples() {
        match solve_from_modulus("1/4", "1/4", None) {
            Err(Error::OutsideDomain(_)) => {}
            other => panic!("boundary point gave {other:?}"),
        }
        match numbers_from_triple(14, 2, -10) {
            Err(Error::Domain(message)) => assert!(message.contains("|7,1,-5>"), "{message}"),
            other => panic!("non-primitive triple gave {other:?}"),
        }
        assert!(numbers_from_triple(7, -1, 5).is_err());
        assert!(numbers_from_triple(0, 1, -5).is_err());
        assert!(solve_from_triple(7, 1, -5, Some(0.0)).is_err());
    }

    #[test]
    fn fraction_parsing_guards_the_degenerate_inputs() {
        assert!(parse_fraction("1/0").is_err());
        assert!(parse_fraction("abc").is_err());
        assert!(parse_fraction("1.5").is_err());
        assert_eq!(parse_fraction("4/6").unwrap(), parse_fraction("2/3").unwrap());
        assert_eq!(parse_ratio("5/3").unwrap(), (5, 3));
        assert_eq!(parse_ratio("7").unwrap(), (7, 1));
    }

    #[test]
    fn plots_are_deterministic_and_stay_on_the_canvas() {
        let doc = arc_document();
        let svg = render_plot(&doc, PlotView::Lagrangian).unwrap();
        assert_eq!(svg, render_plot(&doc, PlotView::Lagrangian).unwrap());
        assert!(svg.starts_with("<svg "));
        assert!(svg.contains("viewBox=\"0 0 1000 1000\""));
        assert_eq!(svg.matches("<path").count(), 1);
        assert!(!svg.contains("NaN"));
        for chunk in svg.split("d=\"").nth(1).unwrap().split('"').next().unwrap().split(['M', 'L'])
        {
            for token in chunk.split_whitespace() {
                let value: f64 = token.parse().unwrap();
                assert!((50.0 - 1e-9..=950.0 + 1e-9).contains(&value), "{value} off canvas");
            }
        }
    }

    #[test]
    fn custom_documents_plot_but_refuse_measurement() {
        let samples: Vec<SampleRecord> = (0..8)
            .map(|k| {
                let t = std::f64::consts::TAU * k as f64 / 8.0;
                SampleRecord {
                    s: t,
                    hom: [[1.0, 0.0], [t.cos(), t.sin()], [0.0, 0.0]],
                    heis: [t.cos(), t.sin(), 0.0],
                }
            })
            .collect();
        let doc = CurveDocument {
            format_version: FORMAT_VERSION.into(),
            kind: CurveKind::Custom,
            characters: None,
            q: None,
            modulus: None,
            characteristic: None,
            samples,
            provenance: Provenance::current(),
        };
        assert!(render_plot(&doc, PlotView::Xy).is_ok());
        assert!(matches!(invariants_report(&doc), Err(Error::Domain(_))));
        assert!(matches!(verify_report(&doc), Err(Error::Domain(_))));
    }

    #[test]
    fn open_arcs_are_rejected_by_invariants() {
        let doc = arc_document();
        match invariants_report(&doc) {
            Err(Error::Domain(message)) => assert!(message.contains("closed"), "{message}"),
            other => panic!("open arc gave {other:?}"),
        }
    }

    #[test]
    fn report_verdict_is_the_all_pass_conjunction() {
        let good = CheckRecord::bounded("alpha", 1e-12, 1e-9);
        let bad = CheckRecord::bounded("beta", 1.0, 1e-9);
        assert!(good.pass && !bad.pass);
        let report = ReportDocument::new("verify", "test".into(), vec![good.clone(), bad]);
        assert!(!report.verdict);
        assert_eq!(report.failing(), 1);
        assert!(report.summary().contains("FAIL beta"));
        let report = ReportDocument::new("verify", "test".into(), vec![good]);
        assert!(report.verdict);
        let text = report.to_json();
        let reread: ReportDocument = serde_json::from_str(&text).unwrap();
        assert_eq!(text, reread.to_json());
    }

    #[test]
    fn malformed_documents_are_format_errors() {
        let mut doc = arc_document();
        doc.samples[3].s = doc.samples[2].s;
        assert!(matches!(doc.to_sample(), Err(Error::Format(_))));
        let mut doc = arc_document();
        doc.format_version = "0".into();
        assert!(matches!(CurveDocument::from_json(&doc.to_json()), Err(Error::Format(_))));
        let mut doc = arc_document();
        doc.characters = None;
        assert!(matches!(doc.validate(), Err(Error::Format(_))));
        assert!(matches!(CurveDocument::from_json("{"), Err(Error::Format(_))));
    }
}
