//! Discrete knot invariants of closed curves in the Heisenberg chart:
//! linking numbers with the two symmetry axes, the Maslov index, and the
//! Thurston-Bennequin invariant.
//!
//! The linking number with the vertical axis is an exact winding count: the
//! total polar angle swept by the planar projection, snapped to an integer.
//! The same integer is recomputed through a Gauss pairwise-segment double sum
//! against a closed loop standing in for the axis, as an independent second
//! algorithm. Linking with the horizontal axis reuses the vertical count on
//! the dual configuration. The Maslov index is the turning number of the
//! Lagrangian projection, and the Thurston-Bennequin invariant is the Gauss
//! linking number of the curve with its vertical pushoff.
//!
//! Sign conventions: the curve is oriented by increasing parameter, the
//! vertical axis points upward, and a counterclockwise unit circle in the
//! plane has winding +1, turning +1 and pushoff linking 0.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::string_builder::{dual_configuration, LegendrianCurveSample, SampleMeta};

/// Axis clearance demanded before a linking number with the vertical axis is
/// attempted, relative to 1 + diameter.
pub const AXIS_CLEARANCE_REL: f64 = 1e-6;

/// Closure gate between the first and last vertex, relative to 1 + diameter.
const CLOSURE_REL: f64 = 1e-8;

/// Relative spread allowed between parameter steps of a uniform grid.
const UNIFORMITY_REL: f64 = 1e-6;

/// A closed polyline in chart coordinates together with its parameter grid.
/// The vertex list repeats the first point at the end, the parameters are
/// strictly increasing and uniformly spaced.
#[derive(Debug, Clone)]
pub struct Polyline3 {
    points: Vec<[f64; 3]>,
    params: Vec<f64>,
    diameter: f64,
}

impl Polyline3 {
    /// Validates and wraps an explicitly closed vertex list. The last point
    /// must repeat the first to within the closure gate.
    pub fn new(points: Vec<[f64; 3]>, params: Vec<f64>) -> Result<Self> {
        Self::validated(points, params)
    }

    /// Closes a sampled curve by repeating its first point at the full
    /// period. The sample grid is half open, so the closing vertex is not in
    /// the data; whether the underlying curve actually returns to its start
    /// is the builder's closure gate, not re-checked here. The sample must
    /// span the whole period recorded in its metadata.
    pub fn from_sample(sample: &LegendrianCurveSample) -> Result<Self> {
        let count = sample.heisenberg.len();
        if count < 4 || sample.params.len() != count {
            return Err(Error::Domain(
                "closing a sample needs at least four aligned points and parameters".into(),
            ));
        }
        let step = sample.params[1] - sample.params[0];
        let span = match &sample.meta {
            SampleMeta::Symmetric { omega, periods, .. } => omega * (*periods as f64),
            SampleMeta::ConstantCurvature { b, .. } => TAU * (*b as f64),
        };
        if (step * count as f64 - span).abs() > 1e-9 * span {
            return Err(Error::Domain(format!(
                "sample spans {:.6} of a closed period {span:.6}; invariants need the whole curve",
                step * count as f64
            )));
        }
        let mut points = sample.heisenberg.clone();
        let mut params = sample.params.clone();
        points.push(points[0]);
        params.push(params[count - 1] + step);
        Self::validated(points, params)
    }

    fn validated(points: Vec<[f64; 3]>, params: Vec<f64>) -> Result<Self> {
        if points.len() != params.len() {
            return Err(Error::Domain(format!(
                "{} points against {} parameter values",
                points.len(),
                params.len()
            )));
        }
        if points.len() < 5 {
            return Err(Error::Domain(
                "a closed polyline needs at least four segments".into(),
            ));
        }
        let steps = params.len() - 1;
        let mean = (params[steps] - params[0]) / steps as f64;
        if !(mean > 0.0) {
            return Err(Error::Domain("parameters must increase".into()));
        }
        for k in 0..steps {
            let h = params[k + 1] - params[k];
            if (h - mean).abs() > UNIFORMITY_REL * mean {
                return Err(Error::Domain(format!(
                    "parameter step {k} is {h:.6e} against a mean of {mean:.6e}; \
                     sampling must be uniform"
                )));
            }
        }
        let diameter = diameter_of(&points);
        let first = Vector3::from(points[0]);
        let last = Vector3::from(points[points.len() - 1]);
        let gap = (first - last).norm();
        if gap > CLOSURE_REL * (1.0 + diameter) {
            return Err(Error::Domain(format!(
                "polyline is open: endpoints differ by {gap:.3e}"
            )));
        }
        Ok(Polyline3 {
            points,
            params,
            diameter,
        })
    }

    /// Vertices, the last one repeating the first.
    pub fn points(&self) -> &[[f64; 3]] {
        &self.points
    }

    /// Parameter values aligned with [`Self::points`].
    pub fn params(&self) -> &[f64] {
        &self.params
    }

    /// Number of straight segments.
    pub fn segment_count(&self) -> usize {
        self.points.len() - 1
    }

    /// Largest distance between two vertices.
    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// Smallest vertex distance to the vertical axis.
    pub fn oz_clearance(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p[0].hypot(p[1]))
            .fold(f64::INFINITY, f64::min)
    }

    /// The same curve rotated rigidly about the vertical axis. The rotation
    /// is a contactomorphism of the chart, so every invariant is preserved.
    pub fn rotated_about_oz(&self, angle: f64) -> Polyline3 {
        let (sin, cos) = angle.sin_cos();
        let points = self
            .points
            .iter()
            .map(|p| [cos * p[0] - sin * p[1], sin * p[0] + cos * p[1], p[2]])
            .collect();
        Polyline3 {
            points,
            params: self.params.clone(),
            diameter: self.diameter,
        }
    }

    /// The same closed curve traversed from a different starting vertex.
    pub fn shifted_start(&self, offset: usize) -> Polyline3 {
        let n = self.segment_count();
        let k = offset % n;
        let mut points = Vec::with_capacity(n + 1);
        points.extend_from_slice(&self.points[k..n]);
        points.extend_from_slice(&self.points[..k]);
        points.push(self.points[k]);
        Polyline3 {
            points,
            params: self.params.clone(),
            diameter: self.diameter,
        }
    }
}

fn diameter_of(points: &[[f64; 3]]) -> f64 {
    let mut best: f64 = 0.0;
    for i in 0..points.len() {
        let p = Vector3::from(points[i]);
        for q in &points[i + 1..] {
            best = best.max((Vector3::from(*q) - p).norm());
        }
    }
    best
}

/// Wraps an angle difference into (-pi, pi].
fn wrapped(delta: f64) -> f64 {
    let mut d = delta % TAU;
    if d > PI {
        d -= TAU;
    } else if d <= -PI {
        d += TAU;
    }
    d
}

/// Snaps an accumulated turn count to an integer, within the rounding gate.
fn snap(value: f64, gate: f64, what: &str) -> Result<i64> {
    let rounded = value.round();
    let residual = (value - rounded).abs();
    if !(residual < gate) {
        return Err(Error::Resolution(format!(
            "{what} is {value:.6}, {residual:.2e} away from an integer (gate {gate:.0e})"
        )));
    }
    Ok(rounded as i64)
}

fn require_axis_clearance(curve: &Polyline3) -> Result<()> {
    let needed = AXIS_CLEARANCE_REL * (1.0 + curve.diameter());
    let actual = curve.oz_clearance();
    if actual <= needed {
        return Err(Error::Clearance(format!(
            "curve passes {actual:.2e} from the vertical axis; linking needs more than {needed:.2e}"
        )));
    }
    Ok(())
}

/// Winding of the planar projection around the origin before integer
/// snapping, in turns. Angle increments are accumulated exactly; any single
/// step of half a turn or more is rejected as undersampling.
pub fn winding_number_raw(curve: &Polyline3) -> Result<f64> {
    require_axis_clearance(curve)?;
    let pts = curve.points();
    let mut total = 0.0;
    let mut prev = f64::atan2(pts[0][1], pts[0][0]);
    for p in &pts[1..] {
        let next = f64::atan2(p[1], p[0]);
        let step = wrapped(next - prev);
        if step.abs() >= FRAC_PI_2 {
            return Err(Error::Resolution(format!(
                "planar angle jumps by {step:.3} rad in one step; sample more densely"
            )));
        }
        total += step;
        prev = next;
    }
    Ok(total / TAU)
}

/// Linking number with the upward vertical axis, as the winding number of
/// the planar projection around the origin.
pub fn linking_with_oz(curve: &Polyline3) -> Result<i64> {
    snap(
        winding_number_raw(curve)?,
        crate::tol::shared().winding_residual,
        "axis winding",
    )
}

/// Linking number with the horizontal axis: the curve is sent through the
/// order-four isometry exchanging the two axes, then measured against the
/// vertical one.
pub fn linking_with_o2(sample: &LegendrianCurveSample) -> Result<i64> {
    let dual = dual_configuration(sample)?;
    linking_with_oz(&Polyline3::from_sample(&dual)?)
}

/// Turning of the Lagrangian-projection tangent before integer snapping, in
/// turns, from the tangent directions of consecutive segments.
pub fn turning_number_raw(curve: &Polyline3) -> Result<f64> {
    let pts = curve.points();
    let n = curve.segment_count();
    let floor = 1e-12 * (1.0 + curve.diameter());
    let mut angles = Vec::with_capacity(n);
    for k in 0..n {
        let dx = pts[k + 1][0] - pts[k][0];
        let dy = pts[k + 1][1] - pts[k][1];
        if dx.hypot(dy) <= floor {
            return Err(Error::DegenerateTangent(format!(
                "Lagrangian projection stalls near parameter {:.6}",
                curve.params()[k]
            )));
        }
        angles.push(f64::atan2(dy, dx));
    }
    let mut total = 0.0;
    for k in 0..n {
        let step = wrapped(angles[(k + 1) % n] - angles[k]);
        if step.abs() >= FRAC_PI_2 {
            return Err(Error::Resolution(format!(
                "tangent turns by {step:.3} rad across one sample; sample more densely"
            )));
        }
        total += step;
    }
    Ok(total / TAU)
}

/// Maslov index: the turning number of the Lagrangian projection.
pub fn maslov_index(curve: &Polyline3) -> Result<i64> {
    snap(
        turning_number_raw(curve)?,
        crate::tol::shared().winding_residual,
        "tangent turning",
    )
}

/// Signed area of the spherical triangle with the given unit-vector corners.
fn spherical_triangle(a: Vector3<f64>, b: Vector3<f64>, c: Vector3<f64>) -> f64 {
    let det = a.dot(&b.cross(&c));
    let denom = 1.0 + a.dot(&b) + b.dot(&c) + c.dot(&a);
    2.0 * det.atan2(denom)
}

fn direction(from: Vector3<f64>, to: Vector3<f64>) -> Vector3<f64> {
    let d = to - from;
    d / d.norm()
}

/// Exact Gauss double sum for two closed vertex lists (last point repeating
/// the first). Each segment pair contributes the signed spherical area swept
/// by the chord direction; the total over closed curves is the linking
/// number times 4 pi, up to roundoff. Touching curves produce NaN, which the
/// callers' rounding gates reject.
fn gauss_sum(a: &[[f64; 3]], b: &[[f64; 3]]) -> f64 {
    let mut total = 0.0;
    for i in 0..a.len() - 1 {
        let a0 = Vector3::from(a[i]);
        let a1 = Vector3::from(a[i + 1]);
        for j in 0..b.len() - 1 {
            let b0 = Vector3::from(b[j]);
            let b1 = Vector3::from(b[j + 1]);
            let u00 = direction(a0, b0);
            let u10 = direction(a1, b0);
            let u11 = direction(a1, b1);
            let u01 = direction(a0, b1);
            total += spherical_triangle(u00, u10, u11) + spherical_triangle(u00, u11, u01);
        }
    }
    total / (4.0 * PI)
}

/// Raw Gauss linking number of two closed polylines (not rounded).
pub fn gauss_linking(first: &Polyline3, second: &Polyline3) -> f64 {
    gauss_sum(first.points(), second.points())
}

/// Emits a closed loop standing in for the vertical axis: up the axis well
/// past the curve, closed through a far-away return path. The loop is
/// homologous to the axis in the complement of the curve, so the Gauss sum
/// against it gives the axis linking number. Sides are bisected until every
/// piece is short against its distance to the curve, keeping each spherical
/// patch well away from antipodal corners.
fn axis_stand_in(curve: &Polyline3) -> Vec<[f64; 3]> {
    let pts = curve.points();
    let mut lo = Vector3::from(pts[0]);
    let mut hi = lo;
    for p in pts {
        for k in 0..3 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let center = (lo + hi) / 2.0;
    let radius = (hi - lo).norm() / 2.0;
    let cushion = 2.0 * curve.diameter().max(1.0);
    let height = hi[2].abs().max(lo[2].abs()) + cushion;
    let reach = pts
        .iter()
        .map(|p| p[0].hypot(p[1]))
        .fold(0.0, f64::max)
        + cushion;
    // Pieces on the axis can come as close as the curve's clearance; that
    // bound stays valid where the midpoint-to-box estimate turns negative.
    let floor = 0.5 * curve.oz_clearance();
    let corners = [
        Vector3::new(0.0, 0.0, -height),
        Vector3::new(0.0, 0.0, height),
        Vector3::new(reach, 0.0, height),
        Vector3::new(reach, 0.0, -height),
        Vector3::new(0.0, 0.0, -height),
    ];
    let mut out = vec![[0.0, 0.0, -height]];
    for pair in corners.windows(2) {
        refine_side(pair[0], pair[1], center, radius, floor, &mut out);
    }
    out
}

fn refine_side(
    from: Vector3<f64>,
    to: Vector3<f64>,
    center: Vector3<f64>,
    radius: f64,
    floor: f64,
    out: &mut Vec<[f64; 3]>,
) {
    let mid = (from + to) / 2.0;
    let clearance = ((mid - center).norm() - radius).max(floor);
    if (to - from).norm() <= 0.4 * clearance {
        out.push([to[0], to[1], to[2]]);
    } else {
        refine_side(from, mid, center, radius, floor, out);
        refine_side(mid, to, center, radius, floor, out);
    }
}

/// Gauss double sum against the axis stand-in loop before integer snapping.
pub fn axis_gauss_raw(curve: &Polyline3) -> Result<f64> {
    require_axis_clearance(curve)?;
    let stand_in = axis_stand_in(curve);
    Ok(gauss_sum(curve.points(), &stand_in))
}

/// Linking number with the vertical axis through the Gauss double sum, the
/// independent cross-check of [`linking_with_oz`].
pub fn linking_with_oz_gauss(curve: &Polyline3) -> Result<i64> {
    snap(
        axis_gauss_raw(curve)?,
        crate::tol::shared().gauss_residual,
        "axis Gauss sum",
    )
}

/// Closest approach of the planar projections of two segments: returns the
/// planar distance and the heights of both segments at the approach.
fn planar_segment_gap(a0: [f64; 3], a1: [f64; 3], b0: [f64; 3], b1: [f64; 3]) -> (f64, f64, f64) {
    let d1 = [a1[0] - a0[0], a1[1] - a0[1]];
    let d2 = [b1[0] - b0[0], b1[1] - b0[1]];
    let r = [a0[0] - b0[0], a0[1] - b0[1]];
    let aa = d1[0] * d1[0] + d1[1] * d1[1];
    let ee = d2[0] * d2[0] + d2[1] * d2[1];
    let ff = d2[0] * r[0] + d2[1] * r[1];
    let (s, t);
    if aa <= f64::EPSILON && ee <= f64::EPSILON {
        s = 0.0;
        t = 0.0;
    } else if aa <= f64::EPSILON {
        s = 0.0;
        t = (ff / ee).clamp(0.0, 1.0);
    } else {
        let cc = d1[0] * r[0] + d1[1] * r[1];
        if ee <= f64::EPSILON {
            t = 0.0;
            s = (-cc / aa).clamp(0.0, 1.0);
        } else {
            let bb = d1[0] * d2[0] + d1[1] * d2[1];
            let denom = aa * ee - bb * bb;
            let s0 = if denom > f64::EPSILON * aa * ee {
                ((bb * ff - cc * ee) / denom).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let t0 = (bb * s0 + ff) / ee;
            if t0 < 0.0 {
                t = 0.0;
                s = (-cc / aa).clamp(0.0, 1.0);
            } else if t0 > 1.0 {
                t = 1.0;
                s = ((bb - cc) / aa).clamp(0.0, 1.0);
            } else {
                t = t0;
                s = s0;
            }
        }
    }
    let px = a0[0] + s * d1[0] - b0[0] - t * d2[0];
    let py = a0[1] + s * d1[1] - b0[1] - t * d2[1];
    (
        px.hypot(py),
        a0[2] + s * (a1[2] - a0[2]),
        b0[2] + t * (b1[2] - b0[2]),
    )
}

/// True when no two non-adjacent strands stack vertically closer than twice
/// the pushoff offset wherever their planar projections come within the
/// offset of each other.
fn vertical_gap_clear(curve: &Polyline3, eps: f64) -> bool {
    let pts = curve.points();
    let n = curve.segment_count();
    for i in 0..n {
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (d, za, zb) = planar_segment_gap(pts[i], pts[i + 1], pts[j], pts[j + 1]);
            if d < eps && (za - zb).abs() <= 2.0 * eps {
                return false;
            }
        }
    }
    true
}

/// Picks a vertical pushoff offset for [`thurston_bennequin`]: the default
/// fraction of the diameter, halved until the strand clearance holds.
pub fn vertical_pushoff_eps(curve: &Polyline3) -> Result<f64> {
    let mut eps = crate::tol::shared().pushoff_rel * curve.diameter();
    for _ in 0..50 {
        if vertical_gap_clear(curve, eps) {
            return Ok(eps);
        }
        eps *= 0.5;
    }
    Err(Error::Clearance(
        "strands stay vertically stacked at every tested pushoff offset".into(),
    ))
}

/// Gauss double sum of the curve with its vertical pushoff before integer
/// snapping.
pub fn pushoff_linking_raw(curve: &Polyline3, pushoff_eps: f64) -> Result<f64> {
    if !(pushoff_eps > 0.0) {
        return Err(Error::Domain("pushoff offset must be positive".into()));
    }
    if !vertical_gap_clear(curve, pushoff_eps) {
        return Err(Error::Clearance(format!(
            "strands pass within {:.2e} of vertical stacking; shrink the pushoff offset",
            2.0 * pushoff_eps
        )));
    }
    let shifted: Vec<[f64; 3]> = curve
        .points()
        .iter()
        .map(|p| [p[0], p[1], p[2] + pushoff_eps])
        .collect();
    Ok(gauss_sum(curve.points(), &shifted))
}

/// Thurston-Bennequin invariant: the Gauss linking number of the curve with
/// its vertical pushoff.
pub fn thurston_bennequin(curve: &Polyline3, pushoff_eps: f64) -> Result<i64> {
    snap(
        pushoff_linking_raw(curve, pushoff_eps)?,
        crate::tol::shared().gauss_residual,
        "pushoff Gauss sum",
    )
}
