//! Every numerical gate used at runtime, collected in one record.
//!
//! Construction and verification routines take their thresholds from here so
//! that a tolerance is never duplicated as a scattered literal. The defaults
//! are the contract; each field can be overridden for a whole process with an
//! environment variable named `LEGSTR_` plus the field name in upper case
//! (for example `LEGSTR_SOLVE=1e-10`). Library callers see the overrides
//! through [`shared`]; the CLI additionally validates them at startup with
//! [`Tolerances::from_env`] so a malformed value is a flag error, not a
//! silent fallback.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Tolerances {
    /// Residual gate for the period-map inversion, in rotation-number units.
    pub solve: f64,
    /// Iteration budget of the damped Newton solver.
    pub newton_max_iter: usize,
    /// Rejection margin around the boundary of the moduli region for
    /// inversion targets.
    pub boundary_margin: f64,
    /// Absolute and relative targets of the adaptive quadrature.
    pub quad_abs: f64,
    pub quad_rel: f64,
    /// Relative and absolute local-error targets of the adaptive frame ODE.
    pub ode_rtol: f64,
    pub ode_atol: f64,
    /// Null-cone residual per sample, relative to the squared sample norm.
    pub null_cone: f64,
    /// Tangency (Legendrian) residual per sample, scale-invariant.
    pub legendrian: f64,
    /// Projective closure residual over the full wave.
    pub closure: f64,
    /// Projective monodromy residual per sample.
    pub monodromy: f64,
    /// Divergence gate between closed-form and quadrature angular functions.
    pub angular_crosscheck: f64,
    /// |a - 1| gate for measured first Fubini density on a string.
    pub fubini_a: f64,
    /// |b - kappa| gate, in units of ell^2.
    pub fubini_b: f64,
    /// Stress-density residual gate, in units of ell^9.
    pub stress: f64,
    /// Momentum-matrix drift gate over one period.
    pub momentum_drift: f64,
    /// Rounding residual accepted when an angle accumulation is snapped to an
    /// integer (linking and Maslov numbers).
    pub winding_residual: f64,
    /// Rounding residual accepted for the Gauss double-sum invariants.
    pub gauss_residual: f64,
    /// Push-off offset for the Thurston-Bennequin invariant, relative to the
    /// curve diameter.
    pub pushoff_rel: f64,
    /// Threshold on |z1|/|z| below which projection to the Heisenberg chart
    /// is refused.
    pub projection_singularity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            solve: 1e-12,
            newton_max_iter: 100,
            boundary_margin: 1e-9,
            quad_abs: 1e-13,
            quad_rel: 1e-12,
            ode_rtol: 1e-11,
            ode_atol: 1e-13,
            null_cone: 1e-10,
            legendrian: 1e-8,
            closure: 1e-8,
            monodromy: 1e-8,
            angular_crosscheck: 1e-8,
            fubini_a: 1e-6,
            fubini_b: 1e-6,
            stress: 1e-6,
            momentum_drift: 1e-7,
            winding_residual: 0.01,
            gauss_residual: 0.05,
            pushoff_rel: 1e-3,
            projection_singularity: 1e-12,
        }
    }
}

impl Tolerances {
    /// Defaults patched by whatever `LEGSTR_*` variables are set. A variable
    /// that is present but does not parse as a number of the field's type is
    /// a domain error; variables not matching any field are ignored.
    pub fn from_env() -> crate::Result<Tolerances> {
        Self::with_overrides(|var| std::env::var(var).ok())
    }

    /// Override machinery behind [`from_env`], testable without touching the
    /// process environment. Field names are discovered from the serialized
    /// record so the variable list can never drift from the struct.
    fn with_overrides(lookup: impl Fn(&str) -> Option<String>) -> crate::Result<Tolerances> {
        let mut value =
            serde_json::to_value(Tolerances::default()).expect("tolerance record serializes");
        let map = value.as_object_mut().expect("tolerance record is a JSON object");
        for (field, slot) in map.iter_mut() {
            let var = format!("LEGSTR_{}", field.to_uppercase());
            let Some(raw) = lookup(&var) else { continue };
            *slot = if let Ok(n) = raw.parse::<u64>() {
                serde_json::Value::from(n)
            } else if let Ok(x) = raw.parse::<f64>() {
                serde_json::Number::from_f64(x)
                    .map(serde_json::Value::Number)
                    .ok_or_else(|| {
                        crate::Error::Domain(format!("{var} must be finite, got {raw:?}"))
                    })?
            } else {
                return Err(crate::Error::Domain(format!(
                    "{var} does not parse as a number: {raw:?}"
                )));
            };
        }
        serde_json::from_value(value)
            .map_err(|e| crate::Error::Domain(format!("bad LEGSTR_ tolerance override: {e}")))
    }
}

/// The process-wide tolerance record: defaults plus `LEGSTR_*` environment
/// overrides, read once on first use. A malformed override falls back to the
/// defaults here; binaries that want to refuse to start instead call
/// [`Tolerances::from_env`] before anything touches this.
pub fn shared() -> &'static Tolerances {
    static SHARED: OnceLock<Tolerances> = OnceLock::new();
    SHARED.get_or_init(|| Tolerances::from_env().unwrap_or_default())
}
