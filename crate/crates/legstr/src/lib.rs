//! Closed critical curves ("strings") of the conformal strain functional on
//! Legendrian curves in the 3-sphere.
//!
//! The crate classifies closed strings by a pair of rational rotation numbers,
//! inverts the period map to recover the analytic parameters `(m, ell)` of a
//! curvature profile from those rationals, builds the curve explicitly in
//! homogeneous coordinates through elliptic functions, and then re-derives its
//! differential and knot invariants from the sampled curve as independent
//! cross-checks.
//!
//! Module map:
//!
//! * [`elliptic`]: Carlson symmetric integrals, Legendre forms, Jacobi
//!   amplitude and `sn`/`cn`/`dn`.
//! * [`dynamics`]: curvature profiles, first integrals, spectra, the momentum
//!   matrix and the frame ODE.
//! * [`period_map`]: rotation numbers of a profile, their Jacobian, boundary
//!   behavior, and the inversion back to `(m, ell)`.
//! * [`moduli`]: exact rational arithmetic on the moduli region,
//!   characteristic numbers, enumeration of closed strings by wave number.
//! * [`string_builder`]: explicit curves in homogeneous coordinates, their
//!   monodromy, duals, and constant-curvature companions.
//! * [`diffinv`]: jets, normalization of lifts, Fubini densities, the stress
//!   density and total strain.
//! * [`knot_num`]: linking numbers, Maslov index and Thurston-Bennequin
//!   invariant from sampled curves.
//! * [`cli_io`]: document formats (JSON curve and report documents, CSV, SVG)
//!   and the command-level entry points used by the `legstr` binary.
//!
//! Support modules: [`quad`] (adaptive Gauss-Kronrod quadrature), [`jet`]
//! (truncated Taylor series arithmetic), [`space`] (the Hermitian form and the
//! fixed isometries), [`tol`] (every numerical gate in one place).

pub mod cli_io;
pub mod diffinv;
pub mod dynamics;
pub mod elliptic;
pub mod error;
pub mod jet;
pub mod knot_num;
pub mod moduli;
pub mod period_map;
pub mod quad;
pub mod space;
pub mod string_builder;
pub mod tol;

pub(crate) mod ode;

pub use error::{Error, Result};
