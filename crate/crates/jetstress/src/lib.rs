//! Metric-free jet and stress calculus on coordinate boxes, with a
//! numerical identity-verification harness.
//!
//! Everything here lives in a single chart: an axis-aligned box with an
//! orientation. On that footing the crate provides
//!
//! * polynomial and opaque scalar fields with exact or finite-difference
//!   derivatives ([`scalar`]);
//! * differential forms with wedge, exterior derivative, contraction, and
//!   face pullbacks, plus Gauss-Legendre quadrature over boxes and their
//!   oriented faces ([`forms`], [`chart`]);
//! * jet bundles of sections, iterated first jets, and the inclusion of
//!   second jets into them, together with the dual restriction and lift
//!   ([`jets`]);
//! * first-order variational stresses with tractions, divergences, and body
//!   forces, and second-order stresses handled through the iterated-jet
//!   identification, down to the face-by-face boundary split on boxes
//!   ([`stress`]);
//! * a scenario harness that integrates each side of the balance laws and
//!   reports residuals against stated tolerances ([`harness`]), also
//!   exposed as the `jetstress` command-line tool.
//!
//! None of it uses a metric or a connection: every object is a coordinate
//! expression whose transformation behavior is carried by the constructions
//! themselves, and every identity checked by the harness is an exact
//! consequence of the chain rule and Stokes-type integration by parts.
//!
//! # A taste
//!
//! ```
//! use jetstress::chart::{integrate_face_form, integrate_top_form, QuadratureRule, Region};
//! use jetstress::forms::FormField;
//! use jetstress::jets::Section;
//! use jetstress::scalar::{PolyField, ScalarField};
//! use jetstress::stress::VariationalStress;
//!
//! // S^1 = x1 x2 acting on w = x1 over the unit square
//! let stress = VariationalStress::new(
//!     2,
//!     1,
//!     vec![ScalarField::zero(2)],
//!     vec![
//!         ScalarField::from(PolyField::monomial(2, &[1, 1], 1.0)),
//!         ScalarField::zero(2),
//!     ],
//! )
//! .unwrap();
//! let w = Section::new(2, vec![ScalarField::from(PolyField::coordinate(2, 0))]).unwrap();
//!
//! let region = Region::unit_box(2).unwrap();
//! let rule = QuadratureRule::default();
//!
//! let body = integrate_top_form(
//!     &FormField::top(stress.body_force().action_density(&w).unwrap()),
//!     &region,
//!     &rule,
//! )
//! .unwrap();
//! let sigma = stress.traction().apply(&w).unwrap();
//! let boundary: f64 = region
//!     .boundary_faces()
//!     .iter()
//!     .map(|f| integrate_face_form(&sigma, f, &rule).unwrap())
//!     .sum();
//! let internal = integrate_top_form(
//!     &FormField::top(stress.action_density(&w).unwrap()),
//!     &region,
//!     &rule,
//! )
//! .unwrap();
//!
//! assert!((body + boundary - internal).abs() < 1e-12);
//! ```

pub mod chart;
pub mod error;
pub mod forms;
pub mod guide;
pub mod harness;
pub mod jets;
pub mod scalar;
pub mod stress;

pub use error::{Error, Result};
