//! Robust Bayesian inference for binary data with sets of conjugate Beta
//! priors.
//!
//! A prior set is described in the translated `(eta0, eta1)` coordinates in
//! which every Bayes update is a pure translation. Three set families are
//! supported: line segments and rectangles (given in canonical `(n0, y0)`
//! coordinates) and the exponential-contour boatshape, which widens the
//! posterior expectation interval under prior-data conflict and narrows it
//! when data agree strongly with the prior.
//!
//! ```
//! use boatset::{BinomialData, BoatshapeSpec, EtaSet, PriorShape};
//!
//! let boat = BoatshapeSpec::new(-1.0, 20.0, 1.0, 0.4, 0.5).unwrap();
//! let prior = EtaSet::new(PriorShape::Boat(boat)).unwrap();
//! let data = BinomialData::new(10.0, 5.0).unwrap();
//! let posterior = prior.updated(&data);
//! let shadow = boatset::shadow(&posterior).unwrap();
//! assert!(shadow.y_lo < 0.5 && 0.5 < shadow.y_hi);
//! ```

pub mod error;
pub mod exec;
pub mod inference;
pub mod oracle;
pub mod params;
mod roots;
pub mod shapes;
pub mod sweep;
pub mod touchpoint;

pub use error::{Error, Result};
pub use exec::Execution;
pub use params::{BinomialData, CanonicalParams, EtaPoint};
pub use shapes::{
    BoatshapeSpec, EtaSet, LineSegmentSpec, PriorShape, RectangleSpec, Shift, ValidationReport,
};
pub use touchpoint::{shadow, AgreementThresholds, LearningPhase, ShadowResult};
pub use inference::{
    credibility_union, delta_rectangle_closed_form, delta_segment_closed_form, imprecision_delta,
    posterior_expectation_bounds, BetaShape, CredibilityUnion,
};
pub use oracle::GridSpec;
