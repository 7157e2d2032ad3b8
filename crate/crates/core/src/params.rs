//! Beta prior parametrizations and the exact update maps.
//!
//! Canonical coordinates `(n0, y0)` are the prior strength and prior mean.
//! The translated coordinates are
//!
//! ```text
//! eta0 = n0 - 2,    eta1 = n0 * (y0 - 1/2)
//! ```
//!
//! and the admissible region is `eta0 > -2, |eta1| < (eta0 + 2) / 2`. In
//! these coordinates observing `s` successes in `n` trials moves every prior
//! by the same vector `(n, s - n/2)`.

use crate::error::{Error, Result};

/// Beta prior in canonical coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalParams {
    n0: f64,
    y0: f64,
}

impl CanonicalParams {
    pub fn new(n0: f64, y0: f64) -> Result<Self> {
        if !(n0 > 0.0 && n0.is_finite()) {
            return Err(Error::invalid(format!("n0 must be > 0 (got {n0})")));
        }
        if !(y0 > 0.0 && y0 < 1.0) {
            return Err(Error::invalid(format!("y0 must satisfy 0 < y0 < 1 (got {y0})")));
        }
        Ok(CanonicalParams { n0, y0 })
    }

    /// Prior strength (pseudocount).
    pub fn n0(&self) -> f64 {
        self.n0
    }

    /// Prior expectation of the success probability.
    pub fn y0(&self) -> f64 {
        self.y0
    }
}

/// Beta prior in translated coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaPoint {
    eta0: f64,
    eta1: f64,
}

impl EtaPoint {
    pub fn new(eta0: f64, eta1: f64) -> Result<Self> {
        if !in_domain(eta0, eta1) {
            return Err(Error::invalid(format!(
                "(eta0, eta1) = ({eta0}, {eta1}) violates eta0 > -2 and |eta1| < (eta0 + 2)/2"
            )));
        }
        Ok(EtaPoint { eta0, eta1 })
    }

    pub fn eta0(&self) -> f64 {
        self.eta0
    }

    pub fn eta1(&self) -> f64 {
        self.eta1
    }
}

/// Observation record. Counts are real-valued so that sweeps over `s` can be
/// continuous.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinomialData {
    n: f64,
    s: f64,
}

impl BinomialData {
    pub fn new(n: f64, s: f64) -> Result<Self> {
        if !(n >= 0.0 && n.is_finite()) {
            return Err(Error::invalid(format!("n must be >= 0 (got {n})")));
        }
        if !(s >= 0.0 && s <= n) {
            return Err(Error::invalid(format!("s must satisfy 0 <= s <= n (got s = {s}, n = {n})")));
        }
        Ok(BinomialData { n, s })
    }

    pub fn none() -> Self {
        BinomialData { n: 0.0, s: 0.0 }
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    /// Translation `s - n/2` applied to `eta1` by an update.
    pub fn eta1_step(&self) -> f64 {
        self.s - 0.5 * self.n
    }

    /// The data seen from the other label: `s -> n - s`.
    pub fn mirrored(&self) -> Self {
        BinomialData {
            n: self.n,
            s: self.n - self.s,
        }
    }
}

/// Membership in the open domain of proper Beta priors.
pub fn in_domain(eta0: f64, eta1: f64) -> bool {
    eta0 > -2.0 && eta1.abs() < 0.5 * (eta0 + 2.0)
}

pub fn eta_to_canonical(p: &EtaPoint) -> Result<CanonicalParams> {
    let n0 = p.eta0 + 2.0;
    CanonicalParams::new(n0, p.eta1 / n0 + 0.5)
}

pub fn canonical_to_eta(c: &CanonicalParams) -> Result<EtaPoint> {
    EtaPoint::new(c.n0 - 2.0, c.n0 * (c.y0 - 0.5))
}

/// `eta1` coordinate of the ray of constant expectation `y_c` at abscissa `eta0`.
pub fn ray_eta1(y_c: f64, eta0: f64) -> Result<f64> {
    if !(y_c > 0.0 && y_c < 1.0) {
        return Err(Error::invalid(format!("y_c must satisfy 0 < y_c < 1 (got {y_c})")));
    }
    if !(eta0 > -2.0 && eta0.is_finite()) {
        return Err(Error::invalid(format!("eta0 must be > -2 (got {eta0})")));
    }
    Ok((eta0 + 2.0) * (y_c - 0.5))
}

pub fn update_eta(p: &EtaPoint, d: &BinomialData) -> EtaPoint {
    EtaPoint {
        eta0: p.eta0 + d.n,
        eta1: p.eta1 + d.eta1_step(),
    }
}

pub fn update_canonical(c: &CanonicalParams, d: &BinomialData) -> CanonicalParams {
    let n = c.n0 + d.n;
    CanonicalParams {
        n0: n,
        y0: (c.n0 * c.y0 + d.s) / n,
    }
}
