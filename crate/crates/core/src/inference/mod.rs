//! Posterior quantities of parameter sets: bounds on the posterior mean,
//! their width, Beta special functions and unions of central credibility
//! intervals.
//!
//! Every element `(n0, y0)` of a set indexes the Beta distribution with
//! shape `(n0 y0, n0 (1 - y0))`; in translated coordinates that is
//! `(eta0/2 + 1 + eta1, eta0/2 + 1 - eta1)`.

pub mod special;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::params::{BinomialData, CanonicalParams};
use crate::roots::{golden_max, newton_bisect};
use crate::shapes::{EtaSet, LineSegmentSpec, PriorShape, RectangleSpec};
use crate::touchpoint::{shadow_with, SCAN_SAMPLES};

use special::{ln_beta, regularized_incomplete_beta};

/// Interior grid points per axis searched by [`credibility_union`].
pub const CREDIBILITY_GRID: usize = 128;

/// Required accuracy of [`beta_quantile`] in probability.
pub const QUANTILE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaShape {
    alpha: f64,
    beta: f64,
}

impl BetaShape {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) || !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::invalid(format!(
                "Beta shape must satisfy alpha > 0 and beta > 0 (got {alpha}, {beta})"
            )));
        }
        Ok(BetaShape { alpha, beta })
    }

    pub fn from_canonical(c: &CanonicalParams) -> Self {
        BetaShape {
            alpha: c.n0() * c.y0(),
            beta: c.n0() * (1.0 - c.y0()),
        }
    }

    /// Shape of the set element at translated coordinates `(eta0, eta1)`.
    pub fn from_eta(eta0: f64, eta1: f64) -> Result<Self> {
        let half = 0.5 * eta0 + 1.0;
        BetaShape::new(half + eta1, half - eta1)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn mean(&self) -> f64 {
        self.alpha / (self.alpha + self.beta)
    }
}

pub fn beta_log_pdf(shape: &BetaShape, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::OutOfRange {
            name: "p",
            value: p,
            lo: 0.0,
            hi: 1.0,
        });
    }
    Ok((shape.alpha - 1.0) * p.ln() + (shape.beta - 1.0) * (-p).ln_1p() - ln_beta(shape.alpha, shape.beta))
}

/// `P(X <= p)`; arguments outside `[0, 1]` saturate.
pub fn beta_cdf(shape: &BetaShape, p: f64) -> f64 {
    regularized_incomplete_beta(shape.alpha, shape.beta, p)
}

/// Inverse CDF by safeguarded Newton iteration on `[0, 1]`.
pub fn beta_quantile(shape: &BetaShape, q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::OutOfRange {
            name: "q",
            value: q,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let x = newton_bisect(
        |x| {
            let pdf = beta_log_pdf(shape, x).map(f64::exp).unwrap_or(0.0);
            (beta_cdf(shape, x) - q, pdf)
        },
        0.0,
        1.0,
        1e-16,
    )?;
    let miss = (beta_cdf(shape, x) - q).abs();
    if miss >= QUANTILE_TOL {
        return Err(Error::Numeric(format!(
            "Beta({}, {}) quantile {q}: residual {miss}",
            shape.alpha, shape.beta
        )));
    }
    Ok(x)
}

/// Central interval `[q_{(1-gamma)/2}, q_{(1+gamma)/2}]`.
pub fn central_interval(shape: &BetaShape, gamma: f64) -> Result<(f64, f64)> {
    check_gamma(gamma)?;
    Ok((
        beta_quantile(shape, 0.5 * (1.0 - gamma))?,
        beta_quantile(shape, 0.5 * (1.0 + gamma))?,
    ))
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("gamma must satisfy 0 < gamma < 1 (got {gamma})")))
    }
}

/// Lower and upper posterior mean over the updated set.
pub fn posterior_expectation_bounds(set: &EtaSet, d: &BinomialData) -> Result<(f64, f64)> {
    let sh = shadow_with(&set.updated(d), Execution::default())?;
    Ok((sh.y_lo, sh.y_hi))
}

/// Bounds on `(n0 y0 + s)/(n0 + n)` optimized over the canonical
/// coordinates of the prior set, without going through the translated
/// parametrization. Data already absorbed into `set` (its shift) are added
/// to `d`.
pub fn canonical_route_bounds(set: &EtaSet, d: &BinomialData) -> Result<(f64, f64)> {
    let shift = set.shift();
    let n = shift.d0 + d.n();
    let s = shift.d1 + 0.5 * shift.d0 + d.s();
    let mean = |(n0, y0): (f64, f64)| (n0 * y0 + s) / (n0 + n);
    let over = |points: &[(f64, f64)]| {
        points
            .iter()
            .map(|&p| mean(p))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), m| (lo.min(m), hi.max(m)))
    };
    match set.shape() {
        // monotone in y0 for fixed n0 and in n0 for fixed y0: corners suffice
        PriorShape::Rectangle(r) => Ok(over(&r.corners())),
        PriorShape::Segment(seg) => Ok(over(&[(seg.n0(), seg.y_lo()), (seg.n0(), seg.y_hi())])),
        PriorShape::Boat(_) => {
            let prior = EtaSet::new(*set.shape())?;
            let at = |t: f64| {
                let (x, y) = prior.boundary_xy(t);
                mean((x + 2.0, y / (x + 2.0) + 0.5))
            };
            let h = 1.0 / SCAN_SAMPLES as f64;
            let scan = Execution::default()
                .extrema(SCAN_SAMPLES, |k| {
                    let m = at(k as f64 * h);
                    Some((m, m))
                })
                .expect("non-empty scan");
            let lo = -golden_max(|t| -at(t), (scan.argmin as f64 - 1.0) * h, (scan.argmin as f64 + 1.0) * h, 1e-13).1;
            let hi = golden_max(at, (scan.argmax as f64 - 1.0) * h, (scan.argmax as f64 + 1.0) * h, 1e-13).1;
            Ok((lo.min(scan.min), hi.max(scan.max)))
        }
    }
}

/// Width of the posterior mean interval.
pub fn imprecision_delta(set: &EtaSet, d: &BinomialData) -> Result<f64> {
    let (lo, hi) = posterior_expectation_bounds(set, d)?;
    Ok(hi - lo)
}

/// `n0 (y_hi - y_lo) / (n0 + n)`, the same for every `s`.
pub fn delta_segment_closed_form(seg: &LineSegmentSpec, d: &BinomialData) -> f64 {
    seg.n0() * (seg.y_hi() - seg.y_lo()) / (seg.n0() + d.n())
}

/// Posterior imprecision of a rectangle set: a shrinking prior term plus a
/// conflict term proportional to the distance of `s/n` from `[y_lo, y_hi]`.
pub fn delta_rectangle_closed_form(r: &RectangleSpec, d: &BinomialData) -> Result<f64> {
    let n = d.n();
    if n <= 0.0 {
        return Err(Error::invalid("closed-form rectangle imprecision needs n > 0"));
    }
    let ratio = d.s() / n;
    let conflict = (r.y_lo() - ratio).max(ratio - r.y_hi()).max(0.0);
    Ok(r.n_hi() * (r.y_hi() - r.y_lo()) / (r.n_hi() + n)
        + conflict * n * (r.n_hi() - r.n_lo()) / ((r.n_lo() + n) * (r.n_hi() + n)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CredibilityUnion {
    pub lo: f64,
    pub hi: f64,
    pub gamma: f64,
}

impl CredibilityUnion {
    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, lo: f64, hi: f64) -> bool {
        self.lo <= lo && hi <= self.hi
    }
}

fn element_interval((x, y): (f64, f64), gamma: f64) -> Result<(f64, f64)> {
    central_interval(&BetaShape::from_eta(x, y)?, gamma)
}

fn fold_intervals(items: Vec<Result<(f64, f64)>>) -> Result<Option<(f64, f64, usize, usize)>> {
    let mut best: Option<(f64, f64, usize, usize)> = None;
    for (i, item) in items.into_iter().enumerate() {
        let (lo, hi) = item?;
        best = Some(match best {
            None => (lo, hi, i, i),
            Some((blo, bhi, ilo, ihi)) => {
                let (blo, ilo) = if lo < blo { (lo, i) } else { (blo, ilo) };
                let (bhi, ihi) = if hi > bhi { (hi, i) } else { (bhi, ihi) };
                (blo, bhi, ilo, ihi)
            }
        });
    }
    Ok(best)
}

/// Union of the central `gamma` credibility intervals of every posterior
/// in the updated set.
///
/// Quantiles are not ratios of affine functions, so the extremes are looked
/// for on the boundary (scan plus golden-section refinement) and on an
/// interior grid as well.
pub fn credibility_union(set: &EtaSet, d: &BinomialData, gamma: f64) -> Result<CredibilityUnion> {
    credibility_union_with(set, d, gamma, Execution::default())
}

pub fn credibility_union_with(set: &EtaSet, d: &BinomialData, gamma: f64, exec: Execution) -> Result<CredibilityUnion> {
    check_gamma(gamma)?;
    let post = set.updated(d);
    let h = 1.0 / SCAN_SAMPLES as f64;
    let boundary = exec.map(SCAN_SAMPLES, |k| element_interval(post.boundary_xy(k as f64 * h), gamma));
    let (mut lo, mut hi, klo, khi) = fold_intervals(boundary)?.expect("non-empty scan");

    // refine around the best boundary samples; a failed quantile just skips
    // the candidate
    let q_lo = 0.5 * (1.0 - gamma);
    let q_hi = 0.5 * (1.0 + gamma);
    let quantile_at = |t: f64, q: f64| {
        let (x, y) = post.boundary_xy(t);
        BetaShape::from_eta(x, y).and_then(|b| beta_quantile(&b, q))
    };
    let (t, _) = golden_max(
        |t| quantile_at(t, q_lo).map(|v| -v).unwrap_or(f64::NEG_INFINITY),
        (klo as f64 - 1.0) * h,
        (klo as f64 + 1.0) * h,
        1e-10,
    );
    if let Ok(v) = quantile_at(t, q_lo) {
        lo = lo.min(v);
    }
    let (t, _) = golden_max(
        |t| quantile_at(t, q_hi).unwrap_or(f64::NEG_INFINITY),
        (khi as f64 - 1.0) * h,
        (khi as f64 + 1.0) * h,
        1e-10,
    );
    if let Ok(v) = quantile_at(t, q_hi) {
        hi = hi.max(v);
    }

    let ((x0, x1), (y0, y1)) = post.bounding_box();
    let m = CREDIBILITY_GRID;
    let step = ((x1 - x0) / (m - 1) as f64, (y1 - y0) / (m - 1) as f64);
    let interior = exec.map(m * m, |k| {
        let p = (x0 + (k / m) as f64 * step.0, y0 + (k % m) as f64 * step.1);
        if post.contains(p) {
            element_interval(p, gamma).map(Some)
        } else {
            Ok(None)
        }
    });
    for item in interior {
        if let Some((a, b)) = item? {
            lo = lo.min(a);
            hi = hi.max(b);
        }
    }
    Ok(CredibilityUnion { lo, hi, gamma })
}
