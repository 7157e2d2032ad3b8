//! Expectation shadows and the tangency ("touchpoint") equations.
//!
//! The posterior mean of an element `(eta0, eta1)` is
//! `eta1 / (eta0 + 2) + 1/2`, the slope of the ray from `(-2, 0)` through the
//! point. The shadow of a set is the range of these slopes; the touchpoints
//! are the `eta0` coordinates of the points where the extreme rays touch the
//! set.
//!
//! For an axial boatshape translated by `(d0, d1)` the extreme ray touching
//! the upper contour `c(u) = a (1 - exp(-b (u - eta0_lo)))` at boat
//! coordinate `u` satisfies
//!
//! ```text
//! a exp(-b (u - eta0_lo)) (1 + b (u + d0 + 2)) = a + d1
//! ```
//!
//! and the one touching the lower contour the same equation with right-hand
//! side `a - d1`. The left-hand side `K(u)` is strictly decreasing, so each
//! equation has at most one root; when it has none inside
//! `[eta0_lo, eta0_hi]` the touchpoint sits at the end of the set.

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::params::BinomialData;
use crate::roots::{golden_max, newton_bisect};
use crate::shapes::{BoatshapeSpec, EtaSet, LineSegmentSpec, PriorShape, RectangleSpec, Shift};

/// Absolute tolerance on touchpoint abscissae.
pub const TOUCHPOINT_TOL: f64 = 1e-12;

/// Samples of the coarse boundary scan used for rotated boatshapes.
pub const SCAN_SAMPLES: usize = 4096;

/// Tolerance on the threshold values of [`agreement_thresholds`], scaled by `1 + n`.
pub const THRESHOLD_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LearningPhase {
    /// Both touchpoints inside the set.
    HappyBoth,
    UnhappyUpper,
    UnhappyLower,
    UnhappyBoth,
}

impl LearningPhase {
    pub fn from_clamps(upper: bool, lower: bool) -> Self {
        match (upper, lower) {
            (false, false) => LearningPhase::HappyBoth,
            (true, false) => LearningPhase::UnhappyUpper,
            (false, true) => LearningPhase::UnhappyLower,
            (true, true) => LearningPhase::UnhappyBoth,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            LearningPhase::HappyBoth => "happy_both",
            LearningPhase::UnhappyUpper => "unhappy_upper",
            LearningPhase::UnhappyLower => "unhappy_lower",
            LearningPhase::UnhappyBoth => "unhappy_both",
        }
    }

    pub fn is_happy(&self) -> bool {
        *self == LearningPhase::HappyBoth
    }
}

/// Where a touchpoint ended up along the set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Clamp {
    Interior,
    /// At the bow, `eta0_lo` plus the shift.
    Left,
    /// At the stern, `eta0_hi` plus the shift.
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Touchpoint {
    pub eta0: f64,
    pub clamp: Clamp,
}

impl Touchpoint {
    pub fn is_clamped(&self) -> bool {
        self.clamp != Clamp::Interior
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShadowResult {
    pub y_lo: f64,
    pub y_hi: f64,
    /// `eta0` of the point attaining `y_lo`.
    pub tp_lo: f64,
    /// `eta0` of the point attaining `y_hi`.
    pub tp_hi: f64,
    /// `None` for rectangles and segments, whose extremes always sit at corners.
    pub phase: Option<LearningPhase>,
}

impl ShadowResult {
    pub fn delta(&self) -> f64 {
        self.y_hi - self.y_lo
    }
}

/// Values of `s >= n/2` at which the upper touchpoint reaches the bow
/// (`s_u`) and the lower touchpoint reaches the stern (`s_l`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgreementThresholds {
    pub s_u: f64,
    pub s_l: f64,
}

impl AgreementThresholds {
    /// `[n - t, t]` with `t = min(s_u, s_l)`: outside it learning is unhappy.
    pub fn happy_interval(&self, n: f64) -> (f64, f64) {
        let t = self.s_u.min(self.s_l);
        (n - t, t)
    }
}

/// `K(u)` and `K'(u)` for a boat translated by `d0` along `eta0`.
fn tangency_level(spec: &BoatshapeSpec, d0: f64, u: f64) -> (f64, f64) {
    let decay = (-spec.b() * (u - spec.eta0_lo())).exp();
    let reach = u + d0 + 2.0;
    let k = spec.a() * decay * (1.0 + spec.b() * reach);
    let dk = -spec.a() * spec.b() * spec.b() * decay * reach;
    (k, dk)
}

fn classify(spec: &BoatshapeSpec, d0: f64, target: f64) -> Clamp {
    if target >= tangency_level(spec, d0, spec.eta0_lo()).0 {
        Clamp::Left
    } else if target <= tangency_level(spec, d0, spec.eta0_hi()).0 {
        Clamp::Right
    } else {
        Clamp::Interior
    }
}

/// Solves `K(u) = target` on the boat, clamping to its ends. Returns the
/// touchpoint in boat coordinates (before the `eta0` shift).
fn touch(spec: &BoatshapeSpec, d0: f64, target: f64) -> Result<Touchpoint> {
    let clamp = classify(spec, d0, target);
    let eta0 = match clamp {
        Clamp::Left => spec.eta0_lo(),
        Clamp::Right => spec.eta0_hi(),
        Clamp::Interior => newton_bisect(
            |u| {
                let (k, dk) = tangency_level(spec, d0, u);
                (k - target, dk)
            },
            spec.eta0_lo(),
            spec.eta0_hi(),
            TOUCHPOINT_TOL,
        )?,
    };
    Ok(Touchpoint { eta0, clamp })
}

/// Root of `1 + b (u + 2) = exp(b (u - eta0_lo))` beyond the bow, ignoring
/// the stern. The bracket is grown geometrically until the exponential side
/// dominates.
pub fn unclamped_prior_touchpoint(spec: &BoatshapeSpec) -> Result<f64> {
    let lo = spec.eta0_lo();
    let level = |u: f64| {
        let (k, dk) = tangency_level(spec, 0.0, u);
        (k - spec.a(), dk)
    };
    let mut width = 1.0;
    while level(lo + width).0 > 0.0 {
        width *= 2.0;
        if width > 1e12 {
            return Err(Error::Numeric("prior touchpoint bracket did not close".into()));
        }
    }
    newton_bisect(level, lo, lo + width, TOUCHPOINT_TOL)
}

/// Upper touchpoint of the prior boatshape, in the axial analysis frame
/// (`y_c` is ignored). Clamped to `eta0_hi` when the tangency lies beyond
/// the stern.
pub fn solve_prior_upper_touchpoint(spec: &BoatshapeSpec) -> Result<f64> {
    Ok(unclamped_prior_touchpoint(spec)?.min(spec.eta0_hi()))
}

/// Lower and upper posterior touchpoints (in that order) of the axial
/// boatshape after observing `d`, in posterior coordinates.
pub fn solve_posterior_touchpoints(spec: &BoatshapeSpec, d: &BinomialData) -> Result<(Touchpoint, Touchpoint)> {
    touchpoints_for_shift(spec, Shift::from_data(d))
}

fn touchpoints_for_shift(spec: &BoatshapeSpec, shift: Shift) -> Result<(Touchpoint, Touchpoint)> {
    let lower = touch(spec, shift.d0, spec.a() - shift.d1)?;
    let upper = touch(spec, shift.d0, spec.a() + shift.d1)?;
    let moved = |t: Touchpoint| Touchpoint {
        eta0: t.eta0 + shift.d0,
        clamp: t.clamp,
    };
    Ok((moved(lower), moved(upper)))
}

fn axial_shadow(spec: &BoatshapeSpec, shift: Shift) -> Result<ShadowResult> {
    let (lower, upper) = touchpoints_for_shift(spec, shift)?;
    let mean = |eta0: f64, sign: f64| {
        let u = eta0 - shift.d0;
        (shift.d1 + sign * spec.contour(u)) / (eta0 + 2.0) + 0.5
    };
    Ok(ShadowResult {
        y_lo: mean(lower.eta0, -1.0),
        y_hi: mean(upper.eta0, 1.0),
        tp_lo: lower.eta0,
        tp_hi: upper.eta0,
        phase: Some(LearningPhase::from_clamps(upper.is_clamped(), lower.is_clamped())),
    })
}

fn slope((x, y): (f64, f64)) -> f64 {
    y / (x + 2.0)
}

/// Extreme slopes over the corners of a polygonal set.
fn corner_shadow(corners: &[(f64, f64)], shift: Shift) -> ShadowResult {
    let moved: Vec<(f64, f64)> = corners
        .iter()
        .map(|&(n0, y0)| (n0 - 2.0 + shift.d0, n0 * (y0 - 0.5) + shift.d1))
        .collect();
    let mut lo = moved[0];
    let mut hi = moved[0];
    for &p in &moved[1..] {
        if slope(p) < slope(lo) {
            lo = p;
        }
        if slope(p) > slope(hi) {
            hi = p;
        }
    }
    ShadowResult {
        y_lo: slope(lo) + 0.5,
        y_hi: slope(hi) + 0.5,
        tp_lo: lo.0,
        tp_hi: hi.0,
        phase: None,
    }
}

/// Golden-section refinement of a boundary scan around sample `k`.
fn refine_on_boundary(set: &EtaSet, k: usize, sign: f64) -> (f64, f64) {
    let h = 1.0 / SCAN_SAMPLES as f64;
    let centre = k as f64 * h;
    let (t, _) = golden_max(|t| sign * slope(set.boundary_xy(t)), centre - h, centre + h, 1e-13);
    (t, slope(set.boundary_xy(t)))
}

fn rotated_shadow(spec: &BoatshapeSpec, set: &EtaSet, exec: Execution) -> Result<ShadowResult> {
    let scan = exec
        .extrema(SCAN_SAMPLES, |k| {
            let m = slope(set.boundary_xy(k as f64 / SCAN_SAMPLES as f64));
            Some((m, m))
        })
        .ok_or_else(|| Error::Numeric("empty boundary scan".into()))?;
    let (t_lo, m_lo) = refine_on_boundary(set, scan.argmin, -1.0);
    let (t_hi, m_hi) = refine_on_boundary(set, scan.argmax, 1.0);
    // the refined optimum never loses to the coarse one
    let (m_lo, t_lo) = if scan.min < m_lo { (scan.min, scan.argmin as f64 / SCAN_SAMPLES as f64) } else { (m_lo, t_lo) };
    let (m_hi, t_hi) = if scan.max > m_hi { (scan.max, scan.argmax as f64 / SCAN_SAMPLES as f64) } else { (m_hi, t_hi) };

    let shift = set.shift();
    let span = spec.eta0_hi() - spec.eta0_lo();
    let at_end = |t: f64| {
        let (x, y) = set.boundary_xy(t);
        let (u, _) = spec.unrotate((x - shift.d0, y - shift.d1));
        (u - spec.eta0_lo()).abs() <= 1e-6 * (1.0 + span) || (spec.eta0_hi() - u).abs() <= 1e-6 * (1.0 + span)
    };
    Ok(ShadowResult {
        y_lo: m_lo + 0.5,
        y_hi: m_hi + 0.5,
        tp_lo: set.boundary_xy(t_lo).0,
        tp_hi: set.boundary_xy(t_hi).0,
        phase: Some(LearningPhase::from_clamps(at_end(t_hi), at_end(t_lo))),
    })
}

/// Range of posterior (or prior) means over `set`.
///
/// Axial boatshapes use the touchpoint equations, rotated boatshapes a
/// boundary scan with golden-section refinement, and rectangles and segments
/// their corners (a ratio of affine functions over a convex polygon is
/// extremal at a vertex).
pub fn shadow(set: &EtaSet) -> Result<ShadowResult> {
    shadow_with(set, Execution::default())
}

pub fn shadow_with(set: &EtaSet, exec: Execution) -> Result<ShadowResult> {
    match set.shape() {
        PriorShape::Boat(spec) if spec.is_axial() => axial_shadow(spec, set.shift()),
        PriorShape::Boat(spec) => rotated_shadow(spec, set, exec),
        PriorShape::Rectangle(r) => Ok(corner_shadow(&r.corners(), set.shift())),
        PriorShape::Segment(seg) => Ok(corner_shadow(&[(seg.n0(), seg.y_hi()), (seg.n0(), seg.y_lo())], set.shift())),
    }
}

/// Happy/unhappy classification of the axial boatshape after `d`.
pub fn learning_phase(spec: &BoatshapeSpec, d: &BinomialData) -> Result<LearningPhase> {
    require_axial(spec)?;
    let shift = Shift::from_data(d);
    let upper = classify(spec, shift.d0, spec.a() + shift.d1);
    let lower = classify(spec, shift.d0, spec.a() - shift.d1);
    Ok(LearningPhase::from_clamps(upper != Clamp::Interior, lower != Clamp::Interior))
}

fn require_axial(spec: &BoatshapeSpec) -> Result<()> {
    if spec.is_axial() {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "thresholds and phases need an axial boatshape, y_c = 0.5 (got {})",
            spec.y_c()
        )))
    }
}

/// Smallest `s` in `[n/2, n]` where `clamped(s)` holds, for a predicate that
/// stays true once it becomes true. Returns `n` if it never holds.
fn first_clamp<F: Fn(f64) -> bool>(n: f64, clamped: F) -> f64 {
    let (mut lo, mut hi) = (0.5 * n, n);
    if clamped(lo) {
        return lo;
    }
    if !clamped(hi) {
        return n;
    }
    while hi - lo > THRESHOLD_TOL * (1.0 + n) {
        let mid = 0.5 * (lo + hi);
        if clamped(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Agreement thresholds for `n` observations, found by bisection over `s`.
/// For `s < n/2` the thresholds mirror to `n - s_u` and `n - s_l`.
pub fn agreement_thresholds(spec: &BoatshapeSpec, n: f64) -> Result<AgreementThresholds> {
    require_axial(spec)?;
    if !(n >= 0.0 && n.is_finite()) {
        return Err(Error::invalid(format!("n must be >= 0 (got {n})")));
    }
    let delta = |s: f64| s - 0.5 * n;
    let s_u = first_clamp(n, |s| classify(spec, n, spec.a() + delta(s)) == Clamp::Left);
    let s_l = first_clamp(n, |s| classify(spec, n, spec.a() - delta(s)) == Clamp::Right);
    Ok(AgreementThresholds { s_u, s_l })
}

/// Slopes in `s` of the upper and lower mean bounds once both touchpoints
/// are clamped: `1/(eta0_lo + n + 2)` and `1/(eta0_hi + n + 2)`.
pub fn terminal_slopes(spec: &BoatshapeSpec, n: f64) -> (f64, f64) {
    (1.0 / (spec.eta0_lo() + n + 2.0), 1.0 / (spec.eta0_hi() + n + 2.0))
}

/// Rectangle spanning the boat's `n0` range with the boat's prior mean range.
pub fn matched_rectangle(spec: &BoatshapeSpec) -> Result<RectangleSpec> {
    let prior = shadow(&EtaSet::new(PriorShape::Boat(*spec))?)?;
    RectangleSpec::new(spec.eta0_lo() + 2.0, spec.eta0_hi() + 2.0, prior.y_lo, prior.y_hi)
}

/// Line segment at prior strength `n0` with the boat's prior mean range.
pub fn matched_segment(spec: &BoatshapeSpec, n0: f64) -> Result<LineSegmentSpec> {
    let prior = shadow(&EtaSet::new(PriorShape::Boat(*spec))?)?;
    LineSegmentSpec::new(n0, prior.y_lo, prior.y_hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fig2() -> BoatshapeSpec {
        BoatshapeSpec::new(1.0, 6.0, 1.5, 0.9, 0.5).unwrap()
    }

    fn fig4() -> BoatshapeSpec {
        BoatshapeSpec::new(-1.0, 20.0, 1.0, 0.4, 0.5).unwrap()
    }

    fn data(n: f64, s: f64) -> BinomialData {
        BinomialData::new(n, s).unwrap()
    }

    /// Tangency residual `1 + b(eta + 2) - exp(b(eta - eta0_lo))` with the
    /// affine side scaled by `factor`, shifted by `n`.
    fn residual(spec: &BoatshapeSpec, n: f64, factor: f64, eta: f64) -> f64 {
        factor * (1.0 + spec.b() * (eta + 2.0)) - (spec.b() * (eta - n - spec.eta0_lo())).exp()
    }

    fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        assert!(f(lo) * f(hi) < 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) * f(lo) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn prior_touchpoint_matches_bisection_oracle() {
        let spec = fig2();
        let root = solve_prior_upper_touchpoint(&spec).unwrap();
        assert!(root > 1.0 && root < 6.0);
        assert!(residual(&spec, 0.0, 1.0, root).abs() < 1e-9);
        let oracle = bisect(|x| residual(&spec, 0.0, 1.0, x), 1.0 + 1e-9, 100.0);
        assert!((root - oracle).abs() < 1e-10, "{root} vs {oracle}");
    }

    #[test]
    fn prior_touchpoint_clamps_at_short_stern() {
        let spec = BoatshapeSpec::new(1.0, 1.5, 1.5, 0.9, 0.5).unwrap();
        let raw = unclamped_prior_touchpoint(&spec).unwrap();
        assert!(raw > 1.5);
        assert_eq!(solve_prior_upper_touchpoint(&spec).unwrap(), 1.5);
    }

    #[test]
    fn agreement_moves_touchpoint_right() {
        let spec = fig2();
        let prior = solve_prior_upper_touchpoint(&spec).unwrap();
        for n in [0.5, 2.0, 4.0] {
            let (lo, hi) = solve_posterior_touchpoints(&spec, &data(n, n / 2.0)).unwrap();
            assert_eq!(lo, hi);
            assert!(hi.eta0 > prior + n);
            assert!(residual(&spec, n, 1.0, hi.eta0).abs() < 1e-9);
        }
    }

    #[test]
    fn full_success_clamps_lower_at_stern() {
        let spec = fig2();
        let (lo, hi) = solve_posterior_touchpoints(&spec, &data(4.0, 4.0)).unwrap();
        assert_eq!(lo.eta0, 10.0);
        assert_eq!(lo.clamp, Clamp::Right);
        // the upper touchpoint solves the scaled equation
        if !hi.is_clamped() {
            let factor = spec.a() / (2.0 + spec.a());
            assert!(residual(&spec, 4.0, factor, hi.eta0).abs() < 1e-9);
        }
    }

    #[test]
    fn full_success_with_two_observations_stays_inside() {
        // clamping at s = n needs a - n/2 <= K(eta0_hi), i.e. n above about 2.67
        let spec = fig2();
        let (lo, _) = solve_posterior_touchpoints(&spec, &data(2.0, 2.0)).unwrap();
        assert_eq!(lo.clamp, Clamp::Interior);
        let slope = |u: f64| (1.0 - spec.contour(u)) / (u + 4.0);
        let (best, _) = (0..=200_000)
            .map(|k| 1.0 + 5.0 * k as f64 / 200_000.0)
            .map(|u| (u, slope(u)))
            .fold((0.0, f64::INFINITY), |acc, (u, m)| if m < acc.1 { (u, m) } else { acc });
        assert!((lo.eta0 - (best + 2.0)).abs() < 1e-4);
        let (lo, _) = solve_posterior_touchpoints(&spec, &data(3.0, 3.0)).unwrap();
        assert_eq!(lo.clamp, Clamp::Right);
    }

    #[test]
    fn segment_shadow_is_its_range() {
        let seg = EtaSet::new(PriorShape::Segment(LineSegmentSpec::new(2.0, 0.4, 0.6).unwrap())).unwrap();
        let sh = shadow(&seg).unwrap();
        assert!((sh.y_lo - 0.4).abs() < 1e-15 && (sh.y_hi - 0.6).abs() < 1e-15);
        assert!(sh.phase.is_none());
    }

    #[test]
    fn fig4_phases() {
        let spec = fig4();
        assert_eq!(learning_phase(&spec, &data(10.0, 5.0)).unwrap(), LearningPhase::HappyBoth);
        // the upper touchpoint reaches the bow only at s = 9.4
        assert_eq!(learning_phase(&spec, &data(10.0, 9.0)).unwrap(), LearningPhase::UnhappyLower);
        assert_eq!(learning_phase(&spec, &data(10.0, 9.9)).unwrap(), LearningPhase::UnhappyBoth);
        assert_eq!(learning_phase(&spec, &data(10.0, 1.0)).unwrap(), LearningPhase::UnhappyUpper);
        assert_eq!(learning_phase(&spec, &BinomialData::none()).unwrap(), LearningPhase::HappyBoth);
    }

    #[test]
    fn thresholds_match_closed_form() {
        // K is explicit at the ends, so the thresholds have closed forms:
        // s_u = n/2 + K(eta0_lo) - a and s_l = n/2 + a - K(eta0_hi).
        let spec = fig4();
        for n in [1.0, 5.0, 10.0, 30.0] {
            let th = agreement_thresholds(&spec, n).unwrap();
            let k_lo = spec.a() * (1.0 + spec.b() * (spec.eta0_lo() + n + 2.0));
            let k_hi = spec.a()
                * (-spec.b() * (spec.eta0_hi() - spec.eta0_lo())).exp()
                * (1.0 + spec.b() * (spec.eta0_hi() + n + 2.0));
            let s_u = (n / 2.0 + k_lo - spec.a()).min(n);
            let s_l = (n / 2.0 + spec.a() - k_hi).min(n);
            assert!((th.s_u - s_u).abs() < 2e-9, "n={n}: {} vs {s_u}", th.s_u);
            assert!((th.s_l - s_l).abs() < 2e-9, "n={n}: {} vs {s_l}", th.s_l);
        }
    }

    #[test]
    fn thresholds_bracket_the_clamp() {
        let spec = fig4();
        let th = agreement_thresholds(&spec, 10.0).unwrap();
        let below = learning_phase(&spec, &data(10.0, th.s_l - 1e-6)).unwrap();
        let above = learning_phase(&spec, &data(10.0, th.s_l + 1e-6)).unwrap();
        assert_eq!(below, LearningPhase::HappyBoth);
        assert_eq!(above, LearningPhase::UnhappyLower);
    }

    #[test]
    fn terminal_slopes_fig4() {
        let (up, low) = terminal_slopes(&fig4(), 10.0);
        assert_eq!((up, low), (1.0 / 11.0, 1.0 / 32.0));
        assert!(up > low);
    }

    #[test]
    fn rejects_negative_n() {
        assert!(agreement_thresholds(&fig4(), -1.0).is_err());
    }

    /// Light-source form of the rotated problem: in boat coordinates the
    /// apex sits at `L = (-2, 0) - R^-1 shift`, and the extreme rays are the
    /// tangents from `L`. Maximizes the slope from `L` over the upper contour
    /// by dense sampling plus bisection on the derivative sign.
    fn rotated_oracle(spec: &BoatshapeSpec, shift: Shift) -> (f64, f64) {
        let theta = (spec.y_c() - 0.5).atan();
        let (c, s) = (theta.cos(), theta.sin());
        let l0 = -2.0 - (c * shift.d0 + s * shift.d1);
        let l1 = -(-s * shift.d0 + c * shift.d1);
        let best = |sign: f64| {
            let f = |u: f64| (sign * spec.contour(u) - l1) / (u - l0);
            let (mut a, mut b) = (spec.eta0_lo(), spec.eta0_hi());
            // f is unimodal on the contour; ternary search to machine precision
            for _ in 0..300 {
                let m1 = a + (b - a) / 3.0;
                let m2 = b - (b - a) / 3.0;
                if sign * f(m1) < sign * f(m2) {
                    a = m1;
                } else {
                    b = m2;
                }
            }
            f(0.5 * (a + b))
        };
        let to_mean = |m: f64| (m.atan() + theta).tan() + 0.5;
        (to_mean(best(-1.0)), to_mean(best(1.0)))
    }

    #[test]
    fn rotated_shadow_matches_light_source_oracle() {
        let spec = fig4().with_center(0.75).unwrap();
        let set = EtaSet::new(PriorShape::Boat(spec)).unwrap();
        for (n, s) in [(0.0, 0.0), (10.0, 0.0), (10.0, 3.0), (10.0, 7.5), (10.0, 10.0), (40.0, 12.0)] {
            let d = data(n, s);
            let sh = shadow(&set.updated(&d)).unwrap();
            let (lo, hi) = rotated_oracle(&spec, Shift::from_data(&d));
            assert!((sh.y_lo - lo).abs() < 1e-10, "n={n} s={s}: {} vs {lo}", sh.y_lo);
            assert!((sh.y_hi - hi).abs() < 1e-10, "n={n} s={s}: {} vs {hi}", sh.y_hi);
        }
    }

    #[test]
    fn rotated_prior_shadow_is_rotated_axial_shadow() {
        // rotation about the apex adds the same angle to every ray
        let axial = shadow(&EtaSet::new(PriorShape::Boat(fig4())).unwrap()).unwrap();
        let spec = fig4().with_center(0.6).unwrap();
        let sh = shadow(&EtaSet::new(PriorShape::Boat(spec)).unwrap()).unwrap();
        let theta = 0.1f64.atan();
        let turn = |y: f64| ((y - 0.5).atan() + theta).tan() + 0.5;
        assert!((sh.y_lo - turn(axial.y_lo)).abs() < 1e-12);
        assert!((sh.y_hi - turn(axial.y_hi)).abs() < 1e-12);
    }

    #[test]
    fn execution_modes_agree() {
        let spec = fig4().with_center(0.3).unwrap();
        let set = EtaSet::new(PriorShape::Boat(spec)).unwrap().updated(&data(6.0, 4.0));
        assert_eq!(
            shadow_with(&set, Execution::Parallel).unwrap(),
            shadow_with(&set, Execution::Sequential).unwrap()
        );
    }

    fn arb_boat() -> impl Strategy<Value = BoatshapeSpec> {
        (-1.5f64..5.0, 0.5f64..25.0, 0.05f64..0.45, 0.05f64..1.5).prop_map(|(lo, len, a_frac, b)| {
            BoatshapeSpec::new(lo, lo + len, a_frac * (lo + 2.0), b, 0.5).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn unclamped_roots_solve_their_equations(spec in arb_boat(), n in 0.0f64..20.0, frac in 0.0f64..=1.0) {
            let d = data(n, frac * n);
            let delta = d.eta1_step();
            let (lo, hi) = solve_posterior_touchpoints(&spec, &d).unwrap();
            let scale = |eta: f64| (spec.b() * (eta - n - spec.eta0_lo())).exp().max(1.0);
            if !hi.is_clamped() {
                let r = residual(&spec, n, spec.a() / (delta + spec.a()), hi.eta0);
                prop_assert!(r.abs() < 1e-9 * scale(hi.eta0), "upper residual {}", r);
            }
            if !lo.is_clamped() {
                let r = residual(&spec, n, spec.a() / (spec.a() - delta), lo.eta0);
                prop_assert!(r.abs() < 1e-9 * scale(lo.eta0), "lower residual {}", r);
            }
            for tp in [lo, hi] {
                prop_assert!(tp.eta0 >= spec.eta0_lo() + n && tp.eta0 <= spec.eta0_hi() + n);
            }
        }

        #[test]
        fn mirror_symmetry(spec in arb_boat(), n in 0.0f64..20.0, frac in 0.0f64..=1.0) {
            let prior = EtaSet::new(PriorShape::Boat(spec));
            prop_assume!(prior.is_ok());
            let prior = prior.unwrap();
            let d = data(n, frac * n);
            let a = shadow(&prior.updated(&d)).unwrap();
            let b = shadow(&prior.updated(&d.mirrored())).unwrap();
            prop_assert!((a.y_lo - (1.0 - b.y_hi)).abs() < 1e-12);
            prop_assert!((a.y_hi - (1.0 - b.y_lo)).abs() < 1e-12);
            prop_assert!((a.tp_lo - b.tp_hi).abs() < 1e-9);
        }

        #[test]
        fn strong_agreement_shift(spec in arb_boat(), n in 0.01f64..20.0) {
            let prior = solve_prior_upper_touchpoint(&spec).unwrap();
            let (_, hi) = solve_posterior_touchpoints(&spec, &data(n, n / 2.0)).unwrap();
            if prior < spec.eta0_hi() && !hi.is_clamped() {
                prop_assert!(hi.eta0 > prior + n);
            }
        }

        #[test]
        fn upper_bound_grows_with_conflict(spec in arb_boat(), n in 0.1f64..20.0, f in 0.5f64..1.0, g in 0.5f64..1.0) {
            let prior = EtaSet::new(PriorShape::Boat(spec));
            prop_assume!(prior.is_ok());
            let prior = prior.unwrap();
            let (s1, s2) = (f.min(g) * n, f.max(g) * n);
            let y1 = shadow(&prior.updated(&data(n, s1))).unwrap().y_hi;
            let y2 = shadow(&prior.updated(&data(n, s2))).unwrap().y_hi;
            prop_assert!(y2 >= y1 - 1e-15);
            if s2 > s1 + 1e-6 {
                prop_assert!(y2 > y1);
            }
        }

        #[test]
        fn phase_matches_thresholds(spec in arb_boat(), n in 0.1f64..20.0, frac in 0.0f64..=1.0) {
            let s = frac * n;
            let th = agreement_thresholds(&spec, n).unwrap();
            let t = th.s_u.min(th.s_l);
            let phase = learning_phase(&spec, &data(n, s)).unwrap();
            // keep away from the thresholds themselves
            prop_assume!((s - t).abs() > 1e-6 && (s - (n - t)).abs() > 1e-6);
            let inside = if t >= n { true } else { n - t < s && s < t };
            prop_assert_eq!(phase.is_happy(), inside);
        }

        #[test]
        fn terminal_regime_is_affine(spec in arb_boat(), n in 0.5f64..20.0) {
            let prior = EtaSet::new(PriorShape::Boat(spec));
            prop_assume!(prior.is_ok());
            let prior = prior.unwrap();
            let th = agreement_thresholds(&spec, n).unwrap();
            let start = th.s_u.max(th.s_l);
            prop_assume!(start < n - 1e-3);
            let ss = [start + 1e-4 * (n - start), 0.5 * (start + n), n];
            let ys: Vec<ShadowResult> = ss.iter().map(|&s| shadow(&prior.updated(&data(n, s))).unwrap()).collect();
            let (up, low) = terminal_slopes(&spec, n);
            for w in ys.windows(2).zip(ss.windows(2)) {
                let (y, s) = w;
                prop_assert!(((y[1].y_hi - y[0].y_hi) / (s[1] - s[0]) - up).abs() < 1e-9);
                prop_assert!(((y[1].y_lo - y[0].y_lo) / (s[1] - s[0]) - low).abs() < 1e-9);
            }
        }
    }
}
