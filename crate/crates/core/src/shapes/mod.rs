//! Prior parameter sets in translated coordinates.
//!
//! Three families are supported: line segments `n0 x [y_lo, y_hi]` and
//! rectangles `[n_lo, n_hi] x [y_lo, y_hi]`, both given in canonical
//! coordinates, and the boatshape bounded by the exponential contours
//! `+-a (1 - exp(-b (eta0 - eta0_lo)))` between `eta0_lo` and `eta0_hi`,
//! optionally rotated about the apex `(-2, 0)` onto the ray of expectation
//! `y_c`. An [`EtaSet`] pairs a shape with the translation accumulated from
//! updates.

mod record;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::params::{BinomialData, EtaPoint};

pub use record::{parse_record, set_from_record, set_to_record, shape_from_record};

/// Polyline segments per boundary piece used to allocate the boundary
/// parameter by arc length.
pub const ARC_SEGMENTS: usize = 1024;

/// Boundary samples checked against the domain when a set is built.
pub const VALIDATION_SAMPLES: usize = 10_000;

/// Translation accumulated by updating.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Shift {
    pub d0: f64,
    pub d1: f64,
}

impl Shift {
    pub fn from_data(d: &BinomialData) -> Self {
        Shift {
            d0: d.n(),
            d1: d.eta1_step(),
        }
    }
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must satisfy 0 < {name} < 1 (got {v})")))
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be > 0 (got {v})")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoatshapeSpec {
    eta0_lo: f64,
    eta0_hi: f64,
    a: f64,
    b: f64,
    y_c: f64,
}

impl BoatshapeSpec {
    /// Checks the scalar constraints only; containment in the domain is
    /// checked when the shape is wrapped in an [`EtaSet`].
    pub fn new(eta0_lo: f64, eta0_hi: f64, a: f64, b: f64, y_c: f64) -> Result<Self> {
        if !(eta0_lo > -2.0 && eta0_lo.is_finite()) {
            return Err(Error::invalid(format!("eta0_lo must be > -2 (got {eta0_lo})")));
        }
        if !(eta0_hi > eta0_lo && eta0_hi.is_finite()) {
            return Err(Error::invalid(format!(
                "eta0_hi must be > eta0_lo (got eta0_hi = {eta0_hi}, eta0_lo = {eta0_lo})"
            )));
        }
        check_positive("a", a)?;
        check_positive("b", b)?;
        check_unit("y_c", y_c)?;
        Ok(BoatshapeSpec {
            eta0_lo,
            eta0_hi,
            a,
            b,
            y_c,
        })
    }

    pub fn eta0_lo(&self) -> f64 {
        self.eta0_lo
    }

    pub fn eta0_hi(&self) -> f64 {
        self.eta0_hi
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn y_c(&self) -> f64 {
        self.y_c
    }

    /// True when the central ray is the `eta0` axis.
    pub fn is_axial(&self) -> bool {
        self.y_c == 0.5
    }

    /// Same shape with the central ray moved to `y_c`.
    pub fn with_center(&self, y_c: f64) -> Result<Self> {
        BoatshapeSpec::new(self.eta0_lo, self.eta0_hi, self.a, self.b, y_c)
    }

    /// Upper contour in the unrotated frame, without range checks.
    pub(crate) fn contour(&self, eta0: f64) -> f64 {
        -self.a * (-self.b * (eta0 - self.eta0_lo)).exp_m1()
    }

    pub(crate) fn rotate(&self, p: (f64, f64)) -> (f64, f64) {
        rotate_about_apex(p, self.y_c)
    }

    pub(crate) fn unrotate(&self, p: (f64, f64)) -> (f64, f64) {
        let (c, s) = rotation(self.y_c);
        turn(p, c, -s)
    }
}

/// Lower and upper contour of an unrotated boatshape at `eta0`.
pub fn boat_contours(spec: &BoatshapeSpec, eta0: f64) -> Result<(f64, f64)> {
    if !(eta0 >= spec.eta0_lo && eta0 <= spec.eta0_hi) {
        return Err(Error::OutOfRange {
            name: "eta0",
            value: eta0,
            lo: spec.eta0_lo,
            hi: spec.eta0_hi,
        });
    }
    let upper = spec.contour(eta0);
    Ok((-upper, upper))
}

fn rotation(y_c: f64) -> (f64, f64) {
    // angle arctan(y_c - 1/2)
    let m = y_c - 0.5;
    let r = m.hypot(1.0);
    (1.0 / r, m / r)
}

fn turn((x, y): (f64, f64), c: f64, s: f64) -> (f64, f64) {
    let dx = x + 2.0;
    (c * dx - s * y - 2.0, s * dx + c * y)
}

/// Rotates `p` about `(-2, 0)` so that the `eta0` axis lands on the ray of
/// constant expectation `y_c`.
pub fn rotate_about_apex(p: (f64, f64), y_c: f64) -> (f64, f64) {
    let (c, s) = rotation(y_c);
    turn(p, c, s)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RectangleSpec {
    n_lo: f64,
    n_hi: f64,
    y_lo: f64,
    y_hi: f64,
}

impl RectangleSpec {
    pub fn new(n_lo: f64, n_hi: f64, y_lo: f64, y_hi: f64) -> Result<Self> {
        check_positive("n_lo", n_lo)?;
        check_positive("n_hi", n_hi)?;
        check_unit("y_lo", y_lo)?;
        check_unit("y_hi", y_hi)?;
        if n_lo > n_hi {
            return Err(Error::invalid(format!("n_lo must be <= n_hi (got {n_lo} > {n_hi})")));
        }
        if y_lo > y_hi {
            return Err(Error::invalid(format!("y_lo must be <= y_hi (got {y_lo} > {y_hi})")));
        }
        Ok(RectangleSpec { n_lo, n_hi, y_lo, y_hi })
    }

    pub fn n_lo(&self) -> f64 {
        self.n_lo
    }

    pub fn n_hi(&self) -> f64 {
        self.n_hi
    }

    pub fn y_lo(&self) -> f64 {
        self.y_lo
    }

    pub fn y_hi(&self) -> f64 {
        self.y_hi
    }

    /// Corners in canonical coordinates, clockwise from top-left.
    pub fn corners(&self) -> [(f64, f64); 4] {
        [
            (self.n_lo, self.y_hi),
            (self.n_hi, self.y_hi),
            (self.n_hi, self.y_lo),
            (self.n_lo, self.y_lo),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSegmentSpec {
    n0: f64,
    y_lo: f64,
    y_hi: f64,
}

impl LineSegmentSpec {
    pub fn new(n0: f64, y_lo: f64, y_hi: f64) -> Result<Self> {
        check_positive("n0", n0)?;
        check_unit("y_lo", y_lo)?;
        check_unit("y_hi", y_hi)?;
        if y_lo > y_hi {
            return Err(Error::invalid(format!("y_lo must be <= y_hi (got {y_lo} > {y_hi})")));
        }
        Ok(LineSegmentSpec { n0, y_lo, y_hi })
    }

    pub fn n0(&self) -> f64 {
        self.n0
    }

    pub fn y_lo(&self) -> f64 {
        self.y_lo
    }

    pub fn y_hi(&self) -> f64 {
        self.y_hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PriorShape {
    Segment(LineSegmentSpec),
    Rectangle(RectangleSpec),
    Boat(BoatshapeSpec),
}

fn canonical_to_xy((n0, y0): (f64, f64)) -> (f64, f64) {
    (n0 - 2.0, n0 * (y0 - 0.5))
}

impl PriorShape {
    pub fn kind(&self) -> &'static str {
        match self {
            PriorShape::Segment(_) => "segment",
            PriorShape::Rectangle(_) => "rectangle",
            PriorShape::Boat(_) => "boat",
        }
    }

    /// Boundary pieces in traversal order: top left to right, right edge
    /// top to bottom, bottom right to left (and the left edge for rectangles).
    fn pieces(&self) -> Vec<Piece> {
        match *self {
            PriorShape::Boat(boat) => {
                let top = boat.contour(boat.eta0_hi);
                vec![
                    Piece::Contour {
                        boat,
                        sign: 1.0,
                        from: boat.eta0_lo,
                        to: boat.eta0_hi,
                    },
                    Piece::Line {
                        from: boat.rotate((boat.eta0_hi, top)),
                        to: boat.rotate((boat.eta0_hi, -top)),
                    },
                    Piece::Contour {
                        boat,
                        sign: -1.0,
                        from: boat.eta0_hi,
                        to: boat.eta0_lo,
                    },
                ]
            }
            PriorShape::Rectangle(r) => {
                let c = r.corners().map(canonical_to_xy);
                (0..4)
                    .map(|i| Piece::Line {
                        from: c[i],
                        to: c[(i + 1) % 4],
                    })
                    .collect()
            }
            PriorShape::Segment(seg) => {
                let top = canonical_to_xy((seg.n0, seg.y_hi));
                let bottom = canonical_to_xy((seg.n0, seg.y_lo));
                vec![Piece::Line { from: top, to: bottom }, Piece::Line { from: bottom, to: top }]
            }
        }
    }

    /// Membership of an unshifted point, with an absolute slack `eps`.
    fn contains_xy(&self, (x, y): (f64, f64), eps: f64) -> bool {
        match self {
            PriorShape::Boat(boat) => {
                let (u, v) = boat.unrotate((x, y));
                if u < boat.eta0_lo - eps || u > boat.eta0_hi + eps {
                    return false;
                }
                v.abs() <= boat.contour(u.clamp(boat.eta0_lo, boat.eta0_hi)) + eps
            }
            PriorShape::Rectangle(r) => {
                let n0 = x + 2.0;
                if n0 <= 0.0 {
                    return false;
                }
                let y0 = y / n0 + 0.5;
                n0 >= r.n_lo - eps && n0 <= r.n_hi + eps && y0 >= r.y_lo - eps && y0 <= r.y_hi + eps
            }
            PriorShape::Segment(seg) => {
                let n0 = x + 2.0;
                if n0 <= 0.0 || (n0 - seg.n0).abs() > eps {
                    return false;
                }
                let y0 = y / n0 + 0.5;
                y0 >= seg.y_lo - eps && y0 <= seg.y_hi + eps
            }
        }
    }
}

/// A boundary piece, parametrized over `[0, 1]`.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Piece {
    Line { from: (f64, f64), to: (f64, f64) },
    Contour { boat: BoatshapeSpec, sign: f64, from: f64, to: f64 },
}

impl Piece {
    pub(crate) fn eval(&self, rho: f64) -> (f64, f64) {
        match *self {
            Piece::Line { from, to } => (from.0 + rho * (to.0 - from.0), from.1 + rho * (to.1 - from.1)),
            Piece::Contour { boat, sign, from, to } => {
                let x = from + rho * (to - from);
                boat.rotate((x, sign * boat.contour(x)))
            }
        }
    }
}

/// Cumulative polyline lengths used to invert the arc-length allocation.
#[derive(Debug)]
struct ArcTable {
    pieces: Vec<Piece>,
    cumulative: Vec<Vec<f64>>,
    starts: Vec<f64>,
    total: f64,
}

impl ArcTable {
    fn new(shape: &PriorShape) -> Self {
        let pieces = shape.pieces();
        let mut cumulative = Vec::with_capacity(pieces.len());
        let mut starts = Vec::with_capacity(pieces.len() + 1);
        let mut total = 0.0;
        for piece in &pieces {
            starts.push(total);
            let mut cum = Vec::with_capacity(ARC_SEGMENTS + 1);
            let mut acc = 0.0;
            let mut prev = piece.eval(0.0);
            cum.push(0.0);
            for k in 1..=ARC_SEGMENTS {
                let p = piece.eval(k as f64 / ARC_SEGMENTS as f64);
                acc += (p.0 - prev.0).hypot(p.1 - prev.1);
                cum.push(acc);
                prev = p;
            }
            total += acc;
            cumulative.push(cum);
        }
        starts.push(total);
        ArcTable {
            pieces,
            cumulative,
            starts,
            total,
        }
    }

    /// Piece index and local parameter for boundary parameter `t`.
    fn locate(&self, t: f64) -> (usize, f64) {
        let t = t.rem_euclid(1.0);
        if self.total == 0.0 {
            return (0, 0.0);
        }
        let target = t * self.total;
        let last = self.pieces.len() - 1;
        // first piece whose end lies beyond the target and which has length
        let mut idx = last;
        for i in 0..self.pieces.len() {
            if self.starts[i + 1] > target && self.starts[i + 1] > self.starts[i] {
                idx = i;
                break;
            }
        }
        let cum = &self.cumulative[idx];
        let local = (target - self.starts[idx]).clamp(0.0, cum[ARC_SEGMENTS]);
        let k = cum.partition_point(|&c| c <= local).clamp(1, ARC_SEGMENTS) - 1;
        let span = cum[k + 1] - cum[k];
        let frac = if span > 0.0 { ((local - cum[k]) / span).clamp(0.0, 1.0) } else { 0.0 };
        (idx, (k as f64 + frac) / ARC_SEGMENTS as f64)
    }

    /// Boundary parameter at which each piece starts.
    fn piece_starts(&self) -> Vec<f64> {
        if self.total == 0.0 {
            return vec![0.0; self.pieces.len()];
        }
        self.starts[..self.pieces.len()].iter().map(|s| s / self.total).collect()
    }
}

/// Outcome of checking that a set lies strictly inside the domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationReport {
    /// Smallest `(eta0 + 2)/2 - |eta1|` over the sampled boundary.
    pub worst_margin: f64,
    /// Boundary point attaining `worst_margin`.
    pub worst_point: (f64, f64),
    pub samples: usize,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.worst_margin > 0.0
    }
}

fn domain_margin((x, y): (f64, f64)) -> f64 {
    0.5 * (x + 2.0) - y.abs()
}

/// Samples the boundary of `shape` translated by `shift` and reports the
/// point closest to leaving the domain. A convex set whose boundary lies in
/// the (convex) domain lies in it entirely.
pub fn validate(shape: &PriorShape, shift: Shift) -> ValidationReport {
    validate_with(&ArcTable::new(shape), shift)
}

fn validate_with(arc: &ArcTable, shift: Shift) -> ValidationReport {
    let mut worst = (f64::INFINITY, (f64::NAN, f64::NAN));
    for k in 0..VALIDATION_SAMPLES {
        let (piece, rho) = arc.locate(k as f64 / VALIDATION_SAMPLES as f64);
        let (x, y) = arc.pieces[piece].eval(rho);
        let p = (x + shift.d0, y + shift.d1);
        let m = domain_margin(p);
        if m < worst.0 || m.is_nan() {
            worst = (m, p);
        }
    }
    ValidationReport {
        worst_margin: worst.0,
        worst_point: worst.1,
        samples: VALIDATION_SAMPLES,
    }
}

/// A prior (or posterior) parameter set: a shape plus its accumulated
/// translation. Immutable; updating returns a new set sharing the boundary
/// tables.
#[derive(Debug, Clone)]
pub struct EtaSet {
    shape: PriorShape,
    shift: Shift,
    arc: Arc<ArcTable>,
}

impl EtaSet {
    pub fn new(shape: PriorShape) -> Result<Self> {
        Self::with_shift(shape, Shift::default())
    }

    /// Set translated by `shift`, e.g. restored from a saved posterior.
    pub fn with_shift(shape: PriorShape, shift: Shift) -> Result<Self> {
        if !(shift.d0 >= 0.0 && shift.d0.is_finite() && shift.d1.is_finite()) {
            return Err(Error::invalid(format!(
                "shift must satisfy d0 >= 0 (got d0 = {}, d1 = {})",
                shift.d0, shift.d1
            )));
        }
        let arc = ArcTable::new(&shape);
        let report = validate_with(&arc, shift);
        if !report.is_ok() {
            return Err(Error::invalid(format!(
                "set leaves the domain |eta1| < (eta0 + 2)/2: margin {} at ({}, {})",
                report.worst_margin, report.worst_point.0, report.worst_point.1
            )));
        }
        Ok(EtaSet {
            shape,
            shift,
            arc: Arc::new(arc),
        })
    }

    pub fn shape(&self) -> &PriorShape {
        &self.shape
    }

    pub fn shift(&self) -> Shift {
        self.shift
    }

    /// Posterior set after observing `d`: the same shape translated by
    /// `(n, s - n/2)`.
    pub fn updated(&self, d: &BinomialData) -> EtaSet {
        let step = Shift::from_data(d);
        EtaSet {
            shape: self.shape,
            shift: Shift {
                d0: self.shift.d0 + step.d0,
                d1: self.shift.d1 + step.d1,
            },
            arc: Arc::clone(&self.arc),
        }
    }

    pub fn contains(&self, (x, y): (f64, f64)) -> bool {
        let eps = 1e-10 * (1.0 + x.abs() + y.abs());
        self.shape.contains_xy((x - self.shift.d0, y - self.shift.d1), eps)
    }

    pub fn contains_point(&self, p: &EtaPoint) -> bool {
        self.contains((p.eta0(), p.eta1()))
    }

    /// Boundary point at `t in [0, 1)`, with `t` allocated by arc length.
    /// `t = 0` is the bow of a boatshape or the top-left corner of a
    /// rectangle; the traversal is clockwise.
    pub fn boundary(&self, t: f64) -> EtaPoint {
        let (x, y) = self.boundary_xy(t);
        EtaPoint::new(x, y).expect("validated sets lie inside the domain")
    }

    pub fn boundary_xy(&self, t: f64) -> (f64, f64) {
        let (piece, rho) = self.arc.locate(t);
        self.piece_point(piece, rho)
    }

    pub(crate) fn piece_point(&self, piece: usize, rho: f64) -> (f64, f64) {
        let (x, y) = self.arc.pieces[piece].eval(rho);
        (x + self.shift.d0, y + self.shift.d1)
    }

    pub(crate) fn piece_count(&self) -> usize {
        self.arc.pieces.len()
    }

    /// Boundary parameters at which the boundary pieces begin (the corners
    /// of a rectangle, the bow and the two stern corners of a boatshape).
    pub fn corner_parameters(&self) -> Vec<f64> {
        self.arc.piece_starts()
    }

    /// Arc length of the boundary.
    pub fn perimeter(&self) -> f64 {
        self.arc.total
    }

    /// Axis-aligned box around the polyline boundary tables.
    pub fn bounding_box(&self) -> ((f64, f64), (f64, f64)) {
        let mut bx = (f64::INFINITY, f64::NEG_INFINITY);
        let mut by = (f64::INFINITY, f64::NEG_INFINITY);
        for piece in 0..self.piece_count() {
            for k in 0..=ARC_SEGMENTS {
                let (x, y) = self.piece_point(piece, k as f64 / ARC_SEGMENTS as f64);
                bx = (bx.0.min(x), bx.1.max(x));
                by = (by.0.min(y), by.1.max(y));
            }
        }
        (bx, by)
    }

    /// Re-checks the translated set against the domain.
    pub fn validate(&self) -> ValidationReport {
        validate_with(&self.arc, self.shift)
    }
}
