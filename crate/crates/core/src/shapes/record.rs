//! Flat `key=value` records for shape specifications.
//!
//! ```text
//! # boatshape with interior prior touchpoints
//! kind=boat
//! eta0_lo=1
//! eta0_hi=6
//! a=1.5
//! b=0.9
//! y_c=0.5
//! ```
//!
//! One pair per line, `#` starts a comment, surrounding whitespace is
//! ignored. `kind` is `boat`, `rectangle` or `segment`; the numeric keys are
//! `eta0_lo eta0_hi a b y_c` (boat, `y_c` defaults to 0.5),
//! `n_lo n_hi y_lo y_hi` (rectangle) and `n0 y_lo y_hi` (segment). The
//! optional `shift0` and `shift1` hold the translation accumulated by
//! updates. Values are written in shortest round-trip form, so a record
//! reproduces the set bit for bit.

use std::collections::BTreeMap;

use super::{BoatshapeSpec, EtaSet, LineSegmentSpec, PriorShape, RectangleSpec, Shift};
use crate::error::{Error, Result};

pub fn parse_record(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::invalid(format!("line {}: expected key=value, got {raw:?}", lineno + 1)))?;
        let key = key.trim().to_string();
        if map.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(Error::invalid(format!("line {}: duplicate key {key}", lineno + 1)));
        }
    }
    Ok(map)
}

fn number(map: &BTreeMap<String, String>, key: &str) -> Result<f64> {
    let raw = map
        .get(key)
        .ok_or_else(|| Error::invalid(format!("missing key {key}")))?;
    raw.parse::<f64>()
        .map_err(|_| Error::invalid(format!("{key}: not a number: {raw:?}")))
}

fn number_or(map: &BTreeMap<String, String>, key: &str, default: f64) -> Result<f64> {
    if map.contains_key(key) {
        number(map, key)
    } else {
        Ok(default)
    }
}

/// Builds the set described by the shape keys of `map`; other keys are ignored.
pub fn set_from_record(map: &BTreeMap<String, String>) -> Result<EtaSet> {
    let (shape, shift) = shape_from_record(map)?;
    EtaSet::with_shift(shape, shift)
}

/// Shape and shift of a record, checked field by field but not against the
/// domain.
pub fn shape_from_record(map: &BTreeMap<String, String>) -> Result<(PriorShape, Shift)> {
    let kind = map
        .get("kind")
        .ok_or_else(|| Error::invalid("missing key kind"))?;
    let shape = match kind.as_str() {
        "boat" => PriorShape::Boat(BoatshapeSpec::new(
            number(map, "eta0_lo")?,
            number(map, "eta0_hi")?,
            number(map, "a")?,
            number(map, "b")?,
            number_or(map, "y_c", 0.5)?,
        )?),
        "rectangle" => PriorShape::Rectangle(RectangleSpec::new(
            number(map, "n_lo")?,
            number(map, "n_hi")?,
            number(map, "y_lo")?,
            number(map, "y_hi")?,
        )?),
        "segment" => PriorShape::Segment(LineSegmentSpec::new(
            number(map, "n0")?,
            number(map, "y_lo")?,
            number(map, "y_hi")?,
        )?),
        other => {
            return Err(Error::invalid(format!(
                "kind must be one of boat, rectangle, segment (got {other:?})"
            )))
        }
    };
    let shift = Shift {
        d0: number_or(map, "shift0", 0.0)?,
        d1: number_or(map, "shift1", 0.0)?,
    };
    Ok((shape, shift))
}

pub fn set_to_record(set: &EtaSet) -> String {
    let mut fields: Vec<(&str, f64)> = match set.shape() {
        PriorShape::Boat(b) => vec![
            ("eta0_lo", b.eta0_lo()),
            ("eta0_hi", b.eta0_hi()),
            ("a", b.a()),
            ("b", b.b()),
            ("y_c", b.y_c()),
        ],
        PriorShape::Rectangle(r) => vec![("n_lo", r.n_lo()), ("n_hi", r.n_hi()), ("y_lo", r.y_lo()), ("y_hi", r.y_hi())],
        PriorShape::Segment(s) => vec![("n0", s.n0()), ("y_lo", s.y_lo()), ("y_hi", s.y_hi())],
    };
    fields.push(("shift0", set.shift().d0));
    fields.push(("shift1", set.shift().d1));
    let mut out = format!("kind={}\n", set.shape().kind());
    for (key, value) in fields {
        out.push_str(&format!("{key}={value}\n"));
    }
    out
}
