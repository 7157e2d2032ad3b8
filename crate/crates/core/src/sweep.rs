//! Posterior mean bounds as functions of the number of successes `s` at a
//! fixed sample size `n`.

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::params::BinomialData;
use crate::shapes::{EtaSet, PriorShape};
use crate::touchpoint::{agreement_thresholds, shadow_with, AgreementThresholds, LearningPhase};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub s: f64,
    pub y_lo: f64,
    pub y_hi: f64,
    pub delta: f64,
    pub tp_lo: f64,
    pub tp_hi: f64,
    pub phase: Option<LearningPhase>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub n: f64,
    pub rows: Vec<SweepRow>,
    /// Present for axial boatshapes only.
    pub thresholds: Option<AgreementThresholds>,
}

/// `s_min, s_min + step, ...` up to `s_max` (inclusive, with a little slack
/// for rounding). Empty when `s_min > s_max`.
pub fn s_grid(s_min: f64, s_max: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::invalid(format!("sweep step must be > 0 (got {step})")));
    }
    if !s_min.is_finite() || !s_max.is_finite() {
        return Err(Error::invalid("sweep range must be finite"));
    }
    if s_min > s_max {
        return Ok(Vec::new());
    }
    let count = ((s_max - s_min) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|k| s_min + k as f64 * step).collect())
}

/// Updates `set` with `(n, s)` for every `s` in `s_values`. Rows come back
/// in the order of `s_values`.
pub fn sweep(set: &EtaSet, n: f64, s_values: &[f64], exec: Execution) -> Result<Sweep> {
    let data: Vec<BinomialData> = s_values
        .iter()
        .map(|&s| BinomialData::new(n, s))
        .collect::<Result<_>>()?;
    let rows = exec
        .map(data.len(), |k| {
            let sh = shadow_with(&set.updated(&data[k]), Execution::Sequential)?;
            Ok(SweepRow {
                s: data[k].s(),
                y_lo: sh.y_lo,
                y_hi: sh.y_hi,
                delta: sh.delta(),
                tp_lo: sh.tp_lo,
                tp_hi: sh.tp_hi,
                phase: sh.phase,
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let thresholds = match set.shape() {
        PriorShape::Boat(spec) if spec.is_axial() && set.shift().d0 == 0.0 && set.shift().d1 == 0.0 => {
            Some(agreement_thresholds(spec, n)?)
        }
        _ => None,
    };
    Ok(Sweep { n, rows, thresholds })
}
