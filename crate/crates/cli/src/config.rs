//! Run configuration: a `key=value` shape record, optionally read from a
//! file, overlaid with command-line flags.

use std::collections::BTreeMap;
use std::path::PathBuf;

use boatset::shapes::{parse_record, set_from_record, shape_from_record};
use boatset::{EtaSet, PriorShape, Shift};
use clap::Args;

use crate::CliError;

/// Shape flags. Each overrides the key of the same name (with `-` read as
/// `_`) in the shape config.
#[derive(Debug, Clone, Default, Args)]
pub struct ShapeArgs {
    /// Flat key=value file with the shape and, optionally, run keys
    /// (n, s, gamma, grid, s_min, s_max, s_step)
    #[arg(long, value_name = "PATH")]
    pub shape_config: Option<PathBuf>,
    /// boat, rectangle or segment
    #[arg(long)]
    pub kind: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub eta0_lo: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub eta0_hi: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub y_c: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub n_lo: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub n_hi: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub y_lo: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub y_hi: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub n0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub shift0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub shift1: Option<f64>,
}

/// Merged record of config file and flags.
pub struct Record(BTreeMap<String, String>);

impl Record {
    pub fn load(shape: &ShapeArgs, run: &[(&str, Option<f64>)]) -> Result<Self, CliError> {
        let mut map = match &shape.shape_config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
                parse_record(&text)?
            }
            None => BTreeMap::new(),
        };
        if let Some(kind) = &shape.kind {
            map.insert("kind".into(), kind.clone());
        }
        let numeric = [
            ("eta0_lo", shape.eta0_lo),
            ("eta0_hi", shape.eta0_hi),
            ("a", shape.a),
            ("b", shape.b),
            ("y_c", shape.y_c),
            ("n_lo", shape.n_lo),
            ("n_hi", shape.n_hi),
            ("y_lo", shape.y_lo),
            ("y_hi", shape.y_hi),
            ("n0", shape.n0),
            ("shift0", shape.shift0),
            ("shift1", shape.shift1),
        ];
        for (key, value) in numeric.iter().chain(run) {
            if let Some(v) = value {
                map.insert(key.to_string(), v.to_string());
            }
        }
        Ok(Record(map))
    }

    pub fn set(&self) -> Result<EtaSet, CliError> {
        Ok(set_from_record(&self.0)?)
    }

    pub fn unchecked_shape(&self) -> Result<(PriorShape, Shift), CliError> {
        Ok(shape_from_record(&self.0)?)
    }

    pub fn number(&self, key: &str) -> Result<Option<f64>, CliError> {
        match self.0.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|_| CliError::Input(format!("{key}: not a number: {raw:?}"))),
        }
    }

    pub fn required(&self, key: &str) -> Result<f64, CliError> {
        self.number(key)?
            .ok_or_else(|| CliError::Input(format!("missing {key} (flag --{} or config key {key})", key.replace('_', "-"))))
    }
}
