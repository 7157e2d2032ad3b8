//! Brute-force reference values computed on dense grids.
//!
//! The grid is a regular lattice over the bounding box of the set,
//! `(resolution + 1)^2` points, together with `4 * resolution` boundary
//! samples equally spaced in arc length and the corners of the boundary
//! (rectangle vertices, bow and stern of a boatshape). Doubling the resolution keeps
//! every previous point, so the envelopes computed here can only widen
//! towards the true values.

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::inference::{central_interval, BetaShape, CredibilityUnion};
use crate::params::{in_domain, BinomialData};
use crate::shapes::EtaSet;

/// Resolution used when none is given.
pub const DEFAULT_RESOLUTION: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    resolution: usize,
    margin: f64,
    exec: Execution,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            resolution: DEFAULT_RESOLUTION,
            margin: 1e-9,
            exec: Execution::default(),
        }
    }
}

impl GridSpec {
    pub fn new(resolution: usize) -> Result<Self> {
        if resolution < 2 {
            return Err(Error::invalid(format!("grid resolution must be >= 2 (got {resolution})")));
        }
        Ok(GridSpec {
            resolution,
            ..GridSpec::default()
        })
    }

    /// Points closer than `margin` to the edge of the domain are skipped.
    pub fn with_margin(self, margin: f64) -> Result<Self> {
        if !(margin > 0.0 && margin.is_finite()) {
            return Err(Error::invalid(format!("grid margin must be > 0 (got {margin})")));
        }
        Ok(GridSpec { margin, ..self })
    }

    pub fn with_execution(self, exec: Execution) -> Self {
        GridSpec { exec, ..self }
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    fn lattice_len(&self) -> usize {
        (self.resolution + 1) * (self.resolution + 1)
    }

    fn boundary_len(&self) -> usize {
        4 * self.resolution
    }
}

struct Members<'a> {
    set: &'a EtaSet,
    g: &'a GridSpec,
    bbox: ((f64, f64), (f64, f64)),
    corners: Vec<f64>,
}

impl<'a> Members<'a> {
    fn new(set: &'a EtaSet, g: &'a GridSpec) -> Self {
        Members {
            set,
            g,
            bbox: set.bounding_box(),
            corners: set.corner_parameters(),
        }
    }

    fn len(&self) -> usize {
        self.g.lattice_len() + self.g.boundary_len() + self.corners.len()
    }

    fn get(&self, k: usize) -> Option<(f64, f64)> {
        let extra = self.g.lattice_len() + self.g.boundary_len();
        if k >= extra {
            return Some(self.set.boundary_xy(self.corners[k - extra]));
        }
        member(self.set, self.g, self.bbox, k)
    }
}

/// Grid member `k`: lattice points first, then boundary samples. `None` for
/// lattice points outside the set or within `margin` of the domain edge.
fn member(set: &EtaSet, g: &GridSpec, bbox: ((f64, f64), (f64, f64)), k: usize) -> Option<(f64, f64)> {
    let lattice = g.lattice_len();
    let p = if k < lattice {
        let m = g.resolution;
        let ((x0, x1), (y0, y1)) = bbox;
        let (i, j) = (k / (m + 1), k % (m + 1));
        let p = (
            x0 + i as f64 * ((x1 - x0) / m as f64),
            y0 + j as f64 * ((y1 - y0) / m as f64),
        );
        let clear = in_domain(p.0 - g.margin, p.1.abs() + g.margin);
        if !clear || !set.contains(p) {
            return None;
        }
        p
    } else {
        set.boundary_xy((k - lattice) as f64 / g.boundary_len() as f64)
    };
    Some(p)
}

fn expectation((x, y): (f64, f64)) -> f64 {
    y / (x + 2.0) + 0.5
}

/// Range of prior (or posterior) means over the grid members of `set`.
pub fn grid_shadow(set: &EtaSet, g: &GridSpec) -> Result<(f64, f64)> {
    let members = Members::new(set, g);
    g.exec
        .extrema(members.len(), |k| members.get(k).map(expectation).map(|y| (y, y)))
        .map(|e| (e.min, e.max))
        .ok_or(Error::EmptyGrid)
}

pub fn grid_delta(set: &EtaSet, d: &BinomialData, g: &GridSpec) -> Result<f64> {
    let (lo, hi) = grid_shadow(&set.updated(d), g)?;
    Ok(hi - lo)
}

/// Envelope of the central `gamma` intervals over the grid members of the
/// updated set.
pub fn grid_credibility_union(set: &EtaSet, d: &BinomialData, gamma: f64, g: &GridSpec) -> Result<CredibilityUnion> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::invalid(format!("gamma must satisfy 0 < gamma < 1 (got {gamma})")));
    }
    let post = set.updated(d);
    let members = Members::new(&post, g);
    let intervals = g.exec.map(members.len(), |k| {
        members
            .get(k)
            .map(|(x, y)| BetaShape::from_eta(x, y).and_then(|b| central_interval(&b, gamma)))
            .transpose()
    });
    let mut env: Option<(f64, f64)> = None;
    for iv in intervals {
        if let Some((lo, hi)) = iv? {
            env = Some(env.map_or((lo, hi), |(a, b)| (a.min(lo), b.max(hi))));
        }
    }
    let (lo, hi) = env.ok_or(Error::EmptyGrid)?;
    Ok(CredibilityUnion { lo, hi, gamma })
}
