//! Continuous gap order parameter, bisection for the attraction/repulsion
//! boundary, and two-parameter regime maps.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::eigen_analysis::{
    analyze_zone, eigen_sweep_on, zone_branches, CrossingClass, ZoneSpec, EPS_MERGE, G_MIN,
    MIN_WINDOW_POINTS,
};
use crate::error::{Error, Result};
use crate::export::{fmt_sig9, write_atomic};
use crate::linalg::eigenvalues;
use crate::model::{effective_hamiltonian, Sweep, SystemConfig};

/// Bisection target for the order parameter, midway inside the
/// intermediate band.
pub const THRESHOLD: f64 = 0.5 * (EPS_MERGE + G_MIN);
/// Bisection stops once the bracket is this narrow (GHz).
pub const BISECTION_TOL: f64 = 1e-4;

const GOLDEN_ITERATIONS: usize = 60;

pub const REGIME_CSV_HEADER: &str = "v1,v2,real_class,imag_class";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    J,
    Gamma,
}

impl std::str::FromStr for Component {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "j" => Ok(Component::J),
            "gamma" => Ok(Component::Gamma),
            other => Err(Error::Parse(format!(
                "coupling component must be j or gamma, got {other:?}"
            ))),
        }
    }
}

/// One real component of one coupling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamSelector {
    pub a: String,
    pub b: String,
    pub component: Component,
}

impl ParamSelector {
    pub fn new(a: impl Into<String>, b: impl Into<String>, component: Component) -> Self {
        Self {
            a: a.into(),
            b: b.into(),
            component,
        }
    }

    pub fn current(&self, config: &SystemConfig) -> f64 {
        let z = config.coupling(&self.a, &self.b);
        match self.component {
            Component::J => z.re,
            Component::Gamma => z.im,
        }
    }

    /// Copy of `config` with the selected component set to `value`; the
    /// other component is kept (zero for a new pair).
    pub fn apply(&self, config: &SystemConfig, value: f64) -> Result<SystemConfig> {
        let z = config.coupling(&self.a, &self.b);
        let (j, gamma) = match self.component {
            Component::J => (value, z.im),
            Component::Gamma => (z.re, value),
        };
        config.with_coupling(&self.a, &self.b, j, gamma)
    }
}

impl std::str::FromStr for ParamSelector {
    type Err = Error;

    /// `A-B:gamma` or `A-B:j`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::Parse(format!(
                "parameter must look like A-B:gamma or A-B:j, got {s:?}"
            ))
        };
        let (pair, component) = s.rsplit_once(':').ok_or_else(bad)?;
        let (a, b) = pair.split_once('-').ok_or_else(bad)?;
        if a.is_empty() || b.is_empty() {
            return Err(bad());
        }
        Ok(Self::new(a, b, component.parse()?))
    }
}

/// Nearest-value assignment of `values` to two targets.
fn pick_pair(values: &[Complex64], ta: Complex64, tb: Complex64) -> (Complex64, Complex64) {
    let ia = (0..values.len())
        .min_by(|&i, &j| (values[i] - ta).norm().total_cmp(&(values[j] - ta).norm()))
        .unwrap_or(0);
    let ib = (0..values.len())
        .filter(|&i| i != ia)
        .min_by(|&i, &j| (values[i] - tb).norm().total_cmp(&(values[j] - tb).norm()))
        .unwrap_or(ia);
    (values[ia], values[ib])
}

/// Minimum real-part separation of the two zone branches over the window.
///
/// The grid minimum is refined by golden-section search between its grid
/// neighbours, so the result does not hinge on where the grid happens to
/// fall relative to the closest approach.
pub fn gap_order_parameter(config: &SystemConfig, zone: &ZoneSpec) -> Result<f64> {
    let fields = zone.window_fields(&config.field_sweep().values());
    if fields.len() < MIN_WINDOW_POINTS {
        return Err(Error::WindowTooNarrow {
            points: fields.len(),
            required: MIN_WINDOW_POINTS,
        });
    }
    let bs = eigen_sweep_on(config, &fields)?;
    let last = fields.len() - 1;
    let (a, b) = zone_branches(&bs, zone, [0, last]);
    let (ba, bb) = (&bs.branches()[a], &bs.branches()[b]);
    let gaps: Vec<f64> = (0..fields.len())
        .map(|i| (ba[i].re - bb[i].re).abs())
        .collect();
    let k = (0..gaps.len())
        .min_by(|&i, &j| gaps[i].total_cmp(&gaps[j]))
        .unwrap_or(0);
    let grid_min = gaps[k];
    if grid_min == 0.0 {
        return Ok(0.0);
    }

    let (lo_i, hi_i) = (k.saturating_sub(1), (k + 1).min(last));
    let lerp = |branch: &[Complex64], h: f64| {
        let seg = if k > 0 && h < fields[k] {
            k - 1
        } else {
            k.min(last - 1)
        };
        let t = (h - fields[seg]) / (fields[seg + 1] - fields[seg]);
        branch[seg] + (branch[seg + 1] - branch[seg]) * t
    };
    let gap_at = |h: f64| -> Result<f64> {
        let ham = effective_hamiltonian(config, h);
        let values = eigenvalues(ham.matrix())
            .map_err(|source| Error::EigenAt { h_koe: h, source })?
            .values;
        let (za, zb) = pick_pair(&values, lerp(ba, h), lerp(bb, h));
        Ok((za.re - zb.re).abs())
    };

    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let (mut x0, mut x3) = (fields[lo_i], fields[hi_i]);
    let mut x1 = x3 - ratio * (x3 - x0);
    let mut x2 = x0 + ratio * (x3 - x0);
    let (mut f1, mut f2) = (gap_at(x1)?, gap_at(x2)?);
    let mut best = grid_min.min(f1).min(f2);
    for _ in 0..GOLDEN_ITERATIONS {
        if f1 < f2 {
            x3 = x2;
            x2 = x1;
            f2 = f1;
            x1 = x3 - ratio * (x3 - x0);
            f1 = gap_at(x1)?;
        } else {
            x0 = x1;
            x1 = x2;
            f1 = f2;
            x2 = x0 + ratio * (x3 - x0);
            f2 = gap_at(x2)?;
        }
        best = best.min(f1).min(f2);
    }
    Ok(best)
}

/// Result of [`find_transition`].
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub critical: f64,
    /// Final bracket.
    pub lo: f64,
    pub hi: f64,
    pub evaluations: usize,
}

/// Bisects `g(v) − THRESHOLD` with the selected coupling component set to
/// `v`, until the bracket is at most [`BISECTION_TOL`] wide.
pub fn find_transition(
    config: &SystemConfig,
    selector: &ParamSelector,
    lo: f64,
    hi: f64,
    zone: &ZoneSpec,
) -> Result<Transition> {
    let g = |v: f64| gap_order_parameter(&selector.apply(config, v)?, zone);
    let (g_lo, g_hi) = (g(lo)?, g(hi)?);
    let (s_lo, s_hi) = (g_lo - THRESHOLD, g_hi - THRESHOLD);
    if s_lo * s_hi > 0.0 || (s_lo == 0.0 && s_hi == 0.0) {
        return Err(Error::NoBracket {
            g_lo,
            g_hi,
            threshold: THRESHOLD,
        });
    }
    let (mut a, mut b) = (lo, hi);
    let mut sign_a = s_lo.signum();
    let mut evaluations = 2;
    while (b - a).abs() > BISECTION_TOL {
        let mid = 0.5 * (a + b);
        let s = g(mid)? - THRESHOLD;
        evaluations += 1;
        if s == 0.0 {
            a = mid;
            b = mid;
            break;
        }
        if s.signum() == sign_a {
            a = mid;
            sign_a = s.signum();
        } else {
            b = mid;
        }
    }
    Ok(Transition {
        critical: 0.5 * (a + b),
        lo: a.min(b),
        hi: a.max(b),
        evaluations,
    })
}

/// One axis of a regime map.
#[derive(Debug, Clone, PartialEq)]
pub struct MapAxis {
    pub selector: ParamSelector,
    pub values: Sweep,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegimeMap {
    pub axis1: MapAxis,
    pub axis2: MapAxis,
    /// Row-major over (axis1, axis2): `labels[i * n2 + j]`.
    pub labels: Vec<(CrossingClass, CrossingClass)>,
}

impl RegimeMap {
    pub fn get(&self, i: usize, j: usize) -> (CrossingClass, CrossingClass) {
        self.labels[i * self.axis2.values.points + j]
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(REGIME_CSV_HEADER);
        out.push('\n');
        let (v1, v2) = (self.axis1.values.values(), self.axis2.values.values());
        for (i, &x) in v1.iter().enumerate() {
            for (j, &y) in v2.iter().enumerate() {
                let (re, im) = self.get(i, j);
                let _ = writeln!(out, "{},{},{re},{im}", fmt_sig9(x), fmt_sig9(y));
            }
        }
        out
    }

    pub fn export_csv(&self, destination: &Path) -> Result<()> {
        write_atomic(destination, self.to_csv().as_bytes())
    }
}

/// Zone labels over a grid of two coupling components, one cell per pair
/// of axis values. Cells are independent and evaluated in parallel.
pub fn regime_map(
    config: &SystemConfig,
    axis1: MapAxis,
    axis2: MapAxis,
    zone: &ZoneSpec,
) -> Result<RegimeMap> {
    if axis1.values.points == 0 || axis2.values.points == 0 {
        return Err(Error::InvalidConfig(
            "regime map axes need at least one point".into(),
        ));
    }
    let (v1, v2) = (axis1.values.values(), axis2.values.values());
    let fields = zone.window_fields(&config.field_sweep().values());
    let cells: Vec<(f64, f64)> = v1
        .iter()
        .flat_map(|&x| v2.iter().map(move |&y| (x, y)))
        .collect();
    let labels = cells
        .par_iter()
        .map(|&(x, y)| {
            let cell = || -> Result<(CrossingClass, CrossingClass)> {
                let cfg = axis2.selector.apply(&axis1.selector.apply(config, x)?, y)?;
                let report = analyze_zone(&eigen_sweep_on(&cfg, &fields)?, zone)?;
                Ok((report.real_class, report.imag_class))
            };
            cell().map_err(|e| Error::AtCell {
                v1: x,
                v2: y,
                source: Box::new(e),
            })
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(RegimeMap {
        axis1,
        axis2,
        labels,
    })
}
