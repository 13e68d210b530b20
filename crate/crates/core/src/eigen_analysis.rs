//! Eigenvalue branches over the field sweep and classification of
//! tunable/static crossing zones.

use std::fmt;
use std::fmt::Write as _;
use std::path::Path;

use itertools::Itertools;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::export::{fmt_sig9, write_atomic};
use crate::linalg::eigenvalues;
use crate::model::{effective_hamiltonian, FrequencyLaw, SystemConfig};

/// Separation (GHz) below which two branches count as merged.
pub const EPS_MERGE: f64 = 3e-3;
/// Separation (GHz) that every window point must keep for repulsion.
pub const G_MIN: f64 = 1.5e-2;
/// Shortest merged stretch (kOe) that counts as attraction rather than a
/// single touch. Two steps of a 0.01 kOe grid.
pub const MIN_MERGE_WIDTH: f64 = 0.02;
/// Fewest field points a zone window may hold.
pub const MIN_WINDOW_POINTS: usize = 7;
/// Default zone half-width in units of the static mode's linewidth,
/// converted to field through the tunable slope.
pub const WINDOW_LINEWIDTHS: f64 = 25.0;

const EXHAUSTIVE_PAIRING_MAX: usize = 6;

pub const BRANCH_CSV_HEADER: &str = "h_koe,branch,re_ghz,im_ghz";

/// Continuity-tracked eigenvalue branches, one value per field point each.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchSet {
    field_values: Vec<f64>,
    branches: Vec<Vec<Complex64>>,
}

impl BranchSet {
    pub fn field_values(&self) -> &[f64] {
        &self.field_values
    }

    pub fn branches(&self) -> &[Vec<Complex64>] {
        &self.branches
    }

    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    /// All branch values at one field index.
    pub fn at(&self, field_index: usize) -> Vec<Complex64> {
        self.branches.iter().map(|b| b[field_index]).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(BRANCH_CSV_HEADER);
        out.push('\n');
        for (i, &h) in self.field_values.iter().enumerate() {
            for (k, branch) in self.branches.iter().enumerate() {
                let z = branch[i];
                let _ = writeln!(
                    out,
                    "{},{k},{},{}",
                    fmt_sig9(h),
                    fmt_sig9(z.re),
                    fmt_sig9(z.im)
                );
            }
        }
        out
    }

    pub fn export_csv(&self, destination: &Path) -> Result<()> {
        write_atomic(destination, self.to_csv().as_bytes())
    }
}

/// Raw (unordered) eigenvalues at each field value, computed in parallel.
pub fn raw_eigenvalues(config: &SystemConfig, field_values: &[f64]) -> Result<Vec<Vec<Complex64>>> {
    field_values
        .par_iter()
        .map(|&h| {
            let ham = effective_hamiltonian(config, h);
            eigenvalues(ham.matrix())
                .map(|r| r.values)
                .map_err(|source| Error::EigenAt { h_koe: h, source })
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

fn squared_distance(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm_sqr()
}

/// `perm[k]` is the index in `next` continuing branch `k`, chosen to minimize
/// the summed squared displacement.
fn pair_with_previous(prev: &[Complex64], next: &[Complex64]) -> Vec<usize> {
    let n = prev.len();
    if n <= EXHAUSTIVE_PAIRING_MAX {
        let mut best = (f64::INFINITY, (0..n).collect::<Vec<_>>());
        for perm in (0..n).permutations(n) {
            let cost: f64 = perm
                .iter()
                .enumerate()
                .map(|(k, &j)| squared_distance(prev[k], next[j]))
                .sum();
            if cost < best.0 {
                best = (cost, perm);
            }
        }
        return best.1;
    }
    // repeatedly commit the closest remaining (branch, value) pair
    let mut candidates: Vec<(f64, usize, usize)> = (0..n)
        .flat_map(|k| (0..n).map(move |j| (k, j)))
        .map(|(k, j)| (squared_distance(prev[k], next[j]), k, j))
        .collect();
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut perm = vec![usize::MAX; n];
    let mut taken = vec![false; n];
    for (_, k, j) in candidates {
        if perm[k] == usize::MAX && !taken[j] {
            perm[k] = j;
            taken[j] = true;
        }
    }
    perm
}

/// Orders raw eigenvalue sets into continuous branches. The first point is
/// sorted by real then imaginary part; later points are paired against a
/// linear extrapolation of the last two, so branches that cross cleanly
/// keep their identity.
pub fn track_branches(field_values: Vec<f64>, raw: Vec<Vec<Complex64>>) -> BranchSet {
    let n = raw.first().map_or(0, Vec::len);
    let mut branches: Vec<Vec<Complex64>> = vec![Vec::with_capacity(raw.len()); n];
    for (i, values) in raw.into_iter().enumerate() {
        let ordered: Vec<Complex64> = if i == 0 {
            let mut v = values;
            v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
            v
        } else {
            let predicted: Vec<Complex64> = branches
                .iter()
                .map(|b| {
                    if i >= 2 {
                        let (h0, h1, h2) =
                            (field_values[i - 2], field_values[i - 1], field_values[i]);
                        let t = if h1 != h0 { (h2 - h1) / (h1 - h0) } else { 0.0 };
                        b[i - 1] + (b[i - 1] - b[i - 2]) * t
                    } else {
                        b[i - 1]
                    }
                })
                .collect();
            pair_with_previous(&predicted, &values)
                .into_iter()
                .map(|j| values[j])
                .collect()
        };
        for (branch, &z) in branches.iter_mut().zip(&ordered) {
            branch.push(z);
        }
    }
    BranchSet {
        field_values,
        branches,
    }
}

/// Tracked branches on an arbitrary ascending list of field values.
pub fn eigen_sweep_on(config: &SystemConfig, field_values: &[f64]) -> Result<BranchSet> {
    let raw = raw_eigenvalues(config, field_values)?;
    Ok(track_branches(field_values.to_vec(), raw))
}

/// Tracked branches over the configured field sweep.
pub fn eigen_sweep(config: &SystemConfig) -> Result<BranchSet> {
    eigen_sweep_on(config, &config.field_sweep().values())
}

/// Neighbourhood of one tunable/static crossing.
#[derive(Debug, Clone, PartialEq)]
pub struct ZoneSpec {
    pub tunable: String,
    pub fixed: String,
    /// Field where the uncoupled frequencies coincide.
    pub center_field: f64,
    /// Half-width in kOe.
    pub window: f64,
    pub crossing_frequency: f64,
    pub slope: f64,
    pub intercept: f64,
}

impl ZoneSpec {
    pub fn label(&self) -> String {
        format!("{}-{}", self.tunable, self.fixed)
    }

    pub fn with_window(&self, window: f64) -> Self {
        Self {
            window,
            ..self.clone()
        }
    }

    pub fn bounds(&self) -> (f64, f64) {
        (
            self.center_field - self.window,
            self.center_field + self.window,
        )
    }

    pub fn contains(&self, h: f64) -> bool {
        let (lo, hi) = self.bounds();
        let slack = 1e-9 * self.window.max(1.0);
        h >= lo - slack && h <= hi + slack
    }

    pub fn tunable_frequency(&self, h: f64) -> f64 {
        self.slope * h + self.intercept
    }

    /// Field values of `sweep_values` inside the window.
    pub fn window_fields(&self, sweep_values: &[f64]) -> Vec<f64> {
        sweep_values
            .iter()
            .copied()
            .filter(|&h| self.contains(h))
            .collect()
    }
}

/// Locates the crossing between the field-linear and the static mode of a
/// pair. The window is `WINDOW_LINEWIDTHS` static linewidths wide in
/// frequency, shrunk to half the distance to the tunable mode's nearest
/// other crossing and to the sweep range.
pub fn identify_zone(config: &SystemConfig, a: &str, b: &str) -> Result<ZoneSpec> {
    let find = |name: &str| {
        config
            .mode(name)
            .ok_or_else(|| Error::InvalidConfig(format!("zone names unknown mode {name:?}")))
    };
    let (ma, mb) = (find(a)?, find(b)?);
    let (tunable, fixed) = match (ma.frequency.is_tunable(), mb.frequency.is_tunable()) {
        (true, false) => (ma, mb),
        (false, true) => (mb, ma),
        _ => {
            return Err(Error::InvalidConfig(format!(
                "zone {a}-{b} needs exactly one field-linear mode"
            )))
        }
    };
    let FrequencyLaw::FieldLinear { slope, intercept } = tunable.frequency else {
        unreachable!()
    };
    let FrequencyLaw::Static { value } = fixed.frequency else {
        unreachable!()
    };
    let no_solution = || Error::NoSolution {
        tunable: tunable.name.clone(),
        fixed: fixed.name.clone(),
    };
    if slope == 0.0 {
        return Err(no_solution());
    }
    let center = (value - intercept) / slope;
    let sweep = config.field_sweep();
    let (lo, hi) = (sweep.start.min(sweep.stop), sweep.start.max(sweep.stop));
    if !(center >= lo && center <= hi) {
        return Err(no_solution());
    }

    let mut window = WINDOW_LINEWIDTHS * fixed.linewidth() / slope.abs();
    for other in config.modes() {
        if other.name == fixed.name {
            continue;
        }
        if let FrequencyLaw::Static { value: w } = other.frequency {
            let h = (w - intercept) / slope;
            let half = 0.5 * (h - center).abs();
            if half > 0.0 {
                window = window.min(half);
            }
        }
    }
    window = window.min((hi - lo).max(0.0));

    Ok(ZoneSpec {
        tunable: tunable.name.clone(),
        fixed: fixed.name.clone(),
        center_field: center,
        window,
        crossing_frequency: value,
        slope,
        intercept,
    })
}

/// Every tunable/static crossing inside the sweep, ordered by field.
pub fn all_zones(config: &SystemConfig) -> Vec<ZoneSpec> {
    let mut zones: Vec<ZoneSpec> = config
        .modes()
        .iter()
        .filter(|t| t.frequency.is_tunable())
        .flat_map(|t| {
            config
                .modes()
                .iter()
                .filter(|s| !s.frequency.is_tunable())
                .filter_map(|s| identify_zone(config, &t.name, &s.name).ok())
        })
        .collect();
    zones.sort_by(|a, b| a.center_field.total_cmp(&b.center_field));
    zones
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CrossingClass {
    Attraction,
    Repulsion,
    Intermediate,
}

impl CrossingClass {
    pub fn as_str(self) -> &'static str {
        match self {
            CrossingClass::Attraction => "Attraction",
            CrossingClass::Repulsion => "Repulsion",
            CrossingClass::Intermediate => "Intermediate",
        }
    }
}

impl fmt::Display for CrossingClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for CrossingClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Attraction" => Ok(CrossingClass::Attraction),
            "Repulsion" => Ok(CrossingClass::Repulsion),
            "Intermediate" => Ok(CrossingClass::Intermediate),
            other => Err(Error::Parse(format!("unknown crossing class {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    Real,
    Imag,
}

impl Part {
    fn of(self, z: Complex64) -> f64 {
        match self {
            Part::Real => z.re,
            Part::Imag => z.im,
        }
    }
}

/// Classification of one part (real or imaginary) of a zone.
#[derive(Debug, Clone, PartialEq)]
pub struct PartReport {
    pub class: CrossingClass,
    pub min_gap: f64,
    /// Longest contiguous stretch (kOe) with separation ≤ [`EPS_MERGE`].
    pub merged_interval: f64,
    /// Indices of the two participating branches.
    pub branches: (usize, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZoneReport {
    pub zone: ZoneSpec,
    pub real_class: CrossingClass,
    pub imag_class: CrossingClass,
    pub min_gap_real: f64,
    pub min_gap_imag: f64,
    pub merged_interval_real: f64,
    pub merged_interval_imag: f64,
}

/// Indices of the branch-set points inside the zone window.
fn window_indices(branchset: &BranchSet, zone: &ZoneSpec) -> Result<Vec<usize>> {
    let idx: Vec<usize> = (0..branchset.field_values.len())
        .filter(|&i| zone.contains(branchset.field_values[i]))
        .collect();
    if idx.len() < MIN_WINDOW_POINTS {
        return Err(Error::WindowTooNarrow {
            points: idx.len(),
            required: MIN_WINDOW_POINTS,
        });
    }
    Ok(idx)
}

/// Picks the two branches that sit on the bare tunable and static
/// frequencies at the window edges, where hybridization is weakest.
pub(crate) fn zone_branches(
    branchset: &BranchSet,
    zone: &ZoneSpec,
    edges: [usize; 2],
) -> (usize, usize) {
    let n = branchset.len();
    let mut best = (f64::INFINITY, (0, 1.min(n.saturating_sub(1))));
    for (i, j) in (0..n).tuple_combinations() {
        let score: f64 = edges
            .iter()
            .map(|&e| {
                let h = branchset.field_values[e];
                let (wt, ws) = (zone.tunable_frequency(h), zone.crossing_frequency);
                let (ri, rj) = (branchset.branches[i][e].re, branchset.branches[j][e].re);
                ((ri - wt).abs() + (rj - ws).abs()).min((ri - ws).abs() + (rj - wt).abs())
            })
            .sum();
        if score < best.0 {
            best = (score, (i, j));
        }
    }
    best.1
}

/// Length of the longest run where the piecewise-linear `d(h)` stays at or
/// below `eps`.
pub fn longest_merged_run(fields: &[f64], gaps: &[f64], eps: f64) -> f64 {
    let mut best: f64 = 0.0;
    let mut run: f64 = 0.0;
    for k in 1..fields.len() {
        let (h0, h1) = (fields[k - 1], fields[k]);
        let (d0, d1) = (gaps[k - 1], gaps[k]);
        let span = h1 - h0;
        match (d0 <= eps, d1 <= eps) {
            (true, true) => run += span,
            (true, false) => {
                run += span * (eps - d0) / (d1 - d0);
                best = best.max(run);
                run = 0.0;
            }
            (false, true) => run = span * (eps - d1) / (d0 - d1),
            (false, false) => run = 0.0,
        }
        best = best.max(run);
    }
    best
}

pub fn classify_gaps(fields: &[f64], gaps: &[f64]) -> (CrossingClass, f64, f64) {
    let min_gap = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    let merged = longest_merged_run(fields, gaps, EPS_MERGE);
    let class = if merged >= MIN_MERGE_WIDTH {
        CrossingClass::Attraction
    } else if min_gap >= G_MIN {
        CrossingClass::Repulsion
    } else {
        CrossingClass::Intermediate
    };
    (class, min_gap, merged)
}

/// Classifies one part of a zone from the separation of its two branches.
pub fn classify_zone(branchset: &BranchSet, zone: &ZoneSpec, part: Part) -> Result<PartReport> {
    let idx = window_indices(branchset, zone)?;
    let (a, b) = zone_branches(branchset, zone, [idx[0], idx[idx.len() - 1]]);
    let fields: Vec<f64> = idx.iter().map(|&i| branchset.field_values[i]).collect();
    let gaps: Vec<f64> = idx
        .iter()
        .map(|&i| (part.of(branchset.branches[a][i]) - part.of(branchset.branches[b][i])).abs())
        .collect();
    let (class, min_gap, merged_interval) = classify_gaps(&fields, &gaps);
    Ok(PartReport {
        class,
        min_gap,
        merged_interval,
        branches: (a, b),
    })
}

/// Both parts of a zone.
pub fn analyze_zone(branchset: &BranchSet, zone: &ZoneSpec) -> Result<ZoneReport> {
    let re = classify_zone(branchset, zone, Part::Real)?;
    let im = classify_zone(branchset, zone, Part::Imag)?;
    Ok(ZoneReport {
        zone: zone.clone(),
        real_class: re.class,
        imag_class: im.class,
        min_gap_real: re.min_gap,
        min_gap_imag: im.min_gap,
        merged_interval_real: re.merged_interval,
        merged_interval_imag: im.merged_interval,
    })
}

/// Sweeps only the zone window of the configured field grid and classifies it.
pub fn analyze_zone_of(config: &SystemConfig, zone: &ZoneSpec) -> Result<ZoneReport> {
    let fields = zone.window_fields(&config.field_sweep().values());
    let branches = eigen_sweep_on(config, &fields)?;
    analyze_zone(&branches, zone)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CouplingSpec, ModeSpec, Sweep};

    fn two_mode(gamma: f64, beta_m: f64, beta_p: f64) -> SystemConfig {
        SystemConfig::new(
            vec![
                ModeSpec::tunable("M", 0.714, 2.714, 2e-5, beta_m),
                ModeSpec::fixed("P", 3.5, 2e-3, beta_p),
            ],
            vec![CouplingSpec::dissipative("M", "P", gamma)],
            Sweep::new(0.0, 3.0, 301),
            Sweep::new(2.5, 5.0, 11),
        )
        .unwrap()
    }

    #[test]
    fn static_config_gives_constant_branches() {
        let cfg = SystemConfig::new(
            vec![
                ModeSpec::fixed("A", 3.4, 2e-3, 1.8e-2),
                ModeSpec::fixed("B", 4.1, 2e-3, 1.8e-2),
            ],
            vec![CouplingSpec::new("A", "B", 0.05, 0.01)],
            Sweep::new(0.0, 3.0, 31),
            Sweep::new(3.0, 4.0, 3),
        )
        .unwrap();
        let bs = eigen_sweep(&cfg).unwrap();
        for branch in bs.branches() {
            assert!(branch.iter().all(|z| (z - branch[0]).norm() < 1e-12));
        }
    }

    #[test]
    fn uncoupled_branches_cross_freely() {
        let bs = eigen_sweep(&two_mode(0.0, 0.0, 0.0)).unwrap();
        let fields = bs.field_values().to_vec();
        // one branch follows the magnon line through the crossing, the other stays flat
        let lines: Vec<bool> = bs
            .branches()
            .iter()
            .map(|b| {
                b.iter()
                    .zip(&fields)
                    .all(|(z, &h)| (z.re - (0.714 * h + 2.714)).abs() < 1e-9)
            })
            .collect();
        assert_eq!(lines.iter().filter(|&&x| x).count(), 1);
        let flat = bs
            .branches()
            .iter()
            .filter(|b| b.iter().all(|z| (z.re - 3.5).abs() < 1e-9))
            .count();
        assert_eq!(flat, 1);
    }

    #[test]
    fn tracked_values_are_the_raw_multiset() {
        let cfg = two_mode(0.05, 1.8e-4, 1.8e-2);
        let fields = cfg.field_sweep().values();
        let raw = raw_eigenvalues(&cfg, &fields).unwrap();
        let bs = track_branches(fields, raw.clone());
        for (i, values) in raw.iter().enumerate() {
            let mut tracked = bs.at(i);
            for v in values {
                let k = tracked.iter().position(|t| (t - v).norm() < 1e-9).unwrap();
                tracked.remove(k);
            }
        }
    }

    #[test]
    fn greedy_pairing_matches_exhaustive_on_separated_sets() {
        let prev: Vec<Complex64> = (0..8).map(|k| Complex64::new(k as f64, -0.1)).collect();
        let next: Vec<Complex64> = [3, 1, 7, 0, 2, 6, 4, 5]
            .iter()
            .map(|&k| Complex64::new(k as f64 + 0.01, -0.1))
            .collect();
        let perm = pair_with_previous(&prev, &next);
        for (k, &j) in perm.iter().enumerate() {
            assert!((next[j].re - k as f64).abs() < 0.1);
        }
    }

    #[test]
    fn zone_centers() {
        let base = two_mode(0.1, 1.8e-4, 1.8e-2);
        let z = identify_zone(&base, "M", "P").unwrap();
        assert!((z.center_field - 1.1008).abs() < 1e-3);
        let z2 = identify_zone(&base, "P", "M").unwrap();
        assert_eq!(z, z2);
        assert!((z.window - 25.0 * 0.02 / 0.714).abs() < 1e-12);

        let far = SystemConfig::new(
            vec![
                ModeSpec::tunable("M", 0.714, 2.714, 0.0, 0.0),
                ModeSpec::fixed("P", 10.0, 0.0, 0.0),
            ],
            vec![],
            Sweep::new(0.2, 3.2, 11),
            Sweep::new(3.0, 4.0, 2),
        )
        .unwrap();
        assert!(matches!(
            identify_zone(&far, "M", "P"),
            Err(Error::NoSolution { .. })
        ));
        assert!(identify_zone(&far, "M", "X").is_err());
    }

    #[test]
    fn window_capped_by_neighbouring_crossing() {
        let cfg = SystemConfig::new(
            vec![
                ModeSpec::tunable("M", 0.714, 2.714, 2e-5, 1.8e-4),
                ModeSpec::fixed("P1", 3.5, 2e-3, 1.8e-2),
                ModeSpec::fixed("P2", 3.7, 2e-3, 1.8e-2),
            ],
            vec![],
            Sweep::new(0.0, 3.0, 301),
            Sweep::new(3.0, 4.0, 2),
        )
        .unwrap();
        let z = identify_zone(&cfg, "M", "P1").unwrap();
        assert!((z.window - 0.5 * 0.2 / 0.714).abs() < 1e-12);
    }

    #[test]
    fn narrow_window_rejected() {
        let cfg = two_mode(0.1, 1.8e-4, 1.8e-2);
        let zone = identify_zone(&cfg, "M", "P").unwrap().with_window(0.02);
        let bs = eigen_sweep(&cfg).unwrap();
        assert!(matches!(
            classify_zone(&bs, &zone, Part::Real),
            Err(Error::WindowTooNarrow { required: 7, .. })
        ));
    }

    #[test]
    fn merged_run_interpolates() {
        let h = [0.0, 1.0, 2.0, 3.0, 4.0];
        assert_eq!(longest_merged_run(&h, &[1.0, 0.0, 0.0, 0.0, 1.0], 0.5), 3.0);
        assert_eq!(longest_merged_run(&h, &[1.0, 1.0, 1.0, 1.0, 1.0], 0.5), 0.0);
        // V-shaped touch: 0.5 on each side of the minimum
        assert!((longest_merged_run(&h, &[2.0, 1.0, 0.0, 1.0, 2.0], 0.5) - 1.0).abs() < 1e-12);
        assert_eq!(longest_merged_run(&h, &[0.0; 5], 0.5), 4.0);
    }

    #[test]
    fn uncoupled_limit_labels() {
        // no coupling, no feedline damping: a clean V-shaped real crossing
        // and a constant linewidth difference of 2e-3 − 2e-5
        let cfg = two_mode(0.0, 0.0, 0.0);
        let zone = identify_zone(&two_mode(0.0, 1.8e-4, 1.8e-2), "M", "P").unwrap();
        let bs = eigen_sweep(&cfg).unwrap();
        let re = classify_zone(&bs, &zone, Part::Real).unwrap();
        assert_eq!(re.class, CrossingClass::Intermediate);
        assert!(re.min_gap < 2e-3);
        let im = classify_zone(&bs, &zone, Part::Imag).unwrap();
        assert!((im.min_gap - (2e-3 - 2e-5)).abs() < 1e-9);
        // a constant gap below EPS_MERGE is one long merged stretch
        assert_eq!(im.class, CrossingClass::Attraction);

        // with feedline damping but zero cross terms the linewidth gap is wide
        let damped = SystemConfig::new(
            vec![
                ModeSpec::tunable("M", 0.714, 2.714, 2e-5, 0.0),
                ModeSpec::fixed("P", 3.5, 2e-2, 0.0),
            ],
            vec![],
            Sweep::new(0.0, 3.0, 301),
            Sweep::new(2.5, 5.0, 11),
        )
        .unwrap();
        let bs = eigen_sweep(&damped).unwrap();
        assert_eq!(
            classify_zone(&bs, &zone, Part::Imag).unwrap().class,
            CrossingClass::Repulsion
        );
        assert_eq!(
            classify_zone(&bs, &zone, Part::Real).unwrap().class,
            CrossingClass::Intermediate
        );
    }

    #[test]
    fn strong_dissipative_coupling_merges_real_parts() {
        // 2×2 closed form: real parts coincide while Γ exceeds the detuning
        // scale set by the linewidth difference
        let cfg = two_mode(0.1, 1.8e-4, 1.8e-2);
        let zone = identify_zone(&cfg, "M", "P").unwrap();
        let report = analyze_zone_of(&cfg, &zone).unwrap();
        assert_eq!(report.real_class, CrossingClass::Attraction);
        assert_eq!(report.imag_class, CrossingClass::Repulsion);
        assert!(
            report.merged_interval_real > 3.0 * MIN_MERGE_WIDTH,
            "{report:?}"
        );
    }

    #[test]
    fn coherent_coupling_repels_real_parts() {
        let cfg = SystemConfig::new(
            vec![
                ModeSpec::tunable("M", 0.714, 2.714, 2e-5, 1.8e-4),
                ModeSpec::fixed("P", 3.5, 2e-3, 1.8e-2),
            ],
            vec![CouplingSpec::new("M", "P", 0.05, 0.0)],
            Sweep::new(0.0, 3.0, 301),
            Sweep::new(2.5, 5.0, 11),
        )
        .unwrap();
        let zone = identify_zone(&cfg, "M", "P").unwrap();
        let report = analyze_zone_of(&cfg, &zone).unwrap();
        assert_eq!(report.real_class, CrossingClass::Repulsion);
        assert!(report.min_gap_real > 0.08);
    }

    #[test]
    fn branch_csv_layout() {
        let cfg = two_mode(0.1, 1.8e-4, 1.8e-2)
            .with_field_sweep(Sweep::new(0.0, 1.0, 3))
            .unwrap();
        let csv = eigen_sweep(&cfg).unwrap().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], BRANCH_CSV_HEADER);
        assert_eq!(lines.len(), 1 + 3 * 2);
        assert!(lines[1].starts_with("0.00000000,0,"));
        assert!(lines[2].starts_with("0.00000000,1,"));
        assert!(lines[6].starts_with("1.00000000,1,"));
    }

    #[test]
    fn class_names_round_trip() {
        for c in [
            CrossingClass::Attraction,
            CrossingClass::Repulsion,
            CrossingClass::Intermediate,
        ] {
            assert_eq!(c.to_string().parse::<CrossingClass>().unwrap(), c);
        }
        assert!("attraction".parse::<CrossingClass>().is_err());
    }
}
