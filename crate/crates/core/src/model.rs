//! System description and the matrices derived from it.
//!
//! All frequencies, damping rates and coupling strengths are in GHz; static
//! fields are in kOe.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

/// Resonance frequency of a mode as a function of the applied field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FrequencyLaw {
    Static { value: f64 },
    FieldLinear { slope: f64, intercept: f64 },
}

impl FrequencyLaw {
    pub fn at(&self, h_koe: f64) -> f64 {
        match *self {
            FrequencyLaw::Static { value } => value,
            FrequencyLaw::FieldLinear { slope, intercept } => slope * h_koe + intercept,
        }
    }

    pub fn is_tunable(&self) -> bool {
        matches!(self, FrequencyLaw::FieldLinear { .. })
    }

    fn validate(&self, mode: &str) -> Result<()> {
        match *self {
            FrequencyLaw::Static { value } if !(value.is_finite() && value > 0.0) => {
                Err(Error::InvalidConfig(format!(
                    "mode {mode:?}: static frequency must be positive, got {value}"
                )))
            }
            FrequencyLaw::FieldLinear { slope, .. } if !slope.is_finite() => Err(
                Error::InvalidConfig(format!("mode {mode:?}: slope must be finite, got {slope}")),
            ),
            FrequencyLaw::FieldLinear { intercept, .. }
                if !(intercept.is_finite() && intercept >= 0.0) =>
            {
                Err(Error::InvalidConfig(format!(
                    "mode {mode:?}: intercept must be non-negative, got {intercept}"
                )))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeSpec {
    pub name: String,
    pub frequency: FrequencyLaw,
    /// Intrinsic damping rate.
    pub alpha: f64,
    /// Extrinsic (feedline) damping rate.
    pub beta: f64,
}

impl ModeSpec {
    pub fn new(name: impl Into<String>, frequency: FrequencyLaw, alpha: f64, beta: f64) -> Self {
        Self {
            name: name.into(),
            frequency,
            alpha,
            beta,
        }
    }

    pub fn fixed(name: impl Into<String>, value: f64, alpha: f64, beta: f64) -> Self {
        Self::new(name, FrequencyLaw::Static { value }, alpha, beta)
    }

    pub fn tunable(
        name: impl Into<String>,
        slope: f64,
        intercept: f64,
        alpha: f64,
        beta: f64,
    ) -> Self {
        Self::new(
            name,
            FrequencyLaw::FieldLinear { slope, intercept },
            alpha,
            beta,
        )
    }

    /// Total damping `α + β`.
    pub fn linewidth(&self) -> f64 {
        self.alpha + self.beta
    }
}

/// Complex coupling `Δ = J + iΓ` between two modes, applied symmetrically.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingSpec {
    pub a: String,
    pub b: String,
    pub j: f64,
    pub gamma: f64,
}

impl CouplingSpec {
    pub fn new(a: impl Into<String>, b: impl Into<String>, j: f64, gamma: f64) -> Self {
        Self {
            a: a.into(),
            b: b.into(),
            j,
            gamma,
        }
    }

    pub fn dissipative(a: impl Into<String>, b: impl Into<String>, gamma: f64) -> Self {
        Self::new(a, b, 0.0, gamma)
    }

    pub fn strength(&self) -> Complex64 {
        Complex64::new(self.j, self.gamma)
    }

    fn connects(&self, a: &str, b: &str) -> bool {
        (self.a == a && self.b == b) || (self.a == b && self.b == a)
    }
}

/// Evenly spaced sweep including both end points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sweep {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Sweep {
    pub fn new(start: f64, stop: f64, points: usize) -> Self {
        Self {
            start,
            stop,
            points,
        }
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.points {
            self.stop
        } else {
            self.start + (self.stop - self.start) * i as f64 / (self.points - 1) as f64
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.value(i)).collect()
    }

    pub fn step(&self) -> f64 {
        (self.stop - self.start) / (self.points - 1) as f64
    }

    fn validate(&self, what: &str) -> Result<()> {
        if !(self.start.is_finite() && self.stop.is_finite()) || self.start >= self.stop {
            return Err(Error::InvalidConfig(format!(
                "{what}: need finite start < stop, got {} .. {}",
                self.start, self.stop
            )));
        }
        if self.points < 2 {
            return Err(Error::InvalidConfig(format!(
                "{what}: need at least 2 points, got {}",
                self.points
            )));
        }
        Ok(())
    }
}

/// Validated description of modes, couplings and sweep ranges.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    modes: Vec<ModeSpec>,
    couplings: Vec<CouplingSpec>,
    /// Mode indices of each coupling, parallel to `couplings`.
    pairs: Vec<(usize, usize)>,
    field_sweep: Sweep,
    frequency_sweep: Sweep,
    notes: Option<String>,
}

impl SystemConfig {
    pub fn new(
        modes: Vec<ModeSpec>,
        couplings: Vec<CouplingSpec>,
        field_sweep: Sweep,
        frequency_sweep: Sweep,
    ) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::InvalidConfig("at least one mode is required".into()));
        }
        let mut index = HashMap::new();
        for (i, mode) in modes.iter().enumerate() {
            if index.insert(mode.name.as_str(), i).is_some() {
                return Err(Error::DuplicateMode(mode.name.clone()));
            }
            mode.frequency.validate(&mode.name)?;
            for (label, v) in [("alpha", mode.alpha), ("beta", mode.beta)] {
                if !(v.is_finite() && v >= 0.0) {
                    return Err(Error::InvalidConfig(format!(
                        "mode {:?}: {label} must be non-negative, got {v}",
                        mode.name
                    )));
                }
            }
        }

        let mut pairs = Vec::with_capacity(couplings.len());
        for c in &couplings {
            let a = *index
                .get(c.a.as_str())
                .ok_or_else(|| Error::UnknownModeInCoupling(c.a.clone()))?;
            let b = *index
                .get(c.b.as_str())
                .ok_or_else(|| Error::UnknownModeInCoupling(c.b.clone()))?;
            if a == b {
                return Err(Error::InvalidConfig(format!(
                    "mode {:?} coupled to itself",
                    c.a
                )));
            }
            let key = (a.min(b), a.max(b));
            if pairs.contains(&key) {
                return Err(Error::InvalidConfig(format!(
                    "pair {:?}-{:?} listed more than once",
                    c.a, c.b
                )));
            }
            if !(c.j.is_finite() && c.gamma.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "coupling {:?}-{:?} has non-finite strength",
                    c.a, c.b
                )));
            }
            pairs.push(key);
        }

        field_sweep.validate("field sweep")?;
        if field_sweep.start < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "field sweep must start at h >= 0, got {}",
                field_sweep.start
            )));
        }
        frequency_sweep.validate("frequency sweep")?;

        Ok(Self {
            modes,
            couplings,
            pairs,
            field_sweep,
            frequency_sweep,
            notes: None,
        })
    }

    pub fn with_notes(mut self, notes: Option<String>) -> Self {
        self.notes = notes;
        self
    }

    pub fn modes(&self) -> &[ModeSpec] {
        &self.modes
    }

    pub fn couplings(&self) -> &[CouplingSpec] {
        &self.couplings
    }

    pub fn field_sweep(&self) -> Sweep {
        self.field_sweep
    }

    pub fn frequency_sweep(&self) -> Sweep {
        self.frequency_sweep
    }

    pub fn notes(&self) -> Option<&str> {
        self.notes.as_deref()
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn mode_index(&self, name: &str) -> Option<usize> {
        self.modes.iter().position(|m| m.name == name)
    }

    pub fn mode(&self, name: &str) -> Option<&ModeSpec> {
        self.modes.iter().find(|m| m.name == name)
    }

    /// Coupling strength between two named modes, zero when the pair is absent.
    pub fn coupling(&self, a: &str, b: &str) -> Complex64 {
        self.couplings
            .iter()
            .find(|c| c.connects(a, b))
            .map_or(Complex64::new(0.0, 0.0), CouplingSpec::strength)
    }

    /// Copy with the `(a, b)` coupling replaced (or added when absent).
    pub fn with_coupling(&self, a: &str, b: &str, j: f64, gamma: f64) -> Result<Self> {
        let mut couplings = self.couplings.clone();
        match couplings.iter_mut().find(|c| c.connects(a, b)) {
            Some(c) => {
                c.j = j;
                c.gamma = gamma;
            }
            None => couplings.push(CouplingSpec::new(a, b, j, gamma)),
        }
        Self::new(
            self.modes.clone(),
            couplings,
            self.field_sweep,
            self.frequency_sweep,
        )
        .map(|c| c.with_notes(self.notes.clone()))
    }

    /// Copy with the `(a, b)` coupling dropped.
    pub fn without_coupling(&self, a: &str, b: &str) -> Self {
        let mut out = self.clone();
        if let Some(k) = out.couplings.iter().position(|c| c.connects(a, b)) {
            out.couplings.remove(k);
            out.pairs.remove(k);
        }
        out
    }

    pub fn with_field_sweep(&self, sweep: Sweep) -> Result<Self> {
        Self::new(
            self.modes.clone(),
            self.couplings.clone(),
            sweep,
            self.frequency_sweep,
        )
        .map(|c| c.with_notes(self.notes.clone()))
    }

    pub fn with_frequency_sweep(&self, sweep: Sweep) -> Result<Self> {
        Self::new(
            self.modes.clone(),
            self.couplings.clone(),
            self.field_sweep,
            sweep,
        )
        .map(|c| c.with_notes(self.notes.clone()))
    }

    /// Copy with the modes listed in the given order (`order[k]` is the old index).
    pub fn with_mode_order(&self, order: &[usize]) -> Result<Self> {
        let modes = order
            .iter()
            .map(|&k| {
                self.modes
                    .get(k)
                    .cloned()
                    .ok_or_else(|| Error::InvalidConfig(format!("mode index {k} out of range")))
            })
            .collect::<Result<Vec<_>>>()?;
        if modes.len() != self.modes.len() {
            return Err(Error::InvalidConfig("order must list every mode".into()));
        }
        Self::new(
            modes,
            self.couplings.clone(),
            self.field_sweep,
            self.frequency_sweep,
        )
    }
}

/// Non-Hermitian coupling matrix whose eigenvalues are the hybrid
/// eigenfrequencies (real part) and half-linewidths (negative imaginary part).
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveHamiltonian {
    matrix: ComplexMatrix,
}

impl EffectiveHamiltonian {
    pub fn n(&self) -> usize {
        self.matrix.rows()
    }

    pub fn entry(&self, l: usize, m: usize) -> Complex64 {
        self.matrix[(l, m)]
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }
}

pub fn mode_frequency(mode: &ModeSpec, h_koe: f64) -> f64 {
    mode.frequency.at(h_koe)
}

/// Builds `H` with diagonal `ω_l(h) − i(α_l + β_l)` and off-diagonal
/// `Δ_lm − i√(β_l β_m)`. The feedline term is present for every pair.
pub fn effective_hamiltonian(config: &SystemConfig, h_koe: f64) -> EffectiveHamiltonian {
    let n = config.len();
    let modes = config.modes();
    let mut matrix = ComplexMatrix::zeros(n, n);
    for (l, mode) in modes.iter().enumerate() {
        matrix[(l, l)] = Complex64::new(mode_frequency(mode, h_koe), -mode.linewidth());
        for m in l + 1..n {
            let bath = (mode.beta * modes[m].beta).sqrt();
            matrix[(l, m)] = Complex64::new(0.0, -bath);
        }
    }
    for (c, &(l, m)) in config.couplings.iter().zip(&config.pairs) {
        let bath = matrix[(l, m)];
        matrix[(l, m)] = Complex64::new(c.j, c.gamma + bath.im);
    }
    for l in 0..n {
        for m in l + 1..n {
            matrix[(m, l)] = matrix[(l, m)];
        }
    }
    EffectiveHamiltonian { matrix }
}

/// `M = i(ωI − H)`, the matrix whose inverse sandwiched between port vectors
/// gives the transmission.
pub fn response_matrix(config: &SystemConfig, h_koe: f64, omega: f64) -> ComplexMatrix {
    response_from_hamiltonian(&effective_hamiltonian(config, h_koe), omega)
}

pub(crate) fn response_from_hamiltonian(h: &EffectiveHamiltonian, omega: f64) -> ComplexMatrix {
    let i = Complex64::new(0.0, 1.0);
    ComplexMatrix::from_fn(h.n(), h.n(), |l, m| {
        let shift = if l == m {
            Complex64::new(omega, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
        i * (shift - h.entry(l, m))
    })
}

/// Feedline port vector `√2 · (√β_1, …, √β_N)`.
pub fn port_vector(config: &SystemConfig) -> Vec<Complex64> {
    config
        .modes()
        .iter()
        .map(|m| Complex64::new(std::f64::consts::SQRT_2 * m.beta.sqrt(), 0.0))
        .collect()
}
