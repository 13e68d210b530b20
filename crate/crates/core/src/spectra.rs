//! Forward transmission `S21 = Bᵀ M⁻¹ B` over field/frequency grids, a
//! time-domain cross-check, and grid exporters.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::export::{fmt_sig9, write_atomic};
use crate::linalg::{eigenvalues, lu_solve, LinalgError};
use crate::model::{
    effective_hamiltonian, port_vector, response_from_hamiltonian, EffectiveHamiltonian,
    SystemConfig,
};

pub const CSV_HEADER: &str = "h_koe,f_ghz,re_s21,im_s21,abs_s21";

/// Complex `S21` sampled on the (field, frequency) plane, field-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumGrid {
    field_values: Vec<f64>,
    freq_values: Vec<f64>,
    s21: Vec<Complex64>,
}

impl SpectrumGrid {
    pub fn new(field_values: Vec<f64>, freq_values: Vec<f64>, s21: Vec<Complex64>) -> Result<Self> {
        if s21.len() != field_values.len() * freq_values.len() {
            return Err(Error::Parse(format!(
                "grid of {}x{} needs {} values, got {}",
                field_values.len(),
                freq_values.len(),
                field_values.len() * freq_values.len(),
                s21.len()
            )));
        }
        Ok(Self {
            field_values,
            freq_values,
            s21,
        })
    }

    pub fn field_values(&self) -> &[f64] {
        &self.field_values
    }

    pub fn freq_values(&self) -> &[f64] {
        &self.freq_values
    }

    pub fn get(&self, field_index: usize, freq_index: usize) -> Complex64 {
        self.s21[field_index * self.freq_values.len() + freq_index]
    }

    pub fn row(&self, field_index: usize) -> &[Complex64] {
        let w = self.freq_values.len();
        &self.s21[field_index * w..(field_index + 1) * w]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.s21
    }

    /// Frequency index of the deepest `|1 + S21|` dip in one field row.
    pub fn dip_index(&self, field_index: usize) -> usize {
        self.row(field_index)
            .iter()
            .enumerate()
            .min_by(|a, b| (1.0 + a.1).norm().total_cmp(&(1.0 + b.1).norm()))
            .map_or(0, |(j, _)| j)
    }
}

fn s21_from_hamiltonian(
    ham: &EffectiveHamiltonian,
    port: &[Complex64],
    omega: f64,
) -> std::result::Result<Complex64, LinalgError> {
    let m = response_from_hamiltonian(ham, omega);
    let x = lu_solve(&m, port)?;
    Ok(port.iter().zip(&x).map(|(b, x)| b * x).sum())
}

fn at_point(
    ham: &EffectiveHamiltonian,
    port: &[Complex64],
    h_koe: f64,
    omega: f64,
) -> Result<Complex64> {
    s21_from_hamiltonian(ham, port, omega).map_err(|e| match e {
        LinalgError::SingularMatrix { .. } => Error::SingularAt {
            h_koe,
            omega_ghz: omega,
        },
        other => other.into(),
    })
}

/// Transmission `S21 = P_out/P_in − 1` at one field and probe frequency.
pub fn s21_at(config: &SystemConfig, h_koe: f64, omega: f64) -> Result<Complex64> {
    let ham = effective_hamiltonian(config, h_koe);
    at_point(&ham, &port_vector(config), h_koe, omega)
}

/// Evaluates [`s21_at`] on the configured sweep grid. Rows are computed in
/// parallel; each point is independent so the result does not depend on the
/// thread count.
pub fn sweep_spectrum(config: &SystemConfig) -> Result<SpectrumGrid> {
    let field_values = config.field_sweep().values();
    let freq_values = config.frequency_sweep().values();
    let port = port_vector(config);

    let rows: Vec<Result<Vec<Complex64>>> = field_values
        .par_iter()
        .map(|&h| {
            let ham = effective_hamiltonian(config, h);
            freq_values
                .iter()
                .map(|&f| at_point(&ham, &port, h, f))
                .collect()
        })
        .collect();

    let mut s21 = Vec::with_capacity(field_values.len() * freq_values.len());
    for row in rows {
        s21.extend(row?);
    }
    SpectrumGrid::new(field_values, freq_values, s21)
}

/// Steady-state transmission from direct time integration of the driven
/// mode amplitudes. The amplitudes are integrated in the frame rotating at
/// the drive frequency, where the drive is constant and the demodulated
/// amplitude relaxes straight to its phasor; fixed-step RK4 from rest.
pub fn s21_time_domain_oracle(config: &SystemConfig, h_koe: f64, omega: f64) -> Result<Complex64> {
    let modes = config.modes();
    if let Some(m) = modes.iter().find(|m| m.linewidth() <= 0.0) {
        return Err(Error::NonDecaying(format!(
            "mode {:?} has zero total damping",
            m.name
        )));
    }
    let drive: Vec<Complex64> = modes
        .iter()
        .map(|m| Complex64::new(m.beta.sqrt(), 0.0))
        .collect();
    if drive.iter().all(|k| k.norm() == 0.0) {
        return Ok(Complex64::new(0.0, 0.0));
    }

    let ham = effective_hamiltonian(config, h_koe);
    let spectrum = eigenvalues(ham.matrix()).map_err(|source| Error::EigenAt { h_koe, source })?;
    let slowest_mode = spectrum
        .values
        .iter()
        .map(|l| -l.im)
        .fold(f64::INFINITY, f64::min);
    if slowest_mode <= 0.0 {
        return Err(Error::NonDecaying(format!(
            "eigenmode with growth rate {:e} GHz at h = {h_koe} kOe",
            -slowest_mode
        )));
    }
    let slowest_bare = modes
        .iter()
        .map(|m| m.linewidth())
        .fold(f64::INFINITY, f64::min);
    let duration = 20.0 / slowest_mode.min(slowest_bare);

    // generator A = −i(H − ω), constant drive c = −iK
    let n = ham.n();
    let minus_i = Complex64::new(0.0, -1.0);
    let gen = ham.matrix().map(|z| z * minus_i);
    let mut gen = gen;
    for l in 0..n {
        gen[(l, l)] -= minus_i * omega;
    }
    let scale = (0..n)
        .flat_map(|l| (0..n).map(move |m| (l, m)))
        .map(|(l, m)| gen[(l, m)].norm())
        .fold(0.0, f64::max);
    let steps = (duration * scale / 0.01).ceil().max(1.0) as usize;
    let dt = duration / steps as f64;
    let c: Vec<Complex64> = drive.iter().map(|k| k * minus_i).collect();

    // For y' = A y + c one RK4 step is the affine map y -> P y + q with
    // P = Σ_{k≤4} (hA)^k / k!  and  q = h Σ_{k≤3} (hA)^k / (k+1)! c.
    let b = gen.map(|z| z * dt);
    let mut power = crate::linalg::ComplexMatrix::identity(n);
    let mut propagator = crate::linalg::ComplexMatrix::identity(n);
    let mut drive_sum = crate::linalg::ComplexMatrix::identity(n);
    let mut factorial = 1.0;
    for k in 1..=4 {
        power = power.mul(&b);
        factorial *= k as f64;
        let term_p = power.map(|z| z / factorial);
        for l in 0..n {
            for m in 0..n {
                propagator[(l, m)] += term_p[(l, m)];
                if k <= 3 {
                    drive_sum[(l, m)] += power[(l, m)] / (factorial * (k + 1) as f64);
                }
            }
        }
    }
    let q: Vec<Complex64> = drive_sum.mul_vec(&c).iter().map(|z| z * dt).collect();

    let mut y = vec![Complex64::new(0.0, 0.0); n];
    let mut next = vec![Complex64::new(0.0, 0.0); n];
    for _ in 0..steps {
        for l in 0..n {
            let row = propagator.row(l);
            let mut acc = q[l];
            for m in 0..n {
                acc += row[m] * y[m];
            }
            next[l] = acc;
        }
        std::mem::swap(&mut y, &mut next);
    }
    if y.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonDecaying("time integration diverged".into()));
    }

    // P_out = P_in − 2i Σ √β_l X_l with a unit input phasor
    let radiated: Complex64 = drive.iter().zip(&y).map(|(k, x)| k * x).sum();
    Ok(Complex64::new(0.0, -2.0) * radiated)
}

pub fn spectrum_csv(grid: &SpectrumGrid) -> String {
    let mut out = String::with_capacity(64 * grid.s21.len() + 64);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for (i, &h) in grid.field_values.iter().enumerate() {
        for (j, &f) in grid.freq_values.iter().enumerate() {
            let z = grid.get(i, j);
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                fmt_sig9(h),
                fmt_sig9(f),
                fmt_sig9(z.re),
                fmt_sig9(z.im),
                fmt_sig9(z.norm())
            );
        }
    }
    out
}

pub fn export_csv(grid: &SpectrumGrid, destination: &Path) -> Result<()> {
    write_atomic(destination, spectrum_csv(grid).as_bytes())
}

/// Reads back a grid written by [`export_csv`].
pub fn parse_spectrum_csv(text: &str) -> Result<SpectrumGrid> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => {
            return Err(Error::Parse(format!(
                "expected header {CSV_HEADER:?}, got {other:?}"
            )))
        }
    }
    let mut field_values: Vec<f64> = Vec::new();
    let mut freq_values: Vec<f64> = Vec::new();
    let mut s21 = Vec::new();
    for (k, line) in lines.enumerate() {
        let cols: Vec<f64> = line
            .split(',')
            .map(|c| {
                c.parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", k + 2)))
            })
            .collect::<Result<_>>()?;
        if cols.len() != 5 {
            return Err(Error::Parse(format!("line {}: expected 5 columns", k + 2)));
        }
        if field_values.last() != Some(&cols[0]) {
            field_values.push(cols[0]);
        }
        if field_values.len() == 1 {
            freq_values.push(cols[1]);
        }
        s21.push(Complex64::new(cols[2], cols[3]));
    }
    SpectrumGrid::new(field_values, freq_values, s21)
}

/// Grey level for one grid point: `20 log10 |1 + S21|` mapped linearly from
/// `[floor_db, ceil_db]` onto `[0, 255]`.
pub fn pgm_level(s21: Complex64, floor_db: f64, ceil_db: f64) -> u8 {
    let db = 20.0 * (1.0 + s21).norm().max(1e-12).log10();
    let t = (db - floor_db) / (ceil_db - floor_db);
    (t * 255.0).round().clamp(0.0, 255.0) as u8
}

/// Binary greyscale image, one row per field value, one column per frequency.
pub fn pgm_bytes(grid: &SpectrumGrid, floor_db: f64, ceil_db: f64) -> Result<Vec<u8>> {
    if !(floor_db.is_finite() && ceil_db.is_finite() && floor_db < ceil_db) {
        return Err(Error::InvalidConfig(format!(
            "PGM range needs floor < ceil, got {floor_db}, {ceil_db}"
        )));
    }
    let (w, h) = (grid.freq_values.len(), grid.field_values.len());
    let mut out = format!("P5\n{w} {h}\n255\n").into_bytes();
    out.extend(grid.s21.iter().map(|&z| pgm_level(z, floor_db, ceil_db)));
    Ok(out)
}

pub fn export_pgm(
    grid: &SpectrumGrid,
    destination: &Path,
    floor_db: f64,
    ceil_db: f64,
) -> Result<()> {
    write_atomic(destination, &pgm_bytes(grid, floor_db, ceil_db)?)
}
