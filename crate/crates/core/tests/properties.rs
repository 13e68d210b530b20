use itertools::Itertools;
use num_complex::Complex64;
use proptest::prelude::*;

use hybrid_modes::config::{parse_config, to_json};
use hybrid_modes::eigen_analysis::{analyze_zone_of, eigen_sweep, identify_zone, raw_eigenvalues};
use hybrid_modes::linalg::{char_poly_roots, eigenvalues};
use hybrid_modes::presets::{load_preset, PRESETS};
use hybrid_modes::spectra::{parse_spectrum_csv, s21_at, spectrum_csv, SpectrumGrid};
use hybrid_modes::{effective_hamiltonian, CouplingSpec, ModeSpec, Sweep, SystemConfig};

fn mode_strategy(k: usize) -> impl Strategy<Value = ModeSpec> {
    (
        any::<bool>(),
        2.5..5.0f64,
        0.3..1.0f64,
        0.0..0.01f64,
        0.0..0.05f64,
    )
        .prop_map(move |(tunable, w, slope, a, b)| {
            if tunable {
                ModeSpec::tunable(format!("m{k}"), slope, w - 0.5, a, b)
            } else {
                ModeSpec::fixed(format!("m{k}"), w, a, b)
            }
        })
}

fn config_strategy() -> impl Strategy<Value = SystemConfig> {
    (1usize..=4)
        .prop_flat_map(|n| {
            let modes: Vec<_> = (0..n).map(mode_strategy).collect();
            let couplings = proptest::collection::vec(
                (-0.2..0.2f64, -0.2..0.2f64, any::<bool>()),
                n * (n - 1) / 2,
            );
            (modes, couplings)
        })
        .prop_map(|(modes, raw)| {
            let n = modes.len();
            let couplings = (0..n)
                .tuple_combinations()
                .zip(raw)
                .filter(|(_, (_, _, keep))| *keep)
                .map(|((a, b), (j, g, _))| {
                    CouplingSpec::new(format!("m{a}"), format!("m{b}"), j, g)
                })
                .collect();
            SystemConfig::new(
                modes,
                couplings,
                Sweep::new(0.0, 3.0, 11),
                Sweep::new(2.5, 5.5, 11),
            )
            .unwrap()
        })
}

proptest! {
    #[test]
    fn hamiltonian_is_symmetric_with_known_trace(cfg in config_strategy(), h in 0.0..3.0f64) {
        let ham = effective_hamiltonian(&cfg, h);
        for l in 0..ham.n() {
            for m in 0..ham.n() {
                prop_assert_eq!(ham.entry(l, m), ham.entry(m, l));
            }
        }
        let expected: Complex64 = cfg
            .modes()
            .iter()
            .map(|m| Complex64::new(m.frequency.at(h), -(m.alpha + m.beta)))
            .sum();
        prop_assert!((ham.matrix().trace() - expected).norm() < 1e-12);
    }

    #[test]
    fn s21_ignores_mode_order(cfg in config_strategy(), h in 0.0..3.0f64, w in 2.5..5.5f64, seed in any::<u64>()) {
        let n = cfg.len();
        let mut order: Vec<usize> = (0..n).collect();
        // deterministic shuffle from the seed
        for i in (1..n).rev() {
            order.swap(i, (seed as usize / (i + 1)) % (i + 1));
        }
        let permuted = cfg.with_mode_order(&order).unwrap();
        if let (Ok(a), Ok(b)) = (s21_at(&cfg, h, w), s21_at(&permuted, h, w)) {
            prop_assert!((a - b).norm() <= 1e-12 * a.norm().max(1.0));
        }
    }

    #[test]
    fn eigenvalues_match_polynomial_roots(cfg in config_strategy(), h in 0.0..3.0f64) {
        let ham = effective_hamiltonian(&cfg, h);
        let qr = eigenvalues(ham.matrix()).unwrap().values;
        let mut roots = char_poly_roots(ham.matrix()).unwrap();
        for v in qr {
            let k = (0..roots.len()).min_by(|&i, &j| (roots[i] - v).norm().total_cmp(&(roots[j] - v).norm())).unwrap();
            prop_assert!((roots[k] - v).norm() < 1e-7);
            roots.remove(k);
        }
    }

    #[test]
    fn config_json_round_trip(cfg in config_strategy()) {
        prop_assert_eq!(parse_config(&to_json(&cfg)).unwrap(), cfg);
    }

    #[test]
    fn spectrum_csv_round_trip(
        nf in 1usize..5,
        nw in 1usize..5,
        values in proptest::collection::vec((-3.0..3.0f64, -3.0..3.0f64), 16),
    ) {
        let fields: Vec<f64> = (0..nf).map(|i| 0.1 * i as f64).collect();
        let freqs: Vec<f64> = (0..nw).map(|j| 3.0 + 0.25 * j as f64).collect();
        let s21 = values.iter().take(nf * nw).map(|&(re, im)| Complex64::new(re, im)).collect();
        let grid = SpectrumGrid::new(fields, freqs, s21).unwrap();
        let text = spectrum_csv(&grid);
        let back = parse_spectrum_csv(&text).unwrap();
        prop_assert_eq!(back.field_values().len(), nf);
        prop_assert_eq!(back.freq_values().len(), nw);
        // abs is derived from the rounded parts, so compare the stored columns
        let stored = |t: &str| t.lines().map(|l| l.rsplit_once(',').map_or("", |p| p.0).to_owned()).collect::<Vec<_>>();
        prop_assert_eq!(stored(&spectrum_csv(&back)), stored(&text));
        for (a, b) in grid.values().iter().zip(back.values()) {
            prop_assert!((a - b).norm() <= 1e-8 * a.norm().max(1.0));
        }
    }

    #[test]
    fn tracked_branches_keep_the_eigenvalue_multiset(cfg in config_strategy()) {
        let fields = cfg.field_sweep().values();
        let raw = raw_eigenvalues(&cfg, &fields).unwrap();
        let bs = eigen_sweep(&cfg).unwrap();
        for (i, values) in raw.iter().enumerate() {
            let mut tracked = bs.at(i);
            for v in values {
                let k = tracked.iter().position(|t| (t - v).norm() < 1e-9);
                prop_assert!(k.is_some());
                tracked.remove(k.unwrap());
            }
        }
    }
}

#[test]
fn classification_ignores_mode_order() {
    for (name, _) in PRESETS {
        let cfg = load_preset(name).unwrap();
        let n = cfg.len();
        let reversed = cfg
            .with_mode_order(&(0..n).rev().collect::<Vec<_>>())
            .unwrap();
        let zone = identify_zone(&cfg, "M", "P2").unwrap();
        let a = analyze_zone_of(&cfg, &zone).unwrap();
        let b = analyze_zone_of(&reversed, &zone).unwrap();
        assert_eq!(
            (a.real_class, a.imag_class),
            (b.real_class, b.imag_class),
            "{name}"
        );
        assert!((a.min_gap_real - b.min_gap_real).abs() < 1e-9);
    }
}

#[test]
fn eigenvalues_at_mp1_crossing_match_polynomial_roots() {
    let cfg = load_preset("three_mode_table1_row_df.json").unwrap();
    let zone = identify_zone(&cfg, "M", "P1").unwrap();
    let ham = effective_hamiltonian(&cfg, zone.center_field);
    let qr = eigenvalues(ham.matrix()).unwrap();
    assert!(qr.max_residual() <= qr.tolerance);
    let roots = char_poly_roots(ham.matrix()).unwrap();
    for v in &qr.values {
        assert!(roots.iter().any(|r| (r - v).norm() < 1e-7));
    }
}

#[test]
fn dissipative_two_mode_closed_form_attraction() {
    // λ = ω̄ − iκ̄ ± sqrt((δ/2 − iΔκ/2)² + (iG)²) with G = Γ − √(β₁β₂);
    // at zero detuning the real parts coincide whenever G exceeds Δκ/2
    let (a1, b1, a2, b2): (f64, f64, f64, f64) = (2e-5, 1.8e-4, 2e-3, 1.8e-2);
    let gamma = (b1 * b2).sqrt() + 0.5 * ((a2 + b2) - (a1 + b1)) + 0.03;
    let cfg = SystemConfig::new(
        vec![
            ModeSpec::tunable("M", 0.714, 2.714, a1, b1),
            ModeSpec::fixed("P", 3.5, a2, b2),
        ],
        vec![CouplingSpec::dissipative("M", "P", gamma)],
        Sweep::new(0.5, 1.7, 241),
        Sweep::new(3.0, 4.0, 3),
    )
    .unwrap();
    let zone = identify_zone(&cfg, "M", "P").unwrap();
    let ham = effective_hamiltonian(&cfg, zone.center_field);
    let v = eigenvalues(ham.matrix()).unwrap().values;
    assert!((v[0].re - v[1].re).abs() < 1e-9);
    let report = analyze_zone_of(&cfg, &zone).unwrap();
    assert_eq!(
        report.real_class,
        hybrid_modes::eigen_analysis::CrossingClass::Attraction
    );
}
