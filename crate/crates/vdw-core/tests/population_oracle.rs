//! Rate-equation cascade against a fourth-order Runge-Kutta oracle, plus
//! population-conservation and polarizability crossing properties.

use nalgebra::Vector3;
use num_complex::Complex64;
use proptest::prelude::*;
use vdw_core::atomic::{
    evolve_populations, load_species, polarizability, AtomicSpecies, PopulationState,
    SpeciesRecord,
};
use vdw_core::constants::HBAR;

/// Dense RK4 integration of dp/dt = L p with the cascade generator.
fn rk4_oracle(species: &AtomicSpecies, initial: &[f64], t_end: f64, dt: f64) -> Vec<f64> {
    let n = species.num_levels();
    let derivative = |p: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|i| {
                let mut dp = -species.total_rate(i) * p[i];
                for (m, &p_m) in p.iter().enumerate().skip(i + 1) {
                    dp += species.partial_rate(m, i) * p_m;
                }
                dp
            })
            .collect()
    };
    let mut p = initial.to_vec();
    let steps = (t_end / dt).ceil() as usize;
    let h = t_end / steps as f64;
    for _ in 0..steps {
        let k1 = derivative(&p);
        let mid1: Vec<f64> = p.iter().zip(&k1).map(|(x, k)| x + 0.5 * h * k).collect();
        let k2 = derivative(&mid1);
        let mid2: Vec<f64> = p.iter().zip(&k2).map(|(x, k)| x + 0.5 * h * k).collect();
        let k3 = derivative(&mid2);
        let end: Vec<f64> = p.iter().zip(&k3).map(|(x, k)| x + h * k).collect();
        let k4 = derivative(&end);
        for i in 0..n {
            p[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    p
}

fn branching_cascade() -> AtomicSpecies {
    load_species(&SpeciesRecord {
        name: "branching".into(),
        levels: vec![
            ("g".into(), 0.0),
            ("a".into(), 0.8e-19),
            ("b".into(), 1.7e-19),
            ("c".into(), 3.1e-19),
        ],
        dipoles: vec![],
        rates: vec![
            ("c".into(), "b".into(), 2.3e8),
            ("c".into(), "a".into(), 0.7e8),
            ("c".into(), "g".into(), 0.4e8),
            ("b".into(), "a".into(), 1.3e8),
            ("b".into(), "g".into(), 0.5e8),
            ("a".into(), "g".into(), 0.9e8),
        ],
        position: Vector3::zeros(),
    })
    .unwrap()
}

#[test]
fn cascade_matches_rk4_oracle() {
    let species = branching_cascade();
    let gamma_max = (0..species.num_levels())
        .map(|n| species.total_rate(n))
        .fold(0.0, f64::max);
    let dt = 1e-4 / gamma_max;
    let initial = PopulationState::excited(&species, 3);
    for t in [3e-10, 2e-9, 8e-9] {
        let analytic = evolve_populations(&species, &initial, t).unwrap();
        let numeric = rk4_oracle(&species, initial.probabilities(), t, dt);
        for (n, (a_val, n_val)) in analytic.probabilities().iter().zip(&numeric).enumerate() {
            let reference = n_val.abs().max(1e-12);
            assert!(
                (a_val - n_val).abs() <= 1e-8 * reference,
                "level {n} at t={t}: analytic {a_val}, rk4 {n_val}"
            );
        }
    }
}

proptest! {
    #[test]
    fn populations_stay_normalized(
        g_top in 1e7f64..5e8,
        g_mid in 1e7f64..5e8,
        g_low in 1e7f64..5e8,
        time_scale in 0.0f64..12.0,
    ) {
        let species = load_species(&SpeciesRecord {
            name: "chain".into(),
            levels: vec![
                ("g".into(), 0.0),
                ("a".into(), 1e-19),
                ("b".into(), 2e-19),
                ("c".into(), 3e-19),
            ],
            dipoles: vec![],
            rates: vec![
                ("c".into(), "b".into(), g_top),
                ("b".into(), "a".into(), g_mid),
                ("a".into(), "g".into(), g_low),
            ],
            position: Vector3::zeros(),
        }).unwrap();
        let initial = PopulationState::excited(&species, 3);
        let t = time_scale / g_top.min(g_mid).min(g_low);
        let evolved = evolve_populations(&species, &initial, t).unwrap();
        let total: f64 = evolved.probabilities().iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
        prop_assert!(evolved.probabilities().iter().all(|&p| (0.0..=1.0).contains(&p)));
    }

    #[test]
    fn two_level_excited_population_decreases(
        t1 in 1e-10f64..1e-7,
        ratio in 1.01f64..20.0,
    ) {
        let species = AtomicSpecies::two_level(
            "decay",
            2.37e15,
            Vector3::new(0.0, 0.0, 2.99e-29),
            Vector3::zeros(),
        ).unwrap();
        let initial = PopulationState::excited(&species, 1);
        let early = evolve_populations(&species, &initial, t1).unwrap();
        let late = evolve_populations(&species, &initial, t1 * ratio).unwrap();
        prop_assert!(late.probability(1) < early.probability(1));
    }

    #[test]
    fn polarizability_crossing_relation(
        re in -3e15f64..3e15,
        im in 1e13f64..2e15,
        p_excited in 0.0f64..1.0,
    ) {
        let species = AtomicSpecies::two_level(
            "crossing",
            2.1e15,
            Vector3::new(1.1e-29, -0.4e-29, 2.3e-29),
            Vector3::zeros(),
        ).unwrap();
        let pops = PopulationState::new(vec![1.0 - p_excited, p_excited], 0.0).unwrap();
        let omega = Complex64::new(re, im);
        let direct = polarizability(&species, &pops, omega).unwrap();
        let mirrored = polarizability(&species, &pops, -omega.conj()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expected = direct[(i, j)].conj();
                prop_assert!((mirrored[(i, j)] - expected).norm() <= 1e-13 * direct[(i, j)].norm().max(1e-60));
            }
        }
    }
}

#[test]
fn imaginary_axis_polarizability_is_real_symmetric_and_psd_for_ground() {
    let species = load_species(&SpeciesRecord {
        name: "multi".into(),
        levels: vec![
            ("g".into(), 0.0),
            ("e1".into(), HBAR * 1.9e15),
            ("e2".into(), HBAR * 2.6e15),
        ],
        dipoles: vec![
            ("e1".into(), "g".into(), Vector3::new(1.2e-29, 0.3e-29, -0.5e-29)),
            ("e2".into(), "g".into(), Vector3::new(-0.2e-29, 2.1e-29, 0.8e-29)),
            ("e2".into(), "e1".into(), Vector3::new(0.4e-29, 0.0, 1.0e-29)),
        ],
        rates: vec![],
        position: Vector3::zeros(),
    })
    .unwrap();
    let pops = PopulationState::ground(&species);
    for xi in [0.0f64, 3e14, 1.7e15, 8e15] {
        let alpha = polarizability(&species, &pops, Complex64::new(0.0, xi)).unwrap();
        let mut real = nalgebra::Matrix3::zeros();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(alpha[(i, j)].im, 0.0);
                real[(i, j)] = alpha[(i, j)].re;
            }
        }
        assert_eq!(real, real.transpose());
        let eigen = nalgebra::SymmetricEigen::new(real);
        let scale = eigen.eigenvalues.amax();
        assert!(
            eigen.eigenvalues.iter().all(|&l| l >= -1e-14 * scale),
            "ground-state alpha(i xi) not PSD at xi={xi}"
        );
    }
}
