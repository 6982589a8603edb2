//! Randomized verification of the kernel identities, reported as CSV.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vdw_core::kernels::{
    combined_denominator_sum, denominator_inverse_sum, energy_denominators, spectral_kernels,
    KernelParams,
};

use crate::output::fmt_float;

pub struct KernelCheckReport {
    pub csv: String,
    pub failures: usize,
    pub summary: String,
}

fn log_uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

pub fn random_params(rng: &mut impl Rng) -> KernelParams {
    let sign_a = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let sign_b = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let omega_a = sign_a * log_uniform(rng, 0.3, 3.0);
    let omega_b = sign_b * log_uniform(rng, 0.3, 3.0);
    KernelParams {
        omega: Complex64::new(log_uniform(rng, 0.3, 3.0), 0.0),
        omega_prime: Complex64::new(log_uniform(rng, 0.3, 3.0), 0.0),
        omega_a,
        omega_b,
        half_width_a: log_uniform(rng, 1e-6, 1e-2) * omega_a.abs(),
        half_width_b: log_uniform(rng, 1e-6, 1e-2) * omega_b.abs(),
        photon_damping: 0.0,
    }
}

struct Shifted {
    w: Complex64,
    u: Complex64,
    ap: Complex64,
    am: Complex64,
    bp: Complex64,
    bm: Complex64,
}

fn shifted(p: &KernelParams) -> Shifted {
    Shifted {
        w: p.omega_damped(-1.0),
        u: p.omega_prime,
        ap: p.omega_a_shifted(1.0),
        am: p.omega_a_shifted(-1.0),
        bp: p.omega_b_shifted(1.0),
        bm: p.omega_b_shifted(-1.0),
    }
}

/// Deviation of the full combined-denominator identity, measured against
/// the summed magnitude of the terms entering both routes.
pub fn eq_combined_deviation(p: &KernelParams) -> Option<f64> {
    let direct = denominator_inverse_sum(p).ok()?;
    let combined = combined_denominator_sum(p).ok()?;
    let s = shifted(p);
    let k = spectral_kernels(p, s.u).ok()?;
    let bracket1 = (s.w + s.u).inv() + (p.omega_damped(1.0) - s.u).inv();
    let bracket2 = (s.u + s.w).inv() + (s.u - s.w).inv();
    let f2_at_w = vdw_core::kernels::f2(p, s.w).ok()?;
    let scale: f64 = energy_denominators(p)
        .iter()
        .map(|d| d.norm().recip())
        .sum::<f64>()
        + (k.f1 * bracket1).norm()
        + (f2_at_w * bracket2).norm();
    Some((direct - combined).norm() / scale)
}

/// Deviations of the four partial combination identities, each measured
/// against the magnitudes of its participating inverse denominators (the
/// sums cancel strongly when the two atomic transitions nearly coincide).
pub fn partial_identity_deviations(p: &KernelParams) -> [f64; 4] {
    let d = energy_denominators(p);
    let s = shifted(p);
    let rel = |terms: &[Complex64], rhs: Complex64, rhs_scale: f64| {
        let lhs: Complex64 = terms.iter().sum();
        let scale: f64 = terms.iter().map(|t| t.norm()).sum::<f64>() + rhs.norm() + rhs_scale;
        (lhs - rhs).norm() / scale
    };
    let bracket_19 = ((s.w + s.u) * (s.am + s.bm)).inv();
    let bracket_412 = ((s.u - s.w) * (s.ap + s.bp)).inv();
    [
        rel(
            &[d[1].inv(), d[6].inv(), d[9].inv()],
            ((s.w - s.u) * (s.u + s.am) * (s.u + s.bp)).inv(),
            0.0,
        ),
        rel(
            &[d[2].inv(), d[5].inv(), d[10].inv()],
            ((s.w + s.u) * (s.u + s.ap) * (s.u + s.bm)).inv(),
            0.0,
        ),
        rel(
            &[d[0].inv(), d[8].inv()],
            bracket_19 * ((s.w + s.am).inv() + (s.u + s.bm).inv()),
            bracket_19.norm() * ((s.w + s.am).norm().recip() + (s.u + s.bm).norm().recip()),
        ),
        rel(
            &[d[3].inv(), d[11].inv()],
            bracket_412 * ((s.w - s.ap).inv() - (s.u + s.bp).inv()),
            bracket_412.norm() * ((s.w - s.ap).norm().recip() + (s.u + s.bp).norm().recip()),
        ),
    ]
}

/// Deviations of `g1 = f1* + f2*` and `g2 = Im[f1 + f2]`, measured against
/// the summed magnitudes of the fractions entering either route (near an
/// atomic resonance the individual fractions dwarf the final values).
pub fn g_identity_deviations(p: &KernelParams) -> Option<(f64, f64)> {
    let k = spectral_kernels(p, p.omega).ok()?;
    let ff = k.f1 + k.f2;
    let s = shifted(p);
    let om = p.omega;
    let f_terms = [
        ((s.ap + s.bp) * (om + s.ap)).inv(),
        ((s.am + s.bm) * (om + s.bm)).inv(),
        ((om + s.ap) * (om + s.bm)).inv(),
        ((s.ap + s.bp) * (om - s.ap)).inv(),
        ((s.am + s.bm) * (om + s.am)).inv(),
        ((om + s.am).inv() - (om - s.ap).inv()) * (om + s.bm).inv(),
    ];
    let g_terms = [
        (om + s.bp).inv() * ((om + s.ap).inv() + (om + s.am).inv() - (om - s.am).inv()),
        (s.ap + s.bp).inv() * ((om + s.ap).inv() + (om + s.bp).inv()),
        (s.am + s.bm).inv() * ((om + s.am).inv() + (om - s.am).inv()),
    ];
    let scale = f_terms.iter().map(|t| t.norm()).sum::<f64>()
        + g_terms.iter().map(|t| t.norm()).sum::<f64>();
    Some((
        (k.g1 - ff.conj()).norm() / scale,
        (k.g2 - ff.im).abs() / scale,
    ))
}

pub fn run_kernel_check(seed: u64, count: usize, tolerance: f64) -> KernelCheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names = [
        "combined_denominator_sum",
        "partial_d2_d7_d10",
        "partial_d3_d6_d11",
        "partial_d1_d9",
        "partial_d4_d12",
        "g1_equals_conj_f1_plus_f2",
        "g2_equals_im_f1_plus_f2",
    ];
    let mut max_dev = [0.0f64; 7];
    let mut evaluated = 0usize;
    while evaluated < count {
        let p = random_params(&mut rng);
        let Some(eq50) = eq_combined_deviation(&p) else {
            continue; // landed on a pole; draw again
        };
        let Some((g1, g2)) = g_identity_deviations(&p) else {
            continue;
        };
        let partial = partial_identity_deviations(&p);
        let all = [eq50, partial[0], partial[1], partial[2], partial[3], g1, g2];
        for (slot, value) in max_dev.iter_mut().zip(all) {
            *slot = slot.max(value);
        }
        evaluated += 1;
    }

    let header: Vec<String> = ["check", "count", "max_rel_deviation", "tolerance", "status"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut lines = Vec::new();
    let mut failures = 0;
    for (name, deviation) in names.iter().zip(max_dev) {
        let pass = deviation <= tolerance;
        if !pass {
            failures += 1;
        }
        lines.push(format!(
            "{name},{count},{},{},{}",
            fmt_float(deviation),
            fmt_float(tolerance),
            if pass { "pass" } else { "fail" }
        ));
    }
    let csv = format!("{}\n{}\n", header.join(","), lines.join("\n"));
    let worst = max_dev.iter().cloned().fold(0.0, f64::max);
    KernelCheckReport {
        csv,
        failures,
        summary: format!(
            "{count} parameter sets, worst deviation {:e}, {failures} check(s) failing",
            worst
        ),
    }
}
