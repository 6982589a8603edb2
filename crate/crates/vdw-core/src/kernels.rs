//! Frequency-domain kernel algebra of the two-atom force.
//!
//! Sixteen energy denominators built from linewidth-shifted frequencies,
//! their combination into the spectral functions f1/f2, the derived
//! g1/g2 kernels, and the narrow-linewidth limits. All functions are pure
//! and directly property-testable.

use num_complex::Complex64;
use thiserror::Error;

/// A factor magnitude below `POLE_FACTOR` times its characteristic scale is
/// treated as an (approximate) pole hit rather than a regular value.
pub const POLE_FACTOR: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("kernel evaluated within {POLE_FACTOR:e} of the pole in factor {factor}")]
    PoleProximity { factor: &'static str },
    #[error("kernel evaluation produced a non-finite value (exact pole hit)")]
    NonFinite,
}

/// Parameters of one (A-transition, B-transition) kernel evaluation.
///
/// `omega` and `omega_prime` are the two photon frequencies (complex to
/// allow analyticity checks); `omega_a`, `omega_b` are the signed transition
/// frequencies of atoms A and B; the half linewidths are
/// `(Gamma_k + Gamma_n)/2` per atom, and `photon_damping` is the
/// infinitesimal damping attached to `omega`.
#[derive(Debug, Clone, Copy)]
pub struct KernelParams {
    pub omega: Complex64,
    pub omega_prime: Complex64,
    pub omega_a: f64,
    pub omega_b: f64,
    pub half_width_a: f64,
    pub half_width_b: f64,
    pub photon_damping: f64,
}

impl KernelParams {
    /// Shifted A frequency `omega_a +/- i eps_A`.
    pub fn omega_a_shifted(&self, sign: f64) -> Complex64 {
        Complex64::new(self.omega_a, sign * self.half_width_a)
    }

    /// Shifted B frequency `omega_b +/- i eps_B`.
    pub fn omega_b_shifted(&self, sign: f64) -> Complex64 {
        Complex64::new(self.omega_b, sign * self.half_width_b)
    }

    /// Damped photon frequency `omega +/- i eps`.
    pub fn omega_damped(&self, sign: f64) -> Complex64 {
        self.omega + Complex64::new(0.0, sign * self.photon_damping)
    }

    fn conjugated_variables(&self) -> Self {
        Self {
            omega: self.omega.conj(),
            omega_prime: self.omega_prime.conj(),
            ..*self
        }
    }

    fn frequency_scale(&self) -> f64 {
        self.omega
            .norm()
            .max(self.omega_prime.norm())
            .max(self.omega_a.abs())
            .max(self.omega_b.abs())
    }
}

struct Shifted {
    w: Complex64,
    wp: Complex64,
    u: Complex64,
    ap: Complex64,
    am: Complex64,
    bp: Complex64,
    bm: Complex64,
}

impl Shifted {
    fn new(p: &KernelParams) -> Self {
        Self {
            w: p.omega_damped(-1.0),
            wp: p.omega_damped(1.0),
            u: p.omega_prime,
            ap: p.omega_a_shifted(1.0),
            am: p.omega_a_shifted(-1.0),
            bp: p.omega_b_shifted(1.0),
            bm: p.omega_b_shifted(-1.0),
        }
    }
}

/// The sixteen energy denominators D1..D16 (products, not inverses).
/// Exact pole hits simply produce zero entries.
pub fn energy_denominators(p: &KernelParams) -> [Complex64; 16] {
    let Shifted {
        w,
        wp: _,
        u,
        ap,
        am,
        bp,
        bm,
    } = Shifted::new(p);
    [
        (w + am) * (u + bm) * (am + bm),
        (w + am) * (u + bp) * (am - bp),
        (w - ap) * (u + bm) * (ap - bm),
        (w - ap) * (u + bp) * (ap + bp),
        (w + am) * (u + am) * (am + bm),
        -((w - ap) * (u + ap) * (ap - bm)),
        -((w + am) * (u + am) * (am - bp)),
        (w - ap) * (u + ap) * (ap + bp),
        (w + u) * (w + am) * (u + bm),
        (w - u) * (w + am) * (u + bp),
        -((w + u) * (w - ap) * (u + bm)),
        -((w - u) * (w - ap) * (u + bp)),
        (w + u) * (w + am) * (w + bm),
        -((w - u) * (w + am) * (w + bm)),
        -((w + u) * (w - ap) * (w + bm)),
        (w - u) * (w - ap) * (w + bm),
    ]
}

/// Neumaier-compensated complex accumulator; keeps the direct 16-term sum
/// accurate to a few ulp of the largest term.
#[derive(Default)]
struct CompensatedSum {
    sum: Complex64,
    compensation: Complex64,
}

impl CompensatedSum {
    fn add(&mut self, x: Complex64) {
        let t_re = self.sum.re + x.re;
        self.compensation.re += if self.sum.re.abs() >= x.re.abs() {
            (self.sum.re - t_re) + x.re
        } else {
            (x.re - t_re) + self.sum.re
        };
        let t_im = self.sum.im + x.im;
        self.compensation.im += if self.sum.im.abs() >= x.im.abs() {
            (self.sum.im - t_im) + x.im
        } else {
            (x.im - t_im) + self.sum.im
        };
        self.sum = Complex64::new(t_re, t_im);
    }

    fn value(&self) -> Complex64 {
        self.sum + self.compensation
    }
}

fn half_inverse_sum(p: &KernelParams) -> Result<Complex64, KernelError> {
    let scale = p.frequency_scale();
    let d_scale = scale * scale * scale * POLE_FACTOR;
    let mut acc = CompensatedSum::default();
    for d in energy_denominators(p) {
        if d.norm() < d_scale {
            return Err(KernelError::PoleProximity {
                factor: "energy denominator",
            });
        }
        let inv = d.inv();
        if !inv.re.is_finite() || !inv.im.is_finite() {
            return Err(KernelError::NonFinite);
        }
        acc.add(inv);
    }
    Ok(acc.value())
}

/// Direct route: `sum_i 1/D_i + c.c.`, where c.c. conjugates every
/// explicit imaginary shift as well as the photon frequencies.
pub fn denominator_inverse_sum(p: &KernelParams) -> Result<Complex64, KernelError> {
    Ok(half_inverse_sum(p)? + half_inverse_sum(&p.conjugated_variables())?.conj())
}

fn checked_inv(x: Complex64, scale: f64, factor: &'static str) -> Result<Complex64, KernelError> {
    if x.norm() < POLE_FACTOR * scale {
        return Err(KernelError::PoleProximity { factor });
    }
    Ok(x.inv())
}

/// Spectral function f1 at argument `xi`.
pub fn f1(p: &KernelParams, xi: Complex64) -> Result<Complex64, KernelError> {
    let s = Shifted::new(p);
    let scale = p.frequency_scale().max(xi.norm());
    let inv_ab_p = checked_inv(s.ap + s.bp, scale, "omega_a(+) + omega_b(+)")?;
    let inv_ab_m = checked_inv(s.am + s.bm, scale, "omega_a(-) + omega_b(-)")?;
    let inv_xi_ap = checked_inv(xi + s.ap, scale, "xi + omega_a(+)")?;
    let inv_xi_bm = checked_inv(xi + s.bm, scale, "xi + omega_b(-)")?;
    Ok(inv_ab_p * inv_xi_ap + inv_ab_m * inv_xi_bm + inv_xi_ap * inv_xi_bm)
}

/// Spectral function f2 at argument `xi`.
pub fn f2(p: &KernelParams, xi: Complex64) -> Result<Complex64, KernelError> {
    let s = Shifted::new(p);
    let scale = p.frequency_scale().max(xi.norm());
    let inv_ab_p = checked_inv(s.ap + s.bp, scale, "omega_a(+) + omega_b(+)")?;
    let inv_ab_m = checked_inv(s.am + s.bm, scale, "omega_a(-) + omega_b(-)")?;
    let inv_xi_map = checked_inv(xi - s.ap, scale, "xi - omega_a(+)")?;
    let inv_xi_am = checked_inv(xi + s.am, scale, "xi + omega_a(-)")?;
    let inv_xi_bm = checked_inv(xi + s.bm, scale, "xi + omega_b(-)")?;
    Ok(inv_ab_p * inv_xi_map + inv_ab_m * inv_xi_am + (inv_xi_am - inv_xi_map) * inv_xi_bm)
}

/// Combined route for the same quantity as [`denominator_inverse_sum`]:
/// `f1(omega')(1/(w + omega') + 1/(w* - omega'))
///  + f2(w)(1/(omega' + w) + 1/(omega' - w)) + c.c.` with `w = omega - i eps`.
pub fn combined_denominator_sum(p: &KernelParams) -> Result<Complex64, KernelError> {
    fn half(p: &KernelParams) -> Result<Complex64, KernelError> {
        let s = Shifted::new(p);
        let scale = p.frequency_scale();
        let bracket1 = checked_inv(s.w + s.u, scale, "omega(-) + omega'")?
            + checked_inv(s.wp - s.u, scale, "omega(+) - omega'")?;
        let bracket2 = checked_inv(s.u + s.w, scale, "omega' + omega(-)")?
            + checked_inv(s.u - s.w, scale, "omega' - omega(-)")?;
        Ok(f1(p, s.u)? * bracket1 + f2(p, s.w)? * bracket2)
    }
    Ok(half(p)? + half(&p.conjugated_variables())?.conj())
}

/// The four kernels evaluated together: f1 and f2 at `xi`, g1 and g2 at the
/// parameter set's `omega`. g2 is meaningful for real `omega`.
#[derive(Debug, Clone, Copy)]
pub struct SpectralKernels {
    pub f1: Complex64,
    pub f2: Complex64,
    pub g1: Complex64,
    pub g2: f64,
}

/// Evaluate f1(xi), f2(xi) together with g1(omega) and g2(omega).
///
/// g1 is evaluated from its expanded form and g2 from its factored
/// resonance form, so the constructions `g1 = f1* + f2*` and
/// `g2 = Im[f1 + f2]` remain independent cross-checks.
pub fn spectral_kernels(p: &KernelParams, xi: Complex64) -> Result<SpectralKernels, KernelError> {
    let s = Shifted::new(p);
    let om = p.omega;
    let scale = p.frequency_scale();
    let inv_om_bp = checked_inv(om + s.bp, scale, "omega + omega_b(+)")?;
    let inv_om_ap = checked_inv(om + s.ap, scale, "omega + omega_a(+)")?;
    let inv_om_am = checked_inv(om + s.am, scale, "omega + omega_a(-)")?;
    let inv_om_mam = checked_inv(om - s.am, scale, "omega - omega_a(-)")?;
    let inv_ab_p = checked_inv(s.ap + s.bp, scale, "omega_a(+) + omega_b(+)")?;
    let inv_ab_m = checked_inv(s.am + s.bm, scale, "omega_a(-) + omega_b(-)")?;
    let g1 = inv_om_bp * (inv_om_ap + inv_om_am - inv_om_mam)
        + inv_ab_p * (inv_om_ap + inv_om_bp)
        + inv_ab_m * (inv_om_am + inv_om_mam);

    let inv_ap_om = checked_inv(s.ap + om, scale, "omega_a(+) + omega")?;
    let inv_ap_mom = checked_inv(s.ap - om, scale, "omega_a(+) - omega")?;
    let inv_om_bm = checked_inv(om + s.bm, scale, "omega + omega_b(-)")?;
    let g2 = 2.0 * (inv_ap_om + inv_ap_mom).re * inv_om_bm.im;

    Ok(SpectralKernels {
        f1: f1(p, xi)?,
        f2: f2(p, xi)?,
        g1,
        g2,
    })
}

/// Narrow-linewidth limit of g1: the factored form valid to first order in
/// the half widths.
pub fn g1_narrow_linewidth(p: &KernelParams, omega: Complex64) -> Complex64 {
    let a = Complex64::new(p.omega_a, 0.0);
    let b = Complex64::new(p.omega_b, 0.0);
    let i_ea = Complex64::new(0.0, p.half_width_a);
    let i_eb = Complex64::new(0.0, p.half_width_b);
    let ea2 = Complex64::new(p.half_width_a * p.half_width_a, 0.0);
    4.0 * (omega - a) * (omega + a) / (((omega + a) * (omega + a) + ea2) * (omega - a + i_ea))
        * (omega + a + b)
        / ((omega + b + i_eb) * (a + b))
}

/// Weight of the g2 resonance line in the vanishing-linewidth limit:
/// integrating g2 against a test function concentrates at the emission
/// frequency `-omega_b` with weight
/// `2 pi Re[1/(omega_a(+) - omega_b) + 1/(omega_a(+) + omega_b)]`.
pub fn g2_resonance_weight(p: &KernelParams) -> f64 {
    let emission = Complex64::new(-p.omega_b, 0.0);
    let ap = p.omega_a_shifted(1.0);
    2.0 * std::f64::consts::PI * ((ap + emission).inv() + (ap - emission).inv()).re
}
