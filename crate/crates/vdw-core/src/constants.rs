//! Physical constants (SI units, CODATA 2018).
//!
//! `MU0` is derived from `EPS0` and `C` so that `MU0 * EPS0 * C^2 == 1`
//! holds to machine precision; several force prefactors rely on that
//! identity when cross-checked against their `1/eps0^2` closed forms.

/// Speed of light in vacuum, m/s (exact).
pub const C: f64 = 299_792_458.0;

/// Reduced Planck constant, J s (exact).
pub const HBAR: f64 = 1.054_571_817e-34;

/// Vacuum permittivity, F/m.
pub const EPS0: f64 = 8.854_187_812_8e-12;

/// Vacuum permeability, N/A^2, derived as 1/(eps0 c^2).
pub const MU0: f64 = 1.0 / (EPS0 * C * C);

/// Elementary charge, C (exact); doubles as J per eV.
pub const EV: f64 = 1.602_176_634e-19;

/// One Debye in C m.
pub const DEBYE: f64 = 1e-21 / C;
