//! Physical constants (CODATA 2018) and derived conversion factors.
//!
//! Every derived constant below is computed from the four fixed inputs so the
//! whole crate is bit-reproducible from a single table.

/// Fine-structure constant.
pub const ALPHA: f64 = 1.0 / 137.035999084;

/// hbar * c in eV nm.
pub const HBAR_C_EV_NM: f64 = 197.326_980_4;

/// Electron rest energy in eV.
pub const MEC2_EV: f64 = 510_998.95;

/// Bohr radius in Angstrom.
pub const A0_ANGSTROM: f64 = 0.529_177_210_903;

/// hbar in eV s.
pub const HBAR_EV_S: f64 = 6.582_119_569e-16;

/// Speed of light in m/s (exact).
pub const C_M_S: f64 = 299_792_458.0;

/// Vacuum permittivity in F/m.
pub const EPS0_F_M: f64 = 8.854_187_812_8e-12;

/// Hartree energy in eV: m c^2 alpha^2.
pub const HARTREE_EV: f64 = MEC2_EV * ALPHA * ALPHA;

/// Speed of light in atomic units.
pub const C_AU: f64 = 1.0 / ALPHA;

/// Atomic unit of electric field in V/m: Hartree / (e a0).
pub const EFIELD_AU_V_M: f64 = HARTREE_EV / (A0_ANGSTROM * 1e-10);

/// Atomic unit of time in seconds: hbar / Hartree.
pub const TIME_AU_S: f64 = HBAR_EV_S / HARTREE_EV;

/// Peak-field atomic unit of intensity in W/cm^2: eps0 c E_au^2 / 2, for the
/// convention I = eps0 c E^2 / 2 of a linearly polarized beam.
pub fn intensity_au_w_cm2() -> f64 {
    0.5 * EPS0_F_M * C_M_S * EFIELD_AU_V_M * EFIELD_AU_V_M * 1e-4
}
