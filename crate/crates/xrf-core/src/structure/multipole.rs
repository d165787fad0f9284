//! Relativistic multipole transition amplitudes between Dirac-Coulomb
//! orbitals, with the full retarded photon field (spherical Bessel radial
//! factors) and a choice of two gauges for electric multipoles.
//!
//! Operator conventions: photon multipole (J, M) with wave number
//! k = omega / c acts as
//!
//!   magnetic:   alpha . j_J(kr) Y_JJM
//!   electric:   alpha . [ c_- j_{J-1} Y_{J,J-1,M} - c_+ j_{J+1} Y_{J,J+1,M} ]
//!
//! with c_- = sqrt((J+1)/(2J+1)), c_+ = sqrt(J/(2J+1)). The Babushkin gauge
//! adds the pure-gauge combination (which vanishes between on-shell states)
//! scaled by sqrt((J+1)/J), bringing in the scalar j_J Y_JM term. Matrix
//! elements of every operator here are purely imaginary with these phase
//! conventions, so reduced matrix elements are reported as real numbers.

use crate::angular::{clebsch_gordan, wigner_3j};
use crate::bessel::spherical_jl;
use crate::constants::{ALPHA, C_M_S, EFIELD_AU_V_M, EPS0_F_M, HARTREE_EV, HBAR_EV_S};
use crate::quad::integrate_decaying;
use crate::C64;

use super::{l_of_kappa, DiracOrbital};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Multipolarity {
    Electric,
    Magnetic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gauge {
    Transverse,
    Babushkin,
}

/// <chi_{ms_a} | sigma_q | chi_{ms_b}> in the spherical basis, spins doubled.
fn sigma_spherical(tms_a: i32, tq: i32, tms_b: i32) -> f64 {
    3.0_f64.sqrt() * clebsch_gordan(1, tms_b, 2, tq, 1, tms_a)
}

/// Integral of Y*_{l1 m1} Y_{L M} Y_{l2 m2} over the sphere.
fn gaunt(l1: u32, m1: i32, big_l: u32, big_m: i32, l2: u32, m2: i32) -> f64 {
    let pref = ((2 * l1 + 1) as f64 * (2 * big_l + 1) as f64 * (2 * l2 + 1) as f64
        / (4.0 * std::f64::consts::PI))
        .sqrt();
    let sign = if m1 % 2 == 0 { 1.0 } else { -1.0 };
    pref * sign
        * wigner_3j(2 * l1 as i32, 2 * big_l as i32, 2 * l2 as i32, 0, 0, 0)
        * wigner_3j(
            2 * l1 as i32,
            2 * big_l as i32,
            2 * l2 as i32,
            -2 * m1,
            2 * big_m,
            2 * m2,
        )
}

/// <Omega_{kappa_a m_a} | sigma . Y^{J L}_M | Omega_{kappa_b m_b}>, spinor
/// spherical harmonics contracted with a vector spherical harmonic.
fn sigma_vsh_bracket(
    kappa_a: i32,
    tma: i32,
    big_j: u32,
    l_ph: u32,
    tbig_m: i32,
    kappa_b: i32,
    tmb: i32,
) -> f64 {
    let la = l_of_kappa(kappa_a);
    let lb = l_of_kappa(kappa_b);
    let tja = 2 * kappa_a.abs() - 1;
    let tjb = 2 * kappa_b.abs() - 1;
    let mut acc = 0.0;
    for tms_a in [-1i32, 1] {
        for tms_b in [-1i32, 1] {
            for tq in [-2i32, 0, 2] {
                let tm_orb = tbig_m - tq;
                acc += clebsch_gordan(2 * la as i32, tma - tms_a, 1, tms_a, tja, tma)
                    * clebsch_gordan(2 * lb as i32, tmb - tms_b, 1, tms_b, tjb, tmb)
                    * clebsch_gordan(2 * l_ph as i32, tm_orb, 2, tq, 2 * big_j as i32, tbig_m)
                    * gaunt(la, (tma - tms_a) / 2, l_ph, tm_orb / 2, lb, (tmb - tms_b) / 2)
                    * sigma_spherical(tms_a, tq, tms_b);
            }
        }
    }
    acc
}

/// <Omega_{kappa_a m_a} | Y_{J M} | Omega_{kappa_b m_b}>.
fn scalar_sh_bracket(kappa_a: i32, tma: i32, big_j: u32, tbig_m: i32, kappa_b: i32, tmb: i32) -> f64 {
    let la = l_of_kappa(kappa_a);
    let lb = l_of_kappa(kappa_b);
    let tja = 2 * kappa_a.abs() - 1;
    let tjb = 2 * kappa_b.abs() - 1;
    let mut acc = 0.0;
    for tms in [-1i32, 1] {
        acc += clebsch_gordan(2 * la as i32, tma - tms, 1, tms, tja, tma)
            * clebsch_gordan(2 * lb as i32, tmb - tms, 1, tms, tjb, tmb)
            * gaunt(la, (tma - tms) / 2, big_j, tbig_m / 2, lb, (tmb - tms) / 2);
    }
    acc
}

fn radial_pair_integral(
    f_a: impl Fn(f64) -> f64,
    f_b: impl Fn(f64) -> f64,
    l_bessel: u32,
    k_au: f64,
    scale: f64,
) -> f64 {
    integrate_decaying(|r| f_a(r) * f_b(r) * spherical_jl(l_bessel, k_au * r), scale)
}

struct TransitionKernel<'a> {
    a: &'a DiracOrbital,
    b: &'a DiracOrbital,
    k_au: f64,
    scale: f64,
}

impl<'a> TransitionKernel<'a> {
    fn new(a: &'a DiracOrbital, b: &'a DiracOrbital, omega_ev: f64) -> Self {
        assert!(omega_ev > 0.0, "photon energy must be positive, got {omega_ev} eV");
        let k_au = omega_ev / HARTREE_EV * ALPHA;
        let scale = a.radial_scale_au().max(b.radial_scale_au());
        Self { a, b, k_au, scale }
    }

    /// i [ I(P_a Q_b j_L) ang(k_a, -k_b) - I(Q_a P_b j_L) ang(-k_a, k_b) ],
    /// the matrix element of alpha . (j_L Y^{J L}_M).
    fn alpha_term(&self, tma: i32, tmb: i32, big_j: u32, l_ph: u32, tbig_m: i32) -> C64 {
        let ka = self.a.label.kappa;
        let kb = self.b.label.kappa;
        let ang_pq = sigma_vsh_bracket(ka, tma, big_j, l_ph, tbig_m, -kb, tmb);
        let ang_qp = sigma_vsh_bracket(-ka, tma, big_j, l_ph, tbig_m, kb, tmb);
        let mut value = 0.0;
        if ang_pq != 0.0 {
            value += ang_pq
                * radial_pair_integral(
                    |r| self.a.large(r),
                    |r| self.b.small(r),
                    l_ph,
                    self.k_au,
                    self.scale,
                );
        }
        if ang_qp != 0.0 {
            value -= ang_qp
                * radial_pair_integral(
                    |r| self.a.small(r),
                    |r| self.b.large(r),
                    l_ph,
                    self.k_au,
                    self.scale,
                );
        }
        C64::new(0.0, value)
    }

    /// Matrix element of the scalar j_J(kr) Y_{J M} identity-in-spin operator.
    fn scalar_term(&self, tma: i32, tmb: i32, big_j: u32, tbig_m: i32) -> C64 {
        let ka = self.a.label.kappa;
        let kb = self.b.label.kappa;
        let ang_pp = scalar_sh_bracket(ka, tma, big_j, tbig_m, kb, tmb);
        let ang_qq = scalar_sh_bracket(-ka, tma, big_j, tbig_m, -kb, tmb);
        let mut value = 0.0;
        if ang_pp != 0.0 {
            value += ang_pp
                * radial_pair_integral(
                    |r| self.a.large(r),
                    |r| self.b.large(r),
                    big_j,
                    self.k_au,
                    self.scale,
                );
        }
        if ang_qq != 0.0 {
            value += ang_qq
                * radial_pair_integral(
                    |r| self.a.small(r),
                    |r| self.b.small(r),
                    big_j,
                    self.k_au,
                    self.scale,
                );
        }
        C64::new(value, 0.0)
    }
}

fn parity_allowed(a: &DiracOrbital, b: &DiracOrbital, big_j: u32, mult: Multipolarity) -> bool {
    let photon = match mult {
        Multipolarity::Electric => {
            if big_j % 2 == 0 {
                1
            } else {
                -1
            }
        }
        Multipolarity::Magnetic => {
            if big_j % 2 == 0 {
                -1
            } else {
                1
            }
        }
    };
    a.label.parity() * b.label.parity() == photon
}

/// Single matrix element <a m_a | T^(lambda)_{J M} | b m_b> at photon energy
/// omega_ev; M is fixed to m_a - m_b by angular momentum conservation.
pub fn transition_amplitude(
    a: &DiracOrbital,
    tma: i32,
    b: &DiracOrbital,
    tmb: i32,
    big_j: u32,
    mult: Multipolarity,
    gauge: Gauge,
    omega_ev: f64,
) -> C64 {
    assert!(big_j >= 1, "multipole order must be at least 1");
    let tbig_m = tma - tmb;
    if tbig_m.abs() > 2 * big_j as i32 || !parity_allowed(a, b, big_j, mult) {
        return C64::ZERO;
    }
    let tja = a.label.twice_j();
    let tjb = b.label.twice_j();
    if (tja - tjb).abs() > 2 * big_j as i32 || 2 * big_j as i32 > tja + tjb {
        return C64::ZERO;
    }

    let kernel = TransitionKernel::new(a, b, omega_ev);
    let jf = big_j as f64;
    match mult {
        Multipolarity::Magnetic => kernel.alpha_term(tma, tmb, big_j, big_j, tbig_m),
        Multipolarity::Electric => {
            let c_minus = ((jf + 1.0) / (2.0 * jf + 1.0)).sqrt();
            let c_plus = (jf / (2.0 * jf + 1.0)).sqrt();
            let lower = kernel.alpha_term(tma, tmb, big_j, big_j - 1, tbig_m);
            let upper = kernel.alpha_term(tma, tmb, big_j, big_j + 1, tbig_m);
            let transverse = lower * c_minus - upper * c_plus;
            match gauge {
                Gauge::Transverse => transverse,
                Gauge::Babushkin => {
                    let gb = ((jf + 1.0) / jf).sqrt();
                    let scalar = kernel.scalar_term(tma, tmb, big_j, tbig_m);
                    transverse
                        + (lower * c_plus + upper * c_minus - C64::new(0.0, 1.0) * scalar) * gb
                }
            }
        }
    }
}

/// Reduced matrix element <a || T^(lambda)_J || b> with the convention
/// <a m_a | T_{J M} | b m_b> = (-1)^(j_a - m_a) 3j(j_a J j_b; -m_a M m_b) <a||T||b>.
/// The amplitudes are purely imaginary; the imaginary part is returned.
pub fn reduced_matrix_element(
    a: &DiracOrbital,
    b: &DiracOrbital,
    big_j: u32,
    mult: Multipolarity,
    gauge: Gauge,
    omega_ev: f64,
) -> f64 {
    let tja = a.label.twice_j();
    let tjb = b.label.twice_j();
    let mut best = (0.0_f64, 0, 0);
    for tma in (-tja..=tja).step_by(2) {
        for tmb in (-tjb..=tjb).step_by(2) {
            let w = wigner_3j(tja, 2 * big_j as i32, tjb, -tma, tma - tmb, tmb);
            if w.abs() > best.0.abs() {
                best = (w, tma, tmb);
            }
        }
    }
    let (w, tma, tmb) = best;
    if w == 0.0 {
        return 0.0;
    }
    let amp = transition_amplitude(a, tma, b, tmb, big_j, mult, gauge, omega_ev);
    debug_assert!(
        amp.re.abs() <= 1e-10 * amp.im.abs().max(1e-300),
        "amplitude should be purely imaginary, got {amp}"
    );
    let phase = if ((tja - tma) / 2) % 2 == 0 { 1.0 } else { -1.0 };
    amp.im / (phase * w)
}

/// Spontaneous decay rate of the upper orbital a into b through one
/// multipole channel, as an energy width in eV.
pub fn radiative_width_ev(
    a: &DiracOrbital,
    b: &DiracOrbital,
    big_j: u32,
    mult: Multipolarity,
    gauge: Gauge,
) -> f64 {
    let omega_ev = a.energy_ev() - b.energy_ev();
    assert!(omega_ev > 0.0, "radiative_width_ev needs the upper state first");
    let rme = reduced_matrix_element(a, b, big_j, mult, gauge, omega_ev);
    let omega_au = omega_ev / HARTREE_EV;
    let degeneracy = f64::from(a.label.twice_j() + 1);
    let width_au = 8.0 * std::f64::consts::PI * omega_au * ALPHA * rme * rme / degeneracy;
    width_au * HARTREE_EV
}

/// The same width expressed as a rate in inverse seconds.
pub fn radiative_rate_per_s(
    a: &DiracOrbital,
    b: &DiracOrbital,
    big_j: u32,
    mult: Multipolarity,
    gauge: Gauge,
) -> f64 {
    radiative_width_ev(a, b, big_j, mult, gauge) / HBAR_EV_S
}

/// Drive coupling strength mu (atomic units of e a0) between two specific
/// magnetic sublevels for a circularly polarized plane wave carrying one
/// multipole (J, q = m_a - m_b): mu = (c/omega) sqrt(pi (2J+1)) |amplitude|.
pub fn transition_coupling_mu_au(
    a: &DiracOrbital,
    tma: i32,
    b: &DiracOrbital,
    tmb: i32,
    big_j: u32,
    mult: Multipolarity,
    gauge: Gauge,
) -> f64 {
    let omega_ev = (a.energy_ev() - b.energy_ev()).abs();
    let amp = transition_amplitude(a, tma, b, tmb, big_j, mult, gauge, omega_ev);
    let omega_au = omega_ev / HARTREE_EV;
    (1.0 / (ALPHA * omega_au)) * (std::f64::consts::PI * (2.0 * big_j as f64 + 1.0)).sqrt()
        * amp.norm()
}

/// Rabi frequency in eV for coupling mu (atomic units) driven at the given
/// intensity in W/cm^2, using the running-wave field E = sqrt(2 I / (eps0 c)).
pub fn rabi_frequency_ev(mu_au: f64, intensity_w_cm2: f64) -> f64 {
    let intensity_w_m2 = intensity_w_cm2 * 1.0e4;
    let field_v_m = (2.0 * intensity_w_m2 / (EPS0_F_M * C_M_S)).sqrt();
    mu_au * (field_v_m / EFIELD_AU_V_M) * HARTREE_EV
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::intensity_au_w_cm2;
    use crate::structure::BoundStateLabel;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn orbital(n: u32, kappa: i32, z: f64) -> DiracOrbital {
        DiracOrbital::new(BoundStateLabel::new(n, kappa).unwrap(), z).unwrap()
    }

    #[test]
    fn spin_matrix_elements_match_pauli_matrices() {
        // sigma_{+1} = -(sx + i sy)/sqrt(2), sigma_0 = sz,
        // sigma_{-1} = (sx - i sy)/sqrt(2); basis (up, down).
        let s = std::f64::consts::SQRT_2;
        let explicit = |tms_a: i32, tq: i32, tms_b: i32| -> f64 {
            match (tms_a, tq, tms_b) {
                (1, 0, 1) => 1.0,
                (-1, 0, -1) => -1.0,
                (1, 2, -1) => -s,
                (-1, -2, 1) => s,
                _ => 0.0,
            }
        };
        for tms_a in [-1, 1] {
            for tms_b in [-1, 1] {
                for tq in [-2, 0, 2] {
                    assert_abs_diff_eq!(
                        sigma_spherical(tms_a, tq, tms_b),
                        explicit(tms_a, tq, tms_b),
                        epsilon = 1e-14
                    );
                }
            }
        }
    }

    #[test]
    fn gaunt_closed_forms() {
        let y00 = 1.0 / (4.0 * std::f64::consts::PI).sqrt();
        assert_relative_eq!(gaunt(0, 0, 0, 0, 0, 0), y00, max_relative = 1e-14);
        for m in -1..=1 {
            assert_relative_eq!(gaunt(1, m, 0, 0, 1, m), y00, max_relative = 1e-14);
        }
        // <Y_10 | Y_10 | Y_00> = 1/sqrt(4 pi) * sqrt(1/3) * sqrt(3) / ... known:
        assert_relative_eq!(
            gaunt(1, 0, 1, 0, 0, 0),
            y00,
            max_relative = 1e-14
        );
        // Selection rules.
        assert_eq!(gaunt(1, 0, 1, 0, 1, 0), 0.0); // odd parity sum
        assert_eq!(gaunt(2, 1, 1, 1, 0, 0), 0.0); // m mismatch
    }

    #[test]
    fn wigner_eckart_ratios_consistent_across_sublevels() {
        let a = orbital(2, -2, 92.0);
        let b = orbital(1, -1, 92.0);
        let omega = a.energy_ev() - b.energy_ev();
        let mut reference = None;
        for tma in (-3..=3).step_by(2) {
            for tmb in [-1i32, 1] {
                let w = wigner_3j(3, 2, 1, -tma, tma - tmb, tmb);
                let amp =
                    transition_amplitude(&a, tma, &b, tmb, 1, Multipolarity::Electric, Gauge::Transverse, omega);
                if w.abs() < 1e-12 {
                    assert!(amp.norm() < 1e-12);
                    continue;
                }
                let phase = if ((3 - tma) / 2) % 2 == 0 { 1.0 } else { -1.0 };
                let rme = amp.im / (phase * w);
                match reference {
                    None => reference = Some(rme),
                    Some(r) => assert_relative_eq!(rme, r, max_relative = 1e-11),
                }
            }
        }
        assert!(reference.is_some());
    }

    #[test]
    fn gauges_agree_on_shell_for_electric_multipoles() {
        // E1 and E2 across light and heavy ions; the two gauges must agree to
        // high accuracy exactly on shell.
        let cases: [(u32, i32, u32, i32, u32, f64); 4] = [
            (2, 1, 1, -1, 1, 1.0),
            (2, -2, 1, -1, 1, 92.0),
            (3, -3, 1, -1, 2, 54.0),
            (3, 2, 1, -1, 2, 92.0),
        ];
        for &(na, ka, nb, kb, big_j, z) in &cases {
            let a = orbital(na, ka, z);
            let b = orbital(nb, kb, z);
            let omega = a.energy_ev() - b.energy_ev();
            let t = reduced_matrix_element(&a, &b, big_j, Multipolarity::Electric, Gauge::Transverse, omega);
            let bb = reduced_matrix_element(&a, &b, big_j, Multipolarity::Electric, Gauge::Babushkin, omega);
            assert_relative_eq!(t, bb, max_relative = 1e-8);
            assert!(t.abs() > 1e-12, "amplitude unexpectedly zero for Z={z}, J={big_j}");
        }
    }

    #[test]
    fn gauges_differ_off_shell() {
        // Detuned from the transition energy the gauge term no longer
        // vanishes; this guards the on-shell test against passing trivially.
        let a = orbital(2, -2, 92.0);
        let b = orbital(1, -1, 92.0);
        let omega = 1.05 * (a.energy_ev() - b.energy_ev());
        let t = reduced_matrix_element(&a, &b, 1, Multipolarity::Electric, Gauge::Transverse, omega);
        let bb = reduced_matrix_element(&a, &b, 1, Multipolarity::Electric, Gauge::Babushkin, omega);
        assert!(((t - bb) / t).abs() > 1e-5, "gauges should differ off shell");
    }

    #[test]
    fn magnetic_amplitudes_ignore_gauge() {
        let a = orbital(2, -1, 92.0);
        let b = orbital(1, -1, 92.0);
        let omega = a.energy_ev() - b.energy_ev();
        let t = reduced_matrix_element(&a, &b, 1, Multipolarity::Magnetic, Gauge::Transverse, omega);
        let bb = reduced_matrix_element(&a, &b, 1, Multipolarity::Magnetic, Gauge::Babushkin, omega);
        assert_eq!(t, bb);
        assert!(t.abs() > 0.0);
    }

    #[test]
    fn lyman_alpha_rate_matches_reference() {
        // Hydrogen 2p -> 1s: 6.2649e8 per second for either fine-structure
        // component at infinite nuclear mass (reduced-mass shift is 0.05%).
        for kappa in [-2i32, 1] {
            let a = orbital(2, kappa, 1.0);
            let b = orbital(1, -1, 1.0);
            let rate = radiative_rate_per_s(&a, &b, 1, Multipolarity::Electric, Gauge::Transverse);
            assert_relative_eq!(rate, 6.2649e8, max_relative = 1e-3);
        }
    }

    #[test]
    fn relativistic_magnetic_dipole_two_photonless_decay() {
        // Hydrogen 2s -> 1s by M1: a purely relativistic rate, 2.496e-6 per
        // second. The nonrelativistic operator gives exactly zero, so this
        // pins the small-component and retardation machinery.
        let a = orbital(2, -1, 1.0);
        let b = orbital(1, -1, 1.0);
        let rate = radiative_rate_per_s(&a, &b, 1, Multipolarity::Magnetic, Gauge::Transverse);
        assert_relative_eq!(rate, 2.496e-6, max_relative = 0.05);
    }

    #[test]
    fn rates_scale_with_charge_as_expected() {
        // Nonrelativistic scaling: E1 rates go as Z^4, E2 rates as Z^6
        // between hydrogenic ions (omega ~ Z^2, r ~ 1/Z).
        let rate_e1 = |z: f64| {
            radiative_rate_per_s(
                &orbital(2, -2, z),
                &orbital(1, -1, z),
                1,
                Multipolarity::Electric,
                Gauge::Transverse,
            )
        };
        assert_relative_eq!(rate_e1(2.0) / rate_e1(1.0), 16.0, max_relative = 2e-3);

        let rate_e2 = |z: f64| {
            radiative_rate_per_s(
                &orbital(3, -3, z),
                &orbital(1, -1, z),
                2,
                Multipolarity::Electric,
                Gauge::Transverse,
            )
        };
        assert_relative_eq!(rate_e2(2.0) / rate_e2(1.0), 64.0, max_relative = 4e-3);
    }

    #[test]
    fn rabi_frequency_units_and_scaling() {
        // At the atomic unit of intensity a unit dipole gives exactly one
        // Hartree of Rabi energy, and the coupling scales as sqrt(I).
        assert_relative_eq!(
            rabi_frequency_ev(1.0, intensity_au_w_cm2()),
            HARTREE_EV,
            max_relative = 1e-10
        );
        let g1 = rabi_frequency_ev(0.37, 1.0e12);
        let g2 = rabi_frequency_ev(0.37, 4.0e12);
        assert_relative_eq!(g2 / g1, 2.0, max_relative = 1e-12);
    }
}
