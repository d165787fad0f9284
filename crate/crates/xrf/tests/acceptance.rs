//! Acceptance gate: ten numbered checks over structure, dynamics, spectra,
//! and the command line, each printing one pass/fail line with its measured
//! numbers and pinned tolerances. Run
//!
//! ```text
//! cargo test --test acceptance -- --nocapture
//! ```
//!
//! to see every line; under plain `cargo test` only failing criteria print.

use std::process::Command;
use std::time::Instant;

use xrf::scenario::{find_preset, resolve, PRESETS};
use xrf_core::dynamics::ThreeLevelSystem;
use xrf_core::spectrum::{
    analytic_linewidths, correlation, find_peaks, refine_peak, spectrum_fft_oracle,
    DetectionGeometry, EmissionBand, PeakEstimate, SpectrumError,
};
use xrf_core::structure::multipole::{
    rabi_frequency_ev, radiative_rate_per_s, reduced_matrix_element, Gauge, Multipolarity,
};
use xrf_core::structure::{BoundStateLabel, DiracOrbital};

fn report(number: u32, name: &str, pass: bool, detail: &str) {
    println!(
        "criterion {number:02} {name}: {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
}

fn geometry() -> DetectionGeometry {
    DetectionGeometry::head_on(EmissionBand::XRay)
}

fn preset_system(name: &str) -> ThreeLevelSystem {
    resolve(None, Some(name), None).unwrap().system()
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / (n as f64 - 1.0);
    (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
        .collect()
}

/// Seed peaks on a uniform window wide enough for the triplet, then refine
/// each with the closed-form density; sorted by center.
fn refined_peaks(sys: &ThreeLevelSystem) -> Vec<PeakEstimate> {
    let corr = correlation(sys, &geometry(), 1.0).unwrap();
    let lw = analytic_linewidths(sys).unwrap();
    let span = 1.5 * (2.0 * lw.big_g_ev + 5.0 * sys.gamma31_ev);
    let omega = linspace(-span, span, 4001);
    let density = corr.sample(&omega);
    let step = omega[1] - omega[0];
    let mut peaks: Vec<PeakEstimate> = find_peaks(&omega, &density, 1e-6)
        .iter()
        .filter_map(|seed| {
            refine_peak(&corr, seed.center_ev, (4.0 * seed.fwhm_ev).max(8.0 * step))
        })
        .collect();
    peaks.sort_by(|a, b| a.center_ev.total_cmp(&b.center_ev));
    peaks.dedup_by(|a, b| (a.center_ev - b.center_ev).abs() < 0.5 * (a.fwhm_ev + b.fwhm_ev));
    peaks
}

#[test]
fn criterion_01_gauge_invariance() {
    let t0 = Instant::now();
    let zs = [1.0, 10.0, 54.0, 83.0, 92.0];
    let labels: Vec<BoundStateLabel> =
        [(1, -1), (2, -1), (2, 1), (2, -2), (3, -1), (3, 1), (3, -2), (3, 2), (3, -3)]
            .iter()
            .map(|&(n, k)| BoundStateLabel::new(n, k).unwrap())
            .collect();
    let channels = [
        (1u32, Multipolarity::Electric),
        (1, Multipolarity::Magnetic),
        (2, Multipolarity::Electric),
    ];
    // The two gauges agree analytically, but in floating point the difference
    // carries an absolute noise floor of order 1e-14: the closed-form orbital
    // parameters are rounded to f64, and the commutator identity relating the
    // gauges amplifies that rounding by c^2. Channels whose photon energy is
    // large keep the amplitude far above the floor and must agree to 1e-8.
    // Sub-meV fine-structure splittings (Z = 1 intra-shell pairs, down to a
    // few ueV) push the amplitude itself within a few decades of the floor,
    // so those are gated at the conditioning-limited bound instead. The floor
    // is diagnosed, not tuned: the absolute split is Z-independent while the
    // relative split scales as 1/omega.
    let mut worst = 0.0f64;
    let mut worst_corner = 0.0f64;
    let mut open = 0usize;
    let mut corners = 0usize;
    for &z in &zs {
        let orbitals: Vec<DiracOrbital> =
            labels.iter().map(|&l| DiracOrbital::new(l, z).unwrap()).collect();
        for a in &orbitals {
            for b in &orbitals {
                let omega_ev = a.energy_ev() - b.energy_ev();
                if omega_ev <= 1e-6 {
                    continue; // downward transitions only; skip degenerate pairs
                }
                for &(big_j, mult) in &channels {
                    let t = reduced_matrix_element(a, b, big_j, mult, Gauge::Transverse, omega_ev);
                    let bab =
                        reduced_matrix_element(a, b, big_j, mult, Gauge::Babushkin, omega_ev);
                    let denom = t.abs().max(bab.abs());
                    if denom < 1e-20 {
                        continue; // channel closed by selection rules
                    }
                    let split = (t - bab).abs() / denom;
                    if omega_ev >= 1e-3 {
                        worst = worst.max(split);
                        open += 1;
                    } else {
                        worst_corner = worst_corner.max(split);
                        corners += 1;
                    }
                }
            }
        }
    }
    let dt = t0.elapsed().as_secs_f64();
    let pass = worst <= 1e-8 && worst_corner <= 1e-4 && dt < 10.0 && open > 50;
    report(
        1,
        "gauge agreement of multipole amplitudes",
        pass,
        &format!(
            "worst relative transverse/Babushkin split {worst:.2e} over {open} channels with \
             omega >= 1 meV (gate 1e-8); {worst_corner:.2e} over {corners} sub-meV \
             fine-structure channels (f64 conditioning floor, gate 1e-4); {dt:.2} s (gate 10 s)"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_02_hydrogen_lifetime_benchmark() {
    let t0 = Instant::now();
    let orbital = |n, kappa| {
        DiracOrbital::new(BoundStateLabel::new(n, kappa).unwrap(), 1.0).unwrap()
    };
    let ground = orbital(1, -1);
    let target = 6.2649e8;
    let r12 = radiative_rate_per_s(
        &orbital(2, 1),
        &ground,
        1,
        Multipolarity::Electric,
        Gauge::Transverse,
    );
    let r32 = radiative_rate_per_s(
        &orbital(2, -2),
        &ground,
        1,
        Multipolarity::Electric,
        Gauge::Transverse,
    );
    let e12 = (r12 / target - 1.0).abs();
    let e32 = (r32 / target - 1.0).abs();
    let dt = t0.elapsed().as_secs_f64();
    let pass = e12 <= 1e-3 && e32 <= 1e-3 && dt < 1.0;
    report(
        2,
        "hydrogen 2p to 1s rate",
        pass,
        &format!(
            "j=1/2: {r12:.5e}/s (dev {e12:.2e}), j=3/2: {r32:.5e}/s (dev {e32:.2e}) vs \
             {target:.5e}/s in {dt:.2} s (gates 1e-3, 1 s)"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_03_rabi_scaling_between_tabulated_rows() {
    let tl1 = find_preset("tl_row1").unwrap();
    let tl2 = find_preset("tl_row2").unwrap();
    let u1 = find_preset("u_row1").unwrap();
    let u2 = find_preset("u_row2").unwrap();

    let mu_tl = tl1.g21_ev / rabi_frequency_ev(1.0, tl1.intensity_o_w_cm2);
    let pred_tl = rabi_frequency_ev(mu_tl, tl2.intensity_o_w_cm2);
    let res_tl = (pred_tl / tl2.g21_ev - 1.0).abs();

    let mu_u = u1.g31_ev / rabi_frequency_ev(1.0, u1.intensity_x_w_cm2);
    let pred_u = rabi_frequency_ev(mu_u, u2.intensity_x_w_cm2);
    let res_u = (pred_u / u2.g31_ev - 1.0).abs();

    let pass = res_tl <= 0.02 && res_u <= 0.02;
    report(
        3,
        "square-root intensity scaling of tabulated couplings",
        pass,
        &format!(
            "Tl g21 pair dev {res_tl:.2e}, U g31 pair dev {res_u:.2e} (gate 2e-2 each)"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_04_sideband_width_formula_vs_tabulated_values() {
    // With gamma32, gamma21, gamma_d zeroed the sideband width reduces to
    // (3/2) gamma31 R. Residuals against the tabulated widths must stay
    // inside 3% for the Tl rows and Bi row 2, and inside 15% for Bi row 1
    // and the U rows, whose tabulated values fold in an unpublished gamma32.
    let rows: [(&str, f64, f64); 6] = [
        ("tl_row1", 7.1e-5, 0.03),
        ("tl_row2", 7.2e-7, 0.03),
        ("bi_fig1b", 9.7e-5, 0.15),
        ("bi_row2", 1.9e-4, 0.03),
        ("u_row1", 3.7e-5, 0.15),
        ("u_row2", 1.3e-3, 0.15),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, table_ev, gate) in rows {
        let p = find_preset(name).unwrap();
        let bare = ThreeLevelSystem {
            delta_x_ev: 0.0,
            delta_o_ev: 0.0,
            g31_ev: p.g31_ev,
            g21_ev: p.g21_ev,
            gamma31_ev: p.gamma31_ev,
            gamma32_ev: 0.0,
            gamma21_ev: 0.0,
            gamma_d_ev: 0.0,
        };
        let res = analytic_linewidths(&bare).unwrap().sideband_fwhm_ev / table_ev - 1.0;
        let with32 = ThreeLevelSystem {
            gamma32_ev: p.gamma32_over_gamma31 * p.gamma31_ev,
            ..bare
        };
        let res32 = analytic_linewidths(&with32).unwrap().sideband_fwhm_ev / table_ev - 1.0;
        let ok = res.abs() <= gate;
        pass &= ok;
        parts.push(format!(
            "{name} {:+.1}% (gate {:.0}%{}; with assumed gamma32 {:+.1}%)",
            100.0 * res,
            100.0 * gate,
            if ok { "" } else { ", exceeded" },
            100.0 * res32,
        ));
    }
    report(
        4,
        "sideband width formula against tabulated widths",
        pass,
        &parts.join("; "),
    );
    assert!(pass, "sideband residuals outside their gates: {}", parts.join("; "));
}

#[test]
fn criterion_05_population_trapping_and_optical_recovery() {
    let t0 = Instant::now();
    let p = find_preset("bi_row2").unwrap();
    let mut sys = preset_system("bi_row2");
    sys.g21_ev = 0.0;
    let rho_dark = sys.steady_state().unwrap();
    let rho22 = rho_dark[[1, 1]].re;
    let rho33_dark = rho_dark[[2, 2]].re;
    let trapped = sys.trapped_upper_population();
    let res_trap = (rho33_dark / trapped - 1.0).abs();

    sys.g21_ev = p.g21_ev;
    let rho33_lit = sys.steady_state().unwrap()[[2, 2]].re;
    let orders = (rho33_lit / rho33_dark).log10();

    // Context: the weaker-drive row of the same ion stops just short of ten
    // orders because its recovered level population is g31^2/(2 G^2).
    let mut weak = preset_system("bi_fig1b");
    weak.g21_ev = 0.0;
    let weak_dark = weak.steady_state().unwrap()[[2, 2]].re;
    weak.g21_ev = find_preset("bi_fig1b").unwrap().g21_ev;
    let weak_orders = (weak.steady_state().unwrap()[[2, 2]].re / weak_dark).log10();

    let dt = t0.elapsed().as_secs_f64();
    let pass = rho22 >= 1.0 - 1e-6 && res_trap <= 0.01 && orders >= 10.0 && dt < 5.0;
    report(
        5,
        "metastable trapping and optical recovery",
        pass,
        &format!(
            "x-ray only: rho22 = {rho22:.9}, rho33 = {rho33_dark:.3e} vs closed form \
             {trapped:.3e} (dev {res_trap:.2e}, gate 1e-2); optical drive lifts rho33 to \
             {rho33_lit:.3e} (+{orders:.2} orders, gate 10; weaker-drive row +{weak_orders:.2}) \
             in {dt:.2} s (gate 5 s)"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_06_triplet_geometry_of_the_bi_working_point() {
    let sys = preset_system("bi_fig1b");
    let lw = analytic_linewidths(&sys).unwrap();
    let peaks = refined_peaks(&sys);
    let count = peaks.len();
    let d_meas = peaks.last().unwrap().center_ev - peaks.first().unwrap().center_ev;
    let res = (d_meas / lw.sideband_distance_ev - 1.0).abs();
    let pass = count == 3 && res <= 2e-3;
    report(
        6,
        "triplet geometry at the Bi working point",
        pass,
        &format!(
            "{count} peaks above 1e-6 of max (want exactly 3); outer distance {d_meas:.6} eV \
             vs 4G = {:.6} eV (dev {res:.2e}, gate 2e-3)",
            lw.sideband_distance_ev
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_07_secular_width_tracking_across_a_drive_grid() {
    let gamma31 = 1e-3;
    let g21s = linspace(0.1, 2.0, 10);
    let mut worst_c = 0.0f64;
    let mut worst_s = 0.0f64;
    let mut ratios = Vec::new();
    for &g21 in &g21s {
        let sys = ThreeLevelSystem {
            delta_x_ev: 0.0,
            delta_o_ev: 0.0,
            g31_ev: 0.3,
            g21_ev: g21,
            gamma31_ev: gamma31,
            gamma32_ev: 4e-4,
            gamma21_ev: 2e-4,
            gamma_d_ev: 0.0,
        };
        let lw = analytic_linewidths(&sys).unwrap();
        assert!(
            lw.big_g_ev >= 20.0 * gamma31,
            "grid point outside the secular regime"
        );
        let peaks = refined_peaks(&sys);
        assert!(peaks.len() >= 3, "triplet not found at g21 = {g21}");
        let central = peaks
            .iter()
            .min_by(|a, b| a.center_ev.abs().total_cmp(&b.center_ev.abs()))
            .unwrap();
        let outer_hi = peaks.last().unwrap();
        let d_s = outer_hi.center_ev - peaks.first().unwrap().center_ev;
        worst_c = worst_c.max((central.fwhm_ev / lw.central_fwhm_ev - 1.0).abs());
        worst_s = worst_s.max((outer_hi.fwhm_ev / lw.sideband_fwhm_ev - 1.0).abs());
        ratios.push(outer_hi.fwhm_ev / d_s);
    }
    let monotone = ratios.windows(2).all(|w| w[1] < w[0]);
    let pass = worst_c <= 0.05 && worst_s <= 0.05 && monotone;
    report(
        7,
        "secular width tracking over the optical drive grid",
        pass,
        &format!(
            "10 drive strengths: worst central-width dev {worst_c:.2e}, worst sideband-width \
             dev {worst_s:.2e} (gate 5e-2); width-to-splitting ratio falls {:.2e} -> {:.2e} \
             monotonically: {monotone}",
            ratios.first().unwrap(),
            ratios.last().unwrap()
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_08_quadratic_detuning_growth_of_the_splitting() {
    let base = preset_system("bi_fig1b");
    let lw = analytic_linewidths(&base).unwrap();
    let gamma31 = base.gamma31_ev;
    let measure = |delta_ev: f64| -> f64 {
        let mut sys = base;
        sys.delta_x_ev = -delta_ev;
        let peaks = refined_peaks(&sys);
        peaks.last().unwrap().center_ev - peaks.first().unwrap().center_ev
    };
    // Least-squares fit of D = d0 + c2 delta^2 on a symmetric detuning grid.
    let deltas = linspace(-gamma31, gamma31, 9);
    let points: Vec<(f64, f64)> = deltas.iter().map(|&d| (d * d, measure(d))).collect();
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let c2 = points
        .iter()
        .map(|p| (p.0 - mean_x) * (p.1 - mean_y))
        .sum::<f64>()
        / points.iter().map(|p| (p.0 - mean_x).powi(2)).sum::<f64>();
    let res = (c2 / lw.distance_curvature_per_ev - 1.0).abs();
    let pass = res <= 0.05;
    report(
        8,
        "quadratic detuning growth of the sideband distance",
        pass,
        &format!(
            "fit over |detuning| <= gamma31 gives {c2:.4e}/eV vs closed form {:.4e}/eV \
             (dev {res:.2e}, gate 5e-2)",
            lw.distance_curvature_per_ev
        ),
    );
    assert!(pass);
}

/// Power-of-two sample count whose comb around `focus` keeps every folded
/// line at least twelve window-halves away from the window center.
fn alias_free_samples(tau: f64, half: f64, focus: f64, lines: &[f64]) -> usize {
    let mut n = 1usize << 14;
    loop {
        let dtau = tau / n as f64;
        let ny = std::f64::consts::PI / dtau;
        let clean = ny > 40.0 * half
            && lines.iter().all(|&p| {
                let rel = p - focus;
                if rel.abs() <= ny {
                    return true; // inside the comb, rendered at its true place
                }
                let folded = (rel + ny).rem_euclid(2.0 * ny) - ny;
                folded.abs() >= 12.0 * half
            });
        if clean {
            return n;
        }
        assert!(n < (1 << 23), "no alias-free comb below the size cap");
        n <<= 1;
    }
}

fn oracle_with_window_retry(
    sys: &ThreeLevelSystem,
    n: usize,
    tau: f64,
    focus: f64,
) -> xrf_core::spectrum::SpectrumResult {
    let mut tau = tau;
    for _ in 0..3 {
        match spectrum_fft_oracle(sys, &geometry(), 1.0, n, tau, focus) {
            Ok(res) => return res,
            Err(SpectrumError::WindowTooShort(_)) => tau *= 2.0,
            Err(e) => panic!("oracle failed: {e}"),
        }
    }
    panic!("correlation window kept coming up short");
}

#[test]
fn criterion_09_fourier_oracle_matches_the_eigenmode_route() {
    let t0 = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for p in PRESETS {
        let sys = preset_system(p.name);
        let corr = correlation(&sys, &geometry(), 1.0).unwrap();
        let lw = analytic_linewidths(&sys).unwrap();
        let total_amp: f64 = corr.modes.iter().map(|m| m.amplitude.norm()).sum();
        let slow = corr
            .modes
            .iter()
            .filter(|m| m.amplitude.norm() > 1e-10 * total_amp)
            .map(|m| m.rate_ev.re.abs())
            .fold(f64::INFINITY, f64::min);
        let tau = 16.0 / slow;
        let half = 30.0 * (lw.central_fwhm_ev + lw.sideband_fwhm_ev);
        let g = lw.big_g_ev;
        let lines = [0.0, -g, g, -2.0 * g, 2.0 * g];
        let mut err2 = 0.0;
        let mut ref2 = 0.0;
        let mut used = 0usize;
        for focus in [0.0, -2.0 * g, 2.0 * g] {
            let n = alias_free_samples(tau, half, focus, &lines);
            let fft = oracle_with_window_retry(&sys, n, tau, focus);
            for (w, s_fft) in fft.omega_ev.iter().zip(&fft.density) {
                if (w - focus).abs() > half {
                    continue;
                }
                let s_eig = corr.spectral_density(*w);
                err2 += (s_fft - s_eig).powi(2);
                ref2 += s_eig * s_eig;
                used += 1;
            }
        }
        let l2 = (err2 / ref2).sqrt();
        pass &= l2 <= 1e-4 && used > 300;
        parts.push(format!("{} {:.1e}", p.name, l2));
    }
    let dt = t0.elapsed().as_secs_f64();
    pass &= dt < 60.0;
    report(
        9,
        "time-domain Fourier oracle vs eigenmode spectra",
        pass,
        &format!(
            "L2 relative deviation over the three line windows: {} (gate 1e-4 each) in \
             {dt:.1} s (gate 60 s)",
            parts.join(", ")
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_10_byte_identical_reruns_on_every_preset() {
    let base = std::env::temp_dir().join(format!("xrf_acc_{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&base);
    let run = |preset: &str, tag: &str| -> (String, String) {
        let dir = base.join(format!("{preset}_{tag}"));
        let out = Command::new(env!("CARGO_BIN_EXE_xrf"))
            .args(["spectrum", "--preset", preset, "--grid-points", "201"])
            .arg("--out")
            .arg(&dir)
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "spectrum {preset} failed: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let read = |name: &str| std::fs::read_to_string(dir.join(name)).unwrap();
        (read("spectrum.tsv"), read("summary.txt"))
    };
    let mut pass = true;
    for p in PRESETS {
        pass &= run(p.name, "a") == run(p.name, "b");
    }

    // A scan rerun, config-driven, must also reproduce its bytes.
    let cfg = base.join("scan.cfg");
    std::fs::create_dir_all(&base).unwrap();
    std::fs::write(
        &cfg,
        "[scenario]\npreset = bi_fig1b\n[grid]\npoints = 301\n[scan]\ndelta_min = -2\ndelta_max = 2\nsteps = 5\n",
    )
    .unwrap();
    let scan = |tag: &str| -> (String, String) {
        let dir = base.join(format!("scan_{tag}"));
        let out = Command::new(env!("CARGO_BIN_EXE_xrf"))
            .arg("scan")
            .arg(&cfg)
            .arg("--out")
            .arg(&dir)
            .output()
            .unwrap();
        assert!(out.status.success());
        let read = |name: &str| std::fs::read_to_string(dir.join(name)).unwrap();
        (read("scan.tsv"), read("sidebands.tsv"))
    };
    pass &= scan("a") == scan("b");

    report(
        10,
        "byte-identical reruns",
        pass,
        "six spectrum presets and one config-driven scan rerun byte-for-byte",
    );
    assert!(pass);
    let _ = std::fs::remove_dir_all(&base);
}
