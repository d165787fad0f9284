//! Command implementations: each builds deterministic text files under the
//! output directory and reports failures as either input errors (exit 2) or
//! numeric errors (exit 3).

use std::path::Path;

use rayon::prelude::*;

use crate::config::ConfigError;
use crate::output::{fmt_g, kv, row, write_file};
use crate::scenario::Scenario;
use xrf_core::spectrum::{
    analytic_linewidths, correlation, find_peaks, power_spectrum, refine_peak, Correlation,
    DetectionGeometry, EmissionBand, PeakEstimate, SpectrumError,
};
use xrf_core::structure::multipole::{
    radiative_width_ev, reduced_matrix_element, transition_coupling_mu_au, Gauge, Multipolarity,
};
use xrf_core::structure::hyperfine::{branching_fraction, HyperfineLevel};
use xrf_core::structure::{BoundStateLabel, DiracOrbital};

/// What went wrong, split by exit code: bad input or environment (2) versus
/// a numeric failure in an otherwise valid run (3).
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numeric(String),
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.0)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) | CliError::Numeric(m) => write!(f, "{m}"),
        }
    }
}

fn spectrum_err(stage: &str, e: SpectrumError) -> CliError {
    match e {
        SpectrumError::NoDrive => CliError::Config(format!("{stage}: {e}")),
        other => CliError::Numeric(format!("{stage}: {other}")),
    }
}

fn write_out(dir: &Path, name: &str, content: &str) -> Result<(), CliError> {
    write_file(dir, name, content).map_err(CliError::Config)
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / (n as f64 - 1.0);
    (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
        .collect()
}

/// Shared scenario echo for the report files.
fn echo_scenario(buf: &mut String, scn: &Scenario) {
    buf.push_str(&format!("# scenario {}\n", scn.label));
    kv(buf, "omega31_eV", scn.omega31_ev);
    kv(buf, "omega21_eV", scn.omega21_ev);
    kv(buf, "gamma31_eV", scn.gamma31_ev);
    kv(buf, "gamma32_eV", scn.gamma32_ev);
    kv(buf, "gamma21_eV", scn.gamma21_ev);
    kv(buf, "gamma_d_eV", scn.gamma_d_ev);
    kv(buf, "g31_eV", scn.xray.g_ev);
    kv(buf, "g21_eV", scn.optical.g_ev);
    kv(buf, "detuning_x_eV", scn.xray.detuning_ev);
    kv(buf, "detuning_o_eV", scn.optical.detuning_ev);
    if let (Some(i), Some(mu)) = (scn.xray.intensity_w_cm2, scn.xray.mu_au) {
        kv(buf, "intensity_x_W_cm2", i);
        kv(buf, "mu_x_au", mu);
    }
    if let (Some(i), Some(mu)) = (scn.optical.intensity_w_cm2, scn.optical.mu_au) {
        kv(buf, "intensity_o_W_cm2", i);
        kv(buf, "mu_o_au", mu);
    }
}

/// The frequency grid for one spectrum: a uniform base window plus, when
/// refinement is on, dense patches around every refined line so narrow
/// features are resolved without a uniformly fine grid.
fn build_grid(
    corr: &Correlation,
    span_ev: f64,
    points: usize,
    refine: bool,
) -> (Vec<f64>, Vec<PeakEstimate>) {
    let base = linspace(-span_ev, span_ev, points);
    let coarse_step = if points > 1 { 2.0 * span_ev / (points as f64 - 1.0) } else { span_ev };
    let density = corr.sample(&base);
    let seeds = find_peaks(&base, &density, 1e-6);
    if !refine {
        return (base, seeds);
    }
    let mut grid = base;
    let mut peaks: Vec<PeakEstimate> = Vec::new();
    for seed in &seeds {
        let span_guess = (4.0 * seed.fwhm_ev).max(8.0 * coarse_step);
        if let Some(p) = refine_peak(corr, seed.center_ev, span_guess) {
            if peaks.iter().any(|q| (q.center_ev - p.center_ev).abs() < 0.5 * p.fwhm_ev) {
                continue;
            }
            let step = p.fwhm_ev / 16.0;
            let lo = p.center_ev - 8.0 * p.fwhm_ev;
            for i in 0..=256usize {
                let w = lo + step * i as f64;
                if w.abs() <= span_ev {
                    grid.push(w);
                }
            }
            peaks.push(p);
        }
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    peaks.sort_by(|a, b| a.center_ev.total_cmp(&b.center_ev));
    (grid, peaks)
}

/// `xrf spectrum`: the x-ray band fluorescence density plus a summary of
/// derived observables.
pub fn spectrum(scn: &Scenario, out: &Path) -> Result<(), CliError> {
    let sys = scn.system();
    let geo = DetectionGeometry::head_on(EmissionBand::XRay);
    let corr =
        correlation(&sys, &geo, 1.0).map_err(|e| spectrum_err("correlation assembly", e))?;
    let span = {
        let s = scn.span_ev_or_default();
        if s > 0.0 { s } else { 1.0 }
    };
    let (grid, peaks) = build_grid(&corr, span, scn.grid_points, scn.refine_peaks);
    let spec = power_spectrum(&corr, &grid);

    let mut tsv = String::new();
    tsv.push_str("# xrf spectrum, x-ray band\n");
    tsv.push_str(&format!("# scenario {}\n", scn.label));
    tsv.push_str("# columns: omega_minus_omega31_eV\tS_arb\n");
    for (w, s) in spec.omega_ev.iter().zip(&spec.density) {
        row(&mut tsv, &[*w, *s]);
    }
    write_out(out, "spectrum.tsv", &tsv)?;

    let rho = sys
        .steady_state()
        .map_err(|e| CliError::Numeric(format!("steady-state solve: {e}")))?;

    let mut sm = String::new();
    sm.push_str("# xrf spectrum summary\n");
    echo_scenario(&mut sm, scn);
    kv(&mut sm, "window_half_span_eV", span);
    kv(&mut sm, "rho11", rho[[0, 0]].re);
    kv(&mut sm, "rho22", rho[[1, 1]].re);
    kv(&mut sm, "rho33", rho[[2, 2]].re);
    match analytic_linewidths(&sys) {
        Ok(lw) => {
            kv(&mut sm, "R", lw.r);
            kv(&mut sm, "G_eV", lw.big_g_ev);
            kv(&mut sm, "central_fwhm_eV", lw.central_fwhm_ev);
            kv(&mut sm, "sideband_fwhm_eV", lw.sideband_fwhm_ev);
            kv(&mut sm, "sideband_distance_eV", lw.sideband_distance_ev);
            kv(&mut sm, "distance_curvature_per_eV", lw.distance_curvature_per_ev);
        }
        Err(_) => sm.push_str("# no drive: secular linewidths undefined\n"),
    }
    kv(&mut sm, "elastic_weight_arb", corr.coherent_weight);
    kv(&mut sm, "elastic_position_eV", corr.coherent_position_ev);
    kv(&mut sm, "total_power_arb", corr.total_power);
    kv(&mut sm, "incoherent_power_arb", corr.incoherent_power());
    if peaks.len() >= 2 {
        let lo = peaks.first().unwrap().center_ev;
        let hi = peaks.last().unwrap().center_ev;
        kv(&mut sm, "outer_peak_distance_eV", hi - lo);
    }
    sm.push_str("# peaks: center_eV\tfwhm_eV\theight_arb\tresolved\n");
    for p in &peaks {
        sm.push_str(&format!(
            "peak = {}\t{}\t{}\t{}\n",
            fmt_g(p.center_ev),
            fmt_g(p.fwhm_ev),
            fmt_g(p.height),
            p.resolved
        ));
    }
    write_out(out, "summary.txt", &sm)
}

/// `xrf linewidths`: the closed-form secular observables on their own.
pub fn linewidths(scn: &Scenario, out: &Path) -> Result<(), CliError> {
    let sys = scn.system();
    let lw = analytic_linewidths(&sys).map_err(|e| spectrum_err("linewidth formulas", e))?;
    let mut buf = String::new();
    buf.push_str("# xrf linewidths\n");
    echo_scenario(&mut buf, scn);
    kv(&mut buf, "R", lw.r);
    kv(&mut buf, "G_eV", lw.big_g_ev);
    kv(&mut buf, "central_fwhm_eV", lw.central_fwhm_ev);
    kv(&mut buf, "sideband_fwhm_eV", lw.sideband_fwhm_ev);
    kv(&mut buf, "sideband_distance_eV", lw.sideband_distance_ev);
    kv(&mut buf, "distance_curvature_per_eV", lw.distance_curvature_per_ev);
    write_out(out, "linewidths.txt", &buf)
}

/// One scan row: the sampled log-density and the measured sideband pair.
struct ScanRow {
    log_density: Vec<f64>,
    center_lo_ev: f64,
    center_hi_ev: f64,
}

fn scan_row(
    scn: &Scenario,
    delta_over_gamma: f64,
    omega_ev: &[f64],
) -> Result<ScanRow, CliError> {
    let mut sys = scn.system();
    sys.delta_x_ev = -delta_over_gamma * scn.gamma31_ev;
    let geo = DetectionGeometry::head_on(EmissionBand::XRay);
    let corr = correlation(&sys, &geo, 1.0).map_err(|e| {
        spectrum_err(&format!("correlation assembly at Delta = {delta_over_gamma}"), e)
    })?;
    let density = corr.sample(omega_ev);
    let coarse_step = omega_ev[1] - omega_ev[0];
    let seeds = find_peaks(omega_ev, &density, 1e-6);
    let fail = || {
        CliError::Numeric(format!(
            "sideband extraction failed at Delta = {delta_over_gamma}"
        ))
    };
    if seeds.len() < 2 {
        return Err(fail());
    }
    let refine = |seed: &PeakEstimate| {
        refine_peak(&corr, seed.center_ev, (4.0 * seed.fwhm_ev).max(8.0 * coarse_step))
    };
    let lo = refine(seeds.first().unwrap()).ok_or_else(fail)?;
    let hi = refine(seeds.last().unwrap()).ok_or_else(fail)?;
    let log_density = density.iter().map(|s| s.max(1e-300).log10()).collect();
    Ok(ScanRow { log_density, center_lo_ev: lo.center_ev, center_hi_ev: hi.center_ev })
}

/// `xrf scan`: the fluorescence map over x-ray detuning plus the measured
/// sideband distance per detuning.
pub fn scan(scn: &Scenario, out: &Path) -> Result<(), CliError> {
    if scn.gamma31_ev <= 0.0 {
        return Err(CliError::Config(
            "scan needs gamma31_eV > 0 to set the detuning scale".into(),
        ));
    }
    if scn.big_g_ev() <= 0.0 {
        return Err(CliError::Config("scan needs at least one nonzero drive".into()));
    }
    let deltas = linspace(scn.scan_min, scn.scan_max, scn.scan_steps);
    let reach = scn.scan_min.abs().max(scn.scan_max.abs()) * scn.gamma31_ev;
    let span = scn
        .span_ev
        .unwrap_or_else(|| 1.5 * (2.0 * scn.big_g_ev() + reach + 5.0 * scn.gamma31_ev));
    let omega = linspace(-span, span, scn.grid_points);

    let rows: Vec<Result<ScanRow, CliError>> =
        deltas.par_iter().map(|d| scan_row(scn, *d, &omega)).collect();

    let mut map = String::new();
    map.push_str("# xrf scan, x-ray band\n");
    map.push_str(&format!("# scenario {}\n", scn.label));
    map.push_str("# Delta = (drive minus transition frequency) / gamma31\n");
    map.push_str("# columns: Delta_over_gamma31\tomega_minus_omega31_over_gamma31\tlog10_S_arb\n");
    let mut sb = String::new();
    sb.push_str("# xrf scan sidebands\n");
    sb.push_str(&format!("# scenario {}\n", scn.label));
    sb.push_str("# columns: Delta_over_gamma31\tdistance_eV\tcenter_low_eV\tcenter_high_eV\n");
    for (d, r) in deltas.iter().zip(rows) {
        let r = r?;
        for (w, ls) in omega.iter().zip(&r.log_density) {
            row(&mut map, &[*d, w / scn.gamma31_ev, *ls]);
        }
        row(
            &mut sb,
            &[*d, r.center_hi_ev - r.center_lo_ev, r.center_lo_ev, r.center_hi_ev],
        );
    }
    write_out(out, "scan.tsv", &map)?;
    write_out(out, "sidebands.tsv", &sb)
}

/// `xrf structure`: one-electron Dirac inputs behind a preset, with the
/// gauge cross-check and the hyperfine branching that fixes gamma32.
pub fn structure(scn: &Scenario, out: &Path) -> Result<(), CliError> {
    let p = scn
        .preset
        .ok_or_else(|| CliError::Config("structure report needs a preset scenario".into()))?;
    let orbital = |n: u32, kappa: i32| -> Result<DiracOrbital, CliError> {
        let label = BoundStateLabel::new(n, kappa)
            .map_err(|e| CliError::Config(format!("orbital label: {e}")))?;
        DiracOrbital::new(label, p.z).map_err(|e| CliError::Config(format!("orbital: {e}")))
    };
    let ground = orbital(2, -1)?; // 2s1/2
    let upper = orbital(2, -2)?; // 2p3/2
    let omega_dirac = upper.energy_ev() - ground.energy_ev();
    let rme_t = reduced_matrix_element(
        &upper,
        &ground,
        1,
        Multipolarity::Electric,
        Gauge::Transverse,
        omega_dirac,
    );
    let rme_b = reduced_matrix_element(
        &upper,
        &ground,
        1,
        Multipolarity::Electric,
        Gauge::Babushkin,
        omega_dirac,
    );
    let width_dirac =
        radiative_width_ev(&upper, &ground, 1, Multipolarity::Electric, Gauge::Transverse);
    let mu_stretched = transition_coupling_mu_au(
        &upper,
        3,
        &ground,
        1,
        1,
        Multipolarity::Electric,
        Gauge::Transverse,
    );

    let ti = p.twice_i;
    let level = |tj: i32, tf: i32| {
        HyperfineLevel::new(tj, ti, tf)
            .map_err(|e| CliError::Config(format!("hyperfine level: {e}")))
    };
    let upper_hf = level(3, ti + 1)?;
    let lower_f1 = level(1, ti - 1)?;
    let lower_f2 = level(1, ti + 1)?;
    let tm_u = ti + 1;
    let manifold_sum = |lower: HyperfineLevel| -> f64 {
        (-lower.twice_f..=lower.twice_f)
            .step_by(2)
            .map(|tm_l| branching_fraction(upper_hf, tm_u, 1, lower, tm_l))
            .sum()
    };
    let b1 = manifold_sum(lower_f1);
    let b2_pi = branching_fraction(upper_hf, tm_u, 1, lower_f2, tm_u);
    let b2_sigma = branching_fraction(upper_hf, tm_u, 1, lower_f2, tm_u - 2);

    let mut buf = String::new();
    buf.push_str("# xrf structure report\n");
    buf.push_str(&format!("# preset {} ({}), one-electron Dirac model\n", p.name, p.ion));
    buf.push_str(&format!("Z = {}\n", p.z));
    buf.push_str(&format!("twice_nuclear_spin = {}\n", p.twice_i));
    kv(&mut buf, "energy_2s_eV", ground.energy_ev());
    kv(&mut buf, "energy_2p32_eV", upper.energy_ev());
    kv(&mut buf, "omega31_dirac_eV", omega_dirac);
    kv(&mut buf, "omega31_scenario_eV", p.omega31_ev);
    kv(&mut buf, "rme_e1_transverse_au", rme_t);
    kv(&mut buf, "rme_e1_babushkin_au", rme_b);
    kv(&mut buf, "gauge_relative_difference", ((rme_t - rme_b) / rme_t).abs());
    kv(&mut buf, "width31_dirac_eV", width_dirac);
    kv(&mut buf, "gamma31_scenario_eV", p.gamma31_ev);
    kv(&mut buf, "mu31_stretched_au", mu_stretched);
    buf.push_str("# branching of the stretched upper level, electric dipole\n");
    kv(&mut buf, "branch_to_lower_manifold", b1);
    kv(&mut buf, "branch_to_upper_manifold_pi", b2_pi);
    kv(&mut buf, "branch_to_upper_manifold_sigma", b2_sigma);
    kv(&mut buf, "gamma32_over_gamma31", p.gamma32_over_gamma31);
    kv(&mut buf, "gamma32_assumed_eV", p.gamma32_over_gamma31 * p.gamma31_ev);
    kv(&mut buf, "mu_x_eff_au", p.mu_x_eff_au());
    kv(&mut buf, "mu_o_eff_au", p.mu_o_eff_au());
    write_out(out, "structure.txt", &buf)
}
