//! Scenario assembly: the preset library and config resolution.
//!
//! A scenario bundles everything a command needs: level energies and widths,
//! the two drive couplings with their detunings, and grid/scan settings.
//! Values come from a preset, a config file, or both, with explicit config
//! keys winning over preset defaults. Drive strengths are given either as a
//! coupling `g_eV` directly or as `intensity_W_cm2` plus a dipole `mu_au`
//! that is converted through the running-wave field strength.

use crate::config::{Config, ConfigError};
use xrf_core::dynamics::ThreeLevelSystem;
use xrf_core::structure::multipole::rabi_frequency_ev;

/// One tabulated working point: a Li-like ion with hyperfine-resolved levels,
/// its 2s-2p3/2 x-ray transition, the ground hyperfine splitting, and a pair
/// of drive strengths quoted both as couplings and as intensities.
///
/// The tabulated set does not fix `gamma32`, the decay rate from the upper
/// level into the stretched ground hyperfine manifold. Each preset therefore
/// carries the ratio implied by pure hyperfine geometry: with every decay
/// photon counted, the stretched upper level splits its width between the two
/// ground manifolds in proportion to squared recoupling factors, giving
/// gamma32 / gamma31 = 1/2 for I = 1/2, 3/2 for I = 9/2, and 7/5 for I = 7/2.
/// The consistency of those numbers with the angular code is pinned by a test
/// below.
#[derive(Debug)]
pub struct IonPreset {
    pub name: &'static str,
    pub ion: &'static str,
    pub z: f64,
    pub twice_i: i32,
    pub omega31_ev: f64,
    pub omega21_ev: f64,
    pub gamma31_ev: f64,
    pub gamma21_ev: f64,
    pub gamma32_over_gamma31: f64,
    pub g31_ev: f64,
    pub g21_ev: f64,
    pub intensity_x_w_cm2: f64,
    pub intensity_o_w_cm2: f64,
}

impl IonPreset {
    /// Effective x-ray dipole (atomic units) that reproduces `g31_ev` at the
    /// quoted intensity.
    pub fn mu_x_eff_au(&self) -> f64 {
        self.g31_ev / rabi_frequency_ev(1.0, self.intensity_x_w_cm2)
    }

    /// Effective optical dipole (atomic units) that reproduces `g21_ev` at
    /// the quoted intensity.
    pub fn mu_o_eff_au(&self) -> f64 {
        self.g21_ev / rabi_frequency_ev(1.0, self.intensity_o_w_cm2)
    }
}

pub const PRESETS: &[IonPreset] = &[
    IonPreset {
        name: "tl_row1",
        ion: "203Tl78+",
        z: 81.0,
        twice_i: 1,
        omega31_ev: 2236.5,
        omega21_ev: 0.499,
        gamma31_ev: 6.6e-3,
        gamma21_ev: 1.1e-15,
        gamma32_over_gamma31: 0.5,
        g31_ev: 0.18,
        g21_ev: 2.1,
        intensity_x_w_cm2: 1e12,
        intensity_o_w_cm2: 1e16,
    },
    IonPreset {
        name: "tl_row2",
        ion: "203Tl78+",
        z: 81.0,
        twice_i: 1,
        omega31_ev: 2236.5,
        omega21_ev: 0.499,
        gamma31_ev: 6.6e-3,
        gamma21_ev: 1.1e-15,
        gamma32_over_gamma31: 0.5,
        g31_ev: 0.18,
        g21_ev: 21.0,
        intensity_x_w_cm2: 1e12,
        intensity_o_w_cm2: 1e18,
    },
    IonPreset {
        name: "bi_fig1b",
        ion: "209Bi80+",
        z: 83.0,
        twice_i: 9,
        omega31_ev: 2788.1,
        omega21_ev: 0.797,
        gamma31_ev: 7.2e-2,
        gamma21_ev: 7.7e-15,
        gamma32_over_gamma31: 1.5,
        g31_ev: 8.3e-2,
        g21_ev: 2.9,
        intensity_x_w_cm2: 5e11,
        intensity_o_w_cm2: 1e16,
    },
    IonPreset {
        name: "bi_row2",
        ion: "209Bi80+",
        z: 83.0,
        twice_i: 9,
        omega31_ev: 2788.1,
        omega21_ev: 0.797,
        gamma31_ev: 7.2e-2,
        gamma21_ev: 7.7e-15,
        gamma32_over_gamma31: 1.5,
        g31_ev: 1.2,
        g21_ev: 29.0,
        intensity_x_w_cm2: 1e14,
        intensity_o_w_cm2: 1e18,
    },
    IonPreset {
        name: "u_row1",
        ion: "235U89+",
        z: 92.0,
        twice_i: 7,
        omega31_ev: 4459.4,
        omega21_ev: 0.136,
        gamma31_ev: 2.4e-2,
        gamma21_ev: 3.7e-17,
        gamma32_over_gamma31: 1.4,
        g31_ev: 7.7e-2,
        g21_ev: 2.8,
        intensity_x_w_cm2: 5e11,
        intensity_o_w_cm2: 1e16,
    },
    IonPreset {
        name: "u_row2",
        ion: "235U89+",
        z: 92.0,
        twice_i: 7,
        omega31_ev: 4459.4,
        omega21_ev: 0.136,
        gamma31_ev: 2.4e-2,
        gamma21_ev: 3.7e-17,
        gamma32_over_gamma31: 1.4,
        g31_ev: 33.0,
        g21_ev: 190.0,
        intensity_x_w_cm2: 9e16,
        intensity_o_w_cm2: 5e19,
    },
];

/// Look a preset up by name. `bi_row1` is an alias for `bi_fig1b`.
pub fn find_preset(name: &str) -> Option<&'static IonPreset> {
    let name = if name == "bi_row1" { "bi_fig1b" } else { name };
    PRESETS.iter().find(|p| p.name == name)
}

/// One resolved drive: the coupling actually used, its detuning (drive
/// frequency minus transition frequency), and the intensity/dipole pair it
/// came from when it was specified that way.
#[derive(Debug, Clone, Copy)]
pub struct Drive {
    pub g_ev: f64,
    pub detuning_ev: f64,
    pub intensity_w_cm2: Option<f64>,
    pub mu_au: Option<f64>,
}

/// Fully resolved inputs for one command run.
#[derive(Debug)]
pub struct Scenario {
    pub label: String,
    pub preset: Option<&'static IonPreset>,
    pub omega31_ev: f64,
    pub omega21_ev: f64,
    pub gamma31_ev: f64,
    pub gamma32_ev: f64,
    pub gamma21_ev: f64,
    pub gamma_d_ev: f64,
    pub xray: Drive,
    pub optical: Drive,
    pub grid_points: usize,
    pub span_ev: Option<f64>,
    pub refine_peaks: bool,
    pub scan_min: f64,
    pub scan_max: f64,
    pub scan_steps: usize,
    pub out_dir: Option<String>,
}

impl Scenario {
    /// Rotating-frame generator inputs. The config detunings are drive minus
    /// transition, the generator diagonal wants transition minus drive.
    pub fn system(&self) -> ThreeLevelSystem {
        ThreeLevelSystem {
            delta_x_ev: -self.xray.detuning_ev,
            delta_o_ev: -self.optical.detuning_ev,
            g31_ev: self.xray.g_ev,
            g21_ev: self.optical.g_ev,
            gamma31_ev: self.gamma31_ev,
            gamma32_ev: self.gamma32_ev,
            gamma21_ev: self.gamma21_ev,
            gamma_d_ev: self.gamma_d_ev,
        }
    }

    /// Joint coupling G = sqrt(g31^2 + g21^2), the sideband scale.
    pub fn big_g_ev(&self) -> f64 {
        self.xray.g_ev.hypot(self.optical.g_ev)
    }

    /// Half-width of the default frequency window: the sidebands sit at
    /// 2G, so 1.5 (2G + 5 gamma31) keeps them and their tails inside.
    pub fn default_span_ev(&self) -> f64 {
        1.5 * (2.0 * self.big_g_ev() + 5.0 * self.gamma31_ev)
    }

    pub fn span_ev_or_default(&self) -> f64 {
        self.span_ev.unwrap_or_else(|| self.default_span_ev())
    }
}

fn err(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

fn resolve_drive(
    cfg: Option<&Config>,
    section: &str,
    table: Option<(f64, f64, f64)>,
) -> Result<Drive, ConfigError> {
    let g_cfg = cfg.map_or(Ok(None), |c| c.number(section, "g_eV"))?;
    let i_cfg = cfg.map_or(Ok(None), |c| c.number(section, "intensity_W_cm2"))?;
    let mu_cfg = cfg.map_or(Ok(None), |c| c.number(section, "mu_au"))?;
    let detuning_ev = cfg
        .map_or(Ok(None), |c| c.number(section, "detuning_eV"))?
        .unwrap_or(0.0);
    if !detuning_ev.is_finite() {
        return Err(err(format!("[{section}] detuning_eV must be finite")));
    }

    if g_cfg.is_some() && i_cfg.is_some() {
        return Err(err(format!(
            "[{section}] sets both g_eV and intensity_W_cm2; give exactly one"
        )));
    }
    if mu_cfg.is_some() && i_cfg.is_none() {
        return Err(err(format!(
            "[{section}] sets mu_au without intensity_W_cm2; mu_au only scales an intensity"
        )));
    }

    let drive = match (g_cfg, i_cfg) {
        (Some(g), None) => {
            if !g.is_finite() || g < 0.0 {
                return Err(err(format!("[{section}] g_eV must be finite and nonnegative")));
            }
            Drive { g_ev: g, detuning_ev, intensity_w_cm2: None, mu_au: None }
        }
        (None, Some(i)) => {
            if !i.is_finite() || i < 0.0 {
                return Err(err(format!(
                    "[{section}] intensity_W_cm2 must be finite and nonnegative"
                )));
            }
            let mu = match (mu_cfg, table) {
                (Some(mu), _) => {
                    if !mu.is_finite() || mu < 0.0 {
                        return Err(err(format!(
                            "[{section}] mu_au must be finite and nonnegative"
                        )));
                    }
                    mu
                }
                (None, Some((g_t, i_t, _))) => g_t / rabi_frequency_ev(1.0, i_t),
                (None, None) => {
                    return Err(err(format!(
                        "[{section}] intensity_W_cm2 needs mu_au (or a preset to infer it from)"
                    )));
                }
            };
            Drive {
                g_ev: rabi_frequency_ev(mu, i),
                detuning_ev,
                intensity_w_cm2: Some(i),
                mu_au: Some(mu),
            }
        }
        (None, None) => match table {
            Some((g_t, i_t, mu_t)) => Drive {
                g_ev: g_t,
                detuning_ev,
                intensity_w_cm2: Some(i_t),
                mu_au: Some(mu_t),
            },
            None => {
                return Err(err(format!(
                    "[{section}] needs g_eV or intensity_W_cm2 (or run with a preset)"
                )));
            }
        },
        (Some(_), Some(_)) => unreachable!(),
    };
    Ok(drive)
}

/// Merge preset, config, and command-line values into a runnable scenario.
pub fn resolve(
    cfg: Option<&Config>,
    preset_flag: Option<&str>,
    grid_points_flag: Option<usize>,
) -> Result<Scenario, ConfigError> {
    let preset_cfg = cfg.and_then(|c| c.string("scenario", "preset"));
    let preset = match (preset_flag, preset_cfg) {
        (Some(a), Some(b)) if find_preset(a).map(|p| p.name) != find_preset(b).map(|p| p.name) => {
            return Err(err(format!(
                "preset `{a}` from the command line conflicts with preset `{b}` in the config"
            )));
        }
        (a, b) => a.or(b),
    };
    let preset = match preset {
        Some(name) => Some(find_preset(name).ok_or_else(|| {
            let known: Vec<&str> = PRESETS.iter().map(|p| p.name).collect();
            err(format!("unknown preset `{name}`; known presets: {}", known.join(", ")))
        })?),
        None => None,
    };

    let num = |key: &str| -> Result<Option<f64>, ConfigError> {
        cfg.map_or(Ok(None), |c| c.number("scenario", key))
    };
    let require = |key: &str, v: Option<f64>| -> Result<f64, ConfigError> {
        v.ok_or_else(|| err(format!("[scenario] {key} is required when no preset is given")))
    };

    let omega31_ev = match num("omega31_eV")? {
        Some(v) => v,
        None => require("omega31_eV", preset.map(|p| p.omega31_ev))?,
    };
    let omega21_ev = match num("omega21_eV")? {
        Some(v) => v,
        None => require("omega21_eV", preset.map(|p| p.omega21_ev))?,
    };
    let gamma31_ev = match num("gamma31_eV")? {
        Some(v) => v,
        None => require("gamma31_eV", preset.map(|p| p.gamma31_ev))?,
    };
    let gamma21_ev = match num("gamma21_eV")? {
        Some(v) => v,
        None => require("gamma21_eV", preset.map(|p| p.gamma21_ev))?,
    };
    let gamma32_ev = match num("gamma32_eV")? {
        Some(v) => v,
        None => preset.map_or(0.0, |p| p.gamma32_over_gamma31 * gamma31_ev),
    };
    let gamma_d_ev = num("gamma_d_eV")?.unwrap_or(0.0);

    if !(omega31_ev.is_finite() && omega31_ev > omega21_ev && omega21_ev > 0.0) {
        return Err(err("[scenario] needs omega31_eV > omega21_eV > 0"));
    }
    for (key, v) in [
        ("gamma31_eV", gamma31_ev),
        ("gamma32_eV", gamma32_ev),
        ("gamma21_eV", gamma21_ev),
        ("gamma_d_eV", gamma_d_ev),
    ] {
        if !v.is_finite() || v < 0.0 {
            return Err(err(format!("[scenario] {key} must be finite and nonnegative")));
        }
    }

    let xray = resolve_drive(
        cfg,
        "drive.xray",
        preset.map(|p| (p.g31_ev, p.intensity_x_w_cm2, p.mu_x_eff_au())),
    )?;
    let optical = resolve_drive(
        cfg,
        "drive.optical",
        preset.map(|p| (p.g21_ev, p.intensity_o_w_cm2, p.mu_o_eff_au())),
    )?;

    let grid_points = match grid_points_flag {
        Some(n) => n,
        None => cfg
            .map_or(Ok(None), |c| c.integer("grid", "points"))?
            .unwrap_or(4001),
    };
    if grid_points < 9 {
        return Err(err("[grid] points must be at least 9"));
    }
    let span_ev = cfg.map_or(Ok(None), |c| c.number("grid", "span_eV"))?;
    if let Some(s) = span_ev {
        if !s.is_finite() || s <= 0.0 {
            return Err(err("[grid] span_eV must be finite and positive"));
        }
    }
    let refine_peaks = cfg
        .map_or(Ok(None), |c| c.boolean("grid", "refine_peaks"))?
        .unwrap_or(true);

    let scan_min = cfg.map_or(Ok(None), |c| c.number("scan", "delta_min"))?.unwrap_or(-10.0);
    let scan_max = cfg.map_or(Ok(None), |c| c.number("scan", "delta_max"))?.unwrap_or(10.0);
    let scan_steps = cfg.map_or(Ok(None), |c| c.integer("scan", "steps"))?.unwrap_or(201);
    if !(scan_min.is_finite() && scan_max.is_finite() && scan_max >= scan_min) {
        return Err(err("[scan] needs finite delta_max >= delta_min"));
    }
    if scan_steps < 1 {
        return Err(err("[scan] steps must be at least 1"));
    }

    let out_dir = cfg.and_then(|c| c.string("output", "dir")).map(str::to_string);

    let label = preset
        .map(|p| format!("{} ({})", p.name, p.ion))
        .unwrap_or_else(|| "custom".to_string());

    Ok(Scenario {
        label,
        preset,
        omega31_ev,
        omega21_ev,
        gamma31_ev,
        gamma32_ev,
        gamma21_ev,
        gamma_d_ev,
        xray,
        optical,
        grid_points,
        span_ev,
        refine_peaks,
        scan_min,
        scan_max,
        scan_steps,
        out_dir,
    })
}
