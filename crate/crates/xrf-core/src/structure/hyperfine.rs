//! Hyperfine-resolved emission geometry.
//!
//! When the electronic angular momentum j couples to a nuclear spin I, a
//! fine-structure decay j_u -> j_l of multipole order J splits between the
//! hyperfine components (F_u, M_u) -> (F_l, M_l). The amplitude factorizes
//! into the electronic reduced matrix element times a purely geometric
//! factor; `emission_geometry` returns that factor, normalized so that the
//! squares over all final sublevels and photon polarizations sum to one.

use thiserror::Error;

use crate::angular::{wigner_3j, wigner_6j};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HyperfineError {
    #[error("F = {twice_f}/2 outside |j - I| ..= j + I for j = {twice_j}/2, I = {twice_i}/2")]
    CouplingOutOfRange { twice_j: i32, twice_i: i32, twice_f: i32 },
}

/// One hyperfine level (j, I, F), all angular momenta doubled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HyperfineLevel {
    pub twice_j: i32,
    pub twice_i: i32,
    pub twice_f: i32,
}

impl HyperfineLevel {
    pub fn new(twice_j: i32, twice_i: i32, twice_f: i32) -> Result<Self, HyperfineError> {
        let ok = twice_f >= (twice_j - twice_i).abs()
            && twice_f <= twice_j + twice_i
            && (twice_j + twice_i + twice_f) % 2 == 0;
        if !ok {
            return Err(HyperfineError::CouplingOutOfRange { twice_j, twice_i, twice_f });
        }
        Ok(Self { twice_j, twice_i, twice_f })
    }
}

/// Geometric amplitude for (F_u, M_u) -> (F_l, M_l) through a multipole of
/// order J with photon spherical component q = M_u - M_l. The squared factors
/// summed over F_l, M_l, q equal one, so squares are branching fractions of
/// the fine-structure rate.
pub fn emission_geometry(
    upper: HyperfineLevel,
    tm_u: i32,
    big_j: u32,
    lower: HyperfineLevel,
    tm_l: i32,
) -> f64 {
    assert_eq!(upper.twice_i, lower.twice_i, "nuclear spin must match");
    let tq = tm_u - tm_l;
    let tbig_j = 2 * big_j as i32;
    let threej = wigner_3j(upper.twice_f, tbig_j, lower.twice_f, -tm_u, tq, tm_l);
    if threej == 0.0 {
        return 0.0;
    }
    let sixj = wigner_6j(
        upper.twice_j,
        upper.twice_f,
        upper.twice_i,
        lower.twice_f,
        lower.twice_j,
        tbig_j,
    );
    // (F_u - M_u) + (j_u + I + F_l + J); the doubled sum is always even.
    let phase_exp =
        ((upper.twice_f - tm_u) + upper.twice_j + upper.twice_i + lower.twice_f + tbig_j) / 2;
    let sign = if phase_exp % 2 == 0 { 1.0 } else { -1.0 };
    sign * f64::from(upper.twice_j + 1).sqrt()
        * (f64::from(upper.twice_f + 1) * f64::from(lower.twice_f + 1)).sqrt()
        * threej
        * sixj
}

/// Branching fraction |emission_geometry|^2.
pub fn branching_fraction(
    upper: HyperfineLevel,
    tm_u: i32,
    big_j: u32,
    lower: HyperfineLevel,
    tm_l: i32,
) -> f64 {
    let g = emission_geometry(upper, tm_u, big_j, lower, tm_l);
    g * g
}
