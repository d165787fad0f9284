//! Wigner 3j and 6j symbols on half-integer angular momenta.
//!
//! All j and m arguments are passed doubled (`tj = 2j`, `tm = 2m`) so
//! half-integers stay exact integers. The Racah sums are evaluated in exact
//! big-rational arithmetic; the only floating-point step is the final square
//! root, so results are correct to f64 precision for any input this crate
//! uses (factorial arguments up to a few hundred are handled).
//!
//! Couplings that violate a triangle inequality, a projection bound, or
//! half-integer parity return exactly 0, matching the usual convention.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AngularError {
    #[error("twice_j must be non-negative, got {0}")]
    NegativeJ(i32),
    #[error("projection out of range: twice_m = {twice_m} for twice_j = {twice_j}")]
    ProjectionRange { twice_j: i32, twice_m: i32 },
    #[error("j and m must both be integer or both half-integer: twice_j = {twice_j}, twice_m = {twice_m}")]
    ParityMismatch { twice_j: i32, twice_m: i32 },
}

/// A validated (j, m) pair stored as doubled integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AngularMomentum {
    twice_j: i32,
    twice_m: i32,
}

impl AngularMomentum {
    pub fn new(twice_j: i32, twice_m: i32) -> Result<Self, AngularError> {
        if twice_j < 0 {
            return Err(AngularError::NegativeJ(twice_j));
        }
        if (twice_j - twice_m) % 2 != 0 {
            return Err(AngularError::ParityMismatch { twice_j, twice_m });
        }
        if twice_m.abs() > twice_j {
            return Err(AngularError::ProjectionRange { twice_j, twice_m });
        }
        Ok(Self { twice_j, twice_m })
    }

    pub fn twice_j(&self) -> i32 {
        self.twice_j
    }

    pub fn twice_m(&self) -> i32 {
        self.twice_m
    }

    pub fn j(&self) -> f64 {
        f64::from(self.twice_j) / 2.0
    }

    pub fn m(&self) -> f64 {
        f64::from(self.twice_m) / 2.0
    }
}

fn factorial(n: i32) -> BigInt {
    debug_assert!(n >= 0, "factorial of negative argument");
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= k;
    }
    acc
}

fn triangle_ok(ta: i32, tb: i32, tc: i32) -> bool {
    (ta + tb + tc) % 2 == 0 && tc >= (ta - tb).abs() && tc <= ta + tb
}

// (ja+jb-jc)! (ja-jb+jc)! (-ja+jb+jc)! / (ja+jb+jc+1)!, arguments doubled.
fn triangle_coeff(ta: i32, tb: i32, tc: i32) -> BigRational {
    let num = factorial((ta + tb - tc) / 2) * factorial((ta - tb + tc) / 2)
        * factorial((-ta + tb + tc) / 2);
    let den = factorial((ta + tb + tc) / 2 + 1);
    BigRational::new(num, den)
}

// Decompose a positive rational as m * 2^e with m in [1, 2). Intermediate
// factorial products can dwarf the f64 range even when the final symbol is
// order one, so exponents are carried separately and recombined only once.
fn ratio_norm_parts(r: &BigRational) -> (f64, i64) {
    debug_assert!(r.is_positive());
    let shift_n = (r.numer().bits() as i64 - 500).max(0) as u64;
    let shift_d = (r.denom().bits() as i64 - 500).max(0) as u64;
    let n = (r.numer() >> shift_n).to_f64().unwrap();
    let d = (r.denom() >> shift_d).to_f64().unwrap();
    let m = n / d;
    let k = m.log2().floor();
    (m * (-k).exp2(), shift_n as i64 - shift_d as i64 + k as i64)
}

// sign * sqrt(norm) * sum for exactly computed norm > 0 and sum != 0.
fn combine_sqrt_product(sign: f64, norm: &BigRational, sum: &BigRational) -> f64 {
    let (nm, ne) = ratio_norm_parts(norm);
    let sum_sign = if sum.is_negative() { -1.0 } else { 1.0 };
    let (sm, se) = ratio_norm_parts(&sum.abs());
    sign * sum_sign * nm.sqrt() * sm * (ne as f64 / 2.0 + se as f64).exp2()
}

/// Wigner 3j symbol (j1 j2 j3; m1 m2 m3), all arguments doubled.
pub fn wigner_3j(tj1: i32, tj2: i32, tj3: i32, tm1: i32, tm2: i32, tm3: i32) -> f64 {
    if tj1 < 0 || tj2 < 0 || tj3 < 0 {
        return 0.0;
    }
    if (tj1 - tm1) % 2 != 0 || (tj2 - tm2) % 2 != 0 || (tj3 - tm3) % 2 != 0 {
        return 0.0;
    }
    if tm1.abs() > tj1 || tm2.abs() > tj2 || tm3.abs() > tj3 {
        return 0.0;
    }
    if tm1 + tm2 + tm3 != 0 || !triangle_ok(tj1, tj2, tj3) {
        return 0.0;
    }

    // Racah sum bounds, all quantities in undoubled integer units.
    let t_min = 0.max((tj2 - tj3 - tm1) / 2).max((tj1 - tj3 + tm2) / 2);
    let t_max = ((tj1 + tj2 - tj3) / 2)
        .min((tj1 - tm1) / 2)
        .min((tj2 + tm2) / 2);
    if t_min > t_max {
        return 0.0;
    }

    let mut sum = BigRational::zero();
    for t in t_min..=t_max {
        let den = factorial(t)
            * factorial((tj1 + tj2 - tj3) / 2 - t)
            * factorial((tj1 - tm1) / 2 - t)
            * factorial((tj2 + tm2) / 2 - t)
            * factorial((tj3 - tj2 + tm1) / 2 + t)
            * factorial((tj3 - tj1 - tm2) / 2 + t);
        let term = BigRational::new(BigInt::one(), den);
        if t % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if sum.is_zero() {
        return 0.0;
    }

    let mut norm = triangle_coeff(tj1, tj2, tj3);
    norm *= BigRational::from(
        factorial((tj1 + tm1) / 2)
            * factorial((tj1 - tm1) / 2)
            * factorial((tj2 + tm2) / 2)
            * factorial((tj2 - tm2) / 2)
            * factorial((tj3 + tm3) / 2)
            * factorial((tj3 - tm3) / 2),
    );

    let phase = if ((tj1 - tj2 - tm3) / 2) % 2 == 0 { 1.0 } else { -1.0 };
    combine_sqrt_product(phase, &norm, &sum)
}

/// Wigner 6j symbol {j1 j2 j3; j4 j5 j6}, all arguments doubled.
pub fn wigner_6j(tj1: i32, tj2: i32, tj3: i32, tj4: i32, tj5: i32, tj6: i32) -> f64 {
    if [tj1, tj2, tj3, tj4, tj5, tj6].iter().any(|&t| t < 0) {
        return 0.0;
    }
    // The four coupled triads.
    let triads = [
        (tj1, tj2, tj3),
        (tj1, tj5, tj6),
        (tj4, tj2, tj6),
        (tj4, tj5, tj3),
    ];
    if triads.iter().any(|&(a, b, c)| !triangle_ok(a, b, c)) {
        return 0.0;
    }

    let s1 = (tj1 + tj2 + tj3) / 2;
    let s2 = (tj1 + tj5 + tj6) / 2;
    let s3 = (tj4 + tj2 + tj6) / 2;
    let s4 = (tj4 + tj5 + tj3) / 2;
    let p1 = (tj1 + tj2 + tj4 + tj5) / 2;
    let p2 = (tj2 + tj3 + tj5 + tj6) / 2;
    let p3 = (tj1 + tj3 + tj4 + tj6) / 2;

    let t_min = s1.max(s2).max(s3).max(s4);
    let t_max = p1.min(p2).min(p3);
    if t_min > t_max {
        return 0.0;
    }

    let mut sum = BigRational::zero();
    for t in t_min..=t_max {
        let den = factorial(t - s1)
            * factorial(t - s2)
            * factorial(t - s3)
            * factorial(t - s4)
            * factorial(p1 - t)
            * factorial(p2 - t)
            * factorial(p3 - t);
        let term = BigRational::new(factorial(t + 1), den);
        if t % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if sum.is_zero() {
        return 0.0;
    }

    let mut norm = triangle_coeff(tj1, tj2, tj3);
    norm *= triangle_coeff(tj1, tj5, tj6);
    norm *= triangle_coeff(tj4, tj2, tj6);
    norm *= triangle_coeff(tj4, tj5, tj3);

    combine_sqrt_product(1.0, &norm, &sum)
}

/// Clebsch-Gordan coefficient <j1 m1, j2 m2 | J M>, all arguments doubled.
pub fn clebsch_gordan(tj1: i32, tm1: i32, tj2: i32, tm2: i32, tbig_j: i32, tbig_m: i32) -> f64 {
    let phase = if ((tj1 - tj2 + tbig_m) / 2) % 2 == 0 { 1.0 } else { -1.0 };
    phase
        * f64::from(tbig_j + 1).sqrt()
        * wigner_3j(tj1, tj2, tbig_j, tm1, tm2, -tbig_m)
}
