//! Dense complex linear algebra shared by the dynamics and spectrum modules:
//! Kronecker products, column-major vectorization, and a scaling-and-squaring
//! matrix exponential. Eigen and linear-solve calls go straight to LAPACK via
//! ndarray-linalg at the call sites; only what LAPACK does not provide lives
//! here.

use ndarray::{Array1, Array2, ArrayView1};
use ndarray_linalg::{Factorize, Solve};
use num_complex::ComplexFloat;

use crate::C64;

/// Kronecker product a (x) b.
pub fn kron(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let (ra, ca) = a.dim();
    let (rb, cb) = b.dim();
    let mut out = Array2::zeros((ra * rb, ca * cb));
    for i in 0..ra {
        for j in 0..ca {
            let aij = a[[i, j]];
            if aij == C64::ZERO {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out[[i * rb + k, j * cb + l]] = aij * b[[k, l]];
                }
            }
        }
    }
    out
}

/// Stack the columns of m into one vector, so that
/// vectorize(A X B) = kron(B^T, A) . vectorize(X).
pub fn vectorize(m: &Array2<C64>) -> Array1<C64> {
    let (rows, cols) = m.dim();
    Array1::from_iter((0..cols).flat_map(|j| (0..rows).map(move |i| (i, j))).map(|(i, j)| m[[i, j]]))
}

/// Inverse of `vectorize` for an n x n matrix.
pub fn unvectorize(v: ArrayView1<C64>, n: usize) -> Array2<C64> {
    assert_eq!(v.len(), n * n, "vector length {} does not match {n}x{n}", v.len());
    Array2::from_shape_fn((n, n), |(i, j)| v[j * n + i])
}

fn one_norm(a: &Array2<C64>) -> f64 {
    let mut best = 0.0_f64;
    for col in a.columns() {
        let s: f64 = col.iter().map(|z| z.abs()).sum();
        best = best.max(s);
    }
    best
}

/// Matrix exponential by Pade order 13 with scaling and squaring.
pub fn expm(a: &Array2<C64>) -> Array2<C64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm needs a square matrix");
    const THETA13: f64 = 5.371_920_351_148_152;
    const B: [f64; 14] = [
        64_764_752_532_480_000.0,
        32_382_376_266_240_000.0,
        7_771_770_303_897_600.0,
        1_187_353_796_428_800.0,
        129_060_195_264_000.0,
        10_559_470_521_600.0,
        670_442_572_800.0,
        33_522_128_640.0,
        1_323_241_920.0,
        40_840_800.0,
        960_960.0,
        16_380.0,
        182.0,
        1.0,
    ];

    let norm = one_norm(a);
    let s = if norm > THETA13 {
        ((norm / THETA13).log2().ceil() as i32).clamp(0, 60)
    } else {
        0
    };
    let scaled = a.mapv(|z| z / 2f64.powi(s));

    let eye = Array2::<C64>::eye(n);
    let a2 = scaled.dot(&scaled);
    let a4 = a2.dot(&a2);
    let a6 = a2.dot(&a4);

    let u_inner = a6.mapv(|z| z * B[13]) + a4.mapv(|z| z * B[11]) + a2.mapv(|z| z * B[9]);
    let u_poly = a6.dot(&u_inner)
        + a6.mapv(|z| z * B[7])
        + a4.mapv(|z| z * B[5])
        + a2.mapv(|z| z * B[3])
        + eye.mapv(|z| z * B[1]);
    let u = scaled.dot(&u_poly);

    let v_inner = a6.mapv(|z| z * B[12]) + a4.mapv(|z| z * B[10]) + a2.mapv(|z| z * B[8]);
    let v = a6.dot(&v_inner)
        + a6.mapv(|z| z * B[6])
        + a4.mapv(|z| z * B[4])
        + a2.mapv(|z| z * B[2])
        + eye.mapv(|z| z * B[0]);

    let lhs = &v - &u;
    let rhs = &v + &u;
    let lu = lhs.factorize().expect("expm Pade denominator is singular");
    let mut result = Array2::<C64>::zeros((n, n));
    for j in 0..n {
        let col = lu.solve(&rhs.column(j).to_owned()).expect("expm Pade solve failed");
        result.column_mut(j).assign(&col);
    }
    for _ in 0..s {
        result = result.dot(&result);
    }
    result
}
