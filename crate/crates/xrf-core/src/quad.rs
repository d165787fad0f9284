//! Gauss-Legendre quadrature for radial matrix elements.
//!
//! Bound-orbital integrands look like x^(2 gamma) e^(-x) times polynomials
//! and slowly oscillating spherical Bessel factors: smooth everywhere except
//! an algebraic cusp at the origin (gamma is not an integer) and exponential
//! decay at infinity. `integrate_decaying` handles both: a power-law
//! substitution flattens the cusp on the first panel, geometrically growing
//! panels chase the tail, and each panel is accepted only when two
//! Gauss-Legendre orders agree.

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2, "need at least two nodes");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi-style initial guess, then Newton on P_n.
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = z;
            for k in 1..n {
                let p2 = ((2 * k + 1) as f64 * z * p1 - k as f64 * p0) / (k + 1) as f64;
                p0 = p1;
                p1 = p2;
            }
            pp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * pp * pp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn fixed_rule(f: &dyn Fn(f64) -> f64, a: f64, b: f64, x: &[f64], w: &[f64]) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = 0.0;
    for (&xi, &wi) in x.iter().zip(w) {
        acc += wi * f(mid + half * xi);
    }
    half * acc
}

struct Rules {
    x32: Vec<f64>,
    w32: Vec<f64>,
    x64: Vec<f64>,
    w64: Vec<f64>,
}

impl Rules {
    fn get() -> &'static Rules {
        static RULES: std::sync::OnceLock<Rules> = std::sync::OnceLock::new();
        RULES.get_or_init(|| {
            let (x32, w32) = gauss_legendre(32);
            let (x64, w64) = gauss_legendre(64);
            Self { x32, w32, x64, w64 }
        })
    }

    /// Bisect until the two orders agree to 5e-15 relative or the difference
    /// drops below the absolute budget `tol_abs` (halved per child so the
    /// budget bounds the sum of accepted errors). The relative test alone can
    /// never converge where the integrand's own evaluation noise exceeds it,
    /// as happens for exp(-x/2) tails with x of a few hundred, so callers
    /// integrating negligible regions must provide a budget.
    fn adaptive(&self, f: &dyn Fn(f64) -> f64, a: f64, b: f64, depth: u32, tol_abs: f64) -> f64 {
        let coarse = fixed_rule(f, a, b, &self.x32, &self.w32);
        let fine = fixed_rule(f, a, b, &self.x64, &self.w64);
        let err = (fine - coarse).abs();
        if err <= 5e-15 * fine.abs().max(1e-300) || err <= tol_abs || depth >= 20 {
            return fine;
        }
        let mid = 0.5 * (a + b);
        let child_tol = 0.5 * tol_abs;
        self.adaptive(f, a, mid, depth + 1, child_tol)
            + self.adaptive(f, mid, b, depth + 1, child_tol)
    }
}

/// Adaptive Gauss-Legendre integral of f over the finite interval [a, b].
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    Rules::get().adaptive(&f, a, b, 0, 0.0)
}

/// Integral of f over [0, inf) for integrands that decay like exp(-r/scale)
/// (or faster) beyond r of order `scale`, allowing an algebraic cusp at 0.
pub fn integrate_decaying(f: impl Fn(f64) -> f64, scale: f64) -> f64 {
    assert!(scale > 0.0 && scale.is_finite(), "decay scale must be positive, got {scale}");
    let rules = Rules::get();
    // First panel [0, s] under r = s u^4: lifts x^p cusps to high smoothness.
    let s = scale;
    let first = rules.adaptive(&|u: f64| f(s * u.powi(4)) * 4.0 * s * u.powi(3), 0.0, 1.0, 0, 0.0);
    let mut acc = first;
    let mut lo = s;
    let mut quiet = 0;
    for _ in 0..64 {
        let hi = 2.0 * lo;
        // Resolving each tail panel beyond 1e-17 of the running total buys
        // nothing: deep in the tail the integrand is pure rounding noise.
        let tol_abs = 1e-17 * acc.abs().max(1e-300);
        let panel = rules.adaptive(&f, lo, hi, 0, tol_abs);
        acc += panel;
        if panel.abs() <= 1e-17 * acc.abs().max(1e-300) {
            quiet += 1;
            if quiet >= 2 {
                break;
            }
        } else {
            quiet = 0;
        }
        lo = hi;
    }
    acc
}
