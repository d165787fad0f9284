//! Driven three-level dynamics in the double rotating frame.
//!
//! A V-type scheme on levels {1, 2, 3}: an x-ray field couples 1-3 with Rabi
//! coupling g31 and an optical field couples 1-2 with g21. After rotating at
//! both drive frequencies the Hamiltonian is static, with the two detunings
//! on the diagonal, and dissipation enters through a Lindblad generator:
//! radiative decays 3 -> 1, 3 -> 2, 2 -> 1, while the finite x-ray drive
//! bandwidth adds gamma_d to the decay rate of the 1-3 coherence alone.
//! That convention is deliberate: it is not a completely positive channel
//! (a |3><3| dephasing jump would also damp the 2-3 coherence), so extreme
//! gamma_d can push a steady state slightly negative, which the solver
//! reports rather than hides. Everything is kept in eV; time enters only
//! through expm(L t / hbar).

use ndarray::{Array1, Array2};
use ndarray_linalg::{EigValsh, Factorize, Norm, Solve, UPLO};
use thiserror::Error;

use crate::constants::HBAR_EV_S;
use crate::linalg::{expm, kron, unvectorize, vectorize};
use crate::C64;

/// Failure modes of the steady-state solve.
#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("no unique steady state: {0}")]
    NoUniqueSteadyState(String),
    #[error("linear algebra failed: {0}")]
    Linalg(#[from] ndarray_linalg::error::LinalgError),
    #[error("steady state lost positivity: smallest population eigenvalue {0:e}")]
    NotPositive(f64),
}

/// Rotating-frame description of the driven ion. All quantities are in eV:
/// `delta_x_ev` and `delta_o_ev` are the diagonal energies of levels 3 and 2
/// (transition frequency minus drive frequency for each field), g are the
/// half-Rabi couplings, gamma the radiative rates, and `gamma_d_ev` the extra
/// dephasing rate of the 1-3 coherence.
#[derive(Debug, Clone, Copy)]
pub struct ThreeLevelSystem {
    pub delta_x_ev: f64,
    pub delta_o_ev: f64,
    pub g31_ev: f64,
    pub g21_ev: f64,
    pub gamma31_ev: f64,
    pub gamma32_ev: f64,
    pub gamma21_ev: f64,
    pub gamma_d_ev: f64,
}

/// |i><j| on the three-level space, zero-based.
fn ketbra(i: usize, j: usize) -> Array2<C64> {
    let mut m = Array2::zeros((3, 3));
    m[[i, j]] = C64::new(1.0, 0.0);
    m
}

impl ThreeLevelSystem {
    /// Rotating-frame Hamiltonian (eV): detunings on the diagonal, the two
    /// drives coupling the ground state to each excited level.
    pub fn hamiltonian(&self) -> Array2<C64> {
        let mut h = Array2::zeros((3, 3));
        h[[1, 1]] = C64::new(self.delta_o_ev, 0.0);
        h[[2, 2]] = C64::new(self.delta_x_ev, 0.0);
        h[[0, 2]] = C64::new(self.g31_ev, 0.0);
        h[[2, 0]] = C64::new(self.g31_ev, 0.0);
        h[[0, 1]] = C64::new(self.g21_ev, 0.0);
        h[[1, 0]] = C64::new(self.g21_ev, 0.0);
        h
    }

    /// Radiative jump operators with their rates in eV.
    fn jumps(&self) -> [(Array2<C64>, f64); 3] {
        [
            (ketbra(0, 2), self.gamma31_ev),
            (ketbra(1, 2), self.gamma32_ev),
            (ketbra(0, 1), self.gamma21_ev),
        ]
    }

    /// Lindblad generator as a 9 x 9 matrix acting on column-major vec(rho),
    /// in eV: d vec(rho) / dt = (L / hbar) vec(rho).
    pub fn liouvillian(&self) -> Array2<C64> {
        let h = self.hamiltonian();
        let id: Array2<C64> = Array2::eye(3);
        let mut l = (kron(&id, &h) - kron(&h.t().to_owned(), &id)).mapv(|z| z * C64::new(0.0, -1.0));
        for (op, rate) in self.jumps() {
            let opd_op = op.mapv(|z| z.conj()).t().dot(&op);
            let sandwich = kron(&op.mapv(|z| z.conj()), &op);
            let left = kron(&id, &opd_op);
            let right = kron(&opd_op.t().to_owned(), &id);
            l = l + (sandwich - (left + right).mapv(|z| z * 0.5)).mapv(|z| z * rate);
        }
        // Drive-bandwidth broadening goes into the 1-3 coherence decay only
        // (column-major vec indices 2 and 6), leaving the 2-3 coherence
        // untouched; see the module doc for why this is not a jump channel.
        l[[2, 2]] -= self.gamma_d_ev;
        l[[6, 6]] -= self.gamma_d_ev;
        l
    }

    /// Closed-form upper-level population under x-ray-only driving, where
    /// almost everything piles up in the metastable level and the top level
    /// keeps only gamma21 / (gamma32 + 2 gamma21). Needs a nonzero
    /// denominator, i.e. some escape path from level 2.
    pub fn trapped_upper_population(&self) -> f64 {
        self.gamma21_ev / (self.gamma32_ev + 2.0 * self.gamma21_ev)
    }

    /// Unique trace-one steady state of the Lindblad generator.
    pub fn steady_state(&self) -> Result<Array2<C64>, DynamicsError> {
        let l = self.liouvillian();
        let l_scale = l.norm_max().max(1e-300);

        // A structurally zero row means a density-matrix component with no
        // dynamics at all, so the null space cannot be one-dimensional.
        for i in 0..9 {
            let row_max = (0..9).map(|j| l[[i, j]].norm()).fold(0.0, f64::max);
            if row_max <= 1e-300 {
                return Err(DynamicsError::NoUniqueSteadyState(format!(
                    "vec component {i} is completely decoupled"
                )));
            }
        }

        // Bordered system: replace the last row with the trace condition.
        let mut m = l.clone();
        for j in 0..9 {
            m[[8, j]] = C64::new(0.0, 0.0);
        }
        m[[8, 0]] = C64::new(1.0, 0.0);
        m[[8, 4]] = C64::new(1.0, 0.0);
        m[[8, 8]] = C64::new(1.0, 0.0);
        let mut rhs: Array1<C64> = Array1::zeros(9);
        rhs[8] = C64::new(1.0, 0.0);

        // Rows of L mix rates spanning many orders of magnitude; equilibrate
        // before factoring, refine against the unscaled system afterwards.
        let mut scales = [0.0f64; 9];
        let mut m_eq = m.clone();
        for i in 0..9 {
            let s = (0..9).map(|j| m[[i, j]].norm()).fold(0.0, f64::max);
            scales[i] = s;
            for j in 0..9 {
                m_eq[[i, j]] = m[[i, j]] / s;
            }
        }
        let rhs_eq = Array1::from_iter((0..9).map(|i| rhs[i] / scales[i]));
        let factored = m_eq
            .factorize()
            .map_err(|_| DynamicsError::NoUniqueSteadyState("bordered system is singular".into()))?;
        let mut v = factored
            .solve(&rhs_eq)
            .map_err(|_| DynamicsError::NoUniqueSteadyState("bordered system is singular".into()))?;
        for _ in 0..2 {
            let residual = &rhs - &m.dot(&v);
            let r_eq = Array1::from_iter((0..9).map(|i| residual[i] / scales[i]));
            let delta = factored.solve(&r_eq)?;
            v = v + delta;
        }

        if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(DynamicsError::NoUniqueSteadyState(
                "solution overflowed; generator is singular beyond the trace direction".into(),
            ));
        }
        let residual_inf = l
            .dot(&v)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        let v_inf = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if residual_inf > 1e-9 * l_scale * v_inf.max(1.0) {
            return Err(DynamicsError::NoUniqueSteadyState(format!(
                "null-space residual {residual_inf:e} too large for |L| = {l_scale:e}"
            )));
        }

        let raw = unvectorize(v.view(), 3);
        let mut rho = Array2::zeros((3, 3));
        for i in 0..3 {
            for j in 0..3 {
                rho[[i, j]] = (raw[[i, j]] + raw[[j, i]].conj()) * 0.5;
            }
        }
        let trace = (rho[[0, 0]] + rho[[1, 1]] + rho[[2, 2]]).re;
        if !(0.5..=2.0).contains(&trace) {
            return Err(DynamicsError::NoUniqueSteadyState(format!(
                "trace collapsed to {trace:e} during the solve"
            )));
        }
        let rho = rho.mapv(|z| z / trace);
        let pops = rho.eigvalsh(UPLO::Lower)?;
        if pops.iter().any(|&p| p < -1e-10) {
            return Err(DynamicsError::NotPositive(
                pops.iter().cloned().fold(f64::INFINITY, f64::min),
            ));
        }
        Ok(rho)
    }

    /// Propagate a density matrix for `t_s` seconds.
    pub fn evolve(&self, rho: &Array2<C64>, t_s: f64) -> Array2<C64> {
        let a = self.liouvillian().mapv(|z| z * (t_s / HBAR_EV_S));
        let v = expm(&a).dot(&vectorize(rho));
        unvectorize(v.view(), 3)
    }
}
