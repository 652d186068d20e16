use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::error::{Error, Result};

const TRACE_TOL: f64 = 1e-12;

/// 2×2 density matrix in the `{ψ₊, ψ₋}` eigenbasis; `ρ₋₊ = conj(ρ₊₋)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    rho_pp: f64,
    rho_mm: f64,
    rho_pm: Complex64,
}

impl DensityMatrix {
    pub fn new(rho_pp: f64, rho_mm: f64, rho_pm: Complex64) -> Result<Self> {
        if !(rho_pp.is_finite() && rho_mm.is_finite() && rho_pm.re.is_finite() && rho_pm.im.is_finite()) {
            return Err(Error::Domain("density matrix entries must be finite".into()));
        }
        if (rho_pp + rho_mm - 1.0).abs() > TRACE_TOL {
            return Err(Error::Domain(format!(
                "density matrix trace is {}, expected 1",
                rho_pp + rho_mm
            )));
        }
        for (name, v) in [("rho_pp", rho_pp), ("rho_mm", rho_mm)] {
            if !(-TRACE_TOL..=1.0 + TRACE_TOL).contains(&v) {
                return Err(Error::Domain(format!("{name} = {v} outside [0, 1]")));
            }
        }
        Ok(Self { rho_pp, rho_mm, rho_pm })
    }

    pub(crate) fn from_parts(rho_pp: f64, rho_mm: f64, rho_pm: Complex64) -> Self {
        Self { rho_pp, rho_mm, rho_pm }
    }

    /// Projector onto the normalised vector `a₊ψ₊ + a₋ψ₋`.
    pub fn from_pure(a_plus: Complex64, a_minus: Complex64) -> Result<Self> {
        let norm_sqr = a_plus.norm_sqr() + a_minus.norm_sqr();
        if !(norm_sqr > 0.0) || !norm_sqr.is_finite() {
            return Err(Error::Domain("state vector must have finite non-zero norm".into()));
        }
        let pp = a_plus.norm_sqr() / norm_sqr;
        Ok(Self {
            rho_pp: pp,
            rho_mm: 1.0 - pp,
            rho_pm: a_plus * a_minus.conj() / norm_sqr,
        })
    }

    /// `ρ = (I + r·σ)/2` for a Bloch vector with `|r| <= 1`.
    pub fn from_bloch(r: [f64; 3]) -> Result<Self> {
        let len = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
        if !(len <= 1.0 + 1e-12) {
            return Err(Error::Domain(format!("Bloch vector length {len} exceeds 1")));
        }
        Ok(Self {
            rho_pp: 0.5 * (1.0 + r[2]),
            rho_mm: 0.5 * (1.0 - r[2]),
            rho_pm: Complex64::new(0.5 * r[0], -0.5 * r[1]),
        })
    }

    /// `|ψ₊⟩⟨ψ₊|`
    pub fn excited() -> Self {
        Self::from_parts(1.0, 0.0, Complex64::new(0.0, 0.0))
    }

    /// `|ψ₋⟩⟨ψ₋|`
    pub fn ground() -> Self {
        Self::from_parts(0.0, 1.0, Complex64::new(0.0, 0.0))
    }

    pub fn maximally_mixed() -> Self {
        Self::from_parts(0.5, 0.5, Complex64::new(0.0, 0.0))
    }

    /// The equal superposition `(ψ₊ + ψ₋)/√2`.
    pub fn equal_superposition() -> Self {
        let a = Complex64::new(FRAC_1_SQRT_2, 0.0);
        Self::from_pure(a, a).expect("normalised")
    }

    pub fn rho_pp(&self) -> f64 {
        self.rho_pp
    }
    pub fn rho_mm(&self) -> f64 {
        self.rho_mm
    }
    pub fn rho_pm(&self) -> Complex64 {
        self.rho_pm
    }
    pub fn rho_mp(&self) -> Complex64 {
        self.rho_pm.conj()
    }

    pub fn trace(&self) -> f64 {
        self.rho_pp + self.rho_mm
    }

    pub fn determinant(&self) -> f64 {
        self.rho_pp * self.rho_mm - self.rho_pm.norm_sqr()
    }

    pub fn bloch_vector(&self) -> [f64; 3] {
        [2.0 * self.rho_pm.re, -2.0 * self.rho_pm.im, self.rho_pp - self.rho_mm]
    }

    pub fn to_matrix(&self) -> Matrix2<Complex64> {
        Matrix2::new(
            Complex64::new(self.rho_pp, 0.0),
            self.rho_pm,
            self.rho_pm.conj(),
            Complex64::new(self.rho_mm, 0.0),
        )
    }

    /// Reads the Hermitian part of `m`; the trace is not renormalised.
    pub(crate) fn from_matrix(m: &Matrix2<Complex64>) -> Self {
        Self::from_parts(m[(0, 0)].re, m[(1, 1)].re, 0.5 * (m[(0, 1)] + m[(1, 0)].conj()))
    }
}
