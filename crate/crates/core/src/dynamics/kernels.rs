use num_complex::Complex64;

use super::{grid_steps, DensityMatrix};
use crate::error::{Error, Result};
use crate::model::{rates_closed_form, RateSet, SystemParams};
use crate::quadrature::cumulative_simpson;

/// The map `ρ(t) = M(t)ρ(0)` at one time.
///
/// Acting on `(ρ₊₊, ρ₊₋, ρ₋₊, ρ₋₋)` it is
///
/// ```text
/// | g    0      0      f   |
/// | 0    e^-ζ   0      0   |
/// | 0    0      e^-ζ   0   |
/// | 1-g  0      0      1-f |
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicalMap {
    pub t: f64,
    pub g: f64,
    pub f: f64,
    pub exp_minus_zeta: f64,
}

impl DynamicalMap {
    pub fn apply(&self, rho0: &DensityMatrix) -> DensityMatrix {
        let (pp, mm) = (rho0.rho_pp(), rho0.rho_mm());
        DensityMatrix::from_parts(
            self.g * pp + self.f * mm,
            (1.0 - self.g) * pp + (1.0 - self.f) * mm,
            self.exp_minus_zeta * rho0.rho_pm(),
        )
    }

    pub fn matrix(&self) -> [[f64; 4]; 4] {
        let e = self.exp_minus_zeta;
        [
            [self.g, 0.0, 0.0, self.f],
            [0.0, e, 0.0, 0.0],
            [0.0, 0.0, e, 0.0],
            [1.0 - self.g, 0.0, 0.0, 1.0 - self.f],
        ]
    }
}

/// Cumulative kernels `η, ζ, f, g` sampled on the grid `t_k = k h`.
///
/// * `η(t) = ∫₀ᵗ (γ₁ + γ₂)`
/// * `ζ(t) = ∫₀ᵗ [(Δ²/8ω₀²)(γ₊ω₀ + γ₋ω₀) + (ε²/2ω₀²)γ₀]`
/// * `f(t) = e^{-η(t)} ∫₀ᵗ γ₂(s) e^{+η(s)} ds`
/// * `g(t) = f(t) + e^{-η(t)}`
///
/// `f` solves `ḟ = -(γ₁ + γ₂) f + γ₂`, the excited population reached from
/// the ground state.
#[derive(Debug, Clone)]
pub struct KernelTable {
    params: SystemParams,
    step: f64,
    rates: Vec<RateSet>,
    eta: Vec<f64>,
    zeta: Vec<f64>,
    f: Vec<f64>,
    g: Vec<f64>,
}

pub fn build_kernels(p: &SystemParams, t_max: f64, h: f64) -> Result<KernelTable> {
    let n = grid_steps(t_max, h)?;
    let rates = (0..=n)
        .map(|k| rates_closed_form(p, k as f64 * h))
        .collect::<Result<Vec<_>>>()?;
    KernelTable::from_rates(*p, h, rates)
}

impl KernelTable {
    /// Builds the kernels from rates already sampled on a uniform grid.
    pub fn from_rates(params: SystemParams, step: f64, rates: Vec<RateSet>) -> Result<Self> {
        if rates.is_empty() {
            return Err(Error::Grid("empty rate table".into()));
        }
        let eta_rate: Vec<f64> = rates.iter().map(|r| r.gamma1 + r.gamma2).collect();
        let zeta_rate: Vec<f64> = rates.iter().map(RateSet::coherence_decay_rate).collect();
        let eta = cumulative_simpson(&eta_rate, step);
        let zeta = cumulative_simpson(&zeta_rate, step);
        let pumped: Vec<f64> = rates.iter().zip(&eta).map(|(r, e)| r.gamma2 * e.exp()).collect();
        let pumped = cumulative_simpson(&pumped, step);
        let f: Vec<f64> = pumped.iter().zip(&eta).map(|(i, e)| (-e).exp() * i).collect();
        let g = f.iter().zip(&eta).map(|(f, e)| f + (-e).exp()).collect();
        Ok(Self {
            params,
            step,
            rates,
            eta,
            zeta,
            f,
            g,
        })
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }
    pub fn step(&self) -> f64 {
        self.step
    }
    /// Number of grid points, including `t = 0`.
    pub fn len(&self) -> usize {
        self.eta.len()
    }
    pub fn is_empty(&self) -> bool {
        self.eta.is_empty()
    }
    pub fn t_max(&self) -> f64 {
        self.time(self.len() - 1)
    }
    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.step
    }
    pub fn rates(&self) -> &[RateSet] {
        &self.rates
    }
    pub fn eta(&self) -> &[f64] {
        &self.eta
    }
    pub fn zeta(&self) -> &[f64] {
        &self.zeta
    }
    pub fn f(&self) -> &[f64] {
        &self.f
    }
    pub fn g(&self) -> &[f64] {
        &self.g
    }

    /// Grid index of `t`; off-grid times are rejected rather than interpolated.
    pub fn index_of(&self, t: f64) -> Result<usize> {
        let x = t / self.step;
        let k = x.round();
        if !(k >= 0.0) || (x - k).abs() > 1e-9 * k.max(1.0) || k as usize >= self.len() {
            return Err(Error::Grid(format!(
                "t = {t} is not on the grid (step {}, t_max {})",
                self.step,
                self.t_max()
            )));
        }
        Ok(k as usize)
    }

    pub fn map_at(&self, k: usize) -> DynamicalMap {
        DynamicalMap {
            t: self.time(k),
            g: self.g[k],
            f: self.f[k],
            exp_minus_zeta: (-self.zeta[k]).exp(),
        }
    }

    pub fn apply_at(&self, k: usize, rho0: &DensityMatrix) -> DensityMatrix {
        self.map_at(k).apply(rho0)
    }

    /// `ρ(t) = M(t) ρ(0)` for a grid time `t`.
    pub fn apply_map(&self, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
        Ok(self.apply_at(self.index_of(t)?, rho0))
    }

    /// `ρ(t_k)` for every grid point.
    pub fn trajectory(&self, rho0: &DensityMatrix) -> Vec<DensityMatrix> {
        (0..self.len()).map(|k| self.apply_at(k, rho0)).collect()
    }

    /// Coherence `ρ₊₋(t_k)` of the equal superposition, `e^{-ζ}/2`.
    pub fn superposition_coherence(&self, k: usize) -> Complex64 {
        Complex64::new(0.5 * (-self.zeta[k]).exp(), 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference() -> SystemParams {
        SystemParams::from_ratios(1.0 / (2.0 * 3f64.sqrt()), 10.0, 0.01).unwrap()
    }

    #[test]
    fn identity_at_origin() {
        let k = build_kernels(&reference(), 1.0, 1e-3).unwrap();
        assert_eq!((k.eta()[0], k.zeta()[0], k.f()[0], k.g()[0]), (0.0, 0.0, 0.0, 1.0));
        let rho = DensityMatrix::from_bloch([0.2, 0.3, -0.4]).unwrap();
        assert_eq!(k.apply_map(&rho, 0.0).unwrap(), rho);
        assert_eq!(
            k.map_at(0).matrix(),
            [
                [1.0, 0.0, 0.0, 0.0],
                [0.0, 1.0, 0.0, 0.0],
                [0.0, 0.0, 1.0, 0.0],
                [0.0, 0.0, 0.0, 1.0]
            ]
        );
    }

    #[test]
    fn unbiased_case_has_zeta_half_eta() {
        let p = SystemParams::from_ratios(0.0, 10.0, 0.01).unwrap();
        let k = build_kernels(&p, 5.0, 1e-3).unwrap();
        for i in 0..k.len() {
            assert!((k.zeta()[i] - 0.5 * k.eta()[i]).abs() <= 1e-18 + 1e-15 * k.eta()[i].abs());
        }
    }

    #[test]
    fn g_is_f_plus_decay() {
        let k = build_kernels(&reference(), 3.0, 1e-3).unwrap();
        for i in 0..k.len() {
            assert!((k.g()[i] - k.f()[i] - (-k.eta()[i]).exp()).abs() <= 1e-12);
        }
    }

    #[test]
    fn off_grid_times_are_rejected() {
        let k = build_kernels(&reference(), 1.0, 0.01).unwrap();
        let rho = DensityMatrix::maximally_mixed();
        assert!(matches!(k.apply_map(&rho, 0.005), Err(Error::Grid(_))));
        assert!(matches!(k.apply_map(&rho, 1.01), Err(Error::Grid(_))));
        assert!(k.apply_map(&rho, 0.37).is_ok());
        assert!(matches!(build_kernels(&reference(), 1.0, 0.3), Err(Error::Grid(_))));
    }

    #[test]
    fn coherence_of_superposition() {
        let k = build_kernels(&reference(), 2.0, 1e-3).unwrap();
        let rho0 = DensityMatrix::equal_superposition();
        for i in [0, 10, 999, 2000] {
            let rho = k.apply_at(i, &rho0);
            assert!((rho.rho_pm() - k.superposition_coherence(i)).norm() < 1e-15);
        }
    }
}
