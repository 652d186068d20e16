use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::dynamics::DensityMatrix;
use crate::error::{Error, Result};

/// Pure state `a₊|ψ₊⟩ + a₋|ψ₋⟩` in the interaction picture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureState {
    a_plus: Complex64,
    a_minus: Complex64,
}

impl PureState {
    /// Normalises the given amplitudes.
    pub fn new(a_plus: Complex64, a_minus: Complex64) -> Result<Self> {
        let norm = (a_plus.norm_sqr() + a_minus.norm_sqr()).sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::param(
                "initial state",
                format!("amplitudes ({a_plus}, {a_minus}) have no finite nonzero norm"),
            ));
        }
        Ok(Self {
            a_plus: a_plus / norm,
            a_minus: a_minus / norm,
        })
    }

    /// `cos(θ/2)|ψ₊⟩ + e^{iφ} sin(θ/2)|ψ₋⟩`, the state with Bloch vector
    /// `(sin θ cos φ, sin θ sin φ, cos θ)`.
    pub fn from_angles(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::param(
                "initial state",
                format!("angles ({theta}, {phi}) must be finite"),
            ));
        }
        let (s, c) = (0.5 * theta).sin_cos();
        Self::new(Complex64::new(c, 0.0), Complex64::from_polar(s, phi))
    }

    pub fn equal_superposition() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            a_plus: Complex64::new(h, 0.0),
            a_minus: Complex64::new(h, 0.0),
        }
    }

    pub fn excited() -> Self {
        Self {
            a_plus: Complex64::new(1.0, 0.0),
            a_minus: Complex64::new(0.0, 0.0),
        }
    }

    pub fn ground() -> Self {
        Self {
            a_plus: Complex64::new(0.0, 0.0),
            a_minus: Complex64::new(1.0, 0.0),
        }
    }

    pub fn a_plus(&self) -> Complex64 {
        self.a_plus
    }
    pub fn a_minus(&self) -> Complex64 {
        self.a_minus
    }
    pub fn norm_sqr(&self) -> f64 {
        self.a_plus.norm_sqr() + self.a_minus.norm_sqr()
    }

    /// `σ_z φ`.
    pub fn phase_flipped(&self) -> Self {
        Self {
            a_plus: self.a_plus,
            a_minus: -self.a_minus,
        }
    }

    /// `a₊ a₋*`, the coherence of `|φ⟩⟨φ|`.
    pub fn coherence(&self) -> Complex64 {
        self.a_plus * self.a_minus.conj()
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_parts(self.a_plus.norm_sqr(), self.a_minus.norm_sqr(), self.coherence())
    }

    pub(crate) fn from_raw(a_plus: Complex64, a_minus: Complex64) -> Self {
        Self { a_plus, a_minus }
    }
}

/// The four states an ensemble member can occupy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    /// The deterministically evolving initial state.
    Psi0,
    /// Its phase-flipped partner `σ_z ψ₀`.
    Psi0Ph,
    Plus,
    Minus,
}

impl Slot {
    pub const ALL: [Slot; 4] = [Slot::Psi0, Slot::Psi0Ph, Slot::Plus, Slot::Minus];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Slot::Psi0 => "psi0",
            Slot::Psi0Ph => "psi0_ph",
            Slot::Plus => "plus",
            Slot::Minus => "minus",
        }
    }

    /// State vector of the slot given the current representative `ψ₀`.
    pub fn state(self, psi0: &PureState) -> PureState {
        match self {
            Slot::Psi0 => *psi0,
            Slot::Psi0Ph => psi0.phase_flipped(),
            Slot::Plus => PureState::excited(),
            Slot::Minus => PureState::ground(),
        }
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Occupation numbers `N_α` of the four slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct SlotCounts(pub [u64; 4]);

impl SlotCounts {
    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn fraction(&self, slot: Slot) -> f64 {
        self[slot] as f64 / self.total() as f64
    }

    pub(crate) fn add(&mut self, other: &SlotCounts) {
        for (a, b) in self.0.iter_mut().zip(other.0) {
            *a += b;
        }
    }
}

impl Index<Slot> for SlotCounts {
    type Output = u64;
    fn index(&self, slot: Slot) -> &u64 {
        &self.0[slot.index()]
    }
}

impl IndexMut<Slot> for SlotCounts {
    fn index_mut(&mut self, slot: Slot) -> &mut u64 {
        &mut self.0[slot.index()]
    }
}

/// An ensemble of `N` members, each in one of the four slots, sharing the
/// deterministic representative `ψ₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleState {
    pub(crate) members: Vec<Slot>,
    pub(crate) counts: SlotCounts,
    pub(crate) psi0: PureState,
    pub(crate) steps_taken: u64,
}

impl EnsembleState {
    /// All `n` members start in `ψ₀`.
    pub fn new(n: usize, psi0: PureState) -> Result<Self> {
        Self::from_counts(SlotCounts([n as u64, 0, 0, 0]), psi0)
    }

    /// Members laid out slot by slot in the order `ψ₀, σ_zψ₀, ψ₊, ψ₋`.
    pub fn from_counts(counts: SlotCounts, psi0: PureState) -> Result<Self> {
        if counts.total() == 0 {
            return Err(Error::param("n_traj", "ensemble needs at least one member"));
        }
        let members = Slot::ALL
            .iter()
            .flat_map(|&s| std::iter::repeat(s).take(counts[s] as usize))
            .collect();
        Ok(Self {
            members,
            counts,
            psi0,
            steps_taken: 0,
        })
    }

    pub fn counts(&self) -> SlotCounts {
        self.counts
    }
    pub fn psi0(&self) -> &PureState {
        &self.psi0
    }
    pub fn members(&self) -> &[Slot] {
        &self.members
    }
    pub fn len(&self) -> usize {
        self.members.len()
    }
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
    pub fn steps_taken(&self) -> u64 {
        self.steps_taken
    }
}

/// `ρ = Σ_α (N_α/N) |φ_α⟩⟨φ_α|`.
pub fn ensemble_density(e: &EnsembleState) -> DensityMatrix {
    density_from_counts(&e.counts, &e.psi0)
}

pub(crate) fn density_from_counts(counts: &SlotCounts, psi0: &PureState) -> DensityMatrix {
    let n = counts.total() as f64;
    let frac = |s| counts[s] as f64 / n;
    let in_psi0 = frac(Slot::Psi0) + frac(Slot::Psi0Ph);
    let pp = in_psi0 * psi0.a_plus.norm_sqr() + frac(Slot::Plus);
    let mm = in_psi0 * psi0.a_minus.norm_sqr() + frac(Slot::Minus);
    let pm = psi0.coherence() * (frac(Slot::Psi0) - frac(Slot::Psi0Ph));
    DensityMatrix::from_parts(pp, mm, pm)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_in_superposition() {
        let e = EnsembleState::new(1000, PureState::equal_superposition()).unwrap();
        let rho = ensemble_density(&e);
        assert!((rho.rho_pm().re - 0.5).abs() < 1e-15);
        assert!((rho.rho_pp() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn phase_flipped_partners_cancel() {
        let e = EnsembleState::from_counts(SlotCounts([5, 5, 0, 0]), PureState::equal_superposition()).unwrap();
        assert_eq!(ensemble_density(&e).rho_pm(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn mixed_counts() {
        let e = EnsembleState::from_counts(SlotCounts([6, 2, 1, 1]), PureState::equal_superposition()).unwrap();
        let rho = ensemble_density(&e);
        assert!((rho.rho_pm().re - 0.2).abs() < 1e-15);
        assert!((rho.rho_pp() - 0.5).abs() < 1e-15);
        assert_eq!(e.members()[..6], [Slot::Psi0; 6]);
        assert_eq!(e.members()[9], Slot::Minus);
    }

    #[test]
    fn angles_match_bloch_vector() {
        let s = PureState::from_angles(1.1, -0.4).unwrap();
        let r = s.density().bloch_vector();
        let expected = [
            1.1f64.sin() * (-0.4f64).cos(),
            1.1f64.sin() * (-0.4f64).sin(),
            1.1f64.cos(),
        ];
        for i in 0..3 {
            assert!((r[i] - expected[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_state_is_rejected() {
        assert!(PureState::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)).is_err());
        assert!(EnsembleState::from_counts(SlotCounts::default(), PureState::excited()).is_err());
    }
}
