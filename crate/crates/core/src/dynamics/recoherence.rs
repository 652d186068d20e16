use crate::error::Result;
use crate::model::{rates_closed_form, SystemParams};

/// Where the coherence of the equal superposition grows, on a
/// `(ε/Δ) × t` grid at fixed `ω₀`, `ω_c`, `α`.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoherenceMap {
    pub times: Vec<f64>,
    pub ratios: Vec<f64>,
    /// `mask[i][k]` for `ratios[i]` and `times[k]`.
    pub mask: Vec<Vec<bool>>,
}

impl RecoherenceMap {
    pub fn region_size(&self, ratio_index: usize) -> usize {
        self.mask[ratio_index].iter().filter(|&&b| b).count()
    }

    /// Maximal `[start, end]` time intervals of a row where the mask holds.
    pub fn intervals(&self, ratio_index: usize) -> Vec<(f64, f64)> {
        let row = &self.mask[ratio_index];
        let mut out = Vec::new();
        let mut start = None;
        for (k, &inside) in row.iter().enumerate() {
            match (inside, start) {
                (true, None) => start = Some(k),
                (false, Some(s)) => {
                    out.push((self.times[s], self.times[k - 1]));
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = start {
            out.push((self.times[s], self.times[row.len() - 1]));
        }
        out
    }
}

/// Marks `(t, ε/Δ)` where `dζ/dt < 0`, i.e. where
/// `(ε²/2ω₀²)γ₀ + (Δ²/8ω₀²)(γ₊ω₀ + γ₋ω₀) < 0`.
///
/// `ω₀` of `p` is kept and `ε`, `Δ` are recomputed for each ratio.
pub fn recoherence_mask(p: &SystemParams, times: &[f64], ratios: &[f64]) -> Result<RecoherenceMap> {
    let rates = times
        .iter()
        .map(|&t| rates_closed_form(p, t))
        .collect::<Result<Vec<_>>>()?;
    let mut mask = Vec::with_capacity(ratios.len());
    for &ratio in ratios {
        let q = p.with_bias_ratio(ratio)?;
        mask.push(
            rates
                .iter()
                .map(|r| r.reweighted(&q).coherence_decay_rate() < 0.0)
                .collect(),
        );
    }
    Ok(RecoherenceMap {
        times: times.to_vec(),
        ratios: ratios.to_vec(),
        mask,
    })
}
