use rand_chacha::rand_core::RngCore;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::state::{EnsembleState, PureState, Slot, SlotCounts};
use crate::error::{Error, Result};
use crate::model::{Channel, RateSet};

/// Upper bound on `dt (|γ₁| + |γ₂| + 2|γ₃|)`.
pub const MAX_RATE_STEP_PRODUCT: f64 = 0.1;
/// Upper bound on the total jump probability of one member in one step.
pub const MAX_JUMP_PROBABILITY: f64 = 0.5;
/// Smallest pre-normalisation norm accepted from the drift.
pub const MIN_DRIFT_NORM: f64 = 1e-6;

/// Members handled by one parallel work item. Each chunk reads its random
/// numbers from a fixed offset, so the chunking never changes the draws.
const CHUNK: usize = 4096;

fn check_step(rates: &RateSet, dt: f64) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Step(format!("dt must be finite and > 0, got {dt}")));
    }
    let load = dt * (rates.gamma1.abs() + rates.gamma2.abs() + 2.0 * rates.gamma3.abs());
    if load > MAX_RATE_STEP_PRODUCT {
        return Err(Error::Step(format!(
            "dt (|g1| + |g2| + 2|g3|) = {load:.3e} exceeds {MAX_RATE_STEP_PRODUCT}; reduce dt"
        )));
    }
    Ok(())
}

/// Drift `φ ← φ - (dt/2)[γ₁ σ₊σ₋ + γ₂ σ₋σ₊ + γ₃] φ` followed by
/// renormalisation. The rates enter with their sign.
pub fn deterministic_step(s: &PureState, rates: &RateSet, dt: f64) -> Result<PureState> {
    check_step(rates, dt)?;
    let a = s.a_plus() * (1.0 - 0.5 * dt * (rates.gamma1 + rates.gamma3));
    let b = s.a_minus() * (1.0 - 0.5 * dt * (rates.gamma2 + rates.gamma3));
    let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
    if norm < MIN_DRIFT_NORM {
        return Err(Error::Step(format!("drifted norm {norm:.3e} below {MIN_DRIFT_NORM}")));
    }
    Ok(PureState::from_raw(a / norm, b / norm))
}

/// Jump counts of one or more steps, by channel (index `id - 1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StepStats {
    pub forward: [u64; 3],
    pub reversed: [u64; 3],
}

impl StepStats {
    pub fn add(&mut self, other: &StepStats) {
        for i in 0..3 {
            self.forward[i] += other.forward[i];
            self.reversed[i] += other.reversed[i];
        }
    }

    pub fn total(&self) -> u64 {
        self.forward.iter().chain(&self.reversed).sum()
    }
}

#[derive(Debug, Clone, Copy)]
struct Event {
    target: Slot,
    channel: Channel,
    reversed: bool,
    /// Cumulative probability up to and including this event.
    cumulative: f64,
}

/// Candidate jumps for every slot, identical for all members of a slot.
#[derive(Debug, Default)]
struct JumpTable {
    events: [Vec<Event>; 4],
}

impl JumpTable {
    fn build(counts: &SlotCounts, psi0: &PureState, rates: &RateSet, dt: f64) -> Result<Self> {
        if rates.gamma3 < 0.0 {
            return Err(Error::Domain(format!(
                "dephasing rate {} is negative; the unraveling has no reversed dephasing jumps",
                rates.gamma3
            )));
        }
        let up = psi0.a_plus().norm_sqr();
        let down = psi0.a_minus().norm_sqr();
        let (g1, g2, g3) = (rates.gamma1, rates.gamma2, rates.gamma3);
        let mut raw: [Vec<(Slot, Channel, bool, f64)>; 4] = Default::default();

        for slot in [Slot::Psi0, Slot::Psi0Ph] {
            let flipped = if slot == Slot::Psi0 { Slot::Psi0Ph } else { Slot::Psi0 };
            let list = &mut raw[slot.index()];
            if g1 > 0.0 {
                list.push((Slot::Minus, Channel::Lowering, false, g1 * dt * up));
            }
            if g2 > 0.0 {
                list.push((Slot::Plus, Channel::Raising, false, g2 * dt * down));
            }
            if g3 > 0.0 {
                list.push((flipped, Channel::Dephasing, false, g3 * dt));
            }
        }
        if g1 > 0.0 {
            raw[Slot::Plus.index()].push((Slot::Minus, Channel::Lowering, false, g1 * dt));
        }
        if g2 > 0.0 {
            raw[Slot::Minus.index()].push((Slot::Plus, Channel::Raising, false, g2 * dt));
        }

        // Reversed jumps: a member in the target of a negative channel returns
        // to source α' with probability (N_α'/N_target) |γ| dt ⟨C†C⟩_α'.
        let reverse = |target: Slot, channel: Channel, gamma: f64, sources: [(Slot, f64); 3]| {
            let n_target = counts[target];
            let mut out = Vec::new();
            if gamma >= 0.0 || n_target == 0 {
                return out;
            }
            for (source, weight) in sources {
                let n_source = counts[source];
                if n_source > 0 && weight > 0.0 {
                    let p = n_source as f64 / n_target as f64 * gamma.abs() * dt * weight;
                    out.push((source, channel, true, p));
                }
            }
            out
        };
        raw[Slot::Minus.index()].extend(reverse(
            Slot::Minus,
            Channel::Lowering,
            g1,
            [(Slot::Psi0, up), (Slot::Psi0Ph, up), (Slot::Plus, 1.0)],
        ));
        raw[Slot::Plus.index()].extend(reverse(
            Slot::Plus,
            Channel::Raising,
            g2,
            [(Slot::Psi0, down), (Slot::Psi0Ph, down), (Slot::Minus, 1.0)],
        ));

        let mut table = JumpTable::default();
        for slot in Slot::ALL {
            let mut cumulative = 0.0;
            for &(target, channel, reversed, p) in &raw[slot.index()] {
                cumulative += p;
                table.events[slot.index()].push(Event {
                    target,
                    channel,
                    reversed,
                    cumulative,
                });
            }
            if counts[slot] > 0 && cumulative > MAX_JUMP_PROBABILITY {
                return Err(Error::Probability(format!(
                    "members in {slot} jump with total probability {cumulative:.3e} > {MAX_JUMP_PROBABILITY}; reduce dt"
                )));
            }
        }
        Ok(table)
    }

    fn draw(&self, slot: Slot, u: f64) -> Option<&Event> {
        self.events[slot.index()].iter().find(|e| u < e.cumulative)
    }
}

/// Uniform on `[0, 1)` from the top 53 bits.
fn uniform(x: u64) -> f64 {
    (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Advances the ensemble by one step of length `dt` with the rates at the
/// start of the step.
///
/// Member `m` in step `k` draws the `m`-th 64-bit word of ChaCha stream `k`
/// of `rng`'s key, so the outcome depends only on the key, `m` and `k`, and
/// not on how members are split across threads. Counts entering reversed
/// jump probabilities are those at the start of the step.
pub fn step_ensemble(e: &mut EnsembleState, rates: &RateSet, dt: f64, rng: &ChaCha8Rng) -> Result<StepStats> {
    check_step(rates, dt)?;
    let table = JumpTable::build(&e.counts, &e.psi0, rates, dt)?;
    let stream = e.steps_taken;
    let (counts, stats) = e
        .members
        .par_chunks_mut(CHUNK)
        .enumerate()
        .map(|(chunk_index, chunk)| {
            let mut local = rng.clone();
            local.set_stream(stream);
            local.set_word_pos(2 * (chunk_index * CHUNK) as u128);
            let mut counts = SlotCounts::default();
            let mut stats = StepStats::default();
            for member in chunk.iter_mut() {
                let u = uniform(local.next_u64());
                if let Some(event) = table.draw(*member, u) {
                    let id = event.channel.id() as usize - 1;
                    if event.reversed {
                        stats.reversed[id] += 1;
                    } else {
                        stats.forward[id] += 1;
                    }
                    *member = event.target;
                }
                counts[*member] += 1;
            }
            (counts, stats)
        })
        .reduce(
            || (SlotCounts::default(), StepStats::default()),
            |(mut c1, mut s1), (c2, s2)| {
                c1.add(&c2);
                s1.add(&s2);
                (c1, s1)
            },
        );
    debug_assert_eq!(counts.total(), e.counts.total());
    e.psi0 = deterministic_step(&e.psi0, rates, dt)?;
    e.counts = counts;
    e.steps_taken += 1;
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand_chacha::rand_core::SeedableRng;

    fn rates(g1: f64, g2: f64, g3: f64) -> RateSet {
        RateSet {
            gamma1: g1,
            gamma2: g2,
            gamma3: g3,
            ..RateSet::default()
        }
    }

    #[test]
    fn zero_rates_leave_state_unchanged() {
        let s = PureState::from_angles(0.7, 0.3).unwrap();
        let out = deterministic_step(&s, &rates(0.0, 0.0, 0.0), 1e-3).unwrap();
        assert!((out.a_plus() - s.a_plus()).norm() < 1e-15);
        assert!((out.a_minus() - s.a_minus()).norm() < 1e-15);
    }

    #[test]
    fn eigenstate_is_preserved() {
        let out = deterministic_step(&PureState::excited(), &rates(3.0, -1.0, 0.5), 1e-2).unwrap();
        assert_eq!(out, PureState::excited());
    }

    #[test]
    fn drift_commutes_with_phase_flip() {
        let s = PureState::from_angles(1.3, 2.1).unwrap();
        let r = rates(0.7, -0.4, 0.2);
        let a = deterministic_step(&s.phase_flipped(), &r, 1e-2).unwrap();
        let b = deterministic_step(&s, &r, 1e-2).unwrap().phase_flipped();
        assert_eq!(a, b);
    }

    #[test]
    fn lowering_drift_tilts_towards_ground_state() {
        let mut s = PureState::equal_superposition();
        let (g1, dt) = (2.0, 1e-3);
        let mut previous = s.a_minus().norm();
        for k in 1..=1000 {
            s = deterministic_step(&s, &rates(g1, 0.0, 0.0), dt).unwrap();
            let now = s.a_minus().norm();
            assert!(now > previous);
            previous = now;
            // product form of the Euler drift, renormalised
            let a = (1.0 - 0.5 * dt * g1).powi(k);
            let expected = 1.0 / (1.0 + a * a).sqrt();
            assert!((now - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn oversized_steps_are_rejected() {
        let s = PureState::equal_superposition();
        assert!(matches!(
            deterministic_step(&s, &rates(50.0, 0.0, 0.0), 0.01),
            Err(Error::Step(_))
        ));
        let mut e = EnsembleState::new(100, s).unwrap();
        let rng = ChaCha8Rng::seed_from_u64(1);
        assert!(matches!(
            step_ensemble(&mut e, &rates(0.0, 0.0, -1.0), 1e-3, &rng),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn zero_rates_keep_counts() {
        let mut e = EnsembleState::from_counts(SlotCounts([50, 20, 20, 10]), PureState::equal_superposition()).unwrap();
        let rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let stats = step_ensemble(&mut e, &rates(0.0, 0.0, 0.0), 1e-3, &rng).unwrap();
            assert_eq!(stats.total(), 0);
        }
        assert_eq!(e.counts(), SlotCounts([50, 20, 20, 10]));
        assert_eq!(e.steps_taken(), 100);
    }

    #[test]
    fn reversed_jumps_need_sources() {
        // gamma1 < 0 with only MINUS occupied: no source, no reversed jumps
        let psi0 = PureState::new(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)).unwrap();
        let mut e = EnsembleState::from_counts(SlotCounts([0, 0, 0, 100]), psi0).unwrap();
        let rng = ChaCha8Rng::seed_from_u64(3);
        let stats = step_ensemble(&mut e, &rates(-20.0, 0.0, 0.0), 1e-3, &rng).unwrap();
        assert_eq!(stats.total(), 0);
        assert_eq!(e.counts(), SlotCounts([0, 0, 0, 100]));
    }

    #[test]
    fn reversed_probability_bound() {
        // one MINUS member facing 10⁴ sources: (10⁴/1)·|γ₁|·dt·|a|² = 5
        let mut e =
            EnsembleState::from_counts(SlotCounts([10_000, 0, 0, 1]), PureState::equal_superposition()).unwrap();
        let rng = ChaCha8Rng::seed_from_u64(3);
        let r = step_ensemble(&mut e, &rates(-1.0, 0.0, 0.0), 1e-3, &rng);
        assert!(matches!(r, Err(Error::Probability(_))));
    }

    #[test]
    fn jump_frequencies() {
        let mut e = EnsembleState::new(200_000, PureState::equal_superposition()).unwrap();
        let rng = ChaCha8Rng::seed_from_u64(11);
        let (g1, g2, g3, dt) = (20.0, 10.0, 30.0, 1e-3);
        let stats = step_ensemble(&mut e, &rates(g1, g2, g3), dt, &rng).unwrap();
        let n = 200_000.0;
        for (count, p) in stats.forward.iter().zip([g1 * dt * 0.5, g2 * dt * 0.5, g3 * dt]) {
            let sigma = (n * p * (1.0 - p)).sqrt();
            assert!((*count as f64 - n * p).abs() < 4.0 * sigma, "{count} vs {}", n * p);
        }
        let c = e.counts();
        assert_eq!(c.total(), 200_000);
        assert_eq!(c[Slot::Minus], stats.forward[0]);
        assert_eq!(c[Slot::Plus], stats.forward[1]);
        assert_eq!(c[Slot::Psi0Ph], stats.forward[2]);
    }

    #[test]
    fn draws_do_not_depend_on_thread_count() {
        let run = |threads| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| {
                let mut e = EnsembleState::new(20_000, PureState::equal_superposition()).unwrap();
                let rng = ChaCha8Rng::seed_from_u64(99);
                for _ in 0..20 {
                    step_ensemble(&mut e, &rates(5.0, 4.0, 3.0), 1e-3, &rng).unwrap();
                }
                e
            })
        };
        assert_eq!(run(1), run(3));
    }
}
