//! Teleportation between adjacent cores.
//!
//! One hop runs entanglement generation over the BSM node between the two cores
//! (retried until a heralded success), then the Bell measurement at the source,
//! the two-bit classical transfer to the neighboring router, and the correction at
//! the destination. Its latency is
//! `attempts * t_epr + t_meas + t_classical + t_correct`.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};

use crate::error::{Error, Result};
use crate::time::Time;
use crate::topology::{BsmLinkId, CoreId, MeshTopology};

/// Per-step durations of the teleportation primitive, in abstract time units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingConfig<T> {
    /// One entanglement attempt: photon emission through BSM outcome.
    pub t_epr: T,
    /// Source-side Bell measurement.
    pub t_meas: T,
    /// Neighbor-to-neighbor transfer of the two correction bits.
    pub t_classical: T,
    /// Destination-side correction.
    pub t_correct: T,
    /// Two-qubit (and one-qubit) gate execution.
    pub t_gate: T,
    /// Per-attempt BSM success probability.
    pub p_bsm: f64,
    /// Upper bound on attempts per hop; `None` retries forever.
    pub max_attempts: Option<u32>,
}

impl<T: Time> Default for TimingConfig<T> {
    fn default() -> Self {
        let n = |v: u64| T::from_count(v);
        Self {
            t_epr: n(10),
            t_meas: n(2),
            t_classical: n(1),
            t_correct: n(1),
            t_gate: n(2),
            p_bsm: 1.0,
            max_attempts: None,
        }
    }
}

impl<T: Time> TimingConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.p_bsm > 0.0 && self.p_bsm <= 1.0) {
            return Err(Error::Config(format!(
                "p_bsm must be in (0, 1], got {}",
                self.p_bsm
            )));
        }
        for (name, v) in [
            ("t_epr", self.t_epr),
            ("t_meas", self.t_meas),
            ("t_classical", self.t_classical),
            ("t_correct", self.t_correct),
            ("t_gate", self.t_gate),
        ] {
            // NaN compares as None and is rejected too.
            if v.partial_cmp(&T::zero()).is_none_or(|o| o.is_lt()) {
                return Err(Error::Config(format!(
                    "{name} must be non-negative, got {v}"
                )));
            }
        }
        if self.max_attempts == Some(0) {
            return Err(Error::Config("max_attempts must be at least 1".into()));
        }
        Ok(())
    }

    /// Time spent generating entanglement over `attempts` tries.
    pub fn epr_phase(&self, attempts: u32) -> T {
        T::from_count(attempts as u64) * self.t_epr
    }

    /// Measurement, classical transfer and correction.
    pub fn tail_phase(&self) -> T {
        self.t_meas + self.t_classical + self.t_correct
    }

    pub fn hop_duration(&self, attempts: u32) -> T {
        self.epr_phase(attempts) + self.tail_phase()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TeleportOutcome<T> {
    pub link: BsmLinkId,
    pub attempts: u32,
    pub start: T,
    pub finish: T,
}

/// Number of Bernoulli(`p_bsm`) trials up to and including the first success.
pub fn entanglement_attempts<R: Rng + ?Sized>(p_bsm: f64, rng: &mut R) -> u32 {
    if p_bsm >= 1.0 {
        return 1;
    }
    let failures = Geometric::new(p_bsm)
        .expect("p_bsm validated to (0, 1]")
        .sample(rng);
    u32::try_from(failures.saturating_add(1)).unwrap_or(u32::MAX)
}

/// Draws attempts and enforces the optional cap.
pub fn draw_attempts<T: Time, R: Rng + ?Sized>(
    cfg: &TimingConfig<T>,
    rng: &mut R,
) -> std::result::Result<u32, u32> {
    let attempts = entanglement_attempts(cfg.p_bsm, rng);
    match cfg.max_attempts {
        Some(cap) if attempts > cap => Err(cap),
        _ => Ok(attempts),
    }
}

/// Teleports one data qubit from `src` to the adjacent core `dst`, starting at `start`.
pub fn teleport_hop<T: Time, R: Rng + ?Sized>(
    topology: &MeshTopology,
    src: CoreId,
    dst: CoreId,
    start: T,
    cfg: &TimingConfig<T>,
    rng: &mut R,
) -> Result<TeleportOutcome<T>> {
    let link = topology.bsm_link_between(src, dst)?;
    let attempts = draw_attempts(cfg, rng).map_err(|cap| Error::AttemptsExhausted {
        link: link.to_string(),
        cap,
        gate: None,
    })?;
    Ok(TeleportOutcome {
        link,
        attempts,
        start,
        finish: start + cfg.hop_duration(attempts),
    })
}

/// Random stream dedicated to one request, so sampled attempt counts do not depend
/// on the order in which the engine happens to process events.
pub fn request_stream(master_seed: u64, request: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(request);
    rng
}
