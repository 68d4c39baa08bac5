//! Amplify-and-forward dual-hop composition.
//!
//! The relay rescales everything it hears (signal plus its own input noise)
//! to a fixed output power and retransmits it in a second time slot.
//! Substituting that normalisation into the receiver equation gives the
//! classic cascade `λ1·λ2 / (λ1 + λ2 + 1)` for the end-to-end SINR.

use serde::{Deserialize, Serialize};

use crate::channel::LinkBudget;
use crate::error::{Error, Result};
use crate::geometry::Position3D;
use crate::scalar::{db_to_lin, Real};

/// Time slots used by a relayed transmission.
pub const RELAYED_SLOTS: u32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "T: Real + Deserialize<'de>"))]
pub struct RelayConfig<T> {
    pub position: Position3D<T>,
    /// Relay output power relative to the base-station transmit power.
    #[serde(default = "default_gain_db")]
    pub gain_db: T,
    /// Whether the relay input carries its own thermal noise, which is then
    /// amplified along with the signal.
    #[serde(default = "default_true")]
    pub noise_at_relay: bool,
    /// Whether ground interferers also reach the relay input.
    #[serde(default)]
    pub interference_at_relay: bool,
}

fn default_gain_db<T: Real>() -> T {
    T::lit(-3.0)
}

fn default_true() -> bool {
    true
}

impl<T: Real> RelayConfig<T> {
    pub fn new(position: Position3D<T>) -> Self {
        Self { position, gain_db: default_gain_db(), noise_at_relay: true, interference_at_relay: false }
    }

    /// `P_N` for a given base-station power.
    pub fn relay_power_w(&self, bs_power_w: T) -> T {
        bs_power_w * db_to_lin(self.gain_db)
    }

    pub fn validate(&self) -> Result<()> {
        self.position.validate()?;
        if !self.gain_db.is_finite() {
            return Err(Error::invalid("relay gain_db must be finite"));
        }
        if self.position.is_ground() {
            return Err(Error::invalid("relay must be airborne (z > 0)"));
        }
        Ok(())
    }
}

/// Amplitude gain `√(P_N / (S + N))` that makes the relay output power
/// exactly `P_N`.
pub fn af_normalization_gain<T: Real>(hop1_rx_power: T, hop1_noise: T, p_n: T) -> Result<T> {
    let input = hop1_rx_power + hop1_noise;
    if input <= T::zero() {
        return Err(Error::DeadInput);
    }
    Ok((p_n / input).sqrt())
}

/// `λ1·λ2 / (λ1 + λ2 + 1)`, continuous at infinite hop ratios.
pub fn af_cascade<T: Real>(l1: T, l2: T) -> T {
    match (l1.is_infinite(), l2.is_infinite()) {
        (true, true) => T::infinity(),
        (true, false) => l2,
        (false, true) => l1,
        (false, false) => l1 * l2 / (l1 + l2 + T::one()),
    }
}

/// Ratio the relay forwards: its input SINR, or only its input SIR when
/// the relay front end is noiseless.
pub fn first_hop_ratio<T: Real>(hop1: &LinkBudget<T>, cfg: &RelayConfig<T>) -> T {
    if cfg.noise_at_relay {
        hop1.sinr
    } else {
        hop1.sir
    }
}

/// End-to-end SINR of the relayed path.
///
/// The second hop is re-rated against `interference_at_rx` plus its own
/// noise. A noiseless relay with no interference at its input forwards a
/// clean copy, so the second hop alone decides.
pub fn dualhop_sinr<T: Real>(
    hop1: &LinkBudget<T>,
    hop2: &LinkBudget<T>,
    interference_at_rx: T,
    cfg: &RelayConfig<T>,
) -> T {
    let impairment = interference_at_rx + hop2.noise_w;
    let l2 = if impairment > T::zero() { hop2.signal_w / impairment } else { T::infinity() };
    af_cascade(first_hop_ratio(hop1, cfg), l2)
}

/// SINR of the direct base-station link.
pub fn direct_sinr<T: Real>(budget: &LinkBudget<T>, interference: T, noise: T) -> T {
    let den = interference + noise;
    if den > T::zero() {
        budget.signal_w / den
    } else {
        T::infinity()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndToEndBudget<T> {
    pub hop1: LinkBudget<T>,
    pub hop2: LinkBudget<T>,
    pub sinr_e2e: T,
    pub slots: u32,
}

impl<T: Real> EndToEndBudget<T> {
    pub fn relayed(hop1: LinkBudget<T>, hop2: LinkBudget<T>, interference_at_rx: T, cfg: &RelayConfig<T>) -> Self {
        let sinr_e2e = dualhop_sinr(&hop1, &hop2, interference_at_rx, cfg);
        Self { hop1, hop2, sinr_e2e, slots: RELAYED_SLOTS }
    }
}
