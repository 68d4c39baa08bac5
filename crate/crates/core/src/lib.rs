//! Latency analysis for ground-to-UAV links over interference-plus-noise
//! channels.
//!
//! The numerical core ([`geometry`], [`specfun`], [`channel`], [`relaylink`],
//! [`infotheory`]) is generic over the floating-point type through [`Real`].
//! The scenario [`engine`] and the `g2u` command-line tool run on `f64`; the
//! aliases below name the concrete instantiations it uses.

// `!(x > 0.0)` is used deliberately so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod engine;
pub mod error;
pub mod geometry;
pub mod infotheory;
pub mod relaylink;
pub mod scalar;
pub mod seeding;
pub mod specfun;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Position = geometry::Position3D<f64>;
pub type Rician = channel::RicianParams<f64>;
pub type Channel = channel::ChannelParams<f64>;
pub type Budget = channel::LinkBudget<f64>;
pub type Reliability = infotheory::ReliabilitySpec<f64>;
pub type Delay = infotheory::DelayBound<f64>;
pub type CapacitySpec = infotheory::CapacityBoundSpec<f64>;
pub type Relay = relaylink::RelayConfig<f64>;
pub type MeijerG = specfun::MeijerGSpec<f64>;
