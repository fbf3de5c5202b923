//! Rate regions, bounded-gap audits and scheme simulators for the two-pair
//! two-way relay channel whose relay is only intermittently available.
//!
//! The crate is split along the lines of the model:
//!
//! * [`regions`] builds the uplink/downlink inner and outer rate regions as
//!   half-plane polytopes and audits the gap between them.
//! * [`state`] generates the two Bernoulli activity processes and exposes
//!   delayed and instantaneous views of them.
//! * [`be_sim`] runs the bit-level three-phase downlink scheme on the binary
//!   expansion model, with either idealised or random-linear-coded recycling.
//! * [`gaussian`] holds the signal-level pieces of the Gaussian scheme: the
//!   modulo-lattice dirty-paper channel, successive-refinement budgets and
//!   the uplink lattice-decoding sum rate.

pub mod be_sim;
pub mod error;
pub mod gaussian;
pub mod regions;
pub mod rng;
pub mod state;

pub use error::{Error, Result};
pub use regions::{
    cap, ActivityProb, Bound, ChannelConfig, GapCertificate, GapVector, HalfPlane, Link, RatePair,
    RateRegion, RegionKind, Snr, StateInfo,
};
pub use state::{StateTrace, StateView, ViewMode};
