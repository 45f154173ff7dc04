//! Classification of qubit channels by the CHSH nonlocality they preserve.
//!
//! A channel acting on one half of a two-qubit state can
//!
//! * leave the maximally entangled state CHSH-violating or not
//!   ([`nlbreak::breaks_mes_nonlocality`]),
//! * let some partially entangled input violate CHSH even when the maximally
//!   entangled one does not ([`nlbreak::max_m_over_pure_inputs`]),
//! * produce outputs that violate CHSH only after local filtering
//!   ([`nlbreak::is_strongly_nlb`]).
//!
//! [`volume`] estimates how much of the channel parameter space each class
//! occupies. The `nlbreak` binary exposes everything on the command line.
//!
//! ```
//! use nlbreak::nlbreak::{amplitude_damping, breaks_mes_nonlocality, is_strongly_nlb};
//!
//! let ch = amplitude_damping(0.7)?;
//! assert!(breaks_mes_nonlocality(&ch)?);
//! assert!(!is_strongly_nlb(&ch)?);
//! # Ok::<(), nlbreak::Error>(())
//! ```

// `!(x <= tol)` is deliberate throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod nlbreak;
mod optimize;
pub mod random;
pub mod state;
pub mod verify;
pub mod volume;

pub use channel::{compose, QubitChannel, TransferMatrix};
pub use error::{Error, Result};
pub use state::{CSpectrum, CorrelationTensors, TwoQubitState};
pub use volume::{Mode, VolumeReport};
