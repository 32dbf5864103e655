//! Two-party protocols for functions of reconciled sets.
//!
//! Alice holds `S_A`, Bob holds `S_B`, both subsets of the n-bit integers, and
//! they want `phi(S_A ∪ S_B)` for a sum, product, max or similar function. The
//! crate provides a bit-accurate protocol simulator, GF(2) linear hashes, the
//! fooling-set lower-bound constructions, closed-form cost models and a
//! benchmark sweep.

pub mod analysis;
pub mod bits;
pub mod engine;
pub mod error;
pub mod gf2;
pub mod model;
pub mod protocols;
pub mod rectangles;
pub mod seed;
pub mod sweep;
pub mod transcript;

pub use bits::BitString;
pub use engine::{execute, Party, RunOptions, Status};
pub use error::{Error, Result};
pub use gf2::{HashSequence, LinearHash};
pub use model::{make_instance, oracle_value, random_instance, FunctionKind, Instance, Role, Value};
pub use protocols::{run_protocol, Outcome, Protocol, ProtocolParams};
pub use transcript::{Direction, Message, MessageKind, Transcript};
