//! Exact semantics for asynchronous systems over Boolean signals.

pub mod bits;
pub mod boolfn;
pub mod error;
pub mod generator;
pub mod mode;
pub mod properties;
pub mod rat;
pub mod sample;
pub mod signal;
pub mod system;
pub mod text;

pub use bits::BitVec;
pub use boolfn::{BoolFn, Transform};
pub use error::{Error, Result};
pub use rat::{int, rat, Rat};
pub use signal::{Event, Signal, Tail};
pub use system::{Limits, System, Verdict};
