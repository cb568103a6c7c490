mod bigser;
pub mod autgrp;
pub mod bounds;
pub mod caps;
pub mod census;
pub mod error;
pub mod graph;
pub mod group;
pub mod lemmas;
pub mod perm;
pub mod real;
pub mod stability;

pub use caps::Caps;
pub use error::{Error, Result};
pub use real::{HpReal, Real};

/// Bound profiles at the default 256-bit precision.
pub type HpBoundProfile = bounds::BoundProfile<HpReal>;
pub type F64BoundProfile = bounds::BoundProfile<f64>;
