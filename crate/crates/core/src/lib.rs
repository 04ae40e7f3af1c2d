//! Chain structure, shadowing and Li-Yorke type chaos analysis for finite metric
//! systems and vertex shifts, with exact arithmetic throughout.

pub mod basin;
pub mod chain;
pub mod chaos;
pub mod corpus;
pub mod cyclic;
pub mod error;
pub mod furstenberg;
pub mod graph;
pub mod numeric;
pub mod report;
pub mod shadowing;
pub mod system;

pub use error::{Error, Result};
pub use numeric::{Dyadic, Rational};
pub use system::{Dynamics, FiniteSystem, SftGraph, SftPoint};
