//! Exact computations with the Nappi-Witten Lie algebra `h4`, its affinisation
//! and their weight modules.

pub mod affinepbw;
pub mod affmodules;
pub mod characters;
pub mod error;
pub mod exactalg;
pub mod h4finite;
pub mod linalg;
pub mod partitions;
pub mod shapovalov;
pub mod singular;
pub mod verify;

pub use error::{Error, Result};
