//! Grid diagram homology and transverse braid invariants over GF(2).

pub mod braid;
pub mod config;
pub mod error;
pub mod fl_complex;
pub mod gf2;
pub mod grid;
pub mod pentagon;
pub mod perm;
pub mod report;
pub mod transverse;

pub use braid::BraidWord;
pub use config::{Limits, RunConfig};
pub use error::{Error, Result};
pub use grid::{GridDiagram, GridState};
