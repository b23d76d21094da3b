//! Quasifields whose right multiplication group is an exceptional finite
//! transitive linear group: group construction, sharply transitive set
//! enumeration, parastrophy classification, plane invariants, and
//! non-existence certificates.

pub mod catalog;
pub mod error;
pub mod fpmat;
pub mod lingroup;
pub mod stset;
pub mod classify;
pub mod obstruct;

pub use error::{Error, Result};
