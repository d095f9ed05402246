//! Contextual probability on finite Kolmogorov spaces and its projections to
//! complex and hyperbolic Hilbert-space representations.

pub mod canonical;
pub mod complex;
pub mod error;
pub mod hyperbolic;
pub mod hypernum;
pub mod interference;
pub mod linalg;
pub mod model;
pub mod multivalued;
pub mod prob;
pub mod report;
pub mod tol;
pub mod verify;

pub use error::{Error, Result};
