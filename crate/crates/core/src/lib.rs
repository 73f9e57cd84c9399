//! Exact ranks of free graded Lie algebras and explicit lower bounds on
//! torsion in the homotopy groups of suspensions and Moore spaces.

pub mod bounds;
pub mod charpoly;
pub mod combinat;
pub mod dgl_fp;
pub mod error;
pub mod lie_rank;
pub mod real;
pub mod spaces;
pub mod verify;

pub use error::{Error, Result};
