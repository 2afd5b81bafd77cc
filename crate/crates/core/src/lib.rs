//! Fourier coefficients of the weight-1/2 theta form on G2 through the
//! arithmetic invariant theory of integral symmetric matrices, with the
//! supporting metaplectic, root-system and Whittaker-function machinery.

pub mod algebra;
pub mod binary_cubics;
pub mod cubic_rings;
pub mod harness;
pub mod error;
pub mod jordan;
pub mod metaplectic;
pub mod qp;
pub mod rootsys;
pub mod table;
pub mod whittaker;
mod serde_util;

pub use error::{Error, Result};
