//! Iterative differential modules (stratified bundles) over F_p(z).
//!
//! The crate is organised bottom-up: [`ffalg`] supplies exact arithmetic
//! over F_p, [`padic`] rational p-adic integers and digit data, [`stratmod`]
//! modules presented by divided-derivation matrices, [`hypergeom`] the
//! reduction of the Gauss hypergeometric system modulo p, and [`projsys`]
//! rank-one projective systems and diagonal group descriptions.

pub mod error;
pub mod ffalg;
pub mod hypergeom;
pub mod matrix;
pub mod padic;
pub mod projsys;
pub mod stratmod;

pub use error::{Error, Result};
