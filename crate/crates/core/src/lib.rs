//! Threshold-2 secret sharing with cellular automata.
//!
//! The crate is layered bottom-up:
//!
//! - [`gf`]: arithmetic in 𝔽_q and 𝔽_q[X], irreducible polynomials.
//! - [`ca`]: local rules, no-boundary CA evaluation, permutivity.
//! - [`debruijn`]: de Bruijn graphs, preimages, coupled-graph recovery.
//! - [`latin`]: Cayley tables, orthogonality, MOCA families, parallel classes.
//! - [`scheme`]: the basic (2,n) scheme and the anonymous scheme.
//! - [`formats`]: JSON documents for families, shares and candidate families.

pub mod ca;
pub mod debruijn;
pub mod error;
pub mod formats;
pub mod gf;
pub mod latin;
pub mod scheme;

pub use ca::{Configuration, LocalRule, OpCounter};
pub use error::{Error, Result};
pub use gf::{Elem, FieldSpec, Polynomial};
pub use latin::{LatinSquare, MocaFamily};
