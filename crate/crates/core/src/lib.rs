//! Discreteness of two-generator subgroups of `PSL_2(K)` for non-archimedean local
//! fields `K = Q_p` or `F_q((t))`.
//!
//! The crate is organised bottom-up: [`localfield`] (exact scalars), [`psl2`] (matrix
//! algebra), [`btree`] (the Bruhat-Tits tree and brute-force oracles), [`groupkit`]
//! (finite closure and identification), [`decide`] (the decision procedure) and
//! [`examples`] (certified generator pairs for every classification case). [`document`]
//! holds the TOML input format and report renderings used by the command-line tool.

pub mod btree;
pub mod decide;
pub mod document;
pub mod error;
pub mod examples;
pub mod exec;
pub mod groupkit;
pub mod localfield;
pub mod psl2;

pub use error::{Error, Result};
