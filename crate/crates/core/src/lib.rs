//! Analysis of positive semi-definite metrics on surfaces.
//!
//! The crate classifies the degenerate points of a metric
//! `E du^2 + 2F du dv + G dv^2` (cuspidal-edge type A2 points, swallowtail
//! type A3 points and intrinsic cross caps), computes their intrinsic
//! invariants, and checks Gauss-Bonnet identities by quadrature.
//!
//! Everything is driven by [`jet::Jet2`], a truncated Taylor expansion that
//! supplies exact partial derivatives of user expressions.

pub mod analysis;
pub mod chart;
pub mod config;
pub mod error;
pub mod exec;
pub mod expr;
pub mod gallery;
pub mod integrate;
pub mod jet;
pub mod json;
pub mod kossowski;
pub mod metric;
pub mod numeric;
pub mod selftest;
pub mod whitney;

pub use error::{Error, Result};
