//! Exact computer algebra for modular forms, quasimodular forms,
//! vector-valued modular forms with respect to symmetric tensor
//! representations, and weak Jacobi forms on SL(2,Z).
//!
//! The crate provides:
//!
//! - truncated q-expansions with exact rational coefficients carrying powers
//!   of a formal constant `Pi` (standing for 2πi), so that d/dz identities
//!   stay exact ([`qseries`]);
//! - the graded ring C[E2, E4, E6] of quasimodular forms with the Ramanujan
//!   derivations ([`quasi`]);
//! - symmetric tensor representations, the standard vectors, frame
//!   coordinates ([`symtensor`]);
//! - Rankin-Cohen brackets, including the negative-weight extension
//!   ([`brackets`]);
//! - the correspondence maps between vector-valued forms, sequences of
//!   modular forms, and quasimodular polynomials ([`maps`]);
//! - Cohen-Kuznetsov liftings and Jacobi-like series, the second,
//!   independent route to the same maps ([`jlift`]);
//! - weak Jacobi forms: two-variable expansions, the index-one generators
//!   built from theta and eta products, and the correspondence with
//!   vector-valued forms ([`jacobi`]).
//!
//! All values are immutable after construction and safe to share across
//! threads; generator expansions are memoized behind an `RwLock`.

// row/column index loops mirror the matrix formulas they implement
#![allow(clippy::needless_range_loop)]

pub mod brackets;
pub mod error;
pub mod group;
pub mod jacobi;
pub mod jlift;
pub mod json;
pub mod linalg;
pub mod maps;
pub mod pi;
pub mod qseries;
pub mod quasi;
pub mod symtensor;
pub mod zpoly;

pub use error::{Error, Result};
pub use group::GroupElt;
pub use pi::{PiPoly, PiRational, Rat};
pub use qseries::QSeries;
pub use quasi::QuasiElement;
pub use symtensor::VVForm;
pub use zpoly::ZPoly;
