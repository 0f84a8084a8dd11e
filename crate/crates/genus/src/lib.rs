//! Genus symbols of integral quadratic forms.
//!
//! This crate computes the Conway–Sloane style symbol of an integral
//! quadratic form (its real signature together with the p-adic Jordan
//! data at every relevant prime), validates symbols, builds local forms
//! that realize a symbol modulo prime powers, and — the main feature —
//! constructs an explicit integral quadratic form belonging to any valid
//! symbol in time polynomial in the dimension and the bit size of the
//! determinant.
//!
//! Entry points:
//! - [`symbol::genus_symbol`] computes the symbol of a form,
//! - [`symbol::validate_symbol`] checks the determinant, oddity and Jordan
//!   conditions,
//! - [`localform::local_form_q`] realizes a symbol modulo q,
//! - [`findt::find_t`] finds an integer primitively represented by a genus,
//! - [`generate::generate_form`] produces a member of the genus,
//! - [`generate::verify_membership`] checks a candidate against a symbol.
//!
//! The `examples/` directory has one runnable example per capability; the
//! thin `qfgenus` binary exposes the same operations as subcommands.

pub mod error;
pub mod forms;
pub mod jordan;
pub mod symbol;
pub mod zmod;

pub mod localform;
pub mod represent;

pub mod findt;
pub mod generate;
pub mod oracle;

pub mod cli;

pub use error::{Error, Result};
