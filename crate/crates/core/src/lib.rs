//! Sharp- and diffuse-interface Ohta–Kawasaki energies on the flat unit torus.
//!
//! The crate evaluates `J(E) = P(E) + γ∫|∇v_E|²` for parametric configurations
//! (lamellae, droplets, graphs over lamellae), assembles its second variation
//! at critical sets and follows a mass-conserving phase-field flow of the
//! diffuse energy for comparison.

// `!(x > 0.0)` is how parameter checks reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diffuse;
pub mod error;
pub mod fft;
pub mod field;
pub mod secvar;
pub mod shape;
pub mod sharp;
pub mod tolerances;

pub use error::{Error, Result};
pub use field::{ScalarField, TorusGrid};
pub use shape::ShapeConfig;
