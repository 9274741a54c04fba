//! adakit: exact computational toolkit for finite-dimensional bound quiver
//! algebras.
//!
//! The crate decides whether a given algebra kQ/I is an ada algebra (every
//! indecomposable projective and injective lies in the union of the left and
//! right parts of the module category), and verifies the structural and
//! cohomological consequences on concrete inputs: supports, knitted
//! Auslander-Reiten windows with right sections, maximal filtrations,
//! Hochschild cohomology and simple connectedness.
//!
//! All linear algebra is exact (rationals or a prime field). Verdicts that
//! depend on the infinite part of a module category are three-valued with
//! machine-checkable witnesses, never guessed.

pub mod algebra;
pub mod analysis;
pub mod arknit;
pub mod matrix;
pub mod par;
pub mod parts;
pub mod hochschild;
pub mod homology;
pub mod quiver;
pub mod report;
pub mod rep;
pub mod scalar;

pub use algebra::{build_algebra, full_subcategory, quotient_by_ideal, BoundAlgebra};
pub use quiver::{parse_spec, Quiver, Relation};
pub use scalar::{FieldSpec, Scalar};
