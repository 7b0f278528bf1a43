//! Structural analysis of Boolean generalized polymorphisms.
//!
//! A *generalized polymorphism* is a tuple of Boolean functions
//! `f_0, ..., f_m : {-1,1}^n -> {-1,1}` and `g_0, ..., g_n : {-1,1}^m -> {-1,1}`
//! such that for every `n x m` matrix `z` of `{-1,1}` entries,
//!
//! ```text
//! f_0( g_1(z_{1,.}), ..., g_n(z_{n,.}) ) = g_0( f_1(z_{.,1}), ..., f_m(z_{.,m}) )
//! ```
//!
//! where `z_{i,.}` is row `i` and `z_{.,j}` is column `j` of the matrix.
//! Such tuples admit a complete structural description: after splitting off
//! degenerate parts (constant inner functions and inner functions the outer
//! functions ignore), the interaction grid decomposes into disjoint blocks,
//! each carried by XOR-type or AND/OR-type product forms, combined by an
//! arbitrary outer combiner applied on both sides.
//!
//! This crate provides:
//!
//! * exact representations of Boolean functions ([`boolean_fn`]) and their
//!   multilinear (Fourier) expansions over the rationals ([`fourier`]);
//! * two independent checkers for the defining identity ([`polymorphism`]);
//! * a classifier that brings any generalized polymorphism into a canonical
//!   form, and a reconstructor that maps canonical forms back to function
//!   tuples ([`classifier`]);
//! * a seeded generator of random instances from structural profiles
//!   ([`generator`]);
//! * an exhaustive enumerator with deterministic catalogue output
//!   ([`enumerator`]).

pub mod boolean_fn;
pub mod classifier;
pub mod enumerator;
pub mod error;
pub mod fourier;
pub mod generator;
pub mod polymorphism;

pub use boolean_fn::{BooleanFunction, Sign, MAX_ARITY};
pub use classifier::{
    canonicalize, classify, forms_equivalent, reconstruct, BlockClass, CanonicalBlock,
    CanonicalForm, DegenerateLedger, IndicatorFunction, SubFunction,
};
pub use enumerator::{
    enumerate_exhaustive, enumerate_sampled, enumeration_cost, write_catalogue, CatalogueRecord,
    EnumOptions, EnumOutcome, EnumReport,
};
pub use error::{ClassifyFailure, Error, Result};
pub use fourier::{MultilinearPoly, Rational};
pub use generator::{
    generate, generate_deg2_multilinear, sample_params, Deg2Params, Deg2System, GenParams,
    Profile,
};
pub use polymorphism::{check_auto, check_fourier, check_pointwise, PolymorphismInstance};
