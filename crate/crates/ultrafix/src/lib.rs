//! Fixed points of strictly contracting self-maps of ultrametric spaces.
//!
//! Distances here take values not in the reals but in an arbitrary
//! partially ordered set with a least element: two distances may be
//! incomparable, and "smaller" is a claim that must be witnessed, not a
//! subtraction. On such spaces a strictly contracting map still pins down
//! a unique fixed point, and the approximation that finds it is a chain of
//! shrinking principal balls rather than a Cauchy estimate.
//!
//! The crate is layered:
//!
//! - [`radius`] — distance value sets: exponent scales, finite partial
//!   orders, lexicographic pairs, and the order axioms they must satisfy.
//! - [`space`] — the [`space::Ultrametric`] trait, principal balls, and
//!   exhaustive axiom checks over sampled points.
//! - [`driver`] — the staged iteration engine: budgeted stages, limit
//!   oracles, the reached/approximated/inconclusive trichotomy, and full
//!   trace re-validation.
//! - [`analysis`] — diagnostics on iterate families: pseudo-convergence,
//!   pseudo-limits, Cauchy families, coinitiality, solidness, and
//!   extension by continuity through dense approximants.
//! - [`instances`] — concrete spaces: finite distance tables, p-adic
//!   residues, truncated rational power series, and two-indeterminate
//!   series under a lexicographic distance.
//! - [`apps`] — Hensel lifting of polynomial roots and Picard iteration
//!   for initial-value problems, both as strict contractions.
//! - [`cli`] — the `ultrafix` binary: verification of description files,
//!   solvers that emit re-checkable trace documents, and an exhaustive
//!   sweep of the small finite models.
//!
//! Everything is exact: distances are order elements, coefficients are
//! arbitrary-precision rationals, and every certificate the crate emits
//! can be re-derived from scratch.

pub mod analysis;
pub mod apps;
pub mod cli;
pub mod driver;
pub mod instances;
pub mod radius;
pub mod report;
pub mod space;

pub use driver::{run, run_with_oracle, DriverConfig, Outcome};
pub use radius::{Cmp, RadiusOrder};
pub use report::Report;
pub use space::Ultrametric;
