//! Exact tilings of trapezoids by homothetic copies of standard trapezoids.
//!
//! A standard trapezoid `t(a)` has unit height, horizontal bases and 45-degree
//! base angles; its midline `a > 1` determines bases `a - 1` and `a + 1`. A
//! standard parallelogram `p(a)` has unit height, horizontal bases of length
//! `a > 0` and 45-degree lower-left angle. All coordinates and side lengths
//! live in a real quadratic field Q[sqrt(d)], and every constructive and
//! verification step is carried out in exact arithmetic; floating point is
//! used only when rendering pictures.
//!
//! The crate builds tilings as composition trees over a fixed prototile set,
//! realizes them into explicit piece placements, verifies tilings by exact
//! boundary cancellation, converts tilings into weighted circuits whose node
//! potentials recover the geometric heights, and certifies order/logarithm
//! inequalities about midline parameters with directed-rounding interval
//! arithmetic.

pub mod analysis;
pub mod circuit;
pub mod config;
pub mod field;
pub mod figures;
pub mod geometry;
pub mod interval;
pub mod plot;
pub mod synth;

pub use field::{FieldContext, QuadraticNumber, Rational};
