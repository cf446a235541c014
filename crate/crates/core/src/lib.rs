//! Numerical laboratory for two-dimensional pressureless gas.
//!
//! - [`series`]: truncated power series, the common currency for analytic data.
//! - [`smooth_flow`]: the classical solution by characteristics and the first blow-up time.
//! - [`singularity`]: classification of blow-up points.
//! - [`curve`]: mass-carrying singular curves, evolved by power series or by a filtered
//!   method of lines.
//! - [`interaction`]: contact of two curves and the merged curve's initial data.
//! - [`particles`]: an event-driven sticky particle simulator used as an independent oracle.
//! - [`scenario`]: configuration, built-in scenarios and reproducible outputs.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod curve;
pub mod interaction;
pub mod particles;
pub mod scenario;
pub mod series;
pub mod singularity;
pub mod smooth_flow;

pub use series::{AnalyticField, BiSeries, Mat2, Series, SeriesError, TriSeries, UniSeries, Vec2};
