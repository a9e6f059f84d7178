//! Exact-arithmetic toolkit for finite towers of metric measure graphs.
//!
//! A tower is a sequence of graphs `X_0 <- X_1 <- ...` where each projection
//! subdivides edges by a factor `m`, is open and simplicial, has fibers of
//! controlled diameter, and pushes the measure of each level onto the one
//! below it. Everything here is computed over arbitrary-precision rationals
//! so that axiom checks, lift measures and ball/oscillation integrals are
//! exact identities rather than floating-point approximations.
//!
//! The crate is organized around the building blocks:
//!
//! * [`graph`] — one level: a metric measure graph with subdivision,
//!   shortest paths, ball measures.
//! * [`plfunc`] — piecewise linear functions on a level and their exact
//!   integrals.
//! * [`step`] — one projection step, the six admissibility axioms, the
//!   canonical fiber disintegration and the fiber-averaging operator.
//! * [`solve`] — exact rational LP used to decide whether a bare
//!   combinatorial step admits a compatible measure.
//! * [`matrix`] — probability matrices, Birkhoff decomposition and the
//!   rational-marginal reduction.
//! * [`edge_inverse`] — the one-edge building blocks, their quotients,
//!   padding and special covers.
//! * [`builder`] — the inductive construction of whole towers from edge
//!   inverses, plus curated presets.
//! * [`path_measure`] — lifts of edge paths and the probability measure on
//!   them, with exact marginal and pushforward identities and a Markov
//!   sampler.
//! * [`analysis`] — doubling and Poincaré profiles, distance growth,
//!   limit-distance intervals and the degeneracy profile.
//! * [`format`] — the text serialization for systems and edge inverses.
//! * [`report`] — batch diagnostics used by the CLI.

pub mod analysis;
pub mod builder;
pub mod edge_inverse;
pub mod format;
pub mod graph;
pub mod matrix;
pub mod path_measure;
pub mod plfunc;
pub mod rational;
pub mod report;
pub mod solve;
pub mod step;

pub use graph::{EdgeId, GraphPoint, MetricMeasureGraph, Subdivision, VertexId};
pub use plfunc::PlFunction;
pub use rational::Rational;
