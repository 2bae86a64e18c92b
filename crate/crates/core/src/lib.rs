//! Exact linear algebra over the l-adic integers at finite precision.
//!
//! The crate computes with finite modules over the truncated rings
//! `Z/l^n Z`, certifies perfectness of bilinear pairings on them, and runs
//! projective towers of such pairings to a stabilized limit, producing
//! replayable unimodularity certificates for the induced pairing on the
//! free parts. Fixture generators (synthetic block towers and simplicial
//! cohomology of closed oriented surfaces with the cup product) provide
//! instances with known ground truth, and a CLI exposes the whole pipeline
//! on JSON files.

pub mod cli;
pub mod fixtures;
pub mod jsonio;
pub mod matrix;
pub mod module;
pub mod oracle;
pub mod pairing;
pub mod ring;
pub mod snf;
pub mod tower;
