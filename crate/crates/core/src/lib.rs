//! Core library for testimate: learns how code changes affect test-suite
//! runtime.
//!
//! The pipeline has three stages, each owned by a module group:
//!
//! * source measurement — [`ast`] parses a Java subset into a small
//!   fixed-vocabulary tree, [`stylometry`] turns source text and trees into
//!   numeric feature vectors, [`astbe`] learns node-kind embeddings from
//!   tree traversals;
//! * ground truth — [`harness`] walks a repository's history, builds and
//!   times the test suite per snapshot, and ingests JUnit XML reports;
//! * learning — [`dataset`] joins features with timings into a flat table
//!   and plans stratified cross-validation folds, [`regress`] fits six
//!   regression model families and scores them by mean absolute error.
//!
//! Everything downstream of a seed is deterministic: fold shuffles, model
//! randomness, and embedding training all draw from explicitly seeded
//! generators, so identical inputs reproduce identical artifacts.

pub mod ast;
pub mod astbe;
pub mod dataset;
pub mod harness;
pub mod regress;
pub mod stylometry;
