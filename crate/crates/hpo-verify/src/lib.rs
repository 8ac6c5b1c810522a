//! Verification harness for the quadratic history algebra: configuration,
//! named suites, report formats, and export helpers used by the `hpo`
//! binary and by the acceptance tests.

pub mod config;
pub mod export;
pub mod report;
pub mod suites;
