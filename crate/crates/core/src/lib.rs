//! Quality control for co-folded protein–ligand complexes.
//!
//! The crate parses predicted and reference complexes, measures how far a prediction
//! sits from its reference, screens poses for physical sanity, ingests confidence
//! metrics, applies curation gates to dataset manifests and computes benchmark
//! statistics. Every function is pure; batch orchestration lives in the CLI crate.

pub mod chem;
pub mod confidence;
pub mod geometry;
pub mod plausibility;
pub mod quality;
pub mod rng;
pub mod stats;
pub mod structio;
pub mod triage;
