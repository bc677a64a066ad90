//! Operational surface around the solver: instance and plan files, random
//! instance generation, ablation experiments, timing benchmarks and the CLI
//! plumbing behind the `bunkerfleet` binary.

pub mod ablation;
pub mod benchrun;
pub mod experiment;
pub mod format;
pub mod generator;
