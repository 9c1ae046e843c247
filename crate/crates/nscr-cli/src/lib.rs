//! Experiment harness for the `nscr` coders: repeated-trial benchmarks,
//! (α, β) sweeps, convergence-curve export, per-query timing, and
//! cross-validated grid search, all driven by plain-text settings and
//! emitting CSV artifacts.

pub mod commands;
pub mod config;
