//! Procedural grid-transformation reasoning tasks.

pub mod cli;
pub mod env;
pub mod eval;
pub mod generators;
pub mod grid;
pub mod prompt;
pub mod render;
pub mod task;
