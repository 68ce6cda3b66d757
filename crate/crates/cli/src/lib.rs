//! Command-line and HTTP front ends for kokonet.

pub mod angle;
pub mod commands;
pub mod serve;
