//! Library surface of the `slitomo` binary: configuration handling and the
//! batch commands, exposed for integration testing and embedding.

pub mod commands;
pub mod config;
