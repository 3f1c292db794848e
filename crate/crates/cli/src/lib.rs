//! Command-line stages and the annotation service.

pub mod commands;
pub mod error;
pub mod server;
