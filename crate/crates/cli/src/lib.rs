//! Command line front end for the `tmodule` library: manifests, commands,
//! reports and the built-in verification corpus.

pub mod commands;
pub mod corpus;
pub mod expr;
pub mod manifest;
pub mod report;
