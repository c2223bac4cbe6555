//! File formats, a parallel sweep runner and the command-line front end for
//! `hankel-nuclear-core`.

#![forbid(unsafe_code)]

pub mod cli;
pub mod formats;
pub mod probe;
pub mod runner;
