//! Core of the robot-reporter backend.
//!
//! Everything here is pure computation over owned buffers: no IO, no threads,
//! no clocks. Time is injected through [`agent::Clock`], remote services through
//! the provider and client traits, so the crate builds for `no_std` targets
//! with only an allocator.
//!
//! - [`classifier`]: ASCII title encoder, embed/conv/dense network, BCE, Adam,
//!   stratified split, metrics and the training loop.
//! - [`speechgate`]: RMS speech detector state machine and the ASR boundary.
//! - [`agent`]: ReAct prompt construction, output parsing and the bounded loop.
//! - [`tools`]: news, search and fact-check tools and their observation format.
//! - [`gateway`]: wire messages, per-session state machine and session table.
//! - [`evalkit`]: response-speed classes, Q/A records, ratings and reports.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod agent;
pub mod classifier;
pub mod evalkit;
pub mod gateway;
pub mod speechgate;
pub mod tools;
