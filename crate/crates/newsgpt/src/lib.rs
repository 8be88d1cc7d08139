//! IO side of the robot-reporter backend: files, HTTP clients, the WebSocket
//! server and the command-line tools built on `newsgpt-core`.

pub mod asr;
pub mod clients;
pub mod clock;
pub mod config;
pub mod dataset;
pub mod llm;
pub mod params_io;
pub mod report;
pub mod server;
pub mod session_log;

pub use newsgpt_core as core;
