//! Command-line front end for the `finch` fuzzing engine: campaign
//! execution (`run`), output summaries (`report`), and the built-in target
//! list (`targets`). All logic lives here so integration tests can drive it
//! without spawning processes; `main.rs` only parses arguments.

pub mod campaign;
pub mod config;
pub mod report;
