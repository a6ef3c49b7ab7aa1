//! Simulation and analysis of Post's 00/1101 tag system and related
//! rewriting systems.

pub mod cycles;
pub mod enumeration;
mod error;
pub mod grams;
pub mod graphs;
pub mod halting;
pub mod numiter;
pub mod tagcore;
pub mod walkstats;
pub mod zoo;

pub use error::{Error, Result};
pub use halting::{detect_halt, HaltReport, Verdict};
pub use tagcore::{
    compress, evolve_fast, format_state_id, parse_state_id, step_compressed, step_uncompressed, uncompress,
    CompressedState, Phase, StateId, TagRule, UncompressedState,
};
