//! Exact evolution of Post's 00/1101 tag system.

mod bits;
mod fast;
mod id;
mod pair;
mod rule;
mod state;

pub use bits::BitDeque;
pub use fast::{evolve_fast, evolve_fast_tracked, Evolution};
pub use id::{format_state_id, parse_state_id, StateId};
pub use pair::{integer_pair_step, IntegerPairState};
pub use rule::{Symbol, TagRule};
pub use state::{compress, step_compressed, step_uncompressed, uncompress, CompressedState, Phase, UncompressedState};

pub(crate) use state::{read_varint, write_varint};
