//! Polynomial (mixed-radix) lossless compression for integer sensor data
//! dominated by white noise.
//!
//! Values of a block are offset by the block minimum and packed as digits of
//! base `B = max - min + 1` into 32-bit words. Two codecs are provided: the
//! [basic](ring::pack_basic) one packs a whole number of digits per word, the
//! [advanced](split::pack_advanced) one splits a value across word boundaries
//! so that no headroom is wasted. [`block`] applies either per fixed-length
//! block, [`container`] defines the file format, [`synth`] generates test
//! data and [`bench`] holds the ratio and timing experiments.

pub mod bench;
pub mod block;
pub mod container;
pub mod error;
pub mod ring;
pub mod split;
pub mod synth;

pub use block::{
    compress_blocked, core_ratio, decompress_blocked, BlockPlan, CodecId, CodecPolicy,
    CompressedBlock,
};
pub use container::{
    decode_container, encode_container, post_stage, ContainerHeader, ContainerReader, Decoded,
    Layout, Matrix, Payload,
};
pub use error::{Error, Result};
pub use ring::{
    capacity, derive_base, pack_basic, unpack_basic, BaseParams, PackedWord, SourceVector, Width,
};
pub use split::{
    advanced_word_count, pack_advanced, split_schedule, unpack_advanced, SplitSchedule, SplitStep,
};
pub use synth::{generate, sample_stats, DistributionSpec, Seed};
