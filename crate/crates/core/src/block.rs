//! Blocked compression: fixed-length segments, each with its own range.
//!
//! Splitting a vector confines the damage of a rare large value (signal on
//! top of the noise pedestal) to the block that contains it.

use crate::error::{Error, Result};
use crate::ring::{
    basic_word_count, capacity, derive_base, pack_basic, unpack_basic, BaseParams, PackedWord,
};
use crate::split::{advanced_word_count, pack_advanced, unpack_advanced};

/// Header bytes charged per block by [`core_ratio`]: v_min, B - 1, value
/// count and word count, four bytes each.
pub const BLOCK_HEADER_BYTES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u32)]
pub enum CodecId {
    /// Offset values stored one per word (full 32-bit range).
    Raw = 0,
    /// `B = 1`; no payload.
    Constant = 1,
    Basic = 2,
    Advanced = 3,
}

impl TryFrom<u32> for CodecId {
    type Error = Error;

    fn try_from(id: u32) -> Result<Self> {
        Ok(match id {
            0 => CodecId::Raw,
            1 => CodecId::Constant,
            2 => CodecId::Basic,
            3 => CodecId::Advanced,
            other => return Err(Error::corrupt(format!("unknown codec id {other}"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum CodecPolicy {
    ForceBasic,
    ForceAdvanced,
    /// Smaller of basic and advanced per block; ties go to advanced.
    #[default]
    Auto,
}

impl CodecPolicy {
    pub fn to_byte(self) -> u8 {
        match self {
            CodecPolicy::ForceBasic => 0,
            CodecPolicy::ForceAdvanced => 1,
            CodecPolicy::Auto => 2,
        }
    }

    pub fn from_byte(b: u8) -> Result<Self> {
        match b {
            0 => Ok(CodecPolicy::ForceBasic),
            1 => Ok(CodecPolicy::ForceAdvanced),
            2 => Ok(CodecPolicy::Auto),
            other => Err(Error::corrupt(format!("unknown codec policy {other}"))),
        }
    }
}

/// How a vector is segmented and which codec each segment uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BlockPlan {
    /// Values per block; 0 means a single block spanning the vector.
    pub block_len: usize,
    pub policy: CodecPolicy,
}

impl BlockPlan {
    pub fn new(block_len: usize, policy: CodecPolicy) -> Self {
        Self { block_len, policy }
    }

    pub fn whole(policy: CodecPolicy) -> Self {
        Self::new(0, policy)
    }

    /// Block length actually applied to `n` values.
    pub fn effective_len(&self, n: usize) -> usize {
        if self.block_len == 0 {
            n.max(1)
        } else {
            self.block_len
        }
    }

    pub fn block_count(&self, n: usize) -> usize {
        n.div_ceil(self.effective_len(n))
    }
}

/// One independently decodable block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompressedBlock {
    pub codec: CodecId,
    pub v_min: u32,
    /// `B - 1`, so that `B = 2^32` fits.
    pub b_minus_1: u32,
    pub n_values: usize,
    pub words: Vec<PackedWord>,
}

impl CompressedBlock {
    pub fn params(&self) -> Result<BaseParams> {
        BaseParams::from_min_and_span(self.v_min, self.b_minus_1)
    }

    pub fn base(&self) -> u64 {
        self.b_minus_1 as u64 + 1
    }

    /// Bytes charged by the core-ratio accounting.
    pub fn accounted_bytes(&self) -> usize {
        BLOCK_HEADER_BYTES + 4 * self.words.len()
    }
}

/// Payload words a block of `n` values with base `base` needs under `codec`.
pub fn expected_words(codec: CodecId, base: u64, n: usize) -> Result<usize> {
    match codec {
        CodecId::Constant => Ok(0),
        CodecId::Raw => Ok(n),
        CodecId::Basic => basic_word_count(base, n),
        CodecId::Advanced => advanced_word_count(base, n),
    }
}

fn choose_codec(base: u64, n: usize, policy: CodecPolicy) -> Result<CodecId> {
    if base == 1 {
        return Ok(CodecId::Constant);
    }
    if capacity(base, 1)? == 0 {
        return Ok(CodecId::Raw);
    }
    Ok(match policy {
        CodecPolicy::ForceBasic => CodecId::Basic,
        CodecPolicy::ForceAdvanced => CodecId::Advanced,
        CodecPolicy::Auto => {
            if basic_word_count(base, n)? < advanced_word_count(base, n)? {
                CodecId::Basic
            } else {
                CodecId::Advanced
            }
        }
    })
}

/// Compresses one block with its own range.
pub fn compress_block(values: &[u32], policy: CodecPolicy) -> Result<CompressedBlock> {
    let params = derive_base(values)?;
    let base = params.base();
    let codec = choose_codec(base, values.len(), policy)?;
    let words = match codec {
        CodecId::Constant => Vec::new(),
        CodecId::Raw => values.iter().map(|&v| v - params.v_min()).collect(),
        CodecId::Basic => pack_basic(values, &params)?,
        CodecId::Advanced => pack_advanced(values, &params)?,
    };
    Ok(CompressedBlock {
        codec,
        v_min: params.v_min(),
        b_minus_1: (base - 1) as u32,
        n_values: values.len(),
        words,
    })
}

/// Appends the values of one block to `out`.
pub fn decompress_block_into(block: &CompressedBlock, out: &mut Vec<u32>) -> Result<()> {
    let params = block.params()?;
    let n = block.n_values;
    match block.codec {
        CodecId::Constant => {
            if block.b_minus_1 != 0 || !block.words.is_empty() {
                return Err(Error::corrupt(
                    "constant block with payload or nonzero span",
                ));
            }
            out.extend(std::iter::repeat_n(block.v_min, n));
        }
        CodecId::Raw => {
            if block.words.len() != n {
                return Err(Error::corrupt(format!(
                    "raw block of {n} values has {} words",
                    block.words.len()
                )));
            }
            for &w in &block.words {
                if w > block.b_minus_1 {
                    return Err(Error::corrupt(format!("raw offset {w} exceeds span")));
                }
                out.push(w + block.v_min);
            }
        }
        CodecId::Basic => out.extend(unpack_basic(&block.words, &params, n)?),
        CodecId::Advanced => out.extend(unpack_advanced(&block.words, &params, n)?),
    }
    Ok(())
}

/// Splits `values` into blocks of `plan.block_len` and compresses each.
pub fn compress_blocked(values: &[u32], plan: &BlockPlan) -> Result<Vec<CompressedBlock>> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    values
        .chunks(plan.effective_len(values.len()))
        .map(|chunk| compress_block(chunk, plan.policy))
        .collect()
}

pub fn decompress_blocked(blocks: &[CompressedBlock]) -> Result<Vec<u32>> {
    let total = blocks.iter().map(|b| b.n_values).sum();
    let mut out = Vec::with_capacity(total);
    for block in blocks {
        decompress_block_into(block, &mut out)?;
    }
    Ok(out)
}

/// Uncompressed bytes over per-block header plus payload bytes.
pub fn core_ratio(blocks: &[CompressedBlock], n: usize, width_bits: u32) -> f64 {
    let raw = n as f64 * width_bits as f64 / 8.0;
    let packed: usize = blocks.iter().map(CompressedBlock::accounted_bytes).sum();
    raw / packed as f64
}
