//! On-disk container for compressed vectors and matrices.
//!
//! All integers are little-endian. Layout:
//!
//! ```text
//! offset size field
//!      0    4 magic "PLYC"
//!      4    1 version (1)
//!      5    1 layout (0 = vector, 1 = matrix)
//!      6    1 element width in bits (8, 16, 32)
//!      7    1 codec policy (0 = basic, 1 = advanced, 2 = auto)
//!      8    8 n_elements
//!     16    4 block_len (0 = whole vector)
//!     20    4 n_blocks
//!     24    4 n_rows   (matrix only)
//!     28    4 n_cols   (matrix only)
//! ```
//!
//! followed by `n_blocks` records of `codec_id, v_min, b_minus_1, n_words`
//! (4 bytes each) and `n_words` payload words. A block's value count follows
//! from `block_len`, its index and `n_elements`.

use std::io::Write;
use std::ops::Range;
use std::process::{Command, Stdio};
use std::thread;

use crate::block::{
    compress_blocked, core_ratio, decompress_block_into, expected_words, BlockPlan, CodecId,
    CodecPolicy, CompressedBlock, BLOCK_HEADER_BYTES,
};
use crate::error::{Error, Result};
use crate::ring::{SourceVector, Width};

pub const MAGIC: [u8; 4] = *b"PLYC";
pub const VERSION: u8 = 1;

const VECTOR_HEADER_LEN: usize = 24;
const MATRIX_HEADER_LEN: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    Vector,
    /// Row-major; rows are time samples, columns are channels.
    Matrix {
        rows: u32,
        cols: u32,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ContainerHeader {
    pub layout: Layout,
    pub width: Width,
    pub policy: CodecPolicy,
    pub n_elements: u64,
    pub block_len: u32,
    pub n_blocks: u32,
}

impl ContainerHeader {
    pub fn encoded_len(&self) -> usize {
        match self.layout {
            Layout::Vector => VECTOR_HEADER_LEN,
            Layout::Matrix { .. } => MATRIX_HEADER_LEN,
        }
    }

    pub fn effective_block_len(&self) -> u64 {
        if self.block_len == 0 {
            self.n_elements
        } else {
            self.block_len as u64
        }
    }

    /// Values held by block `index`.
    pub fn block_values(&self, index: usize) -> usize {
        let len = self.effective_block_len();
        let start = index as u64 * len;
        len.min(self.n_elements.saturating_sub(start)) as usize
    }

    fn write_to(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&MAGIC);
        out.push(VERSION);
        out.push(match self.layout {
            Layout::Vector => 0,
            Layout::Matrix { .. } => 1,
        });
        out.push(self.width.bits() as u8);
        out.push(self.policy.to_byte());
        out.extend_from_slice(&self.n_elements.to_le_bytes());
        out.extend_from_slice(&self.block_len.to_le_bytes());
        out.extend_from_slice(&self.n_blocks.to_le_bytes());
        if let Layout::Matrix { rows, cols } = self.layout {
            out.extend_from_slice(&rows.to_le_bytes());
            out.extend_from_slice(&cols.to_le_bytes());
        }
    }

    pub fn parse(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 4 || bytes[..4] != MAGIC {
            return Err(Error::NotAContainer);
        }
        let mut cur = Cursor::new(bytes, 4);
        let version = cur.u8()?;
        if version != VERSION {
            return Err(Error::UnsupportedVersion(version));
        }
        let layout_byte = cur.u8()?;
        let width =
            Width::from_bits(cur.u8()? as u32).map_err(|_| Error::corrupt("bad element width"))?;
        let policy = CodecPolicy::from_byte(cur.u8()?)?;
        let n_elements = cur.u64()?;
        let block_len = cur.u32()?;
        let n_blocks = cur.u32()?;
        let layout = match layout_byte {
            0 => Layout::Vector,
            1 => {
                let rows = cur.u32()?;
                let cols = cur.u32()?;
                if rows as u64 * cols as u64 != n_elements {
                    return Err(Error::corrupt(format!(
                        "matrix {rows}x{cols} does not hold {n_elements} elements"
                    )));
                }
                Layout::Matrix { rows, cols }
            }
            other => return Err(Error::corrupt(format!("unknown layout {other}"))),
        };
        let header = Self {
            layout,
            width,
            policy,
            n_elements,
            block_len,
            n_blocks,
        };
        if n_elements == 0 || n_elements.div_ceil(header.effective_block_len()) != n_blocks as u64 {
            return Err(Error::corrupt(format!(
                "{n_elements} elements in blocks of {block_len} cannot make {n_blocks} blocks"
            )));
        }
        Ok(header)
    }
}

/// A row-major matrix of samples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: u32,
    cols: u32,
    data: SourceVector,
}

impl Matrix {
    pub fn new(rows: u32, cols: u32, data: SourceVector) -> Result<Self> {
        if rows as u64 * cols as u64 != data.len() as u64 {
            return Err(Error::InvalidArgument(format!(
                "{} values do not form a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> u32 {
        self.rows
    }

    pub fn cols(&self) -> u32 {
        self.cols
    }

    pub fn data(&self) -> &SourceVector {
        &self.data
    }

    pub fn get(&self, row: u32, col: u32) -> u32 {
        self.data[row as usize * self.cols as usize + col as usize]
    }

    /// One block per row.
    pub fn row_plan(&self, policy: CodecPolicy) -> BlockPlan {
        BlockPlan::new(self.cols as usize, policy)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Payload {
    Vector(SourceVector),
    Matrix(Matrix),
}

impl Payload {
    pub fn source(&self) -> &SourceVector {
        match self {
            Payload::Vector(v) => v,
            Payload::Matrix(m) => m.data(),
        }
    }

    pub fn into_source(self) -> SourceVector {
        match self {
            Payload::Vector(v) => v,
            Payload::Matrix(m) => m.data,
        }
    }
}

/// Decoded container contents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decoded {
    pub header: ContainerHeader,
    pub payload: Payload,
}

pub fn encode_container(payload: &Payload, plan: &BlockPlan) -> Result<Vec<u8>> {
    let source = payload.source();
    let blocks = compress_blocked(source, plan)?;
    let layout = match payload {
        Payload::Vector(_) => Layout::Vector,
        Payload::Matrix(m) => Layout::Matrix {
            rows: m.rows,
            cols: m.cols,
        },
    };
    let block_len = u32::try_from(plan.block_len).map_err(|_| {
        Error::InvalidArgument(format!("block length {} too large", plan.block_len))
    })?;
    let n_blocks = u32::try_from(blocks.len())
        .map_err(|_| Error::InvalidArgument("too many blocks".into()))?;
    let header = ContainerHeader {
        layout,
        width: source.width(),
        policy: plan.policy,
        n_elements: source.len() as u64,
        block_len,
        n_blocks,
    };

    let payload_words: usize = blocks.iter().map(|b| b.words.len()).sum();
    let mut out = Vec::with_capacity(
        header.encoded_len() + blocks.len() * BLOCK_HEADER_BYTES + 4 * payload_words,
    );
    header.write_to(&mut out);
    for block in &blocks {
        write_record(block, &mut out)?;
    }
    Ok(out)
}

fn write_record(block: &CompressedBlock, out: &mut Vec<u8>) -> Result<()> {
    let n_words = u32::try_from(block.words.len())
        .map_err(|_| Error::InvalidArgument("block payload exceeds 2^32 words".into()))?;
    out.extend_from_slice(&(block.codec as u32).to_le_bytes());
    out.extend_from_slice(&block.v_min.to_le_bytes());
    out.extend_from_slice(&block.b_minus_1.to_le_bytes());
    out.extend_from_slice(&n_words.to_le_bytes());
    for w in &block.words {
        out.extend_from_slice(&w.to_le_bytes());
    }
    Ok(())
}

pub fn decode_container(bytes: &[u8]) -> Result<Decoded> {
    let reader = ContainerReader::new(bytes)?;
    let values = reader.read_blocks(0..reader.n_blocks())?;
    let header = *reader.header();
    let source = SourceVector::new(values, header.width)
        .map_err(|_| Error::corrupt("decoded value exceeds element width"))?;
    let payload = match header.layout {
        Layout::Vector => Payload::Vector(source),
        Layout::Matrix { rows, cols } => Payload::Matrix(Matrix::new(rows, cols, source)?),
    };
    Ok(Decoded { header, payload })
}

/// Random access to the blocks of an encoded container.
#[derive(Debug)]
pub struct ContainerReader<'a> {
    bytes: &'a [u8],
    header: ContainerHeader,
    /// Byte offset of each block record.
    offsets: Vec<usize>,
}

impl<'a> ContainerReader<'a> {
    /// Parses the header and indexes record offsets from the record headers.
    pub fn new(bytes: &'a [u8]) -> Result<Self> {
        let header = ContainerHeader::parse(bytes)?;
        let mut offsets = Vec::with_capacity(header.n_blocks as usize);
        let mut pos = header.encoded_len();
        for i in 0..header.n_blocks {
            offsets.push(pos);
            let mut cur = Cursor::new(bytes, pos + 12);
            let n_words = cur.u32()? as usize;
            pos = n_words
                .checked_mul(4)
                .and_then(|b| b.checked_add(pos + BLOCK_HEADER_BYTES))
                .filter(|&end| end <= bytes.len())
                .ok_or_else(|| Error::corrupt(format!("block {i} truncated")))?;
        }
        if pos != bytes.len() {
            return Err(Error::corrupt(format!(
                "{} trailing bytes after last block",
                bytes.len() - pos
            )));
        }
        Ok(Self {
            bytes,
            header,
            offsets,
        })
    }

    pub fn header(&self) -> &ContainerHeader {
        &self.header
    }

    pub fn n_blocks(&self) -> usize {
        self.offsets.len()
    }

    /// Decodes the record of block `index` without decompressing it.
    pub fn block(&self, index: usize) -> Result<CompressedBlock> {
        let &start = self.offsets.get(index).ok_or_else(|| {
            Error::InvalidArgument(format!("block {index} out of {} blocks", self.n_blocks()))
        })?;
        let mut cur = Cursor::new(self.bytes, start);
        let codec = CodecId::try_from(cur.u32()?)?;
        let v_min = cur.u32()?;
        let b_minus_1 = cur.u32()?;
        let n_words = cur.u32()? as usize;
        let n_values = self.header.block_values(index);
        let expected = expected_words(codec, b_minus_1 as u64 + 1, n_values)
            .map_err(|e| Error::corrupt(format!("block {index}: {e}")))?;
        if expected != n_words {
            return Err(Error::corrupt(format!(
                "block {index} holds {n_words} words, its codec needs {expected}"
            )));
        }
        let words = (0..n_words).map(|_| cur.u32()).collect::<Result<_>>()?;
        Ok(CompressedBlock {
            codec,
            v_min,
            b_minus_1,
            n_values,
            words,
        })
    }

    /// Values of blocks `range`, touching no other payload.
    pub fn read_blocks(&self, range: Range<usize>) -> Result<Vec<u32>> {
        if range.start > range.end || range.end > self.n_blocks() {
            return Err(Error::InvalidArgument(format!(
                "block range {}..{} outside 0..{}",
                range.start,
                range.end,
                self.n_blocks()
            )));
        }
        let mut out = Vec::new();
        for i in range {
            decompress_block_into(&self.block(i)?, &mut out)?;
        }
        Ok(out)
    }

    /// Core ratio of the stored blocks (global header excluded).
    pub fn core_ratio(&self) -> Result<f64> {
        let blocks = (0..self.n_blocks())
            .map(|i| self.block(i))
            .collect::<Result<Vec<_>>>()?;
        Ok(core_ratio(
            &blocks,
            self.header.n_elements as usize,
            self.header.width.bits(),
        ))
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(bytes: &'a [u8], pos: usize) -> Self {
        Self { bytes, pos }
    }

    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        let end = self.pos + N;
        let slice = self
            .bytes
            .get(self.pos..end)
            .ok_or_else(|| Error::corrupt(format!("truncated at byte {}", self.pos)))?;
        self.pos = end;
        Ok(slice.try_into().expect("slice of length N"))
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take::<1>()?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take()?))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take()?))
    }
}

/// Pipes `stream` through an external filter run by `sh -c`.
///
/// The filter reads standard input and writes standard output; a nonzero
/// exit status is reported with its captured standard error.
pub fn post_stage(stream: &[u8], command: &str) -> Result<Vec<u8>> {
    let mut child = Command::new("sh")
        .arg("-c")
        .arg(command)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()?;
    let mut stdin = child.stdin.take().expect("piped stdin");
    let output = thread::scope(|s| {
        let writer = s.spawn(move || {
            // a filter may legitimately stop reading early
            match stdin.write_all(stream) {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                other => other,
            }
        });
        let output = child.wait_with_output();
        let written = writer.join().expect("stdin writer panicked");
        written.and(output)
    })?;
    if !output.status.success() {
        return Err(Error::PostStageFailed {
            command: command.to_string(),
            status: output.status.to_string(),
            stderr: String::from_utf8_lossy(&output.stderr).trim().to_string(),
        });
    }
    Ok(output.stdout)
}
