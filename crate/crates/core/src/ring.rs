//! Value ranges, word capacity and the basic polynomial codec.
//!
//! A block of values confined to `[v_min, v_max]` lives in the ring of
//! size `B = v_max - v_min + 1`. After subtracting `v_min`, each value is a
//! base-`B` digit, and as many digits as fit below `2^32 - 1` are packed into
//! one 32-bit word.

use std::fmt;
use std::ops::Deref;

use crate::error::{Error, Result};

/// One packed 32-bit output word.
pub type PackedWord = u32;

/// Largest value a packed word may hold.
pub const WORD_MAX: u64 = u32::MAX as u64;

/// Element width of a source vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Width {
    W8,
    W16,
    W32,
}

impl Width {
    pub fn from_bits(bits: u32) -> Result<Self> {
        match bits {
            8 => Ok(Width::W8),
            16 => Ok(Width::W16),
            32 => Ok(Width::W32),
            other => Err(Error::InvalidArgument(format!(
                "width must be 8, 16 or 32 bits, got {other}"
            ))),
        }
    }

    pub fn bits(self) -> u32 {
        match self {
            Width::W8 => 8,
            Width::W16 => 16,
            Width::W32 => 32,
        }
    }

    pub fn bytes(self) -> usize {
        self.bits() as usize / 8
    }

    /// Largest representable value.
    pub fn max_value(self) -> u32 {
        match self {
            Width::W8 => u8::MAX as u32,
            Width::W16 => u16::MAX as u32,
            Width::W32 => u32::MAX,
        }
    }
}

impl fmt::Display for Width {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.bits())
    }
}

/// Digitized values together with their element width. Every value fits the
/// width.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceVector {
    values: Vec<u32>,
    width: Width,
}

impl SourceVector {
    pub fn new(values: Vec<u32>, width: Width) -> Result<Self> {
        let max = width.max_value();
        if let Some(&bad) = values.iter().find(|&&v| v > max) {
            return Err(Error::ValueOutOfRange {
                value: bad as u64,
                low: 0,
                high: max as u64,
            });
        }
        Ok(Self { values, width })
    }

    pub fn width(&self) -> Width {
        self.width
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn into_values(self) -> Vec<u32> {
        self.values
    }

    /// Parses headerless little-endian integers of the given width.
    pub fn from_le_bytes(bytes: &[u8], width: Width) -> Result<Self> {
        let size = width.bytes();
        if !bytes.len().is_multiple_of(size) {
            return Err(Error::InvalidArgument(format!(
                "raw input of {} bytes is not a multiple of {size}-byte elements",
                bytes.len()
            )));
        }
        let values = match width {
            Width::W8 => bytes.iter().map(|&b| b as u32).collect(),
            Width::W16 => bytes
                .chunks_exact(2)
                .map(|c| u16::from_le_bytes([c[0], c[1]]) as u32)
                .collect(),
            Width::W32 => bytes
                .chunks_exact(4)
                .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]]))
                .collect(),
        };
        Ok(Self { values, width })
    }

    /// Serializes as headerless little-endian integers.
    pub fn to_le_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.values.len() * self.width.bytes());
        for &v in &self.values {
            match self.width {
                Width::W8 => out.push(v as u8),
                Width::W16 => out.extend_from_slice(&(v as u16).to_le_bytes()),
                Width::W32 => out.extend_from_slice(&v.to_le_bytes()),
            }
        }
        out
    }
}

impl Deref for SourceVector {
    type Target = [u32];

    fn deref(&self) -> &[u32] {
        &self.values
    }
}

/// Range of a block: its minimum, maximum and the derived base `B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BaseParams {
    v_min: u32,
    v_max: u32,
}

impl BaseParams {
    pub fn new(v_min: u32, v_max: u32) -> Result<Self> {
        if v_min > v_max {
            return Err(Error::InvalidArgument(format!(
                "v_min {v_min} exceeds v_max {v_max}"
            )));
        }
        Ok(Self { v_min, v_max })
    }

    /// Rebuilds params from a stored minimum and `B - 1`.
    pub fn from_min_and_span(v_min: u32, b_minus_1: u32) -> Result<Self> {
        let v_max = v_min.checked_add(b_minus_1).ok_or_else(|| {
            Error::corrupt(format!(
                "v_min {v_min} + span {b_minus_1} overflows 32 bits"
            ))
        })?;
        Ok(Self { v_min, v_max })
    }

    pub fn v_min(&self) -> u32 {
        self.v_min
    }

    pub fn v_max(&self) -> u32 {
        self.v_max
    }

    /// `B = v_max - v_min + 1`, in `[1, 2^32]`.
    pub fn base(&self) -> u64 {
        (self.v_max - self.v_min) as u64 + 1
    }

    fn offset(&self, value: u32) -> Result<u64> {
        if value < self.v_min || value > self.v_max {
            return Err(Error::ValueOutOfRange {
                value: value as u64,
                low: self.v_min as u64,
                high: self.v_max as u64,
            });
        }
        Ok((value - self.v_min) as u64)
    }
}

/// Minimum, maximum and base of a non-empty slice.
pub fn derive_base(values: &[u32]) -> Result<BaseParams> {
    let (&first, rest) = values.split_first().ok_or(Error::EmptyInput)?;
    let (lo, hi) = rest
        .iter()
        .fold((first, first), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    Ok(BaseParams {
        v_min: lo,
        v_max: hi,
    })
}

/// Largest `p` with `carry_base * base^p <= 2^32 - 1`.
///
/// Exact integer arithmetic; the floating-point logarithm form drifts by one
/// near exact powers.
pub fn capacity(base: u64, carry_base: u64) -> Result<u32> {
    if base < 2 {
        return Err(Error::DegenerateBase(base));
    }
    if carry_base == 0 || carry_base > WORD_MAX {
        return Err(Error::InvalidArgument(format!(
            "carry base {carry_base} outside [1, 2^32 - 1]"
        )));
    }
    // bases above 2^32 are accepted, so the product can overflow u64
    let mut acc = carry_base;
    let mut p = 0;
    while let Some(next) = acc.checked_mul(base) {
        if next > WORD_MAX {
            break;
        }
        acc = next;
        p += 1;
    }
    Ok(p)
}

fn basic_digits(params: &BaseParams) -> Result<u32> {
    let base = params.base();
    match capacity(base, 1)? {
        0 => Err(Error::DegenerateBase(base)),
        p => Ok(p),
    }
}

/// Number of words [`pack_basic`] emits for `n` values of base `base`.
pub fn basic_word_count(base: u64, n: usize) -> Result<usize> {
    match capacity(base, 1)? {
        0 => Err(Error::DegenerateBase(base)),
        p => Ok(n.div_ceil(p as usize)),
    }
}

/// Packs `p = capacity(B, 1)` offset values per word, the first value at
/// the lowest power of `B`.
pub fn pack_basic(values: &[u32], params: &BaseParams) -> Result<Vec<PackedWord>> {
    let p = basic_digits(params)? as usize;
    let base = params.base();
    let mut words = Vec::with_capacity(values.len().div_ceil(p));
    for chunk in values.chunks(p) {
        let mut acc = 0u64;
        for &v in chunk.iter().rev() {
            acc = acc * base + params.offset(v)?;
        }
        debug_assert!(acc <= WORD_MAX);
        words.push(acc as u32);
    }
    Ok(words)
}

/// Inverse of [`pack_basic`] by repeated division.
pub fn unpack_basic(words: &[PackedWord], params: &BaseParams, n: usize) -> Result<Vec<u32>> {
    let p = basic_digits(params)? as usize;
    let base = params.base();
    let expected = n.div_ceil(p);
    if words.len() != expected {
        return Err(Error::corrupt(format!(
            "basic block of {n} values needs {expected} words, found {}",
            words.len()
        )));
    }
    let mut out = Vec::with_capacity(n);
    let mut remaining = n;
    for &w in words {
        let digits = remaining.min(p);
        let mut rest = w as u64;
        for _ in 0..digits {
            out.push((rest % base) as u32 + params.v_min);
            rest /= base;
        }
        if rest != 0 {
            return Err(Error::corrupt(format!(
                "residue {rest} left in basic word after {digits} digits"
            )));
        }
        remaining -= digits;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(v_min: u32, v_max: u32) -> BaseParams {
        BaseParams::new(v_min, v_max).unwrap()
    }

    #[test]
    fn derive_base_examples() {
        assert_eq!(derive_base(&[5, 7, 6]).unwrap(), params(5, 7));
        assert_eq!(derive_base(&[5, 7, 6]).unwrap().base(), 3);
        assert_eq!(derive_base(&[4, 4, 4]).unwrap().base(), 1);
        let p = derive_base(&[12345, 67890, 99999]).unwrap();
        assert_eq!((p.v_min(), p.base()), (12345, 87655));
        assert!(matches!(derive_base(&[]), Err(Error::EmptyInput)));
    }

    #[test]
    fn full_range_base() {
        let p = derive_base(&[0, u32::MAX]).unwrap();
        assert_eq!(p.base(), 1 << 32);
    }

    #[test]
    fn capacity_examples() {
        assert_eq!(capacity(2, 1).unwrap(), 31);
        assert_eq!(capacity(1000, 1).unwrap(), 3);
        assert_eq!(capacity(1000, 250).unwrap(), 2);
        assert_eq!(capacity(1 << 32, 1).unwrap(), 0);
        assert_eq!(capacity(WORD_MAX, 1).unwrap(), 1);
        assert!(matches!(capacity(1, 1), Err(Error::DegenerateBase(1))));
        assert!(matches!(capacity(0, 1), Err(Error::DegenerateBase(0))));
        assert!(capacity(10, 0).is_err());
        assert!(capacity(10, 1 << 32).is_err());
    }

    #[test]
    fn pack_basic_examples() {
        assert_eq!(pack_basic(&[1, 0, 2], &params(0, 2)).unwrap(), vec![19]);
        assert_eq!(
            pack_basic(&[1, 2, 3, 4, 5, 6], &params(0, 255)).unwrap(),
            vec![197121, 394500]
        );
        assert_eq!(pack_basic(&[17], &params(5, 17)).unwrap(), vec![12]);
    }

    #[test]
    fn unpack_basic_examples() {
        assert_eq!(
            unpack_basic(&[19], &params(0, 2), 3).unwrap(),
            vec![1, 0, 2]
        );
        assert_eq!(
            unpack_basic(&[197121, 394500], &params(0, 255), 6).unwrap(),
            vec![1, 2, 3, 4, 5, 6]
        );
        assert_eq!(unpack_basic(&[2], &params(5, 7), 1).unwrap(), vec![7]);
    }

    #[test]
    fn pack_rejects_out_of_range() {
        let err = pack_basic(&[1, 9], &params(0, 2)).unwrap_err();
        assert!(matches!(err, Error::ValueOutOfRange { value: 9, .. }));
        let err = pack_basic(&[0, 1], &params(0, u32::MAX)).unwrap_err();
        assert!(matches!(err, Error::DegenerateBase(_)));
    }

    #[test]
    fn unpack_detects_corruption() {
        // wrong word count
        assert!(matches!(
            unpack_basic(&[19, 0], &params(0, 2), 3),
            Err(Error::CorruptStream(_))
        ));
        // 27 = 3^3 needs a fourth digit
        assert!(matches!(
            unpack_basic(&[27], &params(0, 2), 3),
            Err(Error::CorruptStream(_))
        ));
    }

    #[test]
    fn raw_bytes_round_trip_and_width_check() {
        let v = SourceVector::new(vec![1, 300, 65535], Width::W16).unwrap();
        let bytes = v.to_le_bytes();
        assert_eq!(bytes, vec![1, 0, 44, 1, 255, 255]);
        assert_eq!(SourceVector::from_le_bytes(&bytes, Width::W16).unwrap(), v);
        assert!(SourceVector::new(vec![256], Width::W8).is_err());
        assert!(SourceVector::from_le_bytes(&[1, 2, 3], Width::W16).is_err());
    }

    proptest! {
        #[test]
        fn basic_round_trip(
            v_min in any::<u32>(),
            span in prop_oneof![1u32..4, 1u32..70_000, 1u32..=u32::MAX - 1],
            seeds in prop::collection::vec(any::<u64>(), 1..300),
        ) {
            let span = span.min(u32::MAX - v_min).max(1);
            // u32::MAX span would be full range, which has no basic packing
            prop_assume!(span < u32::MAX);
            let p = params(v_min, v_min + span);
            let values: Vec<u32> = seeds
                .iter()
                .map(|s| v_min + (s % (span as u64 + 1)) as u32)
                .collect();
            let words = pack_basic(&values, &p).unwrap();
            let per_word = capacity(p.base(), 1).unwrap() as usize;
            prop_assert_eq!(words.len(), values.len().div_ceil(per_word));
            prop_assert_eq!(unpack_basic(&words, &p, values.len()).unwrap(), values);
        }

        #[test]
        fn capacity_is_maximal(base in 2u64..=(1 << 32), carry in 1u64..=WORD_MAX) {
            let p = capacity(base, carry).unwrap();
            let acc = carry as u128 * (base as u128).pow(p);
            prop_assert!(acc <= WORD_MAX as u128);
            prop_assert!(acc * base as u128 > WORD_MAX as u128);
        }
    }
}
