//! The split-base (advanced) polynomial codec.
//!
//! Basic packing wastes the headroom left in each word above `B^p`. Here that
//! headroom is used as a low base `R`: one extra value `v` is split into
//! `r = v mod R`, stored at the bottom of the current word, and
//! `r' = v div R < R'`, carried to the top of the next word. The next word then
//! has less room (its capacity is computed against `R'`), which yields the
//! schedule of `(p_i, R_i, R'_i)` that both sides recompute from `(B, n)`.
//!
//! Word layout for a split step (most significant first):
//!
//! ```text
//! s_i = r_i + R_i * (r'_{i-1} * B^p_i + v_{q+1} * B^(p_i-1) + ... + v_{q+p_i})
//! ```
//!
//! The last word is a plain base-`B` number holding the pending carry on top
//! of all remaining values; it never splits.

use crate::error::{Error, Result};
use crate::ring::{capacity, BaseParams, PackedWord, WORD_MAX};

/// Whether a step splits a value across the word boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    /// `digits` full values plus one split value.
    Split,
    /// Last word: `values` full digits under the pending carry.
    Final { values: u32 },
}

/// One word of the schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitStep {
    /// `p_i`: full base-`B` digits that fit beside the incoming carry.
    pub digits: u32,
    /// `R_i`: low split base kept in this word.
    pub low_base: u64,
    /// `R'_i = ceil(B / R_i)`: high split base carried into the next word.
    pub carry_base: u64,
    /// `R'_{i-1}`: bound on the carry this word receives.
    pub incoming_carry_base: u64,
    /// `q_i`: values fully or partially consumed by earlier words.
    pub consumed_before: usize,
    pub kind: StepKind,
}

impl SplitStep {
    /// Values this step starts (full digits plus the split value, if any).
    pub fn values_started(&self) -> usize {
        match self.kind {
            StepKind::Split => self.digits as usize + 1,
            StepKind::Final { values } => values as usize,
        }
    }
}

/// Lazily walks the schedule for `n` values of base `B`.
#[derive(Debug, Clone)]
pub struct ScheduleIter {
    base: u64,
    incoming: u64,
    remaining: usize,
    consumed: usize,
    done: bool,
}

impl ScheduleIter {
    pub fn new(base: u64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        if capacity(base, 1)? == 0 {
            return Err(Error::DegenerateBase(base));
        }
        Ok(Self {
            base,
            incoming: 1,
            remaining: n,
            consumed: 0,
            done: false,
        })
    }
}

impl Iterator for ScheduleIter {
    type Item = SplitStep;

    fn next(&mut self) -> Option<SplitStep> {
        if self.done {
            return None;
        }
        // incoming <= B - 1 < 2^32 and base >= 2 were checked at construction
        let digits = capacity(self.base, self.incoming).expect("valid schedule state");
        let low_base = WORD_MAX / (self.incoming * self.base.pow(digits));
        let carry_base = self.base.div_ceil(low_base);
        let mut step = SplitStep {
            digits,
            low_base,
            carry_base,
            incoming_carry_base: self.incoming,
            consumed_before: self.consumed,
            kind: StepKind::Split,
        };
        if self.remaining <= digits as usize {
            step.kind = StepKind::Final {
                values: self.remaining as u32,
            };
            self.done = true;
        } else {
            let used = digits as usize + 1;
            self.remaining -= used;
            self.consumed += used;
            self.incoming = carry_base;
        }
        Some(step)
    }
}

/// The full schedule for a block of `n` values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitSchedule {
    pub base: u64,
    pub n: usize,
    pub steps: Vec<SplitStep>,
}

pub fn split_schedule(base: u64, n: usize) -> Result<SplitSchedule> {
    Ok(SplitSchedule {
        base,
        n,
        steps: ScheduleIter::new(base, n)?.collect(),
    })
}

/// Word count of [`pack_advanced`] without packing.
pub fn advanced_word_count(base: u64, n: usize) -> Result<usize> {
    Ok(ScheduleIter::new(base, n)?.count())
}

pub fn pack_advanced(values: &[u32], params: &BaseParams) -> Result<Vec<PackedWord>> {
    let base = params.base();
    let v_min = params.v_min();
    let offset = |v: u32| -> Result<u64> {
        if v < v_min || v > params.v_max() {
            return Err(Error::ValueOutOfRange {
                value: v as u64,
                low: v_min as u64,
                high: params.v_max() as u64,
            });
        }
        Ok((v - v_min) as u64)
    };

    let mut words = Vec::new();
    let mut input = values.iter();
    let mut carry = 0u64;
    for step in ScheduleIter::new(base, values.len())? {
        let full = match step.kind {
            StepKind::Split => step.digits,
            StepKind::Final { values } => values,
        };
        let mut acc = carry;
        for &v in input.by_ref().take(full as usize) {
            acc = acc * base + offset(v)?;
        }
        let word = match step.kind {
            StepKind::Final { .. } => acc,
            StepKind::Split => {
                let v = offset(*input.next().expect("schedule covers input"))?;
                carry = v / step.low_base;
                v % step.low_base + step.low_base * acc
            }
        };
        debug_assert!(word <= WORD_MAX);
        words.push(word as PackedWord);
    }
    Ok(words)
}

pub fn unpack_advanced(words: &[PackedWord], params: &BaseParams, n: usize) -> Result<Vec<u32>> {
    let base = params.base();
    let v_min = params.v_min();
    let mut out = Vec::with_capacity(n);
    let mut words_iter = words.iter();
    // (r, R) of the value split by the previous word
    let mut pending: Option<(u64, u64)> = None;
    let mut digits = [0u64; 32];

    for (i, step) in ScheduleIter::new(base, n)?.enumerate() {
        let &word = words_iter.next().ok_or_else(|| {
            Error::corrupt(format!("advanced block of {n} values ends after {i} words"))
        })?;
        let word = word as u64;
        let (low, rest, full) = match step.kind {
            StepKind::Split => (word % step.low_base, word / step.low_base, step.digits),
            StepKind::Final { values } => (0, word, values),
        };

        let mut rest = rest;
        for d in digits[..full as usize].iter_mut().rev() {
            *d = rest % base;
            rest /= base;
        }
        let carry = rest;
        if carry >= step.incoming_carry_base {
            return Err(Error::corrupt(format!(
                "carry {carry} in word {i} exceeds split base {}",
                step.incoming_carry_base
            )));
        }
        if let Some((r, low_base)) = pending.take() {
            let v = carry * low_base + r;
            if v >= base {
                return Err(Error::corrupt(format!(
                    "split value {v} in word {i} exceeds base {base}"
                )));
            }
            out.push(v as u32 + v_min);
        }
        out.extend(digits[..full as usize].iter().map(|&d| d as u32 + v_min));
        if step.kind == StepKind::Split {
            pending = Some((low, step.low_base));
        }
    }
    if words_iter.next().is_some() {
        return Err(Error::corrupt(format!(
            "advanced block of {n} values has {} words, expected fewer",
            words.len()
        )));
    }
    debug_assert_eq!(out.len(), n);
    Ok(out)
}
