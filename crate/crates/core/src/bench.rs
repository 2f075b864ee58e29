//! Experiment harness: ratio sweeps over block size and signal fraction,
//! byte-occurrence profiles and end-to-end pipeline timing.
//!
//! Ratios use the core accounting of [`crate::block::core_ratio`], so they
//! exclude the container header. Ratio columns depend only on the base seed;
//! timing columns are informational.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use crate::block::{compress_blocked, core_ratio, decompress_blocked, BlockPlan, CodecPolicy};
use crate::container::{decode_container, encode_container, post_stage, Payload};
use crate::error::{Error, Result};
use crate::ring::{SourceVector, Width};
use crate::synth::{generate, DistributionSpec, Seed};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub distribution: DistributionSpec,
    pub width: Width,
    /// Block lengths to try; 0 is the whole vector.
    pub block_sizes: Vec<usize>,
    pub trials: usize,
    /// Trial `t` uses `base_seed + t`.
    pub base_seed: Seed,
    pub policy: CodecPolicy,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub block_len: usize,
    pub mean_ratio: f64,
    pub stddev_ratio: f64,
    pub mean_compress_ns_per_value: f64,
    pub mean_decompress_ns_per_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignalRow {
    pub fraction: f64,
    pub signal_count: usize,
    pub block_len: usize,
    pub mean_ratio: f64,
    pub stddev_ratio: f64,
}

/// Mean and sample standard deviation.
fn mean_stddev(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[derive(Default)]
struct Accum {
    ratios: Vec<f64>,
    compress_ns: f64,
    decompress_ns: f64,
    values: f64,
}

fn measure(values: &[u32], plan: &BlockPlan, width: Width, acc: &mut Accum) -> Result<()> {
    let start = Instant::now();
    let blocks = compress_blocked(values, plan)?;
    let compressed = start.elapsed();
    let start = Instant::now();
    let restored = decompress_blocked(&blocks)?;
    let decompressed = start.elapsed();
    if restored != values {
        return Err(Error::RoundTripMismatch(format!(
            "block length {} lost data",
            plan.block_len
        )));
    }
    acc.ratios
        .push(core_ratio(&blocks, values.len(), width.bits()));
    acc.compress_ns += compressed.as_nanos() as f64;
    acc.decompress_ns += decompressed.as_nanos() as f64;
    acc.values += values.len() as f64;
    Ok(())
}

/// Mean core ratio per block length over freshly seeded vectors.
pub fn sweep_block_size(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    if spec.trials == 0 {
        return Err(Error::InvalidArgument(
            "at least one trial is required".into(),
        ));
    }
    let mut accs: Vec<Accum> = spec.block_sizes.iter().map(|_| Accum::default()).collect();
    for t in 0..spec.trials {
        let values = generate(
            &spec.distribution,
            spec.width,
            spec.base_seed.for_trial(t as u64),
        )?;
        for (&len, acc) in spec.block_sizes.iter().zip(&mut accs) {
            measure(&values, &BlockPlan::new(len, spec.policy), spec.width, acc)?;
        }
    }
    Ok(spec
        .block_sizes
        .iter()
        .zip(accs)
        .map(|(&block_len, acc)| {
            let (mean_ratio, stddev_ratio) = mean_stddev(&acc.ratios);
            SweepRow {
                block_len,
                mean_ratio,
                stddev_ratio,
                mean_compress_ns_per_value: acc.compress_ns / acc.values,
                mean_decompress_ns_per_value: acc.decompress_ns / acc.values,
            }
        })
        .collect())
}

/// Mean core ratio as the signal share of the vector varies.
pub fn sweep_signal_fraction(
    distribution: &DistributionSpec,
    fractions: &[f64],
    plan: &BlockPlan,
    width: Width,
    trials: usize,
    base_seed: Seed,
) -> Result<Vec<SignalRow>> {
    if trials == 0 {
        return Err(Error::InvalidArgument(
            "at least one trial is required".into(),
        ));
    }
    fractions
        .iter()
        .map(|&fraction| {
            if !(0.0..=1.0).contains(&fraction) {
                return Err(Error::InvalidArgument(format!(
                    "signal fraction {fraction} outside [0, 1]"
                )));
            }
            let signal_count = (fraction * distribution.total as f64).round() as usize;
            let dist = distribution.with_signal_count(signal_count);
            let mut acc = Accum::default();
            for t in 0..trials {
                let values = generate(&dist, width, base_seed.for_trial(t as u64))?;
                measure(&values, plan, width, &mut acc)?;
            }
            let (mean_ratio, stddev_ratio) = mean_stddev(&acc.ratios);
            Ok(SignalRow {
                fraction,
                signal_count,
                block_len: plan.block_len,
                mean_ratio,
                stddev_ratio,
            })
        })
        .collect()
}

/// Occurrences of each byte value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ByteHistogram {
    pub counts: [u64; 256],
}

impl ByteHistogram {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Pearson chi-square statistic against a flat profile.
    pub fn chi_square_uniform(&self) -> f64 {
        let total = self.total();
        if total == 0 {
            return 0.0;
        }
        let expected = total as f64 / 256.0;
        self.counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum()
    }

    /// Chi-square per byte, comparable across streams of different lengths.
    pub fn normalized_chi_square(&self) -> f64 {
        match self.total() {
            0 => 0.0,
            total => self.chi_square_uniform() / total as f64,
        }
    }

    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        #[derive(Serialize)]
        struct Row {
            byte: u8,
            count: u64,
        }
        let mut w = csv::Writer::from_writer(out);
        for (byte, &count) in self.counts.iter().enumerate() {
            w.serialize(Row {
                byte: byte as u8,
                count,
            })?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn byte_histogram(stream: &[u8]) -> ByteHistogram {
    let mut counts = [0u64; 256];
    for &b in stream {
        counts[b as usize] += 1;
    }
    ByteHistogram { counts }
}

/// Writes serializable rows as CSV with a header line.
pub fn write_csv<T: Serialize>(rows: &[T], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// An external compressor and its inverse, each run through `sh -c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilterPair {
    pub compress: String,
    pub decompress: String,
}

impl FilterPair {
    pub fn new(compress: impl Into<String>, decompress: impl Into<String>) -> Self {
        Self {
            compress: compress.into(),
            decompress: decompress.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolyStage {
    pub plan: BlockPlan,
    pub width: Width,
}

/// Polynomial stage and/or external filter; with neither the pipeline is
/// the identity.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Pipeline {
    pub poly: Option<PolyStage>,
    pub post: Option<FilterPair>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimingReport {
    pub bytes_in: u64,
    pub bytes_out: u64,
    pub ratio: f64,
    pub wall_ns_compress: u64,
    pub wall_ns_decompress: u64,
}

/// Runs the pipeline forward and back over the file at `input`.
///
/// Fails without reporting timings if the round trip does not reproduce the
/// input bytes exactly.
pub fn time_pipeline(input: &Path, pipeline: &Pipeline) -> Result<TimingReport> {
    let raw = fs::read(input)?;

    let start = Instant::now();
    let mut stream = match &pipeline.poly {
        Some(poly) => {
            let source = SourceVector::from_le_bytes(&raw, poly.width)?;
            encode_container(&Payload::Vector(source), &poly.plan)?
        }
        None => raw.clone(),
    };
    if let Some(post) = &pipeline.post {
        stream = post_stage(&stream, &post.compress)?;
    }
    let wall_ns_compress = start.elapsed().as_nanos() as u64;
    let bytes_out = stream.len() as u64;

    let start = Instant::now();
    if let Some(post) = &pipeline.post {
        stream = post_stage(&stream, &post.decompress)?;
    }
    let restored = match &pipeline.poly {
        Some(_) => decode_container(&stream)?
            .payload
            .into_source()
            .to_le_bytes(),
        None => stream,
    };
    let wall_ns_decompress = start.elapsed().as_nanos() as u64;

    if restored != raw {
        return Err(Error::RoundTripMismatch(format!(
            "{} does not survive the pipeline",
            input.display()
        )));
    }
    Ok(TimingReport {
        bytes_in: raw.len() as u64,
        bytes_out,
        ratio: raw.len() as f64 / bytes_out.max(1) as f64,
        wall_ns_compress,
        wall_ns_decompress,
    })
}
