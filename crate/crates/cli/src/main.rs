use std::fs;
use std::io::{self, Read, Write};
use std::ops::Range;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use polyred::bench::{
    byte_histogram, sweep_block_size, sweep_signal_fraction, write_csv, SweepSpec,
};
use polyred::container::post_stage;
use polyred::{
    decode_container, encode_container, BlockPlan, CodecPolicy, ContainerReader, DistributionSpec,
    Error, Layout, Matrix, Payload, Seed, SourceVector, Width,
};

#[derive(Parser)]
#[command(
    name = "polyred",
    version,
    about = "Polynomial compression for noisy integer data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate synthetic noise-plus-signal data as raw little-endian integers.
    Gen {
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long)]
        signal_count: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compress raw integers into a container.
    Compress {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 32, value_parser = parse_width_bits)]
        width: u32,
        #[arg(long, value_enum, default_value_t = Codec::Auto)]
        codec: Codec,
        /// Values per block; 0 compresses the whole vector as one block.
        /// Defaults to one block per row with --matrix, else 0.
        #[arg(long)]
        block_size: Option<usize>,
        /// Treat the input as a row-major ROWSxCOLS matrix.
        #[arg(long, value_parser = parse_shape)]
        matrix: Option<(u32, u32)>,
        /// Filter command the container is piped through.
        #[arg(long)]
        post: Option<String>,
    },
    /// Decompress a container back to raw integers.
    Decompress {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Filter command undoing a --post stage.
        #[arg(long)]
        pre: Option<String>,
        /// Decode only blocks J..K (half-open).
        #[arg(long, value_parser = parse_range)]
        blocks: Option<Range<usize>>,
    },
    /// Mean compression ratio per block size, as CSV.
    BenchBlock {
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long)]
        signal_count: usize,
        /// Comma-separated block sizes (0 = whole vector).
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "1,10,50,100,154,200,300,500,1000,0"
        )]
        block_sizes: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, value_enum, default_value_t = Codec::Advanced)]
        codec: Codec,
        #[arg(long, default_value = "-")]
        out: PathBuf,
    },
    /// Mean compression ratio per signal fraction, as CSV.
    BenchSignal {
        #[command(flatten)]
        dist: DistArgs,
        /// Comma-separated signal fractions in [0, 1].
        #[arg(long, value_delimiter = ',', default_value = "0,0.1,0.2,0.3,0.4,0.5")]
        fractions: Vec<f64>,
        #[arg(long, default_value_t = 154)]
        block_size: usize,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, value_enum, default_value_t = Codec::Advanced)]
        codec: Codec,
        #[arg(long, default_value = "-")]
        out: PathBuf,
    },
    /// Byte-occurrence histogram as CSV.
    Hist {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "-")]
        csv: PathBuf,
    },
    /// Print container header fields.
    Info {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Args)]
struct DistArgs {
    #[arg(long, default_value_t = 3000.0)]
    mu: f64,
    #[arg(long, default_value_t = 500.0)]
    sigma: f64,
    #[arg(long, default_value_t = 2000)]
    low: u32,
    #[arg(long, default_value_t = 45000)]
    high: u32,
    #[arg(long, default_value_t = 1855)]
    n: usize,
    #[arg(long, default_value_t = 32, value_parser = parse_width_bits)]
    width: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl DistArgs {
    fn spec(&self, signal_count: usize) -> DistributionSpec {
        DistributionSpec::new(
            self.mu,
            self.sigma,
            self.low,
            self.high,
            signal_count,
            self.n,
        )
    }

    fn width(&self) -> Width {
        Width::from_bits(self.width).expect("validated by parser")
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Codec {
    Basic,
    Advanced,
    Auto,
}

impl From<Codec> for CodecPolicy {
    fn from(c: Codec) -> Self {
        match c {
            Codec::Basic => CodecPolicy::ForceBasic,
            Codec::Advanced => CodecPolicy::ForceAdvanced,
            Codec::Auto => CodecPolicy::Auto,
        }
    }
}

fn parse_width_bits(s: &str) -> Result<u32, String> {
    let bits: u32 = s.parse().map_err(|e| format!("{e}"))?;
    Width::from_bits(bits)
        .map(Width::bits)
        .map_err(|e| e.to_string())
}

fn parse_shape(s: &str) -> Result<(u32, u32), String> {
    let (r, c) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected ROWSxCOLS, got `{s}`"))?;
    let rows = r.parse().map_err(|e| format!("rows: {e}"))?;
    let cols = c.parse().map_err(|e| format!("cols: {e}"))?;
    Ok((rows, cols))
}

fn parse_range(s: &str) -> Result<Range<usize>, String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("expected J..K, got `{s}`"))?;
    let start = a.parse().map_err(|e| format!("start: {e}"))?;
    let end = b.parse().map_err(|e| format!("end: {e}"))?;
    if start > end {
        return Err(format!("empty range {start}..{end}"));
    }
    Ok(start..end)
}

fn read_input(path: &Path) -> io::Result<Vec<u8>> {
    if path == Path::new("-") {
        let mut buf = Vec::new();
        io::stdin().lock().read_to_end(&mut buf)?;
        Ok(buf)
    } else {
        fs::read(path)
    }
}

fn write_output(path: &Path, bytes: &[u8]) -> io::Result<()> {
    if path == Path::new("-") {
        let mut out = io::stdout().lock();
        out.write_all(bytes)?;
        out.flush()
    } else {
        fs::write(path, bytes)
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Io(_) => 3,
        Error::PostStageFailed { .. } => 4,
        _ => 2,
    }
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Gen {
            dist,
            signal_count,
            out,
        } => {
            let values =
                polyred::generate(&dist.spec(signal_count), dist.width(), Seed(dist.seed))?;
            write_output(&out, &values.to_le_bytes())?;
        }
        Command::Compress {
            input,
            out,
            width,
            codec,
            block_size,
            matrix,
            post,
        } => {
            let width = Width::from_bits(width)?;
            let source = SourceVector::from_le_bytes(&read_input(&input)?, width)?;
            let (payload, default_len) = match matrix {
                Some((rows, cols)) => (
                    Payload::Matrix(Matrix::new(rows, cols, source)?),
                    cols as usize,
                ),
                None => (Payload::Vector(source), 0),
            };
            let plan = BlockPlan::new(block_size.unwrap_or(default_len), codec.into());
            let mut bytes = encode_container(&payload, &plan)?;
            if let Some(cmd) = post {
                bytes = post_stage(&bytes, &cmd)?;
            }
            write_output(&out, &bytes)?;
        }
        Command::Decompress {
            input,
            out,
            pre,
            blocks,
        } => {
            let mut bytes = read_input(&input)?;
            if let Some(cmd) = pre {
                bytes = post_stage(&bytes, &cmd)?;
            }
            let raw = match blocks {
                Some(range) => {
                    let reader = ContainerReader::new(&bytes)?;
                    let width = reader.header().width;
                    SourceVector::new(reader.read_blocks(range)?, width)?.to_le_bytes()
                }
                None => decode_container(&bytes)?
                    .payload
                    .into_source()
                    .to_le_bytes(),
            };
            write_output(&out, &raw)?;
        }
        Command::BenchBlock {
            dist,
            signal_count,
            block_sizes,
            trials,
            codec,
            out,
        } => {
            let spec = SweepSpec {
                distribution: dist.spec(signal_count),
                width: dist.width(),
                block_sizes,
                trials,
                base_seed: Seed(dist.seed),
                policy: codec.into(),
            };
            let rows = sweep_block_size(&spec)?;
            let mut csv = Vec::new();
            write_csv(&rows, &mut csv)?;
            write_output(&out, &csv)?;
        }
        Command::BenchSignal {
            dist,
            fractions,
            block_size,
            trials,
            codec,
            out,
        } => {
            let rows = sweep_signal_fraction(
                &dist.spec(0),
                &fractions,
                &BlockPlan::new(block_size, codec.into()),
                dist.width(),
                trials,
                Seed(dist.seed),
            )?;
            let mut csv = Vec::new();
            write_csv(&rows, &mut csv)?;
            write_output(&out, &csv)?;
        }
        Command::Hist { input, csv } => {
            let hist = byte_histogram(&read_input(&input)?);
            let mut buf = Vec::new();
            hist.write_csv(&mut buf)?;
            write_output(&csv, &buf)?;
        }
        Command::Info { input } => {
            let bytes = read_input(&input)?;
            let reader = ContainerReader::new(&bytes)?;
            let h = reader.header();
            let mut text = String::new();
            text.push_str(&format!("version: {}\n", polyred::container::VERSION));
            match h.layout {
                Layout::Vector => text.push_str("layout: vector\n"),
                Layout::Matrix { rows, cols } => {
                    text.push_str(&format!("layout: matrix\nrows: {rows}\ncols: {cols}\n"))
                }
            }
            let raw_bytes = h.n_elements * h.width.bytes() as u64;
            text.push_str(&format!(
                "width_bits: {}\ncodec_policy: {:?}\nn_elements: {}\nblock_len: {}\nn_blocks: {}\n\
                 container_bytes: {}\ncore_ratio: {:.5}\nfile_ratio: {:.5}\n",
                h.width,
                h.policy,
                h.n_elements,
                h.block_len,
                h.n_blocks,
                bytes.len(),
                reader.core_ratio()?,
                raw_bytes as f64 / bytes.len() as f64,
            ));
            write_output(Path::new("-"), text.as_bytes())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("polyred: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
