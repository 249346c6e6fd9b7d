//! Command-line front end.

pub mod bench;
pub mod io;
mod verify;

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bwt::{sa_to_bwt, suffix_array, Algorithm, Construction};
use crate::engine::{Engine, EngineConfig};
use crate::smr::DEFAULT_KMER;
use crate::text::{CharOrder, SentinelOrder, Text};

pub use io::SaFormat;

#[derive(Debug, Parser)]
#[command(name = "dbwt", version, about = "Suffix array and BWT construction on a partitioned-dataset engine")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the BWT of a file.
    Bwt(BwtArgs),
    /// Compute the suffix array of a file.
    Sa(SaArgs),
    /// Check a construction (or an existing suffix array file).
    Verify(VerifyArgs),
    /// Time constructions over datasets and prefixes.
    Bench(bench::BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderArg {
    Smallest,
    Largest,
}

impl From<OrderArg> for SentinelOrder {
    fn from(o: OrderArg) -> Self {
        match o {
            OrderArg::Smallest => SentinelOrder::Smallest,
            OrderArg::Largest => SentinelOrder::Largest,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Text,
    Json,
}

fn parse_byte(s: &str) -> Result<u8, String> {
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u8::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.or_else(|_| match s.as_bytes() {
        [b] => Ok(*b),
        _ => Err(format!("{s:?} is not a byte (use 0-255, 0xNN or a single character)")),
    })
}

/// Byte count with an optional binary suffix: `4096`, `64K`, `100M`, `1G`.
pub fn parse_size(s: &str) -> Result<u64, String> {
    let t = s.trim();
    let (digits, shift) = match t.char_indices().last() {
        Some((i, 'k' | 'K')) => (&t[..i], 10),
        Some((i, 'm' | 'M')) => (&t[..i], 20),
        Some((i, 'g' | 'G')) => (&t[..i], 30),
        _ => (t, 0),
    };
    let base: u64 = digits
        .parse()
        .map_err(|_| format!("{s:?} is not a size (use N, NK, NM or NG)"))?;
    base.checked_mul(1 << shift)
        .ok_or_else(|| format!("{s:?} is too large"))
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Engine and text options shared by every command.
#[derive(Debug, Clone, Args)]
pub struct EngineOpts {
    /// k-mer length (smr-r / smr-t only) [default: 8]
    #[arg(long = "kmer", value_name = "K")]
    pub kmer: Option<usize>,
    /// Partition count [default: number of workers]
    #[arg(long, value_name = "R")]
    pub partitions: Option<usize>,
    /// Worker threads
    #[arg(long, value_name = "W", default_value_t = default_workers())]
    pub workers: usize,
    /// Seed for range-partition sampling
    #[arg(long, value_name = "N", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "smallest")]
    pub sentinel_order: OrderArg,
    /// Sentinel byte: decimal, 0xNN or a single character
    #[arg(long, value_parser = parse_byte, default_value = "0")]
    pub sentinel: u8,
}

/// Input selection.
#[derive(Debug, Clone, Args)]
pub struct InputOpts {
    /// Raw input file; every byte (newlines included) is part of the text
    pub input: PathBuf,
    /// Read only the first N bytes (suffixes K, M, G are powers of 1024)
    #[arg(long, value_name = "N", value_parser = parse_size)]
    pub max_bytes: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct BwtArgs {
    #[command(flatten)]
    pub input: InputOpts,
    #[arg(long, default_value = "pda")]
    pub algorithm: Algorithm,
    #[command(flatten)]
    pub engine: EngineOpts,
    /// BWT output file
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
    /// Also write the suffix array here
    #[arg(long, value_name = "PATH")]
    pub sa_out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "le64")]
    pub sa_format: SaFormat,
}

#[derive(Debug, Clone, Args)]
pub struct SaArgs {
    #[command(flatten)]
    pub input: InputOpts,
    #[arg(long, default_value = "pda")]
    pub algorithm: Algorithm,
    #[command(flatten)]
    pub engine: EngineOpts,
    /// Suffix array output file
    #[arg(long = "sa-out", visible_alias = "out", value_name = "PATH")]
    pub sa_out: PathBuf,
    #[arg(long, value_enum, default_value = "le64")]
    pub sa_format: SaFormat,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub input: InputOpts,
    #[arg(long, default_value = "pda")]
    pub algorithm: Algorithm,
    #[command(flatten)]
    pub engine: EngineOpts,
    /// Verify this suffix array file instead of building one
    #[arg(long, value_name = "PATH")]
    pub sa_in: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "le64")]
    pub sa_format: SaFormat,
    /// Also build with this algorithm and require identical output
    #[arg(long, value_name = "ALGORITHM")]
    pub cross_check: Option<Algorithm>,
    /// Number of sampled adjacent suffix pairs to compare
    #[arg(long, value_name = "S", default_value_t = 1000)]
    pub spot_checks: usize,
}

/// Validated run parameters.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub input: PathBuf,
    pub max_bytes: Option<u64>,
    pub algorithm: Algorithm,
    pub k: usize,
    pub partitions: usize,
    pub workers: usize,
    pub seed: u64,
    pub order: CharOrder,
}

impl RunConfig {
    pub fn new(input: &InputOpts, algorithms: &[Algorithm], engine: &EngineOpts) -> Result<Self> {
        if input.max_bytes == Some(0) {
            bail!("--max-bytes must be at least 1");
        }
        if engine.workers == 0 {
            bail!("--workers must be at least 1");
        }
        if engine.partitions == Some(0) {
            bail!("--partitions must be at least 1");
        }
        if engine.kmer == Some(0) {
            bail!("--kmer must be at least 1");
        }
        if engine.kmer.is_some() && !algorithms.iter().any(Algorithm::is_smr) {
            bail!("--kmer only applies to smr-r and smr-t");
        }
        Ok(Self {
            input: input.input.clone(),
            max_bytes: input.max_bytes,
            algorithm: algorithms.first().copied().unwrap_or(Algorithm::Pda),
            k: engine.kmer.unwrap_or(DEFAULT_KMER),
            partitions: engine.partitions.unwrap_or(engine.workers),
            workers: engine.workers,
            seed: engine.seed,
            order: CharOrder::new(engine.sentinel, engine.sentinel_order.into()),
        })
    }

    pub fn engine_config(&self) -> EngineConfig {
        EngineConfig::new(self.workers, self.partitions).with_seed(self.seed)
    }

    pub fn engine(&self) -> Result<Engine> {
        Ok(Engine::new(self.engine_config())?)
    }

    pub fn ingest(&self) -> Result<Text> {
        io::ingest(&self.input, self.max_bytes, self.order)
    }

    pub fn build(&self, engine: &Engine, text: &Text, algorithm: Algorithm) -> Result<Construction> {
        suffix_array(engine, text, algorithm, self.k, self.partitions)
            .with_context(|| format!("{algorithm} construction failed"))
    }
}

pub fn cmd_bwt(args: &BwtArgs) -> Result<()> {
    let config = RunConfig::new(&args.input, &[args.algorithm], &args.engine)?;
    let text = config.ingest()?;
    let engine = config.engine()?;
    let built = config.build(&engine, &text, config.algorithm)?;
    let result = sa_to_bwt(&engine, built.sa.as_slice(), &text)?;
    io::write_bwt(&args.out, &result)?;
    if let Some(path) = &args.sa_out {
        io::write_sa(path, built.sa.as_slice(), args.sa_format)?;
    }
    Ok(())
}

pub fn cmd_sa(args: &SaArgs) -> Result<()> {
    let config = RunConfig::new(&args.input, &[args.algorithm], &args.engine)?;
    let text = config.ingest()?;
    let engine = config.engine()?;
    let built = config.build(&engine, &text, config.algorithm)?;
    io::write_sa(&args.sa_out, built.sa.as_slice(), args.sa_format)
}

/// Parse arguments, run the command, and return the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Bwt(args) => cmd_bwt(args).map(|_| true),
        Command::Sa(args) => cmd_sa(args).map(|_| true),
        Command::Verify(args) => verify::cmd_verify(args),
        Command::Bench(args) => bench::cmd_bench(args),
    };
    match outcome {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e:#}");
            2
        }
    }
}
