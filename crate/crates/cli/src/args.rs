use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use flicr_core::{CodecId, EpsnrParams, FlicrConfig, Lz77Params, SensorModel};

#[derive(Debug, Parser)]
#[command(name = "flicr", version, about = "Range-image LiDAR point cloud compression")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compress a KITTI .bin scan into a .flicr stream.
    Encode {
        input: PathBuf,
        output: PathBuf,
        #[command(flatten)]
        codec: CodecArgs,
    },
    /// Reconstruct a .flicr stream into a KITTI .bin scan.
    Decode {
        input: PathBuf,
        output: PathBuf,
        #[command(flatten)]
        matches: MatchArgs,
        /// Reconstruct rows in parallel.
        #[arg(long)]
        parallel: bool,
    },
    /// Score a reconstruction against the original scan.
    Metrics {
        original: PathBuf,
        reconstructed: PathBuf,
        /// Stream the reconstruction came from; its size sets the compression ratio.
        #[arg(long)]
        stream: Option<PathBuf>,
        #[command(flatten)]
        quality: QualityArgs,
        /// Print JSON instead of aligned text.
        #[arg(long)]
        json: bool,
    },
    /// Run every input through a grid of resolutions, depths and codecs.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Args)]
pub struct MatchArgs {
    /// Shortest LZ77 match. Must match the encoder.
    #[arg(long, default_value_t = Lz77Params::default().min_match)]
    pub min_match: usize,
    /// Longest LZ77 match. Must match the encoder.
    #[arg(long, default_value_t = Lz77Params::default().max_match)]
    pub max_match: usize,
}

#[derive(Debug, Clone, Args)]
pub struct CodecArgs {
    /// Azimuth bins.
    #[arg(long, default_value_t = SensorModel::HDL64E_COLS)]
    pub cols: usize,
    /// Elevation bins.
    #[arg(long, default_value_t = SensorModel::HDL64E_ROWS)]
    pub rows: usize,
    /// Bits per point, 2..=16, or 32 to store unquantized f32 ranges.
    #[arg(long, default_value_t = 8)]
    pub bpp: u8,
    #[arg(long, value_enum, default_value_t = CodecChoice::Lz77)]
    pub codec: CodecChoice,
    /// Ranges beyond this many meters are dropped.
    #[arg(long, default_value_t = SensorModel::hdl64e().max_range_m)]
    pub max_range: f64,
    /// Top of the vertical field of view, degrees.
    #[arg(long, default_value_t = SensorModel::hdl64e().v_fov_deg.0, allow_negative_numbers = true)]
    pub fov_up: f64,
    /// Bottom of the vertical field of view, degrees.
    #[arg(long, default_value_t = SensorModel::hdl64e().v_fov_deg.1, allow_negative_numbers = true)]
    pub fov_down: f64,
    /// LZ77 search window in bytes.
    #[arg(long, default_value_t = Lz77Params::default().window_bytes)]
    pub window: usize,
    /// LZ77 hash-chain candidates tried per position.
    #[arg(long, default_value_t = Lz77Params::default().max_chain)]
    pub max_chain: usize,
    #[command(flatten)]
    pub matches: MatchArgs,
    /// Project and reconstruct with all worker threads.
    #[arg(long)]
    pub parallel: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum CodecChoice {
    Lz77,
    Rle,
}

impl From<CodecChoice> for CodecId {
    fn from(c: CodecChoice) -> Self {
        match c {
            CodecChoice::Lz77 => CodecId::Lz77,
            CodecChoice::Rle => CodecId::Rle,
        }
    }
}

impl MatchArgs {
    pub fn lz77(&self) -> Lz77Params {
        Lz77Params { min_match: self.min_match, max_match: self.max_match, ..Lz77Params::default() }
    }
}

impl CodecArgs {
    pub fn lz77(&self) -> Lz77Params {
        Lz77Params { window_bytes: self.window, max_chain: self.max_chain, ..self.matches.lz77() }
    }

    pub fn model(&self) -> SensorModel {
        SensorModel {
            v_fov_deg: (self.fov_up, self.fov_down),
            max_range_m: self.max_range,
            ..SensorModel::hdl64e().with_resolution(self.cols, self.rows)
        }
    }

    pub fn config(&self) -> FlicrConfig {
        FlicrConfig {
            model: self.model(),
            bpp: self.bpp,
            codec: self.codec.into(),
            lz77: self.lz77(),
            parallel: self.parallel,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct QualityArgs {
    /// ePSNR offset on the entropy factor.
    #[arg(long, default_value_t = EpsnrParams::default().alpha, allow_negative_numbers = true)]
    pub alpha: f64,
    /// ePSNR entropy decay.
    #[arg(long, default_value_t = EpsnrParams::default().beta)]
    pub beta: f64,
    /// PSNR peak signal, meters.
    #[arg(long, default_value_t = SensorModel::hdl64e().max_range_m)]
    pub peak: f64,
}

impl QualityArgs {
    pub fn epsnr(&self) -> EpsnrParams {
        EpsnrParams { alpha: self.alpha, beta: self.beta }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// KITTI .bin files or directories of them.
    #[arg(long, num_args = 1..)]
    pub inputs: Vec<PathBuf>,
    /// Add N synthetic KITTI-like frames (seeds 1..=N).
    #[arg(long, default_value_t = 0)]
    pub synthetic: usize,
    /// Resolutions as COLSxROWS, comma separated.
    #[arg(long, value_delimiter = ',', value_parser = parse_resolution,
          default_value = "4500x64,4096x64,2048x64,1024x64,512x64,256x64")]
    pub resolutions: Vec<(usize, usize)>,
    #[arg(long, value_delimiter = ',', default_value = "8")]
    pub bpps: Vec<u8>,
    #[arg(long, value_delimiter = ',', value_enum, default_value = "lz77,rle")]
    pub codecs: Vec<CodecChoice>,
    /// Timed runs per row; latency columns report the mean.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    pub repetitions: u32,
    /// CSV destination. Standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Directory for ratio and latency charts (SVG).
    #[arg(long)]
    pub plot: Option<PathBuf>,
    #[command(flatten)]
    pub quality: QualityArgs,
    /// Project and reconstruct with all worker threads.
    #[arg(long)]
    pub parallel: bool,
}

fn parse_resolution(s: &str) -> Result<(usize, usize), String> {
    let (c, r) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected COLSxROWS, got `{s}`"))?;
    let parse = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("`{v}` in `{s}`: {e}"));
    Ok((parse(c)?, parse(r)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn resolution_parsing() {
        assert_eq!(parse_resolution("4500x64"), Ok((4500, 64)));
        assert_eq!(parse_resolution("256X32"), Ok((256, 32)));
        assert!(parse_resolution("4500").is_err());
        assert!(parse_resolution("ax64").is_err());
    }

    #[test]
    fn sweep_defaults() {
        let cli = Cli::try_parse_from(["flicr", "sweep", "--synthetic", "1"]).unwrap();
        let Command::Sweep(s) = cli.command else { panic!("not a sweep") };
        assert_eq!(s.resolutions.len(), 6);
        assert_eq!(s.bpps, vec![8]);
        assert_eq!(s.codecs, vec![CodecChoice::Lz77, CodecChoice::Rle]);
        assert_eq!(s.repetitions, 3);
    }
}
