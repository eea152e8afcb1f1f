//! The `flicr` command-line tool: encode, decode, metrics and sweep.

pub mod args;
pub mod plot;
pub mod sweep;

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use anyhow::Context;
use args::{Cli, CodecArgs, Command, MatchArgs, QualityArgs, SweepArgs};
use flicr_core::metrics::full_report;
use flicr_core::{decode_with, encode, read_kitti_bin, write_kitti_bin, Error, FlicrStream, QualityReport};

/// Rewrites core parameter names into the flag that sets them.
pub fn flag_error(e: Error) -> anyhow::Error {
    match e {
        Error::Parameter { name, reason } => {
            let flag = match name {
                "cols" => "--cols",
                "rows" => "--rows",
                "bpp" => "--bpp",
                "max_range" => "--max-range",
                "v_fov" => "--fov-up/--fov-down",
                "window_bytes" => "--window",
                "max_chain" => "--max-chain",
                "min_match" => "--min-match",
                "max_match" => "--max-match",
                "alpha" => "--alpha",
                "beta" => "--beta",
                "peak" => "--peak",
                other => other,
            };
            anyhow::anyhow!("invalid value for {flag}: {reason}")
        }
        other => other.into(),
    }
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Encode { input, output, codec } => cmd_encode(&input, &output, &codec),
        Command::Decode { input, output, matches, parallel } => cmd_decode(&input, &output, &matches, parallel),
        Command::Metrics { original, reconstructed, stream, quality, json } => {
            cmd_metrics(&original, &reconstructed, stream.as_deref(), &quality, json)
        }
        Command::Sweep(args) => cmd_sweep(&args),
    }
}

pub fn cmd_encode(input: &Path, output: &Path, args: &CodecArgs) -> anyhow::Result<()> {
    let cfg = args.config();
    cfg.validate().map_err(flag_error)?;
    let pc = read_kitti_bin(input)?;
    let (stream, s) = encode(&pc, &cfg).map_err(flag_error)?;
    std::fs::write(output, stream.to_bytes()).with_context(|| format!("writing {}", output.display()))?;
    println!(
        "points={} dropped={} raw_bytes={} compressed_bytes={} ratio={:.3} project_ms={:.3} quantize_ms={:.3} \
         serialize_ms={:.3} compress_ms={:.3} total_ms={:.3}",
        pc.len(),
        s.dropped_points,
        s.raw_bytes,
        s.compressed_bytes,
        s.raw_bytes as f64 / s.compressed_bytes as f64,
        s.t_project_ms,
        s.t_quantize_ms,
        s.t_serialize_ms,
        s.t_compress_ms,
        s.t_total_ms,
    );
    Ok(())
}

pub fn cmd_decode(input: &Path, output: &Path, matches: &MatchArgs, parallel: bool) -> anyhow::Result<()> {
    let lz77 = matches.lz77();
    lz77.validate().map_err(flag_error)?;
    let bytes = std::fs::read(input).with_context(|| format!("reading {}", input.display()))?;
    let stream = FlicrStream::from_bytes(&bytes).with_context(|| format!("parsing {}", input.display()))?;
    let (pc, s) = decode_with(&stream, &lz77, parallel)?;
    write_kitti_bin(&pc, output)?;
    println!(
        "points={} decompress_ms={:.3} deserialize_ms={:.3} dequantize_ms={:.3} reconstruct_ms={:.3} total_ms={:.3}",
        s.points, s.t_decompress_ms, s.t_deserialize_ms, s.t_dequantize_ms, s.t_reconstruct_ms, s.t_total_ms,
    );
    Ok(())
}

pub fn quality_report(
    original: &Path,
    reconstructed: &Path,
    stream: Option<&Path>,
    quality: &QualityArgs,
) -> anyhow::Result<QualityReport> {
    let orig = read_kitti_bin(original)?;
    let comp = read_kitti_bin(reconstructed)?;
    let sized = stream.unwrap_or(reconstructed);
    let compressed = std::fs::metadata(sized).with_context(|| format!("reading {}", sized.display()))?.len();
    full_report(&orig, &comp, orig.raw_bytes(), compressed as usize, quality.peak, &quality.epsnr()).map_err(flag_error)
}

pub fn format_report(q: &QualityReport) -> String {
    let mut s = String::new();
    let rows: [(&str, String); 10] = [
        ("psnr_db", format!("{:.4}", q.psnr_db)),
        ("epsnr_db", format!("{:.4}", q.epsnr_db)),
        ("se", format!("{:.6}", q.se)),
        ("chamfer_m2", format!("{:.6e}", q.chamfer_m2)),
        ("chamfer_rms_cm", format!("{:.4}", q.chamfer_rms_cm)),
        ("n_orig", q.n_orig.to_string()),
        ("n_comp", q.n_comp.to_string()),
        ("raw_bytes", q.raw_bytes.to_string()),
        ("compressed_bytes", q.compressed_bytes.to_string()),
        ("compression_ratio", format!("{:.4}", q.compression_ratio)),
    ];
    for (k, v) in rows {
        let _ = writeln!(s, "{k:<18} {v}");
    }
    s
}

pub fn cmd_metrics(
    original: &Path,
    reconstructed: &Path,
    stream: Option<&Path>,
    quality: &QualityArgs,
    json: bool,
) -> anyhow::Result<()> {
    let q = quality_report(original, reconstructed, stream, quality)?;
    if json {
        println!("{}", serde_json::to_string_pretty(&q)?);
    } else {
        print!("{}", format_report(&q));
    }
    Ok(())
}

pub fn cmd_sweep(args: &SweepArgs) -> anyhow::Result<()> {
    let mut inputs = sweep::expand_inputs(&args.inputs)?;
    inputs.extend((1..=args.synthetic as u64).map(sweep::InputSource::Synthetic));
    let spec = sweep::SweepSpec {
        inputs,
        resolutions: args.resolutions.clone(),
        bpps: args.bpps.clone(),
        codecs: args.codecs.iter().map(|&c| c.into()).collect(),
        repetitions: args.repetitions,
        epsnr: args.quality.epsnr(),
        peak_m: args.quality.peak,
        parallel: args.parallel,
        ..sweep::SweepSpec::default()
    };
    let threads = sweep::threads_from_env()?;
    let outcome = sweep::run_sweep(&spec, threads)?;

    match &args.out {
        Some(p) => {
            let f = std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?;
            sweep::write_csv(&outcome.rows, std::io::BufWriter::new(f))?;
            log::info!("wrote {} rows to {}", outcome.rows.len(), p.display());
        }
        None => {
            let stdout = std::io::stdout();
            sweep::write_csv(&outcome.rows, stdout.lock())?;
            stdout.lock().flush()?;
        }
    }
    if let Some(dir) = &args.plot {
        if outcome.rows.is_empty() {
            log::warn!("no rows to plot");
        } else {
            for p in plot::write_all(&outcome.rows, dir)? {
                log::info!("wrote {}", p.display());
            }
        }
    }
    if !outcome.failures.is_empty() {
        anyhow::bail!("{} of {} inputs failed", outcome.failures.len(), spec.inputs.len());
    }
    Ok(())
}
