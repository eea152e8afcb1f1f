//! Resolution x depth x codec sweeps over a set of scans.
//!
//! CSV columns, in order:
//!
//! | column | meaning |
//! |---|---|
//! | `input` | file path or `synthetic-<seed>` |
//! | `cols`, `rows`, `bpp`, `codec` | configuration of the row |
//! | `compression_ratio` | raw scan bytes over stream bytes |
//! | `se` | sampling error, fraction of points lost |
//! | `psnr_db`, `epsnr_db` | geometry PSNR and entropy-reflecting PSNR |
//! | `cd_m2` | Chamfer distance, squared meters |
//! | `cd_rms_cm` | square root of `cd_m2`, centimeters |
//! | `enc_ms`, `dec_ms` | mean end-to-end encode and decode time |
//! | `project_ms` .. `compress_ms` | mean encode stage times |
//! | `decompress_ms` .. `reconstruct_ms` | mean decode stage times |
//! | `n_orig`, `n_comp`, `raw_bytes`, `compressed_bytes` | sizes |

use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context};
use flicr_core::metrics::full_report;
use flicr_core::pointcloud::{decode_kitti_bytes, encode_kitti_bytes, read_kitti_scan, synthetic_frame};
use flicr_core::{decode_with, encode, CodecId, EpsnrParams, FlicrConfig, Lz77Params, PointCloud, SensorModel};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq)]
pub enum InputSource {
    File(PathBuf),
    Synthetic(u64),
}

impl InputSource {
    pub fn id(&self) -> String {
        match self {
            InputSource::File(p) => p.display().to_string(),
            InputSource::Synthetic(seed) => format!("synthetic-{seed}"),
        }
    }

    pub fn load(&self) -> anyhow::Result<PointCloud> {
        match self {
            InputSource::File(p) => {
                let scan = read_kitti_scan(p)?;
                if scan.non_finite_dropped > 0 {
                    log::warn!("{}: dropped {} non-finite points", p.display(), scan.non_finite_dropped);
                }
                Ok(scan.cloud)
            }
            InputSource::Synthetic(seed) => Ok(synthetic_frame(*seed)),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub inputs: Vec<InputSource>,
    pub resolutions: Vec<(usize, usize)>,
    pub bpps: Vec<u8>,
    pub codecs: Vec<CodecId>,
    pub repetitions: u32,
    pub model: SensorModel,
    pub lz77: Lz77Params,
    pub epsnr: EpsnrParams,
    pub peak_m: f64,
    pub parallel: bool,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            inputs: Vec::new(),
            resolutions: [4500, 4096, 2048, 1024, 512, 256].map(|c| (c, 64)).to_vec(),
            bpps: vec![8],
            codecs: vec![CodecId::Lz77, CodecId::Rle],
            repetitions: 3,
            model: SensorModel::hdl64e(),
            lz77: Lz77Params::default(),
            epsnr: EpsnrParams::default(),
            peak_m: SensorModel::hdl64e().max_range_m,
            parallel: false,
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> anyhow::Result<()> {
        ensure!(!self.inputs.is_empty(), "no inputs: pass --inputs or --synthetic N");
        ensure!(!self.resolutions.is_empty(), "--resolutions must not be empty");
        ensure!(!self.bpps.is_empty(), "--bpps must not be empty");
        ensure!(!self.codecs.is_empty(), "--codecs must not be empty");
        ensure!(self.repetitions >= 1, "--repetitions must be at least 1");
        for cfg in self.configs() {
            cfg.validate().map_err(crate::flag_error)?;
        }
        Ok(())
    }

    /// Row configurations in output order.
    pub fn configs(&self) -> Vec<FlicrConfig> {
        let mut out = Vec::new();
        for &(cols, rows) in &self.resolutions {
            for &bpp in &self.bpps {
                for &codec in &self.codecs {
                    out.push(FlicrConfig {
                        model: self.model.with_resolution(cols, rows),
                        bpp,
                        codec,
                        lz77: self.lz77,
                        parallel: self.parallel,
                    });
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub input: String,
    pub cols: usize,
    pub rows: usize,
    pub bpp: u8,
    pub codec: String,
    pub compression_ratio: f64,
    pub se: f64,
    pub psnr_db: f64,
    pub epsnr_db: f64,
    pub cd_m2: f64,
    pub cd_rms_cm: f64,
    pub enc_ms: f64,
    pub dec_ms: f64,
    pub project_ms: f64,
    pub quantize_ms: f64,
    pub serialize_ms: f64,
    pub compress_ms: f64,
    pub decompress_ms: f64,
    pub deserialize_ms: f64,
    pub dequantize_ms: f64,
    pub reconstruct_ms: f64,
    pub n_orig: usize,
    pub n_comp: usize,
    pub raw_bytes: usize,
    pub compressed_bytes: usize,
}

/// Encodes, decodes and scores one configuration. Quality columns come from
/// the first run, with the reconstruction rounded to the f32 KITTI layout;
/// every repetition must produce the same stream.
pub fn bench_row(id: &str, pc: &PointCloud, cfg: &FlicrConfig, spec: &SweepSpec) -> anyhow::Result<BenchRow> {
    let reps = spec.repetitions.max(1);
    let mut first = None;
    let mut enc = [0.0f64; 5];
    let mut dec = [0.0f64; 5];
    for _ in 0..reps {
        let (stream, es) = encode(pc, cfg)?;
        let (cloud, ds) = decode_with(&stream, &cfg.lz77, cfg.parallel)?;
        let e = [es.t_total_ms, es.t_project_ms, es.t_quantize_ms, es.t_serialize_ms, es.t_compress_ms];
        let d = [ds.t_total_ms, ds.t_decompress_ms, ds.t_deserialize_ms, ds.t_dequantize_ms, ds.t_reconstruct_ms];
        for k in 0..5 {
            enc[k] += e[k] / reps as f64;
            dec[k] += d[k] / reps as f64;
        }
        match &first {
            None => first = Some((stream, cloud)),
            Some((s, _)) if *s != stream => bail!("{id}: repeated encode produced a different stream"),
            Some(_) => {}
        }
    }
    let (stream, cloud) = first.expect("at least one repetition");
    // Score what `decode` writes to disk, so rows match the individual commands.
    let cloud = decode_kitti_bytes(&encode_kitti_bytes(&cloud))?.cloud;
    let q = full_report(pc, &cloud, pc.raw_bytes(), stream.total_len(), spec.peak_m, &spec.epsnr)?;
    let row = BenchRow {
        input: id.to_string(),
        cols: cfg.model.cols,
        rows: cfg.model.rows,
        bpp: cfg.bpp,
        codec: cfg.codec.to_string(),
        compression_ratio: q.compression_ratio,
        se: q.se,
        psnr_db: q.psnr_db,
        epsnr_db: q.epsnr_db,
        cd_m2: q.chamfer_m2,
        cd_rms_cm: q.chamfer_rms_cm,
        enc_ms: enc[0],
        dec_ms: dec[0],
        project_ms: enc[1],
        quantize_ms: enc[2],
        serialize_ms: enc[3],
        compress_ms: enc[4],
        decompress_ms: dec[1],
        deserialize_ms: dec[2],
        dequantize_ms: dec[3],
        reconstruct_ms: dec[4],
        n_orig: q.n_orig,
        n_comp: q.n_comp,
        raw_bytes: q.raw_bytes,
        compressed_bytes: q.compressed_bytes,
    };
    ensure!(row.is_finite(), "{id}: non-finite value in row {row:?}");
    Ok(row)
}

impl BenchRow {
    fn is_finite(&self) -> bool {
        [
            self.compression_ratio,
            self.se,
            self.psnr_db,
            self.epsnr_db,
            self.cd_m2,
            self.cd_rms_cm,
            self.enc_ms,
            self.dec_ms,
            self.project_ms,
            self.quantize_ms,
            self.serialize_ms,
            self.compress_ms,
            self.decompress_ms,
            self.deserialize_ms,
            self.dequantize_ms,
            self.reconstruct_ms,
        ]
        .iter()
        .all(|v| v.is_finite())
    }
}

pub fn run_input(input: &InputSource, spec: &SweepSpec) -> anyhow::Result<Vec<BenchRow>> {
    let id = input.id();
    let pc = input.load()?;
    spec.configs()
        .iter()
        .map(|cfg| bench_row(&id, &pc, cfg, spec).with_context(|| format!("{id} at {}x{}", cfg.model.cols, cfg.model.rows)))
        .collect()
}

#[derive(Debug, Default)]
pub struct SweepOutcome {
    pub rows: Vec<BenchRow>,
    /// Inputs that failed, with the error.
    pub failures: Vec<(String, anyhow::Error)>,
}

/// Runs inputs concurrently, at most `threads` at a time, and returns rows in
/// configuration order. A failing input contributes no rows.
pub fn run_sweep(spec: &SweepSpec, threads: Option<usize>) -> anyhow::Result<SweepOutcome> {
    spec.validate()?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().context("building worker pool")?;
    let results: Vec<_> = pool.install(|| spec.inputs.par_iter().map(|i| run_input(i, spec)).collect());

    let mut out = SweepOutcome::default();
    for (input, res) in spec.inputs.iter().zip(results) {
        match res {
            Ok(rows) => out.rows.extend(rows),
            Err(e) => {
                log::error!("{}: {e:#}", input.id());
                out.failures.push((input.id(), e));
            }
        }
    }
    Ok(out)
}

/// Expands directories into their `.bin` files, sorted by name.
pub fn expand_inputs(paths: &[PathBuf]) -> anyhow::Result<Vec<InputSource>> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            out.extend(bin_files(p)?.into_iter().map(InputSource::File));
        } else {
            out.push(InputSource::File(p.clone()));
        }
    }
    Ok(out)
}

pub fn bin_files(dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("reading directory {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x.eq_ignore_ascii_case("bin")))
        .collect();
    files.sort();
    Ok(files)
}

pub fn write_csv<W: std::io::Write>(rows: &[BenchRow], w: W) -> anyhow::Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for r in rows {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Reads `FLICR_THREADS`. Unset or empty means no cap.
pub fn threads_from_env() -> anyhow::Result<Option<usize>> {
    match std::env::var("FLICR_THREADS") {
        Ok(v) if v.trim().is_empty() => Ok(None),
        Ok(v) => {
            let n: usize = v.trim().parse().with_context(|| format!("FLICR_THREADS=`{v}`"))?;
            ensure!(n >= 1, "FLICR_THREADS must be at least 1");
            Ok(Some(n))
        }
        Err(_) => Ok(None),
    }
}
