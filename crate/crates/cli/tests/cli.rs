use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use flicr_core::pointcloud::{synth_scan, synthetic_frame, urban_scene, write_kitti_bin};
use flicr_core::SensorModel;

fn flicr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flicr")).args(args).env("FLICR_THREADS", "1").output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn small_scan(dir: &Path, name: &str, seed: u64) -> PathBuf {
    let model = SensorModel::hdl64e().with_resolution(720, 64);
    let path = dir.join(name);
    write_kitti_bin(&synth_scan(&model, &urban_scene(seed)), &path).unwrap();
    path
}

#[test]
fn encode_decode_metrics_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let scan = dir.path().join("frame.bin");
    write_kitti_bin(&synthetic_frame(3), &scan).unwrap();
    let stream = dir.path().join("frame.flicr");
    let back = dir.path().join("back.bin");

    let o = flicr(&["encode", s(&scan), s(&stream), "--cols", "4500", "--rows", "64", "--bpp", "8", "--codec", "lz77"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let line = String::from_utf8(o.stdout).unwrap();
    assert!(line.contains("project_ms=") && line.contains("compress_ms="), "{line}");
    assert_eq!(&std::fs::read(&stream).unwrap()[..4], b"FLCR");

    let o = flicr(&["decode", s(&stream), s(&back)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let len = std::fs::metadata(&back).unwrap().len();
    assert!(len > 0 && len.is_multiple_of(16));

    let o = flicr(&["metrics", s(&scan), s(&back), "--stream", s(&stream), "--json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["psnr_db"].as_f64().unwrap() > 40.0);
    assert!(v["compression_ratio"].as_f64().unwrap() > 5.0);

    let o = flicr(&["metrics", s(&scan), s(&back), "--stream", s(&stream)]);
    let text = String::from_utf8(o.stdout).unwrap();
    let psnr_line = text.lines().find(|l| l.starts_with("psnr_db")).unwrap();
    let psnr: f64 = psnr_line.split_whitespace().nth(1).unwrap().parse().unwrap();
    assert!((psnr - v["psnr_db"].as_f64().unwrap()).abs() < 1e-4);
}

#[test]
fn identical_files_have_zero_error() {
    let dir = tempfile::tempdir().unwrap();
    let scan = small_scan(dir.path(), "a.bin", 1);
    let o = flicr(&["metrics", s(&scan), s(&scan), "--json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["se"].as_f64(), Some(0.0));
    assert_eq!(v["chamfer_m2"].as_f64(), Some(0.0));
    assert_eq!(v["psnr_db"].as_f64(), Some(200.0));
}

#[test]
fn unknown_codec_is_a_usage_error() {
    let o = flicr(&["encode", "in.bin", "out.flicr", "--codec", "zstd"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn zero_cols_names_the_flag() {
    let dir = tempfile::tempdir().unwrap();
    let scan = small_scan(dir.path(), "a.bin", 1);
    let o = flicr(&["encode", s(&scan), s(&dir.path().join("o.flicr")), "--cols", "0"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("--cols"), "{}", stderr(&o));
}

#[test]
fn corrupt_magic_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.flicr");
    std::fs::write(&bad, b"NOPE and some more bytes than a header needs......").unwrap();
    let o = flicr(&["decode", s(&bad), s(&dir.path().join("o.bin"))]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("bad magic"), "{}", stderr(&o));
}

#[test]
fn missing_input_fails_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let o = flicr(&["encode", s(&dir.path().join("none.bin")), s(&dir.path().join("o.flicr"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("none.bin"));
}

#[test]
fn sweep_writes_every_row_and_plots() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let plots = dir.path().join("plots");
    let o = flicr(&[
        "sweep",
        "--synthetic",
        "1",
        "--repetitions",
        "1",
        "--out",
        s(&csv),
        "--plot",
        s(&plots),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let mut rdr = csv::Reader::from_path(&csv).unwrap();
    let headers = rdr.headers().unwrap().clone();
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 12);
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    for codec in ["lz77", "rle"] {
        let ratios: Vec<f64> = rows
            .iter()
            .filter(|r| &r[col("codec")] == codec)
            .map(|r| r[col("compression_ratio")].parse().unwrap())
            .collect();
        assert_eq!(ratios.len(), 6);
        assert!(ratios.windows(2).all(|w| w[1] > w[0]), "{codec}: {ratios:?}");
    }
    for pair in rows.chunks(2) {
        let lz: f64 = pair[0][col("compression_ratio")].parse().unwrap();
        let rle: f64 = pair[1][col("compression_ratio")].parse().unwrap();
        assert!(lz > rle, "{} cols: lz77 {lz} vs rle {rle}", &pair[0][col("cols")]);
    }
    for name in ["ratio_vs_resolution.svg", "latency_lz77_8bpp.svg", "latency_rle_8bpp.svg"] {
        let svg = std::fs::read_to_string(plots.join(name)).unwrap();
        assert!(svg.contains("<svg"), "{name}");
    }
}

#[test]
fn sweep_rows_rederive_from_individual_commands() {
    let dir = tempfile::tempdir().unwrap();
    let scan = small_scan(dir.path(), "a.bin", 5);
    let csv = dir.path().join("sweep.csv");
    let o = flicr(&[
        "sweep", "--inputs", s(&scan), "--resolutions", "512x32", "--codecs", "rle", "--bpps", "10",
        "--repetitions", "1", "--out", s(&csv),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let mut rdr = csv::Reader::from_path(&csv).unwrap();
    let headers = rdr.headers().unwrap().clone();
    let row = rdr.records().next().unwrap().unwrap();
    let field = |name: &str| row[headers.iter().position(|h| h == name).unwrap()].to_string();

    let stream = dir.path().join("a.flicr");
    let back = dir.path().join("b.bin");
    let args = ["--cols", "512", "--rows", "32", "--codec", "rle", "--bpp", "10"];
    assert!(flicr(&[&["encode", s(&scan), s(&stream)][..], &args[..]].concat()).status.success());
    assert!(flicr(&["decode", s(&stream), s(&back)]).status.success());
    let o = flicr(&["metrics", s(&scan), s(&back), "--stream", s(&stream), "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(field("compressed_bytes"), v["compressed_bytes"].to_string());
    assert_eq!(field("compression_ratio").parse::<f64>().unwrap(), v["compression_ratio"].as_f64().unwrap());
    assert_eq!(field("psnr_db").parse::<f64>().unwrap(), v["psnr_db"].as_f64().unwrap());
    assert_eq!(field("se").parse::<f64>().unwrap(), v["se"].as_f64().unwrap());
}

#[test]
fn sweep_with_a_bad_input_continues_and_fails_at_end() {
    let dir = tempfile::tempdir().unwrap();
    let good = small_scan(dir.path(), "good.bin", 2);
    let bad = dir.path().join("bad.bin");
    std::fs::write(&bad, [0u8; 17]).unwrap();
    let csv = dir.path().join("sweep.csv");
    let o = flicr(&[
        "sweep", "--inputs", s(&bad), s(&good), "--resolutions", "256x64", "--repetitions", "1", "--out", s(&csv),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("bad.bin"), "{}", stderr(&o));
    let rows = csv::Reader::from_path(&csv).unwrap().records().count();
    assert_eq!(rows, 2);
}

#[test]
fn sweep_without_inputs_fails() {
    let o = flicr(&["sweep"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("no inputs"));
}
