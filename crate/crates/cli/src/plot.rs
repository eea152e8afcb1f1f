//! SVG charts of a finished sweep.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::Context;
use plotters::prelude::*;

use crate::sweep::BenchRow;

const PALETTE: [RGBColor; 6] = [
    RGBColor(31, 119, 180),
    RGBColor(255, 127, 14),
    RGBColor(44, 160, 44),
    RGBColor(214, 39, 40),
    RGBColor(148, 103, 189),
    RGBColor(140, 86, 75),
];

/// Mean of `f` over rows sharing (codec, bpp, cols), keyed for plotting.
fn means(rows: &[BenchRow], f: impl Fn(&BenchRow) -> f64) -> BTreeMap<(String, u8), BTreeMap<usize, f64>> {
    let mut acc: BTreeMap<(String, u8), BTreeMap<usize, (f64, usize)>> = BTreeMap::new();
    for r in rows {
        let e = acc.entry((r.codec.clone(), r.bpp)).or_default().entry(r.cols).or_insert((0.0, 0));
        e.0 += f(r);
        e.1 += 1;
    }
    acc.into_iter()
        .map(|(k, m)| (k, m.into_iter().map(|(c, (s, n))| (c, s / n as f64)).collect()))
        .collect()
}

fn plot_err<E: std::fmt::Debug>(e: E) -> anyhow::Error {
    anyhow::anyhow!("plotting failed: {e:?}")
}

/// Compression ratio against azimuth resolution, one line per codec and depth.
pub fn ratio_vs_resolution(rows: &[BenchRow], path: &Path) -> anyhow::Result<()> {
    let series = means(rows, |r| r.compression_ratio);
    let max_cols = rows.iter().map(|r| r.cols).max().unwrap_or(1) as f64;
    let max_ratio = rows.iter().map(|r| r.compression_ratio).fold(1.0, f64::max);

    let root = SVGBackend::new(path, (800, 500)).into_drawing_area();
    root.fill(&WHITE).map_err(plot_err)?;
    let mut chart = ChartBuilder::on(&root)
        .caption("Compression ratio vs resolution", ("sans-serif", 22))
        .margin(12)
        .x_label_area_size(40)
        .y_label_area_size(60)
        .build_cartesian_2d(0.0..max_cols * 1.05, 0.0..max_ratio * 1.1)
        .map_err(plot_err)?;
    chart
        .configure_mesh()
        .x_desc("azimuth bins")
        .y_desc("compression ratio")
        .draw()
        .map_err(plot_err)?;
    for (i, ((codec, bpp), pts)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let line: Vec<(f64, f64)> = pts.iter().map(|(&c, &v)| (c as f64, v)).collect();
        chart
            .draw_series(LineSeries::new(line.clone(), color.stroke_width(2)))
            .map_err(plot_err)?
            .label(format!("{codec} {bpp} bpp"))
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], color.stroke_width(2)));
        chart
            .draw_series(line.into_iter().map(|p| Circle::new(p, 3, color.filled())))
            .map_err(plot_err)?;
    }
    chart
        .configure_series_labels()
        .background_style(WHITE.mix(0.8))
        .border_style(BLACK)
        .draw()
        .map_err(plot_err)?;
    root.present().map_err(plot_err)?;
    Ok(())
}

/// Stacked encode and decode stage times per resolution for one codec and depth.
pub fn latency_breakdown(rows: &[BenchRow], codec: &str, bpp: u8, path: &Path) -> anyhow::Result<()> {
    type Stage = (&'static str, fn(&BenchRow) -> f64);
    let stages: [Stage; 8] = [
        ("project", |r| r.project_ms),
        ("quantize", |r| r.quantize_ms),
        ("serialize", |r| r.serialize_ms),
        ("compress", |r| r.compress_ms),
        ("decompress", |r| r.decompress_ms),
        ("deserialize", |r| r.deserialize_ms),
        ("dequantize", |r| r.dequantize_ms),
        ("reconstruct", |r| r.reconstruct_ms),
    ];
    let key = (codec.to_string(), bpp);
    let per_stage: Vec<BTreeMap<usize, f64>> = stages
        .iter()
        .map(|(_, f)| means(rows, f).remove(&key).unwrap_or_default())
        .collect();
    let resolutions: Vec<usize> = per_stage[0].keys().rev().copied().collect();
    let totals: Vec<f64> = resolutions
        .iter()
        .map(|c| per_stage.iter().map(|m| m.get(c).copied().unwrap_or(0.0)).sum())
        .collect();
    let max_total = totals.iter().copied().fold(1e-3, f64::max);

    let root = SVGBackend::new(path, (800, 500)).into_drawing_area();
    root.fill(&WHITE).map_err(plot_err)?;
    let n = resolutions.len().max(1);
    let mut chart = ChartBuilder::on(&root)
        .caption(format!("Latency breakdown, {codec} {bpp} bpp"), ("sans-serif", 22))
        .margin(12)
        .x_label_area_size(40)
        .y_label_area_size(60)
        .build_cartesian_2d(0.0..n as f64, 0.0..max_total * 1.1)
        .map_err(plot_err)?;
    let labels = resolutions.clone();
    chart
        .configure_mesh()
        .disable_x_mesh()
        .x_labels(n)
        .x_label_formatter(&|x| {
            let i = x.floor() as usize;
            labels.get(i).map(|c| c.to_string()).unwrap_or_default()
        })
        .x_desc("azimuth bins")
        .y_desc("ms")
        .draw()
        .map_err(plot_err)?;

    let mut base = vec![0.0; n];
    for (s, (name, _)) in stages.iter().enumerate() {
        let color = PALETTE[s % PALETTE.len()].mix(if s < 4 { 1.0 } else { 0.55 });
        let bars: Vec<Rectangle<(f64, f64)>> = resolutions
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let v = per_stage[s].get(c).copied().unwrap_or(0.0);
                let rect = Rectangle::new([(i as f64 + 0.15, base[i]), (i as f64 + 0.85, base[i] + v)], color.filled());
                base[i] += v;
                rect
            })
            .collect();
        chart
            .draw_series(bars)
            .map_err(plot_err)?
            .label(*name)
            .legend(move |(x, y)| Rectangle::new([(x, y - 5), (x + 12, y + 5)], color.filled()));
    }
    chart
        .configure_series_labels()
        .position(SeriesLabelPosition::UpperRight)
        .background_style(WHITE.mix(0.8))
        .border_style(BLACK)
        .draw()
        .map_err(plot_err)?;
    root.present().map_err(plot_err)?;
    Ok(())
}

/// Writes the ratio chart plus one latency chart per (codec, depth).
pub fn write_all(rows: &[BenchRow], dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut written = Vec::new();
    let ratio = dir.join("ratio_vs_resolution.svg");
    ratio_vs_resolution(rows, &ratio)?;
    written.push(ratio);
    for (codec, bpp) in means(rows, |_| 0.0).into_keys() {
        let p = dir.join(format!("latency_{codec}_{bpp}bpp.svg"));
        latency_breakdown(rows, &codec, bpp, &p)?;
        written.push(p);
    }
    Ok(written)
}
