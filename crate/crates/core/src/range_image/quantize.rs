use std::ops::RangeInclusive;

use super::{max_code, QuantizedRangeImage, RangeImage};
use crate::error::{Error, Result};

/// Supported bits per point.
pub const BPP_RANGE: RangeInclusive<u8> = 2..=16;

/// Uniform quantization of `(0, max_range]` onto codes `1..=2^bpp - 1`.
/// Empty cells map to code 0; ranges below the first step clamp to code 1.
pub fn quantize(ri: &RangeImage, bpp: u8) -> Result<QuantizedRangeImage> {
    if !BPP_RANGE.contains(&bpp) {
        return Err(Error::param("bpp", format!("{bpp} outside {BPP_RANGE:?}")));
    }
    let max = max_code(bpp);
    let levels = max as f64;
    let max_range = ri.model.max_range_m;
    let codes = ri
        .ranges
        .iter()
        .map(|&r| {
            if r > 0.0 {
                // f64::round rounds half away from zero.
                (r / max_range * levels).round().clamp(1.0, levels) as u16
            } else {
                0
            }
        })
        .collect();
    Ok(QuantizedRangeImage {
        model: ri.model,
        bpp,
        codes,
    })
}

/// Maps codes back to ranges at `code * max_range / (2^bpp - 1)`.
pub fn dequantize(qri: &QuantizedRangeImage) -> RangeImage {
    let levels = qri.max_code() as f64;
    let max_range = qri.model.max_range_m;
    let ranges = qri
        .codes
        .iter()
        .map(|&c| {
            if c == 0 {
                0.0
            } else {
                (c as f64 * max_range / levels).min(max_range)
            }
        })
        .collect();
    RangeImage {
        model: qri.model,
        ranges,
        dropped_points: 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::range_image::SensorModel;
    use proptest::prelude::*;

    fn image(ranges: Vec<f64>) -> RangeImage {
        let model = SensorModel::hdl64e().with_resolution(ranges.len(), 1);
        RangeImage { model, ranges, dropped_points: 0 }
    }

    #[test]
    fn full_scale_half_and_empty() {
        let q = quantize(&image(vec![120.0, 0.0, 60.0]), 8).unwrap();
        assert_eq!(q.codes, vec![255, 0, 128]);
        let back = dequantize(&q);
        assert_eq!(back.ranges[0], 120.0);
        assert_eq!(back.ranges[1], 0.0);
    }

    #[test]
    fn near_field_clamps_to_code_one() {
        let q = quantize(&image(vec![1e-6, 0.1]), 8).unwrap();
        assert_eq!(q.codes, vec![1, 1]);
    }

    #[test]
    fn bpp_out_of_range_is_a_parameter_error() {
        let ri = image(vec![1.0]);
        for bpp in [0, 1, 17, 32] {
            assert!(matches!(quantize(&ri, bpp), Err(Error::Parameter { name: "bpp", .. })));
        }
        assert_eq!(quantize(&ri, 16).unwrap().codes[0], 546);
    }

    #[test]
    fn every_code_roundtrips_for_every_depth() {
        for bpp in BPP_RANGE {
            let max = max_code(bpp);
            let codes: Vec<u16> = (0..=max).collect();
            let model = SensorModel::hdl64e().with_resolution(codes.len(), 1);
            let q = QuantizedRangeImage { model, bpp, codes };
            assert_eq!(quantize(&dequantize(&q), bpp).unwrap(), q, "bpp {bpp}");
        }
    }

    #[test]
    fn dense_scan_error_bound_8bpp() {
        // Step through (0, 120] in 1 mm increments.
        let ranges: Vec<f64> = (1..=120_000).map(|mm| mm as f64 / 1000.0).collect();
        let back = dequantize(&quantize(&image(ranges.clone()), 8).unwrap());
        let step = 120.0 / 255.0;
        for (r, d) in ranges.iter().zip(&back.ranges) {
            let err = (r - d).abs();
            assert!(err <= step, "{r}: {err}");
            if *r >= step / 2.0 {
                assert!(err <= step / 2.0 + 1e-12, "{r}: {err}");
            }
        }
    }

    proptest! {
        #[test]
        fn roundtrip_error_is_bounded(r in 1e-9f64..=120.0, bpp in 2u8..=16) {
            let q = quantize(&image(vec![r]), bpp).unwrap();
            let d = dequantize(&q).ranges[0];
            let step = 120.0 / max_code(bpp) as f64;
            prop_assert!((d - r).abs() <= step);
            if r >= step / 2.0 {
                prop_assert!((d - r).abs() <= step / 2.0 + 1e-12);
            }
        }
    }
}
