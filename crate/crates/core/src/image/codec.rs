use std::io::Cursor;
use std::path::Path;

use image::codecs::png::PngEncoder;
use image::{ExtendedColorType, ImageEncoder, ImageError};

use super::{Image, ScalarMap};
use crate::error::{Error, Result};

/// Decodes a PNG or JPEG stream into linear `[0, 1]` samples (`s / 255`).
/// Grayscale is replicated across the three channels and alpha is dropped.
pub fn decode_image(bytes: &[u8]) -> Result<Image> {
    let format = image::guess_format(bytes).map_err(|e| decode_error("format detection", e))?;
    if !matches!(format, image::ImageFormat::Png | image::ImageFormat::Jpeg) {
        return Err(Error::Decode {
            stage: "format detection",
            message: format!("unsupported container {format:?}, expected PNG or JPEG"),
        });
    }
    let decoded = image::load_from_memory_with_format(bytes, format).map_err(|e| decode_error(stage_of(&e), e))?;
    let rgb = decoded.to_rgb8();
    let (width, height) = (rgb.width() as usize, rgb.height() as usize);
    let data = rgb.into_raw().into_iter().map(|v| f64::from(v) / 255.0).collect();
    Image::new(height, width, data).map_err(|e| Error::Decode { stage: "pixel conversion", message: e.to_string() })
}

fn stage_of(err: &ImageError) -> &'static str {
    match err {
        ImageError::Decoding(_) => "pixel decoding",
        ImageError::Limits(_) => "header (size limits)",
        ImageError::Unsupported(_) => "header (unsupported feature)",
        ImageError::Parameter(_) => "header",
        ImageError::IoError(_) => "stream read",
        ImageError::Encoding(_) => "decoding",
    }
}

fn decode_error(stage: &'static str, err: ImageError) -> Error {
    Error::Decode { stage, message: err.to_string() }
}

#[inline]
fn quantize(s: f64) -> u8 {
    (s * 255.0).round().clamp(0.0, 255.0) as u8
}

fn png_bytes(raw: &[u8], width: usize, height: usize, color: ExtendedColorType) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    PngEncoder::new(Cursor::new(&mut out))
        .write_image(raw, width as u32, height as u32, color)
        .map_err(|e| Error::Encode(e.to_string()))?;
    Ok(out)
}

/// Encodes as an 8-bit RGB PNG, quantizing with `round(s * 255)`.
pub fn encode_png(img: &Image) -> Result<Vec<u8>> {
    let raw: Vec<u8> = img.data().iter().map(|&s| quantize(s)).collect();
    png_bytes(&raw, img.width(), img.height(), ExtendedColorType::Rgb8)
}

/// Encodes a scalar map as an 8-bit grayscale PNG.
pub fn encode_gray_png(map: &ScalarMap) -> Result<Vec<u8>> {
    let raw: Vec<u8> = map.data().iter().map(|&s| quantize(s)).collect();
    png_bytes(&raw, map.width(), map.height(), ExtendedColorType::L8)
}

pub fn read_image(path: impl AsRef<Path>) -> Result<Image> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_image(&bytes)
}

pub fn write_png(img: &Image, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode_png(img)?).map_err(|e| Error::io(path, e))
}

pub fn write_gray_png(map: &ScalarMap, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode_gray_png(map)?).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn raw_png(raw: &[u8], w: usize, h: usize, color: ExtendedColorType) -> Vec<u8> {
        png_bytes(raw, w, h, color).unwrap()
    }

    #[test]
    fn red_pixel_decodes_to_unit_red() {
        let png = raw_png(&[255, 0, 0], 1, 1, ExtendedColorType::Rgb8);
        let img = decode_image(&png).unwrap();
        assert_eq!(img.data(), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn black_png_decodes_to_zeros() {
        let png = raw_png(&[0; 12], 2, 2, ExtendedColorType::Rgb8);
        let img = decode_image(&png).unwrap();
        assert_eq!(img.dims(), (2, 2));
        assert!(img.data().iter().all(|&s| s == 0.0));
    }

    #[test]
    fn gray_and_rgba_inputs() {
        let gray = decode_image(&raw_png(&[51, 204], 2, 1, ExtendedColorType::L8)).unwrap();
        assert_eq!(gray.pixel(0, 0), [0.2; 3]);
        assert_eq!(gray.pixel(0, 1), [0.8; 3]);

        let rgba = decode_image(&raw_png(&[255, 0, 255, 0], 1, 1, ExtendedColorType::Rgba8)).unwrap();
        assert_eq!(rgba.pixel(0, 0), [1.0, 0.0, 1.0]);
    }

    #[test]
    fn encode_white_and_half_gray() {
        let white = encode_png(&Image::filled(1, 1, [1.0; 3])).unwrap();
        let back = image::load_from_memory(&white).unwrap().to_rgb8();
        assert_eq!(back.as_raw(), &[255, 255, 255]);

        let gray = encode_png(&Image::filled(1, 1, [0.5; 3])).unwrap();
        let back = image::load_from_memory(&gray).unwrap().to_rgb8();
        assert_eq!(back.as_raw(), &[128, 128, 128]);
    }

    #[test]
    fn malformed_streams_name_the_stage() {
        match decode_image(b"definitely not an image") {
            Err(Error::Decode { stage, .. }) => assert_eq!(stage, "format detection"),
            other => panic!("unexpected {other:?}"),
        }
        let mut png = raw_png(&[10; 48], 4, 4, ExtendedColorType::Rgb8);
        png.truncate(png.len() / 2);
        match decode_image(&png) {
            Err(Error::Decode { stage, .. }) => assert_ne!(stage, "format detection"),
            other => panic!("unexpected {other:?}"),
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn png_round_trip_is_byte_identical(w in 1usize..12, h in 1usize..12, seed in any::<u64>()) {
            let raw: Vec<u8> = (0..w * h * 3)
                .map(|i| (seed.wrapping_mul(6364136223846793005).wrapping_add((i as u64).wrapping_mul(1442695040888963407)) >> 56) as u8)
                .collect();
            let png = raw_png(&raw, w, h, ExtendedColorType::Rgb8);
            let again = encode_png(&decode_image(&png).unwrap()).unwrap();
            prop_assert_eq!(again, png);
        }

        #[test]
        fn quantization_error_is_bounded(samples in proptest::collection::vec(0.0f64..=1.0, 3..=48)) {
            let n = samples.len() / 3;
            let img = Image::new(1, n, samples[..n * 3].to_vec()).unwrap();
            let back = decode_image(&encode_png(&img).unwrap()).unwrap();
            for (a, b) in img.data().iter().zip(back.data()) {
                prop_assert!((a - b).abs() <= 0.5 / 255.0 + 1e-12);
            }
        }
    }
}
