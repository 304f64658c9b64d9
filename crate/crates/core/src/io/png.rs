//! PNG decoding and encoding for [`RasterImage`].

use std::path::Path;

use image::{DynamicImage, ImageEncoder as _, ImageFormat};

use crate::error::{Error, Result};
use crate::vision::RasterImage;

/// Decodes a PNG. Gray and gray-alpha images become single-channel, all
/// others RGB; alpha is dropped and 16-bit samples are reduced to 8 bits.
pub fn load_png(path: &Path) -> Result<RasterImage> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let decoded = image::load_from_memory_with_format(&bytes, ImageFormat::Png).map_err(|source| Error::Image {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(from_dynamic(decoded))
}

fn from_dynamic(img: DynamicImage) -> RasterImage {
    let (w, h) = (img.width(), img.height());
    let gray = matches!(
        img,
        DynamicImage::ImageLuma8(_)
            | DynamicImage::ImageLumaA8(_)
            | DynamicImage::ImageLuma16(_)
            | DynamicImage::ImageLumaA16(_)
    );
    if gray {
        RasterImage::new(w, h, 1, img.into_luma8().into_raw()).expect("decoder dims")
    } else {
        RasterImage::new(w, h, 3, img.into_rgb8().into_raw()).expect("decoder dims")
    }
}

/// Encodes `img` and writes it to `path`.
pub fn save_png(path: &Path, img: &RasterImage) -> Result<()> {
    let bytes = encode_png(img).map_err(|source| Error::Image {
        path: path.to_path_buf(),
        source,
    })?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// In-memory PNG encoding; the output depends only on the pixels.
pub fn encode_png(img: &RasterImage) -> image::ImageResult<Vec<u8>> {
    let color = if img.channels() == 1 {
        image::ExtendedColorType::L8
    } else {
        image::ExtendedColorType::Rgb8
    };
    let mut out = Vec::new();
    image::codecs::png::PngEncoder::new(&mut out).write_image(img.data(), img.width(), img.height(), color)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rgb_and_gray_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let rgb = RasterImage::new(2, 1, 3, vec![1, 2, 3, 250, 128, 0]).unwrap();
        let gray = RasterImage::gray_from_fn(5, 3, |x, y| (x * 40 + y) as u8).unwrap();
        for (name, img) in [("rgb.png", &rgb), ("gray.png", &gray)] {
            let p = dir.path().join(name);
            save_png(&p, img).unwrap();
            assert_eq!(&load_png(&p).unwrap(), img);
        }
    }

    #[test]
    fn alpha_is_dropped() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("rgba.png");
        let rgba = image::RgbaImage::from_raw(1, 1, vec![10, 20, 30, 0]).unwrap();
        rgba.save(&p).unwrap();
        let img = load_png(&p).unwrap();
        assert_eq!((img.channels(), img.data()), (3, &[10u8, 20, 30][..]));
    }

    #[test]
    fn errors_carry_the_path() {
        let dir = tempfile::tempdir().unwrap();
        let missing = dir.path().join("nope.png");
        assert!(matches!(load_png(&missing), Err(Error::Io { .. })));
        let junk = dir.path().join("junk.png");
        std::fs::write(&junk, b"not a png").unwrap();
        let err = load_png(&junk).unwrap_err();
        assert!(matches!(err, Error::Image { .. }));
        assert!(err.to_string().contains("junk.png"));
    }

    #[test]
    fn encoding_is_deterministic() {
        let img = RasterImage::gray_from_fn(17, 9, |x, y| (x ^ y) as u8).unwrap();
        assert_eq!(encode_png(&img).unwrap(), encode_png(&img).unwrap());
    }
}
