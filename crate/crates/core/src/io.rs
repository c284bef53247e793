//! Binary PPM (P6, 8-bit) and PFM (little-endian RGB float) images.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::image::{Framebuffer, Rgb, TransferFunction};
use crate::real::Real;

/// P6 bytes: each channel is `round(encode(clamp(v)) * 255)`.
pub fn ppm_bytes<T: Real>(fb: &Framebuffer<T>, tf: &TransferFunction<T>) -> Result<Vec<u8>> {
    let mut out = format!("P6\n{} {}\n255\n", fb.width(), fb.height()).into_bytes();
    out.extend(fb.encoded_bytes(tf)?);
    Ok(out)
}

/// PFM bytes with scale -1.0 (little-endian); rows are stored bottom to top.
pub fn pfm_bytes<T: Real>(fb: &Framebuffer<T>) -> Vec<u8> {
    let mut out = format!("PF\n{} {}\n-1.0\n", fb.width(), fb.height()).into_bytes();
    out.reserve(fb.width() * fb.height() * 12);
    for y in (0..fb.height()).rev() {
        for x in 0..fb.width() {
            for v in fb.get(x, y).channels() {
                out.extend_from_slice(&(v.to_f64_lossy() as f32).to_le_bytes());
            }
        }
    }
    out
}

pub fn write_image<T: Real>(
    fb: &Framebuffer<T>,
    tf: &TransferFunction<T>,
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, ppm_bytes(fb, tf)?).map_err(|e| Error::io(path, e))
}

pub fn write_linear<T: Real>(fb: &Framebuffer<T>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, pfm_bytes(fb)).map_err(|e| Error::io(path, e))
}

/// 8-bit RGB image as read back from a P6 file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rgb8Image {
    pub width: usize,
    pub height: usize,
    pub data: Vec<u8>,
}

impl Rgb8Image {
    pub fn get(&self, x: usize, y: usize) -> [u8; 3] {
        let i = 3 * (y * self.width + x);
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }
}

/// Splits the next whitespace-delimited header token off `buf`, skipping `#` comments.
fn header_token<'a>(buf: &'a [u8], pos: &mut usize) -> Option<&'a str> {
    loop {
        while *pos < buf.len() && buf[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < buf.len() && buf[*pos] == b'#' {
            while *pos < buf.len() && buf[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < buf.len() && !buf[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    std::str::from_utf8(&buf[start..*pos]).ok().filter(|s| !s.is_empty())
}

fn malformed(path: &Path, reason: impl Into<String>) -> Error {
    Error::MalformedImage {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

struct Header {
    magic: String,
    width: usize,
    height: usize,
    third: String,
    data_start: usize,
}

fn parse_header(buf: &[u8], path: &Path) -> Result<Header> {
    let mut pos = 0;
    let mut next = |what: &str| {
        header_token(buf, &mut pos)
            .map(str::to_owned)
            .ok_or_else(|| malformed(path, format!("missing {what}")))
    };
    let magic = next("magic number")?;
    let width = next("width")?
        .parse()
        .map_err(|_| malformed(path, "bad width"))?;
    let height = next("height")?
        .parse()
        .map_err(|_| malformed(path, "bad height"))?;
    let third = next("maxval/scale")?;
    // Exactly one whitespace byte separates the header from the raster.
    Ok(Header {
        magic,
        width,
        height,
        third,
        data_start: pos + 1,
    })
}

pub fn read_ppm(path: impl AsRef<Path>) -> Result<Rgb8Image> {
    let path = path.as_ref();
    let buf = fs::read(path).map_err(|e| Error::io(path, e))?;
    let h = parse_header(&buf, path)?;
    if h.magic != "P6" {
        return Err(malformed(path, format!("expected P6, found {}", h.magic)));
    }
    if h.third != "255" {
        return Err(malformed(path, "only maxval 255 is supported"));
    }
    let len = h.width * h.height * 3;
    let data = buf
        .get(h.data_start..h.data_start + len)
        .ok_or_else(|| malformed(path, "truncated raster"))?
        .to_vec();
    Ok(Rgb8Image {
        width: h.width,
        height: h.height,
        data,
    })
}

pub fn read_pfm<T: Real>(path: impl AsRef<Path>) -> Result<Framebuffer<T>> {
    let path = path.as_ref();
    let buf = fs::read(path).map_err(|e| Error::io(path, e))?;
    let h = parse_header(&buf, path)?;
    if h.magic != "PF" {
        return Err(malformed(path, format!("expected PF, found {}", h.magic)));
    }
    let scale: f32 = h
        .third
        .parse()
        .map_err(|_| malformed(path, "bad scale"))?;
    let little_endian = scale < 0.0;
    let len = h.width * h.height * 12;
    let raster = buf
        .get(h.data_start..h.data_start + len)
        .ok_or_else(|| malformed(path, "truncated raster"))?;
    let floats: Vec<f32> = raster
        .chunks_exact(4)
        .map(|c| {
            let b = [c[0], c[1], c[2], c[3]];
            if little_endian {
                f32::from_le_bytes(b)
            } else {
                f32::from_be_bytes(b)
            }
        })
        .collect();
    let mut pixels = vec![Rgb::black(); h.width * h.height];
    for (row, chunk) in floats.chunks_exact(h.width * 3).enumerate() {
        let y = h.height - 1 - row;
        for x in 0..h.width {
            let c = &chunk[3 * x..3 * x + 3];
            pixels[y * h.width + x] =
                Rgb::new(T::of(c[0] as f64), T::of(c[1] as f64), T::of(c[2] as f64));
        }
    }
    Framebuffer::from_pixels(h.width, h.height, pixels)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Framebuffer<f64> {
        let mut fb = Framebuffer::new(3, 2);
        fb.set(0, 0, Rgb::new(0.0, 0.5, 1.0));
        fb.set(2, 1, Rgb::new(2.5, 0.25, 0.125));
        fb.set(1, 1, Rgb::gray(0.75));
        fb
    }

    #[test]
    fn ppm_header_and_payload() {
        let bytes = ppm_bytes(&sample(), &TransferFunction::Identity).unwrap();
        assert!(bytes.starts_with(b"P6\n3 2\n255\n"));
        assert_eq!(bytes.len(), 11 + 18);
        assert_eq!(&bytes[11..14], &[0, 128, 255]);
    }

    #[test]
    fn files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let fb = sample();
        let tf = TransferFunction::PowerLaw { gamma: 2.2 };
        write_image(&fb, &tf, dir.path().join("a.ppm")).unwrap();
        write_linear(&fb, dir.path().join("a.pfm")).unwrap();

        let ppm = read_ppm(dir.path().join("a.ppm")).unwrap();
        assert_eq!(ppm.data, fb.encoded_bytes(&tf).unwrap());

        let back: Framebuffer<f64> = read_pfm(dir.path().join("a.pfm")).unwrap();
        assert_eq!(back.get(2, 1), Rgb::new(2.5, 0.25, 0.125));
        assert!(back.is_overflowed(2, 1));
        assert_eq!(back.get(0, 0), fb.get(0, 0));
    }

    #[test]
    fn io_errors_carry_the_path() {
        let err = write_linear(&sample(), "/nonexistent-dir/x.pfm").unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/x.pfm"));
        let err = read_ppm("/nonexistent-dir/x.ppm").unwrap_err();
        assert!(err.to_string().contains("x.ppm"));
    }

    #[test]
    fn rejects_wrong_magic() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.ppm");
        fs::write(&p, b"P3\n1 1\n255\n0 0 0\n").unwrap();
        assert!(matches!(read_ppm(&p), Err(Error::MalformedImage { .. })));
    }
}
