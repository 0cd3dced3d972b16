//! 8-bit rasters, PNM I/O, salt-and-pepper noise and the 3x3 weighted median
//! filter.

use crate::error::{Error, Result};
use crate::rng::MersenneTwister;
use crate::weighted::{weighted_percentile, weighted_percentile_oracle, WeightedSample};

/// Samples are stored channel by channel, each channel row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
    pub samples: Vec<u8>,
}

impl Raster {
    pub fn new(width: usize, height: usize, channels: usize, samples: Vec<u8>) -> Result<Self> {
        if channels != 1 && channels != 3 {
            return Err(Error::MalformedImage(format!("{channels} channels")));
        }
        if samples.len() != width * height * channels {
            return Err(Error::MalformedImage(format!(
                "{} samples for {width}x{height}x{channels}",
                samples.len()
            )));
        }
        Ok(Raster {
            width,
            height,
            channels,
            samples,
        })
    }

    pub fn filled(width: usize, height: usize, channels: usize, value: u8) -> Result<Self> {
        Raster::new(width, height, channels, vec![value; width * height * channels])
    }

    #[inline]
    pub fn index(&self, channel: usize, row: usize, col: usize) -> usize {
        (channel * self.height + row) * self.width + col
    }

    #[inline]
    pub fn get(&self, channel: usize, row: usize, col: usize) -> u8 {
        self.samples[self.index(channel, row, col)]
    }
}

/// 3x3 mask, row-major. Keeps the weights as given next to their
/// normalized form; the filter uses the former, so integer masks give exact
/// balance tests.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mask3 {
    raw: [f64; 9],
    weights: [f64; 9],
}

impl Mask3 {
    pub fn new(weights: [f64; 9]) -> Result<Self> {
        let mut total = 0.0;
        for (row, &w) in weights.iter().enumerate() {
            if !(w >= 0.0) {
                return Err(Error::NegativeWeight { row, weight: w });
            }
            total += w;
        }
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::ZeroTotalWeight);
        }
        Ok(Mask3 {
            raw: weights,
            weights: weights.map(|w| w / total),
        })
    }

    /// Wiener-like mask `[10 12 9; 12 19 12; 9 12 10]`.
    pub fn wiener() -> Self {
        Mask3::new([10., 12., 9., 12., 19., 12., 9., 12., 10.]).expect("valid mask")
    }

    /// Normalized weights, summing to 1.
    pub fn weights(&self) -> &[f64; 9] {
        &self.weights
    }

    pub fn raw_weights(&self) -> &[f64; 9] {
        &self.raw
    }
}

impl Default for Mask3 {
    fn default() -> Self {
        Mask3::wiener()
    }
}

/// Sets each sample to 0 with probability `pnoise / 2` and to 255 with
/// probability `pnoise / 2`, one uniform per sample in storage order.
pub fn add_salt_pepper(raster: &Raster, pnoise: f64, rng: &mut MersenneTwister) -> Result<Raster> {
    if !(0.0..=1.0).contains(&pnoise) {
        return Err(Error::InvalidParameter(format!("noise fraction {pnoise} outside [0, 1]")));
    }
    let mut out = raster.clone();
    for s in out.samples.iter_mut() {
        let u = rng.next_uniform();
        if u < pnoise / 2.0 {
            *s = 0;
        } else if u < pnoise {
            *s = 255;
        }
    }
    Ok(out)
}

fn check_size(raster: &Raster) -> Result<()> {
    if raster.width < 3 || raster.height < 3 {
        return Err(Error::UndersizedRaster {
            width: raster.width,
            height: raster.height,
        });
    }
    Ok(())
}

fn filter_with<F>(raster: &Raster, mask: &Mask3, mut median: F) -> Result<Raster>
where
    F: FnMut(&[f64; 9], &[f64; 9]) -> Result<f64>,
{
    check_size(raster)?;
    let mut out = raster.clone();
    let mut values = [0.0; 9];
    for c in 0..raster.channels {
        for r in 1..raster.height - 1 {
            for col in 1..raster.width - 1 {
                for dr in 0..3 {
                    for dc in 0..3 {
                        values[dr * 3 + dc] = raster.get(c, r + dr - 1, col + dc - 1) as f64;
                    }
                }
                let v = median(&values, mask.raw_weights())?;
                let i = out.index(c, r, col);
                out.samples[i] = v as u8;
            }
        }
    }
    Ok(out)
}

/// Replaces every interior sample by the lower weighted median of its 3x3
/// neighbourhood; the one-pixel border is copied unchanged.
pub fn weighted_median_filter(raster: &Raster, mask: &Mask3) -> Result<Raster> {
    filter_with(raster, mask, |values, weights| {
        let mut s = WeightedSample {
            values: values.to_vec(),
            weights: weights.to_vec(),
            p: 0.5,
        };
        Ok(weighted_percentile(&mut s)?.value)
    })
}

/// [`weighted_median_filter`] computed by sorting each neighbourhood.
pub fn weighted_median_filter_oracle(raster: &Raster, mask: &Mask3) -> Result<Raster> {
    filter_with(raster, mask, |values, weights| {
        weighted_percentile_oracle(values, weights, 0.5)
    })
}

/// Header tokens up to and including maxval, skipping `#` comments. Returns
/// the tokens and the offset just past the single whitespace byte that
/// follows maxval.
fn read_header(bytes: &[u8]) -> Result<(Vec<String>, usize)> {
    let mut tokens = Vec::new();
    let mut i = 0;
    while tokens.len() < 4 {
        while i < bytes.len() && (bytes[i].is_ascii_whitespace() || bytes[i] == b'#') {
            if bytes[i] == b'#' {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            } else {
                i += 1;
            }
        }
        if i >= bytes.len() {
            return Err(Error::MalformedImage("truncated header".into()));
        }
        let start = i;
        while i < bytes.len() && !bytes[i].is_ascii_whitespace() && bytes[i] != b'#' {
            i += 1;
        }
        tokens.push(String::from_utf8_lossy(&bytes[start..i]).into_owned());
    }
    if i >= bytes.len() || !bytes[i].is_ascii_whitespace() {
        // a plain file may end right after maxval only if it has no pixels
        return Ok((tokens, bytes.len()));
    }
    Ok((tokens, i + 1))
}

fn parse_dim(token: &str, what: &str) -> Result<usize> {
    token
        .parse::<usize>()
        .map_err(|_| Error::MalformedImage(format!("bad {what}: {token:?}")))
}

/// Decodes P2, P3, P5 or P6 with maxval 255.
pub fn read_pnm(bytes: &[u8]) -> Result<Raster> {
    let (header, offset) = read_header(bytes)?;
    let (channels, binary) = match header[0].as_str() {
        "P2" => (1, false),
        "P3" => (3, false),
        "P5" => (1, true),
        "P6" => (3, true),
        other => return Err(Error::MalformedImage(format!("unsupported magic {other:?}"))),
    };
    let width = parse_dim(&header[1], "width")?;
    let height = parse_dim(&header[2], "height")?;
    let maxval = parse_dim(&header[3], "maxval")?;
    if maxval != 255 {
        return Err(Error::MalformedImage(format!("maxval {maxval}, expected 255")));
    }
    let count = width * height * channels;
    let interleaved: Vec<u8> = if binary {
        let payload = &bytes[offset.min(bytes.len())..];
        if payload.len() < count {
            return Err(Error::MalformedImage(format!(
                "payload has {} bytes, expected {count}",
                payload.len()
            )));
        }
        payload[..count].to_vec()
    } else {
        let text = std::str::from_utf8(&bytes[offset.min(bytes.len())..])
            .map_err(|_| Error::MalformedImage("non-ASCII plain payload".into()))?;
        let mut out = Vec::with_capacity(count);
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("");
            for tok in line.split_ascii_whitespace() {
                let v: u16 = tok
                    .parse()
                    .map_err(|_| Error::MalformedImage(format!("bad sample {tok:?}")))?;
                if v > 255 {
                    return Err(Error::MalformedImage(format!("sample {v} above maxval")));
                }
                out.push(v as u8);
            }
        }
        if out.len() < count {
            return Err(Error::MalformedImage(format!(
                "payload has {} samples, expected {count}",
                out.len()
            )));
        }
        out.truncate(count);
        out
    };
    let plane = width * height;
    let mut samples = vec![0u8; count];
    for (pixel, chunk) in interleaved.chunks_exact(channels).enumerate() {
        for (c, &v) in chunk.iter().enumerate() {
            samples[c * plane + pixel] = v;
        }
    }
    Raster::new(width, height, channels, samples)
}

/// Encodes as P5/P6 when `binary`, else P2/P3. No comments are written.
pub fn write_pnm(raster: &Raster, binary: bool) -> Vec<u8> {
    let magic = match (raster.channels, binary) {
        (1, false) => "P2",
        (3, false) => "P3",
        (1, true) => "P5",
        _ => "P6",
    };
    let mut out = format!("{magic}\n{} {}\n255\n", raster.width, raster.height).into_bytes();
    let plane = raster.width * raster.height;
    let interleaved = (0..plane).flat_map(|p| (0..raster.channels).map(move |c| c * plane + p));
    if binary {
        out.extend(interleaved.map(|i| raster.samples[i]));
    } else {
        let per_row = raster.width * raster.channels;
        for (n, i) in interleaved.enumerate() {
            out.extend_from_slice(raster.samples[i].to_string().as_bytes());
            out.push(if (n + 1) % per_row == 0 { b'\n' } else { b' ' });
        }
    }
    out
}

/// Smooth diagonal gradient fixture.
pub fn gradient(width: usize, height: usize, channels: usize) -> Raster {
    let mut samples = Vec::with_capacity(width * height * channels);
    for c in 0..channels {
        for r in 0..height {
            for col in 0..width {
                let t = (r + col) as f64 / (width + height).max(2) as f64;
                samples.push((20.0 + 200.0 * t + 5.0 * c as f64).round() as u8);
            }
        }
    }
    Raster {
        width,
        height,
        channels,
        samples,
    }
}

/// Interior samples equal to 0 or 255.
pub fn count_interior_extremes(raster: &Raster) -> usize {
    let mut n = 0;
    for c in 0..raster.channels {
        for r in 1..raster.height.saturating_sub(1) {
            for col in 1..raster.width.saturating_sub(1) {
                let v = raster.get(c, r, col);
                n += (v == 0 || v == 255) as usize;
            }
        }
    }
    n
}
