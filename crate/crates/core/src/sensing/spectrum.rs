//! Periodogram of evenly sampled series and spectral peak picking.

use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::Complex;

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// Bin frequencies `k / (L dt)` for `k = 0..=L/2` (Hz when `dt` is in s).
    pub freqs: Vec<f64>,
    /// `|X_k|` of the mean-subtracted series.
    pub magnitude: Vec<f64>,
    /// Spacing of the frequency bins.
    pub resolution: f64,
}

impl Spectrum {
    /// Frequency of the largest non-DC bin.
    pub fn peak(&self) -> Option<f64> {
        self.peak_bin().map(|k| self.freqs[k])
    }

    pub fn peak_bin(&self) -> Option<usize> {
        self.magnitude
            .iter()
            .enumerate()
            .skip(1)
            .fold(None, |best: Option<(usize, f64)>, (k, &m)| match best {
                Some((_, bm)) if bm >= m => best,
                _ => Some((k, m)),
            })
            .map(|(k, _)| k)
    }

    /// Full width at half maximum of the peak in Hz, by linear interpolation
    /// between bins. `None` if the peak touches the ends of the spectrum.
    pub fn peak_width(&self) -> Option<f64> {
        let k = self.peak_bin()?;
        let half = self.magnitude[k] / 2.0;
        let mut lo = k;
        while lo > 0 && self.magnitude[lo] > half {
            lo -= 1;
        }
        let mut hi = k;
        while hi + 1 < self.magnitude.len() && self.magnitude[hi] > half {
            hi += 1;
        }
        if self.magnitude[lo] > half || self.magnitude[hi] > half {
            return None;
        }
        let cross = |a: usize, b: usize| {
            let (ma, mb) = (self.magnitude[a], self.magnitude[b]);
            let t = if (mb - ma).abs() > 0.0 { (half - ma) / (mb - ma) } else { 0.0 };
            self.freqs[a] + t * (self.freqs[b] - self.freqs[a])
        };
        Some(cross(hi, hi - 1) - cross(lo, lo + 1))
    }
}

/// Rectangular-window periodogram of `series - mean(series)`, zero-padded to
/// `pad_to` samples when that exceeds the series length.
pub fn periodogram(series: &[f64], dt: f64, pad_to: Option<usize>) -> Result<Spectrum> {
    if series.len() < 2 {
        return Err(Error::argument("spectrum needs at least two samples"));
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::argument(format!("sample spacing must be positive, got {dt}")));
    }
    let len = pad_to.map_or(series.len(), |p| p.max(series.len()));
    let mean = series.iter().sum::<f64>() / series.len() as f64;
    let mut buf: Vec<Complex> = series.iter().map(|&x| Complex::new(x - mean, 0.0)).collect();
    buf.resize(len, Complex::new(0.0, 0.0));
    FftPlanner::<f64>::new().plan_fft_forward(len).process(&mut buf);
    let bins = len / 2 + 1;
    let resolution = 1.0 / (len as f64 * dt);
    Ok(Spectrum {
        freqs: (0..bins).map(|k| k as f64 * resolution).collect(),
        magnitude: buf[..bins].iter().map(|z| z.norm()).collect(),
        resolution,
    })
}
