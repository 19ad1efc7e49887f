//! Direct O(n^2) discrete Fourier transform on uniform grids.
//!
//! Amplitude convention (one-sided): a pure `A*sin(2*pi*f*x)` sampled over
//! one period reports magnitude `A` at bin `f`. Reconstruction is
//! `y_j = sum_k m_k * cos(2*pi*f_k*x_j + phi_k)` over the one-sided bins,
//! and the mean-square signal energy is `m_0^2 + 0.5*sum_mid m_k^2 + m_ny^2`.
//! Spectra are reported in cycles per period: integer target frequencies
//! land on integer bins.

use serde::{Deserialize, Serialize};

use crate::error::{FinrError, Result};

pub const AMPLITUDE_CONVENTION: &str =
    "one-sided amplitude; sin of amplitude A reports magnitude A; y_j = sum m_k cos(2 pi f_k x_j + phi_k)";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumBin {
    pub freq: f64,
    pub magnitude: f64,
    pub phase: f64,
}

/// One-sided magnitude/phase spectrum of a uniformly sampled signal.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub grid_size: usize,
    pub convention: String,
    pub bins: Vec<SpectrumBin>,
}

impl SpectrumReport {
    /// Mean-square signal energy implied by the bins. Matches
    /// `(1/n) * sum y_j^2` by Parseval under the one-sided convention.
    pub fn mean_square_energy(&self) -> f64 {
        let n = self.grid_size;
        self.bins
            .iter()
            .enumerate()
            .map(|(k, b)| {
                let full_weight = k == 0 || (n % 2 == 0 && k == self.bins.len() - 1);
                if full_weight {
                    b.magnitude * b.magnitude
                } else {
                    0.5 * b.magnitude * b.magnitude
                }
            })
            .sum()
    }

    /// Magnitude at the bin nearest `freq` (cycles per period), or 0 if out
    /// of range.
    pub fn magnitude_at(&self, freq: f64) -> f64 {
        if self.bins.is_empty() {
            return 0.0;
        }
        let step = if self.bins.len() > 1 {
            self.bins[1].freq - self.bins[0].freq
        } else {
            1.0
        };
        let idx = ((freq - self.bins[0].freq) / step).round();
        if idx < 0.0 || idx as usize >= self.bins.len() {
            return 0.0;
        }
        self.bins[idx as usize].magnitude
    }

    /// Reconstruct the samples on the original grid.
    pub fn inverse(&self) -> Vec<f64> {
        let n = self.grid_size;
        let mut out = vec![0.0; n];
        for (k, bin) in self.bins.iter().enumerate() {
            for (j, y) in out.iter_mut().enumerate() {
                let arg = 2.0 * std::f64::consts::PI * k as f64 * j as f64 / n as f64 + bin.phase;
                *y += bin.magnitude * arg.cos();
            }
        }
        out
    }
}

/// Forward transform of samples taken on a uniform grid covering one period.
pub fn dft_uniform(samples: &[f64], domain_period: f64) -> Result<SpectrumReport> {
    let n = samples.len();
    if n < 2 {
        return Err(FinrError::invalid("dft_uniform needs at least 2 samples"));
    }
    if !(domain_period.is_finite() && domain_period > 0.0) {
        return Err(FinrError::invalid("domain_period must be positive"));
    }
    if !samples.iter().all(|v| v.is_finite()) {
        return Err(FinrError::NumericAbort("non-finite sample in dft input".into()));
    }
    let mut bins = Vec::with_capacity(n / 2 + 1);
    for k in 0..=n / 2 {
        let mut re = 0.0;
        let mut im = 0.0;
        for (j, &y) in samples.iter().enumerate() {
            let arg = -2.0 * std::f64::consts::PI * k as f64 * j as f64 / n as f64;
            re += y * arg.cos();
            im += y * arg.sin();
        }
        let two_sided_edge = k == 0 || (n % 2 == 0 && k == n / 2);
        let scale = if two_sided_edge { 1.0 / n as f64 } else { 2.0 / n as f64 };
        bins.push(SpectrumBin {
            freq: k as f64 / domain_period,
            magnitude: (re * re + im * im).sqrt() * scale,
            phase: im.atan2(re),
        });
    }
    Ok(SpectrumReport {
        grid_size: n,
        convention: AMPLITUDE_CONVENTION.to_string(),
        bins,
    })
}
