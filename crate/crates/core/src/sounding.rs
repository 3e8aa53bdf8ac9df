//! Frequency-domain sounding math: sweep geometry, windowing, CFR ↔ CIR
//! transforms, reference-based inverse filtering, and time gating.
//!
//! A sounder steps a tone across a band and records the complex channel
//! frequency response (CFR) on a uniform grid. Everything downstream — delay
//! resolution, maximum unambiguous delay, the impulse-response sample grid —
//! follows from that grid's geometry, so it gets its own type.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform frequency grid of a sweep.
///
/// `n_points` samples starting at `f_min`, spaced by `(f_max − f_min) /
/// n_points`; the upper band edge is exclusive, so the grid covers
/// `[f_min, f_max − Δf]`. With this convention the maximum unambiguous delay
/// is exactly `n_points / bandwidth`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepGeometry {
    pub f_min: f64,
    pub f_max: f64,
    pub n_points: usize,
}

impl SweepGeometry {
    pub fn new(f_min: f64, f_max: f64, n_points: usize) -> Result<Self> {
        if f_max <= f_min {
            return Err(Error::NonPositiveBandwidth { f_min, f_max });
        }
        if n_points < 2 {
            return Err(Error::TooFewPoints(n_points));
        }
        Ok(Self {
            f_min,
            f_max,
            n_points,
        })
    }

    /// Swept bandwidth `B_w = f_max − f_min` in Hz.
    pub fn bandwidth(&self) -> f64 {
        self.f_max - self.f_min
    }

    /// Frequency step `Δf = B_w / n_points` in Hz.
    pub fn spacing(&self) -> f64 {
        self.bandwidth() / self.n_points as f64
    }

    /// Delay resolution `1 / B_w` in seconds: the CIR sample period.
    pub fn tau_res(&self) -> f64 {
        1.0 / self.bandwidth()
    }

    /// Maximum unambiguous delay `1 / Δf = n_points / B_w` in seconds.
    pub fn tau_max(&self) -> f64 {
        self.n_points as f64 / self.bandwidth()
    }

    /// Frequency of grid point `i`.
    pub fn frequency(&self, i: usize) -> f64 {
        self.f_min + i as f64 * self.spacing()
    }

    /// True when two grids agree within `tol` relative error on the band
    /// edges and exactly on the point count.
    pub fn matches(&self, other: &Self, tol: f64) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0);
        self.n_points == other.n_points && close(self.f_min, other.f_min) && close(self.f_max, other.f_max)
    }
}

impl std::fmt::Display for SweepGeometry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{} Hz, {} Hz) x {} points",
            self.f_min, self.f_max, self.n_points
        )
    }
}

/// A complex frequency sweep: one CFR record on a uniform grid.
///
/// The same type carries measured responses, free-space references, and
/// inverse-filtered quotients; `label` tells them apart.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencySweep {
    pub geometry: SweepGeometry,
    pub samples: Vec<Complex64>,
    pub label: String,
}

impl FrequencySweep {
    pub fn new(geometry: SweepGeometry, samples: Vec<Complex64>, label: impl Into<String>) -> Result<Self> {
        if samples.len() != geometry.n_points {
            return Err(Error::SampleCountMismatch {
                samples: samples.len(),
                points: geometry.n_points,
            });
        }
        Ok(Self {
            geometry,
            samples,
            label: label.into(),
        })
    }
}

/// Spectral window applied to a sweep before transforming to the time domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Window {
    Hann,
    None,
}

impl std::str::FromStr for Window {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "hann" => Ok(Window::Hann),
            "none" => Ok(Window::None),
            other => Err(format!("unknown window {other:?}; expected hann or none")),
        }
    }
}

/// Hann coefficient `w_i = 0.5(1 − cos(2πi/(n−1)))` for an n-point window.
fn hann_coefficient(i: usize, n: usize) -> f64 {
    if n == 1 {
        return 1.0;
    }
    0.5 * (1.0 - (2.0 * std::f64::consts::PI * i as f64 / (n - 1) as f64).cos())
}

/// Multiplies a sweep by the chosen window, sample by sample.
pub fn apply_window(sweep: &FrequencySweep, window: Window) -> FrequencySweep {
    let mut out = sweep.clone();
    if let Window::Hann = window {
        let n = out.samples.len();
        for (i, s) in out.samples.iter_mut().enumerate() {
            *s *= hann_coefficient(i, n);
        }
    }
    out
}

/// Default regularization floor for [`inverse_filter`], relative to the
/// reference's peak magnitude.
pub const DEFAULT_INVERSE_FLOOR: f64 = 1e-6;

/// Per-bin division of a measured sweep by a reference sweep.
///
/// Removes the measurement-system and antenna response: the reference is a
/// recording of the same sounder cascade over a known (free-space) link, so
/// the quotient isolates the channel under test. Bins where the reference
/// magnitude falls below `floor` times its peak are divided by the reference
/// scaled up to that floor magnitude (phase preserved), which bounds noise
/// amplification at reference-spectrum nulls without touching
/// well-conditioned bins. An exactly-zero reference bin has no phase and is
/// divided by the positive real floor.
pub fn inverse_filter(
    measured: &FrequencySweep,
    reference: &FrequencySweep,
    floor: f64,
) -> Result<FrequencySweep> {
    if !measured.geometry.matches(&reference.geometry, 1e-6) {
        return Err(Error::GeometryMismatch {
            left: measured.geometry.to_string(),
            right: reference.geometry.to_string(),
        });
    }
    let peak = reference.samples.iter().map(|s| s.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return Err(Error::ZeroReference);
    }
    let clamp = floor * peak;
    let samples = measured
        .samples
        .iter()
        .zip(&reference.samples)
        .map(|(&r, &d)| {
            let mag = d.norm();
            let divisor = if mag >= clamp {
                d
            } else if mag > 0.0 {
                d * (clamp / mag)
            } else {
                Complex64::new(clamp, 0.0)
            };
            r / divisor
        })
        .collect();
    FrequencySweep::new(measured.geometry, samples, measured.label.clone())
}

/// Uniformly sampled complex time-domain channel: the CIR.
///
/// `samples[i]` sits at time `t0 + i·sample_period`, both in seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpulseResponse {
    pub sample_period: f64,
    pub t0: f64,
    pub samples: Vec<Complex64>,
}

impl ImpulseResponse {
    pub fn new(sample_period: f64, t0: f64, samples: Vec<Complex64>) -> Result<Self> {
        if !(sample_period > 0.0) {
            return Err(Error::NonPositiveSamplePeriod(sample_period));
        }
        if samples.is_empty() {
            return Err(Error::ZeroImpulseResponse);
        }
        Ok(Self {
            sample_period,
            t0,
            samples,
        })
    }

    /// Time of sample `i` in seconds.
    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.sample_period
    }

    /// Linear power `|h_i|²` of sample `i`.
    pub fn power(&self, i: usize) -> f64 {
        self.samples[i].norm_sqr()
    }

    /// Sum of `|h_i|²` over all samples.
    pub fn total_power(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum()
    }

    /// Largest sample power.
    pub fn peak_power(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).fold(0.0, f64::max)
    }
}

/// Inverse discrete Fourier transform of a (windowed) sweep.
///
/// Uses the 1/N inverse-DFT convention, so [`cir_to_cfr`] followed by this is
/// the identity and Parseval reads `Σ|h_k|² = (1/N)·Σ|H_i|²`. The output grid
/// has `n_points` samples spaced by the sweep's delay resolution, starting at
/// t = 0.
pub fn cfr_to_cir(sweep: &FrequencySweep, window: Window) -> ImpulseResponse {
    let windowed = apply_window(sweep, window);
    let n = windowed.samples.len();
    let mut buf = windowed.samples;
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    for s in &mut buf {
        *s *= scale;
    }
    ImpulseResponse {
        sample_period: sweep.geometry.tau_res(),
        t0: 0.0,
        samples: buf,
    }
}

/// Forward discrete Fourier transform of a CIR, the inverse of [`cfr_to_cir`].
///
/// `f_min` only labels the resulting grid (the transform itself is
/// index-based); pass the band start of the sweep the CIR came from, or 0 for
/// synthetic data.
pub fn cir_to_cfr(cir: &ImpulseResponse, f_min: f64) -> FrequencySweep {
    let n = cir.samples.len();
    let mut buf = cir.samples.clone();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let bandwidth = 1.0 / cir.sample_period;
    FrequencySweep {
        geometry: SweepGeometry {
            f_min,
            f_max: f_min + bandwidth,
            n_points: n,
        },
        samples: buf,
        label: String::new(),
    }
}

/// Zeroes every sample whose time lies outside `[t_start, t_stop)`.
///
/// Grid, length, and origin are preserved, so gating twice with the same gate
/// equals gating once.
pub fn time_gate(cir: &ImpulseResponse, t_start: f64, t_stop: f64) -> Result<ImpulseResponse> {
    if t_start >= t_stop {
        return Err(Error::EmptyGate {
            start: t_start,
            stop: t_stop,
        });
    }
    let mut out = cir.clone();
    for (i, s) in out.samples.iter_mut().enumerate() {
        let t = cir.time(i);
        if t < t_start || t >= t_stop {
            *s = Complex64::new(0.0, 0.0);
        }
    }
    Ok(out)
}
