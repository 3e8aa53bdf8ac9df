//! OFDM link design and simulation: the design-rule calculator (cyclic
//! prefix, coherence time, subcarrier-width constraints), rate/latency/
//! efficiency arithmetic, and an uncoded BPSK-OFDM Monte Carlo BER simulator
//! with perfect-CSI one-tap zero-forcing equalization.
//!
//! The simulator runs the literal chain — modulate, inverse transform,
//! prepend cyclic prefix, convolve with the channel, add noise, strip,
//! transform, equalize, decide — rather than a per-bin shortcut, so the
//! cyclic-prefix and guard-band overheads show up in the energy accounting
//! exactly the way they do on the air.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::profile::MultipathProfile;
use crate::rng::{substream, STREAM_BER};
use crate::sounding::ImpulseResponse;
use crate::synthesis::{rayleigh_taps, Realization};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// One OFDM numerology: transform size, cyclic prefix, used subcarriers,
/// modulation order and bandwidth. The sample period is 1/bandwidth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OfdmConfig {
    /// Transform size N.
    pub n_fft: usize,
    /// Cyclic prefix length N_cp, in samples.
    pub n_cp: usize,
    /// Occupied (data-carrying) subcarriers N_u ≤ N.
    pub n_user: usize,
    /// Bits per constellation symbol l (M = 2^l). Only l = 1 (BPSK) is
    /// simulated; the field exists so designs can state their target.
    pub bits_per_symbol: u32,
    /// Occupied bandwidth B_w, Hz.
    pub bandwidth: f64,
    /// Reserved: fraction of N_u set aside for pilots. Unused — with perfect
    /// receiver channel knowledge pilots carry data like any other symbol.
    #[serde(default)]
    pub pilot_fraction: f64,
}

impl OfdmConfig {
    pub fn new(
        n_fft: usize,
        n_cp: usize,
        n_user: usize,
        bits_per_symbol: u32,
        bandwidth: f64,
    ) -> Result<Self> {
        if n_fft == 0 {
            return Err(Error::InvalidOfdmConfig("N must be at least 1".into()));
        }
        if n_user == 0 || n_user > n_fft {
            return Err(Error::InvalidOfdmConfig(format!(
                "N_u must satisfy 1 <= N_u <= N, got N_u = {n_user} with N = {n_fft}"
            )));
        }
        if bits_per_symbol == 0 {
            return Err(Error::InvalidOfdmConfig("l must be at least 1".into()));
        }
        if !(bandwidth > 0.0) {
            return Err(Error::InvalidOfdmConfig(format!(
                "bandwidth must be positive, got {bandwidth} Hz"
            )));
        }
        Ok(Self {
            n_fft,
            n_cp,
            n_user,
            bits_per_symbol,
            bandwidth,
            pilot_fraction: 0.0,
        })
    }

    /// Guard subcarriers 2·N_guard = N − N_u, split across both band edges.
    pub fn n_guard_total(&self) -> usize {
        self.n_fft - self.n_user
    }

    /// Sample period T_s = 1/B_w, seconds.
    pub fn sample_period(&self) -> f64 {
        1.0 / self.bandwidth
    }

    /// Bandwidth efficiency κ = l·N_u/(N_cp + N), bits/s/Hz. Always in
    /// (0, l]: the cyclic prefix and guards only subtract.
    pub fn kappa(&self) -> f64 {
        self.bits_per_symbol as f64 * self.n_user as f64 / (self.n_cp + self.n_fft) as f64
    }
}

/// What the channel demands of a design: its length and the Doppler spread.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignEnvelope {
    /// Channel length t_max, seconds.
    pub t_max: f64,
    /// Doppler spread Δf_D, Hz.
    pub doppler_hz: f64,
}

impl DesignEnvelope {
    /// Builds the envelope from a relative speed: Δf_D = ν·f_c/c.
    pub fn from_speed(t_max: f64, speed_mps: f64, carrier_hz: f64) -> Self {
        Self {
            t_max,
            doppler_hz: doppler(speed_mps, carrier_hz),
        }
    }
}

/// Numeric operationalization of the design rules' "much less/greater than".
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckThresholds {
    /// Pass when (N + N_cp)·Δf_D·T_s does not exceed this.
    pub doppler_max: f64,
    /// Soft rule: N should be at least this multiple of B_w·t_max.
    pub subcarrier_min_ratio: f64,
}

impl Default for CheckThresholds {
    fn default() -> Self {
        Self {
            doppler_max: 0.1,
            subcarrier_min_ratio: 1.5,
        }
    }
}

/// Margins of the three design rules for one (config, envelope) pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignCheck {
    /// N_cp·T_s ≥ t_max: the cyclic prefix covers the channel. Equality
    /// passes with zero margin.
    pub cp_ok: bool,
    /// N_cp·T_s − t_max, seconds.
    pub cp_margin_s: f64,
    /// (N + N_cp)·Δf_D·T_s, the block-duration-to-coherence-time product.
    pub doppler_product: f64,
    pub doppler_ok: bool,
    /// N/(B_w·t_max); infinite for a zero-length channel.
    pub subcarrier_ratio: f64,
    /// Soft rule — published designs sit near ratio 1.6, so a miss is a
    /// warning, not a failure.
    pub subcarriers_ok: bool,
}

impl DesignCheck {
    /// True when both hard rules (prefix coverage, coherence time) pass.
    pub fn hard_pass(&self) -> bool {
        self.cp_ok && self.doppler_ok
    }
}

/// Checks a design against its envelope with the default thresholds.
pub fn check_design(cfg: &OfdmConfig, env: &DesignEnvelope) -> DesignCheck {
    check_design_with(cfg, env, &CheckThresholds::default())
}

pub fn check_design_with(
    cfg: &OfdmConfig,
    env: &DesignEnvelope,
    thresholds: &CheckThresholds,
) -> DesignCheck {
    let ts = cfg.sample_period();
    let cp_margin_s = cfg.n_cp as f64 * ts - env.t_max;
    let doppler_product = (cfg.n_fft + cfg.n_cp) as f64 * env.doppler_hz * ts;
    let denominator = cfg.bandwidth * env.t_max;
    let subcarrier_ratio = if denominator > 0.0 {
        cfg.n_fft as f64 / denominator
    } else {
        f64::INFINITY
    };
    DesignCheck {
        cp_ok: cp_margin_s >= 0.0,
        cp_margin_s,
        doppler_product,
        doppler_ok: doppler_product <= thresholds.doppler_max,
        subcarrier_ratio,
        subcarriers_ok: subcarrier_ratio >= thresholds.subcarrier_min_ratio,
    }
}

/// Throughput numbers of one design.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateLatency {
    /// Uncoded data rate l·N_u·B_w/(N_cp + N), bits/s.
    pub rate_bps: f64,
    /// Duration of one block, (N_cp + N)·T_s, seconds.
    pub latency_s: f64,
    /// Bandwidth efficiency κ, bits/s/Hz.
    pub kappa: f64,
}

pub fn rate_and_latency(cfg: &OfdmConfig) -> RateLatency {
    let block = (cfg.n_cp + cfg.n_fft) as f64;
    RateLatency {
        rate_bps: cfg.bits_per_symbol as f64 * cfg.n_user as f64 * cfg.bandwidth / block,
        latency_s: block / cfg.bandwidth,
        kappa: cfg.kappa(),
    }
}

/// Doppler spread Δf_D = ν·f_c/c.
pub fn doppler(speed_mps: f64, carrier_hz: f64) -> f64 {
    speed_mps * carrier_hz / SPEED_OF_LIGHT
}

/// Aperture antenna gain G = 4π·A_e·f_c²/c², linear.
pub fn antenna_gain(effective_aperture_m2: f64, carrier_hz: f64) -> f64 {
    4.0 * std::f64::consts::PI * effective_aperture_m2 * carrier_hz * carrier_hz
        / (SPEED_OF_LIGHT * SPEED_OF_LIGHT)
}

/// Symbol-energy ratio from the bit-energy ratio:
/// Es/N0 = Eb/N0 + 10·log10(l·N_u/(N_cp + N)) — the guard and prefix
/// overheads cost energy per delivered bit.
pub fn es_n0_from_eb_n0(eb_n0_db: f64, cfg: &OfdmConfig) -> f64 {
    eb_n0_db
        + 10.0
            * (cfg.bits_per_symbol as f64 * cfg.n_user as f64 / (cfg.n_cp + cfg.n_fft) as f64)
                .log10()
}

/// Smallest N_cp whose prefix duration covers the profile's last path with
/// the given fractional margin: ceil((1+margin)·t_last/T_s). Quotients within
/// one part in 10⁹ of an integer round to it instead of ceiling past it.
pub fn cp_from_channel(profile: &MultipathProfile, ts: f64, margin: f64) -> Result<usize> {
    if !(ts > 0.0) {
        return Err(Error::NonPositiveSamplePeriod(ts));
    }
    let raw = (1.0 + margin) * profile.last_time() / ts;
    let rounded = raw.round();
    if (raw - rounded).abs() <= 1e-9 * raw.max(1.0) {
        Ok(rounded as usize)
    } else {
        Ok(raw.ceil() as usize)
    }
}

/// Theoretical BPSK bit error rate over AWGN: ½·erfc(√(Eb/N0)).
pub fn bpsk_awgn_ber(eb_n0_db: f64) -> f64 {
    let ebn0 = 10f64.powf(eb_n0_db / 10.0);
    0.5 * statrs::function::erf::erfc(ebn0.sqrt())
}

/// Theoretical BPSK bit error rate over flat Rayleigh fading with mean
/// branch SNR γ̄ = Eb/N0: ½·(1 − √(γ̄/(1+γ̄))).
pub fn bpsk_rayleigh_ber(eb_n0_db: f64) -> f64 {
    let ebn0 = 10f64.powf(eb_n0_db / 10.0);
    0.5 * (1.0 - (ebn0 / (1.0 + ebn0)).sqrt())
}

/// The channel a BER run convolves with.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelSource {
    /// The same taps for every block, on the simulation's T_s grid,
    /// normalized to unit energy.
    Fixed { taps: Vec<Complex64>, label: String },
    /// Flat Rayleigh tapped delay line, redrawn independently every block
    /// with unit *expected* total power — the ensemble reference.
    Rayleigh { n_taps: usize },
}

impl ChannelSource {
    /// Fixed taps, trimmed of trailing zeros and scaled to unit energy.
    pub fn from_taps(mut taps: Vec<Complex64>, label: impl Into<String>) -> Result<Self> {
        while taps.last().is_some_and(|t| t.norm_sqr() == 0.0) {
            taps.pop();
        }
        let energy: f64 = taps.iter().map(|t| t.norm_sqr()).sum();
        if taps.is_empty() || !(energy > 0.0) {
            return Err(Error::ZeroImpulseResponse);
        }
        let scale = 1.0 / energy.sqrt();
        for t in &mut taps {
            *t *= scale;
        }
        Ok(ChannelSource::Fixed {
            taps,
            label: label.into(),
        })
    }

    /// Resamples a realization's exact path gains onto the `ts` grid by
    /// nearest-bin coherent accumulation.
    pub fn from_realization(realization: &Realization, ts: f64) -> Result<Self> {
        if !(ts > 0.0) {
            return Err(Error::NonPositiveSamplePeriod(ts));
        }
        let times: Vec<f64> = realization.profile.times().collect();
        let taps = bin_coherently(&times, &realization.gains, ts)?;
        Self::from_taps(taps, realization.model_label.clone())
    }

    /// Resamples a sampled impulse response onto the `ts` grid by
    /// nearest-bin coherent accumulation of its samples.
    pub fn from_impulse_response(cir: &ImpulseResponse, ts: f64) -> Result<Self> {
        if !(ts > 0.0) {
            return Err(Error::NonPositiveSamplePeriod(ts));
        }
        let times: Vec<f64> = (0..cir.samples.len()).map(|i| cir.time(i)).collect();
        let taps = bin_coherently(&times, &cir.samples, ts)?;
        Self::from_taps(taps, "cir")
    }

    pub fn label(&self) -> String {
        match self {
            ChannelSource::Fixed { label, .. } => label.clone(),
            ChannelSource::Rayleigh { n_taps } => format!("rayleigh-tdl-{n_taps}"),
        }
    }

    /// Tap count the cyclic prefix must cover.
    fn span(&self) -> usize {
        match self {
            ChannelSource::Fixed { taps, .. } => taps.len(),
            ChannelSource::Rayleigh { n_taps } => *n_taps,
        }
    }
}

fn bin_coherently(times_s: &[f64], values: &[Complex64], ts: f64) -> Result<Vec<Complex64>> {
    let mut taps: Vec<Complex64> = Vec::new();
    for (&t, &v) in times_s.iter().zip(values) {
        let idx = (t / ts).round();
        if idx < 0.0 {
            return Err(Error::InvalidOfdmConfig(format!(
                "channel has energy at t = {t} s, before the simulation origin"
            )));
        }
        let idx = idx as usize;
        if idx >= taps.len() {
            taps.resize(idx + 1, Complex64::ZERO);
        }
        taps[idx] += v;
    }
    Ok(taps)
}

/// Monte Carlo stopping rule: run until both `min_bits` and `min_errors` are
/// reached, but never past `max_bits`. A point that hits the cap short of
/// `min_errors` is flagged `capped`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StopRule {
    pub min_bits: u64,
    pub min_errors: u64,
    pub max_bits: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        Self {
            min_bits: 1_000_000,
            min_errors: 100,
            max_bits: 100_000_000,
        }
    }
}

/// One simulated grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BerPoint {
    pub eb_n0_db: f64,
    pub ber: f64,
    pub bits: u64,
    pub errors: u64,
    /// True when the bit cap ended the point before `min_errors` errors; the
    /// estimate is then noisier than requested.
    pub capped: bool,
}

/// A simulated BER curve with everything needed to reproduce it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerCurve {
    pub points: Vec<BerPoint>,
    pub config: OfdmConfig,
    pub channel_label: String,
    pub seed: u64,
}

/// Data-bin indices: the (N_u+1)/2 lowest non-negative frequencies (DC
/// included) and the N_u/2 highest bins (negative frequencies). The guard
/// remainder sits at the band edges; an odd guard count leaves the extra
/// guard at the outermost edge.
fn data_bins(n_fft: usize, n_user: usize) -> Vec<usize> {
    let k_pos = n_user.div_ceil(2);
    let k_neg = n_user / 2;
    let mut bins = Vec::with_capacity(n_user);
    bins.extend(0..k_pos);
    bins.extend(n_fft - k_neg..n_fft);
    bins
}

/// Everything shared by the blocks of one simulation run.
struct BlockPlan {
    cfg: OfdmConfig,
    bins: Vec<usize>,
    fft_forward: Arc<dyn Fft<f64>>,
    fft_inverse: Arc<dyn Fft<f64>>,
    conv_size: usize,
    conv_forward: Arc<dyn Fft<f64>>,
    conv_inverse: Arc<dyn Fft<f64>>,
    /// For a fixed channel: its forward FFT at `conv_size` (convolution) and
    /// its unnormalized N-point frequency response (equalization).
    fixed: Option<(Vec<Complex64>, Vec<Complex64>)>,
    rayleigh_taps: usize,
}

impl BlockPlan {
    fn new(cfg: &OfdmConfig, channel: &ChannelSource) -> Self {
        let mut planner = FftPlanner::new();
        let span = channel.span();
        let conv_size = (cfg.n_fft + cfg.n_cp + span - 1).next_power_of_two();
        let fft_forward = planner.plan_fft_forward(cfg.n_fft);
        let fft_inverse = planner.plan_fft_inverse(cfg.n_fft);
        let conv_forward = planner.plan_fft_forward(conv_size);
        let conv_inverse = planner.plan_fft_inverse(conv_size);
        let fixed = match channel {
            ChannelSource::Fixed { taps, .. } => Some((
                spectrum(taps, conv_size, conv_forward.as_ref()),
                spectrum(taps, cfg.n_fft, fft_forward.as_ref()),
            )),
            ChannelSource::Rayleigh { .. } => None,
        };
        Self {
            cfg: *cfg,
            bins: data_bins(cfg.n_fft, cfg.n_user),
            fft_forward,
            fft_inverse,
            conv_size,
            conv_forward,
            conv_inverse,
            fixed,
            rayleigh_taps: match channel {
                ChannelSource::Rayleigh { n_taps } => *n_taps,
                _ => 0,
            },
        }
    }
}

/// Unnormalized forward FFT of `taps` zero-padded (or, for the N-point
/// equalizer response when taps outnumber N, folded modulo `size` — the
/// DFT of the circular wrap the receiver window actually sees).
fn spectrum(taps: &[Complex64], size: usize, fft: &dyn Fft<f64>) -> Vec<Complex64> {
    let mut buf = vec![Complex64::ZERO; size];
    for (l, &t) in taps.iter().enumerate() {
        buf[l % size] += t;
    }
    fft.process(&mut buf);
    buf
}

/// Runs one OFDM block end to end and returns its bit error count.
///
/// RNG consumption order is fixed — channel taps (Rayleigh source only),
/// data bits, then noise — so the block is a pure function of its stream.
fn run_block(plan: &BlockPlan, noise_var: f64, rng: &mut ChaCha12Rng) -> u64 {
    let n = plan.cfg.n_fft;
    let n_cp = plan.cfg.n_cp;

    let drawn: Option<(Vec<Complex64>, Vec<Complex64>)> = if plan.fixed.is_none() {
        let taps = rayleigh_taps(plan.rayleigh_taps, rng);
        Some((
            spectrum(&taps, plan.conv_size, plan.conv_forward.as_ref()),
            spectrum(&taps, n, plan.fft_forward.as_ref()),
        ))
    } else {
        None
    };
    let (h_conv, h_eq) = match (&plan.fixed, &drawn) {
        (Some((c, e)), _) | (_, Some((c, e))) => (c, e),
        _ => unreachable!("one channel form is always present"),
    };

    let bits: Vec<bool> = (0..plan.cfg.n_user).map(|_| rng.random()).collect();

    // Modulate onto the data bins and inverse-transform (unitary).
    let mut symbol = vec![Complex64::ZERO; n];
    for (&bin, &bit) in plan.bins.iter().zip(&bits) {
        symbol[bin] = Complex64::new(if bit { -1.0 } else { 1.0 }, 0.0);
    }
    plan.fft_inverse.process(&mut symbol);
    let unitary = 1.0 / (n as f64).sqrt();
    for s in &mut symbol {
        *s *= unitary;
    }

    // Cyclic prefix, then linear convolution with the channel by
    // pointwise multiplication at conv_size.
    let mut signal = vec![Complex64::ZERO; plan.conv_size];
    signal[..n_cp].copy_from_slice(&symbol[n - n_cp..]);
    signal[n_cp..n_cp + n].copy_from_slice(&symbol);
    plan.conv_forward.process(&mut signal);
    for (s, h) in signal.iter_mut().zip(h_conv) {
        *s *= h;
    }
    plan.conv_inverse.process(&mut signal);
    let conv_scale = 1.0 / plan.conv_size as f64;
    // Strip the prefix: keep the N samples the receiver transforms. The
    // convolution tail lands in the next block's prefix and is discarded —
    // legitimate exactly because the taps fit inside N_cp + 1.
    let mut received: Vec<Complex64> = signal[n_cp..n_cp + n]
        .iter()
        .map(|&s| s * conv_scale)
        .collect();

    if noise_var > 0.0 {
        let component = (noise_var / 2.0).sqrt();
        for r in &mut received {
            let z_re: f64 = rng.sample(StandardNormal);
            let z_im: f64 = rng.sample(StandardNormal);
            *r += Complex64::new(component * z_re, component * z_im);
        }
    }

    // Forward transform and one-tap zero-forcing. The transform's unitary
    // scale is skipped: decisions depend only on the sign of Re(Y_k/H_k),
    // which a positive common factor cannot change.
    plan.fft_forward.process(&mut received);
    let mut errors = 0u64;
    for (&bin, &bit) in plan.bins.iter().zip(&bits) {
        let equalized = received[bin] / h_eq[bin];
        let decided = equalized.re < 0.0;
        if decided != bit {
            errors += 1;
        }
    }
    errors
}

/// Blocks simulated concurrently between stop-rule checks.
const BATCH_BLOCKS: u64 = 16;

/// Simulates uncoded BPSK-OFDM bit error rates over the Eb/N0 grid.
///
/// Per block: random bits on the data subcarriers, unitary inverse FFT,
/// cyclic prefix, convolution with the unit-power channel, complex white
/// noise at variance (N+N_cp)/(N·l·(Eb/N0)) per sample — the discrete form
/// of the bit-energy accounting with prefix and guard overheads — prefix
/// strip, FFT, zero-forcing by the true channel response, hard decisions.
/// An infinite Eb/N0 runs noiseless.
///
/// The channel must fit inside the prefix (taps ≤ N_cp + 1), or the
/// inter-block interference the model discards would be real; such channels
/// are refused. Blocks are simulated in parallel batches, each from its own
/// (seed, point, block) stream, so the curve is a pure function of the
/// arguments regardless of thread count.
pub fn simulate_ber(
    cfg: &OfdmConfig,
    channel: &ChannelSource,
    eb_n0_grid_db: &[f64],
    stop: &StopRule,
    seed: u64,
) -> Result<BerCurve> {
    if eb_n0_grid_db.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if cfg.bits_per_symbol != 1 {
        return Err(Error::InvalidOfdmConfig(format!(
            "only BPSK (l = 1) is simulated, got l = {}",
            cfg.bits_per_symbol
        )));
    }
    if channel.span() == 0 {
        return Err(Error::ZeroImpulseResponse);
    }
    if channel.span() > cfg.n_cp + 1 {
        return Err(Error::ChannelExceedsCp {
            channel: channel.span(),
            max: cfg.n_cp + 1,
        });
    }

    let plan = BlockPlan::new(cfg, channel);
    let bits_per_block = cfg.n_user as u64;
    let mut points = Vec::with_capacity(eb_n0_grid_db.len());
    for (point_idx, &eb_n0_db) in eb_n0_grid_db.iter().enumerate() {
        let ebn0 = 10f64.powf(eb_n0_db / 10.0);
        let noise_var = (cfg.n_fft + cfg.n_cp) as f64
            / (cfg.n_fft as f64 * cfg.bits_per_symbol as f64 * ebn0);

        let mut bits = 0u64;
        let mut errors = 0u64;
        let mut next_block = 0u64;
        loop {
            let batch: Vec<u64> = (next_block..next_block + BATCH_BLOCKS).collect();
            errors += batch
                .par_iter()
                .map(|&block| {
                    let mut rng =
                        substream(seed, &[STREAM_BER, point_idx as u64, block]);
                    run_block(&plan, noise_var, &mut rng)
                })
                .sum::<u64>();
            bits += BATCH_BLOCKS * bits_per_block;
            next_block += BATCH_BLOCKS;
            if (bits >= stop.min_bits && errors >= stop.min_errors) || bits >= stop.max_bits {
                break;
            }
        }
        points.push(BerPoint {
            eb_n0_db,
            ber: errors as f64 / bits as f64,
            bits,
            errors,
            capped: errors < stop.min_errors && bits >= stop.max_bits,
        });
    }
    Ok(BerCurve {
        points,
        config: *cfg,
        channel_label: channel.label(),
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat_cfg(n: usize) -> OfdmConfig {
        OfdmConfig::new(n, 0, n, 1, 5e9).unwrap()
    }

    #[test]
    fn rate_latency_match_the_published_design() {
        let cfg = OfdmConfig::new(8192, 5000, 6720, 1, 5e9).unwrap();
        let rl = rate_and_latency(&cfg);
        assert!((rl.rate_bps / 1e9 - 2.547).abs() < 5e-4, "rate {}", rl.rate_bps);
        assert!((rl.latency_s - 2.6384e-6).abs() < 1e-12, "latency {}", rl.latency_s);
        // Exactly l·N_u bits leave per block.
        assert!((rl.rate_bps * rl.latency_s - 6720.0).abs() < 1e-9);
        let sc1 = OfdmConfig::new(8192, 3903, 6720, 1, 5e9).unwrap();
        let rl = rate_and_latency(&sc1);
        assert!((rl.rate_bps / 1e9 - 2.778).abs() < 2e-3);
        assert!((rl.latency_s * 1e6 - 2.419).abs() < 2e-3);
    }

    #[test]
    fn efficiency_grows_with_transform_size() {
        // Same guard fraction and prefix, bigger transform: overhead shrinks.
        let a = OfdmConfig::new(8192, 5000, 6720, 1, 5e9).unwrap();
        let b = OfdmConfig::new(131072, 5000, 107520, 1, 5e9).unwrap();
        assert!(b.kappa() > a.kappa());
        assert!(b.kappa() <= 1.0);
    }

    #[test]
    fn symbol_energy_offset_reflects_the_overheads() {
        let cfg = OfdmConfig::new(8192, 5000, 6720, 1, 5e9).unwrap();
        assert!((es_n0_from_eb_n0(10.0, &cfg) - 7.0707).abs() < 1e-3);
        let shift = es_n0_from_eb_n0(13.0, &cfg) - es_n0_from_eb_n0(10.0, &cfg);
        assert!((shift - 3.0).abs() < 1e-12);
        let lossless = flat_cfg(256);
        assert_eq!(es_n0_from_eb_n0(10.0, &lossless), 10.0);
    }

    #[test]
    fn doppler_and_antenna_gain_examples() {
        assert!((doppler(10.0, 60e9) - 2001.38).abs() < 0.1);
        assert_eq!(doppler(0.0, 60e9), 0.0);
        // Inverting the gain formula gives unit gain.
        let fc = 60e9;
        let a_unit = SPEED_OF_LIGHT * SPEED_OF_LIGHT / (4.0 * std::f64::consts::PI * fc * fc);
        assert!((antenna_gain(a_unit, fc) - 1.0).abs() < 1e-12);
        // A 3.759 mm × 1.880 mm patch at 60 GHz computes to ~5.5 dBi.
        let g = antenna_gain(3.759e-3 * 1.880e-3, fc);
        let g_dbi = 10.0 * g.log10();
        assert!((g_dbi - 5.51).abs() < 0.02, "gain {g_dbi} dBi");
    }

    #[test]
    fn prefix_sizing_inverts_the_design_rows() {
        let one_us = MultipathProfile::new(vec![(0.0, 1.0), (1e-6, 0.5)], 30.0).unwrap();
        assert_eq!(cp_from_channel(&one_us, 0.2e-9, 0.0).unwrap(), 5000);
        let single = MultipathProfile::new(vec![(0.0, 1.0)], 30.0).unwrap();
        assert_eq!(cp_from_channel(&single, 0.2e-9, 0.0).unwrap(), 0);
        let sc1_span = MultipathProfile::new(vec![(0.0, 1.0), (780.6e-9, 0.5)], 30.0).unwrap();
        assert_eq!(cp_from_channel(&sc1_span, 0.2e-9, 0.0).unwrap(), 3903);
        // A genuine fractional quotient still ceils.
        let frac = MultipathProfile::new(vec![(0.0, 1.0), (1.23e-9, 0.5)], 30.0).unwrap();
        assert_eq!(cp_from_channel(&frac, 1e-9, 0.0).unwrap(), 2);
    }

    #[test]
    fn design_rules_pass_and_fail_where_stated() {
        let cfg = OfdmConfig::new(8192, 5000, 6720, 1, 5e9).unwrap();
        // Prefix exactly covers a 1 µs channel: boundary passes, margin 0.
        let check = check_design(&cfg, &DesignEnvelope { t_max: 1e-6, doppler_hz: 2000.0 });
        assert!(check.cp_ok);
        assert!(check.cp_margin_s.abs() < 1e-18);
        assert!(check.doppler_ok);
        assert!((check.doppler_product - 13192.0 * 2000.0 * 0.2e-9).abs() < 1e-12);
        // 8192 = 1.6384·(5 GHz · 1 µs): the soft rule passes.
        assert!(check.subcarriers_ok);
        assert!(check.hard_pass());

        // Zero-length channel: everything passes trivially.
        let trivial = check_design(&cfg, &DesignEnvelope { t_max: 0.0, doppler_hz: 0.0 });
        assert!(trivial.cp_ok && trivial.doppler_ok && trivial.subcarriers_ok);
        assert!(trivial.subcarrier_ratio.is_infinite());

        // A channel longer than the prefix fails the hard rule.
        let fail = check_design(&cfg, &DesignEnvelope { t_max: 2e-6, doppler_hz: 0.0 });
        assert!(!fail.cp_ok && !fail.hard_pass());

        // Doppler boundary is inclusive: a product exactly at the threshold
        // passes, one just above fails. Pin the threshold to the computed
        // product so the comparison is float-exact.
        let env = DesignEnvelope { t_max: 0.0, doppler_hz: 1234.5 };
        let product = check_design(&cfg, &env).doppler_product;
        let at = CheckThresholds { doppler_max: product, subcarrier_min_ratio: 1.5 };
        assert!(check_design_with(&cfg, &env, &at).doppler_ok);
        let below = CheckThresholds {
            doppler_max: product * (1.0 - 1e-12),
            subcarrier_min_ratio: 1.5,
        };
        assert!(!check_design_with(&cfg, &env, &below).doppler_ok);
    }

    #[test]
    fn theory_formulas_match_hand_values() {
        assert!((bpsk_awgn_ber(0.0) - 0.0786496).abs() < 1e-6);
        assert!((bpsk_rayleigh_ber(10.0) - 0.0232687).abs() < 1e-6);
    }

    #[test]
    fn data_bins_split_guards_across_both_edges() {
        assert_eq!(data_bins(8, 5), vec![0, 1, 2, 6, 7]);
        assert_eq!(data_bins(8, 4), vec![0, 1, 6, 7]);
        assert_eq!(data_bins(4, 4), vec![0, 1, 2, 3]);
        assert_eq!(data_bins(8192, 6720).len(), 6720);
    }

    #[test]
    fn awgn_flat_channel_matches_the_closed_form() {
        let cfg = flat_cfg(1024);
        let channel = ChannelSource::from_taps(vec![Complex64::ONE], "flat").unwrap();
        let stop = StopRule { min_bits: 200_000, min_errors: 100, max_bits: 10_000_000 };
        let curve = simulate_ber(&cfg, &channel, &[0.0], &stop, 1).unwrap();
        let p = curve.points[0].ber;
        let theory = bpsk_awgn_ber(0.0);
        let sigma = (theory * (1.0 - theory) / curve.points[0].bits as f64).sqrt();
        assert!(
            (p - theory).abs() < 3.0 * sigma,
            "ber {p} vs theory {theory} (3σ = {})",
            3.0 * sigma
        );
    }

    #[test]
    fn noiseless_blocks_decode_perfectly_through_multipath() {
        let cfg = OfdmConfig::new(256, 16, 200, 1, 5e9).unwrap();
        let mut rng = substream(99, &[0x54415053]);
        let taps: Vec<Complex64> = (0..5)
            .map(|_| {
                let re: f64 = rng.random::<f64>() - 0.5;
                let im: f64 = rng.random::<f64>() - 0.5;
                Complex64::new(re, im)
            })
            .collect();
        let channel = ChannelSource::from_taps(taps, "five-tap").unwrap();
        let stop = StopRule { min_bits: 50_000, min_errors: 0, max_bits: 1_000_000 };
        let curve = simulate_ber(&cfg, &channel, &[f64::INFINITY], &stop, 3).unwrap();
        assert_eq!(curve.points[0].errors, 0);
        assert!(curve.points[0].bits >= 50_000);
        assert!(!curve.points[0].capped);
    }

    #[test]
    fn channels_longer_than_the_prefix_are_refused() {
        let cfg = OfdmConfig::new(256, 16, 200, 1, 5e9).unwrap();
        let taps = vec![Complex64::ONE; 18];
        let channel = ChannelSource::from_taps(taps, "too-long").unwrap();
        match simulate_ber(&cfg, &channel, &[10.0], &StopRule::default(), 0) {
            Err(Error::ChannelExceedsCp { channel: 18, max: 17 }) => {}
            other => panic!("expected the prefix refusal, got {other:?}"),
        }
    }

    #[test]
    fn curves_are_deterministic_in_the_seed() {
        let cfg = flat_cfg(256);
        let channel = ChannelSource::Rayleigh { n_taps: 1 };
        let stop = StopRule { min_bits: 50_000, min_errors: 10, max_bits: 1_000_000 };
        let a = simulate_ber(&cfg, &channel, &[6.0, 10.0], &stop, 42).unwrap();
        let b = simulate_ber(&cfg, &channel, &[6.0, 10.0], &stop, 42).unwrap();
        assert_eq!(a, b);
        let c = simulate_ber(&cfg, &channel, &[6.0, 10.0], &stop, 43).unwrap();
        // A different seed changes the draw; matching error counts at both
        // grid points simultaneously would be a one-in-10⁵ coincidence.
        assert_ne!(
            (a.points[0].errors, a.points[1].errors),
            (c.points[0].errors, c.points[1].errors)
        );
    }

    #[test]
    fn trailing_zeros_do_not_count_against_the_prefix() {
        let mut taps = vec![Complex64::ONE; 3];
        taps.extend(std::iter::repeat_n(Complex64::ZERO, 40));
        let channel = ChannelSource::from_taps(taps, "padded").unwrap();
        match &channel {
            ChannelSource::Fixed { taps, .. } => assert_eq!(taps.len(), 3),
            _ => unreachable!(),
        }
        let energy: f64 = match &channel {
            ChannelSource::Fixed { taps, .. } => taps.iter().map(|t| t.norm_sqr()).sum(),
            _ => unreachable!(),
        };
        assert!((energy - 1.0).abs() < 1e-12);
    }

    #[test]
    fn resampling_accumulates_coherently() {
        let cir = ImpulseResponse::new(
            0.1e-9,
            0.0,
            vec![Complex64::ONE, Complex64::ONE, Complex64::ONE],
        )
        .unwrap();
        let source = ChannelSource::from_impulse_response(&cir, 0.2e-9).unwrap();
        match source {
            ChannelSource::Fixed { taps, .. } => {
                assert_eq!(taps.len(), 2);
                // Samples at 0.1 and 0.2 ns both land in bin 1: 1 and 2
                // before unit-energy scaling (by √5).
                let scale = 5f64.sqrt();
                assert!((taps[0] * scale - Complex64::ONE).norm() < 1e-12);
                assert!((taps[1] * scale - Complex64::new(2.0, 0.0)).norm() < 1e-12);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn bad_configs_and_grids_are_rejected() {
        assert!(matches!(
            OfdmConfig::new(256, 0, 0, 1, 5e9),
            Err(Error::InvalidOfdmConfig(_))
        ));
        assert!(matches!(
            OfdmConfig::new(256, 0, 257, 1, 5e9),
            Err(Error::InvalidOfdmConfig(_))
        ));
        assert!(matches!(
            OfdmConfig::new(256, 0, 256, 0, 5e9),
            Err(Error::InvalidOfdmConfig(_))
        ));
        let cfg = flat_cfg(256);
        let channel = ChannelSource::Rayleigh { n_taps: 1 };
        assert!(matches!(
            simulate_ber(&cfg, &channel, &[], &StopRule::default(), 0),
            Err(Error::EmptyGrid)
        ));
        let qpsk = OfdmConfig::new(256, 0, 256, 2, 5e9).unwrap();
        assert!(matches!(
            simulate_ber(&qpsk, &channel, &[10.0], &StopRule::default(), 0),
            Err(Error::InvalidOfdmConfig(_))
        ));
    }
}
