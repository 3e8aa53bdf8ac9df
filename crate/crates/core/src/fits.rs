//! Least-squares and maximum-likelihood fits: log-distance path loss,
//! exponential power decay, and Gaussian/Gamma/Weibull distribution fits.

use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::profile::MultipathProfile;
use crate::sounding::ImpulseResponse;

const LN_10: f64 = std::f64::consts::LN_10;

/// Log-distance path-loss regression `loss(d) = pl_d0 + alpha·10·log10(d/d0)`.
///
/// `sigma` is the shadowing standard deviation estimated from the residuals
/// (dB), `residuals` the per-point deviations for later distribution fitting.
#[derive(Debug, Clone, PartialEq)]
pub struct PathLossFit {
    pub pl_d0: f64,
    pub alpha: f64,
    pub sigma: f64,
    pub d0: f64,
    pub alpha_std_err: f64,
    pub residuals: Vec<f64>,
}

/// Ordinary least squares of loss (positive dB) against `10·log10(d/d0)`.
pub fn fit_path_loss(points: &[(f64, f64)], d0: f64) -> Result<PathLossFit> {
    if points.len() < 2 {
        return Err(Error::TooFewSamples {
            what: "path-loss points",
            need: 2,
            got: points.len(),
        });
    }
    if !(d0 > 0.0) {
        return Err(Error::NonPositiveDistance(d0));
    }
    for &(d, _) in points {
        if !(d > 0.0) {
            return Err(Error::NonPositiveDistance(d));
        }
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|&(d, _)| 10.0 * (d / d0).log10()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, loss)| loss).collect();
    let x_mean = xs.iter().sum::<f64>() / n;
    let y_mean = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - x_mean) * (x - x_mean)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateDistances(points[0].0));
    }
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - x_mean) * (y - y_mean))
        .sum();
    let alpha = sxy / sxx;
    let pl_d0 = y_mean - alpha * x_mean;
    let residuals: Vec<f64> = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| y - (pl_d0 + alpha * x))
        .collect();
    let ss_res: f64 = residuals.iter().map(|r| r * r).sum();
    // Residual std on n−2 degrees of freedom; two points fit exactly.
    let (sigma, alpha_std_err) = if points.len() > 2 {
        let s = (ss_res / (n - 2.0)).sqrt();
        (s, s / sxx.sqrt())
    } else {
        (0.0, 0.0)
    };
    Ok(PathLossFit {
        pl_d0,
        alpha,
        sigma,
        d0,
        alpha_std_err,
        residuals,
    })
}

/// Exponential decay-constant fit of one profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit {
    /// Decay time constant γ in seconds.
    pub gamma_s: f64,
    /// Root-mean-square residual of the fitted line, in dB.
    pub rmse_db: f64,
}

/// Fits `ln(p_n/p_0) = −(t_n − t_0)/γ`: a least-squares line through the
/// origin in log power versus excess delay, referenced to the first path.
///
/// A non-negative fitted slope means the profile does not decay and is
/// reported as an error — no positive time constant describes it.
pub fn fit_decay_constant(profile: &MultipathProfile) -> Result<DecayFit> {
    let paths = profile.paths();
    if paths.len() < 2 {
        return Err(Error::TooFewSamples {
            what: "paths",
            need: 2,
            got: paths.len(),
        });
    }
    let (t0, p0) = paths[0];
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for &(t, p) in &paths[1..] {
        let x = t - t0;
        let y = (p / p0).ln();
        sxy += x * y;
        sxx += x * x;
    }
    let slope = sxy / sxx;
    if slope >= 0.0 {
        return Err(Error::NonDecayingProfile { slope });
    }
    let mut ss = 0.0;
    for &(t, p) in &paths[1..] {
        let e = (p / p0).ln() - slope * (t - t0);
        ss += e * e;
    }
    let rmse_db = (ss / (paths.len() - 1) as f64).sqrt() * 10.0 / LN_10;
    Ok(DecayFit {
        gamma_s: -1.0 / slope,
        rmse_db,
    })
}

/// Fits the decay constant of an *ensemble* of CIRs via their averaged power
/// delay profile.
///
/// Per-realization decay fits are biased upward: the fit is referenced to the
/// first path, whose fading fluctuation enters every regression point with
/// the same sign, and 1/slope is convex in the slope. Averaging the sample
/// powers across the ensemble first, re-binning to `bin_width` (coarse enough
/// to average out arrival-process granularity), and fitting a single line
/// over `[fit_start, fit_stop]` removes both effects. The window should start
/// past the early-delay transient (the deterministic first path and the
/// elevated arrival density near it) and end before the shortest generation
/// horizon in the ensemble.
pub fn fit_ensemble_decay(
    cirs: &[ImpulseResponse],
    bin_width: f64,
    fit_start: f64,
    fit_stop: f64,
) -> Result<DecayFit> {
    if cirs.is_empty() {
        return Err(Error::TooFewSamples {
            what: "impulse responses",
            need: 1,
            got: 0,
        });
    }
    let dt = cirs[0].sample_period;
    let t0 = cirs[0].t0;
    for c in cirs {
        let same = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1e-300);
        if !same(c.sample_period, dt) || (c.t0 - t0).abs() > 1e-9 * dt {
            return Err(Error::GeometryMismatch {
                left: format!("{} s grid at t0 {}", dt, t0),
                right: format!("{} s grid at t0 {}", c.sample_period, c.t0),
            });
        }
    }
    let longest = cirs.iter().map(|c| c.samples.len()).max().unwrap();
    let mut mean_power = vec![0.0f64; longest];
    for c in cirs {
        for (i, s) in c.samples.iter().enumerate() {
            mean_power[i] += s.norm_sqr();
        }
    }
    let n = cirs.len() as f64;
    for p in &mut mean_power {
        *p /= n;
    }
    let per_bin = ((bin_width / dt).round() as usize).max(1);
    let width = per_bin as f64 * dt;
    let mut bins = Vec::new();
    for (j, chunk) in mean_power.chunks_exact(per_bin).enumerate() {
        let t = t0 + (j as f64 + 0.5) * width;
        let p: f64 = chunk.iter().sum();
        if t >= fit_start && t <= fit_stop && p > 0.0 {
            bins.push((t, p));
        }
    }
    if bins.len() < 2 {
        return Err(Error::TooFewSamples {
            what: "ensemble-profile bins inside the fit window",
            need: 2,
            got: bins.len(),
        });
    }
    fit_decay_constant(&MultipathProfile::from_unthresholded(bins)?)
}

/// Distribution family selector for [`fit_distribution`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DistributionFamily {
    Gaussian,
    Gamma,
    Weibull,
}

/// Maximum-likelihood parameters of one family, with the attained
/// log-likelihood for model comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum FittedDistribution {
    Gaussian { mu: f64, sigma: f64, log_likelihood: f64 },
    Gamma { shape: f64, scale: f64, log_likelihood: f64 },
    Weibull { scale: f64, shape: f64, log_likelihood: f64 },
}

impl FittedDistribution {
    pub fn family(&self) -> DistributionFamily {
        match self {
            FittedDistribution::Gaussian { .. } => DistributionFamily::Gaussian,
            FittedDistribution::Gamma { .. } => DistributionFamily::Gamma,
            FittedDistribution::Weibull { .. } => DistributionFamily::Weibull,
        }
    }

    pub fn log_likelihood(&self) -> f64 {
        match *self {
            FittedDistribution::Gaussian { log_likelihood, .. }
            | FittedDistribution::Gamma { log_likelihood, .. }
            | FittedDistribution::Weibull { log_likelihood, .. } => log_likelihood,
        }
    }

    /// Mean of the fitted distribution.
    pub fn mean(&self) -> f64 {
        match *self {
            FittedDistribution::Gaussian { mu, .. } => mu,
            FittedDistribution::Gamma { shape, scale, .. } => shape * scale,
            FittedDistribution::Weibull { scale, shape, .. } => {
                scale * ln_gamma(1.0 + 1.0 / shape).exp()
            }
        }
    }
}

/// Golden-section search for the maximum of a unimodal function on [lo, hi].
fn golden_section_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut rounds = 0;
    while hi - lo > tol && rounds < 200 {
        rounds += 1;
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
        }
    }
    0.5 * (lo + hi)
}

fn require_positive(samples: &[f64], family: &'static str) -> Result<()> {
    for (index, &x) in samples.iter().enumerate() {
        if !(x > 0.0) {
            return Err(Error::NonPositiveSamples { family, index });
        }
    }
    Ok(())
}

/// Maximum-likelihood fit of one distribution family.
///
/// The Gaussian fit is closed-form. Gamma and Weibull concentrate the scale
/// parameter out analytically and maximize the resulting one-dimensional
/// profile likelihood over the log of the shape parameter by golden-section
/// search. The Weibull scale is evaluated through log-sum-exp so large shape
/// values (narrow samples) cannot overflow `x^k`.
pub fn fit_distribution(samples: &[f64], family: DistributionFamily) -> Result<FittedDistribution> {
    if samples.len() < 2 {
        return Err(Error::TooFewSamples {
            what: "samples",
            need: 2,
            got: samples.len(),
        });
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    if samples.iter().all(|&x| x == samples[0]) {
        return Err(Error::ZeroVariance);
    }
    match family {
        DistributionFamily::Gaussian => {
            let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
            let sigma = var.sqrt();
            if sigma == 0.0 {
                return Err(Error::ZeroVariance);
            }
            let log_likelihood =
                -n * sigma.ln() - 0.5 * n * (2.0 * std::f64::consts::PI).ln() - 0.5 * n;
            Ok(FittedDistribution::Gaussian {
                mu: mean,
                sigma,
                log_likelihood,
            })
        }
        DistributionFamily::Gamma => {
            require_positive(samples, "gamma")?;
            let sum_ln: f64 = samples.iter().map(|x| x.ln()).sum();
            // Profile log-likelihood with scale concentrated at b = mean/a,
            // where Σ x_i / b = n·a exactly.
            let ll = |ln_a: f64| {
                let a = ln_a.exp();
                let b = mean / a;
                n * (-a * b.ln() - ln_gamma(a) - a) + (a - 1.0) * sum_ln
            };
            let ln_a = golden_section_max(ll, (1e-3f64).ln(), (1e6f64).ln(), 1e-10);
            let shape = ln_a.exp();
            Ok(FittedDistribution::Gamma {
                shape,
                scale: mean / shape,
                log_likelihood: ll(ln_a),
            })
        }
        DistributionFamily::Weibull => {
            require_positive(samples, "weibull")?;
            let ln_x: Vec<f64> = samples.iter().map(|x| x.ln()).collect();
            let sum_ln: f64 = ln_x.iter().sum();
            // ln ζ(k) = (logsumexp(k·ln x) − ln n)/k; at that scale
            // Σ (x/ζ)^k = n, so the profile likelihood collapses to the
            // closed form below.
            let ln_zeta_at = |k: f64| {
                let m = ln_x.iter().fold(f64::NEG_INFINITY, |acc, &l| acc.max(k * l));
                let sum: f64 = ln_x.iter().map(|&l| (k * l - m).exp()).sum();
                (m + sum.ln() - n.ln()) / k
            };
            let ll = |ln_k: f64| {
                let k = ln_k.exp();
                let ln_zeta = ln_zeta_at(k);
                n * (ln_k - k * ln_zeta - 1.0) + (k - 1.0) * sum_ln
            };
            let ln_k = golden_section_max(ll, (1e-3f64).ln(), (1e4f64).ln(), 1e-10);
            let shape = ln_k.exp();
            Ok(FittedDistribution::Weibull {
                scale: ln_zeta_at(shape).exp(),
                shape,
                log_likelihood: ll(ln_k),
            })
        }
    }
}
