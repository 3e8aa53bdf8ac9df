//! Arrival-process fits: single-rate exponential inter-arrival MLE and a
//! two-component exponential mixture fitted by expectation-maximization.
//!
//! Rates carry the reciprocal unit of the input samples: feed seconds, get
//! 1/s. The mixture density is `b·λ₁e^{−λ₁t} + (1−b)·λ₂e^{−λ₂t}` with the
//! reporting convention λ₁ ≤ λ₂, so `b` weights the slower component.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::profile::MultipathProfile;
use crate::rng::substream;

/// Result of fitting both arrival models to one set of inter-arrival times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrivalFit {
    /// Single-exponential MLE rate: 1/mean inter-arrival.
    pub lambda: f64,
    pub single_log_likelihood: f64,
    /// Mixture rates, λ₁ ≤ λ₂.
    pub lambda1: f64,
    pub lambda2: f64,
    /// Mixing probability of the λ₁ component.
    pub b: f64,
    pub mixed_log_likelihood: f64,
    /// False when the best EM run stopped at the iteration cap instead of at
    /// the likelihood tolerance (its final iterate is still reported).
    pub converged: bool,
}

const EM_ITERATION_CAP: usize = 500;
/// Per-sample log-likelihood improvement below which EM stops.
const EM_TOLERANCE: f64 = 1e-9;
const EM_RANDOM_RESTARTS: usize = 8;
/// Fixed stream tag: the restarts are randomized but reproducible, keeping
/// the fit a pure function of its input.
const EM_RESTART_TAG: u64 = 0x454d5f4d4958; // "EM_MIX"

/// Sequential chunk size for parallel reductions. Partial sums are formed
/// per fixed-size chunk in order and combined in index order, so the result
/// does not depend on the thread count.
const CHUNK: usize = 65_536;

/// One fused E-step + log-likelihood pass at the current parameters.
///
/// Returns (Σ r_i, Σ r_i·x_i, log-likelihood), where r_i is the posterior
/// weight of component 1 for sample i. Everything reduces to one exp and one
/// ln_1p per sample: with d_i the log-density margin of component 2 over
/// component 1, r_i = σ(−d_i) and the per-sample log-likelihood is
/// `ln(b·λ₁) − λ₁x_i + softplus(d_i)`.
fn em_pass(intervals: &[f64], sum_x: f64, l1: f64, l2: f64, b: f64) -> (f64, f64, f64) {
    let c1 = b.ln() + l1.ln();
    let c2 = (1.0 - b).ln() + l2.ln();
    let offset = c2 - c1;
    let slope = l1 - l2;
    let chunk_sums = |chunk: &[f64]| -> [f64; 3] {
        let mut s1 = 0.0;
        let mut s1x = 0.0;
        let mut softplus = 0.0;
        for &x in chunk {
            let d = offset + slope * x;
            let t = (-d.abs()).exp();
            if d >= 0.0 {
                let r = t / (1.0 + t);
                s1 += r;
                s1x += r * x;
                softplus += d + t.ln_1p();
            } else {
                let r = 1.0 / (1.0 + t);
                s1 += r;
                s1x += r * x;
                softplus += t.ln_1p();
            }
        }
        [s1, s1x, softplus]
    };
    let total = if intervals.len() < 2 * CHUNK {
        chunk_sums(intervals)
    } else {
        let partials: Vec<[f64; 3]> = intervals.par_chunks(CHUNK).map(chunk_sums).collect();
        partials.iter().fold([0.0; 3], |acc, p| {
            [acc[0] + p[0], acc[1] + p[1], acc[2] + p[2]]
        })
    };
    let n = intervals.len() as f64;
    let ll = n * c1 - l1 * sum_x + total[2];
    (total[0], total[1], ll)
}

fn single_exponential_ll(n: f64, sum_x: f64, rate: f64) -> f64 {
    n * rate.ln() - rate * sum_x
}

struct EmOutcome {
    l1: f64,
    l2: f64,
    b: f64,
    ll: f64,
    converged: bool,
}

/// One EM run from a given start. A collapsed mixture (b at 0 or 1) is a
/// fixed point of the update and is returned immediately with the matching
/// single-exponential likelihood.
fn em_run(intervals: &[f64], sum_x: f64, mut l1: f64, mut l2: f64, mut b: f64) -> EmOutcome {
    let n = intervals.len() as f64;
    let tol = EM_TOLERANCE * n;
    let collapse = |l1: f64, l2: f64, to_one: bool| EmOutcome {
        l1,
        l2,
        b: if to_one { 1.0 } else { 0.0 },
        ll: single_exponential_ll(n, sum_x, if to_one { l1 } else { l2 }),
        converged: true,
    };
    let mut ll_old = f64::NEG_INFINITY;
    for iteration in 0..EM_ITERATION_CAP {
        if b <= 0.0 || b >= 1.0 {
            return collapse(l1, l2, b >= 1.0);
        }
        let (s1, s1x, ll) = em_pass(intervals, sum_x, l1, l2, b);
        if iteration > 0 && ll - ll_old < tol {
            return EmOutcome {
                l1,
                l2,
                b,
                ll,
                converged: true,
            };
        }
        ll_old = ll;
        let s2 = n - s1;
        if s1 <= 0.0 || s2 <= 0.0 || s1x <= 0.0 || sum_x - s1x <= 0.0 {
            return collapse(l1, l2, s2 <= 0.0 || sum_x - s1x <= 0.0);
        }
        l1 = s1 / s1x;
        l2 = s2 / (sum_x - s1x);
        b = s1 / n;
    }
    let (_, _, ll) = em_pass(intervals, sum_x, l1, l2, b);
    EmOutcome {
        l1,
        l2,
        b,
        ll,
        converged: false,
    }
}

/// Fits the single-exponential and two-component mixture arrival models to a
/// set of inter-arrival times.
///
/// The mixture likelihood is multimodal, so EM restarts from several plans: a
/// median split of the samples, a near-collapse around the single rate, the
/// exact single-exponential point (a fixed point of EM, which guarantees the
/// reported mixture never scores below the nested single model), and eight
/// seeded random spreads. Best likelihood wins. Deterministic: the restart
/// seeds depend only on the sample count.
pub fn fit_arrival_intervals(intervals: &[f64]) -> Result<ArrivalFit> {
    if intervals.len() < 2 {
        return Err(Error::TooFewSamples {
            what: "inter-arrival times",
            need: 2,
            got: intervals.len(),
        });
    }
    for (index, &x) in intervals.iter().enumerate() {
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::NonPositiveSamples {
                family: "exponential mixture",
                index,
            });
        }
    }
    let n = intervals.len() as f64;
    let sum_x: f64 = intervals.iter().sum();
    let mean = sum_x / n;
    let lambda = 1.0 / mean;
    let single_log_likelihood = single_exponential_ll(n, sum_x, lambda);

    let mut starts: Vec<(f64, f64, f64)> = Vec::new();
    // Median split: slow component from the long half, fast from the short.
    let mut sorted = intervals.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let median = sorted[sorted.len() / 2];
    let (short, long): (Vec<f64>, Vec<f64>) = sorted.iter().partition(|&&x| x <= median);
    if !short.is_empty() && !long.is_empty() {
        let short_mean = short.iter().sum::<f64>() / short.len() as f64;
        let long_mean = long.iter().sum::<f64>() / long.len() as f64;
        starts.push((1.0 / long_mean, 1.0 / short_mean, 0.5));
    }
    // Near-collapse around the single rate.
    starts.push((lambda / 10.0, lambda, 0.02));
    // The exact single-exponential point: a fixed point, so the mixture can
    // never report a worse likelihood than the nested single model.
    starts.push((lambda / 2.0, lambda, 0.0));
    let mut rng = substream(EM_RESTART_TAG, &[intervals.len() as u64]);
    for _ in 0..EM_RANDOM_RESTARTS {
        let u = -2.0 * rng.random::<f64>();
        let v = 0.7 * rng.random::<f64>();
        let b0 = 0.02 + 0.48 * rng.random::<f64>();
        starts.push((lambda * 10f64.powf(u), lambda * 10f64.powf(v), b0));
    }

    let mut best: Option<EmOutcome> = None;
    for (l1, l2, b) in starts {
        let out = em_run(intervals, sum_x, l1, l2, b);
        if best.as_ref().is_none_or(|cur| out.ll > cur.ll) {
            best = Some(out);
        }
    }
    let mut best = best.expect("at least one EM start");
    if best.l1 > best.l2 {
        std::mem::swap(&mut best.l1, &mut best.l2);
        best.b = 1.0 - best.b;
    }
    Ok(ArrivalFit {
        lambda,
        single_log_likelihood,
        lambda1: best.l1,
        lambda2: best.l2,
        b: best.b,
        mixed_log_likelihood: best.ll,
        converged: best.converged,
    })
}

/// Fits the arrival models to the inter-arrival times of one profile.
pub fn fit_arrivals(profile: &MultipathProfile) -> Result<ArrivalFit> {
    fit_arrival_intervals(&profile.inter_arrival_times())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_distr::Distribution;

    fn mixture_draws(n: usize, l1: f64, l2: f64, b: f64, seed: u64) -> Vec<f64> {
        let mut rng = substream(seed, &[0x4d4958]);
        let e1 = rand_distr::Exp::new(l1).unwrap();
        let e2 = rand_distr::Exp::new(l2).unwrap();
        (0..n)
            .map(|_| {
                if rng.random::<f64>() < b {
                    e1.sample(&mut rng)
                } else {
                    e2.sample(&mut rng)
                }
            })
            .collect()
    }

    #[test]
    fn single_rate_is_the_reciprocal_mean() {
        let fit = fit_arrival_intervals(&[1.0, 2.0, 3.0]).unwrap();
        assert!((fit.lambda - 0.5).abs() < 1e-15);
    }

    #[test]
    fn constant_intervals_degenerate_to_the_single_model() {
        let fit = fit_arrival_intervals(&vec![1.0; 500]).unwrap();
        assert!((fit.lambda - 1.0).abs() < 1e-12);
        assert!(
            (fit.mixed_log_likelihood - fit.single_log_likelihood).abs() < 1e-9,
            "degenerate mixture should match the single model: {} vs {}",
            fit.mixed_log_likelihood,
            fit.single_log_likelihood
        );
        // Either the weight collapsed or the rates merged.
        assert!(fit.b <= 1e-6 || fit.b >= 1.0 - 1e-6 || (fit.lambda1 - fit.lambda2).abs() < 1e-6);
    }

    #[test]
    fn mixture_recovers_planted_components() {
        // A rare slow component under a dominant ~1.2/ns one: the regime the
        // enclosure arrival statistics live in.
        let draws = mixture_draws(100_000, 0.083, 1.180, 0.015, 42);
        let fit = fit_arrival_intervals(&draws).unwrap();
        assert!(fit.converged);
        assert!(
            (fit.lambda2 - 1.180).abs() / 1.180 < 0.05,
            "lambda2 {}",
            fit.lambda2
        );
        assert!(
            (fit.lambda1 - 0.083).abs() / 0.083 < 0.15,
            "lambda1 {}",
            fit.lambda1
        );
        assert!((fit.b - 0.015).abs() / 0.015 < 0.30, "b {}", fit.b);
    }

    #[test]
    fn mixture_never_scores_below_the_single_model() {
        for seed in 0..20u64 {
            let mut rng = substream(seed, &[0x444f4d]);
            let rate = 0.2 + 4.8 * rng.random::<f64>();
            let e = rand_distr::Exp::new(rate).unwrap();
            let count = 10 + (rng.random::<f64>() * 2000.0) as usize;
            let draws: Vec<f64> = (0..count).map(|_| e.sample(&mut rng)).collect();
            let fit = fit_arrival_intervals(&draws).unwrap();
            assert!(
                fit.mixed_log_likelihood >= fit.single_log_likelihood - 1e-7 * count as f64,
                "seed {seed}: {} < {}",
                fit.mixed_log_likelihood,
                fit.single_log_likelihood
            );
            assert!(fit.lambda1 <= fit.lambda2);
            assert!((0.0..=1.0).contains(&fit.b));
        }
    }

    #[test]
    fn fit_is_deterministic() {
        let draws = mixture_draws(20_000, 0.1, 1.5, 0.1, 7);
        let a = fit_arrival_intervals(&draws).unwrap();
        let b = fit_arrival_intervals(&draws).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bad_inputs_are_rejected() {
        assert!(matches!(
            fit_arrival_intervals(&[1.0]),
            Err(Error::TooFewSamples { .. })
        ));
        assert!(matches!(
            fit_arrival_intervals(&[1.0, 0.0, 2.0]),
            Err(Error::NonPositiveSamples { index: 1, .. })
        ));
    }
}
