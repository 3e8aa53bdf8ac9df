//! Command-line front end for the channel toolkit: sweep calibration to CIR,
//! parameter extraction, stochastic synthesis, OFDM design, and Monte-Carlo
//! BER runs. Every command is a pure function of its inputs, flags, and the
//! `--seed` value — rerunning a command produces byte-identical outputs —
//! and all files are written atomically.

// `!(x > 0.0)` is the NaN-rejecting form of a positivity check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};

use boxchan::io::{
    read_json, read_profile_csv, read_sweep_csv, sidecar_path, write_ber_csv, write_cir_csv,
    write_json, write_profile_csv, write_sidecar, ArrivalsGroup, DesignReport,
    EnsembleDecayGroup, FitReport, GammaDistGroup, GammaFitGroup, GaussianFitGroup,
    PathLossGroup, RdsGroup, SidecarMeta, WeibullFitGroup,
};
use boxchan::ofdm::{
    check_design, cp_from_channel, rate_and_latency, simulate_ber, ChannelSource,
    DesignEnvelope, OfdmConfig, StopRule,
};
use boxchan::profile::{detect_paths, rds_threshold_sweep, rms_delay_spread, MultipathProfile};
use boxchan::sounding::{
    cfr_to_cir, cir_to_cfr, inverse_filter, time_gate, Window, DEFAULT_INVERSE_FLOOR,
};
use boxchan::synthesis::{
    measurement_grid, normalize_unit_power, preset, synthesize_cir, synthesize_sv_cir, Model,
    Realization, PRESET_NAMES,
};
use boxchan::{
    derive_seed, fit_arrival_intervals, fit_decay_constant, fit_distribution,
    fit_ensemble_decay, fit_path_loss, read_cir_csv, DistributionFamily, FittedDistribution,
    ImpulseResponse,
};

/// Reference sweeps are gated to the first 50 ns before inverse filtering,
/// wide enough for the direct free-space path, narrow enough to drop
/// reflections picked up during calibration.
const REFERENCE_GATE_S: f64 = 50e-9;

/// Dynamic-range thresholds evaluated by the extraction sweep table.
const SWEEP_THRESHOLDS_DB: [f64; 7] = [10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0];

#[derive(Parser)]
#[command(
    name = "boxchan",
    version,
    about = "Channel modeling and OFDM link simulation for enclosed metal cavities"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// Master random seed; every random draw derives from it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Detection dynamic range below the strongest path, dB.
    #[arg(long = "threshold-db", global = true, default_value_t = 30.0)]
    threshold_db: f64,
    /// Spectral window applied before the sweep → CIR transform.
    #[arg(long, global = true, value_enum, default_value_t = WindowArg::Hann)]
    window: WindowArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum WindowArg {
    Hann,
    None,
}

impl From<WindowArg> for Window {
    fn from(w: WindowArg) -> Self {
        match w {
            WindowArg::Hann => Window::Hann,
            WindowArg::None => Window::None,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Transform a frequency sweep into a channel impulse response.
    Cir(CirArgs),
    /// Fit channel parameters over one or more impulse responses.
    Extract(ExtractArgs),
    /// Generate stochastic channel realizations from a model.
    Synth(SynthArgs),
    /// Size an OFDM design and report rate, latency, and rule margins.
    Design(DesignArgs),
    /// Simulate BER curves for a design over one or more channel sources.
    Ber(BerArgs),
    /// Inspect the built-in scenario and cluster model presets.
    Preset(PresetArgs),
}

#[derive(Args)]
struct CirArgs {
    /// Measured sweep CSV (freq_hz,re,im).
    sweep: PathBuf,
    /// Free-space reference sweep of the same geometry; when given, it is
    /// time-gated and divided out before the transform.
    #[arg(long)]
    reference: Option<PathBuf>,
}

#[derive(Args)]
struct ExtractArgs {
    /// CIR CSV files (time_s,re,im), one per measured or synthesized link.
    #[arg(required = true)]
    cirs: Vec<PathBuf>,
    /// Reference distance for the path-loss regression, meters.
    #[arg(long, default_value_t = 0.25)]
    d0: f64,
}

#[derive(Args)]
struct SynthArgs {
    /// Built-in preset name (see `preset list`).
    #[arg(required_unless_present = "model")]
    preset: Option<String>,
    /// Model parameter JSON file, instead of a preset.
    #[arg(long, conflicts_with = "preset")]
    model: Option<PathBuf>,
    /// Number of realizations to generate.
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Tx–Rx distance in meters (enclosure models).
    #[arg(long, default_value_t = 0.4)]
    distance: f64,
    /// Generate one realization per receiver position of the preset's
    /// published measurement grid, overriding --count and --distance.
    #[arg(long)]
    at_grid: bool,
    /// CIR sample period in seconds.
    #[arg(long, default_value_t = 0.2e-9)]
    sample_period: f64,
}

#[derive(Args)]
struct DesignArgs {
    /// Signal bandwidth B_w in Hz.
    #[arg(long)]
    bandwidth: f64,
    /// Longest channel delay to absorb, seconds.
    #[arg(long, required_unless_present = "channel")]
    t_max: Option<f64>,
    /// Profile CSV whose last path sets the delay to absorb.
    #[arg(long, conflicts_with = "t_max")]
    channel: Option<PathBuf>,
    /// Relative safety margin on the prefix length.
    #[arg(long, default_value_t = 0.0)]
    margin: f64,
    /// Platform speed for the Doppler check, m/s.
    #[arg(long, default_value_t = 0.0)]
    speed: f64,
    /// Carrier frequency for the Doppler check, Hz.
    #[arg(long, default_value_t = 60e9)]
    carrier: f64,
    /// Transform size N.
    #[arg(long)]
    n: usize,
    /// Data subcarriers N_u.
    #[arg(long)]
    nu: usize,
    /// Bits per symbol.
    #[arg(long, default_value_t = 1)]
    l: u32,
}

#[derive(Args)]
struct BerArgs {
    /// Design JSON (a `design` report or a bare configuration).
    #[arg(long)]
    design: PathBuf,
    /// Channel source: `rayleigh:<taps>`, `preset:<name>`, or a CIR/profile
    /// CSV path. Repeat for several sources; each writes its own CSV.
    #[arg(long, required = true)]
    channel: Vec<String>,
    /// Eb/N0 grid in dB, `start:step:stop` (or a single value).
    #[arg(long, default_value = "0:2:20")]
    ebno: String,
    /// Append closed-form AWGN and flat-Rayleigh reference columns.
    #[arg(long)]
    theory: bool,
    /// Minimum bits per grid point.
    #[arg(long, default_value_t = 1_000_000)]
    min_bits: u64,
    /// Minimum bit errors per grid point.
    #[arg(long, default_value_t = 100)]
    min_errors: u64,
    /// Hard cap on bits per grid point.
    #[arg(long, default_value_t = 100_000_000)]
    max_bits: u64,
}

#[derive(Args)]
struct PresetArgs {
    #[command(subcommand)]
    action: PresetAction,
}

#[derive(Subcommand)]
enum PresetAction {
    /// List the built-in model presets.
    List,
}

fn main() {
    if let Err(e) = run() {
        eprintln!("boxchan: {e:#}");
        std::process::exit(1);
    }
}

fn run() -> Result<()> {
    let cli = Cli::parse();
    std::fs::create_dir_all(&cli.global.out)
        .with_context(|| format!("creating output directory {}", cli.global.out.display()))?;
    match &cli.command {
        Command::Cir(args) => cmd_cir(&cli.global, args),
        Command::Extract(args) => cmd_extract(&cli.global, args),
        Command::Synth(args) => cmd_synth(&cli.global, args),
        Command::Design(args) => cmd_design(&cli.global, args),
        Command::Ber(args) => cmd_ber(&cli.global, args),
        Command::Preset(args) => match args.action {
            PresetAction::List => cmd_preset_list(),
        },
    }
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into())
}

fn wrote(path: &Path) {
    println!("wrote {}", path.display());
}

fn cmd_cir(global: &GlobalArgs, args: &CirArgs) -> Result<()> {
    let measured = read_sweep_csv(&args.sweep)?;
    let calibrated = match &args.reference {
        Some(reference_path) => {
            let reference = read_sweep_csv(reference_path)?;
            let gated = time_gate(
                &cfr_to_cir(&reference, Window::None),
                0.0,
                REFERENCE_GATE_S,
            )?;
            let cleaned = cir_to_cfr(&gated, reference.geometry.f_min);
            inverse_filter(&measured, &cleaned, DEFAULT_INVERSE_FLOOR)?
        }
        None => measured.clone(),
    };
    let cir = cfr_to_cir(&calibrated, global.window.into());
    let out_path = global.out.join(format!("{}.cir.csv", file_stem(&args.sweep)));
    write_cir_csv(&out_path, &cir)?;
    wrote(&out_path);
    Ok(())
}

fn cmd_extract(global: &GlobalArgs, args: &ExtractArgs) -> Result<()> {
    let mut cirs = Vec::with_capacity(args.cirs.len());
    for path in &args.cirs {
        cirs.push(read_cir_csv(path)?);
    }
    let mut profiles = Vec::with_capacity(cirs.len());
    for cir in &cirs {
        profiles.push(detect_paths(cir, global.threshold_db)?);
    }

    let rds_per_file_ns: Vec<f64> = profiles
        .iter()
        .map(|p| rms_delay_spread(p) * 1e9)
        .collect();
    let n = rds_per_file_ns.len();
    let mean = rds_per_file_ns.iter().sum::<f64>() / n as f64;
    let std = if n > 1 {
        (rds_per_file_ns
            .iter()
            .map(|r| (r - mean) * (r - mean))
            .sum::<f64>()
            / (n - 1) as f64)
            .sqrt()
    } else {
        0.0
    };

    // Per-file decay constants (ns) feed the distribution comparison; the
    // ensemble-PDP fit is the low-variance point estimate.
    let gammas_ns: Vec<f64> = profiles
        .iter()
        .filter_map(|p| fit_decay_constant(p).ok().map(|f| f.gamma_s * 1e9))
        .collect();
    let gamma = if gammas_ns.len() >= 3 {
        fit_gamma_distributions(&gammas_ns)
    } else {
        None
    };
    let fit_stop = cirs
        .iter()
        .map(|c| c.time(c.samples.len() - 1))
        .fold(f64::INFINITY, f64::min);
    let gamma_ensemble = fit_ensemble_decay(&cirs, 5e-9, 30e-9, fit_stop)
        .ok()
        .map(|f| EnsembleDecayGroup {
            gamma_ns: f.gamma_s * 1e9,
            rmse_db: f.rmse_db,
        });

    let pooled_gaps_ns: Vec<f64> = profiles
        .iter()
        .flat_map(|p| p.inter_arrival_times())
        .map(|gap| gap * 1e9)
        .collect();
    let arrivals = fit_arrival_intervals(&pooled_gaps_ns)
        .ok()
        .map(|f| ArrivalsGroup {
            lambda: f.lambda,
            lambda1: f.lambda1,
            lambda2: f.lambda2,
            b: f.b,
            single_log_likelihood: f.single_log_likelihood,
            mixed_log_likelihood: f.mixed_log_likelihood,
            converged: f.converged,
        });

    let path_loss = fit_path_loss_from_sidecars(args, &cirs)?;
    let threshold_sweep = rds_threshold_sweep(&cirs, &SWEEP_THRESHOLDS_DB).ok();

    let report = FitReport {
        threshold_db: global.threshold_db,
        n_files: n,
        rds: RdsGroup { mean, std },
        path_loss,
        gamma,
        gamma_ensemble,
        arrivals,
        rds_per_file_ns,
        threshold_sweep,
    };
    let out_path = global.out.join("report.json");
    write_json(&out_path, &report)?;
    wrote(&out_path);
    Ok(())
}

fn fit_gamma_distributions(gammas_ns: &[f64]) -> Option<GammaDistGroup> {
    let gaussian = fit_distribution(gammas_ns, DistributionFamily::Gaussian).ok()?;
    let gamma = fit_distribution(gammas_ns, DistributionFamily::Gamma).ok()?;
    let weibull = fit_distribution(gammas_ns, DistributionFamily::Weibull).ok()?;
    match (gaussian, gamma, weibull) {
        (
            FittedDistribution::Gaussian {
                mu,
                sigma,
                log_likelihood: ll_n,
            },
            FittedDistribution::Gamma {
                shape,
                scale,
                log_likelihood: ll_g,
            },
            FittedDistribution::Weibull {
                scale: w_scale,
                shape: w_shape,
                log_likelihood: ll_w,
            },
        ) => Some(GammaDistGroup {
            gaussian: GaussianFitGroup {
                mu,
                sigma,
                log_likelihood: ll_n,
            },
            gamma: GammaFitGroup {
                shape,
                scale,
                log_likelihood: ll_g,
            },
            weibull: WeibullFitGroup {
                scale: w_scale,
                shape: w_shape,
                log_likelihood: ll_w,
            },
        }),
        _ => None,
    }
}

/// Path loss is fitted when any input carries a `distance_m` sidecar tag;
/// then every input must carry one. The loss itself comes from the sidecar's
/// `large_scale_gain_db` when present, otherwise from the CIR's total power.
/// A fully tagged ensemble measured at a single distance has no slope to
/// estimate, so the group is omitted rather than refused.
fn fit_path_loss_from_sidecars(
    args: &ExtractArgs,
    cirs: &[ImpulseResponse],
) -> Result<Option<PathLossGroup>> {
    let mut tagged = Vec::with_capacity(args.cirs.len());
    for path in &args.cirs {
        tagged.push(boxchan::read_sidecar(path)?);
    }
    if !tagged
        .iter()
        .any(|m| m.as_ref().is_some_and(|m| m.distance_m.is_some()))
    {
        return Ok(None);
    }
    let mut points = Vec::with_capacity(cirs.len());
    for ((path, meta), cir) in args.cirs.iter().zip(&tagged).zip(cirs) {
        let meta = meta.clone().unwrap_or_default();
        let distance = meta.distance_m.ok_or_else(|| {
            anyhow!(
                "{}: no distance_m tag in {} (path-loss fitting needs one per file)",
                path.display(),
                sidecar_path(path).display()
            )
        })?;
        let loss_db = match meta.large_scale_gain_db {
            Some(gain) => -gain,
            None => -10.0 * cir.total_power().log10(),
        };
        points.push((distance, loss_db));
    }
    if points.iter().all(|&(d, _)| d == points[0].0) {
        return Ok(None);
    }
    Ok(Some(fit_path_loss(&points, args.d0).map(|f| PathLossGroup {
        pl_d0: f.pl_d0,
        alpha: f.alpha,
        sigma: f.sigma,
    })?))
}

fn cmd_synth(global: &GlobalArgs, args: &SynthArgs) -> Result<()> {
    let model = match (&args.preset, &args.model) {
        (Some(name), None) => preset(name)?,
        (None, Some(path)) => read_json::<Model>(path)?,
        _ => unreachable!("clap enforces exactly one model source"),
    };
    let distances: Vec<f64> = if args.at_grid {
        let name = args
            .preset
            .as_deref()
            .ok_or_else(|| anyhow!("--at-grid needs a preset with a published grid"))?;
        measurement_grid(name)
            .ok_or_else(|| anyhow!("preset {name} has no published measurement grid"))?
    } else {
        vec![args.distance; args.count]
    };

    for (index, &distance) in distances.iter().enumerate() {
        let seed = derive_seed(global.seed, &[index as u64]);
        let realization = match &model {
            Model::Enclosure(m) => synthesize_cir(m, distance, args.sample_period, seed)?,
            Model::Cluster(m) => {
                // Span the decay chain down to the detection threshold.
                let horizon_ns = (m.cluster_decay + m.ray_decay)
                    * global.threshold_db
                    * std::f64::consts::LN_10
                    / 10.0;
                synthesize_sv_cir(m, args.sample_period, horizon_ns, seed)?
            }
        };
        write_realization(global, &model, index, distance, &realization)?;
    }
    Ok(())
}

/// Exports one realization: unit-power profile and CIR files, with the
/// absolute level and provenance in the shared sidecar.
fn write_realization(
    global: &GlobalArgs,
    model: &Model,
    index: usize,
    distance: f64,
    realization: &Realization,
) -> Result<()> {
    let normalized = normalize_unit_power(realization);
    let base = format!("{}-{index:04}", model.label());
    let profile_path = global.out.join(format!("{base}.profile.csv"));
    let cir_path = global.out.join(format!("{base}.cir.csv"));
    write_profile_csv(&profile_path, &normalized.profile)?;
    write_cir_csv(&cir_path, &normalized.cir)?;
    let enclosure = matches!(model, Model::Enclosure(_));
    let meta = SidecarMeta {
        seed: Some(normalized.seed),
        model_label: Some(normalized.model_label.clone()),
        distance_m: enclosure.then_some(distance),
        large_scale_gain_db: enclosure.then_some(normalized.large_scale_gain_db),
    };
    write_sidecar(&profile_path, &meta)?;
    wrote(&profile_path);
    wrote(&cir_path);
    wrote(&sidecar_path(&profile_path));
    Ok(())
}

fn cmd_design(global: &GlobalArgs, args: &DesignArgs) -> Result<()> {
    if !(args.bandwidth > 0.0) {
        bail!("--bandwidth must be positive, got {}", args.bandwidth);
    }
    let ts = 1.0 / args.bandwidth;
    let (profile, t_max) = match (&args.channel, args.t_max) {
        (Some(path), None) => {
            let p = read_profile_csv(path)?;
            let last = p.last_time();
            (p, last)
        }
        (None, Some(t_max)) => {
            if t_max < 0.0 {
                bail!("--t-max must be nonnegative, got {t_max}");
            }
            // A single path at t_max carries the same prefix requirement as
            // a full profile ending there.
            (
                MultipathProfile::from_unthresholded(vec![(t_max, 1.0)])?,
                t_max,
            )
        }
        _ => unreachable!("clap enforces exactly one delay source"),
    };
    let n_cp = cp_from_channel(&profile, ts, args.margin)?;
    if n_cp > args.n {
        bail!(
            "infeasible design: the channel needs a {n_cp}-sample prefix but the transform \
             is only {} samples long",
            args.n
        );
    }
    let config = OfdmConfig::new(args.n, n_cp, args.nu, args.l, args.bandwidth)?;
    let envelope = DesignEnvelope::from_speed(t_max, args.speed, args.carrier);
    let check = check_design(&config, &envelope);
    if !check.cp_ok {
        eprintln!("warning: cyclic prefix shorter than the channel span");
    }
    if !check.doppler_ok {
        eprintln!(
            "warning: block duration times Doppler spread is {:.3}, above the 0.1 bound",
            check.doppler_product
        );
    }
    if !check.subcarriers_ok {
        eprintln!(
            "warning: subcarrier count is only {:.2}× the flat-fading minimum (wants ≥ 1.5×)",
            check.subcarrier_ratio
        );
    }
    let rl = rate_and_latency(&config);
    let report = DesignReport {
        config,
        rate_bps: rl.rate_bps,
        latency_s: rl.latency_s,
        kappa: rl.kappa,
        envelope,
        check,
    };
    let out_path = global.out.join("design.json");
    write_json(&out_path, &report)?;
    wrote(&out_path);
    Ok(())
}

fn cmd_ber(global: &GlobalArgs, args: &BerArgs) -> Result<()> {
    let config: OfdmConfig = read_json(&args.design)?;
    let grid = parse_grid(&args.ebno)?;
    let stop = StopRule {
        min_bits: args.min_bits,
        min_errors: args.min_errors,
        max_bits: args.max_bits,
    };
    let ts = config.sample_period();
    for (index, spec) in args.channel.iter().enumerate() {
        let (source, label) = channel_source(spec, ts, global, index)?;
        let curve = simulate_ber(&config, &source, &grid, &stop, global.seed)?;
        for point in &curve.points {
            if point.capped {
                eprintln!(
                    "warning: {} dB point hit the {} bit cap with only {} errors",
                    point.eb_n0_db, args.max_bits, point.errors
                );
            }
        }
        let out_path = global.out.join(format!("ber-{label}.csv"));
        write_ber_csv(&out_path, &curve, args.theory)?;
        wrote(&out_path);
    }
    Ok(())
}

/// Resolves a `--channel` spec: `rayleigh:<taps>`, `preset:<name>`, or a
/// CSV path (`*.profile.csv` delay/power pairs, anything else a CIR).
fn channel_source(
    spec: &str,
    ts: f64,
    global: &GlobalArgs,
    index: usize,
) -> Result<(ChannelSource, String)> {
    if let Some(taps) = spec.strip_prefix("rayleigh:") {
        let n_taps: usize = taps
            .parse()
            .with_context(|| format!("bad tap count in channel spec {spec:?}"))?;
        return Ok((ChannelSource::Rayleigh { n_taps }, format!("rayleigh-{n_taps}")));
    }
    if let Some(name) = spec.strip_prefix("preset:") {
        let seed = derive_seed(global.seed, &[0x4348414e, index as u64]);
        let realization = match preset(name)? {
            Model::Enclosure(m) => synthesize_cir(&m, 0.4, ts, seed)?,
            Model::Cluster(m) => {
                let horizon_ns = (m.cluster_decay + m.ray_decay)
                    * global.threshold_db
                    * std::f64::consts::LN_10
                    / 10.0;
                synthesize_sv_cir(&m, ts, horizon_ns, seed)?
            }
        };
        let source = ChannelSource::from_realization(&realization, ts)?;
        return Ok((source, name.to_string()));
    }
    let path = Path::new(spec);
    let stem = file_stem(path).replace('.', "-");
    if spec.ends_with(".profile.csv") {
        let profile = read_profile_csv(path)?;
        let taps: Vec<_> = profile
            .paths()
            .iter()
            .map(|&(_, p)| num_complex::Complex64::new(p.sqrt(), 0.0))
            .collect();
        let times: Vec<f64> = profile.times().collect();
        let cir = bin_profile(&times, &taps, ts)?;
        Ok((ChannelSource::from_impulse_response(&cir, ts)?, stem))
    } else {
        let cir = read_cir_csv(path)?;
        Ok((ChannelSource::from_impulse_response(&cir, ts)?, stem))
    }
}

/// Coherently bins delay/amplitude pairs onto the simulation grid.
fn bin_profile(
    times: &[f64],
    taps: &[num_complex::Complex64],
    ts: f64,
) -> Result<ImpulseResponse> {
    let last = times.last().copied().unwrap_or(0.0);
    let n_bins = (last / ts).round() as usize + 1;
    let mut samples = vec![num_complex::Complex64::ZERO; n_bins];
    for (&t, &g) in times.iter().zip(taps) {
        samples[(t / ts).round() as usize] += g;
    }
    Ok(ImpulseResponse::new(ts, 0.0, samples)?)
}

/// Parses `start:step:stop` (inclusive, in dB) or a single value.
fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let parse = |s: &str| -> Result<f64> {
        s.parse::<f64>()
            .map_err(|_| anyhow!("bad number {s:?} in Eb/N0 grid {spec:?}"))
    };
    match parts.as_slice() {
        [single] => Ok(vec![parse(single)?]),
        [start, step, stop] => {
            let (start, step, stop) = (parse(start)?, parse(step)?, parse(stop)?);
            if !(step > 0.0) {
                bail!("grid step must be positive in {spec:?}");
            }
            if stop < start {
                bail!("grid stop is below start in {spec:?}");
            }
            let mut grid = Vec::new();
            let mut k = 0u32;
            loop {
                let value = start + k as f64 * step;
                if value > stop + step * 1e-9 {
                    break;
                }
                grid.push(value);
                k += 1;
            }
            Ok(grid)
        }
        _ => bail!("Eb/N0 grid must be start:step:stop or a single value, got {spec:?}"),
    }
}

fn cmd_preset_list() -> Result<()> {
    for name in PRESET_NAMES {
        let model = preset(name)?;
        let kind = match &model {
            Model::Enclosure(_) => "enclosure",
            Model::Cluster(_) => "cluster",
        };
        println!("{name}\t{kind}");
    }
    Ok(())
}
