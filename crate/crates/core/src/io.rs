//! File formats: sweep, CIR, profile and BER CSV; model, report and sidecar
//! JSON. Readers report the offending line on malformed input; writers are
//! atomic (temp file + rename) and format floats with the shortest
//! round-tripping representation, so identical data produces byte-identical
//! files.

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::ofdm::{bpsk_awgn_ber, bpsk_rayleigh_ber, BerCurve, DesignCheck, DesignEnvelope, OfdmConfig};
use crate::profile::{MultipathProfile, ThresholdSweepRow};
use crate::sounding::{FrequencySweep, ImpulseResponse, SweepGeometry};

/// Writes via a temp file in the same directory, then renames into place, so
/// a crash never leaves a half-written file under the target name.
fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp.{}", std::process::id()));
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents).map_err(io_err)?;
    fs::rename(&tmp, path).map_err(io_err)
}

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads any JSON file into a serde type.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read_to_string(path)?).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes any serde type as pretty-printed JSON, atomically.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })?;
    text.push('\n');
    write_atomic(path, &text)
}

/// Parsed numeric rows of one CSV file with a fixed, exact header.
fn read_rows(path: &Path, header: &[&str]) -> Result<Vec<(u64, Vec<f64>)>> {
    let file = fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let malformed = |line: u64, message: String| Error::MalformedCsv {
        path: path.to_path_buf(),
        line,
        message,
    };
    let found = reader
        .headers()
        .map_err(|e| malformed(1, e.to_string()))?
        .iter()
        .map(str::to_owned)
        .collect::<Vec<_>>();
    if found != header {
        return Err(malformed(
            1,
            format!("expected header {:?}, found {:?}", header.join(","), found.join(",")),
        ));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, csv::Position::line);
            malformed(line, e.to_string())
        })?;
        let line = record.position().map_or(0, csv::Position::line);
        if record.len() != header.len() {
            return Err(malformed(
                line,
                format!("expected {} fields, found {}", header.len(), record.len()),
            ));
        }
        let mut values = Vec::with_capacity(header.len());
        for (name, field) in header.iter().zip(record.iter()) {
            values.push(field.parse::<f64>().map_err(|_| {
                malformed(line, format!("{name} is not a number: {field:?}"))
            })?);
        }
        rows.push((line, values));
    }
    Ok(rows)
}

/// Checks that column 0 of the rows forms a uniformly ascending grid and
/// returns (start, spacing). Tolerance is 10⁻⁶ of the spacing.
fn uniform_grid(path: &Path, rows: &[(u64, Vec<f64>)]) -> Result<(f64, f64)> {
    let start = rows[0].1[0];
    let spacing = rows[1].1[0] - start;
    if !(spacing > 0.0) {
        return Err(Error::NonUniformGrid {
            path: path.to_path_buf(),
            line: rows[1].0,
        });
    }
    for (i, (line, values)) in rows.iter().enumerate() {
        let expected = start + i as f64 * spacing;
        if (values[0] - expected).abs() > 1e-6 * spacing {
            return Err(Error::NonUniformGrid {
                path: path.to_path_buf(),
                line: *line,
            });
        }
    }
    Ok((start, spacing))
}

/// Reads a frequency sweep: CSV `freq_hz,re,im` over a uniformly ascending
/// grid. The sweep label is the file stem.
pub fn read_sweep_csv(path: &Path) -> Result<FrequencySweep> {
    let rows = read_rows(path, &["freq_hz", "re", "im"])?;
    if rows.len() < 2 {
        return Err(Error::TooFewPoints(rows.len()));
    }
    let (f_min, spacing) = uniform_grid(path, &rows)?;
    let n = rows.len();
    let geometry = SweepGeometry::new(f_min, f_min + n as f64 * spacing, n)?;
    let samples = rows
        .iter()
        .map(|(_, v)| Complex64::new(v[1], v[2]))
        .collect();
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    FrequencySweep::new(geometry, samples, label)
}

/// Writes a frequency sweep as CSV `freq_hz,re,im`.
pub fn write_sweep_csv(path: &Path, sweep: &FrequencySweep) -> Result<()> {
    let mut out = String::from("freq_hz,re,im\n");
    for (i, s) in sweep.samples.iter().enumerate() {
        out.push_str(&format!("{},{},{}\n", sweep.geometry.frequency(i), s.re, s.im));
    }
    write_atomic(path, &out)
}

/// Reads an impulse response: CSV `time_s,re,im` over a uniform time grid.
pub fn read_cir_csv(path: &Path) -> Result<ImpulseResponse> {
    let rows = read_rows(path, &["time_s", "re", "im"])?;
    if rows.len() < 2 {
        return Err(Error::TooFewSamples {
            what: "CIR samples",
            need: 2,
            got: rows.len(),
        });
    }
    let (t0, dt) = uniform_grid(path, &rows)?;
    let samples = rows
        .iter()
        .map(|(_, v)| Complex64::new(v[1], v[2]))
        .collect();
    ImpulseResponse::new(dt, t0, samples)
}

/// Writes an impulse response as CSV `time_s,re,im`.
pub fn write_cir_csv(path: &Path, cir: &ImpulseResponse) -> Result<()> {
    let mut out = String::from("time_s,re,im\n");
    for (i, s) in cir.samples.iter().enumerate() {
        out.push_str(&format!("{},{},{}\n", cir.time(i), s.re, s.im));
    }
    write_atomic(path, &out)
}

/// Reads a multipath profile: CSV `delay_s,power_linear`. The profile's
/// threshold annotation becomes its own power span.
pub fn read_profile_csv(path: &Path) -> Result<MultipathProfile> {
    let rows = read_rows(path, &["delay_s", "power_linear"])?;
    MultipathProfile::from_unthresholded(rows.iter().map(|(_, v)| (v[0], v[1])).collect())
}

/// Writes a multipath profile as CSV `delay_s,power_linear`.
pub fn write_profile_csv(path: &Path, profile: &MultipathProfile) -> Result<()> {
    let mut out = String::from("delay_s,power_linear\n");
    for &(t, p) in profile.paths() {
        out.push_str(&format!("{t},{p}\n"));
    }
    write_atomic(path, &out)
}

/// Writes a BER curve as CSV `ebn0_db,ber,bits,errors`; `with_theory`
/// appends the closed-form `awgn_theory,rayleigh_theory` reference columns.
pub fn write_ber_csv(path: &Path, curve: &BerCurve, with_theory: bool) -> Result<()> {
    let mut out = String::from("ebn0_db,ber,bits,errors");
    if with_theory {
        out.push_str(",awgn_theory,rayleigh_theory");
    }
    out.push('\n');
    for point in &curve.points {
        out.push_str(&format!(
            "{},{},{},{}",
            point.eb_n0_db, point.ber, point.bits, point.errors
        ));
        if with_theory {
            out.push_str(&format!(
                ",{},{}",
                bpsk_awgn_ber(point.eb_n0_db),
                bpsk_rayleigh_ber(point.eb_n0_db)
            ));
        }
        out.push('\n');
    }
    write_atomic(path, &out)
}

/// Companion metadata of one exported data file. Every field is optional so
/// a hand-written `{"distance_m": 0.4}` tag is a valid sidecar.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SidecarMeta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model_label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance_m: Option<f64>,
    /// −(path loss + shadowing) of a synthesized realization, dB. Exported
    /// CIR/profile files stay at unit power; the level lives here.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub large_scale_gain_db: Option<f64>,
}

/// Sidecar naming rule: strip a `.csv` extension, then a `.cir`/`.profile`
/// tag if present, and append `.meta.json` — so `run0.cir.csv` and
/// `run0.profile.csv` share the sidecar `run0.meta.json`.
pub fn sidecar_path(data_path: &Path) -> PathBuf {
    let name = data_path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let base = name.strip_suffix(".csv").unwrap_or(&name);
    let base = base
        .strip_suffix(".cir")
        .or_else(|| base.strip_suffix(".profile"))
        .unwrap_or(base);
    data_path.with_file_name(format!("{base}.meta.json"))
}

/// Reads the sidecar of a data file; `Ok(None)` when there is none.
pub fn read_sidecar(data_path: &Path) -> Result<Option<SidecarMeta>> {
    let path = sidecar_path(data_path);
    if !path.exists() {
        return Ok(None);
    }
    read_json(&path).map(Some)
}

/// Writes the sidecar of a data file.
pub fn write_sidecar(data_path: &Path, meta: &SidecarMeta) -> Result<()> {
    write_json(&sidecar_path(data_path), meta)
}

/// `path_loss` group of the fit report. All dB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathLossGroup {
    pub pl_d0: f64,
    pub alpha: f64,
    pub sigma: f64,
}

/// `rds` group of the fit report: ensemble mean and standard deviation of
/// the per-file RMS delay spreads, in ns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RdsGroup {
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianFitGroup {
    pub mu: f64,
    pub sigma: f64,
    pub log_likelihood: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaFitGroup {
    pub shape: f64,
    pub scale: f64,
    pub log_likelihood: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeibullFitGroup {
    pub scale: f64,
    pub shape: f64,
    pub log_likelihood: f64,
}

/// `gamma` group: the three candidate distributions fitted to the per-file
/// decay constants. Location/scale parameters in ns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaDistGroup {
    pub gaussian: GaussianFitGroup,
    pub gamma: GammaFitGroup,
    pub weibull: WeibullFitGroup,
}

/// `arrivals` group: pooled inter-arrival fits, rates in 1/ns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrivalsGroup {
    pub lambda: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub b: f64,
    pub single_log_likelihood: f64,
    pub mixed_log_likelihood: f64,
    pub converged: bool,
}

/// Ensemble-PDP decay fit, the low-variance γ estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleDecayGroup {
    pub gamma_ns: f64,
    pub rmse_db: f64,
}

/// The extraction report. Groups that need more inputs than were given
/// (path loss wants distance tags, the γ distribution wants several files,
/// arrival fitting wants enough pooled gaps) are omitted rather than filled
/// with placeholders. Times in ns, rates in 1/ns except where a field name
/// says otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub threshold_db: f64,
    pub n_files: usize,
    pub rds: RdsGroup,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path_loss: Option<PathLossGroup>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<GammaDistGroup>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_ensemble: Option<EnsembleDecayGroup>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arrivals: Option<ArrivalsGroup>,
    pub rds_per_file_ns: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold_sweep: Option<Vec<ThresholdSweepRow>>,
}

/// The design report: the configuration's own fields plus the derived
/// throughput numbers and rule margins.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignReport {
    #[serde(flatten)]
    pub config: OfdmConfig,
    pub rate_bps: f64,
    pub latency_s: f64,
    pub kappa: f64,
    pub envelope: DesignEnvelope,
    pub check: DesignCheck,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sounding::Window;

    fn dir() -> tempfile::TempDir {
        tempfile::tempdir().unwrap()
    }

    #[test]
    fn sweep_files_round_trip() {
        let d = dir();
        let path = d.path().join("cal.csv");
        let geometry = SweepGeometry::new(57e9, 62e9, 64).unwrap();
        let samples: Vec<Complex64> = (0..64)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let sweep = FrequencySweep::new(geometry, samples, "cal").unwrap();
        write_sweep_csv(&path, &sweep).unwrap();
        let back = read_sweep_csv(&path).unwrap();
        assert!(back.geometry.matches(&sweep.geometry, 1e-9));
        assert_eq!(back.samples, sweep.samples);
        assert_eq!(back.label, "cal");
        // Writers are deterministic: writing again produces identical bytes.
        let first = fs::read(&path).unwrap();
        write_sweep_csv(&path, &sweep).unwrap();
        assert_eq!(fs::read(&path).unwrap(), first);
    }

    #[test]
    fn cir_and_profile_files_round_trip() {
        let d = dir();
        let cir_path = d.path().join("run.cir.csv");
        let cir = ImpulseResponse::new(
            2e-10,
            0.0,
            vec![
                Complex64::new(1.0, 0.5),
                Complex64::new(-0.25, 0.0),
                Complex64::new(0.0, 1e-9),
            ],
        )
        .unwrap();
        write_cir_csv(&cir_path, &cir).unwrap();
        assert_eq!(read_cir_csv(&cir_path).unwrap(), cir);

        let profile_path = d.path().join("run.profile.csv");
        let profile = MultipathProfile::new(
            vec![(0.0, 1.0), (3.7e-9, 0.125), (9.9e-9, 1e-3)],
            30.0,
        )
        .unwrap();
        write_profile_csv(&profile_path, &profile).unwrap();
        let back = read_profile_csv(&profile_path).unwrap();
        assert_eq!(back.paths(), profile.paths());
    }

    #[test]
    fn malformed_files_name_the_line() {
        let d = dir();
        let path = d.path().join("bad.csv");

        fs::write(&path, "wrong,header,here\n1,2,3\n").unwrap();
        match read_sweep_csv(&path) {
            Err(Error::MalformedCsv { line: 1, .. }) => {}
            other => panic!("expected header error, got {other:?}"),
        }

        fs::write(&path, "freq_hz,re,im\n57e9,1,0\n57.0001e9,oops,0\n").unwrap();
        match read_sweep_csv(&path) {
            Err(Error::MalformedCsv { line: 3, message, .. }) => {
                assert!(message.contains("oops"), "message: {message}");
            }
            other => panic!("expected field error, got {other:?}"),
        }

        fs::write(
            &path,
            "freq_hz,re,im\n57.0e9,1,0\n57.1e9,1,0\n57.3e9,1,0\n",
        )
        .unwrap();
        match read_sweep_csv(&path) {
            Err(Error::NonUniformGrid { line: 4, .. }) => {}
            other => panic!("expected grid error, got {other:?}"),
        }

        fs::write(&path, "freq_hz,re,im\n57e9,1,0\n").unwrap();
        assert!(matches!(read_sweep_csv(&path), Err(Error::TooFewPoints(1))));
    }

    #[test]
    fn sweep_reader_feeds_the_transform_pipeline() {
        // A constant sweep read back from disk still transforms to a unit
        // impulse — the reader's geometry is the transform's geometry.
        let d = dir();
        let path = d.path().join("flat.csv");
        let geometry = SweepGeometry::new(57e9, 62e9, 32).unwrap();
        let sweep =
            FrequencySweep::new(geometry, vec![Complex64::ONE; 32], "flat").unwrap();
        write_sweep_csv(&path, &sweep).unwrap();
        let cir = crate::sounding::cfr_to_cir(&read_sweep_csv(&path).unwrap(), Window::None);
        assert!((cir.samples[0].norm() - 1.0).abs() < 1e-12);
        assert!(cir.samples[1..].iter().all(|s| s.norm() < 1e-12));
    }

    #[test]
    fn sidecars_follow_the_naming_rule() {
        assert_eq!(
            sidecar_path(Path::new("/x/run0.cir.csv")),
            Path::new("/x/run0.meta.json")
        );
        assert_eq!(
            sidecar_path(Path::new("/x/run0.profile.csv")),
            Path::new("/x/run0.meta.json")
        );
        assert_eq!(
            sidecar_path(Path::new("data.csv")),
            Path::new("data.meta.json")
        );
        assert_eq!(sidecar_path(Path::new("bare")), Path::new("bare.meta.json"));
    }

    #[test]
    fn sidecar_round_trip_and_minimal_form() {
        let d = dir();
        let data = d.path().join("run3.cir.csv");
        let meta = SidecarMeta {
            seed: Some(7),
            model_label: Some("sc1".into()),
            distance_m: Some(0.45),
            large_scale_gain_db: Some(-55.2),
        };
        write_sidecar(&data, &meta).unwrap();
        assert_eq!(read_sidecar(&data).unwrap(), Some(meta));
        // The two exports of one realization share a sidecar.
        assert_eq!(
            read_sidecar(&d.path().join("run3.profile.csv")).unwrap().unwrap().seed,
            Some(7)
        );
        // A hand-written distance tag is a valid sidecar.
        fs::write(sidecar_path(&data), "{\"distance_m\": 0.4}").unwrap();
        let minimal = read_sidecar(&data).unwrap().unwrap();
        assert_eq!(minimal.distance_m, Some(0.4));
        assert_eq!(minimal.seed, None);
        // Missing sidecar is not an error.
        assert_eq!(read_sidecar(&d.path().join("other.csv")).unwrap(), None);
    }

    #[test]
    fn ber_csv_has_the_exact_column_set() {
        use crate::ofdm::{BerPoint, StopRule};
        let d = dir();
        let curve = BerCurve {
            points: vec![BerPoint {
                eb_n0_db: 0.0,
                ber: 0.078,
                bits: 1_000_000,
                errors: 78_000,
                capped: false,
            }],
            config: OfdmConfig::new(1024, 0, 1024, 1, 5e9).unwrap(),
            channel_label: "flat".into(),
            seed: 0,
        };
        let _ = StopRule::default();
        let plain = d.path().join("ber.csv");
        write_ber_csv(&plain, &curve, false).unwrap();
        let text = fs::read_to_string(&plain).unwrap();
        assert!(text.starts_with("ebn0_db,ber,bits,errors\n"));
        assert!(text.contains("0,0.078,1000000,78000\n"));
        let with = d.path().join("ber_theory.csv");
        write_ber_csv(&with, &curve, true).unwrap();
        let text = fs::read_to_string(&with).unwrap();
        assert!(text.starts_with("ebn0_db,ber,bits,errors,awgn_theory,rayleigh_theory\n"));
    }

    #[test]
    fn fit_report_exposes_the_specified_key_paths() {
        let report = FitReport {
            threshold_db: 30.0,
            n_files: 96,
            rds: RdsGroup { mean: 113.4, std: 18.0 },
            path_loss: Some(PathLossGroup { pl_d0: 54.711, alpha: 0.02, sigma: 0.39 }),
            gamma: Some(GammaDistGroup {
                gaussian: GaussianFitGroup { mu: 175.2, sigma: 4.9, log_likelihood: -1.0 },
                gamma: GammaFitGroup { shape: 1281.0, scale: 0.137, log_likelihood: -1.1 },
                weibull: WeibullFitGroup { scale: 177.5, shape: 42.3, log_likelihood: -1.2 },
            }),
            gamma_ensemble: Some(EnsembleDecayGroup { gamma_ns: 175.9, rmse_db: 0.4 }),
            arrivals: Some(ArrivalsGroup {
                lambda: 0.985,
                lambda1: 0.083,
                lambda2: 1.180,
                b: 0.015,
                single_log_likelihood: -2.0,
                mixed_log_likelihood: -1.9,
                converged: true,
            }),
            rds_per_file_ns: vec![110.0, 116.8],
            threshold_sweep: None,
        };
        let value: serde_json::Value = serde_json::from_str(
            &serde_json::to_string(&report).unwrap(),
        )
        .unwrap();
        for path in [
            "/path_loss/pl_d0",
            "/path_loss/alpha",
            "/path_loss/sigma",
            "/rds/mean",
            "/rds/std",
            "/gamma/gaussian/mu",
            "/gamma/gamma/shape",
            "/gamma/weibull/scale",
            "/arrivals/lambda",
            "/arrivals/lambda1",
            "/arrivals/lambda2",
            "/arrivals/b",
        ] {
            assert!(value.pointer(path).is_some(), "missing {path}");
        }
        let back: FitReport = serde_json::from_value(value).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn design_report_mirrors_the_config_fields() {
        use crate::ofdm::{check_design, rate_and_latency};
        let config = OfdmConfig::new(8192, 5000, 6720, 1, 5e9).unwrap();
        let envelope = DesignEnvelope { t_max: 1e-6, doppler_hz: 2000.0 };
        let rl = rate_and_latency(&config);
        let report = DesignReport {
            config,
            rate_bps: rl.rate_bps,
            latency_s: rl.latency_s,
            kappa: rl.kappa,
            envelope,
            check: check_design(&config, &envelope),
        };
        let value = serde_json::to_value(report).unwrap();
        // Flattened: the config's own keys sit at the top level.
        assert!(value.pointer("/n_fft").is_some());
        assert!(value.pointer("/n_cp").is_some());
        assert!(value.pointer("/rate_bps").is_some());
        assert!(value.pointer("/check/cp_ok").is_some());
        let back: DesignReport = serde_json::from_value(value).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn writes_leave_no_temp_files_behind() {
        let d = dir();
        let path = d.path().join("out.csv");
        let profile = MultipathProfile::new(vec![(0.0, 1.0)], 30.0).unwrap();
        write_profile_csv(&path, &profile).unwrap();
        let names: Vec<String> = fs::read_dir(d.path())
            .unwrap()
            .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
            .collect();
        assert_eq!(names, vec!["out.csv"]);
    }
}
