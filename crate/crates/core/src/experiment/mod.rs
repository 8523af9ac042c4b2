//! Configuration-driven runs that write CSV and JSON result bundles.
//!
//! Every CSV starts with a `# config_hash=<sha256>` line and every JSON file
//! carries a `config_hash` field. CSV contents depend only on the config, so
//! reruns are byte-identical; timings go to `metadata.json`.

mod config;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::channel::ChannelModel;
use crate::dof::{count_dominant, dof_modular, DofPrediction, DominantCount, Formula};
use crate::geometry::{
    projected_module_extreme_distances, sample_aperture, sample_receive_array, ApertureRegion, SampledAperture,
};
use crate::spectral::{
    channel_spectrum, convolve_sinc, g0_spectrum, measured_bandwidth, EigenSpectrum, SpectrumProfile, XiGrid,
    DEFAULT_XI_MARGIN,
};
use crate::{Error, Interval};

pub use config::{ArrayConfig, ConfigError, ExperimentConfig, SweepConfig, SweepParameter};

/// Failure of a run, with the process exit code it maps to.
#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    Numerical(Error),
    Io(std::io::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Numerical(_) => 3,
            RunError::Io(_) => 1,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "{e}"),
            RunError::Numerical(e) => write!(f, "numerical failure: {e}"),
            RunError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        RunError::Numerical(e)
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e)
    }
}

/// Files written by one run.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultBundle {
    pub dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub config_hash: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleCounts {
    pub aperture_points: usize,
    pub modules: usize,
    pub rx_count: usize,
}

/// Closed-form prediction for a config: union of per-module main lobes,
/// using extremes projected orthogonally to the array direction.
pub fn predict(cfg: &ExperimentConfig) -> Result<DofPrediction, Error> {
    let direction = cfg.direction();
    let region = cfg.region();
    let array = cfg.receive_array()?;
    let extremes = projected_module_extreme_distances(&region, &direction)?;
    let mut p = dof_modular(&extremes, array.r_min, array.r_max, cfg.wavelength)?;
    let broadside = direction.u == crate::geometry::Direction::broadside().u;
    p.formula = match (extremes.len(), broadside) {
        (1, true) => Formula::Broadside,
        (1, false) => Formula::Projected,
        _ => Formula::Modular,
    };
    p.params.insert("phi_deg".into(), cfg.array.phi_deg);
    p.params.insert("theta_deg".into(), cfg.array.theta_deg);
    Ok(p)
}

fn sampled(cfg: &ExperimentConfig) -> Result<SampledAperture, Error> {
    sample_aperture(&cfg.region(), cfg.spacing * cfg.wavelength)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigOutcome {
    pub spectrum: EigenSpectrum,
    pub count: DominantCount,
    pub prediction: DofPrediction,
    pub samples: SampleCounts,
}

/// Sample, assemble the receive-side Gram, solve, count.
pub fn eig_pipeline(cfg: &ExperimentConfig) -> Result<EigOutcome, Error> {
    let aperture = sampled(cfg)?;
    let array = cfg.receive_array()?;
    let rx = sample_receive_array(&array);
    let model = ChannelModel::new(cfg.model, cfg.wavelength)?;
    let spectrum = channel_spectrum(&aperture, &rx, &model)?;
    let count = count_dominant(&spectrum, cfg.epsilon)?;
    Ok(EigOutcome {
        spectrum,
        count,
        prediction: predict(cfg)?,
        samples: SampleCounts {
            aperture_points: aperture.len(),
            modules: aperture.module_count(),
            rx_count: rx.len(),
        },
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumOutcome {
    pub profile: SpectrumProfile,
    /// Analytic main lobe hull.
    pub omega: Interval,
    /// Width where `|g̃| ≥ 0.5 max|g̃|`.
    pub bandwidth_half: f64,
    /// Width where `|g̃| ≥ 0.05 max|g̃|`.
    pub bandwidth_5pct: f64,
    /// Largest `|Σ module spectra − spectrum|` relative to `max|g̃|`, for
    /// multi-module apertures.
    pub superposition_residual: Option<f64>,
    pub prediction: DofPrediction,
    pub samples: SampleCounts,
}

pub fn spectrum_pipeline(cfg: &ExperimentConfig) -> Result<SpectrumOutcome, Error> {
    let aperture = sampled(cfg)?;
    let array = cfg.receive_array()?;
    let prediction = predict(cfg)?;
    let omega = Interval::new(
        prediction.intervals.first().map_or(0.0, |i| i.lo),
        prediction.intervals.last().map_or(0.0, |i| i.hi),
    );
    let grid = XiGrid::covering(omega.lo, omega.hi, DEFAULT_XI_MARGIN, cfg.xi_step)?;
    let profile = convolve_sinc(&g0_spectrum(&aperture, &array, cfg.wavelength, grid)?)?;

    let modules = aperture.module_count();
    let superposition_residual = if modules > 1 {
        let mut sum: Option<SpectrumProfile> = None;
        for n in 0..modules {
            let part = convolve_sinc(&g0_spectrum(&aperture.module_subset(n), &array, cfg.wavelength, grid)?)?;
            sum = Some(match sum {
                None => part,
                Some(s) => s.add(&part)?,
            });
        }
        let sum = sum.expect("at least two modules");
        Some(max_relative_difference(&sum, &profile))
    } else {
        None
    };

    Ok(SpectrumOutcome {
        bandwidth_half: measured_bandwidth(&profile, 0.5)?,
        bandwidth_5pct: measured_bandwidth(&profile, 0.05)?,
        profile,
        omega,
        superposition_residual,
        prediction,
        samples: SampleCounts {
            aperture_points: aperture.len(),
            modules,
            rx_count: cfg.rx_count,
        },
    })
}

/// `max_i |a_i − b_i| / max_i |b_i|` over the convolved values.
pub fn max_relative_difference(a: &SpectrumProfile, b: &SpectrumProfile) -> f64 {
    let (ga, gb) = match (&a.g, &b.g) {
        (Some(x), Some(y)) => (x, y),
        _ => return f64::INFINITY,
    };
    let peak = gb.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let diff = ga.iter().zip(gb).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    if peak > 0.0 {
        diff / peak
    } else {
        diff
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub param: f64,
    pub prediction: f64,
    pub count: DominantCount,
    pub runtime_s: f64,
}

fn missing_sweep() -> ConfigError {
    ConfigError {
        field: "sweep".into(),
        message: "sweep command needs a `sweep` section".into(),
    }
}

/// Config for one sweep point.
pub fn sweep_point(cfg: &ExperimentConfig, value: f64) -> Result<ExperimentConfig, ConfigError> {
    let sweep = cfg.sweep.as_ref().ok_or_else(missing_sweep)?;
    let mut c = cfg.clone();
    c.sweep = None;
    match sweep.parameter {
        SweepParameter::RMin => {
            let length = cfg.array.r_max - cfg.array.r_min;
            c.array.r_min = value;
            c.array.r_max = value + length;
        }
        SweepParameter::GapOffset => {
            let l = sweep.module_length.expect("validated");
            c.aperture = ApertureRegion::symmetric_segments(value, value + l);
        }
        SweepParameter::HoleFraction => {
            let l = sweep.half_length.expect("validated");
            c.aperture = ApertureRegion::symmetric_segments(value * l, l);
        }
        SweepParameter::Phi => c.array.phi_deg = value,
    }
    c.validate()?;
    Ok(c)
}

pub fn sweep_pipeline(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>, RunError> {
    let values = cfg
        .sweep
        .as_ref()
        .map(|s| s.values.clone())
        .ok_or_else(missing_sweep)?;
    let points: Vec<ExperimentConfig> = values
        .iter()
        .map(|v| sweep_point(cfg, *v))
        .collect::<Result<_, _>>()?;
    let mut rows = Vec::with_capacity(points.len());
    for (v, c) in values.iter().zip(&points) {
        let start = Instant::now();
        let out = eig_pipeline(c)?;
        rows.push(SweepRow {
            param: *v,
            prediction: out.prediction.value,
            count: out.count,
            runtime_s: start.elapsed().as_secs_f64(),
        });
    }
    Ok(rows)
}

fn hash_line(hash: &str) -> String {
    format!("# config_hash={hash}\n")
}

struct Writer {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl Writer {
    fn new(dir: &Path) -> std::io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> std::io::Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents)?;
        self.files.push(path);
        Ok(())
    }

    fn json(&mut self, name: &str, value: &serde_json::Value) -> std::io::Result<()> {
        let mut s = serde_json::to_string_pretty(value).expect("json value serializes");
        s.push('\n');
        self.write(name, &s)
    }

    fn finish(self, hash: String) -> ResultBundle {
        ResultBundle {
            dir: self.dir,
            files: self.files,
            config_hash: hash,
        }
    }
}

fn metadata(
    cfg: &ExperimentConfig,
    command: &str,
    runtime_s: f64,
    samples: Option<SampleCounts>,
) -> serde_json::Value {
    serde_json::json!({
        "config_hash": cfg.hash(),
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "runtime_s": runtime_s,
        "samples": samples,
        "threads": rayon::current_num_threads(),
    })
}

fn with_hash(hash: &str, value: impl Serialize) -> serde_json::Value {
    let mut v = serde_json::to_value(value).expect("record serializes");
    if let Some(map) = v.as_object_mut() {
        map.insert("config_hash".into(), hash.into());
    }
    v
}

/// Writes `eigen.csv`, `prediction.json` and `metadata.json`.
pub fn run_eig(cfg: &ExperimentConfig, out: &Path) -> Result<ResultBundle, RunError> {
    let hash = cfg.hash();
    let start = Instant::now();
    let r = eig_pipeline(cfg)?;
    let runtime = start.elapsed().as_secs_f64();
    let mut w = Writer::new(out)?;
    w.write("eigen.csv", &(hash_line(&hash) + &r.spectrum.to_csv()))?;
    let mut pred = with_hash(&hash, &r.prediction);
    pred["dominant_count"] = serde_json::to_value(r.count).expect("count serializes");
    w.json("prediction.json", &pred)?;
    w.json("metadata.json", &metadata(cfg, "eig", runtime, Some(r.samples)))?;
    Ok(w.finish(hash))
}

/// Writes `spectrum.csv`, `prediction.json` (with measured bandwidths and
/// main-lobe endpoints) and `metadata.json`.
pub fn run_spectrum(cfg: &ExperimentConfig, out: &Path) -> Result<ResultBundle, RunError> {
    let hash = cfg.hash();
    let start = Instant::now();
    let r = spectrum_pipeline(cfg)?;
    let runtime = start.elapsed().as_secs_f64();
    let mut w = Writer::new(out)?;
    w.write("spectrum.csv", &(hash_line(&hash) + &r.profile.to_csv()))?;
    let mut pred = with_hash(&hash, &r.prediction);
    pred["omega"] = serde_json::json!([r.omega.lo, r.omega.hi]);
    pred["measured_bandwidth"] = serde_json::json!({ "0.5": r.bandwidth_half, "0.05": r.bandwidth_5pct });
    pred["superposition_residual"] = serde_json::json!(r.superposition_residual);
    w.json("prediction.json", &pred)?;
    w.json("metadata.json", &metadata(cfg, "spectrum", runtime, Some(r.samples)))?;
    Ok(w.finish(hash))
}

/// Writes `sweep.csv` with one row per sweep value and `metadata.json` with
/// per-point runtimes.
pub fn run_sweep(cfg: &ExperimentConfig, out: &Path) -> Result<ResultBundle, RunError> {
    let hash = cfg.hash();
    let start = Instant::now();
    let rows = sweep_pipeline(cfg)?;
    let runtime = start.elapsed().as_secs_f64();
    let mut csv = hash_line(&hash);
    csv.push_str("param,prediction,dominant_count,count_loose,count_strict\n");
    for r in &rows {
        csv.push_str(&format!(
            "{:.16e},{:.16e},{},{},{}\n",
            r.param, r.prediction, r.count.count, r.count.count_loose, r.count.count_strict
        ));
    }
    let mut w = Writer::new(out)?;
    w.write("sweep.csv", &csv)?;
    let mut meta = metadata(cfg, "sweep", runtime, None);
    meta["point_runtimes_s"] = serde_json::json!(rows.iter().map(|r| r.runtime_s).collect::<Vec<_>>());
    w.json("metadata.json", &meta)?;
    Ok(w.finish(hash))
}
