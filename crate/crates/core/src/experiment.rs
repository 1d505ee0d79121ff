//! Config-driven experiments: sample Gaussian classes (or load a CSV), fit,
//! compare with the Bayes oracle and write a summary plus plot-data CSVs.
//!
//! ```json
//! {"version": 1, "name": "example-one", "mode": "binary",
//!  "classes": [{"mean": [3.0, 0.5], "covariance": [[0.5, 0.0], [0.0, 2.0]]},
//!              {"mean": [3.0, -0.5], "covariance": [[0.5, 0.0], [0.0, 2.0]]}],
//!  "n_train": 300, "n_test": 100000, "C": 1e-4, "seed": 1, "repeats": 5}
//! ```
//!
//! `C` is a positive number or the string `"hard"`. `data` (a CSV path,
//! relative to the config file) replaces `classes` in binary mode.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::dataset::LabeledDataset;
use crate::diagnostics::{diagnose, weak_dual_experiment, DiagnoseOptions, WeakDualReport};
use crate::error::{Error, Result};
use crate::gaussian::{
    bayes_decide_multi, bayes_error, bayes_oracle, classifier_error, sample_dataset,
    sample_dataset_streams, ErrorMethod, GaussianSpec, OracleKind, TEST_STREAMS,
};
use crate::geometry::{dot, norm, Label, Matrix};
use crate::model::{fit, EigenlocusModel};
use crate::multiclass::{train_engine, MultimeterReading, MultimeterThresholds};
use crate::solver::{hard_margin_c, SolverOptions};

pub const CONFIG_VERSION: u32 = 1;
pub const SUMMARY_VERSION: u32 = 1;
/// Class `k` of a multiclass run trains on stream `base + k`.
pub const MULTICLASS_TRAIN_STREAM_BASE: u64 = 16;
pub const MULTICLASS_TEST_STREAM_BASE: u64 = 48;
/// Points per plotted line.
pub const LINE_SAMPLES: usize = 101;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Binary,
    WeakDual,
    Multiclass,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CValue {
    Value(f64),
    Named(String),
}

impl CValue {
    pub fn resolve(&self) -> Result<f64> {
        match self {
            CValue::Value(c) if *c > 0.0 && c.is_finite() => Ok(*c),
            CValue::Value(c) => Err(Error::config("C", format!("must be positive and finite, found {c}"))),
            CValue::Named(s) if s == "hard" => Ok(hard_margin_c()),
            CValue::Named(s) => Err(Error::config("C", format!("expected a number or \"hard\", found \"{s}\""))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassConfig {
    #[serde(default)]
    pub id: Option<String>,
    pub mean: Vec<f64>,
    /// Rows of the covariance matrix.
    pub covariance: Vec<Vec<f64>>,
    #[serde(default)]
    pub prior: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub name: String,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub classes: Vec<ClassConfig>,
    #[serde(default)]
    pub data: Option<PathBuf>,
    #[serde(default = "default_n_train")]
    pub n_train: usize,
    #[serde(default = "default_n_test")]
    pub n_test: usize,
    #[serde(rename = "C")]
    pub c: CValue,
    pub seed: u64,
    #[serde(default = "default_repeats")]
    pub repeats: usize,
    #[serde(default)]
    pub outdir: Option<PathBuf>,
    #[serde(default)]
    pub thresholds: MultimeterThresholds,
}

fn default_n_train() -> usize {
    300
}

fn default_n_test() -> usize {
    100_000
}

fn default_repeats() -> usize {
    1
}

const REQUIRED: [&str; 4] = ["version", "name", "C", "seed"];

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)
            .map_err(|e| Error::config("<document>", format!("malformed JSON: {e}")))?;
        let obj = value
            .as_object()
            .ok_or_else(|| Error::config("<document>", "config must be a JSON object"))?;
        for key in REQUIRED {
            if !obj.contains_key(key) {
                return Err(Error::config(key, "required field is missing"));
            }
        }
        for (key, v) in obj {
            let mut probe = serde_json::json!({"version": 1, "name": "", "C": 1.0, "seed": 0});
            probe[key.as_str()] = v.clone();
            if let Err(e) = serde_json::from_value::<Self>(probe) {
                return Err(Error::config(key.as_str(), e.to_string()));
            }
        }
        let cfg: Self = serde_json::from_value(value)
            .map_err(|e| Error::config("<document>", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config; a relative `data` path is resolved against the
    /// config's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_json(&text)?;
        if let (Some(data), Some(dir)) = (&cfg.data, path.parent()) {
            if data.is_relative() {
                cfg.data = Some(dir.join(data));
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(Error::config(
                "version",
                format!("unsupported version {} (expected {CONFIG_VERSION})", self.version),
            ));
        }
        if self.name.is_empty() {
            return Err(Error::config("name", "must not be empty"));
        }
        self.c.resolve()?;
        if self.n_train < 2 {
            return Err(Error::config("n_train", format!("must be at least 2, found {}", self.n_train)));
        }
        if self.n_test == 0 {
            return Err(Error::config("n_test", "must be positive"));
        }
        if self.repeats == 0 {
            return Err(Error::config("repeats", "must be positive"));
        }
        match (self.mode, &self.data, self.classes.len()) {
            (Mode::Binary, Some(_), 0) => return Ok(()),
            (_, Some(_), _) if self.mode != Mode::Binary => {
                return Err(Error::config("data", "only binary experiments accept a dataset path"));
            }
            (_, Some(_), _) => {
                return Err(Error::config("data", "give either `data` or `classes`, not both"));
            }
            (Mode::Multiclass, None, k) if k < 2 => {
                return Err(Error::config("classes", format!("need at least 2 classes, found {k}")));
            }
            (Mode::Binary | Mode::WeakDual, None, k) if k != 2 => {
                return Err(Error::config("classes", format!("need exactly 2 classes, found {k}")));
            }
            _ => {}
        }
        let d = self.classes[0].mean.len();
        for (k, class) in self.classes.iter().enumerate() {
            let field = |f: &str| format!("classes[{k}].{f}");
            if class.mean.len() != d || d == 0 {
                return Err(Error::config(field("mean"), format!("expected {d} entries, found {}", class.mean.len())));
            }
            if class.covariance.len() != d || class.covariance.iter().any(|r| r.len() != d) {
                return Err(Error::config(field("covariance"), format!("expected a {d}x{d} matrix")));
            }
            if let Some(p) = class.prior {
                if !(p > 0.0 && p < 1.0) {
                    return Err(Error::config(field("prior"), format!("must lie in (0, 1), found {p}")));
                }
            }
        }
        let priors: Vec<f64> = self.priors();
        if (priors.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::config("classes", "priors must sum to 1"));
        }
        self.specs()?;
        Ok(())
    }

    fn priors(&self) -> Vec<f64> {
        let m = self.classes.len() as f64;
        self.classes.iter().map(|c| c.prior.unwrap_or(1.0 / m)).collect()
    }

    pub fn class_ids(&self) -> Vec<String> {
        self.classes
            .iter()
            .enumerate()
            .map(|(k, c)| c.id.clone().unwrap_or_else(|| format!("class{}", k + 1)))
            .collect()
    }

    pub fn specs(&self) -> Result<Vec<GaussianSpec<f64>>> {
        self.classes
            .iter()
            .zip(self.priors())
            .enumerate()
            .map(|(k, (c, p))| {
                let cov = Matrix::from_rows(&c.covariance)?;
                GaussianSpec::new(c.mean.clone(), cov, p)
                    .map_err(|e| Error::config(format!("classes[{k}]"), e.to_string()))
            })
            .collect()
    }

    pub fn seeds(&self) -> Vec<u64> {
        (0..self.repeats as u64).map(|k| self.seed + k).collect()
    }

    pub fn default_outdir(&self) -> PathBuf {
        self.outdir.clone().unwrap_or_else(|| PathBuf::from("out").join(&self.name))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BinaryRun {
    pub seed: u64,
    pub n_train: usize,
    pub sv_fraction: f64,
    pub svm_error: f64,
    /// `Φ(−Δ/2)`; present for a common covariance with equal priors.
    pub bayes_error_analytic: Option<f64>,
    pub bayes_error_mc: Option<f64>,
    /// Degrees between `τ` and the oracle's linear normal.
    pub angle_deg: Option<f64>,
    /// `|τ₀/‖τ‖ − b/‖w‖|` for the oracle boundary `wᵀx + b = 0`.
    pub offset_difference: Option<f64>,
    pub svm_line: Option<(f64, f64)>,
    pub bayes_line: Option<(f64, f64)>,
    pub tau: Vec<f64>,
    pub tau0: f64,
    pub converged: bool,
    pub duality_gap: f64,
    pub iterations: usize,
    pub homogeneity_flag: bool,
    pub diagnostics_pass: bool,
    pub diagnostics_failures: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BinaryMedians {
    pub svm_error: f64,
    pub sv_fraction: f64,
    pub angle_deg: Option<f64>,
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeakDualRun {
    pub seed: u64,
    pub report: WeakDualReport<f64>,
    /// Regularized minus under-regularized SV fraction, in percentage points.
    pub contrast_pp: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MulticlassRun {
    pub seed: u64,
    pub confusion: Vec<Vec<usize>>,
    pub accuracy: f64,
    pub class_error: Vec<f64>,
    /// Per-class error of the Bayes rule on the same test draws.
    pub bayes_class_error: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum RunSet {
    Binary {
        runs: Vec<BinaryRun>,
        medians: BinaryMedians,
    },
    WeakDual {
        runs: Vec<WeakDualRun>,
        seeds_with_contrast_10pp: usize,
    },
    Multiclass {
        class_ids: Vec<String>,
        runs: Vec<MulticlassRun>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentSummary {
    pub version: u32,
    pub name: String,
    #[serde(rename = "C")]
    pub c: f64,
    pub n_train: usize,
    pub n_test: usize,
    pub seeds: Vec<u64>,
    #[serde(flatten)]
    pub results: RunSet,
}

/// Plot data for one run; kept out of the summary document.
#[derive(Clone, Debug)]
pub struct Artifact {
    pub file: String,
    pub csv: String,
}

#[derive(Clone, Debug)]
pub struct ExperimentOutput {
    pub summary: ExperimentSummary,
    pub artifacts: Vec<Artifact>,
}

impl ExperimentOutput {
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join("summary.json");
        fs::write(&path, crate::json::to_string(&self.summary)?).map_err(|e| Error::io(&path, e))?;
        for a in &self.artifacts {
            let path = dir.join(&a.file);
            fs::write(&path, &a.csv).map_err(|e| Error::io(&path, e))?;
        }
        Ok(())
    }
}

pub fn run_experiment(cfg: &ExperimentConfig, opts: &SolverOptions<f64>) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let c = cfg.c.resolve()?;
    let seeds = cfg.seeds();
    let mut artifacts = Vec::new();
    let results = match cfg.mode {
        Mode::Binary => match &cfg.data {
            Some(path) => {
                let data = LabeledDataset::load_csv(path)?;
                let (run, model) = fit_dataset(&data, c, opts, cfg.seed, &cfg.thresholds)?;
                artifacts.extend(binary_artifacts(&data, &model, None, "")?);
                binary_set(vec![run])
            }
            None => {
                let specs = cfg.specs()?;
                let mut runs = Vec::new();
                for &seed in &seeds {
                    let (run, data, model) = binary_run(cfg, &specs, c, seed, opts)?;
                    let oracle = bayes_oracle(&specs[0], &specs[1])?;
                    let bayes = (oracle.kind == OracleKind::Linear).then_some((oracle.w.as_slice(), oracle.c - oracle.eta));
                    artifacts.extend(binary_artifacts(&data, &model, bayes, &format!("_seed{seed}"))?);
                    runs.push(run);
                }
                binary_set(runs)
            }
        },
        Mode::WeakDual => {
            let specs = cfg.specs()?;
            let mut runs = Vec::new();
            for &seed in &seeds {
                let train = sample_dataset(&specs[0], &specs[1], cfg.n_train, cfg.n_train, seed)?;
                let test = sample_dataset_streams(&specs[0], &specs[1], cfg.n_test, cfg.n_test, seed, TEST_STREAMS)?;
                let report = weak_dual_experiment(&train, Some(&test), c, opts, crate::diagnostics::DEFAULT_KKT_TOL)?;
                let contrast_pp = 100.0 * (report.regularized.sv_fraction - report.under_regularized.sv_fraction);
                runs.push(WeakDualRun { seed, report, contrast_pp });
            }
            let seeds_with_contrast_10pp = runs.iter().filter(|r| r.contrast_pp >= 10.0).count();
            RunSet::WeakDual { runs, seeds_with_contrast_10pp }
        }
        Mode::Multiclass => {
            let specs = cfg.specs()?;
            let ids = cfg.class_ids();
            let mut runs = Vec::new();
            for &seed in &seeds {
                let (run, scatter) = multiclass_run(cfg, &specs, &ids, c, seed, opts)?;
                artifacts.push(Artifact { file: format!("scatter_seed{seed}.csv"), csv: scatter });
                runs.push(run);
            }
            RunSet::Multiclass { class_ids: ids, runs }
        }
    };
    Ok(ExperimentOutput {
        summary: ExperimentSummary {
            version: SUMMARY_VERSION,
            name: cfg.name.clone(),
            c,
            n_train: cfg.n_train,
            n_test: cfg.n_test,
            seeds: if cfg.data.is_some() { vec![cfg.seed] } else { seeds },
            results,
        },
        artifacts,
    })
}

fn binary_set(runs: Vec<BinaryRun>) -> RunSet {
    let opt_median = |f: &dyn Fn(&BinaryRun) -> Option<f64>| {
        let v: Option<Vec<f64>> = runs.iter().map(f).collect();
        v.map(median)
    };
    let medians = BinaryMedians {
        svm_error: median(runs.iter().map(|r| r.svm_error).collect()),
        sv_fraction: median(runs.iter().map(|r| r.sv_fraction).collect()),
        angle_deg: opt_median(&|r| r.angle_deg),
        slope: opt_median(&|r| r.svm_line.map(|l| l.0)),
        intercept: opt_median(&|r| r.svm_line.map(|l| l.1)),
    };
    RunSet::Binary { runs, medians }
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    match v.len() {
        0 => f64::NAN,
        n if n % 2 == 1 => v[n / 2],
        n => 0.5 * (v[n / 2 - 1] + v[n / 2]),
    }
}

fn fit_dataset(
    data: &LabeledDataset<f64>,
    c: f64,
    opts: &SolverOptions<f64>,
    seed: u64,
    thresholds: &MultimeterThresholds,
) -> Result<(BinaryRun, EigenlocusModel<f64>)> {
    let model = fit(data, c, opts)?;
    let wrong = (0..data.len())
        .filter(|&i| Label::from_score(model.score(data.point(i))) != data.labels()[i])
        .count();
    let err = wrong as f64 / data.len() as f64;
    let report = diagnose(&model, data, &DiagnoseOptions::default())?;
    let (iterations, duality_gap) = model.solver().map_or((0, f64::NAN), |s| (s.iterations, s.duality_gap));
    let reading = MultimeterReading::from_measurements(err, model.sv_fraction(), model.tau_norm(), thresholds);
    let run = BinaryRun {
        seed,
        n_train: data.len(),
        sv_fraction: model.sv_fraction(),
        svm_error: err,
        bayes_error_analytic: None,
        bayes_error_mc: None,
        angle_deg: None,
        offset_difference: None,
        svm_line: model.boundary_line_2d(),
        bayes_line: None,
        tau: model.tau().to_vec(),
        tau0: model.tau0(),
        converged: model.converged(),
        duality_gap,
        iterations,
        homogeneity_flag: reading.homogeneity_flag,
        diagnostics_pass: report.pass,
        diagnostics_failures: report.failures,
    };
    Ok((run, model))
}

/// One seeded binary run: sample, fit, score against fresh draws and the oracle.
pub fn binary_run(
    cfg: &ExperimentConfig,
    specs: &[GaussianSpec<f64>],
    c: f64,
    seed: u64,
    opts: &SolverOptions<f64>,
) -> Result<(BinaryRun, LabeledDataset<f64>, EigenlocusModel<f64>)> {
    let (a, b) = (&specs[0], &specs[1]);
    let data = sample_dataset(a, b, cfg.n_train, cfg.n_train, seed)?;
    let (mut run, model) = fit_dataset(&data, c, opts, seed, &cfg.thresholds)?;
    run.svm_error = classifier_error(|x| Label::from_score(model.score(x)), a, b, cfg.n_test, seed)?;
    let oracle = bayes_oracle(a, b)?;
    run.bayes_error_analytic = bayes_error(a, b, ErrorMethod::AnalyticLinear).ok();
    run.bayes_error_mc = Some(bayes_error(a, b, ErrorMethod::MonteCarlo { n: cfg.n_test, seed })?);
    if oracle.kind == OracleKind::Linear {
        let (wn, tn) = (norm(&oracle.w), model.tau_norm());
        if wn > 0.0 && tn > 0.0 {
            let cos = (dot(&oracle.w, model.tau()) / (wn * tn)).clamp(-1.0, 1.0);
            run.angle_deg = Some(cos.acos().to_degrees());
            run.offset_difference = Some((model.tau0() / tn - (oracle.c - oracle.eta) / wn).abs());
        }
        run.bayes_line = oracle.line_2d();
    }
    let reading = MultimeterReading::from_measurements(
        run.svm_error,
        run.sv_fraction,
        model.tau_norm(),
        &cfg.thresholds,
    );
    run.homogeneity_flag = reading.homogeneity_flag;
    Ok((run, data, model))
}

fn multiclass_run(
    cfg: &ExperimentConfig,
    specs: &[GaussianSpec<f64>],
    ids: &[String],
    c: f64,
    seed: u64,
    opts: &SolverOptions<f64>,
) -> Result<(MulticlassRun, String)> {
    let train: Vec<(String, Matrix<f64>)> = specs
        .iter()
        .zip(ids)
        .enumerate()
        .map(|(k, (s, id))| {
            let x = s.sampler(seed, MULTICLASS_TRAIN_STREAM_BASE + k as u64).take_matrix(cfg.n_train);
            (id.clone(), x)
        })
        .collect();
    let engine = train_engine(&train, c, opts)?;
    let m = specs.len();
    let mut confusion = vec![vec![0usize; m]; m];
    let mut bayes_wrong = vec![0usize; m];
    let mut x = vec![0.0; specs[0].dim()];
    for (k, s) in specs.iter().enumerate() {
        let mut sampler = s.sampler(seed, MULTICLASS_TEST_STREAM_BASE + k as u64);
        for _ in 0..cfg.n_test {
            sampler.next_into(&mut x);
            confusion[k][engine.decide(&x)?.class_index] += 1;
            if bayes_decide_multi(specs, &x)? != k {
                bayes_wrong[k] += 1;
            }
        }
    }
    let n = cfg.n_test as f64;
    let correct: usize = (0..m).map(|k| confusion[k][k]).sum();
    let run = MulticlassRun {
        seed,
        accuracy: correct as f64 / (n * m as f64),
        class_error: (0..m).map(|k| 1.0 - confusion[k][k] as f64 / n).collect(),
        bayes_class_error: bayes_wrong.iter().map(|&w| w as f64 / n).collect(),
        confusion,
    };
    let mut csv = header("class,predicted", specs[0].dim());
    for (id, pts) in &train {
        for p in pts.row_iter() {
            let pred = engine.decide(p)?.class_id;
            let _ = writeln!(csv, "{},{id},{pred}", join(p));
        }
    }
    Ok((run, csv))
}

fn header(tail: &str, d: usize) -> String {
    let cols: Vec<String> = (1..=d).map(|k| format!("x{k}")).collect();
    format!("{},{tail}\n", cols.join(","))
}

fn join(p: &[f64]) -> String {
    p.iter().map(|v| format!("{v:e}")).collect::<Vec<_>>().join(",")
}

/// Scatter of the training set with multipliers and, in two dimensions,
/// sampled boundary, border and Bayes lines.
fn binary_artifacts(
    data: &LabeledDataset<f64>,
    model: &EigenlocusModel<f64>,
    bayes: Option<(&[f64], f64)>,
    suffix: &str,
) -> Result<Vec<Artifact>> {
    let mut scatter = header("label,psi,extreme", data.dim());
    let ext: std::collections::HashSet<usize> = model.extremes().iter().map(|e| e.index).collect();
    for i in 0..data.len() {
        let _ = writeln!(
            scatter,
            "{},{},{:e},{}",
            join(data.point(i)),
            data.labels()[i].as_i8(),
            model.psi()[i],
            u8::from(ext.contains(&i))
        );
    }
    let mut out = vec![Artifact { file: format!("scatter{suffix}.csv"), csv: scatter }];
    if data.dim() == 2 && model.tau_norm() > 0.0 {
        let (lo, hi) = bounding_box(data);
        let mut lines = String::from("curve,x1,x2\n");
        let mut push = |name: &str, w: &[f64], b: f64| {
            for p in line_samples(w, b, &lo, &hi) {
                let _ = writeln!(lines, "{name},{:e},{:e}", p[0], p[1]);
            }
        };
        let (tau, tau0) = (model.tau(), model.tau0());
        push("boundary", tau, tau0);
        push("border_plus", tau, tau0 - 1.0);
        push("border_minus", tau, tau0 + 1.0);
        if let Some((w, b)) = bayes {
            if norm(w) > 0.0 {
                push("bayes", w, b);
            }
        }
        out.push(Artifact { file: format!("lines{suffix}.csv"), csv: lines });
    }
    Ok(out)
}

fn bounding_box(data: &LabeledDataset<f64>) -> (Vec<f64>, Vec<f64>) {
    let d = data.dim();
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for p in data.features().row_iter() {
        for k in 0..d {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    (lo, hi)
}

/// Points of `wᵀx + b = 0` (two dimensions) spanning the box diagonal around
/// the projection of the box centre.
pub fn line_samples(w: &[f64], b: f64, lo: &[f64], hi: &[f64]) -> Vec<[f64; 2]> {
    let centre = [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0];
    let ww = dot(w, w);
    let shift = (dot(w, &centre) + b) / ww;
    let foot = [centre[0] - shift * w[0], centre[1] - shift * w[1]];
    let len = ww.sqrt();
    let dir = [-w[1] / len, w[0] / len];
    let half = 0.5 * ((hi[0] - lo[0]).powi(2) + (hi[1] - lo[1]).powi(2)).sqrt();
    (0..LINE_SAMPLES)
        .map(|k| {
            let t = -half + 2.0 * half * k as f64 / (LINE_SAMPLES - 1) as f64;
            [foot[0] + t * dir[0], foot[1] + t * dir[1]]
        })
        .collect()
}
