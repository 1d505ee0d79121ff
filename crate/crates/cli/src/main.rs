use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use eigenlocus::diagnostics::{DEFAULT_IDENTITY_REL_TOL, DEFAULT_KKT_TOL};
use eigenlocus::experiment::{run_experiment, ExperimentConfig, RunSet};
use eigenlocus::multiclass::{multimeter, MultimeterThresholds};
use eigenlocus::{diagnose, fit, Dataset, DiagnoseOptions, Error, Model, Options};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;
const SEED_VAR: &str = "EIGENLOCUS_SEED";

/// Linear SVM trained through its Wolfe dual, with audits and Gaussian experiments.
#[derive(Parser)]
#[command(name = "eigenlocus", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a model on a labeled CSV and write the model document.
    Train {
        #[arg(long)]
        data: PathBuf,
        /// Regularization constant; `hard` selects the hard-margin setting.
        #[arg(long, value_parser = parse_c)]
        c: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score every row of a CSV; prints `index,score,label`.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
    },
    /// Audit a model against its training data. Exit 1 when any check fails.
    Diagnose {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// Tolerance for both the KKT audit and the relative identity bound.
        #[arg(long, value_parser = parse_positive)]
        tol: Option<f64>,
        /// Report document path; defaults to `<model>.report.json`.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run a config-driven experiment and write summary and plot data.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's output directory.
        #[arg(long)]
        outdir: Option<PathBuf>,
    },
    /// Measure class overlap with a held-out split.
    Multimeter {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        heldout: f64,
        #[arg(long, default_value_t = 1.0, value_parser = parse_c)]
        c: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
}

fn parse_positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        Ok(v) => Err(format!("must be positive and finite, found {v}")),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_c(s: &str) -> Result<f64, String> {
    if s == "hard" {
        return Ok(eigenlocus::hard_margin_c());
    }
    parse_positive(s)
}

fn seed_override() -> anyhow::Result<Option<u64>> {
    match std::env::var(SEED_VAR) {
        Ok(v) => Ok(Some(v.trim().parse().map_err(|_| Error::Config {
            field: SEED_VAR.into(),
            message: format!("not an unsigned integer: `{v}`"),
        })?)),
        Err(_) => Ok(None),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let io = e.chain().any(|c| {
                c.downcast_ref::<Error>().is_some_and(Error::is_io)
                    || c.downcast_ref::<std::io::Error>().is_some()
            });
            ExitCode::from(if io { EXIT_IO } else { EXIT_USAGE })
        }
    }
}

fn run(cmd: Command) -> anyhow::Result<u8> {
    match cmd {
        Command::Train { data, c, out } => train(&data, c, &out),
        Command::Predict { model, data } => predict(&model, &data),
        Command::Diagnose { model, data, tol, report } => {
            let report = report.unwrap_or_else(|| model.with_extension("report.json"));
            diagnose_cmd(&model, &data, tol, &report)
        }
        Command::Experiment { config, outdir } => experiment(&config, outdir),
        Command::Multimeter { data, heldout, c, seed, json } => {
            let seed = seed_override()?.unwrap_or(seed);
            multimeter_cmd(&data, heldout, c, seed, json)
        }
    }
}

fn train(data: &Path, c: f64, out: &Path) -> anyhow::Result<u8> {
    let ds = Dataset::load_csv(data)?;
    let model = fit(&ds, c, &Options::default())?;
    model.save(out)?;
    let s = model.solver().context("fitted model carries solver statistics")?;
    println!("N = {}", ds.len());
    println!("d = {}", ds.dim());
    println!("support vectors = {}", model.extremes().len());
    println!("|tau| = {:.12e}", model.tau_norm());
    println!("tau = {:?}", model.tau());
    println!("tau0 = {:.12e}", model.tau0());
    println!("duality gap = {:.3e}", s.duality_gap);
    if !s.converged {
        eprintln!("warning: solver stopped after {} iterations without converging", s.iterations);
    }
    Ok(0)
}

fn predict(model: &Path, data: &Path) -> anyhow::Result<u8> {
    let m = Model::load(model)?;
    let ds = Dataset::load_csv(data)?;
    println!("index,score,label");
    let mut wrong = 0usize;
    for i in 0..ds.len() {
        let out = m.decide(ds.point(i))?;
        if out.label != ds.labels()[i] {
            wrong += 1;
        }
        println!("{i},{:.12e},{}", out.score, out.label.as_i8());
    }
    eprintln!("error rate against file labels: {:.6}", wrong as f64 / ds.len() as f64);
    Ok(0)
}

fn diagnose_cmd(model: &Path, data: &Path, tol: Option<f64>, report: &Path) -> anyhow::Result<u8> {
    let m = Model::load(model)?;
    let ds = Dataset::load_csv(data)?;
    if m.dim() != ds.dim() || m.n_train() != ds.len() {
        bail!(
            "model was trained on {} points in {} dimensions, data has {} in {}",
            m.n_train(),
            m.dim(),
            ds.len(),
            ds.dim()
        );
    }
    let opts = DiagnoseOptions {
        kkt_tol: tol.unwrap_or(DEFAULT_KKT_TOL),
        identity_rel_tol: tol.unwrap_or(DEFAULT_IDENTITY_REL_TOL),
        ..DiagnoseOptions::default()
    };
    let r = diagnose(&m, &ds, &opts)?;
    std::fs::write(report, r.to_json()?).map_err(|e| {
        anyhow::Error::new(e).context(format!("writing {}", report.display()))
    })?;
    print!("{}", r.to_table());
    Ok(if r.pass { 0 } else { EXIT_FAIL })
}

fn experiment(config: &Path, outdir: Option<PathBuf>) -> anyhow::Result<u8> {
    let mut cfg = ExperimentConfig::load(config)?;
    if let Some(seed) = seed_override()? {
        cfg.seed = seed;
    }
    let dir = outdir.unwrap_or_else(|| cfg.default_outdir());
    let out = run_experiment(&cfg, &Options::default())?;
    out.write(&dir)?;
    let s = &out.summary;
    println!("experiment {} (C = {:e}, seeds {:?})", s.name, s.c, s.seeds);
    match &s.results {
        RunSet::Binary { runs, medians } => {
            for r in runs {
                let bayes = r.bayes_error_analytic.or(r.bayes_error_mc);
                println!(
                    "seed {}: svm error {:.4}, bayes {}, angle {}, sv fraction {:.3}, line {}, diagnostics {}",
                    r.seed,
                    r.svm_error,
                    opt(bayes, 4),
                    opt(r.angle_deg, 2),
                    r.sv_fraction,
                    r.svm_line.map_or("-".into(), |(a, b)| format!("x2 = {a:.4} x1 + {b:.4}")),
                    if r.diagnostics_pass { "PASS".to_string() } else { format!("FAIL {:?}", r.diagnostics_failures) }
                );
            }
            println!(
                "median: svm error {:.4}, sv fraction {:.3}, angle {}",
                medians.svm_error,
                medians.sv_fraction,
                opt(medians.angle_deg, 2)
            );
        }
        RunSet::WeakDual { runs, seeds_with_contrast_10pp } => {
            for r in runs {
                println!(
                    "seed {}: sv fraction regularized {:.3} vs unregularized {:.3} ({:+.1} pp)",
                    r.seed, r.report.regularized.sv_fraction, r.report.under_regularized.sv_fraction, r.contrast_pp
                );
            }
            println!("seeds with a contrast of at least 10 pp: {seeds_with_contrast_10pp} of {}", runs.len());
        }
        RunSet::Multiclass { class_ids, runs } => {
            for r in runs {
                println!("seed {}: accuracy {:.4}", r.seed, r.accuracy);
                for (k, id) in class_ids.iter().enumerate() {
                    println!(
                        "  {id}: error {:.4} (bayes {:.4}) confusion {:?}",
                        r.class_error[k], r.bayes_class_error[k], r.confusion[k]
                    );
                }
            }
        }
    }
    println!("wrote {}", dir.display());
    Ok(0)
}

fn opt(v: Option<f64>, digits: usize) -> String {
    v.map_or("-".into(), |v| format!("{v:.digits$}"))
}

fn multimeter_cmd(data: &Path, heldout: f64, c: f64, seed: u64, json: bool) -> anyhow::Result<u8> {
    let ds = Dataset::load_csv(data)?;
    let r = multimeter(&ds, c, heldout, seed, &MultimeterThresholds::default(), &Options::default())?;
    if json {
        println!("{}", serde_json::to_string_pretty(&r)?);
    } else {
        println!("estimated error   {:.4}", r.estimated_error);
        println!("sv fraction       {:.4}", r.sv_fraction);
        println!("|tau|             {:.6e}", r.tau_norm);
        println!("homogeneous       {}", r.homogeneity_flag);
        println!("grade             {:?}", r.separability_grade);
        println!("train / held out  {} / {}", r.n_train, r.n_heldout);
    }
    Ok(0)
}
