//! Pairwise decision banks, the voting engine and the statistical multimeter.
//!
//! Bank `i` holds one binary model per opponent `j`, trained with class `i`
//! as `+1`. Every ordered pair is trained, so an `M`-class engine carries
//! `M(M − 1)` models. The `(j, i)` model is fitted on the `(i, j)` points in the
//! same order with labels negated, which makes the pair exact mirrors.

use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::LabeledDataset;
use crate::error::{Error, Result};
use crate::geometry::{Label, Matrix};
use crate::model::{fit, EigenlocusModel};
use crate::scalar::Scalar;
use crate::solver::SolverOptions;

pub const MANIFEST_VERSION: u32 = 1;
/// RNG stream used for held-out splits.
pub const SPLIT_STREAM: u64 = 4;

#[derive(Clone, Debug, PartialEq)]
pub struct BankMember<T> {
    pub opponent: usize,
    pub model: EigenlocusModel<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecisionBank<T> {
    pub class_index: usize,
    pub members: Vec<BankMember<T>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecisionEngine<T> {
    class_ids: Vec<String>,
    banks: Vec<DecisionBank<T>>,
    c: T,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EngineDecision<T> {
    pub class_index: usize,
    pub class_id: String,
    /// `Σⱼ sign(Λᵢⱼ(x))` with a zero score voting `+1`.
    pub bank_scores: Vec<i64>,
    /// `Σⱼ Λᵢⱼ(x)`.
    pub raw_margins: Vec<T>,
}

/// Trains all ordered pairs. `classes` pairs an identifier with its points.
pub fn train_engine<T: Scalar>(
    classes: &[(String, Matrix<T>)],
    c: T,
    opts: &SolverOptions<T>,
) -> Result<DecisionEngine<T>> {
    let m = classes.len();
    if m < 2 {
        return Err(Error::invalid(format!("need at least two classes, found {m}")));
    }
    for (id, x) in classes {
        if x.rows() == 0 {
            return Err(Error::invalid(format!("class `{id}` is empty")));
        }
    }
    let pairs: Vec<(usize, usize)> = (0..m)
        .flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let fitted: Vec<Result<EigenlocusModel<T>>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (lo, hi) = (i.min(j), i.max(j));
            let base = LabeledDataset::from_classes(&classes[lo].1, &classes[hi].1)?;
            let data = if i == lo { base } else { base.with_negated_labels() };
            fit(&data, c, opts).map_err(|e| Error::Pair {
                first: classes[i].0.clone(),
                second: classes[j].0.clone(),
                source: Box::new(e),
            })
        })
        .collect();
    let mut banks: Vec<DecisionBank<T>> = (0..m)
        .map(|i| DecisionBank {
            class_index: i,
            members: Vec::with_capacity(m - 1),
        })
        .collect();
    for (&(i, j), model) in pairs.iter().zip(fitted) {
        banks[i].members.push(BankMember {
            opponent: j,
            model: model?,
        });
    }
    Ok(DecisionEngine {
        class_ids: classes.iter().map(|(id, _)| id.clone()).collect(),
        banks,
        c,
    })
}

impl<T: Scalar> DecisionEngine<T> {
    pub fn class_ids(&self) -> &[String] {
        &self.class_ids
    }

    pub fn banks(&self) -> &[DecisionBank<T>] {
        &self.banks
    }

    pub fn n_classes(&self) -> usize {
        self.class_ids.len()
    }

    pub fn n_models(&self) -> usize {
        self.banks.iter().map(|b| b.members.len()).sum()
    }

    pub fn dim(&self) -> usize {
        self.banks[0].members[0].model.dim()
    }

    pub fn model(&self, i: usize, j: usize) -> Option<&EigenlocusModel<T>> {
        self.banks
            .get(i)?
            .members
            .iter()
            .find(|m| m.opponent == j)
            .map(|m| &m.model)
    }

    /// Votes, then summed margins, then the lowest class index.
    pub fn decide(&self, x: &[T]) -> Result<EngineDecision<T>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                context: "engine input",
                expected: self.dim(),
                got: x.len(),
            });
        }
        let mut bank_scores = Vec::with_capacity(self.banks.len());
        let mut raw_margins = Vec::with_capacity(self.banks.len());
        for bank in &self.banks {
            let mut votes = 0i64;
            let mut raw = T::zero();
            for member in &bank.members {
                let s = member.model.score(x);
                votes += i64::from(Label::from_score(s).as_i8());
                raw = raw + s;
            }
            bank_scores.push(votes);
            raw_margins.push(raw);
        }
        let mut best = 0;
        for i in 1..bank_scores.len() {
            let better = bank_scores[i] > bank_scores[best]
                || (bank_scores[i] == bank_scores[best] && raw_margins[i] > raw_margins[best]);
            if better {
                best = i;
            }
        }
        Ok(EngineDecision {
            class_index: best,
            class_id: self.class_ids[best].clone(),
            bank_scores,
            raw_margins,
        })
    }

    /// `confusion[true][predicted]` counts.
    pub fn confusion_matrix(&self, classes: &[Matrix<T>]) -> Result<Vec<Vec<usize>>> {
        crate::geometry::check_len("test classes", self.n_classes(), classes.len())?;
        let m = self.n_classes();
        let mut out = vec![vec![0usize; m]; m];
        for (truth, x) in classes.iter().enumerate() {
            for row in x.row_iter() {
                out[truth][self.decide(row)?.class_index] += 1;
            }
        }
        Ok(out)
    }

    /// Writes one model document per pair plus `manifest.json`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut models = Vec::new();
        for bank in &self.banks {
            for member in &bank.members {
                let file = format!("model_{}_{}.json", bank.class_index, member.opponent);
                member.model.save(&dir.join(&file))?;
                models.push(ManifestEntry {
                    bank: bank.class_index,
                    opponent: member.opponent,
                    file,
                });
            }
        }
        let manifest = Manifest {
            version: MANIFEST_VERSION,
            class_ids: self.class_ids.clone(),
            c: self.c.to_f64_lossy(),
            models,
        };
        let path = dir.join("manifest.json");
        fs::write(&path, crate::json::to_string(&manifest)?).map_err(|e| Error::io(&path, e))
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let path = dir.join("manifest.json");
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let manifest: Manifest = serde_json::from_str(&text)
            .map_err(|e| Error::Parse(format!("engine manifest: {e}")))?;
        if manifest.version != MANIFEST_VERSION {
            return Err(Error::Version {
                found: u64::from(manifest.version),
                expected: u64::from(MANIFEST_VERSION),
            });
        }
        let m = manifest.class_ids.len();
        if m < 2 || manifest.models.len() != m * (m - 1) {
            return Err(Error::invalid(format!(
                "manifest lists {} models for {m} classes",
                manifest.models.len()
            )));
        }
        let mut banks: Vec<DecisionBank<T>> = (0..m)
            .map(|i| DecisionBank {
                class_index: i,
                members: Vec::new(),
            })
            .collect();
        for entry in &manifest.models {
            if entry.bank >= m || entry.opponent >= m || entry.bank == entry.opponent {
                return Err(Error::invalid(format!(
                    "bad pair ({}, {}) in manifest",
                    entry.bank, entry.opponent
                )));
            }
            let model = EigenlocusModel::load(&dir.join(&entry.file))?;
            banks[entry.bank].members.push(BankMember {
                opponent: entry.opponent,
                model,
            });
        }
        if banks.iter().any(|b| b.members.len() != m - 1) {
            return Err(Error::invalid("every bank needs M - 1 members"));
        }
        Ok(Self {
            class_ids: manifest.class_ids,
            banks,
            c: T::lit(manifest.c),
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct ManifestEntry {
    bank: usize,
    opponent: usize,
    file: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct Manifest {
    version: u32,
    class_ids: Vec<String>,
    #[serde(rename = "C")]
    c: f64,
    models: Vec<ManifestEntry>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeparabilityGrade {
    Separable,
    Overlapping,
    Homogeneous,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MultimeterThresholds {
    pub homogeneous_error: f64,
    pub homogeneous_sv_fraction: f64,
    pub separable_error: f64,
}

impl Default for MultimeterThresholds {
    fn default() -> Self {
        Self {
            homogeneous_error: 0.45,
            homogeneous_sv_fraction: 0.90,
            separable_error: 0.02,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MultimeterReading {
    pub estimated_error: f64,
    pub sv_fraction: f64,
    pub tau_norm: f64,
    pub homogeneity_flag: bool,
    pub separability_grade: SeparabilityGrade,
    pub n_train: usize,
    pub n_heldout: usize,
}

impl MultimeterReading {
    pub fn from_measurements(
        estimated_error: f64,
        sv_fraction: f64,
        tau_norm: f64,
        th: &MultimeterThresholds,
    ) -> Self {
        let homogeneity_flag =
            estimated_error >= th.homogeneous_error && sv_fraction >= th.homogeneous_sv_fraction;
        let separability_grade = if estimated_error <= th.separable_error {
            SeparabilityGrade::Separable
        } else if homogeneity_flag {
            SeparabilityGrade::Homogeneous
        } else {
            SeparabilityGrade::Overlapping
        };
        Self {
            estimated_error,
            sv_fraction,
            tau_norm,
            homogeneity_flag,
            separability_grade,
            n_train: 0,
            n_heldout: 0,
        }
    }
}

pub const MIN_HELDOUT_PER_CLASS: usize = 10;

/// Per-class random split: returns (train, held-out) index lists.
pub fn heldout_split<T: Scalar>(
    data: &LabeledDataset<T>,
    heldout_fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(heldout_fraction > 0.0 && heldout_fraction <= 0.5) {
        return Err(Error::invalid(format!(
            "held-out fraction must lie in (0, 0.5], found {heldout_fraction}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(SPLIT_STREAM);
    let mut train = Vec::new();
    let mut held = Vec::new();
    for label in [Label::Plus, Label::Minus] {
        let mut idx: Vec<usize> = (0..data.len()).filter(|&i| data.labels()[i] == label).collect();
        idx.shuffle(&mut rng);
        let k = (heldout_fraction * idx.len() as f64).round() as usize;
        if k < MIN_HELDOUT_PER_CLASS {
            return Err(Error::invalid(format!(
                "held-out split too small: {k} points of class {} (need {MIN_HELDOUT_PER_CLASS})",
                label.as_i8()
            )));
        }
        held.extend_from_slice(&idx[..k]);
        train.extend_from_slice(&idx[k..]);
    }
    train.sort_unstable();
    held.sort_unstable();
    Ok((train, held))
}

pub fn multimeter<T: Scalar>(
    data: &LabeledDataset<T>,
    c: T,
    heldout_fraction: f64,
    seed: u64,
    thresholds: &MultimeterThresholds,
    opts: &SolverOptions<T>,
) -> Result<MultimeterReading> {
    if !data.has_both_classes() {
        return Err(Error::SingleClass);
    }
    let (train_idx, held_idx) = heldout_split(data, heldout_fraction, seed)?;
    let train = data.subset(&train_idx);
    let model = fit(&train, c, opts)?;
    let wrong = held_idx
        .iter()
        .filter(|&&i| Label::from_score(model.score(data.point(i))) != data.labels()[i])
        .count();
    let err = wrong as f64 / held_idx.len() as f64;
    let mut r = MultimeterReading::from_measurements(
        err,
        model.sv_fraction().to_f64_lossy(),
        model.tau_norm().to_f64_lossy(),
        thresholds,
    );
    r.n_train = train_idx.len();
    r.n_heldout = held_idx.len();
    Ok(r)
}
