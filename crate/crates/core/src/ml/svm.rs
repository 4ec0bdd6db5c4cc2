//! L2-regularized L1-loss linear SVM solved in the dual by coordinate
//! descent. Inputs are z-score standardized against the training rows;
//! constant columns are excluded and keep zero weight. The bias is trained
//! as an implicit all-ones column.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::check_training_inputs;
use crate::corpus::Label;
use crate::error::{Error, Result};
use crate::io::{read_to_string, write_atomic};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmConfig {
    /// Misclassification cost; the upper bound on every dual variable.
    pub c: f64,
    /// Stop once the spread of projected gradients over an epoch falls
    /// below this.
    pub tol: f64,
    pub max_epochs: usize,
    pub seed: u64,
}

impl SvmConfig {
    pub fn new(seed: u64) -> SvmConfig {
        SvmConfig {
            c: 1.0,
            tol: 1e-4,
            max_epochs: 1000,
            seed,
        }
    }
}

impl Default for SvmConfig {
    fn default() -> SvmConfig {
        SvmConfig::new(0)
    }
}

/// Per-feature z-score transform fitted on the training rows. Features with
/// zero variance are marked constant and map to exactly 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    means: Vec<f64>,
    sds: Vec<f64>,
}

impl Standardizer {
    pub fn fit(x: &[Vec<f64>]) -> Standardizer {
        let n = x.len() as f64;
        let d = x.first().map_or(0, Vec::len);
        let mut means = vec![0.0; d];
        for row in x {
            for (m, v) in means.iter_mut().zip(row) {
                *m += v;
            }
        }
        for m in &mut means {
            *m /= n;
        }
        let mut vars = vec![0.0; d];
        for row in x {
            for ((var, v), m) in vars.iter_mut().zip(row).zip(&means) {
                let diff = v - m;
                *var += diff * diff;
            }
        }
        let sds = vars.into_iter().map(|v| (v / n).sqrt()).collect();
        Standardizer { means, sds }
    }

    pub fn dim(&self) -> usize {
        self.means.len()
    }

    /// Indices of features with zero training variance.
    pub fn constant_features(&self) -> Vec<usize> {
        self.sds
            .iter()
            .enumerate()
            .filter(|(_, &sd)| sd == 0.0)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn transform(&self, row: &[f64]) -> Result<Vec<f64>> {
        if row.len() != self.means.len() {
            return Err(Error::DimensionMismatch {
                expected: self.means.len(),
                actual: row.len(),
            });
        }
        Ok(row
            .iter()
            .zip(&self.means)
            .zip(&self.sds)
            .map(|((v, m), sd)| if *sd == 0.0 { 0.0 } else { (v - m) / sd })
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    /// Weights in standardized space, one per input feature; constant
    /// features hold 0.
    pub weights: Vec<f64>,
    pub bias: f64,
    pub standardizer: Standardizer,
    pub config: SvmConfig,
}

/// Optimization record kept alongside a fitted model.
#[derive(Debug, Clone)]
pub struct SvmDiagnostics {
    /// Final dual variables, one per training row; each lies in [0, C].
    pub alpha: Vec<f64>,
    /// Dual objective 0.5 w.w - sum(alpha) after each epoch; non-increasing.
    pub dual_objective: Vec<f64>,
    /// Primal objective 0.5 w.w + C sum(hinge) after each epoch.
    pub primal_objective: Vec<f64>,
    pub epochs: usize,
}

pub fn train_svm(x: &[Vec<f64>], y: &[Label], config: &SvmConfig) -> Result<SvmModel> {
    fit_svm(x, y, config).map(|(model, _)| model)
}

pub fn fit_svm(
    x: &[Vec<f64>],
    y: &[Label],
    config: &SvmConfig,
) -> Result<(SvmModel, SvmDiagnostics)> {
    check_training_inputs(x, y)?;
    if config.c <= 0.0 {
        return Err(Error::Config("cost C must be positive".into()));
    }
    let standardizer = Standardizer::fit(x);
    let d = standardizer.dim();
    let z: Vec<Vec<f64>> = x
        .iter()
        .map(|row| standardizer.transform(row))
        .collect::<Result<_>>()?;
    let signs: Vec<f64> = y.iter().map(|l| l.sign()).collect();
    let n = z.len();

    // squared norms including the implicit bias column
    let q_diag: Vec<f64> = z
        .iter()
        .map(|row| row.iter().map(|v| v * v).sum::<f64>() + 1.0)
        .collect();
    let mut alpha = vec![0.0f64; n];
    let mut w = vec![0.0f64; d];
    let mut b = 0.0f64;
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut dual_objective = Vec::new();
    let mut primal_objective = Vec::new();
    let mut epochs = 0;

    for _epoch in 0..config.max_epochs {
        order.shuffle(&mut rng);
        let mut pg_max = f64::NEG_INFINITY;
        let mut pg_min = f64::INFINITY;
        for &i in &order {
            let row = &z[i];
            let yi = signs[i];
            let margin: f64 = w.iter().zip(row).map(|(wj, xj)| wj * xj).sum::<f64>() + b;
            let g = yi * margin - 1.0;
            let pg = if alpha[i] == 0.0 {
                g.min(0.0)
            } else if alpha[i] == config.c {
                g.max(0.0)
            } else {
                g
            };
            pg_max = pg_max.max(pg);
            pg_min = pg_min.min(pg);
            if pg.abs() > 1e-12 {
                let new_alpha = (alpha[i] - g / q_diag[i]).clamp(0.0, config.c);
                let delta = (new_alpha - alpha[i]) * yi;
                if delta != 0.0 {
                    for (wj, xj) in w.iter_mut().zip(row) {
                        *wj += delta * xj;
                    }
                    b += delta;
                }
                alpha[i] = new_alpha;
            }
        }
        epochs += 1;
        let reg = 0.5 * (w.iter().map(|v| v * v).sum::<f64>() + b * b);
        dual_objective.push(reg - alpha.iter().sum::<f64>());
        let hinge: f64 = z
            .iter()
            .zip(&signs)
            .map(|(row, yi)| {
                let margin: f64 = w.iter().zip(row).map(|(wj, xj)| wj * xj).sum::<f64>() + b;
                (1.0 - yi * margin).max(0.0)
            })
            .sum();
        primal_objective.push(reg + config.c * hinge);
        if pg_max - pg_min < config.tol {
            break;
        }
    }

    let model = SvmModel {
        weights: w,
        bias: b,
        standardizer,
        config: *config,
    };
    let diagnostics = SvmDiagnostics {
        alpha,
        dual_objective,
        primal_objective,
        epochs,
    };
    Ok((model, diagnostics))
}

impl SvmModel {
    /// Signed distance to the separating hyperplane in standardized space;
    /// positive means the patient class.
    pub fn decision(&self, row: &[f64]) -> Result<f64> {
        let z = self.standardizer.transform(row)?;
        Ok(self
            .weights
            .iter()
            .zip(&z)
            .map(|(w, x)| w * x)
            .sum::<f64>()
            + self.bias)
    }

    pub fn predict(&self, row: &[f64]) -> Result<Label> {
        Ok(if self.decision(row)? >= 0.0 {
            Label::Patient
        } else {
            Label::Control
        })
    }

    pub fn to_json_bytes(&self) -> Vec<u8> {
        let file = ModelFile {
            format: MODEL_FORMAT.to_string(),
            model: self.clone(),
        };
        let mut bytes = serde_json::to_vec(&file).expect("svm model serialization");
        bytes.push(b'\n');
        bytes
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_atomic(path, &self.to_json_bytes())
    }

    pub fn load(path: &Path) -> Result<SvmModel> {
        let text = read_to_string(path)?;
        let file: ModelFile = serde_json::from_str(&text).map_err(|e| Error::Json {
            line: e.line(),
            msg: e.to_string(),
        })?;
        if file.format != MODEL_FORMAT {
            return Err(Error::Invalid(format!(
                "unsupported svm model format {:?}",
                file.format
            )));
        }
        Ok(file.model)
    }
}

const MODEL_FORMAT: &str = "svm-model/v1";

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    #[serde(flatten)]
    model: SvmModel,
}
