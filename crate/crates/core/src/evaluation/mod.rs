//! Stratified cross-validation over feature categories, pooled out-of-fold
//! scoring, and experiment reports.
//!
//! In the default leakage-safe mode every fitted object (feature space, topic
//! model, standardization, classifier) is trained on the training folds only;
//! `--paper-mode` style evaluation instead fits the feature space and topic
//! model once on the full corpus. Cluster models are trained from an external
//! vector table that contains no corpus text, so one model serves all folds in
//! both modes.

pub mod folds;
pub mod metrics;
pub mod svg;
pub mod synth;

pub use folds::{stratified_folds, FoldAssignment};
pub use metrics::{
    auc, f_score, f_score_weighted, majority_baseline, roc_area, roc_points, Averaging,
    ConfusionMatrix, RocPoint,
};
pub use svg::{render_roc_svg, RocCurve, FOREST_COLOR, SVM_COLOR};
pub use synth::{synth_corpus, synth_vectors, SynthConfig, SynthStrengths};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Document, Label};
use crate::embeddings::ClusterModel;
use crate::error::{Error, Result};
use crate::features::{
    extract_rows, Category, Channel, FeatureSpace, ModelContext,
};
use crate::ml::{train_forest, train_svm, ForestConfig, ForestModel, SvmConfig, SvmModel};
use crate::topics::{train_lda_docs, LdaConfig, TopicModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierKind {
    Svm,
    Forest,
}

impl ClassifierKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ClassifierKind::Svm => "svm",
            ClassifierKind::Forest => "forest",
        }
    }
}

/// Cross-validation setup. The `seed` drives the fold split, and every
/// fold-local model (LDA, SVM, forest) is reseeded with `seed + fold`; the
/// seed fields inside `svm`, `forest`, and `lda` are templates that get
/// overwritten per fold.
#[derive(Debug, Clone)]
pub struct HarnessConfig {
    pub folds: usize,
    pub seed: u64,
    pub paper_mode: bool,
    pub classifiers: Vec<ClassifierKind>,
    pub svm: SvmConfig,
    pub forest: ForestConfig,
    /// Required when any category includes the TOPIC channel.
    pub lda: Option<LdaConfig>,
    pub f_average: Averaging,
}

impl HarnessConfig {
    pub fn new(seed: u64) -> HarnessConfig {
        HarnessConfig {
            folds: 10,
            seed,
            paper_mode: false,
            classifiers: vec![ClassifierKind::Svm, ClassifierKind::Forest],
            svm: SvmConfig::new(seed),
            forest: ForestConfig::new(seed),
            lda: None,
            f_average: Averaging::Weighted,
        }
    }
}

/// Everything fitted for one fold of one feature category.
#[derive(Debug)]
pub struct FoldModels {
    pub space: FeatureSpace,
    pub topics: Option<TopicModel>,
    pub svm: Option<SvmModel>,
    pub forest: Option<ForestModel>,
}

impl FoldModels {
    /// Canonical serialization of every fitted object, for equality checks
    /// and persistence.
    pub fn to_json_bytes(&self) -> Vec<u8> {
        use serde_json::Value;
        let embed = |bytes: Option<Vec<u8>>| match bytes {
            Some(b) => serde_json::from_slice(&b).expect("model serialization is valid JSON"),
            None => Value::Null,
        };
        let mut root = serde_json::Map::new();
        root.insert(
            "space".to_string(),
            serde_json::to_value(&self.space).expect("space serializes"),
        );
        root.insert(
            "topics".to_string(),
            embed(self.topics.as_ref().map(|m| m.to_json_bytes())),
        );
        root.insert(
            "svm".to_string(),
            embed(self.svm.as_ref().map(|m| m.to_json_bytes())),
        );
        root.insert(
            "forest".to_string(),
            embed(self.forest.as_ref().map(|m| m.to_json_bytes())),
        );
        let mut bytes =
            serde_json::to_vec_pretty(&Value::Object(root)).expect("report serializes");
        bytes.push(b'\n');
        bytes
    }
}

fn fold_seeded<T: Clone>(template: &T, set_seed: impl FnOnce(&mut T)) -> T {
    let mut t = template.clone();
    set_seed(&mut t);
    t
}

/// Fits the models of one fold on training documents alone: the topic model
/// (when the channels ask for one), the feature space, and the requested
/// classifiers. `fold` offsets the harness seed.
pub fn fit_fold(
    train_docs: &[&Document],
    channels: &[Channel],
    cluster: Option<&ClusterModel>,
    cfg: &HarnessConfig,
    fold: usize,
) -> Result<FoldModels> {
    let topics = if channels.contains(&Channel::Topic) {
        let template = cfg.lda.ok_or_else(|| {
            Error::Config("the TOPIC channel needs an LDA configuration".into())
        })?;
        let lda_cfg = fold_seeded(&template, |c| {
            c.seed = cfg.seed.wrapping_add(fold as u64);
        });
        Some(train_lda_docs(train_docs, &lda_cfg)?)
    } else {
        None
    };
    let (space, svm, forest, _uniform) =
        fit_models(train_docs, channels, None, topics.as_ref(), cluster, cfg, fold)?;
    Ok(FoldModels {
        space,
        topics,
        svm,
        forest,
    })
}

type FittedModels = (
    FeatureSpace,
    Option<SvmModel>,
    Option<ForestModel>,
    Vec<String>,
);

fn fit_models(
    train_docs: &[&Document],
    channels: &[Channel],
    space_override: Option<&FeatureSpace>,
    topics: Option<&TopicModel>,
    cluster: Option<&ClusterModel>,
    cfg: &HarnessConfig,
    fold: usize,
) -> Result<FittedModels> {
    let space = match space_override {
        Some(s) => s.clone(),
        None => FeatureSpace::build(
            train_docs,
            channels,
            topics.map(|m| m.k()),
            cluster.map(|m| m.k()),
        )?,
    };
    let ctx = ModelContext {
        topics,
        clusters: cluster,
    };
    let extraction = extract_rows(train_docs, &space, &ctx)?;
    let x = extraction.matrix.to_dense();
    let y = &extraction.matrix.labels;
    let fold_seed = cfg.seed.wrapping_add(fold as u64);
    let svm = if cfg.classifiers.contains(&ClassifierKind::Svm) {
        let svm_cfg = fold_seeded(&cfg.svm, |c| c.seed = fold_seed);
        Some(train_svm(&x, y, &svm_cfg)?)
    } else {
        None
    };
    let forest = if cfg.classifiers.contains(&ClassifierKind::Forest) {
        let forest_cfg = fold_seeded(&cfg.forest, |c| c.seed = fold_seed);
        Some(train_forest(&x, y, &forest_cfg)?)
    } else {
        None
    };
    Ok((space, svm, forest, extraction.uniform_topic_docs))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfigSnapshot {
    pub svm_c: f64,
    pub svm_tol: f64,
    pub svm_max_epochs: usize,
    pub forest_trees: usize,
    pub forest_min_leaf: usize,
    pub forest_mtry: Option<usize>,
    pub forest_max_depth: Option<usize>,
    pub lda: Option<LdaConfig>,
    pub cluster_k: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportRow {
    pub category: String,
    pub channels: Vec<String>,
    pub classifier: ClassifierKind,
    pub pooled_auc: f64,
    pub pooled_f: f64,
    pub fold_auc: Vec<f64>,
    pub fold_f: Vec<f64>,
    pub fold_auc_mean: f64,
    pub fold_auc_sd: f64,
    pub fold_f_mean: f64,
    pub fold_f_sd: f64,
    pub roc: Vec<RocPoint>,
    /// Documents whose topic mixture fell back to uniform in any fold.
    pub uniform_topic_docs: Vec<String>,
}

pub const REPORT_FORMAT: &str = "eval-report/v1";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub format: String,
    pub seed: u64,
    pub folds: usize,
    pub paper_mode: bool,
    pub f_average: Averaging,
    pub n_documents: usize,
    pub n_patients: usize,
    pub n_controls: usize,
    pub majority_baseline_f: f64,
    pub config: ConfigSnapshot,
    pub rows: Vec<ReportRow>,
}

impl EvalReport {
    pub fn to_json_bytes(&self) -> Vec<u8> {
        let mut bytes = serde_json::to_vec_pretty(self).expect("report serializes");
        bytes.push(b'\n');
        bytes
    }

    pub fn from_json_bytes(bytes: &[u8]) -> Result<EvalReport> {
        let report: EvalReport = serde_json::from_slice(bytes)
            .map_err(|e| Error::Invalid(format!("unreadable report: {e}")))?;
        if report.format != REPORT_FORMAT {
            return Err(Error::Invalid(format!(
                "unsupported report format {:?}",
                report.format
            )));
        }
        Ok(report)
    }

    fn row(&self, category: &str, classifier: ClassifierKind) -> Option<&ReportRow> {
        self.rows
            .iter()
            .find(|r| r.category == category && r.classifier == classifier)
    }

    /// Plain-text results table: one line per category, AUC and F columns per
    /// classifier, majority baseline underneath.
    pub fn to_text_table(&self) -> String {
        let mut categories: Vec<&str> = Vec::new();
        for row in &self.rows {
            if !categories.contains(&row.category.as_str()) {
                categories.push(&row.category);
            }
        }
        let name_width = categories
            .iter()
            .map(|c| c.len())
            .chain(std::iter::once("Features".len()))
            .max()
            .unwrap_or(8);
        let cell = |row: Option<&ReportRow>, f: fn(&ReportRow) -> f64| match row {
            Some(r) => format!("{:.2}", f(r)),
            None => "-".to_string(),
        };
        let mut out = format!(
            "{:<name_width$} | {:>7} | {:>7} | {:>7} | {:>7}\n",
            "Features", "SVM AUC", "SVM F", "RF AUC", "RF F"
        );
        out.push_str(&format!(
            "{:-<name_width$}-+-{:-<7}-+-{:-<7}-+-{:-<7}-+-{:-<7}\n",
            "", "", "", "", ""
        ));
        for category in &categories {
            let svm = self.row(category, ClassifierKind::Svm);
            let forest = self.row(category, ClassifierKind::Forest);
            out.push_str(&format!(
                "{:<name_width$} | {:>7} | {:>7} | {:>7} | {:>7}\n",
                category,
                cell(svm, |r| r.pooled_auc),
                cell(svm, |r| r.pooled_f),
                cell(forest, |r| r.pooled_auc),
                cell(forest, |r| r.pooled_f),
            ));
        }
        out.push_str(&format!(
            "\nMajority baseline F: {:.2}\n",
            self.majority_baseline_f
        ));
        let fallback: usize = self
            .rows
            .iter()
            .map(|r| r.uniform_topic_docs.len())
            .sum();
        if fallback > 0 {
            out.push_str(&format!(
                "Uniform topic fallback hit {fallback} extraction(s); see report JSON.\n"
            ));
        }
        out
    }
}

struct CategoryFold {
    svm_scores: Option<Vec<f64>>,
    forest_scores: Option<Vec<f64>>,
    uniform: Vec<String>,
}

struct FoldOutput {
    test_idx: Vec<usize>,
    per_category: Vec<CategoryFold>,
}

fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn snapshot(cfg: &HarnessConfig, cluster: Option<&ClusterModel>) -> ConfigSnapshot {
    ConfigSnapshot {
        svm_c: cfg.svm.c,
        svm_tol: cfg.svm.tol,
        svm_max_epochs: cfg.svm.max_epochs,
        forest_trees: cfg.forest.n_trees,
        forest_min_leaf: cfg.forest.min_leaf,
        forest_mtry: cfg.forest.mtry,
        forest_max_depth: cfg.forest.max_depth,
        lda: cfg.lda,
        cluster_k: cluster.map(|c| c.k()),
    }
}

/// Runs stratified cross-validation for every category and classifier,
/// pooling out-of-fold scores into one AUC/F/ROC per row. Folds run
/// concurrently; each is re-derived from `cfg.seed + fold`, so thread count
/// never changes the result.
pub fn cross_validate(
    corpus: &Corpus,
    categories: &[Category],
    cluster: Option<&ClusterModel>,
    cfg: &HarnessConfig,
) -> Result<EvalReport> {
    corpus.validate_for_training()?;
    if categories.is_empty() {
        return Err(Error::Config("no feature categories selected".into()));
    }
    if cfg.classifiers.is_empty() {
        return Err(Error::Config("no classifiers selected".into()));
    }
    let need_topic = categories
        .iter()
        .any(|c| c.channels.contains(&Channel::Topic));
    if need_topic && cfg.lda.is_none() {
        return Err(Error::Config(
            "selected categories use the TOPIC channel; an LDA configuration is required".into(),
        ));
    }
    let need_cluster = categories
        .iter()
        .any(|c| c.channels.contains(&Channel::Cluster));
    if need_cluster && cluster.is_none() {
        return Err(Error::Config(
            "selected categories use the CLUSTER channel; a cluster model over word vectors is required"
                .into(),
        ));
    }

    let all_docs: Vec<&Document> = corpus.documents.iter().collect();
    let labels: Vec<Label> = corpus.documents.iter().map(|d| d.label).collect();
    let assignment = stratified_folds(&labels, cfg.folds, cfg.seed)?;

    let global_lda = if need_topic && cfg.paper_mode {
        let template = cfg.lda.expect("checked above");
        let lda_cfg = fold_seeded(&template, |c| c.seed = cfg.seed);
        Some(train_lda_docs(&all_docs, &lda_cfg)?)
    } else {
        None
    };
    // Surfaces unavailable channels before any fold work starts; in paper
    // mode these corpus-wide spaces are also the ones used for extraction.
    let global_spaces: Vec<FeatureSpace> = categories
        .iter()
        .map(|category| {
            FeatureSpace::build(
                &all_docs,
                &category.channels,
                cfg.lda.map(|l| l.k),
                cluster.map(|c| c.k()),
            )
        })
        .collect::<Result<Vec<_>>>()?;

    let fold_outputs: Vec<FoldOutput> = (0..cfg.folds)
        .into_par_iter()
        .map(|fold| -> Result<FoldOutput> {
            let train_idx = assignment.train_indices(fold);
            let test_idx = assignment.test_indices(fold);
            let train_docs: Vec<&Document> =
                train_idx.iter().map(|&i| &corpus.documents[i]).collect();
            let test_docs: Vec<&Document> =
                test_idx.iter().map(|&i| &corpus.documents[i]).collect();
            let fold_lda = if need_topic && !cfg.paper_mode {
                let template = cfg.lda.expect("checked above");
                let lda_cfg = fold_seeded(&template, |c| {
                    c.seed = cfg.seed.wrapping_add(fold as u64);
                });
                Some(train_lda_docs(&train_docs, &lda_cfg)?)
            } else {
                None
            };
            let topics = if cfg.paper_mode {
                global_lda.as_ref()
            } else {
                fold_lda.as_ref()
            };
            let mut per_category = Vec::with_capacity(categories.len());
            for (ci, category) in categories.iter().enumerate() {
                let space_override = cfg.paper_mode.then(|| &global_spaces[ci]);
                let (space, svm, forest, mut uniform) = fit_models(
                    &train_docs,
                    &category.channels,
                    space_override,
                    topics,
                    cluster,
                    cfg,
                    fold,
                )?;
                let ctx = ModelContext {
                    topics,
                    clusters: cluster,
                };
                let test_extraction = extract_rows(&test_docs, &space, &ctx)?;
                uniform.extend(test_extraction.uniform_topic_docs);
                let test_x = test_extraction.matrix.to_dense();
                let svm_scores = match &svm {
                    Some(model) => Some(
                        test_x
                            .iter()
                            .map(|row| model.decision(row))
                            .collect::<Result<Vec<_>>>()?,
                    ),
                    None => None,
                };
                let forest_scores = match &forest {
                    Some(model) => Some(
                        test_x
                            .iter()
                            .map(|row| model.proba(row))
                            .collect::<Result<Vec<_>>>()?,
                    ),
                    None => None,
                };
                per_category.push(CategoryFold {
                    svm_scores,
                    forest_scores,
                    uniform,
                });
            }
            Ok(FoldOutput {
                test_idx,
                per_category,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::with_capacity(categories.len() * cfg.classifiers.len());
    for (ci, category) in categories.iter().enumerate() {
        for &classifier in &cfg.classifiers {
            let mut pooled: Vec<(usize, f64)> = Vec::with_capacity(labels.len());
            let mut fold_auc = Vec::with_capacity(cfg.folds);
            let mut fold_f = Vec::with_capacity(cfg.folds);
            for output in &fold_outputs {
                let scores = match classifier {
                    ClassifierKind::Svm => &output.per_category[ci].svm_scores,
                    ClassifierKind::Forest => &output.per_category[ci].forest_scores,
                };
                let scores = scores.as_ref().expect("requested classifier was trained");
                let fold_labels: Vec<Label> =
                    output.test_idx.iter().map(|&i| labels[i]).collect();
                fold_auc.push(auc(scores, &fold_labels)?);
                let predictions: Vec<Label> = scores
                    .iter()
                    .map(|&s| threshold(classifier, s))
                    .collect();
                let cm = ConfusionMatrix::from_predictions(&fold_labels, &predictions)?;
                fold_f.push(f_score(&cm, cfg.f_average)?);
                pooled.extend(output.test_idx.iter().copied().zip(scores.iter().copied()));
            }
            pooled.sort_by_key(|(idx, _)| *idx);
            let pooled_scores: Vec<f64> = pooled.iter().map(|(_, s)| *s).collect();
            let pooled_labels: Vec<Label> = pooled.iter().map(|(i, _)| labels[*i]).collect();
            let pooled_auc = auc(&pooled_scores, &pooled_labels)?;
            let predictions: Vec<Label> = pooled_scores
                .iter()
                .map(|&s| threshold(classifier, s))
                .collect();
            let cm = ConfusionMatrix::from_predictions(&pooled_labels, &predictions)?;
            let pooled_f = f_score(&cm, cfg.f_average)?;
            let roc = roc_points(&pooled_scores, &pooled_labels)?;
            let (fold_auc_mean, fold_auc_sd) = mean_sd(&fold_auc);
            let (fold_f_mean, fold_f_sd) = mean_sd(&fold_f);
            let mut uniform: Vec<String> = fold_outputs
                .iter()
                .flat_map(|o| o.per_category[ci].uniform.iter().cloned())
                .collect();
            uniform.sort();
            uniform.dedup();
            rows.push(ReportRow {
                category: category.name.clone(),
                channels: category
                    .channels
                    .iter()
                    .map(|c| c.to_string())
                    .collect(),
                classifier,
                pooled_auc,
                pooled_f,
                fold_auc,
                fold_f,
                fold_auc_mean,
                fold_auc_sd,
                fold_f_mean,
                fold_f_sd,
                roc,
                uniform_topic_docs: uniform,
            });
        }
    }

    let (n_patients, n_controls) = corpus.label_counts();
    Ok(EvalReport {
        format: REPORT_FORMAT.to_string(),
        seed: cfg.seed,
        folds: cfg.folds,
        paper_mode: cfg.paper_mode,
        f_average: cfg.f_average,
        n_documents: corpus.documents.len(),
        n_patients,
        n_controls,
        majority_baseline_f: majority_baseline(&labels)?,
        config: snapshot(cfg, cluster),
        rows,
    })
}

/// Default decision threshold per score kind: the SVM margin splits at 0, the
/// forest vote fraction at one half.
fn threshold(classifier: ClassifierKind, score: f64) -> Label {
    let positive = match classifier {
        ClassifierKind::Svm => score >= 0.0,
        ClassifierKind::Forest => score >= 0.5,
    };
    if positive {
        Label::Patient
    } else {
        Label::Control
    }
}
