//! Classification metrics on the 0-100 scale: class-averaged F-score,
//! rank-based AUC, and ROC curves.

use serde::{Deserialize, Serialize};

use crate::corpus::Label;
use crate::error::{Error, Result};

/// Two-class confusion counts with `Patient` as the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl ConfusionMatrix {
    pub fn from_predictions(truth: &[Label], predicted: &[Label]) -> Result<ConfusionMatrix> {
        if truth.len() != predicted.len() {
            return Err(Error::Invalid(format!(
                "{} predictions for {} labels",
                predicted.len(),
                truth.len()
            )));
        }
        let mut cm = ConfusionMatrix {
            tp: 0,
            fp: 0,
            tn: 0,
            fn_: 0,
        };
        for (t, p) in truth.iter().zip(predicted) {
            match (t, p) {
                (Label::Patient, Label::Patient) => cm.tp += 1,
                (Label::Control, Label::Patient) => cm.fp += 1,
                (Label::Control, Label::Control) => cm.tn += 1,
                (Label::Patient, Label::Control) => cm.fn_ += 1,
            }
        }
        Ok(cm)
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }
}

/// How the two per-class F1 values combine into one number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Averaging {
    /// Weight each class by its true prevalence.
    Weighted,
    /// Unweighted mean of the two class scores.
    Macro,
    /// Pooled counts; for two exhaustive classes this equals accuracy.
    Micro,
}

impl Averaging {
    pub fn as_str(self) -> &'static str {
        match self {
            Averaging::Weighted => "weighted",
            Averaging::Macro => "macro",
            Averaging::Micro => "micro",
        }
    }

    pub fn parse(s: &str) -> Result<Averaging> {
        match s {
            "weighted" => Ok(Averaging::Weighted),
            "macro" => Ok(Averaging::Macro),
            "micro" => Ok(Averaging::Micro),
            other => Err(Error::Config(format!("unknown F averaging \"{other}\""))),
        }
    }
}

fn f1(tp: usize, fp: usize, fn_: usize) -> f64 {
    let precision = if tp + fp == 0 {
        0.0
    } else {
        tp as f64 / (tp + fp) as f64
    };
    let recall = if tp + fn_ == 0 {
        0.0
    } else {
        tp as f64 / (tp + fn_) as f64
    };
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// Class-averaged F1 x 100.
pub fn f_score(cm: &ConfusionMatrix, averaging: Averaging) -> Result<f64> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::Invalid("empty confusion matrix".into()));
    }
    let f_pos = f1(cm.tp, cm.fp, cm.fn_);
    let f_neg = f1(cm.tn, cm.fn_, cm.fp);
    let value = match averaging {
        Averaging::Weighted => {
            let w_pos = (cm.tp + cm.fn_) as f64 / total as f64;
            let w_neg = (cm.tn + cm.fp) as f64 / total as f64;
            w_pos * f_pos + w_neg * f_neg
        }
        Averaging::Macro => (f_pos + f_neg) / 2.0,
        Averaging::Micro => (cm.tp + cm.tn) as f64 / total as f64,
    };
    Ok(value * 100.0)
}

/// Prevalence-weighted two-class F1 x 100.
pub fn f_score_weighted(cm: &ConfusionMatrix) -> Result<f64> {
    f_score(cm, Averaging::Weighted)
}

/// Weighted F of the classifier that always predicts the most frequent class
/// (ties go to the positive class).
pub fn majority_baseline(truth: &[Label]) -> Result<f64> {
    if truth.is_empty() {
        return Err(Error::Invalid("no labels".into()));
    }
    let patients = truth.iter().filter(|l| **l == Label::Patient).count();
    let majority = if patients * 2 >= truth.len() {
        Label::Patient
    } else {
        Label::Control
    };
    let predicted = vec![majority; truth.len()];
    f_score_weighted(&ConfusionMatrix::from_predictions(truth, &predicted)?)
}

fn class_counts(truth: &[Label]) -> Result<(usize, usize)> {
    let pos = truth.iter().filter(|l| **l == Label::Patient).count();
    let neg = truth.len() - pos;
    if pos == 0 {
        return Err(Error::MissingClass("patient"));
    }
    if neg == 0 {
        return Err(Error::MissingClass("control"));
    }
    Ok((pos, neg))
}

/// Rank-based AUC (Mann-Whitney with average ranks for ties) x 100.
pub fn auc(scores: &[f64], truth: &[Label]) -> Result<f64> {
    if scores.len() != truth.len() {
        return Err(Error::Invalid(format!(
            "{} scores for {} labels",
            scores.len(),
            truth.len()
        )));
    }
    let (pos, neg) = class_counts(truth)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap());
    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        // ranks i+1 ..= j averaged over the tie group
        let avg_rank = (i + 1 + j) as f64 / 2.0;
        for &idx in &order[i..j] {
            if truth[idx] == Label::Patient {
                rank_sum_pos += avg_rank;
            }
        }
        i = j;
    }
    let u = rank_sum_pos - (pos * (pos + 1)) as f64 / 2.0;
    Ok(u / (pos as f64 * neg as f64) * 100.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
}

/// ROC curve with one threshold per distinct score, descending, anchored at
/// (0,0) and ending at (1,1).
pub fn roc_points(scores: &[f64], truth: &[Label]) -> Result<Vec<RocPoint>> {
    if scores.len() != truth.len() {
        return Err(Error::Invalid(format!(
            "{} scores for {} labels",
            scores.len(),
            truth.len()
        )));
    }
    let (pos, neg) = class_counts(truth)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap());
    let mut points = vec![RocPoint { fpr: 0.0, tpr: 0.0 }];
    let mut tp = 0;
    let mut fp = 0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        for &idx in &order[i..j] {
            if truth[idx] == Label::Patient {
                tp += 1;
            } else {
                fp += 1;
            }
        }
        points.push(RocPoint {
            fpr: fp as f64 / neg as f64,
            tpr: tp as f64 / pos as f64,
        });
        i = j;
    }
    Ok(points)
}

/// Trapezoidal area under a ROC curve, on the 0-1 scale.
pub fn roc_area(points: &[RocPoint]) -> f64 {
    points
        .windows(2)
        .map(|w| (w[1].fpr - w[0].fpr) * (w[0].tpr + w[1].tpr) / 2.0)
        .sum()
}
