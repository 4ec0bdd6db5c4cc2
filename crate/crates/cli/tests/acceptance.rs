//! Acceptance checks for the whole toolkit: analytic anchors for the
//! metrics, invariants of every hand-rolled estimator, and end-to-end
//! behavior of the installed binary. Each test covers one contract and
//! reports one pass/fail line.

use std::collections::BTreeSet;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use lingua_screen_core::corpus::{Document, Label, Sentence};
use lingua_screen_core::embeddings::{kmeans, kmeans_with_history, KmeansConfig, VectorTable};
use lingua_screen_core::evaluation::{
    auc, fit_fold, majority_baseline, roc_area, roc_points, synth_corpus, synth_vectors,
    EvalReport, HarnessConfig, SynthConfig,
};
use lingua_screen_core::features::{Channel, FeatureMatrix, FeatureSpace, FeatureVector};
use lingua_screen_core::ml::{fit_svm, train_forest, ForestConfig, SvmConfig};
use lingua_screen_core::selection::{information_gain, label_entropy, rfe, Binning};
use lingua_screen_core::topics::{train_lda_docs_observed, LdaConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BIN: &str = env!("CARGO_BIN_EXE_lingua-screen");
const ALL_CATEGORIES: &str = "pos,parse,srl,topics,clusters,lcb,sentiment,intensity,syntax,\
                              semantics,pragmatics,syntax+semantics,syntax+pragmatics,\
                              semantics+pragmatics,all";

fn labels(patients: usize, controls: usize) -> Vec<Label> {
    let mut y = vec![Label::Patient; patients];
    y.extend(vec![Label::Control; controls]);
    y
}

/// Runs the CLI binary inside `dir`, failing the test on a non-zero exit.
fn run(dir: &Path, args: &[&str]) -> std::process::Output {
    let out = Command::new(BIN)
        .args(args)
        .current_dir(dir)
        .env_remove("LINGUA_SCREEN_SEED")
        .output()
        .expect("the binary should be runnable");
    assert!(
        out.status.success(),
        "`lingua-screen {}` failed with {:?}:\n{}",
        args.join(" "),
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

#[test]
fn criterion_01_majority_baseline_anchor() {
    // a 190-patient / 183-control corpus: the majority predictor's weighted F
    let f = majority_baseline(&labels(190, 183)).unwrap();
    let p: f64 = 190.0 / 373.0;
    let formula = p * (2.0 * p / (p + 1.0)) * 100.0;
    assert!(
        (f - formula).abs() <= 1e-9,
        "implementation {f} disagrees with p*2p/(p+1) = {formula}"
    );
    assert!(
        (34.37..=34.40).contains(&f),
        "majority baseline at 190/373 should sit in 34.38..34.39 (+-0.01), got {f}"
    );

    let balanced = majority_baseline(&labels(100, 100)).unwrap();
    assert!(
        (balanced - 100.0 / 3.0).abs() <= 1e-9,
        "balanced majority baseline should be 100/3, got {balanced}"
    );
    assert!(
        (balanced - 33.33).abs() <= 0.01,
        "balanced majority baseline should round to 33.33, got {balanced}"
    );
    println!("acceptance: majority-baseline anchor PASS");
}

#[test]
fn criterion_02_auc_matches_pair_counting_and_trapezoid() {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let start = Instant::now();
    for case in 0..1000 {
        let n = rng.gen_range(2..=200);
        let mut truth: Vec<Label> = (0..n)
            .map(|_| {
                if rng.gen_bool(0.5) {
                    Label::Patient
                } else {
                    Label::Control
                }
            })
            .collect();
        truth[0] = Label::Patient;
        truth[1] = Label::Control;
        // every third case quantizes scores so tie handling gets exercised
        let quantize = case % 3 == 0;
        let scores: Vec<f64> = (0..n)
            .map(|_| {
                let s: f64 = rng.gen_range(-1.0..1.0);
                if quantize {
                    (s * 4.0).round() / 4.0
                } else {
                    s
                }
            })
            .collect();

        let mut wins = 0.0f64;
        let mut pairs = 0.0f64;
        for (i, si) in scores.iter().enumerate() {
            if truth[i] != Label::Patient {
                continue;
            }
            for (j, sj) in scores.iter().enumerate() {
                if truth[j] != Label::Control {
                    continue;
                }
                pairs += 1.0;
                if si > sj {
                    wins += 1.0;
                } else if si == sj {
                    wins += 0.5;
                }
            }
        }
        let brute = wins / pairs;
        let ranked = auc(&scores, &truth).unwrap() / 100.0;
        assert!(
            (ranked - brute).abs() <= 1e-9,
            "case {case}: rank AUC {ranked} vs pair counting {brute}"
        );
        let area = roc_area(&roc_points(&scores, &truth).unwrap());
        assert!(
            (area - ranked).abs() <= 1e-9,
            "case {case}: trapezoid area {area} vs rank AUC {ranked}"
        );
    }
    assert!(
        start.elapsed() < Duration::from_secs(10),
        "1000 oracle cases took {:?}",
        start.elapsed()
    );
    println!("acceptance: AUC oracle equivalence PASS");
}

fn single_feature_matrix(values: &[f64], y: &[Label]) -> FeatureMatrix {
    let rows = values
        .iter()
        .map(|&v| {
            let mut row = FeatureVector::zeros(1);
            row.set(0, v);
            row
        })
        .collect();
    FeatureMatrix {
        space: FeatureSpace::from_names(vec!["f0".to_string()]),
        ids: (0..values.len()).map(|i| format!("d{i}")).collect(),
        labels: y.to_vec(),
        rows,
    }
}

fn top_score(matrix: &FeatureMatrix) -> f64 {
    information_gain(matrix, 10, Binning::EqualWidth).unwrap().entries[0].score
}

#[test]
fn criterion_03_information_gain_analytic_suite() {
    // a perfect feature recovers the full label entropy
    let y = labels(50, 50);
    let perfect: Vec<f64> = y.iter().map(|l| f64::from(*l == Label::Patient)).collect();
    let ig = top_score(&single_feature_matrix(&perfect, &y));
    assert!(
        (ig - 1.0).abs() <= 1e-9,
        "perfect feature on balanced labels should gain 1 bit, got {ig}"
    );
    assert!((label_entropy(&y) - 1.0).abs() <= 1e-9);

    let y31 = labels(75, 25);
    let h31 = -(0.75f64 * 0.75f64.log2() + 0.25 * 0.25f64.log2());
    assert!((h31 - 0.8113).abs() <= 5e-5, "3:1 entropy is {h31}");
    assert!((label_entropy(&y31) - h31).abs() <= 1e-9);
    let perfect31: Vec<f64> = y31.iter().map(|l| f64::from(*l == Label::Patient)).collect();
    let ig31 = top_score(&single_feature_matrix(&perfect31, &y31));
    assert!(
        (ig31 - h31).abs() <= 1e-9,
        "perfect feature at 3:1 should gain H(y) = {h31}, got {ig31}"
    );

    // a feature split identically inside both classes carries nothing
    let independent: Vec<f64> = (0..100).map(|i| f64::from(i % 2 == 0)).collect();
    let ig_ind = top_score(&single_feature_matrix(&independent, &y));
    assert!(
        ig_ind.abs() <= 1e-9,
        "class-independent feature should gain 0 bits, got {ig_ind}"
    );

    let constant = vec![0.5; 100];
    let ig_const = top_score(&single_feature_matrix(&constant, &y));
    assert!(
        ig_const.abs() <= 1e-9,
        "constant feature should gain 0 bits, got {ig_const}"
    );
    println!("acceptance: information-gain analytic suite PASS");
}

#[test]
fn criterion_04_lda_conservation_and_disjoint_vocabulary() {
    const FAMILY_A: [&str; 6] = [
        "zorblatt", "quindle", "mirvane", "tesseril", "ovandria", "plenith",
    ];
    const FAMILY_B: [&str; 6] = [
        "drakmor", "suvelin", "cartheus", "belgrivy", "nostrane", "vintrelle",
    ];
    let start = Instant::now();
    let mut docs = Vec::new();
    for (family, prefix, label) in [
        (&FAMILY_A, "a", Label::Patient),
        (&FAMILY_B, "b", Label::Control),
    ] {
        for d in 0..4 {
            let surfaces: Vec<&str> = (0..30).map(|t| family[(t + d) % 6]).collect();
            docs.push(Document {
                id: format!("{prefix}{d}"),
                label,
                text: surfaces.join(" "),
                sentences: vec![Sentence::from_surfaces(surfaces)],
                frames: vec![],
                beliefs: vec![],
            });
        }
    }
    let refs: Vec<&Document> = docs.iter().collect();
    let mut cfg = LdaConfig::new(2, 11);
    cfg.iterations = 500;
    cfg.burn_in = 100;
    cfg.alpha = 0.5;

    let mut observed = 0usize;
    let model = train_lda_docs_observed(&refs, &cfg, &mut |counts| {
        observed += 1;
        let total: usize = counts.doc_lengths.iter().sum();
        for (d, per_doc) in counts.doc_topic.iter().enumerate() {
            let sum: usize = per_doc.iter().map(|&c| c as usize).sum();
            assert_eq!(
                sum, counts.doc_lengths[d],
                "sweep {}: document {d} lost or gained tokens",
                counts.sweep
            );
        }
        let vocab = counts.word_topic.len() / counts.k;
        for topic in 0..counts.k {
            let column: u64 = (0..vocab)
                .map(|w| u64::from(counts.word_topic[w * counts.k + topic]))
                .sum();
            assert_eq!(
                column, counts.topic_totals[topic],
                "sweep {}: topic {topic} total drifted from its word counts",
                counts.sweep
            );
        }
        let mass: u64 = counts.topic_totals.iter().sum();
        assert_eq!(
            mass as usize, total,
            "sweep {}: total token mass changed",
            counts.sweep
        );
    })
    .unwrap();
    assert_eq!(
        observed,
        cfg.iterations + 1,
        "conservation should be checked at initialization and after every sweep"
    );

    for topic in 0..2 {
        let sum: f64 = model.phi(topic).iter().sum();
        assert!(
            (sum - 1.0).abs() <= 1e-9,
            "phi[{topic}] sums to {sum}, not 1"
        );
    }
    let mut dominant = Vec::new();
    for doc in &docs {
        let inferred = model.infer(doc);
        let sum: f64 = inferred.theta.iter().sum();
        assert!(
            (sum - 1.0).abs() <= 1e-9,
            "theta of {} sums to {sum}, not 1",
            doc.id
        );
        let (top, mass) = inferred
            .theta
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(i, m)| (i, *m))
            .unwrap();
        assert!(
            mass > 0.9,
            "document {} should concentrate on one topic, best mass {mass}",
            doc.id
        );
        dominant.push(top);
    }
    // the two vocabulary families must land on different topics, consistently
    assert!(
        dominant[..4].iter().all(|t| *t == dominant[0]),
        "first family split across topics: {dominant:?}"
    );
    assert!(
        dominant[4..].iter().all(|t| *t == dominant[4]),
        "second family split across topics: {dominant:?}"
    );
    assert_ne!(
        dominant[0], dominant[4],
        "disjoint vocabularies collapsed onto one topic"
    );
    assert!(
        start.elapsed() < Duration::from_secs(30),
        "500 sweeps took {:?}",
        start.elapsed()
    );
    println!("acceptance: LDA invariants PASS");
}

#[test]
fn criterion_05_kmeans_monotone_exact_and_brute_force_optimal() {
    // Lloyd iterations never increase inertia
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let pairs: Vec<(String, Vec<f64>)> = (0..60)
        .map(|i| {
            let v: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect();
            (format!("w{i}"), v)
        })
        .collect();
    let table = VectorTable::from_pairs(pairs).unwrap();
    let (_, history) = kmeans_with_history(&table, &KmeansConfig::new(7, 23)).unwrap();
    assert!(history.inertia.len() >= 2, "Lloyd should run at least twice");
    assert!(
        history.repaired.iter().all(|r| !r),
        "this fixture should never need an empty-cluster repair"
    );
    for i in 1..history.inertia.len() {
        assert!(
            history.inertia[i] <= history.inertia[i - 1] + 1e-9,
            "inertia rose from {} to {} at iteration {i}",
            history.inertia[i - 1],
            history.inertia[i]
        );
    }

    // as many clusters as points: every point becomes its own centroid
    let basis: Vec<(String, Vec<f64>)> = (0..10)
        .map(|i| {
            let mut v = vec![0.0; 10];
            v[i] = 1.0;
            (format!("e{i}"), v)
        })
        .collect();
    let exact = kmeans(
        &VectorTable::from_pairs(basis).unwrap(),
        &KmeansConfig::new(10, 1),
    )
    .unwrap();
    assert!(
        exact.inertia() <= 1e-12,
        "k = n should give zero inertia, got {}",
        exact.inertia()
    );

    // four points, two tight angular pairs: the optimum is unambiguous
    let angles = [0.1f64, 0.3, 1.3, 1.5];
    let four: Vec<(String, Vec<f64>)> = angles
        .iter()
        .enumerate()
        .map(|(i, a)| (format!("p{i}"), vec![a.cos(), a.sin()]))
        .collect();
    let table4 = VectorTable::from_pairs(four).unwrap();
    let points = table4.vectors();
    let part_inertia = |members: &[usize]| -> f64 {
        let dim = points[0].len();
        let mut centroid = vec![0.0; dim];
        for &m in members {
            for (c, v) in centroid.iter_mut().zip(&points[m]) {
                *c += v;
            }
        }
        for c in &mut centroid {
            *c /= members.len() as f64;
        }
        members
            .iter()
            .map(|&m| {
                points[m]
                    .iter()
                    .zip(&centroid)
                    .map(|(v, c)| (v - c) * (v - c))
                    .sum::<f64>()
            })
            .sum()
    };
    let mut best_inertia = f64::INFINITY;
    let mut best_partition = BTreeSet::new();
    for mask in 1u32..(1 << 4) - 1 {
        let a: Vec<usize> = (0..4).filter(|i| mask & (1 << i) != 0).collect();
        let b: Vec<usize> = (0..4).filter(|i| mask & (1 << i) == 0).collect();
        let inertia = part_inertia(&a) + part_inertia(&b);
        if inertia < best_inertia {
            best_inertia = inertia;
            best_partition = BTreeSet::from([
                a.into_iter().collect::<BTreeSet<_>>(),
                b.into_iter().collect::<BTreeSet<_>>(),
            ]);
        }
    }
    let model4 = kmeans(&table4, &KmeansConfig::new(2, 3)).unwrap();
    let mut found: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); 2];
    for i in 0..4 {
        found[model4.cluster_of(&format!("p{i}")).unwrap()].insert(i);
    }
    let found: BTreeSet<BTreeSet<usize>> = found.into_iter().collect();
    assert_eq!(
        found, best_partition,
        "fitted partition differs from the brute-force optimum"
    );
    assert!(
        (model4.inertia() - best_inertia).abs() <= 1e-9,
        "fitted inertia {} vs optimal {best_inertia}",
        model4.inertia()
    );
    println!("acceptance: k-means invariants PASS");
}

#[test]
fn criterion_06_svm_separable_feasible_and_antisymmetric() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut x = Vec::new();
    let mut y = Vec::new();
    for _ in 0..12 {
        x.push(vec![
            2.0 + rng.gen_range(-0.5..0.5),
            2.0 + rng.gen_range(-0.5..0.5),
        ]);
        y.push(Label::Patient);
    }
    for _ in 0..12 {
        x.push(vec![
            -2.0 + rng.gen_range(-0.5..0.5),
            -2.0 + rng.gen_range(-0.5..0.5),
        ]);
        y.push(Label::Control);
    }
    let cfg = SvmConfig::new(8);
    let (model, diag) = fit_svm(&x, &y, &cfg).unwrap();

    for (row, label) in x.iter().zip(&y) {
        assert_eq!(
            model.predict(row).unwrap(),
            *label,
            "separable fixture must be classified perfectly"
        );
    }
    for (i, a) in diag.alpha.iter().enumerate() {
        assert!(
            (0.0..=cfg.c).contains(a),
            "alpha[{i}] = {a} escapes [0, C = {}]",
            cfg.c
        );
    }

    // the weight vector is the alpha-weighted sum of standardized rows, and
    // the bias the alpha-weighted label sum
    let mut w = vec![0.0f64; 2];
    let mut b = 0.0f64;
    for (i, row) in x.iter().enumerate() {
        let z = model.standardizer.transform(row).unwrap();
        let coefficient = diag.alpha[i] * y[i].sign();
        for (wj, zj) in w.iter_mut().zip(&z) {
            *wj += coefficient * zj;
        }
        b += coefficient;
    }
    for (j, (have, want)) in model.weights.iter().zip(&w).enumerate() {
        assert!(
            (have - want).abs() <= 1e-6,
            "w[{j}] = {have} but alpha reconstruction gives {want}"
        );
    }
    assert!(
        (model.bias - b).abs() <= 1e-6,
        "bias {} but alpha reconstruction gives {b}",
        model.bias
    );

    let flipped: Vec<Label> = y
        .iter()
        .map(|l| match l {
            Label::Patient => Label::Control,
            Label::Control => Label::Patient,
        })
        .collect();
    let (mirror, _) = fit_svm(&x, &flipped, &cfg).unwrap();
    for row in &x {
        let d = model.decision(row).unwrap();
        let m = mirror.decision(row).unwrap();
        assert!(
            (d + m).abs() <= 1e-9,
            "flipping labels should negate the decision value: {d} vs {m}"
        );
    }
    println!("acceptance: SVM guarantees PASS");
}

#[test]
fn criterion_07_forest_deterministic_accurate_scale_invariant() {
    // feature 0 decides the class on an integer grid, feature 1 is noise
    let mut x = Vec::new();
    let mut y = Vec::new();
    for i in 0..12 {
        x.push(vec![i as f64, ((i * 7) % 5) as f64]);
        y.push(if i > 6 { Label::Patient } else { Label::Control });
    }
    let mut cfg = ForestConfig::new(42);
    cfg.n_trees = 25;

    let once = train_forest(&x, &y, &cfg).unwrap();
    let twice = train_forest(&x, &y, &cfg).unwrap();
    assert_eq!(
        once.to_json_bytes(),
        twice.to_json_bytes(),
        "the same seed must serialize byte-identically"
    );

    for (row, label) in x.iter().zip(&y) {
        assert_eq!(
            once.predict(row).unwrap(),
            *label,
            "informative fixture must be learned perfectly"
        );
    }

    // held-out probes on half-integers stay exact under these scale factors
    let probes = [vec![2.5, 1.0], vec![6.5, 3.0], vec![9.5, 0.0]];
    for factor in [0.5, 2.0, 3.0] {
        for feature in 0..2 {
            let scale = |row: &[f64]| -> Vec<f64> {
                let mut s = row.to_vec();
                s[feature] *= factor;
                s
            };
            let xs: Vec<Vec<f64>> = x.iter().map(|r| scale(r)).collect();
            let scaled = train_forest(&xs, &y, &cfg).unwrap();
            for (row, srow) in x.iter().zip(&xs) {
                assert_eq!(
                    once.proba(row).unwrap(),
                    scaled.proba(srow).unwrap(),
                    "scaling feature {feature} by {factor} changed a training vote"
                );
            }
            for probe in &probes {
                assert_eq!(
                    once.proba(probe).unwrap(),
                    scaled.proba(&scale(probe)).unwrap(),
                    "scaling feature {feature} by {factor} changed a held-out vote"
                );
            }
        }
    }
    println!("acceptance: random-forest guarantees PASS");
}

#[test]
fn criterion_08_end_to_end_synthetic_recovery() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();

    run(
        root,
        &[
            "synth",
            "--docs-per-class",
            "100",
            "--strength",
            "1.0",
            "--seed",
            "7",
            "--out",
            "strong",
        ],
    );
    let started = Instant::now();
    run(
        root,
        &[
            "evaluate",
            "--category",
            ALL_CATEGORIES,
            "--folds",
            "10",
            "--seed",
            "7",
            "--topics-k",
            "4",
            "--lda-iters",
            "150",
            "--lda-burnin",
            "50",
            "--cluster-k",
            "8",
            "--out",
            "strong",
        ],
    );
    let elapsed = started.elapsed();
    assert!(
        elapsed < Duration::from_secs(120),
        "200-document evaluation took {elapsed:?}"
    );
    let report =
        EvalReport::from_json_bytes(&std::fs::read(root.join("strong/report.json")).unwrap())
            .unwrap();
    assert_eq!(report.rows.len(), 30, "15 categories x 2 classifiers");
    for row in &report.rows {
        assert!(
            row.pooled_auc > 95.0,
            "full-strength signal should be recovered: {}/{} AUC {}",
            row.category,
            row.classifier.as_str(),
            row.pooled_auc
        );
    }

    run(
        root,
        &[
            "synth",
            "--docs-per-class",
            "100",
            "--strength",
            "0.0",
            "--seed",
            "6",
            "--out",
            "null",
        ],
    );
    run(
        root,
        &[
            "evaluate",
            "--category",
            ALL_CATEGORIES,
            "--folds",
            "10",
            "--seed",
            "6",
            "--topics-k",
            "4",
            "--lda-iters",
            "150",
            "--lda-burnin",
            "50",
            "--cluster-k",
            "8",
            "--out",
            "null",
        ],
    );
    let report =
        EvalReport::from_json_bytes(&std::fs::read(root.join("null/report.json")).unwrap())
            .unwrap();
    assert_eq!(report.rows.len(), 30);
    for row in &report.rows {
        assert!(
            (40.0..=60.0).contains(&row.pooled_auc),
            "zero-strength corpus should score near chance: {}/{} AUC {}",
            row.category,
            row.classifier.as_str(),
            row.pooled_auc
        );
    }
    println!("acceptance: end-to-end synthetic recovery PASS");
}

#[test]
fn criterion_09_artifacts_ignore_held_out_documents() {
    let base = synth_corpus(&SynthConfig::new(30, 0.8, 5)).unwrap();
    let mut widened = base.clone();
    let extras = synth_corpus(&SynthConfig::new(10, 0.2, 77)).unwrap();
    for mut doc in extras.documents {
        doc.id = format!("extra_{}", doc.id);
        widened.documents.push(doc);
    }

    let train_ids: Vec<usize> = (0..base.documents.len()).filter(|i| i % 3 != 0).collect();
    let from_base: Vec<&Document> = train_ids.iter().map(|&i| &base.documents[i]).collect();
    let from_widened: Vec<&Document> =
        train_ids.iter().map(|&i| &widened.documents[i]).collect();

    let cluster = kmeans(&synth_vectors(16, 5).unwrap(), &KmeansConfig::new(8, 5)).unwrap();
    let mut cfg = HarnessConfig::new(9);
    let mut lda = LdaConfig::new(2, 0);
    lda.iterations = 60;
    lda.burn_in = 20;
    cfg.lda = Some(lda);
    let channels = [Channel::Pos, Channel::Topic, Channel::Cluster];

    let narrow = fit_fold(&from_base, &channels, Some(&cluster), &cfg, 0).unwrap();
    let wide = fit_fold(&from_widened, &channels, Some(&cluster), &cfg, 0).unwrap();
    assert_eq!(
        narrow.to_json_bytes(),
        wide.to_json_bytes(),
        "fitted artifacts must not depend on documents outside the training fold"
    );
    println!("acceptance: leakage contract PASS");
}

#[test]
fn criterion_10_rfe_keeps_the_informative_feature() {
    let y = labels(30, 30);
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<FeatureVector> = y
            .iter()
            .map(|label| {
                let mut row = FeatureVector::zeros(10);
                for j in 0..10 {
                    if j == 3 {
                        row.set(j, label.sign() + 0.1 * rng.gen_range(-1.0..1.0));
                    } else {
                        row.set(j, rng.gen_range(-1.0..1.0));
                    }
                }
                row
            })
            .collect();
        let matrix = FeatureMatrix {
            space: FeatureSpace::from_names((0..10).map(|j| format!("f{j}")).collect()),
            ids: (0..y.len()).map(|i| format!("d{i}")).collect(),
            labels: y.clone(),
            rows,
        };
        let ranking = rfe(&matrix, &SvmConfig::new(seed), 0.2, 1).unwrap();
        let survivor = &ranking.entries[0];
        assert_eq!(survivor.rank, 1);
        assert_eq!(
            survivor.name, "f3",
            "seed {seed}: elimination dropped the informative feature, kept {}",
            survivor.name
        );
    }
    println!("acceptance: recursive feature elimination PASS");
}

#[test]
fn criterion_11_evaluate_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    run(
        root,
        &[
            "synth",
            "--docs-per-class",
            "20",
            "--strength",
            "1.0",
            "--seed",
            "3",
            "--out",
            "base",
        ],
    );
    for out in ["run1", "run2"] {
        run(
            root,
            &[
                "evaluate",
                "--corpus",
                "base/corpus.json",
                "--category",
                "pos,sentiment",
                "--folds",
                "5",
                "--seed",
                "3",
                "--out",
                out,
            ],
        );
    }
    for name in ["report.json", "roc_pos.svg", "roc_sentiment.svg"] {
        let a = std::fs::read(root.join("run1").join(name)).unwrap();
        let b = std::fs::read(root.join("run2").join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
    for name in ["roc_pos.svg", "roc_sentiment.svg"] {
        let svg = std::fs::read_to_string(root.join("run1").join(name)).unwrap();
        assert_eq!(
            svg.matches("<polyline").count(),
            2,
            "{name} should draw one curve per classifier"
        );
        assert!(
            svg.contains(r##"<polyline fill="none" stroke="#FF00FF""##),
            "{name} is missing the magenta curve"
        );
        assert!(
            svg.contains(r##"<polyline fill="none" stroke="#0000FF""##),
            "{name} is missing the blue curve"
        );
        assert!(
            svg.contains("stroke-dasharray"),
            "{name} is missing the dashed chance diagonal"
        );
    }
    println!("acceptance: evaluation determinism PASS");
}
