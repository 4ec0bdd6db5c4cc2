//! Subcommand implementations. Each one resolves its inputs through the
//! flag > config file > default chain, runs the core pipeline, and writes
//! every artifact atomically under the output directory.

use std::path::{Path, PathBuf};

use lingua_screen_core::corpus::{
    attach_annotations, fallback_pos_tag, lexicon_sentiment, load_corpus, load_pos_lexicon,
    load_sentiment_lexicon, parse_conllu, tokenize, Corpus, PosColumn, PosLexicon,
    SentimentLexicon,
};
use lingua_screen_core::embeddings::{kmeans, load_vectors, ClusterModel, KmeansConfig};
use lingua_screen_core::evaluation::{
    cross_validate, render_roc_svg, synth_corpus, synth_vectors, Averaging, ClassifierKind,
    EvalReport, HarnessConfig, RocCurve, SynthConfig, FOREST_COLOR, SVM_COLOR,
};
use lingua_screen_core::features::{
    extract_matrix, resolve_categories, Category, Channel, FeatureSpace, ModelContext, Profile,
};
use lingua_screen_core::io::write_atomic;
use lingua_screen_core::ml::SvmConfig;
use lingua_screen_core::selection::{information_gain, rfe, Binning};
use lingua_screen_core::topics::{train_lda, LdaConfig, TopicModel};
use lingua_screen_core::{Error, Result};

use crate::settings::{resolve_seed, Settings};
use crate::{
    AnnotateArgs, Cli, ClusterVectorsArgs, Command, EvaluateArgs, FeaturizeArgs, GlobalArgs,
    IngestArgs, ReportArgs, SelectArgs, SynthArgs, TrainTopicsArgs,
};

/// Validation problems (bad flags, configs, or inputs) exit 1; failures of
/// the run itself (I/O, internal shape mismatches) exit 2.
pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Io { .. } | Error::DimensionMismatch { .. } => 2,
        _ => 1,
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let settings = Settings::load(cli.global.config.as_deref())?;
    if let Some(threads) = settings.parsed("threads", cli.global.threads)? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    let seed = resolve_seed(&settings, cli.global.seed)?;
    let ctx = Ctx {
        global: cli.global,
        settings,
        seed,
    };
    match cli.command {
        Command::Ingest(args) => ingest(&ctx, &args),
        Command::Annotate(args) => annotate(&ctx, &args),
        Command::TrainTopics(args) => train_topics(&ctx, &args),
        Command::ClusterVectors(args) => cluster_vectors(&ctx, &args),
        Command::Featurize(args) => featurize(&ctx, &args),
        Command::Evaluate(args) => evaluate(&ctx, &args),
        Command::Select(args) => select(&ctx, &args),
        Command::Synth(args) => synth(&ctx, &args),
        Command::Report(args) => report(&ctx, &args),
    }
}

struct Ctx {
    global: GlobalArgs,
    settings: Settings,
    seed: u64,
}

impl Ctx {
    fn out_dir(&self) -> PathBuf {
        self.settings
            .path("out", self.global.out.as_deref())
            .unwrap_or_else(|| PathBuf::from("out"))
    }

    fn ensure_out(&self) -> Result<PathBuf> {
        let dir = self.out_dir();
        std::fs::create_dir_all(&dir).map_err(|e| {
            Error::Config(format!(
                "cannot create output directory {}: {e}",
                dir.display()
            ))
        })?;
        Ok(dir)
    }

    fn profile(&self) -> Result<Profile> {
        match self.settings.string("preset", self.global.preset.as_deref()) {
            None => Ok(Profile::LabWriting),
            Some(name) => Profile::parse(&name).ok_or_else(|| {
                Error::Config(format!(
                    "unknown preset {name:?} (expected labwriting or twitter)"
                ))
            }),
        }
    }

    fn categories(&self, profile: Profile) -> Result<Vec<Category>> {
        let names = self
            .settings
            .string("category", self.global.category.as_deref())
            .unwrap_or_else(|| "all".to_string());
        resolve_categories(&names, profile)
    }

    fn classifiers(&self) -> Result<Vec<ClassifierKind>> {
        let name = self
            .settings
            .string("classifier", self.global.classifier.as_deref())
            .unwrap_or_else(|| "both".to_string());
        match name.as_str() {
            "svm" => Ok(vec![ClassifierKind::Svm]),
            "forest" => Ok(vec![ClassifierKind::Forest]),
            "both" => Ok(vec![ClassifierKind::Svm, ClassifierKind::Forest]),
            other => Err(Error::Config(format!(
                "unknown classifier {other:?} (expected svm, forest, or both)"
            ))),
        }
    }

    /// Input path resolution: flag, then config key, then `<out>/<name>`.
    fn input_path(&self, key: &str, flag: Option<&Path>, default_name: &str) -> PathBuf {
        self.settings
            .path(key, flag)
            .unwrap_or_else(|| self.out_dir().join(default_name))
    }

    fn existing(&self, path: PathBuf, hint: &str) -> Result<PathBuf> {
        if path.exists() {
            Ok(path)
        } else {
            Err(Error::Config(format!(
                "{} does not exist ({hint})",
                path.display()
            )))
        }
    }

    fn load_corpus_store(&self, flag: Option<&Path>) -> Result<Corpus> {
        let path = self.existing(
            self.input_path("corpus", flag, "corpus.json"),
            "run ingest or synth first, or pass --corpus",
        )?;
        Corpus::load(&path)
    }
}

fn ingest(ctx: &Ctx, args: &IngestArgs) -> Result<()> {
    let text = ctx
        .settings
        .path("text", args.text.as_deref())
        .ok_or_else(|| Error::Config("ingest needs --text with the raw JSONL corpus".into()))?;
    let text = ctx.existing(text, "raw JSONL corpus")?;
    let mut corpus = load_corpus(&text)?;
    for doc in &mut corpus.documents {
        if doc.sentences.is_empty() {
            doc.sentences = tokenize(&doc.text);
        }
    }
    if let Some(parses) = ctx.settings.path("parses", args.parses.as_deref()) {
        let parses = ctx.existing(parses, "dependency parse file")?;
        let pos_col = match ctx
            .settings
            .string("pos_column", args.pos_column.as_deref())
            .as_deref()
        {
            None | Some("xpos") => PosColumn::Xpos,
            Some("upos") => PosColumn::Upos,
            Some(other) => {
                return Err(Error::Config(format!(
                    "unknown pos column {other:?} (expected xpos or upos)"
                )))
            }
        };
        for (id, sentences) in parse_conllu(&parses, pos_col)? {
            match corpus.get_mut(&id) {
                Some(doc) => doc.sentences = sentences,
                None => return Err(Error::UnknownDocId { id }),
            }
        }
    }
    if let Some(annotations) = ctx.settings.path("annotations", args.annotations.as_deref()) {
        let annotations = ctx.existing(annotations, "annotation sidecar")?;
        attach_annotations(&mut corpus, &annotations)?;
    }
    let out = ctx.ensure_out()?;
    let store = out.join("corpus.json");
    corpus.save(&store)?;
    let (patients, controls) = corpus.label_counts();
    println!(
        "ingested {} documents ({patients} patients, {controls} controls) -> {}",
        corpus.len(),
        store.display()
    );
    Ok(())
}

fn annotate(ctx: &Ctx, args: &AnnotateArgs) -> Result<()> {
    let mut corpus = ctx.load_corpus_store(args.corpus.as_deref())?;
    let pos_lexicon = match ctx.settings.path("pos_lexicon", args.pos_lexicon.as_deref()) {
        Some(path) => load_pos_lexicon(&ctx.existing(path, "pos lexicon")?)?,
        None => PosLexicon::default(),
    };
    let sentiment_lexicon = match ctx
        .settings
        .path("sentiment_lexicon", args.sentiment_lexicon.as_deref())
    {
        Some(path) => load_sentiment_lexicon(&ctx.existing(path, "sentiment lexicon")?)?,
        None => SentimentLexicon::default(),
    };
    let mut tagged = 0usize;
    let mut scored = 0usize;
    for doc in &mut corpus.documents {
        if doc.sentences.is_empty() {
            doc.sentences = tokenize(&doc.text);
        }
        for sentence in &mut doc.sentences {
            if sentence.tokens.iter().any(|t| t.pos.is_none()) {
                let surfaces: Vec<&str> =
                    sentence.tokens.iter().map(|t| t.surface.as_str()).collect();
                let tags = fallback_pos_tag(&surfaces, &pos_lexicon);
                for (token, tag) in sentence.tokens.iter_mut().zip(tags) {
                    if token.pos.is_none() {
                        token.pos = Some(tag);
                    }
                }
                tagged += 1;
            }
            if sentence.sentiment.is_none() {
                lexicon_sentiment(sentence, &sentiment_lexicon);
                scored += 1;
            }
        }
    }
    let out = ctx.ensure_out()?;
    let store = out.join("corpus.json");
    corpus.save(&store)?;
    println!(
        "annotated {tagged} sentences with pos tags, {scored} with sentiment -> {}",
        store.display()
    );
    Ok(())
}

fn lda_config(
    ctx: &Ctx,
    profile: Profile,
    topics_k: Option<usize>,
    iters: Option<usize>,
    burnin: Option<usize>,
    alpha: Option<f64>,
    beta: Option<f64>,
) -> Result<LdaConfig> {
    let k = ctx
        .settings
        .parsed("topics_k", topics_k)?
        .unwrap_or_else(|| profile.default_topic_k());
    let mut lda = LdaConfig::new(k, ctx.seed);
    if let Some(v) = ctx.settings.parsed("lda_iters", iters)? {
        lda.iterations = v;
    }
    if let Some(v) = ctx.settings.parsed("lda_burnin", burnin)? {
        lda.burn_in = v;
    }
    if let Some(v) = ctx.settings.parsed("lda_alpha", alpha)? {
        lda.alpha = v;
    }
    if let Some(v) = ctx.settings.parsed("lda_beta", beta)? {
        lda.beta = v;
    }
    Ok(lda)
}

fn train_topics(ctx: &Ctx, args: &TrainTopicsArgs) -> Result<()> {
    let corpus = ctx.load_corpus_store(args.corpus.as_deref())?;
    let profile = ctx.profile()?;
    let lda = lda_config(
        ctx,
        profile,
        args.topics_k,
        args.lda_iters,
        args.lda_burnin,
        args.lda_alpha,
        args.lda_beta,
    )?;
    let model = train_lda(&corpus, &lda)?;
    let out = ctx.ensure_out()?;
    let path = out.join("topics.json");
    model.save(&path)?;
    println!(
        "trained {} topics over {} terms -> {}",
        model.k(),
        model.vocabulary().len(),
        path.display()
    );
    for topic in 0..model.k() {
        let words: Vec<String> = model
            .top_words(topic, 8)
            .into_iter()
            .map(|(word, _)| word)
            .collect();
        println!("topic {topic}: {}", words.join(" "));
    }
    Ok(())
}

fn cluster_vectors(ctx: &Ctx, args: &ClusterVectorsArgs) -> Result<()> {
    let path = ctx.existing(
        ctx.input_path("vectors", args.vectors.as_deref(), "vectors.txt"),
        "pass --vectors or run synth first",
    )?;
    let table = load_vectors(&path)?;
    let k = ctx
        .settings
        .parsed("cluster_k", args.cluster_k)?
        .unwrap_or_else(|| table.len().min(100));
    let model = kmeans(&table, &KmeansConfig::new(k, ctx.seed))?;
    let out = ctx.ensure_out()?;
    let dest = out.join("clusters.json");
    model.save(&dest)?;
    println!(
        "{} clusters over {} words, inertia {:.6} -> {}",
        model.k(),
        table.len(),
        model.inertia(),
        dest.display()
    );
    Ok(())
}

/// Surfaces missing-annotation errors before any model files are touched or
/// training starts, so the report names the absent channel rather than a
/// downstream input.
fn check_channel_coverage(corpus: &Corpus, categories: &[Category]) -> Result<()> {
    let docs: Vec<&_> = corpus.documents.iter().collect();
    let channels: Vec<Channel> = categories.iter().flat_map(|c| c.channels.clone()).collect();
    FeatureSpace::build(&docs, &channels, Some(1), Some(1))?;
    Ok(())
}

/// Loads the trained models the requested channels depend on, erroring with
/// the channel name when a required model file is absent.
fn load_channel_models(
    ctx: &Ctx,
    categories: &[Category],
    topics_flag: Option<&Path>,
    clusters_flag: Option<&Path>,
) -> Result<(Option<TopicModel>, Option<ClusterModel>)> {
    let needs = |channel: Channel| categories.iter().any(|c| c.channels.contains(&channel));
    let topics = if needs(Channel::Topic) {
        let path = ctx.existing(
            ctx.input_path("topics", topics_flag, "topics.json"),
            "the TOPIC channel needs a trained topic model; run train-topics or pass --topics",
        )?;
        Some(TopicModel::load(&path)?)
    } else {
        None
    };
    let clusters = if needs(Channel::Cluster) {
        let path = ctx.existing(
            ctx.input_path("clusters", clusters_flag, "clusters.json"),
            "the CLUSTER channel needs a trained cluster model; run cluster-vectors or pass --clusters",
        )?;
        Some(ClusterModel::load(&path)?)
    } else {
        None
    };
    Ok((topics, clusters))
}

fn featurize(ctx: &Ctx, args: &FeaturizeArgs) -> Result<()> {
    let corpus = ctx.load_corpus_store(args.corpus.as_deref())?;
    let profile = ctx.profile()?;
    let categories = ctx.categories(profile)?;
    check_channel_coverage(&corpus, &categories)?;
    let (topics, clusters) =
        load_channel_models(ctx, &categories, args.topics.as_deref(), args.clusters.as_deref())?;
    let models = ModelContext {
        topics: topics.as_ref(),
        clusters: clusters.as_ref(),
    };
    let docs: Vec<&_> = corpus.documents.iter().collect();
    let out = ctx.ensure_out()?;
    for category in &categories {
        let space = FeatureSpace::build(
            &docs,
            &category.channels,
            topics.as_ref().map(|m| m.k()),
            clusters.as_ref().map(|m| m.k()),
        )?;
        let extraction = extract_matrix(&corpus, &space, &models)?;
        let path = out.join(format!("features_{}.csv", category.name));
        write_atomic(&path, extraction.matrix.to_csv().as_bytes())?;
        println!(
            "wrote {} ({} rows x {} features)",
            path.display(),
            corpus.len(),
            space.dim()
        );
        if !extraction.uniform_topic_docs.is_empty() {
            println!(
                "note: {} document(s) fell back to a uniform topic mixture",
                extraction.uniform_topic_docs.len()
            );
        }
    }
    Ok(())
}

fn evaluate(ctx: &Ctx, args: &EvaluateArgs) -> Result<()> {
    let corpus = ctx.load_corpus_store(args.corpus.as_deref())?;
    let profile = ctx.profile()?;
    let categories = ctx.categories(profile)?;
    check_channel_coverage(&corpus, &categories)?;
    let mut cfg = HarnessConfig::new(ctx.seed);
    cfg.folds = ctx.settings.parsed("folds", args.folds)?.unwrap_or(10);
    cfg.paper_mode = ctx.settings.switch("paper_mode", ctx.global.paper_mode)?;
    cfg.classifiers = ctx.classifiers()?;
    if let Some(name) = ctx.settings.string("f_average", args.f_average.as_deref()) {
        cfg.f_average = Averaging::parse(&name)?;
    }
    if let Some(v) = ctx.settings.parsed("svm_c", args.svm_c)? {
        cfg.svm.c = v;
    }
    if let Some(v) = ctx.settings.parsed("svm_tol", args.svm_tol)? {
        cfg.svm.tol = v;
    }
    if let Some(v) = ctx.settings.parsed("svm_max_epochs", args.svm_max_epochs)? {
        cfg.svm.max_epochs = v;
    }
    if let Some(v) = ctx.settings.parsed("forest_trees", args.forest_trees)? {
        cfg.forest.n_trees = v;
    }
    if let Some(v) = ctx.settings.parsed("forest_min_leaf", args.forest_min_leaf)? {
        cfg.forest.min_leaf = v;
    }
    if let Some(v) = ctx.settings.parsed("forest_mtry", args.forest_mtry)? {
        cfg.forest.mtry = Some(v);
    }
    if let Some(v) = ctx.settings.parsed("forest_max_depth", args.forest_max_depth)? {
        cfg.forest.max_depth = Some(v);
    }
    let needs = |channel: Channel| categories.iter().any(|c| c.channels.contains(&channel));
    if needs(Channel::Topic) {
        cfg.lda = Some(lda_config(
            ctx,
            profile,
            args.topics_k,
            args.lda_iters,
            args.lda_burnin,
            args.lda_alpha,
            args.lda_beta,
        )?);
    }
    let cluster_model = if needs(Channel::Cluster) {
        let path = ctx.input_path("vectors", args.vectors.as_deref(), "vectors.txt");
        if !path.exists() {
            return Err(Error::Config(format!(
                "the CLUSTER channel needs a word-vector table: {} not found (pass --vectors)",
                path.display()
            )));
        }
        let table = load_vectors(&path)?;
        let k = ctx
            .settings
            .parsed("cluster_k", args.cluster_k)?
            .unwrap_or_else(|| table.len().min(100));
        Some(kmeans(&table, &KmeansConfig::new(k, ctx.seed))?)
    } else {
        None
    };
    let report = cross_validate(&corpus, &categories, cluster_model.as_ref(), &cfg)?;

    let out = ctx.ensure_out()?;
    write_atomic(&out.join("report.json"), &report.to_json_bytes())?;
    let table = report.to_text_table();
    write_atomic(&out.join("report.txt"), table.as_bytes())?;
    for category in &categories {
        let mut curves = Vec::new();
        for kind in [ClassifierKind::Svm, ClassifierKind::Forest] {
            let row = report
                .rows
                .iter()
                .find(|r| r.category == category.name && r.classifier == kind);
            if let Some(row) = row {
                let (name, color) = match kind {
                    ClassifierKind::Svm => ("SVM", SVM_COLOR),
                    ClassifierKind::Forest => ("Random Forest", FOREST_COLOR),
                };
                curves.push(RocCurve {
                    name: name.to_string(),
                    color: color.to_string(),
                    points: row.roc.clone(),
                });
            }
        }
        let svg = render_roc_svg(&category.name, &curves)?;
        write_atomic(&out.join(format!("roc_{}.svg", category.name)), svg.as_bytes())?;
    }
    print!("{table}");
    println!("report: {}", out.join("report.json").display());
    Ok(())
}

fn select(ctx: &Ctx, args: &SelectArgs) -> Result<()> {
    let corpus = ctx.load_corpus_store(args.corpus.as_deref())?;
    let profile = ctx.profile()?;
    let categories = ctx.categories(profile)?;
    if categories.len() != 1 {
        return Err(Error::Config(
            "select works on a single category; pass --category with one name".into(),
        ));
    }
    let category = &categories[0];
    check_channel_coverage(&corpus, &categories)?;
    let (topics, clusters) =
        load_channel_models(ctx, &categories, args.topics.as_deref(), args.clusters.as_deref())?;
    let models = ModelContext {
        topics: topics.as_ref(),
        clusters: clusters.as_ref(),
    };
    let docs: Vec<&_> = corpus.documents.iter().collect();
    let space = FeatureSpace::build(
        &docs,
        &category.channels,
        topics.as_ref().map(|m| m.k()),
        clusters.as_ref().map(|m| m.k()),
    )?;
    let extraction = extract_matrix(&corpus, &space, &models)?;
    let method = ctx
        .settings
        .string("method", args.method.as_deref())
        .unwrap_or_else(|| "ig".to_string());
    let ranking = match method.as_str() {
        "ig" => {
            let bins = ctx.settings.parsed("bins", args.bins)?.unwrap_or(10);
            let binning = match ctx
                .settings
                .string("binning", args.binning.as_deref())
                .as_deref()
            {
                None | Some("width") => Binning::EqualWidth,
                Some("rank") => Binning::Rank,
                Some(other) => {
                    return Err(Error::Config(format!(
                        "unknown binning {other:?} (expected width or rank)"
                    )))
                }
            };
            information_gain(&extraction.matrix, bins, binning)?
        }
        "rfe" => {
            let mut svm = SvmConfig::new(ctx.seed);
            if let Some(c) = ctx.settings.parsed("svm_c", args.svm_c)? {
                svm.c = c;
            }
            let drop = ctx
                .settings
                .parsed("drop_fraction", args.drop_fraction)?
                .unwrap_or(0.1);
            let target = ctx.settings.parsed("target_k", args.target_k)?.unwrap_or(1);
            rfe(&extraction.matrix, &svm, drop, target)?
        }
        other => {
            return Err(Error::Config(format!(
                "unknown method {other:?} (expected ig or rfe)"
            )))
        }
    };
    let out = ctx.ensure_out()?;
    let path = out.join(format!("ranking_{method}.csv"));
    write_atomic(&path, ranking.to_csv().as_bytes())?;
    println!("wrote {} ({} features ranked)", path.display(), ranking.entries.len());
    for entry in ranking.entries.iter().take(10) {
        println!("{:>4}  {:<28} {:.6}", entry.rank, entry.name, entry.score);
    }
    Ok(())
}

fn synth(ctx: &Ctx, args: &SynthArgs) -> Result<()> {
    let docs_per_class = ctx
        .settings
        .parsed("docs_per_class", args.docs_per_class)?
        .unwrap_or(100);
    let strength = ctx
        .settings
        .parsed("strength", args.strength)?
        .unwrap_or(1.0);
    let mut config = SynthConfig::new(docs_per_class, strength, ctx.seed);
    if let Some(v) = ctx.settings.parsed("min_sentences", args.min_sentences)? {
        config.sentences_range.0 = v;
    }
    if let Some(v) = ctx.settings.parsed("max_sentences", args.max_sentences)? {
        config.sentences_range.1 = v;
    }
    if let Some(v) = ctx.settings.parsed("min_tokens", args.min_tokens)? {
        config.tokens_range.0 = v;
    }
    if let Some(v) = ctx.settings.parsed("max_tokens", args.max_tokens)? {
        config.tokens_range.1 = v;
    }
    let corpus = synth_corpus(&config)?;
    let dim = ctx
        .settings
        .parsed("vector_dim", args.vector_dim)?
        .unwrap_or(16);
    let vectors = synth_vectors(dim, ctx.seed)?;
    let out = ctx.ensure_out()?;
    let store = out.join("corpus.json");
    corpus.save(&store)?;
    let vector_path = out.join("vectors.txt");
    write_atomic(&vector_path, vectors.to_text().as_bytes())?;
    println!(
        "generated {} documents ({docs_per_class} per class) at strength {strength} -> {}",
        corpus.len(),
        store.display()
    );
    println!(
        "wrote {} word vectors of dimension {} -> {}",
        vectors.len(),
        vectors.dim(),
        vector_path.display()
    );
    Ok(())
}

fn report(ctx: &Ctx, args: &ReportArgs) -> Result<()> {
    let path = ctx.existing(
        ctx.input_path("report", args.report.as_deref(), "report.json"),
        "run evaluate first or pass --report",
    )?;
    let bytes = std::fs::read(&path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let report = EvalReport::from_json_bytes(&bytes)?;
    print!("{}", report.to_text_table());
    Ok(())
}
