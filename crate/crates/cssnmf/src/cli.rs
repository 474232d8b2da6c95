use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use cssnmf_core::model::{regression_error, FitConfig, Predictor};
use cssnmf_core::synthetic::{generate, NoiseKind, SyntheticConfig};
use cssnmf_core::text::{
    balance, build_tfidf, interval_counts, vectorize_new, RatedCorpus, StopWords, TfidfConfig,
    Vocabulary, DEFAULT_RATING_RANGE,
};
use cssnmf_core::DenseMatrix;
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::io::{self, fmt_f64, numbered_header, write_matrix, write_table, write_vector};
use crate::model_file::{ModelFile, VocabFile};
use crate::parallel::fit_parallel;
use crate::report::{grouped_summary, prediction_histogram, topic_report};
use crate::sweep::{
    figure_filter, run_sweep, synthetic_lambda_grid, text_lambda_grid, write_figure_csv,
    write_sweep_csv, SweepSpec,
};

#[derive(Debug, Parser)]
#[command(name = "cssnmf", version, about = "Continuous semi-supervised NMF")]
pub struct Cli {
    /// Base random seed.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic dataset: X.csv, Y.csv, truth.json.
    Synth(SynthArgs),
    /// Turn a rated corpus into X.csv, Y.csv, ids.csv, vocab.json.
    Ingest(IngestArgs),
    /// Fit one model: model.json, objective_trace.csv, W.csv.
    Fit(FitArgs),
    /// Fit a grid of (r, lambda) cells on a train/test split: sweep.csv.
    Sweep(SweepArgs),
    /// Predict responses: predictions.csv, plus summary.csv and histogram.csv with truth.
    Predict(PredictArgs),
    /// Top terms per topic: topics.json, topics.txt.
    Topics(TopicsArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Noise {
    Gaussian,
    Uniform,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, default_value_t = 40)]
    pub m: usize,
    #[arg(long, default_value_t = 4)]
    pub rank: usize,
    /// Factor entries are drawn below this bound.
    #[arg(long, default_value_t = 20.0)]
    pub scale: f64,
    /// Noise level for both X and Y unless overridden.
    #[arg(long, default_value_t = 4.0)]
    pub eta: f64,
    #[arg(long)]
    pub eta_x: Option<f64>,
    #[arg(long)]
    pub eta_y: Option<f64>,
    #[arg(long, value_enum, default_value_t = Noise::Gaussian)]
    pub noise: Noise,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Stop {
    English,
    None,
}

#[derive(Debug, Args)]
pub struct TextArgs {
    #[arg(long, default_value_t = 0.01)]
    pub min_df: f64,
    #[arg(long, default_value_t = 0.15)]
    pub max_df: f64,
    #[arg(long, value_enum, default_value_t = Stop::English)]
    pub stopwords: Stop,
    #[arg(long)]
    pub no_lowercase: bool,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// CSV with id,text,rating or JSON lines with the same fields.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Valid rating range as lo,hi.
    #[arg(long, value_delimiter = ',', num_args = 2)]
    pub range: Option<Vec<f64>>,
    /// Subsample to equal counts per rating interval, e.g. 1,2,3,4,5.
    #[arg(long, value_delimiter = ',')]
    pub balance_edges: Option<Vec<f64>>,
    #[command(flatten)]
    pub text: TextArgs,
}

#[derive(Debug, Args)]
pub struct FitOpts {
    #[arg(long, default_value_t = 1e-4)]
    pub tau: f64,
    #[arg(long, default_value_t = 100)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 10)]
    pub restarts: usize,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub x: PathBuf,
    #[arg(long)]
    pub y: PathBuf,
    #[arg(long, default_value_t = 4)]
    pub rank: usize,
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
    /// vocab.json from ingest, stored in the model for text prediction.
    #[arg(long)]
    pub vocab: Option<PathBuf>,
    #[command(flatten)]
    pub opts: FitOpts,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Grid {
    Synthetic,
    Text,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub x: PathBuf,
    #[arg(long)]
    pub y: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "4")]
    pub r_values: Vec<usize>,
    /// Explicit lambda values; overrides --grid.
    #[arg(long, value_delimiter = ',')]
    pub lambdas: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value_t = Grid::Synthetic)]
    pub grid: Grid,
    #[arg(long, default_value_t = 0.7)]
    pub train_frac: f64,
    /// Seed of the train/test split (default: --seed).
    #[arg(long)]
    pub split_seed: Option<u64>,
    /// Also write sweep_figure.csv with outlying points blanked.
    #[arg(long)]
    pub figure_filter: bool,
    /// Write each cell's model to models/.
    #[arg(long)]
    pub save_models: bool,
    #[command(flatten)]
    pub opts: FitOpts,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Numeric document-term matrix.
    #[arg(long, conflicts_with = "corpus", required_unless_present = "corpus")]
    pub x: Option<PathBuf>,
    /// Rated corpus (ratings used as truth); needs a model with a vocabulary.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// True responses for --x input.
    #[arg(long, requires = "x")]
    pub y: Option<PathBuf>,
    /// Interval edges for the grouped summary.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5")]
    pub edges: Vec<f64>,
    #[arg(long, default_value_t = 0.25)]
    pub bin_width: f64,
}

#[derive(Debug, Args)]
pub struct TopicsArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub top_k: usize,
}

/// Parses the process arguments and runs the command.
pub fn run() -> Result<()> {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return Ok(());
        }
        Err(e) => {
            let msg = e.to_string();
            let msg = msg.strip_prefix("error: ").unwrap_or(&msg).trim_end();
            return Err(CliError::Usage(msg.to_string()));
        }
    };
    execute(cli)
}

pub fn execute(cli: Cli) -> Result<()> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        // Fails only if a pool already exists, e.g. on a second call in-process.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global();
    }
    std::fs::create_dir_all(&cli.out).map_err(|e| CliError::io(&cli.out, e))?;
    let out = cli.out.as_path();
    match cli.command {
        Command::Synth(a) => synth(a, cli.seed, out),
        Command::Ingest(a) => ingest(a, cli.seed, out),
        Command::Fit(a) => fit(a, cli.seed, out),
        Command::Sweep(a) => sweep(a, cli.seed, out),
        Command::Predict(a) => predict(a, out),
        Command::Topics(a) => topics(a, out),
    }
}

fn usage<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

fn synth(a: SynthArgs, seed: u64, out: &Path) -> Result<()> {
    let cfg = SyntheticConfig {
        n: a.n,
        m: a.m,
        rank: a.rank,
        scale: a.scale,
        eta_x: a.eta_x.unwrap_or(a.eta),
        eta_y: a.eta_y.unwrap_or(a.eta),
        noise: match a.noise {
            Noise::Gaussian => NoiseKind::Gaussian,
            Noise::Uniform => NoiseKind::Uniform,
        },
        seed,
    };
    cfg.validate().map_err(usage)?;
    let ds = generate(&cfg)?;
    write_matrix(&out.join("X.csv"), &numbered_header("x", cfg.m), &ds.x)?;
    write_vector(&out.join("Y.csv"), "y", &ds.y)?;

    #[derive(Serialize)]
    struct Truth<'a> {
        config: &'a SyntheticConfig,
        #[serde(rename = "W")]
        w: Vec<Vec<f64>>,
        #[serde(rename = "H")]
        h: Vec<Vec<f64>>,
        theta: &'a [f64],
    }
    let truth = Truth {
        config: &cfg,
        w: ds.truth.w.row_iter().map(<[f64]>::to_vec).collect(),
        h: ds.truth.h.row_iter().map(<[f64]>::to_vec).collect(),
        theta: &ds.truth.theta,
    };
    io::write_json(&out.join("truth.json"), &truth)
}

fn tfidf_config(t: &TextArgs) -> Result<TfidfConfig> {
    let cfg = TfidfConfig {
        min_df: t.min_df,
        max_df: t.max_df,
        stopwords: match t.stopwords {
            Stop::English => StopWords::English,
            Stop::None => StopWords::None,
        },
        lowercase: !t.no_lowercase,
        ..TfidfConfig::default()
    };
    cfg.validate().map_err(usage)?;
    Ok(cfg)
}

fn rating_range(range: &Option<Vec<f64>>) -> (f64, f64) {
    range
        .as_ref()
        .map_or(DEFAULT_RATING_RANGE, |r| (r[0], r[1]))
}

fn ingest(a: IngestArgs, seed: u64, out: &Path) -> Result<()> {
    let cfg = tfidf_config(&a.text)?;
    let mut corpus = io::read_corpus(&a.corpus, rating_range(&a.range))?;
    if let Some(edges) = &a.balance_edges {
        let before = interval_counts(&corpus, edges);
        corpus = balance(&corpus, edges, seed)?;
        eprintln!(
            "balanced {:?} per interval down to {} ({} entries)",
            before,
            corpus.len() / before.len().max(1),
            corpus.len()
        );
    }
    let dtm = build_tfidf(&corpus, &cfg)?;
    if !dtm.empty_rows.is_empty() {
        eprintln!(
            "warning: {} document(s) have no in-vocabulary term and are all-zero rows",
            dtm.empty_rows.len()
        );
    }
    write_matrix(&out.join("X.csv"), dtm.vocab.terms(), &dtm.x)?;
    write_vector(&out.join("Y.csv"), "y", &corpus.ratings())?;
    write_table(
        &out.join("ids.csv"),
        &["id".to_string()],
        dtm.doc_ids.iter().map(|id| [id.clone()]),
    )?;
    io::write_json(&out.join("vocab.json"), &VocabFile::from_dtm(&dtm))
}

/// Reads X and Y and checks they agree on the number of rows.
fn read_xy(x_path: &Path, y_path: &Path) -> Result<(Vec<String>, DenseMatrix, Vec<f64>)> {
    let (header, x) = io::read_matrix(x_path)?;
    let y = io::read_vector(y_path)?;
    if x.rows() != y.len() {
        return Err(CliError::Data(format!(
            "X is {}x{} ({}) but Y has {} entries ({}); expected {}",
            x.rows(),
            x.cols(),
            x_path.display(),
            y.len(),
            y_path.display(),
            x.rows()
        )));
    }
    Ok((header, x, y))
}

fn fit(a: FitArgs, seed: u64, out: &Path) -> Result<()> {
    let (_, x, y) = read_xy(&a.x, &a.y)?;
    let vocab: Option<VocabFile> = a.vocab.as_deref().map(io::read_json).transpose()?;
    if let Some(v) = &vocab {
        if v.terms.len() != x.cols() {
            return Err(CliError::Data(format!(
                "vocabulary has {} terms but X has {} columns",
                v.terms.len(),
                x.cols()
            )));
        }
    }
    let cfg = FitConfig {
        rank: a.rank,
        lambda: a.lambda,
        tau: a.opts.tau,
        max_iter: a.opts.max_iter,
        seed,
        restarts: a.opts.restarts,
    };
    cfg.validate().map_err(usage)?;
    let (fac, report) = fit_parallel(&x, &y, &cfg)?;
    if report.rank_exceeds_data {
        eprintln!(
            "warning: rank {} exceeds min(n, m) = {}",
            cfg.rank,
            x.rows().min(x.cols())
        );
    }
    ModelFile::new(&fac, &cfg, &report, vocab.as_ref()).save(&out.join("model.json"))?;
    write_table(
        &out.join("objective_trace.csv"),
        &["iter", "F", "N", "R"].map(String::from),
        report.objective_trace.iter().map(|p| {
            [
                p.iteration.to_string(),
                fmt_f64(p.f),
                fmt_f64(p.n),
                fmt_f64(p.r),
            ]
        }),
    )?;
    write_matrix(&out.join("W.csv"), &numbered_header("w_", cfg.rank), &fac.w)?;
    eprintln!(
        "F = {} (N = {}, R = {}) after {} iterations, restart {}",
        report.final_objective,
        report.objective_trace.last().map_or(f64::NAN, |p| p.n),
        regression_error(&fac.w, &fac.theta, &y),
        report.iterations_run,
        report.restart_index
    );
    Ok(())
}

fn sweep(a: SweepArgs, seed: u64, out: &Path) -> Result<()> {
    let (_, x, y) = read_xy(&a.x, &a.y)?;
    let lambda_values = a.lambdas.clone().unwrap_or_else(|| match a.grid {
        Grid::Synthetic => synthetic_lambda_grid(),
        Grid::Text => text_lambda_grid(),
    });
    if !(a.train_frac > 0.0 && a.train_frac < 1.0) {
        return Err(CliError::Usage("--train-frac must lie in (0, 1)".into()));
    }
    let spec = SweepSpec {
        r_values: a.r_values.clone(),
        lambda_values,
        restarts: a.opts.restarts,
        split_seed: a.split_seed.unwrap_or(seed),
        fit_seed: seed,
        train_frac: a.train_frac,
        tau: a.opts.tau,
        max_iter: a.opts.max_iter,
    }
    .normalized()?;
    FitConfig {
        rank: spec.r_values[0],
        lambda: 0.0,
        tau: spec.tau,
        max_iter: spec.max_iter,
        seed,
        restarts: spec.restarts,
    }
    .validate()
    .map_err(usage)?;

    let result = run_sweep(&x, &y, &spec)?;
    let rows: Vec<_> = result.rows().cloned().collect();
    write_sweep_csv(&out.join("sweep.csv"), &rows)?;
    if a.figure_filter {
        write_figure_csv(&out.join("sweep_figure.csv"), &figure_filter(&rows))?;
    }
    if a.save_models {
        let dir = out.join("models");
        std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
        for cell in &result.cells {
            if let Some((fac, rep)) = &cell.model {
                let name = format!(
                    "model_r{}_lambda{}.json",
                    cell.row.r,
                    fmt_f64(cell.row.lambda)
                );
                ModelFile::new(fac, &cell.config, rep, None).save(&dir.join(name))?;
            }
        }
    }
    let failed = rows.iter().filter(|r| r.failure.is_some()).count();
    if failed > 0 {
        eprintln!(
            "warning: {failed} of {} cells failed; see the status column",
            rows.len()
        );
    }
    Ok(())
}

struct PredictInput {
    ids: Vec<String>,
    x: DenseMatrix,
    y_true: Option<Vec<f64>>,
}

fn predict_input(a: &PredictArgs, model: &ModelFile) -> Result<PredictInput> {
    if let Some(path) = &a.corpus {
        let (Some(vocab), Some(idf), Some(cfg)) = (model.vocabulary(), &model.idf, &model.tfidf)
        else {
            return Err(CliError::Usage(format!(
                "{} has no vocabulary; text input needs a model fitted with --vocab",
                a.model.display()
            )));
        };
        let corpus: RatedCorpus = io::read_corpus(path, (f64::NEG_INFINITY, f64::INFINITY))?;
        return Ok(text_input(&corpus, &vocab, cfg, idf));
    }
    let x_path = a.x.as_ref().expect("clap requires --x or --corpus");
    let (_, x) = io::read_matrix(x_path)?;
    let y_true = a.y.as_deref().map(io::read_vector).transpose()?;
    if let Some(y) = &y_true {
        if y.len() != x.rows() {
            return Err(CliError::Data(format!(
                "X has {} rows but Y has {} entries",
                x.rows(),
                y.len()
            )));
        }
    }
    Ok(PredictInput {
        ids: (1..=x.rows()).map(|i| i.to_string()).collect(),
        x,
        y_true,
    })
}

fn text_input(
    corpus: &RatedCorpus,
    vocab: &Vocabulary,
    cfg: &TfidfConfig,
    idf: &[f64],
) -> PredictInput {
    let rows: Vec<Vec<f64>> = corpus
        .entries()
        .iter()
        .map(|e| vectorize_new(&e.text, vocab, cfg, idf))
        .collect();
    let x = if rows.is_empty() {
        DenseMatrix::zeros(0, vocab.len())
    } else {
        DenseMatrix::from_rows(&rows).expect("rows share the vocabulary length")
    };
    PredictInput {
        ids: corpus.entries().iter().map(|e| e.id.clone()).collect(),
        x,
        y_true: Some(corpus.ratings()),
    }
}

fn predict(a: PredictArgs, out: &Path) -> Result<()> {
    let model = ModelFile::load(&a.model)?;
    let h = model.h_matrix()?;
    let input = predict_input(&a, &model)?;
    if input.x.cols() != h.cols() {
        return Err(CliError::Data(format!(
            "input has {} columns but the model's H is {}x{}",
            input.x.cols(),
            h.rows(),
            h.cols()
        )));
    }
    if a.edges.len() < 2
        || a.edges
            .windows(2)
            .any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
    {
        return Err(CliError::Usage(
            "--edges needs at least two increasing values".into(),
        ));
    }
    if !(a.bin_width > 0.0 && a.bin_width.is_finite()) {
        return Err(CliError::Usage("--bin-width must be positive".into()));
    }
    let predictor = Predictor::new(&h, &model.theta)?;
    let preds = predictor.predict_rows(&input.x)?;

    let mut header = vec!["id".to_string()];
    if input.y_true.is_some() {
        header.push("y_true".into());
    }
    header.push("y_hat".into());
    header.extend(numbered_header("w_", model.r));
    write_table(
        &out.join("predictions.csv"),
        &header,
        preds.iter().enumerate().map(|(i, p)| {
            let mut row = vec![input.ids[i].clone()];
            if let Some(y) = &input.y_true {
                row.push(fmt_f64(y[i]));
            }
            row.push(fmt_f64(p.y_hat));
            row.extend(p.w.iter().map(|&v| fmt_f64(v)));
            row
        }),
    )?;

    if let Some(y) = &input.y_true {
        let y_hat: Vec<f64> = preds.iter().map(|p| p.y_hat).collect();
        write_table(
            &out.join("summary.csv"),
            &["lo", "hi", "count", "mean_true", "mean_predicted"].map(String::from),
            grouped_summary(&a.edges, y, &y_hat).into_iter().map(|s| {
                [
                    fmt_f64(s.lo),
                    fmt_f64(s.hi),
                    s.count.to_string(),
                    fmt_f64(s.mean_true),
                    fmt_f64(s.mean_predicted),
                ]
            }),
        )?;
        write_table(
            &out.join("histogram.csv"),
            &["interval_lo", "interval_hi", "bin_lo", "bin_hi", "count"].map(String::from),
            prediction_histogram(&a.edges, y, &y_hat, a.bin_width)
                .into_iter()
                .map(|b| {
                    [
                        fmt_f64(b.interval_lo),
                        fmt_f64(b.interval_hi),
                        fmt_f64(b.bin_lo),
                        fmt_f64(b.bin_hi),
                        b.count.to_string(),
                    ]
                }),
        )?;
    }
    Ok(())
}

fn topics(a: TopicsArgs, out: &Path) -> Result<()> {
    let model = ModelFile::load(&a.model)?;
    let Some(vocab) = &model.vocabulary else {
        return Err(CliError::Usage(format!(
            "{} has no vocabulary; fit with --vocab to get topic terms",
            a.model.display()
        )));
    };
    if a.top_k == 0 {
        return Err(CliError::Usage("--top-k must be at least 1".into()));
    }
    if a.top_k > vocab.len() {
        eprintln!(
            "warning: --top-k {} exceeds the {} vocabulary terms; using {}",
            a.top_k,
            vocab.len(),
            vocab.len()
        );
    }
    let report = topic_report(&model.h, &model.theta, vocab, a.top_k);
    io::write_json(&out.join("topics.json"), &report)?;
    let path = out.join("topics.txt");
    std::fs::write(&path, report.render_text()).map_err(|e| CliError::io(&path, e))
}
