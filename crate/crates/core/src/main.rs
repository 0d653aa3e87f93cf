//! `catenc`: inspect datasets, encode categorical variables, benchmark
//! encoder x classifier cells, run the full sweep, and re-rank its records.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use catenc::baselines::{fit_baseline, fit_transform_baseline, BaselineScheme};
use catenc::classifiers::{ClassifierConfig, ClassifierKind};
use catenc::dataset::{balance_report, unseen_categories, Dataset, Role};
use catenc::encoder::ThresholdPcaEncoder;
use catenc::grid::{
    evaluate_cell, leaderboard, leaderboard_csv, run_grid, write_outputs, GridSpec, SortMetric,
    PROPOSED_LABEL,
};
use catenc::metrics::EvalRecord;
use catenc::numfmt::fmt_f64;
use catenc::{Error, Result};

#[derive(Parser)]
#[command(
    name = "catenc",
    version,
    about = "Supervised category encoding and benchmarking for NSL-KDD style data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Summarize datasets: row counts, class balance, per-variable
    /// cardinalities, and categories unseen in training.
    Inspect {
        /// Training split (41-feature flat file with label and score).
        #[arg(long)]
        train: PathBuf,
        /// Optional test split; adds its summary and the unseen-category sets.
        #[arg(long)]
        test: Option<PathBuf>,
    },
    /// Fit an encoder on the training split and write another file's encoded
    /// matrix as CSV, with the fitted encoder as JSON next to it.
    Encode {
        #[arg(long)]
        train: PathBuf,
        /// File to encode with the fitted encoder (may equal --train).
        #[arg(long)]
        input: PathBuf,
        /// Output CSV path; the encoder lands at the same path with the
        /// extension replaced by `encoder.json`.
        #[arg(long)]
        out: PathBuf,
        /// `threshold_pca` or a baseline scheme label (e.g. `one_hot`).
        #[arg(long, default_value = "threshold_pca")]
        scheme: String,
        /// Probability threshold in percent, (0, 50]; divided by 100
        /// internally. Only used by threshold_pca.
        #[arg(long, default_value_t = 1.87)]
        threshold: f64,
        /// Principal components to keep. Only used by threshold_pca.
        #[arg(long, default_value_t = 3)]
        components: usize,
        /// Digit base for the base_n scheme.
        #[arg(long, default_value_t = 2)]
        base: u32,
        /// Bucket count for the hashing scheme.
        #[arg(long, default_value_t = 8)]
        buckets: usize,
    },
    /// Train and score one encoder x classifier cell and print its metrics.
    Bench {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        test: PathBuf,
        /// `threshold_pca` or a baseline scheme label.
        #[arg(long, default_value = "threshold_pca")]
        scheme: String,
        /// Probability threshold in percent, (0, 50]; divided by 100
        /// internally. Only used by threshold_pca.
        #[arg(long, default_value_t = 1.87)]
        threshold: f64,
        /// Principal components to keep. Only used by threshold_pca.
        #[arg(long, default_value_t = 3)]
        components: usize,
        /// Digit base for the base_n scheme.
        #[arg(long, default_value_t = 2)]
        base: u32,
        /// Bucket count for the hashing scheme.
        #[arg(long, default_value_t = 8)]
        buckets: usize,
        /// Classifier label (e.g. linear_svm, logistic_regression).
        #[arg(long, default_value = "linear_svm")]
        classifier: String,
        /// Seed for classifier randomness and subsampling.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Stratified subsample fraction in (0, 1], applied to both splits.
        #[arg(long)]
        subsample: Option<f64>,
    },
    /// Run the benchmark sweep described by a TOML config and write all
    /// report files into a directory.
    Grid {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (created if missing).
        #[arg(long)]
        out: PathBuf,
        /// Override the config's leaderboard metric (e.g. test_accuracy).
        #[arg(long)]
        sort: Option<String>,
    },
    /// Re-rank an existing records.csv into a leaderboard.
    Report {
        /// A records.csv produced by `grid`.
        #[arg(long)]
        records: PathBuf,
        /// Leaderboard metric.
        #[arg(long, default_value = "harmonic_accuracy")]
        sort: String,
        /// Leaderboard CSV destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("catenc: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

/// Usage and configuration mistakes exit 2; runtime failures exit 1.
fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Config(_)
        | Error::UnknownScheme(_)
        | Error::UnknownClassifier(_)
        | Error::InvalidParam(_)
        | Error::ThresholdOutOfRange(_) => 2,
        _ => 1,
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Inspect { train, test } => cmd_inspect(&train, test.as_deref()),
        Command::Encode {
            train,
            input,
            out,
            scheme,
            threshold,
            components,
            base,
            buckets,
        } => cmd_encode(
            &train,
            &input,
            &out,
            &parse_scheme(&scheme, threshold, components, base, buckets)?,
        ),
        Command::Bench {
            train,
            test,
            scheme,
            threshold,
            components,
            base,
            buckets,
            classifier,
            seed,
            subsample,
        } => cmd_bench(
            &train,
            &test,
            &parse_scheme(&scheme, threshold, components, base, buckets)?,
            &classifier,
            seed,
            subsample,
        ),
        Command::Grid { config, out, sort } => cmd_grid(&config, &out, sort.as_deref()),
        Command::Report { records, sort, out } => cmd_report(&records, &sort, out.as_deref()),
    }
}

/// The encoder a verb should use: the threshold/PCA pipeline with its two
/// hyperparameters, or a parameterized baseline scheme.
enum SchemeChoice {
    Proposed { threshold_percent: f64, k: usize },
    Baseline(BaselineScheme),
}

fn parse_scheme(
    label: &str,
    threshold_percent: f64,
    components: usize,
    base: u32,
    buckets: usize,
) -> Result<SchemeChoice> {
    if label == PROPOSED_LABEL {
        if !(threshold_percent > 0.0 && threshold_percent <= 50.0) {
            return Err(Error::InvalidParam(format!(
                "threshold: {threshold_percent} outside (0, 50] percent"
            )));
        }
        if components == 0 {
            return Err(Error::InvalidParam(
                "components: at least one principal component required".into(),
            ));
        }
        return Ok(SchemeChoice::Proposed {
            threshold_percent,
            k: components,
        });
    }
    let mut scheme = BaselineScheme::parse(label)?;
    match &mut scheme {
        BaselineScheme::BaseN { base: b } => *b = base,
        BaselineScheme::Hashing { n_buckets } => *n_buckets = buckets,
        _ => {}
    }
    scheme.validate()?;
    Ok(SchemeChoice::Baseline(scheme))
}

fn describe(choice: &SchemeChoice) -> String {
    match choice {
        SchemeChoice::Proposed {
            threshold_percent,
            k,
        } => format!("{PROPOSED_LABEL} (threshold {threshold_percent}%, K={k})"),
        SchemeChoice::Baseline(s) => s.label().to_string(),
    }
}

fn summarize_split(ds: &Dataset, path: &Path) -> Result<String> {
    let report = balance_report(ds)?;
    let mut out = format!(
        "dataset: {}\nrows: {}\nattack: {:.2}%\nnormal: {:.2}%\nvariables:\n",
        path.display(),
        report.n_rows,
        100.0 * report.frac_attack,
        100.0 * report.frac_normal,
    );
    for (name, card) in &report.cardinalities {
        out.push_str(&format!("  {name}: {card} categories\n"));
    }
    Ok(out)
}

fn cmd_inspect(train_path: &Path, test_path: Option<&Path>) -> Result<()> {
    let train = Dataset::parse_nslkdd(train_path, Role::Train)?;
    print!("{}", summarize_split(&train, train_path)?);
    let Some(test_path) = test_path else {
        return Ok(());
    };
    let test = Dataset::parse_nslkdd(test_path, Role::Test)?;
    print!("\n{}", summarize_split(&test, test_path)?);
    println!("\nunseen in test:");
    let names: Vec<String> = train
        .schema()
        .categorical()
        .map(|c| c.name.clone())
        .collect();
    for name in names {
        let unseen = unseen_categories(&train, &test, &name)?;
        if unseen.is_empty() {
            println!("  {name}: 0");
        } else {
            let list: Vec<&str> = unseen.iter().map(String::as_str).collect();
            println!("  {name}: {} ({})", unseen.len(), list.join(", "));
        }
    }
    Ok(())
}

/// Comment line carried by every generated file: tool version plus the seed
/// the run resolved to.
fn version_comment(seed: u64) -> String {
    format!("# catenc {} seed={seed}\n", env!("CARGO_PKG_VERSION"))
}

fn write_file(path: &Path, body: &str) -> Result<()> {
    std::fs::write(path, body).map_err(|e| Error::io(path.display().to_string(), e))
}

fn matrix_csv(names: &[String], matrix: &ndarray::Array2<f64>) -> String {
    let mut out = names.join(",");
    out.push('\n');
    for row in matrix.rows() {
        let cells: Vec<String> = row.iter().map(|v| fmt_f64(*v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn cmd_encode(train_path: &Path, input_path: &Path, out: &Path, choice: &SchemeChoice) -> Result<()> {
    let train = Dataset::parse_nslkdd(train_path, Role::Train)?;
    let input = Dataset::parse_nslkdd(input_path, Role::Test)?;
    let (names, matrix, encoder_json) = match choice {
        SchemeChoice::Proposed {
            threshold_percent,
            k,
        } => {
            let enc = ThresholdPcaEncoder::fit(&train, threshold_percent / 100.0, *k)?;
            (enc.column_names(), enc.transform(&input)?, enc.to_json()?)
        }
        SchemeChoice::Baseline(scheme) => {
            let enc = fit_baseline(&train, *scheme)?;
            (enc.column_names(), enc.transform(&input)?, enc.to_json()?)
        }
    };
    write_file(out, &format!("{}{}", version_comment(0), matrix_csv(&names, &matrix)))?;
    let sidecar = out.with_extension("encoder.json");
    write_file(&sidecar, &encoder_json)?;
    println!(
        "encoded {} rows x {} columns with {} -> {}",
        matrix.nrows(),
        matrix.ncols(),
        describe(choice),
        out.display()
    );
    println!("encoder -> {}", sidecar.display());
    Ok(())
}

fn cmd_bench(
    train_path: &Path,
    test_path: &Path,
    choice: &SchemeChoice,
    classifier: &str,
    seed: u64,
    subsample: Option<f64>,
) -> Result<()> {
    let kind = ClassifierKind::parse(classifier)?;
    if let Some(f) = subsample {
        if !(f > 0.0 && f <= 1.0) {
            return Err(Error::InvalidParam(format!(
                "subsample: {f} outside (0, 1]"
            )));
        }
    }
    let mut train = Dataset::parse_nslkdd(train_path, Role::Train)?;
    let mut test = Dataset::parse_nslkdd(test_path, Role::Test)?;
    if let Some(f) = subsample {
        train = train.subsample_stratified(f, seed)?;
        test = test.subsample_stratified(f, seed.wrapping_add(1))?;
    }
    let mut config = ClassifierConfig::new(kind);
    config.seed = seed;
    let (encoder_label, threshold_percent, k, x_train, x_test) = match choice {
        SchemeChoice::Proposed {
            threshold_percent,
            k,
        } => {
            let enc = ThresholdPcaEncoder::fit(&train, threshold_percent / 100.0, *k)?;
            (
                PROPOSED_LABEL,
                Some(*threshold_percent),
                Some(*k),
                enc.transform(&train)?,
                enc.transform(&test)?,
            )
        }
        SchemeChoice::Baseline(scheme) => {
            let (enc, x_train) = fit_transform_baseline(&train, *scheme)?;
            (scheme.label(), None, None, x_train, enc.transform(&test)?)
        }
    };
    let record = evaluate_cell(
        encoder_label,
        &config,
        threshold_percent,
        k,
        x_train.view(),
        train.target(),
        x_test.view(),
        test.target(),
    )?;
    println!("encoder: {}", describe(choice));
    println!("classifier: {} (seed {seed})", kind.label());
    println!("train_accuracy: {:.4}", record.train_accuracy);
    println!("test_accuracy: {:.4}", record.test_accuracy);
    println!("train_auc: {:.6}", record.train_auc);
    println!("test_auc: {:.6}", record.test_auc);
    println!("mse_accuracy: {:.4}", record.mse_accuracy);
    println!("mse_auc: {:.6}", record.mse_auc);
    println!("harmonic_accuracy: {:.4}", record.harmonic_accuracy);
    println!("harmonic_auc: {:.6}", record.harmonic_auc);
    println!();
    println!("{}", EvalRecord::CSV_HEADER);
    println!("{}", record.to_csv_row());
    Ok(())
}

fn cmd_grid(config_path: &Path, out_dir: &Path, sort: Option<&str>) -> Result<()> {
    let mut spec = GridSpec::from_toml_path(config_path)?;
    if let Some(label) = sort {
        spec.sort_metric = SortMetric::parse(label)?;
    }
    let result = run_grid(&spec)?;
    let written = write_outputs(out_dir, &spec, &result)?;
    for path in &written {
        if path.file_name().is_some_and(|n| n == "summary.txt") {
            let body =
                std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
            print!("{body}");
        }
    }
    println!("\nwrote {} files to {}", written.len(), out_dir.display());
    Ok(())
}

fn cmd_report(records_path: &Path, sort: &str, out: Option<&Path>) -> Result<()> {
    let sort = SortMetric::parse(sort)?;
    let text = std::fs::read_to_string(records_path)
        .map_err(|e| Error::io(records_path.display().to_string(), e))?;
    let mut seed = 0u64;
    let mut records = Vec::new();
    let mut saw_header = false;
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix('#') {
            if let Some(s) = rest.split("seed=").nth(1) {
                if let Ok(v) = s.trim().parse() {
                    seed = v;
                }
            }
            continue;
        }
        if !saw_header {
            if line != EvalRecord::CSV_HEADER {
                return Err(Error::Config(format!(
                    "records: expected header '{}', found '{line}'",
                    EvalRecord::CSV_HEADER
                )));
            }
            saw_header = true;
            continue;
        }
        records.push(EvalRecord::parse_csv_row(line)?);
    }
    let rows = leaderboard(&records, sort)?;
    let body = format!("{}{}", version_comment(seed), leaderboard_csv(&rows));
    match out {
        Some(path) => {
            write_file(path, &body)?;
            println!(
                "ranked {} records by {} -> {}",
                records.len(),
                sort.label(),
                path.display()
            );
        }
        None => print!("{body}"),
    }
    Ok(())
}
