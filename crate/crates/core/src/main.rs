use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand};

use lperc_core::commands::{
    compare, fold_details, headline, predict_table, render_report, run_cv, train_full,
    write_compare_csv, write_predictions_csv,
};
use lperc_core::config::{parse_list, parse_method_name, DataSource, ExperimentConfig, ReportFormat};
use lperc_core::dataset::{read_features_csv, Label, Schema};
use lperc_core::evaluation::Method;
use lperc_core::lperceptron::{ErrorMetric, Hyperparameters, LPerceptronModel};
use lperc_core::presets::{self, DEFAULT_SEED};
use lperc_core::{Error, Result};

const SEED_ENV: &str = "LPERC_SEED";

#[derive(Parser)]
#[command(name = "lperc", version, about = "L-Perceptron classifier and cross-validation harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cross-validate a method and write the evaluation report
    Cv(CvArgs),
    /// Train an L-Perceptron on a full dataset and save the model as JSON
    Train(ExperimentArgs),
    /// Label every row of a CSV file with a saved model
    Predict(PredictArgs),
    /// Measured vs published comparison table for a bundled dataset
    Compare(CompareArgs),
    /// Print the resolved experiment configuration in config-file form
    Config(ExperimentArgs),
    /// List bundled presets
    Presets,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Bundled experiment (wbcd-lp, hsd-lp, wbcd-nb, hsd-nb, wbcd-knn, hsd-knn)
    #[arg(long)]
    preset: Option<String>,
    /// key = value experiment file
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV file, or bundled:wbcd / bundled:hsd
    #[arg(long)]
    data: Option<String>,
    /// 1-based label column
    #[arg(long)]
    label_col: Option<usize>,
    /// Positive-class token in the label column
    #[arg(long)]
    positive: Option<String>,
    /// Negative-class token (default: the first other token seen)
    #[arg(long)]
    negative: Option<String>,
    /// Comma-separated 1-based columns to ignore
    #[arg(long)]
    drop_cols: Option<String>,
    /// The CSV starts with a header row
    #[arg(long)]
    header: bool,
    /// lperceptron | naive-bayes | knn
    #[arg(long)]
    method: Option<String>,
    /// Fit target for the class named by --p1-label
    #[arg(long, allow_hyphen_values = true)]
    p1: Option<f64>,
    /// Fit target for the other class
    #[arg(long, allow_hyphen_values = true)]
    p2: Option<f64>,
    /// Degree lower bound
    #[arg(long)]
    dlb: Option<usize>,
    /// Degree upper bound
    #[arg(long)]
    dub: Option<usize>,
    /// Maximum update-rule passes
    #[arg(long)]
    ite: Option<usize>,
    /// Decision threshold on the summed polynomial score
    #[arg(long, allow_hyphen_values = true)]
    threshold: Option<f64>,
    /// Class that receives p1: positive | negative
    #[arg(long)]
    p1_label: Option<String>,
    /// misclassification | sse
    #[arg(long)]
    error_metric: Option<String>,
    /// Neighbours for knn
    #[arg(long)]
    knn_k: Option<usize>,
    /// Number of folds
    #[arg(long)]
    k: Option<usize>,
    /// Fold seed (default 42, or $LPERC_SEED)
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; `-` for stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// json | csv
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct CvArgs {
    #[command(flatten)]
    experiment: ExperimentArgs,
    /// Print per-fold confusion matrices, orientations and degrees
    #[arg(long, short)]
    verbose: bool,
}

#[derive(Args)]
struct PredictArgs {
    /// Model JSON written by `train`
    #[arg(long)]
    model: PathBuf,
    /// CSV file to label
    #[arg(long)]
    data: PathBuf,
    /// 1-based label column to ignore, if the file has one
    #[arg(long)]
    label_col: Option<usize>,
    #[arg(long)]
    drop_cols: Option<String>,
    #[arg(long)]
    header: bool,
    /// Output CSV (default stdout)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// wbcd | hsd
    dataset: String,
    #[arg(long, default_value_t = presets::DEFAULT_FOLDS)]
    k: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV (default stdout)
    #[arg(long)]
    out: Option<PathBuf>,
}

fn default_seed() -> Result<u64> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("{SEED_ENV}=`{v}` is not an unsigned integer"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn parse_flag<T: std::str::FromStr<Err = Error>>(value: &Option<String>) -> Result<Option<T>> {
    value.as_deref().map(str::parse).transpose()
}

fn resolve(args: &ExperimentArgs) -> Result<ExperimentConfig> {
    let seed = default_seed()?;
    let base = match (&args.preset, &args.config) {
        (Some(_), Some(_)) => {
            return Err(Error::Config("use either --preset or --config, not both".into()))
        }
        (Some(name), None) => Some(presets::preset(name, seed)?),
        (None, Some(path)) => {
            let text = fs::read_to_string(path).map_err(|e| Error::File {
                path: path.clone(),
                source: e,
            })?;
            Some(ExperimentConfig::parse_with_default_seed(&text, seed)?)
        }
        (None, None) => None,
    };

    let data: DataSource = match (&args.data, &base) {
        (Some(d), _) => d.parse()?,
        (None, Some(b)) => b.data.clone(),
        (None, None) => {
            return Err(Error::Config(
                "no dataset given: pass --data <FILE> (or --preset / --config)".into(),
            ))
        }
    };

    let base_schema = base.as_ref().map(|b| &b.schema);
    let label_col = args
        .label_col
        .or(base_schema.map(|s| s.label_col))
        .ok_or_else(|| Error::Config("--label-col is required with --data".into()))?;
    let positive = args
        .positive
        .clone()
        .or(base_schema.map(|s| s.positive.clone()))
        .ok_or_else(|| Error::Config("--positive is required with --data".into()))?;
    let schema = Schema {
        label_col,
        positive,
        negative: args
            .negative
            .clone()
            .or(base_schema.and_then(|s| s.negative.clone())),
        drop_cols: match &args.drop_cols {
            Some(list) => parse_list(list)?,
            None => base_schema.map(|s| s.drop_cols.clone()).unwrap_or_default(),
        },
        has_header: args.header || base_schema.is_some_and(|s| s.has_header),
    };

    let base_method = base.as_ref().map(|b| &b.method);
    let method_name = match (&args.method, base_method) {
        (Some(m), _) => parse_method_name(m)?,
        (None, Some(Method::Lperceptron { .. })) | (None, None) => "lperceptron",
        (None, Some(Method::NaiveBayes)) => "naive-bayes",
        (None, Some(Method::Knn { .. })) => "knn",
    };
    let method = match method_name {
        "lperceptron" => Method::Lperceptron {
            hyperparameters: resolve_hyper(args, base_method.and_then(Method::hyperparameters))?,
        },
        "naive-bayes" => Method::NaiveBayes,
        _ => Method::Knn {
            k: args
                .knn_k
                .or(match base_method {
                    Some(Method::Knn { k }) => Some(*k),
                    _ => None,
                })
                .unwrap_or(lperc_core::baselines::DEFAULT_KNN_K),
        },
    };

    let cfg = ExperimentConfig {
        data,
        schema,
        method,
        k: args
            .k
            .or(base.as_ref().map(|b| b.k))
            .unwrap_or(presets::DEFAULT_FOLDS),
        seed: args.seed.or(base.as_ref().map(|b| b.seed)).unwrap_or(seed),
        out: args.out.clone().or(base.as_ref().and_then(|b| b.out.clone())),
        format: match parse_flag::<ReportFormat>(&args.format)? {
            Some(f) => f,
            None => base.as_ref().map(|b| b.format).unwrap_or_default(),
        },
    };
    cfg.validate()?;
    Ok(cfg)
}

fn resolve_hyper(args: &ExperimentArgs, base: Option<&Hyperparameters>) -> Result<Hyperparameters> {
    let mut missing = Vec::new();
    let mut take = |flag: &'static str, v: Option<f64>, b: Option<f64>| {
        v.or(b).unwrap_or_else(|| {
            missing.push(flag);
            0.0
        })
    };
    let p1 = take("--p1", args.p1, base.map(|h| h.p1));
    let p2 = take("--p2", args.p2, base.map(|h| h.p2));
    let threshold = take("--threshold", args.threshold, base.map(|h| h.threshold));
    let mut take_int = |flag: &'static str, v: Option<usize>, b: Option<usize>| {
        v.or(b).unwrap_or_else(|| {
            missing.push(flag);
            0
        })
    };
    let dlb = take_int("--dlb", args.dlb, base.map(|h| h.dlb));
    let dub = take_int("--dub", args.dub, base.map(|h| h.dub));
    let ite = take_int("--ite", args.ite, base.map(|h| h.ite));
    if !missing.is_empty() {
        return Err(Error::Config(format!(
            "L-Perceptron needs {} (or a --preset / --config)",
            missing.join(", ")
        )));
    }
    let mut h = Hyperparameters::new(p1, p2, dlb, dub, ite, threshold);
    h.p1_label = parse_flag::<Label>(&args.p1_label)?
        .or(base.map(|b| b.p1_label))
        .unwrap_or(Label::Positive);
    h.error_metric = parse_flag::<ErrorMetric>(&args.error_metric)?
        .or(base.map(|b| b.error_metric))
        .unwrap_or_default();
    h.validate()?;
    Ok(h)
}

fn write_output(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) if p != Path::new("-") => fs::write(p, bytes).map_err(|e| Error::File {
            path: p.to_path_buf(),
            source: e,
        }),
        _ => {
            io::stdout().write_all(bytes)?;
            Ok(())
        }
    }
}

fn cmd_cv(args: &CvArgs) -> Result<()> {
    let cfg = resolve(&args.experiment)?;
    let report = run_cv(&cfg)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let bytes = render_report(&report, cfg.format)?;
    let to_stdout = cfg.out.as_deref() == Some(Path::new("-"));
    let mut summary = headline(&report);
    if args.verbose {
        summary.push_str(&fold_details(&report));
    }
    if to_stdout {
        eprint!("{summary}");
        write_output(None, &bytes)?;
    } else {
        print!("{summary}");
        if let Some(out) = &cfg.out {
            write_output(Some(out), &bytes)?;
        }
    }
    Ok(())
}

fn cmd_train(args: &ExperimentArgs) -> Result<()> {
    let cfg = resolve(args)?;
    let model = train_full(&cfg)?;
    let mut json = model.to_json()?;
    json.push('\n');
    write_output(cfg.out.as_deref(), json.as_bytes())?;
    if cfg.out.as_deref().is_some_and(|p| p != Path::new("-")) {
        println!(
            "trained {} features, degrees {:?}, positive_above {}",
            model.degrees().len(),
            model.degrees(),
            model.positive_above()
        );
    }
    Ok(())
}

fn cmd_predict(args: &PredictArgs) -> Result<()> {
    let text = fs::read_to_string(&args.model).map_err(|e| Error::File {
        path: args.model.clone(),
        source: e,
    })?;
    let model = LPerceptronModel::from_json(&text)?;
    let drop = match &args.drop_cols {
        Some(list) => parse_list(list)?,
        None => Vec::new(),
    };
    let file = fs::File::open(&args.data).map_err(|e| Error::File {
        path: args.data.clone(),
        source: e,
    })?;
    let table = read_features_csv(file, args.label_col, &drop, args.header)?;
    let predictions = predict_table(&model, &table)?;
    let mut buf = Vec::new();
    write_predictions_csv(&predictions, &mut buf)?;
    write_output(args.out.as_deref(), &buf)
}

fn cmd_compare(args: &CompareArgs) -> Result<()> {
    let seed = match args.seed {
        Some(s) => s,
        None => default_seed()?,
    };
    let rows = compare(&args.dataset, args.k, seed)?;
    let mut buf = Vec::new();
    write_compare_csv(&rows, &mut buf)?;
    write_output(args.out.as_deref(), &buf)
}

fn cmd_config(args: &ExperimentArgs) -> Result<()> {
    let cfg = resolve(args)?;
    print!("{}", cfg.to_text());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Cv(a) => cmd_cv(a),
        Command::Train(a) => cmd_train(a),
        Command::Predict(a) => cmd_predict(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Config(a) => cmd_config(a),
        Command::Presets => {
            for name in presets::PRESET_NAMES {
                println!("{name}");
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, Error::Config(_)) {
                let mut cmd = Cli::command();
                eprintln!("\n{}", cmd.render_usage());
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
