use std::collections::BTreeSet;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use codeocr::eval::{
    emit_report, estimate_cost, import_labels, load_labels, load_manifest, record_fixtures, run_evaluation, CharCounts,
    CostModel, EvalOptions, TaxonomyTable,
};
use codeocr::ocr::{ProviderConfig, RemoteProvider};
use codeocr::pipeline::{Pipeline, PipelineConfig};
use codeocr_service::Settings;

type Error = Box<dyn std::error::Error + Send + Sync>;

#[derive(Parser)]
#[command(name = "codeocr", version, about = "Handwritten Python code recognition")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluation harness.
    #[command(subcommand)]
    Eval(EvalCommand),
    /// OCR fixture tools.
    #[command(subcommand)]
    Fixtures(FixturesCommand),
    /// Run the HTTP service. Flags override CODEOCR_* environment variables.
    Serve(ServeArgs),
}

#[derive(Subcommand)]
enum EvalCommand {
    /// Score pipelines on a manifest; writes a JSON report and a text table.
    Run(RunArgs),
    /// Per-image cost estimate from character counts.
    Cost(CostArgs),
    /// Labels operations.
    #[command(subcommand)]
    Labels(LabelsCommand),
}

#[derive(Subcommand)]
enum LabelsCommand {
    /// Validate a hallucination label file and print the taxonomy table.
    Import {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        manifest: PathBuf,
        /// Also write the table as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Config file; repeatable.
    #[arg(long = "config")]
    configs: Vec<PathBuf>,
    /// Every *.json config in a directory.
    #[arg(long)]
    config_dir: Option<PathBuf>,
    /// Report path; the text table goes next to it with a .txt extension.
    #[arg(long)]
    out: PathBuf,
    /// Imported labels override the logical-fix screen for matching runs.
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Skip entries marked as training data.
    #[arg(long)]
    heldout_only: bool,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct CostArgs {
    #[arg(long)]
    model_file: PathBuf,
    #[arg(long, default_value_t = 0.0)]
    code_chars: f64,
    #[arg(long)]
    instruction_chars: f64,
    #[arg(long)]
    output_chars: f64,
    #[arg(long)]
    multimodal: bool,
}

#[derive(Subcommand)]
enum FixturesCommand {
    /// Run a live provider over a manifest and store its replies as fixtures.
    Record {
        /// Provider config JSON.
        #[arg(long)]
        provider: PathBuf,
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long)]
    listen: Option<SocketAddr>,
    #[arg(long)]
    data_dir: Option<PathBuf>,
    #[arg(long)]
    config_dir: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Eval(EvalCommand::Run(args)) => eval_run(args),
        Command::Eval(EvalCommand::Cost(args)) => eval_cost(args),
        Command::Eval(EvalCommand::Labels(LabelsCommand::Import { file, manifest, out })) => {
            labels_import(&file, &manifest, out.as_deref())
        }
        Command::Fixtures(FixturesCommand::Record { provider, manifest, out }) => {
            fixtures_record(&provider, &manifest, &out)
        }
        Command::Serve(args) => serve(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn labels_table(file: &Path, manifest: &Path) -> Result<TaxonomyTable, Error> {
    let known: BTreeSet<String> = load_manifest(manifest)?.into_iter().map(|e| e.program_id).collect();
    Ok(import_labels(load_labels(file)?, &known)?)
}

fn eval_run(args: RunArgs) -> Result<ExitCode, Error> {
    let entries = load_manifest(&args.manifest)?;
    let mut configs = args.configs.iter().map(|p| PipelineConfig::load(p)).collect::<Result<Vec<_>, _>>()?;
    if let Some(dir) = &args.config_dir {
        configs.extend(PipelineConfig::load_dir(dir)?);
    }
    if configs.is_empty() {
        return Err("no configs given; use --config or --config-dir".into());
    }
    let table = args.labels.as_deref().map(|l| labels_table(l, &args.manifest)).transpose()?;
    let options = EvalOptions { workers: args.workers, heldout_only: args.heldout_only };

    let mut rows = vec![];
    for config in configs {
        let id = config.config_id.clone();
        let pipeline = Pipeline::from_config(config)?;
        let mut row = run_evaluation(&pipeline, &entries, &options)?;
        if let Some(t) = &table {
            row.apply_labels(t);
        }
        log::info!("{id}: {} attempted, {} failed", row.attempted, row.failures.len());
        rows.push(row);
    }
    let report = emit_report(&rows)?;
    let text = report.render_text();
    std::fs::write(&args.out, report.to_json())?;
    std::fs::write(args.out.with_extension("txt"), &text)?;
    print!("{text}");
    Ok(if report.has_failures() { ExitCode::from(2) } else { ExitCode::SUCCESS })
}

fn eval_cost(args: CostArgs) -> Result<ExitCode, Error> {
    let model = CostModel::load(&args.model_file)?;
    let counts = CharCounts {
        code_chars: args.code_chars,
        instruction_chars: args.instruction_chars,
        output_chars: args.output_chars,
    };
    let estimate = estimate_cost(&model, counts, args.multimodal)?;
    println!("{}", serde_json::to_string_pretty(&estimate)?);
    Ok(ExitCode::SUCCESS)
}

fn labels_import(file: &Path, manifest: &Path, out: Option<&Path>) -> Result<ExitCode, Error> {
    let table = labels_table(file, manifest)?;
    print!("{}", table.render_text());
    if let Some(out) = out {
        let mut json = serde_json::to_string_pretty(&table)?;
        json.push('\n');
        std::fs::write(out, json)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn fixtures_record(provider: &Path, manifest: &Path, out: &Path) -> Result<ExitCode, Error> {
    let config: ProviderConfig = serde_json::from_str(&std::fs::read_to_string(provider)?)?;
    let provider = RemoteProvider::new(config)?;
    let summary = record_fixtures(&provider, &load_manifest(manifest)?, out)?;
    println!("wrote {} fixture(s) to {}", summary.written.len(), out.display());
    for f in &summary.failures {
        eprintln!("{}: {}", f.program_id, f.error);
    }
    Ok(if summary.failures.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn serve(args: ServeArgs) -> Result<ExitCode, Error> {
    let mut settings = Settings::from_env()?;
    if let Some(l) = args.listen {
        settings.listen = l;
    }
    if let Some(d) = args.data_dir {
        settings.data_dir = d;
    }
    if let Some(d) = args.config_dir {
        settings.config_dir = d;
    }
    tokio::runtime::Runtime::new()?.block_on(codeocr_service::serve(settings))?;
    Ok(ExitCode::SUCCESS)
}
