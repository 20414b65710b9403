use std::path::PathBuf;
use std::process::ExitCode;

use burt_core::dialogue::DialogueConfig;
use burt_core::exec_model::ExecutionModel;
use burt_core::nlp::Lexicon;
use burt_service::replay::{load_script, replay, ReplayOptions};
use burt_service::{build_model_file, serve, ServiceConfig, ServiceError};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "burt", version, about = "Interactive bug reporting assistant")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an execution model from a directory of trace files.
    BuildModel {
        #[arg(long)]
        traces: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the HTTP service.
    Serve {
        /// JSON config file; BURT_PORT and BURT_MODELS_DIR override it.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Replay a scripted conversation and print its transcript as JSON lines.
    Replay {
        #[arg(long)]
        model: PathBuf,
        /// JSON or YAML list of user messages.
        #[arg(long)]
        script: PathBuf,
        /// Defaults to the name of the model file's directory.
        #[arg(long)]
        app_id: Option<String>,
        #[arg(long, default_value = "replay")]
        session_id: String,
        /// Write the final report (JSON and HTML) here.
        #[arg(long)]
        report_dir: Option<PathBuf>,
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
    },
}

fn run(cli: Cli) -> Result<(), ServiceError> {
    match cli.command {
        Command::BuildModel { traces, out } => {
            let model = build_model_file(&traces, &out)?;
            eprintln!(
                "wrote {}: {} screens, {} interactions",
                out.display(),
                model.screens().len(),
                model.interactions().len()
            );
            Ok(())
        }
        Command::Serve { config } => {
            let config = ServiceConfig::load(config.as_deref())?;
            let rt = tokio::runtime::Runtime::new().map_err(|e| ServiceError::Bind {
                addr: String::new(),
                message: e.to_string(),
            })?;
            rt.block_on(serve(config))
        }
        Command::Replay {
            model,
            script,
            app_id,
            session_id,
            report_dir,
            lexicon,
            threshold,
        } => {
            let loaded = ExecutionModel::load(&model).map_err(|e| ServiceError::Model {
                path: model.display().to_string(),
                message: e.to_string(),
            })?;
            let lexicon = match lexicon {
                Some(p) => Lexicon::load_extending_builtin(&p).map_err(|e| ServiceError::Lexicon(e.to_string()))?,
                None => Lexicon::builtin(),
            };
            let app_id = app_id.unwrap_or_else(|| {
                model
                    .parent()
                    .and_then(|p| p.file_name())
                    .map(|n| n.to_string_lossy().into_owned())
                    .unwrap_or_else(|| loaded.app_id().to_string())
            });
            let options = ReplayOptions {
                session_id,
                app_id,
                dialogue: DialogueConfig {
                    threshold,
                    ..DialogueConfig::default()
                },
                report_dir,
            };
            let messages = load_script(&script)?;
            let outcome = replay(&loaded, &lexicon, &options, messages)?;
            print!("{}", outcome.transcript_jsonl());
            if let Some((json, html)) = &outcome.report_files {
                eprintln!("report: {} {}", json.display(), html.display());
            }
            match outcome.error {
                Some(e) => Err(e),
                None => Ok(()),
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("burt: {e}");
            ExitCode::FAILURE
        }
    }
}
