use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use conformon::io_cli::{self, Mode};
use conformon::Error;

#[derive(Parser, Debug)]
#[command(
    name = "conformon",
    about = "Rod soliton conformations and electron transport in the curvature-induced potential",
    disable_version_flag = true
)]
struct Cli {
    /// Experiment to run.
    #[arg(value_enum, required_unless_present = "version")]
    mode: Option<Mode>,

    /// Flat TOML config file.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output directory (overrides `output_dir` in the config).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Run the built-in demonstration config for this mode and save it as `config.toml`.
    #[arg(long, conflicts_with = "config")]
    seed_demo: bool,

    /// Print the version and the numeric-defaults table.
    #[arg(long)]
    version: bool,
}

fn execute(cli: &Cli, mode: Mode) -> Result<(PathBuf, io_cli::RunOutcome), (Option<PathBuf>, Error)> {
    let text = match (&cli.config, cli.seed_demo) {
        (Some(path), _) => std::fs::read_to_string(path).map_err(|source| {
            (
                cli.out.clone(),
                Error::Io {
                    path: path.display().to_string(),
                    source,
                },
            )
        })?,
        (None, true) => io_cli::demo_config(mode).to_string(),
        (None, false) => {
            return Err((
                cli.out.clone(),
                Error::Config("either --config <file> or --seed-demo is required".into()),
            ))
        }
    };
    let config = io_cli::parse_config_for(&text, mode).map_err(|e| (cli.out.clone(), e))?;
    let out = cli
        .out
        .clone()
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("conformon-out").join(mode.name()));
    if cli.seed_demo {
        std::fs::create_dir_all(&out)
            .and_then(|_| std::fs::write(out.join("config.toml"), &text))
            .map_err(|source| {
                (
                    Some(out.clone()),
                    Error::Io {
                        path: out.display().to_string(),
                        source,
                    },
                )
            })?;
    }
    let outcome = io_cli::run(&config, &out).map_err(|e| (Some(out.clone()), e))?;
    Ok((out, outcome))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if cli.version {
        print!("{}", io_cli::defaults_table());
        return ExitCode::SUCCESS;
    }
    let Some(mode) = cli.mode else {
        return ExitCode::FAILURE;
    };
    match execute(&cli, mode) {
        Ok((out, outcome)) => {
            println!(
                "{}",
                serde_json::json!({
                    "status": "ok",
                    "mode": mode,
                    "out_dir": out,
                    "files": outcome.files,
                })
            );
            ExitCode::SUCCESS
        }
        Err((out, err)) => {
            eprintln!("{}", io_cli::error_record(&err));
            if let Some(dir) = out {
                let _ = io_cli::write_error_record(&dir, &err);
            }
            ExitCode::FAILURE
        }
    }
}
