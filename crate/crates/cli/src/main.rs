//! `morpho` — morphological modeling and forecasting of requirement systems
//! from the command line.
//!
//! Every subcommand reads a JSON model file (`--model`), writes its report to
//! standard output and errors to standard error. Exit codes: 0 on success,
//! 1 on validation or configuration errors, 2 on parse errors.

mod render;

use std::io::IsTerminal;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

use morpho_core::decimal::Decimal;
use morpho_core::model::{Compatibility, Model};
use morpho_core::pipeline::{
    self, parse_model, parse_model_unvalidated, render_report, run_forecast, BasisPolicy,
    ForecastConfig, ForecastMethod, ParseError, RenderOptions, ReportFormat,
};
use morpho_core::ranking::{assign_priorities, RankingStrategy};
use morpho_core::selection::mckp_select;
use morpho_core::synthesis::{synthesize_tree, TreeSynthesisConfig};

#[derive(Debug, Parser)]
#[command(name = "morpho", version, about = "Morphological requirement-system forecasting")]
struct Cli {
    /// Path to the model file (JSON).
    #[arg(long, global = true)]
    model: Option<PathBuf>,

    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the model's structural invariants.
    Validate,
    /// Detect change operations between two generations.
    Diff {
        /// Index of the earlier generation.
        #[arg(long)]
        from: u32,
        /// Index of the later generation.
        #[arg(long)]
        to: u32,
    },
    /// Assign priorities to every group's alternatives.
    Rank {
        #[arg(long, value_enum, default_value_t = StrategyArg::ProfitDesc)]
        strategy: StrategyArg,
    },
    /// Compose the Pareto-efficient improvements over the requirement tree.
    Synth {
        /// Compatibility assumed between composed subtree candidates.
        #[arg(long = "default-compat", default_value_t = 3)]
        default_compat: u8,
        #[arg(long, value_enum, default_value_t = StrategyArg::Explicit)]
        strategy: StrategyArg,
    },
    /// Pick one alternative per group under a cost budget.
    Select {
        #[arg(long, value_parser = parse_decimal)]
        budget: Decimal,
        /// Cost quantization factor.
        #[arg(long, default_value_t = 10)]
        scale: u32,
    },
    /// Run the full forecast and apply it to the basic generation.
    Forecast {
        #[arg(long, value_enum)]
        method: MethodArg,
        #[arg(long, value_parser = parse_decimal)]
        budget: Option<Decimal>,
        #[arg(long, default_value_t = 10)]
        scale: u32,
        #[arg(long = "default-compat", default_value_t = 3)]
        default_compat: u8,
        #[arg(long, value_enum, default_value_t = StrategyArg::Explicit)]
        strategy: StrategyArg,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    /// Rank by descending profit; "none" alternatives get the worst priority.
    ProfitDesc,
    /// Rank by Pareto layer of (cost, profit).
    ParetoLayer,
    /// Use the priorities stored in the model file.
    Explicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Hmmd,
    Budget,
}

fn parse_decimal(raw: &str) -> Result<Decimal, String> {
    raw.parse().map_err(|e: morpho_core::decimal::DecimalError| e.to_string())
}

/// A failure mapped onto the documented exit codes.
struct Failure {
    message: String,
    code: u8,
}

impl Failure {
    fn config(message: impl Into<String>) -> Failure {
        Failure { message: message.into(), code: 1 }
    }
}

impl From<ParseError> for Failure {
    fn from(err: ParseError) -> Failure {
        let code = match err {
            ParseError::Syntax { .. } => 2,
            ParseError::Semantic { .. } => 1,
        };
        Failure { message: err.to_string(), code }
    }
}

impl From<pipeline::PipelineError> for Failure {
    fn from(err: pipeline::PipelineError) -> Failure {
        Failure::config(err.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{err}");
            return ExitCode::SUCCESS;
        }
        Err(err) => {
            eprint!("{err}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(output) => {
            print!("{output}");
            ExitCode::SUCCESS
        }
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn load_model(cli: &Cli) -> Result<Model, Failure> {
    let path = cli.model.as_ref().ok_or_else(|| Failure::config("--model PATH is required"))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::config(format!("cannot read {}: {e}", path.display())))?;
    Ok(parse_model(&text)?)
}

fn strategy_for(model: &Model, arg: StrategyArg) -> RankingStrategy {
    match arg {
        StrategyArg::ProfitDesc => RankingStrategy::ProfitDesc,
        StrategyArg::ParetoLayer => RankingStrategy::ParetoLayer,
        StrategyArg::Explicit => RankingStrategy::Explicit(model.stored_priorities()),
    }
}

fn color_enabled() -> bool {
    std::env::var("MORPHO_COLOR").map(|v| v != "never").unwrap_or(true)
        && std::io::stdout().is_terminal()
}

fn run(cli: Cli) -> Result<String, Failure> {
    let json = cli.format == Format::Json;
    match &cli.command {
        Command::Validate => {
            let path =
                cli.model.as_ref().ok_or_else(|| Failure::config("--model PATH is required"))?;
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::config(format!("cannot read {}: {e}", path.display())))?;
            let model = parse_model_unvalidated(&text)?;
            let violations = model.validate();
            let output = render::validation(&violations, json);
            if violations.is_empty() {
                Ok(output)
            } else {
                print!("{output}");
                Err(Failure::config(format!("{} violation(s) found", violations.len())))
            }
        }
        Command::Diff { from, to } => {
            let model = load_model(&cli)?;
            let prev = model
                .generation(*from)
                .ok_or_else(|| Failure::config(format!("model has no generation {from}")))?;
            let next = model
                .generation(*to)
                .ok_or_else(|| Failure::config(format!("model has no generation {to}")))?;
            let changes = morpho_core::evolution::diff_generations(prev, next, &model)
                .map_err(|e| Failure::config(e.to_string()))?;
            Ok(render::change_set(&changes, json))
        }
        Command::Rank { strategy } => {
            let model = load_model(&cli)?;
            let strategy = strategy_for(&model, *strategy);
            let mut rankings = Vec::new();
            for group in &model.groups {
                let assigned = assign_priorities(group, &strategy, model.priority_scale)
                    .map_err(|e| Failure::config(e.to_string()))?;
                rankings.push((group.id.clone(), assigned));
            }
            Ok(render::rankings(&rankings, json))
        }
        Command::Synth { default_compat, strategy } => {
            let model = load_model(&cli)?;
            let strategy = strategy_for(&model, *strategy);
            let mut priorities = std::collections::BTreeMap::new();
            for group in &model.groups {
                priorities.extend(
                    assign_priorities(group, &strategy, model.priority_scale)
                        .map_err(|e| Failure::config(e.to_string()))?,
                );
            }
            let config = TreeSynthesisConfig { child_compat: compat_arg(*default_compat)? };
            let result = synthesize_tree(&model, &priorities, &config)
                .map_err(|e| Failure::config(e.to_string()))?;
            Ok(render::compositions(&result, &model, json))
        }
        Command::Select { budget, scale } => {
            let model = load_model(&cli)?;
            let selection = mckp_select(&model.groups, *budget, *scale)
                .map_err(|e| Failure::config(e.to_string()))?;
            Ok(render::selection(&selection, json))
        }
        Command::Forecast { method, budget, scale, default_compat, strategy } => {
            let model = load_model(&cli)?;
            let config = ForecastConfig {
                method: match method {
                    MethodArg::Hmmd => ForecastMethod::Hmmd,
                    MethodArg::Budget => ForecastMethod::Budget,
                },
                strategy: strategy_for(&model, *strategy),
                budget: *budget,
                scale: *scale,
                synthesis: TreeSynthesisConfig { child_compat: compat_arg(*default_compat)? },
                basis: BasisPolicy::Latest,
            };
            let report = run_forecast(&model, &config)?;
            let format = if json { ReportFormat::Json } else { ReportFormat::Text };
            let options = RenderOptions { color: !json && color_enabled() };
            Ok(render_report(&report, &model, format, &options))
        }
    }
}

fn compat_arg(value: u8) -> Result<Compatibility, Failure> {
    Compatibility::new(value).map_err(|e| Failure::config(e.to_string()))
}
