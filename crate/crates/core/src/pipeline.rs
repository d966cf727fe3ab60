//! Forecast orchestration, model-file parsing and report rendering.
//!
//! A forecast picks the basic generation, assigns priorities, composes the
//! improvement (hierarchical synthesis or budgeted selection) and applies
//! the chosen transitions to the basic snapshot. Everything here is a pure
//! function of the model bytes and the configuration.

use std::collections::BTreeMap;

use serde_json::json;

use crate::decimal::Decimal;
use crate::evolution::ChangeSet;
use crate::model::{
    GenerationSnapshot, LeafTransition, Level, Model, NodeId, Violation,
};
use crate::ranking::{assign_priorities, RankingError, RankingStrategy};
use crate::selection::{mckp_select, BudgetSelection, SelectionError};
use crate::synthesis::{
    synthesize_tree, Composition, SynthesisError, TreeComposition, TreeSynthesisConfig,
};

/// Which generation the forecast starts from.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BasisPolicy {
    /// The highest-index generation.
    Latest,
    /// The generation with this index.
    Index(u32),
}

/// How the forecast composition is searched for.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ForecastMethod {
    /// Hierarchical morphological synthesis over the requirement tree.
    Hmmd,
    /// Multiple-choice knapsack under a cost budget.
    Budget,
}

impl ForecastMethod {
    pub fn name(self) -> &'static str {
        match self {
            ForecastMethod::Hmmd => "hmmd",
            ForecastMethod::Budget => "budget",
        }
    }
}

/// Configuration of [`run_forecast`].
#[derive(Clone, Debug)]
pub struct ForecastConfig {
    pub method: ForecastMethod,
    pub strategy: RankingStrategy,
    /// Cost budget; required by the budget method.
    pub budget: Option<Decimal>,
    /// Cost quantization factor for the budget method.
    pub scale: u32,
    pub synthesis: TreeSynthesisConfig,
    pub basis: BasisPolicy,
}

impl ForecastConfig {
    pub fn hmmd(strategy: RankingStrategy) -> ForecastConfig {
        ForecastConfig {
            method: ForecastMethod::Hmmd,
            strategy,
            budget: None,
            scale: 10,
            synthesis: TreeSynthesisConfig::default(),
            basis: BasisPolicy::Latest,
        }
    }

    pub fn budget(budget: Decimal, scale: u32) -> ForecastConfig {
        ForecastConfig {
            method: ForecastMethod::Budget,
            strategy: RankingStrategy::ProfitDesc,
            budget: Some(budget),
            scale,
            synthesis: TreeSynthesisConfig::default(),
            basis: BasisPolicy::Latest,
        }
    }
}

/// One forecast: the selection that produced it and the resulting snapshot.
#[derive(Clone, PartialEq, Debug)]
pub struct ForecastResult {
    pub outcome: ForecastOutcome,
    pub snapshot: GenerationSnapshot,
}

#[derive(Clone, PartialEq, Debug)]
pub enum ForecastOutcome {
    Composition(TreeComposition),
    Budget(BudgetSelection),
}

/// Result of [`run_forecast`]: every Pareto-efficient forecast (hmmd) or the
/// single budget-optimal one.
#[derive(Clone, PartialEq, Debug)]
pub struct ForecastReport {
    pub basic_generation: u32,
    pub method: ForecastMethod,
    pub results: Vec<ForecastResult>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PipelineError {
    #[error("model has no generations")]
    NoGenerations,
    #[error("model has no generation {index}")]
    UnknownGeneration { index: u32 },
    #[error("stale transition for `{leaf}`: expected level {expected}, found {found}")]
    StaleTransition { leaf: NodeId, expected: Level, found: Level },
    #[error("selection references unknown alternative `{id}`")]
    UnknownAlternative { id: String },
    #[error("the budget method requires a budget")]
    MissingBudget,
    #[error("model is invalid:{}", .0.iter().map(|v| format!("\n  - {v}")).collect::<String>())]
    InvalidModel(Vec<Violation>),
    #[error(transparent)]
    Ranking(#[from] RankingError),
    #[error(transparent)]
    Synthesis(#[from] SynthesisError),
    #[error(transparent)]
    Selection(#[from] SelectionError),
}

/// Picks the generation the forecast is based on.
pub fn select_basic(
    model: &Model,
    policy: BasisPolicy,
) -> Result<&GenerationSnapshot, PipelineError> {
    match policy {
        BasisPolicy::Latest => model.latest_generation().ok_or(PipelineError::NoGenerations),
        BasisPolicy::Index(index) => model
            .generation(index)
            .ok_or(PipelineError::UnknownGeneration { index }),
    }
}

fn apply_transitions<'a>(
    base: &GenerationSnapshot,
    index: u32,
    transitions: impl IntoIterator<Item = &'a LeafTransition>,
) -> Result<GenerationSnapshot, PipelineError> {
    let mut levels = base.levels.clone();
    for t in transitions {
        let found = levels.get(&t.leaf).copied().unwrap_or(Level::ABSENT);
        if found != t.from {
            return Err(PipelineError::StaleTransition {
                leaf: t.leaf.clone(),
                expected: t.from,
                found,
            });
        }
        if t.to.is_absent() {
            levels.remove(&t.leaf);
        } else {
            levels.insert(t.leaf.clone(), t.to);
        }
    }
    Ok(GenerationSnapshot { index, levels })
}

/// Applies a composed selection to `base`: each selected alternative's
/// transition is written, "none" alternatives change nothing. A transition
/// whose from-level does not match the base is a stale-transition error.
pub fn apply_composition(
    model: &Model,
    base: &GenerationSnapshot,
    composition: &Composition,
) -> Result<GenerationSnapshot, PipelineError> {
    let mut transitions = Vec::new();
    for alt_id in composition.alternative_ids() {
        let (_, alt) = model
            .alternative(alt_id)
            .ok_or_else(|| PipelineError::UnknownAlternative { id: alt_id.to_string() })?;
        if let Some(t) = alt.action.transition() {
            transitions.push(t);
        }
    }
    apply_transitions(base, base.index + 1, transitions)
}

/// Applies the leaf-level operations of a change set to `base`. Part-level
/// operations carry no levels and apply vacuously. The resulting snapshot
/// takes the change set's target generation index.
pub fn apply_change_set(
    base: &GenerationSnapshot,
    changes: &ChangeSet,
) -> Result<GenerationSnapshot, PipelineError> {
    let transitions: Vec<LeafTransition> = changes
        .leaf_transitions()
        .into_iter()
        .map(|(leaf, from, to)| LeafTransition { leaf: leaf.clone(), from, to })
        .collect();
    apply_transitions(base, changes.to_generation, transitions.iter())
}

/// Applies a budget selection; chosen ids must name model alternatives.
pub fn apply_budget_selection(
    model: &Model,
    base: &GenerationSnapshot,
    selection: &BudgetSelection,
) -> Result<GenerationSnapshot, PipelineError> {
    let mut transitions = Vec::new();
    for id in &selection.chosen {
        let (_, alt) = model
            .alternative(&id.as_str().into())
            .ok_or_else(|| PipelineError::UnknownAlternative { id: id.clone() })?;
        if let Some(t) = alt.action.transition() {
            transitions.push(t);
        }
    }
    apply_transitions(base, base.index + 1, transitions)
}

/// Runs the full forecast: basic generation, priorities, composition search,
/// application. Deterministic for fixed inputs.
pub fn run_forecast(
    model: &Model,
    config: &ForecastConfig,
) -> Result<ForecastReport, PipelineError> {
    let violations = model.validate();
    if !violations.is_empty() {
        return Err(PipelineError::InvalidModel(violations));
    }
    let basic = select_basic(model, config.basis)?;

    let results = match config.method {
        ForecastMethod::Hmmd => {
            let mut priorities = BTreeMap::new();
            for group in &model.groups {
                priorities.extend(assign_priorities(
                    group,
                    &config.strategy,
                    model.priority_scale,
                )?);
            }
            synthesize_tree(model, &priorities, &config.synthesis)?
                .into_iter()
                .map(|tc| {
                    let snapshot = apply_composition(model, basic, &tc.composition)?;
                    Ok(ForecastResult { outcome: ForecastOutcome::Composition(tc), snapshot })
                })
                .collect::<Result<Vec<_>, PipelineError>>()?
        }
        ForecastMethod::Budget => {
            let budget = config.budget.ok_or(PipelineError::MissingBudget)?;
            let selection = mckp_select(&model.groups, budget, config.scale)?;
            let snapshot = apply_budget_selection(model, basic, &selection)?;
            vec![ForecastResult { outcome: ForecastOutcome::Budget(selection), snapshot }]
        }
    };

    Ok(ForecastReport {
        basic_generation: basic.index,
        method: config.method,
        results,
    })
}

/// Failure to turn a document into a valid model.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("invalid model:{}", violations.iter().map(|v| format!("\n  - {v}")).collect::<String>())]
    Semantic { violations: Vec<Violation> },
}

/// Parses a model document without the final validity gate. Syntax and
/// value-domain errors are still reported.
pub fn parse_model_unvalidated(text: &str) -> Result<Model, ParseError> {
    serde_json::from_str(text).map_err(|e| ParseError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Parses a model document and checks every structural invariant.
pub fn parse_model(text: &str) -> Result<Model, ParseError> {
    let model = parse_model_unvalidated(text)?;
    let violations = model.validate();
    if violations.is_empty() {
        Ok(model)
    } else {
        Err(ParseError::Semantic { violations })
    }
}

/// Renders a model back to its document form. `parse_model` of the output
/// reproduces the model exactly, and rendering is byte-stable.
pub fn render_model(model: &Model) -> String {
    let mut text = serde_json::to_string_pretty(model).expect("model serializes");
    text.push('\n');
    text
}

/// Output format of a rendered report.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ReportFormat {
    Text,
    Json,
}

/// Text-report styling. JSON output ignores it.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct RenderOptions {
    pub color: bool,
}

fn paint(text: &str, on: bool) -> String {
    if on {
        format!("\x1b[1m{text}\x1b[0m")
    } else {
        text.to_string()
    }
}

/// Renders a forecast report. Text lists each result's selection, quality
/// vectors and resulting levels in tree pre-order; JSON is machine-stable
/// with sorted keys.
pub fn render_report(
    report: &ForecastReport,
    model: &Model,
    format: ReportFormat,
    options: &RenderOptions,
) -> String {
    match format {
        ReportFormat::Text => render_text(report, model, options),
        ReportFormat::Json => render_json(report, model),
    }
}

fn render_text(report: &ForecastReport, model: &Model, options: &RenderOptions) -> String {
    let mut out = String::new();
    out.push_str(&paint(
        &format!(
            "forecast from generation {} [{}]: {} result(s)\n",
            report.basic_generation,
            report.method.name(),
            report.results.len()
        ),
        options.color,
    ));
    for (i, result) in report.results.iter().enumerate() {
        out.push('\n');
        let heading = match &result.outcome {
            ForecastOutcome::Composition(tc) => {
                format!("result {}: quality {}\n", i + 1, tc.quality)
            }
            ForecastOutcome::Budget(sel) => format!(
                "result {}: cost {}, profit {}\n",
                i + 1,
                sel.total_cost,
                sel.total_profit
            ),
        };
        out.push_str(&paint(&heading, options.color));
        match &result.outcome {
            ForecastOutcome::Composition(tc) => {
                out.push_str("  selection:\n");
                for (group, alt_id) in &tc.composition.selection {
                    out.push_str(&format!("    {group} -> {alt_id}{}\n", describe(model, alt_id)));
                }
                out.push_str("  node quality:\n");
                for node in model.tree.preorder() {
                    if let Some(quality) = tc.node_quality.get(&node.id) {
                        out.push_str(&format!("    {} {}\n", node.id, quality));
                    }
                }
            }
            ForecastOutcome::Budget(sel) => {
                out.push_str("  selection:\n");
                for id in &sel.chosen {
                    out.push_str(&format!("    {id}{}\n", describe(model, &id.as_str().into())));
                }
            }
        }
        out.push_str("  levels:");
        for leaf in model.tree.leaf_ids() {
            out.push_str(&format!(" {}={}", leaf, result.snapshot.level(leaf)));
        }
        out.push('\n');
    }
    out
}

fn describe(model: &Model, alt_id: &crate::model::AltId) -> String {
    match model.alternative(alt_id) {
        Some((_, alt)) => match alt.action.transition() {
            Some(t) => format!(" ({}: {} -> {})", t.leaf, t.from, t.to),
            None => " (none)".to_string(),
        },
        None => String::new(),
    }
}

fn render_json(report: &ForecastReport, model: &Model) -> String {
    let results: Vec<serde_json::Value> = report
        .results
        .iter()
        .map(|result| {
            let levels: BTreeMap<String, u8> = model
                .tree
                .leaf_ids()
                .into_iter()
                .map(|leaf| (leaf.to_string(), result.snapshot.level(leaf).get()))
                .collect();
            match &result.outcome {
                ForecastOutcome::Composition(tc) => json!({
                    "composition": tc.composition,
                    "quality": tc.quality,
                    "nodeQuality": tc.node_quality,
                    "levels": levels,
                }),
                ForecastOutcome::Budget(sel) => json!({
                    "chosen": sel.chosen,
                    "totalCost": sel.total_cost,
                    "totalProfit": sel.total_profit,
                    "levels": levels,
                }),
            }
        })
        .collect();
    let doc = json!({
        "basicGeneration": report.basic_generation,
        "method": report.method.name(),
        "results": results,
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
    text.push('\n');
    text
}
