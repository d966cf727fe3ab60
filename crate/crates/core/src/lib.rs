//! Morphological modeling and forecasting of modular requirement systems.
//!
//! The library covers the full workflow:
//!
//! 1. [`model`] — the requirement tree, per-generation satisfiability
//!    levels, prospective alternative groups and compatibility estimates,
//!    with structural validation.
//! 2. [`evolution`] — typed change operations extracted between neighbor
//!    generations and merged into a general change set.
//! 3. [`ranking`] — ordinal priorities for the alternatives of each group.
//! 4. [`synthesis`] — hierarchical morphological composition: one
//!    alternative per group, scored by quality vectors `(w; n1..nr)` and
//!    filtered to the Pareto-efficient set, bottom-up over the tree.
//! 5. [`selection`] — exact 0/1 and multiple-choice knapsack selection of
//!    change items under a cost budget.
//! 6. [`pipeline`] — forecast orchestration, the JSON model-file format and
//!    report rendering.
//!
//! [`sample::network_requirements`] builds a complete worked example.

pub mod decimal;
pub mod evolution;
pub mod model;
pub mod pipeline;
pub mod ranking;
pub mod sample;
pub mod selection;
pub mod synthesis;

pub use decimal::Decimal;
pub use model::{Model, Violation};
pub use pipeline::{parse_model, render_model, render_report, run_forecast};
