//! First-order logic over words: syntax, evaluation and the two-sort analysis.

pub mod eval;
pub mod formula;
pub mod sort;

pub use eval::{eval_formula, miniscope, Assignment, CompiledFormula, Evaluator};
pub use formula::{Formula, FreshNames, Var};
pub use sort::{check_sortable, SortFailure, SortMap, SortOutcome};
