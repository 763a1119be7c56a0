//! Exception summaries: where each exception is thrown, with which message,
//! and under which precondition on the API's parameters.

mod constraints;
mod expr;
mod interproc;
mod message;
mod precondition;
mod report;

pub use constraints::{
    conjunction, extract_constraints, locate_throws, raw_clause, refine_constraint, CondStep,
    PathConstraint, Refiner, SiteConstraints, ThrowSite,
};
pub use expr::{normalize_literal, parse_expr, Callee, Expr, Normalized};
pub use interproc::{extract_summaries, propagate_interprocedural, Propagation};
pub use message::{message_regex, reconstruct_message};
pub use precondition::{negate_precondition, Clause, Literal, Precondition};
pub use report::{
    flags, ApiSummaries, ExceptionSummary, ExtractOptions, Limits, Mode, Origin, SummaryReport,
};
