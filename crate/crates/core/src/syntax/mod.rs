//! Abstract syntax: session types, orchestrators, expressions and processes.

mod expr;
mod orch;
mod process;
mod types;
mod typing;

use thiserror::Error;

pub use expr::{eval_expr, Context, EvalError, Expression, FnSig, FunctionTable, GroundValue};
pub use orch::Orchestrator;
pub use process::{
    all_channel_names, free_channels, free_vars, fresh_name, is_user_defined, rename_channel,
    subst_channel, subst_value, ChannelRef, Process,
};
pub use types::{dual_polarity, Arms, GroundType, Label, Polarity, SessionType};
pub use typing::Typing;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("labels must be nonempty")]
    EmptyLabel,
    #[error("choice needs at least one arm")]
    EmptyArms,
    #[error("duplicate label `{0}`")]
    DuplicateLabel(Label),
}
