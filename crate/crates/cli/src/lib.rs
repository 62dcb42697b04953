//! Expression language for the `gstensor` command-line tool.

pub mod eval;
pub mod syntax;

pub use eval::{evaluate, Config, EvalError, Value};
pub use syntax::{parse, Expr, ParseError};
