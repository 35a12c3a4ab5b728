//! First-order formulas: syntax tree, surface parser, canonical printer and
//! normalization.

mod ast;
mod normalize;
mod parse;
mod print;
mod signature;

pub use ast::{Connective, Formula, Term};
pub use normalize::{fold_name, normalize, normalize_all, NameMap};
pub use parse::parse_formula;
pub use print::print_formula;
pub use signature::{signature_of, Signature};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FolError {
    #[error("syntax error at offset {offset}: expected {}, found {found}", expected.join(" or "))]
    Syntax {
        offset: usize,
        expected: Vec<String>,
        found: String,
    },
    #[error("variable `{name}` at offset {offset} is not bound by any quantifier")]
    FreeVariable { name: String, offset: usize },
    #[error("predicate `{predicate}` used with {found} argument(s) but earlier with {expected}")]
    ArityMismatch {
        predicate: String,
        expected: usize,
        found: usize,
    },
    #[error("names `{first}` and `{second}` both fold to `{target}`")]
    NameCollision {
        first: String,
        second: String,
        target: String,
    },
}
