//! Source model and refactoring operators for contamination-resistant code
//! evaluation.
//!
//! Units of code (methods, classes, files) are parsed with tree-sitter,
//! rendered back losslessly, and rewritten by semantics-preserving operators
//! that change their surface form.

pub mod error;
pub mod idents;
pub mod lexicon;
pub mod ops;
pub mod rewrite;
pub mod syntax;
pub mod units;

pub use error::{Error, Result};
pub use idents::{collect_identifiers, BindingKind, IdentifierBinding, ScopeKind};
pub use lexicon::Lexicon;
pub use ops::{apply, apply_chain, chain_text, OperatorId, OperatorOutcome, RefactorConfig};
pub use syntax::{parse, render, reparses, Language, ParseTree};
pub use units::{extract_units, CodeUnit, ExtractOptions, Granularity, SourceFile};
