//! The `.mgs` grammar-system language.
//!
//! ```text
//! system jazz {
//!   component G1 {
//!     start S1
//!     nonterminals S1 A B;
//!     tokens {
//!       c_y = note c [-, q, 2, -];
//!     }
//!     rule 1: S1 -> A A B A;
//!     rule 2: (A, B) -> (c_y, c_y);
//!   }
//!   sync {
//!     (1)
//!   }
//! }
//! ```
//!
//! [`parse_system`] checks syntax only; [`load_system`] also runs
//! validation and attaches source positions to the semantic diagnostics.

mod lexer;
mod parser;
mod printer;

use std::fmt;

use crate::grammar::{validate_system, Diagnostic, GrammarSystem, Severity, SystemDiagnostic, ValidationPolicy};

pub use printer::print_system;

/// Location of a piece of source text. `line` and `column` are 1-based;
/// `column` counts characters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SourceSpan {
    pub offset: usize,
    pub line: usize,
    pub column: usize,
    pub length: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseDiagnostic {
    pub span: SourceSpan,
    pub message: String,
    pub severity: Severity,
}

impl ParseDiagnostic {
    pub fn error(span: SourceSpan, message: impl Into<String>) -> Self {
        ParseDiagnostic { span, message: message.into(), severity: Severity::Error }
    }

    pub fn warning(span: SourceSpan, message: impl Into<String>) -> Self {
        ParseDiagnostic { span, message: message.into(), severity: Severity::Warning }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}: {}", self.span.line, self.span.column, self.severity, self.message)
    }
}

/// Source positions of the pieces of a parsed component.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ComponentSpans {
    pub name: SourceSpan,
    pub start: SourceSpan,
    pub program: Option<SourceSpan>,
    /// Parallel to `Component::nonterminals`.
    pub nonterminals: Vec<SourceSpan>,
    /// Parallel to `Component::tokens`.
    pub tokens: Vec<SourceSpan>,
    /// Parallel to `Component::rules`.
    pub rules: Vec<SourceSpan>,
}

/// Source positions of a parsed system, parallel to its structure.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SourceMap {
    pub name: SourceSpan,
    pub components: Vec<ComponentSpans>,
    pub tuples: Vec<SourceSpan>,
}

impl SourceMap {
    /// Best source location for a validation diagnostic.
    pub fn locate(&self, system: &GrammarSystem, diag: &SystemDiagnostic) -> SourceSpan {
        match diag {
            SystemDiagnostic::NoComponents => self.name,
            SystemDiagnostic::ArityMismatch { tuple, .. }
            | SystemDiagnostic::UnknownRuleLabel { tuple, .. }
            | SystemDiagnostic::DuplicateTuple { tuple } => {
                self.tuples.get(*tuple).copied().unwrap_or(self.name)
            }
            SystemDiagnostic::Component { index, diagnostic } => {
                match (system.components.get(*index), self.components.get(*index)) {
                    (Some(c), Some(spans)) => locate_in_component(c, spans, diagnostic),
                    _ => self.name,
                }
            }
        }
    }
}

fn locate_in_component(
    c: &crate::grammar::Component,
    spans: &ComponentSpans,
    diag: &Diagnostic,
) -> SourceSpan {
    // Duplicates point at the last declaration, everything else at the first.
    let last_nonterminal = |s| c.nonterminals.iter().rposition(|n| n == s).and_then(|i| spans.nonterminals.get(i));
    let last_token = |s| c.tokens.iter().rposition(|t| &t.name == s).and_then(|i| spans.tokens.get(i));
    let first_rule = |l| c.rules.iter().position(|r| r.label == l).and_then(|i| spans.rules.get(i));
    let last_rule = |l| c.rules.iter().rposition(|r| r.label == l).and_then(|i| spans.rules.get(i));
    let found = match diag {
        Diagnostic::InvalidSymbol(s) => last_nonterminal(s).or_else(|| last_token(s)),
        Diagnostic::DuplicateNonterminal(s) => last_nonterminal(s),
        Diagnostic::DuplicateToken(s) | Diagnostic::AlphabetOverlap(s) | Diagnostic::ChordTooSmall(s) => {
            last_token(s)
        }
        Diagnostic::StartNotNonterminal(_) => Some(&spans.start),
        Diagnostic::NoRules => None,
        Diagnostic::ProgramOutOfRange(_) => spans.program.as_ref(),
        Diagnostic::DuplicateLabel(l) => last_rule(*l),
        Diagnostic::InvalidLabel(l)
        | Diagnostic::EmptyLhs(l)
        | Diagnostic::ErasingRule(l)
        | Diagnostic::PartCountMismatch { label: l, .. }
        | Diagnostic::LhsNotNonterminal { label: l, .. }
        | Diagnostic::UnknownSymbol { label: l, .. } => first_rule(*l),
    };
    found.copied().unwrap_or(spans.name)
}

/// Parses `.mgs` text into a system without semantic validation.
pub fn parse_system(text: &str) -> Result<GrammarSystem, Vec<ParseDiagnostic>> {
    parse_system_with_spans(text).map(|(system, _)| system)
}

/// Like [`parse_system`], also returning source positions.
pub fn parse_system_with_spans(text: &str) -> Result<(GrammarSystem, SourceMap), Vec<ParseDiagnostic>> {
    parser::parse(text)
}

/// A parsed and validated system.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub system: GrammarSystem,
    pub spans: SourceMap,
    /// Non-fatal validation findings.
    pub warnings: Vec<ParseDiagnostic>,
}

/// Parses and validates. On failure returns every syntax error, or, if the
/// syntax is fine, every validation diagnostic positioned in the source.
pub fn load_system(text: &str, policy: ValidationPolicy) -> Result<Loaded, Vec<ParseDiagnostic>> {
    let (system, spans) = parse_system_with_spans(text)?;
    let diags: Vec<ParseDiagnostic> = validate_system(&system, policy)
        .iter()
        .map(|d| ParseDiagnostic {
            span: spans.locate(&system, d),
            message: d.to_string(),
            severity: d.severity(),
        })
        .collect();
    if diags.iter().any(ParseDiagnostic::is_error) {
        return Err(diags);
    }
    Ok(Loaded { system, spans, warnings: diags })
}
