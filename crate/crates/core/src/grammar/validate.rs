use std::collections::HashSet;
use std::fmt;

use super::{Component, GrammarSystem, Payload, Symbol};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ValidationPolicy {
    /// Accept rules with an empty right-hand part.
    pub allow_erasing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Severity::Warning => f.write_str("warning"),
            Severity::Error => f.write_str("error"),
        }
    }
}

/// A well-formedness violation inside one component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Diagnostic {
    InvalidSymbol(Symbol),
    DuplicateNonterminal(Symbol),
    DuplicateToken(Symbol),
    /// Symbol declared both as nonterminal and as token.
    AlphabetOverlap(Symbol),
    StartNotNonterminal(Symbol),
    NoRules,
    InvalidLabel(u32),
    DuplicateLabel(u32),
    EmptyLhs(u32),
    PartCountMismatch { label: u32, lhs: usize, rhs: usize },
    LhsNotNonterminal { label: u32, symbol: Symbol },
    UnknownSymbol { label: u32, symbol: Symbol },
    ErasingRule(u32),
    ChordTooSmall(Symbol),
    ProgramOutOfRange(u8),
}

impl Diagnostic {
    pub fn severity(&self) -> Severity {
        Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::InvalidSymbol(s) => write!(f, "invalid symbol name `{s}`"),
            Diagnostic::DuplicateNonterminal(s) => write!(f, "nonterminal `{s}` declared twice"),
            Diagnostic::DuplicateToken(s) => write!(f, "token `{s}` declared twice"),
            Diagnostic::AlphabetOverlap(s) => {
                write!(f, "`{s}` is both a nonterminal and a terminal")
            }
            Diagnostic::StartNotNonterminal(s) => {
                write!(f, "start symbol `{s}` is not a declared nonterminal")
            }
            Diagnostic::NoRules => f.write_str("component has no rules"),
            Diagnostic::InvalidLabel(l) => write!(f, "rule label {l} must be positive"),
            Diagnostic::DuplicateLabel(l) => write!(f, "rule label {l} used more than once"),
            Diagnostic::EmptyLhs(l) => write!(f, "rule {l} has an empty left-hand side"),
            Diagnostic::PartCountMismatch { label, lhs, rhs } => write!(
                f,
                "rule {label} rewrites {lhs} nonterminal(s) but has {rhs} right-hand part(s)"
            ),
            Diagnostic::LhsNotNonterminal { label, symbol } => {
                write!(f, "rule {label}: left-hand symbol `{symbol}` is not a nonterminal")
            }
            Diagnostic::UnknownSymbol { label, symbol } => {
                write!(f, "rule {label}: unknown symbol `{symbol}`")
            }
            Diagnostic::ErasingRule(l) => {
                write!(f, "rule {l} is erasing (empty right-hand part); pass --allow-erasing to permit")
            }
            Diagnostic::ChordTooSmall(s) => write!(f, "chord token `{s}` needs at least two tones"),
            Diagnostic::ProgramOutOfRange(p) => write!(f, "program {p} is outside 0..=127"),
        }
    }
}

/// A violation of the system-level constraints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SystemDiagnostic {
    NoComponents,
    /// `index` is 0-based.
    Component { index: usize, diagnostic: Diagnostic },
    /// Sync tuple at position `tuple` (0-based) has the wrong number of labels.
    ArityMismatch { tuple: usize, expected: usize, found: usize },
    /// `component` is 0-based.
    UnknownRuleLabel { tuple: usize, component: usize, label: u32 },
    DuplicateTuple { tuple: usize },
}

impl SystemDiagnostic {
    pub fn severity(&self) -> Severity {
        match self {
            SystemDiagnostic::DuplicateTuple { .. } => Severity::Warning,
            SystemDiagnostic::Component { diagnostic, .. } => diagnostic.severity(),
            _ => Severity::Error,
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity() == Severity::Error
    }
}

impl fmt::Display for SystemDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SystemDiagnostic::NoComponents => f.write_str("system has no components"),
            SystemDiagnostic::Component { index, diagnostic } => {
                write!(f, "component {}: {diagnostic}", index + 1)
            }
            SystemDiagnostic::ArityMismatch { tuple, expected, found } => write!(
                f,
                "sync tuple {} has {found} label(s), expected {expected}",
                tuple + 1
            ),
            SystemDiagnostic::UnknownRuleLabel { tuple, component, label } => write!(
                f,
                "sync tuple {} references rule {label}, which component {} does not define",
                tuple + 1,
                component + 1
            ),
            SystemDiagnostic::DuplicateTuple { tuple } => {
                write!(f, "sync tuple {} repeats an earlier tuple", tuple + 1)
            }
        }
    }
}

/// Collects every well-formedness violation of `c`. Empty iff well-formed.
pub fn validate_component(c: &Component, policy: ValidationPolicy) -> Vec<Diagnostic> {
    let mut out = Vec::new();

    let mut nonterminals = HashSet::new();
    for nt in &c.nonterminals {
        if !Symbol::is_valid_name(nt.as_str()) {
            out.push(Diagnostic::InvalidSymbol(nt.clone()));
        }
        if !nonterminals.insert(nt) {
            out.push(Diagnostic::DuplicateNonterminal(nt.clone()));
        }
    }

    let mut terminals = HashSet::new();
    for token in &c.tokens {
        if !Symbol::is_valid_name(token.name.as_str()) {
            out.push(Diagnostic::InvalidSymbol(token.name.clone()));
        }
        if !terminals.insert(&token.name) {
            out.push(Diagnostic::DuplicateToken(token.name.clone()));
        } else if nonterminals.contains(&token.name) {
            out.push(Diagnostic::AlphabetOverlap(token.name.clone()));
        }
        if let Payload::Chord(tones) = &token.payload {
            if tones.len() < 2 {
                out.push(Diagnostic::ChordTooSmall(token.name.clone()));
            }
        }
    }

    if !nonterminals.contains(&c.start) {
        out.push(Diagnostic::StartNotNonterminal(c.start.clone()));
    }
    if c.program > 127 {
        out.push(Diagnostic::ProgramOutOfRange(c.program));
    }
    if c.rules.is_empty() {
        out.push(Diagnostic::NoRules);
    }

    let mut labels = HashSet::new();
    for rule in &c.rules {
        let label = rule.label;
        if label == 0 {
            out.push(Diagnostic::InvalidLabel(label));
        }
        if !labels.insert(label) {
            out.push(Diagnostic::DuplicateLabel(label));
        }
        if rule.lhs.is_empty() {
            out.push(Diagnostic::EmptyLhs(label));
        }
        if rule.lhs.len() != rule.rhs.len() {
            out.push(Diagnostic::PartCountMismatch {
                label,
                lhs: rule.lhs.len(),
                rhs: rule.rhs.len(),
            });
        }
        for symbol in &rule.lhs {
            if !nonterminals.contains(symbol) {
                out.push(Diagnostic::LhsNotNonterminal { label, symbol: symbol.clone() });
            }
        }
        let mut unknown: Vec<&Symbol> = Vec::new();
        for symbol in rule.rhs.iter().flatten() {
            if !nonterminals.contains(symbol) && !terminals.contains(symbol) && !unknown.contains(&symbol) {
                unknown.push(symbol);
                out.push(Diagnostic::UnknownSymbol { label, symbol: symbol.clone() });
            }
        }
        if !policy.allow_erasing && rule.rhs.iter().any(Vec::is_empty) {
            out.push(Diagnostic::ErasingRule(label));
        }
    }
    out
}

/// Validates every component and the synchronization set.
pub fn validate_system(s: &GrammarSystem, policy: ValidationPolicy) -> Vec<SystemDiagnostic> {
    let mut out = Vec::new();
    if s.components.is_empty() {
        out.push(SystemDiagnostic::NoComponents);
    }
    for (index, component) in s.components.iter().enumerate() {
        out.extend(
            validate_component(component, policy)
                .into_iter()
                .map(|diagnostic| SystemDiagnostic::Component { index, diagnostic }),
        );
    }

    let m = s.arity();
    let mut seen = HashSet::new();
    for (tuple, q) in s.sync.iter().enumerate() {
        if q.arity() != m {
            out.push(SystemDiagnostic::ArityMismatch { tuple, expected: m, found: q.arity() });
            continue;
        }
        for (component, (&label, c)) in q.0.iter().zip(&s.components).enumerate() {
            if c.rule(label).is_none() {
                out.push(SystemDiagnostic::UnknownRuleLabel { tuple, component, label });
            }
        }
        if !seen.insert(q) {
            out.push(SystemDiagnostic::DuplicateTuple { tuple });
        }
    }
    out
}
