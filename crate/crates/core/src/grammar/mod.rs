//! Data model for scattered context grammars and rule-synchronized systems.
//!
//! A [`GrammarSystem`] holds `m` [`Component`]s, each a scattered context
//! grammar `(N, T, P, S)`, plus the synchronization set `Q` of label tuples.
//! The types here are plain data: construction never fails, and all
//! well-formedness checks live in [`validate`].

mod classify;
mod validate;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

pub use classify::{classify_component, classify_rule, classify_system, ComponentClass, RuleClass, SystemClass};
pub use validate::{
    validate_component, validate_system, Diagnostic, Severity, SystemDiagnostic, ValidationPolicy,
};

/// Characters that may not appear inside a symbol name.
pub const RESERVED_CHARS: &[char] = &[
    '{', '}', '(', ')', '[', ']', ',', ';', ':', '=', '+', '-', '>', '#', '|', '%',
];

/// A grammar symbol, terminal or nonterminal. Cheap to clone.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Self {
        Symbol(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// True if the name is nonempty and free of whitespace and DSL punctuation.
    pub fn is_valid_name(name: &str) -> bool {
        !name.is_empty() && !name.chars().any(|c| c.is_whitespace() || RESERVED_CHARS.contains(&c))
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Symbol {
    fn from(name: &str) -> Self {
        Symbol::new(name)
    }
}

/// Splits a whitespace-separated string into symbols.
pub fn symbols(text: &str) -> Vec<Symbol> {
    text.split_whitespace().map(Symbol::new).collect()
}

/// German pitch letter; `H` is B natural.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PitchLetter {
    C,
    D,
    E,
    F,
    G,
    A,
    H,
}

impl PitchLetter {
    /// Semitones above C.
    pub fn semitones(self) -> i32 {
        match self {
            PitchLetter::C => 0,
            PitchLetter::D => 2,
            PitchLetter::E => 4,
            PitchLetter::F => 5,
            PitchLetter::G => 7,
            PitchLetter::A => 9,
            PitchLetter::H => 11,
        }
    }

    fn from_char(c: char) -> Option<Self> {
        Some(match c {
            'c' => PitchLetter::C,
            'd' => PitchLetter::D,
            'e' => PitchLetter::E,
            'f' => PitchLetter::F,
            'g' => PitchLetter::G,
            'a' => PitchLetter::A,
            'h' => PitchLetter::H,
            _ => return None,
        })
    }

    fn as_char(self) -> char {
        match self {
            PitchLetter::C => 'c',
            PitchLetter::D => 'd',
            PitchLetter::E => 'e',
            PitchLetter::F => 'f',
            PitchLetter::G => 'g',
            PitchLetter::A => 'a',
            PitchLetter::H => 'h',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Accidental {
    Natural,
    /// `is` suffix.
    Sharp,
    /// `es` suffix.
    Flat,
}

impl Accidental {
    pub fn semitones(self) -> i32 {
        match self {
            Accidental::Natural => 0,
            Accidental::Sharp => 1,
            Accidental::Flat => -1,
        }
    }
}

/// A pitch class spelled with German names: `c`, `fis`, `hes`, ...
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Pitch {
    pub letter: PitchLetter,
    pub accidental: Accidental,
}

impl Pitch {
    pub fn new(letter: PitchLetter, accidental: Accidental) -> Self {
        Pitch { letter, accidental }
    }

    pub fn natural(letter: PitchLetter) -> Self {
        Pitch::new(letter, Accidental::Natural)
    }

    /// Semitones above C, before any register is applied. May be -1 for `ces`.
    pub fn semitones(self) -> i32 {
        self.letter.semitones() + self.accidental.semitones()
    }
}

impl fmt::Display for Pitch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter.as_char())?;
        match self.accidental {
            Accidental::Natural => Ok(()),
            Accidental::Sharp => f.write_str("is"),
            Accidental::Flat => f.write_str("es"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid pitch name `{0}`")]
pub struct PitchParseError(pub String);

impl FromStr for Pitch {
    type Err = PitchParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        // German contractions for e-flat and a-flat.
        match s {
            "es" => return Ok(Pitch::new(PitchLetter::E, Accidental::Flat)),
            "as" => return Ok(Pitch::new(PitchLetter::A, Accidental::Flat)),
            _ => {}
        }
        let mut chars = s.chars();
        let letter = chars
            .next()
            .and_then(PitchLetter::from_char)
            .ok_or_else(|| PitchParseError(s.to_string()))?;
        let accidental = match chars.as_str() {
            "" => Accidental::Natural,
            "is" => Accidental::Sharp,
            "es" => Accidental::Flat,
            _ => return Err(PitchParseError(s.to_string())),
        };
        Ok(Pitch::new(letter, accidental))
    }
}

/// One member of a chord: a pitch class with an optional register override.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ChordTone {
    pub pitch: Pitch,
    pub register: Option<u32>,
}

impl fmt::Display for ChordTone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.pitch)?;
        if let Some(reg) = self.register {
            write!(f, "{reg}")?;
        }
        Ok(())
    }
}

impl FromStr for ChordTone {
    type Err = PitchParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let split = s.find(|c: char| c.is_ascii_digit()).unwrap_or(s.len());
        let (name, digits) = s.split_at(split);
        let pitch: Pitch = name.parse().map_err(|_| PitchParseError(s.to_string()))?;
        let register = if digits.is_empty() {
            None
        } else {
            Some(digits.parse().map_err(|_| PitchParseError(s.to_string()))?)
        };
        Ok(ChordTone { pitch, register })
    }
}

/// What a terminal token sounds like.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Payload {
    Note(Pitch),
    Rest,
    /// Chord alias, e.g. a Greek-letter symbol standing for several pitch classes.
    Chord(Vec<ChordTone>),
}

/// Special operation slot of a token.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub enum Operation {
    #[default]
    None,
    Down,
    Up,
    Flat,
    Sharp,
    /// Free-form label; no pitch effect, used to key chord lookups.
    Label(String),
}

impl Operation {
    /// Label used to key chord-table rows. `None` for the empty operation.
    pub fn key(&self) -> Option<String> {
        match self {
            Operation::None => None,
            other => Some(other.to_string()),
        }
    }
}

impl fmt::Display for Operation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operation::None => f.write_str("-"),
            Operation::Down => f.write_str("down"),
            Operation::Up => f.write_str("up"),
            Operation::Flat => f.write_str("flat"),
            Operation::Sharp => f.write_str("sharp"),
            Operation::Label(l) => f.write_str(l),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Duration {
    Eighth,
    Quarter,
    Half,
    Whole,
}

impl Duration {
    pub fn from_symbol(s: &str) -> Option<Self> {
        Some(match s {
            "e" => Duration::Eighth,
            "q" => Duration::Quarter,
            "h" => Duration::Half,
            "f" => Duration::Whole,
            _ => return None,
        })
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Duration::Eighth => "e",
            Duration::Quarter => "q",
            Duration::Half => "h",
            Duration::Whole => "f",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dynamic {
    Pianissimo,
    Piano,
    MezzoPiano,
    MezzoForte,
    Forte,
    Fortissimo,
}

impl Dynamic {
    pub fn from_symbol(s: &str) -> Option<Self> {
        Some(match s {
            "pp" => Dynamic::Pianissimo,
            "p" => Dynamic::Piano,
            "mp" => Dynamic::MezzoPiano,
            "mf" => Dynamic::MezzoForte,
            "f" => Dynamic::Forte,
            "ff" => Dynamic::Fortissimo,
            _ => return None,
        })
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Dynamic::Pianissimo => "pp",
            Dynamic::Piano => "p",
            Dynamic::MezzoPiano => "mp",
            Dynamic::MezzoForte => "mf",
            Dynamic::Forte => "f",
            Dynamic::Fortissimo => "ff",
        }
    }
}

/// The four attribute slots `[op, dur, reg, dyn]`. Absent slots are `None`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct AttributeVector {
    pub op: Operation,
    pub dur: Option<Duration>,
    pub reg: Option<i32>,
    pub dynamic: Option<Dynamic>,
}

impl fmt::Display for AttributeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dur = self.dur.map_or("-", Duration::symbol);
        let dynamic = self.dynamic.map_or("-", Dynamic::symbol);
        match self.reg {
            Some(reg) => write!(f, "[{}, {}, {}, {}]", self.op, dur, reg, dynamic),
            None => write!(f, "[{}, {}, -, {}]", self.op, dur, dynamic),
        }
    }
}

/// A terminal symbol and its musical meaning.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenDef {
    pub name: Symbol,
    pub payload: Payload,
    pub attrs: AttributeVector,
}

/// `(A1, ..., An) -> (x1, ..., xn)`, identified by its integer label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScatteredRule {
    pub label: u32,
    pub lhs: Vec<Symbol>,
    pub rhs: Vec<Vec<Symbol>>,
}

impl ScatteredRule {
    pub fn new(label: u32, lhs: Vec<Symbol>, rhs: Vec<Vec<Symbol>>) -> Self {
        ScatteredRule { label, lhs, rhs }
    }

    /// Context-free rule `lhs -> rhs`, with `rhs` given as whitespace-separated names.
    pub fn context_free(label: u32, lhs: &str, rhs: &str) -> Self {
        ScatteredRule::new(label, vec![Symbol::new(lhs)], vec![symbols(rhs)])
    }

    /// Scattered rule from whitespace-separated lhs names and one string per rhs part.
    pub fn scattered(label: u32, lhs: &str, rhs: &[&str]) -> Self {
        ScatteredRule::new(label, symbols(lhs), rhs.iter().map(|part| symbols(part)).collect())
    }

    /// Number of rewritten occurrences, `n`.
    pub fn arity(&self) -> usize {
        self.lhs.len()
    }
}

/// One scattered context grammar `(N, T, P, S)` plus its instrument settings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub name: String,
    pub nonterminals: Vec<Symbol>,
    pub tokens: Vec<TokenDef>,
    pub rules: Vec<ScatteredRule>,
    pub start: Symbol,
    /// MIDI program, 0-127.
    pub program: u8,
    /// Shift in octaves applied to every pitch of this component.
    pub octave_offset: i32,
}

impl Component {
    pub fn new(name: &str, start: &str) -> Self {
        Component {
            name: name.to_string(),
            nonterminals: Vec::new(),
            tokens: Vec::new(),
            rules: Vec::new(),
            start: Symbol::new(start),
            program: 0,
            octave_offset: 0,
        }
    }

    pub fn is_nonterminal(&self, symbol: &Symbol) -> bool {
        self.nonterminals.contains(symbol)
    }

    pub fn token(&self, symbol: &Symbol) -> Option<&TokenDef> {
        self.tokens.iter().find(|t| &t.name == symbol)
    }

    pub fn is_terminal(&self, symbol: &Symbol) -> bool {
        self.token(symbol).is_some()
    }

    /// First rule carrying `label`.
    pub fn rule(&self, label: u32) -> Option<&ScatteredRule> {
        self.rules.iter().find(|r| r.label == label)
    }
}

/// A tuple `(p1, ..., pm)` of rule labels, one per component.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SyncTuple(pub Vec<u32>);

impl SyncTuple {
    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn labels(&self) -> &[u32] {
        &self.0
    }
}

impl fmt::Display for SyncTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, label) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{label}")?;
        }
        f.write_str(")")
    }
}

impl From<&[u32]> for SyncTuple {
    fn from(labels: &[u32]) -> Self {
        SyncTuple(labels.to_vec())
    }
}

/// `G_s = (G1, ..., Gm, Q)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrammarSystem {
    pub name: String,
    pub components: Vec<Component>,
    pub sync: Vec<SyncTuple>,
}

impl GrammarSystem {
    /// Number of components, `m`.
    pub fn arity(&self) -> usize {
        self.components.len()
    }
}
