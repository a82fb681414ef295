//! Musical interpretation of terminal strings.
//!
//! Each token becomes one event laid end to end from tick 0. Pitches are
//! absolute MIDI numbers computed as
//! `60 + 12*(register - 1) + pitch class + operation shift + 12*octave_offset`,
//! so register 1 is the middle-C octave.

use std::collections::HashMap;

use crate::derive::MForm;
use crate::grammar::{
    ChordTone, Component, Duration, Dynamic, GrammarSystem, Operation, Payload, Pitch, Symbol, TokenDef,
};

/// Ticks per quarter note.
pub const PPQ: u32 = 480;
pub const DEFAULT_TEMPO_BPM: u32 = 120;
/// Velocity for tokens without a dynamic.
pub const DEFAULT_VELOCITY: u8 = 75;
/// Register assumed when a token leaves the register slot empty.
pub const DEFAULT_REGISTER: i32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MusicError {
    #[error("pitch {0} is outside the MIDI range 0..=127")]
    OutOfRange(i64),
    #[error("no chord row for `{alias}` with operation {}", .op.as_deref().unwrap_or("-"))]
    UnresolvedAlias { alias: Symbol, op: Option<String> },
    #[error("chord row for `{alias}` with operation {} is defined twice", .op.as_deref().unwrap_or("-"))]
    DuplicateChordRow { alias: Symbol, op: Option<String> },
    #[error("unknown duration `{0}`")]
    UnknownDuration(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InterpretError {
    #[error("token {index} (`{symbol}`) has no definition")]
    UnknownSymbol { index: usize, symbol: Symbol },
    #[error("token {index} (`{symbol}`): {source}")]
    Token { index: usize, symbol: Symbol, source: MusicError },
    #[error("m-string has {found} component(s), system has {expected}")]
    ArityMismatch { expected: usize, found: usize },
}

/// A timed note, chord, or rest (empty `pitches`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NoteEvent {
    pub onset: u32,
    pub duration: u32,
    /// Ascending, no duplicates.
    pub pitches: Vec<u8>,
    pub velocity: u8,
}

impl NoteEvent {
    pub fn is_rest(&self) -> bool {
        self.pitches.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Track {
    pub name: String,
    pub program: u8,
    /// Contiguous: each onset is the previous onset plus its duration.
    pub events: Vec<NoteEvent>,
}

impl Track {
    pub fn total_ticks(&self) -> u32 {
        self.events.last().map_or(0, |e| e.onset + e.duration)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Score {
    pub ppq: u32,
    pub tempo_bpm: u32,
    pub tracks: Vec<Track>,
}

impl Score {
    pub fn new(tracks: Vec<Track>) -> Self {
        Score { ppq: PPQ, tempo_bpm: DEFAULT_TEMPO_BPM, tracks }
    }
}

pub fn duration_ticks(dur: Duration) -> u32 {
    match dur {
        Duration::Eighth => PPQ / 2,
        Duration::Quarter => PPQ,
        Duration::Half => PPQ * 2,
        Duration::Whole => PPQ * 4,
    }
}

/// Ticks for a duration symbol (`e`, `q`, `h`, `f`).
pub fn duration_ticks_for(symbol: &str) -> Result<u32, MusicError> {
    Duration::from_symbol(symbol)
        .map(duration_ticks)
        .ok_or_else(|| MusicError::UnknownDuration(symbol.to_string()))
}

/// Semitone shift of an operation. Labels do not move the pitch.
pub fn operation_shift(op: &Operation) -> i32 {
    match op {
        Operation::Flat => -1,
        Operation::Sharp => 1,
        Operation::Down => -12,
        Operation::Up => 12,
        Operation::None | Operation::Label(_) => 0,
    }
}

pub fn pitch_of(pitch: Pitch, reg: i32, op: &Operation, track_offset: i32) -> Result<u8, MusicError> {
    let midi = 60
        + 12 * (i64::from(reg) - 1)
        + i64::from(pitch.semitones())
        + i64::from(operation_shift(op))
        + 12 * i64::from(track_offset);
    u8::try_from(midi)
        .ok()
        .filter(|&m| m <= 127)
        .ok_or(MusicError::OutOfRange(midi))
}

pub fn velocity_of(dynamic: Option<Dynamic>) -> u8 {
    match dynamic {
        Some(Dynamic::Pianissimo) => 33,
        Some(Dynamic::Piano) => 49,
        Some(Dynamic::MezzoPiano) => 64,
        None => DEFAULT_VELOCITY,
        Some(Dynamic::MezzoForte) => 88,
        Some(Dynamic::Forte) => 101,
        Some(Dynamic::Fortissimo) => 113,
    }
}

/// Chord rows keyed by alias and operation label.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ChordTable {
    rows: HashMap<(Symbol, Option<String>), Vec<ChordTone>>,
}

impl ChordTable {
    pub fn new() -> Self {
        ChordTable::default()
    }

    pub fn insert(&mut self, alias: Symbol, op: Option<String>, tones: Vec<ChordTone>) -> Result<(), MusicError> {
        let key = (alias, op);
        if self.rows.contains_key(&key) {
            let (alias, op) = key;
            return Err(MusicError::DuplicateChordRow { alias, op });
        }
        self.rows.insert(key, tones);
        Ok(())
    }

    /// One row per chord token, keyed by the token name and its operation.
    pub fn from_tokens(tokens: &[TokenDef]) -> Result<Self, MusicError> {
        let mut table = ChordTable::new();
        for t in tokens {
            if let Payload::Chord(tones) = &t.payload {
                table.insert(t.name.clone(), t.attrs.op.key(), tones.clone())?;
            }
        }
        Ok(table)
    }

    /// Exact `(alias, op)` row, falling back to the alias's unlabelled row.
    pub fn lookup(&self, alias: &Symbol, op: &Operation) -> Option<&[ChordTone]> {
        let key = (alias.clone(), op.key());
        self.rows
            .get(&key)
            .or_else(|| self.rows.get(&(alias.clone(), None)))
            .map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// MIDI numbers of a chord, ascending and deduplicated. A tone's own
/// register overrides `reg`.
pub fn expand_chord(
    alias: &Symbol,
    op: &Operation,
    table: &ChordTable,
    reg: i32,
    track_offset: i32,
) -> Result<Vec<u8>, MusicError> {
    let tones = table
        .lookup(alias, op)
        .ok_or_else(|| MusicError::UnresolvedAlias { alias: alias.clone(), op: op.key() })?;
    let mut out = Vec::with_capacity(tones.len());
    for tone in tones {
        let tone_reg = tone.register.map_or(reg, |r| r as i32);
        out.push(pitch_of(tone.pitch, tone_reg, op, track_offset)?);
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Lays out `tokens` as a contiguous track. The result has an empty name and
/// program 0; see [`interpret_component`] for a named track.
pub fn interpret(
    tokens: &[Symbol],
    defs: &[TokenDef],
    table: &ChordTable,
    track_offset: i32,
) -> Result<Track, InterpretError> {
    let by_name: HashMap<&Symbol, &TokenDef> = defs.iter().map(|d| (&d.name, d)).collect();
    let mut events = Vec::with_capacity(tokens.len());
    let mut onset = 0u32;
    for (index, symbol) in tokens.iter().enumerate() {
        let def = by_name
            .get(symbol)
            .ok_or_else(|| InterpretError::UnknownSymbol { index, symbol: symbol.clone() })?;
        let wrap = |source| InterpretError::Token { index, symbol: symbol.clone(), source };
        let attrs = &def.attrs;
        let duration = duration_ticks(attrs.dur.unwrap_or(Duration::Quarter));
        let reg = attrs.reg.unwrap_or(DEFAULT_REGISTER);
        let pitches = match &def.payload {
            Payload::Rest => Vec::new(),
            Payload::Note(p) => vec![pitch_of(*p, reg, &attrs.op, track_offset).map_err(wrap)?],
            Payload::Chord(_) => expand_chord(symbol, &attrs.op, table, reg, track_offset).map_err(wrap)?,
        };
        events.push(NoteEvent { onset, duration, pitches, velocity: velocity_of(attrs.dynamic) });
        onset += duration;
    }
    Ok(Track { name: String::new(), program: 0, events })
}

/// Interprets a terminal string of `c`, using its tokens, chord rows,
/// program and octave offset.
pub fn interpret_component(c: &Component, tokens: &[Symbol]) -> Result<Track, InterpretError> {
    let table = ChordTable::from_tokens(&c.tokens).map_err(|source| InterpretError::Token {
        index: 0,
        symbol: tokens.first().cloned().unwrap_or_else(|| Symbol::new("-")),
        source,
    })?;
    let mut track = interpret(tokens, &c.tokens, &table, c.octave_offset)?;
    track.name = c.name.clone();
    track.program = c.program;
    Ok(track)
}

/// One track per component, in system order.
pub fn score_from_mstring(system: &GrammarSystem, mstring: &MForm) -> Result<Score, InterpretError> {
    if mstring.arity() != system.arity() {
        return Err(InterpretError::ArityMismatch { expected: system.arity(), found: mstring.arity() });
    }
    let tracks = system
        .components
        .iter()
        .zip(mstring.forms())
        .map(|(c, form)| interpret_component(c, form))
        .collect::<Result<_, _>>()?;
    Ok(Score::new(tracks))
}
