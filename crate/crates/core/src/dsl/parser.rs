use super::lexer::{tokenize, Token, TokenKind};
use super::{ComponentSpans, ParseDiagnostic, SourceMap, SourceSpan};
use crate::grammar::{
    AttributeVector, ChordTone, Component, Duration, Dynamic, GrammarSystem, Operation, Payload, Pitch,
    ScatteredRule, Symbol, SyncTuple, TokenDef,
};

/// Marker for a reported error; the diagnostic is already recorded.
struct Reported;

type PResult<T> = Result<T, Reported>;

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    diags: Vec<ParseDiagnostic>,
}

pub(super) fn parse(text: &str) -> Result<(GrammarSystem, SourceMap), Vec<ParseDiagnostic>> {
    let (tokens, diags) = tokenize(text);
    let mut p = Parser { tokens, pos: 0, diags };
    let parsed = p.system();
    match parsed {
        Ok(result) if p.diags.is_empty() => Ok(result),
        _ => Err(p.diags),
    }
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn peek_kind(&self) -> &TokenKind {
        &self.peek().kind
    }

    fn at_eof(&self) -> bool {
        matches!(self.peek_kind(), TokenKind::Eof)
    }

    fn bump(&mut self) -> Token {
        let tok = self.tokens[self.pos].clone();
        if !self.at_eof() {
            self.pos += 1;
        }
        tok
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek_kind(), TokenKind::Ident(s) if s == kw)
    }

    fn error<T>(&mut self, span: SourceSpan, message: impl Into<String>) -> PResult<T> {
        self.diags.push(ParseDiagnostic::error(span, message));
        Err(Reported)
    }

    fn unexpected<T>(&mut self, expected: &str) -> PResult<T> {
        let tok = self.peek().clone();
        let message = if tok.kind == TokenKind::Eof {
            format!("expected {expected}")
        } else {
            format!("expected {expected}, found {}", tok.kind.describe())
        };
        self.error(tok.span, message)
    }

    fn expect(&mut self, kind: TokenKind) -> PResult<SourceSpan> {
        if *self.peek_kind() == kind {
            Ok(self.bump().span)
        } else {
            self.unexpected(&kind.describe())
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> PResult<SourceSpan> {
        if self.at_keyword(kw) {
            Ok(self.bump().span)
        } else {
            self.unexpected(&format!("'{kw}'"))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<(String, SourceSpan)> {
        match self.peek_kind().clone() {
            TokenKind::Ident(s) => Ok((s, self.bump().span)),
            _ => self.unexpected(what),
        }
    }

    fn int(&mut self, what: &str) -> PResult<(i64, SourceSpan)> {
        match *self.peek_kind() {
            TokenKind::Int(v) => Ok((v, self.bump().span)),
            _ => self.unexpected(what),
        }
    }

    fn unsigned<T: TryFrom<i64>>(&mut self, what: &str) -> PResult<(T, SourceSpan)> {
        let (v, span) = self.int(what)?;
        match T::try_from(v) {
            Ok(t) => Ok((t, span)),
            Err(_) => self.error(span, format!("{what} {v} is out of range")),
        }
    }

    /// Skips past the next `;`, stopping early before a `}` or end of input.
    fn recover_statement(&mut self) {
        loop {
            match self.peek_kind() {
                TokenKind::Eof | TokenKind::RBrace => return,
                TokenKind::Semi => {
                    self.bump();
                    return;
                }
                _ => {
                    self.bump();
                }
            }
        }
    }

    fn system(&mut self) -> PResult<(GrammarSystem, SourceMap)> {
        self.expect_keyword("system")?;
        let (name, name_span) = self.ident("system name")?;
        self.expect(TokenKind::LBrace)?;

        let mut components = Vec::new();
        let mut component_spans = Vec::new();
        let mut failed = false;
        while self.at_keyword("component") {
            match self.component() {
                Ok((c, spans)) => {
                    components.push(c);
                    component_spans.push(spans);
                }
                Err(Reported) => {
                    failed = true;
                    // Resume at the next component or the sync block.
                    while !(self.at_eof() || self.at_keyword("component") || self.at_keyword("sync")) {
                        self.bump();
                    }
                }
            }
        }
        if components.is_empty() && !failed {
            return self.unexpected("'component'");
        }

        let (sync, tuple_spans) = self.sync()?;
        self.expect(TokenKind::RBrace)?;
        if !self.at_eof() {
            return self.unexpected("end of input");
        }
        if failed {
            return Err(Reported);
        }
        let map = SourceMap { name: name_span, components: component_spans, tuples: tuple_spans };
        Ok((GrammarSystem { name, components, sync }, map))
    }

    fn component(&mut self) -> PResult<(Component, ComponentSpans)> {
        self.expect_keyword("component")?;
        let (name, name_span) = self.ident("component name")?;
        self.expect(TokenKind::LBrace)?;
        let mut spans = ComponentSpans { name: name_span, ..Default::default() };
        let mut failed = false;

        self.expect_keyword("start")?;
        let (start, start_span) = self.ident("start symbol")?;
        spans.start = start_span;
        let mut component = Component::new(&name, &start);

        self.expect_keyword("nonterminals")?;
        let first = self.ident("nonterminal")?;
        let mut nonterminals = vec![first];
        while let TokenKind::Ident(_) = self.peek_kind() {
            nonterminals.push(self.ident("nonterminal")?);
        }
        if self.expect(TokenKind::Semi).is_err() {
            failed = true;
            self.recover_statement();
        }
        for (n, span) in nonterminals {
            component.nonterminals.push(Symbol::new(&n));
            spans.nonterminals.push(span);
        }

        if self.at_keyword("program") {
            self.bump();
            match self.unsigned::<u8>("program").and_then(|v| Ok((v, self.expect(TokenKind::Semi)?))) {
                Ok(((program, span), _)) => {
                    component.program = program;
                    spans.program = Some(span);
                }
                Err(Reported) => {
                    failed = true;
                    self.recover_statement();
                }
            }
        }
        if self.at_keyword("octave_offset") {
            self.bump();
            let parsed = self.int("octave offset").and_then(|(v, span)| match i32::try_from(v) {
                Ok(v) => Ok(v),
                Err(_) => self.error(span, format!("octave offset {v} is out of range")),
            });
            match parsed.and_then(|v| Ok((v, self.expect(TokenKind::Semi)?))) {
                Ok((offset, _)) => component.octave_offset = offset,
                Err(Reported) => {
                    failed = true;
                    self.recover_statement();
                }
            }
        }

        if self.at_keyword("tokens") {
            self.bump();
            self.expect(TokenKind::LBrace)?;
            if matches!(self.peek_kind(), TokenKind::RBrace) {
                failed = true;
                let _ = self.unexpected::<()>("token definition");
            }
            while !matches!(self.peek_kind(), TokenKind::RBrace | TokenKind::Eof) {
                let before = self.pos;
                match self.token_def() {
                    Ok((def, span)) => {
                        component.tokens.push(def);
                        spans.tokens.push(span);
                    }
                    Err(Reported) => {
                        failed = true;
                        self.recover_statement();
                        if self.pos == before {
                            break;
                        }
                    }
                }
            }
            self.expect(TokenKind::RBrace)?;
        }

        if !self.at_keyword("rule") {
            failed = true;
            let _ = self.unexpected::<()>("'rule'");
        }
        loop {
            if matches!(self.peek_kind(), TokenKind::RBrace | TokenKind::Eof) {
                break;
            }
            if !self.at_keyword("rule") {
                failed = true;
                let _ = self.unexpected::<()>("'rule' or '}'");
                let before = self.pos;
                self.recover_statement();
                if self.pos == before {
                    break;
                }
                continue;
            }
            match self.rule() {
                Ok((rule, span)) => {
                    component.rules.push(rule);
                    spans.rules.push(span);
                }
                Err(Reported) => {
                    failed = true;
                    self.recover_statement();
                }
            }
        }
        self.expect(TokenKind::RBrace)?;
        if failed {
            return Err(Reported);
        }
        Ok((component, spans))
    }

    fn token_def(&mut self) -> PResult<(TokenDef, SourceSpan)> {
        let (name, span) = self.ident("token name")?;
        self.expect(TokenKind::Eq)?;
        let (kind, kind_span) = self.ident("'note', 'rest' or 'chord'")?;
        let payload = match kind.as_str() {
            "note" => Payload::Note(self.pitch()?),
            "rest" => Payload::Rest,
            "chord" => {
                let mut tones = vec![self.chord_tone()?];
                while matches!(self.peek_kind(), TokenKind::Plus) {
                    self.bump();
                    tones.push(self.chord_tone()?);
                }
                Payload::Chord(tones)
            }
            other => {
                return self.error(kind_span, format!("expected 'note', 'rest' or 'chord', found `{other}`"))
            }
        };
        let attrs = self.attrs()?;
        self.expect(TokenKind::Semi)?;
        Ok((TokenDef { name: Symbol::new(&name), payload, attrs }, span))
    }

    fn pitch(&mut self) -> PResult<Pitch> {
        let (name, span) = self.ident("pitch name")?;
        match name.parse() {
            Ok(p) => Ok(p),
            Err(e) => self.error(span, e.to_string()),
        }
    }

    fn chord_tone(&mut self) -> PResult<ChordTone> {
        let (name, span) = self.ident("pitch name")?;
        match name.parse() {
            Ok(t) => Ok(t),
            Err(e) => self.error(span, e.to_string()),
        }
    }

    fn attrs(&mut self) -> PResult<AttributeVector> {
        self.expect(TokenKind::LBracket)?;
        let op = self.attr_slot("operation", |a| match a {
            Attr::Dash => Some(Operation::None),
            Attr::Ident(s) => Some(match s {
                "down" => Operation::Down,
                "up" => Operation::Up,
                "flat" => Operation::Flat,
                "sharp" => Operation::Sharp,
                label => Operation::Label(label.to_string()),
            }),
            Attr::Int(_) => None,
        })?;
        self.expect(TokenKind::Comma)?;
        let dur = self.attr_slot("duration (e, q, h, f or -)", |a| match a {
            Attr::Dash => Some(None),
            Attr::Ident(s) => Duration::from_symbol(s).map(Some),
            Attr::Int(_) => None,
        })?;
        self.expect(TokenKind::Comma)?;
        let reg = self.attr_slot("register (integer or -)", |a| match a {
            Attr::Dash => Some(None),
            Attr::Int(v) => i32::try_from(v).ok().map(Some),
            Attr::Ident(_) => None,
        })?;
        self.expect(TokenKind::Comma)?;
        let dynamic = self.attr_slot("dynamic (pp, p, mp, mf, f, ff or -)", |a| match a {
            Attr::Dash => Some(None),
            Attr::Ident(s) => Dynamic::from_symbol(s).map(Some),
            Attr::Int(_) => None,
        })?;
        self.expect(TokenKind::RBracket)?;
        Ok(AttributeVector { op, dur, reg, dynamic })
    }

    fn attr_slot<T>(&mut self, what: &str, read: impl FnOnce(Attr<'_>) -> Option<T>) -> PResult<T> {
        let tok = self.peek().clone();
        let attr = match &tok.kind {
            TokenKind::Dash => Attr::Dash,
            TokenKind::Ident(s) => Attr::Ident(s),
            TokenKind::Int(v) => Attr::Int(*v),
            _ => return self.unexpected(what),
        };
        match read(attr) {
            Some(v) => {
                self.bump();
                Ok(v)
            }
            None => self.error(tok.span, format!("expected {what}, found {}", tok.kind.describe())),
        }
    }

    fn rule(&mut self) -> PResult<(ScatteredRule, SourceSpan)> {
        let span = self.expect_keyword("rule")?;
        let (label, _) = self.unsigned::<u32>("rule label")?;
        self.expect(TokenKind::Colon)?;
        let lhs = if matches!(self.peek_kind(), TokenKind::LParen) {
            self.bump();
            let mut lhs = vec![Symbol::new(&self.ident("nonterminal")?.0)];
            while matches!(self.peek_kind(), TokenKind::Comma) {
                self.bump();
                lhs.push(Symbol::new(&self.ident("nonterminal")?.0));
            }
            self.expect(TokenKind::RParen)?;
            lhs
        } else {
            vec![Symbol::new(&self.ident("nonterminal or '('")?.0)]
        };
        self.expect(TokenKind::Arrow)?;
        let rhs = if matches!(self.peek_kind(), TokenKind::LParen) {
            self.bump();
            let mut rhs = vec![self.seq()?];
            while matches!(self.peek_kind(), TokenKind::Comma) {
                self.bump();
                rhs.push(self.seq()?);
            }
            self.expect(TokenKind::RParen)?;
            rhs
        } else {
            vec![self.seq()?]
        };
        self.expect(TokenKind::Semi)?;
        Ok((ScatteredRule { label, lhs, rhs }, span))
    }

    fn seq(&mut self) -> PResult<Vec<Symbol>> {
        if matches!(self.peek_kind(), TokenKind::Empty) {
            self.bump();
            return Ok(Vec::new());
        }
        let mut out = vec![Symbol::new(&self.ident("symbol or '%empty'")?.0)];
        while let TokenKind::Ident(s) = self.peek_kind() {
            out.push(Symbol::new(s));
            self.bump();
        }
        Ok(out)
    }

    fn sync(&mut self) -> PResult<(Vec<SyncTuple>, Vec<SourceSpan>)> {
        self.expect_keyword("sync")?;
        self.expect(TokenKind::LBrace)?;
        let mut tuples = Vec::new();
        let mut spans = Vec::new();
        let mut failed = false;
        if !matches!(self.peek_kind(), TokenKind::LParen) {
            return self.unexpected("'('");
        }
        while !matches!(self.peek_kind(), TokenKind::RBrace | TokenKind::Eof) {
            match self.tuple() {
                Ok((t, span)) => {
                    tuples.push(t);
                    spans.push(span);
                }
                Err(Reported) => {
                    failed = true;
                    // Skip to the end of the broken tuple.
                    loop {
                        match self.peek_kind() {
                            TokenKind::Eof | TokenKind::RBrace => break,
                            TokenKind::RParen => {
                                self.bump();
                                break;
                            }
                            _ => {
                                self.bump();
                            }
                        }
                    }
                }
            }
        }
        self.expect(TokenKind::RBrace)?;
        if failed {
            return Err(Reported);
        }
        Ok((tuples, spans))
    }

    fn tuple(&mut self) -> PResult<(SyncTuple, SourceSpan)> {
        let open = self.expect(TokenKind::LParen)?;
        let mut labels = vec![self.unsigned::<u32>("rule label")?.0];
        while matches!(self.peek_kind(), TokenKind::Comma) {
            self.bump();
            labels.push(self.unsigned::<u32>("rule label")?.0);
        }
        let close = self.expect(TokenKind::RParen)?;
        let span = SourceSpan { length: close.offset + close.length - open.offset, ..open };
        Ok((SyncTuple(labels), span))
    }
}

enum Attr<'a> {
    Dash,
    Ident(&'a str),
    Int(i64),
}
