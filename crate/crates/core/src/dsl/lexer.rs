use super::{ParseDiagnostic, SourceSpan};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum TokenKind {
    Ident(String),
    /// Unsigned decimal literal; `-` prefixed literals come through as negative.
    Int(i64),
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Colon,
    Eq,
    Plus,
    Arrow,
    Dash,
    /// `%empty`, the empty right-hand part.
    Empty,
    Eof,
}

impl TokenKind {
    pub(crate) fn describe(&self) -> String {
        match self {
            TokenKind::Ident(s) => format!("identifier `{s}`"),
            TokenKind::Int(i) => format!("integer `{i}`"),
            TokenKind::LBrace => "'{'".into(),
            TokenKind::RBrace => "'}'".into(),
            TokenKind::LParen => "'('".into(),
            TokenKind::RParen => "')'".into(),
            TokenKind::LBracket => "'['".into(),
            TokenKind::RBracket => "']'".into(),
            TokenKind::Comma => "','".into(),
            TokenKind::Semi => "';'".into(),
            TokenKind::Colon => "':'".into(),
            TokenKind::Eq => "'='".into(),
            TokenKind::Plus => "'+'".into(),
            TokenKind::Arrow => "'->'".into(),
            TokenKind::Dash => "'-'".into(),
            TokenKind::Empty => "'%empty'".into(),
            TokenKind::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Token {
    pub kind: TokenKind,
    pub span: SourceSpan,
}

struct Cursor<'a> {
    text: &'a str,
    offset: usize,
    line: usize,
    column: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<char> {
        self.text[self.offset..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.offset += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn mark(&self) -> (usize, usize, usize) {
        (self.offset, self.line, self.column)
    }

    fn span_from(&self, mark: (usize, usize, usize)) -> SourceSpan {
        SourceSpan { offset: mark.0, line: mark.1, column: mark.2, length: self.offset - mark.0 }
    }
}

/// Splits `text` into tokens. Bad characters are reported and skipped.
pub(crate) fn tokenize(text: &str) -> (Vec<Token>, Vec<ParseDiagnostic>) {
    let mut cur = Cursor { text, offset: 0, line: 1, column: 1 };
    let mut tokens = Vec::new();
    let mut diags = Vec::new();

    while let Some(c) = cur.peek() {
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c == '#' {
            while let Some(c) = cur.peek() {
                if c == '\n' {
                    break;
                }
                cur.bump();
            }
            continue;
        }
        let mark = cur.mark();
        let kind = match c {
            '{' | '}' | '(' | ')' | '[' | ']' | ',' | ';' | ':' | '=' | '+' => {
                cur.bump();
                match c {
                    '{' => TokenKind::LBrace,
                    '}' => TokenKind::RBrace,
                    '(' => TokenKind::LParen,
                    ')' => TokenKind::RParen,
                    '[' => TokenKind::LBracket,
                    ']' => TokenKind::RBracket,
                    ',' => TokenKind::Comma,
                    ';' => TokenKind::Semi,
                    ':' => TokenKind::Colon,
                    '=' => TokenKind::Eq,
                    _ => TokenKind::Plus,
                }
            }
            '-' => {
                cur.bump();
                match cur.peek() {
                    Some('>') => {
                        cur.bump();
                        TokenKind::Arrow
                    }
                    Some(d) if d.is_ascii_digit() => match lex_int(&mut cur, mark.0 + 1) {
                        Some(v) => TokenKind::Int(-v),
                        None => {
                            diags.push(ParseDiagnostic::error(cur.span_from(mark), "integer literal out of range"));
                            continue;
                        }
                    },
                    _ => TokenKind::Dash,
                }
            }
            '%' => {
                cur.bump();
                let start = cur.offset;
                while cur.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_') {
                    cur.bump();
                }
                if &text[start..cur.offset] == "empty" {
                    TokenKind::Empty
                } else {
                    diags.push(ParseDiagnostic::error(cur.span_from(mark), "expected '%empty'"));
                    continue;
                }
            }
            d if d.is_ascii_digit() => match lex_int(&mut cur, mark.0) {
                Some(v) => TokenKind::Int(v),
                None => {
                    diags.push(ParseDiagnostic::error(cur.span_from(mark), "integer literal out of range"));
                    continue;
                }
            },
            a if a.is_ascii_alphabetic() || a == '_' => {
                while cur.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_') {
                    cur.bump();
                }
                TokenKind::Ident(text[mark.0..cur.offset].to_string())
            }
            other => {
                cur.bump();
                // Swallow the rest of a run of unexpected characters as one fault.
                while cur
                    .peek()
                    .is_some_and(|c| !c.is_ascii() && !c.is_whitespace())
                {
                    cur.bump();
                }
                diags.push(ParseDiagnostic::error(
                    cur.span_from(mark),
                    format!("unexpected character {other:?}"),
                ));
                continue;
            }
        };
        tokens.push(Token { kind, span: cur.span_from(mark) });
    }
    let end = cur.mark();
    tokens.push(Token { kind: TokenKind::Eof, span: cur.span_from(end) });
    (tokens, diags)
}

fn lex_int(cur: &mut Cursor<'_>, digits_start: usize) -> Option<i64> {
    while cur.peek().is_some_and(|c| c.is_ascii_digit()) {
        cur.bump();
    }
    // An identifier glued to digits (`12ab`) is split; the parser reports it.
    cur.text[digits_start..cur.offset].parse().ok()
}
