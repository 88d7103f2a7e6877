//! Line-oriented textual realisation language for processes (`.ipa` files).
//!
//! ```text
//! program    := (line NEWLINE)*
//! line       := comment | statement | empty
//! comment    := '#' any-text
//! statement  := IDENT '(' [arg (',' arg)*] ')'
//! arg        := element | symbol | image | number
//! element    := '@' IDENT '.' IDENT
//! symbol     := '"' escaped-chars '"'
//! image      := 'img(' '"' path '"' ')'
//! number     := '-'? digits ('.' digits)?
//! ```
//!
//! Numbers are kept as symbol arguments holding the literal text. Whitespace
//! around punctuation is ignored. Both LF and CRLF line endings are accepted;
//! [`serialize`] always emits LF.

use std::fmt;
use std::path::PathBuf;

use crate::ir::{is_action_name, is_ident_char, quote, Argument, ElementRef, ImageRef, Process, Statement};

/// Parsing stops collecting diagnostics after this many.
pub const MAX_DIAGNOSTICS: usize = 100;

pub const FILE_EXTENSION: &str = "ipa";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceText {
    pub text: String,
    pub origin: Option<PathBuf>,
}

impl SourceText {
    pub fn new(text: impl Into<String>) -> Self {
        Self {
            text: text.into(),
            origin: None,
        }
    }

    pub fn with_origin(mut self, origin: impl Into<PathBuf>) -> Self {
        self.origin = Some(origin.into());
        self
    }

    pub fn read(path: impl Into<PathBuf>) -> std::io::Result<Self> {
        let path = path.into();
        let text = std::fs::read_to_string(&path)?;
        Ok(Self::new(text).with_origin(path))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

/// A positioned parse message. Line and column are 1-based; the column counts
/// characters, not bytes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub severity: Severity,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}: {}", self.line, self.column, self.severity, self.message)
    }
}

/// Parse program text. On failure every line's first error is reported, up
/// to [`MAX_DIAGNOSTICS`].
pub fn parse(src: &str) -> Result<Process, Vec<Diagnostic>> {
    let mut statements = Vec::new();
    let mut diagnostics = Vec::new();
    for (idx, raw) in src.split('\n').enumerate() {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        match LineParser::new(line, idx + 1).parse() {
            Ok(Some(stmt)) => statements.push(stmt),
            Ok(None) => {}
            Err(d) => {
                diagnostics.push(d);
                if diagnostics.len() >= MAX_DIAGNOSTICS {
                    break;
                }
            }
        }
    }
    if diagnostics.is_empty() {
        Ok(Process::new(statements))
    } else {
        Err(diagnostics)
    }
}

pub fn parse_source(src: &SourceText) -> Result<Process, Vec<Diagnostic>> {
    parse(&src.text)
}

/// Render one statement per line in canonical form.
pub fn serialize(process: &Process) -> String {
    let mut out = String::new();
    for stmt in &process.statements {
        out.push_str(&render_statement(stmt));
        out.push('\n');
    }
    out
}

pub fn render_statement(stmt: &Statement) -> String {
    let args: Vec<String> = stmt
        .args
        .iter()
        .map(|arg| match arg {
            Argument::Element(e) => e.to_string(),
            Argument::Symbol(s) => quote(s),
            Argument::Image(img) => format!("img({})", quote(img.path())),
        })
        .collect();
    format!("{}({})", stmt.action(), args.join(", "))
}

struct LineParser {
    chars: Vec<char>,
    pos: usize,
    line: usize,
}

struct Failure {
    pos: usize,
    message: String,
}

type PResult<T> = Result<T, Failure>;

impl LineParser {
    fn new(line: &str, line_no: usize) -> Self {
        Self {
            chars: line.chars().collect(),
            pos: 0,
            line: line_no,
        }
    }

    fn parse(mut self) -> Result<Option<Statement>, Diagnostic> {
        self.skip_ws();
        match self.peek() {
            None | Some('#') => return Ok(None),
            _ => {}
        }
        self.statement().map(Some).map_err(|f| {
            let mut message = f.message;
            if f.pos >= self.chars.len() {
                message.push_str(" (unbalanced parenthesis: line ends before ')')");
            }
            Diagnostic {
                line: self.line,
                column: f.pos.min(self.chars.len().saturating_sub(1)) + 1,
                message,
                severity: Severity::Error,
            }
        })
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn fail<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(Failure {
            pos: self.pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> String {
        let start = self.pos;
        while self.peek().is_some_and(is_ident_char) {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn describe_here(&self) -> String {
        match self.peek() {
            Some(c) => format!("'{c}'"),
            None => "end of line".to_string(),
        }
    }

    fn statement(&mut self) -> PResult<Statement> {
        let start = self.pos;
        let action = self.ident();
        if action.is_empty() {
            return self.fail(format!("expected action name, found {}", self.describe_here()));
        }
        if !is_action_name(&action) {
            self.pos = start;
            return self.fail(format!("invalid action name '{action}'"));
        }
        self.skip_ws();
        if !self.eat('(') {
            return self.fail(format!("expected '(' after action name, found {}", self.describe_here()));
        }
        let mut args = Vec::new();
        self.skip_ws();
        if !self.eat(')') {
            loop {
                self.skip_ws();
                args.push(self.argument()?);
                self.skip_ws();
                if self.eat(',') {
                    continue;
                }
                if self.eat(')') {
                    break;
                }
                if self.peek().is_none() {
                    return self.fail("expected ',' or ')'");
                }
                return self.fail(format!("expected ',' or ')', found {}", self.describe_here()));
            }
        }
        self.skip_ws();
        if self.peek().is_some() {
            return self.fail(format!("unexpected trailing input {}", self.describe_here()));
        }
        // Lexing already restricts the name to the action alphabet.
        Ok(Statement::new(action, args).expect("validated action name"))
    }

    fn argument(&mut self) -> PResult<Argument> {
        match self.peek() {
            Some('@') => self.element(),
            Some('"') => self.string().map(Argument::Symbol),
            Some(c) if c.is_ascii_digit() || c == '-' => self.number(),
            Some('i') if self.lookahead_image() => self.image(),
            Some(',') | Some(')') => self.fail("expected argument"),
            Some(c) => self.fail(format!("unknown token '{c}'")),
            None => self.fail("expected argument"),
        }
    }

    fn lookahead_image(&self) -> bool {
        let rest = &self.chars[self.pos..];
        if !rest.starts_with(&['i', 'm', 'g']) {
            return false;
        }
        rest[3..].iter().find(|c| !c.is_whitespace()) == Some(&'(')
    }

    fn element(&mut self) -> PResult<Argument> {
        self.pos += 1; // '@'
        let interface = self.ident();
        if interface.is_empty() {
            return self.fail("malformed element reference: expected interface id after '@'");
        }
        if !self.eat('.') {
            return self.fail(format!(
                "malformed element reference: expected '.' after '@{interface}', found {}",
                self.describe_here()
            ));
        }
        let element = self.ident();
        if element.is_empty() {
            return self.fail(format!(
                "malformed element reference: expected element id after '@{interface}.'"
            ));
        }
        Ok(Argument::Element(
            ElementRef::new(interface, element).expect("lexed identifiers"),
        ))
    }

    fn string(&mut self) -> PResult<String> {
        let open = self.pos;
        self.pos += 1;
        let mut out = String::new();
        loop {
            match self.peek() {
                None => {
                    return Err(Failure {
                        pos: self.chars.len().max(open + 1),
                        message: format!("unterminated string literal starting at column {}", open + 1),
                    })
                }
                Some('"') => {
                    self.pos += 1;
                    return Ok(out);
                }
                Some('\\') => {
                    self.pos += 1;
                    let c = match self.peek() {
                        Some('\\') => '\\',
                        Some('"') => '"',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('t') => '\t',
                        Some(c) => return self.fail(format!("unknown escape sequence '\\{c}'")),
                        None => {
                            return self.fail(format!(
                                "unterminated string literal starting at column {}",
                                open + 1
                            ))
                        }
                    };
                    out.push(c);
                    self.pos += 1;
                }
                Some(c) => {
                    out.push(c);
                    self.pos += 1;
                }
            }
        }
    }

    fn image(&mut self) -> PResult<Argument> {
        self.pos += 3;
        self.skip_ws();
        self.eat('(');
        self.skip_ws();
        if self.peek() != Some('"') {
            return self.fail("malformed image argument: expected quoted path after 'img('");
        }
        let path = self.string()?;
        self.skip_ws();
        if !self.eat(')') {
            return self.fail("malformed image argument: expected ')' after path");
        }
        Ok(Argument::Image(ImageRef::new(path)))
    }

    fn number(&mut self) -> PResult<Argument> {
        let start = self.pos;
        self.eat('-');
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.peek().is_some_and(|c| c.is_ascii_digit()) {
                p.pos += 1;
            }
            p.pos - s
        };
        if digits(self) == 0 {
            return self.fail("malformed number: expected digit");
        }
        if self.eat('.') && digits(self) == 0 {
            return self.fail("malformed number: expected digit after '.'");
        }
        if self.peek().is_some_and(|c| c.is_alphanumeric() || c == '_') {
            return self.fail(format!("malformed number: unexpected {}", self.describe_here()));
        }
        Ok(Argument::Symbol(self.chars[start..self.pos].iter().collect()))
    }
}
