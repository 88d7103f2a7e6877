//! In-memory representation of processes: interface elements, arguments,
//! statements, processes and program corpora.
//!
//! Element and image references carry optional realisation data (bounding
//! boxes, descriptors, pixels). Equality and hashing ignore that data: two
//! element references are the same argument when they name the same
//! interface and element, and two images are the same argument when they
//! share a path.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IrError {
    #[error("invalid identifier {0:?}: expected one or more of [A-Za-z0-9_-]")]
    InvalidIdentifier(String),
    #[error("invalid action name {0:?}: expected [A-Za-z_][A-Za-z0-9_-]*")]
    InvalidAction(String),
    #[error("invalid bounding box ({x0},{y0})-({x1},{y1}): corners out of order")]
    InvalidBoundingBox { x0: u32, y0: u32, x1: u32, y1: u32 },
    #[error("invalid pixel matrix: {0}")]
    InvalidPixels(String),
    #[error("program in corpus has no id")]
    MissingProgramId,
    #[error("duplicate program id {0:?} in corpus")]
    DuplicateProgramId(String),
}

/// Characters allowed in interface and element identifiers.
pub fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '-'
}

pub fn is_identifier(s: &str) -> bool {
    !s.is_empty() && s.chars().all(is_ident_char)
}

/// Action names additionally may not start with a digit or a dash, so that
/// they never lex as numbers.
pub fn is_action_name(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => chars.all(is_ident_char),
        _ => false,
    }
}

/// Axis-aligned pixel rectangle `(x0, y0)`–`(x1, y1)` with `x0 <= x1` and
/// `y0 <= y1`. Zero-area boxes are allowed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[u32; 4]", into = "[u32; 4]")]
pub struct BoundingBox {
    x0: u32,
    y0: u32,
    x1: u32,
    y1: u32,
}

impl BoundingBox {
    pub fn new(x0: u32, y0: u32, x1: u32, y1: u32) -> Result<Self, IrError> {
        if x0 > x1 || y0 > y1 {
            return Err(IrError::InvalidBoundingBox { x0, y0, x1, y1 });
        }
        Ok(Self { x0, y0, x1, y1 })
    }

    pub fn x0(&self) -> u32 {
        self.x0
    }
    pub fn y0(&self) -> u32 {
        self.y0
    }
    pub fn x1(&self) -> u32 {
        self.x1
    }
    pub fn y1(&self) -> u32 {
        self.y1
    }

    pub fn width(&self) -> u64 {
        u64::from(self.x1 - self.x0)
    }

    pub fn height(&self) -> u64 {
        u64::from(self.y1 - self.y0)
    }

    pub fn area(&self) -> u64 {
        self.width() * self.height()
    }

    /// Overlapping rectangle, if the boxes share any point.
    pub fn intersection(&self, other: &BoundingBox) -> Option<BoundingBox> {
        let x0 = self.x0.max(other.x0);
        let y0 = self.y0.max(other.y0);
        let x1 = self.x1.min(other.x1);
        let y1 = self.y1.min(other.y1);
        (x0 <= x1 && y0 <= y1).then_some(BoundingBox { x0, y0, x1, y1 })
    }
}

impl TryFrom<[u32; 4]> for BoundingBox {
    type Error = IrError;

    fn try_from([x0, y0, x1, y1]: [u32; 4]) -> Result<Self, Self::Error> {
        BoundingBox::new(x0, y0, x1, y1)
    }
}

impl From<BoundingBox> for [u32; 4] {
    fn from(b: BoundingBox) -> Self {
        [b.x0, b.y0, b.x1, b.y1]
    }
}

/// Reference to element `element_id` of interface `interface_id`.
#[derive(Debug, Clone)]
pub struct ElementRef {
    interface_id: String,
    element_id: String,
    pub bounding_box: Option<BoundingBox>,
    pub descriptor: Option<String>,
}

impl ElementRef {
    pub fn new(interface_id: impl Into<String>, element_id: impl Into<String>) -> Result<Self, IrError> {
        let interface_id = interface_id.into();
        let element_id = element_id.into();
        for id in [&interface_id, &element_id] {
            if !is_identifier(id) {
                return Err(IrError::InvalidIdentifier(id.clone()));
            }
        }
        Ok(Self {
            interface_id,
            element_id,
            bounding_box: None,
            descriptor: None,
        })
    }

    pub fn with_bounding_box(mut self, bb: BoundingBox) -> Self {
        self.bounding_box = Some(bb);
        self
    }

    pub fn with_descriptor(mut self, descriptor: impl Into<String>) -> Self {
        self.descriptor = Some(descriptor.into());
        self
    }

    pub fn interface_id(&self) -> &str {
        &self.interface_id
    }

    pub fn element_id(&self) -> &str {
        &self.element_id
    }

    pub fn is_positionally_realised(&self) -> bool {
        self.bounding_box.is_some()
    }
}

impl PartialEq for ElementRef {
    fn eq(&self, other: &Self) -> bool {
        self.interface_id == other.interface_id && self.element_id == other.element_id
    }
}

impl Eq for ElementRef {}

impl Hash for ElementRef {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.interface_id.hash(state);
        self.element_id.hash(state);
    }
}

impl fmt::Display for ElementRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "@{}.{}", self.interface_id, self.element_id)
    }
}

/// Row-major grayscale intensities in `[0, 255]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl GrayMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, IrError> {
        if rows == 0 || cols == 0 {
            return Err(IrError::InvalidPixels(format!("empty {rows}x{cols} matrix")));
        }
        if data.len() != rows * cols {
            return Err(IrError::InvalidPixels(format!(
                "{} values for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(v) = data.iter().find(|v| !(0.0..=255.0).contains(*v)) {
            return Err(IrError::InvalidPixels(format!("intensity {v} outside [0, 255]")));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self, IrError> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(IrError::InvalidPixels("ragged rows".into()));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn filled(rows: usize, cols: usize, value: f64) -> Result<Self, IrError> {
        Self::new(rows, cols, vec![value; rows * cols])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }
}

/// Image argument, identified by its path.
#[derive(Debug, Clone)]
pub struct ImageRef {
    path: String,
    pub pixels: Option<GrayMatrix>,
    /// Location of the image within a reference screenshot.
    pub bounding_box: Option<BoundingBox>,
}

impl ImageRef {
    pub fn new(path: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            pixels: None,
            bounding_box: None,
        }
    }

    pub fn with_pixels(mut self, pixels: GrayMatrix) -> Self {
        self.pixels = Some(pixels);
        self
    }

    pub fn with_bounding_box(mut self, bb: BoundingBox) -> Self {
        self.bounding_box = Some(bb);
        self
    }

    pub fn path(&self) -> &str {
        &self.path
    }
}

impl PartialEq for ImageRef {
    fn eq(&self, other: &Self) -> bool {
        self.path == other.path
    }
}

impl Eq for ImageRef {}

impl Hash for ImageRef {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.path.hash(state);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArgumentKind {
    Element,
    Symbol,
    Image,
}

impl fmt::Display for ArgumentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ArgumentKind::Element => "element",
            ArgumentKind::Symbol => "symbol",
            ArgumentKind::Image => "image",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Argument {
    Element(ElementRef),
    Symbol(String),
    Image(ImageRef),
}

impl Argument {
    pub fn element(interface_id: &str, element_id: &str) -> Result<Self, IrError> {
        ElementRef::new(interface_id, element_id).map(Argument::Element)
    }

    pub fn symbol(value: impl Into<String>) -> Self {
        Argument::Symbol(value.into())
    }

    pub fn image(path: impl Into<String>) -> Self {
        Argument::Image(ImageRef::new(path))
    }

    pub fn kind(&self) -> ArgumentKind {
        match self {
            Argument::Element(_) => ArgumentKind::Element,
            Argument::Symbol(_) => ArgumentKind::Symbol,
            Argument::Image(_) => ArgumentKind::Image,
        }
    }
}

/// Quote `value` with backslash escapes for `\`, `"` and control whitespace.
pub fn quote(value: &str) -> String {
    let mut out = String::with_capacity(value.len() + 2);
    out.push('"');
    for c in value.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// One action application `f(arg_1, ..., arg_m)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Statement {
    action: String,
    pub args: Vec<Argument>,
}

impl Statement {
    pub fn new(action: impl Into<String>, args: Vec<Argument>) -> Result<Self, IrError> {
        let action = action.into();
        if !is_action_name(&action) {
            return Err(IrError::InvalidAction(action));
        }
        Ok(Self { action, args })
    }

    pub fn action(&self) -> &str {
        &self.action
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    /// Number of scoring units: the predicate plus one per argument.
    pub fn units(&self) -> usize {
        1 + self.args.len()
    }

    /// Deterministic rendering used as the statement's identity.
    ///
    /// Elements render as `@I.e`, symbols as quoted strings, images as
    /// `img:` followed by the quoted path.
    pub fn canonical_key(&self) -> String {
        let mut key = String::with_capacity(self.action.len() + 2 + 16 * self.args.len());
        key.push_str(&self.action);
        key.push('(');
        for (i, arg) in self.args.iter().enumerate() {
            if i > 0 {
                key.push(',');
            }
            match arg {
                Argument::Element(e) => key.push_str(&e.to_string()),
                Argument::Symbol(s) => key.push_str(&quote(s)),
                Argument::Image(img) => {
                    key.push_str("img:");
                    key.push_str(&quote(img.path()));
                }
            }
        }
        key.push(')');
        key
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical_key())
    }
}

/// Free-function form of [`Statement::canonical_key`].
pub fn canonical_key(stmt: &Statement) -> String {
    stmt.canonical_key()
}

/// An ordered, straight-line sequence of statements.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Process {
    pub id: Option<String>,
    pub statements: Vec<Statement>,
}

impl Process {
    pub fn new(statements: Vec<Statement>) -> Self {
        Self { id: None, statements }
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = Some(id.into());
        self
    }

    pub fn len(&self) -> usize {
        self.statements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.statements.is_empty()
    }

    pub fn units(&self) -> usize {
        self.statements.iter().map(Statement::units).sum()
    }
}

/// Programs keyed by unique id, in insertion order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProgramCorpus {
    programs: Vec<Process>,
}

impl ProgramCorpus {
    pub fn new(programs: Vec<Process>) -> Result<Self, IrError> {
        let mut seen = BTreeSet::new();
        for p in &programs {
            let id = p.id.as_deref().ok_or(IrError::MissingProgramId)?;
            if !seen.insert(id) {
                return Err(IrError::DuplicateProgramId(id.to_string()));
            }
        }
        Ok(Self { programs })
    }

    pub fn programs(&self) -> &[Process] {
        &self.programs
    }

    pub fn len(&self) -> usize {
        self.programs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.programs.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Process> {
        self.programs.iter().find(|p| p.id.as_deref() == Some(id))
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.programs.iter().filter_map(|p| p.id.as_deref())
    }
}

/// Compact symbol assigned to a distinct statement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Symbol(pub u32);

/// Bijection between canonical statement keys and symbols. Symbols are
/// assigned in first-seen order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SymbolEncoding {
    keys: Vec<String>,
    index: HashMap<String, Symbol>,
}

impl SymbolEncoding {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, stmt: &Statement) -> Symbol {
        let key = stmt.canonical_key();
        if let Some(&sym) = self.index.get(&key) {
            return sym;
        }
        let sym = Symbol(self.keys.len() as u32);
        self.keys.push(key.clone());
        self.index.insert(key, sym);
        sym
    }

    pub fn encode(&mut self, process: &Process) -> Vec<Symbol> {
        process.statements.iter().map(|s| self.intern(s)).collect()
    }

    pub fn symbol_of(&self, key: &str) -> Option<Symbol> {
        self.index.get(key).copied()
    }

    pub fn key_of(&self, sym: Symbol) -> Option<&str> {
        self.keys.get(sym.0 as usize).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }
}

/// Result of encoding a candidate and a gold corpus with one shared table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedCorpora {
    pub encoding: SymbolEncoding,
    pub candidate: Vec<Vec<Symbol>>,
    pub gold: Vec<Vec<Symbol>>,
}

/// Encode both corpora over one symbol table built from the union of their
/// statements. Sequences are returned in corpus order.
pub fn encode_corpora(candidate: &ProgramCorpus, gold: &ProgramCorpus) -> EncodedCorpora {
    encode_processes(candidate.programs(), gold.programs())
}

pub(crate) fn encode_processes(candidate: &[Process], gold: &[Process]) -> EncodedCorpora {
    let mut encoding = SymbolEncoding::new();
    let candidate = candidate.iter().map(|p| encoding.encode(p)).collect();
    let gold = gold.iter().map(|p| encoding.encode(p)).collect();
    EncodedCorpora {
        encoding,
        candidate,
        gold,
    }
}
