//! Interpreted environments: interfaces and their elements, action
//! signatures, the value domain, and an optional descriptive vocabulary.
//!
//! [`validate_process`] checks a process against an environment and
//! [`replay`] re-enacts a valid process against a mock state, where the state
//! after each step is a digest of the statements applied so far.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::ir::{is_action_name, is_identifier, Argument, ArgumentKind, BoundingBox, ElementRef, Process, Statement};

#[derive(Debug, Error)]
pub enum EnvError {
    #[error("invalid identifier {0:?}")]
    InvalidIdentifier(String),
    #[error("invalid action name {0:?}")]
    InvalidAction(String),
    #[error("element {interface}.{element} declared twice")]
    DuplicateElement { interface: String, element: String },
    #[error("action {0:?} declared twice")]
    DuplicateAction(String),
    #[error("descriptor {0:?} must consist of lowercase letters and spaces")]
    InvalidDescriptor(String),
    #[error("descriptor {0:?} is not in the declared vocabulary")]
    UndeclaredDescriptor(String),
    #[error("environment file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("environment file: {0}")]
    Io(#[from] std::io::Error),
}

/// Declared kind of one action parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArgKind {
    Element,
    Symbol,
    Image,
    Any,
}

impl ArgKind {
    pub fn accepts(self, kind: ArgumentKind) -> bool {
        matches!(
            (self, kind),
            (ArgKind::Any, _)
                | (ArgKind::Element, ArgumentKind::Element)
                | (ArgKind::Symbol, ArgumentKind::Symbol)
                | (ArgKind::Image, ArgumentKind::Image)
        )
    }
}

impl fmt::Display for ArgKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ArgKind::Element => "element",
            ArgKind::Symbol => "symbol",
            ArgKind::Image => "image",
            ArgKind::Any => "any",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionSignature {
    pub name: String,
    pub arg_kinds: Vec<ArgKind>,
    pub description: Option<String>,
}

impl ActionSignature {
    pub fn new(name: impl Into<String>, arg_kinds: impl Into<Vec<ArgKind>>) -> Self {
        Self {
            name: name.into(),
            arg_kinds: arg_kinds.into(),
            description: None,
        }
    }

    pub fn arity(&self) -> usize {
        self.arg_kinds.len()
    }
}

/// Which strings are admissible symbol arguments.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueDomain {
    #[default]
    Any,
    /// Strings over `a`–`z` and space, including the empty string.
    LowercaseSpace,
}

impl ValueDomain {
    pub fn contains(self, value: &str) -> bool {
        match self {
            ValueDomain::Any => true,
            ValueDomain::LowercaseSpace => is_lowercase_space(value),
        }
    }
}

impl fmt::Display for ValueDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ValueDomain::Any => "any",
            ValueDomain::LowercaseSpace => "lowercase_space",
        })
    }
}

fn is_lowercase_space(s: &str) -> bool {
    s.chars().all(|c| c.is_ascii_lowercase() || c == ' ')
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementDecl {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bbox: Option<BoundingBox>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub descriptor: Option<String>,
}

impl ElementDecl {
    pub fn described(descriptor: impl Into<String>) -> Self {
        Self {
            bbox: None,
            descriptor: Some(descriptor.into()),
        }
    }
}

/// Argument to [`Environment::type_of`].
#[derive(Debug, Clone, Copy)]
pub enum Subject<'a> {
    Element(&'a ElementRef),
    Value(&'a str),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Environment {
    interfaces: BTreeMap<String, BTreeMap<String, ElementDecl>>,
    signatures: BTreeMap<String, ActionSignature>,
    value_domain: ValueDomain,
    vocabulary: Option<BTreeSet<String>>,
    value_descriptors: BTreeMap<String, String>,
}

impl Environment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_interface(&mut self, interface: &str) -> Result<(), EnvError> {
        if !is_identifier(interface) {
            return Err(EnvError::InvalidIdentifier(interface.to_string()));
        }
        self.interfaces.entry(interface.to_string()).or_default();
        Ok(())
    }

    pub fn add_element(&mut self, interface: &str, element: &str, decl: ElementDecl) -> Result<(), EnvError> {
        if !is_identifier(element) {
            return Err(EnvError::InvalidIdentifier(element.to_string()));
        }
        if let Some(d) = &decl.descriptor {
            self.check_descriptor(d)?;
        }
        self.add_interface(interface)?;
        let elements = self.interfaces.get_mut(interface).expect("interface just added");
        if elements.contains_key(element) {
            return Err(EnvError::DuplicateElement {
                interface: interface.to_string(),
                element: element.to_string(),
            });
        }
        elements.insert(element.to_string(), decl);
        Ok(())
    }

    pub fn add_action(&mut self, signature: ActionSignature) -> Result<(), EnvError> {
        if !is_action_name(&signature.name) {
            return Err(EnvError::InvalidAction(signature.name));
        }
        if self.signatures.contains_key(&signature.name) {
            return Err(EnvError::DuplicateAction(signature.name));
        }
        self.signatures.insert(signature.name.clone(), signature);
        Ok(())
    }

    pub fn set_value_domain(&mut self, domain: ValueDomain) {
        self.value_domain = domain;
    }

    /// Declare the vocabulary explicitly. Descriptors already in use must be
    /// members.
    pub fn declare_vocabulary<I, S>(&mut self, terms: I) -> Result<(), EnvError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let terms: BTreeSet<String> = terms.into_iter().map(Into::into).collect();
        if let Some(bad) = terms.iter().find(|t| !is_lowercase_space(t)) {
            return Err(EnvError::InvalidDescriptor(bad.clone()));
        }
        let used = self.descriptors_in_use();
        if let Some(missing) = used.into_iter().find(|d| !terms.contains(*d)) {
            return Err(EnvError::UndeclaredDescriptor(missing.to_string()));
        }
        self.vocabulary = Some(terms);
        Ok(())
    }

    pub fn set_value_descriptor(&mut self, value: &str, descriptor: &str) -> Result<(), EnvError> {
        self.check_descriptor(descriptor)?;
        self.value_descriptors.insert(value.to_string(), descriptor.to_string());
        Ok(())
    }

    fn check_descriptor(&self, descriptor: &str) -> Result<(), EnvError> {
        if !is_lowercase_space(descriptor) {
            return Err(EnvError::InvalidDescriptor(descriptor.to_string()));
        }
        if let Some(vocab) = &self.vocabulary {
            if !vocab.contains(descriptor) {
                return Err(EnvError::UndeclaredDescriptor(descriptor.to_string()));
            }
        }
        Ok(())
    }

    fn descriptors_in_use(&self) -> BTreeSet<&str> {
        self.interfaces
            .values()
            .flat_map(|els| els.values())
            .filter_map(|d| d.descriptor.as_deref())
            .chain(self.value_descriptors.values().map(String::as_str))
            .collect()
    }

    /// The vocabulary set: the declared one, or else every descriptor in use.
    /// `None` when the environment carries no descriptive typing at all.
    pub fn vocabulary(&self) -> Option<BTreeSet<String>> {
        match &self.vocabulary {
            Some(v) => Some(v.clone()),
            None => {
                let used = self.descriptors_in_use();
                (!used.is_empty()).then(|| used.into_iter().map(str::to_string).collect())
            }
        }
    }

    pub fn interfaces(&self) -> impl Iterator<Item = &str> {
        self.interfaces.keys().map(String::as_str)
    }

    pub fn elements(&self, interface: &str) -> impl Iterator<Item = (&str, &ElementDecl)> {
        self.interfaces
            .get(interface)
            .into_iter()
            .flat_map(|els| els.iter().map(|(k, v)| (k.as_str(), v)))
    }

    pub fn element(&self, interface: &str, element: &str) -> Option<&ElementDecl> {
        self.interfaces.get(interface)?.get(element)
    }

    pub fn signature(&self, action: &str) -> Option<&ActionSignature> {
        self.signatures.get(action)
    }

    pub fn signatures(&self) -> impl Iterator<Item = &ActionSignature> {
        self.signatures.values()
    }

    pub fn value_domain(&self) -> ValueDomain {
        self.value_domain
    }

    /// Descriptor assigned to an element or value, if any.
    pub fn type_of(&self, subject: Subject<'_>) -> Option<&str> {
        match subject {
            Subject::Element(e) => self.element(e.interface_id(), e.element_id())?.descriptor.as_deref(),
            Subject::Value(v) => self.value_descriptors.get(v).map(String::as_str),
        }
    }

    /// Copy realisation data (bounding box, descriptor) from the declaration
    /// onto every element argument of `process`.
    pub fn realise(&self, process: &mut Process) {
        for stmt in &mut process.statements {
            for arg in &mut stmt.args {
                if let Argument::Element(e) = arg {
                    if let Some(decl) = self.element(e.interface_id(), e.element_id()) {
                        e.bounding_box = decl.bbox;
                        e.descriptor = decl.descriptor.clone();
                    }
                }
            }
        }
    }

    pub fn from_json(text: &str) -> Result<Self, EnvError> {
        let file: EnvironmentFile = serde_json::from_str(text)?;
        file.try_into()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, EnvError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&EnvironmentFile::from(self)).expect("environment serializes");
        s.push('\n');
        s
    }
}

/// On-disk environment definition.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EnvironmentFile {
    interfaces: BTreeMap<String, BTreeMap<String, ElementDecl>>,
    actions: BTreeMap<String, Vec<ArgKind>>,
    #[serde(default)]
    value_domain: ValueDomain,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    vocabulary: Option<BTreeSet<String>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    value_descriptors: BTreeMap<String, String>,
}

impl TryFrom<EnvironmentFile> for Environment {
    type Error = EnvError;

    fn try_from(file: EnvironmentFile) -> Result<Self, EnvError> {
        let mut env = Environment::new();
        if let Some(vocab) = file.vocabulary {
            env.declare_vocabulary(vocab)?;
        }
        for (interface, elements) in file.interfaces {
            env.add_interface(&interface)?;
            for (element, decl) in elements {
                env.add_element(&interface, &element, decl)?;
            }
        }
        for (name, kinds) in file.actions {
            env.add_action(ActionSignature::new(name, kinds))?;
        }
        for (value, descriptor) in file.value_descriptors {
            env.set_value_descriptor(&value, &descriptor)?;
        }
        env.set_value_domain(file.value_domain);
        Ok(env)
    }
}

impl From<&Environment> for EnvironmentFile {
    fn from(env: &Environment) -> Self {
        Self {
            interfaces: env.interfaces.clone(),
            actions: env
                .signatures
                .iter()
                .map(|(k, v)| (k.clone(), v.arg_kinds.clone()))
                .collect(),
            value_domain: env.value_domain,
            vocabulary: env.vocabulary.clone(),
            value_descriptors: env.value_descriptors.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    UnknownAction {
        statement: usize,
        action: String,
    },
    ArityMismatch {
        statement: usize,
        action: String,
        found: usize,
        expected: usize,
    },
    UnknownInterface {
        statement: usize,
        argument: usize,
        interface: String,
    },
    UnknownElement {
        statement: usize,
        argument: usize,
        interface: String,
        element: String,
    },
    ValueOutsideDomain {
        statement: usize,
        argument: usize,
        value: String,
        domain: ValueDomain,
    },
    KindMismatch {
        statement: usize,
        argument: usize,
        expected: ArgKind,
        found: ArgumentKind,
    },
}

impl Violation {
    /// 0-based index of the offending statement.
    pub fn statement(&self) -> usize {
        match self {
            Violation::UnknownAction { statement, .. }
            | Violation::ArityMismatch { statement, .. }
            | Violation::UnknownInterface { statement, .. }
            | Violation::UnknownElement { statement, .. }
            | Violation::ValueOutsideDomain { statement, .. }
            | Violation::KindMismatch { statement, .. } => *statement,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnknownAction { statement, action } => {
                write!(f, "statement {}: unknown action '{action}'", statement + 1)
            }
            Violation::ArityMismatch {
                statement,
                action,
                found,
                expected,
            } => write!(
                f,
                "statement {}: arity mismatch {found} ≠ {expected} for '{action}'",
                statement + 1
            ),
            Violation::UnknownInterface {
                statement,
                argument,
                interface,
            } => write!(
                f,
                "statement {}, argument {}: unknown interface {interface}",
                statement + 1,
                argument + 1
            ),
            Violation::UnknownElement {
                statement,
                argument,
                interface,
                element,
            } => write!(
                f,
                "statement {}, argument {}: unknown element {interface}.{element}",
                statement + 1,
                argument + 1
            ),
            Violation::ValueOutsideDomain {
                statement,
                argument,
                value,
                domain,
            } => write!(
                f,
                "statement {}, argument {}: value {value:?} outside value domain {domain}",
                statement + 1,
                argument + 1
            ),
            Violation::KindMismatch {
                statement,
                argument,
                expected,
                found,
            } => write!(
                f,
                "statement {}, argument {}: expected {expected} argument, found {found}",
                statement + 1,
                argument + 1
            ),
        }
    }
}

/// Violations found by [`validate_process`]; empty means valid.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

pub fn validate_process(process: &Process, env: &Environment) -> ValidationReport {
    let mut violations = Vec::new();
    for (si, stmt) in process.statements.iter().enumerate() {
        let signature = env.signature(stmt.action());
        match signature {
            None => violations.push(Violation::UnknownAction {
                statement: si,
                action: stmt.action().to_string(),
            }),
            Some(sig) if sig.arity() != stmt.arity() => violations.push(Violation::ArityMismatch {
                statement: si,
                action: stmt.action().to_string(),
                found: stmt.arity(),
                expected: sig.arity(),
            }),
            Some(_) => {}
        }
        for (ai, arg) in stmt.args.iter().enumerate() {
            if let Some(expected) = signature.and_then(|s| s.arg_kinds.get(ai)) {
                if !expected.accepts(arg.kind()) {
                    violations.push(Violation::KindMismatch {
                        statement: si,
                        argument: ai,
                        expected: *expected,
                        found: arg.kind(),
                    });
                }
            }
            match arg {
                Argument::Element(e) => {
                    if !env.interfaces.contains_key(e.interface_id()) {
                        violations.push(Violation::UnknownInterface {
                            statement: si,
                            argument: ai,
                            interface: e.interface_id().to_string(),
                        });
                    } else if env.element(e.interface_id(), e.element_id()).is_none() {
                        violations.push(Violation::UnknownElement {
                            statement: si,
                            argument: ai,
                            interface: e.interface_id().to_string(),
                            element: e.element_id().to_string(),
                        });
                    }
                }
                Argument::Symbol(v) if !env.value_domain.contains(v) => {
                    violations.push(Violation::ValueOutsideDomain {
                        statement: si,
                        argument: ai,
                        value: v.clone(),
                        domain: env.value_domain,
                    })
                }
                Argument::Symbol(_) | Argument::Image(_) => {}
            }
        }
    }
    ValidationReport { violations }
}

/// Hex SHA-256 digest of the applied-statement log.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StateDigest(pub String);

impl fmt::Display for StateDigest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplayStep {
    pub statement: Statement,
    pub state: StateDigest,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReplayTrace {
    pub steps: Vec<ReplayStep>,
}

impl ReplayTrace {
    pub fn final_state(&self) -> Option<&StateDigest> {
        self.steps.last().map(|s| &s.state)
    }
}

/// Digest of a statement log: SHA-256 over each canonical key followed by a
/// newline.
pub fn log_digest<'a>(statements: impl IntoIterator<Item = &'a Statement>) -> StateDigest {
    let mut hasher = Sha256::new();
    for s in statements {
        hasher.update(s.canonical_key().as_bytes());
        hasher.update(b"\n");
    }
    StateDigest(hex::encode(hasher.finalize()))
}

/// Apply a valid process step by step. Invalid processes are rejected with
/// their validation report.
pub fn replay(process: &Process, env: &Environment) -> Result<ReplayTrace, ValidationReport> {
    let report = validate_process(process, env);
    if !report.is_valid() {
        return Err(report);
    }
    let mut hasher = Sha256::new();
    let steps = process
        .statements
        .iter()
        .map(|stmt| {
            hasher.update(stmt.canonical_key().as_bytes());
            hasher.update(b"\n");
            ReplayStep {
                statement: stmt.clone(),
                state: StateDigest(hex::encode(hasher.clone().finalize())),
            }
        })
        .collect();
    Ok(ReplayTrace { steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse;

    fn env() -> Environment {
        let mut env = Environment::new();
        env.add_element("I1", "submit", ElementDecl::described("button")).unwrap();
        env.add_element("I1", "box", ElementDecl::described("text field")).unwrap();
        env.add_action(ActionSignature::new("click", [ArgKind::Element])).unwrap();
        env.add_action(ActionSignature::new("type", [ArgKind::Element, ArgKind::Symbol]))
            .unwrap();
        env.add_action(ActionSignature::new("wait", [ArgKind::Any])).unwrap();
        env
    }

    fn report(src: &str) -> Vec<String> {
        validate_process(&parse(src).unwrap(), &env())
            .violations
            .iter()
            .map(ToString::to_string)
            .collect()
    }

    #[test]
    fn valid_process_has_empty_report() {
        assert!(report("click(@I1.submit)\ntype(@I1.box, \"hi\")\nwait(3)\nwait(img(\"x\"))").is_empty());
    }

    #[test]
    fn unknown_interface() {
        let r = report("click(@I9.ghost)");
        assert_eq!(r.len(), 1);
        assert!(r[0].contains("unknown interface I9"), "{r:?}");
    }

    #[test]
    fn unknown_element_and_action() {
        assert!(report("click(@I1.ghost)")[0].contains("unknown element I1.ghost"));
        assert!(report("drag(@I1.box)")[0].contains("unknown action 'drag'"));
    }

    #[test]
    fn arity_mismatch() {
        let r = report("type(@I1.box)");
        assert_eq!(r.len(), 1);
        assert!(r[0].contains("arity mismatch 1 ≠ 2"), "{r:?}");
    }

    #[test]
    fn kind_mismatch() {
        let r = report("click(\"submit\")");
        assert_eq!(r.len(), 1);
        assert!(r[0].contains("expected element argument, found symbol"), "{r:?}");
    }

    #[test]
    fn value_domain_preset() {
        let mut e = env();
        e.set_value_domain(ValueDomain::LowercaseSpace);
        let ok = parse("type(@I1.box, \"hello world\")").unwrap();
        let bad = parse("type(@I1.box, \"Hello!\")").unwrap();
        assert!(validate_process(&ok, &e).is_valid());
        let r = validate_process(&bad, &e);
        assert!(matches!(r.violations[..], [Violation::ValueOutsideDomain { .. }]));
    }

    #[test]
    fn type_of_element_and_value() {
        let mut e = env();
        let submit = ElementRef::new("I1", "submit").unwrap();
        assert_eq!(e.type_of(Subject::Element(&submit)), Some("button"));
        let ghost = ElementRef::new("I1", "ghost").unwrap();
        assert_eq!(e.type_of(Subject::Element(&ghost)), None);
        assert_eq!(e.type_of(Subject::Value("hello")), None);
        e.set_value_descriptor("hello", "greeting").unwrap();
        assert_eq!(e.type_of(Subject::Value("hello")), Some("greeting"));
    }

    #[test]
    fn environment_without_vocabulary() {
        let mut e = Environment::new();
        e.add_element("I1", "submit", ElementDecl::default()).unwrap();
        let submit = ElementRef::new("I1", "submit").unwrap();
        assert_eq!(e.vocabulary(), None);
        assert_eq!(e.type_of(Subject::Element(&submit)), None);
        assert_eq!(e.type_of(Subject::Value("x")), None);
    }

    #[test]
    fn descriptors_must_be_in_vocabulary() {
        let mut e = Environment::new();
        e.declare_vocabulary(["button"]).unwrap();
        assert!(matches!(
            e.add_element("I1", "x", ElementDecl::described("slider")),
            Err(EnvError::UndeclaredDescriptor(_))
        ));
        assert!(matches!(
            e.add_element("I1", "y", ElementDecl::described("Button")),
            Err(EnvError::InvalidDescriptor(_))
        ));
        assert!(matches!(env().declare_vocabulary(["button"]), Err(EnvError::UndeclaredDescriptor(_))));
    }

    #[test]
    fn duplicate_declarations_rejected() {
        let mut e = env();
        assert!(matches!(
            e.add_element("I1", "submit", ElementDecl::default()),
            Err(EnvError::DuplicateElement { .. })
        ));
        assert!(matches!(
            e.add_action(ActionSignature::new("click", [])),
            Err(EnvError::DuplicateAction(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{
            "interfaces": {
                "I1": {
                    "submit": {"bbox": [10, 20, 60, 40], "descriptor": "button"},
                    "box": {}
                }
            },
            "actions": {"click": ["element"], "type": ["element", "symbol"]},
            "value_domain": "lowercase_space"
        }"#;
        let e = Environment::from_json(text).unwrap();
        assert_eq!(e.value_domain(), ValueDomain::LowercaseSpace);
        assert_eq!(
            e.element("I1", "submit").unwrap().bbox,
            Some(BoundingBox::new(10, 20, 60, 40).unwrap())
        );
        assert_eq!(e.signature("type").unwrap().arity(), 2);
        assert_eq!(Environment::from_json(&e.to_json()).unwrap(), e);
    }

    #[test]
    fn json_rejects_bad_input() {
        assert!(Environment::from_json(r#"{"interfaces": {}, "actions": {"f": ["number"]}}"#).is_err());
        assert!(Environment::from_json(r#"{"interfaces": {"I": {"a": {"bbox": [5, 0, 1, 1]}}}, "actions": {}}"#).is_err());
        assert!(Environment::from_json(r#"{"interfaces": {}, "actions": {}, "value_domain": "digits"}"#).is_err());
    }

    #[test]
    fn replay_digests_are_prefix_logs() {
        let p = parse("click(@I1.submit)\ntype(@I1.box, \"hi\")").unwrap();
        let trace = replay(&p, &env()).unwrap();
        assert_eq!(trace.steps.len(), 2);
        assert_eq!(trace.steps[0].state, log_digest(&p.statements[..1]));
        assert_eq!(trace.final_state(), Some(&log_digest(&p.statements)));
        assert_ne!(trace.steps[0].state, trace.steps[1].state);
        assert_eq!(replay(&p, &env()).unwrap(), trace);
    }

    #[test]
    fn replay_empty_and_invalid() {
        assert!(replay(&Process::default(), &env()).unwrap().steps.is_empty());
        let bad = parse("click(@I9.ghost)").unwrap();
        assert_eq!(replay(&bad, &env()).unwrap_err().violations.len(), 1);
    }

    #[test]
    fn realise_copies_bounding_boxes() {
        let mut e = env();
        let bb = BoundingBox::new(0, 0, 4, 4).unwrap();
        e.add_element("I2", "icon", ElementDecl { bbox: Some(bb), descriptor: None }).unwrap();
        let mut p = parse("click(@I2.icon)").unwrap();
        e.realise(&mut p);
        match &p.statements[0].args[0] {
            Argument::Element(el) => assert_eq!(el.bounding_box, Some(bb)),
            other => panic!("{other:?}"),
        }
    }
}
