//! Competition instance files and the `#attempt` output protocol.
//!
//! An instance is a sequence of sections introduced by `#background`,
//! `#target_predicate`, `#relevant_predicates`, `#Example(X)` (with `#trace`
//! and `#valid_moves` subsections) and `#Test(X)` (with `#trace`). Background
//! text is kept verbatim and never interpreted here.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::atom::{parse_ground_atom, split_atoms, AtomError, GroundAtom, Term};
use crate::bias::{ModeBias, PredicateSchema};

pub const TRACE_PREDICATE: &str = "agent_at";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Example {
    pub id: i64,
    pub trace: Vec<GroundAtom>,
    pub valid_moves: Vec<GroundAtom>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestTrace {
    pub id: i64,
    pub trace: Vec<GroundAtom>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceFile {
    /// Background lines exactly as they appeared, comments included.
    pub background: Vec<String>,
    pub target: PredicateSchema,
    pub relevant: Vec<PredicateSchema>,
    pub examples: Vec<Example>,
    pub tests: Vec<TestTrace>,
}

impl InstanceFile {
    pub fn bias(&self) -> ModeBias {
        ModeBias {
            target: self.target.clone(),
            relevant: self.relevant.clone(),
        }
    }

    pub fn background_text(&self) -> String {
        let mut s = self.background.join("\n");
        s.push('\n');
        s
    }
}

/// Renders atoms as facts, one per line.
pub fn facts_text(atoms: &[GroundAtom]) -> String {
    let mut s = String::new();
    for a in atoms {
        let _ = writeln!(s, "{a}.");
    }
    s
}

/// Time point of a trace atom `agent_at(Cell, T)`.
pub fn trace_time(atom: &GroundAtom) -> Option<i64> {
    atom.args.last().and_then(Term::as_int)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("missing #target_predicate section")]
    MissingTarget,
    #[error("more than one target predicate")]
    MultipleTargets,
    #[error("no relevant predicates declared")]
    NoRelevant,
    #[error("duplicate section {0}")]
    DuplicateSection(String),
    #[error("unknown section header `{0}`")]
    UnknownSection(String),
    #[error("subsection `{0}` outside an example or test")]
    OrphanSubsection(String),
    #[error("content outside any section")]
    OutsideSection,
    #[error("malformed atom `{text}`: {source}")]
    Atom { text: String, source: AtomError },
    #[error("malformed predicate declaration `{0}`")]
    Schema(String),
    #[error("expected {expected} atom, found `{found}`")]
    WrongPredicate { expected: String, found: String },
    #[error("trace atom needs a non-negative integer time point: `{0}`")]
    BadTime(String),
    #[error("two agent positions at time {0}")]
    DuplicateTime(i64),
    #[error("{0} has an empty trace")]
    EmptyTrace(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Background,
    Target,
    Relevant,
    Example(usize),
    ExampleTrace(usize),
    ExampleMoves(usize),
    Test(usize),
    TestTrace(usize),
}

fn is_header(line: &str) -> bool {
    matches!(
        line,
        "#background" | "#target_predicate" | "#relevant_predicates" | "#trace" | "#valid_moves"
    ) || header_id(line, "#Example").is_some()
        || header_id(line, "#Test").is_some()
}

fn header_id(header: &str, name: &str) -> Option<Option<i64>> {
    let rest = header.strip_prefix(name)?;
    let inner = rest.trim().strip_prefix('(')?.strip_suffix(')')?;
    Some(inner.trim().parse().ok())
}

pub fn parse_instance(text: &str) -> Result<InstanceFile, ParseError> {
    let mut background = Vec::new();
    let mut target: Option<(usize, PredicateSchema)> = None;
    let mut relevant = Vec::new();
    let mut examples: Vec<(usize, Example)> = Vec::new();
    let mut tests: Vec<(usize, TestTrace)> = Vec::new();
    let mut seen_example = BTreeMap::new();
    let mut seen_test = BTreeMap::new();
    let mut section = Section::None;
    let mut seen_background = false;
    let mut seen_target = false;
    let mut seen_relevant = false;

    let err = |line: usize, kind| ParseError { line, kind };

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if is_header(line) || (line.starts_with('#') && section != Section::Background) {
            let header = line;
            section = if header == "#background" {
                if std::mem::replace(&mut seen_background, true) {
                    return Err(err(lineno, ParseErrorKind::DuplicateSection(header.into())));
                }
                Section::Background
            } else if header == "#target_predicate" {
                if std::mem::replace(&mut seen_target, true) {
                    return Err(err(lineno, ParseErrorKind::DuplicateSection(header.into())));
                }
                Section::Target
            } else if header == "#relevant_predicates" {
                if std::mem::replace(&mut seen_relevant, true) {
                    return Err(err(lineno, ParseErrorKind::DuplicateSection(header.into())));
                }
                Section::Relevant
            } else if let Some(id) = header_id(header, "#Example") {
                let id =
                    id.ok_or_else(|| err(lineno, ParseErrorKind::UnknownSection(header.into())))?;
                if seen_example.insert(id, lineno).is_some() {
                    return Err(err(lineno, ParseErrorKind::DuplicateSection(header.into())));
                }
                examples.push((
                    lineno,
                    Example {
                        id,
                        trace: Vec::new(),
                        valid_moves: Vec::new(),
                    },
                ));
                Section::Example(examples.len() - 1)
            } else if let Some(id) = header_id(header, "#Test") {
                let id =
                    id.ok_or_else(|| err(lineno, ParseErrorKind::UnknownSection(header.into())))?;
                if seen_test.insert(id, lineno).is_some() {
                    return Err(err(lineno, ParseErrorKind::DuplicateSection(header.into())));
                }
                tests.push((
                    lineno,
                    TestTrace {
                        id,
                        trace: Vec::new(),
                    },
                ));
                Section::Test(tests.len() - 1)
            } else if header == "#trace" {
                match section {
                    Section::Example(i) | Section::ExampleTrace(i) | Section::ExampleMoves(i) => {
                        Section::ExampleTrace(i)
                    }
                    Section::Test(i) | Section::TestTrace(i) => Section::TestTrace(i),
                    _ => return Err(err(lineno, ParseErrorKind::OrphanSubsection(header.into()))),
                }
            } else if header == "#valid_moves" {
                match section {
                    Section::Example(i) | Section::ExampleTrace(i) | Section::ExampleMoves(i) => {
                        Section::ExampleMoves(i)
                    }
                    _ => return Err(err(lineno, ParseErrorKind::OrphanSubsection(header.into()))),
                }
            } else {
                return Err(err(lineno, ParseErrorKind::UnknownSection(header.into())));
            };
            continue;
        }

        if section == Section::Background {
            background.push(raw.to_string());
            continue;
        }
        if line.is_empty() || line.starts_with('%') {
            continue;
        }

        let atoms = |line: &str| -> Result<Vec<GroundAtom>, ParseError> {
            split_atoms(line)
                .into_iter()
                .map(|t| {
                    parse_ground_atom(t).map_err(|source| {
                        err(
                            lineno,
                            ParseErrorKind::Atom {
                                text: t.to_string(),
                                source,
                            },
                        )
                    })
                })
                .collect()
        };

        match section {
            Section::None | Section::Background => {
                return Err(err(lineno, ParseErrorKind::OutsideSection))
            }
            Section::Target | Section::Relevant => {
                for decl in split_atoms(line) {
                    if section == Section::Target {
                        if target.is_some() {
                            return Err(err(lineno, ParseErrorKind::MultipleTargets));
                        }
                        let s = PredicateSchema::parse("t1", decl)
                            .map_err(|_| err(lineno, ParseErrorKind::Schema(decl.into())))?;
                        target = Some((lineno, s));
                    } else {
                        let id = format!("r{}", relevant.len() + 1);
                        let s = PredicateSchema::parse(id, decl)
                            .map_err(|_| err(lineno, ParseErrorKind::Schema(decl.into())))?;
                        relevant.push(s);
                    }
                }
            }
            Section::Example(_) | Section::Test(_) => {
                return Err(err(lineno, ParseErrorKind::OutsideSection))
            }
            Section::ExampleTrace(i) => {
                for a in atoms(line)? {
                    check_trace_atom(&a, lineno)?;
                    examples[i].1.trace.push(a);
                }
            }
            Section::TestTrace(i) => {
                for a in atoms(line)? {
                    check_trace_atom(&a, lineno)?;
                    tests[i].1.trace.push(a);
                }
            }
            Section::ExampleMoves(i) => {
                // checked against the target once it is known
                examples[i].1.valid_moves.extend(atoms(line)?);
            }
        }
    }

    let (_, target) = target.ok_or(ParseError {
        line: text.lines().count().max(1),
        kind: ParseErrorKind::MissingTarget,
    })?;
    if relevant.is_empty() {
        return Err(ParseError {
            line: text.lines().count().max(1),
            kind: ParseErrorKind::NoRelevant,
        });
    }
    for (line, ex) in &examples {
        check_trace(&ex.trace, *line, &format!("Example({})", ex.id))?;
        for m in &ex.valid_moves {
            if m.predicate != target.name || m.arity() != target.arity() {
                return Err(ParseError {
                    line: *line,
                    kind: ParseErrorKind::WrongPredicate {
                        expected: target.to_string(),
                        found: m.to_string(),
                    },
                });
            }
        }
    }
    for (line, t) in &tests {
        check_trace(&t.trace, *line, &format!("Test({})", t.id))?;
    }

    Ok(InstanceFile {
        background,
        target,
        relevant,
        examples: examples.into_iter().map(|(_, e)| e).collect(),
        tests: tests.into_iter().map(|(_, t)| t).collect(),
    })
}

fn check_trace_atom(a: &GroundAtom, line: usize) -> Result<(), ParseError> {
    if a.predicate != TRACE_PREDICATE || a.arity() != 2 {
        return Err(ParseError {
            line,
            kind: ParseErrorKind::WrongPredicate {
                expected: format!("{TRACE_PREDICATE}/2"),
                found: a.to_string(),
            },
        });
    }
    match trace_time(a) {
        Some(t) if t >= 0 => Ok(()),
        _ => Err(ParseError {
            line,
            kind: ParseErrorKind::BadTime(a.to_string()),
        }),
    }
}

fn check_trace(trace: &[GroundAtom], line: usize, what: &str) -> Result<(), ParseError> {
    if trace.is_empty() {
        return Err(ParseError {
            line,
            kind: ParseErrorKind::EmptyTrace(what.into()),
        });
    }
    let mut times = BTreeSet::new();
    for a in trace {
        let t = trace_time(a).unwrap_or_default();
        if !times.insert(t) {
            return Err(ParseError {
                line,
                kind: ParseErrorKind::DuplicateTime(t),
            });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Valid,
    Invalid,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AttemptError {
    #[error("prediction for unknown test id {0}")]
    UnknownTest(i64),
    #[error("no prediction for test id {0}")]
    MissingTest(i64),
}

/// Renders one attempt block: `#attempt` then `VALID(X)`/`INVALID(X)` lines.
///
/// When `tests` is given, predictions are checked against it and emitted in
/// its order.
pub fn write_attempt(
    predictions: &[(i64, Verdict)],
    tests: Option<&[TestTrace]>,
) -> Result<String, AttemptError> {
    let ordered: Vec<(i64, Verdict)> = match tests {
        None => predictions.to_vec(),
        Some(tests) => {
            let by_id: BTreeMap<i64, Verdict> = predictions.iter().copied().collect();
            for (id, _) in predictions {
                if !tests.iter().any(|t| t.id == *id) {
                    return Err(AttemptError::UnknownTest(*id));
                }
            }
            tests
                .iter()
                .map(|t| {
                    by_id
                        .get(&t.id)
                        .map(|v| (t.id, *v))
                        .ok_or(AttemptError::MissingTest(t.id))
                })
                .collect::<Result<_, _>>()?
        }
    };
    let mut out = String::from("#attempt\n");
    for (id, v) in ordered {
        let word = match v {
            Verdict::Valid => "VALID",
            Verdict::Invalid => "INVALID",
        };
        let _ = writeln!(out, "{word}({id})");
    }
    Ok(out)
}

/// Predictions of the last `#attempt` block in `text`, which is the one scored.
pub fn last_attempt(text: &str) -> Option<Vec<(i64, Verdict)>> {
    let mut last = None;
    for line in text.lines() {
        let line = line.trim();
        if line == "#attempt" {
            last = Some(Vec::new());
        } else if let Some(cur) = last.as_mut() {
            let parse = |p: &str| {
                line.strip_prefix(p)?
                    .strip_prefix('(')?
                    .strip_suffix(')')?
                    .parse()
                    .ok()
            };
            if let Some(id) = parse("VALID") {
                cur.push((id, Verdict::Valid));
            } else if let Some(id) = parse("INVALID") {
                cur.push((id, Verdict::Invalid));
            }
        }
    }
    last
}
