//! Ground terms and atoms as they appear in instance files and solver output.
//!
//! The grammar is the ground fragment of ASP-Core-2 terms: integers,
//! lowercase symbolic constants, quoted strings, function terms and tuples.
//! Tuples of length one render as `(t,)`, matching clingo's output.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Int(i64),
    Sym(String),
    Str(String),
    Tuple(Vec<Term>),
    Func(String, Vec<Term>),
}

impl Term {
    pub fn sym(s: impl Into<String>) -> Term {
        Term::Sym(s.into())
    }

    pub fn func(name: impl Into<String>, args: Vec<Term>) -> Term {
        let name = name.into();
        if args.is_empty() {
            Term::Sym(name)
        } else {
            Term::Func(name, args)
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Term::Int(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_sym(&self) -> Option<&str> {
        match self {
            Term::Sym(s) => Some(s),
            _ => None,
        }
    }

    /// Name and arguments of a function term; constants count as nullary.
    pub fn as_func(&self) -> Option<(&str, &[Term])> {
        match self {
            Term::Func(n, a) => Some((n, a)),
            Term::Sym(n) => Some((n, &[])),
            _ => None,
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Term::Int(_) => 0,
            Term::Sym(_) | Term::Func(..) | Term::Tuple(_) => 1,
            Term::Str(_) => 2,
        }
    }
}

// Follows clingo's total order on symbols: numbers < functions < strings;
// functions compare by arity, then name, then arguments. Tuples are
// functions with an empty name.
impl Ord for Term {
    fn cmp(&self, other: &Self) -> Ordering {
        fn parts(t: &Term) -> (&str, &[Term]) {
            match t {
                Term::Sym(s) => (s, &[]),
                Term::Func(n, a) => (n, a),
                Term::Tuple(a) => ("", a),
                _ => unreachable!(),
            }
        }
        match (self, other) {
            (Term::Int(a), Term::Int(b)) => a.cmp(b),
            (Term::Str(a), Term::Str(b)) => a.cmp(b),
            _ if self.rank() != other.rank() => self.rank().cmp(&other.rank()),
            _ => {
                let (na, aa) = parts(self);
                let (nb, ab) = parts(other);
                aa.len()
                    .cmp(&ab.len())
                    .then_with(|| na.cmp(nb))
                    .then_with(|| aa.cmp(ab))
            }
        }
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn write_args(f: &mut fmt::Formatter<'_>, args: &[Term]) -> fmt::Result {
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{a}")?;
    }
    Ok(())
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Int(n) => write!(f, "{n}"),
            Term::Sym(s) => f.write_str(s),
            Term::Str(s) => {
                f.write_str("\"")?;
                for c in s.chars() {
                    match c {
                        '"' => f.write_str("\\\"")?,
                        '\\' => f.write_str("\\\\")?,
                        '\n' => f.write_str("\\n")?,
                        c => write!(f, "{c}")?,
                    }
                }
                f.write_str("\"")
            }
            Term::Tuple(args) => {
                f.write_str("(")?;
                write_args(f, args)?;
                if args.len() == 1 {
                    f.write_str(",")?;
                }
                f.write_str(")")
            }
            Term::Func(name, args) => {
                write!(f, "{name}(")?;
                write_args(f, args)?;
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundAtom {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl GroundAtom {
    pub fn new(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        GroundAtom {
            predicate: predicate.into(),
            args,
        }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn as_term(&self) -> Term {
        Term::func(self.predicate.clone(), self.args.clone())
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            write_args(f, &self.args)?;
            f.write_str(")")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AtomError {
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("unexpected character {found:?} at offset {offset}")]
    Unexpected { found: char, offset: usize },
    #[error("unbalanced parentheses")]
    Unbalanced,
    #[error("empty argument at offset {offset}")]
    EmptyArgument { offset: usize },
    #[error("integer out of range at offset {offset}")]
    IntRange { offset: usize },
    #[error("expected an atom, found {0}")]
    NotAnAtom(String),
    #[error("trailing input at offset {offset}")]
    Trailing { offset: usize },
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn unexpected(&self) -> AtomError {
        match self.peek() {
            None => AtomError::UnexpectedEnd,
            Some(found) => AtomError::Unexpected {
                found,
                offset: self.pos,
            },
        }
    }

    fn ident(&mut self) -> Option<String> {
        let start = self.pos;
        match self.peek() {
            Some(c) if c.is_ascii_lowercase() || c == '_' => {}
            _ => return None,
        }
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_' || c == '\'') {
            self.pos += 1;
        }
        Some(self.src[start..self.pos].to_string())
    }

    fn term(&mut self) -> Result<Term, AtomError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            None => Err(AtomError::UnexpectedEnd),
            Some(',') | Some(')') => Err(AtomError::EmptyArgument { offset: start }),
            Some(c) if c.is_ascii_digit() || c == '-' => {
                self.pos += 1;
                while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                    self.pos += 1;
                }
                let text = &self.src[start..self.pos];
                if text == "-" {
                    return Err(AtomError::Unexpected {
                        found: '-',
                        offset: start,
                    });
                }
                text.parse()
                    .map(Term::Int)
                    .map_err(|_| AtomError::IntRange { offset: start })
            }
            Some('"') => {
                self.pos += 1;
                let mut out = String::new();
                loop {
                    match self.bump() {
                        None => return Err(AtomError::UnexpectedEnd),
                        Some('"') => return Ok(Term::Str(out)),
                        Some('\\') => match self.bump() {
                            Some('n') => out.push('\n'),
                            Some(c) => out.push(c),
                            None => return Err(AtomError::UnexpectedEnd),
                        },
                        Some(c) => out.push(c),
                    }
                }
            }
            Some('(') => {
                self.pos += 1;
                let (args, trailing_comma) = self.arg_list()?;
                if args.len() == 1 && !trailing_comma {
                    // plain parenthesised term
                    return Ok(args.into_iter().next().unwrap());
                }
                Ok(Term::Tuple(args))
            }
            Some(_) => {
                let name = self.ident().ok_or_else(|| self.unexpected())?;
                self.skip_ws();
                if self.peek() == Some('(') {
                    self.pos += 1;
                    let (args, trailing) = self.arg_list()?;
                    if trailing || args.is_empty() {
                        return Err(AtomError::EmptyArgument {
                            offset: self.pos - 1,
                        });
                    }
                    Ok(Term::Func(name, args))
                } else {
                    Ok(Term::Sym(name))
                }
            }
        }
    }

    /// Parses `t1, ..., tn)` after an opening parenthesis. Returns whether a
    /// trailing comma preceded the closing parenthesis.
    fn arg_list(&mut self) -> Result<(Vec<Term>, bool), AtomError> {
        let mut args = Vec::new();
        self.skip_ws();
        if self.peek() == Some(')') {
            self.pos += 1;
            return Ok((args, false));
        }
        loop {
            args.push(self.term()?);
            self.skip_ws();
            match self.bump() {
                Some(',') => {
                    self.skip_ws();
                    if self.peek() == Some(')') && args.len() == 1 {
                        self.pos += 1;
                        return Ok((args, true));
                    }
                }
                Some(')') => return Ok((args, false)),
                None => return Err(AtomError::Unbalanced),
                Some(found) => {
                    return Err(AtomError::Unexpected {
                        found,
                        offset: self.pos - found.len_utf8(),
                    })
                }
            }
        }
    }
}

fn check_balance(text: &str) -> Result<(), AtomError> {
    let mut depth = 0i64;
    let mut in_str = false;
    let mut esc = false;
    for c in text.chars() {
        if in_str {
            match (esc, c) {
                (true, _) => esc = false,
                (false, '\\') => esc = true,
                (false, '"') => in_str = false,
                _ => {}
            }
            continue;
        }
        match c {
            '"' => in_str = true,
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(AtomError::Unbalanced);
                }
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(AtomError::Unbalanced);
    }
    Ok(())
}

pub fn parse_term(text: &str) -> Result<Term, AtomError> {
    check_balance(text)?;
    let mut cur = Cursor { src: text, pos: 0 };
    let t = cur.term()?;
    cur.skip_ws();
    if cur.pos != text.len() {
        return Err(AtomError::Trailing { offset: cur.pos });
    }
    Ok(t)
}

/// Parses a single ground atom such as `agent_at((0,1),1)` or `p`. A trailing
/// `.` is accepted.
pub fn parse_ground_atom(text: &str) -> Result<GroundAtom, AtomError> {
    let trimmed = text.trim();
    let trimmed = trimmed.strip_suffix('.').unwrap_or(trimmed);
    match parse_term(trimmed)? {
        Term::Sym(p) => Ok(GroundAtom::new(p, vec![])),
        Term::Func(p, args) => Ok(GroundAtom::new(p, args)),
        other => Err(AtomError::NotAnAtom(other.to_string())),
    }
}

/// Splits a line into atom texts at top-level `.` separators and whitespace.
pub(crate) fn split_atoms(line: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut in_str = false;
    let mut start = None;
    let bytes = line.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if in_str {
            if c == '\\' {
                i += 1;
            } else if c == '"' {
                in_str = false;
            }
        } else {
            match c {
                '"' => in_str = true,
                '(' => depth += 1,
                ')' => depth -= 1,
                _ => {}
            }
            let sep = depth == 0 && (c == '.' || c.is_whitespace());
            if sep {
                if let Some(s) = start.take() {
                    out.push(&line[s..i]);
                }
                i += 1;
                continue;
            }
        }
        if start.is_none() {
            start = Some(i);
        }
        i += 1;
    }
    if let Some(s) = start {
        out.push(&line[s..]);
    }
    out
}
