//! Minimal s-expression reader shared by the formula, interpretation and
//! combinator file formats.
//!
//! Atoms are runs of non-space, non-paren characters, or double-quoted
//! strings (`"a b"`, `""`). `;` starts a comment running to end of line.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sexp {
    Atom(String),
    /// A quoted atom; kept distinct so `""` survives a round trip.
    Str(String),
    List(Vec<Sexp>),
}

impl Sexp {
    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(s) | Sexp::Str(s) => Some(s),
            Sexp::List(_) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(v) => Some(v),
            _ => None,
        }
    }

    /// `(head ...)` → `(head, rest)`.
    pub fn head(&self) -> Option<(&str, &[Sexp])> {
        let l = self.as_list()?;
        let (h, rest) = l.split_first()?;
        Some((h.as_atom()?, rest))
    }
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Atom(s) => f.write_str(s),
            Sexp::Str(s) => write!(f, "\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\"")),
            Sexp::List(items) => {
                f.write_str("(")?;
                for (i, it) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{it}")?;
                }
                f.write_str(")")
            }
        }
    }
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    src: &'a str,
}

impl<'a> Reader<'a> {
    fn skip_ws(&mut self) {
        while let Some(&(_, c)) = self.chars.peek() {
            if c.is_whitespace() {
                self.chars.next();
            } else if c == ';' {
                for (_, c) in self.chars.by_ref() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn read(&mut self) -> Result<Option<Sexp>> {
        self.skip_ws();
        let Some(&(start, c)) = self.chars.peek() else {
            return Ok(None);
        };
        match c {
            '(' => {
                self.chars.next();
                let mut items = Vec::new();
                loop {
                    self.skip_ws();
                    match self.chars.peek() {
                        None => return Err(Error::Parse("unbalanced '('".into())),
                        Some(&(_, ')')) => {
                            self.chars.next();
                            return Ok(Some(Sexp::List(items)));
                        }
                        Some(_) => items.push(self.read()?.expect("peeked a char")),
                    }
                }
            }
            ')' => Err(Error::Parse(format!("unexpected ')' at byte {start}"))),
            '"' => {
                self.chars.next();
                let mut s = String::new();
                loop {
                    match self.chars.next() {
                        None => return Err(Error::Parse("unterminated string".into())),
                        Some((_, '"')) => return Ok(Some(Sexp::Str(s))),
                        Some((_, '\\')) => match self.chars.next() {
                            Some((_, c)) => s.push(c),
                            None => return Err(Error::Parse("dangling escape".into())),
                        },
                        Some((_, c)) => s.push(c),
                    }
                }
            }
            _ => {
                let mut end = self.src.len();
                while let Some(&(i, c)) = self.chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == '"' || c == ';' {
                        end = i;
                        break;
                    }
                    self.chars.next();
                }
                Ok(Some(Sexp::Atom(self.src[start..end].to_string())))
            }
        }
    }
}

/// Reads every top-level expression in `src`.
pub fn parse_all(src: &str) -> Result<Vec<Sexp>> {
    let mut r = Reader { chars: src.char_indices().peekable(), src };
    let mut out = Vec::new();
    while let Some(e) = r.read()? {
        out.push(e);
    }
    Ok(out)
}

/// Reads exactly one expression.
pub fn parse_one(src: &str) -> Result<Sexp> {
    let mut all = parse_all(src)?;
    match all.len() {
        1 => Ok(all.pop().unwrap()),
        0 => Err(Error::Parse("empty input".into())),
        n => Err(Error::Parse(format!("expected one expression, found {n}"))),
    }
}
