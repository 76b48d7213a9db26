//! Structured basis labels, printed as s-expressions.

use crate::error::{Error, Result};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Atom(String),
    /// A simplex given by its vertex list.
    Simplex(Vec<usize>),
    Tensor(Vec<Label>),
    Tag(String, Box<Label>),
}

impl Label {
    pub fn atom(s: impl Into<String>) -> Label {
        Label::Atom(s.into())
    }

    pub fn tag(t: impl Into<String>, l: Label) -> Label {
        Label::Tag(t.into(), Box::new(l))
    }

    pub fn tensor(parts: Vec<Label>) -> Label {
        Label::Tensor(parts)
    }

    /// Unit label of the ground field.
    pub fn one() -> Label {
        Label::Atom("1".into())
    }
}

fn atom_ok(s: &str) -> bool {
    !s.is_empty() && !s.chars().any(|c| c.is_whitespace() || "()[]".contains(c))
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Atom(s) => {
                if atom_ok(s) {
                    write!(f, "{s}")
                } else {
                    write!(f, "{}", s.replace(|c: char| c.is_whitespace() || "()[]".contains(c), "_"))
                }
            }
            Label::Simplex(v) => {
                write!(f, "[")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, "]")
            }
            Label::Tensor(v) => {
                write!(f, "(*")?;
                for x in v {
                    write!(f, " {x}")?;
                }
                write!(f, ")")
            }
            Label::Tag(t, x) => write!(f, "({t} {x})"),
        }
    }
}

impl Label {
    /// True when printing and parsing round-trips this label.
    pub fn is_printable(&self) -> bool {
        match self {
            Label::Atom(s) => atom_ok(s) && s != "*",
            Label::Simplex(_) => true,
            Label::Tensor(v) => v.iter().all(|x| x.is_printable()),
            Label::Tag(t, x) => atom_ok(t) && t != "*" && x.is_printable(),
        }
    }

    pub fn parse(s: &str) -> Result<Label> {
        let toks = tokenize(s);
        let mut pos = 0;
        let l = parse_tok(&toks, &mut pos)?;
        if pos != toks.len() {
            return Err(Error::Parse(format!("trailing input in label '{s}'")));
        }
        Ok(l)
    }
}

fn tokenize(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for c in s.chars() {
        if "()[]".contains(c) || c.is_whitespace() {
            if !cur.is_empty() {
                out.push(std::mem::take(&mut cur));
            }
            if !c.is_whitespace() {
                out.push(c.to_string());
            }
        } else {
            cur.push(c);
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn parse_tok(t: &[String], pos: &mut usize) -> Result<Label> {
    let err = |m: &str| Error::Parse(format!("label: {m}"));
    let tok = t.get(*pos).ok_or_else(|| err("unexpected end"))?.clone();
    *pos += 1;
    match tok.as_str() {
        "[" => {
            let mut v = Vec::new();
            loop {
                let x = t.get(*pos).ok_or_else(|| err("unclosed ["))?;
                *pos += 1;
                if x == "]" {
                    break;
                }
                v.push(x.parse::<usize>().map_err(|_| err("bad simplex vertex"))?);
            }
            Ok(Label::Simplex(v))
        }
        "(" => {
            let head = t.get(*pos).ok_or_else(|| err("empty list"))?.clone();
            *pos += 1;
            if head == "*" {
                let mut v = Vec::new();
                loop {
                    if t.get(*pos).map(|x| x.as_str()) == Some(")") {
                        *pos += 1;
                        break;
                    }
                    v.push(parse_tok(t, pos)?);
                }
                Ok(Label::Tensor(v))
            } else {
                let inner = parse_tok(t, pos)?;
                if t.get(*pos).map(|x| x.as_str()) != Some(")") {
                    return Err(err("tag takes one argument"));
                }
                *pos += 1;
                Ok(Label::Tag(head, Box::new(inner)))
            }
        }
        ")" | "]" => Err(err("unbalanced")),
        _ => Ok(Label::Atom(tok)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let l = Label::tensor(vec![
            Label::atom("x"),
            Label::tag("s", Label::Simplex(vec![0, 2])),
            Label::tensor(vec![]),
        ]);
        assert_eq!(l.to_string(), "(* x (s [0 2]) (*))");
        assert_eq!(Label::parse(&l.to_string()).unwrap(), l);
    }
}
