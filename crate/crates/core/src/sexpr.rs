//! Minimal s-expression reader used by the formula and expression formats.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Sexpr {
    Atom(String),
    List(Vec<Sexpr>),
}

impl Sexpr {
    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexpr::Atom(a) => Some(a),
            Sexpr::List(_) => None,
        }
    }
}

pub(crate) fn parse(text: &str) -> Result<Sexpr> {
    let tokens = tokenize(text);
    let mut pos = 0;
    let expr = read(&tokens, &mut pos)?;
    if let Some((line, tok)) = tokens.get(pos) {
        return Err(Error::parse(*line, format!("unexpected `{tok}` after expression")));
    }
    Ok(expr)
}

fn tokenize(text: &str) -> Vec<(usize, String)> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split(';').next().unwrap_or("");
        let line = line.split('#').next().unwrap_or("");
        let mut word = String::new();
        for c in line.chars() {
            match c {
                '(' | ')' => {
                    if !word.is_empty() {
                        out.push((i + 1, std::mem::take(&mut word)));
                    }
                    out.push((i + 1, c.to_string()));
                }
                c if c.is_whitespace() => {
                    if !word.is_empty() {
                        out.push((i + 1, std::mem::take(&mut word)));
                    }
                }
                c => word.push(c),
            }
        }
        if !word.is_empty() {
            out.push((i + 1, word));
        }
    }
    out
}

fn read(tokens: &[(usize, String)], pos: &mut usize) -> Result<Sexpr> {
    let Some((line, tok)) = tokens.get(*pos) else {
        let last = tokens.last().map_or(1, |t| t.0);
        return Err(Error::parse(last, "unexpected end of input"));
    };
    *pos += 1;
    match tok.as_str() {
        "(" => {
            let mut items = Vec::new();
            loop {
                match tokens.get(*pos) {
                    Some((_, t)) if t == ")" => {
                        *pos += 1;
                        return Ok(Sexpr::List(items));
                    }
                    Some(_) => items.push(read(tokens, pos)?),
                    None => return Err(Error::parse(*line, "unclosed `(`")),
                }
            }
        }
        ")" => Err(Error::parse(*line, "unexpected `)`")),
        atom => Ok(Sexpr::Atom(atom.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_lists() {
        let e = parse("(and (rel R x y)\n (= x y))").unwrap();
        let Sexpr::List(items) = e else { panic!() };
        assert_eq!(items.len(), 3);
        assert_eq!(items[0], Sexpr::Atom("and".into()));
    }

    #[test]
    fn errors() {
        assert!(parse("(a b").is_err());
        assert!(parse("a)").is_err());
        assert!(parse("").is_err());
        assert!(parse("(a) (b)").is_err());
    }
}
