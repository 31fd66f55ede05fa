//! Line-oriented reader shared by the structure, relation, algebra and
//! operation-table file formats.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub(crate) struct Line<'a> {
    pub number: usize,
    pub words: Vec<&'a str>,
}

/// Splits a document into non-empty lines of whitespace-separated words.
/// `#` starts a comment that runs to the end of the line.
pub(crate) fn lines(text: &str) -> Vec<Line<'_>> {
    text.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let body = raw.split('#').next().unwrap_or("");
            let words: Vec<&str> = body.split_whitespace().collect();
            (!words.is_empty()).then_some(Line { number: i + 1, words })
        })
        .collect()
}

pub(crate) fn parse_usize(line: &Line<'_>, word: &str, what: &str) -> Result<usize> {
    word.parse::<usize>()
        .map_err(|_| Error::parse(line.number, format!("expected {what}, found `{word}`")))
}

pub(crate) fn expect_words(line: &Line<'_>, count: usize, keyword: &str) -> Result<()> {
    if line.words.len() != count {
        return Err(Error::parse(
            line.number,
            format!(
                "`{keyword}` takes {} argument(s), found {}",
                count - 1,
                line.words.len() - 1
            ),
        ));
    }
    Ok(())
}

pub(crate) fn is_identifier(word: &str) -> bool {
    !word.is_empty()
        && word.is_ascii()
        && !word
            .chars()
            .any(|c| c.is_whitespace() || c == '(' || c == ')' || c == '#')
}

/// Reads tuple lines up to the closing `end`. Returns the tuples and the
/// index of the line after `end`.
pub(crate) fn tuple_block(
    lines: &[Line<'_>],
    mut pos: usize,
    arity: usize,
    domain_size: usize,
    header_line: usize,
) -> Result<(Vec<Vec<usize>>, usize)> {
    let mut tuples = Vec::new();
    loop {
        let Some(line) = lines.get(pos) else {
            return Err(Error::parse(header_line, "missing `end`"));
        };
        pos += 1;
        if line.words[0] == "end" {
            expect_words(line, 1, "end")?;
            return Ok((tuples, pos));
        }
        if line.words.len() != arity {
            return Err(Error::parse(
                line.number,
                format!("tuple of length {} for arity {arity}", line.words.len()),
            ));
        }
        let mut tuple = Vec::with_capacity(arity);
        for w in &line.words {
            let v = parse_usize(line, w, "element index")?;
            if v >= domain_size {
                return Err(Error::Domain { value: v, domain_size });
            }
            tuple.push(v);
        }
        tuples.push(tuple);
    }
}
