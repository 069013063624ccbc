use crate::error::{Error, Result};

/// Significant lines of a text file with their 1-based numbers. Blank lines
/// and lines starting with `#` are skipped.
pub(crate) struct Lines<'a> {
    items: Vec<(usize, &'a str)>,
    pos: usize,
    last: usize,
}

impl<'a> Lines<'a> {
    pub(crate) fn new(text: &'a str) -> Self {
        let items: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
            .collect();
        let last = text.lines().count().max(1);
        Lines { items, pos: 0, last }
    }

    pub(crate) fn peek(&self) -> Option<(usize, &'a str)> {
        self.items.get(self.pos).copied()
    }

    pub(crate) fn next(&mut self) -> Option<(usize, &'a str)> {
        let item = self.peek();
        if item.is_some() {
            self.pos += 1;
        }
        item
    }

    /// The next line, or an error at the end of the input.
    pub(crate) fn expect(&mut self, what: &str) -> Result<(usize, &'a str)> {
        self.next()
            .ok_or_else(|| Error::parse(self.last, format!("unexpected end of input, expected {what}")))
    }
}

/// Splits `key=value` words; bare words are rejected.
pub(crate) fn key_values<'a>(line: usize, words: &[&'a str]) -> Result<Vec<(&'a str, &'a str)>> {
    words
        .iter()
        .map(|w| {
            w.split_once('=')
                .ok_or_else(|| Error::parse(line, format!("expected key=value, found {w:?}")))
        })
        .collect()
}

pub(crate) fn parse_num<T: std::str::FromStr>(line: usize, what: &str, s: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::parse(line, format!("invalid {what} {s:?}")))
}

/// Looks up `key` among parsed `key=value` pairs.
pub(crate) fn required<'a>(line: usize, kv: &[(&'a str, &'a str)], key: &str) -> Result<&'a str> {
    kv.iter()
        .find(|(k, _)| *k == key)
        .map(|&(_, v)| v)
        .ok_or_else(|| Error::parse(line, format!("missing {key}=")))
}

/// Rejects keys outside `allowed`.
pub(crate) fn only_keys(line: usize, kv: &[(&str, &str)], allowed: &[&str]) -> Result<()> {
    match kv.iter().find(|(k, _)| !allowed.contains(k)) {
        Some((k, _)) => Err(Error::parse(line, format!("unknown key {k:?}"))),
        None => Ok(()),
    }
}

/// Attaches a line number to errors raised while building a value.
pub(crate) fn at_line<T>(line: usize, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse { .. } => e,
        other => Error::parse(line, other.to_string()),
    })
}
