use std::fmt::Write;

use super::lines::{at_line, key_values, only_keys, parse_num, required, Lines};
use crate::arrow::Coloring;
use crate::error::{Error, Result};
use crate::structure::{canonical_code, CanonicalCode, FinStructure, SubsetCopy};

/// `coloring k=<k> pattern=<code>` followed by `copy: i1 i2 ... -> j` lines.
/// The domain is checked against the copies of `pattern` in `ambient`.
pub fn parse_coloring(text: &str, ambient: &FinStructure, pattern: &FinStructure) -> Result<Coloring> {
    let mut lines = Lines::new(text);
    let (hline, header) = lines.expect("coloring header")?;
    let mut words = header.split_whitespace();
    if words.next() != Some("coloring") {
        return Err(Error::parse(hline, "malformed header, expected `coloring k=<k> pattern=<code>`"));
    }
    let kv = key_values(hline, &words.collect::<Vec<_>>())?;
    only_keys(hline, &kv, &["k", "pattern"])?;
    let k: usize = parse_num(hline, "k", required(hline, &kv, "k")?)?;
    let code = at_line(hline, CanonicalCode::from_hex(required(hline, &kv, "pattern")?))?;
    if code != canonical_code(pattern) {
        return Err(Error::parse(hline, "pattern code differs from the small structure"));
    }
    let mut copies = Vec::new();
    let mut colors = Vec::new();
    while let Some((line, text)) = lines.next() {
        let body = text
            .strip_prefix("copy:")
            .ok_or_else(|| Error::parse(line, format!("expected `copy: ... -> j`, found {text:?}")))?;
        let (elems, color) = body
            .split_once("->")
            .ok_or_else(|| Error::parse(line, "missing `-> color`"))?;
        let elems: Vec<usize> = elems
            .split_whitespace()
            .map(|x| parse_num(line, "element", x))
            .collect::<Result<_>>()?;
        let color: usize = parse_num(line, "color", color)?;
        if color >= k {
            return Err(Error::parse(line, format!("color {color} out of range for k = {k}")));
        }
        let copy = at_line(line, SubsetCopy::new(elems, ambient.size()))?;
        if copies.last().is_some_and(|prev: &SubsetCopy| prev >= &copy) {
            return Err(Error::parse(line, "copies must be listed in increasing order"));
        }
        copies.push(copy);
        colors.push(color);
    }
    at_line(hline, Coloring::from_parts(ambient, pattern, k, copies, colors))
}

pub fn serialize_coloring(c: &Coloring) -> String {
    let mut out = format!("coloring k={} pattern={}\n", c.k(), c.pattern());
    for (copy, color) in c.iter() {
        writeln!(out, "copy: {copy} -> {color}").expect("write to string");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_errors() {
        let c3 = FinStructure::chain(3);
        let c2 = FinStructure::chain(2);
        let col = Coloring::new(&c3, &c2, 2, |s| s.elements()[0] % 2).unwrap();
        let text = serialize_coloring(&col);
        assert!(text.starts_with("coloring k=2 pattern="));
        assert!(text.contains("copy: 0 2 -> 0\n"));
        assert_eq!(parse_coloring(&text, &c3, &c2).unwrap(), col);

        let swapped = text.replace("copy: 0 1 -> 0\ncopy: 0 2 -> 0", "copy: 0 2 -> 0\ncopy: 0 1 -> 0");
        assert!(matches!(parse_coloring(&swapped, &c3, &c2), Err(Error::Parse { line: 3, .. })));
        let out_of_range = text.replace("copy: 1 2 -> 1", "copy: 1 2 -> 2");
        assert!(matches!(parse_coloring(&out_of_range, &c3, &c2), Err(Error::Parse { line: 4, .. })));
        let partial: String = text.lines().take(3).map(|l| format!("{l}\n")).collect();
        assert!(matches!(parse_coloring(&partial, &c3, &c2), Err(Error::Parse { line: 1, .. })));
    }
}
