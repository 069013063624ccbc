use std::fmt::Write;
use std::sync::Arc;

use super::lines::{at_line, parse_num, Lines};
use crate::error::{Error, Result};
use crate::structure::{FinStructure, Signature};

/// `signature R/2 S/1`; the words after the keyword.
pub(crate) fn parse_signature_words(line: usize, words: &[&str]) -> Result<Signature> {
    let mut rels = Vec::with_capacity(words.len());
    for w in words {
        let (name, arity) = w
            .split_once('/')
            .ok_or_else(|| Error::parse(line, format!("malformed symbol {w:?}, expected name/arity")))?;
        rels.push((name.to_string(), parse_num::<usize>(line, "arity", arity)?));
    }
    at_line(line, Signature::new(rels))
}

fn parse_tuples(line: usize, body: &str, arity: usize, size: usize) -> Result<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut rest = body.trim_start();
    while !rest.is_empty() {
        let open = rest
            .strip_prefix('(')
            .ok_or_else(|| Error::parse(line, format!("expected '(' at {rest:?}")))?;
        let close = open
            .find(')')
            .ok_or_else(|| Error::parse(line, "unterminated tuple"))?;
        let tuple: Vec<usize> = open[..close]
            .split(',')
            .map(|x| parse_num(line, "element", x))
            .collect::<Result<_>>()?;
        if tuple.len() != arity {
            return Err(Error::parse(
                line,
                format!("tuple of length {} for a relation of arity {arity}", tuple.len()),
            ));
        }
        if let Some(&bad) = tuple.iter().find(|&&x| x >= size) {
            return Err(Error::parse(
                line,
                format!("element {bad} out of range for size {size}"),
            ));
        }
        out.push(tuple);
        rest = open[close + 1..].trim_start();
    }
    Ok(out)
}

/// A `structure size=n` block and its relation lines, stopping before the
/// next `structure` header.
pub(crate) fn parse_block(lines: &mut Lines<'_>, signature: &Arc<Signature>) -> Result<FinStructure> {
    let (line, header) = lines.expect("structure header")?;
    let size = header
        .strip_prefix("structure")
        .map(str::trim)
        .and_then(|s| s.strip_prefix("size="))
        .ok_or_else(|| Error::parse(line, "malformed header, expected `structure size=<n>`"))?;
    let size: usize = parse_num(line, "size", size)?;
    if size == 0 {
        return Err(Error::parse(line, "universe must be nonempty"));
    }
    let mut interp: Vec<Option<Vec<Vec<usize>>>> = vec![None; signature.len()];
    while let Some((line, text)) = lines.peek() {
        if text.starts_with("structure") {
            break;
        }
        lines.next();
        let (name, body) = text
            .split_once(':')
            .ok_or_else(|| Error::parse(line, format!("expected `Name: tuples`, found {text:?}")))?;
        let sym = signature
            .index_of(name.trim())
            .ok_or_else(|| Error::parse(line, format!("unknown relation symbol {:?}", name.trim())))?;
        if interp[sym].is_some() {
            return Err(Error::parse(line, format!("relation {} listed twice", name.trim())));
        }
        interp[sym] = Some(parse_tuples(line, body, signature.arity(sym), size)?);
    }
    at_line(
        line,
        FinStructure::new(
            signature.clone(),
            size,
            interp.into_iter().map(Option::unwrap_or_default).collect(),
        ),
    )
}

/// Parses the structure text format.
pub fn parse_structure(text: &str) -> Result<FinStructure> {
    let mut lines = Lines::new(text);
    let (line, header) = lines.expect("signature header")?;
    let mut words = header.split_whitespace();
    if words.next() != Some("signature") {
        return Err(Error::parse(line, "malformed header, expected `signature ...`"));
    }
    let words: Vec<&str> = words.collect();
    let sig = Arc::new(parse_signature_words(line, &words)?);
    let s = parse_block(&mut lines, &sig)?;
    if let Some((line, text)) = lines.next() {
        return Err(Error::parse(line, format!("trailing content {text:?}")));
    }
    Ok(s)
}

pub(crate) fn write_block(s: &FinStructure, out: &mut String) {
    writeln!(out, "structure size={}", s.size()).expect("write to string");
    for (sym, rel) in s.signature().relations().iter().zip(s.relations()) {
        if rel.is_empty() {
            continue;
        }
        out.push_str(&sym.name);
        out.push(':');
        for t in rel.tuples() {
            out.push_str(" (");
            for (i, x) in t.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write!(out, "{x}").expect("write to string");
            }
            out.push(')');
        }
        out.push('\n');
    }
}

/// Normalized text: tuples sorted, empty relations omitted.
pub fn serialize_structure(s: &FinStructure) -> String {
    let mut out = String::new();
    let sig = s.signature().to_string();
    if sig.is_empty() {
        out.push_str("signature\n");
    } else {
        writeln!(out, "signature {sig}").expect("write to string");
    }
    write_block(s, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_round_trip() {
        let text = serialize_structure(&FinStructure::chain(3));
        assert_eq!(text, "signature lt/2\nstructure size=3\nlt: (0,1) (0,2) (1,2)\n");
        assert_eq!(parse_structure(&text).unwrap(), FinStructure::chain(3));
    }

    #[test]
    fn normalizes_and_accepts_omitted_relations() {
        let text = "# demo\nsignature R/2 S/1\nstructure size=5\n\nR: (1,2) (0,1) (0,1)\n";
        let s = parse_structure(text).unwrap();
        assert!(s.relation(1).is_empty());
        assert_eq!(
            serialize_structure(&s),
            "signature R/2 S/1\nstructure size=5\nR: (0,1) (1,2)\n"
        );
    }

    #[test]
    fn errors_carry_line_numbers() {
        let bad = "signature R/2\nstructure size=3\nR: (0,1) (2,3)\n";
        assert!(matches!(parse_structure(bad), Err(Error::Parse { line: 3, .. })));
        let arity = "signature R/2\nstructure size=3\nR: (0,1,2)\n";
        assert!(matches!(parse_structure(arity), Err(Error::Parse { line: 3, .. })));
        let header = "signatur R/2\n";
        assert!(matches!(parse_structure(header), Err(Error::Parse { line: 1, .. })));
        let size = "signature R/2\n\nstructure sz=3\n";
        assert!(matches!(parse_structure(size), Err(Error::Parse { line: 3, .. })));
        let unknown = "signature R/2\nstructure size=2\nQ: (0,1)\n";
        assert!(matches!(parse_structure(unknown), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(parse_structure(""), Err(Error::Parse { line: 1, .. })));
    }
}
