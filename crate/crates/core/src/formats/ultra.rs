use std::collections::BTreeMap;
use std::fmt::Write;
use std::sync::Arc;

use super::lines::{at_line, key_values, only_keys, parse_num, required, Lines};
use super::structure::{parse_block, parse_signature_words, write_block};
use crate::error::{Error, Result};
use crate::structure::{structure_from_code, canonical_code, CanonicalCode, CofinalChainRule, Signature, SubsetCopy};
use crate::ultra::{
    ColoringRule, CoordOverride, CoordRule, PerCoordColorings, StructureSequence, TailRule,
    UltraElement,
};

fn call<'a>(s: &'a str, name: &str) -> Option<&'a str> {
    s.strip_prefix(name)?.strip_prefix('(')?.strip_suffix(')')
}

/// `chain(a*t+b)`, also `chain(t+b)`, `chain(a*t)` and `chain(b)`.
fn parse_chain_rule(line: usize, body: &str) -> Result<(usize, usize)> {
    let body: String = body.chars().filter(|c| !c.is_whitespace()).collect();
    let mut a = 0;
    let mut b = 0;
    for term in body.split('+') {
        if let Some(coef) = term.strip_suffix('t') {
            let coef = coef.strip_suffix('*').unwrap_or(coef);
            a += if coef.is_empty() { 1 } else { parse_num::<usize>(line, "slope", coef)? };
        } else {
            b += parse_num::<usize>(line, "offset", term)?;
        }
    }
    Ok((a, b))
}

fn parse_tail(line: usize, rule: &str) -> Result<TailRule> {
    if let Some(body) = call(rule, "chain") {
        let (a, b) = parse_chain_rule(line, body)?;
        return Ok(TailRule::Chain { a, b });
    }
    match call(rule, "cofinal") {
        Some("chains") => Ok(TailRule::CofinalChain(Arc::new(CofinalChainRule::chains()))),
        Some("cliques") => Ok(TailRule::CofinalChain(Arc::new(CofinalChainRule::cliques()))),
        _ => Err(Error::parse(
            line,
            format!("unknown rule {rule:?}; expected chain(a*t+b), cofinal(chains) or cofinal(cliques)"),
        )),
    }
}

/// `seq signature=R/2,S/1 prefix=<k> rule=<rule>` followed by `k` structure
/// blocks.
pub fn parse_sequence(text: &str) -> Result<StructureSequence> {
    let mut lines = Lines::new(text);
    let (hline, header) = lines.expect("seq header")?;
    let mut words = header.split_whitespace();
    if words.next() != Some("seq") {
        return Err(Error::parse(hline, "malformed header, expected `seq signature=... prefix=... rule=...`"));
    }
    let kv = key_values(hline, &words.collect::<Vec<_>>())?;
    only_keys(hline, &kv, &["signature", "prefix", "rule"])?;
    let sig_words: Vec<&str> = required(hline, &kv, "signature")?
        .split(',')
        .filter(|w| !w.is_empty())
        .collect();
    let sig = Arc::new(parse_signature_words(hline, &sig_words)?);
    let k: usize = parse_num(hline, "prefix length", required(hline, &kv, "prefix")?)?;
    let tail = parse_tail(hline, required(hline, &kv, "rule")?)?;
    let mut prefix = Vec::with_capacity(k);
    for _ in 0..k {
        prefix.push(parse_block(&mut lines, &sig)?);
    }
    if let Some((line, text)) = lines.next() {
        return Err(Error::parse(line, format!("trailing content {text:?}")));
    }
    at_line(hline, StructureSequence::new((*sig).clone(), prefix, tail))
}

pub fn serialize_sequence(seq: &StructureSequence) -> Result<String> {
    let rule = match seq.tail() {
        TailRule::Chain { a, b } => format!("chain({a}*t+{b})"),
        TailRule::CofinalChain(r) if matches!(r.name(), "chains" | "cliques") => {
            format!("cofinal({})", r.name())
        }
        other => {
            return Err(Error::InvalidArgument(format!("rule {other} has no text form")));
        }
    };
    let sig: Vec<String> = seq
        .signature()
        .relations()
        .iter()
        .map(|r| format!("{}/{}", r.name, r.arity))
        .collect();
    let mut out = format!(
        "seq signature={} prefix={} rule={rule}\n",
        sig.join(","),
        seq.prefix_len()
    );
    for m in seq.prefix() {
        write_block(m, &mut out);
    }
    Ok(out)
}

fn parse_coord_rule(line: usize, s: &str) -> Result<CoordRule> {
    match s {
        "min" => return Ok(CoordRule::Min),
        "max" => return Ok(CoordRule::Max),
        _ => {}
    }
    if let Some(i) = call(s, "const") {
        return Ok(CoordRule::ConstIndex(parse_num(line, "index", i)?));
    }
    if let Some(pq) = call(s, "scaled") {
        let (p, q) = pq
            .split_once('/')
            .ok_or_else(|| Error::parse(line, "expected scaled(p/q)"))?;
        let (p, q) = (parse_num(line, "numerator", p)?, parse_num(line, "denominator", q)?);
        if q == 0 {
            return Err(Error::parse(line, "denominator must be positive"));
        }
        return Ok(CoordRule::Scaled { p, q });
    }
    Err(Error::parse(line, format!("unknown coordinate rule {s:?}")))
}

fn parse_list(line: usize, s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .filter(|x| !x.is_empty())
        .map(|x| parse_num(line, "value", x))
        .collect()
}

/// One element per line: `<rule> [prefix=v0,v1,...]` with rule `const(i)`,
/// `min`, `max` or `scaled(p/q)`.
pub fn parse_elements(text: &str) -> Result<Vec<UltraElement>> {
    let mut lines = Lines::new(text);
    let mut out = Vec::new();
    while let Some((line, l)) = lines.next() {
        let mut words = l.split_whitespace();
        let rule = parse_coord_rule(line, words.next().expect("line is nonempty"))?;
        let kv = key_values(line, &words.collect::<Vec<_>>())?;
        only_keys(line, &kv, &["prefix"])?;
        let prefix = match kv.first() {
            Some((_, v)) => parse_list(line, v)?,
            None => Vec::new(),
        };
        out.push(at_line(line, UltraElement::new(prefix, rule))?);
    }
    Ok(out)
}

pub fn serialize_elements(elems: &[UltraElement]) -> String {
    elems.iter().map(|e| format!("{e}\n")).collect()
}

fn parse_coloring_rule(line: usize, s: &str) -> Result<ColoringRule> {
    if s == "parity" {
        return Ok(ColoringRule::Parity);
    }
    if let Some(j) = call(s, "constant") {
        return Ok(ColoringRule::Constant(parse_num(line, "color", j)?));
    }
    if let Some(seed) = call(s, "hashed") {
        return Ok(ColoringRule::Hashed { seed: parse_num(line, "seed", seed)? });
    }
    if let Some(n) = call(s, "by-devlin") {
        return Ok(ColoringRule::ByDevlin { n: parse_num(line, "n", n)? });
    }
    Err(Error::parse(line, format!("unknown coloring rule {s:?}")))
}

/// Per-coordinate colorings:
/// ```text
/// colorings k=2 pattern=<code> rule=constant(1)
/// exclude 3 5
/// override t=4 default=0
/// override t=6 copy=0,2 -> 1
/// ```
/// The pattern is rebuilt over `signature`.
pub fn parse_colorings(text: &str, signature: &Signature) -> Result<PerCoordColorings> {
    let mut lines = Lines::new(text);
    let (hline, header) = lines.expect("colorings header")?;
    let mut words = header.split_whitespace();
    if words.next() != Some("colorings") {
        return Err(Error::parse(hline, "malformed header, expected `colorings k=... pattern=... rule=...`"));
    }
    let kv = key_values(hline, &words.collect::<Vec<_>>())?;
    only_keys(hline, &kv, &["k", "pattern", "rule"])?;
    let k: usize = parse_num(hline, "k", required(hline, &kv, "k")?)?;
    let code = at_line(hline, CanonicalCode::from_hex(required(hline, &kv, "pattern")?))?;
    let pattern = at_line(hline, structure_from_code(signature.clone(), &code))?;
    let rule = parse_coloring_rule(hline, required(hline, &kv, "rule")?)?;
    let mut cols = at_line(hline, PerCoordColorings::new(pattern, k, rule))?;
    let mut overrides: BTreeMap<usize, (usize, CoordOverride)> = BTreeMap::new();
    while let Some((line, l)) = lines.next() {
        if let Some(rest) = l.strip_prefix("exclude") {
            let ts: Vec<usize> = rest
                .split_whitespace()
                .map(|x| parse_num(line, "coordinate", x))
                .collect::<Result<_>>()?;
            cols = cols.with_excluded(ts);
        } else if let Some(rest) = l.strip_prefix("override") {
            let (lhs, color) = match rest.split_once("->") {
                Some((lhs, c)) => (lhs, Some(parse_num::<usize>(line, "color", c)?)),
                None => (rest, None),
            };
            let kv = key_values(line, &lhs.split_whitespace().collect::<Vec<_>>())?;
            only_keys(line, &kv, &["t", "default", "copy"])?;
            let t: usize = parse_num(line, "coordinate", required(line, &kv, "t")?)?;
            let entry = overrides.entry(t).or_insert((line, CoordOverride::default()));
            match (kv.iter().find(|(k, _)| *k == "default"), kv.iter().find(|(k, _)| *k == "copy"), color) {
                (Some((_, d)), None, None) => {
                    if entry.1.default.replace(parse_num(line, "color", d)?).is_some() {
                        return Err(Error::parse(line, format!("second default for t = {t}")));
                    }
                }
                (None, Some((_, c)), Some(color)) => {
                    let copy = SubsetCopy::from_unsorted(parse_list(line, c)?);
                    if entry.1.copies.insert(copy, color).is_some() {
                        return Err(Error::parse(line, "copy overridden twice"));
                    }
                }
                _ => {
                    return Err(Error::parse(
                        line,
                        "expected `override t=<t> default=<j>` or `override t=<t> copy=<i,..> -> <j>`",
                    ))
                }
            }
        } else {
            return Err(Error::parse(line, format!("unexpected line {l:?}")));
        }
    }
    for (t, (line, ov)) in overrides {
        cols = at_line(line, cols.with_override(t, ov))?;
    }
    Ok(cols)
}

pub fn serialize_colorings(cols: &PerCoordColorings) -> Result<String> {
    if let ColoringRule::Custom { name, .. } = cols.rule() {
        return Err(Error::InvalidArgument(format!("custom rule {name} has no text form")));
    }
    let mut out = format!(
        "colorings k={} pattern={} rule={}\n",
        cols.k(),
        canonical_code(cols.pattern()),
        cols.rule()
    );
    if !cols.excluded().is_empty() {
        out.push_str("exclude");
        for t in cols.excluded() {
            write!(out, " {t}").expect("write to string");
        }
        out.push('\n');
    }
    for (t, ov) in cols.overrides() {
        if let Some(d) = ov.default {
            writeln!(out, "override t={t} default={d}").expect("write to string");
        }
        for (copy, c) in &ov.copies {
            let elems: Vec<String> = copy.elements().iter().map(|x| x.to_string()).collect();
            writeln!(out, "override t={t} copy={} -> {c}", elems.join(",")).expect("write to string");
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::FinStructure;

    #[test]
    fn sequence_round_trip() {
        let text = "seq signature=lt/2 prefix=2 rule=chain(2*t+1)\nstructure size=2\nlt: (0,1)\nstructure size=1\n";
        let seq = parse_sequence(text).unwrap();
        assert_eq!(seq.prefix_len(), 2);
        assert_eq!(seq.size(5).unwrap(), 11);
        assert_eq!(serialize_sequence(&seq).unwrap(), text);
        let short = parse_sequence("seq signature=lt/2 prefix=0 rule=chain(t+1)\n").unwrap();
        assert_eq!(short.size(3).unwrap(), 4);
        let graphs = parse_sequence("seq signature=E/2 prefix=0 rule=cofinal(cliques)\n").unwrap();
        assert_eq!(graphs.size(3).unwrap(), 3);
        assert!(matches!(
            parse_sequence("seq signature=lt/2 prefix=1 rule=chain(t+1)\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_sequence("seq signature=lt/2 prefix=0 rule=wave(t)\n"),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn element_round_trip() {
        let text = "const(3)\nscaled(1/3) prefix=0,1\nmax\nmin prefix=2\n";
        let elems = parse_elements(text).unwrap();
        assert_eq!(elems[1].rule, CoordRule::Scaled { p: 1, q: 3 });
        assert_eq!(serialize_elements(&elems), text);
        assert!(matches!(parse_elements("min\nscaled(1/0)\n"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn colorings_round_trip() {
        let code = canonical_code(&FinStructure::chain(2));
        let text = format!(
            "colorings k=3 pattern={code} rule=constant(1)\nexclude 2 7\noverride t=4 default=0\noverride t=6 copy=0,2 -> 2\n"
        );
        let cols = parse_colorings(&text, &Signature::order()).unwrap();
        assert_eq!(cols.excluded().len(), 2);
        assert_eq!(serialize_colorings(&cols).unwrap(), text);
        let bad = text.replace("-> 2", "-> 3");
        assert!(matches!(
            parse_colorings(&bad, &Signature::order()),
            Err(Error::Parse { line: 4, .. })
        ));
    }
}
