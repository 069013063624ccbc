use std::sync::Arc;

use crate::error::{Error, Result};
use crate::structure::{structure_from_code, CanonicalCode, Formula, Signature, Var};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Num(usize),
    Sym(char),
    Code(String),
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut chars = content.char_indices().peekable();
        while let Some(&(start, c)) = chars.peek() {
            if c.is_whitespace() {
                chars.next();
            } else if c.is_ascii_digit() {
                let mut end = start;
                while let Some(&(j, d)) = chars.peek() {
                    if !d.is_ascii_digit() {
                        break;
                    }
                    end = j + 1;
                    chars.next();
                }
                let n = content[start..end]
                    .parse()
                    .map_err(|_| Error::parse(line, "number too large"))?;
                out.push((line, Tok::Num(n)));
            } else if c.is_ascii_alphabetic() || c == '_' {
                let mut end = start;
                while let Some(&(j, d)) = chars.peek() {
                    if !(d.is_ascii_alphanumeric() || d == '_') {
                        break;
                    }
                    end = j + 1;
                    chars.next();
                }
                out.push((line, Tok::Word(content[start..end].to_string())));
            } else if c == '[' {
                chars.next();
                let mut code = String::new();
                loop {
                    match chars.next() {
                        Some((_, ']')) => break,
                        Some((_, d)) => code.push(d),
                        None => return Err(Error::parse(line, "unterminated `[`")),
                    }
                }
                out.push((line, Tok::Code(code.trim().to_string())));
            } else if "()!&|.=,".contains(c) {
                chars.next();
                out.push((line, Tok::Sym(c)));
            } else {
                return Err(Error::parse(line, format!("unexpected character {c:?}")));
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    sig: &'a Arc<Signature>,
    last_line: usize,
}

impl Parser<'_> {
    fn line(&self) -> usize {
        self.toks.get(self.pos).map_or(self.last_line, |t| t.0)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.1.clone());
        self.pos += 1;
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::parse(self.line(), msg))
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected `{c}`"))
        }
    }

    fn var(&mut self) -> Result<Var> {
        match self.peek() {
            Some(Tok::Word(w)) if w.len() > 1 && w.starts_with('x') => {
                let v = w[1..].parse().or_else(|_| self.err(format!("invalid variable {w:?}")))?;
                self.pos += 1;
                Ok(v)
            }
            _ => self.err("expected a variable `x<n>`"),
        }
    }

    fn var_list(&mut self) -> Result<Vec<Var>> {
        self.expect('(')?;
        let mut vs = vec![self.var()?];
        while self.eat(',') {
            vs.push(self.var()?);
        }
        self.expect(')')?;
        Ok(vs)
    }

    fn or(&mut self) -> Result<Formula> {
        let mut parts = vec![self.and()?];
        while self.eat('|') {
            parts.push(self.and()?);
        }
        Ok(if parts.len() == 1 { parts.pop().expect("one part") } else { Formula::Or(parts) })
    }

    fn and(&mut self) -> Result<Formula> {
        let mut parts = vec![self.unary()?];
        while self.eat('&') {
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 { parts.pop().expect("one part") } else { Formula::And(parts) })
    }

    fn unary(&mut self) -> Result<Formula> {
        if self.eat('!') {
            return Ok(Formula::not(self.unary()?));
        }
        if self.peek() == Some(&Tok::Word("exists".into())) {
            self.pos += 1;
            let mut vs = vec![self.var()?];
            while !self.eat('.') {
                vs.push(self.var()?);
            }
            return Ok(Formula::exists(vs, self.or()?));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Formula> {
        let line = self.line();
        match self.bump() {
            Some(Tok::Sym('(')) => {
                let f = self.or()?;
                self.expect(')')?;
                Ok(f)
            }
            Some(Tok::Word(w)) => match w.as_str() {
                "true" => Ok(Formula::True),
                "false" => Ok(Formula::False),
                "embeds" => match self.bump() {
                    Some(Tok::Code(hex)) => {
                        let code = CanonicalCode::from_hex(&hex)
                            .map_err(|e| Error::parse(line, e.to_string()))?;
                        let d = structure_from_code(self.sig.clone(), &code)
                            .map_err(|e| Error::parse(line, e.to_string()))?;
                        Ok(Formula::Embeds(Arc::new(d)))
                    }
                    _ => Err(Error::parse(line, "expected `[code]` after embeds")),
                },
                "color" => {
                    let args = self.var_list()?;
                    self.expect('=')?;
                    match self.bump() {
                        Some(Tok::Num(color)) => Ok(Formula::ColorIs { args, color }),
                        _ => Err(Error::parse(line, "expected a color number")),
                    }
                }
                _ if self.peek() == Some(&Tok::Sym('(')) => {
                    let symbol = self
                        .sig
                        .index_of(&w)
                        .ok_or_else(|| Error::parse(line, format!("unknown relation symbol {w:?}")))?;
                    let args = self.var_list()?;
                    if args.len() != self.sig.arity(symbol) {
                        return Err(Error::parse(
                            line,
                            format!("{w} has arity {}, applied to {}", self.sig.arity(symbol), args.len()),
                        ));
                    }
                    Ok(Formula::rel(symbol, args))
                }
                _ => {
                    self.pos -= 1;
                    let a = self.var()?;
                    self.expect('=')?;
                    let b = self.var()?;
                    Ok(Formula::Eq(a, b))
                }
            },
            Some(t) => Err(Error::parse(line, format!("unexpected token {t:?}"))),
            None => Err(Error::parse(line, "unexpected end of formula")),
        }
    }
}

/// Parses the formula text syntax over `signature`: `R(x0,x1)`, `x0 = x1`,
/// `color(x0,x1) = 2`, `embeds[<code>]`, `true`, `false`, `!φ`, `φ & ψ`,
/// `φ | ψ`, `exists x0 x1 . φ` and parentheses. `#` starts a comment.
pub fn parse_formula(text: &str, signature: &Signature) -> Result<Formula> {
    let toks = tokenize(text)?;
    let sig = Arc::new(signature.clone());
    let mut p = Parser {
        last_line: text.lines().count().max(1),
        toks,
        pos: 0,
        sig: &sig,
    };
    let f = p.or()?;
    if p.pos < p.toks.len() {
        return p.err("trailing input after formula");
    }
    Ok(f)
}

pub fn serialize_formula(phi: &Formula, signature: &Signature) -> String {
    format!("{}\n", phi.display(signature))
}
