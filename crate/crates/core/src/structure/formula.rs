//! Existential-prefix formulas over a relational signature, optionally with
//! color atoms, and their evaluation in finite structures.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use super::embed::{embeds, enumerate_copies};
use super::model::{FinStructure, Signature, SubsetCopy};
use crate::error::{Error, Result};

pub type Var = usize;

/// Formula syntax. Relation atoms refer to symbols by their index in the
/// signature the formula is evaluated against.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    True,
    False,
    Rel { symbol: usize, args: Vec<Var> },
    Eq(Var, Var),
    /// `color-of(args) = color`; the copy is the sorted set of the values.
    ColorIs { args: Vec<Var>, color: usize },
    /// Shorthand for `∃x̄ θ_D(x̄)`: the structure embeds.
    Embeds(Arc<FinStructure>),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Exists(Vec<Var>, Box<Formula>),
}

/// Supplies per-copy colors for color atoms.
pub trait ColorOracle {
    fn color(&self, copy: &SubsetCopy) -> Option<usize>;
}

impl<F: Fn(&SubsetCopy) -> Option<usize>> ColorOracle for F {
    fn color(&self, copy: &SubsetCopy) -> Option<usize> {
        self(copy)
    }
}

impl Formula {
    pub fn rel(symbol: usize, args: Vec<Var>) -> Self {
        Formula::Rel { symbol, args }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn exists(vars: Vec<Var>, body: Formula) -> Self {
        Formula::Exists(vars, Box::new(body))
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut BTreeSet::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut BTreeSet<Var>, out: &mut BTreeSet<Var>) {
        match self {
            Formula::True | Formula::False | Formula::Embeds(_) => {}
            Formula::Rel { args, .. } | Formula::ColorIs { args, .. } => {
                out.extend(args.iter().filter(|v| !bound.contains(v)));
            }
            Formula::Eq(a, b) => {
                out.extend([a, b].into_iter().filter(|v| !bound.contains(v)));
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(fs) | Formula::Or(fs) => {
                for f in fs {
                    f.collect_free(bound, out);
                }
            }
            Formula::Exists(vs, body) => {
                let newly: Vec<Var> = vs.iter().copied().filter(|v| bound.insert(*v)).collect();
                body.collect_free(bound, out);
                for v in newly {
                    bound.remove(&v);
                }
            }
        }
    }

    pub fn has_color_atoms(&self) -> bool {
        match self {
            Formula::ColorIs { .. } => true,
            Formula::Not(f) | Formula::Exists(_, f) => f.has_color_atoms(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().any(Formula::has_color_atoms),
            _ => false,
        }
    }

    /// Largest relation symbol index mentioned, if any.
    pub(crate) fn check_symbols(&self, signature: &Signature) -> Result<()> {
        match self {
            Formula::Rel { symbol, args } => {
                if *symbol >= signature.len() {
                    return Err(Error::InvalidArgument(format!(
                        "relation symbol #{symbol} not in signature"
                    )));
                }
                if signature.arity(*symbol) != args.len() {
                    return Err(Error::InvalidArgument(format!(
                        "{} applied to {} arguments",
                        signature.relations()[*symbol].name,
                        args.len()
                    )));
                }
                Ok(())
            }
            Formula::Embeds(d) => {
                if d.signature() != signature {
                    Err(Error::SignatureMismatch)
                } else {
                    Ok(())
                }
            }
            Formula::Not(f) | Formula::Exists(_, f) => f.check_symbols(signature),
            Formula::And(fs) | Formula::Or(fs) => {
                fs.iter().try_for_each(|f| f.check_symbols(signature))
            }
            _ => Ok(()),
        }
    }

    /// Nesting depth of quantified variables; `Embeds(D)` counts `|D|`.
    pub fn quantifier_rank(&self) -> usize {
        match self {
            Formula::Embeds(d) => d.size(),
            Formula::Not(f) => f.quantifier_rank(),
            Formula::And(fs) | Formula::Or(fs) => {
                fs.iter().map(Formula::quantifier_rank).max().unwrap_or(0)
            }
            Formula::Exists(vs, body) => vs.len() + body.quantifier_rank(),
            _ => 0,
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        self.quantifier_rank() == 0
    }

    /// If the formula is a Boolean combination of quantifier-free parts and
    /// existential blocks with quantifier-free bodies, returns the largest
    /// block width.
    pub fn existential_block_width(&self) -> Option<usize> {
        match self {
            Formula::Embeds(d) => Some(d.size()),
            Formula::Exists(vs, body) => {
                if body.is_quantifier_free() {
                    Some(vs.len())
                } else if let Formula::Exists(..) = body.as_ref() {
                    // nested prefix ∃x ∃y ψ
                    let inner = body.existential_prefix_width()?;
                    Some(vs.len() + inner)
                } else {
                    None
                }
            }
            Formula::Not(f) => f.existential_block_width(),
            Formula::And(fs) | Formula::Or(fs) => fs
                .iter()
                .map(Formula::existential_block_width)
                .try_fold(0, |acc, w| w.map(|w| acc.max(w))),
            _ => Some(0),
        }
    }

    fn existential_prefix_width(&self) -> Option<usize> {
        match self {
            Formula::Exists(vs, body) => {
                if body.is_quantifier_free() {
                    Some(vs.len())
                } else {
                    body.existential_prefix_width().map(|w| w + vs.len())
                }
            }
            _ => None,
        }
    }

    /// Expands `Embeds(D)` into `∃x̄ θ_D(x̄)` using fresh variables above
    /// every variable already used.
    pub fn expand_embeds(&self) -> Formula {
        let mut next = self.max_var().map_or(0, |v| v + 1);
        self.expand_with(&mut next)
    }

    fn expand_with(&self, next: &mut Var) -> Formula {
        match self {
            Formula::Embeds(d) => {
                let vars: Vec<Var> = (*next..*next + d.size()).collect();
                *next += d.size();
                Formula::exists(vars.clone(), theta_formula(d, &vars))
            }
            Formula::Not(f) => Formula::not(f.expand_with(next)),
            Formula::And(fs) => Formula::And(fs.iter().map(|f| f.expand_with(next)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|f| f.expand_with(next)).collect()),
            Formula::Exists(vs, b) => Formula::exists(vs.clone(), b.expand_with(next)),
            other => other.clone(),
        }
    }

    fn max_var(&self) -> Option<Var> {
        match self {
            Formula::Rel { args, .. } | Formula::ColorIs { args, .. } => args.iter().copied().max(),
            Formula::Eq(a, b) => Some(*a.max(b)),
            Formula::Not(f) => f.max_var(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().filter_map(Formula::max_var).max(),
            Formula::Exists(vs, b) => vs.iter().copied().chain(b.max_var()).max(),
            _ => None,
        }
    }

    /// Renders the formula in the text syntax, using signature symbol names.
    pub fn display<'a>(&'a self, signature: &'a Signature) -> FormulaDisplay<'a> {
        FormulaDisplay {
            formula: self,
            signature,
        }
    }
}

pub struct FormulaDisplay<'a> {
    formula: &'a Formula,
    signature: &'a Signature,
}

impl fmt::Display for FormulaDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(self.formula, self.signature, f)
    }
}

fn write_args(args: &[Var], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    for (i, v) in args.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "x{v}")?;
    }
    Ok(())
}

fn write_formula(phi: &Formula, sig: &Signature, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match phi {
        Formula::True => f.write_str("true"),
        Formula::False => f.write_str("false"),
        Formula::Rel { symbol, args } => {
            write!(f, "{}(", sig.relations()[*symbol].name)?;
            write_args(args, f)?;
            f.write_str(")")
        }
        Formula::Eq(a, b) => write!(f, "x{a} = x{b}"),
        Formula::ColorIs { args, color } => {
            f.write_str("color(")?;
            write_args(args, f)?;
            write!(f, ") = {color}")
        }
        Formula::Embeds(d) => {
            write!(f, "embeds[{}]", super::canon::canonical_code(d))
        }
        Formula::Not(inner) => {
            f.write_str("!(")?;
            write_formula(inner, sig, f)?;
            f.write_str(")")
        }
        Formula::And(fs) | Formula::Or(fs) => {
            if fs.is_empty() {
                return f.write_str(if matches!(phi, Formula::And(_)) {
                    "true"
                } else {
                    "false"
                });
            }
            let op = if matches!(phi, Formula::And(_)) { " & " } else { " | " };
            f.write_str("(")?;
            for (i, g) in fs.iter().enumerate() {
                if i > 0 {
                    f.write_str(op)?;
                }
                write_formula(g, sig, f)?;
            }
            f.write_str(")")
        }
        Formula::Exists(vs, body) => {
            f.write_str("(exists")?;
            for v in vs {
                write!(f, " x{v}")?;
            }
            f.write_str(" . ")?;
            write_formula(body, sig, f)?;
            f.write_str(")")
        }
    }
}

/// `θ_A(vars)`: the diagram of `a` read through `vars[i] ↦ element i`.
pub fn theta_formula(a: &FinStructure, vars: &[Var]) -> Formula {
    assert_eq!(vars.len(), a.size(), "one variable per element");
    let mut lits = Vec::new();
    for i in 0..vars.len() {
        for j in i + 1..vars.len() {
            lits.push(Formula::not(Formula::Eq(vars[i], vars[j])));
        }
    }
    for (sym, r) in a.signature().relations().iter().enumerate() {
        let mut t = vec![0; r.arity];
        loop {
            let atom = Formula::rel(sym, t.iter().map(|&x| vars[x]).collect());
            lits.push(if a.holds(sym, &t) {
                atom
            } else {
                Formula::not(atom)
            });
            let mut i = r.arity;
            let mut done = true;
            while i > 0 {
                i -= 1;
                t[i] += 1;
                if t[i] < a.size() {
                    done = false;
                    break;
                }
                t[i] = 0;
            }
            if done {
                break;
            }
        }
    }
    Formula::And(lits)
}

/// `∃x̄ θ_A(x̄)` spelled out with variables `0..|A|`.
pub fn exists_copy_formula(a: &FinStructure) -> Formula {
    let vars: Vec<Var> = (0..a.size()).collect();
    Formula::exists(vars.clone(), theta_formula(a, &vars))
}

/// The elements named by `vars` form a copy of `a` under some enumeration.
pub fn iso_formula(a: &FinStructure, vars: &[Var]) -> Result<Formula> {
    if a.size() > 8 {
        return Err(Error::InvalidArgument(
            "isomorphism formulas are limited to 8 elements".into(),
        ));
    }
    if vars.len() != a.size() {
        return Err(Error::LengthMismatch {
            expected: a.size(),
            got: vars.len(),
        });
    }
    let mut disjuncts = Vec::new();
    let mut perm: Vec<usize> = (0..vars.len()).collect();
    loop {
        let permuted: Vec<Var> = perm.iter().map(|&p| vars[p]).collect();
        disjuncts.push(theta_formula(a, &permuted));
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(Formula::Or(disjuncts))
}

pub(crate) fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// `φ_{B,S}`: some copy of `b` has all its copies of `a` colored from `s`.
pub fn phi_bs_formula(b: &FinStructure, a: &FinStructure, s: &BTreeSet<usize>) -> Formula {
    let vars: Vec<Var> = (0..b.size()).collect();
    let mut conj = vec![theta_formula(b, &vars)];
    for copy in enumerate_copies(a, b) {
        let args: Vec<Var> = copy.elements().to_vec();
        conj.push(Formula::Or(
            s.iter()
                .map(|&color| Formula::ColorIs {
                    args: args.clone(),
                    color,
                })
                .collect(),
        ));
    }
    Formula::exists(vars, Formula::And(conj))
}

/// Variable assignment used during evaluation.
#[derive(Debug, Clone, Default)]
pub struct Assignment(Vec<Option<usize>>);

impl Assignment {
    pub fn new() -> Self {
        Assignment(Vec::new())
    }

    pub fn from_values(values: &[usize]) -> Self {
        Assignment(values.iter().map(|&v| Some(v)).collect())
    }

    pub fn get(&self, v: Var) -> Option<usize> {
        self.0.get(v).copied().flatten()
    }

    pub fn set(&mut self, v: Var, value: Option<usize>) -> Option<usize> {
        if self.0.len() <= v {
            self.0.resize(v + 1, None);
        }
        std::mem::replace(&mut self.0[v], value)
    }
}

impl From<&BTreeMap<Var, usize>> for Assignment {
    fn from(m: &BTreeMap<Var, usize>) -> Self {
        let mut a = Assignment::new();
        for (&k, &v) in m {
            a.set(k, Some(v));
        }
        a
    }
}

struct Evaluator<'a> {
    n: &'a FinStructure,
    oracle: Option<&'a dyn ColorOracle>,
}

impl Evaluator<'_> {
    /// Kleene evaluation: `None` when the value depends on unbound variables.
    fn partial(&self, phi: &Formula, asg: &mut Assignment) -> Result<Option<bool>> {
        Ok(match phi {
            Formula::True => Some(true),
            Formula::False => Some(false),
            Formula::Rel { symbol, args } => {
                let vals: Option<Vec<usize>> = args.iter().map(|&v| asg.get(v)).collect();
                vals.map(|t| self.n.holds(*symbol, &t))
            }
            Formula::Eq(a, b) => match (asg.get(*a), asg.get(*b)) {
                (Some(x), Some(y)) => Some(x == y),
                _ => None,
            },
            Formula::ColorIs { args, color } => {
                let vals: Option<Vec<usize>> = args.iter().map(|&v| asg.get(v)).collect();
                match vals {
                    None => None,
                    Some(vals) => {
                        let oracle = self.oracle.ok_or(Error::MissingColorOracle)?;
                        let mut sorted = vals.clone();
                        sorted.sort_unstable();
                        sorted.dedup();
                        if sorted.len() != vals.len() {
                            Some(false)
                        } else {
                            let copy = SubsetCopy::from_sorted_unchecked(sorted);
                            Some(oracle.color(&copy) == Some(*color))
                        }
                    }
                }
            }
            Formula::Embeds(d) => Some(embeds(d, self.n)),
            Formula::Not(f) => self.partial(f, asg)?.map(|b| !b),
            Formula::And(fs) => {
                let mut unknown = false;
                for f in fs {
                    match self.partial(f, asg)? {
                        Some(false) => return Ok(Some(false)),
                        None => unknown = true,
                        Some(true) => {}
                    }
                }
                (!unknown).then_some(true)
            }
            Formula::Or(fs) => {
                let mut unknown = false;
                for f in fs {
                    match self.partial(f, asg)? {
                        Some(true) => return Ok(Some(true)),
                        None => unknown = true,
                        Some(false) => {}
                    }
                }
                (!unknown).then_some(false)
            }
            Formula::Exists(vs, body) => {
                let closed = phi.free_vars().iter().all(|&v| asg.get(v).is_some());
                if closed {
                    Some(self.exists(vs, 0, body, asg)?)
                } else {
                    None
                }
            }
        })
    }

    fn exists(&self, vs: &[Var], i: usize, body: &Formula, asg: &mut Assignment) -> Result<bool> {
        if i == vs.len() {
            return Ok(self
                .partial(body, asg)?
                .expect("body closed once all quantified variables are bound"));
        }
        let saved: Vec<Option<usize>> = vs[i..].iter().map(|&v| asg.set(v, None)).collect();
        let mut result = false;
        for x in 0..self.n.size() {
            asg.set(vs[i], Some(x));
            let verdict = if i + 1 < vs.len() {
                match self.partial(body, asg)? {
                    Some(false) => continue,
                    Some(true) => {
                        result = true;
                        break;
                    }
                    None => self.exists(vs, i + 1, body, asg)?,
                }
            } else {
                self.exists(vs, i + 1, body, asg)?
            };
            if verdict {
                result = true;
                break;
            }
        }
        for (&v, old) in vs[i..].iter().zip(saved) {
            asg.set(v, old);
        }
        Ok(result)
    }
}

/// Evaluates `phi` in `n`. Every free variable must be bound; color atoms need
/// an oracle. Existential quantifiers range over the universe, with partial
/// assignments pruned as soon as the body is decided.
pub fn qf_eval(
    n: &FinStructure,
    phi: &Formula,
    assignment: &Assignment,
    oracle: Option<&dyn ColorOracle>,
) -> Result<bool> {
    phi.check_symbols(n.signature())?;
    for v in phi.free_vars() {
        match assignment.get(v) {
            None => return Err(Error::UnboundVariable(v)),
            Some(x) if x >= n.size() => {
                return Err(Error::IndexOutOfRange {
                    index: x,
                    size: n.size(),
                })
            }
            _ => {}
        }
    }
    if phi.has_color_atoms() && oracle.is_none() {
        return Err(Error::MissingColorOracle);
    }
    let mut asg = assignment.clone();
    let ev = Evaluator { n, oracle };
    Ok(ev
        .partial(phi, &mut asg)?
        .expect("closed formula evaluates to a value"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lt(a: Var, b: Var) -> Formula {
        Formula::rel(0, vec![a, b])
    }

    #[test]
    fn exists_pair_examples() {
        let phi = Formula::exists(vec![0, 1], lt(0, 1));
        let none = Assignment::new();
        assert!(qf_eval(&FinStructure::chain(2), &phi, &none, None).unwrap());
        assert!(!qf_eval(&FinStructure::chain(1), &phi, &none, None).unwrap());
    }

    #[test]
    fn guarded_sentence_with_constant_oracle() {
        let b = FinStructure::chain(3);
        let a = FinStructure::chain(2);
        let s: BTreeSet<usize> = [0].into();
        let phi = phi_bs_formula(&b, &a, &s);
        let zero = |_: &SubsetCopy| Some(0);
        for n in 1..6 {
            let got = qf_eval(&FinStructure::chain(n), &phi, &Assignment::new(), Some(&zero)).unwrap();
            assert_eq!(got, n >= 3);
        }
    }

    #[test]
    fn errors() {
        let phi = lt(0, 1);
        assert_eq!(
            qf_eval(&FinStructure::chain(2), &phi, &Assignment::from_values(&[0]), None),
            Err(Error::UnboundVariable(1))
        );
        let c = Formula::ColorIs {
            args: vec![0],
            color: 0,
        };
        assert_eq!(
            qf_eval(&FinStructure::chain(2), &c, &Assignment::from_values(&[0]), None),
            Err(Error::MissingColorOracle)
        );
    }

    #[test]
    fn shadowed_variables_are_not_free() {
        let phi = Formula::And(vec![lt(0, 1), Formula::exists(vec![0], lt(0, 1))]);
        let fv: Vec<_> = phi.free_vars().into_iter().collect();
        assert_eq!(fv, vec![0, 1]);
        let psi = Formula::exists(vec![0], lt(0, 1));
        assert_eq!(psi.free_vars().into_iter().collect::<Vec<_>>(), vec![1]);
    }

    #[test]
    fn embeds_matches_expansion() {
        let d = Arc::new(FinStructure::chain(3));
        let phi = Formula::Embeds(d.clone());
        let ex = phi.expand_embeds();
        for n in 1..6 {
            let s = FinStructure::chain(n);
            assert_eq!(
                qf_eval(&s, &phi, &Assignment::new(), None).unwrap(),
                qf_eval(&s, &ex, &Assignment::new(), None).unwrap()
            );
        }
    }

    #[test]
    fn iso_formula_accepts_any_enumeration() {
        let a = FinStructure::chain(2);
        let phi = iso_formula(&a, &[0, 1]).unwrap();
        let n = FinStructure::chain(3);
        assert!(qf_eval(&n, &phi, &Assignment::from_values(&[2, 0]), None).unwrap());
        assert!(!qf_eval(&n, &phi, &Assignment::from_values(&[1, 1]), None).unwrap());
    }

    #[test]
    fn block_width() {
        let phi = Formula::not(Formula::exists(vec![0], lt(0, 0)));
        assert_eq!(phi.existential_block_width(), Some(1));
        let nested = Formula::exists(vec![0], Formula::not(Formula::exists(vec![1], lt(0, 1))));
        assert_eq!(nested.existential_block_width(), None);
        assert_eq!(nested.quantifier_rank(), 2);
    }
}
