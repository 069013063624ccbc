use std::sync::Arc;

use super::element::{CoordRule, UltraElement};
use super::sequence::{StructureSequence, TailRule};
use super::verdict::{final_run_start, FrechetVerdict, LosOutcome};
use crate::error::{Error, Result};
use crate::structure::{
    iso_formula, qf_eval, structure_from_code, Assignment, CanonicalCode, FinStructure, Formula,
    Var,
};

/// Largest coordinate the chain analyzer will evaluate up to.
const EVAL_LIMIT: u128 = 1 << 20;

struct Query<'a> {
    seq: &'a StructureSequence,
    phi: &'a Formula,
    elems: &'a [UltraElement],
    free: Vec<Var>,
}

impl Query<'_> {
    /// Truth of the formula in `M_t`. A coordinate outside the universe makes
    /// the formula false at `t`.
    fn direct(&self, t: usize) -> Result<bool> {
        let m = self.seq.member(t)?;
        let mut asg = Assignment::new();
        for &v in &self.free {
            match self.elems[v].value_at(t, m.size()) {
                Some(x) => {
                    asg.set(v, Some(x));
                }
                None => return Ok(false),
            }
        }
        qf_eval(&m, self.phi, &asg, None)
    }

    /// Truth in the chain of size `n`, evaluated on the chain with every gap
    /// between named points shortened to at most `cap`.
    fn compressed(&self, t: usize, n: usize, cap: usize) -> Result<bool> {
        let mut vals = Vec::with_capacity(self.free.len());
        for &v in &self.free {
            match self.elems[v].value_at(t, n) {
                Some(x) => vals.push(x),
                None => return Ok(false),
            }
        }
        let mut distinct = vals.clone();
        distinct.sort_unstable();
        distinct.dedup();
        let mut mapped = Vec::with_capacity(distinct.len());
        let mut prev: Option<usize> = None;
        let mut pos = 0;
        for &x in &distinct {
            pos = match prev {
                None => x.min(cap),
                Some(p) => pos + 1 + (x - p - 1).min(cap),
            };
            mapped.push(pos);
            prev = Some(x);
        }
        let size = match prev {
            None => n.min(cap),
            Some(p) => pos + 1 + (n - 1 - p).min(cap),
        };
        let chain = FinStructure::chain(size);
        let mut asg = Assignment::new();
        for (&v, x) in self.free.iter().zip(vals) {
            let i = distinct.binary_search(&x).expect("value is listed");
            asg.set(v, Some(mapped[i]));
        }
        qf_eval(&chain, self.phi, &asg, None)
    }

    fn bitmap(&self, horizon: usize) -> Result<Vec<bool>> {
        (0..horizon).map(|t| self.direct(t)).collect()
    }
}

/// `⌊p·t/q⌋ + c`.
#[derive(Debug, Clone, Copy)]
struct Affine {
    p: i128,
    q: i128,
    c: i128,
}

impl Affine {
    fn constant(c: i128) -> Self {
        Affine { p: 0, q: 1, c }
    }
}

enum Tail {
    /// Coordinate equals the affine form for every `t ≥ from`.
    Defined(Affine, usize),
    /// Coordinate is outside the universe for every `t ≥ from`.
    Never(usize),
}

fn ceil_div(x: i128, d: i128) -> i128 {
    -((-x).div_euclid(d))
}

fn nonneg(x: i128) -> usize {
    x.clamp(0, usize::MAX as i128) as usize
}

/// Eventual shape of an element's coordinates when `M_t` is the chain of
/// size `a·t + b`.
fn tail_of(e: &UltraElement, a: usize, b: usize) -> Tail {
    let base = e.prefix.len();
    let (a, b) = (a as i128, b as i128);
    if a == 0 && b == 0 {
        return Tail::Never(base);
    }
    let nonempty = if b >= 1 { 0 } else { 1 };
    let from = |x: i128| base.max(nonneg(x)).max(nonempty);
    match e.rule {
        CoordRule::ConstIndex(i) => {
            let i = i as i128;
            if a == 0 {
                if i < b {
                    Tail::Defined(Affine::constant(i), base)
                } else {
                    Tail::Never(base)
                }
            } else {
                Tail::Defined(Affine::constant(i), from(ceil_div(i + 1 - b, a)))
            }
        }
        CoordRule::Min => Tail::Defined(Affine::constant(0), from(0)),
        CoordRule::Max => Tail::Defined(Affine { p: a, q: 1, c: b - 1 }, from(0)),
        CoordRule::Scaled { p, q } => {
            let (p, q) = (p as i128, q as i128);
            if a == 0 {
                if p == 0 {
                    Tail::Defined(Affine::constant(0), from(0))
                } else {
                    Tail::Defined(Affine::constant(b - 1), from(ceil_div((b - 1) * q, p)))
                }
            } else if p < a * q {
                Tail::Defined(Affine { p, q, c: 0 }, from(ceil_div((1 - b) * q, a * q - p)))
            } else if p > a * q {
                Tail::Defined(
                    Affine { p: a, q: 1, c: b - 1 },
                    from(ceil_div((b - 1) * q, p - a * q)),
                )
            } else {
                let c = if b >= 1 { 0 } else { -1 };
                Tail::Defined(Affine { p: a, q: 1, c }, from(0))
            }
        }
    }
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Past `T*` the order pattern of the named points and all gaps capped at
/// `cap` repeat with period `P`; returns `(T*, P)`.
fn chain_stabilization(
    forms: &[Affine],
    never: Option<usize>,
    floor: usize,
    cap: usize,
) -> Option<(u128, u128)> {
    if let Some(from) = never {
        return Some((floor.max(from) as u128, 1));
    }
    let mut start = floor as i128;
    let mut period: u128 = 1;
    for f in forms {
        let q = f.q as u128;
        period = period.checked_mul(q / gcd(period, q))?;
    }
    let cap = cap as i128;
    for (i, f) in forms.iter().enumerate() {
        for g in &forms[i + 1..] {
            let num = g.p.checked_mul(f.q)? - f.p.checked_mul(g.q)?;
            if num == 0 {
                continue;
            }
            let den = f.q.checked_mul(g.q)?;
            let (num, dc) = if num > 0 { (num, g.c - f.c) } else { (-num, f.c - g.c) };
            let need = (cap.checked_add(3)? - dc).checked_mul(den)?;
            start = start.max(ceil_div(need, num));
        }
    }
    Some((start.max(0) as u128, period))
}

fn analyze_chain(q: &Query<'_>, a: usize, b: usize, horizon: usize) -> Result<LosOutcome> {
    let cap = match q.phi.existential_block_width() {
        Some(w) => w,
        None => 1usize.checked_shl(q.phi.quantifier_rank() as u32).unwrap_or(usize::MAX / 4),
    };
    let prefix = q.seq.prefix_len();
    let mut floor = prefix;
    let mut never = None;
    let mut forms = vec![Affine::constant(-1), Affine { p: a as i128, q: 1, c: b as i128 }];
    for &v in &q.free {
        match tail_of(&q.elems[v], a, b) {
            Tail::Defined(f, from) => {
                forms.push(f);
                floor = floor.max(from);
            }
            Tail::Never(from) => never = Some(never.map_or(from, |n: usize| n.min(from))),
        }
    }
    let stable = chain_stabilization(&forms, never, floor, cap)
        .and_then(|(start, period)| Some((start, start.checked_add(period)?)))
        .filter(|&(_, end)| end <= EVAL_LIMIT.max(horizon as u128));
    let Some((start, end)) = stable else {
        return Ok(LosOutcome {
            verdict: FrechetVerdict::Undecided,
            bitmap: q.bitmap(horizon)?,
        });
    };
    let (start, end) = (start as usize, (end as usize).max(horizon));
    let mut bits = Vec::with_capacity(end);
    for t in 0..end {
        bits.push(if t < prefix {
            q.direct(t)?
        } else {
            q.compressed(t, q.seq.size(t)?, cap)?
        });
    }
    let run = final_run_start(&bits);
    let verdict = if end > 0 && run <= start && run < horizon {
        FrechetVerdict::decided(bits[end - 1], run)
    } else {
        FrechetVerdict::Undecided
    };
    bits.truncate(horizon);
    Ok(LosOutcome { verdict, bitmap: bits })
}

/// Eventual value of a sentence over an embedding-increasing tail, with the
/// coordinate from which it holds. Existential parts persist upwards.
fn eventual(q: &Query<'_>, phi: &Formula, horizon: usize) -> Result<(Option<bool>, usize)> {
    Ok(match phi {
        Formula::True => (Some(true), 0),
        Formula::False => (Some(false), 0),
        Formula::Exists(..) | Formula::Embeds(_) => {
            let sub = Query {
                seq: q.seq,
                phi,
                elems: q.elems,
                free: Vec::new(),
            };
            let mut found = (None, 0);
            for t in q.seq.prefix_len()..horizon {
                if sub.direct(t)? {
                    found = (Some(true), t);
                    break;
                }
            }
            found
        }
        Formula::Not(f) => {
            let (v, from) = eventual(q, f, horizon)?;
            (v.map(|b| !b), from)
        }
        Formula::And(fs) | Formula::Or(fs) => {
            let absorbing = matches!(phi, Formula::Or(_));
            let parts = fs
                .iter()
                .map(|f| eventual(q, f, horizon))
                .collect::<Result<Vec<_>>>()?;
            if let Some(from) = parts
                .iter()
                .filter(|(v, _)| *v == Some(absorbing))
                .map(|&(_, from)| from)
                .min()
            {
                (Some(absorbing), from)
            } else if parts.iter().all(|(v, _)| v.is_some()) {
                (Some(!absorbing), parts.iter().map(|&(_, f)| f).max().unwrap_or(0))
            } else {
                (None, 0)
            }
        }
        _ => (None, 0),
    })
}

fn analyze_increasing(q: &Query<'_>, horizon: usize) -> Result<LosOutcome> {
    let bitmap = q.bitmap(horizon)?;
    let certifiable = q.free.is_empty() && q.phi.existential_block_width().is_some();
    let verdict = match certifiable.then(|| eventual(q, q.phi, horizon)).transpose()? {
        Some((Some(value), from)) if from < horizon => {
            let run = final_run_start(&bitmap);
            debug_assert!(run <= from && bitmap[horizon - 1] == value);
            FrechetVerdict::decided(value, run)
        }
        _ => FrechetVerdict::Undecided,
    };
    Ok(LosOutcome { verdict, bitmap })
}

/// Łoś evaluation of `phi` with variable `v` bound to `elems[v]`: decides
/// whether `{t : M_t ⊨ phi(ā[t])}` is cofinite or co-cofinite, reporting the
/// truth values on `0..horizon`.
///
/// Chain tails are decided through the eventual periodicity of the order type
/// of the named points. Cofinal-chain tails are decided for Boolean
/// combinations of existential sentences. Custom tails stay undecided.
pub fn los_eval(
    seq: &StructureSequence,
    phi: &Formula,
    elems: &[UltraElement],
    horizon: usize,
) -> Result<LosOutcome> {
    if horizon < seq.prefix_len() {
        return Err(Error::HorizonBelowPrefix {
            horizon,
            prefix: seq.prefix_len(),
        });
    }
    if phi.has_color_atoms() {
        return Err(Error::MissingColorOracle);
    }
    phi.check_symbols(seq.signature())?;
    let free: Vec<Var> = phi.free_vars().into_iter().collect();
    if let Some(&v) = free.iter().find(|&&v| v >= elems.len()) {
        return Err(Error::UnboundVariable(v));
    }
    let q = Query {
        seq,
        phi,
        elems,
        free,
    };
    match seq.tail() {
        TailRule::Chain { a, b } => analyze_chain(&q, *a, *b, horizon),
        TailRule::CofinalChain(_) => analyze_increasing(&q, horizon),
        TailRule::Custom { .. } => Ok(LosOutcome {
            verdict: FrechetVerdict::Undecided,
            bitmap: q.bitmap(horizon)?,
        }),
    }
}

/// Whether `A′[t]` is a copy of `a` for Fréchet-almost every `t`.
pub fn copy_defined(
    elems: &[UltraElement],
    a: &FinStructure,
    seq: &StructureSequence,
    horizon: usize,
) -> Result<LosOutcome> {
    if elems.len() != a.size() {
        return Err(Error::LengthMismatch {
            expected: a.size(),
            got: elems.len(),
        });
    }
    let vars: Vec<Var> = (0..a.size()).collect();
    los_eval(seq, &iso_formula(a, &vars)?, elems, horizon)
}

/// For each code, whether the structure it encodes embeds into almost every
/// `M_t`.
pub fn age_union_check(
    seq: &StructureSequence,
    codes: &[CanonicalCode],
    horizon: usize,
) -> Result<Vec<(CanonicalCode, LosOutcome)>> {
    let sig = Arc::new(seq.signature().clone());
    codes
        .iter()
        .map(|code| {
            let d = structure_from_code(sig.clone(), code)?;
            let out = los_eval(seq, &Formula::Embeds(Arc::new(d)), &[], horizon)?;
            Ok((code.clone(), out))
        })
        .collect()
}
