use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, ValueEnum};
use ramsey_core::arrow::{arrow_check, arrow_check_parallel, degree_search, ArrowOutcome};
use ramsey_core::formats::*;
use ramsey_core::structure::{
    verify_cofinal_chain, AllStructures, Chains, ClassEnumerator, Cliques, CofinalChainRule, FinStructure,
    Graphs,
};
use ramsey_core::tree::{
    antichain_x, build_w0, check_w0, devlin_color, devlin_types, enumerate_devlin_types,
    meet_closure, prune_perfect, prune_with_leaves, tangent, DevlinColor as TreeColor,
};
use ramsey_core::ultra::{
    internal_color, los_eval, transfer_shadow, ColoringRule, FrechetVerdict, InternalColor,
    PerCoordColorings, StructureSequence, TailRule,
};
use ramsey_core::Error;
use serde_json::{json, Value};

pub struct Outcome {
    pub exit: i32,
    pub result: Value,
    pub text: String,
}

impl Outcome {
    fn new(holds: bool, result: Value, text: String) -> Self {
        Outcome {
            exit: if holds { 0 } else { 1 },
            result,
            text,
        }
    }
}

#[derive(Debug)]
pub struct Failure {
    pub exit: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            exit: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::usage(e.to_string())
    }
}

/// Errors that are negative answers rather than bad input.
fn verdict_error(e: Error) -> Failure {
    match e {
        Error::NotTrending(_) | Error::CopyUndefined | Error::InsufficientDepth(_) => Failure {
            exit: 1,
            message: e.to_string(),
        },
        other => other.into(),
    }
}

pub struct Ctx {
    pub threads: usize,
    pub seed: u64,
    digest: Vec<Vec<u8>>,
}

impl Ctx {
    /// Arguments enter the digest except the report path and thread count,
    /// which do not affect results.
    pub fn new(threads: usize, seed: u64, args: &[String], _report: &Option<PathBuf>) -> Self {
        let mut digest = Vec::new();
        let mut skip = false;
        for a in args {
            if std::mem::take(&mut skip) {
                continue;
            }
            if a == "--report" || a == "--threads" {
                skip = true;
                continue;
            }
            if a.starts_with("--report=") || a.starts_with("--threads=") {
                continue;
            }
            digest.push(a.as_bytes().to_vec());
        }
        Ctx {
            threads,
            seed,
            digest,
        }
    }

    pub fn digest_parts(&self) -> &[Vec<u8>] {
        &self.digest
    }

    fn read(&mut self, path: &Path) -> Result<String, Failure> {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
        self.digest.push(text.as_bytes().to_vec());
        Ok(text)
    }

    fn structure(&mut self, path: &Path) -> Result<FinStructure, Failure> {
        let text = self.read(path)?;
        parse_structure(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
    }

    fn parsed<T>(
        &mut self,
        path: &Path,
        parse: impl FnOnce(&str) -> ramsey_core::Result<T>,
    ) -> Result<T, Failure> {
        let text = self.read(path)?;
        parse(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
    }
}

fn write_out(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}

fn verdict_json(v: &FrechetVerdict) -> Value {
    serde_json::to_value(v).expect("verdicts serialize")
}

#[derive(Args, Debug)]
pub struct ArrowCheck {
    /// Ambient structure C.
    #[arg(long)]
    ambient: PathBuf,
    /// Big structure B.
    #[arg(long)]
    big: PathBuf,
    /// Small structure A.
    #[arg(long)]
    small: PathBuf,
    #[arg(short = 'k')]
    k: usize,
    #[arg(short = 'l')]
    l: usize,
    /// Write a failing coloring here.
    #[arg(long)]
    witness: Option<PathBuf>,
}

impl ArrowCheck {
    pub fn run(&self, ctx: &mut Ctx) -> Result<Outcome, Failure> {
        let c = ctx.structure(&self.ambient)?;
        let b = ctx.structure(&self.big)?;
        let a = ctx.structure(&self.small)?;
        let parallel = ctx.threads > 1;
        let v = if parallel {
            arrow_check_parallel(&c, &b, &a, self.k, self.l)?
        } else {
            arrow_check(&c, &b, &a, self.k, self.l)?
        };
        let mut result = json!({
            "holds": v.holds(),
            "k": self.k,
            "l": self.l,
        });
        if !parallel {
            result["nodes"] = json!(v.stats.nodes);
        }
        let text = match &v.outcome {
            ArrowOutcome::Holds => "holds\n".to_string(),
            ArrowOutcome::Fails { witness, no_big_copy } => {
                result["no_big_copy"] = json!(no_big_copy);
                result["witness"] = json!(serialize_coloring(witness));
                if let Some(path) = &self.witness {
                    write_out(path, &serialize_coloring(witness))?;
                }
                if *no_big_copy {
                    "fails (no copy of the big structure)\n".to_string()
                } else {
                    format!("fails\n{}", serialize_coloring(witness))
                }
            }
        };
        Ok(Outcome::new(v.holds(), result, text))
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ClassName {
    Chains,
    Cliques,
    Graphs,
    All,
}

#[derive(Args, Debug)]
pub struct DegreeSearch {
    /// Small structure A.
    #[arg(long)]
    small: PathBuf,
    /// Big structure B.
    #[arg(long)]
    big: PathBuf,
    #[arg(long, value_enum)]
    class: ClassName,
    #[arg(short = 'k')]
    k: usize,
    #[arg(long)]
    l_max: usize,
    /// Largest ambient size tried.
    #[arg(long, default_value_t = 7)]
    size_cap: usize,
}

impl DegreeSearch {
    pub fn run(&self, ctx: &mut Ctx) -> Result<Outcome, Failure> {
        let a = ctx.structure(&self.small)?;
        let b = ctx.structure(&self.big)?;
        let class: Box<dyn ClassEnumerator> = match self.class {
            ClassName::Chains => Box::new(Chains::new(self.size_cap)),
            ClassName::Cliques => Box::new(Cliques::new(self.size_cap)),
            ClassName::Graphs => Box::new(Graphs::new(self.size_cap)),
            ClassName::All => Box::new(AllStructures::new(a.signature().clone(), self.size_cap)),
        };
        match degree_search(&a, class.as_ref(), self.k, &b, self.l_max, self.size_cap)? {
            Some((l, c)) => {
                let text = serialize_structure(&c);
                Ok(Outcome::new(
                    true,
                    json!({ "found": true, "l": l, "ambient": text }),
                    format!("l = {l}\n{text}"),
                ))
            }
            None => Ok(Outcome::new(
                false,
                json!({ "found": false }),
                format!("no ambient up to size {} reaches l ≤ {}\n", self.size_cap, self.l_max),
            )),
        }
    }
}

#[derive(Args, Debug)]
pub struct DevlinEnumerate {
    #[arg(short = 'n')]
    n: usize,
    /// Tree depth, or `auto` to grow it until the count is stable.
    #[arg(long, default_value = "auto")]
    depth: String,
}

impl DevlinEnumerate {
    pub fn run(&self, _ctx: &mut Ctx) -> Result<Outcome, Failure> {
        let (depth, codes) = if self.depth == "auto" {
            let t = devlin_types(self.n)?;
            (t.depth, t.codes.clone())
        } else {
            let d: usize = self
                .depth
                .parse()
                .map_err(|_| Failure::usage(format!("invalid depth {:?}", self.depth)))?;
            (d, enumerate_devlin_types(self.n, d)?)
        };
        let expected = tangent(2 * self.n as u32 - 1)?;
        let text: String = codes.iter().map(|c| format!("{c}\n")).collect();
        Ok(Outcome::new(
            true,
            json!({
                "n": self.n,
                "depth": depth,
                "count": codes.len(),
                "tangent": expected.to_string(),
                "codes": codes.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            }),
            text,
        ))
    }
}

#[derive(Args, Debug)]
pub struct DevlinColor {
    #[arg(long)]
    set: PathBuf,
    #[arg(short = 'n')]
    n: usize,
}

impl DevlinColor {
    pub fn run(&self, ctx: &mut Ctx) -> Result<Outcome, Failure> {
        let set = ctx.parsed(&self.set, parse_tree_set)?;
        let color = devlin_color(&set, self.n)?;
        let (holds, text, value) = match color {
            TreeColor::Type(i) => (true, format!("type {i}\n"), json!(i)),
            TreeColor::Sentinel => (false, "sentinel\n".to_string(), Value::Null),
        };
        Ok(Outcome::new(holds, json!({ "type": value }), text))
    }
}

#[derive(Args, Debug)]
pub struct TreePrune {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    levels: usize,
    /// Treat the input as an antichain and prune its meet closure, also
    /// picking a leaf above every terminal node.
    #[arg(long)]
    leaves: bool,
    /// Close the input under meets first.
    #[arg(long)]
    close: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl TreePrune {
    pub fn run(&self, ctx: &mut Ctx) -> Result<Outcome, Failure> {
        let mut set = ctx.parsed(&self.input, parse_tree_set)?;
        if self.close && !self.leaves {
            set = meet_closure(set.iter())?;
        }
        let (tree, leaves) = if self.leaves {
            let p = prune_with_leaves(&set, self.levels).map_err(verdict_error)?;
            let leaves: Vec<String> = p.leaf_of.values().map(|n| n.to_string()).collect();
            (p.tree, Some(leaves))
        } else {
            (prune_perfect(&set, self.levels).map_err(verdict_error)?, None)
        };
        let text = serialize_tree_set(&tree);
        if let Some(path) = &self.out {
            write_out(path, &text)?;
        }
        let mut shown = text.clone();
        if let Some(leaves) = &leaves {
            shown.push_str(&format!("leaves: {}\n", leaves.join(" ")));
        }
        Ok(Outcome::new(
            true,
            json!({ "nodes": tree.len(), "tree": text, "leaves": leaves }),
            shown,
        ))
    }
}

#[derive(Args, Debug)]
pub struct W0 {
    #[arg(long)]
    depth: usize,
    /// Write the tree here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the antichain X instead of the tree.
    #[arg(long)]
    antichain: bool,
}

impl W0 {
    pub fn run(&self, _ctx: &mut Ctx) -> Result<Outcome, Failure> {
        let w = build_w0(self.depth)?;
        let check = check_w0(&w, self.depth);
        if let Some(path) = &self.out {
            let out = if self.antichain { antichain_x(&w) } else { w.clone() };
            write_out(path, &serialize_tree_set(&out))?;
        }
        let mut text = format!("W0 depth={} nodes={}\n", self.depth, w.len());
        for (name, ok) in check.items() {
            text.push_str(&format!("{name}: {}\n", if ok { "pass" } else { "FAIL" }));
        }
        Ok(Outcome::new(
            check.all(),
            json!({ "nodes": w.len(), "checks": check }),
            text,
        ))
    }
}

#[derive(Args, Debug)]
pub struct UltraEval {
    #[arg(long)]
    seq: PathBuf,
    #[arg(long)]
    formula: PathBuf,
    /// Elements bound to the free variables x0, x1, ...
    #[arg(long)]
    elems: Option<PathBuf>,
    #[arg(long, default_value_t = 200)]
    horizon: usize,
}

fn print_verdict(v: &FrechetVerdict, bitmap: &str) -> String {
    format!("{v}\nbitmap {bitmap}\n")
}

impl UltraEval {
    pub fn run(&self, ctx: &mut Ctx) -> Result<Outcome, Failure> {
        let seq = ctx.parsed(&self.seq, parse_sequence)?;
        let sig = seq.signature().clone();
        let phi = ctx.parsed(&self.formula, |t| parse_formula(t, &sig))?;
        let elems = match &self.elems {
            Some(p) => ctx.parsed(p, parse_elements)?,
            None => Vec::new(),
        };
        let out = los_eval(&seq, &phi, &elems, self.horizon)?;
        Ok(Outcome::new(
            out.verdict.holds(),
            json!({ "verdict": verdict_json(&out.verdict), "bitmap": out.bitmap_string() }),
            print_verdict(&out.verdict, &out.bitmap_string()),
        ))
    }
}

#[derive(Args, Debug)]
pub struct UltraColor {
    #[arg(long)]
    seq: PathBuf,
    #[arg(long)]
    colorings: PathBuf,
    /// Elements forming the copy.
    #[arg(long)]
    copy: PathBuf,
    #[arg(long, default_value_t = 200)]
    horizon: usize,
}

impl UltraColor {
    pub fn run(&self, ctx: &mut Ctx) -> Result<Outcome, Failure> {
        let seq = ctx.parsed(&self.seq, parse_sequence)?;
        let sig = seq.signature().clone();
        let cols = ctx.parsed(&self.colorings, |t| parse_colorings(t, &sig))?;
        let elems = ctx.parsed(&self.copy, parse_elements)?;
        match internal_color(&cols, &elems, &seq, self.horizon).map_err(verdict_error)? {
            InternalColor::Certified { color, threshold } => Ok(Outcome::new(
                true,
                json!({ "certified": true, "color": color, "threshold": threshold }),
                format!("color {color} from t = {threshold}\n"),
            )),
            InternalColor::Undecided { bitmaps } => {
                let rows: Vec<String> = bitmaps
                    .iter()
                    .map(|b| b.iter().map(|&x| if x { '1' } else { '0' }).collect())
                    .collect();
                let text: String = std::iter::once("undecided\n".to_string())
                    .chain(rows.iter().enumerate().map(|(j, r)| format!("color {j}: {r}\n")))
                    .collect();
                Ok(Outcome::new(false, json!({ "certified": false, "classes": rows }), text))
            }
        }
    }
}

#[derive(Args, Debug)]
pub struct TransferShadow {
    #[arg(long)]
    seq: PathBuf,
    /// Small structure A.
    #[arg(short = 'A')]
    small: PathBuf,
    /// Big structure B.
    #[arg(short = 'B')]
    big: PathBuf,
    #[arg(short = 'k')]
    k: usize,
    #[arg(short = 'd')]
    d: usize,
    #[arg(long, default_value_t = 100)]
    horizon: usize,
    /// Per-coordinate colorings; defaults to a hashed coloring from --seed.
    #[arg(long)]
    colorings: Option<PathBuf>,
}

impl TransferShadow {
    pub fn run(&self, ctx: &mut Ctx) -> Result<Outcome, Failure> {
        let seq = ctx.parsed(&self.seq, parse_sequence)?;
        let a = ctx.structure(&self.small)?;
        let b = ctx.structure(&self.big)?;
        let cols = match &self.colorings {
            Some(p) => {
                let sig = seq.signature().clone();
                let cols = ctx.parsed(p, |t| parse_colorings(t, &sig))?;
                if cols.k() != self.k {
                    return Err(Failure::usage(format!(
                        "colorings use k = {}, but -k {} was given",
                        cols.k(),
                        self.k
                    )));
                }
                if !ramsey_core::structure::are_isomorphic(cols.pattern(), &a) {
                    return Err(Failure::usage("colorings pattern differs from A"));
                }
                cols
            }
            None => PerCoordColorings::new(a, self.k, ColoringRule::Hashed { seed: ctx.seed })?,
        };
        let r = transfer_shadow(&seq, &cols, &b, self.d, self.horizon).map_err(verdict_error)?;
        let set = |s: &std::collections::BTreeSet<usize>| s.iter().copied().collect::<Vec<_>>();
        let mut text = match r.exists_from {
            Some(t) => format!("part (a) holds from t = {t}\n"),
            None => "part (a) not reached on the range\n".to_string(),
        };
        if let Some(s0) = &r.s0 {
            text.push_str(&format!(
                "S0 = {:?} recurring {} times in [{}, {})\n",
                set(s0),
                r.recurrence,
                r.window.0,
                r.window.1
            ));
        }
        let bits: String = r.exists_bitmap().iter().map(|&x| if x { '1' } else { '0' }).collect();
        text.push_str(&format!("bitmap {bits}\n"));
        Ok(Outcome::new(
            r.exists_from.is_some(),
            json!({
                "exists_from": r.exists_from,
                "s0": r.s0.as_ref().map(set),
                "recurrence": r.recurrence,
                "window": [r.window.0, r.window.1],
                "bitmap": bits,
                "trending": r.trending,
            }),
            text,
        ))
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ChainClass {
    Chains,
    Cliques,
}

#[derive(Args, Debug)]
pub struct ChainBuild {
    #[arg(long, value_enum)]
    class: ChainClass,
    /// Number of members B_0, ..., B_{n-1} written as the explicit prefix.
    #[arg(long)]
    length: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl ChainBuild {
    pub fn run(&self, _ctx: &mut Ctx) -> Result<Outcome, Failure> {
        let rule = Arc::new(match self.class {
            ChainClass::Chains => CofinalChainRule::chains(),
            ChainClass::Cliques => CofinalChainRule::cliques(),
        });
        let members = (0..self.length)
            .map(|t| rule.member(t).map(|m| (*m).clone()))
            .collect::<ramsey_core::Result<Vec<_>>>()?;
        let age: Vec<FinStructure> = (0..self.length).map(|n| rule.age_member(n)).collect();
        let class: Box<dyn ClassEnumerator> = match self.class {
            ChainClass::Chains => Box::new(Chains::new(self.length + 1)),
            ChainClass::Cliques => Box::new(Cliques::new(self.length + 1)),
        };
        let verified = verify_cofinal_chain(&age, &members, class.as_ref());
        let seq = StructureSequence::new(
            rule.signature().clone(),
            members.clone(),
            TailRule::CofinalChain(rule.clone()),
        )?;
        let text = serialize_sequence(&seq)?;
        if let Some(path) = &self.out {
            write_out(path, &text)?;
        }
        Ok(Outcome::new(
            verified.is_ok(),
            json!({
                "sizes": members.iter().map(FinStructure::size).collect::<Vec<_>>(),
                "verified": verified.is_ok(),
            }),
            text,
        ))
    }
}
