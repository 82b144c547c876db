use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use largecolor::braid::alexander;
use largecolor::closedform::{lovejoy_osburn_fk, mseries_f0_f1, tree_link_fk, DoubleTwistSpec, TreeGraph};
use largecolor::jones::{check_annihilator, colored_jones, kashaev, strange_series, AnnihilatorOp};
use largecolor::rmatrix::{dump_entries, Colors, CrossingKind, Sign, Weightspace};
use largecolor::statesum::{fk_multivariable, fk_positive, fk_stratified, weyl_transforms, StratifiedOptions};
use largecolor::surgery::{
    inverse_surgery_normalization, laplace_knot, partial_surgery, reverse_engineer, ReverseOptions,
};
use largecolor::verify::{run_suite, Suite, VerifyOptions};
use largecolor::{BiSeries, BraidWord, Error, Exactness, Expansion, FkResult, Module, MultiSeries};
use num_traits::Zero;
use serde_json::{json, Value};

use crate::Format;

#[derive(Parser, Debug)]
#[command(name = "largecolor", version, about = "Knot-complement q-series from large-color R-matrix state sums")]
pub struct Cli {
    #[arg(long, value_enum, default_value = "text", global = true)]
    pub format: Format,
    /// Worker threads for the state sums.
    #[arg(long, env = "LARGECOLOR_WORKERS", global = true)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// F_K of a braid knot, or the multivariable series of a braid link with --coloring.
    Fk(FkArgs),
    /// Colored Jones polynomial.
    Jones(JonesArgs),
    /// Alexander polynomial, normalized to Δ(1) = 1.
    Alexander(BraidArgs),
    /// Ẑ of p/r surgery on a knot, one series per Spin^c structure.
    Zhat(ZhatArgs),
    /// Closed-form series.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// The q-series side of the strange identity.
    Strange(StrangeArgs),
    /// Applies a q-difference operator to F_K under both ŷ conventions.
    Annihilate(AnnihilateArgs),
    /// -1/r surgery on one component of a link series.
    PartialSurgery(PartialSurgeryArgs),
    /// Recovers a two-component link series from a family of surgered knots.
    ReverseEngineer(ReverseArgs),
    /// Runs invariant suites.
    Verify(VerifyArgs),
    /// R-matrix inspection.
    #[command(subcommand)]
    Rmatrix(RmatrixCommand),
    /// Runs one job per line of a file, printing one JSON result per line.
    Batch { file: PathBuf },
}

#[derive(Args, Debug, Clone)]
pub struct BraidArgs {
    /// Braid word, e.g. "1,1,-2" or "1^3,2".
    #[arg(long, allow_hyphen_values = true)]
    pub braid: String,
    /// Number of strands; defaults to one more than the largest generator.
    #[arg(long)]
    pub strands: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModuleArg {
    Hw,
    Lw,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ExpansionArg {
    Neg,
    Pos,
    Bal,
}

#[derive(Args, Debug, Clone)]
pub struct OrderArgs {
    #[arg(long, default_value_t = 10)]
    pub x_order: i32,
    #[arg(long, default_value_t = 40)]
    pub q_order: i32,
    #[arg(long, default_value_t = 60)]
    pub max_strata: usize,
    /// Highest-weight module gives F^-, lowest-weight gives F^+.
    #[arg(long, value_enum)]
    pub module: Option<ModuleArg>,
}

#[derive(Args, Debug)]
pub struct FkArgs {
    #[command(flatten)]
    pub braid: BraidArgs,
    #[command(flatten)]
    pub orders: OrderArgs,
    #[arg(long, value_enum)]
    pub expansion: Option<ExpansionArg>,
    /// Variable index per strand; switches to the multivariable link series.
    #[arg(long, value_delimiter = ',')]
    pub coloring: Option<Vec<usize>>,
}

#[derive(Args, Debug)]
pub struct JonesArgs {
    #[command(flatten)]
    pub braid: BraidArgs,
    #[arg(long, default_value_t = 2)]
    pub color: u32,
    #[arg(long)]
    pub unreduced: bool,
    /// Also evaluate at q = e^{2πi/n} with n the color.
    #[arg(long)]
    pub kashaev: bool,
}

#[derive(Args, Debug)]
pub struct ZhatArgs {
    #[command(flatten)]
    pub braid: BraidArgs,
    #[command(flatten)]
    pub orders: OrderArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub p: i32,
    #[arg(long, default_value_t = 1)]
    pub r: i32,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum TwistKind {
    /// K_{m,p}
    Mp,
    /// K_{m+1/2,-p}
    Mhalf,
}

#[derive(Subcommand, Debug)]
pub enum OracleCommand {
    /// Double twist knot F^+ from its nested q-hypergeometric sum.
    LovejoyOsburn {
        #[arg(long, value_enum)]
        kind: TwistKind,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        p: u32,
        #[arg(long, default_value_t = 10)]
        x_order: i32,
        #[arg(long, default_value_t = 40)]
        q_order: i32,
    },
    /// Series of the link of unknots along a tree.
    Tree {
        /// Edges as "0-1,0-2,...".
        #[arg(long)]
        edges: String,
        #[arg(long, default_value_t = 10)]
        x_order: i32,
    },
    /// Closed forms of f_0 and f_1 for m(5_2).
    Mseries {
        #[arg(long, default_value_t = 40)]
        q_order: i32,
    },
}

#[derive(Args, Debug)]
pub struct StrangeArgs {
    #[command(flatten)]
    pub braid: BraidArgs,
    #[arg(long, default_value_t = 40)]
    pub q_order: i32,
    /// x-order of the underlying F_K; by default raised until the q-order is certified.
    #[arg(long)]
    pub x_order: Option<i32>,
}

#[derive(Args, Debug)]
pub struct AnnihilateArgs {
    #[command(flatten)]
    pub braid: BraidArgs,
    #[command(flatten)]
    pub orders: OrderArgs,
    /// JSON file {"coefficients": [series, ...]}.
    #[arg(long)]
    pub operator: PathBuf,
}

#[derive(Args, Debug)]
pub struct PartialSurgeryArgs {
    /// Link series JSON (as printed by `fk --coloring` or `oracle tree`).
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub component: usize,
    #[arg(long)]
    pub r: i32,
    /// Linking numbers with the remaining components.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub lk: Vec<i32>,
}

#[derive(Args, Debug)]
pub struct ReverseArgs {
    /// Family K_{r,P} of double twist knots from the closed form.
    #[arg(long, conflicts_with = "input")]
    pub twist_p: Option<u32>,
    /// Knot series per r as "R=FILE" (F_K JSON as printed by `fk --format json`).
    #[arg(long)]
    pub input: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    pub r: Vec<i32>,
    #[arg(long, default_value_t = 4)]
    pub x_order: i32,
    #[arg(long, default_value_t = 2)]
    pub y_order: i32,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub lk: i32,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Suites to run: yang-baxter, markov, classical-limit, finite-color, fixtures (default all).
    pub suites: Vec<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub random_braids: Option<usize>,
    #[arg(long)]
    pub max_strands: Option<usize>,
    #[arg(long)]
    pub max_letters: Option<usize>,
    #[arg(long)]
    pub max_weight: Option<usize>,
    #[arg(long)]
    pub finite_x_order: Option<i32>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum EntryKind {
    Hw,
    Lw,
    HwMixed,
    LwMixed,
    Finite,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum SignArg {
    Pos,
    Neg,
}

#[derive(Subcommand, Debug)]
pub enum RmatrixCommand {
    /// All nonzero outputs of Ř (or Ř⁻¹) on one input pair.
    Dump {
        #[arg(long, value_enum)]
        kind: EntryKind,
        #[arg(long, value_enum, default_value = "pos")]
        sign: SignArg,
        #[arg(long, allow_hyphen_values = true)]
        a: i64,
        #[arg(long, allow_hyphen_values = true)]
        b: i64,
        /// Dimensions for finite colors.
        #[arg(long, default_value_t = 2)]
        n: u32,
        #[arg(long, default_value_t = 2)]
        m: u32,
    },
}

/// Result of one command: canonical text, JSON, and whether every check passed.
pub struct Output {
    pub text: String,
    pub json: Value,
    pub passed: bool,
}

impl Output {
    fn new(text: String, json: Value) -> Output {
        Output { text, json, passed: true }
    }
}

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub kind: String,
    pub message: String,
}

impl Failure {
    pub fn usage(message: String) -> Failure {
        Failure { code: 2, kind: "usage".into(), message }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = if matches!(e, Error::Parse(_)) { 2 } else { 1 };
        Failure { code, kind: e.kind().into(), message: e.to_string() }
    }
}

type Res<T> = std::result::Result<T, Failure>;

pub fn run(cmd: &Command) -> Res<Output> {
    match cmd {
        Command::Fk(a) => fk(a),
        Command::Jones(a) => jones(a),
        Command::Alexander(a) => {
            let b = braid(a)?;
            let d = alexander(&b)?;
            Ok(Output::new(d.to_text(), json!({"braid": braid_json(&b), "alexander": d.to_json(), "text": d.to_text()})))
        }
        Command::Zhat(a) => zhat(a),
        Command::Oracle(o) => oracle(o),
        Command::Strange(a) => strange(a),
        Command::Annihilate(a) => annihilate(a),
        Command::PartialSurgery(a) => partial(a),
        Command::ReverseEngineer(a) => reverse(a),
        Command::Verify(a) => verify(a),
        Command::Rmatrix(RmatrixCommand::Dump { kind, sign, a, b, n, m }) => rmatrix_dump(*kind, *sign, *a, *b, *n, *m),
        Command::Batch { file } => batch(file),
    }
}

fn braid(a: &BraidArgs) -> Res<BraidWord> {
    let strands = match a.strands {
        Some(s) => s,
        None => {
            let probe = BraidWord::parse(&a.braid, largecolor::statesum::MAX_STRANDS)?;
            probe.letters().iter().map(|l| l.unsigned_abs() as usize + 1).max().unwrap_or(1)
        }
    };
    Ok(BraidWord::parse(&a.braid, strands)?)
}

fn braid_json(b: &BraidWord) -> Value {
    json!({"word": b.to_text(), "strands": b.strands(), "closure": b.closure_info().to_json()})
}

fn fmt_half(e: i32) -> String {
    if e % 2 == 0 {
        format!("{}", e / 2)
    } else {
        format!("{e}/2")
    }
}

fn q_pow(e2: i32) -> String {
    if e2 % 2 == 0 {
        format!("q^{}", e2 / 2)
    } else {
        format!("q^({e2}/2)")
    }
}

fn describe(r: &FkResult) -> String {
    let w = r.series.x_window();
    let window = match (w.lo, w.hi) {
        (Some(lo), Some(hi)) => format!("x-exponents in [{}, {}]", fmt_half(lo), fmt_half(hi)),
        (Some(lo), None) => format!("x-exponents >= {}", fmt_half(lo)),
        (None, Some(hi)) => format!("x-exponents <= {}", fmt_half(hi)),
        (None, None) => "all x-exponents".into(),
    };
    let exact = match r.exactness {
        Exactness::ExactPolynomialCoeffs => "exact polynomial coefficients".to_string(),
        Exactness::Stabilized { q_valid2 } => format!("stabilized below {}", q_pow(q_valid2)),
    };
    format!("# {} expansion, {window}, {exact}, {} strata", r.expansion.name(), r.strata_used)
}

fn opts(o: &OrderArgs) -> StratifiedOptions {
    StratifiedOptions { x_order: o.x_order, q_order: o.q_order, max_strata: o.max_strata, ..Default::default() }
}

/// F_K in its native expansion: exact for positive (hw) and negative (lw) braid knots,
/// stratified otherwise.
fn native_fk(b: &BraidWord, o: &OrderArgs) -> Res<FkResult> {
    let module = match o.module {
        Some(ModuleArg::Hw) => Module::Hw,
        Some(ModuleArg::Lw) => Module::Lw,
        None if b.is_negative() || !b.is_positive() => Module::Lw,
        None => Module::Hw,
    };
    let exact = (module == Module::Hw && b.is_positive()) || (module == Module::Lw && b.is_negative());
    Ok(if exact && !b.is_empty() { fk_positive(b, o.x_order)? } else { fk_stratified(b, module, &opts(o))? })
}

fn fk(a: &FkArgs) -> Res<Output> {
    let b = braid(&a.braid)?;
    if let Some(coloring) = &a.coloring {
        let nv = coloring.iter().max().map_or(0, |m| m + 1);
        let all = ["x", "y", "z", "w"];
        if nv > all.len() {
            return Err(Failure::usage("at most four link variables".into()));
        }
        let orders = vec![a.orders.x_order; nv];
        let r = fk_multivariable(&b, coloring, &all[..nv], &orders, &opts(&a.orders))?;
        let Exactness::Stabilized { q_valid2 } = r.exactness else { unreachable!() };
        let text = format!(
            "{}\n# multivariable, x-exponents >= -{}-1/2 in each variable, stabilized below {}, {} strata",
            r.series.to_text(),
            a.orders.x_order,
            q_pow(q_valid2),
            r.strata_used
        );
        let json = json!({
            "braid": braid_json(&b),
            "series": r.series.to_json(),
            "text": r.series.to_text(),
            "exactness": {"stabilized": q_valid2},
            "strata_used": r.strata_used,
        });
        return Ok(Output::new(text, json));
    }
    let native = native_fk(&b, &a.orders)?;
    let wanted = match a.expansion {
        None => native.expansion,
        Some(ExpansionArg::Neg) => Expansion::Negative,
        Some(ExpansionArg::Pos) => Expansion::Positive,
        Some(ExpansionArg::Bal) => Expansion::Balanced,
    };
    let r = if wanted == native.expansion {
        native
    } else {
        let (other, balanced) = weyl_transforms(&native)?;
        if wanted == Expansion::Balanced {
            balanced
        } else {
            other
        }
    };
    let mut json = r.to_json();
    json["braid"] = braid_json(&b);
    Ok(Output::new(format!("{}\n{}", r.series.to_text(), describe(&r)), json))
}

fn jones(a: &JonesArgs) -> Res<Output> {
    let b = braid(&a.braid)?;
    let j = colored_jones(&b, a.color, !a.unreduced)?;
    let mut text = j.to_text();
    let mut json = json!({"braid": braid_json(&b), "color": a.color, "reduced": !a.unreduced, "jones": j.to_json(), "text": j.to_text()});
    if a.kashaev {
        let v = kashaev(&b, a.color)?;
        text.push_str(&format!("\n# at q = exp(2 pi i/{}): {:.12} {:+.12}i (error <= {:.1e})", a.color, v.value.re, v.value.im, v.error_bound));
        json["kashaev"] = json!({"re": v.value.re, "im": v.value.im, "error_bound": v.error_bound});
    }
    Ok(Output::new(text, json))
}

fn zhat(a: &ZhatArgs) -> Res<Output> {
    let b = braid(&a.braid)?;
    let f = native_fk(&b, &a.orders)?;
    let bundles = laplace_knot(&f, a.p, a.r)?;
    let mut lines: Vec<String> = bundles
        .iter()
        .map(|z| {
            let label: Vec<String> = z.spinc_label.iter().map(|l| l.to_string()).collect();
            format!("b = {}: {}", label.join(","), z.to_text())
        })
        .collect();
    let mut json = json!({
        "braid": braid_json(&b),
        "p": a.p,
        "r": a.r,
        "input": describe(&f).trim_start_matches("# "),
        "bundles": bundles.iter().map(|z| z.to_json()).collect::<Vec<_>>(),
    });
    if a.p == -1 && a.r > 0 {
        let n = inverse_surgery_normalization(a.r);
        lines.push(format!("# conventional unit q^({n}) = q^(-(r+1/r)/4) for -1/{}", a.r));
        json["conventional_offset"] = json!(n.to_string());
    }
    Ok(Output::new(lines.join("\n"), json))
}

fn oracle(o: &OracleCommand) -> Res<Output> {
    match o {
        OracleCommand::LovejoyOsburn { kind, m, p, x_order, q_order } => {
            let spec = match kind {
                TwistKind::Mp => DoubleTwistSpec::Full { m: *m, p: *p },
                TwistKind::Mhalf => DoubleTwistSpec::Half { m: *m, p: *p },
            };
            let (s, layers) = lovejoy_osburn_fk(spec, *x_order, *q_order)?;
            let text = format!("{}\n# positive expansion, x-exponents <= {}+1/2, below {}, {layers} layers", s.to_text(), x_order, q_pow(s.q_valid2().unwrap_or(0)));
            Ok(Output::new(text, json!({"series": s.to_json(), "text": s.to_text(), "expansion": "positive", "layers": layers})))
        }
        OracleCommand::Tree { edges, x_order } => {
            let t = TreeGraph::parse(edges)?;
            let s = tree_link_fk(&t, &vec![*x_order; t.vertices()])?;
            Ok(Output::new(s.to_text(), json!({"series": s.to_json(), "text": s.to_text()})))
        }
        OracleCommand::Mseries { q_order } => {
            let (f0, f1) = mseries_f0_f1(*q_order);
            Ok(Output::new(
                format!("f0 = {}\nf1 = {}\n# below {}", f0.to_text(), f1.to_text(), q_pow(f0.q_valid2().unwrap_or(0))),
                json!({"f0": f0.to_json(), "f1": f1.to_json()}),
            ))
        }
    }
}

fn strange(a: &StrangeArgs) -> Res<Output> {
    let b = braid(&a.braid)?;
    let target = 2 * a.q_order + 1;
    let mut x_order = a.x_order.unwrap_or(4);
    let s = loop {
        let s = strange_series(&fk_positive(&b, x_order)?)?;
        if a.x_order.is_some() || s.q_valid2().is_none_or(|v| v >= target) || x_order >= 60 {
            break s;
        }
        x_order += 2;
    };
    let s = match s.q_valid2() {
        Some(v) if v > target => s.with_q_valid(target),
        None => s.with_q_valid(target),
        _ => s,
    };
    let valid = s.q_valid2().map(q_pow).unwrap_or_else(|| "exact".into());
    Ok(Output::new(
        format!("{}\n# below {valid}, from F_K at x-order {x_order}", s.to_text()),
        json!({"series": s.to_json(), "text": s.to_text(), "x_order": x_order}),
    ))
}

fn read_json(path: &Path) -> Res<Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure { code: 2, kind: "io".into(), message: format!("{}: {e}", path.display()) })?;
    serde_json::from_str(&text).map_err(|e| Failure { code: 2, kind: "parse".into(), message: format!("{}: {e}", path.display()) })
}

fn annihilate(a: &AnnihilateArgs) -> Res<Output> {
    let b = braid(&a.braid)?;
    let op = AnnihilatorOp::from_json(&read_json(&a.operator)?)?;
    let f = native_fk(&b, &a.orders)?;
    let report = check_annihilator(&op, &f)?;
    let mut lines: Vec<String> = report
        .residuals
        .iter()
        .map(|r| format!("{}: {}", r.convention.name(), if r.vanishes { "annihilates".to_string() } else { format!("residual {}", r.residual.to_text()) }))
        .collect();
    lines.push(describe(&f));
    let passed = !report.annihilating().is_empty();
    Ok(Output { text: lines.join("\n"), json: report.to_json(), passed })
}

/// A link series, or a knot series read as a one-variable link in `x`.
fn multiseries_input(v: &Value) -> Res<MultiSeries> {
    let v = v.get("series").unwrap_or(v);
    if v.get("vars").is_some() {
        Ok(MultiSeries::from_json(v)?)
    } else {
        Ok(MultiSeries::from_biseries(&BiSeries::from_json(v)?, "x"))
    }
}

fn partial(a: &PartialSurgeryArgs) -> Res<Output> {
    let f = multiseries_input(&read_json(&a.input)?)?;
    let p = partial_surgery(&f, a.component, a.r, &a.lk)?;
    Ok(Output::new(
        if p.q_shift.is_zero() {
            p.series.to_text()
        } else {
            format!("q^({})*({})", p.q_shift, p.series.to_text())
        },
        json!({"series": p.series.to_json(), "q_shift": p.q_shift.to_string(), "text": p.series.to_text()}),
    ))
}

fn fk_input(v: &Value) -> Res<FkResult> {
    let series = BiSeries::from_json(v.get("series").unwrap_or(v))?;
    let expansion = match v.get("expansion").and_then(Value::as_str) {
        None | Some("positive") => Expansion::Positive,
        Some("negative") => Expansion::Negative,
        Some(o) => return Err(Failure::usage(format!("unsupported expansion '{o}' in input"))),
    };
    let exactness = match series.q_valid2() {
        Some(q_valid2) => Exactness::Stabilized { q_valid2 },
        None => Exactness::ExactPolynomialCoeffs,
    };
    Ok(FkResult { series, expansion, exactness, strata_used: 0 })
}

fn reverse(a: &ReverseArgs) -> Res<Output> {
    let mut inputs: BTreeMap<i32, FkResult> = BTreeMap::new();
    for spec in &a.input {
        let (r, path) = spec.split_once('=').ok_or_else(|| Failure::usage(format!("expected R=FILE, got '{spec}'")))?;
        let r: i32 = r.trim().parse().map_err(|_| Failure::usage(format!("bad r in '{spec}'")))?;
        inputs.insert(r, fk_input(&read_json(Path::new(path))?)?);
    }
    let r_values = if a.r.is_empty() { inputs.keys().copied().collect() } else { a.r.clone() };
    let opts = ReverseOptions { x_order: a.x_order, y_order: a.y_order, r_values };
    let result = match a.twist_p {
        Some(p) => {
            let (xo, yo) = (a.x_order, a.y_order);
            let family = move |r: i32| -> largecolor::Result<FkResult> {
                if r < 1 {
                    return Err(Error::InvalidArgument("r must be positive".into()));
                }
                let q_order = r * (xo + 1) * (xo + 1) + r + 4;
                let (series, _) = lovejoy_osburn_fk(DoubleTwistSpec::Full { m: r as u32, p }, yo + 1, q_order)?;
                Ok(FkResult {
                    series,
                    expansion: Expansion::Positive,
                    exactness: Exactness::Stabilized { q_valid2: 2 * q_order + 1 },
                    strata_used: 0,
                })
            };
            reverse_engineer(family, a.lk, &opts)?
        }
        None => {
            if inputs.is_empty() {
                return Err(Failure::usage("give --twist-p or at least two --input R=FILE".into()));
            }
            let family = |r: i32| {
                inputs.get(&r).cloned().ok_or_else(|| Error::InvalidArgument(format!("no input for r = {r}")))
            };
            reverse_engineer(family, a.lk, &opts)?
        }
    };
    let text = result
        .coefficients
        .iter()
        .map(|(&(i, j), f)| format!("f_({i},{j}) = {}", f.to_text()))
        .collect::<Vec<_>>()
        .join("\n");
    Ok(Output::new(text, result.to_json()))
}

fn verify(a: &VerifyArgs) -> Res<Output> {
    let suites: Vec<Suite> = if a.suites.is_empty() {
        Suite::ALL.to_vec()
    } else {
        a.suites.iter().map(|s| s.parse::<Suite>().map_err(|e| Failure::usage(e.to_string()))).collect::<Res<_>>()?
    };
    let d = VerifyOptions::default();
    let opts = VerifyOptions {
        seed: a.seed.unwrap_or(d.seed),
        random_braids: a.random_braids.unwrap_or(d.random_braids),
        max_strands: a.max_strands.unwrap_or(d.max_strands),
        max_letters: a.max_letters.unwrap_or(d.max_letters),
        max_weight: a.max_weight.unwrap_or(d.max_weight),
        finite_x_order: a.finite_x_order.unwrap_or(d.finite_x_order),
    };
    let mut lines = Vec::new();
    let mut reports = Vec::new();
    let mut passed = true;
    for s in suites {
        let r = run_suite(s, &opts);
        passed &= r.passed();
        for c in &r.checks {
            lines.push(format!("{} {} {}: {}", if c.passed { "PASS" } else { "FAIL" }, s, c.name, c.detail));
        }
        let ok = r.checks.iter().filter(|c| c.passed).count();
        lines.push(format!("# {s}: {ok}/{} passed", r.checks.len()));
        reports.push(r.to_json());
    }
    Ok(Output { text: lines.join("\n"), json: json!({"passed": passed, "suites": reports}), passed })
}

fn rmatrix_dump(kind: EntryKind, sign: SignArg, a: i64, b: i64, n: u32, m: u32) -> Res<Output> {
    let (weightspace, colors) = match kind {
        EntryKind::Hw => (Weightspace::Highest, Colors::Single),
        EntryKind::Lw => (Weightspace::Lowest, Colors::Single),
        EntryKind::HwMixed => (Weightspace::Highest, Colors::Mixed),
        EntryKind::LwMixed => (Weightspace::Lowest, Colors::Mixed),
        EntryKind::Finite => (Weightspace::Finite { n, m }, Colors::Single),
    };
    let sign = match sign {
        SignArg::Pos => Sign::Positive,
        SignArg::Neg => Sign::Negative,
    };
    let entries = dump_entries(CrossingKind { sign, weightspace, colors }, a, b)?;
    let text = entries
        .iter()
        .map(|e| format!("({}, {}) -> ({}, {}): {}", e.in_left, e.in_right, e.out_left, e.out_right, e.coeff.to_text()))
        .collect::<Vec<_>>()
        .join("\n");
    let json = json!({
        "entries": entries.iter().map(|e| json!({
            "in": [e.in_left, e.in_right],
            "out": [e.out_left, e.out_right],
            "coeff": e.coeff.to_json(),
            "text": e.coeff.to_text(),
        })).collect::<Vec<_>>(),
    });
    Ok(Output::new(text, json))
}

fn batch(file: &Path) -> Res<Output> {
    let text = std::fs::read_to_string(file)
        .map_err(|e| Failure { code: 2, kind: "io".into(), message: format!("{}: {e}", file.display()) })?;
    let mut lines = Vec::new();
    let mut results = Vec::new();
    let mut passed = true;
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        let argv = std::iter::once("largecolor").chain(line.split_whitespace());
        let result = match Cli::try_parse_from(argv) {
            Err(e) => Err(Failure::usage(e.to_string().trim().to_string())),
            Ok(cli) if matches!(cli.command, Command::Batch { .. }) => Err(Failure::usage("nested batch".into())),
            Ok(cli) => run(&cli.command),
        };
        let value = match result {
            Ok(out) => {
                passed &= out.passed;
                json!({"job": line, "ok": out.passed, "result": out.json})
            }
            Err(f) => {
                passed = false;
                json!({"job": line, "ok": false, "error": {"kind": f.kind, "message": f.message}})
            }
        };
        lines.push(serde_json::to_string(&value).expect("json"));
        results.push(value);
    }
    Ok(Output { text: lines.join("\n"), json: Value::Array(results), passed })
}
