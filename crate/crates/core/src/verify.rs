//! Invariant suites: braid relations of the R-matrices, Markov invariance of the
//! state sum, the classical limit, finite-color consistency and the printed fixtures.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::algebra::{rat_frac, BiSeries, Rational, Substitution, Window};
use crate::braid::{alexander, burau_strata, classical_fminus, BraidWord};
use crate::closedform::{lovejoy_osburn_fk, DoubleTwistSpec};
use crate::error::{Error, Result};
use crate::jones::colored_jones;
use crate::knots::{braid_fixtures, Fixture, Printed, M_SEVEN_4, SMALL_KNOTS};
use crate::rmatrix::Family;
use crate::statesum::{fk_positive, fk_stratified, stratum_trace, Module, StateVector, StratifiedOptions};

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Suite {
    YangBaxter,
    Markov,
    ClassicalLimit,
    FiniteColor,
    Fixtures,
}

impl Suite {
    pub const ALL: [Suite; 5] =
        [Suite::YangBaxter, Suite::Markov, Suite::ClassicalLimit, Suite::FiniteColor, Suite::Fixtures];

    pub fn name(self) -> &'static str {
        match self {
            Suite::YangBaxter => "yang-baxter",
            Suite::Markov => "markov",
            Suite::ClassicalLimit => "classical-limit",
            Suite::FiniteColor => "finite-color",
            Suite::Fixtures => "fixtures",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Suite> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown suite '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Check {
        Check { name: name.into(), passed, detail: detail.into() }
    }

    fn from_result(name: impl Into<String>, r: Result<(bool, String)>) -> Check {
        match r {
            Ok((passed, detail)) => Check::new(name, passed, detail),
            Err(e) => Check::new(name, false, format!("error: {e}")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
    pub seconds: f64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "suite": self.suite.name(),
            "passed": self.passed(),
            "seconds": self.seconds,
            "checks": self.checks.iter().map(|c| json!({
                "name": c.name,
                "passed": c.passed,
                "detail": c.detail,
            })).collect::<Vec<_>>(),
        })
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    /// Seed for the random braids of the Markov suite.
    pub seed: u64,
    pub random_braids: usize,
    pub max_strands: usize,
    pub max_letters: usize,
    /// Largest total weight for the braid relations and the graded classical limit.
    pub max_weight: usize,
    /// `x`-order of the torus knot series in the finite-color suite.
    pub finite_x_order: i32,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: 0x5eed,
            random_braids: 50,
            max_strands: 4,
            max_letters: 12,
            max_weight: 4,
            finite_x_order: 20,
        }
    }
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> SuiteReport {
    let start = Instant::now();
    let checks = match suite {
        Suite::YangBaxter => yang_baxter(opts),
        Suite::Markov => markov(opts),
        Suite::ClassicalLimit => classical_limit(opts),
        Suite::FiniteColor => finite_color(opts),
        Suite::Fixtures => fixtures(),
    };
    SuiteReport { suite, checks, seconds: start.elapsed().as_secs_f64() }
}

pub fn run_all(opts: &VerifyOptions) -> Vec<SuiteReport> {
    Suite::ALL.iter().map(|&s| run_suite(s, opts)).collect()
}

// ---------------------------------------------------------------------------
// Braid relations
// ---------------------------------------------------------------------------

fn states(dims: &[Option<u16>], max_weight: usize) -> Vec<Vec<u16>> {
    let mut out = vec![vec![]];
    for d in dims {
        let top = d.map_or(max_weight as u16, |d| d - 1);
        out = out
            .into_iter()
            .flat_map(|s: Vec<u16>| {
                (0..=top).map(move |i| {
                    let mut t = s.clone();
                    t.push(i);
                    t
                })
            })
            .filter(|s| d.is_some() || s.iter().map(|&i| i as usize).sum::<usize>() <= max_weight)
            .collect();
    }
    out
}

/// Counts the basis vectors on which the two words differ.
fn relation_failures(family: Family, colors: &[u8], basis: &[Vec<u16>], lhs: &[i32], rhs: &[i32]) -> Result<usize> {
    let mut bad = 0;
    for s in basis {
        let mut a = StateVector::basis(family, colors.to_vec(), s)?;
        let mut b = a.clone();
        a.apply_word(lhs)?;
        b.apply_word(rhs)?;
        if a != b {
            bad += 1;
        }
    }
    Ok(bad)
}

fn yang_baxter(opts: &VerifyOptions) -> Vec<Check> {
    let w = opts.max_weight;
    let verma = [
        ("hw", Family::Hw, vec![0u8, 0, 0]),
        ("lw", Family::Lw, vec![0, 0, 0]),
        ("mixed hw", Family::Hw, vec![0, 1, 2]),
        ("mixed hw", Family::Hw, vec![1, 0, 0]),
        ("mixed lw", Family::Lw, vec![0, 1, 2]),
        ("mixed lw", Family::Lw, vec![1, 0, 0]),
    ];
    let mut cases: Vec<(String, Family, Vec<u8>, Vec<Vec<u16>>)> = verma
        .into_iter()
        .map(|(name, f, c)| (format!("{name} colors {c:?}"), f, c, states(&[None, None, None], w)))
        .collect();
    for n1 in 1..=4u8 {
        for n2 in 1..=4u8 {
            for n3 in 1..=4u8 {
                let dims = [n1, n2, n3];
                let basis = states(&dims.map(|d| Some(d as u16)), w);
                cases.push((format!("finite dims {dims:?}"), Family::Finite, dims.to_vec(), basis));
            }
        }
    }
    let relations: [(&str, &[i32], &[i32]); 5] = [
        ("R23 R12 R23 = R12 R23 R12", &[1, 2, 1], &[2, 1, 2]),
        ("R12 R12^-1 = 1", &[1, -1], &[]),
        ("R12^-1 R12 = 1", &[-1, 1], &[]),
        ("R23 R23^-1 = 1", &[2, -2], &[]),
        ("R23^-1 R23 = 1", &[-2, 2], &[]),
    ];
    let mut out = Vec::new();
    for (rel, lhs, rhs) in relations {
        let mut group: BTreeMap<&str, (usize, usize, usize)> = BTreeMap::new();
        let mut errors = Vec::new();
        for (label, family, colors, basis) in &cases {
            let key = match (family, label.starts_with("mixed")) {
                (Family::Finite, _) => "finite n,m <= 4",
                (Family::Hw, false) => "highest weight",
                (Family::Lw, false) => "lowest weight",
                (Family::Hw, true) => "mixed highest weight",
                (Family::Lw, true) => "mixed lowest weight",
            };
            let e = group.entry(key).or_default();
            match relation_failures(*family, colors, basis, lhs, rhs) {
                Ok(bad) => {
                    e.0 += 1;
                    e.1 += basis.len();
                    e.2 += bad;
                }
                Err(err) => errors.push(format!("{label}: {err}")),
            }
        }
        for (key, (colorings, vectors, bad)) in group {
            let passed = bad == 0 && errors.is_empty();
            let mut detail = format!("{vectors} basis vectors of weight <= {w} over {colorings} colorings, {bad} failures");
            if !errors.is_empty() {
                detail.push_str(&format!("; {}", errors.join("; ")));
            }
            out.push(Check::new(format!("{rel} [{key}]"), passed, detail));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Markov moves
// ---------------------------------------------------------------------------

/// Distinct seeded random positive braid knots with `2..=max_strands` strands and at
/// most `max_letters` letters.
pub fn random_positive_knots(seed: u64, count: usize, max_strands: usize, max_letters: usize) -> Vec<BraidWord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let max_strands = max_strands.max(2);
    while out.len() < count {
        let n = rng.random_range(2..=max_strands);
        if max_letters < n - 1 {
            continue;
        }
        // a knot needs an (n-1)-parity letter count
        let len = rng.random_range(n - 1..=max_letters);
        if (len + n - 1) % 2 == 1 {
            continue;
        }
        let letters: Vec<i32> = (0..len).map(|_| rng.random_range(1..n as i32)).collect();
        if let Ok(b) = BraidWord::new(n, letters) {
            if b.is_knot() && !out.contains(&b) {
                out.push(b);
            }
        }
    }
    out
}

fn markov(opts: &VerifyOptions) -> Vec<Check> {
    let braids = random_positive_knots(opts.seed, opts.random_braids, opts.max_strands, opts.max_letters);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x9e37_79b9);
    braids
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let k = rng.random_range(1..b.len().max(2));
            let name = format!("braid {i}: {} on {} strands", b.to_text(), b.strands());
            Check::from_result(name, markov_one(b, k))
        })
        .collect()
}

fn markov_one(b: &BraidWord, k: usize) -> Result<(bool, String)> {
    // leading x-order of a positive braid knot is its genus
    let genus = (b.len() + 1 - b.strands()) as i32 / 2;
    let x_order = genus + 2;
    let f = fk_positive(b, x_order)?.series;
    let rotated = fk_positive(&b.rotate(k), x_order)?.series;
    let stabilized = fk_positive(&b.stabilize(true), x_order)?.series;
    let conj = f.diff_on_overlap(&rotated).is_zero() && f.x_window() == rotated.x_window();
    let stab = f.diff_on_overlap(&stabilized).is_zero() && f.x_window() == stabilized.x_window();
    let nonzero = !f.is_zero();
    Ok((
        conj && stab && nonzero,
        format!(
            "x-order {x_order}, {} terms; conjugation by rotation {k}: {}; positive stabilization: {}",
            f.terms().count(),
            verdict(conj),
            verdict(stab)
        ),
    ))
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "equal"
    } else {
        "differs"
    }
}

// ---------------------------------------------------------------------------
// Classical limit
// ---------------------------------------------------------------------------

/// The `q = 1` strata of `b` against the graded Burau trace, for `w ≤ max_weight`.
/// Lowest-weight strata are the mirror's highest-weight ones with `x -> x^{-1}`.
pub fn graded_classical_limit(b: &BraidWord, module: Module, max_weight: usize) -> Result<(bool, String)> {
    let expected: Vec<BiSeries> = match module {
        Module::Hw => burau_strata(b, max_weight),
        Module::Lw => burau_strata(&b.mirror(), max_weight)
            .into_iter()
            .map(|s| s.substitute(Substitution::XInv))
            .collect::<Result<_>>()?,
    };
    let mut bad = Vec::new();
    for (w, e) in expected.iter().enumerate() {
        let got = stratum_trace(b, module, w)?.at_q_one()?;
        if &got != e {
            bad.push(w);
        }
    }
    let m = match module {
        Module::Hw => "hw",
        Module::Lw => "lw",
    };
    let reference = match module {
        Module::Hw => "x^((N-1-w)/2) [y^w] 1/det(I - y B')",
        Module::Lw => "the mirror's graded Burau trace at x -> 1/x",
    };
    Ok((
        bad.is_empty(),
        if bad.is_empty() {
            format!("{m} strata w <= {max_weight} equal {reference}")
        } else {
            format!("{m} strata differ at weights {bad:?}")
        },
    ))
}

/// `F^-` at `q = 1` against the expansion of `(x^{1/2} - x^{-1/2}) / Δ`, for positive braids.
pub fn direct_classical_limit(b: &BraidWord, x_order: i32) -> Result<(bool, String)> {
    let f = fk_positive(b, x_order)?.series.at_q_one()?;
    let c = classical_fminus(&alexander(b)?, x_order);
    let ok = f.diff_on_overlap(&c).is_zero() && !f.is_zero();
    Ok((ok, format!("F^- at q = 1 through x^(-{x_order}-1/2) {} (x^(1/2) - x^(-1/2))/Delta", verdict_eq(ok))))
}

fn verdict_eq(ok: bool) -> &'static str {
    if ok {
        "equals"
    } else {
        "differs from"
    }
}

fn classical_limit(opts: &VerifyOptions) -> Vec<Check> {
    let mut knots: Vec<(String, BraidWord, Vec<Module>)> = Vec::new();
    for f in braid_fixtures() {
        match f.braid() {
            Ok(b) => knots.push((f.name.to_string(), b, vec![f.module])),
            Err(e) => return vec![Check::new(f.name, false, format!("error: {e}"))],
        }
    }
    for &(name, strands, word) in SMALL_KNOTS {
        match BraidWord::parse(word, strands) {
            Ok(b) => knots.push((name.to_string(), b, vec![Module::Hw, Module::Lw])),
            Err(e) => return vec![Check::new(name, false, format!("error: {e}"))],
        }
    }
    let mut out = Vec::new();
    for (name, b, modules) in knots {
        for m in modules {
            let label = match m {
                Module::Hw => "hw",
                Module::Lw => "lw",
            };
            out.push(Check::from_result(
                format!("{name} graded ({label})"),
                graded_classical_limit(&b, m, opts.max_weight),
            ));
        }
        if b.is_positive() {
            let genus = (b.len() + 1 - b.strands()) as i32 / 2;
            out.push(Check::from_result(format!("{name} series"), direct_classical_limit(&b, genus + 3)));
        }
    }
    out.push(Check::new(
        M_SEVEN_4.name,
        true,
        "skipped: no braid presentation; the closed form has infinite q-series coefficients",
    ));
    out
}

// ---------------------------------------------------------------------------
// Finite color
// ---------------------------------------------------------------------------

/// Torus knots used for the finite-color comparison.
pub const TORUS_KNOTS: &[(&str, usize, &str)] = &[("T(2,3)", 2, "1,1,1"), ("T(2,5)", 2, "1,1,1,1,1")];

/// Outcome of comparing `F(x = q^n)` with `(q^{n/2} - q^{-n/2}) J(n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteColorReport {
    pub n: i32,
    /// `q2` exponents below this are certified.
    pub certified_q2: Option<i32>,
    pub compared_terms: usize,
    pub target_terms: usize,
    /// Degrees where the balanced `(F^- + F^+)/2` disagrees.
    pub balanced_mismatches: usize,
    /// Degrees where `F^-` alone disagrees.
    pub minus_mismatches: usize,
}

impl FiniteColorReport {
    pub fn passed(&self) -> bool {
        self.certified_q2.is_some() && self.balanced_mismatches == 0 && self.compared_terms > 0
    }
}

/// Substitutes `x = q^n` into `F^-` of a positive braid knot and into its Weyl image
/// `F^+(x) = -F^-(x^{-1})`, and compares against the finite-color Jones polynomial.
///
/// Unknown terms are assumed to keep growing in `q`-degree past the window (the
/// quadratic growth conjectured for positive braid knots), so the certified range
/// ends at the substituted degree of the outermost known coefficient; nothing is
/// certified unless that degree is still rising there.
pub fn finite_color_consistency(f_minus: &BiSeries, b: &BraidWord, n: i32) -> Result<FiniteColorReport> {
    let lo = f_minus
        .x_window()
        .lo
        .ok_or_else(|| Error::InvalidArgument("expected a lower-bounded F^- window".into()))?;
    let mut min_q: BTreeMap<i32, i32> = BTreeMap::new();
    let mut minus: BTreeMap<i32, Rational> = BTreeMap::new();
    let mut plus: BTreeMap<i32, Rational> = BTreeMap::new();
    for (q2, x2, c) in f_minus.terms() {
        let e = min_q.entry(x2).or_insert(q2);
        *e = (*e).min(q2);
        *minus.entry(q2 + n * x2).or_default() += c;
        *plus.entry(q2 - n * x2).or_default() -= c;
    }
    let outer: Vec<(i32, i32)> = min_q.iter().take(3).map(|(&x, &q)| (x, q)).collect();
    let rising = outer.len() == 3 && outer.windows(2).all(|p| p[0].1 + n * p[0].0 >= p[1].1 + n * p[1].0);
    let certified_q2 = rising.then(|| {
        let (x_out, q_out) = outer[0];
        (q_out + n * x_out).min(q_out - n * lo)
    });
    let j = colored_jones(b, n as u32, true)?;
    let mut target: BTreeMap<i32, Rational> = BTreeMap::new();
    for (q2, _, c) in j.terms() {
        *target.entry(q2 + n).or_default() += c;
        *target.entry(q2 - n).or_default() -= c;
    }
    let half = rat_frac(1, 2);
    let mut balanced: BTreeMap<i32, Rational> = minus.clone();
    for (k, v) in &plus {
        *balanced.entry(*k).or_default() += v;
    }
    let mismatches = |m: &BTreeMap<i32, Rational>, scale: &Rational, edge: i32| {
        let keys: std::collections::BTreeSet<i32> =
            m.keys().chain(target.keys()).copied().filter(|&k| k < edge).collect();
        keys.into_iter()
            .filter(|k| {
                let a = m.get(k).cloned().unwrap_or_else(Rational::zero) * scale;
                let b = target.get(k).cloned().unwrap_or_else(Rational::zero);
                a != b
            })
            .count()
    };
    let edge = certified_q2.unwrap_or(i32::MIN);
    let one = Rational::from_integer(1.into());
    Ok(FiniteColorReport {
        n,
        certified_q2,
        compared_terms: target.iter().filter(|(k, v)| **k < edge && !v.is_zero()).count(),
        target_terms: target.values().filter(|v| !v.is_zero()).count(),
        balanced_mismatches: mismatches(&balanced, &half, edge),
        minus_mismatches: mismatches(&minus, &one, edge),
    })
}

fn finite_color(opts: &VerifyOptions) -> Vec<Check> {
    let mut out = Vec::new();
    for &(name, strands, word) in TORUS_KNOTS {
        let prepared = BraidWord::parse(word, strands).and_then(|b| {
            let f = fk_positive(&b, opts.finite_x_order)?;
            Ok((b, f.series))
        });
        let (b, f) = match prepared {
            Ok(p) => p,
            Err(e) => {
                out.push(Check::new(name, false, format!("error: {e}")));
                continue;
            }
        };
        for n in [2, 3] {
            let r = finite_color_consistency(&f, &b, n).map(|r| {
                let detail = match r.certified_q2 {
                    Some(e) => format!(
                        "certified below q^{}; {} of {} target terms compared; balanced mismatches {}; F^- alone mismatches {}",
                        fmt_half(e),
                        r.compared_terms,
                        r.target_terms,
                        r.balanced_mismatches,
                        r.minus_mismatches
                    ),
                    None => "window does not reach the rising tail; nothing certified".to_string(),
                };
                (r.passed(), detail)
            });
            out.push(Check::from_result(format!("{name} n={n}"), r));
        }
    }
    out
}

fn fmt_half(q2: i32) -> String {
    if q2 % 2 == 0 {
        format!("{}", q2 / 2)
    } else {
        format!("({q2}/2)")
    }
}

// ---------------------------------------------------------------------------
// Fixtures
// ---------------------------------------------------------------------------

/// Computes the fixture's series and compares it with the printed data.
pub fn check_fixture(f: &Fixture) -> Result<(bool, String)> {
    match f.printed {
        Printed::Window { min_x2, .. } => {
            let printed = f.window().expect("window fixture")?;
            let b = f.braid()?;
            let x_order = (-min_x2 - 1) / 2;
            let computed = if b.is_positive() {
                fk_positive(&b, x_order)?
            } else {
                let q_top = printed.terms().map(|t| t.0).max().unwrap_or(0);
                let opts = StratifiedOptions { x_order, q_order: q_top.div_euclid(2) + 2, ..Default::default() };
                fk_stratified(&b, f.module, &opts)?
            };
            let window = computed.series.clone().with_window(Window::at_least(min_x2));
            let ok = window.diff_on_overlap(&printed).is_zero() && printed.terms().count() == window.terms().count();
            Ok((ok, format!("{} printed terms on x-exponents >= {}/2: {}", printed.terms().count(), min_x2, verdict(ok))))
        }
        Printed::Coeffs(cs) => {
            let x_order = cs.iter().map(|c| c.m).max().unwrap_or(0);
            let q_order = cs.iter().filter_map(|c| c.q_order).max().unwrap_or(10);
            let coeff: Box<dyn Fn(i32) -> BiSeries> = if f.word.is_empty() {
                let (s, _) = lovejoy_osburn_fk(DoubleTwistSpec::Full { m: 2, p: 2 }, x_order, q_order)?;
                Box::new(move |m| s.x_coeff(2 * m + 1))
            } else {
                let opts = StratifiedOptions { x_order, q_order, max_strata: 80, ..Default::default() };
                let r = fk_stratified(&f.braid()?, f.module, &opts)?;
                Box::new(move |m| r.f_coefficient(m))
            };
            let mut bad = Vec::new();
            for c in cs {
                if !coeff(c.m).diff_on_overlap(&c.series()?).is_zero() {
                    bad.push(c.m);
                }
            }
            let source = if f.word.is_empty() { "double twist closed form" } else { "stratified trace" };
            Ok((
                bad.is_empty(),
                if bad.is_empty() {
                    format!("{} printed coefficients through q^{q_order} match the {source}", cs.len())
                } else {
                    format!("coefficients {bad:?} differ from the {source}")
                },
            ))
        }
    }
}

fn fixtures() -> Vec<Check> {
    braid_fixtures()
        .iter()
        .chain([&M_SEVEN_4])
        .map(|f| Check::from_result(f.name, check_fixture(f)))
        .collect()
}
