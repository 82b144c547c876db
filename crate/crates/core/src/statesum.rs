//! Weight-stratified reduced quantum traces of braid closures.
//!
//! A braid acts on `V^{⊗N}` one crossing at a time. The trace is computed per
//! bottom basis tuple `b` (open strand pinned): every state reachable from `b` is
//! enumerated first, then a backward pass bounds the exponents the remaining
//! crossings and the closing factors can still contribute, and the forward pass
//! drops every partial term that can no longer land inside the requested window.
//! Only the diagonal coefficient `<b|β|b>` survives, times the closing weights
//! `x^{1/2} q^{-1/2-i}` (highest weight) or `x^{-1/2} q^{1/2+i}` (lowest weight) of the
//! closed strands.

use std::sync::Arc;

use rayon::prelude::*;
use rustc_hash::{FxHashMap, FxHashSet};
use serde_json::{json, Value};

use crate::algebra::{rat, rat_frac, BiSeries, MultiSeries, Substitution, Window};
use crate::braid::BraidWord;
use crate::error::{Error, Result};
use crate::poly::{Cut, Extent, Mono, Poly, NV};
use crate::rmatrix::{crossing_outputs, CrossingSpec, EntryCut, Family, Out, Sign};

/// Largest strand count the engine handles.
pub const MAX_STRANDS: usize = 8;

pub(crate) type State = [u16; MAX_STRANDS];

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Module {
    Hw,
    Lw,
}

impl Module {
    fn family(self) -> Family {
        match self {
            Module::Hw => Family::Hw,
            Module::Lw => Family::Lw,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expansion {
    /// `F^-`, a series in `x^{-1}`.
    Negative,
    /// `F^+`, a series in `x`.
    Positive,
    /// `(F^+ + F^-)/2`.
    Balanced,
}

impl Expansion {
    pub fn name(self) -> &'static str {
        match self {
            Expansion::Negative => "negative",
            Expansion::Positive => "positive",
            Expansion::Balanced => "balanced",
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Exactness {
    /// Every coefficient in the window is a complete Laurent polynomial in `q`.
    ExactPolynomialCoeffs,
    /// Coefficients below `q^{q_valid2/2}` were unchanged over the last strata.
    Stabilized { q_valid2: i32 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct FkResult {
    pub series: BiSeries,
    pub expansion: Expansion,
    pub exactness: Exactness,
    pub strata_used: usize,
}

impl FkResult {
    pub fn to_json(&self) -> Value {
        let exactness = match self.exactness {
            Exactness::ExactPolynomialCoeffs => json!("exact_polynomial_coeffs"),
            Exactness::Stabilized { q_valid2 } => json!({ "stabilized": q_valid2 }),
        };
        json!({
            "series": self.series.to_json(),
            "text": self.series.to_text(),
            "expansion": self.expansion.name(),
            "exactness": exactness,
            "strata_used": self.strata_used,
        })
    }

    /// `f_m(q)` in `F^- = -x^{-1/2} Σ f_m x^{-m}` or `F^+ = x^{1/2} Σ f_m x^m`.
    pub fn f_coefficient(&self, m: i32) -> BiSeries {
        match self.expansion {
            Expansion::Negative => -self.series.x_coeff(-2 * m - 1),
            _ => self.series.x_coeff(2 * m + 1),
        }
    }
}

/// Multivariable result; variables are named and exponents are in quarter units.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiFkResult {
    pub series: MultiSeries,
    pub exactness: Exactness,
    pub strata_used: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct StratifiedOptions {
    pub x_order: i32,
    pub q_order: i32,
    pub max_strata: usize,
    /// Number of consecutive strata that must leave the window unchanged.
    pub stable_after: usize,
    /// Basis index of the open strand.
    pub pin: u16,
}

impl Default for StratifiedOptions {
    fn default() -> Self {
        StratifiedOptions { x_order: 10, q_order: 40, max_strata: 60, stable_after: 3, pin: 0 }
    }
}

/// Closing weight of one closed strand in state `i`.
fn closing_mono(family: Family, color: u8, i: u16) -> Mono {
    let i = i as i32;
    match family {
        Family::Hw => Mono::var(color as usize, 2, -2 - 4 * i),
        Family::Lw => Mono::var(color as usize, -2, 2 + 4 * i),
        Family::Finite => Mono::q_only(2 * (color as i32 - 1 - 2 * i)),
    }
}

/// A braid closure prepared for state sums.
pub(crate) struct Engine {
    n: usize,
    family: Family,
    /// `(position, crossing)` per letter, bottom to top.
    steps: Vec<(usize, CrossingSpec)>,
    /// Color of the strand at each bottom position: a variable index for Verma
    /// modules, the dimension for finite colors.
    colors: Vec<u8>,
    /// Position of the open strand; `None` for the full trace.
    open: Option<usize>,
    cut: Cut,
    entry_cut: EntryCut,
}

impl Engine {
    pub fn new(word: &BraidWord, family: Family, colors: Vec<u8>, open: Option<usize>) -> Result<Engine> {
        let n = word.strands();
        if n > MAX_STRANDS {
            return Err(Error::InvalidArgument(format!("at most {MAX_STRANDS} strands are supported")));
        }
        if colors.len() != n {
            return Err(Error::InvalidArgument("one color per strand is required".into()));
        }
        if family != Family::Finite && colors.iter().any(|&c| c as usize >= NV) {
            return Err(Error::InvalidArgument(format!("at most {NV} variables are supported")));
        }
        let hist = word.label_history();
        let steps = word
            .letters()
            .iter()
            .zip(&hist)
            .map(|(&l, at)| {
                let k = l.unsigned_abs() as usize - 1;
                let spec = CrossingSpec {
                    family,
                    sign: Sign::of_letter(l),
                    left: colors[at[k]],
                    right: colors[at[k + 1]],
                };
                (k, spec)
            })
            .collect();
        Ok(Engine { n, family, steps, colors, open, cut: Cut::NONE, entry_cut: EntryCut::default() })
    }

    fn closing(&self, s: &State) -> Mono {
        (0..self.n)
            .filter(|&p| Some(p) != self.open)
            .fold(Mono::default(), |m, p| m.mul(closing_mono(self.family, self.colors[p], s[p])))
    }

    /// Bottom tuples whose closed strands carry total weight `w`.
    pub fn tuples(&self, w: usize, pin: u16) -> Vec<State> {
        let closed: Vec<usize> = (0..self.n).filter(|&p| Some(p) != self.open).collect();
        let cap = |p: usize| -> usize {
            match self.family {
                Family::Finite => self.colors[p] as usize - 1,
                _ => usize::MAX,
            }
        };
        let mut base = [0u16; MAX_STRANDS];
        if let Some(o) = self.open {
            base[o] = pin;
        }
        let mut out = Vec::new();
        fn rec(closed: &[usize], left: usize, cur: &mut State, cap: &dyn Fn(usize) -> usize, out: &mut Vec<State>) {
            match closed.split_first() {
                None => {
                    if left == 0 {
                        out.push(*cur);
                    }
                }
                Some((&p, rest)) => {
                    for v in (0..=left.min(cap(p))).rev() {
                        cur[p] = v as u16;
                        rec(rest, left - v, cur, cap, out);
                    }
                    cur[p] = 0;
                }
            }
        }
        rec(&closed, w, &mut base, &cap, &mut out);
        out
    }

    /// `<b|β|b>` times the closing weights, restricted to the cut.
    pub fn tuple_trace(&self, b: &State) -> Result<Poly> {
        let l = self.steps.len();
        let step = |s: &State, k: usize, o: &Out| {
            let mut t = *s;
            t[k] = o.l;
            t[k + 1] = o.r;
            t
        };
        let mut layers: Vec<FxHashMap<State, Arc<[Out]>>> = Vec::with_capacity(l);
        let mut cur: FxHashSet<State> = FxHashSet::default();
        cur.insert(*b);
        for &(k, spec) in &self.steps {
            let mut map = FxHashMap::default();
            let mut next = FxHashSet::default();
            for s in cur {
                let outs = crossing_outputs(spec, s[k], s[k + 1], self.entry_cut);
                for o in outs.iter() {
                    next.insert(step(&s, k, o));
                }
                map.insert(s, outs);
            }
            layers.push(map);
            cur = next;
        }
        if !cur.contains(b) {
            return Ok(Poly::zero());
        }
        let closing = self.closing(b);
        // rest[t][s]: bound on everything multiplied in after reaching `s` at layer `t`.
        let mut rest: Vec<FxHashMap<State, Extent>> = vec![FxHashMap::default(); l + 1];
        rest[l].insert(*b, Extent::of_mono(closing));
        for t in (0..l).rev() {
            let k = self.steps[t].0;
            let (head, tail) = rest.split_at_mut(t + 1);
            for (s, outs) in &layers[t] {
                let mut acc: Option<Extent> = None;
                for o in outs.iter() {
                    if let Some(e) = tail[0].get(&step(s, k, o)) {
                        let c = o.ext.plus(e);
                        acc = Some(acc.map_or(c, |a| a.hull(&c)));
                    }
                }
                if let Some(a) = acc {
                    head[t].insert(*s, a);
                }
            }
        }
        match rest[0].get(b) {
            Some(e) if self.cut.admits_extent(e) => {}
            _ => return Ok(Poly::zero()),
        }
        let cut = self.cut;
        let mut vec: FxHashMap<State, Poly> = FxHashMap::default();
        vec.insert(*b, Poly::one());
        for t in 0..l {
            let k = self.steps[t].0;
            let mut next: FxHashMap<State, Poly> = FxHashMap::default();
            for (s, c) in &vec {
                for o in layers[t][s].iter() {
                    let target = step(s, k, o);
                    let Some(r) = rest[t + 1].get(&target) else { continue };
                    next.entry(target).or_default().add_mul(c, &o.poly, |m| cut.admits(m, r))?;
                }
            }
            next.retain(|_, p| !p.is_zero());
            vec = next;
        }
        Ok(vec.remove(b).map(|d| d.scale_mono(closing)).unwrap_or_default())
    }

    pub fn stratum(&self, w: usize, pin: u16) -> Result<Poly> {
        sum_traces(self, self.tuples(w, pin))
    }
}

pub(crate) fn sum_traces(engine: &Engine, tuples: Vec<State>) -> Result<Poly> {
    tuples
        .par_iter()
        .map(|b| engine.tuple_trace(b))
        .try_reduce(Poly::zero, |mut a, b| {
            a.add_assign(&b)?;
            Ok(a)
        })
}

/// Runs strata until the last `stable_after` of them add nothing inside the cut.
fn run_stratified(engine: &Engine, pin: u16, max_strata: usize, stable_after: usize) -> Result<(Poly, usize)> {
    let mut acc = Poly::zero();
    let mut last_change: Option<usize> = None;
    for w in 0..max_strata {
        let s = engine.stratum(w, pin)?;
        if !s.is_zero() {
            acc.add_assign(&s)?;
            last_change = Some(w);
        }
        let quiet = w + 1 - last_change.map_or(0, |c| c + 1);
        if quiet >= stable_after {
            return Ok((acc, w + 1));
        }
    }
    Err(Error::NoStabilization {
        strata: max_strata,
        detail: format!(
            "window still changing at stratum {}; partial trace has {} terms",
            last_change.unwrap_or(0),
            acc.len()
        ),
    })
}

fn one_var_colors(word: &BraidWord) -> Vec<u8> {
    vec![0; word.strands()]
}

fn x_half_factor() -> BiSeries {
    BiSeries::from_terms([(0, 1, rat(1)), (0, -1, rat(-1))])
}

/// Contribution of stratum `w` to the reduced trace, including its share of the
/// prefactor (`x^{(N-1)/2} q^{-(N-1)/2} q^{-w}` for highest weight).
pub fn stratum_trace(b: &BraidWord, module: Module, w: usize) -> Result<BiSeries> {
    let e = Engine::new(b, module.family(), one_var_colors(b), Some(0))?;
    e.stratum(w, 0)?.to_biseries(0)
}

/// `F_K` of a positive braid knot (highest weight, `F^-`) or of a negative braid
/// knot (lowest weight, `F^+`), exact on `|x-exponent| ≤ x_order + 1/2`.
pub fn fk_positive(b: &BraidWord, x_order: i32) -> Result<FkResult> {
    b.require_knot()?;
    if x_order < 0 {
        return Err(Error::InvalidArgument("x-order must be nonnegative".into()));
    }
    let module = if b.is_positive() {
        Module::Hw
    } else if b.is_negative() {
        Module::Lw
    } else {
        let l = *b.letters().iter().find(|&&l| l < 0).expect("mixed word has a negative letter");
        return Err(Error::NotPositive(l));
    };
    let n = b.strands() as i32;
    let len = b.len() as i32;
    let mut e = Engine::new(b, module.family(), one_var_colors(b), Some(0))?;
    // The trace is needed for |x4| ≤ 4X + 4. Every entry carries x4 ≤ -2 (resp. ≥ 2)
    // and the closing adds 2(N-1) (resp. -2(N-1)), which bounds any single entry.
    let edge = 4 * x_order + 4;
    let entry_edge = edge + 2 * (n - 1) - 2 * (len - 1).max(0);
    match module {
        Module::Hw => {
            e.cut.x_lo[0] = Some(-edge);
            e.entry_cut.lo = Some(-entry_edge);
        }
        Module::Lw => {
            e.cut.x_hi[0] = Some(edge);
            e.entry_cut.hi = Some(entry_edge);
        }
    }
    // A state whose largest strand weight is M has x-degree at most -M/2 (the proof's
    // bound), so strata beyond (N-1)·max M with M = 2X + 2 cannot reach the window.
    let strata = ((n - 1) * (2 * x_order + 2)) as usize + 1;
    let tuples: Vec<State> = (0..strata).flat_map(|w| e.tuples(w, 0)).collect();
    let tr = sum_traces(&e, tuples)?.to_biseries(0)?;
    let (window, expansion) = match module {
        Module::Hw => (Window::at_least(-2 * x_order - 2), Expansion::Negative),
        Module::Lw => (Window::at_most(2 * x_order + 2), Expansion::Positive),
    };
    let series = &x_half_factor() * &tr.with_window(window);
    Ok(FkResult { series, expansion, exactness: Exactness::ExactPolynomialCoeffs, strata_used: strata })
}

/// `F_K` as the limit of stratified traces, for arbitrary braid knots. The window is
/// `x`-exponents within `x_order + 1/2` of zero on the expansion side and `q`-exponents
/// up to `q_order`.
pub fn fk_stratified(b: &BraidWord, module: Module, opts: &StratifiedOptions) -> Result<FkResult> {
    b.require_knot()?;
    let n = b.strands() as i32;
    let len = b.len() as i32;
    let mut e = Engine::new(b, module.family(), one_var_colors(b), Some(0))?;
    let edge = 4 * opts.x_order + 4;
    let entry_edge = edge + 2 * (n - 1) - 2 * (len - 1).max(0);
    e.cut.q_max = Some(4 * opts.q_order + 1);
    match module {
        Module::Hw => {
            e.cut.x_lo[0] = Some(-edge);
            if b.is_positive() {
                e.entry_cut.lo = Some(-entry_edge);
            }
        }
        Module::Lw => {
            e.cut.x_hi[0] = Some(edge);
            if b.is_negative() {
                e.entry_cut.hi = Some(entry_edge);
            }
        }
    }
    let (tr, strata) = run_stratified(&e, opts.pin, opts.max_strata, opts.stable_after)?;
    let (window, expansion) = match module {
        Module::Hw => (Window::at_least(-2 * opts.x_order - 2), Expansion::Negative),
        Module::Lw => (Window::at_most(2 * opts.x_order + 2), Expansion::Positive),
    };
    let q_valid2 = 2 * opts.q_order + 1;
    let tr = tr.to_biseries(0)?.with_validity(window, Some(q_valid2));
    let series = &x_half_factor() * &tr;
    Ok(FkResult { series, expansion, exactness: Exactness::Stabilized { q_valid2 }, strata_used: strata })
}

/// Multivariable highest-weight trace of a braid link. `coloring[p]` is the variable
/// index of the strand starting at bottom position `p`; position 0 is the open strand.
/// The result is `(x_0^{1/2} - x_0^{-1/2}) Tr'` in the variables `names`, known for
/// exponents of each `x_v` down to `-(x_orders[v] + 1/2)` and `q` up to `q_order`.
pub fn fk_multivariable(
    b: &BraidWord,
    coloring: &[usize],
    names: &[&str],
    x_orders: &[i32],
    opts: &StratifiedOptions,
) -> Result<MultiFkResult> {
    let info = b.closure_info();
    if coloring.len() != b.strands() {
        return Err(Error::InconsistentColoring("one variable per strand is required".into()));
    }
    if names.len() != x_orders.len() || names.is_empty() || names.len() > NV {
        return Err(Error::InvalidArgument("variable names and orders must match (at most 4)".into()));
    }
    let mut var_of_comp: Vec<Option<usize>> = vec![None; info.components];
    for (p, &v) in coloring.iter().enumerate() {
        if v >= names.len() {
            return Err(Error::InconsistentColoring(format!("strand {p} uses unknown variable {v}")));
        }
        let c = info.component_of_strand[p];
        match var_of_comp[c] {
            Some(u) if u != v => {
                return Err(Error::InconsistentColoring(format!(
                    "component {c} carries variables {} and {}",
                    names[u], names[v]
                )))
            }
            _ => var_of_comp[c] = Some(v),
        }
    }
    let colors: Vec<u8> = coloring.iter().map(|&v| v as u8).collect();
    let mut e = Engine::new(b, Family::Hw, colors, Some(0))?;
    e.cut.q_max = Some(4 * opts.q_order + 1);
    for (v, &xo) in x_orders.iter().enumerate() {
        e.cut.x_lo[v] = Some(-4 * xo - 4);
    }
    let (tr, strata) = run_stratified(&e, opts.pin, opts.max_strata, opts.stable_after)?;
    let open = coloring[0];
    let mut f = Poly::zero();
    f.add_assign(&tr.scale_mono(Mono::var(open, 2, 0)))?;
    f.add_assign(&tr.scale_mono(Mono::var(open, -2, 0)).negated())?;
    let windows: Vec<Window> = x_orders.iter().map(|&xo| Window::at_least(-4 * xo - 2)).collect();
    let series = f.to_multiseries(names).with_windows(&windows).with_q_valid(4 * opts.q_order + 2);
    Ok(MultiFkResult { series, exactness: Exactness::Stabilized { q_valid2: 2 * opts.q_order + 1 }, strata_used: strata })
}

/// The other one-sided expansion (`F^+(x) = -F^-(x^{-1})`) and the balanced one.
pub fn weyl_transforms(r: &FkResult) -> Result<(FkResult, FkResult)> {
    let expansion = match r.expansion {
        Expansion::Negative => Expansion::Positive,
        Expansion::Positive => Expansion::Negative,
        Expansion::Balanced => {
            return Err(Error::InvalidArgument("input is already balanced".into()));
        }
    };
    let mirror = -r.series.substitute(Substitution::XInv)?;
    let balanced = (&mirror + &r.series).scalar_mul(&rat_frac(1, 2));
    Ok((
        FkResult { series: mirror, expansion, ..r.clone() },
        FkResult { series: balanced, expansion: Expansion::Balanced, ..r.clone() },
    ))
}

/// A vector in `V^{⊗N}` for explicit crossing-by-crossing evaluation (used by the
/// braid-relation checks). Colors travel with the strands.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    family: Family,
    colors: Vec<u8>,
    terms: FxHashMap<Vec<u16>, Poly>,
}

impl StateVector {
    /// The basis vector `v^{s_1} ⊗ … ⊗ v^{s_N}`. For [`Family::Finite`] the colors
    /// are dimensions and `s_p` indexes `v_{n-1-2 s_p}`; otherwise they are variable
    /// indices.
    pub fn basis(family: Family, colors: Vec<u8>, state: &[u16]) -> Result<StateVector> {
        if colors.len() != state.len() {
            return Err(Error::InvalidArgument("one color per strand is required".into()));
        }
        if family == Family::Finite && colors.iter().zip(state).any(|(&n, &s)| n == 0 || s >= n as u16) {
            return Err(Error::InvalidArgument("finite state out of range".into()));
        }
        if family != Family::Finite && colors.iter().any(|&c| c as usize >= NV) {
            return Err(Error::InvalidArgument(format!("at most {NV} variables are supported")));
        }
        let mut terms = FxHashMap::default();
        terms.insert(state.to_vec(), Poly::one());
        Ok(StateVector { family, colors, terms })
    }

    pub fn apply(&mut self, letter: i32) -> Result<()> {
        let k = letter.unsigned_abs() as usize - 1;
        if letter == 0 || k + 1 >= self.colors.len() {
            return Err(Error::InvalidBraid(format!("letter {letter} out of range")));
        }
        let spec =
            CrossingSpec { family: self.family, sign: Sign::of_letter(letter), left: self.colors[k], right: self.colors[k + 1] };
        let mut next: FxHashMap<Vec<u16>, Poly> = FxHashMap::default();
        for (s, c) in &self.terms {
            for o in crossing_outputs(spec, s[k], s[k + 1], EntryCut::default()).iter() {
                let mut t = s.clone();
                t[k] = o.l;
                t[k + 1] = o.r;
                next.entry(t).or_default().add_mul(c, &o.poly, |_| true)?;
            }
        }
        next.retain(|_, p| !p.is_zero());
        self.terms = next;
        self.colors.swap(k, k + 1);
        Ok(())
    }

    pub fn apply_word(&mut self, letters: &[i32]) -> Result<()> {
        letters.iter().try_for_each(|&l| self.apply(l))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn colors(&self) -> &[u8] {
        &self.colors
    }

    /// Sorted entries with coefficients in the named variables.
    pub fn entries(&self, names: &[&str]) -> Vec<(Vec<u16>, MultiSeries)> {
        let mut v: Vec<(Vec<u16>, MultiSeries)> =
            self.terms.iter().map(|(s, p)| (s.clone(), p.to_multiseries(names))).collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(s: &str, n: usize) -> BraidWord {
        BraidWord::parse(s, n).unwrap()
    }

    #[test]
    fn unknot_trace_is_one() {
        let u = BraidWord::new(1, vec![]).unwrap();
        assert_eq!(stratum_trace(&u, Module::Hw, 0).unwrap(), BiSeries::one());
        let f = fk_positive(&u, 3).unwrap();
        assert_eq!(f.series.to_text(), "-x^(-1/2) + x^(1/2)");
    }

    #[test]
    fn trefoil_ground_stratum() {
        // One state: three diagonal entries x^{-1/2}q^{1/2} and the closing x^{1/2}q^{-1/2}.
        let s = stratum_trace(&word("1,1,1", 2), Module::Hw, 0).unwrap();
        assert_eq!(s.to_text(), "q*x^(-1)");
    }

    #[test]
    fn crossing_then_inverse_is_identity() {
        for fam in [Family::Hw, Family::Lw] {
            let mut v = StateVector::basis(fam, vec![0, 1], &[2, 1]).unwrap();
            v.apply_word(&[1, -1]).unwrap();
            assert_eq!(v, StateVector::basis(fam, vec![0, 1], &[2, 1]).unwrap());
        }
    }
}
