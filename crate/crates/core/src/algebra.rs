//! Exact sparse Laurent series in `q` and `x` with half-integer exponents.
//!
//! Exponents are stored doubled (`x2`, `q2`). A [`BiSeries`] carries the range of
//! `x`-exponents on which its coefficients are known ([`Window`]) and the `q`-order
//! from which coefficients are unknown (`q_valid2`). Arithmetic propagates both.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use parking_lot::RwLock;
use serde_json::{json, Value};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Twice an exponent; `Exp2(3)` is the exponent `3/2`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Exp2(pub i32);

impl Exp2 {
    pub fn from_int(n: i32) -> Self {
        Exp2(2 * n)
    }

    pub fn is_integral(self) -> bool {
        self.0 % 2 == 0
    }
}

impl fmt::Display for Exp2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", fmt_frac(self.0 as i64, 2))
    }
}

/// `num/den` reduced, or just `num` when integral.
pub(crate) fn fmt_frac(num: i64, den: i64) -> String {
    let g = num.gcd(&den).max(1);
    let (n, d) = (num / g, den / g);
    let (n, d) = if d < 0 { (-n, -d) } else { (n, d) };
    if d == 1 {
        n.to_string()
    } else {
        format!("{n}/{d}")
    }
}

/// Formats `base^e` where `e = num/den`; empty when the exponent is zero.
pub(crate) fn fmt_power(base: &str, num: i64, den: i64) -> String {
    if num == 0 {
        return String::new();
    }
    if num == den {
        return base.to_string();
    }
    let e = fmt_frac(num, den);
    if e.starts_with('-') || e.contains('/') {
        format!("{base}^({e})")
    } else {
        format!("{base}^{e}")
    }
}

/// Joins a coefficient with monomial factors: `-2*q^3*x^(-7/2)`, `q`, `-1`.
pub(crate) fn fmt_term(c: &Rational, factors: &[String]) -> String {
    let factors: Vec<&String> = factors.iter().filter(|s| !s.is_empty()).collect();
    let body = factors.iter().map(|s| s.as_str()).collect::<Vec<_>>().join("*");
    if body.is_empty() {
        return c.to_string();
    }
    if c.is_one() {
        body
    } else if (-c).is_one() {
        format!("-{body}")
    } else {
        format!("{c}*{body}")
    }
}

/// Joins signed terms with ` + ` / ` - `.
pub(crate) fn join_terms(terms: impl IntoIterator<Item = String>) -> String {
    let mut out = String::new();
    for t in terms {
        if out.is_empty() {
            out = t;
        } else if let Some(rest) = t.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(rest);
        } else {
            out.push_str(" + ");
            out.push_str(&t);
        }
    }
    if out.is_empty() {
        "0".to_string()
    } else {
        out
    }
}

/// Range of exponents (doubled, or in whatever unit the owner uses) on which
/// coefficients are known. `None` on a side means known all the way out.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Window {
    pub lo: Option<i32>,
    pub hi: Option<i32>,
}

impl Window {
    pub const FULL: Window = Window { lo: None, hi: None };

    pub fn new(lo: Option<i32>, hi: Option<i32>) -> Self {
        Window { lo, hi }
    }

    pub fn at_least(lo: i32) -> Self {
        Window { lo: Some(lo), hi: None }
    }

    pub fn at_most(hi: i32) -> Self {
        Window { lo: None, hi: Some(hi) }
    }

    pub fn is_full(&self) -> bool {
        self.lo.is_none() && self.hi.is_none()
    }

    pub fn is_empty(&self) -> bool {
        matches!((self.lo, self.hi), (Some(l), Some(h)) if l > h)
    }

    pub fn contains(&self, e: i32) -> bool {
        self.lo.is_none_or(|l| e >= l) && self.hi.is_none_or(|h| e <= h)
    }

    pub fn intersect(&self, other: &Window) -> Window {
        let lo = match (self.lo, other.lo) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        let hi = match (self.hi, other.hi) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        Window { lo, hi }
    }

    /// Window of a product, given where each factor may be nonzero (unknown
    /// regions count as "anywhere" on their side).
    fn product(a: &Window, a_ext: Extent, b: &Window, b_ext: Extent) -> Window {
        const EMPTY_LO: i32 = i32::MAX / 2;
        const EMPTY_HI: i32 = i32::MIN / 2;
        let mut lo: Option<i64> = None;
        let mut hi: Option<i64> = None;
        for (w, other) in [(a, b_ext), (b, a_ext)] {
            if let Some(l) = w.lo {
                let c = match other.sup {
                    Bound::Finite(s) => Some(l as i64 + s),
                    Bound::NegInf => None,
                    Bound::PosInf => Some(EMPTY_LO as i64),
                };
                lo = lo.max(c);
            }
            if let Some(h) = w.hi {
                let c = match other.inf {
                    Bound::Finite(s) => Some(h as i64 + s),
                    Bound::PosInf => None,
                    Bound::NegInf => Some(EMPTY_HI as i64),
                };
                hi = match (hi, c) {
                    (Some(x), Some(y)) => Some(x.min(y)),
                    (x, y) => x.or(y),
                };
            }
        }
        let clamp = |v: i64| v.clamp(EMPTY_HI as i64, EMPTY_LO as i64) as i32;
        Window { lo: lo.map(clamp), hi: hi.map(clamp) }
    }

    pub(crate) fn to_json(self) -> Value {
        if self.is_full() {
            Value::Null
        } else {
            json!([self.lo, self.hi])
        }
    }

    pub(crate) fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::Null => Ok(Window::FULL),
            Value::Array(a) if a.len() == 2 => {
                let side = |x: &Value| -> Result<Option<i32>> {
                    match x {
                        Value::Null => Ok(None),
                        x => x
                            .as_i64()
                            .and_then(|n| i32::try_from(n).ok())
                            .map(Some)
                            .ok_or_else(|| Error::Parse("bad window bound".into())),
                    }
                };
                Ok(Window { lo: side(&a[0])?, hi: side(&a[1])? })
            }
            _ => Err(Error::Parse("x_window2 must be null or a pair".into())),
        }
    }
}

#[derive(Copy, Clone, Debug)]
enum Bound {
    NegInf,
    Finite(i64),
    PosInf,
}

/// Where a factor may be nonzero in `x`, counting unknown regions.
#[derive(Copy, Clone, Debug)]
struct Extent {
    inf: Bound,
    sup: Bound,
}

/// Substitutions accepted by [`BiSeries::substitute`].
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Substitution {
    /// `x -> q^n`
    XToQPow(i32),
    /// `x -> x^{-1}`
    XInv,
    /// `x -> 1`
    XToOne,
    /// `q -> q^{-1}`
    QInv,
}

/// Lower bound on the `q2`-degree of coefficients outside the known `x`-window,
/// as a function of the `x2` exponent. Used to certify `q`-orders after
/// substitutions and transforms that mix `x` into `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct TailFloor {
    /// `x2` at the window edge where the extrapolation starts.
    pub edge_x2: i32,
    /// Floor on `q2` at the edge.
    pub edge_q2: i32,
    /// Change of the floor per unit of `x2` moving away from the window.
    pub slope: Rational,
}

impl TailFloor {
    pub fn at(&self, x2: i32) -> Rational {
        let dist = Rational::from_integer(BigInt::from((x2 - self.edge_x2).abs()));
        Rational::from_integer(BigInt::from(self.edge_q2)) + &self.slope * dist
    }

    /// Extrapolates from the coefficients inside the window on its bounded side: the
    /// floor starts at the lowest `q2` of the outermost nonzero coefficient and moves
    /// by the smallest per-step change observed across the window. This is a
    /// heuristic (nothing beyond the window is known); callers label results with it.
    pub fn observe(s: &BiSeries) -> Option<TailFloor> {
        let w = s.x_window();
        let outward: i32 = match (w.lo, w.hi) {
            (Some(_), None) => -1,
            (None, Some(_)) => 1,
            _ => return None,
        };
        let mut lows: Vec<(i32, i32)> = Vec::new();
        for x in s.x_exponents() {
            if let Some(q) = s.terms.range((x, i32::MIN)..=(x, i32::MAX)).map(|(k, _)| k.1).next() {
                lows.push((x, q));
            }
        }
        if outward < 0 {
            lows.reverse();
        }
        let &(edge_x2, edge_q2) = lows.last()?;
        let slope = lows
            .windows(2)
            .map(|p| Rational::new(BigInt::from(p[1].1 - p[0].1), BigInt::from((p[1].0 - p[0].0).abs())))
            .min()
            .unwrap_or_else(Rational::zero);
        Some(TailFloor { edge_x2, edge_q2, slope })
    }
}

/// Sparse Laurent series in `q^{1/2}` and `x^{1/2}` with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BiSeries {
    /// `(x2, q2) -> c`; the key order is the canonical print order.
    terms: BTreeMap<(i32, i32), Rational>,
    x_window: Window,
    q_valid2: Option<i32>,
}

impl BiSeries {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, 0, Rational::one())
    }

    pub fn monomial(q2: i32, x2: i32, c: Rational) -> Self {
        let mut s = Self::zero();
        if !c.is_zero() {
            s.terms.insert((x2, q2), c);
        }
        s
    }

    pub fn int_monomial(q2: i32, x2: i32, c: i64) -> Self {
        Self::monomial(q2, x2, Rational::from_integer(c.into()))
    }

    /// Builds from `(q2, x2, c)` triples, summing duplicates.
    pub fn from_terms<I: IntoIterator<Item = (i32, i32, Rational)>>(it: I) -> Self {
        let mut s = Self::zero();
        for (q2, x2, c) in it {
            s.add_term(q2, x2, c);
        }
        s
    }

    /// Univariate `q`-series from integer coefficients `coeffs[k]` at `q^{(start2 + 2k)/2}`.
    pub fn from_q_coeffs(start2: i32, coeffs: &[i64]) -> Self {
        Self::from_terms(
            coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| (start2 + 2 * k as i32, 0, Rational::from_integer(c.into()))),
        )
    }

    pub fn add_term(&mut self, q2: i32, x2: i32, c: Rational) {
        if c.is_zero() || !self.x_window.contains(x2) || self.q_valid2.is_some_and(|v| q2 >= v) {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry((x2, q2)) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn x_window(&self) -> Window {
        self.x_window
    }

    pub fn q_valid2(&self) -> Option<i32> {
        self.q_valid2
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms as `(q2, x2, c)` in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (i32, i32, &Rational)> {
        self.terms.iter().map(|(&(x2, q2), c)| (q2, x2, c))
    }

    pub fn coeff(&self, q2: i32, x2: i32) -> Rational {
        self.terms.get(&(x2, q2)).cloned().unwrap_or_else(Rational::zero)
    }

    /// Restricts the known `x`-range, dropping terms outside it.
    pub fn with_window(mut self, w: Window) -> Self {
        self.x_window = self.x_window.intersect(&w);
        let win = self.x_window;
        self.terms.retain(|&(x2, _), _| win.contains(x2));
        self
    }

    /// Declares coefficients at `q2 >= v` unknown, dropping them.
    pub fn with_q_valid(mut self, v: i32) -> Self {
        let v = self.q_valid2.map_or(v, |old| old.min(v));
        self.q_valid2 = Some(v);
        self.terms.retain(|&(_, q2), _| q2 < v);
        self
    }

    /// Replaces validity metadata without touching terms beyond dropping the ones
    /// the new metadata excludes.
    pub fn with_validity(self, w: Window, q_valid2: Option<i32>) -> Self {
        let mut s = self.with_window(w);
        if let Some(v) = q_valid2 {
            s = s.with_q_valid(v);
        }
        s
    }

    /// Drops all validity metadata (asserting the terms are exact).
    pub fn into_exact(mut self) -> Self {
        self.x_window = Window::FULL;
        self.q_valid2 = None;
        self
    }

    pub fn min_x2(&self) -> Option<i32> {
        self.terms.keys().next().map(|k| k.0)
    }

    pub fn max_x2(&self) -> Option<i32> {
        self.terms.keys().next_back().map(|k| k.0)
    }

    pub fn min_q2(&self) -> Option<i32> {
        self.terms.keys().map(|k| k.1).min()
    }

    pub fn max_q2(&self) -> Option<i32> {
        self.terms.keys().map(|k| k.1).max()
    }

    /// Distinct `x2` exponents present, ascending.
    pub fn x_exponents(&self) -> Vec<i32> {
        let mut v: Vec<i32> = self.terms.keys().map(|k| k.0).collect();
        v.dedup();
        v
    }

    /// The `q`-series multiplying `x^{x2/2}`, with the parent's `q`-validity.
    pub fn x_coeff(&self, x2: i32) -> BiSeries {
        let mut out = BiSeries::zero();
        for (&(x, q), c) in self.terms.range((x2, i32::MIN)..=(x2, i32::MAX)) {
            debug_assert_eq!(x, x2);
            out.terms.insert((0, q), c.clone());
        }
        out.q_valid2 = self.q_valid2;
        out
    }

    fn extent(&self) -> Extent {
        let inf = if self.x_window.lo.is_some() {
            Bound::NegInf
        } else {
            self.min_x2().map_or(Bound::PosInf, |v| Bound::Finite(v as i64))
        };
        let sup = if self.x_window.hi.is_some() {
            Bound::PosInf
        } else {
            self.max_x2().map_or(Bound::NegInf, |v| Bound::Finite(v as i64))
        };
        Extent { inf, sup }
    }

    pub fn scalar_mul(&self, c: &Rational) -> BiSeries {
        if c.is_zero() {
            let mut z = BiSeries::zero();
            z.x_window = self.x_window;
            return z;
        }
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v *= c;
        }
        out
    }

    /// Multiplies by the monomial `q^{q2/2} x^{x2/2}`, shifting metadata with it.
    pub fn shift(&self, q2: i32, x2: i32) -> BiSeries {
        BiSeries {
            terms: self.terms.iter().map(|(&(x, q), c)| ((x + x2, q + q2), c.clone())).collect(),
            x_window: Window {
                lo: self.x_window.lo.map(|l| l + x2),
                hi: self.x_window.hi.map(|h| h + x2),
            },
            q_valid2: self.q_valid2.map(|v| v + q2),
        }
    }

    /// `x -> q^k x`: each term `q^a x^e` becomes `q^{a + k e} x^e`.
    /// Unknown high-`q` coefficients move by `k e`; on an unbounded side of the window
    /// the support is taken as the extent of the known terms.
    pub fn q_dilate(&self, k: i32) -> BiSeries {
        let mut out = BiSeries { terms: BTreeMap::new(), x_window: self.x_window, q_valid2: None };
        for (&(x, q), c) in &self.terms {
            out.terms.insert((x, q + k * x), c.clone());
        }
        out.q_valid2 = self.q_valid2.map(|v| {
            let lo = self.x_window.lo.or(self.min_x2()).unwrap_or(0);
            let hi = self.x_window.hi.or(self.max_x2()).unwrap_or(0);
            v + (k * lo).min(k * hi)
        });
        if let Some(v) = out.q_valid2 {
            out.terms.retain(|k, _| k.1 < v);
        }
        out
    }

    pub fn pow(&self, n: u32) -> BiSeries {
        let mut acc = BiSeries::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Exact substitution; the result's validity is shrunk to what the input supports.
    /// `x -> q^n` needs the input to be exact in the directions where `n·x` lowers
    /// the `q`-degree; otherwise use [`BiSeries::substitute_with_floor`].
    pub fn substitute(&self, target: Substitution) -> Result<BiSeries> {
        self.substitute_with_floor(target, None)
    }

    pub fn substitute_with_floor(&self, target: Substitution, floor: Option<&TailFloor>) -> Result<BiSeries> {
        match target {
            Substitution::XInv => Ok(BiSeries {
                terms: self.terms.iter().map(|(&(x, q), c)| ((-x, q), c.clone())).collect(),
                x_window: Window { lo: self.x_window.hi.map(|h| -h), hi: self.x_window.lo.map(|l| -l) },
                q_valid2: self.q_valid2,
            }),
            Substitution::QInv => {
                if self.q_valid2.is_some() {
                    return Err(Error::ValidityUnbounded(
                        "q -> 1/q on a q-truncated series has no certified range".into(),
                    ));
                }
                Ok(BiSeries {
                    terms: self.terms.iter().map(|(&(x, q), c)| ((x, -q), c.clone())).collect(),
                    x_window: self.x_window,
                    q_valid2: None,
                })
            }
            Substitution::XToOne => self.substitute_with_floor(Substitution::XToQPow(0), floor),
            Substitution::XToQPow(n) => {
                // Unknown coefficients live outside the window (any q) and at q >= q_valid2.
                let mut qv: Option<Rational> = None;
                let mut lower = |v: Rational| {
                    qv = Some(match qv.take() {
                        Some(old) if old < v => old,
                        _ => v,
                    })
                };
                let nn = Rational::from_integer(n.into());
                if let Some(v) = self.q_valid2 {
                    // Over the known x-range the worst shift is at an extreme exponent.
                    let xs = [self.x_window.lo.or(self.min_x2()), self.x_window.hi.or(self.max_x2())];
                    for x in xs.into_iter().flatten() {
                        lower(Rational::from_integer((v + n * x).into()));
                    }
                    if (self.x_window.lo.is_some() && n > 0) || (self.x_window.hi.is_some() && n < 0) {
                        // Unbounded x direction lowers q without limit.
                        if floor.is_none() {
                            return Err(Error::ValidityUnbounded(
                                "q-truncated series with an open x direction".into(),
                            ));
                        }
                    }
                }
                for (side, edge) in [(-1i32, self.x_window.lo), (1, self.x_window.hi)] {
                    let Some(edge) = edge else { continue };
                    let f = floor.ok_or_else(|| {
                        Error::ValidityUnbounded(format!(
                            "x -> q^{n}: coefficients beyond x2={edge} are unknown and no floor was supplied"
                        ))
                    })?;
                    // Smallest q2 + n*x2 over x2 beyond the edge: floor is linear in the
                    // distance, so the minimum is at the first unknown exponent unless the
                    // combined slope is negative (then unbounded).
                    let first = edge + side;
                    let rate = &f.slope + &nn * Rational::from_integer(side.into());
                    if rate.is_negative() {
                        return Err(Error::ValidityUnbounded(format!(
                            "x -> q^{n}: tail floor slope {} does not outgrow the substitution",
                            f.slope
                        )));
                    }
                    lower(f.at(first) + &nn * Rational::from_integer(first.into()));
                }
                let q_valid2 = qv.map(|v| v.ceil().to_integer().to_i32().unwrap_or(i32::MAX));
                let mut out = BiSeries::zero();
                out.q_valid2 = q_valid2;
                for (&(x, q), c) in &self.terms {
                    out.add_term(q + n * x, 0, c.clone());
                }
                Ok(out)
            }
        }
    }

    /// Evaluates at `q = 1` (only for series exact in `q`).
    pub fn at_q_one(&self) -> Result<BiSeries> {
        if self.q_valid2.is_some() {
            return Err(Error::ValidityUnbounded("q -> 1 on a q-truncated series".into()));
        }
        let mut out = BiSeries::zero();
        out.x_window = self.x_window;
        for (&(x, _), c) in &self.terms {
            out.add_term(0, x, c.clone());
        }
        Ok(out)
    }

    /// Sum of all coefficients (value at `q = x = 1`), for exact finite series.
    pub fn sum_coeffs(&self) -> Rational {
        self.terms.values().fold(Rational::zero(), |a, b| a + b)
    }

    /// Equality of the terms on the region where both series are valid.
    pub fn agrees_with(&self, other: &BiSeries) -> bool {
        self.diff_on_overlap(other).is_zero()
    }

    /// `self - other` restricted to the joint validity region.
    pub fn diff_on_overlap(&self, other: &BiSeries) -> BiSeries {
        let w = self.x_window.intersect(&other.x_window);
        let qv = match (self.q_valid2, other.q_valid2) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        (self - other).into_exact().with_validity(w, qv)
    }

    /// Laurent-polynomial division by a monic-up-to-sign `q`-polynomial divisor,
    /// exact when the remainder vanishes; returns `None` otherwise.
    pub fn div_exact_q(&self, d: &BiSeries) -> Option<BiSeries> {
        if d.is_zero() || d.terms.keys().any(|k| k.0 != 0) {
            return None;
        }
        let (&(_, dq_lo), dlead) = d.terms.iter().next()?;
        let dq_hi = d.max_q2()?;
        let mut rem = self.clone().into_exact();
        let mut quo = BiSeries::zero();
        while let Some((&(x, q), c)) = rem.terms.iter().next() {
            // The quotient cannot exceed the dividend's top degree minus the divisor's.
            let top = rem.terms.range((x, i32::MIN)..=(x, i32::MAX)).map(|(k, _)| k.1).max()?;
            if q - dq_lo > top - dq_hi {
                return None;
            }
            let t = BiSeries::monomial(q - dq_lo, x, c / dlead);
            rem = &rem - &(&t * d);
            quo = &quo + &t;
        }
        Some(quo)
    }

    /// Canonical text: terms by ascending `x` then `q`, e.g. `-2*q^3*x^(-7/2)`.
    pub fn to_text(&self) -> String {
        join_terms(self.terms.iter().map(|(&(x2, q2), c)| {
            fmt_term(c, &[fmt_power("q", q2 as i64, 2), fmt_power("x", x2 as i64, 2)])
        }))
    }

    /// Parses the canonical text form (terms only; metadata is left unbounded).
    pub fn parse_text(s: &str) -> Result<BiSeries> {
        let mut out = BiSeries::zero();
        for (c, exps) in parse_terms(s, &["q", "x"])? {
            let q2 = exps[0].clone() * Rational::from_integer(2.into());
            let x2 = exps[1].clone() * Rational::from_integer(2.into());
            if !q2.is_integer() || !x2.is_integer() {
                return Err(Error::Parse("exponent outside (1/2)Z".into()));
            }
            out.add_term(rat_to_i32(&q2)?, rat_to_i32(&x2)?, c);
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(&(x2, q2), c)| {
                json!({"q2": q2, "x2": x2, "num": c.numer().to_string(), "den": c.denom().to_string()})
            })
            .collect();
        json!({"terms": terms, "x_window2": self.x_window.to_json(), "q_valid2": self.q_valid2})
    }

    pub fn from_json(v: &Value) -> Result<BiSeries> {
        let bad = |m: &str| Error::Parse(format!("series json: {m}"));
        let terms = v.get("terms").and_then(Value::as_array).ok_or_else(|| bad("missing terms"))?;
        let mut s = BiSeries::zero();
        for t in terms {
            let int = |k: &str| -> Result<i32> {
                t.get(k)
                    .and_then(Value::as_i64)
                    .and_then(|n| i32::try_from(n).ok())
                    .ok_or_else(|| bad(k))
            };
            let big = |k: &str| -> Result<BigInt> {
                t.get(k).and_then(Value::as_str).and_then(|s| s.parse().ok()).ok_or_else(|| bad(k))
            };
            let den = big("den")?;
            if den.is_zero() {
                return Err(bad("zero denominator"));
            }
            s.add_term(int("q2")?, int("x2")?, Rational::new(big("num")?, den));
        }
        let w = Window::from_json(v.get("x_window2").unwrap_or(&Value::Null))?;
        let qv = match v.get("q_valid2") {
            None | Some(Value::Null) => None,
            Some(x) => Some(x.as_i64().and_then(|n| i32::try_from(n).ok()).ok_or_else(|| bad("q_valid2"))?),
        };
        Ok(s.with_validity(w, qv))
    }
}

fn rat_to_i32(r: &Rational) -> Result<i32> {
    r.to_integer().to_i32().ok_or_else(|| Error::Parse("exponent out of range".into()))
}

/// Parses `c*v1^(a/b)*v2^e ± ...` into `(coefficient, exponents per variable)`.
pub(crate) fn parse_terms(s: &str, vars: &[&str]) -> Result<Vec<(Rational, Vec<Rational>)>> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() || s == "0" {
        return Ok(Vec::new());
    }
    // Split on top-level +/- (not inside parentheses).
    let mut pieces: Vec<String> = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '+' | '-' if depth == 0 && !cur.is_empty() => {
                pieces.push(std::mem::take(&mut cur));
            }
            _ => {}
        }
        cur.push(ch);
    }
    pieces.push(cur);
    let mut out = Vec::new();
    for p in pieces {
        let (neg, body) = match p.strip_prefix('-') {
            Some(b) => (true, b),
            None => (false, p.strip_prefix('+').unwrap_or(&p)),
        };
        if body.is_empty() {
            return Err(Error::Parse(format!("empty term in {s:?}")));
        }
        let mut coeff = Rational::one();
        let mut exps = vec![Rational::zero(); vars.len()];
        for factor in body.split('*') {
            if let Some(vi) = vars.iter().position(|v| factor == *v || factor.starts_with(&format!("{v}^"))) {
                let e = match factor.strip_prefix(vars[vi]).unwrap().strip_prefix('^') {
                    None => Rational::one(),
                    Some(e) => parse_rational(e.trim_start_matches('(').trim_end_matches(')'))?,
                };
                exps[vi] += e;
            } else {
                coeff *= parse_rational(factor)?;
            }
        }
        if neg {
            coeff = -coeff;
        }
        out.push((coeff, exps));
    }
    Ok(out)
}

pub(crate) fn parse_rational(s: &str) -> Result<Rational> {
    let err = || Error::Parse(format!("bad number {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.parse().map_err(|_| err())?;
            let d: BigInt = d.parse().map_err(|_| err())?;
            if d.is_zero() {
                return Err(err());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| err())?)),
    }
}

impl fmt::Display for BiSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl Add for &BiSeries {
    type Output = BiSeries;
    fn add(self, rhs: &BiSeries) -> BiSeries {
        let mut out = BiSeries {
            terms: BTreeMap::new(),
            x_window: self.x_window.intersect(&rhs.x_window),
            q_valid2: match (self.q_valid2, rhs.q_valid2) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            },
        };
        for (&(x, q), c) in self.terms.iter().chain(rhs.terms.iter()) {
            out.add_term(q, x, c.clone());
        }
        out
    }
}

impl Neg for &BiSeries {
    type Output = BiSeries;
    fn neg(self) -> BiSeries {
        BiSeries {
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
            x_window: self.x_window,
            q_valid2: self.q_valid2,
        }
    }
}

impl Sub for &BiSeries {
    type Output = BiSeries;
    fn sub(self, rhs: &BiSeries) -> BiSeries {
        self + &(-rhs)
    }
}

impl Mul for &BiSeries {
    type Output = BiSeries;
    fn mul(self, rhs: &BiSeries) -> BiSeries {
        let x_window = Window::product(&self.x_window, self.extent(), &rhs.x_window, rhs.extent());
        let q_valid2 = [
            self.q_valid2.zip(rhs.min_q2()).map(|(v, m)| v + m),
            rhs.q_valid2.zip(self.min_q2()).map(|(v, m)| v + m),
        ]
        .into_iter()
        .flatten()
        .min()
        .or(match (self.q_valid2, rhs.q_valid2) {
            // A zero factor still carries its truncation.
            (Some(a), _) if rhs.is_zero() => Some(a),
            (_, Some(b)) if self.is_zero() => Some(b),
            _ => None,
        });
        let mut acc: BTreeMap<(i32, i32), Rational> = BTreeMap::new();
        for (&(xa, qa), ca) in &self.terms {
            for (&(xb, qb), cb) in &rhs.terms {
                let (x, q) = (xa + xb, qa + qb);
                if !x_window.contains(x) || q_valid2.is_some_and(|v| q >= v) {
                    continue;
                }
                *acc.entry((x, q)).or_insert_with(Rational::zero) += ca * cb;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        BiSeries { terms: acc, x_window, q_valid2 }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for BiSeries {
            type Output = BiSeries;
            fn $m(self, rhs: BiSeries) -> BiSeries {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for BiSeries {
    type Output = BiSeries;
    fn neg(self) -> BiSeries {
        -&self
    }
}

pub(crate) fn rat(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

pub(crate) fn rat_frac(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Balanced quantum integer `[n] = (q^{n/2} - q^{-n/2}) / (q^{1/2} - q^{-1/2})`.
pub fn qint(n: i32) -> BiSeries {
    let sign = n.signum() as i64;
    let m = n.abs();
    BiSeries::from_terms((0..m).map(|t| (-(m - 1) + 2 * t, 0, rat(sign))))
}

type GaussRows = Vec<Vec<Arc<[i128]>>>;

fn gauss_cache() -> &'static RwLock<GaussRows> {
    static CACHE: OnceLock<RwLock<GaussRows>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(vec![vec![Arc::from(vec![1i128])]]))
}

/// Coefficients of the ordinary Gaussian binomial `(n choose k)_q`, a polynomial in
/// `q` with nonnegative exponents; index `t` holds the coefficient of `q^t`.
/// Rows are built by the `q`-Pascal rule and cached by `n`.
pub fn gaussian_coeffs(n: usize, k: usize) -> Arc<[i128]> {
    if k > n {
        return Arc::from(Vec::new());
    }
    {
        let rows = gauss_cache().read();
        if let Some(row) = rows.get(n) {
            return row[k].clone();
        }
    }
    let mut rows = gauss_cache().write();
    while rows.len() <= n {
        let m = rows.len();
        let prev = &rows[m - 1];
        let mut row: Vec<Arc<[i128]>> = Vec::with_capacity(m + 1);
        for j in 0..=m {
            // (m choose j) = (m-1 choose j-1) + q^j (m-1 choose j)
            let a: &[i128] = if j >= 1 { &prev[j - 1] } else { &[] };
            let b: &[i128] = if j < m { &prev[j] } else { &[] };
            let len = (j * (m - j)) + 1;
            let mut v = vec![0i128; len];
            for (t, &c) in a.iter().enumerate() {
                v[t] += c;
            }
            for (t, &c) in b.iter().enumerate() {
                v[t + j] += c;
            }
            row.push(Arc::from(v));
        }
        rows.push(row);
    }
    rows[n][k].clone()
}

/// Balanced `q`-binomial `[n]! / ([k]! [n-k]!)`; zero outside `0 <= k <= n`.
pub fn qbinom(n: i32, k: i32) -> BiSeries {
    if n < 0 || k < 0 || k > n {
        return BiSeries::zero();
    }
    let shift = -(k * (n - k));
    let g = gaussian_coeffs(n as usize, k as usize);
    BiSeries::from_terms(g.iter().enumerate().map(|(t, &c)| (shift + 2 * t as i32, 0, Rational::from_integer(c.into()))))
}

/// `prod_{1 <= l <= k} (1 - x^{-1} q^{j+l})`.
pub fn poch_x(j: i32, k: i32) -> BiSeries {
    let mut acc = BiSeries::one();
    for l in 1..=k {
        let f = BiSeries::from_terms([(0, 0, rat(1)), (2 * (j + l), -2, rat(-1))]);
        acc = &acc * &f;
    }
    acc
}

/// Series in several `x` variables and `q`, exponents in quarter units.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiSeries {
    names: Vec<String>,
    /// `(x4 exponents, q4) -> c`.
    terms: BTreeMap<(Vec<i32>, i32), Rational>,
    /// Known range per variable, in quarter units.
    windows: Vec<Window>,
    q_valid4: Option<i32>,
}

impl MultiSeries {
    pub fn zero(names: &[&str]) -> Self {
        MultiSeries {
            names: names.iter().map(|s| s.to_string()).collect(),
            terms: BTreeMap::new(),
            windows: vec![Window::FULL; names.len()],
            q_valid4: None,
        }
    }

    pub fn one(names: &[&str]) -> Self {
        let mut s = Self::zero(names);
        s.add_term(0, &vec![0; names.len()], rat(1));
        s
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn windows(&self) -> &[Window] {
        &self.windows
    }

    pub fn q_valid4(&self) -> Option<i32> {
        self.q_valid4
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &[i32], &Rational)> {
        self.terms.iter().map(|((x, q), c)| (*q, x.as_slice(), c))
    }

    pub fn coeff(&self, q4: i32, x4: &[i32]) -> Rational {
        self.terms.get(&(x4.to_vec(), q4)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, q4: i32, x4: &[i32], c: Rational) {
        if c.is_zero()
            || self.q_valid4.is_some_and(|v| q4 >= v)
            || x4.iter().zip(&self.windows).any(|(&e, w)| !w.contains(e))
        {
            return;
        }
        let key = (x4.to_vec(), q4);
        let e = self.terms.entry(key.clone()).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn with_windows(mut self, windows: &[Window]) -> Self {
        for (w, n) in self.windows.iter_mut().zip(windows) {
            *w = w.intersect(n);
        }
        let ws = self.windows.clone();
        self.terms.retain(|(x, _), _| x.iter().zip(&ws).all(|(&e, w)| w.contains(e)));
        self
    }

    pub fn with_q_valid(mut self, v: i32) -> Self {
        let v = self.q_valid4.map_or(v, |o| o.min(v));
        self.q_valid4 = Some(v);
        self.terms.retain(|(_, q), _| *q < v);
        self
    }

    /// Multiplies by `q^{q4/4} prod x_i^{x4_i/4}`.
    pub fn shift(&self, q4: i32, x4: &[i32]) -> MultiSeries {
        let mut out = self.clone();
        out.terms = self
            .terms
            .iter()
            .map(|((x, q), c)| ((x.iter().zip(x4).map(|(a, b)| a + b).collect(), q + q4), c.clone()))
            .collect();
        for (w, &d) in out.windows.iter_mut().zip(x4) {
            w.lo = w.lo.map(|l| l + d);
            w.hi = w.hi.map(|h| h + d);
        }
        out.q_valid4 = self.q_valid4.map(|v| v + q4);
        out
    }

    /// Product restricted to the joint validity region of both inputs (windows are
    /// intersected and the `q`-validity lowered by the other factor's minimum degree).
    pub fn mul(&self, rhs: &MultiSeries) -> MultiSeries {
        assert_eq!(self.nvars(), rhs.nvars());
        let mut out = MultiSeries::zero(&self.names.iter().map(|s| s.as_str()).collect::<Vec<_>>());
        let min_q = |s: &MultiSeries| s.terms.keys().map(|k| k.1).min();
        out.q_valid4 = [
            self.q_valid4.zip(min_q(rhs)).map(|(v, m)| v + m),
            rhs.q_valid4.zip(min_q(self)).map(|(v, m)| v + m),
        ]
        .into_iter()
        .flatten()
        .min();
        for v in 0..self.nvars() {
            let ext = |s: &MultiSeries| -> Extent {
                let xs = s.terms.keys().map(|k| k.0[v] as i64);
                let (mn, mx) = (xs.clone().min(), xs.max());
                Extent {
                    inf: if s.windows[v].lo.is_some() { Bound::NegInf } else { mn.map_or(Bound::PosInf, Bound::Finite) },
                    sup: if s.windows[v].hi.is_some() { Bound::PosInf } else { mx.map_or(Bound::NegInf, Bound::Finite) },
                }
            };
            out.windows[v] = Window::product(&self.windows[v], ext(self), &rhs.windows[v], ext(rhs));
        }
        for ((xa, qa), ca) in &self.terms {
            for ((xb, qb), cb) in &rhs.terms {
                let x: Vec<i32> = xa.iter().zip(xb).map(|(a, b)| a + b).collect();
                out.add_term(qa + qb, &x, ca * cb);
            }
        }
        out
    }

    pub fn add(&self, rhs: &MultiSeries) -> MultiSeries {
        let mut out = self.clone();
        for (w, r) in out.windows.iter_mut().zip(&rhs.windows) {
            *w = w.intersect(r);
        }
        out.q_valid4 = match (self.q_valid4, rhs.q_valid4) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        let ws = out.windows.clone();
        let qv = out.q_valid4;
        out.terms.retain(|(x, q), _| qv.is_none_or(|v| *q < v) && x.iter().zip(&ws).all(|(&e, w)| w.contains(e)));
        for ((x, q), c) in &rhs.terms {
            out.add_term(*q, x, c.clone());
        }
        out
    }

    pub fn scalar_mul(&self, c: &Rational) -> MultiSeries {
        let mut out = self.clone();
        out.terms = self.terms.iter().map(|(k, v)| (k.clone(), v * c)).filter(|(_, v)| !v.is_zero()).collect();
        out
    }

    /// Sets every variable equal to `x` (quarter units become halves when even).
    pub fn diagonal(&self) -> Result<BiSeries> {
        let mut out = BiSeries::zero();
        for ((x, q), c) in &self.terms {
            let tot: i32 = x.iter().sum();
            if tot % 2 != 0 || q % 2 != 0 {
                return Err(Error::InvalidArgument("diagonal exponent outside (1/2)Z".into()));
            }
            out.add_term(q / 2, tot / 2, c.clone());
        }
        Ok(out)
    }

    /// Converts a one-variable series with half-integer exponents to a [`BiSeries`].
    pub fn to_biseries(&self) -> Result<BiSeries> {
        if self.nvars() != 1 {
            return Err(Error::InvalidArgument("not a one-variable series".into()));
        }
        let mut out = BiSeries::zero();
        for ((x, q), c) in &self.terms {
            if x[0] % 2 != 0 || q % 2 != 0 {
                return Err(Error::InvalidArgument("exponent outside (1/2)Z".into()));
            }
            out.add_term(q / 2, x[0] / 2, c.clone());
        }
        let w = self.windows[0];
        let half = |v: Option<i32>, up: bool| v.map(|e| if up { (e + 1).div_euclid(2) } else { e.div_euclid(2) });
        Ok(out.with_validity(Window { lo: half(w.lo, true), hi: half(w.hi, false) }, self.q_valid4.map(|v| (v + 1).div_euclid(2))))
    }

    pub fn from_biseries(s: &BiSeries, name: &str) -> MultiSeries {
        let mut out = MultiSeries::zero(&[name]);
        for (q2, x2, c) in s.terms() {
            out.add_term(2 * q2, &[2 * x2], c.clone());
        }
        let w = s.x_window();
        out.windows[0] = Window { lo: w.lo.map(|v| 2 * v), hi: w.hi.map(|v| 2 * v) };
        out.q_valid4 = s.q_valid2().map(|v| 2 * v);
        out
    }

    /// Canonical text: terms ordered by the exponent vector then `q`.
    pub fn to_text(&self) -> String {
        join_terms(self.terms.iter().map(|((x, q), c)| {
            let mut f = vec![fmt_power("q", *q as i64, 4)];
            for (name, &e) in self.names.iter().zip(x) {
                f.push(fmt_power(name, e as i64, 4));
            }
            fmt_term(c, &f)
        }))
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|((x, q), c)| json!({"q4": q, "x4": x, "num": c.numer().to_string(), "den": c.denom().to_string()}))
            .collect();
        json!({
            "vars": self.names,
            "terms": terms,
            "windows4": self.windows.iter().map(|w| w.to_json()).collect::<Vec<_>>(),
            "q_valid4": self.q_valid4,
        })
    }

    pub fn from_json(v: &Value) -> Result<MultiSeries> {
        let bad = |m: &str| Error::Parse(format!("multiseries json: {m}"));
        let names: Vec<String> = v
            .get("vars")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("vars"))?
            .iter()
            .map(|n| n.as_str().map(str::to_string).ok_or_else(|| bad("vars")))
            .collect::<Result<_>>()?;
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let mut s = MultiSeries::zero(&refs);
        for t in v.get("terms").and_then(Value::as_array).ok_or_else(|| bad("terms"))? {
            let q4 = t.get("q4").and_then(Value::as_i64).ok_or_else(|| bad("q4"))? as i32;
            let x4: Vec<i32> = t
                .get("x4")
                .and_then(Value::as_array)
                .ok_or_else(|| bad("x4"))?
                .iter()
                .map(|e| e.as_i64().map(|n| n as i32).ok_or_else(|| bad("x4")))
                .collect::<Result<_>>()?;
            if x4.len() != names.len() {
                return Err(bad("x4 arity"));
            }
            let num: BigInt = t.get("num").and_then(Value::as_str).and_then(|s| s.parse().ok()).ok_or_else(|| bad("num"))?;
            let den: BigInt = t.get("den").and_then(Value::as_str).and_then(|s| s.parse().ok()).ok_or_else(|| bad("den"))?;
            if den.is_zero() {
                return Err(bad("den"));
            }
            s.add_term(q4, &x4, Rational::new(num, den));
        }
        if let Some(ws) = v.get("windows4").and_then(Value::as_array) {
            let ws: Vec<Window> = ws.iter().map(Window::from_json).collect::<Result<_>>()?;
            s = s.with_windows(&ws);
        }
        if let Some(q) = v.get("q_valid4").and_then(Value::as_i64) {
            s = s.with_q_valid(q as i32);
        }
        Ok(s)
    }
}

impl fmt::Display for MultiSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(t: &str) -> BiSeries {
        BiSeries::parse_text(t).unwrap()
    }

    #[test]
    fn half_integer_exponents_add() {
        let a = BiSeries::int_monomial(1, -1, 1);
        assert_eq!((&a * &a).to_text(), "q*x^(-1)");
        assert_eq!(&a + &BiSeries::zero(), a);
    }

    #[test]
    fn telescoping_respects_truncation() {
        let geom = BiSeries::from_q_coeffs(0, &[1; 10]).with_q_valid(20);
        let one_minus_q = s("1 - q");
        let prod = &one_minus_q * &geom;
        assert_eq!(prod.to_text(), "1");
        assert_eq!(prod.q_valid2(), Some(20));
    }

    #[test]
    fn qint_values() {
        assert_eq!(qint(2).to_text(), "q^(-1/2) + q^(1/2)");
        assert!(qint(0).is_zero());
        assert_eq!(qint(3).to_text(), "q^(-1) + 1 + q");
        assert_eq!(qint(-3), -qint(3));
    }

    #[test]
    fn qbinom_values() {
        assert!(qbinom(5, 7).is_zero());
        assert_eq!(qbinom(1, 0), BiSeries::one());
        assert_eq!(qbinom(4, 2).to_text(), "q^(-2) + q^(-1) + 2 + q + q^2");
    }

    #[test]
    fn poch_values() {
        assert_eq!(poch_x(0, 0), BiSeries::one());
        assert_eq!(poch_x(0, 1).to_text(), "-q*x^(-1) + 1");
        let expect = &s("1 - q^3*x^(-1)") * &s("1 - q^4*x^(-1)");
        assert_eq!(poch_x(2, 2), expect);
    }

    #[test]
    fn substitutions() {
        let a = s("q*x^(-1/2)");
        assert_eq!(a.substitute(Substitution::XToOne).unwrap().to_text(), "q");
        assert_eq!(a.substitute(Substitution::XToQPow(2)).unwrap().to_text(), "1");
        assert_eq!(a.substitute(Substitution::XInv).unwrap().to_text(), "q*x^(1/2)");
    }

    #[test]
    fn substitution_into_open_window_needs_floor() {
        let f = s("q^4*x^(-7/2) - 2*q^6*x^(-13/2)").with_window(Window::at_least(-13));
        assert!(matches!(f.substitute(Substitution::XToQPow(1)), Err(Error::ValidityUnbounded(_))));
        let floor = TailFloor { edge_x2: -13, edge_q2: 12, slope: rat(1) };
        let g = f.substitute_with_floor(Substitution::XToQPow(1), Some(&floor)).unwrap();
        // First unknown exponent x2=-14 has q2 >= 13, shifted by -14.
        assert_eq!(g.q_valid2(), Some(-1));
    }

    #[test]
    fn text_format_is_canonical() {
        let t = "q^4*x^(-7/2) - 2*q^6*x^(-13/2) + 1/2*q^(-1)";
        let a = s(t);
        assert_eq!(a.to_text(), "-2*q^6*x^(-13/2) + q^4*x^(-7/2) + 1/2*q^(-1)");
        assert_eq!(s(&a.to_text()), a);
    }

    #[test]
    fn json_round_trip() {
        let a = s("q^4*x^(-7/2) - 2*q^6*x^(-13/2)").with_window(Window::at_least(-13)).with_q_valid(30);
        let b = BiSeries::from_json(&a.to_json()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn window_product_shrinks() {
        let f = s("x^(-1/2) + x^(-3/2) + x^(-5/2)").with_window(Window::at_least(-5));
        let g = s("x^(1/2) - x^(-1/2)");
        let h = &f * &g;
        assert_eq!(h.x_window(), Window::at_least(-4));
        assert_eq!(h.to_text(), "1");
    }

    #[test]
    fn exact_division() {
        let a = &qint(3) * &qint(5);
        assert_eq!(a.div_exact_q(&qint(3)).unwrap(), qint(5));
        assert!(qint(5).div_exact_q(&qint(2)).is_none());
    }

    #[test]
    fn multiseries_text() {
        let mut m = MultiSeries::zero(&["x", "y"]);
        m.add_term(1, &[2, 2], rat(1));
        m.add_term(6, &[6, 6], rat(-1));
        assert_eq!(m.to_text(), "q^(1/4)*x^(1/2)*y^(1/2) - q^(3/2)*x^(3/2)*y^(3/2)");
        assert_eq!(MultiSeries::from_json(&m.to_json()).unwrap(), m);
    }
}
