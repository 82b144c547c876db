//! Laplace-transform surgery formulas.
//!
//! `Ẑ` of `p/r` surgery on a knot, integer surgery on a link, partial `-1/r` surgery on
//! one component of a link, and recovery of a two-component link series from the
//! family of its partial surgeries.
//!
//! Certified orders need a bound on the coefficients outside the known `x`-window.
//! Knot transforms use [`TailFloor::observe`]; link transforms use the lowest
//! `q`-degree seen anywhere in the input. Both are extrapolations, not theorems.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::algebra::{fmt_power, fmt_term, join_terms, rat, rat_frac, BiSeries, MultiSeries, Rational, TailFloor, Window};
use crate::error::{Error, Result};
use crate::knots::PrintedZhat;
use crate::statesum::{Exactness, Expansion, FkResult};

/// One Spin^c summand `sign · q^offset · (Σ terms + O(q^{q_valid}))`.
#[derive(Clone, Debug, PartialEq)]
pub struct QSeriesBundle {
    /// Coset representative `b`, one entry per surgered component.
    pub spinc_label: Vec<Rational>,
    /// Sign of the lowest term; 0 when nothing is certified below `q_valid`.
    pub sign: i32,
    /// Exponent of the lowest term.
    pub offset: Rational,
    /// Normalized terms: the lowest one is `+1` at exponent 0.
    pub terms: BTreeMap<Rational, Rational>,
    /// Normalized exponents below this are certified; `None` when exact.
    pub q_valid: Option<Rational>,
}

impl QSeriesBundle {
    fn from_raw(label: Vec<Rational>, raw: BTreeMap<Rational, Rational>, q_valid: Option<Rational>) -> Self {
        let raw: BTreeMap<Rational, Rational> =
            raw.into_iter().filter(|(e, c)| !c.is_zero() && q_valid.as_ref().is_none_or(|v| e < v)).collect();
        let Some((lo, lead)) = raw.iter().next().map(|(e, c)| (e.clone(), c.clone())) else {
            return QSeriesBundle { spinc_label: label, sign: 0, offset: Rational::zero(), terms: raw, q_valid };
        };
        let terms = raw.into_iter().map(|(e, c)| (e - &lo, c / &lead)).collect();
        QSeriesBundle {
            spinc_label: label,
            sign: if lead.is_positive() { 1 } else { -1 },
            q_valid: q_valid.map(|v| v - &lo),
            offset: lo,
            terms,
        }
    }

    /// Scale of the lowest term; `±1` for integral series.
    pub fn is_unit_normalized(&self) -> bool {
        self.sign != 0
    }

    /// The transform before normalization.
    pub fn raw_terms(&self) -> BTreeMap<Rational, Rational> {
        let s = rat(self.sign as i64);
        self.terms.iter().map(|(e, c)| (e + &self.offset, c * &s)).collect()
    }

    /// True when the normalized terms agree with `other` below both validity orders
    /// and at least one certified term is compared.
    pub fn agrees_with(&self, other: &BTreeMap<Rational, Rational>, other_valid: Option<&Rational>) -> bool {
        let cut = match (self.q_valid.as_ref(), other_valid) {
            (Some(a), Some(b)) => Some(a.min(b).clone()),
            (a, b) => a.or(b).cloned(),
        };
        let below = |e: &Rational| cut.as_ref().is_none_or(|v| e < v);
        let mine: BTreeMap<_, _> = self.terms.iter().filter(|(e, _)| below(e)).collect();
        let theirs: BTreeMap<_, _> = other.iter().filter(|(e, _)| below(e)).collect();
        !mine.is_empty() && mine == theirs
    }

    pub fn to_text(&self) -> String {
        if self.sign == 0 {
            return match &self.q_valid {
                Some(v) => format!("O(q^{})", fmt_rational(v)),
                None => "0".into(),
            };
        }
        let mut body = join_terms(self.terms.iter().map(|(e, c)| fmt_term(c, &[fmt_q(e)])));
        if let Some(v) = &self.q_valid {
            body.push_str(&format!(" + O(q^{})", fmt_rational(v)));
        }
        let unit = fmt_q(&self.offset);
        let sign = if self.sign < 0 { "-" } else { "" };
        if unit.is_empty() {
            format!("{sign}({body})")
        } else {
            format!("{sign}{unit}*({body})")
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "spinc_label": self.spinc_label.iter().map(|b| b.to_string()).collect::<Vec<_>>(),
            "sign": self.sign,
            "offset": self.offset.to_string(),
            "terms": self.terms.iter().map(|(e, c)| json!({"q": e.to_string(), "c": c.to_string()})).collect::<Vec<_>>(),
            "q_valid": self.q_valid.as_ref().map(|v| v.to_string()),
            "text": self.to_text(),
        })
    }
}

fn fmt_rational(r: &Rational) -> String {
    let (n, d) = (r.numer().to_i64().unwrap_or(0), r.denom().to_i64().unwrap_or(1));
    if d == 1 {
        n.to_string()
    } else {
        format!("({n}/{d})")
    }
}

fn fmt_q(e: &Rational) -> String {
    fmt_power("q", e.numer().to_i64().unwrap_or(0), e.denom().to_i64().unwrap_or(1))
}

/// Normalized terms of a printed `q`-series (a [`BiSeries`] with no `x`).
pub fn q_terms(s: &BiSeries) -> BTreeMap<Rational, Rational> {
    s.terms().filter(|t| t.1 == 0).map(|(q2, _, c)| (rat_frac(q2 as i64, 2), c.clone())).collect()
}

/// The overall unit `(ε, δ)` with `raw = ε q^δ · printed` for every printed row, where
/// each printed row is matched by the bundle whose normalized series agrees with it.
/// `None` when a row has no partner or the rows need different units.
pub fn relative_unit(bundles: &[QSeriesBundle], printed: &[PrintedZhat]) -> Result<Option<(i32, Rational)>> {
    let mut unit: Option<(i32, Rational)> = None;
    for row in printed {
        let terms = q_terms(&BiSeries::parse_text(row.text)?);
        let order = rat(row.q_order as i64);
        let Some(b) = bundles.iter().find(|b| b.agrees_with(&terms, Some(&order))) else {
            return Ok(None);
        };
        let here = (b.sign * row.sign, &b.offset - rat_frac(row.d.0, row.d.1));
        match &unit {
            Some(u) if *u != here => return Ok(None),
            _ => unit = Some(here),
        }
    }
    Ok(unit)
}

/// `(ε, d2)` with `a = ε q^{d2/2} b` on the region where both are known, or `None`.
pub fn unit_between(a: &BiSeries, b: &BiSeries) -> Option<(i32, i32)> {
    let (qa, xa, ca) = a.terms().find(|t| b.x_window().contains(t.1))?;
    let (qb, _, cb) = b.terms().find(|t| t.1 == xa)?;
    let ratio = ca / cb;
    if ratio.abs() != Rational::one() {
        return None;
    }
    let eps = if ratio.is_positive() { 1 } else { -1 };
    let scaled = b.shift(qa - qb, 0).scalar_mul(&ratio);
    a.diff_on_overlap(&scaled).is_zero().then_some((eps, qa - qb))
}

/// `d` in the normalization `q^d` used for `-1/r` surgeries, `-(r + 1/r)/4`.
pub fn inverse_surgery_normalization(r: i32) -> Rational {
    -(rat(r as i64) + rat_frac(1, r as i64)) / rat(4)
}

/// A surgery presentation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SurgerySpec {
    /// `p/r` surgery on a knot.
    Knot { p: i32, r: i32 },
    /// Integer surgery on a link with linking matrix `B` (framings on the diagonal).
    Link { matrix: Vec<Vec<i64>> },
}

impl SurgerySpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            SurgerySpec::Knot { p, r } => {
                if *r == 0 || *p == 0 {
                    return Err(Error::InvalidArgument("surgery coefficient needs p ≠ 0 and r ≠ 0".into()));
                }
                if num_integer::gcd(*p, *r) != 1 {
                    return Err(Error::InvalidArgument(format!("gcd({p}, {r}) ≠ 1")));
                }
                Ok(())
            }
            SurgerySpec::Link { matrix } => {
                let l = matrix.len();
                if l == 0 || matrix.iter().any(|row| row.len() != l) {
                    return Err(Error::InvalidArgument("linking matrix must be square".into()));
                }
                for i in 0..l {
                    for j in 0..i {
                        if matrix[i][j] != matrix[j][i] {
                            return Err(Error::InvalidArgument("linking matrix must be symmetric".into()));
                        }
                    }
                }
                Ok(())
            }
        }
    }
}

/// Scans a half-line of lattice points `start, start + dir·step, …` for the minimum of
/// functions that are convex along each key's own subsequence. Stops once every key
/// seen has started increasing and at least `span` points were visited.
fn scan_min(
    start: i32,
    dir: i32,
    step: i32,
    span: i32,
    mut value: impl FnMut(i32) -> Vec<(Rational, Rational)>,
    mins: &mut BTreeMap<Rational, Rational>,
) -> Result<()> {
    let mut last: BTreeMap<(Rational, usize), (Rational, bool)> = BTreeMap::new();
    for k in 0..1_000_000 {
        let x = start + dir * step * k;
        for (j, (key, v)) in value(x).into_iter().enumerate() {
            match mins.get_mut(&key) {
                Some(m) if *m <= v => {}
                Some(m) => *m = v.clone(),
                None => {
                    mins.insert(key.clone(), v.clone());
                }
            }
            let e = last.entry((key, j)).or_insert((v.clone(), false));
            if v > e.0 {
                e.1 = true;
            }
            e.0 = v;
        }
        if k >= span && last.values().all(|e| e.1) {
            return Ok(());
        }
    }
    Err(Error::ValidityUnbounded("lattice scan did not terminate".into()))
}

/// Residue and step of the exponent lattice that the terms occupy.
fn lattice_of(xs: impl Iterator<Item = i32>, unit: i32) -> (i32, i32) {
    let xs: Vec<i32> = xs.collect();
    let mut step = unit;
    while step > 1 && xs.iter().any(|x| (x - xs[0]).rem_euclid(step) != 0) {
        step /= 2;
    }
    (xs.first().copied().unwrap_or(0).rem_euclid(step.max(1)), step.max(1))
}

/// Support bound of a one-sided expansion on the side opposite to its window: a
/// series known for `x ≥ lo` has no terms above its largest known exponent.
fn support_bound(f: &MultiSeries, v: usize) -> (Option<i32>, Option<i32>) {
    let w = f.windows()[v];
    let xs = f.terms().map(|t| t.1[v]);
    match (w.lo, w.hi) {
        (Some(_), None) => (None, xs.max()),
        (None, Some(_)) => (xs.min(), None),
        _ => (None, None),
    }
}

fn first_at_least(a: i32, res: i32, step: i32) -> i32 {
    a + (res - a).rem_euclid(step)
}

/// `p/r` surgery on a knot: multiplies by `x^{1/(2r)} - x^{-1/(2r)}` and sends `x^u` to
/// `q^{-(r/p)u²}` on the coset `r·u ∈ b + pℤ`, one bundle per `b ∈ [0, |p|)`.
pub fn laplace_knot(f: &FkResult, p: i32, r: i32) -> Result<Vec<QSeriesBundle>> {
    laplace_knot_series(&f.series, p, r)
}

pub fn laplace_knot_series(s: &BiSeries, p: i32, r: i32) -> Result<Vec<QSeriesBundle>> {
    SurgerySpec::Knot { p, r }.validate()?;
    let (p, r) = if r < 0 { (-p, -r) } else { (p, r) };
    let c = Rational::new(BigInt::from(-r), BigInt::from(p));
    let w = s.x_window();
    if w.is_empty() || s.is_zero() {
        return Err(Error::EmptyWindow);
    }
    if w.lo.is_some() && w.hi.is_some() {
        return Err(Error::InvalidArgument("x-window bounded on both sides".into()));
    }
    if !w.is_full() && !c.is_positive() {
        return Err(Error::DivergentDirection(format!(
            "x^u -> q^(-(r/p)u^2) is unbounded below for p/r = {p}/{r}"
        )));
    }
    let modulus = rat(p.abs() as i64);
    let half_r = rat_frac(1, 2 * r as i64);
    let image = |x2: i32, sgn: i32| -> (Rational, Rational) {
        let u = rat_frac(x2 as i64, 2) + &half_r * rat(sgn as i64);
        let ru = &u * rat(r as i64);
        let b = &ru - &modulus * (&ru / &modulus).floor();
        (b, &c * &u * &u)
    };

    let mut raw: BTreeMap<Rational, BTreeMap<Rational, Rational>> = BTreeMap::new();
    for (q2, x2, cf) in s.terms() {
        for sgn in [1, -1] {
            let (b, e) = image(x2, sgn);
            let t = raw.entry(b).or_default().entry(e + rat_frac(q2 as i64, 2)).or_insert_with(Rational::zero);
            *t += cf * rat(sgn as i64);
        }
    }

    let (res, step) = lattice_of(s.x_exponents().into_iter(), 2);
    let span = 4 * p.abs() / step + 2;
    let mut mins: BTreeMap<Rational, Rational> = BTreeMap::new();
    if let Some(v) = s.q_valid2() {
        let tail = rat_frac(v as i64, 2);
        let val = |x2: i32| [1, -1].map(|g| {
            let (b, e) = image(x2, g);
            (b, e + &tail)
        });
        match (w.lo, w.hi) {
            (Some(lo), None) => scan_min(first_at_least(lo, res, step), 1, step, span, |x| val(x).to_vec(), &mut mins)?,
            (None, Some(hi)) => {
                scan_min(first_at_least(hi + 1, res, step) - step, -1, step, span, |x| val(x).to_vec(), &mut mins)?
            }
            _ => {
                let z = first_at_least(0, res, step);
                scan_min(z, 1, step, span, |x| val(x).to_vec(), &mut mins)?;
                scan_min(z - step, -1, step, span, |x| val(x).to_vec(), &mut mins)?;
            }
        }
    }
    if !w.is_full() {
        let floor = TailFloor::observe(s)
            .ok_or_else(|| Error::ValidityUnbounded("no coefficients to extrapolate the tail from".into()))?;
        let val = |x2: i32| {
            [1, -1]
                .map(|g| {
                    let (b, e) = image(x2, g);
                    (b, e + floor.at(x2) / rat(2))
                })
                .to_vec()
        };
        match (w.lo, w.hi) {
            (Some(lo), None) => scan_min(first_at_least(lo, res, step) - step, -1, step, span, val, &mut mins)?,
            (None, Some(hi)) => scan_min(first_at_least(hi + 1, res, step), 1, step, span, val, &mut mins)?,
            _ => unreachable!("window is one-sided here"),
        }
    }
    let labels: BTreeSet<Rational> = raw.keys().chain(mins.keys()).cloned().collect();
    Ok(labels
        .into_iter()
        .map(|b| {
            let terms = raw.remove(&b).unwrap_or_default();
            let v = mins.get(&b).cloned();
            QSeriesBundle::from_raw(vec![b], terms, v)
        })
        .collect())
}

fn rational_inverse(m: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let l = m.len();
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..l).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    for col in 0..l {
        let piv = (col..l).find(|&i| !a[i][col].is_zero())?;
        a.swap(col, piv);
        let inv = Rational::one() / &a[col][col];
        for v in a[col].iter_mut() {
            *v *= &inv;
        }
        for i in 0..l {
            if i != col && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                let pivot_row = a[col].clone();
                for (v, pv) in a[i].iter_mut().zip(&pivot_row) {
                    *v -= &f * pv;
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[l..].to_vec()).collect())
}

fn determinant(m: &[Vec<Rational>]) -> Rational {
    let l = m.len();
    let mut a = m.to_vec();
    let mut det = Rational::one();
    for col in 0..l {
        let Some(piv) = (col..l).find(|&i| !a[i][col].is_zero()) else {
            return Rational::zero();
        };
        if piv != col {
            a.swap(col, piv);
            det = -det;
        }
        det *= &a[col][col];
        for i in col + 1..l {
            let f = &a[i][col] / &a[col][col];
            let pivot_row = a[col].clone();
            for (v, pv) in a[i].iter_mut().zip(&pivot_row) {
                *v -= &f * pv;
            }
        }
    }
    det
}

/// Lower-triangular basis (as columns) of the lattice spanned by the columns of `b`.
fn lattice_basis(b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let l = b.len();
    let mut m: Vec<Vec<i64>> = b.to_vec();
    let swap_cols = |m: &mut Vec<Vec<i64>>, a: usize, c: usize| {
        for row in m.iter_mut() {
            row.swap(a, c);
        }
    };
    for i in 0..l {
        for j in i + 1..l {
            while m[i][j] != 0 {
                if m[i][i] != 0 {
                    let q = m[i][i].div_euclid(m[i][j]);
                    for row in m.iter_mut() {
                        row[i] -= q * row[j];
                    }
                }
                swap_cols(&mut m, i, j);
            }
        }
        if m[i][i] < 0 {
            for row in m.iter_mut() {
                row[i] = -row[i];
            }
        }
    }
    m
}

/// Canonical representative of `u` modulo the lattice with lower-triangular basis `h`.
fn reduce_mod_lattice(u: &[Rational], h: &[Vec<i64>]) -> Vec<Rational> {
    let mut u = u.to_vec();
    for i in 0..u.len() {
        let d = rat(h[i][i]);
        let k = (&u[i] / &d).floor();
        for (j, uj) in u.iter_mut().enumerate() {
            *uj -= &k * rat(h[j][i]);
        }
    }
    u
}

/// Integer surgery on a link with linking matrix `b`: multiplies by
/// `Π (x_i^{1/2} - x_i^{-1/2})` and sends `x^u` to `q^{-(u, B^{-1}u)}` on the coset
/// `u ∈ b + Bℤ^l`.
pub fn laplace_link(f: &MultiSeries, b: &[Vec<i64>]) -> Result<Vec<QSeriesBundle>> {
    let l = f.nvars();
    SurgerySpec::Link { matrix: b.to_vec() }.validate()?;
    if b.len() != l {
        return Err(Error::InvalidArgument(format!("linking matrix is {}x{}, series has {l} variables", b.len(), b.len())));
    }
    if f.is_zero() || f.windows().iter().any(|w| w.is_empty()) {
        return Err(Error::EmptyWindow);
    }
    if f.windows().iter().any(|w| w.lo.is_some() && w.hi.is_some()) {
        return Err(Error::InvalidArgument("x-window bounded on both sides".into()));
    }
    let bq: Vec<Vec<Rational>> = b.iter().map(|row| row.iter().map(|&v| rat(v)).collect()).collect();
    let binv = rational_inverse(&bq).ok_or(Error::SingularMatrix)?;
    let a: Vec<Vec<Rational>> = binv.iter().map(|row| row.iter().map(|v| -v).collect()).collect();
    let infinite = f.windows().iter().any(|w| !w.is_full());
    let definite = (1..=l).all(|k| {
        let minor: Vec<Vec<Rational>> = a[..k].iter().map(|row| row[..k].to_vec()).collect();
        determinant(&minor).is_positive()
    });
    if infinite && !definite {
        return Err(Error::DivergentDirection("-(u, B^-1 u) is not positive definite".into()));
    }
    let h = lattice_basis(b);
    let quad = |u4: &[i32]| -> Rational {
        let u: Vec<Rational> = u4.iter().map(|&v| rat_frac(v as i64, 4)).collect();
        let mut s = Rational::zero();
        for i in 0..l {
            for j in 0..l {
                s += &a[i][j] * &u[i] * &u[j];
            }
        }
        s
    };
    let label = |u4: &[i32]| -> Vec<Rational> {
        let u: Vec<Rational> = u4.iter().map(|&v| rat_frac(v as i64, 4)).collect();
        reduce_mod_lattice(&u, &h)
    };
    let signs: Vec<Vec<i32>> = (0..1u32 << l).map(|m| (0..l).map(|i| if m >> i & 1 == 1 { -1 } else { 1 }).collect()).collect();

    let mut raw: BTreeMap<Vec<Rational>, BTreeMap<Rational, Rational>> = BTreeMap::new();
    for (q4, x4, c) in f.terms() {
        for s in &signs {
            let u4: Vec<i32> = x4.iter().zip(s).map(|(x, g)| x + 2 * g).collect();
            let sign: i32 = s.iter().product();
            let e = quad(&u4) + rat_frac(q4 as i64, 4);
            let t = raw.entry(label(&u4)).or_default().entry(e).or_insert_with(Rational::zero);
            *t += c * rat(sign as i64);
        }
    }

    let trunc = f.q_valid4().map(|v| rat_frac(v as i64, 4));
    let floor = f.terms().map(|t| t.0).min().map(|q| rat_frac(q as i64, 4)).unwrap_or_else(Rational::zero);
    let mut mins: BTreeMap<Vec<Rational>, Rational> = BTreeMap::new();
    let mut beyond: Option<Rational> = None;
    if trunc.is_some() || infinite {
        let lattices: Vec<(i32, i32)> = (0..l).map(|v| lattice_of(f.terms().map(|t| t.1[v]), 4)).collect();
        let cone: Vec<(Option<i32>, Option<i32>)> = (0..l).map(|v| support_bound(f, v)).collect();
        let base = trunc.clone().map_or(floor.clone(), |t| if infinite { t.min(floor.clone()) } else { t });
        // Q(u) ≥ λ|u|² with λ = det A / (tr A)^{l-1}.
        let tr: Rational = (0..l).map(|i| a[i][i].clone()).sum();
        let lambda = determinant(&a) / (0..l - 1).fold(Rational::one(), |acc, _| acc * &tr);
        let edge = f.windows().iter().flat_map(|w| [w.lo, w.hi]).flatten().map(|e| e.abs()).max().unwrap_or(0);
        let mut radius4 = 4 * (edge / 4 + 2);
        loop {
            mins.clear();
            let ranges: Vec<Vec<i32>> = lattices
                .iter()
                .map(|&(res, step)| {
                    let lo = first_at_least(-radius4, res, step);
                    (0..).map(|k| lo + k * step).take_while(|&x| x <= radius4).collect()
                })
                .collect();
            let mut idx = vec![0usize; l];
            'points: loop {
                let x4: Vec<i32> = (0..l).map(|v| ranges[v][idx[v]]).collect();
                let in_cone = x4.iter().zip(&cone).all(|(&x, c)| c.0.is_none_or(|m| x >= m) && c.1.is_none_or(|m| x <= m));
                let inside = x4.iter().zip(f.windows()).all(|(&x, w)| w.contains(x));
                let add = if !in_cone {
                    None
                } else if inside { trunc.clone() } else { Some(floor.clone()) };
                if let Some(add) = add {
                    for s in &signs {
                        let u4: Vec<i32> = x4.iter().zip(s).map(|(x, g)| x + 2 * g).collect();
                        let v = quad(&u4) + &add;
                        let key = label(&u4);
                        match mins.get_mut(&key) {
                            Some(m) if *m <= v => {}
                            Some(m) => *m = v,
                            None => {
                                mins.insert(key, v);
                            }
                        }
                    }
                }
                for v in 0..l {
                    idx[v] += 1;
                    if idx[v] < ranges[v].len() {
                        continue 'points;
                    }
                    idx[v] = 0;
                }
                break;
            }
            // Points outside the box have |u| > radius - 1/2.
            let r = rat_frac(radius4 as i64, 4) - rat_frac(1, 2);
            let out = &lambda * &r * &r + &base;
            let top = mins.values().max().cloned();
            if top.as_ref().is_none_or(|t| *t <= out) {
                beyond = Some(out);
                break;
            }
            let need = ((top.unwrap() - &base) / &lambda).to_f64().unwrap_or(f64::MAX).sqrt();
            radius4 = 4 * (need.ceil() as i32 + 2);
        }
    }
    let labels: BTreeSet<Vec<Rational>> = raw.keys().chain(mins.keys()).cloned().collect();
    Ok(labels
        .into_iter()
        .map(|key| {
            let terms = raw.remove(&key).unwrap_or_default();
            let v = match (mins.get(&key), &beyond) {
                (Some(m), Some(bd)) => Some(m.min(bd).clone()),
                (m, bd) => m.cloned().or_else(|| bd.clone()),
            };
            QSeriesBundle::from_raw(key, terms, v)
        })
        .collect())
}

/// Result of a partial surgery, known up to the unit `ε q^d`; the exact transform is
/// `q^{q_shift} · series`.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialSurgery {
    pub series: MultiSeries,
    pub q_shift: Rational,
}

/// `-1/r` surgery on the unknotted component `component`: multiplies by
/// `x_0^{1/(2r)} - x_0^{-1/(2r)}` and sends `x_0^u` to `q^{ru²} Π x_i^{r·lk_i·u}`.
/// `lk` lists the linking numbers with the remaining components, in order.
pub fn partial_surgery(f: &MultiSeries, component: usize, r: i32, lk: &[i32]) -> Result<PartialSurgery> {
    let l = f.nvars();
    if component >= l {
        return Err(Error::InvalidArgument(format!("no component {component}")));
    }
    if r < 1 {
        return Err(Error::InvalidArgument("partial surgery needs r ≥ 1".into()));
    }
    if lk.len() + 1 != l {
        return Err(Error::InvalidArgument(format!("expected {} linking numbers", l - 1)));
    }
    if f.is_zero() {
        return Err(Error::EmptyWindow);
    }
    let w0 = f.windows()[component];
    if w0.is_empty() {
        return Err(Error::EmptyWindow);
    }
    if w0.lo.is_some() && w0.hi.is_some() {
        return Err(Error::InvalidArgument("x-window bounded on both sides".into()));
    }
    let rest: Vec<usize> = (0..l).filter(|&v| v != component).collect();
    let names: Vec<&str> = rest.iter().map(|&v| f.names()[v].as_str()).collect();
    // With t = 4ru, the image is q^{t²/(16r)} (q4 = t²/(4r)) and x_i^{lk_i t/4}.
    let t_of = |x4: i32, s: i32| r * x4 + 2 * s;
    let q4_of = |t: i32| Rational::new(BigInt::from(t as i64 * t as i64), BigInt::from(4 * r as i64));

    let mut frac: Option<Rational> = None;
    let mut images: Vec<(Rational, Vec<i32>, Rational)> = Vec::new();
    for (q4, x4, c) in f.terms() {
        for s in [1, -1] {
            let t = t_of(x4[component], s);
            let e = q4_of(t) + rat(q4 as i64);
            let fr = &e - e.floor();
            match &frac {
                Some(f0) if *f0 != fr => {
                    return Err(Error::InvalidArgument("transformed q-exponents do not share a lattice".into()))
                }
                _ => frac = Some(fr),
            }
            let x: Vec<i32> = rest.iter().zip(lk).map(|(&v, &k)| x4[v] + k * t).collect();
            images.push((e, x, c * rat(s as i64)));
        }
    }
    let frac = frac.unwrap_or_else(Rational::zero);

    let (res, step) = lattice_of(f.terms().map(|t| t.1[component]), 4);
    let mut mins: BTreeMap<Rational, Rational> = BTreeMap::new();
    let key = Rational::zero();
    if let Some(v) = f.q_valid4() {
        let val = |x4: i32| [1, -1].map(|s| (key.clone(), q4_of(t_of(x4, s)) + rat(v as i64))).to_vec();
        match (w0.lo, w0.hi) {
            (Some(lo), None) => scan_min(first_at_least(lo, res, step), 1, step, 2, val, &mut mins)?,
            (None, Some(hi)) => scan_min(first_at_least(hi + 1, res, step) - step, -1, step, 2, val, &mut mins)?,
            _ => {
                let z = first_at_least(0, res, step);
                scan_min(z, 1, step, 2, val, &mut mins)?;
                scan_min(z - step, -1, step, 2, val, &mut mins)?;
            }
        }
    }
    let floor = f.terms().map(|t| t.0).min().unwrap_or(0);
    if !w0.is_full() {
        let val = |x4: i32| [1, -1].map(|s| (key.clone(), q4_of(t_of(x4, s)) + rat(floor as i64))).to_vec();
        match (w0.lo, w0.hi) {
            (Some(lo), None) => scan_min(first_at_least(lo, res, step) - step, -1, step, 2, val, &mut mins)?,
            (None, Some(hi)) => scan_min(first_at_least(hi + 1, res, step), 1, step, 2, val, &mut mins)?,
            _ => unreachable!("window is one-sided here"),
        }
    }
    let q_valid = mins.remove(&key);

    let cone = support_bound(f, component);
    // Remaining windows move by lk_i·t for every x_0 that can contribute below q_valid.
    let contributing: Vec<i32> = match &q_valid {
        Some(v) => {
            let span = ((v - rat(floor as i64)) * rat(4 * r as i64)).to_f64().unwrap_or(0.0).max(0.0).sqrt().ceil() as i32;
            let lo = first_at_least((-span - 2) / r - step, res, step);
            (0..)
                .map(|k| lo + k * step)
                .take_while(|&x| x <= (span + 2) / r + step)
                .filter(|&x| w0.contains(x) && cone.0.is_none_or(|m| x >= m) && cone.1.is_none_or(|m| x <= m))
                .flat_map(|x| [t_of(x, 1), t_of(x, -1)])
                .filter(|&t| q4_of(t) + rat(floor as i64) < *v)
                .collect()
        }
        None => f.terms().flat_map(|t| [t_of(t.1[component], 1), t_of(t.1[component], -1)]).collect(),
    };
    let windows: Vec<Window> = rest
        .iter()
        .zip(lk)
        .map(|(&v, &k)| {
            let w = f.windows()[v];
            let shifts = contributing.iter().map(|t| k * t);
            match (w.lo, w.hi) {
                (Some(lo), None) => Window::at_least(lo + shifts.max().unwrap_or(0)),
                (None, Some(hi)) => Window::at_most(hi + shifts.min().unwrap_or(0)),
                _ => w,
            }
        })
        .collect();

    let mut out = MultiSeries::zero(&names).with_windows(&windows);
    if let Some(v) = &q_valid {
        out = out.with_q_valid((v - &frac).ceil().to_integer().to_i32().ok_or(Error::Overflow)?);
    }
    for (e, x, c) in images {
        let q4 = (e - &frac).to_integer().to_i32().ok_or(Error::Overflow)?;
        out.add_term(q4, &x, c);
    }
    Ok(PartialSurgery { series: out, q_shift: frac / rat(4) })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReverseOptions {
    /// Highest power of the surgered variable to recover.
    pub x_order: i32,
    /// Highest power of the remaining variable to recover.
    pub y_order: i32,
    /// Surgery parameters whose recovered arrays must all agree (at least two).
    pub r_values: Vec<i32>,
}

/// Coefficients `f_{i,j}` of `F_L ≅ x^{1/2} y^{1/2} Σ f_{i,j}(q) x^i y^j`, where `x`
/// belongs to the surgered component.
#[derive(Clone, Debug, PartialEq)]
pub struct ReverseResult {
    pub coefficients: BTreeMap<(i32, i32), BiSeries>,
    pub r_values: Vec<i32>,
}

impl ReverseResult {
    pub fn coefficient(&self, i: i32, j: i32) -> Option<&BiSeries> {
        self.coefficients.get(&(i, j))
    }

    /// The recovered series as `F^+` in `names = [x, y]`, exact on its window.
    pub fn to_multiseries(&self, names: [&str; 2]) -> MultiSeries {
        let (mi, mj) = self.coefficients.keys().fold((0, 0), |(a, b), &(i, j)| (a.max(i), b.max(j)));
        let mut out = MultiSeries::zero(&names).with_windows(&[Window::at_most(4 * mi + 2), Window::at_most(4 * mj + 2)]);
        for (&(i, j), f) in &self.coefficients {
            for (q2, _, c) in f.terms() {
                out.add_term(2 * q2, &[4 * i + 2, 4 * j + 2], c.clone());
            }
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "r_values": self.r_values,
            "coefficients": self.coefficients.iter().map(|(&(i, j), f)| json!({"i": i, "j": j, "text": f.to_text()})).collect::<Vec<_>>(),
        })
    }
}

/// Recovers a two-component link from its `-1/r` partial surgeries on one component.
///
/// For a component algebraically split from the other, the coefficient of
/// `y^{j+1/2}` in the surgered knot is, up to a unit, `Σ_i f_{i,j}(q) q^{r i(i+1)}
/// (q^{i+1} - q^{-i})`. The `i`-th summand is read off the `q`-band
/// `[r i², r(i+1)²)` and divided by `q^{-i}(q^{2i+1} - 1)`; the division must be exact.
/// Each family member is normalized so that `f_{0,0}` has lowest term `+1`.
pub fn reverse_engineer<F>(family: F, lk: i32, opts: &ReverseOptions) -> Result<ReverseResult>
where
    F: Fn(i32) -> Result<FkResult>,
{
    if lk != 0 {
        return Err(Error::InvalidArgument("reverse engineering needs an algebraically split component".into()));
    }
    let mut rs = opts.r_values.clone();
    rs.sort_unstable();
    rs.dedup();
    if rs.len() < 2 || rs[0] < 1 {
        return Err(Error::InsufficientRange("need at least two distinct r ≥ 1".into()));
    }
    let mut first: Option<(i32, BTreeMap<(i32, i32), BiSeries>)> = None;
    for &r in &rs {
        let got = extract_bands(&family(r)?, r, opts.x_order, opts.y_order)?;
        match &first {
            None => first = Some((r, got)),
            Some((r0, base)) => {
                if let Some((&(i, j), _)) = base.iter().find(|(k, v)| got.get(k) != Some(v)) {
                    return Err(Error::InconsistentFamily(format!("r = {r0} and r = {r} disagree on f_({i},{j})")));
                }
            }
        }
    }
    let (_, coefficients) = first.expect("at least two r values");
    Ok(ReverseResult { coefficients, r_values: rs })
}

fn extract_bands(fk: &FkResult, r: i32, x_order: i32, y_order: i32) -> Result<BTreeMap<(i32, i32), BiSeries>> {
    let w = fk.series.x_window();
    let g: Vec<BiSeries> = (0..=y_order)
        .map(|j| {
            let x2 = if fk.expansion == Expansion::Negative { -2 * j - 1 } else { 2 * j + 1 };
            if !w.contains(x2) {
                return Err(Error::InsufficientRange(format!("r = {r}: x-window misses y^{j}")));
            }
            Ok(fk.f_coefficient(j))
        })
        .collect::<Result<_>>()?;
    let (q0, _, c0) = g[0]
        .terms()
        .next()
        .ok_or_else(|| Error::InsufficientRange(format!("r = {r}: leading coefficient vanishes")))?;
    if c0.abs() != Rational::one() {
        return Err(Error::InvalidArgument(format!("r = {r}: leading coefficient {c0} is not a unit")));
    }
    let unit = -c0.signum();
    let need = 2 * r * (x_order + 1) * (x_order + 1);
    let mut out = BTreeMap::new();
    for (j, gj) in g.iter().enumerate() {
        let gj = gj.shift(-q0, 0).scalar_mul(&unit);
        if let Some(v) = gj.q_valid2() {
            if v < need {
                return Err(Error::InsufficientRange(format!(
                    "r = {r}: y^{j} known below q^{}, bands need q^{}",
                    v / 2,
                    need / 2
                )));
            }
        }
        for i in 0..=x_order {
            let (lo, hi) = (2 * r * i * i, 2 * r * (i + 1) * (i + 1));
            let band = BiSeries::from_terms(
                gj.terms().filter(|t| (i == 0 || t.0 >= lo) && t.0 < hi).map(|(q2, x2, c)| (q2, x2, c.clone())),
            );
            let h = band.shift(-2 * r * i * (i + 1) + 2 * i, 0);
            let d = BiSeries::from_terms([(2 * (2 * i + 1), 0, rat(1)), (0, 0, rat(-1))]);
            let f = h.div_exact_q(&d).ok_or_else(|| {
                Error::InsufficientRange(format!("r = {r}: band {i} of y^{j} is not separated"))
            })?;
            out.insert((i, j as i32), f);
        }
    }
    Ok(out)
}

/// Wraps a one-variable partial-surgery result as an `F^+` knot series.
pub fn surgered_knot(p: &PartialSurgery) -> Result<FkResult> {
    let series = p.series.to_biseries()?;
    let expansion = if series.x_window().hi.is_some() || series.min_x2().is_some_and(|x| x > 0) {
        Expansion::Positive
    } else {
        Expansion::Negative
    };
    Ok(FkResult {
        exactness: match series.q_valid2() {
            Some(v) => Exactness::Stabilized { q_valid2: v },
            None => Exactness::ExactPolynomialCoeffs,
        },
        series,
        expansion,
        strata_used: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_term_transform() {
        let s = BiSeries::monomial(0, 1, rat(1)).with_window(Window::FULL);
        let out = laplace_knot_series(&s, -1, 1).unwrap();
        // (x - 1) ↦ q^1 - q^0 on the single class.
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].raw_terms(), BTreeMap::from([(rat(0), rat(-1)), (rat(1), rat(1))]));
        assert_eq!(out[0].q_valid, None);
    }

    #[test]
    fn divergent_direction_is_rejected() {
        let s = BiSeries::parse_text("x^(1/2) + q*x^(3/2)").unwrap().with_window(Window::at_most(3));
        assert!(matches!(laplace_knot_series(&s, 1, 1), Err(Error::DivergentDirection(_))));
    }

    #[test]
    fn lattice_basis_is_triangular() {
        let h = lattice_basis(&[vec![-2, 1], vec![1, -3]]);
        assert_eq!(h[0][1], 0);
        assert_eq!((h[0][0] * h[1][1]).abs(), 5);
        let u = reduce_mod_lattice(&[rat(7), rat(-4)], &h);
        assert!(u[0] >= rat(0) && u[0] < rat(h[0][0]));
    }

    #[test]
    fn unknot_minus_one() {
        let f = MultiSeries::from_biseries(&BiSeries::parse_text("x^(1/2) - x^(-1/2)").unwrap(), "x");
        let out = laplace_link(&f, &[vec![-1]]).unwrap();
        let nonzero: Vec<_> = out.iter().filter(|b| b.sign != 0).collect();
        assert_eq!(nonzero.len(), 1);
        // S^3 up to a unit: 1 - q
        let expected: BTreeMap<Rational, Rational> = [(rat(0), rat(1)), (rat(1), rat(-1))].into_iter().collect();
        assert_eq!(nonzero[0].terms, expected);
    }

    #[test]
    fn singular_matrix() {
        let f = MultiSeries::one(&["x", "y"]);
        assert_eq!(laplace_link(&f, &[vec![1, 1], vec![1, 1]]), Err(Error::SingularMatrix));
    }
}
