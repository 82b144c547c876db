//! Finite-color colored Jones polynomials, their root-of-unity values, strange
//! series of `F_K`, and checks of `q`-difference operators against `F_K`.

use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::algebra::{rat_frac, BiSeries, Rational, Substitution, TailFloor};
use crate::braid::BraidWord;
use crate::error::{Error, Result};
use crate::poly::Mono;
use crate::rmatrix::Family;
use crate::statesum::{Engine, FkResult, State};

/// Colored Jones polynomial of a braid knot in the `n`-dimensional representation.
/// Reduced opens the leftmost strand (unknot = 1); unreduced is the full quantum
/// trace (unknot = `[n]`). Includes the framing prefactor `q^{-(n²-1)w/4}`.
pub fn colored_jones(b: &BraidWord, n: u32, reduced: bool) -> Result<BiSeries> {
    b.require_knot()?;
    if n == 0 || n > 64 {
        return Err(Error::InvalidArgument("color must be in 1..=64".into()));
    }
    let strands = b.strands();
    let open = if reduced { Some(0) } else { None };
    let e = Engine::new(b, Family::Finite, vec![n as u8; strands], open)?;
    let closed = strands - usize::from(reduced);
    let tuples: Vec<State> = (0..=closed * (n as usize - 1)).flat_map(|w| e.tuples(w, 0)).collect();
    let framing = -((n * n - 1) as i32) * b.writhe();
    crate::statesum::sum_traces(&e, tuples)?.scale_mono(Mono::q_only(framing)).to_biseries(0)
}

/// Value of a Laurent polynomial in `q^{1/2}` at `q = e^{2πi/n}`, with a bound on
/// the rounding error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RootValue {
    pub value: Complex64,
    pub error_bound: f64,
}

/// Evaluates an exact `q`-polynomial at `q = e^{2πi/n}`. Exponents are reduced
/// modulo the order of `q^{1/2}` in exact arithmetic first, so rounding happens only
/// in the final sum of at most `2n` terms.
pub fn eval_at_root(p: &BiSeries, n: u32) -> Result<RootValue> {
    if p.q_valid2().is_some() || p.terms().any(|(_, x2, _)| x2 != 0) {
        return Err(Error::InvalidArgument("root-of-unity evaluation needs an exact q-polynomial".into()));
    }
    let order = 2 * n as i32;
    let mut classes = vec![Rational::zero(); order as usize];
    for (q2, _, c) in p.terms() {
        classes[q2.rem_euclid(order) as usize] += c;
    }
    let mut value = Complex64::new(0.0, 0.0);
    let mut mag = 0.0;
    for (k, c) in classes.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let c = c.to_f64().unwrap_or(f64::NAN);
        let theta = std::f64::consts::PI * k as f64 / n as f64;
        value += Complex64::from_polar(c, theta);
        mag += c.abs();
    }
    Ok(RootValue { value, error_bound: 4.0 * f64::EPSILON * mag * (classes.len() as f64 + 1.0) })
}

/// Kashaev invariant: the reduced `n`-colored Jones polynomial at `q = e^{2πi/n}`.
pub fn kashaev(b: &BraidWord, n: u32) -> Result<RootValue> {
    if n < 2 {
        return Err(Error::InvalidArgument("Kashaev invariant needs n >= 2".into()));
    }
    eval_at_root(&colored_jones(b, n, true)?, n)
}

/// The `x = 1` value of `F / (x^{1/2} - x^{-1/2})` read as the balanced expansion:
/// a term `c x^{e}` contributes `e c`. Certification past the `x`-window rests on a
/// tail floor extrapolated from the window, so the result is heuristic beyond the
/// series' own `q`-validity whenever the window is one-sided.
pub fn strange_series(f: &FkResult) -> Result<BiSeries> {
    let s = &f.series;
    let mut weighted = BiSeries::zero().with_validity(s.x_window(), s.q_valid2());
    for (q2, x2, c) in s.terms() {
        weighted.add_term(q2, x2, c * rat_frac(x2 as i64, 2));
    }
    let w = s.x_window();
    if w.is_full() {
        return weighted.substitute(Substitution::XToOne);
    }
    let floor = TailFloor::observe(s).ok_or_else(|| Error::ValidityUnbounded("series has no terms in its window".into()))?;
    if !floor.slope.is_positive() {
        return Err(Error::ValidityUnbounded(format!(
            "lowest q-degree does not grow across the window (observed slope {} per x-step)",
            floor.slope
        )));
    }
    weighted.substitute_with_floor(Substitution::XToOne, Some(&floor))
}

/// How `ŷ` acts on a series in `x`.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum YhatConvention {
    /// `f(x) -> f(qx)`
    QShift,
    /// `f(x) -> f(q^{-1}x)`
    QInvShift,
}

impl YhatConvention {
    pub fn name(self) -> &'static str {
        match self {
            YhatConvention::QShift => "f(x)->f(qx)",
            YhatConvention::QInvShift => "f(x)->f(x/q)",
        }
    }

    fn sign(self) -> i32 {
        match self {
            YhatConvention::QShift => 1,
            YhatConvention::QInvShift => -1,
        }
    }
}

/// A `q`-difference operator `Σ_k a_k(x, q) ŷ^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct AnnihilatorOp {
    pub coefficients: Vec<BiSeries>,
    pub convention: YhatConvention,
}

impl AnnihilatorOp {
    pub fn new(coefficients: Vec<BiSeries>, convention: YhatConvention) -> Result<AnnihilatorOp> {
        if coefficients.iter().any(|a| a.q_valid2().is_some() || !a.x_window().is_full()) {
            return Err(Error::InvalidArgument("operator coefficients must be exact polynomials".into()));
        }
        let mut coefficients = coefficients;
        while coefficients.last().is_some_and(BiSeries::is_zero) {
            coefficients.pop();
        }
        Ok(AnnihilatorOp { coefficients, convention })
    }

    /// `{"coefficients": [series, ...], "convention": "q" | "q^-1"}`; the convention
    /// is optional and defaults to `f(x) -> f(qx)`.
    pub fn from_json(v: &Value) -> Result<AnnihilatorOp> {
        let list = v
            .get("coefficients")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("operator json: missing coefficients".into()))?;
        let coefficients = list.iter().map(BiSeries::from_json).collect::<Result<Vec<_>>>()?;
        let convention = match v.get("convention").and_then(Value::as_str) {
            None | Some("q") => YhatConvention::QShift,
            Some("q^-1") => YhatConvention::QInvShift,
            Some(o) => return Err(Error::Parse(format!("operator json: unknown convention {o}"))),
        };
        AnnihilatorOp::new(coefficients, convention)
    }

    pub fn to_json(&self) -> Value {
        let conv = match self.convention {
            YhatConvention::QShift => "q",
            YhatConvention::QInvShift => "q^-1",
        };
        json!({
            "coefficients": self.coefficients.iter().map(BiSeries::to_json).collect::<Vec<_>>(),
            "convention": conv,
        })
    }

    /// `Σ_k a_k · f(q^{±k} x)` with uniform validity metadata (conservative: the
    /// `q`-order is the worst over the whole window).
    pub fn apply(&self, f: &BiSeries) -> BiSeries {
        let s = self.convention.sign();
        let mut acc: Option<BiSeries> = None;
        for (k, a) in self.coefficients.iter().enumerate() {
            let t = a * &f.q_dilate(s * k as i32);
            acc = Some(match acc {
                Some(r) => &r + &t,
                None => t,
            });
        }
        acc.unwrap_or_else(|| BiSeries::zero().with_validity(f.x_window(), f.q_valid2()))
    }

    /// `Σ_k a_k · f(q^{±k} x)` certified per `x`-exponent: returns the exact residual
    /// terms that are certified and the list `(x2, q_valid2)` of certified
    /// coefficients (`None` = exact). Shifting by `q^{-k}` lowers the `q`-order of high
    /// powers of `x`, so a single uniform order would throw most of the window away.
    pub fn apply_certified(&self, f: &BiSeries) -> (BiSeries, Vec<(i32, Option<i32>)>) {
        let s = self.convention.sign();
        let w = f.x_window();
        let (Some(flo), Some(fhi)) = (w.lo.or(f.min_x2()), w.hi.or(f.max_x2())) else {
            return (BiSeries::zero(), Vec::new());
        };
        let mut raw = BiSeries::zero();
        let exact_f = f.clone().into_exact();
        for (k, a) in self.coefficients.iter().enumerate() {
            raw = &raw + &(a * &exact_f.q_dilate(s * k as i32));
        }
        let supports: Vec<Vec<(i32, i32)>> = self
            .coefficients
            .iter()
            .map(|a| a.x_exponents().into_iter().map(|j| (j, a.x_coeff(j).min_q2().unwrap_or(0))).collect())
            .collect();
        let lo = supports.iter().flatten().map(|p| p.0).min().unwrap_or(0) + flo;
        let hi = supports.iter().flatten().map(|p| p.0).max().unwrap_or(0) + fhi;
        let mut certified = Vec::new();
        let mut out = BiSeries::zero();
        'x: for x2 in lo..=hi {
            let mut bound: Option<i32> = None;
            for (k, sup) in supports.iter().enumerate() {
                for &(j2, qa) in sup {
                    let e2 = x2 - j2;
                    if !w.contains(e2) {
                        continue 'x;
                    }
                    if e2 < flo || e2 > fhi {
                        continue;
                    }
                    if let Some(v) = f.q_valid2() {
                        let b = v + s * k as i32 * e2 + qa;
                        bound = Some(bound.map_or(b, |o| o.min(b)));
                    }
                }
            }
            certified.push((x2, bound));
            for (q2, _, c) in raw.x_coeff(x2).terms() {
                if bound.is_none_or(|b| q2 < b) {
                    out.add_term(q2, x2, c.clone());
                }
            }
        }
        (out, certified)
    }
}

/// Residual of one convention.
#[derive(Clone, Debug, PartialEq)]
pub struct ConventionResidual {
    pub convention: YhatConvention,
    /// Certified residual terms.
    pub residual: BiSeries,
    /// `(x2, q_valid2)` per certified `x`-exponent (`None` = exact).
    pub certified: Vec<(i32, Option<i32>)>,
    pub vanishes: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnnihilatorReport {
    pub residuals: Vec<ConventionResidual>,
}

impl AnnihilatorReport {
    /// The conventions under which the residual vanishes on its certified region.
    pub fn annihilating(&self) -> Vec<YhatConvention> {
        self.residuals.iter().filter(|r| r.vanishes).map(|r| r.convention).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "residuals": self.residuals.iter().map(|r| json!({
                "convention": r.convention.name(),
                "vanishes": r.vanishes,
                "nonzero_terms": r.residual.len(),
                "residual": r.residual.to_json(),
                "certified": r.certified.iter().map(|(x2, q)| json!({"x2": x2, "q_valid2": q})).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "annihilating": self.annihilating().iter().map(|c| c.name()).collect::<Vec<_>>(),
        })
    }
}

/// Applies the operator to `f` under both `ŷ` conventions. Fails when the window
/// leaves no certified coefficient of the residual.
pub fn check_annihilator(op: &AnnihilatorOp, f: &FkResult) -> Result<AnnihilatorReport> {
    let mut residuals = Vec::new();
    for convention in [YhatConvention::QShift, YhatConvention::QInvShift] {
        let op = AnnihilatorOp { convention, ..op.clone() };
        let (residual, certified) = op.apply_certified(&f.series);
        // A certified coefficient must reach past the lowest q-degree present.
        let floor = f.series.min_q2().unwrap_or(0);
        let useful = certified.iter().any(|&(_, b)| b.is_none_or(|b| b > floor));
        if !useful {
            let spread = op.coefficients.iter().filter_map(BiSeries::max_x2).max().unwrap_or(0)
                - op.coefficients.iter().filter_map(BiSeries::min_x2).min().unwrap_or(0);
            return Err(Error::WindowTooSmall(format!(
                "operator spans {} in x with {} y-steps; the x-order must exceed {} and the q-order must cover the shifts",
                spread / 2,
                op.coefficients.len().saturating_sub(1),
                spread / 2
            )));
        }
        let vanishes = residual.is_zero();
        residuals.push(ConventionResidual { convention, residual, certified, vanishes });
    }
    Ok(AnnihilatorReport { residuals })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::qint;

    #[test]
    fn unknot_values() {
        let u = BraidWord::new(1, vec![]).unwrap();
        assert_eq!(colored_jones(&u, 5, false).unwrap(), qint(5));
        assert_eq!(colored_jones(&u, 5, true).unwrap(), BiSeries::one());
        let k = kashaev(&u, 7).unwrap();
        assert!((k.value - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn trivial_color() {
        let t = BraidWord::parse("1,1,1", 2).unwrap();
        assert_eq!(colored_jones(&t, 1, true).unwrap(), BiSeries::one());
        let s = BraidWord::parse("1,-2,1,-2", 3).unwrap();
        assert_eq!(colored_jones(&s, 1, false).unwrap(), BiSeries::one());
    }

    #[test]
    fn constant_in_x_is_killed_by_yhat_minus_one() {
        let op = AnnihilatorOp::new(vec![-BiSeries::one(), BiSeries::one()], YhatConvention::QShift).unwrap();
        let f = BiSeries::from_q_coeffs(0, &[1, 2, 3]);
        assert!(op.apply(&f).is_zero());
    }
}
