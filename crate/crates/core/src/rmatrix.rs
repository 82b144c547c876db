//! R-matrix entries for finite-color modules and for highest/lowest-weight Verma
//! modules (single- and mixed-parameter), with their inverses.
//!
//! Framing factors `q^{(n²-1)/4}` (resp. `q^{(nm-1)/4}`) are stripped; the
//! `x^{-1/2}` (resp. `x^{-1/4}y^{-1/4}`) prefactors are kept inside entries.
//!
//! Inverse crossings use `Ř⁻¹ = P Ř|_{x→1/x, q→1/q} P`. For an input pair `(a, b)`
//! (left, right) this means: swap the inputs, apply the positive formula, invert
//! all exponents, swap the outputs.

use std::sync::{Arc, OnceLock};

use parking_lot::RwLock;
use rustc_hash::FxHashMap;

use crate::algebra::{gaussian_coeffs, poch_x, qbinom, qint, BiSeries, MultiSeries, Rational};
use crate::error::Result;
use crate::poly::{Extent, Mono, Poly, NV};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn of_letter(l: i32) -> Sign {
        if l > 0 {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Weightspace {
    Highest,
    Lowest,
    Finite { n: u32, m: u32 },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Colors {
    Single,
    Mixed,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct CrossingKind {
    pub sign: Sign,
    pub weightspace: Weightspace,
    pub colors: Colors,
}

/// One matrix entry of `Ř` (or `Ř⁻¹`): input basis pair to output basis pair.
///
/// For Verma modules the indices are the basis labels `v^j` / `v_j` (nonnegative).
/// For finite colors they are the weight labels `v_i` with `i ∈ {1-n, 3-n, …, n-1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct REntry<C = BiSeries> {
    pub in_left: i64,
    pub in_right: i64,
    pub out_left: i64,
    pub out_right: i64,
    pub coeff: C,
}

/// Which Verma family a mixed-parameter entry belongs to.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum MixedOrder {
    /// `v^i ⊗ w^j` with `v` in the `x`-module, `w` in the `y`-module.
    Hw,
    /// `w_j ⊗ v_i`.
    Lw,
}

/// The `k`-th summand of the positive highest-weight formula applied to `v^i ⊗ v^j`.
fn hw_summand(i: i64, j: i64, k: i64) -> BiSeries {
    // qbin(i,k) q^{(i-k)k/2} is the ordinary Gaussian binomial.
    let m = i - k;
    let pref = BiSeries::int_monomial((2 * m * j + m * k + m + j + 1) as i32, (-1 - m - j) as i32, 1);
    &(&qbinom(i as i32, k as i32) * &poch_x(j as i32, k as i32)) * &pref
}

fn invert(s: &BiSeries) -> BiSeries {
    BiSeries::from_terms(s.terms().map(|(q, x, c)| (-q, -x, c.clone())))
}

/// Entry of the highest-weight `Ř` (positive) or `Ř⁻¹` (negative) on input `v^a ⊗ v^b`.
///
/// Positive: `(a, b) = (i, j)`, output `(j+k, i-k)`, `0 ≤ k ≤ i`.
/// Negative: output `(b-k, a+k)`, `0 ≤ k ≤ b`, coefficient of the positive entry
/// at `(i, j) = (b, a)` with `x`, `q` inverted.
pub fn entry_large_hw(a: i64, b: i64, k: i64, sign: Sign) -> REntry {
    let (i, j) = match sign {
        Sign::Positive => (a, b),
        Sign::Negative => (b, a),
    };
    if a < 0 || b < 0 || k < 0 || k > i {
        return zero_entry(a, b);
    }
    let c = hw_summand(i, j, k);
    match sign {
        Sign::Positive => REntry { in_left: a, in_right: b, out_left: b + k, out_right: a - k, coeff: c },
        Sign::Negative => REntry { in_left: a, in_right: b, out_left: b - k, out_right: a + k, coeff: invert(&c) },
    }
}

/// Entry of the lowest-weight `Ř` / `Ř⁻¹` on input `v_a ⊗ v_b`.
///
/// Positive: `(a, b) = (j, i)`, output `(i-k, j+k)`, `0 ≤ k ≤ i`, same coefficient as
/// the highest-weight entry with the same `(i, j, k)`.
/// Negative: output `(b+k, a-k)`, `0 ≤ k ≤ a`, inverted coefficient at `(i, j) = (a, b)`.
pub fn entry_large_lw(a: i64, b: i64, k: i64, sign: Sign) -> REntry {
    let (i, j) = match sign {
        Sign::Positive => (b, a),
        Sign::Negative => (a, b),
    };
    if a < 0 || b < 0 || k < 0 || k > i {
        return zero_entry(a, b);
    }
    let c = hw_summand(i, j, k);
    match sign {
        Sign::Positive => REntry { in_left: a, in_right: b, out_left: b - k, out_right: a + k, coeff: c },
        Sign::Negative => REntry { in_left: a, in_right: b, out_left: b + k, out_right: a - k, coeff: invert(&c) },
    }
}

fn zero_entry<C: Default>(a: i64, b: i64) -> REntry<C> {
    REntry { in_left: a, in_right: b, out_left: b, out_right: a, coeff: C::default() }
}

impl Default for MultiSeries {
    fn default() -> Self {
        MultiSeries::zero(&[])
    }
}

/// Mixed-parameter entry with variables `["x", "y"]` (quarter-unit exponents).
///
/// `Hw`: input `v^i ⊗ w^j` (`v` colored `x`), output `w^{j+k} ⊗ v^{i-k}`.
/// `Lw`: input `w_j ⊗ v_i`, output `v_{i-k} ⊗ w_{j+k}`.
/// Negative sign returns the corresponding entry of `Ř⁻¹` on the same input
/// labels, following the flip-and-invert rule.
pub fn entry_large_mixed(i: i64, j: i64, k: i64, sign: Sign, which: MixedOrder) -> REntry<MultiSeries> {
    let names = ["x", "y"];
    // Engine variables: 0 = x, 1 = y.
    let (family, left, right, a, b) = match which {
        MixedOrder::Hw => (Family::Hw, 0u8, 1u8, i, j),
        MixedOrder::Lw => (Family::Lw, 1u8, 0u8, j, i),
    };
    let spec = CrossingSpec { family, sign, left, right };
    let outs = crossing_outputs(spec, a as u16, b as u16, EntryCut::default());
    let kk = match (family, sign) {
        // The summation index determines the output; recover it from the outputs.
        (Family::Hw, Sign::Positive) => Some((b + k, a - k)),
        (Family::Hw, Sign::Negative) => Some((b - k, a + k)),
        (Family::Lw, Sign::Positive) => Some((b - k, a + k)),
        (Family::Lw, Sign::Negative) => Some((b + k, a - k)),
        _ => None,
    };
    let (ol, or) = kk.unwrap();
    let coeff = outs
        .iter()
        .find(|o| o.l as i64 == ol && o.r as i64 == or)
        .map(|o| o.poly.to_multiseries(&names))
        .unwrap_or_else(|| MultiSeries::zero(&names));
    REntry { in_left: a, in_right: b, out_left: ol, out_right: or, coeff }
}

/// Finite-color entry of `Ř = P R` on `V_n ⊗ V_m` (or of `Ř⁻¹` for negative sign),
/// input `v_i ⊗ w_j` in weight labels. Coefficient is a `q`-series in quarter units.
///
/// Positive: output `w_{j-2k} ⊗ v_{i+2k}`. Negative: output `w_{j+2k} ⊗ v_{i-2k}`.
pub fn entry_finite(n: i64, m: i64, i: i64, j: i64, k: i64, sign: Sign) -> REntry<MultiSeries> {
    let valid_i = |l: i64, d: i64| l.abs() < d && (d - 1 - l) % 2 == 0;
    if n < 1 || m < 1 || !valid_i(i, n) || !valid_i(j, m) || k < 0 {
        return zero_entry(i, j);
    }
    let (coeff, ol, or) = match sign {
        Sign::Positive => {
            if k > (n - 1 - i) / 2 || k > (m - 1 + j) / 2 {
                return zero_entry(i, j);
            }
            (finite_coeff(n, m, i, j, k), j - 2 * k, i + 2 * k)
        }
        Sign::Negative => {
            // Inner positive entry on w_j ⊗ v_i (colors m, n).
            if k > (m - 1 - j) / 2 || k > (n - 1 + i) / 2 {
                return zero_entry(i, j);
            }
            (finite_coeff(m, n, j, i, k).invert_exponents(), j + 2 * k, i - 2 * k)
        }
    };
    REntry { in_left: i, in_right: j, out_left: ol, out_right: or, coeff: coeff.to_multiseries(&[]) }
}

/// `(q^{1/2}-q^{-1/2})^k [k]! qbin((n-1-i)/2, k) qbin((m-1+j)/2, k) q^{(ij - k(i-j) - k(k+1))/4}`
fn finite_coeff(n: i64, m: i64, i: i64, j: i64, k: i64) -> Poly {
    let diff = BiSeries::from_terms([(1, 0, Rational::from_integer(1.into())), (-1, 0, Rational::from_integer((-1).into()))]);
    let mut s = diff.pow(k as u32);
    for t in 1..=k {
        s = &s * &qint(t as i32);
    }
    s = &s * &qbinom(((n - 1 - i) / 2) as i32, k as i32);
    s = &s * &qbinom(((m - 1 + j) / 2) as i32, k as i32);
    let p = Poly::from_biseries(&s, 0).expect("integral q-series");
    p.scale_mono(Mono::q_only((i * j - k * (i - j) - k * (k + 1)) as i32))
}

// ---------------------------------------------------------------------------
// Engine tables
// ---------------------------------------------------------------------------

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Hw,
    Lw,
    /// Finite colors; `left`/`right` hold the dimensions and states are indexed by
    /// `a = (n-1-i)/2`.
    Finite,
}

/// A crossing as seen by the engine. For Verma families `left`/`right` are the
/// variable indices coloring the two input positions.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct CrossingSpec {
    pub family: Family,
    pub sign: Sign,
    pub left: u8,
    pub right: u8,
}

/// Truncation applied while generating entries: keep `x4` of the single variable in
/// `[lo, hi]` (Verma families with one color only).
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Default)]
pub(crate) struct EntryCut {
    pub lo: Option<i32>,
    pub hi: Option<i32>,
}

#[derive(Clone, Debug)]
pub(crate) struct Out {
    pub l: u16,
    pub r: u16,
    pub poly: Poly,
    pub ext: Extent,
}

type Key = (CrossingSpec, u16, u16, EntryCut);

fn cache() -> &'static RwLock<FxHashMap<Key, Arc<[Out]>>> {
    static C: OnceLock<RwLock<FxHashMap<Key, Arc<[Out]>>>> = OnceLock::new();
    C.get_or_init(|| RwLock::new(FxHashMap::default()))
}

/// Drops all memoized entries.
pub fn clear_cache() {
    cache().write().clear();
}

/// All nonzero outputs of a crossing on input `(a, b)`, memoized.
pub(crate) fn crossing_outputs(spec: CrossingSpec, a: u16, b: u16, cut: EntryCut) -> Arc<[Out]> {
    let key = (spec, a, b, cut);
    if let Some(v) = cache().read().get(&key) {
        return v.clone();
    }
    let v: Arc<[Out]> = Arc::from(generate(spec, a as i64, b as i64, cut));
    cache().write().entry(key).or_insert(v).clone()
}

fn generate(spec: CrossingSpec, a: i64, b: i64, cut: EntryCut) -> Vec<Out> {
    let mut outs = Vec::new();
    let mut push = |l: i64, r: i64, poly: Poly| {
        if let Some(ext) = poly.extent() {
            outs.push(Out { l: l as u16, r: r as u16, poly, ext });
        }
    };
    match spec.family {
        Family::Finite => {
            let (n, m) = (spec.left as i64, spec.right as i64);
            let (i, j) = (n - 1 - 2 * a, m - 1 - 2 * b);
            match spec.sign {
                Sign::Positive => {
                    for k in 0..=a.min(m - 1 - b) {
                        push(b + k, a - k, finite_coeff(n, m, i, j, k));
                    }
                }
                Sign::Negative => {
                    // Colors of the inner positive crossing are (m, n) on (b, a).
                    for k in 0..=b.min(n - 1 - a) {
                        push(b - k, a + k, finite_coeff(m, n, j, i, k).invert_exponents());
                    }
                }
            }
        }
        Family::Hw | Family::Lw => {
            let (cl, cr) = (spec.left as usize, spec.right as usize);
            // (i, j, color of the i-strand, color of the j-strand, output for summand k)
            let (i, j, vx, vy): (i64, i64, usize, usize) = match (spec.family, spec.sign) {
                (Family::Hw, Sign::Positive) => (a, b, cl, cr),
                (Family::Hw, Sign::Negative) => (b, a, cr, cl),
                (Family::Lw, Sign::Positive) => (b, a, cr, cl),
                (Family::Lw, Sign::Negative) => (a, b, cl, cr),
                _ => unreachable!(),
            };
            let inverted = spec.sign == Sign::Negative;
            for k in 0..=i {
                let out = match (spec.family, spec.sign) {
                    (Family::Hw, Sign::Positive) => (b + k, a - k),
                    (Family::Hw, Sign::Negative) => (b - k, a + k),
                    (Family::Lw, Sign::Positive) => (b - k, a + k),
                    _ => (b + k, a - k),
                };
                let p = large_coeff(i, j, k, vx, vy, inverted, cut);
                push(out.0, out.1, p);
            }
        }
    }
    outs
}

/// The `k`-th summand of the mixed highest-weight formula, optionally with inverted
/// exponents, truncated to `cut` when the two colors coincide.
fn large_coeff(i: i64, j: i64, k: i64, vx: usize, vy: usize, inverted: bool, cut: EntryCut) -> Poly {
    let m = i - k;
    let mut x4 = [0i32; NV];
    x4[vx] += -1 - 2 * j as i32 - k as i32;
    x4[vy] += -1 - 2 * m as i32 + k as i32;
    let base = Mono::new((4 * m * j + 2 * (m + j + 1)) as i32, x4).expect("exponent range");
    let sgn = if inverted { -1 } else { 1 };
    // Each Pochhammer factor carries y^{-1}; bound how many may be taken.
    let mut s_max = k;
    let single = vx == vy;
    if single {
        let top = sgn * base.x[vx] as i32;
        // term with s factors has x4 = sgn*(base - 4s)
        if inverted {
            if let Some(hi) = cut.hi {
                if top > hi {
                    return Poly::zero();
                }
                s_max = s_max.min(((hi - top) / 4) as i64);
            }
            if cut.lo.is_some_and(|lo| top + 4 * (k as i32) < lo) {
                return Poly::zero();
            }
        } else {
            if let Some(lo) = cut.lo {
                if top < lo {
                    return Poly::zero();
                }
                s_max = s_max.min(((top - lo) / 4) as i64);
            }
            if cut.hi.is_some_and(|hi| top - 4 * (k as i32) > hi) {
                return Poly::zero();
            }
        }
    }
    // Pochhammer prod_{l=1..k} (1 - y^{-1} q^{j+l}) as (s, q4) -> coeff.
    let mut poch: FxHashMap<(i64, i32), i128> = FxHashMap::default();
    poch.insert((0, 0), 1);
    for l in 1..=k {
        let mut next: FxHashMap<(i64, i32), i128> = FxHashMap::default();
        for (&(s, q), &c) in &poch {
            *next.entry((s, q)).or_default() += c;
            if s < s_max {
                *next.entry((s + 1, q + 4 * (j + l) as i32)).or_default() -= c;
            }
        }
        next.retain(|_, c| *c != 0);
        poch = next;
    }
    let g = gaussian_coeffs(i as usize, k as usize);
    let mut out = Poly::zero();
    for (&(s, qp), &cp) in &poch {
        let mut ys = [0i32; NV];
        ys[vy] = -4 * s as i32;
        let ms = Mono::new(qp, ys).expect("exponent range").mul(base);
        for (t, &cg) in g.iter().enumerate() {
            if cg == 0 {
                continue;
            }
            let mut mono = ms.mul(Mono::q_only(4 * t as i32));
            if inverted {
                mono = mono.inverse();
            }
            if single {
                let e = mono.x[vx] as i32;
                if cut.lo.is_some_and(|lo| e < lo) || cut.hi.is_some_and(|hi| e > hi) {
                    continue;
                }
            }
            out.add_term(mono, cp * cg).expect("entry coefficient overflow");
        }
    }
    out
}

/// Full list of `Ř`/`Ř⁻¹` outputs on one input pair as rational series, for
/// inspection and for the debug dump.
pub fn dump_entries(kind: CrossingKind, a: i64, b: i64) -> Result<Vec<REntry<MultiSeries>>> {
    let (family, left, right, names): (Family, u8, u8, Vec<&str>) = match (kind.weightspace, kind.colors) {
        (Weightspace::Highest, Colors::Single) => (Family::Hw, 0, 0, vec!["x"]),
        (Weightspace::Lowest, Colors::Single) => (Family::Lw, 0, 0, vec!["x"]),
        (Weightspace::Highest, Colors::Mixed) => (Family::Hw, 0, 1, vec!["x", "y"]),
        (Weightspace::Lowest, Colors::Mixed) => (Family::Lw, 1, 0, vec!["x", "y"]),
        (Weightspace::Finite { n, m }, _) => (Family::Finite, n as u8, m as u8, vec![]),
    };
    let spec = CrossingSpec { family, sign: kind.sign, left, right };
    Ok(crossing_outputs(spec, a as u16, b as u16, EntryCut::default())
        .iter()
        .map(|o| REntry {
            in_left: a,
            in_right: b,
            out_left: o.l as i64,
            out_right: o.r as i64,
            coeff: o.poly.to_multiseries(&names),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(t: &str) -> BiSeries {
        BiSeries::parse_text(t).unwrap()
    }

    #[test]
    fn hw_small_entries() {
        let e = entry_large_hw(0, 0, 0, Sign::Positive);
        assert_eq!((e.out_left, e.out_right), (0, 0));
        assert_eq!(e.coeff, s("q^(1/2)*x^(-1/2)"));
        let e = entry_large_hw(1, 0, 1, Sign::Positive);
        assert_eq!((e.out_left, e.out_right), (1, 0));
        assert_eq!(e.coeff, &s("x^(-1/2)*q^(1/2)") * &s("1 - x^(-1)*q"));
        let e = entry_large_hw(1, 0, 0, Sign::Positive);
        assert_eq!((e.out_left, e.out_right), (0, 1));
        assert_eq!(e.coeff, s("x^(-1)*q"));
    }

    #[test]
    fn lw_matches_hw_coefficients() {
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..=i {
                    let h = entry_large_hw(i, j, k, Sign::Positive);
                    let l = entry_large_lw(j, i, k, Sign::Positive);
                    assert_eq!(h.coeff, l.coeff);
                    assert_eq!((l.out_left, l.out_right), (i - k, j + k));
                }
            }
        }
    }

    #[test]
    fn sign_patterns_of_exponents() {
        for a in 0..4 {
            for b in 0..4 {
                for k in 0..4 {
                    let p = entry_large_hw(a, b, k, Sign::Positive).coeff;
                    assert!(p.terms().all(|(q, x, _)| q >= 0 && x < 0));
                    let n = entry_large_lw(a, b, k, Sign::Negative).coeff;
                    assert!(n.terms().all(|(q, x, _)| q <= 0 && x > 0));
                }
            }
        }
    }

    #[test]
    fn mixed_small_entries() {
        let e = entry_large_mixed(0, 0, 0, Sign::Positive, MixedOrder::Hw);
        assert_eq!(e.coeff.to_text(), "q^(1/2)*x^(-1/4)*y^(-1/4)");
        let e = entry_large_mixed(1, 0, 1, Sign::Positive, MixedOrder::Hw);
        // x^{-1/4}y^{-1/4} (1 - y^{-1} q) x^{-1/4} y^{1/4} q^{1/2}
        assert_eq!(e.coeff.to_text(), "-q^(3/2)*x^(-1/2)*y^(-1) + q^(1/2)*x^(-1/2)");
    }

    #[test]
    fn finite_small_entries() {
        let e = entry_finite(2, 2, 1, 1, 0, Sign::Positive);
        assert_eq!(e.coeff.to_text(), "q^(1/4)");
        let e = entry_finite(2, 2, -1, 1, 1, Sign::Positive);
        // (q^{1/2}-q^{-1/2}) q^{(-1 - (-2) - 2)/4}
        assert_eq!(e.coeff.to_text(), "-q^(-3/4) + q^(1/4)");
        assert_eq!((e.out_left, e.out_right), (-1, 1));
        assert!(entry_finite(2, 2, 1, 1, 1, Sign::Positive).coeff.is_zero());
    }
}
