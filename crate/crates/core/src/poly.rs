//! Integer Laurent polynomials used inside the state-sum hot loops.
//!
//! Exponents are in quarter units for `q` and for up to [`NV`] `x`-variables;
//! coefficients are `i128` with checked arithmetic (overflow is reported, never
//! wrapped). Conversion to the public rational series types happens once at the end.

use num_bigint::BigInt;
use rustc_hash::FxHashMap;

use crate::algebra::{BiSeries, MultiSeries, Rational};
use crate::error::{Error, Result};

pub(crate) const NV: usize = 4;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub(crate) struct Mono {
    pub q: i32,
    pub x: [i16; NV],
}

impl Mono {
    pub fn new(q4: i32, x4: [i32; NV]) -> Result<Mono> {
        let mut x = [0i16; NV];
        for (d, s) in x.iter_mut().zip(x4) {
            *d = i16::try_from(s).map_err(|_| Error::Overflow)?;
        }
        Ok(Mono { q: q4, x })
    }

    pub fn q_only(q4: i32) -> Mono {
        Mono { q: q4, x: [0; NV] }
    }

    /// `x_v^{e4/4}` times `q^{q4/4}`.
    pub fn var(v: usize, e4: i32, q4: i32) -> Mono {
        let mut x = [0i16; NV];
        x[v] = e4 as i16;
        Mono { q: q4, x }
    }

    #[inline]
    pub fn mul(self, o: Mono) -> Mono {
        let mut x = self.x;
        for (a, b) in x.iter_mut().zip(o.x) {
            *a += b;
        }
        Mono { q: self.q + o.q, x }
    }

    pub fn inverse(self) -> Mono {
        let mut x = self.x;
        for a in x.iter_mut() {
            *a = -*a;
        }
        Mono { q: -self.q, x }
    }
}

/// Extreme exponents of a polynomial, used for pruning bounds.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub(crate) struct Extent {
    pub min_q: i32,
    pub min_x: [i32; NV],
    pub max_x: [i32; NV],
}

impl Extent {
    pub fn of_mono(m: Mono) -> Extent {
        let x = m.x.map(|e| e as i32);
        Extent { min_q: m.q, min_x: x, max_x: x }
    }

    /// Bound for a product: minima and maxima add.
    pub fn plus(&self, o: &Extent) -> Extent {
        let mut e = *self;
        e.min_q += o.min_q;
        for v in 0..NV {
            e.min_x[v] += o.min_x[v];
            e.max_x[v] += o.max_x[v];
        }
        e
    }

    /// Bound for a sum: componentwise hull.
    pub fn hull(&self, o: &Extent) -> Extent {
        let mut e = *self;
        e.min_q = e.min_q.min(o.min_q);
        for v in 0..NV {
            e.min_x[v] = e.min_x[v].min(o.min_x[v]);
            e.max_x[v] = e.max_x[v].max(o.max_x[v]);
        }
        e
    }
}

/// Region outside which terms are dropped: `q4 < q_max` and `x4` in `[x_lo, x_hi]`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Default)]
pub(crate) struct Cut {
    pub q_max: Option<i32>,
    pub x_lo: [Option<i32>; NV],
    pub x_hi: [Option<i32>; NV],
}

impl Cut {
    pub const NONE: Cut = Cut { q_max: None, x_lo: [None; NV], x_hi: [None; NV] };

    /// Whether a term at `m`, later multiplied by something within `rest`, can land
    /// inside the cut.
    #[inline]
    pub fn admits(&self, m: Mono, rest: &Extent) -> bool {
        if let Some(qm) = self.q_max {
            if m.q + rest.min_q >= qm {
                return false;
            }
        }
        for v in 0..NV {
            let e = m.x[v] as i32;
            if let Some(lo) = self.x_lo[v] {
                if e + rest.max_x[v] < lo {
                    return false;
                }
            }
            if let Some(hi) = self.x_hi[v] {
                if e + rest.min_x[v] > hi {
                    return false;
                }
            }
        }
        true
    }

    /// Whether anything within `ext` can land inside the cut.
    pub fn admits_extent(&self, ext: &Extent) -> bool {
        if self.q_max.is_some_and(|qm| ext.min_q >= qm) {
            return false;
        }
        (0..NV).all(|v| {
            self.x_lo[v].is_none_or(|lo| ext.max_x[v] >= lo) && self.x_hi[v].is_none_or(|hi| ext.min_x[v] <= hi)
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub(crate) struct Poly {
    pub terms: FxHashMap<Mono, i128>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly::default()
    }

    pub fn mono(m: Mono, c: i128) -> Poly {
        let mut p = Poly::zero();
        if c != 0 {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn one() -> Poly {
        Poly::mono(Mono::default(), 1)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn add_term(&mut self, m: Mono, c: i128) -> Result<()> {
        if c == 0 {
            return Ok(());
        }
        use std::collections::hash_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let v = e.get().checked_add(c).ok_or(Error::Overflow)?;
                if v == 0 {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
        Ok(())
    }

    pub fn add_assign(&mut self, o: &Poly) -> Result<()> {
        for (&m, &c) in &o.terms {
            self.add_term(m, c)?;
        }
        Ok(())
    }

    #[cfg(test)]
    pub fn mul(&self, o: &Poly) -> Result<Poly> {
        let mut out = Poly::zero();
        out.add_mul(self, o, |_| true)?;
        Ok(out)
    }

    /// `self += a * b`, keeping only products accepted by `keep`.
    #[inline]
    pub fn add_mul(&mut self, a: &Poly, b: &Poly, keep: impl Fn(Mono) -> bool) -> Result<()> {
        for (&ma, &ca) in &a.terms {
            for (&mb, &cb) in &b.terms {
                let m = ma.mul(mb);
                if !keep(m) {
                    continue;
                }
                self.add_term(m, ca.checked_mul(cb).ok_or(Error::Overflow)?)?;
            }
        }
        Ok(())
    }

    pub fn scale_mono(&self, m: Mono) -> Poly {
        Poly { terms: self.terms.iter().map(|(&k, &c)| (k.mul(m), c)).collect() }
    }

    pub fn negated(&self) -> Poly {
        Poly { terms: self.terms.iter().map(|(&k, &c)| (k, -c)).collect() }
    }

    /// Replaces every exponent by its negative (`x -> 1/x`, `q -> 1/q` for all variables).
    pub fn invert_exponents(&self) -> Poly {
        Poly { terms: self.terms.iter().map(|(&k, &c)| (k.inverse(), c)).collect() }
    }

    pub fn extent(&self) -> Option<Extent> {
        let mut it = self.terms.keys();
        let first = Extent::of_mono(*it.next()?);
        Some(it.fold(first, |e, &m| e.hull(&Extent::of_mono(m))))
    }

    /// Sorted term list (deterministic order for comparisons and output).
    pub fn sorted(&self) -> Vec<(Mono, i128)> {
        let mut v: Vec<(Mono, i128)> = self.terms.iter().map(|(&m, &c)| (m, c)).collect();
        v.sort();
        v
    }

    /// One-variable conversion: variable `v` becomes `x`, exponents must be halves.
    pub fn to_biseries(&self, v: usize) -> Result<BiSeries> {
        let mut out = BiSeries::zero();
        for (m, c) in self.sorted() {
            let x4 = m.x[v] as i32;
            if m.q % 2 != 0 || x4 % 2 != 0 || m.x.iter().enumerate().any(|(u, &e)| u != v && e != 0) {
                return Err(Error::InvalidArgument("engine exponent outside (1/2)Z".into()));
            }
            out.add_term(m.q / 2, x4 / 2, Rational::from_integer(BigInt::from(c)));
        }
        Ok(out)
    }

    pub fn to_multiseries(&self, names: &[&str]) -> MultiSeries {
        let mut out = MultiSeries::zero(names);
        for (m, c) in self.sorted() {
            let x: Vec<i32> = m.x[..names.len()].iter().map(|&e| e as i32).collect();
            out.add_term(m.q, &x, Rational::from_integer(BigInt::from(c)));
        }
        out
    }

    /// From a one-variable series with integer coefficients (variable index `v`).
    pub fn from_biseries(s: &BiSeries, v: usize) -> Result<Poly> {
        let mut p = Poly::zero();
        for (q2, x2, c) in s.terms() {
            if !c.is_integer() {
                return Err(Error::InvalidArgument("non-integer coefficient".into()));
            }
            let c: i128 = c.to_integer().try_into().map_err(|_| Error::Overflow)?;
            let mut x4 = [0; NV];
            x4[v] = 2 * x2;
            p.add_term(Mono::new(2 * q2, x4)?, c)?;
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_cancellation() {
        let a = {
            let mut p = Poly::one();
            p.add_term(Mono::var(0, -4, 4), -1).unwrap();
            p
        };
        let b = {
            let mut p = Poly::one();
            p.add_term(Mono::var(0, -4, 4), 1).unwrap();
            p
        };
        let c = a.mul(&b).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.terms[&Mono::var(0, -8, 8)], -1);
    }

    #[test]
    fn overflow_is_reported() {
        let big = Poly::mono(Mono::default(), i128::MAX / 2 + 1);
        assert_eq!(big.mul(&Poly::mono(Mono::default(), 2)), Err(Error::Overflow));
    }

    #[test]
    fn cut_uses_future_extent() {
        let cut = Cut { q_max: Some(10), ..Cut::NONE };
        let rest = Extent { min_q: 4, min_x: [0; NV], max_x: [0; NV] };
        assert!(cut.admits(Mono::q_only(5), &rest));
        assert!(!cut.admits(Mono::q_only(6), &rest));
    }
}
