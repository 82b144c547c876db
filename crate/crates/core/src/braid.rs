//! Braid words, their closures, and the Burau/Alexander classical limit.
//!
//! Letters are read bottom to top; `k > 0` is `σ_k`, `k < 0` is `σ_k^{-1}`.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::algebra::{BiSeries, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BraidWord {
    strands: usize,
    letters: Vec<i32>,
}

impl BraidWord {
    pub fn new(strands: usize, letters: Vec<i32>) -> Result<BraidWord> {
        if strands == 0 {
            return Err(Error::InvalidBraid("at least one strand is required".into()));
        }
        for &l in &letters {
            if l == 0 {
                return Err(Error::InvalidBraid("generator 0 does not exist".into()));
            }
            if l.unsigned_abs() as usize >= strands {
                return Err(Error::InvalidBraid(format!("generator {l} needs more than {strands} strands")));
            }
        }
        Ok(BraidWord { strands, letters })
    }

    /// Parses `"1,1,-2"`, `"1 1 -2"` or with powers `"1^3,-2^2"`.
    pub fn parse(text: &str, strands: usize) -> Result<BraidWord> {
        let mut letters = Vec::new();
        for tok in text.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
            let (g, p) = match tok.split_once('^') {
                Some((g, p)) => (g, p),
                None => (tok, "1"),
            };
            let g: i32 = g.parse().map_err(|_| Error::Parse(format!("bad braid letter {tok:?}")))?;
            let p: usize = p.parse().map_err(|_| Error::Parse(format!("bad power in {tok:?}")))?;
            if g == 0 {
                return Err(Error::Parse("braid letter 0 is not a generator".into()));
            }
            letters.extend(std::iter::repeat_n(g, p));
        }
        BraidWord::new(strands, letters).map_err(|e| match e {
            Error::InvalidBraid(m) => Error::Parse(m),
            e => e,
        })
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn writhe(&self) -> i32 {
        self.letters.iter().map(|l| l.signum()).sum()
    }

    pub fn is_positive(&self) -> bool {
        self.letters.iter().all(|&l| l > 0)
    }

    pub fn is_negative(&self) -> bool {
        self.letters.iter().all(|&l| l < 0)
    }

    /// `perm[p]` is the top position reached by the strand starting at bottom position `p`.
    pub fn permutation(&self) -> Vec<usize> {
        let mut at: Vec<usize> = (0..self.strands).collect(); // at[pos] = bottom label
        for &l in &self.letters {
            let p = l.unsigned_abs() as usize - 1;
            at.swap(p, p + 1);
        }
        let mut perm = vec![0; self.strands];
        for (pos, &label) in at.iter().enumerate() {
            perm[label] = pos;
        }
        perm
    }

    /// Positions of every strand label just before each letter (and at the top).
    pub(crate) fn label_history(&self) -> Vec<Vec<usize>> {
        let mut at: Vec<usize> = (0..self.strands).collect();
        let mut hist = vec![at.clone()];
        for &l in &self.letters {
            let p = l.unsigned_abs() as usize - 1;
            at.swap(p, p + 1);
            hist.push(at.clone());
        }
        hist
    }

    pub fn closure_info(&self) -> LinkClosure {
        let perm = self.permutation();
        let mut comp = vec![usize::MAX; self.strands];
        let mut components = 0;
        for s in 0..self.strands {
            if comp[s] != usize::MAX {
                continue;
            }
            let mut p = s;
            while comp[p] == usize::MAX {
                comp[p] = components;
                p = perm[p];
            }
            components += 1;
        }
        let mut twice = vec![vec![0i64; components]; components];
        let mut at: Vec<usize> = (0..self.strands).collect();
        for &l in &self.letters {
            let p = l.unsigned_abs() as usize - 1;
            let (a, b) = (comp[at[p]], comp[at[p + 1]]);
            if a != b {
                twice[a][b] += l.signum() as i64;
                twice[b][a] += l.signum() as i64;
            }
            at.swap(p, p + 1);
        }
        LinkClosure {
            components,
            component_of_strand: comp,
            pairwise_linking: twice.iter().map(|r| r.iter().map(|v| v / 2).collect()).collect(),
        }
    }

    pub fn is_knot(&self) -> bool {
        self.closure_info().components == 1
    }

    pub(crate) fn require_knot(&self) -> Result<()> {
        let c = self.closure_info().components;
        if c != 1 {
            return Err(Error::NotAKnot(c));
        }
        Ok(())
    }

    /// Cyclic rotation by `k` letters (a conjugate braid).
    pub fn rotate(&self, k: usize) -> BraidWord {
        let mut letters = self.letters.clone();
        if !letters.is_empty() {
            let k = k % letters.len();
            letters.rotate_left(k);
        }
        BraidWord { strands: self.strands, letters }
    }

    /// Markov stabilization: adds a strand and the letter `±σ_N`.
    pub fn stabilize(&self, positive: bool) -> BraidWord {
        let mut letters = self.letters.clone();
        let n = self.strands as i32;
        letters.push(if positive { n } else { -n });
        BraidWord { strands: self.strands + 1, letters }
    }

    /// Mirror image: every letter inverted.
    pub fn mirror(&self) -> BraidWord {
        BraidWord { strands: self.strands, letters: self.letters.iter().map(|l| -l).collect() }
    }

    pub fn to_text(&self) -> String {
        self.letters.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(",")
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] on {} strands", self.to_text(), self.strands)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinkClosure {
    pub components: usize,
    /// Component index of the strand starting at each bottom position.
    pub component_of_strand: Vec<usize>,
    pub pairwise_linking: Vec<Vec<i64>>,
}

impl LinkClosure {
    pub fn to_json(&self) -> Value {
        json!({
            "components": self.components,
            "component_of_strand": self.component_of_strand,
            "pairwise_linking": self.pairwise_linking,
        })
    }
}

/// Square matrix of Laurent polynomials in `x^{1/2}`.
pub type BurauMatrix = Vec<Vec<BiSeries>>;

fn xmono(x2: i32, c: i64) -> BiSeries {
    BiSeries::int_monomial(0, x2, c)
}

fn identity(n: usize) -> BurauMatrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { BiSeries::one() } else { BiSeries::zero() }).collect()).collect()
}

/// Burau matrix of one letter: the `2×2` block at positions `(|l|-1, |l|)`.
pub fn burau_letter(strands: usize, letter: i32) -> BurauMatrix {
    let mut m = identity(strands);
    let p = letter.unsigned_abs() as usize - 1;
    let block = if letter > 0 {
        // [[1 - x^{-1}, x^{-1/2}], [x^{-1/2}, 0]]
        [[&xmono(0, 1) - &xmono(-2, 1), xmono(-1, 1)], [xmono(-1, 1), BiSeries::zero()]]
    } else {
        // exact inverse: [[0, x^{1/2}], [x^{1/2}, 1 - x]]
        [[BiSeries::zero(), xmono(1, 1)], [xmono(1, 1), &xmono(0, 1) - &xmono(2, 1)]]
    };
    for r in 0..2 {
        for c in 0..2 {
            m[p + r][p + c] = block[r][c].clone();
        }
    }
    m
}

pub fn mat_mul(a: &BurauMatrix, b: &BurauMatrix) -> BurauMatrix {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).fold(BiSeries::zero(), |acc, k| &acc + &(&a[i][k] * &b[k][j])))
                .collect()
        })
        .collect()
}

/// Burau matrix of the word, letters applied bottom to top (`M_L ⋯ M_1`).
pub fn burau(b: &BraidWord) -> BurauMatrix {
    let mut m = identity(b.strands);
    for &l in &b.letters {
        m = mat_mul(&burau_letter(b.strands, l), &m);
    }
    m
}

/// Determinant by expansion along rows with memoization over column subsets.
pub fn determinant(m: &[Vec<BiSeries>]) -> BiSeries {
    let n = m.len();
    if n == 0 {
        return BiSeries::one();
    }
    let mut memo: Vec<Option<BiSeries>> = vec![None; 1 << n];
    fn rec(m: &[Vec<BiSeries>], row: usize, used: usize, memo: &mut Vec<Option<BiSeries>>) -> BiSeries {
        let n = m.len();
        if row == n {
            return BiSeries::one();
        }
        if let Some(v) = &memo[used] {
            return v.clone();
        }
        let mut acc = BiSeries::zero();
        let mut sign = 1i64;
        for c in 0..n {
            if used & (1 << c) != 0 {
                continue;
            }
            if !m[row][c].is_zero() {
                let minor = rec(m, row + 1, used | (1 << c), memo);
                let t = &m[row][c] * &minor;
                acc = if sign > 0 { &acc + &t } else { &acc - &t };
            }
            sign = -sign;
        }
        memo[used] = Some(acc.clone());
        acc
    }
    rec(m, 0, 0, &mut memo)
}

/// `x^{(N-1-w)/2} [y^k] det(I - y β̃')^{-1}` for `k ≤ max_weight`: the `q = 1` value of
/// the weight-`k` stratum of the highest-weight reduced trace.
pub fn burau_strata(b: &BraidWord, max_weight: usize) -> Vec<BiSeries> {
    let n = b.strands;
    let m = burau(b);
    // y rides on the q slot while expanding the determinant
    let sub: Vec<Vec<BiSeries>> = (1..n)
        .map(|i| {
            (1..n)
                .map(|j| {
                    let e = m[i][j].shift(2, 0);
                    if i == j {
                        &BiSeries::one() - &e
                    } else {
                        -&e
                    }
                })
                .collect()
        })
        .collect();
    let d = determinant(&sub);
    let slice = |k: usize| {
        BiSeries::from_terms(d.terms().filter(|t| t.0 == 2 * k as i32).map(|(_, x, c)| (0, x, c.clone())))
    };
    let ds: Vec<BiSeries> = (0..n).map(slice).collect();
    let mut inv: Vec<BiSeries> = vec![BiSeries::one()];
    for k in 1..=max_weight {
        let acc = (1..=k.min(n - 1)).fold(BiSeries::zero(), |acc, j| &acc - &(&ds[j] * &inv[k - j]));
        inv.push(acc);
    }
    let shift = n as i32 - 1 - b.writhe();
    inv.iter().map(|s| s.shift(0, shift)).collect()
}

/// Alexander polynomial `x^{-(N-1-w)/2} det(I - β̃')`, sign-normalized so `Δ(1) = 1`.
pub fn alexander(b: &BraidWord) -> Result<BiSeries> {
    b.require_knot()?;
    let n = b.strands;
    let m = burau(b);
    let sub: Vec<Vec<BiSeries>> = (1..n)
        .map(|i| (1..n).map(|j| if i == j { &BiSeries::one() - &m[i][j] } else { -&m[i][j] }).collect())
        .collect();
    let d = determinant(&sub);
    let shift = -((n as i32 - 1) - b.writhe());
    let d = d.shift(0, shift);
    let at_one = d.sum_coeffs();
    if at_one.is_zero() {
        return Err(Error::InvalidArgument("Alexander polynomial vanishes at 1".into()));
    }
    Ok(if at_one.is_negative() { -d } else { d })
}

/// Power-series expansion of `(x^{1/2} - x^{-1/2}) / Δ(x)` in `x^{-1}` (the classical
/// limit of `F^-`), through `x^{-(order + 1/2)}`.
pub fn classical_fminus(delta: &BiSeries, order: i32) -> BiSeries {
    // Δ is symmetric: Δ = x^{d} (c_0 + c_1 x^{-1} + ...). Invert the series in x^{-1}.
    let top = delta.max_x2().unwrap_or(0);
    let coeffs: Vec<Rational> = (0..=(top - delta.min_x2().unwrap_or(0)) / 2)
        .map(|t| delta.coeff(0, top - 2 * t))
        .collect();
    let inv = invert_series(&coeffs, order as usize + 2);
    // 1/Δ = x^{-top/2} Σ inv_t x^{-t}
    let mut s = BiSeries::zero();
    for (t, c) in inv.iter().enumerate() {
        s.add_term(0, -top - 2 * t as i32, c.clone());
    }
    let f = &BiSeries::from_terms([(0, 1, Rational::one()), (0, -1, -Rational::one())]) * &s;
    f.with_window(crate::algebra::Window::at_least(-2 * order - 1))
}

/// Like [`classical_fminus`], expanded in positive powers of `x` (the classical `F^+`).
pub fn classical_fplus(delta: &BiSeries, order: i32) -> BiSeries {
    classical_fminus(delta, order)
        .substitute(crate::algebra::Substitution::XInv)
        .expect("x inversion is total")
        .scalar_mul(&-Rational::one())
}

/// First `len` coefficients of `1 / Σ c_t z^t`.
pub(crate) fn invert_series(c: &[Rational], len: usize) -> Vec<Rational> {
    let mut inv = vec![Rational::zero(); len];
    if c.is_empty() || c[0].is_zero() {
        return inv;
    }
    inv[0] = Rational::one() / &c[0];
    for t in 1..len {
        let mut acc = Rational::zero();
        for s in 1..=t.min(c.len() - 1) {
            acc += &c[s] * &inv[t - s];
        }
        inv[t] = -acc / &c[0];
    }
    inv
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_words() {
        assert_eq!(BraidWord::parse("1^3", 2).unwrap().letters(), &[1, 1, 1]);
        assert_eq!(BraidWord::parse("1,1,1,1,2,1,1,1,2,2", 3).unwrap().len(), 10);
        assert!(BraidWord::parse("0", 2).is_err());
        assert!(BraidWord::parse("3", 3).is_err());
        assert!(BraidWord::parse("1,x", 3).is_err());
        assert_eq!(BraidWord::parse("1 -2^2", 3).unwrap().letters(), &[1, -2, -2]);
    }

    #[test]
    fn closures() {
        assert_eq!(BraidWord::new(1, vec![]).unwrap().closure_info().components, 1);
        let hopf = BraidWord::parse("1,1", 2).unwrap().closure_info();
        assert_eq!(hopf.components, 2);
        assert_eq!(hopf.pairwise_linking[0][1], 1);
        assert_eq!(BraidWord::parse("1,1,1", 2).unwrap().closure_info().components, 1);
    }

    #[test]
    fn burau_generator_block() {
        let b = BraidWord::parse("1", 2).unwrap();
        let m = burau(&b);
        assert_eq!(m[0][0].to_text(), "-x^(-1) + 1");
        assert_eq!(m[0][1].to_text(), "x^(-1/2)");
        assert!(m[1][1].is_zero());
        let id = burau(&BraidWord::parse("1,-1", 2).unwrap());
        assert_eq!(id, identity(2));
    }

    #[test]
    fn trefoil_alexander() {
        let d = alexander(&BraidWord::parse("1,1,1", 2).unwrap()).unwrap();
        assert_eq!(d.to_text(), "x^(-1) - 1 + x");
        let u = alexander(&BraidWord::new(1, vec![]).unwrap()).unwrap();
        assert_eq!(u, BiSeries::one());
    }

    #[test]
    fn series_inverse() {
        let c = vec![Rational::one(), -Rational::one()];
        let inv = invert_series(&c, 5);
        assert!(inv.iter().all(|v| v.is_one()));
    }
}
