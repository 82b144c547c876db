//! Closed-form oracles: tree links, the nested q-hypergeometric sums for positive
//! double twist knots, and the first two coefficients of `F^+` for `m(5_2)`.

use rayon::prelude::*;
use rustc_hash::FxHashMap;

use crate::algebra::{gaussian_coeffs, rat, BiSeries, MultiSeries, Rational, Window};
use crate::error::{Error, Result};

/// A tree; vertex `v` becomes an unknotted component with variable `x_v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeGraph {
    vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl TreeGraph {
    pub fn new(vertices: usize, edges: Vec<(usize, usize)>) -> Result<TreeGraph> {
        if vertices == 0 || edges.len() + 1 != vertices {
            return Err(Error::InvalidArgument("a tree on n vertices has n-1 edges".into()));
        }
        let mut root: Vec<usize> = (0..vertices).collect();
        fn find(r: &mut [usize], v: usize) -> usize {
            let mut v = v;
            while r[v] != v {
                r[v] = r[r[v]];
                v = r[v];
            }
            v
        }
        for &(a, b) in &edges {
            if a >= vertices || b >= vertices {
                return Err(Error::InvalidArgument(format!("edge ({a}, {b}) out of range")));
            }
            let (ra, rb) = (find(&mut root, a), find(&mut root, b));
            if ra == rb {
                return Err(Error::InvalidArgument("graph has a cycle".into()));
            }
            root[ra] = rb;
        }
        Ok(TreeGraph { vertices, edges })
    }

    /// Star with center 0 and `leaves` outer vertices.
    pub fn star(leaves: usize) -> TreeGraph {
        TreeGraph { vertices: leaves + 1, edges: (1..=leaves).map(|v| (0, v)).collect() }
    }

    /// Parses `0-1,0-2,...`.
    pub fn parse(text: &str) -> Result<TreeGraph> {
        let mut edges = Vec::new();
        let mut n = 1;
        for tok in text.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
            let (a, b) = tok.split_once('-').ok_or_else(|| Error::Parse(format!("bad edge '{tok}'")))?;
            let a: usize = a.trim().parse().map_err(|_| Error::Parse(format!("bad vertex '{a}'")))?;
            let b: usize = b.trim().parse().map_err(|_| Error::Parse(format!("bad vertex '{b}'")))?;
            n = n.max(a + 1).max(b + 1);
            edges.push((a, b));
        }
        TreeGraph::new(n, edges)
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }
}

/// `Π_v (x_v^{1/2} - x_v^{-1/2})^{1 - deg v}`, negative powers expanded in positive
/// powers of `x_v` through `x_v^{orders[v]}` beyond the leading term.
pub fn tree_link_fk(t: &TreeGraph, orders: &[i32]) -> Result<MultiSeries> {
    if orders.len() != t.vertices {
        return Err(Error::InvalidArgument("one order per vertex is required".into()));
    }
    let names: Vec<String> = (0..t.vertices).map(|v| format!("x{v}")).collect();
    let names: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let nv = t.vertices;
    let mut acc = MultiSeries::one(&names);
    for v in 0..nv {
        let e = 1 - t.degree(v) as i32;
        let mut f = MultiSeries::zero(&names);
        let mut x = vec![0; nv];
        if e >= 0 {
            for k in 0..=e {
                // (x^{1/2} - x^{-1/2})^e = Σ_k C(e,k) (-1)^k x^{(e-2k)/2}
                x[v] = 2 * (e - 2 * k);
                f.add_term(0, &x, rat(binom(e as i64, k as i64) * if k % 2 == 0 { 1 } else { -1 }));
            }
        } else {
            // (-1)^d x^{d/2} Σ_k C(k+d-1, d-1) x^k
            let d = -e;
            let sign = if d % 2 == 0 { 1 } else { -1 };
            for k in 0..=orders[v].max(0) {
                x[v] = 2 * d + 4 * k;
                f.add_term(0, &x, rat(sign * binom((k + d - 1) as i64, (d - 1) as i64)));
            }
            let mut w = vec![Window::FULL; nv];
            w[v] = Window::at_most(2 * d + 4 * orders[v].max(0));
            f = f.with_windows(&w);
        }
        acc = acc.mul(&f);
    }
    Ok(acc)
}

fn binom(n: i64, k: i64) -> i64 {
    if k < 0 || k > n {
        return 0;
    }
    (0..k).fold(1i64, |a, i| a * (n - i) / (i + 1))
}

/// Positive double twist knots.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum DoubleTwistSpec {
    /// `K_{m,p}` with `m, p ≥ 1` full twists.
    Full { m: u32, p: u32 },
    /// `K_{m+1/2,-p}` with `m, p ≥ 1`.
    Half { m: u32, p: u32 },
}

/// `(x, q)` polynomial with integer coefficients used while summing.
type XQ = FxHashMap<(i32, i32), i128>;

fn xq_mul(a: &XQ, b: &XQ, x_max: i32) -> Result<XQ> {
    let mut out: XQ = FxHashMap::default();
    for (&(xa, qa), &ca) in a {
        for (&(xb, qb), &cb) in b {
            if xa + xb > x_max {
                continue;
            }
            let c = ca.checked_mul(cb).ok_or(Error::Overflow)?;
            let e = out.entry((xa + xb, qa + qb)).or_default();
            *e = e.checked_add(c).ok_or(Error::Overflow)?;
        }
    }
    out.retain(|_, c| *c != 0);
    Ok(out)
}

/// Gaussian binomial in base `q^{-1}`: exponents `0, -1, …, -k(n-k)`.
fn qbin_inv(n: i32, k: i32) -> XQ {
    let mut out = FxHashMap::default();
    if k < 0 || k > n {
        return out;
    }
    for (t, &c) in gaussian_coeffs(n as usize, k as usize).iter().enumerate() {
        if c != 0 {
            out.insert((0, -(t as i32)), c);
        }
    }
    out
}

/// `Π_{l=0}^{n-1} (1 - x q^{-1-l})` truncated to `x ≤ x_max`.
fn poch_inv(n: i32, x_max: i32) -> Result<XQ> {
    let mut p: XQ = FxHashMap::default();
    p.insert((0, 0), 1);
    for l in 0..n {
        let mut f: XQ = FxHashMap::default();
        f.insert((0, 0), 1);
        f.insert((1, -1 - l), -1);
        p = xq_mul(&p, &f, x_max)?;
    }
    Ok(p)
}

struct Summand {
    sign: i32,
    x: i32,
    q: i32,
    qbins: Vec<(i32, i32)>,
    poch: i32,
}

impl DoubleTwistSpec {
    fn validate(&self) -> Result<()> {
        let (Self::Full { m, p } | Self::Half { m, p }) = *self;
        if m == 0 || p == 0 {
            return Err(Error::InvalidArgument("double twist parameters must be positive".into()));
        }
        Ok(())
    }

    fn depth(&self) -> usize {
        match *self {
            Self::Full { m, p } => (2 * m * p - 1) as usize,
            Self::Half { m, p } => ((2 * m + 1) * p) as usize,
        }
    }

    /// Monomial part, sign and factor list of the summand at `n[1..=L]` (`n[0]` unused).
    fn summand(&self, n: &[i32]) -> Summand {
        let l = n.len() - 1;
        let nl = n[l];
        let mut s = Summand { sign: if nl % 2 == 0 { 1 } else { -1 }, x: 0, q: nl * (nl + 1) / 2, qbins: vec![], poch: nl };
        match *self {
            Self::Full { m, p } => {
                let (m, p) = (m as i32, p as i32);
                let md = 2 * m;
                let eps = |i: i32, j: i32| {
                    let r = j.rem_euclid(md);
                    if r == (-i).rem_euclid(md) || r == (-i - 1).rem_euclid(md) {
                        1
                    } else if r == i.rem_euclid(md) || r == (i - 1).rem_euclid(md) {
                        -1
                    } else {
                        0
                    }
                };
                let gam = |i: i32| if (1..m).contains(&i.rem_euclid(md)) { 1 } else { -1 };
                s.x += 1;
                s.q -= 1;
                for i in 1..=l as i32 {
                    if i % m == 0 {
                        continue;
                    }
                    for j in i + 1..=l as i32 {
                        s.q -= eps(i, j) * n[i as usize] * n[j as usize];
                    }
                }
                for i in 1..2 * p {
                    let v = n[(m * i) as usize];
                    if v % 2 != 0 {
                        s.sign = -s.sign;
                    }
                    s.x += if i % 2 == 1 { v } else { -v };
                    s.q -= v * (v + 1) / 2;
                }
                for i in 1..l {
                    s.q += n[i] * n[i + 1] - gam(i as i32) * n[i];
                    s.qbins.push((n[i + 1], n[i]));
                }
            }
            Self::Half { m, .. } => {
                let md = 2 * m as i32 + 1;
                let m = m as i32;
                let delta = |i: i32, j: i32| {
                    let r = j.rem_euclid(md);
                    if r == (-i).rem_euclid(md) || r == (-i + 1).rem_euclid(md) {
                        1
                    } else if r == i.rem_euclid(md) || r == (i + 1).rem_euclid(md) {
                        -1
                    } else {
                        0
                    }
                };
                let beta = |i: i32| {
                    let r = i.rem_euclid(md);
                    if (1..=m).contains(&r) {
                        1
                    } else if r == 0 {
                        0
                    } else {
                        -1
                    }
                };
                let p = (l as i32) / md;
                s.x += p;
                s.q -= p;
                for i in 1..=l as i32 {
                    if i % md == 0 {
                        continue;
                    }
                    for j in i + 1..=l as i32 {
                        if j.rem_euclid(md) == (m + 1).rem_euclid(md) {
                            continue;
                        }
                        s.q -= delta(i, j) * n[i as usize] * n[j as usize];
                    }
                }
                for i in 1..l {
                    let r = (i as i32).rem_euclid(md);
                    if r == (m + 1).rem_euclid(md) || r == 0 {
                        let v = n[i];
                        if v % 2 != 0 {
                            s.sign = -s.sign;
                        }
                        s.x += v;
                        s.q -= v * (v + 1) / 2;
                    }
                }
                for i in 1..l {
                    s.q -= beta(i as i32) * n[i];
                    s.qbins.push((n[i + 1], n[i]));
                }
            }
        }
        s
    }
}

/// Sum of all summands with outermost index `n_L = top`, restricted to `x ≤ x_max`
/// and `q ≤ q_max` (integer exponents).
fn layer(spec: &DoubleTwistSpec, top: i32, x_max: i32, q_max: i32) -> Result<XQ> {
    let l = spec.depth();
    let mut tuples: Vec<Vec<i32>> = Vec::new();
    let mut cur = vec![0i32; l + 1];
    cur[l] = top;
    fn rec(i: usize, cur: &mut Vec<i32>, out: &mut Vec<Vec<i32>>) {
        if i == 0 {
            out.push(cur.clone());
            return;
        }
        for v in 0..=cur[i + 1] {
            cur[i] = v;
            rec(i - 1, cur, out);
        }
    }
    if l >= 2 {
        rec(l - 1, &mut cur, &mut tuples);
    } else {
        tuples.push(cur);
    }
    let parts: Vec<XQ> = tuples
        .par_iter()
        .map(|n| -> Result<XQ> {
            let s = spec.summand(n);
            // Lowest q any term of this summand can reach inside the x-window.
            let k_max = (x_max - s.x).min(s.poch);
            if k_max < 0 {
                return Ok(FxHashMap::default());
            }
            let poch_low: i32 = (0..k_max).map(|t| s.poch - t).sum();
            let bins_low: i32 = s.qbins.iter().map(|&(a, b)| b * (a - b)).sum();
            if s.q - poch_low - bins_low > q_max {
                return Ok(FxHashMap::default());
            }
            let mut acc: XQ = FxHashMap::default();
            acc.insert((s.x, s.q), s.sign as i128);
            for &(a, b) in &s.qbins {
                acc = xq_mul(&acc, &qbin_inv(a, b), x_max)?;
            }
            acc = xq_mul(&acc, &poch_inv(s.poch, x_max - s.x)?, x_max)?;
            acc.retain(|&(_, q), _| q <= q_max);
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let mut out: XQ = FxHashMap::default();
    for p in parts {
        for (k, c) in p {
            let e = out.entry(k).or_default();
            *e = e.checked_add(c).ok_or(Error::Overflow)?;
        }
    }
    out.retain(|_, c| *c != 0);
    Ok(out)
}

/// `F^+` of a positive double twist knot from the nested sums, on `x`-exponents up to
/// `x_order + 1/2` and `q`-exponents up to `q_order`.
///
/// The outer index is summed layer by layer until `stable_layers` consecutive layers
/// add nothing inside the window. Returns the series and the number of layers used.
pub fn lovejoy_osburn_fk(spec: DoubleTwistSpec, x_order: i32, q_order: i32) -> Result<(BiSeries, usize)> {
    lovejoy_osburn_fk_with(spec, x_order, q_order, 3, 200)
}

pub fn lovejoy_osburn_fk_with(
    spec: DoubleTwistSpec,
    x_order: i32,
    q_order: i32,
    stable_layers: usize,
    max_layers: usize,
) -> Result<(BiSeries, usize)> {
    spec.validate()?;
    let x_max = x_order + 1;
    let mut g: XQ = FxHashMap::default();
    let mut quiet = 0;
    let mut used = 0;
    for top in 0..max_layers as i32 {
        let part = layer(&spec, top, x_max, q_order)?;
        used = top as usize + 1;
        if part.is_empty() {
            quiet += 1;
            if quiet >= stable_layers {
                break;
            }
            continue;
        }
        quiet = 0;
        for (k, c) in part {
            *g.entry(k).or_default() += c;
        }
        if used == max_layers {
            return Err(Error::NoStabilization { strata: max_layers, detail: "nested sum still changing".into() });
        }
    }
    let mut gs = BiSeries::zero();
    for ((x, q), c) in g {
        gs.add_term(2 * q, 2 * x, Rational::from_integer(c.into()));
    }
    let gs = gs.with_validity(Window::at_most(2 * x_max), Some(2 * q_order + 1));
    let f = &BiSeries::from_terms([(0, 1, rat(1)), (0, -1, rat(-1))]) * &gs;
    Ok((f, used))
}

/// `f_0` and `f_1` of `F^+_{m(5_2)}` from their closed forms, through `q^{q_order}`.
pub fn mseries_f0_f1(q_order: i32) -> (BiSeries, BiSeries) {
    let mut f0 = BiSeries::zero();
    let mut f1 = BiSeries::zero();
    let mut j = 0;
    while j * (j + 1) / 2 - 1 <= q_order {
        let sign = if j % 2 == 0 { -1 } else { 1 };
        let e = j * (j + 1) / 2 - 1;
        f0.add_term(2 * e, 0, rat(sign));
        for t in 0..=j {
            f1.add_term(2 * (e + t), 0, rat(sign));
        }
        j += 1;
    }
    let v = 2 * q_order + 1;
    (f0.with_q_valid(v), f1.with_q_valid(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_small_cases() {
        let one = tree_link_fk(&TreeGraph::new(1, vec![]).unwrap(), &[3]).unwrap();
        assert_eq!(one.to_text(), "-x0^(-1/2) + x0^(1/2)");
        let path = tree_link_fk(&TreeGraph::new(2, vec![(0, 1)]).unwrap(), &[3, 3]).unwrap();
        assert_eq!(path.to_text(), "1");
        assert!(TreeGraph::new(3, vec![(0, 1), (1, 0)]).is_err());
    }

    #[test]
    fn m52_closed_forms() {
        let (f0, f1) = mseries_f0_f1(28);
        assert_eq!(f0.to_text(), "-q^(-1) + 1 - q^2 + q^5 - q^9 + q^14 - q^20 + q^27");
        let (_, f1s) = mseries_f0_f1(8);
        assert_eq!(f1s.to_text(), "-q^(-1) + 1 + q - q^2 - q^3 - q^4 + q^5 + q^6 + q^7 + q^8");
        assert_eq!(f1.q_valid2(), Some(57));
    }
}
