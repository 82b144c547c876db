//! Braid words and published series used as fixtures.
//!
//! Series are stored in the canonical text form. A `q_order` of `Some(k)` means the
//! printed series is followed by `O(q^k)`; `None` means the printed value is exact.

use crate::algebra::{BiSeries, Window};
use crate::braid::BraidWord;
use crate::error::Result;
use crate::jones::{AnnihilatorOp, YhatConvention};
use crate::statesum::Module;

/// One printed coefficient `f_m(q)` of `F^+ = x^{1/2} Σ f_m x^m`.
#[derive(Clone, Copy, Debug)]
pub struct PrintedCoeff {
    pub m: i32,
    pub text: &'static str,
    pub q_order: Option<i32>,
}

impl PrintedCoeff {
    pub fn series(&self) -> Result<BiSeries> {
        let s = BiSeries::parse_text(self.text)?;
        Ok(match self.q_order {
            Some(k) => s.with_q_valid(2 * k),
            None => s,
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub enum Printed {
    /// The full `F^-` window: every term with `x2 ≥ min_x2` (exact coefficients).
    Window { text: &'static str, min_x2: i32 },
    /// Leading `F^+` coefficients.
    Coeffs(&'static [PrintedCoeff]),
}

#[derive(Clone, Copy, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub strands: usize,
    pub word: &'static str,
    pub module: Module,
    pub printed: Printed,
}

impl Fixture {
    pub fn braid(&self) -> Result<BraidWord> {
        BraidWord::parse(self.word, self.strands)
    }

    /// The printed window as a series with its validity region.
    pub fn window(&self) -> Option<Result<BiSeries>> {
        match self.printed {
            Printed::Window { text, min_x2 } => {
                Some(BiSeries::parse_text(text).map(|s| s.with_window(Window::at_least(min_x2))))
            }
            Printed::Coeffs(_) => None,
        }
    }
}

const fn c(m: i32, text: &'static str, q_order: Option<i32>) -> PrintedCoeff {
    PrintedCoeff { m, text, q_order }
}

pub const TEN_139: Fixture = Fixture {
    name: "10_139",
    strands: 3,
    word: "1,1,1,1,2,1,1,1,2,2",
    module: Module::Hw,
    printed: Printed::Window {
        text: "q^4*x^(-7/2) - 2*q^6*x^(-13/2) + q^7*x^(-15/2) - q^8*x^(-17/2) + 2*q^9*x^(-19/2) + q^10*x^(-19/2)",
        min_x2: -19,
    },
};

pub const TEN_152: Fixture = Fixture {
    name: "10_152",
    strands: 3,
    word: "1,1,1,2,2,1,1,2,2,2",
    module: Module::Hw,
    printed: Printed::Window {
        text: "q^4*x^(-7/2) + q^5*x^(-11/2) - 3*q^6*x^(-13/2) + q^6*x^(-15/2) + 2*q^7*x^(-15/2)",
        min_x2: -15,
    },
};

pub const M_TEN_145: Fixture = Fixture {
    name: "m(10_145)",
    strands: 4,
    word: "3,2,2,1,-2,3,3,2,2,1,-2",
    module: Module::Hw,
    printed: Printed::Window {
        text: "q^2*x^(-3/2) - 2*q^2*x^(-5/2) + 2*q*x^(-7/2) + 2*q^3*x^(-7/2) + q^4*x^(-7/2) \
               - 2*q^(-1)*x^(-9/2) - 2*q^2*x^(-9/2) - 2*q^3*x^(-9/2) - 2*q^4*x^(-9/2) - 4*q^5*x^(-9/2)",
        min_x2: -9,
    },
};

pub const TEN_154: Fixture = Fixture {
    name: "10_154",
    strands: 4,
    word: "1,1,2,-1,2,1,3,2,2,2,3",
    module: Module::Hw,
    printed: Printed::Window {
        text: "q^3*x^(-5/2) - q^3*x^(-7/2) + q^2*x^(-9/2) + 3*q^4*x^(-9/2) \
               - x^(-11/2) - 2*q^3*x^(-11/2) - 2*q^4*x^(-11/2) - 5*q^5*x^(-11/2) - q^6*x^(-11/2)",
        min_x2: -11,
    },
};

pub const TEN_161: Fixture = Fixture {
    name: "10_161",
    strands: 3,
    word: "1,1,1,2,-1,2,1,1,2,2",
    module: Module::Hw,
    printed: Printed::Window {
        text: "q^3*x^(-5/2) - q^3*x^(-7/2) + q^2*x^(-9/2) + q^4*x^(-9/2) \
               - x^(-11/2) - q^3*x^(-11/2) - q^4*x^(-11/2) - 2*q^5*x^(-11/2)",
        min_x2: -11,
    },
};

pub const M_FIVE_2: Fixture = Fixture {
    name: "m(5_2)",
    strands: 3,
    word: "-2,-2,-2,-1,2,-1",
    module: Module::Lw,
    printed: Printed::Coeffs(&[
        c(0, "-q^(-1) + 1 - q^2 + q^5 - q^9 + q^14 - q^20 + q^27", Some(35)),
        c(1, "-q^(-1) + 1 + q - q^2 - q^3 - q^4 + q^5 + q^6 + q^7 + q^8", Some(9)),
        c(2, "-q^(-1) + 2 + q - q^2 - 2*q^3 - 2*q^4 + q^5 + q^6 + 3*q^7 + 2*q^8 - q^10", Some(11)),
        c(3, "2 + q - 2*q^2 - 2*q^3 - 3*q^4 + 2*q^6 + 4*q^7 + 4*q^8 + 2*q^9 - 3*q^11", Some(12)),
    ]),
};

pub const M_SEVEN_3: Fixture = Fixture {
    name: "m(7_3)",
    strands: 3,
    word: "-2,-2,-2,-2,-2,-1,2,-1",
    module: Module::Lw,
    printed: Printed::Coeffs(&[
        c(0, "0", None),
        c(1, "-q^(-2) + q^(-1) - q + q^4 - q^8 + q^13 - q^19 + q^26 - q^34 + q^43", Some(53)),
        c(
            2,
            "-q^(-2) + q^(-1) + 1 - q - q^2 - q^3 + q^4 + q^5 + q^6 + q^7 - q^8 - q^9 - q^10 - q^11",
            Some(12),
        ),
        c(
            3,
            "q^(-3) - 2*q^(-2) + q^(-1) + 2 - q^2 - 3*q^3 + 2*q^6 + 3*q^7 + q^8 - q^10 - 2*q^11 - 4*q^12 - q^13",
            Some(14),
        ),
        c(
            4,
            "q^(-3) - 2*q^(-2) + 2 + q + q^2 - 3*q^3 - 2*q^4 - 2*q^5 + 3*q^7 + 3*q^8 + 3*q^9 + 2*q^10 - 4*q^12",
            Some(13),
        ),
        c(
            5,
            "-q^(-5) + q^(-4) + 2*q^(-3) - 3*q^(-2) - q^(-1) + 2*q + 3*q^2 - 5*q^5 - 3*q^6 - q^7 + q^8 + 2*q^9",
            Some(10),
        ),
    ]),
};

pub const M_SEVEN_5: Fixture = Fixture {
    name: "m(7_5)",
    strands: 3,
    word: "-2,-2,-2,-2,-1,2,-1,-1",
    module: Module::Lw,
    printed: Printed::Coeffs(&[
        c(0, "0", None),
        c(1, "-q^(-2) + q^(-1) - q + q^4 - q^8 + q^13 - q^19 + q^26 - q^34", Some(43)),
        c(2, "-2*q^(-2) + 2*q^(-1) + 2 - 2*q - 2*q^2 - 2*q^3 + 2*q^4 + 2*q^5 + 2*q^6 + 2*q^7", Some(8)),
        c(3, "q^(-3) - 4*q^(-2) + 3*q^(-1) + 5 - 4*q^2 - 8*q^3 - q^4 + q^5", Some(6)),
    ]),
};

pub const M_EIGHT_15: Fixture = Fixture {
    name: "m(8_15)",
    strands: 4,
    word: "-1,-3,-2,-2,-2,-1,-1,2,3,-2,-3",
    module: Module::Lw,
    printed: Printed::Coeffs(&[
        c(0, "0", None),
        c(1, "-q^(-2) + 2*q^(-1) - 1 - 3*q + 2*q^2 + 2*q^3 + 3*q^4 - 3*q^5 - 4*q^6 - q^7", Some(8)),
        c(2, "-3*q^(-2) + 6*q^(-1) + 1 - 12*q - 2*q^2 + 7*q^3 + 19*q^4 + 4*q^5 - 14*q^6", Some(7)),
        c(3, "-6*q^(-2) + 15*q^(-1) + 5 - 27*q - 21*q^2 + 5*q^3 + 59*q^4", Some(5)),
    ]),
};

/// `K_{2,2}`; the printed rows come without a braid word, so `word` is empty and the
/// series is produced by the closed-form double twist oracle.
pub const M_SEVEN_4: Fixture = Fixture {
    name: "m(7_4)",
    strands: 0,
    word: "",
    module: Module::Lw,
    printed: Printed::Coeffs(&[
        c(
            0,
            "-q^(-1) + 2 - q - 2*q^2 + 2*q^3 + q^5 - 2*q^6 + 2*q^8 - 2*q^9 + 2*q^10 - q^11 - 2*q^12",
            Some(14),
        ),
        c(
            1,
            "-q^(-1) + 2 - q - 2*q^2 + 3*q^3 - q^5 - 4*q^6 + q^7 + 6*q^8 + q^9 + 2*q^10 - 5*q^11 - 8*q^12",
            Some(13),
        ),
        c(2, "-q^(-1) + 2 - q - q^2 + 3*q^3 - q^4 - 3*q^5 - 5*q^6 + 3*q^7 + 10*q^8 + 5*q^9", Some(10)),
        c(3, "-q^(-1) + 2 - q^2 + 2*q^3 - 3*q^4 - 3*q^5 - 3*q^6 + 5*q^7", Some(8)),
    ]),
};

/// Every fixture with a braid word.
pub fn braid_fixtures() -> Vec<Fixture> {
    vec![TEN_139, TEN_152, M_TEN_145, TEN_154, TEN_161, M_FIVE_2, M_SEVEN_3, M_SEVEN_5, M_EIGHT_15]
}

pub fn lookup(name: &str) -> Option<Fixture> {
    braid_fixtures().into_iter().chain([M_SEVEN_4]).find(|f| f.name == name)
}

/// Small knots with standard braid words, used by property checks.
pub const SMALL_KNOTS: &[(&str, usize, &str)] = &[
    ("3_1", 2, "1,1,1"),
    ("4_1", 3, "1,-2,1,-2"),
    ("5_1", 2, "1,1,1,1,1"),
    ("5_2", 3, "1,1,1,2,-1,2"),
    ("7_1", 2, "1,1,1,1,1,1,1"),
    ("8_19", 3, "1,1,1,2,1,1,1,2"),
];

/// Product of factors, each in canonical text form.
fn product(factors: &[&str]) -> BiSeries {
    factors.iter().fold(BiSeries::one(), |acc, f| &acc * &BiSeries::parse_text(f).expect("fixture factor"))
}

/// The five-term quantum A-polynomial of `m(5_2)` as printed, `Σ_k a_k(x,q) ŷ^k`.
pub fn m52_quantum_a_polynomial(convention: YhatConvention) -> AnnihilatorOp {
    m52_operator("q^7*x - 1", convention)
}

/// The same operator with the factor `(q^7 x - 1)` of `a_1` read as `(q^7 x^2 - 1)`.
/// As printed, `Σ_k a_k(x, 1)` equals `-x a_1(x, 1) ≠ 0`, so the operator cannot
/// annihilate anything with a nonzero classical limit; exact colored Jones data
/// single out this factor as the misprint.
pub fn m52_quantum_a_polynomial_corrected(convention: YhatConvention) -> AnnihilatorOp {
    m52_operator("q^7*x^2 - 1", convention)
}

fn m52_operator(a1_factor: &str, convention: YhatConvention) -> AnnihilatorOp {
    let a0 = product(&["-q^9*x^7", "q^3*x + 1", "q^5*x^2 - 1", "q^7*x^2 - 1"]);
    let a1 = product(&[
        "q^(11/2)*x^2",
        "q*x + 1",
        "q^3*x + 1",
        a1_factor,
        "q^9*x^6 + q^8*x^6 - q^8*x^4 - 3*q^7*x^5 - q^7*x^4 - q^6*x^5 + 2*q^6*x^4 + 2*q^6*x^3 + q^5*x^4 \
         - q^5*x^2 - q^4*x^3 - q^3*x^4 - q^3*x^3 + q^3*x^2 + 2*q^2*x^3 + 2*q^2*x^2 - q*x^2 - 2*q*x + 1",
    ]);
    let a2 = product(&[
        "-q^2",
        "q^2*x - 1",
        "q^2*x + 1",
        "q*x^2 - 1",
        "q^7*x^2 - 1",
        "q^12*x^6 + q^11*x^5 - 2*q^10*x^5 - 3*q^9*x^4 + 2*q^8*x^4 - q^8*x^3 + 2*q^7*x^3 - q^6*x^4 \
         - 4*q^6*x^3 - q^5*x^3 - 3*q^5*x^2 + q^4*x^3 + 2*q^4*x^2 + q^3*x - q^2*x^2 - 2*q^2*x + 1",
    ]);
    let a3 = product(&[
        "q^(1/2)",
        "q*x^2 - 1",
        "q*x + 1",
        "q^3*x + 1",
        "q^16*x^6 - 2*q^13*x^5 - q^13*x^4 + q^11*x^4 + 2*q^10*x^4 + 2*q^10*x^3 - q^9*x^4 - q^8*x^3 \
         - q^8*x^2 - q^7*x^3 - q^7*x^2 + 2*q^6*x^3 + 2*q^6*x^2 + q^5*x^2 - q^3*x^2 - 3*q^3*x - q^2*x + q + 1",
    ]);
    let a4 = product(&["q*x + 1", "q*x^2 - 1", "q^3*x^2 - 1"]);
    AnnihilatorOp::new(vec![a0, a1, a2, a3, a4], convention).expect("exact coefficients")
}

/// The printed recursions expressing `f_2`, `f_3` of `m(5_2)` through `f_0`, `f_1`:
/// `(den, c0, c1)` with `den·f_m = c0·f_0 + c1·f_1`.
pub fn m52_recursions() -> [(i32, BiSeries, BiSeries, BiSeries); 2] {
    let p = |s: &str| BiSeries::parse_text(s).expect("fixture polynomial");
    [
        (2, p("-q + q^3"), p("1 + q - q^2"), p("-1 - 2*q + q^2")),
        (
            3,
            p("q^2 - q^4 - q^5 + q^7"),
            p("-2 - q - q^2 + 2*q^3 + q^4 - q^5"),
            p("2 + q + 3*q^2 - q^3 - q^6"),
        ),
    ]
}

/// A printed `Ẑ` series `sign · q^{d} (Σ c_k q^k + O(q^{order}))` for one Spin^c class.
#[derive(Clone, Copy, Debug)]
pub struct PrintedZhat {
    pub sign: i32,
    /// `d` as `(numerator, denominator)`.
    pub d: (i64, i64),
    pub text: &'static str,
    pub q_order: i32,
}

/// Exceptional integral surgeries `S^3_p(m(5_2))`.
pub const M52_INTEGRAL_SURGERIES: &[(i32, &[PrintedZhat])] = &[
    (
        -1,
        &[PrintedZhat { sign: 1, d: (-3, 2), text: "1 - q - q^9 + q^14 - q^19 + q^26 + q^50", q_order: 61 }],
    ),
    (
        -2,
        &[
            PrintedZhat { sign: 1, d: (-5, 4), text: "1 - q + q^18 - q^25 + q^31 - q^40", q_order: 91 },
            PrintedZhat { sign: -1, d: (5, 4), text: "1 - q^3 + q^6 - q^11 + q^45", q_order: 56 },
        ],
    ),
    (
        -3,
        &[
            PrintedZhat { sign: 1, d: (-1, 1), text: "1 - q + q^8 - q^13 + q^17 - q^24", q_order: 45 },
            PrintedZhat { sign: -1, d: (4, 3), text: "1 - q^3 + q^27 - q^36", q_order: 84 },
        ],
    ),
];

/// `S^3_{-1/r}(m(5_2))`, normalized by `q^{-(r + 1/r)/4}`.
pub const M52_INVERSE_SURGERIES: &[(i32, PrintedZhat)] = &[
    (
        2,
        PrintedZhat {
            sign: 1,
            d: (-3, 2),
            text: "1 - 2*q + q^2 + 2*q^3 - 2*q^4 - q^5 - q^6 + 3*q^7 + 2*q^8 - 2*q^9",
            q_order: 11,
        },
    ),
    (
        3,
        PrintedZhat {
            sign: 1,
            d: (-3, 2),
            text: "1 - 2*q + q^2 + q^3 - q^4 + q^5 - 2*q^6 + 2*q^9 + 3*q^10 - 3*q^11",
            q_order: 12,
        },
    ),
    (
        4,
        PrintedZhat {
            sign: 1,
            d: (-3, 2),
            text: "1 - 2*q + q^2 + q^3 - q^4 - q^6 + 2*q^7 - q^8 - q^9 + q^10 + q^11",
            q_order: 12,
        },
    ),
    (
        5,
        PrintedZhat {
            sign: 1,
            d: (-3, 2),
            text: "1 - 2*q + q^2 + q^3 - q^4 - q^6 + q^7 + q^9 - 2*q^11 + 2*q^13",
            q_order: 14,
        },
    ),
];

/// Whitehead link rows `f_j(x, q)` (coefficient of `y^j`) as printed, through `x^4`.
pub const WHITEHEAD_ROWS: &[(i32, &[&str])] = &[
    (0, &["1", "1", "1", "1", "1"]),
    (
        1,
        &[
            "1",
            "-q^(-1) + 1 + q",
            "-q^(-2) - q^(-1) + 1 + q + q^2",
            "-q^(-3) - q^(-2) - q^(-1) + 1 + q + q^2 + q^3",
            "-q^(-4) - q^(-3) - q^(-2) - q^(-1) + 1 + q + q^2 + q^3 + q^4",
        ],
    ),
];

/// Whitehead `f_{i,1}` as given by the displayed closed form
/// `(q^{i+1} + q^{-i-1} - 2)/(q - 1)`, which disagrees with the printed rows; the
/// listed form `(q^{i+1} + q^{-i} - 2)/(q - 1)` agrees with them.
pub fn whitehead_f1_displayed(i: i32) -> Option<BiSeries> {
    let num = BiSeries::from_terms([
        (2 * (i + 1), 0, crate::algebra::rat(1)),
        (-2 * (i + 1), 0, crate::algebra::rat(1)),
        (0, 0, crate::algebra::rat(-2)),
    ]);
    num.div_exact_q(&BiSeries::parse_text("q - 1").expect("literal"))
}

pub fn whitehead_f1_listed(i: i32) -> Option<BiSeries> {
    let num = BiSeries::from_terms([
        (2 * (i + 1), 0, crate::algebra::rat(1)),
        (-2 * i, 0, crate::algebra::rat(1)),
        (0, 0, crate::algebra::rat(-2)),
    ]);
    num.div_exact_q(&BiSeries::parse_text("q - 1").expect("literal"))
}

/// `F^+_{T_{4,2}} ≅ x^{1/2} y^{1/2} Σ_m (-1)^m q^{m(m+1)/2} x^m y^m`: the diagonal terms
/// `(m, sign, q-exponent)`.
pub fn t42_diagonal(terms: i32) -> Vec<(i32, i32, i32)> {
    (0..terms).map(|m| (m, if m % 2 == 0 { 1 } else { -1 }, m * (m + 1) / 2)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_parse_and_close_to_knots() {
        for f in braid_fixtures() {
            assert!(f.braid().unwrap().is_knot(), "{}", f.name);
            if let Some(w) = f.window() {
                w.unwrap();
            }
            if let Printed::Coeffs(cs) = f.printed {
                for c in cs {
                    c.series().unwrap();
                }
            }
        }
        for &(name, n, w) in SMALL_KNOTS {
            assert!(BraidWord::parse(w, n).unwrap().is_knot(), "{name}");
        }
    }

    #[test]
    fn whitehead_forms() {
        assert_eq!(whitehead_f1_listed(0).unwrap().to_text(), "1");
        assert_eq!(whitehead_f1_displayed(0).unwrap().to_text(), "-q^(-1) + 1");
        let row = BiSeries::parse_text(WHITEHEAD_ROWS[1].1[3]).unwrap();
        assert_eq!(whitehead_f1_listed(3).unwrap(), row);
    }

    #[test]
    fn operator_has_five_terms() {
        let op = m52_quantum_a_polynomial(YhatConvention::QShift);
        assert_eq!(op.coefficients.len(), 5);
        assert!(op.coefficients.iter().all(|a| !a.is_zero()));
    }
}
