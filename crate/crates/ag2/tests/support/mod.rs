//! Shared fixtures for integration tests: the displayed residue data from
//! the ring-preservation analysis, as builders parameterized by m.

use ag2::algebra::{AffineForm, FactoredRatFun, MultiPoly, Rat};
use std::collections::BTreeMap;

/// Build a univariate rational function from a scalar, numerator factors
/// `t + b` (as offsets b), and denominator factors `t + b` with
/// multiplicities. The variable t is the surviving coordinate (A or B).
pub fn univariate_ratfun(scalar: Rat, num_offsets: &[Rat], den_offsets: &[(Rat, u32)]) -> FactoredRatFun {
    let mut num = MultiPoly::constant(1, Rat::one());
    for b in num_offsets {
        let f = MultiPoly::linear(1, &[Rat::one()], b);
        num = &num * &f;
    }
    let mut den = BTreeMap::new();
    for (b, m) in den_offsets {
        let form = AffineForm::new(&[Rat::one()], b);
        *den.entry(form).or_insert(0) += m;
    }
    FactoredRatFun { num, den, scalar }
}

fn r(n: i64) -> Rat {
    Rat::from_int(n)
}

/// One row of residue data: which operator, which pair, which hyperplane,
/// and the expected residue of a_tau as a function of the surviving
/// coordinate.
pub struct ResidueCase {
    pub name: &'static str,
    pub via_d2: bool,
    pub tau: ag2::lattice::LatticeVector,
    pub lambda: ag2::lattice::LatticeVector,
    pub alpha: ag2::lattice::LatticeVector,
    pub c: Rat,
    pub expected: fn(i64) -> FactoredRatFun,
}

pub fn residue_cases() -> Vec<ResidueCase> {
    use ag2::lattice::{ALPHA1, ALPHA2, ALPHA3, BETA1, BETA2};
    vec![
        ResidueCase {
            name: "d1 B=4: res(a_{-2b2}) = -res(a_{-2a3})",
            via_d2: false,
            tau: -2 * BETA2,
            lambda: -2 * ALPHA3,
            alpha: BETA1,
            c: r(2),
            expected: |m| {
                univariate_ratfun(
                    r(-3 * m * (3 * m + 2) * (3 * m + 4)),
                    &[
                        r(-12 - 12 * m),
                        r(6 * m),
                        r(-4 + 12 * m),
                        r(12 * m),
                        r(4 + 12 * m),
                        r(12 + 12 * m),
                        r(12 + 12 * m),
                    ],
                    &[
                        (r(-12), 1),
                        (r(-4), 1),
                        (r(0), 3),
                        (r(4), 1),
                        (r(12), 1),
                    ],
                )
            },
        },
        ResidueCase {
            name: "d1 B=2: res(a_{2b2}) = -res(a_{2a2})",
            via_d2: false,
            tau: 2 * BETA2,
            lambda: 2 * ALPHA2,
            alpha: BETA1,
            c: r(1),
            expected: |m| {
                univariate_ratfun(
                    r(6 * (m + 1) * (3 * m - 1) * (3 * m + 1)),
                    &[
                        r(-10 - 12 * m),
                        r(-6 - 12 * m),
                        r(-2 - 12 * m),
                        r(6 - 12 * m),
                        r(6 - 12 * m),
                        r(-6 * m),
                        r(6 + 12 * m),
                    ],
                    &[
                        (r(-6), 1),
                        (r(-2), 1),
                        (r(0), 1),
                        (r(2), 1),
                        (r(6), 3),
                    ],
                )
            },
        },
        ResidueCase {
            name: "d2 B=6: res(a_{-4b1}) = -res(a_{-2b1})",
            via_d2: true,
            tau: -4 * BETA1,
            lambda: -2 * BETA1,
            alpha: BETA1,
            c: r(3),
            expected: |m| {
                univariate_ratfun(
                    r(48 * m * (m + 1) * (3 * m + 2) * (3 * m + 5)),
                    &[
                        r(-2 - 12 * m),
                        r(-6 - 12 * m),
                        r(-14 - 12 * m),
                        r(-18 - 12 * m),
                        r(2 + 12 * m),
                        r(6 + 12 * m),
                        r(14 + 12 * m),
                        r(18 + 12 * m),
                    ],
                    &[
                        (r(-18), 1),
                        (r(-6), 2),
                        (r(-2), 1),
                        (r(2), 1),
                        (r(6), 2),
                        (r(18), 1),
                    ],
                )
            },
        },
        ResidueCase {
            name: "d2 B=4: res(a_{-2b2}) = -res(a_{-2a3})",
            via_d2: true,
            tau: -2 * BETA2,
            lambda: -2 * ALPHA3,
            alpha: BETA1,
            c: r(2),
            expected: |m| {
                univariate_ratfun(
                    r(-18 * m * m * (m + 1) * (3 * m + 2) * (3 * m + 4)),
                    &[
                        r(-32),
                        r(24),
                        r(-12 - 12 * m),
                        r(6 * m),
                        r(-4 + 12 * m),
                        r(12 * m),
                        r(4 + 12 * m),
                        r(12 + 12 * m),
                        r(12 + 12 * m),
                    ],
                    &[
                        (r(-12), 1),
                        (r(-8), 1),
                        (r(-4), 1),
                        (r(0), 4),
                        (r(4), 1),
                        (r(12), 1),
                    ],
                )
            },
        },
        ResidueCase {
            name: "d2 B=2 (i): res(a_{-4b1}) = -res(a_{2b1})",
            via_d2: true,
            tau: -4 * BETA1,
            lambda: 2 * BETA1,
            alpha: BETA1,
            c: r(1),
            expected: |m| {
                univariate_ratfun(
                    r(144 * m * (m + 1) * (3 * m - 2) * (3 * m + 1)),
                    &[
                        r(6 - 12 * m),
                        r(2 - 12 * m),
                        r(-6 - 12 * m),
                        r(-10 - 12 * m),
                        r(-6 + 12 * m),
                        r(-2 + 12 * m),
                        r(6 + 12 * m),
                        r(10 + 12 * m),
                    ],
                    &[(r(-6), 2), (r(-2), 2), (r(2), 2), (r(6), 2)],
                )
            },
        },
        ResidueCase {
            name: "d2 B=2 (ii): res(a_{-4b2}) = -res(a_{-2a1})",
            via_d2: true,
            tau: -4 * BETA2,
            lambda: -2 * ALPHA1,
            alpha: BETA1,
            c: r(1),
            expected: |m| {
                univariate_ratfun(
                    r(288 * m * (m + 1)),
                    &[
                        r(-6 + 6 * m),
                        r(6 * m),
                        r(-10 + 12 * m),
                        r(-6 + 12 * m),
                        r(-6 + 12 * m),
                        r(-2 + 12 * m),
                        r(2 + 12 * m),
                        r(6 + 12 * m),
                        r(6 + 12 * m),
                        r(10 + 12 * m),
                    ],
                    &[
                        (r(-10), 1),
                        (r(-6), 4),
                        (r(-2), 2),
                        (r(0), 1),
                        (r(2), 1),
                        (r(6), 1),
                    ],
                )
            },
        },
        ResidueCase {
            name: "d2 B=2 (iii): res(a_{2b2}) = -res(a_{2a2})",
            via_d2: true,
            tau: 2 * BETA2,
            lambda: 2 * ALPHA2,
            alpha: BETA1,
            c: r(1),
            expected: |m| {
                univariate_ratfun(
                    r(36 * m * (m + 1) * (m + 1) * (3 * m - 1) * (3 * m + 1)),
                    &[
                        r(-26),
                        r(30),
                        r(-10 - 12 * m),
                        r(-6 - 12 * m),
                        r(-2 - 12 * m),
                        r(6 - 12 * m),
                        r(6 - 12 * m),
                        r(-6 * m),
                        r(6 + 12 * m),
                    ],
                    &[
                        (r(-6), 1),
                        (r(-2), 2),
                        (r(0), 1),
                        (r(2), 1),
                        (r(6), 4),
                    ],
                )
            },
        },
        ResidueCase {
            name: "d2 A=6: res(a_{-4b2}) = -res(a_{-2b1})",
            via_d2: true,
            tau: -4 * BETA2,
            lambda: -2 * BETA1,
            alpha: ALPHA1,
            c: r(1),
            expected: |m| {
                univariate_ratfun(
                    r(96 * m * (m + 1)),
                    &[
                        r(-14 - 12 * m),
                        r(-2 - 12 * m),
                        r(-2 + 4 * m),
                        r(2 + 4 * m),
                        r(-2 + 6 * m),
                        r(4 + 6 * m),
                        r(-6 + 12 * m),
                        r(2 + 12 * m),
                        r(6 + 12 * m),
                        r(14 + 12 * m),
                    ],
                    &[
                        (r(-6), 2),
                        (r(-2), 4),
                        (r(0), 1),
                        (r(2), 2),
                        (r(6), 1),
                    ],
                )
            },
        },
    ]
}
