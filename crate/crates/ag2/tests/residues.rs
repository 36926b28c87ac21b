//! The residue data of the ring-preservation analysis: each displayed
//! residue is reproduced exactly as a rational function of the surviving
//! coordinate for m = 1..=4, and each paired sum cancels.

mod support;

use ag2::diffop::{make_d1, make_d2, residue_pair_sum};

#[test]
fn residue_formulas_match_displays() {
    for case in support::residue_cases() {
        for m in 1..=4u32 {
            let d = if case.via_d2 { make_d2(m) } else { make_d1(m) };
            let pair = residue_pair_sum(&d, case.tau, case.lambda, case.alpha, &case.c)
                .unwrap_or_else(|e| panic!("{} (m={}): {}", case.name, m, e));
            assert!(pair.sum_is_zero, "{} (m={}): sum not zero", case.name, m);
            let expected = (case.expected)(m as i64);
            assert!(
                pair.res_tau.eq_ratfun(&expected),
                "{} (m={}): residue mismatch\n got {:?}\n want {:?}",
                case.name,
                m,
                pair.res_tau.reduce(),
                expected.reduce()
            );
            let neg = expected.neg();
            assert!(
                pair.res_lambda.eq_ratfun(&neg),
                "{} (m={}): partner residue mismatch",
                case.name,
                m
            );
        }
    }
}
