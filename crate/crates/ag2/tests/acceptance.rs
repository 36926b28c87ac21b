//! Acceptance suite: runs every exit criterion sequentially and prints one
//! pass/fail line per criterion with its timing. All checks are exact: no
//! tolerances anywhere.

mod support;

use ag2::algebra::{Mono, MultiPoly, Rat};
use ag2::ba::{
    ba_equal, ba_linear_oracle_numeric, ba_linear_oracle_symbolic, construct_ba,
    leading_polynomial, nilpotency_check, nullspace, rational_limit_identities,
    specialize_exp_polynomial, total_multiplicity, verify_axioms, verify_eigen_difference,
    verify_eigen_schrodinger, verify_subleading, BAFunction, BuildRoute, Field,
};
use ag2::diffop::{
    apply_to_poly, check_structural_conditions, commutator, kappa_at_infinity, leading_expansion,
    make_d1, make_d2, quasiminuscule_doubled_a2, residue_pair_sum, DifferenceOperator,
};
use ag2::lattice::{build_config, e_exponent, norm2, u_form, ConfigName, BETA1};
use ag2::quasi::{
    definition_shift_set, delta_chain_plain, direct_conditions_plain, is_quasi_invariant,
    sample_ring_elements,
};
use ag2::reductions::{verify_a1_identities, verify_a2_preservation, verify_d0_preservation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

struct Outcome {
    name: &'static str,
    passed: bool,
    detail: String,
    seconds: f64,
}

fn run(
    results: &mut Vec<Outcome>,
    name: &'static str,
    f: impl FnOnce() -> (bool, String),
) {
    let t = Instant::now();
    let (passed, detail) = f();
    let seconds = t.elapsed().as_secs_f64();
    println!(
        "criterion {}: {} ({:.1}s){}",
        name,
        if passed { "PASS" } else { "FAIL" },
        seconds,
        if detail.is_empty() {
            String::new()
        } else {
            format!(" [{}]", detail)
        }
    );
    results.push(Outcome {
        name,
        passed,
        detail,
        seconds,
    });
}

fn criterion_1() -> (bool, String) {
    let mut ok = true;
    let mut detail = String::new();
    for m in 0..=2u32 {
        let cfg = build_config(ConfigName::AG2, m);
        for (name, d) in [("d1", make_d1(m)), ("d2", make_d2(m))] {
            let rep = check_structural_conditions(&d, &cfg);
            if !rep.passed() {
                ok = false;
                detail = format!("{} m={} violates: {:?}", name, m, rep);
            }
        }
    }
    (ok, detail)
}

fn criterion_2() -> (bool, String) {
    for case in support::residue_cases() {
        for m in 1..=4u32 {
            let d = if case.via_d2 { make_d2(m) } else { make_d1(m) };
            let pair = match residue_pair_sum(&d, case.tau, case.lambda, case.alpha, &case.c) {
                Ok(p) => p,
                Err(e) => return (false, format!("{} m={}: {}", case.name, m, e)),
            };
            let expected = (case.expected)(m as i64);
            if !pair.sum_is_zero {
                return (false, format!("{} m={}: sum not zero", case.name, m));
            }
            if !pair.res_tau.eq_ratfun(&expected) {
                return (false, format!("{} m={}: formula mismatch", case.name, m));
            }
            if !pair.res_lambda.eq_ratfun(&expected.neg()) {
                return (false, format!("{} m={}: partner mismatch", case.name, m));
            }
        }
    }
    (true, "8 displayed formulas x m in 1..=4".into())
}

fn criterion_3() -> (bool, String) {
    for m in [0u32, 1] {
        let cfg = build_config(ConfigName::AG2, m);
        let samples = sample_ring_elements(&cfg, 20, 2024);
        for (name, d) in [("d1", make_d1(m)), ("d2", make_d2(m))] {
            for (i, p) in samples.iter().enumerate() {
                match apply_to_poly(&d, p) {
                    Ok(q) => {
                        if !is_quasi_invariant(&q, &cfg).passed() {
                            return (
                                false,
                                format!("{} m={} sample {}: image left the ring", name, m, i),
                            );
                        }
                    }
                    Err(e) => {
                        return (false, format!("{} m={} sample {}: {}", name, m, i, e));
                    }
                }
            }
        }
    }
    (true, "20 samples per configuration, m in {0,1}".into())
}

fn all_verifiers(ba: &BAFunction, m: u32) -> Result<(), String> {
    let ax = verify_axioms(ba);
    if !ax.values().all(|&v| v) {
        return Err(format!("axioms: {:?}", ax));
    }
    if !verify_eigen_difference(ba, &make_d1(m)) {
        return Err("difference eigen-equation for d1 fails".into());
    }
    if !verify_eigen_difference(ba, &make_d2(m)) {
        return Err("difference eigen-equation for d2 fails".into());
    }
    if !verify_eigen_schrodinger(ba) {
        return Err("Schroedinger eigen-equation fails".into());
    }
    if !verify_subleading(ba) {
        return Err("subleading-term formula fails".into());
    }
    Ok(())
}

fn criterion_4() -> (bool, String) {
    let a = match construct_ba(0, BuildRoute::D1) {
        Ok(b) => b,
        Err(e) => return (false, e.to_string()),
    };
    let b = match construct_ba(0, BuildRoute::D2) {
        Ok(b) => b,
        Err(e) => return (false, e.to_string()),
    };
    if !ba_equal(&a, &b) {
        return (false, "d1 and d2 constructions differ".into());
    }
    if a.z_degree() != 3 {
        return (false, format!("degree {} != 3", a.z_degree()));
    }
    if a.leading_part() != leading_polynomial(0) {
        return (false, "leading term mismatch".into());
    }
    if let Err(e) = all_verifiers(&a, 0) {
        return (false, e);
    }
    match ba_linear_oracle_symbolic(0) {
        Ok(oracle) => {
            if oracle.poly != a.to_exp_polynomial().poly {
                return (false, "symbolic oracle differs".into());
            }
        }
        Err(e) => return (false, e.to_string()),
    }
    (true, "both routes, four verifiers, symbolic oracle".into())
}

fn criterion_5() -> (bool, String) {
    let t0 = Instant::now();
    let a = match construct_ba(1, BuildRoute::D1) {
        Ok(b) => b,
        Err(e) => return (false, e.to_string()),
    };
    let t_d1 = t0.elapsed().as_secs_f64();
    let t1 = Instant::now();
    let b = match construct_ba(1, BuildRoute::D2) {
        Ok(b) => b,
        Err(e) => return (false, e.to_string()),
    };
    let t_d2 = t1.elapsed().as_secs_f64();
    // per-iteration degree law 30 - k for both routes
    let expected: Vec<usize> = (1..=total_multiplicity(1) as usize)
        .map(|k| 2 * total_multiplicity(1) as usize - k)
        .collect();
    if a.degree_trace != expected || b.degree_trace != expected {
        return (false, "degree law 30 - k violated".into());
    }
    if !ba_equal(&a, &b) {
        return (false, "d1 and d2 constructions differ".into());
    }
    if let Err(e) = all_verifiers(&a, 1) {
        return (false, e);
    }
    // (D1 - mu)^(M+1)[Q e] = 0
    match nilpotency_check(1, BuildRoute::D1) {
        Ok(true) => {}
        Ok(false) => return (false, "16th application did not vanish".into()),
        Err(e) => return (false, e.to_string()),
    }
    // numeric-E oracle at 3 specializations
    let exp = a.to_exp_polynomial();
    let specs = [
        (Rat::from_int(2), Rat::from_int(3)),
        (Rat::from_frac(5, 2), Rat::from_frac(7, 3)),
        (Rat::from_int(3), Rat::from_frac(5, 7)),
    ];
    for (e1, e2) in specs {
        match ba_linear_oracle_numeric(1, (e1.clone(), e2.clone())) {
            Ok(oracle) => {
                let built = specialize_exp_polynomial(&exp, &e1, &e2);
                if oracle != built {
                    return (false, format!("numeric oracle differs at E=({},{})", e1, e2));
                }
            }
            Err(e) => return (false, format!("oracle at E=({},{}): {}", e1, e2, e)),
        }
    }
    (
        true,
        format!(
            "build d1 {:.0}s, d2 {:.0}s; degree law, four verifiers, nilpotency, 3 oracle spot-checks",
            t_d1, t_d2
        ),
    )
}

fn criterion_6() -> (bool, String) {
    for m in [1u32, 2] {
        let cfg = build_config(ConfigName::AG2, m);
        let d = make_d1(m);
        let le = leading_expansion(&d, &cfg);
        if !le.remainder_degree_ok {
            return (false, format!("m={}: remainder degree > -2", m));
        }
        for (tau, k) in &le.kappa {
            let expect = if norm2(*tau) == 8 { 3 } else { 1 };
            if *k != Rat::from_int(expect) {
                return (false, format!("m={}: kappa({:?}) = {}", m, tau, k));
            }
        }
    }
    (true, "kappa = 3 / 1, remainder degree <= -2, m in {1,2}".into())
}

fn criterion_7() -> (bool, String) {
    for m in 0..=2u32 {
        let rep = rational_limit_identities(m);
        if !rep.passed() {
            return (false, format!("m={}: {:?}", m, rep));
        }
    }
    (true, "72*Gram identity and -144(m_b + m_2b) vector identity".into())
}

fn criterion_8() -> (bool, String) {
    let mut exact = Vec::new();
    for m in [0u32, 1] {
        let k = commutator(&make_d1(m), &make_d2(m));
        exact.push(k.is_zero_operator());
        let cfg = build_config(ConfigName::AG2, m);
        for (i, p) in sample_ring_elements(&cfg, 20, 77).iter().enumerate() {
            match apply_to_poly(&k, p) {
                Ok(q) => {
                    if !q.is_zero() {
                        return (false, format!("m={} sample {} not annihilated", m, i));
                    }
                }
                Err(e) => return (false, format!("m={} sample {}: {}", m, i, e)),
            }
        }
    }
    (
        true,
        format!(
            "20 samples annihilated at m in {{0,1}}; exact operator identity: {:?}",
            exact
        ),
    )
}

fn criterion_9() -> (bool, String) {
    let d0 = verify_d0_preservation(8, 0);
    if !d0.passed() {
        return (false, format!("d0 preservation: {:?}", d0.failures));
    }
    let a2 = verify_a2_preservation(8, 0);
    if !a2.passed() {
        return (false, format!("a2 preservation: {:?}", a2.failures));
    }
    let ids = verify_a1_identities();
    for r in &ids {
        if !r.holds_on_line {
            return (false, format!("{} fails", r.identity_name));
        }
    }
    let comm_exact: Vec<bool> = ids.iter().take(3).map(|r| r.holds_exactly).collect();
    if !make_d2(0).eq_operator(&quasiminuscule_doubled_a2()) {
        return (false, "d2 at m=0 is not the quasiminuscule operator".into());
    }
    (
        true,
        format!(
            "d0/a2 preservation, 5 identities (commutators exact: {:?}), quasiminuscule",
            comm_exact
        ),
    )
}

/// Rows of the single-direction shift conditions for polynomials of degree
/// at most `maxdeg` in the plain (E = 1) setting.
fn plain_condition_rows(shifts: &[u32], maxdeg: u32) -> (Vec<Mono>, Vec<Vec<Rat>>) {
    use ag2::algebra::{poly_shift, restrict_to_hyperplane};
    let alpha = BETA1;
    let g = e_exponent(alpha);
    let form = u_form(alpha);
    let mut monos = Vec::new();
    for d in 0..=maxdeg {
        for i in (0..=d).rev() {
            monos.push(Mono(vec![i as u16, (d - i) as u16]));
        }
    }
    monos.sort();
    let mut rows: Vec<Vec<Rat>> = Vec::new();
    for &s in shifts {
        let si = s as i64;
        let delta = vec![Rat::from_int(g.0 as i64 * si), Rat::from_int(g.1 as i64 * si)];
        let neg: Vec<Rat> = delta.iter().map(|d| -d.clone()).collect();
        let parts: Vec<MultiPoly<Rat>> = monos
            .iter()
            .map(|b| {
                let mono = MultiPoly::monomial(2, &b.0, Rat::one());
                let diff = &poly_shift(&mono, &delta) - &poly_shift(&mono, &neg);
                restrict_to_hyperplane(&diff, &form)
            })
            .collect();
        for t in 0..=(maxdeg as usize + 1) {
            let tm = Mono(vec![t as u16]);
            let row: Vec<Rat> = parts.iter().map(|p| p.coeff(&tm)).collect();
            if row.iter().any(|c| !c.is_zero()) {
                rows.push(row);
            }
        }
    }
    (monos, rows)
}

fn criterion_10() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(10_000);
    for (ma, m2a) in [(1u32, 0u32), (2, 0), (1, 1), (3, 1)] {
        let shifts = definition_shift_set(ma, m2a);
        let maxdeg = ma + 2 * m2a + 4;
        let (monos, rows) = plain_condition_rows(&shifts, maxdeg);
        let basis = nullspace(rows, monos.len());
        if basis.is_empty() {
            return (false, format!("({},{}): empty solution space", ma, m2a));
        }
        let from_coeffs = |coeffs: &[Rat]| -> MultiPoly<Rat> {
            let mut p = MultiPoly::zero(2);
            for (b, c) in monos.iter().zip(coeffs) {
                p.add_term(b.clone(), c.clone());
            }
            p
        };
        for trial in 0..200 {
            let p = if trial % 2 == 0 {
                // a random member of the solution space
                let mut coeffs = vec![Rat::zero(); monos.len()];
                for v in &basis {
                    let k = Rat::from_int(rng.gen_range(-4..=4i64));
                    for (c, b) in coeffs.iter_mut().zip(v) {
                        *c += &(&k * b);
                    }
                }
                from_coeffs(&coeffs)
            } else {
                // an arbitrary random polynomial
                let mut coeffs = vec![Rat::zero(); monos.len()];
                for c in coeffs.iter_mut() {
                    *c = Rat::from_int(rng.gen_range(-4..=4i64));
                }
                from_coeffs(&coeffs)
            };
            if p.is_zero() {
                continue;
            }
            let direct = direct_conditions_plain(&p, BETA1, &shifts);
            let chain = delta_chain_plain(&p, BETA1, ma, m2a);
            if direct != chain {
                return (
                    false,
                    format!(
                        "({},{}) trial {}: direct = {}, chain = {}",
                        ma, m2a, trial, direct, chain
                    ),
                );
            }
            if trial % 2 == 0 && !direct {
                return (
                    false,
                    format!("({},{}) trial {}: solution-space sample rejected", ma, m2a, trial),
                );
            }
        }
    }
    (true, "200 randomized psi per multiplicity pair, both directions".into())
}

#[test]
fn acceptance() {
    let mut results = Vec::new();
    run(&mut results, "1 structural conditions", criterion_1);
    run(&mut results, "2 residue data", criterion_2);
    run(&mut results, "3 ring preservation", criterion_3);
    run(&mut results, "4 BA construction m=0", criterion_4);
    run(&mut results, "5 BA construction m=1", criterion_5);
    run(&mut results, "6 expansion lemma", criterion_6);
    run(&mut results, "7 rational limit", criterion_7);
    run(&mut results, "8 commutativity", criterion_8);
    run(&mut results, "9 m=0 reduction suite", criterion_9);
    run(&mut results, "10 axiomatics equivalence", criterion_10);
    let total: f64 = results.iter().map(|r| r.seconds).sum();
    println!("acceptance total: {:.1}s", total);
    let failures: Vec<&Outcome> = results.iter().filter(|r| !r.passed).collect();
    assert!(
        failures.is_empty(),
        "failed criteria: {:?}",
        failures
            .iter()
            .map(|r| format!("{}: {}", r.name, r.detail))
            .collect::<Vec<_>>()
    );
}
