//! End-to-end verification of the m = 0 reductions: the lattice operator
//! D0, the three-variable A2 realization, and the A1 operator identities
//! including the line-restricted relations.

use crate::algebra::{poly_shift, restrict_to_locus, AffineForm, MultiPoly, Rat};
use crate::diffop::{
    apply_to_poly, commutator, compose, make_m0_family, restrict_line, DifferenceOperator,
};
use crate::lattice::{e_exponent, u_form, LatticeVector, SHORT_ROOTS};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Outcome of one operator identity.
#[derive(Debug, Serialize)]
pub struct IdentityReport {
    pub identity_name: String,
    pub holds_exactly: bool,
    pub holds_on_line: bool,
    pub witness: Option<String>,
}

/// Preservation run: how many samples were tested and which failed.
#[derive(Debug, Serialize)]
pub struct PreservationReport {
    pub operator: String,
    pub samples: usize,
    pub failures: Vec<String>,
}

impl PreservationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Membership in the beta-only m = 0 ring: `p(z + b_i) = p(z - b_i)` at
/// `<b_i, z> = 0`.
pub fn in_d0_ring(p: &MultiPoly<Rat>) -> bool {
    for b in SHORT_ROOTS {
        let g = e_exponent(b);
        let delta = vec![Rat::from_int(g.0 as i64), Rat::from_int(g.1 as i64)];
        let neg: Vec<Rat> = delta.iter().map(|d| -d.clone()).collect();
        let diff = &poly_shift(p, &delta) - &poly_shift(p, &neg);
        if !restrict_to_locus(&diff, &u_form(b)).is_zero() {
            return false;
        }
    }
    true
}

/// Samples for the D0 ring: z^2-powers and the product
/// `prod_i (<b_i,z>^2 - (b_i^2)^2)` whose factors vanish on the shifted
/// hyperplanes, plus random combinations.
pub fn d0_ring_samples(count: usize, seed: u64) -> Vec<MultiPoly<Rat>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z2 = crate::quasi::z_squared();
    let mut q = MultiPoly::<Rat>::one(2);
    for b in SHORT_ROOTS {
        let f = u_form(b).to_poly();
        let sq = &f * &f;
        q = &q * &(&sq - &MultiPoly::constant(2, Rat::from_int(4)));
    }
    let pb = crate::quasi::orbit_product_squared(&SHORT_ROOTS);
    let mut out = vec![z2.clone(), q.clone()];
    while out.len() < count {
        let c1 = Rat::from_frac(rng.gen_range(-5..=5i64), rng.gen_range(1..=3i64));
        let c2 = Rat::from_frac(rng.gen_range(-5..=5i64), rng.gen_range(1..=3i64));
        let g = match rng.gen_range(0..3u8) {
            0 => q.clone(),
            1 => pb.clone(),
            _ => &z2 * &z2,
        };
        let mut p = &z2.scale(&c1) + &g.scale(&c2);
        if p.is_zero() {
            p = z2.clone();
        }
        out.push(p);
    }
    out.truncate(count.max(2));
    for p in &out {
        assert!(in_d0_ring(p), "sample out of the D0 ring");
    }
    out
}

/// `D0` preserves its ring on seeded samples.
pub fn verify_d0_preservation(samples: usize, seed: u64) -> PreservationReport {
    let d0 = make_m0_family().d0;
    let mut failures = Vec::new();
    for (i, p) in d0_ring_samples(samples, seed).iter().enumerate() {
        match apply_to_poly(&d0, p) {
            Ok(q) => {
                if !in_d0_ring(&q) {
                    failures.push(format!("sample {}: image left the ring", i));
                }
            }
            Err(e) => failures.push(format!("sample {}: {}", i, e)),
        }
    }
    PreservationReport {
        operator: "d0".into(),
        samples,
        failures,
    }
}

/// Membership in the 3-variable A2 ring: `p(z + e_i - e_j) = p(z - e_i + e_j)`
/// at `z_i = z_j`.
pub fn in_a2_ring(p: &MultiPoly<Rat>) -> bool {
    for i in 0..3 {
        for j in 0..3 {
            if i == j {
                continue;
            }
            let mut delta = vec![Rat::zero(); 3];
            delta[i] = Rat::one();
            delta[j] = Rat::from_int(-1);
            let neg: Vec<Rat> = delta.iter().map(|d| -d.clone()).collect();
            let diff = &poly_shift(p, &delta) - &poly_shift(p, &neg);
            let mut lin = vec![Rat::zero(); 3];
            lin[i] = Rat::one();
            lin[j] = Rat::from_int(-1);
            let form = AffineForm::new(&lin, &Rat::zero());
            if !restrict_to_locus(&diff, &form).is_zero() {
                return false;
            }
        }
    }
    true
}

/// Symmetric-polynomial samples: elementary symmetrics and
/// discriminant-squared combinations.
pub fn a2_ring_samples(count: usize, seed: u64) -> Vec<MultiPoly<Rat>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z = |i: usize| MultiPoly::<Rat>::var(3, i);
    let e1 = &(&z(0) + &z(1)) + &z(2);
    let e2 = &(&(&z(0) * &z(1)) + &(&z(0) * &z(2))) + &(&z(1) * &z(2));
    let e3 = &(&z(0) * &z(1)) * &z(2);
    let disc = {
        let d01 = &z(0) - &z(1);
        let d02 = &z(0) - &z(2);
        let d12 = &z(1) - &z(2);
        let d = &(&d01 * &d02) * &d12;
        &d * &d
    };
    let gens = [e1.clone(), e2.clone(), e3.clone(), disc.clone()];
    let mut out = vec![e1.clone(), &e1 * &e1, e2.clone()];
    while out.len() < count {
        let c1 = Rat::from_frac(rng.gen_range(-5..=5i64), rng.gen_range(1..=3i64));
        let c2 = Rat::from_frac(rng.gen_range(-5..=5i64), rng.gen_range(1..=3i64));
        let a = &gens[rng.gen_range(0..gens.len())];
        let b = &gens[rng.gen_range(0..gens.len())];
        let mut p = &a.scale(&c1) + &(a * b).scale(&c2);
        if p.is_zero() {
            p = e3.clone();
        }
        out.push(p);
    }
    out.truncate(count.max(3));
    for p in &out {
        assert!(in_a2_ring(p), "sample out of the A2 ring");
    }
    out
}

/// The three-variable realization preserves its ring on seeded samples.
pub fn verify_a2_preservation(samples: usize, seed: u64) -> PreservationReport {
    let td = make_m0_family().tilde_d0;
    let mut failures = Vec::new();
    for (i, p) in a2_ring_samples(samples, seed).iter().enumerate() {
        match apply_to_poly(&td, p) {
            Ok(q) => {
                if !in_a2_ring(&q) {
                    failures.push(format!("sample {}: image left the ring", i));
                }
            }
            Err(e) => failures.push(format!("sample {}: {}", i, e)),
        }
    }
    PreservationReport {
        operator: "a2".into(),
        samples,
        failures,
    }
}

fn zero_report(name: &str, op: &DifferenceOperator) -> IdentityReport {
    let exact = op.is_zero_operator();
    let on_line = match restrict_line(op) {
        Ok(r) => r.is_zero_operator(),
        Err(_) => false,
    };
    IdentityReport {
        identity_name: name.into(),
        holds_exactly: exact,
        holds_on_line: on_line,
        witness: if exact {
            None
        } else {
            op.terms
                .first()
                .map(|t| format!("first nonzero coefficient at shift {:?}", t.shift_u))
        },
    }
}

fn line_equality_report(
    name: &str,
    a: &DifferenceOperator,
    b: &DifferenceOperator,
) -> IdentityReport {
    let exact = a.eq_operator(b);
    let (ra, rb) = (restrict_line(a), restrict_line(b));
    let on_line = match (&ra, &rb) {
        (Ok(x), Ok(y)) => x.eq_operator(y),
        _ => false,
    };
    IdentityReport {
        identity_name: name.into(),
        holds_exactly: exact,
        holds_on_line: on_line,
        witness: if on_line {
            None
        } else {
            Some("restrictions differ".into())
        },
    }
}

/// The five A1 identities: three commutators (zero exactly or on the line;
/// both recorded) and the two line-restricted product relations.
pub fn verify_a1_identities() -> Vec<IdentityReport> {
    let fam = make_m0_family();
    let mut out = Vec::new();
    out.push(zero_report("[D1, D2] = 0", &commutator(&fam.a1_d1, &fam.a1_d2)));
    out.push(zero_report(
        "[D1, Dmsl] = 0",
        &commutator(&fam.a1_d1, &fam.dmsl),
    ));
    out.push(zero_report(
        "[D2, Dmsl] = 0",
        &commutator(&fam.a1_d2, &fam.dmsl),
    ));
    // hatD0^2 ~ (Dmsl + 2)^3
    let lhs = compose(&fam.hat_d0, &fam.hat_d0);
    let msl2 = fam.dmsl.add_constant(&Rat::from_int(2));
    let rhs = compose(&compose(&msl2, &msl2), &msl2);
    out.push(line_equality_report("hatD0^2 ~ (Dmsl + 2)^3", &lhs, &rhs));
    // D1 D2 ~ 3 Dqm + 16 ~ 3 Dmsl^2 + 4
    let d1d2 = compose(&fam.a1_d1, &fam.a1_d2);
    let qm16 = fam.dqm.scale(&Rat::from_int(3)).add_constant(&Rat::from_int(16));
    out.push(line_equality_report("D1 D2 ~ 3 Dqm + 16", &d1d2, &qm16));
    let msl_sq = compose(&fam.dmsl, &fam.dmsl)
        .scale(&Rat::from_int(3))
        .add_constant(&Rat::from_int(4));
    out.push(line_equality_report("D1 D2 ~ 3 Dmsl^2 + 4", &d1d2, &msl_sq));
    out
}

/// Swap of the two variables as an operator conjugation: `T_(a,b)` becomes
/// `T_(b,a)` and coefficients swap arguments.
pub fn swap_variables(d: &DifferenceOperator) -> DifferenceOperator {
    let sub = vec![
        MultiPoly::<Rat>::var(2, 1),
        MultiPoly::<Rat>::var(2, 0),
    ];
    let swap_fun = |f: &crate::algebra::FactoredRatFun| {
        let num = f.num.substitute_linear(2, &sub);
        let mut den = std::collections::BTreeMap::new();
        let mut scalar = f.scalar.clone();
        for (form, m) in &f.den {
            let nf = AffineForm::new(
                &[
                    Rat::from_bigint(form.linear[1].clone()),
                    Rat::from_bigint(form.linear[0].clone()),
                ],
                &form.constant,
            );
            scalar = scalar / nf.scale.pow(*m);
            let mut canon = nf;
            canon.scale = Rat::one();
            *den.entry(canon).or_insert(0) += *m;
        }
        crate::algebra::FactoredRatFun { num, den, scalar }
    };
    DifferenceOperator {
        vars: 2,
        minus_one: d.minus_one,
        scalar: swap_fun(&d.scalar),
        terms: d
            .terms
            .iter()
            .map(|t| crate::diffop::OpTerm {
                shift_u: vec![t.shift_u[1].clone(), t.shift_u[0].clone()],
                shift_lattice: None,
                e_exp: None,
                coeff: swap_fun(&t.coeff),
            })
            .collect(),
    }
    .normalized()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffop::make_d2;
    use crate::diffop::quasiminuscule_doubled_a2;

    #[test]
    fn d0_preserves_ring() {
        let rep = verify_d0_preservation(5, 7);
        assert!(rep.passed(), "{:?}", rep);
    }

    #[test]
    fn a2_preserves_ring() {
        let rep = verify_a2_preservation(5, 11);
        assert!(rep.passed(), "{:?}", rep);
    }

    #[test]
    fn a2_membership_examples() {
        let z = |i: usize| MultiPoly::<Rat>::var(3, i);
        assert!(in_a2_ring(&(&(&z(0) + &z(1)) + &z(2))));
        let sq = &(&z(0) * &z(0)) + &(&(&z(1) * &z(1)) + &(&z(2) * &z(2)));
        assert!(in_a2_ring(&sq));
        assert!(!in_a2_ring(&(&z(0) - &z(1))));
    }

    #[test]
    fn a1_identities_hold() {
        let reports = verify_a1_identities();
        for r in &reports {
            assert!(
                r.holds_on_line,
                "{} fails on the line: {:?}",
                r.identity_name, r
            );
        }
        // the three commutators hold exactly in two variables as well
        for r in reports.iter().take(3) {
            assert!(r.holds_exactly, "{} not exact", r.identity_name);
        }
    }

    #[test]
    fn symmetry_under_swap() {
        let fam = make_m0_family();
        assert!(swap_variables(&fam.dmsl).eq_operator(&fam.dmsl));
        assert!(!swap_variables(&fam.a1_d1).eq_operator(&fam.a1_d1));
        assert!(swap_variables(&fam.a1_d1).eq_operator(&fam.a1_d2));
        assert!(swap_variables(&fam.hat_d0).eq_operator(&fam.hat_d0));
    }

    #[test]
    fn d2_m0_is_quasiminuscule() {
        assert!(make_d2(0).eq_operator(&quasiminuscule_doubled_a2()));
    }

    #[test]
    fn line_identities_on_test_functions() {
        // both sides of hatD0^2 ~ (Dmsl+2)^3 agree on univariate
        // quasi-invariant samples f(w) with f(1) = f(-1)
        let fam = make_m0_family();
        let lhs = restrict_line(&compose(&fam.hat_d0, &fam.hat_d0)).unwrap();
        let msl2 = fam.dmsl.add_constant(&Rat::from_int(2));
        let rhs = restrict_line(&compose(&compose(&msl2, &msl2), &msl2)).unwrap();
        // f(w) = w^2 satisfies f(1) = f(-1)
        let w = MultiPoly::<Rat>::var(1, 0);
        let f = &w * &w;
        let a = apply_to_poly(&lhs, &f).unwrap();
        let b = apply_to_poly(&rhs, &f).unwrap();
        assert_eq!(a, b);
    }
}
