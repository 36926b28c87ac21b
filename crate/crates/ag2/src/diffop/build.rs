//! Constructors for the AG2 dual difference operators and the m=0 family.
//! Coefficients are built literally as the displayed products of factors
//! `(1 - c / (<gamma,z> + d))`, with the selection predicates
//! `<tau, (2 gamma)^v> = value` evaluated exactly over the Weyl orbits.

use super::{DifferenceOperator, OpTerm};
use crate::algebra::{mul_affine, AffineForm, FactoredRatFun, MultiPoly, Rat};
use crate::lattice::{
    e_exponent, gram_inner, norm2, u_form_shifted, LatticeVector, LONG_ROOTS, SHORT_ROOTS,
};
use std::collections::BTreeMap;

/// Accumulates a product of affine factors `(1 - c/(<gamma,z> + d))` into a
/// reduced rational function.
struct CoeffBuilder {
    num: MultiPoly<Rat>,
    den: BTreeMap<AffineForm, u32>,
    scalar: Rat,
}

impl CoeffBuilder {
    fn new(scalar: Rat) -> Self {
        CoeffBuilder {
            num: MultiPoly::one(2),
            den: BTreeMap::new(),
            scalar,
        }
    }

    /// Multiply by `(1 - c/(<gamma,z> + d)) = (<gamma,z> + d - c)/(<gamma,z> + d)`.
    fn factor(&mut self, gamma: LatticeVector, d: &Rat, c: &Rat) {
        let lin = [Rat::from_int(gamma.0), Rat::from_int(gamma.1)];
        // numerator: <gamma,z> + d - c, multiplied in raw form
        let num_form = AffineForm::new(&lin, &(d - c));
        self.num = mul_affine(&self.num, &num_form).scale(&num_form.scale);
        // denominator: normalized form, scale folded into the scalar
        let den_form = AffineForm::new(&lin, d);
        self.scalar = &self.scalar / &den_form.scale;
        let mut canon = den_form;
        canon.scale = Rat::one();
        *self.den.entry(canon).or_insert(0) += 1;
    }

    fn finish(self) -> FactoredRatFun {
        FactoredRatFun {
            num: self.num,
            den: self.den,
            scalar: self.scalar,
        }
        .reduce()
    }
}

fn signed_orbit(roots: &[LatticeVector; 3]) -> Vec<LatticeVector> {
    let mut v: Vec<LatticeVector> = roots.iter().copied().collect();
    v.extend(roots.iter().map(|&r| -r));
    v
}

/// `<tau, (2 gamma)^v> = <tau, gamma>/gamma^2` as an exact rational.
fn coroot_pairing(tau: LatticeVector, gamma: LatticeVector) -> Rat {
    Rat::from_frac(gram_inner(tau, gamma), norm2(gamma))
}

fn lattice_term(tau: LatticeVector, coeff: FactoredRatFun) -> OpTerm {
    let g = e_exponent(tau);
    OpTerm {
        shift_u: vec![Rat::from_int(g.0 as i64), Rat::from_int(g.1 as i64)],
        shift_lattice: Some(tau),
        e_exp: Some(g),
        coeff,
    }
}

fn rat(n: i64) -> Rat {
    Rat::from_int(n)
}

/// First dual operator: 12 shifts `2 eps beta_j`, `2 eps alpha_j`.
pub fn make_d1(m: u32) -> DifferenceOperator {
    let m = m as i64;
    let shorts = signed_orbit(&SHORT_ROOTS);
    let longs = signed_orbit(&LONG_ROOTS);
    let mut terms = Vec::new();
    for &beta in &shorts {
        // tau = 2 beta with beta = eps beta_j running over all six signed
        // short roots
        let tau = 2 * beta;
        let b2 = rat(norm2(beta));
        let mut cb = CoeffBuilder::new(rat(3));
        for &g in &shorts {
            if coroot_pairing(tau, g) == Rat::one() {
                let g2 = rat(norm2(g));
                cb.factor(g, &rat(0), &(&rat(3 * m + 2) * &g2));
                cb.factor(g, &(&rat(2) * &g2), &(&rat(-3 * m) * &g2));
                cb.factor(g, &(-&g2), &(&rat(3 * m - 1) * &g2));
            }
        }
        for &g in &longs {
            if coroot_pairing(tau, g) == Rat::one() {
                cb.factor(g, &rat(0), &(&rat(m) * &rat(norm2(g))));
            }
        }
        cb.factor(beta, &rat(0), &(&rat(3 * m + 2) * &b2));
        cb.factor(beta, &b2, &(&rat(3 * m) * &b2));
        terms.push(lattice_term(tau, cb.finish()));
    }
    for &alpha in &longs {
        let tau = 2 * alpha;
        let a2 = rat(norm2(alpha));
        let mut cb = CoeffBuilder::new(rat(1));
        for &g in &shorts {
            if coroot_pairing(tau, g) == rat(3) {
                let g2 = rat(norm2(g));
                cb.factor(g, &rat(0), &(&rat(3 * m + 2) * &g2));
                cb.factor(g, &g2, &(&rat(3 * m + 1) * &g2));
                cb.factor(g, &(&rat(2) * &g2), &(&rat(3 * m) * &g2));
            }
        }
        for &g in &longs {
            if coroot_pairing(tau, g) == Rat::one() {
                cb.factor(g, &rat(0), &(&rat(m) * &rat(norm2(g))));
            }
        }
        cb.factor(alpha, &rat(0), &(&rat(m) * &a2));
        cb.factor(alpha, &a2, &(&rat(m) * &a2));
        terms.push(lattice_term(tau, cb.finish()));
    }
    DifferenceOperator {
        vars: 2,
        minus_one: true,
        scalar: FactoredRatFun::zero(2),
        terms,
    }
    .normalized()
}

/// Leading scalars of the second operator: `lambda_tau = g_{tau/2}` under
/// the coupling convention.
pub fn lambda_d2(m: u32, tau_half: LatticeVector, doubled: bool) -> Rat {
    let m = m as i64;
    if doubled {
        // tau = 4 eps beta_j: multiplicity of 2 beta is 1, of 4 beta is 0
        rat(8 * norm2(tau_half / 2))
    } else if norm2(tau_half) == 2 {
        rat(9 * m * (m + 1) * norm2(tau_half))
    } else {
        rat(m * (m + 1) * norm2(tau_half))
    }
}

impl std::ops::Div<i64> for LatticeVector {
    type Output = LatticeVector;
    fn div(self, k: i64) -> LatticeVector {
        LatticeVector(self.0 / k, self.1 / k)
    }
}

/// Second dual operator: 18 shifts `4 eps beta_j`, `2 eps beta_j`,
/// `2 eps alpha_j`. Terms whose leading scalar vanishes (all the 2-beta and
/// 2-alpha terms at m = 0) are dropped by normalization.
pub fn make_d2(m: u32) -> DifferenceOperator {
    let mi = m as i64;
    let shorts = signed_orbit(&SHORT_ROOTS);
    let longs = signed_orbit(&LONG_ROOTS);
    let mut terms = Vec::new();
    // tau = 4 eps beta_j
    for &beta in &shorts {
        let tau = 4 * beta;
        let b2 = rat(norm2(beta));
        let lambda = rat(8 * norm2(beta));
        let mut cb = CoeffBuilder::new(lambda);
        for &g in &longs {
            if coroot_pairing(tau, g) == rat(2) {
                let g2 = rat(norm2(g));
                cb.factor(g, &rat(0), &(&rat(mi) * &g2));
                cb.factor(g, &g2, &(&rat(mi) * &g2));
            }
        }
        for &g in &shorts {
            if coroot_pairing(tau, g) == rat(2) {
                let g2 = rat(norm2(g));
                cb.factor(g, &rat(0), &(&rat(3 * mi + 2) * &g2));
                cb.factor(g, &g2, &(&rat(3 * mi) * &g2));
            }
        }
        cb.factor(beta, &rat(0), &(&rat(3 * mi + 2) * &b2));
        cb.factor(beta, &b2, &(&rat(3 * mi) * &b2));
        cb.factor(beta, &(&rat(2) * &b2), &(&rat(3 * mi + 2) * &b2));
        cb.factor(beta, &(&rat(3) * &b2), &(&rat(3 * mi) * &b2));
        terms.push(lattice_term(tau, cb.finish()));
    }
    // tau = 2 eps beta_j
    for &beta in &shorts {
        let tau = 2 * beta;
        let b2 = rat(norm2(beta));
        let lambda = rat(9 * mi * (mi + 1)) * rat(norm2(beta));
        let mut cb = CoeffBuilder::new(lambda);
        for &g in &longs {
            let sel = coroot_pairing(tau, g);
            if sel.is_zero() {
                let g2 = rat(norm2(g));
                cb.factor(g, &(-&g2), &(&Rat::from_frac(2, 3) * &g2));
            } else if sel == Rat::one() {
                cb.factor(g, &rat(0), &(&rat(mi) * &rat(norm2(g))));
            }
        }
        for &g in &shorts {
            if coroot_pairing(tau, g) == Rat::one() {
                let g2 = rat(norm2(g));
                cb.factor(g, &rat(0), &(&rat(3 * mi + 2) * &g2));
                cb.factor(g, &(&rat(2) * &g2), &(&rat(-3 * mi) * &g2));
                cb.factor(g, &(-&g2), &(&rat(3 * mi - 1) * &g2));
            }
        }
        cb.factor(beta, &rat(0), &(&rat(3 * mi + 2) * &b2));
        cb.factor(beta, &b2, &(&rat(3 * mi) * &b2));
        cb.factor(beta, &(&rat(3) * &b2), &(&rat(-4) * &b2));
        cb.factor(beta, &(-&b2), &(&rat(4) * &b2));
        terms.push(lattice_term(tau, cb.finish()));
    }
    // tau = 2 eps alpha_j
    for &alpha in &longs {
        let tau = 2 * alpha;
        let a2 = rat(norm2(alpha));
        let lambda = rat(mi * (mi + 1)) * rat(norm2(alpha));
        let mut cb = CoeffBuilder::new(lambda);
        for &g in &shorts {
            let sel = coroot_pairing(tau, g);
            if sel == rat(3) {
                let g2 = rat(norm2(g));
                cb.factor(g, &rat(0), &(&rat(3 * mi + 2) * &g2));
                cb.factor(g, &g2, &(&rat(3 * mi + 1) * &g2));
                cb.factor(g, &(&rat(2) * &g2), &(&rat(3 * mi) * &g2));
            } else if sel.is_zero() {
                let g2 = rat(norm2(g));
                cb.factor(g, &(-&g2), &(&rat(6) * &g2));
            }
        }
        for &g in &longs {
            if coroot_pairing(tau, g) == Rat::one() {
                cb.factor(g, &rat(0), &(&rat(mi) * &rat(norm2(g))));
            }
        }
        cb.factor(alpha, &rat(0), &(&rat(mi) * &a2));
        cb.factor(alpha, &a2, &(&rat(mi) * &a2));
        terms.push(lattice_term(tau, cb.finish()));
    }
    DifferenceOperator {
        vars: 2,
        minus_one: true,
        scalar: FactoredRatFun::zero(2),
        terms,
    }
    .normalized()
}

/// The quasiminuscule Macdonald-Ruijsenaars operator for the doubled A2
/// root system `{±4 beta_j}` with multiplicity 1, built independently of
/// the AG2 coefficients; normalized by the coupling constant
/// `lambda = tau^2/2 = 16`.
pub fn quasiminuscule_doubled_a2() -> DifferenceOperator {
    let roots: Vec<LatticeVector> = signed_orbit(&SHORT_ROOTS)
        .into_iter()
        .map(|b| 4 * b)
        .collect();
    let mut terms = Vec::new();
    for &tau in &roots {
        let t2 = rat(norm2(tau));
        let half = &t2 * &Rat::from_frac(1, 2);
        let mut cb = CoeffBuilder::new(half.clone());
        cb.factor(tau, &rat(0), &half);
        cb.factor(tau, &half, &half);
        for &g in &roots {
            // coroot pairing with g^v = 2g/g^2
            if &rat(2) * &coroot_pairing(tau, g) == Rat::one() {
                cb.factor(g, &rat(0), &(&rat(norm2(g)) * &Rat::from_frac(1, 2)));
            }
        }
        terms.push(lattice_term(tau, cb.finish()));
    }
    DifferenceOperator {
        vars: 2,
        minus_one: true,
        scalar: FactoredRatFun::zero(2),
        terms,
    }
    .normalized()
}

/// The m=0 operator on the G2 lattice: 12 shifts over the G2 roots.
pub fn make_d0() -> DifferenceOperator {
    let shorts = signed_orbit(&SHORT_ROOTS);
    let longs = signed_orbit(&LONG_ROOTS);
    let mut terms = Vec::new();
    for &tau in &shorts {
        let mut cb = CoeffBuilder::new(rat(3));
        for &g in &shorts {
            let sel = coroot_pairing(tau, g);
            let g2 = rat(norm2(g));
            let half = &g2 * &Rat::from_frac(1, 2);
            if sel == Rat::from_frac(1, 2) {
                cb.factor(g, &(-&half), &half);
            } else if sel == Rat::one() {
                cb.factor(g, &rat(0), &g2);
            }
        }
        terms.push(lattice_term(tau, cb.finish()));
    }
    for &tau in &longs {
        let mut cb = CoeffBuilder::new(rat(1));
        for &g in &shorts {
            if coroot_pairing(tau, g) == Rat::from_frac(3, 2) {
                let g2 = rat(norm2(g));
                let half = &g2 * &Rat::from_frac(1, 2);
                cb.factor(g, &half, &(&rat(3) * &half));
            }
        }
        terms.push(lattice_term(tau, cb.finish()));
    }
    DifferenceOperator {
        vars: 2,
        minus_one: true,
        scalar: FactoredRatFun::zero(2),
        terms,
    }
    .normalized()
}

/// Standard-basis shift vectors for the A2/A1 realizations.
fn std_term(shift: &[i64], coeff: FactoredRatFun) -> OpTerm {
    OpTerm {
        shift_u: shift.iter().map(|&s| Rat::from_int(s)).collect(),
        shift_lattice: None,
        e_exp: None,
        coeff,
    }
}

/// Factor `(1 - c/(z_i - z_j + d))` in `n` standard variables.
fn std_factor(n: usize, i: usize, j: usize, d: i64, c: i64) -> FactoredRatFun {
    let mut lin = vec![Rat::zero(); n];
    lin[i] = Rat::one();
    lin[j] = Rat::from_int(-1);
    let num_form = AffineForm::new(&lin, &Rat::from_int(d - c));
    let den_form = AffineForm::new(&lin, &Rat::from_int(d));
    let num = mul_affine(&MultiPoly::one(n), &num_form).scale(&num_form.scale);
    let mut den = BTreeMap::new();
    let scalar = Rat::one() / den_form.scale.clone();
    let mut canon = den_form;
    canon.scale = Rat::one();
    den.insert(canon, 1);
    FactoredRatFun { num, den, scalar }
}

/// The three-variable A2 realization: plain form `sum c_tau T_tau` over
/// S1 (triple-step shifts) and S2 (2e_i + e_j shifts).
pub fn make_tilde_d0() -> DifferenceOperator {
    let (s1, s2) = tilde_d0_shift_sets();
    let mut terms = Vec::new();
    for tau in &s2 {
        let mut coeff = FactoredRatFun::constant(3, rat(3));
        for i in 0..3 {
            for j in 0..3 {
                if i == j {
                    continue;
                }
                let pairing = tau[i] - tau[j];
                if pairing == 1 {
                    coeff = coeff.mul(&std_factor(3, i, j, -1, 1));
                } else if pairing == 2 {
                    coeff = coeff.mul(&std_factor(3, i, j, 0, 2));
                }
            }
        }
        terms.push(std_term(tau, coeff.reduce()));
    }
    for tau in &s1 {
        let mut coeff = FactoredRatFun::one(3);
        for i in 0..3 {
            for j in 0..3 {
                if i != j && tau[i] - tau[j] == 3 {
                    coeff = coeff.mul(&std_factor(3, i, j, 1, 3));
                }
            }
        }
        terms.push(std_term(tau, coeff.reduce()));
    }
    DifferenceOperator {
        vars: 3,
        minus_one: false,
        scalar: FactoredRatFun::zero(3),
        terms,
    }
    .normalized()
}

/// The shift sets of the A2 realization. The index constraints on the
/// second part of S1 admit only one reading once `{i,j,k}` must exhaust
/// `{1,2,3}`; the membership characterization by pairings
/// `|<tau, e_i - e_j>| in {0,3}` (S1) or `{0,1,2}` (S2) pins it down and is
/// asserted here.
pub fn tilde_d0_shift_sets() -> (Vec<Vec<i64>>, Vec<Vec<i64>>) {
    let mut s1: Vec<Vec<i64>> = vec![vec![3, 0, 0], vec![0, 3, 0], vec![0, 0, 3]];
    for i in 0..3 {
        for j in (i + 1)..3 {
            let k = 3 - i - j;
            let mut v = vec![0i64; 3];
            v[i] = 2;
            v[j] = 2;
            v[k] = -1;
            s1.push(v);
        }
    }
    let mut s2 = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                let mut v = vec![0i64; 3];
                v[i] = 2;
                v[j] = 1;
                s2.push(v);
            }
        }
    }
    // membership characterization cross-check
    for v in &s1 {
        for i in 0..3 {
            for j in 0..3 {
                let p = (v[i] - v[j]).abs();
                debug_assert!(p == 0 || p == 3);
            }
        }
    }
    for v in &s2 {
        for i in 0..3 {
            for j in 0..3 {
                let p = (v[i] - v[j]).abs();
                debug_assert!(p <= 2);
            }
        }
    }
    (s1, s2)
}

/// The m=0 reduction family.
pub struct M0Family {
    pub d0: DifferenceOperator,
    pub tilde_d0: DifferenceOperator,
    pub hat_d0: DifferenceOperator,
    pub a1_d1: DifferenceOperator,
    pub a1_d2: DifferenceOperator,
    pub dmsl: DifferenceOperator,
    pub dqm: DifferenceOperator,
}

pub fn make_m0_family() -> M0Family {
    // A1 operators in two standard variables
    let a1_d1 = DifferenceOperator {
        vars: 2,
        minus_one: false,
        scalar: FactoredRatFun::zero(2),
        terms: vec![
            std_term(&[1, 2], std_factor(2, 1, 0, -1, 1).mul_scalar(&rat(3))),
            std_term(&[3, 0], std_factor(2, 0, 1, 1, 3)),
        ],
    }
    .normalized();
    let a1_d2 = DifferenceOperator {
        vars: 2,
        minus_one: false,
        scalar: FactoredRatFun::zero(2),
        terms: vec![
            std_term(&[2, 1], std_factor(2, 0, 1, -1, 1).mul_scalar(&rat(3))),
            std_term(&[0, 3], std_factor(2, 1, 0, 1, 3)),
        ],
    }
    .normalized();
    let hat_d0 = a1_d1.add_op(&a1_d2);
    let dmsl = DifferenceOperator {
        vars: 2,
        minus_one: false,
        scalar: FactoredRatFun::zero(2),
        terms: vec![
            std_term(&[2, 0], std_factor(2, 0, 1, 0, 2)),
            std_term(&[0, 2], std_factor(2, 1, 0, 0, 2)),
        ],
    }
    .normalized();
    let dqm = DifferenceOperator {
        vars: 2,
        minus_one: true,
        scalar: FactoredRatFun::zero(2),
        terms: vec![
            std_term(
                &[4, 0],
                std_factor(2, 0, 1, 0, 2).mul(&std_factor(2, 0, 1, 2, 2)),
            ),
            std_term(
                &[0, 4],
                std_factor(2, 1, 0, 0, 2).mul(&std_factor(2, 1, 0, 2, 2)),
            ),
        ],
    }
    .normalized();
    M0Family {
        d0: make_d0(),
        tilde_d0: make_tilde_d0(),
        hat_d0,
        a1_d1,
        a1_d2,
        dmsl,
        dqm,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Degree;
    use crate::lattice::{ALPHA1, BETA1};

    #[test]
    fn d1_shape() {
        for m in [0u32, 1, 2] {
            let d = make_d1(m);
            assert_eq!(d.terms.len(), 12);
            for t in &d.terms {
                assert_eq!(t.coeff.degree(), Degree::Of(0), "deg a_tau must be 0");
            }
        }
    }

    #[test]
    fn d1_kappa_values() {
        // constant term at infinity: ratio of leading homogeneous parts
        let d = make_d1(1);
        let t = d.term_for_lattice(2 * BETA1).unwrap();
        // numerator degree equals total denominator multiplicity
        let n = t.coeff.num.degree().as_int().unwrap();
        let dd: i64 = t.coeff.den.values().map(|&m| m as i64).sum();
        assert_eq!(n, dd);
        let ta = d.term_for_lattice(2 * ALPHA1).unwrap();
        assert_eq!(
            ta.coeff.num.degree().as_int().unwrap(),
            ta.coeff.den.values().map(|&m| m as i64).sum::<i64>()
        );
    }

    #[test]
    fn d1_zero_at_shifted_point() {
        // a_{2 beta1}(z) vanishes on <beta1, z> = (3m+2) beta1^2
        for m in [0u32, 1, 2] {
            let d = make_d1(m);
            let t = d.term_for_lattice(2 * BETA1).unwrap();
            let c = Rat::from_int((3 * m as i64 + 2) * 2);
            // evaluate numerator on the line u1 = (3m+2)*2, generic u2
            let pt = [c, Rat::from_frac(7, 3)];
            assert!(t.coeff.num.eval_rat(&pt).is_zero());
        }
    }

    #[test]
    fn d2_shape_and_lambdas() {
        let d = make_d2(1);
        assert_eq!(d.terms.len(), 18);
        let d0 = make_d2(0);
        // at m = 0 only the 4-beta shifts survive
        assert_eq!(d0.terms.len(), 6);
        for t in &d0.terms {
            let tau = t.shift_lattice.unwrap();
            assert_eq!(norm2(tau), 32);
        }
    }

    #[test]
    fn d2_m0_equals_quasiminuscule() {
        let d2 = make_d2(0);
        let qm = quasiminuscule_doubled_a2();
        assert!(d2.eq_operator(&qm));
    }

    #[test]
    fn tilde_d0_sets() {
        let (s1, s2) = tilde_d0_shift_sets();
        assert_eq!(s1.len(), 6);
        assert_eq!(s2.len(), 6);
        assert!(s1.contains(&vec![2, 2, -1]));
        assert!(s2.contains(&vec![2, 1, 0]));
    }

    #[test]
    fn a1_coefficients_match_displays() {
        let fam = make_m0_family();
        // D1 coefficient of T_{3e1} is 1 - 3/(z1 - z2 + 1)
        let t = fam.a1_d1.term_for_shift(&[rat(3), rat(0)]).unwrap();
        let expect = std_factor(2, 0, 1, 1, 3);
        assert!(t.coeff.eq_ratfun(&expect));
        // Dmsl coefficient of T_{2e1} is 1 - 2/(z1 - z2)
        let t = fam.dmsl.term_for_shift(&[rat(2), rat(0)]).unwrap();
        assert!(t.coeff.eq_ratfun(&std_factor(2, 0, 1, 0, 2)));
    }

    #[test]
    fn d0_constant_sums_to_24() {
        // sum of all 12 coefficients is identically 24, so that
        // D0 = -24 + sum a_tau T_tau
        let d0 = make_d0();
        let mut s = FactoredRatFun::zero(2);
        for t in &d0.terms {
            s = s.add(&t.coeff);
        }
        let s = s.reduce();
        assert!(s.eq_ratfun(&FactoredRatFun::constant(2, rat(24))));
    }

    #[test]
    fn tilde_d0_row_sums_to_24() {
        let td = make_tilde_d0();
        let mut s = FactoredRatFun::zero(3);
        for t in &td.terms {
            s = s.add(&t.coeff);
        }
        assert!(s.reduce().eq_ratfun(&FactoredRatFun::constant(3, rat(24))));
    }
}
