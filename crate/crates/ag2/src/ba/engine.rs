//! The iteration engine: exponential polynomials stored grouped by
//! E-exponent with dense integer z-polynomials per group, and the fast
//! application of `D` or `D - mu(x)` with per-group pole cancellation.

use crate::algebra::{EExp, IntForm, IntPoly2, LaurentPoly, MultiPoly, Rat};
use crate::diffop::{DifferenceOperator, ExpPolynomial, OpError};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use std::collections::{BTreeMap, BTreeSet};

/// `sum_w E^w p_w(z) e^<z,x>` with integer polynomials `p_w` and one global
/// rational scale.
#[derive(Clone, Debug)]
pub struct EGrouped {
    pub groups: BTreeMap<EExp, IntPoly2>,
    pub scale: Rat,
}

impl EGrouped {
    pub fn from_int_poly(p: IntPoly2) -> Self {
        let mut groups = BTreeMap::new();
        if !p.is_zero() {
            groups.insert((0, 0), p);
        }
        EGrouped {
            groups,
            scale: Rat::one(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.groups.is_empty()
    }

    /// Maximum z-degree across groups; `None` when zero.
    pub fn z_degree(&self) -> Option<usize> {
        self.groups.values().filter_map(|p| p.total_degree()).max()
    }

    pub fn entry_count(&self) -> usize {
        self.groups
            .values()
            .map(|p| p.data.iter().filter(|c| !c.is_zero()).count())
            .sum()
    }

    /// Laurent-polynomial coefficient of the z-monomial (i, j).
    pub fn z_coefficient(&self, i: usize, j: usize) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (w, p) in &self.groups {
            if i <= p.d1 && j <= p.d2 {
                let v = p.get(i, j);
                if !v.is_zero() {
                    out.add_term(*w, &(&Rat::from_bigint(v.clone()) * &self.scale));
                }
            }
        }
        out
    }

    /// Convert to the public exponential-polynomial form.
    pub fn to_exp_polynomial(&self) -> ExpPolynomial {
        use crate::algebra::{Coeff, LaurentFrac, Mono};
        let mut poly = MultiPoly::<LaurentFrac>::zero(2);
        let d1 = self.groups.values().map(|p| p.d1).max().unwrap_or(0);
        let d2 = self.groups.values().map(|p| p.d2).max().unwrap_or(0);
        for i in 0..=d1 {
            for j in 0..=d2 {
                let c = self.z_coefficient(i, j);
                if !c.is_zero() {
                    poly.terms.insert(
                        Mono(vec![i as u16, j as u16]),
                        LaurentFrac::from_poly(c),
                    );
                }
            }
        }
        ExpPolynomial { poly }
    }

    /// Build from an exponential polynomial with Laurent-polynomial
    /// coefficients (denominators must be trivial).
    pub fn from_exp_polynomial(f: &ExpPolynomial) -> Self {
        use num_integer::Integer;
        assert_eq!(f.poly.vars, 2);
        // common rational denominator over all Laurent coefficients
        let mut lcm = BigInt::one();
        for c in &f.poly.terms {
            assert!(
                c.1.is_polynomial(),
                "expected polynomial Laurent coefficients"
            );
            for v in c.1.num.terms.values() {
                lcm = lcm.lcm(v.denom());
            }
        }
        let mut groups: BTreeMap<EExp, IntPoly2> = BTreeMap::new();
        let d1 = f
            .poly
            .terms
            .keys()
            .map(|m| m.0[0] as usize)
            .max()
            .unwrap_or(0);
        let d2 = f
            .poly
            .terms
            .keys()
            .map(|m| m.0[1] as usize)
            .max()
            .unwrap_or(0);
        for (mono, c) in &f.poly.terms {
            // fold the fraction's den-monomial into exponents
            let den = &c.den;
            assert_eq!(den.num_terms(), 1);
            let (de, dc) = den.terms.iter().next().unwrap();
            for (e, v) in &c.num.terms {
                let w = (e.0 - de.0, e.1 - de.1);
                let val = v / dc;
                let entry = groups
                    .entry(w)
                    .or_insert_with(|| IntPoly2::zero(d1, d2));
                let num = val.numer() * (&lcm / val.denom());
                let k = entry.idx(mono.0[0] as usize, mono.0[1] as usize);
                entry.data[k] += num;
            }
        }
        let groups = groups
            .into_iter()
            .filter_map(|(w, p)| {
                if p.is_zero() {
                    None
                } else {
                    Some((w, p.trimmed()))
                }
            })
            .collect();
        EGrouped {
            groups,
            scale: Rat(num_rational::BigRational::new(BigInt::one(), lcm)),
        }
    }

    /// Multiply by a Laurent polynomial in E (cheap sparse product across
    /// groups).
    pub fn mul_laurent(&self, l: &LaurentPoly) -> EGrouped {
        use num_integer::Integer;
        let mut lcm = BigInt::one();
        for v in l.terms.values() {
            lcm = lcm.lcm(v.denom());
        }
        let mut groups: BTreeMap<EExp, IntPoly2> = BTreeMap::new();
        for (e, v) in &l.terms {
            let k = v.numer() * (&lcm / v.denom());
            if k.is_zero() {
                continue;
            }
            for (w, p) in &self.groups {
                let target = (w.0 + e.0, w.1 + e.1);
                match groups.get_mut(&target) {
                    Some(acc) => {
                        let acc2 = if acc.d1 >= p.d1 && acc.d2 >= p.d2 {
                            acc
                        } else {
                            let grown = acc.resized(acc.d1.max(p.d1), acc.d2.max(p.d2));
                            *acc = grown;
                            acc
                        };
                        acc2.add_assign_scaled(p, &k);
                    }
                    None => {
                        let mut q = p.clone();
                        q.scale_assign(&k);
                        groups.insert(target, q);
                    }
                }
            }
        }
        let groups = groups
            .into_iter()
            .filter(|(_, p)| !p.is_zero())
            .map(|(w, p)| (w, p.trimmed()))
            .collect();
        EGrouped {
            groups,
            scale: &self.scale * &Rat(num_rational::BigRational::new(BigInt::one(), lcm)),
        }
    }

    pub fn sub(&self, other: &EGrouped) -> EGrouped {
        // align scales: self.scale = a, other.scale = b; use gcd-free common
        // representation scale s with integer multipliers
        let a = &self.scale;
        let b = &other.scale;
        // common scale: a/b rational => multiply others
        // s = gcd-like: use scale = a*b / lcm-ish; simplest: scale = product
        // of 1/(den lcm) ... here: represent as (a) and express other in
        // units of a: factor = b / a must be rational; multiply other's
        // integers by num, self's by den.
        let f = &b.0 / &a.0;
        let (fn_, fd) = (f.numer().clone(), f.denom().clone());
        let mut groups: BTreeMap<EExp, IntPoly2> = BTreeMap::new();
        for (w, p) in &self.groups {
            let mut q = p.clone();
            q.scale_assign(&fd);
            groups.insert(*w, q);
        }
        for (w, p) in &other.groups {
            match groups.get_mut(w) {
                Some(acc) => {
                    if acc.d1 < p.d1 || acc.d2 < p.d2 {
                        *acc = acc.resized(acc.d1.max(p.d1), acc.d2.max(p.d2));
                    }
                    acc.add_assign_scaled(p, &-fn_.clone());
                }
                None => {
                    let mut q = p.clone();
                    q.scale_assign(&-fn_.clone());
                    groups.insert(*w, q);
                }
            }
        }
        let groups = groups
            .into_iter()
            .filter(|(_, p)| !p.is_zero())
            .map(|(w, p)| (w, p.trimmed()))
            .collect();
        EGrouped {
            groups,
            scale: Rat(&a.0 / &fd),
        }
    }
}

/// A difference operator pre-compiled for the integer kernel.
pub struct PreparedOp {
    pub terms: Vec<PreparedTerm>,
}

pub struct PreparedTerm {
    pub g: EExp,
    pub shift: (i64, i64),
    pub kappa: BigInt,
    /// numerator including the coefficient scalar, as sparse integer terms
    pub num: Vec<(u16, u16, BigInt)>,
    pub den: Vec<IntForm>,
}

impl PreparedOp {
    pub fn compile(d: &DifferenceOperator) -> PreparedOp {
        assert!(d.minus_one, "engine expects (T - 1)-form operators");
        assert_eq!(d.vars, 2);
        let mut terms = Vec::new();
        for t in &d.terms {
            let g = t.e_exp.expect("lattice operator expected");
            let shift = (
                i64::try_from(t.shift_u[0].numer().clone()).unwrap(),
                i64::try_from(t.shift_u[1].numer().clone()).unwrap(),
            );
            assert!(t.shift_u[0].is_integer() && t.shift_u[1].is_integer());
            let kappa_rat = crate::diffop::kappa_at_infinity(&t.coeff);
            assert!(kappa_rat.is_integer(), "non-integer leading scalar");
            let kappa = kappa_rat.numer().clone();
            let scaled = t.coeff.num.scale(&t.coeff.scalar);
            let (ip, lcm) = IntPoly2::from_multipoly(&scaled);
            assert!(lcm.is_one(), "non-integer coefficient numerator");
            let mut num = Vec::new();
            for i in 0..=ip.d1 {
                for j in 0..=ip.d2 {
                    let v = ip.get(i, j);
                    if !v.is_zero() {
                        num.push((i as u16, j as u16, v.clone()));
                    }
                }
            }
            let mut den = Vec::new();
            for (form, mult) in &t.coeff.den {
                assert_eq!(*mult, 1, "simple poles expected");
                assert!(form.constant.is_integer());
                den.push(IntForm {
                    a: form.linear[0].clone(),
                    b: form.linear[1].clone(),
                    c: form.constant.numer().clone(),
                });
            }
            terms.push(PreparedTerm {
                g,
                shift,
                kappa,
                num,
                den,
            });
        }
        PreparedOp { terms }
    }
}

/// Apply `D` (or `D - mu`) to an exponential polynomial in grouped form.
/// Every output group must come out polynomial in z; a failed cancellation
/// reports the offending form.
pub fn apply_grouped(
    op: &PreparedOp,
    p: &EGrouped,
    subtract_mu: bool,
) -> Result<EGrouped, OpError> {
    if p.is_zero() {
        return Ok(p.clone());
    }
    // output support
    let mut support: BTreeSet<EExp> = BTreeSet::new();
    for w in p.groups.keys() {
        support.insert(*w);
        for t in &op.terms {
            support.insert((w.0 + t.g.0, w.1 + t.g.1));
        }
    }
    let results: Result<Vec<(EExp, IntPoly2)>, OpError> = support
        .into_iter()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|v| compute_group(op, p, v, subtract_mu).map(|q| (v, q)))
        .collect();
    let mut groups = BTreeMap::new();
    for (v, q) in results? {
        if !q.is_zero() {
            groups.insert(v, q.trimmed());
        }
    }
    Ok(EGrouped {
        groups,
        scale: p.scale.clone(),
    })
}

/// Weyl action data for the symmetrized application: the integer action on
/// E-exponents and the matching substitution on u-coordinates.
fn weyl_action_data() -> Vec<([[i64; 2]; 2], [[i64; 2]; 2])> {
    crate::lattice::weyl_elements()
        .iter()
        .map(|w| (w.e_substitution(), w.u_substitution()))
        .collect()
}

fn apply_e(n: &[[i64; 2]; 2], v: EExp) -> EExp {
    (
        (n[0][0] * v.0 as i64 + n[0][1] * v.1 as i64) as i32,
        (n[1][0] * v.0 as i64 + n[1][1] * v.1 as i64) as i32,
    )
}

/// Symmetrized application for Weyl-invariant inputs (the construction
/// iterates): compute one representative per E-orbit directly and
/// reconstruct the rest by the coordinate substitution
/// `p_{N(w) v} = p_v o S(w)`. A deterministic sample of reconstructed
/// groups is re-verified directly.
pub fn apply_grouped_symmetric(
    op: &PreparedOp,
    p: &EGrouped,
    subtract_mu: bool,
    spot_check_every: usize,
) -> Result<EGrouped, OpError> {
    if p.is_zero() {
        return Ok(p.clone());
    }
    let weyl = weyl_action_data();
    let mut support: BTreeSet<EExp> = BTreeSet::new();
    for w in p.groups.keys() {
        support.insert(*w);
        for t in &op.terms {
            support.insert((w.0 + t.g.0, w.1 + t.g.1));
        }
    }
    // orbit partition: representative -> [(target exponent, weyl index)]
    let mut reps: BTreeMap<EExp, Vec<(EExp, usize)>> = BTreeMap::new();
    let mut seen: BTreeSet<EExp> = BTreeSet::new();
    for &v in &support {
        if seen.contains(&v) {
            continue;
        }
        let mut orbit: Vec<(EExp, usize)> = Vec::new();
        for (k, (n, _)) in weyl.iter().enumerate() {
            let img = apply_e(n, v);
            if !orbit.iter().any(|(e, _)| *e == img) {
                orbit.push((img, k));
            }
        }
        debug_assert!(
            orbit.iter().all(|(e, _)| support.contains(e)),
            "support is not Weyl-closed"
        );
        for (e, _) in &orbit {
            seen.insert(*e);
        }
        reps.insert(v, orbit);
    }
    let rep_list: Vec<EExp> = reps.keys().copied().collect();
    let rep_results: Result<Vec<(EExp, IntPoly2)>, OpError> = rep_list
        .into_par_iter()
        .map(|v| compute_group(op, p, v, subtract_mu).map(|q| (v, q)))
        .collect();
    let rep_results: BTreeMap<EExp, IntPoly2> = rep_results?.into_iter().collect();
    // reconstruct all orbit members in parallel
    let jobs: Vec<(EExp, EExp, usize)> = reps
        .iter()
        .flat_map(|(rep, orbit)| orbit.iter().map(move |(e, k)| (*rep, *e, *k)))
        .collect();
    let reconstructed: Vec<(EExp, IntPoly2)> = jobs
        .into_par_iter()
        .map(|(rep, target, k)| {
            let q = &rep_results[&rep];
            let out = if target == rep {
                q.clone()
            } else {
                q.substitute_int2(weyl[k].1)
            };
            (target, out)
        })
        .collect();
    let mut groups: BTreeMap<EExp, IntPoly2> = BTreeMap::new();
    for (v, q) in reconstructed {
        if !q.is_zero() {
            groups.insert(v, q.trimmed());
        }
    }
    // deterministic spot checks of reconstructed groups against direct
    // computation
    if spot_check_every > 0 {
        let check: Vec<EExp> = groups
            .keys()
            .copied()
            .enumerate()
            .filter(|(i, v)| i % spot_check_every == 0 && !rep_results.contains_key(v))
            .map(|(_, v)| v)
            .collect();
        let ok = check
            .into_par_iter()
            .map(|v| {
                let direct = compute_group(op, p, v, subtract_mu)?;
                Ok(direct.trimmed() == groups[&v])
            })
            .collect::<Result<Vec<bool>, OpError>>()?;
        assert!(
            ok.iter().all(|&b| b),
            "symmetrized reconstruction disagrees with direct computation"
        );
    }
    Ok(EGrouped {
        groups,
        scale: p.scale.clone(),
    })
}

fn compute_group(
    op: &PreparedOp,
    p: &EGrouped,
    v: EExp,
    subtract_mu: bool,
) -> Result<IntPoly2, OpError> {
    let p_v = p.groups.get(&v);
    // contributing terms: tau with p_{v - g} present, or all when p_v != 0
    let mut contributions: Vec<(&PreparedTerm, Option<&IntPoly2>)> = Vec::new();
    for t in &op.terms {
        let w = (v.0 - t.g.0, v.1 - t.g.1);
        let pw = p.groups.get(&w);
        if pw.is_some() || p_v.is_some() {
            contributions.push((t, pw));
        }
    }
    if contributions.is_empty() {
        return Ok(IntPoly2::zero(0, 0));
    }
    // union of denominators over contributing terms
    let mut union: BTreeSet<IntForm> = BTreeSet::new();
    for (t, _) in &contributions {
        for f in &t.den {
            union.insert(f.clone());
        }
    }
    // the bracket: sum over tau of N_tau * (T_tau p_{v-g} - p_v) * cofactor
    let mut pieces: Vec<IntPoly2> = Vec::new();
    for (t, pw) in &contributions {
        // r = shift(p_{v-g}) - p_v
        let mut r = match pw {
            Some(q) => {
                let mut s = (*q).clone();
                s.taylor_shift(t.shift.0, t.shift.1);
                s
            }
            None => IntPoly2::zero(0, 0),
        };
        if let Some(q) = p_v {
            if r.d1 < q.d1 || r.d2 < q.d2 {
                r = r.resized(r.d1.max(q.d1), r.d2.max(q.d2));
            }
            r.sub_assign(q);
        }
        if r.is_zero() {
            continue;
        }
        let mut piece = r.mul_sparse(&t.num);
        for f in union.iter() {
            if !t.den.contains(f) {
                piece = piece.mul_form(f);
            }
        }
        pieces.push(piece);
    }
    let (b1, b2) = pieces
        .iter()
        .fold((0usize, 0usize), |(a, b), p| (a.max(p.d1), b.max(p.d2)));
    let mut bracket = IntPoly2::zero(b1, b2);
    for piece in &pieces {
        bracket.add_assign(piece);
    }
    // exact division by the union denominator
    for f in &union {
        if bracket.is_zero() {
            break;
        }
        match bracket.div_form_exact(f) {
            Ok(q) => bracket = q,
            Err(witness) => {
                return Err(OpError::ResidueObstruction {
                    form: format!("{}*u1 + {}*u2 + {}", f.a, f.b, f.c),
                    witness: format!(
                        "remainder with bounds {:?}",
                        witness.true_bounds()
                    ),
                });
            }
        }
    }
    // the -mu part: sum_tau kappa (p_v - p_{v - g})
    if subtract_mu {
        let mut extra_d1 = bracket.d1;
        let mut extra_d2 = bracket.d2;
        for (t, pw) in &contributions {
            if let Some(q) = pw {
                extra_d1 = extra_d1.max(q.d1);
                extra_d2 = extra_d2.max(q.d2);
            }
            let _ = t;
        }
        if let Some(q) = p_v {
            extra_d1 = extra_d1.max(q.d1);
            extra_d2 = extra_d2.max(q.d2);
        }
        if extra_d1 > bracket.d1 || extra_d2 > bracket.d2 {
            bracket = bracket.resized(extra_d1, extra_d2);
        }
        for (t, pw) in &contributions {
            if let Some(q) = p_v {
                bracket.add_assign_scaled(q, &t.kappa);
            }
            if let Some(q) = pw {
                bracket.add_assign_scaled(q, &-t.kappa.clone());
            }
        }
    }
    Ok(bracket)
}


#[cfg(test)]
mod sym_tests {
    use super::*;
    use crate::algebra::IntPoly2;
    use crate::ba::q_polynomial;
    use crate::diffop::make_d1;

    #[test]
    fn symmetric_matches_direct_m0_chain() {
        let d = make_d1(0);
        let q = q_polynomial(0);
        let (qi, _) = IntPoly2::from_multipoly(&q);
        let mut a = EGrouped::from_int_poly(qi.clone());
        let mut b = EGrouped::from_int_poly(qi);
        let prep = PreparedOp::compile(&d);
        for _ in 0..3 {
            a = apply_grouped(&prep, &a, true).unwrap();
            b = apply_grouped_symmetric(&prep, &b, true, 1).unwrap();
            assert_eq!(a.groups.len(), b.groups.len());
            for (w, p) in &a.groups {
                assert_eq!(p, &b.groups[w], "mismatch at {:?}", w);
            }
        }
    }
}
