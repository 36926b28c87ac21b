//! Applying difference operators to polynomials and exponential
//! polynomials, operator composition and commutators, and restriction to
//! the z1 - z2 line.

use super::{DifferenceOperator, OpError, OpTerm};
use crate::algebra::{
    exact_div_affine, mul_affine, poly_shift, restrict_to_locus, AffineForm, Coeff,
    FactoredRatFun, LaurentFrac, LaurentPoly, MultiPoly, Rat,
};
use std::collections::BTreeMap;

/// P(z, x) * e^<z,x>, with P a polynomial in z over Laurent-fraction
/// coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpPolynomial {
    pub poly: MultiPoly<LaurentFrac>,
}

impl ExpPolynomial {
    pub fn from_rational_poly(p: &MultiPoly<Rat>) -> Self {
        ExpPolynomial {
            poly: p.map_coeffs(|c| LaurentFrac::from(c.clone())),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }
}

fn union_denominator<'a>(
    coeffs: impl Iterator<Item = &'a FactoredRatFun>,
) -> BTreeMap<AffineForm, u32> {
    let mut union: BTreeMap<AffineForm, u32> = BTreeMap::new();
    for c in coeffs {
        for (f, m) in &c.den {
            let e = union.entry(f.clone()).or_insert(0);
            *e = (*e).max(*m);
        }
    }
    union
}

/// Multiply a C-polynomial by a rational polynomial.
fn mul_rat_poly<C: Coeff>(a: &MultiPoly<Rat>, b: &MultiPoly<C>) -> MultiPoly<C> {
    let mut out = MultiPoly::zero(b.vars);
    for (ma, ca) in &a.terms {
        for (mb, cb) in &b.terms {
            out.add_term(ma.mul(mb), cb.scale(ca));
        }
    }
    out
}

/// Shared numerator-assembly-and-division kernel: computes
/// `sum_i coeff_i * arg_i` when the sum is a polynomial, erroring with the
/// offending form and restricted witness otherwise.
fn sum_over_common_denominator<C: Coeff>(
    parts: &[(&FactoredRatFun, MultiPoly<C>)],
) -> Result<MultiPoly<C>, OpError> {
    let vars = parts
        .first()
        .map(|(c, _)| c.vars())
        .expect("no parts to sum");
    let union = union_denominator(parts.iter().map(|(c, _)| *c));
    let mut num = MultiPoly::<C>::zero(vars);
    for (c, arg) in parts {
        if c.is_zero() || arg.is_zero() {
            continue;
        }
        let mut term = mul_rat_poly(&c.num.scale(&c.scalar), arg);
        for (f, m) in &union {
            let have = c.den.get(f).copied().unwrap_or(0);
            for _ in have..*m {
                term = mul_affine(&term, f);
            }
        }
        num = &num + &term;
    }
    for (f, m) in &union {
        for _ in 0..*m {
            match exact_div_affine(&num, f) {
                Ok(q) => num = q,
                Err(_) => {
                    let witness = restrict_to_locus(&num, f);
                    return Err(OpError::ResidueObstruction {
                        form: format!("{:?}", f),
                        witness: format!("{:?}", witness),
                    });
                }
            }
        }
    }
    Ok(num)
}

/// Apply `D` to a plain polynomial `p(z)`; the result must again be a
/// polynomial (all affine denominators cancel), otherwise the offending
/// form is reported with its restricted witness.
pub fn apply_to_poly(
    d: &DifferenceOperator,
    p: &MultiPoly<Rat>,
) -> Result<MultiPoly<Rat>, OpError> {
    assert_eq!(d.vars, p.vars);
    if p.is_zero() {
        return Ok(MultiPoly::zero(p.vars));
    }
    let mut parts: Vec<(&FactoredRatFun, MultiPoly<Rat>)> = Vec::new();
    for t in &d.terms {
        let shifted = poly_shift(p, &t.shift_u);
        let arg = if d.minus_one { &shifted - p } else { shifted };
        parts.push((&t.coeff, arg));
    }
    if !d.minus_one && !d.scalar.is_zero() {
        parts.push((&d.scalar, p.clone()));
    }
    if parts.is_empty() {
        return Ok(MultiPoly::zero(p.vars));
    }
    sum_over_common_denominator(&parts)
}

/// Apply `D` to `P(z,x) e^<z,x>`: each shift term acts on z and multiplies
/// by the Laurent monomial `e^<x,tau>`.
pub fn apply_to_exp(d: &DifferenceOperator, f: &ExpPolynomial) -> Result<ExpPolynomial, OpError> {
    assert_eq!(d.vars, f.poly.vars);
    if f.is_zero() {
        return Ok(f.clone());
    }
    let mut parts: Vec<(&FactoredRatFun, MultiPoly<LaurentFrac>)> = Vec::new();
    for t in &d.terms {
        let e = t
            .e_exp
            .expect("operator term lacks an e-exponent; cannot act on exponentials");
        let shifted = poly_shift(&f.poly, &t.shift_u);
        let emono = LaurentFrac::from_poly(LaurentPoly::monomial(e, Rat::one()));
        let moved = shifted.map_coeffs(|c| c.mul_ref(&emono));
        let arg = if d.minus_one { &moved - &f.poly } else { moved };
        parts.push((&t.coeff, arg));
    }
    if !d.minus_one && !d.scalar.is_zero() {
        parts.push((&d.scalar, f.poly.clone()));
    }
    if parts.is_empty() {
        return Ok(ExpPolynomial {
            poly: MultiPoly::zero(f.poly.vars),
        });
    }
    Ok(ExpPolynomial {
        poly: sum_over_common_denominator(&parts)?,
    })
}

fn add_shifts(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Operator composition in plain normal form.
pub fn compose(a: &DifferenceOperator, b: &DifferenceOperator) -> DifferenceOperator {
    assert_eq!(a.vars, b.vars);
    let vars = a.vars;
    let a = a.to_plain();
    let b = b.to_plain();
    let zero_shift = vec![Rat::zero(); vars];
    let mut coeffs: BTreeMap<Vec<Rat>, FactoredRatFun> = BTreeMap::new();
    let mut meta: BTreeMap<Vec<Rat>, (Option<crate::lattice::LatticeVector>, Option<(i32, i32)>)> =
        BTreeMap::new();
    let mut add = |shift: Vec<Rat>,
                   c: FactoredRatFun,
                   lat: Option<crate::lattice::LatticeVector>,
                   e: Option<(i32, i32)>| {
        if c.is_zero() {
            return;
        }
        meta.entry(shift.clone()).or_insert((lat, e));
        match coeffs.entry(shift) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().add(&c);
                *o.get_mut() = s;
            }
        }
    };
    // scalar * scalar
    let mut scalar = a.scalar.mul(&b.scalar);
    // a.scalar * b-terms
    for t in &b.terms {
        add(
            t.shift_u.clone(),
            a.scalar.mul(&t.coeff),
            t.shift_lattice,
            t.e_exp,
        );
    }
    // a-terms * (T_t b.scalar)
    for t in &a.terms {
        let shifted_scalar = b.scalar.shift(&t.shift_u);
        add(
            t.shift_u.clone(),
            t.coeff.mul(&shifted_scalar),
            t.shift_lattice,
            t.e_exp,
        );
    }
    // cross terms
    for t in &a.terms {
        for s in &b.terms {
            let c = t.coeff.mul(&s.coeff.shift(&t.shift_u));
            let shift = add_shifts(&t.shift_u, &s.shift_u);
            let lat = match (t.shift_lattice, s.shift_lattice) {
                (Some(x), Some(y)) => Some(x + y),
                _ => None,
            };
            let e = match (t.e_exp, s.e_exp) {
                (Some(x), Some(y)) => Some((x.0 + y.0, x.1 + y.1)),
                _ => None,
            };
            if shift == zero_shift {
                scalar = scalar.add(&c);
            } else {
                add(shift, c, lat, e);
            }
        }
    }
    let terms: Vec<OpTerm> = coeffs
        .into_iter()
        .map(|(shift, coeff)| {
            let (shift_lattice, e_exp) = meta.get(&shift).copied().unwrap_or((None, None));
            OpTerm {
                shift_u: shift,
                shift_lattice,
                e_exp,
                coeff: coeff.reduce(),
            }
        })
        .collect();
    DifferenceOperator {
        vars,
        minus_one: false,
        scalar: scalar.reduce(),
        terms,
    }
    .normalized()
}

pub fn commutator(a: &DifferenceOperator, b: &DifferenceOperator) -> DifferenceOperator {
    compose(a, b).sub_op(&compose(b, a))
}

/// Restrict a two-variable operator whose coefficients depend only on
/// `w = z1 - z2` to the line: shift `(a, b)` becomes the univariate shift
/// `a - b`, terms with equal induced shift merge.
pub fn restrict_line(d: &DifferenceOperator) -> Result<DifferenceOperator, OpError> {
    assert_eq!(d.vars, 2, "line restriction expects two variables");
    let p = d.to_plain();
    let restrict_fun = |f: &FactoredRatFun| -> Result<FactoredRatFun, OpError> {
        if f.is_zero() {
            return Ok(FactoredRatFun::zero(1));
        }
        // denominators must be forms in z1 - z2
        let mut den = BTreeMap::new();
        let mut scalar = f.scalar.clone();
        for (form, m) in &f.den {
            let l = &form.linear;
            if l.len() != 2 || l[0] != -l[1].clone() {
                return Err(OpError::NotLineReducible(format!("{:?}", form)));
            }
            // normalized primitive forms in z1 - z2 have linear (1, -1)
            let nf = AffineForm::new(
                &[Rat::from_bigint(l[0].clone())],
                &form.constant,
            );
            scalar = scalar / nf.scale.pow(*m);
            let mut canon = nf;
            canon.scale = Rat::one();
            *den.entry(canon).or_insert(0) += *m;
        }
        // numerator must be expressible in w: substitute z1 = w, z2 = 0 and
        // re-expand to verify
        let sub_to_w = vec![
            MultiPoly::<Rat>::var(1, 0),
            MultiPoly::<Rat>::zero(1),
        ];
        let num_w = f.num.substitute_linear(1, &sub_to_w);
        let back = vec![MultiPoly::<Rat>::linear(
            2,
            &[Rat::one(), Rat::from_int(-1)],
            &Rat::zero(),
        )];
        let re = num_w.substitute_linear(2, &back);
        if re != f.num {
            return Err(OpError::NotLineReducible(format!("{:?}", f.num)));
        }
        Ok(FactoredRatFun {
            num: num_w,
            den,
            scalar,
        })
    };
    let mut scalar = restrict_fun(&p.scalar)?;
    let mut coeffs: BTreeMap<Vec<Rat>, FactoredRatFun> = BTreeMap::new();
    for t in &p.terms {
        let w = &t.shift_u[0] - &t.shift_u[1];
        let c = restrict_fun(&t.coeff)?;
        if w.is_zero() {
            scalar = scalar.add(&c);
            continue;
        }
        match coeffs.entry(vec![w]) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().add(&c);
                *o.get_mut() = s;
            }
        }
    }
    Ok(DifferenceOperator {
        vars: 1,
        minus_one: false,
        scalar: scalar.reduce(),
        terms: coeffs
            .into_iter()
            .map(|(shift, coeff)| OpTerm {
                shift_u: shift,
                shift_lattice: None,
                e_exp: None,
                coeff: coeff.reduce(),
            })
            .collect(),
    }
    .normalized())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffop::build::{make_d1, make_m0_family};

    fn rat(n: i64) -> Rat {
        Rat::from_int(n)
    }

    #[test]
    fn constants_are_annihilated() {
        let d = make_d1(1);
        let p = MultiPoly::constant(2, rat(5));
        let r = apply_to_poly(&d, &p).unwrap();
        assert!(r.is_zero());
    }

    #[test]
    fn apply_single_term_to_exponential() {
        // D = a (T_tau - 1) with a = 1: D[e] = (E^tau - 1) e
        let tau = crate::lattice::LatticeVector(1, 0);
        let g = crate::lattice::e_exponent(tau);
        let d = DifferenceOperator {
            vars: 2,
            minus_one: true,
            scalar: FactoredRatFun::zero(2),
            terms: vec![OpTerm {
                shift_u: vec![rat(g.0 as i64), rat(g.1 as i64)],
                shift_lattice: Some(tau),
                e_exp: Some(g),
                coeff: FactoredRatFun::one(2),
            }],
        };
        let one = ExpPolynomial::from_rational_poly(&MultiPoly::one(2));
        let r = apply_to_exp(&d, &one).unwrap();
        let expect = LaurentFrac::from_poly(
            LaurentPoly::monomial(g, Rat::one()).sub(&LaurentPoly::one()),
        );
        assert_eq!(r.poly.num_terms(), 1);
        assert!(r
            .poly
            .coeff(&crate::algebra::Mono::constant(2))
            .eq_frac(&expect));
    }

    #[test]
    fn commutator_with_self_vanishes() {
        let fam = make_m0_family();
        let c = commutator(&fam.a1_d1, &fam.a1_d1);
        assert!(c.is_zero_operator());
    }

    #[test]
    fn restrict_line_shifts() {
        let fam = make_m0_family();
        let r = restrict_line(&fam.a1_d1).unwrap();
        let shifts: Vec<Rat> = r.terms.iter().map(|t| t.shift_u[0].clone()).collect();
        assert_eq!(shifts, vec![rat(-1), rat(3)]);
        let rm = restrict_line(&fam.dmsl).unwrap();
        let shifts: Vec<Rat> = rm.terms.iter().map(|t| t.shift_u[0].clone()).collect();
        assert_eq!(shifts, vec![rat(-2), rat(2)]);
    }

    #[test]
    fn composition_associative_small() {
        let fam = make_m0_family();
        let ab_c = compose(&compose(&fam.a1_d1, &fam.a1_d2), &fam.dmsl);
        let a_bc = compose(&fam.a1_d1, &compose(&fam.a1_d2, &fam.dmsl));
        assert!(ab_c.eq_operator(&a_bc));
    }
}
