//! Affine-linear forms `l(u) = sum a_i u_i + c`, stored in primitive
//! normalized shape: integer linear part with content 1 and positive first
//! nonzero entry, the original scale kept separately so evaluation stays
//! exact.

use super::poly::{Coeff, Mono, MultiPoly};
use super::rat::Rat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AffineForm {
    /// Primitive integer linear part; not all zero.
    pub linear: Vec<BigInt>,
    /// Constant term of the normalized form (rational in general).
    pub constant: Rat,
    /// Original scale: the raw form equals `scale * (normalized form)`.
    pub scale: Rat,
}

impl AffineForm {
    /// Build from rational linear coefficients and constant, normalizing.
    pub fn new(linear: &[Rat], constant: &Rat) -> Self {
        assert!(
            linear.iter().any(|c| !c.is_zero()),
            "affine form needs a nonzero linear part"
        );
        // common denominator
        let mut den = BigInt::one();
        for c in linear {
            den = den.lcm(c.denom());
        }
        let mut ints: Vec<BigInt> = linear.iter().map(|c| c.numer() * (&den / c.denom())).collect();
        // content
        let mut g = BigInt::zero();
        for v in &ints {
            g = g.gcd(v);
        }
        // sign: first nonzero entry positive
        let first = ints.iter().find(|v| !v.is_zero()).unwrap();
        if first.is_negative() {
            g = -g;
        }
        for v in &mut ints {
            *v = &*v / &g;
        }
        let scale = Rat(num_rational::BigRational::new(g, den));
        let constant = constant / &scale;
        AffineForm {
            linear: ints,
            constant,
            scale,
        }
    }

    pub fn vars(&self) -> usize {
        self.linear.len()
    }

    /// Form `u_i - c` in `vars` variables (already primitive).
    pub fn coordinate(vars: usize, idx: usize, c: Rat) -> Self {
        let mut linear = vec![Rat::zero(); vars];
        linear[idx] = Rat::one();
        AffineForm::new(&linear, &(-c))
    }

    /// The normalized form as a polynomial (scale NOT included).
    pub fn to_poly(&self) -> MultiPoly<Rat> {
        let coeffs: Vec<Rat> = self.linear.iter().map(|v| Rat::from_bigint(v.clone())).collect();
        MultiPoly::linear(self.vars(), &coeffs, &self.constant)
    }

    /// The raw (unnormalized) form as a polynomial: `scale * normalized`.
    pub fn to_poly_raw(&self) -> MultiPoly<Rat> {
        self.to_poly().scale(&self.scale)
    }

    /// Value of the normalized form at a rational point.
    pub fn eval(&self, point: &[Rat]) -> Rat {
        let mut acc = self.constant.clone();
        for (a, x) in self.linear.iter().zip(point) {
            acc += &(&Rat::from_bigint(a.clone()) * x);
        }
        acc
    }

    /// Same zero locus (ignores scale and constant-shift normalization
    /// differences; two normalized forms are parallel iff linear parts equal).
    pub fn same_locus(&self, other: &AffineForm) -> bool {
        self.linear == other.linear && self.constant == other.constant
    }

    /// Shift the argument: form evaluated at `u + delta`, i.e. the constant
    /// picks up `l(delta)`. Scale is preserved.
    pub fn shift(&self, delta: &[Rat]) -> AffineForm {
        let mut c = self.constant.clone();
        for (a, d) in self.linear.iter().zip(delta) {
            c += &(&Rat::from_bigint(a.clone()) * d);
        }
        AffineForm {
            linear: self.linear.clone(),
            constant: c,
            scale: self.scale.clone(),
        }
    }

    /// Primitive integer kernel basis of the linear part, each basis vector
    /// sign-fixed (first nonzero entry positive). For 2 variables this is
    /// the single vector `(-b, a)` normalized.
    pub fn kernel_basis(&self) -> Vec<Vec<BigInt>> {
        let n = self.vars();
        let mut basis = Vec::new();
        // pivot: first nonzero coefficient
        let pivot = self.linear.iter().position(|v| !v.is_zero()).unwrap();
        for j in 0..n {
            if j == pivot {
                continue;
            }
            // vector with v[j] = a_pivot, v[pivot] = -a_j (then primitive)
            let mut v = vec![BigInt::zero(); n];
            v[j] = self.linear[pivot].clone();
            v[pivot] = -self.linear[j].clone();
            let mut g = BigInt::zero();
            for x in &v {
                g = g.gcd(x);
            }
            let first = v.iter().find(|x| !x.is_zero()).unwrap();
            if first.is_negative() {
                g = -g;
            }
            for x in &mut v {
                *x = &*x / &g;
            }
            basis.push(v);
        }
        basis
    }

    /// A rational point on the zero locus of the normalized form.
    pub fn point_on_locus(&self) -> Vec<Rat> {
        let n = self.vars();
        let pivot = self.linear.iter().position(|v| !v.is_zero()).unwrap();
        let mut pt = vec![Rat::zero(); n];
        pt[pivot] = &(-&self.constant) / &Rat::from_bigint(self.linear[pivot].clone());
        pt
    }
}

impl fmt::Debug for AffineForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, a) in self.linear.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", a)?;
        }
        write!(f, "|{}]", self.constant)
    }
}

/// Errors from exact division.
#[derive(Debug, thiserror::Error)]
pub enum DivisionError {
    #[error("polynomial is not divisible by the affine form; nonzero remainder witness")]
    NotDivisible { witness: String },
}

/// Exact division of `p` by the *normalized* form of `ell` (scale ignored;
/// callers account for scale separately). Returns `q` with `p = ell_norm * q`
/// or an error carrying the nonzero remainder witness.
pub fn exact_div_affine<C: Coeff>(
    p: &MultiPoly<C>,
    ell: &AffineForm,
) -> Result<MultiPoly<C>, DivisionError> {
    assert_eq!(p.vars, ell.vars(), "variable count mismatch");
    if p.is_zero() {
        return Ok(MultiPoly::zero(p.vars));
    }
    // Divide as a univariate polynomial in the pivot variable, descending.
    let pivot = ell.linear.iter().position(|v| !v.is_zero()).unwrap();
    let lead = Rat::from_bigint(ell.linear[pivot].clone());
    let mut rem = p.clone();
    let mut quot = MultiPoly::zero(p.vars);
    loop {
        // highest pivot-degree term of remainder
        let best = rem
            .terms
            .iter()
            .max_by(|(m1, _), (m2, _)| {
                m1.0[pivot]
                    .cmp(&m2.0[pivot])
                    .then_with(|| m1.cmp(m2))
            })
            .map(|(m, c)| (m.clone(), c.clone()));
        let Some((m, c)) = best else { break };
        if m.0[pivot] == 0 {
            // remainder free of pivot variable: must be zero for divisibility
            break;
        }
        let mut qm = m.clone();
        qm.0[pivot] -= 1;
        let qc = c.scale(&lead.recip());
        quot.add_term(qm.clone(), qc.clone());
        // rem -= qc * u^qm * ell_norm
        for (i, a) in ell.linear.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let mut tm = qm.clone();
            tm.0[i] += 1;
            rem.add_term(tm, qc.scale(&Rat::from_bigint(a.clone())).neg_ref());
        }
        if !ell.constant.is_zero() {
            rem.add_term(qm, qc.scale(&ell.constant).neg_ref());
        }
    }
    if rem.is_zero() {
        Ok(quot)
    } else {
        Err(DivisionError::NotDivisible {
            witness: format!("{:?}", rem),
        })
    }
}

/// Restrict a polynomial to the zero locus of `ell`, substituting the
/// canonical parametrization `u = point + sum s_k * kernel_k`. Returns a
/// polynomial in `vars(ell) - 1` parameters (univariate for 2 variables).
pub fn restrict_to_locus<C: Coeff>(p: &MultiPoly<C>, ell: &AffineForm) -> MultiPoly<C> {
    assert_eq!(p.vars, ell.vars());
    let basis = ell.kernel_basis();
    let point = ell.point_on_locus();
    let out_vars = basis.len();
    let subst: Vec<MultiPoly<Rat>> = (0..p.vars)
        .map(|i| {
            let coeffs: Vec<Rat> = basis
                .iter()
                .map(|b| Rat::from_bigint(b[i].clone()))
                .collect();
            MultiPoly::linear(out_vars, &coeffs, &point[i])
        })
        .collect();
    p.substitute_linear(out_vars, &subst)
}

/// Restriction to a hyperplane through the origin (`ell` must have zero
/// constant): parametrization `u = s * k` with `k` the primitive kernel
/// vector, sign-fixed. Matches `restrict_to_locus` for homogeneous forms.
pub fn restrict_to_hyperplane<C: Coeff>(p: &MultiPoly<C>, ell: &AffineForm) -> MultiPoly<C> {
    assert!(
        ell.constant.is_zero(),
        "restrict_to_hyperplane requires a through-origin form"
    );
    restrict_to_locus(p, ell)
}

/// Multiply a polynomial by the normalized form of `ell` (3-term sparse
/// product; cheaper than a generic multiply).
pub fn mul_affine<C: Coeff>(p: &MultiPoly<C>, ell: &AffineForm) -> MultiPoly<C> {
    let mut out = MultiPoly::zero(p.vars);
    for (m, c) in &p.terms {
        for (i, a) in ell.linear.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let mut tm = m.clone();
            tm.0[i] += 1;
            out.add_term(tm, c.scale(&Rat::from_bigint(a.clone())));
        }
        if !ell.constant.is_zero() {
            out.add_term(m.clone(), c.scale(&ell.constant));
        }
    }
    out
}

/// Divisibility test, also exposing the quotient; `p` is divisible by `ell`
/// iff it vanishes identically on the locus of `ell`.
pub fn divides<C: Coeff>(ell: &AffineForm, p: &MultiPoly<C>) -> bool {
    exact_div_affine(p, ell).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rvec(v: &[i64]) -> Vec<Rat> {
        v.iter().map(|&x| Rat::from_int(x)).collect()
    }

    #[test]
    fn normalization_primitive_positive() {
        // -4 u1 + 6 u2 - 2 -> normalized 2u1 - 3u2 + 1 with scale -2
        let f = AffineForm::new(&rvec(&[-4, 6]), &Rat::from_int(-2));
        assert_eq!(f.linear, vec![BigInt::from(2), BigInt::from(-3)]);
        assert_eq!(f.constant, Rat::one());
        assert_eq!(f.scale, Rat::from_int(-2));
    }

    #[test]
    fn exact_division_quadratic() {
        // (u1^2 - 4) / (u1 - 2) = u1 + 2
        let u1 = MultiPoly::<Rat>::var(2, 0);
        let p = &(&u1 * &u1) - &MultiPoly::constant(2, Rat::from_int(4));
        let ell = AffineForm::coordinate(2, 0, Rat::from_int(2));
        let q = exact_div_affine(&p, &ell).unwrap();
        let expected = &u1 + &MultiPoly::constant(2, Rat::from_int(2));
        assert_eq!(q, expected);
    }

    #[test]
    fn exact_division_monomial() {
        // (u1 u2) / u2 = u1
        let u1 = MultiPoly::<Rat>::var(2, 0);
        let u2 = MultiPoly::<Rat>::var(2, 1);
        let p = &u1 * &u2;
        let ell = AffineForm::coordinate(2, 1, Rat::zero());
        assert_eq!(exact_div_affine(&p, &ell).unwrap(), u1);
    }

    #[test]
    fn division_failure_carries_witness() {
        // (u1 + 1) / u1 fails with remainder 1
        let p = &MultiPoly::<Rat>::var(2, 0) + &MultiPoly::one(2);
        let ell = AffineForm::coordinate(2, 0, Rat::zero());
        let err = exact_div_affine(&p, &ell).unwrap_err();
        let DivisionError::NotDivisible { witness } = err;
        assert!(witness.contains('1'));
    }

    #[test]
    fn restriction_examples() {
        // 2u1 + u2 restricted to u1 = 0 (kernel (0,1)) -> s
        let p: MultiPoly<Rat> = MultiPoly::linear(2, &rvec(&[2, 1]), &Rat::zero());
        let ell = AffineForm::coordinate(2, 0, Rat::zero());
        let r = restrict_to_hyperplane(&p, &ell);
        assert_eq!(r, MultiPoly::var(1, 0));

        // u1*(3u1+2u2) restricted to 3u1+2u2 = 0 -> 0
        let f: MultiPoly<Rat> = MultiPoly::linear(2, &rvec(&[3, 2]), &Rat::zero());
        let p2 = &MultiPoly::<Rat>::var(2, 0) * &f;
        let ell2 = AffineForm::new(&rvec(&[3, 2]), &Rat::zero());
        // kernel of 3u1+2u2 is (2,-3) sign-fixed
        assert_eq!(ell2.kernel_basis(), vec![vec![BigInt::from(2), BigInt::from(-3)]]);
        let r2 = restrict_to_hyperplane(&p2, &ell2);
        assert!(r2.is_zero());
    }

    #[test]
    fn restriction_z_squared() {
        // z^2 = 2u1^2 + 2u1u2 + (2/3)u2^2 restricted to u1 = 0 -> (2/3) s^2
        let u1 = MultiPoly::<Rat>::var(2, 0);
        let u2 = MultiPoly::<Rat>::var(2, 1);
        let p = &(&(&u1 * &u1).scale(&Rat::from_int(2))
            + &(&u1 * &u2).scale(&Rat::from_int(2)))
            + &(&u2 * &u2).scale(&Rat::from_frac(2, 3));
        let ell = AffineForm::coordinate(2, 0, Rat::zero());
        let r = restrict_to_hyperplane(&p, &ell);
        let s = MultiPoly::<Rat>::var(1, 0);
        assert_eq!(r, (&s * &s).scale(&Rat::from_frac(2, 3)));
    }

    #[test]
    fn divisibility_iff_vanishing() {
        // p vanishes on {ell=0} iff ell | p, for a handful of cases
        let u1 = MultiPoly::<Rat>::var(2, 0);
        let u2 = MultiPoly::<Rat>::var(2, 1);
        let ell = AffineForm::new(&rvec(&[1, -1]), &Rat::zero());
        let p_div = &(&u1 - &u2) * &(&u1 + &u2);
        let p_not = &u1 * &u2;
        assert!(divides(&ell, &p_div));
        assert!(restrict_to_hyperplane(&p_div, &ell).is_zero());
        assert!(!divides(&ell, &p_not));
        assert!(!restrict_to_hyperplane(&p_not, &ell).is_zero());
    }
}
