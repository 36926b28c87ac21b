//! Laurent polynomials and fractions in the two lattice exponentials
//! E1 = e^<x,beta1-coordinate>, E2 = e^<x,alpha2-coordinate>. These carry all
//! x-dependence: mu(x), c(x), coth and sinh^-2 factors, and the coefficients
//! of the constructed Baker-Akhiezer function.

use super::poly::Coeff;
use super::rat::Rat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

pub type EExp = (i32, i32);

/// Sparse Laurent polynomial in (E1, E2) with rational coefficients.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct LaurentPoly {
    pub terms: BTreeMap<EExp, Rat>,
}

impl Serialize for LaurentPoly {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        // canonical order: ascending exponent pairs
        let terms: Vec<(i32, i32, &Rat)> =
            self.terms.iter().map(|(e, c)| (e.0, e.1, c)).collect();
        terms.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let terms = Vec::<(i32, i32, Rat)>::deserialize(de)?;
        let mut p = LaurentPoly::zero();
        for (a, b, c) in terms {
            p.add_term((a, b), &c);
        }
        Ok(p)
    }
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Default::default()
    }

    pub fn one() -> Self {
        Self::monomial((0, 0), Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        Self::monomial((0, 0), c)
    }

    pub fn monomial(e: EExp, c: Rat) -> Self {
        let mut p = Self::zero();
        if !c.is_zero() {
            p.terms.insert(e, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn add_term(&mut self, e: EExp, c: &Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, &-c);
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            out.terms.insert(*e, -c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        let (small, big) = if self.num_terms() <= other.num_terms() {
            (self, other)
        } else {
            (other, self)
        };
        for (e1, c1) in &small.terms {
            for (e2, c2) in &big.terms {
                out.add_term((e1.0 + e2.0, e1.1 + e2.1), &(c1 * c2));
            }
        }
        out
    }

    pub fn mul_mono(&self, e: EExp, c: &Rat) -> Self {
        let mut out = Self::zero();
        if c.is_zero() {
            return out;
        }
        for (e1, c1) in &self.terms {
            out.terms.insert((e1.0 + e.0, e1.1 + e.1), c1 * c);
        }
        out
    }

    pub fn scale(&self, k: &Rat) -> Self {
        self.mul_mono((0, 0), k)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Weight each term by a linear function of its exponent; realizes the
    /// derivative d/dy_j on pure Laurent polynomials (w |-> w_j * coeff).
    pub fn weight(&self, f: impl Fn(EExp) -> Rat) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            let k = f(*e);
            if !k.is_zero() {
                out.terms.insert(*e, c * &k);
            }
        }
        out
    }

    /// Substitute E -> E^-1 (x -> -x).
    pub fn flip(&self) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            out.terms.insert((-e.0, -e.1), c.clone());
        }
        out
    }

    /// Componentwise minimum exponent (the "corner"); None when zero.
    pub fn corner(&self) -> Option<EExp> {
        if self.is_zero() {
            return None;
        }
        let mut it = self.terms.keys();
        let first = *it.next().unwrap();
        let mut c = first;
        for e in it {
            c.0 = c.0.min(e.0);
            c.1 = c.1.min(e.1);
        }
        Some(c)
    }

    /// Rational content (gcd of numerators over lcm of denominators), signed
    /// by the first term in exponent order; zero polynomial has content 0.
    pub fn content(&self) -> Rat {
        if self.is_zero() {
            return Rat::zero();
        }
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            num_gcd = num_gcd.gcd(c.numer());
            den_lcm = den_lcm.lcm(c.denom());
        }
        let mut content = Rat(num_rational::BigRational::new(num_gcd, den_lcm));
        if self.terms.values().next().unwrap().is_negative() {
            content = -content;
        }
        content
    }

    /// Evaluate at nonzero rational values of (E1, E2).
    pub fn eval(&self, e1: &Rat, e2: &Rat) -> Rat {
        assert!(!e1.is_zero() && !e2.is_zero(), "E values must be nonzero");
        let mut acc = Rat::zero();
        for (e, c) in &self.terms {
            let p1 = if e.0 >= 0 {
                e1.pow(e.0 as u32)
            } else {
                e1.recip().pow((-e.0) as u32)
            };
            let p2 = if e.1 >= 0 {
                e2.pow(e.1 as u32)
            } else {
                e2.recip().pow((-e.1) as u32)
            };
            acc += &(&(c * &p1) * &p2);
        }
        acc
    }

    /// Componentwise exponent bounding box; `None` when zero.
    pub fn bbox(&self) -> Option<(EExp, EExp)> {
        if self.is_zero() {
            return None;
        }
        let mut lo = *self.terms.keys().next().unwrap();
        let mut hi = lo;
        for e in self.terms.keys() {
            lo.0 = lo.0.min(e.0);
            lo.1 = lo.1.min(e.1);
            hi.0 = hi.0.max(e.0);
            hi.1 = hi.1.max(e.1);
        }
        Some((lo, hi))
    }

    /// Exact division; `None` if not divisible. Divisor must be nonzero.
    ///
    /// Long division on a dense grid over the dividend's bounding box
    /// (exponent extremes of quotient and divisor add componentwise, so the
    /// quotient box is determined); cost O(cells * divisor terms).
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        assert!(!divisor.is_zero(), "division by zero Laurent polynomial");
        if self.is_zero() {
            return Some(Self::zero());
        }
        let (slo, shi) = self.bbox().unwrap();
        let (dlo, dhi) = divisor.bbox().unwrap();
        let qlo = (slo.0 - dlo.0, slo.1 - dlo.1);
        let qhi = (shi.0 - dhi.0, shi.1 - dhi.1);
        if qlo.0 > qhi.0 || qlo.1 > qhi.1 {
            return None;
        }
        let n1 = (shi.0 - slo.0 + 1) as usize;
        let n2 = (shi.1 - slo.1 + 1) as usize;
        if n1.saturating_mul(n2) > 4_000_000 {
            return self.div_exact_sparse(divisor);
        }
        // dense remainder grid indexed from the dividend's corner; None
        // encodes zero so empty cells cost no allocation
        let mut rem: Vec<Option<Rat>> = vec![None; n1 * n2];
        for (e, c) in &self.terms {
            rem[((e.0 - slo.0) as usize) * n2 + (e.1 - slo.1) as usize] = Some(c.clone());
        }
        // divisor terms relative to its lex-max leader
        let dlead = *divisor.terms.keys().next_back().unwrap();
        let dlead_coef = divisor.terms[&dlead].clone();
        let drel: Vec<(i32, i32, Rat)> = divisor
            .terms
            .iter()
            .filter(|(e, _)| **e != dlead)
            .map(|(e, c)| (e.0 - dlead.0, e.1 - dlead.1, c.clone()))
            .collect();
        let mut quot = Self::zero();
        // descending lex over the grid
        for i in (0..n1).rev() {
            for j in (0..n2).rev() {
                let idx = i * n2 + j;
                let Some(lead) = rem[idx].take() else {
                    continue;
                };
                if lead.is_zero() {
                    continue;
                }
                let e = (slo.0 + i as i32, slo.1 + j as i32);
                let qe = (e.0 - dlead.0, e.1 - dlead.1);
                if qe.0 < qlo.0 || qe.0 > qhi.0 || qe.1 < qlo.1 || qe.1 > qhi.1 {
                    return None;
                }
                let qc = &lead / &dlead_coef;
                for (de, df, dc) in &drel {
                    let te = (e.0 + de, e.1 + df);
                    if te.0 < slo.0 || te.0 > shi.0 || te.1 < slo.1 || te.1 > shi.1 {
                        return None;
                    }
                    let tidx = ((te.0 - slo.0) as usize) * n2 + (te.1 - slo.1) as usize;
                    let sub = &qc * dc;
                    match &mut rem[tidx] {
                        Some(v) => *v -= &sub,
                        None => rem[tidx] = Some(-sub),
                    }
                }
                quot.terms.insert(qe, qc);
            }
        }
        if rem
            .iter()
            .all(|c| c.as_ref().map_or(true, |v| v.is_zero()))
        {
            Some(quot)
        } else {
            None
        }
    }

    fn div_exact_sparse(&self, divisor: &Self) -> Option<Self> {
        let (dl, dcoef) = {
            let (e, c) = divisor.terms.iter().next_back().unwrap();
            (*e, c.clone())
        };
        let mut rem = self.clone();
        let mut quot = Self::zero();
        let max_iter = 4 * self.num_terms() * divisor.num_terms() + 1000;
        let mut iters = 0usize;
        while !rem.is_zero() {
            iters += 1;
            if iters > max_iter {
                return None;
            }
            let (rl, rcoef) = {
                let (e, c) = rem.terms.iter().next_back().unwrap();
                (*e, c.clone())
            };
            let qe = (rl.0 - dl.0, rl.1 - dl.1);
            let qc = &rcoef / &dcoef;
            quot.add_term(qe, &qc);
            let sub = divisor.mul_mono(qe, &qc);
            rem = rem.sub(&sub);
            if let Some((nl, _)) = rem.terms.iter().next_back() {
                if *nl >= rl {
                    return None;
                }
            }
        }
        Some(quot)
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}*E^({},{})", c, e.0, e.1)?;
        }
        Ok(())
    }
}

/// Ratio of Laurent polynomials, reduced by monomial content: the
/// denominator corner sits at (0,0), the numerator and denominator corners
/// share no positive offset, and the denominator has content 1.
#[derive(Clone, Serialize, Deserialize)]
pub struct LaurentFrac {
    pub num: LaurentPoly,
    pub den: LaurentPoly,
}

impl LaurentFrac {
    pub fn zero() -> Self {
        LaurentFrac {
            num: LaurentPoly::zero(),
            den: LaurentPoly::one(),
        }
    }

    pub fn one() -> Self {
        LaurentFrac {
            num: LaurentPoly::one(),
            den: LaurentPoly::one(),
        }
    }

    pub fn from_poly(p: LaurentPoly) -> Self {
        LaurentFrac {
            num: p,
            den: LaurentPoly::one(),
        }
        .normalized()
    }

    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        LaurentFrac { num, den }.normalized()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.num_terms() == 1
    }

    fn normalized(mut self) -> Self {
        if self.num.is_zero() {
            return Self::zero();
        }
        // scale so den has content 1
        let dc = self.den.content();
        if !dc.is_one() {
            let inv = dc.recip();
            self.den = self.den.scale(&inv);
            self.num = self.num.scale(&inv);
        }
        // shift num and den by the same unit monomial so the componentwise
        // minimum of their corners is (0,0)
        let nc = self.num.corner().unwrap();
        let dc = self.den.corner().unwrap();
        let joint = (nc.0.min(dc.0), nc.1.min(dc.1));
        if joint != (0, 0) {
            let t = (-joint.0, -joint.1);
            self.num = self.num.mul_mono(t, &Rat::one());
            self.den = self.den.mul_mono(t, &Rat::one());
        }
        self
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            return LaurentFrac {
                num: self.num.add(&other.num),
                den: self.den.clone(),
            }
            .normalized();
        }
        LaurentFrac {
            num: self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            den: self.den.mul(&other.den),
        }
        .normalized()
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        LaurentFrac {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        LaurentFrac {
            num: self.num.mul(&other.num),
            den: self.den.mul(&other.den),
        }
        .normalized()
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "division by zero Laurent fraction");
        LaurentFrac {
            num: self.den.clone(),
            den: self.num.clone(),
        }
        .normalized()
    }

    pub fn div(&self, other: &Self) -> Self {
        self.mul(&other.recip())
    }

    /// Equality via cross-multiplication.
    pub fn eq_frac(&self, other: &Self) -> bool {
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }

    pub fn eval(&self, e1: &Rat, e2: &Rat) -> Rat {
        let d = self.den.eval(e1, e2);
        assert!(!d.is_zero(), "denominator vanishes at evaluation point");
        self.num.eval(e1, e2) / d
    }
}

impl PartialEq for LaurentFrac {
    fn eq(&self, other: &Self) -> bool {
        self.eq_frac(other)
    }
}

impl fmt::Debug for LaurentFrac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() {
            write!(f, "{:?}", self.num)
        } else {
            write!(f, "[{:?}] / [{:?}]", self.num, self.den)
        }
    }
}

impl From<Rat> for LaurentFrac {
    fn from(r: Rat) -> Self {
        LaurentFrac::from_poly(LaurentPoly::constant(r))
    }
}

impl Coeff for LaurentFrac {
    fn zero() -> Self {
        LaurentFrac::zero()
    }
    fn one() -> Self {
        LaurentFrac::one()
    }
    fn is_zero(&self) -> bool {
        LaurentFrac::is_zero(self)
    }
    fn add_ref(&self, other: &Self) -> Self {
        self.add(other)
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self.sub(other)
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self.mul(other)
    }
    fn neg_ref(&self) -> Self {
        self.neg()
    }
    fn scale(&self, k: &Rat) -> Self {
        if k.is_zero() {
            return LaurentFrac::zero();
        }
        LaurentFrac {
            num: self.num.scale(k),
            den: self.den.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(a: i32, b: i32) -> LaurentPoly {
        LaurentPoly::monomial((a, b), Rat::one())
    }

    #[test]
    fn mul_and_add() {
        // (E1 - E1^-1)(E1 + E1^-1) = E1^2 - E1^-2
        let s = e(1, 0).sub(&e(-1, 0));
        let c = e(1, 0).add(&e(-1, 0));
        let p = s.mul(&c);
        assert_eq!(p, e(2, 0).sub(&e(-2, 0)));
    }

    #[test]
    fn frac_normalization_cross_eq() {
        // (E1^2 - 1)/E1 == (E1 - E1^-1)
        let a = LaurentFrac::new(e(2, 0).sub(&e(0, 0)), e(1, 0));
        let b = LaurentFrac::from_poly(e(1, 0).sub(&e(-1, 0)));
        assert_eq!(a, b);
    }

    #[test]
    fn div_exact_works() {
        let a = e(1, 0).sub(&e(-1, 0));
        let b = e(1, 0).add(&e(-1, 0));
        let p = a.mul(&b);
        assert_eq!(p.div_exact(&a), Some(b.clone()));
        assert_eq!(p.div_exact(&b), Some(a.clone()));
        let q = p.add(&LaurentPoly::one());
        assert_eq!(q.div_exact(&a), None);
    }

    #[test]
    fn eval_matches_structure() {
        let p = e(1, -1).scale(&Rat::from_int(3));
        let v = p.eval(&Rat::from_int(2), &Rat::from_int(5));
        assert_eq!(v, Rat::from_frac(6, 5));
    }

    #[test]
    fn flip_is_involution() {
        let p = e(2, -3).add(&e(0, 1).scale(&Rat::from_int(-7)));
        assert_eq!(p.flip().flip(), p);
    }
}
