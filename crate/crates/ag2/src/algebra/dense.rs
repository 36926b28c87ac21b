//! Dense bivariate integer polynomials: the arithmetic kernel behind the
//! Baker-Akhiezer iteration, where every object stays in Z[u1, u2] and the
//! operation mix is Taylor shifts, 3-term affine multiplies and exact
//! affine divisions.

use super::poly::{Coeff, Mono, MultiPoly};
use super::rat::Rat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Row-major rectangular storage: coefficient of u1^i u2^j at `i*(d2+1)+j`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntPoly2 {
    pub d1: usize,
    pub d2: usize,
    pub data: Vec<BigInt>,
}

/// Affine form with integer coefficients `a*u1 + b*u2 + c`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IntForm {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
}

impl IntForm {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        IntForm {
            a: a.into(),
            b: b.into(),
            c: c.into(),
        }
    }
}

impl IntPoly2 {
    pub fn zero(d1: usize, d2: usize) -> Self {
        IntPoly2 {
            d1,
            d2,
            data: vec![BigInt::zero(); (d1 + 1) * (d2 + 1)],
        }
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.d2 + 1) + j
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * (self.d2 + 1) + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|c| c.is_zero())
    }

    /// Tight degree bounds of the stored support; `None` when zero.
    pub fn true_bounds(&self) -> Option<(usize, usize)> {
        let mut m1 = None;
        let mut m2 = None;
        for i in 0..=self.d1 {
            for j in 0..=self.d2 {
                if !self.get(i, j).is_zero() {
                    m1 = Some(m1.map_or(i, |v: usize| v.max(i)));
                    m2 = Some(m2.map_or(j, |v: usize| v.max(j)));
                }
            }
        }
        match (m1, m2) {
            (Some(a), Some(b)) => Some((a, b)),
            _ => None,
        }
    }

    pub fn total_degree(&self) -> Option<usize> {
        let mut best = None;
        for i in 0..=self.d1 {
            for j in 0..=self.d2 {
                if !self.get(i, j).is_zero() {
                    best = Some(best.map_or(i + j, |v: usize| v.max(i + j)));
                }
            }
        }
        best
    }

    /// Shrink storage to tight bounds.
    pub fn trimmed(&self) -> Self {
        match self.true_bounds() {
            None => IntPoly2::zero(0, 0),
            Some((b1, b2)) => {
                if (b1, b2) == (self.d1, self.d2) {
                    return self.clone();
                }
                let mut out = IntPoly2::zero(b1, b2);
                for i in 0..=b1 {
                    for j in 0..=b2 {
                        out.set(i, j, self.get(i, j).clone());
                    }
                }
                out
            }
        }
    }

    pub fn resized(&self, d1: usize, d2: usize) -> Self {
        assert!(d1 >= self.d1 && d2 >= self.d2);
        let mut out = IntPoly2::zero(d1, d2);
        for i in 0..=self.d1 {
            for j in 0..=self.d2 {
                let v = self.get(i, j);
                if !v.is_zero() {
                    out.set(i, j, v.clone());
                }
            }
        }
        out
    }

    pub fn add_assign(&mut self, other: &IntPoly2) {
        assert!(self.d1 >= other.d1 && self.d2 >= other.d2);
        for i in 0..=other.d1 {
            for j in 0..=other.d2 {
                let v = other.get(i, j);
                if !v.is_zero() {
                    let k = self.idx(i, j);
                    self.data[k] += v;
                }
            }
        }
    }

    pub fn sub_assign(&mut self, other: &IntPoly2) {
        assert!(self.d1 >= other.d1 && self.d2 >= other.d2);
        for i in 0..=other.d1 {
            for j in 0..=other.d2 {
                let v = other.get(i, j);
                if !v.is_zero() {
                    let k = self.idx(i, j);
                    self.data[k] -= v;
                }
            }
        }
    }

    pub fn add_assign_scaled(&mut self, other: &IntPoly2, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        assert!(self.d1 >= other.d1 && self.d2 >= other.d2);
        for i in 0..=other.d1 {
            for j in 0..=other.d2 {
                let v = other.get(i, j);
                if !v.is_zero() {
                    let t = self.idx(i, j);
                    self.data[t] += v * k;
                }
            }
        }
    }

    pub fn scale_assign(&mut self, k: &BigInt) {
        for v in &mut self.data {
            if !v.is_zero() {
                *v *= k;
            }
        }
    }

    /// Multiply by `a*u1 + b*u2 + c`, growing bounds by one where needed.
    pub fn mul_form(&self, f: &IntForm) -> IntPoly2 {
        let g1 = if f.a.is_zero() { 0 } else { 1 };
        let g2 = if f.b.is_zero() { 0 } else { 1 };
        let mut out = IntPoly2::zero(self.d1 + g1, self.d2 + g2);
        for i in 0..=self.d1 {
            for j in 0..=self.d2 {
                let v = self.get(i, j);
                if v.is_zero() {
                    continue;
                }
                if !f.a.is_zero() {
                    let k = out.idx(i + 1, j);
                    out.data[k] += v * &f.a;
                }
                if !f.b.is_zero() {
                    let k = out.idx(i, j + 1);
                    out.data[k] += v * &f.b;
                }
                if !f.c.is_zero() {
                    let k = out.idx(i, j);
                    out.data[k] += v * &f.c;
                }
            }
        }
        out
    }

    /// Exact division by `a*u1 + b*u2 + c`; `Err` returns the nonzero
    /// remainder (a polynomial in the non-pivot variable).
    pub fn div_form_exact(&self, f: &IntForm) -> Result<IntPoly2, IntPoly2> {
        if self.is_zero() {
            return Ok(IntPoly2::zero(0, 0));
        }
        if !f.a.is_zero() {
            if self.d1 == 0 {
                return Err(self.trimmed());
            }
            // one spare u2 column so cross terms never overflow mid-division
            let grow = if f.b.is_zero() { 0 } else { 1 };
            let mut rem = self.resized(self.d1, self.d2 + grow);
            let mut quot = IntPoly2::zero(self.d1 - 1, self.d2 + grow);
            let rd2 = rem.d2;
            for i in (1..=self.d1).rev() {
                for j in 0..=rd2 {
                    let v = std::mem::take(&mut rem.data[i * (rd2 + 1) + j]);
                    if v.is_zero() {
                        continue;
                    }
                    let (q, r) = v.div_rem(&f.a);
                    if !r.is_zero() {
                        // not divisible: reconstruct a witness remainder
                        let mut w = rem.clone();
                        w.set(i, j, v);
                        return Err(w.trimmed());
                    }
                    // rem -= q * u1^(i-1) u2^j * (b u2 + c)
                    if !f.b.is_zero() {
                        if j + 1 > rd2 {
                            let mut w = rem.clone();
                            w.set(i, j, v);
                            return Err(w.trimmed());
                        }
                        let k = rem.idx(i - 1, j + 1);
                        rem.data[k] -= &q * &f.b;
                    }
                    if !f.c.is_zero() {
                        let k = rem.idx(i - 1, j);
                        rem.data[k] -= &q * &f.c;
                    }
                    quot.set(i - 1, j, q);
                }
            }
            // whatever is left in row 0 is the remainder
            if (0..=rd2).all(|j| rem.get(0, j).is_zero()) {
                Ok(quot.trimmed())
            } else {
                Err(rem.trimmed())
            }
        } else {
            // form b*u2 + c with b != 0: divide along u2
            assert!(!f.b.is_zero(), "degenerate form");
            if self.d2 == 0 {
                return Err(self.trimmed());
            }
            let mut rem = self.clone();
            let mut quot = IntPoly2::zero(self.d1, self.d2 - 1);
            for j in (1..=self.d2).rev() {
                for i in 0..=self.d1 {
                    let v = std::mem::take(&mut rem.data[i * (self.d2 + 1) + j]);
                    if v.is_zero() {
                        continue;
                    }
                    let (q, r) = v.div_rem(&f.b);
                    if !r.is_zero() {
                        let mut w = rem.clone();
                        w.set(i, j, v);
                        return Err(w.trimmed());
                    }
                    if !f.c.is_zero() {
                        let k = rem.idx(i, j - 1);
                        rem.data[k] -= &q * &f.c;
                    }
                    quot.set(i, j - 1, q);
                }
            }
            if (0..=self.d1).all(|i| rem.get(i, 0).is_zero()) {
                Ok(quot.trimmed())
            } else {
                Err(rem.trimmed())
            }
        }
    }

    /// In-place Taylor shift `p(u1 + s1, u2 + s2)` via synthetic Horner.
    pub fn taylor_shift(&mut self, s1: i64, s2: i64) {
        let stride = self.d2 + 1;
        if s1 != 0 {
            let s = BigInt::from(s1);
            // shift along u1 for each fixed u2 power
            for j in 0..=self.d2 {
                for k in 0..self.d1 {
                    for i in (k..self.d1).rev() {
                        let hi = (i + 1) * stride + j;
                        if self.data[hi].is_zero() {
                            continue;
                        }
                        let add = &self.data[hi] * &s;
                        self.data[i * stride + j] += add;
                    }
                }
            }
        }
        if s2 != 0 {
            let s = BigInt::from(s2);
            for i in 0..=self.d1 {
                let row = i * stride;
                for k in 0..self.d2 {
                    for j in (k..self.d2).rev() {
                        if self.data[row + j + 1].is_zero() {
                            continue;
                        }
                        let add = &self.data[row + j + 1] * &s;
                        self.data[row + j] += add;
                    }
                }
            }
        }
    }

    /// Substitute `u1 = k1*t + c1, u2 = k2*t + c2`; returns dense univariate
    /// coefficients (ascending). Used for restriction of shifted arguments
    /// to hyperplanes.
    pub fn restrict_affine_line(&self, k1: i64, c1: i64, k2: i64, c2: i64) -> Vec<BigInt> {
        let n = self.d1 + self.d2;
        let mut out = vec![BigInt::zero(); n + 1];
        // rows of (k*t + c)^e for both variables
        let row = |k: i64, c: i64, maxe: usize| -> Vec<Vec<BigInt>> {
            let k = BigInt::from(k);
            let c = BigInt::from(c);
            let mut rows: Vec<Vec<BigInt>> = vec![vec![BigInt::one()]];
            for e in 1..=maxe {
                let prev = &rows[e - 1];
                let mut r = vec![BigInt::zero(); e + 1];
                for (t, v) in prev.iter().enumerate() {
                    if v.is_zero() {
                        continue;
                    }
                    r[t + 1] += v * &k;
                    r[t] += v * &c;
                }
                rows.push(r);
            }
            rows
        };
        let r1 = row(k1, c1, self.d1);
        let r2 = row(k2, c2, self.d2);
        for i in 0..=self.d1 {
            for j in 0..=self.d2 {
                let v = self.get(i, j);
                if v.is_zero() {
                    continue;
                }
                for (t1, a) in r1[i].iter().enumerate() {
                    if a.is_zero() {
                        continue;
                    }
                    let va = v * a;
                    for (t2, b) in r2[j].iter().enumerate() {
                        if b.is_zero() {
                            continue;
                        }
                        out[t1 + t2] += &va * b;
                    }
                }
            }
        }
        out
    }

    /// Integer linear change of variables:
    /// `q(v1, v2) = p(s[0][0] v1 + s[0][1] v2, s[1][0] v1 + s[1][1] v2)`.
    pub fn substitute_int2(&self, s: [[i64; 2]; 2]) -> IntPoly2 {
        if self.is_zero() {
            return IntPoly2::zero(0, 0);
        }
        // fast path: diagonal sign flips
        if s[0][1] == 0 && s[1][0] == 0 && s[0][0].abs() == 1 && s[1][1].abs() == 1 {
            let mut out = IntPoly2::zero(self.d1, self.d2);
            for i in 0..=self.d1 {
                for j in 0..=self.d2 {
                    let v = self.get(i, j);
                    if v.is_zero() {
                        continue;
                    }
                    let neg = (s[0][0] < 0 && i % 2 == 1) ^ (s[1][1] < 0 && j % 2 == 1);
                    out.set(i, j, if neg { -v.clone() } else { v.clone() });
                }
            }
            return out;
        }
        // rows of (a v1 + b v2)^e: coefficient of v1^k v2^(e-k) at index k
        let rows = |a: i64, b: i64, maxe: usize| -> Vec<Vec<BigInt>> {
            let a = BigInt::from(a);
            let b = BigInt::from(b);
            let mut rows: Vec<Vec<BigInt>> = vec![vec![BigInt::one()]];
            for e in 1..=maxe {
                let prev = &rows[e - 1];
                let mut r = vec![BigInt::zero(); e + 1];
                for (k, v) in prev.iter().enumerate() {
                    if v.is_zero() {
                        continue;
                    }
                    r[k + 1] += v * &a;
                    r[k] += v * &b;
                }
                rows.push(r);
            }
            rows
        };
        let r1 = rows(s[0][0], s[0][1], self.d1);
        let r2 = rows(s[1][0], s[1][1], self.d2);
        let d = self.d1 + self.d2;
        let mut out = IntPoly2::zero(d, d);
        for i in 0..=self.d1 {
            for j in 0..=self.d2 {
                let v = self.get(i, j);
                if v.is_zero() {
                    continue;
                }
                for (k1, a) in r1[i].iter().enumerate() {
                    if a.is_zero() {
                        continue;
                    }
                    let va = v * a;
                    for (k2, b) in r2[j].iter().enumerate() {
                        if b.is_zero() {
                            continue;
                        }
                        let idx = out.idx(k1 + k2, (i - k1) + (j - k2));
                        out.data[idx] += &va * b;
                    }
                }
            }
        }
        out.trimmed()
    }

    /// Sparse product against a list of monomial terms.
    pub fn mul_sparse(&self, terms: &[(u16, u16, BigInt)]) -> IntPoly2 {
        let e1 = terms.iter().map(|t| t.0 as usize).max().unwrap_or(0);
        let e2 = terms.iter().map(|t| t.1 as usize).max().unwrap_or(0);
        let mut out = IntPoly2::zero(self.d1 + e1, self.d2 + e2);
        for i in 0..=self.d1 {
            for j in 0..=self.d2 {
                let v = self.get(i, j);
                if v.is_zero() {
                    continue;
                }
                for (a, b, c) in terms {
                    let k = out.idx(i + *a as usize, j + *b as usize);
                    out.data[k] += v * c;
                }
            }
        }
        out
    }

    pub fn to_multipoly(&self, scale: &Rat) -> MultiPoly<Rat> {
        let mut out = MultiPoly::zero(2);
        for i in 0..=self.d1 {
            for j in 0..=self.d2 {
                let v = self.get(i, j);
                if !v.is_zero() {
                    out.terms.insert(
                        Mono(vec![i as u16, j as u16]),
                        Rat::from_bigint(v.clone()).mul_ref(scale),
                    );
                }
            }
        }
        out
    }

    /// Convert a 2-variable rational polynomial; returns the integer
    /// polynomial together with the common denominator L (p = int / L).
    pub fn from_multipoly(p: &MultiPoly<Rat>) -> (IntPoly2, BigInt) {
        assert_eq!(p.vars, 2);
        if p.is_zero() {
            return (IntPoly2::zero(0, 0), BigInt::one());
        }
        let mut lcm = BigInt::one();
        for c in p.terms.values() {
            lcm = lcm.lcm(c.denom());
        }
        let d1 = p.terms.keys().map(|m| m.0[0]).max().unwrap() as usize;
        let d2 = p.terms.keys().map(|m| m.0[1]).max().unwrap() as usize;
        let mut out = IntPoly2::zero(d1, d2);
        for (m, c) in &p.terms {
            out.set(
                m.0[0] as usize,
                m.0[1] as usize,
                c.numer() * (&lcm / c.denom()),
            );
        }
        (out, lcm)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::poly_shift;

    fn to_sparse(p: &IntPoly2) -> MultiPoly<Rat> {
        p.to_multipoly(&Rat::one())
    }

    fn sample() -> IntPoly2 {
        // 3 u1^2 u2 - 5 u1 + 7 u2^3 + 2
        let mut p = IntPoly2::zero(2, 3);
        p.set(2, 1, 3.into());
        p.set(1, 0, (-5).into());
        p.set(0, 3, 7.into());
        p.set(0, 0, 2.into());
        p
    }

    #[test]
    fn shift_matches_sparse_reference() {
        let p = sample();
        let mut q = p.clone();
        q.taylor_shift(4, -6);
        let expect = poly_shift(&to_sparse(&p), &[Rat::from_int(4), Rat::from_int(-6)]);
        assert_eq!(to_sparse(&q), expect);
    }

    #[test]
    fn mul_then_div_roundtrip() {
        let p = sample();
        let f = IntForm::new(2, 1, -2);
        let prod = p.mul_form(&f);
        let q = prod.div_form_exact(&f).unwrap();
        assert_eq!(to_sparse(&q), to_sparse(&p));
    }

    #[test]
    fn div_reports_remainder() {
        let mut p = IntPoly2::zero(1, 0);
        p.set(1, 0, 1.into());
        p.set(0, 0, 1.into()); // u1 + 1
        let f = IntForm::new(1, 0, 0); // u1
        let err = p.div_form_exact(&f).unwrap_err();
        assert_eq!(err.get(0, 0), &BigInt::one());
    }

    #[test]
    fn restrict_line_matches_substitution() {
        let p = sample();
        // u1 = 2t + 1, u2 = -3t
        let r = p.restrict_affine_line(2, 1, -3, 0);
        // reference via sparse substitution
        let sp = to_sparse(&p);
        let subst = vec![
            MultiPoly::<Rat>::linear(1, &[Rat::from_int(2)], &Rat::one()),
            MultiPoly::<Rat>::linear(1, &[Rat::from_int(-3)], &Rat::zero()),
        ];
        let expect = sp.substitute_linear(1, &subst);
        for (t, v) in r.iter().enumerate() {
            assert_eq!(
                Rat::from_bigint(v.clone()),
                expect.coeff(&Mono(vec![t as u16]))
            );
        }
    }

    #[test]
    fn substitution_matches_sparse_reference() {
        let p = sample();
        let s = [[-1i64, 3], [0, 1]];
        let got = to_sparse(&p.substitute_int2(s));
        let subst = vec![
            MultiPoly::<Rat>::linear(2, &[Rat::from_int(-1), Rat::from_int(3)], &Rat::zero()),
            MultiPoly::<Rat>::linear(2, &[Rat::zero(), Rat::one()], &Rat::zero()),
        ];
        let expect = to_sparse(&p).substitute_linear(2, &subst);
        assert_eq!(got, expect);
        // sign-flip fast path
        let got2 = to_sparse(&p.substitute_int2([[-1, 0], [0, 1]]));
        let subst2 = vec![
            MultiPoly::<Rat>::linear(2, &[Rat::from_int(-1), Rat::zero()], &Rat::zero()),
            MultiPoly::<Rat>::linear(2, &[Rat::zero(), Rat::one()], &Rat::zero()),
        ];
        assert_eq!(got2, to_sparse(&p).substitute_linear(2, &subst2));
    }

    #[test]
    fn mul_form_matches_sparse() {
        let p = sample();
        let f = IntForm::new(0, 2, 5);
        let got = to_sparse(&p.mul_form(&f));
        let form =
            MultiPoly::<Rat>::linear(2, &[Rat::zero(), Rat::from_int(2)], &Rat::from_int(5));
        let expect = &to_sparse(&p) * &form;
        assert_eq!(got, expect);
    }
}
