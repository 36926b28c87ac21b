//! Sparse multivariate polynomials over an exact coefficient ring.
//!
//! Terms are kept in a `BTreeMap` keyed by graded-lexicographic monomial
//! order, which is also the canonical serialization order. The zero
//! polynomial stores no terms and has degree `Degree::NegInf`.

use super::rat::Rat;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Exponent vector with graded-lexicographic ordering.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mono(pub Vec<u16>);

impl Mono {
    pub fn constant(vars: usize) -> Self {
        Mono(vec![0; vars])
    }

    pub fn var(vars: usize, idx: usize) -> Self {
        let mut e = vec![0; vars];
        e[idx] = 1;
        Mono(e)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        Mono(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Total degree with a sentinel below every integer for the zero polynomial.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Degree {
    NegInf,
    Of(i64),
}

impl Degree {
    pub fn as_int(&self) -> Option<i64> {
        match self {
            Degree::NegInf => None,
            Degree::Of(d) => Some(*d),
        }
    }
}

impl PartialOrd for Degree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Degree {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Degree::NegInf, Degree::NegInf) => Ordering::Equal,
            (Degree::NegInf, _) => Ordering::Less,
            (_, Degree::NegInf) => Ordering::Greater,
            (Degree::Of(a), Degree::Of(b)) => a.cmp(b),
        }
    }
}

/// Coefficient ring: a commutative ring that is also a Q-algebra with
/// decidable zero test. Implemented by `Rat` and `LaurentFrac`.
pub trait Coeff: Clone + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add_ref(&self, other: &Self) -> Self;
    fn sub_ref(&self, other: &Self) -> Self;
    fn mul_ref(&self, other: &Self) -> Self;
    fn neg_ref(&self) -> Self;
    fn scale(&self, k: &Rat) -> Self;
}

impl Coeff for Rat {
    fn zero() -> Self {
        Rat::zero()
    }
    fn one() -> Self {
        Rat::one()
    }
    fn is_zero(&self) -> bool {
        Rat::is_zero(self)
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self - other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn scale(&self, k: &Rat) -> Self {
        self * k
    }
}

/// Sparse multivariate polynomial; no zero coefficients are stored.
#[derive(Clone, PartialEq, Eq)]
pub struct MultiPoly<C: Coeff = Rat> {
    pub vars: usize,
    pub terms: std::collections::BTreeMap<Mono, C>,
}

impl<C: Coeff> MultiPoly<C> {
    pub fn zero(vars: usize) -> Self {
        MultiPoly {
            vars,
            terms: Default::default(),
        }
    }

    pub fn constant(vars: usize, c: C) -> Self {
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(Mono::constant(vars), c);
        }
        p
    }

    pub fn one(vars: usize) -> Self {
        Self::constant(vars, C::one())
    }

    pub fn var(vars: usize, idx: usize) -> Self {
        let mut p = Self::zero(vars);
        p.terms.insert(Mono::var(vars, idx), C::one());
        p
    }

    pub fn monomial(vars: usize, exps: &[u16], c: C) -> Self {
        assert_eq!(exps.len(), vars);
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(Mono(exps.to_vec()), c);
        }
        p
    }

    /// Linear polynomial `sum coeffs[i] * u_i + constant`.
    pub fn linear(vars: usize, coeffs: &[Rat], constant: &Rat) -> Self
    where
        C: From<Rat>,
    {
        let mut p = Self::zero(vars);
        for (i, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                p.terms.insert(Mono::var(vars, i), C::from(c.clone()));
            }
        }
        if !constant.is_zero() {
            p.terms.insert(Mono::constant(vars), C::from(constant.clone()));
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Degree {
        self.terms
            .keys()
            .map(|m| m.total_degree() as i64)
            .max()
            .map_or(Degree::NegInf, Degree::Of)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Mono) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn add_term(&mut self, m: Mono, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().add_ref(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn scale(&self, k: &Rat) -> Self {
        if k.is_zero() {
            return Self::zero(self.vars);
        }
        let mut out = Self::zero(self.vars);
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), c.scale(k));
        }
        out
    }

    pub fn mul_coeff(&self, k: &C) -> Self {
        if k.is_zero() {
            return Self::zero(self.vars);
        }
        let mut out = Self::zero(self.vars);
        for (m, c) in &self.terms {
            let p = c.mul_ref(k);
            if !p.is_zero() {
                out.terms.insert(m.clone(), p);
            }
        }
        out
    }

    pub fn mul_mono(&self, m: &Mono) -> Self {
        let mut out = Self::zero(self.vars);
        for (mm, c) in &self.terms {
            out.terms.insert(mm.mul(m), c.clone());
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.vars);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Homogeneous component of total degree `d`.
    pub fn homogeneous_part(&self, d: u32) -> Self {
        let mut out = Self::zero(self.vars);
        for (m, c) in &self.terms {
            if m.total_degree() == d {
                out.terms.insert(m.clone(), c.clone());
            }
        }
        out
    }

    /// Map coefficients, dropping any that become zero.
    pub fn map_coeffs<D: Coeff>(&self, mut f: impl FnMut(&C) -> D) -> MultiPoly<D> {
        let mut out = MultiPoly::zero(self.vars);
        for (m, c) in &self.terms {
            let d = f(c);
            if !d.is_zero() {
                out.terms.insert(m.clone(), d);
            }
        }
        out
    }

    /// Evaluate at a point given by rational coordinates.
    pub fn eval_rat(&self, point: &[Rat]) -> C {
        assert_eq!(point.len(), self.vars);
        let mut acc = C::zero();
        for (m, c) in &self.terms {
            let mut k = Rat::one();
            for (i, &e) in m.0.iter().enumerate() {
                k = k * point[i].pow(e as u32);
            }
            acc = acc.add_ref(&c.scale(&k));
        }
        acc
    }

    /// Substitute each variable by an affine-linear expression in a new
    /// variable set: `u_i -> subst[i]`. Used for hyperplane restriction.
    pub fn substitute_linear(&self, out_vars: usize, subst: &[MultiPoly<Rat>]) -> MultiPoly<C> {
        assert_eq!(subst.len(), self.vars);
        let mut out = MultiPoly::zero(out_vars);
        // cache powers of each substitution polynomial
        let maxdeg: Vec<u16> = (0..self.vars)
            .map(|i| self.terms.keys().map(|m| m.0[i]).max().unwrap_or(0))
            .collect();
        let mut powers: Vec<Vec<MultiPoly<Rat>>> = Vec::with_capacity(self.vars);
        for i in 0..self.vars {
            let mut ps = vec![MultiPoly::<Rat>::one(out_vars)];
            for e in 1..=maxdeg[i] {
                let next = &ps[(e - 1) as usize] * &subst[i];
                ps.push(next);
            }
            powers.push(ps);
        }
        for (m, c) in &self.terms {
            let mut prod = MultiPoly::<Rat>::one(out_vars);
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    prod = &prod * &powers[i][e as usize];
                }
            }
            for (pm, pc) in &prod.terms {
                out.add_term(pm.clone(), c.scale(pc));
            }
        }
        out
    }
}

impl<C: Coeff> Add for &MultiPoly<C> {
    type Output = MultiPoly<C>;
    fn add(self, rhs: &MultiPoly<C>) -> MultiPoly<C> {
        assert_eq!(self.vars, rhs.vars);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<C: Coeff> Sub for &MultiPoly<C> {
    type Output = MultiPoly<C>;
    fn sub(self, rhs: &MultiPoly<C>) -> MultiPoly<C> {
        assert_eq!(self.vars, rhs.vars);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.neg_ref());
        }
        out
    }
}

impl<C: Coeff> Neg for &MultiPoly<C> {
    type Output = MultiPoly<C>;
    fn neg(self) -> MultiPoly<C> {
        let mut out = MultiPoly::zero(self.vars);
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), c.neg_ref());
        }
        out
    }
}

impl<C: Coeff> Mul for &MultiPoly<C> {
    type Output = MultiPoly<C>;
    fn mul(self, rhs: &MultiPoly<C>) -> MultiPoly<C> {
        assert_eq!(self.vars, rhs.vars);
        let mut out = MultiPoly::zero(self.vars);
        // iterate over the smaller operand outside
        let (small, big) = if self.num_terms() <= rhs.num_terms() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        for (m1, c1) in &small.terms {
            for (m2, c2) in &big.terms {
                let p = c1.mul_ref(c2);
                if !p.is_zero() {
                    out.add_term(m1.mul(m2), p);
                }
            }
        }
        out
    }
}

impl<C: Coeff + Serialize> Serialize for MultiPoly<C> {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = ser.serialize_struct("MultiPoly", 2)?;
        st.serialize_field("vars", &self.vars)?;
        // canonical graded-lex order is the BTreeMap iteration order
        let terms: Vec<(&Vec<u16>, &C)> = self.terms.iter().map(|(m, c)| (&m.0, c)).collect();
        st.serialize_field("terms", &terms)?;
        st.end()
    }
}

impl<'de, C: Coeff + Deserialize<'de>> Deserialize<'de> for MultiPoly<C> {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw<C> {
            vars: usize,
            terms: Vec<(Vec<u16>, C)>,
        }
        let raw = Raw::<C>::deserialize(de)?;
        let mut p = MultiPoly::zero(raw.vars);
        for (e, c) in raw.terms {
            if e.len() != raw.vars {
                return Err(serde::de::Error::custom("exponent arity mismatch"));
            }
            p.add_term(Mono(e), c);
        }
        Ok(p)
    }
}

impl<C: Coeff> fmt::Debug for MultiPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({:?})*u^{:?}", c, m.0)?;
        }
        Ok(())
    }
}

/// Shift the argument: returns q with q(u) = p(u + delta), by exact
/// binomial expansion.
pub fn poly_shift<C: Coeff>(p: &MultiPoly<C>, delta: &[Rat]) -> MultiPoly<C> {
    assert_eq!(delta.len(), p.vars, "shift vector length mismatch");
    if delta.iter().all(|d| d.is_zero()) {
        return p.clone();
    }
    let vars = p.vars;
    // binomial(n, k) cache up to max degree
    let maxd = p
        .terms
        .keys()
        .flat_map(|m| m.0.iter().copied())
        .max()
        .unwrap_or(0) as usize;
    let mut binom = vec![vec![Rat::zero(); maxd + 1]; maxd + 1];
    for n in 0..=maxd {
        binom[n][0] = Rat::one();
        for k in 1..=n {
            binom[n][k] = &binom[n - 1][k - 1] + binom[n - 1].get(k).unwrap_or(&Rat::zero());
        }
    }
    // powers of each delta component
    let mut dpow: Vec<Vec<Rat>> = Vec::with_capacity(vars);
    for d in delta {
        let mut ps = vec![Rat::one()];
        for e in 1..=maxd {
            let next = &ps[e - 1] * d;
            ps.push(next);
        }
        dpow.push(ps);
    }
    let mut out = MultiPoly::zero(vars);
    for (m, c) in &p.terms {
        // expand prod_i (u_i + d_i)^{e_i}
        let mut partial: Vec<(Vec<u16>, Rat)> = vec![(Vec::with_capacity(vars), Rat::one())];
        for (i, &e) in m.0.iter().enumerate() {
            let e = e as usize;
            let mut next = Vec::with_capacity(partial.len() * (e + 1));
            for (exps, k) in &partial {
                if delta[i].is_zero() {
                    let mut ex = exps.clone();
                    ex.push(e as u16);
                    next.push((ex, k.clone()));
                    continue;
                }
                for j in 0..=e {
                    let coef = &binom[e][j] * &dpow[i][e - j];
                    if coef.is_zero() {
                        continue;
                    }
                    let mut ex = exps.clone();
                    ex.push(j as u16);
                    next.push((ex, k * &coef));
                }
            }
            partial = next;
        }
        for (exps, k) in partial {
            out.add_term(Mono(exps), c.scale(&k));
        }
    }
    out
}
