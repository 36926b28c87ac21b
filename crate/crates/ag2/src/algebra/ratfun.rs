//! Rational functions whose denominators stay factored into affine-linear
//! forms. No general multivariate gcd: cancellation happens only against
//! affine factors, which covers every denominator this engine meets.

use super::affine::{exact_div_affine, mul_affine, restrict_to_locus, AffineForm};
use super::poly::{Coeff, Degree, MultiPoly};
use super::rat::Rat;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone)]
pub struct FactoredRatFun {
    pub num: MultiPoly<Rat>,
    /// Normalized affine forms with positive multiplicities.
    pub den: BTreeMap<AffineForm, u32>,
    /// Scalar prefactor (collects form scales and constants).
    pub scalar: Rat,
}

impl Serialize for FactoredRatFun {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = ser.serialize_struct("FactoredRatFun", 3)?;
        st.serialize_field("num", &self.num)?;
        let den: Vec<(&AffineForm, &u32)> = self.den.iter().collect();
        st.serialize_field("den", &den)?;
        st.serialize_field("scalar", &self.scalar)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for FactoredRatFun {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            num: MultiPoly<Rat>,
            den: Vec<(AffineForm, u32)>,
            scalar: Rat,
        }
        let raw = Raw::deserialize(de)?;
        let mut den = BTreeMap::new();
        for (f, m) in raw.den {
            if m == 0 {
                return Err(serde::de::Error::custom("zero multiplicity"));
            }
            *den.entry(f).or_insert(0) += m;
        }
        Ok(FactoredRatFun {
            num: raw.num,
            den,
            scalar: raw.scalar,
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ResidueError {
    #[error("form appears with multiplicity {mult}, not a simple pole")]
    NotSimplePole { mult: u32 },
    #[error("form does not appear in the denominator; residue is zero")]
    NotAPole,
}

impl FactoredRatFun {
    pub fn zero(vars: usize) -> Self {
        FactoredRatFun {
            num: MultiPoly::zero(vars),
            den: BTreeMap::new(),
            scalar: Rat::one(),
        }
    }

    pub fn one(vars: usize) -> Self {
        FactoredRatFun {
            num: MultiPoly::one(vars),
            den: BTreeMap::new(),
            scalar: Rat::one(),
        }
    }

    pub fn constant(vars: usize, c: Rat) -> Self {
        FactoredRatFun {
            num: MultiPoly::one(vars),
            den: BTreeMap::new(),
            scalar: c,
        }
        .normalized()
    }

    pub fn from_poly(p: MultiPoly<Rat>) -> Self {
        FactoredRatFun {
            num: p,
            den: BTreeMap::new(),
            scalar: Rat::one(),
        }
        .normalized()
    }

    pub fn vars(&self) -> usize {
        self.num.vars
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero() || self.scalar.is_zero()
    }

    fn normalized(mut self) -> Self {
        if self.is_zero() {
            return Self::zero(self.num.vars);
        }
        self
    }

    /// deg(num) - sum of denominator multiplicities; NegInf for zero.
    pub fn degree(&self) -> Degree {
        if self.is_zero() {
            return Degree::NegInf;
        }
        let n = self.num.degree().as_int().unwrap();
        let d: i64 = self.den.values().map(|&m| m as i64).sum();
        Degree::Of(n - d)
    }

    /// Cancel denominator factors that divide the numerator exactly,
    /// repeatedly, until reduced.
    pub fn reduce(&self) -> Self {
        if self.is_zero() {
            return Self::zero(self.num.vars);
        }
        let mut num = self.num.clone();
        let mut den = self.den.clone();
        let mut changed = true;
        while changed {
            changed = false;
            for (form, mult) in den.clone() {
                let mut m = mult;
                while m > 0 {
                    match exact_div_affine(&num, &form) {
                        Ok(q) => {
                            num = q;
                            m -= 1;
                            changed = true;
                        }
                        Err(_) => break,
                    }
                }
                if m == 0 {
                    den.remove(&form);
                } else {
                    den.insert(form, m);
                }
            }
        }
        FactoredRatFun {
            num,
            den,
            scalar: self.scalar.clone(),
        }
        .normalized()
    }

    pub fn mul(&self, other: &FactoredRatFun) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.vars());
        }
        let mut den = self.den.clone();
        for (f, m) in &other.den {
            *den.entry(f.clone()).or_insert(0) += m;
        }
        FactoredRatFun {
            num: &self.num * &other.num,
            den,
            scalar: &self.scalar * &other.scalar,
        }
    }

    pub fn mul_scalar(&self, k: &Rat) -> Self {
        if k.is_zero() {
            return Self::zero(self.vars());
        }
        FactoredRatFun {
            num: self.num.clone(),
            den: self.den.clone(),
            scalar: &self.scalar * k,
        }
        .normalized()
    }

    pub fn neg(&self) -> Self {
        self.mul_scalar(&Rat::from_int(-1))
    }

    /// Add with least-common-multiple denominator (multisets by max).
    pub fn add(&self, other: &FactoredRatFun) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let mut lcm: BTreeMap<AffineForm, u32> = self.den.clone();
        for (f, m) in &other.den {
            let e = lcm.entry(f.clone()).or_insert(0);
            *e = (*e).max(*m);
        }
        let cof = |own: &BTreeMap<AffineForm, u32>| {
            let mut c: Vec<(AffineForm, u32)> = Vec::new();
            for (f, m) in &lcm {
                let have = own.get(f).copied().unwrap_or(0);
                if *m > have {
                    c.push((f.clone(), m - have));
                }
            }
            c
        };
        let expand = |num: &MultiPoly<Rat>, scalar: &Rat, cofs: Vec<(AffineForm, u32)>| {
            let mut p = num.scale(scalar);
            for (f, m) in cofs {
                for _ in 0..m {
                    p = mul_affine(&p, &f);
                }
            }
            p
        };
        let a = expand(&self.num, &self.scalar, cof(&self.den));
        let b = expand(&other.num, &other.scalar, cof(&other.den));
        FactoredRatFun {
            num: &a + &b,
            den: lcm,
            scalar: Rat::one(),
        }
        .normalized()
    }

    pub fn sub(&self, other: &FactoredRatFun) -> Self {
        self.add(&other.neg())
    }

    /// Shift the argument by a rational vector.
    pub fn shift(&self, delta: &[Rat]) -> Self {
        let num = super::poly::poly_shift(&self.num, delta);
        let mut den = BTreeMap::new();
        let mut scalar = self.scalar.clone();
        for (f, m) in &self.den {
            let shifted = f.shift(delta);
            // re-normalize: shifting keeps the linear part primitive, so the
            // form is already canonical; its scale stays with the old form.
            scalar = scalar / shifted.scale.pow(*m);
            let mut canon = shifted.clone();
            canon.scale = Rat::one();
            *den.entry(canon).or_insert(0) += m;
            // shifted.scale is 1 when f was canonical
        }
        FactoredRatFun { num, den, scalar }.normalized()
    }

    /// Equality via cross-multiplication after reduction.
    pub fn eq_ratfun(&self, other: &FactoredRatFun) -> bool {
        let a = self.reduce();
        let b = other.reduce();
        if a.is_zero() || b.is_zero() {
            return a.is_zero() && b.is_zero();
        }
        // cross multiply: a.num * scalar_a * (b.den-forms) == b.num * scalar_b * (a.den-forms)
        let mut lhs = a.num.scale(&a.scalar);
        for (f, m) in &b.den {
            for _ in 0..*m {
                lhs = mul_affine(&lhs, f);
            }
        }
        let mut rhs = b.num.scale(&b.scalar);
        for (f, m) in &a.den {
            for _ in 0..*m {
                rhs = mul_affine(&rhs, f);
            }
        }
        lhs == rhs
    }

    /// Evaluate at a point (must not lie on any denominator locus).
    pub fn eval(&self, point: &[Rat]) -> Rat {
        let mut v = &self.num.eval_rat(point) * &self.scalar;
        for (f, m) in &self.den {
            let fv = f.eval(point);
            assert!(!fv.is_zero(), "evaluation at a pole");
            for _ in 0..*m {
                v = v / fv.clone();
            }
        }
        v
    }

    /// Residue at the locus of `ell`, with respect to the *raw* form
    /// `ell.scale * ell_normalized`: returns `(ell_raw * f)` restricted to
    /// the locus, as a rational function of the locus parameters.
    ///
    /// `Ok` requires `ell` to appear with multiplicity exactly 1;
    /// a missing factor reports `NotAPole` (the residue is zero).
    pub fn residue_at(&self, ell: &AffineForm) -> Result<FactoredRatFun, ResidueError> {
        let mut key = ell.clone();
        key.scale = Rat::one();
        let found = self
            .den
            .iter()
            .find(|(f, _)| f.same_locus(&key))
            .map(|(f, m)| (f.clone(), *m));
        let Some((form, mult)) = found else {
            return Err(ResidueError::NotAPole);
        };
        if mult != 1 {
            return Err(ResidueError::NotSimplePole { mult });
        }
        // (ell_raw * f): cancel the factor, keep the rest, then restrict.
        let mut den = self.den.clone();
        den.remove(&form);
        // ell_raw = ell.scale * normalized; normalized forms are equal
        let scalar = &self.scalar * &ell.scale;
        let restricted_num = restrict_to_locus(&self.num, &form);
        let out_vars = restricted_num.vars;
        let mut out = FactoredRatFun {
            num: restricted_num,
            den: BTreeMap::new(),
            scalar,
        };
        for (f, m) in den {
            // restrict each remaining denominator form to the locus
            let fp = f.to_poly();
            let restricted = restrict_to_locus(&fp, &form);
            assert!(
                !restricted.is_zero(),
                "denominator forms must intersect the residue locus transversally"
            );
            if let Some(d) = restricted.degree().as_int() {
                if d == 0 {
                    // constant on the locus: fold into scalar
                    let c = restricted.coeff(&super::poly::Mono::constant(out_vars));
                    for _ in 0..m {
                        out.scalar = &out.scalar / &c;
                    }
                    continue;
                }
            }
            // affine in the parameters
            let lin: Vec<Rat> = (0..out_vars)
                .map(|i| restricted.coeff(&super::poly::Mono::var(out_vars, i)))
                .collect();
            let cst = restricted.coeff(&super::poly::Mono::constant(out_vars));
            let rf = AffineForm::new(&lin, &cst);
            out.scalar = &out.scalar / &rf.scale.pow(m);
            let mut canon = rf;
            canon.scale = Rat::one();
            *out.den.entry(canon).or_insert(0) += m;
        }
        Ok(out.reduce())
    }

    /// Substitute the single variable by an affine expression `a*t + b` in a
    /// new single variable; only for univariate functions (used to re-express
    /// restricted residues in the paper's surviving coordinate).
    pub fn compose_affine_1var(&self, a: &Rat, b: &Rat) -> FactoredRatFun {
        assert_eq!(self.vars(), 1);
        let subst = vec![MultiPoly::<Rat>::linear(1, &[a.clone()], b)];
        let num = self.num.substitute_linear(1, &subst);
        let mut out = FactoredRatFun {
            num,
            den: BTreeMap::new(),
            scalar: self.scalar.clone(),
        };
        for (f, m) in &self.den {
            let fp = f.to_poly().substitute_linear(1, &subst);
            let lin = vec![fp.coeff(&super::poly::Mono::var(1, 0))];
            let cst = fp.coeff(&super::poly::Mono::constant(1));
            let rf = AffineForm::new(&lin, &cst);
            out.scalar = &out.scalar / &rf.scale.pow(*m);
            let mut canon = rf;
            canon.scale = Rat::one();
            *out.den.entry(canon).or_insert(0) += m;
        }
        out.normalized()
    }
}

impl PartialEq for FactoredRatFun {
    fn eq(&self, other: &Self) -> bool {
        self.eq_ratfun(other)
    }
}

impl fmt::Debug for FactoredRatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) * [{:?}]", self.scalar, self.num)?;
        if !self.den.is_empty() {
            write!(f, " / ")?;
            for (form, m) in &self.den {
                write!(f, "{:?}^{} ", form, m)?;
            }
        }
        Ok(())
    }
}
