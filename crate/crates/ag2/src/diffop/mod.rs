//! Difference-operator algebra: the dual Macdonald-Ruijsenaars operators for
//! AG2, the m=0 reductions, application to (exponential) polynomials,
//! composition and commutators, line restriction, and the structural
//! condition checkers.

mod apply;
mod build;
mod structure;

pub use apply::{apply_to_exp, apply_to_poly, commutator, compose, restrict_line, ExpPolynomial};
pub use build::{make_d0, make_d1, make_d2, make_m0_family, quasiminuscule_doubled_a2, M0Family};
pub use structure::{
    check_structural_conditions, kappa_at_infinity, leading_expansion, residue_pair_sum,
    weyl_transform, LeadingExpansion, ResiduePair, StructureReport,
};

use crate::algebra::{EExp, FactoredRatFun, Rat};
use crate::lattice::LatticeVector;
use serde::{Deserialize, Serialize};

/// One shift term `coeff(z) * T_shift`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OpTerm {
    /// Shift applied to the u-coordinates of z.
    pub shift_u: Vec<Rat>,
    /// Lattice shift vector when the operator lives on the G2 lattice.
    pub shift_lattice: Option<LatticeVector>,
    /// Exponent of the Laurent monomial e^<x,shift> picked up on e^<z,x>.
    pub e_exp: Option<EExp>,
    pub coeff: FactoredRatFun,
}

/// A difference operator, either in the form `sum a_t (T_t - 1)`
/// (`minus_one = true`, scalar ignored) or the plain normal form
/// `scalar(z) + sum c_t T_t`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DifferenceOperator {
    pub vars: usize,
    pub minus_one: bool,
    pub scalar: FactoredRatFun,
    pub terms: Vec<OpTerm>,
}

#[derive(Debug, thiserror::Error)]
pub enum OpError {
    #[error("denominator factor {form} fails to cancel; restricted witness {witness}")]
    ResidueObstruction { form: String, witness: String },
    #[error("coefficient depends on z1 + z2: {0}")]
    NotLineReducible(String),
}

impl DifferenceOperator {
    pub fn term_for_lattice(&self, v: LatticeVector) -> Option<&OpTerm> {
        self.terms
            .iter()
            .find(|t| t.shift_lattice == Some(v))
    }

    pub fn term_for_shift(&self, shift: &[Rat]) -> Option<&OpTerm> {
        self.terms.iter().find(|t| t.shift_u == shift)
    }

    /// Drop identically-zero coefficients and sort terms deterministically.
    pub fn normalized(mut self) -> Self {
        self.terms.retain(|t| !t.coeff.is_zero());
        self.terms.sort_by(|a, b| a.shift_u.cmp(&b.shift_u));
        self
    }

    /// Convert `sum a_t (T_t - 1)` to the plain normal form by expanding the
    /// constant part `-sum a_t` into a single rational function.
    pub fn to_plain(&self) -> DifferenceOperator {
        if !self.minus_one {
            return self.clone();
        }
        let mut s = FactoredRatFun::zero(self.vars);
        for t in &self.terms {
            s = s.add(&t.coeff.neg());
        }
        DifferenceOperator {
            vars: self.vars,
            minus_one: false,
            scalar: s.reduce(),
            terms: self.terms.clone(),
        }
    }

    /// Coefficient-level equality after conversion to plain normal form and
    /// shift-merging: scalars equal and coefficients equal per shift.
    pub fn eq_operator(&self, other: &DifferenceOperator) -> bool {
        if self.vars != other.vars {
            return false;
        }
        let a = self.to_plain().normalized();
        let b = other.to_plain().normalized();
        if !a.scalar.eq_ratfun(&b.scalar) {
            return false;
        }
        let mut shifts: Vec<Vec<Rat>> = a
            .terms
            .iter()
            .chain(b.terms.iter())
            .map(|t| t.shift_u.clone())
            .collect();
        shifts.sort();
        shifts.dedup();
        for s in shifts {
            let za = FactoredRatFun::zero(a.vars);
            let ca = a.term_for_shift(&s).map(|t| &t.coeff).unwrap_or(&za);
            let cb = b.term_for_shift(&s).map(|t| &t.coeff).unwrap_or(&za);
            if !ca.eq_ratfun(cb) {
                return false;
            }
        }
        true
    }

    /// Scale every coefficient (and scalar) by a rational constant.
    pub fn scale(&self, k: &Rat) -> DifferenceOperator {
        DifferenceOperator {
            vars: self.vars,
            minus_one: self.minus_one,
            scalar: self.scalar.mul_scalar(k),
            terms: self
                .terms
                .iter()
                .map(|t| OpTerm {
                    shift_u: t.shift_u.clone(),
                    shift_lattice: t.shift_lattice,
                    e_exp: t.e_exp,
                    coeff: t.coeff.mul_scalar(k),
                })
                .collect(),
        }
    }

    /// Add a rational constant to the plain-form scalar part.
    pub fn add_constant(&self, k: &Rat) -> DifferenceOperator {
        let mut p = self.to_plain();
        p.scalar = p
            .scalar
            .add(&FactoredRatFun::constant(self.vars, k.clone()));
        p
    }

    /// Sum of two operators (plain form).
    pub fn add_op(&self, other: &DifferenceOperator) -> DifferenceOperator {
        assert_eq!(self.vars, other.vars);
        let a = self.to_plain();
        let b = other.to_plain();
        let mut terms = a.terms.clone();
        for t in &b.terms {
            if let Some(existing) = terms.iter_mut().find(|x| x.shift_u == t.shift_u) {
                existing.coeff = existing.coeff.add(&t.coeff).reduce();
            } else {
                terms.push(t.clone());
            }
        }
        DifferenceOperator {
            vars: a.vars,
            minus_one: false,
            scalar: a.scalar.add(&b.scalar).reduce(),
            terms,
        }
        .normalized()
    }

    pub fn sub_op(&self, other: &DifferenceOperator) -> DifferenceOperator {
        self.add_op(&other.scale(&Rat::from_int(-1)))
    }

    /// True when every coefficient and the scalar part are identically zero.
    pub fn is_zero_operator(&self) -> bool {
        let p = self.to_plain().normalized();
        p.terms.is_empty() && p.scalar.is_zero()
    }
}
