//! Construction of the Baker-Akhiezer function by iterated application of
//! the dual difference operators, the independent linear-system oracle, and
//! the verification suite (axioms, both eigen-equations, subleading term,
//! rational-limit identities).

mod engine;
mod construct;
mod oracle;
mod verify;

pub use construct::{ba_equal, construct_ba, construct_ba_checked, iterate_construction, leading_polynomial, nilpotency_check, specialize_exp_polynomial, BAFunction, BuildRoute, LeadingTermError};
pub use engine::{apply_grouped, EGrouped, PreparedOp};
pub use oracle::{ba_linear_oracle_numeric, ba_linear_oracle_symbolic, nullspace, Field, OracleError};
pub use verify::{
    rational_limit_identities, verify_axioms, verify_eigen_difference, verify_eigen_schrodinger,
    verify_subleading, RationalLimitReport,
};

use crate::algebra::{LaurentFrac, LaurentPoly, MultiPoly, Rat};
use crate::diffop::{kappa_at_infinity, DifferenceOperator};
use crate::lattice::{
    e_exponent, gram_inner, norm2, u_form, Configuration, LatticeVector, LONG_ROOTS, SHORT_ROOTS,
};

/// Total multiplicity M = sum over the positive AG2 vectors = 12m + 3.
pub fn total_multiplicity(m: u32) -> u32 {
    12 * m + 3
}

/// The start polynomial of the construction:
/// `Q(z) = prod_{gamma, s in A_gamma} (<gamma,z> - s gamma^2)(<gamma,z> + s gamma^2)`,
/// whose zero set consists of the lattice-shifted hyperplanes demanded by
/// the ring axioms (so Q e^<z,x> is quasi-invariant).
pub fn q_polynomial(m: u32) -> MultiPoly<Rat> {
    q_polynomial_for(&crate::lattice::build_config(
        crate::lattice::ConfigName::AG2,
        m,
    ))
}

/// Same, driven by an explicit configuration's shift sets.
pub fn q_polynomial_for(config: &Configuration) -> MultiPoly<Rat> {
    let mut q = MultiPoly::<Rat>::one(2);
    for gamma in SHORT_ROOTS.iter().chain(LONG_ROOTS.iter()) {
        let Some(shifts) = config.axiom_sets.get(gamma) else {
            continue;
        };
        let g2 = Rat::from_int(norm2(*gamma));
        let lin = u_form(*gamma).to_poly();
        for &s in shifts {
            let off = &Rat::from_int(s as i64) * &g2;
            let plus = &lin + &MultiPoly::constant(2, off.clone());
            let minus = &lin - &MultiPoly::constant(2, off);
            q = &q * &(&plus * &minus);
        }
    }
    q
}

/// The dual eigenvalue `mu(x) = sum_tau kappa_tau (e^<x,tau> - 1)` of a
/// lattice difference operator, as a Laurent polynomial.
pub fn mu_function(d: &DifferenceOperator) -> LaurentPoly {
    let mut mu = LaurentPoly::zero();
    for t in &d.terms {
        let g = t.e_exp.expect("lattice operator expected");
        let k = kappa_at_infinity(&t.coeff);
        mu.add_term(g, &k);
        mu.add_term((0, 0), &-k);
    }
    mu
}

/// The inner sum `f_gamma(x) = sum_tau kappa_tau <tau, gamma> e^<x,tau>`.
pub fn directional_symbol(d: &DifferenceOperator, gamma: LatticeVector) -> LaurentPoly {
    let mut f = LaurentPoly::zero();
    for t in &d.terms {
        let g = t.e_exp.expect("lattice operator expected");
        let tau = t.shift_lattice.expect("lattice operator expected");
        let k = kappa_at_infinity(&t.coeff);
        f.add_term(g, &(&k * &Rat::from_int(gram_inner(tau, gamma))));
    }
    f
}

/// The normalization
/// `c(x) = (M!/8) prod_{gamma in G2+} f_gamma(x)^{m_gamma + m_{2 gamma}}`.
pub fn c_function(m: u32, d: &DifferenceOperator) -> LaurentPoly {
    let big_m = total_multiplicity(m) as u64;
    let mut c = LaurentPoly::constant(&Rat::factorial(big_m) * &Rat::from_frac(1, 8));
    for gamma in SHORT_ROOTS.iter().chain(LONG_ROOTS.iter()) {
        let e = if norm2(*gamma) == 2 { 3 * m + 1 } else { m };
        if e == 0 {
            continue;
        }
        let f = directional_symbol(d, *gamma);
        c = c.mul(&f.pow(e));
    }
    c
}

/// A multiplicative basis for the x-dependence of the constructed function:
/// canonical Laurent factors (hyperbolic units and the residual parts of the
/// directional symbols), against which denominators stay factored.
#[derive(Clone, Debug, Default)]
pub struct FactorTable {
    pub factors: Vec<LaurentPoly>,
}

impl FactorTable {
    /// Canonicalize a factor: corner shifted to (0,0), content 1; returns
    /// the id and the unit (monomial exponent, scalar) split off.
    pub fn intern(&mut self, f: &LaurentPoly) -> (usize, (i32, i32), Rat) {
        assert!(!f.is_zero());
        let corner = f.corner().unwrap();
        let shifted = f.mul_mono((-corner.0, -corner.1), &Rat::one());
        let content = shifted.content();
        let canon = shifted.scale(&content.recip());
        for (i, g) in self.factors.iter().enumerate() {
            if *g == canon {
                return (i, corner, content);
            }
        }
        self.factors.push(canon);
        (self.factors.len() - 1, corner, content)
    }
}

/// A Laurent fraction with the denominator kept as a multiset of interned
/// factors (times a unit). Used for the coefficients of the constructed
/// function, where the denominator always divides c(x).
#[derive(Clone, Debug)]
pub struct FactoredLaurent {
    pub num: LaurentPoly,
    /// factor id -> multiplicity
    pub den: std::collections::BTreeMap<usize, u32>,
}

impl FactoredLaurent {
    pub fn zero() -> Self {
        FactoredLaurent {
            num: LaurentPoly::zero(),
            den: Default::default(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Expand to a plain Laurent fraction.
    pub fn to_laurent_frac(&self, table: &FactorTable) -> LaurentFrac {
        let mut den = LaurentPoly::one();
        for (&id, &mult) in &self.den {
            for _ in 0..mult {
                den = den.mul(&table.factors[id]);
            }
        }
        LaurentFrac::new(self.num.clone(), den)
    }
}

/// Factorize a Laurent polynomial against hyperbolic-unit candidates by
/// repeated exact division; whatever remains is interned as an atomic
/// factor. Returns the factor multiset plus the unit (monomial, scalar).
pub fn factorize_against_units(
    table: &mut FactorTable,
    p: &LaurentPoly,
) -> (std::collections::BTreeMap<usize, u32>, (i32, i32), Rat) {
    assert!(!p.is_zero());
    let mut factors = std::collections::BTreeMap::new();
    // candidate units: E^g - E^-g and E^g + E^-g over doubled positive
    // roots, canonicalized so division drops no unit part
    let mut candidates = Vec::new();
    for gamma in SHORT_ROOTS.iter().chain(LONG_ROOTS.iter()) {
        for k in [1i32, 2] {
            let g = e_exponent(*gamma);
            let gk = (g.0 * k, g.1 * k);
            let pos = LaurentPoly::monomial(gk, Rat::one());
            let neg = LaurentPoly::monomial((-gk.0, -gk.1), Rat::one());
            for cand in [pos.sub(&neg), pos.add(&neg)] {
                let corner = cand.corner().unwrap();
                let shifted = cand.mul_mono((-corner.0, -corner.1), &Rat::one());
                let canon = shifted.scale(&shifted.content().recip());
                candidates.push(canon);
            }
        }
    }
    let mut rest = p.clone();
    let mut changed = true;
    while changed {
        changed = false;
        for cand in &candidates {
            while rest.num_terms() > 1 {
                match rest.div_exact(cand) {
                    Some(q) => {
                        let (id, _, _) = table.intern(cand);
                        *factors.entry(id).or_insert(0) += 1;
                        rest = q;
                        changed = true;
                    }
                    None => break,
                }
            }
        }
    }
    // unit part of what remains
    let corner = rest.corner().unwrap();
    let content = rest
        .mul_mono((-corner.0, -corner.1), &Rat::one())
        .content();
    let mut mono = corner;
    let mut scalar = content.clone();
    if rest.num_terms() > 1 {
        let (id, c2, s2) = table.intern(&rest);
        *factors.entry(id).or_insert(0) += 1;
        mono = c2;
        scalar = s2;
    }
    (factors, mono, scalar)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Degree;
    use crate::diffop::{make_d1, make_d2};

    #[test]
    fn q_degree_is_2m() {
        for m in [0u32, 1] {
            let q = q_polynomial(m);
            assert_eq!(
                q.degree(),
                Degree::Of(2 * total_multiplicity(m) as i64),
                "m = {}",
                m
            );
        }
    }

    #[test]
    fn q_nonzero_at_origin() {
        let q = q_polynomial(1);
        let v = q.eval_rat(&[Rat::zero(), Rat::zero()]);
        assert!(!v.is_zero());
    }

    #[test]
    fn mu_vanishes_at_e_equal_one() {
        for d in [make_d1(1), make_d2(1)] {
            let mu = mu_function(&d);
            assert!(mu.eval(&Rat::one(), &Rat::one()).is_zero());
        }
    }

    #[test]
    fn mu_d2_m0_is_sixteen_times_four_beta_cosh() {
        // at m = 0 only the 4-beta shifts survive with lambda = 16
        let d = make_d2(0);
        let mu = mu_function(&d);
        let mut expect = LaurentPoly::zero();
        for b in SHORT_ROOTS {
            let g = e_exponent(4 * b);
            expect.add_term(g, &Rat::from_int(16));
            expect.add_term((-g.0, -g.1), &Rat::from_int(16));
            expect.add_term((0, 0), &Rat::from_int(-32));
        }
        assert_eq!(mu, expect);
    }

    #[test]
    fn c_function_m0_shape() {
        // m = 0: exponents (m_b + m_2b, m_a + m_2a) = (1, 0), M! = 6
        let d = make_d1(0);
        let c = c_function(0, &d);
        let mut expect = LaurentPoly::constant(Rat::from_frac(6, 8));
        for b in SHORT_ROOTS {
            expect = expect.mul(&directional_symbol(&d, b));
        }
        assert_eq!(c, expect);
    }

    #[test]
    fn directional_symbol_is_odd() {
        // tau <-> -tau with equal kappa makes f_gamma odd under E -> E^-1
        let d = make_d1(1);
        for gamma in SHORT_ROOTS.iter().chain(LONG_ROOTS.iter()) {
            let f = directional_symbol(&d, *gamma);
            assert_eq!(f.flip(), f.neg());
        }
    }

    #[test]
    fn factorization_reassembles() {
        let d = make_d1(1);
        let f = directional_symbol(&d, crate::lattice::BETA1);
        let mut table = FactorTable::default();
        let (factors, mono, scalar) = factorize_against_units(&mut table, &f);
        // reassemble
        let mut re = LaurentPoly::monomial(mono, scalar);
        for (id, mult) in factors {
            for _ in 0..mult {
                re = re.mul(&table.factors[id]);
            }
        }
        assert_eq!(re, f);
    }
}
