//! The AG2 / G2 / A2 vector configurations in the lattice Z*beta1 + Z*alpha2,
//! exact inner products through the Gram matrix, the Weyl group of G2, and
//! the dictionaries between lattice vectors, u-coordinates and E-exponents.

use crate::algebra::{AffineForm, Rat};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Integer coordinates (a, b) meaning a*beta1 + b*alpha2.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LatticeVector(pub i64, pub i64);

pub const BETA1: LatticeVector = LatticeVector(1, 0);
pub const BETA2: LatticeVector = LatticeVector(2, 1);
pub const BETA3: LatticeVector = LatticeVector(1, 1);
pub const ALPHA1: LatticeVector = LatticeVector(3, 2);
pub const ALPHA2: LatticeVector = LatticeVector(0, 1);
pub const ALPHA3: LatticeVector = LatticeVector(3, 1);

pub const SHORT_ROOTS: [LatticeVector; 3] = [BETA1, BETA2, BETA3];
pub const LONG_ROOTS: [LatticeVector; 3] = [ALPHA1, ALPHA2, ALPHA3];

/// Gram matrix of the basis (beta1, alpha2) under the omega = sqrt(2)
/// normalization: short roots have square length 2, long roots 6.
pub const GRAM: [[i64; 2]; 2] = [[2, -3], [-3, 6]];

impl LatticeVector {
    pub fn is_zero(&self) -> bool {
        self.0 == 0 && self.1 == 0
    }

    pub fn name(&self) -> Option<&'static str> {
        match *self {
            BETA1 => Some("beta1"),
            BETA2 => Some("beta2"),
            BETA3 => Some("beta3"),
            ALPHA1 => Some("alpha1"),
            ALPHA2 => Some("alpha2"),
            ALPHA3 => Some("alpha3"),
            _ => None,
        }
    }
}

impl Add for LatticeVector {
    type Output = LatticeVector;
    fn add(self, o: LatticeVector) -> LatticeVector {
        LatticeVector(self.0 + o.0, self.1 + o.1)
    }
}

impl Sub for LatticeVector {
    type Output = LatticeVector;
    fn sub(self, o: LatticeVector) -> LatticeVector {
        LatticeVector(self.0 - o.0, self.1 - o.1)
    }
}

impl Neg for LatticeVector {
    type Output = LatticeVector;
    fn neg(self) -> LatticeVector {
        LatticeVector(-self.0, -self.1)
    }
}

impl Mul<LatticeVector> for i64 {
    type Output = LatticeVector;
    fn mul(self, v: LatticeVector) -> LatticeVector {
        LatticeVector(self * v.0, self * v.1)
    }
}

impl fmt::Debug for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.name() {
            Some(n) => write!(f, "{}", n),
            None => write!(f, "({},{})", self.0, self.1),
        }
    }
}

/// Exact inner product via the Gram matrix.
pub fn gram_inner(v: LatticeVector, w: LatticeVector) -> i64 {
    let gv = (
        GRAM[0][0] * v.0 + GRAM[0][1] * v.1,
        GRAM[1][0] * v.0 + GRAM[1][1] * v.1,
    );
    gv.0 * w.0 + gv.1 * w.1
}

pub fn norm2(v: LatticeVector) -> i64 {
    gram_inner(v, v)
}

/// Inverse Gram matrix (1/3) * [[6, 3], [3, 2]].
pub fn gram_inverse() -> [[Rat; 2]; 2] {
    [
        [Rat::from_int(2), Rat::from_int(1)],
        [Rat::from_int(1), Rat::from_frac(2, 3)],
    ]
}

/// u-form of <v, z>: with u1 = <beta1, z>, u2 = <alpha2, z>, the pairing
/// <a*beta1 + b*alpha2, z> equals a*u1 + b*u2.
pub fn u_form(v: LatticeVector) -> AffineForm {
    AffineForm::new(&[Rat::from_int(v.0), Rat::from_int(v.1)], &Rat::zero())
}

/// Same with a constant shift: the form `<v, z> - c`.
pub fn u_form_shifted(v: LatticeVector, c: &Rat) -> AffineForm {
    AffineForm::new(&[Rat::from_int(v.0), Rat::from_int(v.1)], &-c.clone())
}

/// E-exponent of e^<x,v> in the coordinates (E1, E2): Gram * coords(v).
pub fn e_exponent(v: LatticeVector) -> (i32, i32) {
    (
        (GRAM[0][0] * v.0 + GRAM[0][1] * v.1) as i32,
        (GRAM[1][0] * v.0 + GRAM[1][1] * v.1) as i32,
    )
}

/// Orthogonal reflection about the hyperplane <gamma, .> = 0, in lattice
/// coordinates.
pub fn reflect(gamma: LatticeVector, v: LatticeVector) -> LatticeVector {
    let num = 2 * gram_inner(gamma, v);
    let den = norm2(gamma);
    debug_assert_eq!(num % den, 0, "reflection must stay in the lattice");
    let k = num / den;
    v - k * gamma
}

/// A Weyl group element as an integer matrix on lattice coordinates
/// (columns are the images of beta1 and alpha2).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct WeylElement(pub [[i64; 2]; 2]);

impl WeylElement {
    pub fn identity() -> Self {
        WeylElement([[1, 0], [0, 1]])
    }

    pub fn apply(&self, v: LatticeVector) -> LatticeVector {
        LatticeVector(
            self.0[0][0] * v.0 + self.0[0][1] * v.1,
            self.0[1][0] * v.0 + self.0[1][1] * v.1,
        )
    }

    pub fn compose(&self, other: &WeylElement) -> WeylElement {
        let a = &self.0;
        let b = &other.0;
        let mut m = [[0i64; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        WeylElement(m)
    }

    pub fn inverse(&self) -> WeylElement {
        let [[a, b], [c, d]] = self.0;
        let det = a * d - b * c;
        debug_assert!(det == 1 || det == -1);
        WeylElement([[d / det, -b / det], [-c / det, a / det]])
    }

    pub fn det(&self) -> i64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    /// Substitution for u-coordinate polynomials realizing f(w^-1 z):
    /// u_i maps to the linear form of <w(basis_i), z>.
    pub fn u_substitution(&self) -> [[i64; 2]; 2] {
        // basis vectors beta1 = (1,0), alpha2 = (0,1)
        let wb = self.apply(LatticeVector(1, 0));
        let wa = self.apply(LatticeVector(0, 1));
        // u1 -> wb.0 * u1 + wb.1 * u2, u2 -> wa.0 * u1 + wa.1 * u2
        [[wb.0, wb.1], [wa.0, wa.1]]
    }

    /// Integer action on E-exponents: G * M * G^-1 (exact, integral).
    pub fn e_substitution(&self) -> [[i64; 2]; 2] {
        // want N with N * (G coords v) = G coords (w v) for all v
        // N = G M G^-1; check integrality at runtime in debug builds
        let m = self.0;
        let g = GRAM;
        // G * M
        let mut gm = [[0i64; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                gm[i][j] = g[i][0] * m[0][j] + g[i][1] * m[1][j];
            }
        }
        // (G M) * G^-1 with G^-1 = (1/3)[[6,3],[3,2]]
        let ginv_num = [[6, 3], [3, 2]];
        let mut out = [[0i64; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                let v = gm[i][0] * ginv_num[0][j] + gm[i][1] * ginv_num[1][j];
                debug_assert_eq!(v % 3, 0);
                out[i][j] = v / 3;
            }
        }
        out
    }
}

/// Reflection as a Weyl element.
pub fn reflection_matrix(gamma: LatticeVector) -> WeylElement {
    let e1 = reflect(gamma, LatticeVector(1, 0));
    let e2 = reflect(gamma, LatticeVector(0, 1));
    WeylElement([[e1.0, e2.0], [e1.1, e2.1]])
}

/// The 12 elements of the Weyl group of G2, generated by the simple
/// reflections in beta1 and alpha2 (these two make the 150-degree dihedral
/// pair), in a deterministic order.
pub fn weyl_elements() -> Vec<WeylElement> {
    let gens = [reflection_matrix(BETA1), reflection_matrix(ALPHA2)];
    let mut seen = std::collections::BTreeSet::new();
    let mut queue = std::collections::VecDeque::new();
    let id = WeylElement::identity();
    seen.insert(id);
    queue.push_back(id);
    while let Some(w) = queue.pop_front() {
        for g in &gens {
            let n = w.compose(g);
            if seen.insert(n) {
                queue.push_back(n);
            }
        }
    }
    seen.into_iter().collect()
}

/// Orbit of a vector under the full Weyl group, deterministically ordered.
pub fn weyl_orbit(v: LatticeVector) -> Vec<LatticeVector> {
    let mut orbit: Vec<LatticeVector> = weyl_elements().iter().map(|w| w.apply(v)).collect();
    orbit.sort();
    orbit.dedup();
    orbit
}

/// Configuration name.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum ConfigName {
    AG2,
    G2,
    A2,
}

/// A positive system with multiplicities and quasi-invariance shift sets.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Configuration {
    pub name: ConfigName,
    pub m: u32,
    /// Positive vectors with multiplicities.
    pub positive: Vec<(LatticeVector, u32)>,
    /// Shift sets A_gamma for the reduced positive vectors.
    pub axiom_sets: BTreeMap<LatticeVector, Vec<u32>>,
}

impl Configuration {
    pub fn multiplicity(&self, v: LatticeVector) -> u32 {
        self.positive
            .iter()
            .find(|(w, _)| *w == v || *w == -v)
            .map(|(_, m)| *m)
            .unwrap_or(0)
    }
}

/// Build AG2, G2 or A2 (the doubled short roots) with parameter m.
pub fn build_config(name: ConfigName, m: u32) -> Configuration {
    match name {
        ConfigName::AG2 => {
            let mut positive = Vec::new();
            for b in SHORT_ROOTS {
                positive.push((b, 3 * m));
            }
            for b in SHORT_ROOTS {
                positive.push((2 * b, 1));
            }
            for a in LONG_ROOTS {
                positive.push((a, m));
            }
            let mut axiom_sets = BTreeMap::new();
            for b in SHORT_ROOTS {
                let mut set: Vec<u32> = (1..=3 * m).collect();
                set.push(3 * m + 2);
                axiom_sets.insert(b, set);
            }
            for a in LONG_ROOTS {
                axiom_sets.insert(a, (1..=m).collect());
            }
            Configuration {
                name,
                m,
                positive,
                axiom_sets,
            }
        }
        ConfigName::G2 => {
            let mut positive = Vec::new();
            for b in SHORT_ROOTS {
                positive.push((b, 3 * m));
            }
            for a in LONG_ROOTS {
                positive.push((a, m));
            }
            let mut axiom_sets = BTreeMap::new();
            for b in SHORT_ROOTS {
                axiom_sets.insert(b, (1..=3 * m).collect());
            }
            for a in LONG_ROOTS {
                axiom_sets.insert(a, (1..=m).collect());
            }
            Configuration {
                name,
                m,
                positive,
                axiom_sets,
            }
        }
        ConfigName::A2 => {
            let positive: Vec<_> = SHORT_ROOTS.iter().map(|&b| (2 * b, 1)).collect();
            let mut axiom_sets = BTreeMap::new();
            for b in SHORT_ROOTS {
                axiom_sets.insert(2 * b, vec![1]);
            }
            Configuration {
                name,
                m: 0,
                positive,
                axiom_sets,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gram_values() {
        assert_eq!(gram_inner(BETA1, BETA1), 2);
        assert_eq!(gram_inner(ALPHA1, BETA1), 0);
        assert_eq!(gram_inner(BETA1, ALPHA2), -3);
        for b in SHORT_ROOTS {
            assert_eq!(norm2(b), 2);
        }
        for a in LONG_ROOTS {
            assert_eq!(norm2(a), 6);
        }
        for i in 0..3 {
            assert_eq!(gram_inner(LONG_ROOTS[i], SHORT_ROOTS[i]), 0);
        }
    }

    #[test]
    fn vector_relations() {
        assert_eq!(BETA1 + BETA3, BETA2);
        assert_eq!(ALPHA2 + ALPHA3, ALPHA1);
    }

    #[test]
    fn gram_positive_definite_on_box() {
        for a in -10..=10i64 {
            for b in -10..=10i64 {
                let v = LatticeVector(a, b);
                if !v.is_zero() {
                    assert!(norm2(v) > 0, "norm2({:?}) <= 0", v);
                }
            }
        }
    }

    #[test]
    fn z_squared_in_u_coordinates() {
        // u^T G^-1 u at u = (<beta1,v>, <alpha2,v>) equals <v,v>
        let ginv = gram_inverse();
        for a in -5..=5i64 {
            for b in -5..=5i64 {
                let v = LatticeVector(a, b);
                let u1 = Rat::from_int(gram_inner(BETA1, v));
                let u2 = Rat::from_int(gram_inner(ALPHA2, v));
                let q = &(&(&ginv[0][0] * &u1) * &u1)
                    + &(&(&(&ginv[0][1] * &u1) * &u2).scale2()
                        + &(&(&ginv[1][1] * &u2) * &u2));
                assert_eq!(q, Rat::from_int(norm2(v)));
            }
        }
    }

    trait Scale2 {
        fn scale2(&self) -> Rat;
    }
    impl Scale2 for Rat {
        fn scale2(&self) -> Rat {
            self * &Rat::from_int(2)
        }
    }

    #[test]
    fn reflection_examples() {
        assert_eq!(reflect(BETA1, ALPHA2), ALPHA3);
        assert_eq!(reflect(BETA1, BETA1), -BETA1);
    }

    #[test]
    fn weyl_group_order_and_invariance() {
        let w = weyl_elements();
        assert_eq!(w.len(), 12);
        // closed under composition, preserves Gram
        for a in &w {
            for b in &w {
                assert!(w.contains(&a.compose(b)));
            }
            for x in -3..=3i64 {
                for y in -3..=3i64 {
                    let v = LatticeVector(x, y);
                    let u = LatticeVector(y, x);
                    assert_eq!(gram_inner(a.apply(v), a.apply(u)), gram_inner(v, u));
                }
            }
        }
    }

    #[test]
    fn orbits() {
        assert_eq!(weyl_orbit(ALPHA1).len(), 6);
        let ob = weyl_orbit(BETA1);
        assert_eq!(ob.len(), 6);
        for b in SHORT_ROOTS {
            assert!(ob.contains(&b) && ob.contains(&-b));
        }
    }

    #[test]
    fn not_crystallographic() {
        // 2<beta1, 2*beta2>/<2*beta2, 2*beta2> = 1/2
        let n = 2 * gram_inner(BETA1, 2 * BETA2);
        let d = norm2(2 * BETA2);
        assert_eq!(Rat::from_frac(n, d), Rat::from_frac(1, 2));
    }

    #[test]
    fn coordinate_dictionaries() {
        // <beta2, z> = 2u1 + u2
        let f = u_form(BETA2);
        assert_eq!(f.linear, vec![2.into(), 1.into()]);
        // e^<x, 2 beta1> has exponent (4, -6)
        assert_eq!(e_exponent(2 * BETA1), (4, -6));
        // <beta1, z> = u1
        assert_eq!(u_form(BETA1).linear, vec![1.into(), 0.into()]);
        // consistency at u1 = 4: 2u1 + u2 = 2 + A/2 with A = 3u1 + 2u2
        // i.e. 8 + u2 = 2 + (12 + 2 u2)/2 = 8 + u2
        let a_form = u_form(ALPHA1);
        assert_eq!(a_form.linear, vec![3.into(), 2.into()]);
    }

    #[test]
    fn config_tables() {
        let c = build_config(ConfigName::AG2, 1);
        assert_eq!(c.positive.len(), 9);
        assert_eq!(c.multiplicity(BETA1), 3);
        assert_eq!(c.multiplicity(2 * BETA1), 1);
        assert_eq!(c.multiplicity(ALPHA1), 1);
        assert_eq!(c.axiom_sets[&BETA1], vec![1, 2, 3, 5]);
        assert_eq!(c.axiom_sets[&ALPHA1], vec![1]);

        let c0 = build_config(ConfigName::AG2, 0);
        assert_eq!(c0.axiom_sets[&BETA1], vec![2]);
        assert!(c0.axiom_sets[&ALPHA1].is_empty());

        let g = build_config(ConfigName::G2, 2);
        assert_eq!(g.positive.len(), 6);
    }

    #[test]
    fn rational_limit_vector_identity() {
        // 2(2b1) + (2b2) - (2b3) + (2a3) - (2a2) = 12 b1
        let lhs = 2 * (2 * BETA1) + 2 * BETA2 - 2 * BETA3 + 2 * ALPHA3 - 2 * ALPHA2;
        assert_eq!(lhs, 12 * BETA1);
    }

    #[test]
    fn e_substitution_integral_and_consistent() {
        for w in weyl_elements() {
            let n = w.e_substitution();
            for x in -3..=3i64 {
                for y in -3..=3i64 {
                    let v = LatticeVector(x, y);
                    let g = e_exponent(v);
                    let wg = e_exponent(w.apply(v));
                    assert_eq!(
                        (
                            n[0][0] * g.0 as i64 + n[0][1] * g.1 as i64,
                            n[1][0] * g.0 as i64 + n[1][1] * g.1 as i64
                        ),
                        (wg.0 as i64, wg.1 as i64)
                    );
                }
            }
        }
    }
}
