//! The scalar algebra: exact rational functions on a finite atom set.
//!
//! An [`FElem`] is a rational-valued function on finitely many atoms, with
//! pointwise ring and lattice operations. The idempotents of this algebra
//! ([`Idem`]) are the 0/1-valued functions; under the algebra order they
//! form a finite Boolean algebra whose meet is the product and whose
//! complement is `1 - p`. Multiplying by an idempotent is the band
//! projection onto the atoms it selects.
//!
//! Everything here is a plain immutable value and all arithmetic is exact,
//! so lattice identities are checked with equality, never with a tolerance.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{format_rat, rat_int, Rat};

/// A finite atom set. Two spaces are interchangeable iff they have the same
/// number of atoms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct AtomSpace {
    n_atoms: usize,
}

impl AtomSpace {
    pub fn new(n_atoms: usize) -> Result<Self> {
        if n_atoms == 0 {
            return Err(Error::InvalidInput("atom space needs at least one atom".into()));
        }
        Ok(AtomSpace { n_atoms })
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub(crate) fn ensure_same(&self, other: &AtomSpace) -> Result<()> {
        if self != other {
            return Err(Error::AtomMismatch {
                left: self.n_atoms,
                right: other.n_atoms,
            });
        }
        Ok(())
    }
}

/// An element of the scalar algebra: one exact rational per atom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FElem {
    space: AtomSpace,
    values: Vec<Rat>,
}

impl FElem {
    pub fn new(space: AtomSpace, values: Vec<Rat>) -> Result<Self> {
        if values.len() != space.n_atoms() {
            return Err(Error::Dimension(format!(
                "expected {} atom values, got {}",
                space.n_atoms(),
                values.len()
            )));
        }
        Ok(FElem { space, values })
    }

    pub fn zero(space: AtomSpace) -> Self {
        FElem::constant(space, Rat::zero())
    }

    /// The multiplicative unit: the all-ones function.
    pub fn one(space: AtomSpace) -> Self {
        FElem::constant(space, rat_int(1))
    }

    /// A real scalar embedded as a constant function.
    pub fn constant(space: AtomSpace, value: Rat) -> Self {
        FElem {
            space,
            values: vec![value; space.n_atoms()],
        }
    }

    /// Convenience constructor from machine integers, mostly for tests.
    pub fn from_ints(space: AtomSpace, values: &[i64]) -> Result<Self> {
        FElem::new(space, values.iter().map(|&v| rat_int(v)).collect())
    }

    pub fn space(&self) -> AtomSpace {
        self.space
    }

    pub fn values(&self) -> &[Rat] {
        &self.values
    }

    pub fn get(&self, atom: usize) -> &Rat {
        &self.values[atom]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Rat::is_zero)
    }

    pub fn is_nonneg(&self) -> bool {
        self.values.iter().all(|v| !v.is_negative())
    }

    fn zip(&self, other: &FElem, f: impl Fn(&Rat, &Rat) -> Rat) -> Result<FElem> {
        self.space.ensure_same(&other.space)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| f(a, b))
            .collect();
        Ok(FElem { space: self.space, values })
    }

    fn map(&self, f: impl Fn(&Rat) -> Rat) -> FElem {
        FElem {
            space: self.space,
            values: self.values.iter().map(f).collect(),
        }
    }

    pub fn add(&self, other: &FElem) -> Result<FElem> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &FElem) -> Result<FElem> {
        self.zip(other, |a, b| a - b)
    }

    /// The f-algebra product (pointwise).
    pub fn mul(&self, other: &FElem) -> Result<FElem> {
        self.zip(other, |a, b| a * b)
    }

    pub fn neg(&self) -> FElem {
        self.map(|v| -v)
    }

    pub fn scale(&self, c: &Rat) -> FElem {
        self.map(|v| v * c)
    }

    pub fn sup(&self, other: &FElem) -> Result<FElem> {
        self.zip(other, |a, b| if a >= b { a.clone() } else { b.clone() })
    }

    pub fn inf(&self, other: &FElem) -> Result<FElem> {
        self.zip(other, |a, b| if a <= b { a.clone() } else { b.clone() })
    }

    pub fn abs(&self) -> FElem {
        self.map(Rat::abs)
    }

    pub fn pos_part(&self) -> FElem {
        self.map(|v| if v.is_positive() { v.clone() } else { Rat::zero() })
    }

    pub fn neg_part(&self) -> FElem {
        self.map(|v| if v.is_negative() { -v } else { Rat::zero() })
    }

    /// Pointwise order.
    pub fn leq(&self, other: &FElem) -> Result<bool> {
        self.space.ensure_same(&other.space)?;
        Ok(self.values.iter().zip(&other.values).all(|(a, b)| a <= b))
    }

    /// The support: the smallest idempotent fixing this element under
    /// multiplication. Here that is the indicator of the nonzero atoms.
    pub fn support(&self) -> Idem {
        Idem {
            space: self.space,
            mask: self.values.iter().map(|v| !v.is_zero()).collect(),
        }
    }

    /// The comparison idempotent selecting the atoms where `self < other`,
    /// computed as the support of the positive part of the difference. The
    /// result `p` always satisfies `p*self <= p*other`.
    pub fn cmp_idem(&self, other: &FElem) -> Result<Idem> {
        Ok(other.sub(self)?.pos_part().support())
    }

    /// The n-th member of the bounded idempotent sequence: the comparison
    /// idempotent of `|self| < n`. Increasing in `n` with limit `1`, and
    /// `-n <= p_n * self <= n` always holds.
    pub fn bounded_idem(&self, n: u32) -> Idem {
        let bound = FElem::constant(self.space, rat_int(i64::from(n)));
        self.abs()
            .cmp_idem(&bound)
            .expect("constant shares the space")
    }

    /// Smallest n >= 1 at which [`FElem::bounded_idem`] reaches the full
    /// idempotent; equals floor(max |value|) + 1.
    pub fn bounded_idem_stabilization(&self) -> u64 {
        let max_abs = self
            .values
            .iter()
            .map(Rat::abs)
            .max()
            .expect("atom spaces are nonempty");
        let floor = max_abs.floor().to_integer();
        u64::try_from(floor).expect("nonnegative floor") + 1
    }

    /// Pointwise reciprocal of a strictly positive element; the result `r`
    /// satisfies `self * r = 1` exactly and `r >= 0`.
    pub fn invert_pos(&self) -> Result<FElem> {
        let mut values = Vec::with_capacity(self.values.len());
        for (atom, v) in self.values.iter().enumerate() {
            if !v.is_positive() {
                return Err(Error::NotInvertible { atom });
            }
            values.push(v.recip());
        }
        Ok(FElem { space: self.space, values })
    }

    /// The largest multiple of 2^-n below this element, pointwise. For
    /// nonnegative elements this is the increasing step-function
    /// approximation from below; on sign-changing input it agrees with
    /// applying the nonnegative case to the positive and negative parts
    /// separately and recombining.
    pub fn freudenthal_lower(&self, n: u32) -> FElem {
        self.map(|v| crate::rational::dyadic_floor(v, n))
    }

    /// The smallest multiple of 2^-n above this element, pointwise.
    pub fn freudenthal_upper(&self, n: u32) -> FElem {
        self.map(|v| crate::rational::dyadic_ceil(v, n))
    }
}

impl std::fmt::Display for FElem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.values.iter().map(format_rat).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// An idempotent of the scalar algebra: a 0/1 mask over the atoms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Idem {
    space: AtomSpace,
    mask: Vec<bool>,
}

impl Idem {
    pub fn new(space: AtomSpace, mask: Vec<bool>) -> Result<Self> {
        if mask.len() != space.n_atoms() {
            return Err(Error::Dimension(format!(
                "expected {} mask bits, got {}",
                space.n_atoms(),
                mask.len()
            )));
        }
        Ok(Idem { space, mask })
    }

    pub fn zero(space: AtomSpace) -> Self {
        Idem { space, mask: vec![false; space.n_atoms()] }
    }

    pub fn one(space: AtomSpace) -> Self {
        Idem { space, mask: vec![true; space.n_atoms()] }
    }

    /// The atom-indicator idempotent.
    pub fn single(space: AtomSpace, atom: usize) -> Result<Self> {
        if atom >= space.n_atoms() {
            return Err(Error::Dimension(format!(
                "atom {} out of range for {} atoms",
                atom,
                space.n_atoms()
            )));
        }
        let mut mask = vec![false; space.n_atoms()];
        mask[atom] = true;
        Ok(Idem { space, mask })
    }

    /// Builds the idempotent whose atom `i` bit is bit `i` of `bits`.
    pub fn from_bits(space: AtomSpace, bits: u64) -> Self {
        let mask = (0..space.n_atoms()).map(|i| bits >> i & 1 == 1).collect();
        Idem { space, mask }
    }

    /// All 2^n idempotents in ascending bit order. Guarded against large
    /// atom counts since the enumeration is exponential.
    pub fn enumerate(space: AtomSpace) -> Result<Vec<Idem>> {
        let n = space.n_atoms();
        if n > 20 {
            return Err(Error::TooManyPoints {
                requested: 1u128 << n,
                cap: 1 << 20,
            });
        }
        Ok((0..1u64 << n).map(|bits| Idem::from_bits(space, bits)).collect())
    }

    pub fn space(&self) -> AtomSpace {
        self.space
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn contains_atom(&self, atom: usize) -> bool {
        self.mask[atom]
    }

    pub fn is_zero(&self) -> bool {
        self.mask.iter().all(|&b| !b)
    }

    pub fn is_one(&self) -> bool {
        self.mask.iter().all(|&b| b)
    }

    /// Boolean meet; equals the algebra product of the indicators.
    pub fn meet(&self, other: &Idem) -> Result<Idem> {
        self.space.ensure_same(&other.space)?;
        let mask = self.mask.iter().zip(&other.mask).map(|(&a, &b)| a && b).collect();
        Ok(Idem { space: self.space, mask })
    }

    pub fn join(&self, other: &Idem) -> Result<Idem> {
        self.space.ensure_same(&other.space)?;
        let mask = self.mask.iter().zip(&other.mask).map(|(&a, &b)| a || b).collect();
        Ok(Idem { space: self.space, mask })
    }

    /// The Boolean complement `1 - p`.
    pub fn complement(&self) -> Idem {
        Idem {
            space: self.space,
            mask: self.mask.iter().map(|&b| !b).collect(),
        }
    }

    pub fn leq(&self, other: &Idem) -> Result<bool> {
        self.space.ensure_same(&other.space)?;
        Ok(self.mask.iter().zip(&other.mask).all(|(&a, &b)| !a || b))
    }

    pub fn as_felem(&self) -> FElem {
        FElem {
            space: self.space,
            values: self
                .mask
                .iter()
                .map(|&b| if b { rat_int(1) } else { Rat::zero() })
                .collect(),
        }
    }

    /// The band projection `p * a`: keeps selected atoms, zeroes the rest.
    pub fn cut(&self, a: &FElem) -> Result<FElem> {
        self.space.ensure_same(&a.space)?;
        let values = self
            .mask
            .iter()
            .zip(&a.values)
            .map(|(&b, v)| if b { v.clone() } else { Rat::zero() })
            .collect();
        Ok(FElem { space: self.space, values })
    }
}

impl std::fmt::Display for Idem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<&str> = self.mask.iter().map(|&b| if b { "1" } else { "0" }).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// The four equivalent disjointness conditions, each evaluated through its
/// own route.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DisjointnessReport {
    /// a * b = 0
    pub product_zero: bool,
    /// |a| inf |b| = 0
    pub abs_meet_zero: bool,
    /// support(a) meet support(b) = 0 (Boolean meet)
    pub support_meet_zero: bool,
    /// support(a) * support(b) = 0 (as algebra elements)
    pub support_product_zero: bool,
}

impl DisjointnessReport {
    pub fn all_agree(&self) -> bool {
        self.product_zero == self.abs_meet_zero
            && self.product_zero == self.support_meet_zero
            && self.product_zero == self.support_product_zero
    }
}

/// Evaluates all four disjointness conditions independently.
pub fn disjointness_report(a: &FElem, b: &FElem) -> Result<DisjointnessReport> {
    Ok(DisjointnessReport {
        product_zero: a.mul(b)?.is_zero(),
        abs_meet_zero: a.abs().inf(&b.abs())?.is_zero(),
        support_meet_zero: a.support().meet(&b.support())?.is_zero(),
        support_product_zero: a
            .support()
            .as_felem()
            .mul(&b.support().as_felem())?
            .is_zero(),
    })
}

/// Whether `a` and `b` are disjoint. All four conditions are evaluated and
/// must agree; disagreement is an internal error that must never fire.
pub fn are_disjoint(a: &FElem, b: &FElem) -> Result<bool> {
    let report = disjointness_report(a, b)?;
    if !report.all_agree() {
        return Err(Error::Internal(format!(
            "disjointness conditions disagree for a = {a}, b = {b}: {report:?}"
        )));
    }
    Ok(report.product_zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn space(n: usize) -> AtomSpace {
        AtomSpace::new(n).unwrap()
    }

    fn fe(values: &[Rat]) -> FElem {
        FElem::new(space(values.len()), values.to_vec()).unwrap()
    }

    /// Independent support oracle: enumerate every idempotent, keep the ones
    /// fixing `a`, and take their Boolean infimum.
    fn support_by_enumeration(a: &FElem) -> Idem {
        let mut inf = Idem::one(a.space());
        for p in Idem::enumerate(a.space()).unwrap() {
            if p.cut(a).unwrap() == *a {
                inf = inf.meet(&p).unwrap();
            }
        }
        inf
    }

    #[test]
    fn lattice_ops_examples() {
        let a = fe(&[rat_int(1), rat_int(-2)]);
        let b = FElem::zero(space(2));
        assert_eq!(a.sup(&b).unwrap(), fe(&[rat_int(1), rat_int(0)]));

        // Jordan decomposition of (3, -2)
        let c = fe(&[rat_int(3), rat_int(-2)]);
        assert_eq!(c.pos_part(), fe(&[rat_int(3), rat_int(0)]));
        assert_eq!(c.neg_part(), fe(&[rat_int(0), rat_int(2)]));
        assert_eq!(c.pos_part().sub(&c.neg_part()).unwrap(), c);

        // |(-1/2, 4)| per atom, against the sup(a, -a) route
        let d = fe(&[rat(-1, 2), rat_int(4)]);
        assert_eq!(d.abs(), fe(&[rat(1, 2), rat_int(4)]));
        assert_eq!(d.abs(), d.sup(&d.neg()).unwrap());
    }

    #[test]
    fn space_mismatch_is_an_error() {
        let a = FElem::one(space(2));
        let b = FElem::one(space(3));
        assert!(matches!(a.add(&b), Err(Error::AtomMismatch { left: 2, right: 3 })));
        assert!(matches!(a.sup(&b), Err(Error::AtomMismatch { .. })));
        assert!(Idem::one(space(2)).meet(&Idem::one(space(3))).is_err());
    }

    #[test]
    fn support_examples_and_minimality() {
        let a = fe(&[rat_int(0), rat_int(3), rat_int(-2)]);
        let expected = Idem::new(space(3), vec![false, true, true]).unwrap();
        assert_eq!(a.support(), expected);
        assert_eq!(a.support(), support_by_enumeration(&a));
        assert_eq!(a.support().cut(&a).unwrap(), a);

        assert!(FElem::zero(space(3)).support().is_zero());
        assert!(FElem::one(space(3)).support().is_one());

        // minimality: every fixing idempotent dominates the support
        for p in Idem::enumerate(a.space()).unwrap() {
            if p.cut(&a).unwrap() == a {
                assert!(a.support().leq(&p).unwrap());
            }
        }
    }

    #[test]
    fn cmp_idem_examples() {
        let a = fe(&[rat_int(1), rat_int(2)]);
        let b = fe(&[rat_int(2), rat_int(2)]);
        let p = a.cmp_idem(&b).unwrap();
        assert_eq!(p, Idem::new(space(2), vec![true, false]).unwrap());
        // p*a <= p*b
        assert!(p.cut(&a).unwrap().leq(&p.cut(&b).unwrap()).unwrap());

        assert!(a.cmp_idem(&a).unwrap().is_zero());

        let c = fe(&[rat_int(0), rat_int(5)]);
        let d = fe(&[rat_int(1), rat_int(1)]);
        assert_eq!(c.cmp_idem(&d).unwrap(), Idem::new(space(2), vec![true, false]).unwrap());
    }

    #[test]
    fn bounded_idem_examples() {
        let a = fe(&[rat_int(5), rat(1, 2)]);
        assert_eq!(a.bounded_idem(1), Idem::new(space(2), vec![false, true]).unwrap());
        assert_eq!(a.bounded_idem(6), Idem::one(space(2)));
        assert!(FElem::zero(space(2)).bounded_idem(1).is_one());

        // matches the comparison-idempotent route it is defined through
        let bound = FElem::constant(space(2), rat_int(1));
        assert_eq!(a.bounded_idem(1), a.abs().cmp_idem(&bound).unwrap());

        // stabilization index: floor(max |a|) + 1
        assert_eq!(a.bounded_idem_stabilization(), 6);
        assert_eq!(FElem::zero(space(2)).bounded_idem_stabilization(), 1);
        assert_eq!(fe(&[rat(11, 2)]).bounded_idem_stabilization(), 6);
    }

    #[test]
    fn invert_pos_examples() {
        let a = fe(&[rat_int(2), rat_int(4)]);
        let inv = a.invert_pos().unwrap();
        assert_eq!(inv, fe(&[rat(1, 2), rat(1, 4)]));
        assert_eq!(a.mul(&inv).unwrap(), FElem::one(space(2)));

        assert_eq!(FElem::one(space(2)).invert_pos().unwrap(), FElem::one(space(2)));

        let b = fe(&[rat(3, 2), rat_int(1)]);
        let binv = b.invert_pos().unwrap();
        assert_eq!(binv, fe(&[rat(2, 3), rat_int(1)]));
        assert_eq!(b.mul(&binv).unwrap(), FElem::one(space(2)));

        let c = fe(&[rat_int(1), rat_int(0)]);
        assert!(matches!(c.invert_pos(), Err(Error::NotInvertible { atom: 1 })));
        let d = fe(&[rat_int(-1), rat_int(2)]);
        assert!(matches!(d.invert_pos(), Err(Error::NotInvertible { atom: 0 })));
    }

    #[test]
    fn freudenthal_examples() {
        let b = fe(&[rat(3, 10)]);
        assert_eq!(b.freudenthal_lower(2), fe(&[rat(1, 4)]));
        assert_eq!(b.freudenthal_upper(2), fe(&[rat(1, 2)]));

        let one = FElem::one(space(3));
        for n in 0..6 {
            assert_eq!(one.freudenthal_lower(n), one);
            assert_eq!(one.freudenthal_upper(n), one);
        }
    }

    #[test]
    fn freudenthal_lower_is_a_step_combination_of_comparison_idempotents() {
        // For b >= 0, the lower approximant equals the sum over j >= 1 of
        // 2^-n * (indicator of b >= j * 2^-n), a rational combination of
        // complements of comparison idempotents.
        let b = fe(&[rat(3, 10), rat_int(2), rat(7, 8), rat_int(0)]);
        let n = 3u32;
        let step = crate::rational::pow2(n).recip();
        let mut acc = FElem::zero(b.space());
        let mut j = 1i64;
        loop {
            let level = step.clone() * rat_int(j);
            let threshold = FElem::constant(b.space(), level.clone());
            // atoms where b >= level, as complement of b < level
            let geq = b.cmp_idem(&threshold).unwrap().complement();
            if geq.is_zero() {
                break;
            }
            acc = acc.add(&geq.as_felem().scale(&step)).unwrap();
            j += 1;
        }
        assert_eq!(acc, b.freudenthal_lower(n));
    }

    #[test]
    fn idem_boolean_ops() {
        let p = Idem::new(space(3), vec![true, true, false]).unwrap();
        let q = Idem::new(space(3), vec![false, true, true]).unwrap();
        assert_eq!(p.meet(&q).unwrap(), Idem::new(space(3), vec![false, true, false]).unwrap());

        let r = Idem::new(space(2), vec![true, false]).unwrap();
        assert_eq!(r.complement(), Idem::new(space(2), vec![false, true]).unwrap());

        // exhaustive Boolean laws on up to 4 atoms
        for n in 1..=4 {
            let s = space(n);
            for p in Idem::enumerate(s).unwrap() {
                assert!(p.join(&p.complement()).unwrap().is_one());
                assert!(p.meet(&p.complement()).unwrap().is_zero());
                // meet is the product of indicators
                for q in Idem::enumerate(s).unwrap() {
                    let via_product = p.as_felem().mul(&q.as_felem()).unwrap();
                    assert_eq!(p.meet(&q).unwrap().as_felem(), via_product);
                }
            }
        }
    }

    #[test]
    fn band_decomposition() {
        // p*a + (1-p)*a = a for every idempotent
        let a = fe(&[rat(1, 3), rat_int(-2), rat_int(7)]);
        for p in Idem::enumerate(a.space()).unwrap() {
            let cut = p.cut(&a).unwrap();
            let rest = p.complement().cut(&a).unwrap();
            assert_eq!(cut.add(&rest).unwrap(), a);
        }
    }

    #[test]
    fn disjointness_examples() {
        let a = fe(&[rat_int(1), rat_int(0)]);
        let b = fe(&[rat_int(0), rat_int(2)]);
        assert!(are_disjoint(&a, &b).unwrap());

        let c = fe(&[rat_int(1), rat_int(1)]);
        assert!(!are_disjoint(&c, &b).unwrap());

        let d = fe(&[rat_int(0), rat_int(-3)]);
        let e = fe(&[rat_int(5), rat_int(0)]);
        let report = disjointness_report(&d, &e).unwrap();
        assert!(report.all_agree());
        assert!(report.product_zero);
    }
}
