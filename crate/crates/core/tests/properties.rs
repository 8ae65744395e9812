//! Property tests for the algebraic laws, with proptest shrinking.
//! These complement the seeded suite campaigns: same laws, adversarial
//! generation.

use proptest::collection::vec;
use proptest::prelude::*;

use rklat_core::falgebra::{AtomSpace, FElem, Idem};
use rklat_core::pomodule::{AtomMonomial, ModuleElem, ModuleSpace, MonomialTransform};
use rklat_core::rational::{rat, Rat};

fn rats() -> impl Strategy<Value = Rat> {
    (-8i64..=8, 1i64..=4).prop_map(|(n, d)| rat(n, d))
}

fn pos_rats() -> impl Strategy<Value = Rat> {
    (1i64..=8, 1i64..=4).prop_map(|(n, d)| rat(n, d))
}

#[derive(Debug, Clone)]
struct Triple {
    a: FElem,
    b: FElem,
    c: FElem,
}

fn triples() -> impl Strategy<Value = Triple> {
    (1usize..=4)
        .prop_flat_map(|n| {
            (
                vec(rats(), n),
                vec(rats(), n),
                vec(rats(), n),
            )
        })
        .prop_map(|(a, b, c)| {
            let space = AtomSpace::new(a.len()).unwrap();
            Triple {
                a: FElem::new(space, a).unwrap(),
                b: FElem::new(space, b).unwrap(),
                c: FElem::new(space, c).unwrap(),
            }
        })
}

proptest! {
    #[test]
    fn falgebra_ring_and_lattice_laws(t in triples()) {
        let Triple { a, b, c } = t;
        // distributivity
        prop_assert_eq!(
            a.mul(&b.add(&c).unwrap()).unwrap(),
            a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()
        );
        // sup + inf = sum
        prop_assert_eq!(
            a.sup(&b).unwrap().add(&a.inf(&b).unwrap()).unwrap(),
            a.add(&b).unwrap()
        );
        // Jordan decomposition and modulus
        prop_assert_eq!(a.pos_part().sub(&a.neg_part()).unwrap(), a.clone());
        prop_assert_eq!(a.abs(), a.sup(&a.neg()).unwrap());
        // disjointness is preserved by positive multiplication
        let d1 = b.abs();
        let d2 = b.support().complement().cut(&a.abs()).unwrap();
        prop_assert!(d1.inf(&d2).unwrap().is_zero());
        prop_assert!(c.abs().mul(&d1).unwrap().inf(&d2).unwrap().is_zero());
    }

    #[test]
    fn support_is_the_smallest_fixing_idempotent(t in triples()) {
        let a = t.a;
        let support = a.support();
        prop_assert_eq!(support.cut(&a).unwrap(), a.clone());
        for p in Idem::enumerate(a.space()).unwrap() {
            if p.cut(&a).unwrap() == a {
                prop_assert!(support.leq(&p).unwrap());
            }
            // band decomposition
            let split = p.cut(&a).unwrap().add(&p.complement().cut(&a).unwrap()).unwrap();
            prop_assert_eq!(split, a.clone());
        }
    }

    #[test]
    fn comparison_idempotent_orders_its_cuts(t in triples()) {
        let p = t.a.cmp_idem(&t.b).unwrap();
        prop_assert!(p.cut(&t.a).unwrap().leq(&p.cut(&t.b).unwrap()).unwrap());
    }

    #[test]
    fn freudenthal_sandwich_and_monotonicity(t in triples(), n in 0u32..=10) {
        let b = t.a.abs();
        let lower = b.freudenthal_lower(n);
        let upper = b.freudenthal_upper(n);
        let gap = FElem::constant(b.space(), rklat_core::rational::pow2(n).recip());
        prop_assert!(lower.leq(&b).unwrap());
        prop_assert!(b.leq(&upper).unwrap());
        prop_assert!(b.sub(&lower).unwrap().leq(&gap).unwrap());
        prop_assert!(upper.sub(&b).unwrap().leq(&gap).unwrap());
        prop_assert!(lower.leq(&b.freudenthal_lower(n + 1)).unwrap());
        prop_assert!(b.freudenthal_upper(n + 1).leq(&upper).unwrap());
    }
}

#[derive(Debug, Clone)]
struct ModulePair {
    x: ModuleElem,
    y: ModuleElem,
    lambda: FElem,
}

fn module_pairs() -> impl Strategy<Value = ModulePair> {
    (1usize..=3, 1usize..=2, any::<bool>())
        .prop_flat_map(|(n, m, transformed)| {
            let coords = m * n;
            (
                Just((n, m, transformed)),
                vec(rats(), coords),
                vec(rats(), coords),
                vec(rats(), n),
                vec(pos_rats(), m * n),
                vec(0usize..100, m),
            )
        })
        .prop_map(|((n, m, transformed), xs, ys, ls, diags, perm_seed)| {
            let atoms = AtomSpace::new(n).unwrap();
            let space = if transformed {
                let per_atom = (0..n)
                    .map(|a| {
                        let mut perm: Vec<usize> = (0..m).collect();
                        // a deterministic permutation from the seed values
                        for i in (1..m).rev() {
                            perm.swap(i, perm_seed[i] % (i + 1));
                        }
                        let diag = (0..m).map(|i| diags[a * m + i].clone()).collect();
                        AtomMonomial::new(perm, diag).unwrap()
                    })
                    .collect();
                ModuleSpace::with_cone(atoms, m, MonomialTransform::new(per_atom).unwrap()).unwrap()
            } else {
                ModuleSpace::standard(atoms, m).unwrap()
            };
            ModulePair {
                x: ModuleElem::new(space.clone(), xs).unwrap(),
                y: ModuleElem::new(space, ys).unwrap(),
                lambda: FElem::new(atoms, ls).unwrap(),
            }
        })
}

proptest! {
    #[test]
    fn module_order_compatibility(p in module_pairs()) {
        let ModulePair { x, y, lambda } = p;
        let sup = x.sup(&y).unwrap();
        let inf = x.inf(&y).unwrap();
        // lattice bounds
        prop_assert!(x.leq(&sup).unwrap() && y.leq(&sup).unwrap());
        prop_assert!(inf.leq(&x).unwrap() && inf.leq(&y).unwrap());
        // sup + inf = x + y
        prop_assert_eq!(sup.add(&inf).unwrap(), x.add(&y).unwrap());
        // translation invariance of the order
        let z = y.abs();
        if x.leq(&y).unwrap() {
            prop_assert!(x.add(&z).unwrap().leq(&y.add(&z).unwrap()).unwrap());
        }
        // nonnegative algebra action preserves order
        let lam = lambda.abs();
        let lo = inf.scale_felem(&lam).unwrap();
        let hi = sup.scale_felem(&lam).unwrap();
        prop_assert!(lo.leq(&hi).unwrap());
        // cone axioms
        let xp = x.pos_part();
        let yp = y.pos_part();
        prop_assert!(xp.add(&yp).unwrap().is_in_cone());
        prop_assert!(xp.scale_felem(&lam).unwrap().is_in_cone());
        if xp.is_in_cone() && xp.neg().is_in_cone() {
            prop_assert!(xp.is_zero());
        }
    }

    #[test]
    fn module_jordan_and_support(p in module_pairs()) {
        let x = p.x;
        prop_assert_eq!(x.pos_part().sub(&x.neg_part()).unwrap(), x.clone());
        prop_assert_eq!(x.cut(&x.support()).unwrap(), x.clone());
        // support is the join of the coordinate-row supports
        let mut join = Idem::zero(x.space().atoms());
        for i in 0..x.space().m_dim() {
            join = join.join(&x.coordinate_row(i).support()).unwrap();
        }
        prop_assert_eq!(x.support(), join);
    }
}
