//! Seeded random generation of domain objects.
//!
//! Everything is driven by an explicit `ChaCha8Rng` so campaigns are
//! reproducible bit for bit. Random rationals are drawn with a numerator
//! magnitude cap and a denominator cap; reduction can only shrink the
//! denominator, so the cap survives normalization.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::falgebra::{AtomSpace, FElem, Idem};
use crate::operators::{DirectedFamily, Operator};
use crate::pomodule::{AtomMonomial, ModuleElem, ModuleSpace, MonomialTransform};
use crate::rational::Rat;

/// Magnitude and denominator caps for random rationals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenConfig {
    pub denom_cap: u32,
    pub max_numer: i64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { denom_cap: 16, max_numer: 8 }
    }
}

impl GenConfig {
    pub fn with_denom_cap(denom_cap: u32) -> Self {
        GenConfig { denom_cap: denom_cap.max(1), ..GenConfig::default() }
    }
}

pub fn rand_rat(rng: &mut ChaCha8Rng, cfg: &GenConfig) -> Rat {
    let n = rng.random_range(-cfg.max_numer..=cfg.max_numer);
    let d = rng.random_range(1..=i64::from(cfg.denom_cap));
    Rat::new(n.into(), d.into())
}

/// A nonnegative random rational (zero allowed).
pub fn rand_nonneg_rat(rng: &mut ChaCha8Rng, cfg: &GenConfig) -> Rat {
    let n = rng.random_range(0..=cfg.max_numer);
    let d = rng.random_range(1..=i64::from(cfg.denom_cap));
    Rat::new(n.into(), d.into())
}

/// A strictly positive random rational.
pub fn rand_pos_rat(rng: &mut ChaCha8Rng, cfg: &GenConfig) -> Rat {
    let n = rng.random_range(1..=cfg.max_numer.max(1));
    let d = rng.random_range(1..=i64::from(cfg.denom_cap));
    Rat::new(n.into(), d.into())
}

pub fn rand_felem(rng: &mut ChaCha8Rng, space: AtomSpace, cfg: &GenConfig) -> FElem {
    let values = (0..space.n_atoms()).map(|_| rand_rat(rng, cfg)).collect();
    FElem::new(space, values).expect("value count matches")
}

pub fn rand_nonneg_felem(rng: &mut ChaCha8Rng, space: AtomSpace, cfg: &GenConfig) -> FElem {
    let values = (0..space.n_atoms()).map(|_| rand_nonneg_rat(rng, cfg)).collect();
    FElem::new(space, values).expect("value count matches")
}

pub fn rand_idem(rng: &mut ChaCha8Rng, space: AtomSpace) -> Idem {
    let mask = (0..space.n_atoms()).map(|_| rng.random_bool(0.5)).collect();
    Idem::new(space, mask).expect("mask length matches")
}

/// A random per-atom monomial transform of the given dimension.
pub fn rand_monomial_transform(
    rng: &mut ChaCha8Rng,
    atoms: AtomSpace,
    m_dim: usize,
    cfg: &GenConfig,
) -> MonomialTransform {
    let per_atom = (0..atoms.n_atoms())
        .map(|_| {
            let mut perm: Vec<usize> = (0..m_dim).collect();
            perm.shuffle(rng);
            let diag = (0..m_dim).map(|_| rand_pos_rat(rng, cfg)).collect();
            AtomMonomial::new(perm, diag).expect("valid permutation and diagonal")
        })
        .collect();
    MonomialTransform::new(per_atom).expect("nonempty")
}

/// A module space with a standard cone, or a monomial cone when
/// `transformed` is set.
pub fn rand_module_space(
    rng: &mut ChaCha8Rng,
    atoms: AtomSpace,
    m_dim: usize,
    transformed: bool,
    cfg: &GenConfig,
) -> ModuleSpace {
    if transformed {
        let t = rand_monomial_transform(rng, atoms, m_dim, cfg);
        ModuleSpace::with_cone(atoms, m_dim, t).expect("consistent dimensions")
    } else {
        ModuleSpace::standard(atoms, m_dim).expect("positive dimension")
    }
}

pub fn rand_module_elem(rng: &mut ChaCha8Rng, space: &ModuleSpace, cfg: &GenConfig) -> ModuleElem {
    let coords = (0..space.coord_count()).map(|_| rand_rat(rng, cfg)).collect();
    ModuleElem::new(space.clone(), coords).expect("coordinate count matches")
}

/// A random element of the positive cone (nonnegative cone coordinates).
pub fn rand_cone_elem(rng: &mut ChaCha8Rng, space: &ModuleSpace, cfg: &GenConfig) -> ModuleElem {
    let coords = (0..space.coord_count()).map(|_| rand_nonneg_rat(rng, cfg)).collect();
    ModuleElem::from_cone_coords(space.clone(), coords).expect("coordinate count matches")
}

pub fn rand_operator(
    rng: &mut ChaCha8Rng,
    domain: &ModuleSpace,
    codomain: &ModuleSpace,
    cfg: &GenConfig,
) -> Operator {
    let n = domain.atoms().n_atoms();
    let size = domain.m_dim() * codomain.m_dim();
    let blocks = (0..n)
        .map(|_| (0..size).map(|_| rand_rat(rng, cfg)).collect())
        .collect();
    Operator::new(domain.clone(), codomain.clone(), blocks).expect("block shape matches")
}

/// A random positive operator whose entries all share one denominator.
/// Sums of such entries keep that denominator, so images of integer points
/// stay within any denominator cap the shared value respects.
pub fn rand_positive_operator_shared_denom(
    rng: &mut ChaCha8Rng,
    domain: &ModuleSpace,
    codomain: &ModuleSpace,
    denom: u32,
    max_numer: i64,
) -> Operator {
    let n = domain.atoms().n_atoms();
    let size = domain.m_dim() * codomain.m_dim();
    let d = i64::from(denom.max(1));
    let cone_blocks = (0..n)
        .map(|_| {
            (0..size)
                .map(|_| Rat::new(rng.random_range(0..=max_numer).into(), d.into()))
                .collect()
        })
        .collect();
    Operator::from_cone_blocks(domain.clone(), codomain.clone(), cone_blocks)
        .expect("block shape matches")
}

/// A random positive operator: nonnegative entries in cone coordinates.
pub fn rand_positive_operator(
    rng: &mut ChaCha8Rng,
    domain: &ModuleSpace,
    codomain: &ModuleSpace,
    cfg: &GenConfig,
) -> Operator {
    let n = domain.atoms().n_atoms();
    let size = domain.m_dim() * codomain.m_dim();
    let cone_blocks = (0..n)
        .map(|_| (0..size).map(|_| rand_nonneg_rat(rng, cfg)).collect())
        .collect();
    Operator::from_cone_blocks(domain.clone(), codomain.clone(), cone_blocks)
        .expect("block shape matches")
}

fn big_gcd(a: num_bigint::BigInt, b: num_bigint::BigInt) -> num_bigint::BigInt {
    use num_traits::Signed as _;
    use num_traits::Zero as _;
    if b.is_zero() {
        a.abs()
    } else {
        let r = &a % &b;
        big_gcd(b, r)
    }
}

/// Scales an operator by the least common multiple of its entry
/// denominators. Scaling by a positive integer preserves positivity and
/// every order relation, and the result has integer entries.
pub fn clear_denominators(op: &Operator) -> Operator {
    use num_traits::One as _;
    let mut lcm = num_bigint::BigInt::one();
    for block in op.blocks() {
        for entry in block {
            let d = entry.denom().clone();
            let g = big_gcd(lcm.clone(), d.clone());
            lcm = lcm / g * d;
        }
    }
    let scale = FElem::constant(op.domain().atoms(), Rat::from_integer(lcm));
    op.scale_felem(&scale).expect("constant shares the atom space")
}

/// A random directed family: the suprema of all nonempty subsets of `base`
/// random positive operators (so the closure is directed by construction),
/// with the everything-supremum as declared bound.
pub fn rand_directed_family(
    rng: &mut ChaCha8Rng,
    domain: &ModuleSpace,
    codomain: &ModuleSpace,
    base: usize,
    cfg: &GenConfig,
) -> DirectedFamily {
    let base = base.clamp(1, 4);
    let ops: Vec<Operator> = (0..base)
        .map(|_| rand_positive_operator(rng, domain, codomain, cfg))
        .collect();
    let mut members = Vec::with_capacity((1 << base) - 1);
    for bits in 1u32..1 << base {
        let mut acc: Option<Operator> = None;
        for (i, op) in ops.iter().enumerate() {
            if bits >> i & 1 == 1 {
                acc = Some(match acc {
                    None => op.clone(),
                    Some(a) => a.rk_sup(op).expect("same spaces"),
                });
            }
        }
        members.push(acc.expect("nonempty subset"));
    }
    let top = members.last().expect("nonempty").clone();
    DirectedFamily::new(members, Some(top)).expect("closure under sup is directed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;
    use rand_chacha::rand_core::SeedableRng;

    #[test]
    fn determinism_per_seed() {
        let cfg = GenConfig::default();
        let atoms = AtomSpace::new(3).unwrap();
        let mut a = ChaCha8Rng::seed_from_u64(7);
        let mut b = ChaCha8Rng::seed_from_u64(7);
        assert_eq!(rand_felem(&mut a, atoms, &cfg), rand_felem(&mut b, atoms, &cfg));
        let sa = rand_module_space(&mut a, atoms, 2, true, &cfg);
        let sb = rand_module_space(&mut b, atoms, 2, true, &cfg);
        assert_eq!(sa, sb);
        assert_eq!(
            rand_operator(&mut a, &sa, &sa, &cfg),
            rand_operator(&mut b, &sb, &sb, &cfg)
        );
    }

    #[test]
    fn denominator_cap_survives_reduction() {
        let cfg = GenConfig::with_denom_cap(5);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..500 {
            let r = rand_rat(&mut rng, &cfg);
            assert!(*r.denom() <= 5.into());
            assert!(r.numer().abs() <= (cfg.max_numer).into());
        }
    }

    #[test]
    fn generated_positives_are_positive() {
        let cfg = GenConfig::default();
        let atoms = AtomSpace::new(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for transformed in [false, true] {
            let x = rand_module_space(&mut rng, atoms, 2, transformed, &cfg);
            let y = rand_module_space(&mut rng, atoms, 2, transformed, &cfg);
            for _ in 0..20 {
                assert!(rand_cone_elem(&mut rng, &x, &cfg).is_in_cone());
                assert!(rand_positive_operator(&mut rng, &x, &y, &cfg).is_positive());
            }
        }
    }

    #[test]
    fn directed_families_validate() {
        let cfg = GenConfig::default();
        let atoms = AtomSpace::new(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x = rand_module_space(&mut rng, atoms, 2, false, &cfg);
        let y = rand_module_space(&mut rng, atoms, 2, true, &cfg);
        let fam = rand_directed_family(&mut rng, &x, &y, 3, &cfg);
        assert_eq!(fam.members().len(), 7);
    }
}
