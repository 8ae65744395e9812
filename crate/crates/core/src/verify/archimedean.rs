//! Archimedean-property checkers over finite downward chains.
//!
//! A downward chain here is a finite strictly descending list whose infimum
//! is, by finiteness, its last element; chains standing in for families that
//! vanish must therefore end at zero. Three chain flavors are generated:
//! reciprocal constants (ending at zero), strictly shrinking idempotents
//! driven down to zero, and their elementwise products. The full mode
//! checks that scaling a positive module element by a vanishing chain gives
//! a family whose computed lattice infimum is exactly zero; the almost mode
//! checks that only zero survives being squeezed between `-d*x` and `d*x`
//! for every chain member.
//!
//! Finite instances of this model satisfy every flavor, so these checkers
//! certify the positive direction only: the classical infinite
//! counterexamples have no finite representation. What the checks exercise
//! is the order machinery itself, and a reported violation replays from its
//! serialized counterexample to an exact order-relation violation.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::falgebra::{FElem, Idem};
use crate::gen::{self, GenConfig};
use crate::pomodule::{ModuleElem, ModuleSpace};
use crate::rational::{format_rat, parse_rat, rat, Rat};
use crate::verify::{run_trials, Report};

/// Which scalar family the chain is drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArchFlavor {
    /// Reciprocal real constants.
    Real,
    /// Idempotents.
    Idempotent,
    /// General algebra elements (products of the other two).
    Algebra,
}

impl ArchFlavor {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "R" | "real" => Ok(ArchFlavor::Real),
            "P" | "idempotent" => Ok(ArchFlavor::Idempotent),
            "L" | "algebra" => Ok(ArchFlavor::Algebra),
            other => Err(Error::InvalidInput(format!("unknown flavor \"{other}\""))),
        }
    }

    fn name(&self) -> &'static str {
        match self {
            ArchFlavor::Real => "R",
            ArchFlavor::Idempotent => "P",
            ArchFlavor::Algebra => "L",
        }
    }
}

/// Full mode asserts vanishing of the scaled chain's infimum; almost mode
/// asserts that squeezed elements are zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArchMode {
    Full,
    Almost,
}

impl ArchMode {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(ArchMode::Full),
            "almost" => Ok(ArchMode::Almost),
            other => Err(Error::InvalidInput(format!("unknown mode \"{other}\""))),
        }
    }
}

/// A finite strictly descending chain in the scalar algebra together with
/// its declared infimum, which must be its last element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DownwardChain {
    elements: Vec<FElem>,
    declared_inf: FElem,
}

impl DownwardChain {
    pub fn new(elements: Vec<FElem>, declared_inf: FElem) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidInput("chain must be nonempty".into()));
        }
        for (i, w) in elements.windows(2).enumerate() {
            let descending = w[1].leq(&w[0])? && w[0] != w[1];
            if !descending {
                return Err(Error::NotDescending { index: i + 1 });
            }
        }
        if *elements.last().unwrap() != declared_inf {
            return Err(Error::InvalidInput(
                "declared infimum must equal the final chain element".into(),
            ));
        }
        Ok(DownwardChain { elements, declared_inf })
    }

    pub fn elements(&self) -> &[FElem] {
        &self.elements
    }

    pub fn declared_inf(&self) -> &FElem {
        &self.declared_inf
    }
}

/// Builds a vanishing chain of the requested flavor, ending at zero.
pub fn vanishing_chain(
    rng: &mut ChaCha8Rng,
    space: crate::falgebra::AtomSpace,
    flavor: ArchFlavor,
    len: usize,
) -> DownwardChain {
    let len = len.max(1);
    let zero = FElem::zero(space);
    let elements: Vec<FElem> = match flavor {
        ArchFlavor::Real => {
            // 1, 1/2, ..., 1/len, then the infimum 0
            let mut es: Vec<FElem> = (1..=len as i64)
                .map(|j| FElem::constant(space, rat(1, j)))
                .collect();
            es.push(zero.clone());
            es
        }
        ArchFlavor::Idempotent => {
            // strictly shrinking masks driven down to the zero idempotent
            let mut es = Vec::new();
            let mut current = Idem::one(space);
            es.push(current.as_felem());
            while !current.is_zero() {
                let live: Vec<usize> =
                    (0..space.n_atoms()).filter(|&a| current.contains_atom(a)).collect();
                let drop = live[rng.random_range(0..live.len())];
                let mut mask = current.mask().to_vec();
                mask[drop] = false;
                current = Idem::new(space, mask).expect("mask length preserved");
                es.push(current.as_felem());
            }
            es
        }
        ArchFlavor::Algebra => {
            // elementwise products of the two flavors, deduplicated to keep
            // strict descent, ending at zero
            let reals = vanishing_chain(rng, space, ArchFlavor::Real, len);
            let idems = vanishing_chain(rng, space, ArchFlavor::Idempotent, len);
            let steps = reals.elements().len().max(idems.elements().len());
            let mut es: Vec<FElem> = Vec::new();
            for i in 0..steps {
                let r = &reals.elements()[i.min(reals.elements().len() - 1)];
                let p = &idems.elements()[i.min(idems.elements().len() - 1)];
                let prod = r.mul(p).expect("same space");
                if es.last() != Some(&prod) {
                    es.push(prod);
                }
            }
            if es.last().map(FElem::is_zero) != Some(true) {
                es.push(zero.clone());
            }
            es
        }
    };
    DownwardChain::new(elements, zero).expect("constructed chains descend to zero")
}

/// Serialized violation: enough to replay the order computation exactly.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArchViolation {
    pub flavor: String,
    pub mode: String,
    /// Chain elements, atom values as canonical rational strings.
    pub chain: Vec<Vec<String>>,
    pub m_dim: usize,
    pub n_atoms: usize,
    /// Evaluation point coordinates, row-major.
    pub x: Vec<String>,
    /// The computed infimum (full mode) or the squeezed element (almost
    /// mode) that was claimed to violate vanishing.
    pub witness: Vec<String>,
}

impl ArchViolation {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("violation serializes")
    }
}

fn parse_coords(strings: &[String]) -> Result<Vec<Rat>> {
    strings.iter().map(|s| parse_rat(s)).collect()
}

/// Re-evaluates a serialized violation. Returns true when the violation
/// reproduces: the recomputed quantity is again nonzero, i.e. an exact
/// order-relation violation.
pub fn replay_violation(json: &str) -> Result<bool> {
    let v: ArchViolation =
        serde_json::from_str(json).map_err(|e| Error::InvalidInput(format!("bad violation: {e}")))?;
    let atoms = crate::falgebra::AtomSpace::new(v.n_atoms)?;
    let space = ModuleSpace::standard(atoms, v.m_dim)?;
    let x = ModuleElem::new(space.clone(), parse_coords(&v.x)?)?;
    let witness = ModuleElem::new(space.clone(), parse_coords(&v.witness)?)?;
    let chain: Vec<FElem> = v
        .chain
        .iter()
        .map(|vals| FElem::new(atoms, parse_coords(vals)?))
        .collect::<Result<_>>()?;
    match v.mode.as_str() {
        "full" => {
            // recompute the infimum of the scaled chain
            let mut inf: Option<ModuleElem> = None;
            for d in &chain {
                let scaled = x.scale_felem(d)?;
                inf = Some(match inf {
                    None => scaled,
                    Some(acc) => acc.inf(&scaled)?,
                });
            }
            let inf = inf.ok_or_else(|| Error::InvalidInput("empty chain".into()))?;
            Ok(inf == witness && !inf.is_zero())
        }
        "almost" => {
            // the witness must again be squeezed by every chain member yet
            // nonzero
            for d in &chain {
                let dx = x.scale_felem(d)?;
                if !(dx.neg().leq(&witness)? && witness.leq(&dx)?) {
                    return Ok(false);
                }
            }
            Ok(!witness.is_zero())
        }
        other => Err(Error::InvalidInput(format!("unknown mode \"{other}\""))),
    }
}

fn violation_json(
    flavor: ArchFlavor,
    mode: ArchMode,
    chain: &DownwardChain,
    x: &ModuleElem,
    witness: &ModuleElem,
) -> String {
    let space = x.space();
    ArchViolation {
        flavor: flavor.name().to_string(),
        mode: match mode {
            ArchMode::Full => "full".to_string(),
            ArchMode::Almost => "almost".to_string(),
        },
        chain: chain
            .elements()
            .iter()
            .map(|e| e.values().iter().map(format_rat).collect())
            .collect(),
        m_dim: space.m_dim(),
        n_atoms: space.atoms().n_atoms(),
        x: x.coords().iter().map(format_rat).collect(),
        witness: witness.coords().iter().map(format_rat).collect(),
    }
    .to_json()
}

/// One trial of the Archimedean check on a given module space.
pub(crate) fn arch_trial(
    rng: &mut ChaCha8Rng,
    space: &ModuleSpace,
    flavor: ArchFlavor,
    mode: ArchMode,
    cfg: &GenConfig,
) -> std::result::Result<(), String> {
    let chain_len = rng.random_range(2..=6);
    let chain = vanishing_chain(rng, space.atoms(), flavor, chain_len);
    let x = gen::rand_cone_elem(rng, space, cfg);
    let mut run = || -> Result<std::result::Result<(), String>> {
        match mode {
            ArchMode::Full => {
                let mut inf: Option<ModuleElem> = None;
                for d in chain.elements() {
                    let scaled = x.scale_felem(d)?;
                    // every scaled member must dominate the declared limit
                    if !scaled.is_in_cone() {
                        return Ok(Err(violation_json(flavor, mode, &chain, &x, &scaled)));
                    }
                    inf = Some(match inf {
                        None => scaled,
                        Some(acc) => acc.inf(&scaled)?,
                    });
                }
                let inf = inf.expect("chains are nonempty");
                if inf.is_zero() {
                    Ok(Ok(()))
                } else {
                    Ok(Err(violation_json(flavor, mode, &chain, &x, &inf)))
                }
            }
            ArchMode::Almost => {
                // candidates: zero (must survive and be zero) and random
                // elements (must fail the squeeze unless zero)
                let mut candidates = vec![ModuleElem::zero(space.clone())];
                for _ in 0..3 {
                    candidates.push(gen::rand_module_elem(rng, space, cfg));
                }
                for y in candidates {
                    let mut squeezed = true;
                    for d in chain.elements() {
                        let dx = x.scale_felem(d)?;
                        if !(dx.neg().leq(&y)? && y.leq(&dx)?) {
                            squeezed = false;
                            break;
                        }
                    }
                    if squeezed && !y.is_zero() {
                        return Ok(Err(violation_json(flavor, mode, &chain, &x, &y)));
                    }
                }
                Ok(Ok(()))
            }
        }
    };
    run().map_err(|e| format!("internal error: {e}"))?
}

/// Runs the Archimedean check of one flavor and mode as a standalone
/// campaign on random positive elements of `space`.
pub fn check_archimedean(
    space: &ModuleSpace,
    flavor: ArchFlavor,
    mode: ArchMode,
    trials: u64,
    seed: u64,
    denom_cap: u32,
) -> Report {
    let start = std::time::Instant::now();
    let cfg = GenConfig::with_denom_cap(denom_cap);
    let failure = run_trials(trials, seed, |_, rng| arch_trial(rng, space, flavor, mode, &cfg));
    Report {
        suite: format!("archimedean-{}-{:?}", flavor.name(), mode).to_lowercase(),
        trials,
        seed,
        passed: failure.is_none(),
        expected_failure: false,
        counterexample: failure.map(|f| format!("trial {}: {}", f.trial, f.message)),
        warning: if trials == 0 {
            Some("empty trial budget: nothing was checked".to_string())
        } else {
            None
        },
        elapsed_ms: start.elapsed().as_millis() as u64,
    }
}

/// Checks the combination statement: passing the reciprocal-constant and
/// idempotent flavors must imply passing the general-algebra flavor on the
/// same budget, and the splitting identity `a = (a inf r) + (a - r)^+`
/// holds exactly for every positive constant r.
pub fn check_arch_combination(space: &ModuleSpace, trials: u64, seed: u64, denom_cap: u32) -> Report {
    let start = std::time::Instant::now();
    let cfg = GenConfig::with_denom_cap(denom_cap);
    let failure = run_trials(trials, seed, |_, rng| {
        let r_pass = arch_trial(rng, space, ArchFlavor::Real, ArchMode::Full, &cfg).is_ok();
        let p_pass = arch_trial(rng, space, ArchFlavor::Idempotent, ArchMode::Full, &cfg).is_ok();
        let l_pass = arch_trial(rng, space, ArchFlavor::Algebra, ArchMode::Full, &cfg).is_ok();
        if r_pass && p_pass && !l_pass {
            return Err("combination implication failed: R and P pass but L fails".to_string());
        }

        // splitting identity used to reduce the general flavor to the two
        // special ones: a = (a inf r) + (a - r)^+ for real r > 0
        let a = gen::rand_felem(rng, space.atoms(), &cfg);
        let r = gen::rand_pos_rat(rng, &cfg);
        let rc = FElem::constant(space.atoms(), r.clone());
        let lhs = a.inf(&rc).map_err(|e| e.to_string())?;
        let rhs = a.sub(&rc).map_err(|e| e.to_string())?.pos_part();
        let recombined = lhs.add(&rhs).map_err(|e| e.to_string())?;
        if recombined != a {
            return Err(format!(
                "splitting identity failed for a = {a}, r = {}",
                format_rat(&r)
            ));
        }
        Ok(())
    });
    Report {
        suite: "archimedean-combination".to_string(),
        trials,
        seed,
        passed: failure.is_none(),
        expected_failure: false,
        counterexample: failure.map(|f| format!("trial {}: {}", f.trial, f.message)),
        warning: None,
        elapsed_ms: start.elapsed().as_millis() as u64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::falgebra::AtomSpace;
    use crate::rational::rat_int;
    use rand_chacha::rand_core::SeedableRng;

    fn atoms(n: usize) -> AtomSpace {
        AtomSpace::new(n).unwrap()
    }

    #[test]
    fn chain_validation() {
        let s = atoms(2);
        let good = vec![
            FElem::constant(s, rat_int(2)),
            FElem::constant(s, rat_int(1)),
            FElem::zero(s),
        ];
        let chain = DownwardChain::new(good.clone(), FElem::zero(s)).unwrap();
        assert_eq!(chain.elements().len(), 3);

        // declared infimum must be the last element
        assert!(DownwardChain::new(good.clone(), FElem::one(s)).is_err());

        // non-descending rejected
        let bad = vec![FElem::one(s), FElem::constant(s, rat_int(2))];
        assert!(matches!(
            DownwardChain::new(bad, FElem::constant(s, rat_int(2))),
            Err(Error::NotDescending { index: 1 })
        ));

        // strictness: repeated elements rejected
        let flat = vec![FElem::one(s), FElem::one(s)];
        assert!(DownwardChain::new(flat, FElem::one(s)).is_err());
    }

    #[test]
    fn generated_chains_vanish() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for flavor in [ArchFlavor::Real, ArchFlavor::Idempotent, ArchFlavor::Algebra] {
            for n in 1..=4 {
                let chain = vanishing_chain(&mut rng, atoms(n), flavor, 4);
                assert!(chain.declared_inf().is_zero());
                assert!(chain.elements().last().unwrap().is_zero());
            }
        }
    }

    #[test]
    fn checkers_pass_on_finite_instances() {
        let space = ModuleSpace::standard(atoms(3), 2).unwrap();
        for flavor in [ArchFlavor::Real, ArchFlavor::Idempotent, ArchFlavor::Algebra] {
            for mode in [ArchMode::Full, ArchMode::Almost] {
                let report = check_archimedean(&space, flavor, mode, 40, 7, 8);
                assert!(report.passed, "{flavor:?} {mode:?}: {:?}", report.counterexample);
            }
        }
        let combo = check_arch_combination(&space, 40, 7, 8);
        assert!(combo.passed, "{:?}", combo.counterexample);
    }

    #[test]
    fn splitting_identity_examples() {
        let s = atoms(2);
        let a = FElem::new(s, vec![rat_int(3), rat(1, 2)]).unwrap();
        let r = FElem::one(s);
        let low = a.inf(&r).unwrap();
        let high = a.sub(&r).unwrap().pos_part();
        assert_eq!(low, FElem::new(s, vec![rat_int(1), rat(1, 2)]).unwrap());
        assert_eq!(high, FElem::new(s, vec![rat_int(2), rat_int(0)]).unwrap());
        assert_eq!(low.add(&high).unwrap(), a);

        // r above the maximum: the split is (a, 0)
        let big = FElem::constant(s, rat_int(100));
        assert_eq!(a.inf(&big).unwrap(), a);
        assert!(a.sub(&big).unwrap().pos_part().is_zero());
    }

    #[test]
    fn violations_replay_exactly() {
        // a synthetic "violation": a chain stopping above zero genuinely has
        // a nonzero infimum, so the replay confirms it
        let s = atoms(2);
        let space = ModuleSpace::standard(s, 1).unwrap();
        let chain = DownwardChain::new(
            vec![FElem::constant(s, rat_int(2)), FElem::one(s)],
            FElem::one(s),
        )
        .unwrap();
        let x = ModuleElem::from_ints(space.clone(), &[1, 2]).unwrap();
        let witness = x.clone(); // inf of {2x, x} is x
        let json = violation_json(ArchFlavor::Real, ArchMode::Full, &chain, &x, &witness);
        assert!(replay_violation(&json).unwrap());

        // a fabricated non-violation does not replay
        let fake = violation_json(
            ArchFlavor::Real,
            ArchMode::Full,
            &chain,
            &x,
            &ModuleElem::zero(space),
        );
        assert!(!replay_violation(&fake).unwrap());
    }
}
