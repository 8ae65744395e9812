//! The named property suites.
//!
//! Every suite is a deterministic seeded campaign over randomly generated
//! instances. Failures carry a JSON rendering of the failing inputs; the
//! runner in the parent module re-shrinks them.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::falgebra::{are_disjoint, disjointness_report, FElem, Idem};
use crate::gen::{self, GenConfig};
use crate::operators::{
    directed_sup, dual_abs, dual_inf, dual_sup, extend_cone_map, ConeMap,
    ConeMapRule, DirectedFamily, ExtensionConfig, Operator,
};
use crate::pomodule::{check_rdp, scalar_chain_inf, scale_interval, ModuleElem, ModuleSpace};
use crate::rational::{format_rat, pow2, rat_int};
use crate::verify::archimedean::{arch_trial, ArchFlavor, ArchMode};
use crate::verify::oracle::{oracle_rk_all, oracle_rk_sup, OracleConfig};
use crate::verify::{run_trials, SuiteParams, SuiteRun};

pub const SUITES: &[&str] = &[
    "falgebra-axioms",
    "support-calculus",
    "freudenthal",
    "interval-lemmas",
    "rdp",
    "rk-oracle",
    "rk-lattice-identities",
    "extension",
    "directed-sup",
    "archimedean",
    "dual",
];

pub(crate) type SuiteFn = fn(&SuiteParams, u64) -> SuiteRun;

pub(crate) fn lookup(name: &str) -> Option<SuiteFn> {
    Some(match name {
        "falgebra-axioms" => suite_falgebra_axioms,
        "support-calculus" => suite_support_calculus,
        "freudenthal" => suite_freudenthal,
        "interval-lemmas" => suite_interval_lemmas,
        "rdp" => suite_rdp,
        "rk-oracle" => suite_rk_oracle,
        "rk-lattice-identities" => suite_rk_lattice_identities,
        "extension" => suite_extension,
        "directed-sup" => suite_directed_sup,
        "archimedean" => suite_archimedean,
        "dual" => suite_dual,
        _ => return None,
    })
}

fn cx(fields: &[(&str, String)]) -> String {
    let mut map = serde_json::Map::new();
    for (k, v) in fields {
        map.insert((*k).to_string(), serde_json::Value::String(v.clone()));
    }
    serde_json::Value::Object(map).to_string()
}

fn gen_cfg(params: &SuiteParams) -> GenConfig {
    GenConfig { denom_cap: params.denom_cap.max(1), max_numer: 8 }
}

/// Random atom count and module dimensions within the parameter bounds,
/// keeping the total coordinate count at or below `max_coords`.
fn rand_dims(rng: &mut ChaCha8Rng, params: &SuiteParams, max_coords: usize) -> (usize, usize, usize) {
    let n = rng.random_range(1..=params.atoms.max(1));
    let m_cap = (max_coords / n).max(1);
    let m = rng.random_range(1..=params.dim_x.max(1)).min(m_cap);
    let k = rng.random_range(1..=params.dim_y.max(1));
    (n, m, k)
}

fn suite_falgebra_axioms(params: &SuiteParams, seed: u64) -> SuiteRun {
    let cfg = gen_cfg(params);
    let trials = params.trials;
    let failure = run_trials(trials, seed, |_, rng| {
        let atoms = crate::falgebra::AtomSpace::new(rng.random_range(1..=params.atoms.max(1)))
            .expect("positive atom count");
        let a = gen::rand_felem(rng, atoms, &cfg);
        let b = gen::rand_felem(rng, atoms, &cfg);
        let c = gen::rand_felem(rng, atoms, &cfg);
        let err = |law: &str| {
            Err(cx(&[
                ("law", law.to_string()),
                ("a", a.to_string()),
                ("b", b.to_string()),
                ("c", c.to_string()),
            ]))
        };
        let e = |r: crate::error::Result<FElem>| r.expect("same space");

        // ring axioms
        if e(e(a.add(&b)).add(&c)) != e(a.add(&e(b.add(&c)))) {
            return err("add-associativity");
        }
        if e(e(a.mul(&b)).mul(&c)) != e(a.mul(&e(b.mul(&c)))) {
            return err("mul-associativity");
        }
        if e(a.mul(&b)) != e(b.mul(&a)) {
            return err("mul-commutativity");
        }
        if e(a.mul(&e(b.add(&c)))) != e(e(a.mul(&b)).add(&e(a.mul(&c)))) {
            return err("distributivity");
        }
        if e(a.mul(&FElem::one(atoms))) != a {
            return err("unit");
        }

        // lattice identities
        if e(e(a.sup(&b)).add(&e(a.inf(&b)))) != e(a.add(&b)) {
            return err("sup-plus-inf");
        }
        if e(a.pos_part().sub(&a.neg_part())) != a {
            return err("jordan");
        }
        if a.abs() != e(a.sup(&a.neg())) {
            return err("abs-as-sup");
        }
        if !e(a.pos_part().inf(&a.neg_part())).is_zero() {
            return err("parts-disjoint");
        }

        // multiplication by a positive element preserves disjointness:
        // build a disjoint positive pair with a random idempotent cut
        let p = gen::rand_idem(rng, atoms);
        let d1 = p.cut(&a.abs()).expect("same space");
        let d2 = p.complement().cut(&b.abs()).expect("same space");
        if !e(d1.inf(&d2)).is_zero() {
            return err("constructed-pair-not-disjoint");
        }
        let cpos = c.abs();
        if !e(e(cpos.mul(&d1)).inf(&d2)).is_zero() {
            return err("falgebra-property");
        }
        Ok(())
    });
    SuiteRun { trials, failure, expected_failure: false, warning: None }
}

fn suite_support_calculus(params: &SuiteParams, seed: u64) -> SuiteRun {
    let cfg = gen_cfg(params);
    let trials = params.trials;
    let failure = run_trials(trials, seed, |_, rng| {
        let n = rng.random_range(1..=params.atoms.clamp(1, 4));
        let atoms = crate::falgebra::AtomSpace::new(n).expect("positive atom count");
        let a = gen::rand_felem(rng, atoms, &cfg);
        let b = gen::rand_felem(rng, atoms, &cfg);
        let fail = |what: &str| {
            Err(cx(&[("check", what.to_string()), ("a", a.to_string()), ("b", b.to_string())]))
        };

        // support equals the enumeration-defined infimum of fixing
        // idempotents, and is itself fixing
        let support = a.support();
        let mut inf = Idem::one(atoms);
        for p in Idem::enumerate(atoms).expect("small atom count") {
            if p.cut(&a).expect("same space") == a {
                inf = inf.meet(&p).expect("same space");
                if !support.leq(&p).expect("same space") {
                    return fail("support-minimality");
                }
            }
        }
        if support != inf {
            return fail("support-enumeration");
        }
        if support.cut(&a).expect("same space") != a {
            return fail("support-fixes");
        }

        // comparison idempotent order property
        let pq = a.cmp_idem(&b).expect("same space");
        let lhs = pq.cut(&a).expect("same space");
        let rhs = pq.cut(&b).expect("same space");
        if !lhs.leq(&rhs).expect("same space") {
            return fail("cmp-idem-order");
        }

        // four-way disjointness agreement on the raw pair and on a
        // constructed disjoint pair
        let report = disjointness_report(&a, &b).expect("same space");
        if !report.all_agree() {
            return fail("disjointness-agreement");
        }
        let p = gen::rand_idem(rng, atoms);
        let d1 = p.cut(&a).expect("same space");
        let d2 = p.complement().cut(&b).expect("same space");
        match are_disjoint(&d1, &d2) {
            Ok(true) => {}
            _ => return fail("constructed-disjoint"),
        }

        // bounded idempotent sequence: increasing, bounding, stabilizing at
        // floor(max |a|) + 1; and monotone convergence from below for |a|
        let stab = a.bounded_idem_stabilization();
        let abs = a.abs();
        let mut prev_cut: Option<FElem> = None;
        for step in 1..=stab + 2 {
            let n32 = u32::try_from(step).expect("small index");
            let pn = a.bounded_idem(n32);
            let pn_next = a.bounded_idem(n32 + 1);
            if !pn.leq(&pn_next).expect("same space") {
                return fail("bounded-idem-monotone");
            }
            let bound = FElem::constant(atoms, rat_int(i64::try_from(step).expect("small")));
            let cut = pn.cut(&a).expect("same space");
            if !(cut.leq(&bound).expect("same space")
                && bound.neg().leq(&cut).expect("same space"))
            {
                return fail("bounded-idem-bounds");
            }
            let abs_cut = pn.cut(&abs).expect("same space");
            if let Some(prev) = &prev_cut {
                if !prev.leq(&abs_cut).expect("same space") {
                    return fail("bounded-idem-increasing-values");
                }
            }
            if !abs_cut.leq(&abs).expect("same space") {
                return fail("bounded-idem-below-limit");
            }
            prev_cut = Some(abs_cut);
        }
        let stab32 = u32::try_from(stab).expect("small index");
        if !a.bounded_idem(stab32).is_one() {
            return fail("stabilization-index-reaches-one");
        }
        if stab > 1 && a.bounded_idem(stab32 - 1).is_one() {
            return fail("stabilization-index-minimal");
        }
        if a.bounded_idem(stab32).cut(&abs).expect("same space") != abs {
            return fail("bounded-idem-limit-attained");
        }
        Ok(())
    });
    SuiteRun { trials, failure, expected_failure: false, warning: None }
}

fn suite_freudenthal(params: &SuiteParams, seed: u64) -> SuiteRun {
    let cfg = gen_cfg(params);
    let trials = params.trials;
    let failure = run_trials(trials, seed, |_, rng| {
        let atoms = crate::falgebra::AtomSpace::new(rng.random_range(1..=params.atoms.max(1)))
            .expect("positive atom count");
        let beta = gen::rand_nonneg_felem(rng, atoms, &cfg);
        let fail = |what: &str, n: u32| {
            Err(cx(&[
                ("check", what.to_string()),
                ("beta", beta.to_string()),
                ("n", n.to_string()),
            ]))
        };
        let mut prev: Option<(FElem, FElem)> = None;
        for n in 0..=12u32 {
            let lower = beta.freudenthal_lower(n);
            let upper = beta.freudenthal_upper(n);
            let gap = FElem::constant(atoms, pow2(n).recip());
            let low_err = beta.sub(&lower).expect("same space");
            if !(low_err.is_nonneg() && low_err.leq(&gap).expect("same space")) {
                return fail("lower-sandwich", n);
            }
            let up_err = upper.sub(&beta).expect("same space");
            if !(up_err.is_nonneg() && up_err.leq(&gap).expect("same space")) {
                return fail("upper-sandwich", n);
            }
            if let Some((pl, pu)) = &prev {
                if !pl.leq(&lower).expect("same space") {
                    return fail("lower-monotone", n);
                }
                if !upper.leq(pu).expect("same space") {
                    return fail("upper-monotone", n);
                }
            }
            prev = Some((lower, upper));
        }
        Ok(())
    });
    SuiteRun { trials, failure, expected_failure: false, warning: None }
}

/// Exhaustive projection-interval sweep: all idempotents over small shapes.
fn exhaustive_scale_interval(params: &SuiteParams, seed: u64) -> Option<String> {
    let cfg = GenConfig { denom_cap: params.denom_cap.clamp(1, 8), max_numer: 3 };
    for n in 1..=params.atoms.clamp(1, 3) {
        for m in 1..=params.dim_x.clamp(1, 2) {
            for subdiv in 1..=params.subdiv.clamp(1, 4) {
                for transformed in [false, true] {
                    let mut rng = crate::verify::trial_rng(
                        seed,
                        (n * 100 + m * 10 + subdiv as usize) as u64 + u64::from(transformed),
                    );
                    let atoms = crate::falgebra::AtomSpace::new(n).expect("positive");
                    let space = gen::rand_module_space(&mut rng, atoms, m, transformed, &cfg);
                    let samples = if m * n >= 5 { 1 } else { 2 };
                    for _ in 0..samples {
                        let x = gen::rand_cone_elem(&mut rng, &space, &cfg);
                        for p in Idem::enumerate(atoms).expect("small atom count") {
                            match scale_interval(&p, &x, subdiv, params.max_points) {
                                Ok(check) if check.passed => {}
                                Ok(check) => {
                                    return Some(cx(&[
                                        ("check", "scale-interval".to_string()),
                                        ("p", p.to_string()),
                                        ("x", x.to_string()),
                                        ("subdiv", subdiv.to_string()),
                                        (
                                            "violation",
                                            check
                                                .violation
                                                .map(|v| v.to_string())
                                                .unwrap_or_default(),
                                        ),
                                    ]))
                                }
                                Err(e) => {
                                    return Some(cx(&[
                                        ("check", "scale-interval-error".to_string()),
                                        ("error", e.to_string()),
                                    ]))
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    None
}

fn suite_interval_lemmas(params: &SuiteParams, seed: u64) -> SuiteRun {
    // deterministic exhaustive sweep first
    if let Some(message) = exhaustive_scale_interval(params, seed) {
        return SuiteRun {
            trials: params.trials,
            failure: Some(crate::verify::Failure { trial: 0, message }),
            expected_failure: false,
            warning: None,
        };
    }
    let cfg = GenConfig { denom_cap: params.denom_cap.max(1), max_numer: 4 };
    let trials = params.trials;
    let failure = run_trials(trials, seed, |_, rng| {
        let (n, m, _) = rand_dims(rng, params, 6);
        let atoms = crate::falgebra::AtomSpace::new(n).expect("positive atom count");
        let transformed = rng.random_bool(0.5);
        let space = gen::rand_module_space(rng, atoms, m, transformed, &cfg);

        // random projection-interval check at modest subdivision
        let x = gen::rand_cone_elem(rng, &space, &cfg);
        let p = gen::rand_idem(rng, atoms);
        let subdiv = rng.random_range(1..=params.subdiv.clamp(1, 3));
        match scale_interval(&p, &x, subdiv, params.max_points) {
            Ok(check) if check.passed => {}
            Ok(check) => {
                return Err(cx(&[
                    ("check", "scale-interval".to_string()),
                    ("p", p.to_string()),
                    ("x", x.to_string()),
                    ("violation", check.violation.map(|v| v.to_string()).unwrap_or_default()),
                ]))
            }
            Err(e) => {
                return Err(cx(&[
                    ("check", "scale-interval-error".to_string()),
                    ("error", e.to_string()),
                ]))
            }
        }

        // scaled descending chains: build by stacking positive increments
        let len = rng.random_range(2..=4);
        let mut chain = vec![gen::rand_cone_elem(rng, &space, &cfg)];
        for _ in 1..len {
            let bump = gen::rand_cone_elem(rng, &space, &cfg);
            let top = chain[0].add(&bump).expect("same space");
            chain.insert(0, top);
        }
        let lambda = gen::rand_nonneg_felem(rng, atoms, &cfg);
        match scalar_chain_inf(&lambda, &chain) {
            Ok(check) if check.passed => Ok(()),
            Ok(check) => Err(cx(&[
                ("check", "scalar-chain-inf".to_string()),
                ("lambda", lambda.to_string()),
                ("computed", check.computed_inf.to_string()),
                ("expected", check.expected.to_string()),
            ])),
            Err(e) => Err(cx(&[
                ("check", "scalar-chain-inf-error".to_string()),
                ("error", e.to_string()),
            ])),
        }
    });
    SuiteRun { trials, failure, expected_failure: false, warning: None }
}

fn suite_rdp(params: &SuiteParams, seed: u64) -> SuiteRun {
    let cfg = GenConfig { denom_cap: params.denom_cap.clamp(1, 8), max_numer: 2 };
    let trials = params.trials;
    let failure = run_trials(trials, seed, |_, rng| {
        // shapes sized so the exhaustive grids stay small
        let shapes: Vec<(usize, usize)> = [(1, 1), (1, 2), (2, 1), (2, 2), (3, 1), (1, 3)]
            .into_iter()
            .filter(|&(m, n)| m <= params.dim_x.max(1) && n <= params.atoms.max(1))
            .collect();
        let (m, n) = shapes[rng.random_range(0..shapes.len())];
        let subdiv_cap = match m * n {
            0..=2 => params.subdiv.clamp(1, 4),
            3 => params.subdiv.clamp(1, 2),
            _ => 1,
        };
        let subdiv = rng.random_range(1..=subdiv_cap);
        let atoms = crate::falgebra::AtomSpace::new(n).expect("positive atom count");
        let transformed = rng.random_bool(0.5);
        let space = gen::rand_module_space(rng, atoms, m, transformed, &cfg);
        let x = gen::rand_cone_elem(rng, &space, &cfg);
        let y = gen::rand_cone_elem(rng, &space, &cfg);
        match check_rdp(&x, &y, subdiv, params.max_points) {
            Ok(check) if check.passed => Ok(()),
            Ok(check) => Err(cx(&[
                ("check", "rdp".to_string()),
                ("x", x.to_string()),
                ("y", y.to_string()),
                ("subdiv", subdiv.to_string()),
                ("violation", check.violation.map(|v| v.to_string()).unwrap_or_default()),
            ])),
            Err(e) => Err(cx(&[("check", "rdp-error".to_string()), ("error", e.to_string())])),
        }
    });
    SuiteRun { trials, failure, expected_failure: false, warning: None }
}

fn suite_rk_oracle(params: &SuiteParams, seed: u64) -> SuiteRun {
    let cfg = gen_cfg(params);
    let oracle_cfg = OracleConfig { subdiv: params.subdiv, ..OracleConfig::default() };
    let trials = params.trials;
    let failure = run_trials(trials, seed, |trial, rng| {
        // mostly small boxes; every hundredth trial takes a full-size one
        let big = trial % 100 == 99 && params.atoms >= 3 && params.dim_x >= 3;
        let (n, m, k) = if big {
            let n = params.atoms.min(4);
            let m = params.dim_x.min(4);
            let k = rng.random_range(1..=params.dim_y.clamp(1, 2));
            (n, m, k)
        } else {
            rand_dims(rng, params, 10)
        };
        let atoms = crate::falgebra::AtomSpace::new(n).expect("positive atom count");
        let dom_transformed = rng.random_bool(0.5);
        let cod_transformed = rng.random_bool(0.5);
        let dom = gen::rand_module_space(rng, atoms, m, dom_transformed, &cfg);
        let cod = gen::rand_module_space(rng, atoms, k, cod_transformed, &cfg);
        let s = gen::rand_operator(rng, &dom, &cod, &cfg);
        let t = gen::rand_operator(rng, &dom, &cod, &cfg);
        let fail = |what: &str, x: &ModuleElem| {
            Err(cx(&[
                ("check", what.to_string()),
                ("s", s.to_string()),
                ("t", t.to_string()),
                ("x", x.to_string()),
            ]))
        };

        let sup = s.rk_sup(&t).expect("same spaces");
        let inf = s.rk_inf(&t).expect("same spaces");
        let pos = s.rk_pos();
        let neg = s.rk_neg();
        let abs = s.rk_abs();

        for _ in 0..params.samples.max(10) {
            let x = gen::rand_cone_elem(rng, &dom, &cfg);
            let oracle = match oracle_rk_all(&s, &t, &x, &oracle_cfg) {
                Ok(v) => v,
                Err(e) => {
                    return Err(cx(&[
                        ("check", "oracle-error".to_string()),
                        ("error", e.to_string()),
                    ]))
                }
            };
            if sup.apply(&x).expect("domain matches") != oracle.sup {
                return fail("rk-sup", &x);
            }
            if inf.apply(&x).expect("domain matches") != oracle.inf {
                return fail("rk-inf", &x);
            }
            if pos.apply(&x).expect("domain matches") != oracle.pos {
                return fail("rk-pos", &x);
            }
            if neg.apply(&x).expect("domain matches") != oracle.neg {
                return fail("rk-neg", &x);
            }
            if abs.apply(&x).expect("domain matches") != oracle.abs {
                return fail("rk-abs", &x);
            }
        }
        Ok(())
    });
    SuiteRun { trials, failure, expected_failure: false, warning: None }
}

fn suite_rk_lattice_identities(params: &SuiteParams, seed: u64) -> SuiteRun {
    let cfg = gen_cfg(params);
    let trials = params.trials;
    let failure = run_trials(trials, seed, |_, rng| {
        let (n, m, k) = rand_dims(rng, params, 16);
        let atoms = crate::falgebra::AtomSpace::new(n).expect("positive atom count");
        let dom_transformed = rng.random_bool(0.5);
        let cod_transformed = rng.random_bool(0.5);
        let dom = gen::rand_module_space(rng, atoms, m, dom_transformed, &cfg);
        let cod = gen::rand_module_space(rng, atoms, k, cod_transformed, &cfg);
        let s = gen::rand_operator(rng, &dom, &cod, &cfg);
        let t = gen::rand_operator(rng, &dom, &cod, &cfg);
        let r = gen::rand_operator(rng, &dom, &cod, &cfg);
        let fail = |law: &str| {
            Err(cx(&[
                ("law", law.to_string()),
                ("s", s.to_string()),
                ("t", t.to_string()),
            ]))
        };
        let zero = Operator::zero(dom.clone(), cod.clone()).expect("same atoms");

        let sup = s.rk_sup(&t).expect("same spaces");
        let inf = s.rk_inf(&t).expect("same spaces");
        if sup.add(&inf).expect("same spaces") != s.add(&t).expect("same spaces") {
            return fail("sup-plus-inf");
        }
        if s.rk_pos().rk_inf(&s.rk_neg()).expect("same spaces") != zero {
            return fail("parts-disjoint");
        }
        if s.rk_abs() != s.rk_sup(&s.neg()).expect("same spaces") {
            return fail("abs-as-sup");
        }
        if s.rk_pos().sub(&s.rk_neg()).expect("same spaces") != s {
            return fail("jordan");
        }
        if sup != t.rk_sup(&s).expect("same spaces") {
            return fail("sup-commutative");
        }
        let left = s.rk_sup(&t).expect("same").rk_sup(&r).expect("same");
        let right = s.rk_sup(&t.rk_sup(&r).expect("same")).expect("same");
        if left != right {
            return fail("sup-associative");
        }
        // regularity: the decomposition consists of positive operators
        if !(s.rk_pos().is_positive() && s.rk_neg().is_positive()) {
            return fail("regular-decomposition-positive");
        }
        // module-homomorphism law: T(lam*x + y) = lam*T(x) + T(y)
        let x = gen::rand_module_elem(rng, &dom, &cfg);
        let y = gen::rand_module_elem(rng, &dom, &cfg);
        let lam = gen::rand_felem(rng, atoms, &cfg);
        let lhs = s
            .apply(&x.scale_felem(&lam).expect("same atoms").add(&y).expect("same space"))
            .expect("domain matches");
        let rhs = s
            .apply(&x)
            .expect("domain matches")
            .scale_felem(&lam)
            .expect("same atoms")
            .add(&s.apply(&y).expect("domain matches"))
            .expect("same space");
        if lhs != rhs {
            return fail("module-homomorphism-law");
        }
        // application commutes with every band projection
        if n <= 3 {
            for p in Idem::enumerate(atoms).expect("small atom count") {
                let cut_first = s.apply(&x.cut(&p).expect("same atoms")).expect("domain matches");
                let cut_last = s.apply(&x).expect("domain matches").cut(&p).expect("same atoms");
                if cut_first != cut_last {
                    return fail("idempotent-commutation");
                }
            }
        }
        // order bounded: image of a random interval sits in the witness
        let lo = gen::rand_module_elem(rng, &dom, &cfg);
        let hi = lo.add(&gen::rand_cone_elem(rng, &dom, &cfg)).expect("same space");
        if dom.coord_count() <= 12 {
            let iv = crate::pomodule::OrderInterval::new(lo, hi).expect("lo <= hi");
            match s.is_order_bounded(&iv) {
                Ok((inside, _witness)) if inside => {}
                _ => return fail("order-bounded-witness"),
            }
        }
        Ok(())
    });
    SuiteRun { trials, failure, expected_failure: false, warning: None }
}

fn suite_extension(params: &SuiteParams, seed: u64) -> SuiteRun {
    // a named cone map turns the suite into a single deterministic check:
    // maps that cannot be module homomorphisms must be rejected, the rest
    // must extend
    if let Some(map) = &params.cone_map {
        let ext_cfg = ExtensionConfig { seed, ..ExtensionConfig::default() };
        let expect_rejection = matches!(map.rule(), ConeMapRule::Swap);
        let outcome = extend_cone_map(map, &ext_cfg);
        let failure = match (expect_rejection, outcome) {
            (true, Err(Error::NotPHomogeneous { .. })) => None,
            (true, Err(other)) => Some(crate::verify::Failure {
                trial: 0,
                message: cx(&[(
                    "check",
                    format!("expected idempotent-homogeneity rejection, got {other}"),
                )]),
            }),
            (true, Ok(_)) => Some(crate::verify::Failure {
                trial: 0,
                message: cx(&[("check", "swap map was wrongly extended".to_string())]),
            }),
            (false, Ok(_)) => None,
            (false, Err(e)) => Some(crate::verify::Failure {
                trial: 0,
                message: cx(&[("check", format!("extension failed: {e}"))]),
            }),
        };
        return SuiteRun { trials: 1, failure, expected_failure: expect_rejection, warning: None };
    }

    let cfg = gen_cfg(params);
    let trials = params.trials;
    let failure = run_trials(trials, seed, |trial, rng| {
        let (n, m, k) = rand_dims(rng, params, 9);
        let n = n.min(3); // idempotent homogeneity enumerates all masks
        let atoms = crate::falgebra::AtomSpace::new(n).expect("positive atom count");
        let dom_transformed = rng.random_bool(0.5);
        let cod_transformed = rng.random_bool(0.5);
        let dom = gen::rand_module_space(rng, atoms, m, dom_transformed, &cfg);
        let cod = gen::rand_module_space(rng, atoms, k, cod_transformed, &cfg);
        let t = gen::rand_positive_operator(rng, &dom, &cod, &cfg);
        let ext_cfg = ExtensionConfig {
            samples: params.samples.max(4),
            seed: crate::verify::trial_seed(seed, trial),
            decompositions: 10,
            magnitude: 4,
        };
        match extend_cone_map(&ConeMap::restriction(&t), &ext_cfg) {
            Ok(back) if back == t => {}
            Ok(_) => {
                return Err(cx(&[
                    ("check", "restriction-roundtrip".to_string()),
                    ("t", t.to_string()),
                ]))
            }
            Err(e) => {
                return Err(cx(&[
                    ("check", "restriction-rejected".to_string()),
                    ("t", t.to_string()),
                    ("error", e.to_string()),
                ]))
            }
        }

        // band projections extend to the diagonal idempotent operator
        let p = gen::rand_idem(rng, atoms);
        let cut_map = ConeMap::idem_cut(&dom, &p).expect("same atoms");
        match extend_cone_map(&cut_map, &ext_cfg) {
            Ok(ext) if ext == Operator::idem_cut(&dom, &p).expect("same atoms") => Ok(()),
            _ => Err(cx(&[("check", "idem-cut-extension".to_string()), ("p", p.to_string())])),
        }
    });
    SuiteRun { trials, failure, expected_failure: false, warning: None }
}

fn suite_directed_sup(params: &SuiteParams, seed: u64) -> SuiteRun {
    let cfg = gen_cfg(params);
    let trials = params.trials;
    let failure = run_trials(trials, seed, |trial, rng| {
        let (n, m, k) = rand_dims(rng, params, 8);
        let atoms = crate::falgebra::AtomSpace::new(n).expect("positive atom count");
        let dom_transformed = rng.random_bool(0.5);
        let cod_transformed = rng.random_bool(0.5);
        let dom = gen::rand_module_space(rng, atoms, m, dom_transformed, &cfg);
        let cod = gen::rand_module_space(rng, atoms, k, cod_transformed, &cfg);

        // alternate family shapes: subset-closures and increasing chains
        let family = if trial % 2 == 0 {
            let base = rng.random_range(2..=3);
            gen::rand_directed_family(rng, &dom, &cod, base, &cfg)
        } else {
            let len = rng.random_range(2..=4);
            let mut members = Vec::with_capacity(len);
            let mut acc = gen::rand_positive_operator(rng, &dom, &cod, &cfg);
            members.push(acc.clone());
            for _ in 1..len {
                acc = acc
                    .add(&gen::rand_positive_operator(rng, &dom, &cod, &cfg))
                    .expect("same spaces");
                members.push(acc.clone());
            }
            let top = members.last().expect("nonempty").clone();
            DirectedFamily::new(members, Some(top)).expect("chains are directed")
        };
        let sup = directed_sup(&family);
        let fail = |what: &str| Err(cx(&[("check", what.to_string()), ("sup", sup.to_string())]));

        // the result dominates every member and the declared bound
        // dominates the result
        for member in family.members() {
            if !member.leq(&sup).expect("same spaces") {
                return fail("sup-dominates-members");
            }
        }
        if let Some(bound) = family.declared_bound() {
            if !sup.leq(bound).expect("same spaces") {
                return fail("sup-below-declared-bound");
            }
        }

        // pointwise: evaluation at positive points equals the coordinatewise
        // maximum of member evaluations (computed by direct folding)
        for _ in 0..params.samples.max(10) {
            let x = gen::rand_cone_elem(rng, &dom, &cfg);
            let mut folded: Option<Vec<crate::rational::Rat>> = None;
            for member in family.members() {
                let img = member.apply(&x).expect("domain matches").cone_coords();
                folded = Some(match folded {
                    None => img,
                    Some(acc) => acc
                        .into_iter()
                        .zip(img)
                        .map(|(a, b)| if a >= b { a } else { b })
                        .collect(),
                });
            }
            let expected = ModuleElem::from_cone_coords(cod.clone(), folded.expect("nonempty"))
                .expect("coordinate count matches");
            if sup.apply(&x).expect("domain matches") != expected {
                return fail("pointwise-supremum");
            }
        }

        // monotonicity on chains: the sup of a prefix never exceeds the sup
        // of the full family
        if trial % 2 == 1 && family.members().len() > 1 {
            let prefix = DirectedFamily::new(
                family.members()[..family.members().len() - 1].to_vec(),
                None,
            )
            .expect("prefix chains are directed");
            if !directed_sup(&prefix).leq(&sup).expect("same spaces") {
                return fail("monotone-in-family");
            }
        }
        Ok(())
    });
    SuiteRun { trials, failure, expected_failure: false, warning: None }
}

fn suite_archimedean(params: &SuiteParams, seed: u64) -> SuiteRun {
    let cfg = gen_cfg(params);
    let trials = params.trials;
    let failure = run_trials(trials, seed, |_, rng| {
        let (n, m, _) = rand_dims(rng, params, 8);
        let atoms = crate::falgebra::AtomSpace::new(n).expect("positive atom count");
        let transformed = rng.random_bool(0.5);
        let space = gen::rand_module_space(rng, atoms, m, transformed, &cfg);
        for flavor in [ArchFlavor::Real, ArchFlavor::Idempotent, ArchFlavor::Algebra] {
            for mode in [ArchMode::Full, ArchMode::Almost] {
                arch_trial(rng, &space, flavor, mode, &cfg)?;
            }
        }
        // splitting identity
        let a = gen::rand_felem(rng, atoms, &cfg);
        let r = FElem::constant(atoms, gen::rand_pos_rat(rng, &cfg));
        let split = a
            .inf(&r)
            .and_then(|low| a.sub(&r).map(|d| (low, d.pos_part())))
            .expect("same space");
        if split.0.add(&split.1).expect("same space") != a {
            return Err(cx(&[
                ("check", "splitting-identity".to_string()),
                ("a", a.to_string()),
                ("r", format_rat(r.get(0))),
            ]));
        }
        Ok(())
    });
    SuiteRun { trials, failure, expected_failure: false, warning: None }
}

fn suite_dual(params: &SuiteParams, seed: u64) -> SuiteRun {
    let cfg = gen_cfg(params);
    let oracle_cfg = OracleConfig::default();
    let trials = params.trials;
    let failure = run_trials(trials, seed, |_, rng| {
        let (n, m, _) = rand_dims(rng, params, 10);
        let atoms = crate::falgebra::AtomSpace::new(n).expect("positive atom count");
        let transformed = rng.random_bool(0.5);
        let dom = gen::rand_module_space(rng, atoms, m, transformed, &cfg);
        let scalars = ModuleSpace::standard(atoms, 1).expect("positive dimension");
        let phi = gen::rand_operator(rng, &dom, &scalars, &cfg);
        let psi = gen::rand_operator(rng, &dom, &scalars, &cfg);
        let fail = |what: &str| {
            Err(cx(&[
                ("check", what.to_string()),
                ("phi", phi.to_string()),
                ("psi", psi.to_string()),
            ]))
        };

        let sup = dual_sup(&phi, &psi).expect("scalar codomain");
        let inf = dual_inf(&phi, &psi).expect("scalar codomain");
        if sup.add(&inf).expect("same spaces") != phi.add(&psi).expect("same spaces") {
            return fail("dual-sup-plus-inf");
        }
        if dual_abs(&phi).expect("scalar codomain") != phi.rk_sup(&phi.neg()).expect("same") {
            return fail("dual-abs");
        }

        // functional evaluations against the vertex oracle
        for _ in 0..params.samples.clamp(2, 5) {
            let x = gen::rand_cone_elem(rng, &dom, &cfg);
            let expected = oracle_rk_sup(&phi, &psi, &x, &oracle_cfg).expect("small instance");
            if sup.apply(&x).expect("domain matches") != expected {
                return fail("dual-sup-oracle");
            }
        }

        // positive functionals: modulus fixes them, and phi inf (-phi) <= 0
        let pos = gen::rand_positive_operator(rng, &dom, &scalars, &cfg);
        if dual_abs(&pos).expect("scalar codomain") != pos {
            return fail("positive-modulus-fixed");
        }
        let zero = Operator::zero(dom.clone(), scalars.clone()).expect("same atoms");
        if !dual_inf(&pos, &pos.neg())
            .expect("scalar codomain")
            .leq(&zero)
            .expect("same spaces")
        {
            return fail("positive-meet-negative");
        }
        Ok(())
    });
    SuiteRun { trials, failure, expected_failure: false, warning: None }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::run_suite;

    fn quick_params() -> SuiteParams {
        SuiteParams { trials: 25, samples: 4, ..SuiteParams::default() }
    }

    #[test]
    fn all_suites_pass_on_a_small_budget() {
        for name in SUITES {
            let report = run_suite(name, &quick_params(), 1234).unwrap();
            assert!(report.passed, "suite {name} failed: {:?}", report.counterexample);
            assert!(!report.expected_failure);
        }
    }

    #[test]
    fn extension_suite_flags_the_swap_rejection_as_expected() {
        let space = ModuleSpace::standard(crate::falgebra::AtomSpace::new(2).unwrap(), 1).unwrap();
        let params = SuiteParams {
            cone_map: Some(ConeMap::swap(&space).unwrap()),
            trials: 1,
            ..SuiteParams::default()
        };
        let report = run_suite("extension", &params, 42).unwrap();
        assert!(report.passed);
        assert!(report.expected_failure);
        assert_eq!(report.trials, 1);
    }

    #[test]
    fn extension_suite_accepts_named_linear_rules() {
        let space = ModuleSpace::standard(crate::falgebra::AtomSpace::new(2).unwrap(), 2).unwrap();
        let p = Idem::new(crate::falgebra::AtomSpace::new(2).unwrap(), vec![true, false]).unwrap();
        let params = SuiteParams {
            cone_map: Some(ConeMap::idem_cut(&space, &p).unwrap()),
            trials: 1,
            ..SuiteParams::default()
        };
        let report = run_suite("extension", &params, 42).unwrap();
        assert!(report.passed);
        assert!(!report.expected_failure);
    }

    #[test]
    fn reports_are_deterministic_modulo_elapsed() {
        for name in ["falgebra-axioms", "rk-oracle", "support-calculus"] {
            let a = run_suite(name, &quick_params(), 77).unwrap();
            let b = run_suite(name, &quick_params(), 77).unwrap();
            assert!(a.same_modulo_elapsed(&b), "suite {name} not deterministic");
        }
    }
}
