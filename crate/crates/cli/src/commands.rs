//! Command implementations behind the CLI surface.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rklat_core::error::{Error, Result};
use rklat_core::falgebra::{AtomSpace, FElem, Idem};
use rklat_core::gen::{self, GenConfig};
use rklat_core::operators::{dual_abs, extend_cone_map, ConeMap, ExtensionConfig, Operator};
use rklat_core::pomodule::ModuleSpace;
use rklat_core::rational::parse_rat;
use rklat_core::verify::{run_suite, Report, SuiteParams};

use crate::instance::{
    module_to_dto, operator_to_dto, rats_to_strings, ConeMapDto, Instance, InstanceFile,
    SampleDto, INSTANCE_VERSION,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Json,
}

/// Builds a deterministic random instance file. The same arguments always
/// produce the same bytes.
pub fn build_instance(
    atoms: usize,
    dim_x: usize,
    dim_y: usize,
    denom_cap: u32,
    seed: u64,
) -> Result<InstanceFile> {
    if atoms == 0 || dim_x == 0 || dim_y == 0 {
        return Err(Error::InvalidInput("atoms and dimensions must be positive".into()));
    }
    let space = AtomSpace::new(atoms)?;
    let cfg = GenConfig::with_denom_cap(denom_cap);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let scalars = ModuleSpace::standard(space, 1)?;
    let x = ModuleSpace::standard(space, dim_x)?;
    let y = ModuleSpace::standard(space, dim_y)?;
    let xt = gen::rand_module_space(&mut rng, space, dim_x, true, &cfg);
    let yt = gen::rand_module_space(&mut rng, space, dim_y, true, &cfg);

    let s_op = gen::rand_operator(&mut rng, &x, &y, &cfg);
    let t_op = gen::rand_operator(&mut rng, &x, &y, &cfg);
    let p1 = gen::rand_positive_operator(&mut rng, &x, &y, &cfg);
    let p2 = gen::rand_positive_operator_shared_denom(&mut rng, &x, &y, denom_cap, 8);
    let st = gen::rand_operator(&mut rng, &xt, &yt, &cfg);
    let pt = gen::clear_denominators(&gen::rand_positive_operator(&mut rng, &xt, &yt, &cfg));
    let f1 = gen::rand_operator(&mut rng, &x, &scalars, &cfg);
    let f2 = gen::rand_operator(&mut rng, &x, &scalars, &cfg);
    let ops_dto = vec![
        operator_to_dto("S", &s_op, "X", "Y"),
        operator_to_dto("T", &t_op, "X", "Y"),
        operator_to_dto("P1", &p1, "X", "Y"),
        operator_to_dto("P2", &p2, "X", "Y"),
        operator_to_dto("ST", &st, "XT", "YT"),
        operator_to_dto("PT", &pt, "XT", "YT"),
        operator_to_dto("F1", &f1, "X", "A"),
        operator_to_dto("F2", &f2, "X", "A"),
    ];

    let mut cone_maps = vec![ConeMapDto {
        id: "restr-P1".into(),
        rule: "restriction".into(),
        operator: Some("P1".into()),
        module: None,
        idempotent: None,
        domain: None,
        codomain: None,
        samples: None,
    }];
    let cut = gen::rand_idem(&mut rng, space);
    cone_maps.push(ConeMapDto {
        id: "cut-X".into(),
        rule: "idempotent-cut".into(),
        operator: None,
        module: Some("X".into()),
        idempotent: Some(cut.mask().iter().map(|&b| u8::from(b)).collect()),
        domain: None,
        codomain: None,
        samples: None,
    });
    if atoms == 2 {
        cone_maps.push(ConeMapDto {
            id: "swap".into(),
            rule: "swap".into(),
            operator: None,
            module: Some("A".into()),
            idempotent: None,
            domain: None,
            codomain: None,
            samples: None,
        });
    }
    // tabulate P2 on the cone generators plus a few integer cone points,
    // including pairwise sums so the validator has additivity probes;
    // integer points keep every tabulated image within the denominator cap
    let int_cfg = GenConfig { denom_cap: 1, max_numer: 3 };
    let mut points: Vec<_> = rklat_core::operators::cone_generators(&x);
    for _ in 0..3 {
        points.push(gen::rand_cone_elem(&mut rng, &x, &int_cfg));
    }
    let extra: Vec<_> = points
        .windows(2)
        .map(|w| w[0].add(&w[1]).expect("same space"))
        .collect();
    points.extend(extra);
    points.push(rklat_core::pomodule::ModuleElem::zero(x.clone()));
    let samples = points
        .iter()
        .map(|p| {
            Ok(SampleDto {
                x: rats_to_strings(p.coords()),
                fx: rats_to_strings(p2.apply(p)?.coords()),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    cone_maps.push(ConeMapDto {
        id: "tab-P2".into(),
        rule: "tabulated".into(),
        operator: None,
        module: None,
        idempotent: None,
        domain: Some("X".into()),
        codomain: Some("Y".into()),
        samples: Some(samples),
    });

    Ok(InstanceFile {
        version: INSTANCE_VERSION,
        atom_space: crate::instance::AtomSpaceDto { n_atoms: atoms },
        modules: vec![
            module_to_dto("A", &scalars),
            module_to_dto("X", &x),
            module_to_dto("Y", &y),
            module_to_dto("XT", &xt),
            module_to_dto("YT", &yt),
        ],
        operators: ops_dto,
        cone_maps,
        seeds: vec![seed],
    })
}

/// Renders an instance file as canonical JSON (stable field order, trailing
/// newline).
pub fn instance_json(file: &InstanceFile) -> String {
    let mut text = serde_json::to_string_pretty(file).expect("instance serializes");
    text.push('\n');
    text
}

/// Suite parameters assembled from an instance plus the command line.
pub fn params_from_instance(
    instance: &Instance,
    trials: u64,
    subdiv: u32,
    denom_cap: u32,
    samples: usize,
    cone_map: Option<&str>,
) -> Result<SuiteParams> {
    let dim_of = |id: &str| instance.module(id).map(ModuleSpace::m_dim);
    let fallback = instance.modules.iter().map(|(_, m)| m.m_dim()).max().unwrap_or(1);
    let cone_map = match cone_map {
        Some(key) => Some(instance.cone_map(key)?.clone()),
        None => None,
    };
    Ok(SuiteParams {
        atoms: instance.atoms.n_atoms(),
        dim_x: dim_of("X").unwrap_or(fallback),
        dim_y: dim_of("Y").unwrap_or(fallback),
        denom_cap,
        trials,
        subdiv,
        samples,
        cone_map,
        ..SuiteParams::default()
    })
}

pub fn run_check(
    instance: &Instance,
    suite: &str,
    trials: u64,
    seed: u64,
    subdiv: u32,
    denom_cap: u32,
    cone_map: Option<&str>,
) -> Result<Report> {
    let params = params_from_instance(instance, trials, subdiv, denom_cap, 10, cone_map)?;
    run_suite(suite, &params, seed)
}

/// What a compute invocation produced, ready for formatting.
pub enum Computed {
    Operator { op: Operator, domain_id: String, codomain_id: String },
    Scalar(FElem),
    Idempotent(Idem),
}

impl Computed {
    pub fn render(&self, format: OutputFormat) -> String {
        match (self, format) {
            (Computed::Operator { op, domain_id, codomain_id }, OutputFormat::Json) => {
                serde_json::to_string_pretty(&operator_to_dto("result", op, domain_id, codomain_id))
                    .expect("operator serializes")
            }
            (Computed::Operator { op, .. }, OutputFormat::Text) => op.to_string(),
            (Computed::Scalar(v), OutputFormat::Json) => {
                serde_json::to_string(&rats_to_strings(v.values())).expect("values serialize")
            }
            (Computed::Scalar(v), OutputFormat::Text) => rats_to_strings(v.values()).join(", "),
            (Computed::Idempotent(p), OutputFormat::Json) => {
                let bits: Vec<u8> = p.mask().iter().map(|&b| u8::from(b)).collect();
                serde_json::to_string(&bits).expect("bits serialize")
            }
            (Computed::Idempotent(p), OutputFormat::Text) => p.to_string(),
        }
    }
}

/// Arguments for `compute`, already flag-parsed.
pub struct ComputeArgs<'a> {
    pub what: &'a str,
    pub op: Option<&'a str>,
    pub op2: Option<&'a str>,
    pub value: Option<&'a str>,
    pub value2: Option<&'a str>,
    pub n: u32,
    pub upper: bool,
    pub samples: usize,
    pub seed: u64,
}

fn parse_felem(instance: &Instance, text: &str) -> Result<FElem> {
    let values = text
        .split(',')
        .map(|s| parse_rat(s.trim()))
        .collect::<Result<Vec<_>>>()?;
    if values.len() != instance.atoms.n_atoms() {
        return Err(Error::InvalidInput(format!(
            "value has {} atoms but the instance has {}",
            values.len(),
            instance.atoms.n_atoms()
        )));
    }
    FElem::new(instance.atoms, values)
}

fn operator_ids(instance: &Instance, op: &Operator) -> (String, String) {
    let find = |space: &ModuleSpace| {
        instance
            .modules
            .iter()
            .find(|(_, m)| m == space)
            .map(|(id, _)| id.clone())
            .unwrap_or_else(|| "?".to_string())
    };
    (find(op.domain()), find(op.codomain()))
}

pub fn run_compute(instance: &Instance, args: &ComputeArgs<'_>) -> Result<Computed> {
    let need_op = |key: Option<&str>, flag: &str| {
        key.ok_or_else(|| Error::InvalidInput(format!("--{flag} is required for this computation")))
            .and_then(|id| instance.operator(id))
    };
    let need_value = |key: Option<&str>, flag: &str| {
        key.ok_or_else(|| Error::InvalidInput(format!("--{flag} is required for this computation")))
            .and_then(|text| parse_felem(instance, text))
    };
    match args.what {
        "sup" | "inf" => {
            let s = need_op(args.op, "op")?;
            let t = need_op(args.op2, "op2")?;
            let op = if args.what == "sup" { s.rk_sup(t)? } else { s.rk_inf(t)? };
            let (domain_id, codomain_id) = operator_ids(instance, &op);
            Ok(Computed::Operator { op, domain_id, codomain_id })
        }
        "pos" | "neg" | "abs" => {
            let s = need_op(args.op, "op")?;
            let op = match args.what {
                "pos" => s.rk_pos(),
                "neg" => s.rk_neg(),
                _ => {
                    if s.codomain().m_dim() == 1 && s.codomain().cone_transform().is_none() {
                        dual_abs(s)?
                    } else {
                        s.rk_abs()
                    }
                }
            };
            let (domain_id, codomain_id) = operator_ids(instance, &op);
            Ok(Computed::Operator { op, domain_id, codomain_id })
        }
        "extend" => {
            let key = args
                .op
                .ok_or_else(|| Error::InvalidInput("--op names the cone map to extend".into()))?;
            let map: &ConeMap = instance.cone_map(key)?;
            let cfg = ExtensionConfig {
                samples: args.samples,
                seed: args.seed,
                ..ExtensionConfig::default()
            };
            let op = extend_cone_map(map, &cfg)?;
            let (domain_id, codomain_id) = operator_ids(instance, &op);
            Ok(Computed::Operator { op, domain_id, codomain_id })
        }
        "freudenthal" => {
            let b = need_value(args.value, "value")?;
            let out = if args.upper {
                b.freudenthal_upper(args.n)
            } else {
                b.freudenthal_lower(args.n)
            };
            Ok(Computed::Scalar(out))
        }
        "support" => Ok(Computed::Idempotent(need_value(args.value, "value")?.support())),
        "cmp-idem" => {
            let a = need_value(args.value, "value")?;
            let b = need_value(args.value2, "value2")?;
            Ok(Computed::Idempotent(a.cmp_idem(&b)?))
        }
        other => Err(Error::InvalidInput(format!("unknown computation \"{other}\""))),
    }
}

/// Renders a report in the chosen format.
pub fn render_report(report: &Report, format: OutputFormat) -> String {
    match format {
        OutputFormat::Text => report.to_string(),
        OutputFormat::Json => report.to_json(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance;

    #[test]
    fn generated_instances_are_deterministic_and_capped() {
        let a = instance_json(&build_instance(2, 3, 2, 16, 7).unwrap());
        let b = instance_json(&build_instance(2, 3, 2, 16, 7).unwrap());
        assert_eq!(a, b);
        let c = instance_json(&build_instance(2, 3, 2, 16, 8).unwrap());
        assert_ne!(a, c);

        // every rational anywhere in the emitted file respects the cap
        let parsed: InstanceFile = serde_json::from_str(&a).unwrap();
        let check = |s: &str| {
            let r = parse_rat(s).unwrap();
            assert!(*r.denom() <= 16.into(), "denominator of {s} exceeds 16");
        };
        for op in &parsed.operators {
            for block in &op.blocks {
                block.iter().for_each(|s| check(s));
            }
        }
        for m in &parsed.modules {
            if let Some(t) = &m.cone_transform {
                for a in t {
                    a.diagonal.iter().for_each(|s| check(s));
                }
            }
        }
        for cm in &parsed.cone_maps {
            for sample in cm.samples.iter().flatten() {
                sample.x.iter().for_each(|s| check(s));
                sample.fx.iter().for_each(|s| check(s));
            }
        }
    }

    #[test]
    fn generated_instances_resolve_and_round_trip() {
        let file = build_instance(2, 2, 2, 8, 21).unwrap();
        let text = instance_json(&file);
        let inst = instance::parse(&text).unwrap();
        assert_eq!(inst.operators.len(), 8);
        assert!(inst.cone_map("swap").is_ok());
        assert!(inst.cone_map("tab-P2").is_ok());

        // the parsed DTO re-serializes to the same bytes
        let reparsed: InstanceFile = serde_json::from_str(&text).unwrap();
        assert_eq!(instance_json(&reparsed), text);
    }

    #[test]
    fn compute_examples() {
        // a tiny instance with the row functional (1, -2) on one atom
        let text = r#"{
            "version": 1,
            "atom_space": { "n_atoms": 1 },
            "modules": [
                { "id": "A", "m_dim": 1, "cone_transform": null },
                { "id": "X", "m_dim": 2, "cone_transform": null }
            ],
            "operators": [
                { "id": "S", "domain": "X", "codomain": "A", "blocks": [["1", "-2"]] }
            ],
            "cone_maps": [],
            "seeds": [1]
        }"#;
        let inst = instance::parse(text).unwrap();
        let args = ComputeArgs {
            what: "abs",
            op: Some("S"),
            op2: None,
            value: None,
            value2: None,
            n: 0,
            upper: false,
            samples: 8,
            seed: 0,
        };
        match run_compute(&inst, &args).unwrap() {
            Computed::Operator { op, .. } => {
                assert_eq!(op.to_string(), "[[[1, 2]]]");
            }
            _ => panic!("expected an operator"),
        }

        // freudenthal lower of 3/10 at level 2 is 1/4
        let args = ComputeArgs {
            what: "freudenthal",
            op: None,
            op2: None,
            value: Some("3/10"),
            value2: None,
            n: 2,
            upper: false,
            samples: 8,
            seed: 0,
        };
        match run_compute(&inst, &args).unwrap() {
            out @ Computed::Scalar(_) => assert_eq!(out.render(OutputFormat::Text), "1/4"),
            _ => panic!("expected a scalar"),
        }
    }
}
