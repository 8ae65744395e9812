//! Instance files: the JSON interchange format.
//!
//! Rationals travel as canonical `"p/q"` strings so exactness survives
//! serialization. Module elements are flat row-major coordinate arrays with
//! explicit dimensions; operators carry one flat row-major matrix per atom;
//! idempotents are arrays of 0/1 integers; cone transforms are per-atom
//! permutation/diagonal pairs. All cross-references are resolved and
//! validated at load time.

use serde::{Deserialize, Serialize};

use rklat_core::error::{Error, Result};
use rklat_core::falgebra::{AtomSpace, Idem};
use rklat_core::operators::{ConeMap, ConeMapRule, Operator};
use rklat_core::pomodule::{AtomMonomial, ModuleElem, ModuleSpace, MonomialTransform};
use rklat_core::rational::{format_rat, parse_rat, Rat};

pub const INSTANCE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub version: u32,
    pub atom_space: AtomSpaceDto,
    pub modules: Vec<ModuleDto>,
    pub operators: Vec<OperatorDto>,
    pub cone_maps: Vec<ConeMapDto>,
    pub seeds: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtomSpaceDto {
    pub n_atoms: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleDto {
    pub id: String,
    pub m_dim: usize,
    pub cone_transform: Option<Vec<AtomMonomialDto>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtomMonomialDto {
    pub permutation: Vec<usize>,
    pub diagonal: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorDto {
    pub id: String,
    pub domain: String,
    pub codomain: String,
    /// One flat row-major codomain-by-domain matrix per atom.
    pub blocks: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeMapDto {
    pub id: String,
    /// "restriction", "swap", "idempotent-cut", or "tabulated".
    pub rule: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub operator: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub module: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub idempotent: Option<Vec<u8>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub codomain: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<SampleDto>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleDto {
    /// Row-major coordinates in the domain module.
    pub x: Vec<String>,
    /// Row-major coordinates in the codomain module.
    pub fx: Vec<String>,
}

/// A fully resolved instance.
#[derive(Debug, Clone)]
pub struct Instance {
    pub atoms: AtomSpace,
    pub modules: Vec<(String, ModuleSpace)>,
    pub operators: Vec<(String, Operator)>,
    pub cone_maps: Vec<(String, ConeMap)>,
    pub seeds: Vec<u64>,
}

impl Instance {
    pub fn module(&self, id: &str) -> Result<&ModuleSpace> {
        self.modules
            .iter()
            .find(|(mid, _)| mid == id)
            .map(|(_, m)| m)
            .ok_or_else(|| Error::InvalidInput(format!("unknown module id \"{id}\"")))
    }

    pub fn operator(&self, id: &str) -> Result<&Operator> {
        self.operators
            .iter()
            .find(|(oid, _)| oid == id)
            .map(|(_, o)| o)
            .ok_or_else(|| Error::InvalidInput(format!("unknown operator id \"{id}\"")))
    }

    /// Looks a cone map up by id, falling back to its rule name.
    pub fn cone_map(&self, key: &str) -> Result<&ConeMap> {
        if let Some((_, m)) = self.cone_maps.iter().find(|(id, _)| id == key) {
            return Ok(m);
        }
        let by_rule = |rule: &str, map: &ConeMapRule| {
            matches!(
                (rule, map),
                ("restriction", ConeMapRule::Restriction(_))
                    | ("swap", ConeMapRule::Swap)
                    | ("idempotent-cut", ConeMapRule::IdemCut(_))
                    | ("tabulated", ConeMapRule::Tabulated(_))
            )
        };
        self.cone_maps
            .iter()
            .find(|(_, m)| by_rule(key, m.rule()))
            .map(|(_, m)| m)
            .ok_or_else(|| Error::InvalidInput(format!("unknown cone map \"{key}\"")))
    }
}

fn parse_rats(strings: &[String]) -> Result<Vec<Rat>> {
    strings.iter().map(|s| parse_rat(s)).collect()
}

pub fn rats_to_strings(rats: &[Rat]) -> Vec<String> {
    rats.iter().map(format_rat).collect()
}

fn resolve_module(atoms: AtomSpace, dto: &ModuleDto) -> Result<ModuleSpace> {
    match &dto.cone_transform {
        None => ModuleSpace::standard(atoms, dto.m_dim),
        Some(per_atom) => {
            let transforms = per_atom
                .iter()
                .map(|a| AtomMonomial::new(a.permutation.clone(), parse_rats(&a.diagonal)?))
                .collect::<Result<Vec<_>>>()?;
            ModuleSpace::with_cone(atoms, dto.m_dim, MonomialTransform::new(transforms)?)
        }
    }
}

fn resolve_idem(atoms: AtomSpace, bits: &[u8]) -> Result<Idem> {
    let mask = bits
        .iter()
        .map(|&b| match b {
            0 => Ok(false),
            1 => Ok(true),
            other => Err(Error::InvalidInput(format!(
                "idempotent entries must be 0 or 1, got {other}"
            ))),
        })
        .collect::<Result<Vec<bool>>>()?;
    Idem::new(atoms, mask)
}

fn resolve_cone_map(instance: &Instance, dto: &ConeMapDto) -> Result<ConeMap> {
    let need = |field: &Option<String>, name: &str| {
        field.clone().ok_or_else(|| {
            Error::InvalidInput(format!("cone map \"{}\" needs field \"{name}\"", dto.id))
        })
    };
    match dto.rule.as_str() {
        "restriction" => {
            let op = instance.operator(&need(&dto.operator, "operator")?)?;
            Ok(ConeMap::restriction(op))
        }
        "swap" => {
            let space = instance.module(&need(&dto.module, "module")?)?;
            ConeMap::swap(space)
        }
        "idempotent-cut" => {
            let space = instance.module(&need(&dto.module, "module")?)?;
            let bits = dto.idempotent.as_ref().ok_or_else(|| {
                Error::InvalidInput(format!("cone map \"{}\" needs field \"idempotent\"", dto.id))
            })?;
            let p = resolve_idem(instance.atoms, bits)?;
            ConeMap::idem_cut(space, &p)
        }
        "tabulated" => {
            let domain = instance.module(&need(&dto.domain, "domain")?)?.clone();
            let codomain = instance.module(&need(&dto.codomain, "codomain")?)?.clone();
            let samples = dto
                .samples
                .as_ref()
                .ok_or_else(|| {
                    Error::InvalidInput(format!("cone map \"{}\" needs field \"samples\"", dto.id))
                })?
                .iter()
                .map(|s| {
                    let x = ModuleElem::new(domain.clone(), parse_rats(&s.x)?)?;
                    let fx = ModuleElem::new(codomain.clone(), parse_rats(&s.fx)?)?;
                    Ok((x, fx))
                })
                .collect::<Result<Vec<_>>>()?;
            ConeMap::tabulated(domain, codomain, samples)
        }
        other => Err(Error::InvalidInput(format!(
            "cone map \"{}\" has unknown rule \"{other}\"",
            dto.id
        ))),
    }
}

fn check_unique_ids<'a>(kind: &str, ids: impl Iterator<Item = &'a String>) -> Result<()> {
    let mut seen = std::collections::BTreeSet::new();
    for id in ids {
        if !seen.insert(id) {
            return Err(Error::InvalidInput(format!("duplicate {kind} id \"{id}\"")));
        }
    }
    Ok(())
}

/// Resolves and validates an instance file.
pub fn resolve(file: &InstanceFile) -> Result<Instance> {
    if file.version != INSTANCE_VERSION {
        return Err(Error::InvalidInput(format!(
            "unsupported instance version {} (expected {INSTANCE_VERSION})",
            file.version
        )));
    }
    let atoms = AtomSpace::new(file.atom_space.n_atoms)?;
    check_unique_ids("module", file.modules.iter().map(|m| &m.id))?;
    check_unique_ids("operator", file.operators.iter().map(|o| &o.id))?;
    check_unique_ids("cone map", file.cone_maps.iter().map(|c| &c.id))?;

    let mut instance = Instance {
        atoms,
        modules: Vec::new(),
        operators: Vec::new(),
        cone_maps: Vec::new(),
        seeds: file.seeds.clone(),
    };
    for m in &file.modules {
        let space = resolve_module(atoms, m)?;
        instance.modules.push((m.id.clone(), space));
    }
    for o in &file.operators {
        let domain = instance.module(&o.domain)?.clone();
        let codomain = instance.module(&o.codomain)?.clone();
        let blocks = o
            .blocks
            .iter()
            .map(|b| parse_rats(b))
            .collect::<Result<Vec<_>>>()?;
        let op = Operator::new(domain, codomain, blocks)?;
        instance.operators.push((o.id.clone(), op));
    }
    for c in &file.cone_maps {
        let map = resolve_cone_map(&instance, c)?;
        instance.cone_maps.push((c.id.clone(), map));
    }
    Ok(instance)
}

/// Parses instance JSON text. Syntax errors carry line/column locations.
pub fn parse(text: &str) -> Result<Instance> {
    let file: InstanceFile = serde_json::from_str(text)
        .map_err(|e| Error::InvalidInput(format!("instance parse error: {e}")))?;
    resolve(&file)
}

pub fn module_to_dto(id: &str, space: &ModuleSpace) -> ModuleDto {
    ModuleDto {
        id: id.to_string(),
        m_dim: space.m_dim(),
        cone_transform: space.cone_transform().map(|t| {
            t.per_atom()
                .iter()
                .map(|a| AtomMonomialDto {
                    permutation: a.perm().to_vec(),
                    diagonal: rats_to_strings(a.diag()),
                })
                .collect()
        }),
    }
}

pub fn operator_to_dto(id: &str, op: &Operator, domain_id: &str, codomain_id: &str) -> OperatorDto {
    OperatorDto {
        id: id.to_string(),
        domain: domain_id.to_string(),
        codomain: codomain_id.to_string(),
        blocks: op.blocks().iter().map(|b| rats_to_strings(b)).collect(),
    }
}
