//! Independent brute-force oracles for the operator lattice operations.
//!
//! For `x >= 0` each lattice value is an extremum of an affine candidate
//! over a box of cone coordinates, and for an affine function that extremum
//! is attained coordinatewise at box vertices. The oracle therefore visits
//! every vertex of the box and folds the candidate images coordinatewise in
//! codomain cone coordinates.
//!
//! Two traversals are provided. The vertex sweep walks all vertices in
//! reflected-Gray-code order so each step flips a single coordinate and
//! updates the candidate by one precomputed exact increment; this is still a
//! full enumeration of all vertices. The grid sweep instead recomputes the
//! candidate from scratch at every point of a parametric grid (which
//! contains the vertices). Neither route touches the conjugated-block
//! arithmetic that the closed-form operator operations are built from.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::operators::Operator;
use crate::pomodule::{ModuleElem, ModuleSpace, OrderInterval, VERTEX_COORD_CAP};
use crate::rational::Rat;

/// Oracle traversal configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    /// Grid denominator for the grid traversal.
    pub subdiv: u32,
    /// Use the vertex sweep (true) or the parametric grid (false).
    pub use_vertices: bool,
    /// Size guard for grid enumeration.
    pub max_points: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { subdiv: 4, use_vertices: true, max_points: 1 << 16 }
    }
}

/// All five oracle values at one evaluation point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RkOracleEval {
    pub sup: ModuleElem,
    pub inf: ModuleElem,
    pub pos: ModuleElem,
    pub neg: ModuleElem,
    pub abs: ModuleElem,
}

struct Sweep<'a> {
    codomain: &'a ModuleSpace,
    /// Candidate value in codomain cone coordinates.
    candidate: Vec<Rat>,
    best_max: Vec<Rat>,
    best_min: Vec<Rat>,
}

impl<'a> Sweep<'a> {
    fn new(codomain: &'a ModuleSpace, base: Vec<Rat>) -> Self {
        Sweep { codomain, candidate: base.clone(), best_max: base.clone(), best_min: base }
    }

    /// Adds `sign * step` at the step's atom and refreshes the extrema at
    /// the touched positions. Positions not touched keep their previous
    /// candidate value, which an earlier step already folded in.
    fn apply_step(&mut self, step: &StepDelta, sign: bool) {
        let n = self.codomain.atoms().n_atoms();
        for (r, v) in step.vals.iter().enumerate() {
            let pos = r * n + step.atom;
            if sign {
                self.candidate[pos] += v;
            } else {
                self.candidate[pos] -= v;
            }
            if self.candidate[pos] > self.best_max[pos] {
                self.best_max[pos] = self.candidate[pos].clone();
            }
            if self.candidate[pos] < self.best_min[pos] {
                self.best_min[pos] = self.candidate[pos].clone();
            }
        }
    }
}

/// Per-coordinate candidate increment: the cone-coordinate image change at
/// one atom when that coordinate flips across the box.
struct StepDelta {
    atom: usize,
    /// k values, one per codomain coordinate at `atom`.
    vals: Vec<Rat>,
}

/// Extracts the atom-local cone coordinates of an element supported on a
/// single atom.
fn atom_slice(e: &ModuleElem, atom: usize) -> Vec<Rat> {
    let cone = e.cone_coords();
    let n = e.space().atoms().n_atoms();
    let k = e.space().m_dim();
    (0..k).map(|r| cone[r * n + atom].clone()).collect()
}

/// Walks all 2^h vertices of the box spanned by `steps` in Gray-code order,
/// folding candidate extrema, starting from the `base` candidate (the
/// all-low vertex image).
fn gray_sweep(codomain: &ModuleSpace, base: Vec<Rat>, steps: &[StepDelta]) -> Result<(Vec<Rat>, Vec<Rat>)> {
    let h = steps.len();
    if h > VERTEX_COORD_CAP {
        return Err(Error::TooManyPoints {
            requested: 1u128 << h,
            cap: 1 << VERTEX_COORD_CAP,
        });
    }
    let mut sweep = Sweep::new(codomain, base);
    let mut state = vec![false; h];
    for t in 1u64..1 << h {
        let bit = t.trailing_zeros() as usize;
        state[bit] = !state[bit];
        sweep.apply_step(&steps[bit], state[bit]);
    }
    Ok((sweep.best_max, sweep.best_min))
}

/// The single-coordinate cone points `x'_c * e_c` spanning the box `[0, x]`,
/// skipping degenerate coordinates.
fn box_spans(x: &ModuleElem) -> Vec<(usize, ModuleElem)> {
    let space = x.space();
    let cone = x.cone_coords();
    let n = space.atoms().n_atoms();
    cone.iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(c, v)| {
            let mut coords = vec![Rat::zero(); space.coord_count()];
            coords[c] = v.clone();
            let elem = ModuleElem::from_cone_coords(space.clone(), coords)
                .expect("coordinate count matches");
            (c % n, elem)
        })
        .collect()
}

fn ensure_oracle_inputs(s: &Operator, x: &ModuleElem) -> Result<()> {
    s.domain().ensure_same(x.space())?;
    if !x.is_in_cone() {
        return Err(Error::InvalidInput("oracle evaluation point must be >= 0".into()));
    }
    Ok(())
}

/// Extrema of `S(y) + T(x - y)` over the vertices of `[0, x]`, in codomain
/// cone coordinates.
fn sweep_pair(s: &Operator, t: &Operator, x: &ModuleElem) -> Result<(Vec<Rat>, Vec<Rat>)> {
    // base vertex y = 0: candidate T(x)
    let base = t.apply(x)?.cone_coords();
    let steps = box_spans(x)
        .into_iter()
        .map(|(atom, g)| {
            let diff = s.apply(&g)?.sub(&t.apply(&g)?)?;
            Ok(StepDelta { atom, vals: atom_slice(&diff, atom) })
        })
        .collect::<Result<Vec<_>>>()?;
    gray_sweep(s.codomain(), base, &steps)
}

/// Extrema of `S(y)` over the vertices of `[0, x]`.
fn sweep_single(s: &Operator, x: &ModuleElem) -> Result<(Vec<Rat>, Vec<Rat>)> {
    let base = vec![Rat::zero(); s.codomain().coord_count()];
    let steps = box_spans(x)
        .into_iter()
        .map(|(atom, g)| {
            let img = s.apply(&g)?;
            Ok(StepDelta { atom, vals: atom_slice(&img, atom) })
        })
        .collect::<Result<Vec<_>>>()?;
    gray_sweep(s.codomain(), base, &steps)
}

/// Maximum of `S(y)` over the vertices of `[-x, x]`.
fn sweep_symmetric(s: &Operator, x: &ModuleElem) -> Result<Vec<Rat>> {
    // base vertex y = -x; each flip crosses the whole edge, twice the span
    let base = s.apply(&x.neg())?.cone_coords();
    let steps = box_spans(x)
        .into_iter()
        .map(|(atom, g)| {
            let img = s.apply(&g.scale(&crate::rational::rat_int(2)))?;
            Ok(StepDelta { atom, vals: atom_slice(&img, atom) })
        })
        .collect::<Result<Vec<_>>>()?;
    let (max, _) = gray_sweep(s.codomain(), base, &steps)?;
    Ok(max)
}

/// Grid traversal: recomputes the candidate from scratch at every point of
/// the parametric grid of `interval` (which contains all vertices).
fn grid_extrema(
    s: &Operator,
    t: Option<&Operator>,
    x: &ModuleElem,
    interval: &OrderInterval,
    cfg: &OracleConfig,
) -> Result<(Vec<Rat>, Vec<Rat>)> {
    let mut best_max: Option<Vec<Rat>> = None;
    let mut best_min: Option<Vec<Rat>> = None;
    for y in interval.grid_parametric(cfg.subdiv, cfg.max_points)? {
        let candidate = match t {
            Some(t) => s.apply(&y)?.add(&t.apply(&x.sub(&y)?)?)?,
            None => s.apply(&y)?,
        };
        let cone = candidate.cone_coords();
        match (&mut best_max, &mut best_min) {
            (Some(mx), Some(mn)) => {
                for (i, v) in cone.into_iter().enumerate() {
                    if v > mx[i] {
                        mx[i] = v.clone();
                    }
                    if v < mn[i] {
                        mn[i] = v;
                    }
                }
            }
            _ => {
                best_max = Some(cone.clone());
                best_min = Some(cone);
            }
        }
    }
    Ok((best_max.expect("grid is nonempty"), best_min.expect("grid is nonempty")))
}

fn from_cone(space: &ModuleSpace, cone: Vec<Rat>) -> ModuleElem {
    ModuleElem::from_cone_coords(space.clone(), cone).expect("coordinate count matches")
}

fn neg_cone(cone: Vec<Rat>) -> Vec<Rat> {
    cone.into_iter().map(|v| -v).collect()
}

/// Oracle for the lattice supremum: the coordinatewise maximum of
/// `S(y) + T(x-y)` over the vertices (or grid) of `[0, x]`.
pub fn oracle_rk_sup(s: &Operator, t: &Operator, x: &ModuleElem, cfg: &OracleConfig) -> Result<ModuleElem> {
    ensure_oracle_inputs(s, x)?;
    let (max, _) = if cfg.use_vertices {
        sweep_pair(s, t, x)?
    } else {
        let iv = OrderInterval::new(ModuleElem::zero(x.space().clone()), x.clone())?;
        grid_extrema(s, Some(t), x, &iv, cfg)?
    };
    Ok(from_cone(s.codomain(), max))
}

/// Oracle for the lattice infimum.
pub fn oracle_rk_inf(s: &Operator, t: &Operator, x: &ModuleElem, cfg: &OracleConfig) -> Result<ModuleElem> {
    ensure_oracle_inputs(s, x)?;
    let (_, min) = if cfg.use_vertices {
        sweep_pair(s, t, x)?
    } else {
        let iv = OrderInterval::new(ModuleElem::zero(x.space().clone()), x.clone())?;
        grid_extrema(s, Some(t), x, &iv, cfg)?
    };
    Ok(from_cone(s.codomain(), min))
}

/// Oracle for the positive part: the maximum of `S(y)` over `[0, x]`.
pub fn oracle_rk_pos(s: &Operator, x: &ModuleElem, cfg: &OracleConfig) -> Result<ModuleElem> {
    ensure_oracle_inputs(s, x)?;
    let (max, _) = single_extrema(s, x, cfg)?;
    Ok(from_cone(s.codomain(), max))
}

/// Oracle for the negative part: the maximum of `-S(y)` over `[0, x]`,
/// which is the negated minimum of `S(y)`.
pub fn oracle_rk_neg(s: &Operator, x: &ModuleElem, cfg: &OracleConfig) -> Result<ModuleElem> {
    ensure_oracle_inputs(s, x)?;
    let (_, min) = single_extrema(s, x, cfg)?;
    Ok(from_cone(s.codomain(), neg_cone(min)))
}

fn single_extrema(s: &Operator, x: &ModuleElem, cfg: &OracleConfig) -> Result<(Vec<Rat>, Vec<Rat>)> {
    if cfg.use_vertices {
        sweep_single(s, x)
    } else {
        let iv = OrderInterval::new(ModuleElem::zero(x.space().clone()), x.clone())?;
        grid_extrema(s, None, x, &iv, cfg)
    }
}

/// Oracle for the modulus: the maximum of `S(y)` over `[-x, x]`.
pub fn oracle_rk_abs(s: &Operator, x: &ModuleElem, cfg: &OracleConfig) -> Result<ModuleElem> {
    ensure_oracle_inputs(s, x)?;
    let max = if cfg.use_vertices {
        sweep_symmetric(s, x)?
    } else {
        let iv = OrderInterval::new(x.neg(), x.clone())?;
        let (max, _) = grid_extrema(s, None, x, &iv, cfg)?;
        max
    };
    Ok(from_cone(s.codomain(), max))
}

/// All five oracle values at one point, sharing the two box sweeps.
pub fn oracle_rk_all(s: &Operator, t: &Operator, x: &ModuleElem, cfg: &OracleConfig) -> Result<RkOracleEval> {
    ensure_oracle_inputs(s, x)?;
    if cfg.use_vertices {
        let (sup, inf) = sweep_pair(s, t, x)?;
        let (pos, min) = sweep_single(s, x)?;
        let abs = sweep_symmetric(s, x)?;
        Ok(RkOracleEval {
            sup: from_cone(s.codomain(), sup),
            inf: from_cone(s.codomain(), inf),
            pos: from_cone(s.codomain(), pos),
            neg: from_cone(s.codomain(), neg_cone(min)),
            abs: from_cone(s.codomain(), abs),
        })
    } else {
        Ok(RkOracleEval {
            sup: oracle_rk_sup(s, t, x, cfg)?,
            inf: oracle_rk_inf(s, t, x, cfg)?,
            pos: oracle_rk_pos(s, x, cfg)?,
            neg: oracle_rk_neg(s, x, cfg)?,
            abs: oracle_rk_abs(s, x, cfg)?,
        })
    }
}
