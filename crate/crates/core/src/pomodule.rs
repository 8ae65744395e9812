//! Partially ordered modules over the scalar algebra.
//!
//! A [`ModuleSpace`] is the free module of a fixed coordinate dimension over
//! a finite atom set. Its positive cone is either the standard one (all
//! coordinates nonnegative) or the image of the standard cone under a
//! per-atom monomial transform: a permutation composed with a strictly
//! positive diagonal. Monomial transforms are exactly the invertible
//! matrices whose inverse is again entrywise nonnegative, so the transformed
//! order is order-isomorphic to the standard one and remains a lattice with
//! the decomposition property, while exercising every code path where
//! "positive" is not "entrywise nonnegative".
//!
//! Lattice operations on a transformed space conjugate through the
//! transform: move into cone coordinates, act componentwise, move back.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::falgebra::{AtomSpace, FElem, Idem};
use crate::rational::{format_rat, Rat};

/// One atom's monomial matrix, column form: ambient coordinate `i` reads
/// cone coordinate `perm[i]` scaled by `diag[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomMonomial {
    perm: Vec<usize>,
    diag: Vec<Rat>,
}

impl AtomMonomial {
    pub fn new(perm: Vec<usize>, diag: Vec<Rat>) -> Result<Self> {
        let m = perm.len();
        if diag.len() != m {
            return Err(Error::Dimension(format!(
                "monomial permutation has {} entries but diagonal has {}",
                m,
                diag.len()
            )));
        }
        let mut seen = vec![false; m];
        for &p in &perm {
            if p >= m || seen[p] {
                return Err(Error::InvalidInput(format!(
                    "monomial permutation {perm:?} is not a permutation"
                )));
            }
            seen[p] = true;
        }
        if let Some(bad) = diag.iter().position(|d| !d.is_positive()) {
            return Err(Error::InvalidInput(format!(
                "monomial diagonal entry {} at position {bad} is not strictly positive",
                format_rat(&diag[bad])
            )));
        }
        Ok(AtomMonomial { perm, diag })
    }

    pub fn identity(m: usize) -> Self {
        AtomMonomial {
            perm: (0..m).collect(),
            diag: vec![Rat::new(1.into(), 1.into()); m],
        }
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn diag(&self) -> &[Rat] {
        &self.diag
    }

    fn dim(&self) -> usize {
        self.perm.len()
    }

    /// x_i = diag_i * u_{perm_i}
    fn to_ambient(&self, u: &[Rat]) -> Vec<Rat> {
        (0..self.dim()).map(|i| &self.diag[i] * &u[self.perm[i]]).collect()
    }

    /// Inverse of `to_ambient`.
    fn to_cone(&self, x: &[Rat]) -> Vec<Rat> {
        let mut u = vec![Rat::zero(); self.dim()];
        for i in 0..self.dim() {
            u[self.perm[i]] = &x[i] / &self.diag[i];
        }
        u
    }

    /// Dense m x m matrix with `M[i][perm[i]] = diag[i]`.
    pub(crate) fn dense(&self) -> Vec<Vec<Rat>> {
        let m = self.dim();
        let mut rows = vec![vec![Rat::zero(); m]; m];
        for i in 0..m {
            rows[i][self.perm[i]] = self.diag[i].clone();
        }
        rows
    }

    /// Dense inverse matrix.
    pub(crate) fn dense_inv(&self) -> Vec<Vec<Rat>> {
        let m = self.dim();
        let mut rows = vec![vec![Rat::zero(); m]; m];
        for i in 0..m {
            rows[self.perm[i]][i] = self.diag[i].recip();
        }
        rows
    }
}

/// A per-atom family of monomial matrices defining a transformed cone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialTransform {
    per_atom: Vec<AtomMonomial>,
}

impl MonomialTransform {
    pub fn new(per_atom: Vec<AtomMonomial>) -> Result<Self> {
        if per_atom.is_empty() {
            return Err(Error::InvalidInput("transform needs at least one atom".into()));
        }
        let m = per_atom[0].dim();
        if per_atom.iter().any(|t| t.dim() != m) {
            return Err(Error::Dimension(
                "monomial transform atoms have differing dimensions".into(),
            ));
        }
        Ok(MonomialTransform { per_atom })
    }

    pub fn per_atom(&self) -> &[AtomMonomial] {
        &self.per_atom
    }
}

/// A free module of dimension `m_dim` over an atom space, with either the
/// standard cone or a monomial-transformed cone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleSpace {
    atoms: AtomSpace,
    m_dim: usize,
    cone: Option<MonomialTransform>,
}

impl ModuleSpace {
    pub fn standard(atoms: AtomSpace, m_dim: usize) -> Result<Self> {
        if m_dim == 0 {
            return Err(Error::InvalidInput("module dimension must be positive".into()));
        }
        Ok(ModuleSpace { atoms, m_dim, cone: None })
    }

    pub fn with_cone(atoms: AtomSpace, m_dim: usize, t: MonomialTransform) -> Result<Self> {
        if m_dim == 0 {
            return Err(Error::InvalidInput("module dimension must be positive".into()));
        }
        if t.per_atom.len() != atoms.n_atoms() {
            return Err(Error::Dimension(format!(
                "transform covers {} atoms but space has {}",
                t.per_atom.len(),
                atoms.n_atoms()
            )));
        }
        if t.per_atom[0].dim() != m_dim {
            return Err(Error::Dimension(format!(
                "transform dimension {} does not match module dimension {}",
                t.per_atom[0].dim(),
                m_dim
            )));
        }
        Ok(ModuleSpace { atoms, m_dim, cone: Some(t) })
    }

    pub fn atoms(&self) -> AtomSpace {
        self.atoms
    }

    pub fn m_dim(&self) -> usize {
        self.m_dim
    }

    pub fn cone_transform(&self) -> Option<&MonomialTransform> {
        self.cone.as_ref()
    }

    /// Total coordinate count m * n.
    pub fn coord_count(&self) -> usize {
        self.m_dim * self.atoms.n_atoms()
    }

    pub(crate) fn ensure_same(&self, other: &ModuleSpace) -> Result<()> {
        if self != other {
            return Err(Error::SpaceMismatch(format!(
                "{}x{} (cone: {}) vs {}x{} (cone: {})",
                self.m_dim,
                self.atoms.n_atoms(),
                if self.cone.is_some() { "monomial" } else { "standard" },
                other.m_dim,
                other.atoms.n_atoms(),
                if other.cone.is_some() { "monomial" } else { "standard" },
            )));
        }
        Ok(())
    }

    /// Flat index of coordinate `i` at atom `a` (row-major).
    pub fn index(&self, i: usize, a: usize) -> usize {
        i * self.atoms.n_atoms() + a
    }

    /// Maps ambient coordinates into cone coordinates, atom by atom.
    pub(crate) fn coords_to_cone(&self, coords: &[Rat]) -> Vec<Rat> {
        match &self.cone {
            None => coords.to_vec(),
            Some(t) => {
                let n = self.atoms.n_atoms();
                let mut out = vec![Rat::zero(); coords.len()];
                for a in 0..n {
                    let col: Vec<Rat> =
                        (0..self.m_dim).map(|i| coords[self.index(i, a)].clone()).collect();
                    let u = t.per_atom[a].to_cone(&col);
                    for i in 0..self.m_dim {
                        out[self.index(i, a)] = u[i].clone();
                    }
                }
                out
            }
        }
    }

    pub(crate) fn coords_to_ambient(&self, coords: &[Rat]) -> Vec<Rat> {
        match &self.cone {
            None => coords.to_vec(),
            Some(t) => {
                let n = self.atoms.n_atoms();
                let mut out = vec![Rat::zero(); coords.len()];
                for a in 0..n {
                    let col: Vec<Rat> =
                        (0..self.m_dim).map(|i| coords[self.index(i, a)].clone()).collect();
                    let x = t.per_atom[a].to_ambient(&col);
                    for i in 0..self.m_dim {
                        out[self.index(i, a)] = x[i].clone();
                    }
                }
                out
            }
        }
    }
}

/// An element of a module: an m x n grid of rationals in ambient
/// coordinates, stored row-major (coordinate index major, atom minor).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleElem {
    space: ModuleSpace,
    coords: Vec<Rat>,
}

impl ModuleElem {
    pub fn new(space: ModuleSpace, coords: Vec<Rat>) -> Result<Self> {
        if coords.len() != space.coord_count() {
            return Err(Error::Dimension(format!(
                "expected {} coordinates, got {}",
                space.coord_count(),
                coords.len()
            )));
        }
        Ok(ModuleElem { space, coords })
    }

    /// Builds an element from cone coordinates.
    pub fn from_cone_coords(space: ModuleSpace, cone_coords: Vec<Rat>) -> Result<Self> {
        if cone_coords.len() != space.coord_count() {
            return Err(Error::Dimension(format!(
                "expected {} coordinates, got {}",
                space.coord_count(),
                cone_coords.len()
            )));
        }
        let coords = space.coords_to_ambient(&cone_coords);
        Ok(ModuleElem { space, coords })
    }

    pub fn zero(space: ModuleSpace) -> Self {
        let coords = vec![Rat::zero(); space.coord_count()];
        ModuleElem { space, coords }
    }

    pub fn from_ints(space: ModuleSpace, values: &[i64]) -> Result<Self> {
        ModuleElem::new(
            space,
            values.iter().map(|&v| crate::rational::rat_int(v)).collect(),
        )
    }

    pub fn space(&self) -> &ModuleSpace {
        &self.space
    }

    pub fn coords(&self) -> &[Rat] {
        &self.coords
    }

    pub fn get(&self, i: usize, a: usize) -> &Rat {
        &self.coords[self.space.index(i, a)]
    }

    /// Cone coordinates of this element.
    pub fn cone_coords(&self) -> Vec<Rat> {
        self.space.coords_to_cone(&self.coords)
    }

    /// Row `i` as a scalar-algebra element.
    pub fn coordinate_row(&self, i: usize) -> FElem {
        let n = self.space.atoms.n_atoms();
        let values = (0..n).map(|a| self.coords[self.space.index(i, a)].clone()).collect();
        FElem::new(self.space.atoms, values).expect("row length matches atoms")
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Rat::is_zero)
    }

    /// Membership in the positive cone.
    pub fn is_in_cone(&self) -> bool {
        self.cone_coords().iter().all(|v| !v.is_negative())
    }

    fn zip(&self, other: &ModuleElem, f: impl Fn(&Rat, &Rat) -> Rat) -> Result<ModuleElem> {
        self.space.ensure_same(&other.space)?;
        let coords = self.coords.iter().zip(&other.coords).map(|(a, b)| f(a, b)).collect();
        Ok(ModuleElem { space: self.space.clone(), coords })
    }

    pub fn add(&self, other: &ModuleElem) -> Result<ModuleElem> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ModuleElem) -> Result<ModuleElem> {
        self.zip(other, |a, b| a - b)
    }

    pub fn neg(&self) -> ModuleElem {
        ModuleElem {
            space: self.space.clone(),
            coords: self.coords.iter().map(|v| -v).collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> ModuleElem {
        ModuleElem {
            space: self.space.clone(),
            coords: self.coords.iter().map(|v| v * c).collect(),
        }
    }

    /// The module action of a scalar-algebra element: atom `a` of every
    /// coordinate row is scaled by `lambda(a)`.
    pub fn scale_felem(&self, lambda: &FElem) -> Result<ModuleElem> {
        self.space.atoms.ensure_same(&lambda.space())?;
        let n = self.space.atoms.n_atoms();
        let coords = self
            .coords
            .iter()
            .enumerate()
            .map(|(idx, v)| v * &lambda.values()[idx % n])
            .collect();
        Ok(ModuleElem { space: self.space.clone(), coords })
    }

    /// The band projection `p * x`: keeps the selected atom columns.
    pub fn cut(&self, p: &Idem) -> Result<ModuleElem> {
        self.space.atoms.ensure_same(&p.space())?;
        let n = self.space.atoms.n_atoms();
        let coords = self
            .coords
            .iter()
            .enumerate()
            .map(|(idx, v)| if p.contains_atom(idx % n) { v.clone() } else { Rat::zero() })
            .collect();
        Ok(ModuleElem { space: self.space.clone(), coords })
    }

    /// Order: `self <= other` iff the difference lies in the cone.
    pub fn leq(&self, other: &ModuleElem) -> Result<bool> {
        Ok(other.sub(self)?.is_in_cone())
    }

    fn conjugate_zip(&self, other: &ModuleElem, f: impl Fn(&Rat, &Rat) -> Rat) -> Result<ModuleElem> {
        self.space.ensure_same(&other.space)?;
        let a = self.cone_coords();
        let b = other.cone_coords();
        let merged: Vec<Rat> = a.iter().zip(&b).map(|(x, y)| f(x, y)).collect();
        ModuleElem::from_cone_coords(self.space.clone(), merged)
    }

    pub fn sup(&self, other: &ModuleElem) -> Result<ModuleElem> {
        self.conjugate_zip(other, |a, b| if a >= b { a.clone() } else { b.clone() })
    }

    pub fn inf(&self, other: &ModuleElem) -> Result<ModuleElem> {
        self.conjugate_zip(other, |a, b| if a <= b { a.clone() } else { b.clone() })
    }

    pub fn pos_part(&self) -> ModuleElem {
        self.sup(&ModuleElem::zero(self.space.clone())).expect("same space")
    }

    pub fn neg_part(&self) -> ModuleElem {
        self.neg().pos_part()
    }

    pub fn abs(&self) -> ModuleElem {
        self.sup(&self.neg()).expect("same space")
    }

    /// The support: the join of the supports of the coordinate rows, i.e.
    /// the indicator of atoms carrying any nonzero coordinate. Always
    /// satisfies `support(x) * x = x`.
    pub fn support(&self) -> Idem {
        let mut join = Idem::zero(self.space.atoms);
        for i in 0..self.space.m_dim {
            join = join.join(&self.coordinate_row(i).support()).expect("same space");
        }
        join
    }

    /// Key for exact set membership: the flattened coordinate vector.
    fn set_key(&self) -> Vec<Rat> {
        self.coords.clone()
    }
}

impl std::fmt::Display for ModuleElem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let n = self.space.atoms.n_atoms();
        let rows: Vec<String> = (0..self.space.m_dim)
            .map(|i| {
                let row: Vec<String> =
                    (0..n).map(|a| format_rat(self.get(i, a))).collect();
                format!("[{}]", row.join(", "))
            })
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

/// A nonempty order interval `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderInterval {
    lo: ModuleElem,
    hi: ModuleElem,
}

/// Hard cap on the coordinate count for vertex enumeration (2^count points).
pub const VERTEX_COORD_CAP: usize = 20;

impl OrderInterval {
    pub fn new(lo: ModuleElem, hi: ModuleElem) -> Result<Self> {
        if !lo.leq(&hi)? {
            return Err(Error::EmptyInterval);
        }
        Ok(OrderInterval { lo, hi })
    }

    pub fn lo(&self) -> &ModuleElem {
        &self.lo
    }

    pub fn hi(&self) -> &ModuleElem {
        &self.hi
    }

    pub fn space(&self) -> &ModuleSpace {
        self.lo.space()
    }

    /// The corner points of the box in cone coordinates, mapped back to
    /// ambient coordinates. Degenerate edges are skipped, so the points are
    /// pairwise distinct and their count is 2^(number of nondegenerate
    /// edges), which is 2^(m*n) for a full-dimensional box.
    pub fn vertices(&self) -> Result<Vec<ModuleElem>> {
        let lo = self.lo.cone_coords();
        let hi = self.hi.cone_coords();
        let free: Vec<usize> =
            (0..lo.len()).filter(|&c| lo[c] != hi[c]).collect();
        if free.len() > VERTEX_COORD_CAP {
            return Err(Error::TooManyPoints {
                requested: 1u128 << free.len(),
                cap: 1 << VERTEX_COORD_CAP,
            });
        }
        let mut out = Vec::with_capacity(1 << free.len());
        for bits in 0..1u64 << free.len() {
            let mut coords = lo.clone();
            for (k, &c) in free.iter().enumerate() {
                if bits >> k & 1 == 1 {
                    coords[c] = hi[c].clone();
                }
            }
            out.push(ModuleElem::from_cone_coords(self.space().clone(), coords)?);
        }
        Ok(out)
    }

    /// Per-coordinate value lists in cone coordinates for a parametric grid:
    /// each nondegenerate edge is split into `subdiv` equal parts.
    fn parametric_axes(&self, subdiv: u32) -> Vec<Vec<Rat>> {
        let lo = self.lo.cone_coords();
        let hi = self.hi.cone_coords();
        let s = crate::rational::rat_int(i64::from(subdiv.max(1)));
        lo.iter()
            .zip(&hi)
            .map(|(l, h)| {
                if l == h {
                    vec![l.clone()]
                } else {
                    (0..=subdiv.max(1))
                        .map(|t| l + (h - l) * crate::rational::rat_int(i64::from(t)) / &s)
                        .collect()
                }
            })
            .collect()
    }

    /// Per-coordinate value lists in cone coordinates for a step grid: all
    /// multiples of `1/subdiv` lying in the edge range.
    fn step_axes(&self, subdiv: u32) -> Vec<Vec<Rat>> {
        let lo = self.lo.cone_coords();
        let hi = self.hi.cone_coords();
        let s = crate::rational::rat_int(i64::from(subdiv.max(1)));
        lo.iter()
            .zip(&hi)
            .map(|(l, h)| {
                let first = (l * &s).ceil().to_integer();
                let last = (h * &s).floor().to_integer();
                let mut vals = Vec::new();
                let mut k = first;
                while k <= last {
                    vals.push(Rat::from_integer(k.clone()) / &s);
                    k += 1;
                }
                if vals.is_empty() {
                    // no grid point inside; fall back to the lower endpoint
                    vals.push(l.clone());
                }
                vals
            })
            .collect()
    }

    fn grid_from_axes(&self, axes: Vec<Vec<Rat>>, max_points: usize) -> Result<Vec<ModuleElem>> {
        let mut total: u128 = 1;
        for ax in &axes {
            total = total.saturating_mul(ax.len() as u128);
            if total > max_points as u128 {
                return Err(Error::TooManyPoints { requested: total, cap: max_points as u128 });
            }
        }
        let mut out = Vec::with_capacity(total as usize);
        let mut idx = vec![0usize; axes.len()];
        loop {
            let coords: Vec<Rat> =
                axes.iter().zip(&idx).map(|(ax, &i)| ax[i].clone()).collect();
            out.push(ModuleElem::from_cone_coords(self.space().clone(), coords)?);
            // odometer
            let mut c = axes.len();
            loop {
                if c == 0 {
                    return Ok(out);
                }
                c -= 1;
                idx[c] += 1;
                if idx[c] < axes[c].len() {
                    break;
                }
                idx[c] = 0;
            }
        }
    }

    /// Parametric grid: each edge split into `subdiv` equal parts, so a
    /// nondegenerate edge contributes `subdiv + 1` values.
    pub fn grid_parametric(&self, subdiv: u32, max_points: usize) -> Result<Vec<ModuleElem>> {
        self.grid_from_axes(self.parametric_axes(subdiv), max_points)
    }

    /// Step grid: all points whose cone coordinates are multiples of
    /// `1/subdiv` within the box.
    pub fn grid_step(&self, subdiv: u32, max_points: usize) -> Result<Vec<ModuleElem>> {
        self.grid_from_axes(self.step_axes(subdiv), max_points)
    }
}

/// Outcome of a set-level interval check. `violation` carries a point in the
/// symmetric difference when the two sides differ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetEqualityCheck {
    pub passed: bool,
    pub lhs_count: usize,
    pub rhs_count: usize,
    pub violation: Option<ModuleElem>,
}

/// Certifies `[0, p*x] = p*[0, x]` on the parametric grid of the given
/// subdivision: the grid of the projected interval must equal, as a set, the
/// projection of the grid of the original interval.
pub fn scale_interval(
    p: &Idem,
    x: &ModuleElem,
    subdiv: u32,
    max_points: usize,
) -> Result<SetEqualityCheck> {
    if !x.is_in_cone() {
        return Err(Error::InvalidInput("scale_interval requires x >= 0".into()));
    }
    let zero = ModuleElem::zero(x.space().clone());
    let px = x.cut(p)?;
    let lhs_interval = OrderInterval::new(zero.clone(), px)?;
    let rhs_interval = OrderInterval::new(zero, x.clone())?;

    let lhs: BTreeSet<Vec<Rat>> = lhs_interval
        .grid_parametric(subdiv, max_points)?
        .into_iter()
        .map(|e| e.set_key())
        .collect();
    let mut rhs: BTreeSet<Vec<Rat>> = BTreeSet::new();
    let mut rhs_elems: Vec<ModuleElem> = Vec::new();
    for g in rhs_interval.grid_parametric(subdiv, max_points)? {
        let cut = g.cut(p)?;
        if rhs.insert(cut.set_key()) {
            rhs_elems.push(cut);
        }
    }

    let violation = lhs
        .symmetric_difference(&rhs)
        .next()
        .map(|key| ModuleElem::new(x.space().clone(), key.clone()).expect("key has grid shape"));
    Ok(SetEqualityCheck {
        passed: violation.is_none(),
        lhs_count: lhs.len(),
        rhs_count: rhs.len(),
        violation,
    })
}

/// Outcome of a decomposition-property check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RdpCheck {
    pub passed: bool,
    /// Grid points of `[0, x+y]` that were decomposed.
    pub forward_points: usize,
    /// Pairs checked for the reverse inclusion.
    pub reverse_pairs: usize,
    pub violation: Option<ModuleElem>,
}

/// Checks the decomposition property `[0, x+y] = [0, x] + [0, y]` on the
/// step grid: every grid point `z` of `[0, x+y]` must split as `u + v` with
/// `u in [0, x]` and `v in [0, y]` (witness `u = inf(z, x)`), and every sum
/// of grid points of the two summand intervals must land in `[0, x+y]`.
pub fn check_rdp(
    x: &ModuleElem,
    y: &ModuleElem,
    subdiv: u32,
    max_points: usize,
) -> Result<RdpCheck> {
    if !x.is_in_cone() || !y.is_in_cone() {
        return Err(Error::InvalidInput("check_rdp requires x, y >= 0".into()));
    }
    let zero = ModuleElem::zero(x.space().clone());
    let sum = x.add(y)?;
    let whole = OrderInterval::new(zero.clone(), sum.clone())?;

    let mut forward_points = 0usize;
    for z in whole.grid_step(subdiv, max_points)? {
        forward_points += 1;
        let u = z.inf(x)?;
        let v = z.sub(&u)?;
        let ok = u.is_in_cone()
            && u.leq(x)?
            && v.is_in_cone()
            && v.leq(y)?
            && u.add(&v)? == z;
        if !ok {
            return Ok(RdpCheck {
                passed: false,
                forward_points,
                reverse_pairs: 0,
                violation: Some(z),
            });
        }
    }

    // reverse inclusion: sums of grid points of the summand intervals
    let gx = OrderInterval::new(zero.clone(), x.clone())?.grid_step(subdiv, max_points)?;
    let gy = OrderInterval::new(zero, y.clone())?.grid_step(subdiv, max_points)?;
    if gx.len().saturating_mul(gy.len()) > max_points {
        return Err(Error::TooManyPoints {
            requested: (gx.len() as u128) * (gy.len() as u128),
            cap: max_points as u128,
        });
    }
    let mut reverse_pairs = 0usize;
    for u in &gx {
        for v in &gy {
            reverse_pairs += 1;
            let s = u.add(v)?;
            if !(s.is_in_cone() && s.leq(&sum)?) {
                return Ok(RdpCheck {
                    passed: false,
                    forward_points,
                    reverse_pairs,
                    violation: Some(s),
                });
            }
        }
    }
    Ok(RdpCheck { passed: true, forward_points, reverse_pairs, violation: None })
}

/// Outcome of a scaled-chain infimum check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainInfCheck {
    pub passed: bool,
    pub computed_inf: ModuleElem,
    pub expected: ModuleElem,
}

/// For a descending finite chain with infimum its last element, verifies
/// that scaling by a nonnegative `lambda` commutes with the infimum: the
/// iterated lattice infimum of the scaled chain equals `lambda * min(chain)`.
pub fn scalar_chain_inf(lambda: &FElem, chain: &[ModuleElem]) -> Result<ChainInfCheck> {
    if !lambda.is_nonneg() {
        return Err(Error::InvalidInput("scalar_chain_inf requires lambda >= 0".into()));
    }
    if chain.is_empty() {
        return Err(Error::InvalidInput("chain must be nonempty".into()));
    }
    for (i, w) in chain.windows(2).enumerate() {
        if !w[1].leq(&w[0])? {
            return Err(Error::NotDescending { index: i + 1 });
        }
    }
    let scaled: Vec<ModuleElem> = chain
        .iter()
        .map(|e| e.scale_felem(lambda))
        .collect::<Result<_>>()?;
    let mut computed = scaled[0].clone();
    for e in &scaled[1..] {
        computed = computed.inf(e)?;
    }
    let expected = chain.last().unwrap().scale_felem(lambda)?;
    Ok(ChainInfCheck { passed: computed == expected, computed_inf: computed, expected })
}
