//! Pyramids, XY decompositions, the θ parameter and the layer projections
//! built on them.
//!
//! Layers are 0-based and layer 0 is the top layer. A pyramid grown from
//! layer `top` only involves layers `top..g`.

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicU64, Ordering};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    self, embed_local, hermitian_eig, operator_norm, ComplexMatrix, LocalIndex, StateVector, SubspaceBasis,
    DENSE_CAP, RANK_TOL,
};
use crate::qsat::{project_at_most, project_exactly, QSatSystem};

/// Closure of an apex constraint through the lower layers.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Pyramid {
    pub apex: usize,
    /// Layer of the apex.
    pub top: usize,
    /// `members[i]` holds the pyramid's constraints in layer `top + i`.
    pub members: Vec<Vec<usize>>,
    /// Sorted qudit indices.
    pub support: Vec<usize>,
    pub local_dim: usize,
}

impl Pyramid {
    pub fn all_members(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().flatten().copied()
    }

    pub fn size(&self) -> usize {
        self.members.iter().map(Vec::len).sum()
    }

    pub fn members_in_layer(&self, layer: usize) -> &[usize] {
        layer
            .checked_sub(self.top)
            .and_then(|i| self.members.get(i))
            .map_or(&[], |m| m.as_slice())
    }

    fn local_dims(&self, dims: &[usize]) -> Vec<usize> {
        self.support.iter().map(|&q| dims[q]).collect()
    }

    /// Positions of the constraint's qudits inside the pyramid support.
    fn positions(&self, sys: &QSatSystem, id: usize) -> Result<Vec<usize>> {
        sys.constraint(id)
            .support
            .iter()
            .map(|q| {
                self.support
                    .binary_search(q)
                    .map_err(|_| Error::BadSupport(format!("qudit {q} outside the pyramid")))
            })
            .collect()
    }

    /// The constraint's projector as an operator on the pyramid space.
    pub fn local_projector(&self, sys: &QSatSystem, id: usize) -> Result<ComplexMatrix> {
        let positions = self.positions(sys, id)?;
        embed_local(
            &sys.constraint(id).projector,
            &positions,
            &self.local_dims(sys.dims()),
        )
    }
}

/// Grows the pyramid of `apex`, which must lie in layer `top`.
pub fn grow_pyramid(sys: &QSatSystem, top: usize, apex: usize) -> Result<Pyramid> {
    let layers = sys.require_layers()?;
    if top >= layers.len() {
        return Err(Error::LayerOutOfRange {
            layer: top,
            layers: layers.len(),
        });
    }
    if !layers[top].contains(&apex) {
        return Err(Error::BadSupport(format!(
            "constraint {apex} is not in layer {top}"
        )));
    }
    let mut support: BTreeSet<usize> = sys.constraint(apex).support.iter().copied().collect();
    let mut members = vec![vec![apex]];
    for layer in &layers[top + 1..] {
        let picked: Vec<usize> = layer
            .iter()
            .copied()
            .filter(|&id| sys.constraint(id).support.iter().any(|q| support.contains(q)))
            .collect();
        // Supports from this layer join only after the whole layer is scanned.
        for &id in &picked {
            support.extend(sys.constraint(id).support.iter().copied());
        }
        members.push(picked);
    }
    let support: Vec<usize> = support.into_iter().collect();
    let local_dim = support.iter().map(|&q| sys.dims()[q]).product();
    Ok(Pyramid {
        apex,
        top,
        members,
        support,
        local_dim,
    })
}

/// Greedy maximal family of support-disjoint pyramids with apexes in layer
/// `top`. Apexes are tried in `priority` order, then in id order for any
/// layer-`top` constraint missing from `priority`.
pub fn build_pyramids(sys: &QSatSystem, top: usize, priority: &[usize]) -> Result<Vec<Pyramid>> {
    let layer = sys.layer(top)?;
    let mut order: Vec<usize> = priority.iter().copied().filter(|id| layer.contains(id)).collect();
    let mut rest: Vec<usize> = layer.iter().copied().filter(|id| !order.contains(id)).collect();
    rest.sort_unstable();
    order.extend(rest);
    let mut used: BTreeSet<usize> = BTreeSet::new();
    let mut out = Vec::new();
    for apex in order {
        let p = grow_pyramid(sys, top, apex)?;
        if p.support.iter().all(|q| !used.contains(q)) {
            used.extend(p.support.iter().copied());
            out.push(p);
        }
    }
    Ok(out)
}

/// A simultaneous eigenspace of all pyramid constraints.
#[derive(Clone, Debug)]
pub struct XSpace {
    /// `values[i]` is the eigenvalue (false = 0, true = 1) of the i-th member
    /// in [`Pyramid::all_members`] order.
    pub values: Vec<bool>,
    pub basis: SubspaceBasis,
}

#[derive(Clone, Debug)]
pub struct PyramidSpaces {
    pub x_spaces: Vec<XSpace>,
    pub y_space: SubspaceBasis,
    pub theta: f64,
    pub exact: bool,
    x_projectors: Vec<ComplexMatrix>,
    y_projector: ComplexMatrix,
}

impl PyramidSpaces {
    pub fn y_projector(&self) -> &ComplexMatrix {
        &self.y_projector
    }

    pub fn x_projector(&self, i: usize) -> &ComplexMatrix {
        &self.x_projectors[i]
    }
}

/// Splits the pyramid space into the `X_b` simultaneous eigenspaces and the
/// residual `Y`.
pub fn xy_decompose(pyr: &Pyramid, sys: &QSatSystem) -> Result<(Vec<XSpace>, SubspaceBasis)> {
    if pyr.local_dim > DENSE_CAP {
        return Err(Error::DimensionTooLarge {
            dim: pyr.local_dim,
            cap: DENSE_CAP,
        });
    }
    let projectors: Vec<ComplexMatrix> = pyr
        .all_members()
        .map(|id| pyr.local_projector(sys, id))
        .collect::<Result<_>>()?;
    let d = pyr.local_dim;
    // Refine one constraint at a time; the kernel of W^dagger (Q - b)^2 W
    // inside the current branch W is the eigenvalue-b part of that branch.
    let mut branches: Vec<(Vec<bool>, ComplexMatrix)> = vec![(Vec::new(), ComplexMatrix::identity(d, d))];
    for q in &projectors {
        let mut next = Vec::new();
        for (values, w) in &branches {
            let compressed = w.adjoint() * q * w;
            let (eigs, vecs) = hermitian_eig(&compressed, 1e-8)?;
            for b in [false, true] {
                let keep: Vec<usize> = (0..eigs.len())
                    .filter(|&i| {
                        let dist = if b { 1.0 - eigs[i] } else { eigs[i] };
                        dist <= RANK_TOL
                    })
                    .collect();
                if keep.is_empty() {
                    continue;
                }
                let mut sub = ComplexMatrix::zeros(w.ncols(), keep.len());
                for (j, &i) in keep.iter().enumerate() {
                    sub.set_column(j, &vecs.vectors().column(i));
                }
                let mut v = values.clone();
                v.push(b);
                next.push((v, w * sub));
            }
        }
        branches = next;
    }
    let x_spaces: Vec<XSpace> = branches
        .into_iter()
        .map(|(values, w)| XSpace {
            values,
            basis: SubspaceBasis::span_of(&w),
        })
        .collect();
    let mut all = ComplexMatrix::zeros(d, x_spaces.iter().map(|x| x.basis.dim()).sum());
    let mut col = 0;
    for x in &x_spaces {
        for j in 0..x.basis.dim() {
            all.set_column(col, &x.basis.vectors().column(j));
            col += 1;
        }
    }
    let y = SubspaceBasis::from_columns_unchecked(all).complement();
    Ok((x_spaces, y))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ThetaMode {
    Exact,
    Sampled,
}

#[derive(Clone, Debug, Serialize)]
pub struct ThetaOptions {
    pub mode: ThetaMode,
    /// Largest product count enumerated exactly; also the sample count.
    pub cap: u64,
    pub seed: u64,
    /// Permutes the exploration order of the exact search.
    pub shuffle: Option<u64>,
}

impl Default for ThetaOptions {
    fn default() -> Self {
        Self {
            mode: ThetaMode::Exact,
            cap: 10_000_000,
            seed: 0,
            shuffle: None,
        }
    }
}

/// `(N+1)! 2^(N+1)` for a pyramid of `n` constraints, saturating.
pub fn product_count(n: usize) -> u128 {
    let mut c: u128 = 1;
    for i in 1..=n as u128 {
        c = c.saturating_mul(i).saturating_mul(2);
    }
    c
}

/// θ of one pyramid: the largest `||P_Y A_1 ... A_n P_Y||` over orderings of
/// the pyramid constraints with each `A_i` either `Q_i` or `I - Q_i`.
/// Returns `(theta, exact)`.
pub fn compute_theta(
    pyr: &Pyramid,
    sys: &QSatSystem,
    y: &SubspaceBasis,
    opts: &ThetaOptions,
) -> Result<(f64, bool)> {
    if y.is_empty() {
        return Ok((0.0, true));
    }
    let ids: Vec<usize> = pyr.all_members().collect();
    let local_dims = pyr.local_dims(sys.dims());
    let ops = ids
        .iter()
        .map(|&c| {
            Ok(Factor {
                index: LocalIndex::new(&pyr.positions(sys, c)?, &local_dims)?,
                q: sys.constraint(c).projector.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let exact = opts.mode == ThetaMode::Exact && product_count(ids.len()) <= opts.cap as u128;
    if exact {
        let commute: Vec<Vec<bool>> = ids
            .iter()
            .map(|&a| {
                ids.iter()
                    .map(|&b| !sys.constraint(a).intersects(sys.constraint(b)))
                    .collect()
            })
            .collect();
        Ok((theta_exact(&ops, &commute, y, opts.shuffle), true))
    } else {
        Ok((theta_sampled(&ops, y, opts.cap, opts.seed), false))
    }
}

/// One pyramid constraint acting on its own qudits of the pyramid space.
struct Factor {
    index: LocalIndex,
    q: ComplexMatrix,
}

impl Factor {
    /// `Q m` for `sign = 1`, `(I - Q) m` for `sign = 0`, column by column.
    fn apply(&self, sign: usize, m: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(m.nrows(), m.ncols());
        for (src, mut dst) in m.column_iter().zip(out.column_iter_mut()) {
            self.index.apply_into(&self.q, src.as_slice(), dst.as_mut_slice());
            if sign == 0 {
                dst.zip_apply(&src, |o, v| *o = v - *o);
            }
        }
        out
    }
}

struct Search<'a> {
    ops: &'a [Factor],
    commute: &'a [Vec<bool>],
    vh: ComplexMatrix,
    order: Vec<usize>,
    best: &'a AtomicU64,
}

impl Search<'_> {
    fn best(&self) -> f64 {
        f64::from_bits(self.best.load(Ordering::Relaxed))
    }

    fn offer(&self, v: f64) {
        self.best.fetch_max(v.to_bits(), Ordering::Relaxed);
    }

    /// A word is enumerated only in its lexicographically least form among
    /// rearrangements of commuting neighbours: appending `a` is rejected when
    /// some larger letter could slide past everything after it.
    fn admissible(&self, word: &[usize], a: usize) -> bool {
        for &x in word.iter().rev() {
            if !self.commute[a][x] {
                return true;
            }
            if a < x {
                return false;
            }
        }
        true
    }

    /// `m` holds the product applied so far (rightmost factors first) to the
    /// Y basis; `used` marks consumed constraints.
    fn dfs(&self, word: &mut Vec<usize>, used: &mut [bool], m: &ComplexMatrix) {
        if word.len() == self.ops.len() {
            let a = &self.vh * m;
            if let Some(v) = norm_above(&a, self.best()) {
                self.offer(v);
            }
            return;
        }
        // Left factors are contractions, so ||m|| bounds every completion.
        if m.norm() <= self.best() {
            return;
        }
        for &a in &self.order {
            if used[a] || !self.admissible(word, a) {
                continue;
            }
            used[a] = true;
            word.push(a);
            for sign in 0..2 {
                self.dfs(word, used, &self.ops[a].apply(sign, m));
            }
            word.pop();
            used[a] = false;
        }
    }
}

/// `||a||₂` when it exceeds `floor`, else `None`. Tries the cheap upper
/// bounds `||a||_F`, `||a†a||_F^(1/2)` and `||(a†a)²||_F^(1/4)` before an
/// eigensolve.
fn norm_above(a: &ComplexMatrix, floor: f64) -> Option<f64> {
    if a.norm() <= floor {
        return None;
    }
    let b = a.adjoint() * a;
    let f2 = floor * floor;
    if b.norm() <= f2 {
        return None;
    }
    if (&b * &b).norm() <= f2 * f2 {
        return None;
    }
    let top = b.symmetric_eigenvalues().max().max(0.0).sqrt();
    (top > floor).then_some(top)
}

fn theta_exact(ops: &[Factor], commute: &[Vec<bool>], y: &SubspaceBasis, shuffle: Option<u64>) -> f64 {
    let n = ops.len();
    let mut order: Vec<usize> = (0..n).collect();
    if let Some(seed) = shuffle {
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    // A few sampled products give a valid starting floor for the pruning.
    let seed_floor = theta_sampled(ops, y, SEED_SAMPLES, shuffle.unwrap_or(0));
    let best = AtomicU64::new(seed_floor.to_bits());
    let search = Search {
        ops,
        commute,
        vh: y.vectors().adjoint(),
        order: order.clone(),
        best: &best,
    };
    let v = y.vectors().clone();
    let firsts: Vec<(usize, usize)> = order.iter().flat_map(|&a| [(a, 0), (a, 1)]).collect();
    firsts.par_iter().for_each(|&(a, s)| {
        let mut used = vec![false; n];
        used[a] = true;
        let mut word = vec![a];
        search.dfs(&mut word, &mut used, &ops[a].apply(s, &v));
    });
    f64::from_bits(best.load(Ordering::Relaxed))
}

const SAMPLE_CHUNK: u64 = 4096;
const SEED_SAMPLES: u64 = 64;

fn theta_sampled(ops: &[Factor], y: &SubspaceBasis, samples: u64, seed: u64) -> f64 {
    let n = ops.len();
    let vh = y.vectors().adjoint();
    let chunks = samples.div_ceil(SAMPLE_CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let count = SAMPLE_CHUNK.min(samples - chunk * SAMPLE_CHUNK);
            let mut order: Vec<usize> = (0..n).collect();
            let mut best = 0.0_f64;
            for _ in 0..count {
                order.shuffle(&mut rng);
                let mut m = y.vectors().clone();
                for &a in &order {
                    let s = rng.random_range(0..2);
                    m = ops[a].apply(s, &m);
                }
                best = best.max(operator_norm(&(&vh * m)));
            }
            best
        })
        .reduce(|| 0.0, f64::max)
}

/// A disjoint pyramid family with the XY decomposition of every pyramid.
#[derive(Clone, Debug)]
pub struct XYDecomposition {
    pub top: usize,
    pub pyramids: Vec<Pyramid>,
    pub spaces: Vec<PyramidSpaces>,
}

impl XYDecomposition {
    pub fn build(sys: &QSatSystem, top: usize, priority: &[usize], opts: &ThetaOptions) -> Result<Self> {
        let pyramids = build_pyramids(sys, top, priority)?;
        Self::from_pyramids(sys, top, pyramids, opts)
    }

    pub fn from_pyramids(
        sys: &QSatSystem,
        top: usize,
        pyramids: Vec<Pyramid>,
        opts: &ThetaOptions,
    ) -> Result<Self> {
        let spaces = pyramids
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let (x_spaces, y_space) = xy_decompose(p, sys)?;
                let popts = ThetaOptions {
                    seed: opts.seed.wrapping_add(i as u64),
                    ..opts.clone()
                };
                let (theta, exact) = compute_theta(p, sys, &y_space, &popts)?;
                let x_projectors = x_spaces.iter().map(|x| x.basis.projector()).collect();
                let y_projector = y_space.projector();
                Ok(PyramidSpaces {
                    x_spaces,
                    y_space,
                    theta,
                    exact,
                    x_projectors,
                    y_projector,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            top,
            pyramids,
            spaces,
        })
    }

    /// Largest θ over the pyramids (0 for an empty family).
    pub fn theta(&self) -> f64 {
        self.spaces.iter().map(|s| s.theta).fold(0.0, f64::max)
    }

    pub fn theta_exact(&self) -> bool {
        self.spaces.iter().all(|s| s.exact)
    }

    pub fn apexes(&self) -> Vec<usize> {
        self.pyramids.iter().map(|p| p.apex).collect()
    }

    /// Pyramid members lying in `layer`, over the whole family.
    pub fn inside(&self, layer: usize) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .pyramids
            .iter()
            .flat_map(|p| p.members_in_layer(layer).iter().copied())
            .collect();
        v.sort_unstable();
        v
    }

    /// Constraints of `layer` outside every pyramid.
    pub fn outside(&self, sys: &QSatSystem, layer: usize) -> Result<Vec<usize>> {
        let inside = self.inside(layer);
        Ok(sys
            .layer(layer)?
            .iter()
            .copied()
            .filter(|id| !inside.contains(id))
            .collect())
    }

    /// Every sector of the decomposition. The count is the product of
    /// `(#X spaces + 1)` over pyramids, so only use this on small families.
    pub fn all_sectors(&self) -> Vec<Sector> {
        let mut out = vec![Vec::new()];
        for s in &self.spaces {
            let labels: Vec<SectorLabel> = (0..s.x_spaces.len())
                .map(SectorLabel::X)
                .chain(std::iter::once(SectorLabel::Y))
                .collect();
            out = out
                .into_iter()
                .flat_map(|prefix: Vec<SectorLabel>| {
                    labels.iter().map(move |&l| {
                        let mut p = prefix.clone();
                        p.push(l);
                        p
                    })
                })
                .collect();
        }
        out.into_iter().map(Sector).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SectorLabel {
    X(usize),
    Y,
}

/// One label per pyramid.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Sector(pub Vec<SectorLabel>);

impl Sector {
    /// Number of `Y` labels.
    pub fn size(&self) -> usize {
        self.0.iter().filter(|l| **l == SectorLabel::Y).count()
    }
}

/// `P_nu v`.
pub fn apply_sector(
    dec: &XYDecomposition,
    dims: &[usize],
    nu: &Sector,
    v: &StateVector,
) -> Result<StateVector> {
    if nu.0.len() != dec.pyramids.len() {
        return Err(Error::BadSector(format!(
            "{} labels for {} pyramids",
            nu.0.len(),
            dec.pyramids.len()
        )));
    }
    let mut out = v.clone();
    for ((p, s), label) in dec.pyramids.iter().zip(&dec.spaces).zip(&nu.0) {
        let proj = match *label {
            SectorLabel::Y => s.y_projector(),
            SectorLabel::X(i) if i < s.x_spaces.len() => s.x_projector(i),
            SectorLabel::X(i) => {
                return Err(Error::BadSector(format!(
                    "X space {i} requested, pyramid {} has {}",
                    p.apex,
                    s.x_spaces.len()
                )))
            }
        };
        out = linalg::apply_local(proj, &p.support, dims, &out)?;
    }
    Ok(out)
}

/// Components `P_s v` for `s = 0..=#pyramids`, via a count sweep over the
/// per-pyramid `P_Y`.
pub fn coarse_components(dec: &XYDecomposition, dims: &[usize], v: &StateVector) -> Result<Vec<StateVector>> {
    let mut comps = vec![v.clone()];
    for (p, s) in dec.pyramids.iter().zip(&dec.spaces) {
        if s.y_space.is_empty() {
            continue;
        }
        let py: Vec<StateVector> = comps
            .iter()
            .map(|c| linalg::apply_local(s.y_projector(), &p.support, dims, c))
            .collect::<Result<_>>()?;
        comps.push(StateVector::zeros(v.len()));
        for c in (0..comps.len()).rev() {
            if c < py.len() {
                comps[c] -= &py[c];
            }
            if c > 0 {
                comps[c] += &py[c - 1];
            }
        }
    }
    comps.resize(dec.pyramids.len() + 1, StateVector::zeros(v.len()));
    Ok(comps)
}

/// `||P_s v||^2` for `s = 0..=#pyramids`.
pub fn coarse_weights(dec: &XYDecomposition, dims: &[usize], v: &StateVector) -> Result<Vec<f64>> {
    Ok(coarse_components(dec, dims, v)?
        .iter()
        .map(|c| c.norm_squared())
        .collect())
}

/// `Pi^{<=ell}_layer v`.
pub fn project_le(sys: &QSatSystem, layer: usize, ell: usize, v: &StateVector) -> Result<StateVector> {
    let ids = sys.layer(layer)?.to_vec();
    project_at_most(sys, &ids, ell, v)
}

/// The split of one layer's `Pi^{<=ell}` into pyramid and outside parts:
/// `Pi^{<=ell} = sum_j Pi^pyr_j Pi^rest_{<=ell-j}`.
#[derive(Clone, Debug)]
pub struct LayerSplit {
    pub layer: usize,
    pub ell: usize,
    pub inside: Vec<usize>,
    pub outside: Vec<usize>,
}

impl LayerSplit {
    /// Exactly `j` violations among the pyramid members of the layer.
    pub fn pyr(&self, sys: &QSatSystem, j: usize, v: &StateVector) -> Result<StateVector> {
        project_exactly(sys, &self.inside, j, v)
    }

    /// At most `m` violations among the layer's constraints outside the pyramids.
    pub fn rest(&self, sys: &QSatSystem, m: usize, v: &StateVector) -> Result<StateVector> {
        project_at_most(sys, &self.outside, m, v)
    }

    /// `sum_{j=0}^{ell} Pi^pyr_j Pi^rest_{<=ell-j} v`.
    pub fn apply(&self, sys: &QSatSystem, v: &StateVector) -> Result<StateVector> {
        let mut out = StateVector::zeros(v.len());
        for j in 0..=self.ell {
            out += self.pyr(sys, j, &self.rest(sys, self.ell - j, v)?)?;
        }
        Ok(out)
    }
}

pub fn inside_outside_split(
    dec: &XYDecomposition,
    sys: &QSatSystem,
    layer: usize,
    ell: usize,
) -> Result<LayerSplit> {
    Ok(LayerSplit {
        layer,
        ell,
        inside: dec.inside(layer),
        outside: dec.outside(sys, layer)?,
    })
}

/// Draws a Haar-random state of the system's dimension from `(seed, stream)`.
pub fn seeded_state(dim: usize, seed: u64, stream: u64) -> StateVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    linalg::random_state(dim, &mut rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{C64, ONE, ZERO};
    use crate::qsat::Constraint;

    fn ket_proj(v: &[C64]) -> ComplexMatrix {
        let s = StateVector::from_column_slice(v);
        &s * s.adjoint()
    }

    fn angle_system(a: f64) -> QSatSystem {
        let p0 = ket_proj(&[ONE, ZERO]);
        let pa = ket_proj(&[C64::from(a.cos()), C64::from(a.sin())]);
        QSatSystem::new(
            vec![2],
            vec![Constraint::new(vec![0], p0), Constraint::new(vec![0], pa)],
        )
        .unwrap()
        .layered()
    }

    fn proj_11() -> ComplexMatrix {
        let mut p = ComplexMatrix::zeros(4, 4);
        p[(3, 3)] = ONE;
        p
    }

    fn path(n: usize) -> QSatSystem {
        let cs = (0..n - 1)
            .map(|i| Constraint::new(vec![i, i + 1], proj_11()))
            .collect();
        QSatSystem::new(vec![2; n], cs).unwrap().layered()
    }

    /// Plain enumeration of every ordering and complement pattern.
    fn theta_brute(pyr: &Pyramid, sys: &QSatSystem, y: &SubspaceBasis) -> f64 {
        let ids: Vec<usize> = pyr.all_members().collect();
        let n = ids.len();
        let d = pyr.local_dim;
        let qs: Vec<ComplexMatrix> = ids
            .iter()
            .map(|&c| pyr.local_projector(sys, c).unwrap())
            .collect();
        let py = y.projector();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut best = 0.0_f64;
        loop {
            for mask in 0..(1usize << n) {
                let mut m = py.clone();
                for (pos, &i) in perm.iter().enumerate() {
                    let f = if mask >> pos & 1 == 1 {
                        qs[i].clone()
                    } else {
                        ComplexMatrix::identity(d, d) - &qs[i]
                    };
                    m *= f;
                }
                best = best.max(operator_norm(&(m * &py)));
            }
            // next lexicographic permutation
            let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| perm[i] < perm[i + 1]) else {
                break;
            };
            let j = (i + 1..n).rev().find(|&j| perm[j] > perm[i]).unwrap();
            perm.swap(i, j);
            perm[i + 1..].reverse();
        }
        best
    }

    #[test]
    fn path_pyramid_closure() {
        let sys = path(3);
        let pyrs = build_pyramids(&sys, 0, &[0]).unwrap();
        assert_eq!(pyrs.len(), 1);
        assert_eq!(pyrs[0].members, vec![vec![0], vec![1]]);
        assert_eq!(pyrs[0].support, vec![0, 1, 2]);
    }

    #[test]
    fn far_apexes_give_two_pyramids() {
        let sys = QSatSystem::new(
            vec![2; 4],
            vec![
                Constraint::new(vec![0, 1], proj_11()),
                Constraint::new(vec![2, 3], proj_11()),
            ],
        )
        .unwrap()
        .layered();
        assert_eq!(build_pyramids(&sys, 0, &[]).unwrap().len(), 2);
    }

    #[test]
    fn diagonal_pyramid_has_empty_y() {
        let sys = path(4);
        let dec = XYDecomposition::build(&sys, 0, &[], &ThetaOptions::default()).unwrap();
        for (p, s) in dec.pyramids.iter().zip(&dec.spaces) {
            assert!(s.y_space.is_empty());
            let total: usize = s.x_spaces.iter().map(|x| x.basis.dim()).sum();
            assert_eq!(total, p.local_dim);
        }
        assert_eq!(dec.theta(), 0.0);
    }

    #[test]
    fn non_commuting_pair_is_all_y() {
        let sys = angle_system(std::f64::consts::FRAC_PI_4);
        let dec = XYDecomposition::build(&sys, 0, &[], &ThetaOptions::default()).unwrap();
        assert_eq!(dec.spaces[0].y_space.dim(), 2);
        assert!(dec.spaces[0].x_spaces.is_empty());
    }

    #[test]
    fn theta_angle_family() {
        use std::f64::consts::PI;
        for (a, expected) in [
            (PI / 4.0, (PI / 4.0).cos()),
            (PI / 3.0, (PI / 6.0).cos()),
            (PI / 6.0, (PI / 6.0).cos()),
        ] {
            let sys = angle_system(a);
            let dec = XYDecomposition::build(&sys, 0, &[], &ThetaOptions::default()).unwrap();
            assert!((dec.theta() - expected).abs() < 1e-12, "a={a}: {}", dec.theta());
            assert!(dec.theta_exact());
        }
    }

    #[test]
    fn theta_matches_brute_force_on_random_path() {
        use crate::linalg::random_state;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let cs = (0..3)
            .map(|i| {
                let v = random_state(4, &mut rng);
                Constraint::new(vec![i, i + 1], &v * v.adjoint())
            })
            .collect();
        let sys = QSatSystem::new(vec![2; 4], cs).unwrap().layered();
        let dec = XYDecomposition::build(&sys, 0, &[], &ThetaOptions::default()).unwrap();
        for (p, s) in dec.pyramids.iter().zip(&dec.spaces) {
            let brute = theta_brute(p, &sys, &s.y_space);
            assert!((s.theta - brute).abs() < 1e-12, "{} vs {brute}", s.theta);
        }
        for seed in 0..3 {
            let shuffled = XYDecomposition::build(
                &sys,
                0,
                &[],
                &ThetaOptions {
                    shuffle: Some(seed),
                    ..Default::default()
                },
            )
            .unwrap();
            assert!((shuffled.theta() - dec.theta()).abs() < 1e-12);
        }
        let sampled = XYDecomposition::build(
            &sys,
            0,
            &[],
            &ThetaOptions {
                mode: ThetaMode::Sampled,
                cap: 200,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(!sampled.theta_exact());
        assert!(sampled.theta() <= dec.theta() + 1e-12);
    }

    #[test]
    fn coarse_weights_single_y_pyramid() {
        let sys = angle_system(0.7);
        let dec = XYDecomposition::build(&sys, 0, &[], &ThetaOptions::default()).unwrap();
        let psi = seeded_state(2, 3, 0);
        let w = coarse_weights(&dec, sys.dims(), &psi).unwrap();
        assert!((w[1] - 1.0).abs() < 1e-12);
        let nu = Sector(vec![SectorLabel::Y]);
        let p = apply_sector(&dec, sys.dims(), &nu, &psi).unwrap();
        assert!((p - &psi).norm() < 1e-12);
        assert!(matches!(
            apply_sector(&dec, sys.dims(), &Sector(vec![]), &psi),
            Err(Error::BadSector(_))
        ));
    }

    #[test]
    fn project_le_examples() {
        let sys = path(3);
        let psi = crate::qsat::basis_state(8, 7);
        let layer = sys.layer(0).unwrap().to_vec();
        assert_eq!(layer, vec![0]);
        assert!(project_le(&sys, 0, 0, &psi).unwrap().norm() < 1e-15);
        assert!((project_le(&sys, 0, 1, &psi).unwrap() - &psi).norm() < 1e-15);
    }

    #[test]
    fn split_without_pyramid_members() {
        // Only layer 1 has constraints outside the (single) pyramid.
        let sys = QSatSystem::new(
            vec![2; 5],
            vec![
                Constraint::new(vec![0, 1], proj_11()),
                Constraint::new(vec![1, 2], proj_11()),
                Constraint::new(vec![3, 4], proj_11()),
            ],
        )
        .unwrap()
        .with_layers(vec![vec![0], vec![1, 2]]);
        let dec = XYDecomposition::build(&sys, 0, &[], &ThetaOptions::default()).unwrap();
        let split = inside_outside_split(&dec, &sys, 1, 0).unwrap();
        assert_eq!(split.inside, vec![1]);
        assert_eq!(split.outside, vec![2]);
        let psi = seeded_state(32, 5, 0);
        let a = split.apply(&sys, &psi).unwrap();
        let b = project_le(&sys, 1, 0, &psi).unwrap();
        assert!((a - b).norm() < 1e-12);
    }
}
