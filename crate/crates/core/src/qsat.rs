//! k-QSAT instances: qudits, projector constraints, layers, energies and the
//! `.qsat.json` instance format.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    self, hermitian_deviation, ComplexMatrix, LanczosOptions, LocalIndex, StateVector, C64, DENSE_CAP, ZERO,
};

/// Partition of constraint ids into layers; layer 0 is the top layer.
pub type Layers = Vec<Vec<usize>>;

/// A projector acting on the qudits listed in `support`. Its id is its
/// position in the owning system.
#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub support: Vec<usize>,
    pub projector: ComplexMatrix,
}

impl Constraint {
    pub fn new(support: Vec<usize>, projector: ComplexMatrix) -> Self {
        Self { support, projector }
    }

    pub fn intersects(&self, other: &Constraint) -> bool {
        self.support.iter().any(|q| other.support.contains(q))
    }

    pub fn apply(&self, dims: &[usize], v: &StateVector) -> Result<StateVector> {
        linalg::apply_local(&self.projector, &self.support, dims, v)
    }

    pub fn is_diagonal(&self) -> bool {
        let p = &self.projector;
        (0..p.nrows()).all(|r| (0..p.ncols()).all(|c| r == c || p[(r, c)].norm() == 0.0))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QSatSystem {
    dims: Vec<usize>,
    constraints: Vec<Constraint>,
    layers: Option<Layers>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ValidationIssue {
    SupportOutOfRange {
        constraint: usize,
        qudit: usize,
    },
    RepeatedQudit {
        constraint: usize,
        qudit: usize,
    },
    ProjectorShape {
        constraint: usize,
        expected: usize,
        found: (usize, usize),
    },
    NonFinite {
        constraint: usize,
    },
    NotHermitian {
        constraint: usize,
        deviation: f64,
    },
    NotIdempotent {
        constraint: usize,
        deviation: f64,
    },
    UnknownConstraintInLayer {
        layer: usize,
        constraint: usize,
    },
    ConstraintInSeveralLayers {
        constraint: usize,
    },
    ConstraintUnassigned {
        constraint: usize,
    },
    LayerOverlap {
        layer: usize,
        a: usize,
        b: usize,
    },
    BadQuditDimension {
        qudit: usize,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

/// Weights `alpha_j^2` of a state over "exactly j violations" in one layer.
#[derive(Clone, Debug)]
pub struct ViolationSpectrum {
    pub layer: usize,
    pub weights: Vec<f64>,
    pub components: Option<Vec<StateVector>>,
}

impl ViolationSpectrum {
    /// `sum_j j * alpha_j^2`.
    pub fn mean_violations(&self) -> f64 {
        self.weights.iter().enumerate().map(|(j, w)| j as f64 * w).sum()
    }
}

const PROJECTOR_TOL: f64 = 1e-8;

impl QSatSystem {
    /// Builds a system after checking that supports and projector shapes fit
    /// `dims`. Projector-ness and layers are checked by [`QSatSystem::validate`].
    pub fn new(dims: Vec<usize>, constraints: Vec<Constraint>) -> Result<Self> {
        let sys = Self::new_unchecked(dims, constraints);
        for (i, c) in sys.constraints.iter().enumerate() {
            let idx = LocalIndex::new(&c.support, &sys.dims)
                .map_err(|e| Error::BadSupport(format!("constraint {i}: {e}")))?;
            if c.projector.nrows() != idx.local_dim() || c.projector.ncols() != idx.local_dim() {
                return Err(Error::BadSupport(format!(
                    "constraint {i}: projector is {}x{}, support dimension is {}",
                    c.projector.nrows(),
                    c.projector.ncols(),
                    idx.local_dim()
                )));
            }
        }
        Ok(sys)
    }

    pub fn new_unchecked(dims: Vec<usize>, constraints: Vec<Constraint>) -> Self {
        Self {
            dims,
            constraints,
            layers: None,
        }
    }

    pub fn with_layers(mut self, layers: Layers) -> Self {
        self.layers = Some(layers);
        self
    }

    /// Fills in the greedy layer partition when none is present.
    pub fn layered(mut self) -> Self {
        if self.layers.is_none() {
            self.layers = Some(self.compute_layers());
        }
        self
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn constraint(&self, id: usize) -> &Constraint {
        &self.constraints[id]
    }

    pub fn layers(&self) -> Option<&Layers> {
        self.layers.as_ref()
    }

    pub fn require_layers(&self) -> Result<&Layers> {
        self.layers.as_ref().ok_or(Error::NoLayers)
    }

    pub fn layer(&self, layer: usize) -> Result<&[usize]> {
        let layers = self.require_layers()?;
        layers
            .get(layer)
            .map(|l| l.as_slice())
            .ok_or(Error::LayerOutOfRange {
                layer,
                layers: layers.len(),
            })
    }

    /// Number of qudits.
    pub fn n(&self) -> usize {
        self.dims.len()
    }

    /// Number of constraints.
    pub fn m(&self) -> usize {
        self.constraints.len()
    }

    /// Largest support size.
    pub fn k(&self) -> usize {
        self.constraints
            .iter()
            .map(|c| c.support.len())
            .max()
            .unwrap_or(0)
    }

    /// Number of layers (0 when no partition is present).
    pub fn g(&self) -> usize {
        self.layers.as_ref().map_or(0, |l| l.len())
    }

    pub fn total_dim(&self) -> usize {
        linalg::total_dim(&self.dims)
    }

    pub fn is_diagonal(&self) -> bool {
        self.constraints.iter().all(Constraint::is_diagonal)
    }

    pub fn validate(&self) -> ValidationReport {
        let mut issues = Vec::new();
        for (q, &d) in self.dims.iter().enumerate() {
            if d == 0 {
                issues.push(ValidationIssue::BadQuditDimension { qudit: q });
            }
        }
        for (i, c) in self.constraints.iter().enumerate() {
            let mut seen = BTreeSet::new();
            let mut support_ok = true;
            for &q in &c.support {
                if q >= self.dims.len() {
                    issues.push(ValidationIssue::SupportOutOfRange {
                        constraint: i,
                        qudit: q,
                    });
                    support_ok = false;
                } else if !seen.insert(q) {
                    issues.push(ValidationIssue::RepeatedQudit {
                        constraint: i,
                        qudit: q,
                    });
                    support_ok = false;
                }
            }
            if support_ok {
                let expected: usize = c.support.iter().map(|&q| self.dims[q]).product();
                if c.projector.nrows() != expected || c.projector.ncols() != expected {
                    issues.push(ValidationIssue::ProjectorShape {
                        constraint: i,
                        expected,
                        found: (c.projector.nrows(), c.projector.ncols()),
                    });
                    continue;
                }
            }
            if c.projector.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                issues.push(ValidationIssue::NonFinite { constraint: i });
                continue;
            }
            if c.projector.nrows() != c.projector.ncols() {
                continue;
            }
            let herm = hermitian_deviation(&c.projector);
            if herm > PROJECTOR_TOL {
                issues.push(ValidationIssue::NotHermitian {
                    constraint: i,
                    deviation: herm,
                });
            }
            let idem = (&c.projector * &c.projector - &c.projector).norm();
            if idem > PROJECTOR_TOL {
                issues.push(ValidationIssue::NotIdempotent {
                    constraint: i,
                    deviation: idem,
                });
            }
        }
        if let Some(layers) = &self.layers {
            let mut count = vec![0usize; self.constraints.len()];
            for (li, layer) in layers.iter().enumerate() {
                for &id in layer {
                    if id >= self.constraints.len() {
                        issues.push(ValidationIssue::UnknownConstraintInLayer {
                            layer: li,
                            constraint: id,
                        });
                    } else {
                        count[id] += 1;
                    }
                }
                let known: Vec<usize> = layer
                    .iter()
                    .copied()
                    .filter(|&id| id < self.constraints.len())
                    .collect();
                for (x, &a) in known.iter().enumerate() {
                    for &b in &known[x + 1..] {
                        if self.constraints[a].intersects(&self.constraints[b]) {
                            issues.push(ValidationIssue::LayerOverlap { layer: li, a, b });
                        }
                    }
                }
            }
            for (id, &c) in count.iter().enumerate() {
                match c {
                    0 => issues.push(ValidationIssue::ConstraintUnassigned { constraint: id }),
                    1 => {}
                    _ => issues.push(ValidationIssue::ConstraintInSeveralLayers { constraint: id }),
                }
            }
        }
        ValidationReport { issues }
    }

    /// Greedy proper coloring of the constraint-intersection graph, constraints
    /// taken in id order, each receiving the lowest free color.
    pub fn compute_layers(&self) -> Layers {
        let mut by_qudit: Vec<Vec<usize>> = vec![Vec::new(); self.dims.len()];
        for (i, c) in self.constraints.iter().enumerate() {
            for &q in &c.support {
                if q < by_qudit.len() {
                    by_qudit[q].push(i);
                }
            }
        }
        let mut color: Vec<Option<usize>> = vec![None; self.constraints.len()];
        let mut layers: Layers = Vec::new();
        for (i, c) in self.constraints.iter().enumerate() {
            let mut used = BTreeSet::new();
            for &q in &c.support {
                if let Some(list) = by_qudit.get(q) {
                    for &j in list {
                        if let Some(col) = color[j] {
                            used.insert(col);
                        }
                    }
                }
            }
            let col = (0..).find(|x| !used.contains(x)).unwrap();
            color[i] = Some(col);
            if col == layers.len() {
                layers.push(Vec::new());
            }
            layers[col].push(i);
        }
        layers
    }

    fn check_state(&self, psi: &StateVector) -> Result<()> {
        let n = self.total_dim();
        if psi.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: psi.len(),
            });
        }
        Ok(())
    }

    pub fn apply_constraint(&self, id: usize, v: &StateVector) -> Result<StateVector> {
        self.constraints[id].apply(&self.dims, v)
    }

    /// `H v` for `H = sum_i Q_i`.
    pub fn apply_hamiltonian(&self, v: &StateVector) -> Result<StateVector> {
        self.check_state(v)?;
        let mut out = StateVector::zeros(v.len());
        for c in &self.constraints {
            let idx = LocalIndex::new(&c.support, &self.dims)?;
            idx.apply_into(&c.projector, v.as_slice(), out.as_mut_slice());
        }
        Ok(out)
    }

    /// Dense `sum` of the given constraints.
    pub fn dense_sum(&self, ids: &[usize], cap: usize) -> Result<ComplexMatrix> {
        let n = self.total_dim();
        if n > cap {
            return Err(Error::DimensionTooLarge { dim: n, cap });
        }
        let mut h = ComplexMatrix::zeros(n, n);
        for &id in ids {
            let c = &self.constraints[id];
            let idx = LocalIndex::new(&c.support, &self.dims)?;
            for &b in &idx.bases {
                for (r, &ro) in idx.offsets.iter().enumerate() {
                    for (col, &co) in idx.offsets.iter().enumerate() {
                        h[(b + ro, b + co)] += c.projector[(r, col)];
                    }
                }
            }
        }
        Ok(h)
    }

    pub fn hamiltonian_dense(&self, cap: usize) -> Result<ComplexMatrix> {
        let ids: Vec<usize> = (0..self.m()).collect();
        self.dense_sum(&ids, cap)
    }

    /// `<psi|H|psi>`.
    pub fn energy(&self, psi: &StateVector) -> Result<f64> {
        let h = self.apply_hamiltonian(psi)?;
        Ok(psi.dotc(&h).re)
    }

    /// `<psi| sum_{Q in layer} Q |psi>`.
    pub fn layer_energy(&self, layer: usize, psi: &StateVector) -> Result<f64> {
        self.check_state(psi)?;
        let mut e = 0.0;
        for &id in self.layer(layer)? {
            e += psi.dotc(&self.apply_constraint(id, psi)?).re;
        }
        Ok(e)
    }

    /// Ground energy with default solver settings.
    pub fn ground_energy(&self) -> Result<f64> {
        self.ground_state(&GroundOptions::default()).map(|(e, _)| e)
    }

    /// Lowest eigenpair of `H`: dense below the cap, Lanczos above it.
    pub fn ground_state(&self, opts: &GroundOptions) -> Result<(f64, StateVector)> {
        let n = self.total_dim();
        if n <= opts.dense_cap {
            let h = self.hamiltonian_dense(opts.dense_cap)?;
            let (vals, vecs) = linalg::hermitian_eig_capped(&h, 1e-8 * h.norm().max(1.0), opts.dense_cap)?;
            return Ok((vals[0], vecs.vector(0)));
        }
        self.ground_state_lanczos(&opts.lanczos)
    }

    pub fn ground_state_lanczos(&self, opts: &LanczosOptions) -> Result<(f64, StateVector)> {
        let n = self.total_dim();
        let ops: Vec<LocalIndex> = self
            .constraints
            .iter()
            .map(|c| LocalIndex::new(&c.support, &self.dims))
            .collect::<Result<_>>()?;
        let matvec = |v: &StateVector| {
            let mut out = StateVector::zeros(n);
            for (c, idx) in self.constraints.iter().zip(&ops) {
                idx.apply_into(&c.projector, v.as_slice(), out.as_mut_slice());
            }
            out
        };
        linalg::lowest_eigenpair(matvec, n, opts)
    }

    /// Decomposes `psi` by the exact number of violated constraints in `layer`.
    pub fn violation_spectrum(
        &self,
        layer: usize,
        psi: &StateVector,
        keep_components: bool,
    ) -> Result<ViolationSpectrum> {
        self.check_state(psi)?;
        let ids = self.layer(layer)?.to_vec();
        let comps = violation_sweep(self, &ids, psi, ids.len())?;
        let weights = comps.iter().map(|v| v.norm_squared()).collect();
        Ok(ViolationSpectrum {
            layer,
            weights,
            components: keep_components.then_some(comps),
        })
    }

    pub fn to_json(&self) -> Result<Vec<u8>> {
        save_instance(self)
    }
}

#[derive(Clone, Debug)]
pub struct GroundOptions {
    pub dense_cap: usize,
    pub lanczos: LanczosOptions,
}

impl Default for GroundOptions {
    fn default() -> Self {
        Self {
            dense_cap: DENSE_CAP,
            lanczos: LanczosOptions::default(),
        }
    }
}

/// Count-indexed sweep over mutually commuting constraints `ids`: entry `c`
/// of the result is the component of `psi` with exactly `c` of them violated,
/// for `c = 0..=max_count`. Components above `max_count` are dropped.
///
/// Each constraint `Q` updates `v_c <- (I - Q) v_c + Q v_{c-1}`.
pub fn violation_sweep(
    sys: &QSatSystem,
    ids: &[usize],
    psi: &StateVector,
    max_count: usize,
) -> Result<Vec<StateVector>> {
    let n = psi.len();
    let mut comps: Vec<StateVector> = vec![psi.clone()];
    comps.extend((0..max_count.min(ids.len())).map(|_| StateVector::zeros(n)));
    let top = comps.len() - 1;
    for (step, &id) in ids.iter().enumerate() {
        let c = sys.constraint(id);
        let idx = LocalIndex::new(&c.support, sys.dims())?;
        let live = (step + 1).min(top);
        let mut q_of: Vec<StateVector> = Vec::with_capacity(live + 1);
        for v in comps.iter().take(live + 1) {
            let mut out = StateVector::zeros(n);
            idx.apply_into(&c.projector, v.as_slice(), out.as_mut_slice());
            q_of.push(out);
        }
        for cnt in (0..=live).rev() {
            let v = &mut comps[cnt];
            *v -= &q_of[cnt];
            if cnt > 0 {
                *v += &q_of[cnt - 1];
            }
        }
    }
    Ok(comps)
}

/// Projection onto at most `ell` violations among `ids`.
pub fn project_at_most(
    sys: &QSatSystem,
    ids: &[usize],
    ell: usize,
    psi: &StateVector,
) -> Result<StateVector> {
    if ell >= ids.len() {
        return Ok(psi.clone());
    }
    let comps = violation_sweep(sys, ids, psi, ell)?;
    let mut out = StateVector::zeros(psi.len());
    for v in &comps {
        out += v;
    }
    Ok(out)
}

/// Projection onto exactly `j` violations among `ids`.
pub fn project_exactly(sys: &QSatSystem, ids: &[usize], j: usize, psi: &StateVector) -> Result<StateVector> {
    if j > ids.len() {
        return Ok(StateVector::zeros(psi.len()));
    }
    let mut comps = violation_sweep(sys, ids, psi, j)?;
    Ok(comps.swap_remove(j))
}

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    dims: Vec<usize>,
    constraints: Vec<ConstraintFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    layers: Option<Layers>,
}

#[derive(Serialize, Deserialize)]
struct ConstraintFile {
    support: Vec<usize>,
    projector: MatrixFile,
}

#[derive(Serialize, Deserialize)]
pub(crate) struct MatrixFile {
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixFile {
    pub(crate) fn from_matrix(m: &ComplexMatrix) -> Self {
        let dim = m.nrows();
        let mut entries = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                let z = m[(r, c)];
                entries.push([z.re, z.im]);
            }
        }
        Self { dim, entries }
    }

    pub(crate) fn to_matrix(&self, location: &str) -> Result<ComplexMatrix> {
        if self.entries.len() != self.dim * self.dim {
            return Err(Error::Parse {
                line: 0,
                column: 0,
                msg: format!(
                    "{location}: expected {} entries for dim {}, found {}",
                    self.dim * self.dim,
                    self.dim,
                    self.entries.len()
                ),
            });
        }
        Ok(ComplexMatrix::from_fn(self.dim, self.dim, |r, c| {
            let [re, im] = self.entries[r * self.dim + c];
            C64::new(re, im)
        }))
    }
}

/// Serializes to the `.qsat.json` format.
pub fn save_instance(sys: &QSatSystem) -> Result<Vec<u8>> {
    let file = InstanceFile {
        dims: sys.dims.clone(),
        constraints: sys
            .constraints
            .iter()
            .map(|c| ConstraintFile {
                support: c.support.clone(),
                projector: MatrixFile::from_matrix(&c.projector),
            })
            .collect(),
        layers: sys.layers.clone(),
    };
    Ok(serde_json::to_vec(&file)?)
}

/// Parses the `.qsat.json` format. Semantic problems (non-projectors,
/// overlapping layers) are left for [`QSatSystem::validate`].
pub fn load_instance(bytes: &[u8]) -> Result<QSatSystem> {
    let file: InstanceFile = serde_json::from_slice(bytes)?;
    let constraints = file
        .constraints
        .iter()
        .enumerate()
        .map(|(i, c)| {
            Ok(Constraint::new(
                c.support.clone(),
                c.projector.to_matrix(&format!("constraints[{i}].projector"))?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut sys = QSatSystem::new_unchecked(file.dims, constraints);
    sys.layers = file.layers;
    Ok(sys)
}

/// Zero vector of the system's dimension with amplitude 1 on `index`.
pub fn basis_state(dim: usize, index: usize) -> StateVector {
    let mut v = StateVector::from_element(dim, ZERO);
    v[index] = linalg::ONE;
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random_state, ONE};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn proj_11() -> ComplexMatrix {
        let mut p = ComplexMatrix::zeros(4, 4);
        p[(3, 3)] = ONE;
        p
    }

    fn triangle() -> QSatSystem {
        let cs = [(0, 1), (1, 2), (0, 2)]
            .iter()
            .map(|&(a, b)| Constraint::new(vec![a, b], proj_11()))
            .collect();
        QSatSystem::new(vec![2, 2, 2], cs).unwrap().layered()
    }

    fn ket(dim: usize, i: usize) -> StateVector {
        basis_state(dim, i)
    }

    #[test]
    fn validate_examples() {
        let one = QSatSystem::new(vec![2, 2], vec![Constraint::new(vec![0, 1], proj_11())]).unwrap();
        assert!(one.validate().is_valid());

        let half = ComplexMatrix::identity(4, 4) * C64::from(0.5);
        let bad = QSatSystem::new(vec![2, 2], vec![Constraint::new(vec![0, 1], half)]).unwrap();
        assert!(bad
            .validate()
            .issues
            .iter()
            .any(|i| matches!(i, ValidationIssue::NotIdempotent { constraint: 0, .. })));

        let overlapping = QSatSystem::new(
            vec![2, 2, 2],
            vec![
                Constraint::new(vec![0, 1], proj_11()),
                Constraint::new(vec![1, 2], proj_11()),
            ],
        )
        .unwrap()
        .with_layers(vec![vec![0, 1]]);
        assert!(overlapping
            .validate()
            .issues
            .contains(&ValidationIssue::LayerOverlap { layer: 0, a: 0, b: 1 }));

        let out_of_range =
            QSatSystem::new_unchecked(vec![2, 2], vec![Constraint::new(vec![0, 5], proj_11())]);
        assert!(!out_of_range.validate().is_valid());
    }

    #[test]
    fn layers_examples() {
        let path = QSatSystem::new(
            vec![2, 2, 2],
            vec![
                Constraint::new(vec![0, 1], proj_11()),
                Constraint::new(vec![1, 2], proj_11()),
            ],
        )
        .unwrap();
        assert_eq!(path.compute_layers(), vec![vec![0], vec![1]]);
        assert_eq!(triangle().g(), 3);
    }

    #[test]
    fn energy_examples() {
        let t = triangle();
        assert!(t.energy(&ket(8, 0)).unwrap().abs() < 1e-15);
        assert!((t.energy(&ket(8, 7)).unwrap() - 3.0).abs() < 1e-15);
        assert!(matches!(
            t.energy(&ket(4, 0)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn ground_energy_examples() {
        assert!(triangle().ground_energy().unwrap().abs() < 1e-8);
        // |0><0| and |+><+| on one qubit: eigenvalues 1 -+ cos(pi/4).
        let mut p0 = ComplexMatrix::zeros(2, 2);
        p0[(0, 0)] = ONE;
        let plus = ComplexMatrix::from_element(2, 2, C64::from(0.5));
        let sys = QSatSystem::new(
            vec![2],
            vec![Constraint::new(vec![0], p0), Constraint::new(vec![0], plus)],
        )
        .unwrap();
        let e = sys.ground_energy().unwrap();
        assert!((e - (1.0 - std::f64::consts::FRAC_1_SQRT_2)).abs() < 1e-12);
    }

    #[test]
    fn violation_spectrum_examples() {
        let t = triangle();
        let s = t.violation_spectrum(0, &ket(8, 7), false).unwrap();
        assert!((s.weights[1] - 1.0).abs() < 1e-15);
        let s = t.violation_spectrum(0, &ket(8, 0), true).unwrap();
        assert!((s.weights[0] - 1.0).abs() < 1e-15);
        assert!(s.components.is_some());
        assert!(matches!(
            t.violation_spectrum(3, &ket(8, 0), false),
            Err(Error::LayerOutOfRange { .. })
        ));
    }

    #[test]
    fn sweep_matches_layer_energy() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let cs = (0..5)
            .map(|i| {
                Constraint::new(vec![i], {
                    let v = random_state(2, &mut rng);
                    &v * v.adjoint()
                })
            })
            .collect();
        let sys = QSatSystem::new(vec![2; 5], cs).unwrap().layered();
        assert_eq!(sys.g(), 1);
        let psi = random_state(32, &mut rng);
        let s = sys.violation_spectrum(0, &psi, false).unwrap();
        let total: f64 = s.weights.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!((s.mean_violations() - sys.layer_energy(0, &psi).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn load_rejects_malformed() {
        assert!(matches!(
            load_instance(b"{\"dims\": [2,"),
            Err(Error::Parse { .. })
        ));
        let short =
            br#"{"dims":[2],"constraints":[{"support":[0],"projector":{"dim":2,"entries":[[1,0]]}}]}"#;
        assert!(matches!(load_instance(short), Err(Error::Parse { .. })));
    }

    #[test]
    fn layers_survive_round_trip() {
        let t = triangle().with_layers(vec![vec![2], vec![0], vec![1]]);
        let back = load_instance(&save_instance(&t).unwrap()).unwrap();
        assert_eq!(back.layers(), Some(&vec![vec![2], vec![0], vec![1]]));
        assert_eq!(back, t);
    }
}
