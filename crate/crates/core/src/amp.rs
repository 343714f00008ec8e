//! Gap amplification by t-walks: classical constraint graphs and their
//! quantum counterparts.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::detect::{k_branch_constants, SystemBounds};
use crate::error::{Error, Result};
use crate::linalg::{
    self, hermitian_eig_capped, kernel, ComplexMatrix, LanczosOptions, LocalIndex, StateVector, C64,
    DENSE_CAP, RANK_TOL,
};
use crate::qsat::{Constraint, QSatSystem};
use crate::report::CheckReport;
use crate::walks::{for_each_walk, spectral, walk_avoid_probability, Graph, Walk, WALK_CAP};

/// `c(λ) = 1 / (2 + 2/(1-λ))`.
pub fn c_of_lambda(lambda: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(Error::InvalidLambda(lambda));
    }
    Ok(1.0 / (2.0 + 2.0 / (1.0 - lambda)))
}

/// A constraint graph: `allowed[e][a * q + b]` says whether edge `e = (u, v)`
/// accepts `σ(u) = a, σ(v) = b`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalCSP {
    graph: Graph,
    alphabet: usize,
    allowed: Vec<Vec<bool>>,
}

impl ClassicalCSP {
    pub fn new(graph: Graph, alphabet: usize, allowed: Vec<Vec<bool>>) -> Result<Self> {
        if allowed.len() != graph.m() {
            return Err(Error::BadGraph(format!(
                "{} tables for {} edges",
                allowed.len(),
                graph.m()
            )));
        }
        if let Some(i) = allowed.iter().position(|t| t.len() != alphabet * alphabet) {
            return Err(Error::BadGraph(format!("table {i} is not {alphabet}x{alphabet}")));
        }
        Ok(Self {
            graph,
            alphabet,
            allowed,
        })
    }

    /// `σ(u) != σ(v)` on every edge.
    pub fn inequality(graph: Graph, q: usize) -> Self {
        let table: Vec<bool> = (0..q * q).map(|i| i / q != i % q).collect();
        let m = graph.m();
        Self::new(graph, q, vec![table; m]).expect("consistent tables")
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn allows(&self, e: usize, a: usize, b: usize) -> bool {
        self.allowed[e][a * self.alphabet + b]
    }

    fn check_assignment(&self, sigma: &[usize]) -> Result<()> {
        if sigma.len() != self.graph.n() {
            return Err(Error::DimensionMismatch {
                expected: self.graph.n(),
                found: sigma.len(),
            });
        }
        if let Some(v) = sigma.iter().position(|&s| s >= self.alphabet) {
            return Err(Error::BadSupport(format!("symbol at vertex {v} out of range")));
        }
        Ok(())
    }

    /// Edges violated by `sigma`.
    pub fn unsat_edges(&self, sigma: &[usize]) -> Result<Vec<usize>> {
        self.check_assignment(sigma)?;
        Ok(self
            .graph
            .edges()
            .iter()
            .enumerate()
            .filter(|&(e, &(u, v))| !self.allows(e, sigma[u], sigma[v]))
            .map(|(e, _)| e)
            .collect())
    }

    /// Fraction of violated edges.
    pub fn unsat(&self, sigma: &[usize]) -> Result<f64> {
        Ok(self.unsat_edges(sigma)?.len() as f64 / self.graph.m() as f64)
    }

    /// Fraction of `t`-walks using at least one violated edge.
    pub fn unsat_t(&self, sigma: &[usize], t: usize) -> Result<f64> {
        let bad = self.unsat_edges(sigma)?;
        Ok(1.0 - walk_avoid_probability(&self.graph, &bad, t))
    }
}

/// Lower bound on `UNSAT(G^t)` from the classical lemma:
/// `t c UNSAT` when `UNSAT <= 1/t`, else `c`.
pub fn classical_bound(c: f64, unsat: f64, t: usize) -> f64 {
    if unsat * t as f64 <= 1.0 {
        t as f64 * c * unsat
    } else {
        c
    }
}

/// Checks the classical amplification lemma for one assignment.
pub fn verify_classical_amp(
    csp: &ClassicalCSP,
    sigma: &[usize],
    t: usize,
    trial: usize,
) -> Result<CheckReport> {
    let spec = spectral(csp.graph())?;
    if spec.bipartite {
        return Err(Error::InvalidLambda(1.0));
    }
    let c = c_of_lambda(spec.lambda)?;
    let u = csp.unsat(sigma)?;
    let ut = csp.unsat_t(sigma, t)?;
    let rhs = classical_bound(c, u, t);
    let mut rep = CheckReport::new(
        "classical-amp",
        json!({"t": t, "lambda": spec.lambda, "c": c, "unsat": u, "unsat_t": ut,
               "ratio": if u > 0.0 { ut / u } else { 0.0 }}),
    );
    rep.trials = 1;
    rep.check_ge_with(trial, "UNSAT(G^t)", ut, rhs, 1e-10);
    Ok(rep)
}

/// A QSAT system with one two-qudit constraint per graph edge.
#[derive(Clone, Debug)]
pub struct QuantumWalkSystem {
    graph: Graph,
    base: QSatSystem,
    q: usize,
    /// Constraint id of each edge.
    edge_constraint: Vec<usize>,
}

impl QuantumWalkSystem {
    pub fn new(graph: Graph, base: QSatSystem) -> Result<Self> {
        if base.n() != graph.n() {
            return Err(Error::DimensionMismatch {
                expected: graph.n(),
                found: base.n(),
            });
        }
        let q = base.dims().first().copied().unwrap_or(0);
        if base.dims().iter().any(|&d| d != q) {
            return Err(Error::BadSupport("all qudits must share one dimension".into()));
        }
        let mut edge_constraint = vec![usize::MAX; graph.m()];
        for (i, c) in base.constraints().iter().enumerate() {
            let e = match c.support[..] {
                [u, v] => graph.edge_id(u, v),
                _ => None,
            }
            .ok_or_else(|| Error::BadSupport(format!("constraint {i} does not sit on an edge")))?;
            if edge_constraint[e] != usize::MAX {
                return Err(Error::BadSupport(format!("edge {e} carries two constraints")));
            }
            edge_constraint[e] = i;
        }
        if let Some(e) = edge_constraint.iter().position(|&c| c == usize::MAX) {
            return Err(Error::BadSupport(format!("edge {e} has no constraint")));
        }
        Ok(Self {
            graph,
            base,
            q,
            edge_constraint,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn base(&self) -> &QSatSystem {
        &self.base
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn edge_constraint(&self, e: usize) -> usize {
        self.edge_constraint[e]
    }

    /// The same graph with only the constraints in `keep` left active; the
    /// others become the zero projector. Layers are carried over.
    pub fn restrict(&self, keep: &[usize]) -> Result<Self> {
        let cs: Vec<Constraint> = self
            .base
            .constraints()
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if keep.contains(&i) {
                    c.clone()
                } else {
                    let d = c.projector.nrows();
                    Constraint::new(c.support.clone(), ComplexMatrix::zeros(d, d))
                }
            })
            .collect();
        let mut base = QSatSystem::new(self.base.dims().to_vec(), cs)?;
        if let Some(l) = self.base.layers() {
            base = base.with_layers(l.clone());
        }
        Self::new(self.graph.clone(), base)
    }

    /// `QUNSAT_ψ(G) = <ψ|H|ψ> / |E|`.
    pub fn qunsat(&self, psi: &StateVector) -> Result<f64> {
        Ok(self.base.energy(psi)? / self.graph.m() as f64)
    }

    /// `QUNSAT(G) = ε₀ / |E|`.
    pub fn qunsat_ground(&self) -> Result<f64> {
        Ok(self.base.ground_energy()? / self.graph.m() as f64)
    }
}

/// Projector of a walk: the complement of the common kernel of its edge
/// constraints, on the walk's distinct vertices (sorted).
pub fn build_walk_projector(qws: &QuantumWalkSystem, walk: &Walk) -> Result<Constraint> {
    walk.validate(&qws.graph)?;
    let mut edges = walk.edges.clone();
    edges.sort_unstable();
    edges.dedup();
    edge_set_projector(qws, &edges, DENSE_CAP)
}

fn edge_set_projector(qws: &QuantumWalkSystem, edges: &[usize], cap: usize) -> Result<Constraint> {
    let mut vertices: Vec<usize> = edges
        .iter()
        .flat_map(|&e| {
            let (u, v) = qws.graph.edge(e);
            [u, v]
        })
        .collect();
    vertices.sort_unstable();
    vertices.dedup();
    let local_dims = vec![qws.q; vertices.len()];
    let dim = linalg::total_dim(&local_dims);
    if dim > cap {
        return Err(Error::DimensionTooLarge { dim, cap });
    }
    let mut sum = ComplexMatrix::zeros(dim, dim);
    for &e in edges {
        let c = qws.base.constraint(qws.edge_constraint[e]);
        let positions: Vec<usize> = c
            .support
            .iter()
            .map(|q| {
                vertices
                    .binary_search(q)
                    .expect("edge endpoints are walk vertices")
            })
            .collect();
        sum += linalg::embed_local(&c.projector, &positions, &local_dims)?;
    }
    let accept = kernel(&sum, RANK_TOL)?;
    let q = ComplexMatrix::identity(dim, dim) - accept.projector();
    Ok(Constraint::new(vertices, q))
}

/// `H_t = (1/#walks) sum_walks Q_walk`, with walks grouped by their edge set.
#[derive(Clone, Debug)]
pub struct WalkHamiltonian {
    pub t: usize,
    pub walks: u128,
    /// Distinct walk projectors and their weights `multiplicity / #walks`.
    pub terms: Vec<(Constraint, f64)>,
    dims: Vec<usize>,
}

const MATVEC_CHUNKS: usize = 16;

impl WalkHamiltonian {
    pub fn build(qws: &QuantumWalkSystem, t: usize, cap: u64) -> Result<Self> {
        let mut groups: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
        let mut total: u128 = 0;
        for_each_walk(&qws.graph, t, cap, |w| {
            let mut e = w.edges.clone();
            e.sort_unstable();
            e.dedup();
            *groups.entry(e).or_insert(0) += 1;
            total += 1;
        })?;
        let keys: Vec<(Vec<usize>, u64)> = groups.into_iter().collect();
        let terms = keys
            .par_iter()
            .map(|(edges, count)| {
                Ok((
                    edge_set_projector(qws, edges, DENSE_CAP)?,
                    *count as f64 / total as f64,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            t,
            walks: total,
            terms,
            dims: qws.base.dims().to_vec(),
        })
    }

    pub fn dim(&self) -> usize {
        linalg::total_dim(&self.dims)
    }

    /// `H_t v`, summed in a fixed chunk order so results do not depend on
    /// the thread count.
    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        let n = self.dim();
        if v.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: v.len(),
            });
        }
        let chunk = self.terms.len().div_ceil(MATVEC_CHUNKS).max(1);
        let parts = self
            .terms
            .par_chunks(chunk)
            .map(|terms| {
                let mut out = StateVector::zeros(n);
                for (c, w) in terms {
                    let idx = LocalIndex::new(&c.support, &self.dims)?;
                    let scaled = &c.projector * C64::from(*w);
                    idx.apply_into(&scaled, v.as_slice(), out.as_mut_slice());
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut out = StateVector::zeros(n);
        for p in parts {
            out += p;
        }
        Ok(out)
    }

    /// `QUNSAT_ψ(G^t) = <ψ|H_t|ψ>`.
    pub fn expectation(&self, psi: &StateVector) -> Result<f64> {
        Ok(psi.dotc(&self.apply(psi)?).re)
    }

    /// `<b|H_t|b>` for the computational basis state with digits `sigma`.
    pub fn basis_expectation(&self, sigma: &[usize]) -> f64 {
        self.terms
            .iter()
            .map(|(c, w)| {
                let mut local = 0;
                let mut stride = 1;
                for &v in &c.support {
                    local += sigma[v] * stride;
                    stride *= self.dims[v];
                }
                w * c.projector[(local, local)].re
            })
            .sum()
    }

    pub fn dense(&self, cap: usize) -> Result<ComplexMatrix> {
        let n = self.dim();
        if n > cap {
            return Err(Error::DimensionTooLarge { dim: n, cap });
        }
        let mut h = ComplexMatrix::zeros(n, n);
        for (c, w) in &self.terms {
            h += linalg::embed_local(&c.projector, &c.support, &self.dims)? * C64::from(*w);
        }
        Ok(h)
    }

    /// `QUNSAT(G^t)` and a minimizing state, by Lanczos.
    pub fn ground_lanczos(&self, opts: &LanczosOptions) -> Result<(f64, StateVector)> {
        let matvec = |v: &StateVector| self.apply(v).expect("dimension checked");
        linalg::lowest_eigenpair(matvec, self.dim(), opts)
    }

    /// `QUNSAT(G^t)` and a minimizing state, by dense diagonalization.
    pub fn ground_dense(&self, cap: usize) -> Result<(f64, StateVector)> {
        let h = self.dense(cap)?;
        let (vals, vecs) = hermitian_eig_capped(&h, 1e-8 * h.norm().max(1.0), cap)?;
        Ok((vals[0], vecs.vector(0)))
    }
}

/// `QUNSAT(G^t)`: dense below the cap, Lanczos above it.
pub fn qunsat_ground_t(qws: &QuantumWalkSystem, t: usize) -> Result<f64> {
    let h = WalkHamiltonian::build(qws, t, WALK_CAP)?;
    if h.dim() <= DENSE_CAP {
        Ok(h.ground_dense(DENSE_CAP)?.0)
    } else {
        Ok(h.ground_lanczos(&LanczosOptions::default())?.0)
    }
}

/// Right-hand side of the main amplification inequality, multiplied through
/// by `QUNSAT(G) = ε₀/|E|`:
/// `(t c/|E|) sum_{j <= |E|/t} j α_j² + c sum_{j > |E|/t} α_j²`.
pub fn main_amp_rhs(weights: &[f64], c: f64, t: usize, edges: usize) -> f64 {
    let t_f = t as f64;
    let m = edges as f64;
    weights
        .iter()
        .enumerate()
        .map(|(j, &w)| {
            if j as f64 * t_f <= m {
                t_f * c * j as f64 / m * w
            } else {
                c * w
            }
        })
        .sum()
}

#[derive(Clone, Debug, Serialize)]
pub struct QuantumAmpRow {
    pub t: usize,
    pub qunsat_g: f64,
    pub qunsat_gt: f64,
    pub ratio: Option<f64>,
    pub lemma_rhs: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct QuantumAmpReport {
    pub lambda: f64,
    pub c: f64,
    pub k_eff: Option<f64>,
    pub rows: Vec<QuantumAmpRow>,
    /// (a) the lemma with `K_eff`.
    pub lemma: CheckReport,
    /// Non-decreasing `QUNSAT(G^t)` in `t`.
    pub monotone: CheckReport,
    /// Amplification bound from the measured violation spectra, per layer.
    pub main_amp: CheckReport,
    /// Classical reduction on computational basis states (diagonal systems only).
    pub sectors: CheckReport,
    /// Lanczos against dense diagonalization.
    pub oracle: CheckReport,
}

impl QuantumAmpReport {
    pub fn passed(&self) -> bool {
        [
            &self.lemma,
            &self.monotone,
            &self.main_amp,
            &self.sectors,
            &self.oracle,
        ]
        .iter()
        .all(|r| r.passed())
    }
}

/// Runs every checkable part of the quantum amplification lemma for walk
/// lengths `1..=t_max`. The base system must carry its layers.
pub fn verify_quantum_amp(
    qws: &QuantumWalkSystem,
    t_max: usize,
    bounds: &SystemBounds,
) -> Result<QuantumAmpReport> {
    verify_quantum_amp_capped(qws, t_max, bounds, &AmpCaps::default())
}

/// Size limits for [`verify_quantum_amp_capped`].
#[derive(Clone, Debug, Serialize)]
pub struct AmpCaps {
    /// Most walks enumerated for one `H_t`.
    pub walks: u64,
    /// Largest dimension diagonalized densely; bigger runs use Lanczos only.
    pub dense: usize,
}

impl Default for AmpCaps {
    fn default() -> Self {
        Self {
            walks: WALK_CAP,
            dense: DENSE_CAP,
        }
    }
}

pub fn verify_quantum_amp_capped(
    qws: &QuantumWalkSystem,
    t_max: usize,
    bounds: &SystemBounds,
    caps: &AmpCaps,
) -> Result<QuantumAmpReport> {
    let graph = &qws.graph;
    if graph.regular_degree().is_none() {
        return Err(Error::BadGraph("amplification runs need a regular graph".into()));
    }
    let spec = spectral(graph)?;
    if spec.bipartite {
        return Err(Error::InvalidLambda(1.0));
    }
    let c = c_of_lambda(spec.lambda)?;
    let m = graph.m();
    let qg = bounds.epsilon0 / m as f64;
    let p = bounds.params(0);
    let k = if p.theta_exact && p.theta < 1.0 {
        Some(k_branch_constants(&p, spec.lambda)?)
    } else {
        None
    };
    let params = json!({"lambda": spec.lambda, "c": c, "k": k, "bounds": p});
    let mut lemma = CheckReport::new("quantum-amp-lemma", params.clone());
    let mut monotone = CheckReport::new("quantum-amp-monotone", params.clone());
    let mut main_amp = CheckReport::new("spectrum-amp", params.clone());
    let mut oracle = CheckReport::new("lanczos-vs-dense", params.clone());
    let diagonal = qws.base.is_diagonal();
    let mut sectors = if diagonal {
        CheckReport::new("sector-classical", params.clone())
    } else {
        CheckReport::skipped("sector-classical", params.clone(), "constraints are not diagonal")
    };
    let layers = qws.base.require_layers()?.clone();
    let mut rows = Vec::new();
    let mut prev: Option<f64> = None;
    for t in 1..=t_max {
        let h = WalkHamiltonian::build(qws, t, caps.walks)?;
        let (e_l, _) = h.ground_lanczos(&LanczosOptions::default())?;
        let (e_t, ground) = if h.dim() <= caps.dense {
            let (e_d, v) = h.ground_dense(caps.dense)?;
            oracle.trials += 1;
            oracle.check_le_with(t, "|lanczos - dense|", (e_l - e_d).abs(), 0.0, 1e-7);
            (e_d, v)
        } else {
            h.ground_lanczos(&LanczosOptions::default())?
        };
        let min_term = (t as f64 * qg).min(1.0);
        let rhs = k.as_ref().map_or(f64::NAN, |k| c * k.k_eff * min_term);
        let mut pass = true;
        if k.is_some() {
            lemma.trials += 1;
            pass &= lemma.check_ge_with(t, "QUNSAT(G^t)", e_t, rhs, 1e-7);
        }
        if let Some(pv) = prev {
            monotone.trials += 1;
            pass &= monotone.check_ge_with(t, "QUNSAT(G^t) - QUNSAT(G^(t-1))", e_t, pv, 1e-8);
        }
        prev = Some(e_t);
        // Main-amp on the minimizing state, for each layer.
        let q_psi = h.expectation(&ground)?;
        for (li, _) in layers.iter().enumerate() {
            main_amp.trials += 1;
            let spectrum = qws.base.violation_spectrum(li, &ground, false)?;
            let bound = main_amp_rhs(&spectrum.weights, c, t, m);
            pass &= main_amp.check_ge_with(t, &format!("layer {li}"), q_psi, bound, 1e-7);
        }
        if diagonal {
            pass &= check_sectors(qws, t, c, &layers, &mut sectors)?;
        }
        rows.push(QuantumAmpRow {
            t,
            qunsat_g: qg,
            qunsat_gt: e_t,
            ratio: (qg > 0.0).then(|| e_t / qg),
            lemma_rhs: rhs,
            pass,
        });
    }
    Ok(QuantumAmpReport {
        lambda: spec.lambda,
        c,
        k_eff: k.map(|k| k.k_eff),
        rows,
        lemma,
        monotone,
        main_amp,
        sectors,
        oracle,
    })
}

/// Classical value of a diagonal constraint: `allowed[a*q+b]` iff `<ab|Q|ab> = 0`.
pub fn diagonal_to_csp(qws: &QuantumWalkSystem) -> Result<ClassicalCSP> {
    let q = qws.q;
    let allowed = (0..qws.graph.m())
        .map(|e| {
            let c = qws.base.constraint(qws.edge_constraint[e]);
            let (u, _) = qws.graph.edge(e);
            // Local index: support[0] is the least significant digit.
            (0..q * q)
                .map(|i| {
                    let (a, b) = (i / q, i % q);
                    let (x0, x1) = if c.support[0] == u { (a, b) } else { (b, a) };
                    c.projector[(x0 + q * x1, x0 + q * x1)].re < 0.5
                })
                .collect()
        })
        .collect();
    ClassicalCSP::new(qws.graph.clone(), q, allowed)
}

fn check_sectors(
    qws: &QuantumWalkSystem,
    t: usize,
    c: f64,
    layers: &[Vec<usize>],
    rep: &mut CheckReport,
) -> Result<bool> {
    let n = qws.graph.n();
    let q = qws.q;
    let states = q.pow(n as u32);
    let m = qws.graph.m();
    let mut ok = true;
    for layer in layers {
        let sub = qws.restrict(layer)?;
        let h = WalkHamiltonian::build(&sub, t, WALK_CAP)?;
        let csp = diagonal_to_csp(&sub)?;
        for index in 0..states {
            let sigma: Vec<usize> = (0..n).map(|v| index / q.pow(v as u32) % q).collect();
            let quantum = h.basis_expectation(&sigma);
            let classical = csp.unsat_t(&sigma, t)?;
            let j = csp.unsat_edges(&sigma)?.len();
            rep.trials += 1;
            ok &= rep.check_le_with(
                index,
                "|quantum - classical|",
                (quantum - classical).abs(),
                0.0,
                1e-12,
            );
            ok &= rep.check_ge_with(
                index,
                "sector bound",
                quantum,
                classical_bound(c, j as f64 / m as f64, t),
                1e-10,
            );
        }
    }
    Ok(ok)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ONE;

    fn proj_11() -> ComplexMatrix {
        let mut p = ComplexMatrix::zeros(4, 4);
        p[(3, 3)] = ONE;
        p
    }

    fn edge_system(g: &Graph, p: &ComplexMatrix) -> QuantumWalkSystem {
        let cs = g
            .edges()
            .iter()
            .map(|&(u, v)| Constraint::new(vec![u, v], p.clone()))
            .collect();
        let base = QSatSystem::new(vec![2; g.n()], cs).unwrap().layered();
        QuantumWalkSystem::new(g.clone(), base).unwrap()
    }

    #[test]
    fn c_of_lambda_examples() {
        assert_eq!(c_of_lambda(0.0).unwrap(), 0.25);
        assert!((c_of_lambda(0.5).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert!((c_of_lambda(1.0 / 3.0).unwrap() - 0.2).abs() < 1e-15);
        assert!(matches!(c_of_lambda(1.0), Err(Error::InvalidLambda(_))));
    }

    #[test]
    fn unsat_examples() {
        let k4 = ClassicalCSP::inequality(Graph::complete(4), 2);
        let best = (0..16)
            .map(|i| {
                let s: Vec<usize> = (0..4).map(|v| i >> v & 1).collect();
                k4.unsat(&s).unwrap()
            })
            .fold(f64::INFINITY, f64::min);
        assert!((best - 2.0 / 6.0).abs() < 1e-15);
        assert!(best >= 1.0 / 6.0);
        let eq = ClassicalCSP::new(Graph::cycle(4), 2, vec![vec![true, false, false, true]; 4]).unwrap();
        assert_eq!(eq.unsat(&[1, 1, 1, 1]).unwrap(), 0.0);
        assert_eq!(eq.unsat_t(&[1, 1, 1, 1], 5).unwrap(), 0.0);
        let s = [0, 0, 1, 1];
        assert!((eq.unsat_t(&s, 1).unwrap() - eq.unsat(&s).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn unsat_t_matches_enumeration_on_c4() {
        let g = Graph::cycle(4);
        let csp = ClassicalCSP::new(g.clone(), 2, vec![vec![true, false, false, true]; 4]).unwrap();
        let sigma = [0, 1, 1, 1];
        let bad = csp.unsat_edges(&sigma).unwrap();
        let walks = crate::walks::enumerate_walks(&g, 2, WALK_CAP).unwrap();
        assert_eq!(walks.len(), 16);
        let hit = walks
            .iter()
            .filter(|w| w.edges.iter().any(|e| bad.contains(e)))
            .count();
        assert!((csp.unsat_t(&sigma, 2).unwrap() - hit as f64 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn walk_projector_on_path() {
        let g = Graph::path(3);
        let qws = edge_system(&g, &proj_11());
        let walk = Walk {
            vertices: vec![0, 1, 2],
            edges: vec![0, 1],
        };
        let q = build_walk_projector(&qws, &walk).unwrap();
        assert_eq!(q.support, vec![0, 1, 2]);
        let rank: f64 = (0..8).map(|i| q.projector[(i, i)].re).sum();
        assert!((rank - 3.0).abs() < 1e-10);
        let single = Walk {
            vertices: vec![1, 0],
            edges: vec![0],
        };
        let q1 = build_walk_projector(&qws, &single).unwrap();
        assert!((q1.projector - proj_11()).norm() < 1e-10);
        let zero = edge_system(&g, &ComplexMatrix::zeros(4, 4));
        assert!(build_walk_projector(&zero, &walk).unwrap().projector.norm() < 1e-12);
    }

    #[test]
    fn t1_walk_hamiltonian_equals_normalized_h() {
        let g = Graph::complete(4);
        let qws = edge_system(&g, &proj_11());
        let h1 = WalkHamiltonian::build(&qws, 1, WALK_CAP)
            .unwrap()
            .dense(DENSE_CAP)
            .unwrap();
        let h = qws.base().hamiltonian_dense(DENSE_CAP).unwrap() / C64::from(g.m() as f64);
        assert!((h1 - h).norm() < 1e-12);
    }
}
