//! Instance generators and the pinned standard corpus.
//!
//! Every random family takes an explicit seed and draws from ChaCha8 with
//! `set_stream` per edge, so instances are identical across platforms and
//! thread counts.

use std::f64::consts::PI;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::amp::{ClassicalCSP, QuantumWalkSystem};
use crate::error::{Error, Result};
use crate::linalg::{random_state, ComplexMatrix, StateVector, SubspaceBasis, C64, ONE, ZERO};
use crate::qsat::{Constraint, QSatSystem};
use crate::walks::{random_regular, spectral, Graph};

/// `|v><v| / <v|v>`.
pub fn ket_projector(v: &StateVector) -> ComplexMatrix {
    let u = v / C64::from(v.norm());
    &u * u.adjoint()
}

/// One qubit with `|0><0|` in the top layer and `|a><a|` below it,
/// `|a> = cos a |0> + sin a |1>`. Its ground energy is `1 - cos a`.
pub fn angle_family(a: f64) -> QSatSystem {
    let p0 = ket_projector(&StateVector::from_column_slice(&[ONE, ZERO]));
    let pa = ket_projector(&StateVector::from_column_slice(&[
        C64::from(a.cos()),
        C64::from(a.sin()),
    ]));
    QSatSystem::new(
        vec![2],
        vec![Constraint::new(vec![0], p0), Constraint::new(vec![0], pa)],
    )
    .expect("valid one-qubit system")
    .layered()
}

/// A system with `projectors[e]` on edge `e` of `graph`, layered greedily.
pub fn edge_system(graph: &Graph, q: usize, projectors: Vec<ComplexMatrix>) -> Result<QSatSystem> {
    if projectors.len() != graph.m() {
        return Err(Error::DimensionMismatch {
            expected: graph.m(),
            found: projectors.len(),
        });
    }
    let cs = graph
        .edges()
        .iter()
        .zip(projectors)
        .map(|(&(u, v), p)| Constraint::new(vec![u, v], p))
        .collect();
    Ok(QSatSystem::new(vec![q; graph.n()], cs)?.layered())
}

/// Anti-agreement: each edge penalizes equal symbols, `Σ_x |xx><xx|`.
pub fn diagonal_neq(graph: &Graph, q: usize) -> Result<QSatSystem> {
    let mut p = ComplexMatrix::zeros(q * q, q * q);
    for x in 0..q {
        p[(x * q + x, x * q + x)] = ONE;
    }
    edge_system(graph, q, vec![p; graph.m()])
}

/// Each edge projects onto `cos a |00> + sin a |11>`.
pub fn rank1_entangled(graph: &Graph, angle: f64) -> Result<QSatSystem> {
    let mut v = StateVector::zeros(4);
    v[0] = C64::from(angle.cos());
    v[3] = C64::from(angle.sin());
    edge_system(graph, 2, vec![ket_projector(&v); graph.m()])
}

/// Projector onto the span of `rank` Haar-random vectors in `C^dim`.
pub fn random_projector(dim: usize, rank: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let vs: Vec<StateVector> = (0..rank).map(|_| random_state(dim, rng)).collect();
    SubspaceBasis::from_vectors(dim, &vs).projector()
}

/// Random rank-`rank` qubit projectors on every edge; edge `e` draws from
/// stream `e` of `seed`.
pub fn random_edge_system(graph: &Graph, rank: usize, seed: u64) -> Result<QSatSystem> {
    let ps = (0..graph.m())
        .map(|e| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(e as u64);
            random_projector(4, rank, &mut rng)
        })
        .collect();
    edge_system(graph, 2, ps)
}

/// `n` qubits, each carrying both `|0><0|` and `|1><1|`. Commuting
/// (`θ = 0`) with `ε₀ = n`, so for `n >= 13` the `ℓ = 1` regime is valid.
pub fn frustrated_qubits(n: usize) -> QSatSystem {
    let mut p0 = ComplexMatrix::zeros(2, 2);
    p0[(0, 0)] = ONE;
    let mut p1 = ComplexMatrix::zeros(2, 2);
    p1[(1, 1)] = ONE;
    let cs = (0..n)
        .flat_map(|i| {
            [
                Constraint::new(vec![i], p0.clone()),
                Constraint::new(vec![i], p1.clone()),
            ]
        })
        .collect();
    QSatSystem::new(vec![2; n], cs).expect("valid system").layered()
}

/// A CSP with a planted satisfying assignment: each edge allows the planted
/// pair and every other pair independently with probability `density`.
pub fn planted_csp(graph: &Graph, q: usize, density: f64, seed: u64) -> (ClassicalCSP, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let planted: Vec<usize> = (0..graph.n()).map(|_| rng.random_range(0..q)).collect();
    let tables = graph
        .edges()
        .iter()
        .map(|&(u, v)| {
            (0..q * q)
                .map(|i| (i / q == planted[u] && i % q == planted[v]) || rng.random_bool(density))
                .collect()
        })
        .collect();
    let csp = ClassicalCSP::new(graph.clone(), q, tables).expect("tables sized to the graph");
    (csp, planted)
}

/// Re-draws each symbol of `sigma` with probability `rate`.
pub fn perturb(sigma: &[usize], q: usize, rate: f64, rng: &mut impl Rng) -> Vec<usize> {
    sigma
        .iter()
        .map(|&s| {
            if rng.random_bool(rate) {
                rng.random_range(0..q)
            } else {
                s
            }
        })
        .collect()
}

/// A connected non-bipartite random `d`-regular graph: the first seed at or
/// after `seed` that yields one.
pub fn random_expander(n: usize, d: usize, seed: u64) -> Result<(Graph, u64)> {
    for s in seed..seed + 1000 {
        let g = random_regular(n, d, s)?;
        if g.is_connected() && !g.is_bipartite() {
            return Ok((g, s));
        }
    }
    Err(Error::Infeasible(format!(
        "no connected non-bipartite {d}-regular graph on {n} vertices"
    )))
}

/// A named corpus member.
#[derive(Clone, Debug)]
pub struct Instance {
    pub name: String,
    pub sys: QSatSystem,
}

fn instance(name: impl Into<String>, sys: QSatSystem) -> Instance {
    Instance {
        name: name.into(),
        sys,
    }
}

pub const ANGLES: [f64; 3] = [PI / 6.0, PI / 4.0, PI / 3.0];

/// The angle family at π/6, π/4 and π/3.
pub fn angle_corpus() -> Vec<Instance> {
    ["pi/6", "pi/4", "pi/3"]
        .iter()
        .zip(ANGLES)
        .map(|(n, a)| instance(format!("angle-{n}"), angle_family(a)))
        .collect()
}

/// Two-layer systems: the angle family, then random rank-1 and rank-2 qubit
/// projectors on paths and even cycles with `n` in {4, 6, 8}.
pub fn two_layer_corpus() -> Vec<Instance> {
    let mut out = angle_corpus();
    for n in [4, 6, 8] {
        for (shape, graph) in [("path", Graph::path(n)), ("cycle", Graph::cycle(n))] {
            for rank in [1, 2] {
                let seed = 1000 * rank as u64 + n as u64;
                let sys = random_edge_system(&graph, rank, seed).expect("edge system");
                out.push(instance(format!("{shape}{n}-rank{rank}"), sys));
            }
        }
    }
    out
}

/// Three-layer systems for general `ℓ`: random rank-2 projectors on the odd
/// cycles C5 and C7 and on K4, plus the entangled rank-1 K4 toy.
pub fn multi_layer_corpus() -> Vec<Instance> {
    let mut out = Vec::new();
    for n in [5, 7] {
        let sys = random_edge_system(&Graph::cycle(n), 2, 2000 + n as u64).expect("edge system");
        out.push(instance(format!("cycle{n}-rank2"), sys));
    }
    let k4 = Graph::complete(4);
    out.push(instance(
        "k4-rank2",
        random_edge_system(&k4, 2, 2004).expect("edge system"),
    ));
    out.push(instance(
        "k4-entangled",
        rank1_entangled(&k4, PI / 5.0).expect("edge system"),
    ));
    out
}

/// Instances where some `ℓ > 0` is in the valid regime.
pub fn valid_regime_corpus() -> Vec<Instance> {
    vec![instance("frustrated-qubits-14", frustrated_qubits(14))]
}

/// Graphs for the classical amplification runs: K4 and random 3-regular
/// expanders with 20, 50 and 200 vertices.
pub fn classical_graphs() -> Vec<(String, Graph)> {
    let mut out = vec![("k4".to_string(), Graph::complete(4))];
    for n in [20, 50, 200] {
        let (g, s) = random_expander(n, 3, n as u64).expect("3-regular expander");
        out.push((format!("rr3-n{n}-seed{s}"), g));
    }
    out
}

/// Quantum amplification toys on K4 and the prism, `q = 2`: anti-agreement
/// (diagonal), entangled rank-1 (satisfiable) and random rank-2 (frustrated
/// and non-commuting) constraints.
pub fn quantum_toys() -> Vec<(String, QuantumWalkSystem)> {
    let mut out = Vec::new();
    for (gname, graph, seed) in [("k4", Graph::complete(4), 3004), ("prism", Graph::prism(), 3006)] {
        let systems = [
            ("neq", diagonal_neq(&graph, 2)),
            ("entangled", rank1_entangled(&graph, PI / 5.0)),
            ("rank2", random_edge_system(&graph, 2, seed)),
        ];
        for (kind, sys) in systems {
            let qws = QuantumWalkSystem::new(graph.clone(), sys.expect("edge system")).expect("edge system");
            out.push((format!("{gname}-{kind}"), qws));
        }
    }
    out
}

/// Random assignments at mixed distances from the planted one, so both
/// branches of the classical bound get exercised.
pub fn mixed_assignments(planted: &[usize], q: usize, count: usize, seed: u64) -> Vec<Vec<usize>> {
    let rates = [0.0, 0.01, 0.03, 0.1, 0.3, 1.0];
    (0..count)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let rate = *rates.choose(&mut rng).expect("non-empty");
            perturb(planted, q, rate, &mut rng)
        })
        .collect()
}

/// Checks that a graph is usable for amplification runs.
pub fn require_expander(g: &Graph) -> Result<f64> {
    let s = spectral(g)?;
    if s.bipartite {
        return Err(Error::InvalidLambda(1.0));
    }
    Ok(s.lambda)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_layer_corpus_is_two_layered() {
        for inst in two_layer_corpus() {
            assert_eq!(inst.sys.g(), 2, "{}", inst.name);
            assert!(inst.sys.validate().is_valid(), "{}", inst.name);
            assert!(inst.sys.n() <= 8);
        }
    }

    #[test]
    fn multi_layer_corpus_has_three_layers() {
        for inst in multi_layer_corpus() {
            assert_eq!(inst.sys.g(), 3, "{}", inst.name);
            assert!(inst.sys.total_dim() <= 512);
        }
    }

    #[test]
    fn angle_family_ground_energy() {
        for a in ANGLES {
            let e = angle_family(a).ground_energy().unwrap();
            assert!((e - (1.0 - a.cos())).abs() < 1e-12);
        }
    }

    #[test]
    fn generators_are_deterministic() {
        let g = Graph::cycle(6);
        let a = random_edge_system(&g, 2, 5).unwrap();
        let b = random_edge_system(&g, 2, 5).unwrap();
        assert_eq!(a.constraints(), b.constraints());
        let (c1, p1) = planted_csp(&g, 3, 0.3, 9);
        let (c2, p2) = planted_csp(&g, 3, 0.3, 9);
        assert_eq!(c1, c2);
        assert_eq!(p1, p2);
        assert_eq!(c1.unsat(&p1).unwrap(), 0.0);
    }

    #[test]
    fn classical_graphs_are_expanders() {
        for (name, g) in classical_graphs() {
            assert_eq!(g.regular_degree(), Some(3), "{name}");
            assert!(require_expander(&g).unwrap() < 1.0, "{name}");
        }
    }
}
