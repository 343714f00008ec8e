//! Graphs, spectral data and t-walks: enumeration, sampling and exact
//! dynamic programs for the walk statistics.

use std::collections::{BTreeSet, VecDeque};

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An undirected graph. Edge `i` joins `edges[i].0` and `edges[i].1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    /// `(neighbour, edge id)` per vertex.
    adj: Vec<Vec<(usize, usize)>>,
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl Graph {
    /// Rejects self-loops, out-of-range endpoints and repeated edges.
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for &(u, v) in &edges {
            if u >= n || v >= n {
                return Err(Error::BadGraph(format!("edge ({u}, {v}) out of range 0..{n}")));
            }
            if u == v {
                return Err(Error::BadGraph(format!("self-loop at {u}")));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::BadGraph(format!("repeated edge ({u}, {v})")));
            }
        }
        let mut adj = vec![Vec::new(); n];
        for (i, &(u, v)) in edges.iter().enumerate() {
            adj[u].push((v, i));
            adj[v].push((u, i));
        }
        Ok(Self { n, edges, adj })
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Self::new(n, edges).expect("complete graph is simple")
    }

    pub fn cycle(n: usize) -> Self {
        Self::new(n, (0..n).map(|i| (i, (i + 1) % n)).collect()).expect("cycle needs n >= 3")
    }

    pub fn path(n: usize) -> Self {
        Self::new(n, (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect()).expect("path is simple")
    }

    /// Triangular prism: two triangles joined by a perfect matching.
    pub fn prism() -> Self {
        let edges = vec![
            (0, 1),
            (1, 2),
            (0, 2),
            (3, 4),
            (4, 5),
            (3, 5),
            (0, 3),
            (1, 4),
            (2, 5),
        ];
        Self::new(6, edges).expect("prism is simple")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> (usize, usize) {
        self.edges[id]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// `(neighbour, edge id)` pairs of `v`.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adj[v]
    }

    /// The common degree, if the graph is regular.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.adj.first().map_or(0, Vec::len);
        self.adj.iter().all(|a| a.len() == d).then_some(d)
    }

    pub fn edge_id(&self, u: usize, v: usize) -> Option<usize> {
        self.adj.get(u)?.iter().find(|&&(w, _)| w == v).map(|&(_, e)| e)
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &(v, _) in &self.adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count == self.n
    }

    pub fn is_bipartite(&self) -> bool {
        let mut color: Vec<Option<bool>> = vec![None; self.n];
        for s in 0..self.n {
            if color[s].is_some() {
                continue;
            }
            color[s] = Some(false);
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                let cu = color[u].unwrap();
                for &(v, _) in &self.adj[u] {
                    match color[v] {
                        None => {
                            color[v] = Some(!cu);
                            queue.push_back(v);
                        }
                        Some(cv) if cv == cu => return false,
                        _ => {}
                    }
                }
            }
        }
        true
    }

    pub fn to_json(&self) -> Result<Vec<u8>> {
        let file = GraphFile {
            n: self.n,
            edges: self.edges.iter().map(|&(u, v)| [u, v]).collect(),
        };
        Ok(serde_json::to_vec(&file)?)
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        let file: GraphFile = serde_json::from_slice(bytes)?;
        Self::new(file.n, file.edges.into_iter().map(|[u, v]| (u, v)).collect())
    }

    /// One `u v` pair per line; blank lines and `#` comments are ignored.
    /// The vertex count is one more than the largest index.
    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut edges = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse = |s: Option<&str>| -> Result<usize> {
                s.and_then(|s| s.parse().ok()).ok_or_else(|| Error::Parse {
                    line: i + 1,
                    column: 1,
                    msg: format!("expected two vertex indices, found {line:?}"),
                })
            };
            let mut it = line.split_whitespace();
            let u = parse(it.next())?;
            let v = parse(it.next())?;
            if it.next().is_some() {
                return Err(Error::Parse {
                    line: i + 1,
                    column: 1,
                    msg: format!("expected two vertex indices, found {line:?}"),
                });
            }
            edges.push((u, v));
        }
        let n = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
        Self::new(n, edges)
    }

    pub fn to_edge_list(&self) -> String {
        self.edges.iter().map(|(u, v)| format!("{u} {v}\n")).collect()
    }
}

const PAIRING_ATTEMPTS: usize = 10_000;

/// Simple `d`-regular graph from the pairing model, rejecting matchings with
/// loops or repeated edges.
pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<Graph> {
    if !(n * d).is_multiple_of(2) || d >= n {
        return Err(Error::Infeasible(format!(
            "no simple {d}-regular graph on {n} vertices"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    'attempt: for _ in 0..PAIRING_ATTEMPTS {
        points.shuffle(&mut rng);
        let mut seen = BTreeSet::new();
        let mut edges = Vec::with_capacity(n * d / 2);
        for pair in points.chunks(2) {
            let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if u == v || !seen.insert((u, v)) {
                continue 'attempt;
            }
            edges.push((u, v));
        }
        edges.sort_unstable();
        return Graph::new(n, edges);
    }
    Err(Error::Infeasible(format!(
        "pairing model failed {PAIRING_ATTEMPTS} times for n={n}, d={d}"
    )))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralData {
    /// Largest `|mu|` over the spectrum without the top eigenvalue.
    pub lambda: f64,
    pub mu2: f64,
    pub mu_min: f64,
    pub bipartite: bool,
    /// Eigenvalues of the normalized adjacency, descending.
    pub spectrum: Vec<f64>,
}

/// Spectrum of `D^{-1/2} A D^{-1/2}` (`A/d` for a `d`-regular graph).
pub fn spectral(g: &Graph) -> Result<SpectralData> {
    if g.n() == 0 || !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let n = g.n();
    let mut a = DMatrix::<f64>::zeros(n, n);
    for &(u, v) in g.edges() {
        let w = 1.0 / ((g.degree(u) * g.degree(v)) as f64).sqrt();
        a[(u, v)] += w;
        a[(v, u)] += w;
    }
    let mut spectrum: Vec<f64> = a.symmetric_eigen().eigenvalues.iter().copied().collect();
    spectrum.sort_by(|x, y| y.total_cmp(x));
    let mu2 = spectrum.get(1).copied().unwrap_or(0.0);
    let mu_min = *spectrum.last().unwrap();
    let lambda = if n == 1 { 0.0 } else { mu2.abs().max(mu_min.abs()) };
    Ok(SpectralData {
        lambda,
        mu2,
        mu_min,
        bipartite: g.is_bipartite(),
        spectrum,
    })
}

/// A directed walk: `edges[i]` joins `vertices[i]` and `vertices[i + 1]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Walk {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

impl Walk {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn validate(&self, g: &Graph) -> Result<()> {
        if self.edges.is_empty() || self.vertices.len() != self.edges.len() + 1 {
            return Err(Error::BadWalk(
                "a walk needs t >= 1 edges and t + 1 vertices".into(),
            ));
        }
        for (i, &e) in self.edges.iter().enumerate() {
            let (a, b) = (self.vertices[i], self.vertices[i + 1]);
            if e >= g.m() {
                return Err(Error::BadWalk(format!("edge {e} out of range")));
            }
            let (u, v) = g.edge(e);
            if !((u == a && v == b) || (u == b && v == a)) {
                return Err(Error::BadWalk(format!("edge {e} does not join {a} and {b}")));
            }
        }
        Ok(())
    }
}

/// Number of `t`-walks, `sum_v (A^t 1)_v`; `n d^t` on a `d`-regular graph.
pub fn walk_count(g: &Graph, t: usize) -> u128 {
    let mut c: Vec<u128> = vec![1; g.n()];
    for _ in 0..t {
        c = (0..g.n())
            .map(|v| {
                g.neighbors(v)
                    .iter()
                    .fold(0u128, |acc, &(w, _)| acc.saturating_add(c[w]))
            })
            .collect();
    }
    c.iter().fold(0u128, |a, &b| a.saturating_add(b))
}

/// Default cap on enumerated walks.
pub const WALK_CAP: u64 = 1_000_000;

/// Calls `f` on every `t`-walk in lexicographic order of (start, neighbour
/// positions).
pub fn for_each_walk(g: &Graph, t: usize, cap: u64, mut f: impl FnMut(&Walk)) -> Result<()> {
    if t == 0 {
        return Err(Error::BadWalk("walk length must be at least 1".into()));
    }
    let count = walk_count(g, t);
    if count > cap as u128 {
        return Err(Error::EnumerationTooLarge { count, cap });
    }
    let mut walk = Walk {
        vertices: Vec::with_capacity(t + 1),
        edges: Vec::with_capacity(t),
    };
    fn rec(g: &Graph, t: usize, walk: &mut Walk, f: &mut dyn FnMut(&Walk)) {
        if walk.edges.len() == t {
            f(walk);
            return;
        }
        let v = *walk.vertices.last().unwrap();
        for &(w, e) in g.neighbors(v) {
            walk.vertices.push(w);
            walk.edges.push(e);
            rec(g, t, walk, f);
            walk.vertices.pop();
            walk.edges.pop();
        }
    }
    for v in 0..g.n() {
        walk.vertices.push(v);
        rec(g, t, &mut walk, &mut f);
        walk.vertices.pop();
    }
    Ok(())
}

pub fn enumerate_walks(g: &Graph, t: usize, cap: u64) -> Result<Vec<Walk>> {
    let mut out = Vec::new();
    for_each_walk(g, t, cap, |w| out.push(w.clone()))?;
    Ok(out)
}

/// Uniform start vertex, then uniform steps to neighbours.
pub fn sample_walk(g: &Graph, t: usize, rng: &mut impl Rng) -> Result<Walk> {
    if t == 0 || g.n() == 0 {
        return Err(Error::BadWalk("walk length must be at least 1".into()));
    }
    let mut v = rng.random_range(0..g.n());
    let mut walk = Walk {
        vertices: vec![v],
        edges: Vec::with_capacity(t),
    };
    for _ in 0..t {
        let nb = g.neighbors(v);
        if nb.is_empty() {
            return Err(Error::BadWalk(format!("vertex {v} is isolated")));
        }
        let (w, e) = nb[rng.random_range(0..nb.len())];
        walk.vertices.push(w);
        walk.edges.push(e);
        v = w;
    }
    Ok(walk)
}

fn edge_mask(g: &Graph, bad: &[usize]) -> Vec<bool> {
    let mut mask = vec![false; g.m()];
    for &e in bad {
        mask[e] = true;
    }
    mask
}

/// One step of the walk distribution, keeping only edges where `keep` holds.
fn step(g: &Graph, u: &[f64], keep: impl Fn(usize) -> bool) -> Vec<f64> {
    let mut out = vec![0.0; g.n()];
    for (v, &mass) in u.iter().enumerate() {
        if mass == 0.0 {
            continue;
        }
        let share = mass / g.degree(v) as f64;
        for &(w, e) in g.neighbors(v) {
            if keep(e) {
                out[w] += share;
            }
        }
    }
    out
}

fn uniform(g: &Graph) -> Vec<f64> {
    vec![1.0 / g.n() as f64; g.n()]
}

/// Probability that a uniformly random `t`-walk avoids every edge in `bad`.
pub fn walk_avoid_probability(g: &Graph, bad: &[usize], t: usize) -> f64 {
    let mask = edge_mask(g, bad);
    let mut u = uniform(g);
    for _ in 0..t {
        u = step(g, &u, |e| !mask[e]);
    }
    u.iter().sum()
}

/// Statistics of `Z = sum_i Z_i`, `Z_i` the indicator that step `i` uses a
/// bad edge.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WalkMoments {
    pub ez: f64,
    pub ez2: f64,
    /// `E[Z_i]`, 0-based steps.
    pub ez_i: Vec<f64>,
    /// `E[Z_i Z_j]`, symmetric.
    pub pairwise: Vec<Vec<f64>>,
}

/// Exact moments by propagating the walk distribution: free steps, a
/// bad-edge step at `j`, free steps, a bad-edge step at `i`.
#[allow(clippy::needless_range_loop)]
pub fn walk_moments(g: &Graph, bad: &[usize], t: usize) -> WalkMoments {
    let mask = edge_mask(g, bad);
    let mut pairwise = vec![vec![0.0; t]; t];
    let mut before = uniform(g);
    for j in 0..t {
        let mut hit = step(g, &before, |e| mask[e]);
        pairwise[j][j] = hit.iter().sum();
        for i in j + 1..t {
            let next = step(g, &hit, |e| mask[e]);
            pairwise[i][j] = next.iter().sum();
            pairwise[j][i] = pairwise[i][j];
            hit = step(g, &hit, |_| true);
        }
        before = step(g, &before, |_| true);
    }
    let ez_i: Vec<f64> = (0..t).map(|i| pairwise[i][i]).collect();
    WalkMoments {
        ez: ez_i.iter().sum(),
        ez2: pairwise.iter().flatten().sum(),
        ez_i,
        pairwise,
    }
}

#[cfg(test)]
#[allow(clippy::needless_range_loop)]
mod tests {
    use super::*;

    #[test]
    fn random_regular_k4_and_degrees() {
        let g = random_regular(4, 3, 1).unwrap();
        assert_eq!(g.m(), 6);
        assert_eq!(g.regular_degree(), Some(3));
        let g = random_regular(6, 3, 9).unwrap();
        assert_eq!(g.regular_degree(), Some(3));
        assert!(random_regular(5, 3, 0).is_err());
    }

    #[test]
    fn random_regular_many_seeds() {
        for seed in 0..1000 {
            let g = random_regular(8, 3, seed).unwrap();
            assert_eq!(g.regular_degree(), Some(3));
        }
    }

    #[test]
    fn spectral_examples() {
        let s = spectral(&Graph::complete(4)).unwrap();
        assert!((s.lambda - 1.0 / 3.0).abs() < 1e-12);
        assert!((s.spectrum[0] - 1.0).abs() < 1e-12);
        let c4 = spectral(&Graph::cycle(4)).unwrap();
        assert!(c4.bipartite);
        assert!((c4.mu_min + 1.0).abs() < 1e-12);
        let two = Graph::new(4, vec![(0, 1), (2, 3)]).unwrap();
        assert!(matches!(spectral(&two), Err(Error::Disconnected)));
    }

    #[test]
    fn walk_counts() {
        assert_eq!(enumerate_walks(&Graph::cycle(4), 1, WALK_CAP).unwrap().len(), 8);
        assert_eq!(
            enumerate_walks(&Graph::complete(4), 2, WALK_CAP).unwrap().len(),
            36
        );
        assert!(matches!(
            enumerate_walks(&Graph::complete(4), 12, 1000),
            Err(Error::EnumerationTooLarge { .. })
        ));
        let g = Graph::prism();
        for w in enumerate_walks(&g, 3, WALK_CAP).unwrap() {
            w.validate(&g).unwrap();
        }
    }

    #[test]
    fn avoid_probability_examples() {
        let c4 = Graph::cycle(4);
        assert_eq!(walk_avoid_probability(&c4, &[], 3), 1.0);
        assert_eq!(walk_avoid_probability(&c4, &[0, 1, 2, 3], 1), 0.0);
        assert!((walk_avoid_probability(&c4, &[0], 1) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn moments_match_enumeration_on_c4() {
        let g = Graph::cycle(4);
        let t = 3;
        let m = walk_moments(&g, &[0], t);
        let walks = enumerate_walks(&g, t, WALK_CAP).unwrap();
        let w = 1.0 / walks.len() as f64;
        let mut table = vec![vec![0.0; t]; t];
        for walk in &walks {
            let z: Vec<f64> = walk.edges.iter().map(|&e| (e == 0) as u8 as f64).collect();
            for i in 0..t {
                for j in 0..t {
                    table[i][j] += w * z[i] * z[j];
                }
            }
        }
        for i in 0..t {
            for j in 0..t {
                assert!((table[i][j] - m.pairwise[i][j]).abs() < 1e-12);
            }
        }
        assert!((m.ez - 3.0 / 4.0).abs() < 1e-12);
    }

    #[test]
    fn moments_trivial_cases() {
        let g = Graph::complete(4);
        let m = walk_moments(&g, &[], 4);
        assert_eq!((m.ez, m.ez2), (0.0, 0.0));
        let m = walk_moments(&g, &[1, 2], 1);
        assert!((m.ez - 2.0 / 6.0).abs() < 1e-15);
        assert_eq!(m.ez, m.ez2);
    }

    #[test]
    fn edge_list_round_trip() {
        let g = Graph::prism();
        assert_eq!(Graph::from_edge_list(&g.to_edge_list()).unwrap(), g);
        assert_eq!(Graph::from_json(&g.to_json().unwrap()).unwrap(), g);
        assert!(matches!(
            Graph::from_edge_list("0 1\n1 x\n"),
            Err(Error::Parse { line: 2, .. })
        ));
    }
}
