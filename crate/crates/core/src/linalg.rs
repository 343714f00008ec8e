//! Dense complex linear algebra, subspace geometry and a matrix-free Lanczos
//! solver for the lowest eigenvalue of a Hermitian operator.
//!
//! Basis convention: a register of qudits with dimensions `dims` is flattened
//! little-endian, qudit 0 being the least significant digit. A local operator
//! on `support = [a, b, ...]` uses the same convention on its own space, so
//! `support[0]` is its least significant digit.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;
pub type StateVector = DVector<C64>;

/// Largest dimension handled by dense eigensolvers.
pub const DENSE_CAP: usize = 4096;

/// Absolute rank threshold applied to eigen/singular values of unit-norm operators.
pub const RANK_TOL: f64 = 1e-8;

const ORTHONORMAL_TOL: f64 = 1e-8;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// An orthonormal set of vectors, stored as the columns of an
/// `ambient_dim x count` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceBasis {
    ambient_dim: usize,
    vectors: ComplexMatrix,
}

impl SubspaceBasis {
    /// Wraps the columns of `vectors`, checking orthonormality.
    pub fn new(vectors: ComplexMatrix) -> Result<Self> {
        let gram = vectors.adjoint() * &vectors;
        let dev = (gram - ComplexMatrix::identity(vectors.ncols(), vectors.ncols())).norm();
        if dev > ORTHONORMAL_TOL {
            return Err(Error::Infeasible(format!(
                "basis vectors are not orthonormal (deviation {dev:.3e})"
            )));
        }
        Ok(Self {
            ambient_dim: vectors.nrows(),
            vectors,
        })
    }

    pub(crate) fn from_columns_unchecked(vectors: ComplexMatrix) -> Self {
        Self {
            ambient_dim: vectors.nrows(),
            vectors,
        }
    }

    /// Orthonormalizes arbitrary spanning vectors (columns), dropping dependent ones.
    pub fn span_of(vectors: &ComplexMatrix) -> Self {
        let dim = vectors.nrows();
        let mut cols: Vec<StateVector> = Vec::new();
        for j in 0..vectors.ncols() {
            let mut v: StateVector = vectors.column(j).into_owned();
            let scale = v.norm();
            if scale == 0.0 {
                continue;
            }
            for _ in 0..2 {
                for u in &cols {
                    let c = u.dotc(&v);
                    v.axpy(-c, u, ONE);
                }
            }
            let n = v.norm();
            if n > 1e-10 * scale {
                cols.push(v / C64::from(n));
            }
        }
        Self::from_orthonormal(dim, &cols)
    }

    /// Orthonormal basis for the span of `vectors`.
    pub fn from_vectors(ambient_dim: usize, vectors: &[StateVector]) -> Self {
        let mut m = ComplexMatrix::zeros(ambient_dim, vectors.len());
        for (j, v) in vectors.iter().enumerate() {
            m.set_column(j, v);
        }
        Self::span_of(&m)
    }

    pub(crate) fn from_orthonormal(ambient_dim: usize, vectors: &[StateVector]) -> Self {
        let mut m = ComplexMatrix::zeros(ambient_dim, vectors.len());
        for (j, v) in vectors.iter().enumerate() {
            m.set_column(j, v);
        }
        Self::from_columns_unchecked(m)
    }

    pub fn empty(ambient_dim: usize) -> Self {
        Self::from_columns_unchecked(ComplexMatrix::zeros(ambient_dim, 0))
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self::from_columns_unchecked(ComplexMatrix::identity(ambient_dim, ambient_dim))
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.dim() == 0
    }

    pub fn vectors(&self) -> &ComplexMatrix {
        &self.vectors
    }

    pub fn vector(&self, i: usize) -> StateVector {
        self.vectors.column(i).into_owned()
    }

    /// Orthogonal projector onto the span.
    pub fn projector(&self) -> ComplexMatrix {
        &self.vectors * self.vectors.adjoint()
    }

    pub fn project(&self, v: &StateVector) -> StateVector {
        &self.vectors * (self.vectors.adjoint() * v)
    }

    /// Norm of the component of `v` orthogonal to the span.
    pub fn residual(&self, v: &StateVector) -> f64 {
        (v - self.project(v)).norm()
    }

    /// Orthonormal basis of the orthogonal complement.
    pub fn complement(&self) -> SubspaceBasis {
        let n = self.ambient_dim;
        let p = ComplexMatrix::identity(n, n) - self.projector();
        // I - P is a projector; its range is the eigenvalue-1 eigenspace.
        let eig = p.symmetric_eigen();
        let cols: Vec<StateVector> = (0..n)
            .filter(|&i| eig.eigenvalues[i] > 0.5)
            .map(|i| eig.eigenvectors.column(i).into_owned())
            .collect();
        SubspaceBasis::from_orthonormal(n, &cols)
    }
}

/// Frobenius norm of `m - m^dagger`.
pub fn hermitian_deviation(m: &ComplexMatrix) -> f64 {
    (m - m.adjoint()).norm()
}

fn check_square(m: &ComplexMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    Ok(())
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eig(m: &ComplexMatrix, tol: f64) -> Result<(Vec<f64>, SubspaceBasis)> {
    hermitian_eig_capped(m, tol, DENSE_CAP)
}

pub fn hermitian_eig_capped(m: &ComplexMatrix, tol: f64, cap: usize) -> Result<(Vec<f64>, SubspaceBasis)> {
    check_square(m)?;
    let n = m.nrows();
    if n > cap {
        return Err(Error::DimensionTooLarge { dim: n, cap });
    }
    let deviation = hermitian_deviation(m);
    if deviation > tol {
        return Err(Error::NotHermitian { deviation, tol });
    }
    if n == 0 {
        return Ok((Vec::new(), SubspaceBasis::empty(0)));
    }
    let sym = (m + m.adjoint()) * C64::from(0.5);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = ComplexMatrix::zeros(n, n);
    for (j, &i) in order.iter().enumerate() {
        vecs.set_column(j, &eig.eigenvectors.column(i));
    }
    Ok((values, SubspaceBasis::from_columns_unchecked(vecs)))
}

fn hermitian_tol(m: &ComplexMatrix) -> f64 {
    1e-8 * m.norm().max(1.0)
}

/// Orthonormal basis of the eigenspace of a Hermitian PSD matrix with
/// eigenvalues at most `tol`, after scaling the matrix to unit norm.
pub fn kernel(m: &ComplexMatrix, tol: f64) -> Result<SubspaceBasis> {
    check_square(m)?;
    let (values, vectors) = hermitian_eig(m, hermitian_tol(m))?;
    let scale = values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 {
        return Ok(SubspaceBasis::full(m.nrows()));
    }
    let keep: Vec<usize> = (0..values.len()).filter(|&i| values[i] / scale <= tol).collect();
    let mut out = ComplexMatrix::zeros(m.nrows(), keep.len());
    for (j, &i) in keep.iter().enumerate() {
        out.set_column(j, &vectors.vectors().column(i));
    }
    Ok(SubspaceBasis::from_columns_unchecked(out))
}

/// Intersection of two spans, computed as the kernel of `(I - P_a) + (I - P_b)`.
pub fn intersect(a: &SubspaceBasis, b: &SubspaceBasis, tol: f64) -> Result<SubspaceBasis> {
    if a.ambient_dim() != b.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: a.ambient_dim(),
            found: b.ambient_dim(),
        });
    }
    let n = a.ambient_dim();
    if a.is_empty() || b.is_empty() {
        return Ok(SubspaceBasis::empty(n));
    }
    let id = ComplexMatrix::identity(n, n);
    let m = (&id - a.projector()) + (&id - b.projector());
    kernel(&m, tol)
}

/// Cosine of the smallest principal angle between two subspaces: the largest
/// singular value of the cross-Gram matrix `a^dagger b`.
pub fn principal_cos(a: &SubspaceBasis, b: &SubspaceBasis) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySubspace);
    }
    if a.ambient_dim() != b.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: a.ambient_dim(),
            found: b.ambient_dim(),
        });
    }
    let gram = a.vectors().adjoint() * b.vectors();
    Ok(operator_norm(&gram).clamp(0.0, 1.0))
}

/// Largest singular value.
pub fn operator_norm(m: &ComplexMatrix) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    // Largest eigenvalue of the smaller Gram matrix.
    let gram = if m.nrows() < m.ncols() {
        m * m.adjoint()
    } else {
        m.adjoint() * m
    };
    gram.symmetric_eigenvalues().max().max(0.0).sqrt()
}

/// Strides of each qudit in the flattened little-endian index.
pub fn strides(dims: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(dims.len());
    let mut acc = 1usize;
    for &d in dims {
        out.push(acc);
        acc *= d;
    }
    out
}

pub fn total_dim(dims: &[usize]) -> usize {
    dims.iter().product()
}

/// Index tables for applying an operator on `support` inside the full register:
/// `bases` enumerates the flattened indices with all support digits zero and
/// `offsets[l]` is the displacement of local basis state `l`.
#[derive(Clone, Debug)]
pub(crate) struct LocalIndex {
    pub bases: Vec<usize>,
    pub offsets: Vec<usize>,
}

impl LocalIndex {
    pub fn new(support: &[usize], dims: &[usize]) -> Result<Self> {
        let n = dims.len();
        let mut seen = vec![false; n];
        for &q in support {
            if q >= n {
                return Err(Error::BadSupport(format!("qudit {q} out of range 0..{n}")));
            }
            if seen[q] {
                return Err(Error::BadSupport(format!("qudit {q} repeated")));
            }
            seen[q] = true;
        }
        let st = strides(dims);
        let local_dims: Vec<usize> = support.iter().map(|&q| dims[q]).collect();
        let local_dim: usize = local_dims.iter().product();
        let offsets = (0..local_dim)
            .map(|mut l| {
                let mut off = 0;
                for (j, &q) in support.iter().enumerate() {
                    off += (l % local_dims[j]) * st[q];
                    l /= local_dims[j];
                }
                off
            })
            .collect();
        let mut bases = vec![0usize];
        for q in 0..n {
            if seen[q] {
                continue;
            }
            let mut next = Vec::with_capacity(bases.len() * dims[q]);
            for d in 0..dims[q] {
                for &b in &bases {
                    next.push(b + d * st[q]);
                }
            }
            bases = next;
        }
        Ok(Self { bases, offsets })
    }

    pub fn local_dim(&self) -> usize {
        self.offsets.len()
    }

    /// `out += op * v` restricted to the blocks of this index.
    pub fn apply_into(&self, op: &ComplexMatrix, v: &[C64], out: &mut [C64]) {
        let ld = self.local_dim();
        let mut x = vec![ZERO; ld];
        for &b in &self.bases {
            for (l, &o) in self.offsets.iter().enumerate() {
                x[l] = v[b + o];
            }
            for r in 0..ld {
                let mut acc = ZERO;
                for c in 0..ld {
                    acc += op[(r, c)] * x[c];
                }
                out[b + self.offsets[r]] += acc;
            }
        }
    }
}

/// `(op ⊗ I_rest) v` for an operator acting on the qudits in `support`.
pub fn apply_local(
    op: &ComplexMatrix,
    support: &[usize],
    dims: &[usize],
    v: &StateVector,
) -> Result<StateVector> {
    let idx = LocalIndex::new(support, dims)?;
    check_local(op, &idx, dims, v.len())?;
    let mut out = StateVector::zeros(v.len());
    idx.apply_into(op, v.as_slice(), out.as_mut_slice());
    Ok(out)
}

fn check_local(op: &ComplexMatrix, idx: &LocalIndex, dims: &[usize], len: usize) -> Result<()> {
    if op.nrows() != idx.local_dim() || op.ncols() != idx.local_dim() {
        return Err(Error::BadSupport(format!(
            "operator is {}x{} but the support space has dimension {}",
            op.nrows(),
            op.ncols(),
            idx.local_dim()
        )));
    }
    let n = total_dim(dims);
    if len != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: len,
        });
    }
    Ok(())
}

/// Dense matrix of `op ⊗ I_rest`.
pub fn embed_local(op: &ComplexMatrix, support: &[usize], dims: &[usize]) -> Result<ComplexMatrix> {
    let idx = LocalIndex::new(support, dims)?;
    let n = total_dim(dims);
    check_local(op, &idx, dims, n)?;
    let mut out = ComplexMatrix::zeros(n, n);
    for &b in &idx.bases {
        for (r, &ro) in idx.offsets.iter().enumerate() {
            for (c, &co) in idx.offsets.iter().enumerate() {
                out[(b + ro, b + co)] = op[(r, c)];
            }
        }
    }
    Ok(out)
}

/// An operator on a subset of qudits.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalOperator {
    pub support: Vec<usize>,
    pub matrix: ComplexMatrix,
}

impl LocalOperator {
    pub fn new(support: Vec<usize>, matrix: ComplexMatrix) -> Self {
        Self { support, matrix }
    }

    pub fn apply(&self, dims: &[usize], v: &StateVector) -> Result<StateVector> {
        apply_local(&self.matrix, &self.support, dims, v)
    }

    pub fn embed(&self, dims: &[usize]) -> Result<ComplexMatrix> {
        embed_local(&self.matrix, &self.support, dims)
    }
}

/// Seeded standard complex Gaussian vector, normalized (a Haar-random state).
pub fn random_state(dim: usize, rng: &mut impl rand::Rng) -> StateVector {
    let v = StateVector::from_fn(dim, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im)
    });
    let n = v.norm();
    v / C64::from(n)
}

#[derive(Clone, Debug)]
pub struct LanczosOptions {
    /// Target residual `||A x - theta x||`, which bounds the eigenvalue error.
    pub tol: f64,
    pub max_matvecs: usize,
    pub krylov_dim: usize,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_matvecs: 5000,
            krylov_dim: 80,
            seed: 0,
        }
    }
}

/// Lowest eigenvalue of the Hermitian operator applied by `matvec`.
pub fn lowest_eigenvalue<F>(matvec: F, dim: usize, tol: f64, seed: u64) -> Result<f64>
where
    F: Fn(&StateVector) -> StateVector,
{
    let opts = LanczosOptions {
        tol,
        seed,
        ..Default::default()
    };
    lowest_eigenpair(matvec, dim, &opts).map(|(e, _)| e)
}

/// Restarted Lanczos with full reorthogonalization. Each cycle restarts from
/// the current lowest Ritz vector; the start vector is seeded.
pub fn lowest_eigenpair<F>(matvec: F, dim: usize, opts: &LanczosOptions) -> Result<(f64, StateVector)>
where
    F: Fn(&StateVector) -> StateVector,
{
    if dim == 0 {
        return Err(Error::EmptySubspace);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut start = random_state(dim, &mut rng);
    let m = opts.krylov_dim.max(2).min(dim);
    let mut matvecs = 0usize;
    let mut last_residual = f64::INFINITY;

    while matvecs < opts.max_matvecs {
        let mut basis: Vec<StateVector> = vec![start.clone()];
        let mut alpha: Vec<f64> = Vec::with_capacity(m);
        let mut beta: Vec<f64> = Vec::with_capacity(m);
        let mut invariant = false;
        for j in 0..m {
            let mut w = matvec(&basis[j]);
            matvecs += 1;
            let a = basis[j].dotc(&w).re;
            alpha.push(a);
            // Two passes of classical Gram-Schmidt against the whole basis.
            for _ in 0..2 {
                for u in &basis {
                    let c = u.dotc(&w);
                    w.axpy(-c, u, ONE);
                }
            }
            let b = w.norm();
            let scale = alpha.iter().fold(1.0_f64, |acc, x| acc.max(x.abs()));
            if b <= 1e-13 * scale || j + 1 == dim {
                invariant = b <= 1e-13 * scale || basis.len() == dim;
                beta.push(b);
                break;
            }
            beta.push(b);
            if j + 1 < m {
                basis.push(w / C64::from(b));
            }
            if matvecs >= opts.max_matvecs {
                break;
            }
        }
        let k = alpha.len();
        let mut t = DMatrix::<f64>::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = alpha[i];
            if i + 1 < k {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = t.symmetric_eigen();
        let (imin, theta) =
            eig.eigenvalues.iter().enumerate().fold(
                (0, f64::INFINITY),
                |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc },
            );
        let y = eig.eigenvectors.column(imin);
        let mut ritz = StateVector::zeros(dim);
        for (i, u) in basis.iter().take(k).enumerate() {
            ritz.axpy(C64::from(y[i]), u, ONE);
        }
        let rn = ritz.norm();
        ritz /= C64::from(rn);
        let estimate = if invariant {
            0.0
        } else {
            beta[k - 1] * y[k - 1].abs()
        };
        if estimate <= opts.tol {
            let r = matvec(&ritz);
            matvecs += 1;
            let residual = (&r - &ritz * C64::from(theta)).norm();
            last_residual = residual;
            if residual <= opts.tol || invariant {
                return Ok((theta, ritz));
            }
        } else {
            last_residual = estimate;
        }
        start = ritz;
    }
    Err(Error::NoConvergence {
        matvecs,
        residual: last_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn basis_state(dim: usize, i: usize) -> StateVector {
        let mut v = StateVector::zeros(dim);
        v[i] = ONE;
        v
    }

    fn random_hermitian(n: usize, seed: u64) -> ComplexMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = ComplexMatrix::from_fn(n, n, |_, _| {
            C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))
        });
        (&a + a.adjoint()) * c(0.5)
    }

    #[test]
    fn eig_identity_and_pauli_z() {
        let (vals, _) = hermitian_eig(&ComplexMatrix::identity(4, 4), 1e-12).unwrap();
        assert_eq!(vals, vec![1.0; 4]);
        let z = ComplexMatrix::from_diagonal(&StateVector::from_vec(vec![c(1.0), c(-1.0)]));
        let (vals, _) = hermitian_eig(&z, 1e-12).unwrap();
        assert!(close(vals[0], -1.0, 1e-14) && close(vals[1], 1.0, 1e-14));
    }

    #[test]
    fn eig_residuals_random() {
        let m = random_hermitian(32, 3);
        let (vals, vecs) = hermitian_eig(&m, 1e-10).unwrap();
        let norm = operator_norm(&m);
        for (i, &l) in vals.iter().enumerate() {
            let v = vecs.vector(i);
            let r = (&m * &v - &v * c(l)).norm();
            assert!(r <= 1e-8 * norm, "residual {r}");
        }
        SubspaceBasis::new(vecs.vectors().clone()).unwrap();
    }

    #[test]
    fn eig_rejects_non_hermitian_and_large() {
        let mut m = ComplexMatrix::identity(2, 2);
        m[(0, 1)] = c(1.0);
        assert!(matches!(hermitian_eig(&m, 1e-8), Err(Error::NotHermitian { .. })));
        let big = ComplexMatrix::identity(5, 5);
        assert!(matches!(
            hermitian_eig_capped(&big, 1e-8, 4),
            Err(Error::DimensionTooLarge { .. })
        ));
    }

    #[test]
    fn kernel_examples() {
        let mut p = ComplexMatrix::zeros(4, 4);
        p[(3, 3)] = ONE;
        let k = kernel(&p, RANK_TOL).unwrap();
        assert_eq!(k.dim(), 3);
        for i in 0..3 {
            assert!(k.residual(&basis_state(4, i)) < 1e-12);
        }
        assert!(kernel(&ComplexMatrix::identity(3, 3), RANK_TOL)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn intersect_examples() {
        // span{|00>,|01>} and span{|00>,|10>}; index = q0 + 2 q1.
        let a = SubspaceBasis::from_vectors(4, &[basis_state(4, 0), basis_state(4, 2)]);
        let b = SubspaceBasis::from_vectors(4, &[basis_state(4, 0), basis_state(4, 1)]);
        let i = intersect(&a, &b, RANK_TOL).unwrap();
        assert_eq!(i.dim(), 1);
        assert!(i.residual(&basis_state(4, 0)) < 1e-12);
        let x = SubspaceBasis::from_vectors(2, &[basis_state(2, 0)]);
        let y = SubspaceBasis::from_vectors(2, &[basis_state(2, 1)]);
        assert!(intersect(&x, &y, RANK_TOL).unwrap().is_empty());
        let z = SubspaceBasis::empty(3);
        assert!(matches!(
            intersect(&x, &z, RANK_TOL),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn principal_cos_examples() {
        let a = std::f64::consts::PI / 6.0;
        let u = SubspaceBasis::from_vectors(2, &[basis_state(2, 0)]);
        let v = SubspaceBasis::from_vectors(2, &[StateVector::from_vec(vec![c(a.cos()), c(a.sin())])]);
        assert!(close(principal_cos(&u, &v).unwrap(), a.cos(), 1e-14));
        assert!(close(principal_cos(&u, &u).unwrap(), 1.0, 1e-14));
        assert!(matches!(
            principal_cos(&u, &SubspaceBasis::empty(2)),
            Err(Error::EmptySubspace)
        ));
    }

    #[test]
    fn operator_norm_examples() {
        let mut p = ComplexMatrix::zeros(3, 3);
        p[(1, 1)] = ONE;
        assert!(close(operator_norm(&p), 1.0, 1e-14));
        assert_eq!(operator_norm(&ComplexMatrix::zeros(3, 3)), 0.0);
    }

    #[test]
    fn apply_local_examples() {
        let dims = [2, 2];
        let v = StateVector::from_fn(4, |i, _| C64::new(i as f64, 1.0));
        let id = ComplexMatrix::identity(2, 2);
        assert_eq!(apply_local(&id, &[1], &dims, &v).unwrap(), v);
        // |1><1| on qudit 0 applied to |q0=0, q1=1> (index 2) annihilates it.
        let mut p1 = ComplexMatrix::zeros(2, 2);
        p1[(1, 1)] = ONE;
        let out = apply_local(&p1, &[0], &dims, &basis_state(4, 2)).unwrap();
        assert_eq!(out.norm(), 0.0);
        assert!(matches!(
            apply_local(&p1, &[2], &dims, &v),
            Err(Error::BadSupport(_))
        ));
        assert!(matches!(
            apply_local(&p1, &[0, 0], &dims, &v),
            Err(Error::BadSupport(_))
        ));
    }

    #[test]
    fn lanczos_small_examples() {
        // |11><11| on two qubits.
        let mut p = ComplexMatrix::zeros(4, 4);
        p[(3, 3)] = ONE;
        let e = lowest_eigenvalue(|v| &p * v, 4, 1e-8, 0).unwrap();
        assert!(e.abs() <= 1e-8);
        // |0><0| + |1><1| = I on one qubit.
        let id = ComplexMatrix::identity(2, 2);
        let e = lowest_eigenvalue(|v| &id * v, 2, 1e-8, 0).unwrap();
        assert!(close(e, 1.0, 1e-8));
    }

    #[test]
    fn lanczos_deterministic() {
        let m = random_hermitian(200, 11);
        let a = lowest_eigenvalue(|v| &m * v, 200, 1e-9, 5).unwrap();
        let b = lowest_eigenvalue(|v| &m * v, 200, 1e-9, 5).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
        let (vals, _) = hermitian_eig(&m, 1e-8).unwrap();
        assert!(close(a, vals[0], 1e-8));
    }

    #[test]
    fn from_vectors_orthonormalizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let vs: Vec<StateVector> = (0..3).map(|_| random_state(5, &mut rng)).collect();
        let b = SubspaceBasis::from_vectors(5, &vs);
        assert_eq!(b.dim(), 3);
        let p = b.projector();
        assert!((&p * &p - &p).norm() < 1e-12);
        let dup = SubspaceBasis::from_vectors(5, &[vs[0].clone(), vs[0].clone() * C64::from(2.0)]);
        assert_eq!(dup.dim(), 1);
    }
}
