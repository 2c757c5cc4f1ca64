//! Dense linear algebra with an explicit tolerance policy.
//!
//! Built on `nalgebra` storage, with a Jacobi SVD of our own: rank and
//! kernels come from singular values with a relative cutoff, eigenspaces of
//! self-adjoint matrices are clustered by absolute width.

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type RMat = DMatrix<f64>;
pub type CMat = DMatrix<C64>;
pub type RVec = DVector<f64>;

/// Scalar types the kernel works over: `f64` and `Complex64`.
pub trait Field: ComplexField<RealField = f64> + Copy {}
impl<T: ComplexField<RealField = f64> + Copy> Field for T {}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ToleranceProfile {
    /// Relative singular-value cutoff.
    pub rank_tol: f64,
    /// Absolute width for merging eigenvalues.
    pub cluster_tol: f64,
    /// Assertion tolerance for residual checks.
    pub residual_tol: f64,
}

impl Default for ToleranceProfile {
    fn default() -> Self {
        ToleranceProfile {
            rank_tol: 1e-8,
            cluster_tol: 1e-6,
            residual_tol: 1e-9,
        }
    }
}

impl ToleranceProfile {
    pub fn new(rank_tol: f64, cluster_tol: f64, residual_tol: f64) -> Result<Self> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if !(ok(rank_tol) && ok(cluster_tol) && ok(residual_tol)) || rank_tol >= 1.0 {
            return Err(Error::BadTolerance(format!(
                "rank_tol={rank_tol:e}, cluster_tol={cluster_tol:e}, residual_tol={residual_tol:e}"
            )));
        }
        Ok(ToleranceProfile {
            rank_tol,
            cluster_tol,
            residual_tol,
        })
    }

    pub fn with_rank_tol(self, rank_tol: f64) -> Result<Self> {
        Self::new(rank_tol, self.cluster_tol, self.residual_tol)
    }
}

/// Largest absolute entry; 0 for an empty matrix.
pub fn max_abs<T: Field>(m: &DMatrix<T>) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.modulus()))
}

/// Spectral norm estimate via the largest singular value.
pub fn norm2<T: Field>(m: &DMatrix<T>) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Singular values in non-increasing order.
pub fn singular_values<T: Field>(m: &DMatrix<T>) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let src = if m.nrows() < m.ncols() { m.adjoint() } else { m.clone() };
    let (_, mut s, _) = sorted_svd(&src);
    s.truncate(m.nrows().min(m.ncols()));
    s
}

fn count_above(s: &[f64], rank_tol: f64) -> usize {
    match s.first() {
        Some(&top) if top > 0.0 => s.iter().filter(|&&x| x > rank_tol * top).count(),
        _ => 0,
    }
}

pub fn rank<T: Field>(m: &DMatrix<T>, tol: &ToleranceProfile) -> usize {
    count_above(&singular_values(m), tol.rank_tol)
}

/// Thin QR of a tall matrix, so the Jacobi sweeps only see the square R.
fn tall_factor<T: Field>(m: &DMatrix<T>) -> Option<(DMatrix<T>, DMatrix<T>)> {
    if m.nrows() <= m.ncols() {
        return None;
    }
    let qr = m.clone().qr();
    Some((qr.q(), qr.r()))
}

/// One-sided Jacobi SVD: rotates column pairs of `a` until they are mutually
/// orthogonal, accumulating the rotations in `v`. Returns `(a·v, v)`; the
/// column norms of the first factor are the singular values.
///
/// nalgebra's bidiagonal SVD loses up to four digits on inputs with heavily
/// repeated singular values, which the structure maps here always have.
fn jacobi_sweeps<T: Field>(mut a: DMatrix<T>) -> (DMatrix<T>, DMatrix<T>) {
    const MAX_SWEEPS: usize = 60;
    let n = a.ncols();
    let mut v = DMatrix::<T>::identity(n, n);
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = a.column(p).norm_squared();
                let beta = a.column(q).norm_squared();
                let gamma = a.column(p).dotc(&a.column(q));
                let g = gamma.modulus();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // Unit phase that makes the pair's inner product real.
                let phase = (gamma.conjugate()).unscale(g);
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for m in [&mut a, &mut v] {
                    for i in 0..m.nrows() {
                        let xp = m[(i, p)];
                        let xq = m[(i, q)] * phase;
                        m[(i, p)] = xp.scale(c) - xq.scale(s);
                        m[(i, q)] = xp.scale(s) + xq.scale(c);
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    (a, v)
}

/// Full SVD `m = u·diag(s)·v*` with singular values sorted descending. `v` is
/// square; `u` has one column per singular value (zero where `s` is zero).
fn sorted_svd<T: Field>(m: &DMatrix<T>) -> (DMatrix<T>, Vec<f64>, DMatrix<T>) {
    if let Some((q, r)) = tall_factor(m) {
        let (u, s, v) = sorted_svd(&r);
        return (q * u, s, v);
    }
    let (av, v) = jacobi_sweeps(m.clone());
    let norms: Vec<f64> = av.column_iter().map(|c| c.norm()).collect();
    let mut order: Vec<usize> = (0..norms.len()).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));
    let s: Vec<f64> = order.iter().map(|&i| norms[i]).collect();
    let u = DMatrix::from_fn(av.nrows(), order.len(), |i, j| {
        let k = order[j];
        if norms[k] > 0.0 { av[(i, k)].unscale(norms[k]) } else { T::zero() }
    });
    let v_sorted = DMatrix::from_fn(v.nrows(), order.len(), |i, j| v[(i, order[j])]);
    (u, s, v_sorted)
}

/// Orthonormal kernel basis, one column per vector.
pub fn nullspace<T: Field>(m: &DMatrix<T>, tol: &ToleranceProfile) -> DMatrix<T> {
    let c = m.ncols();
    if c == 0 {
        return DMatrix::zeros(0, 0);
    }
    if m.nrows() == 0 || max_abs(m) == 0.0 {
        return DMatrix::identity(c, c);
    }
    let (_, s, v) = sorted_svd(m);
    let r = count_above(&s, tol.rank_tol);
    v.columns(r, c - r).into_owned()
}

/// Orthonormal basis of the column space.
pub fn range_basis<T: Field>(m: &DMatrix<T>, tol: &ToleranceProfile) -> DMatrix<T> {
    if m.ncols() == 0 || m.nrows() == 0 || max_abs(m) == 0.0 {
        return DMatrix::zeros(m.nrows(), 0);
    }
    // Column space of m is spanned by the leading right singular vectors of m*.
    let (_, s, v) = sorted_svd(&m.adjoint());
    let r = count_above(&s, tol.rank_tol);
    v.columns(0, r).into_owned()
}

/// Joint kernel of several operators on the same space, by successive
/// restriction. Each returned column is annihilated by every operator.
pub fn joint_kernel<T: Field>(ops: &[DMatrix<T>], dim: usize, tol: &ToleranceProfile) -> DMatrix<T> {
    let mut basis = DMatrix::<T>::identity(dim, dim);
    for op in ops {
        if basis.ncols() == 0 {
            break;
        }
        let restricted = op * &basis;
        let scale = max_abs(op);
        if scale == 0.0 || max_abs(&restricted) <= tol.residual_tol * scale {
            continue;
        }
        let k = nullspace(&restricted, tol);
        basis = &basis * k;
    }
    basis
}

#[derive(Clone, Debug)]
pub struct Eigenspace<T: Field> {
    pub value: f64,
    pub basis: DMatrix<T>,
}

impl<T: Field> Eigenspace<T> {
    pub fn multiplicity(&self) -> usize {
        self.basis.ncols()
    }
}

/// Eigenspaces of a self-adjoint matrix, ascending by eigenvalue, with
/// eigenvalues closer than `cluster_tol` merged (reported as their mean).
pub fn eig_selfadjoint<T: Field>(m: &DMatrix<T>, tol: &ToleranceProfile) -> Result<Vec<Eigenspace<T>>> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::DimensionMismatch(format!("{}x{} is not square", n, m.ncols())));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let scale = max_abs(m).max(1.0);
    let asym = max_abs(&(m - m.adjoint()));
    if asym > tol.residual_tol * scale {
        return Err(Error::NotSelfAdjoint(asym));
    }
    let herm = (m + m.adjoint()).scale(0.5);
    let eig = herm.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let mut out: Vec<Eigenspace<T>> = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n
            && eig.eigenvalues[order[end]] - eig.eigenvalues[order[end - 1]] <= tol.cluster_tol
        {
            end += 1;
        }
        let idx = &order[start..end];
        let value = idx.iter().map(|&i| eig.eigenvalues[i]).sum::<f64>() / idx.len() as f64;
        let basis = DMatrix::from_fn(n, idx.len(), |r, c| eig.eigenvectors[(r, idx[c])]);
        out.push(Eigenspace { value, basis });
        start = end;
    }
    Ok(out)
}

/// Plain sorted eigenvalues of a self-adjoint matrix (no clustering).
pub fn eigvals_selfadjoint<T: Field>(m: &DMatrix<T>) -> Vec<f64> {
    let herm = (m + m.adjoint()).scale(0.5);
    let mut v: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

/// Least-squares coordinates of `b` in the columns of `a` (via SVD), with the
/// max-abs residual of the fit.
pub fn lstsq(a: &RMat, b: &RVec, tol: &ToleranceProfile) -> (RVec, f64) {
    if a.ncols() == 0 {
        return (RVec::zeros(0), b.amax());
    }
    let (u, s, v) = sorted_svd(a);
    let r = count_above(&s, tol.rank_tol);
    let mut x = RVec::zeros(a.ncols());
    for (i, &si) in s.iter().enumerate().take(r) {
        x += v.column(i) * (u.column(i).dot(b) / si);
    }
    let res = (a * &x - b).amax();
    (x, res)
}

/// Box–Muller standard normal draw.
pub fn standard_normal<R: rand::Rng>(rng: &mut R) -> f64 {
    let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let v: f64 = rng.gen();
    (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
}

pub fn is_finite<T: Field>(m: &DMatrix<T>) -> bool {
    m.iter().all(|x| x.is_finite())
}

pub fn to_complex(m: &RMat) -> CMat {
    m.map(|x| C64::new(x, 0.0))
}

pub fn commutator<T: Field>(a: &DMatrix<T>, b: &DMatrix<T>) -> DMatrix<T> {
    a * b - b * a
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tol() -> ToleranceProfile {
        ToleranceProfile::default()
    }

    #[test]
    fn identity_and_zero_rank() {
        assert_eq!(rank(&RMat::identity(14, 14), &tol()), 14);
        assert_eq!(rank(&RMat::zeros(5, 3), &tol()), 0);
        assert_eq!(rank(&RMat::zeros(0, 0), &tol()), 0);
    }

    #[test]
    fn nullspace_examples() {
        assert_eq!(nullspace(&RMat::identity(4, 4), &tol()).ncols(), 0);
        let k = nullspace(&RMat::from_row_slice(1, 2, &[1.0, -1.0]), &tol());
        assert_eq!(k.ncols(), 1);
        let s = 1.0 / 2f64.sqrt();
        assert!((k[(0, 0)].abs() - s).abs() < 1e-12 && (k[(0, 0)] - k[(1, 0)]).abs() < 1e-12);
    }

    #[test]
    fn eig_diag() {
        let m = RMat::from_diagonal(&RVec::from_vec(vec![1.0, 1.0, 2.0]));
        let e = eig_selfadjoint(&m, &tol()).unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!((e[0].value, e[0].multiplicity()), (1.0, 2));
        assert_eq!((e[1].value, e[1].multiplicity()), (2.0, 1));
    }

    #[test]
    fn eig_rejects_nonsymmetric() {
        let m = RMat::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(eig_selfadjoint(&m, &tol()), Err(Error::NotSelfAdjoint(_))));
    }

    #[test]
    fn hermitian_complex_eigs() {
        // Pauli y has eigenvalues +-1.
        let y = CMat::from_row_slice(2, 2, &[C64::new(0., 0.), C64::new(0., -1.), C64::new(0., 1.), C64::new(0., 0.)]);
        let e = eig_selfadjoint(&y, &tol()).unwrap();
        assert!((e[0].value + 1.0).abs() < 1e-14 && (e[1].value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn bad_tolerance() {
        assert!(ToleranceProfile::new(1.5, 1e-6, 1e-9).is_err());
        assert!(ToleranceProfile::new(1e-8, 0.0, 1e-9).is_err());
    }

    fn small_matrix() -> impl Strategy<Value = RMat> {
        (1usize..7, 1usize..7, proptest::collection::vec(-3i32..4, 49)).prop_map(|(r, c, v)| {
            // Integer entries with repeated rows produce genuine rank drops.
            let mut m = RMat::from_fn(r, c, |i, j| v[i * 7 + j] as f64);
            if r > 2 {
                let row = m.row(0).into_owned();
                m.set_row(r - 1, &row);
            }
            m
        })
    }

    proptest! {
        #[test]
        fn rank_nullity(m in small_matrix()) {
            let t = tol();
            let k = nullspace(&m, &t);
            prop_assert_eq!(rank(&m, &t) + k.ncols(), m.ncols());
            prop_assert!(max_abs(&(&m * &k)) <= 1e-9 * max_abs(&m).max(1.0));
            let gram = k.transpose() * &k;
            prop_assert!(max_abs(&(gram - RMat::identity(k.ncols(), k.ncols()))) < 1e-10);
        }

        #[test]
        fn range_plus_kernel_of_adjoint(m in small_matrix()) {
            let t = tol();
            prop_assert_eq!(range_basis(&m, &t).ncols(), rank(&m, &t));
        }

        #[test]
        fn eigen_multiplicities_sum(v in proptest::collection::vec(-2i32..3, 16)) {
            let a = RMat::from_fn(4, 4, |i, j| v[i * 4 + j] as f64);
            let s = &a + a.transpose();
            let e = eig_selfadjoint(&s, &tol()).unwrap();
            prop_assert_eq!(e.iter().map(|x| x.multiplicity()).sum::<usize>(), 4);
            let mut rec = RMat::zeros(4, 4);
            for part in &e {
                rec += &part.basis * part.basis.transpose() * part.value;
            }
            prop_assert!(max_abs(&(rec - &s)) < 1e-9);
        }

        #[test]
        fn deterministic(m in small_matrix()) {
            let a = singular_values(&m);
            let b = singular_values(&m);
            prop_assert_eq!(a, b);
        }
    }
}
