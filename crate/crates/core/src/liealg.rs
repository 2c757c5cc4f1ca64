//! Matrix Lie algebras, reductive splits and isotropy representations.

use nalgebra::Cholesky;
use rand::Rng;

use crate::error::{Error, Result};
use crate::numkernel::{max_abs, nullspace, CMat, RMat, RVec, ToleranceProfile, C64};
use crate::tensor::Tensor3;

pub fn bracket(x: &CMat, y: &CMat) -> Result<CMat> {
    if x.shape() != y.shape() || x.nrows() != x.ncols() {
        return Err(Error::DimensionMismatch(format!("{:?} vs {:?}", x.shape(), y.shape())));
    }
    Ok(x * y - y * x)
}

/// The base form ⟨X,Y⟩ = −Re tr(XY).
pub fn base_ip(x: &CMat, y: &CMat) -> f64 {
    let n = x.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for k in 0..n {
            s += (x[(i, k)] * y[(k, i)]).re;
        }
    }
    -s
}

/// Real Frobenius pairing Re tr(X* Y); agrees with the base form on
/// anti-hermitian matrices and is positive on all of them.
fn frob(x: &CMat, y: &CMat) -> f64 {
    x.iter().zip(y.iter()).map(|(a, b)| (a.conj() * b).re).sum()
}

/// Coordinates with respect to a fixed list of linearly independent matrices.
#[derive(Clone, Debug)]
pub struct Expander {
    basis: Vec<CMat>,
    gram: Cholesky<f64, nalgebra::Dyn>,
}

impl Expander {
    pub fn new(basis: Vec<CMat>) -> Result<Self> {
        let k = basis.len();
        let g = RMat::from_fn(k, k, |i, j| frob(&basis[i], &basis[j]));
        let gram = Cholesky::new(g).ok_or_else(|| Error::DimensionMismatch("basis is linearly dependent".into()))?;
        Ok(Expander { basis, gram })
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[CMat] {
        &self.basis
    }

    /// Orthogonal-projection coordinates and the max-abs reconstruction residual.
    pub fn coords(&self, x: &CMat) -> (RVec, f64) {
        if self.basis.is_empty() {
            return (RVec::zeros(0), max_abs(x));
        }
        let b = RVec::from_iterator(self.basis.len(), self.basis.iter().map(|e| frob(e, x)));
        let c = self.gram.solve(&b);
        let rec = self.combine(c.as_slice());
        (c, max_abs(&(rec - x)))
    }

    pub fn combine(&self, c: &[f64]) -> CMat {
        let n = self.basis[0].nrows();
        let mut out = CMat::zeros(n, n);
        for (ci, e) in c.iter().zip(&self.basis) {
            if *ci != 0.0 {
                out += e * C64::new(*ci, 0.0);
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct MatrixLieAlgebra {
    pub name: String,
    pub ambient_dim: usize,
    pub basis: Vec<CMat>,
    expander: Expander,
}

impl MatrixLieAlgebra {
    /// Validates anti-hermiticity, independence and closure.
    pub fn new(name: impl Into<String>, basis: Vec<CMat>, tol: &ToleranceProfile) -> Result<Self> {
        let n = basis.first().map_or(0, |b| b.nrows());
        for b in &basis {
            if b.shape() != (n, n) {
                return Err(Error::DimensionMismatch(format!("basis element {:?}, expected {n}x{n}", b.shape())));
            }
            let d = max_abs(&(b + b.adjoint()));
            if d > tol.residual_tol {
                return Err(Error::NotAntisymmetric(d));
            }
        }
        let expander = Expander::new(basis.clone())?;
        let alg = MatrixLieAlgebra {
            name: name.into(),
            ambient_dim: n,
            basis,
            expander,
        };
        let res = alg.closure_residual();
        if res > tol.residual_tol {
            return Err(Error::NotClosed(res));
        }
        Ok(alg)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn coords(&self, x: &CMat) -> (RVec, f64) {
        self.expander.coords(x)
    }

    pub fn element(&self, c: &[f64]) -> CMat {
        self.expander.combine(c)
    }

    fn closure_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim() {
            for j in i + 1..self.dim() {
                let b = &self.basis[i] * &self.basis[j] - &self.basis[j] * &self.basis[i];
                worst = worst.max(self.coords(&b).1);
            }
        }
        worst
    }

    pub fn random_element<R: Rng>(&self, rng: &mut R) -> CMat {
        let c: Vec<f64> = (0..self.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        self.element(&c)
    }

    /// Block-diagonal direct sum.
    pub fn direct_sum(&self, other: &MatrixLieAlgebra, tol: &ToleranceProfile) -> Result<Self> {
        let (a, b) = (self.ambient_dim, other.ambient_dim);
        let mut basis = Vec::new();
        for x in &self.basis {
            let mut m = CMat::zeros(a + b, a + b);
            m.view_mut((0, 0), (a, a)).copy_from(x);
            basis.push(m);
        }
        for y in &other.basis {
            let mut m = CMat::zeros(a + b, a + b);
            m.view_mut((a, a), (b, b)).copy_from(y);
            basis.push(m);
        }
        Self::new(format!("{}+{}", self.name, other.name), basis, tol)
    }

    /// su(n), orthonormal under the base form.
    pub fn su(n: usize) -> Self {
        Self::new(format!("su({n})"), su_basis(n), &ToleranceProfile::default()).expect("su(n) is a Lie algebra")
    }

    /// u(n) = su(n) ⊕ i·R·Id, orthonormal under the base form.
    pub fn u(n: usize) -> Self {
        let mut b = su_basis(n);
        b.push(CMat::identity(n, n) * C64::new(0.0, 1.0 / (n as f64).sqrt()));
        Self::new(format!("u({n})"), b, &ToleranceProfile::default()).expect("u(n) is a Lie algebra")
    }

    /// Abelian algebra of diagonal imaginary matrices.
    pub fn torus(n: usize) -> Self {
        let b = (0..n)
            .map(|k| {
                let mut m = CMat::zeros(n, n);
                m[(k, k)] = C64::new(0.0, 1.0);
                m
            })
            .collect();
        Self::new(format!("t{n}"), b, &ToleranceProfile::default()).expect("torus is abelian")
    }
}

/// `E^n_{i,j}` with 0-based indices: e_i ↦ −e_j, e_j ↦ e_i.
pub fn e_gen(n: usize, i: usize, j: usize) -> CMat {
    let mut m = CMat::zeros(n, n);
    m[(j, i)] = C64::new(-1.0, 0.0);
    m[(i, j)] = C64::new(1.0, 0.0);
    m
}

/// `S^n_{i,j}` with 0-based indices: e_i ↦ e_j, e_j ↦ e_i (and e_i ↦ e_i for i = j).
pub fn s_gen(n: usize, i: usize, j: usize) -> CMat {
    let mut m = CMat::zeros(n, n);
    m[(j, i)] = C64::new(1.0, 0.0);
    m[(i, j)] = C64::new(1.0, 0.0);
    m
}

fn su_basis(n: usize) -> Vec<CMat> {
    let i = C64::new(0.0, 1.0);
    let r = 1.0 / 2f64.sqrt();
    let mut b = Vec::new();
    for p in 0..n {
        for q in p + 1..n {
            b.push(e_gen(n, p, q) * C64::new(r, 0.0));
            b.push(s_gen(n, p, q) * (i * r));
        }
    }
    for k in 1..n {
        let mut m = CMat::zeros(n, n);
        let norm = 1.0 / ((k * (k + 1)) as f64).sqrt();
        for d in 0..k {
            m[(d, d)] = i * norm;
        }
        m[(k, k)] = i * (-(k as f64) * norm);
        b.push(m);
    }
    b
}

/// Structure constants `c[(i,j,k)]` with `[b_i, b_j] = Σ_k c[(i,j,k)] b_k`.
pub fn structure_constants(alg: &MatrixLieAlgebra, tol: &ToleranceProfile) -> Result<Tensor3> {
    let d = alg.dim();
    let mut c = Tensor3::cube(d);
    for i in 0..d {
        for j in i + 1..d {
            let (v, res) = alg.coords(&bracket(&alg.basis[i], &alg.basis[j])?);
            if res > tol.residual_tol {
                return Err(Error::NotClosed(res));
            }
            for k in 0..d {
                c[(i, j, k)] = v[k];
                c[(j, i, k)] = -v[k];
            }
        }
    }
    Ok(c)
}

/// Metric on m: block `b` carries `block_coefficients[b]` times the base form.
#[derive(Clone, Debug, PartialEq)]
pub struct InnerProductSpec {
    /// Increasing boundaries `0 = b_0 < b_1 < … < b_r = dim m`.
    pub block_boundaries: Vec<usize>,
    pub block_coefficients: Vec<f64>,
}

impl InnerProductSpec {
    pub fn new(block_boundaries: Vec<usize>, block_coefficients: Vec<f64>) -> Result<Self> {
        let ok = block_boundaries.first() == Some(&0)
            && block_boundaries.windows(2).all(|w| w[0] < w[1])
            && block_boundaries.len() == block_coefficients.len() + 1
            && block_coefficients.iter().all(|c| c.is_finite() && *c > 0.0);
        if !ok {
            return Err(Error::BadParams(format!("blocks {block_boundaries:?}, coefficients {block_coefficients:?}")));
        }
        Ok(InnerProductSpec {
            block_boundaries,
            block_coefficients,
        })
    }

    /// One block per index.
    pub fn per_index(coefficients: &[f64]) -> Result<Self> {
        Self::new((0..=coefficients.len()).collect(), coefficients.to_vec())
    }

    pub fn uniform(dim: usize, c: f64) -> Result<Self> {
        if dim == 0 {
            return Self::new(vec![0], vec![]);
        }
        Self::new(vec![0, dim], vec![c])
    }

    pub fn dim(&self) -> usize {
        *self.block_boundaries.last().unwrap_or(&0)
    }

    pub fn block_of(&self, i: usize) -> usize {
        self.block_boundaries.windows(2).position(|w| w[0] <= i && i < w[1]).expect("index inside the partition")
    }

    pub fn coefficient(&self, i: usize) -> f64 {
        self.block_coefficients[self.block_of(i)]
    }

    /// Gram matrix of `basis` (which must be indexed like the blocks).
    pub fn gram(&self, basis: &[CMat]) -> RMat {
        let n = basis.len();
        RMat::from_fn(n, n, |i, j| {
            let b = base_ip(&basis[i], &basis[j]);
            if self.block_of(i) == self.block_of(j) {
                self.coefficient(i) * b
            } else {
                b
            }
        })
    }
}

#[derive(Clone, Debug)]
pub struct ReductiveSplit {
    pub algebra: MatrixLieAlgebra,
    pub h_basis: Vec<CMat>,
    pub m_basis: Vec<CMat>,
    pub ip: InnerProductSpec,
    hm: Expander,
}

/// Decomposition of a matrix of k into its h and m coordinates.
#[derive(Clone, Debug)]
pub struct SplitCoords {
    pub h: RVec,
    pub m: RVec,
    pub residual: f64,
}

impl ReductiveSplit {
    /// Split from explicit bases; checks every ReductiveSplit invariant.
    pub fn from_bases(
        algebra: MatrixLieAlgebra,
        h_basis: Vec<CMat>,
        m_basis: Vec<CMat>,
        ip: InnerProductSpec,
        tol: &ToleranceProfile,
    ) -> Result<Self> {
        if ip.dim() != m_basis.len() {
            return Err(Error::DimensionMismatch(format!("metric blocks cover {} of {} m vectors", ip.dim(), m_basis.len())));
        }
        if h_basis.len() + m_basis.len() != algebra.dim() {
            return Err(Error::DimensionMismatch(format!(
                "dim h + dim m = {} + {} but dim k = {}",
                h_basis.len(),
                m_basis.len(),
                algebra.dim()
            )));
        }
        for x in h_basis.iter().chain(&m_basis) {
            let res = algebra.coords(x).1;
            if res > tol.residual_tol {
                return Err(Error::NotClosed(res));
            }
        }
        let mut all = h_basis.clone();
        all.extend(m_basis.iter().cloned());
        let hm = Expander::new(all)?;
        let split = ReductiveSplit {
            algebra,
            h_basis,
            m_basis,
            ip,
            hm,
        };
        split.check(tol)?;
        Ok(split)
    }

    fn check(&self, tol: &ToleranceProfile) -> Result<()> {
        for a in &self.h_basis {
            for b in &self.h_basis {
                let d = self.decompose(&(a * b - b * a));
                let leak = d.m.amax().max(d.residual);
                if leak > tol.residual_tol {
                    return Err(Error::NotClosed(leak));
                }
            }
            for k in &self.m_basis {
                let d = self.decompose(&(a * k - k * a));
                let leak = if d.h.is_empty() { 0.0 } else { d.h.amax() }.max(d.residual);
                if leak > tol.residual_tol {
                    return Err(Error::NotReductive(leak));
                }
            }
        }
        let g = self.ip.gram(&self.m_basis);
        let dev = max_abs(&(g - RMat::identity(self.m_basis.len(), self.m_basis.len())));
        if dev > tol.residual_tol {
            return Err(Error::BadParams(format!("m basis is not orthonormal (defect {dev:.3e})")));
        }
        Ok(())
    }

    pub fn dim_h(&self) -> usize {
        self.h_basis.len()
    }

    pub fn dim_m(&self) -> usize {
        self.m_basis.len()
    }

    pub fn decompose(&self, x: &CMat) -> SplitCoords {
        let (c, residual) = self.hm.coords(x);
        let nh = self.h_basis.len();
        SplitCoords {
            h: c.rows(0, nh).into_owned(),
            m: c.rows(nh, self.m_basis.len()).into_owned(),
            residual,
        }
    }
}

/// m as the base-form complement of h in k, scaled to be orthonormal for `ip`.
pub fn reductive_split(
    k: &MatrixLieAlgebra,
    h_basis: Vec<CMat>,
    ip: InnerProductSpec,
    tol: &ToleranceProfile,
) -> Result<ReductiveSplit> {
    let d = k.dim();
    let gk = RMat::from_fn(d, d, |i, j| base_ip(&k.basis[i], &k.basis[j]));
    let mut hc = RMat::zeros(d, h_basis.len());
    for (col, h) in h_basis.iter().enumerate() {
        let (c, res) = k.coords(h);
        if res > tol.residual_tol {
            return Err(Error::NotClosed(res));
        }
        hc.set_column(col, &c);
    }
    // Complement: coordinate vectors c with ⟨h, c⟩ = 0, then base-orthonormalized.
    let constraint = hc.transpose() * &gk;
    let ns = if h_basis.is_empty() { RMat::identity(d, d) } else { nullspace(&constraint, tol) };
    let mut m_basis = Vec::new();
    if ns.ncols() > 0 {
        let g = ns.transpose() * &gk * &ns;
        let chol = Cholesky::new(g).ok_or(Error::NotReductive(f64::NAN))?;
        let linv = chol.l().try_inverse().expect("cholesky factor is invertible");
        let coords = &ns * linv.transpose();
        for j in 0..coords.ncols() {
            let c: Vec<f64> = coords.column(j).iter().copied().collect();
            m_basis.push(k.element(&c));
        }
    }
    if ip.dim() != m_basis.len() {
        return Err(Error::DimensionMismatch(format!("metric declares {} directions, complement has {}", ip.dim(), m_basis.len())));
    }
    for (i, m) in m_basis.iter_mut().enumerate() {
        *m /= C64::new(ip.coefficient(i).sqrt(), 0.0);
    }
    ReductiveSplit::from_bases(k.clone(), h_basis, m_basis, ip, tol)
}

/// Matrices of ad(H)|_m in the m basis: `[H, K_j] = Σ_k ρ(H)_{kj} K_k`.
pub fn isotropy_matrices(split: &ReductiveSplit, tol: &ToleranceProfile) -> Result<Vec<RMat>> {
    let n = split.dim_m();
    split
        .h_basis
        .iter()
        .map(|h| {
            let mut r = RMat::zeros(n, n);
            for (j, k) in split.m_basis.iter().enumerate() {
                let d = split.decompose(&(h * k - k * h));
                let leak = if d.h.is_empty() { 0.0 } else { d.h.amax() }.max(d.residual);
                if leak > tol.residual_tol {
                    return Err(Error::NotReductive(leak));
                }
                r.set_column(j, &d.m);
            }
            Ok(r)
        })
        .collect()
}

/// Cyclic defect max |g([X,Y]_m,Z) + g(Y,[X,Z]_m)| over basis triples.
pub fn is_naturally_reductive(split: &ReductiveSplit, tol: &ToleranceProfile) -> (bool, f64) {
    let n = split.dim_m();
    let mut brm = Tensor3::cube(n);
    for i in 0..n {
        for j in 0..n {
            let x = &split.m_basis[i] * &split.m_basis[j] - &split.m_basis[j] * &split.m_basis[i];
            let d = split.decompose(&x);
            for k in 0..n {
                brm[(i, j, k)] = d.m[k];
            }
        }
    }
    let mut defect: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                defect = defect.max((brm[(i, j, k)] + brm[(i, k, j)]).abs());
            }
        }
    }
    (defect <= tol.residual_tol, defect)
}
