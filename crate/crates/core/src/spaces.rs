//! The four homogeneous spaces SU(4)/SO(2), U(4)/SO(2)², (U(4)×U(1))/SO(2)³
//! and SU(5)/Sp(2), each with m ≅ V¹⁴, plus their expected results.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::liealg::{base_ip, e_gen, isotropy_matrices, s_gen, InnerProductSpec, MatrixLieAlgebra, ReductiveSplit};
use crate::numkernel::{nullspace, CMat, RMat, RVec, ToleranceProfile, C64};
use crate::sp3catalog;
use crate::tensor::Tensor3;

const R2: f64 = std::f64::consts::SQRT_2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SpaceId {
    M1,
    M2,
    M3,
    M4,
}

impl SpaceId {
    pub const ALL: [SpaceId; 4] = [SpaceId::M1, SpaceId::M2, SpaceId::M3, SpaceId::M4];

    /// Stable public identifier.
    pub fn slug(self) -> &'static str {
        match self {
            SpaceId::M1 => "su4-so2",
            SpaceId::M2 => "u4-so2so2",
            SpaceId::M3 => "u4u1-so2so2so2",
            SpaceId::M4 => "su5-sp2",
        }
    }

    pub fn alias(self) -> &'static str {
        match self {
            SpaceId::M1 => "M1",
            SpaceId::M2 => "M2",
            SpaceId::M3 => "M3",
            SpaceId::M4 => "M4",
        }
    }

    pub fn quotient(self) -> &'static str {
        match self {
            SpaceId::M1 => "SU(4)/SO(2)",
            SpaceId::M2 => "U(4)/(SO(2)xSO(2))",
            SpaceId::M3 => "(U(4)xU(1))/(SO(2)xSO(2)xSO(2))",
            SpaceId::M4 => "SU(5)/Sp(2)",
        }
    }

    /// Number of extra coefficients α₂, α₃, …
    pub fn alphas_arity(self) -> usize {
        match self {
            SpaceId::M1 => 7,
            SpaceId::M2 | SpaceId::M3 => 5,
            SpaceId::M4 => 0,
        }
    }
}

impl fmt::Display for SpaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

impl FromStr for SpaceId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SpaceId::ALL
            .into_iter()
            .find(|id| id.slug() == s || id.alias().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::BadParams(format!("unknown space '{s}'")))
    }
}

/// Metric coefficients α, α₂.., β, γ.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricParams {
    pub alpha: f64,
    pub alphas: Vec<f64>,
    pub beta: f64,
    pub gamma: f64,
}

impl MetricParams {
    pub fn new(alpha: f64, alphas: Vec<f64>, beta: f64, gamma: f64) -> Self {
        MetricParams {
            alpha,
            alphas,
            beta,
            gamma,
        }
    }

    /// All αᵢ equal to α (the locus where the characteristic connection exists).
    pub fn uniform(id: SpaceId, alpha: f64, beta: f64, gamma: f64) -> Self {
        Self::new(alpha, vec![alpha; id.alphas_arity()], beta, gamma)
    }

    /// Random draw in [0.5, 2.5), optionally with αᵢ = α.
    pub fn random<R: Rng>(id: SpaceId, rng: &mut R, equal_alphas: bool) -> Self {
        let mut draw = || rng.gen_range(0.5..2.5);
        let alpha = draw();
        let alphas = (0..id.alphas_arity()).map(|_| if equal_alphas { alpha } else { draw() }).collect();
        let beta = draw();
        let gamma = draw();
        Self::new(alpha, alphas, beta, gamma)
    }

    pub fn validate(&self, id: SpaceId) -> Result<()> {
        if self.alphas.len() != id.alphas_arity() {
            return Err(Error::BadParams(format!("{id} takes {} alphas, got {}", id.alphas_arity(), self.alphas.len())));
        }
        let all = std::iter::once(self.alpha).chain(self.alphas.iter().copied()).chain([self.beta, self.gamma]);
        for x in all {
            if !(x.is_finite() && x > 0.0) {
                return Err(Error::BadParams(format!("metric coefficient {x} is not positive")));
            }
        }
        Ok(())
    }

    pub fn alphas_equal(&self) -> bool {
        self.alphas.iter().all(|&a| a == self.alpha)
    }

    /// α followed by α₂.. as one list.
    fn alpha_list(&self) -> Vec<f64> {
        std::iter::once(self.alpha).chain(self.alphas.iter().copied()).collect()
    }

    /// Diagonal of g on K₁..K₁₄.
    pub fn coefficients(&self, id: SpaceId) -> Vec<f64> {
        let a = self.alpha_list();
        let mut c = Vec::with_capacity(14);
        match id {
            SpaceId::M1 => {
                for &x in &a[..4] {
                    c.extend([x, x]);
                }
                c.extend_from_slice(&a[4..8]);
            }
            SpaceId::M2 | SpaceId::M3 => {
                for &x in &a[..6] {
                    c.extend([x, x]);
                }
            }
            SpaceId::M4 => {
                c.extend([self.alpha; 8]);
                c.extend([self.beta; 5]);
                c.push(self.gamma);
                return c;
            }
        }
        c.extend([self.beta, self.gamma]);
        c
    }
}

fn block_sizes(id: SpaceId) -> &'static [usize] {
    match id {
        SpaceId::M1 => &[2, 2, 2, 2, 1, 1, 1, 1, 1, 1],
        SpaceId::M2 | SpaceId::M3 => &[2, 2, 2, 2, 2, 2, 1, 1],
        SpaceId::M4 => &[8, 5, 1],
    }
}

fn inner_product(id: SpaceId, p: &MetricParams) -> Result<InnerProductSpec> {
    let coef = p.coefficients(id);
    let mut bounds = vec![0];
    let mut values = Vec::new();
    for &s in block_sizes(id) {
        let start = *bounds.last().expect("nonempty");
        values.push(coef[start]);
        bounds.push(start + s);
    }
    InnerProductSpec::new(bounds, values)
}

pub type BasisBuilder = fn(&MetricParams) -> Vec<CMat>;

/// Static description of a space: ambient algebra, isotropy basis, and the
/// parameter-dependent m basis.
#[derive(Clone, Debug)]
pub struct HomogeneousSpaceSpec {
    pub id: SpaceId,
    pub group: MatrixLieAlgebra,
    pub h_basis: Vec<CMat>,
    pub m_basis_builder: BasisBuilder,
    /// Kⱼ is identified with Bⱼ; kept explicit for custom specs.
    pub identification: [usize; 14],
    pub alphas_arity: usize,
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn im(x: f64) -> C64 {
    C64::new(0.0, x)
}

fn idiag(entries: &[f64], scale: f64) -> CMat {
    CMat::from_diagonal(&nalgebra::DVector::from_iterator(entries.len(), entries.iter().map(|&x| im(x * scale))))
}

fn e4(i: usize, j: usize) -> CMat {
    e_gen(4, i - 1, j - 1)
}

fn s4(i: usize, j: usize) -> CMat {
    s_gen(4, i - 1, j - 1)
}

fn embed(m: &CMat, n: usize, offset: usize) -> CMat {
    let mut out = CMat::zeros(n, n);
    out.view_mut((offset, offset), m.shape()).copy_from(m);
    out
}

/// Root-vector pairs K₁..K₁₂ shared by the SU(4) and U(4) spaces, one
/// coefficient per matrix.
fn root_pairs(coef: &[f64]) -> Vec<CMat> {
    let pairs = [(1, 3), (2, 4), (2, 3), (1, 4), (1, 2), (3, 4)];
    let mut k = Vec::with_capacity(12);
    for (n, &(i, j)) in pairs.iter().enumerate() {
        k.push(e4(i, j) * re(1.0 / (2.0 * coef[2 * n]).sqrt()));
        k.push(s4(i, j) * im(1.0 / (2.0 * coef[2 * n + 1]).sqrt()));
    }
    k
}

fn m1_basis(p: &MetricParams) -> Vec<CMat> {
    let mut k = root_pairs(&p.coefficients(SpaceId::M1));
    k.push(idiag(&[1.0, -1.0, 1.0, -1.0], 0.5 / p.beta.sqrt()));
    k.push(idiag(&[-1.0, 1.0, 1.0, -1.0], 0.5 / p.gamma.sqrt()));
    k
}

fn m2_basis(p: &MetricParams) -> Vec<CMat> {
    let mut k = root_pairs(&p.coefficients(SpaceId::M2));
    k.push(idiag(&[1.0, -1.0, 1.0, -1.0], 0.5 / p.beta.sqrt()));
    k.push(idiag(&[1.0, 1.0, 1.0, 1.0], 0.5 / p.gamma.sqrt()));
    k
}

fn m3_basis(p: &MetricParams) -> Vec<CMat> {
    let mut k: Vec<CMat> = m2_basis(p).iter().map(|x| embed(x, 5, 0)).collect();
    let mut last = CMat::zeros(5, 5);
    last[(4, 4)] = im(1.0 / p.beta.sqrt());
    k[12] = last;
    k
}

/// Kⱼ ∈ su(5) ⊖ sp(2) whose projection to m ⊂ su(6) is a multiple of Bⱼ,
/// scaled to g-unit length.
fn m4_basis(p: &MetricParams) -> Vec<CMat> {
    let d = sp3catalog::load();
    let tol = ToleranceProfile::default();
    let su5 = MatrixLieAlgebra::su(5);
    let h = m4_isotropy();
    let hv = RMat::from_fn(h.len(), su5.dim(), |r, c| base_ip(&su5.basis[c], &h[r]));
    let ns = nullspace(&hv, &tol);
    let proj = RMat::from_fn(14, su5.dim(), |r, c| base_ip(&embed(&su5.basis[c], 6, 1), &d.b[r]));
    let pm = &proj * &ns;
    let inv = pm.try_inverse().expect("m4 projects isomorphically onto m");
    let coords = &ns * inv;
    let coef = p.coefficients(SpaceId::M4);
    (0..14)
        .map(|j| {
            let c: Vec<f64> = coords.column(j).iter().copied().collect();
            let k = su5.element(&c);
            let norm = (base_ip(&k, &k) * coef[j]).sqrt();
            k * re(1.0 / norm)
        })
        .collect()
}

/// A₁..A₁₀ restricted to the lower 5×5 block.
fn m4_isotropy() -> Vec<CMat> {
    sp3catalog::load().a[..10].iter().map(|a| a.view((1, 1), (5, 5)).into_owned()).collect()
}

fn u4_torus() -> Vec<CMat> {
    vec![idiag(&[1.0, 1.0, -1.0, -1.0], 0.5), idiag(&[-1.0, 1.0, 1.0, -1.0], 0.5)]
}

pub fn spec(id: SpaceId) -> HomogeneousSpaceSpec {
    let tol = ToleranceProfile::default();
    let (group, h_basis, m_basis_builder): (MatrixLieAlgebra, Vec<CMat>, BasisBuilder) = match id {
        SpaceId::M1 => (MatrixLieAlgebra::su(4), u4_torus()[..1].to_vec(), m1_basis),
        SpaceId::M2 => (MatrixLieAlgebra::u(4), u4_torus(), m2_basis),
        SpaceId::M3 => {
            let g = MatrixLieAlgebra::u(4).direct_sum(&MatrixLieAlgebra::u(1), &tol).expect("block sum closes");
            let mut h: Vec<CMat> = u4_torus().iter().map(|x| embed(x, 5, 0)).collect();
            h.push(embed(&idiag(&[1.0, -1.0, 1.0, -1.0], 0.5), 5, 0));
            (g, h, m3_basis)
        }
        SpaceId::M4 => (MatrixLieAlgebra::su(5), m4_isotropy(), m4_basis),
    };
    HomogeneousSpaceSpec {
        id,
        group,
        h_basis,
        m_basis_builder,
        identification: std::array::from_fn(|i| i),
        alphas_arity: id.alphas_arity(),
    }
}

/// A space at concrete metric parameters, with all bracket data tabulated
/// in the orthonormal K basis.
#[derive(Clone, Debug)]
pub struct HomogeneousSpaceInstance {
    pub id: SpaceId,
    pub params: MetricParams,
    pub split: ReductiveSplit,
    /// ρ(Hᵢ) on m.
    pub isotropy: Vec<RMat>,
    /// ρ(Hᵢ) expanded on ρ(A₁)..ρ(A₂₁).
    pub isotropy_rho: Vec<RVec>,
    /// `brm[(i,j,k)]`: Kₖ-coefficient of [Kᵢ,Kⱼ].
    pub brm: Tensor3,
    /// `brh[(i,j,a)]`: Hₐ-coefficient of [Kᵢ,Kⱼ].
    pub brh: Tensor3,
}

impl HomogeneousSpaceInstance {
    pub fn dim_h(&self) -> usize {
        self.isotropy.len()
    }

    pub fn coefficients(&self) -> Vec<f64> {
        self.params.coefficients(self.id)
    }

    /// Σₐ brh[(i,j,a)] ρ(Hₐ).
    pub fn isotropy_of_bracket(&self, i: usize, j: usize) -> RMat {
        let mut m = RMat::zeros(14, 14);
        for (a, r) in self.isotropy.iter().enumerate() {
            let c = self.brh[(i, j, a)];
            if c != 0.0 {
                m += r * c;
            }
        }
        m
    }
}

pub fn instantiate(spec: &HomogeneousSpaceSpec, params: &MetricParams, tol: &ToleranceProfile) -> Result<HomogeneousSpaceInstance> {
    params.validate(spec.id)?;
    let raw = (spec.m_basis_builder)(params);
    let m_basis: Vec<CMat> = spec.identification.iter().map(|&i| raw[i].clone()).collect();
    let ip = inner_product(spec.id, params)?;
    let split = ReductiveSplit::from_bases(spec.group.clone(), spec.h_basis.clone(), m_basis, ip, tol)?;
    let isotropy = isotropy_matrices(&split, tol)?;
    let d = sp3catalog::load();
    let mut isotropy_rho = Vec::with_capacity(isotropy.len());
    for r in &isotropy {
        let (c, res) = d.rho_coords(r);
        if res > tol.residual_tol {
            return Err(Error::StructureViolation(res));
        }
        isotropy_rho.push(c);
    }
    let nh = split.dim_h();
    let mut brm = Tensor3::cube(14);
    let mut brh = Tensor3::zeros(14, 14, nh);
    for i in 0..14 {
        for j in i + 1..14 {
            let (x, y) = (&split.m_basis[i], &split.m_basis[j]);
            let c = split.decompose(&(x * y - y * x));
            if c.residual > tol.residual_tol {
                return Err(Error::NotClosed(c.residual));
            }
            for k in 0..14 {
                brm[(i, j, k)] = c.m[k];
                brm[(j, i, k)] = -c.m[k];
            }
            for a in 0..nh {
                brh[(i, j, a)] = c.h[a];
                brh[(j, i, a)] = -c.h[a];
            }
        }
    }
    Ok(HomogeneousSpaceInstance {
        id: spec.id,
        params: params.clone(),
        split,
        isotropy,
        isotropy_rho,
        brm,
        brh,
    })
}

pub fn build(id: SpaceId, params: &MetricParams, tol: &ToleranceProfile) -> Result<HomogeneousSpaceInstance> {
    instantiate(&spec(id), params, tol)
}

/// Reference values for one space.
#[derive(Clone, Debug)]
pub struct SpaceFixtures {
    pub id: SpaceId,
    pub expected_family_dim: usize,
    pub expected_spinor_dim: usize,
    /// Isotropy generators as sparse combinations (A index, coefficient).
    pub expected_isotropy: Vec<Vec<(usize, f64)>>,
}

pub fn fixtures(id: SpaceId) -> SpaceFixtures {
    let (family, spinors, iso): (usize, usize, Vec<Vec<(usize, f64)>>) = match id {
        SpaceId::M1 => (98, 48, vec![vec![(20, R2)]]),
        SpaceId::M2 => (30, 16, vec![vec![(20, R2)], vec![(9, R2)]]),
        SpaceId::M3 => (18, 0, vec![vec![(20, R2)], vec![(9, R2)], vec![(8, R2)]]),
        SpaceId::M4 => (7, 4, (0..10).map(|i| vec![(i, 1.0)]).collect()),
    };
    SpaceFixtures {
        id,
        expected_family_dim: family,
        expected_spinor_dim: spinors,
        expected_isotropy: iso,
    }
}

/// The sixteen triples carrying ±1/√(2α) on the three torus quotients.
const ROOT_TRIPLES: [(usize, usize, usize, f64); 16] = [
    (1, 5, 9, 1.),
    (1, 6, 10, -1.),
    (1, 7, 11, 1.),
    (1, 8, 12, 1.),
    (2, 5, 10, 1.),
    (2, 6, 9, 1.),
    (2, 7, 12, -1.),
    (2, 8, 11, 1.),
    (3, 5, 11, -1.),
    (3, 6, 12, 1.),
    (3, 7, 9, -1.),
    (3, 8, 10, -1.),
    (4, 5, 12, -1.),
    (4, 6, 11, -1.),
    (4, 7, 10, 1.),
    (4, 8, 9, -1.),
];

const M4_MAIN: [(usize, usize, usize, f64); 20] = [
    (1, 2, 13, 1.),
    (1, 5, 9, 1.),
    (1, 6, 10, -1.),
    (1, 7, 11, 1.),
    (1, 8, 12, 1.),
    (2, 5, 10, 1.),
    (2, 6, 9, 1.),
    (2, 7, 12, -1.),
    (2, 8, 11, 1.),
    (3, 4, 13, 1.),
    (3, 5, 11, 1.),
    (3, 6, 12, -1.),
    (3, 7, 9, -1.),
    (3, 8, 10, -1.),
    (4, 5, 12, 1.),
    (4, 6, 11, 1.),
    (4, 7, 10, 1.),
    (4, 8, 9, -1.),
    (5, 6, 13, -1.),
    (7, 8, 13, -1.),
];

fn push(out: &mut Vec<([usize; 3], f64)>, table: &[(usize, usize, usize, f64)], c: f64) {
    out.extend(table.iter().map(|&(i, j, k, s)| ([i - 1, j - 1, k - 1], s * c)));
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

impl SpaceFixtures {
    /// T(Kᵢ,Kⱼ,Kₖ) of the characteristic connection on increasing 0-based
    /// triples; only meaningful where the connection exists (αᵢ = α).
    pub fn expected_torsion(&self, p: &MetricParams) -> Vec<([usize; 3], f64)> {
        let (a, b, g) = (p.alpha, p.beta, p.gamma);
        let mut out = Vec::new();
        match self.id {
            SpaceId::M1 | SpaceId::M2 | SpaceId::M3 => {
                push(&mut out, &ROOT_TRIPLES, 1.0 / (2.0 * a).sqrt());
                if self.id != SpaceId::M3 {
                    push(&mut out, &[(5, 6, 13, 1.), (7, 8, 13, -1.), (9, 10, 13, -1.), (11, 12, 13, -1.)], b.sqrt() / a);
                }
                if self.id == SpaceId::M1 {
                    push(&mut out, &[(1, 2, 14, 1.), (3, 4, 14, -1.), (9, 10, 14, 1.), (11, 12, 14, -1.)], g.sqrt() / a);
                }
            }
            SpaceId::M4 => {
                push(&mut out, &M4_MAIN, (2.0 * a - b) / (2.0 * a * b.sqrt()));
                let p1 = (2.0 * 3f64.sqrt() * (b - a) - (5.0 * b * g).sqrt()) / (2.0 * a * b.sqrt());
                push(&mut out, &[(1, 2, 14, 1.), (3, 4, 14, 1.), (5, 6, 14, 1.), (7, 8, 14, 1.)], p1);
            }
        }
        out.sort_by_key(|x| x.0);
        out
    }

    /// Nonzero entries (K index, A index, coefficient) of the characteristic Λ.
    pub fn expected_lambda(&self, p: &MetricParams) -> Vec<(usize, usize, f64)> {
        let (a, b, g) = (p.alpha, p.beta, p.gamma);
        let lb = R2 * (a - b) / (a * b.sqrt());
        let lg = R2 * (a - g) / (a * g.sqrt());
        let mut out = match self.id {
            SpaceId::M1 => vec![(12, 8, lb), (13, 9, lg)],
            SpaceId::M2 => vec![(12, 8, lb)],
            SpaceId::M3 => vec![],
            SpaceId::M4 => {
                let c = (a - b) / (a * b.sqrt());
                let mut v: Vec<(usize, usize, f64)> = [(0, 10), (1, 11), (2, 12), (3, 13), (4, 16), (5, 17), (6, 14), (7, 15)]
                    .into_iter()
                    .map(|(k, x)| (k, x, c))
                    .collect();
                let s = (5.0 * b).sqrt();
                let t = (3.0 * g).sqrt();
                v.push((13, 20, (-g * s + t * b - t * a + s * a) / (R2 * a * (b * g).sqrt())));
                v
            }
        };
        out.retain(|e| e.2 != 0.0);
        out
    }

    pub fn expected_ricci_conn(&self, p: &MetricParams) -> Vec<f64> {
        let (a, b, g) = (p.alpha, p.beta, p.gamma);
        let a2 = a * a;
        match self.id {
            SpaceId::M1 => diag(&[(2.0 * a - g, 4), (2.0 * a - b, 4), (2.0 * a - b - g, 4), (0.0, 2)], 1.0 / a2),
            SpaceId::M2 => diag(&[(2.0 * a, 4), (2.0 * a - b, 8), (0.0, 2)], 1.0 / a2),
            SpaceId::M3 => diag(&[(1.0, 12), (0.0, 2)], 2.0 / a),
            SpaceId::M4 => {
                let s15 = (15.0 * g).sqrt();
                let x = (2.0 * (15.0 * b * g).sqrt() - 11.0 * b - 5.0 * g) / (4.0 * a2) + 21.0 / (2.0 * a) - 4.0 / b - s15 / (2.0 * a * b.sqrt());
                let y = 2.0 * (a + b) / (b * a);
                let z = 2.0 * (b - a) * (3.0 / (a * b) + s15 / (a2 * b.sqrt()) - 3.0 / a2);
                diag(&[(x, 8), (y, 5), (z, 1)], 1.0)
            }
        }
    }

    pub fn expected_ricci_riem(&self, p: &MetricParams) -> Vec<f64> {
        let (a, b, g) = (p.alpha, p.beta, p.gamma);
        let h = 1.0 / (2.0 * a * a);
        match self.id {
            SpaceId::M1 => diag(&[(6.0 * a - g, 4), (6.0 * a - b, 4), (6.0 * a - b - g, 4), (4.0 * b, 1), (4.0 * g, 1)], h),
            SpaceId::M2 => diag(&[(6.0 * a, 4), (6.0 * a - b, 8), (4.0 * b, 1), (0.0, 1)], h),
            SpaceId::M3 => diag(&[(3.0, 12), (0.0, 2)], 1.0 / a),
            SpaceId::M4 => diag(&[(10.0 * a - 1.25 * b - 1.25 * g, 8), ((8.0 * a * a + b * b) / b, 5), (5.0 * g, 1)], h),
        }
    }

    pub fn expected_scal_conn(&self, p: &MetricParams) -> f64 {
        let (a, b, g) = (p.alpha, p.beta, p.gamma);
        match self.id {
            SpaceId::M1 => 8.0 * (3.0 * a - b - g) / (a * a),
            SpaceId::M2 => 8.0 * (3.0 * a - b) / (a * a),
            SpaceId::M3 => 24.0 / a,
            SpaceId::M4 => self.expected_ricci_conn(p).iter().sum(),
        }
    }

    pub fn expected_scal_riem(&self, p: &MetricParams) -> f64 {
        let (a, b, g) = (p.alpha, p.beta, p.gamma);
        match self.id {
            SpaceId::M1 => 2.0 * (18.0 * a - b - g) / (a * a),
            SpaceId::M2 => 2.0 * (18.0 * a - b) / (a * a),
            SpaceId::M3 => 36.0 / a,
            SpaceId::M4 => 5.0 * (16.0 * a * b - b * g - b * b + 8.0 * a * a) / (2.0 * a * a * b),
        }
    }

    pub fn expected_holonomy_dim(&self, p: &MetricParams) -> usize {
        let (ab, ag) = (close(p.alpha, p.beta), close(p.alpha, p.gamma));
        match self.id {
            SpaceId::M1 => 1 + usize::from(!ab) + usize::from(!ag),
            SpaceId::M2 => {
                if ab {
                    2
                } else {
                    3
                }
            }
            SpaceId::M3 => 3,
            SpaceId::M4 => match (ab, ag) {
                (false, _) => 21,
                (true, false) => 11,
                (true, true) => 10,
            },
        }
    }

    /// Positive Dirac eigenvalue on invariant spinors, where a closed form exists.
    pub fn expected_dirac(&self, p: &MetricParams) -> Option<f64> {
        let (a, b, g) = (p.alpha, p.beta, p.gamma);
        match self.id {
            SpaceId::M2 => Some(((a + 4.0 * b) / (a * b)).sqrt()),
            SpaceId::M4 => {
                let num = 5.0 * a * a * b + 3.0 * a * a * g - 6.0 * a * b * g + 2.0 * a * (15.0 * b * g).sqrt() * (b - a) + 28.0 * b * b * g;
                Some(0.5 * (num / (a * a * b * g)).sqrt())
            }
            _ => None,
        }
    }

    /// (‖T‖², max |μ|) at the points where closed forms are stated.
    pub fn expected_torsion_operator(&self, p: &MetricParams) -> Option<(f64, f64)> {
        match self.id {
            SpaceId::M2 if close(p.alpha, 1.0) => Some((8.0 + 4.0 * p.beta, 2.0 * (4.0 + p.beta).sqrt())),
            SpaceId::M4 if close(p.alpha, 1.0) && close(p.beta, 1.0) => Some((5.0 + 5.0 * p.gamma, (25.0 + 5.0 * p.gamma).sqrt())),
            _ => None,
        }
    }
}

fn diag(blocks: &[(f64, usize)], scale: f64) -> Vec<f64> {
    blocks.iter().flat_map(|&(v, n)| std::iter::repeat(v * scale).take(n)).collect()
}
