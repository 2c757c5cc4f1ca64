//! Induced representations, Casimir spectra, the Θ map, commutants and
//! invariant cubic forms.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numkernel::{eig_selfadjoint, standard_normal, joint_kernel, max_abs, nullspace, RMat, RVec, ToleranceProfile};
use crate::sp3catalog::{self, SubgroupRow};
use crate::tensor::{increasing_triples, sort3, triple_index, Tensor3};

#[derive(Clone, Debug)]
pub struct RepAction {
    pub dim: usize,
    pub generators: Vec<RMat>,
    pub source: String,
}

impl RepAction {
    pub fn new(source: impl Into<String>, generators: Vec<RMat>) -> Result<Self> {
        let dim = generators.first().map_or(0, |g| g.nrows());
        if generators.iter().any(|g| g.shape() != (dim, dim)) {
            return Err(Error::DimensionMismatch("generators differ in size".into()));
        }
        Ok(RepAction {
            dim,
            generators,
            source: source.into(),
        })
    }

    /// Max over pairs of |ν([Xᵢ,Xⱼ]) − [ν(Xᵢ),ν(Xⱼ)]| given the source
    /// algebra's structure constants.
    pub fn homomorphism_residual(&self, c: &Tensor3) -> f64 {
        let n = self.generators.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                let gi = &self.generators[i];
                let gj = &self.generators[j];
                let mut lhs = gi * gj - gj * gi;
                for k in 0..n {
                    let ck = c[(i, j, k)];
                    if ck != 0.0 {
                        lhs -= &self.generators[k] * ck;
                    }
                }
                worst = worst.max(max_abs(&lhs));
            }
        }
        worst
    }
}

fn check_antisymmetric(rho: &[RMat]) -> Result<usize> {
    let n = rho.first().map_or(0, |r| r.nrows());
    for r in rho {
        if r.shape() != (n, n) {
            return Err(Error::DimensionMismatch(format!("{:?} vs {n}x{n}", r.shape())));
        }
        let d = max_abs(&(r + r.transpose()));
        if d > 1e-9 * max_abs(r).max(1.0) {
            return Err(Error::NotAntisymmetric(d));
        }
    }
    Ok(n)
}

/// Derivative action on Λ³ in the basis eᵢ∧eⱼ∧eₖ, i<j<k.
pub fn lambda3_action(rho: &[RMat]) -> Result<RepAction> {
    let n = check_antisymmetric(rho)?;
    let triples = increasing_triples(n);
    let gens = rho
        .iter()
        .map(|r| {
            let mut m = RMat::zeros(triples.len(), triples.len());
            for (col, t) in triples.iter().enumerate() {
                for slot in 0..3 {
                    for l in 0..n {
                        let a = r[(l, t[slot])];
                        if a == 0.0 {
                            continue;
                        }
                        let mut u = *t;
                        u[slot] = l;
                        if let Some((s, sign)) = sort3(u) {
                            m[(triple_index(n, s), col)] += sign * a;
                        }
                    }
                }
            }
            m
        })
        .collect();
    RepAction::new("lambda3", gens)
}

/// ρ₁ ⊗ 1 + 1 ⊗ ρ₂.
pub fn tensor_product(a: &RepAction, b: &RepAction) -> Result<RepAction> {
    if a.generators.len() != b.generators.len() {
        return Err(Error::DimensionMismatch("different generator counts".into()));
    }
    let ia = RMat::identity(a.dim, a.dim);
    let ib = RMat::identity(b.dim, b.dim);
    let gens = a.generators.iter().zip(&b.generators).map(|(x, y)| x.kronecker(&ib) + ia.kronecker(y)).collect();
    RepAction::new(format!("{}x{}", a.source, b.source), gens)
}

/// Upper-triangular coordinates (a<b) of so(n); orthonormal for −½tr(AB).
pub fn so_coords(m: &RMat) -> RVec {
    let n = m.nrows();
    let mut v = Vec::with_capacity(n * (n - 1) / 2);
    for a in 0..n {
        for b in a + 1..n {
            v.push(m[(a, b)]);
        }
    }
    RVec::from_vec(v)
}

pub fn so_matrix(n: usize, v: &[f64]) -> RMat {
    let mut m = RMat::zeros(n, n);
    let mut p = 0;
    for a in 0..n {
        for b in a + 1..n {
            m[(a, b)] = v[p];
            m[(b, a)] = -v[p];
            p += 1;
        }
    }
    m
}

fn pair_index(n: usize, a: usize, b: usize) -> usize {
    debug_assert!(a < b);
    a * n - a * (a + 1) / 2 + (b - a - 1)
}

/// Orthonormal basis (in so(n) coordinates) of the complement of span(gens).
pub fn so_complement(gens: &[RMat], n: usize, tol: &ToleranceProfile) -> RMat {
    let dim = n * (n - 1) / 2;
    if gens.is_empty() {
        return RMat::identity(dim, dim);
    }
    let g = RMat::from_fn(gens.len(), dim, |r, c| so_coords(&gens[r])[c]);
    nullspace(&g, tol)
}

/// The action of span(gens) on its complement in so(n), by commutators.
pub fn complement_rep(gens: &[RMat], tol: &ToleranceProfile) -> Result<RepAction> {
    let n = check_antisymmetric(gens)?;
    let comp = so_complement(gens, n, tol);
    let cols: Vec<RMat> = (0..comp.ncols()).map(|j| so_matrix(n, comp.column(j).as_slice())).collect();
    let out = gens
        .iter()
        .map(|r| {
            let mut m = RMat::zeros(cols.len(), cols.len());
            for (j, c) in cols.iter().enumerate() {
                let v = so_coords(&(r * c - c * r));
                m.set_column(j, &(comp.transpose() * v));
            }
            m
        })
        .collect();
    RepAction::new("complement", out)
}

/// Σ gᵢ², exploiting sparsity of the generators.
pub fn casimir(rep: &RepAction) -> RMat {
    let n = rep.dim;
    let mut c = RMat::zeros(n, n);
    for g in &rep.generators {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for col in 0..n {
            for row in 0..n {
                let v = g[(row, col)];
                if v != 0.0 {
                    rows[row].push((col, v));
                }
            }
        }
        for a in 0..n {
            for &(b, x) in &rows[a] {
                for &(cc, y) in &rows[b] {
                    c[(a, cc)] += x * y;
                }
            }
        }
    }
    c
}

#[derive(Clone, Debug)]
pub struct IsotypicPart {
    pub casimir_eigenvalue: f64,
    pub dimension: usize,
    pub basis: RMat,
}

#[derive(Clone, Debug)]
pub struct IsotypicDecomposition {
    pub parts: Vec<IsotypicPart>,
}

impl IsotypicDecomposition {
    /// Eigenvalue (rounded to 1e-6) → dimension.
    pub fn table(&self) -> Vec<(f64, usize)> {
        self.parts.iter().map(|p| ((p.casimir_eigenvalue * 1e6).round() / 1e6, p.dimension)).collect()
    }

    pub fn part(&self, eigenvalue: f64, width: f64) -> Option<&IsotypicPart> {
        self.parts.iter().find(|p| (p.casimir_eigenvalue - eigenvalue).abs() <= width)
    }

    /// Squared norm of `v` in each part.
    pub fn components(&self, v: &RVec) -> Vec<(f64, f64)> {
        self.parts
            .iter()
            .map(|p| (p.casimir_eigenvalue, (p.basis.transpose() * v).norm_squared()))
            .collect()
    }
}

pub fn isotypic_decompose(rep: &RepAction, tol: &ToleranceProfile) -> Result<IsotypicDecomposition> {
    if rep.dim == 0 {
        return Ok(IsotypicDecomposition { parts: Vec::new() });
    }
    let c = casimir(rep);
    let parts = eig_selfadjoint(&c, tol)?
        .into_iter()
        .map(|e| IsotypicPart {
            casimir_eigenvalue: e.value,
            dimension: e.basis.ncols(),
            basis: e.basis,
        })
        .collect();
    Ok(IsotypicDecomposition { parts })
}

/// Λ³(V¹⁴) under sp(3), computed once.
pub fn lambda3_sp3() -> &'static IsotypicDecomposition {
    static CELL: OnceLock<IsotypicDecomposition> = OnceLock::new();
    CELL.get_or_init(|| {
        let rep = lambda3_action(&sp3catalog::load().rho).expect("rho is antisymmetric");
        isotypic_decompose(&rep, &ToleranceProfile::default()).expect("Casimir is symmetric")
    })
}

/// V¹⁴ ⊗ V⁷⁰ under sp(3).
pub fn v14_x_v70(tol: &ToleranceProfile) -> Result<(RepAction, IsotypicDecomposition)> {
    let rho = &sp3catalog::load().rho;
    let v14 = RepAction::new("v14", rho.clone())?;
    let v70 = complement_rep(rho, tol)?;
    let rep = tensor_product(&v14, &v70)?;
    let dec = isotypic_decompose(&rep, tol)?;
    Ok((rep, dec))
}

#[derive(Clone, Debug)]
pub struct ThetaMap {
    pub n: usize,
    /// (n · dim m) × C(n,3).
    pub matrix: RMat,
    /// so(n) coordinates of an orthonormal basis of m = g^⊥.
    pub complement_basis: RMat,
    pub group: String,
}

impl ThetaMap {
    pub fn kernel(&self, tol: &ToleranceProfile) -> RMat {
        nullspace(&self.matrix, tol)
    }

    pub fn apply(&self, form: &RVec) -> RVec {
        &self.matrix * form
    }
}

/// Θ(T) = Σ_l e_l ⊗ pr_m(e_l ⌟ T) on the increasing-triple basis.
pub fn theta_map(group: impl Into<String>, gens: &[RMat], tol: &ToleranceProfile) -> Result<ThetaMap> {
    let n = check_antisymmetric(gens)?;
    let comp = so_complement(gens, n, tol);
    let dm = comp.ncols();
    let triples = increasing_triples(n);
    let mut matrix = RMat::zeros(n * dm, triples.len());
    for (col, &[i, j, k]) in triples.iter().enumerate() {
        // e_i ⌟ = e_j∧e_k, e_j ⌟ = −e_i∧e_k, e_k ⌟ = e_i∧e_j.
        for (l, (a, b), s) in [(i, (j, k), 1.0), (j, (i, k), -1.0), (k, (i, j), 1.0)] {
            let p = pair_index(n, a, b);
            for r in 0..dm {
                matrix[(l * dm + r, col)] += s * comp[(p, r)];
            }
        }
    }
    Ok(ThetaMap {
        n,
        matrix,
        complement_basis: comp,
        group: group.into(),
    })
}

pub fn invariant_vectors(rep: &RepAction, tol: &ToleranceProfile) -> RMat {
    joint_kernel(&rep.generators, rep.dim, tol)
}

/// Bases of the isotypic blocks of a real orthogonal representation, from
/// the spectrum of a random symmetric commutant element; eigenspaces linked
/// by some intertwiner are merged.
pub fn commutant_blocks(gens: &[RMat], tol: &ToleranceProfile) -> Result<Vec<RMat>> {
    let n = check_antisymmetric(gens)?;
    let id = RMat::identity(n, n);
    // Column-major vec: vec(rX − Xr) = (1⊗r − rᵀ⊗1) vec X.
    let ops: Vec<RMat> = gens.iter().map(|r| id.kronecker(r) - r.transpose().kronecker(&id)).collect();
    let comm = joint_kernel(&ops, n * n, tol);
    let as_mat = |j: usize| RMat::from_column_slice(n, n, comm.column(j).as_slice());
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut x = RMat::zeros(n, n);
    for j in 0..comm.ncols() {
        x += as_mat(j) * standard_normal(&mut rng);
    }
    let x = (&x + x.transpose()) * 0.5;
    let spaces = eig_selfadjoint(&x, tol)?;

    let mut parent: Vec<usize> = (0..spaces.len()).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    for j in 0..comm.ncols() {
        let c = as_mat(j);
        let scale = max_abs(&c);
        for a in 0..spaces.len() {
            for b in 0..spaces.len() {
                if a == b {
                    continue;
                }
                let link = spaces[a].basis.transpose() * &c * &spaces[b].basis;
                if max_abs(&link) > 1e-6 * scale {
                    let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                    parent[ra] = rb;
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for a in 0..spaces.len() {
        let r = find(&mut parent, a);
        groups.entry(r).or_default().push(a);
    }
    Ok(groups
        .values()
        .map(|members| {
            let cols: Vec<RVec> = members.iter().flat_map(|&a| spaces[a].basis.column_iter().map(|c| c.into_owned()).collect::<Vec<_>>()).collect();
            RMat::from_columns(&cols)
        })
        .collect())
}

/// Isotypic block dimensions of V¹⁴ under a subalgebra, largest first.
pub fn subgroup_decompose(row: &SubgroupRow, tol: &ToleranceProfile) -> Result<Vec<usize>> {
    let d = sp3catalog::load();
    let gens_c: Vec<_> = row.generators.iter().map(|c| d.sp3.element(c)).collect();
    crate::liealg::MatrixLieAlgebra::new(row.name, gens_c, tol)?;
    let gens: Vec<RMat> = row.generators.iter().map(|c| d.rho_of(c)).collect();
    let mut dims: Vec<usize> = commutant_blocks(&gens, tol)?.iter().map(|b| b.ncols()).collect();
    dims.sort_by(|a, b| b.cmp(a));
    Ok(dims)
}

/// Multiset monomials i ≤ j ≤ k on n letters.
fn monomials(n: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i..n {
            for k in j..n {
                out.push([i, j, k]);
            }
        }
    }
    out
}

fn orbit_size(m: [usize; 3]) -> f64 {
    match (m[0] == m[1], m[1] == m[2]) {
        (true, true) => 1.0,
        (false, false) => 6.0,
        _ => 3.0,
    }
}

/// Derivative action on S³(Vⁿ) in the orthonormal monomial basis.
pub fn sym3_action(rho: &[RMat]) -> Result<RepAction> {
    let n = check_antisymmetric(rho)?;
    let mons = monomials(n);
    let index: BTreeMap<[usize; 3], usize> = mons.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let w: Vec<f64> = mons.iter().map(|&m| orbit_size(m).sqrt()).collect();
    let gens = rho
        .iter()
        .map(|r| {
            let mut g = RMat::zeros(mons.len(), mons.len());
            for (col, m) in mons.iter().enumerate() {
                for slot in 0..3 {
                    for l in 0..n {
                        let a = r[(l, m[slot])];
                        if a == 0.0 {
                            continue;
                        }
                        let mut u = *m;
                        u[slot] = l;
                        u.sort_unstable();
                        let row = index[&u];
                        g[(row, col)] += a * w[col] / w[row];
                    }
                }
            }
            g
        })
        .collect();
    RepAction::new("sym3", gens)
}

/// A unit-norm symmetric 3-tensor.
#[derive(Clone, Debug)]
pub struct SymCubic {
    pub tensor: Tensor3,
}

impl SymCubic {
    fn from_coords(n: usize, v: &[f64]) -> Self {
        let mut t = Tensor3::cube(n);
        for (c, m) in monomials(n).into_iter().enumerate() {
            let x = v[c] / orbit_size(m).sqrt();
            for p in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
                t[(m[p[0]], m[p[1]], m[p[2]])] = x;
            }
        }
        SymCubic { tensor: t }
    }

    pub fn n(&self) -> usize {
        self.tensor.dims()[0]
    }

    /// Υ_v as a matrix: (Υ_v)_{ij} = Υ(eᵢ,eⱼ,v).
    pub fn contract(&self, v: &RVec) -> RMat {
        let n = self.n();
        RMat::from_fn(n, n, |i, j| (0..n).map(|k| self.tensor[(i, j, k)] * v[k]).sum())
    }

    /// max_k |Σᵢ Υ(eᵢ,eᵢ,e_k)|.
    pub fn trace_defect(&self) -> f64 {
        let n = self.n();
        (0..n).map(|k| (0..n).map(|i| self.tensor[(i, i, k)]).sum::<f64>().abs()).fold(0.0, f64::max)
    }

    pub fn symmetry_defect(&self) -> f64 {
        let t = &self.tensor;
        t.sub(&t.permuted([1, 0, 2])).max_abs().max(t.sub(&t.permuted([0, 2, 1])).max_abs())
    }

    /// The scale c with (cΥ)²_v v = v at the unit vector `v`.
    pub fn metric_scale(&self, v: &RVec) -> f64 {
        let y = self.contract(v);
        let q = (&y * &y * v).dot(v);
        1.0 / q.sqrt()
    }

    /// max |(cΥ)²_v v − g(v,v) v| over the given vectors.
    pub fn reconstruction_defect(&self, c: f64, vs: &[RVec]) -> f64 {
        vs.iter()
            .map(|v| {
                let y = self.contract(v) * c;
                (&y * &y * v - v * v.norm_squared()).amax()
            })
            .fold(0.0, f64::max)
    }
}

/// sp(3)-invariant elements of S³(V¹⁴), each checked symmetric and trace-free.
pub fn invariant_cubics(tol: &ToleranceProfile) -> Result<Vec<SymCubic>> {
    let rep = sym3_action(&sp3catalog::load().rho)?;
    let k = invariant_vectors(&rep, tol);
    let out: Vec<SymCubic> = (0..k.ncols()).map(|j| SymCubic::from_coords(14, k.column(j).as_slice())).collect();
    for c in &out {
        let d = c.trace_defect().max(c.symmetry_defect());
        if d > tol.residual_tol {
            return Err(Error::NotClosed(d));
        }
    }
    Ok(out)
}

/// Deterministic unit vectors for property sweeps.
pub fn unit_samples(n: usize, count: usize, seed: u64) -> Vec<RVec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let v = RVec::from_fn(n, |_, _| standard_normal(&mut rng));
            let norm = v.norm();
            v / norm
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::{structure_constants, MatrixLieAlgebra};

    fn tol() -> ToleranceProfile {
        ToleranceProfile::default()
    }

    #[test]
    fn lambda3_dimension_and_leibniz() {
        let rho = &sp3catalog::load().rho;
        let nu = lambda3_action(rho).unwrap();
        assert_eq!(nu.dim, 364);
        // Slot-wise check on e1∧e5∧e9 under ν(A₉).
        let r = &rho[8];
        let col = triple_index(14, [0, 4, 8]);
        let mut expect = RVec::zeros(364);
        for l in 0..14 {
            for (slot, t) in [[l, 4, 8], [0, l, 8], [0, 4, l]].into_iter().enumerate() {
                let src = [0, 4, 8][slot];
                if let Some((s, sign)) = sort3(t) {
                    expect[triple_index(14, s)] += sign * r[(l, src)];
                }
            }
        }
        assert!((nu.generators[8].column(col) - expect).amax() < 1e-15);
    }

    #[test]
    fn lambda3_is_a_representation() {
        let d = sp3catalog::load();
        let c = structure_constants(&d.sp3, &tol()).unwrap();
        let nu = lambda3_action(&d.rho).unwrap();
        assert!(nu.homomorphism_residual(&c) < 1e-12);
    }

    #[test]
    fn casimir_on_v14_is_scalar() {
        let rep = RepAction::new("v14", sp3catalog::load().rho.clone()).unwrap();
        let c = casimir(&rep);
        let s = c[(0, 0)];
        assert!(max_abs(&(c - RMat::identity(14, 14) * s)) < 1e-13);
        assert!((s + 6.0).abs() < 1e-12);
    }

    #[test]
    fn lambda3_casimir_spectrum() {
        let dec = lambda3_sp3();
        let table = dec.table();
        assert_eq!(table, vec![(-18.0, 84), (-16.0, 189), (-12.0, 70), (-8.0, 21)]);
    }

    #[test]
    fn casimir_commutes_with_nu() {
        let nu = lambda3_action(&sp3catalog::load().rho).unwrap();
        let c = casimir(&nu);
        let g = &nu.generators[0];
        assert!(max_abs(&(&c * g - g * &c)) < 1e-12);
    }

    #[test]
    fn trivial_rep_single_part() {
        let rep = RepAction::new("zero", vec![RMat::zeros(5, 5); 3]).unwrap();
        let dec = isotypic_decompose(&rep, &tol()).unwrap();
        assert_eq!(dec.table(), vec![(0.0, 5)]);
    }

    #[test]
    fn theta_trivial_for_so_n() {
        let n = 5;
        let gens: Vec<RMat> = (0..10).map(|p| {
            let mut v = vec![0.0; 10];
            v[p] = 1.0;
            so_matrix(n, &v)
        }).collect();
        let th = theta_map("so5", &gens, &tol()).unwrap();
        assert_eq!(th.kernel(&tol()).ncols(), 10);
    }

    #[test]
    fn theta_sp3_injective() {
        let th = theta_map("sp3", &sp3catalog::load().rho, &tol()).unwrap();
        assert_eq!(th.matrix.shape(), (980, 364));
        assert_eq!(th.kernel(&tol()).ncols(), 0);
    }

    #[test]
    fn theta_matches_contraction_definition() {
        let rho = &sp3catalog::load().rho;
        let th = theta_map("sp3", rho, &tol()).unwrap();
        let col = triple_index(14, [1, 6, 11]);
        let mut form = RVec::zeros(364);
        form[col] = 1.0;
        let t = crate::tensor::form_tensor(14, &form);
        let mut direct = Vec::new();
        for l in 0..14 {
            let two = RMat::from_fn(14, 14, |a, b| t[(l, a, b)]);
            direct.extend((th.complement_basis.transpose() * so_coords(&two)).iter().copied());
        }
        assert!((th.apply(&form) - RVec::from_vec(direct)).amax() < 1e-15);
    }

    #[test]
    fn adjoint_su3_theta_kernel() {
        let su3 = MatrixLieAlgebra::su(3);
        let c = structure_constants(&su3, &tol()).unwrap();
        let ad: Vec<RMat> = (0..8).map(|i| RMat::from_fn(8, 8, |k, j| c[(i, j, k)])).collect();
        assert_eq!(theta_map("su3", &ad, &tol()).unwrap().kernel(&tol()).ncols(), 1);
    }

    #[test]
    fn invariant_vectors_of_full_rho_vanish() {
        let rep = RepAction::new("v14", sp3catalog::load().rho.clone()).unwrap();
        assert_eq!(invariant_vectors(&rep, &tol()).ncols(), 0);
    }

    #[test]
    fn sym3_action_is_orthogonal() {
        let rep = sym3_action(&sp3catalog::load().rho[..2]).unwrap();
        assert_eq!(rep.dim, 560);
        for g in &rep.generators {
            assert!(max_abs(&(g + g.transpose())) < 1e-13);
        }
    }

    #[test]
    fn table2_rows() {
        for row in sp3catalog::subgroup_rows() {
            let mut expected = row.expected_blocks.clone();
            expected.sort_by(|a, b| b.cmp(a));
            assert_eq!(subgroup_decompose(&row, &tol()).unwrap(), expected, "{}", row.name);
        }
    }
}
