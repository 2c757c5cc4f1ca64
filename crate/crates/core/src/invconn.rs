//! Invariant sp(3)-connections on the catalog spaces: the equivariance
//! system, torsion, the characteristic connection, ∇T, torsion types and
//! holonomy.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numkernel::{joint_kernel, lstsq, max_abs, range_basis, RMat, RVec, ToleranceProfile};
use crate::repdecomp::{lambda3_sp3, so_coords, so_matrix};
use crate::sp3catalog;
use crate::spaces::HomogeneousSpaceInstance;
use crate::tensor::{form_coords, skew_defect, Tensor3};

const N: usize = 14;
const NA: usize = 21;

/// Linear maps Λ: m → sp(3) commuting with the isotropy action, each a
/// 14×21 matrix (row i = coefficients of Λ(Kᵢ) on ρ(A₁)..ρ(A₂₁)).
#[derive(Clone, Debug)]
pub struct EquivariantFamily {
    pub basis: Vec<RMat>,
}

impl EquivariantFamily {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn combine(&self, c: &[f64]) -> RMat {
        self.basis.iter().zip(c).fold(RMat::zeros(N, NA), |acc, (b, x)| acc + b * *x)
    }
}

#[derive(Clone, Debug)]
pub struct InvariantConnection {
    pub lambda: RMat,
}

impl InvariantConnection {
    pub fn zero() -> Self {
        InvariantConnection {
            lambda: RMat::zeros(N, NA),
        }
    }

    /// Λ(K₁)..Λ(K₁₄) as 14×14 matrices.
    pub fn maps(&self) -> Vec<RMat> {
        let d = sp3catalog::load();
        (0..N)
            .map(|i| {
                let row: Vec<f64> = self.lambda.row(i).iter().copied().collect();
                d.rho_of(&row)
            })
            .collect()
    }

    /// Entries with |coefficient| above `cutoff`, as (K index, A index, value).
    pub fn nonzero_entries(&self, cutoff: f64) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for i in 0..N {
            for a in 0..NA {
                let x = self.lambda[(i, a)];
                if x.abs() > cutoff {
                    out.push((i, a, x));
                }
            }
        }
        out
    }
}

/// `t12[(i,j,k)]` is the Kₖ-component of T(Kᵢ,Kⱼ). The K basis is
/// orthonormal, so the lowered form T(Kᵢ,Kⱼ,Kₖ) has the same entries.
#[derive(Clone, Debug)]
pub struct TorsionTensor {
    pub t12: Tensor3,
}

impl TorsionTensor {
    pub fn t3(&self) -> &Tensor3 {
        &self.t12
    }

    /// Sum of squares over increasing triples.
    pub fn norm_sq_increasing(&self) -> f64 {
        form_coords(&self.t12).norm_squared()
    }

    /// Sum of squares over all ordered triples (6× the increasing sum for a 3-form).
    pub fn norm_sq_ordered(&self) -> f64 {
        self.t12.norm_sq()
    }

    pub fn skew_defect(&self) -> f64 {
        skew_defect(&self.t12)
    }
}

/// Solves Λ(ρ(h)X) = [ρ(h), Λ(X)] for every isotropy generator h.
pub fn solve_equivariant(space: &HomogeneousSpaceInstance, tol: &ToleranceProfile) -> EquivariantFamily {
    let d = sp3catalog::load();
    let i14 = RMat::identity(N, N);
    let i21 = RMat::identity(NA, NA);
    // Row-major vec(L): vec(rᵀL) = (rᵀ⊗1) vec L and vec(L adᵀ) = (1⊗ad) vec L.
    let ops: Vec<RMat> = space
        .isotropy
        .iter()
        .map(|r| r.transpose().kronecker(&i21) - i14.kronecker(&d.ad_in_rho(r)))
        .collect();
    let k = joint_kernel(&ops, N * NA, tol);
    let basis = (0..k.ncols()).map(|j| RMat::from_row_slice(N, NA, k.column(j).as_slice())).collect();
    EquivariantFamily { basis }
}

/// Max over generators of |Λ(ρ(h)Kⱼ) − [ρ(h), Λ(Kⱼ)]|.
pub fn equivariance_residual(space: &HomogeneousSpaceInstance, conn: &InvariantConnection) -> f64 {
    let maps = conn.maps();
    let mut worst: f64 = 0.0;
    for r in &space.isotropy {
        for j in 0..N {
            let lhs = (0..N).fold(RMat::zeros(N, N), |acc, i| acc + &maps[i] * r[(i, j)]);
            let rhs = r * &maps[j] - &maps[j] * r;
            worst = worst.max(max_abs(&(lhs - rhs)));
        }
    }
    worst
}

/// T(X,Y) = Λ(X)Y − Λ(Y)X − [X,Y]_m.
pub fn torsion(space: &HomogeneousSpaceInstance, conn: &InvariantConnection) -> TorsionTensor {
    let maps = conn.maps();
    let t12 = Tensor3::from_fn(N, N, N, |i, j, k| maps[i][(k, j)] - maps[j][(k, i)] - space.brm[(i, j, k)]);
    TorsionTensor { t12 }
}

#[derive(Clone, Debug)]
pub struct CharacteristicConnection {
    pub connection: InvariantConnection,
    pub torsion: TorsionTensor,
    /// Dimension of the affine solution set of the skewness system.
    pub solution_dim: usize,
    pub residual: f64,
}

fn symmetric_part(t: &Tensor3) -> RVec {
    let n = t.dims()[0];
    let mut v = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                v.push(t[(i, j, k)] + t[(i, k, j)]);
            }
        }
    }
    RVec::from_vec(v)
}

/// The family member whose torsion is a 3-form; `Infeasible` when none is.
pub fn characteristic_connection(space: &HomogeneousSpaceInstance, tol: &ToleranceProfile) -> Result<CharacteristicConnection> {
    let family = solve_equivariant(space, tol);
    characteristic_in_family(space, &family, tol)
}

pub fn characteristic_in_family(
    space: &HomogeneousSpaceInstance,
    family: &EquivariantFamily,
    tol: &ToleranceProfile,
) -> Result<CharacteristicConnection> {
    let base = torsion(space, &InvariantConnection::zero());
    let b = -symmetric_part(&base.t12);
    let cols: Vec<RVec> = family
        .basis
        .iter()
        .map(|l| symmetric_part(&torsion(space, &InvariantConnection { lambda: l.clone() }).t12.sub(&base.t12)))
        .collect();
    let m = if cols.is_empty() { RMat::zeros(b.len(), 0) } else { RMat::from_columns(&cols) };
    let (c, residual) = lstsq(&m, &b, tol);
    let scale = base.t12.max_abs().max(1.0);
    if residual > tol.residual_tol * scale {
        return Err(Error::Infeasible(residual));
    }
    let solution_dim = family.dim() - crate::numkernel::rank(&m, tol);
    let connection = InvariantConnection {
        lambda: family.combine(c.as_slice()),
    };
    let torsion = torsion(space, &connection);
    Ok(CharacteristicConnection {
        connection,
        torsion,
        solution_dim,
        residual,
    })
}

/// (∇_{Kᵥ}T)(Kᵢ,Kⱼ) for every v, indexed `[v][(i,j,p)]`.
pub fn nabla_torsion(conn: &InvariantConnection, t: &TorsionTensor) -> Vec<Tensor3> {
    let t = &t.t12;
    conn.maps()
        .iter()
        .map(|a| {
            Tensor3::from_fn(N, N, N, |i, j, p| {
                let mut s = 0.0;
                for l in 0..N {
                    s += a[(p, l)] * t[(i, j, l)] - a[(l, i)] * t[(l, j, p)] - a[(l, j)] * t[(i, l, p)];
                }
                s
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ParallelCheck {
    pub max_entry: f64,
    pub threshold: f64,
    pub parallel: bool,
}

/// ∇T = 0 up to 1e-7·max|T| (plus an absolute residual_tol floor so that
/// vanishing torsion counts as parallel).
pub fn parallel_torsion(conn: &InvariantConnection, t: &TorsionTensor, tol: &ToleranceProfile) -> ParallelCheck {
    let max_entry = nabla_torsion(conn, t).iter().fold(0.0f64, |m, x| m.max(x.max_abs()));
    let threshold = 1e-7 * t.t12.max_abs() + tol.residual_tol;
    ParallelCheck {
        max_entry,
        threshold,
        parallel: max_entry <= threshold,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TypeReport {
    /// (Casimir eigenvalue, squared norm of the component), ascending by eigenvalue.
    pub components: Vec<(f64, f64)>,
    /// The eigenvalue when exactly one component is nonzero.
    pub pure: Option<f64>,
}

impl TypeReport {
    pub fn nonzero_count(&self, cutoff: f64) -> usize {
        self.components.iter().filter(|c| c.1 > cutoff).count()
    }

    pub fn component(&self, eigenvalue: f64) -> f64 {
        self.components.iter().find(|c| (c.0 - eigenvalue).abs() < 1e-6).map_or(0.0, |c| c.1)
    }
}

/// Casimir components of the torsion 3-form in Λ³(V¹⁴).
pub fn classify_type(t: &TorsionTensor, tol: &ToleranceProfile) -> Result<TypeReport> {
    let defect = t.skew_defect();
    if defect > tol.residual_tol * t.t12.max_abs().max(1.0) {
        return Err(Error::NotSkew(defect));
    }
    let comps: Vec<(f64, f64)> = lambda3_sp3()
        .components(&form_coords(&t.t12))
        .into_iter()
        .map(|(ev, n)| ((ev * 1e6).round() / 1e6, n))
        .collect();
    let live: Vec<f64> = comps.iter().filter(|c| c.1 > tol.residual_tol).map(|c| c.0).collect();
    let pure = if live.len() == 1 { Some(live[0]) } else { None };
    Ok(TypeReport { components: comps, pure })
}

#[derive(Clone, Debug)]
pub struct HolonomyResult {
    pub basis: Vec<RMat>,
    pub label: String,
    /// Largest distance of a basis element from ρ(sp(3)).
    pub outside_sp3: f64,
}

impl HolonomyResult {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// R(Kᵢ,Kⱼ) = [Λᵢ,Λⱼ] − Λ([Kᵢ,Kⱼ]_m) − ρ([Kᵢ,Kⱼ]_h).
pub fn curvature_operator(space: &HomogeneousSpaceInstance, maps: &[RMat], i: usize, j: usize) -> RMat {
    let mut r = &maps[i] * &maps[j] - &maps[j] * &maps[i] - space.isotropy_of_bracket(i, j);
    for (k, m) in maps.iter().enumerate() {
        let c = space.brm[(i, j, k)];
        if c != 0.0 {
            r -= m * c;
        }
    }
    r
}

fn span(vectors: &[RVec], tol: &ToleranceProfile) -> Vec<RVec> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let m = RMat::from_columns(vectors);
    if max_abs(&m) <= tol.residual_tol {
        return Vec::new();
    }
    let r = range_basis(&m, tol);
    (0..r.ncols()).map(|j| r.column(j).into_owned()).collect()
}

/// Curvature endomorphisms closed under brackets with Λ(m) and with themselves.
pub fn holonomy_algebra(space: &HomogeneousSpaceInstance, conn: &InvariantConnection, tol: &ToleranceProfile) -> HolonomyResult {
    let maps = conn.maps();
    let mut seeds = Vec::new();
    for i in 0..N {
        for j in i + 1..N {
            seeds.push(so_coords(&curvature_operator(space, &maps, i, j)));
        }
    }
    let mut basis = span(&seeds, tol);
    for _ in 0..91 {
        let mats: Vec<RMat> = basis.iter().map(|v| so_matrix(N, v.as_slice())).collect();
        let mut next = basis.clone();
        for b in &mats {
            for x in maps.iter().chain(&mats) {
                next.push(so_coords(&(x * b - b * x)));
            }
        }
        let grown = span(&next, tol);
        let done = grown.len() == basis.len();
        basis = grown;
        if done {
            break;
        }
    }
    let mats: Vec<RMat> = basis.iter().map(|v| so_matrix(N, v.as_slice())).collect();
    let d = sp3catalog::load();
    let outside_sp3 = mats.iter().fold(0.0f64, |m, x| m.max(d.rho_coords(x).1));
    let label = holonomy_label(&mats, tol);
    HolonomyResult {
        basis: mats,
        label,
        outside_sp3,
    }
}

fn holonomy_label(mats: &[RMat], tol: &ToleranceProfile) -> String {
    let d = sp3catalog::load();
    let dim = mats.len();
    if dim == 0 {
        return "0".into();
    }
    let abelian = mats.iter().all(|a| mats.iter().all(|b| max_abs(&(a * b - b * a)) <= tol.residual_tol));
    if abelian {
        return format!("torus t{dim}");
    }
    // Spread of each element outside sp(2) = span ρ(A₁..A₁₀).
    let coords: Vec<RVec> = mats.iter().map(|m| d.rho_coords(m).0).collect();
    let outside_sp2 = |c: &RVec| c.rows(10, 11).amax();
    let in_sp2 = coords.iter().all(|c| outside_sp2(c) <= tol.residual_tol.sqrt());
    match dim {
        21 => "sp(3)".into(),
        10 if in_sp2 => "sp(2)".into(),
        11 => {
            let contains_sp2 = {
                let m = RMat::from_columns(&coords);
                (0..10).all(|a| {
                    let mut e = RVec::zeros(NA);
                    e[a] = 1.0;
                    lstsq(&m, &e, tol).1 <= tol.residual_tol.sqrt()
                })
            };
            if contains_sp2 {
                "sp(2)+W1".into()
            } else {
                format!("dim {dim}")
            }
        }
        _ => format!("dim {dim}"),
    }
}

#[derive(Clone, Debug)]
pub struct ParallelFields {
    /// Columns: invariant vectors on which the holonomy acts trivially.
    pub basis: RMat,
    /// Ω = ξ ⌟ T for each basis column.
    pub forms: Vec<RMat>,
}

pub fn parallel_vector_fields(
    space: &HomogeneousSpaceInstance,
    holonomy: &HolonomyResult,
    t: &TorsionTensor,
    tol: &ToleranceProfile,
) -> ParallelFields {
    let ops: Vec<RMat> = space.isotropy.iter().chain(&holonomy.basis).cloned().collect();
    let basis = joint_kernel(&ops, N, tol);
    let forms = (0..basis.ncols())
        .map(|c| RMat::from_fn(N, N, |j, k| (0..N).map(|i| basis[(i, c)] * t.t12[(i, j, k)]).sum()))
        .collect();
    ParallelFields { basis, forms }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{build, fixtures, MetricParams, SpaceId};

    fn tol() -> ToleranceProfile {
        ToleranceProfile::default()
    }

    fn space(id: SpaceId, a: f64, b: f64, g: f64) -> HomogeneousSpaceInstance {
        build(id, &MetricParams::uniform(id, a, b, g), &tol()).unwrap()
    }

    #[test]
    fn family_dimensions() {
        for id in SpaceId::ALL {
            let s = space(id, 1.3, 0.7, 1.9);
            let f = solve_equivariant(&s, &tol());
            assert_eq!(f.dim(), fixtures(id).expected_family_dim, "{id}");
            for l in &f.basis {
                assert!(equivariance_residual(&s, &InvariantConnection { lambda: l.clone() }) < 1e-10);
            }
        }
    }

    #[test]
    fn torsion_is_antisymmetric_in_first_pair() {
        let s = space(SpaceId::M2, 1.1, 0.6, 2.0);
        let f = solve_equivariant(&s, &tol());
        let c: Vec<f64> = (0..f.dim()).map(|i| (i as f64 * 0.37).sin()).collect();
        let t = torsion(&s, &InvariantConnection { lambda: f.combine(&c) });
        for i in 0..N {
            for j in 0..N {
                for k in 0..N {
                    assert!((t.t12[(i, j, k)] + t.t12[(j, i, k)]).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn characteristic_matches_fixtures() {
        for id in SpaceId::ALL {
            let p = MetricParams::uniform(id, 1.3, 0.7, 1.9);
            let s = build(id, &p, &tol()).unwrap();
            let ch = characteristic_connection(&s, &tol()).unwrap();
            assert_eq!(ch.solution_dim, 0);
            let fx = fixtures(id);
            let mut expected = RMat::zeros(N, NA);
            for (k, a, x) in fx.expected_lambda(&p) {
                expected[(k, a)] = x;
            }
            assert!(max_abs(&(&ch.connection.lambda - expected)) < 1e-10, "{id}");
            let mut t = Tensor3::cube(N);
            for ([i, j, k], x) in fx.expected_torsion(&p) {
                t[(i, j, k)] = x;
            }
            let got = form_coords(&ch.torsion.t12);
            assert!((got - form_coords(&t)).amax() < 1e-10, "{id}");
            assert!(ch.torsion.skew_defect() < 1e-10, "{}", ch.torsion.skew_defect());
        }
    }

    #[test]
    fn unequal_alphas_are_infeasible() {
        let p = MetricParams::new(1.0, vec![2.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0], 1.0, 1.0);
        let s = build(SpaceId::M1, &p, &tol()).unwrap();
        assert!(matches!(characteristic_connection(&s, &tol()), Err(Error::Infeasible(_))));
    }

    #[test]
    fn m4_parallel_loci() {
        for (b, g, parallel) in [(1.0, 1.7, true), (2.0, 1.2, true), (1.5, 1.0, false)] {
            let s = space(SpaceId::M4, 1.0, b, g);
            let ch = characteristic_connection(&s, &tol()).unwrap();
            let chk = parallel_torsion(&ch.connection, &ch.torsion, &tol());
            assert_eq!(chk.parallel, parallel, "β={b} γ={g}: {chk:?}");
        }
    }

    #[test]
    fn m4_pure_types() {
        let a8 = (15f64.sqrt() - 1.0) / 4.0;
        let a16 = (9.0 - 15f64.sqrt()) / 12.0;
        for (a, ev) in [(a8, -8.0), (a16, -16.0)] {
            let s = space(SpaceId::M4, a, 1.0, 1.0);
            let ch = characteristic_connection(&s, &tol()).unwrap();
            let ty = classify_type(&ch.torsion, &tol()).unwrap();
            assert_eq!(ty.pure, Some(ev), "{ty:?}");
        }
        let s = space(SpaceId::M1, 1.0, 1.0, 1.0);
        let ch = characteristic_connection(&s, &tol()).unwrap();
        let ty = classify_type(&ch.torsion, &tol()).unwrap();
        assert!(ty.nonzero_count(1e-12) >= 2);
        let total: f64 = ty.components.iter().map(|c| c.1).sum();
        assert!((total - ch.torsion.norm_sq_increasing()).abs() < 1e-10);
    }

    #[test]
    fn holonomy_cases() {
        let cases = [
            (SpaceId::M1, 1.0, 1.0, 1.0),
            (SpaceId::M1, 1.0, 1.0, 2.0),
            (SpaceId::M1, 1.0, 2.0, 1.0),
            (SpaceId::M1, 1.0, 2.0, 3.0),
            (SpaceId::M2, 1.0, 1.0, 2.0),
            (SpaceId::M2, 1.0, 2.0, 1.0),
            (SpaceId::M3, 1.3, 0.4, 2.0),
            (SpaceId::M4, 1.0, 2.0, 1.0),
            (SpaceId::M4, 1.0, 1.0, 2.0),
            (SpaceId::M4, 1.0, 1.0, 1.0),
        ];
        for (id, a, b, g) in cases {
            let p = MetricParams::uniform(id, a, b, g);
            let s = build(id, &p, &tol()).unwrap();
            let ch = characteristic_connection(&s, &tol()).unwrap();
            let h = holonomy_algebra(&s, &ch.connection, &tol());
            assert_eq!(h.dim(), fixtures(id).expected_holonomy_dim(&p), "{id} {p:?}");
            assert!(h.outside_sp3 < 1e-9);
        }
    }

    #[test]
    fn holonomy_labels_and_parallel_fields() {
        let s = space(SpaceId::M4, 1.0, 1.0, 1.0);
        let ch = characteristic_connection(&s, &tol()).unwrap();
        let h = holonomy_algebra(&s, &ch.connection, &tol());
        assert_eq!(h.label, "sp(2)");
        let pf = parallel_vector_fields(&s, &h, &ch.torsion, &tol());
        assert_eq!(pf.basis.ncols(), 1);
        assert!((pf.basis[(13, 0)].abs() - 1.0).abs() < 1e-10);

        let s = space(SpaceId::M1, 1.0, 2.0, 3.0);
        let ch = characteristic_connection(&s, &tol()).unwrap();
        let h = holonomy_algebra(&s, &ch.connection, &tol());
        assert_eq!(h.label, "torus t3");
        assert!(parallel_vector_fields(&s, &h, &ch.torsion, &tol()).basis.ncols() >= 2);
    }
}
