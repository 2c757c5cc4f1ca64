//! sp(3) inside su(6): the bases A₁..A₂₁ and B₁..B₁₄, the isotropy
//! representation on V¹⁴ and the maximal-subgroup generator sets.
//!
//! Indices in the literal tables below are 1-based exactly as tabulated; all
//! public data is 0-based.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::liealg::{base_ip, e_gen, isotropy_matrices, s_gen, InnerProductSpec, MatrixLieAlgebra, ReductiveSplit};
use crate::numkernel::{max_abs, CMat, RMat, RVec, ToleranceProfile, C64};

const R2: f64 = std::f64::consts::SQRT_2;

fn e6(i: usize, j: usize) -> CMat {
    e_gen(6, i - 1, j - 1)
}

fn s6(i: usize, j: usize) -> CMat {
    s_gen(6, i - 1, j - 1)
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn im(x: f64) -> C64 {
    C64::new(0.0, x)
}

fn basis_a() -> Vec<CMat> {
    let h = re(0.5);
    let ih = im(0.5);
    let r = re(1.0 / R2);
    let ir = im(1.0 / R2);
    vec![
        (e6(2, 3) + e6(5, 6)) * h,
        (s6(2, 3) - s6(5, 6)) * ih,
        (e6(2, 6) + e6(3, 5)) * h,
        (s6(2, 6) + s6(3, 5)) * ih,
        e6(2, 5) * r,
        e6(3, 6) * r,
        s6(2, 5) * ir,
        s6(3, 6) * ir,
        (s6(2, 2) - s6(5, 5)) * ir,
        (s6(3, 3) - s6(6, 6)) * ir,
        (e6(1, 3) + e6(4, 6)) * h,
        (s6(1, 3) - s6(4, 6)) * ih,
        (e6(1, 6) + e6(3, 4)) * h,
        (s6(1, 6) + s6(3, 4)) * ih,
        (e6(1, 5) + e6(2, 4)) * h,
        (s6(1, 5) + s6(2, 4)) * ih,
        (e6(1, 2) + e6(4, 5)) * h,
        (s6(1, 2) - s6(4, 5)) * ih,
        e6(1, 4) * r,
        s6(1, 4) * ir,
        (s6(1, 1) - s6(4, 4)) * ir,
    ]
}

fn basis_b() -> Vec<CMat> {
    let h = re(0.5);
    let ih = im(0.5);
    vec![
        (e6(1, 3) - e6(4, 6)) * h,
        (s6(1, 3) + s6(4, 6)) * ih,
        (e6(1, 6) - e6(3, 4)) * h,
        (s6(1, 6) - s6(3, 4)) * ih,
        (e6(1, 2) - e6(4, 5)) * h,
        (s6(1, 2) + s6(4, 5)) * ih,
        (e6(1, 5) - e6(2, 4)) * h,
        (s6(1, 5) - s6(2, 4)) * ih,
        (e6(2, 3) - e6(5, 6)) * h,
        (s6(2, 3) + s6(5, 6)) * ih,
        (e6(2, 6) - e6(3, 5)) * h,
        (s6(2, 6) - s6(3, 5)) * ih,
        (s6(2, 2) - s6(3, 3) + s6(5, 5) - s6(6, 6)) * ih,
        (s6(1, 1) * re(-2.0) + s6(2, 2) + s6(3, 3) - s6(4, 4) * re(2.0) + s6(5, 5) + s6(6, 6)) * im(1.0 / (2.0 * 3f64.sqrt())),
    ]
}

/// Coefficient symbols as they appear in the tabulated isotropy tables.
#[derive(Clone, Copy)]
enum Tabulated {
    Half,
    One,
    /// Written as √3/2.
    Root3Half,
}

use Tabulated::{Half, One, Root3Half};

type Term = (f64, Tabulated, usize, usize);

/// ρ(A₁)..ρ(A₂₁) as tabulated: Σ sign·coef·E¹⁴_{i,j}.
const TABULATED_RHO: [&[Term]; 21] = [
    &[(-1., Half, 1, 5), (-1., Half, 2, 6), (-1., Half, 3, 7), (-1., Half, 4, 8), (-1., One, 10, 13)],
    &[(1., Half, 1, 6), (-1., Half, 2, 5), (-1., Half, 3, 8), (1., Half, 4, 7), (1., One, 9, 13)],
    &[(1., Half, 1, 7), (1., Half, 2, 8), (-1., Half, 3, 5), (-1., Half, 4, 6), (-1., One, 12, 13)],
    &[(1., Half, 1, 8), (-1., Half, 2, 7), (1., Half, 3, 6), (-1., Half, 4, 5), (1., One, 11, 13)],
    &[(1., Root3Half, 5, 7), (1., Root3Half, 6, 8), (1., Root3Half, 9, 11), (-1., Root3Half, 10, 12)],
    &[(1., Root3Half, 1, 3), (1., Root3Half, 2, 4), (1., Root3Half, 9, 11), (1., Root3Half, 10, 12)],
    &[(1., Root3Half, 5, 8), (-1., Root3Half, 6, 7), (1., Root3Half, 9, 12), (1., Root3Half, 10, 11)],
    &[(1., Root3Half, 1, 4), (-1., Root3Half, 2, 3), (1., Root3Half, 9, 12), (-1., Root3Half, 10, 11)],
    &[(1., Root3Half, 5, 6), (-1., Root3Half, 7, 8), (-1., Root3Half, 9, 10), (-1., Root3Half, 11, 12)],
    &[(1., Root3Half, 1, 2), (-1., Root3Half, 3, 4), (1., Root3Half, 9, 10), (-1., Root3Half, 11, 12)],
    &[(-1., Half, 2, 13), (1., Root3Half, 2, 14), (-1., Half, 5, 9), (1., Half, 6, 10), (-1., Half, 7, 11), (-1., Half, 8, 12)],
    &[(1., Half, 1, 13), (-1., Root3Half, 1, 14), (-1., Half, 5, 10), (-1., Half, 6, 9), (1., Half, 7, 12), (-1., Half, 8, 11)],
    &[(-1., Half, 4, 13), (1., Root3Half, 4, 14), (-1., Half, 5, 11), (1., Half, 6, 12), (1., Half, 7, 9), (1., Half, 8, 10)],
    &[(1., Half, 3, 13), (-1., Root3Half, 3, 14), (-1., Half, 5, 12), (-1., Half, 6, 11), (-1., Half, 7, 10), (1., Half, 8, 9)],
    &[(1., Half, 1, 11), (-1., Half, 2, 12), (-1., Half, 3, 9), (1., Half, 4, 10), (1., Half, 8, 13), (1., Root3Half, 8, 14)],
    &[(1., Half, 1, 12), (1., Half, 2, 11), (-1., Half, 3, 10), (-1., Half, 4, 9), (-1., Half, 7, 13), (-1., Root3Half, 7, 14)],
    &[(1., Half, 1, 9), (1., Half, 2, 10), (1., Half, 3, 11), (1., Half, 4, 12), (1., Half, 6, 13), (1., Root3Half, 6, 14)],
    &[(-1., Half, 1, 10), (1., Half, 2, 9), (-1., Half, 3, 12), (1., Half, 4, 11), (-1., Half, 5, 13), (-1., Root3Half, 5, 14)],
    &[(1., Root3Half, 1, 3), (-1., Root3Half, 2, 4), (1., Root3Half, 5, 7), (-1., Root3Half, 6, 8)],
    &[(1., Root3Half, 1, 4), (1., Root3Half, 2, 3), (1., Root3Half, 5, 8), (1., Root3Half, 6, 7)],
    &[(-1., Root3Half, 1, 2), (-1., Root3Half, 3, 4), (-1., Root3Half, 5, 6), (-1., Root3Half, 7, 8)],
];

/// Generators (0-based) whose tabulated √3/2 must read 1/√2. With the tabulated
/// value ρ fails to be a homomorphism; ρ₁(H¹) = √2·ρ(A₂₁) with H¹ acting by
/// unit coefficients pins 1/√2.
const READ_AS_INV_ROOT2: [usize; 9] = [4, 5, 6, 7, 8, 9, 18, 19, 20];

fn e14(coef: f64, i: usize, j: usize, m: &mut RMat) {
    m[(j - 1, i - 1)] -= coef;
    m[(i - 1, j - 1)] += coef;
}

fn assemble(index: usize, corrected: bool) -> RMat {
    let mut m = RMat::zeros(14, 14);
    for &(sign, sym, i, j) in TABULATED_RHO[index] {
        let c = match sym {
            Half => 0.5,
            One => 1.0,
            Root3Half if corrected && READ_AS_INV_ROOT2.contains(&index) => 1.0 / R2,
            Root3Half => 3f64.sqrt() / 2.0,
        };
        e14(sign * c, i, j, &mut m);
    }
    m
}

/// The isotropy tables exactly as tabulated (before the coefficient reading).
pub fn tabulated_rho() -> Vec<RMat> {
    (0..21).map(|i| assemble(i, false)).collect()
}

#[derive(Clone, Debug)]
pub struct SubgroupRow {
    pub name: &'static str,
    /// Each generator as coefficients on A₁..A₂₁.
    pub generators: Vec<[f64; 21]>,
    pub expected_blocks: Vec<usize>,
}

#[derive(Debug)]
pub struct Sp3Data {
    pub a: Vec<CMat>,
    pub b: Vec<CMat>,
    pub rho: Vec<RMat>,
    pub sp3: MatrixLieAlgebra,
    pub su6: MatrixLieAlgebra,
    /// Left inverse of the 196×21 matrix whose columns are vec ρ(Aᵢ).
    rho_pinv: RMat,
}

impl Sp3Data {
    /// Coordinates of an element of sp(3) on the A basis (orthonormal).
    pub fn a_coords(&self, x: &CMat) -> [f64; 21] {
        let mut c = [0.0; 21];
        for (k, a) in self.a.iter().enumerate() {
            c[k] = base_ip(x, a);
        }
        c
    }

    /// ρ applied to a combination of the A basis.
    pub fn rho_of(&self, c: &[f64]) -> RMat {
        let mut m = RMat::zeros(14, 14);
        for (ci, r) in c.iter().zip(&self.rho) {
            if *ci != 0.0 {
                m += r * *ci;
            }
        }
        m
    }

    /// Coefficients of a 14×14 matrix on ρ(A₁)..ρ(A₂₁), and the residual of
    /// the least-squares fit (0 iff the matrix lies in ρ(sp(3))).
    pub fn rho_coords(&self, m: &RMat) -> (RVec, f64) {
        let v = RVec::from_column_slice(m.as_slice());
        let c = &self.rho_pinv * &v;
        let back = self.rho_of(c.as_slice());
        (c, max_abs(&(back - m)))
    }

    /// ad(x) on sp(3) in ρ coordinates, for x ∈ ρ(sp(3)).
    pub fn ad_in_rho(&self, x: &RMat) -> RMat {
        let mut out = RMat::zeros(21, 21);
        for (a, r) in self.rho.iter().enumerate() {
            out.set_column(a, &self.rho_coords(&(x * r - r * x)).0);
        }
        out
    }

    /// Max deviation of ρ from being a Lie algebra homomorphism.
    pub fn homomorphism_residual(&self, rho: &[RMat]) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..21 {
            for j in i + 1..21 {
                let c = self.a_coords(&(&self.a[i] * &self.a[j] - &self.a[j] * &self.a[i]));
                let lhs: RMat = c.iter().zip(rho).fold(RMat::zeros(14, 14), |acc, (ci, r)| acc + r * *ci);
                let rhs = &rho[i] * &rho[j] - &rho[j] * &rho[i];
                worst = worst.max(max_abs(&(lhs - rhs)));
            }
        }
        worst
    }
}

/// The catalog, built once and cached.
pub fn load() -> &'static Sp3Data {
    static DATA: OnceLock<Sp3Data> = OnceLock::new();
    DATA.get_or_init(|| {
        let tol = ToleranceProfile::default();
        let a = basis_a();
        let b = basis_b();
        let sp3 = MatrixLieAlgebra::new("sp(3)", a.clone(), &tol).expect("A basis closes");
        let mut all = a.clone();
        all.extend(b.iter().cloned());
        let su6 = MatrixLieAlgebra::new("su(6)", all, &tol).expect("A and B span su(6)");
        let rho: Vec<RMat> = (0..21).map(|i| assemble(i, true)).collect();
        let stacked = RMat::from_fn(196, 21, |r, c| rho[c].as_slice()[r]);
        let gram = stacked.transpose() * &stacked;
        let rho_pinv = gram.try_inverse().expect("ρ is injective") * stacked.transpose();
        Sp3Data { a, b, rho, sp3, su6, rho_pinv }
    })
}

/// ad(Aᵢ)|_m in the B basis, compared against the stored tables.
pub fn derive_isotropy(tol: &ToleranceProfile) -> Result<Vec<RMat>> {
    let d = load();
    let split = ReductiveSplit::from_bases(d.su6.clone(), d.a.clone(), d.b.clone(), InnerProductSpec::uniform(14, 1.0)?, tol)?;
    let derived = isotropy_matrices(&split, tol)?;
    for (index, (x, r)) in derived.iter().zip(&d.rho).enumerate() {
        let direct = max_abs(&(x - r));
        if direct > 1e-12 {
            let transposed = max_abs(&(x.transpose() - r));
            return Err(Error::ConventionMismatch {
                index,
                defect: direct.min(transposed),
            });
        }
    }
    Ok(derived)
}

fn unit(i: usize) -> [f64; 21] {
    let mut c = [0.0; 21];
    c[i - 1] = 1.0;
    c
}

fn combo(terms: &[(usize, f64)]) -> [f64; 21] {
    let mut c = [0.0; 21];
    for &(i, x) in terms {
        c[i - 1] += x;
    }
    c
}

/// Maximal connected subgroups with their V¹⁴ branching, plus Sp(2).
pub fn subgroup_rows() -> Vec<SubgroupRow> {
    let s10 = 10f64.sqrt();
    vec![
        SubgroupRow {
            name: "U(3)",
            generators: [1, 2, 9, 10, 11, 12, 17, 18, 21].into_iter().map(unit).collect(),
            expected_blocks: vec![8, 6],
        },
        SubgroupRow {
            name: "SO(3)",
            generators: vec![
                combo(&[(1, s10), (17, 4.0), (19, -3.0)]),
                combo(&[(2, s10), (18, 4.0), (20, 3.0)]),
                combo(&[(9, 3.0), (10, 5.0), (21, 1.0)]),
            ],
            expected_blocks: vec![9, 5],
        },
        SubgroupRow {
            name: "Sp(2)xSp(1)",
            generators: (1..=10).chain([19, 20, 21]).map(unit).collect(),
            expected_blocks: vec![8, 5, 1],
        },
        SubgroupRow {
            name: "SO(3)xSp(1)",
            generators: vec![
                unit(1),
                unit(11),
                unit(17),
                combo(&[(9, 1.0), (10, 1.0), (21, 1.0)]),
                combo(&[(5, 1.0), (6, 1.0), (19, 1.0)]),
                combo(&[(7, 1.0), (8, 1.0), (20, 1.0)]),
            ],
            expected_blocks: vec![9, 5],
        },
        SubgroupRow {
            name: "Sp(2)",
            generators: (1..=10).map(unit).collect(),
            expected_blocks: vec![8, 5, 1],
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::rank;

    fn tol() -> ToleranceProfile {
        ToleranceProfile::default()
    }

    #[test]
    fn sizes_and_norms() {
        let d = load();
        assert_eq!((d.a.len(), d.b.len()), (21, 14));
        assert!((base_ip(&d.b[0], &d.b[0]) - 1.0).abs() < 1e-15);
        assert!((&d.a[8] * &d.a[9]).trace().norm() < 1e-15);
        for (i, x) in d.a.iter().chain(&d.b).enumerate() {
            for (j, y) in d.a.iter().chain(&d.b).enumerate() {
                let g = base_ip(x, y);
                assert!((g - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn a5_a7_bracket() {
        let d = load();
        let br = &d.a[4] * &d.a[6] - &d.a[6] * &d.a[4];
        assert!(max_abs(&(br - &d.a[8] * C64::new(R2, 0.0))) < 1e-14);
    }

    #[test]
    fn first_and_last_tables_match_derivation() {
        let derived = derive_isotropy(&tol()).unwrap();
        let tabulated = tabulated_rho();
        // ρ(A₁) carries no √3/2 term and is reproduced verbatim.
        assert!(max_abs(&(&derived[0] - &tabulated[0])) < 1e-12);
        assert!(max_abs(&(&derived[20] - &load().rho[20])) < 1e-12);
        for m in &derived {
            assert!(max_abs(&(m + m.transpose())) < 1e-13);
        }
    }

    #[test]
    fn tabulated_coefficient_breaks_homomorphism() {
        let d = load();
        assert!(d.homomorphism_residual(&d.rho) < 1e-12);
        assert!(d.homomorphism_residual(&tabulated_rho()) > 0.1);
    }

    #[test]
    fn tables_with_unit_coupling_are_verbatim() {
        // Only the listed generators are reinterpreted.
        let tabulated = tabulated_rho();
        for i in (0..21).filter(|i| !READ_AS_INV_ROOT2.contains(i)) {
            assert_eq!(tabulated[i], load().rho[i]);
        }
    }

    #[test]
    fn rho_is_injective_with_70_dim_complement() {
        let d = load();
        let stacked = RMat::from_fn(196, 21, |r, c| d.rho[c][(r / 14, r % 14)]);
        assert_eq!(rank(&stacked, &tol()), 21);
    }

    #[test]
    fn subgroup_rows_close() {
        let d = load();
        for row in subgroup_rows() {
            let gens: Vec<CMat> = row.generators.iter().map(|c| d.sp3.element(c)).collect();
            assert!(MatrixLieAlgebra::new(row.name, gens, &tol()).is_ok(), "{}", row.name);
            assert_eq!(row.expected_blocks.iter().sum::<usize>(), 14);
        }
    }
}
