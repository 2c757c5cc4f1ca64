//! Clifford algebras up to dimension 14, spin lifts, invariant spinors and
//! the Dirac operator with torsion restricted to them.

use std::sync::OnceLock;

use serde::Serialize;

use crate::curvature::CurvatureReport;
use crate::error::{Error, Result};
use crate::invconn::{parallel_torsion, CharacteristicConnection, TorsionTensor};
use crate::numkernel::{eigvals_selfadjoint, joint_kernel, max_abs, nullspace, CMat, RMat, ToleranceProfile, C64};
use crate::spaces::HomogeneousSpaceInstance;
use crate::tensor::increasing_triples;

/// Coefficient of the torsion term in D = Σ Kᵢ·λ(Λ(Kᵢ)) − c·T, fixed by
/// [`calibrate_torsion_coefficient`] on two U(4)/SO(2)² samples.
pub const TORSION_TERM: f64 = 0.5;

/// A matrix with one nonzero per column: column j maps to `phase[j]·e_{perm[j]}`.
#[derive(Clone, Debug)]
struct Monomial {
    perm: Vec<usize>,
    phase: Vec<C64>,
}

impl Monomial {
    fn kron(&self, other: &Monomial) -> Monomial {
        let m = other.perm.len();
        let n = self.perm.len() * m;
        let mut perm = vec![0; n];
        let mut phase = vec![C64::new(0.0, 0.0); n];
        for (a, (&pa, &fa)) in self.perm.iter().zip(&self.phase).enumerate() {
            for (b, (&pb, &fb)) in other.perm.iter().zip(&other.phase).enumerate() {
                perm[a * m + b] = pa * m + pb;
                phase[a * m + b] = fa * fb;
            }
        }
        Monomial { perm, phase }
    }

    /// self ∘ other.
    fn then(&self, other: &Monomial) -> Monomial {
        let perm = other.perm.iter().map(|&p| self.perm[p]).collect();
        let phase = other.perm.iter().zip(&other.phase).map(|(&p, &f)| self.phase[p] * f).collect();
        Monomial { perm, phase }
    }

    fn add_to(&self, m: &mut CMat, c: C64) {
        for (j, (&p, &f)) in self.perm.iter().zip(&self.phase).enumerate() {
            m[(p, j)] += c * f;
        }
    }

    fn dense(&self) -> CMat {
        let n = self.perm.len();
        let mut m = CMat::zeros(n, n);
        self.add_to(&mut m, C64::new(1.0, 0.0));
        m
    }
}

fn pauli(which: char) -> Monomial {
    let (o, i) = (C64::new(1.0, 0.0), C64::new(0.0, 1.0));
    match which {
        'x' => Monomial { perm: vec![1, 0], phase: vec![o, o] },
        'y' => Monomial { perm: vec![1, 0], phase: vec![i, -i] },
        'z' => Monomial { perm: vec![0, 1], phase: vec![o, -o] },
        _ => Monomial { perm: vec![0, 1], phase: vec![o, o] },
    }
}

#[derive(Clone, Debug)]
pub struct CliffordAlgebra {
    pub n: usize,
    pub gammas: Vec<CMat>,
    mono: Vec<Monomial>,
}

impl CliffordAlgebra {
    pub fn spinor_dim(&self) -> usize {
        1 << (self.n / 2)
    }

    /// max |eᵢeⱼ + eⱼeᵢ + 2δᵢⱼ|.
    pub fn relation_residual(&self) -> f64 {
        let d = self.spinor_dim();
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                let mut m = &self.gammas[i] * &self.gammas[j] + &self.gammas[j] * &self.gammas[i];
                if i == j {
                    m += CMat::identity(d, d) * C64::new(2.0, 0.0);
                }
                worst = worst.max(max_abs(&m));
            }
        }
        worst
    }

    /// Clifford multiplication by Σ vᵢeᵢ.
    pub fn multiply(&self, v: &[f64]) -> CMat {
        let d = self.spinor_dim();
        let mut m = CMat::zeros(d, d);
        for (g, &x) in self.mono.iter().zip(v) {
            if x != 0.0 {
                g.add_to(&mut m, C64::new(x, 0.0));
            }
        }
        m
    }

    /// λ(A) = ¼ Σᵢⱼ Aᵢⱼ eⱼeᵢ, so that [λ(A), v·] = (Av)·.
    pub fn spin_lift(&self, a: &RMat) -> Result<CMat> {
        if a.shape() != (self.n, self.n) {
            return Err(Error::DimensionMismatch(format!("{:?} vs so({})", a.shape(), self.n)));
        }
        let asym = max_abs(&(a + a.transpose()));
        if asym > 1e-9 * max_abs(a).max(1.0) {
            return Err(Error::NotAntisymmetric(asym));
        }
        let d = self.spinor_dim();
        let mut m = CMat::zeros(d, d);
        for i in 0..self.n {
            for j in i + 1..self.n {
                // Aᵢⱼeⱼeᵢ + Aⱼᵢeᵢeⱼ = 2Aᵢⱼ eⱼeᵢ.
                let c = a[(i, j)];
                if c != 0.0 {
                    self.mono[j].then(&self.mono[i]).add_to(&mut m, C64::new(0.5 * c, 0.0));
                }
            }
        }
        Ok(m)
    }

    /// Σ_{i<j<k} T(eᵢ,eⱼ,eₖ) eᵢeⱼeₖ.
    pub fn three_form(&self, t: &TorsionTensor) -> CMat {
        let d = self.spinor_dim();
        let mut m = CMat::zeros(d, d);
        for [i, j, k] in increasing_triples(self.n) {
            let c = t.t12[(i, j, k)];
            if c != 0.0 {
                self.mono[i].then(&self.mono[j]).then(&self.mono[k]).add_to(&mut m, C64::new(c, 0.0));
            }
        }
        m
    }
}

/// eₖ = i·σz^{⊗k}⊗σx⊗1…, e_{k+1} = i·σz^{⊗k}⊗σy⊗1… for k even.
pub fn build_clifford(n: usize) -> Result<CliffordAlgebra> {
    if !(2..=14).contains(&n) || n % 2 != 0 {
        return Err(Error::BadDimension(n));
    }
    let m = n / 2;
    let mut mono = Vec::with_capacity(n);
    for k in 0..m {
        for p in ['x', 'y'] {
            let mut g = Monomial { perm: vec![0], phase: vec![C64::new(0.0, 1.0)] };
            for slot in 0..m {
                let f = match slot.cmp(&k) {
                    std::cmp::Ordering::Less => pauli('z'),
                    std::cmp::Ordering::Equal => pauli(p),
                    std::cmp::Ordering::Greater => pauli('1'),
                };
                g = g.kron(&f);
            }
            mono.push(g);
        }
    }
    let gammas = mono.iter().map(Monomial::dense).collect();
    Ok(CliffordAlgebra { n, gammas, mono })
}

/// Cl(14), built once.
pub fn clifford14() -> &'static CliffordAlgebra {
    static CELL: OnceLock<CliffordAlgebra> = OnceLock::new();
    CELL.get_or_init(|| build_clifford(14).expect("14 is valid"))
}

#[derive(Clone, Debug)]
pub struct SpinorSubspace {
    /// Orthonormal columns in Δ₁₄.
    pub basis: CMat,
}

impl SpinorSubspace {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }
}

/// Joint kernel of the lifted isotropy generators.
pub fn invariant_spinors(space: &HomogeneousSpaceInstance, tol: &ToleranceProfile) -> Result<SpinorSubspace> {
    let cl = clifford14();
    let ops = space.isotropy.iter().map(|r| cl.spin_lift(r)).collect::<Result<Vec<_>>>()?;
    Ok(SpinorSubspace {
        basis: joint_kernel(&ops, cl.spinor_dim(), tol),
    })
}

fn restrict(op: &CMat, s: &CMat) -> CMat {
    s.adjoint() * op * s
}

/// The kinetic part Σ Kᵢ·λ(Λ(Kᵢ)) and the torsion part T· on the invariant spinors.
#[derive(Clone, Debug)]
pub struct DiracPieces {
    pub kinetic: CMat,
    pub torsion: CMat,
    pub torsion_full: CMat,
}

impl DiracPieces {
    pub fn dirac(&self, c: f64) -> CMat {
        &self.kinetic - &self.torsion * C64::new(c, 0.0)
    }
}

pub fn dirac_pieces(spinors: &SpinorSubspace, ch: &CharacteristicConnection) -> Result<DiracPieces> {
    if spinors.dim() == 0 {
        return Err(Error::NoInvariantSpinors);
    }
    let cl = clifford14();
    let d = cl.spinor_dim();
    let mut kinetic = CMat::zeros(d, d);
    for (i, m) in ch.connection.maps().iter().enumerate() {
        kinetic += &cl.gammas[i] * cl.spin_lift(m)?;
    }
    let torsion_full = cl.three_form(&ch.torsion);
    Ok(DiracPieces {
        kinetic: restrict(&kinetic, &spinors.basis),
        torsion: restrict(&torsion_full, &spinors.basis),
        torsion_full,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DiracReport {
    pub invariant_dim: usize,
    pub eigenvalues: Vec<f64>,
    pub torsion_op_eigenvalues: Vec<f64>,
    /// max |μ| on the invariant spinors.
    pub mu: f64,
    /// max |μ| on all of Δ₁₄.
    pub mu_full: f64,
    /// Σ over increasing triples of T(Kᵢ,Kⱼ,Kₖ)².
    pub torsion_norm2: f64,
    /// Σ over all ordered triples (6 × torsion_norm2).
    pub torsion_norm2_ordered: f64,
    pub self_adjoint_defect: f64,
    pub parallel_spinor_dim: usize,
}

fn spread(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

pub fn dirac_on_invariants(
    space: &HomogeneousSpaceInstance,
    ch: &CharacteristicConnection,
    tol: &ToleranceProfile,
) -> Result<DiracReport> {
    let spinors = invariant_spinors(space, tol)?;
    let pieces = dirac_pieces(&spinors, ch)?;
    let d = pieces.dirac(TORSION_TERM);
    let self_adjoint_defect = max_abs(&(&d - d.adjoint()));
    let eigenvalues = eigvals_selfadjoint(&d);
    let torsion_op_eigenvalues = eigvals_selfadjoint(&pieces.torsion);
    let mu = spread(&torsion_op_eigenvalues);
    let mu_full = spread(&eigvals_selfadjoint(&pieces.torsion_full));
    let torsion_norm2 = ch.torsion.norm_sq_increasing();
    Ok(DiracReport {
        invariant_dim: spinors.dim(),
        eigenvalues,
        torsion_op_eigenvalues,
        mu,
        mu_full,
        torsion_norm2,
        torsion_norm2_ordered: ch.torsion.norm_sq_ordered(),
        self_adjoint_defect,
        parallel_spinor_dim: parallel_spinors(&spinors, ch, tol)?.dim(),
    })
}

/// Invariant spinors annihilated by every λ(Λ(Kᵢ)).
pub fn parallel_spinors(spinors: &SpinorSubspace, ch: &CharacteristicConnection, tol: &ToleranceProfile) -> Result<SpinorSubspace> {
    let cl = clifford14();
    let s = &spinors.basis;
    if s.ncols() == 0 {
        return Ok(spinors.clone());
    }
    let blocks = ch.connection.maps().iter().map(|m| cl.spin_lift(m).map(|l| l * s)).collect::<Result<Vec<_>>>()?;
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut stacked = CMat::zeros(rows, s.ncols());
    let mut r = 0;
    for b in &blocks {
        stacked.view_mut((r, 0), b.shape()).copy_from(b);
        r += b.nrows();
    }
    let k = if max_abs(&stacked) <= tol.residual_tol { CMat::identity(s.ncols(), s.ncols()) } else { nullspace(&stacked, tol) };
    Ok(SpinorSubspace { basis: s * k })
}

/// Golden-section fit of the torsion coefficient c in [0, 2] so that the
/// largest |eigenvalue| of the Dirac matrix matches each sample's target.
pub fn calibrate_torsion_coefficient(samples: &[(DiracPieces, f64)]) -> f64 {
    let cost = |c: f64| -> f64 {
        samples
            .iter()
            .map(|(p, target)| {
                let top = spread(&eigvals_selfadjoint(&p.dirac(c)));
                (top - target).powi(2)
            })
            .sum()
    };
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.0, 2.0);
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let (mut f1, mut f2) = (cost(x1), cost(x2));
    while hi - lo > 1e-12 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = cost(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = cost(x2);
        }
    }
    0.5 * (lo + hi)
}

#[derive(Clone, Debug, Serialize)]
pub struct Estimates {
    pub lambda_min_sq: f64,
    /// ¼Scal + ⅛‖T‖² − ¼μ².
    pub friedrich_rhs: f64,
    /// n/(4(n−1))·Scal + n(n−5)/(8(n−3)²)·‖T‖² + n(4−n)/(4(n−3)²)·μ² at n = 14.
    pub twistor_rhs: f64,
    pub friedrich_equality: bool,
    pub friedrich_holds: bool,
    pub twistor_strict: bool,
    pub twistor_stronger: bool,
}

pub fn friedrich_rhs(scal: f64, norm2: f64, mu: f64) -> f64 {
    0.25 * scal + 0.125 * norm2 - 0.25 * mu * mu
}

pub fn twistor_rhs(scal: f64, norm2: f64, mu: f64) -> f64 {
    let n = 14.0;
    n / (4.0 * (n - 1.0)) * scal + n * (n - 5.0) / (8.0 * (n - 3.0) * (n - 3.0)) * norm2 + n * (4.0 - n) / (4.0 * (n - 3.0) * (n - 3.0)) * mu * mu
}

/// Both estimates; only meaningful for parallel torsion.
pub fn eigenvalue_estimates(
    report: &DiracReport,
    ch: &CharacteristicConnection,
    curvature: &CurvatureReport,
    tol: &ToleranceProfile,
) -> Result<Estimates> {
    let par = parallel_torsion(&ch.connection, &ch.torsion, tol);
    if !par.parallel {
        return Err(Error::TorsionNotParallel(par.max_entry));
    }
    let lambda_min_sq = report.eigenvalues.iter().map(|x| x * x).fold(f64::INFINITY, f64::min);
    let f = friedrich_rhs(curvature.scal_riem, report.torsion_norm2, report.mu);
    let t = twistor_rhs(curvature.scal_riem, report.torsion_norm2, report.mu);
    let eps = 1e-9 * lambda_min_sq.abs().max(1.0);
    Ok(Estimates {
        lambda_min_sq,
        friedrich_rhs: f,
        twistor_rhs: t,
        friedrich_equality: (lambda_min_sq - f).abs() <= eps,
        friedrich_holds: lambda_min_sq >= f - eps,
        twistor_strict: lambda_min_sq > t + eps,
        twistor_stronger: t > f,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::curvature_report;
    use crate::invconn::characteristic_connection;
    use crate::spaces::{build, fixtures, MetricParams, SpaceId};
    use proptest::prelude::*;

    fn tol() -> ToleranceProfile {
        ToleranceProfile::default()
    }

    fn random_so(n: usize, seed: u64) -> RMat {
        let mut s = seed;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let mut a = RMat::zeros(n, n);
        for i in 0..n {
            for j in i + 1..n {
                let x = next();
                a[(i, j)] = x;
                a[(j, i)] = -x;
            }
        }
        a
    }

    #[test]
    fn clifford_relations() {
        for n in [2, 4, 8, 14] {
            let cl = build_clifford(n).unwrap();
            assert!(cl.relation_residual() < 1e-12);
            for g in &cl.gammas {
                let d = cl.spinor_dim();
                assert!(max_abs(&(g * g.adjoint() - CMat::identity(d, d))) < 1e-12);
            }
        }
        assert!(matches!(build_clifford(5), Err(Error::BadDimension(5))));
        assert!(matches!(build_clifford(16), Err(Error::BadDimension(16))));
    }

    #[test]
    fn lift_intertwines_clifford_multiplication() {
        let cl = build_clifford(6).unwrap();
        let a = random_so(6, 7);
        let l = cl.spin_lift(&a).unwrap();
        for k in 0..6 {
            let mut e = vec![0.0; 6];
            e[k] = 1.0;
            let v = cl.multiply(&e);
            let av: Vec<f64> = a.column(k).iter().copied().collect();
            assert!(max_abs(&(&l * &v - &v * &l - cl.multiply(&av))) < 1e-12);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn lift_is_a_homomorphism(s1 in 0u64..10_000, s2 in 0u64..10_000) {
            let cl = build_clifford(8).unwrap();
            let (a, b) = (random_so(8, s1), random_so(8, s2 + 20_000));
            let lhs = cl.spin_lift(&(&a * &b - &b * &a)).unwrap();
            let (la, lb) = (cl.spin_lift(&a).unwrap(), cl.spin_lift(&b).unwrap());
            prop_assert!(max_abs(&(lhs - (&la * &lb - &lb * &la))) < 1e-12);
        }
    }

    #[test]
    fn invariant_spinor_dims() {
        for id in SpaceId::ALL {
            let s = build(id, &MetricParams::uniform(id, 1.0, 1.0, 1.0), &tol()).unwrap();
            assert_eq!(invariant_spinors(&s, &tol()).unwrap().dim(), fixtures(id).expected_spinor_dim, "{id}");
        }
    }

    #[test]
    fn calibration_recovers_frozen_constant() {
        let samples: Vec<(DiracPieces, f64)> = [(1.0, 1.0), (1.7, 0.6)]
            .into_iter()
            .map(|(a, b)| {
                let p = MetricParams::uniform(SpaceId::M2, a, b, 1.0);
                let s = build(SpaceId::M2, &p, &tol()).unwrap();
                let ch = characteristic_connection(&s, &tol()).unwrap();
                let sp = invariant_spinors(&s, &tol()).unwrap();
                (dirac_pieces(&sp, &ch).unwrap(), fixtures(SpaceId::M2).expected_dirac(&p).unwrap())
            })
            .collect();
        assert!((calibrate_torsion_coefficient(&samples) - TORSION_TERM).abs() < 1e-6);
    }

    #[test]
    fn dirac_spectra_and_equality() {
        for (id, a, b, g) in [(SpaceId::M2, 1.0, 1.0, 1.0), (SpaceId::M4, 1.0, 1.0, 1.0)] {
            let p = MetricParams::uniform(id, a, b, g);
            let s = build(id, &p, &tol()).unwrap();
            let ch = characteristic_connection(&s, &tol()).unwrap();
            let r = dirac_on_invariants(&s, &ch, &tol()).unwrap();
            let f = fixtures(id);
            let lam = f.expected_dirac(&p).unwrap();
            assert!(r.eigenvalues.iter().all(|x| (x.abs() - lam).abs() < 1e-9), "{id} {:?}", r.eigenvalues);
            let (n2, mu) = f.expected_torsion_operator(&p).unwrap();
            assert!((r.torsion_norm2 - n2).abs() < 1e-9);
            assert!((r.torsion_norm2_ordered - 6.0 * n2).abs() < 1e-9);
            assert!((r.mu - mu).abs() < 1e-9);
            assert_eq!(r.parallel_spinor_dim, f.expected_spinor_dim);
            let c = curvature_report(&s, &ch);
            let e = eigenvalue_estimates(&r, &ch, &c, &tol()).unwrap();
            assert!(e.friedrich_equality && e.twistor_strict, "{e:?}");
        }
    }

    #[test]
    fn no_spinors_on_m3() {
        let s = build(SpaceId::M3, &MetricParams::uniform(SpaceId::M3, 1.0, 1.0, 1.0), &tol()).unwrap();
        let ch = characteristic_connection(&s, &tol()).unwrap();
        assert!(matches!(dirac_on_invariants(&s, &ch, &tol()), Err(Error::NoInvariantSpinors)));
    }
}
