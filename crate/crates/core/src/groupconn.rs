//! Connections on compact Lie groups with biinvariant metrics: the adjoint
//! Θ kernel, the canonical torsion family and Laquer's extra maps.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::liealg::{structure_constants, MatrixLieAlgebra};
use crate::numkernel::{max_abs, CMat, RMat, RVec, ToleranceProfile, C64};
use crate::repdecomp::{theta_map, ThetaMap};
use crate::tensor::{form_coords, Tensor3};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Symmetry {
    Symmetric,
    Antisymmetric,
    None,
}

/// λ(bᵢ, bⱼ) = Σₖ table[(i,j,k)] bₖ.
#[derive(Clone, Debug)]
pub struct BilinearConnectionMap {
    pub algebra: String,
    pub table: Tensor3,
    pub symmetry: Symmetry,
}

impl BilinearConnectionMap {
    /// Expands `f` on all basis pairs. Fails if some value leaves the algebra.
    pub fn from_fn(alg: &MatrixLieAlgebra, tol: &ToleranceProfile, f: impl Fn(&CMat, &CMat) -> Result<CMat>) -> Result<Self> {
        let d = alg.dim();
        let mut table = Tensor3::cube(d);
        for i in 0..d {
            for j in 0..d {
                let (c, res) = alg.coords(&f(&alg.basis[i], &alg.basis[j])?);
                if res > tol.residual_tol {
                    return Err(Error::NotClosed(res));
                }
                for k in 0..d {
                    table[(i, j, k)] = c[k];
                }
            }
        }
        let sym = table.sub(&table.permuted([1, 0, 2])).max_abs();
        let anti = (0..d * d * d).map(|n| {
            let (i, j, k) = (n / (d * d), (n / d) % d, n % d);
            (table[(i, j, k)] + table[(j, i, k)]).abs()
        });
        let anti = anti.fold(0.0f64, f64::max);
        let symmetry = if sym <= tol.residual_tol {
            Symmetry::Symmetric
        } else if anti <= tol.residual_tol {
            Symmetry::Antisymmetric
        } else {
            Symmetry::None
        };
        Ok(BilinearConnectionMap {
            algebra: alg.name.clone(),
            table,
            symmetry,
        })
    }

    pub fn dim(&self) -> usize {
        self.table.dims()[0]
    }

    pub fn apply(&self, x: &RVec, y: &RVec) -> RVec {
        let d = self.dim();
        RVec::from_fn(d, |k, _| {
            let mut s = 0.0;
            for i in 0..d {
                for j in 0..d {
                    s += x[i] * y[j] * self.table[(i, j, k)];
                }
            }
            s
        })
    }

    /// max over basis h, X, Y of |λ([h,X],Y) + λ(X,[h,Y]) − [h,λ(X,Y)]|.
    pub fn equivariance_residual(&self, c: &Tensor3) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for h in 0..d {
            for x in 0..d {
                for y in 0..d {
                    for k in 0..d {
                        let mut s = 0.0;
                        for m in 0..d {
                            s += c[(h, x, m)] * self.table[(m, y, k)] + c[(h, y, m)] * self.table[(x, m, k)]
                                - self.table[(x, y, m)] * c[(h, m, k)];
                        }
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }
}

pub fn half_bracket(alg: &MatrixLieAlgebra, tol: &ToleranceProfile) -> Result<BilinearConnectionMap> {
    BilinearConnectionMap::from_fn(alg, tol, |x, y| Ok((x * y - y * x) * C64::new(0.5, 0.0)))
}

fn check_square(x: &CMat, y: &CMat, n: Option<usize>) -> Result<usize> {
    let m = n.unwrap_or(x.nrows());
    if x.shape() != (m, m) || y.shape() != (m, m) {
        return Err(Error::DimensionMismatch(format!("{:?}, {:?} vs {m}x{m}", x.shape(), y.shape())));
    }
    Ok(m)
}

/// η(X,Y) = i[XY + YX − (2/n)tr(XY)·1].
pub fn laquer_eta(x: &CMat, y: &CMat, n: usize) -> Result<CMat> {
    check_square(x, y, Some(n))?;
    let i = C64::new(0.0, 1.0);
    let tr = (x * y).trace() * C64::new(2.0 / n as f64, 0.0);
    Ok((x * y + y * x - CMat::identity(n, n) * tr) * i)
}

/// ν(X,Y) = i(X·tr Y − Y·tr X).
pub fn laquer_nu(x: &CMat, y: &CMat) -> Result<CMat> {
    check_square(x, y, None)?;
    let i = C64::new(0.0, 1.0);
    Ok((x * y.trace() - y * x.trace()) * i)
}

/// Adjoint representation in the given (orthonormal) basis.
pub fn adjoint_generators(alg: &MatrixLieAlgebra, tol: &ToleranceProfile) -> Result<Vec<RMat>> {
    let c = structure_constants(alg, tol)?;
    let d = alg.dim();
    Ok((0..d).map(|i| RMat::from_fn(d, d, |k, j| c[(i, j, k)])).collect())
}

#[derive(Clone, Debug)]
pub struct ThetaKernel {
    pub theta: ThetaMap,
    /// Columns are 3-forms in increasing-triple coordinates.
    pub basis: RMat,
}

impl ThetaKernel {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// |Θ(form)|∞.
    pub fn residual(&self, form: &RVec) -> f64 {
        let r = self.theta.apply(form);
        r.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }
}

pub fn theta_kernel_adjoint(alg: &MatrixLieAlgebra, tol: &ToleranceProfile) -> Result<ThetaKernel> {
    let gens = adjoint_generators(alg, tol)?;
    let theta = theta_map(format!("ad {}", alg.name), &gens, tol)?;
    let basis = theta.kernel(tol);
    Ok(ThetaKernel { theta, basis })
}

/// One 3-form g([X,Y]|gᵢ, Z) per nonabelian block; abelian blocks (the
/// center) contribute nothing. Blocks are lists of basis indices and must be
/// ideals.
pub fn canonical_torsion_family(alg: &MatrixLieAlgebra, ideal_partition: &[Vec<usize>], tol: &ToleranceProfile) -> Result<Vec<RVec>> {
    let d = alg.dim();
    let c = structure_constants(alg, tol)?;
    let mut seen = vec![false; d];
    for b in ideal_partition.iter().flatten() {
        if *b >= d || seen[*b] {
            return Err(Error::DimensionMismatch(format!("partition index {b} repeated or out of range")));
        }
        seen[*b] = true;
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::DimensionMismatch("partition does not cover the basis".into()));
    }
    let mut forms = Vec::new();
    for (n, block) in ideal_partition.iter().enumerate() {
        for &i in block {
            for j in 0..d {
                for k in 0..d {
                    if !block.contains(&k) && c[(i, j, k)].abs() > tol.residual_tol {
                        return Err(Error::NotAnIdeal(n));
                    }
                }
            }
        }
        let t = Tensor3::from_fn(d, d, d, |i, j, k| {
            if block.contains(&i) && block.contains(&j) && block.contains(&k) {
                c[(i, j, k)]
            } else {
                0.0
            }
        });
        if t.max_abs() > tol.residual_tol {
            forms.push(form_coords(&t));
        }
    }
    Ok(forms)
}

/// Torsion (1−2t)[X,Y] of the connection Λ_X Y = t[X,Y], as a 3-form.
pub fn canonical_torsion(alg: &MatrixLieAlgebra, t: f64, tol: &ToleranceProfile) -> Result<RVec> {
    let c = structure_constants(alg, tol)?;
    Ok(form_coords(&c) * (1.0 - 2.0 * t))
}

/// max over random triples of |g(λ(X,Y),Z) + g(Y,λ(X,Z))| with metric Gram matrix `gram`.
pub fn metricity_defect(map: &BilinearConnectionMap, gram: &RMat, samples: usize, seed: u64) -> f64 {
    use rand::Rng;
    let d = map.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || RVec::from_fn(d, |_, _| rng.gen_range(-1.0..1.0));
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let (x, y, z) = (draw(), draw(), draw());
        let a = map.apply(&x, &y).dot(&(gram * &z));
        let b = y.dot(&(gram * map.apply(&x, &z)));
        worst = worst.max((a + b).abs());
    }
    worst
}

/// Gram matrix of g(X,Y) = −2n·tr(XY) in the algebra's basis.
pub fn trace_metric(alg: &MatrixLieAlgebra, n: usize) -> RMat {
    let d = alg.dim();
    RMat::from_fn(d, d, |i, j| -2.0 * n as f64 * (&alg.basis[i] * &alg.basis[j]).trace().re)
}

/// Slot-swap residual of a map against the requested symmetry.
pub fn swap_defect(map: &BilinearConnectionMap, sign: f64) -> f64 {
    let d = map.dim();
    let mut worst: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                worst = worst.max((map.table[(i, j, k)] - sign * map.table[(j, i, k)]).abs());
            }
        }
    }
    worst
}

pub fn is_zero(m: &CMat, tol: &ToleranceProfile) -> bool {
    max_abs(m) <= tol.residual_tol
}

/// Named algebras used by the CLI and tests, with their ideal partitions.
pub fn named_algebra(name: &str, tol: &ToleranceProfile) -> Option<(MatrixLieAlgebra, Vec<Vec<usize>>)> {
    match name {
        "su2" => Some((MatrixLieAlgebra::su(2), vec![(0..3).collect()])),
        "su3" => Some((MatrixLieAlgebra::su(3), vec![(0..8).collect()])),
        "su2+su2" => {
            let a = MatrixLieAlgebra::su(2).direct_sum(&MatrixLieAlgebra::su(2), tol).ok()?;
            Some((a, vec![(0..3).collect(), (3..6).collect()]))
        }
        "su2+u1" => {
            let a = MatrixLieAlgebra::su(2).direct_sum(&MatrixLieAlgebra::torus(1), tol).ok()?;
            Some((a, vec![(0..3).collect(), vec![3]]))
        }
        _ => None,
    }
}

pub const NAMED_ALGEBRAS: [&str; 4] = ["su2", "su3", "su2+su2", "su2+u1"];
