//! Curvature and Ricci tensors of invariant connections and of the
//! Levi-Civita connection, in the orthonormal K frame.

use serde::Serialize;

use crate::invconn::{curvature_operator, CharacteristicConnection, InvariantConnection, TorsionTensor};
use crate::numkernel::{max_abs, RMat};
use crate::spaces::HomogeneousSpaceInstance;
use crate::tensor::Tensor3;

const N: usize = 14;

/// R(Kᵢ,Kⱼ) for all pairs, stored at `i * 14 + j`.
#[derive(Clone, Debug)]
pub struct CurvatureTensor {
    pub ops: Vec<RMat>,
}

impl CurvatureTensor {
    pub fn at(&self, i: usize, j: usize) -> &RMat {
        &self.ops[i * N + j]
    }

    /// Ric(X,Y) = Σᵢ g(R(Kᵢ,X)Y, Kᵢ).
    pub fn ricci(&self) -> RMat {
        RMat::from_fn(N, N, |x, y| (0..N).map(|i| self.at(i, x)[(i, y)]).sum())
    }
}

/// Curvature of the invariant connection whose Λ(Kᵢ) are `maps`.
pub fn curvature_of_maps(space: &HomogeneousSpaceInstance, maps: &[RMat]) -> CurvatureTensor {
    let mut ops = Vec::with_capacity(N * N);
    for i in 0..N {
        for j in 0..N {
            ops.push(if i == j { RMat::zeros(N, N) } else { curvature_operator(space, maps, i, j) });
        }
    }
    CurvatureTensor { ops }
}

pub fn curvature(space: &HomogeneousSpaceInstance, conn: &InvariantConnection) -> CurvatureTensor {
    curvature_of_maps(space, &conn.maps())
}

pub fn ricci_connection(space: &HomogeneousSpaceInstance, conn: &InvariantConnection) -> RMat {
    curvature(space, conn).ricci()
}

/// Λᵍ(X)Y = ½[X,Y]_m + U(X,Y) with 2g(U(X,Y),Z) = g([Z,X]_m,Y) + g(X,[Z,Y]_m).
pub fn levi_civita(space: &HomogeneousSpaceInstance) -> Vec<RMat> {
    let b = &space.brm;
    (0..N)
        .map(|x| RMat::from_fn(N, N, |z, y| 0.5 * b[(x, y, z)] + 0.5 * (b[(z, x, y)] + b[(z, y, x)])))
        .collect()
}

/// Torsion Λ(X)Y − Λ(Y)X − [X,Y]_m of arbitrary maps (not necessarily sp(3)-valued).
pub fn torsion_of_maps(space: &HomogeneousSpaceInstance, maps: &[RMat]) -> Tensor3 {
    Tensor3::from_fn(N, N, N, |i, j, k| maps[i][(k, j)] - maps[j][(k, i)] - space.brm[(i, j, k)])
}

pub fn ricci_riemannian(space: &HomogeneousSpaceInstance) -> RMat {
    curvature_of_maps(space, &levi_civita(space)).ricci()
}

/// Ric^∇ + ¼ Σᵢ g(T(X,Kᵢ), T(Y,Kᵢ)), valid for skew torsion.
pub fn ricci_via_torsion(ricci_conn: &RMat, t: &TorsionTensor) -> RMat {
    let t = &t.t12;
    RMat::from_fn(N, N, |x, y| {
        let mut s = 0.0;
        for i in 0..N {
            for k in 0..N {
                s += t[(x, i, k)] * t[(y, i, k)];
            }
        }
        ricci_conn[(x, y)] + 0.25 * s
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CurvatureReport {
    #[serde(skip)]
    pub ricci_conn: RMat,
    #[serde(skip)]
    pub ricci_riem: RMat,
    pub scal_conn: f64,
    pub scal_riem: f64,
    /// max |Ric^g − (Scal^g/14)·g| in the orthonormal frame.
    pub einstein_defect: f64,
    /// max |direct − identity route| for Ric^g.
    pub route_gap: f64,
    pub ricci_conn_asymmetry: f64,
}

impl CurvatureReport {
    pub fn ricci_conn_diag(&self) -> Vec<f64> {
        self.ricci_conn.diagonal().iter().copied().collect()
    }

    pub fn ricci_riem_diag(&self) -> Vec<f64> {
        self.ricci_riem.diagonal().iter().copied().collect()
    }
}

pub fn curvature_report(space: &HomogeneousSpaceInstance, ch: &CharacteristicConnection) -> CurvatureReport {
    let ricci_conn = ricci_connection(space, &ch.connection);
    let ricci_riem = ricci_riemannian(space);
    let route = ricci_via_torsion(&ricci_conn, &ch.torsion);
    let scal_conn = ricci_conn.trace();
    let scal_riem = ricci_riem.trace();
    let einstein_defect = einstein_defect(&ricci_riem);
    CurvatureReport {
        route_gap: max_abs(&(&route - &ricci_riem)),
        ricci_conn_asymmetry: max_abs(&(&ricci_conn - ricci_conn.transpose())),
        ricci_conn,
        ricci_riem,
        scal_conn,
        scal_riem,
        einstein_defect,
    }
}

pub fn einstein_defect(ricci: &RMat) -> f64 {
    let n = ricci.nrows();
    let s = ricci.trace() / n as f64;
    max_abs(&(ricci - RMat::identity(n, n) * s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invconn::characteristic_connection;
    use crate::numkernel::ToleranceProfile;
    use crate::spaces::{build, fixtures, MetricParams, SpaceId};

    fn rel(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs() / y.abs().max(1.0)).fold(0.0, f64::max)
    }

    #[test]
    fn ricci_closed_forms() {
        let tol = ToleranceProfile::default();
        for id in SpaceId::ALL {
            let p = MetricParams::uniform(id, 1.3, 0.7, 1.9);
            let s = build(id, &p, &tol).unwrap();
            let ch = characteristic_connection(&s, &tol).unwrap();
            let r = curvature_report(&s, &ch);
            let f = fixtures(id);
            assert!(rel(&r.ricci_conn_diag(), &f.expected_ricci_conn(&p)) < 1e-10, "{id} {:?}", r.ricci_conn_diag());
            assert!(rel(&r.ricci_riem_diag(), &f.expected_ricci_riem(&p)) < 1e-10, "{id} {:?}", r.ricci_riem_diag());
            assert!((r.scal_riem - f.expected_scal_riem(&p)).abs() < 1e-10);
            assert!((r.scal_conn - f.expected_scal_conn(&p)).abs() < 1e-10);
            assert!(r.route_gap < 1e-10);
            assert!(r.ricci_conn_asymmetry < 1e-10);
        }
    }

    #[test]
    fn levi_civita_is_torsion_free_and_metric() {
        let s = build(SpaceId::M1, &MetricParams::new(1.0, vec![2.0, 0.5, 1.5, 3.0, 0.7, 1.1, 2.2], 0.9, 1.4), &ToleranceProfile::default()).unwrap();
        let lc = levi_civita(&s);
        assert!(torsion_of_maps(&s, &lc).max_abs() < 1e-14);
        for m in &lc {
            assert!(max_abs(&(m + m.transpose())) < 1e-14);
        }
    }

    #[test]
    fn curvature_is_skew_in_pair() {
        let tol = ToleranceProfile::default();
        let s = build(SpaceId::M4, &MetricParams::uniform(SpaceId::M4, 1.0, 1.5, 0.8), &tol).unwrap();
        let ch = characteristic_connection(&s, &tol).unwrap();
        let c = curvature(&s, &ch.connection);
        for i in 0..N {
            assert_eq!(max_abs(c.at(i, i)), 0.0);
            for j in 0..N {
                assert!(max_abs(&(c.at(i, j) + c.at(j, i))) < 1e-13);
                assert!(max_abs(&(c.at(i, j) + c.at(i, j).transpose())) < 1e-13);
            }
        }
    }
}
