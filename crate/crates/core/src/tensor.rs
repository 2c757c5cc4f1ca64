//! Dense 3-index arrays and 3-form coordinates.

use std::ops::{Index, IndexMut};

use crate::numkernel::RVec;

#[derive(Clone, Debug, PartialEq)]
pub struct Tensor3 {
    dims: [usize; 3],
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(a: usize, b: usize, c: usize) -> Self {
        Tensor3 {
            dims: [a, b, c],
            data: vec![0.0; a * b * c],
        }
    }

    pub fn cube(n: usize) -> Self {
        Self::zeros(n, n, n)
    }

    pub fn from_fn(a: usize, b: usize, c: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut t = Self::zeros(a, b, c);
        for i in 0..a {
            for j in 0..b {
                for k in 0..c {
                    t[(i, j, k)] = f(i, j, k);
                }
            }
        }
        t
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// The fiber `t[i, j, :]`.
    pub fn fiber(&self, i: usize, j: usize) -> &[f64] {
        let c = self.dims[2];
        let start = (i * self.dims[1] + j) * c;
        &self.data[start..start + c]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum()
    }

    pub fn sub(&self, other: &Tensor3) -> Tensor3 {
        assert_eq!(self.dims, other.dims);
        Tensor3 {
            dims: self.dims,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// Permute slots: `out[p(i,j,k)] = self[i,j,k]` with `perm` giving, for
    /// each output slot, which input slot it reads.
    pub fn permuted(&self, perm: [usize; 3]) -> Tensor3 {
        let d = [self.dims[perm[0]], self.dims[perm[1]], self.dims[perm[2]]];
        Tensor3::from_fn(d[0], d[1], d[2], |a, b, c| {
            let out = [a, b, c];
            let mut idx = [0; 3];
            for s in 0..3 {
                idx[perm[s]] = out[s];
            }
            self[(idx[0], idx[1], idx[2])]
        })
    }
}

impl Index<(usize, usize, usize)> for Tensor3 {
    type Output = f64;
    fn index(&self, (i, j, k): (usize, usize, usize)) -> &f64 {
        debug_assert!(i < self.dims[0] && j < self.dims[1] && k < self.dims[2]);
        &self.data[(i * self.dims[1] + j) * self.dims[2] + k]
    }
}

impl IndexMut<(usize, usize, usize)> for Tensor3 {
    fn index_mut(&mut self, (i, j, k): (usize, usize, usize)) -> &mut f64 {
        debug_assert!(i < self.dims[0] && j < self.dims[1] && k < self.dims[2]);
        &mut self.data[(i * self.dims[1] + j) * self.dims[2] + k]
    }
}

/// Strictly increasing triples `i<j<k` in lexicographic order.
pub fn increasing_triples(n: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) * n.saturating_sub(2) / 6);
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                out.push([i, j, k]);
            }
        }
    }
    out
}

/// Position of an increasing triple in [`increasing_triples`].
pub fn triple_index(n: usize, t: [usize; 3]) -> usize {
    let [i, j, k] = t;
    let c2 = |m: usize| m * m.saturating_sub(1) / 2;
    let c3 = |m: usize| m * m.saturating_sub(1) * m.saturating_sub(2) / 6;
    // Triples starting below i, then pairs (j', k') with i<j'<j, then k.
    let before_i = c3(n) - c3(n - i);
    let m = n - i - 1;
    let before_j = c2(m) - c2(m - (j - i - 1));
    before_i + before_j + (k - j - 1)
}

/// Sort three distinct indices, returning the sorted triple and the sign of
/// the sorting permutation; `None` if two coincide.
pub fn sort3(mut t: [usize; 3]) -> Option<([usize; 3], f64)> {
    if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
        return None;
    }
    let mut sign = 1.0;
    for a in 0..2 {
        for b in 0..2 - a {
            if t[b] > t[b + 1] {
                t.swap(b, b + 1);
                sign = -sign;
            }
        }
    }
    Some((t, sign))
}

/// Coordinates of a totally antisymmetric tensor on the increasing triples.
pub fn form_coords(t: &Tensor3) -> RVec {
    let n = t.dims()[0];
    let tr = increasing_triples(n);
    RVec::from_iterator(tr.len(), tr.iter().map(|&[i, j, k]| t[(i, j, k)]))
}

/// The totally antisymmetric tensor with given increasing-triple coordinates.
pub fn form_tensor(n: usize, coords: &RVec) -> Tensor3 {
    let mut t = Tensor3::cube(n);
    for (c, &[i, j, k]) in increasing_triples(n).iter().enumerate() {
        let v = coords[c];
        for (p, s) in [([i, j, k], 1.0), ([j, k, i], 1.0), ([k, i, j], 1.0), ([j, i, k], -1.0), ([i, k, j], -1.0), ([k, j, i], -1.0)] {
            t[(p[0], p[1], p[2])] = s * v;
        }
    }
    t
}

/// Largest deviation from total antisymmetry of a 3-tensor.
pub fn skew_defect(t: &Tensor3) -> f64 {
    let n = t.dims()[0];
    let mut d: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                d = d
                    .max((t[(i, j, k)] + t[(j, i, k)]).abs())
                    .max((t[(i, j, k)] + t[(i, k, j)]).abs());
            }
        }
    }
    d
}
