//! Fixtures shared by the criterion benchmarks in `benches/`.

use gstruct::numkernel::RMat;

/// Deterministic dense matrix with a prescribed rank, built as a product of
/// two integer-valued factors so the kernel dimension is exact.
pub fn low_rank(rows: usize, cols: usize, rank: usize) -> RMat {
    let a = RMat::from_fn(rows, rank, |i, j| ((i * 7 + j * 3) % 11) as f64 - 5.0);
    let b = RMat::from_fn(rank, cols, |i, j| ((i * 5 + j * 13) % 9) as f64 - 4.0);
    a * b
}
