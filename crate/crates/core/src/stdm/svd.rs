//! Truncated SVD of a TF-IDF matrix.
//!
//! Small inputs are decomposed exactly. Larger inputs use seeded randomized
//! subspace iteration: project onto `r + OVERSAMPLE` random directions,
//! alternate `POWER_ITERS` times between `M` and `Mᵀ` with re-orthonormalization,
//! then take the exact SVD of the small projected matrix.

use nalgebra::DMatrix;
use ndarray::{Array2, ArrayView2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::tfidf::TfidfMatrix;
use crate::error::{Error, Result};
use crate::linalg::{from_nalgebra, gaussian_matrix, to_nalgebra};

/// Above this `min(rows, cols)` the randomized path is used.
pub const EXACT_LIMIT: usize = 600;
const OVERSAMPLE: usize = 10;
const POWER_ITERS: usize = 6;
const SKETCH_SEED: u64 = 0x5744_4d5f_5356_4421;

/// Topic representations `Ū = U·√S` of every document, plus `V̄ = √S·Vᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct TopicMatrix {
    pub u_bar: Array2<f64>,
    pub v_bar: Array2<f64>,
    pub singular_values: Vec<f64>,
    pub n: usize,
    pub m: usize,
}

impl TopicMatrix {
    pub fn rank(&self) -> usize {
        self.singular_values.len()
    }

    /// Rows of the first corpus.
    pub fn first(&self) -> ArrayView2<'_, f64> {
        self.u_bar.slice(ndarray::s![..self.n, ..])
    }

    /// Rows of the second corpus.
    pub fn second(&self) -> ArrayView2<'_, f64> {
        self.u_bar.slice(ndarray::s![self.n.., ..])
    }

    pub fn reconstruct(&self) -> Array2<f64> {
        self.u_bar.dot(&self.v_bar)
    }
}

/// `(U, σ, Vᵀ)` truncated to the `r` largest singular values, descending.
fn sorted_svd(m: DMatrix<f64>, r: usize) -> (DMatrix<f64>, Vec<f64>, DMatrix<f64>) {
    let svd = m.svd(true, true);
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]).then(a.cmp(&b)));
    order.truncate(r);
    let u_r = DMatrix::from_fn(u.nrows(), r, |i, j| u[(i, order[j])]);
    let vt_r = DMatrix::from_fn(r, v_t.ncols(), |i, j| v_t[(order[i], j)]);
    let s: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    (u_r, s, vt_r)
}

fn orthonormal_columns(a: Array2<f64>) -> Array2<f64> {
    from_nalgebra(&to_nalgebra(a.view()).qr().q())
}

/// Rank-`r` truncated SVD, `1 <= r <= min(rows, cols)`.
pub fn truncated_svd(mtx: &TfidfMatrix, r: usize) -> Result<TopicMatrix> {
    let max = mtx.rows().min(mtx.cols());
    if r == 0 || r > max {
        return Err(Error::Rank { rank: r, max });
    }
    let (u, s, vt) = if max <= EXACT_LIMIT {
        sorted_svd(to_nalgebra(mtx.to_dense().view()), r)
    } else {
        let width = (r + OVERSAMPLE).min(max);
        let mut rng = ChaCha8Rng::seed_from_u64(SKETCH_SEED);
        let omega = gaussian_matrix(mtx.cols(), width, &mut rng);
        let mut q = orthonormal_columns(mtx.mul_dense(omega.view()));
        for _ in 0..POWER_ITERS {
            let z = orthonormal_columns(mtx.t_mul_dense(q.view()));
            q = orthonormal_columns(mtx.mul_dense(z.view()));
        }
        // B = Qᵀ·M, stored as Bᵀ = Mᵀ·Q
        let b = mtx.t_mul_dense(q.view()).reversed_axes();
        let (ub, s, vt) = sorted_svd(to_nalgebra(b.view()), r);
        let u = to_nalgebra(q.view()) * ub;
        (u, s, vt)
    };

    let mut u = from_nalgebra(&u);
    let mut vt = from_nalgebra(&vt);
    for j in 0..r {
        let row = vt.row(j);
        let pivot = row
            .iter()
            .enumerate()
            .fold((0, 0.0f64), |best, (i, &v)| if v.abs() > best.1.abs() { (i, v) } else { best });
        if pivot.1 < 0.0 {
            vt.row_mut(j).mapv_inplace(|v| -v);
            u.column_mut(j).mapv_inplace(|v| -v);
        }
    }
    for (j, sigma) in s.iter().enumerate() {
        let root = sigma.max(0.0).sqrt();
        u.column_mut(j).mapv_inplace(|v| v * root);
        vt.row_mut(j).mapv_inplace(|v| v * root);
    }
    Ok(TopicMatrix {
        u_bar: u,
        v_bar: vt,
        singular_values: s,
        n: mtx.n,
        m: mtx.m,
    })
}
