//! Small dense helpers on top of nalgebra.

use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};
use num_traits::Float;

use crate::{Error, Result};

/// Solve `a x = b` by partial-pivot LU, rejecting numerically singular systems.
pub(crate) fn solve(a: DMatrix<f64>, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.nrows();
    let scale = a.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let lu = a.lu();
    let u = lu.u();
    let min_pivot = (0..n).map(|i| u[(i, i)].abs()).fold(f64::INFINITY, f64::min);
    if !(min_pivot > 1e-13 * scale.max(1e-300)) {
        return Err(Error::SingularJacobian);
    }
    let x = lu.solve(&DVector::from_column_slice(b)).ok_or(Error::SingularJacobian)?;
    Ok(x.iter().copied().collect())
}

/// Ascending eigenvalues of a symmetric matrix.
pub(crate) fn sym_eigenvalues(a: DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = a.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|x, y| x.total_cmp(y));
    ev
}

/// Eigenpairs of a symmetric matrix, ascending.
pub(crate) fn sym_eigen(a: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let e = a.symmetric_eigen();
    let mut order: Vec<usize> = (0..e.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| e.eigenvalues[i].total_cmp(&e.eigenvalues[j]));
    let vals = order.iter().map(|&i| e.eigenvalues[i]).collect();
    let vecs = DMatrix::from_fn(e.eigenvectors.nrows(), order.len(), |r, c| e.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

pub(crate) fn symmetrize(a: &mut DMatrix<f64>) {
    let n = a.nrows();
    for i in 0..n {
        for j in 0..i {
            let m = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = m;
            a[(j, i)] = m;
        }
    }
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Least-squares solution of an overdetermined system via normal equations on QR.
pub(crate) fn least_squares(a: DMatrix<f64>, b: &[f64]) -> (Vec<f64>, f64) {
    let bv = DVector::from_column_slice(b);
    let svd = a.clone().svd(true, true);
    let x = svd.solve(&bv, 1e-15).expect("svd solve");
    let r = &a * &x - &bv;
    (x.iter().copied().collect(), r.norm())
}
