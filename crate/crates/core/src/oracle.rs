//! Closed-form maximizing weight, independent of the Newton solver.
//!
//! Writing a feasible move as `x = Q y` with `Q` an orthonormal basis of the
//! complement of the previous moves, the weight becomes
//! `y^T A y + 2 b^T y + c` on the unit sphere, `A = Q^T P Q`, `b = Q^T P m`,
//! `c = m^T P m` with `P` the projector onto the line's sites. In the
//! eigenbasis of `A` the maximizer is `y = (lambda I - A)^{-1} b` with
//! `lambda >= d_max` fixed by the secular equation
//! `sum_j b_j^2 / (lambda - d_j)^2 = 1`. If `b` has no component in the top
//! eigenspace and the remaining terms sum to at most one, `lambda = d_max`
//! and the leftover norm is placed in the top eigenspace.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::board::{Amplitudes, Move, SITES};
use crate::optimizer::ConstraintSet;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleSolution {
    pub weight: f64,
    pub x: Move,
}

/// Orthonormal basis (as columns) of the orthogonal complement of `previous`.
fn complement_basis(previous: &[Amplitudes]) -> DMatrix<f64> {
    let mut proj = DMatrix::<f64>::identity(SITES, SITES);
    for p in previous {
        let v = DVector::from_column_slice(&p.0);
        proj -= &v * v.transpose();
    }
    let eig = SymmetricEigen::new(proj);
    let cols: Vec<DVector<f64>> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0.5)
        .map(|(j, _)| eig.eigenvectors.column(j).into_owned())
        .collect();
    debug_assert_eq!(cols.len(), SITES - previous.len());
    DMatrix::from_columns(&cols)
}

pub fn oracle_maximizing_weight(cs: &ConstraintSet) -> OracleSolution {
    let q = complement_basis(cs.previous());
    let n = q.ncols();

    let mut p = DMatrix::<f64>::zeros(SITES, SITES);
    for i in cs.line().site_indices() {
        p[(i, i)] = 1.0;
    }
    let m = DVector::from_column_slice(&cs.own().0);
    let a = q.transpose() * &p * &q;
    let b = q.transpose() * &p * &m;

    let eig = SymmetricEigen::new(a);
    let d = eig.eigenvalues;
    let v = eig.eigenvectors;
    let bt = v.transpose() * &b;

    let d_max = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let top: Vec<bool> = d.iter().map(|&dj| d_max - dj <= 1e-10).collect();
    let top_mass: f64 = (0..n).filter(|&j| top[j]).map(|j| bt[j] * bt[j]).sum();
    let rest: f64 = (0..n)
        .filter(|&j| !top[j])
        .map(|j| bt[j] * bt[j] / ((d_max - d[j]) * (d_max - d[j])))
        .sum();

    let mut y_coef = DVector::<f64>::zeros(n);
    if top_mass <= 1e-24 && rest <= 1.0 {
        for j in 0..n {
            if !top[j] {
                y_coef[j] = bt[j] / (d_max - d[j]);
            }
        }
        let first_top = (0..n).find(|&j| top[j]).expect("top eigenspace is nonempty");
        y_coef[first_top] = (1.0 - rest).max(0.0).sqrt();
    } else {
        let secular = |lambda: f64| -> f64 {
            (0..n).map(|j| bt[j] * bt[j] / ((lambda - d[j]) * (lambda - d[j]))).sum::<f64>() - 1.0
        };
        // secular is decreasing on (d_max, inf) and negative at d_max + |b|
        let mut lo = d_max;
        let mut hi = d_max + bt.norm() + 1e-300;
        for _ in 0..2000 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if secular(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let lambda = 0.5 * (lo + hi);
        for j in 0..n {
            y_coef[j] = bt[j] / (lambda - d[j]);
        }
    }

    let x_vec = &q * (&v * y_coef);
    let mut x = [0.0; SITES];
    x.copy_from_slice(x_vec.as_slice());
    let x = Move::normalize(Amplitudes(x)).expect("oracle maximizer is a unit vector");
    OracleSolution { weight: cs.weight(x.amplitudes()), x }
}
