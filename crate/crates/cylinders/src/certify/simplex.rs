//! Minimal phase-1 simplex used to decide whether a kernel contains a
//! convex (nonnegative, sum-to-one) vector.
//!
//! The problems solved here are tiny (a handful of variables and at most a
//! few dozen constraints), so a dense tableau with Bland's rule is plenty.

use nalgebra::{DMatrix, DVector};

const PIVOT_TOL: f64 = 1e-10;
const FEAS_TOL: f64 = 1e-8;

/// Finds `x >= 0` with `a x = b`, or `None` if the system is infeasible.
///
/// Phase-1 simplex: artificial variables form the initial basis and their
/// sum is minimized; a zero optimum yields a feasible point. Bland's rule
/// guards against cycling.
pub fn solve_feasibility(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    let m = a.nrows();
    let n = a.ncols();
    assert_eq!(b.len(), m);

    // normalize to b >= 0
    let mut a = a.clone();
    let mut b = b.clone();
    for i in 0..m {
        if b[i] < 0.0 {
            b[i] = -b[i];
            for j in 0..n {
                a[(i, j)] = -a[(i, j)];
            }
        }
    }

    // tableau over [x, artificials], objective = sum of artificials
    let total = n + m;
    let mut t = DMatrix::zeros(m + 1, total + 1);
    for i in 0..m {
        for j in 0..n {
            t[(i, j)] = a[(i, j)];
        }
        t[(i, n + i)] = 1.0;
        t[(i, total)] = b[i];
    }
    // objective row: minimize sum of artificials; express in terms of
    // non-basic variables by subtracting the constraint rows
    for j in 0..=total {
        let mut s = 0.0;
        for i in 0..m {
            s += t[(i, j)];
        }
        t[(m, j)] = -s;
    }
    for i in 0..m {
        t[(m, n + i)] = 0.0;
    }
    let mut basis: Vec<usize> = (n..total).collect();

    loop {
        // entering: first column with negative reduced cost (Bland)
        let mut enter = None;
        for j in 0..total {
            if t[(m, j)] < -PIVOT_TOL {
                enter = Some(j);
                break;
            }
        }
        let Some(enter) = enter else { break };
        // leaving: min ratio, ties by smallest basis index (Bland)
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for i in 0..m {
            if t[(i, enter)] > PIVOT_TOL {
                let ratio = t[(i, total)] / t[(i, enter)];
                if ratio < best - PIVOT_TOL
                    || (ratio < best + PIVOT_TOL
                        && leave.is_some_and(|l| basis[i] < basis[l]))
                {
                    best = ratio;
                    leave = Some(i);
                }
            }
        }
        let Some(leave) = leave else {
            return None; // unbounded phase-1 cannot happen, treat as infeasible
        };
        // pivot
        let piv = t[(leave, enter)];
        for j in 0..=total {
            t[(leave, j)] /= piv;
        }
        for i in 0..=m {
            if i != leave {
                let factor = t[(i, enter)];
                if factor != 0.0 {
                    for j in 0..=total {
                        t[(i, j)] -= factor * t[(leave, j)];
                    }
                }
            }
        }
        basis[leave] = enter;
    }

    // optimum = -t[(m, total)]; feasible iff the artificials sum to zero
    if t[(m, total)].abs() > FEAS_TOL {
        return None;
    }
    let mut x = DVector::zeros(n);
    for i in 0..m {
        if basis[i] < n {
            x[basis[i]] = t[(i, total)];
        } else if t[(i, total)].abs() > FEAS_TOL {
            return None; // artificial stuck in the basis at a nonzero level
        }
    }
    Some(x)
}

/// Searches the row span of `basis` (k x m) for a convex vector: `mu >= 0`
/// componentwise with `sum(mu) = 1`. Returns the vector if one exists.
pub fn convex_vector_in_span(basis: &DMatrix<f64>) -> Option<DVector<f64>> {
    let k = basis.nrows();
    let m = basis.ncols();
    if k == 0 || m == 0 {
        return None;
    }
    // unknowns [y+ (k), y- (k), s (m)]: mu = basis^T (y+ - y-) and mu = s >= 0,
    // plus the normalization sum(s) = 1
    let n = 2 * k + m;
    let mut a = DMatrix::zeros(m + 1, n);
    for u in 0..m {
        for i in 0..k {
            a[(u, i)] = basis[(i, u)];
            a[(u, k + i)] = -basis[(i, u)];
        }
        a[(u, 2 * k + u)] = -1.0;
    }
    for u in 0..m {
        a[(m, 2 * k + u)] = 1.0;
    }
    let mut b = DVector::zeros(m + 1);
    b[m] = 1.0;
    let x = solve_feasibility(&a, &b)?;
    let mu = x.rows(2 * k, m).into_owned();
    Some(mu)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn feasible_system_is_solved() {
        // x1 + x2 = 1, x1 - x2 = 0 -> x = (1/2, 1/2)
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, -1.0]);
        let b = DVector::from_row_slice(&[1.0, 0.0]);
        let x = solve_feasibility(&a, &b).unwrap();
        assert!((x[0] - 0.5).abs() < 1e-9);
        assert!((x[1] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn infeasible_system_is_rejected() {
        // x1 + x2 = -1 with x >= 0 becomes x1 + x2 = 1 after normalization
        // but paired with x1 + x2 = 3 it cannot hold
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let b = DVector::from_row_slice(&[1.0, 3.0]);
        assert!(solve_feasibility(&a, &b).is_none());
    }

    #[test]
    fn antipodal_pair_has_the_half_half_dependency() {
        // kernel of the two forms l and -l is spanned by (1, 1)
        let basis = DMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
        let mu = convex_vector_in_span(&basis).unwrap();
        assert!((mu[0] - 0.5).abs() < 1e-9);
        assert!((mu[1] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn sign_indefinite_span_has_no_convex_vector() {
        // the span of (1, -1) has no nonnegative vector with positive sum
        let basis = DMatrix::from_row_slice(1, 2, &[1.0, -1.0]);
        assert!(convex_vector_in_span(&basis).is_none());
    }

    #[test]
    fn convex_vector_found_inside_a_two_dimensional_span() {
        // neither generator is single-signed but their combination is
        let basis = DMatrix::from_row_slice(2, 3, &[1.0, 1.0, -1.0, 0.0, 1.0, 1.0]);
        // v1 + v2 = (1, 2, 0) is nonnegative
        let mu = convex_vector_in_span(&basis).unwrap();
        assert!(mu.iter().all(|&x| x >= -1e-9));
        assert!((mu.sum() - 1.0).abs() < 1e-9);
    }
}
