//! Branch-and-bound certification that a family of quadratic forms is
//! positively defined.
//!
//! A family `{Q_1, ..., Q_L}` is positively defined when the system
//! `Q_a(x) <= 0` for all `a` admits only the trivial solution, equivalently
//! when `v := min over the unit sphere of max_a Q_a` is strictly positive.
//! The certifier covers the sphere (up to the `x ~ -x` symmetry shared by
//! every quadratic form) with the six faces `x_k = 1` of the unit cube,
//! bounds each form over a face cell with a centered interval form, and
//! subdivides until every cell is discharged by some form being provably
//! positive on it. The minimum discharge bound, divided by the cell's upper
//! bound on `|x|^2`, is a certified lower bound for `v`.
//!
//! A witness point where `max_a Q_a(x) <= 0` disproves positivity; cell
//! centers and corners are probed. When the cell budget runs out the
//! verdict is inconclusive, never a guess.

use crate::dd::Dd;
use nalgebra::{DMatrix, DVector};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// Arithmetic used for the cell-bound evaluations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    Double,
    Extended,
}

#[derive(Debug, Clone)]
pub struct CertifyOptions {
    /// Maximum number of cells processed before giving up.
    pub budget: u64,
    pub precision: Precision,
    /// A cell is discharged only when a form's lower bound clears this
    /// guard, keeping f64 rounding out of the verdict.
    pub discharge_guard: f64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            budget: 1_000_000,
            precision: Precision::Double,
            discharge_guard: 1e-12,
        }
    }
}

impl CertifyOptions {
    pub fn with_budget(budget: u64) -> Self {
        Self {
            budget,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PositivityVerdict {
    PositivelyDefined,
    NotPositivelyDefined,
    Inconclusive,
}

/// Subdivision statistics of a certification run.
#[derive(Debug, Clone, Default)]
pub struct WorkLog {
    pub cells_processed: u64,
    pub cells_discharged: u64,
    pub max_depth: u32,
    pub budget: u64,
}

#[derive(Debug, Clone)]
pub struct PositivityCertificate {
    pub verdict: PositivityVerdict,
    /// Certified lower bound on `min_{|x|=1} max_a Q_a(x)` for positive
    /// verdicts.
    pub v_constant: Option<f64>,
    /// Unit vector with `max_a Q_a <= 0` for negative verdicts.
    pub witness: Option<DVector<f64>>,
    pub work: WorkLog,
}

struct Cell {
    lo: Vec<f64>,
    hi: Vec<f64>,
    depth: u32,
}

fn norm_sq_bounds(cell: &Cell) -> (f64, f64) {
    let mut lo_sum = 0.0;
    let mut hi_sum = 0.0;
    for (&l, &h) in cell.lo.iter().zip(&cell.hi) {
        let sq_lo = if l <= 0.0 && h >= 0.0 {
            0.0
        } else {
            (l * l).min(h * h)
        };
        lo_sum += sq_lo;
        hi_sum += (l * l).max(h * h);
    }
    (lo_sum, hi_sum)
}

/// Certified lower bound of the Rayleigh quotient `x^T q x / |x|^2` over
/// the cell.
///
/// The quotient is recentered at the cell midpoint: with
/// `qbar = q(c)/|c|^2` and `f(x) = x^T (q - qbar I) x`, the quotient equals
/// `qbar + f(x)/|x|^2`, and `f` is bounded by its centered interval form:
/// `f(c) = 0`, tails `2 sum |((q - qbar I)c)_i| w_i + sum |q_ij - qbar d_ij|
/// w_i w_j`. Recentering makes the bound exact for multiples of the
/// identity and second-order tight in the cell width in general.
fn rayleigh_lower_bound_f64(q: &DMatrix<f64>, cell: &Cell, n2_lo: f64, n2_hi: f64) -> f64 {
    let n = cell.lo.len();
    let mut center = vec![0.0; n];
    let mut width = vec![0.0; n];
    for i in 0..n {
        center[i] = 0.5 * (cell.lo[i] + cell.hi[i]);
        width[i] = 0.5 * (cell.hi[i] - cell.lo[i]);
    }
    let mut qc = vec![0.0; n];
    for i in 0..n {
        let mut s = 0.0;
        for j in 0..n {
            s += q[(i, j)] * center[j];
        }
        qc[i] = s;
    }
    let mut q_of_c = 0.0;
    let mut c_norm_sq = 0.0;
    for i in 0..n {
        q_of_c += center[i] * qc[i];
        c_norm_sq += center[i] * center[i];
    }
    let qbar = q_of_c / c_norm_sq; // c_norm_sq >= 1 on the cube faces
    let mut linear_tail = 0.0;
    for i in 0..n {
        linear_tail += (qc[i] - qbar * center[i]).abs() * width[i];
    }
    let mut quad_tail = 0.0;
    for i in 0..n {
        if width[i] == 0.0 {
            continue;
        }
        for j in 0..n {
            let entry = if i == j { q[(i, j)] - qbar } else { q[(i, j)] };
            quad_tail += entry.abs() * width[i] * width[j];
        }
    }
    let lb_f = -(2.0 * linear_tail + quad_tail);
    qbar + if lb_f >= 0.0 { lb_f / n2_hi } else { lb_f / n2_lo }
}

fn rayleigh_lower_bound_dd(q: &DMatrix<f64>, cell: &Cell, n2_lo: f64, n2_hi: f64) -> f64 {
    let n = cell.lo.len();
    let mut center = vec![Dd::ZERO; n];
    let mut width = vec![0.0; n];
    for i in 0..n {
        center[i] = Dd::from_f64(0.5 * (cell.lo[i] + cell.hi[i]));
        width[i] = 0.5 * (cell.hi[i] - cell.lo[i]);
    }
    let mut qc = vec![Dd::ZERO; n];
    for i in 0..n {
        let mut s = Dd::ZERO;
        for j in 0..n {
            s = s.add(Dd::from_f64(q[(i, j)]).mul(center[j]));
        }
        qc[i] = s;
    }
    let mut q_of_c = Dd::ZERO;
    let mut c_norm_sq = Dd::ZERO;
    for i in 0..n {
        q_of_c = q_of_c.add(center[i].mul(qc[i]));
        c_norm_sq = c_norm_sq.add(center[i].mul(center[i]));
    }
    let qbar = Dd::from_f64(q_of_c.to_f64() / c_norm_sq.to_f64());
    let mut linear_tail = Dd::ZERO;
    for i in 0..n {
        let shifted = qc[i].sub(qbar.mul(center[i]));
        linear_tail = linear_tail.add(shifted.abs().mul(Dd::from_f64(width[i])));
    }
    let mut quad_tail = Dd::ZERO;
    for i in 0..n {
        if width[i] == 0.0 {
            continue;
        }
        for j in 0..n {
            let entry = if i == j {
                Dd::from_f64(q[(i, j)]).sub(qbar)
            } else {
                Dd::from_f64(q[(i, j)])
            };
            quad_tail = quad_tail.add(entry.abs().mul(Dd::from_f64(width[i] * width[j])));
        }
    }
    let lb_f = Dd::from_f64(2.0)
        .mul(linear_tail)
        .add(quad_tail)
        .neg()
        .to_f64();
    let qbar = qbar.to_f64();
    qbar + if lb_f >= 0.0 { lb_f / n2_hi } else { lb_f / n2_lo }
}

fn rayleigh_lower_bound(
    q: &DMatrix<f64>,
    cell: &Cell,
    n2_lo: f64,
    n2_hi: f64,
    precision: Precision,
) -> f64 {
    match precision {
        Precision::Double => rayleigh_lower_bound_f64(q, cell, n2_lo, n2_hi),
        Precision::Extended => rayleigh_lower_bound_dd(q, cell, n2_lo, n2_hi),
    }
}

fn eval_form(q: &DMatrix<f64>, x: &[f64]) -> f64 {
    let n = x.len();
    let mut total = 0.0;
    for i in 0..n {
        let mut s = 0.0;
        for j in 0..n {
            s += q[(i, j)] * x[j];
        }
        total += x[i] * s;
    }
    total
}

/// Probes the cell center and corners for a point with `max_a Q_a <= 0`.
fn find_witness(forms: &[DMatrix<f64>], cell: &Cell) -> Option<Vec<f64>> {
    let n = cell.lo.len();
    let center: Vec<f64> = (0..n).map(|i| 0.5 * (cell.lo[i] + cell.hi[i])).collect();
    let is_witness = |x: &[f64]| {
        forms
            .iter()
            .map(|q| eval_form(q, x))
            .fold(f64::NEG_INFINITY, f64::max)
            <= 0.0
    };
    if is_witness(&center) {
        return Some(center);
    }
    let free: Vec<usize> = (0..n).filter(|&i| cell.hi[i] > cell.lo[i]).collect();
    if free.len() <= 10 {
        let mut corner = center.clone();
        for mask in 0..(1u32 << free.len()) {
            for (b, &i) in free.iter().enumerate() {
                corner[i] = if mask & (1 << b) != 0 {
                    cell.hi[i]
                } else {
                    cell.lo[i]
                };
            }
            if is_witness(&corner) {
                return Some(corner);
            }
        }
    }
    None
}

/// Decides whether the family of quadratic forms (given by symmetric
/// coefficient matrices on a common space) is positively defined.
pub fn certify_family_positivity(
    forms: &[DMatrix<f64>],
    opts: &CertifyOptions,
) -> PositivityCertificate {
    assert!(!forms.is_empty(), "need at least one quadratic form");
    let n = forms[0].nrows();
    for q in forms {
        assert_eq!(q.nrows(), n);
        assert_eq!(q.ncols(), n);
    }

    let mut work = WorkLog {
        budget: opts.budget,
        ..WorkLog::default()
    };
    // six faces x_k = +1 cover the sphere up to sign
    let mut stack: Vec<Cell> = (0..n)
        .map(|k| {
            let mut lo = vec![-1.0; n];
            let mut hi = vec![1.0; n];
            lo[k] = 1.0;
            hi[k] = 1.0;
            Cell { lo, hi, depth: 0 }
        })
        .collect();
    let mut v_lower = f64::INFINITY;

    while let Some(cell) = stack.pop() {
        if work.cells_processed >= opts.budget {
            return PositivityCertificate {
                verdict: PositivityVerdict::Inconclusive,
                v_constant: None,
                witness: None,
                work,
            };
        }
        work.cells_processed += 1;
        work.max_depth = work.max_depth.max(cell.depth);

        let (n2_lo, n2_hi) = norm_sq_bounds(&cell);
        let mut discharge: Option<f64> = None;
        for q in forms {
            let bound = rayleigh_lower_bound(q, &cell, n2_lo.max(1.0), n2_hi, opts.precision);
            if bound > opts.discharge_guard {
                discharge = Some(discharge.map_or(bound, |b: f64| b.max(bound)));
            }
        }
        if let Some(bound) = discharge {
            work.cells_discharged += 1;
            v_lower = v_lower.min(bound);
            continue;
        }

        if let Some(point) = find_witness(forms, &cell) {
            let norm = point.iter().map(|x| x * x).sum::<f64>().sqrt();
            let witness = DVector::from_vec(point) / norm;
            return PositivityCertificate {
                verdict: PositivityVerdict::NotPositivelyDefined,
                v_constant: None,
                witness: Some(witness),
                work,
            };
        }

        // split the widest free coordinate
        let (mut split, mut width) = (usize::MAX, 0.0);
        for i in 0..n {
            let w = cell.hi[i] - cell.lo[i];
            if w > width {
                width = w;
                split = i;
            }
        }
        if split == usize::MAX || width < 1e-13 {
            // cannot refine further: margins below rounding resolution
            return PositivityCertificate {
                verdict: PositivityVerdict::Inconclusive,
                v_constant: None,
                witness: None,
                work,
            };
        }
        let mid = 0.5 * (cell.lo[split] + cell.hi[split]);
        let mut left = Cell {
            lo: cell.lo.clone(),
            hi: cell.hi.clone(),
            depth: cell.depth + 1,
        };
        left.hi[split] = mid;
        let mut right = Cell {
            lo: cell.lo,
            hi: cell.hi,
            depth: cell.depth + 1,
        };
        right.lo[split] = mid;
        stack.push(left);
        stack.push(right);
    }

    PositivityCertificate {
        verdict: PositivityVerdict::PositivelyDefined,
        v_constant: Some(v_lower),
        witness: None,
        work,
    }
}

/// Re-validates a positive certificate on fresh random unit vectors:
/// every sample must satisfy `max_a Q_a(x) >= v (1 - slack)`.
pub fn revalidate_certificate(
    forms: &[DMatrix<f64>],
    cert: &PositivityCertificate,
    samples: usize,
    seed: u64,
) -> bool {
    let Some(v) = cert.v_constant else {
        return false;
    };
    if cert.verdict != PositivityVerdict::PositivelyDefined || v <= 0.0 {
        return false;
    }
    let n = forms[0].nrows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let floor = v * (1.0 - 1e-6);
    for _ in 0..samples {
        let x = random_unit_vector(n, &mut rng);
        let max = forms
            .iter()
            .map(|q| eval_form(q, x.as_slice()))
            .fold(f64::NEG_INFINITY, f64::max);
        if max < floor {
            return false;
        }
    }
    true
}

/// Uniform random unit vector via normalized Gaussian deviates
/// (Box-Muller, deterministic for a fixed generator state).
pub fn random_unit_vector(n: usize, rng: &mut impl Rng) -> DVector<f64> {
    loop {
        let mut v = DVector::zeros(n);
        let mut k = 0;
        while k < n {
            let u1: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
            let u2: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let r = (-2.0 * u1.ln()).sqrt();
            v[k] = r * u2.cos();
            k += 1;
            if k < n {
                v[k] = r * u2.sin();
                k += 1;
            }
        }
        let norm = v.norm();
        if norm > 1e-6 {
            return v / norm;
        }
    }
}

/// Report of the sampling oracle for the three second-order group
/// combinations.
#[derive(Debug, Clone)]
pub struct SamplingOracle {
    pub samples: usize,
    /// Largest sampled value of `min_a U_a` over unit chart points; strictly
    /// negative when the simultaneous-nonnegativity system has only the
    /// trivial solution.
    pub max_min_combination: f64,
    /// Smallest sampled value of `max_a (-U_a)` (an upper bound for the
    /// certified constant of the negated family).
    pub min_max_negated: f64,
    /// True when no sampled point satisfies all three combinations >= 0
    /// beyond rounding slack.
    pub no_nonnegative_solution: bool,
}

/// Samples unit points of the chart of `E` and evaluates the closed-form
/// group combinations; fully independent of the branch-and-bound path.
pub fn elimination_oracle_o6(samples: usize, seed: u64) -> SamplingOracle {
    use crate::jets::{second_order_combinations, EPointParams, E_DIM};
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_min = f64::NEG_INFINITY;
    let mut min_max_neg = f64::INFINITY;
    for _ in 0..samples {
        let x = random_unit_vector(E_DIM, &mut rng);
        let mut chart = [0.0; E_DIM];
        chart.copy_from_slice(x.as_slice());
        let u = second_order_combinations(&EPointParams::from_chart(&chart));
        let min = u[0].min(u[1]).min(u[2]);
        max_min = max_min.max(min);
        min_max_neg = min_max_neg.min(-min);
    }
    SamplingOracle {
        samples,
        max_min_combination: max_min,
        min_max_negated: min_max_neg,
        no_nonnegative_solution: max_min < 1e-9,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dm(n: usize, diag: &[f64]) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_row_slice(&diag[..n]))
    }

    #[test]
    fn identity_form_is_positively_defined_with_v_one() {
        let forms = vec![dm(3, &[1.0, 1.0, 1.0])];
        let cert = certify_family_positivity(&forms, &CertifyOptions::default());
        assert_eq!(cert.verdict, PositivityVerdict::PositivelyDefined);
        let v = cert.v_constant.unwrap();
        assert!(v > 0.999 && v <= 1.0 + 1e-12, "v = {v}");
        assert!(revalidate_certificate(&forms, &cert, 10_000, 1));
    }

    #[test]
    fn opposing_indefinite_pair_is_rejected_with_witness() {
        // both forms vanish on the diagonal x = y: not positively defined
        let q1 = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let q2 = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 1.0]);
        let cert = certify_family_positivity(&[q1.clone(), q2.clone()], &CertifyOptions::default());
        assert_eq!(cert.verdict, PositivityVerdict::NotPositivelyDefined);
        let w = cert.witness.unwrap();
        assert!((w.norm() - 1.0).abs() < 1e-12);
        let m = eval_form(&q1, w.as_slice()).max(eval_form(&q2, w.as_slice()));
        assert!(m <= 1e-12, "witness max = {m}");
        // the witness is the diagonal direction
        assert!((w[0].abs() - w[1].abs()).abs() < 1e-9);
    }

    #[test]
    fn negative_form_is_rejected() {
        let forms = vec![dm(2, &[-1.0, -2.0])];
        let cert = certify_family_positivity(&forms, &CertifyOptions::default());
        assert_eq!(cert.verdict, PositivityVerdict::NotPositivelyDefined);
    }

    #[test]
    fn starved_budget_is_inconclusive() {
        let forms = vec![dm(3, &[1.0, 1.0, 1.0])];
        let cert = certify_family_positivity(&forms, &CertifyOptions::with_budget(1));
        assert_eq!(cert.verdict, PositivityVerdict::Inconclusive);
        assert_eq!(cert.work.cells_processed, 1);
    }

    #[test]
    fn indefinite_pair_that_covers_the_sphere_is_accepted() {
        // max(x^2 - y^2/2, y^2 - x^2/2) >= |x|^2 / 6 everywhere
        let q1 = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -0.5]);
        let q2 = DMatrix::from_row_slice(2, 2, &[-0.5, 0.0, 0.0, 1.0]);
        let forms = vec![q1, q2];
        let cert = certify_family_positivity(&forms, &CertifyOptions::default());
        assert_eq!(cert.verdict, PositivityVerdict::PositivelyDefined);
        let v = cert.v_constant.unwrap();
        // true constant: at |x| = |y| both forms give 1/4
        assert!(v > 0.0 && v <= 0.25 + 1e-9, "v = {v}");
        assert!(revalidate_certificate(&forms, &cert, 10_000, 2));
    }

    #[test]
    fn extended_precision_agrees_with_double() {
        let q1 = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -0.5]);
        let q2 = DMatrix::from_row_slice(2, 2, &[-0.5, 0.0, 0.0, 1.0]);
        let forms = vec![q1, q2];
        let dd_opts = CertifyOptions {
            precision: Precision::Extended,
            ..CertifyOptions::default()
        };
        let a = certify_family_positivity(&forms, &CertifyOptions::default());
        let b = certify_family_positivity(&forms, &dd_opts);
        assert_eq!(a.verdict, b.verdict);
        let (va, vb) = (a.v_constant.unwrap(), b.v_constant.unwrap());
        assert!((va - vb).abs() < 1e-9, "{va} vs {vb}");
    }

    #[test]
    fn oracle_rejects_single_spin_direction() {
        use crate::jets::{second_order_combinations, EPointParams};
        // the first-spin axis alone violates the first combination
        let e = EPointParams {
            omega: 0.0,
            spins: [1.0, 0.0, 0.0, 0.0, 0.0],
        };
        let u = second_order_combinations(&e);
        assert!(u[0] < 0.0);
        // and the origin satisfies the system with equality
        let z = second_order_combinations(&EPointParams::zero());
        assert_eq!(z, [0.0, 0.0, 0.0]);
    }

    #[test]
    fn oracle_finds_no_nonnegative_solution_on_the_sphere() {
        let report = elimination_oracle_o6(100_000, 7);
        assert!(report.no_nonnegative_solution);
        assert!(report.max_min_combination < 0.0);
        assert!(report.min_max_negated > 0.0);
    }
}
