//! Non-existence of a positively defined convex combination of the three
//! second-order group forms.
//!
//! After splitting off the square in the shared tilt coordinate, a convex
//! combination `-(U1~ + alpha U2 + beta U3)` with `alpha, beta > 0` lives on
//! the five spin coordinates. Its positive definiteness is equivalent, by
//! the Sylvester criterion, to four leading-minor inequalities; this module
//! evaluates them in closed form, cross-checks them against determinants of
//! the actual Gram matrix, and scans the positive quadrant to confirm the
//! system never holds.

use nalgebra::{DMatrix, Matrix5};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SylvesterError {
    #[error("combination weights must be positive, got alpha = {0}, beta = {1}")]
    NonPositiveWeights(f64, f64),
}

/// Gram matrix (in the five spin coordinates, ordered
/// `s1m, s2p, s2m, s3p, s3m`) of the negated convex combination with
/// weights `(1, alpha, beta)`.
pub fn combination_gram(alpha: f64, beta: f64) -> Matrix5<f64> {
    0.5 * Matrix5::new(
        1.0, -1.0, 1.0, -alpha, alpha, //
        -1.0, 2.0 * beta, 0.0, beta, -beta, //
        1.0, 0.0, 2.0 * beta, -beta, beta, //
        -alpha, beta, -beta, 2.0 * alpha, 0.0, //
        alpha, -beta, beta, 0.0, 2.0 * alpha,
    )
}

/// The quadratic `m(alpha) = alpha - 3 alpha beta + alpha^2 beta + beta^2`
/// controlling the last minor.
pub fn m_polynomial(alpha: f64, beta: f64) -> f64 {
    alpha - 3.0 * alpha * beta + alpha * alpha * beta + beta * beta
}

/// Discriminant of [`m_polynomial`] in `alpha`: `-(beta-1)^2 (4 beta - 1)`.
pub fn m_discriminant(beta: f64) -> f64 {
    -(beta - 1.0) * (beta - 1.0) * (4.0 * beta - 1.0)
}

/// Leading-minor values (orders 2 through 5, scaled by powers of 2) of the
/// combination Gram matrix, and whether the combination is positive
/// definite.
#[derive(Debug, Clone, Copy)]
pub struct SylvesterMinors {
    pub alpha: f64,
    pub beta: f64,
    pub minors: [f64; 4],
    pub positive: bool,
}

/// Evaluates the four Sylvester conditions for the convex combination with
/// weights `(1, alpha, beta)`. All four minors positive would make the
/// combination positive definite; the positive quadrant contains no such
/// point.
pub fn no_positive_convex_combination(
    alpha: f64,
    beta: f64,
) -> Result<SylvesterMinors, SylvesterError> {
    if alpha <= 0.0 || beta <= 0.0 {
        return Err(SylvesterError::NonPositiveWeights(alpha, beta));
    }
    let minors = [
        2.0 * beta - 1.0,
        4.0 * beta * (beta - 1.0),
        -4.0 * beta
            * (2.0 * alpha - 4.0 * alpha * beta + alpha * alpha * beta + beta * beta),
        -16.0 * alpha * beta * m_polynomial(alpha, beta),
    ];
    let positive = minors.iter().all(|&m| m > 0.0);
    Ok(SylvesterMinors {
        alpha,
        beta,
        minors,
        positive,
    })
}

/// Leading principal minors of orders 2..=5 of twice the Gram matrix,
/// computed numerically; the closed-form [`no_positive_convex_combination`]
/// values must match these.
pub fn numeric_minors(alpha: f64, beta: f64) -> [f64; 4] {
    let g = 2.0 * combination_gram(alpha, beta);
    let mut out = [0.0; 4];
    for (i, order) in (2..=5).enumerate() {
        let sub = DMatrix::from_fn(order, order, |r, c| g[(r, c)]);
        out[i] = sub.determinant();
    }
    out
}

/// Result of scanning the positive `(alpha, beta)` quadrant on a log grid.
#[derive(Debug, Clone)]
pub struct QuadrantScan {
    pub grid: usize,
    pub lo: f64,
    pub hi: f64,
    /// Any grid point satisfied all four Sylvester conditions.
    pub any_positive: bool,
    /// Largest value of the smallest minor seen (stays negative).
    pub best_min_minor: f64,
    /// The discriminant stayed negative at every grid point with beta > 1.
    pub discriminant_negative_beyond_one: bool,
    /// The last minor stayed non-positive at every grid point with beta > 1.
    pub last_minor_nonpositive_beyond_one: bool,
}

/// Scans `n x n` log-spaced weights in `[lo, hi]^2` for a positive definite
/// convex combination.
pub fn scan_positive_quadrant(n: usize, lo: f64, hi: f64) -> QuadrantScan {
    assert!(n >= 2 && lo > 0.0 && hi > lo);
    let ratio = (hi / lo).ln();
    let weight = |k: usize| lo * (ratio * k as f64 / (n - 1) as f64).exp();
    let mut any_positive = false;
    let mut best_min_minor = f64::NEG_INFINITY;
    let mut disc_ok = true;
    let mut last_minor_ok = true;
    for i in 0..n {
        let alpha = weight(i);
        for j in 0..n {
            let beta = weight(j);
            let res = no_positive_convex_combination(alpha, beta)
                .expect("grid weights are positive");
            any_positive |= res.positive;
            let min_minor = res.minors.iter().cloned().fold(f64::INFINITY, f64::min);
            best_min_minor = best_min_minor.max(min_minor);
            if beta > 1.0 {
                if m_discriminant(beta) >= 0.0 {
                    disc_ok = false;
                }
                if res.minors[3] > 0.0 {
                    last_minor_ok = false;
                }
            }
        }
    }
    QuadrantScan {
        grid: n,
        lo,
        hi,
        any_positive,
        best_min_minor,
        discriminant_negative_beyond_one: disc_ok,
        last_minor_nonpositive_beyond_one: last_minor_ok,
    }
}
