//! Criticality and maximality analysis of a family of distance functions.
//!
//! The input is a family of smooth functions vanishing at the origin,
//! each carried as a degree-2 jet (linear part and symmetric quadratic
//! part) on a common parameter space — for the octahedral configuration,
//! the twelve squared distances on the 15 gauge-fixed rotation rates.
//!
//! The pipeline:
//!
//! 1. `kernel_subspace` — the subspace `E` where every linear part vanishes;
//! 2. `convex_dependencies` — the left kernel of the stacked linear parts,
//!    reduced to minimal-support generators and normalized to convex
//!    (nonnegative, sum-one) vectors when possible;
//! 3. `restrict_form` — the quadratic form `sum_u mu_u q_u` restricted to a
//!    basis of `E`;
//! 4. `certify_family_positivity` — branch-and-bound positivity of a family
//!    of forms (see [`positivity`]);
//! 5. `check_lq2b_conditions` — the three sufficient conditions for the
//!    origin to be a strict local maximum of the pointwise minimum of the
//!    family, certified numerically.

pub mod positivity;
pub mod search;
pub mod simplex;
pub mod sylvester;

pub use positivity::{
    certify_family_positivity, elimination_oracle_o6, revalidate_certificate, CertifyOptions,
    PositivityCertificate, PositivityVerdict, Precision, SamplingOracle,
};
pub use search::{unlock_search, Chart, SearchOptions, UnlockReport};
pub use sylvester::{
    m_discriminant, m_polynomial, no_positive_convex_combination, scan_positive_quadrant,
    QuadrantScan, SylvesterMinors,
};

use crate::canon::build_o6;
use crate::jets;
use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Relative singular-value threshold for rank and kernel decisions.
pub const RANK_REL_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum CertifyError {
    #[error("family members must share the variable dimension")]
    DimensionMismatch,
    #[error("quadratic part of member {0} is not symmetric")]
    NotSymmetric(usize),
    #[error("group index {0} out of range")]
    BadGroup(usize),
    #[error("the stability probe needs a positively defined family")]
    NotPositivelyDefined,
}

/// One member of a function family: label, linear part and symmetric
/// quadratic part of its degree-2 jet at the origin.
#[derive(Debug, Clone)]
pub struct FamilyMember {
    pub label: String,
    pub linear: DVector<f64>,
    pub quad: DMatrix<f64>,
}

/// A family of degree-2 jets on a common variable space, split into
/// subfamilies ("groups") for the maximality conditions.
#[derive(Debug, Clone)]
pub struct FunctionJetFamily {
    pub var_names: Vec<String>,
    pub members: Vec<FamilyMember>,
    /// Group index of each member, parallel to `members`.
    pub group_of: Vec<usize>,
}

impl FunctionJetFamily {
    pub fn new(
        var_names: Vec<String>,
        members: Vec<FamilyMember>,
        group_of: Vec<usize>,
    ) -> Result<Self, CertifyError> {
        let n = var_names.len();
        if group_of.len() != members.len() {
            return Err(CertifyError::DimensionMismatch);
        }
        for (u, m) in members.iter().enumerate() {
            if m.linear.len() != n || m.quad.nrows() != n || m.quad.ncols() != n {
                return Err(CertifyError::DimensionMismatch);
            }
            if (&m.quad - m.quad.transpose()).amax() > 1e-12 {
                return Err(CertifyError::NotSymmetric(u));
            }
        }
        Ok(Self {
            var_names,
            members,
            group_of,
        })
    }

    pub fn n_vars(&self) -> usize {
        self.var_names.len()
    }

    pub fn n_members(&self) -> usize {
        self.members.len()
    }

    pub fn n_groups(&self) -> usize {
        self.group_of.iter().copied().max().map_or(0, |g| g + 1)
    }

    pub fn group_members(&self, group: usize) -> Vec<usize> {
        (0..self.members.len())
            .filter(|&u| self.group_of[u] == group)
            .collect()
    }

    /// Stacked linear parts, one row per member.
    pub fn linear_matrix(&self) -> DMatrix<f64> {
        let m = self.n_members();
        let n = self.n_vars();
        DMatrix::from_fn(m, n, |u, j| self.members[u].linear[j])
    }
}

/// The family of the twelve non-parallel squared distances of the
/// octahedral configuration on the 15 gauge-fixed rotation rates: linear
/// parts from the closed-form table, quadratic parts from exact jet
/// propagation, grouped by line-pair class.
pub fn o6_family() -> FunctionJetFamily {
    let cfg = build_o6();
    let linear = jets::linear_form_matrix();
    let quads = jets::pair_quadratic_forms(&cfg);
    let members = (0..jets::N_PAIRS)
        .map(|k| FamilyMember {
            label: jets::pair_label(k),
            linear: DVector::from_row_slice(&linear[k]),
            quad: quads[k].clone(),
        })
        .collect();
    FunctionJetFamily::new(
        jets::var_names(),
        members,
        jets::PAIR_GROUP.to_vec(),
    )
    .expect("the octahedral family is well formed")
}

fn eigen_sorted(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = nalgebra::SymmetricEigen::new(m.clone());
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Singular values of `m` (descending) and an orthonormal basis of its right
/// kernel.
///
/// The thin SVD yields the row space; the kernel is read off as the
/// near-unit eigenspace of the complementary projector, which also covers
/// the dimensions a thin decomposition of a wide matrix never touches.
fn right_kernel(m: &DMatrix<f64>, rel_tol: f64) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.ncols();
    let svd = nalgebra::SVD::new(m.clone(), false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let smax = svd.singular_values.iter().fold(0.0f64, |a, &b| a.max(b));
    let tol = rel_tol * smax;
    let mut proj = DMatrix::identity(n, n);
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s > tol {
            let row = v_t.row(i);
            proj -= row.transpose() * row;
        }
    }
    let (eigvals, eigvecs) = eigen_sorted(&proj);
    let kernel_cols: Vec<usize> = (0..n).filter(|&i| eigvals[i] > 0.5).collect();
    let basis = DMatrix::from_fn(n, kernel_cols.len(), |r, c| eigvecs[(r, kernel_cols[c])]);
    let mut singulars: Vec<f64> = svd.singular_values.iter().copied().collect();
    singulars.sort_by(|a, b| b.total_cmp(a));
    (singulars, basis)
}

/// Numerical rank of the stacked linear parts.
pub fn linear_rank(fam: &FunctionJetFamily) -> usize {
    let (singulars, _) = right_kernel(&fam.linear_matrix(), RANK_REL_TOL);
    let smax = singulars.first().copied().unwrap_or(0.0);
    singulars.iter().filter(|&&s| s > RANK_REL_TOL * smax).count()
}

/// Orthonormal basis (columns) of `E`, the common kernel of the linear
/// parts.
pub fn kernel_subspace(fam: &FunctionJetFamily) -> DMatrix<f64> {
    let (_, basis) = right_kernel(&fam.linear_matrix(), RANK_REL_TOL);
    basis
}

/// A linear dependency among the family's linear parts.
#[derive(Debug, Clone)]
pub struct DependencyVector {
    pub mu: DVector<f64>,
    /// Set when `mu` itself is the convex representative: entries
    /// nonnegative, summing to one.
    pub convex: bool,
}

/// Reduces a kernel basis (rows) to minimal-support generators by Gaussian
/// elimination with full normalization; separable block structure comes out
/// as one vector per block.
fn minimal_support_basis(basis: &DMatrix<f64>) -> DMatrix<f64> {
    let mut m = basis.clone();
    let (rows, cols) = m.shape();
    let mut pivot_row = 0;
    for col in 0..cols {
        if pivot_row >= rows {
            break;
        }
        // largest entry in this column below the processed rows
        let (mut best_row, mut best) = (pivot_row, m[(pivot_row, col)].abs());
        for r in (pivot_row + 1)..rows {
            if m[(r, col)].abs() > best {
                best = m[(r, col)].abs();
                best_row = r;
            }
        }
        if best < 1e-9 {
            continue;
        }
        m.swap_rows(pivot_row, best_row);
        let piv = m[(pivot_row, col)];
        for c in 0..cols {
            m[(pivot_row, c)] /= piv;
        }
        for r in 0..rows {
            if r != pivot_row {
                let factor = m[(r, col)];
                if factor != 0.0 {
                    for c in 0..cols {
                        m[(r, c)] -= factor * m[(pivot_row, c)];
                    }
                }
            }
        }
        pivot_row += 1;
    }
    // snap eliminated entries to zero
    for v in m.iter_mut() {
        if v.abs() < 1e-9 {
            *v = 0.0;
        }
    }
    m
}

/// Basis of the left kernel of the stacked linear parts, with each vector
/// normalized to its convex representative (nonnegative, sum one) when one
/// exists.
pub fn convex_dependencies(fam: &FunctionJetFamily) -> Vec<DependencyVector> {
    let linear = fam.linear_matrix();
    let (_, basis) = right_kernel(&linear.transpose(), RANK_REL_TOL);
    if basis.ncols() == 0 {
        return Vec::new();
    }
    let rows = basis.transpose();
    let reduced = minimal_support_basis(&rows);
    let mut out = Vec::new();
    for r in 0..reduced.nrows() {
        let mut mu = reduced.row(r).transpose().into_owned();
        if mu.amax() == 0.0 {
            continue;
        }
        let single_signed = mu.iter().all(|&x| x >= 0.0) || mu.iter().all(|&x| x <= 0.0);
        if single_signed {
            let sum: f64 = mu.iter().sum();
            mu /= sum; // also flips an all-nonpositive vector
            out.push(DependencyVector { mu, convex: true });
        } else {
            // no convex representative along this generator; keep it unit
            let nrm = mu.norm();
            mu /= nrm;
            if mu.iter().find(|&&x| x.abs() > 1e-12).is_some_and(|&x| x < 0.0) {
                mu = -mu;
            }
            out.push(DependencyVector { mu, convex: false });
        }
    }
    out
}

/// Searches the whole dependency space for one convex vector (nonnegative,
/// sum one); linear programming over the left kernel.
pub fn convex_dependency_in_kernel(fam: &FunctionJetFamily) -> Option<DVector<f64>> {
    let linear = fam.linear_matrix();
    let (_, basis) = right_kernel(&linear.transpose(), RANK_REL_TOL);
    if basis.ncols() == 0 {
        return None;
    }
    simplex::convex_vector_in_span(&basis.transpose())
}

/// A quadratic form restricted to a subspace: the spanning basis (columns)
/// and the Gram matrix in that basis.
///
/// Bases produced by [`kernel_subspace`] are orthonormal; `restrict_form`
/// itself accepts any linearly independent basis (the octahedral
/// comparisons use the natural non-orthonormal chart of `E`).
#[derive(Debug, Clone)]
pub struct RestrictedForm {
    pub basis: DMatrix<f64>,
    pub gram: DMatrix<f64>,
}

/// Restricts the combination `sum_u mu_u q_u` of the family's quadratic
/// parts to the span of `basis`: `gram = basis^T (sum_u mu_u q_u) basis`.
pub fn restrict_form(
    fam: &FunctionJetFamily,
    mu: &DVector<f64>,
    basis: &DMatrix<f64>,
) -> RestrictedForm {
    assert_eq!(mu.len(), fam.n_members());
    debug_assert!(
        (fam.linear_matrix().transpose() * mu).amax() < 1e-9 * (1.0 + mu.amax()),
        "mu must be a linear dependency of the family"
    );
    let n = fam.n_vars();
    let mut combined = DMatrix::zeros(n, n);
    for (u, member) in fam.members.iter().enumerate() {
        if mu[u] != 0.0 {
            combined += &member.quad * mu[u];
        }
    }
    let gram = basis.transpose() * combined * basis;
    // symmetrize away rounding asymmetry
    let gram = 0.5 * (&gram + gram.transpose());
    RestrictedForm {
        basis: basis.clone(),
        gram,
    }
}

/// Rank of a symmetric matrix at the shared relative threshold.
pub fn symmetric_rank(m: &DMatrix<f64>) -> usize {
    let (eigvals, _) = eigen_sorted(m);
    let amax = eigvals.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    if amax == 0.0 {
        return 0;
    }
    eigvals
        .iter()
        .filter(|&&l| l.abs() > RANK_REL_TOL * amax)
        .count()
}

/// Per-group outcome of the single-convex-dependency condition.
#[derive(Debug, Clone)]
pub struct GroupDependency {
    pub group: usize,
    pub members: Vec<usize>,
    pub left_kernel_dim: usize,
    pub convex: bool,
    /// The dependency embedded in the full member index space (zero outside
    /// the group).
    pub mu: DVector<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lq2bVerdict {
    StrictLocalMax,
    NotEstablished,
}

/// Report of the three sufficient conditions for the origin to be a strict
/// local maximum of the pointwise minimum of the family.
#[derive(Debug, Clone)]
pub struct Lq2bReport {
    pub condition_a_pass: bool,
    pub groups: Vec<GroupDependency>,
    pub condition_b_pass: bool,
    /// Variable support of each group's linear parts.
    pub supports: Vec<Vec<usize>>,
    pub e_dim: usize,
    pub condition_c: PositivityCertificate,
    pub verdict: Lq2bVerdict,
}

/// Checks the three conditions on a grouped family:
///
/// - (A) each subfamily carries exactly one linear dependency, and it is
///   convex;
/// - (B) the variable supports of the subfamilies' linear parts are
///   pairwise disjoint;
/// - (C) the family of negated restricted forms `{-q[mu_a]}` on `E` is
///   positively defined (branch-and-bound certificate).
///
/// The verdict is `StrictLocalMax` exactly when all three pass.
pub fn check_lq2b_conditions(fam: &FunctionJetFamily, opts: &CertifyOptions) -> Lq2bReport {
    let n_groups = fam.n_groups();
    let linear = fam.linear_matrix();
    let scale = linear.amax();
    let support_tol = 1e-9 * scale.max(1.0);

    // (A) one convex dependency per subfamily
    let mut groups = Vec::with_capacity(n_groups);
    let mut condition_a_pass = n_groups > 0;
    for g in 0..n_groups {
        let members = fam.group_members(g);
        let sub = DMatrix::from_fn(members.len(), fam.n_vars(), |r, c| {
            fam.members[members[r]].linear[c]
        });
        let (_, kernel) = right_kernel(&sub.transpose(), RANK_REL_TOL);
        let dim = kernel.ncols();
        let mut convex = false;
        let mut mu_full = DVector::zeros(fam.n_members());
        if dim == 1 {
            let mut mu = kernel.column(0).into_owned();
            let single_signed = mu.iter().all(|&x| x >= -1e-12) || mu.iter().all(|&x| x <= 1e-12);
            if single_signed {
                let sum: f64 = mu.iter().sum();
                if sum.abs() > 1e-12 {
                    mu /= sum;
                    convex = true;
                    for (r, &u) in members.iter().enumerate() {
                        mu_full[u] = mu[r];
                    }
                }
            }
        }
        condition_a_pass &= dim == 1 && convex;
        groups.push(GroupDependency {
            group: g,
            members,
            left_kernel_dim: dim,
            convex,
            mu: mu_full,
        });
    }

    // (B) disjoint variable supports
    let mut supports = Vec::with_capacity(n_groups);
    for g in 0..n_groups {
        let mut support = Vec::new();
        for j in 0..fam.n_vars() {
            let used = fam
                .group_members(g)
                .iter()
                .any(|&u| fam.members[u].linear[j].abs() > support_tol);
            if used {
                support.push(j);
            }
        }
        supports.push(support);
    }
    let mut condition_b_pass = true;
    for a in 0..n_groups {
        for b in (a + 1)..n_groups {
            if supports[a].iter().any(|j| supports[b].contains(j)) {
                condition_b_pass = false;
            }
        }
    }

    // (C) the negated restricted forms are positively defined on E
    let e_basis = kernel_subspace(fam);
    let e_dim = e_basis.ncols();
    let neg_forms: Vec<DMatrix<f64>> = groups
        .iter()
        .map(|g| -restrict_form(fam, &g.mu, &e_basis).gram)
        .collect();
    let condition_c = if condition_a_pass && e_dim > 0 {
        certify_family_positivity(&neg_forms, opts)
    } else {
        PositivityCertificate {
            verdict: PositivityVerdict::Inconclusive,
            v_constant: None,
            witness: None,
            work: Default::default(),
        }
    };

    let verdict = if condition_a_pass
        && condition_b_pass
        && condition_c.verdict == PositivityVerdict::PositivelyDefined
    {
        Lq2bVerdict::StrictLocalMax
    } else {
        Lq2bVerdict::NotEstablished
    };

    Lq2bReport {
        condition_a_pass,
        groups,
        condition_b_pass,
        supports,
        e_dim,
        condition_c,
        verdict,
    }
}

/// One row of the stability probe: the perturbation level and whether the
/// perturbed family still certified positive.
#[derive(Debug, Clone)]
pub struct StabilityRow {
    pub epsilon: f64,
    pub verdict: PositivityVerdict,
    pub v_constant: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct StabilityProbe {
    /// Certified constant of the unperturbed family.
    pub v_constant: f64,
    /// Uniform bound of the random perturbation forms on the unit sphere.
    pub w_constant: f64,
    pub rows: Vec<StabilityRow>,
    /// First perturbation level at which certification failed, if any.
    pub first_failure: Option<f64>,
    /// All levels below `0.9 v/w` stayed certified.
    pub safe_region_ok: bool,
}

/// Probes how far a certified family can be perturbed before certification
/// fails: random bounded quadratic perturbations `P_a` are added at each
/// level `epsilon` and the family `{Q_a + eps P_a}` is re-certified.
/// Certification is guaranteed to survive `eps < v/w`; the probe asserts a
/// 0.9 safety fraction of that.
pub fn perturbation_stability_probe(
    forms: &[DMatrix<f64>],
    epsilons: &[f64],
    seed: u64,
    opts: &CertifyOptions,
) -> Result<StabilityProbe, CertifyError> {
    let base = certify_family_positivity(forms, opts);
    let Some(v) = base.v_constant else {
        return Err(CertifyError::NotPositivelyDefined);
    };
    if base.verdict != PositivityVerdict::PositivelyDefined {
        return Err(CertifyError::NotPositivelyDefined);
    }
    let n = forms[0].nrows();
    use rand::prelude::*;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let perturbations: Vec<DMatrix<f64>> = forms
        .iter()
        .map(|_| {
            let raw = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
            0.5 * (&raw + raw.transpose())
        })
        .collect();
    // spectral bound of each perturbation on the unit sphere
    let w = perturbations
        .iter()
        .map(|p| {
            let (eigvals, _) = eigen_sorted(p);
            eigvals.iter().fold(0.0f64, |a, &b| a.max(b.abs()))
        })
        .fold(0.0f64, f64::max);

    let mut rows = Vec::with_capacity(epsilons.len());
    let mut first_failure = None;
    let mut safe_region_ok = true;
    let safe_limit = 0.9 * v / w;
    let mut sorted: Vec<f64> = epsilons.to_vec();
    sorted.sort_by(f64::total_cmp);
    for &eps in &sorted {
        let perturbed: Vec<DMatrix<f64>> = forms
            .iter()
            .zip(&perturbations)
            .map(|(q, p)| q + p * eps)
            .collect();
        let cert = certify_family_positivity(&perturbed, opts);
        let failed = cert.verdict != PositivityVerdict::PositivelyDefined;
        if failed {
            first_failure.get_or_insert(eps);
            if eps < safe_limit {
                safe_region_ok = false;
            }
        }
        rows.push(StabilityRow {
            epsilon: eps,
            verdict: cert.verdict,
            v_constant: cert.v_constant,
        });
    }
    Ok(StabilityProbe {
        v_constant: v,
        w_constant: w,
        rows,
        first_failure,
        safe_region_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::{
        combination_gram_matrices, second_order_combinations, EPointParams, E_DIM, N_PAIRS,
        N_PARAMS,
    };
    use approx::assert_abs_diff_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn octahedral_family_has_rank_nine_and_six_dimensional_kernel() {
        let fam = o6_family();
        assert_eq!(fam.n_members(), N_PAIRS);
        assert_eq!(fam.n_vars(), N_PARAMS);
        assert_eq!(linear_rank(&fam), 9);
        let e = kernel_subspace(&fam);
        assert_eq!(e.ncols(), 6);
        // orthonormal within 1e-10
        let gram = e.transpose() * &e;
        assert!((gram - DMatrix::identity(6, 6)).amax() < 1e-10);
        // every column kills all twelve linear parts
        let residual = fam.linear_matrix() * &e;
        assert!(residual.amax() < 1e-9);
    }

    #[test]
    fn kernel_of_zero_linear_parts_is_the_full_space() {
        let members = (0..2)
            .map(|u| FamilyMember {
                label: format!("f{u}"),
                linear: DVector::zeros(4),
                quad: DMatrix::identity(4, 4),
            })
            .collect();
        let fam = FunctionJetFamily::new(
            (0..4).map(|j| format!("x{j}")).collect(),
            members,
            vec![0, 0],
        )
        .unwrap();
        assert_eq!(kernel_subspace(&fam).ncols(), 4);
        assert_eq!(linear_rank(&fam), 0);
    }

    #[test]
    fn single_generic_form_has_a_hyperplane_kernel() {
        let members = vec![FamilyMember {
            label: "f".into(),
            linear: DVector::from_row_slice(&[1.0, -2.0, 3.0, 0.5, -0.1]),
            quad: DMatrix::zeros(5, 5),
        }];
        let fam = FunctionJetFamily::new(
            (0..5).map(|j| format!("x{j}")).collect(),
            members,
            vec![0],
        )
        .unwrap();
        assert_eq!(kernel_subspace(&fam).ncols(), 4);
        assert!(convex_dependencies(&fam).is_empty());
    }

    #[test]
    fn octahedral_family_has_three_quarter_weight_dependencies() {
        let fam = o6_family();
        let deps = convex_dependencies(&fam);
        assert_eq!(deps.len(), 3);
        for dep in &deps {
            assert!(dep.convex);
            // supported on one group with equal quarter weights
            let support: Vec<usize> = (0..N_PAIRS).filter(|&u| dep.mu[u].abs() > 1e-9).collect();
            assert_eq!(support.len(), 4);
            let group = crate::jets::PAIR_GROUP[support[0]];
            for &u in &support {
                assert_eq!(crate::jets::PAIR_GROUP[u], group);
                assert_abs_diff_eq!(dep.mu[u], 0.25, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn antipodal_forms_have_the_half_half_dependency() {
        let l = DVector::from_row_slice(&[1.0, 2.0, -0.5]);
        let members = vec![
            FamilyMember {
                label: "f".into(),
                linear: l.clone(),
                quad: DMatrix::zeros(3, 3),
            },
            FamilyMember {
                label: "g".into(),
                linear: -l,
                quad: DMatrix::zeros(3, 3),
            },
        ];
        let fam = FunctionJetFamily::new(
            (0..3).map(|j| format!("x{j}")).collect(),
            members,
            vec![0, 0],
        )
        .unwrap();
        let deps = convex_dependencies(&fam);
        assert_eq!(deps.len(), 1);
        assert!(deps[0].convex);
        assert_abs_diff_eq!(deps[0].mu[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(deps[0].mu[1], 0.5, epsilon = 1e-12);
        // the LP route agrees
        let lp = convex_dependency_in_kernel(&fam).unwrap();
        assert_abs_diff_eq!(lp[0], 0.5, epsilon = 1e-8);
    }

    #[test]
    fn restricted_forms_reproduce_the_group_combinations() {
        // restricting the quarter-weight dependencies to the natural chart
        // of E yields exactly half the closed-form combination polynomials
        let fam = o6_family();
        let deps = convex_dependencies(&fam);
        let chart = EPointParams::chart_basis();
        let basis = DMatrix::from_fn(N_PARAMS, E_DIM, |r, c| chart[c][r]);
        let grams = combination_gram_matrices();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for dep in &deps {
            // identify the group from the support
            let group = (0..N_PAIRS)
                .find(|&u| dep.mu[u].abs() > 1e-9)
                .map(|u| crate::jets::PAIR_GROUP[u])
                .unwrap();
            let restricted = restrict_form(&fam, &dep.mu, &basis);
            // coefficient-wise match against half the combination matrix
            let expected = &grams[group] * 0.5;
            assert!((&restricted.gram - &expected).amax() < 1e-9);
            // and pointwise on random chart points
            for _ in 0..20 {
                let mut chart_point = [0.0; E_DIM];
                for x in &mut chart_point {
                    *x = rng.random_range(-1.0..1.0);
                }
                let x = DVector::from_row_slice(&chart_point);
                let got = (x.transpose() * &restricted.gram * &x)[(0, 0)];
                let upsilon =
                    second_order_combinations(&EPointParams::from_chart(&chart_point))[group];
                assert_abs_diff_eq!(got, 0.5 * upsilon, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn zero_dependency_restricts_to_the_zero_form() {
        let fam = o6_family();
        let basis = kernel_subspace(&fam);
        let mu = DVector::zeros(fam.n_members());
        let restricted = restrict_form(&fam, &mu, &basis);
        assert_eq!(restricted.gram.amax(), 0.0);
    }

    #[test]
    fn combination_matrices_have_rank_three() {
        for q in combination_gram_matrices() {
            assert_eq!(symmetric_rank(&q), 3);
        }
    }

    #[test]
    fn negated_combinations_are_positively_defined_on_e() {
        let forms: Vec<DMatrix<f64>> = combination_gram_matrices()
            .into_iter()
            .map(|q| -q)
            .collect();
        let cert = certify_family_positivity(&forms, &CertifyOptions::default());
        assert_eq!(cert.verdict, PositivityVerdict::PositivelyDefined);
        let v = cert.v_constant.unwrap();
        assert!(v > 0.0, "certified constant {v}");
        // agreement with the sampling oracle: the sampled minimum of the
        // negated maximum upper-bounds the certified constant
        let oracle = elimination_oracle_o6(200_000, 3);
        assert!(oracle.no_nonnegative_solution);
        assert!(oracle.min_max_negated >= v * (1.0 - 1e-6));
        assert!(revalidate_certificate(&forms, &cert, 100_000, 4));
    }

    #[test]
    fn lq2b_conditions_hold_for_the_octahedral_family() {
        let fam = o6_family();
        let report = check_lq2b_conditions(&fam, &CertifyOptions::default());
        assert!(report.condition_a_pass);
        assert!(report.condition_b_pass);
        assert_eq!(report.e_dim, 6);
        assert_eq!(
            report.condition_c.verdict,
            PositivityVerdict::PositivelyDefined
        );
        assert_eq!(report.verdict, Lq2bVerdict::StrictLocalMax);
        // supports: three disjoint tilt-variable sets, ten variables total
        let total: usize = report.supports.iter().map(Vec::len).sum();
        assert_eq!(total, 10);
    }

    #[test]
    fn shared_variable_across_groups_fails_condition_b() {
        // two groups of antipodal pairs sharing variable 0
        let l1 = DVector::from_row_slice(&[1.0, 1.0, 0.0]);
        let l2 = DVector::from_row_slice(&[1.0, 0.0, 1.0]);
        let members = vec![
            FamilyMember {
                label: "a+".into(),
                linear: l1.clone(),
                quad: -DMatrix::identity(3, 3),
            },
            FamilyMember {
                label: "a-".into(),
                linear: -l1,
                quad: -DMatrix::identity(3, 3),
            },
            FamilyMember {
                label: "b+".into(),
                linear: l2.clone(),
                quad: -DMatrix::identity(3, 3),
            },
            FamilyMember {
                label: "b-".into(),
                linear: -l2,
                quad: -DMatrix::identity(3, 3),
            },
        ];
        let fam = FunctionJetFamily::new(
            (0..3).map(|j| format!("x{j}")).collect(),
            members,
            vec![0, 0, 1, 1],
        )
        .unwrap();
        let report = check_lq2b_conditions(&fam, &CertifyOptions::default());
        assert!(report.condition_a_pass);
        assert!(!report.condition_b_pass);
        assert_eq!(report.verdict, Lq2bVerdict::NotEstablished);
    }

    #[test]
    fn single_group_with_negative_definite_restriction_passes() {
        // one convex dependency, negative definite restricted form: the
        // single-dependency shape of the maximality conditions
        let l = DVector::from_row_slice(&[1.0, 0.0, 0.0]);
        let q = {
            let mut q = DMatrix::zeros(3, 3);
            q[(1, 1)] = -1.0;
            q[(2, 2)] = -2.0;
            q
        };
        let members = vec![
            FamilyMember {
                label: "f+".into(),
                linear: l.clone(),
                quad: q.clone(),
            },
            FamilyMember {
                label: "f-".into(),
                linear: -l,
                quad: q,
            },
        ];
        let fam = FunctionJetFamily::new(
            vec!["x".into(), "y".into(), "z".into()],
            members,
            vec![0, 0],
        )
        .unwrap();
        let report = check_lq2b_conditions(&fam, &CertifyOptions::default());
        assert!(report.condition_a_pass);
        assert!(report.condition_b_pass);
        assert_eq!(report.e_dim, 2);
        assert_eq!(report.verdict, Lq2bVerdict::StrictLocalMax);
    }

    #[test]
    fn stability_probe_tolerates_small_perturbations() {
        // identity form: v = 1, perturbations bounded by w; levels below
        // 0.9 v/w must stay certified
        let forms = vec![DMatrix::identity(3, 3)];
        let probe = perturbation_stability_probe(
            &forms,
            &[0.0, 0.1, 0.3, 0.5],
            9,
            &CertifyOptions::default(),
        )
        .unwrap();
        assert_abs_diff_eq!(probe.v_constant, 1.0, epsilon = 1e-6);
        assert!(probe.safe_region_ok);
        assert_eq!(probe.rows[0].verdict, PositivityVerdict::PositivelyDefined);
    }

    #[test]
    fn stability_probe_rejects_indefinite_input() {
        let forms = vec![-DMatrix::identity(2, 2)];
        assert!(matches!(
            perturbation_stability_probe(&forms, &[0.1], 1, &CertifyOptions::default()),
            Err(CertifyError::NotPositivelyDefined)
        ));
    }
}
