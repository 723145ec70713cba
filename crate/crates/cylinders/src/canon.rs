//! Canonical configurations, the minimax distance functions and symmetries.
//!
//! Two base configurations are built here:
//!
//! - `O6`: six tangent lines whose touch points are the octahedron vertices
//!   `(+-1, 0, 0)`, `(0, +-1, 0)`, `(0, 0, +-1)`; the line at `e_j` points
//!   along the "next" coordinate axis in cyclic order. Twelve line pairs sit
//!   at distance 1, the three antipodal pairs at distance 2.
//! - `C6`: six vertical lines touching the equator at longitudes `k*60`
//!   degrees; adjacent lines sit at distance 1, opposite ones at distance 2.
//!
//! `min_distance` is the minimax objective: the smallest pairwise line
//! distance, optionally excluding the pairs declared parallel at the base
//! point (that variant stays well-behaved along deformations of `O6`).

use crate::geom::{
    config_norm_distance, line_distance, transform_line, GeomError, Mat3, TangentLine, Vec3,
};
use thiserror::Error;

/// Tolerance used when declaring two pairwise distances tied.
pub const TIE_TOL: f64 = 1e-9;

/// Tolerance for matching a transformed line against a configuration line.
pub const ORBIT_MATCH_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum CanonError {
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error("labels must be unique and match the number of lines")]
    BadLabels,
    #[error("declared parallel pair ({0}, {1}) is not parallel")]
    NotParallel(usize, usize),
    #[error("parallel pair index out of range")]
    PairOutOfRange,
    #[error("radius map needs 0 <= d < 2, got {0}")]
    RadiusDomain(f64),
    #[error("matrix is not orthogonal")]
    NotOrthogonal,
}

/// An ordered, labelled tuple of tangent lines with the pairs that are
/// parallel at the base configuration declared as metadata.
///
/// The declared pairs are *not* re-detected after a deformation: the reduced
/// distance function excludes the same pairs throughout.
#[derive(Debug, Clone)]
pub struct LineConfiguration {
    lines: Vec<TangentLine>,
    labels: Vec<String>,
    parallel_pairs: Vec<(usize, usize)>,
}

impl LineConfiguration {
    pub fn new(
        lines: Vec<TangentLine>,
        labels: Vec<String>,
        parallel_pairs: Vec<(usize, usize)>,
    ) -> Result<Self, CanonError> {
        if labels.len() != lines.len() {
            return Err(CanonError::BadLabels);
        }
        for (i, a) in labels.iter().enumerate() {
            if labels[..i].contains(a) {
                return Err(CanonError::BadLabels);
            }
        }
        let mut pairs = Vec::with_capacity(parallel_pairs.len());
        for &(i, j) in &parallel_pairs {
            if i >= lines.len() || j >= lines.len() || i == j {
                return Err(CanonError::PairOutOfRange);
            }
            let cos = lines[i].direction().dot(&lines[j].direction());
            if (cos.abs() - 1.0).abs() > 1e-12 {
                return Err(CanonError::NotParallel(i, j));
            }
            pairs.push((i.min(j), i.max(j)));
        }
        Ok(Self {
            lines,
            labels,
            parallel_pairs: pairs,
        })
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn lines(&self) -> &[TangentLine] {
        &self.lines
    }

    pub fn line(&self, i: usize) -> &TangentLine {
        &self.lines[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn parallel_pairs(&self) -> &[(usize, usize)] {
        &self.parallel_pairs
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn is_parallel_pair(&self, i: usize, j: usize) -> bool {
        let key = (i.min(j), i.max(j));
        self.parallel_pairs.contains(&key)
    }

    /// Replaces the lines, keeping labels and declared parallel pairs.
    pub fn with_lines(&self, lines: Vec<TangentLine>) -> Self {
        assert_eq!(lines.len(), self.lines.len());
        Self {
            lines,
            labels: self.labels.clone(),
            parallel_pairs: self.parallel_pairs.clone(),
        }
    }
}

/// Fixed label order of the octahedral configuration.
pub const O6_LABELS: [&str; 6] = ["l1+", "l2+", "l3+", "l1-", "l2-", "l3-"];

/// Builds the octahedral configuration.
///
/// `l1+` runs through `e1` in direction `e3`; `l2+` and `l3+` are its images
/// under the cyclic rotation `x -> y -> z -> x`; the `-` lines are the
/// central reflections of the `+` lines. The three antipodal pairs are
/// declared parallel.
pub fn build_o6() -> LineConfiguration {
    let axes = [Vec3::x(), Vec3::y(), Vec3::z()];
    let mut lines = Vec::with_capacity(6);
    for sign in [1.0, -1.0] {
        for j in 0..3 {
            let touch = axes[j] * sign;
            let dir = axes[(j + 2) % 3] * sign; // rho^j e3 for the + lines
            lines.push(TangentLine::new(touch, dir).expect("octahedral lines are tangent"));
        }
    }
    LineConfiguration::new(
        lines,
        O6_LABELS.iter().map(|s| s.to_string()).collect(),
        vec![(0, 3), (1, 4), (2, 5)],
    )
    .expect("canonical O6 is valid")
}

/// Builds the hexagonal configuration: six vertical tangent lines touching
/// the equator at longitudes `k*60` degrees. The three opposite pairs are
/// declared parallel.
pub fn build_c6() -> LineConfiguration {
    let s = 3f64.sqrt() / 2.0;
    let touches = [
        Vec3::new(1.0, 0.0, 0.0),
        Vec3::new(0.5, s, 0.0),
        Vec3::new(-0.5, s, 0.0),
        Vec3::new(-1.0, 0.0, 0.0),
        Vec3::new(-0.5, -s, 0.0),
        Vec3::new(0.5, -s, 0.0),
    ];
    let lines = touches
        .iter()
        .map(|&t| TangentLine::new(t, Vec3::z()).expect("equatorial vertical lines are tangent"))
        .collect();
    LineConfiguration::new(
        lines,
        (0..6).map(|k| format!("c{k}")).collect(),
        vec![(0, 3), (1, 4), (2, 5)],
    )
    .expect("canonical C6 is valid")
}

/// Radius of equal cylinders touching the unit ball whose generator lines
/// sit at distance `d` when the cylinders touch each other: `r = d / (2 - d)`.
pub fn radius_from_distance(d: f64) -> Result<f64, CanonError> {
    if !(0.0..2.0).contains(&d) {
        return Err(CanonError::RadiusDomain(d));
    }
    Ok(d / (2.0 - d))
}

/// Inverse of [`radius_from_distance`]: `d = 2r / (1 + r)`.
pub fn distance_from_radius(r: f64) -> f64 {
    2.0 * r / (1.0 + r)
}

/// Result of the minimax distance: the minimum value and every pair
/// attaining it within [`TIE_TOL`].
#[derive(Debug, Clone)]
pub struct MinDistance {
    pub value: f64,
    pub pairs: Vec<(usize, usize)>,
}

/// Minimum pairwise line distance of a configuration.
///
/// With `skip_parallel` set, pairs declared parallel at the base point are
/// excluded (the reduced minimax function); otherwise all pairs count.
pub fn min_distance(cfg: &LineConfiguration, skip_parallel: bool) -> MinDistance {
    assert!(cfg.len() >= 2, "min_distance needs at least two lines");
    let mut value = f64::INFINITY;
    let mut table = Vec::new();
    for i in 0..cfg.len() {
        for j in (i + 1)..cfg.len() {
            if skip_parallel && cfg.is_parallel_pair(i, j) {
                continue;
            }
            let d = line_distance(cfg.line(i), cfg.line(j));
            table.push((i, j, d));
            if d < value {
                value = d;
            }
        }
    }
    let pairs = table
        .into_iter()
        .filter(|&(_, _, d)| d <= value + TIE_TOL)
        .map(|(i, j, _)| (i, j))
        .collect();
    MinDistance { value, pairs }
}

/// Full pairwise distance table (upper triangle, row-major).
pub fn distance_table(cfg: &LineConfiguration) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::new();
    for i in 0..cfg.len() {
        for j in (i + 1)..cfg.len() {
            out.push((i, j, line_distance(cfg.line(i), cfg.line(j))));
        }
    }
    out
}

/// An orthogonal transformation of 3-space together with its parity.
#[derive(Debug, Clone, Copy)]
pub struct SymmetryElement {
    matrix: Mat3,
    parity: i8,
}

impl SymmetryElement {
    pub fn new(matrix: Mat3) -> Result<Self, CanonError> {
        let gram = matrix.transpose() * matrix;
        if (gram - Mat3::identity()).norm() > 1e-12 {
            return Err(CanonError::NotOrthogonal);
        }
        let parity = if matrix.determinant() > 0.0 { 1 } else { -1 };
        Ok(Self { matrix, parity })
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.matrix
    }

    pub fn parity(&self) -> i8 {
        self.parity
    }

    pub fn compose(&self, other: &SymmetryElement) -> SymmetryElement {
        SymmetryElement {
            matrix: self.matrix * other.matrix,
            parity: self.parity * other.parity,
        }
    }

    /// The cyclic rotation `e1 -> e2 -> e3 -> e1`.
    pub fn cyclic() -> Self {
        Self::new(Mat3::new(0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0)).unwrap()
    }

    /// The central reflection `v -> -v`.
    pub fn central_reflection() -> Self {
        Self::new(-Mat3::identity()).unwrap()
    }

    /// Rotation by pi about the x axis.
    pub fn half_turn_x() -> Self {
        Self::new(Mat3::new(1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, -1.0)).unwrap()
    }
}

/// Checks whether `g` maps the line set of `from` onto the line set of `to`,
/// returning the induced index permutation (`perm[i]` = index in `to` of the
/// image of line `i`). Matching uses the configuration norm on canonical
/// forms with tolerance [`ORBIT_MATCH_TOL`].
pub fn configuration_match(
    from: &LineConfiguration,
    to: &LineConfiguration,
    g: &SymmetryElement,
) -> Option<Vec<usize>> {
    if from.len() != to.len() {
        return None;
    }
    let mut perm = Vec::with_capacity(from.len());
    let mut used = vec![false; to.len()];
    for l in from.lines() {
        let image = transform_line(g.matrix(), l);
        let mut found = None;
        for (k, cand) in to.lines().iter().enumerate() {
            if !used[k] && config_norm_distance(&image, cand) < ORBIT_MATCH_TOL {
                found = Some(k);
                break;
            }
        }
        match found {
            Some(k) => {
                used[k] = true;
                perm.push(k);
            }
            None => return None,
        }
    }
    Some(perm)
}

/// Permutation of line indices induced by `g` if it stabilizes the
/// configuration, `None` otherwise.
pub fn symmetry_orbit_check(cfg: &LineConfiguration, g: &SymmetryElement) -> Option<Vec<usize>> {
    configuration_match(cfg, cfg, g)
}

/// All 48 signed permutation matrices (the full symmetry group of the
/// coordinate octahedron).
pub fn signed_permutation_matrices() -> Vec<SymmetryElement> {
    const PERMS: [[usize; 3]; 6] = [
        [0, 1, 2],
        [1, 2, 0],
        [2, 0, 1],
        [0, 2, 1],
        [1, 0, 2],
        [2, 1, 0],
    ];
    let mut out = Vec::with_capacity(48);
    for perm in PERMS {
        for bits in 0..8u8 {
            let mut m = Mat3::zeros();
            for (col, &row) in perm.iter().enumerate() {
                let sign = if bits & (1 << col) != 0 { -1.0 } else { 1.0 };
                m[(row, col)] = sign;
            }
            out.push(SymmetryElement::new(m).expect("signed permutations are orthogonal"));
        }
    }
    out
}

/// Applies an orthogonal map to every line of a configuration.
pub fn transform_configuration(cfg: &LineConfiguration, g: &SymmetryElement) -> LineConfiguration {
    cfg.with_lines(
        cfg.lines()
            .iter()
            .map(|l| transform_line(g.matrix(), l))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn o6_lines_are_the_octahedral_tangents() {
        let cfg = build_o6();
        assert_eq!(cfg.labels(), &O6_LABELS.map(str::to_string));
        let l1p = cfg.line(0);
        assert_abs_diff_eq!((l1p.touch_point() - Vec3::x()).norm(), 0.0, epsilon = 0.0);
        assert_abs_diff_eq!((l1p.direction() - Vec3::z()).norm(), 0.0, epsilon = 0.0);
        // l2+ = rho l1+: touch e2, direction e1
        let l2p = cfg.line(1);
        assert_eq!(l2p.touch_point(), Vec3::y());
        assert_eq!(l2p.direction(), Vec3::x());
    }

    #[test]
    fn o6_distances_are_one_and_two() {
        let cfg = build_o6();
        for i in 0..6 {
            for j in (i + 1)..6 {
                let d = line_distance(cfg.line(i), cfg.line(j));
                if cfg.is_parallel_pair(i, j) {
                    assert_abs_diff_eq!(d, 2.0, epsilon = 1e-12);
                } else {
                    assert_abs_diff_eq!(d, 1.0, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn c6_adjacent_lines_touch_and_opposite_are_antipodal() {
        let cfg = build_c6();
        for k in 0..6 {
            let next = (k + 1) % 6;
            let (i, j) = (k.min(next), k.max(next));
            assert_abs_diff_eq!(line_distance(cfg.line(i), cfg.line(j)), 1.0, epsilon = 1e-12);
        }
        for k in 0..3 {
            assert_abs_diff_eq!(
                line_distance(cfg.line(k), cfg.line(k + 3)),
                2.0,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn radius_map_fixed_points_and_round_trip() {
        assert_abs_diff_eq!(radius_from_distance(1.0).unwrap(), 1.0, epsilon = 0.0);
        assert_abs_diff_eq!(radius_from_distance(0.0).unwrap(), 0.0, epsilon = 0.0);
        assert!(radius_from_distance(2.0).is_err());
        assert!(radius_from_distance(-0.1).is_err());
        // the maximal radius along the known unlocking path of C6
        let r = (3.0 + 33f64.sqrt()) / 8.0;
        let d = distance_from_radius(r);
        assert_abs_diff_eq!(radius_from_distance(d).unwrap(), r, epsilon = 1e-12);
    }

    #[test]
    fn radius_map_is_strictly_increasing() {
        let mut prev = -1.0;
        for k in 0..200 {
            let d = 1.99 * k as f64 / 199.0;
            let r = radius_from_distance(d).unwrap();
            assert!(r > prev);
            prev = r;
        }
    }

    #[test]
    fn min_distance_on_o6_has_twelve_tied_pairs() {
        let cfg = build_o6();
        let reduced = min_distance(&cfg, true);
        assert_abs_diff_eq!(reduced.value, 1.0, epsilon = 1e-12);
        assert_eq!(reduced.pairs.len(), 12);
        let full = min_distance(&cfg, false);
        assert_abs_diff_eq!(full.value, 1.0, epsilon = 1e-12);
        assert_eq!(full.pairs.len(), 12); // parallel pairs at 2 are not binding
    }

    #[test]
    fn min_distance_on_c6_has_six_tied_pairs() {
        let cfg = build_c6();
        let res = min_distance(&cfg, true);
        assert_abs_diff_eq!(res.value, 1.0, epsilon = 1e-12);
        assert_eq!(res.pairs.len(), 6);
    }

    #[test]
    fn cyclic_rotation_permutes_o6_cyclically() {
        let cfg = build_o6();
        let perm = symmetry_orbit_check(&cfg, &SymmetryElement::cyclic()).unwrap();
        // l1+ -> l2+ -> l3+ -> l1+ and the same on the minus block
        assert_eq!(perm, vec![1, 2, 0, 4, 5, 3]);
    }

    #[test]
    fn central_reflection_swaps_plus_and_minus() {
        let cfg = build_o6();
        let perm = symmetry_orbit_check(&cfg, &SymmetryElement::central_reflection()).unwrap();
        assert_eq!(perm, vec![3, 4, 5, 0, 1, 2]);
    }

    #[test]
    fn eighth_turn_about_z_is_not_a_symmetry() {
        let cfg = build_o6();
        let g = SymmetryElement::new(
            crate::geom::Rotation::about_coord_axis(2, std::f64::consts::FRAC_PI_4).matrix(),
        )
        .unwrap();
        assert!(symmetry_orbit_check(&cfg, &g).is_none());
    }

    #[test]
    fn stabilizer_among_signed_permutations_has_order_24() {
        let cfg = build_o6();
        let mut count = 0;
        for g in signed_permutation_matrices() {
            if symmetry_orbit_check(&cfg, &g).is_some() {
                count += 1;
            }
        }
        assert_eq!(count, 24);
    }

    #[test]
    fn generators_stabilize_o6_and_generate_24_permutations() {
        let cfg = build_o6();
        let gens = [
            SymmetryElement::cyclic(),
            SymmetryElement::half_turn_x(),
            SymmetryElement::central_reflection(),
        ];
        for g in &gens {
            assert!(symmetry_orbit_check(&cfg, g).is_some());
        }
        // close under composition; every product must stabilize too
        let mut elems: Vec<SymmetryElement> = vec![SymmetryElement::new(Mat3::identity()).unwrap()];
        let mut grew = true;
        while grew {
            grew = false;
            let snapshot = elems.clone();
            for a in &snapshot {
                for g in &gens {
                    let prod = a.compose(g);
                    if !elems
                        .iter()
                        .any(|e| (e.matrix() - prod.matrix()).norm() < 1e-9)
                    {
                        elems.push(prod);
                        grew = true;
                    }
                }
            }
        }
        assert_eq!(elems.len(), 24);
        let mut perms = Vec::new();
        for g in &elems {
            let p = symmetry_orbit_check(&cfg, g).expect("group elements stabilize O6");
            if !perms.contains(&p) {
                perms.push(p);
            }
        }
        // the permutation representation is faithful here
        assert_eq!(perms.len(), 24);
    }

    #[test]
    fn min_distance_invariant_under_stabilizers() {
        let cfg = build_o6();
        let base = min_distance(&cfg, true).value;
        for g in signed_permutation_matrices() {
            if symmetry_orbit_check(&cfg, &g).is_some() {
                let moved = transform_configuration(&cfg, &g);
                assert_abs_diff_eq!(min_distance(&moved, true).value, base, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn quarter_turn_gives_the_alternative_octahedral_configuration() {
        let cfg = build_o6();
        for axis in 0..3 {
            let g = SymmetryElement::new(
                crate::geom::Rotation::about_coord_axis(axis, std::f64::consts::FRAC_PI_2).matrix(),
            )
            .unwrap();
            // not a self-symmetry...
            assert!(symmetry_orbit_check(&cfg, &g).is_none());
            // ...but it carries O6 onto its rotated copy, which is congruent
            let rotated = transform_configuration(&cfg, &g);
            assert!(configuration_match(&cfg, &rotated, &g).is_some());
            // and the rotated copy is a genuinely different line set
            let id = SymmetryElement::new(Mat3::identity()).unwrap();
            assert!(configuration_match(&cfg, &rotated, &id).is_none());
        }
    }

    #[test]
    fn labels_must_be_unique() {
        let cfg = build_o6();
        let res = LineConfiguration::new(
            cfg.lines().to_vec(),
            vec!["a".into(), "a".into(), "b".into(), "c".into(), "d".into(), "e".into()],
            vec![],
        );
        assert!(res.is_err());
    }

    #[test]
    fn declared_parallel_pairs_are_validated() {
        let cfg = build_o6();
        let res = LineConfiguration::new(
            cfg.lines().to_vec(),
            cfg.labels().to_vec(),
            vec![(0, 1)], // distance-1 pair, not parallel
        );
        assert!(matches!(res, Err(CanonError::NotParallel(0, 1))));
    }
}
