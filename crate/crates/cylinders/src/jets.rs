//! Perturbation model of the octahedral configuration and Taylor
//! coefficients of the twelve non-parallel squared distances.
//!
//! Each line `l_j^eps` of `O6` is moved by a composition of three rotations
//! about coordinate axes,
//!
//! ```text
//! l(t) = R(outer_axis, outer*t) . R(middle_axis, middle*t) . R(inner_axis, inner*t) . l
//! ```
//!
//! applied right to left. For the line touching the sphere at `+-e_j` the
//! inner axis is `e_j` itself (so the inner rotation spins the line in place
//! around its touch radius), the middle axis is the cyclic successor of
//! `e_j`, and the outer axis is the successor of that. The 18 angle rates,
//! with the three rates of `l1+` pinned to zero to quotient out global
//! rotations, form the 15-dimensional parameter space used throughout.
//!
//! Squared distances along a deformation are expanded as
//! `d2(t) = 1 + [d2]_1 t + [d2]_2 t^2 + O(t^3)`. Three routes to the
//! coefficients are provided: the transcribed closed-form linear table,
//! exact propagation of degree-2 Taylor jets through the distance formula,
//! and finite differences (the independent numerical oracle).

use crate::canon::{LineConfiguration, O6_LABELS};
use crate::geom::{line_distance_sq, transform_line, Mat3, Vec3};

/// Number of free parameters after gauge fixing.
pub const N_PARAMS: usize = 15;
/// Number of line pairs that are not parallel at the base configuration.
pub const N_PAIRS: usize = 12;

/// Rotation slots of one line, in application order from last to first:
/// the inner rotation is applied first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Outer = 0,
    Middle = 1,
    Inner = 2,
}

pub const SLOTS: [Slot; 3] = [Slot::Outer, Slot::Middle, Slot::Inner];

/// Coordinate axis index of a rotation slot for the line touching `+-e_j`
/// (`j` zero-based). Inner = `e_j`, middle = cyclic successor, outer = the
/// axis after that.
pub fn slot_axis(j: usize, slot: Slot) -> usize {
    match slot {
        Slot::Inner => j,
        Slot::Middle => (j + 1) % 3,
        Slot::Outer => (j + 2) % 3,
    }
}

/// Line indices of the five moving lines, in the order their parameter
/// blocks appear in the 15-vector: l1-, l2+, l2-, l3+, l3-.
pub const MOVING_LINES: [usize; 5] = [3, 1, 4, 2, 5];

/// Human-readable names of the 15 free parameters, block per moving line,
/// slots ordered outer, middle, inner.
pub fn var_names() -> Vec<String> {
    let mut names = Vec::with_capacity(N_PARAMS);
    for &line in &MOVING_LINES {
        for slot in ["outer", "middle", "inner"] {
            names.push(format!("{}.{}", O6_LABELS[line], slot));
        }
    }
    names
}

/// Index of a (moving line, slot) pair in the 15-vector; `None` for the
/// gauge-fixed line `l1+`.
pub fn var_index(line: usize, slot: Slot) -> Option<usize> {
    MOVING_LINES
        .iter()
        .position(|&l| l == line)
        .map(|block| 3 * block + slot as usize)
}

/// The 18 angle rates of the rotation model, with the three rates of `l1+`
/// pinned to zero by the standard constructors (gauge fixing; effective
/// dimension 15).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationParams {
    table: [[f64; 3]; 6], // [line][slot]
}

impl PerturbationParams {
    pub fn zero() -> Self {
        Self {
            table: [[0.0; 3]; 6],
        }
    }

    /// Builds gauge-fixed parameters from the 15 free coefficients.
    pub fn from_free(free: &[f64; N_PARAMS]) -> Self {
        let mut table = [[0.0; 3]; 6];
        for (block, &line) in MOVING_LINES.iter().enumerate() {
            for s in 0..3 {
                table[line][s] = free[3 * block + s];
            }
        }
        Self { table }
    }

    pub fn from_slice(free: &[f64]) -> Self {
        assert_eq!(free.len(), N_PARAMS);
        let mut arr = [0.0; N_PARAMS];
        arr.copy_from_slice(free);
        Self::from_free(&arr)
    }

    /// Builds parameters without gauge fixing. Only rigid-motion diagnostics
    /// should need this; everything downstream assumes the gauge-fixed form.
    pub fn ungauged(table: [[f64; 3]; 6]) -> Self {
        Self { table }
    }

    /// Angle rates of the rigid rotation of the whole configuration about
    /// coordinate axis `axis` (an ungauged direction: every line turns about
    /// the same axis at unit rate).
    pub fn global_rotation(axis: usize) -> Self {
        let mut table = [[0.0; 3]; 6];
        for (line, row) in table.iter_mut().enumerate() {
            for &slot in &SLOTS {
                if slot_axis(line % 3, slot) == axis {
                    row[slot as usize] = 1.0;
                }
            }
        }
        Self { table }
    }

    pub fn get(&self, line: usize, slot: Slot) -> f64 {
        self.table[line][slot as usize]
    }

    pub fn free(&self) -> [f64; N_PARAMS] {
        let mut out = [0.0; N_PARAMS];
        for (block, &line) in MOVING_LINES.iter().enumerate() {
            for s in 0..3 {
                out[3 * block + s] = self.table[line][s];
            }
        }
        out
    }

    pub fn is_gauge_fixed(&self) -> bool {
        self.table[0] == [0.0; 3]
    }

    pub fn free_norm(&self) -> f64 {
        self.free().iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// A point of the subspace `E` on which all twelve first differentials
/// vanish, in the chart `(omega, five inner spin rates)`.
///
/// `omega` is the shared rate of the four coupled tilts (outer slots of
/// `l2+`/`l2-` and middle slots of `l3+`/`l3-`); `spins` holds the inner
/// rates of `l1-`, `l2+`, `l2-`, `l3+`, `l3-` in that order (the spin of
/// `l1+` is gauge-fixed to zero).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EPointParams {
    pub omega: f64,
    pub spins: [f64; 5],
}

/// Dimension of the subspace `E`.
pub const E_DIM: usize = 6;

impl EPointParams {
    pub fn zero() -> Self {
        Self {
            omega: 0.0,
            spins: [0.0; 5],
        }
    }

    /// Chart coordinates in the fixed order `(omega, spins...)`.
    pub fn from_chart(x: &[f64; E_DIM]) -> Self {
        Self {
            omega: x[0],
            spins: [x[1], x[2], x[3], x[4], x[5]],
        }
    }

    pub fn chart(&self) -> [f64; E_DIM] {
        [
            self.omega,
            self.spins[0],
            self.spins[1],
            self.spins[2],
            self.spins[3],
            self.spins[4],
        ]
    }

    /// The unique gauge-fixed lift: all tilts vanish except the four
    /// `omega`-coupled ones, the inner slots carry the spins.
    pub fn lift(&self) -> PerturbationParams {
        let mut free = [0.0; N_PARAMS];
        // outer slots of l2+ (block 1) and l2- (block 2)
        free[3] = self.omega;
        free[6] = self.omega;
        // middle slots of l3+ (block 3) and l3- (block 4)
        free[10] = self.omega;
        free[13] = self.omega;
        // inner slots: l1-, l2+, l2-, l3+, l3-
        free[2] = self.spins[0];
        free[5] = self.spins[1];
        free[8] = self.spins[2];
        free[11] = self.spins[3];
        free[14] = self.spins[4];
        PerturbationParams::from_free(&free)
    }

    /// The ambient 15-vectors of the chart basis (column `k` is the lift of
    /// the `k`-th chart unit vector).
    pub fn chart_basis() -> [[f64; N_PARAMS]; E_DIM] {
        let mut basis = [[0.0; N_PARAMS]; E_DIM];
        for (k, col) in basis.iter_mut().enumerate() {
            let mut chart = [0.0; E_DIM];
            chart[k] = 1.0;
            *col = Self::from_chart(&chart).lift().free();
        }
        basis
    }
}

fn coord_rotation(axis: usize, angle: f64) -> Mat3 {
    let (s, c) = angle.sin_cos();
    match axis {
        0 => Mat3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c),
        1 => Mat3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c),
        2 => Mat3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0),
        _ => unreachable!("coordinate axis index"),
    }
}

/// Rotation applied to line `line` at deformation parameter `t`.
fn line_rotation(p: &PerturbationParams, line: usize, t: f64) -> Mat3 {
    let j = line % 3;
    let outer = coord_rotation(slot_axis(j, Slot::Outer), p.get(line, Slot::Outer) * t);
    let middle = coord_rotation(slot_axis(j, Slot::Middle), p.get(line, Slot::Middle) * t);
    let inner = coord_rotation(slot_axis(j, Slot::Inner), p.get(line, Slot::Inner) * t);
    outer * middle * inner
}

/// Deforms the canonical octahedral configuration: each line is moved by its
/// outer-middle-inner rotation composition at parameter `t`.
///
/// Panics if `cfg` does not carry the `O6` label set; the slot axes are tied
/// to that construction.
pub fn deform(cfg: &LineConfiguration, p: &PerturbationParams, t: f64) -> LineConfiguration {
    assert_eq!(
        cfg.labels(),
        &O6_LABELS.map(str::to_string),
        "deform expects the canonical octahedral configuration"
    );
    let lines = cfg
        .lines()
        .iter()
        .enumerate()
        .map(|(i, l)| transform_line(&line_rotation(p, i, t), l))
        .collect();
    cfg.with_lines(lines)
}

/// The twelve non-parallel line pairs in the fixed order used everywhere:
/// three groups of four, the pairs between the 1-lines and the 2-lines,
/// then 1-lines and 3-lines, then 3-lines and 2-lines.
pub const PAIRS: [(usize, usize); N_PAIRS] = [
    (0, 4), // l1+ l2-
    (0, 1), // l1+ l2+
    (3, 4), // l1- l2-
    (3, 1), // l1- l2+
    (0, 5), // l1+ l3-
    (0, 2), // l1+ l3+
    (3, 5), // l1- l3-
    (3, 2), // l1- l3+
    (5, 4), // l3- l2-
    (5, 1), // l3- l2+
    (2, 4), // l3+ l2-
    (2, 1), // l3+ l2+
];

/// Group index (0, 1 or 2) of each pair in [`PAIRS`].
pub const PAIR_GROUP: [usize; N_PAIRS] = [0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2];

pub fn pair_label(k: usize) -> String {
    let (i, j) = PAIRS[k];
    format!("d({},{})", O6_LABELS[i], O6_LABELS[j])
}

/// Squared distances of the twelve non-parallel pairs of a (possibly
/// deformed) configuration.
pub fn pair_distances_sq(cfg: &LineConfiguration) -> [f64; N_PAIRS] {
    let mut out = [0.0; N_PAIRS];
    for (k, &(i, j)) in PAIRS.iter().enumerate() {
        out[k] = line_distance_sq(cfg.line(i), cfg.line(j));
    }
    out
}

/// How a [`JetTable`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JetSource {
    /// Transcribed closed-form linear table, or exact jet propagation.
    ClosedForm,
    /// Central-difference stencils.
    FiniteDifference,
}

/// First and (optionally) second Taylor coefficients of the twelve squared
/// distances along a deformation.
#[derive(Debug, Clone)]
pub struct JetTable {
    pub source: JetSource,
    pub order1: [f64; N_PAIRS],
    pub order2: Option<[f64; N_PAIRS]>,
    /// Estimated truncation error of the order-2 entries (finite differences
    /// only).
    pub order2_error: Option<[f64; N_PAIRS]>,
}

impl JetTable {
    /// Sums of the order-1 coefficients over the three pair groups; these
    /// vanish identically for every parameter choice.
    pub fn group_sums_order1(&self) -> [f64; 3] {
        let mut sums = [0.0; 3];
        for k in 0..N_PAIRS {
            sums[PAIR_GROUP[k]] += self.order1[k];
        }
        sums
    }

    /// Half-sums of the order-2 coefficients over the three pair groups (the
    /// three quadratic forms controlling second-order behavior on `E`).
    pub fn group_half_sums_order2(&self) -> Option<[f64; 3]> {
        let o2 = self.order2?;
        let mut sums = [0.0; 3];
        for k in 0..N_PAIRS {
            sums[PAIR_GROUP[k]] += o2[k];
        }
        Some(sums.map(|s| 0.5 * s))
    }

    /// Indices of order-2 entries whose estimated truncation error exceeds
    /// `tol`.
    pub fn flagged_entries(&self, tol: f64) -> Vec<usize> {
        match &self.order2_error {
            Some(err) => (0..N_PAIRS).filter(|&k| err[k] > tol).collect(),
            None => Vec::new(),
        }
    }
}

/// The transcribed closed-form first-order coefficients, as a 12 x 15 matrix
/// acting on the free parameter vector. Row order matches [`PAIRS`].
pub fn linear_form_matrix() -> [[f64; N_PARAMS]; N_PAIRS] {
    let mut m = [[0.0; N_PARAMS]; N_PAIRS];
    let idx = |line: usize, slot: Slot| var_index(line, slot).expect("moving line");
    // lines: l2+ = 1, l3+ = 2, l1- = 3, l2- = 4, l3- = 5
    let (a, b) = (Slot::Outer, Slot::Middle);
    // group of (1,2)-line pairs
    m[0][idx(4, b)] = -2.0; // -2 middle(l2-)
    m[1][idx(1, b)] = 2.0; // +2 middle(l2+)
    m[2][idx(4, b)] = 2.0; // 2 (middle(l2-) - outer(l1-))
    m[2][idx(3, a)] = -2.0;
    m[3][idx(3, a)] = 2.0; // 2 (outer(l1-) - middle(l2+))
    m[3][idx(1, b)] = -2.0;
    // group of (1,3)-line pairs
    m[4][idx(5, a)] = 2.0; // +2 outer(l3-)
    m[5][idx(2, a)] = -2.0; // -2 outer(l3+)
    m[6][idx(3, b)] = 2.0; // 2 (middle(l1-) - outer(l3-))
    m[6][idx(5, a)] = -2.0;
    m[7][idx(2, a)] = 2.0; // 2 (outer(l3+) - middle(l1-))
    m[7][idx(3, b)] = -2.0;
    // group of (3,2)-line pairs
    m[8][idx(5, b)] = 2.0; // 2 (middle(l3-) - outer(l2-))
    m[8][idx(4, a)] = -2.0;
    m[9][idx(1, a)] = 2.0; // 2 (outer(l2+) - middle(l3-))
    m[9][idx(5, b)] = -2.0;
    m[10][idx(4, a)] = 2.0; // 2 (outer(l2-) - middle(l3+))
    m[10][idx(2, b)] = -2.0;
    m[11][idx(2, b)] = 2.0; // 2 (middle(l3+) - outer(l2+))
    m[11][idx(1, a)] = -2.0;
    m
}

/// First-order coefficients of the twelve squared distances from the
/// closed-form linear table.
pub fn first_order_closed_form(p: &PerturbationParams) -> JetTable {
    let m = linear_form_matrix();
    let free = p.free();
    let mut order1 = [0.0; N_PAIRS];
    for k in 0..N_PAIRS {
        order1[k] = m[k]
            .iter()
            .zip(free.iter())
            .map(|(c, x)| c * x)
            .sum::<f64>();
    }
    JetTable {
        source: JetSource::ClosedForm,
        order1,
        order2: None,
        order2_error: None,
    }
}

/// The three second-order group combinations on `E` in closed form, as
/// polynomials in the chart `(omega, spins)`.
///
/// Writing `s1m, s2p, s2m, s3p, s3m` for the five spin rates:
///
/// ```text
/// U1 = s1m*s2p - s1m^2 - s1m*s2m + 2*s1m*omega - 2*omega^2
/// U2 = s1m*s3p - s3m^2 - s1m*s3m - s3p^2
/// U3 = s2m*s3p + s2p*s3m - s2m*s3m - s2p*s3p - s2m^2 - s2p^2
/// ```
pub fn second_order_combinations(e: &EPointParams) -> [f64; 3] {
    let w = e.omega;
    let [s1m, s2p, s2m, s3p, s3m] = e.spins;
    let u1 = s1m * s2p - s1m * s1m - s1m * s2m + 2.0 * s1m * w - 2.0 * w * w;
    let u2 = s1m * s3p - s3m * s3m - s1m * s3m - s3p * s3p;
    let u3 = s2m * s3p + s2p * s3m - s2m * s3m - s2p * s3p - s2m * s2m - s2p * s2p;
    [u1, u2, u3]
}

/// Coefficient matrices of the three group combinations as quadratic forms
/// on the chart `(omega, s1m, s2p, s2m, s3p, s3m)` of `E`.
pub fn combination_gram_matrices() -> [nalgebra::DMatrix<f64>; 3] {
    use nalgebra::DMatrix;
    let mut q1 = DMatrix::zeros(E_DIM, E_DIM);
    let mut q2 = DMatrix::zeros(E_DIM, E_DIM);
    let mut q3 = DMatrix::zeros(E_DIM, E_DIM);
    // chart indices: 0 omega, 1 s1m, 2 s2p, 3 s2m, 4 s3p, 5 s3m
    q1[(0, 0)] = -2.0;
    q1[(1, 1)] = -1.0;
    q1[(0, 1)] = 1.0;
    q1[(1, 0)] = 1.0;
    q1[(1, 2)] = 0.5;
    q1[(2, 1)] = 0.5;
    q1[(1, 3)] = -0.5;
    q1[(3, 1)] = -0.5;

    q2[(4, 4)] = -1.0;
    q2[(5, 5)] = -1.0;
    q2[(1, 4)] = 0.5;
    q2[(4, 1)] = 0.5;
    q2[(1, 5)] = -0.5;
    q2[(5, 1)] = -0.5;

    q3[(2, 2)] = -1.0;
    q3[(3, 3)] = -1.0;
    q3[(3, 4)] = 0.5;
    q3[(4, 3)] = 0.5;
    q3[(2, 5)] = 0.5;
    q3[(5, 2)] = 0.5;
    q3[(3, 5)] = -0.5;
    q3[(5, 3)] = -0.5;
    q3[(2, 4)] = -0.5;
    q3[(4, 2)] = -0.5;
    [q1, q2, q3]
}

// ---------------------------------------------------------------------------
// Exact degree-2 Taylor jets.
// ---------------------------------------------------------------------------

/// Scalar carrying value, first and second derivative with respect to the
/// deformation parameter at t = 0. Propagating these through the distance
/// formula yields Taylor coefficients exact to rounding, with no step-size
/// truncation.
#[derive(Debug, Clone, Copy)]
struct Jet2 {
    f: f64,
    d1: f64,
    d2: f64,
}

impl Jet2 {
    fn constant(c: f64) -> Self {
        Self {
            f: c,
            d1: 0.0,
            d2: 0.0,
        }
    }

    /// cos(rate * t) as a jet at t = 0.
    fn cos_rate(rate: f64) -> Self {
        Self {
            f: 1.0,
            d1: 0.0,
            d2: -rate * rate,
        }
    }

    /// sin(rate * t) as a jet at t = 0.
    fn sin_rate(rate: f64) -> Self {
        Self {
            f: 0.0,
            d1: rate,
            d2: 0.0,
        }
    }

    fn add(self, o: Self) -> Self {
        Self {
            f: self.f + o.f,
            d1: self.d1 + o.d1,
            d2: self.d2 + o.d2,
        }
    }

    fn sub(self, o: Self) -> Self {
        Self {
            f: self.f - o.f,
            d1: self.d1 - o.d1,
            d2: self.d2 - o.d2,
        }
    }

    fn mul(self, o: Self) -> Self {
        Self {
            f: self.f * o.f,
            d1: self.d1 * o.f + self.f * o.d1,
            d2: self.d2 * o.f + 2.0 * self.d1 * o.d1 + self.f * o.d2,
        }
    }

    fn div(self, o: Self) -> Self {
        let f = self.f / o.f;
        let d1 = (self.d1 - f * o.d1) / o.f;
        let d2 = (self.d2 - 2.0 * d1 * o.d1 - f * o.d2) / o.f;
        Self { f, d1, d2 }
    }

    fn neg(self) -> Self {
        Self {
            f: -self.f,
            d1: -self.d1,
            d2: -self.d2,
        }
    }
}

type JetMat = [[Jet2; 3]; 3];
type JetVec = [Jet2; 3];

fn jet_coord_rotation(axis: usize, rate: f64) -> JetMat {
    let c = Jet2::cos_rate(rate);
    let s = Jet2::sin_rate(rate);
    let z = Jet2::constant(0.0);
    let one = Jet2::constant(1.0);
    match axis {
        0 => [[one, z, z], [z, c, s.neg()], [z, s, c]],
        1 => [[c, z, s], [z, one, z], [s.neg(), z, c]],
        2 => [[c, s.neg(), z], [s, c, z], [z, z, one]],
        _ => unreachable!(),
    }
}

fn jet_mat_mul(a: &JetMat, b: &JetMat) -> JetMat {
    let z = Jet2::constant(0.0);
    let mut out = [[z; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            let mut acc = a[i][0].mul(b[0][j]);
            acc = acc.add(a[i][1].mul(b[1][j]));
            acc = acc.add(a[i][2].mul(b[2][j]));
            *cell = acc;
        }
    }
    out
}

fn jet_mat_apply(m: &JetMat, v: &Vec3) -> JetVec {
    let z = Jet2::constant(0.0);
    let mut out = [z; 3];
    for (i, cell) in out.iter_mut().enumerate() {
        let mut acc = m[i][0].mul(Jet2::constant(v.x));
        acc = acc.add(m[i][1].mul(Jet2::constant(v.y)));
        acc = acc.add(m[i][2].mul(Jet2::constant(v.z)));
        *cell = acc;
    }
    out
}

fn jet_dot(a: &JetVec, b: &JetVec) -> Jet2 {
    a[0].mul(b[0]).add(a[1].mul(b[1])).add(a[2].mul(b[2]))
}

fn jet_det(c0: &JetVec, c1: &JetVec, c2: &JetVec) -> Jet2 {
    let m00 = c1[1].mul(c2[2]).sub(c1[2].mul(c2[1]));
    let m01 = c1[0].mul(c2[2]).sub(c1[2].mul(c2[0]));
    let m02 = c1[0].mul(c2[1]).sub(c1[1].mul(c2[0]));
    c0[0].mul(m00).sub(c0[1].mul(m01)).add(c0[2].mul(m02))
}

fn jet_line_rotation(p: &PerturbationParams, line: usize) -> JetMat {
    let j = line % 3;
    let outer = jet_coord_rotation(slot_axis(j, Slot::Outer), p.get(line, Slot::Outer));
    let middle = jet_coord_rotation(slot_axis(j, Slot::Middle), p.get(line, Slot::Middle));
    let inner = jet_coord_rotation(slot_axis(j, Slot::Inner), p.get(line, Slot::Inner));
    jet_mat_mul(&jet_mat_mul(&outer, &middle), &inner)
}

/// Exact first and second Taylor coefficients of the twelve squared
/// distances of the deformed configuration, by degree-2 jet propagation.
pub fn exact_jets(cfg: &LineConfiguration, p: &PerturbationParams) -> JetTable {
    assert_eq!(cfg.labels(), &O6_LABELS.map(str::to_string));
    let rotations: Vec<JetMat> = (0..6).map(|i| jet_line_rotation(p, i)).collect();
    let touches: Vec<JetVec> = (0..6)
        .map(|i| jet_mat_apply(&rotations[i], &cfg.line(i).touch_point()))
        .collect();
    let dirs: Vec<JetVec> = (0..6)
        .map(|i| jet_mat_apply(&rotations[i], &cfg.line(i).direction()))
        .collect();
    let mut order1 = [0.0; N_PAIRS];
    let mut order2 = [0.0; N_PAIRS];
    for (k, &(i, j)) in PAIRS.iter().enumerate() {
        let delta = [
            touches[j][0].sub(touches[i][0]),
            touches[j][1].sub(touches[i][1]),
            touches[j][2].sub(touches[i][2]),
        ];
        let det = jet_det(&dirs[i], &dirs[j], &delta);
        let cos = jet_dot(&dirs[i], &dirs[j]);
        let den = Jet2::constant(1.0).sub(cos.mul(cos));
        let d2 = det.mul(det).div(den);
        order1[k] = d2.d1;
        order2[k] = 0.5 * d2.d2; // t^2 coefficient
    }
    JetTable {
        source: JetSource::ClosedForm,
        order1,
        order2: Some(order2),
        order2_error: None,
    }
}

/// The twelve exact quadratic forms on the 15 free parameters (the t^2
/// coefficient of each squared distance as a function of the parameter
/// vector), recovered by polarizing the jet evaluation.
pub fn pair_quadratic_forms(cfg: &LineConfiguration) -> Vec<nalgebra::DMatrix<f64>> {
    use nalgebra::DMatrix;
    let order2_of = |free: &[f64; N_PARAMS]| -> [f64; N_PAIRS] {
        exact_jets(cfg, &PerturbationParams::from_free(free))
            .order2
            .expect("exact jets carry order 2")
    };
    let mut diag = [[0.0; N_PAIRS]; N_PARAMS];
    for i in 0..N_PARAMS {
        let mut e = [0.0; N_PARAMS];
        e[i] = 1.0;
        diag[i] = order2_of(&e);
    }
    let mut forms: Vec<DMatrix<f64>> = (0..N_PAIRS)
        .map(|_| DMatrix::zeros(N_PARAMS, N_PARAMS))
        .collect();
    for i in 0..N_PARAMS {
        for (k, form) in forms.iter_mut().enumerate() {
            form[(i, i)] = diag[i][k];
        }
        for j in (i + 1)..N_PARAMS {
            let mut e = [0.0; N_PARAMS];
            e[i] = 1.0;
            e[j] = 1.0;
            let mixed = order2_of(&e);
            for (k, form) in forms.iter_mut().enumerate() {
                let off = 0.5 * (mixed[k] - diag[i][k] - diag[j][k]);
                form[(i, j)] = off;
                form[(j, i)] = off;
            }
        }
    }
    forms
}

// ---------------------------------------------------------------------------
// Finite differences (the numerical oracle).
// ---------------------------------------------------------------------------

/// Central-difference step for order-1 coefficients.
pub const FD_STEP_ORDER1: f64 = 1e-5;
/// Base step for the order-2 stencil (halved once for the Richardson pass).
pub const FD_STEP_ORDER2: f64 = 1e-3;

/// First (and for `order == 2` also second) Taylor coefficients of the
/// twelve squared distances by central differences.
///
/// Order 1 uses the two-point central stencil at [`FD_STEP_ORDER1`]. Order 2
/// uses the three-point second-difference stencil at [`FD_STEP_ORDER2`] and
/// at half that step, combined by one Richardson extrapolation; the spread
/// between the two stencils is reported as the truncation-error estimate.
pub fn finite_difference_jets(
    cfg: &LineConfiguration,
    p: &PerturbationParams,
    order: u8,
) -> JetTable {
    assert!(order == 1 || order == 2, "order must be 1 or 2");
    let eval = |t: f64| pair_distances_sq(&deform(cfg, p, t));
    let h1 = FD_STEP_ORDER1;
    let plus = eval(h1);
    let minus = eval(-h1);
    let mut order1 = [0.0; N_PAIRS];
    for k in 0..N_PAIRS {
        order1[k] = (plus[k] - minus[k]) / (2.0 * h1);
    }
    if order == 1 {
        return JetTable {
            source: JetSource::FiniteDifference,
            order1,
            order2: None,
            order2_error: None,
        };
    }
    let h = FD_STEP_ORDER2;
    let f0 = eval(0.0);
    let fp = eval(h);
    let fm = eval(-h);
    let fph = eval(h / 2.0);
    let fmh = eval(-h / 2.0);
    let mut order2 = [0.0; N_PAIRS];
    let mut order2_error = [0.0; N_PAIRS];
    for k in 0..N_PAIRS {
        let coarse = (fp[k] - 2.0 * f0[k] + fm[k]) / (h * h);
        let fine = (fph[k] - 2.0 * f0[k] + fmh[k]) / (h * h / 4.0);
        let second_derivative = (4.0 * fine - coarse) / 3.0;
        order2[k] = 0.5 * second_derivative;
        order2_error[k] = 0.5 * (fine - coarse).abs() / 3.0;
    }
    JetTable {
        source: JetSource::FiniteDifference,
        order1,
        order2: Some(order2),
        order2_error: Some(order2_error),
    }
}
