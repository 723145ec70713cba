//! Floating-point geometry of lines tangent to the unit sphere.
//!
//! A tangent line is stored as a pair `(touch_point, direction)` where the
//! touch point lies on the unit sphere and the direction is a unit vector
//! orthogonal to it. Lines are unoriented: `(x, xi)` and `(x, -xi)` denote
//! the same line, and the stored direction sign is canonicalized so that
//! equality and hashing behave as expected.

use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

/// Tolerance on the unit-norm and tangency invariants checked at construction.
pub const UNIT_TOL: f64 = 1e-12;

/// `|cos|` threshold at and above which a pair of directions is treated as
/// parallel by [`line_distance_sq`]. The rational distance formula is 0/0 for
/// parallel lines, so the point-to-line formula takes over near the seam.
pub const PARALLEL_TOL: f64 = 1e-10;

/// Threshold below which a coordinate counts as zero when picking the
/// canonical direction sign.
pub const SIGN_SCAN_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum GeomError {
    #[error("touch point must lie on the unit sphere, got |x| = {0}")]
    TouchPointNotUnit(f64),
    #[error("direction must be a unit vector, got |xi| = {0}")]
    DirectionNotUnit(f64),
    #[error("direction must be tangent to the sphere, got x.xi = {0}")]
    NotTangent(f64),
    #[error("direction vector must be nonzero")]
    ZeroDirection,
    #[error("rotation axis must be nonzero")]
    ZeroAxis,
    #[error("coordinates must be finite")]
    NonFinite,
}

fn check_finite3(v: &Vec3) -> Result<(), GeomError> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(GeomError::NonFinite)
    }
}

/// Flips `v` if needed so that its first nonzero coordinate (scanning x, y, z
/// with threshold [`SIGN_SCAN_TOL`]) is positive.
pub fn canonical_sign(v: Vec3) -> Vec3 {
    for k in 0..3 {
        if v[k].abs() > SIGN_SCAN_TOL {
            return if v[k] < 0.0 { -v } else { v };
        }
    }
    v
}

/// An unoriented line tangent to the unit sphere.
///
/// Fields are private; the constructor validates the invariants (unit touch
/// point, unit tangent direction) and canonicalizes the direction sign, which
/// encodes the unoriented identification `(x, xi) ~ (x, -xi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentLine {
    touch_point: Vec3,
    direction: Vec3,
}

impl TangentLine {
    pub fn new(touch_point: Vec3, direction: Vec3) -> Result<Self, GeomError> {
        check_finite3(&touch_point)?;
        check_finite3(&direction)?;
        if direction.norm() <= UNIT_TOL {
            return Err(GeomError::ZeroDirection);
        }
        let tn = touch_point.norm();
        if (tn - 1.0).abs() > UNIT_TOL {
            return Err(GeomError::TouchPointNotUnit(tn));
        }
        let dn = direction.norm();
        if (dn - 1.0).abs() > UNIT_TOL {
            return Err(GeomError::DirectionNotUnit(dn));
        }
        let dot = touch_point.dot(&direction);
        if dot.abs() > UNIT_TOL {
            return Err(GeomError::NotTangent(dot));
        }
        Ok(Self {
            touch_point,
            direction: canonical_sign(direction),
        })
    }

    pub fn touch_point(&self) -> Vec3 {
        self.touch_point
    }

    pub fn direction(&self) -> Vec3 {
        self.direction
    }

    /// An oriented representative of this line (the canonical direction).
    pub fn oriented(&self) -> OrientedLine {
        OrientedLine {
            point: self.touch_point,
            direction: self.direction,
        }
    }
}

/// A line with a distinguished orientation, not necessarily tangent to the
/// sphere. Used by the chirality signs, where the direction sign matters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientedLine {
    point: Vec3,
    direction: Vec3,
}

impl OrientedLine {
    /// Builds an oriented line through `point`; `direction` is normalized but
    /// its sign is kept.
    pub fn new(point: Vec3, direction: Vec3) -> Result<Self, GeomError> {
        check_finite3(&point)?;
        check_finite3(&direction)?;
        let n = direction.norm();
        if n <= UNIT_TOL {
            return Err(GeomError::ZeroDirection);
        }
        Ok(Self {
            point,
            direction: direction / n,
        })
    }

    pub fn point(&self) -> Vec3 {
        self.point
    }

    pub fn direction(&self) -> Vec3 {
        self.direction
    }

    pub fn reversed(&self) -> Self {
        Self {
            point: self.point,
            direction: -self.direction,
        }
    }
}

/// Anything that behaves as a straight line: a base point and a unit
/// direction.
pub trait LineLike {
    fn base_point(&self) -> Vec3;
    fn unit_direction(&self) -> Vec3;
}

impl LineLike for TangentLine {
    fn base_point(&self) -> Vec3 {
        self.touch_point
    }
    fn unit_direction(&self) -> Vec3 {
        self.direction
    }
}

impl LineLike for OrientedLine {
    fn base_point(&self) -> Vec3 {
        self.point
    }
    fn unit_direction(&self) -> Vec3 {
        self.direction
    }
}

fn lex_key(p: &Vec3, d: &Vec3) -> [f64; 6] {
    [p.x, p.y, p.z, d.x, d.y, d.z]
}

fn lex_le(a: &[f64; 6], b: &[f64; 6]) -> bool {
    for k in 0..6 {
        match a[k].total_cmp(&b[k]) {
            std::cmp::Ordering::Less => return true,
            std::cmp::Ordering::Greater => return false,
            std::cmp::Ordering::Equal => {}
        }
    }
    true
}

fn distance_sq_ordered(p1: Vec3, d1: Vec3, p2: Vec3, d2: Vec3) -> f64 {
    let cos = d1.dot(&d2);
    let delta = p2 - p1;
    if cos.abs() >= 1.0 - PARALLEL_TOL {
        // Parallel or nearly so: squared distance of p2 from the first line.
        let perp = delta - d1 * delta.dot(&d1);
        perp.norm_squared()
    } else {
        // det[d1, d2, delta] = delta . (d1 x d2), and for unit directions
        // 1 - cos^2 = |d1 x d2|^2; the cross-product form of the denominator
        // avoids the cancellation near the parallel seam.
        let cross = d1.cross(&d2);
        let det = delta.dot(&cross);
        det * det / cross.norm_squared()
    }
}

/// Squared distance between two lines.
///
/// For non-parallel lines this is `det^2[xi', xi'', x'' - x'] / (1 - (xi'.xi'')^2)`;
/// for (near-)parallel pairs the point-to-line formula takes over, see
/// [`PARALLEL_TOL`]. Arguments are sorted canonically before evaluation, so
/// the result is symmetric bit for bit.
pub fn line_distance_sq<L: LineLike, M: LineLike>(u: &L, v: &M) -> f64 {
    let (pu, du) = (u.base_point(), u.unit_direction());
    let (pv, dv) = (v.base_point(), v.unit_direction());
    if lex_le(&lex_key(&pu, &du), &lex_key(&pv, &dv)) {
        distance_sq_ordered(pu, du, pv, dv)
    } else {
        distance_sq_ordered(pv, dv, pu, du)
    }
}

/// Distance between two lines (square root of [`line_distance_sq`]).
pub fn line_distance<L: LineLike, M: LineLike>(u: &L, v: &M) -> f64 {
    line_distance_sq(u, v).sqrt()
}

/// The norm on the manifold of unoriented tangent lines:
/// `|x' - x''| + min(|xi' - xi''|, |xi' + xi''|)`.
pub fn config_norm_distance(u: &TangentLine, v: &TangentLine) -> f64 {
    let dx = (u.touch_point - v.touch_point).norm();
    let dminus = (u.direction - v.direction).norm();
    let dplus = (u.direction + v.direction).norm();
    dx + dminus.min(dplus)
}

/// A rotation of 3-space, stored as a unit axis and an angle.
///
/// The rotation is counterclockwise by `angle` when viewed from the tip of
/// the axis. Compositions are written left to right onto column vectors:
/// `a.compose(&b)` applies `b` first, then `a`, matching `a.matrix() * b.matrix()`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation {
    axis: Vec3,
    angle: f64,
}

impl Rotation {
    pub fn new(axis: Vec3, angle: f64) -> Result<Self, GeomError> {
        check_finite3(&axis)?;
        if !angle.is_finite() {
            return Err(GeomError::NonFinite);
        }
        let n = axis.norm();
        if n <= UNIT_TOL {
            return Err(GeomError::ZeroAxis);
        }
        Ok(Self {
            axis: axis / n,
            angle,
        })
    }

    /// Rotation about the `k`-th coordinate axis (0 = x, 1 = y, 2 = z).
    pub fn about_coord_axis(k: usize, angle: f64) -> Self {
        let mut axis = Vec3::zeros();
        axis[k] = 1.0;
        Self { axis, angle }
    }

    pub fn identity() -> Self {
        Self {
            axis: Vec3::z(),
            angle: 0.0,
        }
    }

    pub fn axis(&self) -> Vec3 {
        self.axis
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn inverse(&self) -> Self {
        Self {
            axis: self.axis,
            angle: -self.angle,
        }
    }

    /// Rotation matrix (Rodrigues formula).
    pub fn matrix(&self) -> Mat3 {
        let (s, c) = self.angle.sin_cos();
        let a = self.axis;
        let k = Mat3::new(0.0, -a.z, a.y, a.z, 0.0, -a.x, -a.y, a.x, 0.0);
        Mat3::identity() * c + k * s + a * a.transpose() * (1.0 - c)
    }

    pub fn apply(&self, v: &Vec3) -> Vec3 {
        self.matrix() * v
    }
}

/// Rotates a tangent line: both the touch point and the direction are
/// rotated, then the direction sign is re-canonicalized.
pub fn rotate_line(r: &Rotation, l: &TangentLine) -> TangentLine {
    let m = r.matrix();
    TangentLine::new(m * l.touch_point(), m * l.direction())
        .expect("rotation preserves the tangent-line invariants")
}

/// Applies an arbitrary orthogonal matrix to a tangent line.
pub(crate) fn transform_line(m: &Mat3, l: &TangentLine) -> TangentLine {
    TangentLine::new(m * l.touch_point(), m * l.direction())
        .expect("orthogonal maps preserve the tangent-line invariants")
}
