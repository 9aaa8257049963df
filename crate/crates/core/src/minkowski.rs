//! Lorentzian linear algebra in Minkowski 3-space with signature (−,+,+).
//!
//! Coordinate 0 is the time direction. All causal tests go through
//! [`MinkowskiVec::causal_character`], which uses a tolerance band relative
//! to the Euclidean size of the vector.

use std::ops::{Add, AddAssign, Div, Index, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default relative band for declaring a vector lightlike.
pub const DEFAULT_LIGHTLIKE_TOL: f64 = 1e-10;

/// A vector of E₁³.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct MinkowskiVec {
    pub x0: f64,
    pub x1: f64,
    pub x2: f64,
}

impl From<[f64; 3]> for MinkowskiVec {
    fn from(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }
}

impl From<MinkowskiVec> for [f64; 3] {
    fn from(v: MinkowskiVec) -> Self {
        v.to_array()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CausalCharacter {
    Timelike,
    Spacelike,
    Lightlike,
}

impl CausalCharacter {
    /// Sign of `x·x` for a unit vector of this character.
    pub fn sign(self) -> f64 {
        match self {
            CausalCharacter::Timelike => -1.0,
            _ => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AngleKind {
    Hyperbolic,
    Circular,
    Undefined,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleResult {
    pub value: f64,
    pub kind: AngleKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnitSphere {
    /// H₀², `x·x = −1`.
    Hyperbolic,
    /// S₁², `x·x = 1`.
    Lorentzian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SphereMembership {
    Outside,
    Lorentzian,
    HyperbolicFuture,
    HyperbolicPast,
}

impl SphereMembership {
    pub fn is_member(self) -> bool {
        self != SphereMembership::Outside
    }
}

impl MinkowskiVec {
    pub const ZERO: MinkowskiVec = MinkowskiVec::new(0.0, 0.0, 0.0);

    pub const fn new(x0: f64, x1: f64, x2: f64) -> Self {
        Self { x0, x1, x2 }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x0, self.x1, self.x2]
    }

    /// `−x0·y0 + x1·y1 + x2·y2`.
    pub fn inner(self, o: Self) -> f64 {
        -self.x0 * o.x0 + self.x1 * o.x1 + self.x2 * o.x2
    }

    pub fn norm_sq(self) -> f64 {
        self.inner(self)
    }

    /// `sqrt(|x·x|)`; zero for null vectors.
    pub fn norm(self) -> f64 {
        self.norm_sq().abs().sqrt()
    }

    pub fn euclid_dot(self, o: Self) -> f64 {
        self.x0 * o.x0 + self.x1 * o.x1 + self.x2 * o.x2
    }

    pub fn euclid_norm(self) -> f64 {
        self.euclid_dot(self).sqrt()
    }

    /// Lorentzian vector product: the determinant with first row (−i, j, k).
    ///
    /// Satisfies `inner(x×y, x) = inner(x×y, y) = 0` and
    /// `det(x, y, z) = inner(x×y, z)`.
    pub fn cross(self, o: Self) -> Self {
        Self::new(
            -(self.x1 * o.x2 - self.x2 * o.x1),
            self.x2 * o.x0 - self.x0 * o.x2,
            self.x0 * o.x1 - self.x1 * o.x0,
        )
    }

    pub fn causal_character(self, tol: f64) -> CausalCharacter {
        if self == Self::ZERO {
            return CausalCharacter::Spacelike;
        }
        let q = self.norm_sq();
        let scale = 1.0 + self.euclid_dot(self);
        if q.abs() <= tol * scale {
            CausalCharacter::Lightlike
        } else if q < 0.0 {
            CausalCharacter::Timelike
        } else {
            CausalCharacter::Spacelike
        }
    }

    pub fn is_future_pointing(self) -> bool {
        self.x0 > 0.0
    }

    /// Rescales to `x·x = ±1`. Fails on null or zero input.
    pub fn normalized(self) -> Result<Self> {
        let n = self.norm();
        if n <= f64::MIN_POSITIVE || n <= 1e-300 {
            return Err(Error::NullInput);
        }
        Ok(self / n)
    }

    pub fn on_unit_sphere(self, which: UnitSphere, tol: f64) -> SphereMembership {
        let q = self.norm_sq();
        match which {
            UnitSphere::Lorentzian if (q - 1.0).abs() <= tol => SphereMembership::Lorentzian,
            UnitSphere::Hyperbolic if (q + 1.0).abs() <= tol => {
                if self.is_future_pointing() {
                    SphereMembership::HyperbolicFuture
                } else {
                    SphereMembership::HyperbolicPast
                }
            }
            _ => SphereMembership::Outside,
        }
    }

    pub fn max_abs(self) -> f64 {
        self.x0.abs().max(self.x1.abs()).max(self.x2.abs())
    }
}

/// `det[x; y; z]` with the vectors as rows.
pub fn det3(x: MinkowskiVec, y: MinkowskiVec, z: MinkowskiVec) -> f64 {
    x.x0 * (y.x1 * z.x2 - y.x2 * z.x1) - x.x1 * (y.x0 * z.x2 - y.x2 * z.x0)
        + x.x2 * (y.x0 * z.x1 - y.x1 * z.x0)
}

pub fn inner(x: MinkowskiVec, y: MinkowskiVec) -> f64 {
    x.inner(y)
}

pub fn norm(x: MinkowskiVec) -> f64 {
    x.norm()
}

pub fn cross(x: MinkowskiVec, y: MinkowskiVec) -> MinkowskiVec {
    x.cross(y)
}

/// Angle between two non-null vectors, dispatching on the causal cases of
/// the classical timelike/spacelike angle theorem.
///
/// Mixed timelike/spacelike pairs and timelike pairs of opposite time
/// orientation have no defined angle and come back as `Undefined`, as does
/// the spacelike case `|x·y| = ‖x‖‖y‖` (within `tol` relative) unless the
/// two vectors are parallel, where the angle is 0 or π.
pub fn angle_between(x: MinkowskiVec, y: MinkowskiVec, tol: f64) -> Result<AngleResult> {
    let cx = x.causal_character(tol);
    let cy = y.causal_character(tol);
    if x == MinkowskiVec::ZERO
        || y == MinkowskiVec::ZERO
        || cx == CausalCharacter::Lightlike
        || cy == CausalCharacter::Lightlike
    {
        return Err(Error::NullInput);
    }
    let undefined = AngleResult {
        value: f64::NAN,
        kind: AngleKind::Undefined,
    };
    let nn = x.norm() * y.norm();
    let ip = x.inner(y);
    match (cx, cy) {
        (CausalCharacter::Timelike, CausalCharacter::Timelike) => {
            if x.is_future_pointing() != y.is_future_pointing() {
                return Ok(undefined);
            }
            Ok(AngleResult {
                value: hyperbolic_angle((-ip / nn).max(1.0), x.cross(y).norm() / nn),
                kind: AngleKind::Hyperbolic,
            })
        }
        (CausalCharacter::Spacelike, CausalCharacter::Spacelike) => {
            let r = ip.abs() / nn;
            let parallel = x.cross(y).euclid_norm() <= tol * x.euclid_norm() * y.euclid_norm();
            if parallel {
                Ok(AngleResult {
                    value: if ip > 0.0 { 0.0 } else { std::f64::consts::PI },
                    kind: AngleKind::Circular,
                })
            } else if (r - 1.0).abs() <= tol {
                Ok(undefined)
            } else if r < 1.0 {
                Ok(AngleResult {
                    value: (x.cross(y).norm() / nn).atan2(ip / nn),
                    kind: AngleKind::Circular,
                })
            } else {
                Ok(AngleResult {
                    value: hyperbolic_angle(r, x.cross(y).norm() / nn),
                    kind: AngleKind::Hyperbolic,
                })
            }
        }
        _ => Ok(undefined),
    }
}

/// θ from `cosh θ` and `sinh θ`; acosh loses digits near 1.
fn hyperbolic_angle(cosh: f64, sinh: f64) -> f64 {
    if cosh < 2.0 {
        sinh.asinh()
    } else {
        cosh.acosh()
    }
}

impl Add for MinkowskiVec {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x0 + o.x0, self.x1 + o.x1, self.x2 + o.x2)
    }
}

impl AddAssign for MinkowskiVec {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Sub for MinkowskiVec {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x0 - o.x0, self.x1 - o.x1, self.x2 - o.x2)
    }
}

impl SubAssign for MinkowskiVec {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl Neg for MinkowskiVec {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x0, -self.x1, -self.x2)
    }
}

impl Mul<f64> for MinkowskiVec {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::new(self.x0 * s, self.x1 * s, self.x2 * s)
    }
}

impl Mul<MinkowskiVec> for f64 {
    type Output = MinkowskiVec;
    fn mul(self, v: MinkowskiVec) -> MinkowskiVec {
        v * self
    }
}

impl Div<f64> for MinkowskiVec {
    type Output = Self;
    fn div(self, s: f64) -> Self {
        Self::new(self.x0 / s, self.x1 / s, self.x2 / s)
    }
}

impl Index<usize> for MinkowskiVec {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        match i {
            0 => &self.x0,
            1 => &self.x1,
            2 => &self.x2,
            _ => panic!("MinkowskiVec index {i} out of range"),
        }
    }
}

/// A 3×3 real matrix acting on column vectors.
pub type Mat3 = [[f64; 3]; 3];

pub fn mat_apply(m: &Mat3, v: MinkowskiVec) -> MinkowskiVec {
    MinkowskiVec::new(
        m[0][0] * v.x0 + m[0][1] * v.x1 + m[0][2] * v.x2,
        m[1][0] * v.x0 + m[1][1] * v.x1 + m[1][2] * v.x2,
        m[2][0] * v.x0 + m[2][1] * v.x1 + m[2][2] * v.x2,
    )
}

pub fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn mat_transpose(a: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[j][i];
        }
    }
    out
}

pub fn mat_det(m: &Mat3) -> f64 {
    det3(m[0].into(), m[1].into(), m[2].into())
}

pub const SIGNATURE: Mat3 = [[-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
