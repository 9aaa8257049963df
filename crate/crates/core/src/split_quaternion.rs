//! Split quaternions and the p-similarity group `f(r) = μ q r q⁻¹ + b`.
//!
//! Multiplication table: `i² = −1`, `j² = k² = 1`, `ij = −ji = k`,
//! `jk = −kj = −i`, `ki = −ik = j`. The norm form is
//! `N(q) = w² + x² − y² − z²`. Minkowski vectors embed as pure split
//! quaternions `(x0, x1, x2) ↦ x0·i + x1·j + x2·k`, so that
//! `N(r) = −inner(r, r)` and conjugation by a unit timelike `q` is a
//! Lorentz transformation.

use std::ops::{Add, Mul, Neg, Sub};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::minkowski::{mat_det, Mat3, MinkowskiVec};

const DEGENERATE_NORM: f64 = 1e-14;
const UNIT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct SplitQuaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl From<[f64; 4]> for SplitQuaternion {
    fn from(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }
}

impl From<SplitQuaternion> for [f64; 4] {
    fn from(q: SplitQuaternion) -> Self {
        [q.w, q.x, q.y, q.z]
    }
}

impl SplitQuaternion {
    pub const ONE: SplitQuaternion = SplitQuaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: SplitQuaternion = SplitQuaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: SplitQuaternion = SplitQuaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: SplitQuaternion = SplitQuaternion::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    pub fn pure(v: MinkowskiVec) -> Self {
        Self::new(0.0, v.x0, v.x1, v.x2)
    }

    pub fn vector_part(self) -> MinkowskiVec {
        MinkowskiVec::new(self.x, self.y, self.z)
    }

    pub fn norm_form(self) -> f64 {
        self.w * self.w + self.x * self.x - self.y * self.y - self.z * self.z
    }

    pub fn conjugate(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    pub fn inverse(self) -> Result<Self> {
        let n = self.norm_form();
        if n.abs() <= DEGENERATE_NORM {
            return Err(Error::DegenerateQuaternion(n));
        }
        Ok(self.conjugate().scale(1.0 / n))
    }

    /// Rescales a timelike quaternion to `N(q) = 1`.
    pub fn to_unit_timelike(self) -> Result<Self> {
        let n = self.norm_form();
        if n <= DEGENERATE_NORM {
            return Err(Error::NotUnitTimelike(n));
        }
        Ok(self.scale(1.0 / n.sqrt()))
    }

    /// `q r q⁻¹` for a unit timelike `q`.
    pub fn rotate(self, r: MinkowskiVec) -> Result<MinkowskiVec> {
        let n = self.norm_form();
        if (n - 1.0).abs() > UNIT_TOL {
            return Err(Error::NotUnitTimelike(n));
        }
        Ok(self.rotate_unchecked(r))
    }

    fn rotate_unchecked(self, r: MinkowskiVec) -> MinkowskiVec {
        (self * SplitQuaternion::pure(r) * self.conjugate().scale(1.0 / self.norm_form()))
            .vector_part()
    }

    /// Matrix of `r ↦ q r q⁻¹` on the standard basis (columns are images).
    pub fn rotation_matrix(self) -> Mat3 {
        let cols = [
            self.rotate_unchecked(MinkowskiVec::new(1.0, 0.0, 0.0)),
            self.rotate_unchecked(MinkowskiVec::new(0.0, 1.0, 0.0)),
            self.rotate_unchecked(MinkowskiVec::new(0.0, 0.0, 1.0)),
        ];
        let mut m = [[0.0; 3]; 3];
        for (j, c) in cols.iter().enumerate() {
            for i in 0..3 {
                m[i][j] = c[i];
            }
        }
        m
    }

    /// Recovers a unit timelike `q` with `R_q = m`, or `None` when `m` is not in
    /// the image of the conjugation action (the identity component of the
    /// Lorentz group).
    ///
    /// Solves the intertwining system `q·e_k = (m e_k)·q` for `k = 0, 1, 2`,
    /// a homogeneous 12×4 linear system whose null direction is `q`.
    pub fn from_rotation_matrix(m: &Mat3) -> Option<Self> {
        let basis = [Self::I, Self::J, Self::K];
        let mut rows = Vec::with_capacity(12);
        for (k, ek) in basis.iter().enumerate() {
            let img = Self::new(0.0, m[0][k], m[1][k], m[2][k]);
            // columns: coefficient of each q basis element
            let mut block = [[0.0; 4]; 4];
            for (c, qb) in [Self::ONE, Self::I, Self::J, Self::K].iter().enumerate() {
                let d = *qb * *ek - img * *qb;
                block[0][c] = d.w;
                block[1][c] = d.x;
                block[2][c] = d.y;
                block[3][c] = d.z;
            }
            rows.extend_from_slice(&block);
        }
        let a = nalgebra::DMatrix::from_fn(12, 4, |i, j| rows[i][j]);
        let svd = nalgebra::linalg::SVD::new(a, false, true);
        let vt = svd.v_t?;
        let (imin, _) = svd
            .singular_values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))?;
        let q = Self::new(vt[(imin, 0)], vt[(imin, 1)], vt[(imin, 2)], vt[(imin, 3)]);
        let q = q.to_unit_timelike().ok()?;
        let back = q.rotation_matrix();
        let err = (0..3)
            .flat_map(|i| (0..3).map(move |j| (i, j)))
            .map(|(i, j)| (back[i][j] - m[i][j]).abs())
            .fold(0.0, f64::max);
        let scale = m.iter().flatten().fold(1.0f64, |acc, v| acc.max(v.abs()));
        if err <= 1e-8 * scale {
            Some(q)
        } else {
            None
        }
    }
}

impl Mul for SplitQuaternion {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        let a = self;
        Self::new(
            a.w * b.w - a.x * b.x + a.y * b.y + a.z * b.z,
            a.w * b.x + a.x * b.w - a.y * b.z + a.z * b.y,
            a.w * b.y + a.y * b.w + a.z * b.x - a.x * b.z,
            a.w * b.z + a.z * b.w + a.x * b.y - a.y * b.x,
        )
    }
}

impl Add for SplitQuaternion {
    type Output = Self;
    fn add(self, b: Self) -> Self {
        Self::new(self.w + b.w, self.x + b.x, self.y + b.y, self.z + b.z)
    }
}

impl Sub for SplitQuaternion {
    type Output = Self;
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Neg for SplitQuaternion {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

pub fn sq_mul(p: SplitQuaternion, q: SplitQuaternion) -> SplitQuaternion {
    p * q
}

pub fn sq_inverse(q: SplitQuaternion) -> Result<SplitQuaternion> {
    q.inverse()
}

pub fn rotate(q: SplitQuaternion, r: MinkowskiVec) -> Result<MinkowskiVec> {
    q.rotate(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    Preserving,
    Reversing,
}

impl Orientation {
    pub fn of_determinant(det: f64) -> Self {
        if det >= 0.0 {
            Orientation::Preserving
        } else {
            Orientation::Reversing
        }
    }
}

/// A p-similarity `r ↦ μ q r q⁻¹ + b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PSimilarity {
    pub mu: f64,
    pub q: SplitQuaternion,
    pub b: MinkowskiVec,
}

impl PSimilarity {
    pub const IDENTITY: PSimilarity = PSimilarity {
        mu: 1.0,
        q: SplitQuaternion::ONE,
        b: MinkowskiVec::ZERO,
    };

    pub fn new(mu: f64, q: SplitQuaternion, b: MinkowskiVec) -> Result<Self> {
        let f = Self { mu, q, b };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        if self.mu == 0.0 || !self.mu.is_finite() {
            return Err(Error::ZeroScale);
        }
        let n = self.q.norm_form();
        if (n - 1.0).abs() > 1e-10 {
            return Err(Error::NotUnitTimelike(n));
        }
        Ok(())
    }

    pub fn apply(&self, p: MinkowskiVec) -> Result<MinkowskiVec> {
        Ok(self.linear(p)? + self.b)
    }

    /// The linear part `μ q r q⁻¹`.
    pub fn linear(&self, u: MinkowskiVec) -> Result<MinkowskiVec> {
        Ok(self.q.rotate(u)? * self.mu)
    }

    /// Matrix of the linear part.
    pub fn linear_matrix(&self) -> Mat3 {
        let mut m = self.q.rotation_matrix();
        for row in m.iter_mut() {
            for v in row.iter_mut() {
                *v *= self.mu;
            }
        }
        m
    }

    pub fn ratio(&self) -> f64 {
        self.mu.abs()
    }

    /// Sign of the determinant of the linear part.
    pub fn orientation(&self) -> Orientation {
        Orientation::of_determinant(mat_det(&self.linear_matrix()))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &PSimilarity) -> Result<PSimilarity> {
        let q = (self.q * other.q).to_unit_timelike()?;
        Ok(PSimilarity {
            mu: self.mu * other.mu,
            q,
            b: self.linear(other.b)? + self.b,
        })
    }

    pub fn inverse(&self) -> Result<PSimilarity> {
        let qi = self.q.inverse()?.to_unit_timelike()?;
        let mu = 1.0 / self.mu;
        let b = -(qi.rotate(self.b)? * mu);
        Ok(PSimilarity { mu, q: qi, b })
    }

    /// Deterministic sample with `μ` uniform in `mu_range`, a unit timelike
    /// `q` whose boost part is bounded, and `b` uniform in `[−1, 1]³`.
    pub fn random(seed: u64, mu_range: (f64, f64)) -> PSimilarity {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random_with(&mut rng, mu_range)
    }

    pub fn random_with<R: Rng>(rng: &mut R, mu_range: (f64, f64)) -> PSimilarity {
        let mu = if mu_range.0 < mu_range.1 {
            rng.gen_range(mu_range.0..mu_range.1)
        } else {
            mu_range.0
        };
        let y: f64 = rng.gen_range(-0.6..0.6);
        let z: f64 = rng.gen_range(-0.6..0.6);
        let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let rho = (1.0 + y * y + z * z).sqrt();
        let q = SplitQuaternion::new(rho * theta.cos(), rho * theta.sin(), y, z);
        let q = q
            .to_unit_timelike()
            .expect("sampled quaternion is timelike");
        let b = MinkowskiVec::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        PSimilarity { mu, q, b }
    }
}

pub fn random_psimilarity(seed: u64, mu_range: (f64, f64)) -> PSimilarity {
    PSimilarity::random(seed, mu_range)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minkowski::{angle_between, AngleKind, UnitSphere};
    use rand::Rng;

    fn rand_vec<R: Rng>(rng: &mut R) -> MinkowskiVec {
        MinkowskiVec::new(
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
        )
    }

    fn rand_q<R: Rng>(rng: &mut R) -> SplitQuaternion {
        SplitQuaternion::new(
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
        )
    }

    fn close(a: MinkowskiVec, b: MinkowskiVec, tol: f64) -> bool {
        (a - b).max_abs() <= tol * (1.0 + b.max_abs())
    }

    #[test]
    fn multiplication_table() {
        let q = SplitQuaternion::new(0.3, -1.0, 2.0, 0.5);
        assert_eq!(SplitQuaternion::ONE * q, q);
        assert_eq!(SplitQuaternion::I * SplitQuaternion::J, SplitQuaternion::K);
        assert_eq!(
            SplitQuaternion::J * SplitQuaternion::J,
            SplitQuaternion::ONE
        );
        assert_eq!(
            SplitQuaternion::K * SplitQuaternion::K,
            SplitQuaternion::ONE
        );
        assert_eq!(
            SplitQuaternion::I * SplitQuaternion::I,
            -SplitQuaternion::ONE
        );
        assert_eq!(SplitQuaternion::J * SplitQuaternion::K, -SplitQuaternion::I);
        assert_eq!(SplitQuaternion::K * SplitQuaternion::I, SplitQuaternion::J);
        assert_eq!(SplitQuaternion::J * SplitQuaternion::I, -SplitQuaternion::K);
    }

    #[test]
    fn associative_and_norm_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let (a, b, c) = (rand_q(&mut rng), rand_q(&mut rng), rand_q(&mut rng));
            let l = (a * b) * c;
            let r = a * (b * c);
            for (x, y) in [(l.w, r.w), (l.x, r.x), (l.y, r.y), (l.z, r.z)] {
                assert!((x - y).abs() < 1e-10);
            }
            let np = (a * b).norm_form();
            let nn = a.norm_form() * b.norm_form();
            assert!((np - nn).abs() <= 1e-10 * (1.0 + nn.abs()));
        }
    }

    #[test]
    fn inverse_cases() {
        assert_eq!(
            sq_inverse(SplitQuaternion::ONE).unwrap(),
            SplitQuaternion::ONE
        );
        let q = PSimilarity::random(5, (1.0, 1.0)).q;
        let qi = q.inverse().unwrap();
        let c = q.conjugate();
        assert!((qi.w - c.w).abs() < 1e-12 && (qi.x - c.x).abs() < 1e-12);
        let p = q * qi;
        assert!((p.w - 1.0).abs() < 1e-10 && p.x.abs() < 1e-10 && p.y.abs() < 1e-10);
        let null = SplitQuaternion::new(1.0, 0.0, 1.0, 0.0);
        assert!(matches!(
            null.inverse(),
            Err(Error::DegenerateQuaternion(_))
        ));
    }

    #[test]
    fn rotation_preserves_inner_and_stays_pure() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..1000 {
            let q = PSimilarity::random_with(&mut rng, (1.0, 2.0)).q;
            let r = rand_vec(&mut rng);
            let full = q * SplitQuaternion::pure(r) * q.inverse().unwrap();
            assert!(full.w.abs() < 1e-10);
            let rr = q.rotate(r).unwrap();
            assert!((rr.norm_sq() - r.norm_sq()).abs() <= 1e-9 * (1.0 + r.euclid_dot(r)));
        }
        let r = MinkowskiVec::new(0.2, 0.3, -0.7);
        assert_eq!(SplitQuaternion::ONE.rotate(r).unwrap(), r);
        let spacelike = SplitQuaternion::new(0.0, 0.0, 1.0, 0.0);
        assert!(matches!(
            spacelike.rotate(r),
            Err(Error::NotUnitTimelike(_))
        ));
    }

    #[test]
    fn rotation_maps_unit_spheres_to_themselves() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..200 {
            let q = PSimilarity::random_with(&mut rng, (1.0, 2.0)).q;
            let t: f64 = rng.gen_range(-2.0..2.0);
            let u: f64 = rng.gen_range(0.0..6.0);
            let h = MinkowskiVec::new(t.cosh(), t.sinh() * u.cos(), t.sinh() * u.sin());
            let s = MinkowskiVec::new(t.sinh(), t.cosh() * u.cos(), t.cosh() * u.sin());
            assert!(q
                .rotate(h)
                .unwrap()
                .on_unit_sphere(UnitSphere::Hyperbolic, 1e-9)
                .is_member());
            assert!(q
                .rotate(s)
                .unwrap()
                .on_unit_sphere(UnitSphere::Lorentzian, 1e-9)
                .is_member());
        }
    }

    #[test]
    fn apply_examples() {
        let p = MinkowskiVec::new(0.4, -1.0, 3.0);
        assert_eq!(PSimilarity::IDENTITY.apply(p).unwrap(), p);
        let f =
            PSimilarity::new(2.0, SplitQuaternion::ONE, MinkowskiVec::new(1.0, 0.0, 0.0)).unwrap();
        assert_eq!(
            f.apply(MinkowskiVec::new(0.0, 1.0, 0.0)).unwrap(),
            MinkowskiVec::new(1.0, 2.0, 0.0)
        );
    }

    #[test]
    fn similarity_ratio_and_causal_preservation() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..500 {
            let f = PSimilarity::random_with(&mut rng, (0.5, 2.0));
            let (u, v) = (rand_vec(&mut rng), rand_vec(&mut rng));
            let d = u - v;
            let fd = f.apply(u).unwrap() - f.apply(v).unwrap();
            if d.norm_sq().abs() > 1e-6 {
                let ratio = fd.norm() / d.norm();
                assert!((ratio - f.mu.abs()).abs() <= 1e-9 * f.mu.abs().max(1.0));
                assert_eq!(fd.norm_sq().signum(), d.norm_sq().signum());
            }
        }
    }

    #[test]
    fn compose_and_inverse_laws() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..100 {
            let f = PSimilarity::random_with(&mut rng, (0.5, 2.0));
            let g = PSimilarity::random_with(&mut rng, (0.5, 2.0));
            let h = PSimilarity::random_with(&mut rng, (0.5, 2.0));
            let fg = f.compose(&g).unwrap();
            let p = rand_vec(&mut rng);
            assert!(close(
                fg.apply(p).unwrap(),
                f.apply(g.apply(p).unwrap()).unwrap(),
                1e-9
            ));
            assert!((fg.mu - f.mu * g.mu).abs() < 1e-12);

            let l = f.compose(&g).unwrap().compose(&h).unwrap();
            let r = f.compose(&g.compose(&h).unwrap()).unwrap();
            assert!(close(l.apply(p).unwrap(), r.apply(p).unwrap(), 1e-9));

            let id = f.compose(&f.inverse().unwrap()).unwrap();
            assert!(close(id.apply(p).unwrap(), p, 1e-9));
            let back = f.inverse().unwrap().apply(f.apply(p).unwrap()).unwrap();
            assert!(close(back, p, 1e-9));

            let ff = f.inverse().unwrap().inverse().unwrap();
            assert!((ff.mu - f.mu).abs() < 1e-10);
            assert!(close(ff.b, f.b, 1e-10));
            // q and −q are the same rotation
            let s = if ff.q.w * f.q.w + ff.q.x * f.q.x >= 0.0 {
                1.0
            } else {
                -1.0
            };
            assert!((ff.q.w * s - f.q.w).abs() < 1e-10 && (ff.q.z * s - f.q.z).abs() < 1e-10);

            let fi = f.compose(&PSimilarity::IDENTITY).unwrap();
            assert!(close(fi.apply(p).unwrap(), f.apply(p).unwrap(), 1e-12));
        }
        let ii = PSimilarity::IDENTITY.inverse().unwrap();
        assert_eq!(ii.mu, 1.0);
        assert_eq!(ii.b, MinkowskiVec::ZERO);
    }

    #[test]
    fn random_sampler_contract() {
        assert_eq!(
            PSimilarity::random(42, (0.5, 2.0)),
            PSimilarity::random(42, (0.5, 2.0))
        );
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let f = PSimilarity::random_with(&mut rng, (0.5, 2.0));
            assert!((f.q.norm_form() - 1.0).abs() < 1e-10);
            assert!((0.5..2.0).contains(&f.mu));
            assert_eq!(f.orientation(), Orientation::Preserving);
        }
        let mut f = PSimilarity::random(3, (0.5, 2.0));
        f.mu = -f.mu;
        assert_eq!(f.orientation(), Orientation::Reversing);
    }

    #[test]
    fn angles_preserved_by_linear_part() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..300 {
            let f = PSimilarity::random_with(&mut rng, (0.5, 2.0));
            let (u, v) = (rand_vec(&mut rng), rand_vec(&mut rng));
            let (Ok(a), Ok(b)) = (
                angle_between(u, v, 1e-10),
                angle_between(f.linear(u).unwrap(), f.linear(v).unwrap(), 1e-10),
            ) else {
                continue;
            };
            assert_eq!(a.kind, b.kind);
            if a.kind != AngleKind::Undefined {
                assert!((a.value - b.value).abs() < 1e-9 * (1.0 + a.value));
            }
        }
    }

    #[test]
    fn quaternion_round_trips_through_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..200 {
            let q = PSimilarity::random_with(&mut rng, (1.0, 2.0)).q;
            let m = q.rotation_matrix();
            let back = SplitQuaternion::from_rotation_matrix(&m).expect("representable");
            let mb = back.rotation_matrix();
            for i in 0..3 {
                for j in 0..3 {
                    assert!((m[i][j] - mb[i][j]).abs() < 1e-9);
                }
            }
            assert!((mat_det(&m) - 1.0).abs() < 1e-9);
            assert!(m[0][0] >= 1.0 - 1e-12);
        }
        // spatial reflection has det −1 and is not a conjugation
        let refl = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, -1.0]];
        assert!(SplitQuaternion::from_rotation_matrix(&refl).is_none());
    }
}
