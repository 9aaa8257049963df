//! Frenet frames, curvature and torsion of non-lightlike curves, and Sabban
//! frames of curves on the unit spheres.
//!
//! The binormal is `e3 = e1 × e2`. Torsion is `τ = −det(α',α'',α''')/‖α'×α''‖²`;
//! with this pairing the frame obeys
//!
//! ```text
//! e1' = κ e2,  e2' = ε3 κ e1 + τ_f e3,  e3' = ε1 τ_f e2,   τ_f = −ε3 τ
//! ```
//!
//! (derivatives in arc length `s`). `τ_f` is called the frame torsion below.

use std::io::Write;

use serde::Serialize;

use crate::curve::{speeds_of, tangent_character, CurveSamples, ParamKind, Tolerances};
use crate::error::{Error, Result};
use crate::minkowski::{det3, CausalCharacter, MinkowskiVec, UnitSphere};
use crate::stencil;

/// Which member of a pseudo-orthonormal frame is timelike.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CausalCase {
    #[serde(alias = "c")]
    E1,
    #[serde(alias = "t")]
    E2,
    #[serde(alias = "q")]
    E3,
}

impl CausalCase {
    pub fn from_signs(eps: [f64; 3]) -> Option<Self> {
        let neg: Vec<usize> = (0..3).filter(|&i| eps[i] < 0.0).collect();
        match neg.as_slice() {
            [0] => Some(CausalCase::E1),
            [1] => Some(CausalCase::E2),
            [2] => Some(CausalCase::E3),
            _ => None,
        }
    }

    pub fn signs(self) -> [f64; 3] {
        match self {
            CausalCase::E1 => [-1.0, 1.0, 1.0],
            CausalCase::E2 => [1.0, -1.0, 1.0],
            CausalCase::E3 => [1.0, 1.0, -1.0],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CausalCase::E1 => "e1",
            CausalCase::E2 => "e2",
            CausalCase::E3 => "e3",
        }
    }
}

/// Frenet apparatus on the sample grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FrenetData {
    pub params: Vec<f64>,
    pub points: Vec<MinkowskiVec>,
    pub speed: Vec<f64>,
    pub e1: Vec<MinkowskiVec>,
    pub e2: Vec<MinkowskiVec>,
    pub e3: Vec<MinkowskiVec>,
    pub eps: [f64; 3],
    pub kappa: Vec<f64>,
    pub tau: Vec<f64>,
    pub s: Vec<f64>,
    pub sigma: Vec<f64>,
}

impl FrenetData {
    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn case(&self) -> CausalCase {
        CausalCase::from_signs(self.eps).expect("frame has exactly one timelike vector")
    }

    /// Torsion coefficient appearing in the frame equations, `−ε3 τ`.
    pub fn frame_torsion(&self) -> Vec<f64> {
        self.tau.iter().map(|t| -self.eps[2] * t).collect()
    }

    /// `d/ds` of a per-node quantity, through the native parameter.
    pub fn d_ds(&self, values: &[f64]) -> Vec<f64> {
        stencil::differentiate_scalar(&self.params, values, 1)
            .iter()
            .zip(&self.speed)
            .map(|(d, v)| d / v)
            .collect()
    }

    pub(crate) fn d_ds_vec(&self, values: &[MinkowskiVec]) -> Vec<MinkowskiVec> {
        let d = stencil::differentiate(&self.params, values, 1, MinkowskiVec::ZERO, |a, w, v| {
            a + v * w
        });
        d[0].iter().zip(&self.speed).map(|(d, v)| *d / *v).collect()
    }

    /// Writes one row per node: `s, sigma, kappa, tau, e1_*, e2_*, e3_*, eps1..3`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record([
            "s", "sigma", "kappa", "tau", "e1_x0", "e1_x1", "e1_x2", "e2_x0", "e2_x1", "e2_x2",
            "e3_x0", "e3_x1", "e3_x2", "eps1", "eps2", "eps3",
        ])?;
        for i in 0..self.len() {
            let mut row = vec![self.s[i], self.sigma[i], self.kappa[i], self.tau[i]];
            for e in [self.e1[i], self.e2[i], self.e3[i]] {
                row.extend(e.to_array());
            }
            row.extend(self.eps);
            wr.write_record(row.iter().map(|x| format!("{x:?}")))?;
        }
        wr.flush()?;
        Ok(())
    }
}

struct Normals {
    speed: Vec<f64>,
    kappa: Vec<f64>,
    normal: Vec<MinkowskiVec>,
}

fn normals(c: &CurveSamples, tol: &Tolerances) -> Result<Normals> {
    let d = c.derivatives();
    let speed = speeds_of(&d.d1, tol)?;
    let mut kappa = Vec::with_capacity(c.len());
    let mut normal = Vec::with_capacity(c.len());
    for i in 0..c.len() {
        let (v, a) = (d.d1[i], d.d2[i]);
        let n = a - v * (a.inner(v) / v.inner(v));
        let k = n.norm() / (speed[i] * speed[i]);
        if !(k > tol.curvature_floor) {
            return Err(Error::VanishingCurvature(i));
        }
        kappa.push(k);
        normal.push(n);
    }
    Ok(Normals {
        speed,
        kappa,
        normal,
    })
}

/// Curvature `κ = ‖α'×α''‖/‖α'‖³` per node.
pub fn curvature(c: &CurveSamples, tol: &Tolerances) -> Result<Vec<f64>> {
    Ok(normals(c, tol)?.kappa)
}

pub fn frenet_apparatus(c: &CurveSamples, tol: &Tolerances) -> Result<FrenetData> {
    let d = c.derivatives();
    let tc = tangent_character(&d.d1, tol)?;
    let nrm = normals(c, tol)?;
    let n = c.len();
    let mut e1 = Vec::with_capacity(n);
    let mut e2 = Vec::with_capacity(n);
    let mut e3 = Vec::with_capacity(n);
    let mut tau = Vec::with_capacity(n);
    let mut eps2 = None;
    for i in 0..n {
        let u = d.d1[i] / nrm.speed[i];
        let nv = nrm.normal[i];
        let ch = (nv / nv.euclid_norm()).causal_character(tol.lightlike);
        if ch == CausalCharacter::Lightlike {
            return Err(Error::LightlikeNormal(i));
        }
        match eps2 {
            None => eps2 = Some(ch),
            Some(p) if p != ch => return Err(Error::CharacterChange(i)),
            _ => {}
        }
        let v = nv / nv.norm();
        let b = u.cross(v);
        let b = b / b.norm();
        let x = d.d1[i].cross(d.d2[i]);
        tau.push(-det3(d.d1[i], d.d2[i], d.d3[i]) / x.norm_sq().abs());
        e1.push(u);
        e2.push(v);
        e3.push(b);
    }
    let eps1 = tc.sign();
    let eps2 = eps2.map(CausalCharacter::sign).unwrap_or(1.0);
    let eps = [eps1, eps2, -eps1 * eps2];
    // grids start at the curve's own parameter when it already is s or σ
    let offset = |kind: ParamKind| if c.kind() == kind { c.params()[0] } else { 0.0 };
    let s0 = offset(ParamKind::ArcLength);
    let sig0 = offset(ParamKind::SphericalArcLength);
    let s: Vec<f64> = stencil::cumulative_integral(c.params(), &nrm.speed)
        .iter()
        .map(|x| x + s0)
        .collect();
    let rate: Vec<f64> = nrm
        .kappa
        .iter()
        .zip(&nrm.speed)
        .map(|(k, v)| k * v)
        .collect();
    let sigma: Vec<f64> = stencil::cumulative_integral(c.params(), &rate)
        .iter()
        .map(|x| x + sig0)
        .collect();
    Ok(FrenetData {
        params: c.params().to_vec(),
        points: c.points().to_vec(),
        speed: nrm.speed,
        e1,
        e2,
        e3,
        eps,
        kappa: nrm.kappa,
        tau,
        s,
        sigma,
    })
}

/// Outcome of checking the frame against the Frenet–Serret system.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrenetResidual {
    /// Max over nodes of `‖de_i/ds − rhs_i‖` (Euclidean) with frame torsion
    /// `−ε3 τ`.
    pub residual: f64,
    /// Same, with `τ` itself in the torsion slots.
    pub literal_residual: f64,
    pub case: CausalCase,
    /// The coefficient that matched: `"-eps3*tau"` or `"tau"`.
    pub torsion_coefficient: String,
}

fn frenet_rhs(eps: [f64; 3], k: f64, t: f64, e: [MinkowskiVec; 3]) -> [MinkowskiVec; 3] {
    [
        e[1] * k,
        e[0] * (eps[2] * k) + e[2] * t,
        e[1] * (eps[0] * t),
    ]
}

pub fn frenet_residual(fd: &FrenetData) -> FrenetResidual {
    let de = [
        fd.d_ds_vec(&fd.e1),
        fd.d_ds_vec(&fd.e2),
        fd.d_ds_vec(&fd.e3),
    ];
    let tf = fd.frame_torsion();
    let mut res = 0.0f64;
    let mut lit = 0.0f64;
    for i in 0..fd.len() {
        let e = [fd.e1[i], fd.e2[i], fd.e3[i]];
        let a = frenet_rhs(fd.eps, fd.kappa[i], tf[i], e);
        let b = frenet_rhs(fd.eps, fd.kappa[i], fd.tau[i], e);
        for j in 0..3 {
            res = res.max((de[j][i] - a[j]).euclid_norm());
            lit = lit.max((de[j][i] - b[j]).euclid_norm());
        }
    }
    let coeff = if res <= lit { "-eps3*tau" } else { "tau" };
    FrenetResidual {
        residual: res,
        literal_residual: lit,
        case: fd.case(),
        torsion_coefficient: coeff.to_string(),
    }
}

/// Max over nodes of the deviation of `d/dσ (e_i/κ)` from the similarity
/// frame system
///
/// ```text
/// [κ̃ 1 0; ε3 κ̃ τ̃_f; 0 ε1 τ̃_f κ̃] · (e1, e2, e3)/κ,   τ̃_f = τ_f/κ
/// ```
///
/// relative to `max ‖e_i/κ‖`.
pub fn similarity_frame_residual(fd: &FrenetData) -> f64 {
    let n = fd.len();
    let scaled = |e: &[MinkowskiVec]| -> Vec<MinkowskiVec> {
        e.iter().zip(&fd.kappa).map(|(v, k)| *v / *k).collect()
    };
    let f = [scaled(&fd.e1), scaled(&fd.e2), scaled(&fd.e3)];
    // d/dσ = (1/κ) d/ds
    let df: Vec<Vec<MinkowskiVec>> = f
        .iter()
        .map(|x| {
            fd.d_ds_vec(x)
                .iter()
                .zip(&fd.kappa)
                .map(|(d, k)| *d / *k)
                .collect()
        })
        .collect();
    let logk: Vec<f64> = fd.kappa.iter().map(|k| k.ln()).collect();
    let kt: Vec<f64> = fd
        .d_ds(&logk)
        .iter()
        .zip(&fd.kappa)
        .map(|(d, k)| -d / k)
        .collect();
    let tf = fd.frame_torsion();
    let [e1, _, e3] = fd.eps;
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for i in 0..n {
        let tt = tf[i] / fd.kappa[i];
        let rhs = [
            f[0][i] * kt[i] + f[1][i],
            f[0][i] * e3 + f[1][i] * kt[i] + f[2][i] * tt,
            f[1][i] * (e1 * tt) + f[2][i] * kt[i],
        ];
        for j in 0..3 {
            worst = worst.max((df[j][i] - rhs[j]).euclid_norm());
            scale = scale.max(f[j][i].euclid_norm());
        }
    }
    worst / scale.max(f64::MIN_POSITIVE)
}

/// Which member of the Sabban frame `(c, t, q)` is timelike.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SabbanCase {
    /// `t` timelike, curve on `S₁²`.
    T,
    /// `c` timelike, curve on `H₀²`.
    C,
    /// `q` timelike, curve on `S₁²`.
    Q,
}

impl SabbanCase {
    /// Signs `(ε_c, ε_t, ε_q)`.
    pub fn signs(self) -> [f64; 3] {
        match self {
            SabbanCase::T => [1.0, -1.0, 1.0],
            SabbanCase::C => [-1.0, 1.0, 1.0],
            SabbanCase::Q => [1.0, 1.0, -1.0],
        }
    }

    pub fn eps_q(self) -> f64 {
        self.signs()[2]
    }

    pub fn sphere(self) -> UnitSphere {
        match self {
            SabbanCase::C => UnitSphere::Hyperbolic,
            _ => UnitSphere::Lorentzian,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SabbanCase::T => "t",
            SabbanCase::C => "c",
            SabbanCase::Q => "q",
        }
    }

    /// The case of a curve `α` whose tangent indicatrix has Frenet signs
    /// `eps`: `e1 ↦ c`, `e2 ↦ t`, `e3 ↦ q`.
    pub fn from_frenet(case: CausalCase) -> Self {
        match case {
            CausalCase::E1 => SabbanCase::C,
            CausalCase::E2 => SabbanCase::T,
            CausalCase::E3 => SabbanCase::Q,
        }
    }
}

impl std::str::FromStr for SabbanCase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "t" | "e2" => Ok(SabbanCase::T),
            "c" | "e1" => Ok(SabbanCase::C),
            "q" | "e3" => Ok(SabbanCase::Q),
            _ => Err(Error::InvalidInput(format!("unknown causal case '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SabbanData {
    pub sigma: Vec<f64>,
    pub c: Vec<MinkowskiVec>,
    pub t: Vec<MinkowskiVec>,
    pub q: Vec<MinkowskiVec>,
    pub kg: Vec<f64>,
    pub case: SabbanCase,
    /// Max deviation from `d/dσ (c, t, q) = [0 1 0; −ε_c ε_t 0 kg; 0 −ε_q ε_t kg 0]·(c, t, q)`.
    pub residual: f64,
}

pub const SPHERE_TOL: f64 = 1e-6;
pub const UNIT_SPEED_TOL: f64 = 1e-4;

/// Sabban frame `(c, t = dc/dσ, q = c × t)` and geodesic curvature
/// `kg = ε_q det(c, t, dt/dσ)` of a curve on `S₁²` or `H₀²` parametrized by
/// arc length.
pub fn sabban_frame(c: &CurveSamples, tol: &Tolerances) -> Result<SabbanData> {
    let pts = c.points();
    let n0 = pts[0].norm_sq();
    let target = n0.signum();
    for (i, p) in pts.iter().enumerate() {
        let dev = (p.norm_sq() - target).abs();
        if dev > SPHERE_TOL {
            return Err(Error::NotOnSphere {
                node: i,
                deviation: dev,
            });
        }
    }
    let d = c.derivatives();
    let mut t = Vec::with_capacity(c.len());
    for (i, v) in d.d1.iter().enumerate() {
        let sp = v.norm();
        if (sp - 1.0).abs() > UNIT_SPEED_TOL {
            return Err(Error::NotUnitSpeed { node: i, speed: sp });
        }
        t.push(*v);
    }
    let tc = tangent_character(&d.d1, tol)?;
    let case = match (target < 0.0, tc) {
        (true, _) => SabbanCase::C,
        (false, CausalCharacter::Timelike) => SabbanCase::T,
        (false, _) => SabbanCase::Q,
    };
    let [ec, et, eq] = case.signs();
    let q: Vec<MinkowskiVec> = pts.iter().zip(&t).map(|(a, b)| a.cross(*b)).collect();
    let kg: Vec<f64> = (0..c.len())
        .map(|i| eq * det3(pts[i], t[i], d.d2[i]))
        .collect();
    let diff = |x: &[MinkowskiVec]| {
        stencil::differentiate(c.params(), x, 1, MinkowskiVec::ZERO, |a, w, v| a + v * w).remove(0)
    };
    let (dc, dt, dq) = (diff(pts), diff(&t), diff(&q));
    let mut residual = 0.0f64;
    for i in 0..c.len() {
        let r = [
            dc[i] - t[i],
            dt[i] - (pts[i] * (-ec * et) + q[i] * kg[i]),
            dq[i] - t[i] * (-eq * et * kg[i]),
        ];
        for v in r {
            residual = residual.max(v.euclid_norm());
        }
    }
    Ok(SabbanData {
        sigma: c.params().to_vec(),
        c: pts.to_vec(),
        t,
        q,
        kg,
        case,
        residual,
    })
}

/// Unit tangent indicatrix `e1(σ)` of a curve as spherical samples, with the
/// analytic derivative channels dropped.
pub fn tangent_indicatrix(fd: &FrenetData) -> Result<CurveSamples> {
    CurveSamples::build(fd.sigma.clone(), fd.e1.clone(), None, ParamKind::ArcLength)
}
