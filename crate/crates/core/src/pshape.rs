//! p-shape curvature and torsion, `κ̃ = −dκ/(κ dσ)` and `τ̃ = τ/κ`, and the
//! focal curvatures of the osculating sphere.

use serde::{Deserialize, Serialize};

use crate::curve::{speeds_of, CurveSamples, Tolerances};
use crate::error::{Error, Result};
use crate::frenet::{frenet_apparatus, CausalCase, FrenetData};
use crate::minkowski::{det3, MinkowskiVec};
use crate::stencil;

/// Osculating plane counts as degenerate below this `‖α_σ × α_σσ‖`.
pub const OSCULATING_FLOOR: f64 = 1e-10;
pub const TORSION_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PShapeSource {
    FromFrenet,
    FromDerivatives,
    #[default]
    Prescribed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PShapeProfile {
    pub sigma: Vec<f64>,
    pub kappa_tilde: Vec<f64>,
    pub tau_tilde: Vec<f64>,
    pub causal_case: CausalCase,
    pub source: PShapeSource,
}

#[derive(Serialize, Deserialize)]
struct ProfileJson {
    causal_case: CausalCase,
    samples: Vec<[f64; 3]>,
}

impl PShapeProfile {
    pub fn new(
        sigma: Vec<f64>,
        kappa_tilde: Vec<f64>,
        tau_tilde: Vec<f64>,
        causal_case: CausalCase,
        source: PShapeSource,
    ) -> Result<Self> {
        let n = sigma.len();
        for len in [kappa_tilde.len(), tau_tilde.len()] {
            if len != n {
                return Err(Error::ChannelLength {
                    expected: n,
                    got: len,
                });
            }
        }
        if n < 2 {
            return Err(Error::GridTooCoarse(n));
        }
        if let Some(i) = sigma.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::NonMonotoneGrid(i + 1));
        }
        let all = sigma.iter().chain(&kappa_tilde).chain(&tau_tilde);
        if all.clone().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(
                "p-shape profile has non-finite values".into(),
            ));
        }
        Ok(Self {
            sigma,
            kappa_tilde,
            tau_tilde,
            causal_case,
            source,
        })
    }

    pub fn len(&self) -> usize {
        self.sigma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma.is_empty()
    }

    pub fn range(&self) -> (f64, f64) {
        (self.sigma[0], self.sigma[self.len() - 1])
    }

    /// Cubic interpolation of `(κ̃, τ̃)` at `s`.
    pub fn at(&self, s: f64) -> (f64, f64) {
        (
            stencil::cubic_interp(&self.sigma, &self.kappa_tilde, s),
            stencil::cubic_interp(&self.sigma, &self.tau_tilde, s),
        )
    }

    /// Copy with `τ̃ ↦ −τ̃`.
    pub fn flipped(&self) -> Self {
        let mut p = self.clone();
        p.tau_tilde.iter_mut().for_each(|t| *t = -*t);
        p
    }

    pub fn to_json(&self) -> serde_json::Value {
        let samples: Vec<[f64; 3]> = (0..self.len())
            .map(|i| [self.sigma[i], self.kappa_tilde[i], self.tau_tilde[i]])
            .collect();
        serde_json::to_value(ProfileJson {
            causal_case: self.causal_case,
            samples,
        })
        .expect("profile serializes")
    }

    pub fn from_json(v: serde_json::Value) -> Result<Self> {
        let p: ProfileJson = serde_json::from_value(v)?;
        let (mut s, mut k, mut t) = (vec![], vec![], vec![]);
        for [a, b, c] in p.samples {
            s.push(a);
            k.push(b);
            t.push(c);
        }
        Self::new(s, k, t, p.causal_case, PShapeSource::Prescribed)
    }
}

/// p-shape from a Frenet apparatus: `κ̃ = −d(log κ)/dσ` by finite
/// differences, `τ̃ = τ/κ` pointwise.
pub fn pshape_from_frenet(fd: &FrenetData) -> Result<PShapeProfile> {
    let logk: Vec<f64> = fd.kappa.iter().map(|k| k.ln()).collect();
    let dlog = stencil::differentiate_scalar(&fd.params, &logk, 1);
    let kt = (0..fd.len())
        .map(|i| -dlog[i] / (fd.kappa[i] * fd.speed[i]))
        .collect();
    let tt = fd.tau.iter().zip(&fd.kappa).map(|(t, k)| t / k).collect();
    PShapeProfile::new(
        fd.sigma.clone(),
        kt,
        tt,
        fd.case(),
        PShapeSource::FromFrenet,
    )
}

pub fn pshape_of(c: &CurveSamples, tol: &Tolerances) -> Result<PShapeProfile> {
    pshape_from_frenet(&frenet_apparatus(c, tol)?)
}

/// p-shape straight from derivatives of orders 1..3.
///
/// For a σ-parametrized curve this is
/// `κ̃ = (α''·α')/(α'·α')`, `τ̃ = −det(α',α'',α''')‖α'‖³/‖α'×α''‖³`;
/// other parametrizations go through the chain rule with
/// `dσ/dt = ‖α'×α''‖/‖α'‖²`.
pub fn pshape_from_derivatives(c: &CurveSamples, tol: &Tolerances) -> Result<PShapeProfile> {
    let fd = frenet_apparatus(c, tol)?;
    let d = c.derivatives();
    speeds_of(&d.d1, tol)?;
    let n = c.len();
    let mut kt = Vec::with_capacity(n);
    let mut tt = Vec::with_capacity(n);
    for i in 0..n {
        let (v, a, j) = (d.d1[i], d.d2[i], d.d3[i]);
        let x = v.cross(a);
        let xx = x.inner(x);
        let nn = xx.abs().sqrt();
        let vv = v.inner(v);
        let dd = vv.abs();
        let st = nn / dd;
        if nn / st.powi(3) < OSCULATING_FLOOR {
            return Err(Error::DegenerateOsculating(i));
        }
        let xt = v.cross(j);
        let nt = xx.signum() * x.inner(xt) / nn;
        let dt = 2.0 * vv.signum() * v.inner(a);
        let stt = nt / dd - nn * dt / (dd * dd);
        kt.push(a.inner(v) / (vv * st) - stt / (st * st));
        tt.push(-det3(v, a, j) * dd.powf(1.5) / nn.powi(3));
    }
    let case = fd.case();
    PShapeProfile::new(fd.sigma, kt, tt, case, PShapeSource::FromDerivatives)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FocalData {
    pub m1: Vec<f64>,
    pub m2: Vec<f64>,
    pub center: Vec<MinkowskiVec>,
    /// `‖γ − α‖`.
    pub radius: Vec<f64>,
    /// `sqrt|ε2/κ² + ε3 (κ'/(κ² τ_f))²|`, kept for comparison.
    pub radius_formula: Vec<f64>,
}

/// Focal curvatures `m1 = ε1ε2/κ`, `m2 = (ε1ε3/κ)'/τ_f` and the osculating
/// sphere `γ = α + m1 e2 + m2 e3`, with `τ_f` the frame torsion.
pub fn focal_data(fd: &FrenetData) -> Result<FocalData> {
    if let Some(i) = fd.tau.iter().position(|t| t.abs() < TORSION_FLOOR) {
        return Err(Error::VanishingTorsion(i));
    }
    let [e1, e2, e3] = fd.eps;
    let tf = fd.frame_torsion();
    let m1: Vec<f64> = fd.kappa.iter().map(|k| e1 * e2 / k).collect();
    let inv: Vec<f64> = fd.kappa.iter().map(|k| e1 * e3 / k).collect();
    let dinv = fd.d_ds(&inv);
    let dk = fd.d_ds(&fd.kappa);
    let m2: Vec<f64> = dinv.iter().zip(&tf).map(|(d, t)| d / t).collect();
    let mut center = Vec::with_capacity(fd.len());
    let mut radius = Vec::with_capacity(fd.len());
    let mut radius_formula = Vec::with_capacity(fd.len());
    for i in 0..fd.len() {
        let off = fd.e2[i] * m1[i] + fd.e3[i] * m2[i];
        center.push(fd.points[i] + off);
        radius.push(off.norm());
        let k = fd.kappa[i];
        let r = dk[i] / (k * k * tf[i]);
        radius_formula.push((e2 / (k * k) + e3 * r * r).abs().sqrt());
    }
    Ok(FocalData {
        m1,
        m2,
        center,
        radius,
        radius_formula,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropositionReport {
    /// `max |κ̃ − ε1ε2 m1'|`.
    pub kappa_residual: f64,
    /// `max |τ̃_f − ε1ε3 m1' m1/m2|` over nodes where `m2` is not negligible,
    /// with `τ̃_f = −ε3 τ̃`.
    pub tau_residual: f64,
    /// Nodes left out of the torsion identity (there `m1' = m2 = 0`).
    pub skipped: usize,
}

pub fn proposition_check(fd: &FrenetData) -> Result<PropositionReport> {
    let focal = focal_data(fd)?;
    let p = pshape_from_frenet(fd)?;
    let [e1, e2, e3] = fd.eps;
    let dm1 = fd.d_ds(&focal.m1);
    let mut kr = 0.0f64;
    let mut tr = 0.0f64;
    let mut skipped = 0;
    for i in 0..fd.len() {
        kr = kr.max((p.kappa_tilde[i] - e1 * e2 * dm1[i]).abs());
        let m2 = focal.m2[i];
        if m2.abs() <= 1e-8 * focal.m1[i].abs().max(1.0) {
            skipped += 1;
            continue;
        }
        let rhs = e1 * e3 * dm1[i] * focal.m1[i] / m2;
        tr = tr.max((-e3 * p.tau_tilde[i] - rhs).abs());
    }
    Ok(PropositionReport {
        kappa_residual: kr,
        tau_residual: tr,
        skipped,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PShapeDistance {
    /// `sup |Δκ̃| + |Δτ̃|` over the common σ interval.
    pub distance: f64,
    /// Same with the second profile's `τ̃` negated.
    pub flipped: f64,
}

impl PShapeDistance {
    pub fn best(&self) -> f64 {
        self.distance.min(self.flipped)
    }
}

pub fn pshape_distance(p: &PShapeProfile, q: &PShapeProfile) -> Result<PShapeDistance> {
    let (pa, pb) = p.range();
    let (qa, qb) = q.range();
    let (lo, hi) = (pa.max(qa), pb.min(qb));
    let count = |s: &[f64]| s.iter().filter(|x| **x >= lo && **x <= hi).count();
    let (np, nq) = (count(&p.sigma), count(&q.sigma));
    if !(hi > lo) || np < 3 || nq < 3 {
        return Err(Error::NoOverlap);
    }
    let n = np.max(nq);
    let mut d = 0.0f64;
    let mut f = 0.0f64;
    for s in crate::curve::uniform_grid(lo, hi, n) {
        let (k1, t1) = p.at(s);
        let (k2, t2) = q.at(s);
        d = d.max((k1 - k2).abs() + (t1 - t2).abs());
        f = f.max((k1 - k2).abs() + (t1 + t2).abs());
    }
    Ok(PShapeDistance {
        distance: d,
        flipped: f,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{AnalyticCurve, Example};
    use crate::curve::uniform_grid;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn ex(e: Example, a: f64, b: f64, range: (f64, f64), n: usize) -> CurveSamples {
        AnalyticCurve::new(e, a, b)
            .unwrap()
            .sample(range, n)
            .unwrap()
    }

    fn max_dev(v: &[f64], target: f64) -> f64 {
        v.iter().map(|x| (x - target).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn or_i_has_pshape_zero_a() {
        let p = pshape_of(&ex(Example::OrI, 1.0, 0.0, (0.0, 2.0), 2001), &tol()).unwrap();
        assert!(max_dev(&p.kappa_tilde, 0.0) < 1e-5);
        assert!(max_dev(&p.tau_tilde, 1.0) < 1e-5);
        assert_eq!(p.source, PShapeSource::FromFrenet);
    }

    #[test]
    fn self_similar_t_constant() {
        let p = pshape_of(
            &ex(Example::SelfSimilarT, 1.0, 0.5, (0.0, 2.0), 2001),
            &tol(),
        )
        .unwrap();
        assert!(max_dev(&p.kappa_tilde, 0.5) < 1e-5);
        assert!(max_dev(&p.tau_tilde, 1.0) < 1e-5);
    }

    #[test]
    fn log_shape_is_one_over_sigma() {
        let c = ex(Example::LogShape, 2.0, 0.0, (0.5, 2.5), 2001);
        let p = pshape_of(&c, &tol()).unwrap();
        for (s, k) in c.params().iter().zip(&p.kappa_tilde) {
            assert!((k * s - 1.0).abs() < 1e-4);
        }
        assert!(max_dev(&p.tau_tilde, 2.0) < 1e-5);
    }

    #[test]
    fn derivative_route_matches_frenet_route() {
        let c = ex(Example::OrII, 2.0, 0.0, (0.0, 2.0), 2001);
        let a = pshape_of(&c, &tol()).unwrap();
        let b = pshape_from_derivatives(&c, &tol()).unwrap();
        for i in 0..a.len() {
            let d = (a.kappa_tilde[i] - b.kappa_tilde[i]).abs()
                + (a.tau_tilde[i] - b.tau_tilde[i]).abs();
            assert!(d < 1e-5);
        }
        let q = pshape_from_derivatives(
            &ex(Example::SelfSimilarQ, 2.0, 1.0, (0.0, 2.0), 2001),
            &tol(),
        )
        .unwrap();
        assert!(max_dev(&q.kappa_tilde, 1.0) < 1e-4);
        assert!(max_dev(&q.tau_tilde, 2.0) < 1e-4);
    }

    #[test]
    fn chain_rule_in_a_foreign_parameter() {
        // same curve as self_similar_t, sampled in u with σ = u²
        let base = AnalyticCurve::new(Example::SelfSimilarT, 1.0, 0.5).unwrap();
        let u = uniform_grid(0.5, 1.5, 2001);
        let pts = u.iter().map(|&x| base.eval(x * x)[0]).collect();
        let c = CurveSamples::new(u, pts).unwrap();
        let p = pshape_from_derivatives(&c, &tol()).unwrap();
        // third derivatives are finite differences here
        assert!(max_dev(&p.kappa_tilde, 0.5) < 1e-4);
        assert!(max_dev(&p.tau_tilde, 1.0) < 1e-4);
    }

    #[test]
    fn planar_curve_has_zero_tau_tilde() {
        let t = uniform_grid(0.0, 2.0, 401);
        let pts = t
            .iter()
            .map(|&s| MinkowskiVec::new(s.sinh(), s.cosh(), 0.0))
            .collect();
        let p = pshape_from_derivatives(&CurveSamples::new(t, pts).unwrap(), &tol()).unwrap();
        assert!(max_dev(&p.tau_tilde, 0.0) < 1e-6);
    }

    #[test]
    fn osculating_degeneracy() {
        let t = uniform_grid(0.0, 1.0, 21);
        let pts = t
            .iter()
            .map(|&s| MinkowskiVec::new(0.1 * s, s, 2.0 * s))
            .collect();
        let c = CurveSamples::new(t, pts).unwrap();
        assert!(pshape_from_derivatives(&c, &tol()).is_err());
    }

    #[test]
    fn focal_curvatures_and_sphere() {
        let fd = frenet_apparatus(
            &ex(Example::SelfSimilarC, 2.0, 1.0, (0.0, 2.0), 401),
            &tol(),
        )
        .unwrap();
        let f = focal_data(&fd).unwrap();
        for i in 0..fd.len() {
            assert!((f.m1[i] - fd.eps[0] * fd.eps[1] / fd.kappa[i]).abs() < 1e-12);
        }
        // a non-planar curve on the Lorentzian sphere of radius 2
        let t = uniform_grid(0.0, 2.0, 2001);
        let pts = t
            .iter()
            .map(|&v| {
                let u = 0.5 * v;
                MinkowskiVec::new(u.sinh(), u.cosh() * v.cos(), u.cosh() * v.sin()) * 2.0
            })
            .collect();
        let fd = frenet_apparatus(&CurveSamples::new(t, pts).unwrap(), &tol()).unwrap();
        let f = focal_data(&fd).unwrap();
        for i in 5..fd.len() - 5 {
            assert!((f.radius[i] - 2.0).abs() < 1e-5, "{} at {i}", f.radius[i]);
            assert!(f.center[i].max_abs() < 1e-4, "{:?}", f.center[i]);
        }
    }

    #[test]
    fn circle_has_no_focal_data() {
        let t = uniform_grid(0.0, 3.0, 301);
        let pts = t
            .iter()
            .map(|&s| MinkowskiVec::new(0.0, s.cos(), s.sin()))
            .collect();
        let fd = frenet_apparatus(&CurveSamples::new(t, pts).unwrap(), &tol()).unwrap();
        assert!(matches!(focal_data(&fd), Err(Error::VanishingTorsion(_))));
    }

    #[test]
    fn proposition_holds() {
        let fd = frenet_apparatus(&ex(Example::OrII, 2.0, 0.0, (0.0, 2.0), 2001), &tol()).unwrap();
        let r = proposition_check(&fd).unwrap();
        assert!(r.kappa_residual < 1e-5 && r.tau_residual < 1e-5, "{r:?}");
        let fd = frenet_apparatus(
            &ex(Example::SelfSimilarT, 1.0, 0.5, (0.0, 2.0), 2001),
            &tol(),
        )
        .unwrap();
        let r = proposition_check(&fd).unwrap();
        assert!(r.kappa_residual < 1e-4 && r.tau_residual < 1e-4, "{r:?}");
        assert_eq!(r.skipped, 0);
    }

    #[test]
    fn distances() {
        let p = pshape_of(
            &ex(Example::SelfSimilarT, 1.0, 0.5, (0.0, 2.0), 1001),
            &tol(),
        )
        .unwrap();
        let q = pshape_of(
            &ex(Example::SelfSimilarT, 1.0, 0.6, (0.0, 2.0), 1001),
            &tol(),
        )
        .unwrap();
        assert_eq!(pshape_distance(&p, &p).unwrap().distance, 0.0);
        assert!(pshape_distance(&p, &q).unwrap().distance >= 0.1 - 1e-5);
        assert!(pshape_distance(&p, &p.flipped()).unwrap().flipped < 1e-12);
        let far = PShapeProfile::new(
            vec![5.0, 6.0, 7.0],
            vec![0.0; 3],
            vec![0.0; 3],
            CausalCase::E2,
            PShapeSource::Prescribed,
        )
        .unwrap();
        assert!(matches!(pshape_distance(&p, &far), Err(Error::NoOverlap)));
    }

    #[test]
    fn json_round_trip() {
        let p = pshape_of(&ex(Example::OrIII, 2.0, 0.0, (0.0, 1.0), 51), &tol()).unwrap();
        let v = p.to_json();
        assert_eq!(v["causal_case"], "e3");
        let back = PShapeProfile::from_json(v).unwrap();
        assert_eq!(back.sigma, p.sigma);
        assert_eq!(back.tau_tilde, p.tau_tilde);
    }
}
