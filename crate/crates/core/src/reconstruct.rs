//! Curves from a prescribed p-shape: integrate the Sabban system for the
//! spherical indicatrix `c(σ)`, then `α = x0 + b ∫ e^ρ c dσ` with
//! `ρ = ∫ κ̃ dσ`.

use serde::{Deserialize, Serialize};

use crate::curve::{uniform_grid, CurveSamples, Derivatives, ParamKind};
use crate::error::{Error, Result};
use crate::frenet::{CausalCase, SabbanCase};
use crate::minkowski::{Mat3, MinkowskiVec};
use crate::pshape::PShapeProfile;
use crate::stencil;

pub const DEFAULT_STEP: f64 = 1e-3;
pub const REPROJECT_EVERY: usize = 100;
pub const DRIFT_LIMIT: f64 = 1e-6;
const FRAME_TOL: f64 = 1e-10;

/// Coefficient matrix of `dX/dσ = M X` for the frame rows `X = (c, t, q)`.
pub fn sabban_matrix(case: SabbanCase, z: f64) -> Mat3 {
    match case {
        SabbanCase::T => [[0.0, 1.0, 0.0], [1.0, 0.0, z], [0.0, z, 0.0]],
        SabbanCase::C => [[0.0, -1.0, 0.0], [-1.0, 0.0, z], [0.0, -z, 0.0]],
        SabbanCase::Q => [[0.0, -1.0, 0.0], [1.0, 0.0, z], [0.0, z, 0.0]],
    }
}

/// Signature `I*` of the frame rows for each case: `Xη Xᵀ = I*`.
pub fn frame_signature(case: SabbanCase) -> [f64; 3] {
    case.signs()
}

/// Matrix entry that produces p-shape torsion `tau_tilde`.
pub fn coupling(case: SabbanCase, tau_tilde: f64) -> f64 {
    let eps_q = match case {
        SabbanCase::Q => -1.0,
        _ => 1.0,
    };
    -eps_q * tau_tilde
}

/// A real function of σ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeFn {
    Constant(f64),
    /// `k/σ`.
    Reciprocal(f64),
    /// Cubic interpolation of samples.
    Sampled {
        sigma: Vec<f64>,
        values: Vec<f64>,
    },
}

impl ShapeFn {
    pub fn eval(&self, s: f64) -> f64 {
        match self {
            ShapeFn::Constant(c) => *c,
            ShapeFn::Reciprocal(k) => k / s,
            ShapeFn::Sampled { sigma, values } => stencil::cubic_interp(sigma, values, s),
        }
    }

    pub fn derivative(&self, s: f64) -> f64 {
        match self {
            ShapeFn::Constant(_) => 0.0,
            ShapeFn::Reciprocal(k) => -k / (s * s),
            ShapeFn::Sampled { sigma, .. } => {
                let h = 1e-5 * (sigma[sigma.len() - 1] - sigma[0]);
                let (a, b) = ((s - h).max(sigma[0]), (s + h).min(sigma[sigma.len() - 1]));
                (self.eval(b) - self.eval(a)) / (b - a)
            }
        }
    }

    fn check(&self, range: (f64, f64)) -> Result<()> {
        match self {
            ShapeFn::Constant(c) if !c.is_finite() => {
                Err(Error::InvalidInput("non-finite constant".into()))
            }
            ShapeFn::Reciprocal(_) if range.0 <= 0.0 && range.1 >= 0.0 => Err(Error::InvalidInput(
                "a 1/σ term needs a σ-range excluding 0".into(),
            )),
            ShapeFn::Sampled { sigma, values } => {
                if sigma.len() != values.len() || sigma.len() < 2 {
                    return Err(Error::ChannelLength {
                        expected: sigma.len(),
                        got: values.len(),
                    });
                }
                if let Some(i) = sigma.windows(2).position(|w| !(w[1] > w[0])) {
                    return Err(Error::NonMonotoneGrid(i + 1));
                }
                let eps = 1e-12 * (1.0 + range.0.abs().max(range.1.abs()));
                if range.0 < sigma[0] - eps || range.1 > sigma[sigma.len() - 1] + eps {
                    return Err(Error::InvalidInput(
                        "σ-range extends beyond the sampled p-shape".into(),
                    ));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// Prescribed p-shape `(κ̃(σ), τ̃(σ))` on a σ-range.
#[derive(Debug, Clone, PartialEq)]
pub struct PShapeSpec {
    pub kappa_tilde: ShapeFn,
    pub tau_tilde: ShapeFn,
    pub sigma_range: (f64, f64),
    pub case: SabbanCase,
}

impl PShapeSpec {
    pub fn new(
        kappa_tilde: ShapeFn,
        tau_tilde: ShapeFn,
        sigma_range: (f64, f64),
        case: SabbanCase,
    ) -> Result<Self> {
        if !(sigma_range.1 > sigma_range.0) {
            return Err(Error::InvalidInput(format!(
                "empty σ-range [{}, {}]",
                sigma_range.0, sigma_range.1
            )));
        }
        kappa_tilde.check(sigma_range)?;
        tau_tilde.check(sigma_range)?;
        Ok(Self {
            kappa_tilde,
            tau_tilde,
            sigma_range,
            case,
        })
    }

    pub fn constant(kt: f64, tt: f64, sigma_range: (f64, f64), case: SabbanCase) -> Result<Self> {
        Self::new(
            ShapeFn::Constant(kt),
            ShapeFn::Constant(tt),
            sigma_range,
            case,
        )
    }

    pub fn from_profile(p: &PShapeProfile) -> Result<Self> {
        Self::new(
            ShapeFn::Sampled {
                sigma: p.sigma.clone(),
                values: p.kappa_tilde.clone(),
            },
            ShapeFn::Sampled {
                sigma: p.sigma.clone(),
                values: p.tau_tilde.clone(),
            },
            p.range(),
            SabbanCase::from_frenet(p.causal_case),
        )
    }

    pub fn causal_case(&self) -> CausalCase {
        match self.case {
            SabbanCase::C => CausalCase::E1,
            SabbanCase::T => CausalCase::E2,
            SabbanCase::Q => CausalCase::E3,
        }
    }

    fn matrix(&self, s: f64) -> Mat3 {
        sabban_matrix(self.case, coupling(self.case, self.tau_tilde.eval(s)))
    }
}

/// Base point and frame rows `(c, t, q)` at `σ_start`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialFrame {
    pub x0: MinkowskiVec,
    pub e1: MinkowskiVec,
    pub e2: MinkowskiVec,
    pub e3: MinkowskiVec,
}

fn v(x0: f64, x1: f64, x2: f64) -> MinkowskiVec {
    MinkowskiVec::new(x0, x1, x2)
}

impl InitialFrame {
    /// Coordinate frame with the timelike slot matching `case`, at the origin.
    pub fn standard(case: SabbanCase) -> Self {
        let (e1, e2) = match case {
            SabbanCase::T => (v(0.0, 1.0, 0.0), v(1.0, 0.0, 0.0)),
            SabbanCase::C => (v(1.0, 0.0, 0.0), v(0.0, 1.0, 0.0)),
            SabbanCase::Q => (v(0.0, 1.0, 0.0), v(0.0, 0.0, 1.0)),
        };
        Self {
            x0: MinkowskiVec::ZERO,
            e1,
            e2,
            e3: e1.cross(e2),
        }
    }

    /// Frame at `σ = 0` of the built-in indicatrix for constant torsion `a`:
    /// `c_i2` (case t, with `q = √(1+a²)`), `c_i3` (case c) or `c_i4`
    /// (case q, with `n = √(a²−1)`). Base point of the matching
    /// constant-p-shape example.
    pub fn example(case: SabbanCase, a: f64) -> Result<Self> {
        match case {
            SabbanCase::T => {
                let q = (1.0 + a * a).sqrt();
                Ok(Self {
                    x0: v(1.0 / (q * q), 0.0, 0.0),
                    e1: v(0.0, -1.0 / q, a / q),
                    e2: v(1.0, 0.0, 0.0),
                    e3: v(0.0, a / q, 1.0 / q),
                })
            }
            _ if a * a <= 1.0 => Err(Error::InvalidConstants(format!(
                "case {} needs a² > 1 (got a = {a})",
                case.name()
            ))),
            SabbanCase::C => {
                let n = (a * a - 1.0).sqrt();
                Ok(Self {
                    x0: v(0.0, -1.0 / (n * n), 0.0),
                    e1: v(a / n, 0.0, 1.0 / n),
                    e2: v(0.0, -1.0, 0.0),
                    e3: v(-1.0 / n, 0.0, -a / n),
                })
            }
            SabbanCase::Q => {
                let n = (a * a - 1.0).sqrt();
                Ok(Self {
                    x0: v(0.0, 1.0 / (n * n), 0.0),
                    e1: v(1.0 / n, 0.0, a / n),
                    e2: v(0.0, -1.0, 0.0),
                    e3: v(-a / n, 0.0, -1.0 / n),
                })
            }
        }
    }

    fn rows(&self) -> [MinkowskiVec; 3] {
        [self.e1, self.e2, self.e3]
    }

    /// Checks pseudo-orthonormality against the signature of `case` and
    /// that `e3 = ±e1 × e2`.
    pub fn validate(&self, case: SabbanCase) -> Result<()> {
        let sig = frame_signature(case);
        let r = self.rows();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { sig[i] } else { 0.0 };
                let got = r[i].inner(r[j]);
                if (got - want).abs()
                    > FRAME_TOL.max(1e-8 * r[i].euclid_norm() * r[j].euclid_norm())
                {
                    return Err(Error::CaseMismatch(format!(
                        "case {} needs signs {:?}; e{}·e{} = {got}",
                        case.name(),
                        sig,
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        let x = r[0].cross(r[1]);
        let scale = 1e-8 * (1.0 + x.euclid_norm());
        if (x - r[2]).max_abs() > scale && (x + r[2]).max_abs() > scale {
            return Err(Error::CaseMismatch("e3 is not ±e1×e2".into()));
        }
        Ok(())
    }
}

/// Frame field on a uniform σ grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameField {
    pub sigma: Vec<f64>,
    /// Rows `(c, t, q)` per node.
    pub frames: Vec<[MinkowskiVec; 3]>,
    /// Largest `‖I*·Gram − I‖∞` seen before any re-projection.
    pub drift: f64,
    pub case: SabbanCase,
}

type Frame = [MinkowskiVec; 3];

fn apply(m: &Mat3, x: &Frame) -> Frame {
    let row = |i: usize| x[0] * m[i][0] + x[1] * m[i][1] + x[2] * m[i][2];
    [row(0), row(1), row(2)]
}

fn axpy(x: &Frame, h: f64, k: &Frame) -> Frame {
    [x[0] + k[0] * h, x[1] + k[1] * h, x[2] + k[2] * h]
}

fn drift(x: &Frame, sig: [f64; 3]) -> f64 {
    let mut d = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            let want = if i == j { 1.0 } else { 0.0 };
            d = d.max((sig[i] * x[i].inner(x[j]) - want).abs());
        }
    }
    d
}

/// `DRIFT_LIMIT`, raised to the rounding floor `‖x‖²·ε` once the frame
/// entries grow large (hyperbolic regimes).
fn drift_limit(x: &Frame) -> f64 {
    let big = x.iter().map(|r| r.euclid_norm()).fold(0.0, f64::max);
    DRIFT_LIMIT.max(1e3 * f64::EPSILON * big * big)
}

/// Pseudo-Gram–Schmidt in the Lorentzian inner product.
fn reproject(x: &Frame, sig: [f64; 3]) -> Frame {
    let mut out = *x;
    for i in 0..3 {
        let mut u = out[i];
        for j in 0..i {
            u -= out[j] * (sig[j] * u.inner(out[j]));
        }
        let n = u.norm_sq().abs().sqrt();
        out[i] = u / n;
    }
    out
}

fn step_count(range: (f64, f64), step: f64) -> Result<usize> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::InvalidInput(format!(
            "step must be positive (got {step})"
        )));
    }
    let n = ((range.1 - range.0) / step).round().max(1.0) as usize;
    Ok((n + 1).max(crate::curve::MIN_NODES))
}

/// Classical RK4 for `dX/dσ = M(σ) X` from `init`, re-projected every
/// `REPROJECT_EVERY` steps.
pub fn integrate_sabban(spec: &PShapeSpec, init: &InitialFrame, step: f64) -> Result<FrameField> {
    init.validate(spec.case)?;
    let n = step_count(spec.sigma_range, step)?;
    let sigma = uniform_grid(spec.sigma_range.0, spec.sigma_range.1, n);
    let sig = frame_signature(spec.case);
    let mut x = init.rows();
    let mut frames = Vec::with_capacity(n);
    frames.push(x);
    let mut worst = drift(&x, sig);
    for k in 1..n {
        let (s0, s1) = (sigma[k - 1], sigma[k]);
        let h = s1 - s0;
        let m0 = spec.matrix(s0);
        let mh = spec.matrix(s0 + 0.5 * h);
        let m1 = spec.matrix(s1);
        let k1 = apply(&m0, &x);
        let k2 = apply(&mh, &axpy(&x, 0.5 * h, &k1));
        let k3 = apply(&mh, &axpy(&x, 0.5 * h, &k2));
        let k4 = apply(&m1, &axpy(&x, h, &k3));
        for i in 0..3 {
            x[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0);
        }
        let d = drift(&x, sig);
        worst = worst.max(d);
        let limit = drift_limit(&x);
        if d > limit || k % REPROJECT_EVERY == 0 {
            x = reproject(&x, sig);
            let after = drift(&x, sig);
            if !(after <= limit) {
                return Err(Error::FrameDegenerate(after));
            }
        }
        frames.push(x);
    }
    Ok(FrameField {
        sigma,
        frames,
        drift: worst,
        case: spec.case,
    })
}

/// Curve with p-shape `spec`, `α(σ_start) = x0` and homothety constant `b`.
///
/// The samples carry exact derivative channels taken from the frame
/// equations.
pub fn reconstruct_curve(
    spec: &PShapeSpec,
    init: &InitialFrame,
    b: f64,
    step: f64,
) -> Result<CurveSamples> {
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::InvalidInput(format!("b must be positive (got {b})")));
    }
    let field = integrate_sabban(spec, init, step)?;
    let sigma = &field.sigma;
    let n = sigma.len();
    let z1: Vec<f64> = sigma.iter().map(|&s| spec.kappa_tilde.eval(s)).collect();
    let rho = stencil::cumulative_integral(sigma, &z1);
    let w: Vec<f64> = rho.iter().map(|r| b * r.exp()).collect();
    let mut pts = vec![init.x0; n];
    for axis in 0..3 {
        let f: Vec<f64> = (0..n).map(|i| w[i] * field.frames[i][0][axis]).collect();
        let integ = stencil::cumulative_integral(sigma, &f);
        for i in 0..n {
            let mut p = pts[i].to_array();
            p[axis] += integ[i];
            pts[i] = MinkowskiVec::new(p[0], p[1], p[2]);
        }
    }
    let mut d1 = Vec::with_capacity(n);
    let mut d2 = Vec::with_capacity(n);
    let mut d3 = Vec::with_capacity(n);
    for i in 0..n {
        let s = sigma[i];
        let x = field.frames[i];
        let m = spec.matrix(s);
        let mx = apply(&m, &x);
        let mmx = apply(&m, &mx);
        // the first row of M is constant, so c'' = (M M X)₀
        let (c, dc, ddc) = (x[0], mx[0], mmx[0]);
        let (k, dk) = (z1[i], spec.kappa_tilde.derivative(s));
        d1.push(c * w[i]);
        d2.push((c * k + dc) * w[i]);
        d3.push((c * (dk + k * k) + dc * (2.0 * k) + ddc) * w[i]);
    }
    CurveSamples::build(
        sigma.clone(),
        pts,
        Some(Derivatives { d1, d2, d3 }),
        ParamKind::SphericalArcLength,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{AnalyticCurve, Example};
    use crate::curve::Tolerances;
    use crate::minkowski::{mat_mul, mat_transpose};
    use crate::pshape::pshape_of;

    #[test]
    fn matrices() {
        let a = 0.7;
        assert_eq!(
            sabban_matrix(SabbanCase::T, a),
            [[0.0, 1.0, 0.0], [1.0, 0.0, a], [0.0, a, 0.0]]
        );
        assert_eq!(
            sabban_matrix(SabbanCase::C, 0.0),
            [[0.0, -1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, -0.0, 0.0]]
        );
        for case in [SabbanCase::T, SabbanCase::C, SabbanCase::Q] {
            let m = sabban_matrix(case, 1.3);
            let s = frame_signature(case);
            let g = [[s[0], 0.0, 0.0], [0.0, s[1], 0.0], [0.0, 0.0, s[2]]];
            let a = mat_mul(&mat_transpose(&m), &g);
            let b = mat_mul(&g, &m);
            for i in 0..3 {
                for j in 0..3 {
                    assert_eq!(a[i][j] + b[i][j], 0.0);
                }
            }
        }
    }

    #[test]
    fn c_i2_from_the_example_frame() {
        let a = 1.0;
        let spec = PShapeSpec::constant(0.0, a, (0.0, 1.0), SabbanCase::T).unwrap();
        let f = integrate_sabban(
            &spec,
            &InitialFrame::example(SabbanCase::T, a).unwrap(),
            1e-3,
        )
        .unwrap();
        let exact = AnalyticCurve::new(Example::CI2, a, 0.0).unwrap().eval(1.0)[0];
        let got = f.frames[f.frames.len() - 1][0];
        assert!((got - exact).max_abs() < 1e-8, "{got:?} vs {exact:?}");
    }

    #[test]
    fn indicatrices_of_cases_c_and_q() {
        for (case, ex) in [(SabbanCase::C, Example::CI3), (SabbanCase::Q, Example::CI4)] {
            let spec = PShapeSpec::constant(0.0, 2.0, (0.0, 2.0), case).unwrap();
            let f =
                integrate_sabban(&spec, &InitialFrame::example(case, 2.0).unwrap(), 1e-3).unwrap();
            let c = AnalyticCurve::new(ex, 2.0, 0.0).unwrap();
            for (s, x) in f.sigma.iter().zip(&f.frames).step_by(250) {
                assert!((x[0] - c.eval(*s)[0]).max_abs() < 1e-8, "{case:?} at {s}");
            }
        }
    }

    #[test]
    fn zero_torsion_matches_matrix_exponential() {
        let spec = PShapeSpec::constant(0.0, 0.0, (0.0, 1.5), SabbanCase::T).unwrap();
        let init = InitialFrame::standard(SabbanCase::T);
        let f = integrate_sabban(&spec, &init, 1e-3).unwrap();
        for (s, x) in f.sigma.iter().zip(&f.frames) {
            let want = init.e1 * s.cosh() + init.e2 * s.sinh();
            assert!((x[0] - want).max_abs() < 1e-10);
        }
    }

    #[test]
    fn drift_stays_small() {
        let spec = PShapeSpec::constant(0.3, 1.2, (0.0, 10.0), SabbanCase::C).unwrap();
        let f = integrate_sabban(&spec, &InitialFrame::standard(SabbanCase::C), 1e-3).unwrap();
        assert!(f.drift < 1e-8, "{}", f.drift);
    }

    #[test]
    fn rk4_order() {
        let spec = PShapeSpec::constant(0.0, 0.8, (0.0, 1.0), SabbanCase::T).unwrap();
        let init = InitialFrame::example(SabbanCase::T, 0.8).unwrap();
        let exact = AnalyticCurve::new(Example::CI2, 0.8, 0.0)
            .unwrap()
            .eval(1.0)[0];
        let err = |h: f64| {
            let f = integrate_sabban(&spec, &init, h).unwrap();
            (f.frames[f.frames.len() - 1][0] - exact).max_abs()
        };
        let (e1, e2) = (err(0.1), err(0.05));
        assert!(e1 / e2 >= 14.0, "{e1} {e2}");
    }

    #[test]
    fn or_i_reconstructed() {
        let spec = PShapeSpec::constant(0.0, 1.0, (0.0, 2.0), SabbanCase::T).unwrap();
        let init = InitialFrame::example(SabbanCase::T, 1.0).unwrap();
        let c = reconstruct_curve(&spec, &init, 1.0, 1e-3).unwrap();
        let ex = AnalyticCurve::new(Example::OrI, 1.0, 0.0).unwrap();
        for (s, p) in c.params().iter().zip(c.points()) {
            assert!((*p - ex.eval(*s)[0]).max_abs() < 1e-6);
        }
    }

    #[test]
    fn or_ii_and_or_iii_reconstructed() {
        for (case, e) in [
            (SabbanCase::C, Example::OrII),
            (SabbanCase::Q, Example::OrIII),
        ] {
            let spec = PShapeSpec::constant(0.0, 2.0, (0.0, 2.0), case).unwrap();
            let init = InitialFrame::example(case, 2.0).unwrap();
            let c = reconstruct_curve(&spec, &init, 1.0, 1e-3).unwrap();
            let ex = AnalyticCurve::new(e, 2.0, 0.0).unwrap();
            for (s, p) in c.params().iter().zip(c.points()) {
                assert!((*p - ex.eval(*s)[0]).max_abs() < 1e-6, "{e} at {s}");
            }
        }
    }

    #[test]
    fn recomputed_pshape_matches_prescription() {
        let tol = Tolerances::default();
        let cases = [
            (
                ShapeFn::Constant(0.5),
                ShapeFn::Constant(1.0),
                (0.0, 2.0),
                SabbanCase::T,
            ),
            (
                ShapeFn::Constant(1.0),
                ShapeFn::Constant(2.0),
                (0.0, 2.0),
                SabbanCase::C,
            ),
            (
                ShapeFn::Constant(-0.4),
                ShapeFn::Constant(-1.5),
                (0.0, 2.0),
                SabbanCase::Q,
            ),
            (
                ShapeFn::Reciprocal(1.0),
                ShapeFn::Constant(2.0),
                (0.5, 2.5),
                SabbanCase::T,
            ),
        ];
        for (kt, tt, range, case) in cases {
            let spec = PShapeSpec::new(kt.clone(), tt.clone(), range, case).unwrap();
            let c = reconstruct_curve(&spec, &InitialFrame::standard(case), 1.0, 1e-3).unwrap();
            let p = pshape_of(&c, &tol).unwrap();
            assert_eq!(p.causal_case, spec.causal_case());
            for (i, s) in c.params().iter().enumerate() {
                assert!(
                    (p.kappa_tilde[i] - kt.eval(*s)).abs() < 1e-5,
                    "{case:?} κ̃ at {s}"
                );
                assert!(
                    (p.tau_tilde[i] - tt.eval(*s)).abs() < 1e-5,
                    "{case:?} τ̃ at {s}"
                );
            }
        }
    }

    #[test]
    fn frame_validation() {
        let bad = InitialFrame::standard(SabbanCase::C);
        assert!(matches!(
            integrate_sabban(
                &PShapeSpec::constant(0.0, 1.0, (0.0, 1.0), SabbanCase::T).unwrap(),
                &bad,
                1e-3
            ),
            Err(Error::CaseMismatch(_))
        ));
        for case in [SabbanCase::T, SabbanCase::C, SabbanCase::Q] {
            InitialFrame::standard(case).validate(case).unwrap();
            InitialFrame::example(case, 2.0)
                .unwrap()
                .validate(case)
                .unwrap();
        }
        assert!(PShapeSpec::new(
            ShapeFn::Reciprocal(1.0),
            ShapeFn::Constant(0.0),
            (-1.0, 1.0),
            SabbanCase::T
        )
        .is_err());
    }
}
