//! Sampled curves, derivative channels and the arc-length and spherical
//! arc-length reparametrizations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::minkowski::{CausalCharacter, MinkowskiVec};
use crate::split_quaternion::PSimilarity;
use crate::stencil;

pub const MIN_NODES: usize = 7;

/// Numerical guards. The geometry assumes strict inequalities; these are
/// the margins at which a sample counts as degenerate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Tangent is lightlike when `‖α'‖ < lightlike · max ‖α'‖`.
    pub lightlike: f64,
    pub curvature_floor: f64,
    /// Relative band for causal classification of unit frame vectors.
    pub causal: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            lightlike: 1e-8,
            curvature_floor: 1e-10,
            causal: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamKind {
    #[default]
    Arbitrary,
    #[serde(rename = "arclength")]
    ArcLength,
    #[serde(rename = "spherical")]
    SphericalArcLength,
}

/// Derivatives of orders 1, 2, 3 with respect to the curve parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct Derivatives {
    pub d1: Vec<MinkowskiVec>,
    pub d2: Vec<MinkowskiVec>,
    pub d3: Vec<MinkowskiVec>,
}

impl Derivatives {
    pub fn order(&self, k: usize) -> &[MinkowskiVec] {
        match k {
            1 => &self.d1,
            2 => &self.d2,
            3 => &self.d3,
            _ => panic!("derivative order {k} not in 1..=3"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveSamples {
    params: Vec<f64>,
    points: Vec<MinkowskiVec>,
    analytic: Option<Derivatives>,
    kind: ParamKind,
}

impl CurveSamples {
    pub fn new(params: Vec<f64>, points: Vec<MinkowskiVec>) -> Result<Self> {
        Self::build(params, points, None, ParamKind::Arbitrary)
    }

    pub fn with_derivatives(
        params: Vec<f64>,
        points: Vec<MinkowskiVec>,
        derivatives: Derivatives,
    ) -> Result<Self> {
        Self::build(params, points, Some(derivatives), ParamKind::Arbitrary)
    }

    pub fn build(
        params: Vec<f64>,
        points: Vec<MinkowskiVec>,
        analytic: Option<Derivatives>,
        kind: ParamKind,
    ) -> Result<Self> {
        let n = params.len();
        if points.len() != n {
            return Err(Error::ChannelLength {
                expected: n,
                got: points.len(),
            });
        }
        if n < MIN_NODES {
            return Err(Error::GridTooCoarse(n));
        }
        if let Some(i) = params.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::NonMonotoneGrid(i + 1));
        }
        if params.iter().any(|t| !t.is_finite())
            || points
                .iter()
                .any(|p| !p.to_array().iter().all(|v| v.is_finite()))
        {
            return Err(Error::InvalidInput("non-finite sample".into()));
        }
        if let Some(d) = &analytic {
            for ch in [&d.d1, &d.d2, &d.d3] {
                if ch.len() != n {
                    return Err(Error::ChannelLength {
                        expected: n,
                        got: ch.len(),
                    });
                }
            }
        }
        Ok(Self {
            params,
            points,
            analytic,
            kind,
        })
    }

    pub fn with_kind(mut self, kind: ParamKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn points(&self) -> &[MinkowskiVec] {
        &self.points
    }

    pub fn kind(&self) -> ParamKind {
        self.kind
    }

    pub fn analytic(&self) -> Option<&Derivatives> {
        self.analytic.as_ref()
    }

    pub fn without_analytic(mut self) -> Self {
        self.analytic = None;
        self
    }

    /// Derivative channels: the analytic ones when present, otherwise
    /// five-point finite differences (one-sided at the two end nodes).
    pub fn derivatives(&self) -> Derivatives {
        if let Some(d) = &self.analytic {
            return d.clone();
        }
        let mut fd = stencil::differentiate(
            &self.params,
            &self.points,
            3,
            MinkowskiVec::ZERO,
            |a, w, v| a + v * w,
        );
        let d3 = fd.pop().unwrap_or_default();
        let d2 = fd.pop().unwrap_or_default();
        let d1 = fd.pop().unwrap_or_default();
        Derivatives { d1, d2, d3 }
    }

    pub fn derivative(&self, order: usize) -> Result<Vec<MinkowskiVec>> {
        if !(1..=3).contains(&order) {
            return Err(Error::InvalidInput(format!("derivative order {order}")));
        }
        Ok(self.derivatives().order(order).to_vec())
    }

    /// Image under a p-similarity; derivative channels go through the linear
    /// part.
    pub fn transformed(&self, f: &PSimilarity) -> Result<Self> {
        let points = self
            .points
            .iter()
            .map(|p| f.apply(*p))
            .collect::<Result<Vec<_>>>()?;
        let analytic = match &self.analytic {
            Some(d) => {
                let lin = |ch: &[MinkowskiVec]| {
                    ch.iter().map(|v| f.linear(*v)).collect::<Result<Vec<_>>>()
                };
                Some(Derivatives {
                    d1: lin(&d.d1)?,
                    d2: lin(&d.d2)?,
                    d3: lin(&d.d3)?,
                })
            }
            None => None,
        };
        Ok(Self {
            params: self.params.clone(),
            points,
            analytic,
            kind: self.kind,
        })
    }

    /// Speeds `‖α'(t)‖`, failing when the tangent is lightlike somewhere.
    pub fn speeds(&self, tol: &Tolerances) -> Result<Vec<f64>> {
        let d1 = self.derivatives().d1;
        speeds_of(&d1, tol)
    }

    pub fn arc_length(&self, tol: &Tolerances) -> Result<Vec<f64>> {
        let sp = self.speeds(tol)?;
        Ok(stencil::cumulative_integral(&self.params, &sp))
    }

    /// `σ(t) = ∫ κ ‖α'‖ dt` with `kappa` given per node.
    pub fn spherical_arc_length(&self, kappa: &[f64], tol: &Tolerances) -> Result<Vec<f64>> {
        let sp = self.speeds(tol)?;
        spherical_arc_length_from(&self.params, &sp, kappa, tol)
    }

    pub fn causal_character(&self, tol: &Tolerances) -> Result<CausalCharacter> {
        let d1 = self.derivatives().d1;
        speeds_of(&d1, tol)?;
        tangent_character(&d1, tol)
    }

    /// Cubic Hermite resampling onto `n` uniform nodes of a new parameter
    /// `u` given per node together with `du/dt`.
    pub fn resample_by(
        &self,
        new_param: &[f64],
        new_param_rate: &[f64],
        n: usize,
        kind: ParamKind,
    ) -> Result<Self> {
        if n < MIN_NODES {
            return Err(Error::GridTooCoarse(n));
        }
        if let Some(i) = new_param.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::NonMonotoneGrid(i + 1));
        }
        let d1 = self.derivatives().d1;
        let (u0, u1) = (new_param[0], new_param[new_param.len() - 1]);
        let mut params = Vec::with_capacity(n);
        let mut points = Vec::with_capacity(n);
        for k in 0..n {
            let u = if k + 1 == n {
                u1
            } else {
                u0 + (u1 - u0) * k as f64 / (n - 1) as f64
            };
            let i = stencil::locate(new_param, u);
            let w = stencil::hermite_weights(new_param[i], new_param[i + 1], u);
            let da = d1[i] / new_param_rate[i];
            let db = d1[i + 1] / new_param_rate[i + 1];
            points.push(self.points[i] * w[0] + da * w[1] + self.points[i + 1] * w[2] + db * w[3]);
            params.push(u);
        }
        Self::build(params, points, None, kind)
    }

    /// Uniform resampling by the chosen parameter.
    pub fn resample(&self, target: ParamKind, n: usize, tol: &Tolerances) -> Result<Self> {
        match target {
            ParamKind::Arbitrary => {
                let ones = vec![1.0; self.len()];
                self.resample_by(&self.params.clone(), &ones, n, self.kind)
            }
            ParamKind::ArcLength => {
                let sp = self.speeds(tol)?;
                let s = stencil::cumulative_integral(&self.params, &sp);
                self.resample_by(&s, &sp, n, ParamKind::ArcLength)
            }
            ParamKind::SphericalArcLength => {
                let kappa = crate::frenet::curvature(self, tol)?;
                let sp = self.speeds(tol)?;
                let rate: Vec<f64> = kappa.iter().zip(&sp).map(|(k, v)| k * v).collect();
                let sigma = spherical_arc_length_from(&self.params, &sp, &kappa, tol)?;
                self.resample_by(&sigma, &rate, n, ParamKind::SphericalArcLength)
            }
        }
    }
}

pub(crate) fn speeds_of(d1: &[MinkowskiVec], tol: &Tolerances) -> Result<Vec<f64>> {
    let sp: Vec<f64> = d1.iter().map(|v| v.norm()).collect();
    let scale = d1.iter().map(|v| v.euclid_norm()).fold(0.0, f64::max);
    if let Some(i) = sp
        .iter()
        .position(|&v| v < tol.lightlike * scale || v == 0.0)
    {
        return Err(Error::LightlikeTangent(i));
    }
    Ok(sp)
}

pub(crate) fn spherical_arc_length_from(
    params: &[f64],
    speeds: &[f64],
    kappa: &[f64],
    tol: &Tolerances,
) -> Result<Vec<f64>> {
    if let Some(i) = kappa.iter().position(|&k| !(k > tol.curvature_floor)) {
        return Err(Error::VanishingCurvature(i));
    }
    let rate: Vec<f64> = kappa.iter().zip(speeds).map(|(k, v)| k * v).collect();
    Ok(stencil::cumulative_integral(params, &rate))
}

pub(crate) fn tangent_character(d1: &[MinkowskiVec], tol: &Tolerances) -> Result<CausalCharacter> {
    let mut first = None;
    for (i, v) in d1.iter().enumerate() {
        let u = *v / v.euclid_norm();
        let c = u.causal_character(tol.lightlike);
        if c == CausalCharacter::Lightlike {
            return Err(Error::LightlikeTangent(i));
        }
        match first {
            None => first = Some(c),
            Some(f) if f != c => return Err(Error::CharacterChange(i)),
            _ => {}
        }
    }
    first.ok_or(Error::GridTooCoarse(0))
}

/// Uniform grid of `n` nodes on `[a, b]`.
pub fn uniform_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| {
            if k + 1 == n {
                b
            } else {
                a + (b - a) * k as f64 / (n - 1) as f64
            }
        })
        .collect()
}
