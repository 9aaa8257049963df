//! Built-in analytic curves: the constant and `1/σ` p-shape examples, the
//! self-similar families, and the spherical indicatrices they are built
//! from. All α-curves are parametrized by spherical arc length `σ`; the
//! spherical curves by their own arc length.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::curve::{uniform_grid, CurveSamples, Derivatives, ParamKind};
use crate::error::{Error, Result};
use crate::minkowski::{MinkowskiVec, UnitSphere};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Example {
    OrI,
    OrII,
    OrIII,
    LogShape,
    SelfSimilarT,
    SelfSimilarC,
    SelfSimilarQ,
    CI2,
    CI3,
    CI4,
}

impl Example {
    pub const ALL: [Example; 10] = [
        Example::OrI,
        Example::OrII,
        Example::OrIII,
        Example::LogShape,
        Example::SelfSimilarT,
        Example::SelfSimilarC,
        Example::SelfSimilarQ,
        Example::CI2,
        Example::CI3,
        Example::CI4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Example::OrI => "example_or_i",
            Example::OrII => "example_or_ii",
            Example::OrIII => "example_or_iii",
            Example::LogShape => "example_log_shape",
            Example::SelfSimilarT => "self_similar_t",
            Example::SelfSimilarC => "self_similar_c",
            Example::SelfSimilarQ => "self_similar_q",
            Example::CI2 => "c_i2",
            Example::CI3 => "c_i3",
            Example::CI4 => "c_i4",
        }
    }

    fn uses_b(self) -> bool {
        matches!(
            self,
            Example::SelfSimilarT | Example::SelfSimilarC | Example::SelfSimilarQ
        )
    }

    /// Default constants `(a, b)`.
    pub fn default_constants(self) -> (f64, f64) {
        match self {
            Example::OrI | Example::CI2 => (1.0, 0.0),
            Example::SelfSimilarT => (1.0, 0.5),
            Example::SelfSimilarC | Example::SelfSimilarQ => (2.0, 1.0),
            _ => (2.0, 0.0),
        }
    }

    /// A σ-range on which the default curve is regular.
    pub fn default_range(self) -> (f64, f64) {
        match self {
            Example::LogShape => (0.5, 2.5),
            _ => (0.0, 2.0),
        }
    }

    /// Unit sphere the spherical examples live on.
    pub fn sphere(self) -> Option<UnitSphere> {
        match self {
            Example::CI2 | Example::CI4 => Some(UnitSphere::Lorentzian),
            Example::CI3 => Some(UnitSphere::Hyperbolic),
            _ => None,
        }
    }

    pub fn is_spherical(self) -> bool {
        self.sphere().is_some()
    }
}

impl fmt::Display for Example {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Example {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Example::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::UnknownExample(s.to_string()))
    }
}

/// A closed-form curve with derivatives of order 1..3.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticCurve {
    pub example: Example,
    pub a: f64,
    pub b: f64,
}

type Jet = [MinkowskiVec; 4];

fn v(x0: f64, x1: f64, x2: f64) -> MinkowskiVec {
    MinkowskiVec::new(x0, x1, x2)
}

impl AnalyticCurve {
    pub fn new(example: Example, a: f64, b: f64) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidConstants(msg));
        if !a.is_finite() || !b.is_finite() {
            return bad("constants must be finite".into());
        }
        let needs_n = matches!(
            example,
            Example::OrII
                | Example::OrIII
                | Example::SelfSimilarC
                | Example::SelfSimilarQ
                | Example::CI3
                | Example::CI4
        );
        if needs_n && a * a <= 1.0 {
            return bad(format!("{example} needs a² > 1 (got a = {a})"));
        }
        if matches!(example, Example::LogShape) && a == 0.0 {
            return bad("example_log_shape needs a ≠ 0".into());
        }
        if example.uses_b() {
            if b == 0.0 {
                return bad(format!("{example} needs b ≠ 0"));
            }
            let pole = match example {
                Example::SelfSimilarT => Some(1.0 + a * a),
                Example::SelfSimilarQ => Some(a * a - 1.0),
                _ => None,
            };
            if let Some(p) = pole {
                if (b * b - p).abs() <= 1e-12 * p.max(1.0) {
                    return bad(format!("{example} has a pole at b² = {p}"));
                }
            }
        }
        Ok(Self { example, a, b })
    }

    /// Looks up a catalog entry by name with constants `a`, `b` (missing
    /// constants take their defaults).
    pub fn builtin(name: &str, constants: &BTreeMap<String, f64>) -> Result<Self> {
        let ex: Example = name.parse()?;
        if let Some(k) = constants.keys().find(|k| *k != "a" && *k != "b") {
            return Err(Error::InvalidConstants(format!("unknown constant '{k}'")));
        }
        let (da, db) = ex.default_constants();
        let a = constants.get("a").copied().unwrap_or(da);
        let b = constants.get("b").copied().unwrap_or(db);
        Self::new(ex, a, b)
    }

    pub fn constants(&self) -> BTreeMap<String, f64> {
        let mut m = BTreeMap::new();
        m.insert("a".to_string(), self.a);
        if self.example.uses_b() {
            m.insert("b".to_string(), self.b);
        }
        m
    }

    fn q(&self) -> f64 {
        (1.0 + self.a * self.a).sqrt()
    }

    fn n(&self) -> f64 {
        (self.a * self.a - 1.0).sqrt()
    }

    /// Jet of the spherical indicatrix `c` used to build the α-curves.
    fn indicatrix(&self, s: f64) -> Jet {
        let a = self.a;
        match self.example {
            Example::OrI | Example::LogShape | Example::SelfSimilarT | Example::CI2 => {
                let q = self.q();
                let (sh, ch) = ((q * s).sinh(), (q * s).cosh());
                [
                    v(sh / q, -ch / q, a / q),
                    v(ch, -sh, 0.0),
                    v(sh, -ch, 0.0) * q,
                    v(ch, -sh, 0.0) * (q * q),
                ]
            }
            Example::OrII | Example::SelfSimilarC | Example::CI3 => {
                let n = self.n();
                let (sn, cs) = ((n * s).sin(), (n * s).cos());
                [
                    v(a / n, sn / n, cs / n),
                    v(0.0, cs, -sn),
                    v(0.0, -sn, -cs) * n,
                    v(0.0, -cs, sn) * (n * n),
                ]
            }
            Example::OrIII | Example::SelfSimilarQ | Example::CI4 => {
                let n = self.n();
                let (sh, ch) = ((n * s).sinh(), (n * s).cosh());
                [
                    v(ch / n, sh / n, a / n),
                    v(sh, ch, 0.0),
                    v(ch, sh, 0.0) * n,
                    v(sh, ch, 0.0) * (n * n),
                ]
            }
        }
    }

    fn position(&self, s: f64) -> MinkowskiVec {
        let (a, b) = (self.a, self.b);
        match self.example {
            Example::OrI => {
                let q = self.q();
                v(
                    (q * s).cosh() / (q * q),
                    -(q * s).sinh() / (q * q),
                    a * s / q,
                )
            }
            Example::OrII => {
                let n = self.n();
                v(a * s / n, -(n * s).cos() / (n * n), (n * s).sin() / (n * n))
            }
            Example::OrIII => {
                let n = self.n();
                v(
                    (n * s).sinh() / (n * n),
                    (n * s).cosh() / (n * n),
                    a * s / n,
                )
            }
            Example::LogShape => {
                let q = self.q();
                let t = q * s;
                let q3 = q * q * q;
                v(
                    (t * t.cosh() - t.sinh()) / q3,
                    (t.cosh() - t * t.sinh()) / q3,
                    a * t * t / (2.0 * q3),
                )
            }
            Example::SelfSimilarT => {
                let q = self.q();
                let e = (b * s).exp() / (b * b - q * q);
                let (sh, ch) = ((q * s).sinh(), (q * s).cosh());
                v(
                    e * (b / q * sh - ch),
                    e * (sh - b / q * ch),
                    a / (b * q) * (b * s).exp(),
                )
            }
            Example::SelfSimilarC => {
                let n = self.n();
                let e = (b * s).exp() / (b * b + n * n);
                let (sn, cs) = ((n * s).sin(), (n * s).cos());
                v(
                    a / (b * n) * (b * s).exp(),
                    e * (b / n * sn - cs),
                    e * (b / n * cs + sn),
                )
            }
            Example::SelfSimilarQ => {
                let n = self.n();
                let e = (b * s).exp() / (b * b - n * n);
                let (sh, ch) = ((n * s).sinh(), (n * s).cosh());
                v(
                    e * (b / n * ch - sh),
                    e * (b / n * sh - ch),
                    a / (b * n) * (b * s).exp(),
                )
            }
            Example::CI2 | Example::CI3 | Example::CI4 => self.indicatrix(s)[0],
        }
    }

    /// Position and derivatives of order 1, 2, 3 at parameter `s`.
    pub fn eval(&self, s: f64) -> Jet {
        let c = self.indicatrix(s);
        let p = self.position(s);
        match self.example {
            Example::CI2 | Example::CI3 | Example::CI4 => c,
            // α' = c
            Example::OrI | Example::OrII | Example::OrIII => [p, c[0], c[1], c[2]],
            // α' = σ c
            Example::LogShape => [p, c[0] * s, c[0] + c[1] * s, c[1] * 2.0 + c[2] * s],
            // α' = e^{bσ} c
            Example::SelfSimilarT | Example::SelfSimilarC | Example::SelfSimilarQ => {
                let b = self.b;
                let e = (b * s).exp();
                [
                    p,
                    c[0] * e,
                    (c[0] * b + c[1]) * e,
                    (c[0] * (b * b) + c[1] * (2.0 * b) + c[2]) * e,
                ]
            }
        }
    }

    pub fn param_kind(&self) -> ParamKind {
        if self.example.is_spherical() {
            ParamKind::ArcLength
        } else {
            ParamKind::SphericalArcLength
        }
    }

    /// Samples `n` uniform nodes on `range`, keeping the analytic derivative
    /// channels.
    pub fn sample(&self, range: (f64, f64), n: usize) -> Result<CurveSamples> {
        if !(range.1 > range.0) {
            return Err(Error::InvalidInput(format!(
                "empty parameter range [{}, {}]",
                range.0, range.1
            )));
        }
        if self.example == Example::LogShape && range.0 <= 0.0 {
            return Err(Error::InvalidConstants(
                "example_log_shape is singular at σ = 0; use a range in σ > 0".into(),
            ));
        }
        let grid = uniform_grid(range.0, range.1, n);
        let mut pts = Vec::with_capacity(n);
        let mut d1 = Vec::with_capacity(n);
        let mut d2 = Vec::with_capacity(n);
        let mut d3 = Vec::with_capacity(n);
        for &s in &grid {
            let j = self.eval(s);
            pts.push(j[0]);
            d1.push(j[1]);
            d2.push(j[2]);
            d3.push(j[3]);
        }
        CurveSamples::build(
            grid,
            pts,
            Some(Derivatives { d1, d2, d3 }),
            self.param_kind(),
        )
    }

    pub fn sample_default(&self, n: usize) -> Result<CurveSamples> {
        self.sample(self.example.default_range(), n)
    }
}

pub fn builtin(name: &str, constants: &BTreeMap<String, f64>) -> Result<AnalyticCurve> {
    AnalyticCurve::builtin(name, constants)
}
