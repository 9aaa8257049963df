//! Registration of curves with equal p-shape: recover the p-similarity
//! `f` with `f∘α = α*`.

use serde::Serialize;

use crate::curve::{uniform_grid, CurveSamples, Tolerances};
use crate::error::{Error, Result};
use crate::frenet::{frenet_apparatus, FrenetData};
use crate::minkowski::{mat_apply, mat_det, Mat3, MinkowskiVec};
use crate::pshape::{pshape_distance, pshape_from_frenet, PShapeDistance};
use crate::split_quaternion::{Orientation, PSimilarity, SplitQuaternion};
use crate::stencil;

pub const DEFAULT_MATCH_THRESHOLD: f64 = 1e-3;

/// Frame-alignment signs `s_i` in `L e_i = s_i e_i*`, tried in this order.
pub const SIGN_PATTERNS: [[f64; 3]; 4] = [
    [1.0, 1.0, 1.0],
    [1.0, 1.0, -1.0],
    [1.0, -1.0, 1.0],
    [1.0, -1.0, -1.0],
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchResult {
    pub f: PSimilarity,
    /// Max Euclidean `‖f(α(σ)) − α*(σ)‖` over the common σ grid.
    pub residual: f64,
    /// `(max − min)/mean` of the per-node ratios `κ/κ*`.
    pub mu_spread: f64,
    pub orientation: Orientation,
    pub sign_pattern: [f64; 3],
    pub pshape_distance: PShapeDistance,
}

impl MatchResult {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "mu": self.f.mu,
            "q": self.f.q,
            "b": self.f.b,
            "residual": self.residual,
            "orientation": self.orientation,
            "mu_spread": self.mu_spread,
            "sign_pattern": self.sign_pattern,
        })
    }
}

/// A curve's Frenet data seen as functions of σ.
struct SigmaView {
    fd: FrenetData,
    /// `dα/dσ` per node.
    rate: Vec<MinkowskiVec>,
}

impl SigmaView {
    fn new(c: &CurveSamples, tol: &Tolerances) -> Result<Self> {
        let fd = frenet_apparatus(c, tol)?;
        let rate = fd.e1.iter().zip(&fd.kappa).map(|(e, k)| *e / *k).collect();
        Ok(Self { fd, rate })
    }

    fn range(&self) -> (f64, f64) {
        (self.fd.sigma[0], self.fd.sigma[self.fd.len() - 1])
    }

    fn point(&self, s: f64) -> MinkowskiVec {
        let g = &self.fd.sigma;
        let i = stencil::locate(g, s);
        let w = stencil::hermite_weights(g[i], g[i + 1], s);
        let p = &self.fd.points;
        p[i] * w[0] + self.rate[i] * w[1] + p[i + 1] * w[2] + self.rate[i + 1] * w[3]
    }

    fn kappa(&self, s: f64) -> f64 {
        stencil::cubic_interp(&self.fd.sigma, &self.fd.kappa, s)
    }

    fn frame(&self, s: f64) -> [MinkowskiVec; 3] {
        let comp = |e: &[MinkowskiVec]| {
            let ch = |k: usize| {
                let vals: Vec<f64> = e.iter().map(|v| v[k]).collect();
                stencil::cubic_interp(&self.fd.sigma, &vals, s)
            };
            MinkowskiVec::new(ch(0), ch(1), ch(2))
        };
        [comp(&self.fd.e1), comp(&self.fd.e2), comp(&self.fd.e3)]
    }
}

/// Common σ grid of two curves: their overlap, with as many nodes as the
/// denser of the two has there.
fn common_grid(a: &SigmaView, b: &SigmaView) -> Result<Vec<f64>> {
    let (a0, a1) = a.range();
    let (b0, b1) = b.range();
    let (lo, hi) = (a0.max(b0), a1.min(b1));
    let count = |s: &[f64]| s.iter().filter(|x| **x >= lo && **x <= hi).count();
    let n = count(&a.fd.sigma).max(count(&b.fd.sigma));
    if !(hi > lo) || n < 3 {
        return Err(Error::NoOverlap);
    }
    Ok(uniform_grid(lo, hi, n))
}

/// `L v = Σ ε_i s_i (e_i·v) e_i*`, the pseudo-orthogonal map sending the
/// frame `e` to the signed frame `s e*`.
fn alignment(e: &[MinkowskiVec; 3], eps: [f64; 3], es: &[MinkowskiVec; 3], s: [f64; 3]) -> Mat3 {
    let mut m = [[0.0; 3]; 3];
    let basis = [
        MinkowskiVec::new(1.0, 0.0, 0.0),
        MinkowskiVec::new(0.0, 1.0, 0.0),
        MinkowskiVec::new(0.0, 0.0, 1.0),
    ];
    for (col, u) in basis.iter().enumerate() {
        let mut img = MinkowskiVec::ZERO;
        for i in 0..3 {
            img += es[i] * (eps[i] * s[i] * e[i].inner(*u));
        }
        for row in 0..3 {
            m[row][col] = img[row];
        }
    }
    m
}

fn scaled(m: &Mat3, k: f64) -> Mat3 {
    m.map(|r| r.map(|x| x * k))
}

/// Estimates `f` with `f∘a ≈ b`.
pub fn estimate_similarity(
    a: &CurveSamples,
    b: &CurveSamples,
    tol: &Tolerances,
    threshold: f64,
) -> Result<MatchResult> {
    let va = SigmaView::new(a, tol)?;
    let vb = SigmaView::new(b, tol)?;
    if va.fd.eps != vb.fd.eps {
        return Err(Error::CausalMismatch);
    }
    let dist = pshape_distance(&pshape_from_frenet(&va.fd)?, &pshape_from_frenet(&vb.fd)?)?;
    if dist.best() > threshold {
        return Err(Error::PShapeMismatch {
            distance: dist.best(),
            threshold,
        });
    }
    let grid = common_grid(&va, &vb)?;
    let logs: Vec<f64> = grid
        .iter()
        .map(|&s| (va.kappa(s) / vb.kappa(s)).ln())
        .collect();
    let mu_abs = (logs.iter().sum::<f64>() / logs.len() as f64).exp();
    let (lmin, lmax) = logs
        .iter()
        .fold((f64::MAX, f64::MIN), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    let mu_spread = (lmax.exp() - lmin.exp()) / mu_abs;

    let s0 = grid[grid.len() / 2];
    let (fa, fb) = (va.frame(s0), vb.frame(s0));
    let (pa0, pb0) = (va.point(s0), vb.point(s0));
    let pa: Vec<MinkowskiVec> = grid.iter().map(|&s| va.point(s)).collect();
    let pb: Vec<MinkowskiVec> = grid.iter().map(|&s| vb.point(s)).collect();

    let mut best: Option<(f64, Mat3, [f64; 3], MinkowskiVec)> = None;
    for pattern in SIGN_PATTERNS {
        let l = alignment(&fa, va.fd.eps, &fb, pattern);
        let lin = scaled(&l, mu_abs);
        let shift = pb0 - mat_apply(&lin, pa0);
        let res = pa
            .iter()
            .zip(&pb)
            .map(|(x, y)| (mat_apply(&lin, *x) + shift - *y).euclid_norm())
            .fold(0.0, f64::max);
        if best.as_ref().map_or(true, |(r, ..)| res < *r) {
            best = Some((res, l, pattern, shift));
        }
    }
    let (residual, l, pattern, shift) = best.expect("at least one sign pattern");
    let (l, mu) = if mat_det(&l) > 0.0 && l[0][0] > 0.0 {
        (l, mu_abs)
    } else if mat_det(&l) < 0.0 && l[0][0] < 0.0 {
        (scaled(&l, -1.0), -mu_abs)
    } else {
        return Err(Error::QuaternionExtractionFailure { matrix: l });
    };
    let q = SplitQuaternion::from_rotation_matrix(&l)
        .ok_or(Error::QuaternionExtractionFailure { matrix: l })?;
    let f = PSimilarity::new(mu, q, shift)?;
    Ok(MatchResult {
        orientation: f.orientation(),
        f,
        residual,
        mu_spread,
        sign_pattern: pattern,
        pshape_distance: dist,
    })
}

/// `max ‖f(a(σ)) − b(σ)‖` over the common σ grid, divided by the diameter
/// of `b` there.
pub fn verify_match(
    a: &CurveSamples,
    b: &CurveSamples,
    f: &PSimilarity,
    tol: &Tolerances,
) -> Result<f64> {
    f.validate()?;
    let va = SigmaView::new(a, tol)?;
    let vb = SigmaView::new(b, tol)?;
    let grid = common_grid(&va, &vb)?;
    let pb: Vec<MinkowskiVec> = grid.iter().map(|&s| vb.point(s)).collect();
    let mut worst = 0.0f64;
    for (s, y) in grid.iter().zip(&pb) {
        worst = worst.max((f.apply(va.point(*s))? - *y).euclid_norm());
    }
    Ok(worst / diameter(&pb).max(f64::MIN_POSITIVE))
}

fn diameter(p: &[MinkowskiVec]) -> f64 {
    let stride = (p.len() / 1000).max(1);
    let sub: Vec<&MinkowskiVec> = p.iter().step_by(stride).collect();
    let mut d = 0.0f64;
    for (i, x) in sub.iter().enumerate() {
        for y in &sub[i + 1..] {
            d = d.max((**x - **y).euclid_norm());
        }
    }
    d
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SelfSimilarity {
    pub is_self_similar: bool,
    /// Mean `(κ̃, τ̃)`, the constants `(b, a)` when self-similar.
    pub constants: (f64, f64),
    pub deviation: f64,
}

/// Whether the p-shape is constant within `tol` (sup-norm about the mean).
pub fn is_self_similar(a: &CurveSamples, tol: f64, tols: &Tolerances) -> Result<SelfSimilarity> {
    let p = pshape_from_frenet(&frenet_apparatus(a, tols)?)?;
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (mk, mt) = (mean(&p.kappa_tilde), mean(&p.tau_tilde));
    let dev = |v: &[f64], m: f64| v.iter().map(|x| (x - m).abs()).fold(0.0, f64::max);
    let deviation = dev(&p.kappa_tilde, mk).max(dev(&p.tau_tilde, mt));
    Ok(SelfSimilarity {
        is_self_similar: deviation <= tol,
        constants: (mk, mt),
        deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{AnalyticCurve, Example};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn ex(e: Example, a: f64, b: f64) -> CurveSamples {
        AnalyticCurve::new(e, a, b)
            .unwrap()
            .sample((0.0, 2.0), 2001)
            .unwrap()
    }

    #[test]
    fn identity_match() {
        let a = ex(Example::OrII, 2.0, 0.0);
        let m = estimate_similarity(&a, &a, &tol(), DEFAULT_MATCH_THRESHOLD).unwrap();
        assert!(m.residual < 1e-10, "{}", m.residual);
        assert!((m.f.mu - 1.0).abs() < 1e-10);
        assert_eq!(m.orientation, Orientation::Preserving);
    }

    #[test]
    fn recovers_random_similarity() {
        let a = ex(Example::OrII, 2.0, 0.0);
        for seed in 0..5 {
            let f = PSimilarity::random(seed, (0.5, 2.0));
            let b = a.transformed(&f).unwrap();
            let m = estimate_similarity(&a, &b, &tol(), DEFAULT_MATCH_THRESHOLD).unwrap();
            assert!((m.f.mu / f.mu - 1.0).abs() < 1e-6, "{} vs {}", m.f.mu, f.mu);
            assert!(m.residual < 1e-6, "{}", m.residual);
            assert!(m.mu_spread < 1e-6);
            assert!(verify_match(&a, &b, &m.f, &tol()).unwrap() < 1e-6);
        }
    }

    #[test]
    fn different_pshapes_do_not_match() {
        let a = ex(Example::OrI, 1.0, 0.0);
        let b = ex(Example::SelfSimilarT, 1.0, 0.5);
        assert!(matches!(
            estimate_similarity(&a, &b, &tol(), DEFAULT_MATCH_THRESHOLD),
            Err(Error::PShapeMismatch { .. })
        ));
    }

    #[test]
    fn causal_mismatch() {
        let a = ex(Example::OrI, 1.0, 0.0);
        let b = ex(Example::OrII, 2.0, 0.0);
        assert!(matches!(
            estimate_similarity(&a, &b, &tol(), 10.0),
            Err(Error::CausalMismatch)
        ));
    }

    #[test]
    fn verify_match_scales_with_perturbation() {
        let a = ex(Example::SelfSimilarC, 2.0, 1.0);
        let f = PSimilarity::random(3, (0.5, 2.0));
        let b = a.transformed(&f).unwrap();
        assert!(verify_match(&a, &b, &f, &tol()).unwrap() < 1e-10);
        let mut g = f;
        g.mu += 1e-3;
        let r1 = verify_match(&a, &b, &g, &tol()).unwrap();
        g.mu = f.mu + 2e-3;
        let r2 = verify_match(&a, &b, &g, &tol()).unwrap();
        assert!(r1 > 1e-5 && (r2 / r1 - 2.0).abs() < 1e-3, "{r1} {r2}");
    }

    #[test]
    fn disjoint_ranges() {
        let c = AnalyticCurve::new(Example::OrI, 1.0, 0.0).unwrap();
        let a = c.sample((0.0, 1.0), 101).unwrap();
        let b = c.sample((2.0, 3.0), 101).unwrap();
        assert!(matches!(
            verify_match(&a, &b, &PSimilarity::IDENTITY, &tol()),
            Err(Error::NoOverlap)
        ));
    }

    #[test]
    fn self_similarity() {
        let r = is_self_similar(&ex(Example::SelfSimilarQ, 2.0, 1.0), 1e-5, &tol()).unwrap();
        assert!(r.is_self_similar);
        assert!((r.constants.0 - 1.0).abs() < 1e-5 && (r.constants.1 - 2.0).abs() < 1e-5);
        let log = AnalyticCurve::new(Example::LogShape, 2.0, 0.0)
            .unwrap()
            .sample((0.5, 2.5), 2001)
            .unwrap();
        assert!(!is_self_similar(&log, 1e-5, &tol()).unwrap().is_self_similar);
        let t = uniform_grid(0.0, 3.0, 3001);
        let pts = t
            .iter()
            .map(|&s| MinkowskiVec::new(0.0, s.cos(), s.sin()))
            .collect();
        let r = is_self_similar(&CurveSamples::new(t, pts).unwrap(), 1e-5, &tol()).unwrap();
        assert!(r.is_self_similar);
        assert!(r.constants.0.abs() < 1e-5 && r.constants.1.abs() < 1e-5);
    }
}
