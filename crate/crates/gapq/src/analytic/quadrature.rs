//! Gauss-Legendre quadrature for expectations over continuous headway
//! laws, used by the per-driver population where the outer average over
//! the driver's headway has no closed form.
//!
//! Integration runs on [0, Q] with Q a high quantile of the relevant law.
//! For integrands that grow like e^{qt} or e^{2qt} the quantile comes from
//! the exponentially tilted law (rate reduced by q or 2q), otherwise the
//! truncated mass is not negligible; those integrands are also evaluated
//! in fused form (products of non-positive exponents) so that no factor
//! overflows near criticality. Gamma laws with shape below one substitute
//! x = t^shape, which removes the density singularity at zero.

use std::sync::OnceLock;

use num_complex::Complex64;
use statrs::distribution::ContinuousCDF;
use statrs::function::gamma::gamma as gamma_fn;

use super::AnalyticError;
use crate::headway::HeadwayDistribution;

/// Probability mass allowed beyond the integration endpoint.
const TAIL_EPS: f64 = 1e-13;
/// Panel doubling stops when successive grids agree to this relative size.
const AGREE_RTOL: f64 = 1e-9;
const MAX_PANELS: usize = 256;
const NODES: usize = 128;

/// Legendre polynomial value and derivative by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 2..=n {
        let kf = k as f64;
        let p_next = ((2.0 * kf - 1.0) * x * p - (kf - 1.0) * p_prev) / kf;
        p_prev = p;
        p = p_next;
    }
    let dp = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}

/// Nodes and weights on [-1, 1], computed once by Newton iteration.
fn gauss_legendre() -> &'static ([f64; NODES], [f64; NODES]) {
    static TABLE: OnceLock<([f64; NODES], [f64; NODES])> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut xs = [0.0; NODES];
        let mut ws = [0.0; NODES];
        for i in 0..NODES {
            let mut x =
                (std::f64::consts::PI * (i as f64 + 0.75) / (NODES as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre(NODES, x);
                let step = p / dp;
                x -= step;
                if step.abs() < 1e-15 {
                    break;
                }
            }
            let (_, dp) = legendre(NODES, x);
            xs[i] = x;
            ws[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        (xs, ws)
    })
}

/// Values a quadrature sum can accumulate.
pub(crate) trait Accumulate: Copy {
    fn zero() -> Self;
    fn add_scaled(self, value: Self, weight: f64) -> Self;
    fn scale_by(self, factor: f64) -> Self;
    fn agrees_with(&self, other: &Self, rtol: f64) -> bool;
}

impl Accumulate for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add_scaled(self, value: Self, weight: f64) -> Self {
        self + value * weight
    }
    fn scale_by(self, factor: f64) -> Self {
        self * factor
    }
    fn agrees_with(&self, other: &Self, rtol: f64) -> bool {
        let scale = self.abs().max(other.abs());
        (self - other).abs() <= rtol * scale || scale == 0.0
    }
}

impl Accumulate for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn add_scaled(self, value: Self, weight: f64) -> Self {
        self + value * weight
    }
    fn scale_by(self, factor: f64) -> Self {
        self * factor
    }
    fn agrees_with(&self, other: &Self, rtol: f64) -> bool {
        let scale = self.norm().max(other.norm());
        (self - other).norm() <= rtol * scale || scale == 0.0
    }
}

fn sweep<T: Accumulate, E>(
    f: &impl Fn(f64) -> Result<T, E>,
    a: f64,
    b: f64,
    panels: usize,
) -> Result<T, E> {
    let (xs, ws) = gauss_legendre();
    let width = (b - a) / panels as f64;
    let mut acc = T::zero();
    for p in 0..panels {
        let half = 0.5 * width;
        let mid = a + p as f64 * width + half;
        for (x, w) in xs.iter().zip(ws.iter()) {
            acc = acc.add_scaled(f(mid + half * x)?, w * half);
        }
    }
    Ok(acc)
}

/// Integrates on [a, b], doubling the panel count until two successive
/// grids agree.
pub(crate) fn integrate<T: Accumulate>(
    f: impl Fn(f64) -> Result<T, AnalyticError>,
    a: f64,
    b: f64,
) -> Result<T, AnalyticError> {
    let mut prev = sweep(&f, a, b, 1)?;
    let mut panels = 2;
    while panels <= MAX_PANELS {
        let cur = sweep(&f, a, b, panels)?;
        if cur.agrees_with(&prev, AGREE_RTOL) {
            return Ok(cur);
        }
        prev = cur;
        panels *= 2;
    }
    Err(AnalyticError::QuadratureNoConvergence(MAX_PANELS))
}

/// Quantile of an exponential or gamma law at probability 1 - TAIL_EPS,
/// optionally with the rate reduced by a tilt.
fn upper_point(dist: &HeadwayDistribution, tilt: f64) -> f64 {
    match dist {
        HeadwayDistribution::Exponential { rate } => -TAIL_EPS.ln() / (rate - tilt),
        HeadwayDistribution::Gamma { shape, rate } => {
            statrs::distribution::Gamma::new(*shape, rate - tilt)
                .expect("validated: shape > 0, rate > tilt")
                .inverse_cdf(1.0 - TAIL_EPS)
        }
        _ => unreachable!("quadrature applies only to continuous laws"),
    }
}

/// E[g(T)] over a continuous law for bounded `g`: density-weighted
/// integral to the plain upper quantile.
pub(crate) fn expect<T: Accumulate>(
    dist: &HeadwayDistribution,
    g: impl Fn(f64) -> Result<T, AnalyticError>,
) -> Result<T, AnalyticError> {
    density_weighted(dist, 0.0, |(t, damp): (f64, f64)| {
        Ok(g(t)?.scale_by(damp.exp()))
    })
}

/// E[Y] of a per-driver model without impatience: the conditional mean at
/// headway t is (e^{qt} - 1)/q, fused with the density factor e^{-mu t}
/// into (e^{(q-mu)t} - e^{-mu t})/q. Callers have already ruled out a
/// divergent mgf at q.
pub(crate) fn per_driver_mean(dist: &HeadwayDistribution, q: f64) -> Result<f64, AnalyticError> {
    density_weighted(dist, q, |(t, damp): (f64, f64)| {
        Ok(((q * t + damp).exp() - damp.exp()) / q)
    })
}

/// E[Y^2] of a per-driver model without impatience, via the closed
/// conditional second moment 2G(G + t + 1/q) with G = (e^{qt} - 1 - qt)/q.
/// Callers have already ruled out a divergent mgf at 2q.
pub(crate) fn per_driver_second_moment(
    dist: &HeadwayDistribution,
    q: f64,
) -> Result<f64, AnalyticError> {
    density_weighted(dist, 2.0 * q, |(t, damp): (f64, f64)| {
        // Half the damping goes to each G-like factor so each carries
        // exponents q t + damp / 2 <= 0.
        let half = 0.5 * damp;
        let g_damped = ((q * t + half).exp() - (1.0 + q * t) * half.exp()) / q;
        Ok(2.0 * g_damped * (g_damped + (t + 1.0 / q) * half.exp()))
    })
}

/// Density-weighted integral shared by the adapters above. The integrand
/// receives `(t, -mu t)`; the exponential density factor e^{-mu t} is NOT
/// pre-applied, so growing integrands can fuse it with their own
/// exponents. The upper endpoint uses the law tilted by `tilt`.
fn density_weighted<T: Accumulate>(
    dist: &HeadwayDistribution,
    tilt: f64,
    core: impl Fn((f64, f64)) -> Result<T, AnalyticError>,
) -> Result<T, AnalyticError> {
    match dist {
        HeadwayDistribution::Exponential { rate } => {
            let mu = *rate;
            debug_assert!(tilt < mu);
            let upper = upper_point(dist, tilt);
            integrate(|t| Ok(core((t, -mu * t))?.scale_by(mu)), 0.0, upper)
        }
        HeadwayDistribution::Gamma { shape, rate } => {
            let (k, mu) = (*shape, *rate);
            debug_assert!(tilt < mu);
            let upper = upper_point(dist, tilt);
            if k >= 1.0 {
                let norm = mu.powf(k) / gamma_fn(k);
                integrate(
                    |t| Ok(core((t, -mu * t))?.scale_by(norm * t.powf(k - 1.0))),
                    0.0,
                    upper,
                )
            } else {
                // x = t^k: the Jacobian absorbs the singular t^{k-1} factor.
                let norm = mu.powf(k) / (k * gamma_fn(k));
                integrate(
                    |x| {
                        let t = x.powf(1.0 / k);
                        Ok(core((t, -mu * t))?.scale_by(norm))
                    },
                    0.0,
                    upper.powf(k),
                )
            }
        }
        _ => unreachable!("quadrature applies only to continuous laws"),
    }
}
