//! Truncated attempt-by-attempt series for the service-time transform
//! and mean.
//!
//! Term k of the transform series is the contribution of a driver whose
//! first k attempts fail and whose attempt k+1 succeeds. Truncation stops
//! once the probability that all attempts so far failed (the running
//! product at the real point q) drops below the configured tolerance;
//! every discarded term is a transform restricted to that event, so the
//! product itself bounds the discarded transform mass.

use num_complex::Complex64;

use super::AnalyticError;

/// Truncation controls for the attempt series: a relative tolerance on
/// the certified tail bound and a hard cap on the number of terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSettings {
    /// Stop once the tail bound falls below this value.
    pub tol: f64,
    /// Give up with a truncation error after this many terms.
    pub max_terms: usize,
}

/// A converged truncated sum plus an upper estimate of the discarded tail.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Truncated<T> {
    pub value: T,
    #[allow(dead_code)]
    pub tail_bound: f64,
    #[allow(dead_code)]
    pub terms: usize,
}

/// Transform series with per-attempt transforms supplied by the caller:
/// `m_at(j, u)` is E[e^{-u T_j}] at u = s + q, and `m_at_q(j)` is the same
/// at the real point q (the attempt-j success probability).
pub(crate) fn lst_series(
    s: Complex64,
    q: f64,
    m_at: impl Fn(usize, Complex64) -> Complex64,
    m_at_q: impl Fn(usize) -> f64,
    cfg: SeriesSettings,
) -> Result<Truncated<Complex64>, AnalyticError> {
    if q == 0.0 {
        // The first gap is unbounded, so the first attempt succeeds.
        return Ok(Truncated {
            value: m_at(1, s),
            tail_bound: 0.0,
            terms: 1,
        });
    }
    let u = s + q;
    let ratio = Complex64::from(q) / u;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut geom = Complex64::new(1.0, 0.0);
    let mut fail_product = Complex64::new(1.0, 0.0);
    let mut fail_probability = 1.0_f64;
    for k in 0..cfg.max_terms {
        let m = m_at(k + 1, u);
        sum += geom * m * fail_product;
        fail_product *= Complex64::new(1.0, 0.0) - m;
        fail_probability *= 1.0 - m_at_q(k + 1);
        if fail_probability < cfg.tol {
            return Ok(Truncated {
                value: sum,
                tail_bound: fail_probability,
                terms: k + 1,
            });
        }
        geom *= ratio;
    }
    Err(AnalyticError::Truncation {
        terms: cfg.max_terms,
        tail_bound: fail_probability,
    })
}

/// Mean-service series with per-attempt ingredients supplied by the
/// caller: `mw_at(j)` returns `(E[e^{-q T_j}], E[T_j e^{-q T_j}])`.
///
/// `headway_cap` must bound E[T_j] for every attempt j; it feeds the tail
/// estimate. Term k is the expected service time restricted to success at
/// attempt k+1: the headway paid there, plus the k wasted gaps, each worth
/// E[gap | gap < T_j] for its attempt.
pub(crate) fn mean_series(
    q: f64,
    mw_at: impl Fn(usize) -> (f64, f64),
    headway_cap: f64,
    cfg: SeriesSettings,
) -> Result<Truncated<f64>, AnalyticError> {
    debug_assert!(q > 0.0, "callers handle the empty major road directly");
    // Future failure odds stay below r = 1 - e^{-q * cap}, since e^{-qT}
    // is convex and every E[T_j] is at most the cap; each discarded term
    // j is bounded by P_j * (cap + j/q), and the geometric sum of those
    // bounds gives the per-iteration tail estimate below. The complement
    // of r is kept directly: near-certain early failures would otherwise
    // round it to zero and blow up the bracket.
    let pass_floor = (-q * headway_cap).exp();
    let mut sum = 0.0;
    let mut fail_probability = 1.0_f64;
    let mut blocked_cost = 0.0;
    let mut tail = f64::INFINITY;
    for k in 0..cfg.max_terms {
        let (m, w) = mw_at(k + 1);
        sum += (w + m * (k as f64 / q - blocked_cost)) * fail_probability;
        let fail = 1.0 - m;
        fail_probability *= fail;
        let bracket = (headway_cap + (k + 1) as f64 / q) / pass_floor
            + (1.0 - pass_floor) / (pass_floor * pass_floor) / q;
        tail = if fail_probability == 0.0 {
            0.0
        } else {
            fail_probability * bracket
        };
        if tail <= cfg.tol * 1.0_f64.max(sum.abs()) {
            return Ok(Truncated {
                value: sum,
                tail_bound: tail,
                terms: k + 1,
            });
        }
        // fail > 0 here: the tail bound is still above the tolerance.
        blocked_cost += w / fail;
    }
    Err(AnalyticError::Truncation {
        terms: cfg.max_terms,
        tail_bound: tail,
    })
}
