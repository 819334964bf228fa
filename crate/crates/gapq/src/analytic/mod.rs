//! Analytic service-time characterization for the merge queue.
//!
//! Viewed from the minor road, the time a queue-head driver occupies the
//! stop line is the service time of an M/G/1 queue: it starts when the
//! driver reaches the head position and ends when the driver merges. This
//! module computes the Laplace-Stieltjes transform and moments of that
//! service time for every behavior/impatience combination, and derives
//! capacity and stability from them. Queueing metrics built on top of the
//! transform (waiting time, queue length) live in [`queue`].
//!
//! Closed forms are used where the model admits them (no impatience);
//! impatient models fall back to a truncated series over the number of
//! rejected gaps, with a certified bound on the discarded tail.

mod quadrature;
pub mod queue;
mod series;

use num_complex::Complex64;

use crate::headway::{
    Behavior, HeadwayDistribution, ImpatiencePolicy, ModelSpec, ModelTemplate, SpecError,
};

pub use series::SeriesSettings;

/// Failures surfaced by the analytic layer.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalyticError {
    /// The underlying model specification was rejected.
    #[error(transparent)]
    Spec(#[from] SpecError),
    /// The series hit its term budget before the tail bound fell under
    /// the requested tolerance.
    #[error("series truncated after {terms} terms with tail bound {tail_bound:.3e} above tolerance")]
    Truncation { terms: usize, tail_bound: f64 },
    /// Panel doubling stopped improving before two consecutive quadrature
    /// refinements agreed.
    #[error("quadrature failed to converge after {0} panel doublings")]
    QuadratureNoConvergence(usize),
    /// A queue metric was requested for a saturated system.
    #[error("system is unstable: utilization {rho:.6} >= 1 (capacity {capacity:.6} veh/s)")]
    Unstable { rho: f64, capacity: f64 },
    /// The requested service moment does not exist.
    #[error("service-time moment of order {order} is infinite")]
    InfiniteMoment { order: u8 },
    /// Transform inversion produced a probability below the numerical
    /// noise floor, indicating an inconsistent transform.
    #[error("queue-length inversion produced probability {value:.3e} at index {index}")]
    NegativeProbability { index: usize, value: f64 },
    /// The truncation controls requested from the caller are unusable.
    #[error("truncation tolerance must be positive and max_terms nonzero")]
    BadTruncationSettings,
    /// The minor-road arrival rate must be a nonnegative finite number.
    #[error("arrival rate {0} must be nonnegative and finite")]
    BadArrivalRate(f64),
}

/// Service-time transform when every attempt requires the same headway
/// `t`: the driver merges on the first major-road gap of at least `t`,
/// waiting out each shorter gap in full.
pub fn fixed_headway_lst(s: Complex64, q: f64, t: f64) -> Complex64 {
    if s.norm() == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let u = s + q;
    let e = (-u * t).exp();
    u * e / (s + q * e)
}

/// Analytic engine for one fully specified model.
///
/// Construction validates the spec; afterwards every method is pure and
/// deterministic. Series-based paths honor the truncation controls set at
/// construction or via [`ServiceCharacterization::with_truncation`].
#[derive(Debug, Clone)]
pub struct ServiceCharacterization {
    spec: ModelSpec,
    settings: SeriesSettings,
}

impl ServiceCharacterization {
    /// Default relative tolerance on truncated series tails.
    pub const DEFAULT_TOLERANCE: f64 = 1e-12;
    /// Default cap on the number of series terms.
    pub const DEFAULT_MAX_TERMS: usize = 100_000;

    /// Validates the spec and builds an engine with default truncation
    /// controls.
    pub fn new(spec: ModelSpec) -> Result<Self, AnalyticError> {
        spec.validate()?;
        Ok(Self {
            spec,
            settings: SeriesSettings {
                tol: Self::DEFAULT_TOLERANCE,
                max_terms: Self::DEFAULT_MAX_TERMS,
            },
        })
    }

    /// Overrides the truncation controls for the series-based paths.
    pub fn with_truncation(mut self, tolerance: f64, max_terms: usize) -> Result<Self, AnalyticError> {
        if !(tolerance > 0.0 && tolerance.is_finite()) || max_terms == 0 {
            return Err(AnalyticError::BadTruncationSettings);
        }
        self.settings = SeriesSettings {
            tol: tolerance,
            max_terms,
        };
        Ok(self)
    }

    /// The validated model this engine evaluates.
    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    /// Current truncation controls.
    pub fn settings(&self) -> SeriesSettings {
        self.settings
    }

    fn deterministic_value(&self) -> f64 {
        match self.spec.dist {
            HeadwayDistribution::Deterministic(t) => t,
            _ => unreachable!("validated: constant behavior requires a deterministic headway"),
        }
    }

    /// Largest mean headway any attempt can require, used for series tail
    /// bounds. Affine decay shrinks toward its floor, so the first
    /// attempt's mean and the floor jointly dominate; explicit sequences
    /// are nonincreasing from their first entry.
    fn headway_cap(&self) -> f64 {
        let first_mean = self.spec.dist.mean();
        match &self.spec.policy {
            ImpatiencePolicy::None => first_mean,
            ImpatiencePolicy::AffineDecay { delta, .. } => first_mean.max(*delta),
            ImpatiencePolicy::ExplicitSequence { values, terminal } => {
                values.first().copied().unwrap_or(*terminal)
            }
        }
    }

    /// Service-time transform at `s` (requires `Re(s) >= 0`).
    ///
    /// Dispatches to closed forms for patient models and to the rejected-
    /// gap series otherwise. With zero major-road flow the first gap is
    /// infinite and service equals the first required headway.
    pub fn service_lst(&self, s: Complex64) -> Result<Complex64, AnalyticError> {
        let q = self.spec.q;
        if q == 0.0 {
            return Ok(match self.spec.behavior {
                Behavior::Constant => (-s * self.deterministic_value()).exp(),
                _ => self.spec.dist.lst(s),
            });
        }
        if self.spec.policy.is_none() {
            return Ok(match self.spec.behavior {
                Behavior::Constant => fixed_headway_lst(s, q, self.deterministic_value()),
                Behavior::PerAttempt => {
                    if s.norm() == 0.0 {
                        Complex64::new(1.0, 0.0)
                    } else {
                        let u = s + q;
                        let m = self.spec.dist.lst(u);
                        u * m / (s + q * m)
                    }
                }
                Behavior::PerDriver => match self.spec.dist.atoms() {
                    Some(atoms) => atoms
                        .into_iter()
                        .map(|(t, p)| p * fixed_headway_lst(s, q, t))
                        .sum(),
                    None => quadrature::expect(&self.spec.dist, |t| {
                        Ok(fixed_headway_lst(s, q, t))
                    })?,
                },
            });
        }
        self.service_lst_series(s)
    }

    /// Service-time transform evaluated through the rejected-gap series,
    /// regardless of whether a closed form exists. Useful as an
    /// independent cross-check of [`ServiceCharacterization::service_lst`].
    ///
    /// The per-driver continuous case without impatience has no series
    /// route of its own (conditioning removes the attempt index), so it
    /// evaluates the conditional closed form under the headway average.
    pub fn service_lst_series(&self, s: Complex64) -> Result<Complex64, AnalyticError> {
        let q = self.spec.q;
        let cfg = self.settings;
        match self.spec.behavior {
            Behavior::Constant => {
                let t1 = self.deterministic_value();
                let policy = &self.spec.policy;
                series::lst_series(
                    s,
                    q,
                    |j, u| (-u * policy.attempt_headway(t1, j)).exp(),
                    |j| (-q * policy.attempt_headway(t1, j)).exp(),
                    cfg,
                )
                .map(|r| r.value)
            }
            Behavior::PerAttempt => {
                let dist = &self.spec.dist;
                let coeffs = |j: usize| {
                    self.spec
                        .policy
                        .attempt_affine_coeffs(j)
                        .expect("validated: resampling behaviors use affine impatience")
                };
                series::lst_series(
                    s,
                    q,
                    |j, u| {
                        let (a, b) = coeffs(j);
                        (-u * b).exp() * dist.lst(u * a)
                    },
                    |j| {
                        let (a, b) = coeffs(j);
                        (-q * b).exp() * dist.lst_real(q * a)
                    },
                    cfg,
                )
                .map(|r| r.value)
            }
            Behavior::PerDriver => {
                let policy = self.spec.policy.clone();
                let fixed = |t: f64| -> Result<Complex64, AnalyticError> {
                    if policy.is_none() {
                        Ok(fixed_headway_lst(s, q, t))
                    } else {
                        series::lst_series(
                            s,
                            q,
                            |j, u| (-u * policy.attempt_headway(t, j)).exp(),
                            |j| (-q * policy.attempt_headway(t, j)).exp(),
                            cfg,
                        )
                        .map(|r| r.value)
                    }
                };
                match self.spec.dist.atoms() {
                    Some(atoms) => {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for (t, p) in atoms {
                            acc += p * fixed(t)?;
                        }
                        Ok(acc)
                    }
                    None => quadrature::expect(&self.spec.dist, fixed),
                }
            }
        }
    }

    /// Mean service time in seconds. Returns `f64::INFINITY` when the
    /// mean diverges (possible only for per-driver headways with an
    /// unbounded moment generating function at the flow rate).
    pub fn mean_service(&self) -> Result<f64, AnalyticError> {
        let q = self.spec.q;
        if q == 0.0 {
            return Ok(match self.spec.behavior {
                Behavior::Constant => self.deterministic_value(),
                _ => self.spec.dist.mean(),
            });
        }
        if self.spec.policy.is_none() {
            return Ok(match self.spec.behavior {
                Behavior::Constant => (q * self.deterministic_value()).exp_m1() / q,
                Behavior::PerAttempt => {
                    let m = self.spec.dist.lst_real(q);
                    self.spec.dist.one_minus_lst(q) / (q * m)
                }
                Behavior::PerDriver => self.spec.dist.mgf_m1(q) / q,
            });
        }
        self.mean_service_series()
    }

    /// Mean service time evaluated through the rejected-gap series,
    /// regardless of whether a closed form exists.
    ///
    /// As with the transform, the per-driver continuous case without
    /// impatience has no attempt series; it integrates the conditional
    /// closed-form mean against the headway density after checking that
    /// the average converges at all.
    pub fn mean_service_series(&self) -> Result<f64, AnalyticError> {
        let q = self.spec.q;
        let cfg = self.settings;
        if q == 0.0 {
            return self.mean_service();
        }
        let cap = self.headway_cap();
        match self.spec.behavior {
            Behavior::Constant => {
                let t1 = self.deterministic_value();
                let policy = &self.spec.policy;
                series::mean_series(
                    q,
                    |j| {
                        let tj = policy.attempt_headway(t1, j);
                        let m = (-q * tj).exp();
                        (m, tj * m)
                    },
                    cap,
                    cfg,
                )
                .map(|r| r.value)
            }
            Behavior::PerAttempt => {
                let dist = &self.spec.dist;
                let coeffs = |j: usize| {
                    self.spec
                        .policy
                        .attempt_affine_coeffs(j)
                        .expect("validated: resampling behaviors use affine impatience")
                };
                series::mean_series(
                    q,
                    |j| {
                        let (a, b) = coeffs(j);
                        let damp = (-q * b).exp();
                        let m = damp * dist.lst_real(q * a);
                        let w = damp * (a * dist.weighted_lst(q * a) + b * dist.lst_real(q * a));
                        (m, w)
                    },
                    cap,
                    cfg,
                )
                .map(|r| r.value)
            }
            Behavior::PerDriver => {
                if self.spec.policy.is_none() && self.spec.dist.mgf(q) == f64::INFINITY {
                    return Ok(f64::INFINITY);
                }
                let policy = self.spec.policy.clone();
                let fixed_mean = |t: f64| -> Result<f64, AnalyticError> {
                    let t_cap = match &policy {
                        ImpatiencePolicy::None => t,
                        ImpatiencePolicy::AffineDecay { delta, .. } => t.max(*delta),
                        ImpatiencePolicy::ExplicitSequence { values, terminal } => {
                            values.first().copied().unwrap_or(*terminal)
                        }
                    };
                    series::mean_series(
                        q,
                        |j| {
                            let tj = policy.attempt_headway(t, j);
                            let m = (-q * tj).exp();
                            (m, tj * m)
                        },
                        t_cap,
                        cfg,
                    )
                    .map(|r| r.value)
                };
                match self.spec.dist.atoms() {
                    Some(atoms) => {
                        let mut acc = 0.0;
                        for (t, p) in atoms {
                            acc += p * fixed_mean(t)?;
                        }
                        Ok(acc)
                    }
                    None => {
                        if self.spec.policy.is_none() {
                            quadrature::per_driver_mean(&self.spec.dist, q)
                        } else {
                            quadrature::expect(&self.spec.dist, fixed_mean)
                        }
                    }
                }
            }
        }
    }

    /// Raw service-time moment of order `k` (only `k = 1` and `k = 2` are
    /// supported). Returns [`AnalyticError::InfiniteMoment`] when the
    /// moment diverges.
    ///
    /// Moments come from Richardson-extrapolated central differences of
    /// the transform on the real axis. The per-driver continuous case
    /// without impatience is the exception: there the transform diverges
    /// for every `Re(s) < 0`, so differencing across zero is meaningless
    /// and closed conditional moments are averaged over the headway law
    /// instead.
    pub fn service_moment(&self, k: u8) -> Result<f64, AnalyticError> {
        assert!(k == 1 || k == 2, "only the first two service moments are supported");
        let q = self.spec.q;
        if self.spec.behavior == Behavior::PerDriver && self.spec.policy.is_none() && q > 0.0 {
            if self.spec.dist.mgf(f64::from(k) * q) == f64::INFINITY {
                return Err(AnalyticError::InfiniteMoment { order: k });
            }
            if self.spec.dist.is_continuous() {
                return match k {
                    1 => quadrature::per_driver_mean(&self.spec.dist, q),
                    _ => quadrature::per_driver_second_moment(&self.spec.dist, q),
                };
            }
        }
        let ey = self.mean_service()?;
        if !ey.is_finite() {
            return Err(AnalyticError::InfiniteMoment { order: k });
        }
        let mut h0 = 1e-3 * 1.0f64.max(1.0 / ey);
        if q > 0.0 {
            h0 = h0.min(q / 8.0);
        } else if let Some(scale) = match self.spec.dist {
            HeadwayDistribution::Exponential { rate } => Some(rate),
            HeadwayDistribution::Gamma { rate, .. } => Some(rate),
            _ => None,
        } {
            h0 = h0.min(scale / 8.0);
        }
        let f = |x: f64| -> Result<f64, AnalyticError> {
            Ok(self.service_lst(Complex64::new(x, 0.0))?.re)
        };
        const LEVELS: usize = 5;
        let mut table = [[0.0f64; LEVELS]; LEVELS];
        let mut h = h0;
        for i in 0..LEVELS {
            table[i][0] = if k == 1 {
                (f(-h)? - f(h)?) / (2.0 * h)
            } else {
                (f(h)? - 2.0 + f(-h)?) / (h * h)
            };
            for j in 1..=i {
                let fac = 4f64.powi(j as i32);
                table[i][j] = (fac * table[i][j - 1] - table[i - 1][j - 1]) / (fac - 1.0);
            }
            h *= 0.5;
        }
        Ok(table[LEVELS - 1][LEVELS - 1])
    }

    /// Minor-road capacity in vehicles per second: the reciprocal mean
    /// service time, or zero when the mean diverges.
    pub fn capacity(&self) -> Result<f64, AnalyticError> {
        let ey = self.mean_service()?;
        Ok(if ey.is_finite() { 1.0 / ey } else { 0.0 })
    }

    /// Stability check for a minor-road arrival rate `lambda` (vehicles
    /// per second). Returns `(stable, utilization)`; utilization is
    /// `lambda` times the mean service time and may be infinite.
    pub fn is_stable(&self, lambda: f64) -> Result<(bool, f64), AnalyticError> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(AnalyticError::BadArrivalRate(lambda));
        }
        if lambda == 0.0 {
            return Ok((true, 0.0));
        }
        let ey = self.mean_service()?;
        let rho = lambda * ey;
        Ok((rho < 1.0, rho))
    }
}

/// One labeled column of a capacity table.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepColumn {
    /// Column label, carried through to rendered output.
    pub label: String,
    /// Capacity (vehicles per second) at each grid point; `None` marks a
    /// cell whose evaluation failed.
    pub capacities: Vec<Option<f64>>,
}

/// Evaluates the capacity of each labeled model template across a grid of
/// major-road flow rates (vehicles per second). Cells that fail to
/// evaluate become `None` rather than aborting the sweep.
pub fn capacity_sweep(templates: &[(String, ModelTemplate)], q_grid: &[f64]) -> Vec<SweepColumn> {
    templates
        .iter()
        .map(|(label, template)| SweepColumn {
            label: label.clone(),
            capacities: q_grid
                .iter()
                .map(|&q| {
                    ServiceCharacterization::new(template.at_flow(q))
                        .and_then(|sc| sc.capacity())
                        .ok()
                })
                .collect(),
        })
        .collect()
}
