//! Discrete-event Monte Carlo oracle for the two-stream intersection.
//!
//! The simulator realizes the physical system directly: major-road cars
//! pass at exponential inter-times, minor-road cars arrive Poisson and
//! queue, and the head of the queue departs on the first gap at least as
//! long as the required headway for the current attempt. It shares no
//! formulas with the analytic module beyond the model definition, so
//! agreement between the two is meaningful evidence for both.
//!
//! A successful driver occupies the stop line until exactly the required
//! headway after the attempt started; the next driver's first attempt
//! begins at that instant against the remainder of the current gap.

use std::collections::VecDeque;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::headway::{Behavior, ModelSpec, SpecError};

/// Queue length at which a run is declared unstable and stopped early.
const QUEUE_GUARD: usize = 1_000_000;

/// Failures surfaced by the simulation layer.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    /// The underlying model specification was rejected.
    #[error(transparent)]
    Spec(#[from] SpecError),
    /// The simulated horizon must be a positive duration.
    #[error("simulation horizon must be positive and finite, got {0}")]
    BadHorizon(f64),
    /// The warm-up fraction must leave a nonempty measurement window.
    #[error("warm-up fraction must lie in [0, 1), got {0}")]
    BadWarmup(f64),
    /// Batch-means confidence intervals need at least two batches.
    #[error("batch-means estimation needs at least 2 batches, got {0}")]
    TooFewBatches(usize),
    /// The minor-road arrival rate must be a nonnegative finite number.
    #[error("arrival rate {0} must be nonnegative and finite")]
    BadArrivalRate(f64),
    /// Saturated estimation cannot fill its batches.
    #[error("saturated estimation needs at least {wanted} services, got {got}")]
    TooFewServices { got: usize, wanted: usize },
}

/// A point estimate with its 95% batch-means confidence half-width.
///
/// Estimates with no samples report zero with an infinite half-width so
/// that results stay comparable across runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub half_width: f64,
}

impl Estimate {
    /// Whether `value` lies inside the confidence interval.
    pub fn covers(&self, value: f64) -> bool {
        (value - self.mean).abs() <= self.half_width
    }
}

/// Configuration of one full-intersection replication.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    /// Driver behavior, headway law, impatience, and major-road flow.
    pub spec: ModelSpec,
    /// Minor-road Poisson arrival rate, vehicles per second.
    pub lambda: f64,
    /// Simulated time span in seconds.
    pub horizon: f64,
    /// Leading fraction of the horizon discarded before statistics.
    pub warmup_fraction: f64,
    /// Number of equal batches for the confidence intervals.
    pub n_batches: usize,
    /// Seed for the replication's random stream.
    pub seed: u64,
}

impl SimConfig {
    /// Builds a config with the default warm-up (10%) and batch count (32).
    pub fn new(spec: ModelSpec, lambda: f64, horizon: f64, seed: u64) -> Self {
        Self {
            spec,
            lambda,
            horizon,
            warmup_fraction: 0.1,
            n_batches: 32,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        self.spec.validate()?;
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(SimError::BadArrivalRate(self.lambda));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(SimError::BadHorizon(self.horizon));
        }
        if !(0.0..1.0).contains(&self.warmup_fraction) {
            return Err(SimError::BadWarmup(self.warmup_fraction));
        }
        if self.n_batches < 2 {
            return Err(SimError::TooFewBatches(self.n_batches));
        }
        Ok(())
    }
}

/// Point estimates from one replication.
#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    /// Mean service time (inter-departure while the queue stays busy).
    pub mean_service: Estimate,
    /// Fraction of measured time the system was nonempty.
    pub rho_hat: f64,
    /// Time-average number of minor-road vehicles present.
    pub mean_queue_length: Estimate,
    /// Mean wait from arrival to reaching the stop line.
    pub mean_waiting: Estimate,
    /// Total departures over the whole run.
    pub n_departures: u64,
    /// Total arrivals over the whole run.
    pub n_arrivals: u64,
    /// Vehicles still present when the run ended.
    pub final_queue_len: u64,
    /// Set when the queue guard tripped and the run stopped early.
    pub unstable_flag: bool,
}

/// Saturated-mode service-time estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct ServiceEstimate {
    /// Sample mean of the service time with its confidence half-width.
    pub mean_service: Estimate,
    /// Number of completed services the estimate is built on.
    pub n_services: usize,
    /// False when the estimate cannot be trusted as a stationary mean:
    /// either the running mean drifted by more than 5% between the
    /// half-sample and the full sample, or the attempt budget ran out
    /// before all requested services completed. Both are signatures of a
    /// diverging service time.
    pub converged: bool,
}

fn exp_draw<R: Rng + ?Sized>(rng: &mut R, rate: f64) -> f64 {
    if rate <= 0.0 {
        return f64::INFINITY;
    }
    let u: f64 = rng.random();
    -(1.0 - u).ln() / rate
}

/// Equal-width time windows accumulating the integral of a step function.
struct TimeBatches {
    start: f64,
    end: f64,
    width: f64,
    areas: Vec<f64>,
    total: f64,
}

impl TimeBatches {
    fn new(start: f64, end: f64, n: usize) -> Self {
        Self {
            start,
            end,
            width: (end - start) / n as f64,
            areas: vec![0.0; n],
            total: 0.0,
        }
    }

    /// Adds `level` over the interval `[t0, t1)`, clipped to the window
    /// and split across batch boundaries.
    fn deposit(&mut self, t0: f64, t1: f64, level: f64) {
        let mut lo = t0.max(self.start);
        let hi = t1.min(self.end);
        if lo >= hi || level == 0.0 {
            return;
        }
        self.total += level * (hi - lo);
        while lo < hi {
            let idx = (((lo - self.start) / self.width) as usize).min(self.areas.len() - 1);
            let edge = (self.start + (idx + 1) as f64 * self.width).min(hi);
            self.areas[idx] += level * (edge - lo);
            lo = edge;
        }
    }

    fn grand_mean(&self, measured_until: f64) -> f64 {
        let duration = measured_until.min(self.end) - self.start;
        if duration > 0.0 {
            self.total / duration
        } else {
            0.0
        }
    }

    fn batch_means(&self) -> Vec<f64> {
        self.areas.iter().map(|a| a / self.width).collect()
    }
}

/// Per-sample accumulators bucketed by the time each sample was recorded.
struct SampleBatches {
    start: f64,
    width: f64,
    sums: Vec<f64>,
    counts: Vec<u64>,
}

impl SampleBatches {
    fn new(start: f64, end: f64, n: usize) -> Self {
        Self {
            start,
            width: (end - start) / n as f64,
            sums: vec![0.0; n],
            counts: vec![0; n],
        }
    }

    fn add(&mut self, t: f64, value: f64) {
        if t < self.start {
            return;
        }
        let idx = (((t - self.start) / self.width) as usize).min(self.sums.len() - 1);
        self.sums[idx] += value;
        self.counts[idx] += 1;
    }

    fn estimate(&self, with_ci: bool) -> Estimate {
        let count: u64 = self.counts.iter().sum();
        if count == 0 {
            return Estimate {
                mean: 0.0,
                half_width: f64::INFINITY,
            };
        }
        let mean = self.sums.iter().sum::<f64>() / count as f64;
        if !with_ci {
            return Estimate {
                mean,
                half_width: f64::INFINITY,
            };
        }
        let means: Vec<f64> = self
            .sums
            .iter()
            .zip(&self.counts)
            .filter(|(_, &c)| c > 0)
            .map(|(&s, &c)| s / c as f64)
            .collect();
        Estimate {
            mean,
            half_width: half_width(&means),
        }
    }
}

/// 95% half-width of the mean of `batch_means` under the usual
/// batch-means normality assumption.
fn half_width(batch_means: &[f64]) -> f64 {
    let n = batch_means.len();
    if n < 2 {
        return f64::INFINITY;
    }
    let mean = batch_means.iter().sum::<f64>() / n as f64;
    let var = batch_means
        .iter()
        .map(|m| (m - mean) * (m - mean))
        .sum::<f64>()
        / (n - 1) as f64;
    if var == 0.0 {
        return 0.0;
    }
    let t = StudentsT::new(0.0, 1.0, (n - 1) as f64)
        .expect("degrees of freedom are at least 1")
        .inverse_cdf(0.975);
    t * (var / n as f64).sqrt()
}

/// The driver currently at the stop line.
struct Head {
    /// Attempt counter, starting at 1.
    attempt: usize,
    /// First-attempt headway this driver's sequence is built from; unused
    /// for per-attempt resampling.
    base: f64,
    /// Departure time if the current attempt succeeds.
    deadline: Option<f64>,
}

/// Required headway for the head's next comparison, drawing a fresh
/// sample when the behavior resamples per attempt.
fn required_headway<R: Rng + ?Sized>(spec: &ModelSpec, rng: &mut R, head: &Head) -> f64 {
    match spec.behavior {
        Behavior::Constant | Behavior::PerDriver => {
            spec.policy.attempt_headway(head.base, head.attempt)
        }
        Behavior::PerAttempt => spec
            .policy
            .attempt_headway(spec.dist.sample(rng), head.attempt),
    }
}

fn new_head<R: Rng + ?Sized>(spec: &ModelSpec, rng: &mut R) -> Head {
    let base = match spec.behavior {
        Behavior::Constant | Behavior::PerDriver => spec.dist.sample(rng),
        Behavior::PerAttempt => 0.0,
    };
    Head {
        attempt: 1,
        base,
        deadline: None,
    }
}

/// Runs the current attempt: the driver departs at `now + required` when
/// the remaining gap suffices, otherwise waits for the next passing.
fn run_attempt<R: Rng + ?Sized>(
    spec: &ModelSpec,
    rng: &mut R,
    head: &mut Head,
    now: f64,
    next_passing: f64,
) {
    let required = required_headway(spec, rng, head);
    head.deadline = if next_passing - now >= required {
        Some(now + required)
    } else {
        None
    };
}

/// Simulates one replication of the full intersection.
pub fn simulate(config: &SimConfig) -> Result<SimResult, SimError> {
    config.validate()?;
    let spec = &config.spec;
    let mut rng = ChaCha12Rng::seed_from_u64(config.seed);

    let horizon = config.horizon;
    let warmup_end = config.warmup_fraction * horizon;
    let mut queue_area = TimeBatches::new(warmup_end, horizon, config.n_batches);
    let mut busy_area = TimeBatches::new(warmup_end, horizon, config.n_batches);
    let mut services = SampleBatches::new(warmup_end, horizon, config.n_batches);
    let mut waits = SampleBatches::new(warmup_end, horizon, config.n_batches);

    let mut next_arrival = exp_draw(&mut rng, config.lambda);
    let mut next_passing = exp_draw(&mut rng, spec.q);
    let mut head: Option<Head> = None;
    let mut waiting: VecDeque<f64> = VecDeque::new();
    let mut queue_len: usize = 0;

    let mut n_arrivals: u64 = 0;
    let mut n_departures: u64 = 0;
    let mut last_departure: Option<f64> = None;
    let mut busy_after_departure = false;
    let mut unstable = false;

    let mut last_time = 0.0;
    let measured_until;
    loop {
        let deadline = head
            .as_ref()
            .and_then(|h| h.deadline)
            .unwrap_or(f64::INFINITY);
        // Tie order: departures before arrivals before passings.
        let now = deadline.min(next_arrival).min(next_passing);
        if now > horizon {
            measured_until = horizon;
            queue_area.deposit(last_time, horizon, queue_len as f64);
            busy_area.deposit(last_time, horizon, f64::from(queue_len > 0));
            break;
        }
        queue_area.deposit(last_time, now, queue_len as f64);
        busy_area.deposit(last_time, now, f64::from(queue_len > 0));
        last_time = now;

        if deadline <= next_arrival && deadline <= next_passing {
            head = None;
            queue_len -= 1;
            n_departures += 1;
            if let Some(prev) = last_departure {
                if busy_after_departure {
                    services.add(now, now - prev);
                }
            }
            last_departure = Some(now);
            busy_after_departure = queue_len > 0;
            if queue_len > 0 {
                let arrived = waiting.pop_front().expect("queue length matches the deque");
                waits.add(now, now - arrived);
                let mut h = new_head(spec, &mut rng);
                run_attempt(spec, &mut rng, &mut h, now, next_passing);
                head = Some(h);
            }
        } else if next_arrival <= next_passing {
            n_arrivals += 1;
            queue_len += 1;
            next_arrival = now + exp_draw(&mut rng, config.lambda);
            if queue_len == 1 {
                waits.add(now, 0.0);
                let mut h = new_head(spec, &mut rng);
                run_attempt(spec, &mut rng, &mut h, now, next_passing);
                head = Some(h);
            } else {
                waiting.push_back(now);
            }
            if queue_len > QUEUE_GUARD {
                unstable = true;
                measured_until = now;
                break;
            }
        } else {
            next_passing = now + exp_draw(&mut rng, spec.q);
            if let Some(h) = head.as_mut() {
                if h.deadline.is_none() {
                    h.attempt += 1;
                    run_attempt(spec, &mut rng, h, now, next_passing);
                }
            }
        }
    }

    let with_ci = !unstable;
    let duration = (measured_until - warmup_end).max(0.0);
    let mean_queue_length = Estimate {
        mean: queue_area.grand_mean(measured_until),
        half_width: if with_ci {
            half_width(&queue_area.batch_means())
        } else {
            f64::INFINITY
        },
    };
    let rho_hat = if duration > 0.0 {
        busy_area.total / duration
    } else {
        0.0
    };
    Ok(SimResult {
        mean_service: services.estimate(with_ci),
        rho_hat,
        mean_queue_length,
        mean_waiting: waits.estimate(with_ci),
        n_departures,
        n_arrivals,
        final_queue_len: queue_len as u64,
        unstable_flag: unstable,
    })
}

/// Saturated-queue service-time estimation: the stop line is always
/// occupied, so consecutive services are exactly the inter-departure
/// times the analytic transform describes, with no arrival process.
///
/// Specs with a diverging service time can draw a headway so long that a
/// single driver essentially never succeeds, so the total number of
/// attempts is capped; running out of that budget truncates the run to
/// the services completed and clears the convergence flag.
pub fn estimate_service_time(
    spec: &ModelSpec,
    n_services: usize,
    seed: u64,
) -> Result<ServiceEstimate, SimError> {
    spec.validate()?;
    let n_batches = 32;
    if n_services < n_batches {
        return Err(SimError::TooFewServices {
            got: n_services,
            wanted: n_batches,
        });
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut attempt_budget = 100 * n_services as u64 + 100_000;
    let mut samples = Vec::with_capacity(n_services);

    let mut now = 0.0;
    let mut next_passing = exp_draw(&mut rng, spec.q);
    'services: for _ in 0..n_services {
        let start = now;
        let mut h = new_head(spec, &mut rng);
        loop {
            if attempt_budget == 0 {
                break 'services;
            }
            attempt_budget -= 1;
            let required = required_headway(spec, &mut rng, &h);
            if next_passing - now >= required {
                now += required;
                break;
            }
            now = next_passing;
            next_passing = now + exp_draw(&mut rng, spec.q);
            h.attempt += 1;
        }
        samples.push(now - start);
    }

    let completed = samples.len();
    if completed < n_batches {
        let mean = if completed == 0 {
            0.0
        } else {
            samples.iter().sum::<f64>() / completed as f64
        };
        return Ok(ServiceEstimate {
            mean_service: Estimate {
                mean,
                half_width: f64::INFINITY,
            },
            n_services: completed,
            converged: false,
        });
    }
    let mean = samples.iter().sum::<f64>() / completed as f64;
    let half_sample_mean =
        samples[..completed / 2].iter().sum::<f64>() / (completed / 2) as f64;
    let batch_size = completed / n_batches;
    let batch_means: Vec<f64> = (0..n_batches)
        .map(|b| {
            let lo = b * batch_size;
            let hi = if b + 1 == n_batches {
                completed
            } else {
                lo + batch_size
            };
            samples[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
        })
        .collect();
    let converged = completed == n_services
        && (mean - half_sample_mean).abs() <= 0.05 * half_sample_mean.abs();
    Ok(ServiceEstimate {
        mean_service: Estimate {
            mean,
            half_width: half_width(&batch_means),
        },
        n_services: completed,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::ServiceCharacterization;
    use crate::headway::{Behavior, HeadwayDistribution, ImpatiencePolicy};

    fn b1_det7(q: f64) -> ModelSpec {
        ModelSpec {
            behavior: Behavior::Constant,
            dist: HeadwayDistribution::Deterministic(7.0),
            policy: ImpatiencePolicy::None,
            q,
        }
    }

    #[test]
    fn same_seed_reproduces_the_result_bit_for_bit() {
        let config = SimConfig::new(b1_det7(0.1), 0.05, 20_000.0, 7);
        let a = simulate(&config).unwrap();
        let b = simulate(&config).unwrap();
        assert_eq!(a, b);
        let c = simulate(&SimConfig { seed: 8, ..config }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn arrivals_balance_departures_and_the_final_queue() {
        for seed in 0..4 {
            let config = SimConfig::new(b1_det7(0.1), 0.08, 50_000.0, seed);
            let r = simulate(&config).unwrap();
            assert_eq!(r.n_arrivals, r.n_departures + r.final_queue_len);
            assert!(r.n_departures > 0);
            assert!(!r.unstable_flag);
        }
    }

    #[test]
    fn no_minor_traffic_leaves_the_intersection_empty() {
        let config = SimConfig::new(b1_det7(0.1), 0.0, 10_000.0, 3);
        let r = simulate(&config).unwrap();
        assert_eq!(r.n_departures, 0);
        assert_eq!(r.n_arrivals, 0);
        assert_eq!(r.mean_queue_length.mean, 0.0);
        assert_eq!(r.rho_hat, 0.0);
    }

    #[test]
    fn empty_major_road_makes_every_service_the_sampled_headway() {
        let est = estimate_service_time(&b1_det7(0.0), 10_000, 11).unwrap();
        assert_eq!(est.mean_service.mean, 7.0);
        assert_eq!(est.mean_service.half_width, 0.0);
        assert!(est.converged);

        let spec = ModelSpec {
            behavior: Behavior::PerDriver,
            dist: HeadwayDistribution::Exponential { rate: 1.0 / 7.0 },
            policy: ImpatiencePolicy::None,
            q: 0.0,
        };
        let est = estimate_service_time(&spec, 200_000, 11).unwrap();
        assert!(est.mean_service.covers(7.0));
        assert!(est.converged);
    }

    #[test]
    fn saturated_constant_behavior_matches_the_analytic_mean() {
        let est = estimate_service_time(&b1_det7(0.1), 1_000_000, 42).unwrap();
        assert!(est.mean_service.half_width < 0.05);
        assert!(est.mean_service.covers(10.137527074704765));
        assert!(est.converged);
    }

    #[test]
    fn resampling_exponential_headways_keeps_the_mean_at_the_headway_mean() {
        let spec = ModelSpec {
            behavior: Behavior::PerAttempt,
            dist: HeadwayDistribution::Exponential { rate: 1.0 / 7.0 },
            policy: ImpatiencePolicy::None,
            q: 0.1,
        };
        let est = estimate_service_time(&spec, 1_000_000, 5).unwrap();
        assert!(est.mean_service.covers(7.0));
        assert!(est.converged);
    }

    #[test]
    fn per_driver_mixture_matches_the_analytic_series() {
        let spec = ModelSpec {
            behavior: Behavior::PerDriver,
            dist: HeadwayDistribution::DiscreteMixture(vec![(4.0, 0.9), (34.0, 0.1)]),
            policy: ImpatiencePolicy::None,
            q: 0.021667,
        };
        let analytic = ServiceCharacterization::new(spec.clone())
            .unwrap()
            .mean_service()
            .unwrap();
        let est = estimate_service_time(&spec, 1_000_000, 13).unwrap();
        assert!(
            est.mean_service.covers(analytic),
            "analytic {analytic} outside {est:?}"
        );
    }

    #[test]
    fn saturated_resampling_of_a_fixed_headway_reproduces_constant_behavior_exactly() {
        let b2 = ModelSpec {
            behavior: Behavior::PerAttempt,
            dist: HeadwayDistribution::Deterministic(7.0),
            policy: ImpatiencePolicy::AffineDecay {
                alpha: 0.9,
                delta: 4.0,
            },
            q: 0.1,
        };
        let b1 = ModelSpec {
            behavior: Behavior::Constant,
            ..b2.clone()
        };
        let ea = estimate_service_time(&b1, 100_000, 99).unwrap();
        let eb = estimate_service_time(&b2, 100_000, 99).unwrap();
        assert_eq!(ea, eb);
    }

    #[test]
    fn stable_runs_satisfy_littles_law_within_combined_intervals() {
        let lambda = 0.05;
        let config = SimConfig::new(b1_det7(0.1), lambda, 400_000.0, 21);
        let r = simulate(&config).unwrap();
        assert!(!r.unstable_flag);
        let sojourn = r.mean_waiting.mean + r.mean_service.mean;
        let combined = r.mean_queue_length.half_width
            + lambda * (r.mean_waiting.half_width + r.mean_service.half_width);
        assert!(
            (r.mean_queue_length.mean - lambda * sojourn).abs() <= combined + 0.02,
            "L = {}, lambda*S = {}, slack {}",
            r.mean_queue_length.mean,
            lambda * sojourn,
            combined
        );
    }

    #[test]
    fn long_run_estimates_match_the_analytic_queue_metrics() {
        let lambda = 0.05;
        let config = SimConfig::new(b1_det7(0.1), lambda, 400_000.0, 17);
        let r = simulate(&config).unwrap();
        let sc = ServiceCharacterization::new(b1_det7(0.1)).unwrap();
        let m = sc.waiting_metrics(lambda).unwrap();
        assert!(
            r.mean_service.covers(m.mean_sojourn - m.mean_waiting),
            "service {:?} vs {}",
            r.mean_service,
            m.mean_sojourn - m.mean_waiting
        );
        assert!(
            (r.mean_waiting.mean - m.mean_waiting).abs() <= 3.0 * r.mean_waiting.half_width,
            "waiting {:?} vs {}",
            r.mean_waiting,
            m.mean_waiting
        );
        assert!((r.rho_hat - m.rho).abs() < 0.02);
    }

    #[test]
    fn overloaded_arrivals_trip_the_queue_guard() {
        let config = SimConfig::new(b1_det7(0.1), 50.0, 40_000.0, 1);
        let r = simulate(&config).unwrap();
        assert!(r.unstable_flag);
        assert!(r.final_queue_len > QUEUE_GUARD as u64);
        assert_eq!(r.mean_waiting.half_width, f64::INFINITY);
    }

    #[test]
    fn config_validation_rejects_bad_controls() {
        let good = SimConfig::new(b1_det7(0.1), 0.05, 100.0, 0);
        assert!(good.validate().is_ok());
        assert_eq!(
            SimConfig {
                horizon: 0.0,
                ..good.clone()
            }
            .validate(),
            Err(SimError::BadHorizon(0.0))
        );
        assert_eq!(
            SimConfig {
                warmup_fraction: 1.0,
                ..good.clone()
            }
            .validate(),
            Err(SimError::BadWarmup(1.0))
        );
        assert_eq!(
            SimConfig {
                n_batches: 1,
                ..good.clone()
            }
            .validate(),
            Err(SimError::TooFewBatches(1))
        );
        assert_eq!(
            SimConfig {
                lambda: -0.1,
                ..good
            }
            .validate(),
            Err(SimError::BadArrivalRate(-0.1))
        );
        assert_eq!(
            estimate_service_time(&b1_det7(0.1), 10, 0),
            Err(SimError::TooFewServices {
                got: 10,
                wanted: 32
            })
        );
    }

    #[test]
    fn divergent_service_times_are_flagged_as_non_converged() {
        let spec = ModelSpec {
            behavior: Behavior::PerDriver,
            dist: HeadwayDistribution::Exponential { rate: 1.0 / 7.0 },
            policy: ImpatiencePolicy::None,
            q: 0.2,
        };
        let est = estimate_service_time(&spec, 200_000, 2).unwrap();
        assert!(!est.converged);
    }
}
