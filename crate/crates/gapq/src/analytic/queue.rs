//! Stationary queue metrics for the minor road.
//!
//! The minor road forms an M/G/1 queue whose service time is the merge
//! delay characterized in the parent module. This module evaluates the
//! stationary queue-length distribution, waiting and sojourn times, and
//! their transforms for a given arrival rate.

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::{AnalyticError, ServiceCharacterization};

/// Mean stationary delay metrics for one arrival rate.
#[derive(Debug, Clone, PartialEq)]
pub struct QueueMetrics {
    /// Minor-road arrival rate, vehicles per second.
    pub lambda: f64,
    /// Utilization: arrival rate times mean service time.
    pub rho: f64,
    /// Mean wait from joining the queue to reaching the stop line, seconds.
    pub mean_waiting: f64,
    /// Mean total time in system including the merge itself, seconds.
    pub mean_sojourn: f64,
    /// Mean number of minor-road vehicles present, including the one
    /// at the stop line.
    pub mean_queue_length: f64,
}

/// Stationary queue-length probabilities recovered from the generating
/// function.
#[derive(Debug, Clone, PartialEq)]
pub struct QueuePmf {
    /// `probabilities[n]` is the stationary probability of exactly `n`
    /// minor-road vehicles present.
    pub probabilities: Vec<f64>,
    /// Probability mass beyond the last computed index.
    pub tail_mass: f64,
    /// Set when the uncovered tail is large enough to contaminate the
    /// computed entries through aliasing.
    pub aliasing_warning: bool,
}

impl ServiceCharacterization {
    fn stable_utilization(&self, lambda: f64) -> Result<(f64, f64), AnalyticError> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(AnalyticError::BadArrivalRate(lambda));
        }
        let ey = self.mean_service()?;
        if !ey.is_finite() {
            return Err(AnalyticError::InfiniteMoment { order: 1 });
        }
        let rho = lambda * ey;
        if rho >= 1.0 {
            return Err(AnalyticError::Unstable {
                rho,
                capacity: 1.0 / ey,
            });
        }
        Ok((ey, rho))
    }

    fn pgf_given(&self, z: Complex64, lambda: f64, rho: f64) -> Result<Complex64, AnalyticError> {
        if lambda == 0.0 {
            return Ok(Complex64::new(1.0, 0.0));
        }
        let one = Complex64::new(1.0, 0.0);
        if (one - z).norm() < 1e-8 {
            return Ok(one);
        }
        let y = self.service_lst(lambda * (one - z))?;
        Ok((1.0 - rho) * (one - z) * y / (y - z))
    }

    /// Probability generating function of the stationary queue length at
    /// `z` (requires `|z| <= 1`).
    pub fn queue_pgf(&self, z: Complex64, lambda: f64) -> Result<Complex64, AnalyticError> {
        let (_, rho) = self.stable_utilization(lambda)?;
        self.pgf_given(z, lambda, rho)
    }

    /// Stationary queue-length probabilities for indices `0..=n_max`,
    /// recovered by sampling the generating function on the unit circle
    /// and inverting with an FFT. The transform is sampled at four times
    /// the requested resolution so that aliased tail mass folds in well
    /// below the reported probabilities.
    pub fn queue_length_pmf(&self, lambda: f64, n_max: usize) -> Result<QueuePmf, AnalyticError> {
        let (_, rho) = self.stable_utilization(lambda)?;
        let n = (4 * (n_max + 1)).next_power_of_two();
        let mut samples = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..=n / 2 {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
            let z = Complex64::new(theta.cos(), theta.sin());
            let v = self.pgf_given(z, lambda, rho)?;
            samples[j] = v;
            if j > 0 && j < n / 2 {
                samples[n - j] = v.conj();
            }
        }
        let mut planner = FftPlanner::<f64>::new();
        planner.plan_fft_forward(n).process(&mut samples);

        let mut probabilities = Vec::with_capacity(n_max + 1);
        for (index, value) in samples.iter().take(n_max + 1).enumerate() {
            let p = value.re / n as f64;
            if p < -1e-9 {
                return Err(AnalyticError::NegativeProbability { index, value: p });
            }
            probabilities.push(p.max(0.0));
        }
        let tail_mass = (1.0 - probabilities.iter().sum::<f64>()).max(0.0);
        Ok(QueuePmf {
            probabilities,
            tail_mass,
            aliasing_warning: tail_mass > 1e-6,
        })
    }

    /// Mean waiting time, sojourn time, and queue length at arrival rate
    /// `lambda` (vehicles per second).
    pub fn waiting_metrics(&self, lambda: f64) -> Result<QueueMetrics, AnalyticError> {
        let (ey, rho) = self.stable_utilization(lambda)?;
        let mean_waiting = if lambda == 0.0 {
            0.0
        } else {
            lambda * self.service_moment(2)? / (2.0 * (1.0 - rho))
        };
        let mean_sojourn = mean_waiting + ey;
        Ok(QueueMetrics {
            lambda,
            rho,
            mean_waiting,
            mean_sojourn,
            mean_queue_length: lambda * mean_sojourn,
        })
    }

    /// Laplace-Stieltjes transform of the stationary waiting time at `s`
    /// (requires `Re(s) >= 0`).
    pub fn waiting_lst(&self, s: Complex64, lambda: f64) -> Result<Complex64, AnalyticError> {
        let (_, rho) = self.stable_utilization(lambda)?;
        if lambda == 0.0 || s.norm() < 1e-10 {
            return Ok(Complex64::new(1.0, 0.0));
        }
        let y = self.service_lst(s)?;
        Ok(s * (1.0 - rho) / (lambda * (y - 1.0) + s))
    }

    /// Laplace-Stieltjes transform of the stationary sojourn time
    /// (waiting plus merge) at `s`.
    pub fn sojourn_lst(&self, s: Complex64, lambda: f64) -> Result<Complex64, AnalyticError> {
        Ok(self.waiting_lst(s, lambda)? * self.service_lst(s)?)
    }
}

#[cfg(test)]
mod tests {
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    use super::*;
    use crate::headway::{Behavior, HeadwayDistribution, ImpatiencePolicy, ModelSpec};

    fn md1() -> ServiceCharacterization {
        ServiceCharacterization::new(ModelSpec {
            behavior: Behavior::Constant,
            dist: HeadwayDistribution::Deterministic(7.0),
            policy: ImpatiencePolicy::None,
            q: 0.0,
        })
        .unwrap()
    }

    fn merge_b1() -> ServiceCharacterization {
        ServiceCharacterization::new(ModelSpec {
            behavior: Behavior::Constant,
            dist: HeadwayDistribution::Deterministic(7.0),
            policy: ImpatiencePolicy::None,
            q: 0.1,
        })
        .unwrap()
    }

    #[test]
    fn deterministic_service_metrics_match_closed_forms() {
        let sc = md1();
        let m = sc.waiting_metrics(0.1).unwrap();
        assert_relative_eq!(m.rho, 0.7, max_relative = 1e-14);
        assert_relative_eq!(m.mean_waiting, 49.0 / 6.0, max_relative = 1e-6);
        assert_relative_eq!(m.mean_sojourn, 49.0 / 6.0 + 7.0, max_relative = 1e-6);
        assert_relative_eq!(
            m.mean_queue_length,
            0.1 * (49.0 / 6.0 + 7.0),
            max_relative = 1e-6
        );
    }

    #[test]
    fn deterministic_service_pmf_matches_closed_entries() {
        let sc = md1();
        let pmf = sc.queue_length_pmf(0.1, 60).unwrap();
        assert_relative_eq!(pmf.probabilities[0], 0.3, max_relative = 1e-9);
        assert_relative_eq!(
            pmf.probabilities[1],
            0.3 * 0.7f64.exp_m1(),
            max_relative = 1e-9
        );
        assert!(pmf.tail_mass < 1e-9);
        assert!(!pmf.aliasing_warning);

        let total: f64 = pmf.probabilities.iter().sum();
        assert_relative_eq!(total, 1.0, max_relative = 1e-9);
        let mean: f64 = pmf
            .probabilities
            .iter()
            .enumerate()
            .map(|(n, p)| n as f64 * p)
            .sum();
        let metrics = sc.waiting_metrics(0.1).unwrap();
        assert_relative_eq!(mean, metrics.mean_queue_length, max_relative = 1e-6);
    }

    #[test]
    fn merge_queue_metrics_match_reference_values() {
        let sc = merge_b1();
        let m = sc.waiting_metrics(0.05).unwrap();
        assert_relative_eq!(m.rho, 0.50687635373523826, max_relative = 1e-10);
        assert_relative_eq!(m.mean_waiting, 6.4063077174526271, max_relative = 1e-7);
        assert_relative_eq!(m.mean_sojourn, 16.543834792157392, max_relative = 1e-7);
        assert_relative_eq!(m.mean_queue_length, 0.82719173960786962, max_relative = 1e-7);
    }

    #[test]
    fn pgf_at_zero_recovers_the_empty_probability() {
        let sc = merge_b1();
        let m = sc.waiting_metrics(0.05).unwrap();
        let p0 = sc.queue_pgf(Complex64::new(0.0, 0.0), 0.05).unwrap();
        assert_relative_eq!(p0.re, 1.0 - m.rho, max_relative = 1e-12);
        assert_abs_diff_eq!(p0.im, 0.0, epsilon = 1e-12);

        let pmf = sc.queue_length_pmf(0.05, 40).unwrap();
        assert_relative_eq!(pmf.probabilities[0], 1.0 - m.rho, max_relative = 1e-9);
    }

    #[test]
    fn pgf_is_one_at_one_and_bounded_on_the_circle() {
        let sc = merge_b1();
        let one = sc.queue_pgf(Complex64::new(1.0, 0.0), 0.05).unwrap();
        assert_relative_eq!(one.re, 1.0, max_relative = 1e-14);
        for k in 1..8 {
            let theta = 0.7 * k as f64;
            let z = Complex64::new(theta.cos(), theta.sin());
            let v = sc.queue_pgf(z, 0.05).unwrap();
            assert!(v.norm() <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn transforms_are_one_at_the_origin() {
        let sc = merge_b1();
        let zero = Complex64::new(0.0, 0.0);
        assert_eq!(sc.waiting_lst(zero, 0.05).unwrap(), Complex64::new(1.0, 0.0));
        let v = sc.sojourn_lst(zero, 0.05).unwrap();
        assert_relative_eq!(v.re, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn waiting_transform_slope_matches_the_mean_wait() {
        let sc = merge_b1();
        let m = sc.waiting_metrics(0.05).unwrap();
        let h = 1e-6;
        let fp = sc.waiting_lst(Complex64::new(h, 0.0), 0.05).unwrap().re;
        let fm = sc.waiting_lst(Complex64::new(2.0 * h, 0.0), 0.05).unwrap().re;
        let slope = (4.0 * fp - fm - 3.0) / (2.0 * h);
        assert_relative_eq!(-slope, m.mean_waiting, max_relative = 1e-4);
    }

    #[test]
    fn zero_arrivals_leave_the_queue_empty() {
        let sc = merge_b1();
        let m = sc.waiting_metrics(0.0).unwrap();
        assert_eq!(m.rho, 0.0);
        assert_eq!(m.mean_waiting, 0.0);
        assert_relative_eq!(m.mean_sojourn, 10.137527074704765, max_relative = 1e-12);
        assert_eq!(m.mean_queue_length, 0.0);

        let pmf = sc.queue_length_pmf(0.0, 5).unwrap();
        assert_relative_eq!(pmf.probabilities[0], 1.0, max_relative = 1e-12);
        assert!(pmf.probabilities[1..].iter().all(|&p| p < 1e-12));
    }

    #[test]
    fn saturated_arrival_rates_are_reported_unstable() {
        let sc = merge_b1();
        let cap = sc.capacity().unwrap();
        let err = sc.waiting_metrics(1.05 * cap).unwrap_err();
        match err {
            AnalyticError::Unstable { rho, capacity } => {
                assert_relative_eq!(rho, 1.05, max_relative = 1e-12);
                assert_relative_eq!(capacity, cap, max_relative = 1e-14);
            }
            other => panic!("expected Unstable, got {other:?}"),
        }
        assert!(matches!(
            sc.queue_length_pmf(1.05 * cap, 10),
            Err(AnalyticError::Unstable { .. })
        ));
    }

    #[test]
    fn heavy_tailed_service_reports_an_infinite_second_moment() {
        let sc = ServiceCharacterization::new(ModelSpec {
            behavior: Behavior::PerDriver,
            dist: HeadwayDistribution::Exponential { rate: 1.0 / 7.0 },
            policy: ImpatiencePolicy::None,
            q: 0.08,
        })
        .unwrap();
        assert_eq!(
            sc.waiting_metrics(0.01).unwrap_err(),
            AnalyticError::InfiniteMoment { order: 2 }
        );
        // The queue-length law still exists (it needs only a finite mean),
        // but its polynomial tail folds into the window, so the inversion
        // must flag aliasing and the entries are only coarsely accurate.
        let pmf = sc.queue_length_pmf(0.01, 30).unwrap();
        assert!(pmf.aliasing_warning);
        assert_relative_eq!(
            pmf.probabilities[0],
            1.0 - 0.01 * sc.mean_service().unwrap(),
            max_relative = 1e-3
        );
    }

    #[test]
    fn short_windows_with_heavy_tails_raise_the_aliasing_warning() {
        let sc = md1();
        let pmf = sc.queue_length_pmf(0.135, 3).unwrap();
        assert!(pmf.tail_mass > 1e-6);
        assert!(pmf.aliasing_warning);
    }
}
