//! Critical-headway distributions, impatience policies, and model specs.
//!
//! A minor-street driver crosses the major street when the current gap
//! between major-street cars is at least the driver's critical headway.
//! All times here are in seconds and all rates in events per second;
//! vehicles-per-hour conversions happen only at the command-line boundary.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::Distribution;
use thiserror::Error;

/// Slack allowed when checking that mixture probabilities sum to one.
const PROB_SUM_TOL: f64 = 1e-12;

/// Violations reported by the validation routines.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum SpecError {
    #[error("headway {0} must be positive and finite")]
    NonPositiveHeadway(f64),
    #[error("atom probability {0} must lie in (0, 1]")]
    BadProbability(f64),
    #[error("atom probabilities sum to {0}, expected 1")]
    ProbabilitySum(f64),
    #[error("mixture needs at least one atom")]
    EmptyMixture,
    #[error("rate {0} must be positive and finite")]
    NonPositiveRate(f64),
    #[error("shape {0} must be positive and finite")]
    NonPositiveShape(f64),
    #[error("decay factor alpha {0} must lie strictly between 0 and 1")]
    AlphaOutOfRange(f64),
    #[error("floor delta {0} must be nonnegative and finite")]
    NegativeDelta(f64),
    #[error("explicit sequence terminal {0} must be positive and finite")]
    NonPositiveTerminal(f64),
    #[error("explicit headways must be nonincreasing and at least the terminal {terminal}; value {value} at attempt {attempt} is not")]
    SequenceNotNonincreasing {
        value: f64,
        terminal: f64,
        attempt: usize,
    },
    #[error("explicit sequences apply only to the constant-headway population b1")]
    SequenceNeedsConstantBehavior,
    #[error("the constant-headway population b1 requires a deterministic headway")]
    ConstantNeedsDeterministic,
    #[error("major-road flow rate {0} must be nonnegative and finite")]
    BadFlowRate(f64),
}

/// How critical headways vary across drivers and attempts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Behavior {
    /// Every driver uses the same fixed critical headway (`b1`).
    Constant,
    /// Each attempt draws a fresh critical headway (`b2`).
    PerAttempt,
    /// Each driver draws one critical headway at the first attempt and
    /// keeps it (`b3`).
    PerDriver,
}

impl Behavior {
    /// Short label used in tables and on the command line.
    pub fn label(self) -> &'static str {
        match self {
            Behavior::Constant => "b1",
            Behavior::PerAttempt => "b2",
            Behavior::PerDriver => "b3",
        }
    }

    /// Parses the short label accepted on the command line.
    pub fn from_label(label: &str) -> Option<Self> {
        match label {
            "b1" => Some(Behavior::Constant),
            "b2" => Some(Behavior::PerAttempt),
            "b3" => Some(Behavior::PerDriver),
            _ => None,
        }
    }
}

/// Distribution of the first-attempt critical headway T.
#[derive(Debug, Clone, PartialEq)]
pub enum HeadwayDistribution {
    /// Every draw equals `t` seconds.
    Deterministic(f64),
    /// Finite set of `(headway, probability)` atoms.
    DiscreteMixture(Vec<(f64, f64)>),
    /// Exponential law with the given rate per second.
    Exponential { rate: f64 },
    /// Gamma law with the given shape and rate per second.
    Gamma { shape: f64, rate: f64 },
}

fn positive_finite(x: f64) -> bool {
    x > 0.0 && x.is_finite()
}

impl HeadwayDistribution {
    pub fn validate(&self) -> Result<(), SpecError> {
        match self {
            HeadwayDistribution::Deterministic(t) => {
                if !positive_finite(*t) {
                    return Err(SpecError::NonPositiveHeadway(*t));
                }
            }
            HeadwayDistribution::DiscreteMixture(atoms) => {
                if atoms.is_empty() {
                    return Err(SpecError::EmptyMixture);
                }
                for &(t, p) in atoms {
                    if !positive_finite(t) {
                        return Err(SpecError::NonPositiveHeadway(t));
                    }
                    if !(p > 0.0 && p <= 1.0) {
                        return Err(SpecError::BadProbability(p));
                    }
                }
                let total: f64 = atoms.iter().map(|&(_, p)| p).sum();
                if (total - 1.0).abs() > PROB_SUM_TOL {
                    return Err(SpecError::ProbabilitySum(total));
                }
            }
            HeadwayDistribution::Exponential { rate } => {
                if !positive_finite(*rate) {
                    return Err(SpecError::NonPositiveRate(*rate));
                }
            }
            HeadwayDistribution::Gamma { shape, rate } => {
                if !positive_finite(*shape) {
                    return Err(SpecError::NonPositiveShape(*shape));
                }
                if !positive_finite(*rate) {
                    return Err(SpecError::NonPositiveRate(*rate));
                }
            }
        }
        Ok(())
    }

    /// E[e^{-sT}] for Re(s) >= 0.
    pub fn lst(&self, s: Complex64) -> Complex64 {
        match self {
            HeadwayDistribution::Deterministic(t) => (-s * *t).exp(),
            HeadwayDistribution::DiscreteMixture(atoms) => atoms
                .iter()
                .map(|&(t, p)| p * (-s * t).exp())
                .sum(),
            HeadwayDistribution::Exponential { rate } => Complex64::from(*rate) / (s + *rate),
            HeadwayDistribution::Gamma { shape, rate } => {
                (Complex64::from(1.0) + s / *rate).powf(-*shape)
            }
        }
    }

    /// E[e^{-uT}] along the real axis. Small negative `u` is accepted (the
    /// gamma branch needs `u > -rate`) so that moment extraction can
    /// difference across zero.
    pub fn lst_real(&self, u: f64) -> f64 {
        match self {
            HeadwayDistribution::Deterministic(t) => (-u * t).exp(),
            HeadwayDistribution::DiscreteMixture(atoms) => {
                atoms.iter().map(|&(t, p)| p * (-u * t).exp()).sum()
            }
            HeadwayDistribution::Exponential { rate } => rate / (rate + u),
            HeadwayDistribution::Gamma { shape, rate } => (-shape * (u / rate).ln_1p()).exp(),
        }
    }

    /// E[1 - e^{-uT}], computed without cancellation for small `u`.
    pub fn one_minus_lst(&self, u: f64) -> f64 {
        match self {
            HeadwayDistribution::Deterministic(t) => -(-u * t).exp_m1(),
            HeadwayDistribution::DiscreteMixture(atoms) => {
                atoms.iter().map(|&(t, p)| -p * (-u * t).exp_m1()).sum()
            }
            HeadwayDistribution::Exponential { rate } => u / (rate + u),
            HeadwayDistribution::Gamma { shape, rate } => {
                -(-shape * (u / rate).ln_1p()).exp_m1()
            }
        }
    }

    /// E[T e^{-uT}].
    pub fn weighted_lst(&self, u: f64) -> f64 {
        match self {
            HeadwayDistribution::Deterministic(t) => t * (-u * t).exp(),
            HeadwayDistribution::DiscreteMixture(atoms) => {
                atoms.iter().map(|&(t, p)| p * t * (-u * t).exp()).sum()
            }
            HeadwayDistribution::Exponential { rate } => {
                let d = rate + u;
                rate / (d * d)
            }
            HeadwayDistribution::Gamma { shape, rate } => {
                shape / rate * (-(shape + 1.0) * (u / rate).ln_1p()).exp()
            }
        }
    }

    /// E[e^{theta T}] for theta >= 0; +infinity exactly where divergent
    /// (exponential and gamma laws with theta >= rate).
    pub fn mgf(&self, theta: f64) -> f64 {
        1.0 + self.mgf_m1(theta)
    }

    /// E[e^{theta T}] - 1, computed without cancellation for small theta;
    /// +infinity exactly where the expectation diverges.
    pub fn mgf_m1(&self, theta: f64) -> f64 {
        match self {
            HeadwayDistribution::Deterministic(t) => (theta * t).exp_m1(),
            HeadwayDistribution::DiscreteMixture(atoms) => {
                atoms.iter().map(|&(t, p)| p * (theta * t).exp_m1()).sum()
            }
            HeadwayDistribution::Exponential { rate } => {
                if theta < *rate {
                    theta / (rate - theta)
                } else {
                    f64::INFINITY
                }
            }
            HeadwayDistribution::Gamma { shape, rate } => {
                if theta < *rate {
                    (-shape * (-theta / rate).ln_1p()).exp_m1()
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// Exact mean headway `E[T]`.
    pub fn mean(&self) -> f64 {
        match self {
            HeadwayDistribution::Deterministic(t) => *t,
            HeadwayDistribution::DiscreteMixture(atoms) => {
                atoms.iter().map(|&(t, p)| p * t).sum()
            }
            HeadwayDistribution::Exponential { rate } => 1.0 / rate,
            HeadwayDistribution::Gamma { shape, rate } => shape / rate,
        }
    }

    /// True for the laws with a density (exponential, gamma).
    pub fn is_continuous(&self) -> bool {
        matches!(
            self,
            HeadwayDistribution::Exponential { .. } | HeadwayDistribution::Gamma { .. }
        )
    }

    /// Point masses of a discrete law, or None for continuous laws.
    pub fn atoms(&self) -> Option<Vec<(f64, f64)>> {
        match self {
            HeadwayDistribution::Deterministic(t) => Some(vec![(*t, 1.0)]),
            HeadwayDistribution::DiscreteMixture(atoms) => Some(atoms.clone()),
            _ => None,
        }
    }

    /// Draws one headway. `Deterministic` consumes no randomness, which
    /// makes the constant population a seed-exact special case of
    /// per-attempt sampling in the simulator.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            HeadwayDistribution::Deterministic(t) => *t,
            HeadwayDistribution::DiscreteMixture(atoms) => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for &(t, p) in atoms {
                    acc += p;
                    if u < acc {
                        return t;
                    }
                }
                atoms.last().expect("validated: mixture is nonempty").0
            }
            HeadwayDistribution::Exponential { rate } => {
                rand_distr::Exp::new(*rate)
                    .expect("validated: rate > 0")
                    .sample(rng)
            }
            HeadwayDistribution::Gamma { shape, rate } => {
                rand_distr::Gamma::new(*shape, 1.0 / rate)
                    .expect("validated: shape > 0, rate > 0")
                    .sample(rng)
            }
        }
    }
}

/// How the required headway changes from one attempt to the next.
#[derive(Debug, Clone, PartialEq)]
pub enum ImpatiencePolicy {
    /// The critical headway is the same at every attempt.
    None,
    /// Geometric shrinkage toward the floor `delta`: the attempt-(j+1)
    /// headway is alpha * (attempt-j headway - delta) + delta.
    AffineDecay { alpha: f64, delta: f64 },
    /// Headways listed per attempt, then `terminal` for every later
    /// attempt. Only the constant-headway population may use this.
    ExplicitSequence { values: Vec<f64>, terminal: f64 },
}

impl ImpatiencePolicy {
    pub fn validate(&self) -> Result<(), SpecError> {
        match self {
            ImpatiencePolicy::None => Ok(()),
            ImpatiencePolicy::AffineDecay { alpha, delta } => {
                if !(*alpha > 0.0 && *alpha < 1.0) {
                    return Err(SpecError::AlphaOutOfRange(*alpha));
                }
                if !(*delta >= 0.0 && delta.is_finite()) {
                    return Err(SpecError::NegativeDelta(*delta));
                }
                Ok(())
            }
            ImpatiencePolicy::ExplicitSequence { values, terminal } => {
                if !positive_finite(*terminal) {
                    return Err(SpecError::NonPositiveTerminal(*terminal));
                }
                let mut prev = f64::INFINITY;
                for (i, &v) in values.iter().enumerate() {
                    if !(v >= *terminal && v <= prev && v.is_finite()) {
                        return Err(SpecError::SequenceNotNonincreasing {
                            value: v,
                            terminal: *terminal,
                            attempt: i + 1,
                        });
                    }
                    prev = v;
                }
                Ok(())
            }
        }
    }

    /// The critical headway at attempt `j` (1-based) for a driver whose
    /// first-attempt headway is `t1`. Explicit sequences ignore `t1`.
    pub fn attempt_headway(&self, t1: f64, j: usize) -> f64 {
        match self {
            ImpatiencePolicy::None => t1,
            ImpatiencePolicy::AffineDecay { .. } => {
                let (a, b) = self
                    .attempt_affine_coeffs(j)
                    .expect("affine decay always has coefficients");
                a * t1 + b
            }
            ImpatiencePolicy::ExplicitSequence { values, terminal } => {
                values.get(j - 1).copied().unwrap_or(*terminal)
            }
        }
    }

    /// Coefficients `(a_j, b_j)` such that the attempt-`j` headway equals
    /// `a_j * t1 + b_j`; None for explicit sequences, which are not affine
    /// in `t1`.
    pub fn attempt_affine_coeffs(&self, j: usize) -> Option<(f64, f64)> {
        match self {
            ImpatiencePolicy::None => Some((1.0, 0.0)),
            ImpatiencePolicy::AffineDecay { alpha, delta } => {
                let a = alpha.powi(j as i32 - 1);
                Some((a, delta * (1.0 - a)))
            }
            ImpatiencePolicy::ExplicitSequence { .. } => None,
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, ImpatiencePolicy::None)
    }
}

/// Full model: population behavior, headway law, impatience policy, and
/// the major-road flow rate in cars per second.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub behavior: Behavior,
    pub dist: HeadwayDistribution,
    pub policy: ImpatiencePolicy,
    pub q: f64,
}

impl ModelSpec {
    pub fn validate(&self) -> Result<(), SpecError> {
        self.dist.validate()?;
        self.policy.validate()?;
        if !(self.q >= 0.0 && self.q.is_finite()) {
            return Err(SpecError::BadFlowRate(self.q));
        }
        if self.behavior == Behavior::Constant
            && !matches!(self.dist, HeadwayDistribution::Deterministic(_))
        {
            return Err(SpecError::ConstantNeedsDeterministic);
        }
        if matches!(self.policy, ImpatiencePolicy::ExplicitSequence { .. })
            && self.behavior != Behavior::Constant
        {
            return Err(SpecError::SequenceNeedsConstantBehavior);
        }
        Ok(())
    }

    /// Mean first-attempt critical headway.
    pub fn mean_headway(&self) -> f64 {
        self.dist.mean()
    }
}

/// A model minus the flow rate; sweeps and scenario tables stamp in the
/// flow per grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelTemplate {
    pub behavior: Behavior,
    pub dist: HeadwayDistribution,
    pub policy: ImpatiencePolicy,
}

impl ModelTemplate {
    pub fn new(behavior: Behavior, dist: HeadwayDistribution, policy: ImpatiencePolicy) -> Self {
        ModelTemplate {
            behavior,
            dist,
            policy,
        }
    }

    pub fn at_flow(&self, q: f64) -> ModelSpec {
        ModelSpec {
            behavior: self.behavior,
            dist: self.dist.clone(),
            policy: self.policy.clone(),
            q,
        }
    }
}
