//! Bundled capacity experiments comparing driver populations.
//!
//! Each example sweeps a fixed set of labeled models across a grid of
//! major-road flow rates and renders the result as a CSV table with one
//! row per flow rate. Flows and capacities appear in vehicles per hour
//! on the CSV surface; everything else in this module works in vehicles
//! per second. Two scalar searches locate features of the capacity
//! curves: [`find_crossover`] returns the flow rate where two curves
//! meet, and [`find_capacity_argmax`] returns the flow rate maximizing
//! a single curve.

use thiserror::Error;

use crate::analytic::{capacity_sweep, AnalyticError, ServiceCharacterization};
use crate::headway::{Behavior, HeadwayDistribution, ImpatiencePolicy, ModelTemplate};

/// Conversion factor between vehicles per second and vehicles per hour.
pub const SECONDS_PER_HOUR: f64 = 3600.0;

/// Capacity-difference magnitude (vehicles per second) below which the
/// crossover bisection accepts the midpoint as the root.
const CROSSOVER_TOLERANCE: f64 = 1e-9;

/// Hard cap on bisection steps; the bracket reaches machine precision
/// long before this.
const MAX_BISECTIONS: usize = 200;

/// Final bracket width (vehicles per second) for the argmax search,
/// 0.1 vehicles per hour.
const ARGMAX_RESOLUTION: f64 = 0.1 / SECONDS_PER_HOUR;

/// Number of equally spaced samples used to bracket the maximum and
/// check unimodality before the golden-section refinement.
const ARGMAX_SCAN_POINTS: usize = 51;

/// Errors from scenario lookup and the scalar searches.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    /// The requested example id/variant pair does not exist.
    #[error("no such example: {0}")]
    UnknownExample(String),
    /// The capacity difference has the same sign at both bracket ends,
    /// so bisection cannot locate a crossover.
    #[error(
        "capacity curves do not cross on [{lo}, {hi}] vehicles per second \
         (difference {f_lo:.3e} at the left end, {f_hi:.3e} at the right)"
    )]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    /// Bisection ran out of iterations before the capacity difference
    /// fell below tolerance.
    #[error("crossover bisection did not converge within {0} steps")]
    BisectionStalled(usize),
    /// The scanned capacity curve dips and rises again, so a
    /// golden-section search would not bracket a unique maximum.
    #[error("capacity is not unimodal on the bracket: dip near {q} vehicles per second")]
    NotUnimodal { q: f64 },
    /// A search bracket was empty, reversed, or non-finite.
    #[error("bad flow bracket [{lo}, {hi}]: need finite 0 <= lo < hi")]
    BadBracket { lo: f64, hi: f64 },
    /// Capacity evaluation failed at a probed flow rate.
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
}

/// One bundled experiment: labeled model templates plus the flow grid
/// they are swept over.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    /// Example number, 1 through 4.
    pub id: u8,
    /// Sub-variant for the examples that have one (`a`/`b`).
    pub variant: Option<char>,
    /// Major-road flow rates in vehicles per second, one table row each.
    pub q_grid: Vec<f64>,
    /// Column label and model template for each table column.
    pub specs: Vec<(String, ModelTemplate)>,
}

fn mixture_6_14() -> HeadwayDistribution {
    HeadwayDistribution::DiscreteMixture(vec![(6.22, 0.9), (14.0, 0.1)])
}

fn grid_vph(stop: u32) -> Vec<f64> {
    (0..=stop)
        .step_by(5)
        .map(|v| f64::from(v) / SECONDS_PER_HOUR)
        .collect()
}

impl Scenario {
    /// Builds one of the bundled examples.
    ///
    /// - `1` (no variant): fixed 7 s headway, and a 6.22 s / 14 s
    ///   mixture (weights 0.9/0.1) under per-attempt and per-driver
    ///   resampling; no impatience; grid 0..1200 veh/h.
    /// - `2a` / `2b`: the same three models with affine impatience,
    ///   `2a` using alpha 0.9 and floor 4 s, `2b` using alpha 0.8 and
    ///   floor 1 s; grid 0..3600 veh/h.
    /// - `3a` / `3b`: two mixtures with equal support ordering but
    ///   different spreads, 4 s / 34 s (0.9/0.1) versus 6 s / 10 s
    ///   (0.5/0.5), under per-attempt (`3a`) or per-driver (`3b`)
    ///   resampling; grid 0..1200 veh/h.
    /// - `4` (no variant): five headway laws with mean close to 7 s and
    ///   increasingly heavy tails, all under per-attempt resampling;
    ///   grid 0..1200 veh/h.
    pub fn example(id: u8, variant: Option<char>) -> Result<Self, ScenarioError> {
        let variant = variant.map(|v| v.to_ascii_lowercase());
        let three_way = |policy: ImpatiencePolicy| {
            vec![
                (
                    "b1".to_string(),
                    ModelTemplate::new(
                        Behavior::Constant,
                        HeadwayDistribution::Deterministic(7.0),
                        policy.clone(),
                    ),
                ),
                (
                    "b2".to_string(),
                    ModelTemplate::new(Behavior::PerAttempt, mixture_6_14(), policy.clone()),
                ),
                (
                    "b3".to_string(),
                    ModelTemplate::new(Behavior::PerDriver, mixture_6_14(), policy),
                ),
            ]
        };
        match (id, variant) {
            (1, None) => Ok(Scenario {
                id,
                variant: None,
                q_grid: grid_vph(1200),
                specs: three_way(ImpatiencePolicy::None),
            }),
            (2, Some(v @ ('a' | 'b'))) => {
                let policy = if v == 'a' {
                    ImpatiencePolicy::AffineDecay {
                        alpha: 0.9,
                        delta: 4.0,
                    }
                } else {
                    ImpatiencePolicy::AffineDecay {
                        alpha: 0.8,
                        delta: 1.0,
                    }
                };
                Ok(Scenario {
                    id,
                    variant: Some(v),
                    q_grid: grid_vph(3600),
                    specs: three_way(policy),
                })
            }
            (3, Some(v @ ('a' | 'b'))) => {
                let behavior = if v == 'a' {
                    Behavior::PerAttempt
                } else {
                    Behavior::PerDriver
                };
                let spread_wide = HeadwayDistribution::DiscreteMixture(vec![(4.0, 0.9), (34.0, 0.1)]);
                let spread_narrow =
                    HeadwayDistribution::DiscreteMixture(vec![(6.0, 0.5), (10.0, 0.5)]);
                Ok(Scenario {
                    id,
                    variant: Some(v),
                    q_grid: grid_vph(1200),
                    specs: vec![
                        (
                            format!("{}_ta", behavior.label()),
                            ModelTemplate::new(behavior, spread_wide, ImpatiencePolicy::None),
                        ),
                        (
                            format!("{}_tb", behavior.label()),
                            ModelTemplate::new(behavior, spread_narrow, ImpatiencePolicy::None),
                        ),
                    ],
                })
            }
            (4, None) => {
                let laws = vec![
                    ("b2_mix14", mixture_6_14()),
                    (
                        "b2_mix28",
                        HeadwayDistribution::DiscreteMixture(vec![(4.67, 0.9), (28.0, 0.1)]),
                    ),
                    (
                        "b2_mix42",
                        HeadwayDistribution::DiscreteMixture(vec![(3.11, 0.9), (42.0, 0.1)]),
                    ),
                    ("b2_exp", HeadwayDistribution::Exponential { rate: 1.0 / 7.0 }),
                    (
                        "b2_gamma",
                        HeadwayDistribution::Gamma {
                            shape: 0.5,
                            rate: 1.0 / 14.0,
                        },
                    ),
                ];
                Ok(Scenario {
                    id,
                    variant: None,
                    q_grid: grid_vph(1200),
                    specs: laws
                        .into_iter()
                        .map(|(label, dist)| {
                            (
                                label.to_string(),
                                ModelTemplate::new(Behavior::PerAttempt, dist, ImpatiencePolicy::None),
                            )
                        })
                        .collect(),
                })
            }
            (id, variant) => Err(ScenarioError::UnknownExample(match variant {
                Some(v) => format!("id {id} variant {v}"),
                None => format!("id {id} (missing or superfluous variant?)"),
            })),
        }
    }

    /// Short name such as `example1` or `example2a`, used for messages
    /// and default file names.
    pub fn name(&self) -> String {
        match self.variant {
            Some(v) => format!("example{}{}", self.id, v),
            None => format!("example{}", self.id),
        }
    }

    /// Sweeps every column over the flow grid and renders the CSV
    /// table. The header is `q_veh_per_h` followed by the column
    /// labels; cells hold capacities in vehicles per hour with six
    /// significant digits, `0` for zero capacity, and `NA` where the
    /// evaluation failed.
    pub fn csv(&self) -> String {
        capacity_table(&self.specs, &self.q_grid)
    }
}

/// Renders a capacity-versus-flow CSV table for labeled model
/// templates. Flows arrive in vehicles per second and are reported in
/// vehicles per hour, as are the capacity cells.
pub fn capacity_table(specs: &[(String, ModelTemplate)], q_grid: &[f64]) -> String {
    let columns = capacity_sweep(specs, q_grid);
    let mut out = String::from("q_veh_per_h");
    for column in &columns {
        out.push(',');
        out.push_str(&column.label);
    }
    out.push('\n');
    for (i, &q) in q_grid.iter().enumerate() {
        out.push_str(&sig6_trimmed(q * SECONDS_PER_HOUR));
        for column in &columns {
            out.push(',');
            match column.capacities[i] {
                None => out.push_str("NA"),
                Some(cap) if cap <= 0.0 => out.push('0'),
                Some(cap) => out.push_str(&sig6(cap * SECONDS_PER_HOUR)),
            }
        }
        out.push('\n');
    }
    out
}

/// Renders the CSV capacity table for one bundled example.
pub fn run_example(id: u8, variant: Option<char>) -> Result<String, ScenarioError> {
    Ok(Scenario::example(id, variant)?.csv())
}

/// Formats `x` with six significant digits in plain positional
/// notation.
pub(crate) fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let exponent = x.abs().log10().floor() as i32;
    let decimals = (5 - exponent).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Like [`sig6`] but with trailing fractional zeros removed; used for
/// the flow column, where grid values are round numbers.
pub(crate) fn sig6_trimmed(x: f64) -> String {
    let mut s = sig6(x);
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

fn check_bracket(lo: f64, hi: f64) -> Result<(), ScenarioError> {
    if lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo < hi {
        Ok(())
    } else {
        Err(ScenarioError::BadBracket { lo, hi })
    }
}

fn capacity_at(template: &ModelTemplate, q: f64) -> Result<f64, ScenarioError> {
    Ok(ServiceCharacterization::new(template.at_flow(q))?.capacity()?)
}

/// Finds the major-road flow rate where two models have equal capacity.
///
/// Bisects the capacity difference over `[lo, hi]` (vehicles per
/// second) until its magnitude falls below 1e-9 vehicles per second and
/// returns the flow rate at that point. The difference must change sign
/// across the bracket; curves that touch without crossing, or never
/// meet, are reported as [`ScenarioError::NoSignChange`].
pub fn find_crossover(
    a: &ModelTemplate,
    b: &ModelTemplate,
    lo: f64,
    hi: f64,
) -> Result<f64, ScenarioError> {
    check_bracket(lo, hi)?;
    let diff = |q: f64| Ok::<f64, ScenarioError>(capacity_at(a, q)? - capacity_at(b, q)?);
    let f_lo = diff(lo)?;
    let f_hi = diff(hi)?;
    if !((f_lo < 0.0 && f_hi > 0.0) || (f_lo > 0.0 && f_hi < 0.0)) {
        return Err(ScenarioError::NoSignChange { lo, hi, f_lo, f_hi });
    }
    let (mut lo, mut hi, mut f_lo) = (lo, hi, f_lo);
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        let f_mid = diff(mid)?;
        if f_mid.abs() < CROSSOVER_TOLERANCE {
            return Ok(mid);
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Err(ScenarioError::BisectionStalled(MAX_BISECTIONS))
}

/// Flow rate maximizing a capacity curve, as located by
/// [`find_capacity_argmax`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CapacityArgmax {
    /// The maximum lies strictly inside the bracket; `q` is resolved to
    /// within 0.1 vehicles per hour.
    Interior { q: f64, capacity: f64 },
    /// The curve is maximized at a bracket endpoint, so the true
    /// argmax may lie outside the searched range.
    Boundary { q: f64, capacity: f64 },
}

impl CapacityArgmax {
    /// The maximizing flow rate in vehicles per second.
    pub fn flow(&self) -> f64 {
        match *self {
            CapacityArgmax::Interior { q, .. } | CapacityArgmax::Boundary { q, .. } => q,
        }
    }

    /// The capacity at the maximizing flow rate, vehicles per second.
    pub fn capacity(&self) -> f64 {
        match *self {
            CapacityArgmax::Interior { capacity, .. }
            | CapacityArgmax::Boundary { capacity, .. } => capacity,
        }
    }
}

/// Finds the major-road flow rate (vehicles per second) that maximizes
/// a model's capacity over `[lo, hi]`.
///
/// A coarse scan first brackets the sample maximum and verifies the
/// samples rise toward it and fall after it; a curve that dips and
/// recovers is reported as [`ScenarioError::NotUnimodal`] rather than
/// silently refined to a local maximum. A sample maximum at a bracket
/// end is reported as [`CapacityArgmax::Boundary`]. Otherwise a
/// golden-section search narrows the bracket to 0.1 vehicles per hour.
pub fn find_capacity_argmax(
    template: &ModelTemplate,
    lo: f64,
    hi: f64,
) -> Result<CapacityArgmax, ScenarioError> {
    check_bracket(lo, hi)?;
    let xs: Vec<f64> = (0..ARGMAX_SCAN_POINTS)
        .map(|i| lo + (hi - lo) * i as f64 / (ARGMAX_SCAN_POINTS - 1) as f64)
        .collect();
    let ys = xs
        .iter()
        .map(|&x| capacity_at(template, x))
        .collect::<Result<Vec<f64>, _>>()?;
    let best = (0..ys.len())
        .max_by(|&i, &j| ys[i].total_cmp(&ys[j]))
        .expect("scan is nonempty");
    let slack = |y: f64| 1e-12 * y.abs().max(1.0);
    for i in 0..best {
        if ys[i] > ys[i + 1] + slack(ys[i]) {
            return Err(ScenarioError::NotUnimodal { q: xs[i + 1] });
        }
    }
    for i in best..ys.len() - 1 {
        if ys[i + 1] > ys[i] + slack(ys[i]) {
            return Err(ScenarioError::NotUnimodal { q: xs[i + 1] });
        }
    }
    if best == 0 {
        return Ok(CapacityArgmax::Boundary {
            q: lo,
            capacity: ys[0],
        });
    }
    if best == ys.len() - 1 {
        return Ok(CapacityArgmax::Boundary {
            q: hi,
            capacity: ys[best],
        });
    }

    let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (xs[best - 1], xs[best + 1]);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = capacity_at(template, c)?;
    let mut fd = capacity_at(template, d)?;
    while b - a > ARGMAX_RESOLUTION {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = capacity_at(template, c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = capacity_at(template, d)?;
        }
    }
    let q = 0.5 * (a + b);
    Ok(CapacityArgmax::Interior {
        q,
        capacity: capacity_at(template, q)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vph(q: f64) -> f64 {
        q / SECONDS_PER_HOUR
    }

    fn row_starting<'a>(csv: &'a str, prefix: &str) -> &'a str {
        csv.lines()
            .find(|line| line.starts_with(prefix))
            .unwrap_or_else(|| panic!("no row starting with {prefix:?}"))
    }

    fn sweep_values(scenario: &Scenario) -> Vec<Vec<f64>> {
        capacity_sweep(&scenario.specs, &scenario.q_grid)
            .into_iter()
            .map(|column| {
                column
                    .capacities
                    .into_iter()
                    .map(|cell| cell.expect("cell evaluates"))
                    .collect()
            })
            .collect()
    }

    #[test]
    fn example_one_matches_frozen_rows() {
        let csv = run_example(1, None).unwrap();
        assert_eq!(csv.lines().next().unwrap(), "q_veh_per_h,b1,b2,b3");
        assert_eq!(row_starting(&csv, "0,"), "0,514.286,514.433,514.433");
        assert_eq!(row_starting(&csv, "5,"), "5,511.790,512.214,511.658");
        assert_eq!(row_starting(&csv, "360,"), "360,355.116,371.473,332.747");
        assert_eq!(csv.lines().count(), 242);
    }

    #[test]
    fn example_one_preserves_capacity_ordering() {
        let scenario = Scenario::example(1, None).unwrap();
        let columns = sweep_values(&scenario);
        // At zero flow capacity is the reciprocal mean headway, and the
        // mixture mean is 6.998 s against the fixed 7 s, so the resampled
        // models start a hair above the fixed one; the ordering is a
        // positive-flow property.
        assert_eq!(columns[1][0], columns[2][0]);
        assert!(columns[1][0] > columns[0][0]);
        for i in 1..scenario.q_grid.len() {
            let (b1, b2, b3) = (columns[0][i], columns[1][i], columns[2][i]);
            let slack = 1e-12 * b1.max(1.0);
            assert!(
                b2 + slack >= b1 && b1 + slack >= b3,
                "ordering fails at index {i}: {b2} >= {b1} >= {b3}"
            );
        }
    }

    #[test]
    fn example_two_a_breaks_ordering() {
        let scenario = Scenario::example(2, Some('a')).unwrap();
        let columns = sweep_values(&scenario);
        let first_violation = (1..scenario.q_grid.len()).find(|&i| {
            let (b1, b2, b3) = (columns[0][i], columns[1][i], columns[2][i]);
            let slack = 1e-12 * b1.max(1.0);
            !(b2 + slack >= b1 && b1 + slack >= b3)
        });
        let q = scenario.q_grid[first_violation.expect("ordering should break")];
        assert!(
            (q * SECONDS_PER_HOUR - 990.0).abs() < 1e-9,
            "first violation at {} veh/h",
            q * SECONDS_PER_HOUR
        );
    }

    #[test]
    fn example_two_b_has_increasing_capacity_segment() {
        let scenario = Scenario::example(2, Some('b')).unwrap();
        let columns = sweep_values(&scenario);
        let rises = |cells: &[f64]| {
            cells
                .windows(2)
                .any(|w| w[1] > w[0] + 1e-12 * w[0].max(1.0))
        };
        assert!(
            columns.iter().any(|cells| rises(cells)),
            "no column has a strictly increasing segment"
        );
    }

    #[test]
    fn example_three_capacities_nearly_equal_at_crossover_flow() {
        let scenario = Scenario::example(3, Some('b')).unwrap();
        let q = vph(78.0);
        let diff = capacity_at(&scenario.specs[0].1, q).unwrap()
            - capacity_at(&scenario.specs[1].1, q).unwrap();
        assert!(diff.abs() * SECONDS_PER_HOUR < 0.5, "gap {diff}");
    }

    #[test]
    fn example_four_exponential_column_is_flat() {
        let scenario = Scenario::example(4, None).unwrap();
        let exp_index = scenario
            .specs
            .iter()
            .position(|(label, _)| label == "b2_exp")
            .unwrap();
        let cells = &sweep_values(&scenario)[exp_index];
        for &cap in cells {
            assert!((cap - 1.0 / 7.0).abs() <= 1e-9 / 7.0, "capacity {cap}");
        }
        let csv = scenario.csv();
        for line in csv.lines().skip(1) {
            let cell = line.split(',').nth(exp_index + 1).unwrap();
            assert_eq!(cell, "514.286");
        }
    }

    #[test]
    fn crossover_matches_frozen_value() {
        let scenario = Scenario::example(3, Some('b')).unwrap();
        let q = find_crossover(
            &scenario.specs[0].1,
            &scenario.specs[1].1,
            vph(36.0),
            vph(180.0),
        )
        .unwrap();
        assert!(
            (q * SECONDS_PER_HOUR - 78.008607426241544).abs() < 1e-3,
            "crossover at {} veh/h",
            q * SECONDS_PER_HOUR
        );
    }

    #[test]
    fn crossover_requires_sign_change() {
        let scenario = Scenario::example(3, Some('b')).unwrap();
        let same = find_crossover(
            &scenario.specs[0].1,
            &scenario.specs[0].1,
            vph(36.0),
            vph(180.0),
        );
        assert!(matches!(same, Err(ScenarioError::NoSignChange { .. })));

        let ex1 = Scenario::example(1, None).unwrap();
        let ordered = find_crossover(&ex1.specs[1].1, &ex1.specs[0].1, vph(5.0), vph(1200.0));
        assert!(matches!(ordered, Err(ScenarioError::NoSignChange { .. })));
    }

    #[test]
    fn argmax_matches_frozen_value() {
        let template = ModelTemplate::new(
            Behavior::PerAttempt,
            HeadwayDistribution::DiscreteMixture(vec![(3.11, 0.9), (42.0, 0.1)]),
            ImpatiencePolicy::None,
        );
        let found = find_capacity_argmax(&template, 0.0, vph(1200.0)).unwrap();
        match found {
            CapacityArgmax::Interior { q, .. } => assert!(
                (q * SECONDS_PER_HOUR - 437.6966281531633).abs() <= 0.1,
                "argmax at {} veh/h",
                q * SECONDS_PER_HOUR
            ),
            other => panic!("expected interior maximum, got {other:?}"),
        }
    }

    #[test]
    fn argmax_reports_boundary_maxima() {
        let gamma = ModelTemplate::new(
            Behavior::PerAttempt,
            HeadwayDistribution::Gamma {
                shape: 0.5,
                rate: 1.0 / 14.0,
            },
            ImpatiencePolicy::None,
        );
        let hi = vph(1200.0);
        match find_capacity_argmax(&gamma, 0.0, hi).unwrap() {
            CapacityArgmax::Boundary { q, .. } => assert_eq!(q, hi),
            other => panic!("expected boundary maximum, got {other:?}"),
        }

        let fixed = ModelTemplate::new(
            Behavior::Constant,
            HeadwayDistribution::Deterministic(7.0),
            ImpatiencePolicy::None,
        );
        match find_capacity_argmax(&fixed, 0.0, hi).unwrap() {
            CapacityArgmax::Boundary { q, .. } => assert_eq!(q, 0.0),
            other => panic!("expected boundary maximum, got {other:?}"),
        }
    }

    #[test]
    fn unknown_examples_are_rejected() {
        for (id, variant) in [(0, None), (5, None), (2, None), (1, Some('a')), (3, Some('c'))] {
            assert!(
                matches!(
                    Scenario::example(id, variant),
                    Err(ScenarioError::UnknownExample(_))
                ),
                "id {id} variant {variant:?} should be rejected"
            );
        }
    }

    #[test]
    fn scenario_names_follow_id_and_variant() {
        assert_eq!(Scenario::example(1, None).unwrap().name(), "example1");
        assert_eq!(Scenario::example(2, Some('B')).unwrap().name(), "example2b");
        assert_eq!(Scenario::example(3, Some('a')).unwrap().name(), "example3a");
    }

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(sig6(355.11624), "355.116");
        assert_eq!(sig6(511.78993), "511.790");
        assert_eq!(sig6(0.098643373), "0.0986434");
        assert_eq!(sig6(450.0), "450.000");
        assert_eq!(sig6_trimmed(360.0), "360");
        assert_eq!(sig6_trimmed(0.0), "0");
        assert_eq!(sig6_trimmed(4.999999999999999), "5");
        assert_eq!(sig6_trimmed(1200.0000000001), "1200");
    }

    #[test]
    fn bad_brackets_are_rejected() {
        let scenario = Scenario::example(1, None).unwrap();
        let t = &scenario.specs[0].1;
        for (lo, hi) in [(0.2, 0.1), (0.1, 0.1), (-0.1, 0.2), (0.0, f64::INFINITY)] {
            assert!(matches!(
                find_crossover(t, t, lo, hi),
                Err(ScenarioError::BadBracket { .. })
            ));
            assert!(matches!(
                find_capacity_argmax(t, lo, hi),
                Err(ScenarioError::BadBracket { .. })
            ));
        }
    }
}
