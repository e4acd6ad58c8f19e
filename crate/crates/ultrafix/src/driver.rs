//! The approximation engine: stage-wise iteration of a strictly contracting
//! self-map toward its fixed point.
//!
//! A run proceeds in stages. Within a stage the map is applied step by step;
//! the step distances form a strictly decreasing chain of radii, and the
//! principal balls around the iterates nest strictly. When a stage ends
//! without hitting the fixed point, a limit oracle may propose a
//! continuation point lying inside every ball recorded so far; the driver
//! re-verifies that membership before trusting it. Three outcomes exist:
//!
//! * `Reached`: some iterate is exactly fixed in the model;
//! * `Approximated`: an oracle-proposed point inside every recorded ball is
//!   fixed, certifying the limit of the trace;
//! * `Inconclusive`: budgets ran out with the trace still valid.
//!
//! Budgets replace any appeal to maximal families: `Inconclusive` is the
//! honest third answer when neither certificate appears in time.

use std::fmt;

use crate::radius::RadiusOrder;
use crate::report::Report;
use crate::space::{Ball, RadiusOf, Ultrametric};

/// A self-map of a space, expected to be strictly contracting: distinct
/// points must land strictly closer together. The driver checks realized
/// step distances and [`check_strict_contraction`] checks sampled pairs.
pub trait ContractingMap<S: Ultrametric> {
    fn apply(&self, space: &S, x: &S::Point) -> S::Point;

    /// Wire descriptor for trace documents, e.g. `newton x^2 - 2`.
    fn describe(&self) -> String {
        "map".to_string()
    }
}

impl<S, F> ContractingMap<S> for F
where
    S: Ultrametric,
    F: Fn(&S, &S::Point) -> S::Point,
{
    fn apply(&self, space: &S, x: &S::Point) -> S::Point {
        self(space, x)
    }
}

/// How a stage began: the run's start point, or a point chosen at a limit
/// stage (by the configured oracle or the last-iterate fallback).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StageEntry {
    Start,
    OracleChoice,
}

impl fmt::Display for StageEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StageEntry::Start => write!(f, "start"),
            StageEntry::OracleChoice => write!(f, "oracle"),
        }
    }
}

/// One stage of iteration: points `a_0..a_n` with step distances
/// `sigmas[i] = d(a_i, a_{i+1})`. `reached` marks that the final point was
/// found exactly fixed during this stage.
#[derive(Debug, Clone, PartialEq)]
pub struct StageSegment<P, R> {
    pub entry: StageEntry,
    pub points: Vec<P>,
    pub sigmas: Vec<R>,
    pub reached: bool,
}

/// The full record of a run: its stages plus the one-line model descriptor
/// of the space (so truncated models are never mistaken for completions).
#[derive(Debug, Clone, PartialEq)]
pub struct Trace<P, R> {
    pub model: String,
    pub stages: Vec<StageSegment<P, R>>,
}

impl<P: Clone + PartialEq, R: Clone> Trace<P, R> {
    pub fn new(model: String) -> Self {
        Trace { model, stages: Vec::new() }
    }

    /// All recorded `(a_i, sigma_i)` pairs in order across stages. The final
    /// point of each stage carries no sigma of its own and is not paired.
    pub fn entries(&self) -> impl Iterator<Item = (&P, &R)> {
        self.stages
            .iter()
            .flat_map(|s| s.points.iter().zip(s.sigmas.iter()))
    }

    /// The concatenated step-distance chain.
    pub fn sigma_chain(&self) -> impl Iterator<Item = &R> {
        self.stages.iter().flat_map(|s| s.sigmas.iter())
    }

    /// The principal balls `B(a_i; sigma_i)` along the trace, in order.
    pub fn balls(&self) -> Vec<Ball<P, R>> {
        self.entries()
            .map(|(p, s)| Ball { center: p.clone(), radius: s.clone() })
            .collect()
    }

    /// The iterate family across stages. A stage whose entry point repeats
    /// the previous stage's final point contributes it only once.
    pub fn family(&self) -> Vec<P> {
        let mut out: Vec<P> = Vec::new();
        for stage in &self.stages {
            for (i, p) in stage.points.iter().enumerate() {
                if i == 0 {
                    if let Some(last) = out.last() {
                        if last == p {
                            continue;
                        }
                    }
                }
                out.push(p.clone());
            }
        }
        out
    }

    pub fn last_point(&self) -> Option<&P> {
        self.stages.last().and_then(|s| s.points.last())
    }

    pub fn last_sigma(&self) -> Option<&R> {
        self.stages.iter().rev().find_map(|s| s.sigmas.last())
    }

    pub fn step_count(&self) -> usize {
        self.stages.iter().map(|s| s.sigmas.len()).sum()
    }
}

/// Final answer of a run. The dichotomy between `Reached` and `Approximated`
/// is exclusive: a reached trace ends inside a stage, an approximated trace
/// ends at an oracle-certified limit point, never both.
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome<P, R> {
    Reached {
        point: P,
        stage_index: usize,
        step_index: usize,
        trace: Trace<P, R>,
    },
    Approximated {
        point: P,
        trace: Trace<P, R>,
    },
    Inconclusive {
        trace: Trace<P, R>,
    },
}

impl<P, R> Outcome<P, R> {
    pub fn trace(&self) -> &Trace<P, R> {
        match self {
            Outcome::Reached { trace, .. }
            | Outcome::Approximated { trace, .. }
            | Outcome::Inconclusive { trace } => trace,
        }
    }

    /// The certified fixed point, when one exists.
    pub fn point(&self) -> Option<&P> {
        match self {
            Outcome::Reached { point, .. } | Outcome::Approximated { point, .. } => Some(point),
            Outcome::Inconclusive { .. } => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Outcome::Reached { .. } => "reached",
            Outcome::Approximated { .. } => "approximated",
            Outcome::Inconclusive { .. } => "inconclusive",
        }
    }
}

/// Iteration budgets. Both are at least 1; `new` enforces this.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DriverConfig {
    steps_per_stage: usize,
    max_stages: usize,
}

impl DriverConfig {
    /// Panics if either budget is zero.
    pub fn new(steps_per_stage: usize, max_stages: usize) -> Self {
        assert!(steps_per_stage >= 1, "steps_per_stage must be at least 1");
        assert!(max_stages >= 1, "max_stages must be at least 1");
        DriverConfig { steps_per_stage, max_stages }
    }

    pub fn steps_per_stage(&self) -> usize {
        self.steps_per_stage
    }

    pub fn max_stages(&self) -> usize {
        self.max_stages
    }
}

impl Default for DriverConfig {
    fn default() -> Self {
        DriverConfig::new(16, 4)
    }
}

/// Chooses the entry point of the next stage: any point lying inside every
/// ball recorded so far. The driver re-verifies that membership, so a bad
/// choice is an error, not a wrong answer.
pub trait LimitOracle<S: Ultrametric> {
    fn resolve(
        &self,
        space: &S,
        trace: &Trace<S::Point, RadiusOf<S>>,
    ) -> Option<S::Point>;
}

impl<S, F> LimitOracle<S> for F
where
    S: Ultrametric,
    F: Fn(&S, &Trace<S::Point, RadiusOf<S>>) -> Option<S::Point>,
{
    fn resolve(&self, space: &S, trace: &Trace<S::Point, RadiusOf<S>>) -> Option<S::Point> {
        self(space, trace)
    }
}

/// The default continuation: the last iterate, which always lies in every
/// recorded ball.
pub struct LastIterate;

impl<S: Ultrametric> LimitOracle<S> for LastIterate {
    fn resolve(&self, _space: &S, trace: &Trace<S::Point, RadiusOf<S>>) -> Option<S::Point> {
        trace.last_point().cloned()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DriverError {
    /// The step-distance chain failed to strictly decrease. Signals a map
    /// that is not strictly contracting on a realized pair, or an oracle
    /// continuation whose first step cannot extend the chain.
    ContractionViolation { detail: String },
    /// An oracle-proposed continuation point fell outside some recorded
    /// ball.
    OracleMembershipViolation { detail: String },
}

impl fmt::Display for DriverError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DriverError::ContractionViolation { detail } => {
                write!(f, "contraction violation: {detail}")
            }
            DriverError::OracleMembershipViolation { detail } => {
                write!(f, "oracle membership violation: {detail}")
            }
        }
    }
}

impl std::error::Error for DriverError {}

fn stage_with_floor<S, M>(
    space: &S,
    map: &M,
    start: S::Point,
    budget: usize,
    floor: Option<&RadiusOf<S>>,
    entry: StageEntry,
) -> Result<StageSegment<S::Point, RadiusOf<S>>, DriverError>
where
    S: Ultrametric,
    M: ContractingMap<S> + ?Sized,
{
    assert!(budget >= 1, "stage budget must be at least 1");
    let order = space.order();
    let mut seg = StageSegment {
        entry,
        points: vec![start],
        sigmas: Vec::new(),
        reached: false,
    };
    let mut prev_sigma: Option<RadiusOf<S>> = floor.cloned();
    for _ in 0..budget {
        let current = seg.points.last().expect("stage always has a point").clone();
        let next = map.apply(space, &current);
        let sigma = space.distance(&current, &next);
        if order.is_zero(&sigma) {
            seg.reached = true;
            return Ok(seg);
        }
        if let Some(prev) = &prev_sigma {
            if !order.lt(&sigma, prev) {
                return Err(DriverError::ContractionViolation {
                    detail: format!(
                        "step distance {sigma} does not sit strictly below {prev} \
                         at iterate {:?}",
                        current
                    ),
                });
            }
        }
        prev_sigma = Some(sigma.clone());
        seg.sigmas.push(sigma);
        seg.points.push(next);
    }
    Ok(seg)
}

/// Apply the map step by step from `start`, for at most `budget`
/// applications or until a fixed point is hit exactly. Step distances are
/// required to strictly decrease.
pub fn iterate_stage<S, M>(
    space: &S,
    map: &M,
    start: S::Point,
    budget: usize,
) -> Result<StageSegment<S::Point, RadiusOf<S>>, DriverError>
where
    S: Ultrametric,
    M: ContractingMap<S> + ?Sized,
{
    stage_with_floor(space, map, start, budget, None, StageEntry::Start)
}

fn check_membership<S: Ultrametric>(
    space: &S,
    trace: &Trace<S::Point, RadiusOf<S>>,
    t: &S::Point,
) -> Result<(), DriverError>
where
{
    let order = space.order();
    for (a, sigma) in trace.entries() {
        let d = space.distance(t, a);
        if !order.le(&d, sigma) {
            return Err(DriverError::OracleMembershipViolation {
                detail: format!(
                    "proposed point {t:?} is at distance {d} from {a:?}, \
                     outside the recorded ball of radius {sigma}"
                ),
            });
        }
    }
    Ok(())
}

/// Drive the map from `start` with the last-iterate fallback as the limit
/// oracle.
pub fn run<S, M>(
    space: &S,
    map: &M,
    start: S::Point,
    config: &DriverConfig,
) -> Result<Outcome<S::Point, RadiusOf<S>>, DriverError>
where
    S: Ultrametric,
    M: ContractingMap<S> + ?Sized,
{
    run_with_oracle(space, map, start, config, &LastIterate)
}

/// Drive the map from `start`. Stages iterate under the step budget; after
/// each unfinished stage the oracle proposes a continuation point (falling
/// back to the last iterate), whose ball membership is re-verified. A
/// proposed point that is already fixed certifies the trace's limit and
/// yields `Approximated`; the fallback proposal instead continues iteration
/// so a fixed point discovered at a stage boundary is still `Reached`.
pub fn run_with_oracle<S, M>(
    space: &S,
    map: &M,
    start: S::Point,
    config: &DriverConfig,
    oracle: &dyn LimitOracle<S>,
) -> Result<Outcome<S::Point, RadiusOf<S>>, DriverError>
where
    S: Ultrametric,
    M: ContractingMap<S> + ?Sized,
{
    let order = space.order();
    let mut trace = Trace::new(space.describe());
    let mut current = start;
    let mut entry = StageEntry::Start;
    for stage_index in 0..config.max_stages() {
        let floor = trace.last_sigma().cloned();
        let seg = stage_with_floor(
            space,
            map,
            current,
            config.steps_per_stage(),
            floor.as_ref(),
            entry,
        )?;
        let reached = seg.reached;
        let step_index = seg.points.len() - 1;
        trace.stages.push(seg);
        if reached {
            let point = trace.last_point().expect("reached stage has a point").clone();
            return Ok(Outcome::Reached { point, stage_index, step_index, trace });
        }
        // Limit stage: pick a continuation inside every recorded ball.
        let last = trace.last_point().expect("stage has a point").clone();
        let proposal = oracle.resolve(space, &trace).unwrap_or_else(|| last.clone());
        check_membership(space, &trace, &proposal)?;
        if proposal != last {
            let image = map.apply(space, &proposal);
            if order.is_zero(&space.distance(&proposal, &image)) {
                return Ok(Outcome::Approximated { point: proposal, trace });
            }
        }
        current = proposal;
        entry = StageEntry::OracleChoice;
    }
    Ok(Outcome::Inconclusive { trace })
}

/// True iff `z` is exactly fixed in the model.
pub fn verify_fixed_point<S, M>(space: &S, map: &M, z: &S::Point) -> bool
where
    S: Ultrametric,
    M: ContractingMap<S> + ?Sized,
{
    let image = map.apply(space, z);
    space.order().is_zero(&space.distance(z, &image))
}

/// List every sampled pair of distinct points whose images fail to move
/// strictly closer. Pairs of equal points are skipped.
pub fn check_strict_contraction<S, M>(
    space: &S,
    map: &M,
    pairs: &[(S::Point, S::Point)],
) -> Report
where
    S: Ultrametric,
    M: ContractingMap<S> + ?Sized,
{
    let mut report = Report::new();
    let order = space.order();
    for (x, y) in pairs {
        if x == y {
            continue;
        }
        let before = space.distance(x, y);
        let after = space.distance(&map.apply(space, x), &map.apply(space, y));
        if !order.lt(&after, &before) {
            report.push(
                "strict-contraction",
                format!(
                    "pair ({}, {}): image distance {after} is not strictly \
                     below {before}",
                    space.encode_point(x),
                    space.encode_point(y)
                ),
            );
        }
    }
    report
}

/// Re-check everything a trace claims: steps are map applications of
/// distinct points with matching recorded distances, the distance chain
/// strictly decreases across the whole trace, each later stage's entry
/// point lies in every earlier ball, the ball chain nests strictly, and a
/// reached stage is final and genuinely fixed.
pub fn validate_trace<S, M>(
    space: &S,
    map: &M,
    trace: &Trace<S::Point, RadiusOf<S>>,
) -> Report
where
    S: Ultrametric,
    M: ContractingMap<S> + ?Sized,
{
    let mut report = Report::new();
    let order = space.order();

    if trace.stages.is_empty() {
        report.push("structure", "trace has no stages");
        return report;
    }
    for (k, seg) in trace.stages.iter().enumerate() {
        if seg.points.is_empty() {
            report.push("structure", format!("stage {k} has no points"));
            return report;
        }
        if seg.sigmas.len() + 1 != seg.points.len() {
            report.push(
                "structure",
                format!(
                    "stage {k} records {} points but {} step distances",
                    seg.points.len(),
                    seg.sigmas.len()
                ),
            );
            return report;
        }
        let expected_entry = if k == 0 { StageEntry::Start } else { StageEntry::OracleChoice };
        if seg.entry != expected_entry {
            report.push("structure", format!("stage {k} has entry {}, expected {expected_entry}", seg.entry));
        }
        if seg.reached && k + 1 != trace.stages.len() {
            report.push("reached-final", format!("stage {k} is marked reached but is not final"));
        }
    }

    for (k, seg) in trace.stages.iter().enumerate() {
        for i in 0..seg.sigmas.len() {
            let a = &seg.points[i];
            let b = &seg.points[i + 1];
            let image = map.apply(space, a);
            if image != *b {
                report.push(
                    "step-map",
                    format!(
                        "stage {k} step {i}: recorded successor is not the map image of {}",
                        space.encode_point(a)
                    ),
                );
            }
            if a == b {
                report.push(
                    "step-distinct",
                    format!("stage {k} step {i}: repeated point {}", space.encode_point(a)),
                );
            }
            let d = space.distance(a, b);
            if !order.eq(&d, &seg.sigmas[i]) {
                report.push(
                    "sigma-match",
                    format!(
                        "stage {k} step {i}: recorded distance {} but d = {d}",
                        seg.sigmas[i]
                    ),
                );
            }
        }
        if seg.reached {
            let last = seg.points.last().expect("checked non-empty");
            if !verify_fixed_point(space, map, last) {
                report.push(
                    "reached-final",
                    format!(
                        "stage {k} claims to reach a fixed point but {} moves",
                        space.encode_point(last)
                    ),
                );
            }
        }
    }

    let chain: Vec<&RadiusOf<S>> = trace.sigma_chain().collect();
    for w in chain.windows(2) {
        if !order.lt(w[1], w[0]) {
            report.push(
                "sigma-decrease",
                format!("step distance {} does not sit strictly below {}", w[1], w[0]),
            );
        }
    }
    for s in &chain {
        if order.is_zero(s) {
            report.push("sigma-decrease", format!("zero step distance {s} recorded"));
        }
    }

    // Later stage entries must lie inside every earlier recorded ball.
    for k in 1..trace.stages.len() {
        let b = &trace.stages[k].points[0];
        for (j, earlier) in trace.stages.iter().enumerate().take(k) {
            for (i, (a, sigma)) in earlier.points.iter().zip(earlier.sigmas.iter()).enumerate() {
                let d = space.distance(b, a);
                if !order.le(&d, sigma) {
                    report.push(
                        "entry-membership",
                        format!(
                            "stage {k} entry {} is at distance {d} from stage {j} \
                             iterate {i}, outside its ball of radius {sigma}",
                            space.encode_point(b)
                        ),
                    );
                }
            }
        }
    }

    // Strict nesting of consecutive principal balls across the whole trace.
    let pretty = |b: &Ball<S::Point, RadiusOf<S>>| {
        format!("B({}; {})", space.encode_point(&b.center), b.radius)
    };
    let balls = trace.balls();
    for w in balls.windows(2) {
        let (outer, inner) = (&w[0], &w[1]);
        let d_in = space.distance(&inner.center, &outer.center);
        if !order.le(&d_in, &outer.radius) {
            report.push(
                "ball-nesting",
                format!("{} has its center outside {}", pretty(inner), pretty(outer)),
            );
        }
        if !order.le(&inner.radius, &outer.radius) {
            report.push(
                "ball-nesting",
                format!("{} has radius not below {}", pretty(inner), pretty(outer)),
            );
        }
        let d_out = space.distance(&outer.center, &inner.center);
        if order.le(&d_out, &inner.radius) {
            report.push(
                "ball-nesting",
                format!(
                    "{} has its center inside {}; nesting is not strict",
                    pretty(outer),
                    pretty(inner)
                ),
            );
        }
    }

    report
}
