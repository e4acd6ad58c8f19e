//! Convergence diagnostics for iterate families and traces.
//!
//! The driver's traces are sequences of points with strictly decreasing
//! step distances. This module answers the follow-up questions: is such a
//! family pseudo-convergent, does the distance to a candidate limit match
//! the family's own gauge, is the family Cauchy against a sample of radii,
//! and do the step distances reach below every sampled radius? It also
//! checks solidness (every point has neighbours at every realized radius)
//! and extends a strictly contracting map through a limit point by
//! evaluating it on a sufficiently close approximant.

use std::fmt;

use crate::driver::{ContractingMap, Trace};
use crate::radius::RadiusOrder;
use crate::report::Report;
use crate::space::{RadiusOf, SolidWitness, Ultrametric};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    /// A dense accessor returned a point that is not strictly within the
    /// requested radius of its target.
    AccessorViolation { detail: String },
    /// A family failed the Cauchy test for some sampled radius.
    NotCauchy { detail: String },
}

impl fmt::Display for AnalysisError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnalysisError::AccessorViolation { detail } => {
                write!(f, "accessor violation: {detail}")
            }
            AnalysisError::NotCauchy { detail } => write!(f, "family is not Cauchy: {detail}"),
        }
    }
}

impl std::error::Error for AnalysisError {}

/// Result of testing a family for pseudo-convergence. `gauge` always holds
/// the consecutive distances `d(x_i, x_{i+1})`; `start` is the earliest
/// index from which every later triple satisfies the defining inequality,
/// and is meaningful only when `is_pseudo_convergent` holds.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoConvergence<R> {
    pub is_pseudo_convergent: bool,
    pub start: usize,
    pub gauge: Vec<R>,
}

/// A family is pseudo-convergent from index `s` when for all
/// `s <= i < j < k` the distance `d(x_j, x_k)` sits strictly below
/// `d(x_i, x_j)`. At least three points past `s` are required, so families
/// shorter than three are never pseudo-convergent.
pub fn pseudo_convergence<S: Ultrametric>(
    space: &S,
    family: &[S::Point],
) -> PseudoConvergence<RadiusOf<S>> {
    let order = space.order();
    let gauge: Vec<RadiusOf<S>> = family
        .windows(2)
        .map(|w| space.distance(&w[0], &w[1]))
        .collect();
    if family.len() < 3 {
        return PseudoConvergence { is_pseudo_convergent: false, start: 0, gauge };
    }
    let triple_ok = |s: usize| -> bool {
        for i in s..family.len() {
            for j in (i + 1)..family.len() {
                for k in (j + 1)..family.len() {
                    let outer = space.distance(&family[i], &family[j]);
                    let inner = space.distance(&family[j], &family[k]);
                    if !order.lt(&inner, &outer) {
                        return false;
                    }
                }
            }
        }
        true
    };
    for s in 0..=(family.len() - 3) {
        if triple_ok(s) {
            return PseudoConvergence { is_pseudo_convergent: true, start: s, gauge };
        }
    }
    PseudoConvergence { is_pseudo_convergent: false, start: 0, gauge }
}

/// For a pseudo-convergent family the distance from `x_i` to any later
/// member collapses to the gauge value `d(x_i, x_{i+1})`. Reports every
/// pair past `pc.start` where that identity fails; clean when the family
/// was not pseudo-convergent to begin with.
pub fn check_gauge_identity<S: Ultrametric>(
    space: &S,
    family: &[S::Point],
    pc: &PseudoConvergence<RadiusOf<S>>,
) -> Report {
    let mut report = Report::new();
    if !pc.is_pseudo_convergent {
        return report;
    }
    let order = space.order();
    for i in pc.start..family.len().saturating_sub(1) {
        for j in (i + 1)..family.len() {
            let d = space.distance(&family[i], &family[j]);
            if !order.eq(&d, &pc.gauge[i]) {
                report.push(
                    "gauge-identity",
                    format!(
                        "d(x_{i}, x_{j}) = {d} differs from the gauge value {}",
                        pc.gauge[i]
                    ),
                );
            }
        }
    }
    report
}

/// True iff from some index on, `y` lies within every gauge ball: there is
/// a suffix on which `d(y, x_i)` stays below or at `d(x_i, x_{i+1})`.
pub fn is_pseudo_limit<S: Ultrametric>(space: &S, family: &[S::Point], y: &S::Point) -> bool {
    if family.len() < 2 {
        return false;
    }
    let order = space.order();
    let gauge: Vec<RadiusOf<S>> = family
        .windows(2)
        .map(|w| space.distance(&w[0], &w[1]))
        .collect();
    'suffix: for s in 0..gauge.len() {
        for i in s..gauge.len() {
            let d = space.distance(y, &family[i]);
            if !order.le(&d, &gauge[i]) {
                continue 'suffix;
            }
        }
        return true;
    }
    false
}

/// Cauchy test against a sample of radii. For each nonzero sampled radius
/// the family must either have a tail (with at least one pair) whose
/// pairwise distances all sit strictly below it, or be pseudo-convergent
/// with its final gauge value at or below it.
pub fn is_cauchy<S: Ultrametric>(
    space: &S,
    family: &[S::Point],
    radii: &[RadiusOf<S>],
) -> bool {
    if family.len() < 2 {
        return false;
    }
    let order = space.order();
    let pc = pseudo_convergence(space, family);
    let final_gauge = pc.gauge.last();
    for gamma in radii {
        if order.is_zero(gamma) {
            continue;
        }
        let tail_ok = (0..family.len() - 1).any(|t| {
            (t..family.len()).all(|i| {
                ((i + 1)..family.len()).all(|j| {
                    let d = space.distance(&family[i], &family[j]);
                    order.lt(&d, gamma) || order.is_zero(&d)
                })
            })
        });
        let pc_ok = pc.is_pseudo_convergent
            && final_gauge.map(|g| order.le(g, gamma)).unwrap_or(false);
        if !tail_ok && !pc_ok {
            return false;
        }
    }
    true
}

/// The family's limit at sampled resolution: its final member, once the
/// family passes the Cauchy test for every sampled radius.
pub fn cauchy_limit<S: Ultrametric>(
    space: &S,
    family: &[S::Point],
    radii: &[RadiusOf<S>],
) -> Result<S::Point, AnalysisError> {
    if !is_cauchy(space, family, radii) {
        return Err(AnalysisError::NotCauchy {
            detail: format!(
                "family of {} points fails the test against {} sampled radii",
                family.len(),
                radii.len()
            ),
        });
    }
    Ok(family.last().expect("Cauchy family is non-empty").clone())
}

/// True iff the trace's step distances reach at or below every nonzero
/// radius in `sample`: the chain is coinitial in the sampled radii.
pub fn sigma_coinitial<S: Ultrametric>(
    space: &S,
    trace: &Trace<S::Point, RadiusOf<S>>,
    sample: &[RadiusOf<S>],
) -> bool {
    let order = space.order();
    let chain: Vec<&RadiusOf<S>> = trace.sigma_chain().collect();
    sample
        .iter()
        .filter(|gamma| !order.is_zero(gamma))
        .all(|gamma| chain.iter().any(|sigma| order.le(sigma, gamma)))
}

/// Ask the space to witness its own solidness: for sampled points and
/// realized radii, a point at exactly that distance must exist, and the
/// returned witness must actually be at that distance. At most
/// `witness_budget` pairs are checked.
pub fn solidness_check<S: SolidWitness>(space: &S, witness_budget: usize) -> Report {
    let mut report = Report::new();
    let order = space.order();
    let mut checked = 0usize;
    'outer: for x in space.sample_points() {
        for gamma in space.realized_radii() {
            if checked >= witness_budget {
                break 'outer;
            }
            checked += 1;
            if order.is_zero(&gamma) {
                continue;
            }
            match space.solidness_witness(&x, &gamma) {
                None => report.push(
                    "solid-miss",
                    format!(
                        "no point at distance {gamma} from {} was produced",
                        space.encode_point(&x)
                    ),
                ),
                Some(y) => {
                    let d = space.distance(&x, &y);
                    if !order.eq(&d, &gamma) {
                        report.push(
                            "solid-witness-wrong",
                            format!(
                                "witness {} for ({}, {gamma}) is at distance {d}",
                                space.encode_point(&y),
                                space.encode_point(&x)
                            ),
                        );
                    }
                }
            }
        }
    }
    report
}

/// Access to a dense set of tractable approximants: `approximant` must
/// return a point strictly within `gamma` of `target`.
pub trait DenseAccessor<S: Ultrametric> {
    fn approximant(&self, space: &S, target: &S::Point, gamma: &RadiusOf<S>) -> S::Point;
}

impl<S, F> DenseAccessor<S> for F
where
    S: Ultrametric,
    F: Fn(&S, &S::Point, &RadiusOf<S>) -> S::Point,
{
    fn approximant(&self, space: &S, target: &S::Point, gamma: &RadiusOf<S>) -> S::Point {
        self(space, target, gamma)
    }
}

/// Evaluate a strictly contracting map at `target` through a dense
/// approximant: fetch a point strictly within `gamma` of `target` and
/// return its image. Strict contraction keeps the image within `gamma` of
/// the true value, so the result approximates `psi(target)` at resolution
/// `gamma`. The accessor's proximity claim is re-verified.
pub fn extend_by_continuity<S, M, A>(
    space: &S,
    psi: &M,
    accessor: &A,
    target: &S::Point,
    gamma: &RadiusOf<S>,
) -> Result<S::Point, AnalysisError>
where
    S: Ultrametric,
    M: ContractingMap<S> + ?Sized,
    A: DenseAccessor<S> + ?Sized,
{
    let order = space.order();
    let y = accessor.approximant(space, target, gamma);
    let d = space.distance(&y, target);
    if !order.lt(&d, gamma) {
        return Err(AnalysisError::AccessorViolation {
            detail: format!(
                "approximant is at distance {d} from its target, not strictly \
                 within {gamma}"
            ),
        });
    }
    Ok(psi.apply(space, &y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::driver::{run, DriverConfig};
    use crate::radius::{NatExp, NatExpRadius};

    /// Two-adic toy space on signed integers: the distance between `m` and
    /// `n` shrinks with the number of factors of two in their difference.
    struct Dyadic;

    fn two_valuation(n: i64) -> NatExpRadius {
        if n == 0 {
            NatExpRadius::Zero
        } else {
            NatExpRadius::Exp(n.trailing_zeros() as u64)
        }
    }

    impl Ultrametric for Dyadic {
        type Point = i64;
        type Order = NatExp;

        fn order(&self) -> &NatExp {
            &NatExp
        }

        fn distance(&self, x: &i64, y: &i64) -> NatExpRadius {
            two_valuation(x - y)
        }

        fn sample_points(&self) -> Vec<i64> {
            (-3..=3).collect()
        }

        fn realized_radii(&self) -> Vec<NatExpRadius> {
            (0..8).map(NatExpRadius::Exp).collect()
        }

        fn describe(&self) -> String {
            "dyadic".into()
        }

        fn encode_point(&self, x: &i64) -> String {
            x.to_string()
        }

        fn decode_point(&self, s: &str) -> Result<i64, String> {
            s.parse().map_err(|e| format!("bad integer: {e}"))
        }
    }

    impl SolidWitness for Dyadic {
        fn solidness_witness(&self, x: &i64, gamma: &NatExpRadius) -> Option<i64> {
            match gamma {
                NatExpRadius::Zero => None,
                NatExpRadius::Exp(k) if *k < 62 => Some(x + (1i64 << k)),
                NatExpRadius::Exp(_) => None,
            }
        }
    }

    fn exp(k: u64) -> NatExpRadius {
        NatExpRadius::Exp(k)
    }

    /// Partial sums of 1 + 2 + 4 + ...: the classic family converging to
    /// -1 two-adically.
    fn power_sums(n: usize) -> Vec<i64> {
        (1..=n as u32).map(|k| (1i64 << k) - 1).collect()
    }

    #[test]
    fn power_sums_are_pseudo_convergent_with_exact_gauge() {
        let s = Dyadic;
        let fam = power_sums(6);
        let pc = pseudo_convergence(&s, &fam);
        assert!(pc.is_pseudo_convergent);
        assert_eq!(pc.start, 0);
        assert_eq!(pc.gauge, (1..6).map(exp).collect::<Vec<_>>());
        assert!(check_gauge_identity(&s, &fam, &pc).is_clean());
    }

    #[test]
    fn alternating_families_are_not_pseudo_convergent() {
        let s = Dyadic;
        let fam = vec![0i64, 1, 0, 1];
        let pc = pseudo_convergence(&s, &fam);
        assert!(!pc.is_pseudo_convergent);
        assert!(!is_cauchy(&s, &fam, &[exp(0)]));
    }

    #[test]
    fn short_families_are_never_pseudo_convergent() {
        let s = Dyadic;
        assert!(!pseudo_convergence(&s, &[0i64, 2]).is_pseudo_convergent);
        assert!(!pseudo_convergence(&s, &[]).is_pseudo_convergent);
    }

    #[test]
    fn rough_start_is_skipped_by_the_start_index() {
        let s = Dyadic;
        // The first two steps both have distance 1, so triples anchored at
        // index 0 fail; from index 1 on the distances fall cleanly.
        let fam = vec![0i64, 1, 2, 6, 14, 30];
        let pc = pseudo_convergence(&s, &fam);
        assert!(pc.is_pseudo_convergent);
        assert_eq!(pc.start, 1);
    }

    #[test]
    fn gauge_identity_violations_are_reported() {
        let s = Dyadic;
        let mut fam = power_sums(6);
        let pc = pseudo_convergence(&s, &fam);
        // Nudge a member by a coarse amount: distances to it no longer
        // collapse to the recorded gauge.
        fam[4] += 2;
        let r = check_gauge_identity(&s, &fam, &pc);
        assert!(r.has_rule("gauge-identity"));
    }

    #[test]
    fn minus_one_is_a_pseudo_limit_of_the_power_sums() {
        let s = Dyadic;
        let fam = power_sums(6);
        assert!(is_pseudo_limit(&s, &fam, &-1));
        // 0 agrees with no tail of the gauge.
        assert!(!is_pseudo_limit(&s, &fam, &0));
    }

    #[test]
    fn cauchy_families_hand_out_their_last_member() {
        let s = Dyadic;
        let fam = power_sums(8);
        let radii: Vec<NatExpRadius> = (0..6).map(exp).collect();
        assert!(is_cauchy(&s, &fam, &radii));
        assert_eq!(cauchy_limit(&s, &fam, &radii).unwrap(), *fam.last().unwrap());
    }

    #[test]
    fn stabilized_families_are_cauchy() {
        let s = Dyadic;
        let fam = vec![5i64, 3, 3, 3];
        let radii: Vec<NatExpRadius> = (0..8).map(exp).collect();
        assert!(is_cauchy(&s, &fam, &radii));
    }

    #[test]
    fn non_cauchy_families_are_refused_a_limit() {
        let s = Dyadic;
        let fam = vec![0i64, 1, 0, 1];
        let err = cauchy_limit(&s, &fam, &[exp(0)]).unwrap_err();
        assert!(matches!(err, AnalysisError::NotCauchy { .. }));
    }

    #[test]
    fn sigma_chains_report_their_reach() {
        let s = Dyadic;
        let doubling = |_: &Dyadic, x: &i64| x * 2;
        let out = run(&s, &doubling, 1, &DriverConfig::new(5, 1)).unwrap();
        let trace = out.trace();
        // Steps from 1: distances 1, 2, 4, ...: valuations 0..4.
        assert!(sigma_coinitial(&s, trace, &(0..5).map(exp).collect::<Vec<_>>()));
        assert!(!sigma_coinitial(&s, trace, &[exp(9)]));
    }

    #[test]
    fn solidness_witnesses_are_verified() {
        let s = Dyadic;
        assert!(solidness_check(&s, 1000).is_clean());

        /// Same space, but witnesses overshoot by one factor of two.
        struct Overshoot;
        impl Ultrametric for Overshoot {
            type Point = i64;
            type Order = NatExp;
            fn order(&self) -> &NatExp {
                &NatExp
            }
            fn distance(&self, x: &i64, y: &i64) -> NatExpRadius {
                two_valuation(x - y)
            }
            fn sample_points(&self) -> Vec<i64> {
                vec![0]
            }
            fn realized_radii(&self) -> Vec<NatExpRadius> {
                vec![NatExpRadius::Exp(2)]
            }
            fn describe(&self) -> String {
                "dyadic-overshoot".into()
            }
            fn encode_point(&self, x: &i64) -> String {
                x.to_string()
            }
            fn decode_point(&self, s: &str) -> Result<i64, String> {
                s.parse().map_err(|e| format!("bad integer: {e}"))
            }
        }
        impl SolidWitness for Overshoot {
            fn solidness_witness(&self, x: &i64, gamma: &NatExpRadius) -> Option<i64> {
                match gamma {
                    NatExpRadius::Exp(k) => Some(x + (1i64 << (k + 1))),
                    NatExpRadius::Zero => None,
                }
            }
        }
        let r = solidness_check(&Overshoot, 10);
        assert!(r.has_rule("solid-witness-wrong"));
    }

    #[test]
    fn witness_budget_caps_the_pair_count() {
        let s = Dyadic;
        let r = solidness_check(&s, 0);
        assert!(r.is_clean());
    }

    #[test]
    fn extension_through_close_approximants_matches_the_direct_image() {
        let s = Dyadic;
        let double = |_: &Dyadic, x: &i64| x * 2;
        // Approximants overshoot the target by a power of two strictly
        // finer than requested.
        let access = |_: &Dyadic, target: &i64, gamma: &NatExpRadius| match gamma {
            NatExpRadius::Exp(k) => target + (1i64 << (k + 1)),
            NatExpRadius::Zero => *target,
        };
        let target = 11i64;
        let gamma = exp(3);
        let result = extend_by_continuity(&s, &double, &access, &target, &gamma).unwrap();
        let direct = 22i64;
        // The extension approximates the direct image strictly within the
        // requested resolution.
        assert!(NatExp.lt(&s.distance(&result, &direct), &gamma));
    }

    #[test]
    fn sloppy_accessors_are_rejected() {
        let s = Dyadic;
        let double = |_: &Dyadic, x: &i64| x * 2;
        // Exactly at the requested radius, not strictly within it.
        let access = |_: &Dyadic, target: &i64, gamma: &NatExpRadius| match gamma {
            NatExpRadius::Exp(k) => target + (1i64 << k),
            NatExpRadius::Zero => *target,
        };
        let err = extend_by_continuity(&s, &double, &access, &11, &exp(3)).unwrap_err();
        assert!(matches!(err, AnalysisError::AccessorViolation { .. }));
    }
}
