//! Randomized invariants: generated orders and spaces satisfy their
//! axioms, driver traces are independent of how the step budget is split
//! into stages, documents round-trip byte-identically, and the expression
//! parsers invert `Display`.

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use ultrafix::analysis;
use ultrafix::apps::{hensel_solve, HenselProblem, IntPoly};
use ultrafix::cli::expr::{parse_int_poly, parse_poly2, parse_rational};
use ultrafix::cli::trace_doc::{emit_document, parse_document, revalidate, TypedRun};
use ultrafix::instances::{
    all_contracting_selfmaps, finite_space_enumerate, FiniteSpace, LexSeriesSpace, PadicSpace,
    Poly2, SeriesSpace, TableMap,
};
use ultrafix::radius::{check_order_axioms, FinitePoset};
use ultrafix::space::{check_ball_lemma, check_space_axioms, RadiusOf};
use ultrafix::{run, DriverConfig, Outcome, RadiusOrder, Report, Ultrametric};

// ── helpers ─────────────────────────────────────────────────────────────

/// Axiom sweep used for every generated space: order laws, distance laws
/// over sampled and realized radii, and the ball membership dichotomy.
fn space_report<S: Ultrametric>(space: &S) -> Report {
    let mut report = check_order_axioms(space.order());
    let mut radii: Vec<RadiusOf<S>> = space.order().sample();
    radii.extend(space.realized_radii());
    report.merge(check_space_axioms(space, &radii));
    report.merge(check_ball_lemma(space));
    report
}

/// A strict order on `r0..r{n-1}` with `r0` the least element and an
/// arbitrary extra set of upward edges: always a valid radius order.
fn poset_from_mask(n: usize, mask: &[bool]) -> FinitePoset {
    let names: Vec<String> = (0..n).map(|i| format!("r{i}")).collect();
    let elems: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let mut pairs: Vec<(&str, &str)> = Vec::new();
    for k in 1..n {
        pairs.push((elems[0], elems[k]));
    }
    let mut bit = 0usize;
    for i in 1..n {
        for j in (i + 1)..n {
            if mask.get(bit).copied().unwrap_or(false) {
                pairs.push((elems[i], elems[j]));
            }
            bit += 1;
        }
    }
    FinitePoset::new("gen", &elems, &pairs).expect("upward edges keep the order valid")
}

fn pick_order(use_diamond: bool) -> FinitePoset {
    if use_diamond {
        FinitePoset::diamond("diamond")
    } else {
        FinitePoset::chain("chain3", 3)
    }
}

/// Deterministically select a space, a contracting map, and a start from
/// the enumeration, using raw indices as seeds.
fn pick_finite_run(
    use_diamond: bool,
    n: usize,
    space_seed: usize,
    map_seed: usize,
    start_seed: usize,
) -> (FiniteSpace, TableMap, usize) {
    let order = pick_order(use_diamond);
    let spaces = finite_space_enumerate(n, &order);
    let space = spaces[space_seed % spaces.len()].clone();
    let maps = all_contracting_selfmaps(&space);
    let map = maps[map_seed % maps.len()].clone();
    let start = start_seed % space.len();
    (space, map, start)
}

// ── generated orders and spaces ─────────────────────────────────────────

proptest! {
    #[test]
    fn prop_generated_posets_satisfy_the_order_axioms(
        n in 2usize..=5,
        mask in proptest::collection::vec(any::<bool>(), 6),
    ) {
        let poset = poset_from_mask(n, &mask);
        let report = check_order_axioms(&poset);
        prop_assert!(report.is_clean(), "violations: {:?}", report.violations());
    }

    #[test]
    fn prop_residue_spaces_satisfy_the_space_axioms(
        p in prop_oneof![Just(2u64), Just(3), Just(5), Just(7), Just(11), Just(13)],
        precision in 1u32..=5,
    ) {
        let space = PadicSpace::new(p, precision).expect("valid parameters");
        let report = space_report(&space);
        prop_assert!(report.is_clean(), "violations: {:?}", report.violations());
    }

    #[test]
    fn prop_series_spaces_satisfy_the_space_axioms(cap in 1usize..=8) {
        let space = SeriesSpace::new(cap).expect("valid cap");
        let report = space_report(&space);
        prop_assert!(report.is_clean(), "violations: {:?}", report.violations());
    }

    #[test]
    fn prop_lex_spaces_satisfy_the_space_axioms(
        cap_m in 1u32..=4,
        cap_n in 1u32..=4,
    ) {
        let space = LexSeriesSpace::new(cap_m, cap_n).expect("valid caps");
        let report = space_report(&space);
        prop_assert!(report.is_clean(), "violations: {:?}", report.violations());
    }

    #[test]
    fn prop_enumerated_finite_spaces_satisfy_the_space_axioms(
        use_diamond in any::<bool>(),
        n in 1usize..=4,
        space_seed in any::<usize>(),
    ) {
        let order = pick_order(use_diamond);
        let spaces = finite_space_enumerate(n, &order);
        let space = &spaces[space_seed % spaces.len()];
        let report = space_report(space);
        prop_assert!(report.is_clean(), "violations: {:?}", report.violations());
    }
}

// ── driver invariants ───────────────────────────────────────────────────

proptest! {
    /// The iterate family and step-distance chain depend only on the map
    /// and the start, not on how the step budget is split into stages.
    #[test]
    fn prop_finite_runs_are_stage_split_invariant(
        use_diamond in any::<bool>(),
        n in 2usize..=4,
        space_seed in any::<usize>(),
        map_seed in any::<usize>(),
        start_seed in any::<usize>(),
    ) {
        let (space, map, start) = pick_finite_run(use_diamond, n, space_seed, map_seed, start_seed);
        let configs = [
            DriverConfig::new(n + 1, 2),
            DriverConfig::new(1, n + 3),
            DriverConfig::new(2, n + 1),
        ];
        let mut seen: Option<(usize, Vec<usize>, Vec<String>)> = None;
        for config in &configs {
            let outcome = run(&space, &map, start, config).expect("comparable step distances");
            let Outcome::Reached { point, trace, .. } = &outcome else {
                return Err(TestCaseError::fail(format!(
                    "run under {:?} ended {} instead of reaching the fixed point",
                    config,
                    outcome.label()
                )));
            };
            let family = trace.family();
            let sigmas: Vec<String> =
                trace.sigma_chain().map(|s| s.name().to_string()).collect();
            match &seen {
                None => seen = Some((*point, family, sigmas)),
                Some((p0, f0, s0)) => {
                    prop_assert_eq!(point, p0, "reached point changed with the stage split");
                    prop_assert_eq!(&family, f0, "iterate family changed with the stage split");
                    prop_assert_eq!(&sigmas, s0, "sigma chain changed with the stage split");
                }
            }
        }
    }

    /// Whatever the run, the solution the driver certifies is a pseudo-limit
    /// of a long-enough iterate family, per the convergence diagnostics.
    #[test]
    fn prop_reached_points_are_pseudo_limits(
        use_diamond in any::<bool>(),
        n in 3usize..=4,
        space_seed in any::<usize>(),
        map_seed in any::<usize>(),
        start_seed in any::<usize>(),
    ) {
        let (space, map, start) = pick_finite_run(use_diamond, n, space_seed, map_seed, start_seed);
        let outcome = run(&space, &map, start, &DriverConfig::new(n + 1, 2))
            .expect("comparable step distances");
        if let Outcome::Reached { point, trace, .. } = &outcome {
            let family = trace.family();
            if family.len() >= 2 {
                prop_assert!(analysis::is_pseudo_limit(&space, &family, point));
            }
        }
    }
}

// ── document round-trips ────────────────────────────────────────────────

fn assert_doc_round_trips(run: &TypedRun) -> Result<(), TestCaseError> {
    let doc = emit_document(run);
    let parsed = parse_document(&doc).map_err(|e| {
        TestCaseError::fail(format!("emitted document failed to parse: {e}\n{doc}"))
    })?;
    let again = emit_document(&parsed.run);
    prop_assert_eq!(&again, &doc, "re-emission is not byte-identical");
    let report = revalidate(&doc)
        .map_err(|e| TestCaseError::fail(format!("revalidation failed to parse: {e}")))?;
    prop_assert!(report.is_clean(), "revalidation violations: {:?}", report.violations());
    Ok(())
}

proptest! {
    #[test]
    fn prop_finite_documents_round_trip(
        use_diamond in any::<bool>(),
        n in 1usize..=4,
        space_seed in any::<usize>(),
        map_seed in any::<usize>(),
        start_seed in any::<usize>(),
    ) {
        let (space, map, start) = pick_finite_run(use_diamond, n, space_seed, map_seed, start_seed);
        let outcome = run(&space, &map, start, &DriverConfig::new(n + 1, 2))
            .expect("comparable step distances");
        assert_doc_round_trips(&TypedRun::Finite { space, map, outcome })?;
    }

    /// Seeds `r` with `f(r) = r^2 - (r^2 + kp) = -kp` always satisfy the
    /// lifting hypotheses for odd `p` and nonzero `r`, so every generated
    /// problem solves and its document must round-trip.
    #[test]
    fn prop_lifting_documents_round_trip(
        p in prop_oneof![Just(5u64), Just(7), Just(11)],
        r in 1u64..=4,
        k in 0u64..3,
        precision in 2u32..=4,
    ) {
        let a = (r * r + k * p) as i64;
        let solved = hensel_solve(
            &HenselProblem {
                p,
                precision,
                poly: IntPoly::new(vec![-a, 0, 1]),
                seed: r as i64,
            },
            &DriverConfig::new(precision as usize + 2, 4),
        )
        .expect("the generated seed satisfies the lifting hypotheses");
        prop_assert!(solved.root.is_some(), "the lift must stabilize within the budget");
        assert_doc_round_trips(&TypedRun::Padic {
            space: solved.space,
            map: solved.map,
            outcome: solved.outcome,
        })?;
    }
}

// ── expression parsing inverts Display ──────────────────────────────────

proptest! {
    #[test]
    fn prop_integer_polynomials_round_trip_through_display(
        coeffs in proptest::collection::vec(-9i64..=9, 0..=5),
    ) {
        let poly = IntPoly::new(coeffs);
        let parsed = parse_int_poly(&poly.to_string())
            .map_err(|e| TestCaseError::fail(format!("{e} for {poly}")))?;
        prop_assert_eq!(parsed, poly);
    }

    #[test]
    fn prop_two_variable_polynomials_round_trip_through_display(
        terms in proptest::collection::vec(
            (0u32..=3, 0u32..=3, -9i64..=9, 1i64..=9),
            0..=3,
        ),
    ) {
        let poly = terms.iter().fold(Poly2::zero(), |acc, (te, ye, num, den)| {
            acc.term(*te, *ye, BigRational::new(BigInt::from(*num), BigInt::from(*den)))
        });
        let parsed = parse_poly2(&poly.to_string())
            .map_err(|e| TestCaseError::fail(format!("{e} for {poly}")))?;
        prop_assert_eq!(parsed, poly);
    }

    #[test]
    fn prop_rationals_round_trip_through_display(
        num in -1000i64..=1000,
        den in 1i64..=1000,
    ) {
        let value = BigRational::new(BigInt::from(num), BigInt::from(den));
        let parsed = parse_rational(&value.to_string())
            .map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(parsed, value);
    }
}
