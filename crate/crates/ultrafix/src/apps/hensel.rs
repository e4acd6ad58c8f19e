//! Root lifting over the p-adic integers. Given an integer polynomial, a
//! prime, and a seed residue whose derivative value is a unit, the Newton
//! map `x -> x - f(x) / f'(x)` is strictly contracting on the seed's
//! residue ball, and the driver walks it to the root mod `p^N`.

use crate::driver::{run, ContractingMap, DriverConfig, Outcome};
use crate::instances::{PadicInt, PadicSpace};
use crate::radius::NatExpRadius;
use crate::space::Ultrametric;

use super::AppError;

/// A polynomial with integer coefficients, stored low degree first with no
/// trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPoly {
    coeffs: Vec<i64>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<i64>) -> IntPoly {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn derivative(&self) -> IntPoly {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * k as i64)
            .collect();
        IntPoly::new(coeffs)
    }

    /// Horner evaluation in the residue ring.
    pub fn eval(&self, space: &PadicSpace, x: &PadicInt) -> PadicInt {
        let mut acc = space.point(0);
        for c in self.coeffs.iter().rev() {
            acc = acc
                .mul(x)
                .and_then(|v| v.add(&space.point(*c)))
                .expect("evaluation stays within one setting");
        }
        acc
    }
}

impl std::fmt::Display for IntPoly {
    /// Canonical compact form, highest degree first: `x^2-2`.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if *c == 0 {
                continue;
            }
            let mag = c.unsigned_abs();
            if *c < 0 {
                write!(f, "-")?;
            } else if !first {
                write!(f, "+")?;
            }
            first = false;
            match (k, mag) {
                (0, m) => write!(f, "{m}")?,
                (1, 1) => write!(f, "x")?,
                (1, m) => write!(f, "{m}*x")?,
                (k, 1) => write!(f, "x^{k}")?,
                (k, m) => write!(f, "{m}*x^{k}")?,
            }
        }
        Ok(())
    }
}

/// The Newton step `x -> x - f(x) * f'(x)^{-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewtonMap {
    poly: IntPoly,
    deriv: IntPoly,
}

impl NewtonMap {
    pub fn new(poly: IntPoly) -> NewtonMap {
        let deriv = poly.derivative();
        NewtonMap { poly, deriv }
    }

    pub fn poly(&self) -> &IntPoly {
        &self.poly
    }
}

impl ContractingMap<PadicSpace> for NewtonMap {
    fn apply(&self, space: &PadicSpace, x: &PadicInt) -> PadicInt {
        let fx = self.poly.eval(space, x);
        let dfx = self.deriv.eval(space, x);
        let Ok(inv) = dfx.unit_inverse() else {
            // Off the unit-derivative locus the Newton step is undefined.
            // Solver runs never leave it (iterates keep the seed's residue
            // mod p), but validation of an arbitrary document may probe
            // here; answer with a visibly moved point, never a fixed one.
            return x.add(&space.point(1)).expect("one setting");
        };
        x.sub(&fx.mul(&inv).expect("one setting"))
            .expect("one setting")
    }

    fn describe(&self) -> String {
        format!("newton {}", self.poly)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HenselProblem {
    pub p: u64,
    pub precision: u32,
    pub poly: IntPoly,
    pub seed: i64,
}

#[derive(Debug, Clone)]
pub struct HenselOutcome {
    pub space: PadicSpace,
    pub map: NewtonMap,
    pub outcome: Outcome<PadicInt, NatExpRadius>,
    /// The certified root, when the run produced one.
    pub root: Option<PadicInt>,
}

/// Lift the seed to a root of the polynomial mod `p^N`.
///
/// Checked hypotheses: `f'(seed)` is a unit (only this simple case ships)
/// and `f(seed)` is divisible by `p`, together the strict form of the
/// lifting condition. The Newton map is additionally spot-checked for
/// strict contraction on sampled pairs from the seed's residue ball.
pub fn hensel_solve(
    prob: &HenselProblem,
    config: &DriverConfig,
) -> Result<HenselOutcome, AppError> {
    let space = PadicSpace::new(prob.p, prob.precision)?;
    let seed = space.point(prob.seed);
    let map = NewtonMap::new(prob.poly.clone());

    let dseed = prob.poly.derivative().eval(&space, &seed);
    if dseed.valuation() != Some(0) {
        return Err(AppError::HenselConditionFailed {
            detail: format!(
                "f'({}) = {} mod {} is not a unit; only the unit-derivative case \
                 is supported",
                space.encode_point(&seed),
                dseed.residue(),
                space.modulus()
            ),
        });
    }
    let fseed = prob.poly.eval(&space, &seed);
    if fseed.valuation() == Some(0) {
        return Err(AppError::HenselConditionFailed {
            detail: format!(
                "f({}) = {} mod {} is a unit, so the seed is not even an \
                 approximate root",
                space.encode_point(&seed),
                fseed.residue(),
                space.modulus()
            ),
        });
    }

    // Spot-check strict contraction on pairs inside the seed's residue
    // ball, where the lifting argument promises it.
    let ball: Vec<PadicInt> = (0..5)
        .map(|j| {
            seed.add(&space.point((prob.p as i64).saturating_mul(j)))
                .expect("one setting")
        })
        .collect();
    let mut pairs = Vec::new();
    for i in 0..ball.len() {
        for j in (i + 1)..ball.len() {
            pairs.push((ball[i], ball[j]));
        }
    }
    let contraction = crate::driver::check_strict_contraction(&space, &map, &pairs);
    if !contraction.is_clean() {
        return Err(AppError::HenselConditionFailed {
            detail: format!("the Newton map fails to contract on the seed ball: {contraction}"),
        });
    }

    let outcome = run(&space, &map, seed, config)?;
    let root = outcome.point().copied();
    Ok(HenselOutcome { space, map, outcome, root })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::driver::validate_trace;

    fn solve(p: u64, precision: u32, coeffs: Vec<i64>, seed: i64) -> HenselOutcome {
        let prob = HenselProblem { p, precision, poly: IntPoly::new(coeffs), seed };
        hensel_solve(&prob, &DriverConfig::new(precision as usize + 2, 2)).unwrap()
    }

    /// Brute-force root of the polynomial congruent to the seed mod p.
    fn exhaustive_root(p: u64, precision: u32, poly: &IntPoly, seed: i64) -> Option<u64> {
        let space = PadicSpace::new(p, precision).unwrap();
        let seed_residue = space.point(seed).residue() % p;
        let mut found = None;
        for r in 0..space.modulus() {
            let x = space.point(r as i64);
            if x.residue() % p == seed_residue && poly.eval(&space, &x).residue() == 0 {
                assert!(found.is_none(), "the unit-derivative case has a unique lift");
                found = Some(r);
            }
        }
        found
    }

    #[test]
    fn square_root_of_two_lifts_mod_49() {
        let out = solve(7, 2, vec![-2, 0, 1], 3);
        let root = out.root.expect("reached");
        assert_eq!(root.residue(), 10);
        assert_eq!(out.map.poly().eval(&out.space, &root).residue(), 0);
    }

    #[test]
    fn square_root_of_two_lifts_mod_343() {
        let out = solve(7, 3, vec![-2, 0, 1], 3);
        let root = out.root.expect("reached");
        assert_eq!(root.residue(), 108, "108^2 = 11664 = 2 + 34 * 343");
        // The lift stays congruent to its seed.
        assert_eq!(root.residue() % 7, 3);
        assert!(matches!(out.outcome, Outcome::Reached { .. }));
        let trace = out.outcome.trace();
        assert!(validate_trace(&out.space, &out.map, trace).is_clean());
    }

    #[test]
    fn square_root_of_minus_one_lifts_mod_25() {
        let out = solve(5, 2, vec![1, 0, 1], 2);
        assert_eq!(out.root.expect("reached").residue(), 7, "7^2 = 49 = -1 + 2 * 25");
    }

    #[test]
    fn lifted_roots_match_exhaustive_search() {
        for precision in 1..=3 {
            let poly = IntPoly::new(vec![-2, 0, 1]);
            let expected = exhaustive_root(7, precision, &poly, 3).expect("2 is a square mod 7^k");
            let out = solve(7, precision, vec![-2, 0, 1], 3);
            assert_eq!(out.root.expect("reached").residue(), expected, "precision {precision}");
        }
    }

    #[test]
    fn even_derivative_values_are_refused() {
        let prob = HenselProblem { p: 2, precision: 4, poly: IntPoly::new(vec![-3, 0, 1]), seed: 1 };
        let err = hensel_solve(&prob, &DriverConfig::default()).unwrap_err();
        assert!(matches!(err, AppError::HenselConditionFailed { .. }));
    }

    #[test]
    fn seeds_that_are_not_approximate_roots_are_refused() {
        let prob = HenselProblem { p: 7, precision: 3, poly: IntPoly::new(vec![-2, 0, 1]), seed: 1 };
        let err = hensel_solve(&prob, &DriverConfig::default()).unwrap_err();
        assert!(matches!(err, AppError::HenselConditionFailed { .. }));
    }

    #[test]
    fn polynomial_display_is_canonical() {
        assert_eq!(IntPoly::new(vec![-2, 0, 1]).to_string(), "x^2-2");
        assert_eq!(IntPoly::new(vec![1, 0, 1]).to_string(), "x^2+1");
        assert_eq!(IntPoly::new(vec![0, -1]).to_string(), "-x");
        assert_eq!(IntPoly::new(vec![5]).to_string(), "5");
        assert_eq!(IntPoly::new(vec![0, 3, 0, 0]).to_string(), "3*x");
        assert_eq!(IntPoly::new(vec![]).to_string(), "0");
    }

    #[test]
    fn derivatives_follow_the_power_rule() {
        let f = IntPoly::new(vec![-2, 0, 1]);
        assert_eq!(f.derivative(), IntPoly::new(vec![0, 2]));
        assert_eq!(IntPoly::new(vec![7]).derivative(), IntPoly::new(vec![]));
    }

    #[test]
    fn a_seed_that_is_already_a_root_reaches_at_step_zero() {
        let out = solve(7, 2, vec![-2, 0, 1], 10);
        match out.outcome {
            Outcome::Reached { stage_index, step_index, .. } => {
                assert_eq!((stage_index, step_index), (0, 0));
            }
            other => panic!("expected Reached, got {}", other.label()),
        }
    }
}
