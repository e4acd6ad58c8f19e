//! Power-series solutions of `y' = f(t, y)`, `y(0) = y0`, for polynomial
//! right-hand sides. The integral operator `T(y) = y0 + ∫ f(t, y)` is
//! strictly contracting on truncated series because integration raises the
//! order of vanishing; its fixed point is the solution through the cap.
//!
//! The iterates are always polynomials; the solution they approach usually
//! is not. That makes this the working example of evaluating a map at a
//! limit point through close-by tractable approximants.

use num_rational::BigRational;

use crate::analysis::extend_by_continuity;
use crate::driver::{run, ContractingMap, DriverConfig, Outcome};
use crate::instances::{poly_eval, Poly2, SeriesQ, SeriesSpace};
use crate::radius::{NatExp, NatExpRadius, RadiusOrder};
use crate::report::Report;
use crate::space::Ultrametric;

use super::AppError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OdeProblem {
    pub rhs: Poly2,
    pub y0: BigRational,
    pub cap: usize,
}

/// The integral operator of a problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PicardOp {
    rhs: Poly2,
    y0: BigRational,
}

impl PicardOp {
    pub fn new(rhs: Poly2, y0: BigRational) -> PicardOp {
        PicardOp { rhs, y0 }
    }
}

impl ContractingMap<SeriesSpace> for PicardOp {
    fn apply(&self, space: &SeriesSpace, y: &SeriesQ) -> SeriesQ {
        let f = poly_eval(space, &self.rhs, y).expect("the right-hand side shares the cap");
        space
            .constant(self.y0.clone())
            .add(&f.integrate())
            .expect("same cap")
    }

    fn describe(&self) -> String {
        format!("picard rhs={} y0={}", self.rhs, self.y0)
    }
}

#[derive(Debug, Clone)]
pub struct PicardOutcome {
    pub space: SeriesSpace,
    pub map: PicardOp,
    pub outcome: Outcome<SeriesQ, NatExpRadius>,
    /// The solved series, when the run produced one.
    pub solution: Option<SeriesQ>,
}

/// Iterate the integral operator from the constant initial value until the
/// series stabilizes through the cap.
pub fn picard_solve(prob: &OdeProblem, config: &DriverConfig) -> Result<PicardOutcome, AppError> {
    let space = SeriesSpace::new(prob.cap)?;
    let map = PicardOp::new(prob.rhs.clone(), prob.y0.clone());
    let start = space.constant(prob.y0.clone());
    let outcome = run(&space, &map, start, config)?;
    let solution = outcome.point().cloned();
    Ok(PicardOutcome { space, map, outcome, solution })
}

/// `y' - f(t, y)`: identically zero below the top order exactly when `y`
/// solves the problem through the cap. The top coefficient of `y'` is not
/// represented, so the final index carries no information.
pub fn residual(prob: &OdeProblem, y: &SeriesQ) -> Result<SeriesQ, AppError> {
    let space = SeriesSpace::new(prob.cap)?;
    let f = poly_eval(&space, &prob.rhs, y)?;
    Ok(y.derivative().sub(&f)?)
}

/// Evaluate the integral operator at the solved series through two
/// independently chosen polynomial approximants and compare with direct
/// evaluation. Any two extension results at resolution `gamma` must agree
/// strictly within `gamma`, and an approximant equal to the target itself
/// must reproduce the direct image exactly.
pub fn picard_as_extension_demo(
    prob: &OdeProblem,
    gamma: &NatExpRadius,
) -> Result<Report, AppError> {
    let g = match gamma {
        NatExpRadius::Exp(g) if (*g as usize) < prob.cap => *g as usize,
        _ => {
            return Err(AppError::BadProblem {
                detail: format!(
                    "resolution {gamma} is not realized below the cap {}",
                    prob.cap
                ),
            })
        }
    };
    let solved = picard_solve(prob, &DriverConfig::new(prob.cap + 2, 2))?;
    let target = solved.solution.ok_or_else(|| AppError::BadProblem {
        detail: "the solver did not stabilize within its budget".into(),
    })?;
    let space = solved.space;
    let map = solved.map;
    let direct = map.apply(&space, &target);

    // Two approximants agreeing with the target strictly past index g,
    // plus the identity approximant.
    let coarse = |_: &SeriesSpace, t: &SeriesQ, _: &NatExpRadius| t.keep_first(g + 1);
    let fine = |_: &SeriesSpace, t: &SeriesQ, _: &NatExpRadius| t.keep_first(g + 2);
    let exact = |_: &SeriesSpace, t: &SeriesQ, _: &NatExpRadius| t.clone();

    let r1 = extend_by_continuity(&space, &map, &coarse, &target, gamma)?;
    let r2 = extend_by_continuity(&space, &map, &fine, &target, gamma)?;
    let r0 = extend_by_continuity(&space, &map, &exact, &target, gamma)?;

    let mut report = Report::new();
    let d12 = space.distance(&r1, &r2);
    if !NatExp.lt(&d12, gamma) {
        report.push(
            "extension-agreement",
            format!("independent approximants disagree at distance {d12}, not within {gamma}"),
        );
    }
    for (label, r) in [("coarse", &r1), ("fine", &r2)] {
        let d = space.distance(r, &direct);
        if !NatExp.lt(&d, gamma) {
            report.push(
                "extension-direct",
                format!("{label} approximant result is at distance {d} from direct evaluation"),
            );
        }
    }
    if !NatExp.is_zero(&space.distance(&r0, &direct)) {
        report.push(
            "extension-identity",
            "an approximant equal to the target must reproduce the direct image exactly",
        );
    }
    Ok(report)
}
