//! The ultrametric space contract: points, distances valued in a radius
//! order, and balls.
//!
//! A space pins down a point type with equality, a distance function into a
//! [`RadiusOrder`], and finite samples of points and realized radii for
//! checks. The distance axioms are:
//!
//! * identity: `d(x, y) = zero` exactly when `x = y`;
//! * symmetry: `d(x, y) = d(y, x)`;
//! * the ultrametric transfer rule: whenever `d(x, y) <= g` and
//!   `d(y, z) <= g` then `d(x, z) <= g`, for every radius `g`.
//!
//! The transfer rule is stated through bounds rather than a maximum so it
//! survives partially ordered radius sets: a distance that compares
//! incomparably to a bound simply fails the `<=` test.

use std::fmt;

use crate::radius::RadiusOrder;
use crate::report::Report;

/// Shorthand for the radius value type of a space.
pub type RadiusOf<S> = <<S as Ultrametric>::Order as RadiusOrder>::Radius;

/// An ultrametric space at desk scale: exact distances into a radius order,
/// plus enough sampling structure to drive exhaustive and property checks.
///
/// Implementations are immutable and all methods are pure.
pub trait Ultrametric {
    type Point: Clone + PartialEq + fmt::Debug;
    type Order: RadiusOrder;

    fn order(&self) -> &Self::Order;

    fn distance(&self, x: &Self::Point, y: &Self::Point) -> RadiusOf<Self>;

    /// A finite, nonempty sample of points for axiom and property checks.
    /// Finite spaces return every point.
    fn sample_points(&self) -> Vec<Self::Point>;

    /// Nonzero radii that actually occur as distances in this model.
    /// Quantified checks ("for every radius") range over this sample.
    fn realized_radii(&self) -> Vec<RadiusOf<Self>>;

    /// One-line instance descriptor, including any precision or cap, e.g.
    /// `padic p=7 N=4`. Shown on traces so a truncated model is never
    /// mistaken for its completion.
    fn describe(&self) -> String;

    /// Wire form of a point, specific to the instance kind.
    fn encode_point(&self, x: &Self::Point) -> String;

    /// Parse the wire form produced by [`Ultrametric::encode_point`].
    fn decode_point(&self, s: &str) -> Result<Self::Point, String>;
}

/// A space that can propose, for a point `x` and nonzero radius `g`, some
/// point at distance exactly `g` from `x`. Solidity checks verify the
/// proposal with the space's own distance, so a wrong witness is reported
/// rather than trusted.
pub trait SolidWitness: Ultrametric {
    fn solidness_witness(
        &self,
        x: &Self::Point,
        gamma: &RadiusOf<Self>,
    ) -> Option<Self::Point>;
}

/// A ball: all points within `radius` of `center`. Membership is decided
/// solely by `distance(center, x) <= radius`; distinct (center, radius)
/// pairs can denote the same point-set.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball<P, R> {
    pub center: P,
    /// Nonzero by construction at every creation site in this crate.
    pub radius: R,
}

impl<P: fmt::Debug, R: fmt::Display> fmt::Display for Ball<P, R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "B({:?}; {})", self.center, self.radius)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpaceError {
    /// A principal ball needs two distinct points; equal points would give
    /// it radius zero.
    EqualPoints,
}

impl fmt::Display for SpaceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceError::EqualPoints => {
                write!(f, "principal ball of equal points would have zero radius")
            }
        }
    }
}

impl std::error::Error for SpaceError {}

/// True iff `x` lies in `b`: the distance from the center compares Lt or Eq
/// to the radius. An incomparable comparison is a plain "no".
pub fn ball_contains<S: Ultrametric>(
    space: &S,
    b: &Ball<S::Point, RadiusOf<S>>,
    x: &S::Point,
) -> bool {
    space.order().le(&space.distance(&b.center, x), &b.radius)
}

/// The ball centered at `x` with radius `d(x, y)`.
pub fn principal_ball<S: Ultrametric>(
    space: &S,
    x: &S::Point,
    y: &S::Point,
) -> Result<Ball<S::Point, RadiusOf<S>>, SpaceError> {
    if x == y {
        return Err(SpaceError::EqualPoints);
    }
    Ok(Ball { center: x.clone(), radius: space.distance(x, y) })
}

/// Check the distance axioms over the sampled points and the given radii.
/// Exhaustive when the samples are the whole space. Rules reported:
/// `distance-identity`, `symmetry`, `ultrametric-transfer`.
pub fn check_space_axioms<S: Ultrametric>(space: &S, radii: &[RadiusOf<S>]) -> Report {
    let mut report = Report::new();
    let order = space.order();
    let points = space.sample_points();

    let enc = |p: &S::Point| space.encode_point(p);

    for x in &points {
        if !order.is_zero(&space.distance(x, x)) {
            report.push("distance-identity", format!("d({0}, {0}) is not zero", enc(x)));
        }
    }
    for x in &points {
        for y in &points {
            let dxy = space.distance(x, y);
            if x != y && order.is_zero(&dxy) {
                report.push(
                    "distance-identity",
                    format!("distinct points {}, {} at distance zero", enc(x), enc(y)),
                );
            }
            let dyx = space.distance(y, x);
            if !order.eq(&dxy, &dyx) {
                report.push(
                    "symmetry",
                    format!(
                        "d({0}, {1}) = {dxy} but d({1}, {0}) = {dyx}",
                        enc(x),
                        enc(y)
                    ),
                );
            }
        }
    }
    for x in &points {
        for y in &points {
            let dxy = space.distance(x, y);
            for z in &points {
                let dyz = space.distance(y, z);
                let dxz = space.distance(x, z);
                for g in radii {
                    if order.le(&dxy, g) && order.le(&dyz, g) && !order.le(&dxz, g) {
                        report.push(
                            "ultrametric-transfer",
                            format!(
                                "d({0}, {1}) = {dxy} <= {g} and d({1}, {2}) = {dyz} <= {g}, \
                                 but d({0}, {2}) = {dxz} is not",
                                enc(x),
                                enc(y),
                                enc(z)
                            ),
                        );
                    }
                }
            }
        }
    }
    report
}

/// Check the two ball laws over the sampled universe.
///
/// * absorption: if `g <= h` and `B_g(x)` meets `B_h(y)` then
///   `B_g(x)` is contained in `B_h(y)` (rule `ball-absorption`);
/// * proper containment pushes back on the radius order: if `B_h(y)` is
///   properly contained in `B_g(x)` then `g <= h` fails
///   (rule `ball-proper-order`).
///
/// Containment here is containment of the sampled point-sets, which is the
/// honest reading on a finite space and a spot-check elsewhere.
pub fn check_ball_lemma<S: Ultrametric>(space: &S) -> Report {
    let mut report = Report::new();
    let order = space.order();
    let points = space.sample_points();
    let radii = space.realized_radii();

    let members = |center: &S::Point, radius: &RadiusOf<S>| -> Vec<bool> {
        let b = Ball { center: center.clone(), radius: radius.clone() };
        points.iter().map(|p| ball_contains(space, &b, p)).collect()
    };

    for x in &points {
        for g in &radii {
            let bg = members(x, g);
            for y in &points {
                for h in &radii {
                    let bh = members(y, h);
                    if order.le(g, h) {
                        let meets = bg.iter().zip(&bh).any(|(a, b)| *a && *b);
                        let contained = bg.iter().zip(&bh).all(|(a, b)| !*a || *b);
                        if meets && !contained {
                            report.push(
                                "ball-absorption",
                                format!(
                                    "B({}; {g}) meets B({}; {h}) with {g} <= {h} \
                                     but is not contained in it",
                                    space.encode_point(x),
                                    space.encode_point(y)
                                ),
                            );
                        }
                    }
                    let proper = bh.iter().zip(&bg).all(|(a, b)| !*a || *b)
                        && bg.iter().zip(&bh).any(|(a, b)| *a && !*b);
                    if proper && order.le(g, h) {
                        report.push(
                            "ball-proper-order",
                            format!(
                                "B({}; {h}) sits properly inside B({}; {g}) \
                                 yet {g} <= {h}",
                                space.encode_point(y),
                                space.encode_point(x)
                            ),
                        );
                    }
                }
            }
        }
    }
    report
}
