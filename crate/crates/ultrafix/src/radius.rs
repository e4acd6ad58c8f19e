//! Radius orders: the ordered value sets that distances take values in.
//!
//! A radius order is a partially ordered set with a least element, written
//! `zero` throughout. Distances of a space land in such an order rather than
//! in the reals, so comparing two radii is a four-way affair: less, greater,
//! equal, or incomparable. Incomparability is an ordinary answer, not an
//! error, and every consumer in this crate treats "incomparable" as "not
//! below" wherever a bound is being tested.
//!
//! Three encodings are provided:
//!
//! * [`NatExp`]: natural-number exponents `k` read as the radius `2^-k`, so a
//!   larger exponent means a smaller radius. Total. The zero radius is the
//!   `inf` exponent. This is the order of valuation-style distances.
//! * [`FinitePoset`]: an explicit finite table of elements with a declared
//!   order relation; pairs left unrelated stay incomparable.
//! * [`LexPair`]: pairs `(m, n)` of naturals compared lexicographically and
//!   then reversed, so climbing the second coordinate alone never passes
//!   below any radius with a larger first coordinate. Total.

use std::fmt;
use std::sync::Arc;

use crate::report::Report;

/// Outcome of comparing two radii in a possibly partial order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cmp {
    Lt,
    Gt,
    Eq,
    Incomparable,
}

impl Cmp {
    /// The comparison seen from the other side: `compare(b, a)`.
    pub fn flip(self) -> Cmp {
        match self {
            Cmp::Lt => Cmp::Gt,
            Cmp::Gt => Cmp::Lt,
            other => other,
        }
    }
}

impl fmt::Display for Cmp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Cmp::Lt => "<",
            Cmp::Gt => ">",
            Cmp::Eq => "=",
            Cmp::Incomparable => "||",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RadiusError {
    /// Two radius values come from different orders and cannot be compared.
    MixedOrders { left: String, right: String },
    /// A poset declaration is not a valid radius order.
    InvalidOrder(String),
}

impl fmt::Display for RadiusError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RadiusError::MixedOrders { left, right } => {
                write!(f, "radius values from different orders: {left} vs {right}")
            }
            RadiusError::InvalidOrder(msg) => write!(f, "invalid radius order: {msg}"),
        }
    }
}

impl std::error::Error for RadiusError {}

/// A partially ordered radius set with least element.
///
/// `compare` is total as a function: any two values of the order produce one
/// of the four [`Cmp`] answers. The helpers `le` and `lt` read
/// "incomparable" as "no".
pub trait RadiusOrder {
    type Radius: Clone + PartialEq + fmt::Debug + fmt::Display;

    fn compare(&self, a: &Self::Radius, b: &Self::Radius) -> Cmp;

    /// The least element; the only radius a distance maps equal points to.
    fn zero(&self) -> Self::Radius;

    /// A finite sample of nonzero radii, used by axiom checks and property
    /// tests. Finite orders return everything nonzero.
    fn sample(&self) -> Vec<Self::Radius>;

    /// Parse the wire form of a radius value, e.g. `natexp:3`.
    fn decode(&self, s: &str) -> Result<Self::Radius, String>;

    fn le(&self, a: &Self::Radius, b: &Self::Radius) -> bool {
        matches!(self.compare(a, b), Cmp::Lt | Cmp::Eq)
    }

    fn lt(&self, a: &Self::Radius, b: &Self::Radius) -> bool {
        matches!(self.compare(a, b), Cmp::Lt)
    }

    fn eq(&self, a: &Self::Radius, b: &Self::Radius) -> bool {
        matches!(self.compare(a, b), Cmp::Eq)
    }

    fn is_zero(&self, a: &Self::Radius) -> bool {
        self.eq(a, &self.zero())
    }
}

// ── NatExp: naturals as exponents, zero = inf ───────────────────────────────

/// Radius `2^-k` for a natural `k`, with `Zero` playing the infinite
/// exponent. Total order: a larger exponent is a smaller radius.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NatExpRadius {
    Exp(u64),
    Zero,
}

impl fmt::Display for NatExpRadius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NatExpRadius::Exp(k) => write!(f, "natexp:{k}"),
            NatExpRadius::Zero => write!(f, "natexp:inf"),
        }
    }
}

/// The order of [`NatExpRadius`] values.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct NatExp;

impl RadiusOrder for NatExp {
    type Radius = NatExpRadius;

    fn compare(&self, a: &NatExpRadius, b: &NatExpRadius) -> Cmp {
        use NatExpRadius::*;
        match (a, b) {
            (Zero, Zero) => Cmp::Eq,
            (Zero, _) => Cmp::Lt,
            (_, Zero) => Cmp::Gt,
            // Larger exponent, smaller radius.
            (Exp(j), Exp(k)) => match j.cmp(k) {
                std::cmp::Ordering::Less => Cmp::Gt,
                std::cmp::Ordering::Equal => Cmp::Eq,
                std::cmp::Ordering::Greater => Cmp::Lt,
            },
        }
    }

    fn zero(&self) -> NatExpRadius {
        NatExpRadius::Zero
    }

    fn sample(&self) -> Vec<NatExpRadius> {
        (0..=8).map(NatExpRadius::Exp).collect()
    }

    fn decode(&self, s: &str) -> Result<NatExpRadius, String> {
        let body = s
            .strip_prefix("natexp:")
            .ok_or_else(|| format!("expected natexp:<k> or natexp:inf, got {s:?}"))?;
        if body == "inf" {
            return Ok(NatExpRadius::Zero);
        }
        body.parse::<u64>()
            .map(NatExpRadius::Exp)
            .map_err(|_| format!("bad natexp exponent {body:?}"))
    }
}

// ── FinitePoset: explicit order table ───────────────────────────────────────

#[derive(Debug, PartialEq, Eq)]
struct PosetInner {
    name: String,
    elems: Vec<String>,
    /// Row-major `le[i * n + j]` holds when element i is below-or-equal j.
    le: Vec<bool>,
    zero: usize,
}

/// A finite radius order given by an explicit table. Cheap to clone; radius
/// values keep a handle to their order so cross-order mixups are detectable.
#[derive(Debug, Clone)]
pub struct FinitePoset {
    inner: Arc<PosetInner>,
}

impl PartialEq for FinitePoset {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner == other.inner
    }
}

impl Eq for FinitePoset {}

/// One element of a [`FinitePoset`], tagged with its order.
#[derive(Debug, Clone)]
pub struct PosetRadius {
    order: FinitePoset,
    idx: usize,
}

impl PosetRadius {
    pub fn name(&self) -> &str {
        &self.order.inner.elems[self.idx]
    }
}

impl PartialEq for PosetRadius {
    fn eq(&self, other: &Self) -> bool {
        self.idx == other.idx && self.order == other.order
    }
}

impl Eq for PosetRadius {}

impl fmt::Display for PosetRadius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "poset:{}", self.name())
    }
}

impl FinitePoset {
    /// Build an order from element names and strict generating pairs
    /// `(below, above)`. The reflexive-transitive closure is taken; the
    /// result must be antisymmetric and have a unique least element.
    pub fn new(
        name: &str,
        elems: &[&str],
        below_pairs: &[(&str, &str)],
    ) -> Result<Self, RadiusError> {
        let n = elems.len();
        if n == 0 {
            return Err(RadiusError::InvalidOrder("no elements".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for e in elems {
            if !seen.insert(*e) {
                return Err(RadiusError::InvalidOrder(format!("duplicate element {e:?}")));
            }
        }
        let index = |e: &str| -> Result<usize, RadiusError> {
            elems
                .iter()
                .position(|x| *x == e)
                .ok_or_else(|| RadiusError::InvalidOrder(format!("unknown element {e:?}")))
        };
        let mut le = vec![false; n * n];
        for i in 0..n {
            le[i * n + i] = true;
        }
        for (lo, hi) in below_pairs {
            le[index(lo)? * n + index(hi)?] = true;
        }
        // Transitive closure.
        for k in 0..n {
            for i in 0..n {
                if le[i * n + k] {
                    for j in 0..n {
                        if le[k * n + j] {
                            le[i * n + j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && le[i * n + j] && le[j * n + i] {
                    return Err(RadiusError::InvalidOrder(format!(
                        "cycle through {:?} and {:?}",
                        elems[i], elems[j]
                    )));
                }
            }
        }
        let mut least = None;
        for i in 0..n {
            if (0..n).all(|j| le[i * n + j]) {
                least = Some(i);
                break;
            }
        }
        let zero = least.ok_or_else(|| {
            RadiusError::InvalidOrder("no least element to serve as the zero radius".into())
        })?;
        Ok(FinitePoset {
            inner: Arc::new(PosetInner {
                name: name.to_string(),
                elems: elems.iter().map(|s| s.to_string()).collect(),
                le,
                zero,
            }),
        })
    }

    /// The chain `0 < 1 < ... < n-1` with elements named by their position.
    pub fn chain(name: &str, n: usize) -> Self {
        assert!(n >= 1, "a chain needs at least its zero element");
        let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let pairs: Vec<(&str, &str)> = (0..n - 1).map(|i| (refs[i], refs[i + 1])).collect();
        FinitePoset::new(name, &refs, &pairs).expect("a chain is always a valid order")
    }

    /// Four elements with exactly one incomparable pair:
    /// `0 < left < top`, `0 < right < top`, `left || right`.
    pub fn diamond(name: &str) -> Self {
        FinitePoset::new(
            name,
            &["0", "left", "right", "top"],
            &[("0", "left"), ("0", "right"), ("left", "top"), ("right", "top")],
        )
        .expect("the diamond is a valid order")
    }

    pub fn name(&self) -> &str {
        &self.inner.name
    }

    pub fn len(&self) -> usize {
        self.inner.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.elems.is_empty()
    }

    pub fn element_names(&self) -> impl Iterator<Item = &str> {
        self.inner.elems.iter().map(|s| s.as_str())
    }

    /// The element called `name`, if declared.
    pub fn element(&self, name: &str) -> Option<PosetRadius> {
        let idx = self.inner.elems.iter().position(|e| e == name)?;
        Some(PosetRadius { order: self.clone(), idx })
    }

    pub fn element_at(&self, idx: usize) -> PosetRadius {
        assert!(idx < self.len(), "poset element index out of range");
        PosetRadius { order: self.clone(), idx }
    }

    fn owns(&self, a: &PosetRadius) -> bool {
        a.order == *self
    }

    /// Comparison that reports cross-order mixups instead of panicking.
    pub fn try_compare(&self, a: &PosetRadius, b: &PosetRadius) -> Result<Cmp, RadiusError> {
        if !self.owns(a) || !self.owns(b) {
            return Err(RadiusError::MixedOrders {
                left: format!("{} of order {:?}", a, a.order.name()),
                right: format!("{} of order {:?}", b, b.order.name()),
            });
        }
        let n = self.len();
        let le = &self.inner.le;
        let (i, j) = (a.idx, b.idx);
        Ok(match (le[i * n + j], le[j * n + i]) {
            (true, true) => Cmp::Eq,
            (true, false) => Cmp::Lt,
            (false, true) => Cmp::Gt,
            (false, false) => Cmp::Incomparable,
        })
    }
}

impl RadiusOrder for FinitePoset {
    type Radius = PosetRadius;

    /// Panics if either value belongs to a different order; use
    /// [`FinitePoset::try_compare`] at trust boundaries.
    fn compare(&self, a: &PosetRadius, b: &PosetRadius) -> Cmp {
        self.try_compare(a, b).expect("radius values from a different order")
    }

    fn zero(&self) -> PosetRadius {
        PosetRadius { order: self.clone(), idx: self.inner.zero }
    }

    fn sample(&self) -> Vec<PosetRadius> {
        (0..self.len())
            .filter(|&i| i != self.inner.zero)
            .map(|i| PosetRadius { order: self.clone(), idx: i })
            .collect()
    }

    fn decode(&self, s: &str) -> Result<PosetRadius, String> {
        let body = s
            .strip_prefix("poset:")
            .ok_or_else(|| format!("expected poset:<element>, got {s:?}"))?;
        self.element(body)
            .ok_or_else(|| format!("order {:?} has no element {body:?}", self.name()))
    }
}

// ── LexPair: reversed lexicographic pairs ───────────────────────────────────

/// Radius indexed by a pair `(m, n)`; `Zero` is the least element. Pairs
/// compare lexicographically with the first coordinate major, reversed so
/// that a lexicographically larger pair is a smaller radius. Consequently a
/// descent that only climbs `n` stays above every radius with a larger `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LexRadius {
    Pair(u64, u64),
    Zero,
}

impl fmt::Display for LexRadius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LexRadius::Pair(m, n) => write!(f, "lexpair:{m},{n}"),
            LexRadius::Zero => write!(f, "lexpair:inf"),
        }
    }
}

/// The order of [`LexRadius`] values.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LexPair;

impl RadiusOrder for LexPair {
    type Radius = LexRadius;

    fn compare(&self, a: &LexRadius, b: &LexRadius) -> Cmp {
        use LexRadius::*;
        match (a, b) {
            (Zero, Zero) => Cmp::Eq,
            (Zero, _) => Cmp::Lt,
            (_, Zero) => Cmp::Gt,
            (Pair(m1, n1), Pair(m2, n2)) => match (m1, n1).cmp(&(m2, n2)) {
                std::cmp::Ordering::Less => Cmp::Gt,
                std::cmp::Ordering::Equal => Cmp::Eq,
                std::cmp::Ordering::Greater => Cmp::Lt,
            },
        }
    }

    fn zero(&self) -> LexRadius {
        LexRadius::Zero
    }

    fn sample(&self) -> Vec<LexRadius> {
        let mut out = Vec::new();
        for m in 0..4u64 {
            for n in 0..4u64 {
                out.push(LexRadius::Pair(m, n));
            }
        }
        out
    }

    fn decode(&self, s: &str) -> Result<LexRadius, String> {
        let body = s
            .strip_prefix("lexpair:")
            .ok_or_else(|| format!("expected lexpair:<m>,<n> or lexpair:inf, got {s:?}"))?;
        if body == "inf" {
            return Ok(LexRadius::Zero);
        }
        let (m, n) = body
            .split_once(',')
            .ok_or_else(|| format!("expected two comma-separated exponents, got {body:?}"))?;
        let m = m.parse::<u64>().map_err(|_| format!("bad exponent {m:?}"))?;
        let n = n.parse::<u64>().map_err(|_| format!("bad exponent {n:?}"))?;
        Ok(LexRadius::Pair(m, n))
    }
}

// ── Axiom checking ──────────────────────────────────────────────────────────

/// Check that an order behaves like a partial order with least element over
/// its own sample: reflexivity, consistency of the two viewing directions,
/// antisymmetry, transitivity, and the zero element sitting below everything.
pub fn check_order_axioms<O: RadiusOrder>(order: &O) -> Report {
    let mut report = Report::new();
    let mut values = vec![order.zero()];
    values.extend(order.sample());

    for a in &values {
        if !matches!(order.compare(a, a), Cmp::Eq) {
            report.push("reflexivity", format!("compare({a}, {a}) is not Eq"));
        }
    }
    for a in &values {
        for b in &values {
            let ab = order.compare(a, b);
            let ba = order.compare(b, a);
            if ba != ab.flip() {
                report.push(
                    "direction-consistency",
                    format!("compare({a}, {b}) = {ab} but compare({b}, {a}) = {ba}"),
                );
            }
            if ab == Cmp::Eq && ba == Cmp::Eq && a != b {
                report.push(
                    "antisymmetry",
                    format!("{a} and {b} compare equal but are distinct values"),
                );
            }
        }
    }
    for a in &values {
        for b in &values {
            if !order.le(a, b) {
                continue;
            }
            for c in &values {
                if order.le(b, c) && !order.le(a, c) {
                    report.push(
                        "transitivity",
                        format!("{a} <= {b} and {b} <= {c} but not {a} <= {c}"),
                    );
                }
            }
        }
    }
    let zero = order.zero();
    for a in &values {
        if !order.le(&zero, a) {
            report.push("zero-least", format!("zero {zero} is not below {a}"));
        }
    }
    report
}
