//! Series in two indeterminates measured by exponent pairs: the distance
//! between two elements is the least exponent pair (first coordinate major)
//! where they differ, valued in the [`LexPair`] order.
//!
//! This instance exists to exercise radius orders whose nonzero part is not
//! lined up along a single ladder of indices: a descent that only climbs
//! the second exponent never gets below any radius with a larger first
//! exponent, so "the step distances shrink" and "the step distances reach
//! below every radius" genuinely come apart here.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::Zero;

use crate::driver::ContractingMap;
use crate::radius::{LexPair, LexRadius};
use crate::space::Ultrametric;

use super::InstanceError;

/// The ambient space: supports live strictly below `(cap_m, cap_n)` in each
/// coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LexSeriesSpace {
    cap_m: u32,
    cap_n: u32,
}

impl LexSeriesSpace {
    pub fn new(cap_m: u32, cap_n: u32) -> Result<Self, InstanceError> {
        if cap_m == 0 || cap_n == 0 {
            return Err(InstanceError::BadParameter {
                detail: "both caps must be at least 1".into(),
            });
        }
        Ok(LexSeriesSpace { cap_m, cap_n })
    }

    pub fn cap_m(&self) -> u32 {
        self.cap_m
    }

    pub fn cap_n(&self) -> u32 {
        self.cap_n
    }

    pub fn zero_el(&self) -> LexSeriesQ {
        LexSeriesQ { cap_m: self.cap_m, cap_n: self.cap_n, terms: BTreeMap::new() }
    }

    /// `c * u^m v^n`; out-of-range exponents truncate to zero.
    pub fn monomial(&self, m: u32, n: u32, c: BigRational) -> LexSeriesQ {
        let mut el = self.zero_el();
        if m < self.cap_m && n < self.cap_n && !c.is_zero() {
            el.terms.insert((m, n), c);
        }
        el
    }

    pub fn from_terms(
        &self,
        terms: impl IntoIterator<Item = ((u32, u32), BigRational)>,
    ) -> Result<LexSeriesQ, InstanceError> {
        let mut el = self.zero_el();
        for ((m, n), c) in terms {
            if m >= self.cap_m || n >= self.cap_n {
                return Err(InstanceError::BadParameter {
                    detail: format!(
                        "exponent pair ({m}, {n}) is outside caps ({}, {})",
                        self.cap_m, self.cap_n
                    ),
                });
            }
            let entry = el.terms.entry((m, n)).or_insert_with(BigRational::zero);
            *entry += c;
            if entry.is_zero() {
                el.terms.remove(&(m, n));
            }
        }
        Ok(el)
    }
}

/// A finitely supported map from exponent pairs to nonzero rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexSeriesQ {
    cap_m: u32,
    cap_n: u32,
    terms: BTreeMap<(u32, u32), BigRational>,
}

impl LexSeriesQ {
    pub fn coeff(&self, m: u32, n: u32) -> BigRational {
        self.terms.get(&(m, n)).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &BigRational)> {
        self.terms.iter()
    }

    fn same_caps(&self, other: &LexSeriesQ) -> Result<(), InstanceError> {
        if self.cap_m != other.cap_m || self.cap_n != other.cap_n {
            return Err(InstanceError::MixedPrecision {
                left: format!("caps ({}, {})", self.cap_m, self.cap_n),
                right: format!("caps ({}, {})", other.cap_m, other.cap_n),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &LexSeriesQ) -> Result<LexSeriesQ, InstanceError> {
        self.same_caps(other)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            let entry = out.terms.entry(*k).or_insert_with(BigRational::zero);
            *entry += c;
            if entry.is_zero() {
                out.terms.remove(k);
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &LexSeriesQ) -> Result<LexSeriesQ, InstanceError> {
        self.add(&other.scale(&-BigRational::from_integer(1.into())))
    }

    pub fn scale(&self, c: &BigRational) -> LexSeriesQ {
        if c.is_zero() {
            return LexSeriesQ { cap_m: self.cap_m, cap_n: self.cap_n, terms: BTreeMap::new() };
        }
        LexSeriesQ {
            cap_m: self.cap_m,
            cap_n: self.cap_n,
            terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    /// Multiply by `u^dm v^dn`: every exponent pair moves up; terms pushed
    /// past a cap are truncated away.
    pub fn shift_by(&self, dm: u32, dn: u32) -> LexSeriesQ {
        let terms = self
            .terms
            .iter()
            .filter_map(|(&(m, n), c)| {
                let (m2, n2) = (m + dm, n + dn);
                (m2 < self.cap_m && n2 < self.cap_n).then(|| ((m2, n2), c.clone()))
            })
            .collect();
        LexSeriesQ { cap_m: self.cap_m, cap_n: self.cap_n, terms }
    }
}

impl Ultrametric for LexSeriesSpace {
    type Point = LexSeriesQ;
    type Order = LexPair;

    fn order(&self) -> &LexPair {
        &LexPair
    }

    fn distance(&self, x: &LexSeriesQ, y: &LexSeriesQ) -> LexRadius {
        let keys: BTreeSet<(u32, u32)> =
            x.terms.keys().chain(y.terms.keys()).copied().collect();
        for (m, n) in keys {
            if x.coeff(m, n) != y.coeff(m, n) {
                return LexRadius::Pair(m as u64, n as u64);
            }
        }
        LexRadius::Zero
    }

    fn sample_points(&self) -> Vec<LexSeriesQ> {
        let one = BigRational::from_integer(1.into());
        let mut pts = vec![
            self.zero_el(),
            self.monomial(0, 0, one.clone()),
            self.monomial(1, 0, one.clone()),
            self.monomial(0, 1, one.clone()),
        ];
        if let Ok(mixed) = self.monomial(0, 0, one.clone()).add(&self.monomial(1, 1, one)) {
            pts.push(mixed);
        }
        pts.dedup();
        pts
    }

    fn realized_radii(&self) -> Vec<LexRadius> {
        let mut out = Vec::new();
        for m in 0..self.cap_m as u64 {
            for n in 0..self.cap_n as u64 {
                out.push(LexRadius::Pair(m, n));
            }
        }
        out
    }

    fn describe(&self) -> String {
        format!(
            "lexseries cap-m={} cap-n={} (exponent pairs, first coordinate major)",
            self.cap_m, self.cap_n
        )
    }

    fn encode_point(&self, x: &LexSeriesQ) -> String {
        if x.terms.is_empty() {
            return "0".to_string();
        }
        x.terms
            .iter()
            .map(|((m, n), c)| format!("{m},{n}:{c}"))
            .collect::<Vec<_>>()
            .join(";")
    }

    fn decode_point(&self, s: &str) -> Result<LexSeriesQ, String> {
        if s == "0" {
            return Ok(self.zero_el());
        }
        let mut terms = Vec::new();
        for part in s.split(';') {
            let (exps, coeff) = part
                .split_once(':')
                .ok_or_else(|| format!("expected m,n:coeff, got {part:?}"))?;
            let (m, n) = exps
                .split_once(',')
                .ok_or_else(|| format!("expected two exponents, got {exps:?}"))?;
            let m: u32 = m.parse().map_err(|_| format!("bad exponent {m:?}"))?;
            let n: u32 = n.parse().map_err(|_| format!("bad exponent {n:?}"))?;
            let c: BigRational = coeff
                .parse()
                .map_err(|e| format!("bad rational {coeff:?}: {e}"))?;
            terms.push(((m, n), c));
        }
        self.from_terms(terms).map_err(|e| e.to_string())
    }
}

/// `x -> constant + scale * u^dm v^dn * x`: strictly contracting exactly
/// when the shift moves, because shifting pushes the first disagreement of
/// any pair strictly up the exponent order.
#[derive(Debug, Clone, PartialEq)]
pub struct LexAffineMap {
    constant: LexSeriesQ,
    shift: (u32, u32),
    scale: BigRational,
}

impl LexAffineMap {
    pub fn new(
        constant: LexSeriesQ,
        shift: (u32, u32),
        scale: BigRational,
    ) -> Result<Self, InstanceError> {
        if shift == (0, 0) && !scale.is_zero() {
            return Err(InstanceError::BadParameter {
                detail: "a shiftless affine map with nonzero scale preserves distances".into(),
            });
        }
        Ok(LexAffineMap { constant, shift, scale })
    }

    pub fn constant(&self) -> &LexSeriesQ {
        &self.constant
    }

    pub fn shift(&self) -> (u32, u32) {
        self.shift
    }

    pub fn scale(&self) -> &BigRational {
        &self.scale
    }
}

impl ContractingMap<LexSeriesSpace> for LexAffineMap {
    fn apply(&self, _space: &LexSeriesSpace, x: &LexSeriesQ) -> LexSeriesQ {
        let moved = x.shift_by(self.shift.0, self.shift.1).scale(&self.scale);
        self.constant
            .add(&moved)
            .expect("map constant and points share the space caps")
    }

    fn describe(&self) -> String {
        format!(
            "affine const={} shift={},{} scale={}",
            encode_terms(&self.constant),
            self.shift.0,
            self.shift.1,
            self.scale
        )
    }
}

fn encode_terms(x: &LexSeriesQ) -> String {
    if x.terms.is_empty() {
        return "0".to_string();
    }
    x.terms
        .iter()
        .map(|((m, n), c)| format!("{m},{n}:{c}"))
        .collect::<Vec<_>>()
        .join(";")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::sigma_coinitial;
    use crate::driver::{run, DriverConfig, Outcome};
    use crate::radius::RadiusOrder;
    use crate::space::{check_ball_lemma, check_space_axioms};

    fn one() -> BigRational {
        BigRational::from_integer(1.into())
    }

    #[test]
    fn distance_is_the_least_disagreeing_pair() {
        let s = LexSeriesSpace::new(4, 4).unwrap();
        let u = s.monomial(1, 0, one());
        let v = s.monomial(0, 1, one());
        assert_eq!(s.distance(&u, &s.zero_el()), LexRadius::Pair(1, 0));
        assert_eq!(s.distance(&v, &s.zero_el()), LexRadius::Pair(0, 1));
        assert_eq!(s.distance(&u, &u), LexRadius::Zero);
        // A larger first exponent is the smaller radius.
        assert!(LexPair.lt(&LexRadius::Pair(1, 0), &LexRadius::Pair(0, 1)));
    }

    #[test]
    fn the_space_passes_its_axioms_and_ball_laws() {
        let s = LexSeriesSpace::new(3, 3).unwrap();
        assert!(check_space_axioms(&s, &s.realized_radii()).is_clean());
        assert!(check_ball_lemma(&s).is_clean());
    }

    #[test]
    fn shifting_affine_maps_reach_their_fixed_point() {
        let s = LexSeriesSpace::new(4, 2).unwrap();
        // x -> 1 + u*x has fixed point 1 + u + u^2 + u^3 at these caps.
        let map = LexAffineMap::new(s.monomial(0, 0, one()), (1, 0), one()).unwrap();
        let out = run(&s, &map, s.zero_el(), &DriverConfig::new(8, 2)).unwrap();
        match out {
            Outcome::Reached { point, .. } => {
                let expected = s
                    .from_terms((0..4).map(|m| ((m, 0), one())))
                    .unwrap();
                assert_eq!(point, expected);
            }
            other => panic!("expected Reached, got {}", other.label()),
        }
    }

    #[test]
    fn climbing_the_minor_coordinate_never_reaches_finer_major_radii() {
        let s = LexSeriesSpace::new(3, 6).unwrap();
        // x -> 1 + v*x descends only in the second coordinate.
        let map = LexAffineMap::new(s.monomial(0, 0, one()), (0, 1), one()).unwrap();
        let out = run(&s, &map, s.zero_el(), &DriverConfig::new(8, 2)).unwrap();
        let trace = out.trace();
        // Its steps do pass below radii in the same major band...
        assert!(sigma_coinitial(&s, trace, &[LexRadius::Pair(0, 3)]));
        // ...but never below any radius with a larger first exponent.
        assert!(!sigma_coinitial(&s, trace, &[LexRadius::Pair(1, 0)]));
    }

    #[test]
    fn shiftless_scaling_maps_are_rejected() {
        let s = LexSeriesSpace::new(3, 3).unwrap();
        let err = LexAffineMap::new(s.zero_el(), (0, 0), one()).unwrap_err();
        assert!(matches!(err, InstanceError::BadParameter { .. }));
        // The constant map (zero scale) is fine.
        assert!(LexAffineMap::new(s.zero_el(), (0, 0), BigRational::zero()).is_ok());
    }

    #[test]
    fn wire_form_round_trips() {
        let s = LexSeriesSpace::new(4, 4).unwrap();
        let x = s
            .from_terms(vec![((0, 0), one()), ((2, 1), BigRational::new(1.into(), 2.into()))])
            .unwrap();
        let enc = s.encode_point(&x);
        assert_eq!(enc, "0,0:1;2,1:1/2");
        assert_eq!(s.decode_point(&enc).unwrap(), x);
        assert_eq!(s.encode_point(&s.zero_el()), "0");
    }

    #[test]
    fn caps_do_not_mix() {
        let a = LexSeriesSpace::new(3, 3).unwrap().zero_el();
        let b = LexSeriesSpace::new(3, 4).unwrap().zero_el();
        assert!(a.add(&b).is_err());
    }
}
