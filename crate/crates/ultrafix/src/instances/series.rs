//! Truncated power series over exact rationals: coefficients `c_0 ..
//! c_{cap-1}` of `sum c_k t^k`, with distance measured by the order of
//! vanishing of a difference.
//!
//! Two series agreeing through the cap are equal in the model: the space is
//! honestly a quotient, and descriptions say so. Coefficients are exact
//! rationals throughout — valuation-based distances do not survive float
//! rounding. Integration strictly raises the order of vanishing, which is
//! what makes operators built from it strictly contracting.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::radius::{NatExp, NatExpRadius};
use crate::space::{SolidWitness, Ultrametric};

use super::InstanceError;

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// The ambient space: series truncated at `t^cap`, `cap >= 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesSpace {
    cap: usize,
}

impl SeriesSpace {
    pub fn new(cap: usize) -> Result<Self, InstanceError> {
        if cap == 0 {
            return Err(InstanceError::BadParameter { detail: "cap must be at least 1".into() });
        }
        Ok(SeriesSpace { cap })
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn zero_series(&self) -> SeriesQ {
        SeriesQ { coeffs: vec![BigRational::zero(); self.cap] }
    }

    pub fn constant(&self, c: BigRational) -> SeriesQ {
        let mut s = self.zero_series();
        s.coeffs[0] = c;
        s
    }

    /// `c * t^k`; exponents at or past the cap truncate to zero.
    pub fn monomial(&self, k: usize, c: BigRational) -> SeriesQ {
        let mut s = self.zero_series();
        if k < self.cap {
            s.coeffs[k] = c;
        }
        s
    }

    /// Build from explicit coefficients; shorter inputs are padded with
    /// zeros, longer ones are a cap mismatch.
    pub fn from_coeffs(&self, coeffs: Vec<BigRational>) -> Result<SeriesQ, InstanceError> {
        if coeffs.len() > self.cap {
            return Err(InstanceError::CapMismatch { left: coeffs.len(), right: self.cap });
        }
        let mut c = coeffs;
        c.resize(self.cap, BigRational::zero());
        Ok(SeriesQ { coeffs: c })
    }
}

/// A truncated series: exactly `cap` exact-rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesQ {
    coeffs: Vec<BigRational>,
}

impl SeriesQ {
    pub fn cap(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, k: usize) -> &BigRational {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    fn same_cap(&self, other: &SeriesQ) -> Result<(), InstanceError> {
        if self.cap() != other.cap() {
            return Err(InstanceError::CapMismatch { left: self.cap(), right: other.cap() });
        }
        Ok(())
    }

    pub fn add(&self, other: &SeriesQ) -> Result<SeriesQ, InstanceError> {
        self.same_cap(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(SeriesQ { coeffs })
    }

    pub fn sub(&self, other: &SeriesQ) -> Result<SeriesQ, InstanceError> {
        self.same_cap(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(SeriesQ { coeffs })
    }

    pub fn scale(&self, c: &BigRational) -> SeriesQ {
        SeriesQ { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    /// Truncated product.
    pub fn mul(&self, other: &SeriesQ) -> Result<SeriesQ, InstanceError> {
        self.same_cap(other)?;
        let cap = self.cap();
        let mut coeffs = vec![BigRational::zero(); cap];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j >= cap {
                    break;
                }
                coeffs[i + j] += a * b;
            }
        }
        Ok(SeriesQ { coeffs })
    }

    /// Term-wise `c_k t^k -> c_k t^{k+1} / (k+1)`, truncated at the cap.
    /// Always raises the order of vanishing of a nonzero series.
    pub fn integrate(&self) -> SeriesQ {
        let cap = self.cap();
        let mut coeffs = vec![BigRational::zero(); cap];
        for k in 0..cap.saturating_sub(1) {
            coeffs[k + 1] = &self.coeffs[k] / q(k as i64 + 1);
        }
        SeriesQ { coeffs }
    }

    /// Term-wise derivative; the top coefficient of the result is not
    /// represented and reads as zero.
    pub fn derivative(&self) -> SeriesQ {
        let cap = self.cap();
        let mut coeffs = vec![BigRational::zero(); cap];
        for k in 0..cap.saturating_sub(1) {
            coeffs[k] = &self.coeffs[k + 1] * q(k as i64 + 1);
        }
        SeriesQ { coeffs }
    }

    /// Index of the first nonzero coefficient; `None` for the zero series.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Zero out every coefficient from index `k` on, keeping the cap.
    pub fn keep_first(&self, k: usize) -> SeriesQ {
        let mut coeffs = self.coeffs.clone();
        for c in coeffs.iter_mut().skip(k) {
            *c = BigRational::zero();
        }
        SeriesQ { coeffs }
    }
}

// ── Polynomials in (t, y) ───────────────────────────────────────────────────

/// A polynomial in the two indeterminates `t` and `y` with exact rational
/// coefficients, keyed by exponent pair. The right-hand sides of the
/// differential equations this crate solves live here.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Poly2 {
    terms: BTreeMap<(u32, u32), BigRational>,
}

impl Poly2 {
    pub fn zero() -> Poly2 {
        Poly2 { terms: BTreeMap::new() }
    }

    /// Builder: add `c * t^a * y^b` to the polynomial.
    pub fn term(mut self, t_exp: u32, y_exp: u32, c: BigRational) -> Poly2 {
        if !c.is_zero() {
            let entry = self.terms.entry((t_exp, y_exp)).or_insert_with(BigRational::zero);
            *entry += c;
            if entry.is_zero() {
                self.terms.remove(&(t_exp, y_exp));
            }
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &BigRational)> {
        self.terms.iter()
    }
}

impl fmt::Display for Poly2 {
    /// Canonical compact form without spaces, e.g. `1+t*y-1/2*y^2`. Terms
    /// appear in exponent order, `t` major.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((te, ye), c) in &self.terms {
            let mag = c.abs();
            if c.is_negative() {
                write!(f, "-")?;
            } else if !first {
                write!(f, "+")?;
            }
            first = false;
            let mut vars = String::new();
            match te {
                0 => {}
                1 => vars.push('t'),
                _ => vars.push_str(&format!("t^{te}")),
            }
            if *ye > 0 {
                if !vars.is_empty() {
                    vars.push('*');
                }
                match ye {
                    1 => vars.push('y'),
                    _ => vars.push_str(&format!("y^{ye}")),
                }
            }
            if vars.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{vars}")?;
            } else {
                write!(f, "{mag}*{vars}")?;
            }
        }
        Ok(())
    }
}

/// Evaluate `f(t, y)` at the indeterminate `t` and the given series `y`.
pub fn poly_eval(space: &SeriesSpace, f: &Poly2, y: &SeriesQ) -> Result<SeriesQ, InstanceError> {
    if y.cap() != space.cap() {
        return Err(InstanceError::CapMismatch { left: y.cap(), right: space.cap() });
    }
    let max_y_exp = f.terms.keys().map(|(_, b)| *b).max().unwrap_or(0);
    let mut powers: Vec<SeriesQ> = Vec::with_capacity(max_y_exp as usize + 1);
    powers.push(space.constant(BigRational::one()));
    for _ in 0..max_y_exp {
        let next = powers.last().expect("powers start with y^0").mul(y)?;
        powers.push(next);
    }
    let mut acc = space.zero_series();
    for ((te, ye), c) in &f.terms {
        let shifted = powers[*ye as usize]
            .mul(&space.monomial(*te as usize, BigRational::one()))?
            .scale(c);
        acc = acc.add(&shifted)?;
    }
    Ok(acc)
}

impl Ultrametric for SeriesSpace {
    type Point = SeriesQ;
    type Order = NatExp;

    fn order(&self) -> &NatExp {
        &NatExp
    }

    /// Panics on points of a different cap; the arithmetic layer reports
    /// cap mismatches as errors before they get here.
    fn distance(&self, x: &SeriesQ, y: &SeriesQ) -> NatExpRadius {
        assert_eq!(x.cap(), self.cap, "distance requires points of this space");
        assert_eq!(y.cap(), self.cap, "distance requires points of this space");
        for k in 0..self.cap {
            if x.coeffs[k] != y.coeffs[k] {
                return NatExpRadius::Exp(k as u64);
            }
        }
        NatExpRadius::Zero
    }

    fn sample_points(&self) -> Vec<SeriesQ> {
        let one = BigRational::one();
        let mut pts = vec![
            self.zero_series(),
            self.constant(one.clone()),
            self.constant(q(2)),
            self.monomial(1, one.clone()),
            self.constant(one.clone()).add(&self.monomial(1, one.clone())).expect("same cap"),
            self.monomial(1, q(1) / q(2)),
        ];
        pts.dedup();
        pts
    }

    fn realized_radii(&self) -> Vec<NatExpRadius> {
        (0..self.cap as u64).map(NatExpRadius::Exp).collect()
    }

    fn describe(&self) -> String {
        format!("series cap={} over Q (equality is agreement below t^{})", self.cap, self.cap)
    }

    fn encode_point(&self, x: &SeriesQ) -> String {
        x.coeffs
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    fn decode_point(&self, s: &str) -> Result<SeriesQ, String> {
        let coeffs: Vec<BigRational> = s
            .split(',')
            .map(|part| {
                part.trim()
                    .parse::<BigRational>()
                    .map_err(|e| format!("bad rational {part:?}: {e}"))
            })
            .collect::<Result<_, _>>()?;
        self.from_coeffs(coeffs).map_err(|e| e.to_string())
    }
}

impl SolidWitness for SeriesSpace {
    fn solidness_witness(&self, x: &SeriesQ, gamma: &NatExpRadius) -> Option<SeriesQ> {
        match gamma {
            NatExpRadius::Zero => None,
            NatExpRadius::Exp(k) if (*k as usize) < self.cap => {
                let bump = self.monomial(*k as usize, BigRational::one());
                x.add(&bump).ok()
            }
            NatExpRadius::Exp(_) => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::solidness_check;
    use crate::space::{check_ball_lemma, check_space_axioms};

    fn space(cap: usize) -> SeriesSpace {
        SeriesSpace::new(cap).unwrap()
    }

    fn series(space: &SeriesSpace, coeffs: &[i64]) -> SeriesQ {
        space
            .from_coeffs(coeffs.iter().map(|n| q(*n)).collect())
            .unwrap()
    }

    #[test]
    fn integration_follows_the_term_rule() {
        let s = space(4);
        let one_plus_t = series(&s, &[1, 1]);
        let integrated = one_plus_t.integrate();
        // 1 + t integrates to t + t^2/2.
        assert_eq!(integrated.coeff(0), &q(0));
        assert_eq!(integrated.coeff(1), &q(1));
        assert_eq!(integrated.coeff(2), &(q(1) / q(2)));
        assert_eq!(integrated.coeff(3), &q(0));
    }

    #[test]
    fn truncated_products_drop_high_terms() {
        let s = space(4);
        let a = series(&s, &[1, 1]);
        let b = series(&s, &[1, -1]);
        assert_eq!(a.mul(&b).unwrap(), series(&s, &[1, 0, -1, 0]));
    }

    #[test]
    fn polynomial_evaluation_expands_squares() {
        let s = space(3);
        let f = Poly2::zero().term(0, 2, q(1)); // y^2
        let y = series(&s, &[1, 1]);
        assert_eq!(poly_eval(&s, &f, &y).unwrap(), series(&s, &[1, 2, 1]));
    }

    #[test]
    fn integration_strictly_raises_order() {
        let s = space(6);
        for start in [series(&s, &[3]), series(&s, &[0, 0, 1]), series(&s, &[0, 5, 7])] {
            let before = start.order().expect("nonzero test data");
            match start.integrate().order() {
                Some(after) => assert_eq!(after, before + 1),
                None => assert!(before + 1 >= 6, "order may only vanish past the cap"),
            }
        }
    }

    #[test]
    fn derivative_undoes_integration_below_the_top() {
        let s = space(5);
        let x = series(&s, &[2, 3, 5, 7, 11]);
        let back = x.integrate().derivative();
        for k in 0..4 {
            assert_eq!(back.coeff(k), x.coeff(k), "coefficient {k}");
        }
        assert_eq!(back.coeff(4), &q(0), "the top coefficient falls off");
    }

    #[test]
    fn distance_is_the_first_disagreement() {
        let s = space(4);
        let a = series(&s, &[1, 1]);
        let b = series(&s, &[1, 0]);
        assert_eq!(s.distance(&a, &b), NatExpRadius::Exp(1));
        assert_eq!(s.distance(&a, &a), NatExpRadius::Zero);
    }

    #[test]
    fn caps_do_not_mix() {
        let a = series(&space(3), &[1]);
        let b = series(&space(4), &[1]);
        assert!(matches!(a.add(&b), Err(InstanceError::CapMismatch { .. })));
        assert!(space(3).from_coeffs(vec![q(1); 5]).is_err());
    }

    #[test]
    fn the_space_passes_its_axioms_and_is_solid() {
        let s = space(5);
        assert!(check_space_axioms(&s, &s.realized_radii()).is_clean());
        assert!(check_ball_lemma(&s).is_clean());
        assert!(solidness_check(&s, 1000).is_clean());
    }

    #[test]
    fn wire_form_round_trips() {
        let s = space(4);
        let x = s
            .from_coeffs(vec![q(1), q(1) / q(2), q(-3), q(0)])
            .unwrap();
        let enc = s.encode_point(&x);
        assert_eq!(enc, "1,1/2,-3,0");
        assert_eq!(s.decode_point(&enc).unwrap(), x);
    }

    #[test]
    fn polynomial_display_is_compact_and_ordered() {
        let f = Poly2::zero().term(0, 2, q(1));
        assert_eq!(f.to_string(), "y^2");
        let g = Poly2::zero().term(1, 0, q(2));
        assert_eq!(g.to_string(), "2*t");
        let h = Poly2::zero().term(0, 0, q(1)).term(0, 1, q(-1));
        assert_eq!(h.to_string(), "1-y");
        let k = Poly2::zero().term(2, 0, q(-1) / q(2)).term(0, 1, q(1));
        assert_eq!(k.to_string(), "y-1/2*t^2");
        assert_eq!(Poly2::zero().to_string(), "0");
        let cancel = Poly2::zero().term(0, 0, q(2)).term(0, 0, q(-2));
        assert!(cancel.is_zero());
    }

    #[test]
    fn keep_first_zeroes_the_tail() {
        let s = space(4);
        let x = series(&s, &[1, 2, 3, 4]);
        assert_eq!(x.keep_first(2), series(&s, &[1, 2, 0, 0]));
    }
}
