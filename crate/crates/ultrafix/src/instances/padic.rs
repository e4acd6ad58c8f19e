//! p-adic integers at fixed precision: residues mod `p^N` with the
//! valuation distance. A solid, complete instance — every radius the model
//! realizes is witnessed at every point.
//!
//! Equality in the model is congruence mod `p^N`; outputs carry the
//! precision so a truncated agreement is never mistaken for an exact one.

use crate::radius::{NatExp, NatExpRadius};
use crate::space::{SolidWitness, Ultrametric};

use super::InstanceError;

/// The ambient space: parameters `p` (prime) and `N >= 1`, with points
/// reduced mod `p^N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicSpace {
    p: u64,
    precision: u32,
    modulus: u64,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl PadicSpace {
    pub fn new(p: u64, precision: u32) -> Result<Self, InstanceError> {
        if !is_prime(p) {
            return Err(InstanceError::BadParameter { detail: format!("{p} is not prime") });
        }
        if precision == 0 {
            return Err(InstanceError::BadParameter {
                detail: "precision must be at least 1".into(),
            });
        }
        let modulus = p.checked_pow(precision).ok_or_else(|| InstanceError::BadParameter {
            detail: format!("{p}^{precision} overflows the residue type"),
        })?;
        // Products of residues are taken in 128 bits, so any u64 modulus
        // works.
        Ok(PadicSpace { p, precision, modulus })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Reduce an integer into the space.
    pub fn point(&self, value: i64) -> PadicInt {
        let m = self.modulus as i128;
        let residue = ((value as i128).rem_euclid(m)) as u64;
        PadicInt {
            p: self.p,
            precision: self.precision,
            modulus: self.modulus,
            residue,
        }
    }
}

/// A residue mod `p^N`, carrying its parameters so mismatched arithmetic is
/// an error rather than a wrong answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PadicInt {
    p: u64,
    precision: u32,
    modulus: u64,
    residue: u64,
}

impl PadicInt {
    pub fn residue(&self) -> u64 {
        self.residue
    }

    pub fn setting(&self) -> String {
        format!("p={} N={}", self.p, self.precision)
    }

    fn same_setting(&self, other: &PadicInt) -> Result<(), InstanceError> {
        if self.p != other.p || self.precision != other.precision {
            return Err(InstanceError::MixedPrecision {
                left: self.setting(),
                right: other.setting(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &PadicInt) -> Result<PadicInt, InstanceError> {
        self.same_setting(other)?;
        let r = ((self.residue as u128 + other.residue as u128) % self.modulus as u128) as u64;
        Ok(PadicInt { residue: r, ..*self })
    }

    pub fn sub(&self, other: &PadicInt) -> Result<PadicInt, InstanceError> {
        self.same_setting(other)?;
        let m = self.modulus as u128;
        let r = ((self.residue as u128 + m - other.residue as u128) % m) as u64;
        Ok(PadicInt { residue: r, ..*self })
    }

    pub fn mul(&self, other: &PadicInt) -> Result<PadicInt, InstanceError> {
        self.same_setting(other)?;
        let r = ((self.residue as u128 * other.residue as u128) % self.modulus as u128) as u64;
        Ok(PadicInt { residue: r, ..*self })
    }

    /// Multiplicative inverse, defined exactly for residues coprime to `p`.
    pub fn unit_inverse(&self) -> Result<PadicInt, InstanceError> {
        // Extended Euclid on (residue, modulus).
        let (mut r0, mut r1) = (self.residue as i128, self.modulus as i128);
        let (mut s0, mut s1) = (1i128, 0i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        if r0 != 1 {
            return Err(InstanceError::NonUnit {
                residue: self.residue.to_string(),
                modulus: self.modulus.to_string(),
            });
        }
        let m = self.modulus as i128;
        Ok(PadicInt { residue: s0.rem_euclid(m) as u64, ..*self })
    }

    /// The number of factors of `p` in the residue; `None` for zero, which
    /// has them all at this precision.
    pub fn valuation(&self) -> Option<u32> {
        if self.residue == 0 {
            return None;
        }
        let mut v = 0;
        let mut r = self.residue;
        while r % self.p == 0 {
            r /= self.p;
            v += 1;
        }
        Some(v)
    }
}

impl Ultrametric for PadicSpace {
    type Point = PadicInt;
    type Order = NatExp;

    fn order(&self) -> &NatExp {
        &NatExp
    }

    /// Panics on points from a different `(p, N)` setting: points of this
    /// space are produced by it, and the arithmetic layer reports mixups as
    /// errors before they get here.
    fn distance(&self, x: &PadicInt, y: &PadicInt) -> NatExpRadius {
        let diff = x.sub(y).expect("distance requires points of one setting");
        match diff.valuation() {
            None => NatExpRadius::Zero,
            Some(v) => NatExpRadius::Exp(v as u64),
        }
    }

    fn sample_points(&self) -> Vec<PadicInt> {
        (0..self.modulus.min(20)).map(|r| self.point(r as i64)).collect()
    }

    fn realized_radii(&self) -> Vec<NatExpRadius> {
        (0..self.precision as u64).map(NatExpRadius::Exp).collect()
    }

    fn describe(&self) -> String {
        format!("padic p={} N={} (residues mod p^N)", self.p, self.precision)
    }

    fn encode_point(&self, x: &PadicInt) -> String {
        x.residue.to_string()
    }

    fn decode_point(&self, s: &str) -> Result<PadicInt, String> {
        let v: i64 = s.parse().map_err(|e| format!("bad residue {s:?}: {e}"))?;
        Ok(self.point(v))
    }
}

impl SolidWitness for PadicSpace {
    fn solidness_witness(&self, x: &PadicInt, gamma: &NatExpRadius) -> Option<PadicInt> {
        match gamma {
            NatExpRadius::Zero => None,
            NatExpRadius::Exp(k) if *k < self.precision as u64 => {
                let step = self.p.pow(*k as u32);
                x.add(&self.point(step as i64)).ok()
            }
            NatExpRadius::Exp(_) => None,
        }
    }
}
