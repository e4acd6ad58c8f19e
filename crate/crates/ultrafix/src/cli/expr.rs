//! Small hand-rolled parsers for the polynomial expressions accepted on
//! the command line: integer polynomials in `x` and rational polynomials
//! in `t` and `y`. Flat sums of monomial terms, no parentheses; `*` between
//! factors is optional; whitespace is ignored.

use num_rational::BigRational;

use crate::apps::IntPoly;
use crate::instances::Poly2;

/// Parse an exact rational: `3`, `-1/2`, `5/10` (reduced on the way in).
pub fn parse_rational(s: &str) -> Result<BigRational, String> {
    let t = s.trim();
    if t.is_empty() {
        return Err("empty rational".into());
    }
    t.parse::<BigRational>()
        .map_err(|e| format!("bad rational {t:?}: {e}"))
}

/// Split a sum into signed terms at top-level `+`/`-`.
fn signed_terms(s: &str) -> Result<Vec<(i64, String)>, String> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err("empty expression".into());
    }
    let (mut sign, rest) = match compact.strip_prefix('-') {
        Some(r) => (-1i64, r),
        None => (1i64, compact.strip_prefix('+').unwrap_or(&compact)),
    };
    let mut terms = Vec::new();
    let mut cur = String::new();
    for ch in rest.chars() {
        match ch {
            '+' | '-' => {
                if cur.is_empty() {
                    return Err(format!("dangling sign before {ch:?}"));
                }
                terms.push((sign, std::mem::take(&mut cur)));
                sign = if ch == '-' { -1 } else { 1 };
            }
            _ => cur.push(ch),
        }
    }
    if cur.is_empty() {
        return Err("trailing sign".into());
    }
    terms.push((sign, cur));
    Ok(terms)
}

fn parse_exponent(chars: &mut std::iter::Peekable<std::str::Chars>) -> Result<u32, String> {
    if chars.peek() != Some(&'^') {
        return Ok(1);
    }
    chars.next();
    let mut digits = String::new();
    while let Some(c) = chars.peek() {
        if c.is_ascii_digit() {
            digits.push(*c);
            chars.next();
        } else {
            break;
        }
    }
    if digits.is_empty() {
        return Err("'^' must be followed by digits".into());
    }
    digits.parse().map_err(|_| format!("exponent {digits:?} out of range"))
}

/// Parse an integer polynomial in `x`: `x^2-2`, `3*x`, `-x+5`.
pub fn parse_int_poly(s: &str) -> Result<IntPoly, String> {
    let mut coeffs: Vec<i64> = Vec::new();
    for (sign, body) in signed_terms(s)? {
        let mut chars = body.chars().peekable();
        let mut digits = String::new();
        while let Some(c) = chars.peek() {
            if c.is_ascii_digit() {
                digits.push(*c);
                chars.next();
            } else {
                break;
            }
        }
        if chars.peek() == Some(&'*') {
            chars.next();
        }
        let (coeff, exp) = match chars.peek() {
            Some('x') => {
                chars.next();
                let exp = parse_exponent(&mut chars)?;
                let c = if digits.is_empty() {
                    1
                } else {
                    digits.parse::<i64>().map_err(|_| format!("coefficient {digits:?} out of range"))?
                };
                (c, exp)
            }
            None if !digits.is_empty() => {
                let c: i64 = digits.parse().map_err(|_| format!("constant {digits:?} out of range"))?;
                (c, 0)
            }
            _ => return Err(format!("cannot read term {body:?}")),
        };
        if chars.next().is_some() {
            return Err(format!("trailing input in term {body:?}"));
        }
        let idx = exp as usize;
        if coeffs.len() <= idx {
            coeffs.resize(idx + 1, 0);
        }
        coeffs[idx] += sign * coeff;
    }
    Ok(IntPoly::new(coeffs))
}

/// Parse a rational polynomial in `t` and `y`: `y`, `2*t`, `y^2`,
/// `1/2*t*y^2-1`.
pub fn parse_poly2(s: &str) -> Result<Poly2, String> {
    let mut poly = Poly2::zero();
    for (sign, body) in signed_terms(s)? {
        let mut chars = body.chars().peekable();
        let mut coeff = BigRational::from_integer(sign.into());
        let mut t_exp = 0u32;
        let mut y_exp = 0u32;
        let mut any = false;
        loop {
            match chars.peek().copied() {
                None => break,
                Some('*') => {
                    if !any {
                        return Err(format!("term {body:?} starts with '*'"));
                    }
                    chars.next();
                    if chars.peek().is_none() {
                        return Err(format!("term {body:?} ends with '*'"));
                    }
                }
                Some('t') => {
                    chars.next();
                    t_exp = t_exp
                        .checked_add(parse_exponent(&mut chars)?)
                        .ok_or("exponent overflow")?;
                    any = true;
                }
                Some('y') => {
                    chars.next();
                    y_exp = y_exp
                        .checked_add(parse_exponent(&mut chars)?)
                        .ok_or("exponent overflow")?;
                    any = true;
                }
                Some(c) if c.is_ascii_digit() => {
                    let mut digits = String::new();
                    while let Some(c) = chars.peek() {
                        if c.is_ascii_digit() {
                            digits.push(*c);
                            chars.next();
                        } else {
                            break;
                        }
                    }
                    if chars.peek() == Some(&'/') {
                        chars.next();
                        digits.push('/');
                        let before = digits.len();
                        while let Some(c) = chars.peek() {
                            if c.is_ascii_digit() {
                                digits.push(*c);
                                chars.next();
                            } else {
                                break;
                            }
                        }
                        if digits.len() == before {
                            return Err(format!("term {body:?}: '/' must be followed by digits"));
                        }
                    }
                    coeff *= parse_rational(&digits)?;
                    any = true;
                }
                Some(other) => {
                    return Err(format!("unexpected {other:?} in term {body:?}"));
                }
            }
        }
        if !any {
            return Err(format!("empty term {body:?}"));
        }
        poly = poly.term(t_exp, y_exp, coeff);
    }
    Ok(poly)
}
