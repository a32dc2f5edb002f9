//! Real coefficients carried in extended precision so that small divisors
//! `|xi_1 + alpha xi_2|` are formed exactly and rounded only once.

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bits kept for irrational square roots.
pub const PRECISION_BITS: u32 = 256;
pub const DEFAULT_LIOUVILLE_TERMS: u32 = 5;
const MAX_LIOUVILLE_TERMS: u32 = 8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoefficientKind {
    Rational { p: String, q: String },
    /// `(a + b sqrt(n)) / c`.
    QuadraticIrrational { a: i64, b: i64, n: u64, c: i64 },
    /// `sum_{j=1}^{terms} 10^(-j!)`.
    Liouville { terms: u32 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiophantineCoefficient {
    kind: CoefficientKind,
    value: BigRational,
}

impl DiophantineCoefficient {
    pub fn rational(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Result<Self> {
        let (p, q) = (p.into(), q.into());
        if q.is_zero() {
            return Err(Error::Coefficient {
                input: format!("{p}/{q}"),
                reason: "zero denominator".into(),
            });
        }
        let value = BigRational::new(p, q);
        Ok(Self {
            kind: CoefficientKind::Rational {
                p: value.numer().to_string(),
                q: value.denom().to_string(),
            },
            value,
        })
    }

    pub fn integer(n: i64) -> Self {
        Self::rational(n, 1).expect("nonzero denominator")
    }

    pub fn quadratic(a: i64, b: i64, n: u64, c: i64) -> Result<Self> {
        if c == 0 {
            return Err(Error::Coefficient {
                input: format!("({a}+{b}*sqrt({n}))/{c}"),
                reason: "zero denominator".into(),
            });
        }
        let root = sqrt_rational(n);
        let value = (BigRational::from_integer(a.into()) + BigRational::from_integer(b.into()) * root)
            / BigRational::from_integer(c.into());
        Ok(Self {
            kind: CoefficientKind::QuadraticIrrational { a, b, n, c },
            value,
        })
    }

    /// `(1 + sqrt 5) / 2`.
    pub fn golden() -> Self {
        Self::quadratic(1, 1, 5, 2).expect("valid")
    }

    pub fn liouville(terms: u32) -> Result<Self> {
        if terms == 0 || terms > MAX_LIOUVILLE_TERMS {
            return Err(Error::Coefficient {
                input: format!("liouville:{terms}"),
                reason: format!("terms must lie in 1..={MAX_LIOUVILLE_TERMS}"),
            });
        }
        let mut value = BigRational::zero();
        let mut fact: u32 = 1;
        for j in 1..=terms {
            fact *= j;
            let den = num_traits::pow(BigInt::from(10u8), fact as usize);
            value += BigRational::new(BigInt::one(), den);
        }
        Ok(Self {
            kind: CoefficientKind::Liouville { terms },
            value,
        })
    }

    pub fn kind(&self) -> &CoefficientKind {
        &self.kind
    }

    pub fn value(&self) -> &BigRational {
        &self.value
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64().unwrap_or(f64::NAN)
    }

    /// Parses `golden`, `liouville[:N]`, integers, fractions `p/q`, decimals
    /// (`0.125`, `-1.5e-3`) and quadratic surds such as `sqrt(2)` or
    /// `(1+sqrt(5))/2`, `3-2*sqrt(7)`.
    pub fn parse(input: &str) -> Result<Self> {
        let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        let err = |reason: &str| Error::Coefficient {
            input: input.to_string(),
            reason: reason.to_string(),
        };
        if s.is_empty() {
            return Err(err("empty"));
        }
        match s.as_str() {
            "golden" | "phi" => return Ok(Self::golden()),
            "liouville" => return Self::liouville(DEFAULT_LIOUVILLE_TERMS),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("liouville:") {
            let terms: u32 = rest.parse().map_err(|_| err("bad term count"))?;
            return Self::liouville(terms);
        }
        if s.contains("sqrt") {
            let (a, b, n, c) = parse_surd(&s).ok_or_else(|| err("malformed square-root expression"))?;
            return Self::quadratic(a, b, n, c);
        }
        if let Some((p, q)) = s.split_once('/') {
            let p: BigInt = parse_int(p).ok_or_else(|| err("bad numerator"))?;
            let q: BigInt = parse_int(q).ok_or_else(|| err("bad denominator"))?;
            return Self::rational(p, q).map_err(|_| err("zero denominator"));
        }
        let value = parse_decimal(&s).ok_or_else(|| err("not a number"))?;
        Self::rational(value.numer().clone(), value.denom().clone())
    }
}

fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.len() > 4096 {
        return None;
    }
    s.parse().ok()
}

fn parse_small(s: &str) -> Option<i64> {
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Exact rational value of a decimal literal with optional exponent.
fn parse_decimal(s: &str) -> Option<BigRational> {
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], parse_small(&s[i + 1..])?),
        None => (s, 0),
    };
    if exp.abs() > 4096 {
        return None;
    }
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let all = format!("{int_part}{frac_part}");
    if !all.bytes().all(|b| b.is_ascii_digit()) || all.len() > 4096 {
        return None;
    }
    let mut num = BigInt::from_biguint(Sign::Plus, BigUint::parse_bytes(all.as_bytes(), 10)?);
    if neg {
        num = -num;
    }
    let scale = exp - frac_part.len() as i64;
    let ten = BigInt::from(10u8);
    let value = if scale >= 0 {
        BigRational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    Some(value)
}

/// `(a, b, n, c)` of `[(] [a (+|-)] [b*] sqrt(n) [)] [/c]`.
fn parse_surd(s: &str) -> Option<(i64, i64, u64, i64)> {
    let (body, c) = match s.rfind('/') {
        Some(i) if !s[i + 1..].contains("sqrt") => (&s[..i], parse_small(&s[i + 1..])?),
        Some(_) => return None,
        None => (s, 1),
    };
    let body = match body.strip_prefix('(') {
        Some(inner) => inner.strip_suffix(')')?,
        None => body,
    };
    let at = body.find("sqrt(")?;
    let (prefix, tail) = body.split_at(at);
    let n_text = tail.strip_prefix("sqrt(")?.strip_suffix(')')?;
    if n_text.is_empty() || !n_text.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let n: u64 = n_text.parse().ok()?;

    let (pre, b_mag) = match prefix.strip_suffix('*') {
        Some(p) => {
            let split = p.rfind(|ch: char| !ch.is_ascii_digit()).map_or(0, |i| i + 1);
            let mag: i64 = p[split..].parse().ok()?;
            (&p[..split], mag)
        }
        None => (prefix, 1),
    };
    let (a, sign) = if pre.is_empty() || pre == "+" {
        (0, 1)
    } else if pre == "-" {
        (0, -1)
    } else if let Some(a) = pre.strip_suffix('+') {
        (parse_small(a)?, 1)
    } else if let Some(a) = pre.strip_suffix('-') {
        (parse_small(a)?, -1)
    } else {
        return None;
    };
    Some((a, sign * b_mag, n, c))
}

/// `floor(sqrt(n) 2^P) / 2^P`.
fn sqrt_rational(n: u64) -> BigRational {
    let shifted = BigInt::from(n) << (2 * PRECISION_BITS);
    let root = shifted.sqrt();
    BigRational::new(root, BigInt::one() << PRECISION_BITS)
}

/// Continued-fraction convergents `p/q` of `x`, at most `max_terms`.
pub fn convergents(x: &BigRational, max_terms: usize) -> Vec<(BigInt, BigInt)> {
    let mut out = Vec::new();
    let (mut p_prev, mut p) = (BigInt::zero(), BigInt::one());
    let (mut q_prev, mut q) = (BigInt::one(), BigInt::zero());
    let mut rest = x.clone();
    for _ in 0..max_terms {
        let a = rest.floor().to_integer();
        let p_next = &a * &p + &p_prev;
        let q_next = &a * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
        out.push((p.clone(), q.clone()));
        let frac = &rest - BigRational::from_integer(a);
        if frac.is_zero() {
            break;
        }
        rest = frac.recip();
    }
    out
}

/// `|q x - p|` for a rational approximation, rounded once.
pub fn approximation_error(x: &BigRational, p: &BigInt, q: &BigInt) -> f64 {
    (x * BigRational::from_integer(q.clone()) - BigRational::from_integer(p.clone()))
        .abs()
        .to_f64()
        .unwrap_or(f64::NAN)
}
