//! Exact arithmetic helpers shared by every module.

use alloc::format;
use alloc::string::String;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = num_rational::BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn uint(v: u64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn from_big(v: BigInt) -> Rational {
    Rational::from_integer(v)
}

pub fn floor_int(r: &Rational) -> BigInt {
    r.numer().div_floor(r.denom())
}

pub fn ceil_int(r: &Rational) -> BigInt {
    let (q, rem) = r.numer().div_mod_floor(r.denom());
    if rem.is_zero() {
        q
    } else {
        q + 1
    }
}

pub fn is_integral(r: &Rational) -> bool {
    r.denom().is_one()
}

pub fn is_pow2(v: u64) -> bool {
    v != 0 && v & (v - 1) == 0
}

/// Smallest power of two that is at least `r` (and at least 1).
pub fn pow2_at_least(r: &Rational) -> BigUint {
    let mut p = BigUint::one();
    let target = ceil_int(r);
    while BigInt::from(p.clone()) < target {
        p <<= 1u32;
    }
    p
}

/// Smallest `p` with `base^p >= target`, for `base > 1`.
pub fn log_ceil(base: &Rational, target: &Rational) -> u32 {
    // base^p >= target  <=>  bn^p * td >= tn * bd^p (all positive).
    let reaches = |p: u32| {
        let lhs = num_traits::pow(base.numer().clone(), p as usize) * target.denom();
        let rhs = num_traits::pow(base.denom().clone(), p as usize) * target.numer();
        lhs >= rhs
    };
    let guess = libm::log(to_f64(target)) / libm::log(to_f64(base));
    let mut p = if guess.is_finite() && guess > 2.0 { guess as u32 - 2 } else { 0 };
    while p > 0 && reaches(p) {
        p -= 1;
    }
    while !reaches(p) {
        p += 1;
    }
    p
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::INFINITY)
}

/// Formats as `p/q`, or `p` when integral.
pub fn fmt_rat(r: &Rational) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p/q`, an integer, or a finite decimal such as `0.25`.
pub fn parse_rat(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let neg = whole.starts_with('-');
        let w: BigInt = if whole.is_empty() || whole == "-" {
            BigInt::zero()
        } else {
            whole.parse().ok()?
        };
        let f: BigInt = frac.parse().ok()?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let mag = w.abs() * &scale + f;
        let v = Rational::new(mag, scale);
        return Some(if neg { -v } else { v });
    }
    let n: BigInt = s.parse().ok()?;
    Some(Rational::from_integer(n))
}

/// Rational upper bound on `ln(x)` for an integer `x >= 1`.
pub fn ln_upper(x: u64) -> Rational {
    if x <= 1 {
        return Rational::zero();
    }
    let approx = libm::log(x as f64);
    let scaled = libm::ceil(approx * 1e9) as i64 + 1;
    ratio(scaled, 1_000_000_000)
}

pub fn min_rat<'a>(a: &'a Rational, b: &'a Rational) -> &'a Rational {
    if a <= b {
        a
    } else {
        b
    }
}

pub fn max_rat<'a>(a: &'a Rational, b: &'a Rational) -> &'a Rational {
    if a >= b {
        a
    } else {
        b
    }
}
