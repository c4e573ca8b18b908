//! Arbitrary-precision dyadic numbers and outward-rounded interval arithmetic.
//!
//! A [`Dyadic`] is `mant * 2^exp` with a `BigInt` mantissa, so addition and
//! multiplication are exact; only division and precision reduction round.
//! A [`RealInterval`] keeps a lower endpoint rounded down and an upper
//! endpoint rounded up at a caller-chosen precision (fractional bits), which
//! is the certificate currency for every real quantity in this crate.

use num_bigint::{BigInt, Sign};
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;

/// Default working precision in fractional bits.
pub const DEFAULT_PREC: u32 = 256;
/// Hard cap for precision escalation loops.
pub const MAX_PREC: u32 = 4096;

/// Exact dyadic rational `mant * 2^exp`.
#[derive(Clone, Debug)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn new(mant: BigInt, exp: i64) -> Self {
        Dyadic { mant, exp }
    }

    pub fn zero() -> Self {
        Dyadic { mant: BigInt::zero(), exp: 0 }
    }

    pub fn one() -> Self {
        Dyadic { mant: BigInt::one(), exp: 0 }
    }

    pub fn from_int(v: i64) -> Self {
        Dyadic { mant: BigInt::from(v), exp: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.sign() == Sign::Minus
    }

    pub fn is_positive(&self) -> bool {
        self.mant.sign() == Sign::Plus
    }

    /// Aligns `self` and `other` to a common exponent (the smaller one).
    fn aligned(&self, other: &Dyadic) -> (BigInt, BigInt, i64) {
        let exp = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - exp) as usize;
        let b = &other.mant << (other.exp - exp) as usize;
        (a, b, exp)
    }

    pub fn add(&self, other: &Dyadic) -> Dyadic {
        let (a, b, exp) = self.aligned(other);
        Dyadic { mant: a + b, exp }
    }

    pub fn sub(&self, other: &Dyadic) -> Dyadic {
        let (a, b, exp) = self.aligned(other);
        Dyadic { mant: a - b, exp }
    }

    pub fn mul(&self, other: &Dyadic) -> Dyadic {
        Dyadic { mant: &self.mant * &other.mant, exp: self.exp + other.exp }
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic { mant: -&self.mant, exp: self.exp }
    }

    pub fn mul_int(&self, k: i64) -> Dyadic {
        Dyadic { mant: &self.mant * k, exp: self.exp }
    }

    /// Exact halving (bisection midpoints stay exact).
    pub fn half(&self) -> Dyadic {
        Dyadic { mant: self.mant.clone(), exp: self.exp - 1 }
    }

    pub fn avg(&self, other: &Dyadic) -> Dyadic {
        self.add(other).half()
    }

    /// Rounds toward -inf to `prec` fractional bits.
    pub fn round_floor(&self, prec: u32) -> Dyadic {
        let target = -(prec as i64);
        if self.exp >= target {
            Dyadic { mant: &self.mant << (self.exp - target) as usize, exp: target }
        } else {
            let k = (target - self.exp) as usize;
            // BigInt shr rounds toward -inf.
            Dyadic { mant: &self.mant >> k, exp: target }
        }
    }

    /// Rounds toward +inf to `prec` fractional bits.
    pub fn round_ceil(&self, prec: u32) -> Dyadic {
        self.neg().round_floor(prec).neg()
    }

    /// `floor(a / b)` at `prec` fractional bits. `b` must be nonzero.
    pub fn div_floor(a: &Dyadic, b: &Dyadic, prec: u32) -> Dyadic {
        assert!(!b.is_zero(), "division by zero");
        let target = -(prec as i64);
        // a / b * 2^prec = mant_a * 2^(exp_a - exp_b + prec) / mant_b
        let k = a.exp - b.exp - target;
        let (num, den) = if k >= 0 {
            (&a.mant << k as usize, b.mant.clone())
        } else {
            (a.mant.clone(), &b.mant << (-k) as usize)
        };
        Dyadic { mant: num.div_floor(&den), exp: target }
    }

    /// `ceil(a / b)` at `prec` fractional bits.
    pub fn div_ceil(a: &Dyadic, b: &Dyadic, prec: u32) -> Dyadic {
        Dyadic::div_floor(&a.neg(), b, prec).neg()
    }

    pub fn is_integer(&self) -> bool {
        if self.exp >= 0 {
            return true;
        }
        let k = (-self.exp) as usize;
        (&self.mant >> k) << k == self.mant
    }

    pub fn floor_big(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << self.exp as usize
        } else {
            &self.mant >> (-self.exp) as usize
        }
    }

    pub fn ceil_big(&self) -> BigInt {
        -self.neg().floor_big()
    }

    /// Floor square root at `prec` fractional bits; `self` must be ≥ 0.
    pub fn sqrt_floor(&self, prec: u32) -> Dyadic {
        assert!(!self.is_negative(), "sqrt of negative dyadic");
        let target = -(prec as i64);
        // sqrt(mant * 2^exp) * 2^prec = sqrt(mant * 2^(exp + 2*prec))
        let k = self.exp - 2 * target;
        let scaled = if k >= 0 { &self.mant << k as usize } else { &self.mant >> (-k) as usize };
        Dyadic { mant: scaled.sqrt(), exp: target }
    }

    pub fn sqrt_ceil(&self, prec: u32) -> Dyadic {
        let lo = self.sqrt_floor(prec);
        let back = lo.mul(&lo);
        if back.cmp(self) == Ordering::Equal {
            lo
        } else {
            Dyadic { mant: lo.mant + 1, exp: lo.exp }
        }
    }

    pub fn cmp(&self, other: &Dyadic) -> Ordering {
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }

    pub fn min(self, other: Dyadic) -> Dyadic {
        if self.cmp(&other) == Ordering::Greater { other } else { self }
    }

    pub fn max(self, other: Dyadic) -> Dyadic {
        if self.cmp(&other) == Ordering::Less { other } else { self }
    }

    /// Nearest-f64 approximation (not directed; callers add slack).
    pub fn to_f64(&self) -> f64 {
        let bits = self.mant.bits() as i64;
        // Keep the top 80 bits so the conversion cannot overflow `BigInt::to_f64`.
        if bits > 80 {
            let drop = bits - 80;
            let m = (&self.mant >> drop as usize).to_f64().unwrap_or(f64::NAN);
            m * 2f64.powi((self.exp + drop) as i32)
        } else {
            self.mant.to_f64().unwrap_or(f64::NAN) * 2f64.powi(self.exp as i32)
        }
    }

    pub fn to_f64_down(&self) -> f64 {
        self.to_f64().next_down().next_down()
    }

    pub fn to_f64_up(&self) -> f64 {
        self.to_f64().next_up().next_up()
    }

    /// Exact decimal rendering with `digits` fractional digits, directed.
    pub fn to_decimal(&self, digits: u32, round_up: bool) -> String {
        let pow10 = BigInt::from(10u32).pow(digits);
        let scaled = Dyadic { mant: &self.mant * &pow10, exp: self.exp };
        let int = if round_up { scaled.ceil_big() } else { scaled.floor_big() };
        format_scaled_decimal(&int, digits)
    }

    /// Exact decimal rendering with `digits` fractional digits, half-even ties.
    pub fn to_decimal_half_even(&self, digits: u32) -> String {
        let pow10 = BigInt::from(10u32).pow(digits);
        let scaled = Dyadic { mant: &self.mant * &pow10, exp: self.exp };
        let int = if scaled.exp >= 0 {
            &scaled.mant << scaled.exp as usize
        } else {
            let k = (-scaled.exp) as usize;
            let q: BigInt = &scaled.mant >> k;
            let rem = &scaled.mant - (&q << k);
            let half = BigInt::one() << (k - 1);
            match rem.cmp(&half) {
                Ordering::Less => q,
                Ordering::Greater => q + 1,
                Ordering::Equal => {
                    if q.is_even() { q } else { q + 1 }
                }
            }
        };
        format_scaled_decimal(&int, digits)
    }

    /// Rough `log2` of a positive dyadic, within 1 of the true value;
    /// safe for sizing horizons and loop budgets far below the sign level.
    pub fn log2_approx(&self) -> f64 {
        assert!(self.is_positive(), "log2 of a nonpositive dyadic");
        (self.mant.bits() as f64 - 1.0) + self.exp as f64
    }

    /// Exact `(p, q)` with `self = p / q` and `q` a power of two.
    pub fn to_ratio(&self) -> (BigInt, BigInt) {
        if self.exp >= 0 {
            (&self.mant << self.exp as usize, BigInt::one())
        } else {
            (self.mant.clone(), BigInt::one() << (-self.exp) as usize)
        }
    }

    /// Parses a decimal string as an exact ratio `(numerator, denominator)`.
    pub fn decimal_to_ratio(s: &str) -> Result<(BigInt, BigInt), String> {
        let s = s.trim();
        let (sign, body) = match s.strip_prefix('-') {
            Some(rest) => (-1, rest),
            None => (1, s.strip_prefix('+').unwrap_or(s)),
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some((a, b)) => (a, b),
            None => (body, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(format!("invalid decimal literal: {s:?}"));
        }
        if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
            return Err(format!("invalid decimal literal: {s:?}"));
        }
        let digits: String = format!("{int_part}{frac_part}");
        let num: BigInt = digits.parse().map_err(|_| format!("invalid decimal literal: {s:?}"))?;
        let den = BigInt::from(10u32).pow(frac_part.len() as u32);
        Ok((num * sign, den))
    }
}

fn format_scaled_decimal(int: &BigInt, digits: u32) -> String {
    let neg = int.sign() == Sign::Minus;
    let abs = int.magnitude().to_string();
    let d = digits as usize;
    let padded = if abs.len() <= d { format!("{}{}", "0".repeat(d + 1 - abs.len()), abs) } else { abs };
    let split = padded.len() - d;
    let (ip, fp) = padded.split_at(split);
    let body = if d == 0 { ip.to_string() } else { format!("{ip}.{fp}") };
    if neg { format!("-{body}") } else { body }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(24, false))
    }
}

impl PartialEq for Dyadic {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Dyadic {}
impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        Dyadic::cmp(self, other)
    }
}

/// Three-valued answer for interval comparisons and containment tests.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Trivalent {
    True,
    False,
    Undecided,
}

impl Trivalent {
    pub fn is_true(self) -> bool {
        self == Trivalent::True
    }
    pub fn is_false(self) -> bool {
        self == Trivalent::False
    }
}

/// Closed interval `[lo, hi]` with outward rounding on every operation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealInterval {
    lo: Dyadic,
    hi: Dyadic,
}

impl RealInterval {
    pub fn new(lo: Dyadic, hi: Dyadic) -> Self {
        assert!(lo.cmp(&hi) != Ordering::Greater, "interval endpoints out of order");
        RealInterval { lo, hi }
    }

    pub fn point(v: Dyadic) -> Self {
        RealInterval { lo: v.clone(), hi: v }
    }

    pub fn from_int(v: i64) -> Self {
        Self::point(Dyadic::from_int(v))
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    /// Tight enclosure of `p/q` at `prec` bits.
    pub fn from_ratio_big(p: &BigInt, q: &BigInt, prec: u32) -> Self {
        let (p, q) = if q.sign() == Sign::Minus { (-p, -q) } else { (p.clone(), q.clone()) };
        let a = Dyadic::new(p, 0);
        let b = Dyadic::new(q, 0);
        RealInterval {
            lo: Dyadic::div_floor(&a, &b, prec),
            hi: Dyadic::div_ceil(&a, &b, prec),
        }
    }

    pub fn from_ratio(p: i64, q: i64, prec: u32) -> Self {
        Self::from_ratio_big(&BigInt::from(p), &BigInt::from(q), prec)
    }

    /// Tight enclosure of a decimal literal at `prec` bits.
    pub fn from_decimal(s: &str, prec: u32) -> Result<Self, String> {
        let (p, q) = Dyadic::decimal_to_ratio(s)?;
        Ok(Self::from_ratio_big(&p, &q, prec))
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn width(&self) -> Dyadic {
        self.hi.sub(&self.lo)
    }

    pub fn mid(&self) -> Dyadic {
        self.lo.avg(&self.hi)
    }

    pub fn add(&self, o: &RealInterval, prec: u32) -> RealInterval {
        RealInterval {
            lo: self.lo.add(&o.lo).round_floor(prec),
            hi: self.hi.add(&o.hi).round_ceil(prec),
        }
    }

    pub fn sub(&self, o: &RealInterval, prec: u32) -> RealInterval {
        RealInterval {
            lo: self.lo.sub(&o.hi).round_floor(prec),
            hi: self.hi.sub(&o.lo).round_ceil(prec),
        }
    }

    pub fn neg(&self) -> RealInterval {
        RealInterval { lo: self.hi.neg(), hi: self.lo.neg() }
    }

    pub fn mul(&self, o: &RealInterval, prec: u32) -> RealInterval {
        let cands = [
            self.lo.mul(&o.lo),
            self.lo.mul(&o.hi),
            self.hi.mul(&o.lo),
            self.hi.mul(&o.hi),
        ];
        let mut lo = cands[0].clone();
        let mut hi = cands[0].clone();
        for c in &cands[1..] {
            if c.cmp(&lo) == Ordering::Less {
                lo = c.clone();
            }
            if c.cmp(&hi) == Ordering::Greater {
                hi = c.clone();
            }
        }
        RealInterval { lo: lo.round_floor(prec), hi: hi.round_ceil(prec) }
    }

    pub fn mul_int(&self, k: i64) -> RealInterval {
        if k >= 0 {
            RealInterval { lo: self.lo.mul_int(k), hi: self.hi.mul_int(k) }
        } else {
            RealInterval { lo: self.hi.mul_int(k), hi: self.lo.mul_int(k) }
        }
    }

    /// Interval division; the denominator must be sign-definite.
    pub fn div(&self, o: &RealInterval, prec: u32) -> RealInterval {
        assert!(
            o.lo.is_positive() || o.hi.is_negative(),
            "interval division by an interval containing zero"
        );
        let pairs = [(&self.lo, &o.lo), (&self.lo, &o.hi), (&self.hi, &o.lo), (&self.hi, &o.hi)];
        let mut lo: Option<Dyadic> = None;
        let mut hi: Option<Dyadic> = None;
        for (a, b) in pairs {
            let f = Dyadic::div_floor(a, b, prec);
            let c = Dyadic::div_ceil(a, b, prec);
            lo = Some(match lo {
                None => f,
                Some(cur) => cur.min(f),
            });
            hi = Some(match hi {
                None => c,
                Some(cur) => cur.max(c),
            });
        }
        RealInterval { lo: lo.unwrap(), hi: hi.unwrap() }
    }

    pub fn recip(&self, prec: u32) -> RealInterval {
        RealInterval::from_int(1).div(self, prec)
    }

    pub fn powi(&self, n: u32, prec: u32) -> RealInterval {
        let mut acc = RealInterval::from_int(1);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base, prec);
            }
            base = base.mul(&base, prec);
            n >>= 1;
        }
        acc
    }

    /// Square-root enclosure; requires a nonnegative lower endpoint.
    pub fn sqrt(&self, prec: u32) -> RealInterval {
        assert!(!self.lo.is_negative(), "sqrt of an interval reaching below zero");
        RealInterval { lo: self.lo.sqrt_floor(prec), hi: self.hi.sqrt_ceil(prec) }
    }

    /// Natural-log enclosure via f64 endpoints with a 2-ulp outward guard.
    ///
    /// Plenty for the dimension formulas, whose tolerances sit far above
    /// f64 granularity; not meant for sub-1e-12 log certificates.
    pub fn ln_f64(&self) -> RealInterval {
        assert!(self.lo.is_positive(), "ln of an interval reaching below zero");
        let lo = self.lo.to_f64_down().ln().next_down().next_down();
        let hi = self.hi.to_f64_up().ln().next_up().next_up();
        RealInterval::new(f64_to_dyadic(lo), f64_to_dyadic(hi))
    }

    pub fn contains_int(&self, v: i64) -> bool {
        let d = Dyadic::from_int(v);
        self.lo.cmp(&d) != Ordering::Greater && self.hi.cmp(&d) != Ordering::Less
    }

    pub fn contains(&self, v: &Dyadic) -> bool {
        self.lo.cmp(v) != Ordering::Greater && self.hi.cmp(v) != Ordering::Less
    }

    pub fn contains_interval(&self, o: &RealInterval) -> bool {
        self.lo.cmp(&o.lo) != Ordering::Greater && self.hi.cmp(&o.hi) != Ordering::Less
    }

    pub fn intersects(&self, o: &RealInterval) -> bool {
        self.lo.cmp(&o.hi) != Ordering::Greater && o.lo.cmp(&self.hi) != Ordering::Greater
    }

    /// Certainly `self < o`.
    pub fn lt(&self, o: &RealInterval) -> Trivalent {
        if self.hi.cmp(&o.lo) == Ordering::Less {
            Trivalent::True
        } else if self.lo.cmp(&o.hi) != Ordering::Less {
            Trivalent::False
        } else {
            Trivalent::Undecided
        }
    }

    /// Certainly `self <= o`.
    pub fn le(&self, o: &RealInterval) -> Trivalent {
        if self.hi.cmp(&o.lo) != Ordering::Greater {
            Trivalent::True
        } else if self.lo.cmp(&o.hi) == Ordering::Greater {
            Trivalent::False
        } else {
            Trivalent::Undecided
        }
    }

    pub fn gt(&self, o: &RealInterval) -> Trivalent {
        o.lt(self)
    }

    pub fn ge(&self, o: &RealInterval) -> Trivalent {
        o.le(self)
    }

    /// Decimal endpoints, rounded outward.
    pub fn to_decimal_pair(&self, digits: u32) -> (String, String) {
        (self.lo.to_decimal(digits, false), self.hi.to_decimal(digits, true))
    }

    pub fn to_f64_mid(&self) -> f64 {
        self.mid().to_f64()
    }
}

pub fn f64_to_dyadic(v: f64) -> Dyadic {
    assert!(v.is_finite(), "non-finite f64 into Dyadic");
    if v == 0.0 {
        return Dyadic::zero();
    }
    let bits = v.to_bits();
    let sign = if v < 0.0 { -1 } else { 1 };
    let exp_bits = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (mant, exp) = if exp_bits == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp_bits - 1075)
    };
    Dyadic::new(BigInt::from(mant) * sign, exp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dyadic_rounding_directions() {
        // 5/4 down to 0 fractional bits -> 1, up -> 2
        let v = Dyadic::new(BigInt::from(5), -2);
        assert_eq!(v.round_floor(0).to_decimal(0, false), "1");
        assert_eq!(v.round_ceil(0).to_decimal(0, false), "2");
        let n = v.neg();
        assert_eq!(n.round_floor(0).to_decimal(0, false), "-2");
        assert_eq!(n.round_ceil(0).to_decimal(0, false), "-1");
    }

    #[test]
    fn division_encloses_ratio() {
        let third = RealInterval::from_ratio(1, 3, 64);
        assert!(third.lo().cmp(third.hi()) == Ordering::Less);
        let three = RealInterval::from_int(3);
        let back = third.mul(&three, 64);
        assert!(back.contains_int(1));
        let w = back.width().to_f64();
        assert!(w < 1e-15);
    }

    #[test]
    fn decimal_parse_and_format() {
        let v = RealInterval::from_decimal("1.52", 128).unwrap();
        assert!(v.width().to_f64() < 1e-30);
        assert_eq!(v.mid().to_decimal_half_even(2), "1.52");
        let (p, q) = Dyadic::decimal_to_ratio("-2.75").unwrap();
        assert_eq!(p, BigInt::from(-275));
        assert_eq!(q, BigInt::from(100));
        assert!(Dyadic::decimal_to_ratio("12a").is_err());
    }

    #[test]
    fn half_even_formatting() {
        let v = Dyadic::new(BigInt::from(25), 0).mul(&Dyadic::new(BigInt::from(1), -1)); // 12.5
        assert_eq!(v.to_decimal_half_even(0), "12");
        let v = Dyadic::new(BigInt::from(27), -1); // 13.5
        assert_eq!(v.to_decimal_half_even(0), "14");
    }

    #[test]
    fn sqrt_brackets() {
        let two = RealInterval::from_int(2);
        let r = two.sqrt(128);
        let sq = r.mul(&r, 128);
        assert!(sq.contains_int(2));
        assert!(r.width().to_f64() < 1e-35);
    }

    #[test]
    fn ln_encloses_known_value() {
        let e2 = RealInterval::from_decimal("7.38905609893065", 128).unwrap();
        let l = e2.ln_f64();
        assert!(l.lo().to_f64() < 2.0 && l.hi().to_f64() > 2.0 - 1e-13);
        assert!((l.mid().to_f64() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn powi_matches_repeated_mul() {
        let x = RealInterval::from_decimal("1.5", 96).unwrap();
        let a = x.powi(7, 96);
        assert!((a.mid().to_f64() - 1.5f64.powi(7)).abs() < 1e-9);
    }

    #[test]
    fn f64_round_trip_exact() {
        let d = f64_to_dyadic(0.15625);
        assert_eq!(d.to_f64(), 0.15625);
        let d = f64_to_dyadic(-3.0);
        assert_eq!(d.to_f64(), -3.0);
    }
}
