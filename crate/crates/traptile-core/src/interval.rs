//! Certified interval arithmetic on dyadic fixed-point numbers.
//!
//! An `Interval` encloses a real value between `lo/2^prec` and `hi/2^prec`
//! with BigInt mantissas, so precision is unbounded. Every operation rounds
//! outward: the true result of applying the operation to any values inside
//! the operand intervals lies inside the result interval. `ln` and `exp` use
//! argument reduction plus truncated series with explicit tail bounds, which
//! keeps the enclosures honest at any precision.

use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use once_cell::sync::Lazy;

use crate::field::{approx_f64, QuadraticNumber, Rational};

/// Floor division by 2^s (rounds toward negative infinity).
fn shr_floor(x: &BigInt, s: u32) -> BigInt {
    x.div_floor(&(BigInt::one() << (s as usize)))
}

/// Ceiling division by 2^s.
fn shr_ceil(x: &BigInt, s: u32) -> BigInt {
    x.div_ceil(&(BigInt::one() << (s as usize)))
}

fn div_dir(n: &BigInt, d: &BigInt, up: bool) -> BigInt {
    debug_assert!(d.is_positive());
    if up {
        n.div_ceil(d)
    } else {
        n.div_floor(d)
    }
}

/// A closed interval `[lo, hi] * 2^-prec` enclosing a real value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    lo: BigInt,
    hi: BigInt,
    prec: u32,
}

impl Interval {
    pub fn precision(&self) -> u32 {
        self.prec
    }

    fn raw(lo: BigInt, hi: BigInt, prec: u32) -> Self {
        debug_assert!(lo <= hi, "inverted interval");
        Interval { lo, hi, prec }
    }

    pub fn from_rational(r: &Rational, prec: u32) -> Self {
        let scaled = r * crate::field::pow2(prec);
        let lo = scaled.floor().to_integer();
        let hi = scaled.ceil().to_integer();
        Interval::raw(lo, hi, prec)
    }

    pub fn from_rational_bounds(lo: &Rational, hi: &Rational, prec: u32) -> Self {
        let l = (lo * crate::field::pow2(prec)).floor().to_integer();
        let h = (hi * crate::field::pow2(prec)).ceil().to_integer();
        Interval::raw(l, h, prec)
    }

    pub fn from_qnum(x: &QuadraticNumber, prec: u32) -> Self {
        let (lo, hi) = x.to_interval(prec + 2);
        Interval::from_rational_bounds(&lo, &hi, prec)
    }

    pub fn exact_int(n: i64, prec: u32) -> Self {
        let m = BigInt::from(n) << (prec as usize);
        Interval::raw(m.clone(), m, prec)
    }

    fn assert_same(&self, other: &Self) {
        assert_eq!(self.prec, other.prec, "intervals at different precisions");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_same(other);
        Interval::raw(&self.lo + &other.lo, &self.hi + &other.hi, self.prec)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.assert_same(other);
        Interval::raw(&self.lo - &other.hi, &self.hi - &other.lo, self.prec)
    }

    pub fn neg(&self) -> Self {
        Interval::raw(-self.hi.clone(), -self.lo.clone(), self.prec)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.assert_same(other);
        let cands = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = cands.iter().min().unwrap();
        let hi = cands.iter().max().unwrap();
        Interval::raw(
            shr_floor(lo, self.prec),
            shr_ceil(hi, self.prec),
            self.prec,
        )
    }

    /// Multiplication by an exact rational.
    pub fn mul_rat(&self, r: &Rational) -> Self {
        let (a, b) = if r.is_negative() {
            (&self.hi, &self.lo)
        } else {
            (&self.lo, &self.hi)
        };
        let lo = div_dir(&(a * r.numer()), r.denom(), false);
        let hi = div_dir(&(b * r.numer()), r.denom(), true);
        Interval::raw(lo, hi, self.prec)
    }

    /// Interval division; None when the divisor interval contains zero.
    pub fn div(&self, other: &Self) -> Option<Self> {
        self.assert_same(other);
        if !other.lo.is_positive() && !other.hi.is_negative() {
            return None;
        }
        let p = self.prec as usize;
        let q = |n: &BigInt, d: &BigInt, up: bool| -> BigInt {
            // (n/2^p) / (d/2^p) = n/d, rescaled to 2^-p fixed point.
            let num = n << p;
            if d.is_negative() {
                div_dir(&-num, &-d.clone(), up)
            } else {
                div_dir(&num, d, up)
            }
        };
        let cands = [
            q(&self.lo, &other.lo, false),
            q(&self.lo, &other.hi, false),
            q(&self.hi, &other.lo, false),
            q(&self.hi, &other.hi, false),
        ];
        let lo = cands.iter().min().unwrap().clone();
        let cands_up = [
            q(&self.lo, &other.lo, true),
            q(&self.lo, &other.hi, true),
            q(&self.hi, &other.lo, true),
            q(&self.hi, &other.hi, true),
        ];
        let hi = cands_up.iter().max().unwrap().clone();
        Some(Interval::raw(lo, hi, self.prec))
    }

    /// True when every value of `self` is strictly below every value of `other`.
    pub fn definitely_lt(&self, other: &Self) -> bool {
        self.assert_same(other);
        self.hi < other.lo
    }

    pub fn definitely_gt(&self, other: &Self) -> bool {
        other.definitely_lt(self)
    }

    pub fn definitely_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn definitely_negative(&self) -> bool {
        self.hi.is_negative()
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// Width as a rational.
    pub fn width(&self) -> Rational {
        Rational::new(&self.hi - &self.lo, BigInt::one() << (self.prec as usize))
    }

    pub fn lo_rational(&self) -> Rational {
        Rational::new(self.lo.clone(), BigInt::one() << (self.prec as usize))
    }

    pub fn hi_rational(&self) -> Rational {
        Rational::new(self.hi.clone(), BigInt::one() << (self.prec as usize))
    }

    pub fn approx_mid(&self) -> f64 {
        (approx_f64(&self.lo_rational()) + approx_f64(&self.hi_rational())) / 2.0
    }

    /// Natural logarithm; None unless the interval is strictly positive.
    pub fn ln(&self) -> Option<Self> {
        if !self.lo.is_positive() {
            return None;
        }
        let (lo, _) = ln_mantissa(&self.lo, self.prec);
        let (_, hi) = ln_mantissa(&self.hi, self.prec);
        Some(Interval::raw(lo, hi, self.prec))
    }

    pub fn exp(&self) -> Self {
        let (lo, _) = exp_mantissa(&self.lo, self.prec);
        let (_, hi) = exp_mantissa(&self.hi, self.prec);
        Interval::raw(lo, hi, self.prec)
    }

    /// `self^e` for positive base via exp(e * ln self); None when the base
    /// enclosure is not strictly positive.
    pub fn pow(&self, e: &Self) -> Option<Self> {
        Some(e.mul(&self.ln()?).exp())
    }

    /// Decimal rendering of the enclosure, for reports.
    pub fn to_decimal_string(&self, digits: u32) -> String {
        format!(
            "[{}, {}]",
            decimal_of(&self.lo, self.prec, digits, false),
            decimal_of(&self.hi, self.prec, digits, true)
        )
    }
}

fn decimal_of(m: &BigInt, prec: u32, digits: u32, round_up: bool) -> String {
    let neg = m.is_negative();
    let mag = m.abs();
    let scaled = mag * BigInt::from(10u32).pow(digits);
    let int = if round_up != neg {
        shr_ceil(&scaled, prec)
    } else {
        shr_floor(&scaled, prec)
    };
    let s = int.to_string();
    let digits = digits as usize;
    let (ip, fp) = if s.len() > digits {
        (s[..s.len() - digits].to_string(), s[s.len() - digits..].to_string())
    } else {
        ("0".to_string(), format!("{:0>width$}", s, width = digits))
    };
    format!("{}{}.{}", if neg { "-" } else { "" }, ip, fp)
}

/// Enclosure of ln(m/2^prec) for positive m, as mantissas at the same scale.
fn ln_mantissa(m: &BigInt, prec: u32) -> (BigInt, BigInt) {
    debug_assert!(m.is_positive());
    let guard = 32u32;
    let wp = prec + guard;
    // m/2^prec = u * 2^e with u in [1/2, 1).
    let bits = m.bits() as i64;
    let mut e = bits - prec as i64;
    // u mantissa at working precision.
    let shift = wp as i64 - bits;
    let (mut u_lo, mut u_hi) = if shift >= 0 {
        let v = m << (shift as usize);
        (v.clone(), v)
    } else {
        let s = (-shift) as u32;
        (shr_floor(m, s), shr_ceil(m, s))
    };
    // Scale into [2/3, 4/3) so |z| <= 1/5.
    let two_thirds = div_dir(&(BigInt::from(2) << (wp as usize)), &BigInt::from(3), false);
    if u_hi <= two_thirds {
        u_lo <<= 1;
        u_hi <<= 1;
        e -= 1;
    }
    let one = BigInt::one() << (wp as usize);
    // z = (u-1)/(u+1), |z| <= 1/5 after reduction. The numerator may be
    // negative, so both denominators are candidates for each bound.
    let n_lo = (&u_lo - &one) << (wp as usize);
    let n_hi = (&u_hi - &one) << (wp as usize);
    let d_small = &u_lo + &one;
    let d_big = &u_hi + &one;
    let z_lo = div_dir(&n_lo, &d_small, false).min(div_dir(&n_lo, &d_big, false));
    let z_hi = div_dir(&n_hi, &d_small, true).max(div_dir(&n_hi, &d_big, true));
    let (a_lo, a_hi) = atanh_enclosure(&z_lo, &z_hi, wp);
    let mut lo = a_lo << 1;
    let mut hi = a_hi << 1;
    // Add e * ln2.
    if e != 0 {
        let (l2_lo, l2_hi) = ln2_enclosure(wp);
        let eb = BigInt::from(e);
        let (c1, c2) = (&eb * &l2_lo, &eb * &l2_hi);
        lo += (&c1).min(&c2);
        hi += (&c1).max(&c2);
    }
    (shr_floor(&lo, guard), shr_ceil(&hi, guard))
}

/// Enclosure of atanh on an interval with |z| <= 1/4, all at scale 2^-wp.
fn atanh_enclosure(z_lo: &BigInt, z_hi: &BigInt, wp: u32) -> (BigInt, BigInt) {
    // atanh is odd and increasing: evaluate at both endpoints.
    let lo = atanh_point(z_lo, wp, false);
    let hi = atanh_point(z_hi, wp, true);
    (lo, hi)
}

/// Directed atanh at a point: lower bound when !up, upper bound when up.
fn atanh_point(z: &BigInt, wp: u32, up: bool) -> BigInt {
    let neg = z.is_negative();
    let zz = z.abs();
    // For a negative argument the directed bound flips.
    let inner_up = up != neg;
    let v = atanh_nonneg(&zz, wp, inner_up);
    if neg {
        -v
    } else {
        v
    }
}

/// Directed atanh(z) for 0 <= z <= 1/4 via the odd series with tail bound.
fn atanh_nonneg(z: &BigInt, wp: u32, up: bool) -> BigInt {
    debug_assert!(!z.is_negative());
    // Term intervals track compounding rounding error through the recurrence.
    let y_lo = shr_floor(&(z * z), wp);
    let y_hi = shr_ceil(&(z * z), wp);
    let mut t_lo = z.clone();
    let mut t_hi = z.clone();
    let mut sum_lo = BigInt::zero();
    let mut sum_hi = BigInt::zero();
    let mut k = 0u32;
    loop {
        let denom = BigInt::from(2 * k + 1);
        sum_lo += div_dir(&t_lo, &denom, false);
        sum_hi += div_dir(&t_hi, &denom, true);
        t_lo = shr_floor(&(&t_lo * &y_lo), wp);
        t_hi = shr_ceil(&(&t_hi * &y_hi), wp);
        k += 1;
        if t_hi <= BigInt::from(2) {
            // Remaining tail is below t * z^2/(1-z^2) < t; pad by t_hi + 1.
            sum_hi += &t_hi + 1;
            break;
        }
    }
    if up {
        sum_hi
    } else {
        sum_lo
    }
}

static LN2_CACHE: Lazy<Mutex<HashMap<u32, (BigInt, BigInt)>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// Enclosure of ln 2 = 2*atanh(1/3) at scale 2^-wp.
fn ln2_enclosure(wp: u32) -> (BigInt, BigInt) {
    if let Some(v) = LN2_CACHE.lock().unwrap().get(&wp) {
        return v.clone();
    }
    let third_lo = div_dir(&(BigInt::one() << (wp as usize)), &BigInt::from(3), false);
    let third_hi = &third_lo + 1;
    let (a_lo, a_hi) = atanh_enclosure(&third_lo, &third_hi, wp);
    let v = (a_lo << 1, a_hi << 1);
    LN2_CACHE.lock().unwrap().insert(wp, v.clone());
    v
}

/// Enclosure of exp(m/2^prec) as mantissas at the same scale.
fn exp_mantissa(m: &BigInt, prec: u32) -> (BigInt, BigInt) {
    let guard = 32u32;
    let wp = prec + guard;
    let mw = m << (guard as usize);
    let (l2_lo, l2_hi) = ln2_enclosure(wp);
    // k = nearest integer to v/ln2; accuracy only affects |r|, not soundness.
    let k: BigInt = {
        let approx: BigInt = (&mw << 1) + &l2_lo; // v/ln2 + 1/2, scaled by ln2
        approx.div_floor(&(&l2_lo << 1))
    };
    // r = v - k*ln2, |r| <= 0.5*ln2 + slack.
    let (c1, c2) = (&k * &l2_lo, &k * &l2_hi);
    let r_lo = &mw - (&c1).max(&c2);
    let r_hi = &mw - (&c1).min(&c2);
    let (s_lo, s_hi) = exp_series(&r_lo, &r_hi, wp);
    let shift = |v: &BigInt, up: bool| -> BigInt {
        // v * 2^k, then drop guard bits.
        let kk = k.to_i64().expect("exp argument out of range");
        let total = kk - guard as i64;
        if total >= 0 {
            v << (total as usize)
        } else if up {
            shr_ceil(v, (-total) as u32)
        } else {
            shr_floor(v, (-total) as u32)
        }
    };
    let lo = shift(&s_lo, false);
    let hi = shift(&s_hi, true);
    (lo.max(BigInt::zero()), hi)
}

/// Enclosure of exp on [r_lo, r_hi] with |r| < 1, at scale 2^-wp.
fn exp_series(r_lo: &BigInt, r_hi: &BigInt, wp: u32) -> (BigInt, BigInt) {
    let one = BigInt::one() << (wp as usize);
    let mut t_lo = one.clone();
    let mut t_hi = one.clone();
    let mut sum_lo = BigInt::zero();
    let mut sum_hi = BigInt::zero();
    let mut j = 0u64;
    loop {
        sum_lo += &t_lo;
        sum_hi += &t_hi;
        j += 1;
        // t <- t * r / j with outward rounding; r may straddle zero.
        let cands = [&t_lo * r_lo, &t_lo * r_hi, &t_hi * r_lo, &t_hi * r_hi];
        let pmin = cands.iter().min().unwrap();
        let pmax = cands.iter().max().unwrap();
        let jb = BigInt::from(j);
        t_lo = div_dir(&shr_floor(pmin, wp), &jb, false);
        t_hi = div_dir(&shr_ceil(pmax, wp), &jb, true);
        if t_lo.abs().max(t_hi.abs()) <= BigInt::from(2) {
            // |r| < 1 so the tail is below the geometric bound 2*|t|.
            sum_lo -= (&t_lo.abs()).max(&t_hi.abs()) * 2 + 1;
            sum_hi += (&t_lo.abs()).max(&t_hi.abs()) * 2 + 1;
            break;
        }
    }
    (sum_lo, sum_hi)
}
