//! Exact arithmetic in the real quadratic field Q[sqrt(d)].
//!
//! Elements are stored as `rat + irr*sqrt(d)` with rational coefficients; the
//! representation is unique because sqrt(d) is irrational. Signs, comparisons
//! and the conjugation automorphism are all decided exactly, with no floating
//! point anywhere.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Int = BigInt;
pub type Rational = Ratio<BigInt>;

/// Errors from field construction, parsing and division.
#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("invalid field discriminant: {0}")]
    InvalidField(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("mixed field contexts: sqrt({0}) vs sqrt({1})")]
    MixedContext(String, String),
    #[error("parse error: {0}")]
    Parse(String),
}

/// Rational from integer parts, for literals in code and tests.
pub fn rat_i(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Rational n/d from integer parts. Panics when d == 0.
pub fn ratio_i(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// The rational 2^bits.
pub fn pow2(bits: u32) -> Rational {
    Rational::from_integer(BigInt::one() << (bits as usize))
}

/// Returns the exact square root when `n` is a perfect square.
fn perfect_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let s = n.sqrt();
    if &s * &s == *n {
        Some(s)
    } else {
        None
    }
}

/// Parses the `rational ::= int | int "/" posint` grammar.
pub fn parse_rational(s: &str) -> Result<Rational, FieldError> {
    let t = s.trim();
    let bad = |m: &str| FieldError::Parse(format!("{m}: {s:?}"));
    match t.split_once('/') {
        None => {
            let n = BigInt::from_str(t).map_err(|_| bad("expected an integer"))?;
            Ok(Rational::from_integer(n))
        }
        Some((num, den)) => {
            let n = BigInt::from_str(num.trim()).map_err(|_| bad("expected an integer numerator"))?;
            let d = BigInt::from_str(den.trim()).map_err(|_| bad("expected an integer denominator"))?;
            if d.is_zero() {
                return Err(bad("denominator must be nonzero"));
            }
            if d.is_negative() {
                return Err(bad("denominator must be positive"));
            }
            Ok(Rational::new(n, d))
        }
    }
}

/// Formats a rational in the canonical `int` / `int/posint` form.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// An f64 approximation that survives numerators and denominators far outside
/// f64 range. Rendering-only; never used in a decision.
pub fn approx_f64(r: &Rational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    let n_bits = r.numer().bits() as i64;
    let d_bits = r.denom().bits() as i64;
    // Shift both parts into f64 range while preserving the quotient.
    let shift = (n_bits.max(d_bits) - 900).max(0) as u64;
    let n = (r.numer() >> shift).to_f64().unwrap_or(0.0);
    let d = (r.denom() >> shift).to_f64().unwrap_or(1.0);
    if d == 0.0 {
        return 0.0;
    }
    n / d
}

struct CtxInner {
    d: Rational,
    /// d as numer*denom, the radicand used for integer-sqrt enclosures.
    radicand: BigInt,
}

/// A fixed real quadratic field Q[sqrt(d)], shared by every element created
/// from it. Contexts compare equal exactly when their `d` agree.
#[derive(Clone)]
pub struct FieldContext(Arc<CtxInner>);

impl PartialEq for FieldContext {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.d == other.0.d
    }
}
impl Eq for FieldContext {}

impl fmt::Debug for FieldContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q[sqrt({})]", format_rational(&self.0.d))
    }
}

impl FieldContext {
    /// Builds the field for a positive rational `d` whose square root is
    /// irrational. Rejects non-positive `d` and exact rational squares.
    pub fn new(d: Rational) -> Result<Self, FieldError> {
        if !d.is_positive() {
            return Err(FieldError::InvalidField(format!(
                "d = {} is not positive",
                format_rational(&d)
            )));
        }
        // d is reduced; sqrt(p/q) is rational iff p and q are both squares.
        if perfect_sqrt(d.numer()).is_some() && perfect_sqrt(d.denom()).is_some() {
            return Err(FieldError::InvalidField(format!(
                "d = {} is a rational square",
                format_rational(&d)
            )));
        }
        let radicand = d.numer() * d.denom();
        Ok(FieldContext(Arc::new(CtxInner { d, radicand })))
    }

    pub fn d(&self) -> &Rational {
        &self.0.d
    }

    /// The element `rat + irr*sqrt(d)`.
    pub fn make(&self, rat: Rational, irr: Rational) -> QuadraticNumber {
        QuadraticNumber {
            rat,
            irr,
            ctx: self.clone(),
        }
    }

    pub fn from_rational(&self, r: Rational) -> QuadraticNumber {
        self.make(r, Rational::zero())
    }

    pub fn from_int(&self, n: i64) -> QuadraticNumber {
        self.from_rational(rat_i(n))
    }

    pub fn zero(&self) -> QuadraticNumber {
        self.from_int(0)
    }

    pub fn one(&self) -> QuadraticNumber {
        self.from_int(1)
    }

    pub fn sqrt_d(&self) -> QuadraticNumber {
        self.make(Rational::zero(), Rational::one())
    }

    /// Rational enclosure `lo <= sqrt(d) <= hi` with `hi - lo = 1/(denom(d)*2^k)`.
    /// Enclosures are nested as `k` grows.
    fn sqrt_d_bounds(&self, k: u32) -> (Rational, Rational) {
        // sqrt(p/q) = sqrt(p*q)/q; floor-isqrt of radicand*4^k gives the bounds.
        let scaled = &self.0.radicand << (2 * k as usize);
        let s = scaled.sqrt();
        let denom = self.0.d.denom() << (k as usize);
        let lo = Rational::new(s.clone(), denom.clone());
        let hi = Rational::new(s + 1, denom);
        (lo, hi)
    }
}

/// An element of Q[sqrt(d)]: `rat + irr*sqrt(d)` with a shared context.
///
/// Arithmetic between elements of different contexts is a caller bug and
/// panics; boundary code (JSON, CLI, FFI) validates contexts up front and
/// reports `FieldError::MixedContext` instead.
#[derive(Clone)]
pub struct QuadraticNumber {
    rat: Rational,
    irr: Rational,
    ctx: FieldContext,
}

impl fmt::Debug for QuadraticNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_qnum(self))
    }
}

impl fmt::Display for QuadraticNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_qnum(self))
    }
}

fn assert_same_ctx(a: &QuadraticNumber, b: &QuadraticNumber) {
    assert!(
        a.ctx == b.ctx,
        "mixed field contexts: sqrt({}) vs sqrt({})",
        format_rational(a.ctx.d()),
        format_rational(b.ctx.d()),
    );
}

impl QuadraticNumber {
    pub fn context(&self) -> &FieldContext {
        &self.ctx
    }

    pub fn rat_part(&self) -> &Rational {
        &self.rat
    }

    pub fn irr_part(&self) -> &Rational {
        &self.irr
    }

    pub fn is_rational(&self) -> bool {
        self.irr.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.irr.is_zero()
    }

    /// The rational value of a rational element; None when irr != 0.
    pub fn as_rational(&self) -> Option<&Rational> {
        if self.is_rational() {
            Some(&self.rat)
        } else {
            None
        }
    }

    /// The field automorphism `rat + irr*sqrt(d) -> rat - irr*sqrt(d)`.
    pub fn conjugate(&self) -> Self {
        self.ctx.make(self.rat.clone(), -self.irr.clone())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_same_ctx(self, other);
        self.ctx
            .make(&self.rat + &other.rat, &self.irr + &other.irr)
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_same_ctx(self, other);
        self.ctx
            .make(&self.rat - &other.rat, &self.irr - &other.irr)
    }

    pub fn neg(&self) -> Self {
        self.ctx.make(-self.rat.clone(), -self.irr.clone())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_same_ctx(self, other);
        let d = self.ctx.d();
        let rat = &self.rat * &other.rat + &self.irr * &other.irr * d;
        let irr = &self.rat * &other.irr + &self.irr * &other.rat;
        self.ctx.make(rat, irr)
    }

    pub fn mul_rat(&self, r: &Rational) -> Self {
        self.ctx.make(&self.rat * r, &self.irr * r)
    }

    pub fn div_rat(&self, r: &Rational) -> Self {
        assert!(!r.is_zero(), "division by zero rational");
        self.ctx.make(&self.rat / r, &self.irr / r)
    }

    /// Field norm `x * conj(x) = rat^2 - irr^2*d`; zero only for x = 0.
    pub fn norm(&self) -> Rational {
        &self.rat * &self.rat - &self.irr * &self.irr * self.ctx.d()
    }

    pub fn inv(&self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let n = self.norm();
        debug_assert!(!n.is_zero(), "nonzero element with zero norm");
        Ok(self.conjugate().div_rat(&n))
    }

    pub fn div(&self, other: &Self) -> Result<Self, FieldError> {
        assert_same_ctx(self, other);
        Ok(self.mul(&other.inv()?))
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }

    pub fn pow_u(&self, e: u32) -> Self {
        let mut acc = self.ctx.one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Exact sign (-1, 0, +1), decided by case analysis on the coefficient
    /// signs and an integer comparison of rat^2 against irr^2*d.
    pub fn sign(&self) -> i8 {
        let sr = sign_of(&self.rat);
        let si = sign_of(&self.irr);
        match (sr, si) {
            (_, 0) => sr,
            (0, _) => si,
            (1, 1) => 1,
            (-1, -1) => -1,
            // Opposite signs: |rat| vs |irr|*sqrt(d) squares exactly.
            _ => {
                let lhs = &self.rat * &self.rat;
                let rhs = &self.irr * &self.irr * self.ctx.d();
                match lhs.cmp(&rhs) {
                    Ordering::Greater => sr,
                    Ordering::Less => si,
                    Ordering::Equal => unreachable!("sqrt(d) rational"),
                }
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.sign() > 0
    }

    pub fn abs(&self) -> Self {
        if self.sign() < 0 {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Exact integer floor.
    pub fn floor_int(&self) -> BigInt {
        if self.is_rational() {
            return self.rat.floor().to_integer();
        }
        // Start from a float guess, then correct with exact comparisons.
        let guess = approx_f64(&self.rat) + approx_f64(&self.irr) * approx_f64(self.ctx.d()).sqrt();
        let mut n = BigInt::from(guess.floor() as i64);
        loop {
            let at = self.sub(&self.ctx.from_rational(Rational::from_integer(n.clone())));
            if at.sign() < 0 {
                n -= 1;
                continue;
            }
            let next = self.sub(&self.ctx.from_rational(Rational::from_integer(&n + 1)));
            if next.sign() >= 0 {
                n += 1;
                continue;
            }
            return n;
        }
    }

    /// Rational enclosure `[lo, hi]` with
    /// `hi - lo <= 2^(1-precision_bits) * max(1, |x|)`. Successive calls with
    /// higher precision yield nested enclosures; a rational element encloses
    /// itself exactly.
    pub fn to_interval(&self, precision_bits: u32) -> (Rational, Rational) {
        if self.irr.is_zero() {
            return (self.rat.clone(), self.rat.clone());
        }
        let mut k = precision_bits + 2;
        loop {
            let (slo, shi) = self.ctx.sqrt_d_bounds(k);
            let (mut lo, mut hi) = if self.irr.is_positive() {
                (&self.irr * &slo, &self.irr * &shi)
            } else {
                (&self.irr * &shi, &self.irr * &slo)
            };
            lo += &self.rat;
            hi += &self.rat;
            let width = &hi - &lo;
            let mag = if lo.is_negative() && hi.is_positive() {
                Rational::one()
            } else {
                let m = lo.abs().max(hi.abs());
                m.max(Rational::one())
            };
            // width <= 2^(1-p) * mag
            let bound = mag / pow2(precision_bits - 1);
            if width <= bound {
                return (lo, hi);
            }
            k += 32;
        }
    }

    pub fn approx(&self) -> f64 {
        approx_f64(&self.rat) + approx_f64(&self.irr) * approx_f64(self.ctx.d()).sqrt()
    }
}

fn sign_of(r: &Rational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

impl PartialEq for QuadraticNumber {
    fn eq(&self, other: &Self) -> bool {
        assert_same_ctx(self, other);
        self.rat == other.rat && self.irr == other.irr
    }
}
impl Eq for QuadraticNumber {}

impl PartialOrd for QuadraticNumber {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadraticNumber {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.sub(other).sign() {
            -1 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }
}

impl std::hash::Hash for QuadraticNumber {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.rat.hash(state);
        self.irr.hash(state);
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $imp:ident) => {
        impl std::ops::$trait for &QuadraticNumber {
            type Output = QuadraticNumber;
            fn $method(self, rhs: &QuadraticNumber) -> QuadraticNumber {
                QuadraticNumber::$imp(self, rhs)
            }
        }
        impl std::ops::$trait for QuadraticNumber {
            type Output = QuadraticNumber;
            fn $method(self, rhs: QuadraticNumber) -> QuadraticNumber {
                QuadraticNumber::$imp(&self, &rhs)
            }
        }
    };
}
binop!(Add, add, add);
binop!(Sub, sub, sub);
binop!(Mul, mul, mul);

impl std::ops::Neg for &QuadraticNumber {
    type Output = QuadraticNumber;
    fn neg(self) -> QuadraticNumber {
        QuadraticNumber::neg(self)
    }
}

/// Canonical text form: `p/q` for rational elements, otherwise
/// `p/q+r/s*sqrt(d)` (or `-` when the sqrt coefficient is negative).
pub fn format_qnum(x: &QuadraticNumber) -> String {
    if x.irr.is_zero() {
        return format_rational(&x.rat);
    }
    let sign = if x.irr.is_negative() { '-' } else { '+' };
    format!(
        "{}{}{}*sqrt({})",
        format_rational(&x.rat),
        sign,
        format_rational(&x.irr.abs()),
        format_rational(x.ctx.d())
    )
}

/// Parses `qnum ::= rational | rational ("+"|"-") rational "*sqrt(" rational ")"`,
/// checking that the sqrt argument matches the context.
pub fn parse_qnum(s: &str, ctx: &FieldContext) -> Result<QuadraticNumber, FieldError> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = |m: String| FieldError::Parse(m);
    if t.is_empty() {
        return Err(bad(format!("empty number in {s:?}")));
    }
    // Find the +/- separating the two terms: first sign not at position 0.
    let body = &t[1..];
    let split = body
        .char_indices()
        .find(|&(_, c)| c == '+' || c == '-')
        .map(|(i, c)| (i + 1, c));
    let (rat_str, rest) = match split {
        None => (t.as_str(), None),
        Some((i, c)) => (&t[..i], Some((c, &t[i + 1..]))),
    };
    let rat = parse_rational(rat_str)?;
    let Some((sign, irr_str)) = rest else {
        return Ok(ctx.from_rational(rat));
    };
    let Some((coef_str, sqrt_part)) = irr_str.split_once("*sqrt(") else {
        return Err(bad(format!(
            "expected rational*sqrt(rational) after the sign in {s:?}"
        )));
    };
    let Some(d_str) = sqrt_part.strip_suffix(')') else {
        return Err(bad(format!("missing closing parenthesis in {s:?}")));
    };
    let mut irr = parse_rational(coef_str)?;
    if sign == '-' {
        irr = -irr;
    }
    let d = parse_rational(d_str)?;
    if &d != ctx.d() {
        return Err(bad(format!(
            "sqrt argument {} does not match the field sqrt({})",
            format_rational(&d),
            format_rational(ctx.d())
        )));
    }
    Ok(ctx.make(rat, irr))
}
