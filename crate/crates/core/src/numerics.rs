//! Scalar domains shared by every stage of the pipeline.
//!
//! Exact values (Boolean sums, entries of the emitted integer matrix, the
//! recovery quotient) live in [`BigInt`], [`BigRational`] and [`Dyadic`].
//! Gate and mode-matrix entries with irrational values live in
//! [`HpComplex`], a complex number whose two parts are multiprecision floats
//! with one explicit precision shared by the whole computation.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::ops::Pow;
pub use rug::{Float, Integer as BigInt, Rational as BigRational};

use crate::error::{Error, Format, Result};

/// Mantissa precision, in bits, of every [`HpComplex`] in a computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Precision(u32);

impl Precision {
    pub const MIN_BITS: u32 = 53;
    pub const DEFAULT: Precision = Precision(128);
    /// Guard bits kept above the truncation width `b`.
    pub const GUARD_BITS: u32 = 64;

    pub fn new(bits: u32) -> Result<Self> {
        if bits < Self::MIN_BITS {
            return Err(Error::parse(
                Format::Precision,
                0,
                format!("precision {bits} is below the {}-bit floor", Self::MIN_BITS),
            ));
        }
        Ok(Precision(bits))
    }

    /// Working precision for a pipeline that truncates to `b` bits.
    pub fn for_truncation(b: u32) -> Self {
        Precision(Self::DEFAULT.0.max(b + Self::GUARD_BITS))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// The absolute tolerance `2^(slack - p)`.
    pub fn tolerance(self, slack: u32) -> Float {
        Float::with_val(64, Float::i_exp(1, slack as i32 - self.0 as i32))
    }

    /// `-log2` of [`Precision::tolerance`], for diagnostics.
    pub fn tolerance_exp(self, slack: u32) -> i64 {
        self.0 as i64 - slack as i64
    }
}

impl Default for Precision {
    fn default() -> Self {
        Self::DEFAULT
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Ring operations the permanent engines need, over any scalar domain.
///
/// `Ctx` carries whatever a domain needs to build constants; for floating
/// domains that is the precision, so an empty matrix still knows how to
/// produce its permanent `1`.
pub trait Scalar: Clone + fmt::Debug + Send + Sync {
    type Ctx: Copy + fmt::Debug + Send + Sync;

    fn ctx(&self) -> Self::Ctx;
    fn zero(ctx: Self::Ctx) -> Self;
    fn one(ctx: Self::Ctx) -> Self;
    fn from_i64(value: i64, ctx: Self::Ctx) -> Self;
    fn add_assign_ref(&mut self, rhs: &Self);
    fn sub_assign_ref(&mut self, rhs: &Self);
    fn mul_assign_ref(&mut self, rhs: &Self);
    fn neg_mut(&mut self);
    fn is_zero(&self) -> bool;
}

impl Scalar for BigInt {
    type Ctx = ();

    fn ctx(&self) {}
    fn zero(_: ()) -> Self {
        BigInt::new()
    }
    fn one(_: ()) -> Self {
        BigInt::from(1)
    }
    fn from_i64(value: i64, _: ()) -> Self {
        BigInt::from(value)
    }
    fn add_assign_ref(&mut self, rhs: &Self) {
        *self += rhs;
    }
    fn sub_assign_ref(&mut self, rhs: &Self) {
        *self -= rhs;
    }
    fn mul_assign_ref(&mut self, rhs: &Self) {
        *self *= rhs;
    }
    fn neg_mut(&mut self) {
        <BigInt as rug::ops::NegAssign>::neg_assign(self);
    }
    fn is_zero(&self) -> bool {
        self.cmp0() == Ordering::Equal
    }
}

impl Scalar for BigRational {
    type Ctx = ();

    fn ctx(&self) {}
    fn zero(_: ()) -> Self {
        BigRational::new()
    }
    fn one(_: ()) -> Self {
        BigRational::from(1)
    }
    fn from_i64(value: i64, _: ()) -> Self {
        BigRational::from(value)
    }
    fn add_assign_ref(&mut self, rhs: &Self) {
        *self += rhs;
    }
    fn sub_assign_ref(&mut self, rhs: &Self) {
        *self -= rhs;
    }
    fn mul_assign_ref(&mut self, rhs: &Self) {
        *self *= rhs;
    }
    fn neg_mut(&mut self) {
        <BigRational as rug::ops::NegAssign>::neg_assign(self);
    }
    fn is_zero(&self) -> bool {
        self.cmp0() == Ordering::Equal
    }
}

/// An exact dyadic rational `numerator / 2^exponent`.
///
/// Values built by [`round_to_dyadic`] share the exponent `b` of their
/// matrix; products add exponents and sums align to the larger one, so
/// arithmetic never rounds.
#[derive(Clone, Debug)]
pub struct Dyadic {
    numerator: BigInt,
    exponent: u32,
}

impl Dyadic {
    pub fn new(numerator: BigInt, exponent: u32) -> Self {
        Dyadic {
            numerator,
            exponent,
        }
    }

    pub fn from_int(value: impl Into<BigInt>) -> Self {
        Dyadic::new(value.into(), 0)
    }

    pub fn numerator(&self) -> &BigInt {
        &self.numerator
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn into_numerator(self) -> BigInt {
        self.numerator
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::from((self.numerator.clone(), BigInt::from(1) << self.exponent))
    }

    fn aligned(&self, exponent: u32) -> BigInt {
        BigInt::from(&self.numerator << (exponent - self.exponent))
    }
}

impl PartialEq for Dyadic {
    fn eq(&self, other: &Self) -> bool {
        let e = self.exponent.max(other.exponent);
        self.aligned(e) == other.aligned(e)
    }
}

impl Eq for Dyadic {}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.numerator, self.exponent)
    }
}

impl Scalar for Dyadic {
    type Ctx = ();

    fn ctx(&self) {}
    fn zero(_: ()) -> Self {
        Dyadic::from_int(0)
    }
    fn one(_: ()) -> Self {
        Dyadic::from_int(1)
    }
    fn from_i64(value: i64, _: ()) -> Self {
        Dyadic::from_int(value)
    }
    fn add_assign_ref(&mut self, rhs: &Self) {
        if rhs.exponent > self.exponent {
            self.numerator <<= rhs.exponent - self.exponent;
            self.exponent = rhs.exponent;
        }
        self.numerator += rhs.aligned(self.exponent);
    }
    fn sub_assign_ref(&mut self, rhs: &Self) {
        if rhs.exponent > self.exponent {
            self.numerator <<= rhs.exponent - self.exponent;
            self.exponent = rhs.exponent;
        }
        self.numerator -= rhs.aligned(self.exponent);
    }
    fn mul_assign_ref(&mut self, rhs: &Self) {
        self.numerator *= &rhs.numerator;
        self.exponent += rhs.exponent;
    }
    fn neg_mut(&mut self) {
        <BigInt as rug::ops::NegAssign>::neg_assign(&mut self.numerator);
    }
    fn is_zero(&self) -> bool {
        self.numerator.cmp0() == Ordering::Equal
    }
}

/// A complex number with multiprecision real and imaginary parts.
///
/// Both parts always carry the same precision.
#[derive(Clone, Debug, PartialEq)]
pub struct HpComplex {
    re: Float,
    im: Float,
}

impl HpComplex {
    pub fn new(prec: Precision, re: impl Into<Float>, im: impl Into<Float>) -> Self {
        let (mut re, mut im) = (re.into(), im.into());
        re.set_prec(prec.bits());
        im.set_prec(prec.bits());
        HpComplex { re, im }
    }

    pub fn real(prec: Precision, re: impl Into<Float>) -> Self {
        Self::new(prec, re, Float::new(prec.bits()))
    }

    pub fn from_f64(prec: Precision, re: f64, im: f64) -> Self {
        HpComplex {
            re: Float::with_val(prec.bits(), re),
            im: Float::with_val(prec.bits(), im),
        }
    }

    pub fn from_rational(prec: Precision, re: &BigRational) -> Self {
        HpComplex {
            re: Float::with_val(prec.bits(), re),
            im: Float::new(prec.bits()),
        }
    }

    /// `e^{i·k·π/8}`, which has closed-form square-root entries.
    pub fn eighth_root_phase(prec: Precision, k: i32) -> Self {
        let p = prec.bits();
        let k = k.rem_euclid(16);
        let (cos8, sin8) = pi_over_8(prec);
        let half = Float::with_val(p, 2).sqrt() / 2u32;
        // cos and sin of kπ/8 for k in 0..4; remaining octants by symmetry.
        let first = |j: i32| -> (Float, Float) {
            match j {
                0 => (Float::with_val(p, 1), Float::new(p)),
                1 => (cos8.clone(), sin8.clone()),
                2 => (half.clone(), half.clone()),
                3 => (sin8.clone(), cos8.clone()),
                _ => unreachable!(),
            }
        };
        let (re, im) = match k / 4 {
            0 => first(k),
            1 => {
                let (c, s) = first(k - 4);
                (-s, c)
            }
            2 => {
                let (c, s) = first(k - 8);
                (-c, -s)
            }
            _ => {
                let (c, s) = first(k - 12);
                (s, -c)
            }
        };
        HpComplex { re, im }
    }

    pub fn zero(prec: Precision) -> Self {
        HpComplex {
            re: Float::new(prec.bits()),
            im: Float::new(prec.bits()),
        }
    }

    pub fn one(prec: Precision) -> Self {
        Self::real(prec, Float::with_val(prec.bits(), 1))
    }

    pub fn i(prec: Precision) -> Self {
        Self::new(
            prec,
            Float::new(prec.bits()),
            Float::with_val(prec.bits(), 1),
        )
    }

    pub fn prec(&self) -> Precision {
        Precision(self.re.prec())
    }

    pub fn re(&self) -> &Float {
        &self.re
    }

    pub fn im(&self) -> &Float {
        &self.im
    }

    pub fn conj(&self) -> Self {
        HpComplex {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    pub fn scale(&self, factor: &Float) -> Self {
        let p = self.re.prec();
        HpComplex {
            re: Float::with_val(p, &self.re * factor),
            im: Float::with_val(p, &self.im * factor),
        }
    }

    pub fn norm_sqr(&self) -> Float {
        let p = self.re.prec();
        Float::with_val(p, self.re.square_ref()) + Float::with_val(p, self.im.square_ref())
    }

    pub fn abs(&self) -> Float {
        self.norm_sqr().sqrt()
    }

    /// `|self - other|`, the distance used by every tolerance check.
    pub fn dist(&self, other: &Self) -> Float {
        (self - other).abs()
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    /// Whether the imaginary part is within `tol` of zero.
    pub fn is_real_within(&self, tol: &Float) -> bool {
        self.im.cmp_abs(tol) != Some(Ordering::Greater)
    }
}

impl fmt::Display for HpComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(20);
        let re = self.re.to_string_radix(10, Some(digits));
        if self.im.is_zero() {
            return f.write_str(&re);
        }
        let sign = if self.im.is_sign_negative() { '-' } else { '+' };
        let im = Float::with_val(self.im.prec(), self.im.abs_ref());
        write!(f, "{re}{sign}{}i", im.to_string_radix(10, Some(digits)))
    }
}

impl<'a> Add<&'a HpComplex> for &'a HpComplex {
    type Output = HpComplex;
    fn add(self, rhs: &HpComplex) -> HpComplex {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
}

impl<'a> Sub<&'a HpComplex> for &'a HpComplex {
    type Output = HpComplex;
    fn sub(self, rhs: &HpComplex) -> HpComplex {
        let mut out = self.clone();
        out.sub_assign_ref(rhs);
        out
    }
}

impl<'a> Mul<&'a HpComplex> for &'a HpComplex {
    type Output = HpComplex;
    fn mul(self, rhs: &HpComplex) -> HpComplex {
        let mut out = self.clone();
        out.mul_assign_ref(rhs);
        out
    }
}

impl Neg for HpComplex {
    type Output = HpComplex;
    fn neg(mut self) -> HpComplex {
        self.neg_mut();
        self
    }
}

impl Scalar for HpComplex {
    type Ctx = Precision;

    fn ctx(&self) -> Precision {
        self.prec()
    }
    fn zero(ctx: Precision) -> Self {
        HpComplex::zero(ctx)
    }
    fn one(ctx: Precision) -> Self {
        HpComplex::one(ctx)
    }
    fn from_i64(value: i64, ctx: Precision) -> Self {
        HpComplex::real(ctx, Float::with_val(ctx.bits(), value))
    }
    fn add_assign_ref(&mut self, rhs: &Self) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
    fn sub_assign_ref(&mut self, rhs: &Self) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
    fn mul_assign_ref(&mut self, rhs: &Self) {
        // Pipeline matrices are real, so the purely real product is the hot path.
        if self.im.is_zero() && rhs.im.is_zero() {
            self.re *= &rhs.re;
            return;
        }
        let p = self.re.prec();
        let ac = Float::with_val(p, &self.re * &rhs.re);
        let bd = Float::with_val(p, &self.im * &rhs.im);
        let ad = Float::with_val(p, &self.re * &rhs.im);
        let bc = Float::with_val(p, &self.im * &rhs.re);
        self.re = ac - bd;
        self.im = ad + bc;
    }
    fn neg_mut(&mut self) {
        self.re = -std::mem::replace(&mut self.re, Float::new(2));
        self.im = -std::mem::replace(&mut self.im, Float::new(2));
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

/// `(cos π/8, sin π/8) = (√(2+√2)/2, √(2−√2)/2)`.
pub fn pi_over_8(prec: Precision) -> (Float, Float) {
    let p = prec.bits();
    let sqrt2 = Float::with_val(p, 2).sqrt();
    let cos = Float::with_val(p, 2 + sqrt2.clone()).sqrt() / 2u32;
    let sin = Float::with_val(p, 2 - sqrt2).sqrt() / 2u32;
    (cos, sin)
}

/// Nearest integer to `x`, ties rounded away from zero.
pub fn round_nearest_int(x: &BigRational) -> BigInt {
    let rounded = x.clone().round();
    rounded.numer().clone()
}

/// Rounds the real part of `x` to the nearest `k / 2^b`.
///
/// Fails when the imaginary part exceeds `imag_tol`; a pipeline matrix
/// that is not real means a miscompiled circuit.
pub fn round_to_dyadic(x: &HpComplex, b: u32, imag_tol: &Float) -> Result<Dyadic> {
    if !x.is_real_within(imag_tol) {
        return Err(Error::ImaginaryResidue {
            location: "dyadic rounding".into(),
            residue: x.im().to_f64(),
            tolerance_exp: -(imag_tol.get_exp().unwrap_or(0) as i64 - 1),
        });
    }
    let mut scaled = x.re().clone();
    scaled <<= b;
    let k = scaled
        .round()
        .to_integer()
        .ok_or_else(|| Error::invalid("non-finite matrix entry"))?;
    Ok(Dyadic::new(k, b))
}

/// `n!` as an exact integer.
pub fn factorial(n: u32) -> BigInt {
    BigInt::from(BigInt::factorial(n))
}

/// `2^e` as an exact integer.
pub fn pow2(e: u32) -> BigInt {
    BigInt::from(2).pow(e)
}

/// `⌈log2 x⌉` for a positive integer.
pub fn ceil_log2(x: &BigInt) -> u32 {
    debug_assert!(x.cmp0() == Ordering::Greater);
    let bits = x.significant_bits();
    if x.is_power_of_two() {
        bits - 1
    } else {
        bits
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::from((n, d))
    }

    #[test]
    fn round_nearest_examples() {
        assert_eq!(round_nearest_int(&q(3, 2)), 2);
        assert_eq!(round_nearest_int(&q(-3, 2)), -2);
        assert_eq!(round_nearest_int(&q(-7, 3)), -2);
        assert_eq!(round_nearest_int(&q(0, 1)), 0);
        assert_eq!(round_nearest_int(&q(5, 2)), 3);
    }

    #[test]
    fn round_to_dyadic_examples() {
        let p = Precision::DEFAULT;
        let tol = p.tolerance(40);
        let half = HpComplex::from_f64(p, 0.5, 0.0);
        let d = round_to_dyadic(&half, 3, &tol).unwrap();
        assert_eq!(d.numerator(), &4);
        assert_eq!(d.exponent(), 3);

        let third = HpComplex::from_rational(p, &q(1, 3));
        assert_eq!(round_to_dyadic(&third, 2, &tol).unwrap().numerator(), &1);

        let s = -(Float::with_val(p.bits(), 2).sqrt().recip());
        let x = HpComplex::real(p, s);
        let k = round_to_dyadic(&x, 10, &tol).unwrap().into_numerator();
        // Nearest of the three candidates around -1/√2 · 2^10.
        let target = -(2f64.sqrt().recip()) * 1024.0;
        let best = (-725..=-723)
            .min_by(|a, b| {
                (*a as f64 - target)
                    .abs()
                    .partial_cmp(&(*b as f64 - target).abs())
                    .unwrap()
            })
            .unwrap();
        assert_eq!(best, -724);
        assert_eq!(k, best);
    }

    #[test]
    fn round_to_dyadic_rejects_imaginary() {
        let p = Precision::DEFAULT;
        let x = HpComplex::from_f64(p, 0.5, 1e-10);
        let err = round_to_dyadic(&x, 8, &p.tolerance(40)).unwrap_err();
        assert!(matches!(err, Error::ImaginaryResidue { .. }));
    }

    #[test]
    fn precision_floor() {
        assert!(Precision::new(52).is_err());
        assert_eq!(Precision::new(53).unwrap().bits(), 53);
        assert_eq!(Precision::for_truncation(11).bits(), 128);
        assert_eq!(Precision::for_truncation(100).bits(), 164);
    }

    #[test]
    fn eighth_root_phases() {
        let p = Precision::DEFAULT;
        let tol = p.tolerance(40);
        for k in -16..32 {
            let z = HpComplex::eighth_root_phase(p, k);
            let angle = k as f64 * std::f64::consts::PI / 8.0;
            let (re, im) = z.to_f64_pair();
            assert!((re - angle.cos()).abs() < 1e-12 && (im - angle.sin()).abs() < 1e-12);
            let unit = z.norm_sqr() - 1u32;
            assert!(unit.abs() < tol);
        }
    }

    #[test]
    fn complex_product() {
        let p = Precision::DEFAULT;
        let a = HpComplex::from_f64(p, 1.0, 2.0);
        let b = HpComplex::from_f64(p, 3.0, -1.0);
        assert_eq!((&a * &b).to_f64_pair(), (5.0, 5.0));
        let i = HpComplex::i(p);
        assert_eq!((&i * &i).to_f64_pair(), (-1.0, 0.0));
    }

    #[test]
    fn ceil_log2_exact() {
        assert_eq!(ceil_log2(&BigInt::from(1)), 0);
        assert_eq!(ceil_log2(&BigInt::from(768)), 10);
        assert_eq!(ceil_log2(&BigInt::from(1024)), 10);
        assert_eq!(ceil_log2(&BigInt::from(1025)), 11);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn dyadic() -> impl Strategy<Value = Dyadic> {
            (any::<i64>(), 0u32..80).prop_map(|(n, e)| Dyadic::new(BigInt::from(n), e))
        }

        proptest! {
            #[test]
            fn dyadic_add_sub_round_trips(a in dyadic(), b in dyadic()) {
                let mut s = a.clone();
                s.add_assign_ref(&b);
                s.sub_assign_ref(&b);
                prop_assert_eq!(s, a);
            }

            #[test]
            fn dyadic_matches_rational(a in dyadic(), b in dyadic()) {
                let mut prod = a.clone();
                prod.mul_assign_ref(&b);
                let mut sum = a.clone();
                sum.add_assign_ref(&b);
                prop_assert_eq!(prod.to_rational(), a.to_rational() * b.to_rational());
                prop_assert_eq!(sum.to_rational(), a.to_rational() + b.to_rational());
            }

            #[test]
            fn rational_add_sub_round_trips(an in any::<i64>(), ad in 1i64..1_000_000, bn in any::<i64>(), bd in 1i64..1_000_000) {
                let a = BigRational::from((an, ad));
                let b = BigRational::from((bn, bd));
                prop_assert_eq!(BigRational::from(&a + &b) - &b, a);
            }

            #[test]
            fn dyadic_rounding_error_bound(x in -4.0f64..4.0, b in 0u32..60) {
                let p = Precision::DEFAULT;
                let z = HpComplex::from_f64(p, x, 0.0);
                let d = round_to_dyadic(&z, b, &p.tolerance(40)).unwrap();
                let err = (d.to_rational() - BigRational::from_f64(x).unwrap()).abs();
                prop_assert!(err <= BigRational::from((1, pow2(b + 1))));
            }
        }
    }
}
