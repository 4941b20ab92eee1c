//! Capped-precision arithmetic in the unramified extension W(F_{p^k}) of Z_p.
//!
//! Elements are stored as `p^scale * y` where `y` lives in
//! `(Z/p^rel)[x]/(h)` and is a unit (some coefficient prime to p). The value
//! is known modulo `p^(scale + rel)`; `rel` never exceeds the context's
//! working precision. `rel == 0` encodes a zero known only to absolute
//! precision `scale`, which is distinct from the tagged exact zero.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{add_mod, floor_log, inv_mod, mul_mod, poly_mul_mod, reduce_i64, sub_mod, vp};
use crate::error::{Error, Result};
use crate::finite::{FiniteField, FpkElement};

/// Absolute precision reported for exact values.
pub const INFINITE_PRECISION: i64 = i64::MAX;

/// W(F_{p^k}) / p^A modelled as `(Z/p^A)[x]/(h)`, where `h` is the lift of
/// the field modulus with coefficients in `[0, p)`.
#[derive(Debug, PartialEq, Eq)]
pub struct UnramifiedCtx {
    field: Arc<FiniteField>,
    precision: u32,
    powers: Vec<u64>,
}

impl UnramifiedCtx {
    pub fn p(&self) -> u64 {
        self.field.p()
    }

    pub fn degree(&self) -> usize {
        self.field.degree()
    }

    /// Working precision `A`: the cap on relative digits.
    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        &self.field
    }

    /// Low coefficients of the monic modulus `h`.
    pub fn modulus(&self) -> &[u64] {
        self.field.modulus()
    }

    /// `p^e` for `0 <= e <= A`.
    pub fn p_pow(&self, e: u32) -> u64 {
        self.powers[e as usize]
    }

    fn mul_poly(&self, a: &[u64], b: &[u64], rel: u32) -> Vec<u64> {
        poly_mul_mod(a, b, self.field.modulus(), self.p_pow(rel))
    }

    /// Inverse of a unit `y` in `(Z/p^rel)[x]/(h)`: invert mod p in the
    /// residue field, then Newton-lift `x -> x (2 - y x)`.
    fn unit_inverse(&self, y: &[u64], rel: u32) -> Vec<u64> {
        let residue = FpkElement::new(&self.field, y).expect("degree matches");
        let mut x: Vec<u64> = residue.inv().expect("unit").coeffs().to_vec();
        let mut known = 1u32;
        while known < rel {
            known = (2 * known).min(rel);
            let m = self.p_pow(known);
            let yx = poly_mul_mod(y, &x, self.field.modulus(), m);
            let mut two_minus: Vec<u64> = yx.iter().map(|&c| sub_mod(0, c % m, m)).collect();
            two_minus[0] = add_mod(two_minus[0], 2, m);
            x = poly_mul_mod(&x, &two_minus, self.field.modulus(), m);
        }
        let m = self.p_pow(rel);
        x.iter().map(|c| c % m).collect()
    }
}

/// Builds the context for W(F_{p^k}) mod p^A.
pub fn make_ctx(p: u64, k: usize, precision: u32) -> Result<Arc<UnramifiedCtx>> {
    let field = FiniteField::new(p, k)?;
    ctx_for_field(field, precision)
}

pub fn ctx_for_field(field: Arc<FiniteField>, precision: u32) -> Result<Arc<UnramifiedCtx>> {
    if precision == 0 {
        return Err(Error::BadPrecision);
    }
    let p = field.p();
    let mut powers = vec![1u64];
    for _ in 0..precision {
        let next = powers
            .last()
            .unwrap()
            .checked_mul(p)
            .filter(|&v| v < (1 << 62))
            .ok_or(Error::PrecisionTooLarge { p, precision })?;
        powers.push(next);
    }
    Ok(Arc::new(UnramifiedCtx { field, precision, powers }))
}

#[derive(Clone)]
pub struct WittApprox {
    ctx: Arc<UnramifiedCtx>,
    scale: i64,
    rel: u32,
    unit: Vec<u64>,
    exact_zero: bool,
}

impl fmt::Debug for WittApprox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exact_zero {
            write!(f, "0")
        } else if self.rel == 0 {
            write!(f, "O(p^{})", self.scale)
        } else {
            write!(f, "p^{}*{:?} + O(p^{})", self.scale, self.unit, self.scale + self.rel as i64)
        }
    }
}

/// JSON-compatible record of a [`WittApprox`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct WittRecord {
    pub p: u64,
    pub k: usize,
    #[serde(rename = "A")]
    pub a: u32,
    pub scale: i64,
    /// Relative digits known; `null` for the exact zero.
    pub precision: Option<u32>,
    pub coeffs: Vec<u64>,
}

impl WittApprox {
    fn raw(ctx: &Arc<UnramifiedCtx>, scale: i64, rel: u32, unit: Vec<u64>) -> Self {
        WittApprox { ctx: ctx.clone(), scale, rel, unit, exact_zero: false }
    }

    pub fn zero(ctx: &Arc<UnramifiedCtx>) -> Self {
        WittApprox { ctx: ctx.clone(), scale: 0, rel: 0, unit: vec![0; ctx.degree()], exact_zero: true }
    }

    /// Zero known modulo `p^abs` only.
    pub fn approx_zero(ctx: &Arc<UnramifiedCtx>, abs: i64) -> Self {
        Self::raw(ctx, abs, 0, vec![0; ctx.degree()])
    }

    pub fn one(ctx: &Arc<UnramifiedCtx>) -> Self {
        Self::from_int(ctx, 1)
    }

    pub fn from_int(ctx: &Arc<UnramifiedCtx>, n: i64) -> Self {
        if n == 0 {
            return Self::zero(ctx);
        }
        let p = ctx.p();
        let v = vp(n.unsigned_abs(), p);
        let mut unit_part = n;
        for _ in 0..v {
            unit_part /= p as i64;
        }
        let mut coeffs = vec![0; ctx.degree()];
        coeffs[0] = reduce_i64(unit_part, ctx.p_pow(ctx.precision));
        Self::raw(ctx, v as i64, ctx.precision, coeffs)
    }

    /// `p^scale * y` with `y` given by residues mod `p^A`, normalized.
    pub fn from_coeffs(ctx: &Arc<UnramifiedCtx>, scale: i64, coeffs: &[u64]) -> Result<Self> {
        Self::from_coeffs_with_precision(ctx, scale, coeffs, ctx.precision)
    }

    /// `p^scale * y` where `y` is known modulo `p^rel` only.
    pub fn from_coeffs_with_precision(
        ctx: &Arc<UnramifiedCtx>,
        scale: i64,
        coeffs: &[u64],
        rel: u32,
    ) -> Result<Self> {
        if coeffs.len() != ctx.degree() {
            return Err(Error::InvalidArgument(format!(
                "expected {} coefficients, got {}",
                ctx.degree(),
                coeffs.len()
            )));
        }
        let rel = rel.min(ctx.precision);
        let m = ctx.p_pow(rel);
        let y: Vec<u64> = coeffs.iter().map(|c| c % m).collect();
        Ok(Self::normalized(ctx, scale, y, rel))
    }

    /// Lift of a residue-field element with digits in `[0, p)`.
    pub fn lift(ctx: &Arc<UnramifiedCtx>, a: &FpkElement) -> Self {
        Self::from_coeffs(ctx, 0, a.coeffs()).expect("same degree")
    }

    /// Embeds an exact rational number.
    pub fn from_rational(ctx: &Arc<UnramifiedCtx>, q: &BigRational) -> Result<Self> {
        let s = PadicApprox::from_rational(ctx.p(), ctx.precision, q)?;
        Ok(s.to_witt(ctx))
    }

    fn normalized(ctx: &Arc<UnramifiedCtx>, scale: i64, mut y: Vec<u64>, rel: u32) -> Self {
        let p = ctx.p();
        let v = y.iter().map(|&c| vp(c, p)).min().unwrap_or(u32::MAX).min(rel);
        if v >= rel {
            return Self::approx_zero(ctx, scale + rel as i64);
        }
        if v > 0 {
            let d = ctx.p_pow(v);
            for c in y.iter_mut() {
                *c /= d;
            }
        }
        let new_rel = rel - v;
        let m = ctx.p_pow(new_rel);
        for c in y.iter_mut() {
            *c %= m;
        }
        Self::raw(ctx, scale + v as i64, new_rel, y)
    }

    pub fn ctx(&self) -> &Arc<UnramifiedCtx> {
        &self.ctx
    }

    pub fn is_exact_zero(&self) -> bool {
        self.exact_zero
    }

    /// True when the value is zero to its certified precision.
    pub fn is_zero(&self) -> bool {
        self.exact_zero || self.rel == 0
    }

    /// Scale exponent; for a nonzero value this is its valuation.
    pub fn scale(&self) -> i64 {
        self.scale
    }

    /// Relative digits of the unit part.
    pub fn relative_precision(&self) -> u32 {
        self.rel
    }

    pub fn unit_coeffs(&self) -> &[u64] {
        &self.unit
    }

    /// Exact valuation, when certified (`None` for any kind of zero).
    pub fn valuation(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.scale)
    }

    /// A certified lower bound on the valuation.
    pub fn valuation_lower_bound(&self) -> i64 {
        if self.exact_zero {
            INFINITE_PRECISION
        } else {
            self.scale
        }
    }

    /// The value is known modulo `p^abs_precision()`.
    pub fn abs_precision(&self) -> i64 {
        if self.exact_zero {
            INFINITE_PRECISION
        } else {
            self.scale + self.rel as i64
        }
    }

    /// Forget digits beyond absolute precision `abs`.
    pub fn cap_precision(&self, abs: i64) -> Self {
        if abs >= self.abs_precision() {
            return self.clone();
        }
        if abs <= self.valuation_lower_bound() {
            return Self::approx_zero(&self.ctx, abs);
        }
        let rel = (abs - self.scale) as u32;
        let m = self.ctx.p_pow(rel);
        let y = self.unit.iter().map(|c| c % m).collect();
        Self::raw(&self.ctx, self.scale, rel, y)
    }

    /// Multiply by `p^e` (exact).
    pub fn shift(&self, e: i64) -> Self {
        if self.exact_zero {
            return self.clone();
        }
        let mut out = self.clone();
        out.scale += e;
        out
    }

    fn check_ctx(&self, other: &Self) {
        assert!(
            Arc::ptr_eq(&self.ctx, &other.ctx) || self.ctx == other.ctx,
            "{}",
            Error::ContextMismatch
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_ctx(other);
        if self.exact_zero {
            return other.clone();
        }
        if other.exact_zero {
            return self.clone();
        }
        let abs = self.abs_precision().min(other.abs_precision());
        let s = self.scale.min(other.scale);
        if abs <= s {
            return Self::approx_zero(&self.ctx, abs);
        }
        let r = (abs - s) as u32;
        let m = self.ctx.p_pow(r);
        let mut y = vec![0u64; self.ctx.degree()];
        for x in [self, other] {
            let shift = x.scale - s;
            if x.rel == 0 || shift >= r as i64 {
                continue;
            }
            let f = self.ctx.p_pow(shift as u32);
            for (acc, &c) in y.iter_mut().zip(&x.unit) {
                *acc = add_mod(*acc, mul_mod(c, f, m), m);
            }
        }
        Self::normalized(&self.ctx, s, y, r)
    }

    pub fn neg(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let m = self.ctx.p_pow(self.rel);
        let y = self.unit.iter().map(|&c| sub_mod(0, c, m)).collect();
        Self::raw(&self.ctx, self.scale, self.rel, y)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_ctx(other);
        if self.exact_zero || other.exact_zero {
            return Self::zero(&self.ctx);
        }
        let scale = self.scale + other.scale;
        let rel = self.rel.min(other.rel);
        if rel == 0 {
            return Self::approx_zero(&self.ctx, scale);
        }
        let m = self.ctx.p_pow(rel);
        let a: Vec<u64> = self.unit.iter().map(|c| c % m).collect();
        let b: Vec<u64> = other.unit.iter().map(|c| c % m).collect();
        Self::raw(&self.ctx, scale, rel, self.ctx.mul_poly(&a, &b, rel))
    }

    pub fn mul_int(&self, n: i64) -> Self {
        self.mul(&Self::from_int(&self.ctx, n))
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let y = self.ctx.unit_inverse(&self.unit, self.rel);
        Ok(Self::raw(&self.ctx, -self.scale, self.rel, y))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn div_int(&self, n: i64) -> Result<Self> {
        self.div(&Self::from_int(&self.ctx, n))
    }

    pub fn pow(&self, mut exp: u64) -> Self {
        let mut acc = Self::one(&self.ctx);
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base);
            }
            exp >>= 1;
            if exp > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Reduction mod p of an integral element.
    pub fn residue(&self) -> Result<FpkElement> {
        let field = self.ctx.field();
        if self.exact_zero {
            return Ok(FpkElement::zero(field));
        }
        if self.scale < 0 {
            return Err(Error::NotIntegral(self.scale));
        }
        if self.abs_precision() < 1 {
            return Err(Error::PrecisionExhausted(self.abs_precision()));
        }
        if self.scale > 0 {
            return Ok(FpkElement::zero(field));
        }
        FpkElement::new(field, &self.unit)
    }

    /// Coefficients of an integral element modulo `p^e`, `e <= abs_precision()`.
    pub fn coeffs_mod(&self, e: u32) -> Result<Vec<u64>> {
        let k = self.ctx.degree();
        if self.exact_zero {
            return Ok(vec![0; k]);
        }
        if self.scale < 0 {
            return Err(Error::NotIntegral(self.scale));
        }
        if (e as i64) > self.abs_precision() {
            return Err(Error::PrecisionExhausted(self.abs_precision()));
        }
        if self.scale >= e as i64 || self.rel == 0 {
            return Ok(vec![0; k]);
        }
        let m = self.ctx.p_pow(e);
        let f = self.ctx.p_pow(self.scale as u32);
        Ok(self.unit.iter().map(|&c| mul_mod(c % m, f, m)).collect())
    }

    /// Digits to which `self` and `other` provably agree: `Ok(d)` when the
    /// difference is zero to certified precision `d`, `Err(v)` when the
    /// difference is certified nonzero with valuation `v`.
    pub fn agreement(&self, other: &Self) -> std::result::Result<i64, i64> {
        let d = self.sub(other);
        if d.is_zero() {
            Ok(d.abs_precision())
        } else {
            Err(d.scale)
        }
    }

    pub fn to_record(&self) -> WittRecord {
        WittRecord {
            p: self.ctx.p(),
            k: self.ctx.degree(),
            a: self.ctx.precision,
            scale: self.scale,
            precision: (!self.exact_zero).then_some(self.rel),
            coeffs: self.unit.clone(),
        }
    }

    pub fn from_record(ctx: &Arc<UnramifiedCtx>, record: &WittRecord) -> Result<Self> {
        if record.p != ctx.p() || record.k != ctx.degree() {
            return Err(Error::ContextMismatch);
        }
        match record.precision {
            None => Ok(Self::zero(ctx)),
            Some(rel) => Self::from_coeffs_with_precision(ctx, record.scale, &record.coeffs, rel),
        }
    }
}

/// Teichmüller lift: the root of unity congruent to `a`, as the fixed point
/// of `x -> x^{p^k}` reached after `A` iterations from any lift.
pub fn teichmuller(ctx: &Arc<UnramifiedCtx>, a: &FpkElement) -> Result<WittApprox> {
    if a.is_zero() {
        return Err(Error::TeichmullerOfZero);
    }
    let mut x = WittApprox::lift(ctx, a);
    for _ in 0..ctx.precision() {
        for _ in 0..ctx.degree() {
            x = x.pow(ctx.p());
        }
    }
    Ok(x)
}

/// Number of terms of the logarithm series: `A + floor(log_p A) + 1`.
pub fn log_truncation(ctx: &UnramifiedCtx) -> u64 {
    let a = ctx.precision() as u64;
    a + floor_log(a, ctx.p()) as u64 + 1
}

/// `log(u) = sum_{m >= 1} (-1)^{m+1} (u - 1)^m / m` for `u = 1 mod p`.
pub fn padic_log(u: &WittApprox) -> Result<WittApprox> {
    let ctx = u.ctx();
    let d = u.sub(&WittApprox::one(ctx));
    if d.is_exact_zero() {
        return Ok(WittApprox::zero(ctx));
    }
    let v = d.valuation_lower_bound();
    if v < 1 {
        return Err(Error::LogDomain);
    }
    let terms = log_truncation(ctx);
    let mut sum = WittApprox::zero(ctx);
    let mut power = WittApprox::one(ctx);
    for m in 1..=terms {
        power = power.mul(&d);
        let term = power.div_int(m as i64)?;
        sum = if m % 2 == 1 { sum.add(&term) } else { sum.sub(&term) };
    }
    // m*v - v_p(m) is nondecreasing, so the first omitted term bounds the tail
    let next = terms + 1;
    let tail = next as i64 * v - floor_log(next, ctx.p()) as i64;
    Ok(sum.cap_precision(tail))
}

/// An element of Q_p known as `p^v * unit + O(p^{v + rel})`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PadicApprox {
    p: u64,
    valuation: i64,
    unit: u64,
    rel: u32,
    exact_zero: bool,
}

impl PadicApprox {
    pub fn zero(p: u64) -> Self {
        PadicApprox { p, valuation: 0, unit: 0, rel: 0, exact_zero: true }
    }

    fn modulus(p: u64, rel: u32) -> u64 {
        p.checked_pow(rel).expect("relative precision fits in u64")
    }

    pub fn from_int(p: u64, rel: u32, n: i64) -> Self {
        if n == 0 {
            return Self::zero(p);
        }
        let v = vp(n.unsigned_abs(), p);
        let mut u = n;
        for _ in 0..v {
            u /= p as i64;
        }
        PadicApprox { p, valuation: v as i64, unit: reduce_i64(u, Self::modulus(p, rel)), rel, exact_zero: false }
    }

    pub fn from_rational(p: u64, rel: u32, q: &BigRational) -> Result<Self> {
        if q.is_zero() {
            return Ok(Self::zero(p));
        }
        let pb = BigInt::from(p);
        let (mut num, mut den) = (q.numer().clone(), q.denom().clone());
        let mut v = 0i64;
        while (&num % &pb).is_zero() {
            num /= &pb;
            v += 1;
        }
        while (&den % &pb).is_zero() {
            den /= &pb;
            v -= 1;
        }
        let m = Self::modulus(p, rel);
        let mb = BigInt::from(m);
        let reduce = |x: &BigInt| -> u64 {
            let r = ((x % &mb) + &mb) % &mb;
            r.abs().to_u64().expect("reduced below modulus")
        };
        let den_inv = inv_mod(reduce(&den), m).ok_or_else(|| Error::NonIntegralRational(q.to_string()))?;
        let unit = mul_mod(reduce(&num), den_inv, m);
        Ok(PadicApprox { p, valuation: v, unit, rel, exact_zero: false })
    }

    /// Like [`Self::from_rational`] but rejects any power of p in the denominator.
    pub fn from_integral_rational(p: u64, rel: u32, q: &BigRational) -> Result<Self> {
        let s = Self::from_rational(p, rel, q)?;
        if !s.exact_zero && s.valuation < 0 {
            return Err(Error::NonIntegralRational(q.to_string()));
        }
        Ok(s)
    }

    pub fn valuation(&self) -> Option<i64> {
        (!self.exact_zero && self.rel > 0).then_some(self.valuation)
    }

    pub fn unit(&self) -> u64 {
        self.unit
    }

    pub fn abs_precision(&self) -> i64 {
        if self.exact_zero {
            INFINITE_PRECISION
        } else {
            self.valuation + self.rel as i64
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.exact_zero || other.exact_zero {
            return Self::zero(self.p);
        }
        let rel = self.rel.min(other.rel);
        let m = Self::modulus(self.p, rel);
        PadicApprox {
            p: self.p,
            valuation: self.valuation + other.valuation,
            unit: mul_mod(self.unit % m, other.unit % m, m),
            rel,
            exact_zero: false,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.exact_zero {
            return *other;
        }
        if other.exact_zero {
            return *self;
        }
        let abs = self.abs_precision().min(other.abs_precision());
        let s = self.valuation.min(other.valuation);
        if abs <= s {
            return PadicApprox { p: self.p, valuation: abs, unit: 0, rel: 0, exact_zero: false };
        }
        let r = (abs - s) as u32;
        let m = Self::modulus(self.p, r);
        let mut y = 0u64;
        for x in [self, other] {
            let shift = x.valuation - s;
            if x.rel > 0 && shift < r as i64 {
                y = add_mod(y, mul_mod(x.unit % m, Self::modulus(self.p, shift as u32), m), m);
            }
        }
        let v = vp(y, self.p).min(r);
        if v >= r {
            return PadicApprox { p: self.p, valuation: abs, unit: 0, rel: 0, exact_zero: false };
        }
        let rel = r - v;
        PadicApprox {
            p: self.p,
            valuation: s + v as i64,
            unit: (y / Self::modulus(self.p, v)) % Self::modulus(self.p, rel),
            rel,
            exact_zero: false,
        }
    }

    pub fn neg(&self) -> Self {
        if self.exact_zero || self.rel == 0 {
            return *self;
        }
        let m = Self::modulus(self.p, self.rel);
        PadicApprox { unit: sub_mod(0, self.unit, m), ..*self }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.exact_zero || self.rel == 0 {
            return Err(Error::DivisionByZero);
        }
        let m = Self::modulus(self.p, self.rel);
        let unit = inv_mod(self.unit, m).ok_or(Error::DivisionByZero)?;
        Ok(PadicApprox { valuation: -self.valuation, unit, ..*self })
    }

    /// Residue mod p of an integral element.
    pub fn residue(&self) -> Result<u64> {
        if self.exact_zero {
            return Ok(0);
        }
        if self.valuation < 0 {
            return Err(Error::NotIntegral(self.valuation));
        }
        if self.abs_precision() < 1 {
            return Err(Error::PrecisionExhausted(self.abs_precision()));
        }
        Ok(if self.valuation > 0 { 0 } else { self.unit % self.p })
    }

    /// Embedding Q_p -> W(F_{p^k}) (constant polynomial).
    pub fn to_witt(&self, ctx: &Arc<UnramifiedCtx>) -> WittApprox {
        assert_eq!(self.p, ctx.p(), "prime mismatch");
        if self.exact_zero {
            return WittApprox::zero(ctx);
        }
        if self.rel == 0 {
            return WittApprox::approx_zero(ctx, self.valuation);
        }
        let mut coeffs = vec![0; ctx.degree()];
        coeffs[0] = self.unit;
        WittApprox::from_coeffs_with_precision(ctx, self.valuation, &coeffs, self.rel)
            .expect("degree matches")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z625() -> Arc<UnramifiedCtx> {
        make_ctx(5, 1, 4).unwrap()
    }

    #[test]
    fn ctx_construction() {
        let ctx = make_ctx(5, 2, 4).unwrap();
        assert_eq!(ctx.modulus(), &[1, 1]);
        assert_eq!(ctx.p_pow(4), 625);
        assert_eq!(make_ctx(5, 1, 4).unwrap().modulus(), &[0]);
        assert_eq!(make_ctx(4, 1, 4).unwrap_err(), Error::NotOddPrime(4));
        assert_eq!(make_ctx(5, 0, 4).unwrap_err(), Error::BadDegree);
        assert_eq!(make_ctx(5, 1, 0).unwrap_err(), Error::BadPrecision);
        assert!(matches!(make_ctx(13, 1, 40), Err(Error::PrecisionTooLarge { .. })));
    }

    #[test]
    fn small_inverses() {
        let ctx = z625();
        let one = WittApprox::one(&ctx);
        assert_eq!(one.inv().unwrap().coeffs_mod(4).unwrap(), vec![1]);
        let two = WittApprox::from_int(&ctx, 2);
        assert_eq!(two.inv().unwrap().coeffs_mod(4).unwrap(), vec![313]);
        assert_eq!(WittApprox::zero(&ctx).inv().unwrap_err(), Error::DivisionByZero);
        assert_eq!(WittApprox::approx_zero(&ctx, 3).inv().unwrap_err(), Error::DivisionByZero);
    }

    #[test]
    fn scale_bookkeeping() {
        let ctx = z625();
        let a = WittApprox::from_int(&ctx, 5 * 3);
        let b = WittApprox::from_int(&ctx, 7).div_int(5).unwrap();
        assert_eq!(b.scale(), -1);
        let c = a.mul(&b);
        assert_eq!(c.scale(), 0);
        assert_eq!(c.coeffs_mod(4).unwrap(), vec![21]);
        assert_eq!(c.abs_precision(), 4);
    }

    #[test]
    fn cancellation_loses_precision() {
        let ctx = z625();
        let a = WittApprox::from_int(&ctx, 26);
        let b = WittApprox::one(&ctx);
        let d = a.sub(&b);
        assert_eq!(d.scale(), 2);
        assert_eq!(d.abs_precision(), 4);
        let z = a.sub(&a);
        assert!(z.is_zero() && !z.is_exact_zero());
        assert_eq!(z.abs_precision(), 4);
    }

    #[test]
    fn teichmuller_examples() {
        let ctx = make_ctx(5, 1, 2).unwrap();
        let f = ctx.field().clone();
        let t = teichmuller(&ctx, &FpkElement::from_int(&f, 2)).unwrap();
        assert_eq!(t.coeffs_mod(2).unwrap(), vec![7]);
        let ctx = z625();
        let f = ctx.field().clone();
        let one = teichmuller(&ctx, &FpkElement::one(&f)).unwrap();
        assert_eq!(one.coeffs_mod(4).unwrap(), vec![1]);
        let m1 = teichmuller(&ctx, &FpkElement::from_int(&f, -1)).unwrap();
        assert_eq!(m1.coeffs_mod(4).unwrap(), vec![624]);
        assert_eq!(teichmuller(&ctx, &FpkElement::zero(&f)).unwrap_err(), Error::TeichmullerOfZero);
    }

    #[test]
    fn teichmuller_is_root_of_unity_exhaustive() {
        for (p, k) in [(3u64, 2usize), (5, 1), (5, 2), (7, 2), (11, 2), (11, 1)] {
            let ctx = make_ctx(p, k, 5).unwrap();
            let q = ctx.field().order();
            let f = ctx.field().clone();
            for a in FpkElement::all(&f).filter(|a| !a.is_zero()) {
                let t = teichmuller(&ctx, &a).unwrap();
                assert_eq!(t.residue().unwrap(), a);
                let one = t.pow(q - 1);
                assert_eq!(one.agreement(&WittApprox::one(&ctx)), Ok(5));
            }
        }
    }

    #[test]
    fn log_examples() {
        let ctx = z625();
        let l1 = padic_log(&WittApprox::one(&ctx)).unwrap();
        assert!(l1.is_zero() && l1.abs_precision() >= 4);
        let six = WittApprox::from_int(&ctx, 6);
        let l = padic_log(&six).unwrap();
        assert_eq!(l.coeffs_mod(4).unwrap(), vec![555]);
        assert_eq!(l.coeffs_mod(2).unwrap(), vec![5]);
        assert_eq!(padic_log(&WittApprox::from_int(&ctx, 2)).unwrap_err(), Error::LogDomain);
    }

    #[test]
    fn log_truncation_formula() {
        assert_eq!(log_truncation(&make_ctx(5, 1, 4).unwrap()), 5);
        assert_eq!(log_truncation(&make_ctx(5, 1, 5).unwrap()), 7);
        assert_eq!(log_truncation(&make_ctx(3, 1, 9).unwrap()), 12);
    }

    #[test]
    fn residues() {
        let ctx = make_ctx(7, 2, 3).unwrap();
        assert!(WittApprox::one(&ctx).residue().unwrap().is_one());
        assert!(WittApprox::from_int(&ctx, 14).residue().unwrap().is_zero());
        let neg = WittApprox::from_int(&ctx, 1).div_int(7).unwrap();
        assert_eq!(neg.residue().unwrap_err(), Error::NotIntegral(-1));
    }

    #[test]
    fn padic_scalar_arithmetic() {
        let q = BigRational::new(BigInt::from(-1), BigInt::from(2));
        let h = PadicApprox::from_rational(5, 4, &q).unwrap();
        assert_eq!(h.unit(), 312);
        assert_eq!(h.residue().unwrap(), 2);
        let third = PadicApprox::from_rational(5, 4, &BigRational::new(1.into(), 15.into())).unwrap();
        assert_eq!(third.valuation(), Some(-1));
        assert!(PadicApprox::from_integral_rational(5, 4, &BigRational::new(1.into(), 15.into())).is_err());
        let s = h.add(&h);
        assert_eq!(s.unit(), 624);
        let x = PadicApprox::from_int(5, 4, 26).add(&PadicApprox::from_int(5, 4, -1));
        assert_eq!(x.valuation(), Some(2));
        assert_eq!(x.abs_precision(), 4);
        assert_eq!(h.mul(&h.inv().unwrap()).unit(), 1);
    }

    #[test]
    fn record_roundtrip() {
        let ctx = make_ctx(7, 2, 5).unwrap();
        let x = WittApprox::from_coeffs(&ctx, -2, &[14, 3]).unwrap();
        let back = WittApprox::from_record(&ctx, &x.to_record()).unwrap();
        assert_eq!(back.agreement(&x), Ok(back.abs_precision()));
        assert_eq!(x.scale(), -2);
    }
}
