//! Truncated power series over W(F_{p^k}) with a certified bound on the
//! valuations of the discarded coefficients.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::padic::{UnramifiedCtx, WittApprox, INFINITE_PRECISION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Var {
    W,
    U,
}

/// Lower bound `v(c_j) >= floor(num * j / den) + offset`, valid for every
/// index past the truncation order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TailBound {
    pub num: i64,
    pub den: i64,
    pub offset: i64,
}

impl TailBound {
    pub fn new(num: i64, den: i64, offset: i64) -> Self {
        assert!(den > 0, "slope denominator must be positive");
        TailBound { num, den, offset }
    }

    pub fn at(&self, j: u64) -> i64 {
        (self.num * j as i64).div_euclid(self.den) + self.offset
    }

    fn slope_le(&self, num: i64, den: i64) -> bool {
        self.num * den <= num * self.den
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Tail {
    /// Every coefficient past the order is exactly zero.
    Zero,
    Bounded(TailBound),
}

#[derive(Clone, Debug)]
pub struct TruncSeries {
    ctx: Arc<UnramifiedCtx>,
    var: Var,
    coeffs: Vec<WittApprox>,
    tail: Tail,
}

/// Per-coefficient summary used by `--trace`.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SeriesDump {
    pub var: Var,
    pub order: usize,
    /// Valuation lower bound and absolute precision of each coefficient
    /// (`null` stands for infinite).
    pub coefficients: Vec<(Option<i64>, Option<i64>)>,
    pub tail: Tail,
}

const NO_BOUND: i64 = i64::MAX / 4;

fn finite(x: i64) -> Option<i64> {
    (x != INFINITE_PRECISION).then_some(x)
}

impl TruncSeries {
    pub fn new(ctx: &Arc<UnramifiedCtx>, var: Var, coeffs: Vec<WittApprox>, tail: Tail) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("a series needs at least one coefficient".into()));
        }
        if coeffs.iter().any(|c| !Arc::ptr_eq(c.ctx(), ctx) && **c.ctx() != **ctx) {
            return Err(Error::ContextMismatch);
        }
        Ok(TruncSeries { ctx: ctx.clone(), var, coeffs, tail })
    }

    /// A polynomial, i.e. a series whose tail is exactly zero.
    pub fn polynomial(ctx: &Arc<UnramifiedCtx>, var: Var, coeffs: Vec<WittApprox>) -> Result<Self> {
        Self::new(ctx, var, coeffs, Tail::Zero)
    }

    pub fn constant(c: WittApprox, var: Var) -> Self {
        let ctx = c.ctx().clone();
        TruncSeries { ctx, var, coeffs: vec![c], tail: Tail::Zero }
    }

    /// `sum_j ratio^j t^j` truncated at `order`.
    pub fn geometric(ratio: &WittApprox, var: Var, order: usize) -> Self {
        let ctx = ratio.ctx().clone();
        let mut coeffs = Vec::with_capacity(order + 1);
        let mut power = WittApprox::one(&ctx);
        for _ in 0..=order {
            coeffs.push(power.clone());
            power = power.mul(ratio);
        }
        let v = ratio.valuation_lower_bound().min(NO_BOUND);
        let tail = if ratio.is_exact_zero() { Tail::Zero } else { Tail::Bounded(TailBound::new(v, 1, 0)) };
        TruncSeries { ctx, var, coeffs, tail }
    }

    pub fn ctx(&self) -> &Arc<UnramifiedCtx> {
        &self.ctx
    }

    pub fn var(&self) -> Var {
        self.var
    }

    /// Truncation order `M`.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[WittApprox] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> &WittApprox {
        &self.coeffs[j]
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    /// Replaces the tail certificate with an externally proven bound.
    pub fn with_tail(mut self, tail: Tail) -> Self {
        self.tail = tail;
        self
    }

    pub fn set_coeff(&mut self, j: usize, c: WittApprox) {
        self.coeffs[j] = c;
    }

    pub fn truncate(&self, order: usize) -> Self {
        if order >= self.order() {
            return self.clone();
        }
        let coeffs = self.coeffs[..=order].to_vec();
        let tail = self.combined_tail(&[self], order);
        TruncSeries { ctx: self.ctx.clone(), var: self.var, coeffs, tail }
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        if !Arc::ptr_eq(&self.ctx, &other.ctx) && *self.ctx != *other.ctx {
            return Err(Error::ContextMismatch);
        }
        if self.var != other.var {
            return Err(Error::VariableMismatch);
        }
        Ok(())
    }

    /// Offset `o` with `v(c_j) >= floor(num j / den) + o` for every `j >= from`,
    /// assuming the tail slope is at least `num/den`.
    fn global_offset(&self, num: i64, den: i64, from: usize) -> i64 {
        let mut off = match self.tail {
            Tail::Zero => NO_BOUND,
            Tail::Bounded(b) => b.offset,
        };
        for (j, c) in self.coeffs.iter().enumerate().skip(from) {
            if c.is_exact_zero() {
                continue;
            }
            let v = c.valuation_lower_bound();
            off = off.min(v - (num * j as i64).div_euclid(den));
        }
        off
    }

    fn min_slope(series: &[&Self]) -> (i64, i64) {
        let mut slope: Option<(i64, i64)> = None;
        for s in series {
            if let Tail::Bounded(b) = s.tail {
                slope = match slope {
                    Some((n, d)) if b.slope_le(n, d) => Some((b.num, b.den)),
                    None => Some((b.num, b.den)),
                    keep => keep,
                };
            }
        }
        slope.unwrap_or((0, 1))
    }

    /// Tail of a sum of `series` truncated at `order`.
    fn combined_tail(&self, series: &[&Self], order: usize) -> Tail {
        let all_exact = series.iter().all(|s| {
            s.tail == Tail::Zero && s.coeffs.iter().skip(order + 1).all(WittApprox::is_exact_zero)
        });
        if all_exact {
            return Tail::Zero;
        }
        let (num, den) = Self::min_slope(series);
        let off = series.iter().map(|s| s.global_offset(num, den, order + 1)).min().unwrap();
        Tail::Bounded(TailBound::new(num, den, off.min(NO_BOUND)))
    }

    /// Order up to which the coefficients are certified: the truncation
    /// order, or unbounded for a polynomial.
    fn effective_order(&self) -> usize {
        match self.tail {
            Tail::Zero => usize::MAX,
            Tail::Bounded(_) => self.order(),
        }
    }

    fn coeff_or_zero(&self, j: usize) -> WittApprox {
        self.coeffs.get(j).cloned().unwrap_or_else(|| WittApprox::zero(&self.ctx))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let order = match self.effective_order().min(other.effective_order()) {
            usize::MAX => self.order().max(other.order()),
            m => m,
        };
        let coeffs = (0..=order).map(|j| self.coeff_or_zero(j).add(&other.coeff_or_zero(j))).collect();
        let tail = self.combined_tail(&[self, other], order);
        Ok(TruncSeries { ctx: self.ctx.clone(), var: self.var, coeffs, tail })
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(WittApprox::neg).collect();
        TruncSeries { ctx: self.ctx.clone(), var: self.var, coeffs, tail: self.tail }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scalar_mul(&self, c: &WittApprox) -> Self {
        let coeffs = self.coeffs.iter().map(|x| x.mul(c)).collect();
        let tail = match self.tail {
            _ if c.is_exact_zero() => Tail::Zero,
            Tail::Zero => Tail::Zero,
            Tail::Bounded(b) => {
                Tail::Bounded(TailBound::new(b.num, b.den, b.offset + c.valuation_lower_bound()))
            }
        };
        TruncSeries { ctx: self.ctx.clone(), var: self.var, coeffs, tail }
    }

    /// Cauchy product truncated at the smaller certified order (polynomials
    /// count as untruncated).
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let exact_poly = self.tail == Tail::Zero && other.tail == Tail::Zero;
        let order = if exact_poly {
            self.order() + other.order()
        } else {
            self.effective_order().min(other.effective_order())
        };
        let coeffs: Vec<WittApprox> = (0..=order)
            .map(|j| {
                let lo = j.saturating_sub(other.order());
                let hi = j.min(self.order());
                (lo..=hi).fold(WittApprox::zero(&self.ctx), |acc, i| {
                    acc.add(&self.coeffs[i].mul(&other.coeffs[j - i]))
                })
            })
            .collect();
        let tail = if exact_poly {
            Tail::Zero
        } else {
            let (num, den) = Self::min_slope(&[self, other]);
            let oa = self.global_offset(num, den, 0);
            let ob = other.global_offset(num, den, 0);
            if oa >= NO_BOUND || ob >= NO_BOUND {
                Tail::Zero
            } else {
                // floor(x) + floor(y) >= floor(x + y) - 1
                Tail::Bounded(TailBound::new(num, den, oa + ob - 1))
            }
        };
        Ok(TruncSeries { ctx: self.ctx.clone(), var: self.var, coeffs, tail })
    }

    pub fn derivative(&self) -> Self {
        let coeffs: Vec<WittApprox> = if self.order() == 0 {
            vec![WittApprox::zero(&self.ctx)]
        } else {
            (1..=self.order()).map(|j| self.coeffs[j].mul_int(j as i64)).collect()
        };
        let tail = match self.tail {
            Tail::Zero => Tail::Zero,
            Tail::Bounded(b) => Tail::Bounded(TailBound::new(b.num, b.den, b.offset + b.num.div_euclid(b.den))),
        };
        TruncSeries { ctx: self.ctx.clone(), var: self.var, coeffs, tail }
    }

    /// Antiderivative with zero constant term. Dividing by `j + 1` costs
    /// `v_p(j + 1)` digits on that coefficient; the tail slope drops by `1/(p-1)`.
    pub fn integrate(&self) -> Result<Self> {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(WittApprox::zero(&self.ctx));
        for (j, c) in self.coeffs.iter().enumerate() {
            coeffs.push(c.div_int(j as i64 + 1)?);
        }
        let tail = match self.tail {
            Tail::Zero => Tail::Zero,
            Tail::Bounded(b) => {
                let pm1 = self.ctx.p() as i64 - 1;
                let num = b.num * pm1 - b.den;
                let den = b.den * pm1;
                Tail::Bounded(TailBound::new(num, den, b.offset + (-num).div_euclid(den)))
            }
        };
        Ok(TruncSeries { ctx: self.ctx.clone(), var: self.var, coeffs, tail })
    }

    /// Valuation bound on the omitted part `sum_{j > M} c_j x^j` when `v(x) >= vx`.
    pub fn tail_valuation(&self, vx: i64) -> Option<i64> {
        match self.tail {
            Tail::Zero => None,
            Tail::Bounded(b) => {
                let num = b.num + vx * b.den;
                if num <= 0 {
                    return Some(i64::MIN);
                }
                let j = self.order() as i64 + 1;
                Some((num * j).div_euclid(b.den) + b.offset)
            }
        }
    }

    /// Horner evaluation at `x` with `v(x) >= 0`, certified to at least
    /// `target` absolute digits by the tail bound.
    pub fn eval_at(&self, x: &WittApprox, target: i64) -> Result<WittApprox> {
        if x.is_exact_zero() {
            return Ok(self.coeffs[0].clone());
        }
        let vx = x.valuation_lower_bound();
        if vx < 0 {
            return Err(Error::NotIntegral(vx));
        }
        let mut acc = self.coeffs[self.order()].clone();
        for c in self.coeffs[..self.order()].iter().rev() {
            acc = acc.mul(x).add(c);
        }
        match self.tail_valuation(vx) {
            None => Ok(acc),
            Some(tail) if tail < target => Err(Error::TailNotCertified { target, tail }),
            Some(tail) => Ok(acc.cap_precision(tail)),
        }
    }

    pub fn dump(&self) -> SeriesDump {
        SeriesDump {
            var: self.var,
            order: self.order(),
            coefficients: self
                .coeffs
                .iter()
                .map(|c| (finite(c.valuation_lower_bound()), finite(c.abs_precision())))
                .collect(),
            tail: self.tail,
        }
    }
}
