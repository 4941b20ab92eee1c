//! Coleman polylogarithms on X.
//!
//! Every `z` in X factors as `α(1 + pw)` with `α` a root of unity and `w`
//! integral. At roots of unity, `Li_n(α)` comes from the Frobenius-corrected
//! measure integrals `Li^(p)_n`; on the disc of `α` it is `p^n g_n(w)`, where
//! `g_0(w) = z/(1 - z)` and `g_n' = g_{n-1}/(1 + pw)`.

pub mod riemann;

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::finite::FpkElement;
use crate::padic::{padic_log, teichmuller, UnramifiedCtx, WittApprox};
use crate::series::{Tail, TailBound, TruncSeries, Var};

pub use riemann::{li_p_riemann, li_p_riemann_weights, measure_value, TeichBuckets};

/// A point `z = α(1 + pw)` of X.
#[derive(Debug, Clone)]
pub struct XPoint {
    pub z: WittApprox,
    pub alpha: WittApprox,
    pub w: WittApprox,
    pub zbar: FpkElement,
}

impl XPoint {
    /// Builds `z` from its Teichmüller part and `w`.
    pub fn from_parts(zbar: &FpkElement, w: &WittApprox) -> Result<Self> {
        let ctx = w.ctx().clone();
        if zbar.is_zero() || zbar.is_one() {
            return Err(Error::NotInX);
        }
        if w.valuation_lower_bound() < 0 {
            return Err(Error::NotIntegral(w.scale()));
        }
        let alpha = teichmuller(&ctx, zbar)?;
        let z = alpha.mul(&WittApprox::one(&ctx).add(&w.shift(1)));
        Ok(XPoint { z, alpha, w: w.clone(), zbar: zbar.clone() })
    }

    pub fn from_z(z: &WittApprox) -> Result<Self> {
        let ctx = z.ctx().clone();
        if z.scale() != 0 {
            return Err(Error::NotInX);
        }
        let zbar = z.residue()?;
        if zbar.is_zero() || zbar.is_one() {
            return Err(Error::NotInX);
        }
        let alpha = teichmuller(&ctx, &zbar)?;
        let w = z.div(&alpha)?.sub(&WittApprox::one(&ctx)).shift(-1);
        Ok(XPoint { z: z.clone(), alpha, w, zbar })
    }

    /// `1/z = α^{-1}(1 + pw')` with `w' = -w/(1 + pw)`.
    pub fn inverse(&self) -> Result<Self> {
        let ctx = self.z.ctx();
        let one_pw = WittApprox::one(ctx).add(&self.w.shift(1));
        Ok(XPoint {
            z: self.z.inv()?,
            alpha: self.alpha.inv()?,
            w: self.w.neg().div(&one_pw)?,
            zbar: self.zbar.inv()?,
        })
    }

    pub fn ctx(&self) -> &Arc<UnramifiedCtx> {
        self.z.ctx()
    }

    /// `log(z) = log(1 + pw)`; the root of unity contributes nothing.
    pub fn log_at(&self) -> Result<WittApprox> {
        padic_log(&WittApprox::one(self.ctx()).add(&self.w.shift(1)))
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PolylogValue {
    pub n: u32,
    #[serde(serialize_with = "serialize_witt")]
    pub value: WittApprox,
    pub certified_precision: i64,
}

fn serialize_witt<S: serde::Serializer>(x: &WittApprox, s: S) -> std::result::Result<S::Ok, S::Error> {
    x.to_record().serialize(s)
}

impl PolylogValue {
    pub fn new(n: u32, value: WittApprox) -> Self {
        let certified_precision = value.abs_precision();
        PolylogValue { n, value, certified_precision }
    }
}

/// Smallest order `M` whose lemma tail `floor((M + 1)(p - 2)/(p - 1)) - n`
/// reaches `target` at `|w| <= 1`.
pub fn default_series_order(p: u64, n: u32, target: u32) -> usize {
    let bound = g_tail(p, n);
    let mut order = 1usize;
    while bound.at(order as u64 + 1) < target as i64 {
        order += 1;
    }
    order
}

fn g_tail(p: u64, n: u32) -> TailBound {
    TailBound::new(p as i64 - 2, p as i64 - 1, -(n as i64))
}

/// Shared state for evaluating `Li_j`, `j <= max_weight`, in one context:
/// the bucketed Riemann sums at level `m` and the series order.
#[derive(Debug, Clone)]
pub struct PolylogEngine {
    ctx: Arc<UnramifiedCtx>,
    buckets: TeichBuckets,
    order: usize,
}

impl PolylogEngine {
    /// `order = None` picks the smallest order certifying `m` digits of `g_n`.
    pub fn new(ctx: &Arc<UnramifiedCtx>, max_weight: u32, m: u32, order: Option<usize>) -> Result<Self> {
        let buckets = TeichBuckets::new(ctx, max_weight.max(1), m)?;
        let order = order.unwrap_or_else(|| default_series_order(ctx.p(), max_weight, m));
        Ok(PolylogEngine { ctx: ctx.clone(), buckets, order })
    }

    pub fn ctx(&self) -> &Arc<UnramifiedCtx> {
        &self.ctx
    }

    pub fn level(&self) -> u32 {
        self.buckets.level()
    }

    pub fn max_weight(&self) -> u32 {
        self.buckets.max_weight()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    fn check_teich(&self, alpha: &WittApprox) -> Result<FpkElement> {
        let a = alpha.residue()?;
        if alpha.scale() != 0 || a.is_zero() || a.is_one() {
            return Err(Error::NotInX);
        }
        Ok(a)
    }

    /// `p^{-n} Li_n(α) = (p^{kn} - 1)^{-1} sum_i p^{(k-1-i)n} Li^(p)_n(α^{p^i})`.
    pub fn li_tilde_teich(&self, alpha: &WittApprox, n: u32) -> Result<WittApprox> {
        self.check_teich(alpha)?;
        let ctx = &self.ctx;
        let k = ctx.degree() as u64;
        let p_elt = WittApprox::from_int(ctx, ctx.p() as i64);
        let mut sum = WittApprox::zero(ctx);
        let mut conj = alpha.clone();
        for i in 0..k {
            let term = self.buckets.li_p(&conj, n)?.mul(&p_elt.pow((k - 1 - i) * n as u64));
            sum = sum.add(&term);
            conj = conj.pow(ctx.p());
        }
        let denom = p_elt.pow(k * n as u64).sub(&WittApprox::one(ctx));
        let tilde = sum.div(&denom)?;
        if tilde.valuation_lower_bound() < 0 {
            return Err(Error::Assertion(format!("Li_{n}(α) is not in p^{n} W")));
        }
        Ok(tilde)
    }

    /// `Li_n(α)` at a root of unity.
    pub fn li_n_teich(&self, alpha: &WittApprox, n: u32) -> Result<PolylogValue> {
        let value = if n == 0 { li_0(alpha)? } else { self.li_tilde_teich(alpha, n)?.shift(n as i64) };
        if n > 0 && value.valuation_lower_bound() < n as i64 {
            return Err(Error::Assertion(format!("v_p(Li_{n}(α)) < {n}")));
        }
        Ok(PolylogValue::new(n, value))
    }

    /// `g_0, ..., g_n` about `α`, truncated at the engine order, each with
    /// the tail `v(c_j) >= j - n - v_p(j!)`.
    pub fn g_series(&self, alpha: &WittApprox, n: u32) -> Result<Vec<TruncSeries>> {
        self.check_teich(alpha)?;
        let ctx = &self.ctx;
        let order = self.order;
        let one = WittApprox::one(ctx);
        let inv = one.sub(alpha).inv()?;
        let ratio = alpha.shift(1).mul(&inv);
        let g0 = TruncSeries::geometric(&ratio, Var::W, order)
            .scalar_mul(&inv)
            .sub(&TruncSeries::constant(one.clone(), Var::W))?
            .with_tail(Tail::Bounded(g_tail(ctx.p(), 0)));
        let kernel = TruncSeries::geometric(&WittApprox::from_int(ctx, -(ctx.p() as i64)), Var::W, order);
        let mut out = Vec::with_capacity(n as usize + 1);
        out.push(g0);
        for j in 1..=n {
            let prev = out.last().unwrap();
            let mut g = prev.mul(&kernel)?.integrate()?.truncate(order);
            g.set_coeff(0, self.li_tilde_teich(alpha, j)?);
            out.push(g.with_tail(Tail::Bounded(g_tail(ctx.p(), j))));
        }
        Ok(out)
    }

    /// `Li_0(z), ..., Li_n(z)` at a point of X.
    pub fn li_all_at(&self, x: &XPoint, n: u32) -> Result<Vec<WittApprox>> {
        let target = self.level() as i64;
        let g = self.g_series(&x.alpha, n)?;
        let mut out = vec![li_0(&x.z)?];
        for (j, gj) in g.iter().enumerate().skip(1) {
            out.push(gj.eval_at(&x.w, target)?.shift(j as i64));
        }
        Ok(out)
    }

    pub fn li_n_at(&self, x: &XPoint, n: u32) -> Result<PolylogValue> {
        let v = self.li_all_at(x, n)?.pop().expect("n + 1 values");
        Ok(PolylogValue::new(n, v))
    }

    /// Everything needed to evaluate `L_j`, `F_j` and `DF_j` at `x`.
    pub fn point(&self, x: &XPoint, n: u32) -> Result<PointEval> {
        Ok(PointEval {
            p: self.ctx.p(),
            li: self.li_all_at(x, n)?,
            log: x.log_at()?,
            z: x.z.clone(),
        })
    }
}

/// `Li_0(z) = z/(1 - z)`.
pub fn li_0(z: &WittApprox) -> Result<WittApprox> {
    z.div(&WittApprox::one(z.ctx()).sub(z))
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, j| acc * j)
}

/// `a_0 = -n`, `a_k = (-1)^k/(k-1)! + (-1)^{k+1} n/k!` for `0 < k < n`.
pub fn a_coeffs(n: u32) -> Vec<BigRational> {
    let nn = BigInt::from(n);
    (0..n)
        .map(|k| {
            if k == 0 {
                return BigRational::from_integer(-nn.clone());
            }
            let sign = if k % 2 == 0 { BigInt::one() } else { -BigInt::one() };
            BigRational::new(sign.clone(), factorial(k - 1)) - BigRational::new(sign * &nn, factorial(k))
        })
        .collect()
}

fn signed_inv_factorial(m: u32) -> BigRational {
    let sign = if m % 2 == 0 { BigInt::one() } else { -BigInt::one() };
    BigRational::new(sign, factorial(m))
}

/// `Li_0..Li_N`, `log z` and `z` at one point.
#[derive(Debug, Clone)]
pub struct PointEval {
    p: u64,
    pub li: Vec<WittApprox>,
    pub log: WittApprox,
    pub z: WittApprox,
}

impl PointEval {
    fn require(&self, n: u32, bound: u64) -> Result<()> {
        if self.p <= bound {
            return Err(Error::PrimeTooSmall { p: self.p, bound });
        }
        if n as usize >= self.li.len() {
            return Err(Error::InvalidArgument(format!("weight {n} was not evaluated at this point")));
        }
        Ok(())
    }

    fn rational(&self, q: &BigRational) -> Result<WittApprox> {
        WittApprox::from_rational(self.z.ctx(), q)
    }

    fn log_pow(&self, k: u32) -> WittApprox {
        self.log.pow(k as u64)
    }

    /// `L_n = sum_{m<n} (-1)^m/m! Li_{n-m} log^m`.
    pub fn big_l(&self, n: u32) -> Result<WittApprox> {
        self.require(n, n as u64)?;
        let ctx = self.z.ctx();
        let mut acc = WittApprox::zero(ctx);
        for m in 0..n {
            let c = self.rational(&signed_inv_factorial(m))?;
            acc = acc.add(&self.li[(n - m) as usize].mul(&self.log_pow(m)).mul(&c));
        }
        Ok(acc)
    }

    /// `F_n = sum_{k<n} a_k log^k Li_{n-k}`.
    pub fn f_n(&self, n: u32) -> Result<WittApprox> {
        self.require(n, n as u64 + 1)?;
        let ctx = self.z.ctx();
        let mut acc = WittApprox::zero(ctx);
        for (k, a) in a_coeffs(n).iter().enumerate() {
            let k = k as u32;
            acc = acc.add(&self.rational(a)?.mul(&self.log_pow(k)).mul(&self.li[(n - k) as usize]));
        }
        Ok(acc)
    }

    /// `DF_n = (1 - z) sum_{k<n} log^k Li_{n-k-1} (a_k + (k+1) a_{k+1})`, `a_n = 0`.
    pub fn df_n(&self, n: u32) -> Result<WittApprox> {
        self.require(n, n as u64 + 1)?;
        let ctx = self.z.ctx();
        let a = a_coeffs(n);
        let zero = BigRational::zero();
        let mut acc = WittApprox::zero(ctx);
        for k in 0..n as usize {
            let next = a.get(k + 1).unwrap_or(&zero);
            let c = &a[k] + next * BigRational::from_integer(BigInt::from(k + 1));
            if c.is_zero() {
                continue;
            }
            let term = self.rational(&c)?.mul(&self.log_pow(k as u32)).mul(&self.li[n as usize - k - 1]);
            acc = acc.add(&term);
        }
        Ok(WittApprox::one(ctx).sub(&self.z).mul(&acc))
    }
}
