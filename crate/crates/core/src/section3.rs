//! The iterated integrals `f_0(z, S) = S/(1 - S)`,
//! `f_{k+1}(z, S) = ∫_z^S f_k(z, t) dt/t`, expanded in `u = S - z` about a
//! fixed base point, together with their `z`-derivatives at fixed `S`.
//!
//! They give a second route to `L_n`:
//! `-sum_k (-1)^k k! C(n,k) f_{k+1}(z,S) log^{n-k}(S) = (-1)^n n! (L_{n+1}(z) - L_{n+1}(S))`.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::coleman::{PointEval, PolylogEngine, XPoint};
use crate::error::{Error, Result};
use crate::finite::FpkElement;
use crate::identities::e_coeffs;
use crate::padic::WittApprox;
use crate::series::{Tail, TailBound, TruncSeries, Var};

/// `f_k(z, z + u)` and `∂_z f_k(z, z + u)` at a fixed `z`.
#[derive(Debug, Clone)]
pub struct FSeriesPair {
    pub z: WittApprox,
    pub k: u32,
    pub series: TruncSeries,
    pub dz_series: TruncSeries,
}

/// Coefficients of every `f_k` and `∂_z f_k` satisfy `v(c_j) >= -v_p(j!)`.
fn f_tail(p: u64) -> Tail {
    Tail::Bounded(TailBound::new(-1, p as i64 - 1, 0))
}

/// Order certifying `f_k` to the working precision at `v(u) >= 1`, and at
/// least `A + n + 5`.
pub fn default_f_order(p: u64, precision: u32, n: u32) -> usize {
    let mut order = (precision + n + 5) as usize;
    let slope = |m: usize| ((m as i64 + 1) * (p as i64 - 2)).div_euclid(p as i64 - 1);
    while slope(order) < precision as i64 {
        order += 1;
    }
    order
}

pub fn f_series(z: &WittApprox, kmax: u32, order: usize) -> Result<Vec<FSeriesPair>> {
    let ctx = z.ctx();
    let p = ctx.p();
    let one = WittApprox::one(ctx);
    let one_minus = one.sub(z);
    let inv = one_minus.inv()?;
    let f0 = TruncSeries::geometric(&inv, Var::U, order)
        .scalar_mul(&inv)
        .sub(&TruncSeries::constant(one.clone(), Var::U))?
        .with_tail(f_tail(p));
    let zinv = z.inv()?;
    let kernel = TruncSeries::geometric(&zinv.neg(), Var::U, order).scalar_mul(&zinv);
    let zero = TruncSeries::constant(WittApprox::zero(ctx), Var::U);
    let mut out = vec![FSeriesPair { z: z.clone(), k: 0, series: f0, dz_series: zero }];
    for k in 1..=kmax {
        let prev = out.last().unwrap();
        let series = prev.series.mul(&kernel)?.integrate()?.truncate(order).with_tail(f_tail(p));
        let dz_series = if k == 1 {
            // boundary term -f_0(z, z)/z
            TruncSeries::constant(inv.neg(), Var::U)
        } else {
            prev.dz_series.mul(&kernel)?.integrate()?.truncate(order).with_tail(f_tail(p))
        };
        out.push(FSeriesPair { z: z.clone(), k, series, dz_series });
    }
    Ok(out)
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::from(1), |acc, j| acc * j)
}

fn eval(s: &TruncSeries, u: &WittApprox) -> Result<WittApprox> {
    s.eval_at(u, s.ctx().precision() as i64)
}

/// Both sides of the `f`/`L` identity at `z = α`, `S = α(1 + pw)`.
pub fn delprop_sides(
    engine: &PolylogEngine,
    zbar: &FpkElement,
    w: &WittApprox,
    n: u32,
    order: usize,
) -> Result<(WittApprox, WittApprox)> {
    let ctx = engine.ctx();
    let p = ctx.p();
    if p <= n as u64 + 2 {
        return Err(Error::PrimeTooSmall { p, bound: n as u64 + 2 });
    }
    let base = XPoint::from_parts(zbar, &WittApprox::zero(ctx))?;
    let s = XPoint::from_parts(zbar, w)?;
    let u = s.z.sub(&base.z);
    let fs = f_series(&base.z, n + 1, order)?;
    let log_s = s.log_at()?;
    let mut lhs = WittApprox::zero(ctx);
    for k in 0..=n {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        let c = factorial(n) / factorial(n - k) * sign;
        let c = WittApprox::from_rational(ctx, &BigRational::from_integer(c))?;
        let term = eval(&fs[k as usize + 1].series, &u)?.mul(&log_s.pow((n - k) as u64)).mul(&c);
        lhs = lhs.sub(&term);
    }
    let at_base = engine.point(&base, n + 1)?.big_l(n + 1)?;
    let at_s = engine.point(&s, n + 1)?.big_l(n + 1)?;
    let scale = if n % 2 == 0 { 1 } else { -1 } * factorial(n);
    let scale = WittApprox::from_rational(ctx, &BigRational::from_integer(scale))?;
    Ok((lhs, at_base.sub(&at_s).mul(&scale)))
}

/// `f_n(z, z(1 + pw))` and the predicted residue `z/(1 - z) w^n/n!` of its
/// quotient by `p^n`.
pub fn f_congruence_sides(x: &XPoint, n: u32, order: usize) -> Result<(WittApprox, FpkElement)> {
    let ctx = x.ctx();
    let p = ctx.p();
    if p <= n as u64 + 1 {
        return Err(Error::PrimeTooSmall { p, bound: n as u64 + 1 });
    }
    let fs = f_series(&x.z, n, order)?;
    let u = x.z.mul(&x.w).shift(1);
    let value = eval(&fs[n as usize].series, &u)?;
    let zbar = &x.zbar;
    let one = FpkElement::one(zbar.field());
    let nf = (1..=n as i64).fold(FpkElement::one(zbar.field()), |acc, j| acc.mul(&FpkElement::from_int(zbar.field(), j)));
    let predicted = zbar.div(&one.sub(zbar))?.mul(&x.w.residue()?.pow(n as u64)).div(&nf)?;
    Ok((value, predicted))
}

/// `Df_k = (1 - S) f_{k-1}(z, S) + z(1 - z) ∂_z f_k(z, S)` at `S = z(1 + pw)`.
pub fn df_value(x: &XPoint, k: u32, order: usize) -> Result<WittApprox> {
    if k == 0 {
        return Err(Error::InvalidArgument("Df_k needs k >= 1".into()));
    }
    let ctx = x.ctx();
    let z = &x.z;
    let one = WittApprox::one(ctx);
    let s = z.mul(&one.add(&x.w.shift(1)));
    let u = s.sub(z);
    let fs = f_series(z, k, order)?;
    let first = one.sub(&s).mul(&eval(&fs[k as usize - 1].series, &u)?);
    let second = z.mul(&one.sub(z)).mul(&eval(&fs[k as usize].dz_series, &u)?);
    Ok(first.add(&second))
}

/// `sum_m e_m L_m log^{n-m}` at a point.
pub fn e_route(pe: &PointEval, n: u32) -> Result<WittApprox> {
    let e = e_coeffs(n)?;
    let ctx = pe.z.ctx();
    let mut acc = WittApprox::zero(ctx);
    for m in 1..=n {
        let c = &e[m as usize];
        if *c == BigRational::from_integer(0.into()) {
            continue;
        }
        let term = WittApprox::from_rational(ctx, c)?.mul(&pe.big_l(m)?).mul(&pe.log.pow((n - m) as u64));
        acc = acc.add(&term);
    }
    Ok(acc)
}
