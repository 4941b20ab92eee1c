//! Riemann sums for `Li^(p)_n(z) = ∫_{Z_p^×} x^{-n} dμ_z(x)` where
//! `μ_z(a + p^m Z_p) = z^a / (1 - z^{p^m})`.
//!
//! The integrand is constant mod `p^m` on each cell and the measure is
//! integral on X, so the level-`m` sum is correct modulo `p^m`.

use std::sync::Arc;

use crate::arith::poly_mul_mod;
use crate::error::{Error, Result};
use crate::padic::{UnramifiedCtx, WittApprox};

/// Residues modulo `p^m`, with a fast path when products fit in 64 bits.
#[derive(Debug, Clone, Copy)]
struct Modulus {
    m: u64,
    small: bool,
}

impl Modulus {
    fn new(m: u64) -> Self {
        Modulus { m, small: m < (1 << 32) }
    }

    #[inline]
    fn mul(&self, a: u64, b: u64) -> u64 {
        if self.small {
            a * b % self.m
        } else {
            ((a as u128 * b as u128) % self.m as u128) as u64
        }
    }

    #[inline]
    fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.m {
            s - self.m
        } else {
            s
        }
    }
}

const BATCH: usize = 1024;

/// Streams `(a, a^{-1} mod p^m)` over the units `0 < a < p^m` in increasing
/// order, inverting in batches with one modular inversion per batch.
fn for_each_unit_inverse(p: u64, modulus: Modulus, mut f: impl FnMut(u64, u64)) {
    let total = modulus.m;
    let mut units = Vec::with_capacity(BATCH);
    let mut prefix = Vec::with_capacity(BATCH);
    let mut inverses = vec![0u64; BATCH];
    let mut a = 1u64;
    while a < total {
        units.clear();
        prefix.clear();
        let mut running = 1u64;
        while a < total && units.len() < BATCH {
            if a % p != 0 {
                units.push(a);
                running = modulus.mul(running, a);
                prefix.push(running);
            }
            a += 1;
        }
        if units.is_empty() {
            continue;
        }
        let mut inv = crate::arith::inv_mod(running, modulus.m).expect("product of units");
        for i in (0..units.len()).rev() {
            let before = if i == 0 { 1 } else { prefix[i - 1] };
            inverses[i] = modulus.mul(inv, before);
            inv = modulus.mul(inv, units[i]);
        }
        for (&u, &iu) in units.iter().zip(&inverses) {
            f(u, iu);
        }
    }
}

fn check_level(ctx: &UnramifiedCtx, m: u32) -> Result<Modulus> {
    if m == 0 {
        return Err(Error::InvalidArgument("Riemann level must be at least 1".into()));
    }
    if m > ctx.precision() {
        return Err(Error::InvalidArgument(format!(
            "Riemann level {m} exceeds working precision {}",
            ctx.precision()
        )));
    }
    Ok(Modulus::new(ctx.p_pow(m)))
}

/// `μ_z(a + p^m Z_p) = z^a / (1 - z^{p^m})`.
pub fn measure_value(z: &WittApprox, a: u64, m: u32) -> Result<WittApprox> {
    let ctx = z.ctx();
    let cells = ctx
        .p()
        .checked_pow(m)
        .ok_or_else(|| Error::InvalidArgument("cell level too large".into()))?;
    if a >= cells {
        return Err(Error::InvalidArgument(format!("cell index {a} must be below p^{m}")));
    }
    let residue = z.residue().map_err(|_| Error::NotInX)?;
    if z.scale() != 0 || residue.is_zero() || residue.is_one() {
        return Err(Error::NotInX);
    }
    let denom = WittApprox::one(ctx).sub(&z.pow(cells));
    z.pow(a).div(&denom)
}

fn x_residue_check(z: &WittApprox) -> Result<()> {
    if z.scale() != 0 {
        return Err(Error::NotInX);
    }
    let r = z.residue().map_err(|_| Error::NotInX)?;
    if r.is_zero() || r.is_one() {
        return Err(Error::NotInX);
    }
    Ok(())
}

/// `Li^(p)_j(z)` for `j = 1..=max_weight` by the level-`m` Riemann sum at a
/// general point of X, with incrementally updated powers `z^a`.
pub fn li_p_riemann_weights(z: &WittApprox, max_weight: u32, m: u32) -> Result<Vec<WittApprox>> {
    x_residue_check(z)?;
    let ctx = z.ctx();
    let modulus = check_level(ctx, m)?;
    let p = ctx.p();
    let k = ctx.degree();
    let zc = z.coeffs_mod(m)?;
    let weights = max_weight as usize;
    let mut acc = vec![vec![0u64; k]; weights];
    let mut power = vec![0u64; k];
    power[0] = 1 % modulus.m;
    let mut next_a = 0u64;
    for_each_unit_inverse(p, modulus, |a, inv_a| {
        while next_a < a {
            power = poly_mul_mod(&power, &zc, ctx.modulus(), modulus.m);
            next_a += 1;
        }
        let mut w = inv_a;
        for slot in acc.iter_mut() {
            for (s, &c) in slot.iter_mut().zip(&power) {
                *s = modulus.add(*s, modulus.mul(w, c));
            }
            w = modulus.mul(w, inv_a);
        }
    });
    let denom = WittApprox::one(ctx).sub(&z.pow(modulus.m)).inv()?;
    acc.into_iter()
        .map(|s| Ok(WittApprox::from_coeffs_with_precision(ctx, 0, &s, m)?.mul(&denom).cap_precision(m as i64)))
        .collect()
}

/// `Li^(p)_n(z)` at level `m` for a single weight.
pub fn li_p_riemann(z: &WittApprox, n: u32, m: u32) -> Result<WittApprox> {
    if n == 0 {
        // weight zero: a^0 = 1 on every unit cell
        return li_p_weight_zero(z, m);
    }
    Ok(li_p_riemann_weights(z, n, m)?.pop().expect("n >= 1 weights"))
}

fn li_p_weight_zero(z: &WittApprox, m: u32) -> Result<WittApprox> {
    x_residue_check(z)?;
    let ctx = z.ctx();
    let modulus = check_level(ctx, m)?;
    let p = ctx.p();
    let zc = z.coeffs_mod(m)?;
    let mut acc = vec![0u64; ctx.degree()];
    let mut power = vec![0u64; ctx.degree()];
    power[0] = 1;
    for a in 0..modulus.m {
        if a % p != 0 {
            for (s, &c) in acc.iter_mut().zip(&power) {
                *s = modulus.add(*s, c);
            }
        }
        power = poly_mul_mod(&power, &zc, ctx.modulus(), modulus.m);
    }
    let denom = WittApprox::one(ctx).sub(&z.pow(modulus.m)).inv()?;
    Ok(WittApprox::from_coeffs_with_precision(ctx, 0, &acc, m)?.mul(&denom).cap_precision(m as i64))
}

/// Level-`m` sums of `a^{-j}` grouped by `a mod (p^k - 1)`.
///
/// A Teichmüller point `β` satisfies `β^{p^k - 1} = 1`, so
/// `sum_a a^{-j} β^a = sum_r B_j[r] β^r`; one pass over the units serves every
/// Teichmüller point of the context.
#[derive(Debug, Clone)]
pub struct TeichBuckets {
    ctx: Arc<UnramifiedCtx>,
    level: u32,
    period: u64,
    sums: Vec<Vec<u64>>,
}

impl TeichBuckets {
    pub fn new(ctx: &Arc<UnramifiedCtx>, max_weight: u32, m: u32) -> Result<Self> {
        let modulus = check_level(ctx, m)?;
        let period = ctx.field().order() - 1;
        let mut sums = vec![vec![0u64; period as usize]; max_weight as usize];
        for_each_unit_inverse(ctx.p(), modulus, |a, inv_a| {
            let r = (a % period) as usize;
            let mut w = inv_a;
            for bucket in sums.iter_mut() {
                bucket[r] = modulus.add(bucket[r], w);
                w = modulus.mul(w, inv_a);
            }
        });
        Ok(TeichBuckets { ctx: ctx.clone(), level: m, period, sums })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn max_weight(&self) -> u32 {
        self.sums.len() as u32
    }

    /// `Li^(p)_j(β)` for a Teichmüller point `β`, correct modulo `p^m`.
    pub fn li_p(&self, beta: &WittApprox, j: u32) -> Result<WittApprox> {
        if j == 0 || j > self.max_weight() {
            return Err(Error::InvalidArgument(format!("weight {j} outside 1..={}", self.max_weight())));
        }
        x_residue_check(beta)?;
        let ctx = &self.ctx;
        let m = self.level;
        let modulus = Modulus::new(ctx.p_pow(m));
        let bc = beta.coeffs_mod(m)?;
        let bucket = &self.sums[j as usize - 1];
        let mut acc = vec![0u64; ctx.degree()];
        let mut power = vec![0u64; ctx.degree()];
        power[0] = 1;
        for &b in bucket.iter().take(self.period as usize) {
            if b != 0 {
                for (s, &c) in acc.iter_mut().zip(&power) {
                    *s = modulus.add(*s, modulus.mul(b, c));
                }
            }
            power = poly_mul_mod(&power, &bc, ctx.modulus(), modulus.m);
        }
        let denom = WittApprox::one(ctx).sub(&beta.pow(modulus.m)).inv()?;
        Ok(WittApprox::from_coeffs_with_precision(ctx, 0, &acc, m)?.mul(&denom).cap_precision(m as i64))
    }
}
