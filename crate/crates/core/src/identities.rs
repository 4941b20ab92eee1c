//! Exact rational checks of the coefficient systems: the linear conditions
//! pinning down `a_k`, their generating function, and the `c`, `d`, `e`
//! constants of the iterated-integral route.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::coleman::a_coeffs;
use crate::error::{Error, Result};

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, j| acc * j)
}

fn binomial(n: u32, k: u32) -> BigInt {
    factorial(n) / (factorial(k) * factorial(n - k))
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Row echelon form of an integer matrix by Bareiss elimination. Returns the
/// reduced matrix and the pivot columns.
pub fn bareiss(mut rows: Vec<Vec<BigInt>>) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let height = rows.len();
    let width = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..width {
        if r == height {
            break;
        }
        let Some(sel) = (r..height).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, sel);
        for i in r + 1..height {
            for j in c + 1..width {
                let v = &rows[r][c] * &rows[i][j] - &rows[i][c] * &rows[r][j];
                rows[i][j] = v / &prev;
            }
            rows[i][c] = BigInt::zero();
        }
        prev = rows[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    (rows, pivots)
}

/// Clears denominators row by row.
fn integer_rows(rows: &[Vec<BigRational>]) -> Vec<Vec<BigInt>> {
    rows.iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter().map(|x| (x * BigRational::from_integer(l.clone())).to_integer()).collect()
        })
        .collect()
}

/// Coefficient rows of the conditions `sum_{k<=l} (a_k + (k+1)a_{k+1})/(l-k)! = 0`,
/// `l = 1..n-1`, in the unknowns `a_0..a_{n-1}` (with `a_n = 0`).
pub fn conds_rows(n: u32) -> Vec<Vec<BigRational>> {
    let n = n as usize;
    (1..n)
        .map(|l| {
            let mut row = vec![BigRational::zero(); n];
            for k in 0..=l {
                let w = BigRational::new(BigInt::one(), factorial((l - k) as u32));
                row[k] += &w;
                if k + 1 < n {
                    row[k + 1] += w * q(k as i64 + 1);
                }
            }
            row
        })
        .collect()
}

/// Residuals of the conditions and of `a_0 + a_1 + 1` for a candidate vector.
pub fn conds_residuals(a: &[BigRational]) -> Vec<BigRational> {
    let n = a.len() as u32;
    let mut out: Vec<BigRational> = conds_rows(n)
        .iter()
        .map(|row| row.iter().zip(a).map(|(c, x)| c * x).sum())
        .collect();
    out.push(&a[0] + a.get(1).cloned().unwrap_or_else(BigRational::zero) + q(1));
    out
}

/// Solves the conditions together with `a_0 + a_1 = -1`.
pub fn solve_conds(n: u32) -> Result<Vec<BigRational>> {
    if n < 2 {
        return Err(Error::InvalidArgument("the coefficient system needs n >= 2".into()));
    }
    let size = n as usize;
    let mut rows = conds_rows(n);
    for row in rows.iter_mut() {
        row.push(BigRational::zero());
    }
    let mut norm = vec![BigRational::zero(); size + 1];
    norm[0] = q(1);
    norm[1] = q(1);
    norm[size] = q(-1);
    rows.push(norm);
    let (echelon, pivots) = bareiss(integer_rows(&rows));
    if pivots.len() != size || pivots.contains(&size) {
        return Err(Error::Singular(format!("rank {} for n = {n}", pivots.len())));
    }
    let mut x = vec![BigRational::zero(); size];
    for i in (0..size).rev() {
        let row = &echelon[i];
        let mut rhs = BigRational::from_integer(row[size].clone());
        for j in i + 1..size {
            rhs -= BigRational::from_integer(row[j].clone()) * &x[j];
        }
        x[i] = rhs / BigRational::from_integer(row[i].clone());
    }
    Ok(x)
}

/// Dimension of the solution space of the homogeneous conditions.
pub fn homogeneous_nullity(n: u32) -> usize {
    let (_, pivots) = bareiss(integer_rows(&conds_rows(n)));
    n as usize - pivots.len()
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct UniquenessReport {
    pub n: u32,
    pub solved: Vec<String>,
    pub closed_form: Vec<String>,
    pub matches_closed_form: bool,
    pub nullity: usize,
    /// Indices `k` whose perturbation `a_k + 1` left every residual zero.
    pub insensitive: Vec<usize>,
    pub pass: bool,
}

pub fn uniqueness_check(n: u32) -> Result<UniquenessReport> {
    let solved = solve_conds(n)?;
    let closed = a_coeffs(n);
    let nullity = homogeneous_nullity(n);
    let insensitive: Vec<usize> = (0..n as usize)
        .filter(|&k| {
            let mut a = closed.clone();
            a[k] += q(1);
            conds_residuals(&a).iter().all(Zero::is_zero)
        })
        .collect();
    let matches = solved == closed;
    Ok(UniquenessReport {
        n,
        solved: solved.iter().map(ToString::to_string).collect(),
        closed_form: closed.iter().map(ToString::to_string).collect(),
        matches_closed_form: matches,
        nullity,
        pass: matches && nullity == 1 && insensitive.is_empty(),
        insensitive,
    })
}

/// `sum_k a_k t^k` against `-(n + t) e^{-t}` modulo `t^n`; returns the
/// indices where they differ.
pub fn gen_function_check(n: u32) -> Vec<usize> {
    let a = a_coeffs(n);
    let nn = q(n as i64);
    (0..n as usize)
        .filter(|&k| {
            let ek = |j: usize| {
                let s = if j % 2 == 0 { 1 } else { -1 };
                BigRational::new(BigInt::from(s), factorial(j as u32))
            };
            let mut c = -(&nn * ek(k));
            if k >= 1 {
                c -= ek(k - 1);
            }
            c != a[k]
        })
        .collect()
}

fn c_term(n: u32, k: u32) -> BigRational {
    let s = if k % 2 == 0 { 1 } else { -1 };
    // k!/(k+1)! = 1/(k+1)
    BigRational::new(BigInt::from(s) * binomial(n, k), BigInt::from(k + 1))
}

/// `sum_{k<=n} (-1)^k k!/(k+1)! C(n,k)`, equal to `1/(n+1)`.
pub fn c_sum(n: u32) -> BigRational {
    (0..=n).map(|k| c_term(n, k)).sum()
}

/// `sum_{k<=n} (-1)^k k!/(k+1)! C(n,k) (n-k)`, equal to `1` for `n >= 1`.
pub fn d_sum(n: u32) -> BigRational {
    (0..=n).map(|k| c_term(n, k) * q((n - k) as i64)).sum()
}

/// `e_0..e_n` with `e_n = -n`, `e_{n-1} = -1` and zeros elsewhere.
pub fn e_coeffs(n: u32) -> Result<Vec<BigRational>> {
    if n < 2 {
        return Err(Error::InvalidArgument("e coefficients need n >= 2".into()));
    }
    let mut e = vec![BigRational::zero(); n as usize + 1];
    e[n as usize] = q(-(n as i64));
    e[n as usize - 1] = q(-1);
    Ok(e)
}

/// Residue of a rational in `Z/p`, when its denominator is prime to `p`.
pub fn residue_mod(x: &BigRational, p: u64) -> Option<u64> {
    let pb = BigInt::from(p);
    let den = x.denom().mod_floor(&pb);
    if den.is_zero() {
        return None;
    }
    let num = x.numer().mod_floor(&pb);
    let inv = crate::arith::pow_mod(den.try_into().ok()?, p - 2, p);
    let num: u64 = num.try_into().ok()?;
    Some(crate::arith::mul_mod(num, inv, p))
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConstantsReport {
    pub n: u32,
    pub c: String,
    pub d: String,
    pub pass: bool,
}

pub fn constants_check(n: u32) -> ConstantsReport {
    let c = c_sum(n);
    let d = d_sum(n);
    let pass = c == BigRational::new(BigInt::one(), BigInt::from(n + 1)) && (n == 0 || d.is_one());
    ConstantsReport { n, c: c.to_string(), d: d.to_string(), pass }
}
