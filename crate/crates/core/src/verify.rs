//! Sampled and exhaustive verification runs producing reproducible reports.
//!
//! Samples are drawn from ChaCha8 seeded with the run seed: for each index,
//! the residue `zbar` is the field element whose base-p index is uniform in
//! `[2, p^k)`, then `w` has coefficients uniform in `[0, p^A)`. Draws happen
//! in index order before any evaluation, so reports do not depend on `--jobs`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coleman::{li_0, li_p_riemann, PolylogEngine, XPoint};
use crate::error::{Error, Result};
use crate::finite::{check_inversion_identity, check_twisted_inversion_identity, li_finite, sigma, FiniteField, FpkElement};
use crate::identities::{constants_check, gen_function_check, uniqueness_check};
use crate::padic::{make_ctx, UnramifiedCtx, WittApprox, WittRecord};
use crate::section3::{default_f_order, delprop_sides, df_value, e_route, f_congruence_sides};

pub const SCHEMA_VERSION: u32 = 1;

/// Digits of agreement required beyond the guaranteed valuation of both sides.
pub const MIN_CERTIFIED_DIGITS: i64 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    Theorem,
    Proposition1,
    Corollary,
    Maincong,
    Remark,
    Delprop,
    FLemmas,
    Identities,
    Finite,
}

impl CheckKind {
    pub const ALL: [CheckKind; 9] = [
        CheckKind::Theorem,
        CheckKind::Proposition1,
        CheckKind::Corollary,
        CheckKind::Maincong,
        CheckKind::Remark,
        CheckKind::Delprop,
        CheckKind::FLemmas,
        CheckKind::Identities,
        CheckKind::Finite,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Theorem => "theorem",
            CheckKind::Proposition1 => "proposition1",
            CheckKind::Corollary => "corollary",
            CheckKind::Maincong => "maincong",
            CheckKind::Remark => "remark",
            CheckKind::Delprop => "delprop",
            CheckKind::FLemmas => "f-lemmas",
            CheckKind::Identities => "identities",
            CheckKind::Finite => "finite",
        }
    }

    /// Smallest admissible `p` is `n + offset + 1`.
    fn prime_offset(self) -> Option<u64> {
        match self {
            CheckKind::Theorem | CheckKind::Remark | CheckKind::Maincong | CheckKind::FLemmas => Some(1),
            CheckKind::Delprop => Some(2),
            _ => None,
        }
    }

    fn min_weight(self) -> u32 {
        match self {
            CheckKind::Theorem | CheckKind::Remark | CheckKind::Identities | CheckKind::Finite => 2,
            CheckKind::Corollary | CheckKind::Maincong => 1,
            CheckKind::Proposition1 | CheckKind::Delprop | CheckKind::FLemmas => 0,
        }
    }
}

impl FromStr for CheckKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CheckKind::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown check {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunConfig {
    pub check: CheckKind,
    pub p: u64,
    pub n: u32,
    #[serde(default = "one")]
    pub k: usize,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    /// Working precision `A`.
    #[serde(default)]
    pub precision: Option<u32>,
    /// Riemann-sum level `m`.
    #[serde(default)]
    pub riemann: Option<u32>,
    /// Series truncation order `M`.
    #[serde(default)]
    pub order: Option<usize>,
    #[serde(default)]
    pub trace: bool,
    #[serde(default = "one")]
    pub jobs: usize,
}

fn one() -> usize {
    1
}

fn default_samples() -> usize {
    20
}

impl RunConfig {
    pub fn new(check: CheckKind, p: u64, n: u32, k: usize) -> Self {
        RunConfig {
            check,
            p,
            n,
            k,
            samples: default_samples(),
            seed: 0,
            precision: None,
            riemann: None,
            order: None,
            trace: false,
            jobs: 1,
        }
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// `(A, m)` before overrides.
    pub fn default_precision(&self) -> (u32, u32) {
        let n = self.n;
        match self.check {
            CheckKind::Delprop | CheckKind::FLemmas => (n + 6, n + 3),
            CheckKind::Proposition1 => (n + 4, n + 2),
            CheckKind::Corollary => (n + 4, 3),
            _ => (n + 4, n + 2),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n < self.check.min_weight() {
            return Err(Error::InvalidArgument(format!(
                "{} needs n >= {}",
                self.check.name(),
                self.check.min_weight()
            )));
        }
        if let Some(off) = self.check.prime_offset() {
            let bound = self.n as u64 + off;
            if self.p <= bound {
                return Err(Error::PrimeTooSmall { p: self.p, bound });
            }
        }
        if self.samples == 0 {
            return Err(Error::InvalidArgument("samples must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SampleRecord {
    pub index: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zbar: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<WittRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w2: Option<WittRecord>,
    pub valuation_ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lhs_residue: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rhs_residue: Option<Vec<u64>>,
    /// Agreement beyond the guaranteed valuation, for identities between
    /// p-adic values.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certified_digits: Option<i64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub parts: BTreeMap<String, bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<serde_json::Value>,
    pub pass: bool,
    /// Present on failures: feed to `--replay` to rerun this case alone.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replay: Option<ReplayRecord>,
}

impl SampleRecord {
    fn blank(index: usize) -> Self {
        SampleRecord {
            index,
            weight: None,
            zbar: None,
            w: None,
            w2: None,
            valuation_ok: false,
            lhs_residue: None,
            rhs_residue: None,
            certified_digits: None,
            parts: BTreeMap::new(),
            detail: None,
            trace: None,
            pass: false,
            replay: None,
        }
    }

    fn finish(mut self) -> Self {
        self.pass = self.valuation_ok
            && self.lhs_residue == self.rhs_residue
            && self.parts.values().all(|&b| b)
            && self.certified_digits.map_or(true, |d| d >= MIN_CERTIFIED_DIGITS);
        self
    }
}

/// Everything needed to re-execute one sample.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ReplayRecord {
    pub check: CheckKind,
    pub p: u64,
    pub n: u32,
    pub k: usize,
    #[serde(rename = "A")]
    pub a: u32,
    pub m: u32,
    #[serde(rename = "M")]
    pub order: usize,
    pub seed: u64,
    pub index: usize,
    pub zbar: Vec<u64>,
    pub w: WittRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w2: Option<WittRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Report {
    pub schema_version: u32,
    pub check: CheckKind,
    pub p: u64,
    pub n: u32,
    pub k: usize,
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    pub a: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    pub seed: u64,
    /// Monic modulus of F_{p^k} over F_p, constant term first.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hbar: Option<Vec<u64>>,
    pub per_sample: Vec<SampleRecord>,
    pub passed: usize,
    pub failed: usize,
    pub pass: bool,
}

impl Report {
    fn assemble(cfg: &RunConfig, params: Option<(&Runner, &UnramifiedCtx)>, per_sample: Vec<SampleRecord>) -> Self {
        let passed = per_sample.iter().filter(|r| r.pass).count();
        let failed = per_sample.len() - passed;
        Report {
            schema_version: SCHEMA_VERSION,
            check: cfg.check,
            p: cfg.p,
            n: cfg.n,
            k: cfg.k,
            a: params.map(|(r, _)| r.a),
            m: params.map(|(r, _)| r.m),
            order: params.map(|(r, _)| r.order),
            seed: cfg.seed,
            hbar: params.map(|(_, ctx)| ctx.field().modulus_monic()),
            per_sample,
            passed,
            failed,
            pass: failed == 0,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_csv(&self) -> String {
        let vec = |v: &Option<Vec<u64>>| {
            v.as_ref().map(|v| v.iter().map(u64::to_string).collect::<Vec<_>>().join(" ")).unwrap_or_default()
        };
        let witt = |w: &Option<WittRecord>| {
            w.as_ref()
                .map(|w| format!("{}:{}", w.scale, w.coeffs.iter().map(u64::to_string).collect::<Vec<_>>().join(" ")))
                .unwrap_or_default()
        };
        let mut out = String::from(
            "check,p,n,k,index,weight,zbar,w,valuationOk,lhsResidue,rhsResidue,certifiedDigits,pass,detail\n",
        );
        for r in &self.per_sample {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                self.check.name(),
                self.p,
                self.n,
                self.k,
                r.index,
                r.weight.map(|w| w.to_string()).unwrap_or_default(),
                vec(&r.zbar),
                witt(&r.w),
                r.valuation_ok,
                vec(&r.lhs_residue),
                vec(&r.rhs_residue),
                r.certified_digits.map(|d| d.to_string()).unwrap_or_default(),
                r.pass,
                r.detail.as_deref().unwrap_or("").replace([',', '\n'], ";"),
            );
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{} p={} n={} k={}{}: {}/{} passed\n",
            self.check.name(),
            self.p,
            self.n,
            self.k,
            match (self.a, self.m, self.order) {
                (Some(a), Some(m), Some(o)) => format!(" A={a} m={m} M={o}"),
                _ => String::new(),
            },
            self.passed,
            self.per_sample.len()
        );
        for r in self.per_sample.iter().filter(|r| !r.pass) {
            let _ = writeln!(
                out,
                "  FAIL #{} zbar={:?} lhs={:?} rhs={:?} {}",
                r.index,
                r.zbar.as_deref().unwrap_or(&[]),
                r.lhs_residue.as_deref().unwrap_or(&[]),
                r.rhs_residue.as_deref().unwrap_or(&[]),
                r.detail.as_deref().unwrap_or("")
            );
        }
        out
    }
}

#[derive(Debug, Clone)]
struct Sample {
    index: usize,
    zbar: FpkElement,
    w: WittApprox,
    w2: Option<WittApprox>,
}

fn draw_samples(ctx: &Arc<UnramifiedCtx>, count: usize, seed: u64, paired: bool) -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let field = ctx.field();
    let modulus = ctx.p_pow(ctx.precision());
    let draw_w = |rng: &mut ChaCha8Rng| {
        let coeffs: Vec<u64> = (0..ctx.degree()).map(|_| rng.gen_range(0..modulus)).collect();
        WittApprox::from_coeffs(ctx, 0, &coeffs).expect("degree matches")
    };
    (0..count)
        .map(|index| {
            let zbar = FpkElement::from_index(field, rng.gen_range(2..field.order()));
            let w = draw_w(&mut rng);
            let w2 = paired.then(|| draw_w(&mut rng));
            Sample { index, zbar, w, w2 }
        })
        .collect()
}

fn residue_vec(x: &WittApprox) -> Result<Vec<u64>> {
    Ok(x.residue()?.coeffs().to_vec())
}

/// Digits of agreement of two values, minus a guaranteed valuation floor.
fn certified(lhs: &WittApprox, rhs: &WittApprox, floor: i64, rec: &mut SampleRecord, name: &str) {
    match lhs.agreement(rhs) {
        Ok(d) => {
            let digits = d.saturating_sub(floor);
            rec.certified_digits = Some(rec.certified_digits.map_or(digits, |c| c.min(digits)));
            if digits < MIN_CERTIFIED_DIGITS {
                append(rec, format!("{name}: precision shortfall, only {digits} certified digits"));
            }
        }
        Err(v) => {
            rec.parts.insert(name.into(), false);
            append(rec, format!("{name}: sides differ at valuation {v}"));
        }
    }
}

fn append(rec: &mut SampleRecord, msg: String) {
    rec.detail = Some(match rec.detail.take() {
        Some(d) => format!("{d}; {msg}"),
        None => msg,
    });
}

fn factorial_elt(field: &Arc<FiniteField>, j: u32) -> FpkElement {
    (1..=j as i64).fold(FpkElement::one(field), |acc, i| acc.mul(&FpkElement::from_int(field, i)))
}

struct Runner {
    cfg: RunConfig,
    ctx: Arc<UnramifiedCtx>,
    a: u32,
    m: u32,
    order: usize,
    engine: Option<PolylogEngine>,
}

impl Runner {
    fn new(cfg: &RunConfig) -> Result<Self> {
        cfg.validate()?;
        let (da, dm) = cfg.default_precision();
        let a = cfg.precision.unwrap_or(da.max(cfg.riemann.unwrap_or(0)));
        let m = cfg.riemann.unwrap_or(dm.min(a));
        if a == 0 || m == 0 {
            return Err(Error::BadPrecision);
        }
        if m > a {
            return Err(Error::InvalidArgument(format!("Riemann level m = {m} exceeds precision A = {a}")));
        }
        let ctx = make_ctx(cfg.p, cfg.k, a)?;
        let n = cfg.n;
        let (engine, order) = match cfg.check {
            CheckKind::Proposition1 => (None, 0),
            CheckKind::Delprop => {
                let e = PolylogEngine::new(&ctx, n + 1, m, None)?;
                (Some(e), cfg.order.unwrap_or_else(|| default_f_order(cfg.p, a, n + 1)))
            }
            CheckKind::FLemmas => (None, cfg.order.unwrap_or_else(|| default_f_order(cfg.p, a, n + 1))),
            _ => {
                let e = PolylogEngine::new(&ctx, n, m, cfg.order)?;
                let o = e.order();
                (Some(e), o)
            }
        };
        Ok(Runner { cfg: cfg.clone(), ctx, a, m, order, engine })
    }

    fn engine(&self) -> &PolylogEngine {
        self.engine.as_ref().expect("check uses the polylog engine")
    }

    fn samples(&self) -> Vec<Sample> {
        if self.cfg.check == CheckKind::Corollary {
            let field = self.ctx.field();
            return (2..field.order())
                .enumerate()
                .map(|(index, i)| Sample {
                    index,
                    zbar: FpkElement::from_index(field, i),
                    w: WittApprox::zero(&self.ctx),
                    w2: None,
                })
                .collect();
        }
        draw_samples(&self.ctx, self.cfg.samples, self.cfg.seed, self.cfg.check == CheckKind::Theorem)
    }

    fn replay_record(&self, s: &Sample) -> ReplayRecord {
        ReplayRecord {
            check: self.cfg.check,
            p: self.cfg.p,
            n: self.cfg.n,
            k: self.cfg.k,
            a: self.a,
            m: self.m,
            order: self.order,
            seed: self.cfg.seed,
            index: s.index,
            zbar: s.zbar.coeffs().to_vec(),
            w: s.w.to_record(),
            w2: s.w2.as_ref().map(WittApprox::to_record),
        }
    }

    fn eval(&self, s: &Sample) -> SampleRecord {
        let mut rec = SampleRecord::blank(s.index);
        rec.zbar = Some(s.zbar.coeffs().to_vec());
        if self.cfg.check != CheckKind::Corollary {
            rec.w = Some(s.w.to_record());
        }
        rec.w2 = s.w2.as_ref().map(WittApprox::to_record);
        let outcome = match self.cfg.check {
            CheckKind::Theorem => self.theorem(s, &mut rec),
            CheckKind::Proposition1 => self.proposition(s, &mut rec),
            CheckKind::Corollary => self.corollary(s, &mut rec),
            CheckKind::Maincong => self.maincong(s, &mut rec),
            CheckKind::Remark => self.remark(s, &mut rec),
            CheckKind::Delprop => self.delprop(s, &mut rec),
            CheckKind::FLemmas => self.f_lemmas(s, &mut rec),
            CheckKind::Identities | CheckKind::Finite => unreachable!("exact checks are not sampled"),
        };
        if let Err(e) = outcome {
            append(&mut rec, e.to_string());
            rec.parts.insert("evaluated".into(), false);
        }
        let mut rec = rec.finish();
        if !rec.pass {
            rec.replay = Some(self.replay_record(s));
        }
        rec
    }

    fn trace(&self, rec: &mut SampleRecord, pairs: &[(&str, &WittApprox)]) {
        if self.cfg.trace {
            let map: serde_json::Map<String, serde_json::Value> = pairs
                .iter()
                .map(|(k, v)| (k.to_string(), serde_json::to_value(v.to_record()).expect("record")))
                .collect();
            rec.trace = Some(serde_json::Value::Object(map));
        }
    }

    fn theorem(&self, s: &Sample, rec: &mut SampleRecord) -> Result<()> {
        let n = self.cfg.n;
        let shift = 1 - n as i64;
        let df_at = |w: &WittApprox| -> Result<WittApprox> {
            let x = XPoint::from_parts(&s.zbar, w)?;
            self.engine().point(&x, n)?.df_n(n)
        };
        let df = df_at(&s.w)?;
        rec.valuation_ok = df.valuation_lower_bound() >= n as i64 - 1;
        rec.lhs_residue = Some(residue_vec(&df.shift(shift))?);
        rec.rhs_residue = Some(li_finite(n - 1, &sigma(&s.zbar)).coeffs().to_vec());
        if let Some(w2) = &s.w2 {
            let other = df_at(w2)?;
            let same = other.valuation_lower_bound() >= n as i64 - 1
                && residue_vec(&other.shift(shift))? == *rec.lhs_residue.as_ref().unwrap();
            rec.parts.insert("wIndependent".into(), same);
        }
        self.trace(rec, &[("dfn", &df)]);
        Ok(())
    }

    fn proposition(&self, s: &Sample, rec: &mut SampleRecord) -> Result<()> {
        let n = self.cfg.n;
        let x = XPoint::from_parts(&s.zbar, &s.w)?;
        let value = li_p_riemann(&x.z, n, self.m)?;
        rec.valuation_ok = value.valuation_lower_bound() >= 0;
        rec.lhs_residue = Some(residue_vec(&value)?);
        let one = FpkElement::one(s.zbar.field());
        let rhs = li_finite(n, &s.zbar).div(&one.sub(&s.zbar.pow(self.cfg.p)))?;
        rec.rhs_residue = Some(rhs.coeffs().to_vec());
        self.trace(rec, &[("liP", &value)]);
        Ok(())
    }

    fn corollary(&self, s: &Sample, rec: &mut SampleRecord) -> Result<()> {
        let n = self.cfg.n;
        let x = XPoint::from_parts(&s.zbar, &s.w)?;
        let li = self.engine().li_n_teich(&x.alpha, n)?.value;
        rec.valuation_ok = li.valuation_lower_bound() >= n as i64;
        rec.lhs_residue = Some(residue_vec(&li.shift(-(n as i64)))?);
        let one = FpkElement::one(s.zbar.field());
        let rhs = li_finite(n, &sigma(&s.zbar)).neg().div(&one.sub(&s.zbar))?;
        rec.rhs_residue = Some(rhs.coeffs().to_vec());
        if n % 2 == 0 && s.zbar == one.neg() {
            rec.parts.insert("extraValuationAtMinusOne".into(), li.valuation_lower_bound() > n as i64);
        }
        self.trace(rec, &[("lin", &li)]);
        Ok(())
    }

    fn maincong(&self, s: &Sample, rec: &mut SampleRecord) -> Result<()> {
        let n = self.cfg.n;
        let engine = self.engine();
        let x = XPoint::from_parts(&s.zbar, &s.w)?;
        let li = engine.li_n_at(&x, n)?.value;
        rec.valuation_ok = li.valuation_lower_bound() >= n as i64;
        rec.lhs_residue = Some(residue_vec(&li.shift(-(n as i64)))?);
        let field = s.zbar.field();
        let wbar = s.w.residue()?;
        let mut rhs = FpkElement::zero(field);
        for j in 0..=n {
            let tilde = if j == n { li_0(&x.alpha)? } else { engine.li_tilde_teich(&x.alpha, n - j)? };
            let term = tilde.residue()?.mul(&wbar.pow(j as u64)).div(&factorial_elt(field, j))?;
            rhs = rhs.add(&term);
        }
        rec.rhs_residue = Some(rhs.coeffs().to_vec());
        let g = engine.g_series(&x.alpha, n)?;
        let p = self.cfg.p;
        let lemma_ok = g.iter().enumerate().all(|(i, gi)| {
            gi.coeffs().iter().enumerate().all(|(j, c)| {
                let bound = j as i64 - i as i64 - crate::arith::vp_factorial(j as u64, p) as i64;
                c.valuation_lower_bound() >= bound
            })
        });
        rec.parts.insert("coefficientLemma".into(), lemma_ok);
        if self.cfg.trace {
            rec.trace = Some(serde_json::to_value(g[n as usize].dump()).expect("dump"));
        }
        Ok(())
    }

    fn remark(&self, s: &Sample, rec: &mut SampleRecord) -> Result<()> {
        let n = self.cfg.n;
        let engine = self.engine();
        let x = XPoint::from_parts(&s.zbar, &s.w)?;
        let at_z = engine.point(&x, n)?;
        let at_inv = engine.point(&x.inverse()?, n)?;
        let f = at_z.f_n(n)?;
        let f_inv = at_inv.f_n(n)?;
        let reflected = if n % 2 == 0 { f_inv.neg() } else { f_inv.clone() };
        let floor = n as i64;
        rec.valuation_ok = f.valuation_lower_bound() >= floor;
        rec.lhs_residue = Some(residue_vec(&f.shift(-floor))?);
        rec.rhs_residue = Some(residue_vec(&reflected.shift(-floor))?);
        rec.parts.insert("functionalEquation".into(), true);
        certified(&f, &reflected, floor, rec, "functionalEquation");
        let via_l = e_route(&at_z, n)?;
        rec.parts.insert("lRoute".into(), true);
        certified(&f, &via_l, floor, rec, "lRoute");
        self.trace(rec, &[("fn", &f), ("fnInverse", &f_inv), ("lRoute", &via_l)]);
        Ok(())
    }

    fn delprop(&self, s: &Sample, rec: &mut SampleRecord) -> Result<()> {
        let n = self.cfg.n;
        let (lhs, rhs) = delprop_sides(self.engine(), &s.zbar, &s.w, n, self.order)?;
        let floor = n as i64 + 1;
        rec.valuation_ok = lhs.valuation_lower_bound() >= floor && rhs.valuation_lower_bound() >= floor;
        rec.parts.insert("identity".into(), true);
        certified(&lhs, &rhs, floor, rec, "identity");
        self.trace(rec, &[("lhs", &lhs), ("rhs", &rhs)]);
        Ok(())
    }

    fn f_lemmas(&self, s: &Sample, rec: &mut SampleRecord) -> Result<()> {
        let n = self.cfg.n;
        let x = XPoint::from_parts(&s.zbar, &s.w)?;
        let (value, predicted) = f_congruence_sides(&x, n, self.order)?;
        rec.valuation_ok = value.valuation_lower_bound() >= n as i64;
        rec.lhs_residue = Some(residue_vec(&value.shift(-(n as i64)))?);
        rec.rhs_residue = Some(predicted.coeffs().to_vec());
        for k in 1..=n + 1 {
            let df = df_value(&x, k, self.order)?;
            rec.parts.insert(format!("dfValuation{k}"), df.valuation_lower_bound() >= k as i64);
        }
        self.trace(rec, &[("fn", &value)]);
        Ok(())
    }

    fn run_all(&self) -> Vec<SampleRecord> {
        let samples = self.samples();
        if self.cfg.jobs > 1 {
            if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(self.cfg.jobs).build() {
                return pool.install(|| samples.par_iter().map(|s| self.eval(s)).collect());
            }
        }
        samples.iter().map(|s| self.eval(s)).collect()
    }
}

fn run_identities(cfg: &RunConfig) -> Result<Report> {
    let mut records = Vec::new();
    for n in 1..=cfg.n {
        let mut rec = SampleRecord::blank(records.len());
        rec.weight = Some(n);
        rec.valuation_ok = true;
        let constants = constants_check(n);
        rec.parts.insert("constants".into(), constants.pass);
        let mut detail = format!("c = {}, d = {}", constants.c, constants.d);
        if n >= 2 {
            let u = uniqueness_check(n)?;
            rec.parts.insert("matchesClosedForm".into(), u.matches_closed_form);
            rec.parts.insert("nullityOne".into(), u.nullity == 1);
            rec.parts.insert("perturbationsDetected".into(), u.insensitive.is_empty());
            rec.parts.insert("generatingFunction".into(), gen_function_check(n).is_empty());
            let _ = write!(detail, ", a = [{}]", u.solved.join(", "));
        }
        rec.detail = Some(detail);
        records.push(rec.finish());
    }
    Ok(Report::assemble(cfg, None, records))
}

fn run_finite(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let field = FiniteField::new(cfg.p, cfg.k)?;
    let mut records = Vec::new();
    for n in 2..=cfg.n {
        let plain = check_inversion_identity(n, &field)?;
        let twisted = check_twisted_inversion_identity(n, &field)?;
        let off_prime_field = plain.counterexamples.iter().filter(|z| z.coeffs()[1..].iter().any(|&c| c != 0));
        let mut rec = SampleRecord::blank(records.len());
        rec.weight = Some(n);
        rec.valuation_ok = true;
        rec.parts.insert(
            "untwistedOnPrimeField".into(),
            off_prime_field.count() == plain.counterexamples.len(),
        );
        rec.parts.insert("frobeniusTwisted".into(), twisted.pass);
        rec.detail = Some(format!(
            "{} points; untwisted form fails at {}, twisted form at {}",
            plain.checked,
            plain.counterexamples.len(),
            twisted.counterexamples.len()
        ));
        records.push(rec.finish());
    }
    let mut report = Report::assemble(cfg, None, records);
    report.hbar = Some(field.modulus_monic());
    Ok(report)
}

/// Runs one configured check. Configuration problems are returned as
/// errors; failing samples are recorded in the report.
pub fn run(cfg: &RunConfig) -> Result<Report> {
    match cfg.check {
        CheckKind::Identities => {
            cfg.validate()?;
            run_identities(cfg)
        }
        CheckKind::Finite => run_finite(cfg),
        _ => {
            let runner = Runner::new(cfg)?;
            let records = runner.run_all();
            Ok(Report::assemble(cfg, Some((&runner, &runner.ctx)), records))
        }
    }
}

/// Re-executes exactly the sample described by `record`.
pub fn replay(record: &ReplayRecord, trace: bool) -> Result<Report> {
    let mut cfg = RunConfig::new(record.check, record.p, record.n, record.k);
    cfg.seed = record.seed;
    cfg.samples = 1;
    cfg.precision = Some(record.a);
    cfg.riemann = Some(record.m);
    cfg.order = Some(record.order);
    cfg.trace = trace;
    if matches!(cfg.check, CheckKind::Identities | CheckKind::Finite) {
        return Err(Error::InvalidArgument("exact checks have nothing to replay".into()));
    }
    let runner = Runner::new(&cfg)?;
    let ctx = runner.ctx.clone();
    let sample = Sample {
        index: record.index,
        zbar: FpkElement::new(ctx.field(), &record.zbar)?,
        w: WittApprox::from_record(&ctx, &record.w)?,
        w2: record.w2.as_ref().map(|w| WittApprox::from_record(&ctx, w)).transpose()?,
    };
    let rec = runner.eval(&sample);
    Ok(Report::assemble(&cfg, Some((&runner, &ctx)), vec![rec]))
}

/// Parses either a bare replay record or a sample record carrying one.
pub fn parse_replay(text: &str) -> Result<ReplayRecord> {
    if let Ok(r) = serde_json::from_str::<ReplayRecord>(text) {
        return Ok(r);
    }
    let sample: SampleRecord =
        serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("unreadable replay record: {e}")))?;
    sample.replay.ok_or_else(|| Error::InvalidArgument("sample record has no replay data".into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Matrix {
    Small,
    Full,
}

impl FromStr for Matrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "small" => Ok(Matrix::Small),
            "full" => Ok(Matrix::Full),
            _ => Err(Error::InvalidArgument(format!("unknown matrix {s:?}"))),
        }
    }
}

/// The configurations run by `verify all`.
pub fn matrix(kind: Matrix, seed: u64) -> Vec<RunConfig> {
    let full = kind == Matrix::Full;
    let mut out = Vec::new();
    let mut push = |check, p: u64, n: u32, k: usize, samples: usize| {
        out.push(RunConfig::new(check, p, n, k).with_samples(samples).with_seed(seed));
    };
    let primes: &[u64] = if full { &[5, 7, 11, 13] } else { &[5, 7] };
    let degrees: &[usize] = &[1, 2];
    for &p in primes {
        for n in 2..=4 {
            for &k in degrees {
                if p > n as u64 + 1 {
                    push(CheckKind::Theorem, p, n, k, if full { 20 } else { 3 });
                }
            }
        }
    }
    let small_primes: &[u64] = if full { &[5, 7, 11] } else { &[5, 7] };
    for &p in small_primes {
        for n in 1..=3 {
            for &k in degrees {
                push(CheckKind::Proposition1, p, n, k, if full { 50 } else { 5 });
                if p > n as u64 + 1 {
                    push(CheckKind::Maincong, p, n, k, if full { 50 } else { 5 });
                }
            }
        }
    }
    let corollary_fields: &[(u64, usize)] = if full {
        &[(3, 1), (3, 2), (3, 3), (5, 1), (5, 2), (7, 1), (7, 2), (11, 1), (13, 1), (17, 1), (19, 1), (23, 1), (29, 1), (31, 1), (37, 1), (41, 1), (43, 1), (47, 1)]
    } else {
        &[(5, 1), (5, 2), (7, 2)]
    };
    for &(p, k) in corollary_fields {
        for n in 1..=3 {
            push(CheckKind::Corollary, p, n, k, 1);
        }
    }
    for &p in small_primes {
        for n in 2..=3 {
            for &k in degrees {
                if p > n as u64 + 1 {
                    push(CheckKind::Remark, p, n, k, if full { 20 } else { 3 });
                }
            }
        }
        for n in 0..=3 {
            for &k in degrees {
                if p > n as u64 + 2 {
                    push(CheckKind::Delprop, p, n, k, if full { 10 } else { 2 });
                    push(CheckKind::FLemmas, p, n, k, if full { 10 } else { 2 });
                }
            }
        }
    }
    push(CheckKind::Identities, 5, if full { 20 } else { 12 }, 1, 1);
    let finite_primes: &[u64] = if full { &[5, 7, 11, 13] } else { &[5, 7] };
    for &p in finite_primes {
        for &k in degrees {
            push(CheckKind::Finite, p, 6, k, 1);
        }
    }
    out
}
