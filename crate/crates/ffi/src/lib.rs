//! C ABI over `polylog-core`.
//!
//! Every function returns a [`PolylogStatus`]; on failure the message is
//! available from `polylog_last_error` on the same thread. Elements of
//! `F_{p^k}` cross the boundary as their integer index
//! `c_0 + c_1 p + ... + c_{k-1} p^{k-1}`. Strings returned through an out
//! pointer are owned by the caller and released with `polylog_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, UnwindSafe};
use std::sync::Arc;

use polylog::coleman::{a_coeffs, PolylogEngine, XPoint};
use polylog::finite::{li_finite, sigma, FpkElement};
use polylog::padic::teichmuller;
use polylog::verify::{self, RunConfig};
use polylog::{make_ctx, Error, UnramifiedCtx, WittApprox};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolylogStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidJson = 3,
    InvalidArgument = 4,
    NotOddPrime = 5,
    PrecisionTooLarge = 6,
    PrimeTooSmall = 7,
    DivisionByZero = 8,
    PrecisionExhausted = 9,
    Domain = 10,
    Overflow = 11,
    /// The run completed and its report is available, but some sample failed.
    VerificationFailed = 12,
    Internal = 13,
    Panic = 14,
}

/// A `W(F_{p^k})` context at a fixed working precision.
pub struct PolylogCtx {
    ctx: Arc<UnramifiedCtx>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

struct Fail(PolylogStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        use PolylogStatus as S;
        let status = match &e {
            Error::NotOddPrime(_) => S::NotOddPrime,
            Error::PrecisionTooLarge { .. } => S::PrecisionTooLarge,
            Error::PrimeTooSmall { .. } => S::PrimeTooSmall,
            Error::DivisionByZero => S::DivisionByZero,
            Error::PrecisionExhausted(_) | Error::TailNotCertified { .. } => S::PrecisionExhausted,
            Error::LogDomain | Error::TeichmullerOfZero | Error::NotInX | Error::NotIntegral(_) => S::Domain,
            Error::NonIntegralRational(_) => S::Domain,
            Error::BadDegree | Error::BadPrecision | Error::InvalidArgument(_) | Error::ContextMismatch => {
                S::InvalidArgument
            }
            Error::VariableMismatch | Error::Singular(_) | Error::Assertion(_) => S::Internal,
        };
        Fail(status, e.to_string())
    }
}

fn fail<T>(status: PolylogStatus, msg: impl Into<String>) -> Result<T, Fail> {
    Err(Fail(status, msg.into()))
}

fn guard(f: impl FnOnce() -> Result<PolylogStatus, Fail> + UnwindSafe) -> PolylogStatus {
    match catch_unwind(f) {
        Ok(Ok(status)) => status,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            PolylogStatus::Panic
        }
    }
}

unsafe fn ctx_ref<'a>(ctx: *const PolylogCtx) -> Result<&'a PolylogCtx, Fail> {
    ctx.as_ref().map_or_else(|| fail(PolylogStatus::NullPointer, "null context"), Ok)
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<PolylogStatus, Fail> {
    if out.is_null() {
        return fail(PolylogStatus::NullPointer, "null output pointer");
    }
    out.write(value);
    Ok(PolylogStatus::Ok)
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<PolylogStatus, Fail> {
    let c = CString::new(s).map_err(|_| Fail(PolylogStatus::Internal, "interior nul".into()))?;
    write(out, c.into_raw())
}

fn element(ctx: &PolylogCtx, index: u64) -> Result<FpkElement, Fail> {
    let field = ctx.ctx.field();
    if index >= field.order() {
        return fail(PolylogStatus::InvalidArgument, format!("index {index} is not below q = {}", field.order()));
    }
    Ok(FpkElement::from_index(field, index))
}

/// Message of the last failing call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn polylog_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn polylog_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn polylog_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Creates a context for `W(F_{p^k})` modulo `p^precision`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn polylog_ctx_new(p: u64, k: usize, precision: u32, out: *mut *mut PolylogCtx) -> PolylogStatus {
    guard(|| {
        let ctx = make_ctx(p, k, precision)?;
        write(out, Box::into_raw(Box::new(PolylogCtx { ctx })))
    })
}

/// Releases a context. NULL is ignored.
///
/// # Safety
/// `ctx` must come from `polylog_ctx_new` and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn polylog_ctx_free(ctx: *mut PolylogCtx) {
    if !ctx.is_null() {
        drop(Box::from_raw(ctx));
    }
}

/// Number of elements `q = p^k` of the residue field.
///
/// # Safety
/// `ctx` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn polylog_ctx_field_order(ctx: *const PolylogCtx, out: *mut u64) -> PolylogStatus {
    guard(|| {
        let c = ctx_ref(ctx)?;
        write(out, c.ctx.field().order())
    })
}

/// Finite polylogarithm `li_n(x) = sum_{0<j<p} x^j / j^n` in `F_{p^k}`.
///
/// # Safety
/// `ctx` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn polylog_li_finite(ctx: *const PolylogCtx, n: u32, x: u64, out: *mut u64) -> PolylogStatus {
    guard(|| {
        let c = ctx_ref(ctx)?;
        let x = element(c, x)?;
        write(out, li_finite(n, &x).index())
    })
}

/// Inverse Frobenius `x -> x^{1/p}` in `F_{p^k}`.
///
/// # Safety
/// `ctx` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn polylog_sigma(ctx: *const PolylogCtx, x: u64, out: *mut u64) -> PolylogStatus {
    guard(|| {
        let c = ctx_ref(ctx)?;
        let x = element(c, x)?;
        write(out, sigma(&x).index())
    })
}

/// Teichmüller lift of a nonzero residue, as a JSON element record.
///
/// # Safety
/// `ctx` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn polylog_teichmuller(ctx: *const PolylogCtx, x: u64, out: *mut *mut c_char) -> PolylogStatus {
    guard(|| {
        let c = ctx_ref(ctx)?;
        let x = element(c, x)?;
        let t = teichmuller(&c.ctx, &x)?;
        write_string(out, serde_json::to_string(&t.to_record()).expect("record serializes"))
    })
}

/// `Li_0(z), ..., Li_n(z)` at `z = [zbar](1 + p w)` as a JSON array of
/// element records. `w` holds `k` integer coordinates (fewer are padded with
/// zeros). A `riemann` level of 0 selects `precision - 2`.
///
/// # Safety
/// `ctx` and `out` must be valid pointers; `w` must point to `w_len` values
/// or be NULL when `w_len` is 0.
#[no_mangle]
pub unsafe extern "C" fn polylog_li_padic(
    ctx: *const PolylogCtx,
    n: u32,
    zbar: u64,
    w: *const u64,
    w_len: usize,
    riemann: u32,
    out: *mut *mut c_char,
) -> PolylogStatus {
    guard(|| {
        let c = ctx_ref(ctx)?;
        let zbar = element(c, zbar)?;
        let coords: &[u64] = if w_len == 0 {
            &[]
        } else if w.is_null() {
            return fail(PolylogStatus::NullPointer, "null w with nonzero length");
        } else {
            std::slice::from_raw_parts(w, w_len)
        };
        let w = if coords.is_empty() {
            WittApprox::zero(&c.ctx)
        } else {
            WittApprox::from_coeffs(&c.ctx, 0, coords)?
        };
        let m = if riemann == 0 { c.ctx.precision().saturating_sub(2).max(1) } else { riemann };
        let engine = PolylogEngine::new(&c.ctx, n, m, None)?;
        let x = XPoint::from_parts(&zbar, &w)?;
        let values: Vec<_> = engine.li_all_at(&x, n)?.iter().map(WittApprox::to_record).collect();
        write_string(out, serde_json::to_string(&values).expect("records serialize"))
    })
}

/// The rational coefficient `a_k` of `F_n` as `num / den` in lowest terms.
///
/// # Safety
/// `num` and `den` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn polylog_a_coeff(n: u32, k: u32, num: *mut i64, den: *mut u64) -> PolylogStatus {
    guard(|| {
        if num.is_null() || den.is_null() {
            return fail(PolylogStatus::NullPointer, "null output pointer");
        }
        if k >= n.max(1) {
            return fail(PolylogStatus::InvalidArgument, format!("need k < n (k = {k}, n = {n})"));
        }
        let a = &a_coeffs(n)[k as usize];
        let (Ok(p), Ok(q)) = (i64::try_from(a.numer()), u64::try_from(a.denom())) else {
            return fail(PolylogStatus::Overflow, format!("a_{k} for n = {n} does not fit 64 bits"));
        };
        write(num, p)?;
        write(den, q)
    })
}

/// Runs a verification described by a JSON configuration
/// (`{"check": "theorem", "p": 7, "n": 2, ...}`) and returns the JSON report.
/// Returns `POLYLOG_STATUS_VERIFICATION_FAILED` with the report still written
/// when some sample fails.
///
/// # Safety
/// `config_json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn polylog_verify(config_json: *const c_char, out: *mut *mut c_char) -> PolylogStatus {
    guard(|| {
        if config_json.is_null() {
            return fail(PolylogStatus::NullPointer, "null configuration");
        }
        let text = CStr::from_ptr(config_json)
            .to_str()
            .map_err(|e| Fail(PolylogStatus::InvalidUtf8, e.to_string()))?;
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| Fail(PolylogStatus::InvalidJson, e.to_string()))?;
        let report = verify::run(&cfg)?;
        let pass = report.pass;
        write_string(out, report.to_json())?;
        if pass {
            Ok(PolylogStatus::Ok)
        } else {
            set_error(format!("{} failed on {} of {} samples", cfg.check.name(), report.failed, report.passed + report.failed));
            Ok(PolylogStatus::VerificationFailed)
        }
    })
}
