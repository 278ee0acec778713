//! C ABI over `kpp-core`.
//!
//! Conventions:
//! * every fallible function returns a [`KppStatus`]; on failure a message is
//!   available from [`kpp_last_error_message`] on the calling thread;
//! * objects are opaque handles created by `*_new`/`*_find`/`*_run` and released
//!   with the matching `*_free`;
//! * arrays are caller-allocated; state vectors have 3 entries, Jacobians 9
//!   (row-major).
//!
//! The header `include/kpp.h` is generated from this file by the build script.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use kpp_core::bifurcation;
use kpp_core::dynamics::{self, LimitCycleRecord};
use kpp_core::model::{self, Circulant3, ModelParams, StateVec};
use kpp_core::pde::{self, SimConfig, SimulationOutput};
use kpp_core::KppError;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KppStatus {
    Ok = 0,
    InvalidArgument = 1,
    NullPointer = 2,
    NoHopfInstability = 3,
    NonFinite = 4,
    NoConvergence = 5,
    Inconsistency = 6,
    Cfl = 7,
    InsufficientData = 8,
    Io = 9,
    BufferTooSmall = 10,
    Panic = 11,
}

/// Front trace selector for simulation queries.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KppTraceKind {
    LevelSet = 0,
    OscEnvelope = 1,
}

/// Spectrum of the linearisation at the coexistence state.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KppHopfReport {
    pub mu: f64,
    pub lambda_re: f64,
    pub lambda_im: f64,
    pub stable: bool,
    pub mu_h: f64,
    pub mu_minus: f64,
    pub mu_plus: f64,
}

/// Opaque model parameters.
pub struct KppModel {
    params: ModelParams,
}

/// Opaque limit cycle.
pub struct KppLimitCycle {
    cycle: LimitCycleRecord,
}

/// Opaque simulation result.
pub struct KppSimulation {
    output: SimulationOutput,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &KppError) -> KppStatus {
    match e {
        KppError::InvalidParameter(_) => KppStatus::InvalidArgument,
        KppError::NonFinite { .. } | KppError::NegativeState { .. } | KppError::Singular(_) => KppStatus::NonFinite,
        KppError::NoHopfInstability { .. } => KppStatus::NoHopfInstability,
        KppError::NoConvergence(_) => KppStatus::NoConvergence,
        KppError::Inconsistency(_) => KppStatus::Inconsistency,
        KppError::Cfl { .. } => KppStatus::Cfl,
        KppError::InsufficientData(_) => KppStatus::InsufficientData,
        KppError::Io(_) => KppStatus::Io,
    }
}

struct Failure(KppStatus, String);

impl From<KppError> for Failure {
    fn from(e: KppError) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(KppStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into a status and a stored message.
fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> KppStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            KppStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(&format!("internal panic: {msg}"));
            KppStatus::Panic
        }
    }
}

unsafe fn read3(p: *const f64, what: &str) -> Result<[f64; 3], Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok([*p, *p.add(1), *p.add(2)])
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

/// Message of the last failed call on this thread (empty after a success).
/// The pointer stays valid until the next call into this library on the thread.
#[no_mangle]
pub extern "C" fn kpp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn kpp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Default mutation and competition matrices with mutation strength `mu > 0`.
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn kpp_model_new(mu: f64, out: *mut *mut KppModel) -> KppStatus {
    guard(|| {
        let slot = out_ref(out, "out")?;
        let params = ModelParams::new(mu)?;
        *slot = Box::into_raw(Box::new(KppModel { params }));
        Ok(())
    })
}

/// Model with custom circulant rows `(a, b, c)` for the mutation and competition matrices.
///
/// # Safety
/// `mutation_row` and `competition_row` must point to 3 doubles; `out` to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn kpp_model_new_with_rows(
    mu: f64,
    mutation_row: *const f64,
    competition_row: *const f64,
    out: *mut *mut KppModel,
) -> KppStatus {
    guard(|| {
        let m = read3(mutation_row, "mutation_row")?;
        let c = read3(competition_row, "competition_row")?;
        let slot = out_ref(out, "out")?;
        let params = ModelParams::with_rows(mu, Circulant3::new(m[0], m[1], m[2]), Circulant3::new(c[0], c[1], c[2]))?;
        *slot = Box::into_raw(Box::new(KppModel { params }));
        Ok(())
    })
}

/// Releases a model; null is ignored.
///
/// # Safety
/// `model` must come from `kpp_model_new*` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn kpp_model_free(model: *mut KppModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Reaction term `u + μMu − (Cu)∘u`.
///
/// # Safety
/// `u` and `out` must point to 3 doubles; `model` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn kpp_reaction(model: *const KppModel, u: *const f64, out: *mut f64) -> KppStatus {
    guard(|| {
        let m = model.as_ref().ok_or_else(|| null("model"))?;
        let v = read3(u, "u")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let r = model::reaction(&StateVec::from_array(v), &m.params)?;
        for (i, x) in r.to_array().iter().enumerate() {
            *out.add(i) = *x;
        }
        Ok(())
    })
}

/// Jacobian of the reaction term, 9 doubles in row-major order.
///
/// # Safety
/// `u` must point to 3 doubles and `out` to 9; `model` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn kpp_jacobian(model: *const KppModel, u: *const f64, out: *mut f64) -> KppStatus {
    guard(|| {
        let m = model.as_ref().ok_or_else(|| null("model"))?;
        let v = read3(u, "u")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let sv = StateVec::from_array(v);
        if !sv.is_finite() {
            return Err(KppError::NonFinite {
                context: "in jacobian input".into(),
            }
            .into());
        }
        let j = model::jacobian(&sv, &m.params);
        for i in 0..3 {
            for k in 0..3 {
                *out.add(3 * i + k) = j[(i, k)];
            }
        }
        Ok(())
    })
}

/// Hopf spectrum of the default system at `mu`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn kpp_hopf_analysis(mu: f64, out: *mut KppHopfReport) -> KppStatus {
    guard(|| {
        let slot = out_ref(out, "out")?;
        let r = bifurcation::hopf_analysis(mu)?;
        *slot = KppHopfReport {
            mu: r.mu,
            lambda_re: r.lambda.re,
            lambda_im: r.lambda.im,
            stable: r.stable,
            mu_h: r.mu_h,
            mu_minus: r.mu_minus,
            mu_plus: r.mu_plus,
        };
        Ok(())
    })
}

/// First Lyapunov coefficient of the default system at the Hopf point.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn kpp_first_lyapunov_coefficient(out: *mut f64) -> KppStatus {
    guard(|| {
        let slot = out_ref(out, "out")?;
        *slot = bifurcation::first_lyapunov_coefficient()?;
        Ok(())
    })
}

/// Invasion speed of 0 (always 2) and the linear speed `2√(Re λ)` for `mu < μ_H`.
///
/// # Safety
/// `c_zero` and `c_lin` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn kpp_spreading_speeds(mu: f64, c_zero: *mut f64, c_lin: *mut f64) -> KppStatus {
    guard(|| {
        let a = out_ref(c_zero, "c_zero")?;
        let b = out_ref(c_lin, "c_lin")?;
        let s = bifurcation::spreading_speeds(mu)?;
        *a = s.c_zero_invasion;
        *b = s.c_lin;
        Ok(())
    })
}

/// Speed threshold `7/(20√(μ_H − μ))` for `mu < μ_H`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn kpp_sherratt_threshold(mu: f64, out: *mut f64) -> KppStatus {
    guard(|| {
        let slot = out_ref(out, "out")?;
        *slot = bifurcation::sherratt_threshold(mu)?;
        Ok(())
    })
}

/// Limit cycle of the diffusionless system for `0 < mu < μ_H` (default settings).
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn kpp_limit_cycle_find(mu: f64, out: *mut *mut KppLimitCycle) -> KppStatus {
    guard(|| {
        let slot = out_ref(out, "out")?;
        let cycle = dynamics::find_limit_cycle(mu)?;
        *slot = Box::into_raw(Box::new(KppLimitCycle { cycle }));
        Ok(())
    })
}

/// Period of a cycle; NaN for a null handle.
///
/// # Safety
/// `cycle` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kpp_limit_cycle_period(cycle: *const KppLimitCycle) -> f64 {
    cycle.as_ref().map_or(f64::NAN, |c| c.cycle.period)
}

/// Largest `|β|` along a cycle; NaN for a null handle.
///
/// # Safety
/// `cycle` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kpp_limit_cycle_beta_max(cycle: *const KppLimitCycle) -> f64 {
    cycle.as_ref().map_or(f64::NAN, |c| c.cycle.beta_max)
}

/// Number of stored samples (each 3 doubles); 0 for a null handle.
///
/// # Safety
/// `cycle` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kpp_limit_cycle_len(cycle: *const KppLimitCycle) -> usize {
    cycle.as_ref().map_or(0, |c| c.cycle.samples.len())
}

/// Copies the samples as `u1, u2, u3` triples into `buf` of `capacity` doubles.
///
/// # Safety
/// `buf` must point to `capacity` writable doubles; `cycle` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn kpp_limit_cycle_copy_samples(
    cycle: *const KppLimitCycle,
    buf: *mut f64,
    capacity: usize,
) -> KppStatus {
    guard(|| {
        let c = cycle.as_ref().ok_or_else(|| null("cycle"))?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let need = 3 * c.cycle.samples.len();
        if capacity < need {
            return Err(Failure(
                KppStatus::BufferTooSmall,
                format!("buffer holds {capacity} doubles, need {need}"),
            ));
        }
        for (i, s) in c.cycle.samples.iter().enumerate() {
            for (k, x) in s.to_array().iter().enumerate() {
                *buf.add(3 * i + k) = *x;
            }
        }
        Ok(())
    })
}

/// Releases a cycle; null is ignored.
///
/// # Safety
/// `cycle` must come from `kpp_limit_cycle_find` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn kpp_limit_cycle_free(cycle: *mut KppLimitCycle) {
    if !cycle.is_null() {
        drop(Box::from_raw(cycle));
    }
}

/// Floquet multipliers (real and imaginary parts) and exponents of the shifted
/// operator `A(t) − ω²I` along a cycle, sorted by decreasing modulus.
///
/// # Safety
/// The three output pointers must each hold 3 doubles; `cycle` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn kpp_floquet(
    cycle: *const KppLimitCycle,
    omega: f64,
    multipliers_re: *mut f64,
    multipliers_im: *mut f64,
    exponents: *mut f64,
) -> KppStatus {
    guard(|| {
        let c = cycle.as_ref().ok_or_else(|| null("cycle"))?;
        if multipliers_re.is_null() || multipliers_im.is_null() || exponents.is_null() {
            return Err(null("output array"));
        }
        let params = ModelParams::new(c.cycle.mu)?;
        let r = dynamics::floquet(&c.cycle, &params, omega)?;
        for i in 0..3 {
            *multipliers_re.add(i) = r.multipliers[i].re;
            *multipliers_im.add(i) = r.multipliers[i].im;
            *exponents.add(i) = r.exponents[i];
        }
        Ok(())
    })
}

/// Runs a simulation from a JSON configuration (unset fields take the full-scale
/// defaults; unknown fields are rejected). A null or empty string uses the defaults.
///
/// # Safety
/// `config_json` must be null or a NUL-terminated string; `out` a handle slot.
#[no_mangle]
pub unsafe extern "C" fn kpp_simulation_run(config_json: *const c_char, out: *mut *mut KppSimulation) -> KppStatus {
    guard(|| {
        let slot = out_ref(out, "out")?;
        let cfg: SimConfig = if config_json.is_null() {
            SimConfig::default()
        } else {
            let text = CStr::from_ptr(config_json)
                .to_str()
                .map_err(|_| Failure(KppStatus::InvalidArgument, "config is not UTF-8".into()))?;
            if text.trim().is_empty() {
                SimConfig::default()
            } else {
                serde_json::from_str(text).map_err(|e| Failure(KppStatus::InvalidArgument, format!("config: {e}")))?
            }
        };
        let output = pde::simulate(&cfg)?;
        *slot = Box::into_raw(Box::new(KppSimulation { output }));
        Ok(())
    })
}

fn trace(sim: &KppSimulation, kind: KppTraceKind) -> &pde::FrontTrace {
    match kind {
        KppTraceKind::LevelSet => &sim.output.level_trace,
        KppTraceKind::OscEnvelope => &sim.output.envelope_trace,
    }
}

/// Number of samples of a front trace; 0 for a null handle.
///
/// # Safety
/// `sim` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kpp_simulation_trace_len(sim: *const KppSimulation, kind: KppTraceKind) -> usize {
    sim.as_ref().map_or(0, |s| trace(s, kind).times.len())
}

/// Copies a front trace; gaps are written as NaN.
///
/// # Safety
/// `times` and `positions` must each hold `capacity` doubles; `sim` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn kpp_simulation_copy_trace(
    sim: *const KppSimulation,
    kind: KppTraceKind,
    times: *mut f64,
    positions: *mut f64,
    capacity: usize,
) -> KppStatus {
    guard(|| {
        let s = sim.as_ref().ok_or_else(|| null("sim"))?;
        if times.is_null() || positions.is_null() {
            return Err(null("output array"));
        }
        let tr = trace(s, kind);
        if capacity < tr.times.len() {
            return Err(Failure(
                KppStatus::BufferTooSmall,
                format!("buffer holds {capacity} samples, need {}", tr.times.len()),
            ));
        }
        for (i, (t, x)) in tr.times.iter().zip(&tr.positions).enumerate() {
            *times.add(i) = *t;
            *positions.add(i) = x.unwrap_or(f64::NAN);
        }
        Ok(())
    })
}

/// Least-squares front speed over `[t0, t1]`.
///
/// # Safety
/// `speed` and `r2` must be valid pointers; `sim` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn kpp_simulation_estimate_speed(
    sim: *const KppSimulation,
    kind: KppTraceKind,
    t0: f64,
    t1: f64,
    speed: *mut f64,
    r2: *mut f64,
) -> KppStatus {
    guard(|| {
        let s = sim.as_ref().ok_or_else(|| null("sim"))?;
        let a = out_ref(speed, "speed")?;
        let b = out_ref(r2, "r2")?;
        let e = pde::estimate_speed(trace(s, kind), (t0, t1))?;
        *a = e.speed;
        *b = e.r2;
        Ok(())
    })
}

/// Releases a simulation; null is ignored.
///
/// # Safety
/// `sim` must come from `kpp_simulation_run` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn kpp_simulation_free(sim: *mut KppSimulation) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}
