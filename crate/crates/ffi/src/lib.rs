//! C ABI for `entsup`.
//!
//! Conventions:
//! * every fallible function returns an [`EntsupStatus`] and writes its
//!   result through an out-pointer; on failure a message is available from
//!   [`entsup_last_error_message`] on the same thread;
//! * states are opaque [`EntsupState`] handles created by the
//!   `entsup_state_*` constructors and released with [`entsup_state_free`];
//! * coefficient pairs are given as `|α|` plus two phases, with
//!   `|β| = √(1 - |α|²)`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use entsup::bounds::{self, Coefficients, ComponentMeasures, UpperForms};
use entsup::oracle::{self, DecompositionSearch, Direction, Objective};
use entsup::states::{self, Dims, Fixture, PureTripartiteState, SampleMode};
use entsup::{measures, Error};
use num_complex::Complex64;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntsupStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Dimension = 3,
    /// Non-normalized input, failed eigensolve, non-PSD matrix and the like.
    Numerical = 4,
    Parse = 5,
    Io = 6,
    Unsupported = 7,
    /// A Rust panic was caught at the boundary.
    Internal = 8,
}

/// Opaque tripartite pure state.
pub struct EntsupState {
    inner: PureTripartiteState,
}

/// Entanglement of the `A ⊗ B` reduction of a `(2, 2, n)` state.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EntsupMeasures {
    /// Entanglement of formation, ebits.
    pub entropy_e: f64,
    pub concurrence_c: f64,
    pub coa_ca: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EntsupUpperForms {
    pub sym: f64,
    pub asym1: f64,
    pub asym2: f64,
    /// Smallest of the three.
    pub best: f64,
}

/// Bounds for `Γ = αΦ + βΨ`; every bound is on the weighted value
/// `‖Γ‖²·measure`, the `*_actual` fields are measures of the normalized `Γ`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EntsupBoundReport {
    pub norm_sq_gamma: f64,
    pub c_actual: f64,
    pub c_upper: EntsupUpperForms,
    pub c_lower: f64,
    pub ca_actual: f64,
    pub ca_upper: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntsupObjective {
    Concurrence = 0,
    Entropy = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntsupDirection {
    Min = 0,
    Max = 1,
}

/// Decomposition-search budget; `ensemble_size = 0` selects twice the rank.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntsupSearch {
    pub ensemble_size: usize,
    pub restarts: usize,
    pub sweeps: usize,
    pub tolerance: f64,
}

impl From<EntsupSearch> for DecompositionSearch {
    fn from(s: EntsupSearch) -> Self {
        Self {
            ensemble_size: (s.ensemble_size > 0).then_some(s.ensemble_size),
            restarts: s.restarts,
            sweeps: s.sweeps,
            tolerance: s.tolerance,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

enum Failure {
    Null(&'static str),
    Core(Error),
    Arg(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self::Core(e)
    }
}

fn status_of(e: &Error) -> EntsupStatus {
    match e {
        Error::NotSquare { .. } | Error::Dimension(_) => EntsupStatus::Dimension,
        Error::NotHermitian(_)
        | Error::NotPsd(_)
        | Error::InvalidDensity(_)
        | Error::NotNormalized(_)
        | Error::ZeroNorm
        | Error::Completeness(_)
        | Error::NotIsometry(_)
        | Error::FixtureNorm { .. } => EntsupStatus::Numerical,
        Error::CoefficientNorm(_) | Error::OutOfRange(_) => EntsupStatus::InvalidArgument,
        Error::Parse { .. } => EntsupStatus::Parse,
        Error::Io(_) => EntsupStatus::Io,
        Error::Unsupported(_) => EntsupStatus::Unsupported,
    }
}

/// Runs `f`, catching panics and recording the failure message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> EntsupStatus {
    let (status, msg) = match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => (EntsupStatus::Ok, String::new()),
        Ok(Err(Failure::Null(what))) => (EntsupStatus::NullPointer, format!("null pointer: {what}")),
        Ok(Err(Failure::Core(e))) => (status_of(&e), e.to_string()),
        Ok(Err(Failure::Arg(m))) => (EntsupStatus::InvalidArgument, m),
        Err(_) => (EntsupStatus::Internal, "internal panic".to_string()),
    };
    set_last_error(&msg);
    status
}

unsafe fn state_ref<'a>(p: *const EntsupState, what: &'static str) -> Result<&'a PureTripartiteState, Failure> {
    // SAFETY: caller passes a live handle or null.
    unsafe { p.as_ref() }.map(|s| &s.inner).ok_or(Failure::Null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &'static str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null(what));
    }
    // SAFETY: non-null and, per the caller contract, valid for writes.
    unsafe { out.write(value) };
    Ok(())
}

unsafe fn c_str<'a>(s: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(Failure::Null(what));
    }
    // SAFETY: caller passes a NUL-terminated string.
    unsafe { CStr::from_ptr(s) }
        .to_str()
        .map_err(|_| Failure::Arg(format!("{what} is not valid UTF-8")))
}

fn boxed(state: PureTripartiteState) -> *mut EntsupState {
    Box::into_raw(Box::new(EntsupState { inner: state }))
}

fn coefficients(abs_alpha: f64, phase_alpha: f64, phase_beta: f64) -> Result<Coefficients, Failure> {
    Ok(Coefficients::from_abs_alpha(abs_alpha, phase_alpha, phase_beta)?)
}

fn upper(forms: UpperForms) -> EntsupUpperForms {
    EntsupUpperForms {
        sym: forms.sym,
        asym1: forms.asym1,
        asym2: forms.asym2,
        best: forms.best(),
    }
}

/// Message describing the last failure on this thread; empty after a
/// successful call. Valid until the next call into the library.
#[no_mangle]
pub extern "C" fn entsup_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn entsup_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a state from `da·db·dc` amplitudes in `(a·dB + b)·dC + c` order.
/// `im` may be null for real amplitudes.
///
/// # Safety
/// `re` (and `im` when non-null) must point to `da·db·dc` readable doubles;
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn entsup_state_new(
    da: usize,
    db: usize,
    dc: usize,
    re: *const f64,
    im: *const f64,
    out: *mut *mut EntsupState,
) -> EntsupStatus {
    guard(|| {
        let dims = Dims::new(da, db, dc)?;
        if re.is_null() {
            return Err(Failure::Null("re"));
        }
        let n = dims.total();
        // SAFETY: caller guarantees `n` readable doubles.
        let re = unsafe { std::slice::from_raw_parts(re, n) };
        let im = if im.is_null() {
            None
        } else {
            // SAFETY: as above.
            Some(unsafe { std::slice::from_raw_parts(im, n) })
        };
        let amps = (0..n)
            .map(|i| Complex64::new(re[i], im.map_or(0.0, |v| v[i])))
            .collect();
        let state = PureTripartiteState::new(dims, amps)?;
        unsafe { write_out(out, boxed(state), "out") }
    })
}

/// Reads a state file (`dims dA dB dC` header, one `re im` line per
/// amplitude).
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn entsup_state_from_file(path: *const c_char, out: *mut *mut EntsupState) -> EntsupStatus {
    guard(|| {
        let path = unsafe { c_str(path, "path") }?;
        let state = states::read_state_file(path)?;
        unsafe { write_out(out, boxed(state), "out") }
    })
}

/// Built-in state by name: `phi33`, `psi34` (normalized fixtures), `ghz`,
/// `w`, `bell` (Bell pair times `|0>` on C).
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn entsup_state_fixture(name: *const c_char, out: *mut *mut EntsupState) -> EntsupStatus {
    guard(|| {
        let name = unsafe { c_str(name, "name") }?;
        let state = match name {
            "ghz" => states::ghz(),
            "w" => states::w_state(),
            "bell" => states::bell_product(2),
            other => states::load_fixture(other.parse::<Fixture>()?)?,
        };
        unsafe { write_out(out, boxed(state), "out") }
    })
}

/// Haar-random state from the stream `(seed, index)`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn entsup_state_random(
    da: usize,
    db: usize,
    dc: usize,
    seed: u64,
    index: u64,
    out: *mut *mut EntsupState,
) -> EntsupStatus {
    guard(|| {
        let dims = Dims::new(da, db, dc)?;
        let mut rng = states::stream_rng(seed, index);
        let state = states::sample_with(dims, SampleMode::ComplexGaussian, &mut rng);
        unsafe { write_out(out, boxed(state), "out") }
    })
}

/// Releases a state; null is ignored.
///
/// # Safety
/// `state` must be null or a handle from this library that has not been
/// freed yet.
#[no_mangle]
pub unsafe extern "C" fn entsup_state_free(state: *mut EntsupState) {
    if !state.is_null() {
        // SAFETY: handle was created by `Box::into_raw` in this crate.
        drop(unsafe { Box::from_raw(state) });
    }
}

/// Writes `dA, dB, dC` to `dims[0..3]`.
///
/// # Safety
/// `state` must be a live handle; `dims` must hold three writable values.
#[no_mangle]
pub unsafe extern "C" fn entsup_state_dims(state: *const EntsupState, dims: *mut usize) -> EntsupStatus {
    guard(|| {
        let s = unsafe { state_ref(state, "state") }?;
        if dims.is_null() {
            return Err(Failure::Null("dims"));
        }
        let d = s.dims().as_array();
        // SAFETY: caller guarantees three writable slots.
        unsafe { ptr::copy_nonoverlapping(d.as_ptr(), dims, 3) };
        Ok(())
    })
}

/// # Safety
/// `state` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn entsup_state_norm_sq(state: *const EntsupState, out: *mut f64) -> EntsupStatus {
    guard(|| {
        let s = unsafe { state_ref(state, "state") }?;
        unsafe { write_out(out, s.norm_sq(), "out") }
    })
}

/// Unnormalized `Γ = αΦ + βΨ` of two normalized states.
///
/// # Safety
/// `phi`, `psi` must be live handles; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn entsup_superpose(
    alpha_re: f64,
    alpha_im: f64,
    phi: *const EntsupState,
    beta_re: f64,
    beta_im: f64,
    psi: *const EntsupState,
    out: *mut *mut EntsupState,
) -> EntsupStatus {
    guard(|| {
        let phi = unsafe { state_ref(phi, "phi") }?;
        let psi = unsafe { state_ref(psi, "psi") }?;
        let gamma = states::superpose(
            Complex64::new(alpha_re, alpha_im),
            phi,
            Complex64::new(beta_re, beta_im),
            psi,
        )?;
        unsafe { write_out(out, boxed(gamma), "out") }
    })
}

/// Measures of the normalized state's `A ⊗ B` reduction; needs `dA = dB = 2`.
///
/// # Safety
/// `state` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn entsup_measures(state: *const EntsupState, out: *mut EntsupMeasures) -> EntsupStatus {
    guard(|| {
        let s = unsafe { state_ref(state, "state") }?;
        let m = measures::measures_of(s)?;
        let m = EntsupMeasures {
            entropy_e: m.entropy_e,
            concurrence_c: m.concurrence_c,
            coa_ca: m.coa_ca,
        };
        unsafe { write_out(out, m, "out") }
    })
}

/// Descending λ-spectrum of the normalized state's `A ⊗ B` reduction,
/// written to `out[0..4]`.
///
/// # Safety
/// `state` must be a live handle; `out` must hold four writable doubles.
#[no_mangle]
pub unsafe extern "C" fn entsup_lambda_spectrum(state: *const EntsupState, out: *mut f64) -> EntsupStatus {
    guard(|| {
        let s = unsafe { state_ref(state, "state") }?;
        if s.dims().a != 2 || s.dims().b != 2 {
            return Err(Error::Dimension(format!("need dA = dB = 2, got {}", s.dims())).into());
        }
        let rho = s.normalized()?.reduced_ab();
        let l = measures::lambda_spectrum(&rho)?.lambdas;
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        // SAFETY: caller guarantees four writable doubles.
        unsafe { ptr::copy_nonoverlapping(l.as_ptr(), out, 4) };
        Ok(())
    })
}

/// Concurrence-family bounds and actual values for `Γ = αΦ + βΨ`.
///
/// # Safety
/// `phi`, `psi` must be live handles; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn entsup_bound_report(
    abs_alpha: f64,
    phase_alpha: f64,
    phase_beta: f64,
    phi: *const EntsupState,
    psi: *const EntsupState,
    out: *mut EntsupBoundReport,
) -> EntsupStatus {
    guard(|| {
        let phi = unsafe { state_ref(phi, "phi") }?;
        let psi = unsafe { state_ref(psi, "psi") }?;
        let r = bounds::BoundReport::evaluate(coefficients(abs_alpha, phase_alpha, phase_beta)?, phi, psi)?;
        let c = r.concurrence;
        let report = EntsupBoundReport {
            norm_sq_gamma: r.norm_sq_gamma,
            c_actual: r.actual.concurrence_c,
            c_upper: EntsupUpperForms {
                sym: c.upper_sym,
                asym1: c.upper_asym1,
                asym2: c.upper_asym2,
                best: c.upper_best,
            },
            c_lower: c.lower_best,
            ca_actual: r.actual.coa_ca,
            ca_upper: r.coa.upper_best,
        };
        unsafe { write_out(out, report, "out") }
    })
}

/// Upper bounds on `‖Γ‖²C(ρ_AB)` from `(C, C_a)` of both components.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn entsup_thm2_upper_c(
    c1: f64,
    ca1: f64,
    c2: f64,
    ca2: f64,
    abs_alpha: f64,
    out: *mut EntsupUpperForms,
) -> EntsupStatus {
    guard(|| {
        let forms = bounds::thm2_upper_c(
            ComponentMeasures::new(c1, ca1),
            ComponentMeasures::new(c2, ca2),
            coefficients(abs_alpha, 0.0, 0.0)?,
        )?;
        unsafe { write_out(out, upper(forms), "out") }
    })
}

/// Upper bound on `‖Γ‖²C_a(Γ)`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn entsup_thm2_upper_ca(ca1: f64, ca2: f64, abs_alpha: f64, out: *mut f64) -> EntsupStatus {
    guard(|| {
        let v = bounds::thm2_upper_ca(ca1, ca2, coefficients(abs_alpha, 0.0, 0.0)?)?;
        unsafe { write_out(out, v, "out") }
    })
}

/// Upper bounds on `‖Γ‖²E(ρ_AB)` from `(E, E_a)` of both components.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn entsup_thm1_upper_e(
    e1: f64,
    ea1: f64,
    e2: f64,
    ea2: f64,
    abs_alpha: f64,
    out: *mut EntsupUpperForms,
) -> EntsupStatus {
    guard(|| {
        let forms = bounds::thm1_upper_e(
            ComponentMeasures::new(e1, ea1),
            ComponentMeasures::new(e2, ea2),
            coefficients(abs_alpha, 0.0, 0.0)?,
        )?;
        unsafe { write_out(out, upper(forms), "out") }
    })
}

/// Lower bound on `‖Γ‖²C(ρ_AB)` given `‖Γ‖`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn entsup_lower_bound_c(
    c1: f64,
    ca1: f64,
    c2: f64,
    ca2: f64,
    norm_gamma: f64,
    abs_alpha: f64,
    out: *mut f64,
) -> EntsupStatus {
    guard(|| {
        let v = bounds::lower_bounds_c(
            ComponentMeasures::new(c1, ca1),
            ComponentMeasures::new(c2, ca2),
            norm_gamma,
            coefficients(abs_alpha, 0.0, 0.0)?,
        )?;
        unsafe { write_out(out, v, "out") }
    })
}

/// The default search budget.
#[no_mangle]
pub extern "C" fn entsup_search_default() -> EntsupSearch {
    let d = DecompositionSearch::default();
    EntsupSearch {
        ensemble_size: d.ensemble_size.unwrap_or(0),
        restarts: d.restarts,
        sweeps: d.sweeps,
        tolerance: d.tolerance,
    }
}

/// Extremal average entanglement over decompositions of the normalized
/// state's `A ⊗ B` reduction. A maximum is a lower estimate of the true
/// maximum and a minimum an upper estimate of the true minimum. `search`
/// may be null for the default budget.
///
/// # Safety
/// `state` must be a live handle; `search` null or readable; `out` valid
/// for writes.
#[no_mangle]
pub unsafe extern "C" fn entsup_optimize(
    state: *const EntsupState,
    objective: EntsupObjective,
    direction: EntsupDirection,
    search: *const EntsupSearch,
    seed: u64,
    out: *mut f64,
) -> EntsupStatus {
    guard(|| {
        let s = unsafe { state_ref(state, "state") }?;
        if s.dims().a != 2 || s.dims().b != 2 {
            return Err(Error::Dimension(format!("need dA = dB = 2, got {}", s.dims())).into());
        }
        // SAFETY: caller passes null or a readable struct.
        let search: DecompositionSearch = unsafe { search.as_ref() }
            .copied()
            .unwrap_or_else(|| entsup_search_default())
            .into();
        let objective = match objective {
            EntsupObjective::Concurrence => Objective::Concurrence,
            EntsupObjective::Entropy => Objective::Entropy,
        };
        let direction = match direction {
            EntsupDirection::Min => Direction::Min,
            EntsupDirection::Max => Direction::Max,
        };
        let rho = s.normalized()?.reduced_ab();
        let r = oracle::optimize_avg(&rho, objective, direction, &search, seed)?;
        unsafe { write_out(out, r.value, "out") }
    })
}
