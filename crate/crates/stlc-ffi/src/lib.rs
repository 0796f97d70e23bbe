//! C ABI over the stlc toolkit.
//!
//! Bases are opaque handles created by `stlc_basis_*` constructors and released
//! with `stlc_basis_free`. Every fallible call returns a `StlcStatus`; the message
//! for the last failure on the calling thread is available from `stlc_last_error`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use stlc::codebook::{build, CodeDescriptor, Family};
use stlc::fd::{classify_with, ClassifyOptions, DecodeFamily, ZERO_TOL};
use stlc::lattice::{lattice_profile, min_det, CMat, WeightBasis, C64};
use stlc::sim::{sphere_decode, Alphabet};
use stlc::Error;

/// Opaque weight-matrix basis.
pub struct StlcBasis {
    inner: WeightBasis,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StlcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidString = 2,
    InvalidInput = 3,
    RankDeficient = 4,
    SearchTooLarge = 5,
    Internal = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StlcFamily {
    MultiGroup = 0,
    ConditionalMultiGroup = 1,
    FastGroup = 2,
    BlockOrthogonal = 3,
    None = 4,
}

/// Summary of a decodability profile. bo_g = 0 when no block-orthogonal structure was attached.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct StlcProfile {
    pub family: StlcFamily,
    pub k: usize,
    pub k_prime: usize,
    pub group_count: usize,
    pub conditioned_count: usize,
    pub reduction_pct: f64,
    pub fast_decodable: bool,
    pub bo_g: usize,
    pub bo_k: usize,
    pub bo_p: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> StlcStatus {
    match e {
        Error::RankDeficient { .. } => StlcStatus::RankDeficient,
        Error::SearchTooLarge { .. } => StlcStatus::SearchTooLarge,
        Error::Internal(_) | Error::Io(_) => StlcStatus::Internal,
        _ => StlcStatus::InvalidInput,
    }
}

fn guard(f: impl FnOnce() -> Result<(), StlcStatus>) -> StlcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => StlcStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("panic inside stlc".into());
            StlcStatus::Internal
        }
    }
}

fn lift<T>(r: stlc::Result<T>) -> Result<T, StlcStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, StlcStatus> {
    if s.is_null() {
        set_error("null string".into());
        return Err(StlcStatus::NullPointer);
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error("string is not UTF-8".into());
        StlcStatus::InvalidString
    })
}

unsafe fn basis_ref<'a>(b: *const StlcBasis) -> Result<&'a WeightBasis, StlcStatus> {
    if b.is_null() {
        set_error("null basis handle".into());
        return Err(StlcStatus::NullPointer);
    }
    Ok(&(*b).inner)
}

fn non_null<T>(p: *mut T) -> Result<(), StlcStatus> {
    if p.is_null() {
        set_error("null output pointer".into());
        return Err(StlcStatus::NullPointer);
    }
    Ok(())
}

/// Message of the last failed call on this thread, or null. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn stlc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds a named code ("alamouti", "golden", …). `relays` = 0 keeps the family default.
///
/// # Safety
/// `family` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn stlc_basis_build(
    family: *const c_char,
    relays: usize,
    out: *mut *mut StlcBasis,
) -> StlcStatus {
    guard(|| {
        non_null(out)?;
        let fam: Family = lift(read_str(family)?.parse())?;
        let mut desc = CodeDescriptor::new(fam);
        if relays > 0 {
            desc.relays = Some(relays);
        }
        let inner = lift(build(&desc))?;
        *out = Box::into_raw(Box::new(StlcBasis { inner }));
        Ok(())
    })
}

/// Parses a basis from its JSON form.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn stlc_basis_from_json(json: *const c_char, out: *mut *mut StlcBasis) -> StlcStatus {
    guard(|| {
        non_null(out)?;
        let inner = lift(WeightBasis::from_json(read_str(json)?))?;
        *out = Box::into_raw(Box::new(StlcBasis { inner }));
        Ok(())
    })
}

/// JSON form of a basis; release with `stlc_string_free`. Null on failure.
///
/// # Safety
/// `basis` must be a handle from this library or null.
#[no_mangle]
pub unsafe extern "C" fn stlc_basis_to_json(basis: *const StlcBasis) -> *mut c_char {
    let mut out = ptr::null_mut();
    guard(|| {
        let b = basis_ref(basis)?;
        out = CString::new(b.to_json()).map_err(|_| StlcStatus::Internal)?.into_raw();
        Ok(())
    });
    out
}

/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn stlc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `basis` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn stlc_basis_free(basis: *mut StlcBasis) {
    if !basis.is_null() {
        drop(Box::from_raw(basis));
    }
}

/// Codeword shape n_t × T and rank k.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn stlc_basis_shape(
    basis: *const StlcBasis,
    nt: *mut usize,
    t: *mut usize,
    k: *mut usize,
) -> StlcStatus {
    guard(|| {
        let b = basis_ref(basis)?;
        non_null(nt)?;
        non_null(t)?;
        non_null(k)?;
        *nt = b.nt;
        *t = b.t;
        *k = b.k();
        Ok(())
    })
}

/// Copies weight matrix `index` row-major into `re` and `im`, each of length `len` = n_t·T.
///
/// # Safety
/// `re` and `im` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn stlc_basis_matrix(
    basis: *const StlcBasis,
    index: usize,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> StlcStatus {
    guard(|| {
        let b = basis_ref(basis)?;
        non_null(re)?;
        non_null(im)?;
        if index >= b.k() || len != b.nt * b.t {
            set_error(format!("index {index} or length {len} out of range"));
            return Err(StlcStatus::InvalidInput);
        }
        let m = &b.mats[index];
        for r in 0..b.nt {
            for c in 0..b.t {
                *re.add(r * b.t + c) = m[(r, c)].re;
                *im.add(r * b.t + c) = m[(r, c)].im;
            }
        }
        Ok(())
    })
}

/// Fast-decodability classification with `trials` random channels for the R-matrix pattern.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn stlc_classify(
    basis: *const StlcBasis,
    trials: usize,
    seed: u64,
    out: *mut StlcProfile,
) -> StlcStatus {
    guard(|| {
        let b = basis_ref(basis)?;
        non_null(out)?;
        let p = lift(classify_with(b, &ClassifyOptions { trials, seed, tol: ZERO_TOL }))?;
        let (bo_g, bo_k, bo_p) = p.bo_params.unwrap_or((0, 0, 0));
        *out = StlcProfile {
            family: match p.family {
                DecodeFamily::MultiGroup => StlcFamily::MultiGroup,
                DecodeFamily::ConditionalMultiGroup => StlcFamily::ConditionalMultiGroup,
                DecodeFamily::FastGroup => StlcFamily::FastGroup,
                DecodeFamily::BlockOrthogonal => StlcFamily::BlockOrthogonal,
                DecodeFamily::None => StlcFamily::None,
            },
            k: p.k,
            k_prime: p.k_prime,
            group_count: p.groups.len(),
            conditioned_count: p.conditioned.len(),
            reduction_pct: p.reduction_pct,
            fast_decodable: p.fast_decodable,
            bo_g,
            bo_k,
            bo_p,
        };
        Ok(())
    })
}

/// Lattice volume sqrt(det G).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn stlc_lattice_volume(basis: *const StlcBasis, out: *mut f64) -> StlcStatus {
    guard(|| {
        let b = basis_ref(basis)?;
        non_null(out)?;
        *out = lift(lattice_profile(b, 0))?.volume;
        Ok(())
    })
}

/// min |det X|² over nonzero coefficient vectors with entries in [−bound, bound].
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn stlc_min_det(basis: *const StlcBasis, bound: u32, out: *mut f64) -> StlcStatus {
    guard(|| {
        let b = basis_ref(basis)?;
        non_null(out)?;
        *out = lift(min_det(b, bound))?;
        Ok(())
    })
}

/// Exact ML decoding of Y = HX + N. H is nr × n_t and Y is nr × T, both row-major
/// split into real and imaginary arrays. Writes k coefficients and the node count.
///
/// # Safety
/// Array arguments must hold the stated number of elements; `coeffs` holds k values.
#[no_mangle]
pub unsafe extern "C" fn stlc_sphere_decode(
    basis: *const StlcBasis,
    nr: usize,
    h_re: *const f64,
    h_im: *const f64,
    y_re: *const f64,
    y_im: *const f64,
    alphabet: *const i64,
    alphabet_len: usize,
    coeffs: *mut i64,
    nodes: *mut u64,
) -> StlcStatus {
    guard(|| {
        let b = basis_ref(basis)?;
        if [h_re, h_im, y_re, y_im].iter().any(|p| p.is_null()) || alphabet.is_null() {
            set_error("null input array".into());
            return Err(StlcStatus::NullPointer);
        }
        non_null(coeffs)?;
        non_null(nodes)?;
        let read = |re: *const f64, im: *const f64, rows: usize, cols: usize| {
            CMat::from_fn(rows, cols, |r, c| C64::new(*re.add(r * cols + c), *im.add(r * cols + c)))
        };
        let h = read(h_re, h_im, nr, b.nt);
        let y = read(y_re, y_im, nr, b.t);
        let a = lift(Alphabet::new(std::slice::from_raw_parts(alphabet, alphabet_len).to_vec()))?;
        let d = lift(sphere_decode(&y, &h, b, &a, None))?;
        for (i, &v) in d.coeffs.iter().enumerate() {
            *coeffs.add(i) = v;
        }
        *nodes = d.nodes_visited;
        Ok(())
    })
}
