//! C ABI over `gkz-core`.
//!
//! Every function returns a status code. Results go through out-pointers.
//! Problem data lives behind the opaque [`GkzProblem`] handle, which the
//! caller releases with [`gkz_problem_free`]. After a failure the message is
//! available from [`gkz_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;

use gkz_core::eval::{evaluate_gg, QuadratureConfig};
use gkz_core::lattice::IntegerMatrix;
use gkz_core::model::{ArgumentVector, GkzData, SpectralVector};
use gkz_core::whittaker::{bessel_k_oracle, eval_whittaker_max};
use gkz_core::GkzError;
use num_complex::Complex64;

pub const GKZ_OK: i32 = 0;
pub const GKZ_ERR_NULL: i32 = 1;
pub const GKZ_ERR_VALIDATION: i32 = 2;
pub const GKZ_ERR_DOMAIN: i32 = 3;
pub const GKZ_ERR_BUFFER: i32 = 4;
pub const GKZ_ERR_PANIC: i32 = 5;

/// Validated matrix `A` together with its relation lattice.
pub struct GkzProblem {
    data: GkzData,
}

/// Value and error estimate of one evaluation.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GkzValue {
    pub re: f64,
    pub im: f64,
    pub err: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

struct Failure(i32, String);

impl From<GkzError> for Failure {
    fn from(e: GkzError) -> Self {
        let code = if e.is_domain() {
            GKZ_ERR_DOMAIN
        } else {
            GKZ_ERR_VALIDATION
        };
        Failure(code, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(GKZ_ERR_NULL, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> i32 {
    let (code, msg) = match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => (GKZ_OK, String::new()),
        Ok(Err(Failure(c, m))) => (c, m),
        Err(_) => (GKZ_ERR_PANIC, "internal panic".to_string()),
    };
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
    code
}

/// # Safety
/// `ptr` is null or valid for `len` reads.
unsafe fn view<'a, T>(ptr: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(ptr, len))
}

fn rows_of(flat: &[i64], rows: usize, cols: usize) -> Vec<Vec<i64>> {
    (0..rows)
        .map(|r| flat[r * cols..(r + 1) * cols].to_vec())
        .collect()
}

fn config(points_per_dim: usize) -> Result<QuadratureConfig, Failure> {
    let mut cfg = QuadratureConfig::default();
    if points_per_dim != 0 {
        cfg.points_per_dim = points_per_dim;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Builds a problem from the row-major `a_rows x cols` matrix `a` and an
/// optional row-major `lattice_rows x cols` lattice basis. With
/// `lattice == NULL` the lattice is the integer kernel of `a`. With
/// `a_rows == 0` the lattice is required.
///
/// # Safety
/// Pointers must be valid for the stated sizes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gkz_problem_new(
    a: *const i64,
    a_rows: usize,
    cols: usize,
    lattice: *const i64,
    lattice_rows: usize,
    out: *mut *mut GkzProblem,
) -> i32 {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = std::ptr::null_mut();
        let size = |r: usize| {
            r.checked_mul(cols)
                .ok_or_else(|| Failure(GKZ_ERR_VALIDATION, "matrix size overflows".into()))
        };
        let a = rows_of(view(a, size(a_rows)?, "a")?, a_rows, cols);
        let lattice = if lattice.is_null() {
            None
        } else {
            let flat = view(lattice, size(lattice_rows)?, "lattice")?;
            Some(IntegerMatrix::with_cols(
                cols,
                rows_of(flat, lattice_rows, cols)
                    .into_iter()
                    .map(|r| r.into_iter().map(Into::into).collect())
                    .collect(),
            )?)
        };
        let data = if a_rows == 0 {
            let l = lattice.ok_or_else(|| {
                Failure(GKZ_ERR_VALIDATION, "an empty A requires a lattice".into())
            })?;
            GkzData::without_torus(l)?
        } else {
            GkzData::new(IntegerMatrix::new(&a)?, lattice)?
        };
        *out = Box::into_raw(Box::new(GkzProblem { data }));
        Ok(())
    })
}

/// Releases a handle from [`gkz_problem_new`]. Null is ignored.
///
/// # Safety
/// `p` is null or a live handle not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn gkz_problem_free(p: *mut GkzProblem) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Number of variables `N`, rows `m` of `A` and lattice rank `N - m`.
///
/// # Safety
/// `p` is a live handle; the outputs are writable.
#[no_mangle]
pub unsafe extern "C" fn gkz_problem_dims(
    p: *const GkzProblem,
    n: *mut usize,
    m: *mut usize,
    rank: *mut usize,
) -> i32 {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("problem"))?;
        if n.is_null() || m.is_null() || rank.is_null() {
            return Err(null("output"));
        }
        *n = p.data.n();
        *m = p.data.m();
        *rank = p.data.lattice_rank();
        Ok(())
    })
}

/// Copies the lattice basis, row-major `(N - m) x N`, into `buf`. `written`
/// receives the number of entries needed; a short buffer gives
/// `GKZ_ERR_BUFFER` and leaves `buf` untouched.
///
/// # Safety
/// `buf` is valid for `len` writes; `written` is writable.
#[no_mangle]
pub unsafe extern "C" fn gkz_problem_lattice(
    p: *const GkzProblem,
    buf: *mut i64,
    len: usize,
    written: *mut usize,
) -> i32 {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("problem"))?;
        if written.is_null() {
            return Err(null("written"));
        }
        let flat: Vec<i64> = p.data.lattice_rows().into_iter().flatten().collect();
        *written = flat.len();
        if flat.len() > len {
            return Err(Failure(
                GKZ_ERR_BUFFER,
                format!("buffer holds {len} entries, {} needed", flat.len()),
            ));
        }
        if !flat.is_empty() {
            if buf.is_null() {
                return Err(null("buf"));
            }
            slice::from_raw_parts_mut(buf, flat.len()).copy_from_slice(&flat);
        }
        Ok(())
    })
}

/// `Phi_gamma(u)` for `gamma = gamma_re + i gamma_im` and positive `u`, all
/// of length `n`. `points_per_dim == 0` keeps the default grid.
///
/// # Safety
/// Arrays are valid for `n` reads; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn gkz_eval_gg(
    p: *const GkzProblem,
    gamma_re: *const f64,
    gamma_im: *const f64,
    u: *const f64,
    n: usize,
    points_per_dim: usize,
    out: *mut GkzValue,
) -> i32 {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("problem"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let re = view(gamma_re, n, "gamma_re")?;
        let im = view(gamma_im, n, "gamma_im")?;
        let u = view(u, n, "u")?;
        let gamma = SpectralVector::new(
            re.iter()
                .zip(im)
                .map(|(a, b)| Complex64::new(*a, *b))
                .collect(),
        );
        let e = evaluate_gg(
            &p.data,
            &gamma,
            &ArgumentVector::new(u.to_vec())?,
            &config(points_per_dim)?,
        )?;
        *out = GkzValue {
            re: e.value.re,
            im: e.value.im,
            err: e.err,
        };
        Ok(())
    })
}

/// Maximal parabolic Whittaker function of `gl(rank + 1)` at real spectrum
/// `lambda` (length `rank + 1`) and point `x`.
///
/// # Safety
/// `lambda` is valid for `rank + 1` reads; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn gkz_whittaker_max(
    rank: usize,
    lambda: *const f64,
    x: f64,
    points_per_dim: usize,
    out: *mut GkzValue,
) -> i32 {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let lambda: Vec<Complex64> = view(lambda, rank + 1, "lambda")?
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect();
        let e = eval_whittaker_max(rank, &lambda, x, &config(points_per_dim)?)?;
        *out = GkzValue {
            re: e.value.re,
            im: e.value.im,
            err: e.err,
        };
        Ok(())
    })
}

/// `K_nu(z)` for complex order and positive `z`, from its integral
/// representation.
///
/// # Safety
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn gkz_bessel_k(nu_re: f64, nu_im: f64, z: f64, out: *mut GkzValue) -> i32 {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let v = bessel_k_oracle(Complex64::new(nu_re, nu_im), z)?;
        *out = GkzValue {
            re: v.re,
            im: v.im,
            err: 0.0,
        };
        Ok(())
    })
}

/// Length in bytes of the last error message on this thread, without the
/// terminating NUL.
#[no_mangle]
pub extern "C" fn gkz_last_error_length() -> usize {
    LAST_ERROR.with(|e| e.borrow().len())
}

/// Copies the last error message with a terminating NUL. Needs
/// `gkz_last_error_length() + 1` bytes; otherwise returns `GKZ_ERR_BUFFER`.
///
/// # Safety
/// `buf` is valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn gkz_last_error_message(buf: *mut c_char, len: usize) -> i32 {
    let msg = LAST_ERROR.with(|e| e.borrow().clone());
    if buf.is_null() {
        return GKZ_ERR_NULL;
    }
    if msg.len() + 1 > len {
        return GKZ_ERR_BUFFER;
    }
    let dst = slice::from_raw_parts_mut(buf.cast::<u8>(), msg.len() + 1);
    dst[..msg.len()].copy_from_slice(msg.as_bytes());
    dst[msg.len()] = 0;
    GKZ_OK
}
