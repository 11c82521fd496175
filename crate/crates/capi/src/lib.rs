//! C ABI for the matrix order unit space library. All structured data
//! crosses the boundary as JSON strings in the library's wire formats;
//! spaces, elements and homomorphisms travel as opaque handles.
//!
//! Every fallible function returns an [`AmouStatus`]; on any non-OK
//! status the thread-local error message is available through
//! [`amou_last_error_message`]. Strings returned by this library must be
//! released with [`amou_string_free`], handles with their matching
//! `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

use amou::capmaps::StarHom;
use amou::ideals::IdealHandle;
use amou::oup;
use amou::space::{Element, SpaceSpec};
use amou::{Error, Tolerances};

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AmouStatus {
    Ok = 0,
    /// Null pointer, malformed UTF-8 or JSON, or failed validation.
    InvalidArgument = 1,
    /// Numerical failure (non-Hermitian input, eigensolver divergence, ...).
    Numeric = 2,
    /// A documented precondition of the operation was not met.
    Precondition = 3,
    /// Membership/projection query answered negatively where a positive
    /// answer was required.
    NotMember = 4,
}

/// Opaque space handle.
pub struct AmouSpace(SpaceSpec);
/// Opaque element handle (element + its space).
pub struct AmouElement(Element);
/// Opaque homomorphism handle.
pub struct AmouHom(StarHom);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<Vec<u8>>) {
    let c = CString::new(msg).unwrap_or_else(|_| CString::new("invalid error text").unwrap());
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> AmouStatus {
    match err {
        Error::NotHermitian(_) | Error::NotPsd(_) | Error::NoConvergence(_) => AmouStatus::Numeric,
        Error::NotMember | Error::NotProjection => AmouStatus::NotMember,
        Error::PreconditionFailed(_)
        | Error::HypothesisUnmet(_)
        | Error::NotPositive
        | Error::NotUnitNorm(_)
        | Error::NotSquareLevel(_, _)
        | Error::ZeroProjection => AmouStatus::Precondition,
        _ => AmouStatus::InvalidArgument,
    }
}

fn fail(err: Error) -> AmouStatus {
    let status = status_of(&err);
    set_error(err.to_string());
    status
}

fn invalid(msg: &str) -> AmouStatus {
    set_error(msg);
    AmouStatus::InvalidArgument
}

/// Parse a C string as UTF-8 JSON text.
unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, AmouStatus> {
    if ptr.is_null() {
        return Err(invalid("null string pointer"));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| invalid("string is not valid UTF-8"))
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s)
        .unwrap_or_else(|_| CString::new("{}").unwrap())
        .into_raw()
}

/// Last error message for this thread, or NULL if none was recorded.
/// The caller owns the returned string.
#[no_mangle]
pub extern "C" fn amou_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| match &*e.borrow() {
        Some(c) => c.clone().into_raw(),
        None => ptr::null_mut(),
    })
}

/// Release a string allocated by this library.
///
/// # Safety
/// `s` must be a pointer previously returned by this library, or NULL.
#[no_mangle]
pub unsafe extern "C" fn amou_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Build a space handle from `{"summands":[..]}` JSON.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn amou_space_new_json(
    json: *const c_char,
    out: *mut *mut AmouSpace,
) -> AmouStatus {
    if out.is_null() {
        return invalid("null output pointer");
    }
    let text = match read_str(json) {
        Ok(t) => t,
        Err(s) => return s,
    };
    let parsed: Result<SpaceSpec, _> = serde_json::from_str(text);
    match parsed.map_err(|e| Error::Parse(e.to_string())).and_then(|s| SpaceSpec::new(s.summands)) {
        Ok(space) => {
            *out = Box::into_raw(Box::new(AmouSpace(space)));
            AmouStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// # Safety
/// `space` must come from `amou_space_new_json`, or be NULL.
#[no_mangle]
pub unsafe extern "C" fn amou_space_free(space: *mut AmouSpace) {
    if !space.is_null() {
        drop(Box::from_raw(space));
    }
}

/// Build an element handle from `{"level":[l,m],"blocks":[..]}` JSON
/// over the given space.
///
/// # Safety
/// `space` must be a live space handle; `json` a NUL-terminated string;
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn amou_element_new_json(
    space: *const AmouSpace,
    json: *const c_char,
    out: *mut *mut AmouElement,
) -> AmouStatus {
    if space.is_null() || out.is_null() {
        return invalid("null handle");
    }
    let text = match read_str(json) {
        Ok(t) => t,
        Err(s) => return s,
    };
    let value: serde_json::Value = match serde_json::from_str(text) {
        Ok(v) => v,
        Err(e) => return fail(Error::Parse(e.to_string())),
    };
    match Element::from_json(&(*space).0, &value) {
        Ok(elem) => {
            *out = Box::into_raw(Box::new(AmouElement(elem)));
            AmouStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Serialize an element back to its JSON wire form. Caller owns the string.
///
/// # Safety
/// `elem` must be a live element handle.
#[no_mangle]
pub unsafe extern "C" fn amou_element_to_json(elem: *const AmouElement) -> *mut c_char {
    if elem.is_null() {
        set_error("null element handle");
        return ptr::null_mut();
    }
    to_c_string((*elem).0.to_json().to_string())
}

/// # Safety
/// `elem` must come from this library, or be NULL.
#[no_mangle]
pub unsafe extern "C" fn amou_element_free(elem: *mut AmouElement) {
    if !elem.is_null() {
        drop(Box::from_raw(elem));
    }
}

/// |x| = √(x*x) as a new element handle.
///
/// # Safety
/// `x` must be a live element handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn amou_element_abs(
    x: *const AmouElement,
    out: *mut *mut AmouElement,
) -> AmouStatus {
    if x.is_null() || out.is_null() {
        return invalid("null handle");
    }
    match (*x).0.abs_value(&Tolerances::default()) {
        Ok(a) => {
            *out = Box::into_raw(Box::new(AmouElement(a)));
            AmouStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Order-unit norm of an element.
///
/// # Safety
/// `x` must be a live element handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn amou_element_order_unit_norm(
    x: *const AmouElement,
    out: *mut f64,
) -> AmouStatus {
    if x.is_null() || out.is_null() {
        return invalid("null handle");
    }
    *out = (*x).0.order_unit_norm();
    AmouStatus::Ok
}

/// Whether p is an order projection (1) or not (0).
///
/// # Safety
/// `p` must be a live element handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn amou_is_order_projection(
    p: *const AmouElement,
    out: *mut i32,
) -> AmouStatus {
    if p.is_null() || out.is_null() {
        return invalid("null handle");
    }
    match oup::is_order_projection(&(*p).0, &Tolerances::default()) {
        Ok(b) => {
            *out = i32::from(b);
            AmouStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Membership of y in the hereditary ideal of x (positive, unit-norm,
/// level 1). On membership, `min_epsilon` receives the minimal ε of the
/// block certificate; otherwise the status is `NotMember`.
///
/// # Safety
/// `x` and `y` must be live element handles; `min_epsilon` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn amou_ideal_min_epsilon(
    x: *const AmouElement,
    y: *const AmouElement,
    min_epsilon: *mut f64,
) -> AmouStatus {
    if x.is_null() || y.is_null() || min_epsilon.is_null() {
        return invalid("null handle");
    }
    let tol = Tolerances::default();
    let handle = match IdealHandle::new((*x).0.clone(), tol) {
        Ok(h) => h,
        Err(e) => return fail(e),
    };
    match handle.membership(&(*y).0) {
        Ok(res) => match res.min_epsilon {
            Some(eps) => {
                *min_epsilon = eps;
                AmouStatus::Ok
            }
            None => {
                set_error("element is not a member of the ideal");
                AmouStatus::NotMember
            }
        },
        Err(e) => fail(e),
    }
}

/// Deterministic refuter for the absolute order unit property of a
/// positive unit-norm level-1 x. Returns `Ok` with the witness and its ε
/// if x is not an order projection, `NotMember` if no counterexample
/// exists (x is an order projection).
///
/// # Safety
/// `x` must be a live element handle; `witness` and `epsilon` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn amou_construct_counterexample(
    x: *const AmouElement,
    witness: *mut *mut AmouElement,
    epsilon: *mut f64,
) -> AmouStatus {
    if x.is_null() || witness.is_null() || epsilon.is_null() {
        return invalid("null handle");
    }
    match oup::construct_counterexample(&(*x).0, &Tolerances::default()) {
        Ok(Some((y, eps))) => {
            *witness = Box::into_raw(Box::new(AmouElement(y)));
            *epsilon = eps;
            AmouStatus::Ok
        }
        Ok(None) => {
            set_error("no counterexample: the element is an order projection");
            AmouStatus::NotMember
        }
        Err(e) => fail(e),
    }
}

/// Build a homomorphism handle from
/// `{"source":[..],"target":[..],"mult":[[..]]}` JSON.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn amou_hom_new_json(
    json: *const c_char,
    out: *mut *mut AmouHom,
) -> AmouStatus {
    if out.is_null() {
        return invalid("null output pointer");
    }
    let text = match read_str(json) {
        Ok(t) => t,
        Err(s) => return s,
    };
    let value: serde_json::Value = match serde_json::from_str(text) {
        Ok(v) => v,
        Err(e) => return fail(Error::Parse(e.to_string())),
    };
    match StarHom::from_json(&value) {
        Ok(hom) => {
            *out = Box::into_raw(Box::new(AmouHom(hom)));
            AmouStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// # Safety
/// `hom` must come from `amou_hom_new_json`, or be NULL.
#[no_mangle]
pub unsafe extern "C" fn amou_hom_free(hom: *mut AmouHom) {
    if !hom.is_null() {
        drop(Box::from_raw(hom));
    }
}

/// Apply a homomorphism; the result lives over the hom's target space.
///
/// # Safety
/// `hom` and `x` must be live handles; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn amou_hom_apply(
    hom: *const AmouHom,
    x: *const AmouElement,
    out: *mut *mut AmouElement,
) -> AmouStatus {
    if hom.is_null() || x.is_null() || out.is_null() {
        return invalid("null handle");
    }
    match (*hom).0.apply(&(*x).0) {
        Ok(y) => {
            *out = Box::into_raw(Box::new(AmouElement(y)));
            AmouStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// K₀ class of a formal difference of projections, as `{"diff":[..]}`
/// JSON. Caller owns the string; NULL on error.
///
/// # Safety
/// `p` and `q` must be live element handles over the same space.
#[no_mangle]
pub unsafe extern "C" fn amou_k0_class_json(
    p: *const AmouElement,
    q: *const AmouElement,
) -> *mut c_char {
    if p.is_null() || q.is_null() {
        set_error("null element handle");
        return ptr::null_mut();
    }
    let tol = Tolerances::default();
    let result = (|| -> amou::Result<String> {
        let p = amou::ktheory::OrderProjection::new((*p).0.clone(), &tol)?;
        let q = amou::ktheory::OrderProjection::new((*q).0.clone(), &tol)?;
        let class = amou::ktheory::k0_class(&p, &q, &tol)?;
        Ok(serde_json::to_string(&class).expect("class serializes"))
    })();
    match result {
        Ok(s) => to_c_string(s),
        Err(e) => {
            set_error(e.to_string());
            ptr::null_mut()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;

    fn cstr(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    unsafe fn make_space(json: &str) -> *mut AmouSpace {
        let mut out = ptr::null_mut();
        assert_eq!(
            amou_space_new_json(cstr(json).as_ptr(), &mut out),
            AmouStatus::Ok
        );
        out
    }

    unsafe fn make_element(space: *const AmouSpace, json: &str) -> *mut AmouElement {
        let mut out = ptr::null_mut();
        assert_eq!(
            amou_element_new_json(space, cstr(json).as_ptr(), &mut out),
            AmouStatus::Ok
        );
        out
    }

    #[test]
    fn roundtrip_and_norm() {
        unsafe {
            let space = make_space(r#"{"summands":[2]}"#);
            let x = make_element(
                space,
                r#"{"level":[1,1],"blocks":[[[[1.0,0.0],[0.0,0.0]],[[0.0,0.0],[0.5,0.0]]]]}"#,
            );
            let mut norm = 0.0;
            assert_eq!(amou_element_order_unit_norm(x, &mut norm), AmouStatus::Ok);
            assert!((norm - 1.0).abs() < 1e-12);
            let json = amou_element_to_json(x);
            assert!(!json.is_null());
            amou_string_free(json);
            amou_element_free(x);
            amou_space_free(space);
        }
    }

    #[test]
    fn counterexample_for_diagonal_half() {
        unsafe {
            let space = make_space(r#"{"summands":[2]}"#);
            let x = make_element(
                space,
                r#"{"level":[1,1],"blocks":[[[[1.0,0.0],[0.0,0.0]],[[0.0,0.0],[0.5,0.0]]]]}"#,
            );
            let mut witness = ptr::null_mut();
            let mut eps = 0.0;
            assert_eq!(
                amou_construct_counterexample(x, &mut witness, &mut eps),
                AmouStatus::Ok
            );
            assert!((eps - 2f64.sqrt()).abs() < 1e-9);
            amou_element_free(witness);
            amou_element_free(x);
            amou_space_free(space);
        }
    }

    #[test]
    fn projection_has_no_counterexample() {
        unsafe {
            let space = make_space(r#"{"summands":[2]}"#);
            let p = make_element(
                space,
                r#"{"level":[1,1],"blocks":[[[[1.0,0.0],[0.0,0.0]],[[0.0,0.0],[0.0,0.0]]]]}"#,
            );
            let mut is_proj = 0;
            assert_eq!(amou_is_order_projection(p, &mut is_proj), AmouStatus::Ok);
            assert_eq!(is_proj, 1);
            let mut witness = ptr::null_mut();
            let mut eps = 0.0;
            assert_eq!(
                amou_construct_counterexample(p, &mut witness, &mut eps),
                AmouStatus::NotMember
            );
            let msg = amou_last_error_message();
            assert!(!msg.is_null());
            amou_string_free(msg);
            amou_element_free(p);
            amou_space_free(space);
        }
    }

    #[test]
    fn hom_apply_and_k0() {
        unsafe {
            let mut hom = ptr::null_mut();
            assert_eq!(
                amou_hom_new_json(
                    cstr(r#"{"source":[2,1],"target":[2],"mult":[[1,0]]}"#).as_ptr(),
                    &mut hom
                ),
                AmouStatus::Ok
            );
            let source = make_space(r#"{"summands":[2,1]}"#);
            let e = make_element(
                source,
                r#"{"level":[1,1],"blocks":[[[[1.0,0.0],[0.0,0.0]],[[0.0,0.0],[1.0,0.0]]],[[[1.0,0.0]]]]}"#,
            );
            let mut image = ptr::null_mut();
            assert_eq!(amou_hom_apply(hom, e, &mut image), AmouStatus::Ok);
            let class = amou_k0_class_json(image, image);
            assert!(!class.is_null());
            let text = CStr::from_ptr(class).to_str().unwrap().to_string();
            assert_eq!(text, r#"{"diff":[0]}"#);
            amou_string_free(class);
            amou_element_free(image);
            amou_element_free(e);
            amou_space_free(source);
            amou_hom_free(hom);
        }
    }

    #[test]
    fn bad_input_reports_error() {
        unsafe {
            let mut out = ptr::null_mut();
            assert_eq!(
                amou_space_new_json(cstr(r#"{"summands":[]}"#).as_ptr(), &mut out),
                AmouStatus::InvalidArgument
            );
            let msg = amou_last_error_message();
            assert!(!msg.is_null());
            amou_string_free(msg);
        }
    }
}
