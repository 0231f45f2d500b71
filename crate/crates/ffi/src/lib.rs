//! C interface. Documents are opaque handles; every fallible call returns a
//! status code and stores a message retrievable with
//! `catloc_last_error_message`. Strings returned through out-parameters are
//! owned by the caller and released with `catloc_string_free`.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::ptr;

use libc::c_char;
use serde::Serialize;

use catloc::dsl::{self, DslDocument, Resolved};
use catloc::hypotheses::{
    check_c1, check_c2, check_p1, check_p2, check_p3, check_referee, check_riou, check_t0,
    check_t1v, check_tu0, CheckBudget, HypothesisReport, Status,
};
use catloc::localisation::{equivalence_oracle, localize, EquivalenceVerdict, LocBudget, Localised};
use catloc::Error;

/// Status code returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CatlocStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    UnresolvedReference = 4,
    InvalidInput = 5,
    BudgetExceeded = 6,
    PreconditionViolated = 7,
    NotInverting = 8,
    IoError = 9,
    /// The question was well-posed but stayed undecided within budget.
    Undecided = 10,
}

/// A parsed and resolved document. Opaque.
pub struct CatlocDocument {
    doc: DslDocument,
    resolved: Resolved,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes stripped");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(err: &Error) -> CatlocStatus {
    match err {
        Error::Parse { .. } => CatlocStatus::ParseError,
        Error::UnresolvedRef { .. } => CatlocStatus::UnresolvedReference,
        Error::Invalid(_) => CatlocStatus::InvalidInput,
        Error::BudgetExceeded { .. } => CatlocStatus::BudgetExceeded,
        Error::Precondition(_) => CatlocStatus::PreconditionViolated,
        Error::NotInverting(_) => CatlocStatus::NotInverting,
        Error::Io(_) => CatlocStatus::IoError,
    }
}

fn fail(err: &Error) -> CatlocStatus {
    set_error(&err.to_string());
    status_of(err)
}

/// # Safety
/// `s` must be NULL or a valid nul-terminated string.
unsafe fn utf8_arg<'a>(s: *const c_char) -> Result<Option<&'a str>, CatlocStatus> {
    if s.is_null() {
        return Ok(None);
    }
    match CStr::from_ptr(s).to_str() {
        Ok(t) => Ok(Some(t)),
        Err(_) => {
            set_error("argument is not valid UTF-8");
            Err(CatlocStatus::InvalidUtf8)
        }
    }
}

fn give_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("nul bytes stripped").into_raw()
}

/// Parse and resolve a document. On success `*out` owns the handle; release
/// it with `catloc_document_free`.
///
/// # Safety
/// `text` must be a valid nul-terminated string; `out` must be a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn catloc_document_parse(
    text: *const c_char,
    out: *mut *mut CatlocDocument,
) -> CatlocStatus {
    if out.is_null() {
        set_error("out pointer is null");
        return CatlocStatus::NullArgument;
    }
    *out = ptr::null_mut();
    let text = match utf8_arg(text) {
        Ok(Some(t)) => t,
        Ok(None) => {
            set_error("text is null");
            return CatlocStatus::NullArgument;
        }
        Err(code) => return code,
    };
    let doc = match dsl::parse(text) {
        Ok(d) => d,
        Err(e) => return fail(&e),
    };
    let resolved = match dsl::resolve(&doc) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    clear_error();
    *out = Box::into_raw(Box::new(CatlocDocument { doc, resolved }));
    CatlocStatus::Ok
}

/// # Safety
/// `doc` must be NULL or a handle from `catloc_document_parse`, not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn catloc_document_free(doc: *mut CatlocDocument) {
    if !doc.is_null() {
        drop(Box::from_raw(doc));
    }
}

/// Canonical text of the document; parses back to the same document.
///
/// # Safety
/// `doc` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn catloc_document_print(doc: *const CatlocDocument) -> *mut c_char {
    if doc.is_null() {
        set_error("document is null");
        return ptr::null_mut();
    }
    give_string(dsl::print(&(*doc).doc))
}

/// JSON rendering of the document structure.
///
/// # Safety
/// `doc` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn catloc_document_to_json(doc: *const CatlocDocument) -> *mut c_char {
    if doc.is_null() {
        set_error("document is null");
        return ptr::null_mut();
    }
    give_string(dsl::to_json(&(*doc).doc))
}

/// # Safety
/// `s` must be NULL or a string previously returned by this library.
#[no_mangle]
pub unsafe extern "C" fn catloc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// The message of the most recent failure on this thread, or NULL.
#[no_mangle]
pub extern "C" fn catloc_last_error_message() -> *mut c_char {
    LAST_ERROR
        .with(|e| e.borrow().as_ref().map(|c| c.clone().into_raw()))
        .unwrap_or(ptr::null_mut())
}

fn find_setup<'a>(
    r: &'a Resolved,
    name: Option<&str>,
) -> Result<(&'a String, &'a catloc::setup::LocalisationSetup), Error> {
    match name {
        Some(n) => r
            .setups
            .get_key_value(n)
            .ok_or_else(|| Error::UnresolvedRef { kind: "setup", name: n.to_string() }),
        None if r.setups.len() == 1 => Ok(r.setups.iter().next().expect("nonempty")),
        None => Err(Error::Invalid(format!(
            "document declares {} setups; name one",
            r.setups.len()
        ))),
    }
}

#[derive(Serialize)]
struct FfiRecord<'a> {
    id: &'a str,
    status: &'static str,
    witness: Option<&'a str>,
}

fn records_json(reports: &[HypothesisReport]) -> String {
    let rows: Vec<FfiRecord> = reports
        .iter()
        .map(|h| match &h.status {
            Status::Holds => FfiRecord { id: &h.id, status: "holds", witness: None },
            Status::Fails { witness } => {
                FfiRecord { id: &h.id, status: "fails", witness: Some(witness) }
            }
            Status::Unknown { reason } => {
                FfiRecord { id: &h.id, status: "unknown", witness: Some(reason) }
            }
        })
        .collect();
    serde_json::to_string(&rows).expect("records serialise")
}

/// Run one hypothesis set (`t0`, `c2`, `c1`, `riou`, `p3`, `referee`, `p1`,
/// `p2`, `tu0`, `t1v`) against a setup of the document. `setup` may be NULL
/// when the document declares exactly one. `object` names an object of C
/// (required by `c1`); `selector` and `replacement` name declared blocks
/// (optional for `p1`, required for `t1v`). On success `*out_json` holds a
/// JSON array of {id, status, witness} rows.
///
/// # Safety
/// Pointer arguments must be NULL or valid; `doc` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn catloc_check(
    doc: *const CatlocDocument,
    setup: *const c_char,
    hypothesis: *const c_char,
    object: *const c_char,
    selector: *const c_char,
    replacement: *const c_char,
    out_json: *mut *mut c_char,
) -> CatlocStatus {
    if doc.is_null() || out_json.is_null() {
        set_error("document or out pointer is null");
        return CatlocStatus::NullArgument;
    }
    *out_json = ptr::null_mut();
    let r = &(*doc).resolved;
    let (setup, hypothesis, object, selector, replacement) = match (
        utf8_arg(setup),
        utf8_arg(hypothesis),
        utf8_arg(object),
        utf8_arg(selector),
        utf8_arg(replacement),
    ) {
        (Ok(s), Ok(Some(h)), Ok(o), Ok(k), Ok(w)) => (s, h, o, k, w),
        (_, Ok(None), _, _, _) => {
            set_error("hypothesis is null");
            return CatlocStatus::NullArgument;
        }
        (a, b, c, d, e) => {
            return [
                a.err(),
                b.err(),
                c.err(),
                d.err(),
                e.err(),
            ]
            .into_iter()
            .flatten()
            .next()
            .expect("some argument failed")
        }
    };
    let run = || -> Result<Vec<HypothesisReport>, Error> {
        let (setup_name, s) = find_setup(r, setup)?;
        let budget = CheckBudget::default();
        match hypothesis {
            "t0" => check_t0(s, &budget),
            "c2" => check_c2(s, &budget),
            "riou" => check_riou(s),
            "p3" => check_p3(s, &budget),
            "referee" => check_referee(s, &budget),
            "p2" => check_p2(s, &budget),
            "tu0" => check_tu0(s, &budget),
            "p1" => {
                let k = match selector {
                    Some(n) => {
                        let (owner, k) = r.kselectors.get(n).ok_or_else(|| {
                            Error::UnresolvedRef { kind: "kselector", name: n.to_string() }
                        })?;
                        if owner != setup_name {
                            return Err(Error::Invalid(format!(
                                "kselector `{n}` is declared for setup `{owner}`"
                            )));
                        }
                        Some(k)
                    }
                    None => None,
                };
                check_p1(s, k)
            }
            "t1v" => {
                let n = replacement
                    .ok_or_else(|| Error::Invalid("t1v needs a replacement name".into()))?;
                let (owner, w) = r.weaks.get(n).ok_or_else(|| Error::UnresolvedRef {
                    kind: "replacement",
                    name: n.to_string(),
                })?;
                if owner != setup_name {
                    return Err(Error::Invalid(format!(
                        "replacement `{n}` is declared for setup `{owner}`"
                    )));
                }
                check_t1v(s, w, &budget)
            }
            "c1" => {
                let o =
                    object.ok_or_else(|| Error::Invalid("c1 needs an object name".into()))?;
                let c = s.c.object_idx(o).ok_or_else(|| Error::UnresolvedRef {
                    kind: "object",
                    name: o.to_string(),
                })?;
                check_c1(s, c, &budget)
            }
            other => Err(Error::Invalid(format!("unknown hypothesis set `{other}`"))),
        }
    };
    match run() {
        Ok(reports) => {
            clear_error();
            *out_json = give_string(records_json(&reports));
            CatlocStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Decide whether the induced functor on the localised models is an
/// equivalence. `*out_verdict`: 0 equivalence, 1 not an equivalence,
/// 2 undecided. `*out_witness` carries the witness or reason (may be NULL).
///
/// # Safety
/// Pointer arguments must be NULL or valid; `doc` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn catloc_equivalence(
    doc: *const CatlocDocument,
    setup: *const c_char,
    out_verdict: *mut i32,
    out_witness: *mut *mut c_char,
) -> CatlocStatus {
    if doc.is_null() || out_verdict.is_null() || out_witness.is_null() {
        set_error("document or out pointer is null");
        return CatlocStatus::NullArgument;
    }
    *out_witness = ptr::null_mut();
    let setup = match utf8_arg(setup) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let r = &(*doc).resolved;
    let s = match find_setup(r, setup) {
        Ok((_, s)) => s,
        Err(e) => return fail(&e),
    };
    match equivalence_oracle(s, &LocBudget::default()) {
        Ok(EquivalenceVerdict::Equivalence) => {
            clear_error();
            *out_verdict = 0;
            CatlocStatus::Ok
        }
        Ok(EquivalenceVerdict::NotEquivalence { witness }) => {
            clear_error();
            *out_verdict = 1;
            *out_witness = give_string(witness);
            CatlocStatus::Ok
        }
        Ok(EquivalenceVerdict::Undecided { reason }) => {
            *out_verdict = 2;
            *out_witness = give_string(reason.clone());
            set_error(&reason);
            CatlocStatus::Undecided
        }
        Err(e) => fail(&e),
    }
}

/// Compute a finite model of the localisation of a declared class's carrier
/// at that class. On success the model sizes land in the out-parameters.
/// Returns `Undecided` when no finite model was reached within budget.
///
/// # Safety
/// Pointer arguments must be NULL or valid; `doc` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn catloc_localize(
    doc: *const CatlocDocument,
    class: *const c_char,
    out_objects: *mut u64,
    out_morphisms: *mut u64,
) -> CatlocStatus {
    if doc.is_null() || out_objects.is_null() || out_morphisms.is_null() {
        set_error("document or out pointer is null");
        return CatlocStatus::NullArgument;
    }
    let class = match utf8_arg(class) {
        Ok(Some(c)) => c,
        Ok(None) => {
            set_error("class name is null");
            return CatlocStatus::NullArgument;
        }
        Err(code) => return code,
    };
    let r = &(*doc).resolved;
    let cls = match r.classes.get(class) {
        Some(c) => c,
        None => {
            return fail(&Error::UnresolvedRef { kind: "class", name: class.to_string() })
        }
    };
    match localize(&cls.carrier, cls, &LocBudget::default()) {
        Ok(Localised::Model(m)) => {
            clear_error();
            *out_objects = m.category.object_count() as u64;
            *out_morphisms = m.category.morphism_count() as u64;
            CatlocStatus::Ok
        }
        Ok(Localised::Undecided { reason }) => {
            set_error(&reason);
            CatlocStatus::Undecided
        }
        Err(e) => fail(&e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = "category C {\n  objects: 1;\n}\ncategory D {\n  objects: 0, 1;\n  mor f: 0 -> 1;\n}\nfunctor T: C -> D {\n  obj 1 -> 1;\n}\nclass S in C {\n}\nclass Sp in D {\n  f;\n}\nsetup L {\n  C = C;\n  D = D;\n  T = T;\n  S = S;\n  Sprime = Sp;\n}\n";

    unsafe fn parse_ok(text: &str) -> *mut CatlocDocument {
        let c = CString::new(text).unwrap();
        let mut doc = ptr::null_mut();
        assert_eq!(catloc_document_parse(c.as_ptr(), &mut doc), CatlocStatus::Ok);
        assert!(!doc.is_null());
        doc
    }

    unsafe fn take(s: *mut c_char) -> String {
        assert!(!s.is_null());
        let out = CStr::from_ptr(s).to_str().unwrap().to_string();
        catloc_string_free(s);
        out
    }

    #[test]
    fn parse_print_round_trip() {
        unsafe {
            let doc = parse_ok(GOOD);
            let printed = take(catloc_document_print(doc));
            let doc2 = parse_ok(&printed);
            let printed2 = take(catloc_document_print(doc2));
            assert_eq!(printed, printed2);
            let json = take(catloc_document_to_json(doc));
            assert!(json.contains("\"Setup\""));
            catloc_document_free(doc);
            catloc_document_free(doc2);
        }
    }

    #[test]
    fn syntax_error_reports_position() {
        unsafe {
            let c = CString::new("category {").unwrap();
            let mut doc = ptr::null_mut();
            assert_eq!(
                catloc_document_parse(c.as_ptr(), &mut doc),
                CatlocStatus::ParseError
            );
            assert!(doc.is_null());
            let msg = take(catloc_last_error_message());
            assert!(msg.contains("1:10"), "{msg}");
        }
    }

    #[test]
    fn check_t0_returns_three_holds() {
        unsafe {
            let doc = parse_ok(GOOD);
            let hyp = CString::new("t0").unwrap();
            let mut out = ptr::null_mut();
            assert_eq!(
                catloc_check(
                    doc,
                    ptr::null(),
                    hyp.as_ptr(),
                    ptr::null(),
                    ptr::null(),
                    ptr::null(),
                    &mut out
                ),
                CatlocStatus::Ok
            );
            let json = take(out);
            let rows: Vec<serde_json::Value> = serde_json::from_str(&json).unwrap();
            assert_eq!(rows.len(), 3);
            assert!(rows.iter().all(|r| r["status"] == "holds"));
            catloc_document_free(doc);
        }
    }

    #[test]
    fn equivalence_verdicts_cover_both_sides() {
        unsafe {
            let doc = parse_ok(GOOD);
            let mut verdict = -1;
            let mut witness = ptr::null_mut();
            assert_eq!(
                catloc_equivalence(doc, ptr::null(), &mut verdict, &mut witness),
                CatlocStatus::Ok
            );
            assert_eq!(verdict, 0);
            assert!(witness.is_null());
            catloc_document_free(doc);

            let two_points = "category C {\n  objects: a;\n}\ncategory D {\n  objects: a, b;\n}\nfunctor T: C -> D {\n  obj a -> a;\n}\nclass S in C {\n}\nclass Sp in D {\n}\nsetup L {\n  C = C;\n  D = D;\n  T = T;\n  S = S;\n  Sprime = Sp;\n}\n";
            let doc = parse_ok(two_points);
            assert_eq!(
                catloc_equivalence(doc, ptr::null(), &mut verdict, &mut witness),
                CatlocStatus::Ok
            );
            assert_eq!(verdict, 1);
            assert!(take(witness).contains('b'));
            catloc_document_free(doc);
        }
    }

    #[test]
    fn localize_reports_model_sizes() {
        unsafe {
            let doc = parse_ok(GOOD);
            let name = CString::new("Sp").unwrap();
            let (mut o, mut m) = (0u64, 0u64);
            assert_eq!(catloc_localize(doc, name.as_ptr(), &mut o, &mut m), CatlocStatus::Ok);
            assert_eq!(o, 2);
            assert_eq!(m, 4);
            catloc_document_free(doc);
        }
    }

    #[test]
    fn null_arguments_are_rejected() {
        unsafe {
            let mut doc = ptr::null_mut();
            assert_eq!(
                catloc_document_parse(ptr::null(), &mut doc),
                CatlocStatus::NullArgument
            );
            assert_eq!(
                catloc_document_parse(CString::new("x").unwrap().as_ptr(), ptr::null_mut()),
                CatlocStatus::NullArgument
            );
            assert!(catloc_document_print(ptr::null()).is_null());
            catloc_document_free(ptr::null_mut());
            catloc_string_free(ptr::null_mut());
        }
    }

    #[test]
    fn unresolved_reference_maps_to_its_code() {
        unsafe {
            let c = CString::new("class S in Missing {\n}\n").unwrap();
            let mut doc = ptr::null_mut();
            assert_eq!(
                catloc_document_parse(c.as_ptr(), &mut doc),
                CatlocStatus::UnresolvedReference
            );
            let msg = take(catloc_last_error_message());
            assert!(msg.contains("Missing"), "{msg}");
        }
    }
}
