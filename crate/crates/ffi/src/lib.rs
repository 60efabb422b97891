//! C interface to `xlift`.
//!
//! Objects cross the boundary as opaque handles that the caller frees with the
//! matching `*_free` function. Every fallible call returns an [`XliftStatus`];
//! on failure, [`xlift_last_error`] describes the error for the current thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use xlift::alignment::{load_dictionary, procrustes, Dictionary, MappingModel};
use xlift::corpus::{load_corpus, SegmentPolicy};
use xlift::embedding::{load_embeddings, normalize_rows, EmbeddingMatrix};
use xlift::retrieval::{copying_baseline, evaluate_mapping, retrieve, RetrievalMethod};
use xlift::stdm::{stdm_corpora, StdmOptions};
use xlift::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XliftStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Io = 3,
    Format = 4,
    InvalidParam = 5,
    Dimension = 6,
    NotNormalized = 7,
    EmptyDictionary = 8,
    NotFound = 9,
    Failed = 10,
    Panic = 11,
}

/// Word vectors loaded from a text file.
pub struct XliftEmbeddings(EmbeddingMatrix);

/// A `d x d` linear map between two embedding spaces.
pub struct XliftMapping(MappingModel);

/// Source-target translation pairs.
pub struct XliftDictionary(Dictionary);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> XliftStatus {
    match e {
        Error::Io { .. } => XliftStatus::Io,
        Error::Format { .. } | Error::Json(_) | Error::ZeroRow(_) => XliftStatus::Format,
        Error::Dimension(_) => XliftStatus::Dimension,
        Error::NotNormalized => XliftStatus::NotNormalized,
        Error::EmptyDictionary | Error::NoEvaluable { .. } => XliftStatus::EmptyDictionary,
        Error::InvalidParam(_) | Error::Rank { .. } | Error::Policy(_) => XliftStatus::InvalidParam,
        _ => XliftStatus::Failed,
    }
}

struct Failure(XliftStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

/// Runs `f`, recording its error message and turning panics into a status.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> XliftStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => XliftStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            XliftStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(XliftStatus::NullArgument, format!("{what} is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(XliftStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn object<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn method(csls_k: u32) -> RetrievalMethod {
    match csls_k {
        0 => RetrievalMethod::Nn,
        k => RetrievalMethod::Csls { k: k as usize },
    }
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn xlift_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Frees a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn xlift_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Loads embeddings in word2vec text format.
///
/// # Safety
/// `path` must be a nul-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn xlift_embeddings_load(path: *const c_char, out: *mut *mut XliftEmbeddings) -> XliftStatus {
    guard(|| {
        let path = text(path, "path")?;
        let e = load_embeddings(path)?;
        put(out, Box::into_raw(Box::new(XliftEmbeddings(e))), "out")
    })
}

/// # Safety
/// `e` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn xlift_embeddings_free(e: *mut XliftEmbeddings) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// Number of words, or 0 for a null handle.
///
/// # Safety
/// `e` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn xlift_embeddings_len(e: *const XliftEmbeddings) -> usize {
    e.as_ref().map_or(0, |e| e.0.len())
}

/// Vector dimension, or 0 for a null handle.
///
/// # Safety
/// `e` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn xlift_embeddings_dim(e: *const XliftEmbeddings) -> usize {
    e.as_ref().map_or(0, |e| e.0.dim())
}

/// Scales every row to unit length in place.
///
/// # Safety
/// `e` must be a live handle not used concurrently.
#[no_mangle]
pub unsafe extern "C" fn xlift_embeddings_normalize(e: *mut XliftEmbeddings) -> XliftStatus {
    let e = e.as_mut();
    guard(move || {
        let e = e.ok_or_else(|| null("embeddings"))?;
        e.0 = normalize_rows(&e.0)?;
        Ok(())
    })
}

/// Loads a whitespace-separated `source target` dictionary.
///
/// # Safety
/// `path` must be a nul-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn xlift_dictionary_load(path: *const c_char, out: *mut *mut XliftDictionary) -> XliftStatus {
    guard(|| {
        let path = text(path, "path")?;
        let d = load_dictionary(path)?;
        put(out, Box::into_raw(Box::new(XliftDictionary(d))), "out")
    })
}

/// # Safety
/// `d` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn xlift_dictionary_free(d: *mut XliftDictionary) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Number of pairs, or 0 for a null handle.
///
/// # Safety
/// `d` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn xlift_dictionary_len(d: *const XliftDictionary) -> usize {
    d.as_ref().map_or(0, |d| d.0.len())
}

/// Orthogonal map fitted on the dictionary pairs present in both spaces.
///
/// # Safety
/// All handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn xlift_procrustes(
    x: *const XliftEmbeddings,
    y: *const XliftEmbeddings,
    dict: *const XliftDictionary,
    out: *mut *mut XliftMapping,
) -> XliftStatus {
    guard(|| {
        let (x, y, d) = (object(x, "x")?, object(y, "y")?, object(dict, "dict")?);
        let m = procrustes(&x.0, &y.0, &d.0)?;
        put(out, Box::into_raw(Box::new(XliftMapping(m))), "out")
    })
}

/// The identity map of dimension `dim`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn xlift_mapping_identity(dim: usize, out: *mut *mut XliftMapping) -> XliftStatus {
    guard(|| {
        if dim == 0 {
            return Err(Failure(XliftStatus::InvalidParam, "dim must be positive".into()));
        }
        put(out, Box::into_raw(Box::new(XliftMapping(MappingModel::identity(dim)))), "out")
    })
}

/// Loads a mapping saved as JSON.
///
/// # Safety
/// `path` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn xlift_mapping_load(path: *const c_char, out: *mut *mut XliftMapping) -> XliftStatus {
    guard(|| {
        let path = text(path, "path")?;
        let m = MappingModel::load(path)?;
        put(out, Box::into_raw(Box::new(XliftMapping(m))), "out")
    })
}

/// # Safety
/// `m` must be a live handle and `path` a nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn xlift_mapping_save(m: *const XliftMapping, path: *const c_char) -> XliftStatus {
    guard(|| {
        let m = object(m, "mapping")?;
        m.0.save(text(path, "path")?)?;
        Ok(())
    })
}

/// # Safety
/// `m` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn xlift_mapping_free(m: *mut XliftMapping) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Dimension of the map, or 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn xlift_mapping_dim(m: *const XliftMapping) -> usize {
    m.as_ref().map_or(0, |m| m.0.dim())
}

/// Best translation of `word`. `csls_k = 0` selects cosine nearest neighbour,
/// otherwise CSLS with that neighbourhood size. The string written to `out`
/// is freed with [`xlift_string_free`].
///
/// # Safety
/// Handles must be live, `word` nul-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn xlift_translate(
    m: *const XliftMapping,
    x: *const XliftEmbeddings,
    y: *const XliftEmbeddings,
    word: *const c_char,
    csls_k: u32,
    out: *mut *mut c_char,
) -> XliftStatus {
    guard(|| {
        let (m, x, y) = (object(m, "mapping")?, object(x, "x")?, object(y, "y")?);
        let word = text(word, "word")?;
        let r = retrieve(&m.0, &x.0, &y.0, &[word], method(csls_k), 1)?;
        let best = r[0]
            .candidates
            .as_ref()
            .and_then(|c| c.first())
            .ok_or_else(|| Failure(XliftStatus::NotFound, format!("{word:?} is not in the source vocabulary")))?;
        let s = CString::new(best.0.as_str()).map_err(|_| Failure(XliftStatus::Format, "token contains nul".into()))?;
        put(out, s.into_raw(), "out")
    })
}

/// Translation accuracy at 1 and 5 over the dictionary's source words.
///
/// # Safety
/// Handles must be live and the output pointers writable.
#[no_mangle]
pub unsafe extern "C" fn xlift_eval_bli(
    m: *const XliftMapping,
    x: *const XliftEmbeddings,
    y: *const XliftEmbeddings,
    gold: *const XliftDictionary,
    csls_k: u32,
    acc1: *mut f64,
    acc5: *mut f64,
) -> XliftStatus {
    guard(|| {
        let (m, x, y, g) = (object(m, "mapping")?, object(x, "x")?, object(y, "y")?, object(gold, "gold")?);
        let r = evaluate_mapping(&m.0, &x.0, &y.0, &g.0, method(csls_k))?;
        put(acc1, r.acc(1), "acc1")?;
        put(acc5, r.acc(5), "acc5")
    })
}

/// Accuracy at 1 of translating every word as itself.
///
/// # Safety
/// `gold` must be live and `acc1` writable.
#[no_mangle]
pub unsafe extern "C" fn xlift_copy_baseline(gold: *const XliftDictionary, acc1: *mut f64) -> XliftStatus {
    guard(|| {
        let r = copying_baseline(&object(gold, "gold")?.0)?;
        put(acc1, r.acc(1), "acc1")
    })
}

/// Domain mismatch between two corpus files cut into blocks of
/// `block_lines` lines, with a rank-`rank` topic space.
///
/// # Safety
/// Paths must be nul-terminated and `score` writable.
#[no_mangle]
pub unsafe extern "C" fn xlift_stdm(
    path_a: *const c_char,
    path_b: *const c_char,
    block_lines: usize,
    rank: usize,
    score: *mut f64,
) -> XliftStatus {
    guard(|| {
        let a = load_corpus(text(path_a, "path_a")?, "", "a")?;
        let b = load_corpus(text(path_b, "path_b")?, "", "b")?;
        let opts = StdmOptions {
            rank,
            ..StdmOptions::default()
        };
        let r = stdm_corpora(&a, &b, SegmentPolicy::Block(block_lines), opts)?;
        put(score, r.stdm, "score")
    })
}
