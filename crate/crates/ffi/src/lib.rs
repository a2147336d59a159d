//! C ABI over the wayfind engine.
//!
//! Every fallible function returns a [`WayfindStatus`] and writes its result
//! through an out-pointer. Strings handed to the caller are NUL-terminated
//! UTF-8 allocated by this library and must be released with
//! [`wayfind_string_free`]. After a non-OK status,
//! [`wayfind_last_error_message`] describes the failure on the calling thread.
//!
//! Handles are not synchronized: a `WayfindSession` must not be used from two
//! threads at once. A `WayfindMap` is immutable and may be shared freely; a
//! session keeps its map alive, so the map handle may be freed first.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use wayfind::map::{MapError, MapGraph, NodeId};
use wayfind::pathfinder::{plan_route, PathError, RouteMode};
use wayfind::service::StateView;
use wayfind::trip::{ScanRejection, TripError};
use wayfind::{qr, DestinationChoice, TripSession};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WayfindStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    /// The map document is not well-formed JSON in the expected format.
    MapParse = 3,
    /// The map parsed but violates a structural rule.
    MapInvalid = 4,
    UnknownNode = 5,
    BadMode = 6,
    NoRoute = 7,
    /// A payload failed to decode. Session scans still return the
    /// `scan_error` event.
    Undecodable = 8,
    /// The payload fields cannot be encoded.
    Unencodable = 9,
    /// The scan decoded but was not applied (foreign map or unknown node).
    /// The rejection event is still returned.
    ScanRejected = 10,
    /// The call is not valid in the session's current state.
    InvalidState = 11,
    NotDestination = 12,
    /// A Rust panic was caught at the boundary.
    Internal = 13,
}

/// Immutable, validated floor map.
pub struct WayfindMap {
    graph: Arc<MapGraph>,
}

/// One trip session bound to a map.
pub struct WayfindSession {
    session: TripSession,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let msg = CString::new(message.into().replace('\0', " ")).expect("NULs were replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

type Failure = (WayfindStatus, String);

fn fail(status: WayfindStatus, msg: impl ToString) -> Failure {
    (status, msg.to_string())
}

/// Runs `body`, records any error for [`wayfind_last_error_message`] and
/// converts panics into [`WayfindStatus::Internal`].
fn guard(body: impl FnOnce() -> Result<WayfindStatus, Failure>) -> WayfindStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(status)) => status,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal error");
            WayfindStatus::Internal
        }
    }
}

unsafe fn arg_str<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(fail(
            WayfindStatus::NullArgument,
            format!("`{name}` is null"),
        ));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        fail(
            WayfindStatus::InvalidUtf8,
            format!("`{name}` is not valid UTF-8"),
        )
    })
}

unsafe fn arg_ref<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| fail(WayfindStatus::NullArgument, format!("`{name}` is null")))
}

unsafe fn arg_mut<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .ok_or_else(|| fail(WayfindStatus::NullArgument, format!("`{name}` is null")))
}

fn out_ptr<T>(p: *mut *mut T) -> Result<(), Failure> {
    if p.is_null() {
        Err(fail(WayfindStatus::NullArgument, "output pointer is null"))
    } else {
        Ok(())
    }
}

fn into_c(s: String) -> *mut c_char {
    // serde_json and the codec never produce interior NULs
    CString::new(s).expect("no interior NUL").into_raw()
}

fn json<T: serde::Serialize + ?Sized>(value: &T) -> *mut c_char {
    into_c(serde_json::to_string(value).expect("value serializes"))
}

fn parse_mode(s: &str) -> Result<RouteMode, Failure> {
    s.parse()
        .map_err(|e: wayfind::pathfinder::ParseModeError| fail(WayfindStatus::BadMode, e))
}

fn path_failure(e: PathError) -> Failure {
    let status = match e {
        PathError::UnknownNode(_) => WayfindStatus::UnknownNode,
        _ => WayfindStatus::NoRoute,
    };
    fail(status, e)
}

/// Message for the most recent failure on this thread, or NULL. The pointer
/// stays valid until the next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn wayfind_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |m| m.as_ptr()))
}

/// Stable lowercase name of a status code. The string is static.
#[no_mangle]
pub extern "C" fn wayfind_status_name(status: WayfindStatus) -> *const c_char {
    let name: &'static CStr = match status {
        WayfindStatus::Ok => c"ok",
        WayfindStatus::NullArgument => c"null_argument",
        WayfindStatus::InvalidUtf8 => c"invalid_utf8",
        WayfindStatus::MapParse => c"map_parse",
        WayfindStatus::MapInvalid => c"map_invalid",
        WayfindStatus::UnknownNode => c"unknown_node",
        WayfindStatus::BadMode => c"bad_mode",
        WayfindStatus::NoRoute => c"no_route",
        WayfindStatus::Undecodable => c"undecodable",
        WayfindStatus::Unencodable => c"unencodable",
        WayfindStatus::ScanRejected => c"scan_rejected",
        WayfindStatus::InvalidState => c"invalid_state",
        WayfindStatus::NotDestination => c"not_destination",
        WayfindStatus::Internal => c"internal",
    };
    name.as_ptr()
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must be NULL or a pointer obtained from this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wayfind_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses and validates a map document.
///
/// # Safety
/// `json_text` must be a NUL-terminated string; `out_map` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wayfind_map_load(
    json_text: *const c_char,
    out_map: *mut *mut WayfindMap,
) -> WayfindStatus {
    guard(|| {
        out_ptr(out_map)?;
        *out_map = ptr::null_mut();
        let text = arg_str(json_text, "json_text")?;
        let graph = MapGraph::from_json_str(text).map_err(|e| match e {
            MapError::Parse(_) => fail(WayfindStatus::MapParse, e),
            _ => fail(WayfindStatus::MapInvalid, e),
        })?;
        *out_map = Box::into_raw(Box::new(WayfindMap {
            graph: Arc::new(graph),
        }));
        Ok(WayfindStatus::Ok)
    })
}

/// Releases a map handle. NULL is ignored.
///
/// # Safety
/// `map` must be NULL or a handle from [`wayfind_map_load`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wayfind_map_free(map: *mut WayfindMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

/// Writes the map id as a newly allocated string.
///
/// # Safety
/// `map` must be a live handle; `out_id` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wayfind_map_id(
    map: *const WayfindMap,
    out_id: *mut *mut c_char,
) -> WayfindStatus {
    guard(|| {
        out_ptr(out_id)?;
        let map = arg_ref(map, "map")?;
        *out_id = into_c(map.graph.map_id().to_string());
        Ok(WayfindStatus::Ok)
    })
}

/// Plans a route and writes it as JSON:
/// `{"nodes": [...], "distance": m, "turns": n, "legs": [...]}`.
/// `mode` is `"shortest"` or `"optimal"`.
///
/// # Safety
/// `map` must be a live handle, the strings NUL-terminated, `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn wayfind_plan_route(
    map: *const WayfindMap,
    from: *const c_char,
    to: *const c_char,
    mode: *const c_char,
    out_json: *mut *mut c_char,
) -> WayfindStatus {
    guard(|| {
        out_ptr(out_json)?;
        *out_json = ptr::null_mut();
        let map = arg_ref(map, "map")?;
        let (from, to) = (arg_str(from, "from")?, arg_str(to, "to")?);
        let mode = parse_mode(arg_str(mode, "mode")?)?;
        let route = plan_route(&map.graph, from, to, mode).map_err(path_failure)?;
        *out_json = json(&route);
        Ok(WayfindStatus::Ok)
    })
}

/// Encodes a strip payload.
///
/// # Safety
/// Strings must be NUL-terminated; `out_payload` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wayfind_qr_encode(
    map_id: *const c_char,
    node_id: *const c_char,
    out_payload: *mut *mut c_char,
) -> WayfindStatus {
    guard(|| {
        out_ptr(out_payload)?;
        *out_payload = ptr::null_mut();
        let payload = qr::encode(arg_str(map_id, "map_id")?, arg_str(node_id, "node_id")?)
            .map_err(|e| fail(WayfindStatus::Unencodable, e))?;
        *out_payload = into_c(payload);
        Ok(WayfindStatus::Ok)
    })
}

/// Decodes a strip payload into its map id and node id.
///
/// # Safety
/// `payload` must be NUL-terminated; both out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn wayfind_qr_decode(
    payload: *const c_char,
    out_map_id: *mut *mut c_char,
    out_node_id: *mut *mut c_char,
) -> WayfindStatus {
    guard(|| {
        out_ptr(out_map_id)?;
        out_ptr(out_node_id)?;
        *out_map_id = ptr::null_mut();
        *out_node_id = ptr::null_mut();
        if payload.is_null() {
            return Err(fail(WayfindStatus::NullArgument, "`payload` is null"));
        }
        let (map_id, node) = qr::decode_bytes(CStr::from_ptr(payload).to_bytes())
            .map_err(|e| fail(WayfindStatus::Undecodable, format!("{}: {e}", e.kind())))?;
        *out_map_id = into_c(map_id);
        *out_node_id = into_c(node.to_string());
        Ok(WayfindStatus::Ok)
    })
}

/// Starts a trip session on `map`. The session holds its own reference to
/// the map.
///
/// # Safety
/// `map` must be a live handle; `out_session` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wayfind_session_new(
    map: *const WayfindMap,
    out_session: *mut *mut WayfindSession,
) -> WayfindStatus {
    guard(|| {
        out_ptr(out_session)?;
        *out_session = ptr::null_mut();
        let map = arg_ref(map, "map")?;
        let session = TripSession::new(map.graph.clone());
        *out_session = Box::into_raw(Box::new(WayfindSession { session }));
        Ok(WayfindStatus::Ok)
    })
}

/// Releases a session handle. NULL is ignored.
///
/// # Safety
/// `session` must be NULL or a handle from [`wayfind_session_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wayfind_session_free(session: *mut WayfindSession) {
    if !session.is_null() {
        drop(Box::from_raw(session));
    }
}

/// Feeds one scanned payload to the session and writes the resulting events
/// as a JSON array. On `Undecodable` and `ScanRejected` the array holds the
/// event to announce and the session state is unchanged.
///
/// # Safety
/// `session` must be a live handle, `payload` NUL-terminated, `out_events`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn wayfind_session_scan(
    session: *mut WayfindSession,
    payload: *const c_char,
    out_events: *mut *mut c_char,
) -> WayfindStatus {
    guard(|| {
        out_ptr(out_events)?;
        *out_events = ptr::null_mut();
        let s = arg_mut(session, "session")?;
        if payload.is_null() {
            return Err(fail(WayfindStatus::NullArgument, "`payload` is null"));
        }
        // non-UTF-8 input is a decode failure, reported like any other unreadable code
        let text = String::from_utf8_lossy(CStr::from_ptr(payload).to_bytes()).into_owned();
        match s.session.scan(&text) {
            Ok(events) => {
                *out_events = json(&events);
                Ok(WayfindStatus::Ok)
            }
            Err(rejection) => {
                *out_events = json(&[rejection.event()]);
                let status = match rejection {
                    ScanRejection::Unreadable(_) => WayfindStatus::Undecodable,
                    ScanRejection::Route(_) => WayfindStatus::NoRoute,
                    _ => WayfindStatus::ScanRejected,
                };
                Err(fail(status, format!("{}: {rejection}", rejection.kind())))
            }
        }
    })
}

/// Chooses a destination after a location scan and writes the route
/// announcement events as a JSON array.
///
/// # Safety
/// `session` must be a live handle, strings NUL-terminated, `out_events`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn wayfind_session_select_destination(
    session: *mut WayfindSession,
    destination: *const c_char,
    mode: *const c_char,
    out_events: *mut *mut c_char,
) -> WayfindStatus {
    guard(|| {
        out_ptr(out_events)?;
        *out_events = ptr::null_mut();
        let s = arg_mut(session, "session")?;
        let dest = arg_str(destination, "destination")?;
        let mode = parse_mode(arg_str(mode, "mode")?)?;
        let destination = NodeId::new(dest).map_err(|e| {
            fail(
                WayfindStatus::UnknownNode,
                format!("unknown node `{dest}`: {e}"),
            )
        })?;
        let events = s
            .session
            .select_destination(&DestinationChoice { destination, mode })
            .map_err(|e| match e {
                TripError::NotAtNode => fail(WayfindStatus::InvalidState, e),
                TripError::UnknownNode(_) => fail(WayfindStatus::UnknownNode, e),
                TripError::NotDestination(_) => fail(WayfindStatus::NotDestination, e),
                TripError::Route(p) => path_failure(p),
            })?;
        *out_events = json(&events);
        Ok(WayfindStatus::Ok)
    })
}

/// Writes the instruction the walker should currently hear, as a JSON object.
///
/// # Safety
/// `session` must be a live handle; `out_event` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wayfind_session_prompt(
    session: *const WayfindSession,
    out_event: *mut *mut c_char,
) -> WayfindStatus {
    guard(|| {
        out_ptr(out_event)?;
        let s = arg_ref(session, "session")?;
        *out_event = json(&s.session.current_prompt());
        Ok(WayfindStatus::Ok)
    })
}

/// Writes a JSON snapshot of the session: state name, current node, next
/// expected node, destination, active route and prompt.
///
/// # Safety
/// `session` must be a live handle; `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wayfind_session_state(
    session: *const WayfindSession,
    out_json: *mut *mut c_char,
) -> WayfindStatus {
    guard(|| {
        out_ptr(out_json)?;
        let s = arg_ref(session, "session")?;
        *out_json = json(&StateView::of(&s.session));
        Ok(WayfindStatus::Ok)
    })
}
