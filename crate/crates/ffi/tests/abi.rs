use std::ffi::{c_char, CStr, CString};
use std::ptr;

use serde_json::Value;
use wayfind_ffi::*;

const FCIT: &str = include_str!("../../core/maps/fcit.json");
const SQUARE: &str = include_str!("../../core/maps/square.json");

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

/// Takes ownership of a library string.
fn take(p: *mut c_char) -> String {
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string();
    unsafe { wayfind_string_free(p) };
    s
}

fn take_json(p: *mut c_char) -> Value {
    serde_json::from_str(&take(p)).unwrap()
}

fn last_error() -> String {
    let p = wayfind_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

fn load(doc: &str) -> *mut WayfindMap {
    let mut map = ptr::null_mut();
    let text = c(doc);
    assert_eq!(
        unsafe { wayfind_map_load(text.as_ptr(), &mut map) },
        WayfindStatus::Ok
    );
    map
}

#[test]
fn map_load_reports_parse_and_validation_errors() {
    let mut map = ptr::null_mut();
    let bad = c("{\"format\":\"nope\"}");
    assert_eq!(
        unsafe { wayfind_map_load(bad.as_ptr(), &mut map) },
        WayfindStatus::MapParse
    );
    assert!(map.is_null());
    assert!(last_error().contains("parse"));

    let empty = c(r#"{"format":"wayfind-map/1","map_id":"x","nodes":[],"edges":[]}"#);
    assert_eq!(
        unsafe { wayfind_map_load(empty.as_ptr(), &mut map) },
        WayfindStatus::MapInvalid
    );
    assert!(last_error().contains("no destination"));

    assert_eq!(
        unsafe { wayfind_map_load(ptr::null(), &mut map) },
        WayfindStatus::NullArgument
    );
    let square = c(SQUARE);
    assert_eq!(
        unsafe { wayfind_map_load(square.as_ptr(), ptr::null_mut()) },
        WayfindStatus::NullArgument
    );

    let map = load(SQUARE);
    let mut id = ptr::null_mut();
    assert_eq!(unsafe { wayfind_map_id(map, &mut id) }, WayfindStatus::Ok);
    assert_eq!(take(id), "square");
    assert!(wayfind_last_error_message().is_null());
    unsafe { wayfind_map_free(map) };
    unsafe { wayfind_map_free(ptr::null_mut()) };
}

#[test]
fn plan_route_returns_json() {
    let map = load(FCIT);
    let mut out = ptr::null_mut();
    let (from, to) = (c("L1"), c("L13"));
    let st = unsafe {
        wayfind_plan_route(
            map,
            from.as_ptr(),
            to.as_ptr(),
            c("optimal").as_ptr(),
            &mut out,
        )
    };
    assert_eq!(st, WayfindStatus::Ok);
    let route = take_json(out);
    assert_eq!(route["turns"], 1);
    assert_eq!(route["nodes"].as_array().unwrap().len(), 21);

    let st = unsafe {
        wayfind_plan_route(
            map,
            from.as_ptr(),
            to.as_ptr(),
            c("scenic").as_ptr(),
            &mut out,
        )
    };
    assert_eq!(st, WayfindStatus::BadMode);
    assert!(out.is_null());
    let st = unsafe {
        wayfind_plan_route(
            map,
            from.as_ptr(),
            c("L99").as_ptr(),
            c("shortest").as_ptr(),
            &mut out,
        )
    };
    assert_eq!(st, WayfindStatus::UnknownNode);
    assert!(last_error().contains("L99"));
    unsafe { wayfind_map_free(map) };
}

#[test]
fn qr_round_trip_and_errors() {
    let mut payload = ptr::null_mut();
    let st = unsafe { wayfind_qr_encode(c("fcit").as_ptr(), c("L13").as_ptr(), &mut payload) };
    assert_eq!(st, WayfindStatus::Ok);
    let payload = take(payload);
    assert_eq!(payload, "BNAV1|fcit|L13|32fb0842");

    let (mut m, mut n) = (ptr::null_mut(), ptr::null_mut());
    let st = unsafe { wayfind_qr_decode(c(&payload).as_ptr(), &mut m, &mut n) };
    assert_eq!(st, WayfindStatus::Ok);
    assert_eq!((take(m), take(n)), ("fcit".to_string(), "L13".to_string()));

    let st = unsafe { wayfind_qr_decode(c("BNAV1|fcit|L13|32fb0843").as_ptr(), &mut m, &mut n) };
    assert_eq!(st, WayfindStatus::Undecodable);
    assert!(m.is_null() && n.is_null());
    assert!(last_error().starts_with("checksum_mismatch"));

    let mut out = ptr::null_mut();
    let st = unsafe { wayfind_qr_encode(c("a|b").as_ptr(), c("L1").as_ptr(), &mut out) };
    assert_eq!(st, WayfindStatus::Unencodable);
}

#[test]
fn session_walk_through_the_abi() {
    let map = load(SQUARE);
    let mut session = ptr::null_mut();
    assert_eq!(
        unsafe { wayfind_session_new(map, &mut session) },
        WayfindStatus::Ok
    );
    // the session keeps the map alive
    unsafe { wayfind_map_free(map) };

    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { wayfind_session_prompt(session, &mut out) },
        WayfindStatus::Ok
    );
    assert_eq!(take_json(out)["kind"], "scan_prompt");

    let st = unsafe {
        wayfind_session_select_destination(
            session,
            c("C").as_ptr(),
            c("shortest").as_ptr(),
            &mut out,
        )
    };
    assert_eq!(st, WayfindStatus::InvalidState);

    let scan = |node: &str, out: &mut *mut c_char| {
        let mut p = ptr::null_mut();
        unsafe { wayfind_qr_encode(c("square").as_ptr(), c(node).as_ptr(), &mut p) };
        let payload = take(p);
        unsafe { wayfind_session_scan(session, c(&payload).as_ptr(), out) }
    };

    assert_eq!(scan("A", &mut out), WayfindStatus::Ok);
    assert_eq!(take_json(out)[0]["kind"], "announce_location");

    let st = unsafe {
        wayfind_session_select_destination(
            session,
            c("E").as_ptr(),
            c("shortest").as_ptr(),
            &mut out,
        )
    };
    assert_eq!(st, WayfindStatus::NotDestination);
    let st = unsafe {
        wayfind_session_select_destination(
            session,
            c("C").as_ptr(),
            c("shortest").as_ptr(),
            &mut out,
        )
    };
    assert_eq!(st, WayfindStatus::Ok);
    take(out);

    assert_eq!(scan("Z", &mut out), WayfindStatus::ScanRejected);
    assert_eq!(take_json(out)[0]["kind"], "scan_error");
    let st = unsafe { wayfind_session_scan(session, c("garbage").as_ptr(), &mut out) };
    assert_eq!(st, WayfindStatus::Undecodable);
    assert_eq!(take_json(out)[0]["vibrate"], true);

    assert_eq!(scan("B", &mut out), WayfindStatus::Ok);
    take(out);
    assert_eq!(scan("C", &mut out), WayfindStatus::Ok);
    let events = take_json(out);
    assert_eq!(events[0]["kind"], "arrived");

    assert_eq!(
        unsafe { wayfind_session_state(session, &mut out) },
        WayfindStatus::Ok
    );
    let state = take_json(out);
    assert_eq!(state["state"], "arrived");
    assert_eq!(state["origin"], "A");
    unsafe { wayfind_session_free(session) };
}

#[test]
fn null_handles_are_rejected() {
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { wayfind_session_scan(ptr::null_mut(), c("x").as_ptr(), &mut out) },
        WayfindStatus::NullArgument
    );
    assert_eq!(
        unsafe { wayfind_session_state(ptr::null(), &mut out) },
        WayfindStatus::NullArgument
    );
    assert!(last_error().contains("session"));
}

#[test]
fn status_names_are_stable() {
    let name = |s| {
        unsafe { CStr::from_ptr(wayfind_status_name(s)) }
            .to_str()
            .unwrap()
    };
    assert_eq!(name(WayfindStatus::Ok), "ok");
    assert_eq!(name(WayfindStatus::ScanRejected), "scan_rejected");
    assert_eq!(WayfindStatus::Internal as i32, 13);
}
