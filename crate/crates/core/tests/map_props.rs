mod common;

use proptest::prelude::*;
use serde_json::{json, Value};

use common::arb_map;
use wayfind::map::{heading, load_map, normalize_degrees, MapError, MapGraph, Violation};

fn square_doc() -> Value {
    serde_json::from_str(include_str!("../maps/square.json")).unwrap()
}

fn violations(doc: &Value) -> Vec<Violation> {
    match MapGraph::from_json_str(&doc.to_string()) {
        Err(MapError::Invalid(v)) => v,
        other => panic!("expected validation failure, got {other:?}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn serialization_round_trips(g in arb_map()) {
        let text = g.to_json();
        let back = load_map(text.as_bytes()).unwrap();
        prop_assert_eq!(back.map_id(), g.map_id());
        prop_assert_eq!(back.nodes(), g.nodes());
        prop_assert_eq!(back.edges(), g.edges());
        prop_assert_eq!(back.to_json(), text);
    }

    #[test]
    fn reverse_heading_differs_by_half_turn(g in arb_map()) {
        for e in g.edges() {
            let (a, b) = (g.node(e.a.as_str()).unwrap(), g.node(e.b.as_str()).unwrap());
            let forward = heading(a, b).unwrap();
            let back = heading(b, a).unwrap();
            prop_assert!(forward > -180.0 && forward <= 180.0);
            prop_assert!((normalize_degrees(forward - back).abs() - 180.0).abs() < 1e-9);
        }
    }

    #[test]
    fn neighbors_are_symmetric(g in arb_map()) {
        for n in g.nodes() {
            for (m, len) in g.neighbors(n.id.as_str()).unwrap() {
                prop_assert_eq!(g.edge_length(m.as_str(), n.id.as_str()), Some(len));
            }
        }
    }

    #[test]
    fn arbitrary_bytes_never_panic(bytes in proptest::collection::vec(any::<u8>(), 0..256)) {
        let _ = MapGraph::from_json_slice(&bytes);
    }
}

#[test]
fn demo_maps_validate_without_warnings() {
    for doc in [
        include_str!("../maps/fcit.json"),
        include_str!("../maps/square.json"),
        include_str!("../maps/greedy_trap.json"),
    ] {
        let g = MapGraph::from_json_str(doc).unwrap();
        assert!(
            g.length_warnings().is_empty(),
            "{}: {:?}",
            g.map_id(),
            g.length_warnings()
        );
    }
}

#[test]
fn unknown_top_level_key_and_wrong_format_are_parse_errors() {
    let mut doc = square_doc();
    doc["extra"] = json!(1);
    assert!(matches!(
        MapGraph::from_json_str(&doc.to_string()),
        Err(MapError::Parse(_))
    ));

    let mut doc = square_doc();
    doc["format"] = json!("wayfind-map/2");
    assert!(matches!(
        MapGraph::from_json_str(&doc.to_string()),
        Err(MapError::Parse(_))
    ));
}

#[test]
fn all_violations_are_reported_together() {
    let mut doc = square_doc();
    let edges = doc["edges"].as_array_mut().unwrap();
    edges.push(json!({"a": "A", "b": "Q", "length": 3}));
    edges.push(json!({"a": "C", "b": "C", "length": 3}));
    edges.push(json!({"a": "B", "b": "A", "length": 10}));
    edges[0]["length"] = json!(-1);
    doc["nodes"]
        .as_array_mut()
        .unwrap()
        .push(json!({"id": "A", "kind": "waypoint", "label": "", "x": 5, "y": 5}));
    let v = violations(&doc);
    assert!(v.contains(&Violation::DuplicateNode("A".into())), "{v:?}");
    assert!(
        v.iter()
            .any(|x| matches!(x, Violation::DanglingEndpoint { id, .. } if id == "Q")),
        "{v:?}"
    );
    assert!(
        v.iter()
            .any(|x| matches!(x, Violation::SelfLoop { id, .. } if id == "C")),
        "{v:?}"
    );
    assert!(
        v.iter()
            .any(|x| matches!(x, Violation::DuplicateEdge { .. })),
        "{v:?}"
    );
    assert!(
        v.iter().any(|x| matches!(x, Violation::BadLength { .. })),
        "{v:?}"
    );
}

#[test]
fn disconnected_map_is_rejected() {
    let mut doc = square_doc();
    doc["nodes"]
        .as_array_mut()
        .unwrap()
        .push(json!({"id": "F", "kind": "waypoint", "label": "", "x": 40, "y": 40}));
    let v = violations(&doc);
    assert!(
        v.iter().any(
            |x| matches!(x, Violation::Disconnected { unreachable, .. } if unreachable == &["F"])
        ),
        "{v:?}"
    );
}

#[test]
fn map_without_destinations_is_rejected() {
    let mut doc = square_doc();
    for n in doc["nodes"].as_array_mut().unwrap() {
        n["kind"] = json!("waypoint");
    }
    assert!(violations(&doc).contains(&Violation::NoDestination));
}

#[test]
fn mismatched_length_is_only_a_warning() {
    let mut doc = square_doc();
    doc["edges"][0]["length"] = json!(12.5);
    let g = MapGraph::from_json_str(&doc.to_string()).unwrap();
    assert_eq!(g.length_warnings().len(), 1);
    assert_eq!(g.edge_length("A", "B"), Some(12.5));
}
