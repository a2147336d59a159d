use std::collections::HashSet;

use proptest::prelude::*;
use serde_json::json;

use wayfind::map::MapGraph;

/// Random connected map: distinct grid points, a random spanning tree plus
/// extra chords, edge lengths stretched by up to 2x over the straight line.
pub fn arb_map() -> impl Strategy<Value = MapGraph> {
    (3usize..9)
        .prop_flat_map(|n| {
            (
                proptest::sample::subsequence((0..64).collect::<Vec<u32>>(), n),
                proptest::collection::vec(any::<prop::sample::Index>(), n),
                proptest::collection::vec((any::<prop::sample::Index>(), any::<prop::sample::Index>()), 0..n + 2),
                proptest::collection::vec(1.0f64..2.0, 3 * n + 2),
            )
        })
        .prop_map(|(cells, parents, chords, stretch)| {
            let n = cells.len();
            let pos: Vec<(f64, f64)> = cells.iter().map(|c| ((c % 8) as f64 * 3.0, (c / 8) as f64 * 3.0)).collect();
            let mut pairs: Vec<(usize, usize)> = Vec::new();
            for (i, parent) in parents.iter().enumerate().skip(1) {
                pairs.push((parent.index(i), i));
            }
            for (a, b) in chords {
                let (a, b) = (a.index(n), b.index(n));
                pairs.push((a.min(b), a.max(b)));
            }
            let mut seen = HashSet::new();
            let mut edges = Vec::new();
            for (k, (a, b)) in pairs.into_iter().enumerate() {
                let key = (a.min(b), a.max(b));
                if a == b || !seen.insert(key) {
                    continue;
                }
                let euclid = (pos[a].0 - pos[b].0).hypot(pos[a].1 - pos[b].1);
                edges.push(json!({"a": format!("N{a}"), "b": format!("N{b}"), "length": euclid * stretch[k]}));
            }
            let nodes: Vec<_> = pos
                .iter()
                .enumerate()
                .map(|(i, (x, y))| json!({"id": format!("N{i}"), "kind": "destination", "label": format!("Node {i}"), "x": x, "y": y}))
                .collect();
            let doc = json!({"format": "wayfind-map/1", "map_id": "rand", "nodes": nodes, "edges": edges});
            MapGraph::from_json_str(&doc.to_string()).expect("generated map is valid")
        })
}
