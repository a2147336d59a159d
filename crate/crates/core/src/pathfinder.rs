//! Route planning over a [`MapGraph`].
//!
//! Two route costs are supported. *Shortest* minimizes walked distance,
//! then turns. *Optimal* minimizes the number of turns, then distance. A
//! turn is an interior route node where the heading change has magnitude of
//! at least [`TURN_THRESHOLD_DEG`]. Remaining ties go to the
//! lexicographically smallest node sequence.
//!
//! [`plan_route`] runs a best-first search whose states are (node, incoming
//! edge) pairs, because the turn cost of leaving a node depends on how it
//! was entered. [`enumerate_simple_paths`] is the exhaustive oracle the
//! search is checked against; [`baseline_search`] provides the classical
//! strategies for comparison.

use std::cmp::Ordering;
use std::collections::hash_map::Entry;
use std::collections::{BinaryHeap, HashMap, HashSet, VecDeque};
use std::fmt;
use std::rc::Rc;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::map::{normalize_degrees, MapGraph, NodeId};

/// Heading change, in degrees, at or above which a node counts as a turn.
pub const TURN_THRESHOLD_DEG: f64 = 45.0;

/// Slack on the threshold. A corner that is exactly 45 degrees on paper can
/// come out of `atan2` a few ulps short in one travel direction and not the
/// other.
pub const TURN_TOLERANCE_DEG: f64 = 1e-9;

/// Default path cap for [`enumerate_simple_paths`].
pub const DEFAULT_ENUMERATION_CAP: usize = 1_000_000;

// Safety margin that keeps the straight-line heuristic strictly below true
// remaining distance despite rounding.
const HEURISTIC_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PathError {
    #[error("unknown node id `{0}`")]
    UnknownNode(String),
    #[error("path is empty")]
    EmptyPath,
    #[error("`{0}` and `{1}` are not adjacent")]
    NotAdjacent(String, String),
    #[error("node `{0}` appears more than once in the path")]
    RepeatedNode(String),
    #[error("no route from `{0}` to `{1}`")]
    Unreachable(String, String),
    #[error("more than {cap} simple paths; enumeration aborted")]
    EnumerationOverflow { cap: usize },
    #[error("enumeration cap must be positive")]
    ZeroCap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RouteMode {
    /// Fewest meters.
    Shortest,
    /// Fewest turns.
    Optimal,
}

impl RouteMode {
    pub fn as_str(self) -> &'static str {
        match self {
            RouteMode::Shortest => "shortest",
            RouteMode::Optimal => "optimal",
        }
    }
}

impl fmt::Display for RouteMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown route mode `{0}` (expected `shortest` or `optimal`)")]
pub struct ParseModeError(pub String);

impl FromStr for RouteMode {
    type Err = ParseModeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "shortest" => Ok(RouteMode::Shortest),
            "optimal" => Ok(RouteMode::Optimal),
            other => Err(ParseModeError(other.to_string())),
        }
    }
}

/// Which way the walker has to turn at a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TurnDirection {
    Straight,
    Left,
    Right,
}

/// Classifies the change from an arrival heading to a departure heading.
/// Positive deltas are counter-clockwise, i.e. to the left.
pub fn classify_turn(arrival: f64, departure: f64) -> TurnDirection {
    let delta = normalize_degrees(departure - arrival);
    if delta >= TURN_THRESHOLD_DEG - TURN_TOLERANCE_DEG {
        TurnDirection::Left
    } else if delta <= -(TURN_THRESHOLD_DEG - TURN_TOLERANCE_DEG) {
        TurnDirection::Right
    } else {
        TurnDirection::Straight
    }
}

fn is_turn(arrival: f64, departure: f64) -> bool {
    classify_turn(arrival, departure) != TurnDirection::Straight
}

/// A simple path through the map with its costs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Route {
    pub nodes: Vec<NodeId>,
    /// Meters, summed from the source forward.
    pub distance: f64,
    pub turns: u32,
    /// Heading of each step in degrees; one entry per edge.
    pub legs: Vec<f64>,
}

impl Route {
    pub fn source(&self) -> &NodeId {
        &self.nodes[0]
    }

    pub fn destination(&self) -> &NodeId {
        self.nodes.last().expect("route has at least one node")
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Position of `id` in the route.
    pub fn position(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.as_str() == id)
    }

    /// Heading change at interior node `i`, in `(-180, 180]`.
    pub fn heading_delta(&self, i: usize) -> Option<f64> {
        if i == 0 || i + 1 >= self.nodes.len() {
            return None;
        }
        Some(normalize_degrees(self.legs[i] - self.legs[i - 1]))
    }

    /// Ranking key for `mode`, without the node-sequence tie-break.
    fn cost(&self, mode: RouteMode) -> (f64, f64) {
        match mode {
            RouteMode::Shortest => (self.distance, self.turns as f64),
            RouteMode::Optimal => (self.turns as f64, self.distance),
        }
    }

    fn from_indices(g: &MapGraph, path: &[usize]) -> Route {
        let mut distance = 0.0;
        let mut legs = Vec::with_capacity(path.len().saturating_sub(1));
        for w in path.windows(2) {
            distance += g
                .edge_length_ix(w[0], w[1])
                .expect("consecutive nodes adjacent");
            legs.push(g.heading_ix(w[0], w[1]));
        }
        let turns = legs.windows(2).filter(|l| is_turn(l[0], l[1])).count() as u32;
        Route {
            nodes: path.iter().map(|&ix| g.node_at(ix).id.clone()).collect(),
            distance,
            turns,
            legs,
        }
    }
}

/// Compares two routes under `mode`, falling back to node-id order.
pub fn compare_routes(a: &Route, b: &Route, mode: RouteMode) -> Ordering {
    let (ap, asec) = a.cost(mode);
    let (bp, bsec) = b.cost(mode);
    ap.total_cmp(&bp)
        .then(asec.total_cmp(&bsec))
        .then_with(|| a.nodes.cmp(&b.nodes))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    /// Distinct graph nodes taken off the frontier and expanded.
    pub nodes_expanded: usize,
    /// Complete simple paths produced; only the enumeration oracle fills this.
    pub paths_enumerated: usize,
}

/// Classical strategies kept for comparison with [`plan_route`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Bfs,
    Dfs,
    Greedy,
    Dijkstra,
}

impl FromStr for Strategy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bfs" => Ok(Strategy::Bfs),
            "dfs" => Ok(Strategy::Dfs),
            "greedy" => Ok(Strategy::Greedy),
            "dijkstra" => Ok(Strategy::Dijkstra),
            other => Err(format!("unknown strategy `{other}`")),
        }
    }
}

fn lookup(g: &MapGraph, id: &str) -> Result<usize, PathError> {
    g.index_of(id)
        .ok_or_else(|| PathError::UnknownNode(id.to_string()))
}

/// Number of turns along `nodes`.
pub fn path_turn_cost<S: AsRef<str>>(g: &MapGraph, nodes: &[S]) -> Result<u32, PathError> {
    let ix = nodes
        .iter()
        .map(|n| lookup(g, n.as_ref()))
        .collect::<Result<Vec<_>, _>>()?;
    if ix.is_empty() {
        return Err(PathError::EmptyPath);
    }
    let mut seen = HashSet::new();
    for &i in &ix {
        if !seen.insert(i) {
            return Err(PathError::RepeatedNode(g.node_at(i).id.to_string()));
        }
    }
    for w in ix.windows(2) {
        if g.edge_length_ix(w[0], w[1]).is_none() {
            return Err(PathError::NotAdjacent(
                g.node_at(w[0]).id.to_string(),
                g.node_at(w[1]).id.to_string(),
            ));
        }
    }
    Ok(Route::from_indices(g, &ix).turns)
}

/// Every simple path from `src` to `dst`, in lexicographic node order.
///
/// Fails with [`PathError::EnumerationOverflow`] instead of truncating when
/// more than `cap` paths exist.
pub fn enumerate_simple_paths(
    g: &MapGraph,
    src: &str,
    dst: &str,
    cap: usize,
) -> Result<Vec<Route>, PathError> {
    enumerate_indices(g, src, dst, cap)
        .map(|paths| paths.iter().map(|p| Route::from_indices(g, p)).collect())
}

fn enumerate_indices(
    g: &MapGraph,
    src: &str,
    dst: &str,
    cap: usize,
) -> Result<Vec<Vec<usize>>, PathError> {
    if cap == 0 {
        return Err(PathError::ZeroCap);
    }
    let (s, t) = (lookup(g, src)?, lookup(g, dst)?);
    let mut out = Vec::new();
    if s == t {
        out.push(vec![s]);
        return Ok(out);
    }
    let mut on_path = vec![false; g.len()];
    let mut path = vec![s];
    on_path[s] = true;
    // Iterative DFS: stack of (node, next adjacency slot). Adjacency lists are
    // id-sorted, so paths come out in lexicographic order.
    let mut stack = vec![(s, 0usize)];
    while let Some(&mut (u, ref mut slot)) = stack.last_mut() {
        let adj = g.adjacent(u);
        if *slot >= adj.len() {
            stack.pop();
            on_path[u] = false;
            path.pop();
            continue;
        }
        let v = adj[*slot].0;
        *slot += 1;
        if on_path[v] {
            continue;
        }
        if v == t {
            if out.len() == cap {
                return Err(PathError::EnumerationOverflow { cap });
            }
            let mut p = path.clone();
            p.push(t);
            out.push(p);
            continue;
        }
        on_path[v] = true;
        path.push(v);
        stack.push((v, 0));
    }
    Ok(out)
}

/// Plans the best route from `src` to `dst` under `mode`.
pub fn plan_route(g: &MapGraph, src: &str, dst: &str, mode: RouteMode) -> Result<Route, PathError> {
    plan_route_with_stats(g, src, dst, mode).map(|(r, _)| r)
}

/// [`plan_route`] plus the number of nodes the search expanded.
pub fn plan_route_with_stats(
    g: &MapGraph,
    src: &str,
    dst: &str,
    mode: RouteMode,
) -> Result<(Route, SearchStats), PathError> {
    let (s, t) = (lookup(g, src)?, lookup(g, dst)?);
    if s == t {
        let stats = SearchStats {
            nodes_expanded: 1,
            paths_enumerated: 0,
        };
        return Ok((Route::from_indices(g, &[s]), stats));
    }
    let (walk, stats) = best_first(g, s, t, mode)
        .ok_or_else(|| PathError::Unreachable(src.to_string(), dst.to_string()))?;
    let mut seen = HashSet::with_capacity(walk.len());
    if walk.iter().all(|&ix| seen.insert(ix)) {
        return Ok((Route::from_indices(g, &walk), stats));
    }
    // A turn-minimal walk can loop back through a node (e.g. around a
    // roundabout) when no simple path does as well. Routes must be simple,
    // so settle it exactly.
    let best = enumerate_simple_paths(g, src, dst, DEFAULT_ENUMERATION_CAP)?
        .into_iter()
        .min_by(|a, b| compare_routes(a, b, mode))
        .ok_or_else(|| PathError::Unreachable(src.to_string(), dst.to_string()))?;
    Ok((best, stats))
}

/// Search label: accumulated costs plus the walk that produced them.
#[derive(Clone)]
struct Label {
    distance: f64,
    turns: u32,
    path: Rc<Vec<usize>>,
}

struct QueueEntry {
    /// (major, minor) priority; lower first.
    key: (f64, f64),
    /// Node ids of `label.path` as ranks, for the final tie-break.
    ranks: Rc<Vec<usize>>,
    state: (usize, usize),
    label: Label,
}

impl PartialEq for QueueEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for QueueEntry {}
impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for QueueEntry {
    // reversed: BinaryHeap is a max-heap
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .key
            .0
            .total_cmp(&self.key.0)
            .then(other.key.1.total_cmp(&self.key.1))
            .then_with(|| other.ranks.cmp(&self.ranks))
    }
}

/// Scale for the straight-line heuristic so it never exceeds any edge's
/// stored length, even on maps whose lengths undercut the geometry.
fn heuristic_scale(g: &MapGraph) -> f64 {
    let mut scale: f64 = 1.0;
    for u in 0..g.len() {
        let pu = g.node_at(u).position;
        for &(v, len) in g.adjacent(u) {
            let span = pu.distance(&g.node_at(v).position);
            if span > 0.0 {
                scale = scale.min(len / span);
            }
        }
    }
    scale * (1.0 - HEURISTIC_MARGIN)
}

fn entry_key(mode: RouteMode, label: &Label, h: f64) -> (f64, f64) {
    match mode {
        RouteMode::Shortest => (label.distance + h, label.turns as f64),
        RouteMode::Optimal => (label.turns as f64, label.distance),
    }
}

/// Compares labels reaching the same state; the heuristic is identical for
/// both, so accumulated cost decides.
fn better(mode: RouteMode, g: &MapGraph, a: &Label, b: &Label) -> bool {
    let ka = entry_key(mode, a, 0.0);
    let kb = entry_key(mode, b, 0.0);
    ka.0.total_cmp(&kb.0)
        .then(ka.1.total_cmp(&kb.1))
        .then_with(|| {
            a.path
                .iter()
                .map(|&i| g.rank(i))
                .cmp(b.path.iter().map(|&i| g.rank(i)))
        })
        == Ordering::Less
}

/// Best-first search over (node, predecessor) states. Shortest mode uses
/// the straight-line distance to `t` as heuristic (A*); optimal mode uses no
/// heuristic. States are reopened whenever a better label arrives, so the
/// first time `t` leaves the queue its label is optimal.
fn best_first(
    g: &MapGraph,
    s: usize,
    t: usize,
    mode: RouteMode,
) -> Option<(Vec<usize>, SearchStats)> {
    let target = g.node_at(t).position;
    let scale = match mode {
        RouteMode::Shortest => heuristic_scale(g),
        RouteMode::Optimal => 0.0,
    };
    let h = |ix: usize| scale * g.node_at(ix).position.distance(&target);

    // The source state has no incoming edge; `usize::MAX` marks it.
    const NO_PRED: usize = usize::MAX;
    let mut best: HashMap<(usize, usize), Label> = HashMap::new();
    let mut expanded = vec![false; g.len()];
    let mut stats = SearchStats::default();
    let mut heap = BinaryHeap::new();

    let start = Label {
        distance: 0.0,
        turns: 0,
        path: Rc::new(vec![s]),
    };
    best.insert((s, NO_PRED), start.clone());
    heap.push(QueueEntry {
        key: entry_key(mode, &start, h(s)),
        ranks: Rc::new(vec![g.rank(s)]),
        state: (s, NO_PRED),
        label: start,
    });

    while let Some(QueueEntry { state, label, .. }) = heap.pop() {
        let current = &best[&state];
        if !Rc::ptr_eq(&current.path, &label.path) {
            continue; // superseded
        }
        let (u, pred) = state;
        if !expanded[u] {
            expanded[u] = true;
            stats.nodes_expanded += 1;
        }
        if u == t {
            return Some((label.path.to_vec(), stats));
        }
        let arrival = (pred != NO_PRED).then(|| g.heading_ix(pred, u));
        for &(v, len) in g.adjacent(u) {
            if v == pred {
                continue; // immediate U-turn never helps
            }
            let turn = arrival.is_some_and(|a| is_turn(a, g.heading_ix(u, v)));
            let mut path = Vec::with_capacity(label.path.len() + 1);
            path.extend_from_slice(&label.path);
            path.push(v);
            let next = Label {
                distance: label.distance + len,
                turns: label.turns + turn as u32,
                path: Rc::new(path),
            };
            let improved = match best.entry((v, u)) {
                Entry::Vacant(e) => {
                    e.insert(next.clone());
                    true
                }
                Entry::Occupied(mut e) => {
                    if better(mode, g, &next, e.get()) {
                        e.insert(next.clone());
                        true
                    } else {
                        false
                    }
                }
            };
            if improved {
                let ranks = Rc::new(next.path.iter().map(|&i| g.rank(i)).collect());
                heap.push(QueueEntry {
                    key: entry_key(mode, &next, h(v)),
                    ranks,
                    state: (v, u),
                    label: next,
                });
            }
        }
    }
    None
}

/// Runs one of the classical strategies. Ties between neighbors are broken
/// by ascending node id.
///
/// `Dijkstra` minimizes distance and `Bfs` minimizes hop count. `Dfs` and
/// `Greedy` (depth-first, always trying the shortest unexplored edge first)
/// return the first route they reach and promise nothing about its cost.
pub fn baseline_search(
    g: &MapGraph,
    src: &str,
    dst: &str,
    strategy: Strategy,
) -> Result<(Route, SearchStats), PathError> {
    let (s, t) = (lookup(g, src)?, lookup(g, dst)?);
    let found = match strategy {
        Strategy::Dijkstra => dijkstra(g, s, t),
        Strategy::Bfs => bfs(g, s, t),
        Strategy::Dfs => depth_first(g, s, t, false),
        Strategy::Greedy => depth_first(g, s, t, true),
    };
    let (path, stats) =
        found.ok_or_else(|| PathError::Unreachable(src.to_string(), dst.to_string()))?;
    Ok((Route::from_indices(g, &path), stats))
}

fn unwind(parent: &[usize], s: usize, t: usize) -> Vec<usize> {
    let mut path = vec![t];
    let mut cur = t;
    while cur != s {
        cur = parent[cur];
        path.push(cur);
    }
    path.reverse();
    path
}

fn dijkstra(g: &MapGraph, s: usize, t: usize) -> Option<(Vec<usize>, SearchStats)> {
    #[derive(PartialEq)]
    struct Item(f64, usize, usize);
    impl Eq for Item {}
    impl PartialOrd for Item {
        fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
            Some(self.cmp(other))
        }
    }
    impl Ord for Item {
        fn cmp(&self, other: &Self) -> Ordering {
            other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
        }
    }

    let mut dist = vec![f64::INFINITY; g.len()];
    let mut parent = vec![usize::MAX; g.len()];
    let mut done = vec![false; g.len()];
    let mut stats = SearchStats::default();
    let mut heap = BinaryHeap::new();
    dist[s] = 0.0;
    heap.push(Item(0.0, g.rank(s), s));
    while let Some(Item(d, _, u)) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        stats.nodes_expanded += 1;
        if u == t {
            return Some((unwind(&parent, s, t), stats));
        }
        for &(v, len) in g.adjacent(u) {
            let nd = d + len;
            if !done[v] && nd < dist[v] {
                dist[v] = nd;
                parent[v] = u;
                heap.push(Item(nd, g.rank(v), v));
            }
        }
    }
    None
}

fn bfs(g: &MapGraph, s: usize, t: usize) -> Option<(Vec<usize>, SearchStats)> {
    let mut parent = vec![usize::MAX; g.len()];
    let mut seen = vec![false; g.len()];
    let mut stats = SearchStats::default();
    let mut queue = VecDeque::from([s]);
    seen[s] = true;
    while let Some(u) = queue.pop_front() {
        stats.nodes_expanded += 1;
        if u == t {
            return Some((unwind(&parent, s, t), stats));
        }
        for &(v, _) in g.adjacent(u) {
            if !seen[v] {
                seen[v] = true;
                parent[v] = u;
                queue.push_back(v);
            }
        }
    }
    None
}

fn depth_first(
    g: &MapGraph,
    s: usize,
    t: usize,
    by_edge_length: bool,
) -> Option<(Vec<usize>, SearchStats)> {
    let order = |u: usize| -> Vec<usize> {
        let mut adj = g.adjacent(u).to_vec();
        if by_edge_length {
            // stable sort keeps id order among equal lengths
            adj.sort_by(|a, b| a.1.total_cmp(&b.1));
        }
        adj.into_iter().map(|(v, _)| v).collect()
    };
    let mut visited = vec![false; g.len()];
    let mut stats = SearchStats::default();
    let mut path = vec![s];
    let mut stack = vec![(order(s), 0usize)];
    visited[s] = true;
    stats.nodes_expanded += 1;
    if s == t {
        return Some((path, stats));
    }
    while let Some((next, slot)) = stack.last_mut() {
        let Some(&v) = next.get(*slot) else {
            stack.pop();
            path.pop();
            continue;
        };
        *slot += 1;
        if visited[v] {
            continue;
        }
        visited[v] = true;
        stats.nodes_expanded += 1;
        path.push(v);
        if v == t {
            return Some((path, stats));
        }
        stack.push((order(v), 0));
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQUARE: &str = include_str!("../maps/square.json");
    const TRAP: &str = include_str!("../maps/greedy_trap.json");
    const FCIT: &str = include_str!("../maps/fcit.json");

    fn square() -> MapGraph {
        MapGraph::from_json_str(SQUARE).unwrap()
    }

    fn ids(r: &Route) -> Vec<&str> {
        r.nodes.iter().map(|n| n.as_str()).collect()
    }

    #[test]
    fn turn_cost_examples() {
        let g = square();
        assert_eq!(path_turn_cost(&g, &["A", "B", "C"]).unwrap(), 1);
        assert_eq!(path_turn_cost(&g, &["A", "B", "E"]).unwrap(), 0);
        assert_eq!(path_turn_cost(&g, &["A", "B"]).unwrap(), 0);
        assert_eq!(path_turn_cost(&g, &["A"]).unwrap(), 0);
    }

    #[test]
    fn turn_cost_errors() {
        let g = square();
        assert_eq!(
            path_turn_cost(&g, &["A", "C"]),
            Err(PathError::NotAdjacent("A".into(), "C".into()))
        );
        assert_eq!(
            path_turn_cost(&g, &["A", "B", "A"]),
            Err(PathError::RepeatedNode("A".into()))
        );
        assert_eq!(path_turn_cost::<&str>(&g, &[]), Err(PathError::EmptyPath));
        assert_eq!(
            path_turn_cost(&g, &["A", "Q"]),
            Err(PathError::UnknownNode("Q".into()))
        );
    }

    #[test]
    fn threshold_is_inclusive() {
        assert_eq!(classify_turn(0.0, 45.0), TurnDirection::Left);
        assert_eq!(classify_turn(0.0, -45.0), TurnDirection::Right);
        assert_eq!(classify_turn(0.0, 44.999), TurnDirection::Straight);
        assert_eq!(classify_turn(170.0, -170.0), TurnDirection::Straight);
        assert_eq!(classify_turn(0.0, 180.0), TurnDirection::Left);
    }

    #[test]
    fn enumerate_square() {
        let g = square();
        let routes = enumerate_simple_paths(&g, "A", "C", 10).unwrap();
        let seqs: Vec<Vec<&str>> = routes.iter().map(ids).collect();
        assert_eq!(seqs, vec![vec!["A", "B", "C"], vec!["A", "D", "C"]]);
        assert!(routes.iter().all(|r| r.distance == 20.0 && r.turns == 1));

        let same = enumerate_simple_paths(&g, "A", "A", 10).unwrap();
        assert_eq!(same.len(), 1);
        assert_eq!(ids(&same[0]), ["A"]);
        assert_eq!((same[0].distance, same[0].turns), (0.0, 0));
    }

    #[test]
    fn enumeration_overflows_instead_of_truncating() {
        let g = square();
        assert_eq!(
            enumerate_simple_paths(&g, "A", "C", 1),
            Err(PathError::EnumerationOverflow { cap: 1 })
        );
        assert_eq!(
            enumerate_simple_paths(&g, "A", "C", 0),
            Err(PathError::ZeroCap)
        );
        assert_eq!(enumerate_simple_paths(&g, "A", "C", 2).unwrap().len(), 2);
    }

    #[test]
    fn plan_square_tie_break() {
        let g = square();
        let r = plan_route(&g, "A", "C", RouteMode::Shortest).unwrap();
        assert_eq!(ids(&r), ["A", "B", "C"]);
        assert_eq!((r.distance, r.turns), (20.0, 1));
        assert_eq!(r.legs, vec![0.0, 90.0]);
        let r = plan_route(&g, "C", "A", RouteMode::Optimal).unwrap();
        assert_eq!(ids(&r), ["C", "B", "A"]);
    }

    #[test]
    fn plan_degenerate_and_unknown() {
        let g = square();
        for mode in [RouteMode::Shortest, RouteMode::Optimal] {
            let r = plan_route(&g, "D", "D", mode).unwrap();
            assert_eq!(ids(&r), ["D"]);
            assert_eq!((r.distance, r.turns), (0.0, 0));
            assert!(r.legs.is_empty());
        }
        assert_eq!(
            plan_route(&g, "A", "Z", RouteMode::Shortest),
            Err(PathError::UnknownNode("Z".into()))
        );
    }

    #[test]
    fn near_threshold_corner_counts_both_ways() {
        // (12,0) -> (6,3) -> (3,12) and back: a 45 degree corner whose
        // computed delta is -44.99999999999997 one way and 45.0 the other
        assert_eq!(
            classify_turn(153.43494882292202, 108.43494882292202),
            TurnDirection::Right
        );
        assert_eq!(
            classify_turn(-71.56505117707799, -26.56505117707799),
            TurnDirection::Left
        );
        assert_eq!(classify_turn(0.0, 44.9), TurnDirection::Straight);
        assert_eq!(classify_turn(0.0, -44.9), TurnDirection::Straight);
    }

    #[test]
    fn two_candidate_pair_on_demo_map() {
        let g = MapGraph::from_json_str(FCIT).unwrap();
        let all = enumerate_simple_paths(&g, "L1", "L13", DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(all.len(), 2);
        let optimal = plan_route(&g, "L1", "L13", RouteMode::Optimal).unwrap();
        let shortest = plan_route(&g, "L1", "L13", RouteMode::Shortest).unwrap();
        // frozen from an independent networkx enumeration
        assert_eq!(optimal.turns, 1);
        assert_eq!(optimal.distance, 60.0);
        assert_eq!(shortest.turns, 3);
        assert!((shortest.distance - 56.48528137423857).abs() < 1e-9);
    }

    #[test]
    fn baselines_on_square() {
        let g = square();
        let (r, _) = baseline_search(&g, "A", "C", Strategy::Dijkstra).unwrap();
        assert_eq!(r.distance, 20.0);
        let (r, _) = baseline_search(&g, "A", "E", Strategy::Bfs).unwrap();
        assert_eq!(ids(&r), ["A", "B", "E"]);
        let (r, s) = baseline_search(&g, "A", "A", Strategy::Dfs).unwrap();
        assert_eq!(ids(&r), ["A"]);
        assert_eq!(s.nodes_expanded, 1);
    }

    #[test]
    fn greedy_walks_into_the_trap() {
        let g = MapGraph::from_json_str(TRAP).unwrap();
        let (greedy, _) = baseline_search(&g, "S", "T", Strategy::Greedy).unwrap();
        let (dijkstra, _) = baseline_search(&g, "S", "T", Strategy::Dijkstra).unwrap();
        assert_eq!(ids(&greedy), ["S", "A", "B", "T"]);
        assert_eq!(ids(&dijkstra), ["S", "T"]);
        assert!((greedy.distance - 20.4339811320566).abs() < 1e-9);
        assert_eq!(dijkstra.distance, 10.0);
    }

    #[test]
    fn dfs_takes_first_branch() {
        let g = square();
        let (r, _) = baseline_search(&g, "A", "C", Strategy::Dfs).unwrap();
        assert_eq!(ids(&r), ["A", "B", "C"]);
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("optimal".parse::<RouteMode>().unwrap(), RouteMode::Optimal);
        assert!("scenic".parse::<RouteMode>().is_err());
        assert_eq!(
            serde_json::to_string(&RouteMode::Shortest).unwrap(),
            "\"shortest\""
        );
    }

    #[test]
    fn loop_only_walk_falls_back_to_simple_paths() {
        // A balloon loop east of H lets a walker come back to H facing west
        // without any sharp turn. The only simple route P-H-Q reverses at H,
        // so the turn-minimal walk is not simple and must not be returned.
        let mut nodes = vec![
            r#"{"id":"P","kind":"destination","label":"P","x":-10,"y":0}"#.to_string(),
            r#"{"id":"H","kind":"waypoint","label":"H","x":0,"y":0}"#.to_string(),
            r#"{"id":"Q","kind":"destination","label":"Q","x":-10,"y":-1.76}"#.to_string(),
        ];
        let mut pos = vec![("P".to_string(), -10.0, 0.0), ("H".to_string(), 0.0, 0.0)];
        pos.push(("Q".to_string(), -10.0, -1.76));
        let ring: Vec<(String, f64, f64)> = (0..=12)
            .map(|k| {
                let a = (135.0 - 22.5 * k as f64).to_radians();
                (format!("R{k}"), 10.0 + 5.0 * a.cos(), 5.0 * a.sin())
            })
            .collect();
        for (id, x, y) in &ring {
            nodes.push(format!(
                r#"{{"id":"{id}","kind":"waypoint","label":"{id}","x":{x},"y":{y}}}"#
            ));
        }
        pos.extend(ring.iter().cloned());
        let mut pairs = vec![("P", "H"), ("H", "Q"), ("H", "R0"), ("H", "R12")];
        let names: Vec<String> = (0..=12).map(|k| format!("R{k}")).collect();
        for k in 0..12 {
            pairs.push((&names[k], &names[k + 1]));
        }
        let at = |id: &str| {
            let (_, x, y) = pos.iter().find(|(n, _, _)| n == id).unwrap();
            (*x, *y)
        };
        let edges: Vec<String> = pairs
            .iter()
            .map(|(a, b)| {
                let ((ax, ay), (bx, by)) = (at(a), at(b));
                let len = (bx - ax).hypot(by - ay);
                format!(r#"{{"a":"{a}","b":"{b}","length":{len}}}"#)
            })
            .collect();
        let doc = format!(
            r#"{{"format":"wayfind-map/1","map_id":"balloon","nodes":[{}],"edges":[{}]}}"#,
            nodes.join(","),
            edges.join(",")
        );
        let g = MapGraph::from_json_str(&doc).unwrap();
        let (walk, _) = best_first(
            &g,
            g.index_of("P").unwrap(),
            g.index_of("Q").unwrap(),
            RouteMode::Optimal,
        )
        .unwrap();
        assert!(walk.len() > 3, "search should find the loop walk");

        let r = plan_route(&g, "P", "Q", RouteMode::Optimal).unwrap();
        assert_eq!(ids(&r), ["P", "H", "Q"]);
        assert_eq!(r.turns, 1);
    }
}
