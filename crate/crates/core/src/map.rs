//! Floor-plan graph, its validation and the `wayfind-map/1` file format.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::io::Read;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Value of the `format` key every map document must carry.
pub const MAP_FORMAT: &str = "wayfind-map/1";

/// Maximum length of a node id, in characters.
pub const MAX_NODE_ID_LEN: usize = 32;

/// Relative tolerance between a stored edge length and the Euclidean
/// distance of its endpoints before [`MapGraph::length_warnings`] reports it.
pub const LENGTH_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum MapError {
    #[error("map parse error: {0}")]
    Parse(String),
    #[error("map validation failed: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("unknown node id `{0}`")]
    UnknownNode(String),
    #[error("nodes `{0}` and `{1}` share a position; heading is undefined")]
    CoincidentPositions(String, String),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

/// One broken invariant found while validating a map document.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Violation {
    #[error("map_id `{0}` must be non-empty printable ASCII without `|` or whitespace")]
    InvalidMapId(String),
    #[error("invalid node id `{id}`: {reason}")]
    InvalidNodeId { id: String, reason: &'static str },
    #[error("duplicate node id `{0}`")]
    DuplicateNode(String),
    #[error("node `{0}` has a non-finite position")]
    NonFinitePosition(String),
    #[error("destination node `{0}` has an empty label")]
    EmptyDestinationLabel(String),
    #[error("edge #{edge} references missing node `{id}`")]
    DanglingEndpoint { edge: usize, id: String },
    #[error("edge #{edge} connects `{id}` to itself")]
    SelfLoop { edge: usize, id: String },
    #[error("edge #{edge} ({a}-{b}) has non-positive or non-finite length {length}")]
    BadLength {
        edge: usize,
        a: String,
        b: String,
        length: f64,
    },
    #[error("edge #{edge} duplicates the {a}-{b} connection")]
    DuplicateEdge { edge: usize, a: String, b: String },
    #[error("edge #{edge} ({a}-{b}) joins two nodes at the same position")]
    ZeroSpan { edge: usize, a: String, b: String },
    #[error("map has no destination node")]
    NoDestination,
    #[error("graph is disconnected; unreachable from `{from}`: {}", .unreachable.join(", "))]
    Disconnected {
        from: String,
        unreachable: Vec<String>,
    },
}

/// Identifier of a strip node: 1 to 32 characters from `[A-Za-z0-9_-]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(id: impl Into<String>) -> Result<Self, Violation> {
        let id = id.into();
        match Self::check(&id) {
            Some(reason) => Err(Violation::InvalidNodeId { id, reason }),
            None => Ok(NodeId(id)),
        }
    }

    fn check(id: &str) -> Option<&'static str> {
        if id.is_empty() {
            Some("empty")
        } else if id.chars().count() > MAX_NODE_ID_LEN {
            Some("longer than 32 characters")
        } else if !id
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || b == b'_' || b == b'-')
        {
            Some("characters outside [A-Za-z0-9_-]")
        } else {
            None
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for NodeId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        NodeId::new(s).map_err(serde::de::Error::custom)
    }
}

impl std::str::FromStr for NodeId {
    type Err = Violation;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        NodeId::new(s)
    }
}

impl AsRef<str> for NodeId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// Map ids end up inside QR payloads, so they share the payload's
/// restrictions: printable ASCII, no whitespace, no `|`.
pub fn is_valid_map_id(id: &str) -> bool {
    !id.is_empty() && id.bytes().all(|b| b.is_ascii_graphic() && b != b'|')
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Destination,
    Waypoint,
}

/// Planar position in meters; +x east, +y north.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn distance(&self, other: &Point) -> f64 {
        (other.x - self.x).hypot(other.y - self.y)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MapNode {
    pub id: NodeId,
    pub kind: NodeKind,
    pub label: String,
    pub position: Point,
    /// Spoken when the node's strip is scanned.
    pub announcement: Option<String>,
}

impl MapNode {
    pub fn is_destination(&self) -> bool {
        self.kind == NodeKind::Destination
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MapEdge {
    pub a: NodeId,
    pub b: NodeId,
    pub length: f64,
}

/// Edge length that disagrees with the endpoints' straight-line distance.
#[derive(Debug, Clone, PartialEq)]
pub struct LengthWarning {
    pub a: NodeId,
    pub b: NodeId,
    pub length: f64,
    pub euclidean: f64,
}

impl fmt::Display for LengthWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "edge {}-{} length {} differs from straight-line distance {}",
            self.a, self.b, self.length, self.euclidean
        )
    }
}

/// Immutable, validated floor plan.
///
/// Nodes and edges keep their document order so that serialization
/// round-trips. Adjacency lists are sorted by ascending [`NodeId`].
#[derive(Debug, Clone, PartialEq)]
pub struct MapGraph {
    map_id: String,
    nodes: Vec<MapNode>,
    edges: Vec<MapEdge>,
    index: HashMap<NodeId, usize>,
    adjacency: Vec<Vec<(usize, f64)>>,
    rank: Vec<usize>,
}

// --- file format -----------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MapDoc {
    format: String,
    map_id: String,
    nodes: Vec<NodeDoc>,
    edges: Vec<EdgeDoc>,
}

#[derive(Serialize, Deserialize)]
struct NodeDoc {
    id: String,
    kind: NodeKind,
    label: String,
    x: f64,
    y: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    announcement: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct EdgeDoc {
    a: String,
    b: String,
    length: f64,
}

/// Reads and validates a map document.
pub fn load_map<R: Read>(mut source: R) -> Result<MapGraph, MapError> {
    let mut buf = Vec::new();
    source
        .read_to_end(&mut buf)
        .map_err(|e| MapError::Parse(e.to_string()))?;
    MapGraph::from_json_slice(&buf)
}

impl MapGraph {
    pub fn from_json_slice(bytes: &[u8]) -> Result<Self, MapError> {
        let doc: MapDoc =
            serde_json::from_slice(bytes).map_err(|e| MapError::Parse(e.to_string()))?;
        if doc.format != MAP_FORMAT {
            return Err(MapError::Parse(format!(
                "unsupported format `{}`, expected `{MAP_FORMAT}`",
                doc.format
            )));
        }
        Self::from_doc(doc)
    }

    pub fn from_json_str(s: &str) -> Result<Self, MapError> {
        Self::from_json_slice(s.as_bytes())
    }

    fn from_doc(doc: MapDoc) -> Result<Self, MapError> {
        let mut violations = Vec::new();
        if !is_valid_map_id(&doc.map_id) {
            violations.push(Violation::InvalidMapId(doc.map_id.clone()));
        }

        let mut nodes = Vec::with_capacity(doc.nodes.len());
        let mut index = HashMap::new();
        for n in doc.nodes {
            let id = match NodeId::new(n.id) {
                Ok(id) => id,
                Err(v) => {
                    violations.push(v);
                    continue;
                }
            };
            if index.contains_key(&id) {
                violations.push(Violation::DuplicateNode(id.0));
                continue;
            }
            if !n.x.is_finite() || !n.y.is_finite() {
                violations.push(Violation::NonFinitePosition(id.0.clone()));
            }
            if n.kind == NodeKind::Destination && n.label.trim().is_empty() {
                violations.push(Violation::EmptyDestinationLabel(id.0.clone()));
            }
            index.insert(id.clone(), nodes.len());
            nodes.push(MapNode {
                id,
                kind: n.kind,
                label: n.label,
                position: Point { x: n.x, y: n.y },
                announcement: n.announcement,
            });
        }
        if !nodes.iter().any(MapNode::is_destination) {
            violations.push(Violation::NoDestination);
        }

        let mut edges = Vec::with_capacity(doc.edges.len());
        let mut adjacency = vec![Vec::new(); nodes.len()];
        let mut pairs = HashSet::new();
        for (i, e) in doc.edges.into_iter().enumerate() {
            let mut resolved = [None, None];
            for (slot, id) in resolved.iter_mut().zip([&e.a, &e.b]) {
                match NodeId::new(id.as_str()).ok().and_then(|id| index.get(&id)) {
                    Some(&ix) => *slot = Some(ix),
                    None => violations.push(Violation::DanglingEndpoint {
                        edge: i,
                        id: id.clone(),
                    }),
                }
            }
            if e.a == e.b {
                violations.push(Violation::SelfLoop {
                    edge: i,
                    id: e.a.clone(),
                });
                continue;
            }
            if !(e.length.is_finite() && e.length > 0.0) {
                violations.push(Violation::BadLength {
                    edge: i,
                    a: e.a.clone(),
                    b: e.b.clone(),
                    length: e.length,
                });
            }
            let [Some(ia), Some(ib)] = resolved else {
                continue;
            };
            if !pairs.insert((ia.min(ib), ia.max(ib))) {
                violations.push(Violation::DuplicateEdge {
                    edge: i,
                    a: e.a,
                    b: e.b,
                });
                continue;
            }
            if nodes[ia].position == nodes[ib].position {
                violations.push(Violation::ZeroSpan {
                    edge: i,
                    a: e.a.clone(),
                    b: e.b.clone(),
                });
            }
            adjacency[ia].push((ib, e.length));
            adjacency[ib].push((ia, e.length));
            edges.push(MapEdge {
                a: nodes[ia].id.clone(),
                b: nodes[ib].id.clone(),
                length: e.length,
            });
        }

        if !nodes.is_empty() {
            let mut seen = vec![false; nodes.len()];
            let mut queue = VecDeque::from([0usize]);
            seen[0] = true;
            while let Some(u) = queue.pop_front() {
                for &(v, _) in &adjacency[u] {
                    if !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
            let unreachable: Vec<String> = nodes
                .iter()
                .zip(&seen)
                .filter(|(_, &s)| !s)
                .map(|(n, _)| n.id.0.clone())
                .collect();
            if !unreachable.is_empty() {
                violations.push(Violation::Disconnected {
                    from: nodes[0].id.0.clone(),
                    unreachable,
                });
            }
        }

        if !violations.is_empty() {
            return Err(MapError::Invalid(violations));
        }

        let mut order: Vec<usize> = (0..nodes.len()).collect();
        order.sort_by(|&a, &b| nodes[a].id.cmp(&nodes[b].id));
        let mut rank = vec![0; nodes.len()];
        for (r, &ix) in order.iter().enumerate() {
            rank[ix] = r;
        }
        for list in &mut adjacency {
            list.sort_by_key(|&(v, _)| rank[v]);
        }

        Ok(MapGraph {
            map_id: doc.map_id,
            nodes,
            edges,
            index,
            adjacency,
            rank,
        })
    }

    fn to_doc(&self) -> MapDoc {
        MapDoc {
            format: MAP_FORMAT.to_string(),
            map_id: self.map_id.clone(),
            nodes: self
                .nodes
                .iter()
                .map(|n| NodeDoc {
                    id: n.id.0.clone(),
                    kind: n.kind,
                    label: n.label.clone(),
                    x: n.position.x,
                    y: n.position.y,
                    announcement: n.announcement.clone(),
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeDoc {
                    a: e.a.0.clone(),
                    b: e.b.0.clone(),
                    length: e.length,
                })
                .collect(),
        }
    }

    /// Serializes to the `wayfind-map/1` document format.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("map document serializes")
    }

    pub fn map_id(&self) -> &str {
        &self.map_id
    }

    pub fn nodes(&self) -> &[MapNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[MapEdge] {
        &self.edges
    }

    pub fn node(&self, id: &str) -> Option<&MapNode> {
        self.index_of(id).map(|ix| &self.nodes[ix])
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index_of(id).is_some()
    }

    /// Destination nodes in document order.
    pub fn destinations(&self) -> impl Iterator<Item = &MapNode> {
        self.nodes.iter().filter(|n| n.is_destination())
    }

    /// Neighbors of `id` with edge lengths, in ascending id order.
    pub fn neighbors(&self, id: &str) -> Result<Vec<(NodeId, f64)>, MapError> {
        let ix = self
            .index_of(id)
            .ok_or_else(|| MapError::UnknownNode(id.to_string()))?;
        Ok(self.adjacency[ix]
            .iter()
            .map(|&(v, len)| (self.nodes[v].id.clone(), len))
            .collect())
    }

    /// Edge length between two nodes, if they are adjacent.
    pub fn edge_length(&self, a: &str, b: &str) -> Option<f64> {
        let (ia, ib) = (self.index_of(a)?, self.index_of(b)?);
        self.edge_length_ix(ia, ib)
    }

    pub fn length_warnings(&self) -> Vec<LengthWarning> {
        self.edges
            .iter()
            .filter_map(|e| {
                let pa = self.nodes[self.index[&e.a]].position;
                let pb = self.nodes[self.index[&e.b]].position;
                let euclidean = pa.distance(&pb);
                let rel = (e.length - euclidean).abs() / euclidean.max(f64::MIN_POSITIVE);
                (rel > LENGTH_TOLERANCE).then(|| LengthWarning {
                    a: e.a.clone(),
                    b: e.b.clone(),
                    length: e.length,
                    euclidean,
                })
            })
            .collect()
    }

    // Index-based accessors for the search code.

    pub(crate) fn index_of(&self, id: &str) -> Option<usize> {
        // NodeId hashes like its inner String, so a temporary key is enough.
        self.index.get(&NodeId(id.to_string())).copied()
    }

    pub(crate) fn node_at(&self, ix: usize) -> &MapNode {
        &self.nodes[ix]
    }

    pub(crate) fn len(&self) -> usize {
        self.nodes.len()
    }

    pub(crate) fn adjacent(&self, ix: usize) -> &[(usize, f64)] {
        &self.adjacency[ix]
    }

    /// Position of `ix` in ascending-id order; comparing ranks compares ids.
    pub(crate) fn rank(&self, ix: usize) -> usize {
        self.rank[ix]
    }

    pub(crate) fn edge_length_ix(&self, a: usize, b: usize) -> Option<f64> {
        self.adjacency[a]
            .iter()
            .find(|&&(v, _)| v == b)
            .map(|&(_, len)| len)
    }

    pub(crate) fn heading_ix(&self, a: usize, b: usize) -> f64 {
        heading_between(&self.nodes[a].position, &self.nodes[b].position)
    }
}

/// Folds an angle in degrees into `(-180, 180]`.
pub fn normalize_degrees(deg: f64) -> f64 {
    let mut d = deg % 360.0;
    if d <= -180.0 {
        d += 360.0;
    } else if d > 180.0 {
        d -= 360.0;
    }
    d
}

fn heading_between(from: &Point, to: &Point) -> f64 {
    normalize_degrees((to.y - from.y).atan2(to.x - from.x).to_degrees())
}

/// Direction of travel from `from` to `to` in degrees, in `(-180, 180]`.
/// 0° is +x (east); angles grow counter-clockwise.
pub fn heading(from: &MapNode, to: &MapNode) -> Result<f64, MapError> {
    if from.position == to.position {
        return Err(MapError::CoincidentPositions(
            from.id.0.clone(),
            to.id.0.clone(),
        ));
    }
    Ok(heading_between(&from.position, &to.position))
}
