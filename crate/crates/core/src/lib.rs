//! Indoor navigation over pre-mapped buildings whose floors are marked with
//! QR strips.
//!
//! A building floor is a [`MapGraph`]: strips are nodes with planar
//! coordinates, corridor segments between consecutive strips are undirected
//! edges. On top of that graph the crate provides
//!
//! * [`qr`]: the checksummed text payload printed into each strip,
//! * [`pathfinder`]: distance-minimal ("shortest") and turn-minimal
//!   ("optimal") route planning, an exhaustive simple-path oracle and the
//!   classical baseline searches,
//! * [`trip`]: the scan-driven trip session with deviation detection and
//!   recovery back to the last correctly visited strip,
//! * [`service`]: an HTTP/JSON session service wrapping the trip engine.

pub mod bench;
pub mod map;
pub mod pathfinder;
pub mod qr;
pub mod service;
pub mod trace;
pub mod trip;

pub use map::{load_map, MapEdge, MapError, MapGraph, MapNode, NodeId, NodeKind, Point};
pub use pathfinder::{
    baseline_search, enumerate_simple_paths, path_turn_cost, plan_route, PathError, Route,
    RouteMode, SearchStats, Strategy,
};
pub use qr::{decode, encode, DecodeError, EncodeError};
pub use trip::{DestinationChoice, EventKind, InstructionEvent, TripError, TripSession, TripState};
