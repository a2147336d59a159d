//! Scan-driven trip session.
//!
//! A [`TripSession`] consumes decoded strip scans and destination choices
//! one at a time and answers each with [`InstructionEvent`]s. While
//! navigating it compares every scan with the next node the planned route
//! expects; an unexpected in-map node starts a recovery route back to the
//! last node that was correctly visited, after which the original route
//! resumes.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::map::{MapGraph, NodeId};
use crate::pathfinder::{classify_turn, plan_route, PathError, Route, RouteMode, TurnDirection};
use crate::qr::{self, DecodeError};

pub const FIRST_SCAN_PROMPT: &str = "Scan the nearest floor code to begin.";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    /// Initial "scan a code" prompt of a fresh session.
    ScanPrompt,
    AnnounceLocation,
    ChooseDestination,
    Proceed,
    TurnLeft,
    TurnRight,
    Deviated,
    RecoveryProceed,
    Arrived,
    ArrivalChoice,
    /// A scan that could not be used; the session state is unchanged.
    ScanError,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstructionEvent {
    pub kind: EventKind,
    pub text: String,
    pub vibrate: bool,
}

impl InstructionEvent {
    fn new(kind: EventKind, text: impl Into<String>) -> Self {
        InstructionEvent {
            kind,
            text: text.into(),
            vibrate: matches!(kind, EventKind::Deviated | EventKind::ScanError),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DestinationChoice {
    pub destination: NodeId,
    pub mode: RouteMode,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TripState {
    AwaitingFirstScan,
    AtNode {
        current: NodeId,
    },
    /// `route.nodes[next_index]` is the strip expected next;
    /// `route.nodes[next_index - 1] == last_correct`.
    Navigating {
        route: Route,
        next_index: usize,
        last_correct: NodeId,
    },
    /// Walking `recovery` back to `original.nodes[resume_index - 1]`.
    Deviated {
        recovery: Route,
        recovery_index: usize,
        original: Route,
        resume_index: usize,
    },
    Arrived {
        destination: NodeId,
        origin: NodeId,
    },
}

impl TripState {
    /// snake_case name used in snapshots.
    pub fn name(&self) -> &'static str {
        match self {
            TripState::AwaitingFirstScan => "awaiting_first_scan",
            TripState::AtNode { .. } => "at_node",
            TripState::Navigating { .. } => "navigating",
            TripState::Deviated { .. } => "deviated",
            TripState::Arrived { .. } => "arrived",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TripError {
    #[error("a destination can only be chosen while standing at a scanned location")]
    NotAtNode,
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("`{0}` is not a destination")]
    NotDestination(String),
    #[error(transparent)]
    Route(#[from] PathError),
}

/// Why a scan was not applied.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScanRejection {
    #[error("unreadable code: {0}")]
    Unreadable(#[from] DecodeError),
    #[error("code belongs to map `{0}`")]
    ForeignMap(String),
    #[error("unknown location `{0}`")]
    UnknownLocation(String),
    #[error(transparent)]
    Route(#[from] PathError),
}

impl ScanRejection {
    pub fn kind(&self) -> &'static str {
        match self {
            ScanRejection::Unreadable(e) => e.kind(),
            ScanRejection::ForeignMap(_) => "foreign_map",
            ScanRejection::UnknownLocation(_) => "unknown_location",
            ScanRejection::Route(_) => "route_unavailable",
        }
    }

    /// The event reported to the walker for this rejection.
    pub fn event(&self) -> InstructionEvent {
        let text = match self {
            ScanRejection::Unreadable(_) => "Unreadable code, rescan.",
            ScanRejection::ForeignMap(_) | ScanRejection::UnknownLocation(_) => {
                "Unknown location. This code is not part of this building."
            }
            ScanRejection::Route(_) => "No route is available from here.",
        };
        InstructionEvent::new(EventKind::ScanError, text)
    }
}

/// One walker's trip over a shared, immutable map.
#[derive(Debug, Clone)]
pub struct TripSession {
    map: Arc<MapGraph>,
    state: TripState,
    /// Where the current trip started; the return-trip target.
    origin: Option<NodeId>,
    last_prompt: InstructionEvent,
}

impl TripSession {
    pub fn new(map: Arc<MapGraph>) -> Self {
        TripSession {
            map,
            state: TripState::AwaitingFirstScan,
            origin: None,
            last_prompt: InstructionEvent::new(EventKind::ScanPrompt, FIRST_SCAN_PROMPT),
        }
    }

    pub fn map(&self) -> &Arc<MapGraph> {
        &self.map
    }

    pub fn state(&self) -> &TripState {
        &self.state
    }

    pub fn origin(&self) -> Option<&NodeId> {
        self.origin.as_ref()
    }

    /// The node the walker last scanned successfully.
    pub fn current_node(&self) -> Option<&NodeId> {
        match &self.state {
            TripState::AwaitingFirstScan => None,
            TripState::AtNode { current } => Some(current),
            TripState::Navigating { last_correct, .. } => Some(last_correct),
            TripState::Deviated {
                recovery,
                recovery_index,
                ..
            } => Some(&recovery.nodes[recovery_index - 1]),
            TripState::Arrived { destination, .. } => Some(destination),
        }
    }

    /// The strip the engine expects to be scanned next, if any.
    pub fn expected_next(&self) -> Option<&NodeId> {
        match &self.state {
            TripState::Navigating {
                route, next_index, ..
            } => Some(&route.nodes[*next_index]),
            TripState::Deviated {
                recovery,
                recovery_index,
                ..
            } => Some(&recovery.nodes[*recovery_index]),
            _ => None,
        }
    }

    /// Repeats the most recent instruction without changing state.
    pub fn current_prompt(&self) -> InstructionEvent {
        self.last_prompt.clone()
    }

    /// Applies a raw scan. Unusable scans yield a single
    /// [`EventKind::ScanError`] event and leave the state untouched.
    pub fn on_scan(&mut self, payload: &str) -> Vec<InstructionEvent> {
        self.scan(payload).unwrap_or_else(|r| vec![r.event()])
    }

    /// Like [`on_scan`](Self::on_scan) but reports why a scan was rejected.
    pub fn scan(&mut self, payload: &str) -> Result<Vec<InstructionEvent>, ScanRejection> {
        let (map_id, node) = qr::decode(payload)?;
        if map_id != self.map.map_id() {
            return Err(ScanRejection::ForeignMap(map_id));
        }
        if !self.map.contains(node.as_str()) {
            return Err(ScanRejection::UnknownLocation(node.to_string()));
        }
        let before = self.state.clone();
        match self.arrive_at(node) {
            Ok(events) => {
                self.remember(&events);
                Ok(events)
            }
            Err(e) => {
                self.state = before;
                Err(e)
            }
        }
    }

    pub fn select_destination(
        &mut self,
        choice: &DestinationChoice,
    ) -> Result<Vec<InstructionEvent>, TripError> {
        let current = match &self.state {
            TripState::AtNode { current } => current.clone(),
            TripState::Arrived { destination, .. } => destination.clone(),
            _ => return Err(TripError::NotAtNode),
        };
        let dest = choice.destination.as_str();
        let node = self
            .map
            .node(dest)
            .ok_or_else(|| TripError::UnknownNode(dest.to_string()))?;
        if !node.is_destination() {
            return Err(TripError::NotDestination(dest.to_string()));
        }
        let route = plan_route(&self.map, current.as_str(), dest, choice.mode)?;
        self.origin = Some(current.clone());
        let events = if route.len() == 1 {
            self.arrive(current)
        } else {
            let first = InstructionEvent::new(
                EventKind::Proceed,
                format!(
                    "Route to {} by the {} path: {:.0} meters, {} {}. Walk to {}, {:.0} meters.",
                    node.label,
                    choice.mode,
                    route.distance,
                    route.turns,
                    if route.turns == 1 { "turn" } else { "turns" },
                    self.label(&route.nodes[1]),
                    self.edge_meters(&route, 0),
                ),
            );
            self.state = TripState::Navigating {
                route,
                next_index: 1,
                last_correct: current,
            };
            vec![first]
        };
        self.remember(&events);
        Ok(events)
    }

    fn remember(&mut self, events: &[InstructionEvent]) {
        if let Some(last) = events.last() {
            self.last_prompt = last.clone();
        }
    }

    fn label<'a>(&'a self, id: &'a NodeId) -> &'a str {
        self.map
            .node(id.as_str())
            .map(|n| n.label.as_str())
            .unwrap_or(id.as_str())
    }

    fn edge_meters(&self, route: &Route, at: usize) -> f64 {
        self.map
            .edge_length(route.nodes[at].as_str(), route.nodes[at + 1].as_str())
            .unwrap_or(0.0)
    }

    fn announce(&mut self, node: NodeId) -> Vec<InstructionEvent> {
        let n = self
            .map
            .node(node.as_str())
            .expect("scanned node is in map");
        let mut text = format!("You are at {}.", n.label);
        if let Some(a) = &n.announcement {
            text.push(' ');
            text.push_str(a);
        }
        self.state = TripState::AtNode { current: node };
        vec![
            InstructionEvent::new(EventKind::AnnounceLocation, text),
            InstructionEvent::new(
                EventKind::ChooseDestination,
                "Choose a destination. Swipe up or down to browse, double tap to confirm.",
            ),
        ]
    }

    fn arrive(&mut self, destination: NodeId) -> Vec<InstructionEvent> {
        let origin = self.origin.clone().unwrap_or_else(|| destination.clone());
        let events = vec![
            InstructionEvent::new(
                EventKind::Arrived,
                format!(
                    "Destination Reached. You are at {}.",
                    self.label(&destination)
                ),
            ),
            InstructionEvent::new(
                EventKind::ArrivalChoice,
                format!(
                    "Go back to {} where this trip started, or start a new trip from here.",
                    self.label(&origin)
                ),
            ),
        ];
        self.state = TripState::Arrived {
            destination,
            origin,
        };
        events
    }

    /// Instruction for leaving `route.nodes[at]` towards the next node.
    fn leg_instruction(&self, route: &Route, at: usize, prefix: &str) -> InstructionEvent {
        let next = self.label(&route.nodes[at + 1]);
        let meters = self.edge_meters(route, at);
        let (kind, verb) = match route
            .heading_delta(at)
            .map(|_| classify_turn(route.legs[at - 1], route.legs[at]))
        {
            Some(TurnDirection::Left) => (EventKind::TurnLeft, "Turn left and walk"),
            Some(TurnDirection::Right) => (EventKind::TurnRight, "Turn right and walk"),
            _ => (EventKind::Proceed, "Walk straight"),
        };
        InstructionEvent::new(
            kind,
            format!("{prefix}{verb} to {next}, {meters:.0} meters."),
        )
    }

    fn recovery_instruction(&self, recovery: &Route, at: usize, prefix: &str) -> InstructionEvent {
        let target = self.label(recovery.destination());
        let next = self.label(&recovery.nodes[at + 1]);
        let how = match recovery
            .heading_delta(at)
            .map(|_| classify_turn(recovery.legs[at - 1], recovery.legs[at]))
        {
            Some(TurnDirection::Left) => "turn left and walk",
            Some(TurnDirection::Right) => "turn right and walk",
            _ => "walk",
        };
        InstructionEvent::new(
            EventKind::RecoveryProceed,
            format!("{prefix}Going back to {target}: {how} to {next}."),
        )
    }

    fn deviate(
        &mut self,
        at: NodeId,
        original: Route,
        resume_index: usize,
    ) -> Result<Vec<InstructionEvent>, ScanRejection> {
        let target = original.nodes[resume_index - 1].clone();
        let recovery = plan_route(&self.map, at.as_str(), target.as_str(), RouteMode::Shortest)?;
        let events = vec![
            InstructionEvent::new(
                EventKind::Deviated,
                format!(
                    "You have left the route at {}. Return to {}.",
                    self.label(&at),
                    self.label(&target)
                ),
            ),
            self.recovery_instruction(&recovery, 0, ""),
        ];
        self.state = TripState::Deviated {
            recovery,
            recovery_index: 1,
            original,
            resume_index,
        };
        Ok(events)
    }

    fn arrive_at(&mut self, node: NodeId) -> Result<Vec<InstructionEvent>, ScanRejection> {
        if self.current_node() == Some(&node) {
            return Ok(vec![self.last_prompt.clone()]);
        }
        let state = std::mem::replace(&mut self.state, TripState::AwaitingFirstScan);
        match state {
            TripState::AwaitingFirstScan | TripState::AtNode { .. } | TripState::Arrived { .. } => {
                Ok(self.announce(node))
            }
            TripState::Navigating {
                route,
                next_index,
                last_correct,
            } => {
                debug_assert_ne!(node, last_correct);
                match route.nodes[next_index..].iter().position(|n| *n == node) {
                    Some(offset) => Ok(self.advance(route, next_index + offset, offset)),
                    None => self.deviate(node, route, next_index),
                }
            }
            TripState::Deviated {
                recovery,
                recovery_index,
                original,
                resume_index,
            } => {
                let Some(offset) = recovery.nodes[recovery_index..]
                    .iter()
                    .position(|n| *n == node)
                else {
                    return self.deviate(node, original, resume_index);
                };
                let at = recovery_index + offset;
                let prefix = skipped_notice(offset);
                if at + 1 == recovery.len() {
                    let last_correct = original.nodes[resume_index - 1].clone();
                    let back = format!("{prefix}Back on route at {}. ", self.label(&last_correct));
                    let event = InstructionEvent::new(
                        EventKind::Proceed,
                        format!(
                            "{back}Continue to {}.",
                            self.label(&original.nodes[resume_index])
                        ),
                    );
                    self.state = TripState::Navigating {
                        route: original,
                        next_index: resume_index,
                        last_correct,
                    };
                    Ok(vec![event])
                } else {
                    let event = self.recovery_instruction(&recovery, at, &prefix);
                    self.state = TripState::Deviated {
                        recovery,
                        recovery_index: at + 1,
                        original,
                        resume_index,
                    };
                    Ok(vec![event])
                }
            }
        }
    }

    /// Moves to `route.nodes[at]`, having skipped `skipped` strips.
    fn advance(&mut self, route: Route, at: usize, skipped: usize) -> Vec<InstructionEvent> {
        let node = route.nodes[at].clone();
        if at + 1 == route.len() {
            return self.arrive(node);
        }
        let event = self.leg_instruction(&route, at, &skipped_notice(skipped));
        self.state = TripState::Navigating {
            route,
            next_index: at + 1,
            last_correct: node,
        };
        vec![event]
    }
}

fn skipped_notice(skipped: usize) -> String {
    match skipped {
        0 => String::new(),
        1 => "One floor code was skipped. ".to_string(),
        n => format!("{n} floor codes were skipped. "),
    }
}
