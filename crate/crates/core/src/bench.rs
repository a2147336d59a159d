//! All-pairs consistency sweep behind `wayfind bench`.

use std::time::{Duration, Instant};

use crate::map::MapGraph;
use crate::pathfinder::{
    baseline_search, enumerate_simple_paths, plan_route_with_stats, PathError, RouteMode, Strategy,
    DEFAULT_ENUMERATION_CAP,
};

/// Relative tolerance used for distance comparisons.
pub const DISTANCE_RTOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct CheckRow {
    pub name: &'static str,
    pub checked: usize,
    pub failures: Vec<String>,
}

impl CheckRow {
    fn new(name: &'static str) -> Self {
        CheckRow {
            name,
            checked: 0,
            failures: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub pairs: usize,
    pub rows: Vec<CheckRow>,
    pub elapsed: Duration,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(CheckRow::passed)
    }
}

pub fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= DISTANCE_RTOL * a.abs().max(b.abs()).max(1.0)
}

/// Checks the planner against the enumeration oracle and the Dijkstra
/// baseline for every ordered pair of distinct destination nodes.
pub fn oracle_sweep(g: &MapGraph) -> Result<SweepReport, PathError> {
    let start = Instant::now();
    let dests: Vec<&str> = g.destinations().map(|n| n.id.as_str()).collect();
    let mut optimal = CheckRow::new("optimal turns = oracle minimum");
    let mut shortest = CheckRow::new("shortest distance = oracle minimum");
    let mut dijkstra = CheckRow::new("dijkstra distance = shortest distance");
    let mut expansions = CheckRow::new("A* expansions <= dijkstra expansions");
    let mut pairs = 0;
    for &a in &dests {
        for &b in &dests {
            if a == b {
                continue;
            }
            pairs += 1;
            let all = enumerate_simple_paths(g, a, b, DEFAULT_ENUMERATION_CAP)?;
            let min_turns = all.iter().map(|r| r.turns).min().unwrap_or(0);
            let min_dist = all.iter().map(|r| r.distance).fold(f64::INFINITY, f64::min);

            let (opt, _) = plan_route_with_stats(g, a, b, RouteMode::Optimal)?;
            optimal.checked += 1;
            if opt.turns != min_turns {
                optimal
                    .failures
                    .push(format!("{a}->{b}: {} turns, oracle {min_turns}", opt.turns));
            }

            let (short, astar_stats) = plan_route_with_stats(g, a, b, RouteMode::Shortest)?;
            shortest.checked += 1;
            if !close(short.distance, min_dist) {
                shortest.failures.push(format!(
                    "{a}->{b}: {} m, oracle {min_dist} m",
                    short.distance
                ));
            }

            let (dij, dij_stats) = baseline_search(g, a, b, Strategy::Dijkstra)?;
            dijkstra.checked += 1;
            if !close(dij.distance, short.distance) {
                dijkstra.failures.push(format!(
                    "{a}->{b}: dijkstra {} m, planner {} m",
                    dij.distance, short.distance
                ));
            }
            expansions.checked += 1;
            if astar_stats.nodes_expanded > dij_stats.nodes_expanded {
                expansions.failures.push(format!(
                    "{a}->{b}: A* {} > dijkstra {}",
                    astar_stats.nodes_expanded, dij_stats.nodes_expanded
                ));
            }
        }
    }
    Ok(SweepReport {
        pairs,
        rows: vec![optimal, shortest, dijkstra, expansions],
        elapsed: start.elapsed(),
    })
}
