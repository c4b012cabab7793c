use std::collections::HashSet;

use log::warn;

use super::LatencyFunction;
use crate::error::{Error, Result};
use crate::EPS_FEAS;

/// Upper bound on the number of enumerated simple paths per problem.
pub const MAX_PATHS: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub id: String,
    pub tail: usize,
    pub head: usize,
    pub latency: LatencyFunction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Commodity {
    pub origin: usize,
    pub destination: usize,
    pub demand: f64,
}

/// A simple origin–destination path, as a sequence of edge indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    pub commodity: usize,
    pub edges: Vec<usize>,
}

/// Graph, latencies and commodities, with every simple path of every
/// commodity enumerated up front.
///
/// Demands of the kept commodities must sum to one. Commodities with zero demand are
/// dropped at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct RoutingProblem {
    nodes: Vec<String>,
    edges: Vec<Edge>,
    commodities: Vec<Commodity>,
    paths: Vec<Path>,
    commodity_paths: Vec<Vec<usize>>,
}

impl RoutingProblem {
    pub fn new(nodes: Vec<String>, edges: Vec<Edge>, commodities: Vec<Commodity>) -> Result<Self> {
        let mut seen = HashSet::new();
        for (i, n) in nodes.iter().enumerate() {
            if !seen.insert(n.as_str()) {
                return Err(Error::invalid(format!("nodes[{i}]"), format!("duplicate node `{n}`")));
            }
        }
        let mut seen = HashSet::new();
        for (i, e) in edges.iter().enumerate() {
            if !seen.insert(e.id.as_str()) {
                return Err(Error::invalid(
                    format!("edges[{i}].id"),
                    format!("duplicate edge id `{}`", e.id),
                ));
            }
            if e.tail >= nodes.len() || e.head >= nodes.len() {
                return Err(Error::invalid(format!("edges[{i}]"), "dangling node reference"));
            }
            if e.tail == e.head {
                return Err(Error::invalid(format!("edges[{i}]"), "self-loop"));
            }
        }

        let mut kept = Vec::with_capacity(commodities.len());
        let mut total = 0.0;
        for (i, c) in commodities.into_iter().enumerate() {
            let loc = format!("commodities[{i}]");
            if c.origin >= nodes.len() || c.destination >= nodes.len() {
                return Err(Error::invalid(loc, "dangling node reference"));
            }
            if c.origin == c.destination {
                return Err(Error::invalid(loc, "origin equals destination"));
            }
            if !c.demand.is_finite() || c.demand < 0.0 {
                return Err(Error::invalid(loc + ".demand", "demand must be a finite non-negative number"));
            }
            if c.demand == 0.0 {
                warn!("dropping zero-demand commodity {i}");
                continue;
            }
            total += c.demand;
            kept.push(c);
        }
        if !kept.is_empty() && (total - 1.0).abs() > EPS_FEAS {
            return Err(Error::invalid(
                "commodities",
                format!("demands sum to {total}, expected 1"),
            ));
        }

        let mut out = Self {
            nodes,
            edges,
            commodities: kept,
            paths: Vec::new(),
            commodity_paths: Vec::new(),
        };
        out.enumerate_paths()?;
        Ok(out)
    }

    /// Two nodes `o`, `d` joined by one edge per latency.
    pub fn parallel(latencies: Vec<LatencyFunction>) -> Result<Self> {
        let edges = latencies
            .into_iter()
            .enumerate()
            .map(|(i, latency)| Edge {
                id: format!("e{}", i + 1),
                tail: 0,
                head: 1,
                latency,
            })
            .collect();
        Self::new(
            vec!["o".into(), "d".into()],
            edges,
            vec![Commodity {
                origin: 0,
                destination: 1,
                demand: 1.0,
            }],
        )
    }

    fn enumerate_paths(&mut self) -> Result<()> {
        let mut out_edges = vec![Vec::new(); self.nodes.len()];
        for (i, e) in self.edges.iter().enumerate() {
            out_edges[e.tail].push(i);
        }
        let mut paths = Vec::new();
        let mut commodity_paths = Vec::with_capacity(self.commodities.len());
        for (ci, c) in self.commodities.iter().enumerate() {
            let mut found = Vec::new();
            let mut visited = vec![false; self.nodes.len()];
            let mut stack = Vec::new();
            visited[c.origin] = true;
            dfs(
                &self.edges,
                &out_edges,
                c.origin,
                c.destination,
                &mut visited,
                &mut stack,
                &mut found,
                MAX_PATHS.saturating_sub(paths.len()),
            )?;
            if found.is_empty() {
                return Err(Error::invalid(
                    format!("commodities[{ci}]"),
                    format!(
                        "no path from `{}` to `{}`",
                        self.nodes[c.origin], self.nodes[c.destination]
                    ),
                ));
            }
            let start = paths.len();
            paths.extend(found.into_iter().map(|edges| Path { commodity: ci, edges }));
            commodity_paths.push((start..paths.len()).collect());
        }
        self.paths = paths;
        self.commodity_paths = commodity_paths;
        Ok(())
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn commodities(&self) -> &[Commodity] {
        &self.commodities
    }

    pub fn paths(&self) -> &[Path] {
        &self.paths
    }

    /// Path indices belonging to commodity `i`.
    pub fn commodity_paths(&self, i: usize) -> &[usize] {
        &self.commodity_paths[i]
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n == name)
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    /// Single commodity whose paths are exactly the individual edges.
    pub fn is_parallel(&self) -> bool {
        if self.commodities.len() != 1 {
            return false;
        }
        let c = &self.commodities[0];
        self.paths.len() == self.edges.len()
            && self.edges.iter().all(|e| e.tail == c.origin && e.head == c.destination)
            && self.paths.iter().enumerate().all(|(i, p)| p.edges == [i])
    }

    pub fn total_demand(&self) -> f64 {
        self.commodities.iter().map(|c| c.demand).sum()
    }
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    edges: &[Edge],
    out_edges: &[Vec<usize>],
    at: usize,
    target: usize,
    visited: &mut [bool],
    stack: &mut Vec<usize>,
    found: &mut Vec<Vec<usize>>,
    budget: usize,
) -> Result<()> {
    for &ei in &out_edges[at] {
        let next = edges[ei].head;
        if visited[next] {
            continue;
        }
        stack.push(ei);
        if next == target {
            if found.len() >= budget {
                return Err(Error::invalid(
                    "edges",
                    format!("more than {MAX_PATHS} simple paths"),
                ));
            }
            found.push(stack.clone());
        } else {
            visited[next] = true;
            dfs(edges, out_edges, next, target, visited, stack, found, budget)?;
            visited[next] = false;
        }
        stack.pop();
    }
    Ok(())
}
