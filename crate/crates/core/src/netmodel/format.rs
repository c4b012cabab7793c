//! JSON instance files.
//!
//! ```json
//! {
//!   "nodes": ["o", "d"],
//!   "edges": [
//!     {"id": "e1", "tail": "o", "head": "d", "coeffs": [0, 1]},
//!     {"id": "e2", "tail": "o", "head": "d", "coeffs": [1]}
//!   ],
//!   "commodities": [{"origin": "o", "destination": "d", "demand": 1}],
//!   "sensitivity": {"bounds": [1, 1], "classes": [{"mass": 1, "s": 1}]},
//!   "incentives": [{"edge": "e1", "coeffs": [0, 1]}]
//! }
//! ```
//!
//! `sensitivity` defaults to the homogeneous population and `incentives` to
//! zero on every edge. Edges missing from `incentives` get zero.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{
    Commodity, Edge, GameInstance, LatencyFunction, Polynomial, RoutingProblem, SensitivityClass,
    SensitivityModel,
};
use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    nodes: Vec<String>,
    edges: Vec<EdgeRecord>,
    commodities: Vec<CommodityRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sensitivity: Option<SensitivityRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    incentives: Vec<IncentiveRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeRecord {
    id: String,
    tail: String,
    head: String,
    coeffs: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CommodityRecord {
    origin: String,
    destination: String,
    demand: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SensitivityRecord {
    bounds: [f64; 2],
    classes: Vec<ClassRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassRecord {
    mass: f64,
    s: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IncentiveRecord {
    edge: String,
    coeffs: Vec<f64>,
}

fn at(prefix: String) -> impl FnOnce(Error) -> Error {
    move |e| match e {
        Error::Invalid { location, message } => Error::Invalid {
            location: format!("{prefix}.{location}"),
            message,
        },
        other => other,
    }
}

/// Parses and validates an instance file.
pub fn parse_instance(text: &str) -> Result<GameInstance> {
    let raw: InstanceFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        location: format!("line {}, column {}", e.line(), e.column()),
        message: e.to_string(),
    })?;

    let node_index: HashMap<&str, usize> = raw
        .nodes
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();
    let lookup = |name: &str, location: String| {
        node_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::invalid(location, format!("dangling node `{name}`")))
    };

    let mut edges = Vec::with_capacity(raw.edges.len());
    for (i, e) in raw.edges.iter().enumerate() {
        let latency = LatencyFunction::new(e.coeffs.clone()).map_err(at(format!("edges[{i}]")))?;
        edges.push(Edge {
            id: e.id.clone(),
            tail: lookup(&e.tail, format!("edges[{i}].tail"))?,
            head: lookup(&e.head, format!("edges[{i}].head"))?,
            latency,
        });
    }
    let mut commodities = Vec::with_capacity(raw.commodities.len());
    for (i, c) in raw.commodities.iter().enumerate() {
        commodities.push(Commodity {
            origin: lookup(&c.origin, format!("commodities[{i}].origin"))?,
            destination: lookup(&c.destination, format!("commodities[{i}].destination"))?,
            demand: c.demand,
        });
    }
    let problem = RoutingProblem::new(raw.nodes.clone(), edges, commodities)?;

    let sensitivity = match &raw.sensitivity {
        None => SensitivityModel::homogeneous(),
        Some(s) => SensitivityModel::new(
            s.classes
                .iter()
                .map(|c| SensitivityClass { mass: c.mass, s: c.s })
                .collect(),
            (s.bounds[0], s.bounds[1]),
        )?,
    };

    let mut incentives = vec![Polynomial::zero(); problem.edges().len()];
    let mut assigned = vec![false; incentives.len()];
    for (i, r) in raw.incentives.iter().enumerate() {
        let e = problem.edge_index(&r.edge).ok_or_else(|| {
            Error::invalid(format!("incentives[{i}].edge"), format!("unknown edge `{}`", r.edge))
        })?;
        if assigned[e] {
            return Err(Error::invalid(
                format!("incentives[{i}].edge"),
                format!("duplicate incentive for edge `{}`", r.edge),
            ));
        }
        if r.coeffs.is_empty() || r.coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid(
                format!("incentives[{i}].coeffs"),
                "coefficients must be a non-empty list of finite numbers",
            ));
        }
        assigned[e] = true;
        incentives[e] = Polynomial::new(r.coeffs.clone());
    }
    GameInstance::new(problem, sensitivity, incentives)
}

/// Writes `instance` in the format read by [`parse_instance`]. Zero
/// incentives are omitted.
pub fn serialize_instance(instance: &GameInstance) -> String {
    let p = instance.problem();
    let nodes = p.nodes().to_vec();
    let edges = p
        .edges()
        .iter()
        .map(|e| EdgeRecord {
            id: e.id.clone(),
            tail: nodes[e.tail].clone(),
            head: nodes[e.head].clone(),
            coeffs: e.latency.coeffs().to_vec(),
        })
        .collect();
    let commodities = p
        .commodities()
        .iter()
        .map(|c| CommodityRecord {
            origin: nodes[c.origin].clone(),
            destination: nodes[c.destination].clone(),
            demand: c.demand,
        })
        .collect();
    let s = instance.sensitivity();
    let sensitivity = Some(SensitivityRecord {
        bounds: [s.bounds().0, s.bounds().1],
        classes: s
            .classes()
            .iter()
            .map(|c| ClassRecord { mass: c.mass, s: c.s })
            .collect(),
    });
    let incentives = p
        .edges()
        .iter()
        .zip(instance.incentives())
        .filter(|(_, t)| t.coeffs() != [0.0])
        .map(|(e, t)| IncentiveRecord {
            edge: e.id.clone(),
            coeffs: t.coeffs().to_vec(),
        })
        .collect();
    let file = InstanceFile {
        nodes,
        edges,
        commodities,
        sensitivity,
        incentives,
    };
    serde_json::to_string_pretty(&file).expect("instance serialization is infallible")
}
