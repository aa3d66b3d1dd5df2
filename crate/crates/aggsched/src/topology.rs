//! Static unit-disk-graph network topologies.
//!
//! A topology is a sink (always node 0) plus sensor nodes placed in a
//! rectangular area. Two nodes are linked when their Euclidean distance is
//! at most the communication range (closed disk, `<=`). Everything here is
//! deterministic: the same seed and parameters always produce the same
//! topology, byte for byte.

use std::fs;
use std::path::Path;

use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Sink placement used by the topology generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SinkPosition {
    /// Sink at (width/2, height/2).
    Center,
    /// Sink at (0, 0).
    Corner,
}

impl std::fmt::Display for SinkPosition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SinkPosition::Center => write!(f, "center"),
            SinkPosition::Corner => write!(f, "corner"),
        }
    }
}

impl std::str::FromStr for SinkPosition {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "center" => Ok(SinkPosition::Center),
            "corner" => Ok(SinkPosition::Corner),
            other => Err(format!("unknown sink position `{other}` (expected center or corner)")),
        }
    }
}

/// Rectangular deployment area.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Area {
    pub width: f64,
    pub height: f64,
}

impl Area {
    pub fn new(width: f64, height: f64) -> Self {
        Area { width, height }
    }
}

/// One node: a stable id and a position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: usize,
    pub x: f64,
    pub y: f64,
}

/// A static network: node 0 is the sink, ids are contiguous.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    nodes: Vec<Node>,
    sink_id: usize,
    range: f64,
    area: Area,
}

#[derive(Debug, Error)]
pub enum TopologyError {
    #[error("communication range must be positive, got {0}")]
    InvalidRange(f64),
    #[error("topology must contain at least the sink node")]
    Empty,
    #[error("node {id} at ({x}, {y}) lies outside the {width} x {height} area")]
    OutOfBounds { id: usize, x: f64, y: f64, width: f64, height: f64 },
    #[error("node ids must be contiguous from 0; position {index} holds id {id}")]
    NonContiguousIds { index: usize, id: usize },
    #[error("sink_id must be 0, got {0}")]
    InvalidSinkId(usize),
    #[error("at least one sensor node is required")]
    NoSensors,
    #[error("no connected topology found after {attempts} attempts; density looks infeasible")]
    ConnectivityBudget { attempts: usize },
    #[error("edge endpoint {0} is out of range for {1} nodes")]
    EdgeOutOfRange(usize, usize),
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("unsupported topology file version {0}")]
    UnsupportedVersion(u32),
    #[error("failed to read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("failed to write {path}: {source}")]
    Write { path: String, source: std::io::Error },
    #[error("failed to parse {path}: {source}")]
    Parse { path: String, source: serde_json::Error },
}

impl Topology {
    /// Builds a topology from positions; ids are assigned in order and the
    /// first position becomes the sink.
    pub fn new(positions: Vec<(f64, f64)>, range: f64, area: Area) -> Result<Self, TopologyError> {
        let nodes = positions
            .into_iter()
            .enumerate()
            .map(|(id, (x, y))| Node { id, x, y })
            .collect();
        Topology::from_nodes(nodes, 0, range, area)
    }

    /// Builds a topology from explicit nodes, checking every invariant.
    pub fn from_nodes(
        nodes: Vec<Node>,
        sink_id: usize,
        range: f64,
        area: Area,
    ) -> Result<Self, TopologyError> {
        if sink_id != 0 {
            return Err(TopologyError::InvalidSinkId(sink_id));
        }
        if nodes.is_empty() {
            return Err(TopologyError::Empty);
        }
        if !(range > 0.0) {
            return Err(TopologyError::InvalidRange(range));
        }
        for (index, node) in nodes.iter().enumerate() {
            if node.id != index {
                return Err(TopologyError::NonContiguousIds { index, id: node.id });
            }
            let inside = node.x >= 0.0
                && node.x <= area.width
                && node.y >= 0.0
                && node.y <= area.height;
            if !inside {
                return Err(TopologyError::OutOfBounds {
                    id: node.id,
                    x: node.x,
                    y: node.y,
                    width: area.width,
                    height: area.height,
                });
            }
        }
        Ok(Topology { nodes, sink_id, range, area })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// Total node count, sink included.
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn sink_id(&self) -> usize {
        self.sink_id
    }

    pub fn range(&self) -> f64 {
        self.range
    }

    pub fn area(&self) -> Area {
        self.area
    }

    pub fn position(&self, id: usize) -> (f64, f64) {
        let node = &self.nodes[id];
        (node.x, node.y)
    }
}

/// Symmetric neighbor sets, one per node, each sorted by id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Adjacency {
    neighbors: Vec<Vec<usize>>,
}

impl Adjacency {
    /// Builds an adjacency from an explicit edge list. Used for graphs that
    /// are defined by structure rather than geometry (tests, examples).
    pub fn from_edges(node_count: usize, edges: &[(usize, usize)]) -> Result<Self, TopologyError> {
        let mut neighbors = vec![Vec::new(); node_count];
        for &(u, v) in edges {
            if u >= node_count {
                return Err(TopologyError::EdgeOutOfRange(u, node_count));
            }
            if v >= node_count {
                return Err(TopologyError::EdgeOutOfRange(v, node_count));
            }
            if u == v {
                return Err(TopologyError::SelfLoop(u));
            }
            neighbors[u].push(v);
            neighbors[v].push(u);
        }
        for list in &mut neighbors {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Adjacency { neighbors })
    }

    pub fn node_count(&self) -> usize {
        self.neighbors.len()
    }

    /// Neighbors of `u` in ascending id order.
    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.neighbors[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.neighbors[u].len()
    }

    pub fn are_neighbors(&self, u: usize, v: usize) -> bool {
        self.neighbors[u].binary_search(&v).is_ok()
    }

    /// Total undirected edge count.
    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }
}

/// Derives the unit-disk adjacency: an edge exists iff the Euclidean
/// distance is at most the range (closed disk, no epsilon).
pub fn build_adjacency(topology: &Topology) -> Adjacency {
    let n = topology.node_count();
    let mut neighbors = vec![Vec::new(); n];
    let nodes = topology.nodes();
    for u in 0..n {
        for v in (u + 1)..n {
            let dx = nodes[u].x - nodes[v].x;
            let dy = nodes[u].y - nodes[v].y;
            if (dx * dx + dy * dy).sqrt() <= topology.range() {
                neighbors[u].push(v);
                neighbors[v].push(u);
            }
        }
    }
    Adjacency { neighbors }
}

/// True iff a breadth-first traversal from the sink (node 0) reaches every node.
pub fn is_connected(adjacency: &Adjacency) -> bool {
    let n = adjacency.node_count();
    if n == 0 {
        return false;
    }
    hop_distances(adjacency, 0).iter().all(Option::is_some)
}

/// Hop distance from `source` to every node; `None` for unreachable nodes.
pub fn hop_distances(adjacency: &Adjacency, source: usize) -> Vec<Option<usize>> {
    let n = adjacency.node_count();
    let mut dist = vec![None; n];
    dist[source] = Some(0);
    let mut queue = std::collections::VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        let next = dist[u].unwrap() + 1;
        for &v in adjacency.neighbors(u) {
            if dist[v].is_none() {
                dist[v] = Some(next);
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Maximum hop distance from the sink over reachable nodes. For connected
/// graphs this is the sink eccentricity, a lower bound on any schedule length.
pub fn sink_eccentricity(adjacency: &Adjacency) -> usize {
    hop_distances(adjacency, 0)
        .into_iter()
        .flatten()
        .max()
        .unwrap_or(0)
}

/// Regeneration attempts before the generator gives up on connectivity.
pub const GENERATION_ATTEMPTS: usize = 1000;

/// Generates a random connected topology.
///
/// The sink is pinned (center or corner of the area) and `n_sensors`
/// positions are drawn uniformly, x before y, in ascending id order, from a
/// ChaCha12 stream seeded with `seed`. Disconnected draws are rejected and
/// redrawn from the same stream, up to [`GENERATION_ATTEMPTS`] times.
pub fn generate_topology(
    n_sensors: usize,
    area: Area,
    range: f64,
    sink: SinkPosition,
    seed: u64,
) -> Result<Topology, TopologyError> {
    if n_sensors == 0 {
        return Err(TopologyError::NoSensors);
    }
    if !(range > 0.0) {
        return Err(TopologyError::InvalidRange(range));
    }
    let sink_pos = match sink {
        SinkPosition::Center => (area.width / 2.0, area.height / 2.0),
        SinkPosition::Corner => (0.0, 0.0),
    };
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let x_dist = Uniform::new_inclusive(0.0, area.width);
    let y_dist = Uniform::new_inclusive(0.0, area.height);
    for _ in 0..GENERATION_ATTEMPTS {
        let mut positions = Vec::with_capacity(n_sensors + 1);
        positions.push(sink_pos);
        for _ in 0..n_sensors {
            let x = x_dist.sample(&mut rng);
            let y = y_dist.sample(&mut rng);
            positions.push((x, y));
        }
        let topology = Topology::new(positions, range, area)?;
        if is_connected(&build_adjacency(&topology)) {
            return Ok(topology);
        }
    }
    Err(TopologyError::ConnectivityBudget { attempts: GENERATION_ATTEMPTS })
}

#[derive(Serialize, Deserialize)]
struct TopologyFile {
    version: u32,
    area: Area,
    #[serde(rename = "range_R")]
    range: f64,
    sink_id: usize,
    nodes: Vec<Node>,
}

const TOPOLOGY_FILE_VERSION: u32 = 1;

/// Writes a topology as JSON; coordinates keep full precision.
pub fn save_topology(topology: &Topology, path: impl AsRef<Path>) -> Result<(), TopologyError> {
    let path = path.as_ref();
    let file = TopologyFile {
        version: TOPOLOGY_FILE_VERSION,
        area: topology.area(),
        range: topology.range(),
        sink_id: topology.sink_id(),
        nodes: topology.nodes().to_vec(),
    };
    let text = serde_json::to_string_pretty(&file).expect("topology serialization cannot fail");
    fs::write(path, text).map_err(|source| TopologyError::Write {
        path: path.display().to_string(),
        source,
    })
}

/// Reads a topology back, re-checking every invariant.
pub fn load_topology(path: impl AsRef<Path>) -> Result<Topology, TopologyError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| TopologyError::Read {
        path: path.display().to_string(),
        source,
    })?;
    let file: TopologyFile =
        serde_json::from_str(&text).map_err(|source| TopologyError::Parse {
            path: path.display().to_string(),
            source,
        })?;
    if file.version != TOPOLOGY_FILE_VERSION {
        return Err(TopologyError::UnsupportedVersion(file.version));
    }
    Topology::from_nodes(file.nodes, file.sink_id, file.range, file.area)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_area() -> Area {
        Area::new(100.0, 100.0)
    }

    #[test]
    fn closed_disk_edges() {
        let topo =
            Topology::new(vec![(0.0, 0.0), (10.0, 0.0), (30.0, 0.0)], 20.0, unit_area()).unwrap();
        let adj = build_adjacency(&topo);
        assert!(adj.are_neighbors(0, 1));
        assert!(adj.are_neighbors(1, 2));
        assert!(!adj.are_neighbors(0, 2));
        assert_eq!(adj.edge_count(), 2);
    }

    #[test]
    fn boundary_distance_is_an_edge() {
        let topo = Topology::new(vec![(0.0, 0.0), (20.0, 0.0)], 20.0, unit_area()).unwrap();
        let adj = build_adjacency(&topo);
        assert!(adj.are_neighbors(0, 1));
    }

    #[test]
    fn single_node_has_empty_adjacency() {
        let topo = Topology::new(vec![(5.0, 5.0)], 20.0, unit_area()).unwrap();
        let adj = build_adjacency(&topo);
        assert_eq!(adj.node_count(), 1);
        assert_eq!(adj.degree(0), 0);
        assert!(is_connected(&adj));
    }

    #[test]
    fn connectivity_on_path_and_isolated_pair() {
        let path = Adjacency::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(is_connected(&path));
        let isolated = Adjacency::from_edges(2, &[]).unwrap();
        assert!(!is_connected(&isolated));
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate_topology(50, unit_area(), 20.0, SinkPosition::Center, 7).unwrap();
        let b = generate_topology(50, unit_area(), 20.0, SinkPosition::Center, 7).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn generated_topologies_are_connected() {
        for seed in [0, 1, 2, 3, 4] {
            let topo =
                generate_topology(50, unit_area(), 20.0, SinkPosition::Center, seed).unwrap();
            assert!(is_connected(&build_adjacency(&topo)), "seed {seed}");
        }
    }

    #[test]
    fn sink_placement() {
        let center = generate_topology(5, unit_area(), 60.0, SinkPosition::Center, 3).unwrap();
        assert_eq!(center.position(0), (50.0, 50.0));
        let corner = generate_topology(5, unit_area(), 60.0, SinkPosition::Corner, 3).unwrap();
        assert_eq!(corner.position(0), (0.0, 0.0));
    }

    #[test]
    fn infeasible_density_exhausts_attempt_budget() {
        let err = generate_topology(2, unit_area(), 0.001, SinkPosition::Corner, 1).unwrap_err();
        match err {
            TopologyError::ConnectivityBudget { attempts } => {
                assert_eq!(attempts, GENERATION_ATTEMPTS)
            }
            other => panic!("expected budget error, got {other}"),
        }
    }

    #[test]
    fn save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("topo.json");
        let topo = Topology::new(
            vec![(0.0, 0.0), (13.0000001, 7.25), (20.0, 0.123456789012345)],
            20.0,
            unit_area(),
        )
        .unwrap();
        save_topology(&topo, &path).unwrap();
        let loaded = load_topology(&path).unwrap();
        assert_eq!(topo, loaded);
    }

    #[test]
    fn missing_range_field_is_a_parse_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        std::fs::write(
            &path,
            r#"{"version":1,"area":{"width":100.0,"height":100.0},"sink_id":0,"nodes":[]}"#,
        )
        .unwrap();
        let err = load_topology(&path).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("range_R"), "error should name the field: {msg}");
    }

    #[test]
    fn negative_coordinate_is_a_validation_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("neg.json");
        std::fs::write(
            &path,
            r#"{"version":1,"area":{"width":100.0,"height":100.0},"range_R":20.0,"sink_id":0,
                "nodes":[{"id":0,"x":0.0,"y":0.0},{"id":1,"x":-3.0,"y":4.0}]}"#,
        )
        .unwrap();
        let err = load_topology(&path).unwrap_err();
        assert!(matches!(err, TopologyError::OutOfBounds { id: 1, .. }), "{err}");
    }

    #[test]
    fn hop_distances_and_eccentricity() {
        let adj = Adjacency::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(hop_distances(&adj, 0), vec![Some(0), Some(1), Some(2), Some(3)]);
        assert_eq!(sink_eccentricity(&adj), 3);
    }
}
