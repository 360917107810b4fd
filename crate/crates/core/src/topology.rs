//! Grid layout and connectivity for the two system models.
//!
//! Both models place 100 nodes on a bounded 10x10 lattice with unit spacing.
//! The cellular automaton connects every pair within a Chebyshev distance of
//! the neighborhood radius; the network model samples each directed edge
//! independently with probability `exp(-(d / c_D)^2)` where `d` is Euclidean
//! distance.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::neuron::{Density, ModelParams};

pub const GRID_ROWS: usize = 10;
pub const GRID_COLS: usize = 10;
pub const OBSERVED_CHANNELS: usize = 60;

pub const CA_RADIUS_MIN: u32 = 1;
pub const CA_RADIUS_MAX: u32 = 6;
pub const NETWORK_DENSITY_MIN: f64 = 0.1;
pub const NETWORK_DENSITY_MAX: f64 = 4.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Ca,
    Network,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelKind::Ca => f.write_str("ca"),
            ModelKind::Network => f.write_str("network"),
        }
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ca" => Ok(ModelKind::Ca),
            "network" => Ok(ModelKind::Network),
            other => Err(Error::validation(format!(
                "unknown model kind '{other}', expected 'ca' or 'network'"
            ))),
        }
    }
}

/// Row-major node placement on a rectangular lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridLayout {
    pub rows: usize,
    pub cols: usize,
}

impl Default for GridLayout {
    fn default() -> Self {
        GridLayout {
            rows: GRID_ROWS,
            cols: GRID_COLS,
        }
    }
}

impl GridLayout {
    pub fn new(rows: usize, cols: usize) -> Self {
        GridLayout { rows, cols }
    }

    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn position(&self, node: usize) -> (usize, usize) {
        (node / self.cols, node % self.cols)
    }

    pub fn index(&self, row: usize, col: usize) -> usize {
        row * self.cols + col
    }

    pub fn chebyshev(&self, a: usize, b: usize) -> usize {
        let (ra, ca) = self.position(a);
        let (rb, cb) = self.position(b);
        ra.abs_diff(rb).max(ca.abs_diff(cb))
    }

    pub fn euclidean(&self, a: usize, b: usize) -> f64 {
        let (ra, ca) = self.position(a);
        let (rb, cb) = self.position(b);
        let dr = ra.abs_diff(rb) as f64;
        let dc = ca.abs_diff(cb) as f64;
        dr.hypot(dc)
    }
}

/// Directed, unweighted connectivity plus the sign of every node's output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Connectivity {
    pub kind: ModelKind,
    nodes: usize,
    /// `(pre, post)` pairs sorted by `pre` then `post`.
    edges: Vec<(usize, usize)>,
    inhibitory: Vec<bool>,
}

impl Connectivity {
    /// Assembles connectivity from raw parts, validating indices.
    pub fn from_parts(
        kind: ModelKind,
        nodes: usize,
        mut edges: Vec<(usize, usize)>,
        inhibitory: Vec<bool>,
    ) -> Result<Self> {
        if inhibitory.len() != nodes {
            return Err(Error::validation(format!(
                "expected {nodes} node signs, got {}",
                inhibitory.len()
            )));
        }
        for &(pre, post) in &edges {
            if pre >= nodes || post >= nodes {
                return Err(Error::validation(format!(
                    "edge {pre}->{post} references a node outside 0..{nodes}"
                )));
            }
            if pre == post {
                return Err(Error::validation(format!("self-edge on node {pre}")));
            }
        }
        edges.sort_unstable();
        let before = edges.len();
        edges.dedup();
        if edges.len() != before {
            return Err(Error::validation("duplicate edges"));
        }
        Ok(Connectivity {
            kind,
            nodes,
            edges,
            inhibitory,
        })
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, pre: usize, post: usize) -> bool {
        self.edges.binary_search(&(pre, post)).is_ok()
    }

    pub fn inhibitory(&self) -> &[bool] {
        &self.inhibitory
    }

    pub fn is_inhibitory(&self, node: usize) -> bool {
        self.inhibitory[node]
    }

    /// `+1` for excitatory, `-1` for inhibitory.
    pub fn sign(&self, node: usize) -> i8 {
        if self.inhibitory[node] {
            -1
        } else {
            1
        }
    }

    pub fn inhibitory_count(&self) -> usize {
        self.inhibitory.iter().filter(|&&b| b).count()
    }

    pub fn with_signs(mut self, inhibitory: Vec<bool>) -> Result<Self> {
        if inhibitory.len() != self.nodes {
            return Err(Error::validation(format!(
                "expected {} node signs, got {}",
                self.nodes,
                inhibitory.len()
            )));
        }
        self.inhibitory = inhibitory;
        Ok(self)
    }

    /// Postsynaptic targets of every node.
    pub fn outgoing(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.nodes];
        for &(pre, post) in &self.edges {
            out[pre].push(post);
        }
        out
    }

    pub fn out_degree(&self, node: usize) -> usize {
        let start = self.edges.partition_point(|&(pre, _)| pre < node);
        let end = self.edges.partition_point(|&(pre, _)| pre <= node);
        end - start
    }

    /// Builds edges for the decoded density, then draws the inhibitory subset.
    ///
    /// For the network kind the edge sampling consumes `rng` before the signs
    /// are drawn.
    pub fn instantiate<R: Rng + ?Sized>(
        layout: &GridLayout,
        params: &ModelParams,
        rng: &mut R,
    ) -> Result<Self> {
        let base = match params.density {
            Density::Radius(r) => build_ca(layout, r)?,
            Density::Length(c) => build_network(layout, c, rng)?,
        };
        let signs = assign_signs(layout, params.inhib_ratio, rng)?;
        base.with_signs(signs)
    }
}

/// Moore-neighborhood cellular automaton on a bounded grid.
pub fn build_ca(layout: &GridLayout, radius: u32) -> Result<Connectivity> {
    if !(CA_RADIUS_MIN..=CA_RADIUS_MAX).contains(&radius) {
        return Err(Error::validation(format!(
            "CA radius must lie in {CA_RADIUS_MIN}..={CA_RADIUS_MAX}, got {radius}"
        )));
    }
    let r = radius as usize;
    let mut edges = Vec::new();
    for pre in 0..layout.len() {
        let (row, col) = layout.position(pre);
        let rows = row.saturating_sub(r)..=(row + r).min(layout.rows - 1);
        for nr in rows {
            for nc in col.saturating_sub(r)..=(col + r).min(layout.cols - 1) {
                let post = layout.index(nr, nc);
                if post != pre {
                    edges.push((pre, post));
                }
            }
        }
    }
    Ok(Connectivity {
        kind: ModelKind::Ca,
        nodes: layout.len(),
        edges,
        inhibitory: vec![false; layout.len()],
    })
}

/// Probability of a directed edge between nodes `distance` apart.
pub fn connection_probability(distance: f64, density: f64) -> Result<f64> {
    if !(density > 0.0) || !density.is_finite() {
        return Err(Error::validation(format!(
            "density constant must be finite and > 0, got {density}"
        )));
    }
    if !(distance >= 0.0) {
        return Err(Error::validation(format!(
            "distance must be >= 0, got {distance}"
        )));
    }
    let x = distance / density;
    Ok((-(x * x)).exp())
}

/// Distance-dependent random network. Every ordered pair is sampled with
/// its own uniform draw, visited in `(pre, post)` row-major order.
pub fn build_network<R: Rng + ?Sized>(
    layout: &GridLayout,
    density: f64,
    rng: &mut R,
) -> Result<Connectivity> {
    // validates density once for the whole build
    connection_probability(0.0, density)?;
    let n = layout.len();
    let mut edges = Vec::new();
    for pre in 0..n {
        for post in 0..n {
            if pre == post {
                continue;
            }
            let x = layout.euclidean(pre, post) / density;
            let p = (-(x * x)).exp();
            let u: f64 = rng.random();
            if u < p {
                edges.push((pre, post));
            }
        }
    }
    Ok(Connectivity {
        kind: ModelKind::Network,
        nodes: n,
        edges,
        inhibitory: vec![false; n],
    })
}

/// Marks exactly `round(inhib_ratio * nodes)` nodes inhibitory, chosen
/// uniformly without replacement.
pub fn assign_signs<R: Rng + ?Sized>(
    layout: &GridLayout,
    inhib_ratio: f64,
    rng: &mut R,
) -> Result<Vec<bool>> {
    if !(0.0..=1.0).contains(&inhib_ratio) {
        return Err(Error::validation(format!(
            "inhibitory ratio must lie in [0, 1], got {inhib_ratio}"
        )));
    }
    let n = layout.len();
    let count = ((inhib_ratio * n as f64).round() as usize).min(n);
    let mut inhibitory = vec![false; n];
    for node in index::sample(rng, n, count) {
        inhibitory[node] = true;
    }
    Ok(inhibitory)
}

/// The 60 recorded nodes: the central 8x8 block without its four corners,
/// in row-major order.
pub fn observed_nodes(layout: &GridLayout) -> Result<Vec<usize>> {
    if layout.rows != GRID_ROWS || layout.cols != GRID_COLS {
        return Err(Error::validation(format!(
            "observed-node mapping requires a {GRID_ROWS}x{GRID_COLS} grid, got {}x{}",
            layout.rows, layout.cols
        )));
    }
    let corner = |r: usize, c: usize| (r == 1 || r == 8) && (c == 1 || c == 8);
    let nodes = (1..=8)
        .flat_map(|r| (1..=8).map(move |c| (r, c)))
        .filter(|&(r, c)| !corner(r, c))
        .map(|(r, c)| layout.index(r, c))
        .collect::<Vec<_>>();
    debug_assert_eq!(nodes.len(), OBSERVED_CHANNELS);
    Ok(nodes)
}
