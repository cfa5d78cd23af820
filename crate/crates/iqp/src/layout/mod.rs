//! Parallelisation and grid routing for two-local circuits.
//!
//! The gates of a two-local program form a graph on the qubits. A proper
//! edge coloring partitions them into layers of disjoint gates, each layer
//! executable in one parallel step. For sparse random circuits the max
//! degree, and hence the layer count, stays at O(log n) with high
//! probability. The route submodule then schedules the layers onto a
//! nearest-neighbour grid with sorting-network SWAP passes.

pub mod coloring;
pub mod route;

pub use coloring::{edge_coloring, is_proper_coloring, ColoringStrategy};
pub use route::{
    permutation_network, route, verify_lattice, LatticeCircuit, LatticeOp, LatticeViolation,
    OpKind,
};

use crate::error::{Error, Result};
use crate::program::{SparseParams, XProgram};
use crate::rng::Rng;
use rayon::prelude::*;

/// Simple graph on the qubits with one edge per distinct 2-qubit support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl InteractionGraph {
    /// Edges are stored deduplicated, each as (low, high), sorted.
    pub fn new(n: usize, mut edges: Vec<(usize, usize)>) -> Result<Self> {
        for e in edges.iter_mut() {
            if e.0 > e.1 {
                *e = (e.1, e.0);
            }
            if e.0 == e.1 {
                return Err(Error::Validation(format!("self-loop at vertex {}", e.0)));
            }
            if e.1 >= n {
                return Err(Error::Validation(format!(
                    "edge ({}, {}) outside {n} vertices",
                    e.0, e.1
                )));
            }
        }
        edges.sort_unstable();
        edges.dedup();
        Ok(InteractionGraph { n, edges })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.n];
        for &(a, b) in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }
}

/// The graph of a program's 2-qubit gates. 1-qubit rows are ignored;
/// wider rows are rejected.
pub fn interaction_graph(prog: &XProgram) -> Result<InteractionGraph> {
    let mut edges = Vec::new();
    for row in prog.rows() {
        let w = row.mask.weight();
        if w > 2 {
            return Err(Error::Validation(format!(
                "row {} acts on {w} qubits, 2 is the limit for layout",
                row.mask
            )));
        }
        if w == 2 {
            let mut it = row.mask.bits();
            let a = it.next().unwrap();
            let b = it.next().unwrap();
            edges.push((a, b));
        }
    }
    InteractionGraph::new(prog.n(), edges)
}

/// Gates partitioned into layers of pairwise-disjoint supports, plus the
/// trailing single-qubit layer. Duplicate supports are merged first, so
/// the layers hold the program's normalized 2-qubit rows exactly once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayeredCircuit {
    pub n: usize,
    pub den: u32,
    /// each gate is (low qubit, high qubit, phase numerator)
    pub layers: Vec<Vec<(usize, usize, u32)>>,
    pub singles: Vec<(usize, u32)>,
}

impl LayeredCircuit {
    pub fn depth(&self) -> usize {
        self.layers.len()
    }
}

pub fn layer_circuit(prog: &XProgram, strategy: ColoringStrategy) -> Result<LayeredCircuit> {
    let merged = prog.normalized();
    for row in merged.rows() {
        if row.mask.weight() == 0 {
            return Err(Error::Validation(
                "row with empty support has no place on the grid".into(),
            ));
        }
    }
    let graph = interaction_graph(&merged)?;
    let classes = edge_coloring(&graph, strategy);
    let mut num_of = std::collections::HashMap::new();
    for row in merged.rows() {
        if row.mask.weight() == 2 {
            let mut it = row.mask.bits();
            let a = it.next().unwrap();
            let b = it.next().unwrap();
            num_of.insert((a, b), row.num);
        }
    }
    let layers = classes
        .iter()
        .map(|class| {
            class
                .iter()
                .map(|&(a, b)| (a, b, num_of[&(a, b)]))
                .collect()
        })
        .collect();
    let singles = merged
        .rows()
        .iter()
        .filter(|r| r.mask.weight() == 1)
        .map(|r| (r.mask.bits().next().unwrap(), r.num))
        .collect();
    Ok(LayeredCircuit {
        n: prog.n(),
        den: prog.den(),
        layers,
        singles,
    })
}

/// Empirical tail of the max degree of sparse random graphs.
#[derive(Debug, Clone, serde::Serialize)]
pub struct MaxDegreeTail {
    pub n: usize,
    pub gamma: f64,
    pub trials: u64,
    pub hits: u64,
    pub fraction: f64,
    /// degree threshold 2*gamma*ln(n)
    pub threshold: f64,
    /// analytic tail bound n^(1 - gamma/4)
    pub bound: f64,
}

/// Sample graphs with each edge present at the sparse-family edge
/// probability and count how often the max degree reaches 2*gamma*ln(n).
pub fn max_degree_tail(n: usize, gamma: f64, trials: u64, rng: &Rng) -> Result<MaxDegreeTail> {
    if trials < 100 {
        return Err(Error::InvalidParam(format!(
            "{trials} trials cannot resolve a tail, need at least 100"
        )));
    }
    let params = SparseParams::new(n, gamma)?;
    let p = params.p_edge();
    let threshold = 2.0 * gamma * (n as f64).ln();
    let hits = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut r = rng.split(t);
            let mut deg = vec![0u32; n];
            for i in 0..n {
                for j in i + 1..n {
                    if r.bernoulli(p) {
                        deg[i] += 1;
                        deg[j] += 1;
                    }
                }
            }
            let max = deg.into_iter().max().unwrap_or(0);
            u64::from(max as f64 >= threshold)
        })
        .sum();
    Ok(MaxDegreeTail {
        n,
        gamma,
        trials,
        hits,
        fraction: hits as f64 / trials as f64,
        threshold,
        bound: (n as f64).powf(1.0 - gamma / 4.0),
    })
}

/// A rows x cols cell array holding n real qubits; cells beyond n hold
/// idle padding qubits. cols is even so every cell has a horizontal
/// neighbour inside its row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid {
    rows: usize,
    cols: usize,
    n: usize,
}

impl Grid {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cells(&self) -> usize {
        self.rows * self.cols
    }

    /// Boustrophedon rank: even rows run left to right, odd rows right to
    /// left, so consecutive ranks are always grid-adjacent.
    pub fn snake_rank(&self, cell: usize) -> usize {
        let r = cell / self.cols;
        let c = cell % self.cols;
        if r % 2 == 0 {
            cell
        } else {
            r * self.cols + (self.cols - 1 - c)
        }
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        let (ra, ca) = (a / self.cols, a % self.cols);
        let (rb, cb) = (b / self.cols, b % self.cols);
        (ra == rb && ca.abs_diff(cb) == 1) || (ca == cb && ra.abs_diff(rb) == 1)
    }
}

/// Near-square grid for n qubits: ceil(sqrt(n)) rows, width rounded up to
/// the next even number.
pub fn plan_grid(n: usize) -> Result<Grid> {
    if n == 0 {
        return Err(Error::InvalidParam("grid for zero qubits".into()));
    }
    let rows = (n as f64).sqrt().ceil() as usize;
    let mut cols = n.div_ceil(rows);
    if cols % 2 == 1 {
        cols += 1;
    }
    Ok(Grid { rows, cols, n })
}
