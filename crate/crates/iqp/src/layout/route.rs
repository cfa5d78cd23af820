//! Scheduling layered circuits onto the grid.
//!
//! Between gate layers the qubits are rearranged by a shearsort pass:
//! alternating snake-order row sorts and column sorts of the destination
//! ranks, where every comparator that actually exchanges its cells is
//! emitted as a SWAP. Placement is carried forward across layers and
//! restored to the identity once at the end.

use super::{Grid, LayeredCircuit};
use crate::error::{Error, Result};
use crate::mask::Mask;
use crate::program::{Row, XProgram};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OpKind {
    Swap,
    Gate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeOp {
    pub cells: Vec<usize>,
    pub op: OpKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub num: Option<u32>,
}

impl LatticeOp {
    pub fn swap(a: usize, b: usize) -> Self {
        LatticeOp {
            cells: vec![a, b],
            op: OpKind::Swap,
            num: None,
        }
    }

    pub fn gate2(a: usize, b: usize, num: u32) -> Self {
        LatticeOp {
            cells: vec![a, b],
            op: OpKind::Gate,
            num: Some(num),
        }
    }

    pub fn gate1(c: usize, num: u32) -> Self {
        LatticeOp {
            cells: vec![c],
            op: OpKind::Gate,
            num: Some(num),
        }
    }
}

/// Time-stepped schedule of SWAPs and phase gates on grid cells.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeCircuit {
    pub rows: usize,
    pub cols: usize,
    pub den: u32,
    pub steps: Vec<Vec<LatticeOp>>,
}

impl LatticeCircuit {
    pub fn depth(&self) -> usize {
        self.steps.len()
    }

    pub fn swap_count(&self) -> usize {
        self.steps
            .iter()
            .flatten()
            .filter(|op| op.op == OpKind::Swap)
            .count()
    }

    pub fn gate_count(&self) -> usize {
        self.steps
            .iter()
            .flatten()
            .filter(|op| op.op == OpKind::Gate)
            .count()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

fn ceil_log2(x: usize) -> usize {
    (usize::BITS - (x - 1).leading_zeros()) as usize
}

/// One odd-even transposition substep over every row at once, snake
/// directed: even rows ascend, odd rows descend. Returns the exchanges.
fn row_substep(rows: usize, cols: usize, s: usize, keys: &mut [usize]) -> Vec<(usize, usize)> {
    let mut swaps = Vec::new();
    for r in 0..rows {
        let asc = r % 2 == 0;
        let mut j = s % 2;
        while j + 1 < cols {
            let a = r * cols + j;
            let b = a + 1;
            let wrong = if asc { keys[a] > keys[b] } else { keys[a] < keys[b] };
            if wrong {
                keys.swap(a, b);
                swaps.push((a, b));
            }
            j += 2;
        }
    }
    swaps
}

fn col_substep(rows: usize, cols: usize, s: usize, keys: &mut [usize]) -> Vec<(usize, usize)> {
    let mut swaps = Vec::new();
    let mut i = s % 2;
    while i + 1 < rows {
        for c in 0..cols {
            let a = i * cols + c;
            let b = a + cols;
            if keys[a] > keys[b] {
                keys.swap(a, b);
                swaps.push((a, b));
            }
        }
        i += 2;
    }
    swaps
}

/// Shearsort the keys into snake order: ceil(log2 rows)+1 phases of a
/// full row sort then a full column sort, plus a last row sort. Empty
/// substeps are dropped, so an already-sorted input yields no timesteps.
fn shear_sort(grid: &Grid, keys: &mut [usize]) -> Vec<Vec<(usize, usize)>> {
    let (rows, cols) = (grid.rows(), grid.cols());
    let mut steps = Vec::new();
    let push = |swaps: Vec<(usize, usize)>, steps: &mut Vec<Vec<(usize, usize)>>| {
        if !swaps.is_empty() {
            steps.push(swaps);
        }
    };
    for _ in 0..ceil_log2(rows) + 1 {
        for s in 0..cols {
            push(row_substep(rows, cols, s, keys), &mut steps);
        }
        for s in 0..rows {
            push(col_substep(rows, cols, s, keys), &mut steps);
        }
    }
    for s in 0..cols {
        push(row_substep(rows, cols, s, keys), &mut steps);
    }
    steps
}

/// Timestep upper bound of the fixed network before empty substeps are
/// dropped: (ceil(log2 R)+1)*(C+R) + C.
pub fn network_depth_bound(grid: &Grid) -> usize {
    (ceil_log2(grid.rows()) + 1) * (grid.cols() + grid.rows()) + grid.cols()
}

/// SWAP timesteps that take the identity placement to sigma (the token
/// starting at cell c ends at cell sigma[c]). Disjoint exchanges of
/// adjacent cells, at most network_depth_bound timesteps.
pub fn permutation_network(grid: &Grid, sigma: &[usize]) -> Result<Vec<Vec<(usize, usize)>>> {
    let cells = grid.cells();
    if sigma.len() != cells {
        return Err(Error::Dimension(format!(
            "permutation of {} cells on a {} cell grid",
            sigma.len(),
            cells
        )));
    }
    let mut seen = vec![false; cells];
    for &t in sigma {
        if t >= cells || seen[t] {
            return Err(Error::Validation("sigma is not a bijection on cells".into()));
        }
        seen[t] = true;
    }
    let mut keys: Vec<usize> = (0..cells).map(|c| grid.snake_rank(sigma[c])).collect();
    let steps = shear_sort(grid, &mut keys);
    for (c, &k) in keys.iter().enumerate() {
        assert_eq!(k, grid.snake_rank(c), "shearsort left cell {c} unsorted");
    }
    Ok(steps)
}

/// Emit the SWAPs moving the current placement to target (token -> cell),
/// updating place and inv alongside.
fn advance(
    grid: &Grid,
    target: &[usize],
    place: &mut [usize],
    inv: &mut [usize],
    steps: &mut Vec<Vec<LatticeOp>>,
) {
    let cells = grid.cells();
    let mut keys: Vec<usize> = (0..cells).map(|c| grid.snake_rank(target[inv[c]])).collect();
    for sub in shear_sort(grid, &mut keys) {
        let mut ops = Vec::with_capacity(sub.len());
        for &(a, b) in &sub {
            inv.swap(a, b);
            place[inv[a]] = a;
            place[inv[b]] = b;
            ops.push(LatticeOp::swap(a, b));
        }
        steps.push(ops);
    }
    debug_assert_eq!(place, target);
}

/// Schedule the layers onto the grid. Each layer's gate pairs are packed
/// into horizontally adjacent cell pairs in ascending qubit order, a
/// shearsort pass routes the placement there, and the gates run in one
/// timestep. A final pass restores the identity placement, after which
/// the single-qubit gates attach at their home cells.
pub fn route(layers: &LayeredCircuit, grid: &Grid) -> Result<LatticeCircuit> {
    if layers.n != grid.n() {
        return Err(Error::Dimension(format!(
            "layered circuit on {} qubits, grid holds {}",
            layers.n,
            grid.n()
        )));
    }
    let cells = grid.cells();
    let mut place: Vec<usize> = (0..cells).collect();
    let mut inv: Vec<usize> = (0..cells).collect();
    let mut steps: Vec<Vec<LatticeOp>> = Vec::new();

    for layer in &layers.layers {
        let mut pairs: Vec<(usize, usize, u32)> = layer
            .iter()
            .map(|&(a, b, num)| (a.min(b), a.max(b), num))
            .collect();
        pairs.sort_unstable();
        let mut target: Vec<usize> = vec![cells; cells];
        let mut placed = vec![false; cells];
        for (k, &(a, b, _)) in pairs.iter().enumerate() {
            if a == b || b >= layers.n {
                return Err(Error::Validation(format!("bad gate pair ({a}, {b})")));
            }
            if placed[a] || placed[b] {
                return Err(Error::Validation(format!(
                    "qubit reused inside one layer at ({a}, {b})"
                )));
            }
            placed[a] = true;
            placed[b] = true;
            target[a] = 2 * k;
            target[b] = 2 * k + 1;
        }
        let mut next = 2 * pairs.len();
        for t in 0..cells {
            if !placed[t] {
                target[t] = next;
                next += 1;
            }
        }
        advance(grid, &target, &mut place, &mut inv, &mut steps);
        let gate_ops = pairs
            .iter()
            .enumerate()
            .map(|(k, &(_, _, num))| LatticeOp::gate2(2 * k, 2 * k + 1, num))
            .collect();
        steps.push(gate_ops);
    }

    let identity: Vec<usize> = (0..cells).collect();
    advance(grid, &identity, &mut place, &mut inv, &mut steps);

    if !layers.singles.is_empty() {
        let mut ops = Vec::with_capacity(layers.singles.len());
        for &(q, num) in &layers.singles {
            if q >= layers.n {
                return Err(Error::Validation(format!("single-qubit gate off the end at {q}")));
            }
            ops.push(LatticeOp::gate1(q, num));
        }
        steps.push(ops);
    }

    Ok(LatticeCircuit {
        rows: grid.rows(),
        cols: grid.cols(),
        den: layers.den,
        steps,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LatticeViolation {
    GridMismatch { expected: (usize, usize), found: (usize, usize) },
    DenMismatch { expected: u32, found: u32 },
    BadCell { step: usize, cell: usize },
    RepeatedCell { step: usize, cell: usize },
    BadArity { step: usize, len: usize },
    NonAdjacent { step: usize, cells: (usize, usize) },
    MissingNum { step: usize },
    SwapWithNum { step: usize },
    GateMismatch { detail: String },
    FinalPlacement { cell: usize, token: usize },
}

impl fmt::Display for LatticeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeViolation::GridMismatch { expected, found } => write!(
                f,
                "grid mismatch: expected {}x{}, lattice says {}x{}",
                expected.0, expected.1, found.0, found.1
            ),
            LatticeViolation::DenMismatch { expected, found } => {
                write!(f, "denominator mismatch: program {expected}, lattice {found}")
            }
            LatticeViolation::BadCell { step, cell } => {
                write!(f, "cell {cell} outside the grid in step {step}")
            }
            LatticeViolation::RepeatedCell { step, cell } => {
                write!(f, "cell {cell} used twice in step {step}")
            }
            LatticeViolation::BadArity { step, len } => {
                write!(f, "operation on {len} cells in step {step}")
            }
            LatticeViolation::NonAdjacent { step, cells } => write!(
                f,
                "non-adjacent cells ({}, {}) in step {step}",
                cells.0, cells.1
            ),
            LatticeViolation::MissingNum { step } => {
                write!(f, "gate without a phase numerator in step {step}")
            }
            LatticeViolation::SwapWithNum { step } => {
                write!(f, "swap carrying a phase numerator in step {step}")
            }
            LatticeViolation::GateMismatch { detail } => {
                write!(f, "gate multiset mismatch: {detail}")
            }
            LatticeViolation::FinalPlacement { cell, token } => write!(
                f,
                "final placement is not the identity: cell {cell} holds qubit {token}"
            ),
        }
    }
}

fn merge_rows(mut rows: Vec<Row>, modulus: u32) -> Vec<Row> {
    rows.sort_by(|a, b| a.mask.cmp(&b.mask));
    let mut merged: Vec<Row> = Vec::new();
    for row in rows {
        match merged.last_mut() {
            Some(last) if last.mask == row.mask => {
                last.num = (last.num + row.num) % modulus;
            }
            _ => merged.push(row),
        }
    }
    merged.retain(|r| r.num != 0);
    merged
}

/// Structural check that the schedule implements the program: every
/// operation stays on adjacent, disjoint cells; tracking the placement
/// through the SWAPs, the applied gates form exactly the program's
/// normalized gate multiset; the final placement is the identity. That
/// suffices for distribution equality, because SWAPs only permute labels
/// and the diagonal gates commute freely.
pub fn verify_lattice(
    lat: &LatticeCircuit,
    original: &XProgram,
    grid: &Grid,
) -> std::result::Result<(), LatticeViolation> {
    if (lat.rows, lat.cols) != (grid.rows(), grid.cols()) {
        return Err(LatticeViolation::GridMismatch {
            expected: (grid.rows(), grid.cols()),
            found: (lat.rows, lat.cols),
        });
    }
    if lat.den != original.den() {
        return Err(LatticeViolation::DenMismatch {
            expected: original.den(),
            found: lat.den,
        });
    }
    let cells = grid.cells();
    let modulus = 2 * original.den();
    let mut inv: Vec<usize> = (0..cells).collect();
    let mut applied: Vec<Row> = Vec::new();
    for (step, ops) in lat.steps.iter().enumerate() {
        let mut used = vec![false; cells];
        for op in ops {
            for &c in &op.cells {
                if c >= cells {
                    return Err(LatticeViolation::BadCell { step, cell: c });
                }
                if used[c] {
                    return Err(LatticeViolation::RepeatedCell { step, cell: c });
                }
                used[c] = true;
            }
            match (op.op, op.cells.len()) {
                (OpKind::Swap, 2) => {
                    if op.num.is_some() {
                        return Err(LatticeViolation::SwapWithNum { step });
                    }
                    let (a, b) = (op.cells[0], op.cells[1]);
                    if !grid.adjacent(a, b) {
                        return Err(LatticeViolation::NonAdjacent { step, cells: (a, b) });
                    }
                    inv.swap(a, b);
                }
                (OpKind::Gate, 1) => {
                    let num = op.num.ok_or(LatticeViolation::MissingNum { step })?;
                    applied.push(Row {
                        mask: Mask::single(inv[op.cells[0]]),
                        num: num % modulus,
                    });
                }
                (OpKind::Gate, 2) => {
                    let num = op.num.ok_or(LatticeViolation::MissingNum { step })?;
                    let (a, b) = (op.cells[0], op.cells[1]);
                    if !grid.adjacent(a, b) {
                        return Err(LatticeViolation::NonAdjacent { step, cells: (a, b) });
                    }
                    applied.push(Row {
                        mask: Mask::from_bits([inv[a], inv[b]]),
                        num: num % modulus,
                    });
                }
                (_, len) => return Err(LatticeViolation::BadArity { step, len }),
            }
        }
    }
    for (cell, &token) in inv.iter().enumerate() {
        if token != cell {
            return Err(LatticeViolation::FinalPlacement { cell, token });
        }
    }
    let want = original.normalized().rows().to_vec();
    let got = merge_rows(applied, modulus);
    if want != got {
        let detail = want
            .iter()
            .find(|r| !got.contains(r))
            .map(|r| format!("gate {}:{} missing or altered", r.mask, r.num))
            .or_else(|| {
                got.iter()
                    .find(|r| !want.contains(r))
                    .map(|r| format!("unexpected gate {}:{}", r.mask, r.num))
            })
            .unwrap_or_else(|| "gate counts differ".into());
        return Err(LatticeViolation::GateMismatch { detail });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::{layer_circuit, plan_grid, ColoringStrategy};
    use crate::program::{random_sparse_circuit, SparseParams};
    use crate::rng::Rng;

    fn apply_network(grid: &Grid, steps: &[Vec<(usize, usize)>]) -> Vec<usize> {
        // returns the realized token -> cell map
        let mut inv: Vec<usize> = (0..grid.cells()).collect();
        for sub in steps {
            let mut used = vec![false; grid.cells()];
            for &(a, b) in sub {
                assert!(grid.adjacent(a, b), "non-adjacent swap ({a}, {b})");
                assert!(!used[a] && !used[b], "overlapping swaps");
                used[a] = true;
                used[b] = true;
                inv.swap(a, b);
            }
        }
        let mut place = vec![0usize; grid.cells()];
        for (cell, &token) in inv.iter().enumerate() {
            place[token] = cell;
        }
        place
    }

    #[test]
    fn identity_permutation_needs_nothing() {
        let grid = plan_grid(12).unwrap();
        let sigma: Vec<usize> = (0..grid.cells()).collect();
        let steps = permutation_network(&grid, &sigma).unwrap();
        assert!(steps.is_empty());
    }

    #[test]
    fn adjacent_exchange_is_one_swap() {
        let grid = plan_grid(4).unwrap();
        assert_eq!((grid.rows(), grid.cols()), (2, 2));
        for sigma in [vec![1, 0, 2, 3], vec![0, 1, 3, 2]] {
            let steps = permutation_network(&grid, &sigma).unwrap();
            let total: usize = steps.iter().map(|s| s.len()).sum();
            assert_eq!(total, 1, "sigma {sigma:?}");
            assert_eq!(apply_network(&grid, &steps), sigma);
        }
    }

    #[test]
    fn rejects_non_bijections() {
        let grid = plan_grid(4).unwrap();
        assert!(permutation_network(&grid, &[0, 0, 1, 2]).is_err());
        assert!(permutation_network(&grid, &[0, 1, 2]).is_err());
        assert!(permutation_network(&grid, &[0, 1, 2, 4]).is_err());
    }

    fn permutations(k: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut items: Vec<usize> = (0..k).collect();
        fn heap(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
            if k <= 1 {
                out.push(items.clone());
                return;
            }
            for i in 0..k {
                heap(items, k - 1, out);
                if k % 2 == 0 {
                    items.swap(i, k - 1);
                } else {
                    items.swap(0, k - 1);
                }
            }
        }
        heap(&mut items, k, &mut out);
        out
    }

    #[test]
    fn network_realizes_every_small_permutation() {
        let square = plan_grid(4).unwrap();
        let wide = Grid { rows: 2, cols: 3, n: 6 };
        for grid in [square, wide] {
            let bound = network_depth_bound(&grid);
            for sigma in permutations(grid.cells()) {
                let steps = permutation_network(&grid, &sigma).unwrap();
                assert!(steps.len() <= bound);
                assert_eq!(apply_network(&grid, &steps), sigma, "grid {grid:?}");
            }
        }
    }

    #[test]
    fn network_realizes_random_permutations() {
        let grid = plan_grid(16).unwrap();
        let bound = network_depth_bound(&grid);
        let mut r = Rng::new(77);
        for _ in 0..1000 {
            let mut sigma: Vec<usize> = (0..grid.cells()).collect();
            for i in (1..sigma.len()).rev() {
                let j = r.below(i as u64 + 1) as usize;
                sigma.swap(i, j);
            }
            let steps = permutation_network(&grid, &sigma).unwrap();
            assert!(steps.len() <= bound);
            assert_eq!(apply_network(&grid, &steps), sigma);
        }
    }

    fn sparse(n: usize, gamma: f64, seed: u64) -> XProgram {
        random_sparse_circuit(&SparseParams::new(n, gamma).unwrap(), &mut Rng::new(seed))
    }

    #[test]
    fn adjacent_layer_routes_without_swaps() {
        let layers = LayeredCircuit {
            n: 2,
            den: 8,
            layers: vec![vec![(0, 1, 6)]],
            singles: vec![],
        };
        let grid = plan_grid(2).unwrap();
        let lat = route(&layers, &grid).unwrap();
        assert_eq!(lat.swap_count(), 0);
        assert_eq!(lat.depth(), 1);
        assert_eq!(lat.steps[0], vec![LatticeOp::gate2(0, 1, 6)]);
    }

    #[test]
    fn routed_sparse_circuits_verify() {
        for seed in 0..200u64 {
            let n = 2 + (seed % 15) as usize;
            let prog = sparse(n, 2.0, seed);
            let layers = layer_circuit(&prog, ColoringStrategy::MisraGries).unwrap();
            let grid = plan_grid(n).unwrap();
            let lat = route(&layers, &grid).unwrap();
            if let Err(v) = verify_lattice(&lat, &prog, &grid) {
                panic!("seed {seed}: {v}");
            }
        }
    }

    #[test]
    fn routed_depth_stays_under_the_network_bound() {
        let prog = sparse(9, 3.0, 11);
        let layers = layer_circuit(&prog, ColoringStrategy::Greedy).unwrap();
        let grid = plan_grid(9).unwrap();
        let lat = route(&layers, &grid).unwrap();
        verify_lattice(&lat, &prog, &grid).unwrap();
        let bound = (layers.depth() + 1) * network_depth_bound(&grid) + layers.depth() + 1;
        assert!(lat.depth() <= bound, "{} > {bound}", lat.depth());
    }

    #[test]
    fn depth_sweep_tracks_the_sorting_bound() {
        // depth / (layers * sqrt(n) * log2(n)^2) stays small across sizes;
        // the single-log ratio is printed for comparison
        for &n in &[16usize, 36, 64, 100, 144] {
            let mut depths = Vec::new();
            let mut ratio1 = Vec::new();
            let mut ratio2 = Vec::new();
            for seed in 0..5u64 {
                let prog = sparse(n, 2.0, 100 + seed);
                let layers = layer_circuit(&prog, ColoringStrategy::MisraGries).unwrap();
                let grid = plan_grid(n).unwrap();
                let lat = route(&layers, &grid).unwrap();
                verify_lattice(&lat, &prog, &grid).unwrap();
                let t = layers.depth().max(1) as f64;
                let log = (n as f64).log2();
                let d = lat.depth() as f64;
                depths.push(lat.depth());
                ratio1.push(d / (t * (n as f64).sqrt() * log));
                ratio2.push(d / (t * (n as f64).sqrt() * log * log));
                let analytic =
                    (layers.depth() + 1) * network_depth_bound(&grid) + layers.depth() + 1;
                assert!(lat.depth() <= analytic);
            }
            ratio2.sort_by(f64::total_cmp);
            assert!(
                ratio2[2] <= 4.0,
                "n={n}: median log^2 ratio {} too large",
                ratio2[2]
            );
            println!(
                "n={n}: depths {depths:?} ratio/log {:?} ratio/log2 {:?}",
                ratio1, ratio2
            );
        }
    }

    #[test]
    fn verify_catches_mutations() {
        let prog = sparse(6, 3.0, 21);
        let layers = layer_circuit(&prog, ColoringStrategy::Greedy).unwrap();
        let grid = plan_grid(6).unwrap();
        let lat = route(&layers, &grid).unwrap();
        verify_lattice(&lat, &prog, &grid).unwrap();

        let gate_pos = lat
            .steps
            .iter()
            .position(|s| s.iter().any(|op| op.op == OpKind::Gate && op.cells.len() == 2))
            .expect("some 2-qubit gate step");

        // non-adjacent gate
        let mut bad = lat.clone();
        bad.steps[gate_pos][0].cells = vec![0, grid.cells() - 1];
        assert!(matches!(
            verify_lattice(&bad, &prog, &grid),
            Err(LatticeViolation::NonAdjacent { .. })
        ));

        // missing gate
        let mut bad = lat.clone();
        bad.steps[gate_pos].remove(0);
        assert!(matches!(
            verify_lattice(&bad, &prog, &grid),
            Err(LatticeViolation::GateMismatch { .. })
        ));

        // altered exponent
        let mut bad = lat.clone();
        bad.steps[gate_pos][0].num = bad.steps[gate_pos][0].num.map(|v| (v + 2) % 16);
        assert!(matches!(
            verify_lattice(&bad, &prog, &grid),
            Err(LatticeViolation::GateMismatch { .. })
        ));

        // dropped swap step breaks either a gate or the final placement
        if let Some(swap_pos) = lat.steps.iter().position(|s| s[0].op == OpKind::Swap) {
            let mut bad = lat.clone();
            bad.steps.remove(swap_pos);
            assert!(verify_lattice(&bad, &prog, &grid).is_err());
        }

        // overlapping cells inside one step
        let mut bad = lat.clone();
        let dup = bad.steps[gate_pos][0].clone();
        bad.steps[gate_pos].push(dup);
        assert!(matches!(
            verify_lattice(&bad, &prog, &grid),
            Err(LatticeViolation::RepeatedCell { .. })
        ));

        // wrong denominator
        let mut bad = lat.clone();
        bad.den = 4;
        assert!(matches!(
            verify_lattice(&bad, &prog, &grid),
            Err(LatticeViolation::DenMismatch { .. })
        ));
    }

    #[test]
    fn lattice_json_roundtrip() {
        let prog = sparse(5, 2.0, 8);
        let layers = layer_circuit(&prog, ColoringStrategy::MisraGries).unwrap();
        let grid = plan_grid(5).unwrap();
        let lat = route(&layers, &grid).unwrap();
        let text = lat.to_json();
        assert!(text.contains("\"rows\""));
        assert!(text.ends_with('\n'));
        let back = LatticeCircuit::from_json(&text).unwrap();
        assert_eq!(back, lat);
        assert!(LatticeCircuit::from_json("{\"rows\":1}").is_err());
        let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        doc["tag"] = serde_json::json!(1);
        assert!(LatticeCircuit::from_json(&doc.to_string()).is_err());
    }

    #[test]
    fn singles_attach_after_the_restore() {
        let prog = {
            use crate::program::Row;
            XProgram::new(
                3,
                8,
                vec![
                    Row { mask: Mask::from_bits([0, 2]), num: 4 },
                    Row { mask: Mask::single(1), num: 6 },
                ],
            )
            .unwrap()
        };
        let layers = layer_circuit(&prog, ColoringStrategy::Greedy).unwrap();
        let grid = plan_grid(3).unwrap();
        let lat = route(&layers, &grid).unwrap();
        verify_lattice(&lat, &prog, &grid).unwrap();
        let last = lat.steps.last().unwrap();
        assert_eq!(last, &vec![LatticeOp::gate1(1, 6)]);
    }
}
