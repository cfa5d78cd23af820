//! Proper edge colorings: a fast greedy pass bounded by 2*max_degree - 1
//! colors, and the Misra-Gries fan construction reaching max_degree + 1.

use super::InteractionGraph;
use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColoringStrategy {
    Greedy,
    MisraGries,
}

impl std::str::FromStr for ColoringStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "greedy" => Ok(ColoringStrategy::Greedy),
            "misra-gries" => Ok(ColoringStrategy::MisraGries),
            other => Err(Error::Parse(format!(
                "unknown coloring strategy {other:?}, expected greedy or misra-gries"
            ))),
        }
    }
}

/// Color classes of a proper edge coloring, each class a set of disjoint
/// edges. Deterministic given the graph's edge order. Classes come back
/// sorted by color with empty classes dropped.
pub fn edge_coloring(
    graph: &InteractionGraph,
    strategy: ColoringStrategy,
) -> Vec<Vec<(usize, usize)>> {
    let colors = match strategy {
        ColoringStrategy::Greedy => greedy(graph),
        ColoringStrategy::MisraGries => misra_gries(graph),
    };
    let count = colors.iter().copied().max().map_or(0, |c| c + 1);
    let mut classes = vec![Vec::new(); count];
    for (edge, &color) in graph.edges().iter().zip(&colors) {
        classes[color].push(*edge);
    }
    classes.retain(|c| !c.is_empty());
    for class in &mut classes {
        class.sort_unstable();
    }
    classes
}

/// True when every edge appears exactly once and no two edges in a class
/// share a vertex.
pub fn is_proper_coloring(graph: &InteractionGraph, classes: &[Vec<(usize, usize)>]) -> bool {
    let mut seen: Vec<(usize, usize)> = Vec::new();
    for class in classes {
        let mut used = vec![false; graph.n()];
        for &(a, b) in class {
            if used[a] || used[b] {
                return false;
            }
            used[a] = true;
            used[b] = true;
            seen.push((a.min(b), a.max(b)));
        }
    }
    seen.sort_unstable();
    seen == graph.edges()
}

/// Smallest color unused at either endpoint. Each endpoint blocks at most
/// max_degree - 1 colors, so 2*max_degree - 1 colors always suffice.
fn greedy(graph: &InteractionGraph) -> Vec<usize> {
    let limit = (2 * graph.max_degree()).max(1);
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); graph.n()];
    let mut colors = Vec::with_capacity(graph.edges().len());
    for &(a, b) in graph.edges() {
        let color = (0..limit)
            .find(|c| !incident[a].contains(c) && !incident[b].contains(c))
            .expect("a free color always exists below 2*max_degree");
        incident[a].push(color);
        incident[b].push(color);
        colors.push(color);
    }
    colors
}

/// Misra-Gries coloring with max_degree + 1 colors. For each uncolored
/// edge (u, v): build a maximal fan of u from v, pick a color c free on u
/// and d free on the fan's last vertex, invert the maximal path from u
/// alternating d and c (making d free on u), shrink the fan to a prefix
/// that is still a fan and whose last vertex has d free, then rotate the
/// prefix and color its last spoke d. Fan maximality guarantees such a
/// prefix survives the inversion.
fn misra_gries(graph: &InteractionGraph) -> Vec<usize> {
    let n = graph.n();
    let palette = graph.max_degree() + 1;
    // at[v][c] = neighbour joined to v by the c-colored edge
    let mut at: Vec<Vec<Option<usize>>> = vec![vec![None; palette]; n];
    let mut colors: std::collections::HashMap<(usize, usize), usize> = Default::default();
    let key = |a: usize, b: usize| (a.min(b), a.max(b));
    let free = |at: &[Vec<Option<usize>>], v: usize| -> usize {
        (0..palette)
            .find(|&c| at[v][c].is_none())
            .expect("degree < palette")
    };

    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(a, b) in graph.edges() {
        adj[a].push(b);
        adj[b].push(a);
    }

    for &(u, v) in graph.edges() {
        // maximal fan: each spoke's color is free on the previous vertex
        let mut fan = vec![v];
        let mut in_fan = vec![false; n];
        in_fan[v] = true;
        loop {
            let last = *fan.last().unwrap();
            let next = adj[u].iter().copied().find(|&w| {
                !in_fan[w]
                    && colors
                        .get(&key(u, w))
                        .is_some_and(|&c| at[last][c].is_none())
            });
            match next {
                Some(w) => {
                    in_fan[w] = true;
                    fan.push(w);
                }
                None => break,
            }
        }

        let c = free(&at, u);
        let d = free(&at, *fan.last().unwrap());

        if c != d {
            // collect the maximal path from u alternating d, c, d, ...
            // (simple, since c is free on u), then swap the two colors
            // along it in two passes so shared vertices stay consistent
            let mut path = Vec::new();
            let mut prev = u;
            let mut want = d;
            while let Some(next) = at[prev][want] {
                path.push((prev, next, want));
                prev = next;
                want = c + d - want;
            }
            for &(a, b, col) in &path {
                at[a][col] = None;
                at[b][col] = None;
            }
            for &(a, b, col) in &path {
                let other = c + d - col;
                at[a][other] = Some(b);
                at[b][other] = Some(a);
                colors.insert(key(a, b), other);
            }
        }

        // longest prefix that is still a fan and ends where d is free
        let end = (1..=fan.len())
            .rev()
            .find(|&cand| {
                at[fan[cand - 1]][d].is_none()
                    && (1..cand).all(|i| {
                        colors
                            .get(&key(u, fan[i]))
                            .is_some_and(|&col| at[fan[i - 1]][col].is_none())
                    })
            })
            .expect("some fan prefix accepts d after the inversion");

        // rotate: each spoke takes the next spoke's color
        let spoke_colors: Vec<usize> = (1..end).map(|i| colors[&key(u, fan[i])]).collect();
        for i in 1..end {
            let col = spoke_colors[i - 1];
            at[u][col] = None;
            at[fan[i]][col] = None;
        }
        for i in 1..end {
            let col = spoke_colors[i - 1];
            let target = fan[i - 1];
            colors.insert(key(u, target), col);
            at[u][col] = Some(target);
            at[target][col] = Some(u);
        }
        colors.insert(key(u, fan[end - 1]), d);
        at[u][d] = Some(fan[end - 1]);
        at[fan[end - 1]][d] = Some(u);
    }

    graph
        .edges()
        .iter()
        .map(|&(a, b)| colors[&key(a, b)])
        .collect()
}
