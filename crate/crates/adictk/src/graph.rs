//! Graded graphs with ordered incoming edges and the adic successor map.
//!
//! A [`GradedGraph`] is a finite window of a Bratteli diagram: vertices
//! stacked in levels, edges only between consecutive levels, and every
//! vertex's incoming edges carrying an explicit linear order. Full-height
//! paths with a common terminal vertex are compared lexicographically from
//! the top level downward using those orders; [`adic_successor`] is the
//! "next path" map of that order and the maximal path of each class has
//! none.
//!
//! [`pascal_graph`] builds the Pascal triangle instance whose successor map,
//! under the out-edge digit encoding of paths, is exactly the Pascal
//! transformation of [`crate::pascal`]. [`verify_induced_over_odometer`]
//! runs the general check behind that coincidence: on any single-root graph
//! with out-degrees at most `p`, encoding paths by out-edge choices embeds
//! the path space into radix-`p` words, and the check reports whether the
//! successor map acts as `w -> w + j(w)` with `j >= 1` there.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::Error;
use crate::word::{add_natural, DigitWord, Windowed};

/// One edge of a level transition. `order` is the edge's rank among all
/// edges into `target` (0 = first in the adic order).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub order: usize,
}

/// An immutable graded graph with ordered in-edges.
#[derive(Clone, Debug)]
pub struct GradedGraph {
    labels: Vec<Vec<String>>,
    edges: Vec<Vec<Edge>>,
    /// out[level][source] = edge indices in declaration order.
    out: Vec<Vec<Vec<usize>>>,
    /// into[level][target] = edge indices positioned by their `order`.
    into: Vec<Vec<Vec<usize>>>,
}

impl GradedGraph {
    /// Validates and indexes a graph. `labels` gives one label list per
    /// level; `edges[l]` holds the transition from level `l` to `l + 1`.
    pub fn new(labels: Vec<Vec<String>>, edges: Vec<Vec<Edge>>) -> Result<Self, Error> {
        let malformed = |reason: String| Error::MalformedGraph { reason };
        if labels.is_empty() {
            return Err(malformed("a graph needs at least one level".into()));
        }
        if labels.len() != edges.len() + 1 {
            return Err(malformed(format!(
                "{} levels need {} edge lists, got {}",
                labels.len(),
                labels.len() - 1,
                edges.len()
            )));
        }
        for (level, names) in labels.iter().enumerate() {
            if names.is_empty() {
                return Err(malformed(format!("level {level} has no vertices")));
            }
        }
        let mut out = Vec::with_capacity(edges.len());
        let mut into = Vec::with_capacity(edges.len());
        for (level, list) in edges.iter().enumerate() {
            let sources = labels[level].len();
            let targets = labels[level + 1].len();
            let mut out_of = vec![Vec::new(); sources];
            let mut in_lists: Vec<Vec<Option<usize>>> = vec![Vec::new(); targets];
            for (id, edge) in list.iter().enumerate() {
                if edge.source >= sources {
                    return Err(malformed(format!(
                        "level {level}: edge source {} out of range",
                        edge.source
                    )));
                }
                if edge.target >= targets {
                    return Err(malformed(format!(
                        "level {level}: edge target {} out of range",
                        edge.target
                    )));
                }
                out_of[edge.source].push(id);
                let slots = &mut in_lists[edge.target];
                if slots.len() <= edge.order {
                    slots.resize(edge.order + 1, None);
                }
                if slots[edge.order].replace(id).is_some() {
                    return Err(malformed(format!(
                        "level {level}: duplicate in-order {} at vertex {}",
                        edge.order, edge.target
                    )));
                }
            }
            let mut in_of = Vec::with_capacity(targets);
            for (target, slots) in in_lists.into_iter().enumerate() {
                if slots.is_empty() {
                    return Err(malformed(format!(
                        "vertex {target} at level {} has no incoming edge",
                        level + 1
                    )));
                }
                let filled: Option<Vec<usize>> = slots.into_iter().collect();
                match filled {
                    Some(ids) => in_of.push(ids),
                    None => {
                        return Err(malformed(format!(
                            "level {level}: in-orders at vertex {target} have gaps"
                        )))
                    }
                }
            }
            out.push(out_of);
            into.push(in_of);
        }
        Ok(GradedGraph {
            labels,
            edges,
            out,
            into,
        })
    }

    /// Number of level transitions (one less than the number of levels).
    pub fn depth(&self) -> usize {
        self.edges.len()
    }

    pub fn levels(&self) -> usize {
        self.labels.len()
    }

    pub fn width(&self, level: usize) -> usize {
        self.labels[level].len()
    }

    pub fn label(&self, level: usize, vertex: usize) -> &str {
        &self.labels[level][vertex]
    }

    pub fn transition(&self, level: usize) -> &[Edge] {
        &self.edges[level]
    }

    pub fn edge(&self, level: usize, id: usize) -> Edge {
        self.edges[level][id]
    }

    /// Edge ids leaving `source` at `level`, in declaration order.
    pub fn out_edges(&self, level: usize, source: usize) -> &[usize] {
        &self.out[level][source]
    }

    /// Edge ids entering `target` at `level + 1`, position = adic order.
    pub fn in_edges(&self, level: usize, target: usize) -> &[usize] {
        &self.into[level][target]
    }

    pub fn max_out_degree(&self) -> usize {
        self.out
            .iter()
            .flat_map(|per_source| per_source.iter().map(Vec::len))
            .max()
            .unwrap_or(0)
    }

    /// The single level-0 vertex, or an error when there are several.
    pub fn root(&self) -> Result<usize, Error> {
        match self.width(0) {
            1 => Ok(0),
            roots => Err(Error::MultipleRoots { roots }),
        }
    }

    /// The subgraph spanned by levels `0..=depth`.
    pub fn prefix(&self, depth: usize) -> Result<GradedGraph, Error> {
        if depth > self.depth() {
            return Err(Error::WindowTooLong {
                len: depth,
                max: self.depth(),
            });
        }
        GradedGraph::new(self.labels[..=depth].to_vec(), self.edges[..depth].to_vec())
    }

    /// Number of full ascending paths from level 0 ending at the vertex.
    pub fn paths_to(&self, level: usize, vertex: usize) -> BigUint {
        let mut counts: Vec<BigUint> = vec![BigUint::from(1u32); self.width(0)];
        for l in 0..level {
            let mut next = vec![BigUint::zero(); self.width(l + 1)];
            for edge in &self.edges[l] {
                let carried = counts[edge.source].clone();
                next[edge.target] += carried;
            }
            counts = next;
        }
        counts[vertex].clone()
    }
}

/// A full-height path: one edge id per level transition.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GraphPath {
    ids: Vec<usize>,
}

impl GraphPath {
    pub fn new(graph: &GradedGraph, ids: Vec<usize>) -> Result<Self, Error> {
        let malformed = |reason: String| Error::MalformedPath { reason };
        if ids.len() != graph.depth() || ids.is_empty() {
            return Err(malformed(format!(
                "path has {} edges, graph depth is {}",
                ids.len(),
                graph.depth()
            )));
        }
        for (level, &id) in ids.iter().enumerate() {
            if id >= graph.transition(level).len() {
                return Err(malformed(format!(
                    "edge id {id} out of range at level {level}"
                )));
            }
            if level > 0 {
                let below = graph.edge(level - 1, ids[level - 1]);
                let here = graph.edge(level, id);
                if below.target != here.source {
                    return Err(malformed(format!(
                        "edges at levels {} and {level} do not share a vertex",
                        level - 1
                    )));
                }
            }
        }
        Ok(GraphPath { ids })
    }

    pub fn edge_ids(&self) -> &[usize] {
        &self.ids
    }

    /// The vertex the path visits at `level` (0 ..= depth).
    pub fn vertex(&self, graph: &GradedGraph, level: usize) -> usize {
        if level == 0 {
            graph.edge(0, self.ids[0]).source
        } else {
            graph.edge(level - 1, self.ids[level - 1]).target
        }
    }

    pub fn terminal(&self, graph: &GradedGraph) -> usize {
        self.vertex(graph, graph.depth())
    }
}

/// Outcome of [`adic_successor`]: the next path of the terminal-vertex
/// class, or the marker that the path is the last one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Successor {
    Next(GraphPath),
    Maximal,
}

impl Successor {
    pub fn next(self) -> Option<GraphPath> {
        match self {
            Successor::Next(p) => Some(p),
            Successor::Maximal => None,
        }
    }
}

/// Edge ids of the minimal path from level 0 up to the given vertex: every
/// edge has in-order 0.
fn minimal_ids_to(graph: &GradedGraph, level: usize, vertex: usize) -> Vec<usize> {
    let mut ids = vec![0usize; level];
    let mut v = vertex;
    for l in (0..level).rev() {
        let id = graph.in_edges(l, v)[0];
        ids[l] = id;
        v = graph.edge(l, id).source;
    }
    ids
}

/// The minimal full-height path ending at `vertex` on the top level.
pub fn minimal_path(graph: &GradedGraph, vertex: usize) -> Result<GraphPath, Error> {
    if graph.depth() == 0 {
        return Err(Error::MalformedPath {
            reason: "graph has no edges".into(),
        });
    }
    if vertex >= graph.width(graph.depth()) {
        return Err(Error::MalformedPath {
            reason: format!("no vertex {vertex} on the top level"),
        });
    }
    GraphPath::new(graph, minimal_ids_to(graph, graph.depth(), vertex))
}

/// The next path with the same terminal vertex: find the lowest level whose
/// edge is not maximal in the in-order at its target, advance it, and fill
/// everything below with the minimal path to the new source.
pub fn adic_successor(graph: &GradedGraph, path: &GraphPath) -> Result<Successor, Error> {
    let path = GraphPath::new(graph, path.edge_ids().to_vec())?;
    for level in 0..graph.depth() {
        let edge = graph.edge(level, path.edge_ids()[level]);
        let in_list = graph.in_edges(level, edge.target);
        debug_assert_eq!(in_list[edge.order], path.edge_ids()[level]);
        if edge.order + 1 < in_list.len() {
            let bumped = in_list[edge.order + 1];
            let new_source = graph.edge(level, bumped).source;
            let mut ids = minimal_ids_to(graph, level, new_source);
            ids.push(bumped);
            ids.extend_from_slice(&path.edge_ids()[level + 1..]);
            return Ok(Successor::Next(GraphPath::new(graph, ids)?));
        }
    }
    Ok(Successor::Maximal)
}

/// All full-height paths, enumerated by out-edge declaration order (depth
/// first from each level-0 vertex in index order).
pub fn all_paths(graph: &GradedGraph) -> Vec<GraphPath> {
    let mut found = Vec::new();
    if graph.depth() == 0 {
        return found;
    }
    let mut stack: Vec<usize> = Vec::with_capacity(graph.depth());
    for start in 0..graph.width(0) {
        descend(graph, start, &mut stack, &mut found);
    }
    found
}

fn descend(graph: &GradedGraph, vertex: usize, stack: &mut Vec<usize>, found: &mut Vec<GraphPath>) {
    let level = stack.len();
    if level == graph.depth() {
        found.push(GraphPath { ids: stack.clone() });
        return;
    }
    for &id in graph.out_edges(level, vertex) {
        stack.push(id);
        descend(graph, graph.edge(level, id).target, stack, found);
        stack.pop();
    }
}

/// The out-edge digit encoding: digit `i` is the position of the path's
/// level-`i` edge among the out-edges of its source. On a single-root graph
/// this is injective and identifies paths with radix-`p` words.
pub fn encode_path(graph: &GradedGraph, path: &GraphPath, radix: u32) -> Result<DigitWord, Error> {
    graph.root()?;
    let mut digits = Vec::with_capacity(path.edge_ids().len());
    for (level, &id) in path.edge_ids().iter().enumerate() {
        let source = graph.edge(level, id).source;
        let slot = graph
            .out_edges(level, source)
            .iter()
            .position(|&e| e == id)
            .expect("edge listed among its source's out-edges");
        if slot >= radix as usize {
            return Err(Error::OutDegreeExceeded {
                observed: slot + 1,
                radix,
            });
        }
        digits.push(slot as u32);
    }
    DigitWord::new(digits, vec![radix; path.edge_ids().len()])
}

/// Inverse of [`encode_path`]: follow out-edge choices down from the root.
pub fn decode_path(graph: &GradedGraph, word: &DigitWord) -> Result<GraphPath, Error> {
    let mut vertex = graph.root()?;
    if word.len() != graph.depth() {
        return Err(Error::MalformedPath {
            reason: format!(
                "word length {} does not match graph depth {}",
                word.len(),
                graph.depth()
            ),
        });
    }
    let mut ids = Vec::with_capacity(word.len());
    for (level, &digit) in word.digits().iter().enumerate() {
        let slots = graph.out_edges(level, vertex);
        let Some(&id) = slots.get(digit as usize) else {
            return Err(Error::MalformedPath {
                reason: format!("vertex {vertex} at level {level} has no out-edge {digit}"),
            });
        };
        ids.push(id);
        vertex = graph.edge(level, id).target;
    }
    GraphPath::new(graph, ids)
}

/// The Pascal triangle window of the given depth. The vertex with `z` zeros
/// and `o` ones sits at level `z + o` with index `z`; each vertex emits an
/// append-0 and an append-1 edge, and among two edges into a common target
/// the one whose source has more ones comes first. With that order the adic
/// successor, read through [`encode_path`], is the Pascal transformation.
pub fn pascal_graph(depth: usize) -> Result<GradedGraph, Error> {
    if depth < 1 {
        return Err(Error::WindowTooShort { len: depth, min: 1 });
    }
    let labels = (0..=depth)
        .map(|level| (0..=level).map(|z| format!("{z},{}", level - z)).collect())
        .collect();
    let edges = (0..depth)
        .map(|level| {
            let mut list = Vec::with_capacity(2 * (level + 1));
            for z in 0..=level {
                list.push(Edge {
                    source: z,
                    target: z + 1,
                    order: 0,
                });
                list.push(Edge {
                    source: z,
                    target: z,
                    order: usize::from(z >= 1),
                });
            }
            list
        })
        .collect();
    GradedGraph::new(labels, edges)
}

/// Path of a dyadic word through the Pascal graph: digit `i` picks the
/// append-`digit` edge at level `i`.
pub fn pascal_path(graph: &GradedGraph, w: &DigitWord) -> Result<GraphPath, Error> {
    if !w.is_dyadic() {
        return Err(Error::NonDyadic {
            context: "pascal graph encoding",
        });
    }
    decode_path(graph, w)
}

/// Inverse of [`pascal_path`].
pub fn pascal_word(graph: &GradedGraph, path: &GraphPath) -> Result<DigitWord, Error> {
    encode_path(graph, path, 2)
}

/// One failed path of [`verify_induced_over_odometer`].
#[derive(Clone, Debug)]
pub struct InducedFailure {
    pub path: String,
    pub successor: String,
    pub reason: String,
}

/// Result of [`verify_induced_over_odometer`].
#[derive(Clone, Debug)]
pub struct InducedCheck {
    pub pass: bool,
    pub radix: u32,
    pub window: usize,
    pub paths: usize,
    pub maximal_paths: usize,
    /// Multiset of observed successor offsets `j`.
    pub j_histogram: BTreeMap<BigUint, usize>,
    pub counterexamples: Vec<InducedFailure>,
}

/// Checks that the adic successor acts as `w -> w + j`, `j >= 1`, on the
/// radix-`p` encoding of height-`window` paths. Preconditions: single root,
/// out-degrees at most `p`, `window` within the graph.
pub fn verify_induced_over_odometer(
    graph: &GradedGraph,
    radix: u32,
    window: usize,
) -> Result<InducedCheck, Error> {
    if window < 1 {
        return Err(Error::WindowTooShort {
            len: window,
            min: 1,
        });
    }
    let graph = graph.prefix(window)?;
    graph.root()?;
    let observed = graph.max_out_degree();
    if observed > radix as usize {
        return Err(Error::OutDegreeExceeded { observed, radix });
    }
    let paths = all_paths(&graph);
    let mut check = InducedCheck {
        pass: true,
        radix,
        window,
        paths: paths.len(),
        maximal_paths: 0,
        j_histogram: BTreeMap::new(),
        counterexamples: Vec::new(),
    };
    for path in &paths {
        let word = encode_path(&graph, path, radix)?;
        match adic_successor(&graph, path)? {
            Successor::Maximal => check.maximal_paths += 1,
            Successor::Next(next) => {
                let next_word = encode_path(&graph, &next, radix)?;
                let (value, next_value) = (word.value(), next_word.value());
                if next_value > value {
                    let j = next_value - value;
                    debug_assert_eq!(
                        add_natural(&word, &j),
                        Windowed::Determined(next_word.clone())
                    );
                    *check.j_histogram.entry(j).or_insert(0) += 1;
                } else {
                    check.pass = false;
                    check.counterexamples.push(InducedFailure {
                        path: word.to_string(),
                        successor: next_word.to_string(),
                        reason: "successor does not advance the odometer encoding".into(),
                    });
                }
            }
        }
    }
    Ok(check)
}
