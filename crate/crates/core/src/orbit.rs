//! Breadth-first enumeration of Hurwitz orbits.
//!
//! Vertices are canonical keys, so a sphere orbit is an orbit of
//! conjugacy classes of tuples. Each BFS level computes the neighbours of
//! its frontier in parallel and merges them sequentially in frontier
//! order, which makes the result independent of scheduling. After the
//! search, ids are reassigned: the root becomes 0 and the remaining
//! vertices follow in key order.

use std::fmt::Write as _;

use indexmap::IndexSet;
use rayon::prelude::*;
use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;
use thiserror::Error;

use crate::braid::{pure_braid_generator, BraidError, BraidWord};
use crate::canonical::{key, CanonicalKey};
use crate::hurwitz::{move_entries, Direction, Factorization, HurwitzError};

pub const DEFAULT_MAX_VERTICES: usize = 1_000_000;

const NO_EDGE: u32 = u32::MAX;

#[derive(Debug, Error)]
pub enum OrbitError {
    #[error("orbit enumeration needs at least 2 entries, found {0}")]
    TooFewStrands(usize),
    #[error("operation requires a complete orbit graph")]
    Incomplete,
    #[error("could not build worker pool: {0}")]
    ThreadPool(String),
    #[error(transparent)]
    Hurwitz(#[from] HurwitzError),
    #[error(transparent)]
    Braid(#[from] BraidError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrbitOptions {
    pub max_vertices: usize,
    /// Worker threads for frontier expansion; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Default for OrbitOptions {
    fn default() -> Self {
        Self {
            max_vertices: DEFAULT_MAX_VERTICES,
            threads: None,
        }
    }
}

impl OrbitOptions {
    pub fn with_max_vertices(max_vertices: usize) -> Self {
        Self {
            max_vertices,
            ..Self::default()
        }
    }
}

/// Orbit graph with edges `(v, i, ±) → w` for the generators `σᵢ^{±1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitGraph {
    strands: usize,
    keys: Vec<CanonicalKey>,
    /// Slot `v·2(n−1) + 2(i−1) + d` holds the target of `σᵢ` (`d = 0`) or
    /// `σᵢ⁻¹` (`d = 1`) applied to vertex `v`.
    edges: Vec<u32>,
    complete: bool,
}

fn slot(strands: usize, v: usize, i: usize, direction: Direction) -> usize {
    let d = match direction {
        Direction::Forward => 0,
        Direction::Inverse => 1,
    };
    v * 2 * (strands - 1) + 2 * (i - 1) + d
}

impl OrbitGraph {
    pub fn size(&self) -> usize {
        self.keys.len()
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    /// Id of the input factorization; `None` only for an empty graph.
    pub fn root(&self) -> Option<usize> {
        (!self.keys.is_empty()).then_some(0)
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn key(&self, v: usize) -> &CanonicalKey {
        &self.keys[v]
    }

    pub fn id_of(&self, k: &CanonicalKey) -> Option<usize> {
        if self.keys.first() == Some(k) {
            return Some(0);
        }
        self.keys.get(1..)?.binary_search(k).ok().map(|p| p + 1)
    }

    /// A factorization in the class of vertex `v`, rebuilt from its key.
    pub fn representative(&self, v: usize) -> Factorization {
        self.keys[v].decode().expect("orbit keys decode")
    }

    pub fn edge(&self, v: usize, i: usize, direction: Direction) -> Option<usize> {
        let t = self.edges[slot(self.strands, v, i, direction)];
        (t != NO_EDGE).then_some(t as usize)
    }

    /// All present edges as `(source, generator, direction, target)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, Direction, usize)> + '_ {
        (0..self.size()).flat_map(move |v| {
            (1..self.strands).flat_map(move |i| {
                [Direction::Forward, Direction::Inverse]
                    .into_iter()
                    .filter_map(move |d| self.edge(v, i, d).map(|w| (v, i, d, w)))
            })
        })
    }

    /// Every vertex has `n − 1` forward and `n − 1` inverse edges.
    pub fn satisfies_degree_criterion(&self) -> bool {
        self.edges.iter().all(|&t| t != NO_EDGE)
    }

    /// `(v, i, +) → w` exactly when `(w, i, −) → v`.
    pub fn is_symmetric(&self) -> bool {
        self.edges().all(|(v, i, d, w)| {
            let back = match d {
                Direction::Forward => Direction::Inverse,
                Direction::Inverse => Direction::Forward,
            };
            self.edge(w, i, back) == Some(v)
        })
    }
}

struct Neighbour {
    slot: usize,
    key: CanonicalKey,
    factorization: Factorization,
}

fn neighbours(f: &Factorization, v: usize) -> Vec<Neighbour> {
    let n = f.len();
    let mut out = Vec::with_capacity(2 * (n - 1));
    for i in 1..n {
        for direction in [Direction::Forward, Direction::Inverse] {
            let mut entries = f.entries().to_vec();
            move_entries(&mut entries, i, direction).expect("index in range");
            let g = f.sibling(entries);
            out.push(Neighbour {
                slot: slot(n, v, i, direction),
                key: key(&g),
                factorization: g,
            });
        }
    }
    out
}

pub fn enumerate(f: &Factorization, options: OrbitOptions) -> Result<OrbitGraph, OrbitError> {
    if f.len() < 2 {
        return Err(OrbitError::TooFewStrands(f.len()));
    }
    match options.threads {
        None => Ok(enumerate_in_pool(f, options.max_vertices)),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| OrbitError::ThreadPool(e.to_string()))
            .map(|pool| pool.install(|| enumerate_in_pool(f, options.max_vertices))),
    }
}

fn enumerate_in_pool(f: &Factorization, max_vertices: usize) -> OrbitGraph {
    let n = f.len();
    let per_vertex = 2 * (n - 1);
    let budget = max_vertices.min(NO_EDGE as usize);
    let mut vertices: IndexSet<CanonicalKey> = IndexSet::new();
    let mut edges: Vec<u32> = Vec::new();
    let mut complete = budget > 0;
    let mut frontier: Vec<(usize, Factorization)> = Vec::new();
    if complete {
        vertices.insert(key(f));
        edges.resize(per_vertex, NO_EDGE);
        frontier.push((0, f.clone()));
    }
    while !frontier.is_empty() {
        let expanded: Vec<Vec<Neighbour>> = frontier
            .par_iter()
            .map(|(v, g)| neighbours(g, *v))
            .collect();
        let mut next = Vec::new();
        for nb in expanded.into_iter().flatten() {
            let target = match vertices.get_index_of(&nb.key) {
                Some(w) => w,
                None if vertices.len() < budget => {
                    let (w, _) = vertices.insert_full(nb.key);
                    edges.resize(edges.len() + per_vertex, NO_EDGE);
                    next.push((w, nb.factorization));
                    w
                }
                None => {
                    complete = false;
                    continue;
                }
            };
            edges[nb.slot] = target as u32;
        }
        frontier = next;
    }
    finalize(n, vertices, edges, complete)
}

fn finalize(
    strands: usize,
    vertices: IndexSet<CanonicalKey>,
    edges: Vec<u32>,
    complete: bool,
) -> OrbitGraph {
    let mut keys: Vec<CanonicalKey> = vertices.into_iter().collect();
    let count = keys.len();
    if count == 0 {
        return OrbitGraph {
            strands,
            keys,
            edges,
            complete,
        };
    }
    let mut order: Vec<usize> = (1..count).collect();
    order.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
    order.insert(0, 0);
    let mut new_id = vec![0u32; count];
    for (new, &old) in order.iter().enumerate() {
        new_id[old] = new as u32;
    }
    let per_vertex = 2 * (strands - 1);
    let mut remapped = vec![NO_EDGE; edges.len()];
    for (old, chunk) in edges.chunks(per_vertex).enumerate() {
        let base = new_id[old] as usize * per_vertex;
        for (k, &t) in chunk.iter().enumerate() {
            if t != NO_EDGE {
                remapped[base + k] = new_id[t as usize];
            }
        }
    }
    let mut slots: Vec<Option<CanonicalKey>> = keys.drain(..).map(Some).collect();
    let keys = order
        .iter()
        .map(|&old| slots[old].take().expect("each id once"))
        .collect();
    OrbitGraph {
        strands,
        keys,
        edges: remapped,
        complete,
    }
}

/// Whether `b` fixes the class of `f` (exact tuple on a disk, conjugacy
/// class on a sphere).
pub fn stabilizes(f: &Factorization, b: &BraidWord) -> Result<bool, OrbitError> {
    Ok(key(&f.apply_braid(b)?) == key(f))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PureOrbit {
    pub size: usize,
    pub complete: bool,
}

/// Orbit size under the pure braid group, generated by the `Aᵢⱼ^{±1}`.
pub fn pure_orbit_size(f: &Factorization, max_vertices: usize) -> Result<PureOrbit, OrbitError> {
    let n = f.len();
    if n < 2 {
        return Err(OrbitError::TooFewStrands(n));
    }
    let mut generators = Vec::new();
    for i in 1..n {
        for j in i + 1..=n {
            let a = pure_braid_generator(i, j, n)?;
            generators.push(a.inverse());
            generators.push(a);
        }
    }
    if max_vertices == 0 {
        return Ok(PureOrbit {
            size: 0,
            complete: false,
        });
    }
    let mut seen: IndexSet<CanonicalKey> = IndexSet::new();
    seen.insert(key(f));
    let mut frontier = vec![f.clone()];
    let mut complete = true;
    while !frontier.is_empty() {
        let images: Vec<Vec<(CanonicalKey, Factorization)>> = frontier
            .par_iter()
            .map(|g| {
                generators
                    .iter()
                    .map(|b| {
                        let h = g.apply_braid(b).expect("strand count matches");
                        (key(&h), h)
                    })
                    .collect()
            })
            .collect();
        let mut next = Vec::new();
        for (k, h) in images.into_iter().flatten() {
            if seen.contains(&k) {
                continue;
            }
            if seen.len() >= max_vertices {
                complete = false;
                continue;
            }
            seen.insert(k);
            next.push(h);
        }
        frontier = next;
    }
    Ok(PureOrbit {
        size: seen.len(),
        complete,
    })
}

/// Number of vertices fixed by each `σᵢ`, indexed from `σ₁`.
pub fn fixed_point_stats(g: &OrbitGraph) -> Result<Vec<usize>, OrbitError> {
    if !g.is_complete() {
        return Err(OrbitError::Incomplete);
    }
    Ok((1..g.strands)
        .map(|i| {
            (0..g.size())
                .filter(|&v| g.edge(v, i, Direction::Forward) == Some(v))
                .count()
        })
        .collect())
}

/// DOT rendering with forward edges only; self-loops are left out.
pub fn export_dot(g: &OrbitGraph) -> String {
    let mut out = String::from("digraph orbit {\n");
    if !g.is_complete() {
        out.push_str("  // incomplete: vertex budget exhausted\n");
    }
    for v in 0..g.size() {
        let _ = writeln!(out, "  {v} [label=\"{v}\"];");
    }
    for (v, i, d, w) in g.edges() {
        if d == Direction::Forward && v != w {
            let _ = writeln!(out, "  {v} -> {w} [label=\"s{i}\"];");
        }
    }
    out.push_str("}\n");
    out
}

/// `{"size": …, "complete": …, "fixed": {"s1": …, …}}`; `fixed` is null
/// for an incomplete graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitSummary {
    pub size: usize,
    pub complete: bool,
    #[serde(serialize_with = "serialize_fixed")]
    pub fixed: Option<Vec<usize>>,
}

fn serialize_fixed<S: Serializer>(fixed: &Option<Vec<usize>>, s: S) -> Result<S::Ok, S::Error> {
    match fixed {
        None => s.serialize_none(),
        Some(counts) => {
            let mut map = s.serialize_map(Some(counts.len()))?;
            for (k, c) in counts.iter().enumerate() {
                map.serialize_entry(&format!("s{}", k + 1), c)?;
            }
            map.end()
        }
    }
}

pub fn summary(g: &OrbitGraph) -> OrbitSummary {
    OrbitSummary {
        size: g.size(),
        complete: g.is_complete(),
        fixed: fixed_point_stats(g).ok(),
    }
}
