//! Vertex/colour bipartite graphs and maximum matchings (Hopcroft-Karp).
//!
//! Left side: a run of vertices. Right side: the colours of their lists.
//! A matching assigns distinct colours to distinct vertices, so a matching
//! that saturates the left side is a proper colouring of any graph on it.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::circulant::VertexId;
use crate::scheme::{Colour, ListAssignment};

/// Bipartite graph `H_L`: `(v, x)` is an edge iff `x` is in the (possibly
/// restricted) list of `v`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ListBipartiteGraph {
    left: Vec<VertexId>,
    colours: Vec<Colour>,
    /// `adj[i]` indexes into `colours`, ascending.
    adj: Vec<Vec<usize>>,
}

/// A set of vertex/colour pairs sharing no endpoint, held as mate arrays
/// over the indices of a [`ListBipartiteGraph`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matching {
    left_mate: Vec<Option<usize>>,
    right_mate: Vec<Option<usize>>,
}

impl ListBipartiteGraph {
    pub fn new<L: ListAssignment + ?Sized>(lists: &L, vertices: &[VertexId]) -> Self {
        Self::build(vertices, |i| lists.list(vertices[i]).to_vec())
    }

    /// Like [`ListBipartiteGraph::new`] but with `forbidden[i]` removed from
    /// the list of `vertices[i]`.
    pub fn with_forbidden<L: ListAssignment + ?Sized>(
        lists: &L,
        vertices: &[VertexId],
        forbidden: &[Vec<Colour>],
    ) -> Self {
        debug_assert_eq!(vertices.len(), forbidden.len());
        Self::build(vertices, |i| {
            lists
                .list(vertices[i])
                .iter()
                .copied()
                .filter(|x| !forbidden[i].contains(x))
                .collect()
        })
    }

    /// From explicit per-vertex lists (`lists[i]` belongs to `vertices[i]`).
    pub fn from_lists(vertices: &[VertexId], lists: &[Vec<Colour>]) -> Self {
        Self::build(vertices, |i| lists[i].clone())
    }

    fn build(vertices: &[VertexId], list_of: impl Fn(usize) -> Vec<Colour>) -> Self {
        let raw: Vec<Vec<Colour>> = (0..vertices.len()).map(list_of).collect();
        let mut colours: Vec<Colour> = raw.iter().flatten().copied().collect();
        colours.sort_unstable();
        colours.dedup();
        let adj = raw
            .iter()
            .map(|list| {
                let mut idx: Vec<usize> = list
                    .iter()
                    .map(|x| colours.binary_search(x).expect("colour collected above"))
                    .collect();
                idx.sort_unstable();
                idx.dedup();
                idx
            })
            .collect();
        Self {
            left: vertices.to_vec(),
            colours,
            adj,
        }
    }

    pub fn left(&self) -> &[VertexId] {
        &self.left
    }

    pub fn colours(&self) -> &[Colour] {
        &self.colours
    }

    /// Colour indices adjacent to left index `i`.
    pub fn neighbours(&self, i: usize) -> &[usize] {
        &self.adj[i]
    }

    pub fn left_len(&self) -> usize {
        self.left.len()
    }

    pub fn right_len(&self) -> usize {
        self.colours.len()
    }

    fn right_adjacency(&self) -> Vec<Vec<usize>> {
        let mut radj = vec![Vec::new(); self.colours.len()];
        for (i, nbrs) in self.adj.iter().enumerate() {
            for &j in nbrs {
                radj[j].push(i);
            }
        }
        radj
    }
}

impl Matching {
    pub fn empty(h: &ListBipartiteGraph) -> Self {
        Self {
            left_mate: vec![None; h.left_len()],
            right_mate: vec![None; h.right_len()],
        }
    }

    pub fn size(&self) -> usize {
        self.left_mate.iter().flatten().count()
    }

    /// Colour index matched to left index `i`.
    pub fn mate_of_left(&self, i: usize) -> Option<usize> {
        self.left_mate[i]
    }

    pub fn mate_of_right(&self, j: usize) -> Option<usize> {
        self.right_mate[j]
    }

    /// Left indices left unsaturated, ascending.
    pub fn unsaturated(&self) -> Vec<usize> {
        (0..self.left_mate.len())
            .filter(|&i| self.left_mate[i].is_none())
            .collect()
    }

    /// Matched `(vertex, colour)` pairs in left order.
    pub fn pairs(&self, h: &ListBipartiteGraph) -> Vec<(VertexId, Colour)> {
        self.left_mate
            .iter()
            .enumerate()
            .filter_map(|(i, m)| m.map(|j| (h.left[i], h.colours[j])))
            .collect()
    }

    /// Every pair is an edge and no endpoint repeats.
    pub fn is_valid_for(&self, h: &ListBipartiteGraph) -> bool {
        if self.left_mate.len() != h.left_len() || self.right_mate.len() != h.right_len() {
            return false;
        }
        self.left_mate.iter().enumerate().all(|(i, m)| match m {
            None => true,
            Some(j) => h.adj[i].contains(j) && self.right_mate[*j] == Some(i),
        }) && self
            .right_mate
            .iter()
            .enumerate()
            .all(|(j, m)| m.is_none_or(|i| self.left_mate[i] == Some(j)))
    }
}

/// Maximum-cardinality matching by Hopcroft-Karp. Deterministic: phases scan
/// left vertices in index order and edges in ascending colour order.
pub fn max_matching(h: &ListBipartiteGraph) -> Matching {
    let nl = h.left_len();
    let mut m = Matching::empty(h);
    let mut dist = vec![usize::MAX; nl];
    loop {
        // BFS layering from free left vertices.
        let mut queue = VecDeque::new();
        for (i, d) in dist.iter_mut().enumerate() {
            if m.left_mate[i].is_none() {
                *d = 0;
                queue.push_back(i);
            } else {
                *d = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(i) = queue.pop_front() {
            for &j in &h.adj[i] {
                match m.right_mate[j] {
                    None => found = true,
                    Some(i2) if dist[i2] == usize::MAX => {
                        dist[i2] = dist[i] + 1;
                        queue.push_back(i2);
                    }
                    Some(_) => {}
                }
            }
        }
        if !found {
            break;
        }
        let mut augmented = false;
        for i in 0..nl {
            if m.left_mate[i].is_none() && augment(h, &mut m, &mut dist, i) {
                augmented = true;
            }
        }
        if !augmented {
            break;
        }
    }
    m
}

fn augment(h: &ListBipartiteGraph, m: &mut Matching, dist: &mut [usize], i: usize) -> bool {
    for &j in &h.adj[i] {
        let ok = match m.right_mate[j] {
            None => true,
            Some(i2) => dist[i2] == dist[i] + 1 && augment(h, m, dist, i2),
        };
        if ok {
            m.left_mate[i] = Some(j);
            m.right_mate[j] = Some(i);
            return true;
        }
    }
    dist[i] = usize::MAX;
    false
}

/// `|left| - |maximum matching|`, i.e. `max_X (|X| - |N(X)|)` over left sets.
pub fn deficiency(h: &ListBipartiteGraph, m: &Matching) -> usize {
    h.left_len() - m.size()
}

/// The largest left set `X` attaining the deficiency: every left vertex not
/// reachable by an alternating path from an unmatched colour. `m` must be
/// maximum. Returned ascending.
pub fn maximal_deficient_set(h: &ListBipartiteGraph, m: &Matching) -> Vec<usize> {
    let radj = h.right_adjacency();
    let mut left_seen = vec![false; h.left_len()];
    let mut right_seen = vec![false; h.right_len()];
    let mut stack: Vec<usize> = (0..h.right_len())
        .filter(|&j| m.right_mate[j].is_none())
        .collect();
    for &j in &stack {
        right_seen[j] = true;
    }
    while let Some(j) = stack.pop() {
        for &i in &radj[j] {
            if left_seen[i] || m.left_mate[i] == Some(j) {
                continue;
            }
            left_seen[i] = true;
            if let Some(j2) = m.left_mate[i] {
                if !right_seen[j2] {
                    right_seen[j2] = true;
                    stack.push(j2);
                }
            }
        }
    }
    (0..h.left_len()).filter(|&i| !left_seen[i]).collect()
}

/// The left vertices reachable from the unsaturated left vertex `u` along
/// alternating paths; with a maximum matching this is the smallest deficient
/// set containing `u`. Returned ascending.
pub fn deficient_set_from(h: &ListBipartiteGraph, m: &Matching, u: usize) -> Vec<usize> {
    let mut left_seen = vec![false; h.left_len()];
    let mut right_seen = vec![false; h.right_len()];
    left_seen[u] = true;
    let mut stack = vec![u];
    while let Some(i) = stack.pop() {
        for &j in &h.adj[i] {
            if right_seen[j] || m.left_mate[i] == Some(j) {
                continue;
            }
            right_seen[j] = true;
            if let Some(i2) = m.right_mate[j] {
                if !left_seen[i2] {
                    left_seen[i2] = true;
                    stack.push(i2);
                }
            }
        }
    }
    (0..h.left_len()).filter(|&i| left_seen[i]).collect()
}

/// Colour indices adjacent to at least one left index in `set`.
pub fn neighbourhood(h: &ListBipartiteGraph, set: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = set.iter().flat_map(|&i| h.adj[i].iter().copied()).collect();
    out.sort_unstable();
    out.dedup();
    out
}
