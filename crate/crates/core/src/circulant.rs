//! Arithmetic model of the cycle power `C_n^k`.
//!
//! Vertices are `0..n` in cycle order and `u ~ v` iff their cyclic distance
//! lies in `1..=k`. Nothing is materialized: adjacency, neighbourhoods and
//! runs of consecutive vertices are all computed on demand.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of a vertex of a [`CyclePower`], always in `0..n`.
pub type VertexId = usize;

/// The `k`-th power of the cycle on `n` vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CyclePower {
    n: usize,
    k: usize,
}

/// A set of pairwise adjacent vertices, stored sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Clique {
    pub vertices: Vec<VertexId>,
}

impl CyclePower {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n < 3 || k < 1 {
            return Err(Error::InvalidGraph { n, k });
        }
        Ok(Self { n, k })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    /// `C_n^k` is complete once every pair is within distance `k`.
    #[inline]
    pub fn is_complete(&self) -> bool {
        self.n <= 2 * self.k + 1
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange {
                vertex: v,
                n: self.n,
            })
        }
    }

    /// Cyclic distance `min((u - v) mod n, (v - u) mod n)`.
    #[inline]
    pub fn distance(&self, u: VertexId, v: VertexId) -> usize {
        let d = u.abs_diff(v);
        d.min(self.n - d)
    }

    #[inline]
    pub fn adjacent(&self, u: VertexId, v: VertexId) -> bool {
        let d = self.distance(u, v);
        d >= 1 && d <= self.k
    }

    /// `v + offset (mod n)`.
    #[inline]
    pub fn shift(&self, v: VertexId, offset: usize) -> VertexId {
        (v + offset % self.n) % self.n
    }

    /// `v - offset (mod n)`.
    #[inline]
    pub fn shift_back(&self, v: VertexId, offset: usize) -> VertexId {
        (v + self.n - offset % self.n) % self.n
    }

    pub fn degree(&self) -> usize {
        (2 * self.k).min(self.n - 1)
    }

    /// Neighbours of `v`, each listed once, in increasing forward offset
    /// followed by increasing backward offset.
    pub fn neighbours(&self, v: VertexId) -> Vec<VertexId> {
        let mut out = Vec::with_capacity(self.degree());
        let reach = self.k.min(self.n - 1);
        for d in 1..=reach {
            out.push(self.shift(v, d));
        }
        for d in 1..=reach {
            let u = self.shift_back(v, d);
            if !out.contains(&u) {
                out.push(u);
            }
        }
        out
    }

    /// The run `start, start + 1, ..., start + length - 1` (mod n).
    pub fn segment(&self, start: VertexId, length: usize) -> Result<Vec<VertexId>> {
        self.check_vertex(start)?;
        if length > self.n {
            return Err(Error::SegmentTooLong { length, n: self.n });
        }
        Ok((0..length).map(|i| self.shift(start, i)).collect())
    }

    /// Whether every clique of `size` vertices lies inside a window of `k + 1`
    /// consecutive vertices, so that it can be named by its leftmost vertex.
    ///
    /// Edges (size 2) only need `n >= 2k + 1`. Larger cliques can wrap all the
    /// way around the cycle while `n <= 3k` (for example `{0, 3, 6}` in
    /// `C_8^3`), so the window description needs `n >= 3k + 1`.
    pub fn cliques_are_windowed(&self, size: usize) -> bool {
        match size {
            0 | 1 => true,
            2 => self.n > 2 * self.k,
            _ => self.n > 3 * self.k,
        }
    }

    /// Every clique with exactly `size` vertices, each once.
    ///
    /// When cliques are windowed the order is by leftmost vertex and then by
    /// the lexicographic order of the forward offsets; otherwise the cliques
    /// come out in lexicographic order of their sorted vertex lists.
    pub fn enumerate_cliques(&self, size: usize) -> Result<Vec<Clique>> {
        if size < 2 {
            return Err(Error::OutOfRegime(format!(
                "clique size must be at least 2 (got {size})"
            )));
        }
        if size > self.n {
            return Ok(Vec::new());
        }
        if self.cliques_are_windowed(size) {
            Ok(self.windowed_cliques(size))
        } else {
            Ok(self.generic_cliques(size))
        }
    }

    fn windowed_cliques(&self, size: usize) -> Vec<Clique> {
        let mut out = Vec::new();
        if size > self.k + 1 {
            return out;
        }
        let mut offsets = Vec::with_capacity(size - 1);
        for v in 0..self.n {
            for_each_combination(self.k, size - 1, &mut offsets, &mut |offs| {
                let mut vertices = Vec::with_capacity(size);
                vertices.push(v);
                vertices.extend(offs.iter().map(|&o| self.shift(v, o + 1)));
                vertices.sort_unstable();
                out.push(Clique { vertices });
            });
        }
        out
    }

    fn generic_cliques(&self, size: usize) -> Vec<Clique> {
        fn extend(
            g: &CyclePower,
            size: usize,
            next: VertexId,
            current: &mut Vec<VertexId>,
            out: &mut Vec<Clique>,
        ) {
            if current.len() == size {
                out.push(Clique {
                    vertices: current.clone(),
                });
                return;
            }
            for v in next..g.n {
                if current.iter().all(|&u| g.adjacent(u, v)) {
                    current.push(v);
                    extend(g, size, v + 1, current, out);
                    current.pop();
                }
            }
        }
        let mut out = Vec::new();
        extend(self, size, 0, &mut Vec::with_capacity(size), &mut out);
        out
    }
}

impl Clique {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_clique_in(&self, g: &CyclePower) -> bool {
        self.vertices.iter().enumerate().all(|(i, &u)| {
            self.vertices[i + 1..]
                .iter()
                .all(|&v| u < g.n() && v < g.n() && g.adjacent(u, v))
        })
    }
}

/// Calls `f` with every `r`-subset of `0..m` in lexicographic order.
pub(crate) fn for_each_combination(
    m: usize,
    r: usize,
    buf: &mut Vec<usize>,
    f: &mut dyn FnMut(&[usize]),
) {
    fn rec(m: usize, r: usize, from: usize, buf: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if buf.len() == r {
            f(buf);
            return;
        }
        let remaining = r - buf.len();
        for i in from..=(m - remaining) {
            buf.push(i);
            rec(m, r, i + 1, buf, f);
            buf.pop();
        }
    }
    buf.clear();
    if r > m {
        return;
    }
    rec(m, r, 0, buf, f);
}

/// `C(m, r)` as an exact integer; saturates at `u64::MAX`.
pub fn binomial(m: u64, r: u64) -> u64 {
    if r > m {
        return 0;
    }
    let r = r.min(m - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc * u128::from(m - i) / u128::from(i + 1);
        if acc > u128::from(u64::MAX) {
            return u64::MAX;
        }
    }
    acc as u64
}
