//! Exact decision of list-colourability of `C_n^k`.
//!
//! The main route is a windowed dynamic program: a vertex only sees the `k`
//! vertices before it and the `k` after it, so once the colours of vertices
//! `0..k` are fixed, a forward pass whose state is the tuple of list indices
//! of the last `k` vertices decides whether the fixing extends around the
//! cycle. Vertices in the last `k` positions additionally check the fixed
//! colours they wrap around to. States are integers in base `b` (the longest
//! list length), digit `i` holding the index of the vertex `i + 1` steps back.
//!
//! Complete graphs (`n <= 2k + 1`) are systems of distinct representatives
//! and are decided by bipartite matching instead.

use serde::{Deserialize, Serialize};

use crate::circulant::{CyclePower, VertexId};
use crate::constructive::matching::{max_matching, ListBipartiteGraph};
use crate::error::{Error, Result};
use crate::scheme::{Colour, ColourScheme, ListAssignment, SchemeParams};

/// One colour per vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Colouring {
    pub assignment: Vec<Colour>,
}

impl Colouring {
    pub fn new(assignment: Vec<Colour>) -> Self {
        Self { assignment }
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn colour(&self, v: VertexId) -> Colour {
        self.assignment[v]
    }

    /// Space-separated colours, vertex order.
    pub fn to_line(&self) -> String {
        self.assignment
            .iter()
            .map(Colour::to_string)
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveOutcome {
    pub colourable: bool,
    pub witness: Option<Colouring>,
}

impl SolveOutcome {
    fn yes(witness: Colouring) -> Self {
        Self {
            colourable: true,
            witness: Some(witness),
        }
    }

    fn no() -> Self {
        Self {
            colourable: false,
            witness: None,
        }
    }
}

/// Exhaustive search refuses instances with more list selections than this.
pub const BRUTE_FORCE_LIMIT: f64 = 1e8;

fn check_lists<L: ListAssignment + ?Sized>(g: &CyclePower, lists: &L) -> Result<()> {
    if lists.num_vertices() != g.n() {
        return Err(Error::SizeMismatch {
            expected: g.n(),
            got: lists.num_vertices(),
        });
    }
    Ok(())
}

/// Decides whether `C_n^k` has a colouring from `lists`, with a witness.
///
/// On the dynamic-programming route the witness is the lexicographically
/// least colouring (vertex 0 first, lowest colour first).
pub fn decide_colourable<L: ListAssignment + ?Sized>(
    g: &CyclePower,
    lists: &L,
) -> Result<SolveOutcome> {
    check_lists(g, lists)?;
    if g.is_complete() {
        return Ok(solve_complete(g, lists));
    }
    Ok(match WindowDp::new(g, lists).run(true) {
        Some(w) => SolveOutcome::yes(w),
        None => SolveOutcome::no(),
    })
}

/// Verdict of [`decide_colourable`] without building a witness; this is the
/// Monte Carlo hot path and keeps only two layers of states.
pub fn is_colourable<L: ListAssignment + ?Sized>(g: &CyclePower, lists: &L) -> Result<bool> {
    check_lists(g, lists)?;
    if g.is_complete() {
        return Ok(solve_complete(g, lists).colourable);
    }
    Ok(WindowDp::new(g, lists).run(false).is_some())
}

fn solve_complete<L: ListAssignment + ?Sized>(g: &CyclePower, lists: &L) -> SolveOutcome {
    let vertices: Vec<VertexId> = (0..g.n()).collect();
    let h = ListBipartiteGraph::new(lists, &vertices);
    let m = max_matching(&h);
    if m.size() < g.n() {
        return SolveOutcome::no();
    }
    let mut assignment = vec![0; g.n()];
    for (v, colour) in m.pairs(&h) {
        assignment[v] = colour;
    }
    SolveOutcome::yes(Colouring::new(assignment))
}

struct WindowDp<'a, L: ListAssignment + ?Sized> {
    g: CyclePower,
    lists: &'a L,
    base: usize,
    /// `base^(k-1)`: dropping the oldest digit is `state % high`.
    high: usize,
    words: usize,
}

impl<'a, L: ListAssignment + ?Sized> WindowDp<'a, L> {
    fn new(g: &CyclePower, lists: &'a L) -> Self {
        let base = lists.max_list_len().max(1);
        let k = g.k() as u32;
        let states = base.pow(k);
        Self {
            g: *g,
            lists,
            base,
            high: base.pow(k - 1),
            words: states.div_ceil(64),
        }
    }

    #[inline]
    fn digit(&self, state: usize, i: usize) -> usize {
        (state / self.base.pow(i as u32)) % self.base
    }

    /// Colour of the vertex `i + 1` steps before `v` in `state`.
    #[inline]
    fn colour_back(&self, v: VertexId, state: usize, i: usize) -> Colour {
        self.lists.list(v - 1 - i)[self.digit(state, i)]
    }

    /// Tries fixings of vertices `0..k` in lexicographic order; returns the
    /// first that extends (with the least completion if `witness`).
    fn run(&self, witness: bool) -> Option<Colouring> {
        let k = self.g.k();
        if (0..self.g.n()).any(|v| self.lists.list(v).is_empty()) {
            return None;
        }
        let mut fixing = vec![0usize; k];
        loop {
            let colours: Vec<Colour> = (0..k).map(|v| self.lists.list(v)[fixing[v]]).collect();
            let proper = (0..k).all(|a| (a + 1..k).all(|b| colours[a] != colours[b]));
            if proper {
                if let Some(c) = self.extend(&fixing, &colours, witness) {
                    return Some(c);
                }
            }
            // next fixing, vertex k-1 varies fastest
            let mut pos = k;
            loop {
                if pos == 0 {
                    return None;
                }
                pos -= 1;
                fixing[pos] += 1;
                if fixing[pos] < self.lists.list(pos).len() {
                    break;
                }
                fixing[pos] = 0;
            }
        }
    }

    fn extend(&self, fixing: &[usize], fixed: &[Colour], witness: bool) -> Option<Colouring> {
        let (n, k) = (self.g.n(), self.g.k());
        let start = fixing.iter().enumerate().fold(0usize, |acc, (v, &idx)| {
            acc + idx * self.base.pow((k - 1 - v) as u32)
        });

        // layers[j] = reachable states after vertex k - 1 + j
        let mut layers: Vec<Vec<u64>> = Vec::new();
        let mut current = vec![0u64; self.words];
        set(&mut current, start);
        let mut next = vec![0u64; self.words];
        for v in k..n {
            next.iter_mut().for_each(|w| *w = 0);
            let mut any = false;
            for state in ones(&current) {
                for (x, &colour) in self.lists.list(v).iter().enumerate() {
                    if self.allowed(v, state, colour, fixed) {
                        set(&mut next, (state % self.high) * self.base + x);
                        any = true;
                    }
                }
            }
            if !any {
                return None;
            }
            if witness {
                layers.push(std::mem::replace(&mut current, next.clone()));
            } else {
                std::mem::swap(&mut current, &mut next);
            }
        }
        if !witness {
            return Some(Colouring::new(Vec::new()));
        }
        layers.push(current);
        Some(self.least_completion(fixed, layers))
    }

    #[inline]
    fn allowed(&self, v: VertexId, state: usize, colour: Colour, fixed: &[Colour]) -> bool {
        let (n, k) = (self.g.n(), self.g.k());
        if (0..k).any(|i| self.colour_back(v, state, i) == colour) {
            return false;
        }
        // v is adjacent to the fixed vertices u <= v + k - n
        if v + k >= n {
            let last = v + k - n;
            if fixed[..=last].contains(&colour) {
                return false;
            }
        }
        true
    }

    /// Prunes forward layers to states that reach the end, then walks
    /// forward taking the lowest list index that stays alive.
    fn least_completion(&self, fixed: &[Colour], mut layers: Vec<Vec<u64>>) -> Colouring {
        let (n, k) = (self.g.n(), self.g.k());
        for j in (0..layers.len() - 1).rev() {
            let v = k + j;
            let mut alive = vec![0u64; self.words];
            for state in ones(&layers[j]) {
                let ok = self.lists.list(v).iter().enumerate().any(|(x, &colour)| {
                    self.allowed(v, state, colour, fixed)
                        && get(&layers[j + 1], (state % self.high) * self.base + x)
                });
                if ok {
                    set(&mut alive, state);
                }
            }
            layers[j] = alive;
        }
        let mut assignment = fixed.to_vec();
        let mut state = ones(&layers[0])
            .next()
            .expect("start state survives pruning");
        for v in k..n {
            let j = v - k + 1;
            let (x, colour) = self
                .lists
                .list(v)
                .iter()
                .copied()
                .enumerate()
                .find(|&(x, colour)| {
                    self.allowed(v, state, colour, fixed)
                        && get(&layers[j], (state % self.high) * self.base + x)
                })
                .expect("alive state has an alive successor");
            assignment.push(colour);
            state = (state % self.high) * self.base + x;
        }
        Colouring::new(assignment)
    }
}

#[inline]
fn set(bits: &mut [u64], i: usize) {
    bits[i / 64] |= 1 << (i % 64);
}

#[inline]
fn get(bits: &[u64], i: usize) -> bool {
    bits[i / 64] >> (i % 64) & 1 == 1
}

fn ones(bits: &[u64]) -> impl Iterator<Item = usize> + '_ {
    bits.iter().enumerate().flat_map(|(w, &word)| {
        let mut word = word;
        std::iter::from_fn(move || {
            if word == 0 {
                return None;
            }
            let b = word.trailing_zeros() as usize;
            word &= word - 1;
            Some(w * 64 + b)
        })
    })
}

/// Exhaustive backtracking over list selections, vertex order, lowest colour
/// first. Only adjacency tests are used, so this is independent of the
/// window structure exploited by [`decide_colourable`].
pub fn brute_force_colourable<L: ListAssignment + ?Sized>(
    g: &CyclePower,
    lists: &L,
) -> Result<SolveOutcome> {
    check_lists(g, lists)?;
    let combinations: f64 = (0..g.n()).map(|v| lists.list(v).len() as f64).product();
    if combinations > BRUTE_FORCE_LIMIT {
        return Err(Error::InstanceTooLarge { combinations });
    }
    fn rec<L: ListAssignment + ?Sized>(
        g: &CyclePower,
        lists: &L,
        v: VertexId,
        assignment: &mut Vec<Colour>,
    ) -> bool {
        if v == g.n() {
            return true;
        }
        for &colour in lists.list(v) {
            let clash = (0..v).any(|u| g.adjacent(u, v) && assignment[u] == colour);
            if !clash {
                assignment.push(colour);
                if rec(g, lists, v + 1, assignment) {
                    return true;
                }
                assignment.pop();
            }
        }
        false
    }
    let mut assignment = Vec::with_capacity(g.n());
    Ok(if rec(g, lists, 0, &mut assignment) {
        SolveOutcome::yes(Colouring::new(assignment))
    } else {
        SolveOutcome::no()
    })
}

/// Every vertex coloured from its own list and no edge monochromatic.
pub fn verify_colouring<L: ListAssignment + ?Sized>(
    g: &CyclePower,
    lists: &L,
    col: &Colouring,
) -> bool {
    if col.len() != g.n() || lists.num_vertices() != g.n() {
        return false;
    }
    let from_lists = (0..g.n()).all(|v| lists.list(v).binary_search(&col.colour(v)).is_ok());
    let reach = g.k().min(g.n() - 1);
    from_lists
        && (0..g.n()).all(|u| (1..=reach).all(|d| col.colour(u) != col.colour(g.shift(u, d))))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChromaticFacts {
    pub chi: usize,
    /// `k + 1` if `(k + 1) | n`, else `k + 2`.
    pub predicted: usize,
    pub consistent: bool,
}

/// Computes `chi(C_n^k)` with the exact solver (all lists `{1..m}` for
/// increasing `m`) and compares with the divisibility rule, which holds for
/// `n >= k(k + 1)`; smaller `n` is refused.
pub fn chromatic_facts_check(g: &CyclePower) -> Result<ChromaticFacts> {
    let (n, k) = (g.n(), g.k());
    if n < k * (k + 1) {
        return Err(Error::OutOfRegime(format!(
            "the chromatic number rule needs n >= k(k+1) = {} (got n = {n})",
            k * (k + 1)
        )));
    }
    let predicted = if n % (k + 1) == 0 { k + 1 } else { k + 2 };
    let mut m = 1;
    let chi = loop {
        let palette: Vec<Colour> = (1..=m as Colour).collect();
        let scheme = ColourScheme::uniform(SchemeParams::new(m, m)?, n, &palette)?;
        if is_colourable(g, &scheme)? {
            break m;
        }
        m += 1;
    };
    Ok(ChromaticFacts {
        chi,
        predicted,
        consistent: chi == predicted,
    })
}
