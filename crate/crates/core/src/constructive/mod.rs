//! Constructive colourings of `C_n^k`.
//!
//! For `c <= k` a scheme is *good* when
//!
//! 1. no `(c+1)`-clique drew one list on every vertex,
//! 2. a family of disjoint runs of `k + 1` vertices exists, each with lists
//!    disjoint from the `2k` lists around it, consecutive runs at most
//!    `n^(1/d)` vertices apart, and
//! 3. every short run `U` has `|X| <= |N(X)|` for all `X ⊂ U`, `|X| >= c+2`.
//!
//! Good schemes are coloured piecewise: each isolated `(k+1)`-run on its own,
//! then each stretch between them by a near-perfect vertex/colour matching
//! patched at its single defect.
//!
//! For `c = k + 1` and `s = k + 2` see [`gadget`].

pub mod gadget;
pub mod matching;

use serde::{Deserialize, Serialize};

use crate::circulant::{Clique, CyclePower, VertexId};
use crate::error::{Error, Result};
use crate::scheme::{identical_list_cliques, lists_disjoint, Colour, ColourScheme, ListAssignment};
use crate::solver::{verify_colouring, Colouring};

pub use gadget::{find_gadget, gadget_colouring, gadget_len, gadget_window_matches};
use matching::{
    deficiency, deficient_set_from, max_matching, maximal_deficient_set, ListBipartiteGraph,
};

/// Spacing exponent `d`: chosen `(k+1)`-runs may be at most `n^(1/d)`
/// vertices apart, and Condition 3 is asked of runs that short.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GoodSchemeConfig {
    pub d: f64,
}

impl GoodSchemeConfig {
    /// `c^2 (c^2 + c - 1) / (c - 1)`, the threshold `d` must exceed for the
    /// asymptotic argument; undefined for `c = 1`.
    pub fn d_threshold(c: usize) -> Option<f64> {
        if c < 2 {
            return None;
        }
        let c = c as f64;
        Some(c * c * (c * c + c - 1.0) / (c - 1.0))
    }

    /// Default: one more than [`GoodSchemeConfig::d_threshold`].
    pub fn faithful(c: usize) -> Result<Self> {
        Self::d_threshold(c)
            .map(|t| Self { d: t + 1.0 })
            .ok_or_else(|| {
                Error::OutOfRegime(
                    "no default spacing exponent for c = 1 (colouring is forced)".into(),
                )
            })
    }

    pub fn with_d(d: f64) -> Result<Self> {
        if d.is_finite() && d > 0.0 {
            Ok(Self { d })
        } else {
            Err(Error::OutOfRegime(format!(
                "spacing exponent must be positive, got {d}"
            )))
        }
    }

    /// `floor(n^(1/d))`.
    pub fn max_gap(&self, n: usize) -> usize {
        let g = (n as f64).powf(1.0 / self.d);
        // guard against 4.999999 for exact powers
        let r = g.round();
        if (g - r).abs() < 1e-9 {
            r as usize
        } else {
            g.floor() as usize
        }
    }
}

/// Start vertices of the chosen `(k+1)`-runs, in cycle order from the first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct K1SetFamily {
    pub starts: Vec<VertexId>,
    /// Largest number of vertices strictly between consecutive runs,
    /// including the wrap from the last run back to the first.
    pub max_gap: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoodSchemeReport {
    pub condition1_ok: bool,
    pub violating_cliques: Vec<Clique>,
    pub condition2_ok: bool,
    pub family: Option<K1SetFamily>,
    pub max_gap_allowed: usize,
    pub condition3_ok: bool,
    /// First run found violating Condition 3.
    pub condition3_violation: Option<Vec<VertexId>>,
    pub is_good: bool,
}

fn require_low_regime(g: &CyclePower, scheme: &ColourScheme) -> Result<()> {
    scheme.check_size(g)?;
    if scheme.c() > g.k() {
        return Err(Error::OutOfRegime(format!(
            "good-scheme machinery needs c <= k (got c = {}, k = {})",
            scheme.c(),
            g.k()
        )));
    }
    Ok(())
}

/// Condition 1, with the violating cliques.
pub fn check_condition1(g: &CyclePower, scheme: &ColourScheme) -> Result<(bool, Vec<Clique>)> {
    require_low_regime(g, scheme)?;
    let bad = identical_list_cliques(g, scheme);
    Ok((bad.is_empty(), bad))
}

/// Whether the run `p..=p+k` has lists disjoint from the `k` lists on each
/// side of it.
pub fn is_isolated_run(g: &CyclePower, scheme: &ColourScheme, p: VertexId) -> bool {
    let k = g.k();
    let run: Vec<VertexId> = (0..=k).map(|i| g.shift(p, i)).collect();
    let around: Vec<VertexId> = (1..=k)
        .map(|i| g.shift_back(p, i))
        .chain((1..=k).map(|i| g.shift(p, k + i)))
        .collect();
    lists_disjoint(scheme, &run, &around)
}

/// Greedy search for a Condition 2 family.
///
/// Starts at the first isolated run and repeatedly jumps to the farthest
/// isolated run that begins within `n^(1/d)` vertices of the previous one's
/// end, until the cycle closes within the same bound.
pub fn find_k1_set_family(
    g: &CyclePower,
    scheme: &ColourScheme,
    config: &GoodSchemeConfig,
) -> Result<Option<K1SetFamily>> {
    scheme.check_size(g)?;
    let (n, k) = (g.n(), g.k());
    if n < 3 * k + 2 {
        return Err(Error::OutOfRegime(format!(
            "need n >= 3k + 2 = {} to place a (k+1)-run and its neighbours",
            3 * k + 2
        )));
    }
    let gap = config.max_gap(n);
    let isolated: Vec<bool> = (0..n).map(|p| is_isolated_run(g, scheme, p)).collect();
    let Some(first) = isolated.iter().position(|&b| b) else {
        return Ok(None);
    };
    // unrolled coordinates: runs live in [first, first + n)
    let limit = first + n;
    let mut starts = vec![first];
    let mut end = first + k;
    let mut max_gap = 0;
    loop {
        let closing = limit - (end + 1);
        if closing <= gap {
            max_gap = max_gap.max(closing);
            break;
        }
        let lo = end + 1;
        let hi = (lo + gap).min(limit - 1 - k);
        let next = (lo..=hi).rev().find(|&q| isolated[q % n]);
        match next {
            Some(q) => {
                max_gap = max_gap.max(q - lo);
                starts.push(q);
                end = q + k;
            }
            None => return Ok(None),
        }
    }
    Ok(Some(K1SetFamily {
        starts: starts.into_iter().map(|q| q % n).collect(),
        max_gap,
    }))
}

/// Condition 3 on one run of vertices, decided through matching deficiency:
/// zero passes, two or more fails, and at exactly one the run passes iff the
/// largest deficient set has only `c + 1` vertices (which then share one
/// list). Every deficient set lies inside that largest one, so this is the
/// same verdict as checking all subsets.
pub fn check_condition3(scheme: &ColourScheme, segment: &[VertexId]) -> bool {
    let h = ListBipartiteGraph::new(scheme, segment);
    let m = max_matching(&h);
    match deficiency(&h, &m) {
        0 => true,
        1 => maximal_deficient_set(&h, &m).len() <= scheme.c() + 1,
        _ => false,
    }
}

/// Evaluates Conditions 1-3.
///
/// With a family in hand, Condition 3 is checked on each chosen run and on
/// each stretch between consecutive runs. Without one it is checked on every
/// window of `floor(n^(1/d))` consecutive vertices.
pub fn is_good_scheme(
    g: &CyclePower,
    scheme: &ColourScheme,
    config: &GoodSchemeConfig,
) -> Result<GoodSchemeReport> {
    let (condition1_ok, violating_cliques) = check_condition1(g, scheme)?;
    let family = find_k1_set_family(g, scheme, config)?;
    let max_gap_allowed = config.max_gap(g.n());
    let pieces: Vec<Vec<VertexId>> = match &family {
        Some(f) => family_pieces(g, f),
        None => {
            let len = max_gap_allowed.min(g.n());
            if len < scheme.c() + 2 {
                Vec::new()
            } else {
                let windows = if len == g.n() { 1 } else { g.n() };
                (0..windows)
                    .map(|p| g.segment(p, len).expect("len <= n"))
                    .collect()
            }
        }
    };
    let condition3_violation = pieces
        .into_iter()
        .find(|piece| !check_condition3(scheme, piece));
    let condition2_ok = family.is_some();
    let condition3_ok = condition3_violation.is_none();
    Ok(GoodSchemeReport {
        condition1_ok,
        violating_cliques,
        condition2_ok,
        family,
        max_gap_allowed,
        condition3_ok,
        condition3_violation,
        is_good: condition1_ok && condition2_ok && condition3_ok,
    })
}

/// The chosen runs followed by the (nonempty) stretches between them.
fn family_pieces(g: &CyclePower, family: &K1SetFamily) -> Vec<Vec<VertexId>> {
    let k = g.k();
    let runs = family
        .starts
        .iter()
        .map(|&p| g.segment(p, k + 1).expect("k + 1 <= n"));
    let stretches = family.starts.iter().enumerate().filter_map(|(i, &p)| {
        let next = family.starts[(i + 1) % family.starts.len()];
        let from = g.shift(p, k + 1);
        let len = (next + g.n() - from) % g.n();
        (len > 0).then(|| g.segment(from, len).expect("stretch fits"))
    });
    runs.chain(stretches).collect()
}

/// Colours a run of vertices from their lists minus `forbidden[i]` (for
/// `segment[i]`), all colours distinct except possibly one pair of
/// non-adjacent vertices.
///
/// A maximum matching saturating the run is used as is. With one vertex left
/// over, some deficient set `X` holds it; two non-adjacent members of `X`
/// are given a shared colour and the rest is matched again. Returns `None`
/// when no such repair exists, never an improper colouring.
pub fn colour_segment(
    g: &CyclePower,
    scheme: &ColourScheme,
    segment: &[VertexId],
    forbidden: &[Vec<Colour>],
) -> Option<Vec<Colour>> {
    assert_eq!(segment.len(), forbidden.len());
    let effective: Vec<Vec<Colour>> = segment
        .iter()
        .zip(forbidden)
        .map(|(&v, bad)| {
            scheme
                .list(v)
                .iter()
                .copied()
                .filter(|x| !bad.contains(x))
                .collect()
        })
        .collect();
    let h = ListBipartiteGraph::from_lists(segment, &effective);
    let m = max_matching(&h);
    let colours = match deficiency(&h, &m) {
        0 => {
            let mut out = vec![0; segment.len()];
            for (i, slot) in out.iter_mut().enumerate() {
                *slot = h.colours()[m.mate_of_left(i).expect("perfect")];
            }
            Some(out)
        }
        1 => {
            let u = m.unsaturated()[0];
            let holder = deficient_set_from(&h, &m, u);
            repair_with_shared_colour(g, segment, &effective, &holder)
        }
        _ => None,
    }?;
    let proper = (0..segment.len()).all(|i| {
        effective[i].contains(&colours[i])
            && (i + 1..segment.len())
                .all(|j| colours[i] != colours[j] || !g.adjacent(segment[i], segment[j]))
    });
    proper.then_some(colours)
}

fn repair_with_shared_colour(
    g: &CyclePower,
    segment: &[VertexId],
    effective: &[Vec<Colour>],
    holder: &[usize],
) -> Option<Vec<Colour>> {
    for (ai, &a) in holder.iter().enumerate() {
        for &b in &holder[ai + 1..] {
            if segment[a] == segment[b] || g.adjacent(segment[a], segment[b]) {
                continue;
            }
            for &x in effective[a].iter().filter(|x| effective[b].contains(x)) {
                let rest: Vec<usize> = (0..segment.len()).filter(|&i| i != a && i != b).collect();
                let rest_vertices: Vec<VertexId> = rest.iter().map(|&i| segment[i]).collect();
                let rest_lists: Vec<Vec<Colour>> = rest
                    .iter()
                    .map(|&i| effective[i].iter().copied().filter(|&y| y != x).collect())
                    .collect();
                let h = ListBipartiteGraph::from_lists(&rest_vertices, &rest_lists);
                let m = max_matching(&h);
                if m.size() == rest.len() {
                    let mut out = vec![0; segment.len()];
                    out[a] = x;
                    out[b] = x;
                    for (r, &i) in rest.iter().enumerate() {
                        out[i] = h.colours()[m.mate_of_left(r).expect("perfect")];
                    }
                    return Some(out);
                }
            }
        }
    }
    None
}

/// Colours a good scheme piecewise; `Ok(None)` if the scheme is not good.
pub fn constructive_colouring(
    g: &CyclePower,
    scheme: &ColourScheme,
    config: &GoodSchemeConfig,
) -> Result<Option<Colouring>> {
    let report = is_good_scheme(g, scheme, config)?;
    if !report.is_good {
        return Ok(None);
    }
    let family = report.family.expect("good implies a family");
    let mut partial: Vec<Option<Colour>> = vec![None; g.n()];
    for piece in family_pieces(g, &family) {
        let forbidden: Vec<Vec<Colour>> = piece
            .iter()
            .map(|&v| {
                g.neighbours(v)
                    .into_iter()
                    .filter_map(|u| partial[u])
                    .collect()
            })
            .collect();
        let Some(colours) = colour_segment(g, scheme, &piece, &forbidden) else {
            return Ok(None);
        };
        for (&v, x) in piece.iter().zip(colours) {
            partial[v] = Some(x);
        }
    }
    let Some(assignment) = partial.into_iter().collect::<Option<Vec<_>>>() else {
        return Ok(None);
    };
    let col = Colouring::new(assignment);
    Ok(verify_colouring(g, scheme, &col).then_some(col))
}

/// Extends `partial` along `order`, giving each uncoloured vertex the least
/// colour of its list not already used by a coloured neighbour. `None` if
/// some vertex has no such colour or a vertex is still uncoloured at the end.
pub fn greedy_extend<L: ListAssignment + ?Sized>(
    g: &CyclePower,
    lists: &L,
    partial: &[Option<Colour>],
    order: &[VertexId],
) -> Option<Colouring> {
    let mut col = partial.to_vec();
    if col.len() != g.n() {
        return None;
    }
    let nbrs_per_vertex = |v: VertexId| g.neighbours(v);
    for &v in order {
        if col[v].is_some() {
            continue;
        }
        let used: Vec<Colour> = nbrs_per_vertex(v)
            .into_iter()
            .filter_map(|u| col[u])
            .collect();
        col[v] = Some(*lists.list(v).iter().find(|x| !used.contains(x))?);
    }
    let col = Colouring::new(col.into_iter().collect::<Option<Vec<_>>>()?);
    verify_colouring(g, lists, &col).then_some(col)
}
