//! Explicit colourings for `c = k + 1`, `s = k + 2` from a gadget window.
//!
//! A gadget is a window of `2[(k+1)^2 + (k+1)]` consecutive vertices cut into
//! `(k+1)`-runs: a head `F`, then pairs `(P_1, Q_1), ..., (P_{k+1}, Q_{k+1})`,
//! then a tail `E`. Its lists are `{1..k+1}` on `F`, `E` and every `Q_i`, and
//! `{1..k+2} \ {i}` on `P_i`. With lists of size `k + 1` from a palette of
//! `k + 2`, each list is named by the one colour it lacks, so up to a
//! relabelling of the palette a window is a gadget iff `F`, `E` and the `Q_i`
//! all lack one colour `a` while each `P_i` uniformly lacks a colour `b_i`,
//! with `a, b_1, ..., b_{k+1}` all distinct.

use crate::circulant::{CyclePower, VertexId};
use crate::error::{Error, Result};
use crate::scheme::{Colour, ColourScheme, RaggedLists};
use crate::solver::{verify_colouring, Colouring};

/// `2[(k+1)^2 + (k+1)]`.
pub fn gadget_len(k: usize) -> usize {
    2 * ((k + 1) * (k + 1) + (k + 1))
}

/// The colour of `{1..=s}` missing from `list` when `|list| = s - 1`.
fn missing(list: &[Colour], s: usize) -> Option<Colour> {
    if list.len() + 1 != s {
        return None;
    }
    (1..=s as Colour)
        .zip(list.iter().copied().chain(std::iter::once(0)))
        .find(|(want, have)| want != have)
        .map(|(want, _)| want)
}

/// Checks whether the window starting at `start` is a gadget.
///
/// Returns the relabelling as a table `canonical[x]` (index 0 unused) that
/// maps scheme colours to gadget colours. With `allow_relabel = false` only
/// the literal pattern matches and the table is the identity.
pub fn gadget_window_matches(
    g: &CyclePower,
    scheme: &ColourScheme,
    start: VertexId,
    allow_relabel: bool,
) -> Option<Vec<Colour>> {
    let k = g.k();
    let s = k + 2;
    if scheme.c() != k + 1 || scheme.s() != s || g.n() < gadget_len(k) {
        return None;
    }
    let run = k + 1;
    let lacks = |offset: usize| missing(scheme.list(g.shift(start, offset)), s);
    let uniform_lack = |from: usize| -> Option<Colour> {
        let a = lacks(from)?;
        (1..run).all(|j| lacks(from + j) == Some(a)).then_some(a)
    };
    let head = uniform_lack(0)?;
    if !allow_relabel && head != s as Colour {
        return None;
    }
    let mut canonical = vec![0 as Colour; s + 1];
    canonical[head as usize] = s as Colour;
    for i in 1..=run {
        let p_at = run + 2 * (i - 1) * run;
        let b = uniform_lack(p_at)?;
        if canonical[b as usize] != 0 || (!allow_relabel && b != i as Colour) {
            return None;
        }
        canonical[b as usize] = i as Colour;
        if uniform_lack(p_at + run)? != head {
            return None;
        }
    }
    let tail_at = run + 2 * run * run;
    if uniform_lack(tail_at)? != head {
        return None;
    }
    Some(canonical)
}

/// First gadget window in vertex order, with its relabelling.
pub fn find_gadget(g: &CyclePower, scheme: &ColourScheme) -> Option<(VertexId, Vec<Colour>)> {
    (0..g.n()).find_map(|p| gadget_window_matches(g, scheme, p, true).map(|t| (p, t)))
}

/// Colours `C_n^k` for `c = k + 1`, `s = k + 2` through the first gadget.
///
/// In gadget colours: `E` gets `1, ..., k+1` in order; the rest of the cycle
/// from `E` round to `F` is coloured greedily; then for each `i`, `P_i` starts
/// `1, ..., i-1, k+2` and is finished greedily, and `Q_i` starts `1, ..., i`
/// and copies `P_i` from there on. `Ok(None)` if no gadget exists.
pub fn gadget_colouring(g: &CyclePower, scheme: &ColourScheme) -> Result<Option<Colouring>> {
    scheme.check_size(g)?;
    let k = g.k();
    if scheme.c() != k + 1 || scheme.s() != k + 2 {
        return Err(Error::OutOfRegime(format!(
            "gadget colouring needs c = k + 1 and s = k + 2 (got c = {}, s = {}, k = {k})",
            scheme.c(),
            scheme.s()
        )));
    }
    let Some((start, canonical)) = find_gadget(g, scheme) else {
        return Ok(None);
    };
    let relabelled = RaggedLists::new(
        scheme
            .lists()
            .map(|l| l.iter().map(|&x| canonical[x as usize]).collect())
            .collect(),
    );
    let Some(col) = colour_from_gadget(g, &relabelled, start) else {
        return Ok(None);
    };
    let mut original = vec![0 as Colour; canonical.len()];
    for (x, &y) in canonical.iter().enumerate().skip(1) {
        original[y as usize] = x as Colour;
    }
    let col = Colouring::new(
        col.assignment
            .iter()
            .map(|&y| original[y as usize])
            .collect(),
    );
    Ok(verify_colouring(g, scheme, &col).then_some(col))
}

fn colour_from_gadget(g: &CyclePower, lists: &RaggedLists, start: VertexId) -> Option<Colouring> {
    let (n, k) = (g.n(), g.k());
    let run = k + 1;
    let len = gadget_len(k);
    let at = |offset: usize| g.shift(start, offset);
    let mut partial: Vec<Option<Colour>> = vec![None; n];

    let tail_at = run + 2 * run * run;
    for j in 0..run {
        partial[at(tail_at + j)] = Some(j as Colour + 1);
    }
    // outside the window, then the head
    let order: Vec<VertexId> = (len..n).chain(0..run).map(at).collect();
    let mut col = greedy_prefix(g, lists, partial, &order)?;

    for i in 1..=run {
        let p_at = run + 2 * (i - 1) * run;
        let q_at = p_at + run;
        for j in 0..i - 1 {
            col[at(p_at + j)] = Some(j as Colour + 1);
        }
        col[at(p_at + i - 1)] = Some(k as Colour + 2);
        let rest: Vec<VertexId> = (i..run).map(|j| at(p_at + j)).collect();
        col = greedy_prefix(g, lists, col, &rest)?;
        for j in 0..run {
            col[at(q_at + j)] = if j < i {
                Some(j as Colour + 1)
            } else {
                col[at(p_at + j)]
            };
        }
    }
    let full: Vec<Colour> = col.into_iter().collect::<Option<_>>()?;
    let col = Colouring::new(full);
    verify_colouring(g, lists, &col).then_some(col)
}

/// The greedy rule of [`super::greedy_extend`] along `order`, without
/// requiring a complete colouring at the end.
fn greedy_prefix(
    g: &CyclePower,
    lists: &RaggedLists,
    mut partial: Vec<Option<Colour>>,
    order: &[VertexId],
) -> Option<Vec<Option<Colour>>> {
    use crate::scheme::ListAssignment;
    for &v in order {
        if partial[v].is_some() {
            continue;
        }
        let used: Vec<Colour> = g
            .neighbours(v)
            .into_iter()
            .filter_map(|u| partial[u])
            .collect();
        partial[v] = Some(*lists.list(v).iter().find(|x| !used.contains(x))?);
    }
    Some(partial)
}
