//! Colour schemes: one sorted `c`-subset of the palette `{1..s}` per vertex.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circulant::{for_each_combination, Clique, CyclePower, VertexId};
use crate::error::{Error, Result};

/// A colour of the palette, in `1..=s`.
pub type Colour = u32;

/// List size `c` and palette size `s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SchemeParams {
    c: usize,
    s: usize,
}

impl SchemeParams {
    pub fn new(c: usize, s: usize) -> Result<Self> {
        if c < 1 || c > s || s > Colour::MAX as usize {
            return Err(Error::InvalidParams { c, s });
        }
        Ok(Self { c, s })
    }

    #[inline]
    pub fn c(&self) -> usize {
        self.c
    }

    #[inline]
    pub fn s(&self) -> usize {
        self.s
    }
}

/// Deterministic random stream identified by `(master_seed, stream_index)`.
///
/// Backed by ChaCha8 seeded from `master_seed` with the ChaCha stream id set
/// to `stream_index`, so distinct indices give independent sequences and the
/// pair alone fixes every draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        Self {
            master_seed,
            stream_index,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index);
        rng
    }
}

/// An assignment of a list `L(v)` to every vertex.
///
/// Lists are stored back to back (`c` colours per vertex), each sorted
/// ascending, so list equality is slice equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ColourScheme {
    params: SchemeParams,
    lists: Vec<Colour>,
}

impl ColourScheme {
    /// Builds a scheme from explicit lists, sorting each one.
    pub fn from_lists(params: SchemeParams, lists: Vec<Vec<Colour>>) -> Result<Self> {
        let mut flat = Vec::with_capacity(lists.len() * params.c);
        for (v, mut list) in lists.into_iter().enumerate() {
            list.sort_unstable();
            validate_list(&params, v, &list)?;
            flat.extend_from_slice(&list);
        }
        Ok(Self {
            params,
            lists: flat,
        })
    }

    /// Placeholder lists for `n` vertices, to be overwritten by
    /// [`ListSampler::fill`] before use.
    pub(crate) fn blank(params: SchemeParams, n: usize) -> Self {
        Self {
            params,
            lists: vec![0; n * params.c],
        }
    }

    /// Every vertex gets the same list.
    pub fn uniform(params: SchemeParams, n: usize, list: &[Colour]) -> Result<Self> {
        Self::from_lists(params, vec![list.to_vec(); n])
    }

    #[inline]
    pub fn params(&self) -> SchemeParams {
        self.params
    }

    #[inline]
    pub fn c(&self) -> usize {
        self.params.c
    }

    #[inline]
    pub fn s(&self) -> usize {
        self.params.s
    }

    /// Number of vertices the scheme covers.
    #[inline]
    pub fn len(&self) -> usize {
        self.lists.len() / self.params.c
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.lists.is_empty()
    }

    #[inline]
    pub fn list(&self, v: VertexId) -> &[Colour] {
        let c = self.params.c;
        &self.lists[v * c..(v + 1) * c]
    }

    #[inline]
    pub fn contains(&self, v: VertexId, colour: Colour) -> bool {
        self.list(v).binary_search(&colour).is_ok()
    }

    pub fn lists(&self) -> impl Iterator<Item = &[Colour]> {
        self.lists.chunks_exact(self.params.c)
    }

    pub fn check_size(&self, g: &CyclePower) -> Result<()> {
        if self.len() == g.n() {
            Ok(())
        } else {
            Err(Error::SizeMismatch {
                expected: g.n(),
                got: self.len(),
            })
        }
    }

    /// Serializes as the plain-text scheme format: a header `n k c s`
    /// followed by one line of space-separated sorted colours per vertex.
    pub fn to_text(&self, g: &CyclePower) -> String {
        let mut out = String::with_capacity(self.lists.len() * 4 + 32);
        let _ = writeln!(out, "{} {} {} {}", g.n(), g.k(), self.c(), self.s());
        for list in self.lists() {
            for (i, colour) in list.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                let _ = write!(out, "{colour}");
            }
            out.push('\n');
        }
        out
    }

    /// Parses the format written by [`ColourScheme::to_text`]. Blank lines are
    /// ignored; errors carry 1-based line numbers.
    pub fn parse_text(text: &str) -> Result<(CyclePower, ColourScheme)> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());

        let (header_line, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "missing header `n k c s`".into(),
        })?;
        let fields = parse_numbers(header_line, header)?;
        if fields.len() != 4 {
            return Err(Error::Parse {
                line: header_line,
                message: format!(
                    "header must have 4 fields `n k c s`, found {}",
                    fields.len()
                ),
            });
        }
        let (n, k, c, s) = (fields[0], fields[1], fields[2], fields[3]);
        let g = CyclePower::new(n, k).map_err(|e| Error::Parse {
            line: header_line,
            message: e.to_string(),
        })?;
        let params = SchemeParams::new(c, s).map_err(|e| Error::Parse {
            line: header_line,
            message: e.to_string(),
        })?;

        let mut flat = Vec::with_capacity(n * c);
        let mut last_line = header_line;
        for v in 0..n {
            let (line_no, line) = lines.next().ok_or(Error::Parse {
                line: last_line + 1,
                message: format!("expected {n} lists, found {v}"),
            })?;
            last_line = line_no;
            let mut list: Vec<Colour> = parse_numbers(line_no, line)?
                .into_iter()
                .map(|x| Colour::try_from(x).unwrap_or(Colour::MAX))
                .collect();
            list.sort_unstable();
            validate_list(&params, v, &list).map_err(|e| Error::Parse {
                line: line_no,
                message: e.to_string(),
            })?;
            flat.extend_from_slice(&list);
        }
        if let Some((line_no, _)) = lines.next() {
            return Err(Error::Parse {
                line: line_no,
                message: format!("unexpected content after {n} lists"),
            });
        }
        Ok((
            g,
            ColourScheme {
                params,
                lists: flat,
            },
        ))
    }
}

/// Read access to per-vertex lists; lets the solver and the matching code
/// run on lists of uneven size as well as on [`ColourScheme`]s.
pub trait ListAssignment {
    fn num_vertices(&self) -> usize;
    /// Sorted ascending, without repeats.
    fn list(&self, v: VertexId) -> &[Colour];

    fn max_list_len(&self) -> usize {
        (0..self.num_vertices())
            .map(|v| self.list(v).len())
            .max()
            .unwrap_or(0)
    }
}

impl ListAssignment for ColourScheme {
    #[inline]
    fn num_vertices(&self) -> usize {
        self.len()
    }

    #[inline]
    fn list(&self, v: VertexId) -> &[Colour] {
        ColourScheme::list(self, v)
    }

    fn max_list_len(&self) -> usize {
        self.c()
    }
}

/// Lists of arbitrary (possibly different) sizes.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RaggedLists {
    lists: Vec<Vec<Colour>>,
}

impl RaggedLists {
    /// Sorts and deduplicates each list.
    pub fn new(mut lists: Vec<Vec<Colour>>) -> Self {
        for list in &mut lists {
            list.sort_unstable();
            list.dedup();
        }
        Self { lists }
    }

    pub fn from_scheme(scheme: &ColourScheme) -> Self {
        Self::new(scheme.lists().map(<[Colour]>::to_vec).collect())
    }

    /// Adds `colour` to the list of `v` (no-op if already present).
    pub fn augment(&mut self, v: VertexId, colour: Colour) {
        if let Err(at) = self.lists[v].binary_search(&colour) {
            self.lists[v].insert(at, colour);
        }
    }
}

impl ListAssignment for RaggedLists {
    fn num_vertices(&self) -> usize {
        self.lists.len()
    }

    fn list(&self, v: VertexId) -> &[Colour] {
        &self.lists[v]
    }
}

fn parse_numbers(line_no: usize, line: &str) -> Result<Vec<usize>> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse::<usize>().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("`{tok}` is not a nonnegative integer"),
            })
        })
        .collect()
}

fn validate_list(params: &SchemeParams, v: VertexId, sorted: &[Colour]) -> Result<()> {
    let bad = |reason: String| Error::InvalidList { vertex: v, reason };
    if sorted.len() != params.c {
        return Err(bad(format!(
            "expected {} colours, got {}",
            params.c,
            sorted.len()
        )));
    }
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(bad("repeated colour".into()));
    }
    if let Some(&x) = sorted.iter().find(|&&x| x < 1 || x as usize > params.s) {
        return Err(bad(format!("colour {x} outside palette 1..={}", params.s)));
    }
    Ok(())
}

/// Reusable sampler for uniformly random `c`-subsets of `{1..s}`.
///
/// Uses rejection of repeated draws while `2c <= s`, and otherwise a partial
/// Fisher-Yates shuffle over a persistent permutation of the palette. Both
/// give exactly uniform subsets.
#[derive(Debug, Clone)]
pub struct ListSampler {
    params: SchemeParams,
    palette: Vec<Colour>,
}

impl ListSampler {
    pub fn new(params: SchemeParams) -> Self {
        let palette = if 2 * params.c > params.s {
            (1..=params.s as Colour).collect()
        } else {
            Vec::new()
        };
        Self { params, palette }
    }

    /// Writes one sorted uniform `c`-subset into `out` (length `c`).
    pub fn sample_list<R: Rng + ?Sized>(&mut self, rng: &mut R, out: &mut [Colour]) {
        let (c, s) = (self.params.c, self.params.s);
        debug_assert_eq!(out.len(), c);
        if self.palette.is_empty() {
            let mut filled = 0;
            while filled < c {
                let x = rng.gen_range(1..=s as Colour);
                if !out[..filled].contains(&x) {
                    out[filled] = x;
                    filled += 1;
                }
            }
        } else {
            for i in 0..c {
                let j = rng.gen_range(i..s);
                self.palette.swap(i, j);
            }
            out.copy_from_slice(&self.palette[..c]);
        }
        insertion_sort(out);
    }

    /// Resamples every list of `scheme` from `rng`.
    pub fn fill<R: Rng + ?Sized>(&mut self, rng: &mut R, scheme: &mut ColourScheme) {
        debug_assert_eq!(scheme.params, self.params);
        let c = self.params.c;
        for chunk in scheme.lists.chunks_exact_mut(c) {
            self.sample_list(rng, chunk);
        }
    }
}

fn insertion_sort(xs: &mut [Colour]) {
    for i in 1..xs.len() {
        let mut j = i;
        while j > 0 && xs[j - 1] > xs[j] {
            xs.swap(j - 1, j);
            j -= 1;
        }
    }
}

/// Draws `L(c, k, s)`: an independent uniform `c`-subset for every vertex.
pub fn sample_scheme(g: &CyclePower, params: SchemeParams, stream: &RngStream) -> ColourScheme {
    let mut scheme = ColourScheme::blank(params, g.n());
    let mut rng = stream.rng();
    ListSampler::new(params).fill(&mut rng, &mut scheme);
    scheme
}

/// Every `(c+1)`-clique whose members all drew the same list.
///
/// When cliques are windowed (see [`CyclePower::cliques_are_windowed`]) each
/// clique is found from its leftmost vertex `v` by comparing `L(v)` with the
/// `k` lists that follow it; otherwise the cliques are enumerated outright.
pub fn identical_list_cliques(g: &CyclePower, scheme: &ColourScheme) -> Vec<Clique> {
    let size = scheme.c() + 1;
    if !g.cliques_are_windowed(size) {
        return g
            .enumerate_cliques(size)
            .unwrap_or_default()
            .into_iter()
            .filter(|cl| {
                let first = scheme.list(cl.vertices[0]);
                cl.vertices[1..].iter().all(|&v| scheme.list(v) == first)
            })
            .collect();
    }
    let mut out = Vec::new();
    let mut same = Vec::with_capacity(g.k());
    let mut buf = Vec::new();
    for v in 0..g.n() {
        matching_followers(g, scheme, v, &mut same);
        if same.len() < scheme.c() {
            continue;
        }
        for_each_combination(same.len(), scheme.c(), &mut buf, &mut |pick| {
            let mut vertices = Vec::with_capacity(size);
            vertices.push(v);
            vertices.extend(pick.iter().map(|&i| same[i]));
            vertices.sort_unstable();
            out.push(Clique { vertices });
        });
    }
    out
}

/// `|identical_list_cliques(g, scheme)|` without materializing the cliques.
pub fn count_identical_list_cliques(g: &CyclePower, scheme: &ColourScheme) -> u64 {
    let c = scheme.c();
    if !g.cliques_are_windowed(c + 1) {
        return identical_list_cliques(g, scheme).len() as u64;
    }
    let mut total = 0u64;
    for v in 0..g.n() {
        let mine = scheme.list(v);
        let m = (1..=g.k())
            .filter(|&o| scheme.list(g.shift(v, o)) == mine)
            .count();
        if m >= c {
            total += crate::circulant::binomial(m as u64, c as u64);
        }
    }
    total
}

fn matching_followers(g: &CyclePower, scheme: &ColourScheme, v: VertexId, out: &mut Vec<VertexId>) {
    out.clear();
    let mine = scheme.list(v);
    for o in 1..=g.k() {
        let u = g.shift(v, o);
        if scheme.list(u) == mine {
            out.push(u);
        }
    }
}

/// Whether the union of the lists over `a` misses the union over `b`.
pub fn lists_disjoint(scheme: &ColourScheme, a: &[VertexId], b: &[VertexId]) -> bool {
    let mut seen: Vec<Colour> = a
        .iter()
        .flat_map(|&v| scheme.list(v).iter().copied())
        .collect();
    seen.sort_unstable();
    seen.dedup();
    b.iter()
        .flat_map(|&v| scheme.list(v).iter())
        .all(|x| seen.binary_search(x).is_err())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(c: usize, s: usize) -> SchemeParams {
        SchemeParams::new(c, s).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(SchemeParams::new(0, 3).is_err());
        assert!(SchemeParams::new(4, 3).is_err());
        assert!(SchemeParams::new(3, 3).is_ok());
    }

    #[test]
    fn forced_schemes() {
        let g = CyclePower::new(9, 2).unwrap();
        let one = sample_scheme(&g, params(1, 1), &RngStream::new(3, 0));
        assert!(one.lists().all(|l| l == [1]));
        let full = sample_scheme(&g, params(4, 4), &RngStream::new(3, 1));
        assert!(full.lists().all(|l| l == [1, 2, 3, 4]));
    }

    #[test]
    fn sampled_lists_are_canonical() {
        let g = CyclePower::new(500, 3).unwrap();
        for (c, s) in [(1, 7), (2, 3), (3, 5), (3, 100), (5, 6)] {
            let scheme = sample_scheme(&g, params(c, s), &RngStream::new(11, c as u64));
            assert_eq!(scheme.len(), 500);
            for list in scheme.lists() {
                assert_eq!(list.len(), c);
                assert!(list.windows(2).all(|w| w[0] < w[1]));
                assert!(list.iter().all(|&x| x >= 1 && x as usize <= s));
            }
        }
    }

    #[test]
    fn sampling_is_reproducible_and_stream_sensitive() {
        let g = CyclePower::new(200, 2).unwrap();
        let p = params(2, 9);
        let a = sample_scheme(&g, p, &RngStream::new(42, 5));
        let b = sample_scheme(&g, p, &RngStream::new(42, 5));
        let c = sample_scheme(&g, p, &RngStream::new(42, 6));
        let d = sample_scheme(&g, p, &RngStream::new(43, 5));
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
    }

    /// Pearson goodness of fit over the `C(s, c)` possible lists of one
    /// vertex position, for both sampler branches.
    fn uniformity_chi_square(c: usize, s: usize, draws: usize) -> (f64, usize, Vec<f64>) {
        let mut sampler = ListSampler::new(params(c, s));
        let mut rng = RngStream::new(2024, 0).rng();
        let mut counts = std::collections::BTreeMap::<Vec<Colour>, usize>::new();
        let mut buf = vec![0; c];
        for _ in 0..draws {
            sampler.sample_list(&mut rng, &mut buf);
            *counts.entry(buf.clone()).or_default() += 1;
        }
        let cells = crate::circulant::binomial(s as u64, c as u64) as usize;
        assert_eq!(counts.len(), cells);
        let expected = draws as f64 / cells as f64;
        let chi: f64 = counts
            .values()
            .map(|&o| (o as f64 - expected).powi(2) / expected)
            .sum();
        let freqs = counts.values().map(|&o| o as f64 / draws as f64).collect();
        (chi, cells - 1, freqs)
    }

    #[test]
    fn two_subsets_of_four_are_uniform() {
        // 2c = s: rejection branch
        let (chi, df, freqs) = uniformity_chi_square(2, 4, 100_000);
        assert_eq!(df, 5);
        for f in freqs {
            assert!((f - 1.0 / 6.0).abs() < 0.01, "{f}");
        }
        // chi-square(5) 0.999 quantile is 20.52
        assert!(chi < 20.52, "chi = {chi}");
    }

    #[test]
    fn shuffle_branch_is_uniform() {
        let (chi, df, _) = uniformity_chi_square(3, 5, 100_000);
        assert_eq!(df, 9);
        // chi-square(9) 0.999 quantile is 27.88
        assert!(chi < 27.88, "chi = {chi}");
    }

    fn triangle_instance() -> (CyclePower, ColourScheme) {
        let g = CyclePower::new(8, 2).unwrap();
        let mut lists = vec![vec![3, 5], vec![3, 5], vec![3, 5]];
        lists.extend((0..5).map(|i| vec![10 + 2 * i, 11 + 2 * i]));
        (g, ColourScheme::from_lists(params(2, 20), lists).unwrap())
    }

    #[test]
    fn identical_triangle_detected() {
        let (g, scheme) = triangle_instance();
        let found = identical_list_cliques(&g, &scheme);
        assert_eq!(
            found,
            vec![Clique {
                vertices: vec![0, 1, 2]
            }]
        );
        assert_eq!(count_identical_list_cliques(&g, &scheme), 1);
    }

    #[test]
    fn distinct_lists_give_no_cliques() {
        let g = CyclePower::new(12, 3).unwrap();
        let lists = (0..12).map(|i| vec![2 * i + 1, 2 * i + 2]).collect();
        let scheme = ColourScheme::from_lists(params(2, 24), lists).unwrap();
        assert!(identical_list_cliques(&g, &scheme).is_empty());
    }

    #[test]
    fn forced_lists_make_every_clique_identical() {
        let g = CyclePower::new(40, 3).unwrap();
        let scheme = ColourScheme::uniform(params(2, 2), 40, &[1, 2]).unwrap();
        assert_eq!(identical_list_cliques(&g, &scheme).len(), 40 * 3);
        assert_eq!(count_identical_list_cliques(&g, &scheme), 120);
    }

    #[test]
    fn disjointness_examples() {
        let scheme = ColourScheme::from_lists(
            params(2, 9),
            vec![vec![1, 2], vec![3, 4], vec![5, 6], vec![2, 9]],
        )
        .unwrap();
        assert!(lists_disjoint(&scheme, &[0, 1], &[2]));
        assert!(!lists_disjoint(&scheme, &[0], &[3]));
        assert!(!lists_disjoint(&scheme, &[1, 2], &[1, 2]));
        assert!(lists_disjoint(&scheme, &[], &[0]));
    }

    #[test]
    fn text_format_round_trip_and_errors() {
        let (g, scheme) = triangle_instance();
        let text = scheme.to_text(&g);
        assert!(text.starts_with("8 2 2 20\n3 5\n"));
        let (g2, back) = ColourScheme::parse_text(&text).unwrap();
        assert_eq!(g2, g);
        assert_eq!(back, scheme);

        let err = ColourScheme::parse_text("4 1 2 3\n1 2\n2 2\n1 3\n2 3\n").unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                line: 3,
                message: "invalid list at vertex 1: repeated colour".into()
            }
        );
        let err = ColourScheme::parse_text("4 1 2 3\n1 2\n1 x\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        let err = ColourScheme::parse_text("4 1 2 3\n1 2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        let err = ColourScheme::parse_text("3 1 1 2\n1\n2\n3\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, .. }));
        let err = ColourScheme::parse_text("3 1 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }
}
