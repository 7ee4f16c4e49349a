//! Perfect matchings of `K_2n` and the flip graph on them.
//!
//! Vertices of `K_2n` are the signed symbols `i+` and `i-` for
//! `i = 0..n`, stored as indices `2i` and `2i + 1`, so flipping the sign
//! of a vertex is `v ^ 1`. The identity matching `M0` pairs `2i` with
//! `2i + 1`; types and labels are read from the cycles of `M0 ∪ M`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::graph::{CellPartition, Graph};
use crate::signed_perm::{SignedPermutation, SignedReversalGraph};
use crate::spectra::IntegerPartition;

/// Largest `n` whose flip graph will be built: `15!! = 2027025` vertices.
pub const MAX_HALF_ORDER: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatchingError {
    #[error("n = {n} exceeds the memory budget (n <= {limit})")]
    TooLarge { n: usize, limit: usize },
    #[error("n must be at least 1")]
    Empty,
    #[error("matchings on {0} and {1} vertices cannot be compared")]
    SizeMismatch(usize, usize),
    #[error("not a perfect matching: {0}")]
    Invalid(String),
    #[error("label map is not an isomorphism: edge {0}-{1} {2}")]
    NotIsomorphism(usize, usize, String),
}

/// `(2n - 1)!!`.
pub fn double_factorial_odd(n: usize) -> u128 {
    (1..=n as u128).map(|j| 2 * j - 1).product()
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PerfectMatching {
    n: u8,
    partner: [u8; 2 * MAX_HALF_ORDER],
}

impl PerfectMatching {
    pub fn from_partner(partner: &[u8]) -> Result<Self, MatchingError> {
        let len = partner.len();
        if len == 0 || len % 2 == 1 || len > 2 * MAX_HALF_ORDER {
            return Err(MatchingError::Invalid(format!("{len} vertices")));
        }
        for (v, &p) in partner.iter().enumerate() {
            let p = p as usize;
            if p >= len || p == v || partner[p] as usize != v {
                return Err(MatchingError::Invalid(format!("{partner:?}")));
            }
        }
        let mut arr = [0u8; 2 * MAX_HALF_ORDER];
        arr[..len].copy_from_slice(partner);
        Ok(PerfectMatching { n: (len / 2) as u8, partner: arr })
    }

    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self, MatchingError> {
        let mut partner = vec![u8::MAX; 2 * n];
        for &(a, b) in pairs {
            if a >= 2 * n || b >= 2 * n || partner[a] != u8::MAX || partner[b] != u8::MAX {
                return Err(MatchingError::Invalid(format!("{pairs:?}")));
            }
            partner[a] = b as u8;
            partner[b] = a as u8;
        }
        Self::from_partner(&partner)
    }

    pub fn identity(n: usize) -> Self {
        let partner: Vec<u8> = (0..2 * n as u8).map(|v| v ^ 1).collect();
        Self::from_partner(&partner).expect("identity is a matching")
    }

    pub fn half_order(&self) -> usize {
        self.n as usize
    }

    pub fn partner(&self) -> &[u8] {
        &self.partner[..2 * self.n as usize]
    }

    /// Edges `(a, b)` with `a < b`, sorted by `a`.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.partner().iter().enumerate().filter(|&(v, &p)| v < p as usize).map(|(v, &p)| (v, p as usize)).collect()
    }

    /// Position in the order generated by pairing the smallest unmatched
    /// vertex with each larger unmatched vertex in turn.
    pub fn rank(&self) -> usize {
        let len = 2 * self.n as usize;
        let mut used = 0u32;
        let mut rank = 0usize;
        let mut remaining = len;
        while remaining > 0 {
            let s = (!used).trailing_zeros() as usize;
            let p = self.partner[s] as usize;
            let choice = (s + 1..p).filter(|&v| used >> v & 1 == 0).count();
            rank = rank * (remaining - 1) + choice;
            used |= 1 << s | 1 << p;
            remaining -= 2;
        }
        rank
    }

    pub fn unrank(n: usize, mut rank: usize) -> Self {
        let len = 2 * n;
        let mut radices = Vec::with_capacity(n);
        let mut r = len;
        while r > 0 {
            radices.push(r - 1);
            r -= 2;
        }
        let mut choices = vec![0; n];
        for (i, &radix) in radices.iter().enumerate().rev() {
            choices[i] = rank % radix.max(1);
            rank /= radix.max(1);
        }
        let mut partner = [0u8; 2 * MAX_HALF_ORDER];
        let mut used = 0u32;
        for &choice in &choices {
            let s = (!used).trailing_zeros() as usize;
            let p = (s + 1..len).filter(|&v| used >> v & 1 == 0).nth(choice).expect("choice in range");
            partner[s] = p as u8;
            partner[p] = s as u8;
            used |= 1 << s | 1 << p;
        }
        PerfectMatching { n: n as u8, partner }
    }

    /// The `n(n-1)` matchings one flip away.
    pub fn flip_neighbors(&self) -> Vec<PerfectMatching> {
        let pairs = self.pairs();
        let mut out = Vec::with_capacity(pairs.len() * pairs.len().saturating_sub(1));
        for (i, &(a, b)) in pairs.iter().enumerate() {
            for &(c, d) in &pairs[i + 1..] {
                for (x, y, z, w) in [(a, c, b, d), (a, d, b, c)] {
                    let mut m = *self;
                    m.partner[x] = y as u8;
                    m.partner[y] = x as u8;
                    m.partner[z] = w as u8;
                    m.partner[w] = z as u8;
                    out.push(m);
                }
            }
        }
        out
    }

    /// Half-lengths of the cycles of `self ∪ other`, in discovery order.
    fn cycle_half_lengths(&self, other: &PerfectMatching) -> Vec<usize> {
        let len = 2 * self.n as usize;
        let mut visited = 0u32;
        let mut lengths = Vec::new();
        for v in 0..len {
            if visited >> v & 1 == 1 {
                continue;
            }
            let mut x = v;
            let mut count = 0;
            loop {
                let y = self.partner[x] as usize;
                visited |= 1 << x | 1 << y;
                count += 1;
                x = other.partner[y] as usize;
                if x == v {
                    break;
                }
            }
            lengths.push(count);
        }
        lengths
    }

    pub fn type_of(&self) -> IntegerPartition {
        let parts = self.cycle_half_lengths(&Self::identity(self.half_order()));
        IntegerPartition::from_parts(parts).expect("cycle lengths are positive")
    }

    /// Number of cycles of `M0 ∪ M`.
    pub fn layer(&self) -> usize {
        self.cycle_half_lengths(&Self::identity(self.half_order())).len()
    }

    pub fn label_of(&self) -> MatchingLabel {
        let n = self.n as usize;
        let mut visited = 0u32;
        let mut segments = Vec::new();
        for i in 0..n {
            let start = 2 * i;
            if visited >> start & 1 == 1 {
                continue;
            }
            let mut segment = Vec::new();
            let mut cur = start;
            loop {
                let blue_end = self.partner[cur] as usize;
                visited |= 1 << cur | 1 << blue_end;
                cur = blue_end ^ 1;
                if cur == start {
                    break;
                }
                segment.push(LabelSymbol::from_vertex(cur));
            }
            segments.push(segment);
        }
        MatchingLabel { segments }
    }
}

impl fmt::Debug for PerfectMatching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PerfectMatching({self})")
    }
}

/// `a-b` pairs with `a < b`, comma separated, sorted by `a`.
impl fmt::Display for PerfectMatching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pairs = self.pairs();
        for (i, (a, b)) in pairs.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}-{b}")?;
        }
        Ok(())
    }
}

impl FromStr for PerfectMatching {
    type Err = MatchingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || MatchingError::Invalid(s.to_string());
        let pairs = s
            .trim()
            .split(',')
            .map(|p| {
                let (a, b) = p.trim().split_once('-').ok_or_else(bad)?;
                Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
            })
            .collect::<Result<Vec<(usize, usize)>, MatchingError>>()?;
        Self::from_pairs(pairs.len(), &pairs)
    }
}

pub fn enumerate_perfect_matchings(n: usize) -> Result<Vec<PerfectMatching>, MatchingError> {
    check_half_order(n)?;
    use rayon::prelude::*;
    let count = double_factorial_odd(n) as usize;
    Ok((0..count).into_par_iter().map(|r| PerfectMatching::unrank(n, r)).collect())
}

fn check_half_order(n: usize) -> Result<(), MatchingError> {
    if n == 0 {
        return Err(MatchingError::Empty);
    }
    if n > MAX_HALF_ORDER {
        return Err(MatchingError::TooLarge { n, limit: MAX_HALF_ORDER });
    }
    Ok(())
}

/// Symbol `i` with a sign, i.e. the vertex `i+` or `i-` of `K_2n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LabelSymbol {
    pub symbol: u8,
    pub positive: bool,
}

impl LabelSymbol {
    fn from_vertex(v: usize) -> Self {
        LabelSymbol { symbol: (v / 2) as u8, positive: v.is_multiple_of(2) }
    }
}

/// One signed-symbol sequence per cycle of `M0 ∪ M`, cycles in order of
/// their smallest symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchingLabel {
    pub segments: Vec<Vec<LabelSymbol>>,
}

impl MatchingLabel {
    /// Reads a one-segment label of a type-(n) matching as a signed
    /// permutation of `1..n`.
    pub fn as_signed_permutation(&self) -> Option<SignedPermutation> {
        match self.segments.as_slice() {
            [seg] => SignedPermutation::new(
                seg.iter().map(|s| if s.positive { s.symbol as i8 } else { -(s.symbol as i8) }).collect(),
            )
            .ok(),
            _ => None,
        }
    }
}

/// Written as in `()(2+)` or `(1-2+)`.
impl fmt::Display for MatchingLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for seg in &self.segments {
            f.write_str("(")?;
            for s in seg {
                write!(f, "{}{}", s.symbol, if s.positive { '+' } else { '-' })?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// `n - c(M1, M2)` where `c` counts the cycles of `M1 ∪ M2`.
pub fn matching_distance(a: &PerfectMatching, b: &PerfectMatching) -> Result<usize, MatchingError> {
    if a.half_order() != b.half_order() {
        return Err(MatchingError::SizeMismatch(2 * a.half_order(), 2 * b.half_order()));
    }
    Ok(a.half_order() - a.cycle_half_lengths(b).len())
}

/// Coordinates of a matching inside its component of the same-type
/// subgraph: per cycle of `M0 ∪ M` (ordered by smallest symbol) the set of
/// symbols on it and the cycle's label, relabelled to a signed
/// permutation of degree `cycle length / 2 - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleCoordinates {
    pub cycles: Vec<(u32, SignedPermutation)>,
}

impl CycleCoordinates {
    /// Symbol sets of the cycles; constant along a component.
    pub fn support(&self) -> Vec<u32> {
        self.cycles.iter().map(|(mask, _)| *mask).collect()
    }

    /// Index of the vertex in the box product of `SR_{λ_c - 1}` taken in
    /// cycle order (first factor most significant).
    pub fn product_index(&self) -> usize {
        self.cycles.iter().fold(0, |acc, (mask, s)| {
            let size = crate::signed_perm::factorial(s.degree()) << s.degree();
            debug_assert_eq!(mask.count_ones() as usize, s.degree() + 1);
            acc * size + s.index()
        })
    }

    pub fn factor_degrees(&self) -> Vec<usize> {
        self.cycles.iter().map(|(_, s)| s.degree()).collect()
    }
}

pub fn cycle_coordinates(m: &PerfectMatching) -> CycleCoordinates {
    let label = m.label_of();
    let mut visited = 0u32;
    let mut cycles = Vec::with_capacity(label.segments.len());
    let mut next_start = 0u8;
    for seg in &label.segments {
        while visited >> next_start & 1 == 1 {
            next_start += 1;
        }
        let start = next_start;
        let mut mask = 1u32 << start;
        for s in seg {
            mask |= 1 << s.symbol;
        }
        visited |= mask;
        let mut symbols: Vec<u8> = seg.iter().map(|s| s.symbol).collect();
        symbols.sort_unstable();
        let entries = seg
            .iter()
            .map(|s| {
                let r = symbols.binary_search(&s.symbol).expect("symbol present") as i8 + 1;
                if s.positive {
                    r
                } else {
                    -r
                }
            })
            .collect();
        cycles.push((mask, SignedPermutation::new(entries).expect("labels are signed permutations")));
    }
    CycleCoordinates { cycles }
}

#[derive(Debug, Clone)]
pub struct FlipGraph {
    n: usize,
    graph: Graph,
    matchings: Vec<PerfectMatching>,
}

impl FlipGraph {
    pub fn build(n: usize) -> Result<Self, MatchingError> {
        let matchings = enumerate_perfect_matchings(n)?;
        let graph = Graph::from_neighbor_fn(matchings.len(), |v| {
            matchings[v].flip_neighbors().iter().map(|m| m.rank() as u32).collect()
        });
        Ok(FlipGraph { n, graph, matchings })
    }

    pub fn half_order(&self) -> usize {
        self.n
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn matchings(&self) -> &[PerfectMatching] {
        &self.matchings
    }

    pub fn matching(&self, v: usize) -> &PerfectMatching {
        &self.matchings[v]
    }

    pub fn rank(&self, m: &PerfectMatching) -> Option<usize> {
        (m.half_order() == self.n).then(|| m.rank())
    }

    pub fn types(&self) -> Vec<IntegerPartition> {
        self.matchings.iter().map(PerfectMatching::type_of).collect()
    }

    /// One cell per matching type, cells in ascending lexicographic order
    /// of the type, so `(1^n) = {M0}` comes first and `(n)` last.
    pub fn type_partition(&self) -> (Vec<IntegerPartition>, CellPartition) {
        let types = self.types();
        let partition = CellPartition::from_key(self.matchings.len(), |v| types[v].clone());
        let cell_types = partition.cells().iter().map(|c| types[c[0]].clone()).collect();
        (cell_types, partition)
    }

    /// The label bijection from type-(n) matchings onto `SR_{n-1}`,
    /// verified to carry edges to edges and non-edges to non-edges.
    pub fn label_isomorphism_to_sr(&self) -> Result<LabelIsomorphism, MatchingError> {
        let n = self.n;
        if n < 2 {
            return Err(MatchingError::Invalid("need n >= 2".into()));
        }
        let full = IntegerPartition::from_parts(vec![n]).expect("(n) is a partition");
        let cell: Vec<usize> = (0..self.matchings.len()).filter(|&v| self.matchings[v].type_of() == full).collect();
        let sr = SignedReversalGraph::build(n - 1).map_err(|e| MatchingError::Invalid(e.to_string()))?;
        let sr_index: Vec<usize> =
            cell.iter()
                .map(|&v| {
                    self.matchings[v].label_of().as_signed_permutation().map(|s| s.index()).ok_or_else(|| {
                        MatchingError::Invalid(format!("label of {} is not one segment", self.matchings[v]))
                    })
                })
                .collect::<Result<_, _>>()?;
        verify_vertex_map(&self.graph, &cell, sr.graph(), &sr_index)?;
        Ok(LabelIsomorphism { flip_vertices: cell, sr_index })
    }

    /// Checks that every component of the subgraph induced by matchings of
    /// type `lambda` is isomorphic, via [`cycle_coordinates`], to the box
    /// product of `SR_{λ_c - 1}` over its cycles. Returns the component
    /// count and size.
    pub fn verify_type_components(&self, lambda: &IntegerPartition) -> Result<(usize, usize), MatchingError> {
        let cell: Vec<usize> = (0..self.matchings.len()).filter(|&v| &self.matchings[v].type_of() == lambda).collect();
        if cell.is_empty() {
            return Err(MatchingError::Invalid(format!("no matching of type {lambda}")));
        }
        let sub = self.graph.induced_subgraph(&cell).map_err(|e| MatchingError::Invalid(e.to_string()))?;
        let components = sub.graph.connected_components();
        let mut size = None;
        for comp in &components {
            let coords: Vec<CycleCoordinates> =
                comp.iter().map(|&i| cycle_coordinates(&self.matchings[sub.to_parent[i]])).collect();
            let support = coords[0].support();
            if coords.iter().any(|c| c.support() != support) {
                return Err(MatchingError::Invalid("component spans several cycle supports".into()));
            }
            let mut product = Graph::from_edges(1, &[]).expect("single vertex");
            for d in coords[0].factor_degrees() {
                let sr = SignedReversalGraph::build(d).map_err(|e| MatchingError::Invalid(e.to_string()))?;
                product = product.box_product(sr.graph());
            }
            let parents: Vec<usize> = comp.iter().map(|&i| sub.to_parent[i]).collect();
            let images: Vec<usize> = coords.iter().map(CycleCoordinates::product_index).collect();
            verify_vertex_map(&self.graph, &parents, &product, &images)?;
            match size {
                None => size = Some(comp.len()),
                Some(s) if s != comp.len() => return Err(MatchingError::Invalid("components of unequal size".into())),
                _ => {}
            }
        }
        Ok((components.len(), size.unwrap_or(0)))
    }

    pub fn into_graph(self) -> Graph {
        self.graph
    }
}

pub fn build_flip_graph(n: usize) -> Result<FlipGraph, MatchingError> {
    FlipGraph::build(n)
}

#[derive(Debug, Clone)]
pub struct LabelIsomorphism {
    /// Flip-graph indices of the type-(n) matchings.
    pub flip_vertices: Vec<usize>,
    /// `SR_{n-1}` index of each, aligned with `flip_vertices`.
    pub sr_index: Vec<usize>,
}

/// `vertices[i] ↦ images[i]` must be a bijection onto `target` that maps
/// the subgraph of `source` induced by `vertices` isomorphically.
fn verify_vertex_map(
    source: &Graph,
    vertices: &[usize],
    target: &Graph,
    images: &[usize],
) -> Result<(), MatchingError> {
    let nt = target.num_vertices();
    if vertices.len() != nt {
        return Err(MatchingError::Invalid(format!("{} vertices map onto {nt}", vertices.len())));
    }
    let mut seen = vec![false; nt];
    for &img in images {
        if img >= nt || std::mem::replace(&mut seen[img], true) {
            return Err(MatchingError::Invalid(format!("image {img} repeated or out of range")));
        }
    }
    let sub = source.induced_subgraph(vertices).map_err(|e| MatchingError::Invalid(e.to_string()))?;
    for (a, b) in sub.graph.edges() {
        if !target.has_edge(images[a], images[b]) {
            return Err(MatchingError::NotIsomorphism(vertices[a], vertices[b], "maps to a non-edge".into()));
        }
    }
    if sub.graph.edge_count() != target.edge_count() {
        return Err(MatchingError::NotIsomorphism(
            vertices[0],
            vertices[0],
            format!("edge counts differ: {} vs {}", sub.graph.edge_count(), target.edge_count()),
        ));
    }
    Ok(())
}
