//! Signed permutations, the signed reversal graphs `SR_k`, the reversal
//! graphs `R_k`, and the cube cells `V_pi` of `SR_k`.
//!
//! Vertex index of a signed permutation: `rank(pi) * 2^k + mask`, where
//! `rank` is the lexicographic rank of the underlying permutation and bit
//! `i` of `mask` is set when position `i` (0-based) carries a minus sign.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::coloring::Coloring;
use crate::graph::{CellPartition, Graph};

/// Largest `k` for which `SR_k` may be built (46080 vertices).
pub const MAX_SIGNED_DEGREE: usize = 6;
/// Largest `k` for which `R_k` may be built.
pub const MAX_REVERSAL_DEGREE: usize = 7;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SignedPermError {
    #[error("not a signed permutation: {0}")]
    Invalid(String),
    #[error("reversal bounds {i}..{j} invalid for degree {k}")]
    BadReversal { i: usize, j: usize, k: usize },
    #[error("degree {k} exceeds the supported limit {limit}")]
    TooLarge { k: usize, limit: usize },
    #[error("bad parity token {0:?}")]
    BadToken(String),
    #[error("parity class {0} listed more than once")]
    DuplicateToken(String),
    #[error("parity class {0} missing from the coloring")]
    MissingToken(String),
    #[error("fixture parse error: {0}")]
    Fixture(String),
}

pub fn factorial(k: usize) -> usize {
    (1..=k).product()
}

/// Lexicographic rank of a permutation of `1..=k`.
pub fn permutation_rank(perm: &[u8]) -> usize {
    let k = perm.len();
    let mut rank = 0;
    for i in 0..k {
        let smaller_later = perm[i + 1..].iter().filter(|&&x| x < perm[i]).count();
        rank += smaller_later * factorial(k - 1 - i);
    }
    rank
}

pub fn permutation_unrank(k: usize, mut rank: usize) -> Vec<u8> {
    let mut available: Vec<u8> = (1..=k as u8).collect();
    let mut perm = Vec::with_capacity(k);
    for i in 0..k {
        let f = factorial(k - 1 - i);
        perm.push(available.remove(rank / f));
        rank %= f;
    }
    perm
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedPermutation {
    entries: Vec<i8>,
}

impl SignedPermutation {
    pub fn new(entries: Vec<i8>) -> Result<Self, SignedPermError> {
        let k = entries.len();
        let mut seen = vec![false; k + 1];
        for &e in &entries {
            let a = e.unsigned_abs() as usize;
            if a == 0 || a > k || seen[a] {
                return Err(SignedPermError::Invalid(format!("{entries:?}")));
            }
            seen[a] = true;
        }
        Ok(SignedPermutation { entries })
    }

    pub fn identity(k: usize) -> Self {
        SignedPermutation { entries: (1..=k as i8).collect() }
    }

    pub fn degree(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[i8] {
        &self.entries
    }

    pub fn base(&self) -> Vec<u8> {
        self.entries.iter().map(|e| e.unsigned_abs()).collect()
    }

    pub fn sign_mask(&self) -> usize {
        self.entries.iter().enumerate().filter(|(_, &e)| e < 0).fold(0, |m, (i, _)| m | (1 << i))
    }

    /// 0 when the number of `+` entries is even, 1 when odd.
    pub fn plus_parity(&self) -> u8 {
        (self.entries.iter().filter(|&&e| e > 0).count() % 2) as u8
    }

    pub fn index(&self) -> usize {
        (permutation_rank(&self.base()) << self.degree()) | self.sign_mask()
    }

    pub fn from_index(k: usize, index: usize) -> Self {
        let base = permutation_unrank(k, index >> k);
        let mask = index & ((1 << k) - 1);
        let entries =
            base.iter().enumerate().map(|(i, &a)| if mask >> i & 1 == 1 { -(a as i8) } else { a as i8 }).collect();
        SignedPermutation { entries }
    }

    /// Reverses positions `i..=j` (1-based) and negates them.
    pub fn apply_signed_reversal(&self, i: usize, j: usize) -> Result<Self, SignedPermError> {
        let k = self.degree();
        if i == 0 || i > j || j > k {
            return Err(SignedPermError::BadReversal { i, j, k });
        }
        let mut entries = self.entries.clone();
        entries[i - 1..j].reverse();
        entries[i - 1..j].iter_mut().for_each(|e| *e = -*e);
        Ok(SignedPermutation { entries })
    }

    /// All `C(k+1, 2)` signed reversals of this permutation.
    pub fn reversal_neighbors(&self) -> impl Iterator<Item = SignedPermutation> + '_ {
        let k = self.degree();
        (1..=k).flat_map(move |i| (i..=k).map(move |j| self.apply_signed_reversal(i, j).unwrap()))
    }
}

/// Written as `2+3-1+4+5-`.
impl fmt::Display for SignedPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &e in &self.entries {
            write!(f, "{}{}", e.unsigned_abs(), if e > 0 { '+' } else { '-' })?;
        }
        Ok(())
    }
}

/// Accepts `2+3-1+` or a comma separated tuple `(2,-3,1)`.
impl FromStr for SignedPermutation {
    type Err = SignedPermError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || SignedPermError::Invalid(s.to_string());
        let entries = if s.starts_with('(') || s.contains(',') {
            s.trim_matches(|c| c == '(' || c == ')')
                .split(',')
                .map(|t| t.trim().parse::<i8>().map_err(|_| bad()))
                .collect::<Result<Vec<_>, _>>()?
        } else {
            let mut entries = Vec::new();
            let mut digits = String::new();
            for c in s.chars() {
                match c {
                    '0'..='9' => digits.push(c),
                    '+' | '-' => {
                        let a: i8 = digits.parse().map_err(|_| bad())?;
                        entries.push(if c == '+' { a } else { -a });
                        digits.clear();
                    }
                    _ => return Err(bad()),
                }
            }
            if !digits.is_empty() {
                return Err(bad());
            }
            entries
        };
        SignedPermutation::new(entries)
    }
}

#[derive(Debug, Clone)]
pub struct SignedReversalGraph {
    k: usize,
    graph: Graph,
}

impl SignedReversalGraph {
    pub fn build(k: usize) -> Result<Self, SignedPermError> {
        if k > MAX_SIGNED_DEGREE {
            return Err(SignedPermError::TooLarge { k, limit: MAX_SIGNED_DEGREE });
        }
        let n = factorial(k) << k;
        let graph = Graph::from_neighbor_fn(n, |v| {
            let s = SignedPermutation::from_index(k, v);
            s.reversal_neighbors().map(|t| t.index() as u32).collect()
        });
        Ok(SignedReversalGraph { k, graph })
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn into_graph(self) -> Graph {
        self.graph
    }

    pub fn vertex(&self, index: usize) -> SignedPermutation {
        SignedPermutation::from_index(self.k, index)
    }

    pub fn index_of(&self, s: &SignedPermutation) -> Option<usize> {
        (s.degree() == self.k).then(|| s.index())
    }

    /// Cells `V_pi` (all sign patterns over one permutation), ordered by rank of `pi`.
    pub fn cell_partition(&self) -> CellPartition {
        let size = 1 << self.k;
        CellPartition::new(
            self.graph.num_vertices(),
            (0..factorial(self.k)).map(|r| (r * size..(r + 1) * size).collect()).collect(),
        )
        .expect("cells tile the vertex range")
    }

    /// Cells `U_j(+)` for `j = 1..=k` followed by `U_j(-)`: the position
    /// and sign of the largest symbol `k`.
    pub fn position_partition(&self) -> CellPartition {
        let k = self.k as i8;
        CellPartition::from_key(self.graph.num_vertices(), |v| {
            let s = self.vertex(v);
            let pos = s.entries().iter().position(|e| e.abs() == k).expect("k present");
            (s.entries()[pos] < 0, pos)
        })
    }
}

pub fn build_signed_reversal_graph(k: usize) -> Result<SignedReversalGraph, SignedPermError> {
    SignedReversalGraph::build(k)
}

/// `R_k`: permutations in lexicographic rank order, adjacent under
/// reversal of a substring of length at least two.
pub fn build_reversal_graph(k: usize) -> Result<Graph, SignedPermError> {
    if k == 0 || k > MAX_REVERSAL_DEGREE {
        return Err(SignedPermError::TooLarge { k, limit: MAX_REVERSAL_DEGREE });
    }
    Ok(Graph::from_neighbor_fn(factorial(k), |v| {
        let perm = permutation_unrank(k, v);
        let mut out = Vec::with_capacity(k * (k - 1) / 2);
        for i in 0..k {
            for j in i + 1..k {
                let mut p = perm.clone();
                p[i..=j].reverse();
                out.push(permutation_rank(&p) as u32);
            }
        }
        out
    }))
}

/// One color class of a cube cell: the vertices over `base` whose number
/// of `+` signs has the given parity. Written `52143^0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParityClassToken {
    pub base: Vec<u8>,
    pub parity: u8,
}

impl fmt::Display for ParityClassToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.base {
            write!(f, "{d}")?;
        }
        write!(f, "^{}", self.parity)
    }
}

impl FromStr for ParityClassToken {
    type Err = SignedPermError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SignedPermError::BadToken(s.to_string());
        let (digits, parity) = s.trim().split_once('^').ok_or_else(bad)?;
        let parity = match parity.trim_matches(|c| c == '{' || c == '}') {
            "0" => 0,
            "1" => 1,
            _ => return Err(bad()),
        };
        let base: Vec<u8> =
            digits.chars().map(|c| c.to_digit(10).map(|d| d as u8).ok_or_else(bad)).collect::<Result<_, _>>()?;
        let mut sorted = base.clone();
        sorted.sort_unstable();
        if sorted.is_empty() || sorted.iter().enumerate().any(|(i, &d)| d as usize != i + 1) {
            return Err(bad());
        }
        Ok(ParityClassToken { base, parity })
    }
}

/// Parses the color-class listing: sections `color <c>:` each followed by
/// whitespace or comma separated tokens. Brackets and `$` are ignored.
pub fn parse_parity_fixture(text: &str) -> Result<Vec<(ParityClassToken, u32)>, SignedPermError> {
    let cleaned: String =
        text.chars().map(|c| if matches!(c, '[' | ']' | ',' | '$' | '\\') { ' ' } else { c }).collect();
    let mut out = Vec::new();
    let mut color: Option<u32> = None;
    let mut words = cleaned.split_whitespace().peekable();
    while let Some(word) = words.next() {
        if word.eq_ignore_ascii_case("color") {
            let label = words.next().ok_or_else(|| SignedPermError::Fixture("dangling `color`".into()))?;
            let label = label.trim_end_matches(':');
            color = Some(label.parse().map_err(|_| SignedPermError::Fixture(format!("bad color {label:?}")))?);
            if words.peek() == Some(&":") {
                words.next();
            }
            continue;
        }
        let c = color.ok_or_else(|| SignedPermError::Fixture(format!("token {word:?} before any color")))?;
        out.push((word.parse()?, c));
    }
    Ok(out)
}

/// Colors every vertex of `SR_k` by the class of its cell and parity.
pub fn expand_parity_coloring(k: usize, classes: &[(ParityClassToken, u32)]) -> Result<Coloring, SignedPermError> {
    if k > MAX_SIGNED_DEGREE {
        return Err(SignedPermError::TooLarge { k, limit: MAX_SIGNED_DEGREE });
    }
    let cell_size = 1usize << k;
    let num_cells = factorial(k);
    let mut class_color: Vec<[Option<u32>; 2]> = vec![[None, None]; num_cells];
    for (token, color) in classes {
        if token.base.len() != k {
            return Err(SignedPermError::BadToken(token.to_string()));
        }
        let slot = &mut class_color[permutation_rank(&token.base)][token.parity as usize];
        if slot.is_some() {
            return Err(SignedPermError::DuplicateToken(token.to_string()));
        }
        *slot = Some(*color);
    }
    let mut colors = Vec::with_capacity(num_cells * cell_size);
    for (rank, pair) in class_color.iter().enumerate() {
        for mask in 0..cell_size {
            let plus = k - (mask as u32).count_ones() as usize;
            let parity = plus % 2;
            let color = pair[parity].ok_or_else(|| {
                SignedPermError::MissingToken(
                    ParityClassToken { base: permutation_unrank(k, rank), parity: parity as u8 }.to_string(),
                )
            })?;
            colors.push(color);
        }
    }
    Ok(Coloring::from_colors(colors))
}

/// Converts a per-cell color pair `(first, second)`, where `first` goes on
/// the all-plus vertex of the cell, into parity class tokens.
pub fn cell_pair_tokens(k: usize, cells: &[(Vec<u8>, (u32, u32))]) -> Vec<(ParityClassToken, u32)> {
    let all_plus_parity = (k % 2) as u8;
    cells
        .iter()
        .flat_map(|(base, (first, second))| {
            [
                (ParityClassToken { base: base.clone(), parity: all_plus_parity }, *first),
                (ParityClassToken { base: base.clone(), parity: 1 - all_plus_parity }, *second),
            ]
        })
        .collect()
}
