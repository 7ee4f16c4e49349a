//! Vertex colorings: certification, the finite-field coloring of the flip
//! graph, box-product and layered constructions, DSATUR, and budgeted
//! exact searches for the chromatic and independence numbers.

use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::gf::{smallest_prime_power_at_least, FieldSpec, FieldTables};
use crate::graph::Graph;
use crate::matchings::{cycle_coordinates, FlipGraph, PerfectMatching};
use crate::signed_perm::{
    expand_parity_coloring, factorial, permutation_rank, permutation_unrank, ParityClassToken, SignedPermError,
    SignedReversalGraph, MAX_SIGNED_DEGREE,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ColoringError {
    #[error("coloring covers {colored} vertices, graph has {vertices}")]
    CoverageMismatch { colored: usize, vertices: usize },
    #[error("edge {u}-{v} is monochromatic (color {color})")]
    Monochromatic { u: usize, v: usize, color: u32 },
    #[error("no coloring supplied for SR_{0}")]
    MissingFactor(usize),
    #[error("factor coloring for SR_{k} has {got} vertices, expected {expected}")]
    FactorSize { k: usize, got: usize, expected: usize },
    #[error("coloring file parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    colors: Vec<u32>,
    num_colors: u32,
}

impl Coloring {
    /// Palette size is one more than the largest color.
    pub fn from_colors(colors: Vec<u32>) -> Self {
        let num_colors = colors.iter().max().map_or(0, |&m| m + 1);
        Coloring { colors, num_colors }
    }

    pub fn with_palette(colors: Vec<u32>, num_colors: u32) -> Self {
        assert!(colors.iter().all(|&c| c < num_colors), "color outside palette");
        Coloring { colors, num_colors }
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn color(&self, v: usize) -> u32 {
        self.colors[v]
    }

    pub fn num_colors(&self) -> u32 {
        self.num_colors
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    /// Number of distinct colors actually present.
    pub fn colors_used(&self) -> usize {
        let mut seen = vec![false; self.num_colors as usize];
        self.colors.iter().for_each(|&c| seen[c as usize] = true);
        seen.iter().filter(|&&s| s).count()
    }

    /// Relabels the used colors `0..k` preserving their order.
    pub fn densified(&self) -> Coloring {
        let mut map = vec![u32::MAX; self.num_colors as usize];
        self.colors.iter().for_each(|&c| map[c as usize] = 0);
        let mut next = 0;
        for m in map.iter_mut().filter(|m| **m == 0) {
            *m = next;
            next += 1;
        }
        Coloring { colors: self.colors.iter().map(|&c| map[c as usize]).collect(), num_colors: next }
    }

    /// Header `c <num_colors>`, then `<vertex> <color>` per line.
    pub fn to_file_format(&self) -> String {
        let mut out = format!("c {}\n", self.num_colors);
        for (v, c) in self.colors.iter().enumerate() {
            out.push_str(&format!("{v} {c}\n"));
        }
        out
    }

    pub fn parse_file_format(text: &str) -> Result<Self, ColoringError> {
        let mut num_colors = None;
        let mut pairs = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let bad = |message: String| ColoringError::Parse { line: idx + 1, message };
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields.as_slice() {
                [] => {}
                ["c", k] if num_colors.is_none() => {
                    num_colors = Some(k.parse::<u32>().map_err(|e| bad(e.to_string()))?);
                }
                [v, c] if num_colors.is_some() => {
                    let v: usize = v.parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?;
                    let c: u32 = c.parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?;
                    pairs.push((v, c));
                }
                _ => return Err(bad(format!("unexpected line {line:?}"))),
            }
        }
        let k = num_colors.ok_or(ColoringError::Parse { line: 0, message: "missing header".into() })?;
        let mut colors = vec![u32::MAX; pairs.len()];
        for (v, c) in pairs {
            if v >= colors.len() || colors[v] != u32::MAX || c >= k {
                return Err(ColoringError::Parse { line: 0, message: format!("bad entry {v} {c}") });
            }
            colors[v] = c;
        }
        Ok(Coloring { colors, num_colors: k })
    }
}

/// Passes iff no edge is monochromatic; otherwise reports the first such edge.
pub fn verify_coloring(g: &Graph, c: &Coloring) -> Result<(), ColoringError> {
    if c.len() != g.num_vertices() {
        return Err(ColoringError::CoverageMismatch { colored: c.len(), vertices: g.num_vertices() });
    }
    match g.edges().find(|&(u, v)| c.color(u) == c.color(v)) {
        Some((u, v)) => Err(ColoringError::Monochromatic { u, v, color: c.color(u) }),
        None => Ok(()),
    }
}

#[derive(Debug, Clone)]
pub struct GfColoring {
    pub field: FieldSpec,
    /// Field element index of `f(M)` for every matching.
    pub raw: Vec<u32>,
    /// `raw` relabelled densely in increasing element index.
    pub coloring: Coloring,
}

/// Colors matching `M` by `Σ σ(a)σ(b)` over its edges `{a, b}`, where
/// `σ(i)` is the `i`-th element of GF(q) and `q` is the least prime power
/// `>= 2n + 1`.
pub fn gf_coloring(fg: &FlipGraph) -> GfColoring {
    let n = fg.half_order();
    let field = smallest_prime_power_at_least(2 * n as u64 + 1);
    let tables = FieldTables::new(&field);
    let raw: Vec<u32> = fg.matchings().iter().map(|m| gf_color_of(&tables, m)).collect();
    let coloring = Coloring::with_palette(raw.clone(), tables.order() as u32).densified();
    debug_assert!(verify_coloring(fg.graph(), &coloring).is_ok());
    GfColoring { field, raw, coloring }
}

pub fn gf_color_of(tables: &FieldTables, m: &PerfectMatching) -> u32 {
    m.pairs().iter().fold(0, |acc, &(a, b)| tables.add(acc, tables.mul(a as u32, b as u32)))
}

/// For adjacent `x`, `y`: returns `(f(y) − f(x), (σ(x1) − σ(x4))(σ(x3) − σ(x2)))`
/// or `(…, (σ(x1) − σ(x3))(σ(x4) − σ(x2)))` according to which rewiring
/// was made, where `{x1,x2}, {x3,x4}` are the two edges of `x` not in `y`.
pub fn gf_flip_difference(tables: &FieldTables, x: &PerfectMatching, y: &PerfectMatching) -> Option<(u32, u32)> {
    let ex = x.pairs();
    let ey = y.pairs();
    let removed: Vec<(usize, usize)> = ex.iter().copied().filter(|e| !ey.contains(e)).collect();
    let [(x1, x2), (x3, x4)] = removed.as_slice() else {
        return None;
    };
    let (x1, x2, x3, x4) = (*x1 as u32, *x2 as u32, *x3 as u32, *x4 as u32);
    let diff = tables.sub(gf_color_of(tables, y), gf_color_of(tables, x));
    let partner_of_x1 = y.partner()[x1 as usize] as u32;
    let factored = if partner_of_x1 == x3 {
        tables.mul(tables.sub(x1, x4), tables.sub(x3, x2))
    } else if partner_of_x1 == x4 {
        tables.mul(tables.sub(x1, x3), tables.sub(x4, x2))
    } else {
        return None;
    };
    Some((diff, factored))
}

/// `(a, b) ↦ (cG(a) + cH(b)) mod max(|G colors|, |H colors|)`, vertex
/// `(a, b)` at index `a * |V(H)| + b`.
pub fn box_product_coloring(cg: &Coloring, ch: &Coloring) -> Coloring {
    let m = cg.num_colors().max(ch.num_colors()).max(1);
    let colors = cg.colors().iter().flat_map(|&a| ch.colors().iter().map(move |&b| (a + b) % m)).collect();
    Coloring { colors, num_colors: m }
}

#[derive(Debug, Clone)]
pub struct LayeredColoring {
    pub coloring: Coloring,
    /// Colors reserved for layers with an odd number of cycles.
    pub odd_palette: u32,
    /// Colors reserved for layers with an even number of cycles.
    pub even_palette: u32,
    /// Layer (number of cycles of `M0 ∪ M`) of every vertex.
    pub layers: Vec<usize>,
}

/// Colors each matching from the colorings of `SR_k` in `factors[k]`
/// (`k = 0..n`): the cycles of `M0 ∪ M` give box-product coordinates,
/// those are combined by [`box_product_coloring`]'s rule, and odd and
/// even layers use disjoint palettes.
pub fn layered_coloring(fg: &FlipGraph, factors: &[Coloring]) -> Result<LayeredColoring, ColoringError> {
    let n = fg.half_order();
    for k in 0..n {
        let f = factors.get(k).ok_or(ColoringError::MissingFactor(k))?;
        let expected = factorial(k) << k;
        if f.len() != expected {
            return Err(ColoringError::FactorSize { k, got: f.len(), expected });
        }
    }
    let mut layers = Vec::with_capacity(fg.matchings().len());
    let mut local = Vec::with_capacity(fg.matchings().len());
    let (mut odd_palette, mut even_palette) = (0u32, 0u32);
    for m in fg.matchings() {
        let coords = cycle_coordinates(m);
        let (color, palette) = coords.cycles.iter().fold((0u32, 1u32), |(c, size), (_, s)| {
            let f = &factors[s.degree()];
            let size = size.max(f.num_colors());
            ((c + f.color(s.index())) % size, size)
        });
        let layer = coords.cycles.len();
        if layer % 2 == 1 {
            odd_palette = odd_palette.max(palette);
        } else {
            even_palette = even_palette.max(palette);
        }
        layers.push(layer);
        local.push(color);
    }
    let colors =
        local.iter().zip(&layers).map(|(&c, &layer)| if layer % 2 == 1 { c } else { odd_palette + c }).collect();
    let coloring = Coloring::with_palette(colors, odd_palette + even_palette);
    verify_coloring(fg.graph(), &coloring)?;
    Ok(LayeredColoring { coloring, odd_palette, even_palette, layers })
}

/// Small growable bitset over colors.
#[derive(Clone, Default)]
struct ColorSet(Vec<u64>);

impl ColorSet {
    fn insert(&mut self, c: u32) -> bool {
        let (w, b) = (c as usize / 64, c % 64);
        if self.0.len() <= w {
            self.0.resize(w + 1, 0);
        }
        let fresh = self.0[w] >> b & 1 == 0;
        self.0[w] |= 1 << b;
        fresh
    }

    fn first_absent(&self) -> u32 {
        for (i, &w) in self.0.iter().enumerate() {
            if w != u64::MAX {
                return i as u32 * 64 + (!w).trailing_zeros();
            }
        }
        self.0.len() as u32 * 64
    }
}

/// DSATUR: repeatedly color the vertex seeing the most distinct colors
/// (ties: most uncolored neighbors, then a seeded random key) with the
/// smallest free color.
pub fn dsatur_coloring(g: &Graph, seed: u64) -> Coloring {
    let n = g.num_vertices();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tiebreak: Vec<u64> = (0..n).map(|_| rng.gen()).collect();
    let mut seen = vec![ColorSet::default(); n];
    let mut saturation = vec![0usize; n];
    let mut free_degree: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut colors = vec![u32::MAX; n];
    let mut heap: BinaryHeap<(usize, usize, u64, usize)> =
        (0..n).map(|v| (0, free_degree[v], tiebreak[v], v)).collect();
    while let Some((sat, deg, _, v)) = heap.pop() {
        if colors[v] != u32::MAX || sat != saturation[v] || deg != free_degree[v] {
            continue;
        }
        let c = seen[v].first_absent();
        colors[v] = c;
        for &w in g.neighbors(v) {
            let w = w as usize;
            if colors[w] != u32::MAX {
                continue;
            }
            if seen[w].insert(c) {
                saturation[w] += 1;
            }
            free_degree[w] -= 1;
            heap.push((saturation[w], free_degree[w], tiebreak[w], w));
        }
    }
    let coloring = Coloring::from_colors(colors);
    debug_assert!(verify_coloring(g, &coloring).is_ok());
    coloring
}

/// Limits for the exact searches. `None` means unlimited.
#[derive(Debug, Clone, Copy, Default)]
pub struct Budget {
    pub time: Option<Duration>,
    pub nodes: Option<u64>,
}

impl Budget {
    pub fn seconds(s: f64) -> Self {
        Budget { time: Some(Duration::from_secs_f64(s)), nodes: None }
    }

    pub fn unlimited() -> Self {
        Budget::default()
    }
}

struct Meter {
    start: Instant,
    budget: Budget,
    nodes: u64,
}

impl Meter {
    fn new(budget: Budget) -> Self {
        Meter { start: Instant::now(), budget, nodes: 0 }
    }

    /// Counts a node; true once the budget is spent.
    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.budget.nodes.is_some_and(|limit| self.nodes > limit) {
            return true;
        }
        self.nodes.is_multiple_of(1024) && self.budget.time.is_some_and(|t| self.start.elapsed() > t)
    }
}

#[derive(Debug, Clone)]
pub enum ChromaticOutcome {
    Exact {
        chromatic_number: usize,
        certificate: Coloring,
        nodes: u64,
    },
    /// Budget ran out: `lower <= χ <= upper`, `best` uses `upper` colors.
    Bracket {
        lower: usize,
        upper: usize,
        best: Coloring,
        nodes: u64,
    },
}

impl ChromaticOutcome {
    pub fn exact(&self) -> Option<usize> {
        match self {
            ChromaticOutcome::Exact { chromatic_number, .. } => Some(*chromatic_number),
            ChromaticOutcome::Bracket { .. } => None,
        }
    }

    pub fn bounds(&self) -> (usize, usize) {
        match self {
            ChromaticOutcome::Exact { chromatic_number, .. } => (*chromatic_number, *chromatic_number),
            ChromaticOutcome::Bracket { lower, upper, .. } => (*lower, *upper),
        }
    }

    pub fn coloring(&self) -> &Coloring {
        match self {
            ChromaticOutcome::Exact { certificate, .. } => certificate,
            ChromaticOutcome::Bracket { best, .. } => best,
        }
    }
}

/// Greedy clique: repeatedly add the candidate with most neighbors among
/// the remaining candidates, tried from every start vertex of max degree.
pub fn greedy_clique(g: &Graph) -> Vec<usize> {
    let n = g.num_vertices();
    let mut best: Vec<usize> = Vec::new();
    for start in 0..n {
        let mut clique = vec![start];
        let mut candidates: Vec<usize> = g.neighbors(start).iter().map(|&w| w as usize).collect();
        while !candidates.is_empty() {
            let &pick = candidates
                .iter()
                .max_by_key(|&&c| candidates.iter().filter(|&&d| g.has_edge(c, d)).count())
                .expect("nonempty");
            clique.push(pick);
            candidates.retain(|&c| c != pick && g.has_edge(c, pick));
        }
        if clique.len() > best.len() {
            best = clique;
        }
    }
    best
}

/// Branch and bound over colorings: the lower bound is a greedy clique,
/// the first upper bound comes from DSATUR, and each `k` below the
/// incumbent is decided by DSATUR-ordered backtracking with forward
/// checking.
pub fn exact_chromatic_number(g: &Graph, budget: Budget) -> ChromaticOutcome {
    let n = g.num_vertices();
    if n == 0 {
        return ChromaticOutcome::Exact { chromatic_number: 0, certificate: Coloring::from_colors(vec![]), nodes: 0 };
    }
    let clique = greedy_clique(g);
    let lower = clique.len();
    let mut best = dsatur_coloring(g, 0).densified();
    let mut meter = Meter::new(budget);
    while best.num_colors() as usize > lower {
        let k = best.num_colors() as usize - 1;
        match KColoringSearch::new(g, k, &clique).run(&mut meter) {
            Decision::Colorable(c) => best = c,
            Decision::NotColorable => break,
            Decision::OutOfBudget => {
                return ChromaticOutcome::Bracket { lower, upper: best.num_colors() as usize, best, nodes: meter.nodes }
            }
        }
    }
    debug_assert!(verify_coloring(g, &best).is_ok());
    ChromaticOutcome::Exact { chromatic_number: best.num_colors() as usize, certificate: best, nodes: meter.nodes }
}

/// Decides whether `g` has a proper `k`-coloring.
pub fn is_k_colorable(g: &Graph, k: usize, budget: Budget) -> Option<Option<Coloring>> {
    let clique = greedy_clique(g);
    let mut meter = Meter::new(budget);
    match KColoringSearch::new(g, k, &clique).run(&mut meter) {
        Decision::Colorable(c) => Some(Some(c)),
        Decision::NotColorable => Some(None),
        Decision::OutOfBudget => None,
    }
}

enum Decision {
    Colorable(Coloring),
    NotColorable,
    OutOfBudget,
}

struct KColoringSearch<'a> {
    g: &'a Graph,
    k: usize,
    colors: Vec<u32>,
    /// `blocked[v * k + c]`: colored neighbors of `v` with color `c`.
    blocked: Vec<u16>,
    /// Number of colors available to `v`.
    options: Vec<usize>,
    uncolored: usize,
    clique: Vec<usize>,
}

const NONE: u32 = u32::MAX;

impl<'a> KColoringSearch<'a> {
    fn new(g: &'a Graph, k: usize, clique: &[usize]) -> Self {
        let n = g.num_vertices();
        KColoringSearch {
            g,
            k,
            colors: vec![NONE; n],
            blocked: vec![0; n * k],
            options: vec![k; n],
            uncolored: n,
            clique: clique.to_vec(),
        }
    }

    /// Colors `v`; false if some uncolored neighbor is left with no option.
    fn assign(&mut self, v: usize, c: u32) -> bool {
        self.colors[v] = c;
        self.uncolored -= 1;
        let mut ok = true;
        for &w in self.g.neighbors(v) {
            let w = w as usize;
            let slot = &mut self.blocked[w * self.k + c as usize];
            *slot += 1;
            if *slot == 1 {
                self.options[w] -= 1;
                if self.options[w] == 0 && self.colors[w] == NONE {
                    ok = false;
                }
            }
        }
        ok
    }

    fn unassign(&mut self, v: usize) {
        let c = self.colors[v] as usize;
        self.colors[v] = NONE;
        self.uncolored += 1;
        for &w in self.g.neighbors(v) {
            let w = w as usize;
            let slot = &mut self.blocked[w * self.k + c];
            *slot -= 1;
            if *slot == 0 {
                self.options[w] += 1;
            }
        }
    }

    fn run(mut self, meter: &mut Meter) -> Decision {
        if self.k < self.clique.len() {
            return Decision::NotColorable;
        }
        let clique = self.clique.clone();
        for (i, &v) in clique.iter().enumerate() {
            if !self.assign(v, i as u32) {
                return Decision::NotColorable;
            }
        }
        match self.search(clique.len() as u32, meter) {
            Some(true) => {
                let coloring = Coloring::with_palette(self.colors.clone(), self.k as u32).densified();
                Decision::Colorable(coloring)
            }
            Some(false) => Decision::NotColorable,
            None => Decision::OutOfBudget,
        }
    }

    /// `Some(found)` or `None` when out of budget. Colors `>= used` are
    /// interchangeable, so only the first of them is tried.
    fn search(&mut self, used: u32, meter: &mut Meter) -> Option<bool> {
        if self.uncolored == 0 {
            return Some(true);
        }
        if meter.tick() {
            return None;
        }
        let n = self.g.num_vertices();
        let mut pick = usize::MAX;
        let mut key = (usize::MAX, 0usize);
        for v in 0..n {
            if self.colors[v] != NONE {
                continue;
            }
            let free_deg = self.g.neighbors(v).iter().filter(|&&w| self.colors[w as usize] == NONE).count();
            let cand = (self.options[v], usize::MAX - free_deg);
            if cand < key {
                key = cand;
                pick = v;
                if self.options[v] <= 1 {
                    break;
                }
            }
        }
        let v = pick;
        let limit = (used as usize + 1).min(self.k);
        for c in 0..limit {
            if self.blocked[v * self.k + c] != 0 {
                continue;
            }
            let ok = self.assign(v, c as u32);
            let result = if ok { self.search(used.max(c as u32 + 1), meter) } else { Some(false) };
            self.unassign(v);
            match result {
                Some(true) => {
                    // keep the solution: reassign along the unwinding path
                    self.assign(v, c as u32);
                    return Some(true);
                }
                None => return None,
                Some(false) => {}
            }
        }
        Some(false)
    }
}

#[derive(Debug, Clone)]
pub enum IndependenceOutcome {
    Exact { size: usize, certificate: Vec<usize>, nodes: u64 },
    Bracket { lower: usize, upper: usize, best: Vec<usize>, nodes: u64 },
}

impl IndependenceOutcome {
    pub fn exact(&self) -> Option<usize> {
        match self {
            IndependenceOutcome::Exact { size, .. } => Some(*size),
            IndependenceOutcome::Bracket { .. } => None,
        }
    }

    pub fn set(&self) -> &[usize] {
        match self {
            IndependenceOutcome::Exact { certificate, .. } => certificate,
            IndependenceOutcome::Bracket { best, .. } => best,
        }
    }

    pub fn bounds(&self) -> (usize, usize) {
        match self {
            IndependenceOutcome::Exact { size, .. } => (*size, *size),
            IndependenceOutcome::Bracket { lower, upper, .. } => (*lower, *upper),
        }
    }
}

pub fn is_independent(g: &Graph, set: &[usize]) -> bool {
    set.iter().enumerate().all(|(i, &u)| set[i + 1..].iter().all(|&v| u != v && !g.has_edge(u, v)))
}

/// Bitset over vertex indices.
#[derive(Clone, PartialEq, Eq)]
struct VertexSet(Vec<u64>);

impl VertexSet {
    fn empty(n: usize) -> Self {
        VertexSet(vec![0; n.div_ceil(64)])
    }

    fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        (0..n).for_each(|v| s.insert(v));
        s
    }

    fn insert(&mut self, v: usize) {
        self.0[v / 64] |= 1 << (v % 64);
    }

    fn remove(&mut self, v: usize) {
        self.0[v / 64] &= !(1 << (v % 64));
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn intersect(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn difference_in_place(&mut self, other: &VertexSet) {
        self.0.iter_mut().zip(&other.0).for_each(|(a, b)| *a &= !b);
    }

    fn first(&self) -> Option<usize> {
        self.0.iter().enumerate().find(|(_, &w)| w != 0).map(|(i, &w)| i * 64 + w.trailing_zeros() as usize)
    }
}

/// Maximum independent set by branch and bound (maximum clique in the
/// complement with greedy clique-cover bounds). The first lower bound is
/// a min-degree greedy set.
pub fn max_independent_set(g: &Graph, budget: Budget) -> IndependenceOutcome {
    let n = g.num_vertices();
    // Candidate-compatibility: v and w may share a set iff non-adjacent.
    let compatible: Vec<VertexSet> = (0..n)
        .map(|v| {
            let mut s = VertexSet::full(n);
            s.remove(v);
            for &w in g.neighbors(v) {
                s.remove(w as usize);
            }
            s
        })
        .collect();
    let mut search = IndependentSearch {
        compatible,
        best: greedy_independent_set(g),
        current: Vec::new(),
        meter: Meter::new(budget),
    };
    let root = VertexSet::full(n);
    let root_bound = search.cover_bound(&root);
    let finished = search.expand(root);
    let nodes = search.meter.nodes;
    let mut best = search.best;
    best.sort_unstable();
    debug_assert!(is_independent(g, &best));
    if finished {
        IndependenceOutcome::Exact { size: best.len(), certificate: best, nodes }
    } else {
        IndependenceOutcome::Bracket { lower: best.len(), upper: root_bound, best, nodes }
    }
}

pub fn greedy_independent_set(g: &Graph) -> Vec<usize> {
    let n = g.num_vertices();
    let mut alive = vec![true; n];
    let mut degree: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut set = Vec::new();
    while let Some(v) = (0..n).filter(|&v| alive[v]).min_by_key(|&v| (degree[v], v)) {
        set.push(v);
        let mut dead = vec![v];
        dead.extend(g.neighbors(v).iter().map(|&w| w as usize).filter(|&w| alive[w]));
        for &d in &dead {
            alive[d] = false;
        }
        for &d in &dead {
            for &w in g.neighbors(d) {
                if alive[w as usize] {
                    degree[w as usize] -= 1;
                }
            }
        }
    }
    set
}

struct IndependentSearch {
    compatible: Vec<VertexSet>,
    best: Vec<usize>,
    current: Vec<usize>,
    meter: Meter,
}

impl IndependentSearch {
    /// Partitions `candidates` greedily into cliques of `g`; returns the
    /// vertices in order together with the running number of cliques,
    /// which bounds the independent set inside any prefix.
    fn clique_cover_order(&self, candidates: &VertexSet) -> (Vec<usize>, Vec<usize>) {
        let mut remaining = candidates.clone();
        let mut order = Vec::new();
        let mut bounds = Vec::new();
        let mut k = 0;
        while !remaining.is_empty() {
            k += 1;
            let mut pool = remaining.clone();
            while let Some(v) = pool.first() {
                order.push(v);
                bounds.push(k);
                remaining.remove(v);
                pool.remove(v);
                // keep only neighbors of v: they can join the same clique
                pool.difference_in_place(&self.compatible[v]);
            }
        }
        (order, bounds)
    }

    fn cover_bound(&self, candidates: &VertexSet) -> usize {
        self.clique_cover_order(candidates).1.last().copied().unwrap_or(0)
    }

    /// Returns false when the budget ran out.
    fn expand(&mut self, mut candidates: VertexSet) -> bool {
        if self.meter.tick() {
            return false;
        }
        let (order, bounds) = self.clique_cover_order(&candidates);
        for idx in (0..order.len()).rev() {
            if self.current.len() + bounds[idx] <= self.best.len() {
                return true;
            }
            let v = order[idx];
            self.current.push(v);
            let next = candidates.intersect(&self.compatible[v]);
            if next.is_empty() {
                if self.current.len() > self.best.len() {
                    self.best = self.current.clone();
                }
            } else if !self.expand(next) {
                self.current.pop();
                return false;
            }
            self.current.pop();
            candidates.remove(v);
        }
        true
    }
}

#[derive(Debug, Clone)]
pub enum ParityClassOutcome {
    Found(Coloring),
    /// No coloring of this form exists with the requested number of colors.
    Infeasible,
    OutOfBudget,
}

/// Searches for a proper coloring of `SR_k` with at most `num_colors`
/// colors that is constant on every parity class `π^0`, `π^1` of every
/// cell. A reversal of length `L` joins parity `a` of one cell to parity
/// `a + L` of the other, so the search runs on the `k!` cells with a pair
/// of colors each.
pub fn parity_class_coloring(k: usize, num_colors: u32, budget: Budget) -> Result<ParityClassOutcome, SignedPermError> {
    if k > MAX_SIGNED_DEGREE {
        return Err(SignedPermError::TooLarge { k, limit: MAX_SIGNED_DEGREE });
    }
    let c = num_colors.min(8) as usize;
    if k == 0 {
        return Ok(if c >= 1 {
            ParityClassOutcome::Found(Coloring::from_colors(vec![0]))
        } else {
            ParityClassOutcome::Infeasible
        });
    }
    let pairs: Vec<(u32, u32)> =
        (0..c as u32).flat_map(|a| (0..c as u32).filter(move |&b| b != a).map(move |b| (a, b))).collect();
    if pairs.is_empty() {
        return Ok(ParityClassOutcome::Infeasible);
    }
    // compatible[l][p]: pairs q allowed next to p across a reversal of length parity l
    let compatible: [Vec<u64>; 2] = std::array::from_fn(|l| {
        pairs
            .iter()
            .map(|&(p0, p1)| {
                pairs.iter().enumerate().fold(0u64, |mask, (qi, &(q0, q1))| {
                    let ok = if l == 0 { q0 != p0 && q1 != p1 } else { q1 != p0 && q0 != p1 };
                    if ok {
                        mask | 1 << qi
                    } else {
                        mask
                    }
                })
            })
            .collect()
    });
    let cells = factorial(k);
    let neighbors: Vec<Vec<(usize, usize)>> = (0..cells)
        .map(|r| {
            let base = permutation_unrank(k, r);
            let mut out: Vec<(usize, usize)> = (0..k)
                .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
                .map(|(i, j)| {
                    let mut b = base.clone();
                    b[i..=j].reverse();
                    (permutation_rank(&b), (j - i + 1) % 2)
                })
                .collect();
            out.sort_unstable();
            out.dedup();
            out
        })
        .collect();
    let mut search = ParitySearch {
        pairs: &pairs,
        compatible: &compatible,
        neighbors: &neighbors,
        assigned: vec![None; cells],
        meter: Meter::new(budget),
    };
    let full = if pairs.len() == 64 { u64::MAX } else { (1u64 << pairs.len()) - 1 };
    let outcome = match search.solve(vec![full; cells], 0) {
        None => return Ok(ParityClassOutcome::OutOfBudget),
        Some(false) => return Ok(ParityClassOutcome::Infeasible),
        Some(true) => search.assigned,
    };
    let classes: Vec<(ParityClassToken, u32)> = outcome
        .iter()
        .enumerate()
        .flat_map(|(r, p)| {
            let (c0, c1) = pairs[p.expect("all cells assigned")];
            let base = permutation_unrank(k, r);
            [(ParityClassToken { base: base.clone(), parity: 0 }, c0), (ParityClassToken { base, parity: 1 }, c1)]
        })
        .collect();
    let coloring = expand_parity_coloring(k, &classes)?;
    debug_assert!(verify_coloring(SignedReversalGraph::build(k)?.graph(), &coloring).is_ok());
    Ok(ParityClassOutcome::Found(coloring))
}

struct ParitySearch<'a> {
    pairs: &'a [(u32, u32)],
    compatible: &'a [Vec<u64>; 2],
    neighbors: &'a [Vec<(usize, usize)>],
    assigned: Vec<Option<usize>>,
    meter: Meter,
}

impl ParitySearch<'_> {
    /// `None` when the budget ran out.
    fn solve(&mut self, domains: Vec<u64>, top: u32) -> Option<bool> {
        if self.meter.tick() {
            return None;
        }
        let Some(cell) = (0..domains.len())
            .filter(|&x| self.assigned[x].is_none())
            .min_by_key(|&x| (domains[x].count_ones(), std::cmp::Reverse(self.neighbors[x].len())))
        else {
            return Some(true);
        };
        let mut options = domains[cell];
        while options != 0 {
            let p = options.trailing_zeros() as usize;
            options &= options - 1;
            let (c0, c1) = self.pairs[p];
            // colors are interchangeable: open at most the next unused ones
            if c0 > top || c1 > top.max(c0 + 1) {
                continue;
            }
            let mut next = domains.clone();
            next[cell] = 1 << p;
            let mut dead = false;
            for &(y, l) in &self.neighbors[cell] {
                if self.assigned[y].is_none() && y != cell {
                    next[y] &= self.compatible[l][p];
                    dead |= next[y] == 0;
                }
            }
            if dead {
                continue;
            }
            self.assigned[cell] = Some(p);
            let new_top = top.max(c0 + 1).max(c1 + 1);
            match self.solve(next, new_top) {
                Some(true) => return Some(true),
                None => {
                    self.assigned[cell] = None;
                    return None;
                }
                Some(false) => self.assigned[cell] = None,
            }
        }
        Some(false)
    }
}
