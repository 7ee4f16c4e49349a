//! Immutable undirected simple graphs on dense vertex indices `0..n`.
//!
//! Adjacency is stored in compressed-row form with every neighbor list
//! sorted, so membership tests are binary searches and iteration is
//! cache friendly. Everything built by the higher modules (flip graphs,
//! signed reversal graphs, reversal graphs, box products) lives in a
//! [`Graph`].

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::io::BufRead;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for graph on {num_vertices} vertices")]
    VertexOutOfRange { vertex: usize, num_vertices: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("partition does not cover the graph: {0}")]
    BadPartition(String),
    #[error(
        "partition is not equitable: vertices {first} and {second} of cell {cell} have \
         {first_count} and {second_count} neighbors in cell {target}"
    )]
    NotEquitable { cell: usize, target: usize, first: usize, second: usize, first_count: u64, second_count: u64 },
    #[error("edge list parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
    edge_count: usize,
}

impl Graph {
    /// Builds a graph from an arbitrary edge list. Duplicate edges (in
    /// either orientation) collapse to one.
    pub fn from_edges(num_vertices: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut adjacency = vec![Vec::new(); num_vertices];
        for &(u, v) in edges {
            for w in [u, v] {
                if w >= num_vertices {
                    return Err(GraphError::VertexOutOfRange { vertex: w, num_vertices });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            adjacency[u].push(v as u32);
            adjacency[v].push(u as u32);
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Self::from_sorted_lists(adjacency))
    }

    /// Builds a graph from per-vertex neighbor lists. Lists are sorted and
    /// deduplicated; the relation must already be symmetric.
    pub fn from_adjacency(mut adjacency: Vec<Vec<u32>>) -> Result<Self, GraphError> {
        let num_vertices = adjacency.len();
        for (u, list) in adjacency.iter_mut().enumerate() {
            list.sort_unstable();
            list.dedup();
            for &v in list.iter() {
                if v as usize >= num_vertices {
                    return Err(GraphError::VertexOutOfRange { vertex: v as usize, num_vertices });
                }
                if v as usize == u {
                    return Err(GraphError::SelfLoop(u));
                }
            }
        }
        let g = Self::from_sorted_lists(adjacency);
        for u in 0..g.num_vertices() {
            for &v in g.neighbors(u) {
                if !g.has_edge(v as usize, u) {
                    return Err(GraphError::Parse {
                        line: 0,
                        message: format!("asymmetric adjacency: {u}->{v} without {v}->{u}"),
                    });
                }
            }
        }
        Ok(g)
    }

    fn from_sorted_lists(adjacency: Vec<Vec<u32>>) -> Self {
        let mut offsets = Vec::with_capacity(adjacency.len() + 1);
        offsets.push(0);
        let total: usize = adjacency.iter().map(Vec::len).sum();
        let mut neighbors = Vec::with_capacity(total);
        for list in adjacency {
            neighbors.extend_from_slice(&list);
            offsets.push(neighbors.len());
        }
        Graph { offsets, neighbors, edge_count: total / 2 }
    }

    /// Builds a graph whose neighbor lists are produced independently per
    /// vertex (e.g. by a neighbor-generating rule on a ranked object set).
    /// The rule must be symmetric and loop-free; this is asserted.
    pub(crate) fn from_neighbor_fn<F>(num_vertices: usize, neighbors_of: F) -> Self
    where
        F: Fn(usize) -> Vec<u32> + Sync,
    {
        use rayon::prelude::*;
        let adjacency: Vec<Vec<u32>> = (0..num_vertices)
            .into_par_iter()
            .map(|u| {
                let mut list = neighbors_of(u);
                list.sort_unstable();
                list.dedup();
                list
            })
            .collect();
        let g = Self::from_sorted_lists(adjacency);
        debug_assert!(g.check_invariants().is_ok());
        g
    }

    pub fn num_vertices(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&(v as u32)).is_ok()
    }

    /// Common degree if the graph is regular (`Some(0)` for the empty graph).
    pub fn regular_degree(&self) -> Option<usize> {
        let n = self.num_vertices();
        if n == 0 {
            return Some(0);
        }
        let d = self.degree(0);
        (1..n).all(|v| self.degree(v) == d).then_some(d)
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.num_vertices()).flat_map(move |u| {
            self.neighbors(u).iter().map(|&v| v as usize).filter(move |&v| u < v).map(move |v| (u, v))
        })
    }

    /// Symmetry, sortedness, no loops, handshake identity.
    pub fn check_invariants(&self) -> Result<(), String> {
        let n = self.num_vertices();
        let mut degree_sum = 0;
        for u in 0..n {
            let list = self.neighbors(u);
            degree_sum += list.len();
            if list.windows(2).any(|w| w[0] >= w[1]) {
                return Err(format!("neighbors of {u} not strictly sorted"));
            }
            for &v in list {
                let v = v as usize;
                if v == u {
                    return Err(format!("self-loop at {u}"));
                }
                if v >= n || !self.has_edge(v, u) {
                    return Err(format!("edge {u}-{v} not symmetric"));
                }
            }
        }
        if degree_sum != 2 * self.edge_count {
            return Err("handshake identity violated".into());
        }
        Ok(())
    }

    pub fn induced_subgraph(&self, vertices: &[usize]) -> Result<InducedSubgraph, GraphError> {
        let n = self.num_vertices();
        let mut to_sub = vec![None; n];
        let mut to_parent = Vec::with_capacity(vertices.len());
        for &v in vertices {
            if v >= n {
                return Err(GraphError::VertexOutOfRange { vertex: v, num_vertices: n });
            }
            if to_sub[v].is_none() {
                to_sub[v] = Some(to_parent.len());
                to_parent.push(v);
            }
        }
        let adjacency = to_parent
            .iter()
            .map(|&v| {
                self.neighbors(v).iter().filter_map(|&w| to_sub[w as usize].map(|i| i as u32)).collect::<Vec<_>>()
            })
            .collect::<Vec<_>>();
        let mut adjacency = adjacency;
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(InducedSubgraph { graph: Self::from_sorted_lists(adjacency), to_parent, to_sub })
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let n = self.num_vertices();
        let mut seen = vec![false; n];
        let mut components = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            queue.push_back(start);
            let mut component = Vec::new();
            while let Some(u) = queue.pop_front() {
                component.push(u);
                for &v in self.neighbors(u) {
                    let v = v as usize;
                    if !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
            component.sort_unstable();
            components.push(component);
        }
        components
    }

    pub fn is_connected(&self) -> bool {
        self.num_vertices() <= 1 || self.connected_components().len() == 1
    }

    /// Cartesian product; vertex `(a, b)` has index `a * |V(h)| + b`.
    pub fn box_product(&self, h: &Graph) -> Graph {
        let nh = h.num_vertices();
        let n = self.num_vertices() * nh;
        let adjacency = (0..n)
            .map(|x| {
                let (a, b) = (x / nh, x % nh);
                let mut list: Vec<u32> = self
                    .neighbors(a)
                    .iter()
                    .map(|&a2| (a2 as usize * nh + b) as u32)
                    .chain(h.neighbors(b).iter().map(|&b2| (a * nh + b2 as usize) as u32))
                    .collect();
                list.sort_unstable();
                list
            })
            .collect();
        Self::from_sorted_lists(adjacency)
    }

    /// Breadth-first distances from `source` together with the number of
    /// shortest paths to every vertex.
    pub fn bfs_layers(&self, source: usize) -> Result<BfsLayers, GraphError> {
        let n = self.num_vertices();
        if source >= n {
            return Err(GraphError::VertexOutOfRange { vertex: source, num_vertices: n });
        }
        let mut distance = vec![UNREACHABLE; n];
        let mut geodesics = vec![BigUint::zero(); n];
        let mut order = Vec::with_capacity(n);
        distance[source] = 0;
        geodesics[source] = BigUint::one();
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &v in self.neighbors(u) {
                let v = v as usize;
                if distance[v] == UNREACHABLE {
                    distance[v] = distance[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        // BFS order is a topological order of the shortest-path DAG.
        for &v in order.iter().skip(1) {
            let mut count = BigUint::zero();
            for &u in self.neighbors(v) {
                let u = u as usize;
                if distance[u] != UNREACHABLE && distance[u] + 1 == distance[v] {
                    count += &geodesics[u];
                }
            }
            geodesics[v] = count;
        }
        Ok(BfsLayers { distance, geodesics })
    }

    pub fn eccentricity(&self, source: usize) -> Result<Option<usize>, GraphError> {
        let layers = self.bfs_layers(source)?;
        if layers.distance.contains(&UNREACHABLE) {
            return Ok(None);
        }
        Ok(layers.distance.iter().copied().max())
    }

    /// Quotient matrix of an equitable partition, or a witness pair of
    /// vertices in one cell with different neighbor counts into some cell.
    pub fn check_equitable(&self, partition: &CellPartition) -> Result<QuotientMatrix, GraphError> {
        partition.validate(self.num_vertices())?;
        let t = partition.num_cells();
        let mut entries = vec![vec![0u64; t]; t];
        let mut counts = vec![0u64; t];
        for (i, cell) in partition.cells().iter().enumerate() {
            let first = cell[0];
            for (k, &v) in cell.iter().enumerate() {
                counts.iter_mut().for_each(|c| *c = 0);
                for &w in self.neighbors(v) {
                    counts[partition.cell_of(w as usize)] += 1;
                }
                if k == 0 {
                    entries[i].copy_from_slice(&counts);
                } else if let Some(j) = (0..t).find(|&j| counts[j] != entries[i][j]) {
                    return Err(GraphError::NotEquitable {
                        cell: i,
                        target: j,
                        first,
                        second: v,
                        first_count: entries[i][j],
                        second_count: counts[j],
                    });
                }
            }
        }
        Ok(QuotientMatrix { entries })
    }

    /// Splits cells by neighbor-count signature until nothing changes.
    /// A partition is equitable exactly when this leaves it unchanged.
    pub fn refine_partition(&self, partition: &CellPartition) -> Result<CellPartition, GraphError> {
        partition.validate(self.num_vertices())?;
        let mut current = partition.clone();
        loop {
            let t = current.num_cells();
            let mut cells = Vec::new();
            for cell in current.cells() {
                let mut keyed: Vec<(Vec<u64>, usize)> = cell
                    .iter()
                    .map(|&v| {
                        let mut sig = vec![0u64; t];
                        for &w in self.neighbors(v) {
                            sig[current.cell_of(w as usize)] += 1;
                        }
                        (sig, v)
                    })
                    .collect();
                keyed.sort();
                let mut block: Vec<usize> = Vec::new();
                for (idx, (sig, v)) in keyed.iter().enumerate() {
                    if idx > 0 && keyed[idx - 1].0 != *sig {
                        cells.push(std::mem::take(&mut block));
                    }
                    block.push(*v);
                }
                cells.push(block);
            }
            for c in &mut cells {
                c.sort_unstable();
            }
            let next = CellPartition::new(self.num_vertices(), cells)?;
            if next.num_cells() == t {
                return Ok(current);
            }
            current = next;
        }
    }

    /// Edge-list text: `p <n> <m>` then `e <u> <v>` per edge, `u < v`.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::with_capacity(16 * self.edge_count + 32);
        let _ = writeln!(out, "p {} {}", self.num_vertices(), self.edge_count);
        for (u, v) in self.edges() {
            let _ = writeln!(out, "e {u} {v}");
        }
        out
    }

    pub fn read_edge_list<R: BufRead>(reader: R) -> Result<Self, GraphError> {
        let mut header: Option<(usize, usize)> = None;
        let mut edges = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.map_err(|e| GraphError::Parse { line: lineno, message: e.to_string() })?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let tag = fields.next().unwrap_or_default();
            let nums: Result<Vec<usize>, _> = fields.map(str::parse).collect();
            let nums = nums.map_err(|e| GraphError::Parse { line: lineno, message: e.to_string() })?;
            let bad = |message: &str| GraphError::Parse { line: lineno, message: message.into() };
            match (tag, nums.as_slice()) {
                ("p", [n, m]) if header.is_none() => header = Some((*n, *m)),
                ("p", _) => return Err(bad("malformed or repeated header")),
                ("e", [u, v]) if header.is_some() => edges.push((*u, *v)),
                ("e", _) => return Err(bad("malformed edge or edge before header")),
                _ => return Err(bad("unknown line tag")),
            }
        }
        let (n, m) = header.ok_or(GraphError::Parse { line: 0, message: "missing header".into() })?;
        let g = Graph::from_edges(n, &edges)?;
        if g.edge_count() != m {
            return Err(GraphError::Parse {
                line: 0,
                message: format!("header declares {m} edges, found {}", g.edge_count()),
            });
        }
        Ok(g)
    }
}

pub const UNREACHABLE: usize = usize::MAX;

#[derive(Debug, Clone)]
pub struct InducedSubgraph {
    pub graph: Graph,
    /// Sub-index to parent index.
    pub to_parent: Vec<usize>,
    /// Parent index to sub-index, `None` outside the vertex set.
    pub to_sub: Vec<Option<usize>>,
}

#[derive(Debug, Clone)]
pub struct BfsLayers {
    /// [`UNREACHABLE`] marks vertices in other components.
    pub distance: Vec<usize>,
    pub geodesics: Vec<BigUint>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellPartition {
    cells: Vec<Vec<usize>>,
    cell_of: Vec<usize>,
}

impl CellPartition {
    pub fn new(num_vertices: usize, cells: Vec<Vec<usize>>) -> Result<Self, GraphError> {
        let mut cell_of = vec![usize::MAX; num_vertices];
        for (i, cell) in cells.iter().enumerate() {
            if cell.is_empty() {
                return Err(GraphError::BadPartition(format!("cell {i} is empty")));
            }
            for &v in cell {
                if v >= num_vertices {
                    return Err(GraphError::VertexOutOfRange { vertex: v, num_vertices });
                }
                if cell_of[v] != usize::MAX {
                    return Err(GraphError::BadPartition(format!("vertex {v} in two cells")));
                }
                cell_of[v] = i;
            }
        }
        if let Some(v) = cell_of.iter().position(|&c| c == usize::MAX) {
            return Err(GraphError::BadPartition(format!("vertex {v} in no cell")));
        }
        Ok(CellPartition { cells, cell_of })
    }

    /// Groups vertices by a key; cells ordered by key.
    pub fn from_key<K: Ord + Clone>(num_vertices: usize, key: impl Fn(usize) -> K) -> Self {
        let mut groups: std::collections::BTreeMap<K, Vec<usize>> = Default::default();
        for v in 0..num_vertices {
            groups.entry(key(v)).or_default().push(v);
        }
        Self::new(num_vertices, groups.into_values().collect()).expect("grouping covers all vertices")
    }

    pub fn unit(num_vertices: usize) -> Self {
        Self::from_key(num_vertices, |_| ())
    }

    fn validate(&self, num_vertices: usize) -> Result<(), GraphError> {
        if self.cell_of.len() != num_vertices {
            return Err(GraphError::BadPartition(format!(
                "partition of {} vertices used on graph with {num_vertices}",
                self.cell_of.len()
            )));
        }
        Ok(())
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn cell_of(&self, v: usize) -> usize {
        self.cell_of[v]
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.cells.iter().map(Vec::len).collect()
    }
}

/// `entries[i][j]` is the number of neighbors in cell `j` of any vertex of cell `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientMatrix {
    pub entries: Vec<Vec<u64>>,
}

impl QuotientMatrix {
    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn row_sums(&self) -> Vec<u64> {
        self.entries.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn to_i64(&self) -> Vec<Vec<i64>> {
        self.entries.iter().map(|r| r.iter().map(|&x| x as i64).collect()).collect()
    }
}
