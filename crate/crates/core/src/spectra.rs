//! Integer partitions, the eigenvalues of the flip graph indexed by
//! partitions of `n`, their hook-length multiplicities, exact spectrum
//! verification against a built graph, the Chung–Tobin matrices, and
//! Hoffman's ratio bounds.

use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{CellPartition, Graph, QuotientMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectrumError {
    #[error("not a partition: {0:?}")]
    BadPartition(Vec<usize>),
    #[error("hook product {hooks} does not divide {factorial}")]
    NonIntegralMultiplicity { factorial: BigUint, hooks: BigUint },
    #[error("multiplicities sum to {total}, graph has {vertices} vertices")]
    MultiplicitySum { total: BigUint, vertices: usize },
    #[error("product of (A - βI) is nonzero at ({row}, {col})")]
    AnnihilationFailed { row: usize, col: usize },
    #[error("moment {m}: trace(A^m) = {graph}, spectrum gives {formula}")]
    MomentMismatch { m: usize, graph: BigInt, formula: BigInt },
    #[error("matrix entries could overflow during exact verification")]
    Overflow,
    #[error("matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("matrix is not square")]
    NotSquare,
}

/// A partition of `n`: weakly decreasing positive parts. Ordered
/// lexicographically on the parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct IntegerPartition {
    parts: Vec<usize>,
}

impl IntegerPartition {
    /// Sorts the parts into descending order; rejects zeros and the empty list.
    pub fn from_parts(mut parts: Vec<usize>) -> Result<Self, SpectrumError> {
        if parts.is_empty() || parts.contains(&0) {
            return Err(SpectrumError::BadPartition(parts));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(IntegerPartition { parts })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn size(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Column lengths of the Young diagram.
    pub fn transpose(&self) -> IntegerPartition {
        let cols = (0..self.parts[0]).map(|j| self.parts.iter().filter(|&&p| p > j).count()).collect();
        IntegerPartition { parts: cols }
    }

    pub fn doubled(&self) -> IntegerPartition {
        IntegerPartition { parts: self.parts.iter().map(|p| 2 * p).collect() }
    }
}

impl TryFrom<Vec<usize>> for IntegerPartition {
    type Error = SpectrumError;

    fn try_from(parts: Vec<usize>) -> Result<Self, Self::Error> {
        let sorted = parts.windows(2).all(|w| w[0] >= w[1]);
        if !sorted {
            return Err(SpectrumError::BadPartition(parts));
        }
        Self::from_parts(parts)
    }
}

impl From<IntegerPartition> for Vec<usize> {
    fn from(p: IntegerPartition) -> Self {
        p.parts
    }
}

impl fmt::Display for IntegerPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str(")")
    }
}

/// All partitions of `n` in descending lexicographic order.
pub fn enumerate_partitions(n: usize) -> Vec<IntegerPartition> {
    fn rec(remaining: usize, max_part: usize, prefix: &mut Vec<usize>, out: &mut Vec<IntegerPartition>) {
        if remaining == 0 {
            out.push(IntegerPartition { parts: prefix.clone() });
            return;
        }
        for p in (1..=remaining.min(max_part)).rev() {
            prefix.push(p);
            rec(remaining - p, p, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        rec(n, n, &mut Vec::new(), &mut out);
    }
    out
}

/// `Σ_j λ_j (λ_j − j)` with `j` counted from 1.
pub fn beta_eigenvalue(lambda: &IntegerPartition) -> i64 {
    lambda.parts.iter().enumerate().map(|(j, &p)| p as i64 * (p as i64 - (j as i64 + 1))).sum()
}

pub fn hook_lengths(mu: &IntegerPartition) -> Vec<usize> {
    let transposed = mu.transpose();
    let mut hooks = Vec::with_capacity(mu.size());
    for (i, &row) in mu.parts.iter().enumerate() {
        for j in 0..row {
            // 1-indexed: mu_i + mu'_j - i - j + 1
            hooks.push(row + transposed.parts[j] - (i + 1) - (j + 1) + 1);
        }
    }
    hooks
}

fn big_factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

/// Dimension of the irreducible indexed by `2λ`: `(2n)! / Π hooks`.
pub fn eigenvalue_multiplicity(lambda: &IntegerPartition) -> Result<BigUint, SpectrumError> {
    let mu = lambda.doubled();
    let factorial = big_factorial(mu.size());
    let hooks = hook_lengths(&mu).into_iter().fold(BigUint::one(), |acc, h| acc * BigUint::from(h));
    let (q, r) = factorial.div_rem(&hooks);
    if !r.is_zero() {
        return Err(SpectrumError::NonIntegralMultiplicity { factorial, hooks });
    }
    Ok(q)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectrumEntry {
    pub eigenvalue: i64,
    pub multiplicity: BigUint,
    pub sources: Vec<IntegerPartition>,
}

/// Wire form: multiplicity as a decimal string.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct SpectrumEntryJson {
    pub eigenvalue: i64,
    pub multiplicity: String,
    pub partitions: Vec<Vec<usize>>,
}

impl From<&SpectrumEntry> for SpectrumEntryJson {
    fn from(e: &SpectrumEntry) -> Self {
        SpectrumEntryJson {
            eigenvalue: e.eigenvalue,
            multiplicity: e.multiplicity.to_string(),
            partitions: e.sources.iter().map(|p| p.parts.clone()).collect(),
        }
    }
}

impl TryFrom<&SpectrumEntryJson> for SpectrumEntry {
    type Error = SpectrumError;

    fn try_from(e: &SpectrumEntryJson) -> Result<Self, Self::Error> {
        let multiplicity = e.multiplicity.parse().map_err(|_| SpectrumError::BadPartition(vec![]))?;
        let sources = e.partitions.iter().map(|p| IntegerPartition::try_from(p.clone())).collect::<Result<_, _>>()?;
        Ok(SpectrumEntry { eigenvalue: e.eigenvalue, multiplicity, sources })
    }
}

/// Spectrum of the flip graph on perfect matchings of `K_2n`, coinciding
/// eigenvalues merged, sorted by decreasing eigenvalue.
pub fn flip_spectrum(n: usize) -> Vec<SpectrumEntry> {
    let mut entries: Vec<SpectrumEntry> = Vec::new();
    for lambda in enumerate_partitions(n) {
        let beta = beta_eigenvalue(&lambda);
        let mult = eigenvalue_multiplicity(&lambda).expect("hook-length quotient is integral");
        match entries.iter_mut().find(|e| e.eigenvalue == beta) {
            Some(e) => {
                e.multiplicity += mult;
                e.sources.push(lambda);
            }
            None => entries.push(SpectrumEntry { eigenvalue: beta, multiplicity: mult, sources: vec![lambda] }),
        }
    }
    entries.sort_by_key(|e| std::cmp::Reverse(e.eigenvalue));
    entries
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectrumVerification {
    pub distinct_eigenvalues: usize,
    /// `trace(A^m)` for `m = 0..distinct_eigenvalues`.
    pub moments: Vec<BigInt>,
}

/// Exact check that `spectrum` is the adjacency spectrum of `g`:
/// the product of `A − βI` over the distinct `β` vanishes (so every
/// eigenvalue is among them), and `trace(A^m) = Σ mult·β^m` for
/// `m < #distinct` (which pins the multiplicities).
pub fn verify_spectrum_exact(g: &Graph, spectrum: &[SpectrumEntry]) -> Result<SpectrumVerification, SpectrumError> {
    let n = g.num_vertices();
    let total: BigUint = spectrum.iter().map(|e| &e.multiplicity).sum();
    if total != BigUint::from(n) {
        return Err(SpectrumError::MultiplicitySum { total, vertices: n });
    }
    let max_degree = (0..n).map(|v| g.degree(v)).max().unwrap_or(0) as f64;
    let bound: f64 = spectrum.iter().map(|e| max_degree + e.eigenvalue.unsigned_abs() as f64).map(f64::log2).sum();
    if bound + (n as f64).log2() > 120.0 {
        return Err(SpectrumError::Overflow);
    }

    let mut product = DenseInt::identity(n);
    for e in spectrum {
        product = product.apply_shifted_adjacency(g, e.eigenvalue as i128);
    }
    if let Some((row, col)) = product.first_nonzero() {
        return Err(SpectrumError::AnnihilationFailed { row, col });
    }

    let mut power = DenseInt::identity(n);
    let mut moments = Vec::with_capacity(spectrum.len());
    for m in 0..spectrum.len() {
        if m > 0 {
            power = power.apply_shifted_adjacency(g, 0);
        }
        let graph_trace = BigInt::from(power.trace());
        let formula: BigInt = spectrum
            .iter()
            .map(|e| BigInt::from(e.multiplicity.clone()) * BigInt::from(e.eigenvalue).pow(m as u32))
            .sum();
        if graph_trace != formula {
            return Err(SpectrumError::MomentMismatch { m, graph: graph_trace, formula });
        }
        moments.push(graph_trace);
    }
    Ok(SpectrumVerification { distinct_eigenvalues: spectrum.len(), moments })
}

/// Row-major dense integer matrix used for the exact checks.
struct DenseInt {
    n: usize,
    data: Vec<i128>,
}

impl DenseInt {
    fn identity(n: usize) -> Self {
        let mut data = vec![0; n * n];
        (0..n).for_each(|i| data[i * n + i] = 1);
        DenseInt { n, data }
    }

    /// `(A − βI) · self`.
    fn apply_shifted_adjacency(&self, g: &Graph, beta: i128) -> Self {
        let n = self.n;
        let mut out = vec![0i128; n * n];
        out.par_chunks_mut(n.max(1)).enumerate().for_each(|(u, row)| {
            for &w in g.neighbors(u) {
                let src = &self.data[w as usize * n..(w as usize + 1) * n];
                row.iter_mut().zip(src).for_each(|(r, s)| *r += s);
            }
            if beta != 0 {
                let own = &self.data[u * n..(u + 1) * n];
                row.iter_mut().zip(own).for_each(|(r, s)| *r -= beta * s);
            }
        });
        DenseInt { n, data: out }
    }

    fn trace(&self) -> i128 {
        (0..self.n).map(|i| self.data[i * self.n + i]).sum()
    }

    fn first_nonzero(&self) -> Option<(usize, usize)> {
        self.data.iter().position(|&x| x != 0).map(|p| (p / self.n, p % self.n))
    }
}

/// Whether `Π (B − βI)` over `eigenvalues` is the zero matrix, i.e. every
/// eigenvalue of the (diagonalizable) square matrix `B` is listed.
pub fn annihilates(matrix: &[Vec<i64>], eigenvalues: &[i64]) -> bool {
    let t = matrix.len();
    let mut product: Vec<Vec<i128>> = (0..t).map(|i| (0..t).map(|j| i128::from(i == j)).collect()).collect();
    for &beta in eigenvalues {
        let mut next = vec![vec![0i128; t]; t];
        for i in 0..t {
            for k in 0..t {
                let b = matrix[i][k] as i128 - if i == k { beta as i128 } else { 0 };
                if b != 0 {
                    for j in 0..t {
                        next[i][j] += b * product[k][j];
                    }
                }
            }
        }
        product = next;
    }
    product.iter().all(|r| r.iter().all(|&x| x == 0))
}

/// Eigenvalues (descending) of the quotient matrix of an equitable
/// partition, via the symmetric matrix `S^{1/2} B S^{-1/2}` with `S` the
/// diagonal of cell sizes.
pub fn quotient_eigenvalues(quotient: &QuotientMatrix, partition: &CellPartition) -> Result<Vec<f64>, SpectrumError> {
    let sizes = partition.sizes();
    let t = quotient.dim();
    let m = DMatrix::from_fn(t, t, |i, j| {
        quotient.entries[i][j] as f64 * (sizes[i] as f64).sqrt() / (sizes[j] as f64).sqrt()
    });
    symmetric_eigenvalues(&m)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChungTobinSystem {
    pub n: usize,
    pub x: i64,
    /// `X[i][j] = min(i, j, n−i+1, n−j+1)`, 1-indexed.
    pub matrix: Vec<Vec<i64>>,
    /// Diagonal of `D`, chosen so every row of `D + X` sums to `x`.
    pub diagonal: Vec<i64>,
}

impl ChungTobinSystem {
    pub fn new(n: usize, x: i64) -> Self {
        let matrix: Vec<Vec<i64>> =
            (1..=n).map(|i| (1..=n).map(|j| i.min(j).min(n - i + 1).min(n - j + 1) as i64).collect()).collect();
        let diagonal = matrix.iter().map(|row| x - row.iter().sum::<i64>()).collect();
        ChungTobinSystem { n, x, matrix, diagonal }
    }

    /// `μ_k = x − ⌊k/2⌋ n + 2 C(⌊k/2⌋, 2)` for `k = 1..=n`, as listed.
    pub fn formula_eigenvalues(&self) -> Vec<i64> {
        let n = self.n as i64;
        (1..=n)
            .map(|k| {
                let h = k / 2;
                self.x - h * n + h * (h - 1)
            })
            .collect()
    }

    /// `D + sign·X` as a dense matrix.
    pub fn shifted(&self, sign: i64) -> Vec<Vec<i64>> {
        (0..self.n)
            .map(|i| {
                (0..self.n).map(|j| sign * self.matrix[i][j] + if i == j { self.diagonal[i] } else { 0 }).collect()
            })
            .collect()
    }

    /// `[[D, X], [X, D]]`.
    pub fn block_matrix(&self) -> Vec<Vec<i64>> {
        let n = self.n;
        (0..2 * n)
            .map(|r| {
                (0..2 * n)
                    .map(|c| {
                        let (i, j) = (r % n, c % n);
                        if (r < n) == (c < n) {
                            if i == j {
                                self.diagonal[i]
                            } else {
                                0
                            }
                        } else {
                            self.matrix[i][j]
                        }
                    })
                    .collect()
            })
            .collect()
    }
}

pub fn chung_tobin_system(n: usize, x: i64) -> (ChungTobinSystem, Vec<i64>) {
    let system = ChungTobinSystem::new(n, x);
    let eigenvalues = system.formula_eigenvalues();
    (system, eigenvalues)
}

/// `[[D′, X], [X, D′]]` with rows of `D′ + X` summing to `C(n+1, 2)`:
/// the quotient of `SR_n` by the position and sign of its largest symbol.
pub fn sr_block_quotient(n: usize) -> (ChungTobinSystem, Vec<Vec<i64>>) {
    let system = ChungTobinSystem::new(n, (n * (n + 1) / 2) as i64);
    let block = system.block_matrix();
    (system, block)
}

pub fn to_dmatrix(m: &[Vec<i64>]) -> DMatrix<f64> {
    let t = m.len();
    DMatrix::from_fn(t, t, |i, j| m[i][j] as f64)
}

pub fn adjacency_dmatrix(g: &Graph) -> DMatrix<f64> {
    let n = g.num_vertices();
    let mut m = DMatrix::zeros(n, n);
    for (u, v) in g.edges() {
        m[(u, v)] = 1.0;
        m[(v, u)] = 1.0;
    }
    m
}

/// Full real spectrum of a symmetric matrix, descending.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Result<Vec<f64>, SpectrumError> {
    if m.nrows() != m.ncols() {
        return Err(SpectrumError::NotSquare);
    }
    let n = m.nrows();
    let scale = m.iter().fold(1.0f64, |a, &x| a.max(x.abs()));
    for i in 0..n {
        for j in i + 1..n {
            if (m[(i, j)] - m[(j, i)]).abs() > 1e-12 * scale {
                return Err(SpectrumError::NotSymmetric(i, j));
            }
        }
    }
    let mut values: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

pub fn graph_eigenvalues(g: &Graph) -> Vec<f64> {
    symmetric_eigenvalues(&adjacency_dmatrix(g)).expect("adjacency matrices are symmetric")
}

/// Whether every value in `wanted` occurs among `spectrum` (as a multiset) within `tol`.
pub fn multiset_contained(wanted: &[f64], spectrum: &[f64], tol: f64) -> bool {
    let mut used = vec![false; spectrum.len()];
    wanted.iter().all(|&w| match (0..spectrum.len()).find(|&i| !used[i] && (spectrum[i] - w).abs() <= tol) {
        Some(i) => {
            used[i] = true;
            true
        }
        None => false,
    })
}

/// Whether every value in `wanted` occurs among `spectrum` within `tol`,
/// ignoring multiplicity.
pub fn values_contained(wanted: &[f64], spectrum: &[f64], tol: f64) -> bool {
    wanted.iter().all(|&w| spectrum.iter().any(|&s| (s - w).abs() <= tol))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HoffmanBounds {
    /// `⌈1 + d / |θ_min|⌉`.
    pub chromatic_lower: u64,
    /// `⌊N |θ_min| / (d + |θ_min|)⌋`.
    #[serde(serialize_with = "serialize_display")]
    pub independence_upper: BigUint,
}

fn serialize_display<S: serde::Serializer, T: fmt::Display>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// Ratio bounds for a `degree`-regular graph with least eigenvalue `min_eig < 0`.
pub fn hoffman_bounds(degree: u64, min_eig: i64, num_vertices: &BigUint) -> HoffmanBounds {
    assert!(min_eig < 0, "least eigenvalue of a nonempty graph is negative");
    let theta = min_eig.unsigned_abs();
    let chromatic_lower = (theta + degree).div_ceil(theta);
    let independence_upper = num_vertices * BigUint::from(theta) / BigUint::from(degree + theta);
    HoffmanBounds { chromatic_lower, independence_upper }
}

/// Hoffman bounds for the flip graph from its closed-form spectrum.
pub fn flip_hoffman_bounds(n: usize) -> HoffmanBounds {
    let spectrum = flip_spectrum(n);
    let min = spectrum.last().expect("nonempty").eigenvalue;
    let vertices: BigUint = spectrum.iter().map(|e| &e.multiplicity).sum();
    hoffman_bounds((n * (n - 1)) as u64, min, &vertices)
}
