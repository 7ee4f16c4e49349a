//! Command-line front end. Every command writes JSON (or a plain edge list
//! or coloring file) to stdout or `--out`; with `--out` a run manifest is
//! written next to it.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::coloring::{
    dsatur_coloring, exact_chromatic_number, gf_coloring, layered_coloring, max_independent_set, parity_class_coloring,
    verify_coloring, Budget, ChromaticOutcome, Coloring, ColoringError, IndependenceOutcome, ParityClassOutcome,
};
use crate::graph::{CellPartition, Graph, GraphError, UNREACHABLE};
use crate::matchings::{matching_distance, FlipGraph, MatchingError, PerfectMatching};
use crate::signed_perm::{
    build_reversal_graph, expand_parity_coloring, parse_parity_fixture, SignedPermError, SignedReversalGraph,
};
use crate::spectra::{
    flip_hoffman_bounds, flip_spectrum, quotient_eigenvalues, verify_spectrum_exact, SpectrumEntryJson, SpectrumError,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BRACKET: i32 = 3;

/// Largest flip graph the exact spectrum check accepts (dense `N × N`).
const MAX_EXACT_SPECTRUM: usize = 5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Matching(#[from] MatchingError),
    #[error(transparent)]
    SignedPerm(#[from] SignedPermError),
    #[error(transparent)]
    Coloring(#[from] ColoringError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
}

#[derive(Debug, Parser)]
#[command(name = "flipgraph", version, about = "Flip graphs of perfect matchings and signed reversal graphs")]
pub struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Time limit for exact searches.
    #[arg(long, global = true, default_value_t = 600.0)]
    pub budget_seconds: f64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Manifest path (default `<out>.manifest.json` when `--out` is given).
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Flip graph on the perfect matchings of `K_2n`.
    Flip,
    /// Signed reversal graph `SR_n`.
    Sr,
    /// Reversal graph `R_n`.
    Rev,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumFamily {
    Flip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ColorMethod {
    Gf,
    Layered,
    Dsatur,
    Exact,
    /// Constant on the parity classes of each cell (signed reversal graphs).
    Parity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum QuotientKind {
    /// Types of the flip graph.
    Type,
    /// Cells `V_π` of the signed reversal graph.
    Cells,
    /// Cells by sign and position of the largest symbol.
    Positions,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Edge list of a graph.
    Gen { family: Family, n: usize },
    /// Closed-form spectrum of the flip graph.
    Spectrum {
        family: SpectrumFamily,
        n: usize,
        /// Check the spectrum exactly against the built graph.
        #[arg(long)]
        verify_exact: bool,
    },
    /// Build and verify a coloring.
    Color {
        method: ColorMethod,
        family: Family,
        n: usize,
        /// Also write the coloring file here.
        #[arg(long)]
        save: Option<PathBuf>,
    },
    /// Check a coloring file against an edge list.
    VerifyColoring { graph: PathBuf, coloring: PathBuf },
    /// Expand a parity class listing into a coloring file of `SR_k`.
    ExpandParity { k: usize, fixture: PathBuf },
    /// Maximum independent set.
    Alpha { family: Family, n: usize },
    /// Quotient matrix of an equitable partition.
    Quotient { kind: QuotientKind, family: Family, n: usize },
    /// Flip distance between two matchings, written like `0-1,2-3`.
    Distance { n: usize, m1: String, m2: String },
    /// Distance layers and shortest-path counts from the identity matching.
    Geodesics { n: usize },
}

/// What a command produced, and the exit status it implies.
pub struct Outcome {
    pub body: String,
    pub status: i32,
}

impl Outcome {
    fn json(value: &Value, status: i32) -> Self {
        let mut body = serde_json::to_string_pretty(value).expect("JSON values serialize");
        body.push('\n');
        Outcome { body, status }
    }

    fn text(body: String) -> Self {
        Outcome { body, status: EXIT_OK }
    }
}

#[derive(Debug, Serialize)]
struct RunManifest {
    command: String,
    parameters: Vec<String>,
    seed: u64,
    versions: BTreeMap<&'static str, &'static str>,
    wall_time_seconds: f64,
    exit_status: i32,
    result_sha256: String,
}

pub fn run() -> i32 {
    run_from(std::env::args_os())
}

pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if let Some(threads) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    let start = Instant::now();
    let outcome = match execute(&cli) {
        Ok(outcome) => outcome,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let wall = start.elapsed().as_secs_f64();
    if let Err(e) = emit(&cli, &args, &outcome, wall) {
        eprintln!("error: {e}");
        return EXIT_USAGE;
    }
    outcome.status
}

fn emit(cli: &Cli, args: &[std::ffi::OsString], outcome: &Outcome, wall: f64) -> Result<(), CliError> {
    match &cli.out {
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(outcome.body.as_bytes())
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source })?;
        }
        Some(path) => write_file(path, &outcome.body)?,
    }
    let manifest_path = cli.manifest.clone().or_else(|| {
        cli.out.as_ref().map(|p| {
            let mut s = p.clone().into_os_string();
            s.push(".manifest.json");
            PathBuf::from(s)
        })
    });
    if let Some(path) = manifest_path {
        let parameters: Vec<String> = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
        let manifest = RunManifest {
            command: parameters.iter().find(|p| !p.starts_with('-')).cloned().unwrap_or_default(),
            parameters,
            seed: cli.seed,
            versions: BTreeMap::from([("flipgraph", env!("CARGO_PKG_VERSION"))]),
            wall_time_seconds: wall,
            exit_status: outcome.status,
            result_sha256: hex_digest(outcome.body.as_bytes()),
        };
        let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        text.push('\n');
        write_file(&path, &text)?;
    }
    Ok(())
}

fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

/// Runs the parsed command without touching stdout or the filesystem
/// (except `--save` and input files).
pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let budget = Budget::seconds(cli.budget_seconds);
    match &cli.command {
        Command::Gen { family, n } => Ok(Outcome::text(build_family(*family, *n)?.to_edge_list())),
        Command::Spectrum { family: SpectrumFamily::Flip, n, verify_exact } => spectrum(*n, *verify_exact),
        Command::Color { method, family, n, save } => color(*method, *family, *n, cli.seed, budget, save.as_deref()),
        Command::VerifyColoring { graph, coloring } => verify(graph, coloring),
        Command::ExpandParity { k, fixture } => {
            let classes = parse_parity_fixture(&read_file(fixture)?)?;
            Ok(Outcome::text(expand_parity_coloring(*k, &classes)?.to_file_format()))
        }
        Command::Alpha { family, n } => alpha(*family, *n, budget),
        Command::Quotient { kind, family, n } => quotient(*kind, *family, *n),
        Command::Distance { n, m1, m2 } => distance(*n, m1, m2),
        Command::Geodesics { n } => geodesics(*n),
    }
}

fn build_family(family: Family, n: usize) -> Result<Graph, CliError> {
    Ok(match family {
        Family::Flip => {
            if n == 0 {
                return Err(CliError::Usage("flip graphs need n >= 1".into()));
            }
            FlipGraph::build(n)?.into_graph()
        }
        Family::Sr => SignedReversalGraph::build(n)?.into_graph(),
        Family::Rev => build_reversal_graph(n)?,
    })
}

fn spectrum(n: usize, verify_exact: bool) -> Result<Outcome, CliError> {
    if n < 2 {
        return Err(CliError::Usage("spectrum needs n >= 2".into()));
    }
    let entries = flip_spectrum(n);
    let wire: Vec<SpectrumEntryJson> = entries.iter().map(SpectrumEntryJson::from).collect();
    let mut status = EXIT_OK;
    let mut failure = None;
    let verified = if verify_exact {
        if n > MAX_EXACT_SPECTRUM {
            return Err(CliError::Usage(format!("exact verification supports n <= {MAX_EXACT_SPECTRUM}")));
        }
        let fg = FlipGraph::build(n)?;
        match verify_spectrum_exact(fg.graph(), &entries) {
            Ok(_) => json!(true),
            Err(e) => {
                status = EXIT_VERIFICATION_FAILED;
                failure = Some(e.to_string());
                json!(false)
            }
        }
    } else {
        Value::Null
    };
    let hoffman = flip_hoffman_bounds(n);
    let value = json!({
        "family": "flip",
        "n": n,
        "degree": n * (n - 1),
        "spectrum": wire,
        "verified": verified,
        "failure": failure,
        "hoffman": hoffman,
    });
    Ok(Outcome::json(&value, status))
}

fn coloring_summary(method: ColorMethod, family: Family, n: usize, c: &Coloring) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("method".into(), json!(method));
    m.insert("family".into(), json!(family));
    m.insert("n".into(), json!(n));
    m.insert("vertices".into(), json!(c.len()));
    m.insert("num_colors".into(), json!(c.num_colors()));
    m.insert("colors_used".into(), json!(c.colors_used()));
    m
}

/// Smallest-palette coloring of `SR_k` constant on parity classes, trying
/// palettes upward from 1.
pub fn sr_factor_coloring(k: usize, budget: Budget) -> Result<Coloring, CliError> {
    for colors in 1..=8 {
        if let ParityClassOutcome::Found(c) = parity_class_coloring(k, colors, budget)? {
            return Ok(c);
        }
    }
    Ok(dsatur_coloring(SignedReversalGraph::build(k)?.graph(), 0))
}

fn color(
    method: ColorMethod,
    family: Family,
    n: usize,
    seed: u64,
    budget: Budget,
    save: Option<&Path>,
) -> Result<Outcome, CliError> {
    let only_flip = || CliError::Usage(format!("{method:?} coloring is defined for the flip family only"));
    let mut status = EXIT_OK;
    let (coloring, extra) = match method {
        ColorMethod::Gf => {
            if family != Family::Flip || n < 2 {
                return Err(only_flip());
            }
            let gc = gf_coloring(&FlipGraph::build(n)?);
            let extra = json!({ "field": gc.field.to_string(), "q": gc.field.order() });
            (gc.coloring, extra)
        }
        ColorMethod::Layered => {
            if family != Family::Flip || n < 1 {
                return Err(only_flip());
            }
            let fg = FlipGraph::build(n)?;
            let factors = (0..n).map(|k| sr_factor_coloring(k, budget)).collect::<Result<Vec<_>, _>>()?;
            let factor_colors: Vec<u32> = factors.iter().map(Coloring::num_colors).collect();
            let lc = layered_coloring(&fg, &factors)?;
            let extra = json!({
                "factor_colors": factor_colors,
                "odd_palette": lc.odd_palette,
                "even_palette": lc.even_palette,
            });
            (lc.coloring, extra)
        }
        ColorMethod::Dsatur => (dsatur_coloring(&build_family(family, n)?, seed), json!({ "seed": seed })),
        ColorMethod::Exact => match exact_chromatic_number(&build_family(family, n)?, budget) {
            ChromaticOutcome::Exact { chromatic_number, certificate, nodes } => {
                (certificate, json!({ "exact": true, "chromatic_number": chromatic_number, "nodes": nodes }))
            }
            ChromaticOutcome::Bracket { lower, upper, best, nodes } => {
                status = EXIT_BRACKET;
                (best, json!({ "exact": false, "lower": lower, "upper": upper, "nodes": nodes }))
            }
        },
        ColorMethod::Parity => {
            if family != Family::Sr {
                return Err(CliError::Usage("parity coloring is defined for the sr family only".into()));
            }
            (sr_factor_coloring(n, budget)?, Value::Null)
        }
    };
    let graph = build_family(family, n)?;
    let verified = verify_coloring(&graph, &coloring);
    if verified.is_err() {
        status = EXIT_VERIFICATION_FAILED;
    }
    let mut summary = coloring_summary(method, family, n, &coloring);
    summary.insert("verified".into(), json!(verified.is_ok()));
    if let Value::Object(extra) = extra {
        summary.extend(extra);
    }
    if let Some(path) = save {
        write_file(path, &coloring.to_file_format())?;
    }
    Ok(Outcome::json(&Value::Object(summary), status))
}

fn verify(graph_path: &Path, coloring_path: &Path) -> Result<Outcome, CliError> {
    let file = fs::File::open(graph_path).map_err(|source| CliError::Io { path: graph_path.to_path_buf(), source })?;
    let graph = Graph::read_edge_list(BufReader::new(file))?;
    let coloring = Coloring::parse_file_format(&read_file(coloring_path)?)?;
    let result = verify_coloring(&graph, &coloring);
    let witness = match &result {
        Err(ColoringError::Monochromatic { u, v, color }) => json!({ "u": u, "v": v, "color": color }),
        _ => Value::Null,
    };
    let value = json!({
        "vertices": graph.num_vertices(),
        "edges": graph.edge_count(),
        "num_colors": coloring.num_colors(),
        "colors_used": coloring.colors_used(),
        "verified": result.is_ok(),
        "witness": witness,
        "error": result.as_ref().err().map(ToString::to_string),
    });
    Ok(Outcome::json(&value, if result.is_ok() { EXIT_OK } else { EXIT_VERIFICATION_FAILED }))
}

fn alpha(family: Family, n: usize, budget: Budget) -> Result<Outcome, CliError> {
    let graph = build_family(family, n)?;
    let mut value = match max_independent_set(&graph, budget) {
        IndependenceOutcome::Exact { size, certificate, nodes } => {
            json!({ "exact": true, "alpha": size, "certificate": certificate, "nodes": nodes })
        }
        IndependenceOutcome::Bracket { lower, upper, best, nodes } => {
            json!({ "exact": false, "lower": lower, "upper": upper, "best": best, "nodes": nodes })
        }
    };
    let status = if value["exact"] == json!(true) { EXIT_OK } else { EXIT_BRACKET };
    value["family"] = json!(family);
    value["n"] = json!(n);
    value["vertices"] = json!(graph.num_vertices());
    if family == Family::Flip && n >= 2 {
        value["hoffman_upper"] = json!(flip_hoffman_bounds(n).independence_upper.to_string());
    }
    Ok(Outcome::json(&value, status))
}

fn quotient(kind: QuotientKind, family: Family, n: usize) -> Result<Outcome, CliError> {
    let (graph, labels, partition): (Graph, Vec<String>, CellPartition) = match (kind, family) {
        (QuotientKind::Type, Family::Flip) => {
            let fg = FlipGraph::build(n)?;
            let (types, partition) = fg.type_partition();
            (fg.into_graph(), types.iter().map(ToString::to_string).collect(), partition)
        }
        (QuotientKind::Cells, Family::Sr) => {
            let sr = SignedReversalGraph::build(n)?;
            let partition = sr.cell_partition();
            let labels = partition
                .cells()
                .iter()
                .map(|cell| sr.vertex(cell[0]).base().iter().map(u8::to_string).collect())
                .collect();
            (sr.into_graph(), labels, partition)
        }
        (QuotientKind::Positions, Family::Sr) => {
            if n == 0 {
                return Err(CliError::Usage("position cells need n >= 1".into()));
            }
            let sr = SignedReversalGraph::build(n)?;
            let partition = sr.position_partition();
            let labels = partition
                .cells()
                .iter()
                .map(|cell| {
                    let v = sr.vertex(cell[0]);
                    let pos =
                        v.entries().iter().position(|e| e.unsigned_abs() as usize == n).expect("symbol n present");
                    let sign = if v.entries()[pos] > 0 { '+' } else { '-' };
                    format!("U{}({sign})", pos + 1)
                })
                .collect();
            (sr.into_graph(), labels, partition)
        }
        _ => return Err(CliError::Usage(format!("{kind:?} partition is not defined for {family:?}"))),
    };
    let q = match graph.check_equitable(&partition) {
        Ok(q) => q,
        Err(e @ GraphError::NotEquitable { .. }) => {
            let value = json!({ "equitable": false, "reason": e.to_string() });
            return Ok(Outcome::json(&value, EXIT_VERIFICATION_FAILED));
        }
        Err(e) => return Err(e.into()),
    };
    let eigenvalues: Vec<f64> =
        quotient_eigenvalues(&q, &partition)?.into_iter().map(|x| (x * 1e9).round() / 1e9 + 0.0).collect();
    let value = json!({
        "family": family,
        "n": n,
        "kind": kind,
        "equitable": true,
        "cells": labels,
        "sizes": partition.sizes(),
        "matrix": q.entries,
        "eigenvalues": eigenvalues,
    });
    Ok(Outcome::json(&value, EXIT_OK))
}

fn parse_matching(n: usize, text: &str) -> Result<PerfectMatching, CliError> {
    let m: PerfectMatching = text.parse()?;
    if m.half_order() != n {
        return Err(CliError::Usage(format!("{text} is not a perfect matching of K_{}", 2 * n)));
    }
    Ok(m)
}

fn distance(n: usize, m1: &str, m2: &str) -> Result<Outcome, CliError> {
    let a = parse_matching(n, m1)?;
    let b = parse_matching(n, m2)?;
    let d = matching_distance(&a, &b)?;
    let value = json!({ "n": n, "m1": a.to_string(), "m2": b.to_string(), "distance": d });
    Ok(Outcome::json(&value, EXIT_OK))
}

fn geodesics(n: usize) -> Result<Outcome, CliError> {
    if n == 0 {
        return Err(CliError::Usage("geodesics need n >= 1".into()));
    }
    let fg = FlipGraph::build(n)?;
    let layers = fg.graph().bfs_layers(0)?;
    if layers.distance.contains(&UNREACHABLE) {
        return Err(CliError::Usage("flip graph is disconnected".into()));
    }
    let eccentricity = layers.distance.iter().copied().max().unwrap_or(0);
    let mut layer_sizes = vec![0usize; eccentricity + 1];
    layers.distance.iter().for_each(|&d| layer_sizes[d] += 1);
    let mut far_counts: BTreeMap<String, usize> = BTreeMap::new();
    for (v, &d) in layers.distance.iter().enumerate() {
        if d == eccentricity {
            *far_counts.entry(layers.geodesics[v].to_string()).or_default() += 1;
        }
    }
    let value = json!({
        "n": n,
        "source": fg.matching(0).to_string(),
        "eccentricity": eccentricity,
        "layer_sizes": layer_sizes,
        "max_distance_geodesics": far_counts,
    });
    Ok(Outcome::json(&value, EXIT_OK))
}
