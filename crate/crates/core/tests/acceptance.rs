//! End-to-end acceptance run: one line per criterion, then a failure if any
//! gating criterion did not pass.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use flipgraph::coloring::{
    exact_chromatic_number, gf_coloring, is_k_colorable, layered_coloring, max_independent_set, parity_class_coloring,
    verify_coloring, Budget, Coloring, ParityClassOutcome,
};
use flipgraph::graph::Graph;
use flipgraph::matchings::{double_factorial_odd, matching_distance, FlipGraph};
use flipgraph::signed_perm::{
    build_reversal_graph, cell_pair_tokens, expand_parity_coloring, factorial, parse_parity_fixture, SignedPermutation,
    SignedReversalGraph,
};
use flipgraph::spectra::{
    chung_tobin_system, flip_hoffman_bounds, flip_spectrum, graph_eigenvalues, sr_block_quotient,
    symmetric_eigenvalues, to_dmatrix, values_contained, verify_spectrum_exact,
};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SR5_FIXTURE: &str = include_str!("../fixtures/sr5_coloring.txt");

type Check = Result<String, String>;
type Criterion = (&'static str, bool, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn counts_and_regularity() -> Check {
    let start = Instant::now();
    for n in 2..=6 {
        let fg = FlipGraph::build(n).map_err(|e| e.to_string())?;
        let v = fg.matchings().len() as u128;
        ensure(v == double_factorial_odd(n), || format!("n={n}: {v} vertices"))?;
        ensure(fg.graph().regular_degree() == Some(n * (n - 1)), || format!("n={n}: not {}-regular", n * (n - 1)))?;
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 60.0, || format!("took {secs:.1}s"))?;
    Ok(format!("3, 15, 105, 945, 10395 vertices, degree n(n-1), {secs:.2}s"))
}

fn strongly_regular_k6() -> Check {
    let start = Instant::now();
    let fg = FlipGraph::build(3).map_err(|e| e.to_string())?;
    let g = fg.graph();
    let common = |u: usize, v: usize| g.neighbors(u).iter().filter(|&&w| g.has_edge(w as usize, v)).count();
    for u in 0..15 {
        for v in u + 1..15 {
            let (c, want) = (common(u, v), if g.has_edge(u, v) { 1 } else { 3 });
            ensure(c == want, || format!("pair {u},{v}: {c} common neighbors"))?;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 1.0, || format!("took {secs:.2}s"))?;
    Ok(format!("(15,6,1,3) confirmed in {secs:.3}s"))
}

fn spectrum_formula() -> Check {
    let start = Instant::now();
    for n in 2..=5 {
        let fg = FlipGraph::build(n).map_err(|e| e.to_string())?;
        verify_spectrum_exact(fg.graph(), &flip_spectrum(n)).map_err(|e| format!("n={n}: {e}"))?;
    }
    let secs = start.elapsed().as_secs_f64();
    for n in 1..=10usize {
        let s = flip_spectrum(n);
        let total: BigUint = s.iter().map(|e| &e.multiplicity).sum();
        ensure(total == BigUint::from(double_factorial_odd(n)), || format!("n={n}: multiplicities sum to {total}"))?;
        let min = s.last().map(|e| e.eigenvalue);
        ensure(min == Some(-((n * (n - 1) / 2) as i64)), || format!("n={n}: least eigenvalue {min:?}"))?;
    }
    Ok(format!("exact for n=2..5 in {secs:.2}s; sums and least eigenvalue for n<=10"))
}

fn type_quotient_at_five() -> Check {
    for n in 2..=5 {
        let fg = FlipGraph::build(n).map_err(|e| e.to_string())?;
        fg.graph().check_equitable(&fg.type_partition().1).map_err(|e| format!("n={n}: {e}"))?;
    }
    let fg = FlipGraph::build(5).map_err(|e| e.to_string())?;
    let (types, partition) = fg.type_partition();
    let q = fg.graph().check_equitable(&partition).map_err(|e| e.to_string())?;
    let order = ["(1,1,1,1,1)", "(2,1,1,1)", "(2,2,1)", "(3,1,1)", "(4,1)", "(3,2)", "(5)"];
    let pos: Vec<usize> = order
        .iter()
        .map(|t| types.iter().position(|x| x.to_string() == *t).ok_or(format!("missing type {t}")))
        .collect::<Result<_, _>>()?;
    let expected: [[u64; 7]; 7] = [
        [0, 20, 0, 0, 0, 0, 0],
        [1, 1, 6, 12, 0, 0, 0],
        [0, 2, 2, 0, 8, 8, 0],
        [0, 3, 0, 3, 12, 2, 0],
        [0, 0, 2, 4, 6, 0, 8],
        [0, 0, 3, 1, 0, 4, 12],
        [0, 0, 0, 0, 5, 5, 10],
    ];
    for i in 0..7 {
        for j in 0..7 {
            let got = q.entries[pos[i]][pos[j]];
            ensure(got == expected[i][j], || {
                format!("b[{}->{}] = {got}, expected {}", order[i], order[j], expected[i][j])
            })?;
        }
    }
    let sizes: Vec<usize> = pos.iter().map(|&p| partition.cells()[p].len()).collect();
    ensure(sizes == [1, 20, 60, 80, 240, 160, 384], || format!("cell sizes {sizes:?}"))?;
    Ok("equitable for n=2..5; n=5 matrix matches, diagonal 0,1,2,3,6,4,10".into())
}

fn gf_colorings() -> Check {
    let mut used = Vec::new();
    for (n, q) in [(2, 5), (3, 7), (4, 9), (5, 11), (6, 13), (7, 16)] {
        let fg = FlipGraph::build(n).map_err(|e| e.to_string())?;
        let gc = gf_coloring(&fg);
        ensure(gc.field.order() == q, || format!("n={n}: q={}", gc.field.order()))?;
        verify_coloring(fg.graph(), &gc.coloring).map_err(|e| format!("n={n}: {e}"))?;
        ensure(gc.coloring.colors_used() as u64 <= q, || format!("n={n}: {} colors", gc.coloring.colors_used()))?;
        used.push(format!("{}/{q}", gc.coloring.colors_used()));
    }
    Ok(format!("colors used / q for n=2..7: {}", used.join(", ")))
}

fn exact_chromatic_numbers() -> Check {
    let mut report = Vec::new();
    for (n, chi, seconds) in [(2, 3, 1.0), (3, 4, 10.0), (4, 5, 600.0)] {
        let fg = FlipGraph::build(n).map_err(|e| e.to_string())?;
        let start = Instant::now();
        let out = exact_chromatic_number(fg.graph(), Budget::seconds(seconds));
        let secs = start.elapsed().as_secs_f64();
        ensure(out.exact() == Some(chi), || format!("n={n}: got {:?}", out.bounds()))?;
        verify_coloring(fg.graph(), out.coloring()).map_err(|e| format!("n={n}: {e}"))?;
        report.push(format!("{chi} ({secs:.2}s)"));
    }
    Ok(format!("chi = {}", report.join(", ")))
}

fn independence() -> Check {
    let fg = FlipGraph::build(4).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let out = max_independent_set(fg.graph(), Budget::seconds(1800.0));
    let secs = start.elapsed().as_secs_f64();
    ensure(out.exact() == Some(28), || format!("alpha bounds {:?}", out.bounds()))?;
    for n in 2..=6 {
        let h = flip_hoffman_bounds(n);
        ensure(h.chromatic_lower == 3, || format!("n={n}: chromatic bound {}", h.chromatic_lower))?;
        let want = BigUint::from(double_factorial_odd(n) / 3);
        ensure(h.independence_upper == want, || format!("n={n}: ratio bound {}", h.independence_upper))?;
    }
    Ok(format!("alpha = 28 ({secs:.2}s); ratio bounds floor((2n-1)!!/3) and chi >= 3 for n<=6"))
}

/// Whether some bijection maps `g` onto `h` edge for edge, by brute force.
fn isomorphic_small(g: &Graph, h: &Graph) -> bool {
    fn extend(g: &Graph, h: &Graph, map: &mut Vec<usize>, used: &mut [bool]) -> bool {
        let v = map.len();
        if v == g.num_vertices() {
            return true;
        }
        for w in 0..h.num_vertices() {
            if used[w] || (0..v).any(|u| g.has_edge(u, v) != h.has_edge(map[u], w)) {
                continue;
            }
            used[w] = true;
            map.push(w);
            if extend(g, h, map, used) {
                return true;
            }
            map.pop();
            used[w] = false;
        }
        false
    }
    g.num_vertices() == h.num_vertices()
        && g.edge_count() == h.edge_count()
        && extend(g, h, &mut Vec::new(), &mut vec![false; h.num_vertices()])
}

fn signed_reversal_structure() -> Check {
    for k in 0..=6 {
        let sr = SignedReversalGraph::build(k).map_err(|e| e.to_string())?;
        ensure(sr.graph().num_vertices() == factorial(k) << k, || format!("k={k}: size"))?;
        ensure(sr.graph().regular_degree() == Some(k * (k + 1) / 2), || format!("k={k}: degree"))?;
    }
    let sr2 = SignedReversalGraph::build(2).map_err(|e| e.to_string())?;
    let g = sr2.graph();
    for v in 0..8 {
        let layers = g.bfs_layers(v).map_err(|e| e.to_string())?;
        let mut profile = [0usize; 4];
        for &d in &layers.distance {
            ensure(d <= 3, || format!("vertex {v}: distance {d}"))?;
            profile[d] += 1;
        }
        ensure(profile == [1, 3, 3, 1], || format!("vertex {v}: distance profile {profile:?}"))?;
        ensure(g.edges().all(|(a, b)| layers.distance[a] % 2 != layers.distance[b] % 2), || "not bipartite".into())?;
    }
    let k2 = Graph::from_edges(2, &[(0, 1)]).map_err(|e| e.to_string())?;
    ensure(isomorphic_small(g, &k2.box_product(&k2).box_product(&k2)), || "SR_2 is not the 3-cube".into())?;
    for k in 1..=5 {
        let sr = SignedReversalGraph::build(k).map_err(|e| e.to_string())?;
        let q = sr.graph().check_equitable(&sr.cell_partition()).map_err(|e| format!("k={k}: {e}"))?;
        let rk = build_reversal_graph(k).map_err(|e| e.to_string())?;
        for (i, row) in q.entries.iter().enumerate() {
            for (j, &b) in row.iter().enumerate() {
                let want = if i == j { k as u64 } else { u64::from(rk.has_edge(i, j)) };
                ensure(b == want, || format!("k={k}: quotient ({i},{j}) = {b}"))?;
            }
        }
    }
    Ok("sizes and degrees for k<=6; SR_2 is the 3-cube; cell quotient kI + A(R_k) for k<=5".into())
}

fn signed_reversal_colorings() -> Check {
    let scheme: Vec<(Vec<u8>, (u32, u32))> = vec![
        (vec![1, 2, 3], (0, 1)),
        (vec![2, 1, 3], (1, 2)),
        (vec![2, 3, 1], (2, 0)),
        (vec![3, 2, 1], (0, 1)),
        (vec![3, 1, 2], (1, 2)),
        (vec![1, 3, 2], (2, 0)),
    ];
    let sr3 = SignedReversalGraph::build(3).map_err(|e| e.to_string())?;
    let c3 = expand_parity_coloring(3, &cell_pair_tokens(3, &scheme)).map_err(|e| e.to_string())?;
    verify_coloring(sr3.graph(), &c3).map_err(|e| format!("SR_3 scheme: {e}"))?;
    let cycle = ["1+2+3+", "1+2+3-", "1+2-3-", "1-2-3-", "2+1+3-", "2+3+1-", "3-2-1-"];
    let idx: Vec<usize> = cycle
        .iter()
        .map(|s| s.parse::<SignedPermutation>().map(|p| p.index()).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    ensure((0..7).all(|i| sr3.graph().has_edge(idx[i], idx[(i + 1) % 7])), || "7-cycle broken".into())?;
    let chi3 = exact_chromatic_number(sr3.graph(), Budget::seconds(60.0));
    ensure(chi3.exact() == Some(3), || format!("chi(SR_3) bounds {:?}", chi3.bounds()))?;

    let classes = parse_parity_fixture(SR5_FIXTURE).map_err(|e| e.to_string())?;
    ensure(classes.len() == 240, || format!("{} tokens", classes.len()))?;
    let c5 = expand_parity_coloring(5, &classes).map_err(|e| e.to_string())?;
    let sr5 = SignedReversalGraph::build(5).map_err(|e| e.to_string())?;
    ensure(c5.len() == 3840, || format!("{} vertices colored", c5.len()))?;
    verify_coloring(sr5.graph(), &c5).map_err(|e| format!("SR_5 fixture: {e}"))?;
    ensure(c5.colors_used() == 4, || format!("{} colors", c5.colors_used()))?;

    let sr4 = SignedReversalGraph::build(4).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let sr4_note = match is_k_colorable(sr4.graph(), 3, Budget::seconds(7200.0)) {
        Some(None) => format!("SR_4 not 3-colorable ({:.0}s)", start.elapsed().as_secs_f64()),
        Some(Some(c)) => return Err(format!("found a 3-coloring of SR_4 with {} colors", c.colors_used())),
        None => "SR_4 3-colorability undecided within 2h (bracket [3,4])".into(),
    };
    Ok(format!("SR_3 scheme proper, odd 7-cycle, chi(SR_3) = 3; SR_5 fixture proper with 4 colors; {sr4_note}"))
}

fn parity_factor(k: usize, colors: u32) -> Result<Coloring, String> {
    match parity_class_coloring(k, colors, Budget::seconds(120.0)).map_err(|e| e.to_string())? {
        ParityClassOutcome::Found(c) => Ok(c),
        other => Err(format!("no {colors}-coloring of SR_{k}: {other:?}")),
    }
}

fn layered_colorings() -> Check {
    let factors: Vec<Coloring> =
        [1, 2, 2, 3, 4].iter().enumerate().map(|(k, &c)| parity_factor(k, c)).collect::<Result<_, _>>()?;
    let mut report = Vec::new();
    for (n, bound) in [(4, 5), (5, 7)] {
        let fg = FlipGraph::build(n).map_err(|e| e.to_string())?;
        let lc = layered_coloring(&fg, &factors[..n]).map_err(|e| format!("n={n}: {e}"))?;
        verify_coloring(fg.graph(), &lc.coloring).map_err(|e| format!("n={n}: {e}"))?;
        let used = lc.coloring.colors_used();
        ensure(used <= bound, || format!("n={n}: {used} colors"))?;
        report.push(format!("n={n}: {used} <= {bound}"));
    }
    Ok(report.join(", "))
}

fn chung_tobin() -> Check {
    for n in 1..=8usize {
        for x in [n * (n - 1) / 2, n * (n + 1) / 2] {
            let (system, formula) = chung_tobin_system(n, x as i64);
            let mut want: Vec<f64> = formula.iter().map(|&v| v as f64).collect();
            want.sort_by(|a, b| b.total_cmp(a));
            let got = symmetric_eigenvalues(&to_dmatrix(&system.shifted(1))).map_err(|e| e.to_string())?;
            let err = want.iter().zip(&got).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            ensure(err < 1e-9, || format!("n={n} x={x}: error {err:e}"))?;
        }
    }
    for n in 1..=5 {
        let sr = SignedReversalGraph::build(n).map_err(|e| e.to_string())?;
        let q = sr.graph().check_equitable(&sr.position_partition()).map_err(|e| format!("n={n}: {e}"))?;
        ensure(q.to_i64() == sr_block_quotient(n).1, || format!("n={n}: block quotient differs"))?;
    }
    for n in 1..=4 {
        let (system, _) = sr_block_quotient(n);
        let spectrum = graph_eigenvalues(SignedReversalGraph::build(n).map_err(|e| e.to_string())?.graph());
        for sign in [1, -1] {
            let eigs = symmetric_eigenvalues(&to_dmatrix(&system.shifted(sign))).map_err(|e| e.to_string())?;
            ensure(values_contained(&eigs, &spectrum, 1e-6), || format!("n={n} sign={sign}: {eigs:?}"))?;
        }
    }
    Ok("formula to 1e-9 for n<=8; block quotient for n<=5; D'+-X inside spectrum of SR_n for n<=4".into())
}

fn distances() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for n in 2..=5 {
        let fg = FlipGraph::build(n).map_err(|e| e.to_string())?;
        let count = fg.matchings().len();
        for _ in 0..500 {
            let (a, b) = (rng.gen_range(0..count), rng.gen_range(0..count));
            let bfs = fg.graph().bfs_layers(a).map_err(|e| e.to_string())?.distance[b];
            let formula = matching_distance(fg.matching(a), fg.matching(b)).map_err(|e| e.to_string())?;
            ensure(bfs == formula, || format!("n={n}: {a},{b}: bfs {bfs}, formula {formula}"))?;
        }
        let ecc = fg.graph().eccentricity(0).map_err(|e| e.to_string())?;
        ensure(ecc == Some(n - 1), || format!("n={n}: eccentricity {ecc:?}"))?;
    }
    for n in 3..=4usize {
        let fg = FlipGraph::build(n).map_err(|e| e.to_string())?;
        let want = BigUint::from(n.pow(n as u32 - 2));
        for s in 0..fg.matchings().len() {
            let layers = fg.graph().bfs_layers(s).map_err(|e| e.to_string())?;
            for (v, &d) in layers.distance.iter().enumerate() {
                ensure(d != n - 1 || layers.geodesics[v] == want, || {
                    format!("n={n}: {s}->{v} has {} geodesics", layers.geodesics[v])
                })?;
            }
        }
    }
    Ok("500 random pairs per n<=5, eccentricity n-1, n^(n-2) geodesics at n=3,4".into())
}

fn second_eigenvalue_probe() -> Check {
    let mut report = Vec::new();
    let mut all = true;
    for n in 3..=4usize {
        let eigs = graph_eigenvalues(SignedReversalGraph::build(n).map_err(|e| e.to_string())?.graph());
        let second = eigs.iter().copied().find(|&e| e < eigs[0] - 1e-6).unwrap_or(eigs[0]);
        let target = (n * (n - 1) / 2) as f64;
        all &= (second - target).abs() < 1e-6;
        report.push(format!("SR_{n}: {second:.6} vs {target}"));
    }
    let line = report.join(", ");
    if all {
        Ok(line)
    } else {
        Err(line)
    }
}

fn main() {
    let criteria: [Criterion; 13] = [
        ("flip graph counts and regularity", true, counts_and_regularity),
        ("M(K6) strongly regular", true, strongly_regular_k6),
        ("spectrum formula", true, spectrum_formula),
        ("equitable type partition", true, type_quotient_at_five),
        ("finite field colorings", true, gf_colorings),
        ("exact chromatic numbers", true, exact_chromatic_numbers),
        ("independence and ratio bounds", true, independence),
        ("signed reversal structure", true, signed_reversal_structure),
        ("signed reversal colorings", true, signed_reversal_colorings),
        ("layered colorings", true, layered_colorings),
        ("Chung-Tobin matrices", true, chung_tobin),
        ("distances and geodesics", true, distances),
        ("second eigenvalue probe (report only)", false, second_eigenvalue_probe),
    ];
    let mut failed = Vec::new();
    for (i, (name, gating, check)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let (tag, detail) = match (&result, gating) {
            (Ok(d), _) => ("PASS", d.clone()),
            (Err(d), true) => ("FAIL", d.clone()),
            (Err(d), false) => ("NOTE", d.clone()),
        };
        println!("criterion {:>2} [{tag}] {name}: {detail}", i + 1);
        if *gating && result.is_err() {
            failed.push(i + 1);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
    println!("all gating criteria passed");
}
