use flipgraph::graph::{CellPartition, Graph, UNREACHABLE};
use flipgraph::matchings::{double_factorial_odd, matching_distance, FlipGraph, PerfectMatching};
use flipgraph::signed_perm::{build_reversal_graph, factorial, SignedReversalGraph};
use flipgraph::spectra::enumerate_partitions;
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `b` arises from `a` by replacing two parts with their sum.
fn is_merge(a: &[usize], b: &[usize]) -> bool {
    if b.len() + 1 != a.len() {
        return false;
    }
    (0..a.len()).any(|i| {
        (i + 1..a.len()).any(|j| {
            let mut c: Vec<usize> = a.iter().enumerate().filter(|&(t, _)| t != i && t != j).map(|(_, &p)| p).collect();
            c.push(a[i] + a[j]);
            c.sort_unstable_by(|x, y| y.cmp(x));
            c == b
        })
    })
}

#[test]
fn neighbor_types_merge_split_or_stay() {
    for n in 1..=5 {
        let fg = FlipGraph::build(n).unwrap();
        let types = fg.types();
        for (u, v) in fg.graph().edges() {
            let (a, b) = (types[u].parts(), types[v].parts());
            assert!(a == b || is_merge(a, b) || is_merge(b, a), "n={n}: {} -> {}", types[u], types[v]);
        }
    }
}

#[test]
fn type_components_are_box_products_of_signed_reversal_graphs() {
    for n in 1..=5 {
        let fg = FlipGraph::build(n).unwrap();
        let types = fg.types();
        for lambda in enumerate_partitions(n) {
            let (count, size) = fg.verify_type_components(&lambda).unwrap();
            let expected: usize = lambda.parts().iter().map(|&p| factorial(p - 1) << (p - 1)).product();
            assert_eq!(size, expected, "{lambda}");
            let cell: Vec<usize> = (0..types.len()).filter(|&v| types[v] == lambda).collect();
            assert_eq!(count * size, cell.len());
            let sub = fg.graph().induced_subgraph(&cell).unwrap();
            let degree: usize = lambda.parts().iter().map(|&p| p * (p - 1) / 2).sum();
            assert_eq!(sub.graph.regular_degree(), Some(degree), "{lambda}");
        }
    }
    let fg = FlipGraph::build(5).unwrap();
    let lambda = flipgraph::IntegerPartition::from_parts(vec![3, 2]).unwrap();
    assert_eq!(fg.verify_type_components(&lambda).unwrap(), (10, 16));
}

#[test]
fn full_cycle_matchings_form_signed_reversal_graphs() {
    for (n, size) in [(2, 2), (3, 8), (4, 48), (5, 384)] {
        let fg = FlipGraph::build(n).unwrap();
        let iso = fg.label_isomorphism_to_sr().unwrap();
        assert_eq!(iso.flip_vertices.len(), size);
    }
}

#[test]
fn distance_formula_matches_breadth_first_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for n in 1..=5 {
        let fg = FlipGraph::build(n).unwrap();
        let count = fg.matchings().len();
        for _ in 0..500 {
            let (a, b) = (rng.gen_range(0..count), rng.gen_range(0..count));
            let bfs = fg.graph().bfs_layers(a).unwrap().distance[b];
            assert_eq!(matching_distance(fg.matching(a), fg.matching(b)).unwrap(), bfs);
        }
    }
}

#[test]
fn diameter_and_geodesics() {
    for n in 1..=5 {
        let fg = FlipGraph::build(n).unwrap();
        assert_eq!(fg.graph().eccentricity(0).unwrap(), Some(n - 1));
    }
    for n in 3..=4usize {
        let fg = FlipGraph::build(n).unwrap();
        let expected = BigUint::from(n.pow(n as u32 - 2));
        let mut far_pairs = 0;
        for s in 0..fg.matchings().len() {
            let layers = fg.graph().bfs_layers(s).unwrap();
            assert!(!layers.distance.contains(&UNREACHABLE));
            for (v, &d) in layers.distance.iter().enumerate() {
                assert!(d < n);
                if d == n - 1 {
                    assert_eq!(layers.geodesics[v], expected);
                    far_pairs += 1;
                }
            }
        }
        assert!(far_pairs > 0);
    }
}

#[test]
fn flip_graph_counts_and_export() {
    for n in 1..=6 {
        let fg = FlipGraph::build(n).unwrap();
        assert_eq!(fg.matchings().len() as u128, double_factorial_odd(n));
        assert_eq!(fg.graph().regular_degree(), Some(n * (n - 1)));
        assert!(fg.graph().is_connected());
    }
    let fg = FlipGraph::build(3).unwrap();
    let text = fg.graph().to_edge_list();
    assert!(text.starts_with("p 15 45\n"));
    let back = Graph::read_edge_list(text.as_bytes()).unwrap();
    assert_eq!(&back, fg.graph());
    for m in fg.matchings() {
        assert_eq!(m.to_string().parse::<PerfectMatching>().unwrap(), *m);
    }
}

#[test]
fn signed_reversal_structure() {
    for k in 0..=6 {
        let sr = SignedReversalGraph::build(k).unwrap();
        assert_eq!(sr.graph().num_vertices(), factorial(k) << k);
        assert_eq!(sr.graph().regular_degree(), Some(k * (k + 1) / 2));
    }
    for k in 1..=5 {
        let sr = SignedReversalGraph::build(k).unwrap();
        let q = sr.graph().check_equitable(&sr.cell_partition()).unwrap();
        let rk = build_reversal_graph(k).unwrap();
        for (i, row) in q.entries.iter().enumerate() {
            for (j, &b) in row.iter().enumerate() {
                let expected = if i == j { k as u64 } else { u64::from(rk.has_edge(i, j)) };
                assert_eq!(b, expected, "k={k} ({i},{j})");
            }
        }
        for cell in sr.cell_partition().cells() {
            let cube = sr.graph().induced_subgraph(cell).unwrap().graph;
            assert_eq!(cube.regular_degree(), Some(k));
            assert_eq!(cube.eccentricity(0).unwrap(), Some(k));
        }
    }
}

#[test]
fn reversal_graphs() {
    let r3 = build_reversal_graph(3).unwrap();
    assert_eq!((r3.num_vertices(), r3.regular_degree()), (6, Some(3)));
    let two_sided = CellPartition::from_key(6, |v| r3.bfs_layers(0).unwrap().distance[v] % 2);
    let q = r3.check_equitable(&two_sided).unwrap();
    assert_eq!(q.entries, vec![vec![0, 3], vec![3, 0]]);
    let r4 = build_reversal_graph(4).unwrap();
    assert_eq!((r4.num_vertices(), r4.regular_degree()), (24, Some(6)));
    assert!(build_reversal_graph(0).is_err());
    assert!(build_reversal_graph(8).is_err());
}
