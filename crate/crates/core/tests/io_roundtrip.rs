use proptest::prelude::*;

use paracc::io::{
    read_bipartite, read_clustering, read_hypergraph, read_weighted_graph, write_bipartite, write_clustering,
    write_hypergraph, write_weighted_graph,
};
use paracc::{BipartiteGraph, Clustering, Hypergraph, WeightedGraph};

fn text(f: impl FnOnce(&mut Vec<u8>)) -> String {
    let mut buf = Vec::new();
    f(&mut buf);
    String::from_utf8(buf).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn hypergraph_text_is_stable(
        n in 1usize..12,
        raw in prop::collection::vec((prop::collection::vec(0usize..64, 1..6), 1u32..9), 0..10),
    ) {
        let edges: Vec<(Vec<usize>, f64)> = raw.into_iter().map(|(e, w)| (e.into_iter().map(|v| v % n).collect(), w as f64 / 4.0)).collect();
        let h = Hypergraph::with_edge_weights(n, edges).unwrap();
        let first = text(|b| write_hypergraph(&h, b).unwrap());
        let back = read_hypergraph(first.as_bytes()).unwrap();
        prop_assert_eq!(&back, &h);
        prop_assert_eq!(text(|b| write_hypergraph(&back, b).unwrap()), first);
    }

    #[test]
    fn weighted_graph_text_is_stable(n in 2usize..10, raw in prop::collection::vec((0usize..64, 0usize..64, 1u32..9), 0..20)) {
        let edges = raw.into_iter().filter(|(i, j, _)| i % n != j % n).map(|(i, j, w)| (i % n, j % n, w as f64 / 8.0));
        let g = WeightedGraph::new(n, edges).unwrap();
        let first = text(|b| write_weighted_graph(&g, b).unwrap());
        let back = read_weighted_graph(first.as_bytes()).unwrap();
        prop_assert_eq!(&back, &g);
    }

    #[test]
    fn bipartite_text_is_stable(n1 in 1usize..6, n2 in 1usize..6, raw in prop::collection::vec((0usize..6, 0usize..6), 0..20)) {
        let g = BipartiteGraph::new(n1, n2, raw.into_iter().map(|(i, j)| (i % n1, j % n2))).unwrap();
        let first = text(|b| write_bipartite(&g, b).unwrap());
        let back = read_bipartite(first.as_bytes()).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(text(|b| write_bipartite(&back, b).unwrap()), first);
    }

    #[test]
    fn clustering_text_is_stable(labels in prop::collection::vec(0usize..5, 1..15)) {
        let c = Clustering::new(labels);
        let first = text(|b| write_clustering(&c, b).unwrap());
        let back = read_clustering(first.as_bytes(), c.len()).unwrap();
        prop_assert_eq!(&back, &c);
    }
}

#[test]
fn comments_and_blank_lines_are_ignored() {
    let src = "# header comment\n\n3 2\n% another\n1 2 3 w=2\n\n2 3\n";
    let h = read_hypergraph(src.as_bytes()).unwrap();
    assert_eq!(h.num_edges(), 2);
    let out = text(|b| write_hypergraph(&h, b).unwrap());
    assert_eq!(out, "3 2\n1 2 3 w=2\n2 3\n");
}
