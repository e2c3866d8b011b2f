use ideograph::graph::{ConceptEdge, ConceptNetwork, ConceptNode, GrowthFiltration, SparseVector, Vocabulary, YearProvenance};
use ideograph::temporal::*;

fn net_from(nodes: &[(String, i64)], edges: &[(usize, usize)]) -> ConceptNetwork {
    let nodes: Vec<ConceptNode> = nodes.iter().enumerate().map(|(id, (t, y))| ConceptNode {
        id, title: t.clone(), year: *y, provenance: YearProvenance::Parsed, tfidf: SparseVector::default(),
    }).collect();
    let mut es: Vec<ConceptEdge> = edges.iter().map(|&(s, t)| ConceptEdge { source: s, target: t, weight: 1.0 }).collect();
    es.sort_by_key(|e| (e.source, e.target));
    ConceptNetwork { subject: "probe".into(), nodes, edges: es, vocab: Vocabulary::default(), null_origin: None }
}

fn main() {
    let n = 16;
    let mut edges = Vec::new();
    for a in 0..8 {
        for b in a + 1..8 {
            edges.push((a, b));
            edges.push((a + 8, b + 8));
        }
    }
    edges.push((0, 8));
    let mut nodes: Vec<(String, i64)> = (0..n).map(|i| (format!("n{i:02}"), 1)).collect();
    for y in 2..=5 {
        nodes.push((format!("pad{y}"), y));
    }
    let net = net_from(&nodes, &edges);
    let filt = GrowthFiltration::new(&net);
    let ml = build_multilayer(&filt, 0.01);
    let modules = detect_temporal_modules(&ml, 1.0, 0);
    for (s, layer) in modules.labels.iter().enumerate() {
        let row: Vec<String> = layer.iter().map(|l| match l { Some(x) => x.to_string(), None => "-".into() }).collect();
        println!("layer {s}: {}", row.join(" "));
    }
    println!("changes: {:?}", count_changes(&modules.labels));
    println!("q = {}", modules.q);
    println!("naive = {}", multislice_modularity(&ml, &modules.labels, 1.0));
}
