//! Selects a concentration graph from simulated data and compares it with
//! the ground truth encoded in the model's precision matrix.
//!
//! Run with: cargo run --example select_graph

use congraph::{
    count_false_edges, replication_rng, sample_mvn, select_graph, true_graph, MvnModel,
    ProcedureConfig, ProcedureMethod, SymMatrix, DEFAULT_ZERO_TOL,
};

fn main() {
    // a cycle over 6 variables in the precision matrix
    let dim = 6;
    let mut precision = SymMatrix::identity(dim);
    for i in 0..dim {
        precision.set(i, (i + 1) % dim, 0.35);
    }
    let model = MvnModel::new(vec![0.0; dim], precision.inverse_spd().unwrap()).unwrap();
    let truth = true_graph(&model, DEFAULT_ZERO_TOL);
    println!("true edges: {:?}", one_based(&truth));

    let n = 400;
    let alpha = 0.1;
    let mut rng = replication_rng(99, ProcedureMethod::Delta2Neyman, n, 0);
    let data = sample_mvn(&model, n, &mut rng).unwrap();

    for method in [ProcedureMethod::Delta2Neyman, ProcedureMethod::Delta1Fisher] {
        let config = ProcedureConfig::new(alpha, method).unwrap();
        let selected = select_graph(&data, &config).unwrap();
        let (fp, fn_) = count_false_edges(&selected, &truth).unwrap();
        println!("\n{} at family level {alpha} (n = {n}):", method.label());
        println!("  selected edges: {:?}", one_based(&selected));
        println!("  false positives: {fp}, false negatives: {fn_}");
    }
}

fn one_based(g: &congraph::AdjacencyMatrix) -> Vec<(usize, usize)> {
    g.edges().map(|(i, j)| (i + 1, j + 1)).collect()
}
