//! Computes sample partial correlations two ways and shows the quadratic
//! structure of the determinant in one off-diagonal covariance entry.
//!
//! Run with: cargo run --example partial_correlations

use congraph::{
    det_quadratic_coeffs, partial_correlation, partial_correlation_matrix, replication_rng,
    sample_covariance, sample_mvn, MvnModel, ProcedureMethod, SymMatrix,
};

fn main() {
    // A model where variables 0-1 and 2-3 are conditionally dependent.
    let mut precision = SymMatrix::identity(4);
    precision.set(0, 1, 0.45);
    precision.set(2, 3, -0.35);
    let covariance = precision.inverse_spd().unwrap();
    let model = MvnModel::new(vec![0.0; 4], covariance).unwrap();

    let mut rng = replication_rng(2024, ProcedureMethod::Delta2Neyman, 200, 0);
    let data = sample_mvn(&model, 200, &mut rng).unwrap();
    let s = sample_covariance(&data).unwrap();

    println!("sample covariance (n = {}):", s.n_obs());
    for i in 0..4 {
        let row: Vec<String> = (0..4).map(|j| format!("{:+.4}", s.get(i, j))).collect();
        println!("  [{}]", row.join(", "));
    }

    println!("\nsample partial correlations (cofactor route):");
    for i in 0..4 {
        for j in (i + 1)..4 {
            let r = partial_correlation(&s, i, j).unwrap().r;
            println!("  r({}, {}) = {r:+.4}", i + 1, j + 1);
        }
    }

    let batch = partial_correlation_matrix(&s).unwrap();
    println!("\nsame values from one inversion of the covariance:");
    for i in 0..4 {
        for j in (i + 1)..4 {
            println!("  r({}, {}) = {:+.4}", i + 1, j + 1, batch.get(i, j));
        }
    }

    // det(S(x)) = -a x^2 + b x + c in the (1, 2) entry; the roots bound the
    // values of the entry that keep the matrix positive definite.
    let q = det_quadratic_coeffs(&s, 0, 1).unwrap();
    println!("\ndeterminant as a quadratic in the (1, 2) entry:");
    println!("  a = {:.6}, b = {:.6}, c = {:.6}", q.a, q.b, q.c);
    println!("  admissible interval: ({:.6}, {:.6})", q.x1, q.x2);
    println!("  current entry s_12 = {:.6}", s.get(0, 1));
    for x in [q.x1, 0.5 * (q.x1 + q.x2), q.x2] {
        let direct = s.matrix().with_entry(0, 1, x).det();
        println!(
            "  det at x = {x:+.4}: direct {direct:+.3e}, quadratic {:+.3e}",
            q.eval(x)
        );
    }
}
