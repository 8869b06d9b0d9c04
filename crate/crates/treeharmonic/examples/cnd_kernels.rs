//! Conditionally-negative-type verification: the distance kernel passes,
//! its negation fails with an explicit witness, and the GNS factorization
//! reconstructs kernels as squared distances in a finite-dimensional
//! space.
//!
//! Run: `cargo run --example cnd_kernels`

use treeharmonic::kernels::{
    cnd_check, gns_embed, pure_unbounded_negative_type, KernelMatrix,
};
use treeharmonic::tree::{ball, TreeParams, VertexId};

fn main() -> treeharmonic::Result<()> {
    let params = TreeParams::new(2)?;
    let root = VertexId::root();
    let points = ball(&params, &root, 2);
    println!("{} points: ball(root, 2) at q = {}", points.len(), params.q());

    let distance = KernelMatrix::from_distances(points.clone());
    let report = cnd_check(&distance, 1e-10)?;
    println!(
        "\ndistance kernel: CND = {} (min centered eigenvalue {:.3e})",
        report.is_cnd, report.min_centered_eigenvalue
    );

    let negated = KernelMatrix::from_radial(points.clone(), |d| -(d as f64));
    let report = cnd_check(&negated, 1e-10)?;
    println!(
        "negated kernel:  CND = {} (min centered eigenvalue {:.3e})",
        report.is_cnd, report.min_centered_eigenvalue
    );
    if let Some(alpha) = &report.witness {
        println!(
            "  witness with sum {:.1e} gives quadratic form {:+.6} > 0",
            alpha.iter().sum::<f64>(),
            negated.quadratic_form(alpha)
        );
    }

    let pure = KernelMatrix::from_radial(points.clone(), |d| {
        pure_unbounded_negative_type(&params, d, 1.0).expect("positive scale")
    });
    let report = cnd_check(&pure, 1e-10)?;
    println!(
        "pure unbounded radial kernel: CND = {} (min centered eigenvalue {:.3e})",
        report.is_cnd, report.min_centered_eigenvalue
    );

    let embedding = gns_embed(&distance, 1e-10)?;
    println!(
        "\nGNS embedding of the distance kernel: {} points in dimension {}, \
         reconstruction error {:.3e}",
        embedding.vectors.len(),
        embedding.vectors.first().map_or(0, Vec::len),
        embedding.reconstruction_error
    );
    for (point, vector) in points.iter().zip(&embedding.vectors).take(4) {
        let coords: Vec<String> = vector.iter().map(|c| format!("{c:+.4}")).collect();
        println!("  {point:<5} -> [{}]", coords.join(", "));
    }
    Ok(())
}
