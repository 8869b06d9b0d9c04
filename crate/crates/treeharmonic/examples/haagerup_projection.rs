//! Projecting the unit flow chi(x -> y) onto the gradient subspace:
//! per-edge values, the exact norm split, and harmonicity of the
//! complement.
//!
//! Run: `cargo run --example haagerup_projection`

use treeharmonic::edgespace::{divergence, unit_flow};
use treeharmonic::green::{project, projected_flow_norm_sq};
use treeharmonic::tree::{ball, TreeParams, VertexId};

fn main() -> treeharmonic::Result<()> {
    let params = TreeParams::new(2)?;
    let root = VertexId::root();
    let y = VertexId::parse("/0/0", &params)?;
    let chi = unit_flow(params, &root, &y);
    let res = project(&chi, 1e-10)?;

    println!("chi = unit flow from {root} to {y} (q = {})", params.q());
    println!("  |chi|^2            = {}", res.input_norm_sq);
    println!("  |Q chi|^2 measured = {:.15}", res.gradient_norm_sq);
    println!(
        "  |Q chi|^2 closed   = {:.15}",
        projected_flow_norm_sq(&params, 2)
    );
    println!("  |(1-Q) chi|^2      = {:.15}", res.harmonic_norm_sq);
    println!("  support radius     = {}", res.support_radius);
    println!("  tail bound         = {:.3e}", res.tail_bound);

    println!("\nLargest gradient-part entries (canonical orientation):");
    let mut entries: Vec<_> = res.gradient_part.to_entries();
    entries.sort_by(|a, b| b.value.abs().partial_cmp(&a.value.abs()).unwrap());
    for entry in entries.iter().take(8) {
        println!("  {:>6} -> {:<8} {:+.12}", entry.source, entry.target, entry.value);
    }

    let div = divergence(&res.harmonic_part);
    let worst = ball(&params, &root, res.support_radius.saturating_sub(1) as u32)
        .iter()
        .map(|v| div.value(v).abs())
        .fold(0.0f64, f64::max);
    println!("\nDivergence of the harmonic part at interior vertices: max |.| = {worst:.3e}");
    Ok(())
}
