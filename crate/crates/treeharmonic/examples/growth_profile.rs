//! Growth of the projected cocycle: measured squared norms against the
//! closed form, the growth bound, and the recurrence residual.
//!
//! Run: `cargo run --example growth_profile`

use treeharmonic::cocycle::{
    harmonic_norm_sq, projected_cocycle, recurrence_residual, GrowthBound, RadialProfile,
};
use treeharmonic::tree::{TreeParams, VertexId};

fn main() -> treeharmonic::Result<()> {
    let params = TreeParams::new(2)?;
    let root = VertexId::root();
    let n_max = 8u32;

    let mut measured = Vec::new();
    for n in 0..=n_max {
        let y = VertexId::new(vec![0; n as usize], &params)?;
        measured.push(projected_cocycle(params, &root, &y, 1e-10)?.harmonic_norm_sq);
    }
    let profile = RadialProfile::new(params, measured.clone())?;
    let bound = GrowthBound::from_first_step(params, profile.value(1))?;

    println!("harmonic cocycle growth, q = {} (w = {:.12})", params.q(), profile.value(1));
    println!("\n  n   measured |b(n)|^2   closed form        bound              residual");
    for n in 0..=n_max {
        let closed = harmonic_norm_sq(&params, n);
        let residual = if (1..n_max).contains(&n) {
            format!("{:+.3e}", recurrence_residual(&profile, n)?)
        } else {
            "      -".to_string()
        };
        println!(
            "  {n}   {:<18.12}  {closed:<18.12} {:<18.12} {residual}",
            profile.value(n),
            bound.value(n),
        );
    }

    println!("\nThe flat profile phi(n) = n (the unprojected flow) by comparison:");
    let flat = RadialProfile::new(params, (0..=n_max).map(f64::from).collect())?;
    for n in 1..n_max {
        println!(
            "  n = {n}: residual {:+.12} (nonpositive, strictly below the harmonic case)",
            recurrence_residual(&flat, n)?
        );
    }
    Ok(())
}
