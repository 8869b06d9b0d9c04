//! Valette kernels d(x,y) − (ψ(x)+ψ(y))/2: admissible ψ always yields a
//! CND kernel, but the kernel is invariant under ball automorphisms only
//! when ψ is constant.
//!
//! Run: `cargo run --example valette_invariance`

use std::collections::BTreeMap;

use treeharmonic::kernels::{cnd_check, invariance_defect, valette_kernel};
use treeharmonic::tree::{ball, TreeParams, VertexId};

type PsiAssignment = Box<dyn Fn(&VertexId) -> f64>;

fn main() -> treeharmonic::Result<()> {
    let params = TreeParams::new(2)?;
    let root = VertexId::root();
    let points = ball(&params, &root, 3);
    println!(
        "Valette kernels on ball(root, 3), q = {}: psi must lie in [0, 1/{}]",
        params.q(),
        params.degree()
    );

    let cases: Vec<(&str, PsiAssignment)> = vec![
        ("constant 1/3 (maximal)", Box::new(|_| 1.0 / 3.0)),
        ("constant 0 (plain distance)", Box::new(|_| 0.0)),
        (
            "indicator of the root, scaled",
            Box::new(|x: &VertexId| if x.is_root() { 1.0 / 3.0 } else { 0.0 }),
        ),
        (
            "sphere-dependent (0.3 / 0.2 / 0.1 by depth parity)",
            Box::new(|x: &VertexId| match x.depth() {
                0 => 0.3,
                2 => 0.1,
                _ => 0.2,
            }),
        ),
    ];

    for (name, psi_fn) in cases {
        let psi: BTreeMap<VertexId, f64> =
            points.iter().map(|x| (x.clone(), psi_fn(x))).collect();
        let kernel = valette_kernel(&params, &psi, &points)?;
        let cnd = cnd_check(&kernel, 1e-10)?;
        let inv = invariance_defect(&params, &psi, &points)?;
        println!("\n  psi = {name}");
        println!(
            "    CND: {} (min centered eigenvalue {:.3e})",
            cnd.is_cnd, cnd.min_centered_eigenvalue
        );
        println!(
            "    invariance defect {:.6}   constancy defect {:.6}",
            inv.kernel_defect, inv.constancy_defect
        );
    }

    println!("\nEvery admissible psi passes the CND check; only constant psi is invariant.");
    Ok(())
}
