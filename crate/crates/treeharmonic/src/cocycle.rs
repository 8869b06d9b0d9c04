//! Cocycle growth on the regular tree: the Haagerup cocycle, its harmonic
//! projection, the optimal radial growth profile with its second-order
//! recurrence, the growth bound, and virtual-coboundary potentials.
//!
//! Group elements enter only through their image vertex y = g·x₀: every
//! quantity in scope depends on g through d(x₀, gx₀) or the geodesic
//! [x₀, gx₀], so vertices stand in for group elements throughout.
//!
//! Growth profiles φ(n) (squared embedding norms along spheres) satisfy
//!
//! ```text
//! q/(q+1)·φ(n+1) − φ(n) + 1/(q+1)·φ(n−1) = φ(1) + R(n),   R(n) ≤ 0,
//! ```
//!
//! with equality R ≡ 0 exactly for the harmonic (optimal) profile
//! φ(n) = A·n − B + B·q^(−n), A = (q+1)w/(q−1), B = 2qw/(q−1)², w = φ(1).
//!
//! Sign conventions for the potentials follow the constant-divergence
//! requirement: the distance potential is −½·∇d(·, x₀), its Green
//! correction is −∇Gδ_{x₀}/(q+1), and their sum has divergence
//! (q−1)/(2(q+1)) at every vertex, so its coboundary differences are
//! divergence-free.

use std::collections::BTreeMap;

use crate::edgespace::{unit_flow, EdgeFunction};
use crate::error::{Error, Result};
use crate::green::{self, ProjectionResult};
use crate::tree::{self, TreeParams, VertexId};

/// The Haagerup cocycle at y: the unit flow from the basepoint to y.
/// Its squared norm is exactly d(basepoint, y).
pub fn haagerup(params: TreeParams, basepoint: &VertexId, y: &VertexId) -> EdgeFunction {
    unit_flow(params, basepoint, y)
}

/// Projection split of the Haagerup cocycle at y. The `harmonic_part` /
/// `harmonic_norm_sq` fields describe the proper harmonic cocycle; its
/// squared norm is d + (2q/(q²−1))(q^(−d) − 1) with d = d(basepoint, y).
pub fn projected_cocycle(
    params: TreeParams,
    basepoint: &VertexId,
    y: &VertexId,
    tol: f64,
) -> Result<ProjectionResult> {
    green::project(&haagerup(params, basepoint, y), tol)
}

/// Closed form of the harmonic cocycle's squared norm at distance d.
pub fn harmonic_norm_sq(params: &TreeParams, d: u32) -> f64 {
    d as f64 - green::projected_flow_norm_sq(params, d)
}

/// Exact rational form of [`harmonic_norm_sq`]; `None` on i128 overflow.
pub fn harmonic_norm_sq_rational(params: &TreeParams, d: u32) -> Option<green::Ratio> {
    green::Ratio::integer(d as i128).sub(&green::projected_flow_norm_sq_rational(params, d)?)
}

/// A sequence n ↦ φ(n) of squared norms along spheres. φ(0) = 0 and
/// φ(n) ≥ 0 always.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    params: TreeParams,
    values: Vec<f64>,
}

impl RadialProfile {
    pub fn new(params: TreeParams, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter(
                "a radial profile needs at least the value at n = 0".into(),
            ));
        }
        if values[0] != 0.0 {
            return Err(Error::InvalidParameter(format!(
                "a radial profile is normalized to φ(0) = 0, got {}",
                values[0]
            )));
        }
        if let Some(bad) = values.iter().find(|v| **v < 0.0 || !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "radial profile values must be finite and nonnegative, got {bad}"
            )));
        }
        Ok(RadialProfile { params, values })
    }

    pub fn params(&self) -> &TreeParams {
        &self.params
    }

    pub fn n_max(&self) -> u32 {
        (self.values.len() - 1) as u32
    }

    pub fn value(&self, n: u32) -> f64 {
        self.values[n as usize]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// The growth-bound constants derived from the first step w = φ(1):
/// A = (q+1)w/(q−1) and B = 2qw/(q−1)².
#[derive(Debug, Clone, Copy)]
pub struct GrowthBound {
    params: TreeParams,
    pub a: f64,
    pub b: f64,
    pub w: f64,
}

impl GrowthBound {
    pub fn from_first_step(params: TreeParams, w: f64) -> Result<Self> {
        if w.is_nan() || w <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "the first-step norm w must be positive, got {w}"
            )));
        }
        let q = params.q() as f64;
        Ok(GrowthBound {
            params,
            a: (q + 1.0) * w / (q - 1.0),
            b: 2.0 * q * w / ((q - 1.0) * (q - 1.0)),
            w,
        })
    }

    /// The bound A·n − B + B·q^(−n) at radius n.
    pub fn value(&self, n: u32) -> f64 {
        let q = self.params.q() as f64;
        self.a * n as f64 - self.b + self.b * q.powi(-(n as i32))
    }
}

/// The harmonic growth profile φ(n) = A·n − B + B·q^(−n) with φ(1) = w.
pub fn optimal_profile(params: TreeParams, n_max: u32, w: f64) -> Result<RadialProfile> {
    if n_max < 1 {
        return Err(Error::InvalidParameter(
            "optimal_profile needs n_max ≥ 1".into(),
        ));
    }
    let bound = GrowthBound::from_first_step(params, w)?;
    let mut values = Vec::with_capacity(n_max as usize + 1);
    values.push(0.0);
    for n in 1..=n_max {
        values.push(bound.value(n));
    }
    RadialProfile::new(params, values)
}

/// The defect q/(q+1)·φ(n+1) − φ(n) + 1/(q+1)·φ(n−1) − φ(1) at 1 ≤ n ≤
/// n_max − 1. Zero exactly on the optimal profile; nonpositive for
/// profiles of genuine equivariant embeddings.
pub fn recurrence_residual(profile: &RadialProfile, n: u32) -> Result<f64> {
    if n < 1 || n + 1 > profile.n_max() {
        return Err(Error::IndexRange(format!(
            "recurrence residual needs 1 ≤ n ≤ {}, got {n}",
            profile.n_max().saturating_sub(1)
        )));
    }
    let q = profile.params().q() as f64;
    let deg = q + 1.0;
    Ok(q / deg * profile.value(n + 1) - profile.value(n) + profile.value(n - 1) / deg
        - profile.value(1))
}

/// One row of a growth-bound report.
#[derive(Debug, Clone)]
pub struct GrowthReportRow {
    pub n: u32,
    pub phi: f64,
    pub bound: f64,
    pub slack: f64,
    pub violated: bool,
}

/// Compares a profile against the growth bound built from its own first
/// step; `slack = bound − φ(n)`, flagged when negative beyond rounding.
pub fn growth_bound_check(profile: &RadialProfile) -> Result<Vec<GrowthReportRow>> {
    if profile.n_max() < 1 {
        return Err(Error::InvalidParameter(
            "growth_bound_check needs a profile with n_max ≥ 1".into(),
        ));
    }
    let w = profile.value(1);
    if w.is_nan() || w <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "growth_bound_check needs φ(1) > 0, got {w}"
        )));
    }
    let bound = GrowthBound::from_first_step(*profile.params(), w)?;
    Ok((0..=profile.n_max())
        .map(|n| {
            let phi = profile.value(n);
            let b = bound.value(n);
            let slack = b - phi;
            GrowthReportRow {
                n,
                phi,
                bound: b,
                slack,
                violated: slack < -1e-10,
            }
        })
        .collect())
}

/// Which of the three virtual potentials to difference.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialKind {
    /// −½·∇d(·, basepoint): the potential whose coboundary is the Haagerup
    /// cocycle.
    Distance,
    /// −∇Gδ_basepoint/(q+1): the potential whose coboundary is the
    /// (negated) gradient part.
    Green,
    /// Their sum: constant divergence, coboundary is the harmonic cocycle.
    Harmonic,
}

/// The three virtual-coboundary potentials, truncated to edges with both
/// endpoints in ball(basepoint, support_radius).
#[derive(Debug, Clone)]
pub struct VirtualPotential {
    pub distance_potential: EdgeFunction,
    pub green_potential: EdgeFunction,
    pub harmonic_potential: EdgeFunction,
    pub basepoint: VertexId,
    pub support_radius: u32,
}

// Value of the distance potential based at `basepoint` along the canonical
// orientation of the edge below `deeper`: −½ when the edge leads away from
// the basepoint.
fn distance_potential_value(basepoint: &VertexId, deeper: &VertexId) -> f64 {
    let parent = deeper.parent().expect("non-root");
    if tree::distance(deeper, basepoint) > tree::distance(&parent, basepoint) {
        -0.5
    } else {
        0.5
    }
}

// Value of the Green potential based at `basepoint` along the canonical
// orientation: −(∇Gδ_b)(e)/(q+1).
fn green_potential_value(params: &TreeParams, basepoint: &VertexId, deeper: &VertexId) -> f64 {
    let q = params.q() as f64;
    let parent = deeper.parent().expect("non-root");
    let dc = tree::distance(deeper, basepoint) as i32;
    let dp = tree::distance(&parent, basepoint) as i32;
    -q / ((q - 1.0) * (q + 1.0)) * (q.powi(-dc) - q.powi(-dp))
}

/// Builds the virtual potentials around a basepoint. Entries of the
/// distance potential are ±½; the sum has divergence (q−1)/(2(q+1)) at
/// every vertex whose incident edges are all inside the support.
pub fn virtual_potentials(
    params: TreeParams,
    basepoint: &VertexId,
    support_radius: u32,
    tol: f64,
) -> Result<VirtualPotential> {
    if support_radius < 1 {
        return Err(Error::InvalidParameter(
            "virtual potentials need support_radius ≥ 1".into(),
        ));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let dist = tree::multi_source_ball(&params, std::slice::from_ref(basepoint), support_radius);
    let mut distance_potential = EdgeFunction::zero(params);
    let mut green_potential = EdgeFunction::zero(params);
    let mut harmonic_potential = EdgeFunction::zero(params);
    for c in dist.keys() {
        if c.is_root() {
            continue;
        }
        let p = c.parent().expect("non-root");
        if !dist.contains_key(&p) {
            continue;
        }
        let f = distance_potential_value(basepoint, c);
        let g = green_potential_value(&params, basepoint, c);
        distance_potential.set_canonical(c.clone(), f)?;
        green_potential.set_canonical(c.clone(), g)?;
        harmonic_potential.set_canonical(c.clone(), f + g)?;
    }
    Ok(VirtualPotential {
        distance_potential,
        green_potential,
        harmonic_potential,
        basepoint: basepoint.clone(),
        support_radius,
    })
}

impl VirtualPotential {
    /// The constant divergence magnitude (q−1)/(2(q+1)) of the harmonic
    /// potential.
    pub fn expected_divergence(params: &TreeParams) -> f64 {
        let q = params.q() as f64;
        (q - 1.0) / (2.0 * (q + 1.0))
    }
}

// Smallest comparison collar k with the coboundary tail bound ≤ tol.
fn coboundary_collar(params: &TreeParams, tol: f64) -> u32 {
    let mut k = 0u32;
    while coboundary_tail_bound(params, k) > tol && k < 400 {
        k += 1;
    }
    k
}

/// Analytic bound on the squared mass of a rebased Green-potential
/// difference on edges farther than `collar` from the geodesic.
pub fn coboundary_tail_bound(params: &TreeParams, collar: u32) -> f64 {
    let q = params.q() as f64;
    // Entry magnitude ≤ (q^{-j} + q^{-(m-j)})·q^{-k}/(q+1) at distance k
    // from the geodesic attachment z_j; edge counts ≤ q^{k+1}.
    4.0 * q * q * q / ((q * q - 1.0) * (q + 1.0) * (q + 1.0) * (q - 1.0))
        * q.powi(-(collar as i32))
}

/// The coboundary difference (potential rebased at y) − (potential based
/// at the basepoint), computed entry-by-entry from the closed forms on
/// edges within the support collar of the geodesic [basepoint, y].
///
/// For [`PotentialKind::Distance`] the result equals the Haagerup cocycle
/// exactly; for [`PotentialKind::Harmonic`] it agrees with the harmonic
/// projection entrywise; for [`PotentialKind::Green`] it is the negated
/// gradient part (the sign that keeps the harmonic potential the sum of
/// the other two).
pub fn coboundary_difference(
    potential: &VirtualPotential,
    kind: PotentialKind,
    y: &VertexId,
    tol: f64,
) -> Result<EdgeFunction> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let params = *potential.distance_potential.params();
    let basepoint = &potential.basepoint;
    let m = tree::distance(basepoint, y);
    if m == 0 {
        // Rebasing at the basepoint changes nothing.
        return Ok(EdgeFunction::zero(params));
    }
    let collar = match kind {
        // Off-geodesic entries cancel exactly; one extra level suffices.
        PotentialKind::Distance => 1,
        PotentialKind::Green | PotentialKind::Harmonic => coboundary_collar(&params, tol),
    };
    let required = m + collar;
    if potential.support_radius < required {
        return Err(Error::Reliability {
            available: potential.support_radius,
            required,
        });
    }
    let geodesic = tree::geodesic(basepoint, y);
    let dist = tree::multi_source_ball(&params, &geodesic, collar.max(1));
    let mut out = EdgeFunction::zero(params);
    for c in dist.keys() {
        if c.is_root() {
            continue;
        }
        let p = c.parent().expect("non-root");
        if !dist.contains_key(&p) {
            continue;
        }
        let val = match kind {
            PotentialKind::Distance => {
                distance_potential_value(y, c) - distance_potential_value(basepoint, c)
            }
            PotentialKind::Green => {
                green_potential_value(&params, y, c) - green_potential_value(&params, basepoint, c)
            }
            PotentialKind::Harmonic => {
                distance_potential_value(y, c) - distance_potential_value(basepoint, c)
                    + green_potential_value(&params, y, c)
                    - green_potential_value(&params, basepoint, c)
            }
        };
        out.set_canonical(c.clone(), val)?;
    }
    Ok(out)
}

/// Both sides of the pointwise identity
/// ℒ(‖F‖²)(x) = ‖∇ₓF‖² + 2·⟨ℒF(x), F(x)⟩ for a vector-valued map F given
/// on x and all its neighbors. The two sides are computed independently;
/// the contract is lhs = rhs.
pub fn laplacian_norm_identity(
    values: &BTreeMap<VertexId, EdgeFunction>,
    x: &VertexId,
) -> Result<(f64, f64)> {
    let fx = values
        .get(x)
        .ok_or_else(|| Error::Domain(format!("no value at {x}")))?;
    let params = *fx.params();
    let deg = params.degree() as f64;
    let nbrs = tree::neighbors(&params, x);
    let mut neighbor_values = Vec::with_capacity(nbrs.len());
    for n in &nbrs {
        neighbor_values.push(
            values
                .get(n)
                .ok_or_else(|| Error::Domain(format!("no value at neighbor {n} of {x}")))?,
        );
    }

    // lhs: the scalar Laplacian of v ↦ ‖F(v)‖² at x.
    let avg_norm: f64 = neighbor_values.iter().map(|f| f.norm_sq()).sum::<f64>() / deg;
    let lhs = avg_norm - fx.norm_sq();

    // rhs: local gradient energy plus twice ⟨ℒF(x), F(x)⟩.
    let grad_energy: f64 = neighbor_values
        .iter()
        .map(|f| fx.sub(f).map(|d| d.norm_sq()))
        .collect::<Result<Vec<_>>>()?
        .iter()
        .sum::<f64>()
        / deg;
    let mut lf = EdgeFunction::zero(params);
    for f in &neighbor_values {
        lf = lf.add(f)?;
    }
    lf = lf.scale(1.0 / deg).sub(fx)?;
    let rhs = grad_energy + 2.0 * lf.inner(fx)?;
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edgespace::divergence;
    use crate::tree::{ball, distance, sphere, BallAutomorphism};

    fn params(q: u32) -> TreeParams {
        TreeParams::new(q).unwrap()
    }

    fn v(p: &TreeParams, path: &[u8]) -> VertexId {
        VertexId::new(path.to_vec(), p).unwrap()
    }

    fn root() -> VertexId {
        VertexId::root()
    }

    #[test]
    fn haagerup_norm_is_distance() {
        let p = params(2);
        for y in ball(&p, &root(), 5) {
            let b = haagerup(p, &root(), &y);
            assert_eq!(b.norm_sq(), distance(&root(), &y) as f64);
        }
        assert!(haagerup(p, &root(), &root()).is_zero());
    }

    #[test]
    fn haagerup_difference_telescopes() {
        // chi(x0,z) − chi(x0,y) = chi(y,z), exhaustively on ball(root, 3).
        let p = params(2);
        let verts = ball(&p, &root(), 3);
        for y in &verts {
            for z in &verts {
                let lhs = haagerup(p, &root(), z)
                    .sub(&haagerup(p, &root(), y))
                    .unwrap();
                let rhs = unit_flow(p, y, z);
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn projected_cocycle_trivial_and_small_cases() {
        let p = params(2);
        let res = projected_cocycle(p, &root(), &root(), 1e-10).unwrap();
        assert_eq!(res.harmonic_norm_sq, 0.0);

        // |y| = 1: squared norm 1 − 2/3 = 1/3.
        let res = projected_cocycle(p, &root(), &v(&p, &[0]), 1e-10).unwrap();
        assert!((res.harmonic_norm_sq - 1.0 / 3.0).abs() < 1e-12);

        // |y| = 3: 3 + (4/3)(1/8 − 1) = 11/6.
        let res = projected_cocycle(p, &root(), &v(&p, &[0, 1, 0]), 1e-10).unwrap();
        assert!((res.harmonic_norm_sq - 11.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn harmonic_norm_rational_values() {
        // q = 2: 1/3 at d = 1 and 11/6 at d = 3, exactly.
        let p = params(2);
        let r1 = harmonic_norm_sq_rational(&p, 1).unwrap();
        assert_eq!((r1.num(), r1.den()), (1, 3));
        let r3 = harmonic_norm_sq_rational(&p, 3).unwrap();
        assert_eq!((r3.num(), r3.den()), (11, 6));
        for d in 0..=20u32 {
            let r = harmonic_norm_sq_rational(&p, d).unwrap();
            assert!((r.to_f64() - harmonic_norm_sq(&p, d)).abs() < 1e-12);
        }
    }

    #[test]
    fn projected_cocycle_matches_closed_form() {
        for q in [2u32, 3] {
            let p = params(q);
            for d in 0..=8u32 {
                let y = VertexId::new(vec![0; d as usize], &p).unwrap();
                let res = projected_cocycle(p, &root(), &y, 1e-10).unwrap();
                let want = harmonic_norm_sq(&p, d);
                assert!(
                    (res.harmonic_norm_sq - want).abs() < 1e-12,
                    "q={q} d={d}"
                );
            }
        }
    }

    #[test]
    fn radiality_constant_on_spheres_via_automorphism_orbits() {
        // Sample sphere vertices as automorphism images of a base vertex.
        let p = params(2);
        for n in 1..=4u32 {
            let base = VertexId::new(vec![0; n as usize], &p).unwrap();
            let mut norms = Vec::new();
            for target in sphere(&p, &root(), n).iter().take(10) {
                let a = BallAutomorphism::sphere_transport(p, root(), n, &base, target).unwrap();
                let image = a.apply(&base).unwrap();
                assert_eq!(&image, target);
                let res = projected_cocycle(p, &root(), &image, 1e-10).unwrap();
                norms.push(res.harmonic_norm_sq);
            }
            for w in &norms {
                assert!((w - norms[0]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn harmonicity_at_basepoint() {
        // The harmonic parts over the q+1 neighbors of the basepoint sum to
        // zero: their total flow-norm, measured exactly, vanishes.
        let p = params(2);
        let q = p.q() as f64;
        let neighbors = tree::neighbors(&p, &root());
        // Exact route: ‖Q(Σ chi)‖² = ‖Σ chi‖² = q+1.
        let mut total = EdgeFunction::zero(p);
        for y in &neighbors {
            total = total.add(&haagerup(p, &root(), y)).unwrap();
        }
        assert_eq!(total.norm_sq(), q + 1.0);
        let res = green::project(&total, 1e-10).unwrap();
        assert!((res.gradient_norm_sq - (q + 1.0)).abs() < 1e-12);
        assert!(res.harmonic_norm_sq.abs() < 1e-12);
        // Materialized route: the summed harmonic parts cancel to the
        // truncation scale.
        let mut sum = EdgeFunction::zero(p);
        for y in &neighbors {
            let r = projected_cocycle(p, &root(), y, 1e-10).unwrap();
            sum = sum.add(&r.harmonic_part).unwrap();
        }
        assert!(sum.norm_sq() < 1e-3, "{}", sum.norm_sq());
    }

    #[test]
    fn optimal_profile_values() {
        let p2 = params(2);
        let profile = optimal_profile(p2, 5, 1.0 / 3.0).unwrap();
        assert_eq!(profile.value(0), 0.0);
        assert!((profile.value(1) - 1.0 / 3.0).abs() < 1e-15);
        assert!((profile.value(3) - 11.0 / 6.0).abs() < 1e-14);

        let p3 = params(3);
        let profile = optimal_profile(p3, 4, 0.5).unwrap();
        let bound = GrowthBound::from_first_step(p3, 0.5).unwrap();
        assert!((bound.a - 1.0).abs() < 1e-15);
        assert!((bound.b - 0.75).abs() < 1e-15);
        assert!((profile.value(2) - 4.0 / 3.0).abs() < 1e-14);

        assert!(optimal_profile(p2, 5, 0.0).is_err());
        assert!(optimal_profile(p2, 5, -1.0).is_err());
        assert!(optimal_profile(p2, 0, 1.0).is_err());
    }

    #[test]
    fn optimal_profile_is_increasing_with_asymptotic_slope() {
        let p = params(2);
        let w = 0.7;
        let profile = optimal_profile(p, 40, w).unwrap();
        let bound = GrowthBound::from_first_step(p, w).unwrap();
        for n in 0..40u32 {
            assert!(profile.value(n + 1) > profile.value(n));
        }
        let last_step = profile.value(40) - profile.value(39);
        assert!((last_step - bound.a).abs() < 1e-9);
    }

    #[test]
    fn recurrence_residual_cases() {
        let p = params(2);
        // Optimal profile: residual 0 at every n.
        let profile = optimal_profile(p, 10, 0.45).unwrap();
        for n in 1..10u32 {
            assert!(recurrence_residual(&profile, n).unwrap().abs() < 1e-12);
        }
        // Haagerup profile φ(n) = n: residual (q−1)/(q+1) − 1 = −2/3.
        let haag = RadialProfile::new(p, (0..=10).map(f64::from).collect()).unwrap();
        for n in 1..10u32 {
            let r = recurrence_residual(&haag, n).unwrap();
            assert!((r - (-2.0 / 3.0)).abs() < 1e-12);
        }
        // Measured harmonic profile: residual 0 within 1e−8.
        let measured: Vec<f64> = (0..=6u32)
            .map(|d| {
                let y = VertexId::new(vec![0; d as usize], &p).unwrap();
                projected_cocycle(p, &root(), &y, 1e-10)
                    .unwrap()
                    .harmonic_norm_sq
            })
            .collect();
        let measured = RadialProfile::new(p, measured).unwrap();
        for n in 1..6u32 {
            assert!(recurrence_residual(&measured, n).unwrap().abs() < 1e-8);
        }
        // Index errors.
        assert!(recurrence_residual(&profile, 0).is_err());
        assert!(recurrence_residual(&profile, 10).is_err());
    }

    #[test]
    fn growth_bound_check_cases() {
        let p = params(2);
        let optimal = optimal_profile(p, 8, 0.33).unwrap();
        for row in growth_bound_check(&optimal).unwrap() {
            assert!(row.slack.abs() < 1e-12);
            assert!(!row.violated);
        }
        // Haagerup profile: slack = 2n/(q−1) − (2q/(q−1)²)(1 − q^{-n}) ≥ 0.
        let haag = RadialProfile::new(p, (0..=8).map(f64::from).collect()).unwrap();
        let q = 2.0f64;
        for row in growth_bound_check(&haag).unwrap() {
            let n = row.n as f64;
            let want = 2.0 * n / (q - 1.0)
                - 2.0 * q / ((q - 1.0) * (q - 1.0)) * (1.0 - q.powi(-(row.n as i32)));
            assert!((row.slack - want).abs() < 1e-12);
            assert!(row.slack >= -1e-12);
            assert!(!row.violated);
        }
        // A profile pushed above the bound is flagged.
        let mut values: Vec<f64> = optimal.values().to_vec();
        values[2] += 0.5;
        let bad = RadialProfile::new(p, values).unwrap();
        let report = growth_bound_check(&bad).unwrap();
        assert!(report[2].violated);
    }

    #[test]
    fn radial_profile_validation() {
        let p = params(2);
        assert!(RadialProfile::new(p, vec![]).is_err());
        assert!(RadialProfile::new(p, vec![0.5]).is_err());
        assert!(RadialProfile::new(p, vec![0.0, -0.1]).is_err());
        assert!(RadialProfile::new(p, vec![0.0, 1.0]).is_ok());
    }

    #[test]
    fn virtual_potential_entries() {
        let p = params(2);
        let pot = virtual_potentials(p, &root(), 6, 1e-8).unwrap();
        // Distance potential: every entry ±1/2, negative on away edges.
        for (key, val) in pot.distance_potential.canonical_entries() {
            assert_eq!(val, -0.5, "at {key}");
        }
        // Green potential magnitudes: q^{-d(e,basepoint)}/(q+1).
        for (key, val) in pot.green_potential.canonical_entries() {
            let d = (key.depth() - 1) as i32;
            let want = 2.0f64.powi(-d) / 3.0;
            assert!((val.abs() - want).abs() < 1e-15, "at {key}");
        }
        // Recomputed independently: harmonic = distance + green entrywise.
        let sum = pot.distance_potential.add(&pot.green_potential).unwrap();
        assert_eq!(sum, pot.harmonic_potential);
    }

    #[test]
    fn harmonic_potential_divergence_is_constant() {
        for q in [2u32, 3] {
            let p = params(q);
            let pot = virtual_potentials(p, &root(), 7, 1e-8).unwrap();
            let div = divergence(&pot.harmonic_potential);
            let want = VirtualPotential::expected_divergence(&p);
            if q == 2 {
                assert!((want - 1.0 / 6.0).abs() < 1e-15);
            }
            // Interior vertices: all incident edges inside the support.
            for x in ball(&p, &root(), 6) {
                assert!(
                    (div.value(&x).abs() - want).abs() < 1e-12,
                    "q={q} at {x}: {}",
                    div.value(&x)
                );
            }
            // Including the basepoint itself, with positive sign.
            assert!((div.value(&root()) - want).abs() < 1e-12);
        }
    }

    #[test]
    fn distance_coboundary_is_haagerup_exactly() {
        let p = params(2);
        let pot = virtual_potentials(p, &root(), 6, 1e-8).unwrap();
        for y in ball(&p, &root(), 4) {
            let diff = coboundary_difference(&pot, PotentialKind::Distance, &y, 1e-8).unwrap();
            assert_eq!(diff, haagerup(p, &root(), &y), "y={y}");
        }
    }

    #[test]
    fn harmonic_coboundary_matches_projection_entrywise() {
        let p = params(2);
        let pot = virtual_potentials(p, &root(), 8, 0.1).unwrap();
        let y = v(&p, &[0, 1]);
        let diff = coboundary_difference(&pot, PotentialKind::Harmonic, &y, 0.1).unwrap();
        let res = projected_cocycle(p, &root(), &y, 1e-10).unwrap();
        // Entries agree to machine precision on the common support.
        for (key, val) in diff.canonical_entries() {
            let parent = key.parent().unwrap();
            let want = res.harmonic_part.oriented_value(&parent, key).unwrap();
            assert!((val - want).abs() < 1e-13, "at {key}: {val} vs {want}");
        }
        // Truncated squared norm sits below the exact norm by at most the
        // comparison tail.
        let got = diff.norm_sq();
        let want = res.harmonic_norm_sq;
        assert!(got <= want + 1e-12);
        assert!(want - got <= 0.1 + 1e-12, "{got} vs {want}");
    }

    #[test]
    fn green_coboundary_is_negated_gradient_part() {
        let p = params(2);
        let pot = virtual_potentials(p, &root(), 8, 0.1).unwrap();
        let y = v(&p, &[2]);
        let diff = coboundary_difference(&pot, PotentialKind::Green, &y, 0.1).unwrap();
        let res = projected_cocycle(p, &root(), &y, 1e-10).unwrap();
        for (key, val) in diff.canonical_entries() {
            let parent = key.parent().unwrap();
            let want = -res.gradient_part.oriented_value(&parent, key).unwrap();
            assert!((val - want).abs() < 1e-13, "at {key}");
        }
    }

    #[test]
    fn coboundary_norm_for_adjacent_target() {
        let p = params(2);
        let pot = virtual_potentials(p, &root(), 12, 0.02).unwrap();
        let y = v(&p, &[1]);
        let diff = coboundary_difference(&pot, PotentialKind::Harmonic, &y, 0.02).unwrap();
        assert!((diff.norm_sq() - 1.0 / 3.0).abs() < 0.02);
    }

    #[test]
    fn coboundary_difference_at_basepoint_is_zero() {
        let p = params(2);
        let pot = virtual_potentials(p, &root(), 4, 1e-2).unwrap();
        for kind in [
            PotentialKind::Distance,
            PotentialKind::Green,
            PotentialKind::Harmonic,
        ] {
            let diff = coboundary_difference(&pot, kind, &root(), 1e-2).unwrap();
            assert!(diff.is_zero());
        }
    }

    #[test]
    fn coboundary_difference_refuses_unreliable_targets() {
        let p = params(2);
        let pot = virtual_potentials(p, &root(), 3, 1e-2).unwrap();
        let far = v(&p, &[0, 0, 0]);
        match coboundary_difference(&pot, PotentialKind::Harmonic, &far, 1e-2) {
            Err(Error::Reliability {
                available,
                required,
            }) => {
                assert_eq!(available, 3);
                assert!(required > 3);
            }
            other => panic!("expected reliability error, got {other:?}"),
        }
    }

    #[test]
    fn laplacian_norm_identity_cases() {
        let p = params(2);
        // Constant map: both sides zero.
        let constant = haagerup(p, &root(), &v(&p, &[0, 1]));
        let mut values = BTreeMap::new();
        for x in ball(&p, &root(), 2) {
            values.insert(x, constant.clone());
        }
        let (lhs, rhs) = laplacian_norm_identity(&values, &root()).unwrap();
        assert_eq!(lhs, 0.0);
        assert!(rhs.abs() < 1e-15);

        // The Haagerup embedding on a ball: the identity holds exactly.
        let mut values = BTreeMap::new();
        for x in ball(&p, &root(), 4) {
            values.insert(x.clone(), haagerup(p, &root(), &x));
        }
        for x in ball(&p, &root(), 3) {
            let (lhs, rhs) = laplacian_norm_identity(&values, &x).unwrap();
            assert!((lhs - rhs).abs() < 1e-12, "at {x}: {lhs} vs {rhs}");
        }

        // Missing neighbor: domain error.
        let mut partial = BTreeMap::new();
        partial.insert(root(), constant.clone());
        assert!(laplacian_norm_identity(&partial, &root()).is_err());
    }

    #[test]
    fn laplacian_norm_identity_harmonic_case() {
        // For the projected cocycle: ⟨ℒF(x₀), F(x₀)⟩ ≈ 0 and
        // lhs ≈ ‖∇F‖² = w, up to the materialization tails.
        let p = params(2);
        let mut values = BTreeMap::new();
        for x in ball(&p, &root(), 1) {
            values.insert(
                x.clone(),
                projected_cocycle(p, &root(), &x, 1e-10)
                    .unwrap()
                    .harmonic_part,
            );
        }
        let (lhs, rhs) = laplacian_norm_identity(&values, &root()).unwrap();
        assert!((lhs - rhs).abs() < 1e-12);
        let w = harmonic_norm_sq(&p, 1);
        assert!((lhs - w).abs() < 1e-3, "lhs={lhs} w={w}");
        // The inner-product term alone: (rhs − gradient energy)/2.
        let fx = &values[&root()];
        let deg = p.degree() as f64;
        let grad_energy: f64 = tree::neighbors(&p, &root())
            .iter()
            .map(|n| fx.sub(&values[n]).unwrap().norm_sq())
            .sum::<f64>()
            / deg;
        let inner_term = (rhs - grad_energy) / 2.0;
        assert!(inner_term.abs() < 1e-2, "{inner_term}");
    }

    #[test]
    fn negativity_of_measured_residuals() {
        // Residuals of genuine profiles are ≤ 0 (Haagerup strictly, the
        // harmonic profile at zero).
        for q in [2u32, 3] {
            let p = params(q);
            let haag = RadialProfile::new(p, (0..=8).map(f64::from).collect()).unwrap();
            for n in 1..8u32 {
                assert!(recurrence_residual(&haag, n).unwrap() <= 0.0);
            }
            let measured: Vec<f64> = (0..=6u32).map(|d| harmonic_norm_sq(&p, d)).collect();
            let measured = RadialProfile::new(p, measured).unwrap();
            for n in 1..6u32 {
                assert!(recurrence_residual(&measured, n).unwrap() <= 1e-10);
            }
        }
    }

    #[test]
    fn consistency_triangle() {
        // ‖chi‖² = ‖harmonic‖² + ‖gradient‖² through the two exact routes.
        let p = params(3);
        for d in 1..=6u32 {
            let y = VertexId::new(vec![0; d as usize], &p).unwrap();
            let res = projected_cocycle(p, &root(), &y, 1e-10).unwrap();
            let total = res.harmonic_norm_sq + res.gradient_norm_sq;
            assert!((total - d as f64).abs() < 1e-12, "d={d}");
        }
    }
}
