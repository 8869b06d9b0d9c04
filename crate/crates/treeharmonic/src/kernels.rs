//! Conditionally-negative-type (CND) kernels on finite vertex sets:
//! verification through the centered-Gram criterion, finite GNS
//! embeddings, Valette kernels with their invariance test, and the
//! classified unbounded pure radial function.
//!
//! A symmetric zero-diagonal kernel Ψ is CND when Σᵢⱼ αᵢαⱼΨ(xᵢ,xⱼ) ≤ 0
//! for every coefficient vector with Σα = 0. Centering with
//! J = I − (1/n)𝟙𝟙ᵀ parameterizes exactly that subspace, so Ψ is CND iff
//! M = −½·J·Ψ·J is positive semidefinite; the check runs a cyclic Jacobi
//! eigensolve of M and reports the minimum eigenvalue, with an explicit
//! violating coefficient vector when the verdict is negative. The GNS
//! embedding factorizes M = VᵀV so that ‖vᵢ − vⱼ‖² reproduces Ψ.
//!
//! The invariance test applies re-centered ball automorphisms built from
//! sphere transports, the finite stand-in for vertex-stabilizer actions.
//! A nonzero defect certifies non-invariance; a zero defect is necessary
//! but not sufficient (the automorphisms fix a center), which is why the
//! report also carries the constancy defect max|ψ(x) − ψ(y)|.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::green;
use crate::tree::{self, BallAutomorphism, TreeParams, VertexId};

/// Symmetric kernel values on a finite, ordered vertex set.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    points: Vec<VertexId>,
    // Row-major n×n.
    values: Vec<f64>,
}

impl KernelMatrix {
    /// Builds a kernel from explicit rows; checks shape only. Symmetry and
    /// the zero diagonal are validated by [`KernelMatrix::validate`] /
    /// [`cnd_check`].
    pub fn new(points: Vec<VertexId>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = points.len();
        if rows.len() != n {
            return Err(Error::KernelValidation(format!(
                "{} rows for {} points",
                rows.len(),
                n
            )));
        }
        let mut values = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::KernelValidation(format!(
                    "row {i} has {} entries for {} points",
                    row.len(),
                    n
                )));
            }
            values.extend_from_slice(row);
        }
        Ok(KernelMatrix { points, values })
    }

    /// The tree-distance kernel on the given points.
    pub fn from_distances(points: Vec<VertexId>) -> Self {
        let n = points.len();
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                values[i * n + j] = tree::distance(&points[i], &points[j]) as f64;
            }
        }
        KernelMatrix { points, values }
    }

    /// A radial kernel Ψ(x,y) = radial(d(x,y)); `radial(0)` is forced to 0.
    pub fn from_radial(points: Vec<VertexId>, radial: impl Fn(u32) -> f64) -> Self {
        let n = points.len();
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    values[i * n + j] = radial(tree::distance(&points[i], &points[j]));
                }
            }
        }
        KernelMatrix { points, values }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[VertexId] {
        &self.points
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.points.len() + j]
    }

    /// Symmetry and zero diagonal, exactly.
    pub fn validate(&self) -> Result<()> {
        let n = self.points.len();
        for i in 0..n {
            if self.values[i * n + i] != 0.0 {
                return Err(Error::KernelValidation(format!(
                    "diagonal entry at {} is {}, expected 0",
                    self.points[i],
                    self.values[i * n + i]
                )));
            }
            for j in 0..i {
                if self.values[i * n + j] != self.values[j * n + i] {
                    return Err(Error::KernelValidation(format!(
                        "asymmetric at ({}, {}): {} vs {}",
                        self.points[i],
                        self.points[j],
                        self.values[i * n + j],
                        self.values[j * n + i]
                    )));
                }
            }
        }
        Ok(())
    }

    /// The quadratic form αᵀΨα.
    pub fn quadratic_form(&self, alpha: &[f64]) -> f64 {
        let n = self.points.len();
        let mut total = 0.0;
        for i in 0..n {
            for j in 0..n {
                total += alpha[i] * alpha[j] * self.values[i * n + j];
            }
        }
        total
    }

    /// −½·J·Ψ·J with J the centering projector, row-major.
    fn centered(&self) -> Vec<f64> {
        let n = self.points.len();
        let mut row_means = vec![0.0; n];
        for (i, mean) in row_means.iter_mut().enumerate() {
            *mean = (0..n).map(|j| self.values[i * n + j]).sum::<f64>() / n as f64;
        }
        let grand = row_means.iter().sum::<f64>() / n as f64;
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                m[i * n + j] =
                    -0.5 * (self.values[i * n + j] - row_means[i] - row_means[j] + grand);
            }
        }
        m
    }
}

/// Verdict of a conditionally-negative-type check.
#[derive(Debug, Clone)]
pub struct CndReport {
    pub is_cnd: bool,
    /// Minimum eigenvalue of the centered matrix −½JΨJ.
    pub min_centered_eigenvalue: f64,
    /// Present iff the verdict is negative: coefficients with Σα = 0 whose
    /// quadratic form αᵀΨα is positive.
    pub witness: Option<Vec<f64>>,
}

/// Decides conditional negativity by the centered-matrix PSD criterion:
/// the verdict is positive iff the minimum eigenvalue of −½JΨJ is
/// ≥ −tol. Validates symmetry and the zero diagonal first.
pub fn cnd_check(kernel: &KernelMatrix, tol: f64) -> Result<CndReport> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    kernel.validate()?;
    let n = kernel.len();
    if n == 0 {
        return Err(Error::KernelValidation("empty kernel".into()));
    }
    let m = kernel.centered();
    let (eigenvalues, eigenvectors) = jacobi_eigen(&m, n);
    let (min_idx, &min_eig) = eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).expect("finite eigenvalues"))
        .expect("n >= 1");
    let is_cnd = min_eig >= -tol;
    let witness = if is_cnd {
        None
    } else {
        // Eigenvector of a negative eigenvalue of M: automatically centered
        // (M annihilates constants), and αᵀΨα = −2·αᵀMα = −2λ|α|² > 0.
        let mut alpha: Vec<f64> = (0..n).map(|i| eigenvectors[i * n + min_idx]).collect();
        let mean = alpha.iter().sum::<f64>() / n as f64;
        for a in &mut alpha {
            *a -= mean;
        }
        Some(alpha)
    };
    Ok(CndReport {
        is_cnd,
        min_centered_eigenvalue: min_eig,
        witness,
    })
}

/// A finite Hilbert-space realization of a CND kernel: points as vectors
/// with ‖vᵢ − vⱼ‖² = Ψ(xᵢ, xⱼ) up to `reconstruction_error`.
#[derive(Debug, Clone)]
pub struct GnsEmbedding {
    pub vectors: Vec<Vec<f64>>,
    pub reconstruction_error: f64,
}

/// Factorizes the centered matrix as VᵀV (eigenvalues below zero are
/// clipped; they are bounded by tol because [`cnd_check`] must pass).
/// Fails with the offending report when the kernel is not CND.
pub fn gns_embed(kernel: &KernelMatrix, tol: f64) -> Result<GnsEmbedding> {
    let report = cnd_check(kernel, tol)?;
    if !report.is_cnd {
        return Err(Error::NotCnd {
            report: Box::new(report),
        });
    }
    let n = kernel.len();
    let m = kernel.centered();
    let (eigenvalues, eigenvectors) = jacobi_eigen(&m, n);
    let kept: Vec<usize> = (0..n).filter(|&k| eigenvalues[k] > 0.0).collect();
    let vectors: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            kept.iter()
                .map(|&k| eigenvectors[i * n + k] * eigenvalues[k].sqrt())
                .collect()
        })
        .collect();
    let mut reconstruction_error: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let dist_sq: f64 = vectors[i]
                .iter()
                .zip(&vectors[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            reconstruction_error = reconstruction_error.max((dist_sq - kernel.value(i, j)).abs());
        }
    }
    Ok(GnsEmbedding {
        vectors,
        reconstruction_error,
    })
}

/// The unbounded pure negative-type radial value at distance n:
/// scale·(n + (2q/(q²−1))·(q^(−n) − 1)). Requires scale > 0.
pub fn pure_unbounded_negative_type(params: &TreeParams, n: u32, scale: f64) -> Result<f64> {
    if scale.is_nan() || scale <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "the scale must be positive, got {scale}"
        )));
    }
    let q = params.q() as f64;
    Ok(scale * (n as f64 + 2.0 * q / (q * q - 1.0) * (q.powi(-(n as i32)) - 1.0)))
}

/// Ψ(x,y) = d(x,y) − (ψ(x)+ψ(y))/2 off the diagonal, for 0 ≤ ψ ≤ 1/deg.
/// Every point must carry a ψ value.
pub fn valette_kernel(
    params: &TreeParams,
    psi: &BTreeMap<VertexId, f64>,
    points: &[VertexId],
) -> Result<KernelMatrix> {
    let bound = 1.0 / params.degree() as f64;
    for x in points {
        let Some(&value) = psi.get(x) else {
            return Err(Error::KernelValidation(format!("no ψ value at {x}")));
        };
        if !(0.0..=bound).contains(&value) {
            return Err(Error::KernelValidation(format!(
                "ψ({x}) = {value} outside the admissible range [0, {bound}]"
            )));
        }
    }
    let n = points.len();
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                values[i * n + j] = tree::distance(&points[i], &points[j]) as f64
                    - (psi[&points[i]] + psi[&points[j]]) / 2.0;
            }
        }
    }
    Ok(KernelMatrix {
        points: points.to_vec(),
        values,
    })
}

/// Invariance defects of a Valette kernel under re-centered ball
/// automorphisms.
#[derive(Debug, Clone, Copy)]
pub struct InvarianceReport {
    /// max |Ψ(ax, ay) − Ψ(x, y)| over sphere transports a and point pairs.
    pub kernel_defect: f64,
    /// max |ψ(x) − ψ(y)| over the domain.
    pub constancy_defect: f64,
}

/// Measures the failure of Ψ-invariance over sphere transports centered at
/// every domain vertex. Zero kernel defect together with zero constancy
/// defect characterizes constant ψ; a positive kernel defect certifies
/// non-invariance outright.
pub fn invariance_defect(
    params: &TreeParams,
    psi: &BTreeMap<VertexId, f64>,
    domain: &[VertexId],
) -> Result<InvarianceReport> {
    if domain.is_empty() {
        return Err(Error::Domain("empty invariance domain".into()));
    }
    for x in domain {
        if !psi.contains_key(x) {
            return Err(Error::KernelValidation(format!("no ψ value at {x}")));
        }
    }
    let psi_kernel = |x: &VertexId, y: &VertexId| -> f64 {
        if x == y {
            0.0
        } else {
            tree::distance(x, y) as f64 - (psi[x] + psi[y]) / 2.0
        }
    };

    let mut constancy_defect: f64 = 0.0;
    for x in domain {
        for y in domain {
            constancy_defect = constancy_defect.max((psi[x] - psi[y]).abs());
        }
    }

    let mut kernel_defect: f64 = 0.0;
    for center in domain {
        // Group same-sphere pairs around this center.
        let mut by_radius: BTreeMap<u32, Vec<&VertexId>> = BTreeMap::new();
        for x in domain {
            by_radius.entry(tree::distance(center, x)).or_default().push(x);
        }
        let max_radius = by_radius.keys().copied().max().unwrap_or(0);
        for (radius, verts) in &by_radius {
            if *radius == 0 {
                continue;
            }
            for u in verts {
                for w in verts {
                    if u == w {
                        continue;
                    }
                    let a = BallAutomorphism::sphere_transport(
                        *params,
                        center.clone(),
                        max_radius,
                        u,
                        w,
                    )?;
                    // Evaluate the defect over all pairs the automorphism
                    // keeps inside the domain.
                    for x in domain {
                        for y in domain {
                            let (Ok(ax), Ok(ay)) = (a.apply(x), a.apply(y)) else {
                                continue;
                            };
                            if !psi.contains_key(&ax) || !psi.contains_key(&ay) {
                                continue;
                            }
                            let defect = (psi_kernel(&ax, &ay) - psi_kernel(x, y)).abs();
                            kernel_defect = kernel_defect.max(defect);
                        }
                    }
                }
            }
        }
    }
    Ok(InvarianceReport {
        kernel_defect,
        constancy_defect,
    })
}

/// The squared norm of the non-harmonic component of the unit flow at
/// distance d ≥ 1: positive, so the flow splits across two invariant
/// subspaces. Increasing in d and bounded by 2q/(q²−1).
pub fn haagerup_reducibility_gap(params: &TreeParams, d: u32) -> Result<f64> {
    if d < 1 {
        return Err(Error::InvalidParameter(
            "the reducibility gap needs d ≥ 1".into(),
        ));
    }
    Ok(green::projected_flow_norm_sq(params, d))
}

// Cyclic Jacobi eigendecomposition of a symmetric matrix (row-major n×n).
// Returns (eigenvalues, eigenvectors) with eigenvectors in columns:
// eigenvectors[i*n + k] is component i of the k-th eigenvector.
fn jacobi_eigen(matrix: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut a = matrix.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    if n <= 1 {
        return (a, v);
    }
    let scale: f64 = matrix.iter().map(|x| x * x).sum::<f64>().sqrt().max(1.0);
    for _sweep in 0..100 {
        let mut off: f64 = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        if off.sqrt() <= 1e-14 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    1.0 / (theta - (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let eigenvalues: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    (eigenvalues, v)
}
