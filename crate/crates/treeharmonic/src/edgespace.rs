//! The real Hilbert spaces of alternating edge functions and of
//! degree-weighted vertex functions, with the gradient / divergence pair,
//! the pointwise Laplacian, signed geodesic indicators, and path
//! integration.
//!
//! An alternating edge function satisfies ξ(ē) = −ξ(e); we store one value
//! per geometric edge under the canonical "away from the root" orientation
//! and flip the sign on reversed reads, so alternation holds by
//! construction. Inner products:
//!
//! - edges:    ⟨ξ,η⟩ = ½ Σ_e ξ(e)η(e)  (sum over oriented edges)
//! - vertices: (f,g) = Σ_x f(x)g(x)·deg(x)
//!
//! With these, the divergence below is the exact adjoint of the gradient,
//! and ℒ = −∇*∇ is the normalized graph Laplacian.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tree::{self, OrientedEdge, TreeParams, VertexId};

/// Finitely supported alternating function on oriented edges.
///
/// Keys are the deeper endpoint of each geometric edge; the stored value is
/// taken along the orientation pointing away from the root.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeFunction {
    params: TreeParams,
    entries: BTreeMap<VertexId, f64>,
}

/// One canonical-orientation entry in the JSON form of an [`EdgeFunction`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeEntry {
    pub source: String,
    pub target: String,
    pub value: f64,
}

/// One entry in the JSON form of a [`VertexFunction`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VertexEntry {
    pub vertex: String,
    pub value: f64,
}

impl EdgeFunction {
    pub fn zero(params: TreeParams) -> Self {
        EdgeFunction {
            params,
            entries: BTreeMap::new(),
        }
    }

    pub fn params(&self) -> &TreeParams {
        &self.params
    }

    /// Value along the orientation `source -> target`.
    pub fn value(&self, edge: &OrientedEdge) -> f64 {
        self.oriented_value(edge.source(), edge.target())
            .expect("OrientedEdge endpoints are adjacent")
    }

    /// Value along the orientation `source -> target`; the pair must be
    /// adjacent.
    pub fn oriented_value(&self, source: &VertexId, target: &VertexId) -> Result<f64> {
        if tree::distance(source, target) != 1 {
            return Err(Error::Domain(format!(
                "{source} and {target} are not adjacent"
            )));
        }
        let stored = if target.depth() > source.depth() {
            self.entries.get(target).copied().unwrap_or(0.0)
        } else {
            -self.entries.get(source).copied().unwrap_or(0.0)
        };
        Ok(stored)
    }

    /// Sets the value along the canonical orientation of the edge whose
    /// deeper endpoint is `deeper`. Exact zeros are pruned.
    pub fn set_canonical(&mut self, deeper: VertexId, value: f64) -> Result<()> {
        if deeper.is_root() {
            return Err(Error::Domain(
                "the root is not the deeper endpoint of any edge".into(),
            ));
        }
        if value == 0.0 {
            self.entries.remove(&deeper);
        } else {
            self.entries.insert(deeper, value);
        }
        Ok(())
    }

    /// Adds `delta` along the orientation `source -> target`.
    pub fn add_oriented(&mut self, source: &VertexId, target: &VertexId, delta: f64) -> Result<()> {
        if tree::distance(source, target) != 1 {
            return Err(Error::Domain(format!(
                "{source} and {target} are not adjacent"
            )));
        }
        let (key, signed) = if target.depth() > source.depth() {
            (target.clone(), delta)
        } else {
            (source.clone(), -delta)
        };
        let new = self.entries.get(&key).copied().unwrap_or(0.0) + signed;
        self.set_canonical(key, new)
    }

    /// Canonical entries, sorted by the deeper endpoint.
    pub fn canonical_entries(&self) -> impl Iterator<Item = (&VertexId, f64)> {
        self.entries.iter().map(|(k, &v)| (k, v))
    }

    /// Number of geometric edges in the support.
    pub fn support_size(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// ½ Σ_e ξ(e)² = one term per geometric edge.
    pub fn norm_sq(&self) -> f64 {
        // + 0.0 keeps the empty sum at positive zero.
        self.entries.values().map(|v| v * v).sum::<f64>() + 0.0
    }

    /// ⟨ξ,η⟩ = ½ Σ_e ξ(e)η(e).
    pub fn inner(&self, other: &EdgeFunction) -> Result<f64> {
        self.check_params(other)?;
        let (small, large) = if self.entries.len() <= other.entries.len() {
            (self, other)
        } else {
            (other, self)
        };
        Ok(small
            .entries
            .iter()
            .map(|(k, v)| v * large.entries.get(k).copied().unwrap_or(0.0))
            .sum())
    }

    pub fn add(&self, other: &EdgeFunction) -> Result<EdgeFunction> {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &EdgeFunction) -> Result<EdgeFunction> {
        self.combine(other, -1.0)
    }

    fn combine(&self, other: &EdgeFunction, sign: f64) -> Result<EdgeFunction> {
        self.check_params(other)?;
        let mut entries = self.entries.clone();
        for (k, v) in &other.entries {
            let new = entries.get(k).copied().unwrap_or(0.0) + sign * v;
            if new == 0.0 {
                entries.remove(k);
            } else {
                entries.insert(k.clone(), new);
            }
        }
        Ok(EdgeFunction {
            params: self.params,
            entries,
        })
    }

    pub fn scale(&self, factor: f64) -> EdgeFunction {
        let entries = if factor == 0.0 {
            BTreeMap::new()
        } else {
            self.entries
                .iter()
                .map(|(k, v)| (k.clone(), v * factor))
                .collect()
        };
        EdgeFunction {
            params: self.params,
            entries,
        }
    }

    fn check_params(&self, other: &EdgeFunction) -> Result<()> {
        if self.params != other.params {
            return Err(Error::ParamsMismatch(format!(
                "q={} vs q={}",
                self.params.q(),
                other.params.q()
            )));
        }
        Ok(())
    }

    /// JSON form: canonical-orientation entries `{source, target, value}`.
    pub fn to_entries(&self) -> Vec<EdgeEntry> {
        self.entries
            .iter()
            .map(|(k, &v)| EdgeEntry {
                source: k.parent().expect("non-root key").to_string(),
                target: k.to_string(),
                value: v,
            })
            .collect()
    }
}

/// Finitely supported function on vertices, with the deg-weighted inner
/// product.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexFunction {
    params: TreeParams,
    entries: BTreeMap<VertexId, f64>,
}

impl VertexFunction {
    pub fn zero(params: TreeParams) -> Self {
        VertexFunction {
            params,
            entries: BTreeMap::new(),
        }
    }

    /// The point mass at `x` (value 1).
    pub fn delta(params: TreeParams, x: VertexId) -> Self {
        let mut entries = BTreeMap::new();
        entries.insert(x, 1.0);
        VertexFunction { params, entries }
    }

    pub fn params(&self) -> &TreeParams {
        &self.params
    }

    pub fn value(&self, x: &VertexId) -> f64 {
        self.entries.get(x).copied().unwrap_or(0.0)
    }

    pub fn set(&mut self, x: VertexId, value: f64) {
        if value == 0.0 {
            self.entries.remove(&x);
        } else {
            self.entries.insert(x, value);
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (&VertexId, f64)> {
        self.entries.iter().map(|(k, &v)| (k, v))
    }

    pub fn support_size(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Σ_x f(x)²·deg(x).
    pub fn norm_sq(&self) -> f64 {
        let deg = self.params.degree() as f64;
        self.entries.values().map(|v| v * v * deg).sum::<f64>() + 0.0
    }

    /// (f,g) = Σ_x f(x)g(x)·deg(x).
    pub fn inner(&self, other: &VertexFunction) -> Result<f64> {
        if self.params != other.params {
            return Err(Error::ParamsMismatch(format!(
                "q={} vs q={}",
                self.params.q(),
                other.params.q()
            )));
        }
        let deg = self.params.degree() as f64;
        let (small, large) = if self.entries.len() <= other.entries.len() {
            (self, other)
        } else {
            (other, self)
        };
        Ok(small
            .entries
            .iter()
            .map(|(k, v)| v * large.value(k) * deg)
            .sum())
    }

    pub fn scale(&self, factor: f64) -> VertexFunction {
        let entries = if factor == 0.0 {
            BTreeMap::new()
        } else {
            self.entries
                .iter()
                .map(|(k, v)| (k.clone(), v * factor))
                .collect()
        };
        VertexFunction {
            params: self.params,
            entries,
        }
    }

    /// Sum of |f(x)| over the support.
    pub fn abs_sum(&self) -> f64 {
        self.entries.values().map(|v| v.abs()).sum()
    }

    pub fn to_entries(&self) -> Vec<VertexEntry> {
        self.entries
            .iter()
            .map(|(k, &v)| VertexEntry {
                vertex: k.to_string(),
                value: v,
            })
            .collect()
    }
}

/// Signed indicator of the geodesic from `x` to `y`: +1 on edges traversed
/// from x toward y, −1 on their reversals, 0 elsewhere. `unit_flow(x, x)`
/// is the zero function. Its squared norm is exactly d(x,y).
pub fn unit_flow(params: TreeParams, x: &VertexId, y: &VertexId) -> EdgeFunction {
    let mut out = EdgeFunction::zero(params);
    let geo = tree::geodesic(x, y);
    for step in geo.windows(2) {
        let (a, b) = (&step[0], &step[1]);
        if b.depth() > a.depth() {
            out.set_canonical(b.clone(), 1.0).expect("non-root deeper");
        } else {
            out.set_canonical(a.clone(), -1.0).expect("non-root deeper");
        }
    }
    out
}

/// (∇f)(e) = f(e₊) − f(e₋). Supported on edges incident to supp(f).
pub fn gradient(f: &VertexFunction) -> EdgeFunction {
    let params = *f.params();
    let mut keys: BTreeSet<VertexId> = BTreeSet::new();
    for (x, _) in f.entries() {
        if !x.is_root() {
            keys.insert(x.clone());
        }
        for slot in 0..x.child_slots(&params) {
            keys.insert(x.child(slot as u8, &params).expect("slot in range"));
        }
    }
    let mut out = EdgeFunction::zero(params);
    for key in keys {
        let parent = key.parent().expect("non-root key");
        let v = f.value(&key) - f.value(&parent);
        out.set_canonical(key, v).expect("non-root key");
    }
    out
}

/// (∇*ξ)(x) = (1/deg) Σ_{y∼x} ξ(y→x): the adjoint of the gradient.
pub fn divergence(xi: &EdgeFunction) -> VertexFunction {
    let params = *xi.params();
    let deg = params.degree() as f64;
    let mut acc: BTreeMap<VertexId, f64> = BTreeMap::new();
    for (key, v) in xi.canonical_entries() {
        let parent = key.parent().expect("non-root key");
        // Canonical value v flows parent -> key: incoming +v at key,
        // and the reversal is incoming -v at parent.
        *acc.entry(key.clone()).or_insert(0.0) += v / deg;
        *acc.entry(parent).or_insert(0.0) -= v / deg;
    }
    let mut out = VertexFunction::zero(params);
    for (k, v) in acc {
        out.set(k, v);
    }
    out
}

/// ℒf(x) = (1/deg) Σ_{y∼x} f(y) − f(x), evaluated at one vertex.
pub fn laplacian(f: &VertexFunction, x: &VertexId) -> f64 {
    let params = *f.params();
    let avg: f64 = tree::neighbors(&params, x)
        .iter()
        .map(|n| f.value(n))
        .sum::<f64>()
        / params.degree() as f64;
    avg - f.value(x)
}

/// Integrates an alternating edge function along geodesics from `x0`: the
/// unique ξ̃ on the domain with ξ̃(x0) = 0 and ∇ξ̃ = ξ on interior edges.
/// The domain must contain `x0` and be connected.
pub fn integrate(
    xi: &EdgeFunction,
    x0: &VertexId,
    domain: &BTreeSet<VertexId>,
) -> Result<VertexFunction> {
    let params = *xi.params();
    if !domain.contains(x0) {
        return Err(Error::Domain(format!(
            "integration domain does not contain the basepoint {x0}"
        )));
    }
    let mut values: BTreeMap<VertexId, f64> = BTreeMap::new();
    values.insert(x0.clone(), 0.0);
    let mut frontier = vec![x0.clone()];
    while let Some(v) = frontier.pop() {
        let base = values[&v];
        for n in tree::neighbors(&params, &v) {
            if domain.contains(&n) && !values.contains_key(&n) {
                let step = xi.oriented_value(&v, &n).expect("adjacent");
                values.insert(n.clone(), base + step);
                frontier.push(n);
            }
        }
    }
    if values.len() != domain.len() {
        return Err(Error::Domain(format!(
            "integration domain is disconnected: reached {} of {} vertices from {x0}",
            values.len(),
            domain.len()
        )));
    }
    let mut out = VertexFunction::zero(params);
    for (k, v) in values {
        out.set(k, v);
    }
    Ok(out)
}
