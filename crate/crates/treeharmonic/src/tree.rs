//! Combinatorics of the (q+1)-regular tree.
//!
//! Vertices are addressed by their path from a distinguished root: the root
//! has q+1 children (slots `0..=q`), every other vertex has q children
//! (slots `0..q`) plus its parent, so every vertex has exactly q+1
//! neighbors. Addresses are canonical: two vertices are equal iff their
//! paths are equal.
//!
//! Distances, geodesics, balls and spheres are exact integer computations.
//! [`BallAutomorphism`] gives distance-preserving relabelings of a ball
//! around a center, built from per-vertex permutations of child slots; they
//! compose, invert, and act transitively on each sphere about their center.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Branching parameter of the (q+1)-regular tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TreeParams {
    q: u32,
}

impl TreeParams {
    /// Requires q ≥ 2 (the hyperbolic regime; q = 1 is the line).
    pub fn new(q: u32) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidParameter(format!(
                "branching parameter q must be at least 2, got {q}"
            )));
        }
        if q > 254 {
            return Err(Error::InvalidParameter(format!(
                "branching parameter q must be at most 254, got {q}"
            )));
        }
        Ok(TreeParams { q })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Every vertex has q+1 neighbors.
    pub fn degree(&self) -> u32 {
        self.q + 1
    }

    /// |S(x, n)| = (q+1)·q^(n−1) for n ≥ 1, and 1 for n = 0.
    pub fn sphere_size(&self, n: u32) -> u128 {
        if n == 0 {
            1
        } else {
            (self.q as u128 + 1) * (self.q as u128).pow(n - 1)
        }
    }

    /// |B(x, r)| = 1 + (q+1)(q^r − 1)/(q − 1).
    pub fn ball_size(&self, r: u32) -> u128 {
        let q = self.q as u128;
        1 + (q + 1) * (q.pow(r) - 1) / (q - 1)
    }
}

/// Canonical root-based address of a vertex.
///
/// The empty path is the root. The first step is in `0..=q`, all later
/// steps in `0..q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VertexId {
    path: Vec<u8>,
}

impl VertexId {
    pub fn root() -> Self {
        VertexId { path: Vec::new() }
    }

    /// Validates the path against the branching parameter.
    pub fn new(path: Vec<u8>, params: &TreeParams) -> Result<Self> {
        let q = params.q() as u8;
        for (i, &step) in path.iter().enumerate() {
            let limit = if i == 0 { q } else { q - 1 };
            if step > limit {
                return Err(Error::Address(format!(
                    "step {i} is {step}, but slots at that position range over 0..={limit} for q={q}"
                )));
            }
        }
        Ok(VertexId { path })
    }

    /// Parses the slash-separated text form: `/` is the root, `/0/1` is the
    /// child 1 of child 0 of the root.
    pub fn parse(text: &str, params: &TreeParams) -> Result<Self> {
        if text == "/" {
            return Ok(VertexId::root());
        }
        let Some(rest) = text.strip_prefix('/') else {
            return Err(Error::Address(format!(
                "address {text:?} must start with '/'"
            )));
        };
        let mut path = Vec::new();
        for piece in rest.split('/') {
            if piece.is_empty() {
                return Err(Error::Address(format!(
                    "address {text:?} contains an empty path segment"
                )));
            }
            let step: u8 = piece.parse().map_err(|_| {
                Error::Address(format!("address segment {piece:?} is not a child index"))
            })?;
            path.push(step);
        }
        VertexId::new(path, params)
    }

    pub fn path(&self) -> &[u8] {
        &self.path
    }

    pub fn is_root(&self) -> bool {
        self.path.is_empty()
    }

    /// Distance to the root.
    pub fn depth(&self) -> u32 {
        self.path.len() as u32
    }

    pub fn parent(&self) -> Option<VertexId> {
        if self.path.is_empty() {
            None
        } else {
            Some(VertexId {
                path: self.path[..self.path.len() - 1].to_vec(),
            })
        }
    }

    /// Number of child slots below this vertex.
    pub fn child_slots(&self, params: &TreeParams) -> u32 {
        if self.is_root() {
            params.q() + 1
        } else {
            params.q()
        }
    }

    pub fn child(&self, slot: u8, params: &TreeParams) -> Result<VertexId> {
        if (slot as u32) >= self.child_slots(params) {
            return Err(Error::Address(format!(
                "child slot {slot} out of range at {self}"
            )));
        }
        let mut path = self.path.clone();
        path.push(slot);
        Ok(VertexId { path })
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            return write!(f, "/");
        }
        for step in &self.path {
            write!(f, "/{step}")?;
        }
        Ok(())
    }
}

// Order by depth first, then lexicographically: ball enumeration order.
impl Ord for VertexId {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.path.len(), &self.path).cmp(&(other.path.len(), &other.path))
    }
}

impl PartialOrd for VertexId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// An oriented edge; its reversal swaps source and target and is never
/// equal to the edge itself.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrientedEdge {
    source: VertexId,
    target: VertexId,
}

impl OrientedEdge {
    pub fn new(source: VertexId, target: VertexId) -> Result<Self> {
        if distance(&source, &target) != 1 {
            return Err(Error::Domain(format!(
                "{source} and {target} are not adjacent"
            )));
        }
        Ok(OrientedEdge { source, target })
    }

    pub fn source(&self) -> &VertexId {
        &self.source
    }

    pub fn target(&self) -> &VertexId {
        &self.target
    }

    pub fn reversed(&self) -> OrientedEdge {
        OrientedEdge {
            source: self.target.clone(),
            target: self.source.clone(),
        }
    }

    /// The storage key of the underlying geometric edge: its endpoint
    /// farther from the root. Orientation "away from the root" is the
    /// canonical one.
    pub fn canonical_key(&self) -> &VertexId {
        if self.target.depth() > self.source.depth() {
            &self.target
        } else {
            &self.source
        }
    }

    /// True when the edge points away from the root.
    pub fn is_canonical(&self) -> bool {
        self.target.depth() > self.source.depth()
    }
}

impl fmt::Display for OrientedEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.source, self.target)
    }
}

/// Length of the unique geodesic between two vertices.
pub fn distance(u: &VertexId, v: &VertexId) -> u32 {
    let common = u
        .path()
        .iter()
        .zip(v.path().iter())
        .take_while(|(a, b)| a == b)
        .count();
    (u.path().len() - common + v.path().len() - common) as u32
}

/// The geodesic from `u` to `v`, inclusive; passes through the deepest
/// common ancestor.
pub fn geodesic(u: &VertexId, v: &VertexId) -> Vec<VertexId> {
    let common = u
        .path()
        .iter()
        .zip(v.path().iter())
        .take_while(|(a, b)| a == b)
        .count();
    let mut out = Vec::with_capacity(u.path().len() + v.path().len() - 2 * common + 1);
    for len in (common..=u.path().len()).rev() {
        out.push(VertexId {
            path: u.path()[..len].to_vec(),
        });
    }
    for len in common + 1..=v.path().len() {
        out.push(VertexId {
            path: v.path()[..len].to_vec(),
        });
    }
    out
}

/// All q+1 neighbors of a vertex, in canonical order (parent first).
pub fn neighbors(params: &TreeParams, v: &VertexId) -> Vec<VertexId> {
    let mut out = Vec::with_capacity(params.degree() as usize);
    if let Some(p) = v.parent() {
        out.push(p);
    }
    for slot in 0..v.child_slots(params) {
        out.push(v.child(slot as u8, params).expect("slot in range"));
    }
    out
}

/// All vertices at distance ≤ `radius` from `center`, sorted.
pub fn ball(params: &TreeParams, center: &VertexId, radius: u32) -> Vec<VertexId> {
    let mut seen: std::collections::BTreeSet<VertexId> = std::collections::BTreeSet::new();
    seen.insert(center.clone());
    let mut frontier = vec![center.clone()];
    for _ in 0..radius {
        let mut next = Vec::new();
        for v in &frontier {
            for n in neighbors(params, v) {
                if seen.insert(n.clone()) {
                    next.push(n);
                }
            }
        }
        frontier = next;
    }
    seen.into_iter().collect()
}

/// All vertices at distance exactly `radius` from `center`, sorted.
pub fn sphere(params: &TreeParams, center: &VertexId, radius: u32) -> Vec<VertexId> {
    ball(params, center, radius)
        .into_iter()
        .filter(|v| distance(center, v) == radius)
        .collect()
}

/// Multi-source distance map: every vertex within `radius` of some source,
/// with its distance to the source set.
pub fn multi_source_ball(
    params: &TreeParams,
    sources: &[VertexId],
    radius: u32,
) -> BTreeMap<VertexId, u32> {
    let mut dist: BTreeMap<VertexId, u32> = BTreeMap::new();
    let mut frontier: Vec<VertexId> = Vec::new();
    for s in sources {
        if !dist.contains_key(s) {
            dist.insert(s.clone(), 0);
            frontier.push(s.clone());
        }
    }
    for d in 1..=radius {
        let mut next = Vec::new();
        for v in &frontier {
            for n in neighbors(params, v) {
                if !dist.contains_key(&n) {
                    dist.insert(n.clone(), d);
                    next.push(n);
                }
            }
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    dist
}

/// Neighbors of `v` farther from `center` than `v` is, in canonical order.
/// These are the "away slots" that ball automorphisms permute.
pub fn away_neighbors(params: &TreeParams, center: &VertexId, v: &VertexId) -> Vec<VertexId> {
    let dv = distance(center, v);
    neighbors(params, v)
        .into_iter()
        .filter(|n| distance(center, n) == dv + 1)
        .collect()
}

/// Slot indices of the geodesic steps from `center` to `v`, each an index
/// into the away-neighbor list of the preceding vertex.
fn slot_path(params: &TreeParams, center: &VertexId, v: &VertexId) -> Vec<usize> {
    let geo = geodesic(center, v);
    let mut slots = Vec::with_capacity(geo.len().saturating_sub(1));
    for step in geo.windows(2) {
        let away = away_neighbors(params, center, &step[0]);
        let idx = away
            .iter()
            .position(|n| n == &step[1])
            .expect("geodesic step away from center");
        slots.push(idx);
    }
    slots
}

/// A root-fixing relabeling of the ball B(center, radius): at each vertex a
/// permutation of its away slots. Fixes the center, preserves adjacency and
/// distance to the center, and is invertible.
#[derive(Debug, Clone)]
pub struct BallAutomorphism {
    params: TreeParams,
    center: VertexId,
    radius: u32,
    // Permutation of away slots, keyed by the pre-image vertex. Missing
    // entries are the identity.
    perms: BTreeMap<VertexId, Vec<u8>>,
}

impl BallAutomorphism {
    pub fn identity(params: TreeParams, center: VertexId, radius: u32) -> Self {
        BallAutomorphism {
            params,
            center,
            radius,
            perms: BTreeMap::new(),
        }
    }

    pub fn center(&self) -> &VertexId {
        &self.center
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    /// Swaps two away slots at one vertex of the ball; everything else is
    /// fixed pointwise below other branches.
    pub fn child_transposition(
        params: TreeParams,
        center: VertexId,
        radius: u32,
        at: &VertexId,
        slot_a: usize,
        slot_b: usize,
    ) -> Result<Self> {
        let d = distance(&center, at);
        if d >= radius {
            return Err(Error::Domain(format!(
                "vertex {at} has no away slots inside the radius-{radius} ball"
            )));
        }
        let away = away_neighbors(&params, &center, at);
        if slot_a >= away.len() || slot_b >= away.len() {
            return Err(Error::Domain(format!(
                "slot indices {slot_a},{slot_b} out of range 0..{} at {at}",
                away.len()
            )));
        }
        let mut perm: Vec<u8> = (0..away.len() as u8).collect();
        perm.swap(slot_a, slot_b);
        let mut perms = BTreeMap::new();
        if slot_a != slot_b {
            perms.insert(at.clone(), perm);
        }
        Ok(BallAutomorphism {
            params,
            center,
            radius,
            perms,
        })
    }

    /// An automorphism of B(center, radius) mapping `u` to `v`; requires
    /// d(center,u) = d(center,v) ≤ radius. Built as a composition of one
    /// slot transposition per geodesic step (the sphere-transitivity
    /// witness).
    pub fn sphere_transport(
        params: TreeParams,
        center: VertexId,
        radius: u32,
        u: &VertexId,
        v: &VertexId,
    ) -> Result<Self> {
        let du = distance(&center, u);
        let dv = distance(&center, v);
        if du != dv {
            return Err(Error::Domain(format!(
                "{u} and {v} lie on different spheres about {center} ({du} vs {dv})"
            )));
        }
        if du > radius {
            return Err(Error::Domain(format!(
                "{u} lies outside the radius-{radius} ball about {center}"
            )));
        }
        let su = slot_path(&params, &center, u);
        let sv = slot_path(&params, &center, v);
        let mut perms = BTreeMap::new();
        let mut pre = center.clone();
        for (j, (&a, &b)) in su.iter().zip(sv.iter()).enumerate() {
            if a != b {
                let away = away_neighbors(&params, &center, &pre);
                let mut perm: Vec<u8> = (0..away.len() as u8).collect();
                perm.swap(a, b);
                perms.insert(pre.clone(), perm);
            }
            let away = away_neighbors(&params, &center, &pre);
            pre = away[su[j]].clone();
        }
        Ok(BallAutomorphism {
            params,
            center,
            radius,
            perms,
        })
    }

    fn perm_at(&self, v: &VertexId) -> Option<&Vec<u8>> {
        self.perms.get(v)
    }

    /// Image of a vertex of the ball.
    pub fn apply(&self, v: &VertexId) -> Result<VertexId> {
        let d = distance(&self.center, v);
        if d > self.radius {
            return Err(Error::Domain(format!(
                "{v} lies outside the radius-{} ball about {}",
                self.radius, self.center
            )));
        }
        let slots = slot_path(&self.params, &self.center, v);
        let mut pre = self.center.clone();
        let mut img = self.center.clone();
        for &s in &slots {
            let s_img = match self.perm_at(&pre) {
                Some(p) => p[s] as usize,
                None => s,
            };
            let away_img = away_neighbors(&self.params, &self.center, &img);
            img = away_img[s_img].clone();
            let away_pre = away_neighbors(&self.params, &self.center, &pre);
            pre = away_pre[s].clone();
        }
        Ok(img)
    }

    /// Composition self ∘ other (apply `other` first). Centers must match;
    /// the radius is the smaller of the two.
    pub fn compose(&self, other: &BallAutomorphism) -> Result<BallAutomorphism> {
        if self.center != other.center {
            return Err(Error::Domain(format!(
                "cannot compose automorphisms centered at {} and {}",
                self.center, other.center
            )));
        }
        let radius = self.radius.min(other.radius);
        let mut perms = BTreeMap::new();
        for v in ball(&self.params, &self.center, radius.saturating_sub(1)) {
            let img = other.apply(&v)?;
            let n = away_neighbors(&self.params, &self.center, &v).len();
            let mut perm = Vec::with_capacity(n);
            let mut is_identity = true;
            for s in 0..n {
                let s1 = match other.perm_at(&v) {
                    Some(p) => p[s] as usize,
                    None => s,
                };
                let s2 = match self.perm_at(&img) {
                    Some(p) => p[s1] as usize,
                    None => s1,
                };
                if s2 != s {
                    is_identity = false;
                }
                perm.push(s2 as u8);
            }
            if !is_identity {
                perms.insert(v, perm);
            }
        }
        Ok(BallAutomorphism {
            params: self.params,
            center: self.center.clone(),
            radius,
            perms,
        })
    }

    pub fn inverse(&self) -> BallAutomorphism {
        let mut perms = BTreeMap::new();
        for (v, perm) in &self.perms {
            let img = self.apply(v).expect("portrait vertex inside ball");
            let mut inv = vec![0u8; perm.len()];
            for (s, &t) in perm.iter().enumerate() {
                inv[t as usize] = s as u8;
            }
            perms.insert(img, inv);
        }
        BallAutomorphism {
            params: self.params,
            center: self.center.clone(),
            radius: self.radius,
            perms,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::{BTreeSet, HashMap, VecDeque};

    fn params(q: u32) -> TreeParams {
        TreeParams::new(q).unwrap()
    }

    fn v(params: &TreeParams, path: &[u8]) -> VertexId {
        VertexId::new(path.to_vec(), params).unwrap()
    }

    /// Independent oracle: BFS distances and parent pointers on the
    /// materialized ball, using only `neighbors`.
    fn bfs_oracle(
        p: &TreeParams,
        start: &VertexId,
        radius: u32,
    ) -> (HashMap<VertexId, u32>, HashMap<VertexId, VertexId>) {
        let mut dist = HashMap::new();
        let mut parent = HashMap::new();
        let mut queue = VecDeque::new();
        dist.insert(start.clone(), 0);
        queue.push_back(start.clone());
        while let Some(u) = queue.pop_front() {
            let du = dist[&u];
            if du == radius {
                continue;
            }
            for n in neighbors(p, &u) {
                if !dist.contains_key(&n) {
                    dist.insert(n.clone(), du + 1);
                    parent.insert(n.clone(), u.clone());
                    queue.push_back(n);
                }
            }
        }
        (dist, parent)
    }

    #[test]
    fn params_rejects_small_q() {
        assert!(TreeParams::new(0).is_err());
        assert!(TreeParams::new(1).is_err());
        assert!(TreeParams::new(2).is_ok());
    }

    #[test]
    fn distance_identity_and_adjacency() {
        let p = params(2);
        let root = VertexId::root();
        assert_eq!(distance(&root, &root), 0);
        assert_eq!(distance(&root, &v(&p, &[0])), 1);
    }

    #[test]
    fn distance_matches_bfs_oracle() {
        // Frozen from the BFS oracle: d([0,1],[1]) = 3 for q = 2.
        let p = params(2);
        let a = v(&p, &[0, 1]);
        let b = v(&p, &[1]);
        let (dist, _) = bfs_oracle(&p, &a, 3);
        assert_eq!(dist[&b], 3);
        assert_eq!(distance(&a, &b), 3);
    }

    #[test]
    fn geodesic_trivial_cases() {
        let p = params(2);
        let root = VertexId::root();
        let c = v(&p, &[1]);
        assert_eq!(geodesic(&c, &c), vec![c.clone()]);
        assert_eq!(geodesic(&root, &c), vec![root.clone(), c.clone()]);
    }

    #[test]
    fn geodesic_matches_bfs_parent_reconstruction() {
        let p = params(2);
        let a = v(&p, &[0, 1]);
        let b = v(&p, &[1]);
        let (_, parent) = bfs_oracle(&p, &a, 3);
        let mut chain = vec![b.clone()];
        while let Some(pr) = parent.get(chain.last().unwrap()) {
            chain.push(pr.clone());
        }
        chain.reverse();
        assert_eq!(chain, vec![a.clone(), v(&p, &[0]), VertexId::root(), b.clone()]);
        assert_eq!(geodesic(&a, &b), chain);
    }

    #[test]
    fn ball_sizes_match_closed_form() {
        let p2 = params(2);
        let root = VertexId::root();
        assert_eq!(ball(&p2, &root, 0), vec![root.clone()]);
        assert_eq!(ball(&p2, &root, 2).len(), 10);
        let p3 = params(3);
        assert_eq!(ball(&p3, &root, 1).len(), 5);
        for q in [2u32, 3, 4] {
            let p = params(q);
            for r in 0..=4 {
                assert_eq!(ball(&p, &root, r).len() as u128, p.ball_size(r));
            }
        }
    }

    #[test]
    fn ball_is_centered_correctly_off_root() {
        let p = params(2);
        let c = v(&p, &[0, 1]);
        let b = ball(&p, &c, 2);
        assert_eq!(b.len() as u128, p.ball_size(2));
        for x in &b {
            assert!(distance(&c, x) <= 2);
        }
        // Spheres around an off-root center have the homogeneous sizes.
        for r in 1..=2u32 {
            let count = b.iter().filter(|x| distance(&c, x) == r).count();
            assert_eq!(count as u128, p.sphere_size(r));
        }
    }

    #[test]
    fn sphere_sizes_exhaustive() {
        let root = VertexId::root();
        for q in [2u32, 3, 4] {
            let p = params(q);
            for n in 1..=6u32 {
                assert_eq!(
                    sphere(&p, &root, n).len() as u128,
                    p.sphere_size(n),
                    "q={q} n={n}"
                );
            }
        }
    }

    #[test]
    fn address_validation() {
        let p = params(2);
        assert!(VertexId::new(vec![2], &p).is_ok()); // root has slots 0..=2
        assert!(VertexId::new(vec![3], &p).is_err());
        assert!(VertexId::new(vec![0, 1], &p).is_ok()); // deeper slots 0..=1
        assert!(VertexId::new(vec![0, 2], &p).is_err());
    }

    #[test]
    fn parse_and_display_round_trip() {
        let p = params(3);
        for text in ["/", "/0", "/3", "/3/2/0"] {
            let vid = VertexId::parse(text, &p).unwrap();
            assert_eq!(vid.to_string(), text);
        }
        for bad in ["", "0", "//", "/x", "/4", "/0/3", "/0/"] {
            assert!(VertexId::parse(bad, &p).is_err(), "{bad:?} should fail");
        }
    }

    #[test]
    fn oriented_edge_involution() {
        let p = params(2);
        let e = OrientedEdge::new(VertexId::root(), v(&p, &[1])).unwrap();
        let r = e.reversed();
        assert_ne!(e, r);
        assert_eq!(r.reversed(), e);
        assert_eq!(e.canonical_key(), &v(&p, &[1]));
        assert_eq!(r.canonical_key(), &v(&p, &[1]));
        assert!(e.is_canonical());
        assert!(!r.is_canonical());
        assert!(OrientedEdge::new(VertexId::root(), v(&p, &[0, 0])).is_err());
    }

    #[test]
    fn every_vertex_has_degree_neighbors() {
        for q in [2u32, 3] {
            let p = params(q);
            for x in ball(&p, &VertexId::root(), 3) {
                let ns = neighbors(&p, &x);
                assert_eq!(ns.len() as u32, p.degree());
                let set: BTreeSet<_> = ns.iter().collect();
                assert_eq!(set.len(), ns.len());
                for n in &ns {
                    assert_eq!(distance(&x, n), 1);
                }
            }
        }
    }

    #[test]
    fn identity_automorphism_fixes_everything() {
        let p = params(2);
        let a = BallAutomorphism::identity(p, VertexId::root(), 3);
        for x in ball(&p, &VertexId::root(), 3) {
            assert_eq!(a.apply(&x).unwrap(), x);
        }
    }

    #[test]
    fn root_child_swap() {
        let p = params(2);
        let root = VertexId::root();
        let a =
            BallAutomorphism::child_transposition(p, root.clone(), 3, &root, 0, 1).unwrap();
        assert_eq!(a.apply(&v(&p, &[0])).unwrap(), v(&p, &[1]));
        assert_eq!(a.apply(&v(&p, &[1])).unwrap(), v(&p, &[0]));
        assert_eq!(a.apply(&v(&p, &[2])).unwrap(), v(&p, &[2]));
        // Whole subtrees move with the swapped slot.
        assert_eq!(a.apply(&v(&p, &[0, 1])).unwrap(), v(&p, &[1, 1]));
    }

    #[test]
    fn composed_swaps_preserve_sphere_radius() {
        let p = params(2);
        let root = VertexId::root();
        let a =
            BallAutomorphism::child_transposition(p, root.clone(), 3, &root, 0, 2).unwrap();
        let b = BallAutomorphism::child_transposition(p, root.clone(), 3, &v(&p, &[1]), 0, 1)
            .unwrap();
        let c = a.compose(&b).unwrap();
        for x in ball(&p, &root, 3) {
            let y = c.apply(&x).unwrap();
            assert_eq!(distance(&root, &y), distance(&root, &x));
        }
    }

    #[test]
    fn compose_with_inverse_is_identity() {
        let p = params(2);
        let root = VertexId::root();
        let a =
            BallAutomorphism::child_transposition(p, root.clone(), 3, &root, 0, 1).unwrap();
        let b = BallAutomorphism::child_transposition(p, root.clone(), 3, &v(&p, &[0]), 0, 1)
            .unwrap();
        let c = a.compose(&b).unwrap();
        let id = c.compose(&c.inverse()).unwrap();
        for x in ball(&p, &root, 3) {
            assert_eq!(id.apply(&x).unwrap(), x);
        }
    }

    #[test]
    fn automorphism_rejects_outside_domain() {
        let p = params(2);
        let a = BallAutomorphism::identity(p, VertexId::root(), 2);
        assert!(a.apply(&v(&p, &[0, 0, 0])).is_err());
    }

    #[test]
    fn sphere_transport_is_transitive_on_spheres() {
        // Exhaustive at small radius: every same-sphere pair is connected.
        let p = params(2);
        let root = VertexId::root();
        for r in 1..=3u32 {
            let sph = sphere(&p, &root, r);
            for u in &sph {
                for w in &sph {
                    let a =
                        BallAutomorphism::sphere_transport(p, root.clone(), 3, u, w).unwrap();
                    assert_eq!(&a.apply(u).unwrap(), w);
                    // Still distance preserving everywhere.
                    for x in ball(&p, &root, 3) {
                        let y = a.apply(&x).unwrap();
                        assert_eq!(distance(&root, &y), distance(&root, &x));
                    }
                }
            }
        }
    }

    #[test]
    fn sphere_transport_off_center() {
        // Centered at a neighbor of the root, the transport moves the root
        // two levels down: the re-centering trick behind the invariance
        // tests.
        let p = params(2);
        let c = v(&p, &[0]);
        let u = VertexId::root();
        let w = v(&p, &[0, 1]);
        assert_eq!(distance(&c, &u), distance(&c, &w));
        let a = BallAutomorphism::sphere_transport(p, c.clone(), 3, &u, &w).unwrap();
        assert_eq!(a.apply(&u).unwrap(), w);
        assert_eq!(a.apply(&c).unwrap(), c);
    }

    #[test]
    fn sphere_transport_transitive_around_off_root_center() {
        let p = params(2);
        let c = v(&p, &[1]);
        for r in 1..=2u32 {
            let sph = sphere(&p, &c, r);
            assert_eq!(sph.len() as u128, p.sphere_size(r));
            for u in &sph {
                for w in &sph {
                    let a = BallAutomorphism::sphere_transport(p, c.clone(), 2, u, w).unwrap();
                    assert_eq!(&a.apply(u).unwrap(), w);
                    for x in ball(&p, &c, 2) {
                        assert_eq!(distance(&c, &a.apply(&x).unwrap()), distance(&c, &x));
                    }
                }
            }
        }
    }

    #[test]
    fn sphere_transport_rejects_mismatched_spheres() {
        let p = params(2);
        let root = VertexId::root();
        assert!(
            BallAutomorphism::sphere_transport(p, root.clone(), 3, &v(&p, &[0]), &v(&p, &[0, 0]))
                .is_err()
        );
    }

    #[test]
    fn multi_source_ball_distances() {
        let p = params(2);
        let sources = [VertexId::root(), v(&p, &[0, 0])];
        let map = multi_source_ball(&p, &sources, 2);
        for (x, d) in &map {
            let want = sources.iter().map(|s| distance(s, x)).min().unwrap();
            assert_eq!(*d, want);
        }
        assert!(map.contains_key(&v(&p, &[0, 0, 1])));
    }

    proptest! {
        #[test]
        fn distance_axioms(
            a in proptest::collection::vec(0u8..3, 0..8),
            b in proptest::collection::vec(0u8..3, 0..8),
            c in proptest::collection::vec(0u8..3, 0..8),
        ) {
            let p = params(3);
            let u = VertexId::new(a, &p).unwrap();
            let v_ = VertexId::new(b, &p).unwrap();
            let w = VertexId::new(c, &p).unwrap();
            prop_assert_eq!(distance(&u, &v_), distance(&v_, &u));
            prop_assert!(distance(&u, &w) <= distance(&u, &v_) + distance(&v_, &w));
            prop_assert_eq!(distance(&u, &v_) == 0, u == v_);
        }

        #[test]
        fn geodesic_reversal(
            a in proptest::collection::vec(0u8..3, 0..8),
            b in proptest::collection::vec(0u8..3, 0..8),
        ) {
            let p = params(3);
            let u = VertexId::new(a, &p).unwrap();
            let v_ = VertexId::new(b, &p).unwrap();
            let mut fwd = geodesic(&u, &v_);
            let bwd = geodesic(&v_, &u);
            fwd.reverse();
            prop_assert_eq!(fwd, bwd);
            let geo = geodesic(&u, &v_);
            prop_assert_eq!(geo.len() as u32, distance(&u, &v_) + 1);
            for step in geo.windows(2) {
                prop_assert_eq!(distance(&step[0], &step[1]), 1);
            }
        }
    }
}
