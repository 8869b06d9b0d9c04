//! # treeharmonic
//!
//! Exact and controlled-truncation computations for harmonic analysis on
//! the (q+1)-regular tree: edge-space operators, the Green kernel and the
//! orthogonal projection onto gradients, growth profiles of equivariant
//! embeddings, virtual-coboundary potentials, and conditionally-negative-
//! type kernel verification with finite GNS embeddings.
//!
//! ## Modules
//!
//! | Module | Provides |
//! |--------|----------|
//! | [`tree`] | Vertex addressing, distances, geodesics, balls, ball automorphisms |
//! | [`edgespace`] | ℓ²_alt edge functions, deg-weighted vertex functions, ∇, ∇*, ℒ, unit flows, path integration |
//! | [`green`] | Closed-form Green kernel, Neumann-series oracle, the projection Q = ∇G∇*, exact norm formulas |
//! | [`cocycle`] | Haagerup cocycle, its harmonic projection, optimal radial profiles, growth bounds, virtual potentials |
//! | [`kernels`] | CND kernel checks, finite GNS embedding, Valette kernels, invariance defects |
//! | [`cli`] | Reproducible CSV/JSON tables, kernel file I/O, the self-test suite |
//!
//! ## Runnable examples
//!
//! One example per capability; run with `cargo run --example <name>`:
//!
//! - **`green_kernel`**: closed-form values vs the random-walk Neumann oracle; spectral radius of the finite-ball transition operator
//! - **`haagerup_projection`**: projecting a unit flow onto gradients; entry values, norm split, harmonicity of the complement
//! - **`growth_profile`**: measured cocycle growth vs the optimal profile and the growth bound; recurrence residuals
//! - **`virtual_potentials`**: the ±½ distance potential, its Green correction, constant divergence, and coboundary differences
//! - **`cnd_kernels`**: conditionally-negative-type verification, witnesses, and GNS reconstruction
//! - **`valette_invariance`**: Valette kernels, admissibility, and invariance defects under ball automorphisms
//!
//! ## Command line
//!
//! The `treeharmonic` binary exposes the same functionality as subcommands
//! (`green`, `profile`, `project`, `potentials`, `kernel-check`, `valette`,
//! `selftest`) with deterministic byte-identical output for identical
//! flags; see the README.

pub mod cli;
pub mod cocycle;
pub mod edgespace;
pub mod error;
pub mod green;
pub mod kernels;
pub mod tree;

pub use error::{Error, Result};
